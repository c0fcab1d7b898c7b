//! Metrics and experiment batches.

mod config;
mod metrics;
mod report;

pub use config::{DecoderChoice, ExperimentConfig, Method, WindowChoice};
pub use metrics::{compute_ber, error_profile, mean_profile, trend};
pub use report::{aggregate, write_csv, write_profile, Aggregate, GapBaseline, CSV_HEADER, CSV_VERSION};

use std::fs::File;
use std::io::BufWriter;
use std::time::Duration;

use rayon::prelude::*;

use crate::channel::{make_instance, ChannelInstance};
use crate::error::Result;
use crate::gallager::decode_sliding_gallager;
use crate::gf2codes::ConvCodeSpec;
use crate::milp::gap_pct;
use crate::rng::derive_seed;
use crate::windecode::{decode_emd, decode_sliding, DecodeReport, DecoderKind, DecoderParams, Geometry, RunStatus, TerminatedCode};

/// Bits per section of the error profile.
pub const PROFILE_SECTION: usize = 100;

/// One decoder on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub decoder: DecoderChoice,
    pub w: usize,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub z: usize,
    pub cpu_s: f64,
    pub gap_pct: Option<f64>,
    pub status: RunStatus,
    pub feasible: bool,
    pub ber_pct: f64,
    /// Bit errors per section of [`PROFILE_SECTION`] bits.
    pub profile: Vec<usize>,
    /// Error text when the decoder failed outright.
    pub failure: Option<String>,
}

/// Code used by every instance of a batch.
pub fn build_code(cfg: &ExperimentConfig) -> Result<TerminatedCode> {
    let base = crate::gf2codes::build_base_permutation(cfg.s, cfg.j, cfg.k, cfg.seed)?;
    let spec = ConvCodeSpec::from_base(&base, cfg.v_s, Some(cfg.t))?;
    TerminatedCode::new(&spec, cfg.t)
}

pub fn instance_seed(cfg: &ExperimentConfig, index: usize) -> u64 {
    derive_seed(cfg.seed, index as u64)
}

/// Runs one configured decoder. Errors come back as `Err` so the caller can
/// record them.
pub fn run_decoder(
    cfg: &ExperimentConfig,
    code: &TerminatedCode,
    choice: DecoderChoice,
    received: &[u8],
) -> Result<DecodeReport> {
    let w = cfg.w.resolve(&Geometry::of(&code.spec));
    let kind = match choice.method {
        Method::Ip(k) => k,
        Method::Gallager(_) => DecoderKind::FW,
    };
    let mut params = DecoderParams::new(kind, choice.variant, w).with_window_budget(cfg.window_budget);
    params.total_budget = Some(cfg.emd_budget);
    match choice.method {
        Method::Ip(DecoderKind::EMD) => decode_emd(&code.h, received, &cfg.emd_budget),
        Method::Ip(DecoderKind::CC) => crate::windecode::decode_conv(&code.spec, received, &params),
        Method::Ip(_) => decode_sliding(&code.matrix_view(), received, &params),
        Method::Gallager(alg) => {
            decode_sliding_gallager(&code.matrix_view(), received, &params, alg, cfg.gallager_max_iter)
        }
    }
}

fn row_from(
    cfg: &ExperimentConfig,
    choice: DecoderChoice,
    w: usize,
    inst: &ChannelInstance,
    outcome: Result<DecodeReport>,
    baseline: Option<f64>,
) -> ResultRow {
    let base = ResultRow {
        decoder: choice,
        w,
        n: inst.n,
        p: cfg.p,
        seed: inst.seed,
        z: 0,
        cpu_s: 0.0,
        gap_pct: None,
        status: RunStatus::Failed,
        feasible: false,
        ber_pct: 0.0,
        profile: Vec::new(),
        failure: None,
    };
    let report = match outcome {
        Ok(r) => r,
        Err(e) => return ResultRow { failure: Some(e.to_string()), ..base },
    };
    let decoded = if report.status.has_decoding() { &report.decoded } else { &inst.received };
    let dual = if cfg.emd_baseline { baseline } else { report.dual_bound };
    ResultRow {
        z: report.objective_z,
        cpu_s: report.elapsed.as_secs_f64(),
        gap_pct: dual.and_then(|d| report.status.has_decoding().then(|| gap_pct(report.objective_z as f64, d))),
        status: report.status,
        feasible: report.feasible,
        ber_pct: compute_ber(&inst.transmitted, decoded).unwrap_or(100.0),
        profile: error_profile(&inst.transmitted, decoded, PROFILE_SECTION).unwrap_or_default(),
        ..base
    }
}

/// Every configured decoder on one instance, EMD baseline first when asked.
pub fn run_instance(cfg: &ExperimentConfig, code: &TerminatedCode, index: usize) -> Result<Vec<ResultRow>> {
    let inst = make_instance(&code.h, cfg.p, instance_seed(cfg, index))?;
    let w = cfg.w.resolve(&Geometry::of(&code.spec));
    let emd_choice = DecoderChoice::ip(DecoderKind::EMD, crate::ipmodel::Variant::AllBinary);
    let mut emd_report = None;
    let mut baseline = None;
    if cfg.emd_baseline {
        let r = run_decoder(cfg, code, emd_choice, &inst.received);
        baseline = r.as_ref().ok().and_then(|r| r.dual_bound);
        emd_report = Some(r);
    }
    let mut rows = Vec::with_capacity(cfg.decoders.len());
    for &choice in &cfg.decoders {
        let is_emd = choice.method == Method::Ip(DecoderKind::EMD);
        let outcome = match (is_emd, emd_report.take()) {
            (true, Some(r)) => r,
            (false, kept) => {
                emd_report = kept;
                run_decoder(cfg, code, choice, &inst.received)
            }
            (true, None) => run_decoder(cfg, code, choice, &inst.received),
        };
        let w = if is_emd { 0 } else { w };
        rows.push(row_from(cfg, choice, w, &inst, outcome, baseline));
    }
    Ok(rows)
}

/// Output of [`run_experiment`].
#[derive(Clone, Debug)]
pub struct ExperimentResult {
    /// Per-instance rows, ordered by instance then by decoder.
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<Aggregate>,
    pub elapsed: Duration,
}

/// Runs the batch in parallel over instances and writes the CSV when the
/// config names an output file.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = std::time::Instant::now();
    let code = build_code(cfg)?;
    let per_instance: Vec<Vec<ResultRow>> =
        (0..cfg.instances).into_par_iter().map(|i| run_instance(cfg, &code, i)).collect::<Result<_>>()?;
    let rows: Vec<ResultRow> = per_instance.into_iter().flatten().collect();
    let aggregates = aggregate(&cfg.decoders, &rows);
    if let Some(path) = &cfg.output {
        let out = BufWriter::new(File::create(path)?);
        write_csv(out, &rows, &aggregates, GapBaseline::of(cfg))?;
    }
    Ok(ExperimentResult { rows, aggregates, elapsed: start.elapsed() })
}
