use std::io::Write;

use super::{DecoderChoice, ExperimentConfig, ResultRow};
use crate::error::Result;
use crate::windecode::RunStatus;

pub const CSV_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "decoder,variant,w,n,p,seed,z,cpu_s,gap_pct,status,feasible,ber_pct";

/// Where the gap column's lower bound comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapBaseline {
    /// Dual bound of the EMD run on the same instance.
    Emd,
    /// The decoder's own bound: `z` minus its summed window gaps.
    SelfBound,
}

impl GapBaseline {
    pub fn of(cfg: &ExperimentConfig) -> Self {
        if cfg.emd_baseline {
            GapBaseline::Emd
        } else {
            GapBaseline::SelfBound
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            GapBaseline::Emd => "emd",
            GapBaseline::SelfBound => "self",
        }
    }
}

/// Per-decoder summary over a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub decoder: DecoderChoice,
    pub w: usize,
    pub n: usize,
    pub p: f64,
    pub instances: usize,
    pub mean_z: f64,
    pub mean_cpu_s: f64,
    /// Mean over the rows that have a gap.
    pub mean_gap_pct: Option<f64>,
    pub mean_ber_pct: f64,
    /// Runs with status `optimal`.
    pub n_opt: usize,
    /// Runs that produced a complete decoded vector.
    pub n_solved: usize,
    /// Runs whose output is a codeword.
    pub n_feas: usize,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// One aggregate per configured decoder, in configuration order.
pub fn aggregate(decoders: &[DecoderChoice], rows: &[ResultRow]) -> Vec<Aggregate> {
    decoders
        .iter()
        .filter_map(|&d| {
            let mine: Vec<&ResultRow> = rows.iter().filter(|r| r.decoder == d).collect();
            let first = mine.first()?;
            Some(Aggregate {
                decoder: d,
                w: first.w,
                n: first.n,
                p: first.p,
                instances: mine.len(),
                mean_z: mean(mine.iter().map(|r| r.z as f64))?,
                mean_cpu_s: mean(mine.iter().map(|r| r.cpu_s))?,
                mean_gap_pct: mean(mine.iter().filter_map(|r| r.gap_pct)),
                mean_ber_pct: mean(mine.iter().map(|r| r.ber_pct))?,
                n_opt: mine.iter().filter(|r| r.status == RunStatus::Optimal).count(),
                n_solved: mine.iter().filter(|r| r.status.has_decoding()).count(),
                n_feas: mine.iter().filter(|r| r.feasible).count(),
            })
        })
        .collect()
}

fn opt2(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.2}")).unwrap_or_default()
}

/// Writes the per-instance rows followed by one `mean` row per decoder.
///
/// Aggregate rows put the means in the numeric columns, the three counts in
/// `status` as `opt=..;solved=..;feas=..`, and the feasible count in
/// `feasible`.
pub fn write_csv<W: Write>(mut out: W, rows: &[ResultRow], aggregates: &[Aggregate], baseline: GapBaseline) -> Result<()> {
    writeln!(out, "# ldpcc results v{CSV_VERSION}; gap_baseline={}; cpu_s is wall clock", baseline.as_str())?;
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.2},{},{},{},{:.4}",
            r.decoder.decoder_name(),
            r.decoder.variant_name(),
            r.w,
            r.n,
            r.p,
            r.seed,
            r.z,
            r.cpu_s,
            opt2(r.gap_pct),
            r.status.as_str(),
            r.feasible,
            r.ber_pct
        )?;
    }
    for a in aggregates {
        writeln!(
            out,
            "{},{},{},{},{},mean,{:.2},{:.2},{},opt={};solved={};feas={},{},{:.4}",
            a.decoder.decoder_name(),
            a.decoder.variant_name(),
            a.w,
            a.n,
            a.p,
            a.mean_z,
            a.mean_cpu_s,
            opt2(a.mean_gap_pct),
            a.n_opt,
            a.n_solved,
            a.n_feas,
            a.n_feas,
            a.mean_ber_pct
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Two-column plot data: section index and mean errors in that section.
pub fn write_profile<W: Write>(mut out: W, label: &str, section: usize, profile: &[f64]) -> Result<()> {
    writeln!(out, "# ldpcc profile v{CSV_VERSION}; decoder={label}; section_bits={section}")?;
    for (i, e) in profile.iter().enumerate() {
        writeln!(out, "{} {e}", i + 1)?;
    }
    out.flush()?;
    Ok(())
}
