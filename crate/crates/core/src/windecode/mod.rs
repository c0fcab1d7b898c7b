//! Sliding-window relax-and-fix decoders and the whole-code baselines.

pub mod geometry;
mod oracle;
mod sliding;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

pub use geometry::{Geometry, MatrixCode, StreamingCode, TerminatedCode, WidthRule, WindowPosition, WindowedCode};
pub use oracle::brute_force_ml;
pub(crate) use sliding::{finish_report, validate as validate_window};
pub use sliding::{decode_conv, decode_sliding, WindowStructureCache};

use crate::error::{Error, Result};
use crate::gf2codes::SparseParityCheck;
use crate::ipmodel::{build_exact_model, Variant};
use crate::milp::{solve_bnb, SolveBudget, SolveStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    /// Complete window: every undecoded column.
    CW,
    /// Finite window of `r·w` columns.
    FW,
    /// Finite window with window structures reused every period.
    RW,
    /// Finite window reading the code through the entry function.
    CC,
    /// The exact model in one solve.
    EMD,
}

impl DecoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::CW => "CW",
            DecoderKind::FW => "FW",
            DecoderKind::RW => "RW",
            DecoderKind::CC => "CC",
            DecoderKind::EMD => "EMD",
        }
    }

    pub fn width_rule(self) -> WidthRule {
        match self {
            DecoderKind::CW => WidthRule::Complete,
            _ => WidthRule::Finite,
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "CW" => DecoderKind::CW,
            "FW" => DecoderKind::FW,
            "RW" => DecoderKind::RW,
            "CC" => DecoderKind::CC,
            "EMD" => DecoderKind::EMD,
            _ => return Err(Error::Parse(format!("unknown decoder {s:?}"))),
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SB" => Ok(Variant::SomeBinary),
            "AB" => Ok(Variant::AllBinary),
            _ => Err(Error::Parse(format!("unknown variant {s:?}"))),
        }
    }
}

/// What to do when a window produces no usable solution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FallbackPolicy {
    /// Fix the leaving bits to their received values and carry on.
    #[default]
    FixReceived,
    /// Stop the run with an error.
    Abort,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoderParams {
    pub decoder: DecoderKind,
    pub variant: Variant,
    /// Window height in rows.
    pub w: usize,
    pub window_budget: SolveBudget,
    /// Budget of the single EMD solve.
    pub total_budget: Option<SolveBudget>,
    pub fallback_policy: FallbackPolicy,
}

impl DecoderParams {
    pub fn new(decoder: DecoderKind, variant: Variant, w: usize) -> Self {
        DecoderParams {
            decoder,
            variant,
            w,
            window_budget: SolveBudget::default(),
            total_budget: None,
            fallback_policy: FallbackPolicy::default(),
        }
    }

    pub fn with_window_budget(mut self, budget: SolveBudget) -> Self {
        self.window_budget = budget;
        self
    }

    pub fn label(&self) -> String {
        match self.decoder {
            DecoderKind::EMD => "EMD".into(),
            d => format!("{}{}", self.variant.tag(), d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowStatus {
    Optimal,
    Feasible,
    NoIncumbent,
    Infeasible,
    /// A row made entirely of fixed bits has odd parity.
    InfeasibleFold,
    /// Bit flipping satisfied every window row.
    Converged,
    /// Bit flipping stopped with unsatisfied window rows.
    Stalled,
}

impl From<SolveStatus> for WindowStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Optimal => WindowStatus::Optimal,
            SolveStatus::Feasible => WindowStatus::Feasible,
            SolveStatus::NoIncumbent => WindowStatus::NoIncumbent,
            SolveStatus::Infeasible => WindowStatus::Infeasible,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowRecord {
    pub position: WindowPosition,
    pub status: WindowStatus,
    pub nodes: u64,
    pub objective: Option<f64>,
    pub dual_bound: Option<f64>,
    pub fallback: bool,
}

/// Overall outcome of one decoding run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RunStatus {
    /// Exact model solved to proven optimality.
    Optimal,
    /// Exact model stopped by its budget with an incumbent.
    Feasible,
    /// Every window produced an incumbent.
    Solved,
    /// At least one window fell back to received values.
    Fallback,
    /// No decoded vector.
    Failed,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Optimal => "optimal",
            RunStatus::Feasible => "feasible",
            RunStatus::Solved => "solved",
            RunStatus::Fallback => "fallback",
            RunStatus::Failed => "failed",
        }
    }

    pub fn has_decoding(self) -> bool {
        self != RunStatus::Failed
    }
}

#[derive(Clone, Debug)]
pub struct DecodeReport {
    pub label: String,
    pub decoded: Vec<u8>,
    /// Hamming distance between `decoded` and the received word.
    pub objective_z: usize,
    pub feasible: bool,
    pub elapsed: Duration,
    pub windows_solved: usize,
    pub windows_suboptimal: usize,
    pub per_window_status: Vec<WindowRecord>,
    pub fallback_activations: usize,
    pub status: RunStatus,
    /// Proven lower bound for EMD; for window decoders `z` minus the summed
    /// per-window gaps.
    pub dual_bound: Option<f64>,
    pub nodes: u64,
}

impl DecodeReport {
    pub fn summary(&self) -> String {
        format!(
            "decoder={} z={} feasible={} status={} windows={} suboptimal={} fallbacks={} nodes={} elapsed_s={:.2}",
            self.label,
            self.objective_z,
            self.feasible,
            self.status.as_str(),
            self.windows_solved,
            self.windows_suboptimal,
            self.fallback_activations,
            self.nodes,
            self.elapsed.as_secs_f64()
        )
    }
}

pub(crate) fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Solves the exact model in one branch and bound.
pub fn decode_emd(h: &SparseParityCheck, received: &[u8], budget: &SolveBudget) -> Result<DecodeReport> {
    let start = Instant::now();
    let model = build_exact_model(h, received)?;
    let out = solve_bnb(&model, budget, None)?;
    let (decoded, status) = match &out.incumbent {
        Some(a) => {
            let bits = a.bits();
            let st = if out.status == SolveStatus::Optimal { RunStatus::Optimal } else { RunStatus::Feasible };
            (bits, st)
        }
        None => (received.to_vec(), RunStatus::Failed),
    };
    let feasible = status.has_decoding() && h.is_codeword(&decoded);
    let objective_z = hamming(&decoded, received);
    Ok(DecodeReport {
        label: "EMD".into(),
        objective_z,
        feasible,
        elapsed: start.elapsed(),
        windows_solved: usize::from(status.has_decoding()),
        windows_suboptimal: usize::from(status == RunStatus::Feasible),
        per_window_status: Vec::new(),
        fallback_activations: 0,
        status,
        dual_bound: out.dual_bound.is_finite().then_some(out.dual_bound),
        nodes: out.nodes,
        decoded,
    })
}
