//! Gallager A and B bit-flipping decoders, standalone and inside the sliding window.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::gf2codes::SparseParityCheck;
use crate::windecode::geometry::{WindowPosition, WindowedCode};
use crate::windecode::{DecodeReport, DecoderParams, WindowRecord, WindowStatus};

/// Iteration cap used throughout the experiments.
pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GallagerAlgorithm {
    /// Flip the single bit with the most unsatisfied checks.
    A,
    /// Flip every bit whose checks are mostly unsatisfied.
    B,
}

impl fmt::Display for GallagerAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GallagerAlgorithm::A => "GA",
            GallagerAlgorithm::B => "GB",
        })
    }
}

impl FromStr for GallagerAlgorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" | "GA" => Ok(GallagerAlgorithm::A),
            "B" | "GB" => Ok(GallagerAlgorithm::B),
            _ => Err(Error::Parse(format!("unknown Gallager algorithm {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GallagerOutcome {
    pub decoded: Vec<u8>,
    pub feasible: bool,
    pub iterations: usize,
    /// Unsatisfied-row count before the first iteration and after each one.
    pub unsatisfied_history: Vec<usize>,
}

/// Bit-flipping state over a set of parity rows with constant offsets.
#[derive(Clone, Debug)]
pub struct FlipState<'a> {
    rows: &'a [Vec<usize>],
    cols: Vec<Vec<usize>>,
    pub current: Vec<u8>,
    pub unsatisfied: Vec<bool>,
    /// Unsatisfied checks touching each bit.
    pub u: Vec<usize>,
    /// Check degree of each bit.
    pub d: Vec<usize>,
    pub n_unsatisfied: usize,
    pub iterations: usize,
}

impl<'a> FlipState<'a> {
    /// `constants[j]` is added to the parity of row `j`.
    pub fn new(rows: &'a [Vec<usize>], constants: &[u8], start: Vec<u8>) -> Self {
        let n = start.len();
        let mut cols = vec![Vec::new(); n];
        for (j, row) in rows.iter().enumerate() {
            for &v in row {
                cols[v].push(j);
            }
        }
        let unsatisfied: Vec<bool> = rows
            .iter()
            .zip(constants)
            .map(|(row, &c)| (row.iter().map(|&v| start[v] as usize).sum::<usize>() + c as usize) % 2 == 1)
            .collect();
        let mut u = vec![0; n];
        for (j, row) in rows.iter().enumerate() {
            if unsatisfied[j] {
                row.iter().for_each(|&v| u[v] += 1);
            }
        }
        let d = cols.iter().map(Vec::len).collect();
        let n_unsatisfied = unsatisfied.iter().filter(|&&x| x).count();
        FlipState { rows, cols, current: start, unsatisfied, u, d, n_unsatisfied, iterations: 0 }
    }

    pub fn flip(&mut self, i: usize) {
        self.current[i] ^= 1;
        for &j in &self.cols[i] {
            let now = !self.unsatisfied[j];
            self.unsatisfied[j] = now;
            if now {
                self.n_unsatisfied += 1;
                self.rows[j].iter().for_each(|&v| self.u[v] += 1);
            } else {
                self.n_unsatisfied -= 1;
                self.rows[j].iter().for_each(|&v| self.u[v] -= 1);
            }
        }
    }

    fn majority(&self, i: usize) -> bool {
        2 * self.u[i] > self.d[i]
    }

    /// Runs the chosen algorithm until the rows are satisfied, no flip is
    /// possible or `max_iter` iterations have run.
    pub fn run(&mut self, algorithm: GallagerAlgorithm, max_iter: usize) -> Vec<usize> {
        let mut history = vec![self.n_unsatisfied];
        while self.n_unsatisfied > 0 && self.iterations < max_iter {
            self.iterations += 1;
            match algorithm {
                GallagerAlgorithm::A => {
                    // lowest index among the maxima
                    let l = (0..self.u.len()).fold(0, |best, i| if self.u[i] > self.u[best] { i } else { best });
                    if self.u.is_empty() || !self.majority(l) {
                        history.push(self.n_unsatisfied);
                        break;
                    }
                    let before = self.n_unsatisfied;
                    self.flip(l);
                    assert!(self.n_unsatisfied < before, "a Gallager A flip must reduce the unsatisfied rows");
                }
                GallagerAlgorithm::B => {
                    let flips: Vec<usize> = (0..self.u.len()).filter(|&i| self.majority(i)).collect();
                    if flips.is_empty() {
                        history.push(self.n_unsatisfied);
                        break;
                    }
                    flips.into_iter().for_each(|i| self.flip(i));
                }
            }
            history.push(self.n_unsatisfied);
        }
        history
    }
}

fn run_standalone(h: &SparseParityCheck, received: &[u8], max_iter: usize, alg: GallagerAlgorithm) -> Result<GallagerOutcome> {
    if received.len() != h.n_cols() {
        return Err(Error::DimensionMismatch { expected: h.n_cols(), actual: received.len() });
    }
    let constants = vec![0u8; h.n_rows()];
    let mut state = FlipState::new(h.rows(), &constants, received.to_vec());
    let unsatisfied_history = state.run(alg, max_iter);
    Ok(GallagerOutcome {
        feasible: state.n_unsatisfied == 0,
        iterations: state.iterations,
        decoded: state.current,
        unsatisfied_history,
    })
}

pub fn gallager_a(h: &SparseParityCheck, received: &[u8], max_iter: usize) -> Result<GallagerOutcome> {
    run_standalone(h, received, max_iter, GallagerAlgorithm::A)
}

pub fn gallager_b(h: &SparseParityCheck, received: &[u8], max_iter: usize) -> Result<GallagerOutcome> {
    run_standalone(h, received, max_iter, GallagerAlgorithm::B)
}

/// Sliding-window decoding with a Gallager algorithm in place of the window
/// model. Window geometry, fixing and folding follow the relax-and-fix loop.
pub fn decode_sliding_gallager(
    code: &dyn WindowedCode,
    received: &[u8],
    params: &DecoderParams,
    algorithm: GallagerAlgorithm,
    max_iter: usize,
) -> Result<DecodeReport> {
    crate::windecode::validate_window(code, received, params.w)?;
    let start = Instant::now();
    let g = code.geometry();
    let (n_rows, n_cols) = (code.n_rows(), code.n_cols());
    let rule = params.decoder.width_rule();
    let mut fixed: Vec<Option<u8>> = vec![None; n_cols];
    let mut records = Vec::new();
    let mut it = 0;
    loop {
        let pos = WindowPosition::at(it, params.w, g, n_rows, n_cols, rule);
        let (left, right) = (pos.left, pos.right());
        let mut rows = Vec::new();
        let mut constants = Vec::new();
        for row in pos.top..pos.top + pos.height {
            let mut vars = Vec::new();
            let mut c = 0u8;
            for &col in code.row_support(row).iter() {
                if col >= right {
                    return Err(Error::Coverage { row, col, left, right });
                } else if col >= left {
                    vars.push(col - left);
                } else {
                    c ^= fixed[col].expect("bits left of the window are fixed");
                }
            }
            if !vars.is_empty() {
                rows.push(vars);
                constants.push(c);
            }
        }
        let mut state = FlipState::new(&rows, &constants, received[left..right].to_vec());
        state.run(algorithm, max_iter);
        let leaving = if pos.is_final { pos.width } else { g.h_s.min(pos.width) };
        for off in 0..leaving {
            fixed[left + off] = Some(state.current[off]);
        }
        records.push(WindowRecord {
            position: pos,
            status: if state.n_unsatisfied == 0 { WindowStatus::Converged } else { WindowStatus::Stalled },
            nodes: state.iterations as u64,
            objective: None,
            dual_bound: None,
            fallback: false,
        });
        if pos.is_final {
            break;
        }
        it += 1;
    }
    let decoded = fixed.into_iter().map(|v| v.expect("every bit is fixed by the final window")).collect();
    let label = format!("{algorithm}{}", params.decoder);
    Ok(crate::windecode::finish_report(label, code, received, decoded, records, 0, None, start))
}
