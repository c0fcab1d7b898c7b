//! The exact parity model and its windowed restrictions.
//!
//! Every model row reads `Σ f_v + c_j = 2·k_j` over the row's variables, with
//! `c_j` the sum of bits already fixed outside the model. The objective is
//! the Hamming distance to the received word written as a linear form:
//! coefficient `+1` where the received bit is 0, `−1` where it is 1, plus a
//! constant.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2codes::SparseParityCheck;
use crate::windecode::geometry::{Geometry, MatrixCode, WindowPosition, WindowedCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarRole {
    Binary,
    /// Continuous in `[0, 1]`.
    Relaxed,
    Fixed(u8),
}

/// How many undecoded window bits are declared binary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Only the next `h_s` bits.
    SomeBinary,
    /// The first `r·w` bits, clipped to the window width.
    AllBinary,
}

impl Variant {
    pub fn tag(self) -> &'static str {
        match self {
            Variant::SomeBinary => "SB",
            Variant::AllBinary => "AB",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FVar {
    /// Global bit index.
    pub bit: usize,
    pub role: VarRole,
    /// `+1` if the received bit is 0, `−1` if it is 1.
    pub cost: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KVar {
    /// Global row index of the parity check.
    pub row: usize,
    pub upper: i64,
    pub integer: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodingModel {
    pub f_vars: Vec<FVar>,
    pub k_vars: Vec<KVar>,
    /// Indices into `f_vars`, one list per model row.
    pub rows: Vec<Vec<usize>>,
    pub row_constants: Vec<i64>,
    pub objective_constant: i64,
}

impl DecodingModel {
    pub fn n_f(&self) -> usize {
        self.f_vars.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn count_role(&self, pred: impl Fn(VarRole) -> bool) -> usize {
        self.f_vars.iter().filter(|v| pred(v.role)).count()
    }

    /// Objective (constant included) of a 0/1 assignment to `f_vars`.
    pub fn objective_of(&self, f: &[u8]) -> i64 {
        self.objective_constant
            + self.f_vars.iter().zip(f).map(|(v, &x)| v.cost as i64 * x as i64).sum::<i64>()
    }

    /// Received value of each model variable, read back from the objective sign.
    pub fn received_value(&self, idx: usize) -> u8 {
        u8::from(self.f_vars[idx].cost < 0)
    }

    pub fn row_satisfied(&self, row: usize, f: &[u8]) -> bool {
        let sum: i64 = self.rows[row].iter().map(|&v| f[v] as i64).sum::<i64>() + self.row_constants[row];
        sum % 2 == 0
    }

    /// Completes a 0/1 `f` with `k_j = (Σ f + c_j)/2`; `None` if some row is odd,
    /// out of bounds, or a fixed variable disagrees.
    pub fn complete_k(&self, f: &[u8]) -> Option<Vec<i64>> {
        for (v, &x) in self.f_vars.iter().zip(f) {
            if let VarRole::Fixed(val) = v.role {
                if val != x {
                    return None;
                }
            }
        }
        self.rows
            .iter()
            .zip(&self.row_constants)
            .zip(&self.k_vars)
            .map(|((row, &c), k)| {
                let sum = row.iter().map(|&v| f[v] as i64).sum::<i64>() + c;
                (sum % 2 == 0 && sum / 2 <= k.upper).then_some(sum / 2)
            })
            .collect()
    }

    pub fn is_feasible(&self, f: &[u8]) -> bool {
        f.len() == self.n_f() && f.iter().all(|&x| x <= 1) && self.complete_k(f).is_some()
    }

    /// LP-style text dump for inspection.
    pub fn to_lp_string(&self) -> String {
        let mut s = String::new();
        writeln!(s, "\\ decoding model: {} f vars, {} rows", self.n_f(), self.n_rows()).unwrap();
        write!(s, "minimize\n  obj: {}", self.objective_constant).unwrap();
        for (i, v) in self.f_vars.iter().enumerate() {
            write!(s, " {} f{}", if v.cost < 0 { "-" } else { "+" }, i).unwrap();
        }
        s.push_str("\nsubject to\n");
        for (j, row) in self.rows.iter().enumerate() {
            write!(s, "  r{}:", self.k_vars[j].row).unwrap();
            for &v in row {
                write!(s, " + f{v}").unwrap();
            }
            writeln!(s, " - 2 k{j} = {}", -self.row_constants[j]).unwrap();
        }
        s.push_str("bounds\n");
        for (i, v) in self.f_vars.iter().enumerate() {
            match v.role {
                VarRole::Fixed(x) => writeln!(s, "  f{i} = {x}").unwrap(),
                _ => writeln!(s, "  0 <= f{i} <= 1").unwrap(),
            }
        }
        for (j, k) in self.k_vars.iter().enumerate() {
            writeln!(s, "  0 <= k{j} <= {}", k.upper).unwrap();
        }
        s.push_str("binary\n");
        for (i, v) in self.f_vars.iter().enumerate() {
            if v.role == VarRole::Binary {
                writeln!(s, "  f{i}").unwrap();
            }
        }
        s.push_str("general\n");
        for (j, k) in self.k_vars.iter().enumerate() {
            if k.integer {
                writeln!(s, "  k{j}").unwrap();
            }
        }
        s.push_str("end\n");
        s
    }
}

/// Row layout of a window, independent of the received word and of the
/// values of fixed bits. Offsets are relative to the window's top-left
/// corner, so a structure can be re-instantiated at a window that repeats it.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowStructure {
    /// `bit − left` of each f variable.
    f_offsets: Vec<usize>,
    roles: Vec<VarRole>,
    rows: Vec<StructRow>,
    /// Rows with no variable in the window; only their parity is checked.
    checks: Vec<StructRow>,
}

#[derive(Clone, Debug, PartialEq)]
struct StructRow {
    /// `row − top`.
    offset: usize,
    vars: Vec<usize>,
    /// `left − col` for fixed columns left of the window.
    folded: Vec<usize>,
}

impl WindowStructure {
    pub fn build(
        code: &dyn WindowedCode,
        window: &WindowPosition,
        variant: Variant,
        fixed: &[Option<u8>],
    ) -> Result<Self> {
        let g = code.geometry();
        let (left, right) = (window.left, window.right());
        if right > code.n_cols() || window.top + window.height > code.n_rows() {
            return Err(Error::InvalidParameter(format!("window {window:?} exceeds the code")));
        }
        let free_cols = (left..right).filter(|&c| fixed[c].is_none()).count();
        let binary = if window.is_final {
            free_cols
        } else {
            match variant {
                Variant::SomeBinary => g.h_s,
                Variant::AllBinary => g.r * window.height,
            }
        };
        let mut roles = Vec::with_capacity(window.width);
        let mut seen_free = 0;
        for c in left..right {
            roles.push(match fixed[c] {
                Some(v) => VarRole::Fixed(v),
                None => {
                    seen_free += 1;
                    if seen_free <= binary {
                        VarRole::Binary
                    } else {
                        VarRole::Relaxed
                    }
                }
            });
        }
        let mut rows = Vec::new();
        let mut checks = Vec::new();
        for row in window.top..window.top + window.height {
            let support = code.row_support(row);
            let mut vars = Vec::new();
            let mut folded = Vec::new();
            for &col in support.iter() {
                if col >= right {
                    return Err(Error::Coverage { row, col, left, right });
                } else if col >= left {
                    vars.push(col - left);
                } else if fixed[col].is_some() {
                    folded.push(left - col);
                } else {
                    return Err(Error::InvalidParameter(format!(
                        "bit {col} of row {row} lies left of the window but is not fixed"
                    )));
                }
            }
            let sr = StructRow { offset: row - window.top, vars, folded };
            if sr.vars.is_empty() {
                checks.push(sr);
            } else {
                rows.push(sr);
            }
        }
        Ok(WindowStructure { f_offsets: (0..window.width).collect(), roles, rows, checks })
    }

    /// Fills constants, objective and bounds for the window at `window`.
    pub fn instantiate(&self, received: &[u8], window: &WindowPosition, fixed: &[Option<u8>]) -> Result<DecodingModel> {
        let left = window.left;
        let fixed_value = |col: usize| fixed[col].expect("folded bits are fixed") as i64;
        for chk in &self.checks {
            let c: i64 = chk.folded.iter().map(|&d| fixed_value(left - d)).sum();
            if c % 2 != 0 {
                return Err(Error::InfeasibleFold { row: window.top + chk.offset });
            }
        }
        let f_vars: Vec<FVar> = self
            .f_offsets
            .iter()
            .zip(&self.roles)
            .map(|(&off, &role)| {
                let bit = left + off;
                let role = match role {
                    VarRole::Fixed(_) => VarRole::Fixed(fixed[bit].expect("fixed role keeps its bit fixed")),
                    other => other,
                };
                FVar { bit, role, cost: if received[bit] == 1 { -1 } else { 1 } }
            })
            .collect();
        let mut folded_cost: BTreeMap<usize, i64> = BTreeMap::new();
        let mut row_constants = Vec::with_capacity(self.rows.len());
        let mut k_vars = Vec::with_capacity(self.rows.len());
        for sr in &self.rows {
            let mut c = 0;
            for &d in &sr.folded {
                let col = left - d;
                let v = fixed_value(col);
                c += v;
                folded_cost.insert(col, (v - received[col] as i64).abs());
            }
            row_constants.push(c);
            k_vars.push(KVar { row: window.top + sr.offset, upper: (sr.vars.len() as i64 + c) / 2, integer: true });
        }
        let objective_constant = f_vars.iter().filter(|v| v.cost < 0).count() as i64 + folded_cost.values().sum::<i64>();
        Ok(DecodingModel {
            f_vars,
            k_vars,
            rows: self.rows.iter().map(|r| r.vars.clone()).collect(),
            row_constants,
            objective_constant,
        })
    }

    pub fn n_f(&self) -> usize {
        self.f_offsets.len()
    }
}

/// The full exact model: every bit binary, every check a row.
pub fn build_exact_model(h: &SparseParityCheck, received: &[u8]) -> Result<DecodingModel> {
    if received.len() != h.n_cols() {
        return Err(Error::DimensionMismatch { expected: h.n_cols(), actual: received.len() });
    }
    let geometry = Geometry { m: h.n_rows().max(1), h_s: 1, v_s: 1, r: 1, m_s: h.n_rows() + 1 };
    let code = MatrixCode { h, geometry };
    let window = WindowPosition {
        iteration: 0,
        top: 0,
        left: 0,
        height: h.n_rows(),
        width: h.n_cols(),
        is_final: true,
    };
    let fixed = vec![None; h.n_cols()];
    WindowStructure::build(&code, &window, Variant::AllBinary, &fixed)?.instantiate(received, &window, &fixed)
}

/// Window model: roles per `variant`, bits left of the window folded into
/// the row constants, fully fixed rows checked and dropped.
pub fn build_window_model(
    code: &dyn WindowedCode,
    received: &[u8],
    window: &WindowPosition,
    variant: Variant,
    fixed: &[Option<u8>],
) -> Result<DecodingModel> {
    if received.len() != code.n_cols() {
        return Err(Error::DimensionMismatch { expected: code.n_cols(), actual: received.len() });
    }
    if fixed.len() != code.n_cols() {
        return Err(Error::DimensionMismatch { expected: code.n_cols(), actual: fixed.len() });
    }
    WindowStructure::build(code, window, variant, fixed)?.instantiate(received, window, fixed)
}
