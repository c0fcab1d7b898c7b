use super::SparseParityCheck;
use crate::error::{Error, Result};
use crate::rng;

/// `J × K` grid of independently column-permuted `s × s` identity blocks.
#[derive(Clone, Debug)]
pub struct BasePermutationMatrix {
    pub s: usize,
    pub j: usize,
    pub k: usize,
    pub seed: u64,
    pub matrix: SparseParityCheck,
}

impl BasePermutationMatrix {
    /// Row count `J·s`.
    pub fn m(&self) -> usize {
        self.j * self.s
    }
}

/// Builds the base matrix. Blocks are drawn in row-major order, each one a
/// Fisher–Yates shuffle of `0..s` giving the column of the single 1 in each
/// block row.
pub fn build_base_permutation(s: usize, j: usize, k: usize, seed: u64) -> Result<BasePermutationMatrix> {
    if s == 0 || j == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!("s, J and K must be positive (s={s}, J={j}, K={k})")));
    }
    let mut rng = rng::seeded(seed);
    let mut rows = vec![Vec::with_capacity(k); j * s];
    let mut perm: Vec<usize> = (0..s).collect();
    for bi in 0..j {
        for bj in 0..k {
            perm.iter_mut().enumerate().for_each(|(x, p)| *p = x);
            rng::shuffle(&mut rng, &mut perm);
            for (x, &px) in perm.iter().enumerate() {
                rows[bi * s + x].push(bj * s + px);
            }
        }
    }
    let matrix = SparseParityCheck::from_rows(j * s, k * s, rows)?;
    Ok(BasePermutationMatrix { s, j, k, seed, matrix })
}

/// Splits a base matrix of shape `(m, r·m)` into its lower part A (entries
/// with `col ≤ r·row`, 1-based) and upper part B (everything else).
pub fn split_ab(base: &SparseParityCheck, r: usize) -> Result<(SparseParityCheck, SparseParityCheck)> {
    let m = base.n_rows();
    if r == 0 || r * m != base.n_cols() {
        return Err(Error::InvalidParameter(format!(
            "base has {} columns, expected r·m = {}·{}",
            base.n_cols(),
            r,
            m
        )));
    }
    let mut a_rows = Vec::with_capacity(m);
    let mut b_rows = Vec::with_capacity(m);
    for i in 0..m {
        let cut = r * (i + 1);
        let (lo, hi): (Vec<usize>, Vec<usize>) = base.row(i).iter().partition(|&&j| j < cut);
        a_rows.push(lo);
        b_rows.push(hi);
    }
    Ok((
        SparseParityCheck::from_rows(m, base.n_cols(), a_rows)?,
        SparseParityCheck::from_rows(m, base.n_cols(), b_rows)?,
    ))
}

/// Generative description of an LDPC-C code: the A and B blocks plus the
/// step geometry. `t = None` describes the unterminated (streaming) code.
#[derive(Clone, Debug)]
pub struct ConvCodeSpec {
    pub a: SparseParityCheck,
    pub b: SparseParityCheck,
    /// Block rows (rows of A and B).
    pub m: usize,
    pub h_s: usize,
    pub v_s: usize,
    /// `h_s / v_s`, also the column/row ratio of the base matrix.
    pub r: usize,
    /// Ribbon width `m + v_s`.
    pub m_s: usize,
    pub t: Option<usize>,
}

impl ConvCodeSpec {
    pub fn from_base(base: &BasePermutationMatrix, v_s: usize, t: Option<usize>) -> Result<Self> {
        if !base.k.is_multiple_of(base.j) {
            return Err(Error::InvalidParameter(format!(
                "K = {} must be a multiple of J = {} for an (m, r·m) base",
                base.k, base.j
            )));
        }
        let r = base.k / base.j;
        let (a, b) = split_ab(&base.matrix, r)?;
        Self::from_parts(a, b, r, v_s, t)
    }

    pub fn from_parts(
        a: SparseParityCheck,
        b: SparseParityCheck,
        r: usize,
        v_s: usize,
        t: Option<usize>,
    ) -> Result<Self> {
        let m = a.n_rows();
        if v_s == 0 {
            return Err(Error::InvalidParameter("v_s must be positive".into()));
        }
        if t == Some(0) {
            return Err(Error::InvalidParameter("t must be at least 1".into()));
        }
        if b.n_rows() != m || a.n_cols() != r * m || b.n_cols() != r * m {
            return Err(Error::InvalidParameter("A and B must both be m × r·m".into()));
        }
        Ok(ConvCodeSpec { a, b, m, h_s: r * v_s, v_s, r, m_s: m + v_s, t })
    }

    /// Convenience constructor: base matrix, split and spec in one go.
    pub fn generate(s: usize, j: usize, k: usize, seed: u64, t: Option<usize>) -> Result<Self> {
        let base = build_base_permutation(s, j, k, seed)?;
        Self::from_base(&base, 1, t)
    }

    pub fn block_cols(&self) -> usize {
        self.r * self.m
    }

    pub fn terminated(&self, t: usize) -> Self {
        ConvCodeSpec { t: Some(t), ..self.clone() }
    }

    /// Column count of the terminated code, if terminated.
    pub fn n(&self) -> Option<usize> {
        self.t.map(|t| t * self.block_cols())
    }

    /// Entry `(i, j)` (0-based) of the, possibly infinite, code.
    pub fn entry(&self, i: usize, j: usize) -> bool {
        let bw = self.block_cols();
        let (bc, jl) = (j / bw, j % bw);
        let (br, il) = (i / self.m, i % self.m);
        if let Some(t) = self.t {
            if br >= t || bc >= t {
                return false;
            }
        }
        if br == bc {
            self.a.get(il, jl)
        } else if br == bc + 1 {
            self.b.get(il, jl)
        } else {
            false
        }
    }

    /// Columns `[lo, hi)` that may hold nonzeros of row `i`.
    pub fn row_span(&self, i: usize) -> (usize, usize) {
        let br = i / self.m;
        let bw = self.block_cols();
        (br.saturating_sub(1) * bw, (br + 1) * bw)
    }

    /// Support of row `i` found by probing [`entry`](Self::entry) across its span.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        let (lo, hi) = self.row_span(i);
        (lo..hi).filter(|&j| self.entry(i, j)).collect()
    }
}

/// Tiles A and B down the diagonal `t` times; B rows past `t·m` are dropped.
pub fn assemble_terminated(spec: &ConvCodeSpec, t: usize) -> Result<SparseParityCheck> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let (m, bw) = (spec.m, spec.block_cols());
    let mut rows = vec![Vec::new(); t * m];
    for c in 0..t {
        for il in 0..m {
            rows[c * m + il].extend(spec.a.row(il).iter().map(|&j| c * bw + j));
            if c + 1 < t {
                rows[(c + 1) * m + il].extend(spec.b.row(il).iter().map(|&j| c * bw + j));
            }
        }
    }
    SparseParityCheck::from_rows(t * m, t * bw, rows)
}
