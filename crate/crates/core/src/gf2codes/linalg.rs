//! GF(2) Gaussian elimination on packed 64-bit words.

use super::SparseParityCheck;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankNullspace {
    pub rank: usize,
    /// Each vector `b` satisfies `b · Hᵀ = 0 (mod 2)`; `n_cols − rank` of them.
    pub basis: Vec<Vec<u8>>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

/// Reduced row echelon form over GF(2); returns the rank, pivot columns and
/// the reduced packed rows.
fn rref(h: &SparseParityCheck) -> (Vec<usize>, Vec<Vec<u64>>) {
    let n = h.n_cols();
    let w = words(n);
    let mut rows: Vec<Vec<u64>> = h
        .rows()
        .iter()
        .map(|r| {
            let mut packed = vec![0u64; w];
            for &j in r {
                packed[j / 64] |= 1 << (j % 64);
            }
            packed
        })
        .collect();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..n {
        let (word, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (next..rows.len()).find(|&i| rows[i][word] & bit != 0) else {
            continue;
        };
        rows.swap(next, p);
        let pivot_row = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && row[word] & bit != 0 {
                row.iter_mut().zip(&pivot_row).for_each(|(a, b)| *a ^= b);
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    (pivots, rows)
}

pub fn gf2_rank_nullspace(h: &SparseParityCheck) -> RankNullspace {
    let n = h.n_cols();
    let (pivots, reduced) = rref(h);
    let mut is_pivot = vec![false; n];
    pivots.iter().for_each(|&c| is_pivot[c] = true);
    let basis = (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0u8; n];
            v[free] = 1;
            for (row, &pc) in reduced.iter().zip(&pivots) {
                if row[free / 64] >> (free % 64) & 1 == 1 {
                    v[pc] = 1;
                }
            }
            v
        })
        .collect();
    RankNullspace { rank: pivots.len(), basis }
}
