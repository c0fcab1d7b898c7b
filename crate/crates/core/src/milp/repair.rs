//! Primal heuristic: turn an LP point into a parity-consistent bit vector.
//!
//! Free variables are ordered from least to most reliable (closest to ½
//! first). Gaussian elimination over GF(2) pivots on the least reliable
//! ones; every other free bit keeps its rounded LP value and the pivot bits
//! are solved for. This is ordered-statistics decoding of order zero; the
//! search then also tries flipping one non-pivot bit, and pairs among the
//! least reliable non-pivots, keeping the cheapest result.

use crate::ipmodel::{DecodingModel, VarRole};

/// Non-pivot bits taken into the pair search.
const PAIR_POOL: usize = 12;

/// Cheapest parity-consistent bits found near `f` under `cost`
/// (the objective is `Σ cost_i·bit_i` up to a constant).
pub(crate) fn repair(model: &DecodingModel, f: &[f64], cost: &[f64]) -> Option<Vec<u8>> {
    let n = model.n_f();
    let words = n.div_ceil(64) + 1;
    // the last word of each row holds its right-hand side
    let rhs_word = words - 1;
    let fixed = |v: usize| match model.f_vars[v].role {
        VarRole::Fixed(b) => Some(b),
        _ => None,
    };
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(model.rows.len());
    for (row, &c) in model.rows.iter().zip(&model.row_constants) {
        let mut bits = vec![0u64; words];
        let mut parity = c.rem_euclid(2) as u64;
        for &v in row {
            match fixed(v) {
                Some(b) => parity ^= b as u64,
                None => bits[v / 64] ^= 1 << (v % 64),
            }
        }
        bits[rhs_word] = parity;
        rows.push(bits);
    }

    let mut order: Vec<usize> = (0..n).filter(|&v| fixed(v).is_none()).collect();
    order.sort_by(|&a, &b| (f[a] - 0.5).abs().total_cmp(&(f[b] - 0.5).abs()).then(a.cmp(&b)));
    let mut pivots = Vec::new();
    let mut next = 0;
    for &col in &order {
        if next == rows.len() {
            break;
        }
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (next..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
            continue;
        };
        rows.swap(next, p);
        let pivot = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && row[w] & bit != 0 {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        pivots.push(col);
        next += 1;
    }
    if rows[next..].iter().any(|r| r[rhs_word] & 1 == 1) {
        return None;
    }
    let has = |r: usize, v: usize| rows[r][v / 64] >> (v % 64) & 1 == 1;

    let mut bits: Vec<u8> = (0..n).map(|v| fixed(v).unwrap_or(u8::from(f[v] > 0.5))).collect();
    for (r, &col) in pivots.iter().enumerate() {
        let mut value = rows[r][rhs_word] & 1;
        for v in 0..n {
            if v != col && fixed(v).is_none() && has(r, v) {
                value ^= bits[v] as u64;
            }
        }
        bits[col] = value as u8;
    }

    // cost change of flipping bit v, and the pivot rows a non-pivot flip drags along
    let delta = |v: usize| if bits[v] == 1 { -cost[v] } else { cost[v] };
    let is_pivot: Vec<bool> = (0..n).map(|v| pivots.contains(&v)).collect();
    let free_non_pivots: Vec<usize> =
        order.iter().copied().filter(|&v| !is_pivot[v]).collect();
    let dragged: Vec<Vec<usize>> =
        free_non_pivots.iter().map(|&v| (0..pivots.len()).filter(|&r| has(r, v)).collect()).collect();
    let single: Vec<f64> = free_non_pivots
        .iter()
        .zip(&dragged)
        .map(|(&v, rs)| delta(v) + rs.iter().map(|&r| delta(pivots[r])).sum::<f64>())
        .collect();

    let mut best: (f64, Vec<usize>) = (0.0, Vec::new());
    for (i, &d) in single.iter().enumerate() {
        if d < best.0 - 1e-9 {
            best = (d, vec![i]);
        }
    }
    let pool = free_non_pivots.len().min(PAIR_POOL);
    for a in 0..pool {
        for b in a + 1..pool {
            // pivots dragged by both flips stay put
            let mut d = delta(free_non_pivots[a]) + delta(free_non_pivots[b]);
            let (ra, rb) = (&dragged[a], &dragged[b]);
            d += ra.iter().filter(|r| !rb.contains(r)).map(|&r| delta(pivots[r])).sum::<f64>();
            d += rb.iter().filter(|r| !ra.contains(r)).map(|&r| delta(pivots[r])).sum::<f64>();
            if d < best.0 - 1e-9 {
                best = (d, vec![a, b]);
            }
        }
    }
    for &i in &best.1 {
        bits[free_non_pivots[i]] ^= 1;
        for &r in &dragged[i] {
            bits[pivots[r]] ^= 1;
        }
    }
    Some(bits)
}
