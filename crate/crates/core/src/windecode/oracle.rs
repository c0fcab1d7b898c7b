use crate::error::{Error, Result};
use crate::gf2codes::{gf2_rank_nullspace, SparseParityCheck};

/// Largest nullspace dimension enumerated.
pub const MAX_ML_DIMENSION: usize = 24;

fn pack(bits: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b == 1 {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

/// `a` before `b` when, at the first differing bit index, `a` holds 0.
fn lex_less(a: &[u64], b: &[u64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        let d = x ^ y;
        if d != 0 {
            return x & (d & d.wrapping_neg()) == 0;
        }
    }
    false
}

/// Maximum-likelihood decoding by enumerating every codeword.
///
/// Returns the nearest codeword and its distance; among equally near
/// codewords the lexicographically smallest (bit 0 first) wins.
pub fn brute_force_ml(h: &SparseParityCheck, received: &[u8]) -> Result<(Vec<u8>, usize)> {
    if received.len() != h.n_cols() {
        return Err(Error::DimensionMismatch { expected: h.n_cols(), actual: received.len() });
    }
    let ns = gf2_rank_nullspace(h);
    let dim = ns.basis.len();
    if dim > MAX_ML_DIMENSION {
        return Err(Error::TooLarge(dim));
    }
    let basis: Vec<Vec<u64>> = ns.basis.iter().map(|v| pack(v)).collect();
    let y = pack(received);
    let mut cw = vec![0u64; y.len()];
    let distance = |cw: &[u64]| cw.iter().zip(&y).map(|(a, b)| (a ^ b).count_ones() as usize).sum::<usize>();
    let mut best = cw.clone();
    let mut best_d = distance(&cw);
    // Gray-code walk: step g flips basis vector `trailing_zeros(g)`
    for g in 1u64..(1u64 << dim) {
        let v = &basis[g.trailing_zeros() as usize];
        cw.iter_mut().zip(v).for_each(|(c, x)| *c ^= x);
        let d = distance(&cw);
        if d < best_d || (d == best_d && lex_less(&cw, &best)) {
            best_d = d;
            best.copy_from_slice(&cw);
        }
    }
    let bits = (0..h.n_cols()).map(|i| ((best[i / 64] >> (i % 64)) & 1) as u8).collect();
    Ok((bits, best_d))
}
