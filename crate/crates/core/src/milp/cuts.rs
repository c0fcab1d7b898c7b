//! Parity cuts for rows whose variables are all integral.
//!
//! A row `Σ_{v∈N} f_v + c = 2k` with binary `f` forbids every odd set: for
//! `S ⊆ N` with `|S| + c` odd, `Σ_S f − Σ_{N∖S} f ≤ |S| − 1`. The most
//! violated such inequality of a row is found greedily.
//!
//! When no model row yields a cut, rows are combined over GF(2): Gaussian
//! elimination with pivots on the most fractional variables produces
//! redundant parity checks, and those are searched the same way.

use std::collections::HashSet;

use crate::ipmodel::{DecodingModel, VarRole};

const VIOLATION_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Cut {
    pub coefs: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug)]
pub(crate) struct CutSeparator {
    eligible: Vec<bool>,
    /// Eligible rows as bitsets over the f variables.
    packed: Vec<Vec<u64>>,
    odd: Vec<bool>,
    seen: HashSet<Vec<(usize, bool)>>,
}

impl CutSeparator {
    pub fn new(model: &DecodingModel) -> Self {
        let eligible: Vec<bool> = model
            .rows
            .iter()
            .map(|row| row.len() >= 2 && row.iter().all(|&v| model.f_vars[v].role != VarRole::Relaxed))
            .collect();
        let words = model.n_f().div_ceil(64);
        let mut packed = Vec::new();
        let mut odd = Vec::new();
        for (j, row) in model.rows.iter().enumerate() {
            if eligible[j] {
                let mut bits = vec![0u64; words];
                for &v in row {
                    bits[v / 64] |= 1 << (v % 64);
                }
                packed.push(bits);
                odd.push(model.row_constants[j].rem_euclid(2) == 1);
            }
        }
        CutSeparator { eligible, packed, odd, seen: HashSet::new() }
    }

    pub fn separate(&mut self, model: &DecodingModel, f: &[f64]) -> Vec<Cut> {
        let mut cuts = Vec::new();
        for (j, row) in model.rows.iter().enumerate() {
            if self.eligible[j] {
                let odd = model.row_constants[j].rem_euclid(2) == 1;
                self.try_row(row, odd, f, &mut cuts);
            }
        }
        if cuts.is_empty() {
            self.separate_combined(f, &mut cuts);
        }
        cuts
    }

    /// Most violated odd-set inequality of one parity row, if new.
    fn try_row(&mut self, row: &[usize], odd_constant: bool, f: &[f64], cuts: &mut Vec<Cut>) {
        if row.is_empty() {
            return;
        }
        let mut in_s: Vec<bool> = row.iter().map(|&v| f[v] > 0.5).collect();
        let size = in_s.iter().filter(|&&b| b).count();
        if (size % 2 == 1) == odd_constant {
            let pos = (0..row.len())
                .min_by(|&a, &b| (f[row[a]] - 0.5).abs().total_cmp(&(f[row[b]] - 0.5).abs()))
                .expect("row is non-empty");
            in_s[pos] = !in_s[pos];
        }
        let s_len = in_s.iter().filter(|&&b| b).count();
        let lhs: f64 = row.iter().zip(&in_s).map(|(&v, &s)| if s { f[v] } else { -f[v] }).sum();
        let rhs = s_len as f64 - 1.0;
        if lhs > rhs + VIOLATION_TOL {
            let key: Vec<(usize, bool)> = row.iter().copied().zip(in_s.iter().copied()).collect();
            if self.seen.insert(key) {
                let coefs = row.iter().zip(&in_s).map(|(&v, &s)| (v, if s { 1.0 } else { -1.0 })).collect();
                cuts.push(Cut { coefs, rhs });
            }
        }
    }

    fn separate_combined(&mut self, f: &[f64], cuts: &mut Vec<Cut>) {
        let mut rows = self.packed.clone();
        let mut odd = self.odd.clone();
        let mut order: Vec<usize> = (0..f.len()).filter(|&v| (f[v] - f[v].round()).abs() > VIOLATION_TOL).collect();
        order.sort_by(|&a, &b| (f[a] - 0.5).abs().total_cmp(&(f[b] - 0.5).abs()));
        let mut next = 0;
        for &col in &order {
            if next == rows.len() {
                break;
            }
            let (w, bit) = (col / 64, 1u64 << (col % 64));
            let Some(piv) = (next..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
                continue;
            };
            rows.swap(next, piv);
            odd.swap(next, piv);
            let (pivot, pivot_odd) = (rows[next].clone(), odd[next]);
            for r in 0..rows.len() {
                if r != next && rows[r][w] & bit != 0 {
                    rows[r].iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
                    odd[r] ^= pivot_odd;
                }
            }
            next += 1;
        }
        for (bits, &o) in rows.iter().zip(&odd) {
            let support: Vec<usize> = (0..f.len()).filter(|&v| bits[v / 64] >> (v % 64) & 1 == 1).collect();
            self.try_row(&support, o, f, cuts);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2codes::{example_3_6_matrix, SparseParityCheck};
    use crate::ipmodel::build_exact_model;

    #[test]
    fn odd_point_is_cut_off() {
        let h = SparseParityCheck::from_dense(&[vec![1, 1, 1]]).unwrap();
        let model = build_exact_model(&h, &[0; 3]).unwrap();
        let mut sep = CutSeparator::new(&model);
        let cuts = sep.separate(&model, &[1.0, 0.0, 0.0]);
        assert_eq!(cuts, vec![Cut { coefs: vec![(0, 1.0), (1, -1.0), (2, -1.0)], rhs: 0.0 }]);
        // the same cut is not produced twice
        assert!(sep.separate(&model, &[1.0, 0.0, 0.0]).is_empty());
        assert!(sep.separate(&model, &[1.0, 1.0, 0.0]).is_empty());
    }

    #[test]
    fn combined_rows_cut_what_single_rows_miss() {
        // both rows hold at (1, ½, ½, 0); their sum x0 + x3 even does not
        let h = SparseParityCheck::from_dense(&[vec![1, 1, 1, 0], vec![0, 1, 1, 1]]).unwrap();
        let model = build_exact_model(&h, &[0; 4]).unwrap();
        let mut sep = CutSeparator::new(&model);
        let f = [1.0, 0.5, 0.5, 0.0];
        let cuts = sep.separate(&model, &f);
        assert_eq!(cuts, vec![Cut { coefs: vec![(0, 1.0), (3, -1.0)], rhs: 0.0 }]);
    }

    #[test]
    fn cuts_are_valid_for_every_codeword() {
        // every codeword of the fixture satisfies every cut found at random points
        let h = example_3_6_matrix();
        let model = build_exact_model(&h, &[0; 10]).unwrap();
        let codewords: Vec<Vec<u8>> = (0u32..1024)
            .map(|m| (0..10).map(|i| (m >> i & 1) as u8).collect::<Vec<u8>>())
            .filter(|c| h.is_codeword(c))
            .collect();
        let mut r = crate::rng::seeded(5);
        let mut sep = CutSeparator::new(&model);
        for _ in 0..200 {
            let f: Vec<f64> = (0..10).map(|_| crate::rng::unit(&mut r)).collect();
            for cut in sep.separate(&model, &f) {
                for c in &codewords {
                    let lhs: f64 = cut.coefs.iter().map(|&(v, a)| a * c[v] as f64).sum();
                    assert!(lhs <= cut.rhs + 1e-12);
                }
            }
        }
    }
}
