//! Code construction: base permutation matrices, the A/B split, terminated
//! and streaming LDPC-C codes, and GF(2) rank/nullspace.

mod conv;
mod linalg;
mod sparse;

pub use conv::{assemble_terminated, build_base_permutation, split_ab, BasePermutationMatrix, ConvCodeSpec};
pub use linalg::{gf2_rank_nullspace, RankNullspace};
pub use sparse::SparseParityCheck;

/// The 5 × 10 (3, 6)-regular example matrix used as a fixture throughout the tests.
pub fn example_3_6_matrix() -> SparseParityCheck {
    SparseParityCheck::from_dense(&[
        vec![1, 1, 1, 1, 1, 0, 0, 0, 1, 0],
        vec![0, 0, 1, 0, 0, 1, 1, 1, 1, 1],
        vec![1, 0, 0, 0, 0, 1, 1, 1, 1, 1],
        vec![0, 1, 0, 1, 1, 1, 1, 1, 0, 0],
        vec![1, 1, 1, 1, 1, 0, 0, 0, 0, 1],
    ])
    .expect("fixture is well formed")
}
