//! LDPC convolutional codes over the binary symmetric channel, decoded with
//! integer-programming sliding-window relax-and-fix decoders.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf2codes`] builds base permutation matrices, the A/B split and
//!   terminated (or streaming) LDPC-C parity-check matrices.
//! * [`channel`] draws BSC instances for the all-zero codeword.
//! * [`ipmodel`] writes the exact parity model and its windowed restrictions.
//! * [`milp`] solves those models (bounded primal simplex + branch and bound).
//! * [`windecode`] runs the sliding-window decoders (CW, FW, RW, CC), the
//!   exact-model baseline and a brute-force ML oracle.
//! * [`gallager`] holds the Gallager A/B bit-flipping baselines.
//! * [`harness`] computes metrics and runs seeded experiment batches.

#![allow(clippy::needless_range_loop)]

pub mod channel;
pub mod error;
pub mod gallager;
pub mod gf2codes;
pub mod harness;
pub mod ipmodel;
pub mod milp;
pub mod rng;
pub mod windecode;

pub use channel::{make_instance, transmit_bsc, ChannelInstance};
pub use error::{Error, Result};
pub use gallager::{decode_sliding_gallager, gallager_a, gallager_b, GallagerAlgorithm, GallagerOutcome};
pub use gf2codes::{
    assemble_terminated, build_base_permutation, gf2_rank_nullspace, split_ab,
    BasePermutationMatrix, ConvCodeSpec, SparseParityCheck,
};
pub use ipmodel::{build_exact_model, build_window_model, DecodingModel, VarRole, Variant};
pub use milp::{solve_bnb, solve_lp, SolveBudget, SolveOutcome, SolveStatus};
pub use windecode::{
    brute_force_ml, decode_conv, decode_emd, decode_sliding, DecodeReport, DecoderKind, DecoderParams,
    FallbackPolicy, RunStatus, TerminatedCode, WindowPosition,
};
