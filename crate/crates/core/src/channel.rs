//! Binary symmetric channel instances.
//!
//! Experiments always transmit the all-zero codeword. For a linear code on the
//! BSC the decoders behave the same for every transmitted codeword, and the
//! zero word is a codeword of any parity-check matrix.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::gf2codes::SparseParityCheck;
use crate::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelInstance {
    pub n: usize,
    pub p: f64,
    pub transmitted: Vec<u8>,
    pub received: Vec<u8>,
    /// Sorted positions where `received` differs from `transmitted`.
    pub flip_positions: Vec<usize>,
    pub seed: u64,
}

/// Flips each bit independently with probability `p`; bit `i` flips when the
/// `i`-th uniform draw is below `p`.
pub fn transmit_bsc(codeword: &[u8], p: f64, seed: u64) -> Result<ChannelInstance> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("flip probability {p} is outside [0, 1]")));
    }
    let mut rng = rng::seeded(seed);
    let mut received = codeword.to_vec();
    let mut flip_positions = Vec::new();
    for (i, bit) in received.iter_mut().enumerate() {
        let u = rng::unit(&mut rng);
        if u < p || p == 1.0 {
            *bit ^= 1;
            flip_positions.push(i);
        }
    }
    Ok(ChannelInstance {
        n: codeword.len(),
        p,
        transmitted: codeword.to_vec(),
        received,
        flip_positions,
        seed,
    })
}

/// All-zero codeword of length `n` through the BSC.
pub fn make_zero_instance(n: usize, p: f64, seed: u64) -> Result<ChannelInstance> {
    transmit_bsc(&vec![0; n], p, seed)
}

pub fn make_instance(code: &SparseParityCheck, p: f64, seed: u64) -> Result<ChannelInstance> {
    make_zero_instance(code.n_cols(), p, seed)
}

impl ChannelInstance {
    pub fn hamming_distance(&self) -> usize {
        self.transmitted.iter().zip(&self.received).filter(|(a, b)| a != b).count()
    }

    /// `n p seed` on the first line, the received word as a 0/1 string on the second.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.n, self.p, self.seed).unwrap();
        self.received.iter().for_each(|&b| s.push(if b == 1 { '1' } else { '0' }));
        s.push('\n');
        s
    }

    /// Parses the dump format. The transmitted word is taken to be all-zero.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().filter(|l| l.as_ref().map_or(true, |s| !s.starts_with('#')));
        let header = lines.next().ok_or_else(|| Error::Parse("empty instance file".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("bad instance header {header:?}")));
        }
        let bad = |e: &dyn std::fmt::Display| Error::Parse(format!("instance header: {e}"));
        let n: usize = fields[0].parse().map_err(|e| bad(&e))?;
        let p: f64 = fields[1].parse().map_err(|e| bad(&e))?;
        let seed: u64 = fields[2].parse().map_err(|e| bad(&e))?;
        let body = lines.next().ok_or_else(|| Error::Parse("missing received vector".into()))??;
        let received = body
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parse(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        if received.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: received.len() });
        }
        let flip_positions = received.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| i).collect();
        Ok(ChannelInstance { n, p, transmitted: vec![0; n], received, flip_positions, seed })
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}
