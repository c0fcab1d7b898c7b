use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::gf2codes::{assemble_terminated, ConvCodeSpec, SparseParityCheck};

/// Step geometry shared by every window decoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Geometry {
    pub m: usize,
    pub h_s: usize,
    pub v_s: usize,
    pub r: usize,
    pub m_s: usize,
}

impl Geometry {
    pub fn of(spec: &ConvCodeSpec) -> Self {
        Geometry { m: spec.m, h_s: spec.h_s, v_s: spec.v_s, r: spec.r, m_s: spec.m_s }
    }

    /// Window-structure period in iterations: the code repeats every `m` rows.
    pub fn period(&self) -> usize {
        self.m / gcd(self.m, self.v_s)
    }

    /// The two window heights used in the experiments: `m + 1` and `⌊3m/2⌋ + 1`.
    pub fn small_window(&self) -> usize {
        self.m + 1
    }

    pub fn large_window(&self) -> usize {
        3 * self.m / 2 + 1
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Row access the window decoders need. Rows are returned sorted.
pub trait WindowedCode: Sync {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    fn geometry(&self) -> Geometry;
    fn row_support(&self, row: usize) -> Cow<'_, [usize]>;
}

/// An explicit parity-check matrix together with the step geometry it was built with.
#[derive(Clone, Debug)]
pub struct MatrixCode<'a> {
    pub h: &'a SparseParityCheck,
    pub geometry: Geometry,
}

impl WindowedCode for MatrixCode<'_> {
    fn n_rows(&self) -> usize {
        self.h.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.h.n_cols()
    }
    fn geometry(&self) -> Geometry {
        self.geometry
    }
    fn row_support(&self, row: usize) -> Cow<'_, [usize]> {
        Cow::Borrowed(self.h.row(row))
    }
}

/// A terminated code that owns both its spec and the assembled matrix.
#[derive(Clone, Debug)]
pub struct TerminatedCode {
    pub spec: ConvCodeSpec,
    pub h: SparseParityCheck,
}

impl TerminatedCode {
    pub fn new(spec: &ConvCodeSpec, t: usize) -> Result<Self> {
        let h = assemble_terminated(spec, t)?;
        Ok(TerminatedCode { spec: spec.terminated(t), h })
    }

    pub fn matrix_view(&self) -> MatrixCode<'_> {
        MatrixCode { h: &self.h, geometry: Geometry::of(&self.spec) }
    }

    pub fn streaming_view(&self) -> StreamingCode<'_> {
        StreamingCode { spec: &self.spec, n_rows: self.h.n_rows(), n_cols: self.h.n_cols() }
    }
}

impl WindowedCode for TerminatedCode {
    fn n_rows(&self) -> usize {
        self.h.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.h.n_cols()
    }
    fn geometry(&self) -> Geometry {
        Geometry::of(&self.spec)
    }
    fn row_support(&self, row: usize) -> Cow<'_, [usize]> {
        Cow::Borrowed(self.h.row(row))
    }
}

/// A code read entry by entry through [`ConvCodeSpec::entry`], never assembled.
///
/// For an unterminated spec the received stream of `n` bits is decoded
/// against the rows whose support lies inside those `n` bits.
#[derive(Clone, Debug)]
pub struct StreamingCode<'a> {
    pub spec: &'a ConvCodeSpec,
    pub n_rows: usize,
    pub n_cols: usize,
}

impl<'a> StreamingCode<'a> {
    pub fn new(spec: &'a ConvCodeSpec, received_len: usize) -> Result<Self> {
        let n_rows = match spec.t {
            Some(t) => {
                let n = t * spec.block_cols();
                if received_len != n {
                    return Err(Error::DimensionMismatch { expected: n, actual: received_len });
                }
                t * spec.m
            }
            None => received_len / spec.r,
        };
        Ok(StreamingCode { spec, n_rows, n_cols: received_len })
    }
}

impl WindowedCode for StreamingCode<'_> {
    fn n_rows(&self) -> usize {
        self.n_rows
    }
    fn n_cols(&self) -> usize {
        self.n_cols
    }
    fn geometry(&self) -> Geometry {
        Geometry::of(self.spec)
    }
    fn row_support(&self, row: usize) -> Cow<'_, [usize]> {
        Cow::Owned(self.spec.row_support(row))
    }
}

/// Which decoder family picks the window width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WidthRule {
    /// All remaining columns (CW).
    Complete,
    /// `r·w` columns (FW, RW, CC).
    Finite,
}

/// One window placement: rows `[top, top + height)`, columns `[left, left + width)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowPosition {
    pub iteration: usize,
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
    /// The last window takes every remaining row and column.
    pub is_final: bool,
}

impl WindowPosition {
    /// Window number `iteration` of height `w`.
    pub fn at(iteration: usize, w: usize, g: Geometry, n_rows: usize, n_cols: usize, rule: WidthRule) -> Self {
        let top = iteration * g.v_s;
        let left = (iteration * g.h_s).min(n_cols);
        let is_final = top + w >= n_rows;
        let height = w.min(n_rows.saturating_sub(top));
        let width = if is_final {
            n_cols - left
        } else {
            match rule {
                WidthRule::Complete => n_cols - left,
                WidthRule::Finite => (g.r * w).min(n_cols - left),
            }
        };
        WindowPosition { iteration, top, left, height, width, is_final }
    }

    pub fn right(&self) -> usize {
        self.left + self.width
    }

    pub fn advance(&self, w: usize, g: Geometry, n_rows: usize, n_cols: usize, rule: WidthRule) -> Self {
        Self::at(self.iteration + 1, w, g, n_rows, n_cols, rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> Geometry {
        Geometry { m: 6, h_s: 2, v_s: 1, r: 2, m_s: 7 }
    }

    #[test]
    fn positions_step_by_h_and_v() {
        let g = geom();
        let mut pos = WindowPosition::at(0, 8, g, 18, 36, WidthRule::Finite);
        for it in 0..5 {
            assert_eq!(pos.top, it * g.v_s);
            assert_eq!(pos.left, it * g.h_s);
            assert_eq!(pos.width, 16);
            pos = pos.advance(8, g, 18, 36, WidthRule::Finite);
        }
    }

    #[test]
    fn final_window_takes_the_rest() {
        let g = geom();
        let pos = WindowPosition::at(10, 8, g, 18, 36, WidthRule::Finite);
        assert!(pos.is_final);
        assert_eq!((pos.height, pos.right()), (8, 36));
        let early = WindowPosition::at(9, 8, g, 18, 36, WidthRule::Finite);
        assert!(!early.is_final);
    }

    #[test]
    fn complete_windows_span_to_the_end() {
        let pos = WindowPosition::at(3, 8, geom(), 18, 36, WidthRule::Complete);
        assert_eq!((pos.left, pos.width), (6, 30));
    }

    #[test]
    fn streaming_view_matches_matrix_rows() {
        let spec = ConvCodeSpec::generate(2, 3, 6, 9, None).unwrap();
        let code = TerminatedCode::new(&spec, 4).unwrap();
        let stream = code.streaming_view();
        for i in 0..code.n_rows() {
            assert_eq!(stream.row_support(i).as_ref(), code.h.row(i));
        }
        let unterminated = StreamingCode::new(&spec, code.n_cols()).unwrap();
        assert_eq!(unterminated.n_rows(), code.n_rows());
    }
}
