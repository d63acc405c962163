use std::io::Write;

use crate::error::{Error, Result};

/// Row-major boolean raster; row 0 is the southernmost row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize) -> Self {
        Mask {
            width,
            height,
            cells: vec![false; width * height],
        }
    }

    pub fn filled(width: usize, height: usize) -> Self {
        Mask {
            width,
            height,
            cells: vec![true; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Mask::new(width, height);
        for r in 0..height {
            for c in 0..width {
                m.cells[r * width + c] = f(r, c);
            }
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: bool) {
        self.cells[row * self.width + col] = v;
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&b| b)
    }

    pub(crate) fn check_dims(&self, other: &Mask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(())
    }

    pub fn or_assign(&mut self, other: &Mask) -> Result<()> {
        self.check_dims(other)?;
        for (a, &b) in self.cells.iter_mut().zip(&other.cells) {
            *a |= b;
        }
        Ok(())
    }

    pub fn and_not_assign(&mut self, other: &Mask) -> Result<()> {
        self.check_dims(other)?;
        for (a, &b) in self.cells.iter_mut().zip(&other.cells) {
            *a &= !b;
        }
        Ok(())
    }

    pub fn and_assign(&mut self, other: &Mask) -> Result<()> {
        self.check_dims(other)?;
        for (a, &b) in self.cells.iter_mut().zip(&other.cells) {
            *a &= b;
        }
        Ok(())
    }

    /// True when every set cell of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.dims() == other.dims() && self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
    }

    /// Binary PGM (P5), 255 = set. Rows are written north to south.
    pub fn write_pgm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        let mut row = vec![0u8; self.width];
        for r in (0..self.height).rev() {
            for (c, px) in row.iter_mut().enumerate() {
                *px = if self.get(r, c) { 255 } else { 0 };
            }
            w.write_all(&row)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_layout_is_north_up() {
        let mut m = Mask::new(3, 2);
        m.set(1, 0, true);
        let mut buf = Vec::new();
        m.write_pgm(&mut buf).unwrap();
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(&buf[header.len()..], &[255, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut a = Mask::new(2, 2);
        assert!(matches!(
            a.or_assign(&Mask::new(3, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
