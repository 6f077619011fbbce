use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{error::invalid, Error, Result};

/// A point of R², R³ or R⁴.
///
/// Complex coordinates are carried by pairing: `z_k` occupies the real slots
/// `2k-1` and `2k`, so a point of C² is `(Re z₁, Im z₁, Re z₂, Im z₂)`.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 4],
    dim: u8,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if !(2..=4).contains(&coords.len()) {
            return Err(invalid("points must have 2, 3 or 4 coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("non-finite coordinate"));
        }
        let mut buf = [0.0; 4];
        buf[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            coords: buf,
            dim: coords.len() as u8,
        })
    }

    pub const fn xy(x: f64, y: f64) -> Self {
        Self {
            coords: [x, y, 0.0, 0.0],
            dim: 2,
        }
    }

    pub const fn xyz(x: f64, y: f64, z: f64) -> Self {
        Self {
            coords: [x, y, z, 0.0],
            dim: 3,
        }
    }

    pub fn c2(z1: Complex64, z2: Complex64) -> Self {
        Self {
            coords: [z1.re, z1.im, z2.re, z2.im],
            dim: 4,
        }
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: [0.0; 4],
            dim: dim as u8,
        }
    }

    /// Builds a point from a buffer, keeping only the first `dim` slots.
    pub(crate) fn from_array(coords: [f64; 4], dim: usize) -> Self {
        let mut buf = [0.0; 4];
        buf[..dim].copy_from_slice(&coords[..dim]);
        Self {
            coords: buf,
            dim: dim as u8,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub(crate) fn raw(&self) -> [f64; 4] {
        self.coords
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords().iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.coords().iter().zip(other.coords()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, t: f64) -> Point {
        let mut c = self.coords;
        c.iter_mut().for_each(|v| *v *= t);
        Self { coords: c, dim: self.dim }
    }

    pub fn add(&self, other: &Point) -> Point {
        let mut c = self.coords;
        c.iter_mut().zip(other.coords).for_each(|(a, b)| *a += b);
        Self { coords: c, dim: self.dim }
    }

    pub fn sub(&self, other: &Point) -> Point {
        let mut c = self.coords;
        c.iter_mut().zip(other.coords).for_each(|(a, b)| *a -= b);
        Self { coords: c, dim: self.dim }
    }

    /// `self + t (other - self)`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        self.add(&other.sub(self).scale(t))
    }

    /// First complex coordinate `x₁ + i x₂`.
    #[inline]
    pub fn z1(&self) -> Complex64 {
        Complex64::new(self.coords[0], self.coords[1])
    }

    /// Second complex coordinate `x₃ + i x₄` (meaningful in dimension 4).
    #[inline]
    pub fn z2(&self) -> Complex64 {
        Complex64::new(self.coords[2], self.coords[3])
    }

    pub(crate) fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            })
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Point").field(&self.coords()).finish()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}
