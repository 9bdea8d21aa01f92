//! Tabulated functions on rectangular node lattices, evaluated by
//! multilinear interpolation.
//!
//! Values are stored row-major: the last axis varies fastest. Points outside
//! the lattice box are clamped to its boundary.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<const D: usize> {
    shape: [usize; D],
    lower: [f64; D],
    upper: [f64; D],
    values: Vec<f64>,
}

impl<const D: usize> Lattice<D> {
    pub fn new(shape: [usize; D], lower: [f64; D], upper: [f64; D], values: Vec<f64>) -> Result<Self> {
        for axis in 0..D {
            if shape[axis] < 2 {
                return Err(Error::InvalidSpec(format!(
                    "axis {axis} needs at least 2 nodes, got {}",
                    shape[axis]
                )));
            }
            if !(lower[axis].is_finite() && upper[axis].is_finite() && upper[axis] > lower[axis]) {
                return Err(Error::InvalidSpec(format!(
                    "axis {axis} has an empty range [{}, {}]",
                    lower[axis], upper[axis]
                )));
            }
        }
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(Error::InvalidSpec(format!(
                "expected {expected} values for shape {shape:?}, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidSpec(format!(
                "tabulated values must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(Self {
            shape,
            lower,
            upper,
            values,
        })
    }

    pub fn shape(&self) -> [usize; D] {
        self.shape
    }

    pub fn lower(&self) -> [f64; D] {
        self.lower
    }

    pub fn upper(&self) -> [f64; D] {
        self.upper
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn flat_index(&self, idx: &[usize; D]) -> usize {
        idx.iter().zip(self.shape.iter()).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn node(&self, idx: [usize; D]) -> f64 {
        self.values[self.flat_index(&idx)]
    }

    /// Coordinate of node `i` along `axis`; the last node is exactly `upper`.
    pub fn node_coordinate(&self, axis: usize, i: usize) -> f64 {
        let n = self.shape[axis] - 1;
        if i >= n {
            self.upper[axis]
        } else {
            self.lower[axis] + (self.upper[axis] - self.lower[axis]) * i as f64 / n as f64
        }
    }

    pub fn eval(&self, point: [f64; D]) -> f64 {
        let mut base = [0usize; D];
        let mut frac = [0.0f64; D];
        for axis in 0..D {
            let (lo, hi) = (self.lower[axis], self.upper[axis]);
            let x = point[axis].clamp(lo, hi);
            let cells = (self.shape[axis] - 1) as f64;
            let t = (x - lo) / (hi - lo) * cells;
            let i = (t.floor() as usize).min(self.shape[axis] - 2);
            base[axis] = i;
            frac[axis] = (t - i as f64).clamp(0.0, 1.0);
        }

        // Collapse one axis at a time; bit `k` of a corner index selects the
        // upper node along the `k`-th remaining axis.
        let mut corners: Vec<f64> = (0..(1usize << D))
            .map(|corner| {
                let mut idx = base;
                for (axis, i) in idx.iter_mut().enumerate() {
                    *i += corner >> axis & 1;
                }
                self.node(idx)
            })
            .collect();
        for &t in &frac {
            corners = corners.chunks(2).map(|pair| lerp(pair[0], pair[1], t)).collect();
        }
        corners[0]
    }

    /// Checks every pair of adjacent nodes along every axis. With `strict`,
    /// consecutive values must differ by more than `strict_gap`.
    pub fn is_monotone(&self, strict: bool, strict_gap: f64) -> bool {
        let total = self.values.len();
        for flat in 0..total {
            let idx = self.unflatten(flat);
            let here = self.values[flat];
            for axis in 0..D {
                if idx[axis] + 1 >= self.shape[axis] {
                    continue;
                }
                let mut next = idx;
                next[axis] += 1;
                let there = self.node(next);
                let ok = if strict {
                    there - here > strict_gap
                } else {
                    there >= here
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// Largest absolute slope between adjacent nodes, over all axes.
    pub fn max_slope(&self) -> f64 {
        let mut slope = 0.0f64;
        for flat in 0..self.values.len() {
            let idx = self.unflatten(flat);
            for axis in 0..D {
                if idx[axis] + 1 >= self.shape[axis] {
                    continue;
                }
                let mut next = idx;
                next[axis] += 1;
                let spacing = (self.upper[axis] - self.lower[axis]) / (self.shape[axis] - 1) as f64;
                slope = slope.max((self.node(next) - self.values[flat]).abs() / spacing);
            }
        }
        slope
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.shape,
            self.lower,
            self.upper,
            self.values.iter().map(|v| v * factor).collect(),
        )
    }

    fn unflatten(&self, mut flat: usize) -> [usize; D] {
        let mut idx = [0usize; D];
        for axis in (0..D).rev() {
            idx[axis] = flat % self.shape[axis];
            flat /= self.shape[axis];
        }
        idx
    }
}

/// Exact at both ends and whenever `a == b`.
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 1.0 {
        b
    } else {
        a + t * (b - a)
    }
}
