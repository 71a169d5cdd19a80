//! Square M-QAM constellations: construction, nearest-point decoding and
//! decision-region geometry.
//!
//! Points sit on a `sqrt(M) x sqrt(M)` grid centered at the origin and are
//! normalized to unit average energy, which fixes
//! `d_min = 2 / sqrt((2/3)(M-1))`. Symbols are indexed row-major over the
//! grid (imaginary level first, then real level); ties at decision
//! boundaries resolve to the smallest index.

use num_complex::Complex64;

use crate::error::{ClipfixError, Result};

/// An M-ary square QAM alphabet with unit average energy.
#[derive(Debug, Clone)]
pub struct Constellation {
    order: usize,
    grid_side: usize,
    points: Vec<Complex64>,
    d_min: f64,
    scale: f64,
}

impl Constellation {
    /// Build a square M-QAM constellation. `m` must be one of 4, 16, 64, 256.
    pub fn build(m: usize) -> Result<Self> {
        if !matches!(m, 4 | 16 | 64 | 256) {
            return Err(ClipfixError::InvalidArgument(format!(
                "unsupported QAM order {m}; expected 4, 16, 64 or 256"
            )));
        }
        let side = (m as f64).sqrt().round() as usize;
        debug_assert_eq!(side * side, m);
        // Per-axis levels are odd integers {-(s-1), ..., s-1}; mean of
        // |point|^2 over the grid is 2(M-1)/3 before scaling.
        let scale = (3.0 / (2.0 * (m as f64 - 1.0))).sqrt();
        let mut points = Vec::with_capacity(m);
        for im_idx in 0..side {
            for re_idx in 0..side {
                let re = scale * (2.0 * re_idx as f64 - (side as f64 - 1.0));
                let im = scale * (2.0 * im_idx as f64 - (side as f64 - 1.0));
                points.push(Complex64::new(re, im));
            }
        }
        Ok(Self {
            order: m,
            grid_side: side,
            points,
            d_min: 2.0 * scale,
            scale,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid_side(&self) -> usize {
        self.grid_side
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Minimum distance between any two constellation points.
    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    /// Grid coordinates `(im_level_index, re_level_index)` of a symbol index.
    pub fn grid_coords(&self, index: usize) -> (usize, usize) {
        (index / self.grid_side, index % self.grid_side)
    }

    /// Symbol index at grid coordinates, if inside the grid.
    pub fn index_at(&self, im_idx: isize, re_idx: isize) -> Option<usize> {
        let s = self.grid_side as isize;
        if (0..s).contains(&im_idx) && (0..s).contains(&re_idx) {
            Some((im_idx * s + re_idx) as usize)
        } else {
            None
        }
    }

    /// Nearest level index along one axis, ties resolved downward.
    fn axis_level(&self, x: f64) -> usize {
        let s = self.grid_side;
        // Fractional level index; levels are at scale*(2i - (s-1)).
        let u = (x / self.scale + (s as f64 - 1.0)) / 2.0;
        let lo = u.floor().clamp(0.0, (s - 1) as f64) as usize;
        let hi = u.ceil().clamp(0.0, (s - 1) as f64) as usize;
        if lo == hi {
            return lo;
        }
        let level = |i: usize| self.scale * (2.0 * i as f64 - (s as f64 - 1.0));
        let d_lo = (x - level(lo)).abs();
        let d_hi = (x - level(hi)).abs();
        if d_lo <= d_hi {
            lo
        } else {
            hi
        }
    }

    /// Map `z` to the nearest constellation point, returning the point and
    /// its index. Boundary ties resolve to the smallest index.
    pub fn nearest(&self, z: Complex64) -> (Complex64, usize) {
        let re_idx = self.axis_level(z.re);
        let im_idx = self.axis_level(z.im);
        let index = im_idx * self.grid_side + re_idx;
        (self.points[index], index)
    }

    /// Axis-aligned neighbors at distance `d_min` (NN) and diagonal
    /// neighbors at distance `sqrt(2) d_min` (NNN) of a symbol. Edge and
    /// corner symbols return fewer of each.
    pub fn neighbor_frame(&self, index: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let (nn, nnn) = self.neighbor_frame_indices(index)?;
        Ok((
            nn.into_iter().map(|i| self.points[i]).collect(),
            nnn.into_iter().map(|i| self.points[i]).collect(),
        ))
    }

    /// Index form of [`Constellation::neighbor_frame`].
    pub fn neighbor_frame_indices(&self, index: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        if index >= self.order {
            return Err(ClipfixError::InvalidArgument(format!(
                "symbol index {index} out of range for {}-QAM",
                self.order
            )));
        }
        let (im, re) = self.grid_coords(index);
        let (im, re) = (im as isize, re as isize);
        let mut nn = Vec::with_capacity(4);
        for (di, dr) in [(0isize, 1isize), (0, -1), (1, 0), (-1, 0)] {
            if let Some(i) = self.index_at(im + di, re + dr) {
                nn.push(i);
            }
        }
        let mut nnn = Vec::with_capacity(4);
        for (di, dr) in [(1isize, 1isize), (1, -1), (-1, 1), (-1, -1)] {
            if let Some(i) = self.index_at(im + di, re + dr) {
                nnn.push(i);
            }
        }
        Ok((nn, nnn))
    }

    /// First-tier competitors of a decoded symbol for a perturbation with the
    /// given component signs: the axis neighbor in the real direction, the
    /// axis neighbor in the imaginary direction and the co-quadrant diagonal
    /// neighbor. `None` marks a neighbor that falls off the grid.
    pub fn quadrant_competitors(
        &self,
        index: usize,
        re_positive: bool,
        im_positive: bool,
    ) -> [Option<usize>; 3] {
        let (im, re) = self.grid_coords(index);
        let (im, re) = (im as isize, re as isize);
        let dr = if re_positive { 1 } else { -1 };
        let di = if im_positive { 1 } else { -1 };
        [
            self.index_at(im, re + dr),
            self.index_at(im + di, re),
            self.index_at(im + di, re + dr),
        ]
    }
}
