//! Periodic box discretisation `[-l, l)^d` with its wave-vector table.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Number of FFT lines handed to a single rayon task.
const LINES_PER_TASK: usize = 64;

/// Uniform tensor grid on the periodic box `[-l, l)^d`.
///
/// Physical sample `j` along an axis sits at `x_j = -l + j·dx`, so the origin is
/// index `n/2`. Arrays are row-major with axis 0 slowest. Spectral arrays use
/// FFT ordering: mode index `m ∈ {0, …, n/2-1, -n/2, …, -1}` with `k = (π/l)·m`.
pub struct Grid {
    dim: usize,
    n: usize,
    half_len: f64,
    dx: f64,
    k_axis: Vec<f64>,
    k_sq: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("half_len", &self.half_len)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.half_len == other.half_len
    }
}

impl Grid {
    /// Build a grid with `n` points per axis on `[-l, l)^d`.
    ///
    /// `d` must be 1, 2 or 3; `n` must be at least 16 and either a power of
    /// two or three times one (so 48 and 96 are accepted).
    pub fn new(d: usize, n: usize, l: f64) -> Result<Arc<Self>> {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidGrid(format!("dimension {d} outside 1..=3")));
        }
        let smooth = n.is_power_of_two() || (n.is_multiple_of(3) && (n / 3).is_power_of_two());
        if n < 16 || !smooth {
            return Err(Error::InvalidGrid(format!(
                "points per axis {n} must be >= 16 and a power of two (or 3 times one)"
            )));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "half length {l} must be positive"
            )));
        }

        let dk = PI / l;
        let k_axis: Vec<f64> = (0..n)
            .map(|i| {
                let m = if i < n / 2 {
                    i as isize
                } else {
                    i as isize - n as isize
                };
                dk * m as f64
            })
            .collect();

        let total = n.pow(d as u32);
        let mut k_sq = vec![0.0; total];
        for (idx, slot) in k_sq.iter_mut().enumerate() {
            let mut rem = idx;
            let mut acc = 0.0;
            for _ in 0..d {
                let k = k_axis[rem % n];
                acc += k * k;
                rem /= n;
            }
            *slot = acc;
        }

        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);

        Ok(Arc::new(Grid {
            dim: d,
            n,
            half_len: l,
            dx: 2.0 * l / n as f64,
            k_axis,
            k_sq,
            forward,
            inverse,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Half side length `l`.
    pub fn half_len(&self) -> f64 {
        self.half_len
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Total number of grid points `n^d`.
    pub fn len(&self) -> usize {
        self.k_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_sq.is_empty()
    }

    /// Quadrature weight `dx^d`.
    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(self.dim as i32)
    }

    /// Box volume `(2l)^d`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_len).powi(self.dim as i32)
    }

    /// Wave numbers along one axis in FFT order.
    pub fn k_axis(&self) -> &[f64] {
        &self.k_axis
    }

    /// Wave-vector spacing `π/l`.
    pub fn dk(&self) -> f64 {
        PI / self.half_len
    }

    /// `|k|²` for every spectral index.
    pub fn k_sq(&self) -> &[f64] {
        &self.k_sq
    }

    /// Largest per-axis wave number `π n / (2 l)` (the Nyquist frequency).
    pub fn k_nyquist(&self) -> f64 {
        PI * self.n as f64 / (2.0 * self.half_len)
    }

    /// Whether the per-axis mode index is the unpaired Nyquist mode `-n/2`.
    pub fn is_nyquist_index(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Physical coordinate of per-axis index `j`.
    pub fn coord(&self, j: usize) -> f64 {
        -self.half_len + j as f64 * self.dx
    }

    /// Per-axis indices of a flattened index, axis 0 first.
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            out[axis] = rem % self.n;
            rem /= self.n;
        }
        out
    }

    /// Physical position of a flattened index (unused trailing slots are zero).
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let ij = self.unravel(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coord(ij[axis]);
        }
        x
    }

    /// Wave vector of a flattened spectral index.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let ij = self.unravel(idx);
        let mut k = [0.0; 3];
        for axis in 0..self.dim {
            k[axis] = self.k_axis[ij[axis]];
        }
        k
    }

    /// `|x|` for every grid point.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.len())
            .map(|idx| {
                let x = self.position(idx);
                (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
            })
            .collect()
    }

    /// Flattened index of the wave vector with per-axis mode numbers `m`
    /// (each in `-n/2..n/2`).
    pub fn spectral_index(&self, m: &[isize]) -> usize {
        assert_eq!(m.len(), self.dim);
        let n = self.n as isize;
        m.iter()
            .fold(0usize, |acc, &mi| acc * self.n + mi.rem_euclid(n) as usize)
    }

    /// In-place forward DFT (unnormalised).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// In-place inverse DFT, normalised by `1/n^d` so that
    /// `inverse(forward(u)) = u`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let scale = 1.0 / self.len() as f64;
        data.par_iter_mut().for_each(|v| *v *= scale);
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.len(), "buffer does not match grid size");
        let fft = if inverse {
            &self.inverse
        } else {
            &self.forward
        };
        let n = self.n;
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                data.par_chunks_mut(n * LINES_PER_TASK)
                    .for_each(|lines| fft.process(lines));
                continue;
            }
            data.par_chunks_mut(n * stride).for_each(|block| {
                // Gather the `stride` interleaved lines of this block into
                // contiguous rows, transform, and scatter back.
                let mut rows = vec![Complex64::new(0.0, 0.0); n * stride];
                for m in 0..n {
                    let src = &block[m * stride..(m + 1) * stride];
                    for (j, v) in src.iter().enumerate() {
                        rows[j * n + m] = *v;
                    }
                }
                rows.par_chunks_mut(n * LINES_PER_TASK)
                    .for_each(|lines| fft.process(lines));
                for m in 0..n {
                    let dst = &mut block[m * stride..(m + 1) * stride];
                    for (j, v) in dst.iter_mut().enumerate() {
                        *v = rows[j * n + m];
                    }
                }
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_table() {
        let g = Grid::new(1, 16, PI).unwrap();
        assert!((g.dx() - 2.0 * PI / 16.0).abs() < 1e-15);
        let mut ks: Vec<f64> = g.k_axis().to_vec();
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected: Vec<f64> = (-8..8).map(|m| m as f64).collect();
        for (a, b) in ks.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn three_dimensional_spacing() {
        let g = Grid::new(3, 64, 20.0).unwrap();
        assert_eq!(g.len(), 64 * 64 * 64);
        assert!((g.k_axis()[1] - PI / 20.0).abs() < 1e-15);
        assert!((g.dx() * 64.0 - 40.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::new(2, 17, 1.0).is_err());
        assert!(Grid::new(4, 16, 1.0).is_err());
        assert!(Grid::new(0, 16, 1.0).is_err());
        assert!(Grid::new(1, 8, 1.0).is_err());
        assert!(Grid::new(1, 40, 1.0).is_err());
        assert!(Grid::new(3, 48, 1.0).is_ok());
        assert!(Grid::new(1, 16, -1.0).is_err());
    }

    #[test]
    fn origin_sits_at_half_index() {
        let g = Grid::new(2, 16, 3.0).unwrap();
        let idx = g.spectral_index(&[8, 8]);
        let x = g.position(idx);
        assert_eq!(x, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn transform_round_trip_3d() {
        let g = Grid::new(3, 16, 2.0).unwrap();
        let orig: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut v = orig.clone();
        g.forward(&mut v);
        g.inverse(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_lands_on_its_mode() {
        let g = Grid::new(2, 16, PI).unwrap();
        let mut v: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let x = g.position(i);
                Complex64::from_polar(1.0, 2.0 * x[0] - 3.0 * x[1])
            })
            .collect();
        g.forward(&mut v);
        let target = g.spectral_index(&[2, -3]);
        for (i, c) in v.iter().enumerate() {
            if i == target {
                assert!((c.norm() - g.len() as f64).abs() < 1e-9);
            } else {
                assert!(c.norm() < 1e-9);
            }
        }
    }
}
