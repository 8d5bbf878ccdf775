use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngExt};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::reduce::DetSum;

/// Which representation a [`ComplexField`] currently holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Physical,
    Spectral,
}

/// Complex state on a [`Grid`], stored either as point values or as DFT
/// coefficients.
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
    space: Space,
}

impl ComplexField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        ComplexField {
            grid: Arc::clone(grid),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            space: Space::Physical,
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(ComplexField {
            grid: Arc::clone(grid),
            values,
            space,
        })
    }

    /// Sample `f(x)` at every grid point. Unused coordinates are passed as zero.
    pub fn from_fn<F>(grid: &Arc<Grid>, f: F) -> Self
    where
        F: Fn(&[f64; 3]) -> Complex64 + Sync,
    {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(&grid.position(idx)))
            .collect();
        ComplexField {
            grid: Arc::clone(grid),
            values,
            space: Space::Physical,
        }
    }

    pub fn from_real_fn<F>(grid: &Arc<Grid>, f: F) -> Self
    where
        F: Fn(&[f64; 3]) -> f64 + Sync,
    {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Sample a radial profile `f(|x|)`.
    pub fn radial<F>(grid: &Arc<Grid>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Sync,
    {
        Self::from_real_fn(
            grid,
            |x| f((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()),
        )
    }

    /// `amplitude · exp(-|x|² / width²)`.
    pub fn gaussian(grid: &Arc<Grid>, amplitude: f64, width: f64) -> Self {
        Self::radial(grid, |r| amplitude * (-(r * r) / (width * width)).exp())
    }

    /// Gaussian envelope `exp(-|x|²/width²)` times a random complex field
    /// band-limited to `|k| ≤ k_max`, scaled so the peak modulus is `amplitude`.
    pub fn random_bump<R: Rng + ?Sized>(
        grid: &Arc<Grid>,
        amplitude: f64,
        width: f64,
        k_max: f64,
        rng: &mut R,
    ) -> Self {
        let cut = k_max * k_max;
        let mut values: Vec<Complex64> = grid
            .k_sq()
            .iter()
            .map(|&k2| {
                let re = rng.random::<f64>() - 0.5;
                let im = rng.random::<f64>() - 0.5;
                if k2 <= cut {
                    Complex64::new(re, im)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        grid.inverse(&mut values);
        let radii = grid.radii();
        for (v, r) in values.iter_mut().zip(&radii) {
            *v *= (-(r * r) / (width * width)).exp();
        }
        let peak = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if peak > 0.0 {
            values.iter_mut().for_each(|v| *v *= amplitude / peak);
        }
        ComplexField {
            grid: Arc::clone(grid),
            values,
            space: Space::Physical,
        }
    }

    /// `amplitude · exp(i k·x)` with `k = (π/l)·modes`.
    pub fn plane_wave(grid: &Arc<Grid>, amplitude: f64, modes: &[isize]) -> Result<Self> {
        if modes.len() != grid.dim() {
            return Err(Error::param("k", "mode vector length must equal d"));
        }
        let dk = grid.dk();
        let k: Vec<f64> = modes.iter().map(|&m| m as f64 * dk).collect();
        Ok(Self::from_fn(grid, |x| {
            let phase: f64 = k.iter().zip(x.iter()).map(|(ki, xi)| ki * xi).sum();
            Complex64::from_polar(amplitude, phase)
        }))
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn same_grid(&self, other: &ComplexField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn into_spectral(mut self) -> Self {
        if self.space == Space::Physical {
            self.grid.forward(&mut self.values);
            self.space = Space::Spectral;
        }
        self
    }

    pub fn into_physical(mut self) -> Self {
        if self.space == Space::Spectral {
            self.grid.inverse(&mut self.values);
            self.space = Space::Physical;
        }
        self
    }

    pub fn to_spectral(&self) -> Self {
        self.clone().into_spectral()
    }

    pub fn to_physical(&self) -> Self {
        self.clone().into_physical()
    }

    /// Multiply the spectral coefficients by `symbol(|k|²)` and return the
    /// result in physical space.
    pub fn apply_symbol<F>(&self, symbol: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        let mut out = self.to_spectral();
        let k_sq = self.grid.k_sq();
        out.values
            .par_iter_mut()
            .zip(k_sq.par_iter())
            .for_each(|(v, &k2)| *v *= symbol(k2));
        out.into_physical()
    }

    /// Real-valued version of [`apply_symbol`](Self::apply_symbol).
    pub fn apply_real_symbol<F>(&self, symbol: F) -> Self
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.apply_symbol(|k2| Complex64::new(symbol(k2), 0.0))
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.par_iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let phys = self.to_physical();
        let values = phys.values.par_iter().map(|&v| f(v)).collect();
        ComplexField {
            grid: Arc::clone(&self.grid),
            values,
            space: Space::Physical,
        }
    }

    /// Pointwise `self + c·other` in physical space.
    pub fn add_scaled(&self, other: &ComplexField, c: Complex64) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let a = self.to_physical();
        let b = other.to_physical();
        let values = a
            .values
            .par_iter()
            .zip(b.values.par_iter())
            .map(|(x, y)| x + c * y)
            .collect();
        Ok(ComplexField {
            grid: Arc::clone(&self.grid),
            values,
            space: Space::Physical,
        })
    }

    /// `Σ |u|² dx^d`, computed in whichever space the field lives.
    pub fn norm_sq(&self) -> f64 {
        let sum: f64 = self.values.par_iter().map(|v| v.norm_sqr()).det_sum();
        match self.space {
            Space::Physical => sum * self.grid.cell_volume(),
            Space::Spectral => sum * self.grid.cell_volume() / self.grid.len() as f64,
        }
    }

    /// Real part in physical space.
    pub fn real_part(&self) -> Vec<f64> {
        self.to_physical().values.iter().map(|v| v.re).collect()
    }

    /// Largest relative deviation `max|a-b| / max|b|` between two fields.
    pub fn max_rel_diff(&self, other: &ComplexField) -> f64 {
        let a = self.to_physical();
        let b = other.to_physical();
        let scale = b.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    /// Relative L² distance `‖a-b‖ / ‖b‖`.
    pub fn rel_l2_diff(&self, other: &ComplexField) -> f64 {
        let a = self.to_physical();
        let b = other.to_physical();
        let (mut num, mut den) = (0.0, 0.0);
        for (x, y) in a.values.iter().zip(&b.values) {
            num += (x - y).norm_sqr();
            den += y.norm_sqr();
        }
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}
