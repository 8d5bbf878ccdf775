//! Fourier multipliers: fractional powers, resolvents and derivatives.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::params::PhysParams;

/// Symbol `|k|^σ`, with the zero mode sent to zero for `σ > 0`.
pub fn power_symbol(k_sq: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        1.0
    } else if k_sq == 0.0 {
        0.0
    } else {
        k_sq.powf(0.5 * sigma)
    }
}

/// `D^σ u = (-Δ)^{σ/2} u`.
pub fn fractional_power_apply(u: &ComplexField, sigma: f64) -> Result<ComplexField> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", format!("{sigma} must be >= 0")));
    }
    u.ensure_finite()?;
    Ok(u.apply_real_symbol(|k2| power_symbol(k2, sigma)))
}

/// `-Δ u` via the symbol `|k|²`.
pub fn neg_laplacian(u: &ComplexField) -> ComplexField {
    u.apply_real_symbol(|k2| k2)
}

/// `u_λ = √c_s (λ - Δ)^{-1} u`.
pub fn resolvent_smooth(
    u: &ComplexField,
    lambda: f64,
    params: &PhysParams,
) -> Result<ComplexField> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", format!("{lambda} must be positive")));
    }
    u.ensure_finite()?;
    let amp = params.c_s().sqrt();
    Ok(u.apply_real_symbol(|k2| amp / (k2 + lambda)))
}

/// Spectral gradient components of a field.
pub fn gradient(u: &ComplexField) -> Vec<ComplexField> {
    let hat = u.to_spectral();
    gradient_from_spectral(u.grid(), hat.values())
        .into_iter()
        .map(|v| {
            ComplexField::from_values(u.grid(), v, crate::field::Space::Physical)
                .expect("gradient keeps the grid size")
        })
        .collect()
}

/// Physical-space gradient components from spectral coefficients. The
/// unpaired Nyquist mode is dropped so real fields have real derivatives.
pub(crate) fn gradient_from_spectral(grid: &Grid, hat: &[Complex64]) -> Vec<Vec<Complex64>> {
    (0..grid.dim())
        .map(|axis| {
            let mut comp: Vec<Complex64> = hat
                .par_iter()
                .enumerate()
                .map(|(idx, &v)| {
                    let ij = grid.unravel(idx);
                    if grid.is_nyquist_index(ij[axis]) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        v * Complex64::new(0.0, grid.k_axis()[ij[axis]])
                    }
                })
                .collect();
            grid.inverse(&mut comp);
            comp
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lebesgue_norm;
    use std::f64::consts::PI;

    #[test]
    fn unit_frequency_is_fixed_by_any_power() {
        let grid = Grid::new(3, 16, PI).unwrap();
        let u = ComplexField::plane_wave(&grid, 1.0, &[1, 0, 0]).unwrap();
        let v = fractional_power_apply(&u, 1.5).unwrap();
        assert!(v.max_rel_diff(&u) < 1e-12);
    }

    #[test]
    fn second_power_of_sine() {
        let grid = Grid::new(1, 64, PI).unwrap();
        let u = ComplexField::from_real_fn(&grid, |x| x[0].sin());
        let v = fractional_power_apply(&u, 2.0).unwrap();
        assert!(v.max_rel_diff(&u) < 1e-12);
        // agrees with the classical spectral Laplacian
        let w = neg_laplacian(&u);
        assert!(v.max_rel_diff(&w) < 1e-14);
    }

    /// Oracle: `D^1 e^{-x²/2}` on ℝ evaluated by direct quadrature of the
    /// inverse Fourier integral `(1/2π) ∫ |ξ| √(2π) e^{-ξ²/2} e^{iξx} dξ`.
    /// The box is large because `D^1` of a Gaussian decays like `|x|^{-2}`
    /// and the periodic images contribute `≈ 0.66/l²`.
    #[test]
    fn first_power_of_gaussian_matches_quadrature() {
        let grid = Grid::new(1, 1 << 20, 16384.0).unwrap();
        let u = ComplexField::from_real_fn(&grid, |x| (-0.5 * x[0] * x[0]).exp());
        let v = fractional_power_apply(&u, 1.0).unwrap();

        // Composite Simpson on [0, 12] (integrand even in ξ).
        let oracle = |x: f64| {
            let m = 24_000;
            let h = 12.0 / m as f64;
            let f = |xi: f64| xi * (-0.5 * xi * xi).exp() * (xi * x).cos();
            let mut acc = f(0.0) + f(12.0);
            for i in 1..m {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(i as f64 * h);
            }
            acc * h / 3.0 * 2.0 / (2.0 * PI).sqrt()
        };

        let vals = v.real_part();
        let mut max_err: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for j in (0..grid.n()).step_by(16) {
            let x = grid.coord(j);
            if x.abs() > 6.0 {
                continue;
            }
            let exact = oracle(x);
            max_err = max_err.max((vals[j] - exact).abs());
            scale = scale.max(exact.abs());
        }
        assert!(max_err / scale < 1e-8, "rel err {}", max_err / scale);
    }

    #[test]
    fn resolvent_single_mode_amplitude() {
        let grid = Grid::new(3, 16, PI).unwrap();
        let params = PhysParams::focusing(0.5, 3.0).unwrap();
        let u = ComplexField::plane_wave(&grid, 1.0, &[0, 1, 0]).unwrap();
        let ul = resolvent_smooth(&u, 1.0, &params).unwrap();
        let expected = (1.0 / PI).sqrt() / 2.0;
        assert!((expected - 0.282095).abs() < 1e-6);
        assert!(ul.max_rel_diff(&u.scaled(expected)) < 1e-12);
    }

    #[test]
    fn resolvent_inverts_shifted_laplacian() {
        let grid = Grid::new(2, 32, 4.0).unwrap();
        let params = PhysParams::focusing(0.7, 3.0).unwrap();
        let u = ComplexField::gaussian(&grid, 1.0, 1.0);
        let lam = 2.5;
        let ul = resolvent_smooth(&u, lam, &params).unwrap();
        let back = ul
            .apply_real_symbol(|k2| k2 + lam)
            .scaled(1.0 / params.c_s().sqrt());
        assert!(back.max_rel_diff(&u) < 1e-12);
    }

    #[test]
    fn resolvent_l2_bound() {
        let grid = Grid::new(2, 32, 4.0).unwrap();
        let params = PhysParams::focusing(0.6, 3.0).unwrap();
        let u = ComplexField::gaussian(&grid, 1.3, 0.8);
        let base = lebesgue_norm(&u, 2.0).unwrap();
        for lam in [1.0, 10.0, 100.0] {
            let ul = resolvent_smooth(&u, lam, &params).unwrap();
            let lhs = lebesgue_norm(&ul, 2.0).unwrap();
            assert!(lhs <= base * params.c_s().sqrt() / lam * (1.0 + 1e-12));
        }
    }

    #[test]
    fn resolvent_rejects_nonpositive_lambda() {
        let grid = Grid::new(1, 16, 1.0).unwrap();
        let params = PhysParams::focusing(0.6, 3.0).unwrap();
        let u = ComplexField::gaussian(&grid, 1.0, 0.3);
        assert!(resolvent_smooth(&u, 0.0, &params).is_err());
        assert!(resolvent_smooth(&u, -1.0, &params).is_err());
    }

    #[test]
    fn non_finite_input_rejected() {
        let grid = Grid::new(1, 16, 1.0).unwrap();
        let mut u = ComplexField::zeros(&grid);
        u.values_mut()[3] = Complex64::new(f64::NAN, 0.0);
        assert!(fractional_power_apply(&u, 1.0).is_err());
    }

    mod algebra {
        use super::*;
        use proptest::prelude::*;

        fn field(grid: &std::sync::Arc<Grid>, a: f64, w: f64, shift: f64) -> ComplexField {
            ComplexField::from_fn(grid, |x| {
                let r2: f64 = x.iter().map(|c| (c - shift) * (c - shift)).sum();
                Complex64::new(a * (-r2 / (w * w)).exp(), 0.3 * a * x[0] * (-r2).exp())
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn powers_compose(s1 in 0.0f64..2.0, s2 in 0.0f64..2.0, a in 0.5f64..2.0, w in 0.5f64..1.5) {
                let grid = Grid::new(2, 32, 5.0).unwrap();
                let u = field(&grid, a, w, 0.2);
                let lhs = fractional_power_apply(&fractional_power_apply(&u, s1).unwrap(), s2).unwrap();
                let rhs = fractional_power_apply(&u, s1 + s2).unwrap();
                prop_assert!(lhs.rel_l2_diff(&rhs) < 1e-12);
            }

            #[test]
            fn resolvent_commutes_with_powers(sigma in 0.0f64..2.0, lam in 0.1f64..50.0, s in 0.1f64..0.95) {
                let grid = Grid::new(1, 64, 5.0).unwrap();
                let params = PhysParams::focusing(s, 3.0).unwrap();
                let u = field(&grid, 1.0, 0.7, -0.4);
                let a = resolvent_smooth(&fractional_power_apply(&u, sigma).unwrap(), lam, &params).unwrap();
                let b = fractional_power_apply(&resolvent_smooth(&u, lam, &params).unwrap(), sigma).unwrap();
                prop_assert!(a.rel_l2_diff(&b) < 1e-12);
            }
        }
    }
}
