//! Generalised eigenfunctions `Y_{p₁}(x¹)` of `−∂₁² + U(x¹)` for the three
//! potential families, and a smeared completeness diagnostic.
//!
//! All modes are δ-normalised: `∫dx¹ conj(Y_k) Y_p = δ(k − p)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::model::Family;
use crate::quadrature::{self, Domain, QuadratureSpec};
use crate::special::gaussian;

/// `Θ(x)` with `Θ(0) = 1/2`.
#[inline]
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// `ε(x) = Θ(x) − Θ(−x)` (so `ε(0) = 0`).
#[inline]
pub fn sign_step(x: f64) -> f64 {
    heaviside(x) - heaviside(-x)
}

/// Coefficients of the δ-potential eigenfunction
/// `Y_p(x) = a e^{ipx} + b e^{−ipx} + d ε(x) sin(px)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaCoeffs {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    /// `c_p = g/(2p)`.
    pub c: f64,
}

/// δ-potential coefficients for coupling `g > 0` and momentum `p ≠ 0`.
///
/// `a = (1 + 1/√(1+c²))/(2√(2π))`, `b = (−1 + 1/√(1+c²))/(2√(2π))`,
/// `d = c/(√(2π)√(1+c²))` with `c = g/(2p)`.
pub fn delta_coeffs(g: f64, p1: f64) -> DeltaCoeffs {
    let c = g / (2.0 * p1);
    let s = 1.0 / (1.0 + c * c).sqrt();
    let n = 1.0 / (2.0 * PI).sqrt();
    DeltaCoeffs { a: 0.5 * n * (1.0 + s), b: 0.5 * n * (-1.0 + s), d: n * c * s, c }
}

/// `Y_{p₁,s}(x¹)`: the mode for `s = +1`, its complex conjugate for `s = −1`.
pub fn mode_eval(family: Family, p1: f64, x1: f64, s: i8) -> Complex64 {
    let n = 1.0 / (2.0 * PI).sqrt();
    let y = match family {
        Family::Homogeneous => Complex64::from_polar(n, p1 * x1),
        Family::PhaseShift { delta } => {
            let left = heaviside(-x1);
            let right = heaviside(x1);
            Complex64::from_polar(n, p1 * x1) * (Complex64::new(left, 0.0) + Complex64::from_polar(right, delta))
        }
        Family::DeltaPotential { g } => {
            if p1 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                let c = delta_coeffs(g, p1);
                Complex64::from_polar(c.a, p1 * x1) + Complex64::from_polar(c.b, -p1 * x1) + c.d * sign_step(x1) * (p1 * x1).sin()
            }
        }
    };
    if s < 0 {
        y.conj()
    } else {
        y
    }
}

/// Zero mode `Y₀(x¹)` carrying condensates (the `p₁ → 0` limit).
pub fn zero_mode(family: Family, x1: f64) -> Complex64 {
    mode_eval(family, 0.0, x1, 1)
}

/// `∫_{−Λ}^{Λ} dk conj(Y_k(x¹)) Y_k(y¹)` smeared in `y¹` with the Gaussian
/// `G_w(y¹ − x¹)`; tends to `G_w(0) = 1/(√(2π) w)` as `Λ → ∞`.
///
/// The smearing integral over `y¹` is done by quadrature on `x¹ ± 12w`.
pub fn completeness_residual(family: Family, x1: f64, w: f64, cutoff: f64) -> Result<Complex64> {
    let qs = QuadratureSpec::with_tol(1e-9, 1e-11);
    let inner = |y1: f64| -> Complex64 {
        let f = |k: f64| mode_eval(family, k, x1, -1) * mode_eval(family, k, y1, 1);
        let mut breaks = vec![-cutoff];
        let width = (2.0 * PI / (x1 - y1).abs().max(1e-3)).min(cutoff);
        let n = ((2.0 * cutoff / width).ceil() as usize).clamp(1, 4000);
        for j in 1..=n {
            breaks.push(-cutoff + 2.0 * cutoff * j as f64 / n as f64);
        }
        quadrature::adaptive_from(&f, &breaks, &qs).map(|q| q.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let g = |y1: f64| inner(y1) * gaussian(y1 - x1, w);
    let v = quadrature::integrate(g, Domain::Interval(x1 - 12.0 * w, x1 + 12.0 * w), &QuadratureSpec::with_tol(1e-8, 1e-12))?;
    Ok(v.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_zero_momentum() {
        let v = mode_eval(Family::Homogeneous, 0.0, 3.7, 1);
        assert!((v - Complex64::new(1.0 / (2.0 * PI).sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn phase_shift_substitution() {
        let v = mode_eval(Family::PhaseShift { delta: PI }, 1.0, 1.0, 1);
        let e = -Complex64::from_polar(1.0, 1.0) / (2.0 * PI).sqrt();
        assert!((v - e).norm() < 1e-15);
        // |Y| is δ-independent on each half-line.
        for &x in &[-2.0, 3.0] {
            let a = mode_eval(Family::PhaseShift { delta: 0.3 }, 0.7, x, 1).norm();
            let b = mode_eval(Family::PhaseShift { delta: 2.1 }, 0.7, x, 1).norm();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn delta_coefficients() {
        let c = delta_coeffs(2.0, 1.0);
        let n = 1.0 / (2.0 * PI).sqrt();
        assert_eq!(c.c, 1.0);
        assert!((c.a - (1.0 + 0.5f64.sqrt()) * n / 2.0).abs() < 1e-15);
        assert!((c.b - (-1.0 + 0.5f64.sqrt()) * n / 2.0).abs() < 1e-15);
        assert!((c.d - n / 2f64.sqrt()).abs() < 1e-15);
        assert!((c.a - c.b - n).abs() < 1e-15);
        assert!((c.a * c.a - c.b * c.b - n * n / (1.0 + c.c * c.c).sqrt()).abs() < 1e-15);
        let far = delta_coeffs(2.0, 1e9);
        assert!((far.a - n).abs() < 1e-15 && far.b.abs() < 1e-15 && far.d.abs() < 1e-8);
        let neg = delta_coeffs(2.0, -1.0);
        assert_eq!((neg.a, neg.b, neg.d, neg.c), (c.a, c.b, -c.d, -c.c));
    }

    #[test]
    fn delta_mode_jump_condition() {
        // Y'(0+) − Y'(0−) = g Y(0).
        let (g, p) = (1.7, 0.9);
        let h = 1e-6;
        let f = |x: f64| mode_eval(Family::DeltaPotential { g }, p, x, 1);
        let jump = (f(2.0 * h) - f(h)) / h - (f(-h) - f(-2.0 * h)) / h;
        assert!((jump - g * f(0.0)).norm() < 1e-5);
    }

    #[test]
    fn delta_small_coupling_is_plane_wave() {
        let v = mode_eval(Family::DeltaPotential { g: 1e-12 }, 1.0, 0.8, 1);
        let e = mode_eval(Family::Homogeneous, 1.0, 0.8, 1);
        assert!((v - e).norm() < 1e-11);
    }

    #[test]
    fn completeness_homogeneous() {
        let v = completeness_residual(Family::Homogeneous, 0.0, 1.0, 50.0).unwrap();
        assert!((v.re - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-4, "{v}");
    }
}
