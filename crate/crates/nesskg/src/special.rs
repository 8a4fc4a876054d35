//! Special functions used by the kernels: the normal CDF and density, the
//! Bessel functions `J₀`, `K₁` and the exponentially scaled `I₀`, and the
//! sinc function.
//!
//! The Bessel functions are evaluated from their integral representations
//! with periodic or double-exponential trapezoidal rules, which converge
//! geometrically and stay accurate to a few ulps over the ranges used here.

use std::f64::consts::PI;


/// Standard normal CDF `Φ(x) = ½ erfc(−x/√2)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Normalised Gaussian `G_a(x) = e^{−x²/2a²}/(√(2π) a)`.
pub fn gaussian(x: f64, a: f64) -> f64 {
    (-0.5 * (x / a).powi(2)).exp() / ((2.0 * PI).sqrt() * a)
}

/// `sin(x)/x` with the removable point at 0.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Bessel function `J₀(x) = (1/2π)∫₀^{2π} cos(x sin θ) dθ`.
///
/// The periodic trapezoidal rule is exact up to round-off once the number of
/// nodes exceeds `|x|` by a safety margin.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    let n = (x.ceil() as usize) + 48;
    let h = 2.0 * PI / n as f64;
    let mut s = 0.0;
    for k in 0..n {
        s += (x * (h * k as f64).sin()).cos();
    }
    s / n as f64
}

/// Exponentially scaled modified Bessel function `I₀(x) e^{−|x|}`.
pub fn bessel_i0e(x: f64) -> f64 {
    let x = x.abs();
    if x > 700.0 {
        // Large-argument expansion; the neglected term is O(x⁻⁴) ≲ 1e-12.
        let r = 1.0 / x;
        return (1.0 + r / 8.0 + 9.0 * r * r / 128.0 + 225.0 * r * r * r / 3072.0) / (2.0 * PI * x).sqrt();
    }
    let n = 48 + (24.0 * x.sqrt()).ceil() as usize;
    let h = 2.0 * PI / n as f64;
    let mut s = 0.0;
    for k in 0..n {
        s += (x * ((h * k as f64).cos() - 1.0)).exp();
    }
    s / n as f64
}

/// Modified Bessel function `K₁(x) = ∫₀^∞ e^{−x cosh t} cosh t dt`, `x > 0`.
pub fn bessel_k1(x: f64) -> f64 {
    assert!(x > 0.0, "bessel_k1 requires x > 0");
    // Truncate where x cosh t exceeds x + 745 (relative contribution < e^{-745}).
    let t_max = (1.0 + 745.0 / x).acosh().max(1.0);
    let n = 400usize.max((t_max / 0.02).ceil() as usize);
    let h = t_max / n as f64;
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * t.cosh();
    let mut s = 0.5 * (f(0.0) + f(t_max));
    for k in 1..n {
        s += f(h * k as f64);
    }
    s * h * (-x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-14);
        assert!(1.0 - normal_cdf(-10.0) >= 1.0 - 1e-20);
        assert!(normal_cdf(-10.0) < 1e-20);
    }

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j0(10.0) - (-0.245_935_764_451_348_3)).abs() < 1e-14);
        assert!((bessel_j0(0.0) - 1.0).abs() < 1e-15);
        assert!((bessel_k1(1.0) - 0.601_907_230_197_234_6).abs() < 1e-13);
        assert!((bessel_k1(2.0) - 0.139_865_881_816_522_4).abs() < 1e-13);
        assert!((bessel_i0e(1.0) - 0.465_759_607_593_640_2).abs() < 1e-14);
        assert!((bessel_i0e(1000.0) - 0.012_617_240_455_891_26).abs() < 1e-12);
    }

    #[test]
    fn sinc_is_continuous() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(1e-4 * 0.999) - (1e-4f64 * 0.999).sin() / (1e-4 * 0.999)).abs() < 1e-16);
        assert!((sinc(2.0) - 2f64.sin() / 2.0).abs() < 1e-16);
    }
}
