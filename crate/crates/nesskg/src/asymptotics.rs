//! Large-time and large-distance decay of the Bose-weighted kernels.
//!
//! Substituting `ω = m + y` and `y = w/t` in the radial mode integral of the
//! vacuum-subtracted thermal kernel gives the one-dimensional form
//!
//! ```text
//! W_β(t, r) = (4π²)⁻¹ t^{−3/2} Σ_s e^{ismt} C_s(t),
//! C_s(t)    = ∫₀^∞ dw √w e^{isw} c(w/t),
//! c(y)      = √(y+2m) b_β(y+m) sinc(κr),        κ = √(y² + 2ym).
//! ```
//!
//! Restricting the angular integral to one half space `±p₁ > 0` (the
//! directed pieces of the NESS, `x` on the `x¹` axis) gives
//!
//! ```text
//! X_±(t, x¹) = (8π²)⁻¹ t^{−3/2} Σ_s e^{ismt} D_{±,s}(t),
//! D_{±,s}(t) = ∫₀^∞ dw √w e^{isw} d_{±,s}(w/t),
//! d_{±,s}(y) = √(y+2m) b_β(y+m) ∫₀¹dz e^{∓isκx¹z},
//! ```
//!
//! with `d_{+,s} + d_{−,s} = 2c`, so `W_N = X_{+,β₁} + X_{−,β₂}` collapses to
//! `W_β` at `β₁ = β₂`. Both `c(0)` and `d_{±,s}(0) = √(2m) b_β(m)` are
//! non-zero, so at fixed position the thermal *and* the NESS kernel decay
//! like `t^{−3/2}`; the NESS kernel has a subleading `t^{−2}` term from the
//! `√y` behaviour of `κ`.
//!
//! In the `x¹` direction the NESS kernel at fixed `t ≠ 0` has a `1/x¹` tail
//! with amplitude `(4π²)⁻¹ ∫₀^∞dy [b_{β₂} − b_{β₁}](y+m) sin((y+m)t)`, which
//! vanishes at `t = 0` (equal-time correlations are the mean of the two
//! thermal ones and decay exponentially). Transverse to `x¹` the NESS kernel
//! is the mean of the thermal kernels for every `t`, evaluated at `t = 0`
//! through the Matsubara image sum
//! `W_β(0, r) = Σ_{n≥1} m K₁(mρₙ)/(2π²ρₙ)`, `ρₙ = √(r² + n²β²)`.
//!
//! The `w`-integrals are undamped oscillatory integrals with an absolutely
//! convergent Bose tail; they are evaluated with half-period panels and
//! Wynn acceleration.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kms::{self, ThermalKernelSpec};
use crate::model::{ModelSpec, ThermoParams};
use crate::ness::{self, NessKernelSpec};
use crate::quadrature::{fit_power_law, integrate_oscillatory, DecayReport, QuadratureSpec};
use crate::special::{bessel_k1, sinc};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Which Bose-weighted kernel is reduced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    /// Vacuum-subtracted thermal kernel `W_β`.
    ThermalW { beta: f64 },
    /// Bose-weighted NESS kernel `W_N = X_{+,β₁} + X_{−,β₂}`.
    NessW { beta1: f64, beta2: f64 },
}

/// A reduced kernel at fixed spatial offset.
///
/// `r` is the radius for [`KernelKind::ThermalW`] and the signed `x¹` offset
/// (transverse offset zero) for [`KernelKind::NessW`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedKernel {
    pub kind: KernelKind,
    pub r: f64,
    pub m: f64,
}

impl ReducedKernel {
    pub fn thermal(m: f64, beta: f64, r: f64) -> Self {
        Self { kind: KernelKind::ThermalW { beta }, r, m }
    }

    pub fn ness(m: f64, beta1: f64, beta2: f64, x1: f64) -> Self {
        Self { kind: KernelKind::NessW { beta1, beta2 }, r: x1, m }
    }

    fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) || !self.m.is_finite() {
            return Err(Error::ConstraintViolation(format!("m > 0 (m = {})", self.m)));
        }
        let betas = match self.kind {
            KernelKind::ThermalW { beta } => vec![beta],
            KernelKind::NessW { beta1, beta2 } => vec![beta1, beta2],
        };
        for b in betas {
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::ConstraintViolation(format!("0 < beta < inf (beta = {b})")));
            }
        }
        if !self.r.is_finite() {
            return Err(Error::ConstraintViolation("finite spatial offset".into()));
        }
        Ok(())
    }
}

/// Direction of a decay scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayDirection {
    /// Samples are times `t` at the kernel's fixed offset. The scanned
    /// magnitude is the phase-stripped envelope `|W₊| + |W₋|` of the two
    /// frequency components, which removes the `e^{±imt}` beating.
    Time,
    /// Samples are `x¹` offsets at fixed time `t`.
    X1 { t: f64 },
    /// Samples are transverse (`x²`) offsets at equal times.
    X2,
}

fn bose_at(beta: f64, e: f64) -> f64 {
    1.0 / (beta * e).exp_m1()
}

/// `∫₀¹ dz e^{−iaz}`.
fn half_phase(a: f64) -> Complex64 {
    if a.abs() < 1e-6 {
        return Complex64::new(1.0 - a * a / 6.0, -0.5 * a);
    }
    (Complex64::from_polar(1.0, -a) - 1.0) / (-I * a)
}

/// Thermal reduced integrand `c(y)`.
fn c_kernel(beta: f64, m: f64, r: f64, y: f64) -> f64 {
    let kappa = (y * y + 2.0 * y * m).sqrt();
    (y + 2.0 * m).sqrt() * bose_at(beta, y + m) * sinc(kappa * r)
}

/// Directed reduced integrand `d_{±,s}(y)`; `dir = ±1`.
fn d_kernel(beta: f64, m: f64, x1: f64, dir: f64, s: f64, y: f64) -> Complex64 {
    let kappa = (y * y + 2.0 * y * m).sqrt();
    (y + 2.0 * m).sqrt() * bose_at(beta, y + m) * half_phase(dir * s * kappa * x1)
}

/// `∫₀^∞ dw √w e^{isw} f(w/t)` by half-period panels with Wynn acceleration.
pub fn w_integral<F: Fn(f64) -> Complex64 + Sync>(t: f64, s: f64, f: F, qs: &QuadratureSpec) -> Result<Complex64> {
    let g = |w: f64| {
        let v = w.sqrt() * Complex64::from_polar(1.0, s * w) * f(w / t);
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    integrate_oscillatory(g, 0.0, 2.0 * PI, qs).map(|q| q.value)
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::ConstraintViolation(format!("t > 0 (t = {t})")));
    }
    Ok(())
}

/// Frequency components `[W₊, W₋]` of `W(t, r)`, carrying `e^{+imt}` and
/// `e^{−imt}` respectively, through the one-dimensional `w`-integrals
/// (`t > 0`).
pub fn w_largetime_components(kernel: &ReducedKernel, t: f64) -> Result<[Complex64; 2]> {
    kernel.validate()?;
    check_time(t)?;
    let qs = QuadratureSpec::default();
    let m = kernel.m;
    let r = kernel.r;
    let pref = t.powf(-1.5) / (8.0 * PI * PI);
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (slot, s) in out.iter_mut().zip([1.0f64, -1.0]) {
        let phase = Complex64::from_polar(1.0, s * m * t);
        let integral = match kernel.kind {
            KernelKind::ThermalW { beta } => {
                2.0 * w_integral(t, s, |y| Complex64::new(c_kernel(beta, m, r, y), 0.0), &qs)?
            }
            KernelKind::NessW { beta1, beta2 } => {
                w_integral(t, s, |y| d_kernel(beta1, m, r, 1.0, s, y) + d_kernel(beta2, m, r, -1.0, s, y), &qs)?
            }
        };
        *slot = pref * phase * integral;
    }
    Ok(out)
}

/// `W(t, r)` through the one-dimensional `w`-integrals (`t > 0`).
pub fn w_largetime(kernel: &ReducedKernel, t: f64) -> Result<Complex64> {
    let [a, b] = w_largetime_components(kernel, t)?;
    Ok(a + b)
}

/// Leading large-time term: `f(w/t) → f(0)` in the `w`-integrals, using
/// `∫₀^∞ dw √w e^{isw} = Γ(3/2) e^{3iπs/4}`.
///
/// `t^{3/2}` times this term is a bounded oscillation with a
/// `t`-independent envelope.
pub fn leading_term(kernel: &ReducedKernel, t: f64) -> Result<Complex64> {
    kernel.validate()?;
    check_time(t)?;
    let m = kernel.m;
    // d_{±,s}(0) = c(0) for every sign, and the NESS prefactor is half the
    // thermal one, so both reduce to the mean of the thermal amplitudes.
    let c0 = match kernel.kind {
        KernelKind::ThermalW { beta } => (2.0 * m).sqrt() * bose_at(beta, m),
        KernelKind::NessW { beta1, beta2 } => 0.5 * (2.0 * m).sqrt() * (bose_at(beta1, m) + bose_at(beta2, m)),
    };
    let gamma = 0.5 * PI.sqrt();
    let mut total = Complex64::new(0.0, 0.0);
    for s in [1.0f64, -1.0] {
        total += Complex64::from_polar(1.0, s * (m * t + 0.75 * PI));
    }
    Ok(total * c0 * gamma * t.powf(-1.5) / (4.0 * PI * PI))
}

/// Equal-time thermal kernel `W_β(0, r)` from the Matsubara image sum.
pub fn thermal_equal_time_images(m: f64, beta: f64, r: f64) -> Result<f64> {
    if !(m > 0.0) || !(beta > 0.0) || !beta.is_finite() || !(r >= 0.0) {
        return Err(Error::ConstraintViolation(format!("m > 0, 0 < beta < inf, r >= 0 (m = {m}, beta = {beta}, r = {r})")));
    }
    let mut sum = 0.0;
    for n in 1..1_000_000u64 {
        let rho = (r * r + (n as f64 * beta).powi(2)).sqrt();
        let term = m * bessel_k1(m * rho) / (2.0 * PI * PI * rho);
        sum += term;
        if term <= 1e-17 * sum || term == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { estimate: sum, error: f64::NAN, subdivisions: 1_000_000 })
}

/// Kernel value at `(t, offset)` along a scan direction.
pub fn scan_value(kernel: &ReducedKernel, direction: DecayDirection, sample: f64) -> Result<Complex64> {
    kernel.validate()?;
    let m = kernel.m;
    match direction {
        DecayDirection::Time => w_largetime(kernel, sample),
        DecayDirection::X1 { t } => {
            let x = [t, sample, 0.0, 0.0];
            let y = [0.0; 4];
            match kernel.kind {
                KernelKind::ThermalW { beta } => {
                    kms::w_kernel(&ThermalKernelSpec::new(ModelSpec::homogeneous(m), ThermoParams::beta(beta)), &x, &y)
                }
                KernelKind::NessW { beta1, beta2 } => ness::w_ness(&NessKernelSpec::homogeneous(m, beta1, beta2), &x, &y, 0.0),
            }
        }
        DecayDirection::X2 => {
            let r = sample.abs();
            let v = match kernel.kind {
                KernelKind::ThermalW { beta } => thermal_equal_time_images(m, beta, r)?,
                KernelKind::NessW { beta1, beta2 } => {
                    0.5 * (thermal_equal_time_images(m, beta1, r)? + thermal_equal_time_images(m, beta2, r)?)
                }
            };
            Ok(Complex64::new(v, 0.0))
        }
    }
}

/// Scanned magnitude at one sample: the envelope `|W₊| + |W₋|` in time,
/// `|W|` in space.
pub fn scan_magnitude(kernel: &ReducedKernel, direction: DecayDirection, sample: f64) -> Result<f64> {
    match direction {
        DecayDirection::Time => w_largetime_components(kernel, sample).map(|[a, b]| a.norm() + b.norm()),
        _ => scan_value(kernel, direction, sample).map(|v| v.norm()),
    }
}

/// `(sample, magnitude)` pairs along a scan direction, evaluated in parallel.
pub fn decay_samples(kernel: &ReducedKernel, direction: DecayDirection, samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    samples
        .par_iter()
        .map(|&x| scan_magnitude(kernel, direction, x).map(|v| (x, v)))
        .collect()
}

/// Power-law fit of `|W|` along a scan direction.
///
/// Time and `x¹` samples must span at least one decade. Transverse scans
/// probe exponential decay and only need positive samples.
pub fn decay_scan(kernel: &ReducedKernel, direction: DecayDirection, samples: &[f64]) -> Result<DecayReport> {
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if direction == DecayDirection::X2 { 1.0 } else { 10.0 * (1.0 - 1e-12) };
    if !(lo > 0.0) || !(hi >= span * lo) {
        return Err(Error::DegenerateFit(format!("samples must be positive and span at least one decade ({lo} .. {hi})")));
    }
    fit_power_law(&decay_samples(kernel, direction, samples)?)
}

/// Envelope of `t^{3/2}|Δ_{+,β}(t − iu, r)|` for one imaginary shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftEnvelope {
    pub u: f64,
    /// Maximum of `t^{3/2}|Δ₊|` over one oscillation half-period `π/m`.
    pub bound: f64,
}

/// Envelopes for `u ∈ {0, β/2, β}` at time `t` and the relative spread
/// `(max − min)/max` of the bounds.
///
/// The full Wightman function (vacuum included) is used. Asymptotically the
/// envelope is proportional to `b e^{mu} + (1+b) e^{−mu}`, so the spread is
/// `1 − sech(βm/2)`.
pub fn shift_uniformity(m: f64, beta: f64, r: f64, t: f64, n_phase: usize) -> Result<(Vec<ShiftEnvelope>, f64)> {
    let spec = ThermalKernelSpec::new(ModelSpec::homogeneous(m), ThermoParams::beta(beta));
    let n_phase = n_phase.max(4);
    let envelopes: Vec<ShiftEnvelope> = [0.0, 0.5 * beta, beta]
        .iter()
        .map(|&u| {
            let vals: Result<Vec<f64>> = (0..n_phase)
                .into_par_iter()
                .map(|k| {
                    let tk = t + PI / m * k as f64 / n_phase as f64;
                    let v = kms::delta_plus_thermal(&spec, &[tk, r, 0.0, 0.0], &[0.0; 4], u)?;
                    Ok(v.norm() * tk.powf(1.5))
                })
                .collect();
            vals.map(|v| ShiftEnvelope { u, bound: v.into_iter().fold(0.0, f64::max) })
        })
        .collect::<Result<_>>()?;
    let max = envelopes.iter().map(|e| e.bound).fold(0.0, f64::max);
    let min = envelopes.iter().map(|e| e.bound).fold(f64::INFINITY, f64::min);
    Ok((envelopes, (max - min) / max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn half_phase_matches_quadrature() {
        for &a in &[0.0, 1e-7, 0.3, 4.0, -7.5] {
            let n = 2000;
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let z = (k as f64 + 0.5) / n as f64;
                s += Complex64::from_polar(1.0, -a * z) / n as f64;
            }
            assert!((half_phase(a) - s).norm() < 1e-6, "a = {a}");
        }
    }

    #[test]
    fn thermal_reduction_matches_radial_kernel() {
        let spec = ThermalKernelSpec::new(ModelSpec::homogeneous(1.0), ThermoParams::beta(1.0));
        for &t in &[1.0, 5.0, 10.0] {
            for &r in &[0.0, 0.7] {
                let direct = kms::w_kernel(&spec, &[t, r, 0.0, 0.0], &[0.0; 4]).unwrap();
                let reduced = w_largetime(&ReducedKernel::thermal(1.0, 1.0, r), t).unwrap();
                assert!(rel(reduced, direct) < 1e-5, "t = {t}, r = {r}: {reduced} vs {direct}");
            }
        }
    }

    #[test]
    fn directed_reduction_matches_ness_kernel() {
        let spec = NessKernelSpec::homogeneous(1.0, 1.0, 2.0);
        for &(t, x1) in &[(3.0, 0.8), (8.0, -1.5)] {
            let direct = ness::w_ness(&spec, &[t, x1, 0.0, 0.0], &[0.0; 4], 0.0).unwrap();
            let reduced = w_largetime(&ReducedKernel::ness(1.0, 1.0, 2.0, x1), t).unwrap();
            assert!(rel(reduced, direct) < 1e-5, "t = {t}, x1 = {x1}: {reduced} vs {direct}");
        }
    }

    #[test]
    fn equal_betas_collapse_to_thermal() {
        for &t in &[2.0, 30.0] {
            let n = w_largetime(&ReducedKernel::ness(1.0, 1.5, 1.5, 0.9), t).unwrap();
            let th = w_largetime(&ReducedKernel::thermal(1.0, 1.5, 0.9), t).unwrap();
            assert!(rel(n, th) < 1e-8);
        }
    }

    #[test]
    fn image_sum_matches_radial_kernel() {
        let spec = ThermalKernelSpec::new(ModelSpec::homogeneous(1.0), ThermoParams::beta(1.3));
        for &r in &[0.0, 0.5, 3.0] {
            let direct = kms::w_kernel(&spec, &[0.0, r, 0.0, 0.0], &[0.0; 4]).unwrap();
            let images = thermal_equal_time_images(1.0, 1.3, r).unwrap();
            assert!((images - direct.re).abs() < 1e-7 * images, "r = {r}");
        }
    }

    #[test]
    fn leading_term_captures_amplitude() {
        let k = ReducedKernel::thermal(1.0, 1.0, 0.0);
        let errs: Vec<f64> = [50.0, 400.0]
            .iter()
            .map(|&t| rel(w_largetime(&k, t).unwrap(), leading_term(&k, t).unwrap()))
            .collect();
        assert!(errs[1] < 0.05 && errs[1] < 0.3 * errs[0], "{errs:?}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(w_largetime(&ReducedKernel::thermal(0.0, 1.0, 0.0), 1.0), Err(Error::ConstraintViolation(_))));
        assert!(matches!(w_largetime(&ReducedKernel::thermal(1.0, 1.0, 0.0), 0.0), Err(Error::ConstraintViolation(_))));
        let k = ReducedKernel::thermal(1.0, 1.0, 0.0);
        assert!(matches!(decay_scan(&k, DecayDirection::Time, &[1.0, 2.0, 3.0, 4.0, 5.0]), Err(Error::DegenerateFit(_))));
    }
}
