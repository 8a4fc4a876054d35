//! Thermal (KMS), vacuum and commutator kernels of the free field.
//!
//! For the homogeneous model the mode sum of the thermal Wightman function
//! reduces, after the angular integration, to a radial integral
//!
//! ```text
//! Δ₊(τ, r) = ∫₀^∞ dp K_d(p, r)/ω [ n₊ e^{iωT} + n₋ e^{−iωT} ],   T = τ − iu,
//! ```
//!
//! with `K₄ = p² sinc(pr)/(4π²)`, `K₃ = p J₀(pr)/(4π)`, `K₂ = cos(pr)/(2π)`
//! and the weights `n₊ = b(ω)`, `n₋ = 1 + b(ω)` of [`model::signed_bose`].
//! `u ∈ [0, β]` is the imaginary shift of the second argument, `y⁰ → y⁰ + iu`.
//!
//! The vacuum-subtracted kernel `W = Δ_β − Δ_∞` is computed with the
//! subtraction inside the integrand, so only Bose-weighted terms appear.
//! The `d = 4` vacuum kernel is computed by subtracting the massless
//! integrand analytically (`1/(4π²(r² − T²))`) and integrating the
//! remainder with oscillatory panels.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{bose, signed_bose, Beta, Family, ModelSpec, RegularityClass, ThermoParams};
use crate::quadrature::{self, gauss_legendre_on, Domain, QuadratureSpec};
use crate::special::{bessel_j0, sinc};

/// Spacetime point `(x⁰, x¹, x², x³)`.
pub type Event = [f64; 4];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A single KMS state of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalKernelSpec {
    pub model: ModelSpec,
    pub tp: ThermoParams,
}

impl ThermalKernelSpec {
    pub fn new(model: ModelSpec, tp: ThermoParams) -> Self {
        Self { model, tp }
    }
}

/// Time difference `x⁰ − y⁰` and spatial distance `|x − y|`.
pub fn separation(x: &Event, y: &Event) -> (f64, f64) {
    let r2 = (1..4).map(|i| (x[i] - y[i]).powi(2)).sum::<f64>();
    (x[0] - y[0], r2.sqrt())
}

/// Regularity class of a single KMS state `(d, m, μ)` (lower-dimensional
/// infrared conditions).
pub fn state_regularity(d: u32, m: f64, mu: f64) -> RegularityClass {
    let full = (m > 0.0 && m - mu > 0.0 && d >= 2) || (m > 0.0 && m - mu == 0.0 && d >= 3) || (m == 0.0 && mu == 0.0 && d >= 4);
    if full {
        RegularityClass::FullAlgebra
    } else {
        RegularityClass::DerivativeSubalgebraOnly
    }
}

fn check_spec(spec: &ThermalKernelSpec) -> Result<()> {
    spec.model.validate()?;
    if spec.model.family != Family::Homogeneous {
        return Err(Error::Unsupported("thermal kernels are implemented for the homogeneous family".into()));
    }
    if spec.tp.mu > spec.model.m {
        return Err(Error::ConstraintViolation(format!("mu <= m (mu = {}, m = {})", spec.tp.mu, spec.model.m)));
    }
    if state_regularity(spec.model.d, spec.model.m, spec.tp.mu) != RegularityClass::FullAlgebra {
        return Err(Error::RegularityViolation(format!(
            "the KMS state (d = {}, m = {}, mu = {}) is only defined on the derivative subalgebra",
            spec.model.d, spec.model.m, spec.tp.mu
        )));
    }
    Ok(())
}

/// Radial measure `K_d(p, r)` of the angular-integrated mode sum.
pub(crate) fn radial_measure(d: u32, p: f64, r: f64) -> f64 {
    match d {
        4 => p * p * sinc(p * r) / (4.0 * PI * PI),
        3 => p * bessel_j0(p * r) / (4.0 * PI),
        _ => (p * r).cos() / (2.0 * PI),
    }
}

/// `∫₀^∞ g(p) dp` for an integrand oscillating with angular frequency
/// `freq` in `p` and decaying at rate `damp`.
///
/// Slowly oscillating integrands use a mapped half-line; oscillatory ones use
/// half-period panels with Wynn acceleration.
pub(crate) fn half_line<F: Fn(f64) -> Complex64>(g: F, freq: f64, damp: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    if freq <= 0.5 * damp || freq < 1e-9 {
        if damp <= 0.0 {
            return Err(Error::NonConvergence { estimate: f64::NAN, error: f64::INFINITY, subdivisions: 0 });
        }
        let scale = (1.0 / damp).min(1e6);
        // Split off the first decay length so that the peak is resolved.
        let head = quadrature::integrate(&g, Domain::Interval(0.0, scale), spec)?;
        let tail = quadrature::integrate(&g, Domain::HalfLineUp { a: scale, scale }, spec)?;
        Ok(head.value + tail.value)
    } else {
        quadrature::integrate_oscillatory(&g, 0.0, 2.0 * PI / freq, spec).map(|q| q.value)
    }
}

/// Bose-weighted radial integral `∫ dp K_d/ω · b(ω) [e^{a₊ω} e^{iωτ} + e^{a₋ω} e^{−iωτ}]`.
fn bose_radial(d: u32, m: f64, tp: ThermoParams, tau: f64, r: f64, a_plus: f64, a_minus: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let beta = match tp.beta {
        Beta::Infinite => return Ok(Complex64::new(0.0, 0.0)),
        Beta::Finite(b) => b,
    };
    let g = |p: f64| {
        let w = (p * p + m * m).sqrt();
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let b = bose(tp, w);
        let k = radial_measure(d, p, r) / w;
        let ph = Complex64::from_polar(1.0, w * tau);
        let v = k * b * ((a_plus * w).exp() * ph + (a_minus * w).exp() * ph.conj());
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let damp = beta - a_plus.max(a_minus);
    half_line(g, r + tau.abs(), damp, spec)
}

/// Vacuum Wightman kernel `Δ_{+,∞}(τ − iu, r)`.
pub fn vacuum_radial(d: u32, m: f64, tau: f64, r: f64, u: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    if d != 4 {
        if u <= 0.0 {
            return Err(Error::Unsupported(format!("vacuum kernel in d = {d} requires an imaginary shift u > 0")));
        }
        let g = |p: f64| {
            let w = (p * p + m * m).sqrt();
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            radial_measure(d, p, r) / w * (-w * u).exp() * Complex64::from_polar(1.0, -w * tau)
        };
        return half_line(g, r + tau.abs(), u, spec);
    }
    let t = Complex64::new(tau, -u);
    let denom = r * r - t * t;
    if denom.norm() == 0.0 {
        return Err(Error::NonConvergence { estimate: f64::INFINITY, error: f64::INFINITY, subdivisions: 0 });
    }
    let lead = 1.0 / (4.0 * PI * PI * denom);
    if m == 0.0 {
        return Ok(lead);
    }
    // Remainder after subtracting the massless integrand, split into
    // single-frequency pieces e^{±ipr}.
    let rem = |p: f64| -> Complex64 {
        let w = (p * p + m * m).sqrt();
        let massive = Complex64::from_polar(1.0, -w * tau) * (-w * u).exp() * (p / w);
        let massless = Complex64::from_polar(1.0, -p * tau) * (-p * u).exp();
        massive - massless
    };
    let mut total = lead;
    if r > 0.0 {
        for sigma in [1.0f64, -1.0] {
            let g = |p: f64| rem(p) * Complex64::from_polar(1.0, sigma * p * r) * (sigma / (2.0 * r)) * (-I);
            let v = half_line(g, (sigma * r - tau).abs(), u, spec)?;
            total += v / (4.0 * PI * PI);
        }
    } else {
        // At r = 0 the remainder tends to −i m²T/2 · e^{−ipT}; subtract it
        // too (its integral is −m²/2) so that the rest decays like 1/p.
        let c = -I * (0.5 * m * m) * t;
        let g = |p: f64| rem(p) * p - c * (-I * p * t).exp();
        let v = half_line(g, tau.abs(), u, spec)?;
        total += (v - 0.5 * m * m) / (4.0 * PI * PI);
    }
    Ok(total)
}

/// Vacuum Wightman function `Δ_{+,∞}(x, y)` of the homogeneous model.
pub fn delta_plus_vacuum(model: &ModelSpec, x: &Event, y: &Event) -> Result<Complex64> {
    delta_plus_vacuum_shifted(model, x, y, 0.0)
}

/// Vacuum Wightman function with the second time argument shifted by `iu`.
pub fn delta_plus_vacuum_shifted(model: &ModelSpec, x: &Event, y: &Event, u: f64) -> Result<Complex64> {
    model.validate()?;
    if model.family != Family::Homogeneous {
        return Err(Error::Unsupported("vacuum kernels are implemented for the homogeneous family".into()));
    }
    if state_regularity(model.d, model.m, 0.0) != RegularityClass::FullAlgebra {
        return Err(Error::RegularityViolation(format!("the vacuum in d = {}, m = {} needs spatial derivatives", model.d, model.m)));
    }
    let (tau, r) = separation(x, y);
    vacuum_radial(model.d, model.m, tau, r, u, &QuadratureSpec::default())
}

/// Vacuum-subtracted kernel `W = Δ_{+,β,μ} − Δ_{+,∞}`, both at shift `u`.
pub fn w_kernel_shifted(spec: &ThermalKernelSpec, x: &Event, y: &Event, u: f64) -> Result<Complex64> {
    check_spec(spec)?;
    let (tau, r) = separation(x, y);
    w_radial(spec.model.d, spec.model.m, spec.tp, tau, r, u, &QuadratureSpec::default())
}

/// `W(τ − iu, r)` as a radial integral for one KMS state.
pub fn w_radial(d: u32, m: f64, tp: ThermoParams, tau: f64, r: f64, u: f64, qs: &QuadratureSpec) -> Result<Complex64> {
    let beta = match tp.beta {
        Beta::Infinite => return Ok(Complex64::new(0.0, 0.0)),
        Beta::Finite(b) => b,
    };
    if u < 0.0 || u > beta {
        return Err(Error::ConstraintViolation(format!("0 <= u <= beta (u = {u}, beta = {beta})")));
    }
    if u <= 0.5 * beta {
        bose_radial(d, m, tp, tau, r, u, -u, qs)
    } else {
        // b e^{ωu} = e^{βμ} (1 + b) e^{−(β−u)ω}: move the unit part into a
        // shifted vacuum kernel evaluated at −τ.
        let v = beta - u;
        let head = (beta * tp.mu).exp();
        let vac = vacuum_radial(d, m, -tau, r, v, qs)?;
        let plus = bose_radial(d, m, tp, tau, r, -v, f64::NEG_INFINITY, qs)?;
        let minus = bose_radial(d, m, tp, tau, r, f64::NEG_INFINITY, -u, qs)?;
        Ok(head * (vac + plus) + minus)
    }
}

/// `W_{β,μ}(x, y) = Δ_{+,β,μ}(x,y) − Δ_{+,∞}(x,y)` at real times.
pub fn w_kernel(spec: &ThermalKernelSpec, x: &Event, y: &Event) -> Result<Complex64> {
    w_kernel_shifted(spec, x, y, 0.0)
}

/// Thermal Wightman function `Δ_{+,β,μ}(x, y⁰ + iu, y)`.
pub fn delta_plus_thermal(spec: &ThermalKernelSpec, x: &Event, y: &Event, u: f64) -> Result<Complex64> {
    check_spec(spec)?;
    let (tau, r) = separation(x, y);
    let qs = QuadratureSpec::default();
    let w = w_radial(spec.model.d, spec.model.m, spec.tp, tau, r, u, &qs)?;
    let vac = vacuum_radial(spec.model.d, spec.model.m, tau, r, u, &qs)?;
    Ok(vac + w)
}

/// Commutator function `Δ₊(x,y) − Δ₊(y,x) = iΔ(x,y)` (state independent).
pub fn commutator(model: &ModelSpec, x: &Event, y: &Event) -> Result<Complex64> {
    model.validate()?;
    let (tau, r) = separation(x, y);
    if tau == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let qs = QuadratureSpec::default();
    let a = vacuum_radial(model.d, model.m, tau, r, 0.0, &qs)?;
    let b = vacuum_radial(model.d, model.m, -tau, r, 0.0, &qs)?;
    Ok(a - b)
}

/// `i∂_{x⁰}` of the commutator at equal times, smeared in `y` with a
/// normalised 3D Gaussian of width `w` centred at the origin, evaluated at `x`.
///
/// The mode integral gives `(1/2π²)∫ p² sinc(p|x|) e^{−p²w²/2} dp`, which
/// must equal the Gaussian itself (canonical commutation relations).
pub fn commutator_dt_smeared(x: [f64; 3], w: f64) -> Result<f64> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let g = |p: f64| p * p * sinc(p * r) * (-0.5 * p * p * w * w).exp() / (2.0 * PI * PI);
    quadrature::integrate_real(g, Domain::HalfLineUp { a: 0.0, scale: 1.0 / w }, &QuadratureSpec::with_tol(1e-10, 1e-15))
}

/// Maximal relative detailed-balance residual `|n₊ e^{β(ω−μ)} − n₋|/n₋`
/// over `n_frequencies` log-spaced modes with `β(ω−μ) ∈ [1e-3, 50]`.
pub fn kms_residual(spec: &ThermalKernelSpec, n_frequencies: usize) -> f64 {
    let beta = match spec.tp.beta {
        Beta::Infinite => return 0.0,
        Beta::Finite(b) => b,
    };
    detailed_balance_residual(n_frequencies, |x| {
        let w = spec.tp.mu + x / beta;
        (signed_bose(spec.tp, 1, w), signed_bose(spec.tp, -1, w), beta * (w - spec.tp.mu))
    })
}

/// Shared residual loop: `sample(x)` returns `(n₊, n₋, exponent)`.
pub(crate) fn detailed_balance_residual(n: usize, sample: impl Fn(f64) -> (f64, f64, f64)) -> f64 {
    let n = n.max(2);
    quadrature::logspace(1e-3, 50.0, n)
        .into_iter()
        .map(|x| {
            let (np, nm, e) = sample(x);
            ((np * e.exp() - nm) / nm).abs()
        })
        .fold(0.0, f64::max)
}

/// Coherent condensate amplitude `Ψ_c(x) = c e^{iμx⁰} Y₀(x¹)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensateSpec {
    pub c: Complex64,
    pub mu: f64,
    pub family: Family,
}

/// One-point function `Ψ_c(x) = c e^{iμx⁰} Y₀(x¹)` of a condensate.
pub fn condensate_onepoint(cs: &CondensateSpec, x: &Event) -> Complex64 {
    if cs.c == Complex64::new(0.0, 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    let y0 = crate::modes::zero_mode(cs.family, x[1]);
    cs.c * Complex64::from_polar(1.0, cs.mu * x[0]) * y0
}

/// Spacetime Gaussian wave packet
/// `f(x) = exp(−(x⁰−c⁰)²/2w_t² − |x−c|²/2w_x²) e^{i(k·x − k⁰x⁰)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub centre: Event,
    pub width_t: f64,
    pub width_x: f64,
    pub k: Event,
}

impl GaussianPacket {
    /// `F_s(p) = ∫d⁴y f(y) e^{−isωy⁰ + isp·y}` in closed form.
    pub fn fourier(&self, s: f64, w: f64, p: [f64; 3]) -> Complex64 {
        let k0 = self.k[0] + s * w;
        let mut phase = -k0 * self.centre[0];
        let mut q2 = 0.0;
        for i in 0..3 {
            let q = self.k[i + 1] + s * p[i];
            q2 += q * q;
            phase += q * self.centre[i + 1];
        }
        let norm = (2.0 * PI).powi(2) * self.width_t * self.width_x.powi(3);
        Complex64::from_polar(norm * (-0.5 * (self.width_t * k0).powi(2) - 0.5 * self.width_x.powi(2) * q2).exp(), phase)
    }
}

/// Sesquilinear form `Δ_{+,β,μ}(f̄_a, f_b)` for superpositions of Gaussian
/// packets `f_a = Σ cᵢ fᵢ` and `f_b`, evaluated in momentum space
/// by a composite tensor Gauss–Legendre rule.
pub fn smeared_two_point(m: f64, tp: ThermoParams, fa: &[(Complex64, GaussianPacket)], fb: &[(Complex64, GaussianPacket)]) -> Complex64 {
    // Bounding box of all packet momenta ±k with 9 widths of margin.
    let all: Vec<&GaussianPacket> = fa.iter().chain(fb.iter()).map(|(_, p)| p).collect();
    let wmin = all.iter().map(|p| p.width_x).fold(f64::INFINITY, f64::min);
    let kmax = all.iter().map(|p| p.k[1].abs().max(p.k[2].abs()).max(p.k[3].abs())).fold(0.0, f64::max);
    let half = kmax + 9.0 / wmin;
    let panels = ((2.0 * half * wmin / 1.5).ceil() as usize).max(4);
    let mut nodes = Vec::new();
    for j in 0..panels {
        let a = -half + 2.0 * half * j as f64 / panels as f64;
        let b = -half + 2.0 * half * (j + 1) as f64 / panels as f64;
        let (x, w) = gauss_legendre_on(12, a, b);
        nodes.extend(x.into_iter().zip(w));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for &(p1, w1) in &nodes {
        for &(p2, w2) in &nodes {
            for &(p3, w3) in &nodes {
                let p = [p1, p2, p3];
                let om = (p1 * p1 + p2 * p2 + p3 * p3 + m * m).sqrt();
                let wt = w1 * w2 * w3 / ((2.0 * PI).powi(3) * 2.0 * om);
                for s in [1.0, -1.0] {
                    let ns = signed_bose(tp, if s > 0.0 { 1 } else { -1 }, om);
                    if ns == 0.0 {
                        continue;
                    }
                    let fa_s: Complex64 = fa.iter().map(|(c, f)| c * f.fourier(s, om, p)).sum();
                    let fb_s: Complex64 = fb.iter().map(|(c, f)| c * f.fourier(s, om, p)).sum();
                    total += wt * ns * fa_s.conj() * fb_s;
                }
            }
        }
    }
    total
}

/// Thermal energy density kernel `(2π)⁻³∫d³p ω b(ω)` (per real scalar).
pub fn energy_density(m: f64, tp: ThermoParams) -> Result<f64> {
    moment_radial(m, tp, |p, w| p * p * w / (2.0 * PI * PI))
}

/// Coincident vacuum-subtracted kernel `W_{β,μ}(x,x) = (2π)⁻³∫d³p b(ω)/ω`
/// (the two frequency signs contribute `b/(2ω)` each).
pub fn wick_coincident(m: f64, tp: ThermoParams) -> Result<f64> {
    moment_radial(m, tp, |p, w| p * p / w / (2.0 * PI * PI))
}

/// `∫₀^∞ dp h(p, ω) b(ω)` for the isotropic moments above.
pub(crate) fn moment_radial(m: f64, tp: ThermoParams, h: impl Fn(f64, f64) -> f64) -> Result<f64> {
    let beta = match tp.beta {
        Beta::Infinite => return Ok(0.0),
        Beta::Finite(b) => b,
    };
    let g = |p: f64| {
        let w = (p * p + m * m).sqrt();
        let v = h(p, w) * bose(tp, w);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let qs = QuadratureSpec::with_tol(1e-11, 1e-300);
    let scale = 1.0 / beta;
    let head = quadrature::integrate_real(&g, Domain::Interval(0.0, scale), &qs)?;
    let tail = quadrature::integrate_real(&g, Domain::HalfLineUp { a: scale, scale }, &qs)?;
    Ok(head + tail)
}
