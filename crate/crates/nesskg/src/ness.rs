//! Asymptotic non-equilibrium steady state (NESS) of the two-reservoir quench.
//!
//! In the homogeneous model the NESS is thermal at `(β₁, μ₁)` for modes
//! moving to the right (`p₁ > 0`, fed by the left reservoir) and at
//! `(β₂, μ₂)` for left movers:
//!
//! ```text
//! W_N(x, y) = (2π)⁻³ ∫d³p/(2ω) b_{β(p₁),μ(p₁)}(ω) [e^{iωT − ip·r} + e^{−iωT + ip·r}],
//! ```
//!
//! `T = x⁰ − y⁰ − iu`, `r = x − y`. The transverse integral and the polar
//! angle are done analytically or by Gauss–Legendre, leaving one radial
//! quadrature. The phase-shift model differs from the homogeneous one only
//! by the transmission phases of the modes. The δ-potential NESS uses the
//! `A`/`B` coefficient structure, in which the bridge state `(β₃, μ₃)`
//! survives the large-time limit.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kms::{self, half_line, separation, Event};
use crate::model::{bose, signed_bose, Beta, Family, ModelSpec, ThermoParams};
use crate::modes::{delta_coeffs, heaviside, mode_eval, sign_step};
use crate::quadrature::{self, gauss_legendre_cached, Domain, QuadratureSpec};
use crate::special::bessel_j0;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Parameters of the NESS two-point function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NessKernelSpec {
    pub model: ModelSpec,
    /// Left reservoir `(β₁, μ₁)`: right movers.
    pub left: ThermoParams,
    /// Right reservoir `(β₂, μ₂)`: left movers.
    pub right: ThermoParams,
    /// Bridge state `(β₃, μ₃)`; only the δ-potential NESS depends on it.
    pub bridge: ThermoParams,
}

impl NessKernelSpec {
    pub fn new(model: ModelSpec, left: ThermoParams, right: ThermoParams, bridge: ThermoParams) -> Self {
        Self { model, left, right, bridge }
    }

    /// Homogeneous complex field, `d = 4`, `μ = 0`, vacuum bridge.
    pub fn homogeneous(m: f64, beta1: f64, beta2: f64) -> Self {
        Self::new(ModelSpec::homogeneous(m), ThermoParams::beta(beta1), ThermoParams::beta(beta2), ThermoParams::vacuum())
    }

    /// Direction-dependent parameters `(β(p₁), μ(p₁))` with `Θ(0) = 1/2`.
    pub fn tp_of(&self, p1: f64) -> ThermoParams {
        if p1 > 0.0 {
            self.left
        } else if p1 < 0.0 {
            self.right
        } else {
            let beta = match (self.left.beta, self.right.beta) {
                (Beta::Finite(a), Beta::Finite(b)) => Beta::Finite(0.5 * (a + b)),
                _ => Beta::Infinite,
            };
            ThermoParams::new(beta, 0.5 * (self.left.mu + self.right.mu))
        }
    }

    fn min_beta(&self) -> Option<f64> {
        match (self.left.beta.finite(), self.right.beta.finite()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => None,
        }
    }

    fn check(&self, u: f64) -> Result<()> {
        self.model.validate()?;
        if self.model.d != 4 {
            return Err(Error::Unsupported("NESS kernels are implemented for d = 4".into()));
        }
        for (name, tp) in [("mu1", self.left), ("mu2", self.right)] {
            if tp.mu > self.model.m {
                return Err(Error::ConstraintViolation(format!("{name} <= m ({name} = {}, m = {})", tp.mu, self.model.m)));
            }
            if kms::state_regularity(self.model.d, self.model.m, tp.mu) != crate::RegularityClass::FullAlgebra {
                return Err(Error::RegularityViolation(format!("{name} = {} requires spatial derivatives", tp.mu)));
            }
        }
        if u < 0.0 {
            return Err(Error::ConstraintViolation(format!("u >= 0 (u = {u})")));
        }
        if let Some(b) = self.min_beta() {
            if u > b {
                return Err(Error::ConstraintViolation(format!("u <= min(beta1, beta2) (u = {u}, min beta = {b})")));
            }
        }
        Ok(())
    }
}

/// `∫₀¹ dz J₀(pρ√(1−z²)) e^{iapz}`: polar-angle integral over one half space.
fn half_angle(p: f64, rho: f64, a: f64) -> Complex64 {
    let x = a * p;
    if rho == 0.0 {
        if x.abs() < 1e-6 {
            return Complex64::new(1.0 - x * x / 6.0, 0.5 * x);
        }
        return (Complex64::from_polar(1.0, x) - 1.0) / (I * x);
    }
    let n = 24 + (0.7 * p * (rho + a.abs())).ceil() as usize;
    let (nodes, weights) = gauss_legendre_cached(n);
    let mut s = Complex64::new(0.0, 0.0);
    for (&t, &w) in nodes.iter().zip(weights) {
        let z = 0.5 * (t + 1.0);
        s += w * bessel_j0(p * rho * (1.0 - z * z).max(0.0).sqrt()) * Complex64::from_polar(1.0, x * z);
    }
    0.5 * s
}

/// Bose-weighted homogeneous pieces `(W₊, W₋)` carrying `e^{+iωT}` and
/// `e^{−iωT}` respectively.
pub(crate) fn homogeneous_pieces(
    m: f64,
    left: ThermoParams,
    right: ThermoParams,
    tau: f64,
    r1: f64,
    rho: f64,
    u: f64,
    qs: &QuadratureSpec,
) -> Result<(Complex64, Complex64)> {
    let betas: Vec<f64> = [left.beta, right.beta].iter().filter_map(|b| b.finite()).collect();
    if betas.is_empty() {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    let bmin = betas.iter().cloned().fold(f64::INFINITY, f64::min);
    let pref = 1.0 / (4.0 * PI * PI);
    let piece = |sign: f64| -> Result<Complex64> {
        let g = |p: f64| {
            let w = (p * p + m * m).sqrt();
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let b1 = bose(left, w);
            let b2 = bose(right, w);
            // e^{isωT}: the p₁ > 0 half space carries e^{−isp₁r₁}.
            let a_right = half_angle(p, rho, -sign * r1);
            let a_left = half_angle(p, rho, sign * r1);
            let t = (Complex64::new(0.0, sign) * w * Complex64::new(tau, -u)).exp();
            let v = pref * p * p / (2.0 * w) * t * (b1 * a_right + b2 * a_left);
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let damp = if sign > 0.0 { bmin - u } else { bmin + u };
        half_line(g, r1.abs() + rho + tau.abs(), damp, qs)
    };
    Ok((piece(1.0)?, piece(-1.0)?))
}

/// Phase factor `Θ(−x) + Θ(x)e^{iδ}` of the phase-shift modes.
fn transmission(delta: f64, x1: f64) -> Complex64 {
    Complex64::new(heaviside(-x1), 0.0) + Complex64::from_polar(heaviside(x1), delta)
}

/// Bose-weighted part `W_N(x, y⁰ + iu, y)` of the NESS two-point function.
pub fn w_ness(spec: &NessKernelSpec, x: &Event, y: &Event, u: f64) -> Result<Complex64> {
    spec.check(u)?;
    let qs = QuadratureSpec::default();
    let tau = x[0] - y[0];
    let r1 = x[1] - y[1];
    let rho = ((x[2] - y[2]).powi(2) + (x[3] - y[3]).powi(2)).sqrt();
    match spec.model.family {
        Family::Homogeneous => {
            let (wp, wm) = homogeneous_pieces(spec.model.m, spec.left, spec.right, tau, r1, rho, u, &qs)?;
            Ok(wp + wm)
        }
        Family::PhaseShift { delta } => {
            let (wp, wm) = homogeneous_pieces(spec.model.m, spec.left, spec.right, tau, r1, rho, u, &qs)?;
            let (px, py) = (transmission(delta, x[1]), transmission(delta, y[1]));
            Ok(px.conj() * py * wp + px * py.conj() * wm)
        }
        Family::DeltaPotential { g } => delta_kernel(spec, g, x, y, u, false),
    }
}

/// NESS two-point function `Δ_{+,N}(x, y⁰ + iu, y)`.
///
/// For the δ-potential family the β-independent part is only available for
/// `u > 0`, where it is damped by `e^{−ωu}`.
pub fn delta_plus_ness(spec: &NessKernelSpec, x: &Event, y: &Event, u: f64) -> Result<Complex64> {
    spec.check(u)?;
    let qs = QuadratureSpec::default();
    match spec.model.family {
        Family::Homogeneous => {
            let (tau, r) = separation(x, y);
            Ok(kms::vacuum_radial(4, spec.model.m, tau, r, u, &qs)? + w_ness(spec, x, y, u)?)
        }
        Family::PhaseShift { delta } => {
            let (tau, r) = separation(x, y);
            let vac = kms::vacuum_radial(4, spec.model.m, tau, r, u, &qs)?;
            let (px, py) = (transmission(delta, x[1]), transmission(delta, y[1]));
            Ok(px * py.conj() * vac + w_ness(spec, x, y, u)?)
        }
        Family::DeltaPotential { g } => {
            if u <= 0.0 {
                return Err(Error::Unsupported("the delta-potential NESS vacuum part requires u > 0".into()));
            }
            delta_kernel(spec, g, x, y, u, true)
        }
    }
}

/// Reduced coefficients `(A, B)` of the δ-potential NESS for given signs.
///
/// Uses `â = √(2π) a_p` etc., so that `Â → Θ(s₁s₃p₁)Θ(s₁s₂p₁)` and `B̂ → 0`
/// as `g → 0`.
pub fn delta_ab(g: f64, p1: f64, s1: f64, s2: f64, s3: f64) -> (Complex64, Complex64) {
    let c = delta_coeffs(g, p1);
    let n = (2.0 * PI).sqrt();
    let (a, b, d) = (n * c.a, n * c.b, n * c.d);
    let eps = sign_step(p1);
    let th = |x: f64| heaviside(x);
    let f = |sj: f64| Complex64::new(a * a * th(s1 * sj * p1) + b * b * th(-s1 * sj * p1) + 0.25 * d * d, 0.5 * s1 * b * d * eps);
    let big_a = f(s3) * f(s2) - (0.5 * a * d).powi(2);
    let big_b = Complex64::new(0.0, 0.5 * s1 * a * d * eps)
        * Complex64::new(a * a * (th(s1 * s2 * p1) - th(-s1 * s3 * p1)) + b * b * (th(-s1 * s2 * p1) - th(s1 * s3 * p1)), 0.5 * s1 * b * d * eps);
    (big_a, big_b)
}

/// δ-potential NESS kernel: Bose part, plus the β-independent part if `full`.
fn delta_kernel(spec: &NessKernelSpec, g: f64, x: &Event, y: &Event, u: f64, full: bool) -> Result<Complex64> {
    let m = spec.model.m;
    let tau = x[0] - y[0];
    let rho = ((x[2] - y[2]).powi(2) + (x[3] - y[3]).powi(2)).sqrt();
    // Reservoir index of b_{s₂,s₃}: (+,+) → left, (−,−) → right, mixed → bridge.
    let tps = [spec.left, spec.right, spec.bridge];
    let index = |s2: f64, s3: f64| -> usize {
        if s2 > 0.0 && s3 > 0.0 {
            0
        } else if s2 < 0.0 && s3 < 0.0 {
            1
        } else {
            2
        }
    };
    // Coefficients M[s₁][k] multiplying b_k(ω) e^{is₁ωT}.
    let coeffs = |p1: f64| -> [[Complex64; 4]; 2] {
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 2];
        for (i1, &s1) in [1.0f64, -1.0].iter().enumerate() {
            let sgn = if s1 > 0.0 { 1 } else { -1 };
            let (yx, yy) = (mode_eval(spec.model.family, p1, x[1], sgn), mode_eval(spec.model.family, p1, y[1], sgn));
            for &s2 in &[1.0, -1.0] {
                for &s3 in &[1.0, -1.0] {
                    let (a, b) = delta_ab(g, p1, s1, s2, s3);
                    let v = a * yx.conj() * yy + b * yx * yy;
                    out[i1][index(s2, s3)] += v;
                    out[i1][3] += v;
                }
            }
        }
        let _ = g;
        out
    };
    let bmin = spec.min_beta();
    let pref = 1.0 / (2.0 * PI);
    let inner = |p1: f64| -> Result<Complex64> {
        let c = coeffs(p1);
        let f = |pp: f64| {
            let w = (p1 * p1 + pp * pp + m * m).sqrt();
            let mut acc = Complex64::new(0.0, 0.0);
            for (i1, &s1) in [1.0f64, -1.0].iter().enumerate() {
                let ph = (Complex64::new(0.0, s1) * w * Complex64::new(tau, -u)).exp();
                let mut wsum = Complex64::new(0.0, 0.0);
                for k in 0..3 {
                    let b = bose(tps[k], w);
                    if b != 0.0 && b.is_finite() {
                        wsum += b * c[i1][k];
                    }
                }
                if full && s1 < 0.0 {
                    wsum += c[i1][3];
                }
                acc += ph * wsum;
            }
            let v = pref * pp * bessel_j0(pp * rho) / (2.0 * w) * acc;
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let damp = match bmin {
            Some(b) if full => u.min(b - u),
            Some(b) => b - u,
            None => u,
        };
        half_line(f, rho + tau.abs(), damp, &QuadratureSpec::with_tol(1e-10, 1e-14))
    };
    let failure = std::cell::RefCell::new(None);
    let outer = |p1: f64| match inner(p1) {
        Ok(v) => v,
        Err(e) => {
            *failure.borrow_mut() = Some(e);
            Complex64::new(0.0, 0.0)
        }
    };
    let scale = bmin.map(|b| 1.0 / (b - u).max(1e-3)).unwrap_or(1.0 / u.max(1e-3));
    let qs = QuadratureSpec::with_tol(1e-9, 1e-13);
    let pos = quadrature::integrate(&outer, Domain::HalfLineUp { a: 0.0, scale }, &qs)?;
    let neg = quadrature::integrate(&outer, Domain::HalfLineDown { b: 0.0, scale }, &qs)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(pos.value + neg.value)
}

/// Observables of the stress tensor and the Wick square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    /// `ρ = T₀₀`.
    EnergyDensity,
    /// `j₁ = T₀₁`, the energy flux towards `+x¹`.
    HeatCurrent,
    /// `:|Φ|²:`.
    WickSquare,
}

/// Real-scalar kernel of a NESS observable, by direct half-space quadrature.
///
/// `ρ`: `(2π)⁻³∫d³p ω b_{β(p₁)}`; `j₁`: `(2π)⁻³∫d³p p₁ b_{β(p₁)}`;
/// Wick square: `(2π)⁻³∫d³p b_{β(p₁)}/ω`.
pub fn ness_observable_kernel(spec: &NessKernelSpec, obs: ObservableKind) -> Result<f64> {
    spec.check(0.0)?;
    if spec.model.family != Family::Homogeneous {
        return Err(Error::Unsupported("NESS observables are implemented for the homogeneous family".into()));
    }
    let m = spec.model.m;
    // Polar coordinates around the x¹ axis: p₁ = p z, z ∈ [−1, 1].
    let angular = |tp: ThermoParams, sign: f64| -> Result<f64> {
        let h = |p: f64| -> f64 {
            let w = (p * p + m * m).sqrt();
            let b = bose(tp, w);
            if !b.is_finite() {
                return 0.0;
            }
            // ∫ dz over the half space z ∈ [0, 1] (sign = +1) or [−1, 0].
            let (weight, zint) = match obs {
                ObservableKind::EnergyDensity => (w, 1.0),
                ObservableKind::HeatCurrent => (p, sign * 0.5),
                ObservableKind::WickSquare => (1.0 / w, 1.0),
            };
            2.0 * PI * p * p * weight * b * zint / (2.0 * PI).powi(3)
        };
        let beta = match tp.beta {
            Beta::Infinite => return Ok(0.0),
            Beta::Finite(b) => b,
        };
        let qs = QuadratureSpec::with_tol(1e-12, 1e-300);
        let head = quadrature::integrate_real(&h, Domain::Interval(0.0, 1.0 / beta), &qs)?;
        let tail = quadrature::integrate_real(&h, Domain::HalfLineUp { a: 1.0 / beta, scale: 1.0 / beta }, &qs)?;
        Ok(head + tail)
    };
    Ok(angular(spec.left, 1.0)? + angular(spec.right, -1.0)?)
}

/// Physical NESS observable (`observable_factor ×` the real-scalar kernel).
pub fn ness_observable(spec: &NessKernelSpec, obs: ObservableKind) -> Result<f64> {
    Ok(spec.model.field_kind.observable_factor() * ness_observable_kernel(spec, obs)?)
}

/// Thermal real-scalar kernel of an observable for one KMS state.
pub fn thermal_observable_kernel(m: f64, tp: ThermoParams, obs: ObservableKind) -> Result<f64> {
    match obs {
        ObservableKind::EnergyDensity => kms::energy_density(m, tp),
        ObservableKind::HeatCurrent => Ok(0.0),
        ObservableKind::WickSquare => kms::wick_coincident(m, tp),
    }
}

/// Maximal per-mode detailed-balance residual
/// `|n₊ e^{β'(ω−μ')} − n₋|/n₋`, where the weights `n_±` come from
/// `weights(p₁)` and the test temperature `(β', μ')` from `test(p₁)`.
pub fn modewise_residual_with(
    m: f64,
    weights: impl Fn(f64) -> ThermoParams,
    test: impl Fn(f64) -> ThermoParams,
    n_samples: usize,
) -> f64 {
    let mut worst: f64 = 0.0;
    for &p1 in &[-3.0, -1.0, -0.2, 0.2, 1.0, 3.0] {
        let tw = weights(p1);
        let tt = test(p1);
        let (Some(beta_t), Some(beta_w)) = (tt.beta.finite(), tw.beta.finite()) else {
            continue;
        };
        let r = kms::detailed_balance_residual(n_samples, |x| {
            // Energies with β_w(ω − μ_w) = x, restricted to the mass shell.
            let w = (tw.mu + x / beta_w).max(m.max(p1.abs()) * (1.0 + 1e-12));
            (signed_bose(tw, 1, w), signed_bose(tw, -1, w), beta_t * (w - tt.mu))
        });
        worst = worst.max(r);
    }
    worst
}

/// Modewise KMS residual of the NESS: every mode is in detailed balance
/// at its direction-dependent temperature `β(p₁)`.
pub fn modewise_kms_residual(spec: &NessKernelSpec) -> Result<f64> {
    if !(spec.model.m > 0.0) {
        return Err(Error::ConstraintViolation("modewise KMS requires m > 0".into()));
    }
    Ok(modewise_residual_with(spec.model.m, |p1| spec.tp_of(p1), |p1| spec.tp_of(p1), 200))
}

/// Spread `max |Δ_N(β₃ᵢ) − Δ_N(β₃ⱼ)|` of the NESS two-point function at a
/// probe pair over a list of bridge temperatures.
///
/// Only the Bose-weighted part can depend on `β₃`, so the spread is
/// computed from [`w_ness`]; the β-independent part cancels identically.
pub fn beta3_sensitivity(spec: &NessKernelSpec, x: &Event, y: &Event, beta3: &[Beta]) -> Result<f64> {
    let values: Vec<Result<Complex64>> = beta3
        .par_iter()
        .map(|&b3| {
            let s = NessKernelSpec { bridge: ThermoParams::new(b3, spec.bridge.mu), ..*spec };
            w_ness(&s, x, y, 0.0)
        })
        .collect();
    let values: Vec<Complex64> = values.into_iter().collect::<Result<_>>()?;
    let mut spread: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            spread = spread.max((values[i] - values[j]).norm());
        }
    }
    Ok(spread)
}

/// Large-time condensate of the NESS, `Ψ_N(x⁰) = ((c₁+c₂)/2) e^{iμx⁰} Y₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensateLimit {
    pub amplitude: Complex64,
    pub mu: f64,
}

impl CondensateLimit {
    /// `Ψ_N(x)` for the given family's zero mode.
    pub fn eval(&self, family: Family, x: &Event) -> Complex64 {
        kms::condensate_onepoint(&kms::CondensateSpec { c: self.amplitude, mu: self.mu, family }, x)
    }
}

/// Condensate of the NESS from the reservoirs' condensates.
pub fn condensate_limit(r: &crate::ReservoirTriple, model: &ModelSpec) -> Result<CondensateLimit> {
    crate::model::validate_reservoirs(model, r)?;
    if r.left.tp.mu != r.right.tp.mu {
        return Err(Error::ConstraintViolation(format!("mu1 = mu2 for a condensate limit (mu1 = {}, mu2 = {})", r.left.tp.mu, r.right.tp.mu)));
    }
    Ok(CondensateLimit { amplitude: 0.5 * (r.left.c + r.right.c), mu: r.left.tp.mu })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: f64, x: f64, y: f64, z: f64) -> Event {
        [t, x, y, z]
    }

    #[test]
    fn equal_betas_reduce_to_thermal() {
        let spec = NessKernelSpec::homogeneous(1.0, 1.3, 1.3);
        let th = kms::ThermalKernelSpec::new(ModelSpec::homogeneous(1.0), ThermoParams::beta(1.3));
        for (x, y) in [(ev(0.3, 0.5, 0.0, 0.0), ev(0.0, -0.2, 0.0, 0.0)), (ev(1.0, 0.2, 0.7, 0.1), ev(0.0, 0.0, 0.0, 0.0))] {
            let a = delta_plus_ness(&spec, &x, &y, 0.0).unwrap();
            let b = kms::delta_plus_thermal(&th, &x, &y, 0.0).unwrap();
            assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn coincident_is_mean() {
        let spec = NessKernelSpec::homogeneous(1.0, 1.0, 2.0);
        let x = ev(0.0, 0.4, 0.0, 0.0);
        let w = w_ness(&spec, &x, &x, 0.0).unwrap();
        let mean = 0.5 * (kms::wick_coincident(1.0, ThermoParams::beta(1.0)).unwrap() + kms::wick_coincident(1.0, ThermoParams::beta(2.0)).unwrap());
        assert!((w.re - mean).abs() < 1e-9 * mean && w.im.abs() < 1e-12);
    }

    #[test]
    fn massless_heat_current() {
        let spec = NessKernelSpec::homogeneous(0.0, 1.0, 2.0);
        let j = ness_observable_kernel(&spec, ObservableKind::HeatCurrent).unwrap();
        let exact = PI * PI / 120.0 * (1.0 - 1.0 / 16.0);
        assert!((j - exact).abs() < 1e-9 * exact);
        assert!((ness_observable(&spec, ObservableKind::HeatCurrent).unwrap() - 2.0 * exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn hermitian_and_symmetric() {
        let spec = NessKernelSpec::homogeneous(1.0, 1.0, 2.0);
        let x = ev(0.7, 0.3, 0.2, 0.0);
        let y = ev(0.0, -0.5, 0.0, 0.4);
        let a = w_ness(&spec, &x, &y, 0.0).unwrap();
        let b = w_ness(&spec, &y, &x, 0.0).unwrap();
        assert!((a - b.conj()).norm() < 1e-9, "{a} {b}");
    }

    #[test]
    fn delta_coefficients_small_coupling() {
        for &(s1, s2, s3) in &[(1.0, 1.0, 1.0), (1.0, -1.0, 1.0), (-1.0, -1.0, -1.0)] {
            let (a, b) = delta_ab(1e-10, 0.7, s1, s2, s3);
            let e = heaviside(s1 * s3 * 0.7) * heaviside(s1 * s2 * 0.7);
            assert!((a - e).norm() < 1e-9 && b.norm() < 1e-9);
        }
    }

    #[test]
    fn condensate_amplitudes() {
        let model = ModelSpec::homogeneous(1.0);
        let tp = ThermoParams::new(Beta::Finite(1.0), 1.0);
        let c = Complex64::new(0.3, 0.1);
        let r = crate::ReservoirTriple { left: crate::Reservoir::with_condensate(tp, c), right: crate::Reservoir::with_condensate(tp, c), bridge: ThermoParams::new(Beta::Infinite, 0.0) };
        assert_eq!(condensate_limit(&r, &model).unwrap().amplitude, c);
        let r2 = crate::ReservoirTriple { right: crate::Reservoir::with_condensate(tp, -c), ..r };
        assert_eq!(condensate_limit(&r2, &model).unwrap().amplitude, Complex64::new(0.0, 0.0));
    }
}
