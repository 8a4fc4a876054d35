//! The glued initial state: transition profiles `χ₁ + χ₂ = 1`, the temporal
//! switch `ψ`, the σ-maps on the condensate mode, the equal-time glued Wick
//! square and a positivity diagnostic of the glued two-point function.
//!
//! The spatial profiles are step functions convolved with a normalised
//! Gaussian `G_a`: `χ₂(x¹) = Φ(x¹/a)`, `χ₁ = 1 − χ₂`. With `ψ = Θ` the map
//! `σ_i` multiplies the Cauchy data `(φ, ∂₀φ)` of a solution at `x⁰ = 0` by
//! `χ_i(x¹)`, and the glued two-point function is
//! `Δ_{+,G} = Σ_{ij} (σ_i⊗σ_j) Δ_{+,β_ij,μ_ij}` with `β₁₁ = β₁`, `β₂₂ = β₂`
//! and the bridge state `β₁₂ = β₂₁ = β₃`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::kms::{self, GaussianPacket};
use crate::model::{signed_bose, validate_reservoirs, ModelSpec, RegularityClass, ReservoirTriple, ThermoParams};
use crate::quadrature::{self, gauss_legendre_on, Domain, QuadratureSpec};
use crate::special::normal_cdf;

/// Temporal switch `ψ` of the σ-maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiKind {
    /// Sharp switch `ψ = Θ(x⁰)`.
    Heaviside,
    /// Smooth ramp `ψ(x⁰) = Φ(x⁰/ε)` (normal CDF), `ε > 0`.
    SmoothRamp { eps: f64 },
}

/// Spatial transition width and temporal switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSpec {
    /// Width `a` of the Gaussian `∂₁χ₂ = G_a`.
    pub a: f64,
    pub psi: PsiKind,
}

impl ProfileSpec {
    /// Gaussian width `a` with the sharp switch `ψ = Θ`.
    pub fn new(a: f64) -> Result<Self> {
        Self::with_psi(a, PsiKind::Heaviside)
    }

    pub fn with_psi(a: f64, psi: PsiKind) -> Result<Self> {
        let p = Self { a, psi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::ConstraintViolation(format!("profile width a > 0 (got {})", self.a)));
        }
        if let PsiKind::SmoothRamp { eps } = self.psi {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(Error::ConstraintViolation(format!("ramp width eps > 0 (got {eps})")));
            }
        }
        Ok(())
    }

    /// `ν̃(λ) = e^{−a²λ²/2}/√(2π)`: unitary Fourier transform of `G_a`.
    pub fn nu_tilde(&self, lambda: f64) -> f64 {
        (-0.5 * (self.a * lambda).powi(2)).exp() / (2.0 * PI).sqrt()
    }

    /// Unitary Fourier transform of `∂₀ψ`: `1/√(2π)` for `Θ`,
    /// `e^{−ε²w²/2}/√(2π)` for the smooth ramp.
    pub fn dpsi_tilde(&self, w: f64) -> f64 {
        let damp = match self.psi {
            PsiKind::Heaviside => 1.0,
            PsiKind::SmoothRamp { eps } => (-0.5 * (eps * w).powi(2)).exp(),
        };
        damp / (2.0 * PI).sqrt()
    }
}

/// Which profile function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileComponent {
    Chi1,
    Chi2,
    Psi,
    DPsi,
}

/// Reservoir side `i ∈ {1, 2}` (left, right).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Sign `s₂` of the pole prescription `(λ − i s₂ ε)⁻¹` in `χ̃_i`:
    /// `+1` for `χ₁`, `−1` for `χ₂`.
    pub fn pole_sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

/// `χ₁`, `χ₂` at `x¹` or `ψ`, `∂₀ψ` at `x⁰` (`Θ(0) = 1/2`; `∂₀Θ` is reported
/// as 0 away from the origin and `∞` at it).
pub fn profile_eval(p: &ProfileSpec, which: ProfileComponent, coordinate: f64) -> f64 {
    match which {
        ProfileComponent::Chi2 => normal_cdf(coordinate / p.a),
        ProfileComponent::Chi1 => normal_cdf(-coordinate / p.a),
        ProfileComponent::Psi => match p.psi {
            PsiKind::Heaviside => crate::modes::heaviside(coordinate),
            PsiKind::SmoothRamp { eps } => normal_cdf(coordinate / eps),
        },
        ProfileComponent::DPsi => match p.psi {
            PsiKind::Heaviside => {
                if coordinate == 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            PsiKind::SmoothRamp { eps } => crate::special::gaussian(coordinate, eps),
        },
    }
}

/// `χ_i(x¹)` for a side.
pub fn chi(p: &ProfileSpec, side: Side, x1: f64) -> f64 {
    match side {
        Side::Left => profile_eval(p, ProfileComponent::Chi1, x1),
        Side::Right => profile_eval(p, ProfileComponent::Chi2, x1),
    }
}

/// Model, reservoirs and profile of a glued state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GluedStateSpec {
    pub model: ModelSpec,
    pub reservoirs: ReservoirTriple,
    pub profile: ProfileSpec,
}

impl GluedStateSpec {
    /// Validates the reservoirs (ordering constraints) and the profile.
    pub fn new(model: ModelSpec, reservoirs: ReservoirTriple, profile: ProfileSpec) -> Result<Self> {
        validate_reservoirs(&model, &reservoirs)?;
        profile.validate()?;
        Ok(Self { model, reservoirs, profile })
    }

    /// State of the `(i, j)` block: reservoirs on the diagonal, bridge off it.
    pub fn block(&self, i: Side, j: Side) -> ThermoParams {
        match (i, j) {
            (Side::Left, Side::Left) => self.reservoirs.left.tp,
            (Side::Right, Side::Right) => self.reservoirs.right.tp,
            _ => self.reservoirs.bridge,
        }
    }
}

/// Pole integral `∫dρ e^{iaρ|…|}/(ρ − i s₂ ε)` evaluated numerically at finite `ε`.
///
/// Symmetrising `ρ → −ρ` gives `2 i s₂ ε ∫₀^∞ e^{i a ρ}/(ρ² + ε²) dρ`, which
/// tends to `s₂ π i` for every real `a` as `ε → 0` (the error is
/// `O(ε log ε)`). The Lorentzian core is resolved with geometric breakpoints
/// and the tail with half-period panels.
pub fn pole_integral(a: f64, eps: f64, s2: f64) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::ConstraintViolation(format!("eps > 0 (got {eps})")));
    }
    let qs = QuadratureSpec::with_tol(1e-12, 1e-300);
    let f = |r: f64| Complex64::from_polar(1.0, a * r) / (r * r + eps * eps);
    let mut breaks = vec![0.0];
    let mut b = eps;
    while b < 1.0 {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(1.0);
    let head = quadrature::adaptive_from(&f, &breaks, &qs)?.value;
    let tail = if a == 0.0 {
        // ∫₁^∞ dρ/(ρ²+ε²) in closed form.
        Complex64::new((PI / 2.0 - (1.0 / eps).atan()) / eps, 0.0)
    } else {
        quadrature::integrate_oscillatory(&f, 1.0, 2.0 * PI / a.abs(), &QuadratureSpec { tail_cut: 1e-16, ..qs })?.value
    };
    Ok(Complex64::new(0.0, 2.0 * s2 * eps) * (head + tail))
}

/// `e^{−iμt}[σ_i f](x⁰ + t, x¹)` for the condensate mode `f = e^{iμx⁰}` of
/// the homogeneous model (normalised so that `√(2π) Y₀ = 1`).
///
/// Evaluates the one-dimensional λ-representation
/// `e^{iμx⁰} Σ_{s₁} −i s₁ s₂ ∫dλ ν̃(λ)/(λ − i s₂ε) · (s₁ω_λ+μ) ∂ψ̃(s₁ω_λ−μ)/(2ω_λ)
/// · e^{i(s₁ω_λ−μ)(x⁰+t)} e^{−iλx¹}` with the pole taken as principal
/// value plus `i s₂ π δ(λ)`. The principal value is folded onto `λ > 0`
/// (`[T(λ) − T(−λ)]/λ`, a smooth integrand) and integrated adaptively with
/// breakpoints every half-period of the phase.
pub fn sigma_condensate(model: &ModelSpec, profile: &ProfileSpec, side: Side, mu: f64, x0: f64, x1: f64, t: f64) -> Result<Complex64> {
    model.validate()?;
    let m = model.m;
    if model.family != crate::model::Family::Homogeneous {
        return Err(Error::Unsupported("sigma_condensate is implemented for the homogeneous family".into()));
    }
    let massless_ok = m == 0.0 && mu == 0.0;
    if !(m > 0.0 && (mu == m || mu == -m)) && !massless_ok {
        return Err(Error::ConstraintViolation(format!("condensate mode requires mu = +-m (mu = {mu}, m = {m})")));
    }
    let s2 = side.pole_sign();
    let time = x0 + t;
    let term = |s1: f64, lambda: f64| -> Complex64 {
        let w = (lambda * lambda + m * m).sqrt();
        // (s₁ω + μ)/(2ω), with the massless limit s₁/2 at λ = 0.
        let ratio = if w > 0.0 { (s1 * w + mu) / (2.0 * w) } else { 0.5 * s1 };
        let amp = profile.nu_tilde(lambda) * ratio * profile.dpsi_tilde(s1 * w - mu);
        amp * Complex64::from_polar(1.0, (s1 * w - mu) * time - lambda * x1)
    };
    let lam_max = 9.0 / profile.a;
    let qs = QuadratureSpec::with_tol(1e-11, 1e-14);
    let mut total = Complex64::new(0.0, 0.0);
    for s1 in [1.0, -1.0] {
        let odd = |l: f64| (term(s1, l) - term(s1, -l)) / l;
        // Breakpoints every half-period of the accumulated phase.
        let mut breaks = vec![0.0];
        let mut l = 0.0;
        while l < lam_max {
            let w = (l * l + m * m).sqrt();
            let rate = if w > 0.0 { l / w } else { 1.0 } * time.abs() + x1.abs() + 1.0;
            l = (l + (PI / rate).min(lam_max / 16.0)).min(lam_max);
            breaks.push(l);
        }
        let pv = quadrature::adaptive_from(&odd, &breaks, &qs)?.value;
        let residue = Complex64::new(0.0, s2 * PI) * term(s1, 0.0);
        total += Complex64::new(0.0, -s1 * s2) * (pv + residue);
    }
    Ok(total * Complex64::from_polar(1.0, mu * x0))
}

/// `|e^{−iμt}[σ_i f](x⁰+t, x¹) − ½ e^{iμx⁰}|` over `times`, fitted to a power law.
pub fn sigma_condensate_decay(
    model: &ModelSpec,
    profile: &ProfileSpec,
    side: Side,
    mu: f64,
    x0: f64,
    x1: f64,
    times: &[f64],
) -> Result<(Vec<(f64, f64)>, quadrature::DecayReport)> {
    let half = 0.5 * Complex64::from_polar(1.0, mu * x0);
    let samples: Result<Vec<(f64, f64)>> = times
        .par_iter()
        .map(|&t| sigma_condensate(model, profile, side, mu, x0, x1, t).map(|v| (t, (v - half).norm())))
        .collect();
    let samples = samples?;
    let report = quadrature::fit_power_law(&samples)?;
    Ok((samples, report))
}

/// Equal-time Wick square `ω_G(:|Φ|²:(0, x))` of the glued state with `ψ = Θ`:
/// `χ₁²(2w₁+|c₁|²) + χ₂²(2w₂+|c₂|²) + 2χ₁χ₂(2w₃ + Re(c̄₁c₂))` with
/// `w_k = W_{β_k,μ_k}(x,x)`.
pub fn wick_square_glued_equal_time(g: &GluedStateSpec, x1: f64) -> Result<f64> {
    if g.profile.psi != PsiKind::Heaviside {
        return Err(Error::Unsupported("the equal-time glued Wick square is defined for psi = Heaviside".into()));
    }
    let (m, d) = (g.model.m, g.model.d);
    let r = &g.reservoirs;
    let w = |tp: ThermoParams| -> Result<f64> {
        if kms::state_regularity(d, m, tp.mu) != RegularityClass::FullAlgebra {
            return Err(Error::RegularityViolation(format!(
                "the coincident Wick square needs the full algebra (d = {d}, m = {m}, mu = {})",
                tp.mu
            )));
        }
        kms::wick_coincident(m, tp)
    };
    let (w1, w2, w3) = (w(r.left.tp)?, w(r.right.tp)?, w(r.bridge)?);
    let c1 = chi(&g.profile, Side::Left, x1);
    let c2 = chi(&g.profile, Side::Right, x1);
    let (k1, k2) = (r.left.c, r.right.c);
    Ok(c1 * c1 * (2.0 * w1 + k1.norm_sqr()) + c2 * c2 * (2.0 * w2 + k2.norm_sqr()) + 2.0 * c1 * c2 * (2.0 * w3 + (k1.conj() * k2).re))
}

/// Gram matrix `G_ab = Δ_{+,G}(f̄_a, f_b)` of the glued state (`ψ = Θ`) on
/// Gaussian packets.
///
/// Each packet defines the solution `E f_a` with mode amplitudes
/// `c_s(p) = s F_s(p)` ([`GaussianPacket::fourier`]). For every transverse
/// wave vector the Cauchy data of that solution are synthesised on a
/// periodic `x¹` grid that contains the data with a wide margin, multiplied
/// by `χ_i`, and decomposed back into amplitudes `c^{(i)}_s`. The thermal
/// weights then act mode by mode:
/// `G_ab = ∫d³k/((2π)³2ω) Σ_s Σ_{ij} n_s^{(ij)}(ω) conj(c^{(i)}_{a,s}) c^{(j)}_{b,s}`.
/// The transverse integral uses a composite Gauss–Legendre rule.
pub fn glued_gram(g: &GluedStateSpec, packets: &[GaussianPacket]) -> Result<DMatrix<Complex64>> {
    if g.profile.psi != PsiKind::Heaviside {
        return Err(Error::Unsupported("the glued Gram matrix is built for psi = Heaviside".into()));
    }
    if g.model.d != 4 || g.model.family != crate::model::Family::Homogeneous {
        return Err(Error::Unsupported("the glued Gram matrix is implemented for the homogeneous d = 4 model".into()));
    }
    let n_pk = packets.len();
    if n_pk == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let m = g.model.m;
    let a = g.profile.a;
    let wmin = packets.iter().map(|p| p.width_x.min(p.width_t)).fold(f64::INFINITY, f64::min);
    let wx_min = packets.iter().map(|p| p.width_x).fold(f64::INFINITY, f64::min);

    // x¹ box: holds every packet's Cauchy data (support spreads with |c⁰|).
    let reach = packets
        .iter()
        .map(|p| p.centre[1].abs() + p.centre[0].abs() + 10.0 * (p.width_x + p.width_t))
        .fold(0.0, f64::max);
    let half_len = reach + 12.0 * a;
    let len = 2.0 * half_len;
    let k1_max = packets.iter().map(|p| p.k[1].abs()).fold(0.0, f64::max) + 12.0 / wmin.min(a) + 12.0 / wx_min;
    let mut n = 64usize;
    while (PI * n as f64 / len) < k1_max {
        n *= 2;
    }
    let dx = len / n as f64;
    let k_of = |idx: usize| -> f64 {
        let j = if idx < n / 2 { idx as f64 } else { idx as f64 - n as f64 };
        2.0 * PI * j / len
    };
    let chis: [Vec<f64>; 2] = [
        (0..n).map(|j| chi(&g.profile, Side::Left, -half_len + j as f64 * dx)).collect(),
        (0..n).map(|j| chi(&g.profile, Side::Right, -half_len + j as f64 * dx)).collect(),
    ];
    let mut planner = FftPlanner::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(n);
    let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(n);

    // Transverse nodes (spatial wave vector k∥) covering both ±k∥ of every packet.
    let kt_max = packets.iter().map(|p| p.k[2].abs().max(p.k[3].abs())).fold(0.0, f64::max) + 9.0 / wx_min;
    let panels = ((2.0 * kt_max * wx_min / 2.0).ceil() as usize).max(4);
    let mut nodes = Vec::new();
    for j in 0..panels {
        let lo = -kt_max + 2.0 * kt_max * j as f64 / panels as f64;
        let hi = -kt_max + 2.0 * kt_max * (j + 1) as f64 / panels as f64;
        let (x, w) = gauss_legendre_on(12, lo, hi);
        nodes.extend(x.into_iter().zip(w));
    }
    let pairs: Vec<(f64, f64, f64)> =
        nodes.iter().flat_map(|&(k2, w2)| nodes.iter().map(move |&(k3, w3)| (k2, k3, w2 * w3))).collect();

    let blocks = [
        [g.block(Side::Left, Side::Left), g.block(Side::Left, Side::Right)],
        [g.block(Side::Right, Side::Left), g.block(Side::Right, Side::Right)],
    ];
    let sign_of = |idx: usize| if idx % 2 == 0 { 1.0 } else { -1.0 };

    let partials: Vec<Vec<Complex64>> = pairs
        .par_iter()
        .map(|&(k2, k3, wt)| {
            // amps[side][s_index][packet][mode]
            let mut amps = vec![vec![vec![vec![Complex64::new(0.0, 0.0); n]; n_pk]; 2]; 2];
            let mut phi = vec![Complex64::new(0.0, 0.0); n];
            let mut pi_ = vec![Complex64::new(0.0, 0.0); n];
            for (ip, pk) in packets.iter().enumerate() {
                // Spatial Fourier data at wave vector k: s = +1 at p = k, s = −1 at p = −k.
                for idx in 0..n {
                    let k1 = k_of(idx);
                    let om = (k1 * k1 + k2 * k2 + k3 * k3 + m * m).sqrt();
                    let cp = pk.fourier(1.0, om, [k1, k2, k3]);
                    let cm = -pk.fourier(-1.0, om, [-k1, -k2, -k3]);
                    let sgn = sign_of(idx);
                    phi[idx] = (cp + cm) / (2.0 * om) * sgn;
                    pi_[idx] = Complex64::new(0.0, 0.5) * (cp - cm) * sgn;
                }
                fwd.process(&mut phi);
                fwd.process(&mut pi_);
                for side in 0..2 {
                    let mut f0: Vec<Complex64> = phi.iter().zip(&chis[side]).map(|(v, c)| v * *c).collect();
                    let mut f1: Vec<Complex64> = pi_.iter().zip(&chis[side]).map(|(v, c)| v * *c).collect();
                    inv.process(&mut f0);
                    inv.process(&mut f1);
                    for idx in 0..n {
                        let k1 = k_of(idx);
                        let om = (k1 * k1 + k2 * k2 + k3 * k3 + m * m).sqrt();
                        let scale = sign_of(idx) / n as f64;
                        let ph = f0[idx] * scale;
                        let pp = f1[idx] * scale;
                        amps[side][0][ip][idx] = om * ph - Complex64::new(0.0, 1.0) * pp;
                        amps[side][1][ip][idx] = om * ph + Complex64::new(0.0, 1.0) * pp;
                    }
                }
            }
            let mut gram = vec![Complex64::new(0.0, 0.0); n_pk * n_pk];
            for idx in 0..n {
                let k1 = k_of(idx);
                let om = (k1 * k1 + k2 * k2 + k3 * k3 + m * m).sqrt();
                let base = wt / (len * (2.0 * PI).powi(2) * 2.0 * om);
                for (si, s) in [1i8, -1].into_iter().enumerate() {
                    for i in 0..2 {
                        for j in 0..2 {
                            let ns = signed_bose(blocks[i][j], s, om);
                            if ns == 0.0 {
                                continue;
                            }
                            let f = base * ns;
                            for a_ in 0..n_pk {
                                let ca = amps[i][si][a_][idx].conj() * f;
                                for b_ in 0..n_pk {
                                    gram[a_ * n_pk + b_] += ca * amps[j][si][b_][idx];
                                }
                            }
                        }
                    }
                }
            }
            gram
        })
        .collect();
    let mut out = DMatrix::zeros(n_pk, n_pk);
    for part in partials {
        for a_ in 0..n_pk {
            for b_ in 0..n_pk {
                out[(a_, b_)] += part[a_ * n_pk + b_];
            }
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of the Hermitian part of [`glued_gram`]; non-negative
/// (up to quadrature error) for every admissible glued state.
pub fn positivity_gram(g: &GluedStateSpec, packets: &[GaussianPacket]) -> Result<f64> {
    let gram = glued_gram(g, packets)?;
    Ok(min_hermitian_eigenvalue(&gram))
}

/// Smallest eigenvalue of `(G + G†)/2`.
pub fn min_hermitian_eigenvalue(gram: &DMatrix<Complex64>) -> f64 {
    if gram.nrows() == 0 {
        return f64::INFINITY;
    }
    let herm = (gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Integral of `∂₁χ₂ = G_a` over the real line (a quadrature self-check; 1).
pub fn profile_derivative_mass(p: &ProfileSpec) -> Result<f64> {
    let a = p.a;
    quadrature::integrate_real(
        |x| crate::special::gaussian(x, a),
        Domain::RealLine { centre: 0.0, scale: a },
        &QuadratureSpec::with_tol(1e-13, 1e-15),
    )
}
