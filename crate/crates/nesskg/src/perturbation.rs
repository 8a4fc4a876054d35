//! First-order perturbative objects of the interacting steady state:
//! split propagators, their emergence from σ-maps, the renormalised fish
//! terms, the first-order tadpole and spectral-amplitude decay.
//!
//! # Split propagators
//!
//! The split propagator keeps only the modes travelling in one direction,
//!
//! ```text
//! Δ^{(s)}_β(τ − iu, r) = (2π)⁻³ ∫_{s p₁ > 0} d³p/(2ω)
//!     [b e^{ωu} e^{iωτ} e^{−ip·r} + (1 + b) e^{−ωu} e^{−iωτ} e^{ip·r}],
//! ```
//!
//! so that the steady state decomposes as `Δ_{+,N} = Δ^{(+1)}_{β₁} + Δ^{(−1)}_{β₂}`
//! (right-movers come from the left reservoir). Expanding the Bose weights in
//! images, `b e^{ωu} = Σ_{n≥1} e^{−ω(nβ−u)}`, and doing the transverse
//! integral with `∫P dP J₀(Pρ) e^{−ζω}/ω = e^{−MR}/R`, `M = √(k² + m²)`,
//! `R = √(ρ² + ζ²)`, leaves one longitudinal integral:
//!
//! ```text
//! Δ^{(s)} = (8π²)⁻¹ ∫₀^∞ dk [ Σ_{n≥1} e^{−iskr₁} E(nβ − u − iτ) + Σ_{n≥0} e^{iskr₁} E(nβ + u + iτ) ],
//! E(ζ) = e^{−MR(ζ)}/R(ζ).
//! ```
//!
//! At timelike separations the image terms are purely oscillatory in `k`
//! when `u ∈ {0, β}`; the contour is then rotated off the real axis into the
//! half plane where `e^{−MR}` decays (no singularity is crossed for rotation
//! angles below `π/2`, the branch points sit at `±im`).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{BoxEvolution, BoxOptions, ProbePair};
use crate::gluing::GluedStateSpec;
use crate::kms::{self, Event};
use crate::model::{Beta, ReservoirTriple, ThermoParams};
use crate::quadrature::{self, DecayReport, Domain, QuadratureSpec};

/// One directed half of the thermal Wightman function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPropagator {
    /// `+1`: right-movers (`p₁ > 0`); `−1`: left-movers.
    pub s: i8,
    pub beta: Beta,
    pub m: f64,
}

impl SplitPropagator {
    pub fn new(s: i8, beta: Beta, m: f64) -> Result<Self> {
        if s != 1 && s != -1 {
            return Err(Error::ConstraintViolation(format!("split direction must be ±1, got {s}")));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::ConstraintViolation(format!("split propagators need m > 0, got {m}")));
        }
        if let Beta::Finite(b) = beta {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::ConstraintViolation(format!("β must be positive, got {b}")));
            }
        }
        Ok(Self { s, beta, m })
    }
}

/// Contour rotation angle used at (near-)timelike separations.
const ROTATION: f64 = PI / 4.0;

/// One family of image terms sharing the longitudinal phase `e^{iσ k r₁}`.
struct ImageGroup {
    /// `(R_n, 1/R_n)` for each image.
    radii: Vec<(Complex64, Complex64)>,
    sigma: f64,
}

/// `R = √(ρ² + ζ²)` on the branch continuous from real `ζ > 0`; the real
/// and imaginary parts of `ζ²` are formed separately so that a signed zero
/// imaginary part (u = 0 with τ < 0) selects the correct side of the cut.
fn image_radius(rho: f64, c: f64, tau: f64) -> Complex64 {
    Complex64::new(rho * rho + c * c - tau * tau, 2.0 * c * tau).sqrt()
}

fn image_group(m: f64, beta: Option<f64>, rho: f64, offsets: impl Fn(usize) -> Option<f64>, tau: f64, sigma: f64) -> ImageGroup {
    let mut radii = Vec::new();
    let mut n = 0usize;
    while let Some(c) = offsets(n) {
        let r = image_radius(rho, c, tau);
        radii.push((r, r.inv()));
        // e^{−m Re R} bounds every k-slice of the term; stop once it is negligible
        // against the leading image.
        let lead = radii[0].0.re;
        if beta.is_none() || m * (r.re - lead) > 45.0 || n > 200_000 {
            break;
        }
        n += 1;
    }
    ImageGroup { radii, sigma }
}

impl ImageGroup {
    /// `∫₀^∞ dk e^{iσkr₁} Σ_n e^{−MR_n}/R_n` along the real axis or a rotated ray.
    fn integrate(&self, m: f64, r1: f64, qs: &QuadratureSpec) -> Result<Complex64> {
        if self.radii.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let a_min = self.radii.iter().map(|r| r.0.re).fold(f64::INFINITY, f64::min);
        let b_max = self.radii.iter().map(|r| r.0.im.abs()).fold(0.0, f64::max);
        if self.radii.iter().any(|r| r.0.norm() < 1e-12) {
            return Err(Error::Unsupported("split propagator at coincident points".into()));
        }
        let real_freq = r1.abs() + b_max;
        let sum_terms = |k: Complex64| -> Complex64 {
            let mm = (k * k + m * m).sqrt();
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &(r, ri)) in self.radii.iter().enumerate() {
                let term = (-mm * r).exp() * ri;
                acc += term;
                if i > 0 && term.norm() < 1e-18 * acc.norm() {
                    break;
                }
            }
            acc * (Complex64::i() * self.sigma * k * r1).exp()
        };
        // Direction of rotation: towards the half plane where e^{−MR} decays.
        let b_sign = self.radii[0].0.im.signum();
        let rotated_rate = self
            .radii
            .iter()
            .map(|r| r.0.re * ROTATION.cos() + r.0.im.abs() * ROTATION.sin() - self.sigma * b_sign * r1 * ROTATION.sin())
            .fold(f64::INFINITY, f64::min);
        let use_real = a_min >= 0.1 * real_freq.max(1e-300) || (rotated_rate <= 0.0 && a_min > 0.0);
        if use_real {
            return kms::half_line(|k| sum_terms(Complex64::new(k, 0.0)), real_freq, a_min, qs);
        }
        if rotated_rate <= 1e-12 {
            return Err(Error::Unsupported("split propagator on the light cone".into()));
        }
        let dir = Complex64::from_polar(1.0, -b_sign * ROTATION);
        let freq = (b_max + r1.abs()) * ROTATION.cos();
        kms::half_line(|kappa| dir * sum_terms(dir * kappa), freq, rotated_rate, qs)
    }
}

fn split_groups(sp: &SplitPropagator, tau: f64, r1: f64, rho: f64, u: f64, include_vacuum: bool) -> Result<Complex64> {
    let beta = sp.beta.finite();
    if u < 0.0 || beta.is_some_and(|b| u > b) || (beta.is_none() && u != 0.0 && !include_vacuum) {
        return Err(Error::ConstraintViolation(format!("imaginary shift u = {u} outside [0, β]")));
    }
    let s = sp.s as f64;
    let qs = QuadratureSpec::with_tol(1e-12, 1e-16);
    let first = if include_vacuum { 0 } else { 1 };
    let vac = image_group(
        sp.m,
        beta,
        rho,
        |n| match beta {
            Some(b) => Some((n + first) as f64 * b + u),
            None if first == 0 && n == 0 => Some(u),
            None => None,
        },
        tau,
        s,
    );
    let bose = image_group(sp.m, beta, rho, |n| beta.map(|b| (n + 1) as f64 * b - u), -tau, -s);
    let v = if beta.is_none() && !include_vacuum { Complex64::new(0.0, 0.0) } else { vac.integrate(sp.m, r1, &qs)? };
    let w = if beta.is_some() { bose.integrate(sp.m, r1, &qs)? } else { Complex64::new(0.0, 0.0) };
    Ok((v + w) / (8.0 * PI * PI))
}

fn split_args(sep: &Event) -> (f64, f64, f64) {
    (sep[0], sep[1], sep[2].hypot(sep[3]))
}

/// `Δ^{(s)}_β(x − y)` with the second argument shifted to `y⁰ + iu`,
/// `u ∈ [0, β]`; `sep = x − y`.
pub fn split_prop(sp: &SplitPropagator, sep: &Event, u: f64) -> Result<Complex64> {
    let (tau, r1, rho) = split_args(sep);
    split_groups(sp, tau, r1, rho, u, true)
}

/// Bose-weighted part of [`split_prop`] (the vacuum half removed).
pub fn split_prop_w(sp: &SplitPropagator, sep: &Event, u: f64) -> Result<Complex64> {
    let (tau, r1, rho) = split_args(sep);
    if sp.beta.is_infinite() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    split_groups(sp, tau, r1, rho, u, false)
}

/// Which pair of points is compared with the split propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitGeometry {
    /// Both points at time `t`: `σ_sΔ((t, x¹), (t + iu, y¹))` against `Δ^{(s)}(0 − iu, x¹ − y¹)`.
    EqualTime,
    /// Source fixed at time 0: `σ_sΔ((t, x¹), (iu, y¹))` against `Δ^{(s)}(t − iu, x¹ − y¹)`.
    FixedSource,
}

/// Samples and fit of `|σ_sΔ_{+,β} − Δ^{(s)}_{+,β}|` against time.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitConvergence {
    pub samples: Vec<(f64, f64)>,
    pub report: DecayReport,
}

/// How the σ_s-applied thermal propagator approaches the split propagator.
///
/// The σ-map acts on the Cauchy data of the first argument, which are then
/// evolved exactly on a periodic box; the split propagator is evaluated on
/// the same box momenta so that the discretisation cancels in the
/// difference. Only the profile and the model of `g` are used; all three
/// reservoirs are replaced by the single inverse temperature `beta`.
#[allow(clippy::too_many_arguments)]
pub fn split_convergence_fit(
    g: &GluedStateSpec,
    s: i8,
    beta: f64,
    probe: ProbePair,
    times: &[f64],
    u: f64,
    geometry: SplitGeometry,
    opts: &BoxOptions,
) -> Result<SplitConvergence> {
    if s != 1 && s != -1 {
        return Err(Error::ConstraintViolation(format!("split direction must be ±1, got {s}")));
    }
    if !(0.0..=beta).contains(&u) {
        return Err(Error::ConstraintViolation(format!("imaginary shift u = {u} outside [0, β]")));
    }
    let single = ReservoirTriple::betas(Beta::Finite(beta), Beta::Finite(beta), Beta::Finite(beta));
    let glued = GluedStateSpec::new(g.model, single, g.profile)?;
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    let engine = BoxEvolution::new(&glued, probe, &BoxOptions { t_max: opts.t_max.max(t_max), ..*opts })?;
    let r1 = probe.x1 - probe.y1;
    let equal_time_split = engine.split_on_box(s, beta, u, 0.0, r1);
    let samples: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| {
            let (t_y, reference) = match geometry {
                SplitGeometry::EqualTime => (t, equal_time_split),
                SplitGeometry::FixedSource => (0.0, engine.split_on_box(s, beta, u, t, r1)),
            };
            (t, (engine.sigma_thermal(s, beta, u, t, probe.x1, t_y, probe.y1) - reference).norm())
        })
        .collect();
    let report = quadrature::fit_power_law(&samples)?;
    Ok(SplitConvergence { samples, report })
}

/// The three fish-function terms at one momentum configuration.
///
/// `f₊ = (i/(2π)⁵)·½/((p⁰ + ω₁ − ω₂) ω₂)`, `f₋ = (i/(2π)⁵)·½/((p⁰ + ω₁ − ω₂) ω₁)`,
/// `f_r = (i/(2π)⁵)/(4ω₁³)` with `ω₁ = ω_q`, `ω₂ = ω_{p−q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FishTerms {
    pub f_plus: Complex64,
    pub f_minus: Complex64,
    pub f_r: Complex64,
    /// Renormalisation constant; it shifts the momentum integral of the
    /// combination once and is not part of the integrand.
    pub renorm: f64,
}

fn fish_prefactor() -> Complex64 {
    Complex64::new(0.0, (2.0 * PI).powi(-5))
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Raw fish terms at `(p⁰, p, q)`; `f_±` are infinite on the removable
/// manifold `p⁰ + ω_q − ω_{p−q} = 0`.
pub fn fish_terms(p0: f64, p: [f64; 3], q: [f64; 3], m: f64) -> FishTerms {
    let w1 = crate::model::dispersion(q, m);
    let w2 = crate::model::dispersion(sub3(p, q), m);
    let c = fish_prefactor();
    let d = p0 + w1 - w2;
    FishTerms { f_plus: c * 0.5 / (d * w2), f_minus: c * 0.5 / (d * w1), f_r: c / (4.0 * w1.powi(3)), renorm: 0.0 }
}

impl FishTerms {
    /// `f₊/(p⁰ − Σ) + f₋/(p⁰ + Σ) + f_r`, `Σ = ω_q + ω_{p−q}`.
    pub fn combined(&self, p0: f64, sigma: f64) -> Complex64 {
        self.f_plus / (p0 - sigma) + self.f_minus / (p0 + sigma) + self.f_r
    }
}

/// Relative offset of the symmetric limit on the removable manifold.
pub const FISH_LIMIT_OFFSET: f64 = 1e-4;

/// Combined fish integrand with removable points resolved by the average of
/// `p⁰ ± h`, `h = h_rel · (ω_q + ω_{p−q})`.
pub fn fish_combined_with(p0: f64, p: [f64; 3], q: [f64; 3], m: f64, h_rel: f64) -> Complex64 {
    let sigma = crate::model::dispersion(q, m) + crate::model::dispersion(sub3(p, q), m);
    let w1 = crate::model::dispersion(q, m);
    let w2 = crate::model::dispersion(sub3(p, q), m);
    let h = h_rel * sigma;
    if (p0 + w1 - w2).abs() < h {
        let at = |x: f64| fish_terms(x, p, q, m).combined(x, sigma);
        0.5 * (at(p0 + h) + at(p0 - h))
    } else {
        fish_terms(p0, p, q, m).combined(p0, sigma)
    }
}

/// [`fish_combined_with`] at the default offset [`FISH_LIMIT_OFFSET`].
pub fn fish_combined(p0: f64, p: [f64; 3], q: [f64; 3], m: f64) -> Complex64 {
    fish_combined_with(p0, p, q, m, FISH_LIMIT_OFFSET)
}

/// Integrand of the constant `C₂` at `(p⁰, p) = (0, 0)`:
/// `Σ_s f_s/(−s·2ω_q) + f_r` in the symmetric limit.
pub fn c2_integrand(q: [f64; 3], m: f64) -> Complex64 {
    fish_combined(0.0, [0.0; 3], q, m)
}

fn bose_of(beta: f64, w: f64) -> f64 {
    crate::model::bose(ThermoParams::beta(beta), w)
}

/// Longitudinal direction cosines for the first-order tadpole: Gauss–Legendre
/// nodes on `[−1, 0]` and `[0, 1]`, so the Bose factor is smooth on each.
fn split_cosines() -> Vec<(f64, f64)> {
    let mut nodes = quadrature::gauss_legendre_on(16, -1.0, 0.0);
    let upper = quadrature::gauss_legendre_on(16, 0.0, 1.0);
    nodes.0.extend(upper.0);
    nodes.1.extend(upper.1);
    nodes.0.into_iter().zip(nodes.1).collect()
}

fn check_tadpole_args(beta1: f64, beta2: f64, m: f64) -> Result<()> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::ConstraintViolation(format!("tadpole needs m > 0, got {m}")));
    }
    for b in [beta1, beta2] {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::ConstraintViolation(format!("tadpole needs finite β > 0, got {b}")));
        }
    }
    Ok(())
}

/// Steady part of the first-order tadpole per unit coupling,
///
/// `T = −(2π)⁻³ ∫d³p Σ_s [s b_{β(−sp₁)}(ω)/ω²] · 1/(−2sω)`,
///
/// evaluated term by term as written (the overall `−iC (2π)³ ψ̂(0)`
/// removed). Here `β(p₁) = β₁` for `p₁ > 0`. The reduction
/// `T = (2π)⁻³∫d³p (b_{β₁} + b_{β₂})/(2ω³)` is not used.
pub fn tadpole_first_order(beta1: f64, beta2: f64, m: f64) -> Result<f64> {
    check_tadpole_args(beta1, beta2, m)?;
    let cosines = split_cosines();
    let beta_of = |p1: f64| if p1 > 0.0 { beta1 } else { beta2 };
    let radial = |p: f64| {
        let w = (p * p + m * m).sqrt();
        let mut acc = 0.0;
        for &(z, wz) in &cosines {
            for s in [1.0f64, -1.0] {
                let b = bose_of(beta_of(-s * p * z), w);
                acc -= wz * (s * b / (w * w)) / (-2.0 * s * w);
            }
        }
        2.0 * PI * p * p * acc
    };
    let qs = QuadratureSpec::with_tol(1e-12, 1e-18);
    let scale = 1.0 / beta1.max(beta2).recip().max(m);
    let v = quadrature::integrate_real(radial, Domain::HalfLineUp { a: 0.0, scale }, &qs)?;
    Ok(v / (2.0 * PI).powi(3))
}

/// The two candidate secular (`∝ x⁰`) contributions, `s₆ = −s₂`, of the
/// first-order tadpole: `(2π)⁻³∫d³p s₆ b_{β(−s₂p₁)}/ω²` for `s₂ = ±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularTerms {
    pub s2_plus: f64,
    pub s2_minus: f64,
}

impl SecularTerms {
    pub fn sum(&self) -> f64 {
        self.s2_plus + self.s2_minus
    }
}

/// Both secular candidates evaluated separately; they cancel under `p₁ → −p₁`.
pub fn secular_terms(beta1: f64, beta2: f64, m: f64) -> Result<SecularTerms> {
    check_tadpole_args(beta1, beta2, m)?;
    let cosines = split_cosines();
    let beta_of = |p1: f64| if p1 > 0.0 { beta1 } else { beta2 };
    let qs = QuadratureSpec::with_tol(1e-12, 1e-18);
    let scale = 1.0 / beta1.max(beta2).recip().max(m);
    let term = |s2: f64| {
        let radial = |p: f64| {
            let w = (p * p + m * m).sqrt();
            let acc: f64 = cosines.iter().map(|&(z, wz)| wz * (-s2) * bose_of(beta_of(-s2 * p * z), w) / (w * w)).sum();
            2.0 * PI * p * p * acc
        };
        quadrature::integrate_real(radial, Domain::HalfLineUp { a: 0.0, scale }, &qs).map(|v| v / (2.0 * PI).powi(3))
    };
    Ok(SecularTerms { s2_plus: term(1.0)?, s2_minus: term(-1.0)? })
}

/// Spectral amplitude with `n` external legs sharing one spatial point,
/// switched on sharply at `z⁰ = 0`, with a truncated Gaussian vertex cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralAmplitudeSpec {
    /// Number of external legs, 2 or 4.
    pub n: usize,
    pub beta: f64,
    /// Direction of every leg.
    pub s: i8,
    pub m: f64,
    /// Width of the Gaussian cutoff `h(z) = e^{−|z|²/(2w²)}`.
    pub h_width: f64,
    /// Radius beyond which `h` vanishes.
    pub h_radius: f64,
    /// Spatial position of the external points.
    pub external: [f64; 3],
    /// Quasi-Monte-Carlo points per randomisation.
    pub points: usize,
    /// Number of independent random shifts.
    pub shifts: usize,
    pub seed: u64,
    /// Lattice sizes in `(u, r₁, ρ)`.
    pub lattice: [usize; 3],
}

impl SpectralAmplitudeSpec {
    pub fn new(n: usize, beta: f64, s: i8, m: f64) -> Self {
        Self {
            n,
            beta,
            s,
            m,
            h_width: 1.0,
            h_radius: 2.0,
            external: [0.0; 3],
            points: 4096,
            shifts: 16,
            seed: 7,
            lattice: [9, 13, 9],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n != 2 && self.n != 4 {
            return Err(Error::ConstraintViolation(format!("spectral amplitudes need n ∈ {{2, 4}}, got {}", self.n)));
        }
        if !(self.h_width > 0.0 && self.h_radius > 0.0) {
            return Err(Error::ConstraintViolation("the cutoff h needs positive width and radius".into()));
        }
        if self.points == 0 || self.shifts < 2 || self.lattice.iter().any(|&k| k < 2) {
            return Err(Error::ConstraintViolation("spectral sampling needs points > 0, shifts ≥ 2, lattice ≥ 2".into()));
        }
        SplitPropagator::new(self.s, Beta::Finite(self.beta), self.m).map(|_| ())
    }

    fn h(&self, z: [f64; 3]) -> f64 {
        let r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
        if r2 > self.h_radius * self.h_radius {
            0.0
        } else {
            (-r2 / (2.0 * self.h_width * self.h_width)).exp()
        }
    }
}

/// Split-propagator values on a regular `(u, r₁, ρ)` lattice at fixed time.
struct SplitLattice {
    lo: [f64; 3],
    step: [f64; 3],
    dims: [usize; 3],
    values: Vec<Complex64>,
}

impl SplitLattice {
    fn build(sp: &SplitPropagator, t: f64, lo: [f64; 3], hi: [f64; 3], dims: [usize; 3]) -> Result<Self> {
        let step = [0, 1, 2].map(|i| (hi[i] - lo[i]) / (dims[i] - 1) as f64);
        let total = dims[0] * dims[1] * dims[2];
        let values = (0..total)
            .into_par_iter()
            .map(|idx| {
                let (i, rem) = (idx / (dims[1] * dims[2]), idx % (dims[1] * dims[2]));
                let (j, k) = (rem / dims[2], rem % dims[2]);
                let u = lo[0] + i as f64 * step[0];
                let r1 = lo[1] + j as f64 * step[1];
                let rho = lo[2] + k as f64 * step[2];
                split_prop(sp, &[t, r1, rho, 0.0], u)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lo, step, dims, values })
    }

    fn at(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.values[(i * self.dims[1] + j) * self.dims[2] + k]
    }

    /// Trilinear interpolation.
    fn interpolate(&self, x: [f64; 3]) -> Complex64 {
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            let pos = if self.step[a] > 0.0 { (x[a] - self.lo[a]) / self.step[a] } else { 0.0 };
            let cell = (pos.floor().max(0.0) as usize).min(self.dims[a] - 2);
            base[a] = cell;
            frac[a] = (pos - cell as f64).clamp(0.0, 1.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for corner in 0..8 {
            let d = [corner >> 2 & 1, corner >> 1 & 1, corner & 1];
            let w: f64 = (0..3).map(|a| if d[a] == 1 { frac[a] } else { 1.0 - frac[a] }).product();
            if w != 0.0 {
                acc += w * self.at(base[0] + d[0], base[1] + d[1], base[2] + d[2]);
            }
        }
        acc
    }
}

/// Estimate of a spectral amplitude with its sampling error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub t: f64,
    pub value: Complex64,
    /// Standard error over the random shifts.
    pub std_error: f64,
}

/// Additive recurrence (Kronecker) generators for the 4D rank-1 lattice.
const KRONECKER: [f64; 4] = [0.414_213_562_373_095_1, 0.732_050_807_568_877_2, 0.236_067_977_499_789_8, 0.645_751_311_064_590_6];

/// `A(t) = W_β(0,0)^{δ_{n,2}} ∫d³z h(z) ∫₀^β du Π_j Δ^{(s)}_β(t − iu, x − z)`.
///
/// Split-propagator values are tabulated on a `(u, r₁, ρ)` lattice and
/// interpolated trilinearly; the `(z, u)` integral is a randomly shifted
/// Kronecker lattice with seeded shifts. Fails with `MonteCarloVariance`
/// when the relative standard error exceeds 10 %.
pub fn spectral_amplitude(sa: &SpectralAmplitudeSpec, t: f64) -> Result<SpectralEstimate> {
    sa.validate()?;
    let sp = SplitPropagator::new(sa.s, Beta::Finite(sa.beta), sa.m)?;
    let rad = sa.h_radius;
    let x = sa.external;
    let rho_c = x[1].hypot(x[2]);
    let lo = [0.0, x[0] - rad, (rho_c - rad).max(0.0)];
    let hi = [sa.beta, x[0] + rad, rho_c + rad];
    let lattice = SplitLattice::build(&sp, t, lo, hi, sa.lattice)?;
    let prefactor = if sa.n == 2 { kms::wick_coincident(sa.m, ThermoParams::beta(sa.beta))? } else { 1.0 };
    let volume = (2.0 * rad).powi(3) * sa.beta;
    let mut rng = ChaCha8Rng::seed_from_u64(sa.seed);
    let shifts: Vec<[f64; 4]> = (0..sa.shifts).map(|_| [rng.gen(), rng.gen(), rng.gen(), rng.gen()]).collect();
    let estimates: Vec<Complex64> = shifts
        .par_iter()
        .map(|shift| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..sa.points {
                let pt = [0, 1, 2, 3].map(|a| (shift[a] + (i + 1) as f64 * KRONECKER[a]).fract());
                let z = [0, 1, 2].map(|a| (2.0 * pt[a] - 1.0) * rad);
                let hz = sa.h(z);
                if hz == 0.0 {
                    continue;
                }
                let u = pt[3] * sa.beta;
                let r = [x[0] - z[0], x[1] - z[1], x[2] - z[2]];
                let d = lattice.interpolate([u, r[0], r[1].hypot(r[2])]);
                acc += hz * d.powu(sa.n as u32);
            }
            acc * (prefactor * volume / sa.points as f64)
        })
        .collect();
    let k = estimates.len() as f64;
    let mean: Complex64 = estimates.iter().sum::<Complex64>() / k;
    let var = estimates.iter().map(|e| (e - mean).norm_sqr()).sum::<f64>() / (k - 1.0);
    let std_error = (var / k).sqrt();
    let rel = std_error / mean.norm();
    if !(rel <= 0.1) {
        return Err(Error::MonteCarloVariance { rel_sigma: rel });
    }
    Ok(SpectralEstimate { t, value: mean, std_error })
}

/// Power-law fit of `|A(t)|` over `times`, with the individual estimates.
pub fn spectral_decay_fit(sa: &SpectralAmplitudeSpec, times: &[f64]) -> Result<(DecayReport, Vec<SpectralEstimate>)> {
    let estimates = times.iter().map(|&t| spectral_amplitude(sa, t)).collect::<Result<Vec<_>>>()?;
    let samples: Vec<(f64, f64)> = estimates.iter().map(|e| (e.t, e.value.norm())).collect();
    Ok((quadrature::fit_power_law(&samples)?, estimates))
}

/// Power-law fit of the beat envelope of `|A(t)|`.
///
/// Each leg carries `e^{±imt}` components, so `A(t)` mixes a constant part
/// with parts oscillating at `e^{±2imt}` and `|A|` nearly vanishes twice per
/// period `π/m`. The envelope at `t` is the maximum of `|A|` over `samples`
/// equally spaced times in `[t, t + π/m)`.
pub fn spectral_envelope_fit(sa: &SpectralAmplitudeSpec, times: &[f64], samples: usize) -> Result<DecayReport> {
    if samples == 0 {
        return Err(Error::ConstraintViolation("envelope needs at least one sample per period".into()));
    }
    let period = PI / sa.m;
    let envelope = times
        .iter()
        .map(|&t| {
            let mut top = 0.0f64;
            for k in 0..samples {
                top = top.max(spectral_amplitude(sa, t + k as f64 * period / samples as f64)?.value.norm());
            }
            Ok((t, top))
        })
        .collect::<Result<Vec<_>>>()?;
    quadrature::fit_power_law(&envelope)
}

/// Lowest-order entropy-production integrand built from split propagators:
/// `E(τ) = Δ^{(+1)}_{β₁}(x_τ, y_τ) · Δ^{(−1)}_{β₂}(y_τ', x_τ')`, where each
/// kernel's two arguments are shifted in time by `β_i τ` for its own `β_i`
/// (`mismatched`: the `β₂` kernel's first argument is shifted by `β₁τ`).
fn ep_integrand(beta1: f64, beta2: f64, m: f64, tau: f64, mismatched: bool) -> Result<Complex64> {
    const X: Event = [0.7, 1.3, 0.4, -0.2];
    const Y: Event = [0.0, 0.0, 0.0, 0.0];
    const U: f64 = 0.25;
    let shift = |e: Event, dt: f64| -> Event { [e[0] + dt, e[1], e[2], e[3]] };
    let sep = |a: Event, b: Event| -> Event { [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]] };
    let right = SplitPropagator::new(1, Beta::Finite(beta1), m)?;
    let left = SplitPropagator::new(-1, Beta::Finite(beta2), m)?;
    let u = U * beta1.min(beta2);
    let a = split_prop(&right, &sep(shift(X, beta1 * tau), shift(Y, beta1 * tau)), u)?;
    let first = if mismatched { beta1 } else { beta2 };
    let b = split_prop(&left, &sep(shift(Y, first * tau), shift(X, beta2 * tau)), u)?;
    Ok(a * b)
}

fn ep_derivative(beta1: f64, beta2: f64, m: f64, taus: &[f64], mismatched: bool) -> Result<f64> {
    if taus.is_empty() || taus.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::ConstraintViolation("τ samples must be positive".into()));
    }
    let mut worst = 0.0f64;
    for &tau in taus {
        let plus = ep_integrand(beta1, beta2, m, tau, mismatched)?;
        let minus = ep_integrand(beta1, beta2, m, -tau, mismatched)?;
        worst = worst.max((plus - minus).norm() / (2.0 * tau));
    }
    Ok(worst)
}

/// Max over `taus` of the central difference `|dE/dτ|` at `τ = 0` under the
/// modewise shift; zero up to rounding because each factor depends only on
/// its own time difference.
pub fn ep_invariance_check(beta1: f64, beta2: f64, m: f64, taus: &[f64]) -> Result<f64> {
    ep_derivative(beta1, beta2, m, taus, false)
}

/// Same derivative with a deliberately mismatched shift (`β₁τ` on one
/// argument of the `β₂` kernel); generally nonzero.
pub fn ep_mismatch_check(beta1: f64, beta2: f64, m: f64, taus: &[f64]) -> Result<f64> {
    ep_derivative(beta1, beta2, m, taus, true)
}
