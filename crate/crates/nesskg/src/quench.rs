//! Finite-time observables of the thermal-contact quench on an `(x⁰, x¹)`
//! grid: energy density `ρ`, heat current `j₁` and Wick square.
//!
//! # Gaussian-moment pipeline
//!
//! With the sharp temporal switch `ψ = Θ`, `β₃ = ∞` and `μ ≡ 0`, each side
//! `i` of the glued state contributes the free evolution of the Cauchy data
//! `χ_i(y)χ_i(z)·{b/ω, bω}` of the KMS state at `β_i`. Writing
//! `χ_i = Θ_i ∗ G_a` and integrating the initial times in closed form gives,
//! per side and per real scalar,
//!
//! `O_i(t, X) = (2π)⁻⁵ ∫_{H_i}dy dz ∫d²P ∫dp dk dq
//!   e^{i(p−k)X + i(q−p)y + i(k−q)z} e^{−a²[(q−p)² + (k−q)²]/2} (b(ω_q)/ω_q)
//!   Σ_{σ,τ=±1} T_{στ}(p, k, q, P) e^{i(σω_p + τω_k)t}`,
//!
//! where `H₁ = {y, z < 0}`, `H₂ = {y, z > 0}` and `T_{στ}` is the
//! coefficient of the derivative structure, e.g. `¼(1 − στ ω_q²/(ω_pω_k))`
//! for the undifferentiated kernel (the expansion of
//! `cos ω_pt cos ω_kt + ω_q² sin ω_pt sin ω_kt/(ω_pω_k)`).
//!
//! Under the Boltzmann-tail (`b ≈ e^{−βω}`) and nonrelativistic
//! (`ω ≈ m + ε`, `ε = (q² + P²)/2m`) approximations, kept to first order in
//! `1/(βm)`, the momentum integrals become complex Gaussians times
//! polynomials and are evaluated in closed form ([`ApproxBudget`]). Only the
//! two half-line integrals over `(y, z)` remain and are done numerically.
//!
//! # Exact box method
//!
//! With both approximation flags switched off the same observables are
//! computed without approximation by the periodic-box evolution of
//! [`crate::evolution`]; this doubles as an independent oracle for the
//! moment pipeline.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{BoxEvolution, BoxOptions, ProbePair};
use crate::gluing::{GluedStateSpec, ProfileSpec, PsiKind, Side};
use crate::model::{Beta, Family, FieldKind, ModelSpec, ReservoirTriple, ThermoParams};
use crate::ness::{self, NessKernelSpec, ObservableKind};
use crate::quadrature::{self, Domain, QuadratureSpec};

type C = Complex64;

/// Approximations used by the Gaussian-moment pipeline and the regime in
/// which they are admissible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxBudget {
    /// `b(ω) ≈ e^{−βω}` (relative error `e^{−βm}`).
    pub boltzmann_tail: bool,
    /// `ω ≈ m + ε − ε²/2m` kept to first order in `1/(βm)`.
    pub nonrel_dispersion: bool,
    /// Smallest admissible `β_i m` for either flag.
    pub min_beta_m: f64,
    /// Smallest admissible `a m` (the spatial damping must dominate the
    /// thermal wavelength).
    pub min_a_m: f64,
}

impl Default for ApproxBudget {
    fn default() -> Self {
        Self { boltzmann_tail: true, nonrel_dispersion: true, min_beta_m: 20.0, min_a_m: 10.0 }
    }
}

impl ApproxBudget {
    /// No approximations: observables are computed by the exact box method.
    pub fn exact() -> Self {
        Self { boltzmann_tail: false, nonrel_dispersion: false, ..Self::default() }
    }
}

/// How the quench observables are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuenchMethod {
    /// Closed-form Gaussian moments plus 2D spatial quadrature.
    GaussianMoments,
    /// Exact periodic-box evolution.
    ExactBox,
}

/// Glued state restricted to the quench simplification, plus the budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchKernelSpec {
    pub glued: GluedStateSpec,
    pub budget: ApproxBudget,
    /// Relative tolerance of the spatial quadrature.
    pub rel_tol: f64,
}

impl QuenchKernelSpec {
    /// Validates the simplification (`ψ = Θ`, `β₃ = ∞`, `μ ≡ 0`, homogeneous,
    /// `d = 4`, `m > 0`) and the budget.
    pub fn new(glued: GluedStateSpec, budget: ApproxBudget) -> Result<Self> {
        let s = Self { glued, budget, rel_tol: 1e-6 };
        s.method()?;
        Ok(s)
    }

    /// Method selected by the budget flags, after admissibility checks.
    pub fn method(&self) -> Result<QuenchMethod> {
        let g = &self.glued;
        let model = g.model;
        if model.family != Family::Homogeneous || model.d != 4 {
            return Err(Error::Unsupported("the quench pipeline is implemented for the homogeneous family in d = 4".into()));
        }
        if g.profile.psi != PsiKind::Heaviside {
            return Err(Error::Unsupported("the quench pipeline uses the sharp switch psi = Heaviside".into()));
        }
        let r = &g.reservoirs;
        if [r.left.tp.mu, r.right.tp.mu, r.bridge.mu].iter().any(|&mu| mu != 0.0) {
            return Err(Error::ConstraintViolation("the quench pipeline fixes mu = 0".into()));
        }
        if !r.bridge.beta.is_infinite() {
            return Err(Error::ConstraintViolation("the quench pipeline fixes beta3 = infinity".into()));
        }
        let (b1, b2) = match (r.left.tp.beta, r.right.tp.beta) {
            (Beta::Finite(b1), Beta::Finite(b2)) => (b1, b2),
            _ => return Err(Error::ConstraintViolation("the quench pipeline needs finite beta1, beta2".into())),
        };
        if !(model.m > 0.0) {
            return Err(Error::ConstraintViolation("the quench pipeline needs m > 0".into()));
        }
        let bud = &self.budget;
        match (bud.boltzmann_tail, bud.nonrel_dispersion) {
            (false, false) => Ok(QuenchMethod::ExactBox),
            (true, true) => {
                let bm = b1.min(b2) * model.m;
                if bm < bud.min_beta_m {
                    return Err(Error::BudgetViolation(format!(
                        "beta_i m = {bm} below the admissible threshold {}",
                        bud.min_beta_m
                    )));
                }
                let am = g.profile.a * model.m;
                if am < bud.min_a_m {
                    return Err(Error::BudgetViolation(format!("a m = {am} below the admissible threshold {}", bud.min_a_m)));
                }
                Ok(QuenchMethod::GaussianMoments)
            }
            _ => Err(Error::BudgetViolation(
                "the moment pipeline needs both the Boltzmann and the nonrelativistic approximation; disable both for the exact method"
                    .into(),
            )),
        }
    }

    fn beta(&self, side: Side) -> f64 {
        let r = &self.glued.reservoirs;
        let b = match side {
            Side::Left => r.left.tp.beta,
            Side::Right => r.right.tp.beta,
        };
        b.finite().expect("validated finite")
    }

    fn m(&self) -> f64 {
        self.glued.model.m
    }

    fn a(&self) -> f64 {
        self.glued.profile.a
    }
}

/// The reference quench: `β₁m = 50`, `β₂` such that `ρ_{β₂} = ρ_{β₁}/2`,
/// `am = 100√(β₁m)`, complex field, default budget.
pub fn reference_quench_spec() -> Result<QuenchKernelSpec> {
    let m = 1.0;
    let beta1 = 50.0;
    let beta2 = half_energy_beta(m, beta1)?;
    let a = 100.0 * (beta1 * m).sqrt() / m;
    let model = ModelSpec::new(4, m, Family::Homogeneous, FieldKind::Complex)?;
    let glued = GluedStateSpec::new(
        model,
        ReservoirTriple::betas(Beta::Finite(beta1), Beta::Finite(beta2), Beta::Infinite),
        ProfileSpec::new(a)?,
    )?;
    QuenchKernelSpec::new(glued, ApproxBudget::default())
}

/// The inverse temperature whose KMS energy density is half that at `β₁`.
pub fn half_energy_beta(m: f64, beta1: f64) -> Result<f64> {
    let rho = |b: f64| crate::kms::energy_density(m, ThermoParams::beta(b));
    let target = 0.5 * rho(beta1)?;
    // ρ decreases monotonically in β; bracket and bisect.
    let (mut lo, mut hi) = (beta1, 2.0 * beta1 + 10.0 / m.max(1e-300));
    while rho(hi)? > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rho(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Derivative structures `(D₁ ⊗ D₂)` applied to one side's kernel at
/// coincident points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelDerivs {
    /// No derivative: `W(x, x)`.
    None,
    /// `∂₀ ⊗ ∂₀`.
    D0D0,
    /// `∂₁ ⊗ ∂₁`.
    D1D1,
    /// Transverse trace `∂₂⊗∂₂ + ∂₃⊗∂₃`.
    Transverse,
    /// Symmetrised `½(∂₀ ⊗ ∂₁ + ∂₁ ⊗ ∂₀)`.
    D0D1,
}

// ---------------------------------------------------------------------------
// Polynomials in (p, k, q, P²)
// ---------------------------------------------------------------------------

/// Polynomial in `p, k, q` and `P²` with complex coefficients, keyed by the
/// exponents `[i, j, l, n]` of `p^i k^j q^l P^{2n}`.
#[derive(Debug, Clone, Default, PartialEq)]
struct Poly(BTreeMap<[u8; 4], C>);

impl Poly {
    fn constant(c: f64) -> Self {
        Self::monomial([0, 0, 0, 0], C::new(c, 0.0))
    }

    fn monomial(e: [u8; 4], c: C) -> Self {
        let mut m = BTreeMap::new();
        if c != C::new(0.0, 0.0) {
            m.insert(e, c);
        }
        Poly(m)
    }

    /// Momentum variable `p` (0), `k` (1) or `q` (2).
    fn var(i: usize) -> Self {
        let mut e = [0u8; 4];
        e[i] = 1;
        Self::monomial(e, C::new(1.0, 0.0))
    }

    fn perp2() -> Self {
        Self::monomial([0, 0, 0, 1], C::new(1.0, 0.0))
    }

    fn add(&self, o: &Poly) -> Poly {
        let mut m = self.0.clone();
        for (e, c) in &o.0 {
            *m.entry(*e).or_insert(C::new(0.0, 0.0)) += c;
        }
        m.retain(|_, c| *c != C::new(0.0, 0.0));
        Poly(m)
    }

    fn scale(&self, s: C) -> Poly {
        Poly(self.0.iter().map(|(e, c)| (*e, c * s)).filter(|(_, c)| *c != C::new(0.0, 0.0)).collect())
    }

    fn scale_re(&self, s: f64) -> Poly {
        self.scale(C::new(s, 0.0))
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut m: BTreeMap<[u8; 4], C> = BTreeMap::new();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                *m.entry(e).or_insert(C::new(0.0, 0.0)) += c1 * c2;
            }
        }
        m.retain(|_, c| *c != C::new(0.0, 0.0));
        Poly(m)
    }

    fn max_degree(&self) -> usize {
        self.0.keys().map(|e| (e[0] + e[1] + e[2]) as usize).max().unwrap_or(0)
    }

    fn max_perp(&self) -> usize {
        self.0.keys().map(|e| e[3] as usize).max().unwrap_or(0)
    }

    /// Value at explicit momenta (test oracle).
    #[cfg(test)]
    fn eval(&self, p: f64, k: f64, q: f64, perp2: f64) -> C {
        self.0
            .iter()
            .map(|(e, c)| c * p.powi(e[0] as i32) * k.powi(e[1] as i32) * q.powi(e[2] as i32) * perp2.powi(e[3] as i32))
            .sum()
    }
}

/// `ε_v = (v² + P²)/(2m)` for momentum variable `v`.
fn eps(v: usize, m: f64) -> Poly {
    Poly::var(v).mul(&Poly::var(v)).add(&Poly::perp2()).scale_re(0.5 / m)
}

const P: usize = 0;
const K: usize = 1;
const Q: usize = 2;

/// Leading and first-order parts of a structure coefficient `T_{στ}`.
#[derive(Debug, Clone, Default)]
struct Expansion {
    o0: Poly,
    o1: Poly,
}

/// Slow (`τ = −σ`) coefficient of a derivative structure, expanded to first
/// order in `1/(βm)` with `ω ≈ m + ε`.
fn slow_structure(d: KernelDerivs, sigma: f64, m: f64) -> Expansion {
    let (ep, ek, eq) = (eps(P, m), eps(K, m), eps(Q, m));
    // R − 1 ≈ (2ε_q − ε_p − ε_k)/m.
    let r1 = eq.scale_re(2.0).add(&ep.scale_re(-1.0)).add(&ek.scale_re(-1.0)).scale_re(1.0 / m);
    let pk = Poly::var(P).mul(&Poly::var(K));
    match d {
        // ¼(1 + R)
        KernelDerivs::None => Expansion { o0: Poly::constant(0.5), o1: r1.scale_re(0.25) },
        // ¼(ω_pω_k + ω_q²)
        KernelDerivs::D0D0 => Expansion {
            o0: Poly::constant(0.5 * m * m),
            o1: ep.add(&ek).scale_re(0.25 * m).add(&eq.scale_re(0.5 * m)),
        },
        // pk·¼(1 + R)
        KernelDerivs::D1D1 => Expansion { o0: Poly::default(), o1: pk.scale_re(0.5) },
        // P²·¼(1 + R)
        KernelDerivs::Transverse => Expansion { o0: Poly::default(), o1: Poly::perp2().scale_re(0.5) },
        // (σ/4)[k(ω_p + ω_q²/ω_k) + p(ω_k + ω_q²/ω_p)]/2
        KernelDerivs::D0D1 => {
            let kp = Poly::var(K).add(&Poly::var(P));
            let a = Poly::var(K).mul(&ep.add(&ek.scale_re(-1.0)).add(&eq.scale_re(2.0)));
            let b = Poly::var(P).mul(&ek.add(&ep.scale_re(-1.0)).add(&eq.scale_re(2.0)));
            Expansion { o0: kp.scale_re(sigma * m / 4.0), o1: a.add(&b).scale_re(sigma / 8.0) }
        }
    }
}

/// Fast (`τ = σ`) coefficient at its leading order (first order in `1/(βm)`
/// or beyond; the `∂₁⊗∂₁` and transverse pieces are second order and dropped).
fn fast_structure(d: KernelDerivs, sigma: f64, m: f64) -> Poly {
    let (ep, ek, eq) = (eps(P, m), eps(K, m), eps(Q, m));
    let r1 = eq.scale_re(2.0).add(&ep.scale_re(-1.0)).add(&ek.scale_re(-1.0)).scale_re(1.0 / m);
    match d {
        // ¼(1 − R)
        KernelDerivs::None => r1.scale_re(-0.25),
        // ¼(ω_q² − ω_pω_k)
        KernelDerivs::D0D0 => r1.scale_re(0.25 * m * m),
        KernelDerivs::D1D1 | KernelDerivs::Transverse => Poly::default(),
        // (σ/8)(p − k)(2ε_q − ε_p − ε_k)
        KernelDerivs::D0D1 => Poly::var(P).add(&Poly::var(K).scale_re(-1.0)).mul(&r1).scale_re(sigma * m / 8.0),
    }
}

/// Linear combination of derivative structures making up an observable
/// (real-scalar kernel, physical sign of `j₁`).
fn observable_structures(obs: ObservableKind, m: f64) -> Vec<(KernelDerivs, f64)> {
    match obs {
        ObservableKind::WickSquare => vec![(KernelDerivs::None, 1.0)],
        ObservableKind::EnergyDensity => vec![
            (KernelDerivs::D0D0, 0.5),
            (KernelDerivs::D1D1, 0.5),
            (KernelDerivs::Transverse, 0.5),
            (KernelDerivs::None, 0.5 * m * m),
        ],
        ObservableKind::HeatCurrent => vec![(KernelDerivs::D0D1, -1.0)],
    }
}

// ---------------------------------------------------------------------------
// Gaussian moment terms
// ---------------------------------------------------------------------------

/// One `(σ, τ)` term: complex Gaussian `e^{−½uᵀAu}` in `u = (p, k, q)`,
/// transverse Gaussian `e^{−c_⊥P²}`, global phase and polynomial.
#[derive(Debug, Clone)]
struct MomentTerm {
    ainv: [[C; 3]; 3],
    /// `(2π)^{3/2} det(A)^{−1/2}` times the global phase and transverse moments folded per `n`.
    norm: C,
    /// `∫d²P P^{2n} e^{−c_⊥P²} = π n!/c_⊥^{n+1}` for `n = 0..`.
    perp_moments: Vec<C>,
    /// `(exponents [i, j, l], n, coefficient)`.
    poly: Vec<([usize; 3], usize, C)>,
    degree: usize,
}

fn inverse3(a: &[[C; 3]; 3]) -> Option<([[C; 3]; 3], C)> {
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if det.norm() == 0.0 {
        return None;
    }
    let mut inv = [[C::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / det;
        }
    }
    Some((inv, det))
}

/// `det(A)^{−1/2}` on the branch continuous from real positive-definite `A`:
/// product of principal roots of the `LDLᵀ` pivots.
fn det_inv_sqrt(a: &[[C; 3]; 3]) -> C {
    let d1 = a[0][0];
    let l10 = a[1][0] / d1;
    let l20 = a[2][0] / d1;
    let d2 = a[1][1] - l10 * l10 * d1;
    let l21 = (a[2][1] - l20 * l10 * d1) / d2;
    let d3 = a[2][2] - l20 * l20 * d1 - l21 * l21 * d2;
    1.0 / (d1.sqrt() * d2.sqrt() * d3.sqrt())
}

impl MomentTerm {
    fn new(a: [[C; 3]; 3], c_perp: C, phase: C, poly: &Poly) -> Result<Self> {
        let (ainv, _) = inverse3(&a).ok_or_else(|| Error::Unsupported("singular momentum Gaussian".into()))?;
        if !(c_perp.re > 0.0) {
            return Err(Error::Unsupported("transverse Gaussian not damped".into()));
        }
        let norm = (2.0 * PI).powf(1.5) * det_inv_sqrt(&a) * phase;
        let nmax = poly.max_perp();
        let mut perp_moments = Vec::with_capacity(nmax + 1);
        let mut fact = 1.0;
        for n in 0..=nmax {
            if n > 0 {
                fact *= n as f64;
            }
            perp_moments.push(PI * fact / c_perp.powi(n as i32 + 1));
        }
        let terms = poly.0.iter().map(|(e, c)| ([e[0] as usize, e[1] as usize, e[2] as usize], e[3] as usize, *c)).collect();
        Ok(Self { ainv, norm, perp_moments, poly: terms, degree: poly.max_degree() })
    }

    /// `∫d³u d²P e^{−½uᵀAu + icᵀu} e^{−c_⊥P²} poly(u, P²)` times the phase.
    fn eval(&self, c: [f64; 3], table: &mut MomentTable) -> C {
        let mut v = [C::new(0.0, 0.0); 3];
        for i in 0..3 {
            for j in 0..3 {
                v[i] += self.ainv[i][j] * c[j];
            }
        }
        let quad: C = (0..3).map(|i| v[i] * c[i]).sum();
        let gauss = (-0.5 * quad).exp();
        // Mean of the complex Gaussian: iA⁻¹c.
        let mean = [C::i() * v[0], C::i() * v[1], C::i() * v[2]];
        table.fill(&mean, &self.ainv, self.degree);
        let mut acc = C::new(0.0, 0.0);
        for (e, n, coef) in &self.poly {
            acc += coef * table.get(e) * self.perp_moments[*n];
        }
        self.norm * gauss * acc
    }
}

const MAX_DEG: usize = 7;

/// Moments `E[p^i k^j q^l]` of a complex Gaussian, by recursion.
struct MomentTable {
    m: Vec<C>,
}

impl MomentTable {
    fn new() -> Self {
        Self { m: vec![C::new(0.0, 0.0); MAX_DEG * MAX_DEG * MAX_DEG] }
    }

    fn idx(e: &[usize; 3]) -> usize {
        (e[0] * MAX_DEG + e[1]) * MAX_DEG + e[2]
    }

    fn get(&self, e: &[usize; 3]) -> C {
        self.m[Self::idx(e)]
    }

    /// `E[u_r u^β] = μ_r E[u^β] + Σ_s Σ_{rs} β_s E[u^{β − e_s}]`.
    fn fill(&mut self, mean: &[C; 3], cov: &[[C; 3]; 3], degree: usize) {
        self.m[0] = C::new(1.0, 0.0);
        for total in 1..=degree {
            for i in 0..=total {
                for j in 0..=(total - i) {
                    let l = total - i - j;
                    let e = [i, j, l];
                    let r = (0..3).find(|&r| e[r] > 0).expect("nonzero degree");
                    let mut b = e;
                    b[r] -= 1;
                    let mut val = mean[r] * self.get(&b);
                    for s in 0..3 {
                        if b[s] > 0 {
                            let mut bb = b;
                            bb[s] -= 1;
                            val += cov[r][s] * (b[s] as f64) * self.get(&bb);
                        }
                    }
                    self.m[Self::idx(&e)] = val;
                }
            }
        }
    }
}

/// All `(σ, τ)` moment terms of one side for a combination of structures.
fn build_terms(spec: &QuenchKernelSpec, side: Side, structs: &[(KernelDerivs, f64)], t: f64, a: f64) -> Result<Vec<MomentTerm>> {
    let m = spec.m();
    let beta = spec.beta(side);
    let eq = eps(Q, m);
    // b/ω ≈ e^{−βm} e^{−βε_q} (1 + βε_q²/2m)(1 − ε_q/m)/m; e^{−βm} is applied by the caller.
    let pref0 = 1.0 / m;
    let pref1 = eq.mul(&eq).scale_re(beta / (2.0 * m)).add(&eq.scale_re(-1.0 / m)).scale_re(1.0 / m);
    let z = C::new(0.0, 0.0);
    let mut terms = Vec::new();
    for sigma in [1.0, -1.0] {
        // Slow term τ = −σ.
        let mut ex = Expansion::default();
        for &(d, w) in structs {
            let s = slow_structure(d, sigma, m);
            ex.o0 = ex.o0.add(&s.o0.scale_re(w));
            ex.o1 = ex.o1.add(&s.o1.scale_re(w));
        }
        // φ₁ = −σt(p² − k²)(ε_p + ε_k)/(4m²) from the ε²/2m dispersion term.
        let p2k2 = Poly::var(P).mul(&Poly::var(P)).add(&Poly::var(K).mul(&Poly::var(K)).scale_re(-1.0));
        let phi1 = p2k2.mul(&eps(P, m).add(&eps(K, m))).scale_re(-sigma * t / (4.0 * m * m));
        let poly = ex
            .o0
            .add(&ex.o1)
            .scale_re(pref0)
            .add(&pref1.mul(&ex.o0))
            .add(&ex.o0.mul(&phi1).scale(C::new(0.0, pref0)));
        if !poly.0.is_empty() {
            let a_mat = momentum_gaussian(a, beta, m, t, sigma, -sigma);
            terms.push(MomentTerm::new(a_mat, C::new(beta / (2.0 * m), 0.0), C::new(1.0, 0.0), &poly)?);
        }
        // Fast term τ = σ: global phase e^{2iσmt}, transverse phase e^{iσP²t/m}.
        let mut fpoly = Poly::default();
        for &(d, w) in structs {
            fpoly = fpoly.add(&fast_structure(d, sigma, m).scale_re(w * pref0));
        }
        if !fpoly.0.is_empty() {
            let a_mat = momentum_gaussian(a, beta, m, t, sigma, sigma);
            let c_perp = C::new(beta / (2.0 * m), -sigma * t / m);
            let phase = C::from_polar(1.0, 2.0 * sigma * m * t);
            terms.push(MomentTerm::new(a_mat, c_perp, phase, &fpoly)?);
        }
        let _ = z;
    }
    Ok(terms)
}

/// `A = a²[[1,0,−1],[0,1,−1],[−1,−1,2]] + (β/m)e_qq − (iσt/m)e_pp − (iτt/m)e_kk`.
fn momentum_gaussian(a: f64, beta: f64, m: f64, t: f64, sigma: f64, tau: f64) -> [[C; 3]; 3] {
    let a2 = a * a;
    let r = |x: f64| C::new(x, 0.0);
    [
        [C::new(a2, -sigma * t / m), r(0.0), r(-a2)],
        [r(0.0), C::new(a2, -tau * t / m), r(-a2)],
        [r(-a2), r(-a2), r(2.0 * a2 + beta / m)],
    ]
}

/// `e^{−βm}(2π)⁻⁵`, the constant in front of every side integral.
fn side_prefactor(spec: &QuenchKernelSpec, side: Side) -> f64 {
    (-spec.beta(side) * spec.m()).exp() / (2.0 * PI).powi(5)
}

/// Integrand over the spatial variables `(y, z)` of one side.
fn spatial_integrand(terms: &[MomentTerm], x: f64, y: f64, z: f64, table: &mut MomentTable) -> f64 {
    let c = [x - y, z - x, y - z];
    terms.iter().map(|t| t.eval(c, table)).sum::<C>().re
}

/// Side integral over `H_i` (or over ℝ² when `theta = false`).
fn side_integral(
    spec: &QuenchKernelSpec,
    side: Side,
    structs: &[(KernelDerivs, f64)],
    t: f64,
    x: f64,
    theta: bool,
    abs_scale: f64,
) -> Result<(f64, f64)> {
    let a = spec.a();
    let terms = build_terms(spec, side, structs, t, a)?;
    let pref = side_prefactor(spec, side);
    let dom = if !theta {
        Domain::RealLine { centre: x, scale: a }
    } else {
        match side {
            Side::Left => Domain::HalfLineDown { b: 0.0, scale: a },
            Side::Right => Domain::HalfLineUp { a: 0.0, scale: a },
        }
    };
    let qs = QuadratureSpec { rel_tol: spec.rel_tol, abs_tol: 1e-9 * abs_scale / pref, max_subdivisions: 400, tail_cut: 1e-14 };
    let table = std::cell::RefCell::new(MomentTable::new());
    let q = quadrature::integrate_2d(|y, z| spatial_integrand(&terms, x, y, z, &mut table.borrow_mut()), dom, dom, &qs)?;
    Ok((q.value * pref, q.error * pref))
}

/// Thermal scale used for absolute tolerances: the KMS energy density at `β₁`.
fn rho_scale(spec: &QuenchKernelSpec) -> Result<f64> {
    crate::kms::energy_density(spec.m(), ThermoParams::beta(spec.beta(Side::Left)))
}

/// `[(D₁⊗D₂)(σ_i⊗σ_i)W_{β_i}](x, x)` per real scalar for the derivative
/// structure `derivs`, at the event `x = (x⁰, x¹, ·, ·)`.
pub fn kernel_term(spec: &QuenchKernelSpec, side: Side, derivs: KernelDerivs, x: &[f64; 4]) -> Result<f64> {
    match spec.method()? {
        QuenchMethod::GaussianMoments => {
            let scale = rho_scale(spec)?;
            Ok(side_integral(spec, side, &[(derivs, 1.0)], x[0], x[1], true, scale)?.0)
        }
        QuenchMethod::ExactBox => Err(Error::Unsupported(
            "per-structure kernel terms are provided by the moment pipeline; use observable_value for the exact method".into(),
        )),
    }
}

/// One side's real-scalar contribution to an observable.
pub fn observable_side(spec: &QuenchKernelSpec, side: Side, obs: ObservableKind, x: &[f64; 4]) -> Result<f64> {
    spec.method()?;
    let scale = rho_scale(spec)?;
    Ok(side_integral(spec, side, &observable_structures(obs, spec.m()), x[0], x[1], true, scale)?.0)
}

/// Physical observable `ω_G(O(x))` (complex-field factor included).
pub fn observable_value(spec: &QuenchKernelSpec, obs: ObservableKind, x: &[f64; 4]) -> Result<f64> {
    let factor = spec.glued.model.field_kind.observable_factor();
    match spec.method()? {
        QuenchMethod::GaussianMoments => {
            let l = observable_side(spec, Side::Left, obs, x)?;
            let r = observable_side(spec, Side::Right, obs, x)?;
            Ok(factor * (l + r))
        }
        QuenchMethod::ExactBox => {
            let probe = ProbePair { x1: x[1], y1: x[1] };
            let engine = BoxEvolution::new(&spec.glued, probe, &exact_box_options(spec, x[0].abs()))?;
            Ok(factor * engine.glued_observable(x[0].abs(), x[1], obs))
        }
    }
}

fn exact_box_options(spec: &QuenchKernelSpec, t_max: f64) -> BoxOptions {
    BoxOptions { t_max, margin: 10.0 / spec.m(), ..BoxOptions::default() }
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

/// No-Θ reproduction of a KMS value by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationReport {
    /// Profile width used (`0` means the analytic `p = k = q` reduction).
    pub a: f64,
    pub side: Side,
    pub time: f64,
    /// Pipeline value with the Θ factors removed (real-scalar kernel).
    pub pipeline: f64,
    /// Exact KMS value.
    pub exact: f64,
    /// `|pipeline − exact|/scale`, with the KMS value as scale (the energy
    /// density for `j₁`, whose KMS value vanishes).
    pub rel_error: f64,
}

/// Runs the pipeline with the step functions removed (`y, z ∈ ℝ`), which
/// must reproduce the constant KMS value of side `i` at any time.
///
/// At `a = 0` the spatial integrals produce `δ(q − p)δ(k − q)` and the
/// pipeline reduces analytically to 1D Gaussian moments at `p = k = q`.
pub fn calibrate(spec: &QuenchKernelSpec, obs: ObservableKind, a: f64, side: Side, t: f64) -> Result<CalibrationReport> {
    if spec.method()? != QuenchMethod::GaussianMoments {
        return Err(Error::Unsupported("calibration applies to the moment pipeline".into()));
    }
    let m = spec.m();
    let beta = spec.beta(side);
    let tp = ThermoParams::beta(beta);
    let exact = ness::thermal_observable_kernel(m, tp, obs)?;
    let scale = match obs {
        ObservableKind::HeatCurrent => crate::kms::energy_density(m, tp)?,
        _ => exact.abs(),
    };
    let structs = observable_structures(obs, m);
    let pipeline = if a == 0.0 {
        analytic_diagonal(spec, side, &structs)?
    } else {
        let sp = QuenchKernelSpec { glued: GluedStateSpec { profile: ProfileSpec { a, ..spec.glued.profile }, ..spec.glued }, ..*spec };
        side_integral(&sp, side, &structs, t, 0.0, false, scale)?.0
    };
    Ok(CalibrationReport { a, side, time: t, pipeline, exact, rel_error: (pipeline - exact).abs() / scale })
}

/// `a = 0`, no Θ: `(2π)⁻³ e^{−βm} ∫d²P dq e^{−β(q² + P²)/2m} poly(q, q, q, P²)`
/// summed over the slow terms (the fast ones vanish on the diagonal).
fn analytic_diagonal(spec: &QuenchKernelSpec, side: Side, structs: &[(KernelDerivs, f64)]) -> Result<f64> {
    let m = spec.m();
    let beta = spec.beta(side);
    let alpha = beta / (2.0 * m);
    let eq = eps(Q, m);
    let pref1 = eq.mul(&eq).scale_re(beta / (2.0 * m)).add(&eq.scale_re(-1.0 / m)).scale_re(1.0 / m);
    let mut total = C::new(0.0, 0.0);
    for sigma in [1.0, -1.0] {
        let mut ex = Expansion::default();
        for &(d, w) in structs {
            let s = slow_structure(d, sigma, m);
            ex.o0 = ex.o0.add(&s.o0.scale_re(w));
            ex.o1 = ex.o1.add(&s.o1.scale_re(w));
        }
        let poly = ex.o0.add(&ex.o1).scale_re(1.0 / m).add(&pref1.mul(&ex.o0));
        for (e, c) in &poly.0 {
            let deg = (e[0] + e[1] + e[2]) as i32;
            if deg % 2 == 1 {
                continue;
            }
            let j = deg as f64 / 2.0;
            let n = e[3] as i32;
            let qmom = libm::tgamma(j + 0.5) / alpha.powf(j + 0.5);
            let pmom = PI * libm::tgamma(n as f64 + 1.0) / alpha.powi(n + 1);
            total += c * qmom * pmom;
        }
    }
    Ok(total.re * (-beta * m).exp() / (2.0 * PI).powi(3))
}

/// Largest calibration residual over `a ∈ {0, a_spec}`, both sides and
/// `t ∈ {0, t_max}`.
pub fn calibration_residual(spec: &QuenchKernelSpec, obs: ObservableKind, t_max: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for side in [Side::Left, Side::Right] {
        worst = worst.max(calibrate(spec, obs, 0.0, side, 0.0)?.rel_error);
        for t in [0.0, t_max] {
            worst = worst.max(calibrate(spec, obs, spec.a(), side, t)?.rel_error);
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

/// `(x⁰, x¹)` grid in units of `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x0_min: f64,
    pub x0_max: f64,
    pub n_x0: usize,
    pub x1_min: f64,
    pub x1_max: f64,
    pub n_x1: usize,
}

impl Default for GridSpec {
    /// 41 × 41 points, `x⁰ ∈ [0, 8a]`, `x¹ ∈ [−8a, 8a]`.
    fn default() -> Self {
        Self { x0_min: 0.0, x0_max: 8.0, n_x0: 41, x1_min: -8.0, x1_max: 8.0, n_x1: 41 }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl GridSpec {
    pub fn x0(&self) -> Vec<f64> {
        linspace(self.x0_min, self.x0_max, self.n_x0)
    }
    pub fn x1(&self) -> Vec<f64> {
        linspace(self.x1_min, self.x1_max, self.n_x1)
    }
    fn validate(&self) -> Result<()> {
        if self.n_x0 == 0 || self.n_x1 == 0 {
            return Err(Error::ConstraintViolation("grid needs at least one point per axis".into()));
        }
        if ![self.x0_min, self.x0_max, self.x1_min, self.x1_max].iter().all(|v| v.is_finite()) {
            return Err(Error::ConstraintViolation("grid bounds must be finite".into()));
        }
        Ok(())
    }
}

/// Sampled observable over an `(x⁰, x¹)` grid (coordinates in units of `a`).
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
    /// Row-major: `values[i0 * x1.len() + i1]`.
    pub values: Vec<f64>,
    pub observable: ObservableKind,
    /// Ordered `(key, value)` metadata: parameters, method, normalisation, error estimate.
    pub metadata: Vec<(String, String)>,
}

impl Field2D {
    pub fn at(&self, i0: usize, i1: usize) -> f64 {
        self.values[i0 * self.x1.len() + i1]
    }

    fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn obs_name(obs: ObservableKind) -> &'static str {
    match obs {
        ObservableKind::EnergyDensity => "energy_density",
        ObservableKind::HeatCurrent => "heat_current",
        ObservableKind::WickSquare => "wick_square",
    }
}

fn spec_metadata(spec: &QuenchKernelSpec, obs: ObservableKind, method: QuenchMethod) -> Vec<(String, String)> {
    let g = &spec.glued;
    let r = &g.reservoirs;
    vec![
        ("observable".into(), obs_name(obs).into()),
        ("method".into(), format!("{method:?}")),
        ("units".into(), "mass m = 1 sets the unit; x0, x1 in units of a".into()),
        ("m".into(), format!("{:.17e}", g.model.m)),
        ("field_kind".into(), format!("{:?}", g.model.field_kind)),
        ("beta1".into(), format!("{}", r.left.tp.beta)),
        ("beta2".into(), format!("{}", r.right.tp.beta)),
        ("beta3".into(), format!("{}", r.bridge.beta)),
        ("a".into(), format!("{:.17e}", g.profile.a)),
        ("rel_tol".into(), format!("{:e}", spec.rel_tol)),
    ]
}

/// Evaluates the physical observable on the grid (parallel over points).
///
/// For the moment pipeline the metadata carries the calibration residual
/// (`calibration_error`), which bounds the method error of every value.
pub fn evolve_field(spec: &QuenchKernelSpec, obs: ObservableKind, grid: &GridSpec) -> Result<Field2D> {
    grid.validate()?;
    let method = spec.method()?;
    let a = spec.a();
    let x0 = grid.x0();
    let x1 = grid.x1();
    let points: Vec<(f64, f64)> = x0.iter().flat_map(|&t| x1.iter().map(move |&x| (t, x))).collect();
    let factor = spec.glued.model.field_kind.observable_factor();
    let mut metadata = spec_metadata(spec, obs, method);
    let values: Vec<f64> = match method {
        QuenchMethod::GaussianMoments => points
            .par_iter()
            .map(|&(t, x)| observable_value(spec, obs, &[t * a, x * a, 0.0, 0.0]))
            .collect::<Result<Vec<f64>>>()?,
        QuenchMethod::ExactBox => {
            let t_max = x0.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) * a;
            let reach = x1.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) * a;
            let engine = BoxEvolution::new(&spec.glued, ProbePair { x1: reach, y1: reach }, &exact_box_options(spec, t_max))?;
            points.iter().map(|&(t, x)| factor * engine.glued_observable((t * a).abs(), x * a, obs)).collect()
        }
    };
    let calib = match method {
        QuenchMethod::GaussianMoments => {
            let t_max = x0.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) * a;
            let cal_obs = if obs == ObservableKind::HeatCurrent { ObservableKind::EnergyDensity } else { obs };
            calibration_residual(spec, cal_obs, t_max)?
        }
        QuenchMethod::ExactBox => 0.0,
    };
    metadata.push(("calibration_error".into(), format!("{calib:e}")));
    metadata.push(("normalisation".into(), "none".into()));
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonConvergence { estimate: *v, error: f64::INFINITY, subdivisions: 0 });
    }
    Ok(Field2D { x0, x1, values, observable: obs, metadata })
}

/// Normaliser of a ratio field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalisation {
    /// The KMS value at `β₁`.
    KmsBeta1,
    /// The NESS value.
    Ness,
}

/// Pointwise division of a field by its KMS(`β₁`) or NESS value.
pub fn ratio_field(spec: &QuenchKernelSpec, field: &Field2D, norm: Normalisation) -> Result<Field2D> {
    if field.meta("normalisation").is_some_and(|v| v != "none") {
        return Err(Error::Unsupported("field is already normalised".into()));
    }
    let g = &spec.glued;
    let m = g.model.m;
    let factor = g.model.field_kind.observable_factor();
    let r = &g.reservoirs;
    let obs = field.observable;
    let denom = match norm {
        Normalisation::KmsBeta1 => factor * ness::thermal_observable_kernel(m, r.left.tp, obs)?,
        Normalisation::Ness => {
            let ns = NessKernelSpec::new(g.model, r.left.tp, r.right.tp, r.bridge);
            ness::ness_observable(&ns, obs)?
        }
    };
    let scale = factor * crate::kms::energy_density(m, r.left.tp)?;
    if !(denom.abs() > 1e-12 * scale) {
        return Err(Error::DivisionByZero(format!("{norm:?} normaliser of {} vanishes ({denom:e})", obs_name(obs))));
    }
    let mut metadata: Vec<(String, String)> = field.metadata.iter().filter(|(k, _)| k != "normalisation").cloned().collect();
    metadata.push(("normalisation".into(), format!("{norm:?}")));
    metadata.push(("normaliser".into(), format!("{denom:.17e}")));
    Ok(Field2D { values: field.values.iter().map(|v| v / denom).collect(), metadata, ..field.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec_with(b1: f64, b2: f64, a: f64) -> QuenchKernelSpec {
        let model = ModelSpec::new(4, 1.0, Family::Homogeneous, FieldKind::Complex).unwrap();
        let g = GluedStateSpec::new(
            model,
            ReservoirTriple::betas(Beta::Finite(b1), Beta::Finite(b2), Beta::Infinite),
            ProfileSpec::new(a).unwrap(),
        )
        .unwrap();
        QuenchKernelSpec::new(g, ApproxBudget::default()).unwrap()
    }

    /// Exact coefficient of `e^{i(σω_p + τω_k)t}` of each structure.
    fn exact_coeff(d: KernelDerivs, s: f64, tau: f64, p: f64, k: f64, q: f64, pp: f64) -> f64 {
        let w = |v: f64| (v * v + pp + 1.0).sqrt();
        let (wp, wk, wq) = (w(p), w(k), w(q));
        let r = wq * wq / (wp * wk);
        match d {
            KernelDerivs::None => 0.25 * (1.0 - s * tau * r),
            KernelDerivs::D0D0 => 0.25 * (-s * tau * wp * wk + wq * wq),
            KernelDerivs::D1D1 => p * k * 0.25 * (1.0 - s * tau * r),
            KernelDerivs::Transverse => pp * 0.25 * (1.0 - s * tau * r),
            KernelDerivs::D0D1 => 0.5 * ((-k / 4.0) * (-s * wp + tau * wq * wq / wk) + (p / 4.0) * (-tau * wk + s * wq * wq / wp)),
        }
    }

    #[test]
    fn exact_coefficients_reproduce_trig_structures() {
        // Σ_{στ} T_{στ} e^{i(σω_p+τω_k)t} against the direct cos/sin forms.
        let (p, k, q, pp, t) = (0.3, -0.2, 0.1, 0.05, 1.7);
        let w = |v: f64| (v * v + pp + 1.0f64).sqrt();
        let (wp, wk, wq) = (w(p), w(k), w(q));
        let (cp, sp, ck, sk) = ((wp * t).cos(), (wp * t).sin(), (wk * t).cos(), (wk * t).sin());
        let sum = |d| -> C {
            let mut acc = C::new(0.0, 0.0);
            for s in [1.0, -1.0] {
                for tau in [1.0, -1.0] {
                    acc += exact_coeff(d, s, tau, p, k, q, pp) * C::from_polar(1.0, (s * wp + tau * wk) * t);
                }
            }
            acc
        };
        let base = cp * ck + wq * wq * sp * sk / (wp * wk);
        assert!((sum(KernelDerivs::None) - base).norm() < 1e-14);
        let d0 = wp * wk * sp * sk + wq * wq * cp * ck;
        assert!((sum(KernelDerivs::D0D0) - d0).norm() < 1e-14);
        // ½(∂₀⊗∂₁ + ∂₁⊗∂₀) with left leg e^{ipX}, right leg e^{−ikX}.
        let d01 = 0.5
            * (C::new(0.0, -k) * (-wp * sp * ck + wq * wq * cp * sk / wk)
                + C::new(0.0, p) * (-wk * cp * sk + wq * wq * sp * ck / wp));
        assert!((sum(KernelDerivs::D0D1) - d01).norm() < 1e-14);
    }

    #[test]
    fn expansions_match_exact_coefficients_to_first_order() {
        // With momenta ~ √(m/β) the expansion error is second order in 1/(βm).
        let m = 1.0;
        for &(scale, tol) in &[(0.1, 3e-4), (0.05, 2e-5)] {
            let (p, k, q, pp) = (1.1 * scale, 0.9 * scale, 1.05 * scale, 0.8 * scale * scale);
            for d in [KernelDerivs::None, KernelDerivs::D0D0, KernelDerivs::D0D1] {
                for s in [1.0, -1.0] {
                    let e = slow_structure(d, s, m);
                    let approx = e.o0.add(&e.o1).eval(p, k, q, pp).re;
                    let exact = exact_coeff(d, s, -s, p, k, q, pp);
                    let lead = e.o0.eval(p, k, q, pp).re.abs();
                    assert!((approx - exact).abs() < tol * lead, "{d:?} {s}: {approx} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn moment_table_matches_real_gaussian() {
        // Diagonal real Gaussian: E[p²] = σ², E[p⁴] = 3σ⁴, mean shifts.
        let mut t = MomentTable::new();
        let cov = [[C::new(2.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.5, 0.0)]];
        let mean = [C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)];
        t.fill(&mean, &cov, 4);
        assert!((t.get(&[2, 0, 0]).re - 2.0).abs() < 1e-14);
        assert!((t.get(&[4, 0, 0]).re - 12.0).abs() < 1e-14);
        assert!((t.get(&[0, 2, 0]).re - 2.0).abs() < 1e-14);
        assert!((t.get(&[0, 3, 0]).re - 4.0).abs() < 1e-14);
        assert!((t.get(&[2, 0, 2]).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn det_branch_is_continuous() {
        let a = momentum_gaussian(3.0, 50.0, 1.0, 40.0, 1.0, -1.0);
        let d = det_inv_sqrt(&a);
        let (_, det) = inverse3(&a).unwrap();
        assert!((d * d * det - 1.0).norm() < 1e-12);
        let a0 = momentum_gaussian(3.0, 50.0, 1.0, 0.0, 1.0, -1.0);
        let d0 = det_inv_sqrt(&a0);
        assert!(d0.re > 0.0 && d0.im.abs() < 1e-15);
    }

    #[test]
    fn analytic_calibration_reproduces_kms() {
        // The residual is second order in 1/(βm): quadrupling β divides it by ~16.
        let s = spec_with(50.0, 200.0, 100.0);
        for obs in [ObservableKind::EnergyDensity, ObservableKind::WickSquare] {
            let e50 = calibrate(&s, obs, 0.0, Side::Left, 0.0).unwrap().rel_error;
            let e200 = calibrate(&s, obs, 0.0, Side::Right, 0.0).unwrap().rel_error;
            assert!(e50 < 5e-3, "{obs:?}: {e50}");
            let ratio = e50 / e200;
            assert!(ratio > 12.0 && ratio < 20.0, "{obs:?}: {e50} {e200}");
        }
        let c = calibrate(&s, ObservableKind::HeatCurrent, 0.0, Side::Left, 0.0).unwrap();
        assert!(c.pipeline.abs() < 1e-14 * c.exact.abs().max(1e-300) + 1e-30);
    }

    #[test]
    fn budget_thresholds_are_enforced() {
        let model = ModelSpec::new(4, 1.0, Family::Homogeneous, FieldKind::Complex).unwrap();
        let g = GluedStateSpec::new(
            model,
            ReservoirTriple::betas(Beta::Finite(1.0), Beta::Finite(2.0), Beta::Infinite),
            ProfileSpec::new(100.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(QuenchKernelSpec::new(g, ApproxBudget::default()), Err(Error::BudgetViolation(_))));
        let half = ApproxBudget { nonrel_dispersion: false, ..ApproxBudget::default() };
        assert!(matches!(QuenchKernelSpec::new(g, half), Err(Error::BudgetViolation(_))));
        assert_eq!(QuenchKernelSpec::new(g, ApproxBudget::exact()).unwrap().method().unwrap(), QuenchMethod::ExactBox);
    }

    #[test]
    fn half_energy_beta_halves_rho() {
        let b2 = half_energy_beta(1.0, 50.0).unwrap();
        let r1 = crate::kms::energy_density(1.0, ThermoParams::beta(50.0)).unwrap();
        let r2 = crate::kms::energy_density(1.0, ThermoParams::beta(b2)).unwrap();
        assert!((r2 / r1 - 0.5).abs() < 1e-10);
        assert!(b2 > 50.0 && b2 < 51.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn poly_product_is_pointwise(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, n in 0.0f64..1.0) {
            let x = eps(P, 1.3).add(&Poly::var(K).scale_re(0.7));
            let y = Poly::var(Q).mul(&Poly::perp2()).add(&Poly::constant(2.0));
            let lhs = x.mul(&y).eval(a, b, c, n);
            let rhs = x.eval(a, b, c, n) * y.eval(a, b, c, n);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
