//! Exact finite-time evolution of the glued two-point function on a periodic
//! box, used for the convergence scans `Δ_{+,G}(t) → Δ_{+,N}`.
//!
//! For the homogeneous model the transverse momentum `P` is conserved, so at
//! equal transverse coordinates the problem reduces to a family of 1D
//! Klein–Gordon fields of mass `M = √(m² + P²)`:
//!
//! `W_G(t; x, x') = ∫d^{d−2}P/(2π)^{d−2} Σ_{ij} Σ_{a∈{0,1}} ∫dq/(2π) ŵ^a_{ij}(q)
//! F^a_i(q, x, t) conj(F^a_j(q, x', t))`,
//!
//! where `ŵ⁰ = b/ω`, `ŵ¹ = b ω` are the thermal Cauchy data (`μ = 0`) of the
//! block state `(i, j)` and `F^a_i(q, x, t) = ∫du K_a(t, x−u) χ_i(u) e^{iqu}`
//! is the solution at `(t, x)` generated by the data `χ_i(u) e^{iqu}` through
//! the propagators `K₀ = cos(ωt)` and `K₁ = sin(ωt)/ω`.
//!
//! On a periodic box of length `L` and `N` points all of these are spectral
//! sums evaluated with FFTs. The box version of `χ₁` has a second, equally
//! smooth transition at `±L/2`; the box is chosen so that this transition,
//! and the periodic images of the thermal correlations, lie outside the past
//! light cone of the probe points, which makes the box result agree with the
//! infinite-volume evolution up to exponentially small terms.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::gluing::{GluedStateSpec, PsiKind, Side};
use crate::model::{bose, Beta, Family, ThermoParams};
use crate::ness::ObservableKind;
use crate::quadrature::{self, gauss_legendre_on, DecayReport};
use crate::special::normal_cdf;

/// Numerical settings of the box evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxOptions {
    /// Latest time the box must accommodate.
    pub t_max: f64,
    /// Extra margin added to the half-length of the box.
    pub margin: f64,
    /// Bose factors are dropped where `β(ω − m) ` exceeds this cut.
    pub thermal_cut: f64,
    /// Gauss–Legendre nodes per transverse panel.
    pub transverse_nodes: usize,
}

impl Default for BoxOptions {
    fn default() -> Self {
        Self { t_max: 200.0, margin: 10.0, thermal_cut: 36.0, transverse_nodes: 16 }
    }
}

/// Equal-time probe pair `(x¹, x'¹)` at common transverse coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePair {
    pub x1: f64,
    pub y1: f64,
}

/// Precomputed box geometry, profiles and FFT plans for one glued state.
pub struct BoxEvolution {
    glued: GluedStateSpec,
    half_len: f64,
    n: usize,
    chi1: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Transverse nodes `(P, weight)` including the measure.
    transverse: Vec<(f64, f64)>,
}

fn finite_betas(g: &GluedStateSpec) -> Vec<f64> {
    let r = &g.reservoirs;
    [r.left.tp.beta, r.right.tp.beta, r.bridge.beta].iter().filter_map(|b| b.finite()).collect()
}

impl BoxEvolution {
    /// Sets up the box for the glued state, probe pair and options.
    ///
    /// Requirements: homogeneous family, `μ ≡ 0`, `ψ = Θ`, finite `β₁, β₂`.
    pub fn new(glued: &GluedStateSpec, probe: ProbePair, opts: &BoxOptions) -> Result<Self> {
        let model = glued.model;
        if model.family != Family::Homogeneous {
            return Err(Error::Unsupported("box evolution is implemented for the homogeneous family".into()));
        }
        if glued.profile.psi != PsiKind::Heaviside {
            return Err(Error::Unsupported("box evolution uses the sharp switch psi = Heaviside".into()));
        }
        let r = &glued.reservoirs;
        if [r.left.tp.mu, r.right.tp.mu, r.bridge.mu].iter().any(|&mu| mu != 0.0) {
            return Err(Error::Unsupported("box evolution is implemented for mu = 0".into()));
        }
        if r.left.tp.beta.is_infinite() || r.right.tp.beta.is_infinite() {
            return Err(Error::Unsupported("box evolution needs finite reservoir temperatures".into()));
        }
        if !(opts.t_max >= 0.0) {
            return Err(Error::ConstraintViolation(format!("t_max >= 0 (got {})", opts.t_max)));
        }
        if model.m == 0.0 && model.d < 4 {
            return Err(Error::RegularityViolation("massless box evolution needs d >= 4".into()));
        }
        let m = model.m;
        let a = glued.profile.a;
        let betas = finite_betas(glued);
        let beta_min = betas.iter().cloned().fold(f64::INFINITY, f64::min);
        let beta_max = betas.iter().cloned().fold(0.0, f64::max);
        // Thermal correlation length: at most 1/m, at most β/2π.
        let corr = (1.0 / m.max(1e-300)).min(beta_max / (2.0 * PI));
        let reach = probe.x1.abs().max(probe.y1.abs());
        let half_len = opts.t_max + reach + 12.0 * a + 30.0 * corr + opts.margin;
        let len = 2.0 * half_len;
        let q_th = (opts.thermal_cut / beta_min + m).powi(2) - m * m;
        let q_max = q_th.max(0.0).sqrt() + 10.0 / a;
        let mut n = 256usize;
        while PI * (n as f64) / len < q_max {
            n *= 2;
        }
        let dx = len / n as f64;
        let chi1 = (0..n)
            .map(|j| {
                let u = -half_len + j as f64 * dx;
                // Step down at 0, step up again at the box edge ±L/2.
                normal_cdf((u - half_len) / a) + normal_cdf((u + half_len) / a) - normal_cdf(u / a)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);

        // Transverse measure: d = 2 none, d = 3 ∫dP/2π over ℝ, d = 4 ∫P dP/2π.
        let transverse = match model.d {
            2 => vec![(0.0, 1.0)],
            3 | 4 => {
                let p_cut = ((opts.thermal_cut / beta_min + m).powi(2) - m * m).max(0.0).sqrt();
                let edges = [0.0, 0.05, 0.15, 0.35, 0.6, 1.0].map(|f| f * p_cut);
                let mut nodes = Vec::new();
                for w in edges.windows(2) {
                    let (x, wt) = gauss_legendre_on(opts.transverse_nodes, w[0], w[1]);
                    for (p, wp) in x.into_iter().zip(wt) {
                        let measure = if model.d == 3 { 2.0 / (2.0 * PI) } else { p / (2.0 * PI) };
                        nodes.push((p, wp * measure));
                    }
                }
                nodes
            }
            d => return Err(Error::Unsupported(format!("box evolution supports d in {{2, 3, 4}} (got {d})"))),
        };
        Ok(Self { glued: *glued, half_len, n, chi1, fwd, inv, transverse })
    }

    /// Number of grid points of the box.
    pub fn grid_points(&self) -> usize {
        self.n
    }

    /// Box length `L`.
    pub fn length(&self) -> f64 {
        2.0 * self.half_len
    }

    fn momentum(&self, idx: usize) -> f64 {
        let j = if idx < self.n / 2 { idx as f64 } else { idx as f64 - self.n as f64 };
        2.0 * PI * j / self.length()
    }

    /// `(F^a_1, F^a_2)(q_n, x, t)` for all box momenta.
    fn leg(&self, mass: f64, t: f64, x: f64, a: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        self.leg_with(mass, t, x, a, LegDeriv::None)
    }

    /// Leg functions with an optional time or space derivative at `(t, x)`.
    fn leg_with(&self, mass: f64, t: f64, x: f64, a: usize, deriv: LegDeriv) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.n;
        let len = self.length();
        let dx = len / n as f64;
        let sign = |idx: usize| if idx % 2 == 0 { 1.0 } else { -1.0 };
        let prop = |p: f64| -> Complex64 {
            let w = (p * p + mass * mass).sqrt();
            let (c, s) = ((w * t).cos(), (w * t).sin());
            let base = match (a, deriv) {
                (0, LegDeriv::Time) => -w * s,
                (0, _) => c,
                (_, LegDeriv::Time) => c,
                (_, _) => {
                    if w > 0.0 {
                        s / w
                    } else {
                        t
                    }
                }
            };
            match deriv {
                LegDeriv::Space => Complex64::new(0.0, p * base),
                _ => Complex64::new(base, 0.0),
            }
        };
        // g(u_j) = K_a(t, x − u_j) = (1/L) Σ_n c_a(p_n) e^{ip_n(x − u_j)}.
        let mut g: Vec<Complex64> = (0..n)
            .map(|idx| {
                let p = self.momentum(idx);
                prop(p) * Complex64::from_polar(sign(idx) / len, p * x)
            })
            .collect();
        self.fwd.process(&mut g);
        for (v, c) in g.iter_mut().zip(&self.chi1) {
            *v *= *c;
        }
        self.inv.process(&mut g);
        let mut f1 = Vec::with_capacity(n);
        let mut f2 = Vec::with_capacity(n);
        for (idx, v) in g.into_iter().enumerate() {
            let p = self.momentum(idx);
            let one = v * (dx * sign(idx));
            let full = prop(p) * Complex64::from_polar(1.0, p * x);
            f1.push(one);
            f2.push(full - one);
        }
        (f1, f2)
    }

    /// `Σ_a Σ_ij ŵ^a_ij A^a_i conj(B^a_j)` summed over box momenta, `/L`.
    fn bilinear(&self, mass: f64, legs_a: &[[Vec<Complex64>; 2]; 2], legs_b: &[[Vec<Complex64>; 2]; 2]) -> Complex64 {
        let g = &self.glued;
        let blocks = [
            [g.block(Side::Left, Side::Left), g.block(Side::Left, Side::Right)],
            [g.block(Side::Right, Side::Left), g.block(Side::Right, Side::Right)],
        ];
        let mut total = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for idx in 0..self.n {
                let q = self.momentum(idx);
                let w = (q * q + mass * mass).sqrt();
                for i in 0..2 {
                    for j in 0..2 {
                        let b = block_bose(blocks[i][j], w);
                        if b == 0.0 {
                            continue;
                        }
                        let wt = if a == 0 { b / w } else { b * w };
                        total += legs_a[a][i][idx] * legs_b[a][j][idx].conj() * wt;
                    }
                }
            }
        }
        total / self.length()
    }

    /// Reduced 1D coincident observable kernel at transverse mass `M`.
    fn reduced_observable(&self, mass: f64, t: f64, x: f64, obs: ObservableKind) -> f64 {
        let legs = |deriv: LegDeriv| -> [[Vec<Complex64>; 2]; 2] {
            let (a1, a2) = self.leg_with(mass, t, x, 0, deriv);
            let (b1, b2) = self.leg_with(mass, t, x, 1, deriv);
            [[a1, a2], [b1, b2]]
        };
        match obs {
            ObservableKind::WickSquare => {
                let f = legs(LegDeriv::None);
                self.bilinear(mass, &f, &f).re
            }
            ObservableKind::EnergyDensity => {
                let f = legs(LegDeriv::None);
                let ft = legs(LegDeriv::Time);
                let fx = legs(LegDeriv::Space);
                0.5 * (self.bilinear(mass, &ft, &ft).re + self.bilinear(mass, &fx, &fx).re + mass * mass * self.bilinear(mass, &f, &f).re)
            }
            ObservableKind::HeatCurrent => {
                // Physical flux −½(∂₀⊗∂₁ + ∂₁⊗∂₀)W at coincidence.
                let ft = legs(LegDeriv::Time);
                let fx = legs(LegDeriv::Space);
                -self.bilinear(mass, &ft, &fx).re
            }
        }
    }

    /// Reduced 1D glued kernel `W_G(t; x, x')` at transverse mass `M`.
    fn reduced(&self, mass: f64, t: f64, probe: ProbePair) -> f64 {
        let len = self.length();
        let g = &self.glued;
        let blocks = [
            [g.block(Side::Left, Side::Left), g.block(Side::Left, Side::Right)],
            [g.block(Side::Right, Side::Left), g.block(Side::Right, Side::Right)],
        ];
        let mut total = 0.0;
        for a in 0..2 {
            let (fx1, fx2) = self.leg(mass, t, probe.x1, a);
            let (fy1, fy2) = if probe.y1 == probe.x1 { (fx1.clone(), fx2.clone()) } else { self.leg(mass, t, probe.y1, a) };
            let fx = [&fx1, &fx2];
            let fy = [&fy1, &fy2];
            for idx in 0..self.n {
                let q = self.momentum(idx);
                let w = (q * q + mass * mass).sqrt();
                for i in 0..2 {
                    for j in 0..2 {
                        let b = block_bose(blocks[i][j], w);
                        if b == 0.0 {
                            continue;
                        }
                        let wt = if a == 0 { b / w } else { b * w };
                        total += wt * (fx[i][idx] * fy[j][idx].conj()).re;
                    }
                }
            }
        }
        total / len
    }

    /// Reduced 1D NESS kernel at equal times: `∫dq/(2π) ½(b₁+b₂)/ω cos(q r)`,
    /// evaluated with the same box sum.
    fn reduced_ness(&self, mass: f64, probe: ProbePair) -> f64 {
        let r = &self.glued.reservoirs;
        let len = self.length();
        let dr = probe.x1 - probe.y1;
        (0..self.n)
            .map(|idx| {
                let q = self.momentum(idx);
                let w = (q * q + mass * mass).sqrt();
                0.5 * (block_bose(r.left.tp, w) + block_bose(r.right.tp, w)) / w * (q * dr).cos()
            })
            .sum::<f64>()
            / len
    }

    /// Reduced 1D initial kernel `Σ_ij χ_i(x)χ_j(x') w_ij(x − x')` (t = 0 oracle).
    fn reduced_initial(&self, mass: f64, probe: ProbePair) -> f64 {
        let len = self.length();
        let g = &self.glued;
        let dr = probe.x1 - probe.y1;
        let prof = &g.profile;
        let cx = [crate::gluing::chi(prof, Side::Left, probe.x1), crate::gluing::chi(prof, Side::Right, probe.x1)];
        let cy = [crate::gluing::chi(prof, Side::Left, probe.y1), crate::gluing::chi(prof, Side::Right, probe.y1)];
        let sides = [Side::Left, Side::Right];
        let mut total = 0.0;
        for idx in 0..self.n {
            let q = self.momentum(idx);
            let w = (q * q + mass * mass).sqrt();
            for i in 0..2 {
                for j in 0..2 {
                    total += cx[i] * cy[j] * block_bose(g.block(sides[i], sides[j]), w) / w * (q * dr).cos();
                }
            }
        }
        total / len
    }

    fn transverse_sum(&self, f: impl Fn(f64) -> f64 + Sync) -> f64 {
        let m = self.glued.model.m;
        // Collected before summing so the reduction order does not depend on
        // the thread schedule.
        let parts: Vec<_> = self.transverse.par_iter().map(|&(p, wt)| wt * f((m * m + p * p).sqrt())).collect();
        parts.into_iter().sum()
    }

    /// Real-scalar kernel of `ρ`, `j₁` or the Wick square of the evolved glued
    /// state at `(t, x¹)`; `ρ = ½[∂₀⊗∂₀ + ∇⊗∇ + m²]W_G` and
    /// `j₁ = −½(∂₀⊗∂₁ + ∂₁⊗∂₀)W_G` at coincident points.
    pub fn glued_observable(&self, t: f64, x1: f64, obs: ObservableKind) -> f64 {
        self.transverse_sum(|mass| self.reduced_observable(mass, t, x1, obs))
    }

    /// Equal-time glued kernel `W_G(t; x, x')` (vacuum-subtracted, real-scalar).
    pub fn glued_w(&self, t: f64, probe: ProbePair) -> f64 {
        self.transverse_sum(|mass| self.reduced(mass, t, probe))
    }

    /// Equal-time NESS kernel `W_N(x, x') = ½(W_{β₁} + W_{β₂})(x − x')` on the same grid.
    pub fn ness_w(&self, probe: ProbePair) -> f64 {
        self.transverse_sum(|mass| self.reduced_ness(mass, probe))
    }

    /// Initial kernel `Σ_ij χ_i(x)χ_j(x') W_{β_ij}(x − x')`, the `t = 0` value.
    pub fn initial_w(&self, probe: ProbePair) -> f64 {
        self.transverse_sum(|mass| self.reduced_initial(mass, probe))
    }

    /// Weights `(A, B)` of `Δ_{+,β}(T) = ∫dq/(2π)/(2ω) [A e^{iωT'} + B e^{−iωT'}]`
    /// after the imaginary shift: `A = b e^{ωu}`, `B = (1+b) e^{−ωu}`.
    fn shifted_weights(beta: f64, u: f64, w: f64) -> (f64, f64) {
        let b = 1.0 / (beta * w).exp_m1();
        let a = if b > 0.0 { (b.ln() + w * u).exp() } else { 0.0 };
        (a, (1.0 + b) * (-w * u).exp())
    }

    /// Reduced `[σ_side Δ_{+,β}]((t, x¹), (t_y + iu, y¹))` at transverse mass `M`.
    #[allow(clippy::too_many_arguments)]
    fn reduced_sigma_thermal(&self, mass: f64, side: Side, beta: f64, u: f64, t: f64, x1: f64, t_y: f64, y1: f64) -> Complex64 {
        let (f0l, f0r) = self.leg(mass, t, x1, 0);
        let (f1l, f1r) = self.leg(mass, t, x1, 1);
        let (f0, f1) = match side {
            Side::Left => (f0l, f1l),
            Side::Right => (f0r, f1r),
        };
        let mut total = Complex64::new(0.0, 0.0);
        for idx in 0..self.n {
            let q = self.momentum(idx);
            let w = (q * q + mass * mass).sqrt();
            let (a, b) = Self::shifted_weights(beta, u, w);
            // Cauchy data of z ↦ Δ_{+,β}((0, z), (t_y + iu, y¹)), coefficient of e^{iqz}.
            let ea = Complex64::from_polar(a, -w * t_y);
            let eb = Complex64::from_polar(b, w * t_y);
            let shift = Complex64::from_polar(1.0 / (2.0 * w), -q * y1);
            let c0 = (ea + eb) * shift;
            let c1 = Complex64::new(0.0, w) * (ea - eb) * shift;
            total += c0 * f0[idx] + c1 * f1[idx];
        }
        total / self.length()
    }

    /// Reduced split propagator `Δ^{(s)}_{+,β}(τ − iu, r¹)` on the same box
    /// momenta: modes with `s q > 0` (`Θ(0) = 1/2`).
    fn reduced_split(&self, mass: f64, s: f64, beta: f64, u: f64, tau: f64, r1: f64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for idx in 0..self.n {
            let q = self.momentum(idx);
            let theta = if s * q > 0.0 {
                1.0
            } else if q == 0.0 {
                0.5
            } else {
                continue;
            };
            let w = (q * q + mass * mass).sqrt();
            let (a, b) = Self::shifted_weights(beta, u, w);
            let phase = Complex64::from_polar(1.0, w * tau - q * r1);
            total += theta / (2.0 * w) * (a * phase + b * phase.conj());
        }
        total / self.length()
    }

    fn transverse_sum_c(&self, f: impl Fn(f64) -> Complex64 + Sync) -> Complex64 {
        let m = self.glued.model.m;
        // Collected before summing so the reduction order does not depend on
        // the thread schedule.
        let parts: Vec<_> = self.transverse.par_iter().map(|&(p, wt)| wt * f((m * m + p * p).sqrt())).collect();
        parts.into_iter().sum()
    }

    /// `Δ_{+,β,s}(x, y⁰ + iu, y) = [σ_s Δ_{+,β}](x, y⁰ + iu, y)` at common
    /// transverse coordinates, `x = (t, x¹)`, `y = (t_y, y¹)`; `σ_{+1} = σ₁`
    /// (left data) and `σ_{−1} = σ₂`.
    #[allow(clippy::too_many_arguments)]
    pub fn sigma_thermal(&self, s: i8, beta: f64, u: f64, t: f64, x1: f64, t_y: f64, y1: f64) -> Complex64 {
        let side = if s > 0 { Side::Left } else { Side::Right };
        self.transverse_sum_c(|mass| self.reduced_sigma_thermal(mass, side, beta, u, t, x1, t_y, y1))
    }

    /// Split propagator `Δ^{(s)}_{+,β}` evaluated with the box momentum sum.
    pub fn split_on_box(&self, s: i8, beta: f64, u: f64, tau: f64, r1: f64) -> Complex64 {
        let s = if s > 0 { 1.0 } else { -1.0 };
        self.transverse_sum_c(|mass| self.reduced_split(mass, s, beta, u, tau, r1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LegDeriv {
    None,
    Time,
    Space,
}

fn block_bose(tp: ThermoParams, w: f64) -> f64 {
    match tp.beta {
        Beta::Infinite => 0.0,
        Beta::Finite(_) => {
            let b = bose(tp, w);
            if b.is_finite() {
                b
            } else {
                0.0
            }
        }
    }
}

/// Result of a convergence scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceScan {
    /// `(t, W_G(t))` samples.
    pub glued: Vec<(f64, f64)>,
    /// `(t, |W_G(t) − W_N|)` samples.
    pub diff: Vec<(f64, f64)>,
    /// NESS value `W_N` at the probe.
    pub ness: f64,
    /// `t → ∞` limit of `W_G` extrapolated from `L + c₁/t + c₂/t²`.
    pub limit: f64,
    /// Power-law fit of `diff`.
    pub report: DecayReport,
}

/// Least-squares extrapolation of `y(t) ≈ L + c₁/t + c₂/t²`; returns `L`.
pub fn extrapolate_limit(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::DegenerateFit("extrapolation needs at least 3 samples".into()));
    }
    // Normal equations of the 3-parameter linear model in (1, 1/t, 1/t²).
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    let t_ref = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    for &(t, y) in samples {
        let basis = [1.0, t_ref / t, (t_ref / t).powi(2)];
        for i in 0..3 {
            atb[i] += basis[i] * y;
            for j in 0..3 {
                ata[i][j] += basis[i] * basis[j];
            }
        }
    }
    let m = nalgebra::Matrix3::from_fn(|i, j| ata[i][j]);
    let rhs = nalgebra::Vector3::from_column_slice(&atb);
    let sol = m.lu().solve(&rhs).ok_or_else(|| Error::DegenerateFit("singular extrapolation system".into()))?;
    Ok(sol[0])
}

/// `|W_G(t; x, x') − W_N(x, x')|` at an equal-time probe for each `t`, with
/// its power-law fit and the extrapolated limit of `W_G`.
///
/// `Δ_{+,G} − Δ_{+,N} = W_G − W_N` because every block state shares the
/// same vacuum part and `Σ_i σ_i = 1`.
pub fn convergence_scan(glued: &GluedStateSpec, probe: ProbePair, times: &[f64], opts: &BoxOptions) -> Result<ConvergenceScan> {
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    let opts = BoxOptions { t_max: opts.t_max.max(t_max), ..*opts };
    let engine = BoxEvolution::new(glued, probe, &opts)?;
    let ness = engine.ness_w(probe);
    let glued_vals: Vec<(f64, f64)> = times.iter().map(|&t| (t, engine.glued_w(t, probe))).collect();
    let diff: Vec<(f64, f64)> = glued_vals.iter().map(|&(t, w)| (t, (w - ness).abs())).collect();
    let report = quadrature::fit_power_law(&diff)?;
    let limit = extrapolate_limit(&glued_vals)?;
    Ok(ConvergenceScan { glued: glued_vals, diff, ness, limit, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::ProfileSpec;
    use crate::kms::{self, ThermalKernelSpec};
    use crate::model::{ModelSpec, ReservoirTriple};

    fn spec(b1: f64, b2: f64, b3: Beta, a: f64) -> GluedStateSpec {
        GluedStateSpec::new(
            ModelSpec::homogeneous(1.0),
            ReservoirTriple::betas(Beta::Finite(b1), Beta::Finite(b2), b3),
            ProfileSpec::new(a).unwrap(),
        )
        .unwrap()
    }

    fn opts(t_max: f64) -> BoxOptions {
        BoxOptions { t_max, ..BoxOptions::default() }
    }

    #[test]
    fn initial_value_matches_profile_oracle() {
        // At t = 0 the evolved kernel equals Σ χ_i χ_j W_ij, computed from kms.
        let g = spec(1.0, 2.0, Beta::Finite(3.0), 1.0);
        let probe = ProbePair { x1: -0.4, y1: 0.9 };
        let e = BoxEvolution::new(&g, probe, &opts(5.0)).unwrap();
        let evolved = e.glued_w(0.0, probe);
        let direct = e.initial_w(probe);
        let w = |b: f64| {
            let s = ThermalKernelSpec::new(ModelSpec::homogeneous(1.0), ThermoParams::beta(b));
            kms::w_kernel(&s, &[0.0, probe.x1, 0.0, 0.0], &[0.0, probe.y1, 0.0, 0.0]).unwrap().re
        };
        let p = &g.profile;
        let (l1, r1) = (crate::gluing::chi(p, Side::Left, probe.x1), crate::gluing::chi(p, Side::Right, probe.x1));
        let (l2, r2) = (crate::gluing::chi(p, Side::Left, probe.y1), crate::gluing::chi(p, Side::Right, probe.y1));
        let oracle = l1 * l2 * w(1.0) + r1 * r2 * w(2.0) + (l1 * r2 + r1 * l2) * w(3.0);
        assert!((evolved - oracle).abs() < 1e-9 * oracle.abs(), "{evolved} vs {oracle}");
        assert!((direct - oracle).abs() < 1e-9 * oracle.abs(), "{direct} vs {oracle}");
    }

    #[test]
    fn ness_value_is_mean_of_thermal() {
        let g = spec(1.0, 2.0, Beta::Infinite, 1.0);
        let probe = ProbePair { x1: 0.0, y1: 0.7 };
        let e = BoxEvolution::new(&g, probe, &opts(5.0)).unwrap();
        let ns = crate::ness::NessKernelSpec::homogeneous(1.0, 1.0, 2.0);
        let oracle = crate::ness::w_ness(&ns, &[0.0, 0.0, 0.0, 0.0], &[0.0, 0.7, 0.0, 0.0], 0.0).unwrap().re;
        let v = e.ness_w(probe);
        assert!((v - oracle).abs() < 1e-9 * oracle.abs(), "{v} vs {oracle}");
    }

    #[test]
    fn equal_temperatures_are_stationary() {
        // β₁ = β₂ = β₃: the glued state is the KMS state, constant in time.
        let g = spec(1.0, 1.0, Beta::Finite(1.0), 1.0);
        let probe = ProbePair { x1: 0.3, y1: -0.2 };
        let e = BoxEvolution::new(&g, probe, &opts(30.0)).unwrap();
        let w0 = e.glued_w(0.0, probe);
        let w1 = e.glued_w(25.0, probe);
        assert!((w0 - w1).abs() < 1e-11 * w0.abs(), "{w0} vs {w1}");
    }

    #[test]
    fn causality_far_from_interface() {
        // Far left of the interface, W_G stays the β₁ value until the light cone arrives.
        let g = spec(1.0, 2.0, Beta::Infinite, 1.0);
        let probe = ProbePair { x1: -40.0, y1: -40.0 };
        let e = BoxEvolution::new(&g, probe, &opts(20.0)).unwrap();
        let w = kms::wick_coincident(1.0, ThermoParams::beta(1.0)).unwrap();
        for t in [0.0, 10.0, 20.0] {
            let v = e.glued_w(t, probe);
            assert!((v - w).abs() < 1e-9 * w, "t={t}: {v} vs {w}");
        }
    }

    #[test]
    fn observables_at_t0_and_far_left() {
        // Far from the interface the observables equal the β₁ KMS values.
        let g = spec(1.0, 2.0, Beta::Infinite, 1.0);
        let e = BoxEvolution::new(&g, ProbePair { x1: -40.0, y1: -40.0 }, &opts(10.0)).unwrap();
        let tp = ThermoParams::beta(1.0);
        let rho = kms::energy_density(1.0, tp).unwrap();
        let w = kms::wick_coincident(1.0, tp).unwrap();
        for t in [0.0, 10.0] {
            let r = e.glued_observable(t, -40.0, ObservableKind::EnergyDensity);
            let ww = e.glued_observable(t, -40.0, ObservableKind::WickSquare);
            let j = e.glued_observable(t, -40.0, ObservableKind::HeatCurrent);
            assert!((r - rho).abs() < 1e-9 * rho, "{r} vs {rho}");
            assert!((ww - w).abs() < 1e-9 * w, "{ww} vs {w}");
            assert!(j.abs() < 1e-9 * rho, "{j}");
        }
    }

    #[test]
    fn heat_current_flows_from_hot_to_cold() {
        let g = spec(1.0, 2.0, Beta::Infinite, 1.0);
        let e = BoxEvolution::new(&g, ProbePair { x1: 0.0, y1: 0.0 }, &opts(60.0)).unwrap();
        let ns = crate::ness::NessKernelSpec::homogeneous(1.0, 1.0, 2.0);
        let jn = crate::ness::ness_observable_kernel(&ns, ObservableKind::HeatCurrent).unwrap();
        let j = e.glued_observable(60.0, 0.0, ObservableKind::HeatCurrent);
        assert!(jn > 0.0 && j > 0.0);
        assert!((j / jn - 1.0).abs() < 0.1, "{j} vs {jn}");
    }

    #[test]
    fn extrapolation_recovers_limit() {
        let s: Vec<(f64, f64)> = [20.0, 40.0, 80.0, 160.0].iter().map(|&t| (t, 2.0 + 3.0 / t - 5.0 / (t * t))).collect();
        assert!((extrapolate_limit(&s).unwrap() - 2.0).abs() < 1e-10);
    }
}
