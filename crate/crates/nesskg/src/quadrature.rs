//! Shared numerical kernels: adaptive Gauss–Kronrod quadrature on intervals
//! and half-lines, panel-wise oscillatory integration with Wynn-ε
//! acceleration, nested 2D quadrature, Gauss–Legendre rules, closed-form
//! Gaussian moments and power-law exponent fits.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and limits for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance on the integral.
    pub rel_tol: f64,
    /// Absolute tolerance on the integral.
    pub abs_tol: f64,
    /// Maximum number of interval bisections.
    pub max_subdivisions: usize,
    /// Oscillatory panels stop once a panel is below `tail_cut × running max`.
    pub tail_cut: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, max_subdivisions: 2000, tail_cut: 1e-14 }
    }
}

impl QuadratureSpec {
    pub fn with_tol(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }
}

/// Values that can be integrated: real or complex scalars.
pub trait QValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn norm(self) -> f64;
    /// Componentwise absolute value (used for the QUADPACK error heuristic).
    fn abs_parts(self) -> Self;
    fn is_finite(self) -> bool;
    /// Multiplicative inverse.
    fn recip(self) -> Self;
}

impl QValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn abs_parts(self) -> Self {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
}

impl QValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        self.re.abs() + self.im.abs()
    }
    fn abs_parts(self) -> Self {
        Complex64::new(self.re.abs(), self.im.abs())
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn recip(self) -> Self {
        self.inv()
    }
}

/// An integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

/// Integration domain for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Finite interval `[a, b]`.
    Interval(f64, f64),
    /// `[a, ∞)` mapped by `x = a + scale·u/(1−u)`.
    HalfLineUp { a: f64, scale: f64 },
    /// `(−∞, b]` mapped by `x = b − scale·u/(1−u)`.
    HalfLineDown { b: f64, scale: f64 },
    /// The whole real line, split at `centre` into two half-lines.
    RealLine { centre: f64, scale: f64 },
}

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980223048,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One 21-point Gauss–Kronrod panel on `[a, b]`: `(kronrod, error)`.
pub fn gk21<T: QValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[10];
    let mut resg = T::zero();
    let mut resabs = fc.abs_parts() * WGK[10];
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        resabs = resabs + (f1.abs_parts() + f2.abs_parts()) * WGK[j];
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = (fc - mean).abs_parts() * WGK[10];
    for j in 0..10 {
        resasc = resasc + ((fv1[j] - mean).abs_parts() + (fv2[j] - mean).abs_parts()) * WGK[j];
    }
    let resasc = resasc.norm() * h.abs();
    let resabs = resabs.norm() * h.abs();
    let mut err = ((resk - resg) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (resk * h, err)
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

/// Globally adaptive GK21 on a finite interval.
pub fn adaptive<T: QValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quad<T>> {
    adaptive_from(f, &[a, b], spec)
}

/// Globally adaptive GK21 starting from the given breakpoints (sorted).
pub fn adaptive_from<T: QValue, F: Fn(f64) -> T>(f: &F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Quad<T>> {
    let mut panels: Vec<Panel<T>> = Vec::with_capacity(breaks.len() + 16);
    for w in breaks.windows(2) {
        let (v, e) = gk21(f, w[0], w[1]);
        panels.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let mut evals = 21 * panels.len();
    let mut subdivisions = 0;
    loop {
        let mut total = T::zero();
        let mut err = 0.0;
        let mut mass = 0.0;
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            total = total + p.value;
            err += p.error;
            mass += p.value.norm();
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        if !total.is_finite() {
            return Err(Error::NonConvergence { estimate: f64::NAN, error: f64::INFINITY, subdivisions });
        }
        // Round-off floor: cancelling panels cannot be resolved below ~ε Σ|Iₖ|.
        let tol = spec.abs_tol.max(spec.rel_tol * total.norm()).max(1e-14 * mass);
        if err <= tol {
            return Ok(Quad { value: total, error: err, evaluations: evals });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence { estimate: total.norm(), error: err, subdivisions });
        }
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a.min(p.b) && mid < p.a.max(p.b)) {
            // Interval can no longer be split in floating point: accept.
            panels.push(p);
            let total = panels.iter().fold(T::zero(), |acc, q| acc + q.value);
            return Ok(Quad { value: total, error: err, evaluations: evals });
        }
        let (v1, e1) = gk21(f, p.a, mid);
        let (v2, e2) = gk21(f, mid, p.b);
        evals += 42;
        panels.push(Panel { a: p.a, b: mid, value: v1, error: e1 });
        panels.push(Panel { a: mid, b: p.b, value: v2, error: e2 });
        subdivisions += 1;
    }
}

/// Adaptive integration over a [`Domain`].
///
/// Half-lines are mapped onto `(0, 1)` by `x = a ± scale·u/(1−u)`; the
/// integrand must decay fast enough for the mapped integrand to vanish at
/// `u → 1` (Bose tails, Gaussians).
pub fn integrate<T: QValue, F: Fn(f64) -> T>(f: F, domain: Domain, spec: &QuadratureSpec) -> Result<Quad<T>> {
    integrate_ref(&f, domain, spec)
}

fn integrate_ref<T: QValue, F: Fn(f64) -> T>(f: &F, domain: Domain, spec: &QuadratureSpec) -> Result<Quad<T>> {
    match domain {
        Domain::Interval(a, b) => adaptive(f, a, b, spec),
        Domain::HalfLineUp { a, scale } => {
            let g = |u: f64| {
                if u >= 1.0 {
                    return T::zero();
                }
                let om = 1.0 - u;
                let x = a + scale * u / om;
                let v = f(x) * (scale / (om * om));
                if v.is_finite() {
                    v
                } else {
                    T::zero()
                }
            };
            adaptive(&g, 0.0, 1.0, spec)
        }
        Domain::HalfLineDown { b, scale } => {
            let g = |u: f64| {
                if u >= 1.0 {
                    return T::zero();
                }
                let om = 1.0 - u;
                let x = b - scale * u / om;
                let v = f(x) * (scale / (om * om));
                if v.is_finite() {
                    v
                } else {
                    T::zero()
                }
            };
            adaptive(&g, 0.0, 1.0, spec)
        }
        Domain::RealLine { centre, scale } => {
            let half = QuadratureSpec { abs_tol: 0.5 * spec.abs_tol, ..*spec };
            let up = integrate_ref(f, Domain::HalfLineUp { a: centre, scale }, &half)?;
            let down = integrate_ref(f, Domain::HalfLineDown { b: centre, scale }, &half)?;
            Ok(Quad {
                value: up.value + down.value,
                error: up.error + down.error,
                evaluations: up.evaluations + down.evaluations,
            })
        }
    }
}

/// Complex-valued 1D integration over a [`Domain`], returning the value only.
pub fn integrate_1d<F: Fn(f64) -> Complex64>(f: F, domain: Domain, spec: &QuadratureSpec) -> Result<Complex64> {
    integrate(f, domain, spec).map(|q| q.value)
}

/// Real-valued 1D integration over a [`Domain`], returning the value only.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, domain: Domain, spec: &QuadratureSpec) -> Result<f64> {
    integrate(f, domain, spec).map(|q| q.value)
}

/// Nested adaptive 2D quadrature `∫_{dom_y} dy ∫_{dom_z} dz f(y, z)`.
///
/// The inner integral is computed to a tighter tolerance than the outer one
/// so that inner noise does not stall outer refinement.
pub fn integrate_2d<T: QValue, F: Fn(f64, f64) -> T>(
    f: F,
    dom_y: Domain,
    dom_z: Domain,
    spec: &QuadratureSpec,
) -> Result<Quad<T>> {
    let inner_spec = QuadratureSpec { rel_tol: 0.1 * spec.rel_tol, abs_tol: 0.1 * spec.abs_tol, ..*spec };
    let failure = std::cell::Cell::new(None);
    let evals = std::cell::Cell::new(0usize);
    let outer = |y: f64| match integrate(|z| f(y, z), dom_z, &inner_spec) {
        Ok(q) => {
            evals.set(evals.get() + q.evaluations);
            q.value
        }
        Err(e) => {
            failure.set(Some(e));
            T::zero()
        }
    };
    let q = integrate(outer, dom_y, spec)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(Quad { value: q.value, error: q.error, evaluations: evals.get() })
}

/// Wynn's ε-algorithm on a sequence of partial sums.
///
/// Returns the accelerated limit estimate (last entry of the highest even
/// column) and the difference to the previous estimate as an error proxy.
pub fn wynn_epsilon<T: QValue>(sums: &[T]) -> (T, f64) {
    let n = sums.len();
    match n {
        0 => return (T::zero(), f64::INFINITY),
        1 => return (sums[0], f64::INFINITY),
        2 => return (sums[1], (sums[1] - sums[0]).norm()),
        _ => {}
    }
    let mut prev: Vec<T> = vec![T::zero(); n + 1];
    let mut cur: Vec<T> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut best_prev = sums[n - 2];
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff.norm() == 0.0 || !diff.is_finite() {
                return (best, (best - best_prev).norm());
            }
            next.push(prev[i + 1] + diff.recip());
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            best_prev = if cur.len() > 1 { cur[cur.len() - 2] } else { best };
            best = cur[cur.len() - 1];
        }
    }
    (best, (best - best_prev).norm())
}

/// Integral of an oscillatory integrand over `[a, ∞)` panel by panel.
///
/// Each panel has width `period/2` (a half-period of the dominant
/// oscillation) and is integrated adaptively; the partial sums are
/// accelerated with Wynn's ε-algorithm. Integration stops when the panel
/// contributions fall below `tail_cut` times the running maximum (damped
/// integrands) or when the accelerated estimate has stabilised.
pub fn integrate_oscillatory<T: QValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    period: f64,
    spec: &QuadratureSpec,
) -> Result<Quad<T>> {
    let h = 0.5 * period;
    let panel_spec = QuadratureSpec { abs_tol: 0.01 * spec.abs_tol, ..*spec };
    let mut sum = T::zero();
    let mut sums: Vec<T> = Vec::new();
    let mut running_max: f64 = 0.0;
    let mut error = 0.0;
    let mut evals = 0;
    let mut last_est = T::zero();
    let mut stable = 0;
    let max_panels = 200_000usize;
    for k in 0..max_panels {
        let lo = a + h * k as f64;
        let q = adaptive(&f, lo, lo + h, &panel_spec)?;
        evals += q.evaluations;
        error += q.error;
        sum = sum + q.value;
        let mag = q.value.norm();
        running_max = running_max.max(mag);
        if mag <= spec.tail_cut * running_max || mag <= 0.01 * spec.abs_tol {
            // Require two consecutive negligible panels to avoid stopping at a node.
            if k > 2 && sums.last().map(|s: &T| (*s - sum).norm() <= spec.tail_cut * running_max).unwrap_or(false) {
                return Ok(Quad { value: sum, error, evaluations: evals });
            }
        }
        sums.push(sum);
        if sums.len() >= 12 && sums.len() % 2 == 0 {
            let window = &sums[sums.len().saturating_sub(40)..];
            let (est, e) = wynn_epsilon(window);
            let tol = spec.abs_tol.max(spec.rel_tol * est.norm());
            if e <= tol && (est - last_est).norm() <= tol {
                stable += 1;
                if stable >= 2 {
                    return Ok(Quad { value: est, error: error + e, evaluations: evals });
                }
            } else {
                stable = 0;
            }
            last_est = est;
        }
    }
    Err(Error::NonConvergence { estimate: sum.norm(), error, subdivisions: max_panels })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` (Newton iteration on `Pₙ`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Cached Gauss–Legendre rule on `[−1, 1]` with at least `n` nodes.
///
/// Sizes are rounded up to `16·2ᵏ` (at most 4096 nodes) so that repeated
/// calls inside integrands do not recompute the nodes.
pub fn gauss_legendre_cached(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    use std::sync::OnceLock;
    const TIERS: usize = 9;
    static CACHE: [OnceLock<(Vec<f64>, Vec<f64>)>; TIERS] = [const { OnceLock::new() }; TIERS];
    let mut k = 0;
    while k + 1 < TIERS && (16usize << k) < n {
        k += 1;
    }
    CACHE[k].get_or_init(|| gauss_legendre(16usize << k))
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (x.iter().map(|&t| c + h * t).collect(), w.iter().map(|&t| h * t).collect())
}

/// `∫ xⁿ G_a(x) e^{ikx} dx` for the normalised Gaussian `G_a` of width `a`.
///
/// Uses the recursion `M_{n+1} = a²(ik Mₙ + n M_{n−1})` (Gaussian integration
/// by parts) from `M₀ = e^{−a²k²/2}`.
pub fn gaussian_moment(n: usize, a: f64, k: Complex64) -> Complex64 {
    let a2 = a * a;
    let m0 = (-0.5 * a2 * k * k).exp();
    if n == 0 {
        return m0;
    }
    let ik = Complex64::new(0.0, 1.0) * k;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = m0;
    for j in 0..n {
        let next = a2 * (ik * cur + prev * j as f64);
        prev = cur;
        cur = next;
    }
    cur
}

/// Result of a power-law fit `y ≈ C t^{exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayReport {
    pub exponent: f64,
    pub stderr: f64,
    /// Fitted prefactor `C`.
    pub prefactor: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Least-squares slope of `log y` against `log t`, with its standard error.
///
/// Requires at least five samples, strictly increasing positive `t` and
/// positive `y`. Constant data is a valid input and yields exponent 0.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<DecayReport> {
    if samples.len() < 5 {
        return Err(Error::DegenerateFit(format!("need at least 5 samples, got {}", samples.len())));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::DegenerateFit("sample times must be strictly increasing".into()));
        }
    }
    if samples.iter().any(|&(t, y)| !(t > 0.0) || !(y > 0.0) || !y.is_finite()) {
        return Err(Error::DegenerateFit("samples must have t > 0 and finite y > 0".into()));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (rss / (n - 2.0) / sxx).sqrt();
    Ok(DecayReport {
        exponent: slope,
        stderr,
        prefactor: intercept.exp(),
        window: (samples[0].0, samples[samples.len() - 1].0),
        n_points: samples.len(),
    })
}

/// `n` logarithmically spaced points between `a` and `b` inclusive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn bose_integrals() {
        let f = |x: f64| if x == 0.0 { 1.0 } else { x / x.exp_m1() };
        let v = integrate_real(f, Domain::HalfLineUp { a: 0.0, scale: 1.0 }, &spec()).unwrap();
        assert!((v - PI * PI / 6.0).abs() < 1e-8 * PI * PI / 6.0);
        let f = |x: f64| if x == 0.0 { 0.0 } else { x.powi(3) / x.exp_m1() };
        let v = integrate_real(f, Domain::HalfLineUp { a: 0.0, scale: 3.0 }, &spec()).unwrap();
        assert!((v - PI.powi(4) / 15.0).abs() < 1e-8 * PI.powi(4) / 15.0);
        let v = integrate_real(|_| 0.0, Domain::Interval(0.0, 1.0), &spec()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn two_dimensional_examples() {
        let g = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let line = Domain::RealLine { centre: 0.0, scale: 1.0 };
        let v = integrate_2d(|y, z| g(y) * g(z), line, line, &spec()).unwrap().value;
        assert!((v - 1.0).abs() < 1e-8);
        let up = Domain::HalfLineUp { a: 0.0, scale: 1.0 };
        let v = integrate_2d(|y: f64, z: f64| (-y - z).exp(), up, up, &spec()).unwrap().value;
        assert!((v - 1.0).abs() < 1e-8);
        let a = 2.5;
        let ga = |x: f64| (-0.5 * x * x / (a * a)).exp() / ((2.0 * PI).sqrt() * a);
        let upa = Domain::HalfLineUp { a: 0.0, scale: a };
        let v = integrate_2d(|y, z| ga(y) * ga(z), upa, upa, &spec()).unwrap().value;
        assert!((v - 0.25).abs() < 1e-8);
    }

    #[test]
    fn gaussian_moment_examples() {
        let a = 1.7;
        assert!((gaussian_moment(0, a, Complex64::new(0.0, 0.0)) - 1.0).norm() < 1e-15);
        assert!((gaussian_moment(2, a, Complex64::new(0.0, 0.0)) - a * a).norm() < 1e-14);
        let k = Complex64::new(0.8, 0.0);
        assert!((gaussian_moment(0, a, k) - (-0.5 * a * a * 0.64f64).exp()).norm() < 1e-15);
    }

    #[test]
    fn oscillatory_slow_decay() {
        // ∫₀^∞ sin x / x dx = π/2 converges only conditionally.
        let f = |x: f64| if x == 0.0 { 1.0 } else { x.sin() / x };
        let q = integrate_oscillatory(f, 0.0, 2.0 * PI, &QuadratureSpec::with_tol(1e-10, 1e-12)).unwrap();
        assert!((q.value - PI / 2.0).abs() < 1e-8, "{}", q.value);
    }

    #[test]
    fn oscillatory_damped() {
        // ∫₀^∞ e^{−x/20} cos(x) dx = (1/20)/((1/20)² + 1).
        let f = |x: f64| (-x / 20.0).exp() * x.cos();
        let q = integrate_oscillatory(f, 0.0, 2.0 * PI, &spec()).unwrap();
        let exact = 0.05 / (0.0025 + 1.0);
        assert!((q.value - exact).abs() < 1e-9, "{} vs {}", q.value, exact);
    }

    #[test]
    fn legendre_rule_exactness() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        let (x, w) = gauss_legendre_on(5, 1.0, 3.0);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((s - 26.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn power_law_examples() {
        let ts: Vec<f64> = (1..=10).map(|i| 10.0 * i as f64).collect();
        let s: Vec<_> = ts.iter().map(|&t| (t, 1.0 / t)).collect();
        assert!((fit_power_law(&s).unwrap().exponent + 1.0).abs() < 1e-10);
        let s: Vec<_> = ts.iter().map(|&t| (t, 3.0 * t.powf(-1.5))).collect();
        assert!((fit_power_law(&s).unwrap().exponent + 1.5).abs() < 1e-10);
        let s: Vec<_> = ts.iter().map(|&t| (t, 2.0)).collect();
        assert!(fit_power_law(&s).unwrap().exponent.abs() < 1e-12);
        assert!(fit_power_law(&s[..4]).is_err());
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // Partial sums of ln 2 = 1 − 1/2 + 1/3 − …
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=15)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        let (est, _) = wynn_epsilon(&sums);
        assert!((est - 2f64.ln()).abs() < 1e-10, "{est}");
    }
}
