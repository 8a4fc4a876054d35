//! Physical parameters shared by every module: the model, reservoir data,
//! dispersion, Bose factors and the admissibility rules for glued states.
//!
//! Units: every quantity is dimensionless in units of the mass `m`
//! (lengths and times in `1/m`), or in units of `β₁` when `m = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Inverse temperature. The vacuum `β = ∞` is an explicit tag so that vacuum
/// branches are exact rather than the limit of a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    /// `Some(β)` for a finite inverse temperature.
    pub fn finite(self) -> Option<f64> {
        match self {
            Beta::Finite(b) => Some(b),
            Beta::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }

    /// `self ≤ other` in the extended order with `∞` on top.
    pub fn le(self, other: Beta) -> bool {
        match (self, other) {
            (_, Beta::Infinite) => true,
            (Beta::Infinite, Beta::Finite(_)) => false,
            (Beta::Finite(a), Beta::Finite(b)) => a <= b,
        }
    }

    /// The larger of two inverse temperatures.
    pub fn max(self, other: Beta) -> Beta {
        if self.le(other) {
            other
        } else {
            self
        }
    }
}

impl std::fmt::Display for Beta {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinite => write!(f, "inf"),
        }
    }
}

/// Inverse temperature and chemical potential of one KMS state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoParams {
    pub beta: Beta,
    pub mu: f64,
}

impl ThermoParams {
    pub fn new(beta: Beta, mu: f64) -> Self {
        Self { beta, mu }
    }

    /// Finite `β` with `μ = 0`.
    pub fn beta(beta: f64) -> Self {
        Self { beta: Beta::Finite(beta), mu: 0.0 }
    }

    /// The vacuum (`β = ∞`, `μ = 0`).
    pub fn vacuum() -> Self {
        Self { beta: Beta::Infinite, mu: 0.0 }
    }

    /// Charge-conjugate parameters (`μ → −μ`).
    pub fn conjugate(self) -> Self {
        Self { beta: self.beta, mu: -self.mu }
    }
}

/// Potential in the `x¹` direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// No potential: plane-wave modes.
    Homogeneous,
    /// Self-adjoint extension of `−∂₁²` producing the transmission phase `e^{iδ}` at `x¹ = 0`.
    PhaseShift { delta: f64 },
    /// Repulsive point interaction `g δ(x¹)`, `g > 0`.
    DeltaPotential { g: f64 },
}

/// Whether the field is a complex (charged) or a real scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Complex,
    Real,
}

impl FieldKind {
    /// Factor relating the physical observables to the real-scalar kernel
    /// expressions: `2 Re(∂Φ̄ ∂Φ)` doubles every quadratic observable.
    pub fn observable_factor(self) -> f64 {
        match self {
            FieldKind::Complex => 2.0,
            FieldKind::Real => 1.0,
        }
    }
}

/// Spacetime dimension, mass, potential family and field kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub d: u32,
    pub m: f64,
    pub family: Family,
    pub field_kind: FieldKind,
}

impl ModelSpec {
    /// Checked constructor.
    pub fn new(d: u32, m: f64, family: Family, field_kind: FieldKind) -> Result<Self> {
        let spec = Self { d, m, family, field_kind };
        spec.validate()?;
        Ok(spec)
    }

    /// Homogeneous complex field in `d = 4` with mass `m`.
    pub fn homogeneous(m: f64) -> Self {
        Self { d: 4, m, family: Family::Homogeneous, field_kind: FieldKind::Complex }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::ConstraintViolation(format!("d >= 2 (got d = {})", self.d)));
        }
        if !(self.m >= 0.0) || !self.m.is_finite() {
            return Err(Error::ConstraintViolation(format!("m >= 0 (got m = {})", self.m)));
        }
        match self.family {
            Family::DeltaPotential { g } if !(g > 0.0) => {
                Err(Error::ConstraintViolation(format!("g > 0 for the delta potential (got g = {g})")))
            }
            Family::PhaseShift { delta } if !delta.is_finite() => {
                Err(Error::ConstraintViolation("finite phase shift".into()))
            }
            Family::Homogeneous => Ok(()),
            _ if self.d != 4 => Err(Error::Unsupported(
                "inhomogeneous families are implemented for d = 4 only".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// A reservoir: KMS parameters plus condensate amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reservoir {
    pub tp: ThermoParams,
    pub c: Complex64,
}

impl Reservoir {
    pub fn new(tp: ThermoParams) -> Self {
        Self { tp, c: Complex64::new(0.0, 0.0) }
    }

    pub fn with_condensate(tp: ThermoParams, c: Complex64) -> Self {
        Self { tp, c }
    }
}

/// Left (`β₁, μ₁, c₁`), right (`β₂, μ₂, c₂`) and bridge (`β₃, μ₃`) reservoirs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirTriple {
    pub left: Reservoir,
    pub right: Reservoir,
    pub bridge: ThermoParams,
}

impl ReservoirTriple {
    /// Condensate-free triple.
    pub fn new(left: ThermoParams, right: ThermoParams, bridge: ThermoParams) -> Self {
        Self { left: Reservoir::new(left), right: Reservoir::new(right), bridge }
    }

    /// Condensate-free triple at `μ = 0` with the given inverse temperatures.
    pub fn betas(b1: Beta, b2: Beta, b3: Beta) -> Self {
        Self::new(ThermoParams::new(b1, 0.0), ThermoParams::new(b2, 0.0), ThermoParams::new(b3, 0.0))
    }
}

/// Which part of the field algebra the glued state is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityClass {
    /// All three constituent states are states on the full algebra.
    FullAlgebra,
    /// Only spatial derivatives `∂ᵢΦ` have well-defined correlations.
    DerivativeSubalgebraOnly,
}

/// `ω_p = √(|p|² + m²)`.
pub fn dispersion(p: [f64; 3], m: f64) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + m * m).sqrt()
}

/// Bose factor `b_{β,μ}(ω) = 1/(e^{β(ω−μ)} − 1)`.
///
/// Evaluated as `1/expm1(β(ω−μ))`, which stays accurate when the exponent is
/// tiny. Negative exponents are allowed (sign-extended evaluation); at `β = ∞`
/// the result is the limit `0` for `ω > μ` and `−1` for `ω < μ`.
pub fn bose_factor(tp: ThermoParams, omega: f64) -> Result<f64> {
    let e = omega - tp.mu;
    match tp.beta {
        Beta::Infinite => {
            if e > 0.0 {
                Ok(0.0)
            } else if e < 0.0 {
                Ok(-1.0)
            } else {
                Err(Error::Pole { omega, mu: tp.mu })
            }
        }
        Beta::Finite(beta) => {
            let x = beta * e;
            if x == 0.0 {
                Err(Error::Pole { omega, mu: tp.mu })
            } else {
                Ok(1.0 / x.exp_m1())
            }
        }
    }
}

/// Bose factor for `ω > μ` without error plumbing; returns `+∞` at the pole.
#[inline]
pub fn bose(tp: ThermoParams, omega: f64) -> f64 {
    match tp.beta {
        Beta::Infinite => 0.0,
        Beta::Finite(beta) => 1.0 / (beta * (omega - tp.mu)).exp_m1(),
    }
}

/// Mode weight of the thermal Wightman function for `s = ±1`.
///
/// For `s = +1` this is `b_{β,μ}(ω)` (weight of `e^{+iω(x⁰−y⁰)}`), for
/// `s = −1` it is `1 + b_{β,μ}(ω)` (weight of `e^{−iω(x⁰−y⁰)}`). At `μ = 0`
/// it coincides with `s·b(sω)`; for `μ ≠ 0` both frequency signs carry the
/// same `ω − μ`, which keeps the commutator state independent and the
/// domination ordering monotone in `(β, μ)`.
#[inline]
pub fn signed_bose(tp: ThermoParams, s: i8, omega: f64) -> f64 {
    if s > 0 {
        bose(tp, omega)
    } else {
        1.0 + bose(tp, omega)
    }
}

fn violation(msg: impl Into<String>) -> Error {
    Error::ConstraintViolation(msg.into())
}

/// Checks the admissibility of a reservoir triple and classifies the regularity.
///
/// Enforced: `0 ≤ β₁ ≤ β₃`, `0 ≤ β₂ ≤ β₃`, `μ₃ ≤ μ₁ ≤ m`, `μ₃ ≤ μ₂ ≤ m`;
/// condensates require `μ₁ = μ₂ = ±m`, a complex field and the full algebra;
/// the real field forbids `μ ≠ 0`. The ordering conditions are exactly the
/// monotonicity that makes the bridge state dominated by both reservoirs.
/// There is no lower bound on `μ₃` beyond `μ₃ ≤ min(μ₁, μ₂)`.
pub fn validate_reservoirs(spec: &ModelSpec, r: &ReservoirTriple) -> Result<RegularityClass> {
    spec.validate()?;
    let (t1, t2, t3) = (r.left.tp, r.right.tp, r.bridge);
    for (name, tp) in [("beta1", t1), ("beta2", t2), ("beta3", t3)] {
        if let Beta::Finite(b) = tp.beta {
            if !(b >= 0.0) || !b.is_finite() {
                return Err(violation(format!("{name} >= 0 (got {b})")));
            }
        }
        if !tp.mu.is_finite() {
            return Err(violation(format!("finite chemical potential for {name}")));
        }
    }
    if !t1.beta.le(t3.beta) {
        return Err(violation(format!("beta1 <= beta3 (beta1 = {}, beta3 = {})", t1.beta, t3.beta)));
    }
    if !t2.beta.le(t3.beta) {
        return Err(violation(format!("beta2 <= beta3 (beta2 = {}, beta3 = {})", t2.beta, t3.beta)));
    }
    let m = spec.m;
    if t1.mu > m {
        return Err(violation(format!("mu1 <= m (mu1 = {}, m = {m})", t1.mu)));
    }
    if t2.mu > m {
        return Err(violation(format!("mu2 <= m (mu2 = {}, m = {m})", t2.mu)));
    }
    if t3.mu > t1.mu {
        return Err(violation(format!("mu3 <= mu1 (mu3 = {}, mu1 = {})", t3.mu, t1.mu)));
    }
    if t3.mu > t2.mu {
        return Err(violation(format!("mu3 <= mu2 (mu3 = {}, mu2 = {})", t3.mu, t2.mu)));
    }
    if spec.field_kind == FieldKind::Real && [t1.mu, t2.mu, t3.mu].iter().any(|&mu| mu != 0.0) {
        return Err(violation("mu = 0 for a real field"));
    }

    let max_mu = t1.mu.max(t2.mu).max(t3.mu);
    let full = (m > 0.0 && m - max_mu > 0.0 && spec.d >= 2)
        || (m > 0.0 && m - max_mu == 0.0 && spec.d >= 3)
        || (m == 0.0 && max_mu == 0.0 && spec.d >= 4);
    let class = if full { RegularityClass::FullAlgebra } else { RegularityClass::DerivativeSubalgebraOnly };

    let has_condensate = r.left.c.norm() > 0.0 || r.right.c.norm() > 0.0;
    if has_condensate {
        if spec.field_kind == FieldKind::Real {
            return Err(violation("no condensate for a real field"));
        }
        if !(t1.mu == t2.mu && (t1.mu == m || t1.mu == -m)) {
            return Err(violation(format!(
                "condensate requires mu1 = mu2 = +-m (mu1 = {}, mu2 = {}, m = {m})",
                t1.mu, t2.mu
            )));
        }
        if class != RegularityClass::FullAlgebra {
            return Err(violation("condensates require the full algebra (lowdim conditions)"));
        }
    }
    Ok(class)
}
