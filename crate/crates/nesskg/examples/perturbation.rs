//! First-order perturbative quantities: the split-propagator decomposition
//! of the steady state, emergence of split propagators from σ-maps, the
//! fish-term constant, the first-order tadpole, spectral-amplitude decay and
//! the entropy-production invariance.

use std::time::Instant;

use nesskg::evolution::{BoxOptions, ProbePair};
use nesskg::gluing::{GluedStateSpec, ProfileSpec};
use nesskg::ness::{delta_plus_ness, NessKernelSpec};
use nesskg::perturbation::*;
use nesskg::quadrature::logspace;
use nesskg::{Beta, ModelSpec, ReservoirTriple};

fn main() -> nesskg::Result<()> {
    let (m, b1, b2) = (1.0, 1.0, 2.0);

    let sep = [2.0, 0.7, 0.3, 0.0];
    let right = SplitPropagator::new(1, Beta::Finite(b1), m)?;
    let left = SplitPropagator::new(-1, Beta::Finite(b2), m)?;
    let split = split_prop(&right, &sep, 0.3)? + split_prop(&left, &sep, 0.3)?;
    let ness = delta_plus_ness(&NessKernelSpec::homogeneous(m, b1, b2), &sep, &[0.0; 4], 0.3)?;
    println!("split sum {split:.12e}\nNESS      {ness:.12e}");

    let glued = GluedStateSpec::new(
        ModelSpec::homogeneous(m),
        ReservoirTriple::betas(Beta::Finite(b1), Beta::Finite(b2), Beta::Finite(b2)),
        ProfileSpec::new(0.5)?,
    )?;
    let probe = ProbePair { x1: 1.0, y1: 0.0 };
    let times = logspace(20.0, 200.0, 8);
    let opts = BoxOptions::default();
    for (geometry, u) in [(SplitGeometry::EqualTime, 0.0), (SplitGeometry::EqualTime, 0.5), (SplitGeometry::FixedSource, 0.0)] {
        let start = Instant::now();
        let conv = split_convergence_fit(&glued, 1, b1, probe, &times, u, geometry, &opts)?;
        println!("{geometry:?}, u = {u}: exponent {:.4} ± {:.4} ({:.1?})", conv.report.exponent, conv.report.stderr, start.elapsed());
    }

    println!("C2 integrand at q = (0.5, 0, 0): {:.3e}", c2_integrand([0.5, 0.0, 0.0], m));
    println!("tadpole steady value: {:.12e}", tadpole_first_order(b1, b2, m)?);
    let sec = secular_terms(b1, b2, m)?;
    println!("secular candidates: {:.6e} + {:.6e} = {:.3e}", sec.s2_plus, sec.s2_minus, sec.sum());
    let taus = [1e-3, 1e-2];
    println!("entropy production |dE/dτ|: {:.3e} (mismatched {:.3e})", ep_invariance_check(b1, b2, m, &taus)?, ep_mismatch_check(b1, b2, m, &taus)?);

    let start = Instant::now();
    let spec2 = SpectralAmplitudeSpec::new(2, b1, 1, m);
    let (fit, estimates) = spectral_decay_fit(&spec2, &logspace(20.0, 100.0, 6))?;
    for e in &estimates {
        println!("n = 2, t = {:.1}: |A| = {:.4e} ± {:.1e}", e.t, e.value.norm(), e.std_error);
    }
    println!("n = 2 exponent {:.3} ± {:.3} ({:.1?})", fit.exponent, fit.stderr, start.elapsed());
    let env_fit = spectral_envelope_fit(&spec2, &logspace(20.0, 100.0, 5), 8)?;
    println!("n = 2 beat envelope exponent {:.3} ± {:.3}", env_fit.exponent, env_fit.stderr);
    let spec4 = SpectralAmplitudeSpec { n: 4, ..spec2 };
    for t in [20.0, 50.0] {
        let a2 = spectral_amplitude(&spec2, t)?.value.norm();
        let a4 = spectral_amplitude(&spec4, t)?.value.norm();
        println!("t = {t}: |A_4|/|A_2| = {:.3e}", a4 / a2);
    }
    Ok(())
}
