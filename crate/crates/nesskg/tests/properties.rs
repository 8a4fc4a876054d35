//! Property-based invariants across the public API.

use nesskg::cli::{format_number, Command, JobConfig};
use nesskg::gluing::{chi, GluedStateSpec, ProfileSpec, Side};
use nesskg::model::{bose, signed_bose};
use nesskg::ness::{w_ness, NessKernelSpec};
use nesskg::quadrature::{fit_power_law, logspace};
use nesskg::{Beta, ModelSpec, ReservoirTriple, ThermoParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `n₋ − n₊ = 1` and the Boltzmann ratio `n₋/n₊ = e^{β(ω−μ)}`.
    #[test]
    fn signed_bose_detailed_balance(beta in 0.05f64..20.0, mu in -1.0f64..1.0, gap in 1e-3f64..30.0) {
        let tp = ThermoParams::new(Beta::Finite(beta), mu);
        let omega = mu + gap / beta;
        let (plus, minus) = (signed_bose(tp, 1, omega), signed_bose(tp, -1, omega));
        prop_assert!((minus - plus - 1.0).abs() < 1e-12 * minus);
        prop_assert!((plus * (beta * (omega - mu)).exp() - minus).abs() < 1e-11 * minus);
        prop_assert!(bose(tp, omega) > 0.0);
    }

    /// The two profile functions partition unity everywhere.
    #[test]
    fn profiles_partition_unity(a in 0.1f64..100.0, x1 in -1e3f64..1e3) {
        let p = ProfileSpec::new(a).unwrap();
        let sum = chi(&p, Side::Left, x1) + chi(&p, Side::Right, x1);
        prop_assert!((sum - 1.0).abs() < 1e-14);
        prop_assert!((0.0..=1.0).contains(&chi(&p, Side::Left, x1)));
    }

    /// Exact power laws are recovered by the log-log fit.
    #[test]
    fn power_law_fit_recovers_exponent(k in -5.0f64..2.0, c in 1e-6f64..1e6, lo in 1.0f64..50.0) {
        let samples: Vec<(f64, f64)> = logspace(lo, 10.0 * lo, 7).into_iter().map(|t| (t, c * t.powf(k))).collect();
        let r = fit_power_law(&samples).unwrap();
        prop_assert!((r.exponent - k).abs() < 1e-9);
        prop_assert!((r.prefactor / c - 1.0).abs() < 1e-8);
    }

    /// CSV numbers round-trip exactly.
    #[test]
    fn csv_numbers_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(format_number(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }

    /// Admissible temperature orderings are accepted by the job parser, and a
    /// bridge hotter than one of the reservoirs (β₃ < max(β₁, β₂)) is rejected.
    #[test]
    fn bridge_ordering_is_enforced(b1 in 0.1f64..10.0, b2 in 0.1f64..10.0, f in 0.05f64..2.0) {
        let b3 = f * b1.max(b2);
        let text = format!("[model]\nmass = 1\n[reservoirs]\nbeta1 = {b1}\nbeta2 = {b2}\nbeta3 = {b3}\n[profile]\na = 1\n");
        let parsed = JobConfig::from_str(&text);
        prop_assert_eq!(parsed.is_ok(), f >= 1.0);
        let direct = GluedStateSpec::new(
            ModelSpec::homogeneous(1.0),
            ReservoirTriple::betas(Beta::Finite(b1), Beta::Finite(b2), Beta::Finite(b3)),
            ProfileSpec::new(1.0).unwrap(),
        );
        prop_assert_eq!(direct.is_ok(), f >= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The NESS Bose part is Hermitian: `W(x, y) = conj W(y, x)`.
    #[test]
    fn ness_kernel_is_hermitian(
        b1 in 0.5f64..3.0, b2 in 0.5f64..3.0,
        t in -2.0f64..2.0, x in -2.0f64..2.0, y in -2.0f64..2.0, z in -1.0f64..1.0,
    ) {
        let spec = NessKernelSpec::homogeneous(1.0, b1, b2);
        let p = [t, x, z, 0.0];
        let q = [0.0, y, 0.0, 0.3];
        let a = w_ness(&spec, &p, &q, 0.0).unwrap();
        let b = w_ness(&spec, &q, &p, 0.0).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-8 * a.norm().max(1e-3));
    }
}

#[test]
fn every_command_name_round_trips() {
    for c in Command::ALL {
        assert_eq!(c.name().parse::<Command>().unwrap(), c);
    }
}
