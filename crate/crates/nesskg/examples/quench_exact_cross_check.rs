//! Calibration residuals of the Gaussian-moment quench pipeline and a
//! point-by-point comparison with the exact periodic-box evolution at the
//! reference-quench parameters.
use nesskg::gluing::Side;
use nesskg::ness::ObservableKind;
use nesskg::quench::*;
use std::time::Instant;

fn main() -> nesskg::Result<()> {
    let spec = reference_quench_spec()?;
    let a = spec.glued.profile.a;
    println!("a = {a}, beta2 = {:?}", spec.glued.reservoirs.right.tp.beta);
    for obs in [ObservableKind::EnergyDensity, ObservableKind::WickSquare] {
        let start = Instant::now();
        let at_zero = calibrate(&spec, obs, 0.0, Side::Left, 0.0)?;
        let at_a = calibrate(&spec, obs, a, Side::Left, 0.0)?;
        let late = calibrate(&spec, obs, a, Side::Right, 8.0 * a)?;
        println!(
            "{obs:?}: calibration error a = 0 {:.3e}, a {:.3e}, t = 8a {:.3e} ({:.1?})",
            at_zero.rel_error,
            at_a.rel_error,
            late.rel_error,
            start.elapsed()
        );
    }
    let exact = QuenchKernelSpec::new(spec.glued, ApproxBudget::exact())?;
    let rho1 = 2.0 * nesskg::kms::energy_density(1.0, spec.glued.reservoirs.left.tp)?;
    for &(t, x) in &[(0.0, -8.0), (0.0, 0.0), (4.0, 0.0), (8.0, 1.0), (8.0, -2.0), (8.0, 8.0)] {
        for obs in [ObservableKind::EnergyDensity, ObservableKind::HeatCurrent] {
            let point = [t * a, x * a, 0.0, 0.0];
            let moments = observable_value(&spec, obs, &point)?;
            let reference = observable_value(&exact, obs, &point)?;
            println!(
                "x0 = {t}a, x1 = {x}a, {obs:?}: moments {:.8} exact {:.8} (difference {:.2e} of rho_beta1)",
                moments / rho1,
                reference / rho1,
                (moments - reference) / rho1
            );
        }
    }
    Ok(())
}
