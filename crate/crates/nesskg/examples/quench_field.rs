//! Energy-density and heat-current fields of the reference quench
//! (`β₁m = 50`, `ρ_{β₂} = ρ_{β₁}/2`, `am = 100√50`) on the default
//! 41 × 41 grid, normalised by the KMS(β₁) and NESS values.
use nesskg::ness::ObservableKind;
use nesskg::quench::{evolve_field, ratio_field, reference_quench_spec, GridSpec, Normalisation};
use std::time::Instant;

fn main() -> nesskg::Result<()> {
    let spec = reference_quench_spec()?;
    let grid = GridSpec::default();
    let t0 = Instant::now();
    let rho = ratio_field(&spec, &evolve_field(&spec, ObservableKind::EnergyDensity, &grid)?, Normalisation::KmsBeta1)?;
    println!("rho field: {:?}", t0.elapsed());
    let n1 = rho.x1.len();
    for (i0, x0) in rho.x0.iter().enumerate().step_by(10) {
        let row: Vec<String> = (0..n1).step_by(5).map(|i1| format!("{:.4}", rho.at(i0, i1))).collect();
        println!("x0 = {x0:4.1}a: {}", row.join(" "));
    }
    let mut worst = 0.0f64;
    for (i0, &x0) in rho.x0.iter().enumerate() {
        for (i1, &x1) in rho.x1.iter().enumerate() {
            if x1.abs() > x0 + 5.0 {
                let plateau = if x1 < 0.0 { 1.0 } else { 0.5 };
                worst = worst.max((rho.at(i0, i1) - plateau).abs());
            }
        }
    }
    println!("largest plateau deviation outside |x1| <= x0 + 5a: {worst:.3e}");
    let t1 = Instant::now();
    let j = ratio_field(&spec, &evolve_field(&spec, ObservableKind::HeatCurrent, &grid)?, Normalisation::Ness)?;
    println!("j1 field: {:?}", t1.elapsed());
    let centre = n1 / 2;
    for (i0, x0) in j.x0.iter().enumerate().step_by(5) {
        println!("x0 = {x0:4.1}a: j1/j1_N at x1 = 0: {:.4}", j.at(i0, centre));
    }
    Ok(())
}
