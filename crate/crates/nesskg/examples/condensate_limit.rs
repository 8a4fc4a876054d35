//! Condensate mode under the σ-maps: `e^{−iμt}[σ_i f](x⁰+t, x¹) → ½e^{iμx⁰}`.
//!
//! Prints the deviation from ½ at a few times, the fitted decay exponent for
//! a massive and a massless field, and the closed pole-integral check.

use nesskg::gluing::{pole_integral, sigma_condensate_decay, ProfileSpec, Side};
use nesskg::quadrature::logspace;
use nesskg::ModelSpec;

fn main() -> nesskg::Result<()> {
    let profile = ProfileSpec::new(1.0)?;
    let times = logspace(20.0, 400.0, 8);
    for (m, mu) in [(1.0, 1.0), (0.0, 0.0)] {
        let model = ModelSpec::homogeneous(m);
        for x1 in [0.0, 2.0] {
            let (samples, report) = match sigma_condensate_decay(&model, &profile, Side::Left, mu, 0.0, x1, &times) {
                Ok(v) => v,
                Err(e) => {
                    println!("m = {m}, x1 = {x1}: {e}");
                    continue;
                }
            };
            println!("m = {m}, x1 = {x1}: exponent {:.3} ± {:.3}", report.exponent, report.stderr);
            for (t, d) in samples {
                println!("  t = {t:8.2}  |dev| = {d:.6e}");
            }
        }
    }
    let v = pole_integral(1.0, 1e-8, 1.0)?;
    println!("pole integral (a = 1, eps = 1e-8): {v:.9}  (expected i*pi)");
    Ok(())
}
