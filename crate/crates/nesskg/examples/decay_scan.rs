//! Large-time and large-distance decay of the thermal and NESS kernels:
//! fitted power-law exponents in time, along `x¹` and transverse to it, and
//! the uniformity of the `t^{−3/2}` envelope in the imaginary shift.

use nesskg::asymptotics::{decay_samples, decay_scan, shift_uniformity, DecayDirection, ReducedKernel};
use nesskg::quadrature::logspace;

fn main() -> nesskg::Result<()> {
    let (m, b1, b2) = (1.0, 1.0, 2.0);
    let times = logspace(50.0, 500.0, 12);

    let thermal = ReducedKernel::thermal(m, b1, 0.0);
    let fit = decay_scan(&thermal, DecayDirection::Time, &times)?;
    println!("thermal W, r = 0: exponent {:.4} ± {:.4}", fit.exponent, fit.stderr);

    for x1 in [1.0, 5.0] {
        let ness = ReducedKernel::ness(m, b1, b2, x1);
        let fit = decay_scan(&ness, DecayDirection::Time, &times)?;
        println!("NESS W, x1 = {x1}: time exponent {:.4} ± {:.4}", fit.exponent, fit.stderr);
    }

    let offsets = logspace(20.0, 200.0, 10);
    for t in [0.0, 1.0, 3.0] {
        let ness = ReducedKernel::ness(m, b1, b2, 0.0);
        let samples = decay_samples(&ness, DecayDirection::X1 { t }, &offsets)?;
        let tail: Vec<String> = samples.iter().map(|(x, w)| format!("{:.3e}", x * w)).collect();
        match decay_scan(&ness, DecayDirection::X1 { t }, &offsets) {
            Ok(fit) => println!("NESS W, t = {t}: x1 exponent {:.4} ± {:.4}; x1·|W| = [{}]", fit.exponent, fit.stderr, tail.join(", ")),
            Err(e) => println!("NESS W, t = {t}: x1 fit failed ({e}); x1·|W| = [{}]", tail.join(", ")),
        }
    }

    let transverse = logspace(20.0, 100.0, 8);
    let ness = ReducedKernel::ness(m, b1, b2, 0.0);
    let fit = decay_scan(&ness, DecayDirection::X2, &transverse)?;
    println!("NESS W, x2 direction: exponent {:.2}", fit.exponent);

    let (envelopes, spread) = shift_uniformity(m, b1, 0.0, 200.0, 16)?;
    for e in &envelopes {
        println!("u = {:.2}: t^(3/2)|Delta_+| envelope {:.6e}", e.u, e.bound);
    }
    println!("relative spread across u: {spread:.4}");
    Ok(())
}
