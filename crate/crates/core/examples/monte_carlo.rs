//! Sampling a post-selected POVM and comparing frequencies with the
//! N-POVM's predictions.

use npovm::measurement::simulate_postselected;
use npovm::pt_example::{PartialTransposeExample, REJECT_LABEL};

fn main() -> npovm::Result<()> {
    let ex = PartialTransposeExample::new();
    let povm = ex.povm();
    for (seed, (name, rho)) in [("rho0", &ex.rho0), ("rho1", &ex.rho1)].into_iter().enumerate() {
        let r = simulate_postselected(&povm, REJECT_LABEL, rho, 100_000, seed as u64)?;
        let sigma = (r.expected_acceptance * (1.0 - r.expected_acceptance) / r.shots as f64).sqrt();
        println!(
            "{name}: accepted {}/{} ({:.2} sigma from {}), conditional {:?}",
            r.accepted,
            r.shots,
            (r.acceptance_rate - r.expected_acceptance).abs() / sigma,
            r.expected_acceptance,
            r.conditional_freqs
        );
    }
    Ok(())
}
