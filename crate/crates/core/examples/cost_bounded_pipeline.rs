//! Starting from an N-POVM alone: choose the decomposition, then build and
//! check the post-selected POVM.

use npovm::bridge::{check_domain_conditions, cost_bounded_pipeline, verify_implementation, VerifyConfig};
use npovm::pt_example::PartialTransposeExample;
use npovm::random::pt_witness_npovm;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> npovm::Result<()> {
    let ex = PartialTransposeExample::new();
    let frame = PartialTransposeExample::computational_basis();
    let cond = check_domain_conditions(&ex.npovm(), &frame)?;
    println!("worked example: conditions hold {}, ball radius {:.4}", cond.hold(), cond.eps_max);
    let out = cost_bounded_pipeline(&ex.npovm(), &frame)?;
    for c in &out.completions {
        println!("  outcome {}: {:?}, delta {:.4}", c.label, c.rule, c.delta);
    }
    println!(
        "  dim' <= {}, dim D = {} >= {}, acceptance {:.4}",
        out.dim_prime_upper,
        out.domain.dimension(),
        out.dim_bound,
        out.postselected.acceptance()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..4 {
        let (n, frame) = pt_witness_npovm(&mut rng, i % 2 == 1);
        let out = cost_bounded_pipeline(&n, &frame)?;
        let r = verify_implementation(&n, &out.postselected, &out.domain, &VerifyConfig::default())?;
        println!(
            "witness {i}: dim' <= {}, dim D = {}, acceptance {:.4}, ratio error {:.1e}",
            out.dim_prime_upper,
            out.domain.dimension(),
            out.postselected.acceptance(),
            r.max_ratio_error
        );
    }
    Ok(())
}
