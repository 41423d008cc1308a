//! Random decompositions into positive parts and linear maps, each turned
//! into a POVM with a reject outcome.

use npovm::bridge::{
    acceptance_bound_check, construct_povm, implementation_domain, verify_implementation, VerifyConfig,
};
use npovm::random::random_decomposition;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> npovm::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in 2..=4 {
        let dec = random_decomposition(d, &mut rng);
        let n = dec.induced_measurement()?;
        let ps = construct_povm(&dec)?;
        let dom = implementation_domain(&dec)?;
        let r = verify_implementation(&n, &ps, &dom, &VerifyConfig::default())?;
        let bound = acceptance_bound_check(&dec, &ps);
        println!(
            "d = {d}: {} outcomes, N is a POVM: {}, c = {:.4}, acceptance {:.4} (bound {:.4}), dim D = {}, ratio error {:.1e}",
            n.len(),
            n.is_povm(1e-10),
            ps.c,
            ps.acceptance(),
            bound.bound,
            dom.dimension(),
            r.max_ratio_error
        );
    }
    Ok(())
}
