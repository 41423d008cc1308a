//! The two-qubit partial-transpose N-POVM: build its post-selected POVM and
//! check that it tells two non-orthogonal states apart.

use npovm::bridge::{construct_povm, implementation_domain, verify_implementation, VerifyConfig};
use npovm::pt_example::PartialTransposeExample;

fn main() -> npovm::Result<()> {
    let ex = PartialTransposeExample::new();
    let n = ex.npovm();
    let ps = construct_povm(&ex.decomposition())?;
    println!("c = {}, acceptance = {}", ps.c, ps.acceptance());
    for o in ps.povm.outcomes() {
        println!("M[{}] min eigenvalue {:.3}", o.label, o.effect.min_eigenvalue());
    }

    for (name, rho) in [("rho0", &ex.rho0), ("rho1", &ex.rho1)] {
        let p = n.expectations(rho.matrix())?;
        println!("{name}: Tr rho N = {p:?}");
    }
    println!("overlap Tr(rho0 rho1) = {}", ex.rho0.matrix().hs_inner(ex.rho1.matrix())?);

    let dom = implementation_domain(&ex.decomposition())?;
    let r = verify_implementation(&n, &ps, &dom, &VerifyConfig::default())?;
    println!(
        "domain dimension {}, max ratio error {:.1e} over {} states",
        dom.dimension(),
        r.max_ratio_error,
        r.samples_used
    );
    Ok(())
}
