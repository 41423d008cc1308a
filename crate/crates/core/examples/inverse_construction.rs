//! From a POVM with a reject outcome back to an N-POVM, and what happens when
//! the rejection condition fails.

use npovm::bridge::{
    check_rejection_condition, construct_povm, implementation_domain, infer_c0, invert_postselection,
    VerifyConfig, REJECTION_TOL,
};
use npovm::pt_example::PartialTransposeExample;
use npovm::Error;

fn main() -> npovm::Result<()> {
    let ex = PartialTransposeExample::new();
    let dec = ex.decomposition();
    let ps = construct_povm(&dec)?;
    let k = implementation_domain(&dec)?.subspace;
    let cfg = VerifyConfig::default();
    let reject = ps.reject_label.as_str();

    let c0 = infer_c0(&ps.povm, reject, &k)?;
    println!("inferred c0 = {c0}");
    let inv = invert_postselection(&ps.povm, reject, &k, None, REJECTION_TOL, &cfg)?;
    // Agreement is only required on K.
    for o in inv.npovm.outcomes() {
        let diff = &o.effect - ex.npovm().effect(&o.label).unwrap();
        println!(
            "N[{}]: difference on K {:.1e}, off K {:.4}",
            o.label,
            k.project(&diff)?.hs_norm(),
            diff.hs_norm()
        );
    }

    for c0 in [1.5, 3.0] {
        let cond = check_rejection_condition(&ps.povm, reject, &k, c0, REJECTION_TOL, &cfg)?;
        println!("c0 = {c0}: projection norm {:.4}, holds {}", cond.projection_norm, cond.holds);
    }
    match invert_postselection(&ps.povm, reject, &k, Some(3.0), REJECTION_TOL, &cfg) {
        Err(Error::RejectionConditionFailed { .. }) => println!("c0 = 3 is refused"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
