//! Unambiguous discrimination of linearly independent pure states, and the
//! N-POVM that does it without an inconclusive outcome.

use nalgebra::{DMatrix, DVector};
use npovm::asd::{
    asd_measurement, asd_to_npovm, conditional_discrimination_error, covariant_family,
    discrimination_error, dual_basis, max_uniform_c, symmetric_group_s3, CommutativeGroupRep,
    PureStateFamily, INCONCLUSIVE,
};
use npovm::bridge::VerifyConfig;
use npovm::C64;

fn main() -> npovm::Result<()> {
    let s = 0.6;
    let family = PureStateFamily::new(vec![
        DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
        DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, 0.8)]),
    ])?;
    let dual = dual_basis(&family)?;
    let c = max_uniform_c(&dual);
    let m = asd_measurement(&dual, &[c, c])?;
    println!("two states, overlap {s}: c = {c:.4}, P(inconclusive) on each = {:.4}", 1.0 - c);
    println!("  conditional error {:.1e}", conditional_discrimination_error(&m, INCONCLUSIVE, &family)?);
    let inv = asd_to_npovm(&family, &dual, &[c, c], &VerifyConfig::default())?;
    println!("  N-POVM error {:.1e}", discrimination_error(&inv.npovm, &family)?);

    let z2 = CommutativeGroupRep::new(
        DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]),
        vec![C64::new(1.6f64.sqrt(), 0.0), C64::new(0.4f64.sqrt(), 0.0)],
    )?;
    let cov = covariant_family(&z2.to_blocks()?)?;
    println!("Z2 orbit: c = {:.4}, t_inv = {:.4}, acceptance spread {:.1e}", cov.c, cov.t_inv, cov.acceptance_spread);

    let f_std = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.3, 0.2), C64::new(-0.4, 0.0), C64::new(0.8, 0.0)]);
    let s3 = symmetric_group_s3(C64::new(1.2, 0.0), C64::new(0.7, 0.0), f_std)?;
    let cov = covariant_family(&s3)?;
    let inv = asd_to_npovm(&cov.family, &cov.dual, &vec![cov.c; cov.family.dim()], &VerifyConfig::default())?;
    println!(
        "S3 orbit in dimension {}: c = {:.4}, t_inv = {:.4}, N-POVM error {:.1e}",
        cov.family.dim(),
        cov.c,
        cov.t_inv,
        discrimination_error(&inv.npovm, &cov.family)?
    );
    Ok(())
}
