//! Reads a decomposition and a state family from the bundled JSON files.

use std::path::Path;

use npovm::asd::{dual_basis, family_from_json, max_uniform_c};
use npovm::bridge::{construct_povm, implementation_domain, verify_implementation, DecompositionJson, VerifyConfig};
use npovm::json::{read_json, ComplexJson};

#[derive(serde::Deserialize)]
struct Family {
    states: Vec<Vec<ComplexJson>>,
}

fn main() -> npovm::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let raw: DecompositionJson = read_json(data.join("pt_decomposition.json"))?;
    let dec = raw.into_decomposition()?;
    let ps = construct_povm(&dec)?;
    let dom = implementation_domain(&dec)?;
    let r = verify_implementation(&dec.induced_measurement()?, &ps, &dom, &VerifyConfig::default())?;
    println!("pt_decomposition.json: c = {}, ratio error {:.1e}", ps.c, r.max_ratio_error);

    let family: Family = read_json(data.join("two_state_family.json"))?;
    let family = family_from_json(&family.states)?;
    println!("two_state_family.json: c = {:.4}", max_uniform_c(&dual_basis(&family)?));
    Ok(())
}
