//! Ambiguous discrimination of linearly independent pure states.
//!
//! For `d` independent states `|ψ_j⟩` on `C^d` with dual basis `|φ_j⟩`
//! (`⟨φ_j|ψ_k⟩ = δ_jk`), the effects `c_j|φ_j⟩⟨φ_j|` and the inconclusive
//! effect `M_0 = 𝟙 − Σ_j c_j|φ_j⟩⟨φ_j|` identify the state with certainty
//! whenever the outcome is conclusive. With a uniform `c` the inconclusive
//! probability is `1 − c` on every `|ψ_j⟩`, and the inverse construction of
//! [`crate::bridge`] turns the measurement into an N-POVM that discriminates
//! the states perfectly.
//!
//! Group-covariant families `|ψ_g⟩ = f(g)|ψ⟩` are built from irreducible
//! blocks: `f(g) = ⊕_l D_l(g) ⊗ 𝟙` and `|ψ⟩ = ⊕_l √p_l (𝟙 ⊗ F_l)|Φ_l⟩` with
//! `p_l = d_l²/|G|` and `|Φ_l⟩` maximally entangled. The dual basis is the
//! orbit of `⊕_l √p_l (𝟙 ⊗ (F_l†)⁻¹)|Φ_l⟩`, and the largest uniform `c` is
//! `min_l σ_min(F_l)²`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bridge::{
    invert_postselection, ImplementationDomain, RejectionCondition, VerifyConfig, REJECTION_TOL,
};
use crate::error::{Error, Result};
use crate::hermitian::{DensityMatrix, HermitianMatrix};
use crate::json::{vector_from_json, vector_to_json, ComplexJson, MatrixJson};
use crate::measurement::{Measurement, Outcome};
use crate::supermap::{Subspace, FIXED_CUTOFF};
use crate::C64;

/// Label of the inconclusive outcome.
pub const INCONCLUSIVE: &str = "inconclusive";
/// Smallest singular value below which a family counts as dependent.
pub const SINGULAR_TOL: f64 = 1e-9;
const UNIT_TOL: f64 = 1e-9;
const OPERATOR_TOL: f64 = 1e-10;
const REP_TOL: f64 = 1e-9;
const NORMALIZATION_TOL: f64 = 1e-10;

fn min_singular_value(m: &DMatrix<C64>) -> f64 {
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

fn outer_sum(d: usize, vectors: impl IntoIterator<Item = (f64, DVector<C64>)>) -> HermitianMatrix {
    vectors
        .into_iter()
        .fold(HermitianMatrix::zeros(d), |acc, (w, v)| &acc + &HermitianMatrix::ket_bra(&v).scale(w))
}

/// `d` unit vectors in `C^d`.
#[derive(Clone, Debug)]
pub struct PureStateFamily {
    dim: usize,
    states: Vec<DVector<C64>>,
}

impl PureStateFamily {
    /// Vectors within `1e-9` of unit norm are renormalized; others are
    /// rejected.
    pub fn new(states: Vec<DVector<C64>>) -> Result<Self> {
        let d = states.len();
        if d == 0 {
            return Err(Error::InvalidInput("empty state family".into()));
        }
        let mut out = Vec::with_capacity(d);
        for (j, v) in states.into_iter().enumerate() {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidInput(format!("state {j} has norm {norm}")));
            }
            out.push(v / C64::new(norm, 0.0));
        }
        Ok(PureStateFamily { dim: d, states: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[DVector<C64>] {
        &self.states
    }

    pub fn density_matrices(&self) -> Vec<DensityMatrix> {
        self.states
            .iter()
            .map(|v| DensityMatrix::pure(v).expect("unit vector"))
            .collect()
    }

    /// The `d×d` matrix with the states as columns.
    pub fn matrix(&self) -> DMatrix<C64> {
        DMatrix::from_columns(&self.states)
    }
}

#[derive(Clone, Debug)]
pub struct DualBasis {
    pub vectors: Vec<DVector<C64>>,
}

impl DualBasis {
    /// `max_jk |⟨φ_j|ψ_k⟩ − δ_jk|`.
    pub fn biorthogonality_error(&self, family: &PureStateFamily) -> f64 {
        let mut err: f64 = 0.0;
        for (j, phi) in self.vectors.iter().enumerate() {
            for (k, psi) in family.states().iter().enumerate() {
                let target = if j == k { 1.0 } else { 0.0 };
                err = err.max((phi.dotc(psi) - C64::new(target, 0.0)).norm());
            }
        }
        err
    }
}

/// `|φ_j⟩` is the conjugate of row `j` of `Ψ⁻¹`.
pub fn dual_basis(family: &PureStateFamily) -> Result<DualBasis> {
    let psi = family.matrix();
    let min_singular_value = min_singular_value(&psi);
    if min_singular_value <= SINGULAR_TOL {
        return Err(Error::NearSingularFamily { min_singular_value });
    }
    let inv = psi
        .try_inverse()
        .ok_or(Error::NearSingularFamily { min_singular_value })?;
    let dual = inv.adjoint();
    Ok(DualBasis {
        vectors: dual.column_iter().map(|c| c.into_owned()).collect(),
    })
}

/// `{c_j|φ_j⟩⟨φ_j|}` labelled `"0"`, `"1"`, … followed by the inconclusive
/// effect.
pub fn asd_measurement(dual: &DualBasis, c: &[f64]) -> Result<Measurement> {
    let d = dual.vectors.len();
    if c.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: c.len(),
        });
    }
    if let Some(bad) = c.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidInput(format!("weights must be positive, got {bad}")));
    }
    let mut outcomes: Vec<Outcome> = dual
        .vectors
        .iter()
        .zip(c)
        .enumerate()
        .map(|(j, (phi, cj))| Outcome::new(j.to_string(), HermitianMatrix::ket_bra(phi).scale(*cj)))
        .collect();
    let conclusive = outcomes.iter().fold(HermitianMatrix::zeros(d), |acc, o| &acc + &o.effect);
    let m0 = &HermitianMatrix::identity(d) - &conclusive;
    let min_eigenvalue = m0.min_eigenvalue();
    if min_eigenvalue < -OPERATOR_TOL {
        return Err(Error::OperatorInequalityViolated { min_eigenvalue });
    }
    outcomes.push(Outcome::new(INCONCLUSIVE, m0));
    Measurement::new(outcomes)
}

/// `1/λ_max(Σ_j |φ_j⟩⟨φ_j|)`.
pub fn max_uniform_c(dual: &DualBasis) -> f64 {
    let d = dual.vectors.len();
    1.0 / outer_sum(d, dual.vectors.iter().map(|v| (1.0, v.clone()))).max_eigenvalue()
}

/// `max_jk |P(k | ψ_j, accepted) − δ_jk|` for a measurement with conclusive
/// outcomes `"0"`, `"1"`, … and the given reject label.
pub fn conditional_discrimination_error(
    m: &Measurement,
    reject_label: &str,
    family: &PureStateFamily,
) -> Result<f64> {
    let mut err: f64 = 0.0;
    for (j, rho) in family.density_matrices().iter().enumerate() {
        let p = m.expectations(rho.matrix())?;
        let accepted: f64 = m
            .labels()
            .zip(&p)
            .filter(|(l, _)| *l != reject_label)
            .map(|(_, x)| x)
            .sum();
        if accepted <= 1e-12 {
            return Err(Error::AllOutcomesRejected {
                accepted_mass: accepted,
            });
        }
        for k in 0..family.dim() {
            let idx = m
                .index_of(&k.to_string())
                .ok_or_else(|| Error::UnknownLabel(k.to_string()))?;
            let target = if j == k { 1.0 } else { 0.0 };
            err = err.max((p[idx] / accepted - target).abs());
        }
    }
    Ok(err)
}

/// `max_jk |Tr(ρ_j N_k) − δ_jk|` for effects labelled `"0"`, `"1"`, ….
pub fn discrimination_error(n: &Measurement, family: &PureStateFamily) -> Result<f64> {
    let mut err: f64 = 0.0;
    for (j, rho) in family.density_matrices().iter().enumerate() {
        for k in 0..family.dim() {
            let effect = n
                .effect(&k.to_string())
                .ok_or_else(|| Error::UnknownLabel(k.to_string()))?;
            let target = if j == k { 1.0 } else { 0.0 };
            err = err.max((rho.matrix().hs_inner(effect)? - target).abs());
        }
    }
    Ok(err)
}

/// One irreducible block: dimension `d_l`, the matrices `D_l(g)` in group
/// order (identity first) and the `d_l×d_l` multiplicity matrix `F_l`.
#[derive(Clone, Debug)]
pub struct IrrepBlock {
    pub dim: usize,
    pub reps: Vec<DMatrix<C64>>,
    pub multiplicity: DMatrix<C64>,
}

/// A group given through its irreducible blocks, each with multiplicity equal
/// to its dimension, so the carrier space has dimension `|G|`.
#[derive(Clone, Debug)]
pub struct BlockGroupRep {
    order: usize,
    blocks: Vec<IrrepBlock>,
}

impl BlockGroupRep {
    pub fn new(blocks: Vec<IrrepBlock>) -> Result<Self> {
        let order = blocks
            .first()
            .map(|b| b.reps.len())
            .ok_or_else(|| Error::InvalidRepresentation("no blocks".into()))?;
        let total: usize = blocks.iter().map(|b| b.dim * b.dim).sum();
        if total != order {
            return Err(Error::InvalidRepresentation(format!(
                "Σ d_l² = {total} differs from the group order {order}"
            )));
        }
        for (l, b) in blocks.iter().enumerate() {
            if b.reps.len() != order {
                return Err(Error::InvalidRepresentation(format!(
                    "block {l} has {} matrices, expected {order}",
                    b.reps.len()
                )));
            }
            let shapes_ok = b.multiplicity.shape() == (b.dim, b.dim)
                && b.reps.iter().all(|r| r.shape() == (b.dim, b.dim));
            if !shapes_ok {
                return Err(Error::InvalidRepresentation(format!(
                    "block {l}: matrices must be {0}×{0}",
                    b.dim
                )));
            }
            let id = DMatrix::<C64>::identity(b.dim, b.dim);
            if (&b.reps[0] - &id).norm() > REP_TOL {
                return Err(Error::InvalidRepresentation(format!(
                    "block {l}: the first group element must act as the identity"
                )));
            }
            for (g, r) in b.reps.iter().enumerate() {
                let dev = (r.adjoint() * r - &id).norm();
                if dev > REP_TOL {
                    return Err(Error::InvalidRepresentation(format!(
                        "block {l}, element {g} is not unitary (deviation {dev:.3e})"
                    )));
                }
            }
        }
        let rep = BlockGroupRep { order, blocks };
        rep.check_closure()?;
        let norm = rep.normalization();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidRepresentation(format!(
                "Σ p_l Tr(F_l F_l†)/d_l = {norm}, expected 1"
            )));
        }
        Ok(rep)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn blocks(&self) -> &[IrrepBlock] {
        &self.blocks
    }

    pub fn weight(&self, l: usize) -> f64 {
        let d = self.blocks[l].dim as f64;
        d * d / self.order as f64
    }

    /// `Σ_l p_l Tr(F_l F_l†)/d_l`, the squared norm of `|ψ⟩`.
    pub fn normalization(&self) -> f64 {
        self.blocks
            .iter()
            .enumerate()
            .map(|(l, b)| self.weight(l) * b.multiplicity.norm_squared() / b.dim as f64)
            .sum()
    }

    /// `f(g) = ⊕_l D_l(g) ⊗ 𝟙_{d_l}`.
    pub fn element(&self, g: usize) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.order, self.order);
        let mut offset = 0;
        for b in &self.blocks {
            let k = b.reps[g].kronecker(&DMatrix::<C64>::identity(b.dim, b.dim));
            out.view_mut((offset, offset), (k.nrows(), k.ncols())).copy_from(&k);
            offset += k.nrows();
        }
        out
    }

    fn check_closure(&self) -> Result<()> {
        let elements: Vec<_> = (0..self.order).map(|g| self.element(g)).collect();
        for (g, a) in elements.iter().enumerate() {
            for (h, b) in elements.iter().enumerate() {
                let prod = a * b;
                if !elements.iter().any(|e| (e - &prod).norm() <= REP_TOL) {
                    return Err(Error::InvalidRepresentation(format!(
                        "the product of elements {g} and {h} is not in the group"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `⊕_l √p_l (𝟙 ⊗ X_l)|Φ_l⟩`, whose `(a, b)` component in block `l` is
    /// `√p_l · X_l[b, a] / √d_l`.
    fn block_vector(&self, xs: &[DMatrix<C64>]) -> DVector<C64> {
        let mut v = DVector::zeros(self.order);
        let mut offset = 0;
        for (l, (b, x)) in self.blocks.iter().zip(xs).enumerate() {
            let s = (self.weight(l) / b.dim as f64).sqrt();
            for a in 0..b.dim {
                for bb in 0..b.dim {
                    v[offset + a * b.dim + bb] = x[(bb, a)] * s;
                }
            }
            offset += b.dim * b.dim;
        }
        v
    }
}

/// A finite commutative group through its character table (row `g`, column
/// `l`) and the amplitudes `f_l` of `|ψ⟩ = Σ_l √(1/k) f_l |l⟩`.
#[derive(Clone, Debug)]
pub struct CommutativeGroupRep {
    characters: DMatrix<C64>,
    amplitudes: Vec<C64>,
}

impl CommutativeGroupRep {
    pub fn new(characters: DMatrix<C64>, amplitudes: Vec<C64>) -> Result<Self> {
        let k = amplitudes.len();
        if characters.shape() != (k, k) {
            return Err(Error::InvalidRepresentation(format!(
                "character table is {:?}, expected {k}×{k}",
                characters.shape()
            )));
        }
        if characters.iter().any(|z| (z.norm() - 1.0).abs() > REP_TOL) {
            return Err(Error::InvalidRepresentation("characters must have unit modulus".into()));
        }
        let norm: f64 = amplitudes.iter().map(|f| f.norm_sqr()).sum::<f64>() / k as f64;
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidRepresentation(format!(
                "(1/k) Σ |f_l|² = {norm}, expected 1"
            )));
        }
        Ok(CommutativeGroupRep {
            characters,
            amplitudes,
        })
    }

    pub fn order(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Every irreducible block is one-dimensional with `F_l = f_l`.
    pub fn to_blocks(&self) -> Result<BlockGroupRep> {
        let k = self.order();
        let blocks = (0..k)
            .map(|l| IrrepBlock {
                dim: 1,
                reps: (0..k)
                    .map(|g| DMatrix::from_element(1, 1, self.characters[(g, l)]))
                    .collect(),
                multiplicity: DMatrix::from_element(1, 1, self.amplitudes[l]),
            })
            .collect();
        BlockGroupRep::new(blocks)
    }
}

/// The symmetric group on three letters with elements ordered
/// `e, r, r², s, sr, sr²` (`r` a 3-cycle, `s` a transposition), acting on
/// `C^6` through its trivial, sign and two-dimensional standard irreps. The
/// multiplicities are rescaled so that `|ψ⟩` has unit norm.
pub fn symmetric_group_s3(
    f_trivial: C64,
    f_sign: C64,
    f_standard: DMatrix<C64>,
) -> Result<BlockGroupRep> {
    let (c, s) = (-0.5, 3f64.sqrt() / 2.0);
    let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]).map(|x| C64::new(x, 0.0));
    let refl = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]).map(|x| C64::new(x, 0.0));
    let id = DMatrix::<C64>::identity(2, 2);
    let rot2 = &rot * &rot;
    let standard = vec![id, rot.clone(), rot2.clone(), refl.clone(), &refl * &rot, &refl * &rot2];
    let one = C64::new(1.0, 0.0);
    let scalar = |z: C64| DMatrix::from_element(1, 1, z);
    let mut blocks = vec![
        IrrepBlock {
            dim: 1,
            reps: vec![scalar(one); 6],
            multiplicity: scalar(f_trivial),
        },
        IrrepBlock {
            dim: 1,
            reps: [1.0, 1.0, 1.0, -1.0, -1.0, -1.0]
                .iter()
                .map(|x| scalar(C64::new(*x, 0.0)))
                .collect(),
            multiplicity: scalar(f_sign),
        },
        IrrepBlock {
            dim: 2,
            reps: standard,
            multiplicity: f_standard,
        },
    ];
    let norm = (f_trivial.norm_sqr() + f_sign.norm_sqr()) / 6.0
        + 4.0 / 6.0 * blocks[2].multiplicity.norm_squared() / 2.0;
    if norm <= 0.0 {
        return Err(Error::InvalidRepresentation("all multiplicities vanish".into()));
    }
    let k = C64::new(1.0 / norm.sqrt(), 0.0);
    for b in &mut blocks {
        b.multiplicity *= k;
    }
    BlockGroupRep::new(blocks)
}

#[derive(Clone, Debug)]
pub struct CovariantFamily {
    pub family: PureStateFamily,
    /// The orbit of the dual generator; biorthogonal to `family`.
    pub dual: DualBasis,
    pub generator: DVector<C64>,
    /// Largest uniform weight, `min_l σ_min(F_l)²`.
    pub c: f64,
    /// `Σ_l p_l Tr((F_l†)⁻¹F_l⁻¹)/d_l`, the squared norm of the dual generator.
    pub t_inv: f64,
    /// `max_{g≠e} |⟨φ|f(g)|ψ⟩|`.
    pub offdiag: f64,
    /// `|⟨φ|ψ⟩ − 1|`.
    pub diag_error: f64,
    /// `max − min` over the orbit of `⟨ψ_g|M_0|ψ_g⟩` at weight `c`.
    pub acceptance_spread: f64,
}

/// The orbit of `|ψ⟩`, its dual basis and the largest uniform weight.
pub fn covariant_family(rep: &BlockGroupRep) -> Result<CovariantFamily> {
    let mut c = f64::INFINITY;
    let mut inverses = Vec::with_capacity(rep.blocks.len());
    let mut t_inv = 0.0;
    for (l, b) in rep.blocks.iter().enumerate() {
        let smin = min_singular_value(&b.multiplicity);
        if smin <= SINGULAR_TOL {
            return Err(Error::SingularMultiplicityBlock {
                block: l,
                min_singular_value: smin,
            });
        }
        c = c.min(smin * smin);
        let inv = b
            .multiplicity
            .clone()
            .try_inverse()
            .ok_or(Error::SingularMultiplicityBlock {
                block: l,
                min_singular_value: smin,
            })?;
        let inv_dag = inv.adjoint();
        t_inv += rep.weight(l) * (&inv_dag * &inv).trace().re / b.dim as f64;
        inverses.push(inv_dag);
    }
    let fs: Vec<_> = rep.blocks.iter().map(|b| b.multiplicity.clone()).collect();
    let psi = rep.block_vector(&fs);
    let phi = rep.block_vector(&inverses);

    let elements: Vec<_> = (0..rep.order).map(|g| rep.element(g)).collect();
    let states: Vec<_> = elements.iter().map(|u| u * &psi).collect();
    let duals: Vec<_> = elements.iter().map(|u| u * &phi).collect();
    let mut offdiag: f64 = 0.0;
    for s in states.iter().skip(1) {
        offdiag = offdiag.max(phi.dotc(s).norm());
    }
    let diag_error = (phi.dotc(&states[0]) - C64::new(1.0, 0.0)).norm();

    let d = rep.order;
    let m0 = &HermitianMatrix::identity(d) - &outer_sum(d, duals.iter().map(|v| (c, v.clone())));
    let rejections: Vec<f64> = states.iter().map(|s| m0.expectation(s)).collect();
    let acceptance_spread = rejections.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - rejections.iter().copied().fold(f64::INFINITY, f64::min);

    Ok(CovariantFamily {
        family: PureStateFamily::new(states)?,
        dual: DualBasis { vectors: duals },
        generator: phi,
        c,
        t_inv,
        offdiag,
        diag_error,
        acceptance_spread,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AsdInversion {
    pub npovm: Measurement,
    pub domain: ImplementationDomain,
    pub condition: RejectionCondition,
}

/// Runs the inverse construction on the discrimination measurement with
/// weights `c`, over `K = span{|ψ_j⟩⟨ψ_j|}`.
pub fn asd_to_npovm(
    family: &PureStateFamily,
    dual: &DualBasis,
    c: &[f64],
    cfg: &VerifyConfig,
) -> Result<AsdInversion> {
    let m = asd_measurement(dual, c)?;
    let spanning: Vec<_> = family.density_matrices().into_iter().map(|r| r.into_inner()).collect();
    let k = Subspace::from_spanning(family.dim(), &spanning)?;
    let inv = invert_postselection(&m, INCONCLUSIVE, &k, None, REJECTION_TOL, cfg)?;
    Ok(AsdInversion {
        npovm: inv.npovm,
        domain: ImplementationDomain::new(k, FIXED_CUTOFF)?,
        condition: inv.condition,
    })
}

/// Input forms accepted by the `asd` command.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AsdInput {
    Family {
        states: Vec<Vec<ComplexJson>>,
        /// Uniform weight, per-state weights, or absent for the largest
        /// uniform weight.
        #[serde(default)]
        c: Option<Weights>,
    },
    Commutative {
        order: usize,
        characters: Vec<Vec<ComplexJson>>,
        amplitudes: Vec<ComplexJson>,
    },
    Blocks {
        blocks: Vec<IrrepBlockJson>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Weights {
    Uniform(f64),
    PerState(Vec<f64>),
}

#[derive(Clone, Debug, Deserialize)]
pub struct IrrepBlockJson {
    pub dim: usize,
    pub reps: Vec<MatrixJson>,
    pub multiplicity: MatrixJson,
}

impl IrrepBlockJson {
    pub fn into_block(self) -> Result<IrrepBlock> {
        Ok(IrrepBlock {
            dim: self.dim,
            reps: self.reps.iter().map(MatrixJson::to_matrix).collect::<Result<_>>()?,
            multiplicity: self.multiplicity.to_matrix()?,
        })
    }
}

pub fn family_from_json(states: &[Vec<ComplexJson>]) -> Result<PureStateFamily> {
    PureStateFamily::new(states.iter().map(|s| vector_from_json(s)).collect())
}

pub fn commutative_from_json(
    order: usize,
    characters: &[Vec<ComplexJson>],
    amplitudes: &[ComplexJson],
) -> Result<CommutativeGroupRep> {
    if characters.len() != order || characters.iter().any(|r| r.len() != order) {
        return Err(Error::InvalidRepresentation(format!(
            "character table must be {order}×{order}"
        )));
    }
    let table = DMatrix::from_fn(order, order, |g, l| characters[g][l].0);
    CommutativeGroupRep::new(table, amplitudes.iter().map(|z| z.0).collect())
}

/// JSON form of a state vector list, for reports.
pub fn states_to_json(vectors: &[DVector<C64>]) -> Vec<Vec<ComplexJson>> {
    vectors.iter().map(vector_to_json).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::PSD_TOL;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn z2(f: [f64; 2]) -> CommutativeGroupRep {
        let table = DMatrix::from_row_slice(2, 2, &[re(1.0), re(1.0), re(1.0), re(-1.0)]);
        CommutativeGroupRep::new(table, vec![re(f[0]), re(f[1])]).unwrap()
    }

    #[test]
    fn orthonormal_dual_is_itself() {
        let fam = PureStateFamily::new(vec![
            DVector::from_vec(vec![re(1.0), re(0.0)]),
            DVector::from_vec(vec![re(0.0), re(1.0)]),
        ])
        .unwrap();
        let dual = dual_basis(&fam).unwrap();
        assert_eq!(dual.vectors, fam.states());
        assert_abs_diff_eq!(max_uniform_c(&dual), 1.0, epsilon = 1e-12);
        let m = asd_measurement(&dual, &[1.0, 1.0]).unwrap();
        assert!(m.effect(INCONCLUSIVE).unwrap().hs_norm() < 1e-12);
        let err = asd_to_npovm(&fam, &dual, &[1.0, 1.0], &VerifyConfig::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateC0(_)));
    }

    #[test]
    fn two_state_closed_form() {
        let (a, b) = (re(0.6), C64::new(0.0, 0.8));
        let fam = PureStateFamily::new(vec![
            DVector::from_vec(vec![re(1.0), re(0.0)]),
            DVector::from_vec(vec![a, b]),
        ])
        .unwrap();
        let dual = dual_basis(&fam).unwrap();
        let expected = DVector::from_vec(vec![re(1.0), -a.conj() / b.conj()]);
        assert!((&dual.vectors[0] - expected).norm() < 1e-12);
        assert!(dual.biorthogonality_error(&fam) < 1e-12);
        let c = max_uniform_c(&dual);
        let m = asd_measurement(&dual, &[c, c]).unwrap();
        assert!(m.effect(INCONCLUSIVE).unwrap().min_eigenvalue().abs() < 1e-9);
        assert!(conditional_discrimination_error(&m, INCONCLUSIVE, &fam).unwrap() < 1e-10);
        let too_big = c * 1.01;
        assert!(matches!(
            asd_measurement(&dual, &[too_big, too_big]),
            Err(Error::OperatorInequalityViolated { .. })
        ));
    }

    #[test]
    fn near_singular_family() {
        let fam = PureStateFamily::new(vec![
            DVector::from_vec(vec![re(1.0), re(0.0)]),
            DVector::from_vec(vec![re(1.0), re(1e-11)]),
        ])
        .unwrap();
        assert!(matches!(dual_basis(&fam), Err(Error::NearSingularFamily { .. })));
    }

    #[test]
    fn random_family_biorthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fam = PureStateFamily::new((0..4).map(|_| crate::random::random_ket(4, &mut rng)).collect())
            .unwrap();
        let dual = dual_basis(&fam).unwrap();
        assert!(dual.biorthogonality_error(&fam) < 1e-9);
        let c = max_uniform_c(&dual);
        let m = asd_measurement(&dual, &[c; 4]).unwrap();
        assert!(m.effect(INCONCLUSIVE).unwrap().min_eigenvalue().abs() < 1e-9);
    }

    #[test]
    fn z2_instance() {
        let rep = z2([1.6f64.sqrt(), 0.4f64.sqrt()]).to_blocks().unwrap();
        let cov = covariant_family(&rep).unwrap();
        assert_abs_diff_eq!(cov.family.states()[0][0].re, 0.8f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(cov.family.states()[0][1].re, 0.2f64.sqrt(), epsilon = 1e-12);
        // Both the block formula and the dual-basis eigenvalue give min |f_l|².
        assert_abs_diff_eq!(cov.c, 0.4, epsilon = 1e-12);
        let dual = dual_basis(&cov.family).unwrap();
        assert_abs_diff_eq!(max_uniform_c(&dual), 0.4, epsilon = 1e-12);
        assert!(cov.acceptance_spread < 1e-10);
        assert!(cov.offdiag < 1e-12 && cov.diag_error < 1e-12);
        assert_abs_diff_eq!(cov.t_inv, dual.vectors[0].norm_squared(), epsilon = 1e-12);

        let inv = asd_to_npovm(&cov.family, &dual, &[cov.c; 2], &VerifyConfig::default()).unwrap();
        assert_abs_diff_eq!(inv.condition.c0, 1.0 / 0.6, epsilon = 1e-12);
        assert!(discrimination_error(&inv.npovm, &cov.family).unwrap() < 1e-9);
        assert!(!inv.npovm.is_povm(PSD_TOL));
    }

    #[test]
    fn nonuniform_weights_fail_the_rejection_condition() {
        let rep = z2([1.6f64.sqrt(), 0.4f64.sqrt()]).to_blocks().unwrap();
        let cov = covariant_family(&rep).unwrap();
        let err = asd_to_npovm(&cov.family, &cov.dual, &[0.4, 0.2], &VerifyConfig::default()).unwrap_err();
        assert!(matches!(err, Error::RejectionConditionFailed { .. }));
    }

    #[test]
    fn trivial_z2() {
        let cov = covariant_family(&z2([1.0, 1.0]).to_blocks().unwrap()).unwrap();
        assert_abs_diff_eq!(cov.c, 1.0, epsilon = 1e-12);
        let g = cov.family.states()[0].dotc(&cov.family.states()[1]).norm();
        assert!(g < 1e-12);
    }

    #[test]
    fn s3_blocks_match_the_dual_basis_oracle() {
        let f_std = DMatrix::from_row_slice(2, 2, &[re(1.0), C64::new(0.3, 0.2), re(-0.4), re(0.8)]);
        let rep = symmetric_group_s3(re(1.2), re(0.7), f_std).unwrap();
        assert_abs_diff_eq!(rep.normalization(), 1.0, epsilon = 1e-12);
        let cov = covariant_family(&rep).unwrap();
        let dual = dual_basis(&cov.family).unwrap();
        assert!(dual.biorthogonality_error(&cov.family) < 1e-9);
        for (a, b) in dual.vectors.iter().zip(&cov.dual.vectors) {
            assert!((a - b).norm() < 1e-9);
        }
        assert_abs_diff_eq!(cov.t_inv, dual.vectors[0].norm_squared(), epsilon = 1e-9);
        assert_abs_diff_eq!(cov.c, max_uniform_c(&dual), epsilon = 1e-9);
        assert!(cov.acceptance_spread < 1e-10);
    }

    #[test]
    fn bad_representations() {
        let table = DMatrix::from_row_slice(2, 2, &[re(1.0), re(1.0), re(1.0), re(1.0)]);
        assert!(CommutativeGroupRep::new(table, vec![re(1.0), re(0.5)]).is_err());
        let table = DMatrix::from_row_slice(2, 2, &[re(1.0), re(1.0), re(1.0), re(-1.0)]);
        let rep = CommutativeGroupRep::new(table, vec![re(2f64.sqrt()), re(0.0)]).unwrap();
        assert!(matches!(
            covariant_family(&rep.to_blocks().unwrap()),
            Err(Error::SingularMultiplicityBlock { block: 1, .. })
        ));
    }
}
