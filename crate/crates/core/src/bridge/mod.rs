//! Constructions between N-POVMs and post-selected POVMs.
//!
//! * [`forward`]: from a decomposition `N_i = Σ_k f_i^(k)(S_i^(k))` to a POVM
//!   with a reject outcome and the domain on which it reproduces `N`.
//! * [`pipeline`]: a decomposition built from `N` alone, given an orthonormal
//!   basis of pure states in its quantum domain, with cost bounds.
//! * [`inverse`]: from a post-selected POVM and a subspace back to an N-POVM.

pub mod forward;
pub mod inverse;
pub mod pipeline;

use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, PSD_TOL};
use crate::measurement::{Measurement, Outcome};
use crate::supermap::{Subspace, SuperMap};

pub use forward::{
    acceptance_bound_check, construct_povm, implementation_domain, implementation_domain_with_cutoff,
    verify_implementation, verify_on_states, verify_ratio_identity, AcceptanceBound,
    ImplementationReport, VerifyConfig,
};
pub use inverse::{
    c0_from_c, check_rejection_condition, infer_c0, invert_postselection, npovm_candidate,
    Inversion, RejectionCondition, REJECTION_TOL,
};
pub use pipeline::{
    check_domain_conditions, cost_bounded_pipeline, dim_prime_upper, Completion, CompletionRule,
    CostBoundedImplementation, DomainConditions,
};

/// Tolerance on `Σ_i Σ_k f(S) = 𝟙` for a decomposition.
pub const DECOMPOSITION_SUM_TOL: f64 = 1e-9;
/// Preferred label for the reject outcome of constructed POVMs.
pub const REJECT_LABEL: &str = "reject";

/// One summand `f(S)` of an effect.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub map: SuperMap,
    pub s: HermitianMatrix,
}

impl Term {
    pub fn new(map: SuperMap, s: HermitianMatrix) -> Self {
        Term { map, s }
    }
}

/// An N-POVM presented as `N_i = Σ_k f_i^(k)(S_i^(k))` with every `S` PSD.
#[derive(Clone, Debug)]
pub struct Decomposition {
    dim: usize,
    terms: IndexMap<String, Vec<Term>>,
}

impl Decomposition {
    pub fn new<L: Into<String>>(
        dim: usize,
        terms: impl IntoIterator<Item = (L, Vec<Term>)>,
    ) -> Result<Self> {
        let mut map = IndexMap::new();
        for (label, list) in terms {
            let label = label.into();
            if map.contains_key(&label) {
                return Err(Error::DuplicateLabel(label));
            }
            map.insert(label, list);
        }
        if map.is_empty() {
            return Err(Error::InvalidInput("a decomposition needs at least one outcome".into()));
        }
        let dec = Decomposition { dim, terms: map };
        dec.validate()?;
        Ok(dec)
    }

    fn validate(&self) -> Result<()> {
        let mut sum = HermitianMatrix::identity(self.dim).scale(-1.0);
        for (label, list) in &self.terms {
            for (k, term) in list.iter().enumerate() {
                for found in [term.map.dim(), term.s.dim()] {
                    if found != self.dim {
                        return Err(Error::DimensionMismatch {
                            expected: self.dim,
                            found,
                        });
                    }
                }
                let min_eigenvalue = term.s.min_eigenvalue();
                if min_eigenvalue < -PSD_TOL {
                    return Err(Error::NotPsd {
                        what: format!("S for outcome {label:?}, term {k}"),
                        min_eigenvalue,
                    });
                }
                sum = &sum + &term.map.apply(&term.s)?;
            }
        }
        let max_residual = sum.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max_residual > DECOMPOSITION_SUM_TOL {
            return Err(Error::SumNotIdentity {
                max_residual,
                residual: Box::new(sum),
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &IndexMap<String, Vec<Term>> {
        &self.terms
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + Clone {
        self.terms.keys().map(String::as_str)
    }

    pub fn maps(&self) -> impl Iterator<Item = &SuperMap> {
        self.terms.values().flatten().map(|t| &t.map)
    }

    /// `N_i = Σ_k f_i^(k)(S_i^(k))`.
    pub fn effect(&self, label: &str) -> Result<HermitianMatrix> {
        let list = self
            .terms
            .get(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        let mut n = HermitianMatrix::zeros(self.dim);
        for t in list {
            n = &n + &t.map.apply(&t.s)?;
        }
        Ok(n)
    }

    /// The N-POVM this decomposition presents.
    pub fn induced_measurement(&self) -> Result<Measurement> {
        let outcomes = self
            .labels()
            .map(|l| Ok(Outcome::new(l, self.effect(l)?)))
            .collect::<Result<Vec<_>>>()?;
        Measurement::with_sum_tolerance(outcomes, DECOMPOSITION_SUM_TOL)
    }

    /// `Σ_k S_i^(k)` for one outcome.
    pub fn positive_part(&self, label: &str) -> Result<HermitianMatrix> {
        let list = self
            .terms
            .get(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        Ok(list
            .iter()
            .fold(HermitianMatrix::zeros(self.dim), |acc, t| &acc + &t.s))
    }

    /// `Σ_i Σ_k S_i^(k)`.
    pub fn total_positive_part(&self) -> HermitianMatrix {
        self.terms
            .values()
            .flatten()
            .fold(HermitianMatrix::zeros(self.dim), |acc, t| &acc + &t.s)
    }

    pub fn all_trace_preserving(&self, tol: f64) -> bool {
        self.maps().all(|f| f.is_trace_preserving(tol))
    }
}

/// The wire form, before positivity and sum checks.
#[derive(Serialize, Deserialize)]
pub struct DecompositionJson {
    pub dim: usize,
    pub terms: IndexMap<String, Vec<Term>>,
}

impl DecompositionJson {
    pub fn into_decomposition(self) -> Result<Decomposition> {
        Decomposition::new(self.dim, self.terms)
    }
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionJson {
            dim: self.dim,
            terms: self.terms.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Decomposition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        DecompositionJson::deserialize(deserializer)?
            .into_decomposition()
            .map_err(serde::de::Error::custom)
    }
}

/// A POVM with a designated reject outcome.
#[derive(Clone, Debug, Serialize)]
pub struct PostSelectedPovm {
    pub povm: Measurement,
    pub reject_label: String,
    /// Normalization constant; the acceptance probability on the domain is `1/c`.
    pub c: f64,
    /// How many eigenvalues of `Σ S` tie with the largest one.
    pub max_eig_multiplicity: usize,
}

impl PostSelectedPovm {
    pub fn acceptance(&self) -> f64 {
        1.0 / self.c
    }

    pub fn reject_effect(&self) -> &HermitianMatrix {
        self.povm
            .effect(&self.reject_label)
            .expect("reject label present by construction")
    }

    /// Labels of the kept outcomes, in order.
    pub fn kept_labels(&self) -> impl Iterator<Item = &str> {
        self.povm.labels().filter(move |l| *l != self.reject_label)
    }
}

/// The common fixed space `K` of the adjoint maps; its density matrices form
/// the implementation domain.
#[derive(Clone, Debug)]
pub struct ImplementationDomain {
    pub subspace: Subspace,
    pub tol: f64,
    pub contains_maximally_mixed: bool,
}

impl ImplementationDomain {
    pub fn new(subspace: Subspace, tol: f64) -> Result<Self> {
        let d = subspace.ambient_dim();
        let anchor = HermitianMatrix::identity(d).scale(1.0 / d as f64);
        let contains_maximally_mixed =
            subspace.residual(&anchor)? <= crate::measurement::ANCHOR_TOL;
        Ok(ImplementationDomain {
            subspace,
            tol,
            contains_maximally_mixed,
        })
    }

    pub fn dimension(&self) -> usize {
        self.subspace.dimension()
    }
}

impl Serialize for ImplementationDomain {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            dimension: usize,
            contains_maximally_mixed: bool,
            tol: f64,
            basis: &'a [HermitianMatrix],
        }
        Raw {
            dimension: self.dimension(),
            contains_maximally_mixed: self.contains_maximally_mixed,
            tol: self.tol,
            basis: self.subspace.basis(),
        }
        .serialize(serializer)
    }
}

/// A label not used by `m`, preferring [`REJECT_LABEL`].
pub(crate) fn fresh_reject_label<'a>(labels: impl Iterator<Item = &'a str> + Clone) -> String {
    let mut label = REJECT_LABEL.to_string();
    while labels.clone().any(|l| l == label) {
        label.push('_');
    }
    label
}
