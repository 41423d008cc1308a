//! Measurement families, their quantum domains, domain-state sampling and
//! Monte Carlo simulation of post-selected measurements.

use indexmap::IndexMap;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hermitian::{DensityMatrix, HermitianMatrix, PSD_TOL};
use crate::supermap::Subspace;

/// Entrywise tolerance on `Σ effects = 𝟙`.
pub const SUM_TOL: f64 = 1e-10;
/// Probabilities in `[-NEGATIVE_PROB_TOL, 0)` are rounding noise.
pub const NEGATIVE_PROB_TOL: f64 = 1e-9;
/// Tolerance for membership of the maximally mixed state in a subspace.
pub const ANCHOR_TOL: f64 = 1e-9;
pub const DEFAULT_JITTER: f64 = 0.05;
const MAX_HALVINGS: usize = 6;
const ATTEMPTS_PER_STATE: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub effect: HermitianMatrix,
}

impl Outcome {
    pub fn new(label: impl Into<String>, effect: HermitianMatrix) -> Self {
        Outcome {
            label: label.into(),
            effect,
        }
    }
}

/// An ordered family of labelled Hermitian effects summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    dim: usize,
    outcomes: Vec<Outcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum MeasurementClass {
    #[serde(rename = "POVM")]
    Povm,
    #[serde(rename = "N-POVM")]
    NPovm {
        index: usize,
        label: String,
        min_eigenvalue: f64,
    },
}

impl MeasurementClass {
    pub fn is_povm(&self) -> bool {
        matches!(self, MeasurementClass::Povm)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MeasurementClass::Povm => "POVM",
            MeasurementClass::NPovm { .. } => "N-POVM",
        }
    }
}

impl Measurement {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        Self::with_sum_tolerance(outcomes, SUM_TOL)
    }

    pub fn with_sum_tolerance(outcomes: Vec<Outcome>, tol: f64) -> Result<Self> {
        let dim = outcomes
            .first()
            .ok_or_else(|| Error::InvalidInput("a measurement needs at least one outcome".into()))?
            .effect
            .dim();
        let mut seen = std::collections::HashSet::new();
        for o in &outcomes {
            if o.effect.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: o.effect.dim(),
                });
            }
            if !seen.insert(o.label.as_str()) {
                return Err(Error::DuplicateLabel(o.label.clone()));
            }
        }
        let m = Measurement { dim, outcomes };
        let residual = m.sum_residual();
        let max_residual = residual
            .matrix()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if max_residual > tol {
            return Err(Error::SumNotIdentity {
                max_residual,
                residual: Box::new(residual),
            });
        }
        Ok(m)
    }

    pub fn from_pairs<L: Into<String>>(
        pairs: impl IntoIterator<Item = (L, HermitianMatrix)>,
    ) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(l, e)| Outcome::new(l, e))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|o| o.label.as_str())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o.label == label)
    }

    pub fn effect(&self, label: &str) -> Option<&HermitianMatrix> {
        self.outcomes
            .iter()
            .find(|o| o.label == label)
            .map(|o| &o.effect)
    }

    pub fn effects(&self) -> impl Iterator<Item = &HermitianMatrix> {
        self.outcomes.iter().map(|o| &o.effect)
    }

    /// `Σ effects − 𝟙`.
    pub fn sum_residual(&self) -> HermitianMatrix {
        let mut sum = HermitianMatrix::identity(self.dim).scale(-1.0);
        for o in &self.outcomes {
            sum = &sum + &o.effect;
        }
        sum
    }

    pub fn classify(&self, tol: f64) -> MeasurementClass {
        for (index, o) in self.outcomes.iter().enumerate() {
            let min_eigenvalue = o.effect.min_eigenvalue();
            if min_eigenvalue < -tol {
                return MeasurementClass::NPovm {
                    index,
                    label: o.label.clone(),
                    min_eigenvalue,
                };
            }
        }
        MeasurementClass::Povm
    }

    pub fn is_povm(&self, tol: f64) -> bool {
        self.classify(tol).is_povm()
    }

    /// `Tr(x·N_i)` for every outcome, with no clipping. `x` need not be a state.
    pub fn expectations(&self, x: &HermitianMatrix) -> Result<Vec<f64>> {
        self.outcomes.iter().map(|o| x.hs_inner(&o.effect)).collect()
    }

    /// `Tr(ρ·N_i) ≥ −tol` for every outcome.
    pub fn in_quantum_domain(&self, rho: &DensityMatrix, tol: f64) -> Result<bool> {
        Ok(self
            .expectations(rho.matrix())?
            .iter()
            .all(|&p| p >= -tol))
    }

    /// Outcome probabilities on a state of the quantum domain.
    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        let raw = self.expectations(rho.matrix())?;
        raw.into_iter()
            .zip(&self.outcomes)
            .map(|(p, o)| {
                if p < -NEGATIVE_PROB_TOL {
                    Err(Error::NegativeProbability {
                        label: o.label.clone(),
                        value: p,
                    })
                } else {
                    Ok(p.clamp(0.0, 1.0))
                }
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
pub struct OutcomeJson {
    pub label: String,
    pub matrix: HermitianMatrix,
}

/// The wire form, before the sum and label checks.
#[derive(Serialize, Deserialize)]
pub struct MeasurementJson {
    pub dim: usize,
    pub outcomes: Vec<OutcomeJson>,
}

impl MeasurementJson {
    pub fn into_measurement(self) -> Result<Measurement> {
        let dim = self.dim;
        let outcomes: Vec<Outcome> = self
            .outcomes
            .into_iter()
            .map(|o| Outcome::new(o.label, o.matrix))
            .collect();
        if let Some(o) = outcomes.iter().find(|o| o.effect.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: o.effect.dim(),
            });
        }
        Measurement::new(outcomes)
    }
}

impl Serialize for Measurement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MeasurementJson {
            dim: self.dim,
            outcomes: self
                .outcomes
                .iter()
                .map(|o| OutcomeJson {
                    label: o.label.clone(),
                    matrix: o.effect.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Measurement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        MeasurementJson::deserialize(deserializer)?
            .into_measurement()
            .map_err(serde::de::Error::custom)
    }
}

/// States drawn from the slice `span(subspace) ∩ {density matrices}`.
#[derive(Clone, Debug)]
pub struct DomainSample {
    pub states: Vec<DensityMatrix>,
    pub subspace: Subspace,
    /// Jitter radius in effect after any halvings.
    pub jitter: f64,
}

/// Draws `count` states `𝟙/d + ε·X` with `X` a random unit-norm traceless
/// element of the subspace, rejecting candidates that are not PSD.
pub fn sample_domain_states(
    subspace: &Subspace,
    count: usize,
    seed: u64,
    jitter: f64,
) -> Result<DomainSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_domain_states_with(subspace, count, jitter, &mut rng)
}

pub fn sample_domain_states_with<R: Rng + ?Sized>(
    subspace: &Subspace,
    count: usize,
    jitter: f64,
    rng: &mut R,
) -> Result<DomainSample> {
    let d = subspace.ambient_dim();
    let anchor = HermitianMatrix::identity(d).scale(1.0 / d as f64);
    let residual = subspace.residual(&anchor)?;
    if residual > ANCHOR_TOL {
        return Err(Error::AnchorOutsideSubspace { residual });
    }
    let mut eps = jitter;
    let mut halvings = 0;
    let mut states = Vec::with_capacity(count);
    while states.len() < count {
        let mut accepted = None;
        for _ in 0..ATTEMPTS_PER_STATE {
            let candidate = match random_traceless_direction(subspace, rng) {
                None => anchor.clone(),
                Some(x) => &anchor + &x.scale(eps),
            };
            if candidate.min_eigenvalue() >= 0.0 {
                accepted = Some(candidate);
                break;
            }
        }
        match accepted {
            Some(m) => states.push(DensityMatrix::normalized(m)?),
            None if halvings < MAX_HALVINGS => {
                halvings += 1;
                eps /= 2.0;
            }
            None => return Err(Error::RejectionBudgetExceeded { jitter: eps }),
        }
    }
    Ok(DomainSample {
        states,
        subspace: subspace.clone(),
        jitter: eps,
    })
}

fn random_traceless_direction<R: Rng + ?Sized>(
    subspace: &Subspace,
    rng: &mut R,
) -> Option<HermitianMatrix> {
    let d = subspace.ambient_dim();
    let mut x = HermitianMatrix::zeros(d);
    for b in subspace.basis() {
        let g: f64 = rng.sample(StandardNormal);
        x = &x + &b.scale(g);
    }
    let x = &x - &HermitianMatrix::identity(d).scale(x.trace() / d as f64);
    let norm = x.hs_norm();
    (norm > 1e-12).then(|| x.scale(1.0 / norm))
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationReport {
    pub acceptance_rate: f64,
    pub conditional_freqs: IndexMap<String, f64>,
    pub counts: IndexMap<String, u64>,
    pub shots: u64,
    pub accepted: u64,
    pub seed: u64,
    pub expected_acceptance: f64,
    pub expected_conditional: IndexMap<String, f64>,
}

/// Samples `shots` outcomes of a POVM on `rho`, discards the reject outcome
/// and reports conditional frequencies of the rest.
pub fn simulate_postselected(
    m: &Measurement,
    reject_label: &str,
    rho: &DensityMatrix,
    shots: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if let MeasurementClass::NPovm {
        label,
        min_eigenvalue,
        ..
    } = m.classify(PSD_TOL)
    {
        return Err(Error::NotPovm {
            label,
            min_eigenvalue,
        });
    }
    let reject = m
        .index_of(reject_label)
        .ok_or_else(|| Error::UnknownLabel(reject_label.to_string()))?;
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: rho.dim(),
        });
    }
    let probs = m.outcome_probabilities(rho)?;
    if shots == 0 {
        return Err(Error::AllShotsRejected);
    }
    let dist = WeightedIndex::new(&probs)
        .map_err(|e| Error::InvalidInput(format!("outcome distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = vec![0u64; m.len()];
    for _ in 0..shots {
        tally[dist.sample(&mut rng)] += 1;
    }
    let accepted = shots - tally[reject];
    if accepted == 0 {
        return Err(Error::AllShotsRejected);
    }
    let expected_acceptance = 1.0 - probs[reject];
    let mut conditional_freqs = IndexMap::new();
    let mut expected_conditional = IndexMap::new();
    let mut counts = IndexMap::new();
    for (i, o) in m.outcomes().iter().enumerate() {
        counts.insert(o.label.clone(), tally[i]);
        if i != reject {
            conditional_freqs.insert(o.label.clone(), tally[i] as f64 / accepted as f64);
            let expected = if expected_acceptance > 0.0 {
                probs[i] / expected_acceptance
            } else {
                f64::NAN
            };
            expected_conditional.insert(o.label.clone(), expected);
        }
    }
    Ok(SimulationReport {
        acceptance_rate: accepted as f64 / shots as f64,
        conditional_freqs,
        counts,
        shots,
        accepted,
        seed,
        expected_acceptance,
        expected_conditional,
    })
}
