//! Post-selected POVM + subspace → N-POVM.
//!
//! Given a POVM `{M_i}_{i∈I} ∪ {M_{i0}}` and a subspace `K` on which the
//! rejection probability is the constant `1/c0`, the effects
//!
//! ```text
//! N_i = (c0·M_i − (𝟙 − c0·M_{i0}) / |I|) / (c0 − 1)
//! ```
//!
//! sum to the identity and reproduce the post-selected statistics on `K`.
//! The constancy is equivalent to `P_K(c0·M_{i0} − 𝟙) = 0`.

use serde::Serialize;

use super::forward::VerifyConfig;
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, PSD_TOL};
use crate::measurement::{sample_domain_states, Measurement, MeasurementClass, Outcome};
use crate::supermap::Subspace;

/// Default tolerance on `‖P_K(c0·M_{i0} − 𝟙)‖_HS`.
pub const REJECTION_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct RejectionCondition {
    pub c0: f64,
    /// `‖P_K(c0·M_{i0} − 𝟙)‖_HS`.
    pub projection_norm: f64,
    pub tol: f64,
    pub holds: bool,
    /// `max − min` of `Tr ρM_{i0}` over sampled states of `K`; only when `𝟙/d ∈ K`.
    pub rejection_mass_spread: Option<f64>,
    /// `max |Tr ρM_{i0} − 1/c0|` over the same samples.
    pub rejection_mass_deviation: Option<f64>,
}

/// The result of [`invert_postselection`].
#[derive(Clone, Debug, Serialize)]
pub struct Inversion {
    pub npovm: Measurement,
    pub condition: RejectionCondition,
}

fn reject_effect<'a>(m: &'a Measurement, reject_label: &str) -> Result<&'a HermitianMatrix> {
    m.effect(reject_label)
        .ok_or_else(|| Error::UnknownLabel(reject_label.to_string()))
}

fn check_dims(m: &Measurement, k: &Subspace) -> Result<()> {
    if k.ambient_dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: k.ambient_dim(),
        });
    }
    Ok(())
}

/// Projects `c0·M_{i0} − 𝟙` onto `K`. When `𝟙/d ∈ K` also samples states of
/// `K` and records how far `Tr ρM_{i0}` strays from `1/c0`.
pub fn check_rejection_condition(
    m: &Measurement,
    reject_label: &str,
    k: &Subspace,
    c0: f64,
    tol: f64,
    cfg: &VerifyConfig,
) -> Result<RejectionCondition> {
    check_dims(m, k)?;
    let m0 = reject_effect(m, reject_label)?;
    let d = m.dim();
    let target = &m0.scale(c0) - &HermitianMatrix::identity(d);
    let projection_norm = k.project(&target)?.hs_norm();

    let anchor = HermitianMatrix::identity(d).scale(1.0 / d as f64);
    let (spread, deviation) = if k.dimension() > 0 && k.contains(&anchor, crate::measurement::ANCHOR_TOL)? {
        let sample = sample_domain_states(k, cfg.samples, cfg.seed, cfg.jitter)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut dev: f64 = 0.0;
        for rho in &sample.states {
            let p = rho.matrix().hs_inner(m0)?;
            lo = lo.min(p);
            hi = hi.max(p);
            dev = dev.max((p - 1.0 / c0).abs());
        }
        if sample.states.is_empty() {
            (None, None)
        } else {
            (Some(hi - lo), Some(dev))
        }
    } else {
        (None, None)
    };
    Ok(RejectionCondition {
        c0,
        projection_norm,
        tol,
        holds: projection_norm <= tol,
        rejection_mass_spread: spread,
        rejection_mass_deviation: deviation,
    })
}

/// The only `c0` compatible with the rejection condition:
/// `Tr X / Tr(X·M_{i0})` with `X = P_K(𝟙)`.
pub fn infer_c0(m: &Measurement, reject_label: &str, k: &Subspace) -> Result<f64> {
    check_dims(m, k)?;
    let m0 = reject_effect(m, reject_label)?;
    let x = k.project(&HermitianMatrix::identity(m.dim()))?;
    let tr = x.trace();
    if tr.abs() <= ZERO_TOL {
        return Err(Error::DegenerateC0(
            "the subspace is orthogonal to the identity".into(),
        ));
    }
    let mass = x.hs_inner(m0)?;
    if mass.abs() <= ZERO_TOL * tr.abs() {
        return Err(Error::DegenerateC0(
            "the reject outcome carries no mass on the subspace".into(),
        ));
    }
    let c0 = tr / mass;
    validate_c0(c0)?;
    Ok(c0)
}

fn validate_c0(c0: f64) -> Result<()> {
    if !c0.is_finite() || c0 <= 1.0 + ZERO_TOL {
        return Err(Error::DegenerateC0(format!(
            "c0 = {c0} leaves nothing to post-select on (need c0 > 1)"
        )));
    }
    Ok(())
}

/// `c0 = c/(c − 1)` for the output of the forward construction; `None` when
/// `c ≤ 1` and nothing is rejected.
pub fn c0_from_c(c: f64) -> Option<f64> {
    (c > 1.0 + ZERO_TOL).then(|| c / (c - 1.0))
}

/// The candidate effects, without checking the rejection condition.
pub fn npovm_candidate(m: &Measurement, reject_label: &str, c0: f64) -> Result<Measurement> {
    validate_c0(c0)?;
    let m0 = reject_effect(m, reject_label)?;
    let kept: Vec<&Outcome> = m.outcomes().iter().filter(|o| o.label != reject_label).collect();
    if kept.is_empty() {
        return Err(Error::InvalidInput("no outcome besides the reject outcome".into()));
    }
    let d = m.dim();
    let share = (&HermitianMatrix::identity(d) - &m0.scale(c0)).scale(1.0 / kept.len() as f64);
    let outcomes = kept
        .into_iter()
        .map(|o| {
            let n = (&o.effect.scale(c0) - &share).scale(1.0 / (c0 - 1.0));
            Outcome::new(o.label.clone(), n)
        })
        .collect();
    Measurement::new(outcomes)
}

/// Checks the rejection condition for `c0` (inferred when `None`) and builds
/// the N-POVM.
pub fn invert_postselection(
    m: &Measurement,
    reject_label: &str,
    k: &Subspace,
    c0: Option<f64>,
    tol: f64,
    cfg: &VerifyConfig,
) -> Result<Inversion> {
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
    let c0 = match c0 {
        Some(c0) => {
            validate_c0(c0)?;
            reject_effect(m, reject_label)?;
            c0
        }
        None => infer_c0(m, reject_label, k)?,
    };
    let condition = check_rejection_condition(m, reject_label, k, c0, tol, cfg)?;
    if !condition.holds {
        return Err(Error::RejectionConditionFailed {
            projection_norm: condition.projection_norm,
        });
    }
    let npovm = npovm_candidate(m, reject_label, c0)?;
    Ok(Inversion { npovm, condition })
}
