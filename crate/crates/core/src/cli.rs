//! The `npovm` command-line tool.
//!
//! Every command writes one JSON report to stdout (or `--out`) and a short
//! summary to stderr. Exit codes:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 2    | unreadable input or bad arguments         |
//! | 3    | input violates an invariant               |
//! | 4    | verification failed                       |
//! | 5    | rejection condition fails on the subspace |
//! | 6    | degenerate rejection constant             |

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::asd::{
    self, asd_measurement, asd_to_npovm, conditional_discrimination_error, covariant_family,
    discrimination_error, dual_basis, max_uniform_c, AsdInput, BlockGroupRep, DualBasis,
    PureStateFamily, Weights, INCONCLUSIVE,
};
use crate::bridge::{
    self, acceptance_bound_check, construct_povm, implementation_domain_with_cutoff,
    infer_c0, invert_postselection, verify_implementation, verify_ratio_identity,
    DecompositionJson, VerifyConfig,
};
use crate::error::Error;
use crate::hermitian::{DensityMatrix, HermitianMatrix};
use crate::measurement::{simulate_postselected, Measurement, MeasurementJson, DEFAULT_JITTER};
use crate::pt_example::{self, PartialTransposeExample};
use crate::supermap::{Subspace, SubspaceJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_REJECTION_CONDITION: i32 = 5;
pub const EXIT_DEGENERATE: i32 = 6;

/// Tolerance on the demo's exact checks.
const EXACT_TOL: f64 = 1e-12;
/// Tolerance on the constancy of the accepted mass.
const SPREAD_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "npovm", version, about = "Implement N-POVMs by post-selected POVMs and back")]
pub struct Cli {
    /// Seed for domain sampling and Monte Carlo.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Number of domain states sampled for verification.
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    /// Tolerance on the post-selection ratio identity.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_ratio: f64,
    /// Tolerance on eigenvalues when classifying effects.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_psd: f64,
    /// Relative singular-value cutoff for fixed spaces; also bounds the
    /// rejection-condition projection norm.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_fixed: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the post-selected POVM for a decomposition and verify it.
    Implement { decomposition: PathBuf },
    /// Turn a post-selected POVM into an N-POVM on a subspace.
    Invert {
        povm: PathBuf,
        #[arg(long)]
        reject: String,
        #[arg(long)]
        subspace: PathBuf,
        /// Rejection constant; inferred from the subspace when omitted.
        #[arg(long)]
        c0: Option<f64>,
    },
    /// Check that a POVM implements an N-POVM on a subspace.
    Verify {
        npovm: PathBuf,
        povm: PathBuf,
        subspace: PathBuf,
        /// Reject label; defaults to the only POVM label absent from the N-POVM.
        #[arg(long)]
        reject: Option<String>,
    },
    /// Ambiguous discrimination of a state family or a group orbit.
    Asd { input: PathBuf },
    /// The two-qubit partial-transpose example, checked end to end.
    DemoPt {
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
    },
    /// Monte Carlo of a post-selected POVM on one state.
    Simulate {
        povm: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        reject: String,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Implement { .. } => "implement",
            Command::Invert { .. } => "invert",
            Command::Verify { .. } => "verify",
            Command::Asd { .. } => "asd",
            Command::DemoPt { .. } => "demo-pt",
            Command::Simulate { .. } => "simulate",
        }
    }
}

/// Report, exit code and stderr summary of one run.
#[derive(Debug)]
pub struct Execution {
    pub exit_code: i32,
    pub report: Value,
    pub summary: String,
}

struct Failure {
    code: i32,
    message: String,
    details: Map<String, Value>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            details: Map::new(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut f = Failure::new(exit_code_for(&e), e.to_string());
        match &e {
            Error::RejectionConditionFailed { projection_norm } => {
                f.details.insert("projection_norm".into(), json!(projection_norm));
            }
            Error::SumNotIdentity {
                max_residual,
                residual,
            } => {
                f.details.insert("max_residual".into(), json!(max_residual));
                f.details.insert("residual".into(), to_value(residual.as_ref()));
            }
            Error::NotPsd { min_eigenvalue, .. }
            | Error::NotPovm { min_eigenvalue, .. }
            | Error::OperatorInequalityViolated { min_eigenvalue } => {
                f.details.insert("min_eigenvalue".into(), json!(min_eigenvalue));
            }
            _ => {}
        }
        f
    }
}

/// Exit code for a library error.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Json(_) | Error::Io(_) => EXIT_PARSE,
        Error::RejectionConditionFailed { .. } => EXIT_REJECTION_CONDITION,
        Error::DegenerateC0(_) => EXIT_DEGENERATE,
        Error::AnchorOutsideSubspace { .. }
        | Error::RejectionBudgetExceeded { .. }
        | Error::AllOutcomesRejected { .. }
        | Error::AllShotsRejected => EXIT_VERIFICATION,
        _ => EXIT_INVARIANT,
    }
}

type Outcome = std::result::Result<(Map<String, Value>, i32, String), Failure>;

fn to_value<T: Serialize + ?Sized>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// Reads and parses a JSON file; any failure here is a parse error.
fn load<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load_measurement(path: &Path) -> std::result::Result<Measurement, Failure> {
    Ok(load::<MeasurementJson>(path)?.into_measurement()?)
}

fn load_subspace(path: &Path) -> std::result::Result<Subspace, Failure> {
    Ok(load::<SubspaceJson>(path)?.into_subspace()?)
}

fn config(cli: &Cli) -> VerifyConfig {
    VerifyConfig {
        samples: cli.samples,
        seed: cli.seed,
        jitter: DEFAULT_JITTER,
    }
}

fn check_args(cli: &Cli) -> std::result::Result<(), Failure> {
    if cli.samples == 0 {
        return Err(Failure::new(EXIT_PARSE, "--samples must be at least 1"));
    }
    for (name, tol) in [
        ("--tol-ratio", cli.tol_ratio),
        ("--tol-psd", cli.tol_psd),
        ("--tol-fixed", cli.tol_fixed),
    ] {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Failure::new(EXIT_PARSE, format!("{name} must be positive")));
        }
    }
    Ok(())
}

fn classification(m: &Measurement, tol: f64) -> Value {
    to_value(&m.classify(tol))
}

fn cmd_implement(cli: &Cli, path: &Path) -> Outcome {
    let dec = load::<DecompositionJson>(path)?.into_decomposition()?;
    let n = dec.induced_measurement()?;
    let ps = construct_povm(&dec)?;
    let dom = implementation_domain_with_cutoff(&dec, cli.tol_fixed)?;
    let report = verify_implementation(&n, &ps, &dom, &config(cli))?;
    let bound = acceptance_bound_check(&dec, &ps);
    let d = dec.dim();
    let frame: Vec<_> = (0..d)
        .map(|j| DensityMatrix::new(HermitianMatrix::basis_projector(d, j)).expect("projector"))
        .collect();
    let dim_prime_upper = bridge::dim_prime_upper(&n, &frame)?;
    let dim_bound = (d * d + d) as i64 - 2 * dim_prime_upper as i64;

    let ok = report.max_ratio_error <= cli.tol_ratio;
    let mut out = Map::new();
    out.insert("c".into(), json!(ps.c));
    out.insert("acceptance".into(), json!(ps.acceptance()));
    out.insert("max_ratio_error".into(), json!(report.max_ratio_error));
    out.insert("lemma1_spread".into(), json!(report.acceptance_spread));
    out.insert("dim_domain".into(), json!(dom.dimension()));
    out.insert("dim_prime_upper".into(), json!(dim_prime_upper));
    out.insert(
        "bounds".into(),
        json!({
            "dim_ok": dom.dimension() as i64 >= dim_bound,
            "acc_ok": bound.satisfied,
        }),
    );
    out.insert("dim_bound".into(), json!(dim_bound));
    out.insert("acceptance_bound".into(), to_value(&bound));
    out.insert("max_eig_multiplicity".into(), json!(ps.max_eig_multiplicity));
    out.insert("npovm_class".into(), classification(&n, cli.tol_psd));
    out.insert("reject_label".into(), json!(ps.reject_label));
    out.insert("povm".into(), to_value(&ps.povm));
    out.insert("domain".into(), to_value(&dom));
    out.insert("verification".into(), to_value(&report));
    let summary = format!(
        "implement: c = {:.6}, acceptance = {:.6}, max ratio error = {:.3e}, domain dimension {}",
        ps.c,
        ps.acceptance(),
        report.max_ratio_error,
        dom.dimension()
    );
    Ok((out, if ok { EXIT_OK } else { EXIT_VERIFICATION }, summary))
}

fn cmd_invert(cli: &Cli, povm: &Path, reject: &str, subspace: &Path, c0: Option<f64>) -> Outcome {
    let m = load_measurement(povm)?;
    let k = load_subspace(subspace)?;
    let inferred = infer_c0(&m, reject, &k).ok();
    let cfg = config(cli);
    let mut out = Map::new();
    out.insert("c0_supplied".into(), json!(c0));
    out.insert("c0_inferred".into(), json!(inferred));
    out.insert("subspace_dimension".into(), json!(k.dimension()));
    let inv = match invert_postselection(&m, reject, &k, c0, cli.tol_fixed, &cfg) {
        Ok(inv) => inv,
        Err(e) => {
            let mut f = Failure::from(e);
            f.details.extend(out);
            return Err(f);
        }
    };
    out.insert("c0".into(), json!(inv.condition.c0));
    out.insert("rejection_condition".into(), to_value(&inv.condition));
    out.insert("npovm_class".into(), classification(&inv.npovm, cli.tol_psd));
    out.insert("sum_residual".into(), json!(inv.npovm.sum_residual().hs_norm()));
    let anchor = HermitianMatrix::identity(m.dim()).scale(1.0 / m.dim() as f64);
    let mut code = EXIT_OK;
    let summary;
    if k.contains(&anchor, crate::measurement::ANCHOR_TOL)? {
        let report = verify_ratio_identity(&inv.npovm, &m, reject, &k, &cfg)?;
        if report.max_ratio_error > cli.tol_ratio {
            code = EXIT_VERIFICATION;
        }
        summary = format!(
            "invert: c0 = {:.6}, projection norm = {:.3e}, max ratio error = {:.3e}",
            inv.condition.c0, inv.condition.projection_norm, report.max_ratio_error
        );
        out.insert("verification".into(), to_value(&report));
    } else {
        summary = format!(
            "invert: c0 = {:.6}, projection norm = {:.3e} (maximally mixed state outside the subspace; no sampling)",
            inv.condition.c0, inv.condition.projection_norm
        );
        out.insert("verification".into(), Value::Null);
    }
    out.insert("npovm".into(), to_value(&inv.npovm));
    Ok((out, code, summary))
}

fn cmd_verify(
    cli: &Cli,
    npovm: &Path,
    povm: &Path,
    subspace: &Path,
    reject: Option<&str>,
) -> Outcome {
    let n = load_measurement(npovm)?;
    let m = load_measurement(povm)?;
    let k = load_subspace(subspace)?;
    let reject = match reject {
        Some(r) => r.to_string(),
        None => {
            let extra: Vec<&str> = m.labels().filter(|l| n.index_of(l).is_none()).collect();
            match extra.as_slice() {
                [one] => one.to_string(),
                _ => {
                    return Err(Failure::new(
                        EXIT_INVARIANT,
                        format!("cannot infer the reject label from {extra:?}; pass --reject"),
                    ))
                }
            }
        }
    };
    let report = verify_ratio_identity(&n, &m, &reject, &k, &config(cli))?;
    let ok = report.max_ratio_error <= cli.tol_ratio;
    let mut out = Map::new();
    out.insert("reject_label".into(), json!(reject));
    out.insert("max_ratio_error".into(), json!(report.max_ratio_error));
    out.insert("lemma1_spread".into(), json!(report.acceptance_spread));
    out.insert("acceptance".into(), json!(report.acceptance));
    out.insert("dim_domain".into(), json!(k.dimension()));
    out.insert("npovm_class".into(), classification(&n, cli.tol_psd));
    out.insert("povm_class".into(), classification(&m, cli.tol_psd));
    out.insert("verification".into(), to_value(&report));
    let summary = format!(
        "verify: max ratio error = {:.3e}, acceptance = {:.6} ± {:.3e}",
        report.max_ratio_error, report.acceptance, report.acceptance_spread
    );
    Ok((out, if ok { EXIT_OK } else { EXIT_VERIFICATION }, summary))
}

fn asd_family_report(
    cli: &Cli,
    family: &PureStateFamily,
    dual: &DualBasis,
    c: Vec<f64>,
    out: &mut Map<String, Value>,
) -> std::result::Result<i32, Failure> {
    let uniform = c.windows(2).all(|w| (w[0] - w[1]).abs() <= EXACT_TOL);
    let m = asd_measurement(dual, &c)?;
    let cond_err = conditional_discrimination_error(&m, INCONCLUSIVE, family)?;
    let m0 = m.effect(INCONCLUSIVE).expect("present");
    out.insert("c".into(), json!(if uniform { json!(c[0]) } else { json!(c) }));
    out.insert("uniform".into(), json!(uniform));
    out.insert("max_uniform_c".into(), json!(max_uniform_c(dual)));
    out.insert("biorthogonality_error".into(), json!(dual.biorthogonality_error(family)));
    out.insert("conditional_discrimination_error".into(), json!(cond_err));
    out.insert("inconclusive_norm".into(), json!(m0.hs_norm()));
    out.insert("inconclusive_min_eigenvalue".into(), json!(m0.min_eigenvalue()));
    out.insert("dual_basis".into(), json!(asd::states_to_json(&dual.vectors)));
    out.insert("povm".into(), to_value(&m));
    let mut code = if cond_err <= cli.tol_ratio { EXIT_OK } else { EXIT_VERIFICATION };
    match asd_to_npovm(family, dual, &c, &config(cli)) {
        Ok(inv) => {
            let err = discrimination_error(&inv.npovm, family)?;
            if err > cli.tol_ratio {
                code = EXIT_VERIFICATION;
            }
            out.insert(
                "npovm_conversion".into(),
                json!({
                    "status": "ok",
                    "c0": inv.condition.c0,
                    "projection_norm": inv.condition.projection_norm,
                    "discrimination_error": err,
                    "class": classification(&inv.npovm, cli.tol_psd),
                    "npovm": to_value(&inv.npovm),
                }),
            );
        }
        Err(Error::DegenerateC0(reason)) if uniform => {
            out.insert(
                "npovm_conversion".into(),
                json!({"status": "skipped", "reason": format!("degenerate rejection constant: {reason}")}),
            );
        }
        Err(e) => {
            let mut f = Failure::from(e);
            f.details.extend(std::mem::take(out));
            return Err(f);
        }
    }
    Ok(code)
}

fn cmd_asd(cli: &Cli, path: &Path) -> Outcome {
    let input: AsdInput = load(path)?;
    let mut out = Map::new();
    let code;
    let summary;
    match input {
        AsdInput::Family { states, c } => {
            let family = asd::family_from_json(&states)?;
            let dual = dual_basis(&family)?;
            let d = family.dim();
            let c = match c {
                None => vec![max_uniform_c(&dual); d],
                Some(Weights::Uniform(x)) => vec![x; d],
                Some(Weights::PerState(v)) => v,
            };
            out.insert("kind".into(), json!("family"));
            out.insert("dim".into(), json!(d));
            code = asd_family_report(cli, &family, &dual, c, &mut out)?;
            summary = format!("asd: {d} states, c = {}", out["c"]);
        }
        AsdInput::Commutative {
            order,
            characters,
            amplitudes,
        } => {
            let rep = asd::commutative_from_json(order, &characters, &amplitudes)?;
            let min_f2 = rep.amplitudes().iter().map(|f| f.norm_sqr()).fold(f64::INFINITY, f64::min);
            out.insert("kind".into(), json!("commutative"));
            out.insert("order".into(), json!(order));
            out.insert("min_abs_f_squared".into(), json!(min_f2));
            let min_inv = rep.amplitudes().iter().map(|f| 1.0 / f.norm_sqr()).fold(f64::INFINITY, f64::min);
            out.insert("min_abs_f_inverse_squared".into(), json!(min_inv));
            let blocks = rep.to_blocks()?;
            code = covariant_report(cli, &blocks, &mut out)?;
            summary = format!("asd: commutative group of order {order}, c = {}", out["c"]);
        }
        AsdInput::Blocks { blocks } => {
            let blocks = blocks
                .into_iter()
                .map(|b| b.into_block())
                .collect::<crate::Result<Vec<_>>>()?;
            let rep = BlockGroupRep::new(blocks)?;
            out.insert("kind".into(), json!("blocks"));
            out.insert("order".into(), json!(rep.order()));
            code = covariant_report(cli, &rep, &mut out)?;
            summary = format!("asd: group of order {}, c = {}", rep.order(), out["c"]);
        }
    }
    Ok((out, code, summary))
}

fn covariant_report(
    cli: &Cli,
    rep: &BlockGroupRep,
    out: &mut Map<String, Value>,
) -> std::result::Result<i32, Failure> {
    let cov = covariant_family(rep)?;
    let oracle = dual_basis(&cov.family)?;
    let oracle_norm = oracle.vectors[0].norm_squared();
    out.insert("t_inv".into(), json!(cov.t_inv));
    out.insert("t_inv_oracle".into(), json!(oracle_norm));
    out.insert("offdiag".into(), json!(cov.offdiag));
    out.insert("diag_error".into(), json!(cov.diag_error));
    out.insert("acceptance_spread".into(), json!(cov.acceptance_spread));
    out.insert("states".into(), json!(asd::states_to_json(cov.family.states())));
    let mut code = asd_family_report(cli, &cov.family, &cov.dual, vec![cov.c; cov.family.dim()], out)?;
    let covariance_ok = cov.acceptance_spread <= SPREAD_TOL
        && (cov.t_inv - oracle_norm).abs() <= cli.tol_ratio
        && cov.offdiag <= cli.tol_ratio;
    out.insert("covariance_ok".into(), json!(covariance_ok));
    if !covariance_ok {
        code = EXIT_VERIFICATION;
    }
    Ok(code)
}

struct Check {
    name: &'static str,
    value: f64,
    expected: f64,
    tol: f64,
}

impl Check {
    fn pass(&self) -> bool {
        (self.value - self.expected).abs() <= self.tol
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "value": self.value,
            "expected": self.expected,
            "tol": self.tol,
            "pass": self.pass(),
        })
    }
}

fn cmd_demo_pt(cli: &Cli, shots: u64) -> Outcome {
    let ex = PartialTransposeExample::new();
    let dec = ex.decomposition();
    let n = ex.npovm();
    let ps = construct_povm(&dec)?;
    let dom = implementation_domain_with_cutoff(&dec, cli.tol_fixed)?;
    let bound = acceptance_bound_check(&dec, &ps);
    let effect = |l: &str| ps.povm.effect(l).expect("constructed label").clone();
    let report = verify_implementation(&n, &ps, &dom, &config(cli))?;

    let mut checks = vec![
        Check { name: "c", value: ps.c, expected: 2.0, tol: EXACT_TOL },
        Check { name: "M0 = Γ(N0)/2", value: effect("0").max_abs_diff(&ex.m0), expected: 0.0, tol: EXACT_TOL },
        Check { name: "M1 = N1/2", value: effect("1").max_abs_diff(&ex.m1), expected: 0.0, tol: EXACT_TOL },
        Check {
            name: "M2 as displayed",
            value: ps.reject_effect().max_abs_diff(&ex.m2),
            expected: 0.0,
            tol: EXACT_TOL,
        },
        Check { name: "acceptance", value: ps.acceptance(), expected: 0.5, tol: EXACT_TOL },
        Check {
            name: "acceptance above 1/d",
            value: if bound.satisfied && bound.acceptance > bound.bound { 1.0 } else { 0.0 },
            expected: 1.0,
            tol: 0.0,
        },
        Check { name: "domain dimension", value: dom.dimension() as f64, expected: 12.0, tol: 0.0 },
    ];
    let mut discrimination: f64 = 0.0;
    for (i, rho) in [&ex.rho0, &ex.rho1].into_iter().enumerate() {
        for (j, p) in n.expectations(rho.matrix())?.into_iter().enumerate() {
            discrimination = discrimination.max((p - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    checks.push(Check { name: "Tr ρ_i N_j = δ_ij", value: discrimination, expected: 0.0, tol: EXACT_TOL });
    checks.push(Check { name: "ratio identity on the domain", value: report.max_ratio_error, expected: 0.0, tol: cli.tol_ratio });
    checks.push(Check { name: "accepted mass spread", value: report.acceptance_spread, expected: 0.0, tol: SPREAD_TOL });
    checks.push(Check { name: "mean accepted mass", value: report.acceptance, expected: 0.5, tol: SPREAD_TOL });

    let povm = ex.povm();
    let mut simulations = Map::new();
    for (i, (name, rho)) in [("rho0", &ex.rho0), ("rho1", &ex.rho1)].into_iter().enumerate() {
        if shots == 0 {
            break;
        }
        let sim = simulate_postselected(&povm, pt_example::REJECT_LABEL, rho, shots, cli.seed + i as u64)?;
        let sigma_acc = (0.25 / shots as f64).sqrt();
        checks.push(Check {
            name: if i == 0 { "acceptance rate on ρ0 (4σ)" } else { "acceptance rate on ρ1 (4σ)" },
            value: sim.acceptance_rate,
            expected: 0.5,
            tol: 4.0 * sigma_acc,
        });
        // Outcome i has conditional probability exactly 1, so its binomial σ vanishes.
        checks.push(Check {
            name: if i == 0 { "P(0 | ρ0, accepted) (4σ)" } else { "P(1 | ρ1, accepted) (4σ)" },
            value: sim.conditional_freqs[&i.to_string()],
            expected: 1.0,
            tol: EXACT_TOL,
        });
        simulations.insert(name.into(), to_value(&sim));
    }

    let first_failure = checks.iter().find(|c| !c.pass()).map(|c| c.name);
    let mut out = Map::new();
    out.insert("c".into(), json!(ps.c));
    out.insert("acceptance".into(), json!(ps.acceptance()));
    out.insert("bound".into(), json!(bound.bound));
    out.insert("max_ratio_error".into(), json!(report.max_ratio_error));
    out.insert("lemma1_spread".into(), json!(report.acceptance_spread));
    out.insert("dim_domain".into(), json!(dom.dimension()));
    out.insert("checks".into(), Value::Array(checks.iter().map(Check::to_json).collect()));
    out.insert("first_failure".into(), json!(first_failure));
    out.insert("povm".into(), to_value(&ps.povm));
    out.insert("simulations".into(), Value::Object(simulations));
    let passed = checks.iter().filter(|c| c.pass()).count();
    let summary = match first_failure {
        None => format!("demo-pt: all {passed} checks pass (c = 2, acceptance = 1/2 > 1/4)"),
        Some(name) => format!("demo-pt: {passed}/{} checks pass; first failure: {name}", checks.len()),
    };
    let code = if first_failure.is_none() { EXIT_OK } else { EXIT_VERIFICATION };
    Ok((out, code, summary))
}

fn cmd_simulate(cli: &Cli, povm: &Path, state: &Path, reject: &str, shots: u64) -> Outcome {
    let m = load_measurement(povm)?;
    let rho = DensityMatrix::new(load::<HermitianMatrix>(state)?)?;
    let sim = simulate_postselected(&m, reject, &rho, shots, cli.seed)?;
    let sigma = |p: f64, n: u64| (p * (1.0 - p) / n as f64).sqrt();
    let mut out = Map::new();
    out.insert("acceptance_rate".into(), json!(sim.acceptance_rate));
    out.insert("acceptance_sigma".into(), json!(sigma(sim.expected_acceptance, shots)));
    let sigmas: Map<String, Value> = sim
        .expected_conditional
        .iter()
        .map(|(l, p)| (l.clone(), json!(sigma(*p, sim.accepted))))
        .collect();
    out.insert("conditional_sigma".into(), Value::Object(sigmas));
    out.insert("simulation".into(), to_value(&sim));
    let summary = format!(
        "simulate: {} of {} shots accepted ({:.5}, expected {:.5})",
        sim.accepted, sim.shots, sim.acceptance_rate, sim.expected_acceptance
    );
    Ok((out, EXIT_OK, summary))
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Execution {
    let result = check_args(cli).and_then(|()| match &cli.command {
        Command::Implement { decomposition } => cmd_implement(cli, decomposition),
        Command::Invert {
            povm,
            reject,
            subspace,
            c0,
        } => cmd_invert(cli, povm, reject, subspace, *c0),
        Command::Verify {
            npovm,
            povm,
            subspace,
            reject,
        } => cmd_verify(cli, npovm, povm, subspace, reject.as_deref()),
        Command::Asd { input } => cmd_asd(cli, input),
        Command::DemoPt { shots } => cmd_demo_pt(cli, *shots),
        Command::Simulate {
            povm,
            state,
            reject,
            shots,
        } => cmd_simulate(cli, povm, state, reject, *shots),
    });

    let mut report = Map::new();
    report.insert("tool".into(), json!("npovm"));
    report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    report.insert("command".into(), json!(cli.command.name()));
    report.insert("seed".into(), json!(cli.seed));
    report.insert("samples".into(), json!(cli.samples));
    report.insert(
        "tolerances".into(),
        json!({"ratio": cli.tol_ratio, "psd": cli.tol_psd, "fixed": cli.tol_fixed}),
    );
    let (exit_code, summary) = match result {
        Ok((body, code, summary)) => {
            report.insert("status".into(), json!(if code == EXIT_OK { "ok" } else { "failed" }));
            report.insert("exit_code".into(), json!(code));
            report.extend(body);
            (code, summary)
        }
        Err(f) => {
            report.insert("status".into(), json!("error"));
            report.insert("exit_code".into(), json!(f.code));
            report.insert("error".into(), json!(f.message));
            report.extend(f.details);
            (f.code, format!("{}: error: {}", cli.command.name(), f.message))
        }
    };
    Execution {
        exit_code,
        report: Value::Object(report),
        summary,
    }
}

/// Parses arguments, runs, writes the report and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let exec = execute(&cli);
    let text = serde_json::to_string_pretty(&exec.report).expect("JSON value") + "\n";
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_PARSE;
            }
        }
        None => print!("{text}"),
    }
    eprintln!("{}", exec.summary);
    exec.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("npovm").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn demo_passes() {
        let exec = execute(&parse(&["demo-pt", "--shots", "20000"]));
        assert_eq!(exec.exit_code, 0, "{}", exec.report);
        assert_eq!(exec.report["c"], json!(2.0));
        assert_eq!(exec.report["tool"], json!("npovm"));
    }

    #[test]
    fn zero_samples_is_a_usage_error() {
        let exec = execute(&parse(&["--samples", "0", "demo-pt"]));
        assert_eq!(exec.exit_code, EXIT_PARSE);
    }

    #[test]
    fn missing_file_is_a_parse_error() {
        let exec = execute(&parse(&["implement", "/nonexistent/dec.json"]));
        assert_eq!(exec.exit_code, EXIT_PARSE);
        assert_eq!(exec.report["status"], json!("error"));
    }

    #[test]
    fn help_exits_cleanly() {
        assert_eq!(run(["npovm", "--version"]), 0);
        assert_eq!(run(["npovm", "frobnicate"]), EXIT_PARSE);
    }
}
