//! Dispatch from a parsed problem to the library, producing a JSON report.

use clap::ValueEnum;
use darboux_core::darboux::{
    chart_from_generating_function, check_submersion, convexify, jacobian_at, submersion_kernel,
    validate_seed_chart, verify_representation, VerifyOptions,
};
use darboux_core::linalg::{self, RatMatrix};
use darboux_core::pfaff::{self, LegSearch, Subspace};
use darboux_core::rational;
use darboux_core::{connection, ConvexRep, Error, Expr, SymForm};
use serde_json::{json, Value};

use crate::problem::{InputError, Problem};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Rank,
    Kernel,
    Cauchy,
    Bform,
    LegCheck,
    LegSample,
    LegFindpos,
    Hessian,
    Somega,
    ChartValidate,
    ChartGenfn,
    Convexify,
    Verify,
    Submersion,
}

/// Run-time settings after merging flags over the problem file.
#[derive(Clone, Debug)]
pub struct Settings {
    pub seed: u64,
    pub samples: usize,
    pub budget: usize,
}

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_BUDGET: usize = 1000;

/// A finished command: its JSON report and whether it counts as success.
pub struct Outcome {
    pub report: Value,
    pub success: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome {
            report,
            success: true,
        }
    }

    fn verdict(report: Value, success: bool) -> Self {
        Outcome { report, success }
    }
}

pub enum Failure {
    Input(InputError),
    /// A mathematical failure, reported with exit code 1.
    Math(Value),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::HypothesisViolated { step, reason } => Failure::Math(
                json!({ "error": "hypothesis_violated", "step": step, "reason": reason }),
            ),
            Error::StepFailed { step, reason } => {
                Failure::Math(json!({ "error": "step_failed", "step": step, "reason": reason }))
            }
            Error::Pole | Error::FormVanishes | Error::EmptyPairing => {
                Failure::Math(json!({ "error": "degenerate", "reason": e.to_string() }))
            }
            other => Failure::Input(InputError::new(other.to_string())),
        }
    }
}

pub fn run(command: Command, problem: &Problem, settings: &Settings) -> Result<Outcome, Failure> {
    let x = &problem.point;
    let omega = &problem.omega;
    match command {
        Command::Rank => {
            let class = pfaff::pfaff_class(omega, x)?;
            let mut v = json!({
                "n": class.n,
                "k": class.k,
                "pfaff_rank": class.pfaff_rank(),
                "contact": class.is_contact(),
                "identically_degenerate": class.identically_degenerate,
            });
            if let Some(w) = &class.warning {
                v["warning"] = json!(w);
            }
            Ok(Outcome::ok(v))
        }
        Command::Kernel => Ok(Outcome::ok(subspace_json(&pfaff::kernel_at(omega, x)?))),
        Command::Cauchy => Ok(Outcome::ok(subspace_json(&pfaff::cauchy_at(omega, x)?))),
        Command::Bform => {
            let b = pfaff::bform_at(omega, x)?;
            Ok(Outcome::ok(json!({
                "basis": b.basis.iter().map(|v| rational::wrap_vec(v)).collect::<Vec<_>>(),
                "matrix": matrix_json(&b.matrix),
            })))
        }
        Command::LegCheck => {
            let w = problem.subspace()?;
            let legendrian = pfaff::is_legendrian(omega, x, &w)?;
            Ok(Outcome::verdict(
                json!({ "legendrian": legendrian }),
                legendrian,
            ))
        }
        Command::LegSample => {
            let k = pfaff::pfaff_class(omega, x)?.k;
            let s = problem.s0(k - 1)?;
            let plane = pfaff::sample_legendrian(omega, x, &s)?;
            Ok(Outcome::ok(
                json!({ "plane": subspace_json(&plane), "parameter_count": k * (k - 1) / 2 }),
            ))
        }
        Command::LegFindpos => {
            match pfaff::find_positive_legendrian(
                omega,
                x,
                &problem.conn,
                settings.budget,
                settings.seed,
            )? {
                LegSearch::Found {
                    plane,
                    parameter,
                    restricted,
                    samples_tried,
                } => Ok(Outcome::ok(json!({
                    "status": "found",
                    "plane": subspace_json(&plane),
                    "parameter": matrix_json(&parameter),
                    "restricted": matrix_json(&restricted),
                    "samples_tried": samples_tried,
                }))),
                LegSearch::Empty { reason } => Ok(Outcome::verdict(
                    json!({ "status": "empty", "reason": reason }),
                    false,
                )),
                LegSearch::Inconclusive { samples_tried } => Ok(Outcome::verdict(
                    json!({ "status": "inconclusive", "samples_tried": samples_tried }),
                    false,
                )),
            }
        }
        Command::Hessian => {
            let text = problem
                .file
                .u
                .as_deref()
                .ok_or_else(|| InputError::missing("u"))?;
            let u = problem.parse("u", text)?;
            let h = connection::hessian(&u, &problem.conn)?;
            sym_outcome(&h, problem)
        }
        Command::Somega => {
            let s = connection::s_omega(omega, &problem.conn)?;
            sym_outcome(&s, problem)
        }
        Command::ChartValidate => {
            let chart = problem.chart()?;
            let report = validate_seed_chart(omega, &chart, x);
            let passed = report.passed;
            Ok(Outcome::verdict(
                serde_json::to_value(report).expect("report serializes"),
                passed,
            ))
        }
        Command::ChartGenfn => {
            let chart = problem.chart()?;
            let s0 = problem.s0(chart.k().saturating_sub(1))?;
            let built = chart_from_generating_function(omega, &chart, x, &s0)?;
            Ok(Outcome::ok(
                serde_json::to_value(built.to_wire(&problem.names)).expect("chart serializes"),
            ))
        }
        Command::Convexify => {
            let chart = problem.chart()?;
            let opts = VerifyOptions {
                samples: settings.samples,
                seed: settings.seed,
            };
            let out = convexify(omega, &problem.conn, &chart, x, &opts)?;
            let mut v =
                serde_json::to_value(out.rep.to_wire(&problem.names)).expect("rep serializes");
            v["report"] = serde_json::to_value(&out.report).expect("report serializes");
            Ok(Outcome::verdict(v, out.report.passed))
        }
        Command::Verify => {
            let wire = problem
                .file
                .rep
                .as_ref()
                .ok_or_else(|| InputError::missing("rep"))?;
            let rep =
                ConvexRep::from_wire(wire, &problem.names).map_err(|e| InputError::at("rep", e))?;
            let opts = VerifyOptions {
                samples: settings.samples,
                seed: settings.seed,
            };
            let report = verify_representation(omega, &rep, &problem.conn, &rep.base, &opts);
            let passed = report.passed;
            Ok(Outcome::verdict(
                serde_json::to_value(report).expect("report serializes"),
                passed,
            ))
        }
        Command::Submersion => {
            let functions: Vec<Expr> = match &problem.file.functions {
                Some(list) => list
                    .iter()
                    .enumerate()
                    .map(|(i, t)| problem.parse(&format!("functions[{i}]"), t))
                    .collect::<Result<_, _>>()?,
                None => problem.chart()?.functions(),
            };
            let expected = problem.file.expected_rank.unwrap_or(functions.len());
            let rank = jacobian_at(&functions, x)?.rank();
            let ok = check_submersion(&functions, x, expected)?;
            let kernel = submersion_kernel(&functions, x)?;
            Ok(Outcome::verdict(
                json!({ "rank": rank, "expected_rank": expected, "submersion": ok, "kernel": subspace_json(&kernel) }),
                ok,
            ))
        }
    }
}

fn sym_outcome(q: &SymForm, problem: &Problem) -> Result<Outcome, Failure> {
    let at = q.eval(&problem.point)?;
    let pd = linalg::is_pd(&at)?;
    Ok(Outcome::ok(json!({
        "symbolic": q.to_strings(&problem.names),
        "at_point": matrix_json(&at),
        "positive_definite": pd,
    })))
}

fn subspace_json(s: &Subspace) -> Value {
    serde_json::to_value(s.to_wire()).expect("subspace serializes")
}

fn matrix_json(m: &RatMatrix) -> Value {
    json!(m
        .to_rows()
        .iter()
        .map(|r| rational::wrap_vec(r))
        .collect::<Vec<_>>())
}
