//! Seed charts `ω = a(dy¹ + Σ p_i dy^i)`, the convexification pipeline that
//! turns a chart whose leaves are `Sω`-positive into a representation
//! `ω = Σ a_i du^i` with `a_i > 0` and every `u^i` strictly `∇`-convex, and
//! exact verification of such representations.

mod chart;
mod pipeline;
mod verify;

pub use chart::{
    chart_from_generating_function, check_submersion, jacobian_at, leaf_tangent, normalize_chart,
    orient_chart, submersion_kernel, validate_seed_chart,
};
pub use pipeline::{absorb_quadratic, apply_b, apply_epsilon, apply_phi, convexify, Convexified};
pub use verify::{verify_representation, VerifyOptions};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};
use crate::forms::{exterior_derivative_of, PForm};
use crate::linalg::Vector;
use crate::rational::{self, RatStr, Rational};

/// A Pfaff–Darboux presentation `ω = a(dy¹ + p_2 dy² + ⋯ + p_k dy^k)`.
#[derive(Clone, Debug)]
pub struct SeedChart {
    pub a: Expr,
    pub y: Vec<Expr>,
    /// `p_2, ..., p_k`.
    pub p: Vec<Expr>,
}

impl SeedChart {
    pub fn new(a: Expr, y: Vec<Expr>, p: Vec<Expr>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Invalid(
                "a chart needs at least one y function".into(),
            ));
        }
        if p.len() + 1 != y.len() {
            return Err(Error::Invalid(format!(
                "expected {} p functions, got {}",
                y.len() - 1,
                p.len()
            )));
        }
        let n = a.nvars();
        if y.iter().chain(&p).any(|e| e.nvars() != n) {
            return Err(Error::DimensionMismatch(
                "chart functions live on different spaces".into(),
            ));
        }
        Ok(SeedChart { a, y, p })
    }

    pub fn k(&self) -> usize {
        self.y.len()
    }

    pub fn dim(&self) -> usize {
        self.a.nvars()
    }

    /// `dy¹ + Σ p_i dy^i`.
    pub fn normalized_form(&self) -> PForm {
        let mut w = exterior_derivative_of(&self.y[0]);
        for (p, y) in self.p.iter().zip(&self.y[1..]) {
            w = w
                .add(&exterior_derivative_of(y).scale(p))
                .expect("same dimension");
        }
        w
    }

    /// `a(dy¹ + Σ p_i dy^i)`.
    pub fn form(&self) -> PForm {
        self.normalized_form().scale(&self.a)
    }

    /// `(y¹, …, y^k, p_2, …, p_k)`.
    pub fn functions(&self) -> Vec<Expr> {
        self.y.iter().chain(&self.p).cloned().collect()
    }

    pub fn to_wire(&self, names: &[String]) -> ChartWire {
        ChartWire {
            a: self.a.display_with(names),
            y: self.y.iter().map(|e| e.display_with(names)).collect(),
            p: self.p.iter().map(|e| e.display_with(names)).collect(),
        }
    }

    pub fn from_wire(w: &ChartWire, names: &[String]) -> Result<Self> {
        let parse_all = |v: &[String]| {
            v.iter()
                .map(|s| parse_expr(s, names))
                .collect::<Result<Vec<_>>>()
        };
        SeedChart::new(parse_expr(&w.a, names)?, parse_all(&w.y)?, parse_all(&w.p)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartWire {
    #[serde(default = "one_string")]
    pub a: String,
    pub y: Vec<String>,
    #[serde(default)]
    pub p: Vec<String>,
}

fn one_string() -> String {
    "1".into()
}

/// Constants chosen by the pipeline; together with the output functions
/// they let anyone re-run every exact check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub c: Rational,
    /// `φ''(0)` for `φ(t) = t + ½ m t²`.
    pub m: Rational,
    pub b: Rational,
    pub epsilon: Rational,
    pub sampled_radius: Option<Rational>,
}

/// `ω = Σ a_i du^i`, with the leaf functions of the chart it was built from.
#[derive(Clone, Debug)]
pub struct ConvexRep {
    pub base: Vector,
    pub u: Vec<Expr>,
    pub a: Vec<Expr>,
    pub leaves: Vec<Expr>,
    pub certificate: Certificate,
}

impl ConvexRep {
    pub fn k(&self) -> usize {
        self.u.len()
    }

    pub fn form(&self) -> PForm {
        let n = self.base.len();
        self.u
            .iter()
            .zip(&self.a)
            .fold(PForm::zero(n, 1), |acc, (u, a)| {
                acc.add(&exterior_derivative_of(u).scale(a))
                    .expect("same dimension")
            })
    }

    pub fn to_wire(&self, names: &[String]) -> RepWire {
        let s = |v: &[Expr]| v.iter().map(|e| e.display_with(names)).collect();
        RepWire {
            k: self.k(),
            base: rational::wrap_vec(&self.base),
            u: s(&self.u),
            a: s(&self.a),
            leaves: s(&self.leaves),
            certificate: CertificateWire {
                c: RatStr(self.certificate.c.clone()),
                m: RatStr(self.certificate.m.clone()),
                b: RatStr(self.certificate.b.clone()),
                epsilon: RatStr(self.certificate.epsilon.clone()),
                sampled_radius: self.certificate.sampled_radius.clone().map(RatStr),
            },
        }
    }

    pub fn from_wire(w: &RepWire, names: &[String]) -> Result<Self> {
        let parse_all = |v: &[String]| {
            v.iter()
                .map(|s| parse_expr(s, names))
                .collect::<Result<Vec<_>>>()
        };
        let u = parse_all(&w.u)?;
        let a = parse_all(&w.a)?;
        let leaves = parse_all(&w.leaves)?;
        if u.len() != w.k || a.len() != w.k {
            return Err(Error::Invalid(format!(
                "representation declares k = {} but lists {} u and {} a",
                w.k,
                u.len(),
                a.len()
            )));
        }
        if w.base.len() != names.len() {
            return Err(Error::DimensionMismatch(
                "representation base point has the wrong length".into(),
            ));
        }
        Ok(ConvexRep {
            base: rational::unwrap_vec(&w.base),
            u,
            a,
            leaves,
            certificate: Certificate {
                c: w.certificate.c.0.clone(),
                m: w.certificate.m.0.clone(),
                b: w.certificate.b.0.clone(),
                epsilon: w.certificate.epsilon.0.clone(),
                sampled_radius: w.certificate.sampled_radius.as_ref().map(|r| r.0.clone()),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateWire {
    pub c: RatStr,
    pub m: RatStr,
    pub b: RatStr,
    pub epsilon: RatStr,
    #[serde(default)]
    pub sampled_radius: Option<RatStr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepWire {
    pub k: usize,
    pub base: Vec<RatStr>,
    pub u: Vec<String>,
    pub a: Vec<String>,
    pub leaves: Vec<String>,
    pub certificate: CertificateWire,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub point: Option<Vec<RatStr>>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

/// Named pass/fail checks; passes iff every check passes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sampled_radius: Option<RatStr>,
}

impl Report {
    pub fn new() -> Self {
        Report {
            passed: true,
            checks: Vec::new(),
            sampled_radius: None,
        }
    }

    pub fn pass(&mut self, name: &str) {
        self.checks.push(Check {
            name: name.into(),
            passed: true,
            witness: None,
        });
    }

    pub fn fail(
        &mut self,
        name: &str,
        point: Option<&[Rational]>,
        detail: impl Into<String>,
        value: Option<String>,
    ) {
        self.passed = false;
        self.checks.push(Check {
            name: name.into(),
            passed: false,
            witness: Some(Witness {
                point: point.map(rational::wrap_vec),
                detail: detail.into(),
                value,
            }),
        });
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}
