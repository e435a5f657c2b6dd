//! Problem files: the JSON input shared by every command.

use std::path::Path;

use darboux_core::connection::ChristoffelEntry;
use darboux_core::darboux::{ChartWire, RepWire, SeedChart};
use darboux_core::expr::parse_expr;
use darboux_core::linalg::{RatMatrix, Vector};
use darboux_core::pfaff::Subspace;
use darboux_core::poly::default_names;
use darboux_core::rational::{unwrap_vec, RatStr, Rational};
use darboux_core::{Connection, Error, Expr, PForm};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    #[serde(default)]
    pub vars: Option<Vec<String>>,
    #[serde(default)]
    pub omega: Vec<OmegaTerm>,
    #[serde(default)]
    pub connection: Option<Vec<ChristoffelEntry>>,
    #[serde(default)]
    pub point: Option<Vec<RatStr>>,
    #[serde(default)]
    pub chart: Option<ChartWire>,
    #[serde(default)]
    pub subspace: Option<Vec<Vec<RatStr>>>,
    #[serde(default, rename = "S0")]
    pub s0: Option<Vec<Vec<RatStr>>>,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub samples: Option<usize>,
    /// Function whose Hessian `hessian` reports.
    #[serde(default)]
    pub u: Option<String>,
    /// Functions for `submersion`; defaults to the chart's `(y, p)`.
    #[serde(default)]
    pub functions: Option<Vec<String>>,
    #[serde(default)]
    pub expected_rank: Option<usize>,
    /// A representation to `verify`, as emitted by `convexify`.
    #[serde(default)]
    pub rep: Option<RepWire>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaTerm {
    pub index: usize,
    pub coeff: String,
}

/// A rejected input, reported with exit code 2.
#[derive(Debug)]
pub struct InputError {
    pub message: String,
    pub field: Option<String>,
    pub position: Option<usize>,
}

impl InputError {
    pub fn new(message: impl Into<String>) -> Self {
        InputError {
            message: message.into(),
            field: None,
            position: None,
        }
    }

    pub fn at(field: impl Into<String>, err: Error) -> Self {
        let position = match &err {
            Error::Syntax { pos, .. }
            | Error::UnknownIdentifier { pos, .. }
            | Error::ZeroDenominator { pos } => Some(*pos),
            _ => None,
        };
        InputError {
            message: err.to_string(),
            field: Some(field.into()),
            position,
        }
    }

    pub fn missing(field: &str) -> Self {
        InputError {
            message: format!("this command needs `{field}`"),
            field: Some(field.into()),
            position: None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": "input", "message": self.message });
        if let Some(f) = &self.field {
            v["field"] = json!(f);
        }
        if let Some(p) = self.position {
            v["position"] = json!(p);
        }
        v
    }
}

/// A parsed problem file.
pub struct Problem {
    pub file: ProblemFile,
    pub names: Vec<String>,
    pub omega: PForm,
    pub conn: Connection,
    pub point: Vector,
}

impl Problem {
    pub fn load(path: &Path) -> Result<Problem, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError::new(format!("cannot read {}: {e}", path.display())))?;
        let file: ProblemFile = serde_json::from_str(&text).map_err(|e| InputError {
            message: format!("invalid problem file: {e}"),
            field: None,
            position: Some(e.column()),
        })?;
        Problem::from_file(file)
    }

    pub fn from_file(file: ProblemFile) -> Result<Problem, InputError> {
        let n = file.n;
        if n == 0 {
            return Err(InputError {
                message: "n must be positive".into(),
                field: Some("n".into()),
                position: None,
            });
        }
        let names = match &file.vars {
            Some(v) if v.len() != n => {
                return Err(InputError {
                    message: format!("expected {n} variable names, got {}", v.len()),
                    field: Some("vars".into()),
                    position: None,
                })
            }
            Some(v) => v.clone(),
            None => default_names(n),
        };

        let mut comps = vec![Expr::zero(n); n];
        for (t, term) in file.omega.iter().enumerate() {
            let field = format!("omega[{t}]");
            if term.index == 0 || term.index > n {
                return Err(InputError {
                    message: format!("index {} is outside 1..{n}", term.index),
                    field: Some(format!("{field}.index")),
                    position: None,
                });
            }
            let c = parse_expr(&term.coeff, &names)
                .map_err(|e| InputError::at(format!("{field}.coeff"), e))?;
            comps[term.index - 1] = &comps[term.index - 1] + &c;
        }
        let omega = PForm::from_components(&comps);

        let conn = match &file.connection {
            None => Connection::flat(n),
            Some(entries) => {
                for (t, e) in entries.iter().enumerate() {
                    if [e.k, e.i, e.j].iter().any(|&i| i == 0 || i > n) {
                        return Err(InputError {
                            message: format!(
                                "Christoffel index ({},{},{}) is outside 1..{n}",
                                e.k, e.i, e.j
                            ),
                            field: Some(format!("connection[{t}]")),
                            position: None,
                        });
                    }
                }
                Connection::from_wire(n, entries, &names)
                    .map_err(|e| InputError::at("connection", e))?
            }
        };

        let point = match &file.point {
            None => vec![Rational::from_integer(0.into()); n],
            Some(p) if p.len() != n => {
                return Err(InputError {
                    message: format!("point has {} coordinates, expected {n}", p.len()),
                    field: Some("point".into()),
                    position: None,
                })
            }
            Some(p) => unwrap_vec(p),
        };
        Ok(Problem {
            file,
            names,
            omega,
            conn,
            point,
        })
    }

    pub fn chart(&self) -> Result<SeedChart, InputError> {
        let w = self
            .file
            .chart
            .as_ref()
            .ok_or_else(|| InputError::missing("chart"))?;
        SeedChart::from_wire(w, &self.names).map_err(|e| InputError::at("chart", e))
    }

    pub fn subspace(&self) -> Result<Subspace, InputError> {
        let basis = self
            .file
            .subspace
            .as_ref()
            .ok_or_else(|| InputError::missing("subspace"))?;
        if basis.iter().any(|v| v.len() != self.file.n) {
            return Err(InputError {
                message: "basis vectors must have n entries".into(),
                field: Some("subspace".into()),
                position: None,
            });
        }
        Subspace::new(
            self.point.clone(),
            basis.iter().map(|v| unwrap_vec(v)).collect(),
        )
        .map_err(|e| InputError::at("subspace", e))
    }

    /// `S0` as a symmetric matrix of the given size.
    pub fn s0(&self, size: usize) -> Result<RatMatrix, InputError> {
        let rows = self
            .file
            .s0
            .as_ref()
            .ok_or_else(|| InputError::missing("S0"))?;
        let bad = |msg: String| InputError {
            message: msg,
            field: Some("S0".into()),
            position: None,
        };
        if rows.len() != size || rows.iter().any(|r| r.len() != size) {
            return Err(bad(format!("S0 must be {size}x{size}")));
        }
        let m = if size == 0 {
            RatMatrix::zeros(0, 0)
        } else {
            RatMatrix::from_rows(&rows.iter().map(|r| unwrap_vec(r)).collect::<Vec<_>>())
        };
        if !m.is_symmetric() {
            return Err(bad("S0 must be symmetric".into()));
        }
        Ok(m)
    }

    pub fn parse(&self, field: &str, text: &str) -> Result<Expr, InputError> {
        parse_expr(text, &self.names).map_err(|e| InputError::at(field, e))
    }
}
