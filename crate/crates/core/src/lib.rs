//! Exact computations with Pfaffian 1-forms: rank and class, Cauchy
//! characteristics, Legendrian planes, `∇`-convexity, and construction and
//! verification of convex Pfaff–Darboux representations
//! `ω = Σ a_i du^i` with `a_i > 0` and each `u^i` strictly `∇`-convex.

pub mod connection;
pub mod darboux;
pub mod error;
pub mod expr;
pub mod forms;
pub mod linalg;
pub mod models;
pub mod pfaff;
pub mod poly;
pub mod rational;

pub use connection::{Connection, SymForm};
pub use darboux::{ConvexRep, Report, SeedChart};
pub use error::{Error, Result};
pub use expr::{parse_expr, Expr};
pub use forms::PForm;
pub use linalg::RatMatrix;
pub use pfaff::{PfaffClass, Subspace};
pub use rational::Rational;
