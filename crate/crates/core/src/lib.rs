//! Exact-arithmetic engine for flat deformations of monomial ideals.
//!
//! The crate is organized bottom-up:
//!
//! - [`ring`]: rationals, truncated q-series, sparse Laurent polynomials.
//! - [`theta`]: the theta series `g`, its product form, `f_1` and `f_{n,k}`.
//! - [`funcreal`]: the functional realization `psi` and its product.
//! - [`feq`]: functional equations and relation spaces.
//! - [`algebra`]: cutoff graded algebras, ideal families, graded dimensions.
//! - [`rewrite`]: the monomial rewriting system on `x` and `ybar`.
//! - [`constraints`]: two-route reduction of `x_i x_{i+1} x_{i+2}`.
//! - [`cli`]: configuration, ideal-spec parsing and JSON reports.

pub mod algebra;
pub mod cli;
pub mod constraints;
pub mod error;
pub mod feq;
pub mod funcreal;
pub mod linalg;
pub mod report;
pub mod rewrite;
pub mod ring;
pub mod theta;

pub use error::{Error, Result};
