//! Complexity measures of Boolean functions: sensitivity-type measures,
//! exact and approximate degree, spectral sensitivity, and the certificate
//! objects relating them.
//!
//! Inputs are indexed by `x = Σ x_i·2^{i−1}`, so variable `i` (0-based in
//! this API) is bit `i` of the index.

pub mod adversary;
pub mod approx;
pub mod combinatorial;
pub mod error;
pub mod family;
pub mod formula;
pub mod gamma2;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod lp;
pub mod poly;
pub mod spectral;
pub mod transform;
pub mod truth_table;

pub use error::{Error, Result};
pub use family::from_family;
pub use formula::{parse_formula, Formula, ParseError};
pub use poly::{FourierSpectrum, MultilinearPolynomial};
pub use spectral::{SensitivityGraph, SpectralResult};
pub use truth_table::TruthTable;
