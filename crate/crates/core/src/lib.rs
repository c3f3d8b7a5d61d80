//! Exact construction, certification, enumeration and sampling of vertices of
//! the polytopes of line-stochastic arrays (`Omega`) and hyperplane-stochastic
//! arrays (`Sigma`).
//!
//! All entries are exact rationals. Vertex decisions are rank decisions and are
//! never made in floating point.

pub mod array;
pub mod bounds;
pub mod certify;
pub mod designs;
mod error;
pub mod fixtures;
pub mod json;
pub mod linalg;
pub mod omega;
pub mod rng;
pub mod sample;
pub mod sigma;
pub mod simplex;

pub use array::{affine_dimension, latin_to_array, Array, Cell, Kind, PolytopeSpec, Rational};
pub use certify::{Method, VertexCertificate};
pub use error::{Error, Result};
