//! First-passage percolation on Cartesian powers of graphs.
//!
//! The crate evaluates generating functions of weighted graphs with
//! certified error bounds, solves for critical times, decides the sign of
//! the criterion function `f` on its triangle, samples conditioned random
//! walks, and simulates first-passage times on implicit power graphs.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod critical;
pub mod criterion;
pub mod fpp;
pub mod error;
pub mod genfun;
pub mod graph;
pub mod numeric;
pub mod par;
pub mod report;
pub mod walk;

pub use error::{Error, Result};
pub use genfun::{closed_form_m, m_eval, m_matrix, m_row, CertifiedValue, ClosedForm, SeriesPlan};
pub use graph::{ball, cartesian_product, BaseGraph, Direction, FiniteGraph, GraphSpec, VertexId};
pub use par::Execution;
