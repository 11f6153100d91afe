//! Perfect discrimination of quantum operations.
//!
//! Given two quantum operations in Kraus form this crate decides whether
//! they can be told apart with zero error after finitely many queries,
//! builds and simulates an explicit protocol that does so, and estimates
//! the minimal number of queries through q-maximal fidelities. For
//! isometries the same quantities are computed geometrically from the
//! q-numerical range of `U0^dag U1`.

pub mod catalog;
pub mod disjoint;
pub mod discrimination;
pub mod error;
pub mod fidelity;
pub mod qfidelity;
pub mod qrange;
pub mod quantcore;
pub mod random;
pub mod span;

pub use error::{Error, Result};
