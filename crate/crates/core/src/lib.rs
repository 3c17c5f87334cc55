//! Interval resolutions of persistence modules over finite posets.
//!
//! Modules are commutative representations of a finite poset over a prime
//! field. The crate computes right minimal approximations by
//! interval-decomposable modules, the resulting interval resolutions, the
//! Auslander-Reiten translate, and both the interval resolution global
//! dimension and the classical global dimension of the incidence algebra.

pub mod approx;
pub mod check;
pub mod classify;
pub mod cli;
pub mod error;
pub mod families;
pub mod homological;
pub mod io;
pub mod linalg;
pub mod module;
pub mod poset;

pub use error::{Error, Result};
pub use linalg::{Field, Matrix};
pub use module::{IntervalMultiset, Morphism, PersModule};
pub use poset::{Interval, Poset};
