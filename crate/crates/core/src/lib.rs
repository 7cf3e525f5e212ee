//! Toric minimal model program and exceptional collections on toric
//! Deligne-Mumford stacks, with exact verification by sheaf cohomology.
//!
//! All arithmetic is exact: integers are arbitrary precision where it
//! matters and rationals are `BigRational`.

#![allow(clippy::needless_range_loop)]

pub mod builtin;
pub mod cohomology;
pub mod collections;
pub mod divisors;
pub mod error;
pub mod fan;
pub mod io;
pub mod lattice;
pub mod lp;
pub mod mmp;
pub mod pipeline;
pub mod verify;

pub use cohomology::{CohomologyTable, ExtVerdict, Method, PushforwardDatum, Restriction};
pub use collections::{Block, CollectionObject, ExceptionalCollection, Provenance, Shape};
pub use divisors::{DivisorClass, Rational};
pub use error::{Error, Result};
pub use fan::{Diagnostics, StackyFan, ValidateOptions, Violation, Wall};
pub use lattice::{FiniteAbelianGroup, IntMatrix};
pub use mmp::{MmpOptions, MmpStep, StepKind, WallRelation};
pub use pipeline::{pipeline, PipelineConfig, PipelineOutput};
pub use verify::{PairStatus, VerificationReport};
