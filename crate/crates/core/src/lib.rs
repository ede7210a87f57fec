//! Strong stability for the Hospitals/Residents problem with regional caps.
//!
//! The crate provides
//!
//! - the instance model with JSON documents ([`model`]),
//! - feasibility, blocking-pair and strong-blocking-pair checks ([`stability`]),
//! - resident-oriented Gale-Shapley and capacity shrinking ([`hr`]),
//! - polynomial-time solvers for the tractable parameter classes and a
//!   dispatcher ([`solvers`]),
//! - an exhaustive oracle for small instances ([`exhaustive`]),
//! - SAT-side tooling and the hardness reductions with witness maps
//!   ([`reductions`]),
//! - seeded random instance generators ([`generate`]).
//!
//! ```
//! use hrrc_core::{model::example_g2, solvers::dispatch, SolveOutcome};
//!
//! let g2 = example_g2();
//! assert_eq!(dispatch(&g2, 12), SolveOutcome::NoneExists);
//! ```

pub mod error;
pub mod exhaustive;
pub mod generate;
pub mod hr;
pub mod model;
pub mod reductions;
pub mod solvers;
pub mod stability;

pub use error::{Error, Result};
pub use model::{Assignment, HospitalIx, Instance, InstanceClass, RegionIx, ResidentIx};
pub use solvers::SolveOutcome;
