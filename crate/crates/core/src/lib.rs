//! Finite pasted event structures: admissible weights, two-valued states,
//! exact classical-polytope membership, generalized softmax gluing,
//! odd-cycle bounds and an empirical reconstruction pipeline.

pub mod bounds;
pub mod empirical;
pub mod error;
pub mod json;
pub mod logic;
pub mod numeric;
pub mod simplex;
pub mod softmax;
pub mod states;
pub mod weights;

pub use error::{Error, Result};
pub use logic::{cycle_logic, EventStructure};
pub use numeric::{Mode, Rational, Value, DEFAULT_TOL};
pub use weights::Weight;
