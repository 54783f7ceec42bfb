//! Model checking for resource-bounded alternating-time temporal logic.
//!
//! Models are concurrent game structures in which every action has a cost
//! vector over a fixed set of resources; positive components consume,
//! negative components produce. Coalition modalities carry a bound on the
//! resources the coalition may spend.

pub mod fixtures;
pub mod formula;
pub mod model;
pub mod vector;
pub mod checker;
pub mod witness;
pub mod symbolic;
pub mod oracle;
pub mod petri;
pub mod io;
