//! Coefficient bounds for a two-parameter family of Bazilevič-type functions
//! subordinate to a telephone-number generating function, with numerical
//! checks against Carathéodory sampling.

pub mod bazilevic;
pub mod bounds;
pub mod caratheodory;
pub mod cli;
pub mod distributions;
pub mod powerseries;
pub mod report;
pub mod telephone;
pub mod verify;
