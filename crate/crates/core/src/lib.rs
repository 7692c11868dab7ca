//! Certified lower and upper bounds for Banach–Mazur distances between
//! spaces of continuous functions, built on exact rational feasibility
//! checking and explicit operator-norm evaluation.

pub mod certifier;
pub mod closed_form;
pub mod linalg;
pub mod lp;
pub mod rational;
pub mod real;
pub mod systems;
pub mod upper;
