pub mod capacity;
pub mod classify;
pub mod cli;
pub mod geometry;
pub mod inequalities;
mod integrand;
pub mod linalg;
pub mod quadrature;
