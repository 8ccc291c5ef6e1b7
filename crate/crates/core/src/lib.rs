//! Density-matrix simulation of fusing dephased linear cluster states.

pub mod closed_forms;
pub mod cluster;
pub mod densmat;
pub mod error;
pub mod figures;
pub mod fusion;
pub mod loss;
pub mod montecarlo;
pub mod noise;
pub mod strategies;
pub mod tol;
