//! Combinatorics and numerics of parameter rays of the multicorns, the
//! connectedness loci of `f_c(z) = conj(z)^d + c`.

pub mod angles;
pub mod classifier;
pub mod cli;
pub mod dynamics;
pub mod fatou;
pub mod portraits;
pub mod render;
pub mod witness;
