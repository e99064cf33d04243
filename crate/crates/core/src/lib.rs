//! Laws of large numbers for functionals of random geometric graphs.
//!
//! Sample points from a density, build proximity graphs on them (nearest
//! neighbour, minimal spanning tree, Delaunay, Gabriel, relative neighbourhood,
//! sphere of influence, Voronoi), add up per-point functionals of the rescaled
//! sample, and compare `n⁻¹ H_ξ(n^{1/d} X_n)` with its limit. The limit is
//! estimated by detecting stabilization on homogeneous Poisson processes. The
//! Boolean model and on-line packing are worked out as examples.
//!
//! The guide in `book/` walks through each module.

pub mod boolean_model;
pub mod error;
pub mod functionals;
pub mod graphs;
pub mod limits;
pub mod packing_online;
pub mod point_process;
pub mod rng;
pub mod spatial;

pub use error::{Error, Result};
pub use rng::Seed;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/point_processes.md")]
    mod point_processes {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/functionals.md")]
    mod functionals {}
    #[doc = include_str!("../../../book/src/limits.md")]
    mod limits {}
    #[doc = include_str!("../../../book/src/boolean_model.md")]
    mod boolean_model {}
    #[doc = include_str!("../../../book/src/packing.md")]
    mod packing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
