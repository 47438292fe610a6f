pub mod chain;
pub mod coarse_grain;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod lattice;
mod linalg;
pub mod newton_wigner;
pub mod quadrature;
pub mod stats;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/gaussian.md")]
    mod gaussian {}
    #[doc = include_str!("../../../book/src/coarse_graining.md")]
    mod coarse_graining {}
    #[doc = include_str!("../../../book/src/newton_wigner.md")]
    mod newton_wigner {}
    #[doc = include_str!("../../../book/src/fock.md")]
    mod fock {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
