//! Numerical thermodynamic formalism for a family of three dimensional
//! partially hyperbolic horseshoes `F` and their two dimensional projection
//! map `G`.
//!
//! The crate is organised bottom-up:
//!
//! * [`domain`]: parameters, the three rectangles `R1, R2, R3` forming the
//!   projection domain `Q`, the ambient metric and the geometric constants
//!   (diameter, gaps, chain constant).
//! * [`dynamics`]: the horseshoe `F`, its inverse, the projection map `G`,
//!   branch inverses, the semiconjugacy `pi` and the subshift of finite type.
//! * [`potential`]: Hölder potentials, Birkhoff sums and the cone condition.
//! * [`transfer`]: grids, the Ruelle–Perron–Frobenius operator, eigendata and
//!   the Ulam discretisation used as an independent check.
//! * [`cone`]: the cone of locally Hölder functions, its projective metric,
//!   diameter bounds and empirical contraction of `L^3`.
//! * [`stats`]: correlations, exponential decay fits, the CLT variance and
//!   Monte-Carlo sampling of the equilibrium state.
//!
//! The crate is `no_std` compatible (with `alloc`); the default `std` feature
//! enables data parallelism through `rayon`. All reductions are performed in
//! a fixed index order, so results do not depend on the number of workers.
// negated comparisons such as `!(x > 0.0)` are used to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cone;
pub mod domain;
pub mod dynamics;
pub mod potential;
pub mod rng;
pub mod stats;
pub mod transfer;

mod par;

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use domain::{DomainInfo, Params, QPoint, RectId};
pub use dynamics::{Point3, Word};
pub use potential::Potential;
pub use transfer::{Grid, GridFn, Measure, SpectralData, TransferOperator};

pub(crate) mod prelude {
    pub(crate) use alloc::vec;
    pub(crate) use alloc::vec::Vec;
    #[allow(unused_imports)]
    pub(crate) use num_traits::Float;
}
