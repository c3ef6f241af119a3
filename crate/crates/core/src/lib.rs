//! Exact-arithmetic machinery for the space of pairs of integer binary cubic
//! forms and its invariant quadric `A1 = 0`, together with the local and
//! statistical computations built on top of it: orbit enumeration and
//! reduction, p-adic quadric densities, local solubility of the associated
//! genus-one curves, Tate's algorithm for `y^2 = x^3 + D`, root numbers of
//! cubic twists, and 2-/3-Selmer statistics over twist families.
//!
//! Coordinates follow the integer-matrix (binomial) convention throughout:
//! `F1 = r1 x^3 + 3 r2 x^2 y + 3 r3 x y^2 + r4 y^3` and likewise `F2` with
//! `r5..r8`.

pub mod acceptance;
pub mod curves;
pub mod error;
pub mod forms;
pub mod intutil;
pub mod localdata;
pub mod orbits;
pub mod rootnum;
pub mod selstats;
pub mod symbolic;
pub mod tate;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
