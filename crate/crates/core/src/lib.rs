//! Metrical theory of Rényi-type backward continued fractions, on the desk.
//!
//! For an integer N ≥ 2 the interval map `R_N(x) = N/(1−x) − ⌊N/(1−x)⌋`
//! generates expansions with digits in {N, N+1, …}. This crate implements
//! the full calculus around that map:
//!
//! - [`expansion`]: the map, digits, convergents, exact reconstruction, and
//!   the approximation bound — dual exact-rational / floating paths;
//! - [`cylinders`]: exact cylinder intervals and measures, the
//!   Brodén–Borel–Lévy conditional law, the digit kernel, the s-sequence;
//! - [`measures`]: the invariant measure ρ_N and the tilted family ρ_{N,t};
//! - [`natural_ext`]: the invertible square extension, extended digits, its
//!   invariant measure with a closed-form rectangle CDF, and Monte Carlo
//!   invariance checks;
//! - [`transfer`]: the Perron–Frobenius operator on grid densities, the
//!   limit functional, and geometric-rate estimation;
//! - [`rscc`]: the digit Markov chain, its transition probability function
//!   and stationarity, the regularity witness, and the Gauss–Kuzmin
//!   experiment with independent operator and Monte Carlo routes;
//! - [`suite`]: the fast invariant panel behind the CLI.
//!
//! Exact identities are checked in `BigRational` arithmetic with zero
//! tolerance; floating paths exist for operator iteration and Monte Carlo
//! throughput.

pub mod cylinders;
pub mod error;
pub mod expansion;
pub mod interp;
mod mc;
pub mod measures;
pub mod natural_ext;
pub mod params;
pub mod quadrature;
pub mod rational;
pub mod rscc;
pub mod stats;
pub mod suite;
pub mod transfer;

pub use error::{Error, Result};
pub use expansion::{Convergent, Digit, Expansion};
pub use interp::{DensityForm, GridDensity, Interpolation};
pub use params::Params;
pub use rational::Rational;
