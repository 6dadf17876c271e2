//! Exact arithmetic for weight-3/2 cusp forms built from ternary quadratic forms.
//!
//! The crate computes representation numbers of positive-definite ternary
//! forms, mass-weighted (Siegel–Weil) averages over a spinor genus, the
//! resulting cuspidal coefficients `a_f(n) = r(n, Q) - r(n, spn(Q))`, Shimura
//! lifts of square-class coefficient series, and sign changes of `a(t p²)` as
//! `p` runs over the split or inert primes of a quadratic field.
//!
//! Modules, bottom up:
//! - [`arith`]: sieve, Möbius, Kronecker symbol, fundamental discriminants
//! - [`characters`]: Dirichlet characters with exact root-of-unity values
//! - [`quadform`]: ternary forms, lattice enumeration, automorphisms
//! - [`spinor`]: class sets, Siegel–Weil averages, theta decomposition
//! - [`shimura`]: coefficient series, the Shimura lift and its inverse, twists
//! - [`signscan`]: split/inert primes, sign-change detection, partial sums

pub mod arith;
pub mod characters;
pub mod error;
pub mod quadform;
pub mod rational;
pub mod shimura;
pub mod signscan;
pub mod spinor;

pub use arith::{FundamentalDiscriminant, PrimeSieve};
pub use characters::{CharValue, DirichletCharacter, RootOfUnity};
pub use error::{Error, Result};
pub use quadform::TernaryForm;
pub use rational::Rational;
pub use shimura::{CoefficientSeries, LiftSeries, PrimeSeries, SquareClassSeries};
pub use signscan::{PrimeSplitSequence, SignChangeReport};
pub use spinor::{ClassKind, SpinorClassSet, ThetaDecomposition};
