//! Capped-precision p-adic arithmetic and the syntomic-regulator pipeline for
//! a Gamma1(3) family of elliptic curves.
//!
//! The crate is organised bottom-up:
//!
//! * [`padic`] / [`eis`]: scalars. `PadicNum` tracks a guaranteed absolute
//!   precision through every operation; `EisNum` adjoins a primitive cube
//!   root of unity `nu` with `nu^2 + nu + 1 = 0`.
//! * [`ring`]: a small ring-object abstraction so series code is generic over
//!   exact rationals, `Z_p`, and `Z_p[nu]`.
//! * [`series`]: truncated Laurent series with per-coefficient precision,
//!   plus the semilinear substitution `t -> c * t^p`.
//! * [`special`]: hypergeometric, p-adic polylogarithm (series, evaluation at
//!   units, overconvergent x-form), `log_sigma`, the j-invariant q-expansion
//!   and the Tate period of the family.
//! * [`filfmic`]: filtered Frobenius modules with integrable connection given
//!   by explicit matrices, with horizontality and transversality checkers.
//! * [`curve`]: exact function-field symbols (divisors, tame symbols, and
//!   reduction of `df/f ^ dg/g` to the de Rham basis).
//! * [`family`]: the concrete elliptic family `y^2 = x^3 + (3x + 4(1-t))^2`:
//!   Gauss-Manin matrix, normalised basis, `tau`, and the two Frobenius
//!   presentations.
//! * [`regulator`]: the boundary-value problems for the regulator
//!   coefficients `E1`, `E2` and the output pair `eps1`, `eps2`.
//! * [`jsonrep`]: deterministic JSON encodings shared by the command-line
//!   tools.
//!
//! Precision policy: operations never report more precision than the inputs
//! justify. Computations that drop a convergent tail cap the reported
//! precision by the valuation bound of the first dropped term.

pub mod curve;
pub mod eis;
pub mod err;
pub mod family;
pub mod filfmic;
pub mod jsonrep;
pub mod padic;
pub mod regulator;
pub mod ring;
pub mod series;
pub mod special;

pub use err::RegError;
