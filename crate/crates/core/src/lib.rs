//! Arithmetic of the solvable Baumslag-Solitar groups `BS(1,m)`.
//!
//! `BS(1,m) = <a, t | t a t^-1 = a^m>` is realised as the matrix group of
//! `[[m^k, r], [0, 1]]` with `k` an integer and `r` in `Z[1/m]`. This crate
//! provides:
//!
//! - [`arith`]: factorization, multiplicative orders with certificates, lcm
//!   identities and the prime-power correction factor `eta`.
//! - [`bs`]: exact group elements, words, normal forms `t^-i a^l t^j` and
//!   word synthesis.
//! - [`quotient`]: the finite congruence quotients `Z/N ⋊_m Z/L` and the
//!   reduction homomorphism.
//! - [`cayley`]: flat-array Cayley graphs of those quotients, BFS distances,
//!   diameters and DOT export.
//! - [`boxspace`]: modulus chains, order/diameter growth tables and the
//!   covering construction.
//! - [`density`]: prime-set densities, Euler products and order/modulus
//!   ratio scans.
//! - [`oddorder`]: moduli in which a unit of `Z[1/m]` has odd order.
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `std` feature for
//! `std::error::Error` integration.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arith;
pub mod boxspace;
pub mod bs;
pub mod cayley;
pub mod density;
mod error;
pub mod oddorder;
pub mod quotient;
pub mod real;

pub use error::{Error, Result};
