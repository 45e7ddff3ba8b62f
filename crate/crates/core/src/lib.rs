//! Secret-key rate bounds for wiretap channels with correlated sources.
//!
//! Alice, Bob and Eve observe correlated i.i.d. sources `(A, B, E)` and Alice
//! talks to Bob over a wiretap channel `X -> (Y, Z)`. This crate computes
//! inner and outer bounds on the rate of a key that Alice and Bob can agree on
//! while keeping it hidden from Eve, and simulates the two random-binning
//! protocols that achieve the inner bounds at small blocklengths.
//!
//! The crate is `no_std` (with `alloc`) when built without the `std` feature.
//! IO, file formats and the command line live in the companion `skrates`
//! crate.
//!
//! Layout:
//!
//! - [`info`]: binary entropy, binary convolution, Gaussian capacity and a
//!   dense finite joint distribution with (conditional) mutual information.
//! - [`optim`]: grid scan plus golden-section refinement over small boxes.
//! - [`models`]: the BEC/BSC model, the binary state model and the Gaussian
//!   state model, plus the source-regime classifier.
//! - [`becbsc`]: closed-form bounds for the BEC/BSC model and the sweep table.
//! - [`state`]: bounds for the binary and Gaussian state channels.
//! - [`generic`]: the general rate expressions for arbitrary finite systems
//!   and a multi-start search over auxiliary distributions.
//! - [`sim`]: Monte Carlo simulation of the separate and joint schemes.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod becbsc;
mod bound;
mod error;
pub mod generic;
pub mod info;
pub mod models;
pub mod optim;
mod par;
mod rng;
pub mod sim;
pub mod state;

pub use bound::{Argmax, BecBscAux, BoundResult, GaussianAux, JointBranch};
pub use error::{Error, Result};
pub use info::{cond_mutual_info, gauss_cap, h2, h2_inv, star, Axis, FinitePmf, Kernel, Prob};
