//! Numerical laboratory for mixed weak-type inequalities of Orlicz maximal
//! operators.
//!
//! The crate implements the objects needed to measure, on desk-scale
//! discretized instances, inequalities of the form
//!
//! ```text
//! uv^r({ x : M_Phi(f v)(x) / v(x) > t }) <= C * integral Phi(|f|/t) u v^r dx
//! ```
//!
//! for Young functions `Phi` with lower type `r`, and `u, v^r` in the
//! Muckenhoupt `A_1` class. The building blocks are:
//!
//! * [`young`] — Young-function calculus: evaluation, generalized inverses,
//!   convex conjugates, growth-class checks, quasi-increasing constants.
//! * [`grid`] — the `3^n` shifted dyadic grids and cube navigation.
//! * [`field`] — piecewise-constant functions and weights on a bounded box.
//! * [`weights`] — Muckenhoupt / reverse-Hölder constant scans and weight
//!   generators.
//! * [`maximal`] — Luxemburg averages and the maximal operators `M`, `M_D`,
//!   `M_Phi`, `M_{Phi,D}` and `S_Phi`.
//! * [`czdecomp`] — stopping-time machinery: level-set decompositions,
//!   `Omega_k` layers, principal cubes and instrumented claim checkers.
//! * [`verify`] — end-to-end experiment harness producing verification
//!   reports with empirical constants.
//! * [`config`] — JSON configuration parsing and field-file I/O.
//!
//! Infinite values (for example conjugates of linear-growth profiles) are
//! represented by `f64::INFINITY`, never by a large finite float.

// `!(x > 0.0)` guards are deliberate: unlike `x <= 0.0`, the negated form
// also rejects NaN inputs, which must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Loops over axis and cell indices keep the index as the object of interest
// (it feeds multi-dimensional strides), so iterator rewrites obscure intent.
#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod czdecomp;
pub mod error;
pub mod field;
pub mod grid;
pub mod maximal;
pub mod quad;
pub mod verify;
pub mod weights;
pub mod young;

pub use error::{Error, Result};
