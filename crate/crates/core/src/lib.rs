//! Monocular 6-DoF pose tracking of known objects from angled bounding boxes.
//!
//! An unscented Kalman filter on `[p, v, q, ω]` fuses the boxes produced by a
//! detector/box-tracker front end. The measurement model projects the
//! object's vertices and fits a minimum-area rectangle. Gates decide when
//! the front end has drifted and should re-detect.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod geometry;
pub mod ukf;
pub mod gating;
pub mod tracker;
pub mod frontend_sim;
pub mod metrics;
pub mod config;
pub mod runner;
