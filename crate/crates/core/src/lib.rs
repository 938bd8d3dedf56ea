//! Differential-mapping spiking neural network.
//!
//! Izhikevich neurons with Gaussian population coding learn, through
//! symmetric STDP on sampled arm motions, the map from joint angles and a
//! desired spatial velocity to the joint velocities that realize it. The
//! learned map then drives a simulated two-link arm to visual targets.
//!
//! | module | contents |
//! |---|---|
//! | [`izhikevich`] | neuron integration and phase-plane analysis |
//! | [`coding`] | tuning-curve bundles, encode and decode |
//! | [`plasticity`] | STDP kernels, spike pairing, weight bounds |
//! | [`network`] | the network, weight archive, summation benchmark |
//! | [`robotsim`] | planar arm, babbling, closed-loop servoing |
//! | [`eval`] | accuracy metrics and the success-rate study |
//! | [`config`] | `key = value` run configuration |

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coding;
pub mod config;
pub mod error;
pub mod eval;
pub mod izhikevich;
pub mod network;
pub mod plasticity;
pub mod robotsim;

pub use error::{Error, Result};
