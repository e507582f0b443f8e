#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod commands;
pub mod config;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod fockspace;
pub mod model;
pub mod numeric;
pub mod resolution;
pub mod revivals;
pub mod selftest;
pub mod wavefunction;
