#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod data;
pub mod effects;
pub mod graph;
pub mod model;
pub mod nn;
pub mod reweighter;
pub mod synth;
pub mod trainer;
