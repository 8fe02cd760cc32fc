//! Traces of Hecke operators on vector-valued Siegel cusp forms of genus 2
//! for the full modular group, computed from point counts of curves over
//! finite fields.

pub mod census;
pub mod cli;
pub mod ff;
pub mod modform1;
pub mod selftest;
pub mod sp4char;
pub mod trace2;
