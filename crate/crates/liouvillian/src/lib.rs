pub mod csc;
pub mod error;
pub mod liouville;
pub mod models;
pub mod operator;
pub mod arnoldi;
pub mod spectra;
pub mod symmetry;
pub mod dynamics;
pub mod analysis;
pub mod cli;
pub mod config;
