//! Exact entanglement entropies of stabilizer states on the Wen-plaquette
//! toric code with lattice dislocations.

pub mod bits;
pub mod canonical;
pub mod entropy;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod generators;
pub mod gf2;
pub mod lattice;
pub mod oracle;
pub mod pauli;
pub mod regions;
pub mod report;

pub use error::{Error, Result};
