//! Simulation of the synchronous foliated Floquet color code (sFFCC), a
//! fusion-based photonic architecture built from emitter-generated chains.
//!
//! The crate is layered bottom-up:
//!
//! - [`gf2`] and [`pauli_algebra`]: bit linear algebra, Paulis and a stabilizer tableau.
//! - [`graph_rewrite`]: graph states and the edge-split / node-split decomposition rules.
//! - [`emitter`]: the chain generation circuit and spin-noise propagation.
//! - [`fusion`]: physical and encoded (REP / RUS) fusion models.
//! - [`lattice`]: the fusion network, its syndrome graph and a small-instance oracle.
//! - [`decoder`]: supercell merging, matching and logical adjudication.
//! - [`montecarlo`]: trials, sweeps and threshold estimation.

pub mod decoder;
pub mod emitter;
pub mod fusion;
pub mod gf2;
pub mod graph_rewrite;
pub mod lattice;
pub mod montecarlo;
pub mod pauli_algebra;
