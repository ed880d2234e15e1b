//! Hybrid quantum-classical machine-learning toolkit for desk-scale drug
//! discovery experiments.
//!
//! The crate is organized around three pipelines sharing a common substrate:
//!
//! - [`qgan`]: a GAN whose generator starts with a parameterized quantum
//!   circuit and ends with a classical head emitting molecular graphs.
//! - [`quanv`]: quanvolutional feature extraction over voxelized protein
//!   pockets, compared against frozen and trainable CNN baselines.
//! - [`qvae`]: a ligand VAE with pluggable quantum layers between the latent
//!   sample and the decoder.
//!
//! Supporting modules: [`qsim`] (statevector simulation with analytic
//! gradients), [`nn`] (dense/conv3d layers with reverse-mode gradients),
//! [`molgraph`] (molecular graphs, validity, SMILES/SDF), [`metrics`]
//! (Fréchet distance and classification metrics), and [`datasets`]
//! (loaders and seeded synthetic generators).
//!
//! Everything is deterministic: every random draw flows from an explicit
//! seed through [`rng::seeded`].

pub mod datasets;
pub mod metrics;
pub mod molgraph;
pub mod nn;
pub mod qgan;
pub mod qsim;
pub mod quanv;
pub mod qvae;
pub mod rng;
