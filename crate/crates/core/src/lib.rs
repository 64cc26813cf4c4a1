//! Irregular phased-array toolkit for sub-THz multi-user MIMO links.
//!
//! The crate generates thinned, domino-tiled and tetromino-tiled transmit
//! apertures, draws sparse multipath channels towards several receivers,
//! builds digital and hybrid (fully or partially connected) zero-forcing
//! precoders, and scores each configuration by its sum spectral efficiency
//! and sidelobe level. Configuration spaces are explored either
//! exhaustively (exact-cover enumeration) or with a genetic algorithm.
//!
//! Module map:
//!
//! - [`geometry`]: grids, element patterns, phase centers, steering vectors.
//! - [`tiling`]: polyomino dictionaries, exact-cover enumeration, counting,
//!   thinned sampling, connection matrices.
//! - [`channel`]: clustered multipath channel draws.
//! - [`beamforming`]: codebooks, RF selection, zero forcing, precoders.
//! - [`metrics`]: beam patterns, EIRP, sidelobe level, SINR, spectral efficiency.
//! - [`optimizer`]: Monte-Carlo evaluation, scalarized objective, GA, Pareto sweeps.
//! - [`scenario`]: experiment configuration files.

pub mod array;
pub mod beamforming;
pub mod channel;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod optimizer;
pub mod scenario;
pub mod tiling;

pub use error::{Error, Result};
