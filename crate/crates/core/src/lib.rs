//! Spontaneous-heating bounds on gravity-related wave-function collapse.
//!
//! * [`quantities`]: SI quantities with dimensions, unit parsing, constants, materials.
//! * [`models`]: Diósi-Penrose and classical-channel heating laws and their inversion.
//! * [`heatleak`]: cryostat heat-leak fits, background subtraction, bootstrap.
//! * [`catalog`]: experimental constraints, ranking, exclusion-plot datasets.
//! * [`cli`]: the `collapse-bounds` command line.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod heatleak;
pub mod models;
pub mod quantities;

pub use error::{Error, Result};
pub use models::{HeatingModel, LengthBound, ModelKind};
pub use quantities::{parse_quantity, Dimension, Material, PhysicalConstants, Quantity};
