//! Data-driven tuning of fractional-order PID controllers.
//!
//! Given one recorded input/output pair from an unknown linear plant, the
//! ITAE (or IAE) of the closed loop under *any* candidate controller can be
//! evaluated without further experiments: the data and the candidate define a
//! fictitious reference signal, and deconvolving the recorded output by it
//! yields the candidate's closed-loop impulse response. A particle swarm then
//! minimizes that index over the five FO-PID parameters.
//!
//! Modules, bottom-up:
//!
//! * [`lti`]: sequences, transfer functions, Tustin, truncated (de)convolution
//! * [`frac`]: Oustaloup filter and FO-PID discretization
//! * [`fictref`]: fictitious reference and estimated closed-loop response
//! * [`objective`]: ITAE/IAE indices, time weights, noise-bias split
//! * [`optimize`]: particle swarm
//! * [`pipeline`]: tuning strategies, evaluation, comparison report
//! * [`io`]: config, CSV and plant file formats

pub mod error;
pub mod fictref;
pub mod frac;
pub mod io;
pub mod lti;
pub mod objective;
pub mod optimize;
pub mod pipeline;

pub use error::{Error, Result};
pub use fictref::{DataRecord, FictitiousData};
pub use frac::{FoPidParams, OustaloupConfig};
pub use lti::{ContinuousTf, DiscreteTf, Sequence};
pub use objective::{WeightKind, WeightScheme};
pub use optimize::{Bounds, PsoConfig};
pub use pipeline::{Criterion, Plant, PlantModel, TuningConfig, TuningOutcome};
