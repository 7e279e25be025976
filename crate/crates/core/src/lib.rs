//! Exact multi-magnon states of the periodic ferromagnetic Heisenberg chain,
//! their reduced density matrices, coherence measures and the coherence
//! thermodynamics of the single-mode state.

pub mod coherence;
pub mod combinat;
pub mod error;
pub mod magnon_state;
pub mod reduced_density;
pub mod thermo;
pub mod verify;

pub use coherence::{CoherenceMeasure, CoherenceReport};
pub use combinat::{AdmissibleRange, BinomialValue, SiteList};
pub use error::{Error, Result};
pub use magnon_state::{AmplitudeTable, Budget, FullStateVector, MagnonStateSpec, MomentumVector, StateOrigin};
pub use reduced_density::{BlockDensityMatrix, CMatrix, DensityBlock, SubsystemSpec};
pub use thermo::{GridSpec, GridVariable, ThermoCurve, ThermoPoint};
pub use verify::{FamilyResult, VerifyConfig, VerifyReport};
