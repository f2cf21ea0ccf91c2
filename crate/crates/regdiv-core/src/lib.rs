//! Batch analytics for regional industrial diversification panels.
//!
//! The crate covers the full pipeline: ingestion of firm/distance/macro/rail
//! tables ([`panel`]), revealed comparative advantage and industry proximity
//! ([`metrics`]), province similarity and neighbor densities ([`geo`]), the
//! industry-space graph ([`space`]), diversification-event detection and
//! descriptive statistics ([`events`]), probit / OLS / event-study / DID
//! estimators ([`econ`]), and a deterministic synthetic-data generator
//! ([`synth`]).

pub mod econ;
pub mod error;
pub mod events;
pub mod geo;
pub mod metrics;
pub mod panel;
pub mod rng;
pub mod space;
pub mod sym;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
pub use panel::{
    DistanceTable, IndustryCode, IndustryRegistry, MacroRecord, MacroTable, Panel, PanelTensor,
    ProductivityTensor, Province, ProvinceRegistry, RailTable,
};
pub use metrics::{ActivityMatrix, DiversityCounts, ProximityMatrix, RcaMatrix};
pub use geo::{NeighborWeighting, SimilarityMatrix};
pub use space::IndustrySpaceGraph;
pub use events::{BinnedCurve, EventKind, EventRecord, EventSet, JointGrid};
pub use econ::{Coefficient, Covariance, DesignBuilder, DesignMatrix, FitStats, RegressionResult};
pub use synth::ScenarioConfig;
