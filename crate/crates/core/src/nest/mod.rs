//! Balls, sticks and the two nests.
//!
//! Every single fault of a [`ScheduledCircuit`] is propagated to the
//! measurements it flips. A [`MeasurementSet`] whose members contain an odd
//! number of flips is a detection event, drawn as a ball. Each fault then
//! joins the balls it lights up per nest kind:
//!
//! * two balls: a stick between them;
//! * one ball: a stick to the boundary the set is linked to;
//! * more than two: a stick for every pair, counted in [`NestStats::cliques`].
//!
//! Boundary sets are not detectors. A fault that lights no ball adds nothing,
//! even when it flips random or terminal results.
//!
//! Sticks with the same endpoints are merged and keep every contributing
//! fault, so the graph can be traced back to physical errors.
//!
//! [`ScheduledCircuit`]: crate::circuit::ScheduledCircuit
//! [`MeasurementSet`]: crate::circuit::MeasurementSet

mod build;
mod errors;
mod propagate;

use serde::Serialize;

use crate::circuit::SetId;
use crate::pauli_core::LocationId;
use crate::program::{BoundaryId, NestKind, Site};

pub use build::{build_nests, evaluate_detection_events, Detection, NestError, NestStats};
pub use errors::{enumerate_error_locations, ErrorLocation, Fault, Weight};
pub use propagate::{propagate_batch, propagate_error};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Ball(SetId),
    Boundary(BoundaryId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ball {
    pub set: SetId,
    pub site: Site,
    pub round: u32,
    pub closing: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Contributor {
    pub location: LocationId,
    pub fault: Fault,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stick {
    /// Always a ball; `a < b`.
    pub a: Endpoint,
    pub b: Endpoint,
    pub weight: Weight,
    pub contributors: Vec<Contributor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nest {
    pub kind: NestKind,
    /// Sorted by set id.
    pub balls: Vec<Ball>,
    /// Sorted by endpoints.
    pub sticks: Vec<Stick>,
    /// Declared boundaries of this kind, sorted.
    pub boundaries: Vec<BoundaryId>,
}

impl Nest {
    pub fn empty(kind: NestKind) -> Self {
        Nest { kind, balls: Vec::new(), sticks: Vec::new(), boundaries: Vec::new() }
    }

    pub fn ball(&self, set: SetId) -> Option<&Ball> {
        self.balls.binary_search_by_key(&set, |b| b.set).ok().map(|k| &self.balls[k])
    }

    pub fn stick(&self, a: Endpoint, b: Endpoint) -> Option<&Stick> {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.sticks.binary_search_by(|s| (s.a, s.b).cmp(&key)).ok().map(|k| &self.sticks[k])
    }
}
