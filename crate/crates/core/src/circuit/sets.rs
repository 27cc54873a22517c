use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{CircuitError, MeasRole, ScheduledCircuit};
use crate::pauli_core::LocationId;
use crate::program::{BoundaryId, End, NestKind, Program, Site, StabRound, Start};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SetId(pub u32);

/// Measurements whose product is `+1` when no error occurs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementSet {
    pub id: SetId,
    pub nest: NestKind,
    pub site: Site,
    /// Latest round among the members.
    pub round: u32,
    /// Pairs a final stabilizer result with the data measurements that end it.
    pub closing: bool,
    pub members: Vec<LocationId>,
    /// Boundary a lone detection event in this set connects to.
    pub link: Option<BoundaryId>,
}

impl MeasurementSet {
    pub fn is_boundary_linked(&self) -> bool {
        self.link.is_some()
    }
}

#[derive(Clone, Debug, Default)]
pub struct SetSchedule {
    pub sets: Vec<MeasurementSet>,
    /// Random or terminal measurements absorbed by each boundary.
    pub boundary_sets: BTreeMap<BoundaryId, Vec<LocationId>>,
    /// Interior sets containing each measurement.
    pub membership: HashMap<LocationId, Vec<SetId>>,
}

impl SetSchedule {
    pub fn set(&self, id: SetId) -> &MeasurementSet {
        &self.sets[id.0 as usize]
    }

    pub fn sets_of(&self, loc: LocationId) -> &[SetId] {
        self.membership.get(&loc).map_or(&[], Vec::as_slice)
    }

    pub fn boundary_sets_of(&self, loc: LocationId) -> impl Iterator<Item = BoundaryId> + '_ {
        self.boundary_sets.iter().filter(move |(_, ms)| ms.contains(&loc)).map(|(b, _)| *b)
    }

    fn push(&mut self, mut set: MeasurementSet) {
        set.id = SetId(self.sets.len() as u32);
        set.members.sort();
        for &m in &set.members {
            self.membership.entry(m).or_default().push(set.id);
        }
        self.sets.push(set);
    }
}

/// Groups every measurement of the circuit into sets and boundary sets.
pub fn assign_sets(
    p: &Program,
    frames: &[usize],
    stabs: &[StabRound],
    circuit: &ScheduledCircuit,
) -> Result<SetSchedule, CircuitError> {
    let mut stab_meas = HashMap::new();
    let mut data_meas = HashMap::new();
    for m in &circuit.measurements {
        let map = if m.role == MeasRole::Stabilizer { &mut stab_meas } else { &mut data_meas };
        map.insert((m.site, m.round), m.location);
    }
    let directive = |round: u32, s: Site| p.frames[frames[round as usize]].cells[p.index(s)];
    let data_link = |round: u32, qs: &[Site]| qs.iter().find_map(|&q| directive(round, q).boundary);
    let data = |round: u32, qs: &[Site]| -> Vec<LocationId> { qs.iter().map(|&q| data_meas[&(q, round)]).collect() };

    let by_round: HashMap<(Site, u32), &StabRound> = stabs.iter().map(|st| ((st.site, st.round), st)).collect();
    let mut out = SetSchedule::default();
    for st in stabs {
        let (s, r) = (st.site, st.round);
        let nest = s.kind().nest().expect("stabilizers live on syndrome sites");
        let m = stab_meas[&(s, r)];
        let own = directive(r, s).boundary;
        let blank = |members, link, closing| MeasurementSet { id: SetId(0), nest, site: s, round: r, closing, members, link };
        match st.start {
            Start::Deterministic => out.push(blank(vec![m], own.or(data_link(r, &st.support)), false)),
            Start::Random => {
                let b = own.ok_or(CircuitError::MissingBoundary { site: s, round: r, what: "random first result" })?;
                out.boundary_sets.entry(b).or_default().push(m);
            }
            Start::Continues => {
                let prev = by_round[&(s, r - 1)];
                let mut members = vec![stab_meas[&(s, r - 1)], m];
                members.extend(data(r - 1, &prev.trimmed));
                out.push(blank(members, own.or(data_link(r - 1, &prev.trimmed)), false));
            }
        }
        match st.end {
            End::Continues => {}
            End::Closing => {
                let mut members = vec![m];
                members.extend(data(r, &st.support));
                out.push(blank(members, own.or(data_link(r, &st.support)), true));
            }
            End::Terminal => {
                let b = own.ok_or(CircuitError::MissingBoundary { site: s, round: r, what: "unpaired last result" })?;
                out.boundary_sets.entry(b).or_default().push(m);
            }
        }
    }
    for v in out.boundary_sets.values_mut() {
        v.sort();
    }
    Ok(out)
}
