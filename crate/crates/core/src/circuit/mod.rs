//! Compiles an expanded frame sequence into a scheduled Clifford circuit.
//!
//! Every round is laid out as up to eight time steps:
//!
//! | step | contents |
//! |------|----------|
//! | init | ancilla preparation, `ADD_*` data preparation |
//! | 1..4 | one CNOT layer per schedule direction |
//! | meas | ancilla measurement, `TRIM_*` data measurement, `HAD` |
//! | swap | data ↔ channel, then channel ↔ destination |
//!
//! Steps without any non-idle gate are dropped. Every qubit that holds
//! state during a kept step gets an `IDLE` event when nothing else touches
//! it, so each step has one located event per live qubit.

mod sets;

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use crate::pauli_core::{Basis, GateEvent, GateKind, LocationId, Qubit};
use crate::program::{lifecycle, Command, Program, RoundPlan, Site, SiteKind, StabRound};

pub use sets::{assign_sets, MeasurementSet, SetId, SetSchedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasRole {
    Stabilizer,
    Data,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasInfo {
    pub location: LocationId,
    pub qubit: Qubit,
    pub site: Site,
    pub round: u32,
    pub basis: Basis,
    pub role: MeasRole,
}

#[derive(Clone, Debug, Default)]
pub struct ScheduledCircuit {
    pub num_qubits: usize,
    /// Lattice site of each qubit id.
    pub sites: Vec<Site>,
    /// Events ordered by time; `events[k].location == LocationId(k)`.
    pub events: Vec<GateEvent>,
    /// Event index range of each time step.
    pub steps: Vec<Range<usize>>,
    /// Round of each time step.
    pub step_round: Vec<u32>,
    pub measurements: Vec<MeasInfo>,
    pub(crate) meas_index: HashMap<LocationId, usize>,
}

impl ScheduledCircuit {
    pub fn event(&self, loc: LocationId) -> &GateEvent {
        &self.events[loc.0 as usize]
    }

    pub fn measurement(&self, loc: LocationId) -> Option<&MeasInfo> {
        self.meas_index.get(&loc).map(|&k| &self.measurements[k])
    }

    pub fn qubit(&self, site: Site) -> Option<Qubit> {
        self.sites.binary_search(&site).ok().map(|q| q as Qubit)
    }

    pub fn round_of(&self, loc: LocationId) -> u32 {
        self.step_round[self.event(loc).time as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("{what} of the stabilizer at {site} in round {round} has no boundary id")]
    MissingBoundary { site: Site, round: u32, what: &'static str },
    #[error("qubit {site} is used twice in one time step of round {round}")]
    DoubleBooked { site: Site, round: u32 },
    #[error(transparent)]
    Expand(#[from] crate::program::ExpandError),
}

const INIT: usize = 0;
const MEAS: usize = 5;
const SWAP1: usize = 6;
const SWAP2: usize = 7;
const LAST: usize = 7;

#[derive(Clone, Copy)]
enum SiteGate {
    InitZ(Site),
    InitX(Site),
    Hadamard(Site),
    Cnot(Site, Site),
    Swap(Site, Site),
    MeasZ(Site),
    MeasX(Site),
}

impl SiteGate {
    fn sites(self) -> ([Site; 2], usize) {
        match self {
            SiteGate::Cnot(a, b) | SiteGate::Swap(a, b) => ([a, b], 2),
            SiteGate::InitZ(a) | SiteGate::InitX(a) | SiteGate::Hadamard(a) | SiteGate::MeasZ(a) | SiteGate::MeasX(a) => {
                ([a, a], 1)
            }
        }
    }
}

/// Per-round layout before qubit ids are assigned.
struct RoundLayout {
    gates: [Vec<SiteGate>; LAST + 1],
    /// Inclusive step intervals in which each site holds state.
    active: Vec<(Site, usize, usize)>,
}

fn layout_round(p: &Program, plan: &RoundPlan) -> RoundLayout {
    let frame = &p.frames[plan.frame];
    let schedule = p.schedule();
    let mut gates: [Vec<SiteGate>; LAST + 1] = Default::default();
    let mut active = Vec::new();

    for (k, ex) in plan.extract.iter().enumerate() {
        let Some(ex) = ex else { continue };
        let s = p.site(k);
        let primal = s.kind() == SiteKind::Primal;
        gates[INIT].push(if primal { SiteGate::InitX(s) } else { SiteGate::InitZ(s) });
        for &(dir, n) in ex {
            let step = 1 + schedule.0.iter().position(|&d| d == dir).expect("schedule is a permutation");
            gates[step].push(if primal { SiteGate::Cnot(s, n) } else { SiteGate::Cnot(n, s) });
        }
        gates[MEAS].push(if primal { SiteGate::MeasX(s) } else { SiteGate::MeasZ(s) });
        active.push((s, INIT, MEAS));
    }

    for (k, d) in frame.cells.iter().enumerate() {
        let s = p.site(k);
        if s.kind() != SiteKind::Data {
            continue;
        }
        let live = plan.live_before[k];
        match d.command {
            Command::AddX | Command::AddZ => {
                gates[INIT].push(if d.command == Command::AddX { SiteGate::InitX(s) } else { SiteGate::InitZ(s) });
                active.push((s, INIT, LAST));
            }
            Command::TrimX | Command::TrimZ if live => {
                gates[MEAS].push(if d.command == Command::TrimX { SiteGate::MeasX(s) } else { SiteGate::MeasZ(s) });
                active.push((s, INIT, MEAS));
            }
            Command::Had if live => {
                gates[MEAS].push(SiteGate::Hadamard(s));
                active.push((s, INIT, LAST));
            }
            Command::Swap(_) if live => active.push((s, INIT, SWAP1)),
            Command::Active if live => active.push((s, INIT, LAST)),
            _ => {}
        }
    }

    for m in &plan.swaps {
        gates[SWAP1].push(SiteGate::Swap(m.source, m.channel));
        gates[SWAP2].push(SiteGate::Swap(m.channel, m.dest));
        active.push((m.channel, SWAP1, SWAP2));
        active.push((m.dest, SWAP2, LAST));
    }
    RoundLayout { gates, active }
}

/// Builds the circuit for an expanded frame sequence.
pub fn build_circuit(p: &Program, plans: &[RoundPlan]) -> Result<ScheduledCircuit, CircuitError> {
    let layouts: Vec<RoundLayout> = plans.iter().map(|plan| layout_round(p, plan)).collect();
    let mut used = BTreeSet::new();
    for l in &layouts {
        for g in l.gates.iter().flatten() {
            let (s, n) = g.sites();
            used.extend(&s[..n]);
        }
    }
    let sites: Vec<Site> = used.into_iter().collect();
    let qid = |s: Site| sites.binary_search(&s).expect("site is used") as Qubit;

    let mut c = ScheduledCircuit { num_qubits: sites.len(), ..Default::default() };
    for (round, l) in layouts.iter().enumerate() {
        for (step, gs) in l.gates.iter().enumerate() {
            if gs.is_empty() {
                continue;
            }
            let time = c.steps.len() as u32;
            let mut kinds: Vec<(Qubit, GateKind)> = Vec::new();
            let mut busy = HashMap::new();
            for &g in gs {
                let (ss, n) = g.sites();
                for &s in &ss[..n] {
                    if busy.insert(s, ()).is_some() {
                        return Err(CircuitError::DoubleBooked { site: s, round: round as u32 });
                    }
                }
                let kind = match g {
                    SiteGate::InitZ(a) => GateKind::InitZ(qid(a)),
                    SiteGate::InitX(a) => GateKind::InitX(qid(a)),
                    SiteGate::Hadamard(a) => GateKind::Hadamard(qid(a)),
                    SiteGate::MeasZ(a) => GateKind::MeasZ(qid(a)),
                    SiteGate::MeasX(a) => GateKind::MeasX(qid(a)),
                    SiteGate::Cnot(a, b) => GateKind::Cnot { control: qid(a), target: qid(b) },
                    SiteGate::Swap(a, b) => GateKind::Swap(qid(a), qid(b)),
                };
                kinds.push((kind.qubits().into_iter().min().expect("nonempty"), kind));
            }
            for &(s, from, to) in &l.active {
                if (from..=to).contains(&step) && !busy.contains_key(&s) {
                    busy.insert(s, ());
                    kinds.push((qid(s), GateKind::Idle(qid(s))));
                }
            }
            kinds.sort_by_key(|(q, _)| *q);
            let start = c.events.len();
            for (_, kind) in kinds {
                let location = LocationId(c.events.len() as u32);
                if let Some((basis, q)) = kind.measurement() {
                    let site = sites[q as usize];
                    let role = if site.kind() == SiteKind::Data { MeasRole::Data } else { MeasRole::Stabilizer };
                    c.meas_index.insert(location, c.measurements.len());
                    c.measurements.push(MeasInfo { location, qubit: q, site, round: round as u32, basis, role });
                }
                c.events.push(GateEvent { kind, time, location });
            }
            c.steps.push(start..c.events.len());
            c.step_round.push(round as u32);
        }
    }
    c.sites = sites;
    Ok(c)
}

/// A program compiled for a fixed number of rounds per repeating frame.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub program: Program,
    pub rounds: u32,
    /// Frame index of every expanded round.
    pub frames: Vec<usize>,
    pub plans: Vec<RoundPlan>,
    pub stabs: Vec<StabRound>,
    pub circuit: ScheduledCircuit,
    pub sets: SetSchedule,
}

/// Expands, schedules and assigns sets in one go.
pub fn compile(p: &Program, rounds: u32) -> Result<Compiled, CircuitError> {
    let frames = p.expand(rounds)?;
    let plans = p.plan(&frames);
    let stabs = lifecycle(p, &plans);
    let circuit = build_circuit(p, &plans)?;
    let sets = assign_sets(p, &frames, &stabs, &circuit)?;
    Ok(Compiled { program: p.clone(), rounds, frames, plans, stabs, circuit, sets })
}
