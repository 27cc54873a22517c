use std::collections::BTreeMap;

use rayon::prelude::*;

use super::errors::{ErrorLocation, Weight};
#[cfg(test)]
use super::errors::Fault;
use super::propagate::propagate_batch;
use super::{Ball, Contributor, Endpoint, Nest, Stick};
use crate::circuit::{Compiled, SetId, SetSchedule};
use crate::pauli_core::LocationId;
use crate::program::{BoundaryId, NestKind, Site};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NestError {
    #[error("a fault at {location} lights up only the set at {site} in round {round}, which has no boundary link")]
    Unlinked { location: LocationId, set: SetId, site: Site, round: u32 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct NestStats {
    pub error_locations: usize,
    /// Faults lighting up more than two balls in one nest.
    pub cliques: usize,
    pub max_fired: usize,
}

/// Detection events caused by a set of flipped measurements.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Detection {
    pub primal: Vec<SetId>,
    pub dual: Vec<SetId>,
    /// Boundary sets with an odd number of flipped members.
    pub boundaries: Vec<BoundaryId>,
}

impl Detection {
    pub fn fired(&self, kind: NestKind) -> &[SetId] {
        match kind {
            NestKind::Primal => &self.primal,
            NestKind::Dual => &self.dual,
        }
    }
}

pub fn evaluate_detection_events(flips: &[LocationId], sets: &SetSchedule) -> Detection {
    let mut odd: BTreeMap<SetId, bool> = BTreeMap::new();
    for &m in flips {
        for &s in sets.sets_of(m) {
            *odd.entry(s).or_default() ^= true;
        }
    }
    let mut d = Detection::default();
    for (s, fired) in odd {
        if fired {
            match sets.set(s).nest {
                NestKind::Primal => d.primal.push(s),
                NestKind::Dual => d.dual.push(s),
            }
        }
    }
    for (&b, members) in &sets.boundary_sets {
        if flips.iter().filter(|m| members.binary_search(m).is_ok()).count() % 2 == 1 {
            d.boundaries.push(b);
        }
    }
    d
}

type Key = (NestKind, Endpoint, Endpoint);

fn sticks_for(
    sets: &SetSchedule,
    err: &ErrorLocation,
    flips: &[LocationId],
    stats: &mut NestStats,
) -> Result<Vec<Key>, NestError> {
    let d = evaluate_detection_events(flips, sets);
    let mut out = Vec::new();
    for kind in NestKind::BOTH {
        let fired = d.fired(kind);
        stats.max_fired = stats.max_fired.max(fired.len());
        match fired {
            [] => {}
            [s] => {
                let set = sets.set(*s);
                let b = set.link.ok_or(NestError::Unlinked {
                    location: err.location,
                    set: *s,
                    site: set.site,
                    round: set.round,
                })?;
                out.push((kind, Endpoint::Ball(*s), Endpoint::Boundary(b)));
            }
            many => {
                if many.len() > 2 {
                    stats.cliques += 1;
                    log::warn!("fault at {} lights up {} {kind} balls", err.location, many.len());
                }
                for (k, &a) in many.iter().enumerate() {
                    for &b in &many[k + 1..] {
                        out.push((kind, Endpoint::Ball(a), Endpoint::Ball(b)));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Sticks found in one chunk of error locations.
type Part = Result<(Vec<(Key, Contributor, Weight)>, NestStats), NestError>;

/// Builds the primal and dual nests from a list of error locations.
pub fn build_nests(c: &Compiled, locs: &[ErrorLocation]) -> Result<(Nest, Nest, NestStats), NestError> {
    const CHUNK: usize = 64 * 8;
    let parts: Vec<Part> = crate::with_pool(|| {
        locs.par_chunks(CHUNK)
            .map(|chunk| {
                let flips = propagate_batch(&c.circuit, chunk);
                let mut stats = NestStats::default();
                let mut out = Vec::new();
                for (err, f) in chunk.iter().zip(&flips) {
                    for key in sticks_for(&c.sets, err, f, &mut stats)? {
                        let contributor = Contributor { location: err.location, fault: err.fault.clone() };
                        out.push((key, contributor, err.weight));
                    }
                }
                Ok((out, stats))
            })
            .collect()
    });

    let mut merged: BTreeMap<Key, (Weight, Vec<Contributor>)> = BTreeMap::new();
    let mut stats = NestStats { error_locations: locs.len(), ..Default::default() };
    for part in parts {
        let (entries, s) = part?;
        stats.cliques += s.cliques;
        stats.max_fired = stats.max_fired.max(s.max_fired);
        for (key, contributor, w) in entries {
            let e = merged.entry(key).or_default();
            e.0 += w;
            e.1.push(contributor);
        }
    }

    let mut nests = NestKind::BOTH.map(|kind| {
        let mut n = Nest::empty(kind);
        n.balls = c
            .sets
            .sets
            .iter()
            .filter(|s| s.nest == kind)
            .map(|s| Ball { set: s.id, site: s.site, round: s.round, closing: s.closing })
            .collect();
        n.boundaries = c
            .program
            .boundaries
            .iter()
            .enumerate()
            .filter(|(_, b)| b.nest == kind)
            .map(|(k, _)| BoundaryId(k as u16))
            .collect();
        n
    });
    for ((kind, a, b), (weight, mut contributors)) in merged {
        contributors.sort();
        let n = &mut nests[kind as usize];
        n.sticks.push(Stick { a, b, weight, contributors });
    }
    let [primal, dual] = nests;
    Ok((primal, dual, stats))
}
