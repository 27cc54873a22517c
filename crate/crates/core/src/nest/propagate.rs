use std::collections::HashMap;

use super::errors::{ErrorLocation, Fault};
use crate::circuit::ScheduledCircuit;
use crate::pauli_core::{conjugate_through, Basis, GateKind, LocationId};

/// Measurements flipped by a single fault, found by conjugating its Pauli
/// through every later event.
pub fn propagate_error(circuit: &ScheduledCircuit, loc: &ErrorLocation) -> Vec<LocationId> {
    let mut p = match &loc.fault {
        Fault::Flip => return vec![loc.location],
        Fault::Pauli(p) => p.clone(),
    };
    let mut flips = Vec::new();
    for e in &circuit.events[loc.location.0 as usize + 1..] {
        if p.is_identity() {
            break;
        }
        let qs = e.kind.qubits();
        if qs.iter().all(|&q| p.letter(q).is_none()) {
            continue;
        }
        match e.kind {
            GateKind::MeasZ(q) | GateKind::MeasX(q) => {
                let basis = if matches!(e.kind, GateKind::MeasZ(_)) { Basis::Z } else { Basis::X };
                if p.letter(q).is_some_and(|l| l != basis.letter()) {
                    flips.push(e.location);
                }
                p.remove(q);
            }
            GateKind::InitZ(q) | GateKind::InitX(q) => {
                p.remove(q);
            }
            _ => p = conjugate_through(&p, &e.kind).expect("unitary"),
        }
    }
    flips
}

/// Same as [`propagate_error`] for many faults at once, 64 per pass, with
/// the Pauli frame of each fault packed into one bit lane.
pub fn propagate_batch(circuit: &ScheduledCircuit, locs: &[ErrorLocation]) -> Vec<Vec<LocationId>> {
    let mut out = vec![Vec::new(); locs.len()];
    let mut order: Vec<usize> = (0..locs.len()).collect();
    order.sort_by_key(|&k| locs[k].location);
    for chunk in order.chunks(64) {
        let mut inject: HashMap<LocationId, Vec<(usize, &ErrorLocation)>> = HashMap::new();
        for (lane, &k) in chunk.iter().enumerate() {
            inject.entry(locs[k].location).or_default().push((lane, &locs[k]));
        }
        let first = locs[chunk[0]].location.0 as usize;
        let mut x = vec![0u64; circuit.num_qubits];
        let mut z = vec![0u64; circuit.num_qubits];
        let mut flips: Vec<(LocationId, u64)> = Vec::new();
        for e in &circuit.events[first..] {
            let mut flip = 0u64;
            match e.kind {
                GateKind::Idle(_) => {}
                GateKind::Hadamard(q) => std::mem::swap(&mut x[q as usize], &mut z[q as usize]),
                GateKind::Cnot { control: c, target: t } => {
                    x[t as usize] ^= x[c as usize];
                    z[c as usize] ^= z[t as usize];
                }
                GateKind::Swap(a, b) => {
                    x.swap(a as usize, b as usize);
                    z.swap(a as usize, b as usize);
                }
                GateKind::MeasZ(q) | GateKind::MeasX(q) => {
                    flip = if matches!(e.kind, GateKind::MeasZ(_)) { x[q as usize] } else { z[q as usize] };
                    x[q as usize] = 0;
                    z[q as usize] = 0;
                }
                GateKind::InitZ(q) | GateKind::InitX(q) => {
                    x[q as usize] = 0;
                    z[q as usize] = 0;
                }
            }
            if let Some(list) = inject.get(&e.location) {
                for &(lane, err) in list {
                    match &err.fault {
                        Fault::Flip => flip ^= 1 << lane,
                        Fault::Pauli(p) => {
                            for (q, l) in p.support() {
                                let (bx, bz) = l.bits();
                                x[q as usize] ^= (bx as u64) << lane;
                                z[q as usize] ^= (bz as u64) << lane;
                            }
                        }
                    }
                }
            }
            if flip != 0 {
                flips.push((e.location, flip));
            }
        }
        for (lane, &k) in chunk.iter().enumerate() {
            out[k] = flips.iter().filter(|(_, m)| m >> lane & 1 == 1).map(|(l, _)| *l).collect();
        }
    }
    out
}
