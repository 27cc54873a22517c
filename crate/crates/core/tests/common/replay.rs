//! Fault replay on the tableau, independent of Pauli propagation.

use std::collections::BTreeSet;

use gatecheck::circuit::{Compiled, SetId};
use gatecheck::nest::{ErrorLocation, Fault};
use gatecheck::pauli_core::{GateKind, Tableau};
use gatecheck::program::NestKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Noiseless run that keeps the state before every event.
pub struct Trace {
    before: Vec<(Tableau, ChaCha8Rng)>,
    outcomes: Vec<Option<i8>>,
}

fn step(t: &mut Tableau, g: &GateKind, rng: &mut ChaCha8Rng) -> Option<i8> {
    match g.measurement() {
        Some((basis, q)) => Some(t.measure(basis, q, rng).unwrap().value),
        None => {
            t.apply(g, rng).unwrap();
            None
        }
    }
}

impl Trace {
    pub fn new(c: &Compiled) -> Trace {
        let mut t = Tableau::new(c.circuit.num_qubits);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut before = Vec::new();
        let mut outcomes = Vec::new();
        for e in &c.circuit.events {
            before.push((t.clone(), rng.clone()));
            outcomes.push(step(&mut t, &e.kind, &mut rng));
        }
        Trace { before, outcomes }
    }

    /// Measurement events whose outcome changes when all `faults` strike.
    /// Random outcomes reuse the noiseless coin flips, so only deterministic
    /// information moves.
    pub fn flipped(&self, c: &Compiled, faults: &[&ErrorLocation]) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let Some(start) = faults.iter().map(|f| f.location.0 as usize).min() else {
            return out;
        };
        let (mut t, mut rng) = self.before[start].clone();
        for (i, e) in c.circuit.events.iter().enumerate().skip(start) {
            let mut value = step(&mut t, &e.kind, &mut rng);
            for f in faults.iter().filter(|f| f.location.0 as usize == i) {
                match &f.fault {
                    Fault::Flip => value = value.map(|v| -v),
                    Fault::Pauli(p) => t.apply_pauli(p),
                }
            }
            if value != self.outcomes[i] {
                out.insert(i);
            }
        }
        out
    }
}

/// Interior sets with an odd number of flipped members.
pub fn fired(c: &Compiled, flips: &BTreeSet<usize>) -> Vec<SetId> {
    c.sets
        .sets
        .iter()
        .filter(|s| s.members.iter().filter(|m| flips.contains(&(m.0 as usize))).count() % 2 == 1)
        .map(|s| s.id)
        .collect()
}

pub fn fired_in(c: &Compiled, flips: &BTreeSet<usize>, kind: NestKind) -> Vec<SetId> {
    fired(c, flips).into_iter().filter(|&s| c.sets.set(s).nest == kind).collect()
}
