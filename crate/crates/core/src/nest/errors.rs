use crate::circuit::ScheduledCircuit;
use crate::pauli_core::{GateKind, LocationId, Letter, PauliOp};

/// What goes wrong at an error location.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fault {
    /// Pauli applied right after the event.
    Pauli(PauliOp),
    /// The measurement reports the wrong result.
    Flip,
}

impl std::fmt::Display for Fault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fault::Flip => f.write_str("flip"),
            Fault::Pauli(p) => {
                let s = p.unsigned().to_string();
                f.write_str(s.trim_start_matches('+'))
            }
        }
    }
}

/// Relative likelihood in units of 1/15 of a location's budget, so that the
/// 1/3 and 1/15 splits stay exact integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, serde::Serialize)]
#[serde(transparent)]
pub struct Weight(pub u64);

impl Weight {
    pub const FULL: Weight = Weight(15);

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 15.0
    }
}

impl std::ops::AddAssign for Weight {
    fn add_assign(&mut self, rhs: Weight) {
        self.0 += rhs.0;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErrorLocation {
    pub location: LocationId,
    pub fault: Fault,
    pub weight: Weight,
}

const LETTERS: [Option<Letter>; 4] = [None, Some(Letter::X), Some(Letter::Y), Some(Letter::Z)];

/// Every single fault of the circuit, in event order.
pub fn enumerate_error_locations(circuit: &ScheduledCircuit) -> Vec<ErrorLocation> {
    let mut out = Vec::new();
    for e in &circuit.events {
        let location = e.location;
        let mut push = |fault, weight| out.push(ErrorLocation { location, fault, weight });
        match e.kind {
            GateKind::Idle(q) | GateKind::Hadamard(q) => {
                for l in Letter::ALL {
                    push(Fault::Pauli(PauliOp::single(q, l)), Weight(5));
                }
            }
            GateKind::InitZ(q) => push(Fault::Pauli(PauliOp::single(q, Letter::X)), Weight::FULL),
            GateKind::InitX(q) => push(Fault::Pauli(PauliOp::single(q, Letter::Z)), Weight::FULL),
            GateKind::MeasZ(_) | GateKind::MeasX(_) => push(Fault::Flip, Weight::FULL),
            GateKind::Cnot { control: a, target: b } | GateKind::Swap(a, b) => {
                for la in LETTERS {
                    for lb in LETTERS {
                        if la.is_none() && lb.is_none() {
                            continue;
                        }
                        let p = PauliOp::from_letters(la.map(|l| (a, l)).into_iter().chain(lb.map(|l| (b, l))));
                        push(Fault::Pauli(p), Weight(1));
                    }
                }
            }
        }
    }
    out
}
