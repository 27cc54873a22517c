//! Checking that a program implements its logical gate.
//!
//! Each trial runs the circuit without noise on a [`Tableau`]. After the
//! first round the logical input is pinned by measuring the input operator
//! and flipping it with the conjugate logical when needed. From then on the
//! input operator is carried forward as an element of the state's stabilizer
//! group:
//!
//! * unitaries conjugate it, and any sign they produce belongs to the gate;
//! * a measurement that anticommutes with it is handled by first multiplying
//!   in a stabilizer that anticommutes with the measurement;
//! * a measurement on one of its qubits in the matching basis removes that
//!   qubit, and the outcome joins the byproduct sign.
//!
//! At the end the data qubits of the expected output operator are measured
//! one by one. The trial passes when their product, corrected by the
//! byproduct, equals the sign the truth table asks for.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::Compiled;
use crate::pauli_core::{Basis, GateKind, Letter, PauliOp, Tableau};
use crate::program::{matching_basis, Epoch, GateName, LogicalKind, Site, SiteKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("no `logical {0} {1}` line")]
    MissingLogical(&'static str, &'static str),
    #[error("{0} logical {1} touches {2}, which is not a data site")]
    NotData(&'static str, &'static str, Site),
    #[error("{0} logical {1} touches {2}, which holds no qubit in that epoch")]
    Inactive(&'static str, &'static str, Site),
    #[error("{0} logical {1} anticommutes with the stabilizer at {2}")]
    Stabilizer(&'static str, &'static str, Site),
    #[error("{0} logical X_L and Z_L commute")]
    Commuting(&'static str),
    #[error("program declares no `gate` and no table was given")]
    NoTable,
}

/// A single-qubit Pauli eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LogicalState {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl LogicalState {
    pub const ALL: [LogicalState; 4] = [LogicalState::Zero, LogicalState::One, LogicalState::Plus, LogicalState::Minus];

    /// The logical operator this state is an eigenstate of, and its eigenvalue.
    pub fn operator(self) -> (LogicalKind, i8) {
        match self {
            LogicalState::Zero => (LogicalKind::ZL, 1),
            LogicalState::One => (LogicalKind::ZL, -1),
            LogicalState::Plus => (LogicalKind::XL, 1),
            LogicalState::Minus => (LogicalKind::XL, -1),
        }
    }
}

impl fmt::Display for LogicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogicalState::Zero => "|0>",
            LogicalState::One => "|1>",
            LogicalState::Plus => "|+>",
            LogicalState::Minus => "|->",
        })
    }
}

pub type TruthTable = Vec<(LogicalState, LogicalState)>;

pub fn truth_table(gate: GateName) -> TruthTable {
    use LogicalState::*;
    match gate {
        GateName::Identity => vec![(Zero, Zero), (One, One), (Plus, Plus), (Minus, Minus)],
        GateName::Hadamard => vec![(Zero, Plus), (One, Minus), (Plus, Zero), (Minus, One)],
    }
}

fn epoch_name(e: Epoch) -> &'static str {
    match e {
        Epoch::Initial => "initial",
        Epoch::Final => "final",
    }
}

fn kind_name(k: LogicalKind) -> &'static str {
    match k {
        LogicalKind::XL => "X_L",
        LogicalKind::ZL => "Z_L",
    }
}

/// Logical operators of both epochs as Paulis on circuit qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalOperators {
    ops: [[PauliOp; 2]; 2],
}

impl LogicalOperators {
    pub fn get(&self, epoch: Epoch, kind: LogicalKind) -> &PauliOp {
        &self.ops[epoch as usize][kind as usize]
    }
}

/// Reads the logical operators and checks them against the stabilizers of
/// the first and last round.
pub fn logical_operators(c: &Compiled) -> Result<LogicalOperators, LogicError> {
    let p = &c.program;
    let mut ops: [[PauliOp; 2]; 2] = Default::default();
    for epoch in [Epoch::Initial, Epoch::Final] {
        let plan = match epoch {
            Epoch::Initial => c.plans.first(),
            Epoch::Final => c.plans.last(),
        };
        let (e, live) = (epoch_name(epoch), |s: Site| plan.is_some_and(|pl| pl.live_before[p.index(s)]));
        for kind in [LogicalKind::XL, LogicalKind::ZL] {
            let k = kind_name(kind);
            let chain = p.logical(epoch, kind).ok_or(LogicError::MissingLogical(e, k))?;
            let mut op = PauliOp::identity();
            for &s in &chain.sites {
                if s.kind() != SiteKind::Data {
                    return Err(LogicError::NotData(e, k, s));
                }
                // Initial operators are checked after the first round's preparation.
                let holds = match epoch {
                    Epoch::Initial => c.circuit.qubit(s).is_some(),
                    Epoch::Final => live(s) || c.plans.last().is_some_and(|pl| pl.is_dest(s)),
                };
                let q = c.circuit.qubit(s).filter(|_| holds).ok_or(LogicError::Inactive(e, k, s))?;
                op.set(q, Some(kind.letter()));
            }
            if let Some(plan) = plan {
                for s in p.sites() {
                    let Some(support) = plan.support(p, s).filter(|_| s.kind() != SiteKind::Data) else { continue };
                    let letter = matching_basis(s.kind()).letter();
                    let stab = PauliOp::from_letters(support.filter_map(|d| c.circuit.qubit(d)).map(|q| (q, letter)));
                    if !stab.commutes_with(&op) {
                        return Err(LogicError::Stabilizer(e, k, s));
                    }
                }
            }
            ops[epoch as usize][kind as usize] = op;
        }
        if ops[epoch as usize][0].commutes_with(&ops[epoch as usize][1]) {
            return Err(LogicError::Commuting(e));
        }
    }
    Ok(LogicalOperators { ops })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct TrialOptions {
    /// Treat every byproduct as `+1`; used to show the bookkeeping matters.
    pub ignore_byproducts: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub pass: bool,
    /// Why the trial failed, when it failed for a structural reason.
    pub reason: Option<String>,
    /// Interior measurement sets whose product came out `-1`.
    pub interior_violations: usize,
}

fn basis_of(l: Letter) -> Option<Basis> {
    match l {
        Letter::X => Some(Basis::X),
        Letter::Z => Some(Basis::Z),
        Letter::Y => None,
    }
}

struct Tracker {
    /// Operator the state is a `+1` eigenstate of, up to `byproduct`.
    op: PauliOp,
    byproduct: i8,
}

impl Tracker {
    fn conjugate(&mut self, g: &GateKind) {
        if g.qubits().iter().any(|&q| self.op.letter(q).is_some()) {
            self.op = crate::pauli_core::conjugate_through(&self.op, g).expect("unitary");
        }
    }

    /// Measures `q` in `basis`, keeping the tracked operator in the
    /// stabilizer group.
    fn measure(&mut self, t: &mut Tableau, basis: Basis, q: u32, rng: &mut ChaCha8Rng) -> i8 {
        let m = PauliOp::single(q, basis.letter());
        if !self.op.commutes_with(&m) {
            let s = t.anticommuting_stabilizer(&m).expect("a random measurement has an anticommuting stabilizer");
            self.byproduct *= s.sign();
            let product = self.op.multiply(&s.unsigned()).into_hermitian().expect("stabilizers commute");
            self.op = product;
        }
        let outcome = t.measure(basis, q, rng).expect("qubit in range").value;
        if self.op.letter(q).is_some() {
            self.op.remove(q);
            self.byproduct *= outcome;
        }
        outcome
    }
}

/// Runs one noiseless trial of `input -> expected`.
pub fn run_logical_trial(
    c: &Compiled,
    ops: &LogicalOperators,
    input: LogicalState,
    expected: LogicalState,
    rng: &mut ChaCha8Rng,
    opts: TrialOptions,
) -> TrialOutcome {
    let circuit = &c.circuit;
    let mut t = Tableau::new(circuit.num_qubits);
    let mut outcomes = vec![0i8; circuit.events.len()];
    let pin_step = circuit.step_round.iter().position(|&r| r > 0).unwrap_or(circuit.steps.len());
    let mut tracker: Option<Tracker> = None;

    for (k, step) in circuit.steps.iter().enumerate() {
        if k == pin_step {
            tracker = Some(pin(&mut t, ops, input, rng));
        }
        for e in &circuit.events[step.clone()] {
            match (&e.kind, tracker.as_mut()) {
                (GateKind::MeasZ(q) | GateKind::MeasX(q), tr) => {
                    let (basis, q) = (e.kind.measurement().expect("measurement").0, *q);
                    outcomes[e.location.0 as usize] = match tr {
                        Some(tr) => tr.measure(&mut t, basis, q, rng),
                        None => t.measure(basis, q, rng).expect("qubit in range").value,
                    };
                }
                (GateKind::InitZ(q) | GateKind::InitX(q), Some(tr)) if tr.op.letter(*q).is_some() => {
                    let basis = if matches!(e.kind, GateKind::InitZ(_)) { Basis::Z } else { Basis::X };
                    if tr.measure(&mut t, basis, *q, rng) < 0 {
                        t.apply_pauli(&PauliOp::single(*q, basis.other().letter()));
                    }
                }
                (g, tr) => {
                    t.apply(g, rng).expect("unitary or init");
                    if let (true, Some(tr)) = (g.is_unitary(), tr) {
                        tr.conjugate(g);
                    }
                }
            }
        }
    }
    let mut tracker = tracker.unwrap_or_else(|| pin(&mut t, ops, input, rng));

    let interior_violations = c
        .sets
        .sets
        .iter()
        .filter(|s| s.members.iter().map(|m| outcomes[m.0 as usize]).product::<i8>() != 1)
        .count();

    let (out_kind, out_sign) = expected.operator();
    let out = ops.get(Epoch::Final, out_kind);
    let fail = |reason: String| TrialOutcome { pass: false, reason: Some(reason), interior_violations };
    // The tracked operator must agree with the output operator up to
    // stabilizers of the final code.
    let Some(rel) = tracker.op.unsigned().multiply(out).into_hermitian() else {
        return fail(format!("{input} is carried to an operator that anticommutes with the final {}", kind_name(out_kind)));
    };
    let Some(g) = t.expectation(&rel) else {
        return fail(format!("{input} is not carried to the final {}", kind_name(out_kind)));
    };
    tracker.byproduct *= g;

    let mut measured = 1i8;
    for (q, l) in out.support() {
        let basis = basis_of(l).expect("logical operators use X or Z");
        measured *= t.measure(basis, q, rng).expect("qubit in range").value;
    }
    let byproduct = if opts.ignore_byproducts { 1 } else { tracker.byproduct };
    let pass = measured * byproduct == out_sign && interior_violations == 0;
    TrialOutcome {
        pass,
        reason: (interior_violations > 0).then(|| format!("{interior_violations} interior sets read -1 without noise")),
        interior_violations,
    }
}

fn pin(t: &mut Tableau, ops: &LogicalOperators, input: LogicalState, rng: &mut ChaCha8Rng) -> Tracker {
    let (kind, sign) = input.operator();
    let op = ops.get(Epoch::Initial, kind).clone();
    if t.measure_pauli(&op, rng).value != sign {
        let other = match kind {
            LogicalKind::XL => LogicalKind::ZL,
            LogicalKind::ZL => LogicalKind::XL,
        };
        t.apply_pauli(ops.get(Epoch::Initial, other));
    }
    Tracker { op: op.with_sign(sign < 0), byproduct: 1 }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowReport {
    pub input: LogicalState,
    pub expected: LogicalState,
    pub passed: u32,
    pub failed: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogicReport {
    pub schema: u32,
    pub gate: GateName,
    pub trials: u32,
    pub seed: u64,
    pub rows: Vec<RowReport>,
    pub interior_violations: usize,
    pub pass: bool,
}

/// Runs `trials` independent trials of every row. Trial `t` of row `r` uses
/// stream `r * trials + t` of a ChaCha8 generator seeded with `seed`.
pub fn verify_gate(
    c: &Compiled,
    ops: &LogicalOperators,
    gate: GateName,
    table: &TruthTable,
    trials: u32,
    seed: u64,
    opts: TrialOptions,
) -> LogicReport {
    let rows: Vec<(RowReport, usize)> = table
        .iter()
        .enumerate()
        .map(|(r, &(input, expected))| {
            let results: Vec<TrialOutcome> = crate::with_pool(|| {
                (0..trials)
                    .into_par_iter()
                    .map(|k| {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(r as u64 * trials as u64 + k as u64);
                        run_logical_trial(c, ops, input, expected, &mut rng, opts)
                    })
                    .collect()
            });
            let passed = results.iter().filter(|o| o.pass).count() as u32;
            let first_failure = results.iter().position(|o| !o.pass).map(|k| {
                let why = results[k].reason.clone().unwrap_or_else(|| "wrong output sign".to_string());
                format!("trial {k}: {why}")
            });
            let violations = results.iter().map(|o| o.interior_violations).sum();
            (RowReport { input, expected, passed, failed: trials - passed, first_failure }, violations)
        })
        .collect();
    let interior_violations = rows.iter().map(|r| r.1).sum();
    let rows: Vec<RowReport> = rows.into_iter().map(|r| r.0).collect();
    let pass = rows.iter().all(|r| r.failed == 0);
    LogicReport { schema: 1, gate, trials, seed, rows, interior_violations, pass }
}

impl fmt::Display for LogicReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gate {} table, {} trials per row, seed {}", self.gate.name(), self.trials, self.seed)?;
        for r in &self.rows {
            write!(f, "  {} -> {}  {}/{}", r.input, r.expected, r.passed, self.trials)?;
            if let Some(why) = &r.first_failure {
                write!(f, "  (first failure: {why})")?;
            }
            writeln!(f)?;
        }
        if self.interior_violations > 0 {
            writeln!(f, "interior sets reading -1 without noise: {}", self.interior_violations)?;
        }
        write!(f, "{}", if self.pass { "pass" } else { "FAIL" })
    }
}

/// Checks that every interior set of a noiseless run multiplies to `+1`.
pub fn noiseless_violations(c: &Compiled, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tableau::new(c.circuit.num_qubits);
    let mut outcomes = vec![0i8; c.circuit.events.len()];
    for e in &c.circuit.events {
        match e.kind.measurement() {
            Some((basis, q)) => outcomes[e.location.0 as usize] = t.measure(basis, q, &mut rng).expect("in range").value,
            None => t.apply(&e.kind, &mut rng).expect("unitary or init"),
        }
    }
    c.sets.sets.iter().filter(|s| s.members.iter().map(|m| outcomes[m.0 as usize]).product::<i8>() != 1).count()
}
