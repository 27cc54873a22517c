use crate::pauli_core::Basis;

use super::*;

/// How a stabilizer measurement relates to the one before it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Start {
    /// Paired with the previous round's result of the same stabilizer.
    Continues,
    /// Every support qubit was just prepared in the stabilizer's basis.
    Deterministic,
    /// First result of a new stabilizer with a random outcome.
    Random,
}

/// How a stabilizer measurement relates to the one after it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Continues,
    /// Every support qubit is measured right after in the stabilizer's basis.
    Closing,
    /// Nothing after it can be compared against this result.
    Terminal,
}

/// One stabilizer measurement in the expanded program.
#[derive(Clone, Debug)]
pub struct StabRound {
    pub site: Site,
    pub round: u32,
    pub support: Vec<Site>,
    pub start: Start,
    pub end: End,
    /// Support qubits measured in the stabilizer's basis after extraction.
    /// Their results join the set that pairs this result with the next one.
    pub trimmed: Vec<Site>,
}

/// Preparation and measurement basis that commutes with a stabilizer type.
pub fn matching_basis(kind: SiteKind) -> Basis {
    match kind {
        SiteKind::Primal => Basis::X,
        _ => Basis::Z,
    }
}

fn cmd(p: &Program, plan: &RoundPlan, s: Site) -> Command {
    p.frames[plan.frame].cells[p.index(s)].command
}

fn swapped(plan: &RoundPlan, s: Site) -> bool {
    plan.is_source(s) || plan.is_dest(s)
}

fn continues(p: &Program, now: &RoundPlan, next: &RoundPlan, s: Site) -> bool {
    let basis = matching_basis(s.kind());
    let (Some(a), Some(b)) = (now.support(p, s), next.support(p, s)) else { return false };
    let (a, b): (Vec<_>, Vec<_>) = (a.collect(), b.collect());
    if a.iter().chain(&b).any(|&q| swapped(now, q)) || a.iter().any(|&q| cmd(p, now, q) == Command::Had) {
        return false;
    }
    let mut kept_a = Vec::new();
    for &q in &a {
        match cmd(p, now, q).trim_basis() {
            Some(tb) if tb != basis => return false,
            Some(_) => {}
            None => kept_a.push(q),
        }
    }
    let mut kept_b = Vec::new();
    for &q in &b {
        match cmd(p, next, q).add_basis() {
            Some(ab) if ab != basis => return false,
            Some(_) => {}
            None => kept_b.push(q),
        }
    }
    kept_a.sort();
    kept_b.sort();
    kept_a == kept_b
}

/// Classifies every stabilizer measurement of the plan.
pub fn lifecycle(p: &Program, plans: &[RoundPlan]) -> Vec<StabRound> {
    let mut out = Vec::new();
    for (r, plan) in plans.iter().enumerate() {
        for (k, ex) in plan.extract.iter().enumerate() {
            let Some(ex) = ex else { continue };
            let s = p.site(k);
            let basis = matching_basis(s.kind());
            let support: Vec<Site> = ex.iter().map(|(_, q)| *q).collect();
            let start = if r > 0 && continues(p, &plans[r - 1], plan, s) {
                Start::Continues
            } else if support.iter().all(|&q| cmd(p, plan, q).add_basis() == Some(basis)) {
                Start::Deterministic
            } else {
                Start::Random
            };
            let trimmed: Vec<Site> =
                support.iter().copied().filter(|&q| cmd(p, plan, q).trim_basis() == Some(basis)).collect();
            let end = if plans.get(r + 1).is_some_and(|next| continues(p, plan, next, s)) {
                End::Continues
            } else if trimmed.len() == support.len() && !support.iter().any(|&q| swapped(plan, q)) {
                End::Closing
            } else {
                End::Terminal
            };
            out.push(StabRound { site: s, round: r as u32, support, start, end, trimmed });
        }
    }
    out
}
