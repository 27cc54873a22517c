use std::collections::{BTreeSet, HashMap};

use super::lifecycle::{lifecycle, End, Start, StabRound};
use super::*;

struct Ctx<'a> {
    p: &'a Program,
    frames: Vec<usize>,
    out: BTreeSet<(u32, u32, String)>,
}

impl Ctx<'_> {
    fn at(&mut self, round: usize, s: Site, msg: String) {
        let f = &self.p.frames[self.frames[round]];
        let line = match f.cell_lines[self.p.index(s)] {
            0 => f.line,
            l => l,
        };
        self.out.insert((line, 0, msg));
    }

    fn frame(&mut self, frame: usize, msg: String) {
        self.out.insert((self.p.frames[frame].line, 0, msg));
    }

    fn directive(&self, round: usize, s: Site) -> Directive {
        self.p.frames[self.frames[round]].cells[self.p.index(s)]
    }
}

fn has(f: &Frame, pred: impl Fn(Command) -> bool) -> bool {
    f.cells.iter().any(|d| pred(d.command))
}

/// Static checks. An empty result means the program can be compiled into a
/// circuit and nests without missing boundary information.
pub fn validate_program(p: &Program) -> Vec<Diagnostic> {
    let frames = p.expand(2).expect("2 rounds");
    let plans = p.plan(&frames);
    let mut cx = Ctx { p, frames, out: BTreeSet::new() };

    frame_order(&mut cx);
    declarations(&mut cx);
    for (r, plan) in plans.iter().enumerate() {
        commands(&mut cx, r, plan);
    }
    let stabs = lifecycle(p, &plans);
    boundaries(&mut cx, &stabs);

    cx.out.into_iter().map(|(line, column, message)| Diagnostic { line, column, message }).collect()
}

fn frame_order(cx: &mut Ctx) {
    let fs = &cx.p.frames;
    for k in 0..fs.len() {
        if !fs[k].repeating {
            continue;
        }
        if has(&fs[k], |c| !matches!(c, Command::Active | Command::Inactive)) {
            cx.frame(k, "repeating frame may only contain ACTIVE and INACTIVE commands".into());
        }
        if k >= 1 && has(&fs[k - 1], |c| c.add_basis().is_some()) {
            cx.frame(k, "repeating frame directly after an ADD frame; a nonrepeating frame with boundary ids is missing".into());
        }
        if (1..=2).any(|b| k >= b && has(&fs[k - b], |c| matches!(c, Command::Swap(_)))) {
            cx.frame(k, "repeating frame within two frames of a SWAP frame; nonrepeating frames are missing".into());
        }
    }
}

fn declarations(cx: &mut Ctx) {
    let p = cx.p;
    for nest in NestKind::BOTH {
        if !p.failure_pairs.iter().any(|fp| fp.nest == nest) {
            cx.out.insert((0, 0, format!("no failure_pair declared for the {nest} nest")));
        }
    }
    for fp in &p.failure_pairs {
        let (a, b) = (p.boundary_info(fp.a), p.boundary_info(fp.b));
        if fp.a == fp.b {
            cx.out.insert((0, 0, format!("failure_pair {} {} {} joins a boundary to itself", fp.nest, a.name, b.name)));
        }
        for x in [a, b] {
            if x.nest != fp.nest {
                cx.out.insert((0, 0, format!("failure_pair {} uses {} boundary `{}`", fp.nest, x.nest, x.name)));
            }
        }
    }
}

fn commands(cx: &mut Ctx, r: usize, plan: &RoundPlan) {
    let p = cx.p;
    for s in plan.broken_swaps.clone() {
        cx.at(r, s, format!("swap at {s} leaves the lattice"));
    }
    let mut channels = HashMap::new();
    let mut dests = HashMap::new();
    for m in &plan.swaps {
        if cx.directive(r, m.channel).command != Command::Active {
            cx.at(r, m.source, format!("swap at {} needs an active syndrome qubit at {}", m.source, m.channel));
        }
        if let Some(other) = channels.insert(m.channel, m.source) {
            cx.at(r, m.source, format!("swaps at {other} and {} share the channel {}", m.source, m.channel));
        }
        if let Some(other) = dests.insert(m.dest, m.source) {
            cx.at(r, m.source, format!("swaps at {other} and {} share the destination {}", m.source, m.dest));
        }
        if !plan.live_before[p.index(m.source)] {
            cx.at(r, m.source, format!("swap at {} moves a qubit that holds no state", m.source));
        }
    }
    for s in p.sites() {
        let d = cx.directive(r, s);
        let live = plan.live_before[p.index(s)];
        if let Some(b) = d.boundary {
            let info = p.boundary_info(b);
            let expected = match s.kind().nest() {
                Some(n) => Some(n),
                None => match d.command.trim_basis().or(d.command.add_basis()) {
                    Some(crate::pauli_core::Basis::X) => Some(NestKind::Primal),
                    Some(crate::pauli_core::Basis::Z) => Some(NestKind::Dual),
                    None => None,
                },
            };
            if let Some(n) = expected.filter(|&n| n != info.nest) {
                cx.at(r, s, format!("{} boundary `{}` attached to {n} site {s}", info.nest, info.name));
            }
        }
        if s.kind() == SiteKind::Data {
            match d.command {
                Command::TrimX | Command::TrimZ | Command::Had if !live => {
                    cx.at(r, s, format!("{} at {s}, which holds no state", d.command))
                }
                Command::AddX | Command::AddZ if live => {
                    cx.at(r, s, format!("{} at {s}, which already holds state", d.command))
                }
                Command::Active if !live && !plan.is_dest(s) => {
                    cx.at(r, s, format!("ACTIVE data qubit {s} was never initialized"))
                }
                _ => {}
            }
        } else if d.command == Command::Active && !plan.is_channel(s) && plan.extract[p.index(s)].is_none() {
            cx.at(r, s, format!("active syndrome qubit {s} has no data neighbor to measure"));
        }
    }
}

/// Boundary id a set falls back to when its stabilizer directive has none.
fn data_link(cx: &Ctx, round: usize, sites: &[Site]) -> Option<BoundaryId> {
    sites.iter().find_map(|&q| cx.directive(round, q).boundary)
}

fn boundaries(cx: &mut Ctx, stabs: &[StabRound]) {
    // How many same-type stabilizers measure each data qubit per round.
    let mut coverage: HashMap<(usize, Site, SiteKind), usize> = HashMap::new();
    for st in stabs {
        for &q in &st.support {
            *coverage.entry((st.round as usize, q, st.site.kind())).or_default() += 1;
        }
    }
    let lone = |round: usize, st: &StabRound| st.support.iter().any(|&q| coverage[&(round, q, st.site.kind())] == 1);
    // Sets containing each trimmed data measurement.
    let mut data_sets: HashMap<(usize, Site, SiteKind), usize> = HashMap::new();
    for st in stabs {
        if st.end != End::Terminal {
            for &q in &st.trimmed {
                *data_sets.entry((st.round as usize, q, st.site.kind())).or_default() += 1;
            }
        }
    }
    let index: HashMap<(usize, Site), &StabRound> = stabs.iter().map(|st| ((st.round as usize, st.site), st)).collect();

    for st in stabs {
        let r = st.round as usize;
        let s = st.site;
        let own = cx.directive(r, s).boundary;
        if st.start == Start::Random && own.is_none() {
            cx.at(r, s, format!("first result of the stabilizer at {s} is random and needs a boundary id"));
        }
        if st.end == End::Terminal && own.is_none() {
            cx.at(r, s, format!("last result of the stabilizer at {s} is unpaired and needs a boundary id"));
        }
        if st.start == Start::Random && st.end == End::Terminal {
            cx.at(r, s, format!("stabilizer at {s} is measured once with a random result"));
        }
        let data_lone = st.trimmed.iter().any(|&q| data_sets.get(&(r, q, s.kind())) == Some(&1));
        match st.start {
            Start::Deterministic if own.or(data_link(cx, r, &st.support)).is_none() && lone(r, st) => {
                cx.at(r, s, format!("set starting the stabilizer at {s} can fire alone and needs a boundary id"));
            }
            Start::Continues => {
                let prev = index[&(r - 1, s)];
                let link = own.or(data_link(cx, r - 1, &prev.trimmed));
                let touches_boundary = prev.start == Start::Random || st.end == End::Terminal;
                let prev_lone = prev.trimmed.iter().any(|&q| data_sets.get(&(r - 1, q, s.kind())) == Some(&1));
                if link.is_none() && (touches_boundary || lone(r, st) || prev_lone) {
                    cx.at(r, s, format!("set ending at the stabilizer at {s} can fire alone and needs a boundary id"));
                }
            }
            _ => {}
        }
        if st.end == End::Closing && own.or(data_link(cx, r, &st.trimmed)).is_none() && (data_lone || st.start == Start::Random) {
            cx.at(r, s, format!("closing set of the stabilizer at {s} can fire alone and needs a boundary id"));
        }
    }
}
