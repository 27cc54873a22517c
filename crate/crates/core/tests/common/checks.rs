//! Whole-program invariants, shared by the property suite and the
//! acceptance run. Each check returns a short description of what it saw.

use std::collections::BTreeSet;

use gatecheck::circuit::{compile, Compiled, MeasRole, SetId};
use gatecheck::distance::boundary_pair_distance;
use gatecheck::logic::noiseless_violations;
use gatecheck::nest::{
    build_nests, enumerate_error_locations, evaluate_detection_events, propagate_error, Endpoint, ErrorLocation,
    Fault, Nest, Weight,
};
use gatecheck::pauli_core::{Letter, PauliOp};
use gatecheck::program::{parse_program, NestKind, Program, Site, D3_HADAMARD, D3_PLATE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::frames::{load, FRAME_PROGRAMS};
use super::replay::{fired, fired_in, Trace};
use super::statevec::{coin_chi2, compare_random_circuit};

pub type Check = Result<String, String>;

/// Every bundled program (the two examples and the frame-type programs),
/// compiled at its default number of rounds.
pub fn bundled() -> Vec<(String, Compiled)> {
    let mut out = vec![
        ("d3_plate".to_string(), parse_program(D3_PLATE).unwrap()),
        ("d3_hadamard".to_string(), parse_program(D3_HADAMARD).unwrap()),
    ];
    out.extend(FRAME_PROGRAMS.iter().map(|n| (n.to_string(), load(n))));
    out.into_iter()
        .map(|(n, p)| {
            let c = compile(&p, p.default_rounds()).unwrap();
            (n, c)
        })
        .collect()
}

/// Stabilizer results sit in two sets, or in one set and a boundary set.
/// Data results only ever close one or two stabilizer histories.
pub fn set_membership(c: &Compiled) -> Check {
    for m in &c.circuit.measurements {
        let sets = c.sets.sets_of(m.location).len();
        let bounds = c.sets.boundary_sets_of(m.location).count();
        let ok = match m.role {
            MeasRole::Stabilizer => (sets, bounds) == (2, 0) || (sets, bounds) == (1, 1),
            MeasRole::Data => (1..=2).contains(&sets) && bounds == 0,
        };
        if !ok {
            return Err(format!("{:?} result at {} round {} is in {sets} sets and {bounds} boundary sets", m.role, m.site, m.round));
        }
    }
    Ok(format!("{} results", c.circuit.measurements.len()))
}

pub fn events_per_nest(c: &Compiled) -> Check {
    let (_, _, stats) = build_nests(c, &enumerate_error_locations(&c.circuit)).map_err(|e| e.to_string())?;
    if stats.max_fired > 2 || stats.cliques > 0 {
        return Err(format!("max {} balls per fault, {} cliques", stats.max_fired, stats.cliques));
    }
    Ok(format!("{} faults, max {} balls", stats.error_locations, stats.max_fired))
}

pub fn noiseless(c: &Compiled, seeds: u64) -> Check {
    for seed in 0..seeds {
        let v = noiseless_violations(c, seed);
        if v != 0 {
            return Err(format!("seed {seed}: {v} sets read -1"));
        }
    }
    Ok(format!("{seeds} seeds"))
}

fn propagated(c: &Compiled, err: &ErrorLocation) -> BTreeSet<SetId> {
    let d = evaluate_detection_events(&propagate_error(&c.circuit, err), &c.sets);
    d.primal.iter().chain(&d.dual).copied().collect()
}

/// Detection events of a fault pair, replayed together on the tableau,
/// equal the symmetric difference of the propagated single-fault events.
pub fn linearity(c: &Compiled, pairs: usize, seed: u64) -> Check {
    let locs = enumerate_error_locations(&c.circuit);
    let tr = Trace::new(c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let a = &locs[rng.random_range(0..locs.len())];
        let b = &locs[rng.random_range(0..locs.len())];
        let both: BTreeSet<SetId> = fired(c, &tr.flipped(c, &[a, b])).into_iter().collect();
        let expected: BTreeSet<SetId> = propagated(c, a).symmetric_difference(&propagated(c, b)).copied().collect();
        if both != expected {
            return Err(format!("L{}:{} with L{}:{}", a.location.0, a.fault, b.location.0, b.fault));
        }
    }
    Ok(format!("{pairs} pairs"))
}

/// Hop distances between boundaries by Floyd–Warshall, with only balls
/// allowed as intermediate vertices.
pub fn floyd_warshall(nest: &Nest) -> (Vec<Endpoint>, Vec<Vec<u32>>) {
    const INF: u32 = u32::MAX / 2;
    let mut nodes: Vec<Endpoint> = nest.balls.iter().map(|b| Endpoint::Ball(b.set)).collect();
    let balls = nodes.len();
    nodes.extend(nest.boundaries.iter().map(|&b| Endpoint::Boundary(b)));
    let n = nodes.len();
    let at = |e: Endpoint| nodes.iter().position(|&x| x == e).unwrap();
    let mut d = vec![vec![INF; n]; n];
    for (k, row) in d.iter_mut().enumerate() {
        row[k] = 0;
    }
    for s in &nest.sticks {
        let (a, b) = (at(s.a), at(s.b));
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..balls {
        for i in 0..n {
            let dik = d[i][k];
            if dik >= INF {
                continue;
            }
            let row_k = d[k].clone();
            for (dij, dkj) in d[i].iter_mut().zip(&row_k) {
                *dij = (*dij).min(dik + dkj);
            }
        }
    }
    (nodes, d)
}

pub fn bfs_matches_floyd(p: &Program, nest: &Nest) -> Check {
    let (nodes, d) = floyd_warshall(nest);
    let bounds = &nest.boundaries;
    for (k, &a) in bounds.iter().enumerate() {
        for &b in &bounds[k + 1..] {
            let ia = nodes.iter().position(|&x| x == Endpoint::Boundary(a)).unwrap();
            let ib = nodes.iter().position(|&x| x == Endpoint::Boundary(b)).unwrap();
            let fw = (d[ia][ib] < u32::MAX / 2).then_some(d[ia][ib]);
            let bfs = boundary_pair_distance(p, nest, a, b).map_err(|e| e.to_string())?.map(|x| x.hops());
            if fw != bfs {
                return Err(format!(
                    "{} nest {}-{}: bfs {bfs:?}, floyd {fw:?}",
                    nest.kind,
                    p.boundary_info(a).name,
                    p.boundary_info(b).name
                ));
            }
        }
    }
    Ok(format!("{} vertices", nodes.len()))
}

/// Every failure-pair witness, injected all at once, leaves its nest silent.
pub fn witness_replays(c: &Compiled, nest: &Nest) -> Check {
    let tr = Trace::new(c);
    let mut n = 0;
    for f in c.program.failure_pairs.iter().filter(|f| f.nest == nest.kind) {
        let Some(path) = boundary_pair_distance(&c.program, nest, f.a, f.b).map_err(|e| e.to_string())? else {
            continue;
        };
        let errs: Vec<ErrorLocation> = path
            .witness
            .iter()
            .map(|w| ErrorLocation { location: w.location, fault: w.fault.clone(), weight: Weight(1) })
            .collect();
        let refs: Vec<&ErrorLocation> = errs.iter().collect();
        let lit = fired_in(c, &tr.flipped(c, &refs), nest.kind);
        if !lit.is_empty() {
            return Err(format!("{} witness leaves {} events", nest.kind, lit.len()));
        }
        n += 1;
    }
    Ok(format!("{n} witnesses"))
}

/// X on the centre row of the plate between two rounds flips nothing.
pub fn center_row_chain() -> Check {
    let c = compile(&parse_program(D3_PLATE).unwrap(), 3).unwrap();
    let q = |i, j| c.circuit.qubit(Site { i, j }).unwrap();
    let s = (0..c.circuit.steps.len() - 1)
        .find(|&s| c.circuit.step_round[s] == 1 && c.circuit.step_round[s + 1] == 2)
        .unwrap();
    let location = gatecheck::pauli_core::LocationId(c.circuit.steps[s].end as u32 - 1);
    let chain = PauliOp::uniform(Letter::X, [q(2, 1), q(2, 3), q(2, 5)]);
    let err = ErrorLocation { location, fault: Fault::Pauli(chain), weight: Weight(1) };
    let replayed = Trace::new(&c).flipped(&c, &[&err]);
    let propagated = propagate_error(&c.circuit, &err);
    if !replayed.is_empty() || !propagated.is_empty() {
        return Err(format!("{} replayed and {} propagated flips", replayed.len(), propagated.len()));
    }
    Ok("no flips".to_string())
}

pub fn tableau_vs_statevec(trials: u64) -> Check {
    let run = std::panic::catch_unwind(|| {
        let (mut random, mut plus) = (0, 0);
        for seed in 0..trials {
            let s = compare_random_circuit(seed);
            random += s.random;
            plus += s.random_plus;
        }
        (random, plus)
    });
    let (random, plus) = run.map_err(|_| "state-vector disagreement".to_string())?;
    if coin_chi2(plus, random) >= 15.0 {
        return Err(format!("random outcomes biased: {plus}/{random}"));
    }
    Ok(format!("{trials} circuits, {plus}/{random} random results +1"))
}

pub fn nests(c: &Compiled) -> (Nest, Nest) {
    let (p, d, _) = build_nests(c, &enumerate_error_locations(&c.circuit)).unwrap();
    (p, d)
}

pub fn kinds() -> [NestKind; 2] {
    [NestKind::Primal, NestKind::Dual]
}
