//! Stick census of the frame-type programs, from the nest builder and from
//! an independent replay of every fault.

use std::collections::BTreeMap;
use std::path::PathBuf;

use gatecheck::circuit::{compile, Compiled, SetId};
use gatecheck::cli::check_program;
use gatecheck::nest::{build_nests, enumerate_error_locations, Endpoint, Nest};
use gatecheck::program::{parse_program, BoundaryId, NestKind, Program};
use rayon::prelude::*;

use super::replay::{fired, Trace};

pub const FRAME_PROGRAMS: [&str; 4] = ["add_x", "trim_x", "had_swap_off", "had_swap_on"];
pub const ROUNDS: u32 = 2;

/// (nest, boundary name or "interior") -> (distinct sticks, contributing faults).
pub type Census = BTreeMap<(String, String), (usize, usize)>;

pub fn tests_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub fn load(name: &str) -> Program {
    let text = std::fs::read_to_string(tests_dir().join("programs").join(format!("{name}.scp"))).unwrap();
    parse_program(&text).unwrap()
}

fn boundary_name(p: &Program, b: BoundaryId) -> String {
    p.boundaries[b.0 as usize].name.clone()
}

pub fn oracle(c: &Compiled) -> Census {
    let tr = Trace::new(c);
    let locs = enumerate_error_locations(&c.circuit);
    let events: Vec<Vec<SetId>> = locs.par_iter().map(|err| fired(c, &tr.flipped(c, &[err]))).collect();
    // Faults per distinct stick, grouped like the census.
    type Ends = BTreeMap<(SetId, Option<SetId>), usize>;
    let mut sticks: BTreeMap<(String, String), Ends> = BTreeMap::new();
    for lit in &events {
        for kind in [NestKind::Primal, NestKind::Dual] {
            let mine: Vec<SetId> = lit.iter().copied().filter(|&s| c.sets.set(s).nest == kind).collect();
            let (key, ends) = match mine[..] {
                [] => continue,
                [a] => {
                    let link = c.sets.set(a).link.expect("lone event without a boundary link");
                    (boundary_name(&c.program, link), (a, None))
                }
                [a, b] => ("interior".to_string(), (a, Some(b))),
                _ => panic!("{} balls fired in one nest", mine.len()),
            };
            *sticks.entry((kind.to_string(), key)).or_default().entry(ends).or_default() += 1;
        }
    }
    sticks.into_iter().map(|(k, m)| (k, (m.len(), m.values().sum()))).collect()
}

pub fn census(p: &Program, nests: &[&Nest]) -> Census {
    let mut out = Census::new();
    for nest in nests {
        for s in &nest.sticks {
            let key = match s.b {
                Endpoint::Boundary(b) => boundary_name(p, b),
                Endpoint::Ball(_) => "interior".to_string(),
            };
            let e = out.entry((nest.kind.to_string(), key)).or_default();
            e.0 += 1;
            e.1 += s.contributors.len();
        }
    }
    out
}

pub fn render(c: &Census) -> String {
    let mut s = format!("# nest boundary sticks contributors (rounds {ROUNDS})\n");
    for ((nest, b), (n, k)) in c {
        s += &format!("{nest} {b} {n} {k}\n");
    }
    s
}

pub fn golden(name: &str) -> PathBuf {
    tests_dir().join("golden").join(format!("{name}.txt"))
}

/// Validates the program and compares its built nests with the frozen census.
pub fn check_frame(name: &str) -> Result<Census, String> {
    let p = load(name);
    let diags = check_program(&p, p.default_rounds());
    if !diags.is_empty() {
        return Err(format!("{name}: {diags:?}"));
    }
    let c = compile(&p, ROUNDS).map_err(|e| e.to_string())?;
    let (primal, dual, stats) = build_nests(&c, &enumerate_error_locations(&c.circuit)).map_err(|e| e.to_string())?;
    if stats.cliques != 0 {
        return Err(format!("{name}: {} cliques", stats.cliques));
    }
    let built = census(&p, &[&primal, &dual]);
    let frozen = std::fs::read_to_string(golden(name)).map_err(|e| format!("{name}: {e}"))?;
    if render(&built) != frozen {
        return Err(format!("{name}: nests differ from the golden census\n{}", render(&built)));
    }
    Ok(built)
}
