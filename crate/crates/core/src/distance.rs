//! Shortest boundary-to-boundary chains.
//!
//! A nest is searched as an unweighted graph whose vertices are balls and
//! boundaries. Every stick costs one hop, since it stands for one physical
//! error. Boundaries may start or end a path but are never passed through:
//! a chain from `top` that touches `start` has already been absorbed.
//!
//! The distance of a nest is the smallest hop count over its declared
//! failure pairs, and the distance of the gate is the smaller of the two
//! nests. Topologically nontrivial rings are not searched; reports say so.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::nest::{Contributor, Endpoint, Nest, Stick};
use crate::pauli_core::LocationId;
use crate::program::{BoundaryId, NestKind, Program};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DistanceError {
    #[error("boundary `{0}` is not declared for the {1} nest")]
    UnknownBoundary(String, NestKind),
    #[error("a chain needs two different boundaries, got `{0}` twice")]
    SameBoundary(String),
    #[error("no failure_pair declared for the {0} nest")]
    NoFailurePairs(NestKind),
}

/// A shortest chain between two boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    /// Every vertex along the chain, starting at the first boundary.
    pub vertices: Vec<Endpoint>,
    /// One contributing fault per stick.
    pub witness: Vec<Contributor>,
}

impl Path {
    pub fn hops(&self) -> u32 {
        self.witness.len() as u32
    }
}

struct Graph<'a> {
    nest: &'a Nest,
    nodes: Vec<Endpoint>,
    index: HashMap<Endpoint, usize>,
    /// Neighbours of every node with the stick joining them, in tie-break order.
    adj: Vec<Vec<(usize, &'a Stick)>>,
}

impl<'a> Graph<'a> {
    fn new(nest: &'a Nest) -> Self {
        let mut nodes: Vec<Endpoint> = nest.balls.iter().map(|b| Endpoint::Ball(b.set)).collect();
        nodes.extend(nest.boundaries.iter().map(|&b| Endpoint::Boundary(b)));
        let index: HashMap<Endpoint, usize> = nodes.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let mut adj = vec![Vec::new(); nodes.len()];
        for s in &nest.sticks {
            let (Some(&a), Some(&b)) = (index.get(&s.a), index.get(&s.b)) else { continue };
            adj[a].push((b, s));
            adj[b].push((a, s));
        }
        let mut g = Graph { nest, nodes, index, adj };
        for k in 0..g.adj.len() {
            let mut list = std::mem::take(&mut g.adj[k]);
            list.sort_by(|x, y| g.order(x.0, y.0));
            g.adj[k] = list;
        }
        g
    }

    /// Tie-break order: balls by (round, site, set id), then boundaries.
    fn order(&self, a: usize, b: usize) -> Ordering {
        let key = |k: usize| match self.nodes[k] {
            Endpoint::Ball(s) => {
                let ball = self.nest.ball(s).expect("ball in nest");
                (0, ball.round, Some(ball.site), s.0)
            }
            Endpoint::Boundary(b) => (1, 0, None, b.0 as u32),
        };
        key(a).cmp(&key(b))
    }

    fn is_boundary(&self, k: usize) -> bool {
        matches!(self.nodes[k], Endpoint::Boundary(_))
    }

    fn path(&self, from: usize, to: usize, parent: &[Option<(usize, &Stick)>]) -> Path {
        let mut vertices = vec![self.nodes[to]];
        let mut witness = Vec::new();
        let mut k = to;
        while k != from {
            let (p, stick) = parent[k].expect("reached");
            witness.push(stick.contributors[0].clone());
            vertices.push(self.nodes[p]);
            k = p;
        }
        vertices.reverse();
        witness.reverse();
        Path { vertices, witness }
    }

    fn bfs(&self, from: usize, to: usize) -> Option<Path> {
        let mut parent: Vec<Option<(usize, &Stick)>> = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(k) = queue.pop_front() {
            if k == to {
                return Some(self.path(from, to, &parent));
            }
            if k != from && self.is_boundary(k) {
                continue;
            }
            for &(n, stick) in &self.adj[k] {
                if !seen[n] {
                    seen[n] = true;
                    parent[n] = Some((k, stick));
                    queue.push_back(n);
                }
            }
        }
        None
    }

    /// Most probable chain when every location fails with probability `p`.
    fn dijkstra(&self, from: usize, to: usize, p: f64) -> Option<(f64, Path)> {
        #[derive(PartialEq)]
        struct Entry(f64, usize);
        impl Eq for Entry {}
        impl PartialOrd for Entry {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Entry {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        let cost = |s: &Stick| -(s.weight.as_f64() * p).min(1.0).ln();
        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        let mut parent: Vec<Option<(usize, &Stick)>> = vec![None; self.nodes.len()];
        let mut heap = BinaryHeap::from([Entry(0.0, from)]);
        dist[from] = 0.0;
        while let Some(Entry(d, k)) = heap.pop() {
            if d > dist[k] {
                continue;
            }
            if k == to {
                return Some((d, self.path(from, to, &parent)));
            }
            if k != from && self.is_boundary(k) {
                continue;
            }
            for &(n, stick) in &self.adj[k] {
                let nd = d + cost(stick);
                if nd < dist[n] {
                    dist[n] = nd;
                    parent[n] = Some((k, stick));
                    heap.push(Entry(nd, n));
                }
            }
        }
        None
    }
}

fn boundary_node(g: &Graph, p: &Program, b: BoundaryId) -> Result<usize, DistanceError> {
    g.index
        .get(&Endpoint::Boundary(b))
        .copied()
        .ok_or_else(|| DistanceError::UnknownBoundary(p.boundary_info(b).name.clone(), g.nest.kind))
}

/// Shortest chain of sticks joining boundaries `a` and `b`, or `None` when
/// they are not connected.
pub fn boundary_pair_distance(
    p: &Program,
    nest: &Nest,
    a: BoundaryId,
    b: BoundaryId,
) -> Result<Option<Path>, DistanceError> {
    if a == b {
        return Err(DistanceError::SameBoundary(p.boundary_info(a).name.clone()));
    }
    let g = Graph::new(nest);
    Ok(g.bfs(boundary_node(&g, p, a)?, boundary_node(&g, p, b)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessStep {
    pub from: String,
    pub to: String,
    pub location: LocationId,
    pub fault: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairDistance {
    pub a: String,
    pub b: String,
    /// `None` when the boundaries are not connected.
    pub hops: Option<u32>,
    pub failure_pair: bool,
    /// Cost of the most probable chain, present with `--weighted`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted_cost: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NestDistance {
    pub nest: NestKind,
    pub balls: usize,
    pub sticks: usize,
    pub pairs: Vec<PairDistance>,
    /// Smallest hop count over the failure pairs.
    pub distance: Option<u32>,
    pub minimum_pair: Option<(String, String)>,
    pub witness: Vec<WitnessStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    pub schema: u32,
    pub rounds: u32,
    pub nests: Vec<NestDistance>,
    /// Smallest distance over the nests.
    pub distance: Option<u32>,
    pub rings_checked: bool,
}

impl DistanceReport {
    pub fn nest(&self, kind: NestKind) -> Option<&NestDistance> {
        self.nests.iter().find(|n| n.nest == kind)
    }

    pub fn pair(&self, kind: NestKind, a: &str, b: &str) -> Option<&PairDistance> {
        self.nest(kind)?.pairs.iter().find(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a))
    }
}

fn endpoint_name(p: &Program, nest: &Nest, e: Endpoint) -> String {
    match e {
        Endpoint::Boundary(b) => p.boundary_info(b).name.clone(),
        Endpoint::Ball(s) => {
            let ball = nest.ball(s).expect("ball in nest");
            format!("{}@r{}", ball.site, ball.round)
        }
    }
}

/// Distance of every boundary pair of each nest and the minimum over the
/// declared failure pairs. `weighted` adds the cost of the most probable
/// chain for a per-location error probability.
pub fn min_distance(
    p: &Program,
    nests: &[&Nest],
    rounds: u32,
    weighted: Option<f64>,
) -> Result<DistanceReport, DistanceError> {
    let mut out = Vec::new();
    for &nest in nests {
        let kind = nest.kind;
        let failure: Vec<(BoundaryId, BoundaryId)> = p
            .failure_pairs
            .iter()
            .filter(|f| f.nest == kind)
            .map(|f| (f.a.min(f.b), f.a.max(f.b)))
            .collect();
        if failure.is_empty() {
            return Err(DistanceError::NoFailurePairs(kind));
        }
        let g = Graph::new(nest);
        for &(a, b) in &failure {
            boundary_node(&g, p, a)?;
            boundary_node(&g, p, b)?;
        }
        let bounds = &nest.boundaries;
        let mut pairs = Vec::new();
        let mut best: Option<(u32, (BoundaryId, BoundaryId), Path)> = None;
        for (k, &a) in bounds.iter().enumerate() {
            for &b in &bounds[k + 1..] {
                let (na, nb) = (g.index[&Endpoint::Boundary(a)], g.index[&Endpoint::Boundary(b)]);
                let path = g.bfs(na, nb);
                let is_failure = failure.contains(&(a, b));
                let hops = path.as_ref().map(Path::hops);
                if let (true, Some(path)) = (is_failure, path) {
                    if best.as_ref().is_none_or(|(h, ..)| path.hops() < *h) {
                        best = Some((path.hops(), (a, b), path));
                    }
                }
                pairs.push(PairDistance {
                    a: p.boundary_info(a).name.clone(),
                    b: p.boundary_info(b).name.clone(),
                    hops,
                    failure_pair: is_failure,
                    weighted_cost: weighted.and_then(|w| g.dijkstra(na, nb, w)).map(|(c, _)| c),
                });
            }
        }
        let (distance, minimum_pair, witness) = match best {
            None => (None, None, Vec::new()),
            Some((h, (a, b), path)) => {
                let witness = path
                    .vertices
                    .windows(2)
                    .zip(&path.witness)
                    .map(|(v, c)| WitnessStep {
                        from: endpoint_name(p, nest, v[0]),
                        to: endpoint_name(p, nest, v[1]),
                        location: c.location,
                        fault: c.fault.to_string(),
                    })
                    .collect();
                let names = (p.boundary_info(a).name.clone(), p.boundary_info(b).name.clone());
                (Some(h), Some(names), witness)
            }
        };
        out.push(NestDistance {
            nest: kind,
            balls: nest.balls.len(),
            sticks: nest.sticks.len(),
            pairs,
            distance,
            minimum_pair,
            witness,
        });
    }
    let distance = out.iter().filter_map(|n| n.distance).min();
    Ok(DistanceReport { schema: 1, rounds, nests: out, distance, rings_checked: false })
}

impl fmt::Display for DistanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hops = |h: Option<u32>| h.map_or("unreachable".to_string(), |h| h.to_string());
        writeln!(f, "rounds per repeating frame: {}", self.rounds)?;
        for n in &self.nests {
            writeln!(f, "{} nest: {} balls, {} sticks", n.nest, n.balls, n.sticks)?;
            for pair in &n.pairs {
                let mark = if pair.failure_pair { " *" } else { "" };
                write!(f, "  {:>10} - {:<10} {}", pair.a, pair.b, hops(pair.hops))?;
                if let Some(c) = pair.weighted_cost {
                    write!(f, " (cost {c:.3})")?;
                }
                writeln!(f, "{mark}")?;
            }
            match &n.minimum_pair {
                Some((a, b)) => writeln!(f, "  distance {} via {a} - {b}", hops(n.distance))?,
                None => writeln!(f, "  distance unreachable for every failure pair")?,
            }
            for step in &n.witness {
                writeln!(f, "    {} at {}: {} -> {}", step.fault, step.location, step.from, step.to)?;
            }
        }
        writeln!(f, "distance: {}", hops(self.distance))?;
        write!(f, "rings not checked")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::compile;
    use crate::nest::{build_nests, enumerate_error_locations};
    use crate::program::{parse_program, D3_PLATE};

    #[test]
    fn plate_is_distance_three() {
        let p = parse_program(D3_PLATE).unwrap();
        let c = compile(&p, 5).unwrap();
        let (primal, dual, _) = build_nests(&c, &enumerate_error_locations(&c.circuit)).unwrap();
        let r = min_distance(&p, &[&primal, &dual], 5, None).unwrap();
        assert_eq!(r.pair(NestKind::Primal, "top", "bottom").unwrap().hops, Some(3));
        assert_eq!(r.pair(NestKind::Dual, "left", "right").unwrap().hops, Some(3));
        assert_eq!(r.distance, Some(3));
        for n in &r.nests {
            assert_eq!(n.witness.len() as u32, n.distance.unwrap());
        }
    }

    #[test]
    fn same_boundary_is_refused() {
        let p = parse_program(D3_PLATE).unwrap();
        let c = compile(&p, 3).unwrap();
        let (primal, _, _) = build_nests(&c, &enumerate_error_locations(&c.circuit)).unwrap();
        let top = p.boundary("top").unwrap();
        assert!(matches!(boundary_pair_distance(&p, &primal, top, top), Err(DistanceError::SameBoundary(_))));
        let left = p.boundary("left").unwrap();
        assert!(matches!(
            boundary_pair_distance(&p, &primal, top, left),
            Err(DistanceError::UnknownBoundary(..))
        ));
    }

    #[test]
    fn disconnected_pair_is_unreachable() {
        let p = parse_program(D3_PLATE).unwrap();
        let mut nest = Nest::empty(NestKind::Primal);
        nest.boundaries = vec![p.boundary("top").unwrap(), p.boundary("bottom").unwrap()];
        let r = min_distance(&p, &[&nest], 1, None).unwrap();
        assert_eq!(r.nests[0].distance, None);
        assert_eq!(r.distance, None);
    }
}
