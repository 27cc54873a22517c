//! Scene files for looking at a nest in an external 3D viewer.
//!
//! Balls sit at `(i, j, round)`. Closing sets are pushed half a round later
//! so that the extra sets of a trimming round do not overlap the regular
//! ones. A stick to a boundary ends at a marker half a unit from its ball,
//! pointing away from the middle of the nest towards the other balls that
//! touch the same boundary.
//!
//! Two formats are written:
//!
//! * `scene-json`, schema 1, which keeps weights and can be read back with
//!   [`import_scene`];
//! * a Wavefront OBJ subset with `v`, `g` and `l` records, for viewing only.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::nest::{Endpoint, Nest};
use crate::program::{NestKind, Program};

pub const RADIUS_MIN: f64 = 0.02;
pub const RADIUS_MAX: f64 = 0.1;
pub const INTERIOR: &str = "interior";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    SceneJson,
    Obj,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::SceneJson => "json",
            Format::Obj => "obj",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub set: u32,
    pub site: [u32; 2],
    pub round: u32,
    pub closing: bool,
    pub position: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMarker {
    pub id: u16,
    pub name: String,
    /// Unit direction markers are offset in.
    pub direction: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndRef {
    Ball(u32),
    Boundary(u16),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub a: EndRef,
    pub b: EndRef,
    pub from: [f64; 3],
    pub to: [f64; 3],
    /// Merged weight in units of 1/15 of one location's error budget.
    pub weight: u64,
    pub radius: f64,
    pub color: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub schema: u32,
    pub nest: NestKind,
    pub colors: Vec<String>,
    pub vertices: Vec<Vertex>,
    pub boundaries: Vec<BoundaryMarker>,
    pub cylinders: Vec<Cylinder>,
}

fn round4(x: f64) -> f64 {
    let r = (x * 1e4).round() / 1e4;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn r3(v: [f64; 3]) -> [f64; 3] {
    v.map(round4)
}

/// Lays out a nest as a scene.
pub fn scene(p: &Program, nest: &Nest) -> Scene {
    let position = |e: Endpoint| -> Option<[f64; 3]> {
        let Endpoint::Ball(s) = e else { return None };
        let b = nest.ball(s)?;
        let offset = if b.closing { 0.5 } else { 0.0 };
        Some([b.site.i as f64, b.site.j as f64, b.round as f64 + offset])
    };
    let vertices: Vec<Vertex> = nest
        .balls
        .iter()
        .map(|b| Vertex {
            set: b.set.0,
            site: [b.site.i, b.site.j],
            round: b.round,
            closing: b.closing,
            position: r3(position(Endpoint::Ball(b.set)).expect("ball")),
        })
        .collect();

    let mean = |pts: &[[f64; 3]]| -> [f64; 3] {
        let n = pts.len().max(1) as f64;
        let mut m = [0.0; 3];
        for p in pts {
            for k in 0..3 {
                m[k] += p[k] / n;
            }
        }
        m
    };
    let all: Vec<[f64; 3]> = vertices.iter().map(|v| v.position).collect();
    let centre = mean(&all);
    let mut touching: BTreeMap<u16, Vec<[f64; 3]>> = BTreeMap::new();
    for s in &nest.sticks {
        if let (Some(pa), Endpoint::Boundary(b)) = (position(s.a), s.b) {
            touching.entry(b.0).or_default().push(pa);
        }
    }
    let boundaries: Vec<BoundaryMarker> = nest
        .boundaries
        .iter()
        .map(|&b| {
            let c = touching.get(&b.0).map_or(centre, |pts| mean(pts));
            let d = [c[0] - centre[0], c[1] - centre[1], c[2] - centre[2]];
            let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let direction = if len > 1e-9 { d.map(|x| x / len) } else { [0.0, 0.0, -1.0] };
            BoundaryMarker { id: b.0, name: p.boundary_info(b).name.clone(), direction: r3(direction) }
        })
        .collect();
    let direction: BTreeMap<u16, [f64; 3]> = boundaries.iter().map(|m| (m.id, m.direction)).collect();

    let w_max = nest.sticks.iter().map(|s| s.weight.0).max().unwrap_or(1).max(1) as f64;
    let cylinders = nest
        .sticks
        .iter()
        .map(|s| {
            let from = position(s.a).expect("sticks start at a ball");
            let (b, to, color) = match s.b {
                Endpoint::Ball(id) => (EndRef::Ball(id.0), position(s.b).expect("ball"), INTERIOR.to_string()),
                Endpoint::Boundary(id) => {
                    let d = direction[&id.0];
                    let to = [from[0] + 0.5 * d[0], from[1] + 0.5 * d[1], from[2] + 0.5 * d[2]];
                    (EndRef::Boundary(id.0), to, p.boundary_info(id).name.clone())
                }
            };
            let Endpoint::Ball(a) = s.a else { unreachable!("sticks start at a ball") };
            Cylinder {
                a: EndRef::Ball(a.0),
                b,
                from: r3(from),
                to: r3(to),
                weight: s.weight.0,
                radius: round4(RADIUS_MIN + (RADIUS_MAX - RADIUS_MIN) * s.weight.0 as f64 / w_max),
                color,
            }
        })
        .collect();
    let mut colors = vec![INTERIOR.to_string()];
    colors.extend(boundaries.iter().map(|b| b.name.clone()));
    Scene { schema: 1, nest: nest.kind, colors, vertices, boundaries, cylinders }
}

/// Serializes a nest. Output bytes depend only on the nest and program.
pub fn export_nest(p: &Program, nest: &Nest, format: Format) -> String {
    let s = scene(p, nest);
    match format {
        Format::SceneJson => {
            let mut out = serde_json::to_string_pretty(&s).expect("scene serializes");
            out.push('\n');
            out
        }
        Format::Obj => to_obj(&s),
    }
}

fn to_obj(s: &Scene) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {} nest: {} balls, {} sticks", s.nest, s.vertices.len(), s.cylinders.len());
    let mut index: BTreeMap<u32, usize> = BTreeMap::new();
    for (k, v) in s.vertices.iter().enumerate() {
        let [x, y, z] = v.position;
        let _ = writeln!(out, "v {x} {y} {z}");
        index.insert(v.set, k + 1);
    }
    let mut next = s.vertices.len() + 1;
    for color in &s.colors {
        let group: Vec<&Cylinder> = s.cylinders.iter().filter(|c| &c.color == color).collect();
        if group.is_empty() {
            continue;
        }
        let _ = writeln!(out, "g {color}");
        for c in group {
            let EndRef::Ball(a) = c.a else { continue };
            let b = match c.b {
                EndRef::Ball(b) => index[&b],
                EndRef::Boundary(_) => {
                    let [x, y, z] = c.to;
                    let _ = writeln!(out, "v {x} {y} {z}");
                    next += 1;
                    next - 1
                }
            };
            let _ = writeln!(out, "l {} {b}", index[&a]);
        }
    }
    out
}

/// The ball and stick multigraph stored in a scene.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneGraph {
    pub balls: Vec<u32>,
    pub sticks: Vec<(EndRef, EndRef, u64)>,
}

impl SceneGraph {
    pub fn of_nest(nest: &Nest) -> Self {
        let end = |e: Endpoint| match e {
            Endpoint::Ball(s) => EndRef::Ball(s.0),
            Endpoint::Boundary(b) => EndRef::Boundary(b.0),
        };
        SceneGraph {
            balls: nest.balls.iter().map(|b| b.set.0).collect(),
            sticks: nest.sticks.iter().map(|s| (end(s.a), end(s.b), s.weight.0)).collect(),
        }
    }
}

/// Reads a scene-json file back into its multigraph.
pub fn import_scene(json: &str) -> Result<SceneGraph, serde_json::Error> {
    let s: Scene = serde_json::from_str(json)?;
    Ok(SceneGraph {
        balls: s.vertices.iter().map(|v| v.set).collect(),
        sticks: s.cylinders.iter().map(|c| (c.a, c.b, c.weight)).collect(),
    })
}
