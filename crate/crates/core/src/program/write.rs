use std::fmt::Write;

use super::*;

/// Serializes a program. Directives equal to the frame default are omitted,
/// so the output parses back to an equal [`Program`].
pub fn write_program(p: &Program) -> String {
    let mut out = String::new();
    writeln!(out, "lattice {} {}", p.rows, p.cols).unwrap();
    if let Some(s) = p.schedule {
        writeln!(out, "schedule {s}").unwrap();
    }
    if let Some(g) = p.gate {
        writeln!(out, "gate {}", g.name()).unwrap();
    }
    for b in &p.boundaries {
        writeln!(out, "boundary {} {} {}", b.name, b.nest, b.extent.name()).unwrap();
    }
    for fp in &p.failure_pairs {
        writeln!(out, "failure_pair {} {} {}", fp.nest, p.boundary_info(fp.a).name, p.boundary_info(fp.b).name).unwrap();
    }
    for l in &p.logicals {
        let epoch = match l.epoch {
            Epoch::Initial => "initial",
            Epoch::Final => "final",
        };
        let kind = match l.kind {
            LogicalKind::XL => "X_L",
            LogicalKind::ZL => "Z_L",
        };
        write!(out, "logical {epoch} {kind}").unwrap();
        for s in &l.sites {
            write!(out, " q {} {}", s.i, s.j).unwrap();
        }
        out.push('\n');
    }
    for (k, f) in p.frames.iter().enumerate() {
        out.push('\n');
        out.push_str(if f.repeating { "frame repeating\n" } else { "frame\n" });
        let defaults = p.default_cells(k.checked_sub(1).map(|prev| &p.frames[prev]));
        for (idx, (cell, default)) in f.cells.iter().zip(&defaults).enumerate() {
            if cell == default {
                continue;
            }
            let s = p.site(idx);
            write!(out, "q {} {} {}", s.i, s.j, cell.command).unwrap();
            if let Some(b) = cell.boundary {
                write!(out, " boundary={}", p.boundary_info(b).name).unwrap();
            }
            out.push('\n');
        }
        out.push_str("end\n");
    }
    out
}
