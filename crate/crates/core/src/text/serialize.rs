//! Canonical text for a workspace. Parsing the output gives back an equal
//! workspace; named functions stay declared but uses are written inline.

use std::fmt::Write;

use itertools::Itertools;

use super::workspace::{ObjectSpec, Workspace};
use crate::basis_map::{BasisMap, CapRamp, MapRule, Tail};
use crate::ideal::IdealRepr;
use crate::lattice::{CompleteLattice, Lattice};
use crate::powerset::{GroundSet, LFunction};
use crate::system::{ObjElem, ObjectMap};

/// `{x=a y=b}` with every point listed.
pub fn function_text(ground: &GroundSet, basis: &CompleteLattice, f: &LFunction) -> String {
    let body = ground
        .points()
        .iter()
        .zip(f.values())
        .map(|(p, v)| format!("{p}={}", basis.element_name(*v)))
        .join(" ");
    format!("{{{body}}}")
}

/// `ideal extensional …` or `ideal ramp region={…} ceiling={…}`.
pub fn ideal_text(ground: &GroundSet, basis: &CompleteLattice, repr: &IdealRepr<LFunction>) -> String {
    match repr {
        IdealRepr::Extensional(members) => {
            let mut s = "ideal extensional".to_string();
            for m in members {
                s.push(' ');
                s.push_str(&function_text(ground, basis, m));
            }
            s
        }
        IdealRepr::Ramp { region, ceiling } => format!(
            "ideal ramp region={{{}}} ceiling={}",
            region.iter().map(|i| &ground.points()[*i]).join(","),
            function_text(ground, basis, ceiling)
        ),
    }
}

/// `slope=… offset=… cap=… except{…} at=…`.
pub fn ramp_text(dst: &CompleteLattice, r: &CapRamp) -> String {
    let mut s = match r.tail {
        Tail::Const(c) => format!("slope=0 cap={}", dst.element_name(c)),
        Tail::Shift { offset, cap } => format!("slope=1 offset={offset} cap={}", dst.element_name(cap)),
    };
    if !r.exceptions.is_empty() {
        let body = r
            .exceptions
            .iter()
            .map(|(n, e)| format!("{n} -> {}", dst.element_name(*e)))
            .join(", ");
        let _ = write!(s, " except{{{body}}}");
    }
    if let Some(e) = r.at_omega {
        let _ = write!(s, " at={}", dst.element_name(e));
    }
    s
}

/// Body of a `bmap` after the signature: a table or `ramp …`.
pub fn bmap_body(phi: &BasisMap) -> String {
    match phi.rule() {
        MapRule::Table(values) => {
            let src = phi.src();
            let body = Lattice::elements(src)
                .unwrap_or_default()
                .into_iter()
                .zip(values)
                .map(|(a, b)| format!("{} -> {}", src.element_name(a), phi.dst().element_name(*b)))
                .join(", ");
            format!("{{ {body} }}")
        }
        MapRule::Ramp(r) => format!("ramp {}", ramp_text(phi.dst(), r)),
    }
}

fn via_text(v: &super::workspace::ViaDecl) -> String {
    let mut s = format!(": {} -> {} via {}", v.src, v.dst, v.map);
    if let Some(b) = &v.bmap {
        s.push(' ');
        s.push_str(b);
    }
    s
}

pub fn serialize(ws: &Workspace) -> String {
    let mut blocks: Vec<String> = Vec::new();
    for (name, l) in ws.lattices.iter() {
        let mut s = String::new();
        match l.element_names() {
            None => {
                let _ = write!(s, "lattice {name} omega");
            }
            Some(names) => {
                let _ = writeln!(s, "lattice {name} finite");
                let _ = write!(s, "  elements {}", names.join(" "));
                for (a, b) in l.covers() {
                    let _ = write!(s, "\n  cover {} {}", l.element_name(a), l.element_name(b));
                }
            }
        }
        blocks.push(s);
    }
    for (name, x) in ws.sets.iter() {
        blocks.push(format!("set {name} {{ {} }}", x.points().join(" ")));
    }
    for (name, f) in ws.maps.iter() {
        let body = f
            .table()
            .iter()
            .enumerate()
            .map(|(i, j)| format!("{} -> {}", f.src().points()[i], f.dst().points()[*j]))
            .join(", ");
        blocks.push(format!(
            "map {name} : {} -> {} {{ {body} }}",
            f.src().name(),
            f.dst().name()
        ));
    }
    for (name, phi) in ws.bmaps.iter() {
        blocks.push(format!(
            "bmap {name} : {} -> {} {}",
            phi.src().name(),
            phi.dst().name(),
            bmap_body(phi)
        ));
    }
    for (name, values) in ws.fns.iter() {
        let body = values.iter().map(|(x, e)| format!("{x}={e}")).join(" ");
        blocks.push(format!("fn {name} {{{body}}}"));
    }
    for (name, sp) in ws.spaces.iter() {
        blocks.push(format!(
            "space {name}\n  ground {}\n  basis {}\n  {}",
            sp.ground.name(),
            sp.basis.name(),
            ideal_text(&sp.ground, &sp.basis, &sp.bornology)
        ));
    }
    for (name, sys) in ws.systems.iter() {
        let mut s = format!(
            "system {name}\n  ground {}\n  basis {}\n  bobj {}\n  kappa",
            sys.ground.name(),
            sys.basis.name(),
            sys.bobj_name
        );
        match &sys.kappa {
            ObjectMap::Table(rows) => {
                let bl = ws.lattices.get(&sys.bobj_name).expect("resolved object");
                s.push_str(" {");
                for (b, f) in rows {
                    if let (ObjElem::Basis(e), ObjElem::Function(f)) = (b, f) {
                        let _ = write!(
                            s,
                            "\n    {} -> {}",
                            bl.element_name(*e),
                            function_text(&sys.ground, &sys.basis, f)
                        );
                    }
                }
                s.push_str("\n  }");
            }
            ObjectMap::Coordinates(rs) => {
                s.push_str(" ramp {");
                for (p, r) in sys.ground.points().iter().zip(rs) {
                    if let MapRule::Ramp(ramp) = r.rule() {
                        let _ = write!(s, "\n    {p}: {}", ramp_text(r.dst(), ramp));
                    }
                }
                s.push_str("\n  }");
            }
            _ => s.push_str(" inclusion"),
        }
        blocks.push(s);
    }
    for (name, src) in ws.sources.iter() {
        let mut s = format!(
            "source {name}\n  apex {}\n  basis {}",
            src.apex.name(),
            src.basis.name()
        );
        for leg in &src.legs {
            let _ = write!(s, "\n  leg {}", leg.map);
            if let Some(b) = &leg.bmap {
                let _ = write!(s, " {b}");
            }
            let _ = write!(s, " -> {}", leg.space);
        }
        blocks.push(s);
    }
    for (name, a) in ws.arrows.iter() {
        blocks.push(format!("arrow {name} {}", via_text(a)));
    }
    for (name, m) in ws.morphisms.iter() {
        let object = match &m.object {
            ObjectSpec::Identity => "id".to_string(),
            ObjectSpec::Image => "image".to_string(),
            ObjectSpec::Map(n) => n.clone(),
            ObjectSpec::Table(pairs) => {
                format!("{{ {} }}", pairs.iter().map(|(a, b)| format!("{a} -> {b}")).join(", "))
            }
        };
        blocks.push(format!("morphism {name} {}\n  object {object}", via_text(&m.via)));
    }
    let mut out = blocks.join("\n\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}
