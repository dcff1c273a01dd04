//! The property suite behind `bornolab laws`: the laws of every module,
//! instantiated on the declarations of a workspace.
//!
//! Each check is a labelled [`Verdict`]. Quantifiers over ω-based carriers
//! range over the elements with coordinates in `{0, …, level, ω}`.

use itertools::Itertools;

use crate::basis_map::BasisMap;
use crate::ideal::{generate_ideal, ideal_catalog, is_ideal, GeneratorSet, Ideal, Mode};
use crate::lattice::{CompleteLattice, Lattice};
use crate::lift::{coverage_witnesses, initial_structure, verify_initiality, StructuredSource};
use crate::powerset::{forward_image, function_lattice, GroundMap, ImageOperator, LFunction};
use crate::space::{is_bounded, validate_space, BornSpace};
use crate::system::{
    embed_space, is_system_morphism, reflection_arrow, spatialize, spatialize_morphism, verify_universal_property,
    BornSystem,
};
use crate::text::Workspace;
use crate::verdict::Verdict;

/// A labelled check.
pub type Check = (String, Verdict);

fn fails(msg: String) -> Verdict {
    Verdict::Fails(msg)
}

/// Order, bound, idempotence, commutativity, absorption and associativity.
pub fn lattice_laws(l: &CompleteLattice, level: u32) -> Verdict {
    let els = l.truncated_elements(level);
    let name = |e| l.element_name(e);
    let (bot, top) = (l.bot(), l.top());
    let mut checked = 0usize;
    for &a in &els {
        if !l.leq(&bot, &a) || !l.leq(&a, &top) {
            return fails(format!("{} is not between ⊥ and ⊤", name(a)));
        }
        if l.meet(&a, &a) != a || l.join(&a, &a) != a {
            return fails(format!("{} is not idempotent", name(a)));
        }
        for &b in &els {
            let (m, j) = (l.meet(&a, &b), l.join(&a, &b));
            if m != l.meet(&b, &a) || j != l.join(&b, &a) {
                return fails(format!("{} and {} do not commute", name(a), name(b)));
            }
            if l.meet(&a, &j) != a || l.join(&a, &m) != a {
                return fails(format!("absorption fails at {}, {}", name(a), name(b)));
            }
            if l.leq(&a, &b) != (m == a) {
                return fails(format!("{} ≤ {} disagrees with their meet", name(a), name(b)));
            }
            for &c in &els {
                checked += 1;
                if l.meet(&m, &c) != l.meet(&a, &l.meet(&b, &c)) || l.join(&j, &c) != l.join(&a, &l.join(&b, &c)) {
                    return fails(format!("associativity fails at {}, {}, {}", name(a), name(b), name(c)));
                }
            }
        }
    }
    Verdict::Holds(format!("{checked} triples"))
}

/// Catalog ideals are ideals and are their own closure; two generators
/// generate the principal ideal of their join.
pub fn ideal_laws(l: &CompleteLattice, level: u32) -> Verdict {
    let catalog = ideal_catalog(l, level.min(3));
    for i in &catalog {
        if !is_ideal(l, i.repr()) {
            return fails(format!("catalog member {} is not an ideal", i.render()));
        }
        if let Some(ms) = i.members() {
            let again = generate_ideal(&GeneratorSet::new(l, ms.iter().copied()), Mode::CLat);
            if &again != i {
                return fails(format!("closure of {} is {}", i.render(), again.render()));
            }
        }
    }
    let els = l.truncated_elements(level);
    for (&a, &b) in els.iter().cartesian_product(&els) {
        let g = generate_ideal(&GeneratorSet::new(l, [a, b]), Mode::CLat);
        if g != Ideal::principal(l, &l.join(&a, &b)) {
            return fails(format!(
                "⟨{}, {}⟩ = {} is not ↓{}",
                l.element_name(a),
                l.element_name(b),
                g.render(),
                l.element_name(l.join(&a, &b))
            ));
        }
    }
    Verdict::Holds(format!("{} catalog ideals", catalog.len()))
}

/// `φ(a) ≤ b ⟺ a ≤ φ⊢(b)` when `φ` preserves joins.
pub fn adjunction_law(phi: &BasisMap, level: u32) -> Verdict {
    if !phi.is_join_preserving() {
        return Verdict::Holds("not join preserving; no adjoint to check".into());
    }
    let adj = match phi.right_adjoint() {
        Ok(r) => r,
        Err(e) => return fails(e.to_string()),
    };
    let (src, dst) = (phi.src(), phi.dst());
    for a in src.truncated_elements(level) {
        for b in dst.truncated_elements(level) {
            if dst.leq(&phi.apply(a), &b) != src.leq(&a, &adj.apply(b)) {
                return fails(format!(
                    "adjunction fails at a = {}, b = {}",
                    src.element_name(a),
                    dst.element_name(b)
                ));
            }
        }
    }
    Verdict::Holds(String::new())
}

/// Ground maps and basis maps of the workspace, with identities added.
fn candidates(ws: &Workspace) -> (Vec<GroundMap>, Vec<BasisMap>) {
    let mut fs: Vec<GroundMap> = ws.sets.iter().map(|(_, x)| GroundMap::identity(x)).collect();
    fs.extend(ws.maps.iter().map(|(_, f)| f.clone()));
    let mut phis: Vec<BasisMap> = ws.lattices.iter().map(|(_, l)| BasisMap::identity(l)).collect();
    phis.extend(ws.bmaps.iter().map(|(_, p)| p.clone()));
    (fs, phis)
}

fn image(f: &GroundMap, phi: &BasisMap, a: &LFunction) -> LFunction {
    forward_image(f, phi, a).expect("matching basis")
}

fn label(f: &GroundMap, phi: &BasisMap) -> String {
    format!(
        "T({}→{}, {}→{})",
        f.src().name(),
        f.dst().name(),
        phi.src().name(),
        phi.dst().name()
    )
}

/// Functor, meet-interchange and adjunction laws of `T(f, φ)`.
pub fn image_laws(f: &GroundMap, phi: &BasisMap, level: u32) -> Verdict {
    let src = function_lattice(phi.src(), f.src());
    let dst = function_lattice(phi.dst(), f.dst());
    let alphas = src.truncated_elements(level);
    let images: Vec<LFunction> = alphas.iter().map(|a| image(f, phi, a)).collect();
    if f.is_identity() && phi.is_identity() {
        if let Some(a) = alphas.iter().zip(&images).find(|(a, t)| a != t).map(|(a, _)| a) {
            return fails(format!("T(1, 1) moves {}", src.render(a)));
        }
    }
    for (i, a) in alphas.iter().enumerate() {
        for (j, b) in alphas.iter().enumerate() {
            let ab = image(f, phi, &src.meet(a, b));
            if dst.meet(&dst.meet(&images[i], &ab), &images[j]) != ab {
                return fails(format!(
                    "meet interchange fails at {}, {}",
                    src.render(a),
                    src.render(b)
                ));
            }
        }
    }
    if phi.is_join_preserving() {
        let t = ImageOperator::new(f, phi);
        for beta in dst.truncated_elements(level) {
            let back = match t.adjoint_apply(&beta) {
                Ok(b) => b,
                Err(e) => return fails(e.to_string()),
            };
            for (a, ta) in alphas.iter().zip(&images) {
                if dst.leq(ta, &beta) != src.leq(a, &back) {
                    return fails(format!("adjunction fails at {}, {}", src.render(a), dst.render(&beta)));
                }
            }
        }
    }
    Verdict::Holds(format!("{} functions", alphas.len()))
}

/// `T(g, ψ) ∘ T(f, φ) = T(g ∘ f, ψ ∘ φ)`.
pub fn composition_law(f: &GroundMap, phi: &BasisMap, g: &GroundMap, psi: &BasisMap, level: u32) -> Verdict {
    let gf = match f.then(g) {
        Ok(m) => m,
        Err(e) => return fails(e),
    };
    let composite = match phi.then(psi) {
        Ok(m) => m,
        Err(e) => return fails(e.to_string()),
    };
    let src = function_lattice(phi.src(), f.src());
    for a in src.truncated_elements(level) {
        if image(g, psi, &image(f, phi, &a)) != image(&gf, &composite, &a) {
            return fails(format!("composition fails at {}", src.render(&a)));
        }
    }
    Verdict::Holds(String::new())
}

/// Validity of the lift, coverage of its witnesses and initiality.
pub fn lift_checks(name: &str, src: &StructuredSource, level: u32, probe_bound: usize) -> Vec<Check> {
    let tau = match initial_structure(src) {
        Ok(t) => t,
        Err(e) => return vec![(format!("source {name}: initial structure"), fails(e.to_string()))],
    };
    let valid = match validate_space(src.apex(), src.basis(), tau.repr().clone()) {
        Ok(_) => Verdict::Holds(tau.render()),
        Err(e) => fails(e.to_string()),
    };
    let coverage = match coverage_witnesses(src, level) {
        Ok(r) if r.covered && r.members_ok => Verdict::Holds(r.certificate),
        Ok(r) => fails(r.certificate),
        Err(e) => fails(e.to_string()),
    };
    vec![
        (format!("source {name}: initial structure is a space"), valid),
        (format!("source {name}: coverage witnesses reach ⊤"), coverage),
        (
            format!("source {name}: initiality"),
            verify_initiality(src, &tau, probe_bound),
        ),
    ]
}

/// Reflection arrow and universal property of a system, at its own
/// spatialization.
pub fn reflection_checks(name: &str, sys: &BornSystem) -> Vec<Check> {
    let r = match reflection_arrow(sys) {
        Ok(r) => r,
        Err(e) => return vec![(format!("system {name}: reflection arrow"), fails(e.to_string()))],
    };
    let spat = spatialize(sys).expect("reflection arrow exists");
    vec![
        (
            format!("system {name}: reflection arrow is a morphism"),
            is_system_morphism(&r),
        ),
        (
            format!("system {name}: universal property at Spat"),
            verify_universal_property(sys, &spat, &r),
        ),
    ]
}

/// `Spat(E(S)) = S`.
pub fn spat_embed_check(sp: &BornSpace) -> Verdict {
    match spatialize(&embed_space(sp)) {
        Ok(back) if &back == sp => Verdict::Holds(String::new()),
        Ok(back) => fails(format!("Spat E gives {}", back.bornology().render())),
        Err(e) => fails(e.to_string()),
    }
}

/// Runs every law on every applicable declaration.
pub fn run(ws: &Workspace, level: u32, probe_bound: usize) -> Vec<Check> {
    let mut out: Vec<Check> = Vec::new();
    for (name, l) in ws.lattices.iter() {
        out.push((format!("lattice {name}: lattice laws"), lattice_laws(l, level)));
        out.push((format!("lattice {name}: ideal closure"), ideal_laws(l, level)));
    }
    for (name, phi) in ws.bmaps.iter() {
        out.push((format!("bmap {name}: adjunction"), adjunction_law(phi, level)));
    }
    let (fs, phis) = candidates(ws);
    let pairs: Vec<(&GroundMap, &BasisMap)> = fs.iter().cartesian_product(&phis).collect();
    for (f, phi) in &pairs {
        out.push((format!("{}: image laws", label(f, phi)), image_laws(f, phi, level)));
    }
    for ((f, phi), (g, psi)) in pairs.iter().cartesian_product(&pairs) {
        if f.dst() == g.src() && phi.dst() == psi.src() {
            out.push((
                format!("{} then {}: composition", label(f, phi), label(g, psi)),
                composition_law(f, phi, g, psi, level),
            ));
        }
    }
    let mut spaces = Vec::new();
    for (name, decl) in ws.spaces.iter() {
        match decl.validate() {
            Ok(sp) => {
                let id = is_bounded(
                    &GroundMap::identity(sp.ground()),
                    &BasisMap::identity(sp.basis()),
                    &sp,
                    &sp,
                );
                out.push((format!("space {name}: valid"), Verdict::Holds(sp.bornology().render())));
                out.push((
                    format!("space {name}: identity bounded"),
                    id.unwrap_or_else(|e| fails(e.to_string())),
                ));
                out.push((format!("space {name}: Spat E = Id"), spat_embed_check(&sp)));
                spaces.push(sp);
            }
            Err(e) => out.push((format!("space {name}: valid"), fails(e.to_string()))),
        }
    }
    let mut arrows = Vec::new();
    for (name, _) in ws.arrows.iter() {
        let v = match ws.arrow_parts(name) {
            Ok((s, d, f, psi)) => {
                let v = is_bounded(&f, &psi, &s, &d).unwrap_or_else(|e| fails(e.to_string()));
                if v.holds() {
                    arrows.push((name, s, d, f, psi));
                }
                v
            }
            Err(e) => fails(e.to_string()),
        };
        out.push((format!("arrow {name}: bounded"), v));
    }
    for ((n1, s, d1, f, phi), (n2, s2, d, g, psi)) in arrows.iter().cartesian_product(&arrows) {
        if d1 != s2 {
            continue;
        }
        let v = match (f.then(g), phi.then(psi)) {
            (Ok(gf), Ok(comp)) => is_bounded(&gf, &comp, s, d).unwrap_or_else(|e| fails(e.to_string())),
            (Err(e), _) => fails(e),
            (_, Err(e)) => fails(e.to_string()),
        };
        out.push((format!("arrow {n1} then {n2}: bounded"), v));
    }
    for (name, _) in ws.sources.iter() {
        match ws.source(name) {
            Ok(src) => out.extend(lift_checks(name, &src, level, probe_bound)),
            Err(e) => out.push((format!("source {name}: assembles"), fails(e.to_string()))),
        }
    }
    for (name, decl) in ws.systems.iter() {
        match decl.validate() {
            Ok(sys) => {
                out.push((format!("system {name}: valid"), Verdict::Holds(String::new())));
                out.extend(reflection_checks(name, &sys));
            }
            Err(e) => out.push((format!("system {name}: valid"), fails(e.to_string()))),
        }
    }
    for (name, _) in ws.morphisms.iter() {
        match ws.morphism_unchecked(name) {
            Ok(m) => {
                let v = is_system_morphism(&m);
                out.push((format!("morphism {name}: square commutes"), v.clone()));
                if v.holds() {
                    let s = match spatialize_morphism(&m) {
                        Ok(_) => Verdict::Holds(String::new()),
                        Err(e) => fails(e.to_string()),
                    };
                    out.push((format!("morphism {name}: Spat is bounded"), s));
                }
            }
            Err(e) => out.push((format!("morphism {name}: assembles"), fails(e.to_string()))),
        }
    }
    out
}
