//! Brute-force oracles shared by the integration tests. They use only the
//! order of the basis lattices and recompute everything else from
//! definitions.
#![allow(dead_code)]

use std::collections::BTreeSet;

use bornolab::basis_map::BasisMap;
use bornolab::lattice::{CompleteLattice, Elem, Lattice};
use bornolab::powerset::{GroundMap, GroundSet, LFunction};

/// `(T(f, φ)α)(y) = ⋁ {φ(α(x)) | f(x) = y}`.
pub fn image(f: &GroundMap, phi: &BasisMap, alpha: &LFunction) -> LFunction {
    let dst = phi.dst();
    let mut out = vec![dst.bot(); f.dst().len()];
    for (x, a) in alpha.values().iter().enumerate() {
        let y = f.table()[x];
        out[y] = dst.join(&out[y], &phi.apply(*a));
    }
    LFunction(out)
}

/// Elements of a basis, truncated to `level` on the ω-chain.
pub fn grid(l: &CompleteLattice, level: u32) -> Vec<Elem> {
    match Lattice::elements(l) {
        Some(els) => els,
        None => (0..=level).map(Elem::nat).chain([Elem::OMEGA]).collect(),
    }
}

/// Every function `X → grid(L)`.
pub fn functions(l: &CompleteLattice, x: &GroundSet, level: u32) -> Vec<LFunction> {
    let g = grid(l, level);
    let mut out = vec![Vec::new()];
    for _ in 0..x.len() {
        out = out
            .into_iter()
            .flat_map(|v: Vec<Elem>| {
                g.iter().map(move |e| {
                    let mut w = v.clone();
                    w.push(*e);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(LFunction).collect()
}

pub fn leq(l: &CompleteLattice, a: &LFunction, b: &LFunction) -> bool {
    a.values().iter().zip(b.values()).all(|(x, y)| l.leq(x, y))
}

pub fn join(l: &CompleteLattice, a: &LFunction, b: &LFunction) -> LFunction {
    LFunction(a.values().iter().zip(b.values()).map(|(x, y)| l.join(x, y)).collect())
}

pub fn meet(l: &CompleteLattice, a: &LFunction, b: &LFunction) -> LFunction {
    LFunction(a.values().iter().zip(b.values()).map(|(x, y)| l.meet(x, y)).collect())
}

/// Least subset of `universe` containing `gens` and `⊥`, closed under
/// binary joins and downward, by iteration to a fixpoint.
pub fn closure(
    l: &CompleteLattice,
    universe: &[LFunction],
    gens: &[LFunction],
    bot: &LFunction,
) -> BTreeSet<LFunction> {
    let mut set: BTreeSet<LFunction> = gens.iter().cloned().collect();
    set.insert(bot.clone());
    loop {
        let mut next = set.clone();
        for a in &set {
            for b in &set {
                next.insert(join(l, a, b));
            }
            for c in universe {
                if leq(l, c, a) {
                    next.insert(c.clone());
                }
            }
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

/// Membership in the ramp downset with the given region and ceiling.
pub fn ramp_member(region: &BTreeSet<usize>, ceiling: &LFunction, alpha: &LFunction) -> bool {
    alpha
        .values()
        .iter()
        .zip(ceiling.values())
        .enumerate()
        .all(|(i, (a, c))| a <= c && !(region.contains(&i) && a.is_omega()))
}

/// Subsets of `X` as bitmasks of the points.
pub fn subset_masks(n: usize) -> Vec<u32> {
    (0..1u32 << n).collect()
}
