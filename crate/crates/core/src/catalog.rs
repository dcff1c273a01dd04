//! Shipped fixtures: small lattices, basis maps between them, spaces,
//! systems with morphisms, and a generator of structured sources.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::basis_map::{BasisMap, CapRamp, Tail};
use crate::ideal::Ideal;
use crate::lattice::{CompleteLattice, Elem, Lattice};
use crate::lift::{probe_spaces, Leg, StructuredSource};
use crate::powerset::{function_lattice, GroundMap, GroundSet};
use crate::space::BornSpace;
use crate::system::{
    chain_presentation, embed_space, ramp_system, validate_system, BasisObject, BornSystem, ObjElem, ObjectMap,
    SystemMorphism,
};

pub fn two() -> CompleteLattice {
    CompleteLattice::chain("2", &["0", "1"])
}

pub fn c3() -> CompleteLattice {
    CompleteLattice::chain("C3", &["0", "m", "1"])
}

pub fn m3() -> CompleteLattice {
    CompleteLattice::from_covers(
        "M3",
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
    )
}

pub fn n5() -> CompleteLattice {
    CompleteLattice::from_covers(
        "N5",
        &["0", "a", "b", "c", "1"],
        &[("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")],
    )
}

pub fn b2() -> CompleteLattice {
    CompleteLattice::from_covers(
        "B2",
        &["0", "a", "b", "1"],
        &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
    )
}

/// Every lattice with at most five elements, one per isomorphism class.
/// `M3` and `N5` are among them.
pub fn finite_lattices() -> Vec<CompleteLattice> {
    vec![
        CompleteLattice::chain("L1", &["0"]),
        two(),
        c3(),
        CompleteLattice::chain("C4", &["0", "p", "q", "1"]),
        b2(),
        CompleteLattice::chain("C5", &["0", "p", "q", "r", "1"]),
        m3(),
        n5(),
        CompleteLattice::from_covers(
            "D5",
            &["0", "z", "a", "b", "1"],
            &[("0", "z"), ("z", "a"), ("z", "b"), ("a", "1"), ("b", "1")],
        ),
        CompleteLattice::from_covers(
            "U5",
            &["0", "a", "b", "t", "1"],
            &[("0", "a"), ("0", "b"), ("a", "t"), ("b", "t"), ("t", "1")],
        ),
    ]
}

/// The finite catalog plus the ω-chain.
pub fn lattices() -> Vec<CompleteLattice> {
    let mut out = finite_lattices();
    out.push(CompleteLattice::omega());
    out
}

/// Named basis maps among `2`, `C3` and `M3`: identities, `⊥`-constants,
/// embeddings and collapses. Each preserves `⊥` and binary joins.
type NamedTable<'a> = (
    &'a str,
    &'a CompleteLattice,
    &'a CompleteLattice,
    &'a [(&'a str, &'a str)],
);

pub fn phi_catalog() -> Vec<(String, BasisMap)> {
    let (t, c, m) = (two(), c3(), m3());
    let mut out = Vec::new();
    for l in [&t, &c, &m] {
        out.push((format!("id_{}", l.name()), BasisMap::identity(l)));
        for k in [&t, &c, &m] {
            out.push((
                format!("bot_{}_{}", l.name(), k.name()),
                BasisMap::from_names(l, k, &[]),
            ));
        }
    }
    let named: [NamedTable; 9] = [
        ("low_2_C3", &t, &c, &[("1", "m")]),
        ("top_2_C3", &t, &c, &[("1", "1")]),
        ("atom_2_M3", &t, &m, &[("1", "a")]),
        ("top_2_M3", &t, &m, &[("1", "1")]),
        ("upper_C3_2", &c, &t, &[("1", "1")]),
        ("lower_C3_2", &c, &t, &[("m", "1"), ("1", "1")]),
        ("chain_C3_M3", &c, &m, &[("m", "a"), ("1", "1")]),
        (
            "support_M3_2",
            &m,
            &t,
            &[("a", "1"), ("b", "1"), ("c", "1"), ("1", "1")],
        ),
        (
            "support_M3_C3",
            &m,
            &c,
            &[("a", "1"), ("b", "1"), ("c", "1"), ("1", "1")],
        ),
    ];
    for (name, src, dst, pairs) in named {
        out.push((name.to_string(), BasisMap::from_names(src, dst, pairs)));
    }
    out.push((
        "swap_M3".into(),
        BasisMap::from_names(&m, &m, &[("a", "b"), ("b", "a"), ("c", "c"), ("1", "1")]),
    ));
    out
}

/// Named sup-preserving maps out of and into the ω-chain.
pub fn omega_maps() -> Vec<(String, BasisMap)> {
    let (w, t, c) = (CompleteLattice::omega(), two(), c3());
    vec![
        ("id_W".into(), BasisMap::identity(&w)),
        ("shift2_W".into(), ramp(&[(0, Elem::nat(0))], diagonal(2), &w)),
        ("lag_W".into(), ramp(&[], diagonal(-1), &w)),
        (
            "cap3_W".into(),
            ramp(
                &[],
                Tail::Shift {
                    offset: 0,
                    cap: Elem::nat(3),
                },
                &w,
            ),
        ),
        (
            "jump_W".into(),
            ramp(&[(0, Elem::nat(0))], Tail::Const(Elem::OMEGA), &w),
        ),
        ("bot_W".into(), ramp(&[], Tail::Const(Elem::nat(0)), &w)),
        (
            "support_W_2".into(),
            ramp(&[(0, Elem::nat(0))], Tail::Const(Elem::nat(1)), &t),
        ),
        (
            "steps_W_C3".into(),
            ramp(&[(0, Elem::nat(0)), (1, Elem::nat(1))], Tail::Const(Elem::nat(2)), &c),
        ),
        (
            "five_2_W".into(),
            BasisMap::table(&t, &w, vec![Elem::nat(0), Elem::nat(5)]).expect("monotone"),
        ),
        (
            "steps_C3_W".into(),
            BasisMap::table(&c, &w, vec![Elem::nat(0), Elem::nat(2), Elem::OMEGA]).expect("monotone"),
        ),
    ]
}

/// Spaces over `2`, `C3`, `M3` and the ω-chain on small grounds.
pub fn fixture_spaces() -> Vec<(String, BornSpace)> {
    let w = CompleteLattice::omega();
    let mut out = Vec::new();
    for (l, max) in [(two(), 3), (c3(), 2), (m3(), 1)] {
        for n in 0..=max {
            let x = GroundSet::numbered(&format!("X{n}"), "x", n);
            out.push((format!("full_{}_{n}", l.name()), BornSpace::full(&x, &l)));
        }
    }
    for n in 1..=2 {
        let x = GroundSet::numbered(&format!("X{n}"), "x", n);
        let carrier = function_lattice(&w, &x);
        for region in (0..n).powerset() {
            let label = if region.is_empty() {
                "full".to_string()
            } else {
                format!("r{}", region.iter().join(""))
            };
            let ideal =
                Ideal::ramp(&carrier, region.into_iter().collect(), carrier.top()).expect("ramp with ceiling ⊤");
            out.push((
                format!("{label}_W_{n}"),
                BornSpace::new(ideal).expect("ceiling ⊤ covers"),
            ));
        }
    }
    out
}

/// Fixture spaces whose bornology is listed and has at most `max` members.
pub fn small_extensional_spaces(max: usize) -> Vec<(String, BornSpace)> {
    fixture_spaces()
        .into_iter()
        .filter(|(_, sp)| sp.bornology().members().is_some_and(|m| m.len() <= max))
        .collect()
}

fn ramp(exceptions: &[(u32, Elem)], tail: Tail, dst: &CompleteLattice) -> BasisMap {
    BasisMap::ramp(
        &CompleteLattice::omega(),
        dst,
        CapRamp {
            exceptions: exceptions.iter().copied().collect::<BTreeMap<_, _>>(),
            tail,
            at_omega: None,
        },
    )
    .expect("fixture ramp is monotone")
}

fn diagonal(offset: i64) -> Tail {
    Tail::Shift {
        offset,
        cap: Elem::OMEGA,
    }
}

fn finite_system(
    ground: &GroundSet,
    basis: &CompleteLattice,
    bobj: &CompleteLattice,
    values: &[(&str, &[&str])],
) -> BornSystem {
    let carrier = function_lattice(basis, ground);
    let mut table = vec![(ObjElem::Basis(bobj.bot()), ObjElem::Function(carrier.bot()))];
    for (b, alpha) in values {
        table.push((
            ObjElem::Basis(bobj.element(b).expect("known element")),
            ObjElem::Function(carrier.function(alpha).expect("known function")),
        ));
    }
    validate_system(
        ground,
        ObjectMap::Table(table),
        BasisObject::Algebra(bobj.clone()),
        basis,
    )
    .expect("fixture system is valid")
}

/// Named systems: finite objects, embedded spaces, and ramp systems over
/// the naturals, several with non-principal spatializations.
pub fn system_corpus() -> Vec<(String, BornSystem)> {
    let w = CompleteLattice::omega();
    let (t, c) = (two(), c3());
    let x1 = GroundSet::new("X", &["x"]);
    let x2 = GroundSet::new("X", &["x", "y"]);
    let x3 = GroundSet::new("X", &["x", "y", "z"]);
    let empty = GroundSet::new("E", &[]);
    let mut out: Vec<(String, BornSystem)> = Vec::new();
    let mut add = |name: &str, sys: BornSystem| out.push((name.to_string(), sys));

    add("two_on_2", finite_system(&x1, &t, &t, &[("1", &["1"])]));
    add("two_on_c3", finite_system(&x2, &c, &t, &[("1", &["1", "1"])]));
    add("two_on_m3", finite_system(&x1, &m3(), &t, &[("1", &["1"])]));
    add("two_on_empty", finite_system(&empty, &t, &t, &[("1", &[])]));
    add(
        "chain_on_2",
        finite_system(&x2, &t, &c, &[("m", &["1", "0"]), ("1", &["1", "1"])]),
    );
    add(
        "square_on_2",
        finite_system(
            &x2,
            &t,
            &b2(),
            &[("a", &["1", "0"]), ("b", &["0", "1"]), ("1", &["1", "1"])],
        ),
    );
    add(
        "diamond_on_2",
        finite_system(
            &x3,
            &t,
            &m3(),
            &[
                ("a", &["1", "1", "0"]),
                ("b", &["0", "1", "1"]),
                ("c", &["1", "0", "1"]),
                ("1", &["1", "1", "1"]),
            ],
        ),
    );
    add(
        "pentagon_on_2",
        finite_system(
            &x2,
            &t,
            &n5(),
            &[
                ("a", &["1", "0"]),
                ("c", &["1", "0"]),
                ("b", &["0", "1"]),
                ("1", &["1", "1"]),
            ],
        ),
    );
    add(
        "c4_on_c3",
        finite_system(
            &x1,
            &c,
            &CompleteLattice::chain("C4", &["0", "p", "q", "1"]),
            &[("p", &["m"]), ("q", &["m"]), ("1", &["1"])],
        ),
    );
    add("embed_full_2_2", embed_space(&BornSpace::full(&x2, &t)));
    add("embed_full_2_3", embed_space(&BornSpace::full(&x3, &t)));
    add("embed_full_c3_1", embed_space(&BornSpace::full(&x1, &c)));

    let id = || ramp(&[], diagonal(0), &w);
    let jump = || ramp(&[(0, Elem::nat(0))], Tail::Const(Elem::OMEGA), &w);
    add("ramp_id", ramp_system(&x1, &w, vec![id()]).expect("valid"));
    add("ramp_diag", ramp_system(&x2, &w, vec![id(), id()]).expect("valid"));
    add(
        "ramp_diag3",
        ramp_system(&x3, &w, vec![id(), id(), id()]).expect("valid"),
    );
    add("ramp_jump", ramp_system(&x2, &w, vec![id(), jump()]).expect("valid"));
    add(
        "ramp_shift",
        ramp_system(&x2, &w, vec![id(), ramp(&[(0, Elem::nat(0))], diagonal(2), &w)]).expect("valid"),
    );
    add(
        "ramp_lag",
        ramp_system(&x2, &w, vec![ramp(&[], diagonal(-1), &w), id()]).expect("valid"),
    );
    add(
        "ramp_attained",
        ramp_system(&x2, &w, vec![jump(), jump()]).expect("valid"),
    );
    add(
        "ramp_two",
        ramp_system(&x1, &t, vec![ramp(&[(0, Elem::nat(0))], Tail::Const(Elem::nat(1)), &t)]).expect("valid"),
    );
    add(
        "ramp_c3",
        ramp_system(
            &x2,
            &c,
            vec![
                ramp(&[(0, Elem::nat(0)), (1, Elem::nat(1))], Tail::Const(Elem::nat(2)), &c),
                ramp(&[(0, Elem::nat(0)), (1, Elem::nat(0))], Tail::Const(Elem::nat(2)), &c),
            ],
        )
        .expect("valid"),
    );
    let carrier = function_lattice(&w, &x2);
    let half = BornSpace::new(Ideal::ramp(&carrier, [1].into(), carrier.top()).expect("ramp")).expect("covers");
    add("chain_half", chain_presentation(&half).expect("valid"));
    add(
        "embed_all_finite",
        embed_space(&BornSpace::all_finite(&x2, &w).expect("covers")),
    );
    add("embed_half", embed_space(&half));
    out
}

/// Looks up a corpus system by name.
pub fn corpus_system(name: &str) -> BornSystem {
    system_corpus()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, s)| s)
        .unwrap_or_else(|| panic!("no corpus system {name}"))
}

/// Named morphisms between corpus systems, including composable pairs
/// `diag3 → diag → id` and `square → two`.
pub fn morphism_corpus() -> Vec<(String, SystemMorphism)> {
    let w = CompleteLattice::omega();
    let t = two();
    let (id1, diag, diag3) = (
        corpus_system("ramp_id"),
        corpus_system("ramp_diag"),
        corpus_system("ramp_diag3"),
    );
    let collapse = GroundMap::new(diag.ground(), id1.ground(), vec![0, 0]).expect("map");
    let fold = GroundMap::new(diag3.ground(), diag.ground(), vec![0, 1, 1]).expect("map");
    let psi = BasisMap::identity(&w);
    let mut out = vec![
        (
            "diag_to_id".to_string(),
            SystemMorphism::new(&diag, &id1, &collapse, ObjectMap::Identity, &psi).expect("commutes"),
        ),
        (
            "diag3_to_diag".to_string(),
            SystemMorphism::new(&diag3, &diag, &fold, ObjectMap::Identity, &psi).expect("commutes"),
        ),
    ];
    let (square, two_on_2) = (corpus_system("square_on_2"), corpus_system("two_on_2"));
    let b = b2();
    let phi = ObjectMap::Basis(BasisMap::from_names(&b, &t, &[("a", "1"), ("b", "1"), ("1", "1")]));
    let to_one = GroundMap::new(square.ground(), two_on_2.ground(), vec![0, 0]).expect("map");
    out.push((
        "square_to_two".into(),
        SystemMorphism::new(&square, &two_on_2, &to_one, phi, &BasisMap::identity(&t)).expect("commutes"),
    ));
    for (name, sys) in system_corpus() {
        out.push((format!("id_{name}"), SystemMorphism::identity(&sys)));
    }
    out
}

/// Bases for generated structured sources.
pub fn source_bases() -> Vec<CompleteLattice> {
    vec![two(), c3(), CompleteLattice::omega()]
}

/// Legs out of `apex` over `basis`: every ground map into grounds of size 1
/// and 2, every covering catalog space there, and for finite bases also
/// legs changing basis along the catalog maps between `2` and `C3`.
pub fn generated_legs(apex: &GroundSet, basis: &CompleteLattice) -> Vec<Leg> {
    let mut out = Vec::new();
    for n in 1..=2 {
        let y = GroundSet::numbered(&format!("Y{n}"), "y", n);
        let maps = GroundMap::all(apex, &y);
        for sp in probe_spaces(&y, basis) {
            for f in &maps {
                out.push(Leg::fixed(f, &sp));
            }
        }
    }
    if !basis.is_omega() {
        let y = GroundSet::numbered("Y1", "y", 1);
        for (_, phi) in phi_catalog() {
            if phi.src() == basis && phi.dst() != basis && phi.dst().name() != "M3" {
                let sp = BornSpace::full(&y, phi.dst());
                for f in GroundMap::all(apex, &y) {
                    out.push(Leg::new(&f, &phi, &sp));
                }
            }
        }
    }
    out
}

/// Structured sources with at most `max_legs` legs (unordered pairs for two
/// legs) over apexes of size up to `max_apex` and the bases `2`, `C3`, ω.
pub fn structured_sources(max_apex: usize, max_legs: usize) -> Vec<StructuredSource> {
    let mut out = Vec::new();
    for basis in source_bases() {
        for n in 0..=max_apex {
            let apex = GroundSet::numbered(&format!("A{n}"), "a", n);
            let legs = generated_legs(&apex, &basis);
            let mut families: Vec<Vec<Leg>> = vec![Vec::new()];
            if max_legs >= 1 {
                families.extend(legs.iter().map(|l| vec![l.clone()]));
            }
            if max_legs >= 2 {
                families.extend(
                    legs.iter()
                        .tuple_combinations()
                        .map(|(a, b)| vec![a.clone(), b.clone()]),
                );
            }
            for fam in families {
                out.push(StructuredSource::new(&apex, &basis, fam).expect("generated legs fit"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis_map::{Op, OpSignature};
    use crate::ideal::Mode;
    use crate::system::{is_system_morphism, spatialize};

    fn isomorphic(a: &CompleteLattice, b: &CompleteLattice) -> bool {
        let (ea, eb) = (Lattice::elements(a).unwrap(), Lattice::elements(b).unwrap());
        ea.len() == eb.len()
            && eb.iter().copied().permutations(eb.len()).any(|p| {
                ea.iter().all(|x| {
                    ea.iter()
                        .all(|y| a.leq(x, y) == b.leq(&p[x.raw() as usize], &p[y.raw() as usize]))
                })
            })
    }

    /// Counts lattices on `n` labelled points with `0` bottom and `n-1` top
    /// up to isomorphism, by brute force over order relations.
    fn count_lattices(n: usize) -> usize {
        if n <= 2 {
            return 1;
        }
        let mid: Vec<usize> = (1..n - 1).collect();
        let pairs: Vec<(usize, usize)> = mid
            .iter()
            .flat_map(|&i| mid.iter().map(move |&j| (i, j)))
            .filter(|(i, j)| i != j)
            .collect();
        let mut classes: Vec<Vec<Vec<bool>>> = Vec::new();
        for mask in 0u32..(1 << pairs.len()) {
            let mut leq = vec![vec![false; n]; n];
            for (i, row) in leq.iter_mut().enumerate() {
                row[i] = true;
                row[n - 1] = true;
            }
            leq[0].fill(true);
            for (k, (i, j)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    leq[*i][*j] = true;
                }
            }
            let antisym = (0..n).all(|i| (0..n).all(|j| i == j || !(leq[i][j] && leq[j][i])));
            let trans = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(leq[i][j] && leq[j][k]) || leq[i][k])));
            if !antisym || !trans {
                continue;
            }
            let has_join = (0..n).all(|i| {
                (0..n).all(|j| {
                    let ubs: Vec<usize> = (0..n).filter(|&k| leq[i][k] && leq[j][k]).collect();
                    ubs.iter().any(|&u| ubs.iter().all(|&v| leq[u][v]))
                })
            });
            if !has_join {
                continue;
            }
            let iso = |a: &Vec<Vec<bool>>, b: &Vec<Vec<bool>>| {
                (0..n)
                    .permutations(n)
                    .any(|p| (0..n).all(|i| (0..n).all(|j| a[i][j] == b[p[i]][p[j]])))
            };
            if !classes.iter().any(|c| iso(c, &leq)) {
                classes.push(leq);
            }
        }
        classes.len()
    }

    #[test]
    fn catalog_is_complete_up_to_five() {
        let cat = finite_lattices();
        for n in 1..=5 {
            let here = cat.iter().filter(|l| l.size() == Some(n)).count();
            assert_eq!(here, count_lattices(n), "size {n}");
        }
        for (a, b) in cat.iter().tuple_combinations() {
            assert!(!isomorphic(a, b), "{} ≅ {}", a.name(), b.name());
        }
    }

    #[test]
    fn phi_catalog_preserves_bottom_and_joins() {
        for (name, phi) in phi_catalog() {
            assert!(
                phi.check_homomorphism(OpSignature::new(&[Op::Bot, Op::BinJoin])),
                "{name}"
            );
        }
    }

    #[test]
    fn corpus_shape() {
        let corpus = system_corpus();
        assert!(corpus.len() >= 20);
        let non_principal_ramps = corpus
            .iter()
            .filter(|(_, s)| *s.bobj() == BasisObject::Naturals)
            .filter(|(_, s)| !spatialize(s).unwrap().bornology().as_ramp().0.is_empty())
            .count();
        assert!(non_principal_ramps >= 5);
        for (name, sys) in &corpus {
            assert!(spatialize(sys).unwrap().bornology().contains_top(Mode::CLat), "{name}");
        }
    }

    #[test]
    fn corpus_morphisms_hold() {
        for (name, m) in morphism_corpus() {
            assert!(is_system_morphism(&m).holds(), "{name}");
        }
    }

    #[test]
    fn sources_fit() {
        let sources = structured_sources(2, 1);
        assert!(sources.iter().any(|s| s.legs().is_empty()));
        assert!(sources
            .iter()
            .any(|s| s.legs().iter().any(|l| l.basis_map.src() != l.basis_map.dst())));
    }
}
