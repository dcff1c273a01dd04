//! Initial structures for structured sources `(X →fⱼ (Xⱼ, τⱼ))`, the choice
//! witnesses for their coverage, and instance checks of the four
//! requirements that make the category of spaces topological.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use crate::basis_map::{BasisMap, Op, OpSignature};
use crate::ideal::{ideal_catalog, is_icd_at_top, preimage_ideal, Ideal, IdealError, IdealRepr, Mode};
use crate::lattice::{CompleteLattice, Elem, Lattice};
use crate::powerset::{function_lattice, FunctionLattice, GroundMap, GroundSet, ImageOperator, LFunction};
use crate::space::{is_bounded, BornSpace};
use crate::verdict::Verdict;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("leg {0}: {1}")]
    BadLeg(usize, String),
    #[error("leg {0} has no coverage")]
    NoLegCoverage(usize),
    #[error("leg {0}: basis map has no right adjoint")]
    NoAdjoint(usize),
}

/// One leg `(fⱼ, φⱼ): X → (Xⱼ, τⱼ)` of a structured source.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub ground_map: GroundMap,
    pub basis_map: BasisMap,
    pub space: BornSpace,
}

impl Leg {
    pub fn new(ground_map: &GroundMap, basis_map: &BasisMap, space: &BornSpace) -> Self {
        Leg {
            ground_map: ground_map.clone(),
            basis_map: basis_map.clone(),
            space: space.clone(),
        }
    }

    /// A fixed-basis leg.
    pub fn fixed(ground_map: &GroundMap, space: &BornSpace) -> Self {
        Leg::new(ground_map, &BasisMap::identity(space.basis()), space)
    }

    fn image(&self) -> ImageOperator {
        ImageOperator::new(&self.ground_map, &self.basis_map)
    }
}

/// An apex ground set and basis with legs into spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredSource {
    apex: GroundSet,
    basis: CompleteLattice,
    legs: Vec<Leg>,
}

impl StructuredSource {
    pub fn new(apex: &GroundSet, basis: &CompleteLattice, legs: Vec<Leg>) -> Result<Self, LiftError> {
        for (j, leg) in legs.iter().enumerate() {
            if leg.ground_map.src() != apex || leg.ground_map.dst() != leg.space.ground() {
                return Err(LiftError::BadLeg(j, "ground map does not fit".into()));
            }
            if leg.basis_map.src() != basis || leg.basis_map.dst() != leg.space.basis() {
                return Err(LiftError::BadLeg(j, "basis map does not fit".into()));
            }
        }
        Ok(StructuredSource {
            apex: apex.clone(),
            basis: basis.clone(),
            legs,
        })
    }

    pub fn apex(&self) -> &GroundSet {
        &self.apex
    }

    pub fn basis(&self) -> &CompleteLattice {
        &self.basis
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn carrier(&self) -> FunctionLattice {
        function_lattice(&self.basis, &self.apex)
    }
}

/// `τ = {α | T(fⱼ, φⱼ)(α) ∈ τⱼ for every j}`.
pub fn initial_structure(src: &StructuredSource) -> Result<Ideal<FunctionLattice>, LiftError> {
    let mut tau = Ideal::full(&src.carrier());
    for (j, leg) in src.legs.iter().enumerate() {
        let pre = preimage_ideal(&leg.image(), leg.space.bornology())
            .map_err(|e: IdealError| LiftError::BadLeg(j, e.to_string()))?;
        tau = tau.intersect(&pre);
    }
    Ok(tau)
}

/// A family inside an ideal whose join is `⊤`: the listed members, plus the
/// limit of the family when it is an infinite chain.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageFamily {
    pub members: Vec<LFunction>,
    /// Where the family goes: `c` on coordinates outside the region, the
    /// naturals climbing to `ω` on the region.
    pub chain: Option<(BTreeSet<usize>, LFunction)>,
}

/// The canonical family of an ideal with coverage: every member of a finite
/// ideal, or the cofinal chain of a ramp listed up to `level`.
pub fn canonical_family(tau: &Ideal<FunctionLattice>, level: u32) -> CoverageFamily {
    match tau.repr() {
        IdealRepr::Extensional(m) => CoverageFamily {
            members: m.iter().cloned().collect(),
            chain: None,
        },
        IdealRepr::Ramp { region, ceiling } => {
            let members = (0..=level)
                .map(|n| cofinal_member(region, ceiling, n))
                .dedup()
                .collect();
            CoverageFamily {
                members,
                chain: Some((region.clone(), ceiling.clone())),
            }
        }
    }
}

/// `γₙ`: `min(n, c(x))` on region coordinates and `c(x)` elsewhere. Every
/// member of the ramp lies below some `γₙ`.
pub fn cofinal_member(region: &BTreeSet<usize>, ceiling: &LFunction, n: u32) -> LFunction {
    LFunction(
        ceiling
            .values()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if region.contains(&i) {
                    (*c).min(Elem::nat(n))
                } else {
                    *c
                }
            })
            .collect(),
    )
}

/// Outcome of [`coverage_witnesses`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    /// `α_h` for each enumerated choice map `h`.
    pub alphas: Vec<LFunction>,
    /// Every `α_h` lies in the initial structure.
    pub members_ok: bool,
    /// The `α_h` reach `⊤`.
    pub covered: bool,
    pub certificate: String,
}

const CHOICE_BUDGET: usize = 4096;

/// The choice witnesses `α_h = ⋀ⱼ T(fⱼ, φⱼ)⊢(h(j))` for the canonical
/// families of the legs.
///
/// Finite families are enumerated outright; when their product would exceed
/// the budget, each finite family is cut down to its top element, which is
/// itself a family with join `⊤`. Chain families are enumerated up to
/// `level` and their supremum is certified through the limits of the
/// adjoints along the diagonal choices `h(j) = γⁿⱼ`.
pub fn coverage_witnesses(src: &StructuredSource, level: u32) -> Result<CoverageReport, LiftError> {
    let carrier = src.carrier();
    let mut families = Vec::new();
    for (j, leg) in src.legs.iter().enumerate() {
        if !leg.space.bornology().contains_top(Mode::CLat) {
            return Err(LiftError::NoLegCoverage(j));
        }
        if leg.image().basis_adjoint().is_none() {
            return Err(LiftError::NoAdjoint(j));
        }
        families.push(canonical_family(leg.space.bornology(), level));
    }
    let product: usize = families.iter().map(|f| f.members.len()).product();
    if product > CHOICE_BUDGET {
        for (fam, leg) in families.iter_mut().zip(&src.legs) {
            if fam.chain.is_none() {
                fam.members = vec![leg.space.carrier().top()];
            }
        }
    }
    let images: Vec<ImageOperator> = src.legs.iter().map(Leg::image).collect();
    let alpha_of = |h: &[&LFunction]| -> LFunction {
        h.iter().zip(&images).fold(carrier.top(), |acc, (beta, t)| {
            carrier.meet(&acc, &t.adjoint_apply(beta).expect("adjoint exists"))
        })
    };
    let alphas: Vec<LFunction> = if families.is_empty() {
        vec![alpha_of(&[])]
    } else {
        families
            .iter()
            .map(|f| f.members.iter())
            .multi_cartesian_product()
            .map(|h| alpha_of(&h))
            .collect()
    };
    let tau = initial_structure(src)?;
    let members_ok = alphas.iter().all(|a| tau.contains(a));
    let enumerated = carrier.join_all(&alphas);
    if enumerated == carrier.top() {
        return Ok(CoverageReport {
            alphas,
            members_ok,
            covered: true,
            certificate: format!("enumerated choices reach {}", carrier.render(&enumerated)),
        });
    }
    // Diagonal limit: at each apex point the meet over legs of the limit of
    // φⱼ⊢(γⁿⱼ(fⱼ x)); finite families sit at their top.
    let limit = LFunction(
        (0..src.apex.len())
            .map(|x| {
                src.legs.iter().zip(&families).fold(src.basis.top(), |acc, (leg, fam)| {
                    let adj = leg.image().basis_adjoint().expect("adjoint exists").clone();
                    let y = leg.ground_map.apply(x);
                    let v = match &fam.chain {
                        Some((region, ceiling)) if region.contains(&y) => adj.sup_of_finite_values(),
                        Some((_, ceiling)) => adj.apply(ceiling.at(y)),
                        None => adj.apply(leg.space.carrier().join_all(&fam.members).at(y)),
                    };
                    src.basis.meet(&acc, &v)
                })
            })
            .collect(),
    );
    let covered = limit == carrier.top();
    Ok(CoverageReport {
        alphas,
        members_ok,
        covered,
        certificate: format!("diagonal choices climb to {}", carrier.render(&limit)),
    })
}

/// Bases used for variable-basis probes.
pub fn probe_bases() -> Vec<CompleteLattice> {
    vec![
        CompleteLattice::chain("1", &["0"]),
        CompleteLattice::chain("2", &["0", "1"]),
        CompleteLattice::chain("C3", &["0", "m", "1"]),
        CompleteLattice::chain("C4", &["0", "p", "q", "1"]),
        CompleteLattice::from_covers(
            "B2",
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        ),
    ]
}

/// Maps from a finite probe basis into `l` preserving `⊥` and binary joins,
/// with values among the elements of `l` up to level 2.
pub fn probe_basis_maps(from: &CompleteLattice, l: &CompleteLattice) -> Vec<BasisMap> {
    let n = from.size().expect("finite probe basis");
    let sig = OpSignature::new(&[Op::Bot, Op::BinJoin]);
    std::iter::repeat_n(l.truncated_elements(2), n)
        .multi_cartesian_product()
        .filter_map(|values| BasisMap::table(from, l, values).ok())
        .filter(|m| m.check_homomorphism(sig))
        .collect()
}

/// Spaces with coverage on `z` over `l` from the ideal catalog at level 1.
pub fn probe_spaces(z: &GroundSet, l: &CompleteLattice) -> Vec<BornSpace> {
    let carrier = function_lattice(l, z);
    ideal_catalog(&carrier, 1)
        .into_iter()
        .filter_map(|i| BornSpace::new(i).ok())
        .collect()
}

/// For every probe `(Z, σ)` with `|Z| ≤ probe_bound` and every `(g, ψ)`,
/// all legs after `(g, ψ)` bounded implies `(g, ψ)` bounded into
/// `(X, τ)`; the legs themselves must be bounded out of `(X, τ)`.
pub fn verify_initiality(src: &StructuredSource, tau: &Ideal<FunctionLattice>, probe_bound: usize) -> Verdict {
    let apex = match BornSpace::new(tau.clone()) {
        Ok(sp) => sp,
        Err(e) => return Verdict::Fails(format!("initial structure is not a space: {e}")),
    };
    for (j, leg) in src.legs.iter().enumerate() {
        match is_bounded(&leg.ground_map, &leg.basis_map, &apex, &leg.space) {
            Ok(v) if v.holds() => {}
            Ok(v) => return Verdict::Fails(format!("leg {j} is not bounded: {}", v.detail())),
            Err(e) => return Verdict::Fails(format!("leg {j}: {e}")),
        }
    }
    let mut checked = 0usize;
    let mut bases: Vec<(CompleteLattice, Vec<BasisMap>)> =
        vec![(src.basis.clone(), vec![BasisMap::identity(&src.basis)])];
    for b in probe_bases() {
        let maps = probe_basis_maps(&b, &src.basis);
        if !maps.is_empty() {
            bases.push((b, maps));
        }
    }
    for size in 0..=probe_bound {
        let z = GroundSet::numbered("Z", "z", size);
        for g in GroundMap::all(&z, &src.apex) {
            for (b, psis) in &bases {
                for sigma in probe_spaces(&z, b) {
                    for psi in psis {
                        checked += 1;
                        let legs_ok = src.legs.iter().all(|leg| {
                            let (Ok(gf), Ok(phi)) = (g.then(&leg.ground_map), psi.then(&leg.basis_map)) else {
                                return false;
                            };
                            is_bounded(&gf, &phi, &sigma, &leg.space).is_ok_and(|v| v.holds())
                        });
                        if !legs_ok {
                            continue;
                        }
                        match is_bounded(&g, psi, &sigma, &apex) {
                            Ok(v) if v.holds() => {}
                            Ok(v) => {
                                return Verdict::Fails(format!(
                                    "probe on {} over {} with {:?}: every leg bounded but {}",
                                    z.name(),
                                    b.name(),
                                    g,
                                    v.detail()
                                ))
                            }
                            Err(e) => return Verdict::Fails(e.to_string()),
                        }
                    }
                }
            }
        }
    }
    Verdict::Holds(format!("{checked} probes"))
}

/// Per-requirement verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct RequirementsReport {
    pub req1: Verdict,
    pub req2: Verdict,
    pub req3: Verdict,
    pub req4: Verdict,
}

impl RequirementsReport {
    pub fn all_pass(&self) -> bool {
        [&self.req1, &self.req2, &self.req3, &self.req4]
            .iter()
            .all(|v| v.holds())
    }

    pub fn verdicts(&self) -> [(&'static str, &Verdict); 4] {
        [
            ("req1", &self.req1),
            ("req2", &self.req2),
            ("req3", &self.req3),
            ("req4", &self.req4),
        ]
    }
}

const REQ_LEVEL: u32 = 2;

fn small_grounds() -> Vec<GroundSet> {
    (0..=2).map(|n| GroundSet::numbered(&format!("G{n}"), "g", n)).collect()
}

/// Image operators `T(f, id)` between the small ground sets.
fn fixed_images(l: &CompleteLattice) -> Vec<ImageOperator> {
    let grounds = small_grounds();
    grounds
        .iter()
        .cartesian_product(&grounds)
        .flat_map(|(a, b)| GroundMap::all(a, b))
        .map(|f| ImageOperator::fixed(&f, l))
        .collect()
}

/// Join of a coverage family, certified for chains.
fn family_join(carrier: &FunctionLattice, fam: &CoverageFamily) -> LFunction {
    match &fam.chain {
        Some((region, ceiling)) => LFunction(
            ceiling
                .values()
                .iter()
                .enumerate()
                .map(|(i, c)| if region.contains(&i) { Elem::OMEGA } else { *c })
                .collect(),
        ),
        None => carrier.join_all(&fam.members),
    }
}

/// Instance checks of the four requirements for the complete-lattice
/// theory over `l`, with `p` the arbitrary join and `t` the arbitrary meet.
pub fn check_requirements(l: &CompleteLattice) -> RequirementsReport {
    let grounds = small_grounds();
    let images = fixed_images(l);

    let req1 = Verdict::all(
        grounds.iter().flat_map(|x| {
            let carrier = function_lattice(l, x);
            ideal_catalog(&carrier, REQ_LEVEL)
                .into_iter()
                .filter(|i| i.contains_top(Mode::CLat))
                .map(move |i| {
                    let fam = canonical_family(&i, REQ_LEVEL);
                    let join = family_join(&carrier, &fam);
                    if join == carrier.top() && fam.members.iter().all(|a| i.contains(a)) {
                        Verdict::Holds(String::new())
                    } else {
                        Verdict::Fails(format!("family of {} joins to {}", i.render(), carrier.render(&join)))
                    }
                })
        }),
        "every covering catalog ideal has a family inside it joining to ⊤",
    );

    let req2 = Verdict::all(
        images.iter().map(|t| {
            let (src, dst) = (t.src(), t.dst());
            let adj = |b: &LFunction| t.adjoint_apply(b).expect("identity basis");
            for i in ideal_catalog(dst, REQ_LEVEL) {
                for b in i.members_within(REQ_LEVEL) {
                    if !i.contains(&t.apply(&adj(&b))) {
                        return Verdict::Fails(format!("φ∘φ⊢ leaves {} at {}", i.render(), dst.render(&b)));
                    }
                }
            }
            if adj(&dst.top()) != src.top() {
                return Verdict::Fails(format!("φ⊢(⊤) = {}", src.render(&adj(&dst.top()))));
            }
            let grid = dst.truncated_elements(REQ_LEVEL);
            for a in &grid {
                for b in &grid {
                    if dst.join(a, b) == dst.top() && adj(&dst.top()) != src.join(&adj(a), &adj(b)) {
                        return Verdict::Fails(format!(
                            "φ⊢ breaks the join of {} and {}",
                            dst.render(a),
                            dst.render(b)
                        ));
                    }
                }
            }
            // chains of constants climbing to ⊤ on the ω-chain
            if l.is_omega() {
                let basis_adj = t.basis_adjoint().expect("identity basis");
                if basis_adj.sup_of_finite_values() != basis_adj.apply(Elem::OMEGA) {
                    return Verdict::Fails("φ⊢ is not continuous at ω".into());
                }
            }
            Verdict::Holds(String::new())
        }),
        format!("{} image operators", images.len()),
    );

    let req3 = Verdict::all(
        images.iter().map(|t| {
            let (src, dst) = (t.src(), t.dst());
            let grid = src.truncated_elements(REQ_LEVEL);
            for a in &grid {
                for b in &grid {
                    let m = t.apply(&src.meet(a, b));
                    if !dst.leq(&m, &t.apply(a)) || !dst.leq(&m, &t.apply(b)) {
                        return Verdict::Fails(format!("image of {} ∧ {} escapes", src.render(a), src.render(b)));
                    }
                }
            }
            for n in 0..=3 {
                let tops = vec![src.top(); n];
                if src.meet_all(&tops) != src.top() {
                    return Verdict::Fails(format!("meet of {n} tops"));
                }
            }
            Verdict::Holds(String::new())
        }),
        "images of meets stay in each generated principal ideal; meets of ⊤ are ⊤",
    );

    let req4 = Verdict::all(
        grounds.iter().map(|x| {
            let carrier = function_lattice(l, x);
            match is_icd_at_top(&carrier) {
                Verdict::Fails(w) => Verdict::Fails(format!("{carrier:?}: {w}")),
                ok => ok,
            }
        }),
        "function lattices on up to two points",
    );

    RequirementsReport { req1, req2, req3, req4 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> CompleteLattice {
        CompleteLattice::chain("2", &["0", "1"])
    }

    fn c3() -> CompleteLattice {
        CompleteLattice::chain("C3", &["0", "m", "1"])
    }

    #[test]
    fn no_legs_gives_full_lattice() {
        let w = CompleteLattice::omega();
        let x = GroundSet::new("X", &["x", "y"]);
        let src = StructuredSource::new(&x, &w, vec![]).unwrap();
        let tau = initial_structure(&src).unwrap();
        assert_eq!(tau, Ideal::full(&src.carrier()));
        assert!(verify_initiality(&src, &tau, 1).holds());
        let cov = coverage_witnesses(&src, 3).unwrap();
        assert!(cov.covered && cov.members_ok);
    }

    #[test]
    fn identity_leg_reproduces_the_space() {
        let w = CompleteLattice::omega();
        let x = GroundSet::new("X", &["x", "y"]);
        let sp = BornSpace::all_finite(&x, &w).unwrap();
        let src = StructuredSource::new(&x, &w, vec![Leg::fixed(&GroundMap::identity(&x), &sp)]).unwrap();
        let tau = initial_structure(&src).unwrap();
        assert_eq!(&tau, sp.bornology());
        assert!(verify_initiality(&src, &tau, 2).holds());
    }

    #[test]
    fn two_projections_give_all_finite() {
        let w = CompleteLattice::omega();
        let x = GroundSet::new("X", &["x", "y"]);
        let p = GroundSet::new("P", &["p"]);
        let sp = BornSpace::all_finite(&p, &w).unwrap();
        let legs = vec![
            Leg::fixed(&GroundMap::new(&x, &p, vec![0, 0]).unwrap(), &sp),
            Leg::fixed(&GroundMap::new(&x, &p, vec![0, 0]).unwrap(), &sp),
        ];
        let src = StructuredSource::new(&x, &w, legs).unwrap();
        let tau = initial_structure(&src).unwrap();
        assert_eq!(tau, Ideal::all_finite(&src.carrier()).unwrap());
        let cov = coverage_witnesses(&src, 4).unwrap();
        assert!(cov.covered && cov.members_ok, "{}", cov.certificate);
        assert!(verify_initiality(&src, &tau, 2).holds());
    }

    #[test]
    fn full_leg_choice_of_tops() {
        let x = GroundSet::new("X", &["x", "y"]);
        let sp = BornSpace::full(&x, &two());
        let src = StructuredSource::new(&x, &two(), vec![Leg::fixed(&GroundMap::identity(&x), &sp)]).unwrap();
        let cov = coverage_witnesses(&src, 2).unwrap();
        assert!(cov.covered);
        assert!(cov.alphas.contains(&src.carrier().top()));
    }

    #[test]
    fn requirements_hold_on_small_bases() {
        for l in [two(), c3(), CompleteLattice::omega()] {
            let r = check_requirements(&l);
            assert!(r.all_pass(), "{}: {:?}", l.name(), r);
        }
    }
}
