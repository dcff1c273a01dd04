//! Bornological spaces `(X, τ)`: an ideal `τ` of `L^X` whose generated
//! complete ideal contains `⊤`, and the bounded maps between them.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::basis_map::BasisMap;
use crate::ideal::{preimage_ideal, Ideal, IdealError, IdealRepr, Mode};
use crate::lattice::{CompleteLattice, Elem, Lattice};
use crate::powerset::{function_lattice, FunctionLattice, GroundMap, GroundSet, ImageOperator, LFunction};
use crate::verdict::Verdict;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("not an ideal: {0}")]
    NotAnIdeal(String),
    #[error("no coverage: the bornology has supremum {0}, not ⊤")]
    NoCoverage(String),
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("not bounded: {0}")]
    NotBounded(String),
}

impl From<IdealError> for SpaceError {
    fn from(e: IdealError) -> Self {
        SpaceError::NotAnIdeal(e.to_string())
    }
}

/// A validated bornological space.
#[derive(Debug, Clone, PartialEq)]
pub struct BornSpace {
    ground: GroundSet,
    basis: CompleteLattice,
    bornology: Ideal<FunctionLattice>,
}

/// Checks the ideal axioms and coverage (with arbitrary joins).
pub fn validate_space(
    ground: &GroundSet,
    basis: &CompleteLattice,
    tau: IdealRepr<LFunction>,
) -> Result<BornSpace, SpaceError> {
    let carrier = function_lattice(basis, ground);
    let ideal = match tau {
        IdealRepr::Extensional(members) => Ideal::from_members(&carrier, members)?,
        IdealRepr::Ramp { region, ceiling } => {
            if !carrier.owns(&ceiling) {
                return Err(SpaceError::NotAnIdeal(format!("{ceiling:?} is not in {carrier:?}")));
            }
            Ideal::ramp(&carrier, region, ceiling)?
        }
    };
    BornSpace::new(ideal)
}

impl BornSpace {
    /// Wraps an ideal of `L^X` after checking coverage.
    pub fn new(bornology: Ideal<FunctionLattice>) -> Result<Self, SpaceError> {
        if !bornology.contains_top(Mode::CLat) {
            let carrier = bornology.carrier();
            return Err(SpaceError::NoCoverage(carrier.render(&bornology.sup())));
        }
        Ok(BornSpace {
            ground: bornology.carrier().ground().clone(),
            basis: bornology.carrier().basis().clone(),
            bornology,
        })
    }

    /// `(X, L^X)`.
    pub fn full(ground: &GroundSet, basis: &CompleteLattice) -> Self {
        BornSpace::new(Ideal::full(&function_lattice(basis, ground))).expect("⊤ is a member")
    }

    /// `(X, {α | α(x) < ω for all x})` over the ω-chain.
    pub fn all_finite(ground: &GroundSet, basis: &CompleteLattice) -> Result<Self, SpaceError> {
        BornSpace::new(Ideal::all_finite(&function_lattice(basis, ground))?)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn basis(&self) -> &CompleteLattice {
        &self.basis
    }

    pub fn bornology(&self) -> &Ideal<FunctionLattice> {
        &self.bornology
    }

    pub fn carrier(&self) -> &FunctionLattice {
        self.bornology.carrier()
    }
}

fn check_shapes(f: &GroundMap, phi: &BasisMap, src: &BornSpace, dst: &BornSpace) -> Result<(), SpaceError> {
    if f.src() != src.ground() || f.dst() != dst.ground() {
        return Err(SpaceError::BasisMismatch(format!(
            "ground map {} → {} between spaces on {} and {}",
            f.src().name(),
            f.dst().name(),
            src.ground().name(),
            dst.ground().name()
        )));
    }
    if phi.src() != src.basis() || phi.dst() != dst.basis() {
        return Err(SpaceError::BasisMismatch(format!(
            "basis map {} → {} between spaces over {} and {}",
            phi.src().name(),
            phi.dst().name(),
            src.basis().name(),
            dst.basis().name()
        )));
    }
    Ok(())
}

/// Smallest truncation level at which a member of `tau1` outside `pre`
/// must appear if there is one.
fn separating_level(carrier: &FunctionLattice, a: &Ideal<FunctionLattice>, b: &Ideal<FunctionLattice>) -> u32 {
    [a.sup(), b.sup()]
        .iter()
        .flat_map(|c| carrier.coordinates(c))
        .filter_map(|v| v.finite())
        .max()
        .unwrap_or(0)
        + 1
}

/// `T(f, φ)(α) ∈ τ₂` for every `α ∈ τ₁`, with the first failing `α` as
/// witness.
///
/// Extensional bornologies are scanned. A ramp bornology is compared with
/// the preimage of `τ₂`, which is again a ramp; when inclusion fails the
/// witness is found among the members up to the level that separates them.
pub fn is_bounded(f: &GroundMap, phi: &BasisMap, src: &BornSpace, dst: &BornSpace) -> Result<Verdict, SpaceError> {
    check_shapes(f, phi, src, dst)?;
    let t = ImageOperator::new(f, phi);
    let witness = |candidates: Vec<LFunction>| {
        candidates.into_iter().find_map(|alpha| {
            let image = t.apply(&alpha);
            (!dst.bornology.contains(&image))
                .then(|| format!("{} ↦ {}", src.carrier().render(&alpha), dst.carrier().render(&image)))
        })
    };
    if let Some(members) = src.bornology.members() {
        return Ok(match witness(members.iter().cloned().collect()) {
            Some(w) => Verdict::Fails(w),
            None => Verdict::Holds(format!("{} members checked", members.len())),
        });
    }
    let (level, structural) = match preimage_ideal(&t, &dst.bornology) {
        Ok(pre) if src.bornology.is_subset(&pre) => {
            return Ok(Verdict::Holds(format!("τ₁ ⊆ {}", pre.render())));
        }
        Ok(pre) => (separating_level(src.carrier(), &src.bornology, &pre), true),
        Err(_) => (crate::ideal::DEFAULT_LEVEL, false),
    };
    Ok(match witness(src.bornology.members_within(level)) {
        Some(w) => Verdict::Fails(w),
        None if structural => Verdict::Fails("inclusion fails but no witness found".into()),
        None => Verdict::Holds(format!("no witness up to level {level}")),
    })
}

/// A bounded pair `(f, φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceMorphism {
    src: BornSpace,
    dst: BornSpace,
    ground_map: GroundMap,
    basis_map: BasisMap,
}

impl SpaceMorphism {
    pub fn new(
        src: &BornSpace,
        dst: &BornSpace,
        ground_map: &GroundMap,
        basis_map: &BasisMap,
    ) -> Result<Self, SpaceError> {
        match is_bounded(ground_map, basis_map, src, dst)? {
            Verdict::Fails(w) => Err(SpaceError::NotBounded(w)),
            Verdict::Holds(_) => Ok(SpaceMorphism {
                src: src.clone(),
                dst: dst.clone(),
                ground_map: ground_map.clone(),
                basis_map: basis_map.clone(),
            }),
        }
    }

    pub fn identity(sp: &BornSpace) -> Self {
        SpaceMorphism {
            src: sp.clone(),
            dst: sp.clone(),
            ground_map: GroundMap::identity(sp.ground()),
            basis_map: BasisMap::identity(sp.basis()),
        }
    }

    pub fn src(&self) -> &BornSpace {
        &self.src
    }

    pub fn dst(&self) -> &BornSpace {
        &self.dst
    }

    pub fn ground_map(&self) -> &GroundMap {
        &self.ground_map
    }

    pub fn basis_map(&self) -> &BasisMap {
        &self.basis_map
    }

    /// `next ∘ self`, re-verified.
    pub fn then(&self, next: &SpaceMorphism) -> Result<SpaceMorphism, SpaceError> {
        let g = self
            .ground_map
            .then(&next.ground_map)
            .map_err(SpaceError::BasisMismatch)?;
        let phi = self
            .basis_map
            .then(&next.basis_map)
            .map_err(|e| SpaceError::BasisMismatch(e.to_string()))?;
        SpaceMorphism::new(&self.src, &next.dst, &g, &phi)
    }
}

/// The classical axioms for a family of subsets of `X`, given as bitmasks:
/// the family covers `X`, is closed under subsets, and is closed under
/// finite unions (the empty union included).
pub fn classical_axioms(x: &GroundSet, family: &BTreeSet<u32>) -> bool {
    let all = if x.len() >= 32 { u32::MAX } else { (1u32 << x.len()) - 1 };
    let covers = family.iter().fold(0, |acc, b| acc | b) == all;
    let hereditary = family.iter().all(|&b| {
        // every submask of b
        let mut d = b;
        loop {
            if !family.contains(&d) {
                return false;
            }
            if d == 0 {
                return true;
            }
            d = (d - 1) & b;
        }
    });
    let unions = family.contains(&0) && family.iter().all(|a| family.iter().all(|b| family.contains(&(a | b))));
    covers && hereditary && unions
}

/// Characteristic function of a subset of `X` in `2^X`.
pub fn characteristic(two: &CompleteLattice, x: &GroundSet, mask: u32) -> LFunction {
    let (lo, hi) = (two.bot(), two.top());
    LFunction((0..x.len()).map(|i| if mask >> i & 1 == 1 { hi } else { lo }).collect())
}

/// The subsets of `X` named by a classical bornology over `2`.
pub fn classical_family(sp: &BornSpace) -> Option<BTreeSet<u32>> {
    let members = sp.bornology().members()?;
    let top = sp.basis().top();
    Some(
        members
            .iter()
            .map(|a| {
                a.values()
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v == top)
                    .fold(0u32, |acc, (i, _)| acc | 1 << i)
            })
            .collect(),
    )
}

/// Truncated membership oracle for a space: its members up to `level`.
pub fn members_up_to(sp: &BornSpace, level: u32) -> Vec<LFunction> {
    sp.bornology().members_within(level)
}

/// Convenience for ω-chain literals.
pub fn nat_function(values: &[Option<u32>]) -> LFunction {
    LFunction(values.iter().map(|v| v.map_or(Elem::OMEGA, Elem::nat)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis_map::{CapRamp, Tail};

    fn two() -> CompleteLattice {
        CompleteLattice::chain("2", &["0", "1"])
    }

    fn xy() -> GroundSet {
        GroundSet::new("X", &["x", "y"])
    }

    fn family(x: &GroundSet, masks: &[u32]) -> IdealRepr<LFunction> {
        IdealRepr::Extensional(masks.iter().map(|m| characteristic(&two(), x, *m)).collect())
    }

    #[test]
    fn full_powerset_is_valid() {
        assert!(validate_space(&xy(), &two(), family(&xy(), &[0, 1, 2, 3])).is_ok());
    }

    #[test]
    fn missing_point_is_no_coverage() {
        assert!(matches!(
            validate_space(&xy(), &two(), family(&xy(), &[0, 1])),
            Err(SpaceError::NoCoverage(_))
        ));
    }

    #[test]
    fn non_ideal_is_rejected() {
        assert!(matches!(
            validate_space(&xy(), &two(), family(&xy(), &[0, 1, 2])),
            Err(SpaceError::NotAnIdeal(_))
        ));
    }

    #[test]
    fn all_finite_ramp_is_a_space() {
        let x = GroundSet::new("X", &["x"]);
        let w = CompleteLattice::omega();
        let sp = validate_space(
            &x,
            &w,
            IdealRepr::Ramp {
                region: [0].into(),
                ceiling: nat_function(&[None]),
            },
        )
        .unwrap();
        assert!(!sp.bornology().is_principal());
    }

    #[test]
    fn classical_examples() {
        let x = xy();
        assert!(classical_axioms(&x, &[0, 1, 2, 3].into()));
        assert!(!classical_axioms(&x, &[0, 1].into()));
        assert!(!classical_axioms(&x, &[0, 1, 2].into()));
        assert!(classical_axioms(&GroundSet::new("E", &[]), &[0].into()));
        assert!(!classical_axioms(&GroundSet::new("E", &[]), &BTreeSet::new()));
    }

    #[test]
    fn identity_and_full_targets_are_bounded() {
        let w = CompleteLattice::omega();
        let x = xy();
        let sp = BornSpace::all_finite(&x, &w).unwrap();
        let id = GroundMap::identity(&x);
        assert!(is_bounded(&id, &BasisMap::identity(&w), &sp, &sp).unwrap().holds());
        let full = BornSpace::full(&x, &w);
        let swap = GroundMap::new(&x, &x, vec![1, 0]).unwrap();
        assert!(is_bounded(&swap, &BasisMap::identity(&w), &full, &full)
            .unwrap()
            .holds());
        assert!(is_bounded(&swap, &BasisMap::identity(&w), &sp, &full).unwrap().holds());
        assert!(!is_bounded(&swap, &BasisMap::identity(&w), &full, &sp).unwrap().holds());
    }

    #[test]
    fn collapse_to_omega_is_unbounded() {
        let w = CompleteLattice::omega();
        let x = GroundSet::new("X", &["x"]);
        let sp = BornSpace::all_finite(&x, &w).unwrap();
        let phi = BasisMap::ramp(
            &w,
            &w,
            CapRamp {
                exceptions: [(0, Elem::nat(0))].into(),
                tail: Tail::Const(Elem::OMEGA),
                at_omega: None,
            },
        )
        .unwrap();
        let v = is_bounded(&GroundMap::identity(&x), &phi, &sp, &sp).unwrap();
        assert_eq!(v, Verdict::Fails("{x=1} ↦ {x=w}".into()));
    }

    #[test]
    fn basis_mismatch_is_reported() {
        let x = xy();
        let a = BornSpace::full(&x, &two());
        let b = BornSpace::full(&x, &CompleteLattice::omega());
        assert!(matches!(
            is_bounded(&GroundMap::identity(&x), &BasisMap::identity(&two()), &a, &b),
            Err(SpaceError::BasisMismatch(_))
        ));
    }

    #[test]
    fn morphisms_compose() {
        let w = CompleteLattice::omega();
        let x = xy();
        let y = GroundSet::new("Y", &["p"]);
        let sx = BornSpace::all_finite(&x, &w).unwrap();
        let sy = BornSpace::all_finite(&y, &w).unwrap();
        let f = SpaceMorphism::new(&sx, &sy, &GroundMap::constant(&x, &y, 0), &BasisMap::identity(&w)).unwrap();
        let g = SpaceMorphism::new(&sy, &sx, &GroundMap::constant(&y, &x, 1), &BasisMap::identity(&w)).unwrap();
        let gf = f.then(&g).unwrap();
        assert_eq!(gf.ground_map().table(), &[1, 1]);
        assert_eq!(SpaceMorphism::identity(&sx).then(&f).unwrap(), f);
    }
}
