//! Bornological systems `(X, κ, B)`: an ideal-category morphism
//! `κ: B → L^X` whose image generates `⊤` under arbitrary joins, together
//! with the embedding of spaces, spatialization, and the reflection.
//!
//! The object `B` is a finite lattice, the naturals `{0, 1, 2, …}` as an
//! ideal of the ω-chain, or a bornology `τ` itself. The last kind is what the
//! embedding produces: `E(X, τ) = (X, e_τ, τ)` with `e_τ` the inclusion.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::basis_map::{BasisMap, MapRule, Tail};
use crate::ideal::{generate_ideal, ideal_catalog, GeneratorSet, Ideal, Mode};
use crate::lattice::{CompleteLattice, Elem, Lattice};
use crate::lift::cofinal_member;
use crate::powerset::{function_lattice, FunctionLattice, GroundMap, GroundSet, ImageOperator, LFunction};
use crate::space::{is_bounded, BornSpace, SpaceError, SpaceMorphism};
use crate::verdict::Verdict;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("not an ideal-category morphism: {0}")]
    NotIdealMorphism(String),
    #[error("no coverage: the image of κ has supremum {0}")]
    NoCoverage(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("not representable: {0}")]
    NotRepresentable(String),
    #[error("not a system morphism: {0}")]
    NotAMorphism(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// An element of a basis object.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjElem {
    Basis(Elem),
    Function(LFunction),
}

impl fmt::Debug for ObjElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjElem::Basis(e) => write!(f, "{e:?}"),
            ObjElem::Function(a) => write!(f, "{a:?}"),
        }
    }
}

impl ObjElem {
    pub fn as_function(&self) -> &LFunction {
        match self {
            ObjElem::Function(a) => a,
            ObjElem::Basis(e) => panic!("expected a function, found {e:?}"),
        }
    }

    pub fn as_basis(&self) -> Elem {
        match self {
            ObjElem::Basis(e) => *e,
            ObjElem::Function(a) => panic!("expected a basis element, found {a:?}"),
        }
    }
}

/// The object `B` of a system.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisObject {
    /// A finite lattice.
    Algebra(CompleteLattice),
    /// `{0, 1, 2, …}` with the order of the ω-chain; no top.
    Naturals,
    /// An ideal of a function lattice with the inherited operations.
    Bornology(Ideal<FunctionLattice>),
}

impl BasisObject {
    /// A finite lattice, or the naturals when `l` is the ω-chain.
    pub fn from_lattice(l: &CompleteLattice) -> Self {
        if l.is_omega() {
            BasisObject::Naturals
        } else {
            BasisObject::Algebra(l.clone())
        }
    }

    pub fn name(&self) -> String {
        match self {
            BasisObject::Algebra(l) => l.name().to_string(),
            BasisObject::Naturals => "N".into(),
            BasisObject::Bornology(i) => i.render(),
        }
    }

    pub fn bot(&self) -> ObjElem {
        match self {
            BasisObject::Algebra(l) => ObjElem::Basis(l.bot()),
            BasisObject::Naturals => ObjElem::Basis(Elem::nat(0)),
            BasisObject::Bornology(i) => ObjElem::Function(i.carrier().bot()),
        }
    }

    pub fn join(&self, a: &ObjElem, b: &ObjElem) -> ObjElem {
        match self {
            BasisObject::Algebra(l) => ObjElem::Basis(l.join(&a.as_basis(), &b.as_basis())),
            BasisObject::Naturals => ObjElem::Basis(a.as_basis().max(b.as_basis())),
            BasisObject::Bornology(i) => ObjElem::Function(i.carrier().join(a.as_function(), b.as_function())),
        }
    }

    pub fn leq(&self, a: &ObjElem, b: &ObjElem) -> bool {
        match self {
            BasisObject::Algebra(l) => l.leq(&a.as_basis(), &b.as_basis()),
            BasisObject::Naturals => a.as_basis() <= b.as_basis(),
            BasisObject::Bornology(i) => i.carrier().leq(a.as_function(), b.as_function()),
        }
    }

    pub fn contains(&self, a: &ObjElem) -> bool {
        match (self, a) {
            (BasisObject::Algebra(l), ObjElem::Basis(e)) => l.contains(*e),
            (BasisObject::Naturals, ObjElem::Basis(e)) => !e.is_omega(),
            (BasisObject::Bornology(i), ObjElem::Function(f)) => i.carrier().owns(f) && i.contains(f),
            _ => false,
        }
    }

    /// Every element, when there are finitely many.
    pub fn elements(&self) -> Option<Vec<ObjElem>> {
        match self {
            BasisObject::Algebra(l) => Lattice::elements(l).map(|v| v.into_iter().map(ObjElem::Basis).collect()),
            BasisObject::Naturals => None,
            BasisObject::Bornology(i) => i.members().map(|m| m.iter().cloned().map(ObjElem::Function).collect()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.elements().is_some()
    }

    /// All elements of a finite object; otherwise those with coordinates up
    /// to `level`.
    pub fn probes(&self, level: u32) -> Vec<ObjElem> {
        match self {
            BasisObject::Naturals => (0..=level).map(|n| ObjElem::Basis(Elem::nat(n))).collect(),
            BasisObject::Bornology(i) if i.members().is_none() => {
                i.members_within(level).into_iter().map(ObjElem::Function).collect()
            }
            _ => self.elements().expect("finite object"),
        }
    }

    /// A chain `c(0) ≤ c(1) ≤ …` with every element below some `c(n)`.
    pub fn cofinal(&self, n: u32) -> ObjElem {
        match self {
            BasisObject::Naturals => ObjElem::Basis(Elem::nat(n)),
            BasisObject::Bornology(i) => {
                let (region, ceiling) = i.as_ramp();
                ObjElem::Function(cofinal_member(&region, &ceiling, n))
            }
            BasisObject::Algebra(l) => ObjElem::Basis(l.top()),
        }
    }

    /// Level past which the cofinal chain has settled into its shape.
    pub fn level_hint(&self) -> u32 {
        match self {
            BasisObject::Bornology(i) => i
                .carrier()
                .coordinates(&i.sup())
                .iter()
                .filter_map(|c| c.finite())
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }

    pub fn render(&self, a: &ObjElem) -> String {
        match (self, a) {
            (BasisObject::Algebra(l), ObjElem::Basis(e)) => l.element_name(*e),
            (BasisObject::Naturals, ObjElem::Basis(e)) => CompleteLattice::omega().element_name(*e),
            (BasisObject::Bornology(i), ObjElem::Function(f)) => i.carrier().render(f),
            (_, other) => format!("{other:?}"),
        }
    }
}

/// A map out of a basis object: into another basis object, or into `L^X`
/// when it is the `κ` of a system.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectMap {
    /// The identity, and also the inclusion `e_τ: τ → L^X`.
    Identity,
    /// Finite source given pointwise.
    Table(Vec<(ObjElem, ObjElem)>),
    /// A basis map acting on basis elements.
    Basis(BasisMap),
    /// `b ↦ (r_x(b))_x`, one basis map per ground point.
    Coordinates(Vec<BasisMap>),
    /// `α ↦ T(f, ψ)(α)`.
    Image(ImageOperator),
    /// `second ∘ first`.
    Then(Box<ObjectMap>, Box<ObjectMap>),
}

fn map_hint(m: &BasisMap) -> u32 {
    match m.rule() {
        MapRule::Table(_) => 0,
        MapRule::Ramp(r) => {
            let tail = match r.tail {
                Tail::Const(c) => c.finite().unwrap_or(0),
                Tail::Shift { offset, cap } => offset.unsigned_abs() as u32 + cap.finite().unwrap_or(0),
            };
            r.regime_start() + tail
        }
    }
}

impl ObjectMap {
    pub fn apply(&self, b: &ObjElem) -> ObjElem {
        match self {
            ObjectMap::Identity => b.clone(),
            ObjectMap::Table(t) => t
                .iter()
                .find(|(k, _)| k == b)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| panic!("{b:?} outside the table")),
            ObjectMap::Basis(m) => ObjElem::Basis(m.apply(b.as_basis())),
            ObjectMap::Coordinates(rs) => {
                let e = b.as_basis();
                ObjElem::Function(LFunction(rs.iter().map(|r| r.apply(e)).collect()))
            }
            ObjectMap::Image(t) => ObjElem::Function(t.apply(b.as_function())),
            ObjectMap::Then(a, c) => c.apply(&a.apply(b)),
        }
    }

    /// A level past which every ramp involved is constant or a shift.
    pub fn regime(&self) -> u32 {
        match self {
            ObjectMap::Identity | ObjectMap::Table(_) => 0,
            ObjectMap::Basis(m) => map_hint(m),
            ObjectMap::Coordinates(rs) => rs.iter().map(map_hint).max().unwrap_or(0),
            ObjectMap::Image(t) => map_hint(t.basis_map()),
            ObjectMap::Then(a, b) => a.regime() + b.regime(),
        }
    }

    /// `next ∘ self`, dropping identities.
    pub fn then(&self, next: &ObjectMap) -> ObjectMap {
        match (self, next) {
            (ObjectMap::Identity, m) | (m, ObjectMap::Identity) => m.clone(),
            _ => ObjectMap::Then(Box::new(self.clone()), Box::new(next.clone())),
        }
    }

    /// Table of the map on the given elements.
    pub fn tabulate(&self, on: &[ObjElem]) -> ObjectMap {
        ObjectMap::Table(on.iter().map(|b| (b.clone(), self.apply(b))).collect())
    }
}

/// A validated system `(X, κ, B)` over the basis `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct BornSystem {
    ground: GroundSet,
    basis: CompleteLattice,
    bobj: BasisObject,
    kappa: ObjectMap,
}

impl BornSystem {
    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn basis(&self) -> &CompleteLattice {
        &self.basis
    }

    pub fn bobj(&self) -> &BasisObject {
        &self.bobj
    }

    pub fn kappa(&self) -> &ObjectMap {
        &self.kappa
    }

    pub fn carrier(&self) -> FunctionLattice {
        function_lattice(&self.basis, &self.ground)
    }

    /// Level up to which pointwise checks out of `B` are run.
    pub fn check_level(&self) -> u32 {
        self.kappa.regime() + self.bobj.level_hint() + 3
    }

    pub fn kappa_at(&self, b: &ObjElem) -> LFunction {
        self.kappa.apply(b).as_function().clone()
    }
}

/// Value of `map` along the cofinal chain of `obj` past `hint`: its limit,
/// and which coordinates attain it.
fn eventual_limit(obj: &BasisObject, map: &ObjectMap, carrier: &FunctionLattice, hint: u32) -> (LFunction, Vec<bool>) {
    if let Some(els) = obj.elements() {
        let images: Vec<LFunction> = els.iter().map(|b| map.apply(b).as_function().clone()).collect();
        let sup = carrier.join_all(&images);
        return (sup.clone(), vec![true; sup.values().len()]);
    }
    let n = 2 * hint + 3;
    let v1 = map.apply(&obj.cofinal(n)).as_function().clone();
    let v2 = map.apply(&obj.cofinal(n + 1)).as_function().clone();
    let mut attained = Vec::new();
    let limit = LFunction(
        v1.values()
            .iter()
            .zip(v2.values())
            .map(|(a, b)| {
                let settled = a == b;
                attained.push(settled);
                if settled {
                    *a
                } else {
                    Elem::OMEGA
                }
            })
            .collect(),
    );
    (limit, attained)
}

fn kappa_failure(carrier: &FunctionLattice, bobj: &BasisObject, kappa: &ObjectMap) -> Option<String> {
    let level = kappa.regime() + bobj.level_hint() + 3;
    let probes = bobj.probes(level);
    for b in &probes {
        match kappa.apply(b) {
            ObjElem::Function(a) if carrier.owns(&a) => {}
            other => return Some(format!("κ({}) = {other:?} is not in {carrier:?}", bobj.render(b))),
        }
    }
    let k = |b: &ObjElem| kappa.apply(b).as_function().clone();
    if k(&bobj.bot()) != carrier.bot() {
        return Some(format!("κ(⊥) = {}", carrier.render(&k(&bobj.bot()))));
    }
    let pair_probes = if bobj.is_finite() {
        probes.clone()
    } else {
        bobj.probes(level.min(4))
    };
    for a in &pair_probes {
        for b in &pair_probes {
            let lhs = k(&bobj.join(a, b));
            let rhs = carrier.join(&k(a), &k(b));
            if lhs != rhs {
                return Some(format!(
                    "κ({} ∨ {}) = {} but κ({}) ∨ κ({}) = {}",
                    bobj.render(a),
                    bobj.render(b),
                    carrier.render(&lhs),
                    bobj.render(a),
                    bobj.render(b),
                    carrier.render(&rhs)
                ));
            }
        }
    }
    // preimages of catalog ideals are ideals of B on the probes
    if bobj.is_finite() {
        for j in ideal_catalog(carrier, 1) {
            let pre: Vec<&ObjElem> = probes.iter().filter(|b| j.contains(&k(b))).collect();
            for a in &pre {
                if let Some(b) = probes.iter().find(|b| bobj.leq(b, a) && !j.contains(&k(b))) {
                    return Some(format!(
                        "preimage of {} is not downward closed at {}",
                        j.render(),
                        bobj.render(b)
                    ));
                }
            }
        }
    }
    None
}

/// Checks that `κ` preserves `⊥` and binary joins and that its image
/// generates `⊤` under arbitrary joins.
pub fn validate_system(
    ground: &GroundSet,
    kappa: ObjectMap,
    bobj: BasisObject,
    basis: &CompleteLattice,
) -> Result<BornSystem, SystemError> {
    let carrier = function_lattice(basis, ground);
    if let BasisObject::Bornology(i) = &bobj {
        if !matches!(kappa, ObjectMap::Identity | ObjectMap::Image(_) | ObjectMap::Then(..)) && i.members().is_none() {
            return Err(SystemError::Mismatch(
                "maps out of a ramp bornology must be images".into(),
            ));
        }
    }
    if let Some(why) = kappa_failure(&carrier, &bobj, &kappa) {
        return Err(SystemError::NotIdealMorphism(why));
    }
    let sys = BornSystem {
        ground: ground.clone(),
        basis: basis.clone(),
        bobj,
        kappa,
    };
    let (sup, _) = eventual_limit(&sys.bobj, &sys.kappa, &carrier, sys.check_level());
    if sup != carrier.top() {
        return Err(SystemError::NoCoverage(carrier.render(&sup)));
    }
    Ok(sys)
}

/// `κ(n)(x) = r_x(n)` on the naturals.
pub fn ramp_system(
    ground: &GroundSet,
    basis: &CompleteLattice,
    ramps: Vec<BasisMap>,
) -> Result<BornSystem, SystemError> {
    if ramps.len() != ground.len() {
        return Err(SystemError::Mismatch(format!(
            "{} coordinates for {} points",
            ramps.len(),
            ground.len()
        )));
    }
    if let Some(r) = ramps.iter().find(|r| !r.src().is_omega() || r.dst() != basis) {
        return Err(SystemError::Mismatch(format!(
            "coordinate map {} → {} does not fit",
            r.src().name(),
            r.dst().name()
        )));
    }
    validate_system(ground, ObjectMap::Coordinates(ramps), BasisObject::Naturals, basis)
}

/// `(f, φ, ψ)` between systems: `T(f, ψ) ∘ κ₁ = κ₂ ∘ φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMorphism {
    src: BornSystem,
    dst: BornSystem,
    ground_map: GroundMap,
    object_map: ObjectMap,
    theory_map: BasisMap,
}

/// Probes of `B₁` for checks involving `maps`.
fn morphism_probes(src: &BornSystem, extra: u32) -> Vec<ObjElem> {
    src.bobj.probes(src.check_level() + extra)
}

fn morphism_failure(m: &SystemMorphism) -> Option<String> {
    let (s, d) = (&m.src, &m.dst);
    if m.ground_map.src() != s.ground() || m.ground_map.dst() != d.ground() {
        return Some("ground map does not fit".into());
    }
    if m.theory_map.src() != s.basis() || m.theory_map.dst() != d.basis() {
        return Some("theory basis map does not fit".into());
    }
    let extra = m.object_map.regime() + d.kappa.regime() + map_hint(&m.theory_map);
    let probes = morphism_probes(s, extra);
    let t = ImageOperator::new(&m.ground_map, &m.theory_map);
    let phi = |b: &ObjElem| m.object_map.apply(b);
    for b in &probes {
        let target = phi(b);
        if !d.bobj.contains(&target) {
            return Some(format!(
                "φ({}) = {target:?} is not in {}",
                s.bobj.render(b),
                d.bobj.name()
            ));
        }
        let lhs = t.apply(&s.kappa_at(b));
        let rhs = d.kappa_at(&target);
        if lhs != rhs {
            return Some(format!(
                "square fails at b={}: T(f)(κ₁(b)) = {} but κ₂(φ(b)) = {}",
                s.bobj.render(b),
                d.carrier().render(&lhs),
                d.carrier().render(&rhs)
            ));
        }
    }
    if phi(&s.bobj.bot()) != d.bobj.bot() {
        return Some("φ does not preserve ⊥".into());
    }
    let pairs = if s.bobj.is_finite() { probes } else { s.bobj.probes(4) };
    for a in &pairs {
        for b in &pairs {
            if phi(&s.bobj.join(a, b)) != d.bobj.join(&phi(a), &phi(b)) {
                return Some(format!(
                    "φ does not preserve the join of {} and {}",
                    s.bobj.render(a),
                    s.bobj.render(b)
                ));
            }
        }
    }
    None
}

/// Checks the morphism square elementwise on `B₁` (past every ramp's regime
/// when `B₁` is infinite), that `φ` lands in `B₂`, and that it preserves `⊥`
/// and binary joins.
pub fn is_system_morphism(m: &SystemMorphism) -> Verdict {
    match morphism_failure(m) {
        Some(w) => Verdict::Fails(w),
        None => Verdict::Holds(String::new()),
    }
}

impl SystemMorphism {
    pub fn new(
        src: &BornSystem,
        dst: &BornSystem,
        ground_map: &GroundMap,
        object_map: ObjectMap,
        theory_map: &BasisMap,
    ) -> Result<Self, SystemError> {
        let m = SystemMorphism {
            src: src.clone(),
            dst: dst.clone(),
            ground_map: ground_map.clone(),
            object_map,
            theory_map: theory_map.clone(),
        };
        match morphism_failure(&m) {
            Some(w) => Err(SystemError::NotAMorphism(w)),
            None => Ok(m),
        }
    }

    /// Builds without checking; for exhibiting failures.
    pub fn unchecked(
        src: &BornSystem,
        dst: &BornSystem,
        ground_map: &GroundMap,
        object_map: ObjectMap,
        theory_map: &BasisMap,
    ) -> Self {
        SystemMorphism {
            src: src.clone(),
            dst: dst.clone(),
            ground_map: ground_map.clone(),
            object_map,
            theory_map: theory_map.clone(),
        }
    }

    pub fn identity(sys: &BornSystem) -> Self {
        SystemMorphism {
            src: sys.clone(),
            dst: sys.clone(),
            ground_map: GroundMap::identity(sys.ground()),
            object_map: ObjectMap::Identity,
            theory_map: BasisMap::identity(sys.basis()),
        }
    }

    pub fn src(&self) -> &BornSystem {
        &self.src
    }

    pub fn dst(&self) -> &BornSystem {
        &self.dst
    }

    pub fn ground_map(&self) -> &GroundMap {
        &self.ground_map
    }

    pub fn object_map(&self) -> &ObjectMap {
        &self.object_map
    }

    pub fn theory_map(&self) -> &BasisMap {
        &self.theory_map
    }

    /// `next ∘ self`, re-verified.
    pub fn then(&self, next: &SystemMorphism) -> Result<SystemMorphism, SystemError> {
        let g = self.ground_map.then(&next.ground_map).map_err(SystemError::Mismatch)?;
        let psi = self
            .theory_map
            .then(&next.theory_map)
            .map_err(|e| SystemError::Mismatch(e.to_string()))?;
        SystemMorphism::new(&self.src, &next.dst, &g, self.object_map.then(&next.object_map), &psi)
    }
}

/// `E(X, τ) = (X, e_τ, τ)`.
pub fn embed_space(sp: &BornSpace) -> BornSystem {
    BornSystem {
        ground: sp.ground().clone(),
        basis: sp.basis().clone(),
        bobj: BasisObject::Bornology(sp.bornology().clone()),
        kappa: ObjectMap::Identity,
    }
}

/// `E(f, ψ) = (f, T(f, ψ) restricted to τ₁, ψ)`.
pub fn embed_morphism(m: &SpaceMorphism) -> Result<SystemMorphism, SystemError> {
    SystemMorphism::new(
        &embed_space(m.src()),
        &embed_space(m.dst()),
        m.ground_map(),
        ObjectMap::Image(ImageOperator::new(m.ground_map(), m.basis_map())),
        m.basis_map(),
    )
}

/// A presentation of a space by its cofinal chain over the naturals:
/// `κ(0) = ⊥` and `κ(n) = γₙ` for `n ≥ 1`.
pub fn chain_presentation(sp: &BornSpace) -> Result<BornSystem, SystemError> {
    let (region, ceiling) = sp.bornology().as_ramp();
    let w = CompleteLattice::omega();
    let l = sp.basis();
    let ramps = (0..sp.ground().len())
        .map(|x| {
            let c = ceiling.at(x);
            let tail = if region.contains(&x) {
                Tail::Shift {
                    offset: 0,
                    cap: Elem::OMEGA,
                }
            } else {
                Tail::Const(c)
            };
            BasisMap::ramp(
                &w,
                l,
                crate::basis_map::CapRamp {
                    exceptions: [(0, l.bot())].into(),
                    tail,
                    at_omega: None,
                },
            )
            .map_err(|e| SystemError::NotRepresentable(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ramp_system(sp.ground(), l, ramps)
}

/// `Spat(X, κ, B) = (X, ⟨κ(B)⟩)` with the ideal generated under finite
/// joins. A finite `B` gives the principal ideal of the join of the image;
/// an infinite `B` gives the ramp whose ceiling is the limit of `κ` along a
/// cofinal chain, with region the coordinates where that limit is `ω` and
/// never reached.
pub fn spatialize(sys: &BornSystem) -> Result<BornSpace, SystemError> {
    let carrier = sys.carrier();
    let ideal = match sys.bobj.elements() {
        Some(els) => {
            let images = els.iter().map(|b| sys.kappa_at(b));
            generate_ideal(&GeneratorSet::new(&carrier, images), Mode::LatBot)
        }
        None => {
            let (limit, attained) = eventual_limit(&sys.bobj, &sys.kappa, &carrier, sys.check_level());
            let region: BTreeSet<usize> = attained
                .iter()
                .enumerate()
                .filter(|(_, a)| !**a)
                .map(|(i, _)| i)
                .collect();
            if carrier.omega_based() {
                Ideal::ramp(&carrier, region, limit).map_err(|e| SystemError::NotRepresentable(e.to_string()))?
            } else {
                Ideal::principal(&carrier, &limit)
            }
        }
    };
    Ok(BornSpace::new(ideal)?)
}

/// `Spat(f, φ, ψ) = (f, ψ)`, re-verified as bounded.
pub fn spatialize_morphism(m: &SystemMorphism) -> Result<SpaceMorphism, SystemError> {
    Ok(SpaceMorphism::new(
        &spatialize(&m.src)?,
        &spatialize(&m.dst)?,
        &m.ground_map,
        &m.theory_map,
    )?)
}

/// `(1_X, κ̄): (X, κ, B) → E Spat(X, κ, B)` with `κ̄` the corestriction of
/// `κ` to the generated bornology.
pub fn reflection_arrow(sys: &BornSystem) -> Result<SystemMorphism, SystemError> {
    let target = embed_space(&spatialize(sys)?);
    SystemMorphism::new(
        sys,
        &target,
        &GroundMap::identity(sys.ground()),
        sys.kappa.clone(),
        &BasisMap::identity(sys.basis()),
    )
}

/// First probe of `src` where the two maps differ.
pub fn maps_differ(src: &BasisObject, a: &ObjectMap, b: &ObjectMap, level: u32) -> Option<ObjElem> {
    src.probes(level).into_iter().find(|x| a.apply(x) != b.apply(x))
}

/// Ground maps `g` making `(g, ψ)` bounded out of `Spat(sys)` with
/// `E(g, ψ) ∘ r = m`.
pub fn factorizations(sys: &BornSystem, target: &BornSpace, m: &SystemMorphism) -> Result<Vec<GroundMap>, SystemError> {
    let spat = spatialize(sys)?;
    let level = sys.check_level() + m.object_map.regime() + map_hint(&m.theory_map);
    let mut out = Vec::new();
    for g in GroundMap::all(sys.ground(), target.ground()) {
        if !is_bounded(&g, &m.theory_map, &spat, target)?.holds() {
            continue;
        }
        // E(g, ψ) ∘ r has ground component g, object map T(g, ψ) ∘ κ and theory map ψ
        let composite = sys.kappa.then(&ObjectMap::Image(ImageOperator::new(&g, &m.theory_map)));
        if g == m.ground_map && maps_differ(&sys.bobj, &composite, &m.object_map, level).is_none() {
            out.push(g);
        }
    }
    Ok(out)
}

/// Largest ground sets searched for uniqueness.
pub const UNIQUENESS_BOUND: usize = 4;

/// The universal property of the reflection arrow at `m: sys → E(target)`:
/// `m`'s ground map is bounded out of `Spat(sys)`, factors `m` through the
/// reflection arrow, and is the only ground map that does.
pub fn verify_universal_property(sys: &BornSystem, target: &BornSpace, m: &SystemMorphism) -> Verdict {
    if let Some(w) = morphism_failure(m) {
        return Verdict::Fails(format!("m is not a morphism: {w}"));
    }
    if m.dst != embed_space(target) || &m.src != sys {
        return Verdict::Fails("m does not run from the system into the embedded target".into());
    }
    if sys.ground().len() > UNIQUENESS_BOUND || target.ground().len() > UNIQUENESS_BOUND {
        return Verdict::Fails(format!("ground sets exceed the search bound {UNIQUENESS_BOUND}"));
    }
    let r = match reflection_arrow(sys) {
        Ok(r) => r,
        Err(e) => return Verdict::Fails(format!("no reflection arrow: {e}")),
    };
    let spat = match spatialize(sys) {
        Ok(s) => s,
        Err(e) => return Verdict::Fails(e.to_string()),
    };
    let f = &m.ground_map;
    let ef = match SpaceMorphism::new(&spat, target, f, &m.theory_map).map(|sm| embed_morphism(&sm)) {
        Ok(Ok(ef)) => ef,
        Ok(Err(e)) => return Verdict::Fails(format!("E(f) is not a morphism: {e}")),
        Err(e) => return Verdict::Fails(format!("f is not bounded out of Spat: {e}")),
    };
    let level = sys.check_level() + m.object_map.regime() + map_hint(&m.theory_map);
    let composite = r.object_map.then(&ef.object_map);
    if let Some(b) = maps_differ(&sys.bobj, &composite, &m.object_map, level) {
        return Verdict::Fails(format!("E(f) ∘ r differs from m at {}", sys.bobj.render(&b)));
    }
    match factorizations(sys, target, m) {
        Ok(gs) if gs.len() == 1 && &gs[0] == f => Verdict::Holds(format!(
            "unique among {} ground maps",
            target.ground().len().pow(sys.ground().len() as u32)
        )),
        Ok(gs) => Verdict::Fails(format!(
            "{} factoring ground maps: {}",
            gs.len(),
            gs.iter().map(|g| format!("{g:?}")).join("; ")
        )),
        Err(e) => Verdict::Fails(e.to_string()),
    }
}

/// Every `(f, φ, ψ): sys → E(target)` with `ψ` fixed: all `φ` tables for a
/// finite `B`, otherwise `φ = T(f, ψ) ∘ κ` for each bounded `f`.
pub fn morphisms_into_embedding(sys: &BornSystem, target: &BornSpace, psi: &BasisMap) -> Vec<SystemMorphism> {
    let dst = embed_space(target);
    let mut out = Vec::new();
    for f in GroundMap::all(sys.ground(), target.ground()) {
        if sys.bobj.is_finite() && dst.bobj.is_finite() {
            for phi in commuting_object_maps(sys, &dst, &f, psi) {
                if let Ok(m) = SystemMorphism::new(sys, &dst, &f, phi, psi) {
                    out.push(m);
                }
            }
        } else {
            let phi = sys.kappa.then(&ObjectMap::Image(ImageOperator::new(&f, psi)));
            if let Ok(m) = SystemMorphism::new(sys, &dst, &f, phi, psi) {
                out.push(m);
            }
        }
    }
    out
}

/// Every table `φ: B₁ → B₂` between finite objects with
/// `T(f, ψ) ∘ κ₁ = κ₂ ∘ φ` that preserves `⊥` and binary joins, by
/// backtracking over the elements of `B₁`.
pub fn commuting_object_maps(s1: &BornSystem, s2: &BornSystem, f: &GroundMap, psi: &BasisMap) -> Vec<ObjectMap> {
    let (Some(e1), Some(e2)) = (s1.bobj.elements(), s2.bobj.elements()) else {
        return Vec::new();
    };
    let t = ImageOperator::new(f, psi);
    let choices: Vec<Vec<ObjElem>> = e1
        .iter()
        .map(|b| {
            let want = t.apply(&s1.kappa_at(b));
            e2.iter().filter(|c| s2.kappa_at(c) == want).cloned().collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(e1.len());
    fn search(
        i: usize,
        e1: &[ObjElem],
        choices: &[Vec<ObjElem>],
        current: &mut Vec<ObjElem>,
        s1: &BasisObject,
        s2: &BasisObject,
        out: &mut Vec<ObjectMap>,
    ) {
        if i == e1.len() {
            let table = ObjectMap::Table(e1.iter().cloned().zip(current.iter().cloned()).collect());
            let ok = table.apply(&s1.bot()) == s2.bot()
                && e1.iter().all(|a| {
                    e1.iter()
                        .all(|b| table.apply(&s1.join(a, b)) == s2.join(&table.apply(a), &table.apply(b)))
                });
            if ok {
                out.push(table);
            }
            return;
        }
        for c in &choices[i] {
            current.push(c.clone());
            search(i + 1, e1, choices, current, s1, s2, out);
            current.pop();
        }
    }
    search(0, &e1, &choices, &mut current, &s1.bobj, &s2.bobj, &mut out);
    out
}

/// `Loc(X, κ, B) = B`.
pub fn loc(sys: &BornSystem) -> &BasisObject {
    &sys.bobj
}

/// `Loc(f, φ, ψ) = φ`.
pub fn loc_morphism(m: &SystemMorphism) -> &ObjectMap {
    &m.object_map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis_map::CapRamp;
    use std::collections::BTreeMap;

    fn two() -> CompleteLattice {
        CompleteLattice::chain("2", &["0", "1"])
    }

    fn c3() -> CompleteLattice {
        CompleteLattice::chain("C3", &["0", "m", "1"])
    }

    fn identity_ramp() -> BasisMap {
        BasisMap::identity(&CompleteLattice::omega())
    }

    fn two_system(l: &CompleteLattice, x: &GroundSet, top: LFunction) -> Result<BornSystem, SystemError> {
        let b = two();
        let carrier = function_lattice(l, x);
        validate_system(
            x,
            ObjectMap::Table(vec![
                (ObjElem::Basis(b.bot()), ObjElem::Function(carrier.bot())),
                (ObjElem::Basis(b.top()), ObjElem::Function(top)),
            ]),
            BasisObject::Algebra(b),
            l,
        )
    }

    #[test]
    fn minimal_two_system() {
        let x = GroundSet::new("X", &["x", "y"]);
        let carrier = function_lattice(&c3(), &x);
        let sys = two_system(&c3(), &x, carrier.top()).unwrap();
        let sp = spatialize(&sys).unwrap();
        assert_eq!(sp.bornology(), &Ideal::full(&carrier));
        let r = reflection_arrow(&sys).unwrap();
        assert!(is_system_morphism(&r).holds());
    }

    #[test]
    fn non_top_image_has_no_coverage() {
        let x = GroundSet::new("X", &["x", "y"]);
        let alpha = function_lattice(&c3(), &x).function(&["1", "m"]).unwrap();
        assert!(matches!(two_system(&c3(), &x, alpha), Err(SystemError::NoCoverage(_))));
    }

    #[test]
    fn identity_ramp_system() {
        let w = CompleteLattice::omega();
        let x = GroundSet::new("X", &["x"]);
        let sys = ramp_system(&x, &w, vec![identity_ramp()]).unwrap();
        let sp = spatialize(&sys).unwrap();
        assert_eq!(sp, BornSpace::all_finite(&x, &w).unwrap());
        let r = reflection_arrow(&sys).unwrap();
        assert!(is_system_morphism(&r).holds());
        assert!(verify_universal_property(&sys, &sp, &r).holds());
    }

    #[test]
    fn ramp_system_with_attained_omega() {
        let w = CompleteLattice::omega();
        let x = GroundSet::new("X", &["x", "y"]);
        let jump = BasisMap::ramp(
            &w,
            &w,
            CapRamp {
                exceptions: BTreeMap::from([(0, Elem::nat(0)), (1, Elem::nat(1))]),
                tail: Tail::Const(Elem::OMEGA),
                at_omega: None,
            },
        )
        .unwrap();
        let sys = ramp_system(&x, &w, vec![identity_ramp(), jump]).unwrap();
        let sp = spatialize(&sys).unwrap();
        assert_eq!(sp.bornology().as_ramp().0, BTreeSet::from([0]));
    }

    #[test]
    fn constant_bottom_object_map_fails_at_top() {
        let x = GroundSet::new("X", &["x"]);
        let carrier = function_lattice(&two(), &x);
        let sys = two_system(&two(), &x, carrier.top()).unwrap();
        let b = two();
        let bottom = ObjectMap::Basis(BasisMap::from_names(&b, &b, &[]));
        let m = SystemMorphism::unchecked(
            &sys,
            &sys,
            &GroundMap::identity(&x),
            bottom,
            &BasisMap::identity(&two()),
        );
        let v = is_system_morphism(&m);
        assert!(!v.holds());
        assert!(v.detail().contains("b=1"), "{}", v.detail());
    }

    #[test]
    fn embedded_space_reflects_to_identity() {
        let w = CompleteLattice::omega();
        let x = GroundSet::new("X", &["x", "y"]);
        let sp = BornSpace::all_finite(&x, &w).unwrap();
        let e = embed_space(&sp);
        assert_eq!(spatialize(&e).unwrap(), sp);
        let r = reflection_arrow(&e).unwrap();
        assert_eq!(r.object_map(), &ObjectMap::Identity);
        assert_eq!(r, SystemMorphism::identity(&e));
    }

    #[test]
    fn chain_presentation_round_trip() {
        let w = CompleteLattice::omega();
        let x = GroundSet::new("X", &["x", "y"]);
        let carrier = function_lattice(&w, &x);
        let sp = BornSpace::new(Ideal::ramp(&carrier, [0].into(), carrier.top()).unwrap()).unwrap();
        let sys = chain_presentation(&sp).unwrap();
        assert_eq!(spatialize(&sys).unwrap(), sp);
    }

    #[test]
    fn loc_projects() {
        let x = GroundSet::new("X", &["x"]);
        let sys = ramp_system(&x, &CompleteLattice::omega(), vec![identity_ramp()]).unwrap();
        assert_eq!(loc(&sys), &BasisObject::Naturals);
        assert_eq!(loc_morphism(&SystemMorphism::identity(&sys)), &ObjectMap::Identity);
    }
}
