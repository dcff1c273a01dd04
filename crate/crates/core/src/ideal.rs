//! Lattice ideals: non-empty subsets closed under finite joins and under
//! meets with arbitrary elements.
//!
//! Ideals of finite carriers are stored by their members. Ideals of carriers
//! built on the ω-chain are ramp downsets
//!
//! ```text
//! { α | α ≤ ceiling, and α(x) < ω for every x in region }
//! ```
//!
//! which covers every principal ideal (empty region) as well as the
//! non-principal ones whose supremum is not attained.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use crate::basis_map::{BasisMap, Bound, Locus, MapRule};
use crate::lattice::{CompleteLattice, Elem, Lattice};
use crate::powerset::{FunctionLattice, ImageOperator};
use crate::verdict::Verdict;

/// Largest finite carrier whose ideals are found by subset filtering.
pub const ENUMERATION_LIMIT: usize = 8;

/// Hard ceiling for [`enumerate_ideals_within`].
pub const ENUMERATION_HARD_LIMIT: usize = 20;

/// Truncation level used when a check needs one and none is given.
pub const DEFAULT_LEVEL: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("not an ideal: {0}")]
    NotAnIdeal(String),
    #[error("not an ideal-category morphism: {0}")]
    NotIdealMorphism(String),
    #[error("carrier has {0} elements, too many to enumerate")]
    TooLarge(usize),
    #[error("ramp ideals need a carrier built on the ω-chain")]
    NotOmegaBased,
}

/// How generated ideals are closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Finite joins and meets with carrier elements.
    LatBot,
    /// Additionally arbitrary joins.
    CLat,
}

/// The lattice terms that matter for ideals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermTag {
    Bot,
    /// `x ∧ y` with `y` the ideal argument.
    BinMeet,
    FiniteJoin,
    ArbJoin,
    ArbMeet,
}

impl TermTag {
    pub const ALL: [TermTag; 5] = [
        TermTag::Bot,
        TermTag::BinMeet,
        TermTag::FiniteJoin,
        TermTag::ArbJoin,
        TermTag::ArbMeet,
    ];

    /// True when the term yields `⊥` whenever its ideal arguments are `⊥`,
    /// including the case of no ideal arguments at all.
    pub fn is_ideal_term(self) -> bool {
        !matches!(self, TermTag::ArbMeet)
    }

    /// Evaluates the term. `BinMeet` reads `args[0] ∧ args[1]`; the others
    /// fold over all arguments.
    pub fn evaluate<L: Lattice>(self, l: &L, args: &[L::Elem]) -> L::Elem {
        match self {
            TermTag::Bot => l.bot(),
            TermTag::BinMeet => l.meet(&args[0], &args[1]),
            TermTag::FiniteJoin | TermTag::ArbJoin => l.join_all(args),
            TermTag::ArbMeet => l.meet_all(args),
        }
    }
}

/// Ideal storage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IdealRepr<E> {
    Extensional(BTreeSet<E>),
    Ramp { region: BTreeSet<usize>, ceiling: E },
}

/// A validated ideal together with its carrier.
#[derive(Debug, Clone)]
pub struct Ideal<L: Lattice> {
    carrier: L,
    repr: IdealRepr<L::Elem>,
}

impl<L: Lattice + PartialEq> PartialEq for Ideal<L> {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier && self.repr == other.repr
    }
}

impl<L: Lattice + Eq> Eq for Ideal<L> {}

/// A finite set of generators.
#[derive(Debug, Clone)]
pub struct GeneratorSet<L: Lattice> {
    carrier: L,
    gens: BTreeSet<L::Elem>,
}

impl<L: Lattice> GeneratorSet<L> {
    pub fn new<I: IntoIterator<Item = L::Elem>>(carrier: &L, gens: I) -> Self {
        GeneratorSet {
            carrier: carrier.clone(),
            gens: gens.into_iter().collect(),
        }
    }

    pub fn carrier(&self) -> &L {
        &self.carrier
    }

    pub fn gens(&self) -> &BTreeSet<L::Elem> {
        &self.gens
    }

    pub fn sup(&self) -> L::Elem {
        self.carrier.join_all(&self.gens)
    }
}

fn is_member_of_carrier<L: Lattice>(l: &L, a: &L::Elem) -> bool {
    match l.elements() {
        Some(els) => els.contains(a),
        None => l.coordinates(a).len() == l.dimension(),
    }
}

/// Every element below `m`, when there are finitely many.
fn finite_down_set<L: Lattice>(l: &L, m: &L::Elem) -> Option<Vec<L::Elem>> {
    match l.elements() {
        Some(els) => Some(els.into_iter().filter(|x| l.leq(x, m)).collect()),
        None => {
            let coords = l.coordinates(m);
            if coords.iter().any(|c| c.is_omega()) {
                return None;
            }
            if coords.is_empty() {
                return Some(vec![l.of_coordinates(Vec::new())]);
            }
            Some(
                coords
                    .iter()
                    .map(|c| (0..=c.raw()).map(Elem::nat))
                    .multi_cartesian_product()
                    .map(|cs| l.of_coordinates(cs))
                    .collect(),
            )
        }
    }
}

fn ramp_contains<L: Lattice>(l: &L, region: &BTreeSet<usize>, ceiling: &L::Elem, a: &L::Elem) -> bool {
    l.leq(a, ceiling) && {
        let coords = l.coordinates(a);
        region.iter().all(|&i| !coords[i].is_omega())
    }
}

/// First violation of the ideal axioms, if any.
///
/// Extensional candidates are checked exhaustively. Ramp candidates are
/// ideals by construction once well formed; the structural check is backed
/// by a truncation oracle on the members up to a level past the ceiling.
pub fn ideal_failure<L: Lattice>(carrier: &L, candidate: &IdealRepr<L::Elem>) -> Option<String> {
    match candidate {
        IdealRepr::Extensional(members) => {
            if members.is_empty() {
                return Some("empty set".into());
            }
            if let Some(a) = members.iter().find(|a| !is_member_of_carrier(carrier, a)) {
                return Some(format!("{a:?} is not an element of the carrier"));
            }
            for a in members {
                for b in members {
                    let j = carrier.join(a, b);
                    if !members.contains(&j) {
                        return Some(format!(
                            "{} ∨ {} = {} is missing",
                            carrier.render(a),
                            carrier.render(b),
                            carrier.render(&j)
                        ));
                    }
                }
            }
            for m in members {
                let Some(below) = finite_down_set(carrier, m) else {
                    return Some(format!("{} has infinitely many elements below it", carrier.render(m)));
                };
                if let Some(x) = below.iter().find(|x| !members.contains(x)) {
                    return Some(format!("{} ≤ {} is missing", carrier.render(x), carrier.render(m)));
                }
            }
            None
        }
        IdealRepr::Ramp { region, ceiling } => {
            if !carrier.omega_based() {
                return Some("ramp downset over a finite carrier".into());
            }
            if carrier.coordinates(ceiling).len() != carrier.dimension() {
                return Some("ceiling has the wrong number of coordinates".into());
            }
            if let Some(i) = region.iter().find(|&&i| i >= carrier.dimension()) {
                return Some(format!("region coordinate {i} out of range"));
            }
            let level = carrier
                .coordinates(ceiling)
                .iter()
                .filter_map(|c| c.finite())
                .max()
                .unwrap_or(0)
                .min(4)
                + 1;
            truncation_failure(carrier, |a| ramp_contains(carrier, region, ceiling, a), level)
        }
    }
}

/// Closure failures of `member` on the truncated carrier at `level`.
fn truncation_failure<L, F>(carrier: &L, member: F, level: u32) -> Option<String>
where
    L: Lattice,
    F: Fn(&L::Elem) -> bool,
{
    let grid = carrier.truncated_elements(level);
    let inside: Vec<_> = grid.iter().filter(|a| member(a)).collect();
    if !member(&carrier.bot()) {
        return Some("⊥ is missing".into());
    }
    for a in &inside {
        for b in &inside {
            if !member(&carrier.join(a, b)) {
                return Some(format!("{} ∨ {} is missing", carrier.render(a), carrier.render(b)));
            }
        }
        for x in &grid {
            if !member(&carrier.meet(a, x)) {
                return Some(format!("{} ∧ {} is missing", carrier.render(a), carrier.render(x)));
            }
        }
    }
    None
}

/// Decides the ideal axioms for a candidate subset.
pub fn is_ideal<L: Lattice>(carrier: &L, candidate: &IdealRepr<L::Elem>) -> bool {
    ideal_failure(carrier, candidate).is_none()
}

impl<L: Lattice> Ideal<L> {
    /// Validates an extensional candidate. Over ω-based carriers the result
    /// is stored as the principal ramp of its supremum.
    pub fn from_members<I>(carrier: &L, members: I) -> Result<Self, IdealError>
    where
        I: IntoIterator<Item = L::Elem>,
    {
        let repr = IdealRepr::Extensional(members.into_iter().collect());
        if let Some(why) = ideal_failure(carrier, &repr) {
            return Err(IdealError::NotAnIdeal(why));
        }
        let IdealRepr::Extensional(set) = repr else {
            unreachable!()
        };
        if carrier.omega_based() {
            let sup = carrier.join_all(&set);
            return Ideal::ramp(carrier, BTreeSet::new(), sup);
        }
        Ok(Ideal {
            carrier: carrier.clone(),
            repr: IdealRepr::Extensional(set),
        })
    }

    /// The ramp downset with the given region and ceiling, normalized so that
    /// the region only lists coordinates where the ceiling is `ω`.
    pub fn ramp(carrier: &L, region: BTreeSet<usize>, ceiling: L::Elem) -> Result<Self, IdealError> {
        if !carrier.omega_based() {
            return Err(IdealError::NotOmegaBased);
        }
        let coords = carrier.coordinates(&ceiling);
        if coords.len() != carrier.dimension() {
            return Err(IdealError::NotAnIdeal("ceiling has the wrong shape".into()));
        }
        if let Some(i) = region.iter().find(|&&i| i >= coords.len()) {
            return Err(IdealError::NotAnIdeal(format!("region coordinate {i} out of range")));
        }
        let region = region.into_iter().filter(|&i| coords[i].is_omega()).collect();
        Ok(Ideal {
            carrier: carrier.clone(),
            repr: IdealRepr::Ramp { region, ceiling },
        })
    }

    /// `↓a`.
    pub fn principal(carrier: &L, a: &L::Elem) -> Self {
        if carrier.omega_based() {
            return Ideal::ramp(carrier, BTreeSet::new(), a.clone()).expect("well-formed ceiling");
        }
        let members = carrier
            .elements()
            .expect("finite carrier")
            .into_iter()
            .filter(|x| carrier.leq(x, a))
            .collect();
        Ideal {
            carrier: carrier.clone(),
            repr: IdealRepr::Extensional(members),
        }
    }

    /// The whole carrier.
    pub fn full(carrier: &L) -> Self {
        Ideal::principal(carrier, &carrier.top())
    }

    /// `{⊥}`.
    pub fn bottom(carrier: &L) -> Self {
        Ideal::principal(carrier, &carrier.bot())
    }

    /// Every element with only finite coordinates.
    pub fn all_finite(carrier: &L) -> Result<Self, IdealError> {
        Ideal::ramp(carrier, (0..carrier.dimension()).collect(), carrier.top())
    }

    pub fn carrier(&self) -> &L {
        &self.carrier
    }

    pub fn repr(&self) -> &IdealRepr<L::Elem> {
        &self.repr
    }

    pub fn members(&self) -> Option<&BTreeSet<L::Elem>> {
        match &self.repr {
            IdealRepr::Extensional(m) => Some(m),
            IdealRepr::Ramp { .. } => None,
        }
    }

    pub fn contains(&self, a: &L::Elem) -> bool {
        match &self.repr {
            IdealRepr::Extensional(m) => m.contains(a),
            IdealRepr::Ramp { region, ceiling } => ramp_contains(&self.carrier, region, ceiling, a),
        }
    }

    /// The supremum of all members: the ceiling of a ramp.
    pub fn sup(&self) -> L::Elem {
        match &self.repr {
            IdealRepr::Extensional(m) => self.carrier.join_all(m),
            IdealRepr::Ramp { ceiling, .. } => ceiling.clone(),
        }
    }

    /// Region and ceiling, reading a finite ideal as `↓sup`.
    pub fn as_ramp(&self) -> (BTreeSet<usize>, L::Elem) {
        match &self.repr {
            IdealRepr::Extensional(_) => (BTreeSet::new(), self.sup()),
            IdealRepr::Ramp { region, ceiling } => (region.clone(), ceiling.clone()),
        }
    }

    /// True when the ideal is `↓a` for some member `a`.
    pub fn is_principal(&self) -> bool {
        match &self.repr {
            IdealRepr::Extensional(_) => true,
            IdealRepr::Ramp { region, .. } => region.is_empty(),
        }
    }

    /// `⊤` in the ideal generated under `mode`. With arbitrary joins this is
    /// `sup = ⊤`; with finite joins only, `⊤` itself must be a member.
    pub fn contains_top(&self, mode: Mode) -> bool {
        match mode {
            Mode::CLat => self.sup() == self.carrier.top(),
            Mode::LatBot => self.contains(&self.carrier.top()),
        }
    }

    pub fn is_subset(&self, other: &Ideal<L>) -> bool {
        match (&self.repr, &other.repr) {
            (IdealRepr::Extensional(m), _) => m.iter().all(|a| other.contains(a)),
            (
                IdealRepr::Ramp {
                    region: r1,
                    ceiling: c1,
                },
                IdealRepr::Ramp { region: r2, .. },
            ) => {
                let coords = self.carrier.coordinates(c1);
                self.carrier.leq(c1, &other.sup()) && r2.iter().all(|i| r1.contains(i) || !coords[*i].is_omega())
            }
            (IdealRepr::Ramp { .. }, IdealRepr::Extensional(_)) => false,
        }
    }

    /// `I ∩ J`; for ramps, union of regions and meet of ceilings.
    pub fn intersect(&self, other: &Ideal<L>) -> Ideal<L> {
        match (&self.repr, &other.repr) {
            (IdealRepr::Extensional(m), _) | (_, IdealRepr::Extensional(m)) => {
                let (a, b) = (self, other);
                Ideal {
                    carrier: self.carrier.clone(),
                    repr: IdealRepr::Extensional(
                        m.iter().filter(|x| a.contains(x) && b.contains(x)).cloned().collect(),
                    ),
                }
            }
            (
                IdealRepr::Ramp {
                    region: r1,
                    ceiling: c1,
                },
                IdealRepr::Ramp {
                    region: r2,
                    ceiling: c2,
                },
            ) => Ideal::ramp(
                &self.carrier,
                r1.union(r2).copied().collect(),
                self.carrier.meet(c1, c2),
            )
            .expect("meet of ceilings is well formed"),
        }
    }

    /// The ideal generated by `I ∪ J`; for ramps, the region keeps the
    /// coordinates forced finite in both and the ceiling is the join.
    pub fn join(&self, other: &Ideal<L>) -> Ideal<L> {
        match (&self.repr, &other.repr) {
            (
                IdealRepr::Ramp {
                    region: r1,
                    ceiling: c1,
                },
                IdealRepr::Ramp {
                    region: r2,
                    ceiling: c2,
                },
            ) => {
                let (k1, k2) = (self.carrier.coordinates(c1), self.carrier.coordinates(c2));
                let forced = |r: &BTreeSet<usize>, k: &[Elem], i: usize| r.contains(&i) || !k[i].is_omega();
                let region = (0..k1.len())
                    .filter(|&i| forced(r1, &k1, i) && forced(r2, &k2, i))
                    .collect();
                Ideal::ramp(&self.carrier, region, self.carrier.join(c1, c2)).expect("join of ceilings is well formed")
            }
            _ => {
                let gens = self.members().into_iter().chain(other.members()).flatten().cloned();
                generate_ideal(&GeneratorSet::new(&self.carrier, gens), Mode::LatBot)
            }
        }
    }

    /// Members with coordinates in `{0, …, level, ω}`; equals the member set
    /// of an ideal over a finite carrier.
    pub fn members_within(&self, level: u32) -> Vec<L::Elem> {
        match &self.repr {
            IdealRepr::Extensional(m) => m.iter().cloned().collect(),
            IdealRepr::Ramp { .. } => self
                .carrier
                .truncated_elements(level)
                .into_iter()
                .filter(|a| self.contains(a))
                .collect(),
        }
    }

    /// Literal form: `ideal extensional …` or `ideal ramp region={…} ceiling=…`.
    pub fn render(&self) -> String {
        match &self.repr {
            IdealRepr::Extensional(m) => {
                let body = m.iter().map(|a| self.carrier.render(a)).join(" ");
                if body.is_empty() {
                    "ideal extensional".into()
                } else {
                    format!("ideal extensional {body}")
                }
            }
            IdealRepr::Ramp { region, ceiling } => format!(
                "ideal ramp region={{{}}} ceiling={}",
                region.iter().map(|&i| self.carrier.coordinate_label(i)).join(","),
                self.carrier.render(ceiling)
            ),
        }
    }
}

/// The least ideal containing the generators.
///
/// Over finite carriers this is a fixpoint iteration of the two closure
/// rules. Over ω-based carriers finitely many generators have an attained
/// join, so both modes give the principal ideal `↓⋁gens`.
pub fn generate_ideal<L: Lattice>(g: &GeneratorSet<L>, _mode: Mode) -> Ideal<L> {
    let l = &g.carrier;
    let Some(els) = l.elements() else {
        return Ideal::principal(l, &g.sup());
    };
    let mut set: BTreeSet<L::Elem> = g.gens.iter().cloned().collect();
    set.insert(l.bot());
    loop {
        let mut next = set.clone();
        for a in &set {
            for b in &set {
                next.insert(l.join(a, b));
            }
            for x in &els {
                next.insert(l.meet(a, x));
            }
        }
        if next.len() == set.len() {
            break;
        }
        set = next;
    }
    Ideal {
        carrier: l.clone(),
        repr: IdealRepr::Extensional(set),
    }
}

/// `⊤ ∈ ⟨gens⟩`. Finitely many generators attain their join, so the mode
/// does not matter here.
pub fn generators_contain_top<L: Lattice>(g: &GeneratorSet<L>, _mode: Mode) -> bool {
    g.sup() == g.carrier.top()
}

/// A map between carriers that can pull ideals back.
pub trait IdealMap {
    type Src: Lattice;
    type Dst: Lattice;

    fn source(&self) -> &Self::Src;
    fn target(&self) -> &Self::Dst;
    fn image_of(&self, a: &<Self::Src as Lattice>::Elem) -> <Self::Dst as Lattice>::Elem;

    /// Source elements on which `⊥` and join preservation are decided.
    fn probe_elements(&self) -> Vec<<Self::Src as Lattice>::Elem>;

    /// The basis map and, for each source coordinate, the target coordinate
    /// it is sent to.
    fn coordinate_legs(&self) -> (&BasisMap, Vec<usize>);
}

impl IdealMap for BasisMap {
    type Src = CompleteLattice;
    type Dst = CompleteLattice;

    fn source(&self) -> &CompleteLattice {
        self.src()
    }

    fn target(&self) -> &CompleteLattice {
        self.dst()
    }

    fn image_of(&self, a: &Elem) -> Elem {
        self.apply(*a)
    }

    fn probe_elements(&self) -> Vec<Elem> {
        self.probe_points()
    }

    fn coordinate_legs(&self) -> (&BasisMap, Vec<usize>) {
        (self, vec![0])
    }
}

impl IdealMap for ImageOperator {
    type Src = FunctionLattice;
    type Dst = FunctionLattice;

    fn source(&self) -> &FunctionLattice {
        self.src()
    }

    fn target(&self) -> &FunctionLattice {
        self.dst()
    }

    fn image_of(&self, a: &crate::powerset::LFunction) -> crate::powerset::LFunction {
        self.apply(a)
    }

    fn probe_elements(&self) -> Vec<crate::powerset::LFunction> {
        let points = self.basis_map().probe_points();
        let n = self.ground_map().src().len();
        if n == 0 {
            return vec![self.src().bot()];
        }
        std::iter::repeat_n(points, n)
            .multi_cartesian_product()
            .map(crate::powerset::LFunction)
            .collect()
    }

    fn coordinate_legs(&self) -> (&BasisMap, Vec<usize>) {
        (self.basis_map(), self.ground_map().table().to_vec())
    }
}

/// First failure of `⊥` or binary-join preservation on the probe elements.
pub fn morphism_failure<M: IdealMap>(phi: &M) -> Option<String> {
    let (src, dst) = (phi.source(), phi.target());
    if phi.image_of(&src.bot()) != dst.bot() {
        return Some(format!("⊥ ↦ {} instead of ⊥", dst.render(&phi.image_of(&src.bot()))));
    }
    let probes = phi.probe_elements();
    for a in &probes {
        for b in &probes {
            let lhs = phi.image_of(&src.join(a, b));
            let rhs = dst.join(&phi.image_of(a), &phi.image_of(b));
            if lhs != rhs {
                return Some(format!("join of {} and {} not preserved", src.render(a), src.render(b)));
            }
        }
    }
    None
}

/// `{a | φ(a) ∈ J}`.
///
/// Finite sources are scanned. For ω-based sources each coordinate's
/// constraint is a sublevel set of the basis map: below the adjoint-like
/// bound from the ceiling, intersected with the finite locus when the target
/// coordinate lies in the region.
pub fn preimage_ideal<M: IdealMap>(phi: &M, j: &Ideal<M::Dst>) -> Result<Ideal<M::Src>, IdealError> {
    if let Some(why) = morphism_failure(phi) {
        return Err(IdealError::NotIdealMorphism(why));
    }
    let src = phi.source();
    if let Some(els) = src.elements() {
        let members = els.into_iter().filter(|a| j.contains(&phi.image_of(a)));
        return Ideal::from_members(src, members);
    }
    let (basis, legs) = phi.coordinate_legs();
    let (region, ceiling) = j.as_ramp();
    let ceiling = j.carrier().coordinates(&ceiling);
    let mut new_region = BTreeSet::new();
    let mut new_ceiling = Vec::with_capacity(legs.len());
    for (i, &y) in legs.iter().enumerate() {
        let mut locus = basis.sublevel(Bound::AtMost(ceiling[y]));
        if region.contains(&y) {
            locus = locus.intersect(basis.sublevel(Bound::Finite));
        }
        match locus {
            Locus::Empty => {
                return Err(IdealError::NotIdealMorphism("⊥ has no preimage".into()));
            }
            Locus::Below(k) => new_ceiling.push(k),
            Locus::Naturals => {
                new_region.insert(i);
                new_ceiling.push(Elem::OMEGA);
            }
        }
    }
    Ideal::ramp(src, new_region, src.of_coordinates(new_ceiling))
}

/// `⊥` and binary joins are preserved (monotonicity follows), and the
/// preimage of every catalog ideal of the target agrees with a direct scan.
pub fn is_catit_morphism<M: IdealMap>(phi: &M) -> bool {
    catit_failure(phi).is_none()
}

pub fn catit_failure<M: IdealMap>(phi: &M) -> Option<String> {
    if let Some(why) = morphism_failure(phi) {
        return Some(why);
    }
    let level = match phi.coordinate_legs().0.rule() {
        MapRule::Ramp(r) => (r.regime_start() + 2).min(5),
        MapRule::Table(_) => 2,
    };
    let src_grid = phi.source().truncated_elements(level);
    for j in ideal_catalog(phi.target(), 2) {
        let pre = match preimage_ideal(phi, &j) {
            Ok(p) => p,
            Err(e) => return Some(e.to_string()),
        };
        if let Some(a) = src_grid
            .iter()
            .find(|a| pre.contains(a) != j.contains(&phi.image_of(a)))
        {
            return Some(format!(
                "preimage of {} misclassifies {}",
                j.render(),
                phi.source().render(a)
            ));
        }
    }
    None
}

/// Every ideal of a finite carrier with at most [`ENUMERATION_LIMIT`]
/// elements, ordered by size and then members; the ramp catalog at level 3
/// for ω-based carriers.
pub fn enumerate_ideals<L: Lattice>(l: &L) -> Result<Vec<Ideal<L>>, IdealError> {
    if l.omega_based() {
        return Ok(ideal_catalog(l, 3));
    }
    enumerate_ideals_within(l, ENUMERATION_LIMIT)
}

/// Subset filtering over a finite carrier of at most `max` elements.
pub fn enumerate_ideals_within<L: Lattice>(l: &L, max: usize) -> Result<Vec<Ideal<L>>, IdealError> {
    let els = l.elements().ok_or(IdealError::TooLarge(usize::MAX))?;
    let n = els.len();
    if n > max.min(ENUMERATION_HARD_LIMIT) {
        return Err(IdealError::TooLarge(n));
    }
    let index = |a: &L::Elem| els.iter().position(|x| x == a).expect("closed under operations");
    let down: Vec<u32> = els
        .iter()
        .map(|m| {
            els.iter()
                .enumerate()
                .filter(|(_, x)| l.leq(x, m))
                .fold(0u32, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let join: Vec<Vec<usize>> = els
        .iter()
        .map(|a| els.iter().map(|b| index(&l.join(a, b))).collect())
        .collect();
    let bot = 1u32 << index(&l.bot());
    let mut found: Vec<u32> = (0..1u32 << n)
        .filter(|&mask| {
            mask & bot != 0
                && (0..n).filter(|i| mask >> i & 1 == 1).all(|i| {
                    down[i] & !mask == 0
                        && (0..n)
                            .filter(|j| mask >> j & 1 == 1)
                            .all(|j| mask >> join[i][j] & 1 == 1)
                })
        })
        .collect();
    found.sort_by_key(|&m| (m.count_ones(), (0..n).filter(|i| m >> i & 1 == 1).collect_vec()));
    Ok(found
        .into_iter()
        .map(|mask| Ideal {
            carrier: l.clone(),
            repr: IdealRepr::Extensional((0..n).filter(|i| mask >> i & 1 == 1).map(|i| els[i].clone()).collect()),
        })
        .collect())
}

/// A deterministic family of ideals used by checks that quantify over ideals.
///
/// Small finite carriers give every ideal. Larger finite carriers give the
/// principal downsets, which are all of their ideals. ω-based carriers give
/// every ramp whose ceiling has coordinates in `{0, …, level, ω}`, with every
/// admissible region.
pub fn ideal_catalog<L: Lattice>(l: &L, level: u32) -> Vec<Ideal<L>> {
    if let Some(els) = l.elements() {
        if els.len() <= ENUMERATION_LIMIT {
            return enumerate_ideals_within(l, ENUMERATION_LIMIT).expect("small carrier");
        }
        return els.iter().map(|a| Ideal::principal(l, a)).collect();
    }
    let mut out = Vec::new();
    for c in l.truncated_elements(level) {
        let unbounded: Vec<usize> = l
            .coordinates(&c)
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_omega())
            .map(|(i, _)| i)
            .collect();
        for region in unbounded.iter().copied().powerset() {
            out.push(Ideal::ramp(l, region.into_iter().collect(), c.clone()).expect("catalog ramp"));
        }
    }
    out
}

/// Budget for exhaustive choice-map enumeration in [`is_icd_at_top`].
const CHOICE_BUDGET: usize = 50_000;

/// Ideal complete distributivity at `⊤`, checked over the ideal catalog.
///
/// Since `⋀ᵢ ⋁Sᵢ = ⊤` forces every `⋁Sᵢ = ⊤`, only catalog ideals with
/// supremum `⊤` can occur in a family meeting the premise. For each such
/// family the conclusion is decided by enumerating choice maps when the
/// members are finite and few, and otherwise by the diagonal choices: any
/// member of `⋂Sᵢ` is a choice map's meet, so `sup ⋂Sᵢ = ⊤` certifies it.
pub fn is_icd_at_top<L: Lattice>(l: &L) -> Verdict {
    let catalog = match l.elements() {
        Some(els) if els.len() <= ENUMERATION_LIMIT => enumerate_ideals(l).expect("small"),
        _ => ideal_catalog(l, 2),
    };
    let tops: Vec<_> = catalog.into_iter().filter(|i| i.contains_top(Mode::CLat)).collect();
    let max_family = if tops.len() > 10 { 3 } else { tops.len() };
    let mut checked = 0usize;
    for size in 1..=max_family {
        for family in tops.iter().combinations(size) {
            checked += 1;
            let finite_members: Option<Vec<&BTreeSet<L::Elem>>> = family.iter().map(|i| i.members()).collect();
            let exhaustive = finite_members.filter(|ms| {
                ms.iter()
                    .try_fold(1usize, |acc, m| acc.checked_mul(m.len()))
                    .is_some_and(|p| p <= CHOICE_BUDGET)
            });
            let reached = match exhaustive {
                Some(ms) => {
                    let sup = ms
                        .iter()
                        .map(|m| m.iter())
                        .multi_cartesian_product()
                        .fold(l.bot(), |acc, h| l.join(&acc, &l.meet_all(h)));
                    sup == l.top()
                }
                None => {
                    let common = family
                        .iter()
                        .skip(1)
                        .fold((*family[0]).clone(), |acc, i| acc.intersect(i));
                    common.sup() == l.top()
                }
            };
            if !reached {
                return Verdict::Fails(format!(
                    "family [{}] meets the premise but its choice maps stay below ⊤",
                    family.iter().map(|i| i.render()).join("; ")
                ));
            }
        }
    }
    Verdict::Holds(format!("{checked} families with supremum ⊤"))
}

/// Whether the right adjoint of `psi` preserves every join equal to `⊤`.
///
/// On a finite target every subset with join `⊤` is tried. On the ω-chain
/// such a set either contains `ω`, which monotonicity settles, or is an
/// unbounded set of naturals, whose adjoint images climb to the supremum of
/// all finite values; so the condition is `ψ⊢(ω) = sup ψ⊢(n)`.
pub fn in_l_vdash(psi: &BasisMap) -> bool {
    let Ok(adj) = psi.right_adjoint() else {
        return false;
    };
    let (m, l) = (psi.dst(), psi.src());
    match Lattice::elements(m) {
        Some(els) => els.iter().copied().powerset().all(|s| {
            m.join_all(&s) != m.top()
                || adj.apply(m.top()) == l.join_all(s.iter().map(|b| adj.apply(*b)).collect_vec().iter())
        }),
        None => adj.apply(Elem::OMEGA) == adj.sup_of_finite_values(),
    }
}
