//! Maps between basis lattices: homomorphism checks for operation reducts and
//! right (Galois) adjoints.
//!
//! A map out of a finite lattice is a table. A map out of the ω-chain is a
//! [`CapRamp`]: finitely many exceptional points, then a tail that is either
//! constant or `n ↦ min(n + offset, cap)`, and a value at `ω` that defaults to
//! the supremum of the finite values. Past [`CapRamp::regime_start`] every
//! ramp is constant or affine in `n`, which is what makes the checks below
//! finite: a window of points up to the regime start decides each question.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::lattice::{CompleteLattice, Elem, Lattice};

/// Operations a reduct may keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    BinMeet,
    BinJoin,
    ArbJoin,
    ArbMeet,
    Bot,
    Top,
}

impl Op {
    const ALL: [Op; 6] = [Op::BinMeet, Op::BinJoin, Op::ArbJoin, Op::ArbMeet, Op::Bot, Op::Top];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// A set of operation flags describing a reduct signature.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OpSignature(u8);

impl OpSignature {
    /// Lattices with bottom: binary meets, finite joins, `⊥`.
    pub const LAT_BOT: OpSignature = OpSignature(0b01_0011);
    /// Complete lattices.
    pub const CLAT: OpSignature = OpSignature(0b11_1111);
    /// Arbitrary joins with `⊥` (the empty join).
    pub const SUP: OpSignature = OpSignature(0b01_0100);

    pub fn new(ops: &[Op]) -> Self {
        OpSignature(ops.iter().fold(0, |acc, op| acc | op.bit()))
    }

    pub fn contains(self, op: Op) -> bool {
        self.0 & op.bit() != 0
    }

    pub fn ops(self) -> impl Iterator<Item = Op> {
        Op::ALL.into_iter().filter(move |op| self.contains(*op))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Usable as a reduct: non-empty and keeps `⊥`.
    pub fn is_reduct(self) -> bool {
        !self.is_empty() && self.contains(Op::Bot)
    }
}

impl fmt::Debug for OpSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ops()).finish()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("table has {got} entries, source has {expected} elements")]
    TableLength { expected: usize, got: usize },
    #[error("value {0:?} is not an element of the target lattice")]
    InvalidValue(Elem),
    #[error("ramp rules need the ω-chain as source")]
    NotOmegaSource,
    #[error("table rules need a finite source")]
    NotFiniteSource,
    #[error("shifting tails need the ω-chain as target")]
    ShiftIntoFinite,
    #[error("ramp is not monotone between {0} and {1}")]
    NotMonotone(String, String),
    #[error("map does not preserve arbitrary joins and ⊥")]
    NotJoinPreserving,
    #[error("maps are not composable: {0}")]
    Mismatch(String),
    #[error("composition leaves the representable map family")]
    UnsupportedComposition,
}

/// Eventual behaviour of a ramp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tail {
    /// Constant value.
    Const(Elem),
    /// `n ↦ min(max(n + offset, 0), cap)`; only into the ω-chain.
    Shift { offset: i64, cap: Elem },
}

/// Map rule on the ω-chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CapRamp {
    pub exceptions: BTreeMap<u32, Elem>,
    pub tail: Tail,
    /// Value at `ω`; `None` means the supremum of all finite values.
    pub at_omega: Option<Elem>,
}

impl CapRamp {
    /// Ramp with `value(n) = min(slope·n + offset, cap)` outside `exceptions`.
    /// A zero slope gives a constant tail.
    pub fn sloped(exceptions: BTreeMap<u32, Elem>, slope: u8, offset: i64, cap: Elem) -> Self {
        let tail = if slope == 0 {
            let base = Elem::nat(0).shifted(offset);
            Tail::Const(base.min(cap))
        } else {
            Tail::Shift { offset, cap }
        };
        CapRamp {
            exceptions,
            tail,
            at_omega: None,
        }
    }

    fn tail_value(&self, dst: &CompleteLattice, n: u32) -> Elem {
        match self.tail {
            Tail::Const(c) => c,
            Tail::Shift { offset, cap } => dst.meet(&Elem::nat(n).shifted(offset), &cap),
        }
    }

    fn value_finite(&self, dst: &CompleteLattice, n: u32) -> Elem {
        self.exceptions
            .get(&n)
            .copied()
            .unwrap_or_else(|| self.tail_value(dst, n))
    }

    /// Supremum of the values at all naturals.
    pub fn limit(&self, dst: &CompleteLattice) -> Elem {
        let tail = match self.tail {
            Tail::Const(c) => c,
            Tail::Shift { cap, .. } => cap,
        };
        self.exceptions.values().fold(tail, |acc, v| dst.join(&acc, v))
    }

    /// First natural from which the ramp is in its tail and the tail is
    /// constant or exactly `n + offset`.
    pub fn regime_start(&self) -> u32 {
        let after_exceptions = self.exceptions.keys().next_back().map_or(0, |k| k + 1);
        let tail = match self.tail {
            Tail::Const(_) => 0,
            Tail::Shift { offset, cap } => {
                let clamp = (-offset).max(0);
                let capped = cap.finite().map_or(0, |c| (c as i64 - offset).max(0));
                clamp.max(capped).min(u32::MAX as i64 / 4) as u32
            }
        };
        after_exceptions.max(tail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MapRule {
    /// Values indexed by source element (finite source).
    Table(Vec<Elem>),
    Ramp(CapRamp),
}

/// A map between basis lattices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMap {
    src: CompleteLattice,
    dst: CompleteLattice,
    rule: MapRule,
}

impl BasisMap {
    pub fn identity(l: &CompleteLattice) -> Self {
        let rule = match Lattice::elements(l) {
            Some(els) => MapRule::Table(els),
            None => MapRule::Ramp(CapRamp {
                exceptions: BTreeMap::new(),
                tail: Tail::Shift {
                    offset: 0,
                    cap: Elem::OMEGA,
                },
                at_omega: None,
            }),
        };
        BasisMap {
            src: l.clone(),
            dst: l.clone(),
            rule,
        }
    }

    pub fn table(src: &CompleteLattice, dst: &CompleteLattice, values: Vec<Elem>) -> Result<Self, MapError> {
        let n = src.size().ok_or(MapError::NotFiniteSource)?;
        if values.len() != n {
            return Err(MapError::TableLength {
                expected: n,
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !dst.contains(**v)) {
            return Err(MapError::InvalidValue(*v));
        }
        Ok(BasisMap {
            src: src.clone(),
            dst: dst.clone(),
            rule: MapRule::Table(values),
        })
    }

    /// Table given by element names; panics on unknown names. For fixtures.
    pub fn from_names(src: &CompleteLattice, dst: &CompleteLattice, pairs: &[(&str, &str)]) -> Self {
        let mut values = vec![dst.bot(); src.size().expect("finite source")];
        for (a, b) in pairs {
            let a = src.element(a).expect("known source element");
            values[a.raw() as usize] = dst.element(b).expect("known target element");
        }
        Self::table(src, dst, values).expect("valid fixture map")
    }

    /// Ramp out of the ω-chain; checked for monotonicity.
    pub fn ramp(src: &CompleteLattice, dst: &CompleteLattice, ramp: CapRamp) -> Result<Self, MapError> {
        if !src.is_omega() {
            return Err(MapError::NotOmegaSource);
        }
        if matches!(ramp.tail, Tail::Shift { .. }) && !dst.is_omega() {
            return Err(MapError::ShiftIntoFinite);
        }
        let mut values: Vec<Elem> = ramp.exceptions.values().copied().collect();
        values.extend(ramp.at_omega);
        match ramp.tail {
            Tail::Const(c) => values.push(c),
            Tail::Shift { cap, .. } => values.push(cap),
        }
        if let Some(v) = values.iter().find(|v| !dst.contains(**v)) {
            return Err(MapError::InvalidValue(*v));
        }
        let map = BasisMap {
            src: src.clone(),
            dst: dst.clone(),
            rule: MapRule::Ramp(ramp),
        };
        let points = map.probe_points();
        for (a, b) in points.iter().tuple_windows() {
            if !dst.leq(&map.apply(*a), &map.apply(*b)) {
                return Err(MapError::NotMonotone(src.element_name(*a), src.element_name(*b)));
            }
        }
        Ok(map)
    }

    pub fn src(&self) -> &CompleteLattice {
        &self.src
    }

    pub fn dst(&self) -> &CompleteLattice {
        &self.dst
    }

    pub fn rule(&self) -> &MapRule {
        &self.rule
    }

    pub fn apply(&self, a: Elem) -> Elem {
        match &self.rule {
            MapRule::Table(t) => t[a.raw() as usize],
            MapRule::Ramp(r) => match a.finite() {
                Some(n) => r.value_finite(&self.dst, n),
                None => r.at_omega.unwrap_or_else(|| r.limit(&self.dst)),
            },
        }
    }

    /// Supremum of the images of all finite source elements.
    pub fn sup_of_finite_values(&self) -> Elem {
        match &self.rule {
            MapRule::Table(t) => self.dst.join_all(t.iter()),
            MapRule::Ramp(r) => r.limit(&self.dst),
        }
    }

    /// Source points that decide every pointwise question about this map:
    /// all elements of a finite source, or `0..=regime_start+2` and `ω`.
    pub fn probe_points(&self) -> Vec<Elem> {
        match &self.rule {
            MapRule::Table(_) => Lattice::elements(&self.src).unwrap_or_default(),
            MapRule::Ramp(r) => (0..=r.regime_start() + 2).map(Elem::nat).chain([Elem::OMEGA]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.dst && self.probe_points().iter().all(|a| self.apply(*a) == *a)
    }

    /// True iff the map preserves exactly the flagged operations.
    pub fn check_homomorphism(&self, sig: OpSignature) -> bool {
        self.homomorphism_failure(sig).is_none()
    }

    /// The first flagged operation the map fails to preserve, with a witness.
    pub fn homomorphism_failure(&self, sig: OpSignature) -> Option<(Op, String)> {
        sig.ops().find_map(|op| self.op_failure(op).map(|w| (op, w)))
    }

    fn op_failure(&self, op: Op) -> Option<String> {
        let (src, dst) = (&self.src, &self.dst);
        let name = |e: Elem| src.element_name(e);
        let pts = self.probe_points();
        match op {
            Op::Bot => (self.apply(src.bot()) != dst.bot()).then(|| "⊥".to_string()),
            Op::Top => (self.apply(src.top()) != dst.top()).then(|| "⊤".to_string()),
            Op::BinJoin | Op::BinMeet => {
                let join = op == Op::BinJoin;
                pts.iter().cartesian_product(pts.iter()).find_map(|(a, b)| {
                    let (lhs, rhs) = if join {
                        (self.apply(src.join(a, b)), dst.join(&self.apply(*a), &self.apply(*b)))
                    } else {
                        (self.apply(src.meet(a, b)), dst.meet(&self.apply(*a), &self.apply(*b)))
                    };
                    (lhs != rhs).then(|| format!("{} {} {}", name(*a), if join { "∨" } else { "∧" }, name(*b)))
                })
            }
            Op::ArbJoin | Op::ArbMeet => {
                let join = op == Op::ArbJoin;
                match &self.rule {
                    MapRule::Table(_) => pts.iter().copied().powerset().find_map(|s| {
                        let (lhs, rhs) = if join {
                            (
                                self.apply(src.join_all(&s)),
                                dst.join_all(s.iter().map(|a| self.apply(*a)).collect_vec().iter()),
                            )
                        } else {
                            (
                                self.apply(src.meet_all(&s)),
                                dst.meet_all(s.iter().map(|a| self.apply(*a)).collect_vec().iter()),
                            )
                        };
                        (lhs != rhs).then(|| format!("{{{}}}", s.iter().map(|a| name(*a)).join(",")))
                    }),
                    MapRule::Ramp(_) => {
                        // Represented subsets of the chain: finite sets reduce to the
                        // binary case plus the empty join/meet; infinite sets of
                        // naturals have supremum ω, and infima are always attained.
                        if join {
                            self.op_failure(Op::Bot)
                                .or_else(|| self.op_failure(Op::BinJoin))
                                .or_else(|| {
                                    (self.apply(Elem::OMEGA) != self.sup_of_finite_values())
                                        .then(|| "all naturals".to_string())
                                })
                        } else {
                            self.op_failure(Op::Top).or_else(|| self.op_failure(Op::BinMeet))
                        }
                    }
                }
            }
        }
    }

    /// True when the map preserves all represented joins, including `⊥`.
    pub fn is_join_preserving(&self) -> bool {
        self.check_homomorphism(OpSignature::SUP)
    }

    /// `φ⊢(b) = ⋁{a | φ(a) ≤ b}`, for maps preserving arbitrary joins.
    pub fn right_adjoint(&self) -> Result<BasisMap, MapError> {
        if !self.is_join_preserving() {
            return Err(MapError::NotJoinPreserving);
        }
        let (src, dst) = (&self.src, &self.dst);
        let rule = match (src.is_omega(), dst.size()) {
            (_, Some(_)) => MapRule::Table(
                Lattice::elements(dst)
                    .expect("finite")
                    .into_iter()
                    .map(|b| self.adjoint_at(b))
                    .collect(),
            ),
            (false, None) => {
                // finite → ω: a step function, constant past the largest finite value.
                let els = Lattice::elements(src).expect("finite");
                let last = els.iter().filter_map(|a| self.apply(*a).finite()).max().unwrap_or(0);
                let exceptions = (0..=last).map(|b| (b, self.adjoint_at(Elem::nat(b)))).collect();
                MapRule::Ramp(CapRamp {
                    exceptions,
                    tail: Tail::Const(self.adjoint_at(Elem::nat(last + 1))),
                    at_omega: Some(src.top()),
                })
            }
            (true, None) => {
                let MapRule::Ramp(r) = &self.rule else {
                    unreachable!("ω source always has a ramp rule")
                };
                let start = r.regime_start();
                let horizon = start
                    + match r.tail {
                        Tail::Const(c) => c.finite().unwrap_or(0),
                        Tail::Shift { offset, cap } => offset.unsigned_abs() as u32 + cap.finite().unwrap_or(0),
                    }
                    + 2;
                let tail = match r.tail {
                    Tail::Const(c) if c.is_omega() => {
                        // finite targets are reached only inside the window
                        Tail::Const(self.adjoint_at(Elem::nat(horizon + 1)))
                    }
                    Tail::Const(_) => Tail::Const(Elem::OMEGA),
                    Tail::Shift { cap, .. } if !cap.is_omega() => Tail::Const(Elem::OMEGA),
                    Tail::Shift { offset, .. } => Tail::Shift {
                        offset: -offset,
                        cap: Elem::OMEGA,
                    },
                };
                let exceptions = (0..=horizon).map(|b| (b, self.adjoint_at(Elem::nat(b)))).collect();
                let ramp = CapRamp {
                    exceptions,
                    tail,
                    at_omega: Some(Elem::OMEGA),
                };
                // the tail guess must agree with the defining formula past the window
                for b in horizon + 1..=horizon + 3 {
                    if ramp.value_finite(src, b) != self.adjoint_at(Elem::nat(b)) {
                        return Err(MapError::NotJoinPreserving);
                    }
                }
                MapRule::Ramp(ramp)
            }
        };
        let adj = BasisMap {
            src: dst.clone(),
            dst: src.clone(),
            rule,
        };
        Ok(adj.simplified())
    }

    /// `⋁{a ∈ src | φ(a) ≤ b}` evaluated directly.
    fn adjoint_at(&self, b: Elem) -> Elem {
        let (src, dst) = (&self.src, &self.dst);
        match &self.rule {
            MapRule::Table(t) => src.join_all(
                t.iter()
                    .enumerate()
                    .filter(|(_, v)| dst.leq(v, &b))
                    .map(|(i, _)| Elem::index(i))
                    .collect_vec()
                    .iter(),
            ),
            MapRule::Ramp(r) => {
                if dst.leq(&self.apply(Elem::OMEGA), &b) {
                    return Elem::OMEGA;
                }
                // Infinitely many naturals qualify once the tail settles below b.
                let eventually_below = match r.tail {
                    Tail::Const(c) => dst.leq(&c, &b),
                    Tail::Shift { cap, .. } => !cap.is_omega() && dst.leq(&cap, &b),
                };
                if eventually_below {
                    return Elem::OMEGA;
                }
                let bound = match (r.tail, b.finite()) {
                    (Tail::Shift { offset, .. }, Some(bv)) => (bv as i64 - offset).max(0) as u32 + 1,
                    _ => 0,
                }
                .max(r.regime_start() + 1);
                (0..=bound)
                    .rev()
                    .map(Elem::nat)
                    .find(|a| dst.leq(&self.apply(*a), &b))
                    .unwrap_or(Elem::nat(0))
            }
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &BasisMap) -> Result<BasisMap, MapError> {
        if self.dst != next.src {
            return Err(MapError::Mismatch(format!(
                "{} → {} then {} → {}",
                self.src.name(),
                self.dst.name(),
                next.src.name(),
                next.dst.name()
            )));
        }
        let (src, dst) = (&self.src, &next.dst);
        let MapRule::Ramp(r1) = &self.rule else {
            let values = Lattice::elements(src)
                .expect("finite")
                .into_iter()
                .map(|a| next.apply(self.apply(a)))
                .collect();
            return BasisMap::table(src, dst, values);
        };
        let start2 = match &next.rule {
            MapRule::Ramp(r2) => r2.regime_start() as i64,
            MapRule::Table(_) => 0,
        };
        let tail = match r1.tail {
            Tail::Const(c) => Tail::Const(next.apply(c)),
            Tail::Shift { cap, .. } if !cap.is_omega() => Tail::Const(next.apply(cap)),
            Tail::Shift { offset, .. } => match &next.rule {
                MapRule::Table(_) => return Err(MapError::UnsupportedComposition),
                MapRule::Ramp(r2) => match r2.tail {
                    Tail::Const(d) => Tail::Const(d),
                    Tail::Shift { offset: o2, cap: c2 } => Tail::Shift {
                        offset: offset + o2,
                        cap: c2,
                    },
                },
            },
        };
        let shift = match r1.tail {
            Tail::Shift { offset, .. } => offset,
            Tail::Const(_) => 0,
        };
        let horizon = r1.regime_start() as i64 + start2 + shift.abs() + 2;
        let horizon = horizon.min(u32::MAX as i64 / 4) as u32;
        let exceptions = (0..=horizon)
            .map(|n| (n, next.apply(self.apply(Elem::nat(n)))))
            .collect();
        let ramp = CapRamp {
            exceptions,
            tail,
            at_omega: Some(next.apply(self.apply(Elem::OMEGA))),
        };
        for n in horizon + 1..=horizon + 3 {
            if ramp.value_finite(dst, n) != next.apply(self.apply(Elem::nat(n))) {
                return Err(MapError::UnsupportedComposition);
            }
        }
        Ok(BasisMap::ramp(src, dst, ramp)?.simplified())
    }

    /// Shape of `{a | φ(a) satisfies bound}` on an ω-chain source.
    ///
    /// Both bounds are downward closed in the target, so on a monotone ramp
    /// the set is empty, an initial segment `↓k`, or all naturals without `ω`.
    pub fn sublevel(&self, bound: Bound) -> Locus {
        let MapRule::Ramp(r) = &self.rule else {
            panic!("sublevel needs an ω-chain source");
        };
        let dst = &self.dst;
        let ok = |v: Elem| match bound {
            Bound::AtMost(b) => dst.leq(&v, &b),
            Bound::Finite => !v.is_omega(),
        };
        if ok(self.apply(Elem::OMEGA)) {
            return Locus::Below(Elem::OMEGA);
        }
        let eventually = match r.tail {
            Tail::Const(c) => ok(c),
            Tail::Shift { cap, .. } if !cap.is_omega() => ok(cap),
            // unbounded finite values
            Tail::Shift { .. } => matches!(bound, Bound::Finite),
        };
        if eventually {
            return Locus::Naturals;
        }
        let reach = match (r.tail, bound) {
            (Tail::Shift { offset, .. }, Bound::AtMost(b)) => {
                b.finite().map_or(0, |bv| (bv as i64 - offset).max(0) as u32 + 1)
            }
            _ => 0,
        };
        (0..=reach.max(r.regime_start() + 1))
            .rev()
            .map(Elem::nat)
            .find(|a| ok(self.apply(*a)))
            .map_or(Locus::Empty, Locus::Below)
    }

    /// Drops exceptions that agree with the tail and an `ω` value equal to the
    /// default supremum.
    fn simplified(mut self) -> Self {
        let dst = self.dst.clone();
        if let MapRule::Ramp(r) = &mut self.rule {
            while let Some((&k, &v)) = r.exceptions.iter().next_back() {
                if r.tail_value(&dst, k) != v {
                    break;
                }
                r.exceptions.remove(&k);
            }
            if r.at_omega == Some(r.limit(&dst)) {
                r.at_omega = None;
            }
        }
        self
    }
}

/// Downward-closed conditions on basis values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost(Elem),
    Finite,
}

/// A downward-closed subset of the ω-chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locus {
    Empty,
    /// `↓k`; `Below(ω)` is the whole chain.
    Below(Elem),
    /// Every natural, but not `ω`.
    Naturals,
}

impl Locus {
    pub fn intersect(self, other: Locus) -> Locus {
        use Locus::*;
        match (self, other) {
            (Empty, _) | (_, Empty) => Empty,
            (Below(a), Below(b)) => Below(a.min(b)),
            (Below(a), Naturals) | (Naturals, Below(a)) => {
                if a.is_omega() {
                    Naturals
                } else {
                    Below(a)
                }
            }
            (Naturals, Naturals) => Naturals,
        }
    }

    pub fn contains(self, a: Elem) -> bool {
        match self {
            Locus::Empty => false,
            Locus::Below(k) => a <= k,
            Locus::Naturals => !a.is_omega(),
        }
    }
}

/// Every map between finite lattices preserving `⊥` and binary joins, in
/// lexicographic order of value tables.
pub fn join_preserving_tables(src: &CompleteLattice, dst: &CompleteLattice) -> Vec<BasisMap> {
    let (Some(s), Some(d)) = (Lattice::elements(src), Lattice::elements(dst)) else {
        return Vec::new();
    };
    std::iter::repeat_n(d.clone(), s.len())
        .multi_cartesian_product()
        .filter_map(|values| BasisMap::table(src, dst, values).ok())
        .filter(|m| m.check_homomorphism(OpSignature::new(&[Op::Bot, Op::BinJoin])))
        .collect()
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

    /// The collapse ω → 2: 0 ↦ 0, everything else ↦ 1.
    fn collapse() -> BasisMap {
        let w = CompleteLattice::omega();
        let t = two();
        BasisMap::ramp(
            &w,
            &t,
            CapRamp {
                exceptions: [(0, t.bot())].into(),
                tail: Tail::Const(t.top()),
                at_omega: None,
            },
        )
        .unwrap()
    }

    fn galois_holds(phi: &BasisMap, adj: &BasisMap, level: u32) {
        for a in phi.src().truncated_elements(level) {
            for b in phi.dst().truncated_elements(level) {
                assert_eq!(
                    phi.dst().leq(&phi.apply(a), &b),
                    phi.src().leq(&a, &adj.apply(b)),
                    "a={a:?} b={b:?}"
                );
            }
        }
    }

    #[test]
    fn identity_is_a_full_homomorphism() {
        let id = BasisMap::identity(&c3());
        assert!(id.check_homomorphism(OpSignature::CLAT));
        let adj = id.right_adjoint().unwrap();
        assert!(adj.is_identity());
    }

    #[test]
    fn bottom_not_preserved() {
        let phi = BasisMap::from_names(&two(), &c3(), &[("0", "m"), ("1", "1")]);
        assert!(!phi.check_homomorphism(OpSignature::new(&[Op::Bot])));
    }

    #[test]
    fn collapse_preserves_joins() {
        let phi = collapse();
        assert!(phi.check_homomorphism(OpSignature::new(&[Op::ArbJoin, Op::Bot])));
        assert_eq!(phi.apply(Elem::OMEGA), two().top());
    }

    #[test]
    fn adjoint_of_inclusion_two_into_c3() {
        let phi = BasisMap::from_names(&two(), &c3(), &[("0", "0"), ("1", "1")]);
        let adj = phi.right_adjoint().unwrap();
        let t = two();
        let l = c3();
        assert_eq!(adj.apply(l.element("0").unwrap()), t.element("0").unwrap());
        assert_eq!(adj.apply(l.element("m").unwrap()), t.element("0").unwrap());
        assert_eq!(adj.apply(l.element("1").unwrap()), t.element("1").unwrap());
        galois_holds(&phi, &adj, 0);
    }

    #[test]
    fn adjoint_of_c3_onto_two() {
        let phi = BasisMap::from_names(&c3(), &two(), &[("0", "0"), ("m", "0"), ("1", "1")]);
        let adj = phi.right_adjoint().unwrap();
        assert_eq!(adj.apply(two().bot()), c3().element("m").unwrap());
        assert_eq!(adj.apply(two().top()), c3().top());
        galois_holds(&phi, &adj, 0);
    }

    #[test]
    fn adjoint_of_collapse() {
        let phi = collapse();
        let adj = phi.right_adjoint().unwrap();
        assert_eq!(adj.apply(two().bot()), Elem::nat(0));
        assert_eq!(adj.apply(two().top()), Elem::OMEGA);
        galois_holds(&phi, &adj, 8);
    }

    #[test]
    fn adjoint_of_shift() {
        let w = CompleteLattice::omega();
        // 0 ↦ 0, n ↦ n + 2 for n ≥ 1
        let phi = BasisMap::ramp(&w, &w, CapRamp::sloped([(0, Elem::nat(0))].into(), 1, 2, Elem::OMEGA)).unwrap();
        let adj = phi.right_adjoint().unwrap();
        galois_holds(&phi, &adj, 12);
        assert_eq!(adj.apply(Elem::nat(2)), Elem::nat(0));
        assert_eq!(adj.apply(Elem::nat(3)), Elem::nat(1));
        assert_eq!(adj.apply(Elem::nat(40)), Elem::nat(38));
    }

    #[test]
    fn adjoint_is_not_continuous_for_collapse_to_omega() {
        let w = CompleteLattice::omega();
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
        let adj = phi.right_adjoint().unwrap();
        galois_holds(&phi, &adj, 10);
        assert_eq!(adj.apply(Elem::nat(5)), Elem::nat(0));
        assert_eq!(adj.apply(Elem::OMEGA), Elem::OMEGA);
        assert_eq!(adj.sup_of_finite_values(), Elem::nat(0));
    }

    #[test]
    fn non_join_preserving_has_no_adjoint() {
        let phi = BasisMap::from_names(&two(), &two(), &[("0", "1"), ("1", "1")]);
        assert_eq!(phi.right_adjoint(), Err(MapError::NotJoinPreserving));
    }

    #[test]
    fn non_monotone_ramp_rejected() {
        let w = CompleteLattice::omega();
        let err = BasisMap::ramp(
            &w,
            &w,
            CapRamp {
                exceptions: [(3, Elem::nat(9))].into(),
                tail: Tail::Const(Elem::nat(4)),
                at_omega: None,
            },
        )
        .unwrap_err();
        assert!(matches!(err, MapError::NotMonotone(..)));
    }

    #[test]
    fn ramp_composition_matches_pointwise() {
        let w = CompleteLattice::omega();
        let f = BasisMap::ramp(&w, &w, CapRamp::sloped([(0, Elem::nat(0))].into(), 1, 1, Elem::OMEGA)).unwrap();
        let g = BasisMap::ramp(&w, &w, CapRamp::sloped(BTreeMap::new(), 1, 0, Elem::nat(5))).unwrap();
        let c = collapse();
        for (a, b) in [(&f, &g), (&g, &f), (&f, &f)] {
            let ab = a.then(b).unwrap();
            for n in w.truncated_elements(20) {
                assert_eq!(ab.apply(n), b.apply(a.apply(n)));
            }
        }
        let fc = f.then(&c).unwrap();
        for n in w.truncated_elements(20) {
            assert_eq!(fc.apply(n), c.apply(f.apply(n)));
        }
    }

    #[test]
    fn join_preserving_tables_between_small_chains() {
        // ⊥ ↦ ⊥ and 1 ↦ anything: two maps 2 → 2
        assert_eq!(join_preserving_tables(&two(), &two()).len(), 2);
        // monotone maps C3 → C3 fixing ⊥
        assert_eq!(join_preserving_tables(&c3(), &c3()).len(), 6);
    }

    #[test]
    fn sublevels_of_collapse_and_shift() {
        let w = CompleteLattice::omega();
        let c = collapse();
        assert_eq!(c.sublevel(Bound::AtMost(two().bot())), Locus::Below(Elem::nat(0)));
        assert_eq!(c.sublevel(Bound::AtMost(two().top())), Locus::Below(Elem::OMEGA));
        let to_omega = BasisMap::ramp(
            &w,
            &w,
            CapRamp {
                exceptions: [(0, Elem::nat(0))].into(),
                tail: Tail::Const(Elem::OMEGA),
                at_omega: None,
            },
        )
        .unwrap();
        assert_eq!(to_omega.sublevel(Bound::Finite), Locus::Below(Elem::nat(0)));
        let shift = BasisMap::ramp(&w, &w, CapRamp::sloped(BTreeMap::new(), 1, 2, Elem::OMEGA)).unwrap();
        assert_eq!(shift.sublevel(Bound::Finite), Locus::Naturals);
        assert_eq!(shift.sublevel(Bound::AtMost(Elem::nat(5))), Locus::Below(Elem::nat(3)));
        assert_eq!(shift.sublevel(Bound::AtMost(Elem::nat(1))), Locus::Empty);
        let capped = BasisMap::ramp(&w, &w, CapRamp::sloped(BTreeMap::new(), 1, 0, Elem::nat(4))).unwrap();
        assert_eq!(capped.sublevel(Bound::AtMost(Elem::nat(4))), Locus::Below(Elem::OMEGA));
        let jump = BasisMap::ramp(
            &w,
            &w,
            CapRamp {
                exceptions: BTreeMap::new(),
                tail: Tail::Const(Elem::nat(3)),
                at_omega: Some(Elem::OMEGA),
            },
        )
        .unwrap();
        assert_eq!(jump.sublevel(Bound::Finite), Locus::Naturals);
    }

    #[test]
    fn sublevel_matches_scan() {
        let w = CompleteLattice::omega();
        for offset in -2..=2i64 {
            for cap in [Elem::nat(3), Elem::OMEGA] {
                let exc: BTreeMap<u32, Elem> = [(0, Elem::nat(0))].into();
                let Ok(m) = BasisMap::ramp(&w, &w, CapRamp::sloped(exc, 1, offset, cap)) else {
                    continue;
                };
                for b in (0..6).map(Elem::nat).chain([Elem::OMEGA]) {
                    let locus = m.sublevel(Bound::AtMost(b));
                    for a in (0..30).map(Elem::nat).chain([Elem::OMEGA]) {
                        assert_eq!(locus.contains(a), m.apply(a) <= b, "{offset} {cap:?} {b:?} {a:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn signature_flags() {
        assert!(OpSignature::LAT_BOT.contains(Op::BinMeet));
        assert!(OpSignature::LAT_BOT.contains(Op::BinJoin));
        assert!(OpSignature::LAT_BOT.contains(Op::Bot));
        assert!(!OpSignature::LAT_BOT.contains(Op::Top));
        assert!(!OpSignature::LAT_BOT.contains(Op::ArbJoin));
        assert!(OpSignature::LAT_BOT.is_reduct());
        assert!(!OpSignature::new(&[Op::Top]).is_reduct());
    }
}
