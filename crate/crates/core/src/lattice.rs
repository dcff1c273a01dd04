//! Effectively presented complete lattices.
//!
//! Two kinds are supported: finite lattices given extensionally (elements plus
//! an order relation, with meet and join tables precomputed at construction)
//! and the chain `0 < 1 < 2 < … < ω`, whose top `ω` is the supremum of the
//! naturals but not a finite join of them.
//!
//! The [`Lattice`] trait abstracts over everything that behaves like a
//! complete lattice in this crate, so ideal machinery can be shared between
//! basis lattices and the function lattices `L^X` built over them.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use thiserror::Error;

/// An element of a [`CompleteLattice`].
///
/// In a finite lattice this is the declaration index of the element. In the
/// ω-chain it is the natural number itself, with [`Elem::OMEGA`] for the top.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub(crate) u32);

impl Elem {
    /// The top of the ω-chain.
    pub const OMEGA: Elem = Elem(u32::MAX);

    /// The natural number `n` as an element of the ω-chain.
    pub fn nat(n: u32) -> Elem {
        assert!(n != u32::MAX, "natural out of range");
        Elem(n)
    }

    /// The element with declaration index `i` in a finite lattice.
    pub fn index(i: usize) -> Elem {
        Elem(i as u32)
    }

    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn is_omega(self) -> bool {
        self == Elem::OMEGA
    }

    /// The natural value of an ω-chain element, `None` for `ω`.
    pub fn finite(self) -> Option<u32> {
        (!self.is_omega()).then_some(self.0)
    }

    /// `n + k` clamped into `[0, ω]`; `ω + k = ω`.
    pub(crate) fn shifted(self, k: i64) -> Elem {
        match self.finite() {
            None => Elem::OMEGA,
            Some(n) => {
                let v = (n as i64 + k).max(0);
                if v >= u32::MAX as i64 {
                    Elem::OMEGA
                } else {
                    Elem(v as u32)
                }
            }
        }
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_omega() {
            write!(f, "ω")
        } else {
            write!(f, "#{}", self.0)
        }
    }
}

/// Complete-lattice behaviour shared by basis lattices and function lattices.
pub trait Lattice: Clone + fmt::Debug {
    type Elem: Clone + Eq + Ord + Hash + fmt::Debug;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn bot(&self) -> Self::Elem;
    fn top(&self) -> Self::Elem;

    /// Every element, when there are finitely many.
    fn elements(&self) -> Option<Vec<Self::Elem>>;

    /// Elements whose ω-chain coordinates lie in `{0, …, level, ω}`.
    /// Equals [`Lattice::elements`] on finite lattices.
    fn truncated_elements(&self, level: u32) -> Vec<Self::Elem>;

    /// The basis coordinates of an element: one value for a basis lattice,
    /// one value per point for a function lattice.
    fn coordinates(&self, a: &Self::Elem) -> Vec<Elem>;

    /// Inverse of [`Lattice::coordinates`].
    fn of_coordinates(&self, coords: Vec<Elem>) -> Self::Elem;

    /// Name of coordinate `i` in the literal grammar.
    fn coordinate_label(&self, i: usize) -> String;

    /// Number of coordinates of every element.
    fn dimension(&self) -> usize;

    /// True when coordinates live in the ω-chain.
    fn omega_based(&self) -> bool;

    /// Textual form of an element in the literal grammar.
    fn render(&self, a: &Self::Elem) -> String;

    fn is_finite(&self) -> bool {
        !self.omega_based()
    }

    fn join_all<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.bot(), |acc, x| self.join(&acc, x))
    }

    fn meet_all<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.top(), |acc, x| self.meet(&acc, x))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("not a poset: {0}")]
    NotAPoset(String),
    #[error("elements {0} and {1} have no meet")]
    NoMeet(String, String),
    #[error("elements {0} and {1} have no join")]
    NoJoin(String, String),
    #[error("no bottom or no top: {0}")]
    NoBotTop(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("lattice has no elements")]
    Empty,
}

/// How the order of a finite lattice is given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderSpec {
    /// Cover pairs `a ⋖ b`; the reflexive-transitive closure is taken.
    Covers(Vec<(String, String)>),
    /// The full `≤` relation as pairs.
    Leq(Vec<(String, String)>),
}

/// Input to [`build_lattice`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeSpec {
    Finite {
        name: String,
        elements: Vec<String>,
        order: OrderSpec,
        bot: Option<String>,
        top: Option<String>,
    },
    Omega {
        name: String,
    },
}

#[derive(Debug)]
struct FiniteTable {
    names: Vec<String>,
    leq: Vec<bool>,
    meet: Vec<u32>,
    join: Vec<u32>,
    bot: u32,
    top: u32,
}

#[derive(Debug)]
enum Kind {
    Finite(FiniteTable),
    Omega,
}

#[derive(Debug)]
struct Inner {
    name: String,
    kind: Kind,
}

/// An effectively presented complete lattice. Cheap to clone.
#[derive(Clone)]
pub struct CompleteLattice {
    inner: Arc<Inner>,
}

impl fmt::Debug for CompleteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CompleteLattice({})", self.inner.name)
    }
}

impl PartialEq for CompleteLattice {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        match (&self.inner.kind, &other.inner.kind) {
            (Kind::Omega, Kind::Omega) => true,
            (Kind::Finite(a), Kind::Finite(b)) => {
                self.inner.name == other.inner.name && a.names == b.names && a.leq == b.leq
            }
            _ => false,
        }
    }
}

impl Eq for CompleteLattice {}

/// Builds and validates a lattice from its description.
pub fn build_lattice(spec: &LatticeSpec) -> Result<CompleteLattice, LatticeError> {
    match spec {
        LatticeSpec::Omega { name } => Ok(CompleteLattice::omega_named(name)),
        LatticeSpec::Finite {
            name,
            elements,
            order,
            bot,
            top,
        } => build_finite(name, elements, order, bot.as_deref(), top.as_deref()),
    }
}

fn build_finite(
    name: &str,
    elements: &[String],
    order: &OrderSpec,
    bot: Option<&str>,
    top: Option<&str>,
) -> Result<CompleteLattice, LatticeError> {
    let n = elements.len();
    if n == 0 {
        return Err(LatticeError::Empty);
    }
    let mut index = BTreeMap::new();
    for (i, e) in elements.iter().enumerate() {
        if index.insert(e.as_str(), i).is_some() {
            return Err(LatticeError::DuplicateElement(e.clone()));
        }
    }
    let lookup = |s: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| LatticeError::UnknownElement(s.to_string()))
    };

    let mut leq = vec![false; n * n];
    for i in 0..n {
        leq[i * n + i] = true;
    }
    let (pairs, close) = match order {
        OrderSpec::Covers(p) => (p, true),
        OrderSpec::Leq(p) => (p, false),
    };
    for (a, b) in pairs {
        let (a, b) = (lookup(a)?, lookup(b)?);
        leq[a * n + b] = true;
    }
    if close {
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && leq[i * n + j] && leq[j * n + i] {
                return Err(LatticeError::NotAPoset(format!(
                    "antisymmetry fails for {} and {}",
                    elements[i], elements[j]
                )));
            }
            if leq[i * n + j] {
                for k in 0..n {
                    if leq[j * n + k] && !leq[i * n + k] {
                        return Err(LatticeError::NotAPoset(format!(
                            "transitivity fails for {} ≤ {} ≤ {}",
                            elements[i], elements[j], elements[k]
                        )));
                    }
                }
            }
        }
    }

    // Least upper bound of {i, j}: the upper bound below every other upper bound.
    let bound = |i: usize, j: usize, upper: bool| -> Option<usize> {
        let rel = |a: usize, b: usize| if upper { leq[a * n + b] } else { leq[b * n + a] };
        let bounds: Vec<usize> = (0..n).filter(|&k| rel(i, k) && rel(j, k)).collect();
        bounds.iter().copied().find(|&c| bounds.iter().all(|&d| rel(c, d)))
    };
    let mut meet = vec![0u32; n * n];
    let mut join = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            join[i * n + j] =
                bound(i, j, true).ok_or_else(|| LatticeError::NoJoin(elements[i].clone(), elements[j].clone()))? as u32;
            meet[i * n + j] = bound(i, j, false)
                .ok_or_else(|| LatticeError::NoMeet(elements[i].clone(), elements[j].clone()))?
                as u32;
        }
    }

    let least = (0..n).find(|&b| (0..n).all(|k| leq[b * n + k]));
    let greatest = (0..n).find(|&t| (0..n).all(|k| leq[k * n + t]));
    let (Some(least), Some(greatest)) = (least, greatest) else {
        return Err(LatticeError::NoBotTop("no least or greatest element".into()));
    };
    if let Some(b) = bot {
        if lookup(b)? != least {
            return Err(LatticeError::NoBotTop(format!("`{b}` is not the least element")));
        }
    }
    if let Some(t) = top {
        if lookup(t)? != greatest {
            return Err(LatticeError::NoBotTop(format!("`{t}` is not the greatest element")));
        }
    }

    Ok(CompleteLattice {
        inner: Arc::new(Inner {
            name: name.to_string(),
            kind: Kind::Finite(FiniteTable {
                names: elements.to_vec(),
                leq,
                meet,
                join,
                bot: least as u32,
                top: greatest as u32,
            }),
        }),
    })
}

impl CompleteLattice {
    /// The chain `0 < 1 < … < ω`.
    pub fn omega() -> Self {
        Self::omega_named("W")
    }

    pub fn omega_named(name: &str) -> Self {
        CompleteLattice {
            inner: Arc::new(Inner {
                name: name.to_string(),
                kind: Kind::Omega,
            }),
        }
    }

    /// A finite chain with the given element names, bottom first.
    pub fn chain(name: &str, elements: &[&str]) -> Self {
        let covers = elements
            .windows(2)
            .map(|w| (w[0].to_string(), w[1].to_string()))
            .collect();
        build_lattice(&LatticeSpec::Finite {
            name: name.to_string(),
            elements: elements.iter().map(|s| s.to_string()).collect(),
            order: OrderSpec::Covers(covers),
            bot: None,
            top: None,
        })
        .expect("a chain is a lattice")
    }

    /// Finite lattice from cover pairs; panics on invalid input. For fixtures.
    pub fn from_covers(name: &str, elements: &[&str], covers: &[(&str, &str)]) -> Self {
        build_lattice(&LatticeSpec::Finite {
            name: name.to_string(),
            elements: elements.iter().map(|s| s.to_string()).collect(),
            order: OrderSpec::Covers(covers.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()),
            bot: None,
            top: None,
        })
        .expect("fixture lattice is valid")
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn is_omega(&self) -> bool {
        matches!(self.inner.kind, Kind::Omega)
    }

    /// Number of elements of a finite lattice.
    pub fn size(&self) -> Option<usize> {
        match &self.inner.kind {
            Kind::Finite(t) => Some(t.names.len()),
            Kind::Omega => None,
        }
    }

    /// Element by name (`w`, `omega` or `ω` and decimal naturals on the ω-chain).
    pub fn element(&self, name: &str) -> Option<Elem> {
        match &self.inner.kind {
            Kind::Finite(t) => t.names.iter().position(|s| s == name).map(Elem::index),
            Kind::Omega => match name {
                "w" | "omega" | "ω" => Some(Elem::OMEGA),
                s => s.parse::<u32>().ok().filter(|&n| n != u32::MAX).map(Elem),
            },
        }
    }

    pub fn element_name(&self, e: Elem) -> String {
        match &self.inner.kind {
            Kind::Finite(t) => t.names[e.0 as usize].clone(),
            Kind::Omega => match e.finite() {
                Some(n) => n.to_string(),
                None => "w".to_string(),
            },
        }
    }

    /// Declared element names of a finite lattice.
    pub fn element_names(&self) -> Option<&[String]> {
        match &self.inner.kind {
            Kind::Finite(t) => Some(&t.names),
            Kind::Omega => None,
        }
    }

    /// True when `e` denotes an element of this lattice.
    pub fn contains(&self, e: Elem) -> bool {
        match &self.inner.kind {
            Kind::Finite(t) => (e.0 as usize) < t.names.len(),
            Kind::Omega => true,
        }
    }

    /// Cover pairs of a finite lattice in declaration order.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let Kind::Finite(t) = &self.inner.kind else {
            return Vec::new();
        };
        let n = t.names.len();
        let lt = |a: usize, b: usize| a != b && t.leq[a * n + b];
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                    out.push((Elem::index(a), Elem::index(b)));
                }
            }
        }
        out
    }

    /// Supremum of all finite elements: `ω` on the chain, `⊤` otherwise.
    pub fn sup_of_all_finite(&self) -> Elem {
        match &self.inner.kind {
            Kind::Finite(t) => Elem(t.top),
            Kind::Omega => Elem::OMEGA,
        }
    }

    /// Checks `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)` for every triple.
    pub fn is_distributive(&self) -> bool {
        let Some(els) = Lattice::elements(self) else {
            // chains are distributive
            return true;
        };
        els.iter().all(|a| {
            els.iter().all(|b| {
                els.iter()
                    .all(|c| self.meet(a, &self.join(b, c)) == self.join(&self.meet(a, b), &self.meet(a, c)))
            })
        })
    }
}

impl Lattice for CompleteLattice {
    type Elem = Elem;

    fn leq(&self, a: &Elem, b: &Elem) -> bool {
        match &self.inner.kind {
            Kind::Finite(t) => t.leq[a.0 as usize * t.names.len() + b.0 as usize],
            Kind::Omega => a <= b,
        }
    }

    fn meet(&self, a: &Elem, b: &Elem) -> Elem {
        match &self.inner.kind {
            Kind::Finite(t) => Elem(t.meet[a.0 as usize * t.names.len() + b.0 as usize]),
            Kind::Omega => *a.min(b),
        }
    }

    fn join(&self, a: &Elem, b: &Elem) -> Elem {
        match &self.inner.kind {
            Kind::Finite(t) => Elem(t.join[a.0 as usize * t.names.len() + b.0 as usize]),
            Kind::Omega => *a.max(b),
        }
    }

    fn bot(&self) -> Elem {
        match &self.inner.kind {
            Kind::Finite(t) => Elem(t.bot),
            Kind::Omega => Elem(0),
        }
    }

    fn top(&self) -> Elem {
        match &self.inner.kind {
            Kind::Finite(t) => Elem(t.top),
            Kind::Omega => Elem::OMEGA,
        }
    }

    fn elements(&self) -> Option<Vec<Elem>> {
        self.size().map(|n| (0..n).map(Elem::index).collect())
    }

    fn truncated_elements(&self, level: u32) -> Vec<Elem> {
        match self.size() {
            Some(n) => (0..n).map(Elem::index).collect(),
            None => (0..=level).map(Elem).chain([Elem::OMEGA]).collect(),
        }
    }

    fn coordinates(&self, a: &Elem) -> Vec<Elem> {
        vec![*a]
    }

    fn of_coordinates(&self, coords: Vec<Elem>) -> Elem {
        coords[0]
    }

    fn coordinate_label(&self, _i: usize) -> String {
        "*".to_string()
    }

    fn dimension(&self) -> usize {
        1
    }

    fn omega_based(&self) -> bool {
        self.is_omega()
    }

    fn render(&self, a: &Elem) -> String {
        self.element_name(*a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3() -> CompleteLattice {
        CompleteLattice::from_covers(
            "M3",
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
        )
    }

    #[test]
    fn three_chain_is_valid() {
        let c3 = CompleteLattice::chain("C3", &["0", "m", "1"]);
        let m = c3.element("m").unwrap();
        assert_eq!(c3.bot(), c3.element("0").unwrap());
        assert_eq!(c3.top(), c3.element("1").unwrap());
        assert_eq!(c3.join(&c3.bot(), &m), m);
        assert!(c3.is_distributive());
    }

    #[test]
    fn two_maxima_have_no_join() {
        let err = build_lattice(&LatticeSpec::Finite {
            name: "V".into(),
            elements: vec!["0".into(), "a".into(), "b".into()],
            order: OrderSpec::Covers(vec![("0".into(), "a".into()), ("0".into(), "b".into())]),
            bot: None,
            top: None,
        })
        .unwrap_err();
        assert!(matches!(err, LatticeError::NoJoin(..)), "{err:?}");
    }

    #[test]
    fn cycle_is_not_a_poset() {
        let err = build_lattice(&LatticeSpec::Finite {
            name: "Cyc".into(),
            elements: vec!["a".into(), "b".into()],
            order: OrderSpec::Leq(vec![("a".into(), "b".into()), ("b".into(), "a".into())]),
            bot: None,
            top: None,
        })
        .unwrap_err();
        assert!(matches!(err, LatticeError::NotAPoset(_)));
    }

    #[test]
    fn leq_relation_must_be_transitive() {
        let err = build_lattice(&LatticeSpec::Finite {
            name: "T".into(),
            elements: vec!["a".into(), "b".into(), "c".into()],
            order: OrderSpec::Leq(vec![("a".into(), "b".into()), ("b".into(), "c".into())]),
            bot: None,
            top: None,
        })
        .unwrap_err();
        assert!(matches!(err, LatticeError::NotAPoset(_)));
    }

    #[test]
    fn declared_bot_must_be_least() {
        let err = build_lattice(&LatticeSpec::Finite {
            name: "C2".into(),
            elements: vec!["0".into(), "1".into()],
            order: OrderSpec::Covers(vec![("0".into(), "1".into())]),
            bot: Some("1".into()),
            top: None,
        })
        .unwrap_err();
        assert!(matches!(err, LatticeError::NoBotTop(_)));
    }

    #[test]
    fn m3_tables_match_brute_force() {
        let l = m3();
        let els = Lattice::elements(&l).unwrap();
        for a in &els {
            for b in &els {
                let j = l.join(a, b);
                let m = l.meet(a, b);
                assert!(l.leq(a, &j) && l.leq(b, &j));
                assert!(l.leq(&m, a) && l.leq(&m, b));
                for c in &els {
                    if l.leq(a, c) && l.leq(b, c) {
                        assert!(l.leq(&j, c));
                    }
                    if l.leq(c, a) && l.leq(c, b) {
                        assert!(l.leq(c, &m));
                    }
                }
            }
        }
    }

    #[test]
    fn distributivity() {
        assert!(!m3().is_distributive());
        assert!(CompleteLattice::omega().is_distributive());
        let a = m3().element("a").unwrap();
        let (b, c) = (m3().element("b").unwrap(), m3().element("c").unwrap());
        let l = m3();
        assert_eq!(l.meet(&a, &l.join(&b, &c)), a);
        assert_eq!(l.join(&l.meet(&a, &b), &l.meet(&a, &c)), l.bot());
    }

    #[test]
    fn omega_chain_operations() {
        let w = CompleteLattice::omega();
        assert_eq!(w.join(&Elem::nat(3), &Elem::OMEGA), Elem::OMEGA);
        assert_eq!(w.meet(&Elem::nat(3), &Elem::nat(5)), Elem::nat(3));
        assert_eq!(w.element("w"), Some(Elem::OMEGA));
        assert_eq!(w.element("7"), Some(Elem::nat(7)));
        assert_eq!(w.element_name(Elem::OMEGA), "w");
        assert_eq!(w.truncated_elements(2).len(), 4);
    }

    #[test]
    fn construction_is_deterministic() {
        let a = m3();
        let b = m3();
        assert_eq!(a, b);
        assert_eq!(a.covers(), b.covers());
        assert_eq!(a.element_names(), b.element_names());
    }
}
