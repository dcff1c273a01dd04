//! Finite ground sets, function lattices `L^X`, and the covariant
//! lattice-valued image operators with their right adjoints.
//!
//! For a ground map `f: X → Y` and a join-preserving basis map `φ: L → M`,
//! the image operator sends `α ∈ L^X` to
//!
//! ```text
//! T(f, φ)(α)(y) = ⋁ { φ(α(x)) | f(x) = y }
//! ```
//!
//! and its right adjoint is `β ↦ φ⊢ ∘ β ∘ f`. The fixed-basis operator is
//! the case `φ = id`; with `L = 2` it is the classical direct image of sets.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::basis_map::{BasisMap, MapError, Op, OpSignature};
use crate::lattice::{CompleteLattice, Elem, Lattice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PowersetError {
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("basis map does not preserve joins, so it has no right adjoint")]
    NotJoinPreserving,
    #[error("unsupported reduct {0}")]
    UnsupportedReduct(String),
    #[error("unsupported composition: {0}")]
    UnsupportedComposition(String),
}

impl From<MapError> for PowersetError {
    fn from(e: MapError) -> Self {
        match e {
            MapError::NotJoinPreserving => PowersetError::NotJoinPreserving,
            other => PowersetError::UnsupportedComposition(other.to_string()),
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
struct GroundInner {
    name: String,
    points: Vec<String>,
}

/// A finite ground set with named points in declaration order.
#[derive(Clone, PartialEq, Eq)]
pub struct GroundSet(Arc<GroundInner>);

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.0.name, self.0.points.join(","))
    }
}

impl GroundSet {
    /// Panics on duplicate point names; use [`GroundSet::try_new`] for input.
    pub fn new(name: &str, points: &[&str]) -> Self {
        Self::try_new(name, points.iter().map(|s| s.to_string()).collect()).expect("unique point names")
    }

    pub fn try_new(name: &str, points: Vec<String>) -> Result<Self, String> {
        if let Some(dup) = points.iter().duplicates().next() {
            return Err(format!("duplicate point `{dup}` in `{name}`"));
        }
        Ok(GroundSet(Arc::new(GroundInner {
            name: name.to_string(),
            points,
        })))
    }

    /// `{p0, …, p(n-1)}` named `name`.
    pub fn numbered(name: &str, prefix: &str, n: usize) -> Self {
        Self::try_new(name, (0..n).map(|i| format!("{prefix}{i}")).collect()).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn len(&self) -> usize {
        self.0.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.0.points
    }

    pub fn index_of(&self, point: &str) -> Option<usize> {
        self.0.points.iter().position(|p| p == point)
    }
}

/// A total map between ground sets, as a table of target indices.
#[derive(Clone, PartialEq, Eq)]
pub struct GroundMap {
    src: GroundSet,
    dst: GroundSet,
    table: Vec<usize>,
}

impl fmt::Debug for GroundMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = self
            .table
            .iter()
            .enumerate()
            .map(|(i, j)| format!("{}->{}", self.src.points()[i], self.dst.points()[*j]))
            .join(" ");
        write!(f, "{} -> {} {{ {} }}", self.src.name(), self.dst.name(), pairs)
    }
}

impl GroundMap {
    pub fn new(src: &GroundSet, dst: &GroundSet, table: Vec<usize>) -> Result<Self, String> {
        if table.len() != src.len() {
            return Err(format!(
                "map from `{}` needs {} entries, got {}",
                src.name(),
                src.len(),
                table.len()
            ));
        }
        if table.iter().any(|&j| j >= dst.len()) {
            return Err(format!("map into `{}` has an out-of-range target", dst.name()));
        }
        Ok(GroundMap {
            src: src.clone(),
            dst: dst.clone(),
            table,
        })
    }

    pub fn identity(x: &GroundSet) -> Self {
        GroundMap {
            src: x.clone(),
            dst: x.clone(),
            table: (0..x.len()).collect(),
        }
    }

    /// The map sending every point to `target`.
    pub fn constant(src: &GroundSet, dst: &GroundSet, target: usize) -> Self {
        Self::new(src, dst, vec![target; src.len()]).expect("target in range")
    }

    /// Every map `src → dst`, lexicographic in the table.
    pub fn all(src: &GroundSet, dst: &GroundSet) -> Vec<GroundMap> {
        if src.is_empty() {
            return vec![GroundMap::new(src, dst, Vec::new()).unwrap()];
        }
        std::iter::repeat_n(0..dst.len(), src.len())
            .multi_cartesian_product()
            .map(|table| GroundMap {
                src: src.clone(),
                dst: dst.clone(),
                table,
            })
            .collect()
    }

    pub fn src(&self) -> &GroundSet {
        &self.src
    }

    pub fn dst(&self) -> &GroundSet {
        &self.dst
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GroundMap) -> Result<GroundMap, String> {
        if self.dst != next.src {
            return Err(format!(
                "cannot compose a map into `{}` with a map out of `{}`",
                self.dst.name(),
                next.src.name()
            ));
        }
        Ok(GroundMap {
            src: self.src.clone(),
            dst: next.dst.clone(),
            table: self.table.iter().map(|&j| next.table[j]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.dst && self.table.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// An element `α ∈ L^X`: one basis value per ground point, compared pointwise.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LFunction(pub Vec<Elem>);

impl fmt::Debug for LFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl LFunction {
    pub fn constant(value: Elem, len: usize) -> Self {
        LFunction(vec![value; len])
    }

    pub fn values(&self) -> &[Elem] {
        &self.0
    }

    pub fn at(&self, i: usize) -> Elem {
        self.0[i]
    }
}

/// The function lattice `L^X` with the pointwise order.
#[derive(Clone, PartialEq, Eq)]
pub struct FunctionLattice {
    basis: CompleteLattice,
    ground: GroundSet,
}

impl fmt::Debug for FunctionLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.basis.name(), self.ground.name())
    }
}

/// Materializes `L^X`. Operations are pointwise; nothing is enumerated.
pub fn function_lattice(basis: &CompleteLattice, ground: &GroundSet) -> FunctionLattice {
    FunctionLattice {
        basis: basis.clone(),
        ground: ground.clone(),
    }
}

impl FunctionLattice {
    pub fn basis(&self) -> &CompleteLattice {
        &self.basis
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    /// Builds an element from named basis values, one per point in order.
    pub fn function(&self, values: &[&str]) -> Option<LFunction> {
        if values.len() != self.ground.len() {
            return None;
        }
        values
            .iter()
            .map(|v| self.basis.element(v))
            .collect::<Option<Vec<_>>>()
            .map(LFunction)
    }

    /// True when `alpha` has the right length and basis values.
    pub fn owns(&self, alpha: &LFunction) -> bool {
        alpha.0.len() == self.ground.len() && alpha.0.iter().all(|v| self.basis.contains(*v))
    }

    fn product(&self, values: Vec<Elem>) -> Vec<LFunction> {
        if self.ground.is_empty() {
            return vec![LFunction(Vec::new())];
        }
        std::iter::repeat_n(values, self.ground.len())
            .multi_cartesian_product()
            .map(LFunction)
            .collect()
    }

    /// Number of elements when finite.
    pub fn size(&self) -> Option<usize> {
        self.basis.size().map(|n| n.pow(self.ground.len() as u32))
    }
}

impl Lattice for FunctionLattice {
    type Elem = LFunction;

    fn leq(&self, a: &LFunction, b: &LFunction) -> bool {
        a.0.iter().zip(&b.0).all(|(x, y)| self.basis.leq(x, y))
    }

    fn meet(&self, a: &LFunction, b: &LFunction) -> LFunction {
        LFunction(a.0.iter().zip(&b.0).map(|(x, y)| self.basis.meet(x, y)).collect())
    }

    fn join(&self, a: &LFunction, b: &LFunction) -> LFunction {
        LFunction(a.0.iter().zip(&b.0).map(|(x, y)| self.basis.join(x, y)).collect())
    }

    fn bot(&self) -> LFunction {
        LFunction::constant(self.basis.bot(), self.ground.len())
    }

    fn top(&self) -> LFunction {
        LFunction::constant(self.basis.top(), self.ground.len())
    }

    fn elements(&self) -> Option<Vec<LFunction>> {
        Lattice::elements(&self.basis).map(|vals| self.product(vals))
    }

    fn truncated_elements(&self, level: u32) -> Vec<LFunction> {
        self.product(self.basis.truncated_elements(level))
    }

    fn coordinates(&self, a: &LFunction) -> Vec<Elem> {
        a.0.clone()
    }

    fn of_coordinates(&self, coords: Vec<Elem>) -> LFunction {
        LFunction(coords)
    }

    fn coordinate_label(&self, i: usize) -> String {
        self.ground.points()[i].clone()
    }

    fn dimension(&self) -> usize {
        self.ground.len()
    }

    fn omega_based(&self) -> bool {
        self.basis.is_omega()
    }

    fn render(&self, a: &LFunction) -> String {
        let body = self
            .ground
            .points()
            .iter()
            .zip(&a.0)
            .map(|(p, v)| format!("{p}={}", self.basis.element_name(*v)))
            .join(" ");
        format!("{{{body}}}")
    }
}

/// The image operator `T(f, φ): L^X → M^Y` with its right adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageOperator {
    ground: GroundMap,
    basis: BasisMap,
    adjoint: Option<BasisMap>,
    src: FunctionLattice,
    dst: FunctionLattice,
}

impl ImageOperator {
    pub fn new(ground: &GroundMap, basis: &BasisMap) -> Self {
        ImageOperator {
            ground: ground.clone(),
            basis: basis.clone(),
            adjoint: basis.right_adjoint().ok(),
            src: function_lattice(basis.src(), ground.src()),
            dst: function_lattice(basis.dst(), ground.dst()),
        }
    }

    /// Fixed-basis operator `T(f, id)`.
    pub fn fixed(ground: &GroundMap, basis: &CompleteLattice) -> Self {
        Self::new(ground, &BasisMap::identity(basis))
    }

    pub fn ground_map(&self) -> &GroundMap {
        &self.ground
    }

    pub fn basis_map(&self) -> &BasisMap {
        &self.basis
    }

    pub fn src(&self) -> &FunctionLattice {
        &self.src
    }

    pub fn dst(&self) -> &FunctionLattice {
        &self.dst
    }

    /// `φ⊢`, when `φ` preserves joins.
    pub fn basis_adjoint(&self) -> Option<&BasisMap> {
        self.adjoint.as_ref()
    }

    pub fn apply(&self, alpha: &LFunction) -> LFunction {
        image_values(&self.ground, &self.basis, alpha)
    }

    /// `β ↦ φ⊢ ∘ β ∘ f`.
    pub fn adjoint_apply(&self, beta: &LFunction) -> Result<LFunction, PowersetError> {
        let adj = self.adjoint.as_ref().ok_or(PowersetError::NotJoinPreserving)?;
        Ok(LFunction(
            self.ground.table().iter().map(|&y| adj.apply(beta.0[y])).collect(),
        ))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ImageOperator) -> Result<ImageOperator, PowersetError> {
        let ground = self
            .ground
            .then(&next.ground)
            .map_err(PowersetError::UnsupportedComposition)?;
        let basis = self.basis.then(&next.basis)?;
        Ok(ImageOperator::new(&ground, &basis))
    }
}

/// `T(f, φ)(α)`.
pub fn forward_image(f: &GroundMap, phi: &BasisMap, alpha: &LFunction) -> Result<LFunction, PowersetError> {
    let dom = function_lattice(phi.src(), f.src());
    if !dom.owns(alpha) {
        return Err(PowersetError::BasisMismatch(format!(
            "{alpha:?} is not an element of {dom:?}"
        )));
    }
    Ok(image_values(f, phi, alpha))
}

fn image_values(f: &GroundMap, phi: &BasisMap, alpha: &LFunction) -> LFunction {
    let dst = phi.dst();
    let mut out = vec![dst.bot(); f.dst().len()];
    for (x, &y) in f.table().iter().enumerate() {
        out[y] = dst.join(&out[y], &phi.apply(alpha.0[x]));
    }
    LFunction(out)
}

/// `T(f, φ)⊢(β) = φ⊢ ∘ β ∘ f`.
pub fn forward_right_adjoint(f: &GroundMap, phi: &BasisMap, beta: &LFunction) -> Result<LFunction, PowersetError> {
    let cod = function_lattice(phi.dst(), f.dst());
    if !cod.owns(beta) {
        return Err(PowersetError::BasisMismatch(format!(
            "{beta:?} is not an element of {cod:?}"
        )));
    }
    ImageOperator::new(f, phi).adjoint_apply(beta)
}

/// Which known theory a basis instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoryKind {
    /// `L = 2`: bornologies are ideals of subsets.
    Classical,
    /// A finite basis lattice.
    FixedBasis,
    /// The ω-chain basis, the only one with non-principal bornologies.
    Omega,
}

/// A bornological theory: the image-operator functor over a basis lattice,
/// read in the reduct of lattices with bottom.
#[derive(Debug, Clone)]
pub struct BornologicalTheory {
    basis: CompleteLattice,
    signature: OpSignature,
}

/// Bundles `L^(-)` and the image operators for the `Lat⊥` reduct.
pub fn bornological_theory(basis: &CompleteLattice, sig: OpSignature) -> Result<BornologicalTheory, PowersetError> {
    let lat_bot = OpSignature::new(&[Op::BinMeet, Op::BinJoin, Op::Bot]);
    if sig != lat_bot {
        return Err(PowersetError::UnsupportedReduct(format!("{sig:?}")));
    }
    Ok(BornologicalTheory {
        basis: basis.clone(),
        signature: sig,
    })
}

impl BornologicalTheory {
    pub fn basis(&self) -> &CompleteLattice {
        &self.basis
    }

    pub fn signature(&self) -> OpSignature {
        self.signature
    }

    pub fn kind(&self) -> TheoryKind {
        match self.basis.size() {
            None => TheoryKind::Omega,
            Some(2) => TheoryKind::Classical,
            Some(_) => TheoryKind::FixedBasis,
        }
    }

    pub fn carrier(&self, x: &GroundSet) -> FunctionLattice {
        function_lattice(&self.basis, x)
    }

    pub fn image(&self, f: &GroundMap) -> ImageOperator {
        ImageOperator::fixed(f, &self.basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis_map::{CapRamp, Tail};

    fn m3() -> CompleteLattice {
        CompleteLattice::from_covers(
            "M3",
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
        )
    }

    #[test]
    fn boolean_square() {
        let two = CompleteLattice::chain("2", &["0", "1"]);
        let x = GroundSet::new("X", &["x", "y"]);
        let l = function_lattice(&two, &x);
        assert_eq!(Lattice::elements(&l).unwrap().len(), 4);
        assert!(!l.omega_based());
    }

    #[test]
    fn one_coordinate_is_the_basis() {
        let c3 = CompleteLattice::chain("C3", &["0", "m", "1"]);
        let l = function_lattice(&c3, &GroundSet::new("X", &["x"]));
        let els = Lattice::elements(&l).unwrap();
        assert_eq!(els.len(), 3);
        for a in &els {
            for b in &els {
                assert_eq!(l.leq(a, b), c3.leq(&a.0[0], &b.0[0]));
            }
        }
    }

    #[test]
    fn omega_function_lattice_sup_is_not_attained() {
        let w = CompleteLattice::omega();
        let l = function_lattice(&w, &GroundSet::new("X", &["x", "y"]));
        let finite: Vec<_> = l
            .truncated_elements(5)
            .into_iter()
            .filter(|a| a.0.iter().all(|v| !v.is_omega()))
            .collect();
        let sup = l.join_all(&finite);
        assert_ne!(sup, l.top());
        assert_eq!(sup, LFunction(vec![Elem::nat(5), Elem::nat(5)]));
    }

    #[test]
    fn image_merges_into_join() {
        let l = m3();
        let x = GroundSet::new("X", &["x1", "x2"]);
        let y = GroundSet::new("Y", &["y1", "y2"]);
        let f = GroundMap::constant(&x, &y, 0);
        let alpha = function_lattice(&l, &x).function(&["a", "b"]).unwrap();
        let beta = forward_image(&f, &BasisMap::identity(&l), &alpha).unwrap();
        assert_eq!(beta, function_lattice(&l, &y).function(&["1", "0"]).unwrap());
    }

    #[test]
    fn classical_image_is_direct_image() {
        let two = CompleteLattice::chain("2", &["0", "1"]);
        let x = GroundSet::new("X", &["a", "b", "c"]);
        let y = GroundSet::new("Y", &["p", "q"]);
        let id = BasisMap::identity(&two);
        for f in GroundMap::all(&x, &y) {
            for mask in 0u32..8 {
                let alpha = LFunction((0..3).map(|i| Elem::index((mask >> i & 1) as usize)).collect());
                let beta = forward_image(&f, &id, &alpha).unwrap();
                for q in 0..2 {
                    let hit = (0..3).any(|i| mask >> i & 1 == 1 && f.apply(i) == q);
                    assert_eq!(beta.0[q] == two.top(), hit);
                }
            }
        }
    }

    #[test]
    fn adjoint_reads_through_f() {
        let c3 = CompleteLattice::chain("C3", &["0", "m", "1"]);
        let x = GroundSet::new("X", &["x1", "x2"]);
        let y = GroundSet::new("Y", &["y1", "y2"]);
        let f = GroundMap::constant(&x, &y, 0);
        let beta = function_lattice(&c3, &y).function(&["m", "1"]).unwrap();
        let alpha = forward_right_adjoint(&f, &BasisMap::identity(&c3), &beta).unwrap();
        assert_eq!(alpha, function_lattice(&c3, &x).function(&["m", "m"]).unwrap());
    }

    #[test]
    fn adjoint_through_collapse() {
        let w = CompleteLattice::omega();
        let two = CompleteLattice::chain("2", &["0", "1"]);
        let collapse = BasisMap::ramp(
            &w,
            &two,
            CapRamp {
                exceptions: [(0, two.bot())].into(),
                tail: Tail::Const(two.top()),
                at_omega: None,
            },
        )
        .unwrap();
        let x = GroundSet::new("X", &["x1", "x2"]);
        let y = GroundSet::new("Y", &["y1", "y2"]);
        let f = GroundMap::new(&x, &y, vec![0, 1]).unwrap();
        let beta = function_lattice(&two, &y).function(&["1", "0"]).unwrap();
        let alpha = forward_right_adjoint(&f, &collapse, &beta).unwrap();
        assert_eq!(alpha, LFunction(vec![Elem::OMEGA, Elem::nat(0)]));
    }

    #[test]
    fn basis_mismatch_detected() {
        let c3 = CompleteLattice::chain("C3", &["0", "m", "1"]);
        let x = GroundSet::new("X", &["x"]);
        let f = GroundMap::identity(&x);
        let err = forward_image(&f, &BasisMap::identity(&c3), &LFunction(vec![Elem::index(7)]));
        assert!(matches!(err, Err(PowersetError::BasisMismatch(_))));
        let err = forward_image(&f, &BasisMap::identity(&c3), &LFunction(vec![]));
        assert!(matches!(err, Err(PowersetError::BasisMismatch(_))));
    }

    #[test]
    fn theory_handles() {
        let two = CompleteLattice::chain("2", &["0", "1"]);
        let t = bornological_theory(&two, OpSignature::LAT_BOT).unwrap();
        assert_eq!(t.kind(), TheoryKind::Classical);
        let t = bornological_theory(&m3(), OpSignature::LAT_BOT).unwrap();
        assert_eq!(t.kind(), TheoryKind::FixedBasis);
        let t = bornological_theory(&CompleteLattice::omega(), OpSignature::LAT_BOT).unwrap();
        assert_eq!(t.kind(), TheoryKind::Omega);
        assert!(matches!(
            bornological_theory(&two, OpSignature::CLAT),
            Err(PowersetError::UnsupportedReduct(_))
        ));
    }

    #[test]
    fn empty_ground_set_gives_one_point_lattice() {
        let c3 = CompleteLattice::chain("C3", &["0", "m", "1"]);
        let l = function_lattice(&c3, &GroundSet::new("E", &[]));
        assert_eq!(Lattice::elements(&l).unwrap().len(), 1);
        assert_eq!(l.bot(), l.top());
    }
}
