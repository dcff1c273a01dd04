//! Resolution of parsed declarations into lattices, maps, spaces and
//! systems. Every reference is checked here; semantic validation of spaces,
//! systems and morphisms is left to the checks that use them.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::TextError;
use crate::basis_map::{BasisMap, CapRamp, Tail};
use crate::ideal::IdealRepr;
use crate::lattice::{build_lattice, CompleteLattice, Elem, Lattice, LatticeSpec, OrderSpec};
use crate::lift::{Leg, StructuredSource};
use crate::powerset::{function_lattice, GroundMap, GroundSet, ImageOperator, LFunction};
use crate::space::{validate_space, BornSpace, SpaceMorphism};
use crate::system::{validate_system, BasisObject, BornSystem, ObjElem, ObjectMap, SystemError, SystemMorphism};

/// Named values in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Registry<T> {
    entries: Vec<(String, T)>,
}

impl<T> Default for Registry<T> {
    fn default() -> Self {
        Registry { entries: Vec::new() }
    }
}

impl<T> Registry<T> {
    pub fn get(&self, name: &str) -> Option<&T> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &T)> {
        self.entries.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn insert(&mut self, kind: &str, name: &Name, value: T) -> Result<(), TextError> {
        if self.get(&name.text).is_some() {
            return Err(TextError::DuplicateName {
                kind: kind.into(),
                name: name.text.clone(),
                line: name.pos.line,
                col: name.pos.col,
            });
        }
        self.entries.push((name.text.clone(), value));
        Ok(())
    }

    fn lookup(&self, kind: &str, name: &Name) -> Result<&T, TextError> {
        self.get(&name.text).ok_or_else(|| unresolved(kind, name))
    }
}

fn unresolved(kind: &str, name: &Name) -> TextError {
    TextError::UnresolvedReference {
        kind: kind.into(),
        name: name.text.clone(),
        line: name.pos.line,
        col: name.pos.col,
    }
}

fn invalid(pos: Pos, message: impl Into<String>) -> TextError {
    TextError::Invalid {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

/// The lattice description carried by a `lattice` item.
pub fn lattice_spec(item: &Item) -> Option<LatticeSpec> {
    let Item::Lattice {
        name,
        omega,
        elements,
        covers,
        bot,
        top,
    } = item
    else {
        return None;
    };
    Some(if *omega {
        LatticeSpec::Omega {
            name: name.text.clone(),
        }
    } else {
        LatticeSpec::Finite {
            name: name.text.clone(),
            elements: elements.iter().map(|e| e.text.clone()).collect(),
            order: OrderSpec::Covers(covers.iter().map(|(a, b)| (a.text.clone(), b.text.clone())).collect()),
            bot: bot.as_ref().map(|n| n.text.clone()),
            top: top.as_ref().map(|n| n.text.clone()),
        }
    })
}

fn missing(item: &Name, attr: &str) -> TextError {
    invalid(item.pos, format!("`{}` needs `{attr}`", item.text))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceDecl {
    pub ground: GroundSet,
    pub basis: CompleteLattice,
    pub bornology: IdealRepr<LFunction>,
}

impl SpaceDecl {
    pub fn validate(&self) -> Result<BornSpace, crate::space::SpaceError> {
        validate_space(&self.ground, &self.basis, self.bornology.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemDecl {
    pub ground: GroundSet,
    pub basis: CompleteLattice,
    /// Lattice or space name given as `bobj`.
    pub bobj_name: String,
    pub bobj: BasisObject,
    pub kappa: ObjectMap,
}

impl SystemDecl {
    pub fn validate(&self) -> Result<BornSystem, SystemError> {
        validate_system(&self.ground, self.kappa.clone(), self.bobj.clone(), &self.basis)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegDecl {
    pub map: String,
    pub bmap: Option<String>,
    pub space: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceDecl {
    pub apex: GroundSet,
    pub basis: CompleteLattice,
    pub legs: Vec<LegDecl>,
}

/// `<src> -> <dst> via <map> [<bmap>]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViaDecl {
    pub src: String,
    pub dst: String,
    pub map: String,
    pub bmap: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectSpec {
    Identity,
    Image,
    Map(String),
    Table(Vec<(String, String)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphismDecl {
    pub via: ViaDecl,
    pub object: ObjectSpec,
    pub object_map: ObjectMap,
}

/// Everything declared in a set of files.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Workspace {
    pub lattices: Registry<CompleteLattice>,
    pub sets: Registry<GroundSet>,
    pub maps: Registry<GroundMap>,
    pub bmaps: Registry<BasisMap>,
    pub fns: Registry<Vec<(String, String)>>,
    pub spaces: Registry<SpaceDecl>,
    pub systems: Registry<SystemDecl>,
    pub sources: Registry<SourceDecl>,
    pub arrows: Registry<ViaDecl>,
    pub morphisms: Registry<MorphismDecl>,
}

/// A failure to assemble a checked object from resolved declarations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct AssembleError(pub String);

fn elem(l: &CompleteLattice, n: &Name) -> Result<Elem, TextError> {
    l.element(&n.text)
        .ok_or_else(|| unresolved(&format!("element of {}", l.name()), n))
}

fn point(x: &GroundSet, n: &Name) -> Result<usize, TextError> {
    x.index_of(&n.text)
        .ok_or_else(|| unresolved(&format!("point of {}", x.name()), n))
}

impl Workspace {
    fn function(&self, ground: &GroundSet, basis: &CompleteLattice, lit: &FnLit) -> Result<LFunction, TextError> {
        let pairs = match lit {
            FnLit::Inline(p, _) => p.clone(),
            FnLit::Named(n) => {
                let raw = self.fns.lookup("fn", n)?;
                let pairs = raw
                    .iter()
                    .map(|(x, e)| {
                        (
                            Name {
                                text: x.clone(),
                                pos: n.pos,
                            },
                            Name {
                                text: e.clone(),
                                pos: n.pos,
                            },
                        )
                    })
                    .collect();
                pairs
            }
        };
        let mut values = vec![basis.bot(); ground.len()];
        let mut seen = BTreeSet::new();
        for (x, e) in &pairs {
            let i = point(ground, x)?;
            if !seen.insert(i) {
                return Err(invalid(x.pos, format!("point `{}` given twice", x.text)));
            }
            values[i] = elem(basis, e)?;
        }
        Ok(LFunction(values))
    }

    fn ramp(&self, src: &CompleteLattice, dst: &CompleteLattice, lit: &RampLit) -> Result<BasisMap, TextError> {
        if !src.is_omega() {
            return Err(invalid(
                lit.pos,
                format!("ramps need the ω-chain as source, not {}", src.name()),
            ));
        }
        let cap = elem(dst, &lit.cap)?;
        let tail = match (lit.slope, dst.is_omega()) {
            (0, _) if lit.offset.is_none() => Tail::Const(cap),
            (0, true) => Tail::Const(Elem::nat(0).shifted(lit.offset.unwrap_or(0)).min(cap)),
            (0, false) => return Err(invalid(lit.pos, "offsets need the ω-chain as target")),
            (_, true) => Tail::Shift {
                offset: lit.offset.unwrap_or(0),
                cap,
            },
            (_, false) => return Err(invalid(lit.pos, "slope 1 needs the ω-chain as target")),
        };
        let mut exceptions = BTreeMap::new();
        for (n, e) in &lit.exceptions {
            if exceptions.insert(*n, elem(dst, e)?).is_some() {
                return Err(invalid(e.pos, format!("exception at {n} given twice")));
            }
        }
        let at_omega = lit.at_omega.as_ref().map(|e| elem(dst, e)).transpose()?;
        BasisMap::ramp(
            src,
            dst,
            CapRamp {
                exceptions,
                tail,
                at_omega,
            },
        )
        .map_err(|e| invalid(lit.pos, e.to_string()))
    }

    fn add(&mut self, item: &Item) -> Result<(), TextError> {
        match item {
            Item::Lattice { name, .. } => {
                let spec = lattice_spec(item).expect("lattice item");
                let l = build_lattice(&spec).map_err(|e| invalid(name.pos, format!("lattice `{}`: {e}", name.text)))?;
                self.lattices.insert("lattice", name, l)
            }
            Item::Set { name, points } => {
                let x = GroundSet::try_new(&name.text, points.iter().map(|p| p.text.clone()).collect())
                    .map_err(|e| invalid(name.pos, e))?;
                self.sets.insert("set", name, x)
            }
            Item::Map { name, src, dst, pairs } => {
                let (x, y) = (self.sets.lookup("set", src)?, self.sets.lookup("set", dst)?);
                let mut table = vec![None; x.len()];
                for (a, b) in pairs {
                    let i = point(x, a)?;
                    if table[i].replace(point(y, b)?).is_some() {
                        return Err(invalid(a.pos, format!("point `{}` mapped twice", a.text)));
                    }
                }
                let table = table
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        t.ok_or_else(|| {
                            invalid(name.pos, format!("`{}` leaves `{}` unmapped", name.text, x.points()[i]))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let f = GroundMap::new(x, y, table).map_err(|e| invalid(name.pos, e))?;
                self.maps.insert("map", name, f)
            }
            Item::Bmap { name, src, dst, rule } => {
                let (l, m) = (
                    self.lattices.lookup("lattice", src)?,
                    self.lattices.lookup("lattice", dst)?,
                );
                let phi = match rule {
                    BmapRule::Table(pairs) => {
                        let n = l
                            .size()
                            .ok_or_else(|| invalid(name.pos, "tables need a finite source; use `ramp`"))?;
                        let mut values = vec![m.bot(); n];
                        for (a, b) in pairs {
                            values[elem(l, a)?.raw() as usize] = elem(m, b)?;
                        }
                        BasisMap::table(l, m, values).map_err(|e| invalid(name.pos, e.to_string()))?
                    }
                    BmapRule::Ramp(r) => self.ramp(l, m, r)?,
                };
                self.bmaps.insert("bmap", name, phi)
            }
            Item::Fn { name, values } => {
                let raw = values.iter().map(|(x, e)| (x.text.clone(), e.text.clone())).collect();
                self.fns.insert("fn", name, raw)
            }
            Item::Space {
                name,
                ground,
                basis,
                ideal,
            } => {
                let x = self
                    .sets
                    .lookup("set", ground.as_ref().ok_or_else(|| missing(name, "ground"))?)?;
                let l = self
                    .lattices
                    .lookup("lattice", basis.as_ref().ok_or_else(|| missing(name, "basis"))?)?;
                let bornology = match ideal.as_ref().ok_or_else(|| missing(name, "ideal"))? {
                    IdealLit::Extensional(members) => IdealRepr::Extensional(
                        members
                            .iter()
                            .map(|m| self.function(x, l, m))
                            .collect::<Result<BTreeSet<_>, _>>()?,
                    ),
                    IdealLit::Ramp { region, ceiling } => IdealRepr::Ramp {
                        region: region.iter().map(|p| point(x, p)).collect::<Result<_, _>>()?,
                        ceiling: self.function(x, l, ceiling)?,
                    },
                };
                let decl = SpaceDecl {
                    ground: x.clone(),
                    basis: l.clone(),
                    bornology,
                };
                self.spaces.insert("space", name, decl)
            }
            Item::System {
                name,
                ground,
                basis,
                bobj,
                kappa,
            } => {
                let x = self
                    .sets
                    .lookup("set", ground.as_ref().ok_or_else(|| missing(name, "ground"))?)?
                    .clone();
                let l = self
                    .lattices
                    .lookup("lattice", basis.as_ref().ok_or_else(|| missing(name, "basis"))?)?
                    .clone();
                let bname = bobj.as_ref().ok_or_else(|| missing(name, "bobj"))?;
                let (b_lattice, b) = if let Some(bl) = self.lattices.get(&bname.text) {
                    (Some(bl.clone()), BasisObject::from_lattice(bl))
                } else if let Some(sp) = self.spaces.get(&bname.text) {
                    let born = sp
                        .validate()
                        .map_err(|e| invalid(bname.pos, format!("space `{}` as an object: {e}", bname.text)))?;
                    (None, BasisObject::Bornology(born.bornology().clone()))
                } else {
                    return Err(unresolved("lattice or space", bname));
                };
                let kappa = match kappa.as_ref().ok_or_else(|| missing(name, "kappa"))? {
                    KappaLit::Table(rows) => {
                        let bl = match (&b_lattice, &b) {
                            (Some(bl), BasisObject::Algebra(_)) => bl,
                            _ => return Err(invalid(bname.pos, "a kappa table needs a finite lattice as `bobj`")),
                        };
                        let mut values: Vec<Option<LFunction>> = vec![None; bl.size().expect("finite")];
                        for (e, lit) in rows {
                            let i = elem(bl, e)?.raw() as usize;
                            if values[i].replace(self.function(&x, &l, lit)?).is_some() {
                                return Err(invalid(e.pos, format!("kappa gives `{}` twice", e.text)));
                            }
                        }
                        let bot = bl.bot().raw() as usize;
                        if values[bot].is_none() {
                            values[bot] = Some(function_lattice(&l, &x).bot());
                        }
                        let table = values
                            .into_iter()
                            .enumerate()
                            .map(|(i, v)| {
                                let e = Elem::index(i);
                                v.map(|f| (ObjElem::Basis(e), ObjElem::Function(f)))
                                    .ok_or_else(|| invalid(name.pos, format!("kappa misses `{}`", bl.element_name(e))))
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        ObjectMap::Table(table)
                    }
                    KappaLit::Ramp(rows) => {
                        let bl = match (&b_lattice, &b) {
                            (Some(bl), BasisObject::Naturals) => bl,
                            _ => return Err(invalid(bname.pos, "a kappa ramp needs an omega lattice as `bobj`")),
                        };
                        let mut coords: Vec<Option<BasisMap>> = vec![None; x.len()];
                        for (p, lit) in rows {
                            let i = point(&x, p)?;
                            if coords[i].replace(self.ramp(bl, &l, lit)?).is_some() {
                                return Err(invalid(p.pos, format!("kappa gives `{}` twice", p.text)));
                            }
                        }
                        let coords = coords
                            .into_iter()
                            .enumerate()
                            .map(|(i, c)| {
                                c.ok_or_else(|| invalid(name.pos, format!("kappa misses point `{}`", x.points()[i])))
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        ObjectMap::Coordinates(coords)
                    }
                    KappaLit::Inclusion => {
                        if b_lattice.is_some() {
                            return Err(invalid(bname.pos, "`kappa inclusion` needs a space as `bobj`"));
                        }
                        ObjectMap::Identity
                    }
                };
                let decl = SystemDecl {
                    ground: x,
                    basis: l,
                    bobj_name: bname.text.clone(),
                    bobj: b,
                    kappa,
                };
                self.systems.insert("system", name, decl)
            }
            Item::Source {
                name,
                apex,
                basis,
                legs,
            } => {
                let x = self
                    .sets
                    .lookup("set", apex.as_ref().ok_or_else(|| missing(name, "apex"))?)?
                    .clone();
                let l = self
                    .lattices
                    .lookup("lattice", basis.as_ref().ok_or_else(|| missing(name, "basis"))?)?
                    .clone();
                let mut out = Vec::new();
                for leg in legs {
                    self.maps.lookup("map", &leg.map)?;
                    if let Some(b) = &leg.bmap {
                        self.bmaps.lookup("bmap", b)?;
                    }
                    self.spaces.lookup("space", &leg.space)?;
                    out.push(LegDecl {
                        map: leg.map.text.clone(),
                        bmap: leg.bmap.as_ref().map(|b| b.text.clone()),
                        space: leg.space.text.clone(),
                    });
                }
                let decl = SourceDecl {
                    apex: x,
                    basis: l,
                    legs: out,
                };
                self.sources.insert("source", name, decl)
            }
            Item::Arrow {
                name,
                src,
                dst,
                map,
                bmap,
            } => {
                self.spaces.lookup("space", src)?;
                self.spaces.lookup("space", dst)?;
                let decl = self.via(src, dst, map, bmap)?;
                self.arrows.insert("arrow", name, decl)
            }
            Item::Morphism {
                name,
                src,
                dst,
                map,
                bmap,
                object,
            } => {
                let s1 = self.systems.lookup("system", src)?.clone();
                let s2 = self.systems.lookup("system", dst)?.clone();
                let via = self.via(src, dst, map, bmap)?;
                let (object, object_map) = match object {
                    ObjectLit::Identity => (ObjectSpec::Identity, ObjectMap::Identity),
                    ObjectLit::Image => {
                        let f = self.maps.get(map.text.as_str()).expect("checked").clone();
                        let psi = self.theory_map(&via, &s1.basis)?;
                        (
                            ObjectSpec::Image,
                            s1.kappa.then(&ObjectMap::Image(ImageOperator::new(&f, &psi))),
                        )
                    }
                    ObjectLit::Map(n) => {
                        let phi = self.bmaps.lookup("bmap", n)?.clone();
                        (ObjectSpec::Map(n.text.clone()), ObjectMap::Basis(phi))
                    }
                    ObjectLit::Table(pairs) => {
                        let lookup = |decl: &SystemDecl, n: &Name| -> Result<ObjElem, TextError> {
                            match self.lattices.get(&decl.bobj_name) {
                                Some(bl) if !matches!(decl.bobj, BasisObject::Bornology(_)) => {
                                    Ok(ObjElem::Basis(elem(bl, n)?))
                                }
                                _ => Err(invalid(n.pos, "object tables need lattice objects")),
                            }
                        };
                        let mut table = Vec::new();
                        for (a, b) in pairs {
                            table.push((lookup(&s1, a)?, lookup(&s2, b)?));
                        }
                        (
                            ObjectSpec::Table(pairs.iter().map(|(a, b)| (a.text.clone(), b.text.clone())).collect()),
                            ObjectMap::Table(table),
                        )
                    }
                };
                self.morphisms.insert(
                    "morphism",
                    name,
                    MorphismDecl {
                        via,
                        object,
                        object_map,
                    },
                )
            }
        }
    }

    fn via(&self, src: &Name, dst: &Name, map: &Name, bmap: &Option<Name>) -> Result<ViaDecl, TextError> {
        self.maps.lookup("map", map)?;
        if let Some(b) = bmap {
            self.bmaps.lookup("bmap", b)?;
        }
        Ok(ViaDecl {
            src: src.text.clone(),
            dst: dst.text.clone(),
            map: map.text.clone(),
            bmap: bmap.as_ref().map(|b| b.text.clone()),
        })
    }

    fn theory_map(&self, via: &ViaDecl, basis: &CompleteLattice) -> Result<BasisMap, TextError> {
        Ok(match &via.bmap {
            Some(b) => self.bmaps.get(b).expect("checked").clone(),
            None => BasisMap::identity(basis),
        })
    }

    /// Resolves items from several files; kinds resolve in dependency order
    /// so declarations may appear in any order.
    pub fn resolve(files: &[(String, Vec<Item>)]) -> Result<Workspace, (String, TextError)> {
        let mut ws = Workspace::default();
        for kw in KEYWORDS {
            for (file, items) in files {
                for it in items.iter().filter(|i| i.keyword() == kw) {
                    ws.add(it).map_err(|e| (file.clone(), e))?;
                }
            }
        }
        Ok(ws)
    }

    pub fn space(&self, name: &str) -> Result<BornSpace, AssembleError> {
        let decl = self
            .spaces
            .get(name)
            .ok_or_else(|| AssembleError(format!("no space `{name}`")))?;
        decl.validate()
            .map_err(|e| AssembleError(format!("space `{name}`: {e}")))
    }

    pub fn system(&self, name: &str) -> Result<BornSystem, AssembleError> {
        let decl = self
            .systems
            .get(name)
            .ok_or_else(|| AssembleError(format!("no system `{name}`")))?;
        decl.validate()
            .map_err(|e| AssembleError(format!("system `{name}`: {e}")))
    }

    fn ground_map(&self, name: &str) -> GroundMap {
        self.maps.get(name).expect("resolved").clone()
    }

    pub fn source(&self, name: &str) -> Result<StructuredSource, AssembleError> {
        let decl = self
            .sources
            .get(name)
            .ok_or_else(|| AssembleError(format!("no source `{name}`")))?;
        let mut legs = Vec::new();
        for leg in &decl.legs {
            let sp = self.space(&leg.space)?;
            let psi = match &leg.bmap {
                Some(b) => self.bmaps.get(b).expect("resolved").clone(),
                None => BasisMap::identity(sp.basis()),
            };
            legs.push(Leg::new(&self.ground_map(&leg.map), &psi, &sp));
        }
        StructuredSource::new(&decl.apex, &decl.basis, legs).map_err(|e| AssembleError(format!("source `{name}`: {e}")))
    }

    /// The spaces and maps of an arrow, without checking boundedness.
    pub fn arrow_parts(&self, name: &str) -> Result<(BornSpace, BornSpace, GroundMap, BasisMap), AssembleError> {
        let decl = self
            .arrows
            .get(name)
            .ok_or_else(|| AssembleError(format!("no arrow `{name}`")))?;
        let (s, d) = (self.space(&decl.src)?, self.space(&decl.dst)?);
        let psi = self.theory_map(decl, s.basis()).expect("resolved");
        Ok((s, d, self.ground_map(&decl.map), psi))
    }

    pub fn arrow(&self, name: &str) -> Result<SpaceMorphism, AssembleError> {
        let (s, d, f, psi) = self.arrow_parts(name)?;
        SpaceMorphism::new(&s, &d, &f, &psi).map_err(|e| AssembleError(format!("arrow `{name}`: {e}")))
    }

    /// The morphism as declared, without checking the square.
    pub fn morphism_unchecked(&self, name: &str) -> Result<SystemMorphism, AssembleError> {
        let decl = self
            .morphisms
            .get(name)
            .ok_or_else(|| AssembleError(format!("no morphism `{name}`")))?;
        let (s, d) = (self.system(&decl.via.src)?, self.system(&decl.via.dst)?);
        let psi = self.theory_map(&decl.via, s.basis()).expect("resolved");
        Ok(SystemMorphism::unchecked(
            &s,
            &d,
            &self.ground_map(&decl.via.map),
            decl.object_map.clone(),
            &psi,
        ))
    }

    pub fn morphism(&self, name: &str) -> Result<SystemMorphism, AssembleError> {
        let m = self.morphism_unchecked(name)?;
        SystemMorphism::new(m.src(), m.dst(), m.ground_map(), m.object_map().clone(), m.theory_map())
            .map_err(|e| AssembleError(format!("morphism `{name}`: {e}")))
    }

    /// Name of a declared lattice equal to `l`.
    pub fn lattice_name(&self, l: &CompleteLattice) -> Option<&str> {
        self.lattices.iter().find(|(_, v)| *v == l).map(|(n, _)| n)
    }
}
