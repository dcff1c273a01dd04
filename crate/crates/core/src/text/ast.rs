//! Unresolved declarations as they appear in a file.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

/// A name together with where it was written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FnLit {
    Named(Name),
    Inline(Vec<(Name, Name)>, Pos),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdealLit {
    Extensional(Vec<FnLit>),
    Ramp { region: Vec<Name>, ceiling: FnLit },
}

/// `slope=<0|1> offset=<int> cap=<elem> except{n->e …} at=<elem>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RampLit {
    pub slope: u8,
    pub offset: Option<i64>,
    pub cap: Name,
    pub exceptions: Vec<(u32, Name)>,
    pub at_omega: Option<Name>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KappaLit {
    Table(Vec<(Name, FnLit)>),
    Ramp(Vec<(Name, RampLit)>),
    Inclusion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BmapRule {
    Table(Vec<(Name, Name)>),
    Ramp(RampLit),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectLit {
    Identity,
    Image,
    Map(Name),
    Table(Vec<(Name, Name)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegLit {
    pub map: Name,
    pub bmap: Option<Name>,
    pub space: Name,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Lattice {
        name: Name,
        omega: bool,
        elements: Vec<Name>,
        covers: Vec<(Name, Name)>,
        bot: Option<Name>,
        top: Option<Name>,
    },
    Set {
        name: Name,
        points: Vec<Name>,
    },
    Map {
        name: Name,
        src: Name,
        dst: Name,
        pairs: Vec<(Name, Name)>,
    },
    Bmap {
        name: Name,
        src: Name,
        dst: Name,
        rule: BmapRule,
    },
    Fn {
        name: Name,
        values: Vec<(Name, Name)>,
    },
    Space {
        name: Name,
        ground: Option<Name>,
        basis: Option<Name>,
        ideal: Option<IdealLit>,
    },
    System {
        name: Name,
        ground: Option<Name>,
        basis: Option<Name>,
        bobj: Option<Name>,
        kappa: Option<KappaLit>,
    },
    Source {
        name: Name,
        apex: Option<Name>,
        basis: Option<Name>,
        legs: Vec<LegLit>,
    },
    Arrow {
        name: Name,
        src: Name,
        dst: Name,
        map: Name,
        bmap: Option<Name>,
    },
    Morphism {
        name: Name,
        src: Name,
        dst: Name,
        map: Name,
        bmap: Option<Name>,
        object: ObjectLit,
    },
}

impl Item {
    pub fn name(&self) -> &Name {
        match self {
            Item::Lattice { name, .. }
            | Item::Set { name, .. }
            | Item::Map { name, .. }
            | Item::Bmap { name, .. }
            | Item::Fn { name, .. }
            | Item::Space { name, .. }
            | Item::System { name, .. }
            | Item::Source { name, .. }
            | Item::Arrow { name, .. }
            | Item::Morphism { name, .. } => name,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Item::Lattice { .. } => "lattice",
            Item::Set { .. } => "set",
            Item::Map { .. } => "map",
            Item::Bmap { .. } => "bmap",
            Item::Fn { .. } => "fn",
            Item::Space { .. } => "space",
            Item::System { .. } => "system",
            Item::Source { .. } => "source",
            Item::Arrow { .. } => "arrow",
            Item::Morphism { .. } => "morphism",
        }
    }
}

pub const KEYWORDS: [&str; 10] = [
    "lattice", "set", "map", "bmap", "fn", "space", "system", "source", "arrow", "morphism",
];
