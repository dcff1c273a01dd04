//! The plain-text fixture format: lexing, parsing, name resolution and the
//! canonical serializer.

pub mod ast;
mod lexer;
mod parser;
mod serialize;
mod workspace;

use thiserror::Error;

pub use parser::parse_items;
pub use serialize::{bmap_body, function_text, ideal_text, ramp_text, serialize};
pub use workspace::{
    lattice_spec, AssembleError, LegDecl, MorphismDecl, ObjectSpec, Registry, SourceDecl, SpaceDecl, SystemDecl,
    ViaDecl, Workspace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn at(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}, column {col}: duplicate {kind} `{name}`")]
    DuplicateName {
        kind: String,
        name: String,
        line: usize,
        col: usize,
    },
    #[error("line {line}, column {col}: unresolved {kind} `{name}`")]
    UnresolvedReference {
        kind: String,
        name: String,
        line: usize,
        col: usize,
    },
    #[error("line {line}, column {col}: {message}")]
    Invalid { line: usize, col: usize, message: String },
}

/// A [`TextError`] with the file it came from.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}: {error}")]
pub struct LoadError {
    pub file: String,
    pub error: TextError,
}

/// Parses and resolves one text.
pub fn parse(src: &str) -> Result<Workspace, TextError> {
    let items = parse_items(src)?;
    Workspace::resolve(&[(String::new(), items)]).map_err(|(_, e)| e)
}

/// Parses and resolves several named texts into one workspace.
pub fn parse_files(files: &[(String, String)]) -> Result<Workspace, LoadError> {
    let mut parsed = Vec::new();
    for (file, src) in files {
        let items = parse_items(src).map_err(|e| LoadError {
            file: file.clone(),
            error: e.into(),
        })?;
        parsed.push((file.clone(), items));
    }
    Workspace::resolve(&parsed).map_err(|(file, error)| LoadError { file, error })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
lattice C3 finite
  elements 0 m 1
  cover 0 m
  cover m 1
lattice W omega
lattice 2 finite
  elements 0 1
  cover 0 1
set X { x y }
set P { p }
map fold : X -> X { x -> y, y -> x }
bmap low : 2 -> C3 { 1 -> m }
bmap shift : W -> W ramp slope=1 offset=2 cap=w except{0 -> 0}
fn top { x=1 y=1 }
fn zero { x=0 y=0 }
space Full
  ground X
  basis 2
  ideal extensional zero {x=1 y=0} {x=0 y=1} top
space Half
  ground X
  basis W
  ideal ramp region={y} ceiling={x=w y=w}
system Two
  ground X
  basis C3
  bobj 2
  kappa { 1 -> top }
system Diag
  ground X
  basis W
  bobj W
  kappa ramp {
    x: slope=1 offset=0 cap=w
    y: slope=1 offset=2 cap=w except{0->0}
  }
system EHalf
  ground X
  basis W
  bobj Half
  kappa inclusion
source Pull
  apex X
  basis 2
  leg fold -> Full
arrow id_half : Half -> Half via idX
map idX : X -> X { x -> x, y -> y }
morphism r : Diag -> EHalf via idX
  object image
";

    #[test]
    fn fixture_resolves() {
        let ws = parse(FIXTURE).unwrap();
        assert_eq!(ws.lattices.len(), 3);
        assert_eq!(ws.systems.len(), 3);
        assert_eq!(ws.space("Full").unwrap().bornology().members().unwrap().len(), 4);
        assert!(ws.system("Diag").is_ok());
        assert!(ws.source("Pull").is_ok());
        assert!(ws.morphism("r").is_ok());
    }

    #[test]
    fn round_trip() {
        let ws = parse(FIXTURE).unwrap();
        let text = serialize(&ws);
        let again = parse(&text).unwrap();
        assert_eq!(again, ws);
        assert_eq!(serialize(&again), text);
    }

    #[test]
    fn empty_workspace() {
        let ws = parse("").unwrap();
        assert_eq!(ws, Workspace::default());
        assert_eq!(serialize(&ws), "");
    }

    #[test]
    fn dangling_reference() {
        let err = parse("set X { x }\nspace S\n  ground X\n  basis L9\n  ideal extensional\n").unwrap_err();
        assert!(matches!(
            err,
            TextError::UnresolvedReference { ref name, line: 4, col: 9, .. } if name == "L9"
        ));
    }

    #[test]
    fn duplicate_name() {
        let err = parse("set X { x }\nset X { y }\n").unwrap_err();
        assert!(matches!(err, TextError::DuplicateName { line: 2, .. }));
    }

    #[test]
    fn errors_name_their_file() {
        let files = vec![
            ("a.bl".to_string(), "set X { x }".to_string()),
            ("b.bl".to_string(), "map f : X -> Y { }".to_string()),
        ];
        let err = parse_files(&files).unwrap_err();
        assert_eq!(err.file, "b.bl");
    }
}
