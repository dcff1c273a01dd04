pub mod basis_map;
pub mod catalog;
pub mod cli;
pub mod ideal;
pub mod lattice;
pub mod laws;
pub mod lift;
pub mod powerset;
pub mod space;
pub mod system;
pub mod text;
pub mod verdict;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    mod lattices {}
    #[doc = include_str!("../../../book/src/ideals.md")]
    mod ideals {}
    #[doc = include_str!("../../../book/src/image_operators.md")]
    mod image_operators {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/initial_lifts.md")]
    mod initial_lifts {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/text_format.md")]
    mod text_format {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
