//! Mine framework API specifications from example programs and use them to
//! recommend API calls and flag misuses.
//!
//! The pipeline runs MiniLang source through [`frontend`] (IR, 1-CFA call
//! graph, SDG), [`slicer`] (primary API usage graphs), [`ifd`] (framework
//! reader/writer dependencies and soundness checks), [`graam`] (canonical
//! usage models) and [`fspec`] (the merged specification). [`recommend`]
//! queries a specification and [`eval`] measures it.

pub mod artifact;
pub mod error;
pub mod eval;
pub mod frontend;
pub mod fspec;
pub mod graam;
pub mod ged;
pub mod graph;
pub mod ifd;
pub mod manifest;
pub mod pipeline;
pub mod recommend;
pub mod slicer;
pub mod synth;

pub use error::Error;
pub use manifest::FrameworkManifest;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/minilang.md")]
    mod minilang {}
    #[doc = include_str!("../../../book/src/usage-graphs.md")]
    mod usage_graphs {}
    #[doc = include_str!("../../../book/src/graams.md")]
    mod graams {}
    #[doc = include_str!("../../../book/src/specifications.md")]
    mod specifications {}
    #[doc = include_str!("../../../book/src/recommendations.md")]
    mod recommendations {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
