//! A workbench for two decidable logics and the translations between them:
//! the guarded fragment (GF) of first-order logic and the logic of
//! functional dependence (LFD), whose team semantics tracks local
//! dependencies between variables.
//!
//! The crate provides:
//!
//! - abstract syntax, parsing and printing for both languages ([`syntax`]);
//! - finite standard models, dependence models (teams) and the model
//!   transformations connecting them ([`models`]);
//! - model checking for both semantics plus dependence bisimulations
//!   ([`mcheck`]);
//! - the formula translations in both directions, including the
//!   equisatisfiable reduction of LFD into GF ([`translate`]);
//! - a complete satisfiability decider for LFD by type elimination, with
//!   bounded unraveling of certificates into concrete models ([`typemodel`]);
//! - brute-force finite-model search used as independent ground truth
//!   ([`oracle`]);
//! - the property suites that exercise every equivalence end to end
//!   ([`suites`]).

pub mod caps;
pub mod error;
pub mod mcheck;
pub mod models;
pub mod oracle;
pub mod suites;
pub mod syntax;
pub mod translate;
pub mod typemodel;

pub use caps::Caps;
pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
