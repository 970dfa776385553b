//! Workbench for Kripke forcing, root extensions of set-theoretic Kripke models,
//! the de Jongh translation, and admissible rules of intuitionistic and
//! classical logic.

pub mod admissibility;
pub mod checks;
pub mod cli;
pub mod dejongh;
pub mod error;
pub mod extension;
pub mod formula;
pub mod gen;
pub mod kripke_prop;
pub mod kripke_set;
pub mod parser;
pub mod structure;
pub mod subst;

pub use error::{Error, Result};
pub use formula::{render_formula, Formula, Lang, Signature};
pub use parser::parse_formula;
