//! Classical set models and first-order Kripke models for the membership language.

pub mod axioms;
mod classical;
mod model;

pub use axioms::{check_axiom, is_bounded, Axiom, AxiomFailure, AxiomReport, Shape};
pub use classical::{
    cardinality_sentence, eval_classical, hf_prefix, validate_classical, vrank_model, vrank_size,
    ClassicalSetModel,
};
pub use model::{check_coherence, disjoint_union, force_set, Env, SetKripkeModel, SetModelJson};
