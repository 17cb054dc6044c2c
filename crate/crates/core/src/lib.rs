//! Cirquent calculus with clustering and ranking.
//!
//! Cirquents are binary trees of literals whose connectives carry a
//! cluster ID and a rank. This crate parses and renders them, evaluates
//! them under an interpretation, applies the four deep-inference rules,
//! checks proofs and synthesizes proofs or counterexamples.

pub mod error;
pub mod proof;
pub mod rules;
pub mod semantics;
pub mod syntax;
pub mod synthesis;

pub use error::{Error, Result};
pub use proof::{
    check_proof, is_axiom, parse_proof, render_proof, CheckVerdict, Justification, Proof, ProofStep,
};
pub use rules::{
    backward_apply, check_step, forward_apply, Direction, Params, RuleApplication, RuleTag,
};
pub use semantics::{
    true_under, valid, Caps, Interpretation, MetaselectionVector, ValidityVerdict,
};
pub use syntax::{parse, render, Atom, Cirquent, Index, Literal, Op, Path, Side};
pub use synthesis::{prove, step1, step2, step3, Synthesis, SynthesisResult};
