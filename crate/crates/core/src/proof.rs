//! Proofs, axioms and the proof checker.
//!
//! A proof lists every cirquent explicitly. The file form is
//!
//! ```text
//! rifp-proof v1
//! # comment
//! 1: ((p |[3:1] ~p) |[1:1] (q |[4:1] ~q)) | axiom
//! 2: ((p |[1:1] q) |[2:1] (~p |[1:1] ~q)) | rule=III at=. k=1,i=1,l=2,j=1,m=3,n=4
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::rules::{check_step, RuleApplication};
use crate::semantics::{classical_tautology_with, Caps};
use crate::syntax::{parse_prefix, Cirquent};

pub const HEADER: &str = "rifp-proof v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom,
    Rule(RuleApplication),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom => f.write_str("axiom"),
            Justification::Rule(app) => write!(f, "{app}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub cirquent: Cirquent,
    pub justification: Justification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub steps: Vec<ProofStep>,
}

impl Proof {
    pub fn new(axiom: Cirquent) -> Self {
        Proof {
            steps: vec![ProofStep {
                cirquent: axiom,
                justification: Justification::Axiom,
            }],
        }
    }

    pub fn push(&mut self, cirquent: Cirquent, app: RuleApplication) {
        self.steps.push(ProofStep {
            cirquent,
            justification: Justification::Rule(app),
        });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The proved cirquent.
    pub fn conclusion(&self) -> Option<&Cirquent> {
        self.steps.last().map(|s| &s.cirquent)
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_proof(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckVerdict {
    Accepted,
    Rejected { step: usize, reason: String },
}

impl CheckVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, CheckVerdict::Accepted)
    }
}

impl fmt::Display for CheckVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckVerdict::Accepted => f.write_str("accepted"),
            CheckVerdict::Rejected { step, reason } => {
                write!(f, "rejected at step {step}: {reason}")
            }
        }
    }
}

/// A classical, well-formed tautology. Inputs beyond the default caps
/// count as non-axioms; use [`is_axiom_with`] to see the cap error.
pub fn is_axiom(c: &Cirquent) -> bool {
    is_axiom_with(c, Caps::default()).unwrap_or(false)
}

pub fn is_axiom_with(c: &Cirquent, caps: Caps) -> Result<bool> {
    if !c.is_classical() || !c.validate().ok {
        return Ok(false);
    }
    classical_tautology_with(c, caps)
}

pub fn check_proof(pf: &Proof) -> CheckVerdict {
    check_proof_with(pf, Caps::default())
}

pub fn check_proof_with(pf: &Proof, caps: Caps) -> CheckVerdict {
    let reject = |step: usize, reason: String| CheckVerdict::Rejected { step, reason };
    let Some(first) = pf.steps.first() else {
        return reject(1, "empty proof".into());
    };
    if first.justification != Justification::Axiom {
        return reject(1, "first step must be justified as an axiom".into());
    }
    match is_axiom_with(&first.cirquent, caps) {
        Ok(true) => {}
        Ok(false) => return reject(1, "not an axiom".into()),
        Err(e) => return reject(1, format!("not an axiom: {e}")),
    }
    for (t, pair) in pf.steps.windows(2).enumerate() {
        let step = t + 2;
        let app = match &pair[1].justification {
            Justification::Rule(app) => app,
            Justification::Axiom => {
                return reject(step, "only the first step may be an axiom".into())
            }
        };
        if let Err(e) = check_step(&pair[0].cirquent, &pair[1].cirquent, app) {
            return reject(step, e.to_string());
        }
    }
    CheckVerdict::Accepted
}

pub fn render_proof(pf: &Proof) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for (t, step) in pf.steps.iter().enumerate() {
        out.push_str(&format!(
            "{}: {} | {}\n",
            t + 1,
            step.cirquent,
            step.justification
        ));
    }
    out
}

/// Errors report 1-based physical line numbers.
pub fn parse_proof(input: &str) -> Result<Proof> {
    let err = |line: usize, message: String| Error::ProofSyntax { line, message };
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((line, other)) => {
            return Err(err(
                line,
                format!("expected header `{HEADER}`, found `{other}`"),
            ))
        }
        None => return Err(err(1, format!("empty proof file, expected `{HEADER}`"))),
    }
    let mut steps = Vec::new();
    for (line, text) in lines {
        let (number, rest) = text.split_once(':').ok_or_else(|| {
            err(
                line,
                "expected `<step>: <cirquent> | <justification>`".into(),
            )
        })?;
        let expected = steps.len() + 1;
        if number.trim().parse::<usize>().ok() != Some(expected) {
            return Err(err(
                line,
                format!("expected step number {expected}, found `{number}`"),
            ));
        }
        let (cirquent, used) = parse_prefix(rest).map_err(|e| err(line, e.to_string()))?;
        let tail = rest[used..].trim_start();
        let justification = tail
            .strip_prefix('|')
            .ok_or_else(|| err(line, "expected `|` after the cirquent".into()))?
            .trim();
        let justification = match justification {
            "axiom" => Justification::Axiom,
            text => Justification::Rule(text.parse().map_err(|e: Error| err(line, e.to_string()))?),
        };
        steps.push(ProofStep {
            cirquent,
            justification,
        });
    }
    if steps.is_empty() {
        return Err(err(
            input.lines().count().max(1),
            "proof has no steps".into(),
        ));
    }
    Ok(Proof { steps })
}
