//! The four deep-inference rules, in both directions.
//!
//! Every application is addressed by the path of its redex root, which is
//! the same position in premise and conclusion:
//!
//! ```text
//! I-left    Φ{Ψ{A} ⊙k C}                      ⟶  Φ{Ψ{A ⊙k B} ⊙k C}
//! I-right   Φ{C ⊙k Ψ{A}}                      ⟶  Φ{C ⊙k Ψ{B ⊙k A}}
//! II-left   Φ{(A ∘m C1) ⊙k (B ∘n C2)}          ⟶  Φ{(A ⊙k B) ∘l C}
//! II-right  Φ{(C1 ∘m A) ⊙k (C2 ∘n B)}          ⟶  Φ{C ∘l (A ⊙k B)}
//! III       Φ{(A ∘m C) ⊙k (B ∘n D)}            ⟶  Φ{(A ⊙k B) ∘l (C ⊙k D)}
//! IV        Φ{A[l] ⊙k B[l/r]}                  ⟶  Φ{A[l] ⊙k B[l]}
//! ```
//!
//! (premise on the left, conclusion on the right). Forward application maps
//! a premise to its conclusion, backward application the other way; both
//! check every side condition and the well-formedness of the result.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::syntax::{parse_prefix, Cirquent, Index, Op, Path, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleTag {
    ILeft,
    IRight,
    IILeft,
    IIRight,
    III,
    IV,
}

impl RuleTag {
    pub const ALL: [RuleTag; 6] = [
        RuleTag::ILeft,
        RuleTag::IRight,
        RuleTag::IILeft,
        RuleTag::IIRight,
        RuleTag::III,
        RuleTag::IV,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleTag::ILeft => "I-left",
            RuleTag::IRight => "I-right",
            RuleTag::IILeft => "II-left",
            RuleTag::IIRight => "II-right",
            RuleTag::III => "III",
            RuleTag::IV => "IV",
        }
    }

    fn side(self) -> Side {
        match self {
            RuleTag::IRight | RuleTag::IIRight => Side::Right,
            _ => Side::Left,
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Syntax {
                offset: 0,
                message: format!("unknown rule `{s}`"),
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Rule-specific parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Params {
    /// Rule I: `inner` leads from the key node's argument down to `A`;
    /// `inserted` is the `B` that forward application adds.
    Insertion {
        inner: Path,
        inserted: Option<Cirquent>,
    },
    /// Rule II. `split` maps each singleton cluster of `C` to its IDs in
    /// `C1` and `C2`.
    Distribution {
        key: Index,
        partner: Index,
        m: u32,
        n: u32,
        split: BTreeMap<u32, (u32, u32)>,
    },
    /// Rule III.
    Medial {
        key: Index,
        partner: Index,
        m: u32,
        n: u32,
    },
    /// Rule IV: `shared` is `l:j`, `fresh` the ID `r` used on the right.
    Separation {
        key: Index,
        shared: Index,
        fresh: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: RuleTag,
    pub redex: Path,
    pub params: Params,
}

impl RuleApplication {
    pub fn insertion(side: Side, redex: Path, inner: Path, inserted: Option<Cirquent>) -> Self {
        RuleApplication {
            rule: match side {
                Side::Left => RuleTag::ILeft,
                Side::Right => RuleTag::IRight,
            },
            redex,
            params: Params::Insertion { inner, inserted },
        }
    }

    pub fn distribution(
        side: Side,
        redex: Path,
        key: Index,
        partner: Index,
        m: u32,
        n: u32,
        split: BTreeMap<u32, (u32, u32)>,
    ) -> Self {
        RuleApplication {
            rule: match side {
                Side::Left => RuleTag::IILeft,
                Side::Right => RuleTag::IIRight,
            },
            redex,
            params: Params::Distribution {
                key,
                partner,
                m,
                n,
                split,
            },
        }
    }

    pub fn medial(redex: Path, key: Index, partner: Index, m: u32, n: u32) -> Self {
        RuleApplication {
            rule: RuleTag::III,
            redex,
            params: Params::Medial { key, partner, m, n },
        }
    }

    pub fn separation(redex: Path, key: Index, shared: Index, fresh: u32) -> Self {
        RuleApplication {
            rule: RuleTag::IV,
            redex,
            params: Params::Separation { key, shared, fresh },
        }
    }

    fn check_tag(&self) -> Result<()> {
        let ok = matches!(
            (self.rule, &self.params),
            (RuleTag::ILeft | RuleTag::IRight, Params::Insertion { .. })
                | (
                    RuleTag::IILeft | RuleTag::IIRight,
                    Params::Distribution { .. }
                )
                | (RuleTag::III, Params::Medial { .. })
                | (RuleTag::IV, Params::Separation { .. })
        );
        if ok {
            Ok(())
        } else {
            Err(Error::SchemaMismatch(format!(
                "parameters do not belong to rule {}",
                self.rule
            )))
        }
    }
}

/// Apply `app` top-down: premise to conclusion.
pub fn forward_apply(premise: &Cirquent, app: &RuleApplication) -> Result<Cirquent> {
    app.check_tag()?;
    premise.validate().into_result()?;
    let conclusion = match &app.params {
        Params::Insertion { inner, inserted } => insertion_forward(
            premise,
            app.rule.side(),
            &app.redex,
            inner,
            inserted.as_ref(),
        )?,
        Params::Distribution {
            key,
            partner,
            m,
            n,
            split,
        } => {
            let conclusion = distribution_forward(
                premise,
                app.rule.side(),
                &app.redex,
                *key,
                *partner,
                (*m, *n),
                split,
            )?;
            distribution_conditions(premise, &conclusion, app)?;
            conclusion
        }
        Params::Medial { key, partner, m, n } => {
            let conclusion = medial_forward(premise, &app.redex, *key, *partner, (*m, *n))?;
            medial_conditions(premise, &conclusion, &app.redex, *key, *partner, (*m, *n))?;
            conclusion
        }
        Params::Separation { key, shared, fresh } => {
            separation_forward(premise, &app.redex, *key, *shared, *fresh)?
        }
    };
    conclusion
        .validate()
        .into_result()
        .map_err(|e| Error::IllFormedResult(e.to_string()))?;
    Ok(conclusion)
}

/// Apply `app` bottom-up: conclusion to premise.
pub fn backward_apply(conclusion: &Cirquent, app: &RuleApplication) -> Result<Cirquent> {
    app.check_tag()?;
    conclusion.validate().into_result()?;
    let premise = match &app.params {
        Params::Insertion { inner, inserted } => insertion_backward(
            conclusion,
            app.rule.side(),
            &app.redex,
            inner,
            inserted.as_ref(),
        )?,
        Params::Distribution {
            key,
            partner,
            m,
            n,
            split,
        } => {
            let premise = distribution_backward(
                conclusion,
                app.rule.side(),
                &app.redex,
                *key,
                *partner,
                (*m, *n),
                split,
            )?;
            distribution_conditions(&premise, conclusion, app)?;
            premise
        }
        Params::Medial { key, partner, m, n } => {
            let premise = medial_backward(conclusion, &app.redex, *key, *partner, (*m, *n))?;
            medial_conditions(&premise, conclusion, &app.redex, *key, *partner, (*m, *n))?;
            premise
        }
        Params::Separation { key, shared, fresh } => {
            separation_backward(conclusion, &app.redex, *key, *shared, *fresh)?
        }
    };
    premise
        .validate()
        .into_result()
        .map_err(|e| Error::IllFormedResult(e.to_string()))?;
    Ok(premise)
}

pub fn apply(c: &Cirquent, app: &RuleApplication, direction: Direction) -> Result<Cirquent> {
    match direction {
        Direction::Forward => forward_apply(c, app),
        Direction::Backward => backward_apply(c, app),
    }
}

/// `Ok` iff `conclusion` follows from `premise` by `app`.
pub fn check_step(premise: &Cirquent, conclusion: &Cirquent, app: &RuleApplication) -> Result<()> {
    let produced = forward_apply(premise, app)?;
    if &produced == conclusion {
        Ok(())
    } else {
        Err(Error::ConclusionMismatch {
            expected: conclusion.to_string(),
            produced: produced.to_string(),
        })
    }
}

pub fn is_valid_step(premise: &Cirquent, conclusion: &Cirquent, app: &RuleApplication) -> bool {
    check_step(premise, conclusion, app).is_ok()
}

fn schema(msg: impl Into<String>) -> Error {
    Error::SchemaMismatch(msg.into())
}

fn violation(msg: impl Into<String>) -> Error {
    Error::ConditionViolation(msg.into())
}

/// Connective at `path`, with schema errors instead of path errors.
fn connective<'a>(
    c: &'a Cirquent,
    path: &Path,
    what: &str,
) -> Result<(Op, Index, &'a Cirquent, &'a Cirquent)> {
    match c.node_at(path) {
        Ok(Cirquent::Node {
            op,
            index,
            left,
            right,
        }) => Ok((*op, *index, left, right)),
        Ok(Cirquent::Literal(_)) => Err(schema(format!("{what} at {path} is a literal"))),
        Err(_) => Err(schema(format!("{what} path {path} is out of range"))),
    }
}

fn expect_index(found: Index, expected: Index, what: &str) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(schema(format!(
            "{what} has index {found}, expected {expected}"
        )))
    }
}

fn insertion_forward(
    premise: &Cirquent,
    side: Side,
    redex: &Path,
    inner: &Path,
    inserted: Option<&Cirquent>,
) -> Result<Cirquent> {
    let (op, index, _, _) = connective(premise, redex, "redex")?;
    let target = redex.child(side).join(inner);
    let a = premise
        .node_at(&target)
        .map_err(|_| schema(format!("inner path {inner} is out of range")))?;
    let b = inserted.ok_or_else(|| schema("Rule I forward needs an inserted subcirquent"))?;
    let grown = match side {
        Side::Left => Cirquent::node(op, index, a.clone(), b.clone()),
        Side::Right => Cirquent::node(op, index, b.clone(), a.clone()),
    };
    premise.replace_at(&target, grown)
}

fn insertion_backward(
    conclusion: &Cirquent,
    side: Side,
    redex: &Path,
    inner: &Path,
    inserted: Option<&Cirquent>,
) -> Result<Cirquent> {
    let (op, index, _, _) = connective(conclusion, redex, "redex")?;
    let target = redex.child(side).join(inner);
    let (inner_op, inner_index, l, r) = connective(conclusion, &target, "inner node")?;
    if inner_op != op || inner_index != index {
        return Err(schema(format!(
            "inner node has index {inner_index}, key has {index}"
        )));
    }
    let (kept, removed) = match side {
        Side::Left => (l, r),
        Side::Right => (r, l),
    };
    if let Some(b) = inserted {
        if b != removed {
            return Err(schema(format!(
                "recorded insertion {b} differs from the removed argument {removed}"
            )));
        }
    }
    conclusion.replace_at(&target, kept.clone())
}

/// Arguments `(outer, shared)` of a premise-side Rule II/III child
/// `(X ∘ Y)`: for the left variant `outer = X`.
fn split_child(c: &Cirquent, side: Side) -> (&Cirquent, &Cirquent) {
    let (l, r) = c.children().expect("checked connective");
    match side {
        Side::Left => (l, r),
        Side::Right => (r, l),
    }
}

fn join(side: Side, op: Op, index: Index, own: Cirquent, shared: Cirquent) -> Cirquent {
    match side {
        Side::Left => Cirquent::node(op, index, own, shared),
        Side::Right => Cirquent::node(op, index, shared, own),
    }
}

fn distribution_forward(
    premise: &Cirquent,
    side: Side,
    redex: &Path,
    key: Index,
    partner: Index,
    (m, n): (u32, u32),
    split: &BTreeMap<u32, (u32, u32)>,
) -> Result<Cirquent> {
    let (key_op, key_index, left, right) = connective(premise, redex, "redex")?;
    expect_index(key_index, key, "key connective")?;
    let (lop, lindex, _, _) = connective(premise, &redex.child(Side::Left), "left argument")?;
    let (rop, rindex, _, _) = connective(premise, &redex.child(Side::Right), "right argument")?;
    expect_index(
        lindex,
        Index {
            cluster: m,
            rank: partner.rank,
        },
        "left argument",
    )?;
    expect_index(
        rindex,
        Index {
            cluster: n,
            rank: partner.rank,
        },
        "right argument",
    )?;
    if lop != rop {
        return Err(schema("the two premise partners differ in type"));
    }
    let (a, c1) = split_child(left, side);
    let (b, c2) = split_child(right, side);
    let to_first: BTreeMap<u32, u32> = split.iter().map(|(s, (s1, _))| (*s, *s1)).collect();
    let to_second: BTreeMap<u32, u32> = split.iter().map(|(s, (_, s2))| (*s, *s2)).collect();
    let back: BTreeMap<u32, u32> = split.iter().map(|(s, (s1, _))| (*s1, *s)).collect();
    let c = c1.rename_clusters(&back);
    if c.rename_clusters(&to_first) != *c1 || c.rename_clusters(&to_second) != *c2 {
        return Err(schema(
            "the two copies of C do not agree with the split map",
        ));
    }
    let key_node = Cirquent::node(key_op, key, a.clone(), b.clone());
    premise.replace_at(redex, join(side, lop, partner, key_node, c))
}

fn distribution_backward(
    conclusion: &Cirquent,
    side: Side,
    redex: &Path,
    key: Index,
    partner: Index,
    (m, n): (u32, u32),
    split: &BTreeMap<u32, (u32, u32)>,
) -> Result<Cirquent> {
    let (op, index, _, _) = connective(conclusion, redex, "redex")?;
    expect_index(index, partner, "partner connective")?;
    let (key_op, key_index, a, b) = connective(conclusion, &redex.child(side), "key connective")?;
    expect_index(key_index, key, "key connective")?;
    let c = conclusion
        .node_at(&redex.child(side.flip()))
        .expect("checked connective");
    check_fresh_partners(conclusion, partner, m, n)?;
    let mut seen = BTreeSet::from([m, n]);
    for (s1, s2) in split.values() {
        for id in [*s1, *s2] {
            if conclusion.occurs(id) || !seen.insert(id) {
                return Err(Error::FreshIdCollision(id));
            }
        }
    }
    let to_first: BTreeMap<u32, u32> = split.iter().map(|(s, (s1, _))| (*s, *s1)).collect();
    let to_second: BTreeMap<u32, u32> = split.iter().map(|(s, (_, s2))| (*s, *s2)).collect();
    let jm = Index {
        cluster: m,
        rank: partner.rank,
    };
    let jn = Index {
        cluster: n,
        rank: partner.rank,
    };
    let key_node = Cirquent::node(
        key_op,
        key,
        join(side, op, jm, a.clone(), c.rename_clusters(&to_first)),
        join(side, op, jn, b.clone(), c.rename_clusters(&to_second)),
    );
    conclusion.replace_at(redex, key_node)
}

/// Backward freshness for the premise partners `m`, `n`.
fn check_fresh_partners(conclusion: &Cirquent, partner: Index, m: u32, n: u32) -> Result<()> {
    if conclusion.cluster_size(partner.cluster) > 1 {
        return Ok(());
    }
    for id in [m, n] {
        if conclusion.occurs(id) {
            return Err(Error::FreshIdCollision(id));
        }
    }
    if m == n {
        return Err(Error::FreshIdCollision(m));
    }
    Ok(())
}

/// Condition (i) of Rules II and III.
fn partner_condition(
    rule: &str,
    premise: &Cirquent,
    conclusion: &Cirquent,
    partner: Index,
    (m, n): (u32, u32),
) -> Result<()> {
    let l = partner.cluster;
    if conclusion.cluster_size(l) > 1 {
        if m != l || n != l {
            return Err(violation(format!(
                "{rule} (i): cluster {l} is a non-singleton, so m=n={l} is required (got m={m}, n={n})"
            )));
        }
    } else if m == n || premise.cluster_size(m) != 1 || premise.cluster_size(n) != 1 {
        return Err(violation(format!(
            "{rule} (i): cluster {l} is a singleton, so m={m} and n={n} must be singletons in the premise"
        )));
    }
    Ok(())
}

fn distribution_conditions(
    premise: &Cirquent,
    conclusion: &Cirquent,
    app: &RuleApplication,
) -> Result<()> {
    let Params::Distribution {
        key,
        partner,
        m,
        n,
        split,
    } = &app.params
    else {
        unreachable!("checked tag")
    };
    let side = app.rule.side();
    partner_condition("Rule II", premise, conclusion, *partner, (*m, *n))?;
    if key.rank > partner.rank {
        return Err(violation(format!(
            "Rule II (ii) i≤j: {}≤{} fails",
            key.rank, partner.rank
        )));
    }
    let c_path = app.redex.child(side.flip());
    let c = conclusion
        .node_at(&c_path)
        .expect("conclusion built from schema");
    if let Some(t) = c.ranks().into_iter().find(|t| *t < key.rank) {
        return Err(violation(format!(
            "Rule II (iii): rank {t}<{} inside C",
            key.rank
        )));
    }
    // mirrored on the two copies in the premise
    for own in [Side::Left, Side::Right] {
        let copy_path = app.redex.child(own).child(side.flip());
        let copy = premise
            .node_at(&copy_path)
            .expect("premise built from schema");
        if let Some(t) = copy.ranks().into_iter().find(|t| *t < key.rank) {
            return Err(violation(format!(
                "Rule II (iii): rank {t}<{} inside a copy of C",
                key.rank
            )));
        }
    }
    let singletons: BTreeSet<u32> = c
        .cluster_ids()
        .into_iter()
        .filter(|s| conclusion.cluster_size(*s) == 1)
        .collect();
    let keys: BTreeSet<u32> = split.keys().copied().collect();
    if singletons != keys {
        return Err(violation(format!(
            "Rule II (iv): split must cover exactly the singleton clusters {singletons:?} of C, got {keys:?}"
        )));
    }
    for (s, (s1, s2)) in split {
        if premise.cluster_size(*s1) != 1 || premise.cluster_size(*s2) != 1 {
            return Err(violation(format!(
                "Rule II (iv): {s1} and {s2} (copies of {s}) must be singletons in the premise"
            )));
        }
    }
    Ok(())
}

fn medial_forward(
    premise: &Cirquent,
    redex: &Path,
    key: Index,
    partner: Index,
    (m, n): (u32, u32),
) -> Result<Cirquent> {
    let (key_op, key_index, left, right) = connective(premise, redex, "redex")?;
    expect_index(key_index, key, "key connective")?;
    let (lop, lindex, a, c) = connective(left, &Path::root(), "left argument")?;
    let (rop, rindex, b, d) = connective(right, &Path::root(), "right argument")?;
    expect_index(
        lindex,
        Index {
            cluster: m,
            rank: partner.rank,
        },
        "left argument",
    )?;
    expect_index(
        rindex,
        Index {
            cluster: n,
            rank: partner.rank,
        },
        "right argument",
    )?;
    if lop != rop {
        return Err(schema("the two premise partners differ in type"));
    }
    let merged = Cirquent::node(
        lop,
        partner,
        Cirquent::node(key_op, key, a.clone(), b.clone()),
        Cirquent::node(key_op, key, c.clone(), d.clone()),
    );
    premise.replace_at(redex, merged)
}

fn medial_backward(
    conclusion: &Cirquent,
    redex: &Path,
    key: Index,
    partner: Index,
    (m, n): (u32, u32),
) -> Result<Cirquent> {
    let (op, index, _, _) = connective(conclusion, redex, "redex")?;
    expect_index(index, partner, "partner connective")?;
    let (lop, lindex, a, b) = connective(conclusion, &redex.child(Side::Left), "left key")?;
    let (rop, rindex, c, d) = connective(conclusion, &redex.child(Side::Right), "right key")?;
    expect_index(lindex, key, "left key")?;
    expect_index(rindex, key, "right key")?;
    debug_assert_eq!(lop, rop, "validated cirquent");
    check_fresh_partners(conclusion, partner, m, n)?;
    let split = Cirquent::node(
        lop,
        key,
        Cirquent::node(
            op,
            Index {
                cluster: m,
                rank: partner.rank,
            },
            a.clone(),
            c.clone(),
        ),
        Cirquent::node(
            op,
            Index {
                cluster: n,
                rank: partner.rank,
            },
            b.clone(),
            d.clone(),
        ),
    );
    conclusion.replace_at(redex, split)
}

fn medial_conditions(
    premise: &Cirquent,
    conclusion: &Cirquent,
    _redex: &Path,
    key: Index,
    partner: Index,
    mn: (u32, u32),
) -> Result<()> {
    partner_condition("Rule III", premise, conclusion, partner, mn)?;
    if key.rank > partner.rank {
        return Err(violation(format!(
            "Rule III (ii) i≤j: {}≤{} fails",
            key.rank, partner.rank
        )));
    }
    Ok(())
}

fn separation_common(
    c: &Cirquent,
    redex: &Path,
    key: Index,
    shared: Index,
    fresh: u32,
) -> Result<(Op, Cirquent, Cirquent)> {
    let (op, index, a, b) = connective(c, redex, "redex")?;
    expect_index(index, key, "key connective")?;
    if key.rank >= shared.rank {
        return Err(violation(format!(
            "Rule IV (ii) i<j: {}<{} fails",
            key.rank, shared.rank
        )));
    }
    if fresh == shared.cluster {
        return Err(Error::FreshIdCollision(fresh));
    }
    if let Some(info) = c.clusters().get(&shared.cluster) {
        if info.rank != shared.rank {
            return Err(schema(format!(
                "cluster {} has rank {}, not {}",
                shared.cluster, info.rank, shared.rank
            )));
        }
    }
    Ok((op, a.clone(), b.clone()))
}

fn separation_forward(
    premise: &Cirquent,
    redex: &Path,
    key: Index,
    shared: Index,
    fresh: u32,
) -> Result<Cirquent> {
    let (op, a, b) = separation_common(premise, redex, key, shared, fresh)?;
    let (l, r) = (shared.cluster, fresh);
    if !a.occurs(l) {
        return Err(schema(format!("cluster {l} does not occur in A")));
    }
    if b.occurs(l) {
        return Err(schema(format!("cluster {l} still occurs in B[{l}/{r}]")));
    }
    if !b.occurs(r) {
        return Err(schema(format!("cluster {r} does not occur in B")));
    }
    if premise.cluster_size(r) != b.cluster_size(r) {
        return Err(violation(format!(
            "Rule IV (i): cluster {r} must not occur in the conclusion outside B"
        )));
    }
    if premise.cluster_size(l) != a.cluster_size(l) {
        return Err(violation(format!(
            "Rule IV (i): cluster {l} occurs outside A and B"
        )));
    }
    if premise.clusters()[&r].rank != shared.rank {
        return Err(schema(format!(
            "cluster {r} is not of rank {}",
            shared.rank
        )));
    }
    let merged = b.rename_clusters(&BTreeMap::from([(r, l)]));
    premise.replace_at(redex, Cirquent::node(op, key, a, merged))
}

fn separation_backward(
    conclusion: &Cirquent,
    redex: &Path,
    key: Index,
    shared: Index,
    fresh: u32,
) -> Result<Cirquent> {
    let (op, a, b) = separation_common(conclusion, redex, key, shared, fresh)?;
    let l = shared.cluster;
    if !a.occurs(l) || !b.occurs(l) {
        return Err(schema(format!("cluster {l} must occur in both A and B")));
    }
    if conclusion.cluster_size(l) != a.cluster_size(l) + b.cluster_size(l) {
        return Err(violation(format!(
            "Rule IV (i): cluster {l} occurs outside A and B"
        )));
    }
    if conclusion.occurs(fresh) {
        return Err(Error::FreshIdCollision(fresh));
    }
    let renamed = b.rename_clusters(&BTreeMap::from([(l, fresh)]));
    conclusion.replace_at(redex, Cirquent::node(op, key, a, renamed))
}

impl fmt::Display for RuleApplication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule={} at={}", self.rule, self.redex)?;
        match &self.params {
            Params::Insertion { inner, inserted } => {
                write!(f, " inner={inner}")?;
                if let Some(b) = inserted {
                    write!(f, " ins={b}")?;
                }
            }
            Params::Distribution {
                key,
                partner,
                m,
                n,
                split,
            } => {
                write!(
                    f,
                    " k={},i={},l={},j={},m={m},n={n}",
                    key.cluster, key.rank, partner.cluster, partner.rank
                )?;
                if !split.is_empty() {
                    let items: Vec<String> = split
                        .iter()
                        .map(|(s, (s1, s2))| format!("{s}->{s1}/{s2}"))
                        .collect();
                    write!(f, " split={}", items.join(";"))?;
                }
            }
            Params::Medial { key, partner, m, n } => write!(
                f,
                " k={},i={},l={},j={},m={m},n={n}",
                key.cluster, key.rank, partner.cluster, partner.rank
            )?,
            Params::Separation { key, shared, fresh } => write!(
                f,
                " k={},i={},l={},j={},r={fresh}",
                key.cluster, key.rank, shared.cluster, shared.rank
            )?,
        }
        Ok(())
    }
}

impl FromStr for RuleApplication {
    type Err = Error;

    /// Fields are `key=value`, separated by spaces or commas; `ins=` takes
    /// a whole cirquent.
    fn from_str(s: &str) -> Result<Self> {
        let err = |offset: usize, message: String| Error::Syntax { offset, message };
        let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut inserted = None;
        let bytes = s.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() || bytes[pos] == b',' {
                pos += 1;
                continue;
            }
            let start = pos;
            let eq = s[pos..]
                .find('=')
                .map(|i| pos + i)
                .ok_or_else(|| err(start, "expected `key=value`".into()))?;
            let key = s[start..eq].to_string();
            if key.is_empty() || !key.bytes().all(|b| b.is_ascii_alphabetic()) {
                return Err(err(start, format!("bad field name `{key}`")));
            }
            pos = eq + 1;
            if key == "ins" {
                let (c, used) = parse_prefix(&s[pos..]).map_err(|e| match e {
                    Error::Syntax { offset, message } => err(pos + offset, message),
                    other => other,
                })?;
                if inserted.replace(c).is_some() {
                    return Err(err(start, "duplicate field `ins`".into()));
                }
                pos += used;
                continue;
            }
            let end = s[pos..]
                .find(|ch: char| ch.is_ascii_whitespace() || ch == ',')
                .map_or(s.len(), |i| pos + i);
            if fields
                .insert(key.clone(), (start, s[pos..end].to_string()))
                .is_some()
            {
                return Err(err(start, format!("duplicate field `{key}`")));
            }
            pos = end;
        }

        let mut take = |name: &str| fields.remove(name);
        let (_, rule) = take("rule").ok_or_else(|| err(0, "missing field `rule`".into()))?;
        let rule: RuleTag = rule.parse()?;
        let (at_pos, at) = take("at").ok_or_else(|| err(0, "missing field `at`".into()))?;
        let redex: Path = at
            .parse()
            .map_err(|_| err(at_pos, format!("bad path `{at}`")))?;
        let mut num = |name: &str| -> Result<u32> {
            let (p, v) = take(name).ok_or_else(|| err(0, format!("missing field `{name}`")))?;
            match v.parse::<u32>() {
                Ok(0) | Err(_) => Err(err(p, format!("field `{name}` needs a positive integer"))),
                Ok(n) => Ok(n),
            }
        };
        let params = match rule {
            RuleTag::ILeft | RuleTag::IRight => {
                let (p, inner) = fields
                    .remove("inner")
                    .ok_or_else(|| err(0, "missing field `inner`".into()))?;
                let inner = inner
                    .parse()
                    .map_err(|_| err(p, format!("bad path `{inner}`")))?;
                Params::Insertion {
                    inner,
                    inserted: inserted.take(),
                }
            }
            RuleTag::IILeft | RuleTag::IIRight | RuleTag::III => {
                let key = Index::new(num("k")?, num("i")?)?;
                let partner = Index::new(num("l")?, num("j")?)?;
                let (m, n) = (num("m")?, num("n")?);
                if rule == RuleTag::III {
                    Params::Medial { key, partner, m, n }
                } else {
                    let split = match fields.remove("split") {
                        Some((p, text)) => parse_split(&text).map_err(|m| err(p, m))?,
                        None => BTreeMap::new(),
                    };
                    Params::Distribution {
                        key,
                        partner,
                        m,
                        n,
                        split,
                    }
                }
            }
            RuleTag::IV => Params::Separation {
                key: Index::new(num("k")?, num("i")?)?,
                shared: Index::new(num("l")?, num("j")?)?,
                fresh: num("r")?,
            },
        };
        if inserted.is_some() {
            return Err(err(0, format!("field `ins` does not apply to rule {rule}")));
        }
        if let Some((name, (p, _))) = fields.into_iter().next() {
            return Err(err(
                p,
                format!("field `{name}` does not apply to rule {rule}"),
            ));
        }
        Ok(RuleApplication {
            rule,
            redex,
            params,
        })
    }
}

fn parse_split(text: &str) -> std::result::Result<BTreeMap<u32, (u32, u32)>, String> {
    let mut out = BTreeMap::new();
    for item in text.split(';').filter(|s| !s.is_empty()) {
        let bad = || format!("bad split entry `{item}`");
        let (s, rest) = item.split_once("->").ok_or_else(bad)?;
        let (s1, s2) = rest.split_once('/').ok_or_else(bad)?;
        let num = |t: &str| match t.parse::<u32>() {
            Ok(0) | Err(_) => Err(bad()),
            Ok(n) => Ok(n),
        };
        if out.insert(num(s)?, (num(s1)?, num(s2)?)).is_some() {
            return Err(format!("split entry for {s} repeated"));
        }
    }
    Ok(out)
}
