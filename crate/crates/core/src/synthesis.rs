//! Proof synthesis: the constructive completeness procedure.
//!
//! Working bottom-up from the input, Step 1 lifts every node above its
//! higher-rank ancestors (Rule II), Step 2 removes nested same-cluster
//! pairs (Rule I) and Step 3 dissolves every cluster rank by rank (Rules
//! II, III and IV). The result is classical. If it is a tautology, the
//! reversed trace is a proof; otherwise its first falsifying row is a
//! counterexample to the input.
//!
//! Every choice is deterministic: smallest level first, then leftmost
//! path, then smallest cluster ID. Fresh cluster IDs count up from one past
//! the current maximum.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::proof::{check_proof_with, CheckVerdict, Proof};
use crate::rules::{backward_apply, RuleApplication};
use crate::semantics::{first_classical_falsifier, true_under_with, Caps, Interpretation};
use crate::syntax::{Cirquent, Index, Path, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PinLabel {
    Unused,
    Used,
    None,
}

/// A tracked connective, re-aimed after every rewrite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pin {
    pub target: Path,
    pub label: PinLabel,
}

impl Pin {
    pub fn new(target: Path) -> Self {
        Pin {
            target,
            label: PinLabel::None,
        }
    }
}

/// Number of rank-`i` connectives per level. Ordered as a measure: at the
/// first level where two distributions differ, the one with MORE nodes
/// there is the smaller.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IDistribution {
    counts: Vec<usize>,
}

impl IDistribution {
    pub fn from_counts(mut counts: Vec<usize>) -> Self {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        IDistribution { counts }
    }

    pub fn get(&self, level: usize) -> usize {
        self.counts.get(level).copied().unwrap_or(0)
    }

    /// Counts up to the last non-zero entry.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn is_zero(&self) -> bool {
        self.counts.is_empty()
    }
}

impl Ord for IDistribution {
    fn cmp(&self, other: &Self) -> Ordering {
        let len = self.counts.len().max(other.counts.len());
        (0..len)
            .map(|m| other.get(m).cmp(&self.get(m)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for IDistribution {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.counts.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", items.join(","))
    }
}

/// The Step 3.1 measure, ordered lexicographically. `z` is signed because
/// a merged pin sitting at the root gives `L(a) - 1 = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateTuple {
    pub x: usize,
    pub y: usize,
    pub z: i64,
    pub t: usize,
}

impl fmt::Display for StateTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.x, self.y, self.z, self.t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Step1,
    Step2,
    Step31,
    Step32,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Step1 => "1",
            Phase::Step2 => "2",
            Phase::Step31 => "3.1",
            Phase::Step32 => "3.2",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Measure {
    Distribution(IDistribution),
    State(StateTuple),
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Distribution(d) => write!(f, "{d}"),
            Measure::State(s) => write!(f, "{s}"),
        }
    }
}

/// One backward rewrite: `premise` is obtained from `conclusion` by
/// applying `app` bottom-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub phase: Phase,
    pub app: RuleApplication,
    pub conclusion: Cirquent,
    pub premise: Cirquent,
    /// Measure of `premise`, where the phase has one.
    pub measure: Option<Measure>,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step={} {}", self.phase, self.app)?;
        if let Some(m) = &self.measure {
            write!(f, " measure={m}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SynthesisResult {
    Proof(Proof),
    Counterexample(Interpretation),
}

impl SynthesisResult {
    pub fn is_proof(&self) -> bool {
        matches!(self, SynthesisResult::Proof(_))
    }
}

/// Full record of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synthesis {
    pub result: SynthesisResult,
    /// The classical cirquent reached after Step 3.
    pub residue: Cirquent,
    pub trace: Vec<TraceEntry>,
}

pub fn i_distribution_of(c: &Cirquent, i: u32) -> IDistribution {
    let mut counts = Vec::new();
    for node in c.nodes() {
        if node.index.rank == i {
            let level = node.path.len();
            if counts.len() <= level {
                counts.resize(level + 1, 0);
            }
            counts[level] += 1;
        }
    }
    IDistribution::from_counts(counts)
}

/// `b` is needed only when `m = 2`.
pub fn state_of(
    c: &Cirquent,
    k: u32,
    i: u32,
    m: usize,
    a: &Pin,
    b: Option<&Pin>,
) -> Result<StateTuple> {
    let in_cluster = |pin: &Pin, name: &str| -> Result<usize> {
        match c.connective_at(&pin.target) {
            Ok((_, idx)) if idx.cluster == k && idx.rank == i => Ok(pin.target.len()),
            Ok((_, idx)) => Err(Error::InvalidPin(format!(
                "{name} at {} has index {idx}, not {k}:{i}",
                pin.target
            ))),
            Err(e) => Err(Error::InvalidPin(format!("{name}: {e}"))),
        }
    };
    let la = in_cluster(a, "a")? as i64;
    let z = match (m, b) {
        (1, _) => la - 1,
        (2, Some(b)) => {
            if b.target == a.target {
                return Err(Error::InvalidPin("a and b coincide".into()));
            }
            la + in_cluster(b, "b")? as i64
        }
        (2, None) => return Err(Error::InvalidPin("m = 2 needs a pin b".into())),
        _ => return Err(Error::InvalidPin(format!("m must be 1 or 2, got {m}"))),
    };
    let clusters = c.clusters();
    let x = clusters[&k].members.len();
    let t = clusters
        .iter()
        .filter(|(id, info)| **id != k && info.rank == i && info.members.len() > 1)
        .map(|(_, info)| info.members.len())
        .sum();
    Ok(StateTuple {
        x,
        y: x.saturating_sub(m),
        z,
        t,
    })
}

/// First node whose rank is lower than some ancestor's, as
/// `(node, ancestor)` paths.
pub fn property1_violation(c: &Cirquent) -> Option<(Path, Path)> {
    fn go(c: &Cirquent, path: &mut Vec<Side>, top: Option<(u32, Path)>) -> Option<(Path, Path)> {
        let Cirquent::Node {
            index, left, right, ..
        } = c
        else {
            return None;
        };
        let here = Path::from_sides(path.clone());
        if let Some((rank, anc)) = &top {
            if index.rank < *rank {
                return Some((here, anc.clone()));
            }
        }
        let top = match top {
            Some((rank, anc)) if rank >= index.rank => Some((rank, anc)),
            _ => Some((index.rank, here)),
        };
        for (side, child) in [(Side::Left, left), (Side::Right, right)] {
            path.push(side);
            let found = go(child, path, top.clone());
            path.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    go(c, &mut Vec::new(), None)
}

/// First ancestor/descendant pair in one cluster, as `(ancestor,
/// descendant)`: ancestor by level then path, descendant nearest then
/// leftmost.
pub fn property2_violation(c: &Cirquent) -> Option<(Path, Path)> {
    let mut nodes = c.nodes();
    nodes.sort_by(|x, y| (x.path.len(), &x.path).cmp(&(y.path.len(), &y.path)));
    for (n, u) in nodes.iter().enumerate() {
        if let Some(d) = nodes[n + 1..].iter().find(|d| {
            d.index.cluster == u.index.cluster && u.path.is_prefix_of(&d.path) && u.path != d.path
        }) {
            return Some((u.path.clone(), d.path.clone()));
        }
    }
    None
}

fn internal(what: impl fmt::Display, e: Error) -> Error {
    Error::Internal(format!("{what} blocked: {e}"))
}

fn check_properties(c: &Cirquent, second: bool) -> Result<()> {
    if let Some((node, anc)) = property1_violation(c) {
        return Err(Error::Internal(format!(
            "property 1 lost: {node} lies below higher-rank {anc} in {c}"
        )));
    }
    if second {
        if let Some((anc, node)) = property2_violation(c) {
            return Err(Error::Internal(format!(
                "property 2 lost: {node} lies below same-cluster {anc} in {c}"
            )));
        }
    }
    Ok(())
}

struct Fresh(u32);

impl Fresh {
    fn after(c: &Cirquent) -> Self {
        Fresh(c.max_cluster_id() + 1)
    }

    fn take(&mut self) -> u32 {
        let id = self.0;
        self.0 += 1;
        id
    }
}

/// Backward Rule II at the parent of `key`, moving the key up one level.
fn lift(c: &Cirquent, key: &Path) -> Result<(Cirquent, RuleApplication)> {
    let (parent, side) = match (key.parent(), key.last()) {
        (Some(p), Some(s)) => (p, s),
        _ => return Err(Error::Internal(format!("cannot lift the root in {c}"))),
    };
    let (_, key_index) = c.connective_at(key)?;
    let (_, partner) = c.connective_at(&parent)?;
    let mut fresh = Fresh::after(c);
    let (m, n) = if c.cluster_size(partner.cluster) > 1 {
        (partner.cluster, partner.cluster)
    } else {
        (fresh.take(), fresh.take())
    };
    let shared = c.node_at(&parent.child(side.flip()))?;
    let split: BTreeMap<u32, (u32, u32)> = shared
        .cluster_ids()
        .into_iter()
        .filter(|s| c.cluster_size(*s) == 1)
        .map(|s| (s, (fresh.take(), fresh.take())))
        .collect();
    let app = RuleApplication::distribution(side, parent, key_index, partner, m, n, split);
    let premise = backward_apply(c, &app).map_err(|e| internal(&app, e))?;
    Ok((premise, app))
}

/// Step 1: afterwards no connective has an ancestor of higher rank.
pub fn step1(c: &Cirquent) -> Result<(Cirquent, Vec<TraceEntry>)> {
    c.validate().into_result()?;
    let mut cur = c.clone();
    let mut trace = Vec::new();
    for i in c.ranks() {
        while let Some(mut a) = lowest_dominated(&cur, i) {
            while let Some(parent) = a.parent() {
                if cur.connective_at(&parent)?.1.rank <= i {
                    break;
                }
                let before = i_distribution_of(&cur, i);
                let (premise, app) = lift(&cur, &a)?;
                let after = i_distribution_of(&premise, i);
                if after >= before {
                    return Err(Error::Internal(format!(
                        "{i}-distribution did not decrease: {before} to {after}"
                    )));
                }
                trace.push(TraceEntry {
                    phase: Phase::Step1,
                    app,
                    conclusion: std::mem::replace(&mut cur, premise.clone()),
                    premise,
                    measure: Some(Measure::Distribution(after)),
                });
                a = parent;
            }
        }
    }
    check_properties(&cur, false)?;
    Ok((cur, trace))
}

/// Rank-`i` connective with a higher-rank ancestor, by level then path.
fn lowest_dominated(c: &Cirquent, i: u32) -> Option<Path> {
    fn go(c: &Cirquent, path: &mut Vec<Side>, top: u32, i: u32, best: &mut Option<Path>) {
        let Cirquent::Node {
            index, left, right, ..
        } = c
        else {
            return;
        };
        if index.rank == i && top > i {
            let here = Path::from_sides(path.clone());
            let better = best
                .as_ref()
                .is_none_or(|b| (here.len(), &here) < (b.len(), b));
            if better {
                *best = Some(here);
            }
            return;
        }
        let top = top.max(index.rank);
        path.push(Side::Left);
        go(left, path, top, i, best);
        path.pop();
        path.push(Side::Right);
        go(right, path, top, i, best);
        path.pop();
    }
    let mut best = None;
    go(c, &mut Vec::new(), 0, i, &mut best);
    best
}

/// Step 2: afterwards no connective lies below another of its cluster.
pub fn step2(c: &Cirquent) -> Result<(Cirquent, Vec<TraceEntry>)> {
    c.validate().into_result()?;
    if let Some((node, anc)) = property1_violation(c) {
        return Err(Error::Precondition(format!(
            "{node} lies below higher-rank {anc}"
        )));
    }
    let mut cur = c.clone();
    let mut trace = Vec::new();
    while let Some((anc, desc)) = property2_violation(&cur) {
        let side = desc.sides()[anc.len()];
        let inner = desc
            .strip_prefix(&anc.child(side))
            .expect("descendant lies below the ancestor's child");
        let removed = cur
            .node_at(&desc)?
            .child(side.flip())
            .expect("descendant is a connective")
            .clone();
        let app = RuleApplication::insertion(side, anc, inner, Some(removed));
        let premise = backward_apply(&cur, &app).map_err(|e| internal(&app, e))?;
        check_properties(&premise, false)?;
        trace.push(TraceEntry {
            phase: Phase::Step2,
            app,
            conclusion: std::mem::replace(&mut cur, premise.clone()),
            premise,
            measure: None,
        });
    }
    check_properties(&cur, true)?;
    Ok((cur, trace))
}

/// Step 3: afterwards every cluster is a singleton.
pub fn step3(c: &Cirquent) -> Result<(Cirquent, Vec<TraceEntry>)> {
    c.validate().into_result()?;
    if let Some((node, anc)) = property1_violation(c) {
        return Err(Error::Precondition(format!(
            "{node} lies below higher-rank {anc}"
        )));
    }
    if let Some((anc, node)) = property2_violation(c) {
        return Err(Error::Precondition(format!(
            "{node} lies below same-cluster {anc}"
        )));
    }
    let mut run = Step3 {
        cur: c.clone(),
        trace: Vec::new(),
    };
    for i in c.ranks() {
        while let Some(k) = pick_cluster(&run.cur, i) {
            run.merge_cluster(k, i)?;
        }
        run.separate(i)?;
    }
    if !run.cur.is_classical() {
        return Err(Error::Internal(format!(
            "Step 3 ended with a non-classical cirquent {}",
            run.cur
        )));
    }
    Ok((run.cur, run.trace))
}

struct Step3 {
    cur: Cirquent,
    trace: Vec<TraceEntry>,
}

impl Step3 {
    fn push(
        &mut self,
        phase: Phase,
        app: RuleApplication,
        premise: Cirquent,
        measure: Option<Measure>,
    ) -> Result<()> {
        check_properties(&premise, true)?;
        self.trace.push(TraceEntry {
            phase,
            app,
            conclusion: std::mem::replace(&mut self.cur, premise.clone()),
            premise,
            measure,
        });
        Ok(())
    }

    /// Step 3.1 for one cluster: merge pairs until it is a singleton.
    fn merge_cluster(&mut self, k: u32, i: u32) -> Result<()> {
        let mut last: Option<StateTuple> = None;
        let mut advance = |state: StateTuple| -> Result<()> {
            if let Some(prev) = last {
                if state >= prev {
                    return Err(Error::Internal(format!(
                        "state did not decrease for cluster {k}: {prev} to {state}"
                    )));
                }
            }
            last = Some(state);
            Ok(())
        };
        while self.cur.cluster_size(k) > 1 {
            // 3.1.1
            let (a, b) = pick_pair(&self.cur, k);
            let nca = a.common_prefix(&b);
            let l = nca.len();
            let mut pins = [Pin::new(a), Pin::new(b)];
            advance(state_of(&self.cur, k, i, 2, &pins[0], Some(&pins[1]))?)?;
            // 3.1.2 and 3.1.3
            for which in 0..2 {
                while pins[which].target.len() > l + 1 {
                    let (premise, app) = lift(&self.cur, &pins[which].target)?;
                    let parent = pins[which].target.parent().expect("below the nca");
                    pins[which].target = parent;
                    let state = state_of(&premise, k, i, 2, &pins[0], Some(&pins[1]))?;
                    advance(state)?;
                    self.push(Phase::Step31, app, premise, Some(Measure::State(state)))?;
                }
            }
            // 3.1.4
            let (_, partner) = self.cur.connective_at(&nca)?;
            let mut fresh = Fresh::after(&self.cur);
            let (m, n) = if self.cur.cluster_size(partner.cluster) > 1 {
                (partner.cluster, partner.cluster)
            } else {
                (fresh.take(), fresh.take())
            };
            let key = Index {
                cluster: k,
                rank: i,
            };
            let app = RuleApplication::medial(nca.clone(), key, partner, m, n);
            let premise = backward_apply(&self.cur, &app).map_err(|e| internal(&app, e))?;
            let merged = Pin::new(nca);
            let state = state_of(&premise, k, i, 1, &merged, None)?;
            advance(state)?;
            self.push(Phase::Step31, app, premise, Some(Measure::State(state)))?;
        }
        Ok(())
    }

    /// Step 3.2: separate higher-rank clusters shared by both arguments of
    /// a rank-`i` connective. Rule IV keeps the tree shape, so the pins
    /// never move.
    fn separate(&mut self, i: u32) -> Result<()> {
        let mut pins: Vec<Pin> = self
            .cur
            .nodes()
            .into_iter()
            .filter(|n| n.index.rank == i)
            .map(|n| Pin {
                target: n.path,
                label: PinLabel::Unused,
            })
            .collect();
        pins.sort_by(|x, y| (x.target.len(), &x.target).cmp(&(y.target.len(), &y.target)));
        for pin in &mut pins {
            loop {
                let node = self.cur.node_at(&pin.target)?;
                let (_, key) = node.connective().expect("rank-i pins hold connectives");
                let (left, right) = node.children().expect("connective");
                let clusters = self.cur.clusters();
                let shared: BTreeSet<u32> = left
                    .cluster_ids()
                    .intersection(&right.cluster_ids())
                    .copied()
                    .filter(|id| clusters[id].rank > i)
                    .collect();
                let Some(&l) = shared.first() else { break };
                if self.cur.cluster_size(l) != left.cluster_size(l) + right.cluster_size(l) {
                    return Err(Error::Internal(format!(
                        "cluster {l} straddles {} and also occurs outside it",
                        pin.target
                    )));
                }
                let shared_index = Index {
                    cluster: l,
                    rank: clusters[&l].rank,
                };
                let fresh = Fresh::after(&self.cur).take();
                let app = RuleApplication::separation(pin.target.clone(), key, shared_index, fresh);
                let premise = backward_apply(&self.cur, &app).map_err(|e| internal(&app, e))?;
                self.push(Phase::Step32, app, premise, None)?;
            }
            pin.label = PinLabel::Used;
        }
        Ok(())
    }
}

/// Non-singleton rank-`i` cluster by (shallowest member, leftmost member, ID).
fn pick_cluster(c: &Cirquent, i: u32) -> Option<u32> {
    c.clusters()
        .into_iter()
        .filter(|(_, info)| info.rank == i && info.members.len() > 1)
        .map(|(id, info)| {
            let first = info
                .members
                .into_iter()
                .min_by(|x, y| (x.len(), x).cmp(&(y.len(), y)))
                .expect("non-empty cluster");
            ((first.len(), first), id)
        })
        .min()
        .map(|(_, id)| id)
}

/// Pair `a < b` of cluster members with the deepest common ancestor,
/// lexicographically first among ties.
fn pick_pair(c: &Cirquent, k: u32) -> (Path, Path) {
    let mut members = c.clusters()[&k].members.clone();
    members.sort();
    let mut best: Option<(usize, Path, Path)> = None;
    for (n, a) in members.iter().enumerate() {
        for b in &members[n + 1..] {
            let depth = a.common_prefix(b).len();
            if best.as_ref().is_none_or(|(d, _, _)| depth > *d) {
                best = Some((depth, a.clone(), b.clone()));
            }
        }
    }
    let (_, a, b) = best.expect("cluster has two members");
    (a, b)
}

/// Steps 1 to 3 in sequence.
pub fn reduce(c: &Cirquent) -> Result<(Cirquent, Vec<TraceEntry>)> {
    let (c1, mut trace) = step1(c)?;
    let (c2, t2) = step2(&c1)?;
    let (c3, t3) = step3(&c2)?;
    trace.extend(t2);
    trace.extend(t3);
    Ok((c3, trace))
}

pub fn prove(c: &Cirquent) -> Result<SynthesisResult> {
    prove_with(c, Caps::default())
}

pub fn prove_with(c: &Cirquent, caps: Caps) -> Result<SynthesisResult> {
    synthesize(c, caps).map(|s| s.result)
}

/// Runs the procedure and self-checks its output: proofs must pass the
/// checker and counterexamples must falsify the input.
pub fn synthesize(c: &Cirquent, caps: Caps) -> Result<Synthesis> {
    c.validate().into_result()?;
    caps.check(c)?;
    let (residue, trace) = if c.is_classical() {
        (c.clone(), Vec::new())
    } else {
        reduce(c)?
    };
    let result = match first_classical_falsifier(&residue, caps)? {
        None => {
            let mut pf = Proof::new(residue.clone());
            for entry in trace.iter().rev() {
                pf.push(entry.conclusion.clone(), entry.app.clone());
            }
            if let CheckVerdict::Rejected { step, reason } = check_proof_with(&pf, caps) {
                return Err(Error::Internal(format!(
                    "synthesized proof rejected at step {step}: {reason}"
                )));
            }
            SynthesisResult::Proof(pf)
        }
        Some(mut star) => {
            for atom in c.atoms() {
                if star.get(&atom).is_none() {
                    star.set(atom, false);
                }
            }
            if true_under_with(c, &star, caps)? {
                return Err(Error::Internal(format!(
                    "residue row {star} does not falsify the input"
                )));
            }
            SynthesisResult::Counterexample(star)
        }
    };
    Ok(Synthesis {
        result,
        residue,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::check_proof;
    use crate::rules::RuleTag;
    use crate::semantics::{true_under, valid, ValidityVerdict};
    use crate::syntax::parse;

    fn c(s: &str) -> Cirquent {
        parse(s).unwrap()
    }

    fn path(s: &str) -> Path {
        s.parse().unwrap()
    }

    const BRIDGE: &str = "((p |[1:1] q) &[2:2] (r |[1:1] s))";

    fn all_interpretations(c: &Cirquent) -> Vec<Interpretation> {
        let atoms: Vec<_> = c.atoms().into_iter().collect();
        (0..1u64 << atoms.len())
            .map(|n| Interpretation::nth(&atoms, n))
            .collect()
    }

    fn equivalent(x: &Cirquent, y: &Cirquent) -> bool {
        all_interpretations(x).iter().all(|s| {
            let mut full = s.clone();
            for atom in y.atoms() {
                if full.get(&atom).is_none() {
                    full.set(atom, false);
                }
            }
            true_under(x, &full).unwrap() == true_under(y, &full).unwrap()
        })
    }

    #[test]
    fn step1_examples() {
        let input = c("((p |[1:1] q) &[2:2] r)");
        let (out, trace) = step1(&input).unwrap();
        assert_eq!(out.to_string(), "((p &[3:2] r) |[1:1] (q &[4:2] r))");
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].app.rule, RuleTag::IILeft);
        assert!(equivalent(&input, &out));

        let (out, trace) = step1(&c("(p |[1:1] ~p)")).unwrap();
        assert_eq!(out, c("(p |[1:1] ~p)"));
        assert!(trace.is_empty());
    }

    #[test]
    fn step1_on_bridge_lifts_both_disjunctions() {
        let (out, trace) = step1(&c(BRIDGE)).unwrap();
        assert_eq!(
            out.to_string(),
            "(((p &[5:2] r) |[1:1] (p &[6:2] s)) |[1:1] ((q &[7:2] r) |[1:1] (q &[8:2] s)))"
        );
        let rules: Vec<_> = trace.iter().map(|e| e.app.rule).collect();
        assert_eq!(rules, [RuleTag::IILeft, RuleTag::IIRight, RuleTag::IIRight]);
        assert!(property1_violation(&out).is_none());
        assert!(equivalent(&c(BRIDGE), &out));
    }

    #[test]
    fn step2_examples() {
        let (out, trace) = step2(&c("((p |[1:1] q) |[1:1] r)")).unwrap();
        assert_eq!(out, c("(p |[1:1] r)"));
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].app.rule, RuleTag::ILeft);

        let (out, trace) = step2(&c("(p |[1:1] (q |[1:1] r))")).unwrap();
        assert_eq!(out, c("(p |[1:1] r)"));
        assert_eq!(trace[0].app.rule, RuleTag::IRight);

        let lifted = c("((p &[3:2] r) |[1:1] (q &[4:2] s))");
        let (out, trace) = step2(&lifted).unwrap();
        assert_eq!(out, lifted);
        assert!(trace.is_empty());

        let (out, _) = step1(&c(BRIDGE)).and_then(|(c1, _)| step2(&c1)).unwrap();
        assert_eq!(out.to_string(), "((p &[5:2] r) |[1:1] (q &[8:2] s))");
    }

    #[test]
    fn step2_requires_property1() {
        assert!(matches!(
            step2(&c("((p |[1:1] q) &[2:2] r)")),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn step3_examples() {
        let classical = c("((p &[3:2] r) |[1:1] (q &[4:2] s))");
        let (out, trace) = step3(&classical).unwrap();
        assert_eq!(out, classical);
        assert!(trace.is_empty());

        let (out, trace) = step3(&c("((p |[1:1] q) |[2:1] (~p |[1:1] ~q))")).unwrap();
        assert_eq!(out.to_string(), "((p |[3:1] ~p) |[1:1] (q |[4:1] ~q))");
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].app.rule, RuleTag::III);

        let (out, trace) = step3(&c("((p |[2:2] q) &[1:1] (r |[2:2] s))")).unwrap();
        assert_eq!(out.to_string(), "((p |[2:2] q) &[1:1] (r |[3:2] s))");
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].app.rule, RuleTag::IV);
        assert_eq!(trace[0].phase, Phase::Step32);
    }

    #[test]
    fn step3_lifts_before_merging() {
        // cluster 1 members sit two levels below their common ancestor
        let input = c("(((p |[1:1] q) |[5:1] r) |[6:1] (s |[1:1] t))");
        let (out, trace) = step3(&input).unwrap();
        assert!(out.is_classical());
        assert!(trace.iter().any(|e| e.app.rule == RuleTag::IILeft));
        assert!(equivalent(&input, &out));
        let states: Vec<StateTuple> = trace
            .iter()
            .filter_map(|e| match &e.measure {
                Some(Measure::State(s)) => Some(*s),
                _ => None,
            })
            .collect();
        assert!(states.windows(2).all(|w| w[1] < w[0]), "{states:?}");
    }

    #[test]
    fn prove_examples() {
        match prove(&c("(p |[1:1] ~p)")).unwrap() {
            SynthesisResult::Proof(pf) => {
                assert_eq!(pf.len(), 1);
                assert!(check_proof(&pf).is_accepted());
            }
            other => panic!("unexpected {other:?}"),
        }

        let target = c("((p |[1:1] q) |[2:1] (~p |[1:1] ~q))");
        match prove(&target).unwrap() {
            SynthesisResult::Proof(pf) => {
                assert_eq!(pf.len(), 2);
                assert_eq!(
                    pf.steps[0].cirquent,
                    c("((p |[3:1] ~p) |[1:1] (q |[4:1] ~q))")
                );
                assert_eq!(pf.conclusion(), Some(&target));
                assert!(check_proof(&pf).is_accepted());
            }
            other => panic!("unexpected {other:?}"),
        }

        let bridge = c(BRIDGE);
        match prove(&bridge).unwrap() {
            SynthesisResult::Counterexample(star) => {
                assert!(!true_under(&bridge, &star).unwrap());
                assert_eq!(
                    valid(&bridge).unwrap(),
                    ValidityVerdict::Invalid {
                        counterexample: star
                    }
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn i_distribution_examples() {
        let d = i_distribution_of(&c("((p |[1:1] q) &[2:2] r)"), 1);
        assert_eq!(d.counts(), [0, 1]);
        let d2 = i_distribution_of(&c("((p &[3:2] r) |[1:1] (q &[4:2] r))"), 1);
        assert_eq!(d2.counts(), [1]);
        assert!(d2 < d);
        assert!(i_distribution_of(&c(BRIDGE), 7).is_zero());
        assert_eq!(
            IDistribution::from_counts(vec![1, 0, 0]),
            IDistribution::from_counts(vec![1])
        );
    }

    #[test]
    fn state_examples() {
        let cq = c("((p |[1:1] q) |[2:1] (~p |[1:1] ~q))");
        let a = Pin::new(path("L"));
        let b = Pin::new(path("R"));
        assert_eq!(
            state_of(&cq, 1, 1, 2, &a, Some(&b)).unwrap(),
            StateTuple {
                x: 2,
                y: 0,
                z: 2,
                t: 0
            }
        );
        let merged = c("((p |[3:1] ~p) |[1:1] (q |[4:1] ~q))");
        let s = state_of(&merged, 1, 1, 1, &Pin::new(Path::root()), None).unwrap();
        assert_eq!(s.x, 1);
        assert_eq!(s.z, -1);
        assert!(matches!(
            state_of(&cq, 1, 1, 2, &a, Some(&a)),
            Err(Error::InvalidPin(_))
        ));
        assert!(matches!(
            state_of(&cq, 1, 1, 2, &Pin::new(Path::root()), Some(&b)),
            Err(Error::InvalidPin(_))
        ));
    }

    #[test]
    fn properties() {
        assert_eq!(
            property1_violation(&c("((p |[1:1] q) &[2:2] r)")),
            Some((path("L"), Path::root()))
        );
        assert_eq!(
            property2_violation(&c("((p |[1:1] q) |[1:1] r)")),
            Some((Path::root(), path("L")))
        );
        assert_eq!(property2_violation(&c(BRIDGE)), None);
    }

    #[test]
    fn trace_lines() {
        let (_, trace) = step1(&c("((p |[1:1] q) &[2:2] r)")).unwrap();
        assert_eq!(
            trace[0].to_string(),
            "step=1 rule=II-left at=. k=1,i=1,l=2,j=2,m=3,n=4 measure=(1)"
        );
    }
}
