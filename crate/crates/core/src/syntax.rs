//! Cirquent syntax: literals, indexed connectives, paths into the tree and
//! the structural queries the rules and the synthesis procedure rely on.
//!
//! A cirquent is a binary tree whose internal nodes carry an [`Index`]
//! `cluster:rank`. Nodes with the same cluster ID share one left/right
//! choice; clusters with the same rank label are chosen together, ranks
//! being quantified in ascending order.
//!
//! Concrete syntax (whitespace-insensitive between tokens):
//!
//! ```text
//! cirquent := literal | '(' cirquent op cirquent ')'
//! literal  := ['~'] atom
//! op       := '&[' nat ':' nat ']' | '|[' nat ':' nat ']'
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A propositional atom, `[a-z][a-z0-9_]*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let mut chars = name.chars();
        let ok = matches!(chars.next(), Some('a'..='z'))
            && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'));
        if ok {
            Ok(Atom(name))
        } else {
            Err(Error::InvalidAtom(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub polarity: Polarity,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal {
            atom,
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(atom: Atom) -> Self {
        Literal {
            atom,
            polarity: Polarity::Negative,
        }
    }

    pub fn negated(&self) -> Self {
        let polarity = match self.polarity {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        };
        Literal {
            atom: self.atom.clone(),
            polarity,
        }
    }

    /// Value of the literal given the value of its atom.
    pub fn value(&self, atom_value: bool) -> bool {
        match self.polarity {
            Polarity::Positive => atom_value,
            Polarity::Negative => !atom_value,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.polarity == Polarity::Negative {
            f.write_str("~")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// `cluster:rank` annotation of a connective occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index {
    pub cluster: u32,
    pub rank: u32,
}

impl Index {
    pub fn new(cluster: u32, rank: u32) -> Result<Self> {
        if cluster == 0 || rank == 0 {
            return Err(Error::ZeroIndex);
        }
        Ok(Index { cluster, rank })
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.cluster, self.rank)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    And,
    Or,
}

impl Op {
    pub fn dual(self) -> Op {
        match self {
            Op::And => Op::Or,
            Op::Or => Op::And,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::And => "&",
            Op::Or => "|",
        }
    }
}

/// One step of a [`Path`], also the value of a metaselection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Address of a node: the sequence of left/right steps from the root.
///
/// The derived ordering is preorder: a path precedes its extensions, and
/// left subtrees precede right ones.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<Side>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    pub fn from_sides(sides: Vec<Side>) -> Self {
        Path(sides)
    }

    pub fn sides(&self) -> &[Side] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, side: Side) -> Path {
        let mut sides = self.0.clone();
        sides.push(side);
        Path(sides)
    }

    pub fn parent(&self) -> Option<Path> {
        if self.0.is_empty() {
            None
        } else {
            Some(Path(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last(&self) -> Option<Side> {
        self.0.last().copied()
    }

    pub fn join(&self, suffix: &Path) -> Path {
        let mut sides = self.0.clone();
        sides.extend_from_slice(&suffix.0);
        Path(sides)
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// The part of `self` below `prefix`, if `prefix` is a prefix.
    pub fn strip_prefix(&self, prefix: &Path) -> Option<Path> {
        if prefix.is_prefix_of(self) {
            Some(Path(self.0[prefix.0.len()..].to_vec()))
        } else {
            None
        }
    }

    pub fn common_prefix(&self, other: &Path) -> Path {
        let n = self
            .0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count();
        Path(self.0[..n].to_vec())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(".");
        }
        for (n, side) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str("/")?;
            }
            f.write_str(match side {
                Side::Left => "L",
                Side::Right => "R",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Path {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "." {
            return Ok(Path::root());
        }
        s.split('/')
            .enumerate()
            .map(|(n, step)| match step {
                "L" => Ok(Side::Left),
                "R" => Ok(Side::Right),
                other => Err(Error::Syntax {
                    offset: n,
                    message: format!("bad path step `{other}`"),
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Path)
    }
}

/// A cirquent: a literal or an indexed binary connective.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cirquent {
    Literal(Literal),
    Node {
        op: Op,
        index: Index,
        left: Box<Cirquent>,
        right: Box<Cirquent>,
    },
}

/// Per-cluster summary gathered by [`Cirquent::clusters`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterInfo {
    pub op: Op,
    pub rank: u32,
    /// Member occurrences in preorder.
    pub members: Vec<Path>,
}

/// An internal node seen during a traversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeRef {
    pub path: Path,
    pub op: Op,
    pub index: Index,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    MixedClusterType,
    MixedClusterRank,
    MixedRankType,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::MixedClusterType => "mixed-cluster-type",
            ViolationKind::MixedClusterRank => "mixed-cluster-rank",
            ViolationKind::MixedRankType => "mixed-rank-type",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellFormednessReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl WellFormednessReport {
    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn into_result(self) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            let detail = self
                .violations
                .iter()
                .map(|v| format!("{}: {}", v.kind, v.detail))
                .collect::<Vec<_>>()
                .join("; ");
            Err(Error::IllFormed(detail))
        }
    }
}

impl Cirquent {
    pub fn literal(lit: Literal) -> Self {
        Cirquent::Literal(lit)
    }

    /// Positive literal; panics on an invalid atom name.
    pub fn atom(name: &str) -> Self {
        Cirquent::Literal(Literal::positive(Atom::new(name).expect("valid atom")))
    }

    /// Negative literal; panics on an invalid atom name.
    pub fn neg_atom(name: &str) -> Self {
        Cirquent::Literal(Literal::negative(Atom::new(name).expect("valid atom")))
    }

    pub fn node(op: Op, index: Index, left: Cirquent, right: Cirquent) -> Self {
        Cirquent::Node {
            op,
            index,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Cirquent::Literal(_))
    }

    /// `(op, index)` of an internal node.
    pub fn connective(&self) -> Option<(Op, Index)> {
        match self {
            Cirquent::Literal(_) => None,
            Cirquent::Node { op, index, .. } => Some((*op, *index)),
        }
    }

    pub fn children(&self) -> Option<(&Cirquent, &Cirquent)> {
        match self {
            Cirquent::Literal(_) => None,
            Cirquent::Node { left, right, .. } => Some((left, right)),
        }
    }

    pub fn child(&self, side: Side) -> Option<&Cirquent> {
        self.children().map(|(l, r)| match side {
            Side::Left => l,
            Side::Right => r,
        })
    }

    pub fn node_at(&self, path: &Path) -> Result<&Cirquent> {
        let mut cur = self;
        for &side in path.sides() {
            cur = cur
                .child(side)
                .ok_or_else(|| Error::PathOutOfRange(path.clone()))?;
        }
        Ok(cur)
    }

    /// `(op, index)` of the connective at `path`.
    pub fn connective_at(&self, path: &Path) -> Result<(Op, Index)> {
        self.node_at(path)?
            .connective()
            .ok_or_else(|| Error::NotAConnective(path.clone()))
    }

    /// Structural replacement of the subtree at `path`; no re-indexing.
    pub fn replace_at(&self, path: &Path, sub: Cirquent) -> Result<Cirquent> {
        fn go(c: &Cirquent, sides: &[Side], sub: Cirquent) -> Option<Cirquent> {
            let Some((&first, rest)) = sides.split_first() else {
                return Some(sub);
            };
            match c {
                Cirquent::Literal(_) => None,
                Cirquent::Node {
                    op,
                    index,
                    left,
                    right,
                } => {
                    let (l, r) = match first {
                        Side::Left => (go(left, rest, sub)?, (**right).clone()),
                        Side::Right => ((**left).clone(), go(right, rest, sub)?),
                    };
                    Some(Cirquent::node(*op, *index, l, r))
                }
            }
        }
        go(self, path.sides(), sub).ok_or_else(|| Error::PathOutOfRange(path.clone()))
    }

    /// Internal nodes in preorder.
    pub fn nodes(&self) -> Vec<NodeRef> {
        fn go(c: &Cirquent, path: &mut Vec<Side>, out: &mut Vec<NodeRef>) {
            if let Cirquent::Node {
                op,
                index,
                left,
                right,
            } = c
            {
                out.push(NodeRef {
                    path: Path(path.clone()),
                    op: *op,
                    index: *index,
                });
                path.push(Side::Left);
                go(left, path, out);
                path.pop();
                path.push(Side::Right);
                go(right, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Literal occurrences in preorder (left to right).
    pub fn literals(&self) -> Vec<&Literal> {
        fn go<'a>(c: &'a Cirquent, out: &mut Vec<&'a Literal>) {
            match c {
                Cirquent::Literal(l) => out.push(l),
                Cirquent::Node { left, right, .. } => {
                    go(left, out);
                    go(right, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn connective_count(&self) -> usize {
        match self {
            Cirquent::Literal(_) => 0,
            Cirquent::Node { left, right, .. } => {
                1 + left.connective_count() + right.connective_count()
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.literals()
            .into_iter()
            .map(|l| l.atom.clone())
            .collect()
    }

    /// Distinct rank labels, ascending.
    pub fn ranks(&self) -> BTreeSet<u32> {
        self.nodes().into_iter().map(|n| n.index.rank).collect()
    }

    pub fn cluster_ids(&self) -> BTreeSet<u32> {
        self.nodes().into_iter().map(|n| n.index.cluster).collect()
    }

    pub fn max_cluster_id(&self) -> u32 {
        self.nodes()
            .into_iter()
            .map(|n| n.index.cluster)
            .max()
            .unwrap_or(0)
    }

    pub fn occurs(&self, cluster: u32) -> bool {
        self.cluster_size(cluster) > 0
    }

    pub fn cluster_size(&self, cluster: u32) -> usize {
        match self {
            Cirquent::Literal(_) => 0,
            Cirquent::Node {
                index, left, right, ..
            } => {
                usize::from(index.cluster == cluster)
                    + left.cluster_size(cluster)
                    + right.cluster_size(cluster)
            }
        }
    }

    /// Clusters keyed by ID. Op and rank are those of the first member in
    /// preorder; call [`Cirquent::validate`] to rule out mixed clusters.
    pub fn clusters(&self) -> BTreeMap<u32, ClusterInfo> {
        let mut map: BTreeMap<u32, ClusterInfo> = BTreeMap::new();
        for n in self.nodes() {
            map.entry(n.index.cluster)
                .or_insert_with(|| ClusterInfo {
                    op: n.op,
                    rank: n.index.rank,
                    members: Vec::new(),
                })
                .members
                .push(n.path);
        }
        map
    }

    /// Check the three homogeneity conditions on clusters and ranks.
    pub fn validate(&self) -> WellFormednessReport {
        let mut cluster_ops: BTreeMap<u32, BTreeSet<Op>> = BTreeMap::new();
        let mut cluster_ranks: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        let mut rank_ops: BTreeMap<u32, BTreeMap<Op, BTreeSet<u32>>> = BTreeMap::new();
        for n in self.nodes() {
            cluster_ops.entry(n.index.cluster).or_default().insert(n.op);
            cluster_ranks
                .entry(n.index.cluster)
                .or_default()
                .insert(n.index.rank);
            rank_ops
                .entry(n.index.rank)
                .or_default()
                .entry(n.op)
                .or_default()
                .insert(n.index.cluster);
        }
        let mut violations = Vec::new();
        for (k, ops) in &cluster_ops {
            if ops.len() > 1 {
                violations.push(Violation {
                    kind: ViolationKind::MixedClusterType,
                    detail: format!("cluster {k} holds both & and |"),
                });
            }
        }
        for (k, ranks) in &cluster_ranks {
            if ranks.len() > 1 {
                let list = ranks.iter().map(u32::to_string).collect::<Vec<_>>();
                violations.push(Violation {
                    kind: ViolationKind::MixedClusterRank,
                    detail: format!("cluster {k} carries ranks {}", list.join(", ")),
                });
            }
        }
        for (rank, by_op) in &rank_ops {
            if let (Some(ands), Some(ors)) = (by_op.get(&Op::And), by_op.get(&Op::Or)) {
                // a single mixed cluster is already reported above
                let distinct = ands.iter().any(|a| ors.iter().any(|o| a != o));
                if distinct {
                    violations.push(Violation {
                        kind: ViolationKind::MixedRankType,
                        detail: format!("rank {rank} holds both &-clusters and |-clusters"),
                    });
                }
            }
        }
        WellFormednessReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    /// Simultaneously rename cluster IDs according to `map`; ranks are kept.
    pub fn rename_clusters(&self, map: &BTreeMap<u32, u32>) -> Cirquent {
        match self {
            Cirquent::Literal(_) => self.clone(),
            Cirquent::Node {
                op,
                index,
                left,
                right,
            } => {
                let cluster = map.get(&index.cluster).copied().unwrap_or(index.cluster);
                Cirquent::node(
                    *op,
                    Index {
                        cluster,
                        rank: index.rank,
                    },
                    left.rename_clusters(map),
                    right.rename_clusters(map),
                )
            }
        }
    }

    /// Replace every occurrence of index `from` by `to`.
    pub fn relabel_cluster(&self, from: Index, to: Index) -> Result<Cirquent> {
        if from.rank != to.rank {
            return Err(Error::RankMismatch {
                from: from.rank,
                to: to.rank,
            });
        }
        let clusters = self.clusters();
        if let (Some(src), Some(dst)) = (clusters.get(&from.cluster), clusters.get(&to.cluster)) {
            if from.cluster != to.cluster && (src.op != dst.op || src.rank != dst.rank) {
                return Err(Error::TypeConflict(to.cluster));
            }
        }
        Ok(self.map_indices(&|index| if index == from { to } else { index }))
    }

    fn map_indices(&self, f: &dyn Fn(Index) -> Index) -> Cirquent {
        match self {
            Cirquent::Literal(_) => self.clone(),
            Cirquent::Node {
                op,
                index,
                left,
                right,
            } => Cirquent::node(*op, f(*index), left.map_indices(f), right.map_indices(f)),
        }
    }

    /// Number of connectives strictly containing the connective at `path`.
    pub fn level_of(&self, path: &Path) -> Result<usize> {
        self.connective_at(path)?;
        Ok(path.len())
    }

    /// Nearest common ancestor of two non-nested connectives.
    pub fn nca_of(&self, p: &Path, q: &Path) -> Result<Path> {
        self.connective_at(p)?;
        self.connective_at(q)?;
        if p.is_prefix_of(q) || q.is_prefix_of(p) {
            return Err(Error::NestedPair(p.clone(), q.clone()));
        }
        Ok(p.common_prefix(q))
    }

    /// True iff every cluster is a singleton.
    pub fn is_classical(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.nodes()
            .into_iter()
            .all(|n| seen.insert(n.index.cluster))
    }

    /// Canonical formula form: the n-th connective in preorder gets index `n:n`.
    pub fn to_formula(&self) -> Result<Cirquent> {
        if !self.is_classical() {
            return Err(Error::NotClassical);
        }
        fn go(c: &Cirquent, next: &mut u32) -> Cirquent {
            match c {
                Cirquent::Literal(_) => c.clone(),
                Cirquent::Node {
                    op, left, right, ..
                } => {
                    let n = *next;
                    *next += 1;
                    let l = go(left, next);
                    let r = go(right, next);
                    Cirquent::node(
                        *op,
                        Index {
                            cluster: n,
                            rank: n,
                        },
                        l,
                        r,
                    )
                }
            }
        }
        Ok(go(self, &mut 1))
    }

    /// De Morgan negation of a classical cirquent. Ranks are kept; cluster
    /// IDs are fresh, numbered from one past the current maximum in preorder.
    pub fn negate_formula(&self) -> Result<Cirquent> {
        if !self.is_classical() {
            return Err(Error::NotClassical);
        }
        fn go(c: &Cirquent, next: &mut u32) -> Cirquent {
            match c {
                Cirquent::Literal(l) => Cirquent::Literal(l.negated()),
                Cirquent::Node {
                    op,
                    index,
                    left,
                    right,
                } => {
                    let k = *next;
                    *next += 1;
                    let l = go(left, next);
                    let r = go(right, next);
                    Cirquent::node(
                        op.dual(),
                        Index {
                            cluster: k,
                            rank: index.rank,
                        },
                        l,
                        r,
                    )
                }
            }
        }
        Ok(go(self, &mut (self.max_cluster_id() + 1)))
    }

    /// Equality of the index-stripped formulas.
    pub fn same_formula(&self, other: &Cirquent) -> bool {
        match (self, other) {
            (Cirquent::Literal(a), Cirquent::Literal(b)) => a == b,
            (
                Cirquent::Node {
                    op: o1,
                    left: l1,
                    right: r1,
                    ..
                },
                Cirquent::Node {
                    op: o2,
                    left: l2,
                    right: r2,
                    ..
                },
            ) => o1 == o2 && l1.same_formula(l2) && r1.same_formula(r2),
            _ => false,
        }
    }

    /// Structural equality up to a bijective renaming of cluster IDs.
    pub fn alpha_eq(&self, other: &Cirquent) -> bool {
        fn go(
            a: &Cirquent,
            b: &Cirquent,
            fwd: &mut HashMap<u32, u32>,
            bwd: &mut HashMap<u32, u32>,
        ) -> bool {
            match (a, b) {
                (Cirquent::Literal(x), Cirquent::Literal(y)) => x == y,
                (
                    Cirquent::Node {
                        op: o1,
                        index: i1,
                        left: l1,
                        right: r1,
                    },
                    Cirquent::Node {
                        op: o2,
                        index: i2,
                        left: l2,
                        right: r2,
                    },
                ) => {
                    if o1 != o2 || i1.rank != i2.rank {
                        return false;
                    }
                    if *fwd.entry(i1.cluster).or_insert(i2.cluster) != i2.cluster
                        || *bwd.entry(i2.cluster).or_insert(i1.cluster) != i1.cluster
                    {
                        return false;
                    }
                    go(l1, l2, fwd, bwd) && go(r1, r2, fwd, bwd)
                }
                _ => false,
            }
        }
        go(self, other, &mut HashMap::new(), &mut HashMap::new())
    }
}

impl fmt::Display for Cirquent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cirquent::Literal(l) => write!(f, "{l}"),
            Cirquent::Node {
                op,
                index,
                left,
                right,
            } => write!(f, "({left} {}[{index}] {right})", op.symbol()),
        }
    }
}

impl FromStr for Cirquent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// Canonical rendering; the inverse of [`parse`].
pub fn render(c: &Cirquent) -> String {
    c.to_string()
}

/// Parse a complete cirquent. Only grammar errors are reported here;
/// homogeneity is checked by [`Cirquent::validate`].
pub fn parse(input: &str) -> Result<Cirquent> {
    let mut p = Parser::new(input);
    let c = p.cirquent()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(c)
}

/// Parse a cirquent at the start of `input`, returning it together with the
/// number of bytes consumed (trailing whitespace excluded).
pub fn parse_prefix(input: &str) -> Result<(Cirquent, usize)> {
    let mut p = Parser::new(input);
    let c = p.cirquent()?;
    Ok((c, p.pos))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            src: input.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        match self.peek() {
            Some(b) if b == byte => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(self.error(format!(
                "expected `{}`, found `{}`",
                byte as char, b as char
            ))),
            None => Err(self.error(format!("expected `{}`, found end of input", byte as char))),
        }
    }

    fn cirquent(&mut self) -> Result<Cirquent> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let left = self.cirquent()?;
                let op = match self.peek() {
                    Some(b'&') => Op::And,
                    Some(b'|') => Op::Or,
                    Some(b) => {
                        return Err(
                            self.error(format!("expected `&` or `|`, found `{}`", b as char))
                        )
                    }
                    None => return Err(self.error("expected `&` or `|`, found end of input")),
                };
                self.pos += 1;
                self.expect(b'[')?;
                let cluster = self.nat()?;
                self.expect(b':')?;
                let rank = self.nat()?;
                self.expect(b']')?;
                let right = self.cirquent()?;
                self.expect(b')')?;
                Ok(Cirquent::node(op, Index { cluster, rank }, left, right))
            }
            Some(b'~') => {
                self.pos += 1;
                Ok(Cirquent::Literal(Literal::negative(self.atom()?)))
            }
            Some(_) => Ok(Cirquent::Literal(Literal::positive(self.atom()?))),
            None => Err(self.error("expected a cirquent, found end of input")),
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        self.skip_ws();
        let start = self.pos;
        if !matches!(self.src.get(self.pos), Some(b'a'..=b'z')) {
            return Err(match self.src.get(self.pos) {
                Some(&b) => self.error(format!("expected an atom, found `{}`", b as char)),
                None => self.error("expected an atom, found end of input"),
            });
        }
        while matches!(
            self.src.get(self.pos),
            Some(b'a'..=b'z' | b'0'..=b'9' | b'_')
        ) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Atom::new(name)
    }

    fn nat(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.src.get(self.pos), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a positive integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match text.parse::<u32>() {
            Ok(0) => {
                self.pos = start;
                Err(self.error("index components must be positive"))
            }
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos = start;
                Err(self.error("integer out of range"))
            }
        }
    }
}
