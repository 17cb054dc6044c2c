//! Generators shared by the integration tests: random and exhaustive
//! cirquent corpora, and automatic parameter choice for rule instances.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rifp::semantics::naive_true_under;
use rifp::syntax::Polarity;
use rifp::{
    true_under, Atom, Cirquent, Index, Interpretation, Literal, Op, Path, RuleApplication, RuleTag,
    Side,
};

pub const BRIDGE: &str = "((p |[1:1] q) &[2:2] (r |[1:1] s))";
pub const LADDER: &str = "((r |[1:1] s) &[2:2] ((p |[1:1] q) &[3:2] q))";
pub const WORKED: &str = "((p |[1:1] q) |[2:1] (~p |[1:1] ~q))";
pub const WORKED_AXIOM: &str = "((p |[3:1] ~p) |[1:1] (q |[4:1] ~q))";

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn parse(s: &str) -> Cirquent {
    rifp::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn random_literal(rng: &mut StdRng, atoms: &[&str]) -> Cirquent {
    let atom = Atom::new(*atoms.choose(rng).expect("atoms")).expect("valid atom");
    if rng.gen_bool(0.5) {
        Cirquent::literal(Literal::positive(atom))
    } else {
        Cirquent::literal(Literal::negative(atom))
    }
}

/// Ops per rank label and ranks per cluster ID. Any tree drawing its
/// indices from one palette is well-formed.
#[derive(Clone, Debug)]
pub struct Palette {
    pub ops: BTreeMap<u32, Op>,
    pub clusters: Vec<Index>,
    pub atoms: Vec<&'static str>,
}

impl Palette {
    pub fn random(
        rng: &mut StdRng,
        max_ranks: u32,
        max_clusters: u32,
        atoms: &[&'static str],
    ) -> Self {
        let ranks = rng.gen_range(1..=max_ranks);
        let ops = (1..=ranks)
            .map(|r| (r, if rng.gen_bool(0.5) { Op::And } else { Op::Or }))
            .collect();
        let count = rng.gen_range(1..=max_clusters);
        let clusters = (1..=count)
            .map(|k| Index::new(k, rng.gen_range(1..=ranks)).expect("positive"))
            .collect();
        Palette {
            ops,
            clusters,
            atoms: atoms.to_vec(),
        }
    }

    pub fn cirquent(&self, rng: &mut StdRng, connectives: usize) -> Cirquent {
        if connectives == 0 {
            return random_literal(rng, &self.atoms);
        }
        let left = rng.gen_range(0..connectives);
        let index = *self.clusters.choose(rng).expect("clusters");
        let l = self.cirquent(rng, left);
        let r = self.cirquent(rng, connectives - 1 - left);
        Cirquent::node(self.ops[&index.rank], index, l, r)
    }
}

/// Random well-formed cirquent with heavy cluster sharing.
pub fn random_cirquent(
    rng: &mut StdRng,
    max_connectives: usize,
    atoms: &[&'static str],
) -> Cirquent {
    let palette = Palette::random(rng, 3, 4, atoms);
    let n = rng.gen_range(0..=max_connectives);
    palette.cirquent(rng, n)
}

/// Random all-singleton cirquent: fresh cluster per connective.
pub fn random_classical(
    rng: &mut StdRng,
    max_connectives: usize,
    atoms: &[&'static str],
) -> Cirquent {
    let ranks = rng.gen_range(1..=3u32);
    let ops: Vec<Op> = (0..ranks)
        .map(|_| if rng.gen_bool(0.5) { Op::And } else { Op::Or })
        .collect();
    let n = rng.gen_range(0..=max_connectives);
    let mut next = 1;
    fn go(rng: &mut StdRng, n: usize, ops: &[Op], atoms: &[&str], next: &mut u32) -> Cirquent {
        if n == 0 {
            return random_literal(rng, atoms);
        }
        let rank = rng.gen_range(1..=ops.len() as u32);
        let index = Index::new(*next, rank).expect("positive");
        *next += 1;
        let left = rng.gen_range(0..n);
        let l = go(rng, left, ops, atoms, next);
        let r = go(rng, n - 1 - left, ops, atoms, next);
        Cirquent::node(ops[rank as usize - 1], index, l, r)
    }
    go(rng, n, &ops, atoms, &mut next)
}

pub fn all_interpretations(atoms: &BTreeSet<Atom>) -> Vec<Interpretation> {
    let atoms: Vec<Atom> = atoms.iter().cloned().collect();
    (0..1u64 << atoms.len())
        .map(|n| Interpretation::nth(&atoms, n))
        .collect()
}

pub fn joint_atoms(cs: &[&Cirquent]) -> BTreeSet<Atom> {
    cs.iter().flat_map(|c| c.atoms()).collect()
}

/// Interpretations where `x` and `y` disagree, by the naive evaluator.
pub fn disagreements(x: &Cirquent, y: &Cirquent) -> Vec<Interpretation> {
    all_interpretations(&joint_atoms(&[x, y]))
        .into_iter()
        .filter(|s| naive_true_under(x, s).unwrap() != naive_true_under(y, s).unwrap())
        .collect()
}

pub fn fast_disagreements(x: &Cirquent, y: &Cirquent) -> Vec<Interpretation> {
    all_interpretations(&joint_atoms(&[x, y]))
        .into_iter()
        .filter(|s| true_under(x, s).unwrap() != true_under(y, s).unwrap())
        .collect()
}

/// Every position, literals included, in preorder.
pub fn all_positions(c: &Cirquent) -> Vec<Path> {
    fn go(c: &Cirquent, here: Path, out: &mut Vec<Path>) {
        out.push(here.clone());
        if let Some((l, r)) = c.children() {
            go(l, here.child(Side::Left), out);
            go(r, here.child(Side::Right), out);
        }
    }
    let mut out = Vec::new();
    go(c, Path::root(), &mut out);
    out
}

fn side_of(tag: RuleTag) -> Side {
    match tag {
        RuleTag::IRight | RuleTag::IIRight => Side::Right,
        _ => Side::Left,
    }
}

fn partner_ids(c: &Cirquent, partner: u32) -> (u32, u32) {
    if c.cluster_size(partner) > 1 {
        (partner, partner)
    } else {
        let m = c.max_cluster_id() + 1;
        (m, m + 1)
    }
}

/// Parameters for a backward application of `tag` at `at`, chosen the
/// obvious way. `None` when the shape does not fit at all; side conditions
/// are left to the rule.
pub fn auto_backward(c: &Cirquent, tag: RuleTag, at: &Path) -> Option<RuleApplication> {
    let (_, idx) = c.connective_at(at).ok()?;
    let side = side_of(tag);
    match tag {
        RuleTag::ILeft | RuleTag::IRight => {
            let arg = at.child(side);
            let desc = c
                .nodes()
                .into_iter()
                .filter(|n| n.index == idx && arg.is_prefix_of(&n.path))
                .map(|n| n.path)
                .min_by(|x, y| (x.len(), x).cmp(&(y.len(), y)))?;
            let removed = c.node_at(&desc).ok()?.child(side.flip())?.clone();
            let inner = desc.strip_prefix(&arg)?;
            Some(RuleApplication::insertion(
                side,
                at.clone(),
                inner,
                Some(removed),
            ))
        }
        RuleTag::IILeft | RuleTag::IIRight => {
            let (_, key) = c.connective_at(&at.child(side)).ok()?;
            let (m, n) = partner_ids(c, idx.cluster);
            let mut next = c.max_cluster_id() + 1 + if m == idx.cluster { 0 } else { 2 };
            let shared = c.node_at(&at.child(side.flip())).ok()?;
            let mut split = BTreeMap::new();
            for s in shared.cluster_ids() {
                if c.cluster_size(s) == 1 {
                    split.insert(s, (next, next + 1));
                    next += 2;
                }
            }
            Some(RuleApplication::distribution(
                side,
                at.clone(),
                key,
                idx,
                m,
                n,
                split,
            ))
        }
        RuleTag::III => {
            let (_, kl) = c.connective_at(&at.child(Side::Left)).ok()?;
            let (_, kr) = c.connective_at(&at.child(Side::Right)).ok()?;
            if kl != kr {
                return None;
            }
            let (m, n) = partner_ids(c, idx.cluster);
            Some(RuleApplication::medial(at.clone(), kl, idx, m, n))
        }
        RuleTag::IV => {
            let (l, r) = c.node_at(at).ok()?.children()?;
            let clusters = c.clusters();
            let shared = l
                .cluster_ids()
                .intersection(&r.cluster_ids())
                .copied()
                .find(|id| clusters[id].rank > idx.rank)?;
            let fresh = c.max_cluster_id() + 1;
            Some(RuleApplication::separation(
                at.clone(),
                idx,
                Index::new(shared, clusters[&shared].rank).ok()?,
                fresh,
            ))
        }
    }
}

/// Structural match of two copies; `Some(split)` maps each differing ID of
/// `x` to itself and its counterpart in `y`.
fn copies(x: &Cirquent, y: &Cirquent) -> Option<BTreeMap<u32, (u32, u32)>> {
    fn go(x: &Cirquent, y: &Cirquent, map: &mut BTreeMap<u32, u32>) -> bool {
        match (x, y) {
            (Cirquent::Literal(a), Cirquent::Literal(b)) => a == b,
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
                o1 == o2
                    && i1.rank == i2.rank
                    && *map.entry(i1.cluster).or_insert(i2.cluster) == i2.cluster
                    && go(l1, l2, map)
                    && go(r1, r2, map)
            }
            _ => false,
        }
    }
    let mut map = BTreeMap::new();
    if !go(x, y, &mut map) {
        return None;
    }
    Some(
        map.into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a, (a, b)))
            .collect(),
    )
}

/// Parameters for a forward application of `tag` at `at`. Rule I draws
/// the inserted subcirquent from `palette`.
pub fn auto_forward(
    c: &Cirquent,
    tag: RuleTag,
    at: &Path,
    rng: &mut StdRng,
    palette: &Palette,
) -> Option<RuleApplication> {
    let (_, idx) = c.connective_at(at).ok()?;
    let side = side_of(tag);
    let fresh = c.max_cluster_id() + 1;
    match tag {
        RuleTag::ILeft | RuleTag::IRight => {
            let arg = at.child(side);
            let inner = all_positions(c.node_at(&arg).ok()?).choose(rng)?.clone();
            let size = rng.gen_range(0..=2);
            let inserted = palette.cirquent(rng, size);
            Some(RuleApplication::insertion(
                side,
                at.clone(),
                inner,
                Some(inserted),
            ))
        }
        RuleTag::IILeft | RuleTag::IIRight | RuleTag::III => {
            let (lop, li) = c.connective_at(&at.child(Side::Left)).ok()?;
            let (rop, ri) = c.connective_at(&at.child(Side::Right)).ok()?;
            if lop != rop || li.rank != ri.rank {
                return None;
            }
            let l = if li.cluster == ri.cluster {
                li.cluster
            } else {
                fresh
            };
            let partner = Index::new(l, li.rank).ok()?;
            if tag == RuleTag::III {
                return Some(RuleApplication::medial(
                    at.clone(),
                    idx,
                    partner,
                    li.cluster,
                    ri.cluster,
                ));
            }
            let c1 = c.node_at(&at.child(Side::Left).child(side.flip())).ok()?;
            let c2 = c.node_at(&at.child(Side::Right).child(side.flip())).ok()?;
            let split = copies(c1, c2)?;
            Some(RuleApplication::distribution(
                side,
                at.clone(),
                idx,
                partner,
                li.cluster,
                ri.cluster,
                split,
            ))
        }
        RuleTag::IV => {
            let (a, b) = c.node_at(at).ok()?.children()?;
            let clusters = c.clusters();
            let (ids_a, ids_b) = (a.cluster_ids(), b.cluster_ids());
            let pairs: Vec<(u32, u32)> = ids_a
                .difference(&ids_b)
                .flat_map(|l| ids_b.difference(&ids_a).map(move |r| (*l, *r)))
                .filter(|(l, r)| {
                    clusters[l].rank == clusters[r].rank && clusters[l].rank > idx.rank
                })
                .collect();
            let (l, r) = *pairs.choose(rng)?;
            Some(RuleApplication::separation(
                at.clone(),
                idx,
                Index::new(l, clusters[&l].rank).ok()?,
                r,
            ))
        }
    }
}

/// Binary tree shapes with `n` internal nodes.
#[derive(Clone, Debug)]
pub enum Shape {
    Leaf,
    Node(Box<Shape>, Box<Shape>),
}

pub fn shapes(n: usize) -> Vec<Shape> {
    if n == 0 {
        return vec![Shape::Leaf];
    }
    let mut out = Vec::new();
    for left in 0..n {
        for l in shapes(left) {
            for r in shapes(n - 1 - left) {
                out.push(Shape::Node(Box::new(l.clone()), Box::new(r)));
            }
        }
    }
    out
}

/// Restricted growth strings of length `n`: canonical set partitions.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, blocks: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=blocks {
            prefix.push(b);
            go(prefix, blocks.max(b + 1), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 0, n, &mut out);
    out
}

/// Every well-formed indexing of `n` connectives in preorder, up to
/// cluster renaming, with rank labels forming `1..=r` for some
/// `r <= max_ranks`.
pub fn labelings(n: usize, max_ranks: u32) -> Vec<Vec<(Op, Index)>> {
    let mut out = Vec::new();
    for rgs in partitions(n) {
        let blocks = rgs.iter().max().map_or(0, |b| b + 1);
        let mut ranks = vec![1u32; blocks];
        loop {
            let used = ranks.iter().copied().max().unwrap_or(0);
            let contiguous = (1..=used).all(|r| ranks.contains(&r));
            if contiguous {
                for op_bits in 0..1u32 << used {
                    let op = |r: u32| {
                        if op_bits >> (r - 1) & 1 == 1 {
                            Op::And
                        } else {
                            Op::Or
                        }
                    };
                    out.push(
                        rgs.iter()
                            .map(|&b| {
                                let rank = ranks[b];
                                (op(rank), Index::new(b as u32 + 1, rank).expect("positive"))
                            })
                            .collect(),
                    );
                }
            }
            // odometer over rank assignments
            let mut pos = 0;
            while pos < blocks && ranks[pos] == max_ranks {
                ranks[pos] = 1;
                pos += 1;
            }
            if pos == blocks {
                break;
            }
            ranks[pos] += 1;
        }
    }
    out
}

fn build(
    shape: &Shape,
    labels: &[(Op, Index)],
    leaves: &[Cirquent],
    next: &mut (usize, usize),
) -> Cirquent {
    match shape {
        Shape::Leaf => {
            let leaf = leaves[next.1].clone();
            next.1 += 1;
            leaf
        }
        Shape::Node(l, r) => {
            let (op, index) = labels[next.0];
            next.0 += 1;
            let left = build(l, labels, leaves, next);
            let right = build(r, labels, leaves, next);
            Cirquent::node(op, index, left, right)
        }
    }
}

/// Visits every cirquent with at most `max_connectives` connectives over
/// `atoms` (both polarities), with rank labels `1..=r` for
/// `r <= max_ranks`, cluster IDs canonical. Runs in parallel.
pub fn for_each_exhaustive<F>(max_connectives: usize, atoms: &[&str], max_ranks: u32, f: F)
where
    F: Fn(&Cirquent) + Sync,
{
    let literals: Vec<Cirquent> = atoms
        .iter()
        .flat_map(|a| {
            let atom = Atom::new(*a).expect("valid atom");
            [Polarity::Positive, Polarity::Negative].map(|polarity| {
                Cirquent::literal(Literal {
                    atom: atom.clone(),
                    polarity,
                })
            })
        })
        .collect();
    let mut tasks = Vec::new();
    for n in 0..=max_connectives {
        let labels = labelings(n, max_ranks);
        for shape in shapes(n) {
            for labeling in &labels {
                tasks.push((n, shape.clone(), labeling.clone()));
            }
        }
    }
    tasks.par_iter().for_each(|(n, shape, labeling)| {
        let leaves_count = n + 1;
        let total = literals.len().pow(leaves_count as u32);
        let mut leaves = vec![literals[0].clone(); leaves_count];
        for code in 0..total {
            let mut rest = code;
            for leaf in leaves.iter_mut() {
                *leaf = literals[rest % literals.len()].clone();
                rest /= literals.len();
            }
            f(&build(shape, labeling, &leaves, &mut (0, 0)));
        }
    });
}
