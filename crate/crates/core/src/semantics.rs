//! Interpretations, metaselections, metatruth and rank-ordered truth.
//!
//! Truth of a cirquent under an interpretation is the alternating game
//! `Q1 f1 ... Qn fn. metatrue(C, *, f)` over its rank labels in ascending
//! order, with `Q` universal for conjunctive ranks and existential for
//! disjunctive ones. Two evaluators are provided: [`true_under`], which
//! compiles the cirquent and searches rank by rank with early exit, and
//! [`naive_true_under`], which materializes every metaselection vector,
//! evaluates [`metatrue`] on each and folds the quantifier prefix over the
//! resulting table.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::syntax::{Atom, Cirquent, Op, Path, Side};

/// Enumeration limits. Exceeding either is an error, never a truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_atoms: usize,
    pub max_clusters: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_atoms: 16,
            max_clusters: 20,
        }
    }
}

impl Caps {
    pub fn check(&self, c: &Cirquent) -> Result<()> {
        let atoms = c.atoms().len();
        if atoms > self.max_atoms {
            return Err(Error::CapExceeded {
                what: "atoms",
                found: atoms,
                cap: self.max_atoms,
            });
        }
        self.check_clusters(c)
    }

    fn check_clusters(&self, c: &Cirquent) -> Result<()> {
        self.check_slots(c.cluster_ids().len())
    }

    fn check_slots(&self, clusters: usize) -> Result<()> {
        if clusters > self.max_clusters {
            return Err(Error::CapExceeded {
                what: "clusters",
                found: clusters,
                cap: self.max_clusters,
            });
        }
        Ok(())
    }
}

/// Truth-value assignment to atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Interpretation {
    values: BTreeMap<Atom, bool>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, atom: Atom, value: bool) {
        self.values.insert(atom, value);
    }

    pub fn with(mut self, name: &str, value: bool) -> Self {
        self.set(Atom::new(name).expect("valid atom"), value);
        self
    }

    pub fn get(&self, atom: &Atom) -> Option<bool> {
        self.values.get(atom).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, bool)> {
        self.values.iter().map(|(a, v)| (a, *v))
    }

    /// The `index`-th assignment to `atoms` in lexicographic order, atoms
    /// sorted by name and false before true.
    pub fn nth(atoms: &[Atom], index: u64) -> Self {
        let n = atoms.len();
        let values = atoms
            .iter()
            .enumerate()
            .map(|(pos, a)| (a.clone(), (index >> (n - 1 - pos)) & 1 == 1))
            .collect();
        Interpretation { values }
    }
}

impl FromIterator<(Atom, bool)> for Interpretation {
    fn from_iter<I: IntoIterator<Item = (Atom, bool)>>(iter: I) -> Self {
        Interpretation {
            values: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, (atom, value)) in self.values.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{atom}={}", u8::from(*value))?;
        }
        Ok(())
    }
}

impl FromStr for Interpretation {
    type Err = Error;

    /// `p=1,q=0`; whitespace around items is ignored, the empty string is
    /// the empty interpretation.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Interpretation::new();
        if s.trim().is_empty() {
            return Ok(out);
        }
        for item in s.split(',') {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::BadInterpretation(format!("`{}` lacks `=`", item.trim())))?;
            let atom = Atom::new(name.trim())?;
            let value = match value.trim() {
                "1" => true,
                "0" => false,
                other => {
                    return Err(Error::BadInterpretation(format!(
                        "value `{other}` for `{atom}` is not 0 or 1"
                    )))
                }
            };
            if out.values.insert(atom.clone(), value).is_some() {
                return Err(Error::BadInterpretation(format!("`{atom}` assigned twice")));
            }
        }
        Ok(out)
    }
}

/// An i-metaselection: explicit choices on finitely many cluster IDs, and a
/// default for every other ID.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metaselection {
    pub choices: BTreeMap<u32, Side>,
    pub default: Side,
}

impl Default for Metaselection {
    fn default() -> Self {
        Metaselection {
            choices: BTreeMap::new(),
            default: Side::Left,
        }
    }
}

impl Metaselection {
    pub fn get(&self, cluster: u32) -> Side {
        self.choices.get(&cluster).copied().unwrap_or(self.default)
    }

    pub fn with(mut self, cluster: u32, side: Side) -> Self {
        self.choices.insert(cluster, side);
        self
    }
}

/// One metaselection per rank label.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MetaselectionVector {
    pub per_rank: BTreeMap<u32, Metaselection>,
}

impl MetaselectionVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every rank of `c` mapped to the all-default metaselection.
    pub fn covering(c: &Cirquent, default: Side) -> Self {
        MetaselectionVector {
            per_rank: c
                .ranks()
                .into_iter()
                .map(|r| {
                    (
                        r,
                        Metaselection {
                            choices: BTreeMap::new(),
                            default,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn choose(mut self, rank: u32, cluster: u32, side: Side) -> Self {
        self.per_rank
            .entry(rank)
            .or_default()
            .choices
            .insert(cluster, side);
        self
    }

    pub fn get(&self, rank: u32, cluster: u32) -> Result<Side> {
        self.per_rank
            .get(&rank)
            .map(|f| f.get(cluster))
            .ok_or(Error::MissingRank(rank))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidityVerdict {
    Valid,
    Invalid { counterexample: Interpretation },
}

impl ValidityVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidityVerdict::Valid)
    }
}

/// The argument of the connective at `path` selected by `f`.
pub fn resolvent(c: &Cirquent, path: &Path, f: &MetaselectionVector) -> Result<Side> {
    let (_, index) = c.connective_at(path)?;
    f.get(index.rank, index.cluster)
}

/// Metatruth w.r.t. `(star, f)`: follow resolvents from the root to a literal.
pub fn metatrue(c: &Cirquent, star: &Interpretation, f: &MetaselectionVector) -> Result<bool> {
    let mut cur = c;
    loop {
        match cur {
            Cirquent::Literal(lit) => {
                let v = star
                    .get(&lit.atom)
                    .ok_or_else(|| Error::MissingAtom(lit.atom.clone()))?;
                return Ok(lit.value(v));
            }
            Cirquent::Node {
                index, left, right, ..
            } => {
                cur = match f.get(index.rank, index.cluster)? {
                    Side::Left => left,
                    Side::Right => right,
                };
            }
        }
    }
}

/// Rank-ordered truth under `star`, default caps.
pub fn true_under(c: &Cirquent, star: &Interpretation) -> Result<bool> {
    true_under_with(c, star, Caps::default())
}

pub fn true_under_with(c: &Cirquent, star: &Interpretation, caps: Caps) -> Result<bool> {
    let compiled = Compiled::new(c)?;
    caps.check_slots(compiled.slots)?;
    let bits = compiled.atom_bits(star)?;
    Ok(compiled.truth(bits))
}

/// Reference evaluator: every full metaselection vector is materialized,
/// checked with [`metatrue`], and the quantifier prefix is folded over the
/// table from the innermost rank outwards.
pub fn naive_true_under(c: &Cirquent, star: &Interpretation) -> Result<bool> {
    naive_true_under_with(c, star, Caps::default())
}

pub fn naive_true_under_with(c: &Cirquent, star: &Interpretation, caps: Caps) -> Result<bool> {
    fn scan<'a>(
        c: &'a Cirquent,
        star: &Interpretation,
        out: &mut Vec<(u32, u32, Op)>,
        missing: &mut Option<&'a Atom>,
    ) {
        match c {
            Cirquent::Literal(lit) => {
                if missing.is_none() && star.get(&lit.atom).is_none() {
                    *missing = Some(&lit.atom);
                }
            }
            Cirquent::Node {
                op,
                index,
                left,
                right,
            } => {
                out.push((index.rank, index.cluster, *op));
                scan(left, star, out, missing);
                scan(right, star, out, missing);
            }
        }
    }
    // (rank, cluster, op) ascending by rank
    let mut layout = Vec::new();
    let mut missing = None;
    scan(c, star, &mut layout, &mut missing);
    let mut by_id: Vec<u32> = layout.iter().map(|(_, k, _)| *k).collect();
    by_id.sort_unstable();
    by_id.dedup();
    caps.check_slots(by_id.len())?;
    if let Some(atom) = missing {
        return Err(Error::MissingAtom(atom.clone()));
    }
    layout.sort_unstable();
    layout.dedup_by_key(|(r, k, _)| (*r, *k));
    let mut ranks: Vec<(Op, usize)> = Vec::new();
    for (i, (r, _, op)) in layout.iter().enumerate() {
        if i == 0 || layout[i - 1].0 != *r {
            ranks.push((*op, 0));
        }
        ranks.last_mut().expect("rank started").1 += 1;
    }
    let mut f = MetaselectionVector {
        per_rank: layout
            .iter()
            .map(|(r, _, _)| (*r, Metaselection::default()))
            .collect(),
    };
    let layout: Vec<(u32, u32)> = layout.iter().map(|(r, k, _)| (*r, *k)).collect();
    let total = layout.len();

    let mut table = Vec::with_capacity(1 << total);
    for vector in 0u64..(1u64 << total) {
        for (bit, (rank, cluster)) in layout.iter().enumerate() {
            let side = if vector >> bit & 1 == 1 {
                Side::Right
            } else {
                Side::Left
            };
            f.per_rank
                .get_mut(rank)
                .expect("covering has every rank")
                .choices
                .insert(*cluster, side);
        }
        table.push(metatrue(c, star, &f)?);
    }

    // innermost rank occupies the highest bits
    for (op, width) in ranks.iter().rev() {
        let width = *width;
        let low = table.len() >> width;
        let folded = (0..low)
            .map(|lo| {
                let mut column = (0..1usize << width).map(|hi| table[lo + (hi * low)]);
                match op {
                    Op::And => column.all(|v| v),
                    Op::Or => column.any(|v| v),
                }
            })
            .collect();
        table = folded;
    }
    debug_assert_eq!(table.len(), 1);
    Ok(table[0])
}

/// Validity with default caps.
pub fn valid(c: &Cirquent) -> Result<ValidityVerdict> {
    valid_with(c, Caps::default())
}

/// Enumerate interpretations of the atoms of `c` in lexicographic order and
/// report the first falsifying one.
pub fn valid_with(c: &Cirquent, caps: Caps) -> Result<ValidityVerdict> {
    caps.check(c)?;
    let compiled = Compiled::new(c)?;
    let atoms: Vec<Atom> = compiled.atoms.iter().map(|a| (*a).clone()).collect();
    let n = atoms.len();
    for index in 0u64..(1u64 << n) {
        // first atom is the most significant position
        let bits = (0..n).fold(0u64, |acc, pos| acc | ((index >> (n - 1 - pos)) & 1) << pos);
        if !compiled.truth(bits) {
            return Ok(ValidityVerdict::Invalid {
                counterexample: Interpretation::nth(&atoms, index),
            });
        }
    }
    Ok(ValidityVerdict::Valid)
}

/// Plain two-valued evaluation of the index-stripped formula.
pub fn eval_classical(c: &Cirquent, star: &Interpretation) -> Result<bool> {
    match c {
        Cirquent::Literal(lit) => star
            .get(&lit.atom)
            .map(|v| lit.value(v))
            .ok_or_else(|| Error::MissingAtom(lit.atom.clone())),
        Cirquent::Node {
            op, left, right, ..
        } => {
            let l = eval_classical(left, star)?;
            let r = eval_classical(right, star)?;
            Ok(match op {
                Op::And => l && r,
                Op::Or => l || r,
            })
        }
    }
}

/// Truth-table check of a classical cirquent seen as a formula.
pub fn classical_tautology(c: &Cirquent) -> Result<bool> {
    classical_tautology_with(c, Caps::default())
}

pub fn classical_tautology_with(c: &Cirquent, caps: Caps) -> Result<bool> {
    if !c.is_classical() {
        return Err(Error::NotClassical);
    }
    Ok(first_classical_falsifier(c, caps)?.is_none())
}

/// Lexicographically first interpretation falsifying the stripped formula.
pub fn first_classical_falsifier(c: &Cirquent, caps: Caps) -> Result<Option<Interpretation>> {
    let atoms: Vec<Atom> = c.atoms().into_iter().collect();
    if atoms.len() > caps.max_atoms {
        return Err(Error::CapExceeded {
            what: "atoms",
            found: atoms.len(),
            cap: caps.max_atoms,
        });
    }
    for index in 0u64..(1u64 << atoms.len()) {
        let star = Interpretation::nth(&atoms, index);
        if !eval_classical(c, &star)? {
            return Ok(Some(star));
        }
    }
    Ok(None)
}

/// Flat form of a cirquent used by the fast evaluator. Cluster slots are
/// laid out by ascending rank, so each rank owns a contiguous bit range.
struct Compiled<'a> {
    nodes: Vec<CNode>,
    atoms: Vec<&'a Atom>,
    /// (universal, first slot, slot count) per rank, ascending.
    ranks: Vec<(bool, u32, u32)>,
    slots: usize,
}

#[derive(Clone, Copy)]
enum CNode {
    Leaf { atom: u32, negated: bool },
    Branch { slot: u32, left: u32, right: u32 },
}

/// Choice bits live in a `u64`.
const MAX_SLOTS: usize = 63;

impl<'a> Compiled<'a> {
    fn new(c: &'a Cirquent) -> Result<Self> {
        fn scan<'a>(
            c: &'a Cirquent,
            atoms: &mut Vec<&'a Atom>,
            clusters: &mut Vec<(u32, u32, Op)>,
        ) {
            match c {
                Cirquent::Literal(lit) => atoms.push(&lit.atom),
                Cirquent::Node {
                    op,
                    index,
                    left,
                    right,
                } => {
                    clusters.push((index.rank, index.cluster, *op));
                    scan(left, atoms, clusters);
                    scan(right, atoms, clusters);
                }
            }
        }
        let mut atoms = Vec::new();
        let mut clusters = Vec::new();
        scan(c, &mut atoms, &mut clusters);
        atoms.sort_unstable();
        atoms.dedup();
        clusters.sort_unstable();
        clusters.dedup_by_key(|(rank, cluster, _)| (*rank, *cluster));
        if clusters.len() > MAX_SLOTS {
            return Err(Error::CapExceeded {
                what: "clusters",
                found: clusters.len(),
                cap: MAX_SLOTS,
            });
        }
        let mut ranks: Vec<(bool, u32, u32)> = Vec::new();
        let mut last_rank = None;
        for (slot, (rank, _, op)) in clusters.iter().enumerate() {
            if last_rank == Some(*rank) {
                ranks.last_mut().expect("rank started").2 += 1;
            } else {
                ranks.push((*op == Op::And, slot as u32, 1));
                last_rank = Some(*rank);
            }
        }
        let mut slot_of: Vec<(u32, u32)> = clusters
            .iter()
            .enumerate()
            .map(|(slot, (_, cluster, _))| (*cluster, slot as u32))
            .collect();
        slot_of.sort_unstable();
        let mut compiled = Compiled {
            nodes: Vec::new(),
            atoms,
            ranks,
            slots: clusters.len(),
        };
        compiled.push(c, &slot_of);
        Ok(compiled)
    }

    fn push(&mut self, c: &Cirquent, slot_of: &[(u32, u32)]) -> u32 {
        let id = self.nodes.len() as u32;
        match c {
            Cirquent::Literal(lit) => {
                let atom = self
                    .atoms
                    .binary_search(&&lit.atom)
                    .expect("atom collected") as u32;
                self.nodes.push(CNode::Leaf {
                    atom,
                    negated: lit.polarity == crate::syntax::Polarity::Negative,
                });
            }
            Cirquent::Node {
                index, left, right, ..
            } => {
                let at = slot_of
                    .binary_search_by_key(&index.cluster, |(k, _)| *k)
                    .expect("cluster collected");
                let slot = slot_of[at].1;
                self.nodes.push(CNode::Branch {
                    slot,
                    left: 0,
                    right: 0,
                });
                let l = self.push(left, slot_of);
                let r = self.push(right, slot_of);
                self.nodes[id as usize] = CNode::Branch {
                    slot,
                    left: l,
                    right: r,
                };
            }
        }
        id
    }

    fn atom_bits(&self, star: &Interpretation) -> Result<u64> {
        let mut bits = 0;
        for (n, atom) in self.atoms.iter().enumerate() {
            match star.get(atom) {
                Some(true) => bits |= 1 << n,
                Some(false) => {}
                None => return Err(Error::MissingAtom((*atom).clone())),
            }
        }
        Ok(bits)
    }

    fn metatrue(&self, atoms: u64, choices: u64) -> bool {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                CNode::Leaf { atom, negated } => return (atoms >> atom & 1 == 1) != negated,
                CNode::Branch { slot, left, right } => {
                    at = if choices >> slot & 1 == 1 {
                        right
                    } else {
                        left
                    } as usize;
                }
            }
        }
    }

    fn truth(&self, atoms: u64) -> bool {
        self.search(atoms, 0, 0)
    }

    fn search(&self, atoms: u64, rank: usize, choices: u64) -> bool {
        let Some(&(universal, first, count)) = self.ranks.get(rank) else {
            return self.metatrue(atoms, choices);
        };
        let mut column =
            (0u64..1 << count).map(|bits| self.search(atoms, rank + 1, choices | bits << first));
        if universal {
            column.all(|v| v)
        } else {
            column.any(|v| v)
        }
    }
}
