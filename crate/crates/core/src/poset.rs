//! Finite posets, their Hasse diagrams, and intervals.
//!
//! Elements are addressed by index `0..n`; labels are only used at the I/O
//! boundary. A [`Poset`] is immutable once built and is usually shared through
//! an `Arc` by the modules that live over it.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite partially ordered set.
#[derive(Clone)]
pub struct Poset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major `n x n` order relation: `leq[a * n + b]` iff `a <= b`.
    leq: Vec<bool>,
    hasse: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.leq == other.leq
    }
}

impl Eq for Poset {}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .hasse
            .iter()
            .map(|&(a, b)| format!("{}->{}", self.labels[a], self.labels[b]))
            .collect();
        f.debug_struct("Poset")
            .field("elements", &self.labels)
            .field("hasse", &edges)
            .finish()
    }
}

impl Poset {
    /// Builds the poset generated by `pairs` (each `(a, b)` meaning `a <= b`).
    ///
    /// The order is the reflexive-transitive closure of the pairs and the
    /// Hasse diagram its transitive reduction.
    pub fn from_relations<S: AsRef<str>>(labels: &[S], pairs: &[(S, S)]) -> Result<Poset> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownLabel(s.to_string()))
        };
        let mut idx_pairs = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            idx_pairs.push((lookup(a.as_ref())?, lookup(b.as_ref())?));
        }
        Poset::from_index_relations(labels, &idx_pairs)
    }

    pub(crate) fn from_index_relations(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Poset> {
        let n = labels.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(a, b) in pairs {
            leq[a * n + b] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if !leq[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if leq[a * n + b] && leq[b * n + a] {
                    return Err(Error::Cycle(labels[a].clone(), labels[b].clone()));
                }
            }
        }
        Ok(Poset::from_closed(labels, leq))
    }

    fn from_closed(labels: Vec<String>, leq: Vec<bool>) -> Poset {
        let n = labels.len();
        let lt = |a: usize, b: usize| a != b && leq[a * n + b];
        let mut hasse = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                    hasse.push((a, b));
                }
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        let mut edge_index = HashMap::new();
        for (e, &(a, b)) in hasse.iter().enumerate() {
            succ[a].push(b);
            pred[b].push(a);
            edge_index.insert((a, b), e);
        }
        // Linear extension: sort by number of strict predecessors (stable in index).
        let mut topo: Vec<usize> = (0..n).collect();
        topo.sort_by_key(|&x| (0..n).filter(|&y| lt(y, x)).count());
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Poset {
            labels,
            index,
            leq,
            hasse,
            edge_index,
            succ,
            pred,
            topo,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Indices for a list of labels, in the given order.
    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l.as_ref())).collect()
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.len() + b]
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Covering pairs `(a, b)`, `a < b` with nothing strictly between.
    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a, b)).copied()
    }

    /// Elements covering `a`.
    pub fn successors(&self, a: usize) -> &[usize] {
        &self.succ[a]
    }

    /// Elements covered by `a`.
    pub fn predecessors(&self, a: usize) -> &[usize] {
        &self.pred[a]
    }

    /// A fixed linear extension of the order.
    pub fn linear_extension(&self) -> &[usize] {
        &self.topo
    }

    pub fn up_set(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&b| self.leq(a, b)).collect()
    }

    pub fn down_set(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&b| self.leq(b, a)).collect()
    }

    /// The same elements with the order reversed.
    pub fn opposite(&self) -> Poset {
        let n = self.len();
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] = self.leq(b, a);
            }
        }
        Poset::from_closed(self.labels.clone(), leq)
    }

    /// Undirected Hasse degree of `a`.
    pub fn degree(&self, a: usize) -> usize {
        self.succ[a].len() + self.pred[a].len()
    }

    /// Connected components of the Hasse diagram, each sorted, ordered by least element.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.components_of(&all)
    }

    /// Connected components of the full subposet on `s` (comparability within `s`).
    pub fn components_of(&self, s: &[usize]) -> Vec<Vec<usize>> {
        let mut seen: HashSet<usize> = HashSet::new();
        let mut out = Vec::new();
        for &start in s {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in s {
                    if !seen.contains(&y) && self.comparable(x, y) {
                        seen.insert(y);
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out.sort();
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn is_convex(&self, s: &[usize]) -> bool {
        let member = self.membership(s);
        s.iter().all(|&a| {
            s.iter().all(|&b| {
                !self.lt(a, b) || (0..self.len()).all(|z| member[z] || !(self.lt(a, z) && self.lt(z, b)))
            })
        })
    }

    /// Nonempty, convex, and connected as a full subposet.
    pub fn is_interval(&self, s: &[usize]) -> bool {
        !s.is_empty() && self.is_convex(s) && self.components_of(s).len() == 1
    }

    /// `{x | a <= x <= b for some a, b in s}`.
    pub fn convex_hull(&self, s: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| {
                s.iter().any(|&a| self.leq(a, x)) && s.iter().any(|&b| self.leq(x, b))
            })
            .collect()
    }

    /// All intervals in canonical order (size, then lexicographic members).
    ///
    /// Grows intervals from singletons: each step adds one Hasse-adjacent
    /// element and closes convexly, which keeps the set connected.
    pub fn enumerate_intervals(&self) -> Vec<Interval> {
        let mut found: BTreeSet<Interval> = BTreeSet::new();
        let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
        for a in 0..self.len() {
            let s = vec![a];
            if found.insert(Interval { members: s.clone() }) {
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            let member = self.membership(&s);
            let mut neighbours: BTreeSet<usize> = BTreeSet::new();
            for &a in &s {
                for &b in self.succ[a].iter().chain(&self.pred[a]) {
                    if !member[b] {
                        neighbours.insert(b);
                    }
                }
            }
            for b in neighbours {
                let mut grown = s.clone();
                grown.push(b);
                let hull = self.convex_hull(&grown);
                if found.insert(Interval {
                    members: hull.clone(),
                }) {
                    queue.push_back(hull);
                }
            }
        }
        found.into_iter().collect()
    }

    /// Reference scan over every nonempty subset, for posets of at most 20 elements.
    pub fn enumerate_intervals_naive(&self) -> Vec<Interval> {
        let n = self.len();
        assert!(n <= 20, "naive interval scan is limited to 20 elements");
        let mut out: Vec<Interval> = (1u32..(1 << n))
            .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|s| self.is_interval(s))
            .map(|members| Interval { members })
            .collect();
        out.sort();
        out
    }

    /// The full subposet on `s` with the inclusion map.
    pub fn full_subposet(&self, s: &[usize]) -> SubposetEmbedding {
        let mut map: Vec<usize> = s.to_vec();
        map.sort_unstable();
        map.dedup();
        let k = map.len();
        let mut leq = vec![false; k * k];
        for (i, &a) in map.iter().enumerate() {
            for (j, &b) in map.iter().enumerate() {
                leq[i * k + j] = self.leq(a, b);
            }
        }
        let labels = map.iter().map(|&a| self.labels[a].clone()).collect();
        SubposetEmbedding {
            sub: Poset::from_closed(labels, leq),
            map,
        }
    }

    /// Full subposet given by element labels.
    pub fn full_subposet_by_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<SubposetEmbedding> {
        Ok(self.full_subposet(&self.indices_of(labels)?))
    }

    /// Label-blind isomorphism test by permutation search; posets of at most 8 elements.
    pub fn is_isomorphic_unlabeled(&self, other: &Poset) -> bool {
        let n = self.len();
        assert!(n <= 8, "permutation search is limited to 8 elements");
        if n != other.len() || self.hasse.len() != other.hasse.len() {
            return false;
        }
        let mut perm = Vec::with_capacity(n);
        let mut used = vec![false; n];
        self.extend_iso(other, &mut perm, &mut used)
    }

    fn extend_iso(&self, other: &Poset, perm: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let k = perm.len();
        if k == self.len() {
            return true;
        }
        for cand in 0..other.len() {
            if used[cand] || self.degree(k) != other.degree(cand) {
                continue;
            }
            let ok = (0..k).all(|i| {
                self.leq(i, k) == other.leq(perm[i], cand) && self.leq(k, i) == other.leq(cand, perm[i])
            });
            if !ok {
                continue;
            }
            used[cand] = true;
            perm.push(cand);
            if self.extend_iso(other, perm, used) {
                return true;
            }
            perm.pop();
            used[cand] = false;
        }
        false
    }

    pub(crate) fn membership(&self, s: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.len()];
        for &a in s {
            m[a] = true;
        }
        m
    }

    /// Formats a set of element indices as `{a,b,c}` using labels.
    pub fn format_set(&self, s: &[usize]) -> String {
        let parts: Vec<&str> = s.iter().map(|&a| self.label(a)).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn to_doc(&self) -> PosetDoc {
        PosetDoc {
            elements: self.labels.clone(),
            relations: self
                .hasse
                .iter()
                .map(|&(a, b)| [self.labels[a].clone(), self.labels[b].clone()])
                .collect(),
        }
    }

    pub fn from_doc(doc: &PosetDoc) -> Result<Poset> {
        let pairs: Vec<(&str, &str)> = doc
            .relations
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let labels: Vec<&str> = doc.elements.iter().map(String::as_str).collect();
        Poset::from_relations(&labels, &pairs)
    }
}

/// JSON poset document: `{"elements": [...], "relations": [[a, b], ...]}`.
///
/// Relations may be any generating set of the order; serialization emits
/// Hasse edges only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDoc {
    pub elements: Vec<String>,
    #[serde(default)]
    pub relations: Vec<[String; 2]>,
}

/// A connected convex nonempty subset of some host poset, as sorted indices.
///
/// Ordered canonically: by size, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    members: Vec<usize>,
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.members
            .len()
            .cmp(&other.members.len())
            .then_with(|| self.members.cmp(&other.members))
    }
}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Interval {
    /// Validates that `members` is an interval of `host`.
    pub fn new(host: &Poset, members: &[usize]) -> Result<Interval> {
        let mut m = members.to_vec();
        m.sort_unstable();
        m.dedup();
        if m.iter().any(|&a| a >= host.len()) || !host.is_interval(&m) {
            return Err(Error::NotAnInterval(format!("{m:?}")));
        }
        Ok(Interval { members: m })
    }

    pub fn from_labels<S: AsRef<str>>(host: &Poset, labels: &[S]) -> Result<Interval> {
        let idx = host.indices_of(labels)?;
        Interval::new(host, &idx).map_err(|_| {
            let l: Vec<&str> = labels.iter().map(|s| s.as_ref()).collect();
            Error::NotAnInterval(format!("{{{}}}", l.join(",")))
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    pub fn labels<'p>(&self, host: &'p Poset) -> Vec<&'p str> {
        self.members.iter().map(|&a| host.label(a)).collect()
    }
}

/// A full subposet together with its inclusion into the host.
#[derive(Clone, Debug)]
pub struct SubposetEmbedding {
    pub sub: Poset,
    /// `map[i]` is the host index of sub element `i`; strictly increasing.
    pub map: Vec<usize>,
}

impl SubposetEmbedding {
    pub fn image(&self) -> &[usize] {
        &self.map
    }

    /// Host indices of a set of sub indices, sorted.
    pub fn push_forward(&self, s: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = s.iter().map(|&i| self.map[i]).collect();
        out.sort_unstable();
        out
    }

    /// Sub index of a host element, if it lies in the image.
    pub fn pull_back(&self, host_elem: usize) -> Option<usize> {
        self.map.binary_search(&host_elem).ok()
    }
}
