//! Combinatorial recognition of posets whose interval resolution global
//! dimension is zero, and string combinatorics for the cycle posets `C(m, l)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::Family;
use crate::poset::{Interval, Poset};

/// Shape of a poset accepted by [`classify_zero_gldim`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// A path; the word reads `f`/`b` per edge starting from the endpoint with the smaller index.
    A { n: usize, orientation: String },
    /// A cycle with one source and one sink; `m >= l`.
    C { m: usize, l: usize },
    /// Several connected components, each accepted.
    Disjoint { components: Vec<Shape> },
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::A { n, orientation } if orientation.is_empty() => write!(f, "A{n}"),
            Shape::A { n, orientation } => write!(f, "A{n}({orientation})"),
            Shape::C { m, l } => write!(f, "C({m},{l})"),
            Shape::Disjoint { components } => {
                let parts: Vec<String> = components.iter().map(|s| s.to_string()).collect();
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

/// Why a poset was rejected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A vertex of Hasse degree at least three.
    HighDegree { vertex: String, degree: usize },
    /// A Hasse cycle without exactly one source and one sink.
    CycleOrientation { sources: Vec<String>, sinks: Vec<String> },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::HighDegree { vertex, degree } => {
                write!(f, "vertex `{vertex}` has Hasse degree {degree}")
            }
            Witness::CycleOrientation { sources, sinks } => write!(
                f,
                "cycle has sources {{{}}} and sinks {{{}}}",
                sources.join(","),
                sinks.join(",")
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeVerdict {
    pub accepted: bool,
    pub shape: Option<Shape>,
    pub witness: Option<Witness>,
}

fn classify_component(p: &Poset, comp: &[usize]) -> std::result::Result<Shape, Witness> {
    if let Some(&v) = comp.iter().find(|&&v| p.degree(v) >= 3) {
        return Err(Witness::HighDegree {
            vertex: p.label(v).to_string(),
            degree: p.degree(v),
        });
    }
    let edges: usize = comp.iter().map(|&v| p.successors(v).len()).sum();
    let neighbours = |v: usize| -> Vec<usize> {
        let mut n: Vec<usize> = p.successors(v).iter().chain(p.predecessors(v)).copied().collect();
        n.sort_unstable();
        n
    };
    if edges + 1 == comp.len() {
        let start = *comp.iter().find(|&&v| p.degree(v) <= 1).expect("a path has an endpoint");
        let mut word = String::new();
        let (mut prev, mut cur) = (usize::MAX, start);
        loop {
            let Some(next) = neighbours(cur).into_iter().find(|&x| x != prev) else {
                break;
            };
            word.push(if p.lt(cur, next) { 'f' } else { 'b' });
            prev = cur;
            cur = next;
        }
        return Ok(Shape::A {
            n: comp.len(),
            orientation: word,
        });
    }
    // connected, every degree two: a single cycle
    let sources: Vec<usize> = comp.iter().copied().filter(|&v| p.predecessors(v).is_empty()).collect();
    let sinks: Vec<usize> = comp.iter().copied().filter(|&v| p.successors(v).is_empty()).collect();
    if sources.len() != 1 || sinks.len() != 1 {
        let names = |s: &[usize]| s.iter().map(|&v| p.label(v).to_string()).collect();
        return Err(Witness::CycleOrientation {
            sources: names(&sources),
            sinks: names(&sinks),
        });
    }
    let top = sinks[0];
    let mut lengths: Vec<usize> = p.successors(sources[0])
        .iter()
        .map(|&first| {
            let mut len = 0;
            let mut cur = first;
            while cur != top {
                len += 1;
                cur = p.successors(cur)[0];
            }
            len
        })
        .collect();
    lengths.sort_unstable();
    Ok(Shape::C {
        m: lengths[1],
        l: lengths[0],
    })
}

/// Accepts exactly the posets whose connected components are oriented paths
/// or cycles with a single source and a single sink.
pub fn classify_zero_gldim(p: &Poset) -> ShapeVerdict {
    let mut shapes = Vec::new();
    for comp in p.components() {
        match classify_component(p, &comp) {
            Ok(s) => shapes.push(s),
            Err(w) => {
                return ShapeVerdict {
                    accepted: false,
                    shape: None,
                    witness: Some(w),
                }
            }
        }
    }
    let shape = if shapes.len() == 1 {
        shapes.pop().unwrap()
    } else {
        Shape::Disjoint { components: shapes }
    };
    ShapeVerdict {
        accepted: true,
        shape: Some(shape),
        witness: None,
    }
}

/// An arrow of the quiver `Q_{m,l}`: `α_0 .. α_m` along the `a` chain and
/// `β_0 .. β_l` along the `b` chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Arrow {
    Alpha(usize),
    Beta(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Letter {
    pub arrow: Arrow,
    pub inverse: bool,
}

impl Letter {
    pub fn direct(arrow: Arrow) -> Letter {
        Letter { arrow, inverse: false }
    }

    pub fn inv(self) -> Letter {
        Letter {
            arrow: self.arrow,
            inverse: !self.inverse,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.arrow {
            Arrow::Alpha(i) => write!(f, "α{i}")?,
            Arrow::Beta(j) => write!(f, "β{j}")?,
        }
        if self.inverse {
            write!(f, "⁻¹")?;
        }
        Ok(())
    }
}

/// The quiver `Q_{m,l}` with vertices indexed as in `Family::C { m, l }`:
/// `0` is the minimum, `1..=m` the `a` chain, `m+1..=m+l` the `b` chain,
/// `m+l+1` the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CmlCombinatorics {
    pub m: usize,
    pub l: usize,
}

/// A walk in `Q_{m,l}` from `start`; trivial when `letters` is empty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StringWord {
    pub start: usize,
    pub letters: Vec<Letter>,
}

impl CmlCombinatorics {
    pub fn new(m: usize, l: usize) -> Result<CmlCombinatorics> {
        if m == 0 || l == 0 {
            return Err(Error::InvalidFamily("C(m, l) needs m, l >= 1".into()));
        }
        Ok(CmlCombinatorics { m, l })
    }

    pub fn vertex_count(&self) -> usize {
        self.m + self.l + 2
    }

    pub fn top(&self) -> usize {
        self.m + self.l + 1
    }

    pub fn poset(&self) -> Poset {
        Family::C { m: self.m, l: self.l }.build().expect("m, l >= 1")
    }

    pub fn arrows(&self) -> Vec<Arrow> {
        (0..=self.m)
            .map(Arrow::Alpha)
            .chain((0..=self.l).map(Arrow::Beta))
            .collect()
    }

    /// `(source, target)` of an arrow.
    pub fn ends(&self, a: Arrow) -> (usize, usize) {
        let (m, l, top) = (self.m, self.l, self.top());
        match a {
            Arrow::Alpha(i) => (if i == 0 { 0 } else { i }, if i == m { top } else { i + 1 }),
            Arrow::Beta(j) => (if j == 0 { 0 } else { m + j }, if j == l { top } else { m + j + 1 }),
        }
    }

    pub fn letter_ends(&self, x: Letter) -> (usize, usize) {
        let (s, t) = self.ends(x.arrow);
        if x.inverse {
            (t, s)
        } else {
            (s, t)
        }
    }

    pub fn end(&self, w: &StringWord) -> usize {
        w.letters
            .last()
            .map_or(w.start, |&x| self.letter_ends(x).1)
    }

    pub fn inverse(&self, w: &StringWord) -> StringWord {
        StringWord {
            start: self.end(w),
            letters: w.letters.iter().rev().map(|x| x.inv()).collect(),
        }
    }

    /// The lexicographically smaller of `w` and its inverse.
    pub fn representative(&self, w: StringWord) -> StringWord {
        let inv = self.inverse(&w);
        if (&inv.letters, inv.start) < (&w.letters, w.start) {
            inv
        } else {
            w
        }
    }

    fn path(&self, from: usize, to: usize, alpha: bool) -> Vec<Letter> {
        (from..=to)
            .map(|k| Letter::direct(if alpha { Arrow::Alpha(k) } else { Arrow::Beta(k) }))
            .collect()
    }

    fn path_word(&self, from: usize, to: usize, alpha: bool) -> StringWord {
        let first = if alpha { Arrow::Alpha(from) } else { Arrow::Beta(from) };
        StringWord {
            start: self.ends(first).0,
            letters: self.path(from, to, alpha),
        }
    }

    /// Complete representatives of strings, listed family by family.
    pub fn enumerate_strings(&self) -> Vec<StringWord> {
        let (m, l) = (self.m, self.l);
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            out.push(StringWord {
                start: v,
                letters: Vec::new(),
            });
        }
        for i in 0..=m {
            for j in i..=m {
                if (i, j) != (0, m) {
                    out.push(self.representative(self.path_word(i, j, true)));
                }
            }
        }
        for i in 0..=l {
            for j in i..=l {
                if (i, j) != (0, l) {
                    out.push(self.representative(self.path_word(i, j, false)));
                }
            }
        }
        // (β_0..β_j)^{-1} (α_0..α_i)
        for i in 0..m {
            for j in 0..l {
                let mut letters: Vec<Letter> = self.path(0, j, false).into_iter().rev().map(Letter::inv).collect();
                letters.extend(self.path(0, i, true));
                let start = self.ends(Arrow::Beta(j)).1;
                out.push(self.representative(StringWord { start, letters }));
            }
        }
        // (β_j..β_l) (α_i..α_m)^{-1}
        for i in 1..=m {
            for j in 1..=l {
                let mut letters = self.path(j, l, false);
                letters.extend(self.path(i, m, true).into_iter().rev().map(Letter::inv));
                let start = self.ends(Arrow::Beta(j)).0;
                out.push(self.representative(StringWord { start, letters }));
            }
        }
        out
    }

    /// Vertices visited by a walk.
    pub fn support(&self, w: &StringWord) -> Vec<usize> {
        let mut s: BTreeSet<usize> = BTreeSet::new();
        s.insert(w.start);
        for &x in &w.letters {
            let (a, b) = self.letter_ends(x);
            s.insert(a);
            s.insert(b);
        }
        s.into_iter().collect()
    }

    pub fn string_to_interval(&self, host: &Poset, w: &StringWord) -> Result<Interval> {
        Interval::new(host, &self.support(w))
    }

    /// Whether `w` is a composable reduced walk avoiding the full `α` and `β` paths.
    pub fn is_string(&self, w: &StringWord) -> bool {
        if w.start >= self.vertex_count() {
            return false;
        }
        let mut at = w.start;
        for (k, &x) in w.letters.iter().enumerate() {
            let (s, t) = self.letter_ends(x);
            if s != at {
                return false;
            }
            if k > 0 && w.letters[k - 1] == x.inv() {
                return false;
            }
            at = t;
        }
        let full_a = self.path(0, self.m, true);
        let full_b = self.path(0, self.l, false);
        let inv = self.inverse(w);
        ![&w.letters, &inv.letters].iter().any(|ls| {
            ls.windows(full_a.len()).any(|win| win == full_a.as_slice())
                || ls.windows(full_b.len()).any(|win| win == full_b.as_slice())
        })
    }

    /// All string representatives found by walking the quiver, up to twice
    /// the cycle length. Independent of [`Self::enumerate_strings`].
    pub fn enumerate_strings_by_walks(&self) -> BTreeSet<StringWord> {
        let bound = 2 * self.vertex_count();
        let letters: Vec<Letter> = self
            .arrows()
            .into_iter()
            .flat_map(|a| [Letter::direct(a), Letter::direct(a).inv()])
            .collect();
        let mut found = BTreeSet::new();
        let mut stack: Vec<StringWord> = (0..self.vertex_count())
            .map(|v| StringWord {
                start: v,
                letters: Vec::new(),
            })
            .collect();
        while let Some(w) = stack.pop() {
            if !self.is_string(&w) {
                continue;
            }
            found.insert(self.representative(w.clone()));
            if w.letters.len() == bound {
                continue;
            }
            let at = self.end(&w);
            for &x in &letters {
                if self.letter_ends(x).0 == at {
                    let mut next = w.clone();
                    next.letters.push(x);
                    stack.push(next);
                }
            }
        }
        found
    }

    /// Nontrivial closed strings whose square is again a string.
    pub fn bands(&self) -> Vec<StringWord> {
        self.enumerate_strings_by_walks()
            .into_iter()
            .filter(|w| !w.letters.is_empty() && self.end(w) == w.start)
            .filter(|w| {
                let mut sq = w.clone();
                sq.letters.extend(w.letters.iter().copied());
                self.is_string(&sq)
            })
            .collect()
    }

    pub fn format(&self, w: &StringWord) -> String {
        if w.letters.is_empty() {
            return format!("1_{}", self.poset().label(w.start));
        }
        w.letters.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("")
    }
}

/// `(m² + 4ml + l² + 5m + 5l + 6) / 2`
pub fn count_indecomposables(m: usize, l: usize) -> usize {
    (m * m + 4 * m * l + l * l + 5 * m + 5 * l + 6) / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::all_orientations;

    fn binom2(n: usize) -> usize {
        n * (n - 1) / 2
    }

    #[test]
    fn counts() {
        assert_eq!(count_indecomposables(1, 1), 11);
        assert_eq!(count_indecomposables(2, 1), 17);
        assert_eq!(count_indecomposables(3, 2), 34);
        for m in 1..6 {
            for l in 1..6 {
                assert_eq!(count_indecomposables(m, l), m * l + binom2(m + l + 3));
            }
        }
    }

    #[test]
    fn c11_strings() {
        let c = CmlCombinatorics::new(1, 1).unwrap();
        let s = c.enumerate_strings();
        assert_eq!(s.len(), 10);
        assert_eq!(s.iter().filter(|w| w.letters.is_empty()).count(), 4);
        assert_eq!(CmlCombinatorics::new(2, 1).unwrap().enumerate_strings().len(), 16);
    }

    #[test]
    fn alpha_family_size() {
        for m in 1..6 {
            let c = CmlCombinatorics::new(m, 2).unwrap();
            let alphas = c
                .enumerate_strings()
                .into_iter()
                .filter(|w| !w.letters.is_empty() && w.letters.iter().all(|x| matches!(x.arrow, Arrow::Alpha(_))))
                .count();
            assert_eq!(alphas, binom2(m + 2) - 1);
        }
    }

    #[test]
    fn strings_biject_onto_proper_intervals() {
        for m in 1..=4 {
            for l in 1..=4 {
                let c = CmlCombinatorics::new(m, l).unwrap();
                let p = c.poset();
                let strings = c.enumerate_strings();
                assert!(strings.iter().all(|w| c.is_string(w)));
                let ivs: BTreeSet<Interval> = strings
                    .iter()
                    .map(|w| c.string_to_interval(&p, w).unwrap())
                    .collect();
                assert_eq!(ivs.len(), strings.len());
                let all = p.enumerate_intervals();
                assert_eq!(all.len(), strings.len() + 1);
                let full = Interval::new(&p, &(0..p.len()).collect::<Vec<_>>()).unwrap();
                assert!(!ivs.contains(&full));
                let walked = c.enumerate_strings_by_walks();
                assert_eq!(walked, strings.into_iter().collect());
                assert!(c.bands().is_empty());
            }
        }
    }

    #[test]
    fn type_iv_corner_support() {
        let c = CmlCombinatorics::new(3, 2).unwrap();
        let w = StringWord {
            start: c.ends(Arrow::Beta(0)).1,
            letters: vec![Letter::direct(Arrow::Beta(0)).inv(), Letter::direct(Arrow::Alpha(0))],
        };
        assert!(c.is_string(&w));
        let p = c.poset();
        let iv = c.string_to_interval(&p, &w).unwrap();
        assert_eq!(iv.labels(&p), vec!["0", "a1", "b1"]);
    }

    #[test]
    fn classify_examples() {
        let z = Family::zigzag_a(5).build().unwrap();
        let v = classify_zero_gldim(&z);
        assert!(v.accepted);
        assert_eq!(
            v.shape,
            Some(Shape::A {
                n: 5,
                orientation: "fbfb".into()
            })
        );
        let g = Family::Grid { rows: 2, cols: 2 }.build().unwrap();
        assert_eq!(classify_zero_gldim(&g).shape, Some(Shape::C { m: 1, l: 1 }));
        for w in all_orientations(3) {
            let d = Family::D { orientation: w }.build().unwrap();
            let v = classify_zero_gldim(&d);
            assert!(!v.accepted);
            assert_eq!(
                v.witness,
                Some(Witness::HighDegree {
                    vertex: "3".into(),
                    degree: 3
                })
            );
        }
        let c = Family::C { m: 2, l: 3 }.build().unwrap();
        assert_eq!(classify_zero_gldim(&c).shape, Some(Shape::C { m: 3, l: 2 }));
        let point = Poset::from_relations(&["x"], &[]).unwrap();
        assert_eq!(
            classify_zero_gldim(&point).shape,
            Some(Shape::A {
                n: 1,
                orientation: String::new()
            })
        );
    }

    #[test]
    fn crown_is_rejected() {
        // a < c, a < d, b < c, b < d: a 4-cycle with two sources
        let p = Poset::from_relations(
            &["a", "b", "c", "d"],
            &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
        )
        .unwrap();
        let v = classify_zero_gldim(&p);
        assert!(!v.accepted);
        assert!(matches!(v.witness, Some(Witness::CycleOrientation { .. })));
    }

    #[test]
    fn disjoint_components() {
        let p = Poset::from_relations(&["x", "y", "z"], &[("x", "y")]).unwrap();
        let v = classify_zero_gldim(&p);
        assert!(v.accepted);
        assert!(matches!(v.shape, Some(Shape::Disjoint { ref components }) if components.len() == 2));
    }
}
