//! Named poset families: type-A and type-D quivers, the cycle posets
//! `C(m, l)`, grids, commutative ladders, and the Igusa pair.
//!
//! Orientation words use `f` for an arrow pointing forward along the listed
//! edge and `b` for one pointing backward.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::poset::Poset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Path `1 - 2 - ... - n`; the word has `n - 1` letters, `f` meaning `i -> i+1`.
    A { orientation: String },
    /// Edges `1-3, 3-2, 3-4, 4-5, ..., (n-1)-n` in that order; `f` means first -> second.
    D { orientation: String },
    /// Minimum `0`, maximum `1`, chains `a1 < .. < am` and `b1 < .. < bl` in between.
    C { m: usize, l: usize },
    /// `rows x cols` product of chains, elements `i_j`.
    Grid { rows: usize, cols: usize },
    /// Two rows `0_j` (bottom) and `1_j` (top), vertical edges pointing up,
    /// both rows oriented by the word.
    Ladder { orientation: String },
    /// Seven-element poset with a central element.
    IgusaP,
    /// The Igusa poset with its central element removed.
    IgusaPPrime,
}

impl Family {
    pub fn equioriented_a(n: usize) -> Family {
        Family::A {
            orientation: "f".repeat(n.saturating_sub(1)),
        }
    }

    /// `1 -> 2 <- 3 -> 4 ...`
    pub fn zigzag_a(n: usize) -> Family {
        Family::A {
            orientation: (0..n.saturating_sub(1))
                .map(|i| if i % 2 == 0 { 'f' } else { 'b' })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Poset> {
        match self {
            Family::A { orientation } => {
                let n = orientation.len() + 1;
                let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
                let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
                oriented(labels, &edges, orientation)
            }
            Family::D { orientation } => {
                let n = orientation.len() + 1;
                if n < 4 {
                    return Err(Error::InvalidFamily(format!(
                        "D_n needs n >= 4, got orientation word of length {}",
                        orientation.len()
                    )));
                }
                let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
                let mut edges = vec![(0, 2), (2, 1), (2, 3)];
                edges.extend((3..n - 1).map(|i| (i, i + 1)));
                oriented(labels, &edges, orientation)
            }
            &Family::C { m, l } => {
                if m == 0 || l == 0 {
                    return Err(Error::InvalidFamily("C(m, l) needs m, l >= 1".into()));
                }
                let mut labels = vec!["0".to_string()];
                labels.extend((1..=m).map(|i| format!("a{i}")));
                labels.extend((1..=l).map(|j| format!("b{j}")));
                labels.push("1".to_string());
                let top = m + l + 1;
                let mut pairs = Vec::new();
                let mut prev = 0;
                for i in 1..=m {
                    pairs.push((prev, i));
                    prev = i;
                }
                pairs.push((prev, top));
                prev = 0;
                for j in 1..=l {
                    pairs.push((prev, m + j));
                    prev = m + j;
                }
                pairs.push((prev, top));
                Poset::from_index_relations(labels, &pairs)
            }
            &Family::Grid { rows, cols } => {
                if rows == 0 || cols == 0 {
                    return Err(Error::InvalidFamily("grid needs rows, cols >= 1".into()));
                }
                let id = |i: usize, j: usize| i * cols + j;
                let labels: Vec<String> = (0..rows)
                    .flat_map(|i| (0..cols).map(move |j| format!("{i}_{j}")))
                    .collect();
                let mut pairs = Vec::new();
                for i in 0..rows {
                    for j in 0..cols {
                        if i + 1 < rows {
                            pairs.push((id(i, j), id(i + 1, j)));
                        }
                        if j + 1 < cols {
                            pairs.push((id(i, j), id(i, j + 1)));
                        }
                    }
                }
                Poset::from_index_relations(labels, &pairs)
            }
            Family::Ladder { orientation } => {
                let m = orientation.len() + 1;
                let labels: Vec<String> = (0..2)
                    .flat_map(|r| (0..m).map(move |j| format!("{r}_{j}")))
                    .collect();
                let mut edges = Vec::new();
                for r in 0..2 {
                    for j in 0..m - 1 {
                        edges.push((r * m + j, r * m + j + 1));
                    }
                }
                let mut word = String::new();
                word.push_str(orientation);
                word.push_str(orientation);
                for j in 0..m {
                    edges.push((j, m + j));
                    word.push('f');
                }
                oriented(labels, &edges, &word)
            }
            Family::IgusaP => {
                let labels = ["min", "a1", "a2", "c", "b1", "b2", "max"];
                let pairs = [
                    ("min", "a1"),
                    ("min", "a2"),
                    ("a1", "c"),
                    ("a2", "c"),
                    ("c", "b1"),
                    ("c", "b2"),
                    ("b1", "max"),
                    ("b2", "max"),
                ];
                Poset::from_relations(&labels, &pairs)
            }
            Family::IgusaPPrime => {
                let full = Family::IgusaP.build()?;
                let keep: Vec<usize> = (0..full.len()).filter(|&i| full.label(i) != "c").collect();
                Ok(full.full_subposet(&keep).sub)
            }
        }
    }
}

fn oriented(labels: Vec<String>, edges: &[(usize, usize)], word: &str) -> Result<Poset> {
    if word.chars().count() != edges.len() {
        return Err(Error::InvalidFamily(format!(
            "orientation word `{word}` must have {} letters",
            edges.len()
        )));
    }
    let mut pairs = Vec::with_capacity(edges.len());
    for (&(u, v), c) in edges.iter().zip(word.chars()) {
        match c {
            'f' => pairs.push((u, v)),
            'b' => pairs.push((v, u)),
            other => {
                return Err(Error::InvalidFamily(format!(
                    "orientation letter `{other}` (expected `f` or `b`)"
                )))
            }
        }
    }
    Poset::from_index_relations(labels, &pairs)
}

/// All `2^k` orientation words of length `k`, in lexicographic order.
pub fn all_orientations(k: usize) -> Vec<String> {
    (0..1u32 << k)
        .map(|mask| {
            (0..k)
                .map(|i| if mask >> (k - 1 - i) & 1 == 1 { 'b' } else { 'f' })
                .collect()
        })
        .collect()
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A { orientation } => write!(f, "A{}({orientation})", orientation.len() + 1),
            Family::D { orientation } => write!(f, "D{}({orientation})", orientation.len() + 1),
            Family::C { m, l } => write!(f, "C({m},{l})"),
            Family::Grid { rows, cols } => write!(f, "grid({rows},{cols})"),
            Family::Ladder { orientation } => write!(f, "ladder({orientation})"),
            Family::IgusaP => write!(f, "igusa"),
            Family::IgusaPPrime => write!(f, "igusa-prime"),
        }
    }
}

/// Parses compact names such as `A:fbf`, `D:fff`, `C:2,1`, `grid:2,3`,
/// `ladder:ff`, `igusa`, `igusa-prime`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let pair = |arg: &str| -> Result<(usize, usize)> {
            let (x, y) = arg
                .split_once(',')
                .ok_or_else(|| Error::InvalidFamily(format!("expected two numbers in `{s}`")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidFamily(format!("bad number `{t}` in `{s}`")))
            };
            Ok((parse(x)?, parse(y)?))
        };
        match kind {
            "A" => Ok(Family::A {
                orientation: arg.to_string(),
            }),
            "D" => Ok(Family::D {
                orientation: arg.to_string(),
            }),
            "C" => {
                let (m, l) = pair(arg)?;
                Ok(Family::C { m, l })
            }
            "grid" => {
                let (rows, cols) = pair(arg)?;
                Ok(Family::Grid { rows, cols })
            }
            "ladder" => Ok(Family::Ladder {
                orientation: arg.to_string(),
            }),
            "igusa" => Ok(Family::IgusaP),
            "igusa-prime" => Ok(Family::IgusaPPrime),
            _ => Err(Error::InvalidFamily(format!("unknown family `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equioriented_a3_is_a_chain() {
        let p = Family::equioriented_a(3).build().unwrap();
        assert_eq!(p.hasse(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn c11_is_the_diamond() {
        let c = Family::C { m: 1, l: 1 }.build().unwrap();
        let g = Family::Grid { rows: 2, cols: 2 }.build().unwrap();
        assert!(c.is_isomorphic_unlabeled(&g));
    }

    #[test]
    fn c_paths_have_lengths_m_plus_one_and_l_plus_one() {
        let c = Family::C { m: 3, l: 2 }.build().unwrap();
        assert_eq!(c.len(), 7);
        assert_eq!(c.hasse().len(), 4 + 3);
        let bottom = c.index_of("0").unwrap();
        let top = c.index_of("1").unwrap();
        assert_eq!(c.successors(bottom).len(), 2);
        assert_eq!(c.predecessors(top).len(), 2);
    }

    #[test]
    fn d4_example_orientation() {
        // 1 -> 3, 3 -> 2, 3 -> 4
        let p = Family::D {
            orientation: "fff".into(),
        }
        .build()
        .unwrap();
        let i = |l: &str| p.index_of(l).unwrap();
        assert!(p.lt(i("1"), i("3")));
        assert!(p.lt(i("3"), i("2")));
        assert!(p.lt(i("3"), i("4")));
        assert_eq!(p.degree(i("3")), 3);
    }

    #[test]
    fn igusa_prime_drops_the_center() {
        let p = Family::IgusaP.build().unwrap();
        let q = Family::IgusaPPrime.build().unwrap();
        assert_eq!(p.len(), 7);
        assert_eq!(q.len(), 6);
        // a_i < b_j become covering pairs once the center is gone
        assert_eq!(q.hasse().len(), 2 + 4 + 2);
        let removed = p.full_subposet(&(0..7).filter(|&i| p.label(i) != "c").collect::<Vec<_>>());
        assert_eq!(removed.sub, q);
    }

    #[test]
    fn bad_words() {
        assert!(Family::A {
            orientation: "fx".into()
        }
        .build()
        .is_err());
        assert!(Family::D {
            orientation: "ff".into()
        }
        .build()
        .is_err());
        assert!(Family::C { m: 0, l: 1 }.build().is_err());
    }

    #[test]
    fn parse_names() {
        assert_eq!("C:2,1".parse::<Family>().unwrap(), Family::C { m: 2, l: 1 });
        assert_eq!(
            "A:fb".parse::<Family>().unwrap(),
            Family::A {
                orientation: "fb".into()
            }
        );
        assert!("Q:1".parse::<Family>().is_err());
    }

    #[test]
    fn orientations_enumerated() {
        assert_eq!(all_orientations(2), vec!["ff", "fb", "bf", "bb"]);
        assert_eq!(all_orientations(0), vec![""]);
    }

    #[test]
    fn ladder_shape() {
        let p = Family::Ladder {
            orientation: "ff".into(),
        }
        .build()
        .unwrap();
        assert_eq!(p.len(), 6);
        assert!(p.is_isomorphic_unlabeled(&Family::Grid { rows: 2, cols: 3 }.build().unwrap()));
    }
}
