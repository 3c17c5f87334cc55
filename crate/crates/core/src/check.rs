//! Random posets and modules, and the property suites run by `intres check`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::{
    brute_force_cover, greedy_cover, interval_cover, interval_resolution, ResolutionOptions,
    BRUTE_FORCE_HOST_CAP, DEFAULT_BRUTE_FORCE_DIM_CAP,
};
use crate::classify::classify_zero_gldim;
use crate::error::{Error, Result};
use crate::families::{all_orientations, Family};
use crate::homological::interval_gldim;
use crate::linalg::{Field, FieldElem, Matrix};
use crate::module::{
    cokernel, direct_sum, extend_by_zero, hom_basis, image, interval_module, kernel, Morphism,
    PersModule,
};
use crate::poset::{Interval, Poset};

/// A random poset on `n` elements labelled `1..=n`: each pair `i < j` is
/// related with probability `density`, then closed transitively.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> Poset {
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                pairs.push((order[i], order[j]));
            }
        }
    }
    Poset::from_index_relations(labels, &pairs).expect("relations along a linear order are acyclic")
}

/// Like [`random_poset`] but resampled until connected.
pub fn random_connected_poset<R: Rng>(rng: &mut R, n: usize, density: f64) -> Poset {
    loop {
        let p = random_poset(rng, n, density);
        if p.is_connected() {
            return p;
        }
    }
}

/// A random oriented tree on `n` elements with at least one vertex of
/// degree three or more when `n >= 4`.
pub fn random_branched_tree<R: Rng>(rng: &mut R, n: usize) -> Poset {
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    loop {
        let pairs: Vec<(usize, usize)> = (1..n)
            .map(|v| {
                let u = rng.gen_range(0..v);
                if rng.gen_bool(0.5) {
                    (u, v)
                } else {
                    (v, u)
                }
            })
            .collect();
        let p = Poset::from_index_relations(labels.clone(), &pairs).expect("trees are acyclic");
        if n < 4 || (0..n).any(|a| p.degree(a) >= 3) {
            return p;
        }
    }
}

/// A random nonzero module with pointwise dimension at most `max_dim`.
///
/// When the Hasse diagram is a forest there are no commutativity
/// constraints, and half of the time every edge simply gets a random
/// matrix. Otherwise takes a random morphism between sums of one to four
/// random interval modules, then its kernel, cokernel or image, and
/// conjugates by a random change of basis. Returns `None` if no candidate
/// fits after several attempts.
pub fn random_module<R: Rng>(
    rng: &mut R,
    host: &Arc<Poset>,
    field: Field,
    max_dim: usize,
) -> Option<PersModule> {
    let intervals = host.enumerate_intervals();
    if intervals.is_empty() {
        return None;
    }
    let forest = host.hasse().len() + host.components().len() == host.len();
    if forest && rng.gen_bool(0.8) {
        for _ in 0..64 {
            let dims: Vec<usize> = (0..host.len())
                .map(|a| match host.degree(a) {
                    d if d >= 3 => rng.gen_range(2.min(max_dim)..=max_dim),
                    _ => rng.gen_range(1..=2.min(max_dim)),
                })
                .collect();
            if dims.iter().all(|&d| d == 0) {
                continue;
            }
            let maps = host
                .hasse()
                .iter()
                .map(|&(a, b)| random_full_rank(rng, field, dims[b], dims[a]))
                .collect();
            return Some(PersModule::new(host.clone(), field, dims, maps).expect("forests impose no relations"));
        }
    }
    let sum = |rng: &mut R| -> Arc<PersModule> {
        let k = rng.gen_range(1..=4);
        let projective = rng.gen_bool(0.5);
        let parts: Vec<Arc<PersModule>> = (0..k)
            .map(|_| {
                let iv = if projective {
                    Interval::new(host, &host.up_set(rng.gen_range(0..host.len()))).unwrap()
                } else {
                    intervals.choose(rng).unwrap().clone()
                };
                Arc::new(interval_module(host, field, &iv))
            })
            .collect();
        direct_sum(host, field, &parts).unwrap().module
    };
    for _ in 0..64 {
        let x = sum(rng);
        let y = sum(rng);
        let basis = hom_basis(&x, &y).ok()?;
        let f = random_combination(rng, field, &x, &y, &basis);
        let m = match rng.gen_range(0..3) {
            0 => kernel(&f).0,
            1 => cokernel(&f).0,
            _ => image(&f).0,
        };
        if m.is_zero() || m.dims().iter().any(|&d| d > max_dim) {
            continue;
        }
        return Some(m.random_change_basis(rng));
    }
    None
}

fn random_full_rank<R: Rng>(rng: &mut R, field: Field, rows: usize, cols: usize) -> Matrix {
    loop {
        let mut m = Matrix::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, rng.gen_range(0..field.characteristic()));
            }
        }
        if m.rank() == rows.min(cols) {
            return m;
        }
    }
}

fn random_combination<R: Rng>(
    rng: &mut R,
    field: Field,
    x: &Arc<PersModule>,
    y: &Arc<PersModule>,
    basis: &[Morphism],
) -> Morphism {
    let mut blocks: Vec<_> = Morphism::zero(x.clone(), y.clone()).unwrap().blocks().to_vec();
    for g in basis {
        let c: FieldElem = rng.gen_range(0..field.characteristic());
        if c != 0 {
            for (acc, b) in blocks.iter_mut().zip(g.blocks()) {
                *acc = acc.add(&b.scale(c));
            }
        }
    }
    Morphism::new(x.clone(), y.clone(), blocks).expect("combinations of homs commute")
}

/// The property suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Surjectivity, per-generator injectivity and support equality of covers.
    Cover,
    /// Multiplicity formula against the exhaustive search.
    Oracle,
    /// Resolving on a convex full subposet or after extension by zero.
    Convex,
    /// Resolutions with and without support reduction.
    Reduce,
    /// Global dimension does not grow on full subposets.
    Monotone,
    /// Shape classifier against zero global dimension.
    Classify,
    /// Multiplicity formula against greedy redundancy elimination.
    Greedy,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Cover,
        Suite::Oracle,
        Suite::Convex,
        Suite::Reduce,
        Suite::Monotone,
        Suite::Classify,
        Suite::Greedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Cover => "cover",
            Suite::Oracle => "oracle",
            Suite::Convex => "convex",
            Suite::Reduce => "reduce",
            Suite::Monotone => "monotone",
            Suite::Classify => "classify",
            Suite::Greedy => "greedy",
        }
    }

    pub fn default_count(self) -> usize {
        match self {
            Suite::Cover => 200,
            Suite::Oracle => 100,
            Suite::Convex => 50,
            Suite::Reduce => 50,
            Suite::Monotone => 50,
            Suite::Classify => 100,
            Suite::Greedy => 100,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Schema(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub failures: Vec<String>,
    /// Suite-specific counters, e.g. hom solves for `reduce`.
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn small_field(i: usize) -> Field {
    if i.is_multiple_of(2) {
        Field::GF2
    } else {
        Field::new(3).unwrap()
    }
}

/// A random host with 2 to 6 elements and a random module on it.
fn sample_module(rng: &mut ChaCha8Rng, field: Field, max_total: Option<usize>) -> (Arc<Poset>, PersModule) {
    let wild = rng.gen_bool(0.85);
    loop {
        let n = rng.gen_range(2..=6);
        let p = if wild && rng.gen_bool(0.7) {
            Arc::new(random_branched_tree(rng, n.max(4)))
        } else {
            Arc::new(random_poset(rng, n, 0.45))
        };
        if wild && classify_zero_gldim(&p).accepted {
            continue;
        }
        if let Some(m) = random_module(rng, &p, field, 3) {
            if max_total.is_none_or(|cap| m.total_dim() <= cap) {
                return (p, m);
            }
        }
    }
}

/// Runs `count` cases of a suite from a fixed seed.
pub fn run_suite(suite: Suite, count: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (suite as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut cases = 0;
    let describe = |m: &PersModule| crate::io::module_to_json(m).replace(['\n', ' '], "");
    match suite {
        Suite::Cover => {
            let mut nontrivial = 0;
            for i in 0..count {
                let (_, m) = sample_module(&mut rng, small_field(i), None);
                let m = Arc::new(m);
                match interval_cover(&m) {
                    Ok(c) => {
                        if let Err(e) = c.check_contract() {
                            failures.push(format!("{e}: {}", describe(&m)));
                        }
                        if !c.syzygy().0.is_zero() {
                            nontrivial += 1;
                        }
                    }
                    Err(e) => failures.push(format!("{e}: {}", describe(&m))),
                }
                cases += 1;
            }
            notes.push(format!("modules that are not interval-decomposable: {nontrivial}"));
        }
        Suite::Oracle => {
            let mut nontrivial = 0;
            for i in 0..count {
                let (_, m) = sample_module(&mut rng, small_field(i), Some(DEFAULT_BRUTE_FORCE_DIM_CAP));
                debug_assert!(m.host().len() <= BRUTE_FORCE_HOST_CAP);
                let m = Arc::new(m);
                let fast = interval_cover(&m)?.summands;
                let slow = brute_force_cover(&m, DEFAULT_BRUTE_FORCE_DIM_CAP)?.summands;
                if fast.dims(m.host().len()) != m.dims() {
                    nontrivial += 1;
                }
                if fast != slow {
                    failures.push(format!(
                        "formula {} vs search {}: {}",
                        fast.describe(m.host()),
                        slow.describe(m.host()),
                        describe(&m)
                    ));
                }
                cases += 1;
            }
            notes.push(format!("covers with a nonzero kernel: {nontrivial}"));
        }
        Suite::Greedy => {
            for i in 0..count {
                let (_, m) = sample_module(&mut rng, small_field(i), None);
                let m = Arc::new(m);
                let fast = interval_cover(&m)?.summands;
                let greedy = greedy_cover(&m)?.summands;
                if fast != greedy {
                    failures.push(format!(
                        "formula {} vs greedy {}: {}",
                        fast.describe(m.host()),
                        greedy.describe(m.host()),
                        describe(&m)
                    ));
                }
                cases += 1;
            }
        }
        Suite::Convex => {
            let opts = ResolutionOptions {
                reduce_support: false,
                ..Default::default()
            };
            let mut nontrivial = 0;
            while cases < count {
                let n = rng.gen_range(3..=6);
                let p = if rng.gen_bool(0.5) {
                    Arc::new(random_branched_tree(&mut rng, n.max(4)))
                } else {
                    Arc::new(random_poset(&mut rng, n, 0.45))
                };
                let n = p.len();
                let k = rng.gen_range(n / 2..=n);
                let mut pick: Vec<usize> = (0..n).collect();
                pick.shuffle(&mut rng);
                pick.truncate(k);
                let hull = p.convex_hull(&pick);
                let emb = p.full_subposet(&hull);
                let sub = Arc::new(emb.sub.clone());
                let field = small_field(cases);
                // Prefer modules that are not interval-decomposable.
                let Some(m) = (0..20)
                    .filter_map(|_| random_module(&mut rng, &sub, field, 3))
                    .find(|m| {
                        interval_cover(&Arc::new(m.clone())).is_ok_and(|c| !c.syzygy().0.is_zero())
                    })
                    .or_else(|| random_module(&mut rng, &sub, field, 3))
                else {
                    continue;
                };
                let local = interval_resolution(&Arc::new(m.clone()), opts)?;
                let global = interval_resolution(&Arc::new(extend_by_zero(&m, &emb, &p)?), opts)?;
                let lifted: Vec<_> = local
                    .terms
                    .iter()
                    .map(|t| {
                        t.map_intervals(|iv| {
                            crate::poset::Interval::new(&p, &emb.push_forward(iv.members()))
                                .expect("intervals of a convex subposet are intervals")
                        })
                    })
                    .collect();
                if global.length() > 0 {
                    nontrivial += 1;
                }
                if lifted != global.terms {
                    failures.push(format!(
                        "subposet {} gives length {}, host gives {}: {}",
                        p.format_set(&hull),
                        local.length(),
                        global.length(),
                        describe(&m)
                    ));
                }
                cases += 1;
            }
            notes.push(format!("resolutions of positive length: {nontrivial}"));
        }
        Suite::Reduce => {
            let (mut total_reduced, mut total_full) = (0u64, 0u64);
            for i in 0..count {
                let (_, m) = sample_module(&mut rng, small_field(i), None);
                let m = Arc::new(m);
                let full = interval_resolution(
                    &m,
                    ResolutionOptions {
                        reduce_support: false,
                        ..Default::default()
                    },
                )?;
                let reduced = interval_resolution(&m, ResolutionOptions::default())?;
                total_reduced += reduced.hom_solves;
                total_full += full.hom_solves;
                if full.terms != reduced.terms {
                    failures.push(format!("terms differ: {}", describe(&m)));
                } else if reduced.hom_solves > full.hom_solves {
                    failures.push(format!(
                        "reduced run solved {} hom systems, unreduced {}: {}",
                        reduced.hom_solves,
                        full.hom_solves,
                        describe(&m)
                    ));
                }
                if let Err(e) = reduced.check_exact() {
                    failures.push(format!("{e}: {}", describe(&m)));
                }
                cases += 1;
            }
            notes.push(format!("hom solves: reduced {total_reduced}, unreduced {total_full}"));
        }
        Suite::Monotone => {
            let mut nontrivial = 0;
            for i in 0..count {
                let n = rng.gen_range(2..=6);
                let p = Arc::new(random_poset(&mut rng, n, 0.45));
                let k = rng.gen_range(1..=n);
                let mut pick: Vec<usize> = (0..n).collect();
                pick.shuffle(&mut rng);
                pick.truncate(k);
                let q = Arc::new(p.full_subposet(&pick).sub);
                let field = small_field(i);
                let gp = interval_gldim(&p, field)?;
                let gq = interval_gldim(&q, field)?;
                if gp > 0 {
                    nontrivial += 1;
                }
                if gq > gp {
                    failures.push(format!(
                        "gldim {gq} of {} exceeds gldim {gp} of {}",
                        p.format_set(&p.full_subposet(&pick).map),
                        serde_json::to_string(&p.to_doc()).unwrap()
                    ));
                }
                cases += 1;
            }
            notes.push(format!("hosts of positive gldim: {nontrivial}"));
        }
        Suite::Classify => {
            let mut corpus = classification_corpus();
            for _ in 0..count {
                let n = rng.gen_range(1..=6);
                corpus.push(random_connected_poset(&mut rng, n, 0.45));
            }
            for p in corpus {
                let p = Arc::new(p);
                let verdict = classify_zero_gldim(&p);
                let g = interval_gldim(&p, Field::GF2)?;
                if verdict.accepted != (g == 0) {
                    failures.push(format!(
                        "classifier says {}, gldim is {g}: {}",
                        verdict.accepted,
                        serde_json::to_string(&p.to_doc()).unwrap()
                    ));
                }
                cases += 1;
            }
        }
    }
    Ok(SuiteReport {
        suite,
        seed,
        cases,
        failures,
        notes,
    })
}

/// Curated posets: every orientation of `A_n` (n <= 5) and `D_4`, `C(m, l)`
/// with `m + l <= 5`, the 2x2 and 2x3 grids, and ladders with up to three rungs.
pub fn classification_corpus() -> Vec<Poset> {
    let mut fams = Vec::new();
    for n in 1..=5 {
        for w in all_orientations(n - 1) {
            fams.push(Family::A { orientation: w });
        }
    }
    for w in all_orientations(3) {
        fams.push(Family::D { orientation: w });
    }
    for m in 1..=4 {
        for l in 1..=5 - m {
            fams.push(Family::C { m, l });
        }
    }
    fams.push(Family::Grid { rows: 2, cols: 2 });
    fams.push(Family::Grid { rows: 2, cols: 3 });
    for rungs in 1..=3 {
        for w in all_orientations(rungs - 1) {
            fams.push(Family::Ladder { orientation: w });
        }
    }
    fams.into_iter().map(|f| f.build().expect("corpus families are valid")).collect()
}
