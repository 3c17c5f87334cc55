//! Interval covers (right minimal approximations by interval-decomposable
//! modules), syzygies, and interval resolutions.
//!
//! The multiplicity of `k_I` in the cover of `M` is
//! `dim Hom(k_I, M) - dim Rad_I(M)`, where `Rad_I(M)` is spanned by all
//! composites `k_I -> k_J -> M` with `J != I`. Generators are picked greedily
//! from the hom basis to complement `Rad_I(M)`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{EchelonBasis, Field, FieldElem, Matrix};
use crate::module::{
    extend_by_zero, hom_solve_count, hom_vectors, interval_module, kernel, restrict, HomLayout,
    IntervalMultiset, Morphism, PersModule,
};
use crate::poset::{Interval, Poset, SubposetEmbedding};

/// Default resolution step cap.
pub const DEFAULT_STEP_CAP: usize = 64;
/// Default total-dimension cap for [`brute_force_cover`].
pub const DEFAULT_BRUTE_FORCE_DIM_CAP: usize = 10;
/// Largest host accepted by [`brute_force_cover`].
pub const BRUTE_FORCE_HOST_CAP: usize = 6;

/// Per-element blocks of a morphism, without the module handles.
type Blocks = Vec<Matrix>;

/// Hom spaces between interval modules and a fixed module, computed lazily
/// and cached for the lifetime of one cover computation.
struct HomContext<'m> {
    host: Arc<Poset>,
    field: Field,
    module: &'m PersModule,
    intervals: Vec<Interval>,
    /// Indices into `intervals` meeting the support of `module`.
    relevant: Vec<usize>,
    to_module: HashMap<usize, Vec<Blocks>>,
    between: HashMap<(usize, usize), Vec<Blocks>>,
}

impl<'m> HomContext<'m> {
    fn new(module: &'m PersModule) -> HomContext<'m> {
        let host = module.host().clone();
        let intervals = host.enumerate_intervals();
        let relevant = intervals
            .iter()
            .enumerate()
            .filter(|(_, iv)| iv.members().iter().any(|&a| module.dim(a) > 0))
            .map(|(i, _)| i)
            .collect();
        HomContext {
            field: module.field(),
            host,
            module,
            intervals,
            relevant,
            to_module: HashMap::new(),
            between: HashMap::new(),
        }
    }

    fn index_of(&self, iv: &Interval) -> Result<usize> {
        self.intervals
            .binary_search(iv)
            .map_err(|_| Error::Internal(format!("unknown interval {:?}", iv.members())))
    }

    fn interval_module(&self, i: usize) -> PersModule {
        interval_module(&self.host, self.field, &self.intervals[i])
    }

    /// Basis of `Hom(k_I, M)`.
    fn to_module(&mut self, i: usize) -> &Vec<Blocks> {
        if !self.to_module.contains_key(&i) {
            let iv = &self.intervals[i];
            let basis = if iv.members().iter().all(|&a| self.module.dim(a) == 0) {
                Vec::new()
            } else {
                let k = self.interval_module(i);
                let (layout, vecs) = hom_vectors(&k, self.module);
                vecs.iter().map(|v| layout.unflatten(self.field, v)).collect()
            };
            self.to_module.insert(i, basis);
        }
        &self.to_module[&i]
    }

    /// Basis of `Hom(k_I, k_J)`.
    fn between(&mut self, i: usize, j: usize) -> &Vec<Blocks> {
        if !self.between.contains_key(&(i, j)) {
            let (a, b) = (&self.intervals[i], &self.intervals[j]);
            let meet = a.members().iter().any(|&x| b.contains(x));
            let basis = if !meet {
                Vec::new()
            } else {
                let ki = self.interval_module(i);
                let kj = self.interval_module(j);
                let (layout, vecs) = hom_vectors(&ki, &kj);
                vecs.iter().map(|v| layout.unflatten(self.field, v)).collect()
            };
            self.between.insert((i, j), basis);
        }
        &self.between[&(i, j)]
    }

    fn layout_to_module(&self, i: usize) -> HomLayout {
        let dims: Vec<usize> = (0..self.host.len())
            .map(|a| usize::from(self.intervals[i].contains(a)))
            .collect();
        HomLayout::new(&dims, self.module.dims())
    }

    /// `Rad_I(M)` as an echelon basis in the coordinates of `Hom(k_I, M)`.
    fn radical(&mut self, i: usize) -> EchelonBasis {
        let layout = self.layout_to_module(i);
        let mut rad = EchelonBasis::new(self.field, layout.total);
        let others: Vec<usize> = self.relevant.iter().copied().filter(|&j| j != i).collect();
        for j in others {
            let us = self.between(i, j).clone();
            if us.is_empty() {
                continue;
            }
            let hs = self.to_module(j).clone();
            for h in &hs {
                for u in &us {
                    rad.insert(&layout.flatten(&compose(h, u)));
                }
            }
        }
        rad
    }

    /// For every relevant `J`, checks that the composites `g_s ∘ u` with
    /// `u in Hom(k_J, k_{I_s})` span `Hom(k_J, M)`.
    fn generates(&mut self, family: &[(usize, Blocks)]) -> bool {
        let rel = self.relevant.clone();
        for j in rel {
            let target = self.to_module(j).len();
            let layout = self.layout_to_module(j);
            let mut span = EchelonBasis::new(self.field, layout.total);
            for (i, g) in family {
                for u in self.between(j, *i).clone() {
                    span.insert(&layout.flatten(&compose(g, &u)));
                    if span.rank() == target {
                        break;
                    }
                }
                if span.rank() == target {
                    break;
                }
            }
            if span.rank() < target {
                return false;
            }
        }
        true
    }
}

fn compose(g: &[Matrix], f: &[Matrix]) -> Blocks {
    g.iter().zip(f).map(|(x, y)| x.mul(y)).collect()
}

/// An interval cover of a module.
#[derive(Clone, Debug)]
pub struct Cover {
    pub target: Arc<PersModule>,
    pub summands: IntervalMultiset,
    /// `⊕ k_I` over `summands.copies()`, in that order.
    pub source: Arc<PersModule>,
    pub map: Morphism,
    /// Per copy, the composite `k_I -> source -> target`.
    pub generators: Vec<(Interval, Morphism)>,
}

impl Cover {
    /// The kernel of the cover map with its inclusion into the source.
    pub fn syzygy(&self) -> (PersModule, Morphism) {
        kernel(&self.map)
    }

    /// Checks surjectivity, injectivity of every generator, and equality of
    /// supports. Returns a description of the first failure.
    pub fn check_contract(&self) -> std::result::Result<(), String> {
        if !self.map.is_surjective() {
            return Err("cover map is not surjective".into());
        }
        for (iv, g) in &self.generators {
            if !g.is_injective() {
                return Err(format!(
                    "generator on {} is not injective",
                    self.target.host().format_set(iv.members())
                ));
            }
        }
        if self.source.support() != self.target.support() {
            return Err("source and target supports differ".into());
        }
        Ok(())
    }
}

/// Assembles `⊕ k_{I_s} -> M` from per-copy generators sorted canonically.
fn assemble(
    target: &Arc<PersModule>,
    mut family: Vec<(Interval, Blocks)>,
) -> Result<Cover> {
    family.sort_by(|a, b| a.0.cmp(&b.0));
    let host = target.host().clone();
    let field = target.field();
    let summands = IntervalMultiset::new(family.iter().map(|(iv, _)| (iv.clone(), 1)).collect());
    let sum = summands.realize(&host, field)?;
    let source = sum.module.clone();
    let blocks: Vec<Matrix> = (0..host.len())
        .map(|a| {
            let columns: Vec<Vec<FieldElem>> = family
                .iter()
                .filter(|(iv, _)| iv.contains(a))
                .map(|(_, g)| g[a].column(0))
                .collect();
            Matrix::from_columns(field, target.dim(a), &columns)
        })
        .collect();
    let map = Morphism::new_unchecked(source.clone(), target.clone(), blocks)?;
    let generators = family
        .into_iter()
        .map(|(iv, g)| {
            let k = Arc::new(interval_module(&host, field, &iv));
            Morphism::new_unchecked(k, target.clone(), g).map(|m| (iv, m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cover {
        target: target.clone(),
        summands,
        source,
        map,
        generators,
    })
}

/// `n_I = dim Hom(k_I, M) - dim Rad_I(M)` for every interval with `n_I > 0`.
pub fn minimal_multiplicities(m: &PersModule) -> IntervalMultiset {
    let mut ctx = HomContext::new(m);
    let rel = ctx.relevant.clone();
    let pairs = rel
        .into_iter()
        .filter_map(|i| {
            let h = ctx.to_module(i).len();
            if h == 0 {
                return None;
            }
            let r = ctx.radical(i).rank();
            Some((ctx.intervals[i].clone(), h - r))
        })
        .collect();
    IntervalMultiset::new(pairs)
}

/// Lifts a basis of `Hom(k_I, M) / Rad_I(M)` for every interval.
fn minimal_generators(ctx: &mut HomContext<'_>) -> Vec<(usize, Blocks)> {
    let mut out = Vec::new();
    for i in ctx.relevant.clone() {
        let hs = ctx.to_module(i).clone();
        if hs.is_empty() {
            continue;
        }
        let layout = ctx.layout_to_module(i);
        let mut span = ctx.radical(i);
        for h in hs {
            if span.insert(&layout.flatten(&h)) {
                out.push((i, h));
            }
        }
    }
    out
}

/// Computes the interval cover of `m` and certifies it is a right minimal
/// approximation.
pub fn interval_cover(m: &Arc<PersModule>) -> Result<Cover> {
    interval_cover_with(m, true)
}

/// [`interval_cover`] with the approximation and minimality certificates optional.
pub fn interval_cover_with(m: &Arc<PersModule>, certify: bool) -> Result<Cover> {
    let mut ctx = HomContext::new(m);
    let gens = minimal_generators(&mut ctx);
    if certify {
        if !ctx.generates(&gens) {
            return Err(Error::Internal(
                "cover generators do not form a right approximation".into(),
            ));
        }
        let copies: Vec<usize> = gens.iter().map(|(i, _)| *i).collect();
        let blocks: Vec<Blocks> = gens.iter().map(|(_, g)| g.clone()).collect();
        if !minimal_family(&mut ctx, &copies, &blocks) {
            return Err(Error::Internal("cover is not right minimal".into()));
        }
    }
    let family = gens
        .into_iter()
        .map(|(i, g)| (ctx.intervals[i].clone(), g))
        .collect();
    let cover = assemble(m, family)?;
    if certify {
        let expected = minimal_multiplicities(m);
        if cover.summands != expected {
            return Err(Error::Internal(
                "generator count disagrees with the multiplicity formula".into(),
            ));
        }
    }
    Ok(cover)
}

/// Splits a morphism out of `⊕ k_{I_s}` (laid out as `summands.copies()`)
/// into per-copy generators.
fn split_generators(f: &Morphism, summands: &IntervalMultiset) -> Result<Vec<(Interval, Blocks)>> {
    let host = f.source().host();
    let copies = summands.copies();
    if summands.dims(host.len()) != f.source().dims() {
        return Err(Error::Schema(
            "source dimensions do not match the interval multiset".into(),
        ));
    }
    let field = f.source().field();
    let mut offset = vec![0usize; host.len()];
    let mut out = Vec::with_capacity(copies.len());
    for iv in copies {
        let blocks = (0..host.len())
            .map(|a| {
                if iv.contains(a) {
                    let col = f.block(a).column(offset[a]);
                    offset[a] += 1;
                    Matrix::from_columns(field, f.target().dim(a), &[col])
                } else {
                    Matrix::zeros(field, f.target().dim(a), 0)
                }
            })
            .collect();
        out.push((iv, blocks));
    }
    Ok(out)
}

fn index_family(ctx: &HomContext<'_>, family: Vec<(Interval, Blocks)>) -> Result<Vec<(usize, Blocks)>> {
    family
        .into_iter()
        .map(|(iv, g)| ctx.index_of(&iv).map(|i| (i, g)))
        .collect()
}

/// Whether every map from an interval module into the target of `f` factors
/// through `f`, whose source is `⊕ k_I` laid out by `summands`.
pub fn is_right_approximation(f: &Morphism, summands: &IntervalMultiset) -> Result<bool> {
    let mut ctx = HomContext::new(f.target());
    let family = index_family(&ctx, split_generators(f, summands)?)?;
    Ok(ctx.generates(&family))
}

/// Whether every endomorphism `g` of the source with `f g = f` is invertible.
///
/// Equivalently, the right ideal `K = {g | f g = 0}` of `End(source)` is
/// nilpotent; its powers are computed until they vanish or stabilize.
pub fn is_right_minimal(f: &Morphism, summands: &IntervalMultiset) -> Result<bool> {
    let mut ctx = HomContext::new(f.target());
    let family = index_family(&ctx, split_generators(f, summands)?)?;
    let copies: Vec<usize> = family.iter().map(|(i, _)| *i).collect();
    let blocks: Vec<Blocks> = family.into_iter().map(|(_, g)| g).collect();
    Ok(minimal_family(&mut ctx, &copies, &blocks))
}

fn minimal_family(ctx: &mut HomContext<'_>, copies: &[usize], generators: &[Blocks]) -> bool {
    let field = ctx.field;
    let n = ctx.host.len();
    // position of each copy inside X_a
    let mut pos: Vec<Vec<Option<usize>>> = vec![vec![None; n]; copies.len()];
    let mut dims = vec![0usize; n];
    for (s, &i) in copies.iter().enumerate() {
        for &a in ctx.intervals[i].members() {
            pos[s][a] = Some(dims[a]);
            dims[a] += 1;
        }
    }
    // f at each element, columns in copy order
    let f: Vec<Matrix> = (0..n)
        .map(|a| {
            let cols: Vec<Vec<FieldElem>> = generators
                .iter()
                .enumerate()
                .filter(|(s, _)| pos[*s][a].is_some())
                .map(|(_, g)| g[a].column(0))
                .collect();
            Matrix::from_columns(field, ctx.module.dim(a), &cols)
        })
        .collect();
    // basis of End(X) from Hom(k_{I_s}, k_{I_t}) placed in block (t, s)
    let mut end_basis: Vec<Blocks> = Vec::new();
    for (s, &i) in copies.iter().enumerate() {
        for (t, &j) in copies.iter().enumerate() {
            for u in ctx.between(i, j).clone() {
                let e: Blocks = (0..n)
                    .map(|a| {
                        let mut m = Matrix::zeros(field, dims[a], dims[a]);
                        if let (Some(ps), Some(pt)) = (pos[s][a], pos[t][a]) {
                            m.set(pt, ps, u[a].get(0, 0));
                        }
                        m
                    })
                    .collect();
                end_basis.push(e);
            }
        }
    }
    if end_basis.is_empty() {
        return true;
    }
    let end_layout = HomLayout::new(&dims, &dims);
    let f_layout = HomLayout::new(&dims, ctx.module.dims());
    // K = kernel of g |-> f g on End(X)
    let columns: Vec<Vec<FieldElem>> = end_basis
        .iter()
        .map(|e| f_layout.flatten(&compose(&f, e)))
        .collect();
    let system = Matrix::from_columns(field, f_layout.total, &columns);
    let combine = |coeffs: &[FieldElem]| -> Blocks {
        let mut acc: Blocks = dims.iter().map(|&d| Matrix::zeros(field, d, d)).collect();
        for (c, e) in coeffs.iter().zip(&end_basis) {
            if *c != 0 {
                for (x, y) in acc.iter_mut().zip(e) {
                    *x = x.add(&y.scale(*c));
                }
            }
        }
        acc
    };
    let k_ideal: Vec<Blocks> = system.kernel_basis().iter().map(|c| combine(c)).collect();
    if k_ideal.is_empty() {
        return true;
    }
    let mut power = k_ideal.clone();
    loop {
        let mut span = EchelonBasis::new(field, end_layout.total);
        let mut next: Vec<Blocks> = Vec::new();
        for k in &k_ideal {
            for x in &power {
                let prod = compose(k, x);
                if span.insert(&end_layout.flatten(&prod)) {
                    next.push(prod);
                }
            }
        }
        if next.is_empty() {
            return true;
        }
        if next.len() == power.len() {
            return false;
        }
        power = next;
    }
}

/// Redundancy elimination starting from the full hom-basis family: a copy
/// is dropped when it lies in the span of the other copies on the same
/// interval plus the composites through the remaining copies on other
/// intervals. Used to cross-check [`minimal_multiplicities`].
pub fn greedy_cover(m: &Arc<PersModule>) -> Result<Cover> {
    let mut ctx = HomContext::new(m);
    let mut family: Vec<(usize, Blocks)> = Vec::new();
    for i in ctx.relevant.clone() {
        for h in ctx.to_module(i).clone() {
            family.push((i, h));
        }
    }
    let mut alive = vec![true; family.len()];
    for s in 0..family.len() {
        let i = family[s].0;
        let layout = ctx.layout_to_module(i);
        let mut span = EchelonBasis::new(ctx.field, layout.total);
        for t in 0..family.len() {
            if t == s || !alive[t] {
                continue;
            }
            let (j, g) = (&family[t].0, family[t].1.clone());
            if *j == i {
                span.insert(&layout.flatten(&g));
            } else {
                for u in ctx.between(i, *j).clone() {
                    span.insert(&layout.flatten(&compose(&g, &u)));
                }
            }
        }
        if span.contains(&layout.flatten(&family[s].1)) {
            alive[s] = false;
        }
    }
    let kept = family
        .into_iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|((i, g), _)| (ctx.intervals[i].clone(), g))
        .collect();
    assemble(m, kept)
}

/// Exhaustive search over subfamilies of the full hom-basis family for a
/// right approximation of minimum total dimension.
///
/// Subfamilies are explored in canonical generator order, excluding before
/// including; among families of equal total dimension the first one reached
/// is kept.
pub fn brute_force_cover(m: &Arc<PersModule>, dim_cap: usize) -> Result<Cover> {
    if m.total_dim() > dim_cap {
        return Err(Error::CapExceeded(format!(
            "total dimension {} exceeds cap {dim_cap}",
            m.total_dim()
        )));
    }
    if m.host().len() > BRUTE_FORCE_HOST_CAP {
        return Err(Error::CapExceeded(format!(
            "host has {} elements, cap is {BRUTE_FORCE_HOST_CAP}",
            m.host().len()
        )));
    }
    let mut ctx = HomContext::new(m);
    let mut family: Vec<(usize, Blocks)> = Vec::new();
    for i in ctx.relevant.clone() {
        for h in ctx.to_module(i).clone() {
            family.push((i, h));
        }
    }
    // composite vectors g∘u in Hom(k_J, M) coordinates, per J and generator
    let rel = ctx.relevant.clone();
    let mut targets = Vec::with_capacity(rel.len());
    let mut composites: Vec<Vec<Vec<Vec<FieldElem>>>> = Vec::with_capacity(rel.len());
    for &j in &rel {
        targets.push(ctx.to_module(j).len());
        let layout = ctx.layout_to_module(j);
        let per_gen = family
            .iter()
            .map(|(i, g)| {
                ctx.between(j, *i)
                    .clone()
                    .iter()
                    .map(|u| layout.flatten(&compose(g, u)))
                    .collect()
            })
            .collect();
        composites.push(per_gen);
    }
    let search = BruteForce {
        field: m.field(),
        dims: m.dims().to_vec(),
        members: family.iter().map(|(i, _)| ctx.intervals[*i].members().to_vec()).collect(),
        sizes: family.iter().map(|(i, _)| ctx.intervals[*i].len()).collect(),
        targets,
        composites,
        ambient: rel.iter().map(|&j| ctx.layout_to_module(j).total).collect(),
    };
    let mut chosen = Vec::new();
    let mut best: Option<(usize, Vec<usize>)> = None;
    search.dfs(0, &mut chosen, &mut best);
    let (_, picked) = best.ok_or_else(|| {
        Error::Internal("the full hom-basis family is not an approximation".into())
    })?;
    let kept = picked
        .into_iter()
        .map(|s| (ctx.intervals[family[s].0].clone(), family[s].1.clone()))
        .collect();
    assemble(m, kept)
}

struct BruteForce {
    field: Field,
    dims: Vec<usize>,
    members: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    targets: Vec<usize>,
    composites: Vec<Vec<Vec<Vec<FieldElem>>>>,
    ambient: Vec<usize>,
}

impl BruteForce {
    fn feasible(&self, set: impl Iterator<Item = usize> + Clone) -> bool {
        for (j, &target) in self.targets.iter().enumerate() {
            let mut span = EchelonBasis::new(self.field, self.ambient[j]);
            for s in set.clone() {
                for v in &self.composites[j][s] {
                    span.insert(v);
                }
                if span.rank() == target {
                    break;
                }
            }
            if span.rank() < target {
                return false;
            }
        }
        true
    }

    fn lower_bound(&self, chosen: &[usize]) -> usize {
        let mut count = vec![0usize; self.dims.len()];
        for &s in chosen {
            for &a in &self.members[s] {
                count[a] += 1;
            }
        }
        count.iter().zip(&self.dims).map(|(c, d)| *c.max(d)).sum()
    }

    fn dfs(&self, next: usize, chosen: &mut Vec<usize>, best: &mut Option<(usize, Vec<usize>)>) {
        let bound = self.lower_bound(chosen);
        if let Some((b, _)) = best {
            if bound >= *b {
                return;
            }
        }
        if self.feasible(chosen.iter().copied()) {
            let total: usize = chosen.iter().map(|&s| self.sizes[s]).sum();
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                *best = Some((total, chosen.clone()));
            }
            return;
        }
        if next == self.sizes.len()
            || !self.feasible(chosen.iter().copied().chain(next..self.sizes.len()))
        {
            return;
        }
        self.dfs(next + 1, chosen, best);
        chosen.push(next);
        self.dfs(next + 1, chosen, best);
        chosen.pop();
    }
}

/// The kernel of the interval cover.
pub fn syzygy(m: &Arc<PersModule>) -> Result<PersModule> {
    Ok(interval_cover(m)?.syzygy().0)
}

/// Options for [`interval_resolution`].
#[derive(Clone, Copy, Debug)]
pub struct ResolutionOptions {
    /// Compute each step on the convex hull of the current support.
    pub reduce_support: bool,
    pub step_cap: usize,
    /// Run the approximation and minimality certificates on every cover.
    pub certify: bool,
}

impl Default for ResolutionOptions {
    fn default() -> Self {
        ResolutionOptions {
            reduce_support: true,
            step_cap: DEFAULT_STEP_CAP,
            certify: true,
        }
    }
}

/// A minimal interval resolution `... -> J_1 -> J_0 -> M -> 0`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub target: Arc<PersModule>,
    pub terms: Vec<IntervalMultiset>,
    /// `J_0 -> M`, absent for the zero module.
    pub augmentation: Option<Morphism>,
    /// `g_i : J_i -> J_{i-1}` for `i >= 1`.
    pub differentials: Vec<Morphism>,
    /// Hom-space linear systems solved while computing this resolution.
    pub hom_solves: u64,
}

impl Resolution {
    /// Index of the last nonzero term; 0 for the zero module.
    pub fn length(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    /// Pointwise rank bookkeeping: `dim J_i = rank g_i + rank g_{i+1}`,
    /// with `g_0` the augmentation, and the augmentation onto `M`.
    pub fn check_exact(&self) -> std::result::Result<(), String> {
        let Some(aug) = &self.augmentation else {
            return if self.target.is_zero() {
                Ok(())
            } else {
                Err("nonzero module with empty resolution".into())
            };
        };
        if aug.ranks() != self.target.dims() {
            return Err("augmentation is not surjective".into());
        }
        let n = self.target.host().len();
        let mut outgoing = aug.ranks();
        for i in 0..self.terms.len() {
            let dims = self.terms[i].dims(n);
            let incoming = match self.differentials.get(i) {
                Some(g) => g.ranks(),
                None => vec![0; n],
            };
            for a in 0..n {
                if dims[a] != outgoing[a] + incoming[a] {
                    return Err(format!(
                        "not exact at term {i}, element {}",
                        self.target.host().label(a)
                    ));
                }
            }
            outgoing = incoming;
        }
        Ok(())
    }
}

/// Covers `m` on the convex hull of its support and lifts the result back.
fn reduced_cover(m: &Arc<PersModule>, certify: bool) -> Result<Cover> {
    let host = m.host().clone();
    let hull = host.convex_hull(&m.support());
    if hull.len() == host.len() {
        return interval_cover_with(m, certify);
    }
    let emb = host.full_subposet(&hull);
    let local = Arc::new(restrict(m, &emb));
    let cover = interval_cover_with(&local, certify)?;
    lift_cover(&cover, &emb, m)
}

fn lift_cover(cover: &Cover, emb: &SubposetEmbedding, target: &Arc<PersModule>) -> Result<Cover> {
    let host = target.host();
    let field = target.field();
    let family = cover
        .generators
        .iter()
        .map(|(iv, g)| {
            let lifted = Interval::new(host, &emb.push_forward(iv.members()))?;
            let blocks = (0..host.len())
                .map(|a| match emb.pull_back(a) {
                    Some(i) => g.block(i).clone(),
                    None => Matrix::zeros(field, target.dim(a), usize::from(lifted.contains(a))),
                })
                .collect();
            Ok((lifted, blocks))
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(target, family)
}

/// Iterates interval covers and syzygies until the syzygy vanishes.
pub fn interval_resolution(m: &Arc<PersModule>, opts: ResolutionOptions) -> Result<Resolution> {
    let before = hom_solve_count();
    let mut terms = Vec::new();
    let mut augmentation = None;
    let mut differentials = Vec::new();
    // inclusion of the current syzygy into the previous term
    let mut inclusion: Option<Morphism> = None;
    let mut current = m.clone();
    while !current.is_zero() {
        if terms.len() >= opts.step_cap {
            return Err(Error::StepLimit(opts.step_cap));
        }
        let cover = if opts.reduce_support {
            reduced_cover(&current, opts.certify)?
        } else {
            interval_cover_with(&current, opts.certify)?
        };
        match &inclusion {
            None => augmentation = Some(cover.map.clone()),
            Some(inc) => differentials.push(inc.compose_after(&cover.map)?),
        }
        terms.push(cover.summands.clone());
        let (k, inc) = cover.syzygy();
        current = Arc::new(k);
        inclusion = Some(inc);
    }
    Ok(Resolution {
        target: m.clone(),
        terms,
        augmentation,
        differentials,
        hom_solves: hom_solve_count() - before,
    })
}

/// Length of the minimal interval resolution; 0 for the zero module.
pub fn interval_resdim(m: &Arc<PersModule>) -> Result<usize> {
    Ok(interval_resolution(m, ResolutionOptions::default())?.length())
}

/// Resolves a module given on a convex full subposet after extending it by zero.
pub fn resolve_extended(
    m: &PersModule,
    emb: &SubposetEmbedding,
    host: &Arc<Poset>,
    opts: ResolutionOptions,
) -> Result<Resolution> {
    let ext = Arc::new(extend_by_zero(m, emb, host)?);
    interval_resolution(&ext, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;
    use crate::module::{direct_sum, find_isomorphism};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d4() -> (Arc<Poset>, Arc<PersModule>) {
        let p = Arc::new(Family::D { orientation: "fff".into() }.build().unwrap());
        let f = Field::GF2;
        let i = |l: &str| p.index_of(l).unwrap();
        let mut dims = vec![0; 4];
        dims[i("1")] = 1;
        dims[i("2")] = 1;
        dims[i("3")] = 2;
        dims[i("4")] = 1;
        let maps = p
            .hasse()
            .iter()
            .map(|&(a, b)| match (p.label(a), p.label(b)) {
                ("1", "3") => Matrix::from_rows(f, 1, &[vec![1], vec![1]]),
                ("3", "2") => Matrix::from_rows(f, 2, &[vec![1, 0]]),
                ("3", "4") => Matrix::from_rows(f, 2, &[vec![0, 1]]),
                _ => unreachable!(),
            })
            .collect();
        let m = PersModule::new(p.clone(), f, dims, maps).unwrap();
        (p, Arc::new(m))
    }

    fn ms(p: &Poset, parts: &[(&[&str], usize)]) -> IntervalMultiset {
        IntervalMultiset::new(
            parts
                .iter()
                .map(|(l, k)| (Interval::from_labels(p, l).unwrap(), *k))
                .collect(),
        )
    }

    #[test]
    fn d4_cover_and_syzygy() {
        let (p, m) = d4();
        let expected = ms(&p, &[(&["3", "4"], 1), (&["1", "2", "3", "4"], 1), (&["2", "3"], 1)]);
        assert_eq!(minimal_multiplicities(&m), expected);
        let cover = interval_cover(&m).unwrap();
        assert_eq!(cover.summands, expected);
        cover.check_contract().unwrap();
        assert!(is_right_approximation(&cover.map, &cover.summands).unwrap());
        assert!(is_right_minimal(&cover.map, &cover.summands).unwrap());
        let (k, _) = cover.syzygy();
        let i = |l: &str| p.index_of(l).unwrap();
        assert_eq!(k.dim(i("1")), 0);
        assert_eq!(k.dim(i("2")), 1);
        assert_eq!(k.dim(i("3")), 1);
        assert_eq!(k.dim(i("4")), 1);
        let target = Arc::new(interval_module(
            &p,
            Field::GF2,
            &Interval::from_labels(&p, &["2", "3", "4"]).unwrap(),
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(find_isomorphism(&Arc::new(k), &target, &mut rng, 16)
            .unwrap()
            .is_isomorphic());
    }

    #[test]
    fn d4_resolution_with_and_without_reduction() {
        let (p, m) = d4();
        for reduce in [false, true] {
            let r = interval_resolution(
                &m,
                ResolutionOptions {
                    reduce_support: reduce,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(r.length(), 1);
            assert_eq!(r.terms[1], ms(&p, &[(&["2", "3", "4"], 1)]));
            r.check_exact().unwrap();
        }
        assert_eq!(interval_resdim(&m).unwrap(), 1);
    }

    #[test]
    fn dropping_the_full_summand_breaks_approximation() {
        let (p, m) = d4();
        let cover = interval_cover(&m).unwrap();
        let full = Interval::from_labels(&p, &["1", "2", "3", "4"]).unwrap();
        let kept: Vec<(Interval, Blocks)> = cover
            .generators
            .iter()
            .filter(|(iv, _)| *iv != full)
            .map(|(iv, g)| (iv.clone(), g.blocks().to_vec()))
            .collect();
        let partial = assemble(&m, kept).unwrap();
        assert!(!is_right_approximation(&partial.map, &partial.summands).unwrap());
    }

    #[test]
    fn extra_zero_summand_is_not_minimal() {
        let (p, m) = d4();
        let cover = interval_cover(&m).unwrap();
        let mut fam: Vec<(Interval, Blocks)> = cover
            .generators
            .iter()
            .map(|(iv, g)| (iv.clone(), g.blocks().to_vec()))
            .collect();
        let extra = Interval::from_labels(&p, &["3"]).unwrap();
        let zero: Blocks = (0..4)
            .map(|a| Matrix::zeros(Field::GF2, m.dim(a), usize::from(extra.contains(a))))
            .collect();
        fam.push((extra, zero));
        let padded = assemble(&m, fam).unwrap();
        assert!(is_right_approximation(&padded.map, &padded.summands).unwrap());
        assert!(!is_right_minimal(&padded.map, &padded.summands).unwrap());
    }

    #[test]
    fn interval_modules_cover_themselves() {
        let p = Arc::new(Family::Grid { rows: 2, cols: 2 }.build().unwrap());
        for iv in p.enumerate_intervals() {
            let k = Arc::new(interval_module(&p, Field::GF2, &iv));
            let c = interval_cover(&k).unwrap();
            assert_eq!(c.summands, IntervalMultiset::new(vec![(iv.clone(), 1)]));
            assert!(c.map.is_isomorphism());
            assert!(syzygy(&k).unwrap().is_zero());
            assert_eq!(interval_resdim(&k).unwrap(), 0);
            assert_eq!(brute_force_cover(&k, 10).unwrap().summands, c.summands);
            let id = Morphism::identity(k.clone());
            let single = IntervalMultiset::new(vec![(iv, 1)]);
            assert!(is_right_approximation(&id, &single).unwrap());
            assert!(is_right_minimal(&id, &single).unwrap());
        }
    }

    #[test]
    fn zero_module() {
        let p = Arc::new(Family::equioriented_a(3).build().unwrap());
        let z = Arc::new(PersModule::zero(p, Field::GF2));
        let c = interval_cover(&z).unwrap();
        assert!(c.summands.is_empty());
        assert!(brute_force_cover(&z, 10).unwrap().summands.is_empty());
        let r = interval_resolution(&z, ResolutionOptions::default()).unwrap();
        assert_eq!(r.length(), 0);
        assert!(r.terms.is_empty());
        r.check_exact().unwrap();
    }

    #[test]
    fn doubled_summand() {
        let p = Arc::new(Family::equioriented_a(3).build().unwrap());
        let iv = Interval::from_labels(&p, &["1"]).unwrap();
        let k = Arc::new(interval_module(&p, Field::GF2, &iv));
        let sum = direct_sum(&p, Field::GF2, &[k.clone(), k]).unwrap().module;
        assert_eq!(minimal_multiplicities(&sum), IntervalMultiset::new(vec![(iv, 2)]));
    }

    #[test]
    fn zero_map_is_not_an_approximation() {
        let (p, m) = d4();
        let iv = Interval::from_labels(&p, &["3"]).unwrap();
        let s = IntervalMultiset::new(vec![(iv.clone(), 1)]);
        let k = Arc::new(interval_module(&p, Field::GF2, &iv));
        let z = Morphism::zero(k, m).unwrap();
        assert!(!is_right_approximation(&z, &s).unwrap());
    }

    #[test]
    fn oracles_agree_on_d4() {
        let (_, m) = d4();
        let c = interval_cover(&m).unwrap();
        assert_eq!(brute_force_cover(&m, 10).unwrap().summands, c.summands);
        assert_eq!(greedy_cover(&m).unwrap().summands, c.summands);
    }

    #[test]
    fn direct_sum_with_interval_has_resdim_one() {
        let (p, m) = d4();
        let iv = Interval::from_labels(&p, &["2"]).unwrap();
        let k = Arc::new(interval_module(&p, Field::GF2, &iv));
        let sum = direct_sum(&p, Field::GF2, &[m.clone(), k]).unwrap().module;
        assert_eq!(interval_resdim(&sum).unwrap(), 1);
    }

    #[test]
    fn brute_force_respects_caps() {
        let (_, m) = d4();
        assert!(matches!(brute_force_cover(&m, 3), Err(Error::CapExceeded(_))));
    }
}
