//! Persistence modules: commutative representations of a finite poset.
//!
//! A [`PersModule`] stores one matrix per Hasse edge; composites along longer
//! relations are computed on demand. Morphisms are families of per-element
//! blocks commuting with the structure maps.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{quotient_maps, Field, FieldElem, Matrix};
use crate::poset::{Interval, Poset, SubposetEmbedding};

thread_local! {
    static HOM_SOLVES: Cell<u64> = const { Cell::new(0) };
}

/// Number of hom-space linear systems solved on this thread so far.
pub fn hom_solve_count() -> u64 {
    HOM_SOLVES.with(|c| c.get())
}

fn note_hom_solve() {
    HOM_SOLVES.with(|c| c.set(c.get() + 1));
}

/// A representation of `host` over a prime field.
#[derive(Clone, PartialEq, Eq)]
pub struct PersModule {
    host: Arc<Poset>,
    field: Field,
    dims: Vec<usize>,
    /// Indexed like `host.hasse()`; `maps[e]` is `dim(target) x dim(source)`.
    maps: Vec<Matrix>,
}

impl fmt::Debug for PersModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = (0..self.host.len())
            .map(|a| format!("{}:{}", self.host.label(a), self.dims[a]))
            .collect();
        write!(f, "PersModule[{}] over {}", dims.join(" "), self.field)
    }
}

/// The first place a representation fails to commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub from: String,
    pub to: String,
    pub path_a: Vec<String>,
    pub path_b: Vec<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "paths {} and {} from `{}` to `{}` compose differently",
            self.path_a.join("->"),
            self.path_b.join("->"),
            self.from,
            self.to
        )
    }
}

impl PersModule {
    /// Assembles a module and checks every commutativity square.
    pub fn new(host: Arc<Poset>, field: Field, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<PersModule> {
        let m = PersModule::new_unchecked(host, field, dims, maps)?;
        m.validate().map_err(Error::NonCommutative)?;
        Ok(m)
    }

    /// Checks shapes only; callers guarantee commutativity.
    pub(crate) fn new_unchecked(
        host: Arc<Poset>,
        field: Field,
        dims: Vec<usize>,
        maps: Vec<Matrix>,
    ) -> Result<PersModule> {
        if dims.len() != host.len() || maps.len() != host.hasse().len() {
            return Err(Error::Schema(format!(
                "expected {} dims and {} maps, got {} and {}",
                host.len(),
                host.hasse().len(),
                dims.len(),
                maps.len()
            )));
        }
        for (e, &(a, b)) in host.hasse().iter().enumerate() {
            let m = &maps[e];
            if m.shape() != (dims[b], dims[a]) || m.field() != field {
                return Err(Error::Schema(format!(
                    "map {}->{} must be {}x{} over {}, got {}x{} over {}",
                    host.label(a),
                    host.label(b),
                    dims[b],
                    dims[a],
                    field,
                    m.rows(),
                    m.cols(),
                    m.field()
                )));
            }
        }
        Ok(PersModule {
            host,
            field,
            dims,
            maps,
        })
    }

    pub fn zero(host: Arc<Poset>, field: Field) -> PersModule {
        let n = host.len();
        let maps = host
            .hasse()
            .iter()
            .map(|_| Matrix::zeros(field, 0, 0))
            .collect();
        PersModule {
            host,
            field,
            dims: vec![0; n],
            maps,
        }
    }

    pub fn host(&self) -> &Arc<Poset> {
        &self.host
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, a: usize) -> usize {
        self.dims[a]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Structure map on the Hasse edge with index `e`.
    pub fn edge_map(&self, e: usize) -> &Matrix {
        &self.maps[e]
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    /// Structure map on the covering pair `a -> b`.
    pub fn map(&self, a: usize, b: usize) -> Option<&Matrix> {
        self.host.edge_index(a, b).map(|e| &self.maps[e])
    }

    /// `{a | dim_a > 0}`
    pub fn support(&self) -> Vec<usize> {
        (0..self.host.len()).filter(|&a| self.dims[a] > 0).collect()
    }

    /// `M(a <= b)` for every `b >= a`, composed along one Hasse path each.
    pub fn composites_from(&self, a: usize) -> Vec<Option<Matrix>> {
        let p = &self.host;
        let mut out: Vec<Option<Matrix>> = vec![None; p.len()];
        for &z in p.linear_extension() {
            if z == a {
                out[z] = Some(Matrix::identity(self.field, self.dims[a]));
                continue;
            }
            if !p.leq(a, z) {
                continue;
            }
            let c = *p
                .predecessors(z)
                .iter()
                .find(|&&c| p.leq(a, c))
                .expect("a < z has a covering predecessor above a");
            let prev = out[c].as_ref().expect("linear extension visits c before z");
            out[z] = Some(self.map(c, z).unwrap().mul(prev));
        }
        out
    }

    /// `M(a <= b)`, or `None` when `a` is not below `b`.
    pub fn composite(&self, a: usize, b: usize) -> Option<Matrix> {
        if !self.host.leq(a, b) {
            return None;
        }
        self.composites_from(a).swap_remove(b)
    }

    /// Confirms that every pair of Hasse paths between two elements composes
    /// to the same matrix.
    ///
    /// Inductively, for each source `a` and each `z > a` every covering
    /// predecessor `c >= a` of `z` must give the same `M(c -> z) M(a <= c)`.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let p = &self.host;
        for a in 0..p.len() {
            let mut comp: Vec<Option<Matrix>> = vec![None; p.len()];
            let mut path: Vec<Vec<usize>> = vec![Vec::new(); p.len()];
            for &z in p.linear_extension() {
                if z == a {
                    comp[z] = Some(Matrix::identity(self.field, self.dims[a]));
                    path[z] = vec![a];
                    continue;
                }
                if !p.leq(a, z) {
                    continue;
                }
                let mut first: Option<(usize, Matrix)> = None;
                for &c in p.predecessors(z) {
                    if !p.leq(a, c) {
                        continue;
                    }
                    let via = self.map(c, z).unwrap().mul(comp[c].as_ref().unwrap());
                    match &first {
                        None => first = Some((c, via)),
                        Some((c0, m0)) => {
                            if *m0 != via {
                                let lbl = |v: &Vec<usize>, last: usize| {
                                    v.iter()
                                        .chain(std::iter::once(&last))
                                        .map(|&x| p.label(x).to_string())
                                        .collect::<Vec<_>>()
                                };
                                return Err(Violation {
                                    from: p.label(a).to_string(),
                                    to: p.label(z).to_string(),
                                    path_a: lbl(&path[*c0], z),
                                    path_b: lbl(&path[c], z),
                                });
                            }
                        }
                    }
                }
                let (c0, m0) = first.unwrap();
                let mut pz = path[c0].clone();
                pz.push(z);
                path[z] = pz;
                comp[z] = Some(m0);
            }
        }
        Ok(())
    }

    /// Conjugates every structure map by the given per-element automorphisms:
    /// `M'(a -> b) = g_b M(a -> b) g_a^{-1}`.
    pub fn change_basis(&self, g: &[Matrix]) -> PersModule {
        let inv: Vec<Matrix> = g
            .iter()
            .map(|m| m.inverse().expect("change of basis must be invertible"))
            .collect();
        let maps = self
            .host
            .hasse()
            .iter()
            .enumerate()
            .map(|(e, &(a, b))| g[b].mul(&self.maps[e]).mul(&inv[a]))
            .collect();
        PersModule {
            host: self.host.clone(),
            field: self.field,
            dims: self.dims.clone(),
            maps,
        }
    }

    /// A uniformly random change of basis at every element.
    pub fn random_change_basis<R: Rng>(&self, rng: &mut R) -> PersModule {
        let g: Vec<Matrix> = self
            .dims
            .iter()
            .map(|&d| random_invertible(self.field, d, rng))
            .collect();
        self.change_basis(&g)
    }
}

pub(crate) fn random_invertible<R: Rng>(field: Field, d: usize, rng: &mut R) -> Matrix {
    loop {
        let mut m = Matrix::zeros(field, d, d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, rng.gen_range(0..field.characteristic()));
            }
        }
        if m.is_invertible() {
            return m;
        }
    }
}

/// `k_I`: one-dimensional on `I`, identities inside, zero elsewhere.
pub fn interval_module(host: &Arc<Poset>, field: Field, interval: &Interval) -> PersModule {
    let dims: Vec<usize> = (0..host.len())
        .map(|a| usize::from(interval.contains(a)))
        .collect();
    let maps = host
        .hasse()
        .iter()
        .map(|&(a, b)| {
            if dims[a] == 1 && dims[b] == 1 {
                Matrix::identity(field, 1)
            } else {
                Matrix::zeros(field, dims[b], dims[a])
            }
        })
        .collect();
    PersModule {
        host: host.clone(),
        field,
        dims,
        maps,
    }
}

/// `k_I` for an arbitrary member list, rejecting non-intervals.
pub fn interval_module_checked(host: &Arc<Poset>, field: Field, members: &[usize]) -> Result<PersModule> {
    let iv = Interval::new(host, members)?;
    Ok(interval_module(host, field, &iv))
}

/// A family of per-element blocks `f_a : M_a -> N_a` commuting with structure maps.
#[derive(Clone, PartialEq, Eq)]
pub struct Morphism {
    source: Arc<PersModule>,
    target: Arc<PersModule>,
    blocks: Vec<Matrix>,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Morphism")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("blocks", &self.blocks)
            .finish()
    }
}

impl Morphism {
    pub fn new(source: Arc<PersModule>, target: Arc<PersModule>, blocks: Vec<Matrix>) -> Result<Morphism> {
        let f = Morphism::new_unchecked(source, target, blocks)?;
        if let Some(e) = f.first_noncommuting_edge() {
            let (a, b) = f.source.host.hasse()[e];
            return Err(Error::Internal(format!(
                "morphism does not commute on edge {}->{}",
                f.source.host.label(a),
                f.source.host.label(b)
            )));
        }
        Ok(f)
    }

    pub(crate) fn new_unchecked(
        source: Arc<PersModule>,
        target: Arc<PersModule>,
        blocks: Vec<Matrix>,
    ) -> Result<Morphism> {
        if source.host != target.host {
            return Err(Error::HostMismatch);
        }
        let n = source.host.len();
        if blocks.len() != n {
            return Err(Error::Schema(format!("expected {n} blocks, got {}", blocks.len())));
        }
        for a in 0..n {
            if blocks[a].shape() != (target.dims[a], source.dims[a]) {
                return Err(Error::Schema(format!(
                    "block at {} must be {}x{}",
                    source.host.label(a),
                    target.dims[a],
                    source.dims[a]
                )));
            }
        }
        Ok(Morphism {
            source,
            target,
            blocks,
        })
    }

    pub fn zero(source: Arc<PersModule>, target: Arc<PersModule>) -> Result<Morphism> {
        let blocks = (0..source.host.len())
            .map(|a| Matrix::zeros(source.field, target.dims[a], source.dims[a]))
            .collect();
        Morphism::new_unchecked(source, target, blocks)
    }

    pub fn identity(m: Arc<PersModule>) -> Morphism {
        let blocks = m.dims.iter().map(|&d| Matrix::identity(m.field, d)).collect();
        Morphism {
            source: m.clone(),
            target: m,
            blocks,
        }
    }

    pub fn source(&self) -> &Arc<PersModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PersModule> {
        &self.target
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn block(&self, a: usize) -> &Matrix {
        &self.blocks[a]
    }

    fn first_noncommuting_edge(&self) -> Option<usize> {
        self.source
            .host
            .hasse()
            .iter()
            .enumerate()
            .position(|(e, &(a, b))| {
                self.target.maps[e].mul(&self.blocks[a]) != self.blocks[b].mul(&self.source.maps[e])
            })
    }

    pub fn commutes(&self) -> bool {
        self.first_noncommuting_edge().is_none()
    }

    /// `self ∘ first`
    pub fn compose_after(&self, first: &Morphism) -> Result<Morphism> {
        if first.target.dims != self.source.dims || first.target.host != self.source.host {
            return Err(Error::HostMismatch);
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&first.blocks)
            .map(|(g, f)| g.mul(f))
            .collect();
        Morphism::new_unchecked(first.source.clone(), self.target.clone(), blocks)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Matrix::is_zero)
    }

    pub fn is_injective(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.cols())
    }

    pub fn is_surjective(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.rows())
    }

    pub fn is_isomorphism(&self) -> bool {
        self.blocks.iter().all(Matrix::is_invertible)
    }

    /// Pointwise ranks.
    pub fn ranks(&self) -> Vec<usize> {
        self.blocks.iter().map(Matrix::rank).collect()
    }
}

/// Variable layout of a hom-space linear system: the block at `a` occupies
/// `offset[a] .. offset[a] + rows[a] * cols[a]`, row-major.
#[derive(Clone, Debug)]
pub(crate) struct HomLayout {
    pub offset: Vec<usize>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub total: usize,
}

impl HomLayout {
    pub fn new(source_dims: &[usize], target_dims: &[usize]) -> HomLayout {
        let mut offset = Vec::with_capacity(source_dims.len());
        let mut total = 0;
        for (s, t) in source_dims.iter().zip(target_dims) {
            offset.push(total);
            total += s * t;
        }
        HomLayout {
            offset,
            rows: target_dims.to_vec(),
            cols: source_dims.to_vec(),
            total,
        }
    }

    pub fn unflatten(&self, field: Field, v: &[FieldElem]) -> Vec<Matrix> {
        (0..self.offset.len())
            .map(|a| {
                let (r, c) = (self.rows[a], self.cols[a]);
                let mut m = Matrix::zeros(field, r, c);
                for i in 0..r {
                    for j in 0..c {
                        m.set(i, j, v[self.offset[a] + i * c + j]);
                    }
                }
                m
            })
            .collect()
    }

    pub fn flatten(&self, blocks: &[Matrix]) -> Vec<FieldElem> {
        let mut v = Vec::with_capacity(self.total);
        for b in blocks {
            v.extend_from_slice(b.entries());
        }
        v
    }
}

/// Basis of `Hom(M, N)` as flattened block vectors in `HomLayout` order.
pub(crate) fn hom_vectors(m: &PersModule, n: &PersModule) -> (HomLayout, Vec<Vec<FieldElem>>) {
    assert_eq!(m.field, n.field);
    let layout = HomLayout::new(&m.dims, &n.dims);
    if layout.total == 0 {
        return (layout, Vec::new());
    }
    note_hom_solve();
    let f = m.field;
    let p = &m.host;
    let eq_count: usize = p.hasse().iter().map(|&(a, b)| n.dims[b] * m.dims[a]).sum();
    let mut sys = Matrix::zeros(f, eq_count, layout.total);
    let mut row = 0;
    for (e, &(a, b)) in p.hasse().iter().enumerate() {
        let mm = &m.maps[e]; // m_b x m_a
        let nm = &n.maps[e]; // n_b x n_a
        let (ma, mb, na, nb) = (m.dims[a], m.dims[b], n.dims[a], n.dims[b]);
        // (N(a->b) F_a - F_b M(a->b))[i][j] = 0
        for i in 0..nb {
            for j in 0..ma {
                for k in 0..na {
                    let c = nm.get(i, k);
                    if c != 0 {
                        let var = layout.offset[a] + k * ma + j;
                        sys.set(row, var, f.add(sys.get(row, var), c));
                    }
                }
                for k in 0..mb {
                    let c = mm.get(k, j);
                    if c != 0 {
                        let var = layout.offset[b] + i * mb + k;
                        sys.set(row, var, f.sub(sys.get(row, var), c));
                    }
                }
                row += 1;
            }
        }
    }
    let basis = sys.kernel_basis();
    (layout, basis)
}

/// A basis of `Hom(M, N)`, deterministic given the variable order.
pub fn hom_basis(m: &Arc<PersModule>, n: &Arc<PersModule>) -> Result<Vec<Morphism>> {
    if m.host != n.host {
        return Err(Error::HostMismatch);
    }
    if m.field != n.field {
        return Err(Error::FieldMismatch(m.field.characteristic(), n.field.characteristic()));
    }
    let (layout, vecs) = hom_vectors(m, n);
    vecs.iter()
        .map(|v| Morphism::new_unchecked(m.clone(), n.clone(), layout.unflatten(m.field, v)))
        .collect()
}

pub fn hom_dim(m: &PersModule, n: &PersModule) -> usize {
    hom_vectors(m, n).1.len()
}

/// Pointwise kernel with induced structure maps, and its inclusion.
pub fn kernel(f: &Morphism) -> (PersModule, Morphism) {
    let src = &f.source;
    let field = src.field;
    let p = src.host.clone();
    let bases: Vec<Matrix> = f
        .blocks
        .iter()
        .enumerate()
        .map(|(a, b)| Matrix::from_columns(field, src.dims[a], &b.kernel_basis()))
        .collect();
    let dims: Vec<usize> = bases.iter().map(Matrix::cols).collect();
    let maps = p
        .hasse()
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            let image = src.maps[e].mul(&bases[a]);
            bases[b]
                .solve_matrix(&image)
                .expect("kernel is a subrepresentation")
        })
        .collect();
    let k = Arc::new(PersModule {
        host: p,
        field,
        dims,
        maps,
    });
    let inc = Morphism {
        source: k.clone(),
        target: src.clone(),
        blocks: bases,
    };
    ((*k).clone(), inc)
}

/// The submodule spanned pointwise by the columns of `bases`, which must be
/// linearly independent and stable under the structure maps.
pub(crate) fn submodule(m: &Arc<PersModule>, bases: Vec<Matrix>) -> (PersModule, Morphism) {
    let p = m.host.clone();
    let dims: Vec<usize> = bases.iter().map(Matrix::cols).collect();
    let maps = p
        .hasse()
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            bases[b]
                .solve_matrix(&m.maps[e].mul(&bases[a]))
                .expect("subspaces are stable under the structure maps")
        })
        .collect();
    let sub = Arc::new(PersModule {
        host: p,
        field: m.field,
        dims,
        maps,
    });
    let inc = Morphism {
        source: sub.clone(),
        target: m.clone(),
        blocks: bases,
    };
    ((*sub).clone(), inc)
}

/// Pointwise image of `f` as a submodule of the target, with its inclusion.
pub fn image(f: &Morphism) -> (PersModule, Morphism) {
    let tgt = &f.target;
    let field = tgt.field;
    let p = tgt.host.clone();
    let bases: Vec<Matrix> = f
        .blocks
        .iter()
        .enumerate()
        .map(|(a, b)| Matrix::from_columns(field, tgt.dims[a], &b.column_space_basis()))
        .collect();
    let dims: Vec<usize> = bases.iter().map(Matrix::cols).collect();
    let maps = p
        .hasse()
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| {
            bases[b]
                .solve_matrix(&tgt.maps[e].mul(&bases[a]))
                .expect("image is a subrepresentation")
        })
        .collect();
    let im = Arc::new(PersModule {
        host: p,
        field,
        dims,
        maps,
    });
    let inc = Morphism {
        source: im.clone(),
        target: tgt.clone(),
        blocks: bases,
    };
    ((*im).clone(), inc)
}

/// Pointwise cokernel with induced structure maps, and the projection.
pub fn cokernel(f: &Morphism) -> (PersModule, Morphism) {
    let tgt = &f.target;
    let field = tgt.field;
    let p = tgt.host.clone();
    let qs: Vec<(Matrix, Matrix)> = f
        .blocks
        .iter()
        .enumerate()
        .map(|(a, b)| quotient_maps(field, tgt.dims[a], &b.columns()))
        .collect();
    let dims: Vec<usize> = qs.iter().map(|(q, _)| q.rows()).collect();
    let maps = p
        .hasse()
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| qs[b].0.mul(&tgt.maps[e]).mul(&qs[a].1))
        .collect();
    let c = Arc::new(PersModule {
        host: p,
        field,
        dims,
        maps,
    });
    let proj = Morphism {
        source: tgt.clone(),
        target: c.clone(),
        blocks: qs.into_iter().map(|(q, _)| q).collect(),
    };
    ((*c).clone(), proj)
}

/// Biproduct of modules over a common host, with inclusions and projections.
pub struct DirectSum {
    pub module: Arc<PersModule>,
    pub inclusions: Vec<Morphism>,
    pub projections: Vec<Morphism>,
}

pub fn direct_sum(host: &Arc<Poset>, field: Field, parts: &[Arc<PersModule>]) -> Result<DirectSum> {
    for m in parts {
        if m.host != *host {
            return Err(Error::HostMismatch);
        }
        if m.field != field {
            return Err(Error::FieldMismatch(m.field.characteristic(), field.characteristic()));
        }
    }
    let n = host.len();
    let dims: Vec<usize> = (0..n).map(|a| parts.iter().map(|m| m.dims[a]).sum()).collect();
    let maps = (0..host.hasse().len())
        .map(|e| {
            let blocks: Vec<Matrix> = parts.iter().map(|m| m.maps[e].clone()).collect();
            Matrix::block_diag(field, &blocks)
        })
        .collect();
    let sum = Arc::new(PersModule {
        host: host.clone(),
        field,
        dims: dims.clone(),
        maps,
    });
    let mut inclusions = Vec::with_capacity(parts.len());
    let mut projections = Vec::with_capacity(parts.len());
    let mut offsets = vec![0usize; n];
    for m in parts {
        let mut inc = Vec::with_capacity(n);
        let mut proj = Vec::with_capacity(n);
        for a in 0..n {
            let mut i = Matrix::zeros(field, dims[a], m.dims[a]);
            let mut p = Matrix::zeros(field, m.dims[a], dims[a]);
            for k in 0..m.dims[a] {
                i.set(offsets[a] + k, k, 1);
                p.set(k, offsets[a] + k, 1);
            }
            offsets[a] += m.dims[a];
            inc.push(i);
            proj.push(p);
        }
        inclusions.push(Morphism {
            source: m.clone(),
            target: sum.clone(),
            blocks: inc,
        });
        projections.push(Morphism {
            source: sum.clone(),
            target: m.clone(),
            blocks: proj,
        });
    }
    Ok(DirectSum {
        module: sum,
        inclusions,
        projections,
    })
}

/// Restriction to a full subposet. A covering pair of the subposet that is not
/// covering in the host gets the host composite.
pub fn restrict(m: &PersModule, emb: &SubposetEmbedding) -> PersModule {
    let sub = Arc::new(emb.sub.clone());
    let dims: Vec<usize> = emb.map.iter().map(|&a| m.dims[a]).collect();
    let mut cache: Vec<Option<Vec<Option<Matrix>>>> = vec![None; m.host.len()];
    let maps = sub
        .hasse()
        .iter()
        .map(|&(i, j)| {
            let (a, b) = (emb.map[i], emb.map[j]);
            if let Some(direct) = m.map(a, b) {
                return direct.clone();
            }
            let comps = cache[a].get_or_insert_with(|| m.composites_from(a));
            comps[b].clone().expect("a < b in the host")
        })
        .collect();
    PersModule {
        host: sub,
        field: m.field,
        dims,
        maps,
    }
}

/// Restriction of a morphism to a full subposet.
pub fn restrict_morphism(f: &Morphism, emb: &SubposetEmbedding) -> Morphism {
    let s = Arc::new(restrict(&f.source, emb));
    let t = Arc::new(restrict(&f.target, emb));
    let blocks = emb.map.iter().map(|&a| f.blocks[a].clone()).collect();
    Morphism {
        source: s,
        target: t,
        blocks,
    }
}

/// Extension by zero from a convex full subposet back to the host.
pub fn extend_by_zero(m: &PersModule, emb: &SubposetEmbedding, host: &Arc<Poset>) -> Result<PersModule> {
    if !host.is_convex(&emb.map) {
        return Err(Error::Internal("extension by zero needs a convex subposet".into()));
    }
    let mut dims = vec![0; host.len()];
    for (i, &a) in emb.map.iter().enumerate() {
        dims[a] = m.dims[i];
    }
    let maps = host
        .hasse()
        .iter()
        .map(|&(a, b)| match (emb.pull_back(a), emb.pull_back(b)) {
            // convexity makes a host covering pair inside the image a covering pair of the sub
            (Some(i), Some(j)) => m.map(i, j).expect("covering pair in convex subposet").clone(),
            _ => Matrix::zeros(m.field, dims[b], dims[a]),
        })
        .collect();
    Ok(PersModule {
        host: host.clone(),
        field: m.field,
        dims,
        maps,
    })
}

/// Extension by zero of a morphism between modules over a convex full subposet.
pub fn extend_morphism_by_zero(
    f: &Morphism,
    emb: &SubposetEmbedding,
    source: Arc<PersModule>,
    target: Arc<PersModule>,
) -> Result<Morphism> {
    let n = source.host.len();
    let blocks = (0..n)
        .map(|a| match emb.pull_back(a) {
            Some(i) => f.blocks[i].clone(),
            None => Matrix::zeros(source.field, target.dims[a], source.dims[a]),
        })
        .collect();
    Morphism::new_unchecked(source, target, blocks)
}

/// The interval of the host spanned by an interval of a full subposet:
/// its convex hull in the host.
pub fn theta_interval(emb: &SubposetEmbedding, host: &Poset, interval: &Interval) -> Result<Interval> {
    let image = emb.push_forward(interval.members());
    Interval::new(host, &host.convex_hull(&image))
}

/// A finite multiset of intervals, listed in canonical interval order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalMultiset {
    pub pairs: Vec<(Interval, usize)>,
}

impl IntervalMultiset {
    pub fn new(mut pairs: Vec<(Interval, usize)>) -> IntervalMultiset {
        pairs.retain(|(_, m)| *m > 0);
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Interval, usize)> = Vec::with_capacity(pairs.len());
        for (iv, m) in pairs {
            match merged.last_mut() {
                Some((last, count)) if *last == iv => *count += m,
                _ => merged.push((iv, m)),
            }
        }
        IntervalMultiset { pairs: merged }
    }

    pub fn empty() -> IntervalMultiset {
        IntervalMultiset { pairs: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Number of summands counted with multiplicity.
    pub fn count(&self) -> usize {
        self.pairs.iter().map(|(_, m)| m).sum()
    }

    pub fn multiplicity(&self, iv: &Interval) -> usize {
        self.pairs
            .iter()
            .find(|(i, _)| i == iv)
            .map_or(0, |(_, m)| *m)
    }

    /// Copies in order, each interval repeated by its multiplicity.
    pub fn copies(&self) -> Vec<Interval> {
        self.pairs
            .iter()
            .flat_map(|(iv, m)| std::iter::repeat_n(iv.clone(), *m))
            .collect()
    }

    /// Pointwise dimension vector of the direct sum.
    pub fn dims(&self, n: usize) -> Vec<usize> {
        let mut d = vec![0; n];
        for (iv, m) in &self.pairs {
            for &a in iv.members() {
                d[a] += m;
            }
        }
        d
    }

    /// Maps every interval through `f` (e.g. from a subposet into a host).
    pub fn map_intervals(&self, f: impl Fn(&Interval) -> Interval) -> IntervalMultiset {
        IntervalMultiset::new(self.pairs.iter().map(|(iv, m)| (f(iv), *m)).collect())
    }

    pub fn describe(&self, host: &Poset) -> String {
        let parts: Vec<String> = self
            .pairs
            .iter()
            .map(|(iv, m)| {
                let s = host.format_set(iv.members());
                if *m == 1 {
                    s
                } else {
                    format!("{s}^{m}")
                }
            })
            .collect();
        parts.join(" ⊕ ")
    }

    /// The direct sum module with its summand inclusions.
    pub fn realize(&self, host: &Arc<Poset>, field: Field) -> Result<DirectSum> {
        let parts: Vec<Arc<PersModule>> = self
            .copies()
            .iter()
            .map(|iv| Arc::new(interval_module(host, field, iv)))
            .collect();
        direct_sum(host, field, &parts)
    }
}

/// Outcome of a module isomorphism search.
#[derive(Clone, Debug)]
pub enum IsoResult {
    Isomorphic(Morphism),
    NotIsomorphic,
    /// The hom space was too large for exhaustive search and random sampling found nothing.
    Inconclusive,
}

impl IsoResult {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoResult::Isomorphic(_))
    }
}

/// Largest hom dimension searched exhaustively by [`find_isomorphism`].
pub const EXHAUSTIVE_ISO_DIM: usize = 6;

/// Searches `Hom(M, N)` for a morphism with every block invertible.
///
/// Exhaustive over all coefficient tuples when the hom space has dimension at
/// most [`EXHAUSTIVE_ISO_DIM`]; otherwise tries `samples` random combinations
/// and reports `Inconclusive` on failure.
pub fn find_isomorphism<R: Rng>(
    m: &Arc<PersModule>,
    n: &Arc<PersModule>,
    rng: &mut R,
    samples: usize,
) -> Result<IsoResult> {
    if m.host != n.host {
        return Err(Error::HostMismatch);
    }
    if m.dims != n.dims {
        return Ok(IsoResult::NotIsomorphic);
    }
    let field = m.field;
    let (layout, basis) = hom_vectors(m, n);
    if layout.total == 0 {
        // both zero
        return Ok(IsoResult::Isomorphic(Morphism::zero(m.clone(), n.clone())?));
    }
    let d = basis.len();
    let p = field.characteristic() as u64;
    let combine = |coeffs: &[FieldElem]| -> Vec<FieldElem> {
        let mut v = vec![0; layout.total];
        for (c, b) in coeffs.iter().zip(&basis) {
            if *c != 0 {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = field.add(*x, field.mul(*c, y));
                }
            }
        }
        v
    };
    let try_coeffs = |coeffs: &[FieldElem]| -> Option<Morphism> {
        let blocks = layout.unflatten(field, &combine(coeffs));
        if blocks.iter().all(Matrix::is_invertible) {
            Some(Morphism {
                source: m.clone(),
                target: n.clone(),
                blocks,
            })
        } else {
            None
        }
    };
    if d <= EXHAUSTIVE_ISO_DIM && p.checked_pow(d as u32).is_some_and(|t| t <= 1 << 20) {
        let total = p.pow(d as u32);
        let mut coeffs = vec![0; d];
        for mut code in 0..total {
            for c in coeffs.iter_mut() {
                *c = (code % p) as FieldElem;
                code /= p;
            }
            if let Some(iso) = try_coeffs(&coeffs) {
                return Ok(IsoResult::Isomorphic(iso));
            }
        }
        return Ok(IsoResult::NotIsomorphic);
    }
    for _ in 0..samples {
        let coeffs: Vec<FieldElem> = (0..d).map(|_| rng.gen_range(0..field.characteristic())).collect();
        if let Some(iso) = try_coeffs(&coeffs) {
            return Ok(IsoResult::Isomorphic(iso));
        }
    }
    Ok(IsoResult::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain(n: usize) -> Arc<Poset> {
        Arc::new(Family::equioriented_a(n).build().unwrap())
    }

    fn iv(p: &Poset, labels: &[&str]) -> Interval {
        Interval::from_labels(p, labels).unwrap()
    }

    fn d4_module() -> PersModule {
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
        PersModule::new(p, f, dims, maps).unwrap()
    }

    #[test]
    fn interval_modules() {
        let p = chain(3);
        let f = Field::GF2;
        let s = interval_module(&p, f, &iv(&p, &["2"]));
        assert_eq!(s.dims(), &[0, 1, 0]);
        let full = interval_module(&p, f, &iv(&p, &["1", "2", "3"]));
        assert_eq!(full.dims(), &[1, 1, 1]);
        assert!(full.maps().iter().all(|m| *m == Matrix::identity(f, 1)));
        assert!(full.validate().is_ok());
        assert!(interval_module_checked(&p, f, &[0, 2]).is_err());
    }

    #[test]
    fn full_interval_on_c11_is_projective_and_injective() {
        let p = Arc::new(Family::C { m: 1, l: 1 }.build().unwrap());
        let all: Vec<usize> = (0..4).collect();
        let k = interval_module_checked(&p, Field::GF2, &all).unwrap();
        // projective at the minimum and injective at the maximum
        let bottom = p.index_of("0").unwrap();
        let top = p.index_of("1").unwrap();
        assert_eq!(k.support(), p.up_set(bottom));
        assert_eq!(k.support(), p.down_set(top));
    }

    #[test]
    fn validate_reports_the_square() {
        let p = Arc::new(Family::Grid { rows: 2, cols: 2 }.build().unwrap());
        let f = Field::GF2;
        let maps: Vec<Matrix> = p
            .hasse()
            .iter()
            .map(|&(a, b)| {
                if p.label(a) == "1_0" && p.label(b) == "1_1" {
                    Matrix::zeros(f, 1, 1)
                } else {
                    Matrix::identity(f, 1)
                }
            })
            .collect();
        let err = PersModule::new(p.clone(), f, vec![1; 4], maps).unwrap_err();
        match err {
            Error::NonCommutative(v) => {
                assert_eq!(v.from, "0_0");
                assert_eq!(v.to, "1_1");
                assert_eq!(v.path_a.len(), 3);
                assert_eq!(v.path_b.len(), 3);
                assert_ne!(v.path_a, v.path_b);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn direct_sum_dims_and_biproduct() {
        let p = chain(2);
        let f = Field::GF2;
        let a = Arc::new(interval_module(&p, f, &iv(&p, &["1"])));
        let b = Arc::new(interval_module(&p, f, &iv(&p, &["1", "2"])));
        let s = direct_sum(&p, f, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(s.module.dims(), &[2, 1]);
        assert!(s.module.validate().is_ok());
        for (i, inc) in s.inclusions.iter().enumerate() {
            for (j, proj) in s.projections.iter().enumerate() {
                let c = proj.compose_after(inc).unwrap();
                if i == j {
                    assert!(c.is_isomorphism());
                } else {
                    assert!(c.is_zero());
                }
            }
        }
        let single = direct_sum(&p, f, std::slice::from_ref(&a)).unwrap();
        assert_eq!(*single.module, *a);
        let z = Arc::new(PersModule::zero(p.clone(), f));
        assert!(direct_sum(&p, f, &[z.clone(), z]).unwrap().module.is_zero());
    }

    #[test]
    fn hom_between_chain_intervals() {
        let p = chain(3);
        let f = Field::GF2;
        let a = Arc::new(interval_module(&p, f, &iv(&p, &["1", "2"])));
        let b = Arc::new(interval_module(&p, f, &iv(&p, &["2", "3"])));
        assert_eq!(hom_basis(&a, &b).unwrap().len(), 0);
        assert_eq!(hom_basis(&b, &a).unwrap().len(), 1);
        for m in p.enumerate_intervals() {
            let k = Arc::new(interval_module(&p, f, &m));
            assert_eq!(hom_basis(&k, &k).unwrap().len(), 1);
        }
    }

    #[test]
    fn kernel_and_cokernel_of_trivial_maps() {
        let p = chain(2);
        let f = Field::new(3).unwrap();
        let m = Arc::new(interval_module(&p, f, &iv(&p, &["1", "2"])));
        let id = Morphism::identity(m.clone());
        assert!(kernel(&id).0.is_zero());
        assert!(cokernel(&id).0.is_zero());
        let z = Morphism::zero(m.clone(), m.clone()).unwrap();
        assert_eq!(kernel(&z).0.dims(), m.dims());
        assert_eq!(cokernel(&z).0.dims(), m.dims());
    }

    #[test]
    fn cokernel_of_inclusion_on_chain() {
        let p = chain(2);
        let f = Field::GF2;
        let s = Arc::new(interval_module(&p, f, &iv(&p, &["2"])));
        let full = Arc::new(interval_module(&p, f, &iv(&p, &["1", "2"])));
        let basis = hom_basis(&s, &full).unwrap();
        assert_eq!(basis.len(), 1);
        let (c, proj) = cokernel(&basis[0]);
        assert_eq!(c.dims(), &[1, 0]);
        assert!(proj.compose_after(&basis[0]).unwrap().is_zero());
        let k1 = Arc::new(interval_module(&p, f, &iv(&p, &["1"])));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(find_isomorphism(&Arc::new(c), &k1, &mut rng, 10).unwrap().is_isomorphic());
    }

    #[test]
    fn support_examples() {
        let p = chain(3);
        let f = Field::GF2;
        let i = iv(&p, &["2", "3"]);
        assert_eq!(interval_module(&p, f, &i).support(), i.members());
        assert!(PersModule::zero(p, f).support().is_empty());
        assert_eq!(d4_module().support(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn restriction_composes_through_removed_elements() {
        let p = chain(3);
        let f = Field::GF2;
        let full = interval_module(&p, f, &iv(&p, &["1", "2", "3"]));
        let emb = p.full_subposet(&[0, 2]);
        let r = restrict(&full, &emb);
        assert_eq!(r.dims(), &[1, 1]);
        assert_eq!(r.maps(), &[Matrix::identity(f, 1)]);
        let id = p.full_subposet(&[0, 1, 2]);
        assert_eq!(restrict(&full, &id), full);
    }

    #[test]
    fn theta_examples() {
        let diamond = Arc::new(Family::Grid { rows: 2, cols: 2 }.build().unwrap());
        let emb = diamond.full_subposet(&[0, 3]);
        let whole = Interval::new(&emb.sub, &[0, 1]).unwrap();
        assert_eq!(
            theta_interval(&emb, &diamond, &whole).unwrap().members(),
            &[0, 1, 2, 3]
        );
        // 2, 4 < 3 < 1 with 3 removed
        let p = Poset::from_relations(
            &["1", "2", "3", "4"],
            &[("3", "1"), ("2", "3"), ("4", "3")],
        )
        .unwrap();
        let emb = p.full_subposet_by_labels(&["1", "2", "4"]).unwrap();
        let i = Interval::new(&emb.sub, &[0, 1, 2]).unwrap();
        assert_eq!(theta_interval(&emb, &p, &i).unwrap().members(), &[0, 1, 2, 3]);
    }

    #[test]
    fn isomorphism_search() {
        let m = Arc::new(d4_module());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shaken = Arc::new(m.random_change_basis(&mut rng));
        assert!(find_isomorphism(&m, &shaken, &mut rng, 10).unwrap().is_isomorphic());
        let p = m.host().clone();
        let all = Arc::new(interval_module(&p, Field::GF2, &Interval::new(&p, &[0, 1, 2, 3]).unwrap()));
        assert!(!find_isomorphism(&m, &all, &mut rng, 10).unwrap().is_isomorphic());
    }
}
