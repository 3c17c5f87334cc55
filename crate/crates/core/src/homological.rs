//! Projective homological algebra over the incidence algebra: radicals,
//! projective covers, minimal presentations, the Auslander-Reiten translate
//! `τ = D Tr`, and global dimensions.
//!
//! The indecomposable projective at `x` is the interval module on the up-set
//! of `x`. `Hom(P_x, P_y)` is one-dimensional when `y <= x`, so maps between
//! sums of projectives are scalar matrices indexed by generators.

use std::sync::Arc;

use rayon::prelude::*;

use crate::approx::{interval_resolution, ResolutionOptions};
use crate::error::{Error, Result};
use crate::linalg::{quotient_maps, Field, FieldElem, Matrix};
use crate::module::{cokernel, direct_sum, interval_module, kernel, submodule, Morphism, PersModule};
use crate::poset::{Interval, Poset};

/// `(rad M)_y = Σ Im M(x -> y)` over covering pairs `x -> y`, with its inclusion.
pub fn radical(m: &Arc<PersModule>) -> (PersModule, Morphism) {
    let p = m.host();
    let field = m.field();
    let bases = (0..p.len())
        .map(|y| {
            let mut cols: Vec<Vec<FieldElem>> = Vec::new();
            for &x in p.predecessors(y) {
                cols.extend(m.map(x, y).unwrap().columns());
            }
            let span = Matrix::from_columns(field, m.dim(y), &cols);
            Matrix::from_columns(field, m.dim(y), &span.column_space_basis())
        })
        .collect();
    submodule(m, bases)
}

/// Pointwise dimensions of `top M = M / rad M`.
pub fn top_dims(m: &Arc<PersModule>) -> Vec<usize> {
    let (rad, _) = radical(m);
    m.dims().iter().zip(rad.dims()).map(|(d, r)| d - r).collect()
}

/// The indecomposable projective `P_x`.
pub fn projective(host: &Arc<Poset>, field: Field, x: usize) -> PersModule {
    let up = host.up_set(x);
    interval_module(host, field, &Interval::new(host, &up).expect("up-sets are intervals"))
}

/// A projective cover `⊕ P_{x_i} -> M`.
#[derive(Clone, Debug)]
pub struct ProjectiveCover {
    /// Generator element of each copy, in source order.
    pub tops: Vec<usize>,
    /// Image of each copy's generator in `M_{x_i}`.
    pub vectors: Vec<Vec<FieldElem>>,
    pub source: Arc<PersModule>,
    pub map: Morphism,
}

impl ProjectiveCover {
    /// Coordinates at `z` of the source: copies with `x_i <= z`, in order.
    pub fn copies_at(&self, z: usize) -> Vec<usize> {
        let p = self.source.host();
        (0..self.tops.len()).filter(|&i| p.leq(self.tops[i], z)).collect()
    }
}

/// Projective cover with one copy of `P_x` per dimension of `(top M)_x`;
/// generators complement the radical greedily.
pub fn projective_cover(m: &Arc<PersModule>) -> Result<ProjectiveCover> {
    let p = m.host().clone();
    let field = m.field();
    let (rad, inc) = radical(m);
    let mut tops = Vec::new();
    let mut vectors = Vec::new();
    for x in 0..p.len() {
        if m.dim(x) == rad.dim(x) {
            continue;
        }
        let (_, section) = quotient_maps(field, m.dim(x), &inc.block(x).columns());
        for v in section.columns() {
            tops.push(x);
            vectors.push(v);
        }
    }
    let parts: Vec<Arc<PersModule>> = tops.iter().map(|&x| Arc::new(projective(&p, field, x))).collect();
    let source = direct_sum(&p, field, &parts)?.module;
    let composites: Vec<Vec<Option<Matrix>>> = (0..p.len())
        .map(|x| if tops.contains(&x) { m.composites_from(x) } else { Vec::new() })
        .collect();
    let blocks = (0..p.len())
        .map(|z| {
            let cols: Vec<Vec<FieldElem>> = tops
                .iter()
                .zip(&vectors)
                .filter(|(&x, _)| p.leq(x, z))
                .map(|(&x, v)| composites[x][z].as_ref().unwrap().mul_vec(v))
                .collect();
            Matrix::from_columns(field, m.dim(z), &cols)
        })
        .collect();
    let map = Morphism::new_unchecked(source.clone(), m.clone(), blocks)?;
    Ok(ProjectiveCover {
        tops,
        vectors,
        source,
        map,
    })
}

/// Checks surjectivity and that the kernel lies in the radical of the source.
pub fn check_projective_cover(c: &ProjectiveCover) -> std::result::Result<(), String> {
    if !c.map.is_surjective() {
        return Err("projective cover is not surjective".into());
    }
    let (_, k) = kernel(&c.map);
    let (_, r) = radical(&c.source);
    for z in 0..c.source.host().len() {
        let rad = r.block(z);
        let joined = rad.hstack(k.block(z));
        if joined.rank() != rad.rank() {
            return Err(format!(
                "kernel leaves the radical at {}",
                c.source.host().label(z)
            ));
        }
    }
    Ok(())
}

/// A minimal projective presentation `P1 -> P0 -> M -> 0`.
#[derive(Clone, Debug)]
pub struct ProjectivePresentation {
    pub target: Arc<PersModule>,
    pub p0: Vec<usize>,
    pub p1: Vec<usize>,
    /// `coefficients.get(j, i)` is the scalar of `P_{y_j} -> P_{x_i}`; zero unless `x_i <= y_j`.
    pub coefficients: Matrix,
    pub cover: ProjectiveCover,
    pub relations: Morphism,
}

pub fn minimal_presentation(m: &Arc<PersModule>) -> Result<ProjectivePresentation> {
    let field = m.field();
    let cover = projective_cover(m)?;
    let (k, inc) = kernel(&cover.map);
    let k = Arc::new(k);
    let kcover = projective_cover(&k)?;
    let mut coefficients = Matrix::zeros(field, kcover.tops.len(), cover.tops.len());
    for (j, (&y, w)) in kcover.tops.iter().zip(&kcover.vectors).enumerate() {
        let coords = inc.block(y).mul_vec(w);
        for (pos, i) in cover.copies_at(y).into_iter().enumerate() {
            coefficients.set(j, i, coords[pos]);
        }
    }
    let inc_arc = Morphism::new_unchecked(k.clone(), cover.source.clone(), inc.blocks().to_vec())?;
    let relations = inc_arc.compose_after(&kcover.map)?;
    Ok(ProjectivePresentation {
        target: m.clone(),
        p0: cover.tops.clone(),
        p1: kcover.tops,
        coefficients,
        cover,
        relations,
    })
}

/// A module over the opposite poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OppositeModule(pub PersModule);

impl OppositeModule {
    /// Vector-space dual `D`, a module over `host` (whose opposite carries `self`).
    pub fn dual(&self, host: &Arc<Poset>) -> PersModule {
        let n = &self.0;
        let field = n.field();
        let maps = host
            .hasse()
            .iter()
            .map(|&(a, b)| n.map(b, a).expect("opposite Hasse edge").transpose())
            .collect();
        PersModule::new_unchecked(host.clone(), field, n.dims().to_vec(), maps)
            .expect("dual has matching shapes")
    }
}

/// `D M` as a module over the opposite poset.
pub fn dual(m: &PersModule) -> OppositeModule {
    let op = Arc::new(m.host().opposite());
    let maps = op
        .hasse()
        .iter()
        .map(|&(a, b)| m.map(b, a).expect("opposite Hasse edge").transpose())
        .collect();
    OppositeModule(
        PersModule::new_unchecked(op, m.field(), m.dims().to_vec(), maps).expect("dual has matching shapes"),
    )
}

/// `Tr M`: cokernel of `Hom(P0, A) -> Hom(P1, A)`, a module over the opposite poset.
pub fn transpose(pres: &ProjectivePresentation) -> Result<OppositeModule> {
    let host = pres.target.host();
    let field = pres.target.field();
    let op = Arc::new(host.opposite());
    // projective of the opposite at x lives on the down-set of x
    let q = |x: usize| -> Arc<PersModule> {
        let down = host.down_set(x);
        Arc::new(interval_module(
            &op,
            field,
            &Interval::new(&op, &down).expect("down-sets are intervals"),
        ))
    };
    let q0 = direct_sum(&op, field, &pres.p0.iter().map(|&x| q(x)).collect::<Vec<_>>())?.module;
    let q1 = direct_sum(&op, field, &pres.p1.iter().map(|&y| q(y)).collect::<Vec<_>>())?.module;
    let blocks = (0..host.len())
        .map(|z| {
            let rows: Vec<usize> = (0..pres.p1.len()).filter(|&j| host.leq(z, pres.p1[j])).collect();
            let cols: Vec<usize> = (0..pres.p0.len()).filter(|&i| host.leq(z, pres.p0[i])).collect();
            let mut b = Matrix::zeros(field, rows.len(), cols.len());
            for (r, &j) in rows.iter().enumerate() {
                for (c, &i) in cols.iter().enumerate() {
                    b.set(r, c, pres.coefficients.get(j, i));
                }
            }
            b
        })
        .collect();
    let f = Morphism::new(q0, q1, blocks)?;
    Ok(OppositeModule(cokernel(&f).0))
}

/// `τ M = D Tr M`; zero on projectives.
pub fn ar_translate(m: &Arc<PersModule>) -> Result<PersModule> {
    let pres = minimal_presentation(m)?;
    if pres.p1.is_empty() {
        return Ok(PersModule::zero(m.host().clone(), m.field()));
    }
    Ok(transpose(&pres)?.dual(m.host()))
}

/// Resolution dimension of `τ(k_I)` for every interval `I`, in canonical order.
pub fn interval_gldim_profile(p: &Arc<Poset>, field: Field) -> Result<Vec<(Interval, usize)>> {
    interval_gldim_profile_with(p, field, ResolutionOptions::default())
}

pub fn interval_gldim_profile_with(
    p: &Arc<Poset>,
    field: Field,
    opts: ResolutionOptions,
) -> Result<Vec<(Interval, usize)>> {
    p.enumerate_intervals()
        .into_par_iter()
        .map(|iv| {
            let k = Arc::new(interval_module(p, field, &iv));
            let t = Arc::new(ar_translate(&k)?);
            let r = interval_resolution(&t, opts)?;
            Ok((iv, r.length()))
        })
        .collect()
}

/// `max_I resdim τ(k_I)`; 0 for the empty poset.
pub fn interval_gldim(p: &Arc<Poset>, field: Field) -> Result<usize> {
    Ok(interval_gldim_profile(p, field)?
        .into_iter()
        .map(|(_, d)| d)
        .max()
        .unwrap_or(0))
}

/// Length of the minimal projective resolution.
pub fn projective_dimension(m: &Arc<PersModule>, step_cap: usize) -> Result<usize> {
    let mut current = m.clone();
    let mut steps = 0;
    while !current.is_zero() {
        if steps > step_cap {
            return Err(Error::StepLimit(step_cap));
        }
        let c = projective_cover(&current)?;
        current = Arc::new(kernel(&c.map).0);
        steps += 1;
    }
    Ok(steps.saturating_sub(1))
}

/// Global dimension of the incidence algebra: the largest projective
/// dimension of a simple module.
pub fn projective_gldim(p: &Arc<Poset>, field: Field) -> Result<usize> {
    (0..p.len())
        .map(|x| {
            let s = Arc::new(interval_module(p, field, &Interval::new(p, &[x])?));
            projective_dimension(&s, p.len() + 1)
        })
        .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
}
