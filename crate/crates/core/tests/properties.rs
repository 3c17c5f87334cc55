//! Randomized invariants of the linear algebra, module and resolution layers.

use std::sync::Arc;

use intres::approx::{interval_cover, interval_resolution, ResolutionOptions};
use intres::check::{random_module, random_poset};
use intres::homological::{ar_translate, projective, projective_cover, check_projective_cover};
use intres::module::{
    extend_by_zero, hom_basis, hom_dim, image, interval_module, kernel, restrict, theta_interval,
};
use intres::{Field, Matrix, PersModule, Poset};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![Just(2u32), Just(3), Just(5), Just(7)].prop_map(|p| Field::new(p).unwrap())
}

fn matrix(rng: &mut ChaCha8Rng, field: Field, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(field, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, rng.gen_range(0..field.characteristic()));
        }
    }
    m
}

/// A random host and a module on it, both determined by `seed`.
fn sample(seed: u64, field: Field) -> (Arc<Poset>, Arc<PersModule>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(1..=5);
        let p = Arc::new(random_poset(&mut rng, n, 0.5));
        if let Some(m) = random_module(&mut rng, &p, field, 3) {
            return (p, Arc::new(m), rng);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(seed in any::<u64>(), f in field_strategy(), r in 0usize..6, c in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = matrix(&mut rng, f, r, c);
        let kernel = a.kernel_basis();
        prop_assert_eq!(a.rank() + kernel.len(), c);
        prop_assert_eq!(a.rank(), a.transpose().rank());
        for v in &kernel {
            prop_assert!(a.mul_vec(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn inverse_is_two_sided(seed in any::<u64>(), f in field_strategy(), n in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = matrix(&mut rng, f, n, n);
        if let Some(inv) = a.inverse() {
            prop_assert_eq!(a.mul(&inv), Matrix::identity(f, n));
            prop_assert_eq!(inv.mul(&a), Matrix::identity(f, n));
        } else {
            prop_assert!(a.rank() < n);
        }
    }

    #[test]
    fn intervals_match_naive_enumeration(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poset(&mut rng, n, 0.4);
        let mut fast = p.enumerate_intervals();
        let mut slow = p.enumerate_intervals_naive();
        fast.sort();
        slow.sort();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn hom_dim_is_basis_invariant(seed in any::<u64>(), f in field_strategy()) {
        let (p, m, mut rng) = sample(seed, f);
        let Some(n) = random_module(&mut rng, &p, f, 3) else { return Ok(()); };
        let m2 = m.random_change_basis(&mut rng);
        let n2 = n.random_change_basis(&mut rng);
        prop_assert_eq!(hom_dim(&m, &n), hom_dim(&m2, &n2));
        prop_assert_eq!(hom_dim(&n, &m), hom_dim(&n2, &m2));
    }

    #[test]
    fn hom_basis_commutes(seed in any::<u64>(), f in field_strategy()) {
        let (p, m, mut rng) = sample(seed, f);
        let Some(n) = random_module(&mut rng, &p, f, 3) else { return Ok(()); };
        let basis = hom_basis(&m, &Arc::new(n)).unwrap();
        for g in &basis {
            prop_assert!(g.commutes());
        }
    }

    #[test]
    fn kernel_and_image_split_dimensions(seed in any::<u64>(), f in field_strategy()) {
        let (p, m, mut rng) = sample(seed, f);
        let Some(n) = random_module(&mut rng, &p, f, 3) else { return Ok(()); };
        let basis = hom_basis(&m, &Arc::new(n)).unwrap();
        let Some(g) = basis.first() else { return Ok(()); };
        let (k, inc) = kernel(g);
        let (im, _) = image(g);
        prop_assert!(inc.is_injective());
        for a in 0..p.len() {
            prop_assert_eq!(k.dim(a) + im.dim(a), m.dim(a));
        }
    }

    #[test]
    fn cover_contract_holds(seed in any::<u64>(), f in field_strategy()) {
        let (_, m, _) = sample(seed, f);
        let c = interval_cover(&m).unwrap();
        prop_assert_eq!(c.check_contract(), Ok(()));
    }

    #[test]
    fn resolutions_are_exact(seed in any::<u64>(), f in field_strategy()) {
        let (_, m, _) = sample(seed, f);
        let r = interval_resolution(&m, ResolutionOptions::default()).unwrap();
        prop_assert_eq!(r.check_exact(), Ok(()));
        let full = interval_resolution(&m, ResolutionOptions { reduce_support: false, ..Default::default() }).unwrap();
        prop_assert_eq!(&r.terms, &full.terms);
    }

    #[test]
    fn restriction_undoes_extension(seed in any::<u64>(), f in field_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=6);
        let p = Arc::new(random_poset(&mut rng, n, 0.45));
        let pick: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        if pick.is_empty() {
            return Ok(());
        }
        let emb = p.full_subposet(&p.convex_hull(&pick));
        let sub = Arc::new(emb.sub.clone());
        let Some(m) = random_module(&mut rng, &sub, f, 3) else { return Ok(()); };
        let ext = extend_by_zero(&m, &emb, &p).unwrap();
        prop_assert_eq!(restrict(&ext, &emb), m);
        for iv in sub.enumerate_intervals() {
            let big = theta_interval(&emb, &p, &iv).unwrap();
            prop_assert_eq!(big.members().to_vec(), emb.push_forward(iv.members()));
        }
    }

    #[test]
    fn projective_covers_are_valid(seed in any::<u64>(), f in field_strategy()) {
        let (_, m, _) = sample(seed, f);
        let c = projective_cover(&m).unwrap();
        prop_assert_eq!(check_projective_cover(&c), Ok(()));
    }

    #[test]
    fn tau_kills_projectives(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Arc::new(random_poset(&mut rng, n, 0.45));
        for x in 0..n {
            let px = Arc::new(projective(&p, Field::GF2, x));
            prop_assert!(ar_translate(&px).unwrap().is_zero());
        }
    }

    #[test]
    fn interval_modules_cover_themselves(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Arc::new(random_poset(&mut rng, n, 0.45));
        for iv in p.enumerate_intervals() {
            let k = Arc::new(interval_module(&p, Field::GF2, &iv));
            let c = interval_cover(&k).unwrap();
            prop_assert_eq!(c.summands.count(), 1);
            prop_assert_eq!(c.summands.multiplicity(&iv), 1);
        }
    }
}
