mod common;

use artin_flow::algebra::{FieldSpec, Poly, RationalFunction};
use artin_flow::coding::{code_decorated, reconstruct_from_beta, Window};
use artin_flow::measure::{random_beta_seq, sample_gamma, sample_m, RngStream};
use artin_flow::moebius::{AffineMap, Homography};
use artin_flow::tree::{geometry_csv, sojourn_lengths, validate_geodesic, vertex_distance, TreeVertex};
use common::{field, poly_below, poly_deg_in, smith_distance};
use proptest::prelude::*;

fn pick_field(i: usize) -> FieldSpec {
    field([2, 3, 4, 5][i % 4])
}

fn random_matrix(k: &FieldSpec, rng: &mut RngStream, bound: usize) -> Homography {
    loop {
        let e: Vec<Poly> = (0..4).map(|_| poly_below(k, rng, bound)).collect();
        if let Ok(h) = Homography::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()) {
            return h;
        }
    }
}

fn as_rational(h: &Homography) -> [[RationalFunction; 2]; 2] {
    let [a, b, c, d] = h.entries().map(|p| RationalFunction::from_poly(p.clone()));
    [[a, b], [c, d]]
}

/// A polynomial matrix `P` with `P / X^m` in GL(2, O): entries of degree at
/// most `m` and `deg det P = 2m`.
fn integral_unit(k: &FieldSpec, rng: &mut RngStream, m: usize) -> Homography {
    loop {
        let h = random_matrix(k, rng, m + 1);
        if h.entries().iter().all(|e| e.deg().is_none_or(|d| d <= m))
            && h.det().deg() == Some(2 * m)
        {
            return h;
        }
    }
}

#[test]
fn distance_examples() {
    let k = field(3);
    let o = TreeVertex::base(&k);
    assert_eq!(vertex_distance(&o, &o), 0);
    let diag = Homography::new(Poly::x(&k), Poly::zero(&k), Poly::zero(&k), Poly::one(&k)).unwrap();
    assert_eq!(vertex_distance(&o, &TreeVertex(diag)), 1);
    let mut rng = RngStream::new(1, 0);
    for deg in 1..=3 {
        for _ in 0..20 {
            let a = poly_deg_in(&k, &mut rng, deg, deg + 1);
            let t = Homography::translation(&a);
            assert_eq!(vertex_distance(&o, &TreeVertex(t.clone())), 2 * deg as i64);
            assert_eq!(smith_distance(as_rational(&t)), 2 * deg as i64);
        }
    }
}

#[test]
fn distance_matches_smith_oracle() {
    for q in [2, 3, 5] {
        let k = field(q);
        let mut rng = RngStream::new(2, q as u64);
        for _ in 0..1000 {
            let bound = 1 + rng.below(6) as usize;
            let h = random_matrix(&k, &mut rng, bound);
            let d = vertex_distance(&TreeVertex::base(&k), &TreeVertex(h.clone()));
            assert_eq!(d, smith_distance(as_rational(&h)), "q={q} h={h}");
            assert!(d >= 0);
        }
    }
}

#[test]
fn sojourn_examples() {
    let k = field(3);
    for (a, len) in [(vec![0, 1], 2), (vec![1, 0, 1], 4)] {
        let b = AffineMap::new(k.from_int(2), Poly::from_ints(&k, &a)).unwrap();
        let g = reconstruct_from_beta(&Window::new(1, vec![b]).unwrap()).unwrap();
        assert_eq!(sojourn_lengths(&g).unwrap().items(), &[len]);
        // a single step is vacuously aligned
        assert!(validate_geodesic(&g).aligned());
        assert_eq!(validate_geodesic(&g).checked, 0);
    }
}

#[test]
fn coded_trajectories_telescope() {
    for q in [2, 3] {
        let k = field(q);
        let mut rng = RngStream::new(3, q as u64);
        for _ in 0..100 {
            let s = sample_m(&k, &mut rng, 256);
            let c = code_decorated(&s, 5, 5).unwrap();
            assert!(validate_geodesic(&c.gammas).aligned());
            let lengths = sojourn_lengths(&c.gammas).unwrap();
            for (n, d) in lengths.iter() {
                assert_eq!(*d, 2 * c.quotients.get(n).unwrap().degree() as i64);
            }
            let first = TreeVertex(c.gammas.items().first().unwrap().clone());
            let last = TreeVertex(c.gammas.items().last().unwrap().clone());
            assert_eq!(vertex_distance(&first, &last), lengths.items().iter().sum::<i64>());
            let csv = geometry_csv(&lengths);
            let total: i64 = csv.lines().last().unwrap().rsplit(',').next().unwrap().parse().unwrap();
            assert_eq!(total, vertex_distance(&first, &last));
        }
    }
}

#[test]
fn random_codings_of_length_ten_are_aligned() {
    let k = field(2);
    let mut rng = RngStream::new(4, 0);
    for _ in 0..200 {
        let seq = random_beta_seq(&k, &mut rng, 1, 10);
        let g = reconstruct_from_beta(&seq).unwrap();
        let report = validate_geodesic(&g);
        assert!(report.aligned(), "{report:?}");
        assert_eq!(report.checked, 9);
        sojourn_lengths(&g).unwrap();
    }
}

#[test]
fn backtracking_is_detected() {
    // gamma_1 = t_X, gamma_2 = id: the path returns to its start
    let k = field(2);
    let id = Homography::identity(&k);
    let t = Homography::translation(&Poly::x(&k));
    let w = Window::new(0, vec![id.clone(), t, id]).unwrap();
    assert_eq!(validate_geodesic(&w).first_violation, Some(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn metric_axioms(seed in any::<u64>(), fi in 0usize..4) {
        let k = pick_field(fi);
        let mut rng = RngStream::new(seed, 1);
        let v: Vec<TreeVertex> = (0..3).map(|_| TreeVertex(random_matrix(&k, &mut rng, 4))).collect();
        let d = |i: usize, j: usize| vertex_distance(&v[i], &v[j]);
        prop_assert_eq!(d(0, 0), 0);
        prop_assert_eq!(d(0, 1), d(1, 0));
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2));
        // the tree is bipartite: parity of d is fixed by the determinant degrees
        let par = |h: &TreeVertex| h.0.det().deg().unwrap() as i64;
        prop_assert_eq!((d(0, 1) - par(&v[0]) - par(&v[1])).rem_euclid(2), 0);
    }

    #[test]
    fn right_integral_invariance(seed in any::<u64>(), fi in 0usize..4, m in 0usize..3) {
        let k = pick_field(fi);
        let mut rng = RngStream::new(seed, 2);
        let v = random_matrix(&k, &mut rng, 4);
        let w = random_matrix(&k, &mut rng, 4);
        let u = integral_unit(&k, &mut rng, m);
        let d = vertex_distance(&TreeVertex(v.clone()), &TreeVertex(w.clone()));
        prop_assert_eq!(vertex_distance(&TreeVertex(v.compose(&u)), &TreeVertex(w.clone())), d);
        prop_assert_eq!(vertex_distance(&TreeVertex(v.clone()), &TreeVertex(w.compose(&u))), d);
        prop_assert_eq!(TreeVertex(v.compose(&u)), TreeVertex(v));
    }

    #[test]
    fn gamma_acts_by_isometries(seed in any::<u64>(), fi in 0usize..4) {
        let k = pick_field(fi);
        let mut rng = RngStream::new(seed, 3);
        let v = TreeVertex(random_matrix(&k, &mut rng, 4));
        let w = TreeVertex(random_matrix(&k, &mut rng, 4));
        let g = sample_gamma(&k, &mut rng, 10);
        prop_assert_eq!(vertex_distance(&v.translate(&g), &w.translate(&g)), vertex_distance(&v, &w));
    }

    #[test]
    fn smith_oracle_on_products(seed in any::<u64>(), fi in 0usize..4) {
        let k = pick_field(fi);
        let mut rng = RngStream::new(seed, 4);
        let h = sample_gamma(&k, &mut rng, 8).compose(&random_matrix(&k, &mut rng, 3));
        prop_assert_eq!(
            vertex_distance(&TreeVertex::base(&k), &TreeVertex(h.clone())),
            smith_distance(as_rational(&h))
        );
    }
}
