use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use powerfpp::acceptance::{convolution_excess, multiplicativity_excess, random_small_graph};
use powerfpp::criterion::CriterionProblem;
use powerfpp::fpp::{first_passage_time, WeightModel};
use powerfpp::graph::{complete, cycle, integer_line, product_label, Direction};
use powerfpp::walk::ConditionedSampler;
use powerfpp::{cartesian_product, m_eval, m_matrix, BaseGraph, Execution, GraphSpec};

fn graph(seed: u64) -> BaseGraph {
    random_small_graph(&mut ChaCha8Rng::seed_from_u64(seed), 6)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn convolution_holds(seed in any::<u64>(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let g = graph(seed);
        prop_assert!(convolution_excess(g.as_finite().unwrap(), s, t).unwrap() <= 1e-9);
    }

    #[test]
    fn multiplicativity_holds(a in any::<u64>(), b in any::<u64>(), t in 0.0f64..2.0) {
        prop_assert!(multiplicativity_excess(&graph(a), &graph(b), t).unwrap() <= 1e-9);
    }

    #[test]
    fn product_is_associative_up_to_relabelling(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), t in 0.0f64..1.0) {
        let (g, h, k) = (random_small_graph(&mut ChaCha8Rng::seed_from_u64(a), 3),
                         random_small_graph(&mut ChaCha8Rng::seed_from_u64(b), 3),
                         random_small_graph(&mut ChaCha8Rng::seed_from_u64(c), 3));
        let left = cartesian_product(&cartesian_product(&g, &h).unwrap(), &k).unwrap();
        let right = cartesian_product(&g, &cartesian_product(&h, &k).unwrap()).unwrap();
        let (fl, fr) = (left.as_finite().unwrap(), right.as_finite().unwrap());
        prop_assert_eq!(fl.len(), fr.len());
        prop_assert_eq!(fl.edges().len(), fr.edges().len());
        let (ml, mr) = (m_matrix(fl, t, 1e-13, Execution::Sequential).unwrap(), m_matrix(fr, t, 1e-13, Execution::Sequential).unwrap());
        let (gf, hf, kf) = (g.as_finite().unwrap(), h.as_finite().unwrap(), k.as_finite().unwrap());
        let lab_l = |x: usize, y: usize, z: usize| product_label(&product_label(gf.id(x), hf.id(y)), kf.id(z));
        let lab_r = |x: usize, y: usize, z: usize| product_label(gf.id(x), &product_label(hf.id(y), kf.id(z)));
        let triples: Vec<_> = (0..gf.len())
            .flat_map(|x| (0..hf.len()).flat_map(move |y| (0..kf.len()).map(move |z| (x, y, z))))
            .collect();
        let o = triples[0];
        for &p in &triples {
            let (i, j) = (fl.require(&lab_l(o.0, o.1, o.2)).unwrap(), fl.require(&lab_l(p.0, p.1, p.2)).unwrap());
            let (i2, j2) = (fr.require(&lab_r(o.0, o.1, o.2)).unwrap(), fr.require(&lab_r(p.0, p.1, p.2)).unwrap());
            prop_assert!((ml.value(i, j) - mr.value(i2, j2)).abs() <= ml.err(i, j) + mr.err(i2, j2) + 1e-12);
        }
    }

    #[test]
    fn balls_grow(center in -20i64..20, r in 0usize..12) {
        let z = integer_line();
        let small = z.directed_ball(&center.into(), r, Direction::Out).unwrap();
        let big = z.directed_ball(&center.into(), r + 1, Direction::Out).unwrap();
        prop_assert!(small.is_subset(&big));
        prop_assert_eq!(small.len(), 2 * r + 1);
        let c = cycle(7);
        let a = c.directed_ball(&0.into(), r, Direction::In).unwrap();
        let b = c.directed_ball(&0.into(), r + 1, Direction::In).unwrap();
        prop_assert!(a.is_subset(&b));
    }

    #[test]
    fn spec_round_trip_is_idempotent(seed in any::<u64>()) {
        let g = graph(seed);
        let first = GraphSpec::describe(&g).unwrap();
        let rebuilt = GraphSpec::from_json(&first.to_json()).unwrap().build().unwrap();
        let second = GraphSpec::describe(&rebuilt).unwrap();
        prop_assert_eq!(first.to_json(), second.to_json());
    }

    #[test]
    fn m_is_nonnegative_and_increasing_on_undirected_diagonal(seed in any::<u64>(), t in 0.0f64..1.5) {
        let g = graph(seed);
        let f = g.as_finite().unwrap();
        let (a, b) = (m_matrix(f, t, 1e-13, Execution::Sequential).unwrap(), m_matrix(f, t + 0.1, 1e-13, Execution::Sequential).unwrap());
        for x in 0..f.len() {
            for y in 0..f.len() {
                prop_assert!(a.value(x, y) >= 0.0);
                prop_assert!(b.value(x, y) + b.err(x, y) >= a.value(x, y) - a.err(x, y));
            }
        }
    }

    #[test]
    fn length_law_sums_to_one(seed in any::<u64>()) {
        let g = graph(seed);
        let f = g.as_finite().unwrap();
        let reach = f.reachability();
        if let Some(w) = (1..f.len()).find(|&w| reach[0][w]) {
            let (v, w) = (f.id(0).clone(), f.id(w).clone());
            let t = powerfpp::critical::critical_time(&g, &v, &w, 1e-10).unwrap().t_star;
            let s = ConditionedSampler::new(&g, &v, &w, t).unwrap();
            let total: f64 = s.law().probs.iter().sum::<f64>() + s.law().tail_mass;
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(s.law().tail_mass < 1e-9);
        }
    }

    #[test]
    fn f_vanishes_on_the_boundary(seed in any::<u64>(), x in 0.0f64..1.0) {
        let g = graph(seed);
        let f = g.as_finite().unwrap();
        let reach = f.reachability();
        if let Some(w) = (1..f.len()).find(|&w| reach[0][w]) {
            let p = CriterionProblem::with_critical_time(&g, f.id(0), f.id(w), 1e-13, 1e-13).unwrap();
            let at = p.f(x * p.t_star, 0.0).unwrap();
            prop_assert!(at.value.abs() <= at.abs_err);
        }
    }

    #[test]
    fn coupling_is_monotone(seed in any::<u64>(), n in 1usize..7) {
        // 1 − e^{−t} ≤ t, so uniform(0,1) weights never exceed Exp(1) weights
        let k2 = complete(2);
        let e = first_passage_time(&k2, n, &0.into(), &1.into(), &WeightModel::exponential(1.0).unwrap(), seed).unwrap();
        let u = first_passage_time(&k2, n, &0.into(), &1.into(), &WeightModel::uniform(0.0, 1.0).unwrap(), seed).unwrap();
        prop_assert!(u.time <= e.time);
        prop_assert!(e.geodesic_length >= n && u.geodesic_length >= n);
    }

    #[test]
    fn passage_time_is_deterministic(seed in any::<u64>(), n in 1usize..6) {
        let g = cycle(4);
        let m = WeightModel::uniform(0.5, 2.0).unwrap();
        let a = first_passage_time(&g, n, &0.into(), &2.into(), &m, seed).unwrap();
        let b = first_passage_time(&g, n, &0.into(), &2.into(), &m, seed).unwrap();
        prop_assert_eq!(a.time.to_bits(), b.time.to_bits());
        prop_assert!(a.geodesic_length >= 2 * n);
    }
}

#[test]
fn multiplicativity_on_k2_power() {
    let k2 = complete(2);
    let sq = cartesian_product(&k2, &k2).unwrap();
    let t = 0.7;
    let m = m_eval(&sq, &product_label(&0.into(), &0.into()), &product_label(&1.into(), &1.into()), t, 1e-13).unwrap();
    assert!((m.value - t.sinh().powi(2)).abs() < 1e-12);
}
