use powerfpp::fpp::{run_ensemble, EnsembleConfig, WeightModel};
use powerfpp::graph::{complete, cycle};
use powerfpp::m_eval;

#[test]
fn empirical_cdf_respects_the_m_power_bound() {
    for (g, w, n) in [(complete(2), 1i64, 4usize), (cycle(4), 2, 3)] {
        let cfg = EnsembleConfig::new(vec![n], 0.into(), w.into(), WeightModel::exponential(1.0).unwrap(), 1000, 31);
        let s = run_ensemble(&g, &cfg).unwrap().remove(0);
        for k in 1..=20 {
            let t = 0.1 * k as f64;
            let bound = m_eval(&g, &0.into(), &w.into(), t, 1e-13).unwrap().hi().powi(n as i32).min(1.0);
            let sigma = (bound * (1.0 - bound) / 1000.0).sqrt();
            assert!(s.cdf_at(t) <= bound + 3.0 * sigma, "n={n} t={t}: {} > {bound}", s.cdf_at(t));
        }
    }
}

#[test]
fn summaries_are_ordered() {
    let cfg = EnsembleConfig::new(vec![3, 5], 0.into(), 2.into(), WeightModel::uniform(0.0, 2.0).unwrap(), 50, 32);
    for s in run_ensemble(&cycle(4), &cfg).unwrap() {
        assert!(s.mean >= 0.0);
        assert!(s.quantiles.windows(2).all(|q| q[0].value <= q[1].value));
        assert!(s.cdf_points.windows(2).all(|c| c[0].1 <= c[1].1));
        assert!(s.geodesic_lengths.min >= 2 * s.n);
        assert_eq!(s.rho, 0.5);
    }
}

#[test]
fn table_weights_match_uniform() {
    let table = WeightModel::table(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
    let uniform = WeightModel::uniform(0.0, 1.0).unwrap();
    let a = EnsembleConfig::new(vec![6], 0.into(), 1.into(), table, 30, 33);
    let b = EnsembleConfig { model: uniform, ..a.clone() };
    let (x, y) = (run_ensemble(&complete(2), &a).unwrap(), run_ensemble(&complete(2), &b).unwrap());
    for (p, q) in x[0].times.iter().zip(&y[0].times) {
        assert!((p - q).abs() < 1e-12);
    }
}
