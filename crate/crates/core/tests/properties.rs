mod common;

use common::{all_sequences, models, naive_best, naive_distance, same};
use proptest::prelude::*;
use subtraj::{
    brute_force_all, build_grid, cma_matrices, cma_search, conversion_cost, exact_s, full_distance,
    gbp_close_count, greedy_backtracking, kpf_lower_bound, matching_cost, quality_metrics, read_csv,
    search_database, spring, top_k_search, write_csv, CostModel, Family, KpfMode, MatchingSequence,
    PruneConfig, SearchResult, Trajectory,
};

fn coords(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<(f64, f64)>> {
    let point = prop_oneof![
        (0u8..4, 0u8..4).prop_map(|(x, y)| (x as f64, y as f64)),
        (0.0..3.0f64, 0.0..3.0f64),
    ];
    prop::collection::vec(point, len)
}

fn traj(id: &str, c: &[(f64, f64)]) -> Trajectory {
    Trajectory::from_xy(id, c).unwrap()
}

fn model_at(k: usize) -> CostModel {
    models().swap_remove(k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cma_matches_naive_oracle(k in 0..5usize, q in coords(1..=6), d in coords(1..=12)) {
        let model = model_at(k);
        let (q, d) = (traj("q", &q), traj("d", &d));
        let found = cma_search(&q, &d, &model).unwrap().distance;
        let oracle = naive_best(&q, &d, &model);
        prop_assert!(same(found, oracle, &model), "{}: {found} vs {oracle}", model.name());
    }

    #[test]
    fn baselines_agree(k in 0..5usize, q in coords(1..=6), d in coords(1..=12)) {
        let model = model_at(k);
        let (q, d) = (traj("q", &q), traj("d", &d));
        let cma = cma_search(&q, &d, &model).unwrap().distance;
        prop_assert!(same(cma, exact_s(&q, &d, &model).unwrap().distance, &model));
        match model.family() {
            Family::Warp => prop_assert!(same(cma, spring(&q, &d, &model).unwrap().distance, &model)),
            Family::Frechet => prop_assert!(same(cma, greedy_backtracking(&q, &d, &model).unwrap().distance, &model)),
            Family::Edit => {}
        }
    }

    #[test]
    fn full_distance_matches_naive(k in 0..5usize, q in coords(1..=6), d in coords(1..=8)) {
        let model = model_at(k);
        let got = full_distance(&traj("q", &q), &traj("d", &d), &model).unwrap();
        let want = naive_distance(traj("q", &q).points(), traj("d", &d).points(), &model);
        prop_assert!(same(got, want, &model));
    }

    #[test]
    fn best_over_sequences_is_cma(k in 0..5usize, q in coords(1..=4), d in coords(1..=7)) {
        let model = model_at(k);
        let (q, d) = (traj("q", &q), traj("d", &d));
        let best = all_sequences(q.len(), d.len())
            .into_iter()
            .map(|s| conversion_cost(&q, &d, &MatchingSequence::new(s).unwrap(), &model).unwrap())
            .fold(f64::INFINITY, f64::min);
        let cma = cma_search(&q, &d, &model).unwrap().distance;
        prop_assert!(same(best, cma, &model), "{}: sequences {best}, cma {cma}", model.name());
    }

    #[test]
    fn every_cell_is_a_constrained_optimum(k in 0..5usize, q in coords(1..=4), d in coords(1..=6)) {
        let model = model_at(k);
        let (q, d) = (traj("q", &q), traj("d", &d));
        let (c, _) = cma_matrices(&q, &d, &model).unwrap();
        for i in 1..=q.len() {
            let prefix = traj("p", &q.points()[..i].iter().map(|p| p.xy().unwrap()).collect::<Vec<_>>());
            for j in 1..=d.len() {
                let best = all_sequences(i, d.len())
                    .into_iter()
                    .filter(|s| s[i - 1] == j)
                    .map(|s| conversion_cost(&prefix, &d, &MatchingSequence::new(s).unwrap(), &model).unwrap())
                    .fold(f64::INFINITY, f64::min);
                prop_assert!(same(c.get(i, j), best, &model), "{} C[{i}][{j}] = {} vs {best}", model.name(), c.get(i, j));
            }
        }
    }

    #[test]
    fn any_sequence_costs_at_least_the_optimum(
        k in 0..5usize,
        q in coords(1..=6),
        d in coords(1..=10),
        raw in prop::collection::vec(0usize..100, 6),
    ) {
        let model = model_at(k);
        let (q, d) = (traj("q", &q), traj("d", &d));
        let mut s: Vec<usize> = raw[..q.len()].iter().map(|v| v % d.len() + 1).collect();
        s.sort();
        let s = MatchingSequence::new(s).unwrap();
        let best = cma_search(&q, &d, &model).unwrap().distance;
        let tol = 1e-9 * best.max(1.0);
        prop_assert!(conversion_cost(&q, &d, &s, &model).unwrap() >= best - tol);
        prop_assert!(matching_cost(&q, &d, &s, &model).unwrap() >= best - tol);
    }

    #[test]
    fn longer_data_never_hurts(k in 0..5usize, q in coords(1..=6), d in coords(1..=10), extra in coords(1..=5)) {
        let model = model_at(k);
        let q = traj("q", &q);
        let before = cma_search(&q, &traj("d", &d), &model).unwrap().distance;
        let mut longer = d.clone();
        longer.extend(extra);
        let after = cma_search(&q, &traj("d", &longer), &model).unwrap().distance;
        prop_assert!(after <= before);
    }

    #[test]
    fn frechet_result_is_a_pair_cost(q in coords(1..=6), d in coords(1..=10)) {
        let model = CostModel::frechet(subtraj::point_distance);
        let (q, d) = (traj("q", &q), traj("d", &d));
        let got = cma_search(&q, &d, &model).unwrap().distance;
        let member = got == 0.0
            || q.points().iter().any(|a| d.points().iter().any(|b| model.sub(a, b) == got));
        prop_assert!(member);
    }

    #[test]
    fn symmetric_warp_distances(q in coords(1..=6), d in coords(1..=8)) {
        let (q, d) = (traj("q", &q), traj("d", &d));
        for model in [CostModel::dtw(subtraj::point_distance), CostModel::frechet(subtraj::point_distance)] {
            let ab = full_distance(&q, &d, &model).unwrap();
            let ba = full_distance(&d, &q, &model).unwrap();
            prop_assert!(same(ab, ba, &model));
        }
    }

    #[test]
    fn edr_is_a_count(q in coords(1..=6), d in coords(1..=8)) {
        let v = full_distance(&traj("q", &q), &traj("d", &d), &CostModel::edr(0.3).unwrap()).unwrap();
        prop_assert!(v >= 0.0 && v.fract() == 0.0);
    }

    #[test]
    fn safe_bound_is_admissible(k in 0..5usize, q in coords(1..=8), d in coords(1..=12), rate in 0.01..=1.0f64) {
        let model = model_at(k);
        let (q, d) = (traj("q", &q), traj("d", &d));
        let config = PruneConfig { rate, kpf_mode: KpfMode::Safe, ..Default::default() };
        let bound = kpf_lower_bound(&q, &d, &model, &config).unwrap();
        prop_assert!(bound <= cma_search(&q, &d, &model).unwrap().distance);
    }

    #[test]
    fn close_count_matches_naive_predicate(q in coords(1..=8), d in coords(1..=12), eps in 0.1..2.0f64) {
        let (q, d) = (traj("q", &q), traj("d", &d));
        let grid = build_grid(&q, eps).unwrap();
        let cell = |x: f64| (x / eps).floor() as i64;
        let naive = q.points().iter().filter(|a| {
            let (ax, ay) = a.xy().unwrap();
            d.points().iter().any(|b| {
                let (bx, by) = b.xy().unwrap();
                (cell(ax) - cell(bx)).abs() <= 1 && (cell(ay) - cell(by)).abs() <= 1
            })
        }).count();
        prop_assert_eq!(gbp_close_count(&grid, &d).unwrap(), naive);
    }

    /// Cells at `2ε` are unions of cells at `ε`, so neighbourhoods only grow.
    #[test]
    fn close_count_grows_with_coarser_grid(q in coords(1..=8), d in coords(1..=12), eps in 0.05..1.0f64) {
        let (q, d) = (traj("q", &q), traj("d", &d));
        let fine = gbp_close_count(&build_grid(&q, eps).unwrap(), &d).unwrap();
        let coarse = gbp_close_count(&build_grid(&q, 2.0 * eps).unwrap(), &d).unwrap();
        prop_assert!(coarse >= fine);
    }

    #[test]
    fn metrics_are_consistent(k in 0..5usize, q in coords(1..=5), d in coords(1..=10), pick in 0usize..1000) {
        let model = model_at(k);
        let (q, d) = (traj("q", &q), traj("d", &d));
        let truth = brute_force_all(&q, &d, &model, 1000).unwrap();
        let e = truth.entries[pick % truth.len()];
        let found = SearchResult { data_id: "d".into(), range: e.range, distance: e.distance };
        let m = quality_metrics(&found, &truth).unwrap();
        prop_assert!(m.ar >= 1.0);
        prop_assert_eq!(m.mr == 1, m.rr == 0.0);
        prop_assert_eq!(truth.len(), d.len() * (d.len() + 1) / 2);
    }

    #[test]
    fn csv_round_trip(ts in prop::collection::vec(coords(1..=6), 1..5)) {
        let ts: Vec<Trajectory> = ts.iter().enumerate().map(|(k, c)| traj(&format!("t{k}"), c)).collect();
        let mut buf = Vec::new();
        write_csv(&ts, &mut buf).unwrap();
        prop_assert_eq!(read_csv(buf.as_slice()).unwrap(), ts);
    }
}

fn small_database(seed: u64) -> Vec<Trajectory> {
    let mut r = common::rng(seed);
    let model = CostModel::dtw(subtraj::point_distance);
    (0..30)
        .map(|k| common::instance(&mut r, &model, 1..=1, 5..=25).1.with_id(format!("t{k}")))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn database_search_is_exact_in_safe_mode(k in 0..5usize, seed in any::<u64>(), q in coords(2..=6), rate in 0.05..=1.0f64) {
        let model = model_at(k);
        let db = small_database(seed);
        let q = traj("q", &q);
        let truth = db.iter().map(|t| cma_search(&q, t, &model).unwrap().distance).fold(f64::INFINITY, f64::min);
        for parallel in [false, true] {
            let config = PruneConfig { rate, parallel, ..Default::default() };
            let got = search_database(&q, &db, &model, &config).unwrap();
            prop_assert_eq!(got.best.unwrap().distance, truth);
        }
    }

    #[test]
    fn top_k_is_sorted_and_distinct(seed in any::<u64>(), q in coords(2..=6), k in 1usize..12) {
        let model = CostModel::dtw(subtraj::point_distance);
        let db = small_database(seed);
        let q = traj("q", &q);
        let out = top_k_search(&q, &db, &model, k, &PruneConfig::default()).unwrap();
        prop_assert_eq!(out.results.len(), k);
        prop_assert!(out.results.windows(2).all(|w| w[0].distance <= w[1].distance));
        let mut ids: Vec<&str> = out.results.iter().map(|r| r.data_id.as_str()).collect();
        ids.sort();
        ids.dedup();
        prop_assert_eq!(ids.len(), k);
        let best = search_database(&q, &db, &model, &PruneConfig::default()).unwrap().best.unwrap();
        prop_assert_eq!(out.results[0].distance, best.distance);
    }

    #[test]
    fn raising_mu_never_keeps_more(seed in any::<u64>(), q in coords(2..=6), eps in 0.2..2.0f64) {
        let model = CostModel::dtw(subtraj::point_distance);
        let db = small_database(seed);
        let q = traj("q", &q);
        let mut last = 0;
        for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let config = PruneConfig { mu, enable_gbp: true, enable_kpf: false, grid_epsilon: eps, ..Default::default() };
            let skipped = search_database(&q, &db, &model, &config).unwrap().stats.gbp_skipped;
            prop_assert!(skipped >= last);
            last = skipped;
        }
    }

    #[test]
    fn estimated_mode_never_beats_the_optimum(seed in any::<u64>(), q in coords(2..=6), rate in 0.05..=1.0f64) {
        let model = CostModel::dtw(subtraj::point_distance);
        let db = small_database(seed);
        let q = traj("q", &q);
        let truth = db.iter().map(|t| cma_search(&q, t, &model).unwrap().distance).fold(f64::INFINITY, f64::min);
        let config = PruneConfig { rate, kpf_mode: KpfMode::Estimated, ..Default::default() };
        let got = search_database(&q, &db, &model, &config).unwrap().best.unwrap();
        prop_assert!(got.distance >= truth);
    }
}
