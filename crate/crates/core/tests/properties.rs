use graphon_clt::gof::{t_edge, ProbabilityMatrix};
use graphon_clt::sampler::sample;
use graphon_clt::statistics::{covariance_matrix, statistic_vector};
use graphon_clt::tuples::{brute_increasing_sum, increasing_sum, PairFactor, SymMatrix};
use graphon_clt::{EdgeModel, Graphon, LabelScheme, PatternGraph, StatisticSpec};
use proptest::prelude::*;

fn edge_subset(k: usize) -> impl Strategy<Value = Vec<(u8, u8)>> {
    let pairs: Vec<(u8, u8)> =
        (1..=k as u8).flat_map(|v| (v + 1..=k as u8).map(move |w| (v, w))).collect();
    let m = pairs.len();
    proptest::collection::vec(any::<bool>(), m)
        .prop_map(move |mask| pairs.iter().zip(mask).filter(|(_, b)| *b).map(|(e, _)| *e).collect())
}

fn two_block() -> impl Strategy<Value = Graphon> {
    (0.1f64..0.9, 0.05f64..0.95, 0.05f64..0.95, 0.05f64..0.95)
        .prop_map(|(s, a, b, c)| Graphon::two_block(s, a, b, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tuple_sums_match_enumeration(
        k in 1usize..=4,
        n in 4usize..9,
        edges in (1usize..=4).prop_flat_map(edge_subset),
        seed in any::<u64>(),
    ) {
        let edges: Vec<_> = edges.into_iter().filter(|&(_, w)| (w as usize) <= k).collect();
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| next()).collect();
        let m = SymMatrix::from_upper(n, &upper);
        let w: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| next()).collect()).collect();
        let wr: Vec<&[f64]> = w.iter().map(|v| v.as_slice()).collect();
        let pf: Vec<PairFactor<'_>> = edges.iter().map(|&(a, b)| PairFactor::new(a as usize - 1, b as usize - 1, &m)).collect();
        let fast = increasing_sum(&wr, &pf);
        let slow = brute_increasing_sum(&wr, &pf);
        prop_assert!((fast - slow).abs() <= 1e-10 * (1.0 + slow.abs()));
    }

    #[test]
    fn pattern_text_round_trip(edges in edge_subset(4)) {
        prop_assume!(!edges.is_empty());
        let g = PatternGraph::from_edges(&edges).unwrap();
        let back: PatternGraph = g.to_string().parse().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn covariance_is_psd(kappa in two_block(), n in 5usize..30, iid in any::<bool>()) {
        let scheme = if iid { LabelScheme::IidUniform } else { LabelScheme::Lattice };
        let specs: Vec<StatisticSpec> = ["K2", "P3", "P3c1", "K3"]
            .iter()
            .map(|s| StatisticSpec::simple(PatternGraph::named(s).unwrap()).unwrap())
            .collect();
        let sigma = covariance_matrix(&specs, &scheme, &kappa, EdgeModel::Bernoulli, n).unwrap();
        prop_assert!(sigma.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn sampling_is_a_function_of_the_seed(kappa in two_block(), n in 2usize..40, seed in any::<u64>()) {
        let a = sample(&kappa, &LabelScheme::IidUniform, EdgeModel::Bernoulli, n, seed).unwrap();
        let b = sample(&kappa, &LabelScheme::IidUniform, EdgeModel::Bernoulli, n, seed).unwrap();
        prop_assert_eq!(a.labels(), b.labels());
        prop_assert_eq!(a.edge_values(), b.edge_values());
        let spec = StatisticSpec::simple(PatternGraph::named("K2").unwrap()).unwrap();
        prop_assert_eq!(
            statistic_vector(std::slice::from_ref(&spec), &a, &kappa).unwrap(),
            statistic_vector(std::slice::from_ref(&spec), &b, &kappa).unwrap()
        );
    }

    #[test]
    fn p_values_lie_in_unit_interval(n in 2usize..20, p in 0.01f64..0.99, seed in any::<u64>()) {
        let pm = ProbabilityMatrix::constant(n, p).unwrap();
        let y = pm.sample(seed).unwrap();
        let e = t_edge(&y, &pm).unwrap();
        prop_assert!((0.0..=1.0).contains(&e.p_value));
        prop_assert!((e.z - e.sum / e.variance.sqrt()).abs() < 1e-12);
    }
}
