use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use iaselect_core::fixture;
use iaselect_core::graph::{save, GraphSchema};
use iaselect_core::query::{evaluate, parse, PatternQuery, ResultSet};
use iaselect_testkit::{gen, oracle};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn row_ids(rs: &ResultSet) -> Vec<Vec<u64>> {
    rs.rows.iter().map(|r| r.iter().map(|c| c.id()).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matcher_agrees_with_brute_force(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = gen::small_graph(&mut rng, 8, 14);
        let q = gen::single_path_query(&mut rng);
        let got = row_ids(&evaluate(&q, &g));
        let expected: Vec<Vec<u64>> = oracle::brute_force_rows(&q, &g).into_iter().collect();
        prop_assert_eq!(got, expected, "query: {}", q);
    }

    #[test]
    fn print_parse_fixed_point(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let q = gen::any_query(&mut rng);
        q.check().unwrap();
        let text = q.pretty_print();
        let parsed = parse(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(&parsed, &q);
        prop_assert_eq!(parsed.pretty_print(), text);
    }

    #[test]
    fn parser_is_total(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
        let text = String::from_utf8_lossy(&bytes);
        let start = Instant::now();
        match parse(&text) {
            Ok(q) => prop_assert!(q.check().is_ok()),
            Err(e) => prop_assert!(!e.to_string().is_empty()),
        }
        prop_assert!(start.elapsed() < Duration::from_secs(1));
    }

    #[test]
    fn dropping_a_filter_never_loses_rows(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = gen::small_graph(&mut rng, 8, 14);
        let q = gen::single_path_query(&mut rng);
        prop_assume!(!q.filters.is_empty());
        let mut looser: PatternQuery = q.clone();
        looser.filters.remove(rng.gen_range(0..q.filters.len()));
        let strict: BTreeSet<_> = row_ids(&evaluate(&q, &g)).into_iter().collect();
        let loose: BTreeSet<_> = row_ids(&evaluate(&looser, &g)).into_iter().collect();
        prop_assert!(strict.is_subset(&loose));
    }

    #[test]
    fn evaluation_is_read_only_and_deterministic(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = gen::small_graph(&mut rng, 8, 14);
        let q = gen::single_path_query(&mut rng);
        let before = save(&g, &GraphSchema::empty());
        let first = evaluate(&q, &g);
        let second = evaluate(&q, &g);
        prop_assert_eq!(save(&g, &GraphSchema::empty()), before);
        prop_assert_eq!(first, second);
    }
}

#[test]
fn hybrid_factory_query_matches_oracle_on_fixture() {
    let g = fixture::graph();
    let q =
        parse("MATCH(h:Hybrid)-[w:WEIGHT]->(d:Domain) WHERE w.value > 2 AND d.name = \"Factory Automation\" RETURN *")
            .unwrap();
    let got = row_ids(&evaluate(&q, &g));
    let expected: Vec<Vec<u64>> = oracle::brute_force_rows(&q, &g).into_iter().collect();
    assert_eq!(got, expected);
    assert_eq!(got.len(), 3);
}
