use bigengine::bigraph::{close, merge, nest, parallel, Bigraph};
use bigengine::frontend::print_bigraph;
use bigengine::testing::{brute_force_iso, random_bigraph, random_ground, rename_outer, shuffle_representation, GenConfig};
use bigengine::iso::invariant_key;
use bigengine::{iso_equal, parse_bigraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random bigraphs without inner names, so that any two of them can be
/// placed side by side.
fn cfg() -> GenConfig {
    GenConfig {
        inner_names: Vec::new(),
        ..GenConfig::open(5)
    }
}

fn in_use(b: &Bigraph, name: &str) -> bool {
    b.outer_link(name).is_some_and(|l| b.link_degrees()[l] > 0)
}

/// Draws until the bigraph uses every name in `names`.
fn using(r: &mut ChaCha8Rng, c: &GenConfig, names: &[&str]) -> Bigraph {
    loop {
        let b = random_bigraph(r, c);
        if names.iter().all(|n| in_use(&b, n)) {
            return b;
        }
    }
}

fn assert_iso(a: &Bigraph, b: &Bigraph) -> Result<(), TestCaseError> {
    prop_assert!(iso_equal(a, b), "not isomorphic:\n  {}\n  {}", print_bigraph(a), print_bigraph(b));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn merge_is_commutative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = GenConfig::ground(5);
        let a = random_ground(&mut r, &c);
        let b = random_ground(&mut r, &c);
        assert_iso(&merge(&a, &b).unwrap(), &merge(&b, &a).unwrap())?;
    }

    #[test]
    fn merge_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_bigraph(&mut r, &cfg());
        let b = random_bigraph(&mut r, &cfg());
        let c = random_bigraph(&mut r, &cfg());
        let left = merge(&merge(&a, &b).unwrap(), &c).unwrap();
        let right = merge(&a, &merge(&b, &c).unwrap()).unwrap();
        assert_iso(&left, &right)?;
    }

    #[test]
    fn one_is_the_unit_of_merge(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_bigraph(&mut r, &GenConfig { max_regions: 1, ..cfg() });
        assert_iso(&merge(&a, &Bigraph::unit()).unwrap(), &a)?;
        assert_iso(&merge(&Bigraph::unit(), &a).unwrap(), &a)?;
    }

    #[test]
    fn parallel_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_bigraph(&mut r, &cfg());
        let b = random_bigraph(&mut r, &cfg());
        let c = random_bigraph(&mut r, &cfg());
        let left = parallel(&parallel(&a, &b).unwrap(), &c).unwrap();
        let right = parallel(&a, &parallel(&b, &c).unwrap()).unwrap();
        assert_iso(&left, &right)?;
        let wider = parallel(&a, &Bigraph::unit()).unwrap();
        prop_assert_eq!(wider.regions(), a.regions() + 1);
    }

    #[test]
    fn closures_commute(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = using(&mut r, &GenConfig::open(6), &["x", "y"]);
        let xy = close("x", &close("y", &b).unwrap()).unwrap();
        let yx = close("y", &close("x", &b).unwrap()).unwrap();
        assert_iso(&xy, &yx)?;
    }

    #[test]
    fn closed_edge_names_are_irrelevant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = using(&mut r, &GenConfig::open(6), &["x"]);
        let closed = close("x", &b).unwrap();
        let renamed = close("fresh", &rename_outer(&b, "x", "fresh")).unwrap();
        assert_iso(&closed, &renamed)?;
        prop_assert_eq!(invariant_key(&closed), invariant_key(&renamed));
    }

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = GenConfig { sharing: 0.15, ..GenConfig::open(6) };
        let b = random_bigraph(&mut r, &c);
        let text = print_bigraph(&b);
        let back = parse_bigraph(&text, &c.signature());
        prop_assert!(back.is_ok(), "{text}: {:?}", back.err());
        let back = back.unwrap();
        prop_assert!(iso_equal(&b, &back), "round trip changed {text} into {}", print_bigraph(&back));
    }

    #[test]
    fn isomorphism_is_an_equivalence_and_a_congruence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = GenConfig { sharing: 0.1, ..cfg() };
        let a = random_bigraph(&mut r, &c);
        let a2 = shuffle_representation(&mut r, &a);
        let a3 = shuffle_representation(&mut r, &a2);
        prop_assert!(iso_equal(&a, &a));
        prop_assert!(iso_equal(&a, &a2) && iso_equal(&a2, &a));
        prop_assert!(iso_equal(&a2, &a3) && iso_equal(&a, &a3));
        let b = random_bigraph(&mut r, &c);
        assert_iso(&merge(&a, &b).unwrap(), &merge(&a2, &b).unwrap())?;
        assert_iso(&parallel(&b, &a).unwrap(), &parallel(&b, &a3).unwrap())?;
        if in_use(&a, "x") {
            assert_iso(&close("x", &a).unwrap(), &close("x", &a2).unwrap())?;
        }
        let host = random_bigraph(&mut r, &GenConfig { max_sites: 2, ..cfg() });
        if host.sites() == a.regions() {
            if let (Ok(n1), Ok(n2)) = (nest(&host, &a), nest(&host, &a2)) {
                assert_iso(&n1, &n2)?;
            }
        }
    }

    #[test]
    fn canonical_key_agrees_with_brute_force_isomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = GenConfig { sharing: 0.1, ..GenConfig::open(5) };
        let a = random_bigraph(&mut r, &c);
        let b = if seed % 3 == 0 { shuffle_representation(&mut r, &a) } else { random_bigraph(&mut r, &c) };
        let oracle = brute_force_iso(&a, &b);
        prop_assert_eq!(iso_equal(&a, &b), oracle);
        let keys = invariant_key(&a) == invariant_key(&b);
        if oracle {
            prop_assert!(keys, "isomorphic bigraphs with different keys");
        }
    }

    #[test]
    fn ports_match_arities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = GenConfig { sharing: 0.1, ..cfg() };
        let a = random_bigraph(&mut r, &c);
        let b = random_bigraph(&mut r, &c);
        for x in [merge(&a, &b).unwrap(), parallel(&a, &b).unwrap()] {
            prop_assert!(x.check().is_ok());
            for n in x.nodes() {
                prop_assert_eq!(n.ports.len(), n.control.arity);
            }
        }
    }
}

#[test]
fn bigraphs_of_different_shape_are_not_isomorphic() {
    let mut r = rng(7);
    let c = GenConfig::open(4);
    let mut disagreements = 0;
    for _ in 0..300 {
        let a = random_bigraph(&mut r, &c);
        let b = random_bigraph(&mut r, &c);
        if iso_equal(&a, &b) != brute_force_iso(&a, &b) {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0);
}
