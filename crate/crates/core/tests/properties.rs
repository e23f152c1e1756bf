use num_traits::{One, Zero};
use proptest::prelude::*;

use schema_forge::ga::{one_point_crossover, BitString, FitnessFunction, GaConfig, Population};
use schema_forge::ga_theorems::{alpha_tilde, exact_alpha, next_count_distribution, selection_probability};
use schema_forge::gp::{common_region, one_point_crossover_gp, uniform_crossover_gp, GpMask, NodePath, PrimitiveSet, Tree};
use schema_forge::gp_schema::{building_blocks, GpSchema, LowerBlockReading};
use schema_forge::rational::{format_rational, parse_rational, ratio, to_f64};
use schema_forge::rng::substream;
use schema_forge::schema::GaSchema;
use schema_forge::Rational;

fn bits(len: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), len).prop_map(|b| BitString::new(b).unwrap())
}

fn schema(len: usize) -> impl Strategy<Value = GaSchema> {
    prop::collection::vec(prop::option::of(any::<bool>()), len).prop_map(|s| GaSchema::new(s).unwrap())
}

fn tree() -> impl Strategy<Value = Tree> {
    (any::<u64>(), 0usize..4, any::<bool>()).prop_map(|(seed, depth, full)| {
        PrimitiveSet::arithmetic().random_tree(depth, full, &mut substream(seed, &[]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ga_crossover_conserves_alleles((a, b, cut) in (2usize..12).prop_flat_map(|len| (bits(len), bits(len), 0..len - 1))) {
        let (c, d) = one_point_crossover(&a, &b, cut).unwrap();
        for i in 0..a.len() {
            let mut before = [a.get(i), b.get(i)];
            let mut after = [c.get(i), d.get(i)];
            before.sort();
            after.sort();
            prop_assert_eq!(before, after);
        }
    }

    #[test]
    fn schema_splits_into_left_and_right((h, s, cut) in (2usize..10).prop_flat_map(|len| (schema(len), bits(len), 0..len - 1))) {
        let whole = h.matches(&s).unwrap();
        let split = h.left(cut).unwrap().matches(&s).unwrap() && h.right(cut).unwrap().matches(&s).unwrap();
        prop_assert_eq!(whole, split);
        prop_assert!(h.order() <= h.len());
        let fragility = h.fragility().unwrap();
        prop_assert!(fragility >= Rational::zero() && fragility <= Rational::one());
    }

    #[test]
    fn transmission_of_complementary_schemata_sums_to_one(
        (members, pos) in (2usize..6).prop_flat_map(|len| (prop::collection::vec(bits(len), 2..6), 0..len)),
        p_c in 0u32..=4,
        p_m in 0u32..=4,
    ) {
        let len = members[0].len();
        let n = members.len();
        let pop = Population::new(members).unwrap();
        let f = FitnessFunction::one_max();
        let cfg = GaConfig::new(n, ratio(p_c as i64, 4), ratio(p_m as i64, 8), 0);
        let mut total = Rational::zero();
        let mut selected = Rational::zero();
        for value in [false, true] {
            let mut symbols = vec![None; len];
            symbols[pos] = Some(value);
            let h = GaSchema::new(symbols).unwrap();
            let alpha = exact_alpha(&h, &pop, &f, &cfg).unwrap().alpha;
            prop_assert!(alpha >= Rational::zero() && alpha <= Rational::one());
            total += alpha;
            selected += selection_probability(&h, &pop, &f).unwrap();
        }
        prop_assert_eq!(total, Rational::one());
        prop_assert_eq!(selected, Rational::one());
    }

    #[test]
    fn count_law_is_a_distribution(num in 0i64..=20, n in 1usize..40) {
        let law = next_count_distribution(&ratio(num, 20), n).unwrap();
        prop_assert_eq!(law.pmf.iter().sum::<Rational>(), Rational::one());
        prop_assert_eq!(law.mean(), ratio(num, 20) * Rational::from_integer(n.into()));
    }

    #[test]
    fn alpha_tilde_lies_between_x_over_n_and_one(k in 0.0f64..5.0, n in 1usize..200, frac in 0.0f64..=1.0) {
        let x = (frac * n as f64).floor();
        let a = alpha_tilde(k, x, n).unwrap();
        prop_assert!(a >= x / n as f64 - 1e-12);
        prop_assert!(a <= 1.0 + 1e-12);
    }

    #[test]
    fn common_region_is_symmetric(a in tree(), b in tree()) {
        let ab = common_region(&a, &b);
        let ba = common_region(&b, &a);
        prop_assert_eq!(ab.nodes(), ba.nodes());
        prop_assert!(ab.contains(&NodePath::root()));
        prop_assert!(ab.len() <= a.size().min(b.size()));
    }

    #[test]
    fn one_point_child_stays_within_parent_depths(a in tree(), b in tree(), pick in any::<prop::sample::Index>()) {
        let region = common_region(&a, &b);
        if !region.links().is_empty() {
            let point = pick.get(region.links());
            let child = one_point_crossover_gp(&a, &b, point).unwrap();
            prop_assert!(child.depth() <= a.depth().max(b.depth()));
            prop_assert_eq!(child.subtree(point), b.subtree(point));
        }
    }

    #[test]
    fn complementary_masks_conserve_symbols(seed in any::<u64>(), depth in 0usize..4, mask_bits in any::<u64>()) {
        let set = PrimitiveSet::arithmetic();
        let a = set.random_tree(depth, true, &mut substream(seed, &[0]));
        let b = set.random_tree(depth, true, &mut substream(seed, &[1]));
        let nodes = common_region(&a, &b).nodes().to_vec();
        let mask = GpMask::from_fn(&nodes, |p| mask_bits >> (nodes.iter().position(|q| q == p).unwrap() % 64) & 1 == 1);
        let c = uniform_crossover_gp(&a, &b, &mask).unwrap();
        let d = uniform_crossover_gp(&a, &b, &mask.complement()).unwrap();
        let mut before: Vec<&str> = a.symbols().into_iter().chain(b.symbols()).collect();
        let mut after: Vec<&str> = c.symbols().into_iter().chain(d.symbols()).collect();
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn building_blocks_split_the_order(t in tree(), wild in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let mut i = 0;
        let h = GpSchema::from_tree_with(&t, |_| { i += 1; wild >> (i % 64) & 1 == 1 });
        let paths = h.paths();
        let point = pick.get(&paths);
        let blocks = building_blocks(&h, point, LowerBlockReading::SubtreeWildcard).unwrap();
        prop_assert_eq!(blocks.u.order() + blocks.l.order(), h.order());
        if h.matches(&t) {
            prop_assert!(blocks.upper.matches(&t) && blocks.lower.matches(&t));
        }
    }

    #[test]
    fn text_forms_round_trip(t in tree(), num in -1000i64..1000, den in 1i64..1000) {
        prop_assert_eq!(t.to_string().parse::<Tree>().unwrap(), t.clone());
        for p in t.paths() {
            prop_assert_eq!(p.to_string().parse::<NodePath>().unwrap(), p);
        }
        let r = ratio(num, den);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r.clone());
        prop_assert!((to_f64(&r) - num as f64 / den as f64).abs() < 1e-12);
    }
}
