use aarhus_core::grammar::{parse_covariance, parse_series, print_covariance, print_series};
use aarhus_core::random::{random_connected, random_covariance};
use aarhus_core::{dvar, parse_sum, print_sum, rat, reduce, var, Caps, LinComb, VarLabel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAPS: Caps = Caps::new(12, 24);

fn random_sum(seed: u64) -> LinComb<VarLabel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = [var("x"), var("y"), dvar("x"), var("e2"), dvar("long_name")];
    let mut s = LinComb::zero(CAPS);
    for _ in 0..rng.gen_range(0..4) {
        let mut d = random_connected(&mut rng, &labels, 3, &[]).unwrap();
        if rng.gen_bool(0.3) {
            d = d.disjoint_union(&random_connected(&mut rng, &labels, 2, &[]).unwrap());
        }
        s.add_term(&d, rat(rng.gen_range(-9..=9), rng.gen_range(1..=7)));
    }
    if rng.gen_bool(0.2) {
        s = s.plus(&LinComb::one(CAPS));
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sums_round_trip(seed in any::<u64>()) {
        let s = random_sum(seed);
        let text = print_sum(&s);
        let back = parse_sum(&text, CAPS).unwrap();
        prop_assert_eq!(&back, &s, "{}", text);
        prop_assert_eq!(reduce(&back), reduce(&s));
        let series = parse_series(&print_series(&s), CAPS).unwrap();
        prop_assert_eq!(series, s);
    }

    #[test]
    fn covariances_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let labels: Vec<VarLabel> = (0..n).map(|i| var(&format!("v{i}"))).collect();
        let cov = random_covariance(&mut rng, &labels);
        let (l, m) = parse_covariance(&print_covariance(cov.labels(), cov.matrix())).unwrap();
        prop_assert_eq!(l, labels);
        prop_assert_eq!(&m, cov.matrix());
    }
}

#[test]
fn same_seed_same_text() {
    for seed in 0..20 {
        assert_eq!(print_sum(&random_sum(seed)), print_sum(&random_sum(seed)));
    }
}
