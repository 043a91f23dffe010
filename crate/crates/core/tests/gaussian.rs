use aarhus_core::algebra::disjoint_union;
use aarhus_core::gaussian::{fubini, integrate, integration_by_parts, CovarianceMatrix, Gaussian};
use aarhus_core::random::{random_connected, random_gaussian, WORK_CAPS};
use aarhus_core::{dvar, rat, reduce, var, Diagram, LinComb, RatMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn parity_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let g = random_gaussian(&mut rng, &[var("x"), var("y")], &[var("e")]).unwrap();
        let a = reduce(&integrate(&g).unwrap());
        let b = reduce(&integrate(&g.flip(&var("y")).unwrap()).unwrap());
        assert_eq!(a, b);
    }
}

#[test]
fn reparametrization_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let m = RatMatrix::from_i64(&[&[1, 1], &[1, -1]]);
    for _ in 0..20 {
        let g = random_gaussian(&mut rng, &[var("x"), var("y")], &[var("e")]).unwrap();
        let h = g.substitute(&[var("x"), var("y")], &[var("a"), var("b")], &m).unwrap();
        assert_eq!(reduce(&integrate(&g).unwrap()), reduce(&integrate(&h).unwrap()));
    }
}

#[test]
fn fubini_with_invertible_block() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 20 {
        let g = random_gaussian(&mut rng, &[var("x"), var("y")], &[var("e")]).unwrap();
        if g.cov.matrix()[(0, 0)] == rat(0, 1) {
            continue;
        }
        let (l, r) = fubini(&g, &[var("x")]).unwrap();
        assert_eq!(l, r);
        assert!(l.len() > 1);
        done += 1;
    }
}

#[test]
fn integration_by_parts_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let xs = [var("x"), var("y")];
    let mut nonzero = 0;
    for i in 0..20 {
        let g = random_gaussian(&mut rng, &xs, &[var("e")]).unwrap();
        // an operator of order 1 or 2 in x with coefficient legs in x
        let order = 1 + i % 2;
        let mut d = LinComb::one(WORK_CAPS);
        for k in 0..order {
            let t = if k % 2 == 0 {
                Diagram::tripod(dvar("x"), var("e"), var("f"))
            } else {
                Diagram::strut(dvar("x"), var("e"))
            };
            d = disjoint_union(&d, &LinComb::from_diagram(t, rat(1, 1), WORK_CAPS));
        }
        let coeff = loop {
            let c = random_connected(&mut rng, &[var("x"), var("g"), var("h")], 1, &[var("x")]).unwrap();
            if c.count_legs(&var("x")) > 0 {
                break c;
            }
        };
        d = disjoint_union(&d, &LinComb::from_diagram(coeff, rat(1, 1), WORK_CAPS));
        let (l, r) = integration_by_parts(&d, &g, &var("x")).unwrap();
        assert_eq!(l, r, "operator {d:?}");
        nonzero += usize::from(l.len() > 1);
    }
    assert!(nonzero >= 10, "only {nonzero} nontrivial cases");
}

#[test]
fn pure_gaussian_and_odd_parity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let g = random_gaussian(&mut rng, &[var("x")], &[]).unwrap();
        let pure = Gaussian::pure(g.cov.clone(), WORK_CAPS);
        assert_eq!(integrate(&pure).unwrap(), LinComb::one(WORK_CAPS));
    }
    // with diagonal covariance, P odd in y integrates to 0
    let cov = CovarianceMatrix::new(vec![var("x"), var("y")], RatMatrix::from_i64(&[&[1, 0], &[0, 2]])).unwrap();
    let t = Diagram::tripod(var("x"), var("e"), var("f"));
    let odd = Diagram::tripod(var("y"), var("e"), var("f"))
        .disjoint_union(&t)
        .disjoint_union(&t);
    let h = Gaussian::new(cov, LinComb::from_diagram(odd, rat(1, 1), WORK_CAPS)).unwrap();
    assert!(!h.p.is_zero());
    assert!(integrate(&h).unwrap().is_zero());
    assert!(integrate(&h.flip(&var("y")).unwrap()).unwrap().is_zero());
}
