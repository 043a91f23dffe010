use aarhus_core::algebra::disjoint_union;
use aarhus_core::canon::canonicalize;
use aarhus_core::diagram::End;
use aarhus_core::enumerate::enumerate_diagrams;
use aarhus_core::gaussian::{integrate, CovarianceMatrix, Gaussian};
use aarhus_core::pipeline::{
    aarhus_raw, alpha_divergence, first_kirby_factorization_check, ogl_leading_check, parity_flip_check, renormalize,
    signature_counts,
};
use aarhus_core::random::{random_covariance, random_gaussian, random_unimodular};
use aarhus_core::{rat, reduce, var, Caps, Diagram, Error, Grade, LinComb, RatMatrix, Rational, VarLabel};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Characteristic polynomial coefficients `c_0 t^n + c_1 t^{n-1} + …` by
/// Faddeev–LeVerrier.
fn char_poly(m: &RatMatrix) -> Vec<Rational> {
    let n = m.rows();
    let mut c = vec![Rational::one()];
    let mut mk = RatMatrix::zeros(n, n);
    for k in 1..=n {
        let mut shifted = mk.clone();
        for i in 0..n {
            shifted[(i, i)] += &c[k - 1];
        }
        mk = m.mul(&shifted);
        let tr: Rational = (0..n).map(|i| mk[(i, i)].clone()).sum();
        c.push(-tr / Rational::from_integer((k as i64).into()));
    }
    c
}

fn sign_changes(c: &[Rational]) -> usize {
    let signs: Vec<bool> = c.iter().filter(|x| !x.is_zero()).map(|x| x.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Positive and negative eigenvalue counts of a symmetric matrix via
/// Descartes' rule, exact for real-rooted polynomials.
fn descartes_signature(m: &RatMatrix) -> (usize, usize) {
    let c = char_poly(m);
    let n = c.len() - 1;
    let neg: Vec<Rational> = c
        .iter()
        .enumerate()
        .map(|(i, x)| if (n - i) % 2 == 1 { -x.clone() } else { x.clone() })
        .collect();
    (sign_changes(&c), sign_changes(&neg))
}

#[test]
fn signature_is_a_congruence_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let n = rng.gen_range(1..=4);
        let labels: Vec<VarLabel> = (0..n).map(|i| var(&format!("v{i}"))).collect();
        let m = random_covariance(&mut rng, &labels).matrix().clone();
        let u = random_unimodular(&mut rng, n);
        let moved = u.transpose().mul(&m).mul(&u);
        let s = signature_counts(&m).unwrap();
        assert_eq!(s.0 + s.1, n);
        assert_eq!(s, descartes_signature(&m));
        assert_eq!(signature_counts(&moved).unwrap(), s);
    }
}

fn unknot_gaussian(label: &str, framing: i64, rng: &mut ChaCha8Rng) -> Gaussian {
    let g = random_gaussian(rng, &[var(label)], &[]).unwrap();
    let cov = CovarianceMatrix::new(vec![var(label)], RatMatrix::from_i64(&[&[framing]])).unwrap();
    Gaussian::new(cov, g.p).unwrap()
}

#[test]
fn first_kirby_move_factorizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for i in 0..20 {
        let g = random_gaussian(&mut rng, &[var("x"), var("y")], &[]).unwrap();
        let u = unknot_gaussian("u", if i % 2 == 0 { 1 } else { -1 }, &mut rng);
        let (joint, split) = first_kirby_factorization_check(&g, &u).unwrap();
        assert_eq!(joint, split);
        let joint_cov = g.product(&u).unwrap().cov;
        let (p, n) = signature_counts(g.cov.matrix()).unwrap();
        let (pu, nu) = signature_counts(u.cov.matrix()).unwrap();
        assert_eq!(joint_cov.matrix(), &g.cov.matrix().block_diag(u.cov.matrix()));
        assert_eq!(signature_counts(joint_cov.matrix()).unwrap(), (p + pu, n + nu));
    }
}

#[test]
fn parity_flip_leaves_integral_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let g = random_gaussian(&mut rng, &[var("x"), var("y")], &[]).unwrap();
        let (a, b) = parity_flip_check(&g, &var("x")).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn ogl_recovers_every_small_trivalent_graph() {
    let mut seen = 0;
    for v in [2, 4] {
        for d in enumerate_diagrams(&Grade::new(v, vec![]), Caps::new(4, 0)).unwrap() {
            let r = ogl_leading_check(&d).unwrap();
            assert_eq!(r.coefficient.abs(), Rational::one(), "{d:?}");
            assert_eq!(r.recovered, canonicalize(&d).diagram);
            seen += 1;
        }
    }
    assert!(seen >= 4, "{seen}");
}

#[test]
fn alpha_divergence_vanishes() {
    let (d3, div) = alpha_divergence(3).unwrap();
    assert!(!d3.is_zero());
    assert!(div.is_zero(), "{div:?}");
}

/// Two vertices joined by an edge, legs `a, b` on the first and `c, d` on
/// the second.
fn h_tree(a: &str, b: &str, c: &str, d: &str) -> Diagram<VarLabel> {
    Diagram::new(
        2,
        vec![var(a), var(b), var(c), var(d)],
        &[
            (End::Slot(0, 0), End::Leg(0)),
            (End::Slot(0, 1), End::Leg(1)),
            (End::Slot(0, 2), End::Slot(1, 0)),
            (End::Slot(1, 1), End::Leg(2)),
            (End::Slot(1, 2), End::Leg(3)),
        ],
    )
    .unwrap()
}

#[test]
fn a_lone_leg_integrates_to_zero() {
    let caps = Caps::new(4, 8);
    let cov = || CovarianceMatrix::new(vec![var("x"), var("y")], RatMatrix::from_i64(&[&[1, 0], &[0, -1]])).unwrap();
    let integral = |d: Diagram<VarLabel>| {
        let p = LinComb::from_diagram(d, Rational::one(), caps);
        reduce(&integrate(&Gaussian::new(cov(), p).unwrap()).unwrap())
    };
    assert!(integral(h_tree("x", "y", "y", "e")).is_zero());
    assert!(!integral(h_tree("x", "e", "x", "e")).is_zero());
}

fn theta() -> Diagram<VarLabel> {
    Diagram::new(
        2,
        vec![],
        &[
            (End::Slot(0, 0), End::Slot(1, 0)),
            (End::Slot(0, 1), End::Slot(1, 1)),
            (End::Slot(0, 2), End::Slot(1, 2)),
        ],
    )
    .unwrap()
}

#[test]
fn renormalization_undoes_unknot_factors() {
    let caps = Caps::new(4, 0);
    let one = LinComb::one(caps);
    let t = LinComb::from_diagram(theta(), rat(1, 3), caps);
    let a_plus = one.plus(&t);
    let a_minus = one.minus(&t);
    let raw = one.plus(&LinComb::from_diagram(theta(), rat(5, 2), caps));
    let r = renormalize(&raw, 1, 2, &a_plus, &a_minus).unwrap();
    let back = disjoint_union(&disjoint_union(&disjoint_union(&r, &a_plus), &a_minus), &a_minus);
    assert_eq!(reduce(&back), reduce(&raw));
    assert!(renormalize(&raw, 1, 0, &t, &a_minus).is_err());
}

#[test]
fn raw_invariant_of_a_framed_unknot() {
    let caps = Caps::new(2, 4);
    let cov = CovarianceMatrix::new(vec![var("x")], RatMatrix::from_i64(&[&[1]])).unwrap();
    let p = LinComb::one(caps);
    assert_eq!(aarhus_raw(&p, &cov).unwrap(), reduce(&LinComb::one(caps)));

    let singular = CovarianceMatrix::new(vec![var("x"), var("y")], RatMatrix::from_i64(&[&[1, 1], &[1, 1]]));
    match singular.and_then(|c| aarhus_raw(&LinComb::one(caps), &c)) {
        Err(Error::Degenerate(_)) => {}
        other => panic!("expected a degenerate error, got {other:?}"),
    }
}
