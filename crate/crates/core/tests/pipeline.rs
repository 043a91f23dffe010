use aarhus_core::gaussian::Gaussian;
use aarhus_core::pipeline::{cyclic_check, kirby2_check};
use aarhus_core::random::random_gaussian;
use aarhus_core::{var, Caps};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CAPS: Caps = Caps::new(4, 24);

fn capped(g: Gaussian) -> Gaussian {
    Gaussian {
        p: g.p.with_caps(CAPS),
        cov: g.cov,
    }
}

#[test]
fn kirby2_triple_equality() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nontrivial = 0;
    for _ in 0..20 {
        let g = capped(random_gaussian(&mut rng, &[var("x"), var("y"), var("w")], &[]).unwrap());
        let k = kirby2_check(&g, &var("x"), &var("y")).unwrap();
        assert_eq!(k.direct, k.substituted);
        assert_eq!(k.direct, k.handle_slide);
        nontrivial += usize::from(k.direct.len() > 1);
    }
    assert!(nontrivial >= 10, "{nontrivial}");
}

#[test]
fn cyclic_invariance_all_and_z_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (x, y, z, e, u) = (var("x"), var("y"), var("z"), var("e"), var("u"));
    let fs = [vec![z.clone(), e.clone(), u.clone()], vec![z.clone()]];
    let mut done = 0;
    let mut differs_before = 0;
    while done < 8 {
        let g = capped(random_gaussian(&mut rng, &[x.clone(), y.clone(), e.clone(), u.clone()], &[]).unwrap());
        let Ok(checks) = cyclic_check(&g, &x, &y, &z, &fs) else {
            continue;
        };
        for c in &checks {
            assert!(c.holds(), "{c:?}");
        }
        differs_before += usize::from(checks[0].merges_differ);
        done += 1;
    }
    assert!(differs_before >= 3, "{differs_before}");
}
