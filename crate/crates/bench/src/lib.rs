//! Seeded workloads shared by the benchmarks in `benches/`.

use aarhus_core::gaussian::Gaussian;
use aarhus_core::random::random_gaussian;
use aarhus_core::{var, Caps, Diagram, VarLabel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Caps used by the merge and Kirby workloads.
pub const CAPS: Caps = Caps::new(4, 24);

/// A random Gaussian in `vars`, truncated to [`CAPS`].
pub fn gaussian(seed: u64, vars: &[&str]) -> Gaussian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<VarLabel> = vars.iter().map(|v| var(v)).collect();
    let g = random_gaussian(&mut rng, &vars, &[]).expect("random Gaussian");
    Gaussian {
        p: g.p.with_caps(CAPS),
        cov: g.cov,
    }
}

/// The wheel with `n` spokes, legs labeled `x`.
pub fn wheel(n: usize) -> Diagram<VarLabel> {
    use aarhus_core::End;
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((End::Slot(i, 1), End::Slot((i + 1) % n, 0)));
        edges.push((End::Slot(i, 2), End::Leg(i)));
    }
    Diagram::new(n, vec![var("x"); n], &edges).expect("wheel")
}
