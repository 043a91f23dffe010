//! Seeded random inputs for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::exp_union;
use crate::diagram::Diagram;
use crate::enumerate::enumerate_diagrams;
use crate::error::Result;
use crate::gaussian::{CovarianceMatrix, Gaussian};
use crate::label::VarLabel;
use crate::linalg::RatMatrix;
use crate::reduce::Grade;
use crate::sum::{Caps, DiagramSum, LinComb};
use crate::Rational;

/// Caps used for generated inputs.
pub const INPUT_CAPS: Caps = Caps::new(4, 8);
/// Caps used while computing with generated inputs, loose enough that no
/// intermediate term is dropped.
pub const WORK_CAPS: Caps = Caps::new(12, 24);

/// A random connected, nonzero diagram with at most `max_vertices`
/// vertices, legs drawn from `labels`, and no strut with both ends in
/// `avoid`.
pub fn random_connected<R: Rng>(
    rng: &mut R,
    labels: &[VarLabel],
    max_vertices: usize,
    avoid: &[VarLabel],
) -> Result<Diagram<VarLabel>> {
    loop {
        let v = rng.gen_range(0..=max_vertices);
        let nlegs = match v {
            0 => 2,
            _ => {
                // parity of the half-edge count must be even
                let mut l = rng.gen_range(1..=4usize);
                if (3 * v + l) % 2 == 1 {
                    l += 1;
                }
                l
            }
        };
        let legs: Vec<VarLabel> = (0..nlegs).map(|_| labels.choose(rng).unwrap().clone()).collect();
        if v == 0 && legs.iter().all(|l| avoid.contains(l)) {
            continue;
        }
        let all = enumerate_diagrams(&Grade::new(v, legs), Caps::new(max_vertices, 12))?;
        let conn: Vec<_> = all.into_iter().filter(|d| d.components().len() == 1).collect();
        if let Some(d) = conn.choose(rng) {
            return Ok(d.clone());
        }
    }
}

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let n: i64 = loop {
        let n = rng.gen_range(-3..=3);
        if n != 0 {
            break n;
        }
    };
    Rational::new(n.into(), rng.gen_range(1..=2i64).into())
}

/// A sum of a few random connected diagrams with small coefficients.
pub fn random_primitive<R: Rng>(
    rng: &mut R,
    labels: &[VarLabel],
    terms: usize,
    max_vertices: usize,
    avoid: &[VarLabel],
    caps: Caps,
) -> Result<DiagramSum> {
    let mut s = LinComb::zero(caps);
    for _ in 0..terms {
        let d = random_connected(rng, labels, max_vertices, avoid)?;
        s.add_term(&d, small_rational(rng));
    }
    Ok(s)
}

/// A random symmetric invertible integer matrix.
pub fn random_covariance<R: Rng>(rng: &mut R, labels: &[VarLabel]) -> CovarianceMatrix {
    let n = labels.len();
    loop {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = Rational::from_integer(rng.gen_range(-2..=2i64).into());
                m[(i, j)] = x.clone();
                m[(j, i)] = x;
            }
        }
        if m.is_invertible() {
            return CovarianceMatrix::new(labels.to_vec(), m).expect("symmetric");
        }
    }
}

/// A random Gaussian in `vars` whose `P` is the exponential of a few
/// random connected diagrams with legs in `vars ∪ extra`.
pub fn random_gaussian<R: Rng>(rng: &mut R, vars: &[VarLabel], extra: &[VarLabel]) -> Result<Gaussian> {
    let mut labels = vars.to_vec();
    labels.extend_from_slice(extra);
    let terms = rng.gen_range(2..=3);
    let prim = random_primitive(rng, &labels, terms, 2, vars, INPUT_CAPS)?;
    let p = exp_union(&prim)?.with_caps(WORK_CAPS);
    Gaussian::new(random_covariance(rng, vars), p)
}

/// A random unimodular integer matrix (product of elementary moves).
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> RatMatrix {
    let mut m = RatMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            m[(0, 0)] = Rational::from_integer((-1).into());
        }
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let k = Rational::from_integer(rng.gen_range(-2..=2i64).into());
        for c in 0..n {
            let v = &m[(j, c)] * &k;
            m[(i, c)] += v;
        }
        if rng.gen_bool(0.2) {
            for c in 0..n {
                m[(i, c)] = -m[(i, c)].clone();
            }
        }
    }
    m
}
