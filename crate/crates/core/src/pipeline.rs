//! Manifold-level computations and the identity checks built from them.

use num_traits::{One, Zero};

use crate::algebra::{disjoint_union, divergence, exp_union, power_union, relabel, Relabeling};
use crate::bch::d_bch;
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::gaussian::{apply_and_substitute, integrate, integrate_partial, CovarianceMatrix, Gaussian};
use crate::label::{var, VarLabel};
use crate::linalg::{signature, RatMatrix};
use crate::reduce::reduce;
use crate::sum::{Caps, DiagramSum, LinComb};
use crate::Rational;

/// Numbers of positive and negative eigenvalues of a linking matrix.
pub fn signature_counts(m: &RatMatrix) -> Result<(usize, usize)> {
    signature(m)
}

/// `∫ P exp(Q/2)` over every variable of the covariance; the result has
/// no legs in those variables.
pub fn aarhus_raw(p: &DiagramSum, cov: &CovarianceMatrix) -> Result<DiagramSum> {
    if cov.is_degenerate() {
        return Err(Error::Degenerate("linking matrix is singular".into()));
    }
    Ok(reduce(&integrate(&Gaussian::new(cov.clone(), p.clone())?)?))
}

/// `a₊^{−σ₊} ⊔ a₋^{−σ₋} ⊔ raw`, powers taken under disjoint union.
pub fn renormalize(
    raw: &DiagramSum,
    sigma_plus: usize,
    sigma_minus: usize,
    a_plus: &DiagramSum,
    a_minus: &DiagramSum,
) -> Result<DiagramSum> {
    for a in [a_plus, a_minus] {
        if !a.constant_term().is_one() {
            return Err(Error::Precondition("normalization series must start with 1".into()));
        }
    }
    let p = power_union(a_plus, -(sigma_plus as i64))?;
    let m = power_union(a_minus, -(sigma_minus as i64))?;
    Ok(reduce(&disjoint_union(&disjoint_union(&p, &m), raw)))
}

/// A label not among the variables or legs of `g`, derived from `base`.
fn fresh(g: &Gaussian, base: &str) -> VarLabel {
    let used = |n: &str| {
        g.vars().iter().any(|v| v.name() == n) || g.p.terms().any(|(d, _)| d.legs().iter().any(|l| l.name() == n))
    };
    let mut name = format!("{base}_");
    while used(&name) {
        name.push('_');
    }
    var(&name)
}

/// Largest vertex cap accepted by [`merge_gaussian`].
pub const MAX_MERGE_VERTICES: usize = 6;

/// `D ⊣ G` with `D = exp d_BCH` merging `x` and `y` into `z`, followed by
/// the substitution `x, y → z`. Trees are kept up to the vertex cap of
/// `G`.
pub fn merge_gaussian(g: &Gaussian, x: &VarLabel, y: &VarLabel, z: &VarLabel) -> Result<Gaussian> {
    let caps = g.p.caps();
    if caps.max_vertices > MAX_MERGE_VERTICES {
        return Err(Error::AboveCaps(format!(
            "merging supports at most {MAX_MERGE_VERTICES} vertices"
        )));
    }
    let leaves = caps.max_vertices + 1;
    let d = exp_union(&d_bch(leaves, x.name(), y.name(), z.name())?.with_caps(caps))?;
    let t = RatMatrix::from_i64(&[&[1], &[1]]);
    let merged = apply_and_substitute(&d, g, &[x.clone(), y.clone()], std::slice::from_ref(z), &t)?;
    Ok(Gaussian {
        cov: merged.cov,
        p: reduce(&merged.p),
    })
}

/// The three integrals of the Kirby-II identity.
#[derive(Clone, Debug)]
pub struct Kirby2 {
    /// `∫ G`.
    pub direct: DiagramSum,
    /// `∫ ΥG`, with `Υ` the doubling of `y` followed by merging `x` with
    /// the copy.
    pub handle_slide: DiagramSum,
    /// `∫ G/(y → x + y)`.
    pub substituted: DiagramSum,
}

impl Kirby2 {
    pub fn holds(&self) -> bool {
        self.direct == self.handle_slide && self.direct == self.substituted
    }
}

pub fn kirby2_check(g: &Gaussian, x: &VarLabel, y: &VarLabel) -> Result<Kirby2> {
    if g.cov.is_degenerate() {
        return Err(Error::Degenerate("Kirby-II needs a non-degenerate Gaussian".into()));
    }
    let y2 = fresh(g, y.name());
    let doubled = g.substitute(
        std::slice::from_ref(y),
        &[y.clone(), y2.clone()],
        &RatMatrix::from_i64(&[&[1, 1]]),
    )?;
    let slid = merge_gaussian(&doubled, x, &y2, x)?;
    let subst = g.substitute(
        std::slice::from_ref(y),
        &[x.clone(), y.clone()],
        &RatMatrix::from_i64(&[&[1, 1]]),
    )?;
    Ok(Kirby2 {
        direct: reduce(&integrate(g)?),
        handle_slide: reduce(&integrate(&slid)?),
        substituted: reduce(&integrate(&subst)?),
    })
}

/// Both orders of merging `x, y` into `z`, integrated over a set of
/// variables containing `z`. When the set covers every variable the
/// Gaussians have no variables left and `p` is the integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclic {
    pub xy: Gaussian,
    pub yx: Gaussian,
    /// Whether the two merges already differed before integration.
    pub merges_differ: bool,
}

impl Cyclic {
    pub fn holds(&self) -> bool {
        self.xy == self.yx
    }
}

/// Runs the cyclic check once per integration set in `fs`.
pub fn cyclic_check(
    g: &Gaussian,
    x: &VarLabel,
    y: &VarLabel,
    z: &VarLabel,
    fs: &[Vec<VarLabel>],
) -> Result<Vec<Cyclic>> {
    if fs.iter().any(|f| !f.contains(z)) {
        return Err(Error::Precondition("every integration set must contain z".into()));
    }
    let mxy = merge_gaussian(g, x, y, z)?;
    let myx = merge_gaussian(g, y, x, z)?;
    let merges_differ = mxy.p != myx.p;
    let integrated = |m: &Gaussian, f: &[VarLabel]| -> Result<Gaussian> {
        let r = integrate_partial(m, f)?;
        Ok(Gaussian {
            cov: r.cov,
            p: reduce(&r.p),
        })
    };
    fs.iter()
        .map(|f| {
            Ok(Cyclic {
                xy: integrated(&mxy, f)?,
                yx: integrated(&myx, f)?,
                merges_differ,
            })
        })
        .collect()
}

/// `∫G` and `∫G/(y → −y)`.
pub fn parity_flip_check(g: &Gaussian, y: &VarLabel) -> Result<(DiagramSum, DiagramSum)> {
    Ok((reduce(&integrate(g)?), reduce(&integrate(&g.flip(y)?)?)))
}

/// `∫(G ⊔ U) d(X ∪ {u})` and `(∫G dX) ⊔ (∫U du)`.
pub fn first_kirby_factorization_check(g: &Gaussian, u: &Gaussian) -> Result<(DiagramSum, DiagramSum)> {
    let joint = integrate(&g.product(u)?)?;
    let split = disjoint_union(&integrate(g)?, &integrate(u)?);
    Ok((reduce(&joint), reduce(&split)))
}

/// Outcome of cutting a manifold diagram into Y-pieces and integrating.
#[derive(Clone, Debug)]
pub struct OglLeading {
    pub coefficient: Rational,
    pub recovered: Diagram<VarLabel>,
}

/// Cuts every edge `i` of a legless diagram into two legs labeled `e_i`
/// and integrates with identity covariance in the `e_i`.
pub fn ogl_leading_check(d: &Diagram<VarLabel>) -> Result<OglLeading> {
    if !d.legs().is_empty() || d.num_vertices() == 0 {
        return Err(Error::Precondition("expected a manifold diagram".into()));
    }
    let edges = d.internal_edges();
    let mut slot_label = vec![None; d.num_half_edges()];
    let labels: Vec<VarLabel> = (0..edges.len()).map(|i| var(&format!("e{i}"))).collect();
    for (i, &(a, b)) in edges.iter().enumerate() {
        slot_label[a] = Some(labels[i].clone());
        slot_label[b] = Some(labels[i].clone());
    }
    let mut pieces = Diagram::empty();
    for v in 0..d.num_vertices() {
        let l = |s: usize| slot_label[3 * v + s].clone().expect("every slot is on an edge");
        pieces = pieces.disjoint_union(&Diagram::tripod(l(0), l(1), l(2)));
    }
    let caps = Caps::new(d.num_vertices(), 3 * d.num_vertices());
    let p = LinComb::from_diagram(pieces, Rational::one(), caps);
    let cov = CovarianceMatrix::new(labels.clone(), RatMatrix::identity(labels.len()))?;
    // Contraction pairs the two ends of every cut edge, so the result is a
    // single canonical diagram; reducing modulo IHX would hide that.
    let r = integrate(&Gaussian::new(cov, p)?)?;
    let mut it = r.into_terms();
    match (it.next(), it.next()) {
        (Some((recovered, coefficient)), None) => Ok(OglLeading { coefficient, recovered }),
        (None, _) if crate::canon::canonicalize(d).is_zero() => Ok(OglLeading {
            coefficient: Rational::zero(),
            recovered: d.clone(),
        }),
        _ => Err(Error::Internal(
            "cut-and-integrate did not return a single diagram".into(),
        )),
    }
}

/// `div_α` of the strutless part of `exp Λ_xy − exp Λ_yx` written in the
/// coordinates `α = (x + y)/2`, `β = (x − y)/2`, with forests of at most
/// `max_vertices` vertices.
pub fn alpha_divergence(max_vertices: usize) -> Result<(DiagramSum, DiagramSum)> {
    let caps = Caps::new(max_vertices, usize::MAX);
    let leaves = max_vertices + 1;
    let exy = exp_union(&d_bch(leaves, "x", "y", "a")?.with_caps(caps))?;
    let eyx = exp_union(&d_bch(leaves, "y", "x", "a")?.with_caps(caps))?;
    let diff = exy.minus(&eyx);
    let half = Rational::new(1.into(), 2.into());
    let da = var("a").dual();
    let db = var("b").dual();
    let r = Relabeling::partial()
        .set(
            var("x").dual(),
            vec![(da.clone(), half.clone()), (db.clone(), half.clone())],
        )
        .set(var("y").dual(), vec![(da, half.clone()), (db, -half)]);
    let d3 = reduce(&relabel(&diff, &r)?);
    let div = reduce(&divergence(&d3, &var("a"))?);
    Ok((d3, div))
}
