//! Formal Gaussian integration.
//!
//! A [`Gaussian`] stores `P · exp(Q/2)` symbolically as the covariance
//! matrix of `Q = Σ l_xy strut(x, y)` and the series `P`; the exponential is
//! never expanded. Integration glues the legs of `P` in all ways with struts
//! weighted by the negated inverse covariance.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::algebra::{disjoint_union, exp_union, is_substantial, log_union, relabel, relabel_into, Relabeling};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::label::VarLabel;
use crate::linalg::RatMatrix;
use crate::sum::{Caps, DiagramSum, LinComb};
use crate::Rational;

/// Symmetric rational matrix indexed by variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovarianceMatrix {
    labels: Vec<VarLabel>,
    matrix: RatMatrix,
}

impl CovarianceMatrix {
    pub fn new(labels: Vec<VarLabel>, matrix: RatMatrix) -> Result<Self> {
        if matrix.rows() != labels.len() || !matrix.is_symmetric() {
            return Err(Error::Malformed("covariance must be square and symmetric".into()));
        }
        let set: BTreeSet<&VarLabel> = labels.iter().collect();
        if set.len() != labels.len() || labels.iter().any(|l| l.is_dual()) {
            return Err(Error::Malformed(
                "covariance labels must be distinct primal variables".into(),
            ));
        }
        Ok(CovarianceMatrix { labels, matrix })
    }

    pub fn labels(&self) -> &[VarLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn index_of(&self, l: &VarLabel) -> Option<usize> {
        self.labels.iter().position(|x| x == l)
    }

    pub fn is_degenerate(&self) -> bool {
        !self.matrix.is_invertible()
    }

    /// `Q/2` as a sum of struts.
    pub fn half_quadratic(&self, caps: Caps) -> DiagramSum {
        let mut q = LinComb::zero(caps);
        let n = self.labels.len();
        for i in 0..n {
            for j in i..n {
                let c = if i == j {
                    &self.matrix[(i, i)] / Rational::from_integer(2.into())
                } else {
                    self.matrix[(i, j)].clone()
                };
                q.add_term(&Diagram::strut(self.labels[i].clone(), self.labels[j].clone()), c);
            }
        }
        q
    }
}

/// `P · exp(Q/2)` with `P` substantial in the covariance variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gaussian {
    pub cov: CovarianceMatrix,
    pub p: DiagramSum,
}

impl Gaussian {
    pub fn new(cov: CovarianceMatrix, p: DiagramSum) -> Result<Self> {
        if !is_substantial(&p, cov.labels()) {
            return Err(Error::NotSubstantial("P has a strut with both ends in X".into()));
        }
        Ok(Gaussian { cov, p })
    }

    pub fn pure(cov: CovarianceMatrix, caps: Caps) -> Self {
        Gaussian {
            cov,
            p: LinComb::one(caps),
        }
    }

    pub fn vars(&self) -> &[VarLabel] {
        self.cov.labels()
    }

    /// The series `P ⊔ exp(Q/2)`, truncated by the caps of `P`.
    pub fn materialize(&self) -> Result<DiagramSum> {
        Ok(disjoint_union(
            &self.p,
            &exp_union(&self.cov.half_quadratic(self.p.caps()))?,
        ))
    }

    /// Substitutes `x_i → Σ_j t[i][j] y_j` for the listed old variables;
    /// the other variables are kept. The covariance becomes `Tᵀ L T`.
    pub fn substitute(&self, old: &[VarLabel], new: &[VarLabel], t: &RatMatrix) -> Result<Gaussian> {
        let plan = Substitution::new(self, old, new, t)?;
        Gaussian::new(plan.covariance(self)?, relabel(&self.p, &plan.relabel)?)
    }

    /// `G` with `y → −y`.
    pub fn flip(&self, y: &VarLabel) -> Result<Gaussian> {
        self.substitute(
            std::slice::from_ref(y),
            std::slice::from_ref(y),
            &RatMatrix::from_i64(&[&[-1]]),
        )
    }

    /// Disjoint union of two Gaussians in disjoint variables.
    pub fn product(&self, other: &Gaussian) -> Result<Gaussian> {
        if self.vars().iter().any(|v| other.vars().contains(v)) {
            return Err(Error::Precondition("Gaussians share a variable".into()));
        }
        let mut labels = self.vars().to_vec();
        labels.extend(other.vars().iter().cloned());
        Gaussian::new(
            CovarianceMatrix::new(labels, self.cov.matrix().block_diag(other.cov.matrix()))?,
            disjoint_union(&self.p, &other.p),
        )
    }
}

/// A linear change of variables of a Gaussian: old variables map to
/// combinations of the targets through `full` (one row per variable).
struct Substitution {
    targets: Vec<VarLabel>,
    full: RatMatrix,
    relabel: Relabeling,
}

impl Substitution {
    fn identity(g: &Gaussian) -> Self {
        Substitution {
            targets: g.vars().to_vec(),
            full: RatMatrix::identity(g.vars().len()),
            relabel: Relabeling::partial(),
        }
    }

    fn new(g: &Gaussian, old: &[VarLabel], new: &[VarLabel], t: &RatMatrix) -> Result<Self> {
        for o in old {
            if g.cov.index_of(o).is_none() {
                return Err(Error::Precondition(format!("{o} is not a Gaussian variable")));
            }
        }
        let mut targets: Vec<VarLabel> = g.vars().iter().filter(|v| !old.contains(v)).cloned().collect();
        for v in new {
            if !targets.contains(v) {
                targets.push(v.clone());
            }
        }
        let mut full = RatMatrix::zeros(g.vars().len(), targets.len());
        let mut relabel = Relabeling::partial();
        for (i, x) in g.vars().iter().enumerate() {
            if let Some(k) = old.iter().position(|o| o == x) {
                let mut img = Vec::new();
                for (j, y) in new.iter().enumerate() {
                    let c = t[(k, j)].clone();
                    if !c.is_zero() {
                        let col = targets.iter().position(|v| v == y).unwrap();
                        full[(i, col)] += c.clone();
                        img.push((y.clone(), c));
                    }
                }
                relabel = relabel.set(x.clone(), img);
            } else {
                let col = targets.iter().position(|v| v == x).unwrap();
                full[(i, col)] = Rational::one();
            }
        }
        Ok(Substitution { targets, full, relabel })
    }

    fn covariance(&self, g: &Gaussian) -> Result<CovarianceMatrix> {
        let l = self.full.transpose().mul(g.cov.matrix()).mul(&self.full);
        CovarianceMatrix::new(self.targets.clone(), l)
    }
}

/// Splits a series into `P · exp(Q/2)` with respect to `xs`.
pub fn extract_gaussian(s: &DiagramSum, xs: &[VarLabel]) -> Result<Gaussian> {
    let lg = log_union(s)?;
    let n = xs.len();
    let mut m = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let c = lg.coeff(&Diagram::strut(xs[i].clone(), xs[j].clone()));
            if i == j {
                m[(i, i)] = c * Rational::from_integer(2.into());
            } else {
                m[(i, j)] = c.clone();
                m[(j, i)] = c;
            }
        }
    }
    let cov = CovarianceMatrix::new(xs.to_vec(), m)?;
    let minus_half_q = cov.half_quadratic(s.caps()).scaled(&-Rational::one());
    let p = disjoint_union(&exp_union(&minus_half_q)?, s);
    Gaussian::new(cov, p)
}

type MatchingVisitor<'a> = dyn FnMut(&[(usize, usize)]) -> Result<()> + 'a;

/// Calls `f` with every perfect matching of `0..n` as a list of pairs.
fn perfect_matchings(n: usize, f: &mut MatchingVisitor<'_>) -> Result<()> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, f: &mut MatchingVisitor<'_>) -> Result<()> {
        if free.is_empty() {
            return f(cur);
        }
        let a = free.remove(0);
        for k in 0..free.len() {
            let b = free.remove(k);
            cur.push((a, b));
            rec(free, cur, f)?;
            cur.pop();
            free.insert(k, b);
        }
        free.insert(0, a);
        Ok(())
    }
    if n % 2 == 1 {
        return Ok(());
    }
    rec(&mut (0..n).collect(), &mut Vec::new(), f)
}

/// `∫ G dX` over all variables of `G`: every perfect matching of the
/// `X`-legs of each term of `P`, a matched pair `(a, b)` weighted by
/// `−(L⁻¹)_ab`.
pub fn integrate(g: &Gaussian) -> Result<DiagramSum> {
    let inv = g
        .cov
        .matrix()
        .inverse()
        .map_err(|_| Error::Degenerate("degenerate covariance".into()))?;
    let mut out = LinComb::zero(g.p.caps());
    if g.p.truncated() {
        out.mark_truncated();
    }
    for (d, c) in g.p.terms() {
        let legs: Vec<(usize, usize)> = d
            .legs()
            .iter()
            .enumerate()
            .filter_map(|(i, l)| g.cov.index_of(l).map(|k| (i, k)))
            .collect();
        perfect_matchings(legs.len(), &mut |m| {
            let mut w = c.clone();
            let mut pairs = Vec::with_capacity(m.len());
            for &(a, b) in m {
                let (la, ka) = legs[a];
                let (lb, kb) = legs[b];
                w *= -&inv[(ka, kb)];
                if w.is_zero() {
                    return Ok(());
                }
                pairs.push((la, lb));
            }
            out.add_term(&d.glue_legs(&pairs)?, w);
            Ok(())
        })?;
    }
    Ok(out)
}

/// Integrates out the variables `f`, leaving a Gaussian in the others.
///
/// With `L = [[A, B], [Bᵀ, C]]` split along `f` and `Ā = A⁻¹`, the new
/// covariance is `C − Bᵀ Ā B`; each `f`-leg of `P` is either matched with
/// another one (weight `−Ā_ab`) or replaced by `−Σ_y (Ā B)_ay y`.
pub fn integrate_partial(g: &Gaussian, f: &[VarLabel]) -> Result<Gaussian> {
    let fi: Vec<usize> = f
        .iter()
        .map(|x| {
            g.cov
                .index_of(x)
                .ok_or_else(|| Error::Precondition(format!("{x} is not a Gaussian variable")))
        })
        .collect::<Result<_>>()?;
    let yi: Vec<usize> = (0..g.vars().len()).filter(|i| !fi.contains(i)).collect();
    let l = g.cov.matrix();
    let a_inv = l
        .submatrix(&fi, &fi)
        .inverse()
        .map_err(|_| Error::Degenerate("degenerate block".into()))?;
    let b = l.submatrix(&fi, &yi);
    let c = l.submatrix(&yi, &yi);
    let ab = a_inv.mul(&b);
    let new_cov = c.sub(&b.transpose().mul(&ab));
    let ys: Vec<VarLabel> = yi.iter().map(|&i| g.vars()[i].clone()).collect();
    let fs: Vec<VarLabel> = fi.iter().map(|&i| g.vars()[i].clone()).collect();

    let mut out = LinComb::zero(g.p.caps());
    if g.p.truncated() {
        out.mark_truncated();
    }
    for (d, coeff) in g.p.terms() {
        let legs: Vec<(usize, usize)> = d
            .legs()
            .iter()
            .enumerate()
            .filter_map(|(i, lab)| fs.iter().position(|x| x == lab).map(|k| (i, k)))
            .collect();
        let n = legs.len();
        // choose the subset of f-legs that get matched (by bitmask)
        for mask in 0u64..(1u64 << n) {
            if mask.count_ones() % 2 == 1 {
                continue;
            }
            let matched: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let converted: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
            perfect_matchings(matched.len(), &mut |m| {
                let mut w = coeff.clone();
                let mut pairs = Vec::new();
                for &(p, q) in m {
                    let (la, ka) = legs[matched[p]];
                    let (lb, kb) = legs[matched[q]];
                    w *= -&a_inv[(ka, kb)];
                    pairs.push((la, lb));
                }
                if w.is_zero() {
                    return Ok(());
                }
                // replace the converted legs by linear combinations of y's
                let mut r = Relabeling::partial();
                let mut tmp = d.clone();
                let mut marks = Vec::new();
                for (t, &ci) in converted.iter().enumerate() {
                    let (li, k) = legs[ci];
                    let mark = VarLabel::primal(&format!("\u{0}{t}"));
                    let img: Vec<(VarLabel, Rational)> = ys
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| !ab[(k, *j)].is_zero())
                        .map(|(j, y)| (y.clone(), -ab[(k, j)].clone()))
                        .collect();
                    r = r.set(mark.clone(), img);
                    marks.push((li, mark));
                }
                tmp = tmp.map_legs_indexed(|i, l| {
                    marks
                        .iter()
                        .find(|(li, _)| *li == i)
                        .map_or_else(|| l.clone(), |(_, m)| m.clone())
                });
                let glued = tmp.glue_legs(&pairs)?;
                let s = relabel(&LinComb::from_diagram(glued, w, out.caps()), &r)?;
                out.add_assign_scaled(&s, &Rational::one());
                Ok(())
            })?;
        }
    }
    Gaussian::new(CovarianceMatrix::new(ys, new_cov)?, out)
}

/// `D ⊣ (P exp(Q/2))`, returned as `P′ exp(Q/2)` with the same covariance.
///
/// Every `∂a`-leaf of a term of `D` is glued to an `a`-leg of `P`, paired
/// with another leaf `∂b` (weight `l_ab`), or turned into the leg
/// combination `Σ_w l_aw w`.
pub fn apply_to_gaussian(d: &DiagramSum, g: &Gaussian) -> Result<Gaussian> {
    apply_with(d, g, &Substitution::identity(g))
}

/// `(D ⊣ G)` followed by the substitution of [`Gaussian::substitute`],
/// computed in one pass so that converted leaves expand directly in the
/// new variables.
pub fn apply_and_substitute(
    d: &DiagramSum,
    g: &Gaussian,
    old: &[VarLabel],
    new: &[VarLabel],
    t: &RatMatrix,
) -> Result<Gaussian> {
    apply_with(d, g, &Substitution::new(g, old, new, t)?)
}

fn apply_with(d: &DiagramSum, g: &Gaussian, plan: &Substitution) -> Result<Gaussian> {
    let l = g.cov.matrix();
    let lf = l.mul(&plan.full);
    let caps = d.caps().meet(g.p.caps());
    let mut out = LinComb::zero(caps);
    if d.truncated() || g.p.truncated() {
        out.mark_truncated();
    }
    let idx = |x: &VarLabel| g.cov.index_of(&x.var());
    for (dt, dc) in d.terms() {
        let leaves: Vec<usize> = (0..dt.legs().len()).filter(|&i| dt.legs()[i].is_dual()).collect();
        for (pt, pc) in g.p.terms() {
            // gluing keeps every vertex
            if dt.num_vertices() + pt.num_vertices() > caps.max_vertices {
                out.mark_truncated();
                continue;
            }
            let u = dt.disjoint_union(pt);
            let nd = dt.legs().len();
            let mut st = OpState {
                u: &u,
                leaves: &leaves,
                nd,
                used_p: vec![false; pt.legs().len()],
                done: vec![false; leaves.len()],
                pairs: Vec::new(),
                converted: Vec::new(),
                weight: dc * pc,
            };
            op_rec(&mut st, &Finish { plan, lf: &lf }, l, &idx, &mut out)?;
        }
    }
    Ok(Gaussian {
        cov: plan.covariance(g)?,
        p: out,
    })
}

struct Finish<'a> {
    plan: &'a Substitution,
    /// `L · full`: the image of a converted `∂a` leaf in the targets.
    lf: &'a RatMatrix,
}

struct OpState<'a> {
    u: &'a Diagram<VarLabel>,
    leaves: &'a [usize],
    nd: usize,
    used_p: Vec<bool>,
    done: Vec<bool>,
    pairs: Vec<(usize, usize)>,
    converted: Vec<(usize, usize)>,
    weight: Rational,
}

fn op_rec(
    st: &mut OpState<'_>,
    g: &Finish<'_>,
    l: &RatMatrix,
    idx: &dyn Fn(&VarLabel) -> Option<usize>,
    out: &mut DiagramSum,
) -> Result<()> {
    let Some(k) = st.done.iter().position(|d| !d) else {
        return finish_op(st, g, out);
    };
    let leaf = st.leaves[k];
    let lab = st.u.legs()[leaf].var();
    st.done[k] = true;
    // glue to a leg of P
    for j in 0..st.used_p.len() {
        if !st.used_p[j] && st.u.legs()[st.nd + j] == lab {
            st.used_p[j] = true;
            st.pairs.push((leaf, st.nd + j));
            op_rec(st, g, l, idx, out)?;
            st.pairs.pop();
            st.used_p[j] = false;
        }
    }
    if let Some(a) = idx(&lab) {
        // pair with a later leaf through a strut of Q
        for k2 in k + 1..st.leaves.len() {
            if st.done[k2] {
                continue;
            }
            let leaf2 = st.leaves[k2];
            let Some(b) = idx(&st.u.legs()[leaf2]) else {
                continue;
            };
            let w = &l[(a, b)];
            if w.is_zero() {
                continue;
            }
            st.done[k2] = true;
            let saved = st.weight.clone();
            st.weight *= w;
            st.pairs.push((leaf, leaf2));
            op_rec(st, g, l, idx, out)?;
            st.pairs.pop();
            st.weight = saved;
            st.done[k2] = false;
        }
        // the strut's other end stays as a leg
        st.converted.push((leaf, a));
        op_rec(st, g, l, idx, out)?;
        st.converted.pop();
    }
    st.done[k] = false;
    Ok(())
}

fn finish_op(st: &OpState<'_>, g: &Finish<'_>, out: &mut DiagramSum) -> Result<()> {
    let mut r = g.plan.relabel.clone();
    let marks: Vec<(usize, VarLabel)> = st
        .converted
        .iter()
        .enumerate()
        .map(|(t, &(leaf, a))| {
            let mark = VarLabel::primal(&format!("\u{0}{t}"));
            let img = g
                .plan
                .targets
                .iter()
                .enumerate()
                .filter(|(w, _)| !g.lf[(a, *w)].is_zero())
                .map(|(w, x)| (x.clone(), g.lf[(a, w)].clone()))
                .collect();
            r = std::mem::take(&mut r).set(mark.clone(), img);
            (leaf, mark)
        })
        .collect();
    let tmp = st.u.map_legs_indexed(|i, lab| {
        marks
            .iter()
            .find(|(li, _)| *li == i)
            .map_or_else(|| lab.clone(), |(_, m)| m.clone())
    });
    let glued = tmp.glue_legs(&st.pairs)?;
    relabel_into(&glued, &st.weight, &r, out)
}

/// Both sides of `∫ D⊣G dX = (−1)^l ∫ (div_z D) G dX` for an operator `D`
/// in `z` of homogeneous order `l`.
pub fn integration_by_parts(d: &DiagramSum, g: &Gaussian, z: &VarLabel) -> Result<(DiagramSum, DiagramSum)> {
    if !is_substantial(d, g.vars()) {
        return Err(Error::NotSubstantial("operator has a strut in X".into()));
    }
    let mut lhs = LinComb::zero(d.caps().meet(g.p.caps()));
    let mut rhs = lhs.clone();
    let dual = z.var().dual();
    for (t, c) in d.terms() {
        let single = LinComb::from_diagram(t.clone(), c.clone(), d.caps());
        let order = t.count_legs(&dual) as i64;
        let applied = apply_to_gaussian(&single, g)?;
        lhs = lhs.plus(&integrate(&applied)?);
        let div = crate::algebra::divergence(&single, z)?;
        let gd = Gaussian {
            cov: g.cov.clone(),
            p: disjoint_union(&div, &g.p),
        };
        let sign = Rational::from_integer(if order % 2 == 0 { 1 } else { -1 }.into());
        rhs = rhs.plus(&integrate(&gd)?.scaled(&sign));
    }
    Ok((crate::reduce(&lhs), crate::reduce(&rhs)))
}

/// Both sides of Fubini: integrating over everything at once, and first
/// over `inner` then over the rest.
pub fn fubini(g: &Gaussian, inner: &[VarLabel]) -> Result<(DiagramSum, DiagramSum)> {
    let lhs = integrate(g)?;
    let rhs = integrate(&integrate_partial(g, inner)?)?;
    Ok((crate::reduce(&lhs), crate::reduce(&rhs)))
}
