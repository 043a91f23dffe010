//! Products, exponentials, contractions and relabelings of diagram sums.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::label::VarLabel;
use crate::sum::{Caps, DiagramSum, LinComb};
use crate::Rational;

/// Bilinear disjoint union; terms over the common caps are dropped.
pub fn disjoint_union(a: &DiagramSum, b: &DiagramSum) -> DiagramSum {
    let caps = a.caps().meet(b.caps());
    let mut out = LinComb::zero(caps);
    if a.truncated() || b.truncated() {
        out.mark_truncated();
    }
    for (x, cx) in a.terms() {
        for (y, cy) in b.terms() {
            if x.num_vertices() + y.num_vertices() > caps.max_vertices
                || x.legs().len() + y.legs().len() > caps.max_legs
            {
                out.mark_truncated();
                continue;
            }
            out.add_term(&x.disjoint_union(y), cx * cy);
        }
    }
    out
}

/// `exp(s)` under disjoint union, truncated by the caps of `s`.
pub fn exp_union(s: &DiagramSum) -> Result<DiagramSum> {
    if !s.constant_term().is_zero() {
        return Err(Error::Precondition("exp needs a sum without empty term".into()));
    }
    let mut out = LinComb::one(s.caps());
    let mut power = LinComb::one(s.caps());
    let mut n = 1i64;
    while !power.is_zero() {
        power = disjoint_union(&power, s).scaled(&Rational::new(1.into(), n.into()));
        out.add_assign_scaled(&power, &Rational::one());
        n += 1;
    }
    Ok(out)
}

/// `log(s)` under disjoint union; `s` must have empty-term coefficient 1.
pub fn log_union(s: &DiagramSum) -> Result<DiagramSum> {
    if !s.constant_term().is_one() {
        return Err(Error::Precondition("log needs empty-term coefficient 1".into()));
    }
    let t = s.minus(&LinComb::one(s.caps()));
    let mut out = LinComb::zero(s.caps());
    if s.truncated() {
        out.mark_truncated();
    }
    let mut power = LinComb::one(s.caps());
    let mut n = 1i64;
    loop {
        power = disjoint_union(&power, &t);
        if power.is_zero() {
            break;
        }
        let sign = if n % 2 == 1 { 1 } else { -1 };
        out.add_assign_scaled(&power, &Rational::new(sign.into(), n.into()));
        n += 1;
    }
    Ok(out)
}

/// `s^k` under disjoint union for any integer `k`, via exp and log.
pub fn power_union(s: &DiagramSum, k: i64) -> Result<DiagramSum> {
    if k == 0 {
        return Ok(LinComb::one(s.caps()));
    }
    exp_union(&log_union(s)?.scaled(&Rational::from_integer(k.into())))
}

/// Calls `f` with every injective map `0..k → 0..n` (as a slice).
fn injections(k: usize, n: usize, f: &mut dyn FnMut(&[usize]) -> Result<()>) -> Result<()> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], k: usize, f: &mut dyn FnMut(&[usize]) -> Result<()>) -> Result<()> {
        if cur.len() == k {
            return f(cur);
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(cur, used, k, f)?;
                cur.pop();
                used[j] = false;
            }
        }
        Ok(())
    }
    if k > n {
        return Ok(());
    }
    rec(&mut Vec::new(), &mut vec![false; n], k, f)
}

/// All ways of gluing the `∂x`-legs of `d` (for `x` in `names`) to `x`-legs
/// of `f`. With `exact`, the counts must agree and every `x`-leg of `f` is
/// used. Each gluing is pushed to `out` with coefficient `c`.
fn glue_terms(
    d: &Diagram<VarLabel>,
    f: &Diagram<VarLabel>,
    names: &BTreeSet<VarLabel>,
    exact: bool,
    c: &Rational,
    out: &mut DiagramSum,
) -> Result<()> {
    let caps = out.caps();
    let u = d.disjoint_union(f);
    let nd = d.legs().len();
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for x in names {
        let dl: Vec<usize> = (0..nd).filter(|&i| d.legs()[i] == x.dual()).collect();
        let fl: Vec<usize> = (0..f.legs().len())
            .filter(|&i| f.legs()[i] == *x)
            .map(|i| nd + i)
            .collect();
        if dl.len() > fl.len() || (exact && dl.len() != fl.len()) {
            return Ok(());
        }
        if !dl.is_empty() || !fl.is_empty() {
            groups.push((dl, fl));
        }
    }
    // quick cap check: gluing k pairs removes 2k legs and adds no vertices
    let glued: usize = groups.iter().map(|(a, _)| a.len()).sum();
    if u.num_vertices() > caps.max_vertices || u.legs().len() - 2 * glued > caps.max_legs {
        out.mark_truncated();
        return Ok(());
    }
    fn rec(
        groups: &[(Vec<usize>, Vec<usize>)],
        pairs: &mut Vec<(usize, usize)>,
        u: &Diagram<VarLabel>,
        c: &Rational,
        out: &mut DiagramSum,
    ) -> Result<()> {
        let Some(((dl, fl), rest)) = groups.split_first() else {
            let g = u.glue_legs(pairs)?;
            out.add_term(&g, c.clone());
            return Ok(());
        };
        injections(dl.len(), fl.len(), &mut |inj| {
            let base = pairs.len();
            pairs.extend(inj.iter().enumerate().map(|(i, &j)| (dl[i], fl[j])));
            let r = rec(rest, pairs, u, c, out);
            pairs.truncate(base);
            r
        })
    }
    rec(&groups, &mut Vec::new(), &u, c, out)
}

fn caps2(a: &DiagramSum, b: &DiagramSum) -> Caps {
    a.caps().meet(b.caps())
}

/// `⟨D, P⟩_X`: all ways of gluing the `∂x`-legs of `D` to the `x`-legs of
/// `P` bijectively, for each `x ∈ X`.
pub fn pair(d: &DiagramSum, p: &DiagramSum, xs: &[VarLabel]) -> Result<DiagramSum> {
    let names: BTreeSet<VarLabel> = xs.iter().map(|x| x.var()).collect();
    let mut out = LinComb::zero(caps2(d, p));
    if d.truncated() || p.truncated() {
        out.mark_truncated();
    }
    for (dt, dc) in d.terms() {
        for (pt, pc) in p.terms() {
            glue_terms(dt, pt, &names, true, &(dc * pc), &mut out)?;
        }
    }
    Ok(out)
}

/// `D ⊣ f`: every `∂x`-leg of `D` is glued to some `x`-leg of `f`; the
/// remaining legs of `f` stay.
pub fn apply(d: &DiagramSum, f: &DiagramSum) -> Result<DiagramSum> {
    let mut out = LinComb::zero(caps2(d, f));
    if d.truncated() || f.truncated() {
        out.mark_truncated();
    }
    for (dt, dc) in d.terms() {
        let names: BTreeSet<VarLabel> = dt.legs().iter().filter(|l| l.is_dual()).map(|l| l.var()).collect();
        for (ft, fc) in f.terms() {
            glue_terms(dt, ft, &names, false, &(dc * fc), &mut out)?;
        }
    }
    Ok(out)
}

/// Divergence in `z`: all ways of attaching the `∂z`-legs of each term to
/// `z`-legs of the same term.
pub fn divergence(d: &DiagramSum, z: &VarLabel) -> Result<DiagramSum> {
    let z = z.var();
    let mut out = LinComb::zero(d.caps());
    if d.truncated() {
        out.mark_truncated();
    }
    for (t, c) in d.terms() {
        let dl: Vec<usize> = (0..t.legs().len()).filter(|&i| t.legs()[i] == z.dual()).collect();
        let zl: Vec<usize> = (0..t.legs().len()).filter(|&i| t.legs()[i] == z).collect();
        injections(dl.len(), zl.len(), &mut |inj| {
            let pairs: Vec<(usize, usize)> = inj.iter().enumerate().map(|(i, &j)| (dl[i], zl[j])).collect();
            let g = t.glue_legs(&pairs)?;
            out.add_term(&g, c.clone());
            Ok(())
        })?;
    }
    Ok(out)
}

/// A linear substitution of labels, expanded multilinearly over legs.
#[derive(Clone, Debug, Default)]
pub struct Relabeling {
    map: BTreeMap<VarLabel, Vec<(VarLabel, Rational)>>,
    passthrough: bool,
}

impl Relabeling {
    /// A relabeling that rejects labels it does not map.
    pub fn strict() -> Self {
        Relabeling::default()
    }

    /// A relabeling that leaves unmapped labels alone.
    pub fn partial() -> Self {
        Relabeling {
            map: BTreeMap::new(),
            passthrough: true,
        }
    }

    pub fn set(mut self, from: VarLabel, to: Vec<(VarLabel, Rational)>) -> Self {
        self.map.insert(from, to);
        self
    }

    /// `from → to` for a single label.
    pub fn rename(self, from: VarLabel, to: VarLabel) -> Self {
        self.set(from, vec![(to, Rational::one())])
    }

    /// The substitution `x_i → Σ_j m[i][j] y_j` on primal labels together
    /// with the contragredient substitution on their duals, so that pairing
    /// `∂x` with `x` is preserved.
    pub fn linear(from: &[VarLabel], to: &[VarLabel], m: &crate::RatMatrix) -> Result<Self> {
        let inv_t = m.inverse()?.transpose();
        let mut r = Relabeling::partial();
        for (i, x) in from.iter().enumerate() {
            let prim = to
                .iter()
                .enumerate()
                .filter(|(j, _)| !m[(i, *j)].is_zero())
                .map(|(j, y)| (y.clone(), m[(i, j)].clone()))
                .collect();
            let dual = to
                .iter()
                .enumerate()
                .filter(|(j, _)| !inv_t[(i, *j)].is_zero())
                .map(|(j, y)| (y.dual(), inv_t[(i, j)].clone()))
                .collect();
            r = r.set(x.clone(), prim).set(x.dual(), dual);
        }
        Ok(r)
    }

    pub fn image(&self, l: &VarLabel) -> Result<Vec<(VarLabel, Rational)>> {
        match self.map.get(l) {
            Some(v) => Ok(v.clone()),
            None if self.passthrough => Ok(vec![(l.clone(), Rational::one())]),
            None => Err(Error::MissingImage(l.to_string())),
        }
    }
}

/// Applies a relabeling, expanding every leg multilinearly.
pub fn relabel(s: &DiagramSum, r: &Relabeling) -> Result<DiagramSum> {
    let mut out = LinComb::zero(s.caps());
    if s.truncated() {
        out.mark_truncated();
    }
    for (d, c) in s.terms() {
        relabel_into(d, c, r, &mut out)?;
    }
    Ok(out)
}

/// Adds `c · r(d)` to `out`.
pub(crate) fn relabel_into(d: &Diagram<VarLabel>, c: &Rational, r: &Relabeling, out: &mut DiagramSum) -> Result<()> {
    let images: Vec<Vec<(VarLabel, Rational)>> = d.legs().iter().map(|l| r.image(l)).collect::<Result<_>>()?;
    if images.iter().any(|v| v.is_empty()) {
        return Ok(());
    }
    let mut choice = vec![0usize; images.len()];
    loop {
        let mut coeff = c.clone();
        for (i, &k) in choice.iter().enumerate() {
            coeff *= &images[i][k].1;
        }
        let nd = d.map_legs_indexed(|i, _| images[i][choice[i]].0.clone());
        out.add_term(&nd, coeff);
        // advance the odometer
        let mut i = 0;
        while i < choice.len() {
            choice[i] += 1;
            if choice[i] < images[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            return Ok(());
        }
    }
}

/// True if no term has a strut component with both ends in `xs` (primal or
/// dual).
pub fn is_substantial(s: &DiagramSum, xs: &[VarLabel]) -> bool {
    let names: BTreeSet<VarLabel> = xs.iter().map(|x| x.var()).collect();
    s.terms().all(|(d, _)| {
        d.components().iter().all(|comp| {
            let sub = d.sub_diagram(comp);
            !(sub.is_strut() && sub.legs().iter().all(|l| names.contains(&l.var())))
        })
    })
}

/// Convenience constructors for sums.
pub fn single(d: Diagram<VarLabel>, c: Rational, caps: Caps) -> DiagramSum {
    LinComb::from_diagram(d, c, caps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::{dvar, var};
    use crate::rat;

    fn caps() -> Caps {
        Caps::default()
    }

    fn strut(a: VarLabel, b: VarLabel) -> DiagramSum {
        single(Diagram::strut(a, b), rat(1, 1), caps())
    }

    #[test]
    fn union_of_struts() {
        let s = strut(var("x"), var("y"));
        let u = disjoint_union(&s, &s);
        assert_eq!(u.len(), 1);
        assert_eq!(u.terms().next().unwrap().1, &rat(1, 1));
        let e = disjoint_union(&LinComb::one(caps()), &s);
        assert_eq!(e, s);
    }

    #[test]
    fn exp_of_strut_truncated_at_four_legs() {
        let s = strut(var("x"), var("y")).with_caps(Caps::new(6, 4));
        let e = exp_union(&s).unwrap();
        assert_eq!(e.len(), 3);
        assert!(e.truncated());
        let two = Diagram::strut(var("x"), var("y")).disjoint_union(&Diagram::strut(var("x"), var("y")));
        assert_eq!(e.coeff(&two), rat(1, 2));
    }

    #[test]
    fn log_inverts_exp() {
        let y = single(Diagram::tripod(var("a"), var("b"), var("c")), rat(1, 1), caps());
        assert_eq!(
            log_union(&exp_union(&y).unwrap())
                .unwrap()
                .with_caps(caps())
                .terms()
                .count(),
            1
        );
        let s = y.plus(&strut(var("x"), var("y")).scaled(&rat(2, 3)));
        let back = log_union(&exp_union(&s).unwrap()).unwrap();
        assert_eq!(back.terms().collect::<Vec<_>>(), s.terms().collect::<Vec<_>>());
    }

    #[test]
    fn pairing_examples() {
        let d = strut(dvar("x"), dvar("x"));
        let p = disjoint_union(&strut(var("x"), var("e")), &strut(var("x"), var("e")));
        let r = pair(&d, &p, &[var("x")]).unwrap();
        assert_eq!(r.coeff(&Diagram::strut(var("e"), var("e"))), rat(2, 1));
        assert_eq!(r.len(), 1);
        let r = pair(&strut(dvar("x"), var("f")), &strut(var("x"), var("e")), &[var("x")]).unwrap();
        assert_eq!(r.coeff(&Diagram::strut(var("f"), var("e"))), rat(1, 1));
    }

    #[test]
    fn gluing_a_strut_to_itself_is_an_error() {
        let d = strut(dvar("x"), dvar("x"));
        let p = strut(var("x"), var("x"));
        assert!(matches!(pair(&d, &p, &[var("x")]), Err(Error::VertexlessLoop(_))));
    }

    #[test]
    fn apply_examples() {
        let d = single(Diagram::tripod(dvar("x"), var("a"), var("b")), rat(1, 1), caps());
        let r = apply(&d, &strut(var("x"), var("e"))).unwrap();
        assert_eq!(r.coeff(&Diagram::tripod(var("e"), var("a"), var("b"))), rat(1, 1));
        let two = disjoint_union(&strut(dvar("x"), var("a")), &strut(dvar("x"), var("b")));
        assert!(apply(&two, &strut(var("x"), var("e"))).unwrap().is_zero());
    }

    #[test]
    fn relabel_examples() {
        let r = Relabeling::partial().set(var("x"), vec![(var("x"), rat(-1, 1))]);
        assert_eq!(
            relabel(&strut(var("x"), var("e")), &r).unwrap(),
            strut(var("x"), var("e")).scaled(&rat(-1, 1))
        );
        let r = Relabeling::strict().set(var("x"), vec![(var("a"), rat(1, 1)), (var("b"), rat(1, 1))]);
        let s = relabel(&strut(var("x"), var("x")), &r).unwrap();
        assert_eq!(s.coeff(&Diagram::strut(var("a"), var("a"))), rat(1, 1));
        assert_eq!(s.coeff(&Diagram::strut(var("a"), var("b"))), rat(2, 1));
        assert_eq!(s.coeff(&Diagram::strut(var("b"), var("b"))), rat(1, 1));
        assert!(matches!(
            relabel(&strut(var("y"), var("y")), &r),
            Err(Error::MissingImage(_))
        ));
    }

    #[test]
    fn divergence_of_tripod_is_zero() {
        let d = single(Diagram::tripod(var("z"), var("z"), dvar("z")), rat(1, 1), caps());
        assert!(divergence(&d, &var("z")).unwrap().is_zero());
        let two = disjoint_union(&strut(dvar("z"), var("a")), &strut(dvar("z"), var("b")));
        let one = disjoint_union(&two, &strut(var("z"), var("c")));
        assert!(divergence(&one, &var("z")).unwrap().is_zero());
    }
}
