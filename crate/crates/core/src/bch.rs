//! The BCH series as a sum of rooted trees, and the strand-merging map on
//! uni-trivalent diagrams it induces.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::algebra::{apply, disjoint_union, pair, relabel, Relabeling};
use crate::diagram::{Diagram, End};
use crate::error::{Error, Result};
use crate::label::{dvar, var, VarLabel};
use crate::reduce::reduce;
use crate::sum::{Caps, DiagramSum, LinComb};
use crate::Rational;

/// Largest truncation degree accepted by [`bch_trees`].
pub const DEFAULT_MAX_DEGREE: usize = 4;

const UNBOUNDED: Caps = Caps::new(usize::MAX, usize::MAX);

/// A Lie bracket expression in letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bracket {
    Leaf(VarLabel),
    Node(Box<Bracket>, Box<Bracket>),
}

impl Bracket {
    pub fn leaf(l: VarLabel) -> Self {
        Bracket::Leaf(l)
    }

    pub fn br(a: Bracket, b: Bracket) -> Self {
        Bracket::Node(Box::new(a), Box::new(b))
    }

    /// The left-normed bracket `[..[[w0, w1], w2].., wn]`.
    pub fn left_normed(word: &[VarLabel]) -> Self {
        let mut b = Bracket::Leaf(word[0].clone());
        for l in &word[1..] {
            b = Bracket::br(b, Bracket::Leaf(l.clone()));
        }
        b
    }

    /// The rooted tree of the bracket: each node is a vertex with cyclic
    /// order `(left, right, parent)`, and the root leg carries `root`.
    pub fn to_tree(&self, root: VarLabel) -> Diagram<VarLabel> {
        fn build(b: &Bracket, nv: &mut usize, legs: &mut Vec<VarLabel>, edges: &mut Vec<(End, End)>) -> End {
            match b {
                Bracket::Leaf(l) => {
                    legs.push(l.clone());
                    End::Leg(legs.len() - 1)
                }
                Bracket::Node(l, r) => {
                    let w = *nv;
                    *nv += 1;
                    let le = build(l, nv, legs, edges);
                    let re = build(r, nv, legs, edges);
                    edges.push((End::Slot(w, 0), le));
                    edges.push((End::Slot(w, 1), re));
                    End::Slot(w, 2)
                }
            }
        }
        let (mut nv, mut legs, mut edges) = (0, Vec::new(), Vec::new());
        let top = build(self, &mut nv, &mut legs, &mut edges);
        legs.push(root);
        edges.push((top, End::Leg(legs.len() - 1)));
        Diagram::new(nv, legs, &edges).expect("trees are well formed")
    }
}

type Word = Vec<u8>;
type FreeElt = BTreeMap<Word, Rational>;

fn free_mul(a: &FreeElt, b: &FreeElt, n: usize) -> FreeElt {
    let mut out = FreeElt::new();
    for (u, cu) in a {
        for (v, cv) in b {
            if u.len() + v.len() > n {
                continue;
            }
            let mut w = u.clone();
            w.extend_from_slice(v);
            let e = out.entry(w).or_insert_with(Rational::zero);
            *e += cu * cv;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `log(e^x e^y)` in the free associative algebra on letters 0 and 1,
/// truncated above word length `n`.
fn free_bch(n: usize) -> FreeElt {
    let exp_letter = |l: u8| -> FreeElt {
        let mut e = FreeElt::new();
        let mut f = Rational::one();
        for k in 0..=n {
            if k > 0 {
                f /= Rational::from_integer((k as i64).into());
            }
            e.insert(vec![l; k], f.clone());
        }
        e
    };
    let mut u = free_mul(&exp_letter(0), &exp_letter(1), n);
    u.remove(&Vec::new());
    let mut out = FreeElt::new();
    let mut power: FreeElt = [(Vec::new(), Rational::one())].into();
    for k in 1..=n {
        power = free_mul(&power, &u, n);
        let c = Rational::new(if k % 2 == 1 { 1.into() } else { (-1).into() }, (k as i64).into());
        for (w, x) in &power {
            *out.entry(w.clone()).or_insert_with(Rational::zero) += x * &c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// The series `Λ`: BCH trees with leaves `∂x`, `∂y` and root `z`, up to
/// `degree` leaves, reduced modulo AS/IHX.
#[derive(Clone, Debug)]
pub struct BchSeries {
    pub degree: usize,
    pub terms: DiagramSum,
}

impl BchSeries {
    /// `Λ` with the labels `x, y, z` renamed.
    pub fn relabeled(&self, x: &str, y: &str, z: &str) -> DiagramSum {
        let mut out = LinComb::zero(UNBOUNDED);
        for (d, c) in self.terms.terms() {
            let nd = d.map_legs(|l| match (l.name(), l.is_dual()) {
                ("x", true) => dvar(x),
                ("y", true) => dvar(y),
                _ => var(z),
            });
            out.add_term(&nd, c.clone());
        }
        out
    }

    /// The coefficient `c` with `Λ` restricted to the grade of `tree` equal
    /// to `c · tree` modulo AS/IHX, or `None` if not proportional.
    pub fn coefficient(&self, tree: &Diagram<VarLabel>) -> Option<Rational> {
        let t = reduce(&LinComb::from_diagram(tree.clone(), Rational::one(), UNBOUNDED));
        let grade = crate::reduce::Grade::of(tree);
        let part = self.terms.filter(|d| crate::reduce::Grade::of(d) == grade);
        let (d0, c0) = t.terms().next()?;
        let ratio = part.coeff(d0) / c0;
        (t.scaled(&ratio) == part).then_some(ratio)
    }
}

/// Computes `Λ` up to `n` leaves, bypassing the cache used by [`bch_trees`].
pub fn compute_bch(n: usize) -> BchSeries {
    let letters = [dvar("x"), dvar("y")];
    let mut s = LinComb::zero(UNBOUNDED);
    for (w, c) in free_bch(n) {
        // Dynkin: a homogeneous Lie element of degree k is 1/k times the
        // left-normed bracketing of its words
        let word: Vec<VarLabel> = w.iter().map(|&l| letters[l as usize].clone()).collect();
        let k = Rational::from_integer((w.len() as i64).into());
        s.add_term(&Bracket::left_normed(&word).to_tree(var("z")), c / k);
    }
    BchSeries {
        degree: n,
        terms: reduce(&s),
    }
}

/// `Λ` truncated at `n` leaves; `n` may not exceed `max`.
pub fn bch_trees_with_max(n: usize, max: usize) -> Result<Arc<BchSeries>> {
    if n > max {
        return Err(Error::Precondition(format!("BCH degree {n} above the maximum {max}")));
    }
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<BchSeries>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().unwrap().get(&n) {
        return Ok(s.clone());
    }
    let s = Arc::new(compute_bch(n));
    Ok(cache.lock().unwrap().entry(n).or_insert(s).clone())
}

/// `Λ` truncated at `n ≤ DEFAULT_MAX_DEGREE` leaves.
pub fn bch_trees(n: usize) -> Result<Arc<BchSeries>> {
    bch_trees_with_max(n, DEFAULT_MAX_DEGREE)
}

fn dual_legs(d: &Diagram<VarLabel>) -> usize {
    d.legs().iter().filter(|l| l.is_dual()).count()
}

/// `exp` under disjoint union, keeping only forests with at most `max`
/// dual legs. Every term of `s` must have a dual leg.
fn exp_bounded(s: &DiagramSum, max: usize) -> DiagramSum {
    let mut out = LinComb::one(UNBOUNDED);
    let mut power = LinComb::one(UNBOUNDED);
    let mut n = 1i64;
    loop {
        power = disjoint_union(&power, s)
            .filter(|d| dual_legs(d) <= max)
            .scaled(&Rational::new(1.into(), n.into()));
        if power.is_zero() {
            return out;
        }
        out.add_assign_scaled(&power, &Rational::one());
        n += 1;
    }
}

fn check_merge_input(c: &DiagramSum, x: &str, y: &str, z: &str) -> Result<usize> {
    let mut max = 0;
    for (d, _) in c.terms() {
        if d.legs().iter().any(|l| l.is_dual()) {
            return Err(Error::Precondition("merging needs primal labels".into()));
        }
        if z != x && z != y && d.legs().iter().any(|l| l.name() == z) {
            return Err(Error::Precondition(format!("label {z} already in use")));
        }
        max = max.max(d.legs().iter().filter(|l| l.name() == x || l.name() == y).count());
    }
    Ok(max)
}

/// `⟨exp Λ, C⟩` over `x, y`: merges the `x` and `y` legs of `C` into `z`.
pub fn m_via_bch(c: &DiagramSum, x: &str, y: &str, z: &str) -> Result<DiagramSum> {
    let n = check_merge_input(c, x, y, z)?;
    let lambda = bch_trees_with_max(n, n)?.relabeled(x, y, z);
    let e = exp_bounded(&lambda, n).with_caps(c.caps());
    Ok(reduce(&pair(&e, c, &[var(x), var(y)])?))
}

/// `(exp d_BCH ⊣ C)/(x, y → z)`, where `d_BCH` is `Λ` without its struts.
pub fn m_via_operator(c: &DiagramSum, x: &str, y: &str, z: &str) -> Result<DiagramSum> {
    let n = check_merge_input(c, x, y, z)?;
    let d = d_bch(n, x, y, z)?;
    let e = exp_bounded(&d, n).with_caps(c.caps());
    let applied = apply(&e, c)?;
    let r = Relabeling::partial().rename(var(x), var(z)).rename(var(y), var(z));
    Ok(reduce(&relabel(&applied, &r)?))
}

/// `Λ` minus its two struts, with relabeled legs.
pub fn d_bch(n: usize, x: &str, y: &str, z: &str) -> Result<DiagramSum> {
    let lambda = bch_trees_with_max(n, n.max(1))?.relabeled(x, y, z);
    Ok(lambda.filter(|d| !d.is_strut()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn dx() -> Bracket {
        Bracket::leaf(dvar("x"))
    }
    fn dy() -> Bracket {
        Bracket::leaf(dvar("y"))
    }

    #[test]
    fn free_bch_low_degree() {
        let f = free_bch(2);
        assert_eq!(f[&vec![0]], rat(1, 1));
        assert_eq!(f[&vec![0, 1]], rat(1, 2));
        assert_eq!(f[&vec![1, 0]], rat(-1, 2));
        assert!(!f.contains_key(&vec![0, 0]));
    }

    #[test]
    fn degree_one_is_two_struts() {
        let s = bch_trees(1).unwrap();
        let mut expect = LinComb::zero(UNBOUNDED);
        expect.add_term(&Diagram::strut(dvar("x"), var("z")), rat(1, 1));
        expect.add_term(&Diagram::strut(dvar("y"), var("z")), rat(1, 1));
        assert_eq!(s.terms, expect);
    }

    #[test]
    fn bracket_coefficient() {
        let s = bch_trees(2).unwrap();
        let t = Bracket::br(dx(), dy()).to_tree(var("z"));
        assert_eq!(s.coefficient(&t), Some(rat(1, 2)));
    }

    #[test]
    fn above_max_is_an_error() {
        assert!(bch_trees(DEFAULT_MAX_DEGREE + 1).is_err());
    }

    #[test]
    fn every_term_is_a_tree() {
        let s = bch_trees(4).unwrap();
        for (d, _) in s.terms.terms() {
            assert_eq!(d.components().len(), 1);
            assert_eq!(d.legs().len(), d.num_vertices() + 2);
            assert_eq!(d.legs().iter().filter(|l| !l.is_dual()).count(), 1);
        }
    }
}
