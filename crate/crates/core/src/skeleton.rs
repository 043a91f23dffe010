//! Diagrams on directed strands, modulo STU.
//!
//! A skeleton diagram is a `Diagram<Attach>`: its univalent ends are
//! attachment points, keyed by strand and position. Positions on each
//! strand are always `0..k`. Closed strands are compared up to cyclic
//! rotation. The STU relation is `S − T = U`, where `S` has the adjacent
//! points `p, q` in this order, `T` has them swapped, and `U` joins the two
//! edges at a new vertex with cyclic order `(p-edge, q-edge, strand)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::canon::{canonicalize, CanonicalForm};
use crate::diagram::{Diagram, End};
use crate::enumerate::enumerate_with_legs;
use crate::error::{Error, Result};
use crate::label::{Attach, LegKey, VarLabel};
use crate::linalg::RatMatrix;
use crate::reduce::{build_basis, class_normal_form, ihx_relations, Grade, GradedBasis, Relation};
use crate::sum::{Caps, DiagramSum, LinComb, SkeletonSum};
use crate::Rational;

/// Edge-list view of a diagram, convenient for local surgery.
struct Graph<K> {
    nv: usize,
    legs: Vec<K>,
    edges: Vec<(End, End)>,
}

impl<K: LegKey> Graph<K> {
    fn of(d: &Diagram<K>) -> Self {
        let base = 3 * d.num_vertices();
        let end = |h: usize| {
            if h < base {
                End::Slot(h / 3, h % 3)
            } else {
                End::Leg(h - base)
            }
        };
        let edges = (0..d.num_half_edges())
            .filter(|&h| h < d.partner(h))
            .map(|h| (end(h), end(d.partner(h))))
            .collect();
        Graph {
            nv: d.num_vertices(),
            legs: d.legs().to_vec(),
            edges,
        }
    }

    /// Removes the edge at `e` and returns its other end.
    fn take_edge(&mut self, e: End) -> End {
        let i = self
            .edges
            .iter()
            .position(|&(a, b)| a == e || b == e)
            .expect("every end lies on an edge");
        let (a, b) = self.edges.swap_remove(i);
        if a == e {
            b
        } else {
            a
        }
    }

    fn remove_vertex(&mut self, w: usize) {
        let last = self.nv - 1;
        for (a, b) in self.edges.iter_mut() {
            for e in [a, b] {
                if let End::Slot(v, s) = *e {
                    debug_assert!(v != w);
                    if v == last {
                        *e = End::Slot(w, s);
                    }
                }
            }
        }
        self.nv -= 1;
    }

    fn remove_leg(&mut self, i: usize) {
        self.legs.remove(i);
        for (a, b) in self.edges.iter_mut() {
            for e in [a, b] {
                if let End::Leg(j) = *e {
                    debug_assert!(j != i);
                    if j > i {
                        *e = End::Leg(j - 1);
                    }
                }
            }
        }
    }

    fn build(self) -> Diagram<K> {
        Diagram::new(self.nv, self.legs, &self.edges).expect("surgery keeps diagrams well formed")
    }
}

/// Attachment points grouped by strand, each list ordered by position.
fn strands(d: &Diagram<Attach>) -> BTreeMap<(Arc<str>, bool), Vec<usize>> {
    let mut m: BTreeMap<(Arc<str>, bool), Vec<usize>> = BTreeMap::new();
    for (i, a) in d.legs().iter().enumerate() {
        m.entry((a.strand.clone(), a.closed)).or_default().push(i);
    }
    for v in m.values_mut() {
        v.sort_by_key(|&i| d.legs()[i].pos);
    }
    m
}

fn with_pos(d: &Diagram<Attach>, changes: &[(usize, u32)]) -> Diagram<Attach> {
    d.map_legs_indexed(|i, a| match changes.iter().find(|(j, _)| *j == i) {
        Some(&(_, p)) => Attach { pos: p, ..a.clone() },
        None => a.clone(),
    })
}

/// The `U` diagram of an adjacent pair `p, q` (legs of `d`), or `None` if
/// `p` and `q` are the two ends of one chord.
fn merge_pair(d: &Diagram<Attach>, p: usize, q: usize) -> Option<Diagram<Attach>> {
    let mut g = Graph::of(d);
    let x = g.take_edge(End::Leg(p));
    if x == End::Leg(q) {
        return None;
    }
    let y = g.take_edge(End::Leg(q));
    let w = g.nv;
    g.nv += 1;
    g.edges.push((End::Slot(w, 0), x));
    g.edges.push((End::Slot(w, 1), y));
    g.edges.push((End::Slot(w, 2), End::Leg(p)));
    let qpos = g.legs[q].pos;
    let strand = g.legs[q].strand.clone();
    for a in g.legs.iter_mut() {
        if a.strand == strand && a.pos > qpos {
            a.pos -= 1;
        }
    }
    g.remove_leg(q);
    Some(g.build())
}

/// Splits vertex `w`, whose slot `s` meets attachment leg `l`, into two
/// adjacent attachments; returns `(S, T)` with `S − T = d`.
fn split_vertex(d: &Diagram<Attach>, w: usize, s: usize, l: usize) -> Option<(Diagram<Attach>, Diagram<Attach>)> {
    let mut g = Graph::of(d);
    let a = (s + 1) % 3;
    let b = (s + 2) % 3;
    g.take_edge(End::Slot(w, s));
    let x = g.take_edge(End::Slot(w, a));
    if x == End::Slot(w, b) {
        return None;
    }
    let y = g.take_edge(End::Slot(w, b));
    let at = g.legs[l].clone();
    for c in g.legs.iter_mut() {
        if c.strand == at.strand && c.pos > at.pos {
            c.pos += 1;
        }
    }
    let q = g.legs.len();
    g.legs.push(Attach {
        pos: at.pos + 1,
        ..at.clone()
    });
    g.edges.push((End::Leg(l), x));
    g.edges.push((End::Leg(q), y));
    g.remove_vertex(w);
    let s_diag = g.build();
    let t_diag = with_pos(&s_diag, &[(l, at.pos + 1), (q, at.pos)]);
    Some((s_diag, t_diag))
}

/// STU relations in which `d` occurs as `S` or as `U`, together with the IHX
/// relations at its internal edges.
pub fn stu_relations(d: &Diagram<Attach>) -> Vec<Relation<Attach>> {
    let one = Rational::one();
    let mut out = Vec::new();
    for ((_, closed), pts) in strands(d) {
        let k = pts.len();
        let mut pairs: Vec<(usize, usize)> = (0..k.saturating_sub(1)).map(|i| (pts[i], pts[i + 1])).collect();
        if closed && k >= 2 {
            pairs.push((pts[k - 1], pts[0]));
        }
        for (p, q) in pairs {
            let (pp, qp) = (d.legs()[p].pos, d.legs()[q].pos);
            let t = with_pos(d, &[(p, qp), (q, pp)]);
            let mut rel = vec![(d.clone(), one.clone()), (t, -one.clone())];
            if let Some(u) = merge_pair(d, p, q) {
                rel.push((u, -one.clone()));
            }
            out.push(rel);
        }
    }
    let base = 3 * d.num_vertices();
    for h in 0..base {
        let p = d.partner(h);
        if p >= base {
            if let Some((s, t)) = split_vertex(d, h / 3, h % 3, p - base) {
                out.push(vec![(s, one.clone()), (t, -one.clone()), (d.clone(), -one.clone())]);
            }
        }
    }
    out.extend(ihx_relations(d));
    out
}

/// Canonical form that also minimizes over rotations of closed strands.
pub fn skeleton_canon(d: &Diagram<Attach>) -> CanonicalForm<Attach> {
    let closed: Vec<(Arc<str>, u32)> = strands(d)
        .into_iter()
        .filter(|((_, c), _)| *c)
        .map(|((s, _), v)| (s, v.len() as u32))
        .collect();
    if closed.is_empty() {
        return canonicalize(d);
    }
    let mut best: Option<CanonicalForm<Attach>> = None;
    let mut conflict = false;
    let mut shift = vec![0u32; closed.len()];
    loop {
        let r = d.map_legs(|a| match closed.iter().position(|(s, _)| a.closed && *s == a.strand) {
            Some(k) => Attach {
                pos: (a.pos + shift[k]) % closed[k].1,
                ..a.clone()
            },
            None => a.clone(),
        });
        let cf = canonicalize(&r);
        if cf.is_zero() {
            return cf;
        }
        match &best {
            Some(b) if b.diagram == cf.diagram => conflict |= b.sign != cf.sign,
            Some(b) if b.diagram < cf.diagram => {}
            _ => {
                best = Some(cf);
                conflict = false;
            }
        }
        let mut i = 0;
        while i < shift.len() {
            shift[i] += 1;
            if shift[i] < closed[i].1 {
                break;
            }
            shift[i] = 0;
            i += 1;
        }
        if i == shift.len() {
            break;
        }
    }
    let mut b = best.expect("at least one rotation");
    if conflict {
        b.sign = 0;
    }
    b
}

fn add_skel(s: &mut SkeletonSum, d: &Diagram<Attach>, c: Rational) {
    if c.is_zero() {
        return;
    }
    let cf = skeleton_canon(d);
    if cf.is_zero() {
        return;
    }
    s.add_canonical(cf.diagram, if cf.sign < 0 { -c } else { c });
}

/// Normal form modulo STU (and IHX, AS).
pub fn reduce_skeleton(a: &SkeletonSum) -> SkeletonSum {
    let mut out = LinComb::zero(a.caps());
    for (d, c) in a.terms() {
        let cf = skeleton_canon(d);
        if cf.is_zero() {
            continue;
        }
        let c = if cf.sign < 0 { -c.clone() } else { c.clone() };
        let nf = class_normal_form("stu", &cf.diagram, stu_relations, skeleton_canon);
        for (x, k) in nf.terms() {
            out.add_canonical(x.clone(), &c * k);
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn factorial(n: usize) -> Rational {
    Rational::from_integer((1..=n as i64).product::<i64>().into())
}

/// Calls `f` with one permutation per group, over all combinations.
fn for_each_arrangement(sizes: &[usize], f: &mut dyn FnMut(&[Vec<usize>])) {
    let perms: Vec<Vec<Vec<usize>>> = sizes.iter().map(|&k| permutations(k)).collect();
    let mut idx = vec![0usize; sizes.len()];
    loop {
        let choice: Vec<Vec<usize>> = idx.iter().enumerate().map(|(g, &i)| perms[g][i].clone()).collect();
        f(&choice);
        let mut g = 0;
        while g < idx.len() {
            idx[g] += 1;
            if idx[g] < perms[g].len() {
                break;
            }
            idx[g] = 0;
            g += 1;
        }
        if g == idx.len() {
            return;
        }
    }
}

/// The symmetrization map: each `x`-leg is placed on strand `x`, averaged
/// over all orders.
pub fn chi(b: &DiagramSum) -> Result<SkeletonSum> {
    let mut out = LinComb::zero(b.caps());
    for (d, c) in b.terms() {
        if let Some(l) = d.legs().iter().find(|l| l.is_dual()) {
            return Err(Error::Precondition(format!("χ needs primal labels, found {l}")));
        }
        let mut groups: BTreeMap<&VarLabel, Vec<usize>> = BTreeMap::new();
        for (i, l) in d.legs().iter().enumerate() {
            groups.entry(l).or_default().push(i);
        }
        let groups: Vec<(&VarLabel, Vec<usize>)> = groups.into_iter().collect();
        let sizes: Vec<usize> = groups.iter().map(|(_, v)| v.len()).collect();
        let mut w = c.clone();
        for &k in &sizes {
            w /= factorial(k);
        }
        for_each_arrangement(&sizes, &mut |perm| {
            let mut pos = vec![0u32; d.legs().len()];
            for (g, (_, legs)) in groups.iter().enumerate() {
                for (j, &leg) in legs.iter().enumerate() {
                    pos[leg] = perm[g][j] as u32;
                }
            }
            let a = d.map_legs_indexed(|i, l| Attach::new(l.name(), pos[i]));
            add_skel(&mut out, &a, w.clone());
        });
    }
    Ok(out)
}

/// Forgets the order along the strands.
fn forget(a: &Diagram<Attach>) -> Diagram<VarLabel> {
    a.map_legs(|x| VarLabel::primal(&x.strand))
}

type SigmaCache = Mutex<HashMap<Diagram<Attach>, Arc<DiagramSum>>>;

fn sigma_cache() -> &'static SigmaCache {
    static C: OnceLock<SigmaCache> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn unbounded() -> Caps {
    Caps::new(usize::MAX, usize::MAX)
}

/// σ of a canonical diagram on open strands: `forget(a)` plus the average,
/// over all reorderings `a_π`, of σ applied to the `U` terms that express
/// `a − a_π` through adjacent transpositions.
fn sigma_diagram(a: &Diagram<Attach>) -> Arc<DiagramSum> {
    if let Some(r) = sigma_cache().lock().unwrap().get(a) {
        return r.clone();
    }
    let mut acc = LinComb::zero(unbounded());
    acc.add_term(&forget(a), Rational::one());
    let groups: Vec<Vec<usize>> = strands(a).into_values().collect();
    let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let count: usize = sizes.iter().map(|&k| (1..=k).product::<usize>()).product();
    let w = Rational::new(1.into(), (count as i64).into());
    let mut corrections = LinComb::zero(unbounded());
    for_each_arrangement(&sizes, &mut |perm| {
        let mut cur = a.clone();
        for (g, legs) in groups.iter().enumerate() {
            // bubble the legs into the order given by the permutation
            let target: Vec<usize> = perm[g].iter().map(|&j| legs[j]).collect();
            let mut order = legs.clone();
            for (i, t) in target.iter().enumerate() {
                let mut j = order.iter().position(|x| x == t).unwrap();
                while j > i {
                    let (p, q) = (order[j - 1], order[j]);
                    if let Some(u) = merge_pair(&cur, p, q) {
                        corrections.add_term(&u, w.clone());
                    }
                    let (pp, qp) = (cur.legs()[p].pos, cur.legs()[q].pos);
                    cur = with_pos(&cur, &[(p, qp), (q, pp)]);
                    order.swap(j - 1, j);
                    j -= 1;
                }
            }
        }
    });
    for (u, c) in corrections.terms() {
        acc.add_assign_scaled(&sigma_diagram(u), c);
    }
    let r = Arc::new(crate::reduce(&acc));
    sigma_cache().lock().unwrap().entry(a.clone()).or_insert(r).clone()
}

/// The inverse of [`chi`], computed recursively through STU.
pub fn sigma(a: &SkeletonSum) -> Result<DiagramSum> {
    let mut out = LinComb::zero(a.caps());
    for (d, c) in a.terms() {
        if d.legs().iter().any(|x| x.closed) {
            return Err(Error::Precondition("σ is defined on open strands only".into()));
        }
        let cf = canonicalize(d);
        if cf.is_zero() {
            continue;
        }
        let c = if cf.sign < 0 { -c.clone() } else { c.clone() };
        out.add_assign_scaled(&sigma_diagram(&cf.diagram), &c);
    }
    Ok(out)
}

/// Joins strand `x` followed by strand `y` into strand `z`.
pub fn m_xyz(a: &SkeletonSum, x: &str, y: &str, z: &str) -> Result<SkeletonSum> {
    let mut out = LinComb::zero(a.caps());
    for (d, c) in a.terms() {
        if z != x && z != y && d.legs().iter().any(|l| &*l.strand == z) {
            return Err(Error::Precondition(format!("strand {z} already exists")));
        }
        let kx = d.legs().iter().filter(|l| &*l.strand == x).count() as u32;
        let nd = d.map_legs(|l| {
            if &*l.strand == x {
                Attach::new(z, l.pos)
            } else if &*l.strand == y {
                Attach::new(z, kx + l.pos)
            } else {
                l.clone()
            }
        });
        add_skel(&mut out, &nd, c.clone());
    }
    Ok(out)
}

/// Doubles strand `y` into `y` and `y2`: every attachment is lifted to
/// either strand, keeping relative order.
pub fn delta(a: &SkeletonSum, y: &str, y2: &str) -> Result<SkeletonSum> {
    let mut out = LinComb::zero(a.caps());
    for (d, c) in a.terms() {
        if d.legs().iter().any(|l| &*l.strand == y2) {
            return Err(Error::Precondition(format!("strand {y2} already exists")));
        }
        let mut ys: Vec<usize> = (0..d.legs().len()).filter(|&i| &*d.legs()[i].strand == y).collect();
        ys.sort_by_key(|&i| d.legs()[i].pos);
        for mask in 0u64..(1u64 << ys.len()) {
            let mut new = vec![None; d.legs().len()];
            let (mut n0, mut n1) = (0u32, 0u32);
            for (k, &i) in ys.iter().enumerate() {
                new[i] = Some(if mask >> k & 1 == 1 {
                    n1 += 1;
                    Attach::new(y2, n1 - 1)
                } else {
                    n0 += 1;
                    Attach::new(y, n0 - 1)
                });
            }
            let nd = d.map_legs_indexed(|i, l| new[i].clone().unwrap_or_else(|| l.clone()));
            add_skel(&mut out, &nd, c.clone());
        }
    }
    Ok(out)
}

/// Closes strand `x` into a circle.
pub fn close_strand(a: &SkeletonSum, x: &str) -> SkeletonSum {
    let mut out = LinComb::zero(a.caps());
    for (d, c) in a.terms() {
        let nd = d.map_legs(|l| {
            if &*l.strand == x {
                Attach {
                    closed: true,
                    ..l.clone()
                }
            } else {
                l.clone()
            }
        });
        add_skel(&mut out, &nd, c.clone());
    }
    out
}

/// A diagram with one distinguished leg.
#[derive(Clone, Debug)]
pub struct LinkRelationSymbol {
    pub base: Diagram<VarLabel>,
    pub star: usize,
}

impl LinkRelationSymbol {
    pub fn new(base: Diagram<VarLabel>, star: usize) -> Result<Self> {
        if star >= base.legs().len() || base.legs()[star].is_dual() {
            return Err(Error::Precondition("the starred leg must be a primal leg".into()));
        }
        Ok(LinkRelationSymbol { base, star })
    }

    pub fn flavor(&self) -> &VarLabel {
        &self.base.legs()[self.star]
    }
}

/// Sum over every other leg of the starred leg's flavor: the starred leg
/// is removed and its edge joined to a new vertex inserted on that leg's
/// edge, with cyclic order `(leg, starred edge, rest of the leg's edge)`.
pub fn expand_link_relation(r: &LinkRelationSymbol, caps: Caps) -> DiagramSum {
    let mut out = LinComb::zero(caps);
    let d = &r.base;
    for i in 0..d.legs().len() {
        if i == r.star || d.legs()[i] != *r.flavor() {
            continue;
        }
        let mut g = Graph::of(d);
        let ps = g.take_edge(End::Leg(r.star));
        if ps == End::Leg(i) {
            continue;
        }
        let qi = g.take_edge(End::Leg(i));
        let w = g.nv;
        g.nv += 1;
        g.edges.push((End::Slot(w, 0), End::Leg(i)));
        g.edges.push((End::Slot(w, 1), ps));
        g.edges.push((End::Slot(w, 2), qi));
        g.remove_leg(r.star);
        out.add_term(&g.build(), Rational::one());
    }
    out
}

/// Strands and degree `(vertices + attachments) / 2` of skeleton diagrams.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SkeletonGrade {
    pub strands: Vec<String>,
    pub degree: usize,
}

/// Distributions of `n` items over `k` boxes.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every B-grade with legs on `labels` and `vertices + legs = 2 · degree`.
pub fn b_grades(labels: &[&str], degree: usize) -> Vec<Grade> {
    let mut out = Vec::new();
    for v in 0..=2 * degree {
        let l = 2 * degree - v;
        if (3 * v + l) % 2 == 1 {
            continue;
        }
        for comp in compositions(l, labels.len()) {
            let legs = comp
                .iter()
                .enumerate()
                .flat_map(|(i, &k)| std::iter::repeat_n(VarLabel::primal(labels[i]), k))
                .collect();
            out.push(Grade::new(v, legs));
        }
    }
    out
}

/// Union of the AS/IHX bases of all B-grades of the given degree.
pub fn b_basis(labels: &[&str], degree: usize) -> Result<Vec<Diagram<VarLabel>>> {
    let mut out = Vec::new();
    for g in b_grades(labels, degree) {
        out.extend(build_basis(&g)?.basis.iter().cloned());
    }
    Ok(out)
}

/// All skeleton diagrams of a grade and their quotient modulo STU.
pub fn stu_basis(grade: &SkeletonGrade) -> Arc<GradedBasis<Attach, SkeletonGrade>> {
    type Cell = Arc<OnceLock<Arc<GradedBasis<Attach, SkeletonGrade>>>>;
    static CACHE: OnceLock<Mutex<HashMap<SkeletonGrade, Cell>>> = OnceLock::new();
    let cell = CACHE
        .get_or_init(Default::default)
        .lock()
        .unwrap()
        .entry(grade.clone())
        .or_default()
        .clone();
    cell.get_or_init(|| {
        let d = grade.degree;
        let mut all = BTreeSet::new();
        for v in 0..=2 * d {
            let l = 2 * d - v;
            if (3 * v + l) % 2 == 1 {
                continue;
            }
            for comp in compositions(l, grade.strands.len()) {
                let legs: Vec<Attach> = comp
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &k)| (0..k as u32).map(move |p| (i, p)))
                    .map(|(i, p)| Attach::new(&grade.strands[i], p))
                    .collect();
                all.extend(enumerate_with_legs(v, &legs));
            }
        }
        Arc::new(GradedBasis::from_relations(
            grade.clone(),
            all.into_iter().collect(),
            stu_relations,
            skeleton_canon,
        ))
    })
    .clone()
}

/// σ on one grade by inverting the matrix of χ between the B-basis and the
/// STU basis.
pub struct SigmaByInversion {
    b_basis: Vec<Diagram<VarLabel>>,
    a_basis: Arc<GradedBasis<Attach, SkeletonGrade>>,
    inverse: RatMatrix,
}

impl SigmaByInversion {
    pub fn new(grade: &SkeletonGrade) -> Result<Self> {
        let labels: Vec<&str> = grade.strands.iter().map(String::as_str).collect();
        let b = b_basis(&labels, grade.degree)?;
        let a = stu_basis(grade);
        if a.dimension() != b.len() {
            return Err(Error::Internal(format!(
                "χ is not square: {} vs {}",
                a.dimension(),
                b.len()
            )));
        }
        let n = b.len();
        let mut m = RatMatrix::zeros(n, n);
        for (j, d) in b.iter().enumerate() {
            let img = chi(&LinComb::from_diagram(d.clone(), Rational::one(), unbounded()))?;
            for (i, c) in a.coordinates(&img).into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        let inverse = m.inverse().map_err(|_| Error::Internal("χ is not invertible".into()))?;
        Ok(SigmaByInversion {
            b_basis: b,
            a_basis: a,
            inverse,
        })
    }

    pub fn a_basis(&self) -> &GradedBasis<Attach, SkeletonGrade> {
        &self.a_basis
    }

    pub fn b_basis(&self) -> &[Diagram<VarLabel>] {
        &self.b_basis
    }

    pub fn apply(&self, a: &SkeletonSum) -> DiagramSum {
        let coords = self.a_basis.coordinates(a);
        let mut out = LinComb::zero(a.caps());
        for (j, b) in self.b_basis.iter().enumerate() {
            let mut c = Rational::zero();
            for (i, x) in coords.iter().enumerate() {
                c += &self.inverse[(j, i)] * x;
            }
            out.add_canonical(b.clone(), c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::var;
    use crate::rat;

    fn one(d: Diagram<VarLabel>) -> DiagramSum {
        LinComb::from_diagram(d, rat(1, 1), Caps::default())
    }

    #[test]
    fn chi_of_struts() {
        let a = chi(&one(Diagram::strut(var("x"), var("e")))).unwrap();
        assert_eq!(a.len(), 1);
        let a = chi(&one(Diagram::strut(var("x"), var("x")))).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.terms().next().unwrap().1, &rat(1, 1));
    }

    #[test]
    fn sigma_of_chord() {
        let a = chi(&one(Diagram::strut(var("x"), var("e")))).unwrap();
        assert_eq!(sigma(&a).unwrap(), one(Diagram::strut(var("x"), var("e"))));
    }

    #[test]
    fn stu_triple_reduces_to_zero() {
        let d = crate::grammar::parse_skeleton("S[strand x: p1,p2; strand y: p3,p4; edges p1-p3; p2-p4]").unwrap();
        for rel in stu_relations(&d) {
            let mut s = LinComb::zero(Caps::default());
            for (t, c) in rel {
                add_skel(&mut s, &t, c);
            }
            assert!(reduce_skeleton(&s).is_zero());
        }
    }

    #[test]
    fn one_strand_degree_one() {
        let g = SkeletonGrade {
            strands: vec!["x".into()],
            degree: 1,
        };
        // the chord and the theta graph
        assert_eq!(stu_basis(&g).dimension(), 2);
        assert_eq!(b_basis(&["x"], 1).unwrap().len(), 2);
    }

    #[test]
    fn sigma_inverts_chi_in_low_degree() {
        for (strands, degree) in [(vec!["x"], 2), (vec!["x", "y"], 2)] {
            let g = SkeletonGrade {
                strands: strands.iter().map(|s| s.to_string()).collect(),
                degree,
            };
            let inv = SigmaByInversion::new(&g).unwrap();
            for a in inv.a_basis().basis.iter() {
                let s = LinComb::from_diagram(a.clone(), rat(1, 1), Caps::new(12, 24));
                let lhs = sigma(&s).unwrap();
                let rhs = crate::reduce(&inv.apply(&s));
                assert_eq!(crate::reduce(&lhs), rhs, "{a:?}");
                let back = chi(&lhs).unwrap();
                assert!(reduce_skeleton(&back.minus(&s)).is_zero());
            }
        }
    }

    #[test]
    fn delta_lifts() {
        let a = chi(&one(Diagram::strut(var("y"), var("e")))).unwrap();
        assert_eq!(delta(&a, "y", "w").unwrap().len(), 2);
        let b = chi(&one(Diagram::strut(var("x"), var("e")))).unwrap();
        assert_eq!(delta(&b, "y", "w").unwrap().len(), 1);
    }

    #[test]
    fn merging_chord_to_z() {
        let a = chi(&one(Diagram::strut(var("x"), var("y")))).unwrap();
        let m = m_xyz(&a, "x", "y", "z").unwrap();
        let expect = chi(&one(Diagram::strut(var("z"), var("z")))).unwrap();
        assert_eq!(m, expect);
    }
}
