//! Reduction modulo IHX.
//!
//! Relations never change the number of vertices or the leg labels, and on
//! a disjoint union they act on one component at a time, so the quotient is
//! the symmetric algebra on the connected quotient. [`reduce`] therefore
//! reduces every connected component separately: the component's IHX class
//! (everything reachable from it by IHX moves) is generated, its relation
//! vectors are put in reduced row echelon form with the canonical diagrams
//! in increasing order as columns, and the non-pivot diagrams span the
//! quotient. Results are cached per class.

use std::any::{Any, TypeId};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::canon::{canonicalize, CanonicalForm};
use crate::diagram::Diagram;
use crate::label::{LegKey, VarLabel};
use crate::linalg::{rref, SparseRow};
use crate::sum::{Caps, DiagramSum, LinComb};
use crate::Rational;

/// A relation among (not necessarily canonical) diagrams: Σ cᵢ dᵢ = 0.
pub type Relation<K> = Vec<(Diagram<K>, Rational)>;

/// The IHX relations at every internal edge joining two distinct vertices,
/// written as T₁ + T₂ + T₃ = 0.
pub fn ihx_relations<K: LegKey>(d: &Diagram<K>) -> Vec<Relation<K>> {
    let mut out = Vec::new();
    for (hu, hv) in d.internal_edges() {
        if hu / 3 == hv / 3 {
            continue;
        }
        let [t2, t3] = ihx_partners(d, hu, hv);
        out.push(vec![
            (d.clone(), Rational::one()),
            (t2, Rational::one()),
            (t3, Rational::one()),
        ]);
    }
    out
}

/// The two diagrams completing `d` to an IHX triple at the edge `hu`–`hv`.
/// With `u = (a, b, e)` and `v = (e, c, d)` in cyclic order, the ends
/// `a, b, c` are rotated through the three positions.
pub fn ihx_partners<K: LegKey>(d: &Diagram<K>, hu: usize, hv: usize) -> [Diagram<K>; 2] {
    let (u, su) = (hu / 3, hu % 3);
    let (v, sv) = (hv / 3, hv % 3);
    let sa = 3 * u + (su + 1) % 3;
    let sb = 3 * u + (su + 2) % 3;
    let sc = 3 * v + (sv + 1) % 3;
    let n = d.num_half_edges();
    let id: Vec<usize> = (0..n).collect();
    let mut p2 = id.clone();
    p2[sb] = sa;
    p2[sc] = sb;
    p2[sa] = sc;
    let mut p3 = id;
    p3[sc] = sa;
    p3[sa] = sb;
    p3[sb] = sc;
    [d.permute_slots(&p2), d.permute_slots(&p3)]
}

/// Generator of relations for a class closure.
pub type RelationGen<K> = fn(&Diagram<K>) -> Vec<Relation<K>>;
/// Canonical form used to identify diagrams in a class.
pub type Canonizer<K> = fn(&Diagram<K>) -> CanonicalForm<K>;

type ClassMap<K> = Mutex<HashMap<Diagram<K>, Arc<LinComb<K>>>>;
type AnyCaches = Mutex<HashMap<(TypeId, &'static str), Arc<dyn Any + Send + Sync>>>;

fn class_cache<K: LegKey>(family: &'static str) -> Arc<ClassMap<K>> {
    static CACHES: OnceLock<AnyCaches> = OnceLock::new();
    let mut all = CACHES.get_or_init(Default::default).lock().unwrap();
    let entry = all
        .entry((TypeId::of::<K>(), family))
        .or_insert_with(|| Arc::new(ClassMap::<K>::default()) as Arc<dyn Any + Send + Sync>)
        .clone();
    drop(all);
    entry.downcast::<ClassMap<K>>().expect("cache type")
}

fn unbounded() -> Caps {
    Caps::new(usize::MAX, usize::MAX)
}

/// Normal form of a canonical diagram modulo the relations produced by
/// `gen`, computed over the whole class of `d` and cached.
///
/// The result is deterministic (reduced row echelon forms are unique), so
/// racing threads that both compute a class insert identical values.
pub fn class_normal_form<K: LegKey>(
    family: &'static str,
    d: &Diagram<K>,
    gen: RelationGen<K>,
    canon: Canonizer<K>,
) -> Arc<LinComb<K>> {
    let cache = class_cache::<K>(family);
    if let Some(r) = cache.lock().unwrap().get(d) {
        return r.clone();
    }
    let forms = close_class(d, gen, canon);
    let mut map = cache.lock().unwrap();
    for (k, v) in forms {
        map.entry(k).or_insert(v);
    }
    map[d].clone()
}

/// Builds the class of `d`, row-reduces its relations and returns the
/// normal form of every member.
fn close_class<K: LegKey>(
    d: &Diagram<K>,
    gen: RelationGen<K>,
    canon: Canonizer<K>,
) -> Vec<(Diagram<K>, Arc<LinComb<K>>)> {
    let mut seen: BTreeSet<Diagram<K>> = BTreeSet::new();
    let mut queue = vec![d.clone()];
    seen.insert(d.clone());
    let mut relations: Vec<BTreeMap<Diagram<K>, Rational>> = Vec::new();
    while let Some(x) = queue.pop() {
        for rel in gen(&x) {
            let mut row: BTreeMap<Diagram<K>, Rational> = BTreeMap::new();
            for (t, c) in rel {
                let cf = canon(&t);
                if cf.is_zero() {
                    continue;
                }
                if seen.insert(cf.diagram.clone()) {
                    queue.push(cf.diagram.clone());
                }
                let c = if cf.sign < 0 { -c } else { c };
                let e = row.entry(cf.diagram).or_insert_with(Rational::zero);
                *e += c;
            }
            row.retain(|_, c| !c.is_zero());
            if !row.is_empty() {
                relations.push(row);
            }
        }
    }
    let cols: Vec<Diagram<K>> = seen.into_iter().collect();
    let index: HashMap<&Diagram<K>, usize> = cols.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let rows: Vec<SparseRow> = relations
        .into_iter()
        .map(|r| r.into_iter().map(|(k, c)| (index[&k], c)).collect())
        .collect();
    let pivots: HashMap<usize, SparseRow> = rref(rows).into_iter().collect();
    cols.iter()
        .enumerate()
        .map(|(i, x)| {
            let mut nf = LinComb::zero(unbounded());
            match pivots.get(&i) {
                Some(row) => {
                    for (&j, c) in row {
                        if j != i {
                            nf.add_canonical(cols[j].clone(), -c.clone());
                        }
                    }
                }
                None => nf.add_canonical(x.clone(), Rational::one()),
            }
            (x.clone(), Arc::new(nf))
        })
        .collect()
}

/// Normal form of a canonical connected diagram modulo IHX.
pub fn reduce_connected<K: LegKey>(d: &Diagram<K>) -> Arc<LinComb<K>> {
    class_normal_form("ihx", d, ihx_relations::<K>, canonicalize::<K>)
}

/// Splits a diagram into canonical connected components and the product of
/// their orientation signs (0 if some component vanishes).
pub fn canonical_components<K: LegKey>(d: &Diagram<K>) -> (Vec<Diagram<K>>, i8) {
    let mut sign = 1i8;
    let mut comps = Vec::new();
    for hs in d.components() {
        let cf = canonicalize(&d.sub_diagram(&hs));
        if cf.is_zero() {
            return (Vec::new(), 0);
        }
        sign *= cf.sign;
        comps.push(cf.diagram);
    }
    comps.sort();
    (comps, sign)
}

/// Reduces every term modulo IHX (AS is already built into the canonical
/// forms). Linear and idempotent.
pub fn reduce_generic<K: LegKey>(s: &LinComb<K>) -> LinComb<K> {
    let mut out = LinComb::zero(s.caps());
    if s.truncated() {
        out.mark_truncated();
    }
    for (d, c) in s.terms() {
        let (comps, sign) = canonical_components(d);
        if sign == 0 {
            continue;
        }
        // multiply out the normal forms of the components
        let mut acc: Vec<(Diagram<K>, Rational)> = vec![(Diagram::empty(), c * Rational::from_integer(sign.into()))];
        for comp in &comps {
            let nf = reduce_connected(comp);
            let mut next = Vec::with_capacity(acc.len() * nf.len());
            for (a, ca) in &acc {
                for (b, cb) in nf.terms() {
                    next.push((a.disjoint_union(b), ca * cb));
                }
            }
            acc = next;
        }
        for (x, k) in acc {
            out.add_term(&x, k);
        }
    }
    out
}

/// Reduces a diagram sum modulo AS/IHX.
pub fn reduce(s: &DiagramSum) -> DiagramSum {
    reduce_generic(s)
}

/// Internal degree in vertices together with the sorted leg labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grade {
    pub vertices: usize,
    pub legs: Vec<VarLabel>,
}

impl Grade {
    pub fn new(vertices: usize, mut legs: Vec<VarLabel>) -> Self {
        legs.sort();
        Grade { vertices, legs }
    }

    pub fn of(d: &Diagram<VarLabel>) -> Self {
        Grade::new(d.num_vertices(), d.legs().to_vec())
    }
}

/// Quotient basis of one grade: the listed diagrams modulo a family of
/// relations.
#[derive(Debug)]
pub struct GradedBasis<K: LegKey = VarLabel, G = Grade> {
    pub grade: G,
    /// All canonical diagrams of the grade, in column order.
    pub diagrams: Vec<Diagram<K>>,
    /// The non-pivot diagrams.
    pub basis: Vec<Diagram<K>>,
    pivots: HashMap<usize, SparseRow>,
    index: HashMap<Diagram<K>, usize>,
}

impl GradedBasis {
    /// Builds the AS/IHX basis from an explicit list of canonical diagrams;
    /// the order of `diagrams` only affects the coordinates, not the
    /// dimension.
    pub fn from_diagrams(grade: Grade, diagrams: Vec<Diagram<VarLabel>>) -> Self {
        GradedBasis::from_relations(grade, diagrams, ihx_relations, canonicalize)
    }
}

impl<K: LegKey, G> GradedBasis<K, G> {
    /// `diagrams` must be closed under the relations produced by `gen`.
    pub fn from_relations(grade: G, diagrams: Vec<Diagram<K>>, gen: RelationGen<K>, canon: Canonizer<K>) -> Self {
        let index: HashMap<Diagram<K>, usize> = diagrams.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        let mut rows = Vec::new();
        for d in &diagrams {
            for rel in gen(d) {
                let mut row = SparseRow::new();
                for (t, c) in rel {
                    let cf = canon(&t);
                    if cf.is_zero() {
                        continue;
                    }
                    let j = *index.get(&cf.diagram).expect("relation leaves the grade");
                    let e = row.entry(j).or_insert_with(Rational::zero);
                    *e += if cf.sign < 0 { -c } else { c };
                }
                row.retain(|_, c| !c.is_zero());
                rows.push(row);
            }
        }
        let pivots: HashMap<usize, SparseRow> = rref(rows).into_iter().collect();
        let basis = diagrams
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivots.contains_key(i))
            .map(|(_, d)| d.clone())
            .collect();
        GradedBasis {
            grade,
            diagrams,
            basis,
            pivots,
            index,
        }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Rewrites the terms of `s` of this grade in the basis; other terms
    /// are dropped. Terms must be canonical for the same canonizer.
    pub fn reduce(&self, s: &LinComb<K>) -> LinComb<K> {
        let mut out = LinComb::zero(s.caps());
        for (d, c) in s.terms() {
            let Some(&i) = self.index.get(d) else {
                continue;
            };
            match self.pivots.get(&i) {
                Some(row) => {
                    for (&j, x) in row {
                        if j != i {
                            out.add_canonical(self.diagrams[j].clone(), -(c * x));
                        }
                    }
                }
                None => out.add_canonical(d.clone(), c.clone()),
            }
        }
        out
    }

    /// Coordinates of `s` (restricted to this grade) in the basis.
    pub fn coordinates(&self, s: &LinComb<K>) -> Vec<Rational> {
        let r = self.reduce(s);
        let map: HashMap<&Diagram<K>, &Rational> = r.terms().collect();
        self.basis
            .iter()
            .map(|b| map.get(b).map_or_else(Rational::zero, |c| (*c).clone()))
            .collect()
    }
}

/// Enumerates the grade and builds its quotient basis, once per grade.
pub fn build_basis(grade: &Grade) -> crate::Result<Arc<GradedBasis>> {
    type Cell = Arc<OnceLock<Arc<GradedBasis>>>;
    static CACHE: OnceLock<Mutex<HashMap<Grade, Cell>>> = OnceLock::new();
    let diagrams = crate::enumerate::enumerate_diagrams(grade, Caps::default())?;
    let cell = CACHE
        .get_or_init(Default::default)
        .lock()
        .unwrap()
        .entry(grade.clone())
        .or_default()
        .clone();
    Ok(cell
        .get_or_init(|| Arc::new(GradedBasis::from_diagrams(grade.clone(), diagrams)))
        .clone())
}
