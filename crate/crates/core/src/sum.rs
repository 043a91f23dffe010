//! Truncated exact-rational linear combinations of canonical diagrams.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::canon::canonicalize;
use crate::diagram::Diagram;
use crate::label::{Attach, LegKey, VarLabel};
use crate::Rational;

/// Truncation caps. Internal degree is stored as a count of trivalent
/// vertices (twice the degree), so half-integer degrees stay integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Caps {
    pub max_vertices: usize,
    pub max_legs: usize,
}

impl Caps {
    pub const fn new(max_vertices: usize, max_legs: usize) -> Self {
        Caps { max_vertices, max_legs }
    }

    /// Caps from an internal degree bound (in whole or half units, given as
    /// a vertex count is `2 * degree`).
    pub const fn degree(max_degree: usize, max_legs: usize) -> Self {
        Caps::new(2 * max_degree, max_legs)
    }

    pub fn meet(self, other: Caps) -> Caps {
        Caps::new(
            self.max_vertices.min(other.max_vertices),
            self.max_legs.min(other.max_legs),
        )
    }

    pub fn admits<K>(&self, d: &Diagram<K>) -> bool {
        d.vertices as usize <= self.max_vertices && d.legs.len() <= self.max_legs
    }
}

impl Default for Caps {
    fn default() -> Self {
        Caps::degree(3, 12)
    }
}

/// A finite linear combination of canonical diagrams. Terms never carry a
/// zero coefficient or an AS-zero diagram, and all respect the caps; terms
/// dropped for exceeding the caps set the `truncated` marker.
///
/// Equality compares the terms only.
#[derive(Clone)]
pub struct LinComb<K> {
    terms: BTreeMap<Diagram<K>, Rational>,
    caps: Caps,
    truncated: bool,
}

impl<K: Ord> PartialEq for LinComb<K> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<K: Ord> Eq for LinComb<K> {}

pub type DiagramSum = LinComb<VarLabel>;
pub type SkeletonSum = LinComb<Attach>;

impl<K: LegKey> LinComb<K> {
    pub fn zero(caps: Caps) -> Self {
        LinComb {
            terms: BTreeMap::new(),
            caps,
            truncated: false,
        }
    }

    /// The empty diagram with coefficient 1.
    pub fn one(caps: Caps) -> Self {
        Self::from_diagram(Diagram::empty(), Rational::one(), caps)
    }

    pub fn from_diagram(d: Diagram<K>, c: Rational, caps: Caps) -> Self {
        let mut s = Self::zero(caps);
        s.add_term(&d, c);
        s
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn mark_truncated(&mut self) {
        self.truncated = true;
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Diagram<K>, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Diagram<K>, Rational)> {
        self.terms.into_iter()
    }

    /// Adds `c · d`, canonicalizing `d` first.
    pub fn add_term(&mut self, d: &Diagram<K>, c: Rational) {
        if c.is_zero() {
            return;
        }
        if !self.caps.admits(d) {
            self.truncated = true;
            return;
        }
        let cf = canonicalize(d);
        if cf.is_zero() {
            return;
        }
        let c = if cf.sign < 0 { -c } else { c };
        self.add_canonical(cf.diagram, c);
    }

    /// Adds a term whose diagram is already canonical.
    pub(crate) fn add_canonical(&mut self, d: Diagram<K>, c: Rational) {
        if c.is_zero() {
            return;
        }
        if !self.caps.admits(&d) {
            self.truncated = true;
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(d) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Coefficient of `d` (after canonicalization, sign included).
    pub fn coeff(&self, d: &Diagram<K>) -> Rational {
        let cf = canonicalize(d);
        if cf.is_zero() {
            return Rational::zero();
        }
        let c = self.terms.get(&cf.diagram).cloned().unwrap_or_else(Rational::zero);
        if cf.sign < 0 {
            -c
        } else {
            c
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: &Rational) {
        self.truncated |= other.truncated;
        for (d, x) in &other.terms {
            self.add_canonical(d.clone(), x * c);
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.caps = self.caps.meet(other.caps);
        s.retain_caps();
        s.add_assign_scaled(other, &Rational::one());
        s
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.caps = self.caps.meet(other.caps);
        s.retain_caps();
        s.add_assign_scaled(other, &-Rational::one());
        s
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut s = Self::zero(self.caps);
        s.add_assign_scaled(self, c);
        s
    }

    pub fn with_caps(&self, caps: Caps) -> Self {
        let mut s = self.clone();
        s.caps = caps;
        s.retain_caps();
        s
    }

    fn retain_caps(&mut self) {
        let caps = self.caps;
        let before = self.terms.len();
        self.terms.retain(|d, _| caps.admits(d));
        if self.terms.len() != before {
            self.truncated = true;
        }
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Diagram<K>) -> bool) -> Self {
        let mut s = Self::zero(self.caps);
        s.truncated = self.truncated;
        for (d, c) in &self.terms {
            if keep(d) {
                s.terms.insert(d.clone(), c.clone());
            }
        }
        s
    }

    /// Coefficient of the empty diagram.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Diagram::empty())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Applies a linear map defined on diagrams.
    pub fn map_linear<L: LegKey>(
        &self,
        caps: Caps,
        mut f: impl FnMut(&Diagram<K>) -> crate::Result<LinComb<L>>,
    ) -> crate::Result<LinComb<L>> {
        let mut out = LinComb::zero(caps);
        out.truncated = self.truncated;
        for (d, c) in &self.terms {
            let img = f(d)?;
            out.add_assign_scaled(&img, c);
        }
        Ok(out)
    }
}

impl<K: LegKey> fmt::Debug for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().map(|(d, c)| (c.to_string(), d)))
            .finish()?;
        if self.truncated {
            write!(f, " (truncated)")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::var;
    use crate::rat;

    #[test]
    fn cancellation_removes_term() {
        let caps = Caps::default();
        let d = Diagram::tripod(var("a"), var("b"), var("c"));
        let flipped = Diagram::tripod(var("a"), var("c"), var("b"));
        let mut s = LinComb::zero(caps);
        s.add_term(&d, rat(1, 1));
        s.add_term(&flipped, rat(1, 1));
        assert!(s.is_zero());
    }

    #[test]
    fn above_cap_sets_marker() {
        let s = LinComb::from_diagram(
            Diagram::tripod(var("a"), var("b"), var("c")),
            rat(1, 1),
            Caps::new(0, 12),
        );
        assert!(s.is_zero());
        assert!(s.truncated());
    }
}
