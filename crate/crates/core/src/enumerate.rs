//! Enumeration of all diagrams of a grade, one per AS orbit.

use std::collections::BTreeSet;

use crate::canon::canonicalize;
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::label::{LegKey, VarLabel};
use crate::reduce::Grade;
use crate::sum::Caps;

/// All nonzero canonical diagrams with `grade.vertices` trivalent vertices
/// and the given legs, sorted.
///
/// Perfect matchings of the half-edges are generated by always pairing the
/// first free half-edge. Candidates that differ by a symmetry of the partial
/// matching are skipped: untouched vertices are interchangeable (and
/// rotating one is trivial), free legs with equal labels are
/// interchangeable, and the two free slots of a vertex with one used slot
/// differ by a reflection, which only changes the sign. Self-loops at a
/// vertex are never generated since such diagrams vanish.
pub fn enumerate_diagrams(grade: &Grade, caps: Caps) -> Result<Vec<Diagram<VarLabel>>> {
    if grade.vertices > caps.max_vertices || grade.legs.len() > caps.max_legs {
        return Err(Error::AboveCaps(format!(
            "grade with {} vertices and {} legs exceeds caps",
            grade.vertices,
            grade.legs.len()
        )));
    }
    Ok(enumerate_with_legs(grade.vertices, &grade.legs))
}

/// All nonzero canonical diagrams with `v` vertices and exactly the given
/// legs, sorted. Legs with equal keys are interchangeable.
pub fn enumerate_with_legs<K: LegKey>(v: usize, legs: &[K]) -> Vec<Diagram<K>> {
    let n = 3 * v + legs.len();
    let mut found = BTreeSet::new();
    if n % 2 == 1 {
        return Vec::new();
    }
    let mut st = Search {
        v,
        legs,
        partner: vec![u32::MAX; n],
        found: &mut found,
    };
    st.run();
    found.into_iter().collect()
}

struct Search<'a, K> {
    v: usize,
    legs: &'a [K],
    partner: Vec<u32>,
    found: &'a mut BTreeSet<Diagram<K>>,
}

impl<K: LegKey> Search<'_, K> {
    fn free(&self, h: usize) -> bool {
        self.partner[h] == u32::MAX
    }

    fn run(&mut self) {
        let Some(h) = (0..self.partner.len()).find(|&h| self.free(h)) else {
            let d = Diagram {
                vertices: self.v as u32,
                legs: self.legs.to_vec(),
                partner: self.partner.clone(),
            };
            let cf = canonicalize(&d);
            if !cf.is_zero() {
                self.found.insert(cf.diagram);
            }
            return;
        };
        for g in self.candidates(h) {
            self.partner[h] = g as u32;
            self.partner[g] = h as u32;
            self.run();
            self.partner[h] = u32::MAX;
            self.partner[g] = u32::MAX;
        }
    }

    fn candidates(&self, h: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let hv = (h < 3 * self.v).then_some(h / 3);
        let mut took_untouched = false;
        for w in 0..self.v {
            if Some(w) == hv {
                continue;
            }
            let free: Vec<usize> = (0..3).map(|s| 3 * w + s).filter(|&x| self.free(x)).collect();
            match free.len() {
                3 if !took_untouched => {
                    took_untouched = true;
                    out.push(free[0]);
                }
                3 => {}
                2 => out.push(free[0]),
                1 => out.push(free[0]),
                _ => {}
            }
        }
        let base = 3 * self.v;
        let mut labels_seen: Vec<&K> = Vec::new();
        for (i, k) in self.legs.iter().enumerate() {
            let x = base + i;
            if x == h || !self.free(x) || labels_seen.contains(&k) {
                continue;
            }
            labels_seen.push(k);
            out.push(x);
        }
        out
    }
}
