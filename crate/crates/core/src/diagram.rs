//! Uni-trivalent diagrams as half-edge matchings.
//!
//! Half-edges are numbered so that internal vertex `v` owns `3v`, `3v+1`,
//! `3v+2` (its cyclic order is slot 0 → 1 → 2) and leg `i` owns
//! `3 * vertices + i`. The edges are a fixed-point-free involution on the
//! half-edges.

use crate::error::{Error, Result};
use crate::label::LegKey;

/// One end of an edge, as written by a caller building a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Slot(usize, usize),
    Leg(usize),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Diagram<K> {
    pub(crate) vertices: u32,
    pub(crate) legs: Vec<K>,
    pub(crate) partner: Vec<u32>,
}

impl<K: LegKey> Diagram<K> {
    /// The empty diagram, unit of the disjoint union.
    pub fn empty() -> Self {
        Diagram {
            vertices: 0,
            legs: Vec::new(),
            partner: Vec::new(),
        }
    }

    pub fn strut(a: K, b: K) -> Self {
        Diagram {
            vertices: 0,
            legs: vec![a, b],
            partner: vec![1, 0],
        }
    }

    /// A single trivalent vertex whose slots 0, 1, 2 carry legs `a`, `b`, `c`.
    pub fn tripod(a: K, b: K, c: K) -> Self {
        Diagram {
            vertices: 1,
            legs: vec![a, b, c],
            partner: vec![3, 4, 5, 0, 1, 2],
        }
    }

    pub fn new(vertices: usize, legs: Vec<K>, edges: &[(End, End)]) -> Result<Self> {
        let n = 3 * vertices + legs.len();
        let mut partner = vec![u32::MAX; n];
        let idx = |e: End| -> Result<usize> {
            match e {
                End::Slot(v, s) if v < vertices && s < 3 => Ok(3 * v + s),
                End::Leg(i) if i < legs.len() => Ok(3 * vertices + i),
                _ => Err(Error::Malformed(format!("end {e:?} out of range"))),
            }
        };
        for &(a, b) in edges {
            let (a, b) = (idx(a)?, idx(b)?);
            if a == b {
                return Err(Error::Malformed("edge joins a half-edge to itself".into()));
            }
            if partner[a] != u32::MAX || partner[b] != u32::MAX {
                return Err(Error::Malformed("half-edge used by two edges".into()));
            }
            partner[a] = b as u32;
            partner[b] = a as u32;
        }
        Self::from_parts(vertices, legs, partner)
    }

    pub fn from_parts(vertices: usize, legs: Vec<K>, partner: Vec<u32>) -> Result<Self> {
        let n = 3 * vertices + legs.len();
        if partner.len() != n {
            return Err(Error::Malformed(format!(
                "expected {n} half-edges, got {}",
                partner.len()
            )));
        }
        for (h, &p) in partner.iter().enumerate() {
            let p = p as usize;
            if p >= n {
                return Err(Error::Malformed(format!("half-edge {h} is unmatched")));
            }
            if p == h || partner[p] as usize != h {
                return Err(Error::Malformed(format!("half-edge {h} is not properly matched")));
            }
        }
        Ok(Diagram {
            vertices: vertices as u32,
            legs,
            partner,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices as usize
    }

    pub fn legs(&self) -> &[K] {
        &self.legs
    }

    pub fn num_half_edges(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, h: usize) -> usize {
        self.partner[h] as usize
    }

    pub fn leg_half_edge(&self, leg: usize) -> usize {
        3 * self.vertices as usize + leg
    }

    /// Leg index of half-edge `h`, if it is a leg.
    pub fn leg_of(&self, h: usize) -> Option<usize> {
        h.checked_sub(3 * self.vertices as usize)
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    /// True for a single bare edge between two legs.
    pub fn is_strut(&self) -> bool {
        self.vertices == 0 && self.legs.len() == 2
    }

    /// Internal edges as pairs of vertex half-edges, each listed once.
    pub fn internal_edges(&self) -> Vec<(usize, usize)> {
        let nv = 3 * self.vertices as usize;
        (0..nv)
            .filter_map(|h| {
                let p = self.partner[h] as usize;
                (p < nv && h < p).then_some((h, p))
            })
            .collect()
    }

    pub fn count_legs(&self, key: &K) -> usize {
        self.legs.iter().filter(|k| *k == key).count()
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        let (va, vb) = (self.vertices as usize, other.vertices as usize);
        let (la, lb) = (self.legs.len(), other.legs.len());
        let v = va + vb;
        // old index -> new index, for either operand
        let map_a = |h: usize| if h < 3 * va { h } else { 3 * v + (h - 3 * va) };
        let map_b = |h: usize| {
            if h < 3 * vb {
                3 * va + h
            } else {
                3 * v + la + (h - 3 * vb)
            }
        };
        let mut partner = vec![0u32; 3 * v + la + lb];
        for (h, &p) in self.partner.iter().enumerate() {
            partner[map_a(h)] = map_a(p as usize) as u32;
        }
        for (h, &p) in other.partner.iter().enumerate() {
            partner[map_b(h)] = map_b(p as usize) as u32;
        }
        let mut legs = self.legs.clone();
        legs.extend(other.legs.iter().cloned());
        Diagram {
            vertices: v as u32,
            legs,
            partner,
        }
    }

    /// Replaces every leg key through `f`.
    pub fn map_legs<L: LegKey>(&self, mut f: impl FnMut(&K) -> L) -> Diagram<L> {
        Diagram {
            vertices: self.vertices,
            legs: self.legs.iter().map(&mut f).collect(),
            partner: self.partner.clone(),
        }
    }

    pub fn map_legs_indexed<L: LegKey>(&self, mut f: impl FnMut(usize, &K) -> L) -> Diagram<L> {
        Diagram {
            vertices: self.vertices,
            legs: self.legs.iter().enumerate().map(|(i, k)| f(i, k)).collect(),
            partner: self.partner.clone(),
        }
    }

    /// Glues pairs of legs: each pair of univalent ends is removed and the
    /// half-edges they were attached to are joined. Gluing the two ends of
    /// one strut (directly or through a chain of struts) closes a vertexless
    /// loop, which is an error.
    pub fn glue_legs(&self, pairs: &[(usize, usize)]) -> Result<Self>
    where
        K: std::fmt::Display,
    {
        let base = 3 * self.vertices as usize;
        let mut partner = self.partner.clone();
        let mut dead = vec![false; self.legs.len()];
        for &(a, b) in pairs {
            if a == b || dead[a] || dead[b] {
                return Err(Error::Internal("leg glued twice".into()));
            }
            let (ha, hb) = (base + a, base + b);
            let (pa, pb) = (partner[ha] as usize, partner[hb] as usize);
            if pa == hb {
                return Err(Error::VertexlessLoop(format!(
                    "the strut {}-{}",
                    self.legs[a], self.legs[b]
                )));
            }
            partner[pa] = pb as u32;
            partner[pb] = pa as u32;
            dead[a] = true;
            dead[b] = true;
        }
        Ok(self.drop_dead_legs(&partner, &dead))
    }

    /// Removes the legs flagged in `dead`, reindexing the survivors. The
    /// caller guarantees no surviving half-edge points at a dead one.
    pub(crate) fn drop_dead_legs(&self, partner: &[u32], dead: &[bool]) -> Self {
        let base = 3 * self.vertices as usize;
        let mut new_index = vec![u32::MAX; partner.len()];
        for (h, slot) in new_index.iter_mut().enumerate().take(base) {
            *slot = h as u32;
        }
        let mut legs = Vec::new();
        let mut next = base as u32;
        for (i, k) in self.legs.iter().enumerate() {
            if !dead[i] {
                new_index[base + i] = next;
                next += 1;
                legs.push(k.clone());
            }
        }
        let mut out = vec![0u32; next as usize];
        for (h, &ni) in new_index.iter().enumerate() {
            if ni != u32::MAX {
                out[ni as usize] = new_index[partner[h] as usize];
            }
        }
        Diagram {
            vertices: self.vertices,
            legs,
            partner: out,
        }
    }

    /// Applies a permutation of half-edges: the half-edge at position `h`
    /// moves to `perm[h]`. Legs must map to legs with the same index.
    pub(crate) fn permute_slots(&self, perm: &[usize]) -> Self {
        let mut partner = vec![0u32; self.partner.len()];
        for (h, &p) in self.partner.iter().enumerate() {
            partner[perm[h]] = perm[p as usize] as u32;
        }
        Diagram {
            vertices: self.vertices,
            legs: self.legs.clone(),
            partner,
        }
    }

    /// Connected components as sorted lists of half-edges.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.partner.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = Vec::new();
            let mut stack = vec![start];
            comp[start] = id;
            while let Some(h) = stack.pop() {
                members.push(h);
                let mut nb = vec![self.partner[h] as usize];
                if h < 3 * self.vertices as usize {
                    let v = h / 3;
                    nb.extend([3 * v, 3 * v + 1, 3 * v + 2]);
                }
                for g in nb {
                    if comp[g] == usize::MAX {
                        comp[g] = id;
                        stack.push(g);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Extracts the sub-diagram spanned by a closed set of half-edges.
    pub fn sub_diagram(&self, half_edges: &[usize]) -> Self {
        let base = 3 * self.vertices as usize;
        let mut new_index = vec![u32::MAX; self.partner.len()];
        let mut verts = 0u32;
        for &h in half_edges {
            if h < base && h % 3 == 0 {
                for s in 0..3 {
                    new_index[h + s] = 3 * verts + s as u32;
                }
                verts += 1;
            }
        }
        let mut legs = Vec::new();
        for &h in half_edges {
            if h >= base {
                new_index[h] = 3 * verts + legs.len() as u32;
                legs.push(self.legs[h - base].clone());
            }
        }
        let mut partner = vec![0u32; 3 * verts as usize + legs.len()];
        for &h in half_edges {
            partner[new_index[h] as usize] = new_index[self.partner[h] as usize];
        }
        Diagram {
            vertices: verts,
            legs,
            partner,
        }
    }
}
