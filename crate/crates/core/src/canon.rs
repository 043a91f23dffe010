//! Canonical labeling of uni-trivalent diagrams with orientation signs.
//!
//! Each connected component is traversed from every admissible starting
//! half-edge, branching over the order in which the two remaining slots of a
//! newly reached vertex are numbered. The traversal emits one token per
//! half-edge (its owner and the number of its partner); the lexicographically
//! least token stream is the component's canonical form. Vertex orientations
//! are then compared with the canonical numbering: every vertex whose cyclic
//! order disagrees contributes a factor −1. If two optimal traversals give
//! different signs the component has an orientation-reversing automorphism
//! and vanishes modulo AS.

use std::cmp::Ordering;

use crate::diagram::Diagram;
use crate::label::LegKey;

/// Result of canonicalizing a diagram: `sign == 0` means it is zero mod AS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm<K> {
    pub diagram: Diagram<K>,
    pub sign: i8,
}

impl<K> CanonicalForm<K> {
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Leg(u32),
    Vert(u32),
}

#[derive(Clone, Copy, Debug)]
struct Tok {
    kind: Kind,
    partner: u32,
}

const UNSET: u32 = u32::MAX;

#[derive(Clone)]
struct State {
    order: Vec<u32>,
    newidx: Vec<u32>,
    vert_id: Vec<u32>,
    next_vert: u32,
    ptr: usize,
    tokens: Vec<Tok>,
    better: bool,
}

struct Ctx<'a, K> {
    d: &'a Diagram<K>,
    len: usize,
    best: Option<Vec<Tok>>,
    best_order: Vec<u32>,
    sign: i8,
}

impl<K: LegKey> Ctx<'_, K> {
    fn cmp_tok(&self, a: &Tok, b: &Tok) -> Ordering {
        let k = match (a.kind, b.kind) {
            (Kind::Leg(x), Kind::Leg(y)) => self.d.legs[x as usize].cmp(&self.d.legs[y as usize]),
            (Kind::Leg(_), Kind::Vert(_)) => Ordering::Less,
            (Kind::Vert(_), Kind::Leg(_)) => Ordering::Greater,
            (Kind::Vert(x), Kind::Vert(y)) => x.cmp(&y),
        };
        k.then(a.partner.cmp(&b.partner))
    }

    fn assign(&self, st: &mut State, h: usize) {
        st.newidx[h] = st.order.len() as u32;
        st.order.push(h as u32);
        let base = 3 * self.d.vertices as usize;
        if h < base && st.vert_id[h / 3] == UNSET {
            st.vert_id[h / 3] = st.next_vert;
            st.next_vert += 1;
        }
    }

    fn kind(&self, st: &State, h: usize) -> Kind {
        let base = 3 * self.d.vertices as usize;
        if h < base {
            Kind::Vert(st.vert_id[h / 3])
        } else {
            Kind::Leg((h - base) as u32)
        }
    }

    /// Re-derives whether the emitted prefix is already strictly better
    /// than the current best (the best may have moved since the state was
    /// cloned). Returns false if the prefix is now worse.
    fn revalidate(&self, st: &mut State) -> bool {
        st.better = false;
        if let Some(best) = &self.best {
            for (t, b) in st.tokens.iter().zip(best) {
                match self.cmp_tok(t, b) {
                    Ordering::Less => {
                        st.better = true;
                        return true;
                    }
                    Ordering::Greater => return false,
                    Ordering::Equal => {}
                }
            }
        }
        true
    }

    fn run(&mut self, mut st: State) {
        let base = 3 * self.d.vertices as usize;
        while st.ptr < self.len {
            let h = st.order[st.ptr] as usize;
            let p = self.d.partner[h] as usize;
            if st.newidx[p] == UNSET {
                self.assign(&mut st, p);
            }
            if h < base {
                let v = h / 3;
                let free: Vec<usize> = (3 * v..3 * v + 3).filter(|&s| st.newidx[s] == UNSET).collect();
                match free.len() {
                    0 => {}
                    1 => self.assign(&mut st, free[0]),
                    _ => {
                        for (a, b) in [(free[0], free[1]), (free[1], free[0])] {
                            let mut child = st.clone();
                            self.assign(&mut child, a);
                            self.assign(&mut child, b);
                            if self.revalidate(&mut child) {
                                self.run(child);
                            }
                        }
                        return;
                    }
                }
            }
            let tok = Tok {
                kind: self.kind(&st, h),
                partner: st.newidx[p],
            };
            if !st.better {
                if let Some(best) = &self.best {
                    match self.cmp_tok(&tok, &best[st.ptr]) {
                        Ordering::Less => st.better = true,
                        Ordering::Greater => return,
                        Ordering::Equal => {}
                    }
                }
            }
            st.tokens.push(tok);
            st.ptr += 1;
        }
        let sign = self.orientation_sign(&st);
        if st.better || self.best.is_none() {
            self.best = Some(st.tokens);
            self.best_order = st.order;
            self.sign = sign;
        } else if sign != self.sign {
            self.sign = 0;
        }
    }

    fn orientation_sign(&self, st: &State) -> i8 {
        let mut sign = 1i8;
        for v in 0..self.d.vertices as usize {
            if st.vert_id[v] == UNSET {
                continue;
            }
            let (a, b, c) = (st.newidx[3 * v], st.newidx[3 * v + 1], st.newidx[3 * v + 2]);
            let even = (a < b && b < c) || (b < c && c < a) || (c < a && a < b);
            if !even {
                sign = -sign;
            }
        }
        sign
    }
}

#[derive(Clone)]
enum OwnedKind<K> {
    Leg(K),
    Vert(u32),
}

struct ComponentForm<K> {
    toks: Vec<(OwnedKind<K>, u32)>,
    sign: i8,
}

impl<K: LegKey> ComponentForm<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.toks.iter().zip(&other.toks) {
            let o = match (&a.0, &b.0) {
                (OwnedKind::Leg(x), OwnedKind::Leg(y)) => x.cmp(y),
                (OwnedKind::Leg(_), OwnedKind::Vert(_)) => Ordering::Less,
                (OwnedKind::Vert(_), OwnedKind::Leg(_)) => Ordering::Greater,
                (OwnedKind::Vert(x), OwnedKind::Vert(y)) => x.cmp(y),
            }
            .then(a.1.cmp(&b.1));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.toks.len().cmp(&other.toks.len())
    }
}

fn canonical_component<K: LegKey>(d: &Diagram<K>, members: &[usize]) -> ComponentForm<K> {
    let base = 3 * d.vertices as usize;
    let n = d.partner.len();
    let leg_members: Vec<usize> = members.iter().copied().filter(|&h| h >= base).collect();
    let starts: Vec<usize> = if leg_members.is_empty() {
        members.to_vec()
    } else {
        let min = leg_members.iter().map(|&h| &d.legs[h - base]).min().unwrap();
        leg_members
            .iter()
            .copied()
            .filter(|&h| &d.legs[h - base] == min)
            .collect()
    };
    let mut ctx = Ctx {
        d,
        len: members.len(),
        best: None,
        best_order: Vec::new(),
        sign: 1,
    };
    let fresh = State {
        order: Vec::with_capacity(members.len()),
        newidx: vec![UNSET; n],
        vert_id: vec![UNSET; d.vertices as usize],
        next_vert: 0,
        ptr: 0,
        tokens: Vec::with_capacity(members.len()),
        better: false,
    };
    for h0 in starts {
        let mut st = fresh.clone();
        ctx.assign(&mut st, h0);
        ctx.run(st);
    }
    let toks = ctx
        .best
        .unwrap()
        .into_iter()
        .map(|t| {
            let k = match t.kind {
                Kind::Leg(i) => OwnedKind::Leg(d.legs[i as usize].clone()),
                Kind::Vert(v) => OwnedKind::Vert(v),
            };
            (k, t.partner)
        })
        .collect();
    ComponentForm { toks, sign: ctx.sign }
}

/// Canonicalizes `d`: isomorphic diagrams (preserving leg keys and vertex
/// cyclic orders) get identical representatives; each vertex whose order
/// must be flipped to match contributes −1 to the sign.
pub fn canonicalize<K: LegKey>(d: &Diagram<K>) -> CanonicalForm<K> {
    let mut comps: Vec<ComponentForm<K>> = d.components().iter().map(|m| canonical_component(d, m)).collect();
    comps.sort_by(|a, b| a.cmp(b));
    let sign = comps.iter().map(|c| c.sign).product();

    let total_verts: u32 = comps
        .iter()
        .map(|c| {
            c.toks
                .iter()
                .filter_map(|t| match t.0 {
                    OwnedKind::Vert(v) => Some(v + 1),
                    _ => None,
                })
                .max()
                .unwrap_or(0)
        })
        .sum();
    let base = 3 * total_verts as usize;
    let mut partner = vec![0u32; d.partner.len()];
    let mut legs = Vec::with_capacity(d.legs.len());
    let mut vert_offset = 0u32;
    for c in &comps {
        let mut slot_used: Vec<u32> = Vec::new();
        let mut pos = Vec::with_capacity(c.toks.len());
        let mut comp_verts = 0u32;
        for (k, _) in &c.toks {
            match k {
                OwnedKind::Vert(v) => {
                    let v = *v as usize;
                    if slot_used.len() <= v {
                        slot_used.resize(v + 1, 0);
                    }
                    pos.push(3 * (vert_offset as usize + v) + slot_used[v] as usize);
                    slot_used[v] += 1;
                    comp_verts = comp_verts.max(v as u32 + 1);
                }
                OwnedKind::Leg(key) => {
                    pos.push(base + legs.len());
                    legs.push(key.clone());
                }
            }
        }
        for (i, (_, p)) in c.toks.iter().enumerate() {
            partner[pos[i]] = pos[*p as usize] as u32;
        }
        vert_offset += comp_verts;
    }
    CanonicalForm {
        diagram: Diagram {
            vertices: total_verts,
            legs,
            partner,
        },
        sign,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::End;
    use crate::label::{dvar, var};

    #[test]
    fn strut_orientation_is_irrelevant() {
        let a = canonicalize(&Diagram::strut(var("x"), var("y")));
        let b = canonicalize(&Diagram::strut(var("y"), var("x")));
        assert_eq!(a, b);
        assert_eq!(a.sign, 1);
    }

    #[test]
    fn tripod_flip_changes_sign() {
        let a = canonicalize(&Diagram::tripod(var("a"), var("b"), var("c")));
        let b = canonicalize(&Diagram::tripod(var("a"), var("c"), var("b")));
        assert_eq!(a.diagram, b.diagram);
        assert_eq!(a.sign, -b.sign);
        let r = canonicalize(&Diagram::tripod(var("b"), var("c"), var("a")));
        assert_eq!(r, a);
    }

    #[test]
    fn tadpole_is_zero() {
        let t = Diagram::new(
            1,
            vec![var("z")],
            &[(End::Slot(0, 0), End::Slot(0, 1)), (End::Slot(0, 2), End::Leg(0))],
        )
        .unwrap();
        assert!(canonicalize(&t).is_zero());
    }

    #[test]
    fn tripod_with_two_equal_legs_is_zero() {
        let t = Diagram::tripod(var("x"), var("x"), dvar("y"));
        assert!(canonicalize(&t).is_zero());
    }

    #[test]
    fn theta_is_nonzero_and_idempotent() {
        let theta = Diagram::<crate::label::VarLabel>::new(
            2,
            vec![],
            &[
                (End::Slot(0, 0), End::Slot(1, 0)),
                (End::Slot(0, 1), End::Slot(1, 1)),
                (End::Slot(0, 2), End::Slot(1, 2)),
            ],
        )
        .unwrap();
        let c = canonicalize(&theta);
        assert!(!c.is_zero());
        let again = canonicalize(&c.diagram);
        assert_eq!(again.diagram, c.diagram);
        assert_eq!(again.sign, 1);
    }
}
