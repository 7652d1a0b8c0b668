use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Component, Diagram, DiagramError, Item, SurfaceModel};
use crate::groups::ClassRep;
use crate::ring::{a_pow, CycCoeff, Z4Exp};

pub const DEFAULT_CROSSING_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Smoothing {
    A,
    B,
}

/// One term of a state sum: a coefficient times a crossingless diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedTerm {
    pub coeff: CycCoeff,
    pub diagram: Diagram,
}

/// Reverses a run of items, inverting letters. Crossings passed exactly once
/// in the run change sign, since one of their strands now runs backwards.
pub(crate) fn reverse_segment(items: &[Item], signs: &mut BTreeMap<u32, i8>) -> Vec<Item> {
    let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
    for it in items {
        if let Item::Pass { crossing, .. } = *it {
            *seen.entry(crossing).or_insert(0) += 1;
        }
    }
    for (id, n) in seen {
        if n == 1 {
            if let Some(s) = signs.get_mut(&id) {
                *s = -*s;
            }
        }
    }
    items
        .iter()
        .rev()
        .map(|it| match *it {
            Item::Letter(x) => Item::Letter(-x),
            p => p,
        })
        .collect()
}

/// Items of a component read from just after `pos` around to just before it.
fn cut_at(items: &[Item], pos: usize) -> Vec<Item> {
    items[pos + 1..].iter().chain(&items[..pos]).copied().collect()
}

impl Diagram {
    /// Deletes crossing `c` and reconnects the strands. For `s = +1` the
    /// A-smoothing is the reconnection that respects orientation; for
    /// `s = -1` it is the B-smoothing.
    pub fn smooth(&self, c: u32, kind: Smoothing) -> Result<Diagram, DiagramError> {
        let [p, q] = self.passes_of(c)?;
        let s = self.sign(c)?;
        let oriented = (kind == Smoothing::A) == (s == 1);
        let mut signs = self.signs.clone();
        signs.remove(&c);
        let mut components = self.components.clone();
        if p.comp != q.comp {
            let (lo, hi) = if p.comp < q.comp { (p, q) } else { (q, p) };
            let g = cut_at(&components[lo.comp].items, lo.pos);
            let h = cut_at(&components[hi.comp].items, hi.pos);
            let tail = if oriented { h } else { reverse_segment(&h, &mut signs) };
            let twists = components[lo.comp].twists + components[hi.comp].twists;
            components[lo.comp] = Component { twists, items: g.into_iter().chain(tail).collect() };
            components.remove(hi.comp);
        } else {
            let (a, b) = if p.pos < q.pos { (p.pos, q.pos) } else { (q.pos, p.pos) };
            let items = &self.components[p.comp].items;
            let inner: Vec<Item> = items[a + 1..b].to_vec();
            let outer: Vec<Item> = items[b + 1..].iter().chain(&items[..a]).copied().collect();
            let twists = self.components[p.comp].twists;
            if oriented {
                components[p.comp] = Component { twists, items: outer };
                components.insert(p.comp + 1, Component { twists: 0, items: inner });
            } else {
                let tail = reverse_segment(&inner, &mut signs);
                components[p.comp] = Component { twists, items: outer.into_iter().chain(tail).collect() };
            }
        }
        Ok(Diagram { components, signs })
    }

    /// Drops every crossingless component whose word is trivial in the group.
    /// Each one contributes `2 A^t` to the returned factor.
    pub fn remove_trivial(&self, surface: &SurfaceModel) -> (Diagram, CycCoeff) {
        let mut factor = CycCoeff::ONE;
        let mut components = Vec::with_capacity(self.len());
        for c in &self.components {
            if !c.has_passes() && surface.group.is_identity(&c.word()).unwrap_or(false) {
                factor *= a_pow(Z4Exp::new(c.twists)) * 2;
            } else {
                components.push(c.clone());
            }
        }
        (Diagram { components, signs: self.signs.clone() }, factor)
    }

    /// Kauffman state sum over all smoothings. Residual diagrams are brought
    /// to standard form: each curve is replaced by the standard word of its
    /// class with twists absorbed as `A^t`, and curves are sorted by class.
    pub fn resolve(&self, surface: &SurfaceModel, cap: usize) -> Result<Vec<ResolvedTerm>, DiagramError> {
        let ids: Vec<u32> = self.crossing_ids().collect();
        if ids.len() > cap {
            return Err(DiagramError::CrossingCap { count: ids.len(), cap });
        }
        for id in &ids {
            self.passes_of(*id)?;
        }
        let n = ids.len();
        let sums = (0u64..1 << n)
            .into_par_iter()
            .map(|mask| {
                let mut d = self.clone();
                let mut exp = 0i64;
                for (k, &id) in ids.iter().enumerate() {
                    let kind = if mask >> k & 1 == 0 { Smoothing::A } else { Smoothing::B };
                    exp += if kind == Smoothing::A { 1 } else { -1 };
                    d = d.smooth(id, kind).expect("crossing present in every state");
                }
                let (d, factor) = d.remove_trivial(surface);
                let (key, twist) = standard_key(&d, surface);
                (key, factor * a_pow(Z4Exp::new(exp + twist)))
            })
            .fold(BTreeMap::new, |mut acc: BTreeMap<Vec<ClassRep>, CycCoeff>, (k, v)| {
                *acc.entry(k).or_insert(CycCoeff::ZERO) += v;
                acc
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(CycCoeff::ZERO) += v;
                }
                a
            });
        Ok(sums
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(key, coeff)| ResolvedTerm { coeff, diagram: standard_diagram(&key, surface) })
            .collect())
    }
}

fn standard_key(d: &Diagram, surface: &SurfaceModel) -> (Vec<ClassRep>, i64) {
    let mut key: Vec<ClassRep> = d.components.iter().map(|c| surface.group.class_rep(&c.word())).collect();
    key.sort();
    (key, d.components.iter().map(|c| c.twists).sum())
}

fn standard_diagram(key: &[ClassRep], surface: &SurfaceModel) -> Diagram {
    let components = key
        .iter()
        .map(|c| Component {
            twists: 0,
            items: surface.group.rep_word(c).0.into_iter().map(Item::Letter).collect(),
        })
        .collect();
    Diagram { components, signs: BTreeMap::new() }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::groups::Word;

    #[test]
    fn torus_smoothings() {
        let t = SurfaceModel::torus();
        let d = torus_ab();
        let b = d.smooth(0, Smoothing::B).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.word(0), Word(vec![1, 2]));
        let a = d.smooth(0, Smoothing::A).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.word(0), Word(vec![1, -2]));
        assert_eq!(t.group.class_rep(&a.word(0)), t.group.class_rep(&Word(vec![1, -2])));
        a.validate(&t).unwrap();
        b.validate(&t).unwrap();
    }

    #[test]
    fn kink_smoothing_splits_trivial_loop() {
        let t = SurfaceModel::torus();
        let k = kink(1);
        let o = k.smooth(0, Smoothing::A).unwrap();
        assert_eq!(o.len(), 2);
        assert!(o.components.iter().all(|c| c.items.is_empty()));
        let (rest, f) = o.remove_trivial(&t);
        assert!(rest.is_empty());
        assert_eq!(f, CycCoeff::int(4));
        let r = k.smooth(0, Smoothing::B).unwrap();
        assert_eq!(r.len(), 1);
        r.validate(&t).unwrap();
    }

    #[test]
    fn remove_trivial_examples() {
        let t = SurfaceModel::torus();
        assert_eq!(loop_with(&[], 0).remove_trivial(&t).1, CycCoeff::int(2));
        assert_eq!(loop_with(&[], 1).remove_trivial(&t).1, CycCoeff::new(0, 2));
        let d = loop_with(&[1, 2], 0);
        assert_eq!(d.remove_trivial(&t), (d.clone(), CycCoeff::ONE));
        // trivial word but a crossing: kept
        let k = kink(1);
        assert_eq!(k.remove_trivial(&t).0, k);
    }

    #[test]
    fn resolve_examples() {
        let t = SurfaceModel::torus();
        let plain = loop_with(&[1, 2], 0);
        let r = plain.resolve(&t, DEFAULT_CROSSING_CAP).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].coeff, CycCoeff::ONE);

        let r = torus_ab().resolve(&t, DEFAULT_CROSSING_CAP).unwrap();
        let classes: Vec<_> = r.iter().map(|x| (t.group.class_rep(&x.diagram.word(0)), x.coeff)).collect();
        let ab = t.group.class_rep(&Word(vec![1, 2]));
        let ab_inv = t.group.class_rep(&Word(vec![1, -2]));
        assert!(classes.contains(&(ab, CycCoeff::new(0, -1))));
        assert!(classes.contains(&(ab_inv, CycCoeff::A)));

        // positive kink: A * 4 + A^-1 * 2 = 4A - 2A = 2A = A^{-D} * 2 with D = 3
        let r = kink(1).resolve(&t, DEFAULT_CROSSING_CAP).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].diagram.is_empty());
        assert_eq!(r[0].coeff, CycCoeff::new(0, 2));
    }

    #[test]
    fn resolve_cap() {
        let t = SurfaceModel::torus();
        assert_eq!(
            torus_ab().resolve(&t, 0),
            Err(DiagramError::CrossingCap { count: 1, cap: 0 })
        );
    }
}
