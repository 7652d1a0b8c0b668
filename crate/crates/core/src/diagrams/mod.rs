//! Framed link diagrams on surfaces, in a Gauss-code style.
//!
//! A component is a cyclic sequence of items: generator letters (the word it
//! reads in `pi_1(F)`) and passes through crossings. Every crossing is passed
//! exactly twice, once over and once under, and carries a sign `s`, the
//! orientation sign of (over tangent, under tangent). Framings are the
//! blackboard framing plus an integer number of full twists per component.
//!
//! Conventions, for components `i != j` and a crossing `p` between them:
//! `iota(p) = s` when `K_i` is over and `-s` when `K_j` is over. A diagram is
//! valid when the sum of `iota` over the crossings of every pair equals
//! `omega([K_i], [K_j])`.

mod smooth;

pub use smooth::{ResolvedTerm, Smoothing, DEFAULT_CROSSING_CAP};

use std::collections::BTreeMap;

use num_rational::Rational64;
use thiserror::Error;

use crate::groups::{GroupError, GroupSpec, Word};
use crate::ring::{QuarterFrac, Z4Exp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("crossing {id} is referenced {count} times, expected 2")]
    DanglingCrossing { id: u32, count: usize },
    #[error("crossing {id} must have exactly one over pass, found {count}")]
    OverPasses { id: u32, count: usize },
    #[error("crossing {0} has no sign")]
    MissingSign(u32),
    #[error("crossing {id} has sign {sign}, expected +1 or -1")]
    BadSign { id: u32, sign: i8 },
    #[error("sign given for crossing {0}, which no component passes")]
    UnusedSign(u32),
    #[error("component {comp}: {source}")]
    Letter { comp: usize, source: GroupError },
    #[error("components {i} and {j}: crossing sum {sum} differs from omega = {omega}")]
    OmegaMismatch { i: usize, j: usize, sum: i64, omega: i64 },
    #[error("unknown crossing {0}")]
    UnknownCrossing(u32),
    #[error("component index {0} out of range")]
    ComponentOutOfRange(usize),
    #[error("expected two distinct components, got {0} twice")]
    SameComponent(usize),
    #[error("{count} crossings exceed the crossing cap of {cap}")]
    CrossingCap { count: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Item {
    Letter(i64),
    Pass { crossing: u32, over: bool },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Component {
    pub twists: i64,
    pub items: Vec<Item>,
}

impl Component {
    pub fn word(&self) -> Word {
        Word(
            self.items
                .iter()
                .filter_map(|it| match *it {
                    Item::Letter(x) => Some(x),
                    Item::Pass { .. } => None,
                })
                .collect(),
        )
    }

    pub fn has_passes(&self) -> bool {
        self.items.iter().any(|it| matches!(it, Item::Pass { .. }))
    }
}

/// Where a crossing is passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PassRef {
    pub comp: usize,
    pub pos: usize,
    pub over: bool,
}

/// The surface a diagram lives on, given by its fundamental group and the
/// intersection form on `H_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceModel {
    pub group: GroupSpec,
}

impl SurfaceModel {
    pub fn new(group: GroupSpec) -> Self {
        SurfaceModel { group }
    }

    pub fn torus() -> Self {
        SurfaceModel { group: GroupSpec::torus() }
    }

    /// A disk with `holes` holes: free fundamental group, zero intersection form.
    pub fn planar(holes: usize) -> Result<Self, GroupError> {
        Ok(SurfaceModel { group: GroupSpec::free(holes, None)? })
    }

    /// The once-punctured torus.
    pub fn punctured_torus() -> Self {
        let g = GroupSpec::free(2, Some(crate::groups::symplectic_matrix(1))).expect("valid");
        SurfaceModel { group: g }
    }

    pub fn closed(genus: usize) -> Result<Self, GroupError> {
        Ok(SurfaceModel { group: GroupSpec::surface(genus)? })
    }
}

/// Linking data between two components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InterStats {
    /// Half the sum of crossing signs.
    pub lk: Rational64,
    /// Sum of `iota` over the shared crossings.
    pub omega: i64,
    /// `omega/2 - lk`, with `omega` taken from the homology classes.
    pub d: Z4Exp,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagram {
    pub components: Vec<Component>,
    /// Sign `s` of every crossing.
    pub signs: BTreeMap<u32, i8>,
}

impl Diagram {
    pub fn new(components: Vec<Component>, signs: BTreeMap<u32, i8>) -> Self {
        Diagram { components, signs }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn crossing_count(&self) -> usize {
        self.signs.len()
    }

    pub fn crossing_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.signs.keys().copied()
    }

    pub fn word(&self, i: usize) -> Word {
        self.components[i].word()
    }

    pub(crate) fn next_id(&self) -> u32 {
        let from_items = self
            .components
            .iter()
            .flat_map(|c| &c.items)
            .filter_map(|it| match *it {
                Item::Pass { crossing, .. } => Some(crossing + 1),
                Item::Letter(_) => None,
            })
            .max()
            .unwrap_or(0);
        let from_signs = self.signs.keys().next_back().map_or(0, |&k| k + 1);
        from_items.max(from_signs)
    }

    /// All passes, grouped by crossing id.
    pub fn locate(&self) -> BTreeMap<u32, Vec<PassRef>> {
        let mut out: BTreeMap<u32, Vec<PassRef>> = BTreeMap::new();
        for (comp, c) in self.components.iter().enumerate() {
            for (pos, it) in c.items.iter().enumerate() {
                if let Item::Pass { crossing, over } = *it {
                    out.entry(crossing).or_default().push(PassRef { comp, pos, over });
                }
            }
        }
        out
    }

    pub(crate) fn passes_of(&self, id: u32) -> Result<[PassRef; 2], DiagramError> {
        let mut found = Vec::with_capacity(2);
        for (comp, c) in self.components.iter().enumerate() {
            for (pos, it) in c.items.iter().enumerate() {
                if let Item::Pass { crossing, over } = *it {
                    if crossing == id {
                        found.push(PassRef { comp, pos, over });
                    }
                }
            }
        }
        match found.len() {
            0 => Err(DiagramError::UnknownCrossing(id)),
            2 => Ok([found[0], found[1]]),
            count => Err(DiagramError::DanglingCrossing { id, count }),
        }
    }

    pub(crate) fn sign(&self, id: u32) -> Result<i64, DiagramError> {
        self.signs.get(&id).map(|&s| s as i64).ok_or(DiagramError::UnknownCrossing(id))
    }

    /// Every problem that makes the diagram unusable.
    pub fn diagnostics(&self, surface: &SurfaceModel) -> Vec<DiagramError> {
        let mut errs = Vec::new();
        let loc = self.locate();
        for (&id, passes) in &loc {
            if passes.len() != 2 {
                errs.push(DiagramError::DanglingCrossing { id, count: passes.len() });
                continue;
            }
            let overs = passes.iter().filter(|p| p.over).count();
            if overs != 1 {
                errs.push(DiagramError::OverPasses { id, count: overs });
            }
            match self.signs.get(&id) {
                None => errs.push(DiagramError::MissingSign(id)),
                Some(&s) if s != 1 && s != -1 => errs.push(DiagramError::BadSign { id, sign: s }),
                _ => {}
            }
        }
        for &id in self.signs.keys() {
            if !loc.contains_key(&id) {
                errs.push(DiagramError::UnusedSign(id));
            }
        }
        for (comp, c) in self.components.iter().enumerate() {
            if let Err(source) = surface.group.check_word(&c.word()) {
                errs.push(DiagramError::Letter { comp, source });
            }
        }
        if !errs.is_empty() {
            return errs;
        }
        let words: Vec<Word> = (0..self.len()).map(|i| self.word(i)).collect();
        let sums = self.iota_sums(&loc);
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let omega = surface.group.omega(&words[i], &words[j]);
                let sum = sums.get(&(i, j)).copied().unwrap_or(0);
                if sum != omega {
                    errs.push(DiagramError::OmegaMismatch { i, j, sum, omega });
                }
            }
        }
        errs
    }

    pub fn validate(&self, surface: &SurfaceModel) -> Result<(), DiagramError> {
        match self.diagnostics(surface).into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Sum of `iota` for every pair `i < j` that shares crossings.
    fn iota_sums(&self, loc: &BTreeMap<u32, Vec<PassRef>>) -> BTreeMap<(usize, usize), i64> {
        let mut sums = BTreeMap::new();
        for (id, p) in loc {
            let (a, b) = (p[0], p[1]);
            if a.comp == b.comp {
                continue;
            }
            let s = self.signs[id] as i64;
            let (first, second) = if a.comp < b.comp { (a, b) } else { (b, a) };
            let iota = if first.over { s } else { -s };
            *sums.entry((first.comp, second.comp)).or_insert(0) += iota;
        }
        sums
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<(), DiagramError> {
        for k in [i, j] {
            if k >= self.len() {
                return Err(DiagramError::ComponentOutOfRange(k));
            }
        }
        if i == j {
            return Err(DiagramError::SameComponent(i));
        }
        Ok(())
    }

    /// Crossings between `K_i` and `K_j` as `(sign, K_j is over)`.
    fn shared(&self, i: usize, j: usize) -> Vec<(i64, bool)> {
        self.locate()
            .iter()
            .filter_map(|(id, p)| {
                let (a, b) = (p[0], p[1]);
                if a.comp == i && b.comp == j {
                    Some((self.signs[id] as i64, b.over))
                } else if a.comp == j && b.comp == i {
                    Some((self.signs[id] as i64, a.over))
                } else {
                    None
                }
            })
            .collect()
    }

    /// `lk`, the crossing sum of `iota`, and `d = lf^ - lk` with
    /// `lf^ = omega([K_i], [K_j]) / 2`.
    pub fn inter_stats(&self, surface: &SurfaceModel, i: usize, j: usize) -> Result<InterStats, DiagramError> {
        self.check_pair(i, j)?;
        let shared = self.shared(i, j);
        let sign_sum: i64 = shared.iter().map(|&(s, _)| s).sum();
        let omega = shared.iter().map(|&(s, j_over)| if j_over { -s } else { s }).sum();
        let hom_omega = surface.group.omega(&self.word(i), &self.word(j));
        let d = QuarterFrac::new(hom_omega, 2) - QuarterFrac::new(sign_sum, 2);
        let d = d.to_z4().expect("omega and the crossing sign sum have equal parity");
        Ok(InterStats { lk: Rational64::new(sign_sum, 2), omega, d })
    }

    /// `d(K_i, K_j)` as the signed count of crossings where `K_j` is on top.
    pub fn over_count_d(&self, i: usize, j: usize) -> Result<Z4Exp, DiagramError> {
        self.check_pair(i, j)?;
        let n: i64 = self
            .shared(i, j)
            .iter()
            .filter(|&&(_, j_over)| j_over)
            .map(|&(s, _)| -s)
            .sum();
        Ok(Z4Exp::new(n))
    }

    /// `d` between the unions of two disjoint sets of components, from their
    /// total homology classes and total crossing sign sum.
    pub fn d_sublinks(&self, surface: &SurfaceModel, a: &[usize], b: &[usize]) -> Result<Z4Exp, DiagramError> {
        let mut sign_sum = 0;
        for &i in a {
            for &j in b {
                self.check_pair(i, j)?;
                sign_sum += self.shared(i, j).iter().map(|&(s, _)| s).sum::<i64>();
            }
        }
        let wa = a.iter().fold(Word::empty(), |w, &i| w.concat(&self.word(i)));
        let wb = b.iter().fold(Word::empty(), |w, &i| w.concat(&self.word(i)));
        let omega = surface.group.omega(&wa, &wb);
        let d = QuarterFrac::new(omega, 2) - QuarterFrac::new(sign_sum, 2);
        Ok(d.to_z4().expect("omega and the crossing sign sum have equal parity"))
    }

    /// Sum of signs of the self-crossings of `K_i`.
    pub fn writhe(&self, i: usize) -> i64 {
        self.locate()
            .iter()
            .filter(|(_, p)| p.len() == 2 && p[0].comp == i && p[1].comp == i)
            .map(|(id, _)| self.signs[id] as i64)
            .sum()
    }

    /// `D(K_i) = -(writhe + twists)`.
    pub fn big_d(&self, i: usize) -> Result<Z4Exp, DiagramError> {
        let c = self.components.get(i).ok_or(DiagramError::ComponentOutOfRange(i))?;
        Ok(Z4Exp::new(-(self.writhe(i) + c.twists)))
    }

    /// `D(K_i)` computed as `d(d+ K_i, d- K_i)` on the doubled diagram.
    pub fn big_d_doubled(&self, surface: &SurfaceModel, i: usize) -> Result<Z4Exp, DiagramError> {
        if i >= self.len() {
            return Err(DiagramError::ComponentOutOfRange(i));
        }
        Ok(self.double(i).inter_stats(surface, i, i + 1)?.d)
    }

    /// Replaces `K_i` by its two blackboard-parallel boundary curves: `d+ K_i`
    /// at index `i` and `d- K_i` at index `i + 1`, both untwisted.
    ///
    /// A self-crossing becomes four crossings, a crossing with another
    /// component becomes two, and `t` twists become `2|t|` crossings between
    /// the copies with sign `sgn(t)` and alternating over strand.
    pub fn double(&self, i: usize) -> Diagram {
        let loc = self.locate();
        let mut next = self.next_id();
        let mut fresh = || {
            next += 1;
            next - 1
        };
        let mut signs = self.signs.clone();
        // self crossing -> (pp, mm, pm, mp); pm has d+ at the over pass
        let mut quad: BTreeMap<u32, [u32; 4]> = BTreeMap::new();
        // crossing with another component -> (d+ copy, d- copy)
        let mut pair: BTreeMap<u32, [u32; 2]> = BTreeMap::new();
        for (&id, p) in &loc {
            let hits = p.iter().filter(|r| r.comp == i).count();
            let s = signs[&id];
            if hits == 2 {
                let ids = [fresh(), fresh(), fresh(), fresh()];
                signs.remove(&id);
                for n in ids {
                    signs.insert(n, s);
                }
                quad.insert(id, ids);
            } else if hits == 1 {
                let ids = [fresh(), fresh()];
                signs.remove(&id);
                for n in ids {
                    signs.insert(n, s);
                }
                pair.insert(id, ids);
            }
        }
        let comp = &self.components[i];
        let (mut plus, mut minus) = (Vec::new(), Vec::new());
        let t = comp.twists;
        for k in 0..2 * t.unsigned_abs() {
            let id = fresh();
            signs.insert(id, t.signum() as i8);
            let plus_over = k % 2 == 0;
            plus.push(Item::Pass { crossing: id, over: plus_over });
            minus.push(Item::Pass { crossing: id, over: !plus_over });
        }
        for it in &comp.items {
            match *it {
                Item::Letter(_) => {
                    plus.push(*it);
                    minus.push(*it);
                }
                Item::Pass { crossing, over } => {
                    if let Some(&[pp, mm, pm, mp]) = quad.get(&crossing) {
                        let p = |c| Item::Pass { crossing: c, over };
                        if over {
                            plus.extend([p(pp), p(pm)]);
                            minus.extend([p(mp), p(mm)]);
                        } else {
                            plus.extend([p(mp), p(pp)]);
                            minus.extend([p(mm), p(pm)]);
                        }
                    } else {
                        let [pc, mc] = pair[&crossing];
                        plus.push(Item::Pass { crossing: pc, over });
                        minus.push(Item::Pass { crossing: mc, over });
                    }
                }
            }
        }
        let mut components = Vec::with_capacity(self.len() + 1);
        for (k, c) in self.components.iter().enumerate() {
            if k == i {
                components.push(Component { twists: 0, items: std::mem::take(&mut plus) });
                components.push(Component { twists: 0, items: std::mem::take(&mut minus) });
                continue;
            }
            let mut items = Vec::with_capacity(c.items.len());
            for it in &c.items {
                match *it {
                    Item::Pass { crossing, over } if pair.contains_key(&crossing) => {
                        let [pc, mc] = pair[&crossing];
                        items.push(Item::Pass { crossing: pc, over });
                        items.push(Item::Pass { crossing: mc, over });
                    }
                    _ => items.push(*it),
                }
            }
            components.push(Component { twists: c.twists, items });
        }
        Diagram { components, signs }
    }

    /// Switches which strand is on top at crossing `c`.
    pub fn crossing_change(&self, c: u32) -> Result<Diagram, DiagramError> {
        self.passes_of(c)?;
        let mut out = self.clone();
        for comp in &mut out.components {
            for it in &mut comp.items {
                if let Item::Pass { crossing, over } = it {
                    if *crossing == c {
                        *over = !*over;
                    }
                }
            }
        }
        let s = out.signs.get_mut(&c).ok_or(DiagramError::UnknownCrossing(c))?;
        *s = -*s;
        Ok(out)
    }

    /// Reverses the orientation of `K_i`.
    pub fn reverse(&self, i: usize) -> Result<Diagram, DiagramError> {
        if i >= self.len() {
            return Err(DiagramError::ComponentOutOfRange(i));
        }
        let mut out = self.clone();
        let items = std::mem::take(&mut out.components[i].items);
        out.components[i].items = smooth::reverse_segment(&items, &mut out.signs);
        Ok(out)
    }

    /// Appends the components of `other`, renumbering its crossings.
    pub fn disjoint_union(&self, other: &Diagram) -> Diagram {
        let offset = self.next_id();
        let mut out = self.clone();
        for c in &other.components {
            let items = c
                .items
                .iter()
                .map(|it| match *it {
                    Item::Pass { crossing, over } => Item::Pass { crossing: crossing + offset, over },
                    l => l,
                })
                .collect();
            out.components.push(Component { twists: c.twists, items });
        }
        for (&id, &s) in &other.signs {
            out.signs.insert(id + offset, s);
        }
        out
    }
}
