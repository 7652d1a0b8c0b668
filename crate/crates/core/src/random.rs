//! Seeded generators for words, linking data, and link diagrams.
//!
//! Random diagrams are drawn from actual curves so that every smoothing and
//! crossing change of them is again a consistent diagram. Torus diagrams
//! come from polygons in the universal cover `R^2`; letters record crossings
//! of the integer grid lines. Planar diagrams live in the plane punctured at
//! `(k, 0)`; letters record crossings of the vertical rays above the
//! punctures.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diagrams::{Component, Diagram, Item, SurfaceModel};
use crate::groups::{GroupSpec, Word};
use crate::linking::{CaseOne, HomComponent, HomLink, RhsData};
use crate::ring::gcd;

pub type CaseRng = ChaCha8Rng;

/// Default bound on crossings of generated diagrams.
pub const DEFAULT_MAX_CROSSINGS: usize = 10;

/// A word of length `0..=max_len` over `rank` generators.
pub fn word(rng: &mut CaseRng, rank: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word(
        (0..len)
            .map(|_| {
                let g = rng.gen_range(1..=rank as i64);
                if rng.gen_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect(),
    )
}

/// Linking data with `1..=max_factors` cyclic factors of odd order in
/// `3..=99` and a random symmetric form.
pub fn rhs_data(rng: &mut CaseRng, max_factors: usize) -> RhsData {
    let k = rng.gen_range(0..=max_factors);
    let torsion: Vec<i64> = (0..k).map(|_| 2 * rng.gen_range(1..=49) + 1).collect();
    let mut lf = vec![vec![Rational64::from_integer(0); k]; k];
    for i in 0..k {
        for j in i..k {
            let g = gcd(torsion[i], torsion[j]);
            let v = Rational64::new(rng.gen_range(0..g), g);
            lf[i][j] = v;
            lf[j][i] = v;
        }
    }
    RhsData::new(torsion, lf).expect("generated data is valid")
}

/// The abelian group `H_1` of the data, used as the fundamental group of
/// case I links.
pub fn rhs_group(data: &RhsData) -> GroupSpec {
    GroupSpec::abelian(0, data.torsion().to_vec(), None).expect("odd torsion")
}

fn class_word(torsion: &[i64], class: &[i64]) -> Word {
    let mut w = Vec::new();
    for (k, &a) in class.iter().enumerate() {
        w.extend(std::iter::repeat_n(k as i64 + 1, a.rem_euclid(torsion[k]) as usize));
    }
    Word(w)
}

/// `lf(x, y)` plus a random integer in `-3..=3`.
fn lift_value(rng: &mut CaseRng, data: &RhsData, x: &[i64], y: &[i64]) -> Rational64 {
    data.lf(x, y) + Rational64::from_integer(rng.gen_range(-3..=3))
}

/// A valid link with `n` components, words included.
pub fn hom_link(rng: &mut CaseRng, case: &CaseOne, n: usize) -> HomLink {
    let data = case.data();
    let classes: Vec<Vec<i64>> =
        (0..n).map(|_| data.torsion().iter().map(|&t| rng.gen_range(0..t)).collect()).collect();
    let zero = Rational64::from_integer(0);
    let mut lk = vec![vec![zero; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = lift_value(rng, data, &classes[i], &classes[j]);
            lk[i][j] = v;
            lk[j][i] = v;
        }
    }
    let components = classes
        .into_iter()
        .map(|c| HomComponent {
            frame: lift_value(rng, data, &c, &c),
            word: Some(class_word(data.torsion(), &c)),
            class: c,
        })
        .collect();
    HomLink { components, lk }
}

/// Linking numbers between the components of two links.
pub fn cross_lk(rng: &mut CaseRng, case: &CaseOne, l1: &HomLink, l2: &HomLink) -> Vec<Vec<Rational64>> {
    l1.components
        .iter()
        .map(|a| l2.components.iter().map(|b| lift_value(rng, case.data(), &a.class, &b.class)).collect())
        .collect()
}

#[derive(Clone, Copy, Debug)]
struct Pt {
    x: f64,
    y: f64,
}

impl Pt {
    fn sub(self, o: Pt) -> Pt {
        Pt { x: self.x - o.x, y: self.y - o.y }
    }

    fn add(self, o: Pt) -> Pt {
        Pt { x: self.x + o.x, y: self.y + o.y }
    }

    fn cross(self, o: Pt) -> f64 {
        self.x * o.y - self.y * o.x
    }
}

/// A closed curve as a polygon in the plane or the universal cover. The last
/// edge ends at `verts[0] + shift`.
struct Polygon {
    verts: Vec<Pt>,
    shift: (i64, i64),
    twists: i64,
}

impl Polygon {
    fn edge(&self, k: usize) -> (Pt, Pt) {
        let m = self.verts.len();
        let end = if k + 1 < m {
            self.verts[k + 1]
        } else {
            self.verts[0].add(Pt { x: self.shift.0 as f64, y: self.shift.1 as f64 })
        };
        (self.verts[k], end)
    }
}

const EPS: f64 = 1e-9;

/// Parameters `(t, u)` of a transverse intersection of `p0 p1` and `q0 q1`.
fn intersect(p0: Pt, p1: Pt, q0: Pt, q1: Pt) -> Option<(f64, f64)> {
    let r = p1.sub(p0);
    let s = q1.sub(q0);
    let den = r.cross(s);
    if den.abs() < 1e-12 {
        return None;
    }
    let w = q0.sub(p0);
    let t = w.cross(s) / den;
    let u = w.cross(r) / den;
    (t > EPS && t < 1.0 - EPS && u > EPS && u < 1.0 - EPS).then_some((t, u))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ambient {
    Torus,
    Planar(usize),
}

/// Letters met along one edge, as `(parameter, letter)`.
fn edge_letters(amb: Ambient, a: Pt, b: Pt) -> Vec<(f64, i64)> {
    let mut out = Vec::new();
    let mut lines = |from: f64, to: f64, other_from: f64, other_to: f64, letter: i64, keep: &dyn Fn(i64, f64) -> bool| {
        if from == to {
            return;
        }
        let (lo, hi) = if from < to { (from, to) } else { (to, from) };
        for k in (lo.ceil() as i64)..=(hi.floor() as i64) {
            let t = (k as f64 - from) / (to - from);
            if t <= 0.0 || t >= 1.0 {
                continue;
            }
            let o = other_from + t * (other_to - other_from);
            if keep(k, o) {
                let dir = if to > from { 1 } else { -1 };
                out.push((t, dir * letter_for(letter, k)));
            }
        }
    };
    match amb {
        Ambient::Torus => {
            lines(a.x, b.x, a.y, b.y, 1, &|_, _| true);
            lines(a.y, b.y, a.x, b.x, 2, &|_, _| true);
        }
        Ambient::Planar(holes) => {
            lines(a.x, b.x, a.y, b.y, 0, &|k, y| k >= 0 && (k as usize) < holes && y > 0.0);
        }
    }
    out
}

/// Torus letters are fixed; planar letters name the puncture.
fn letter_for(letter: i64, k: i64) -> i64 {
    if letter == 0 {
        k + 1
    } else {
        letter
    }
}

/// Turns polygons into a diagram with random over-strands, or `None` when
/// the crossing count exceeds `max_crossings`.
fn build(rng: &mut CaseRng, amb: Ambient, polys: &[Polygon], max_crossings: usize) -> Option<Diagram> {
    // events[comp][edge] = (parameter, item)
    let mut events: Vec<Vec<Vec<(f64, Item)>>> = polys
        .iter()
        .map(|p| {
            (0..p.verts.len())
                .map(|k| {
                    let (a, b) = p.edge(k);
                    edge_letters(amb, a, b).into_iter().map(|(t, l)| (t, Item::Letter(l))).collect()
                })
                .collect()
        })
        .collect();
    let mut signs = BTreeMap::new();
    let mut next = 0u32;
    for i in 0..polys.len() {
        for j in i..polys.len() {
            let (mi, mj) = (polys[i].verts.len(), polys[j].verts.len());
            for k in 0..mi {
                let l_start = if i == j { k + 1 } else { 0 };
                for l in l_start..mj {
                    let (p0, p1) = polys[i].edge(k);
                    let (q0, q1) = polys[j].edge(l);
                    let translates: Vec<(i64, i64)> = match amb {
                        Ambient::Planar(_) => vec![(0, 0)],
                        Ambient::Torus => lattice_range(p0, p1, q0, q1),
                    };
                    for v in translates {
                        if i == j {
                            let s = polys[i].shift;
                            if (l == k + 1 && v == (0, 0)) || (k == 0 && l == mi - 1 && v == (-s.0, -s.1)) {
                                continue;
                            }
                        }
                        let off = Pt { x: v.0 as f64, y: v.1 as f64 };
                        let Some((t, u)) = intersect(p0, p1, q0.add(off), q1.add(off)) else {
                            continue;
                        };
                        if signs.len() >= max_crossings {
                            return None;
                        }
                        let first_over = rng.gen_bool(0.5);
                        let r = p1.sub(p0);
                        let s = q1.sub(q0);
                        let c = if first_over { r.cross(s) } else { s.cross(r) };
                        signs.insert(next, if c > 0.0 { 1 } else { -1 });
                        events[i][k].push((t, Item::Pass { crossing: next, over: first_over }));
                        events[j][l].push((u, Item::Pass { crossing: next, over: !first_over }));
                        next += 1;
                    }
                }
            }
        }
    }
    let components = events
        .into_iter()
        .zip(polys)
        .map(|(edges, p)| {
            let mut items = Vec::new();
            for mut e in edges {
                e.sort_by(|a, b| a.0.total_cmp(&b.0));
                items.extend(e.into_iter().map(|(_, it)| it));
            }
            Component { twists: p.twists, items }
        })
        .collect();
    Some(Diagram::new(components, signs))
}

/// Translates `v` for which `q + v` can meet `p`.
fn lattice_range(p0: Pt, p1: Pt, q0: Pt, q1: Pt) -> Vec<(i64, i64)> {
    let lo_x = (p0.x.min(p1.x) - q0.x.max(q1.x)).floor() as i64;
    let hi_x = (p0.x.max(p1.x) - q0.x.min(q1.x)).ceil() as i64;
    let lo_y = (p0.y.min(p1.y) - q0.y.max(q1.y)).floor() as i64;
    let hi_y = (p0.y.max(p1.y) - q0.y.min(q1.y)).ceil() as i64;
    let mut out = Vec::new();
    for x in lo_x..=hi_x {
        for y in lo_y..=hi_y {
            out.push((x, y));
        }
    }
    out
}

fn torus_polygon(rng: &mut CaseRng) -> Polygon {
    let shift = (rng.gen_range(-1..=1), rng.gen_range(-1..=1));
    let m = if shift == (0, 0) { rng.gen_range(3..=5) } else { rng.gen_range(1..=4) };
    let base = Pt { x: rng.gen::<f64>(), y: rng.gen::<f64>() };
    let verts = (0..m)
        .map(|k| {
            let f = k as f64 / m as f64;
            let jitter = if k == 0 { 0.0 } else { 0.45 };
            Pt {
                x: base.x + f * shift.0 as f64 + rng.gen_range(-jitter..=jitter),
                y: base.y + f * shift.1 as f64 + rng.gen_range(-jitter..=jitter),
            }
        })
        .collect();
    Polygon { verts, shift, twists: rng.gen_range(-2..=2) }
}

fn planar_polygon(rng: &mut CaseRng, holes: usize) -> Polygon {
    let winding: i64 = *[1, 1, -1, 2].choose(rng).expect("nonempty");
    let m = rng.gen_range(3..=5) * winding.unsigned_abs() as usize;
    let center = Pt { x: rng.gen_range(-1.0..holes as f64), y: rng.gen_range(-1.0..1.0) };
    let step = TAU * winding as f64 / m as f64;
    let verts = (0..m)
        .map(|k| {
            let theta = step * (k as f64 + rng.gen_range(-0.3..0.3));
            let r = rng.gen_range(0.3..2.2);
            Pt { x: center.x + r * theta.cos(), y: center.y + r * theta.sin() }
        })
        .collect();
    Polygon { verts, shift: (0, 0), twists: rng.gen_range(-2..=2) }
}

fn diagram_with(
    rng: &mut CaseRng,
    amb: Ambient,
    surface: &SurfaceModel,
    n: usize,
    max_crossings: usize,
) -> Diagram {
    loop {
        let polys: Vec<Polygon> = (0..n)
            .map(|_| match amb {
                Ambient::Torus => torus_polygon(rng),
                Ambient::Planar(h) => planar_polygon(rng, h),
            })
            .collect();
        if let Some(d) = build(rng, amb, &polys, max_crossings) {
            if d.validate(surface).is_ok() {
                return d;
            }
        }
    }
}

/// A diagram on the torus with `n` components.
pub fn torus_diagram(rng: &mut CaseRng, n: usize, max_crossings: usize) -> Diagram {
    diagram_with(rng, Ambient::Torus, &SurfaceModel::torus(), n, max_crossings)
}

/// A diagram in the plane with `holes` punctures and `n` components.
pub fn planar_diagram(rng: &mut CaseRng, holes: usize, n: usize, max_crossings: usize) -> Diagram {
    let surface = SurfaceModel::planar(holes).expect("at least one hole");
    diagram_with(rng, Ambient::Planar(holes), &surface, n, max_crossings)
}

/// Either a torus or a planar (two holes) diagram with `1..=max_n`
/// components, together with its surface.
pub fn mixed_diagram(rng: &mut CaseRng, max_n: usize, max_crossings: usize) -> (SurfaceModel, Diagram) {
    let n = rng.gen_range(1..=max_n);
    if rng.gen_bool(0.5) {
        (SurfaceModel::torus(), torus_diagram(rng, n, max_crossings))
    } else {
        (SurfaceModel::planar(2).expect("valid"), planar_diagram(rng, 2, n, max_crossings))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generated_diagrams_are_valid() {
        let mut rng = CaseRng::seed_from_u64(11);
        let t = SurfaceModel::torus();
        let p = SurfaceModel::planar(3).unwrap();
        let mut crossings = 0;
        for _ in 0..100 {
            let d = torus_diagram(&mut rng, 3, DEFAULT_MAX_CROSSINGS);
            assert_eq!(d.validate(&t), Ok(()));
            crossings += d.crossing_count();
            let d = planar_diagram(&mut rng, 3, 2, DEFAULT_MAX_CROSSINGS);
            assert_eq!(d.validate(&p), Ok(()));
            crossings += d.crossing_count();
        }
        assert!(crossings > 200, "too few crossings: {crossings}");
    }

    #[test]
    fn smoothings_of_generated_diagrams_stay_valid() {
        use crate::diagrams::Smoothing;
        let mut rng = CaseRng::seed_from_u64(5);
        for _ in 0..50 {
            let (s, d) = mixed_diagram(&mut rng, 3, 8);
            for c in d.crossing_ids() {
                for k in [Smoothing::A, Smoothing::B] {
                    assert_eq!(d.smooth(c, k).unwrap().validate(&s), Ok(()));
                }
            }
        }
    }

    #[test]
    fn hom_links_are_valid() {
        let mut rng = CaseRng::seed_from_u64(2);
        for _ in 0..50 {
            let case = CaseOne::new(rhs_data(&mut rng, 4));
            let l = hom_link(&mut rng, &case, 3);
            assert_eq!(case.validate(&l), Ok(()));
        }
    }

    #[test]
    fn same_seed_same_diagram() {
        let a = torus_diagram(&mut CaseRng::seed_from_u64(9), 2, 10);
        let b = torus_diagram(&mut CaseRng::seed_from_u64(9), 2, 10);
        assert_eq!(a, b);
    }
}
