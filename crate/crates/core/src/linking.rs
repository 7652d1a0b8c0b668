//! Links in submanifolds of rational homology spheres, recorded homologically.
//!
//! Every quantity used for such links (the lifted linking form, the defect
//! `d`, and its framed version `D`) depends only on homology classes,
//! pairwise linking numbers and framings, so a [`HomLink`] carries exactly
//! those, plus optional words in `pi_1(M)` for the skein algebra side.

use num_rational::Rational64;
use thiserror::Error;

use crate::groups::Word;
use crate::ring::{lcm, QuarterFrac, Z4Exp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkingError {
    #[error("torsion order {0} is even; 2-torsion is not supported")]
    EvenTorsion(i64),
    #[error("torsion order {0} must be at least 3")]
    TorsionTooSmall(i64),
    #[error("lf must be a {expected}x{expected} matrix")]
    LfShape { expected: usize },
    #[error("lf is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("lf({i},{j}) has denominator {den}, which does not divide r = {r}")]
    Denominator { i: usize, j: usize, den: i64, r: i64 },
    #[error("lf({i},{j}) is not annihilated by the orders of generators {i} and {j}")]
    NotAnnihilated { i: usize, j: usize },
    #[error("component {comp} has a class with {got} coordinates, expected {expected}")]
    ClassShape { comp: usize, got: usize, expected: usize },
    #[error("lk must be a symmetric {expected}x{expected} matrix")]
    LkShape { expected: usize },
    #[error("lk({i},{j}) is not congruent to the linking form of the classes mod Z")]
    LkCongruence { i: usize, j: usize },
    #[error("frame of component {0} is not congruent to lf of its class mod Z")]
    FrameCongruence(usize),
    #[error("component index {0} out of range")]
    ComponentOutOfRange(usize),
    #[error("d is only defined between distinct components, got {0} twice")]
    SameComponent(usize),
    #[error("splitting has {got} entries for {expected} components")]
    SplittingShape { got: usize, expected: usize },
}

fn frac(x: Rational64) -> Rational64 {
    x - x.floor()
}

fn to_qf(x: Rational64) -> QuarterFrac {
    QuarterFrac::new(*x.numer(), *x.denom())
}

/// Torsion of `H_1(N)` as a sum of cyclic groups, with its linking form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhsData {
    torsion: Vec<i64>,
    r: i64,
    lf: Vec<Vec<Rational64>>,
}

impl RhsData {
    /// Validates the data. `lf` entries are taken mod `Z`.
    pub fn new(torsion: Vec<i64>, lf: Vec<Vec<Rational64>>) -> Result<Self, LinkingError> {
        let k = torsion.len();
        for &n in &torsion {
            if n % 2 == 0 {
                return Err(LinkingError::EvenTorsion(n));
            }
            if n < 3 {
                return Err(LinkingError::TorsionTooSmall(n));
            }
        }
        if lf.len() != k || lf.iter().any(|row| row.len() != k) {
            return Err(LinkingError::LfShape { expected: k });
        }
        let r = torsion.iter().fold(1, |acc, &n| lcm(acc, n));
        let lf: Vec<Vec<Rational64>> =
            lf.into_iter().map(|row| row.into_iter().map(frac).collect()).collect();
        for i in 0..k {
            for j in 0..k {
                if lf[i][j] != lf[j][i] {
                    return Err(LinkingError::Asymmetric(i, j));
                }
                let den = *lf[i][j].denom();
                if r % den != 0 {
                    return Err(LinkingError::Denominator { i, j, den, r });
                }
                let ni = Rational64::from_integer(torsion[i]);
                let nj = Rational64::from_integer(torsion[j]);
                if !(ni * lf[i][j]).is_integer() || !(nj * lf[i][j]).is_integer() {
                    return Err(LinkingError::NotAnnihilated { i, j });
                }
            }
        }
        Ok(RhsData { torsion, r, lf })
    }

    /// `S^3`: no torsion, integral linking numbers.
    pub fn s3() -> Self {
        RhsData { torsion: vec![], r: 1, lf: vec![] }
    }

    pub fn torsion(&self) -> &[i64] {
        &self.torsion
    }

    /// Least common annihilator of the torsion.
    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn lf_matrix(&self) -> &[Vec<Rational64>] {
        &self.lf
    }

    /// `lf(x, y)` in `[0, 1)`.
    pub fn lf(&self, x: &[i64], y: &[i64]) -> Rational64 {
        let mut s = Rational64::from_integer(0);
        for (i, &a) in x.iter().enumerate() {
            for (j, &b) in y.iter().enumerate() {
                s += self.lf[i][j] * Rational64::from_integer(a * b);
            }
        }
        frac(s)
    }
}

/// The lifted form with values in `(1/r)Z/4Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LfHat {
    entries: Vec<Vec<QuarterFrac>>,
}

impl LfHat {
    pub fn matrix(&self) -> &[Vec<QuarterFrac>] {
        &self.entries
    }

    /// Bilinear extension to arbitrary coordinate vectors.
    pub fn eval(&self, x: &[i64], y: &[i64]) -> QuarterFrac {
        let mut s = QuarterFrac::zero();
        for (i, &a) in x.iter().enumerate() {
            for (j, &b) in y.iter().enumerate() {
                s = s + self.entries[i][j] * (a * b);
            }
        }
        s
    }
}

/// Lifts each `lf(g_i, g_j) = k/l` to `(k + delta*l)/l` where `delta` is the
/// unique residue in `{0,1,2,3}` making `k + delta*l` divisible by 4.
pub fn lift_linking_form(data: &RhsData) -> LfHat {
    let entries = data
        .lf
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let (k, l) = (*x.numer(), *x.denom());
                    // l is odd, so l^-1 = l mod 4
                    let delta = (-k * l).rem_euclid(4);
                    QuarterFrac::new(k + delta * l, l)
                })
                .collect()
        })
        .collect();
    LfHat { entries }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomComponent {
    /// Class in the torsion of `H_1(N)`, one residue per cyclic factor.
    pub class: Vec<i64>,
    /// Optional word in `pi_1(M)`.
    pub word: Option<Word>,
    /// `lk(d+ K, d- K)`, the framing as a linking number.
    pub frame: Rational64,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HomLink {
    pub components: Vec<HomComponent>,
    /// Pairwise linking numbers; the diagonal is ignored.
    pub lk: Vec<Vec<Rational64>>,
}

impl HomLink {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Keeps the listed components, in the given order.
    pub fn sublink(&self, idx: &[usize]) -> HomLink {
        HomLink {
            components: idx.iter().map(|&i| self.components[i].clone()).collect(),
            lk: idx.iter().map(|&i| idx.iter().map(|&j| self.lk[i][j]).collect()).collect(),
        }
    }

    /// Disjoint union; `cross[a][b]` is the linking number between component
    /// `a` of `self` and component `b` of `other`.
    pub fn union(&self, other: &HomLink, cross: &[Vec<Rational64>]) -> HomLink {
        let (n, m) = (self.len(), other.len());
        let zero = Rational64::from_integer(0);
        let mut lk = vec![vec![zero; n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                lk[i][j] = self.lk[i][j];
            }
            for b in 0..m {
                lk[i][n + b] = cross[i][b];
                lk[n + b][i] = cross[i][b];
            }
        }
        for a in 0..m {
            for b in 0..m {
                lk[n + a][n + b] = other.lk[a][b];
            }
        }
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        HomLink { components, lk }
    }
}

/// Rational homology sphere data together with its lifted linking form.
#[derive(Clone, Debug)]
pub struct CaseOne {
    data: RhsData,
    hat: LfHat,
}

impl CaseOne {
    pub fn new(data: RhsData) -> Self {
        let hat = lift_linking_form(&data);
        CaseOne { data, hat }
    }

    pub fn data(&self) -> &RhsData {
        &self.data
    }

    pub fn hat(&self) -> &LfHat {
        &self.hat
    }

    fn reduce(&self, class: &[i64]) -> Vec<i64> {
        class.iter().zip(&self.data.torsion).map(|(&a, &n)| a.rem_euclid(n)).collect()
    }

    pub fn validate(&self, link: &HomLink) -> Result<(), LinkingError> {
        let n = link.len();
        let k = self.data.torsion.len();
        for (c, comp) in link.components.iter().enumerate() {
            if comp.class.len() != k {
                return Err(LinkingError::ClassShape { comp: c, got: comp.class.len(), expected: k });
            }
        }
        if link.lk.len() != n || link.lk.iter().any(|row| row.len() != n) {
            return Err(LinkingError::LkShape { expected: n });
        }
        for i in 0..n {
            let ci = &link.components[i].class;
            if frac(link.components[i].frame) != self.data.lf(ci, ci) {
                return Err(LinkingError::FrameCongruence(i));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if link.lk[i][j] != link.lk[j][i] {
                    return Err(LinkingError::LkShape { expected: n });
                }
                let cj = &link.components[j].class;
                if frac(link.lk[i][j]) != self.data.lf(ci, cj) {
                    return Err(LinkingError::LkCongruence { i, j });
                }
            }
        }
        Ok(())
    }

    fn integral(&self, x: QuarterFrac, err: LinkingError) -> Result<Z4Exp, LinkingError> {
        x.to_z4().ok_or(err)
    }

    /// `d(K_i, K_j) = lf^(K_i, K_j) - lk(K_i, K_j)`.
    pub fn d(&self, link: &HomLink, i: usize, j: usize) -> Result<Z4Exp, LinkingError> {
        let n = link.len();
        if i >= n || j >= n {
            return Err(LinkingError::ComponentOutOfRange(i.max(j)));
        }
        if i == j {
            return Err(LinkingError::SameComponent(i));
        }
        let ci = self.reduce(&link.components[i].class);
        let cj = self.reduce(&link.components[j].class);
        let v = self.hat.eval(&ci, &cj) - to_qf(link.lk[i][j]);
        self.integral(v, LinkingError::LkCongruence { i, j })
    }

    /// `D(K_i) = lf^(K_i, K_i) - frame_i`.
    pub fn big_d(&self, link: &HomLink, i: usize) -> Result<Z4Exp, LinkingError> {
        let comp = link.components.get(i).ok_or(LinkingError::ComponentOutOfRange(i))?;
        let c = self.reduce(&comp.class);
        let v = self.hat.eval(&c, &c) - to_qf(comp.frame);
        self.integral(v, LinkingError::FrameCongruence(i))
    }

    /// `d` between the sublinks made of components `a` and of components `b`,
    /// computed from their total classes and total linking number.
    pub fn d_sublinks(&self, link: &HomLink, a: &[usize], b: &[usize]) -> Result<Z4Exp, LinkingError> {
        let k = self.data.torsion.len();
        let total = |idx: &[usize]| {
            let mut v = vec![0i64; k];
            for &i in idx {
                for (x, y) in v.iter_mut().zip(&link.components[i].class) {
                    *x += y;
                }
            }
            self.reduce(&v)
        };
        let mut lk = Rational64::from_integer(0);
        for &i in a {
            for &j in b {
                if i == j {
                    return Err(LinkingError::SameComponent(i));
                }
                lk += link.lk[i][j];
            }
        }
        let v = self.hat.eval(&total(a), &total(b)) - to_qf(lk);
        self.integral(v, LinkingError::LkCongruence { i: a.first().copied().unwrap_or(0), j: b.first().copied().unwrap_or(0) })
    }

    /// `d(d+ L, d- L)` for the splitting in which `plus[i]` selects which
    /// boundary copy of `K_i` goes into `d+ L`.
    ///
    /// The boundary of the framed link is built explicitly as a `2n`-component
    /// link (copy `2i` is the `+` side of `K_i`) and `d` is evaluated between
    /// the two halves of the splitting.
    pub fn split_d(&self, link: &HomLink, plus: &[bool]) -> Result<Z4Exp, LinkingError> {
        let n = link.len();
        if plus.len() != n {
            return Err(LinkingError::SplittingShape { got: plus.len(), expected: n });
        }
        let mut boundary = HomLink::default();
        for comp in &link.components {
            for _ in 0..2 {
                boundary.components.push(HomComponent {
                    class: comp.class.clone(),
                    word: None,
                    frame: comp.frame,
                });
            }
        }
        let zero = Rational64::from_integer(0);
        boundary.lk = vec![vec![zero; 2 * n]; 2 * n];
        for a in 0..2 * n {
            for b in 0..2 * n {
                let (i, j) = (a / 2, b / 2);
                boundary.lk[a][b] = if a == b {
                    zero
                } else if i == j {
                    link.components[i].frame
                } else {
                    link.lk[i][j]
                };
            }
        }
        let pos: Vec<usize> = (0..n).map(|i| 2 * i + usize::from(!plus[i])).collect();
        let neg: Vec<usize> = (0..n).map(|i| 2 * i + usize::from(plus[i])).collect();
        self.d_sublinks(&boundary, &pos, &neg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn comp(class: Vec<i64>, frame: Rational64) -> HomComponent {
        HomComponent { class, word: None, frame }
    }

    /// delta by search over {0,1,2,3}
    fn delta_by_search(k: i64, l: i64) -> i64 {
        (0..4).find(|d| (k + d * l) % 4 == 0).unwrap()
    }

    #[test]
    fn lift_examples() {
        let d = RhsData::new(vec![5], vec![vec![q(1, 5)]]).unwrap();
        assert_eq!(delta_by_search(1, 5), 3);
        assert_eq!(lift_linking_form(&d).matrix()[0][0], QuarterFrac::new(16, 5));
        let d = RhsData::new(vec![3], vec![vec![q(2, 3)]]).unwrap();
        assert_eq!(delta_by_search(2, 3), 2);
        assert_eq!(lift_linking_form(&d).matrix()[0][0], QuarterFrac::new(8, 3));
        let d = RhsData::new(vec![3, 5], vec![vec![q(1, 3), q(0, 1)], vec![q(0, 1), q(2, 5)]]).unwrap();
        let hat = lift_linking_form(&d);
        assert_eq!(hat.matrix()[0][1], QuarterFrac::zero());
    }

    #[test]
    fn lift_rejects_bad_data() {
        assert_eq!(RhsData::new(vec![4], vec![vec![q(1, 4)]]), Err(LinkingError::EvenTorsion(4)));
        assert_eq!(
            RhsData::new(vec![3, 3], vec![vec![q(1, 3), q(1, 3)], vec![q(2, 3), q(1, 3)]]),
            Err(LinkingError::Asymmetric(0, 1))
        );
        assert!(matches!(
            RhsData::new(vec![5], vec![vec![q(1, 3)]]),
            Err(LinkingError::Denominator { den: 3, r: 5, .. })
        ));
        assert_eq!(
            RhsData::new(vec![3, 5], vec![vec![q(0, 1), q(1, 3)], vec![q(1, 3), q(0, 1)]]),
            Err(LinkingError::NotAnnihilated { i: 0, j: 1 })
        );
    }

    #[test]
    fn d_examples() {
        let s3 = CaseOne::new(RhsData::s3());
        let hopf = HomLink {
            components: vec![comp(vec![], q(0, 1)), comp(vec![], q(0, 1))],
            lk: vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]],
        };
        s3.validate(&hopf).unwrap();
        assert_eq!(s3.d(&hopf, 0, 1).unwrap(), Z4Exp::new(3));
        assert_eq!(s3.d(&hopf, 1, 0).unwrap(), Z4Exp::new(3));

        let unlink = HomLink {
            components: vec![comp(vec![], q(0, 1)), comp(vec![], q(1, 1))],
            lk: vec![vec![q(0, 1); 2]; 2],
        };
        assert_eq!(s3.d(&unlink, 0, 1).unwrap(), Z4Exp::new(0));
        assert_eq!(s3.big_d(&unlink, 0).unwrap(), Z4Exp::new(0));
        assert_eq!(s3.big_d(&unlink, 1).unwrap(), Z4Exp::new(3));

        let l5 = CaseOne::new(RhsData::new(vec![5], vec![vec![q(1, 5)]]).unwrap());
        let link = HomLink {
            components: vec![comp(vec![1], q(1, 5)), comp(vec![1], q(1, 5))],
            lk: vec![vec![q(0, 1), q(1, 5)], vec![q(1, 5), q(0, 1)]],
        };
        l5.validate(&link).unwrap();
        assert_eq!(l5.d(&link, 0, 1).unwrap(), Z4Exp::new(3));
        assert_eq!(l5.big_d(&link, 0).unwrap(), Z4Exp::new(3));
    }

    #[test]
    fn congruence_violations() {
        let l5 = CaseOne::new(RhsData::new(vec![5], vec![vec![q(1, 5)]]).unwrap());
        let bad = HomLink {
            components: vec![comp(vec![1], q(1, 5)), comp(vec![1], q(1, 5))],
            lk: vec![vec![q(0, 1), q(2, 5)], vec![q(2, 5), q(0, 1)]],
        };
        assert_eq!(l5.validate(&bad), Err(LinkingError::LkCongruence { i: 0, j: 1 }));
        assert_eq!(l5.d(&bad, 0, 1), Err(LinkingError::LkCongruence { i: 0, j: 1 }));
        let bad_frame = HomLink { components: vec![comp(vec![1], q(0, 1))], lk: vec![vec![q(0, 1)]] };
        assert_eq!(l5.validate(&bad_frame), Err(LinkingError::FrameCongruence(0)));
        assert_eq!(l5.big_d(&bad_frame, 0), Err(LinkingError::FrameCongruence(0)));
    }

    #[test]
    fn split_examples() {
        let s3 = CaseOne::new(RhsData::s3());
        let knot = HomLink { components: vec![comp(vec![], q(1, 1))], lk: vec![vec![q(0, 1)]] };
        for p in [true, false] {
            assert_eq!(s3.split_d(&knot, &[p]).unwrap(), s3.big_d(&knot, 0).unwrap());
        }
        let hopf = HomLink {
            components: vec![comp(vec![], q(0, 1)), comp(vec![], q(0, 1))],
            lk: vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]],
        };
        for s in [[true, true], [true, false], [false, true], [false, false]] {
            assert_eq!(s3.split_d(&hopf, &s).unwrap(), Z4Exp::new(2));
        }
        assert_eq!(
            s3.split_d(&hopf, &[true]),
            Err(LinkingError::SplittingShape { got: 1, expected: 2 })
        );
    }
}
