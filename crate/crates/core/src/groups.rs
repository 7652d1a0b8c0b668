//! Group backends: word arithmetic, homology, the skew form `omega`, and
//! canonical representatives of `~`-classes (conjugacy up to inversion).
//!
//! Three backends are supported: finitely generated abelian groups with odd
//! torsion, free groups (optionally carrying a skew form, as for punctured
//! surfaces), and closed surface groups of genus at least two.
//!
//! Generators are numbered from 1 and a word is a sequence of signed
//! generator indices, so `[1, -2, 1]` is `g1 g2^-1 g1`. Abelian groups number
//! the free generators first and the torsion generators after them.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Matrix = Vec<Vec<i64>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generator index {letter} out of range for a group with {rank} generators")]
    GeneratorOutOfRange { letter: i64, rank: usize },
    #[error("torsion order {0} is even; only odd torsion is supported")]
    EvenTorsion(i64),
    #[error("torsion order {0} must be at least 3")]
    TorsionTooSmall(i64),
    #[error("omega must be a {expected}x{expected} matrix")]
    OmegaShape { expected: usize },
    #[error("omega is not skew-symmetric at ({0}, {1})")]
    OmegaNotSkew(usize, usize),
    #[error("free group rank must be at least 1")]
    RankZero,
    #[error("surface genus must be at least 2, got {0}")]
    GenusTooSmall(usize),
    #[error("class representative {0:?} does not belong to this group")]
    BadClassRep(Vec<i64>),
}

/// A word in the generators; see the module docs for the encoding.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<i64>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[i64] {
        &self.0
    }

    /// Formal inverse, without reduction.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|x| -x).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl From<Vec<i64>> for Word {
    fn from(v: Vec<i64>) -> Self {
        Word(v)
    }
}

/// Canonical representative of a `~`-class.
///
/// For abelian backends this is the normalized exponent vector; for free and
/// surface groups it is a reduced word. Ordering uses the letter order
/// `g1 < g1^-1 < g2 < g2^-1 < ...` lexicographically, shorter prefixes first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassRep(pub Vec<i64>);

impl ClassRep {
    pub fn entries(&self) -> &[i64] {
        &self.0
    }
}

impl Ord for ClassRep {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_letters(&self.0, &other.0)
    }
}

impl PartialOrd for ClassRep {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ClassRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

fn letter_key(x: i64) -> (u64, bool) {
    (x.unsigned_abs(), x < 0)
}

fn cmp_letters(a: &[i64], b: &[i64]) -> Ordering {
    a.iter().map(|&x| letter_key(x)).cmp(b.iter().map(|&x| letter_key(x)))
}

/// First homology class: free coordinates and torsion residues.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HomClass {
    pub free: Vec<i64>,
    pub torsion: Vec<i64>,
}

/// A `~`-class together with whether its canonical form is trustworthy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classified {
    pub rep: ClassRep,
    /// False when the canonical form may differ between `~`-equivalent words
    /// (closed surface words containing exactly half of a relator).
    pub reliable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Abelian {
        free_rank: usize,
        torsion: Vec<i64>,
        omega: Option<Matrix>,
    },
    Free {
        rank: usize,
        omega: Option<Matrix>,
    },
    Surface {
        genus: usize,
        relators: Vec<Vec<i64>>,
    },
}

/// A validated group backend.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupJson", into = "GroupJson")]
pub struct GroupSpec {
    kind: Kind,
}

/// JSON layout of a [`GroupSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupJson {
    Abelian {
        free_rank: usize,
        #[serde(default)]
        torsion: Vec<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<Matrix>,
    },
    Free {
        rank: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<Matrix>,
    },
    Surface {
        genus: usize,
    },
}

impl TryFrom<GroupJson> for GroupSpec {
    type Error = GroupError;

    fn try_from(j: GroupJson) -> Result<Self, Self::Error> {
        match j {
            GroupJson::Abelian { free_rank, torsion, omega } => {
                GroupSpec::abelian(free_rank, torsion, omega)
            }
            GroupJson::Free { rank, omega } => GroupSpec::free(rank, omega),
            GroupJson::Surface { genus } => GroupSpec::surface(genus),
        }
    }
}

impl From<GroupSpec> for GroupJson {
    fn from(g: GroupSpec) -> Self {
        match g.kind {
            Kind::Abelian { free_rank, torsion, omega } => {
                GroupJson::Abelian { free_rank, torsion, omega }
            }
            Kind::Free { rank, omega } => GroupJson::Free { rank, omega },
            Kind::Surface { genus, .. } => GroupJson::Surface { genus },
        }
    }
}

fn check_omega(m: &Option<Matrix>, n: usize) -> Result<Option<Matrix>, GroupError> {
    let Some(m) = m else { return Ok(None) };
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(GroupError::OmegaShape { expected: n });
    }
    for i in 0..n {
        for j in 0..n {
            if m[i][j] != -m[j][i] {
                return Err(GroupError::OmegaNotSkew(i, j));
            }
        }
    }
    if m.iter().flatten().all(|&x| x == 0) {
        Ok(None)
    } else {
        Ok(Some(m.clone()))
    }
}

/// The standard symplectic matrix on `a1, b1, ..., ag, bg`.
pub fn symplectic_matrix(genus: usize) -> Matrix {
    let n = 2 * genus;
    let mut m = vec![vec![0; n]; n];
    for i in 0..genus {
        m[2 * i][2 * i + 1] = 1;
        m[2 * i + 1][2 * i] = -1;
    }
    m
}

impl GroupSpec {
    pub fn abelian(
        free_rank: usize,
        torsion: Vec<i64>,
        omega: Option<Matrix>,
    ) -> Result<Self, GroupError> {
        for &n in &torsion {
            if n % 2 == 0 {
                return Err(GroupError::EvenTorsion(n));
            }
            if n < 3 {
                return Err(GroupError::TorsionTooSmall(n));
            }
        }
        // omega is integer valued, so it vanishes on torsion; it is given on
        // the free coordinates only
        let omega = check_omega(&omega, free_rank)?;
        Ok(GroupSpec { kind: Kind::Abelian { free_rank, torsion, omega } })
    }

    /// `Z^2` with `omega(a, b) = 1`, the fundamental group of the torus.
    pub fn torus() -> Self {
        GroupSpec::abelian(2, vec![], Some(symplectic_matrix(1))).expect("valid torus")
    }

    /// `Z/n`, the fundamental group of a lens space.
    pub fn cyclic(n: i64) -> Result<Self, GroupError> {
        GroupSpec::abelian(0, vec![n], None)
    }

    pub fn free(rank: usize, omega: Option<Matrix>) -> Result<Self, GroupError> {
        if rank == 0 {
            return Err(GroupError::RankZero);
        }
        let omega = check_omega(&omega, rank)?;
        Ok(GroupSpec { kind: Kind::Free { rank, omega } })
    }

    pub fn surface(genus: usize) -> Result<Self, GroupError> {
        if genus < 2 {
            return Err(GroupError::GenusTooSmall(genus));
        }
        let mut rel = Vec::with_capacity(4 * genus);
        for i in 0..genus as i64 {
            let (a, b) = (2 * i + 1, 2 * i + 2);
            rel.extend_from_slice(&[a, b, -a, -b]);
        }
        let inv: Vec<i64> = rel.iter().rev().map(|x| -x).collect();
        let mut relators = Vec::with_capacity(8 * genus);
        for r in [&rel, &inv] {
            for k in 0..r.len() {
                relators.push(rotate(r, k));
            }
        }
        Ok(GroupSpec { kind: Kind::Surface { genus, relators } })
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self.kind, Kind::Abelian { .. })
    }

    pub fn has_torsion(&self) -> bool {
        matches!(&self.kind, Kind::Abelian { torsion, .. } if !torsion.is_empty())
    }

    pub fn torsion(&self) -> &[i64] {
        match &self.kind {
            Kind::Abelian { torsion, .. } => torsion,
            _ => &[],
        }
    }

    pub fn omega_is_zero(&self) -> bool {
        match &self.kind {
            Kind::Abelian { omega, .. } | Kind::Free { omega, .. } => omega.is_none(),
            Kind::Surface { .. } => false,
        }
    }

    /// Number of generators.
    pub fn rank(&self) -> usize {
        match &self.kind {
            Kind::Abelian { free_rank, torsion, .. } => free_rank + torsion.len(),
            Kind::Free { rank, .. } => *rank,
            Kind::Surface { genus, .. } => 2 * genus,
        }
    }

    pub fn check_word(&self, w: &Word) -> Result<(), GroupError> {
        let rank = self.rank();
        match w.0.iter().find(|&&x| x == 0 || x.unsigned_abs() as usize > rank) {
            Some(&letter) => Err(GroupError::GeneratorOutOfRange { letter, rank }),
            None => Ok(()),
        }
    }

    /// Normal form of a word: free reduction for free groups, Dehn reduction
    /// for surface groups, the sorted exponent form for abelian groups.
    pub fn normalize(&self, w: &Word) -> Word {
        match &self.kind {
            Kind::Abelian { .. } => self.vector_word(&self.exponents(w)),
            Kind::Free { .. } => Word(free_reduce(&w.0)),
            Kind::Surface { genus, relators } => Word(dehn_reduce(&w.0, *genus, relators)),
        }
    }

    pub fn mul(&self, g: &Word, h: &Word) -> Result<Word, GroupError> {
        self.check_word(g)?;
        self.check_word(h)?;
        Ok(self.normalize(&g.concat(h)))
    }

    pub fn inv(&self, g: &Word) -> Result<Word, GroupError> {
        self.check_word(g)?;
        Ok(self.normalize(&g.inverse()))
    }

    pub fn is_identity(&self, g: &Word) -> Result<bool, GroupError> {
        self.check_word(g)?;
        Ok(match &self.kind {
            Kind::Abelian { .. } => self.exponents(g).iter().all(|&e| e == 0),
            _ => self.normalize(g).is_empty(),
        })
    }

    /// Exponent vector, torsion coordinates reduced into `[0, n)`.
    fn exponents(&self, w: &Word) -> Vec<i64> {
        let mut v = vec![0i64; self.rank()];
        for &x in &w.0 {
            v[x.unsigned_abs() as usize - 1] += x.signum();
        }
        self.reduce_vector(&mut v);
        v
    }

    fn reduce_vector(&self, v: &mut [i64]) {
        if let Kind::Abelian { free_rank, torsion, .. } = &self.kind {
            for (k, &n) in torsion.iter().enumerate() {
                v[free_rank + k] = v[free_rank + k].rem_euclid(n);
            }
        }
    }

    fn vector_word(&self, v: &[i64]) -> Word {
        let mut out = Vec::new();
        for (k, &e) in v.iter().enumerate() {
            let g = (k + 1) as i64 * e.signum();
            out.extend(std::iter::repeat_n(g, e.unsigned_abs() as usize));
        }
        Word(out)
    }

    pub fn homology(&self, w: &Word) -> HomClass {
        let mut v = vec![0i64; self.rank()];
        for &x in &w.0 {
            v[x.unsigned_abs() as usize - 1] += x.signum();
        }
        match &self.kind {
            Kind::Abelian { free_rank, torsion, .. } => {
                let t = v[*free_rank..]
                    .iter()
                    .zip(torsion)
                    .map(|(&e, &n)| e.rem_euclid(n))
                    .collect();
                v.truncate(*free_rank);
                HomClass { free: v, torsion: t }
            }
            _ => HomClass { free: v, torsion: vec![] },
        }
    }

    pub fn omega_hom(&self, x: &HomClass, y: &HomClass) -> i64 {
        let m = match &self.kind {
            Kind::Abelian { omega: Some(m), .. } | Kind::Free { omega: Some(m), .. } => m,
            Kind::Surface { genus, .. } => {
                return (0..*genus)
                    .map(|i| x.free[2 * i] * y.free[2 * i + 1] - x.free[2 * i + 1] * y.free[2 * i])
                    .sum();
            }
            _ => return 0,
        };
        let mut s = 0;
        for (i, row) in m.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                s += x.free[i] * c * y.free[j];
            }
        }
        s
    }

    /// `omega([g], [h])`.
    pub fn omega(&self, g: &Word, h: &Word) -> i64 {
        self.omega_hom(&self.homology(g), &self.homology(h))
    }

    pub fn class_rep(&self, g: &Word) -> ClassRep {
        self.classify(g).rep
    }

    pub fn classify(&self, g: &Word) -> Classified {
        match &self.kind {
            Kind::Abelian { free_rank, .. } => {
                let v = self.exponents(g);
                let mut neg: Vec<i64> = v.iter().map(|x| -x).collect();
                self.reduce_vector(&mut neg);
                let pick_v = match v[..*free_rank].iter().find(|&&x| x != 0) {
                    Some(&x) => x > 0,
                    None => v[*free_rank..] <= neg[*free_rank..],
                };
                let rep = if pick_v { v } else { neg };
                Classified { rep: ClassRep(rep), reliable: true }
            }
            Kind::Free { .. } => {
                let w = cyclic_reduce(&free_reduce(&g.0));
                Classified { rep: ClassRep(min_rotation_pm(&w)), reliable: true }
            }
            Kind::Surface { genus, relators } => {
                let p = cyclic_dehn(&g.0, *genus, relators);
                let inv: Vec<i64> = g.0.iter().rev().map(|x| -x).collect();
                let q = cyclic_dehn(&inv, *genus, relators);
                let rep = [min_rotation(&p), min_rotation(&invert(&p)), min_rotation(&q), min_rotation(&invert(&q))]
                    .into_iter()
                    .min_by(|a, b| cmp_letters(a, b))
                    .expect("four candidates");
                let reliable = !has_half_relator(&rep, *genus, relators);
                Classified { rep: ClassRep(rep), reliable }
            }
        }
    }

    pub fn identity_rep(&self) -> ClassRep {
        match &self.kind {
            Kind::Abelian { .. } => ClassRep(vec![0; self.rank()]),
            _ => ClassRep(vec![]),
        }
    }

    pub fn is_identity_rep(&self, c: &ClassRep) -> bool {
        c.0.iter().all(|&x| x == 0)
    }

    /// A word representing the class.
    pub fn rep_word(&self, c: &ClassRep) -> Word {
        match &self.kind {
            Kind::Abelian { .. } => self.vector_word(&c.0),
            _ => Word(c.0.clone()),
        }
    }

    /// Checks that `c` has the shape of a representative for this backend and
    /// returns its canonical form.
    pub fn canonicalize_rep(&self, c: &ClassRep) -> Result<ClassRep, GroupError> {
        match &self.kind {
            Kind::Abelian { .. } => {
                if c.0.len() != self.rank() {
                    return Err(GroupError::BadClassRep(c.0.clone()));
                }
                Ok(self.class_rep(&self.vector_word(&c.0)))
            }
            _ => {
                let w = Word(c.0.clone());
                self.check_word(&w).map_err(|_| GroupError::BadClassRep(c.0.clone()))?;
                Ok(self.class_rep(&w))
            }
        }
    }
}

fn rotate(w: &[i64], k: usize) -> Vec<i64> {
    let mut v = w[k..].to_vec();
    v.extend_from_slice(&w[..k]);
    v
}

fn invert(w: &[i64]) -> Vec<i64> {
    w.iter().rev().map(|x| -x).collect()
}

pub fn free_reduce(w: &[i64]) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Strips matching letters from both ends of a freely reduced word.
pub fn cyclic_reduce(w: &[i64]) -> Vec<i64> {
    let (mut lo, mut hi) = (0, w.len());
    while hi - lo >= 2 && w[lo] == -w[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    w[lo..hi].to_vec()
}

fn min_rotation(w: &[i64]) -> Vec<i64> {
    (0..w.len().max(1))
        .map(|k| if w.is_empty() { vec![] } else { rotate(w, k) })
        .min_by(|a, b| cmp_letters(a, b))
        .expect("non-empty range")
}

fn min_rotation_pm(w: &[i64]) -> Vec<i64> {
    let a = min_rotation(w);
    let b = min_rotation(&invert(w));
    if cmp_letters(&a, &b) == Ordering::Greater {
        b
    } else {
        a
    }
}

/// Length of the longest common prefix of `w` read cyclically from `start`
/// (at most `w.len()` letters) and `r`.
fn cyclic_match(w: &[i64], start: usize, r: &[i64]) -> usize {
    let n = w.len();
    let cap = n.min(r.len());
    (0..cap).take_while(|&k| w[(start + k) % n] == r[k]).count()
}

/// Dehn's algorithm on a linear word: repeatedly replace a subword that is
/// more than half of a cyclic relator by the inverse of the complement.
fn dehn_reduce(w: &[i64], genus: usize, relators: &[Vec<i64>]) -> Vec<i64> {
    let half = 2 * genus;
    let mut w = free_reduce(w);
    'outer: loop {
        for i in 0..w.len() {
            for r in relators {
                let l = w[i..].iter().zip(r).take_while(|(a, b)| a == b).count();
                if l > half {
                    let mut next = w[..i].to_vec();
                    next.extend(invert(&r[l..]));
                    next.extend_from_slice(&w[i + l..]);
                    w = free_reduce(&next);
                    continue 'outer;
                }
            }
        }
        return w;
    }
}

/// Dehn reduction of a cyclic word. Deterministic in the cyclic word: it
/// always restarts from the least rotation.
fn cyclic_dehn(w: &[i64], genus: usize, relators: &[Vec<i64>]) -> Vec<i64> {
    let half = 2 * genus;
    let mut w = min_rotation(&cyclic_reduce(&free_reduce(w)));
    'outer: loop {
        for i in 0..w.len() {
            for r in relators {
                let l = cyclic_match(&w, i, r);
                if l > half {
                    let rot = rotate(&w, i);
                    let mut next = invert(&r[l..]);
                    next.extend_from_slice(&rot[l..]);
                    w = min_rotation(&cyclic_reduce(&free_reduce(&next)));
                    continue 'outer;
                }
            }
        }
        return w;
    }
}

fn has_half_relator(w: &[i64], genus: usize, relators: &[Vec<i64>]) -> bool {
    let half = 2 * genus;
    w.len() >= half
        && (0..w.len()).any(|i| relators.iter().any(|r| cyclic_match(w, i, r) >= half))
}
