//! The deformed skein algebra of a group at `A^2 = -1`.
//!
//! Elements are kept in the span of `1` and the generators `x_c`, one per
//! `~`-class `c`. Products of generators close into that span through the
//! product-to-sum rule
//! `x_g x_h = A^{omega(g,h)} x_{gh} + A^{-omega(g,h)} x_{gh^-1}`,
//! with `x_e = 2`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{ClassRep, GroupError, GroupSpec, Word};
use crate::ring::{a_pow, CycCoeff, Z4Exp};

pub const DEFAULT_MODULUS: u64 = 10007;
pub const DEFAULT_ROUNDS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("class {class}: {source}")]
    Class { class: ClassRep, source: GroupError },
    #[error("trace oracle needs a free or free abelian group with zero omega")]
    OracleBackend,
    #[error("assignment has {got} matrices, the group has {rank} generators")]
    AssignmentSize { got: usize, rank: usize },
}

/// An element `unit + sum_c coeff_c x_c`. The identity class never appears
/// as a key and no stored coefficient is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "EltJson", into = "EltJson")]
pub struct SkeinElt {
    unit: CycCoeff,
    terms: BTreeMap<ClassRep, CycCoeff>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    class: Vec<i64>,
    coeff: CycCoeff,
}

#[derive(Serialize, Deserialize)]
struct EltJson {
    unit: CycCoeff,
    #[serde(default)]
    terms: Vec<TermJson>,
}

impl From<EltJson> for SkeinElt {
    fn from(j: EltJson) -> Self {
        let mut e = SkeinElt::scalar(j.unit);
        for t in j.terms {
            e.add_term(ClassRep(t.class), t.coeff);
        }
        e
    }
}

impl From<SkeinElt> for EltJson {
    fn from(e: SkeinElt) -> Self {
        EltJson {
            unit: e.unit,
            terms: e.terms.into_iter().map(|(c, coeff)| TermJson { class: c.0, coeff }).collect(),
        }
    }
}

fn is_identity_class(c: &ClassRep) -> bool {
    c.0.iter().all(|&x| x == 0)
}

impl SkeinElt {
    pub fn zero() -> Self {
        SkeinElt::default()
    }

    pub fn one() -> Self {
        SkeinElt::scalar(CycCoeff::ONE)
    }

    pub fn scalar(c: CycCoeff) -> Self {
        SkeinElt { unit: c, terms: BTreeMap::new() }
    }

    pub fn unit(&self) -> CycCoeff {
        self.unit
    }

    pub fn terms(&self) -> &BTreeMap<ClassRep, CycCoeff> {
        &self.terms
    }

    pub fn coeff(&self, c: &ClassRep) -> CycCoeff {
        self.terms.get(c).copied().unwrap_or(CycCoeff::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero() && self.terms.is_empty()
    }

    /// Adds `coeff * x_c`, folding `x_e` into the unit as 2.
    pub fn add_term(&mut self, c: ClassRep, coeff: CycCoeff) {
        if coeff.is_zero() {
            return;
        }
        if is_identity_class(&c) {
            self.unit += coeff * 2;
            return;
        }
        match self.terms.entry(c) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: CycCoeff) -> SkeinElt {
        let mut out = SkeinElt::scalar(self.unit * c);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), *v * c);
        }
        out
    }

    /// Multiplies by `A^e`.
    pub fn shift(&self, e: Z4Exp) -> SkeinElt {
        self.scale(a_pow(e))
    }
}

impl Add for &SkeinElt {
    type Output = SkeinElt;

    fn add(self, rhs: &SkeinElt) -> SkeinElt {
        let mut out = self.clone();
        out.unit += rhs.unit;
        for (k, v) in &rhs.terms {
            out.add_term(k.clone(), *v);
        }
        out
    }
}

impl Add for SkeinElt {
    type Output = SkeinElt;

    fn add(self, rhs: SkeinElt) -> SkeinElt {
        &self + &rhs
    }
}

impl Neg for &SkeinElt {
    type Output = SkeinElt;

    fn neg(self) -> SkeinElt {
        self.scale(CycCoeff::int(-1))
    }
}

impl Neg for SkeinElt {
    type Output = SkeinElt;

    fn neg(self) -> SkeinElt {
        -&self
    }
}

impl Sub for &SkeinElt {
    type Output = SkeinElt;

    fn sub(self, rhs: &SkeinElt) -> SkeinElt {
        self + &(-rhs)
    }
}

impl Sub for SkeinElt {
    type Output = SkeinElt;

    fn sub(self, rhs: SkeinElt) -> SkeinElt {
        &self - &rhs
    }
}

impl Mul<CycCoeff> for &SkeinElt {
    type Output = SkeinElt;

    fn mul(self, c: CycCoeff) -> SkeinElt {
        self.scale(c)
    }
}

impl fmt::Display for SkeinElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.unit)?;
        for (k, v) in &self.terms {
            write!(f, " + ({})x{}", v, k)?;
        }
        Ok(())
    }
}

/// Outcome of comparing two elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqVerdict {
    Equal,
    Unequal,
    /// Every trace evaluation agreed.
    ProbablyEqual,
    /// Formal forms differ but no oracle applies, so the answer is open.
    FormallyDistinct,
}

/// The algebra over a fixed group backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeinAlgebra {
    group: GroupSpec,
}

impl SkeinAlgebra {
    pub fn new(group: GroupSpec) -> Self {
        SkeinAlgebra { group }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// `x_c`; `x_e` is the scalar 2.
    pub fn gen(&self, c: &ClassRep) -> SkeinElt {
        let mut e = SkeinElt::zero();
        e.add_term(c.clone(), CycCoeff::ONE);
        e
    }

    pub fn gen_word(&self, w: &Word) -> SkeinElt {
        self.gen(&self.group.class_rep(w))
    }

    /// Checks every class of `u` against the backend.
    pub fn check(&self, u: &SkeinElt) -> Result<(), AlgebraError> {
        for c in u.terms.keys() {
            let canon = self
                .group
                .canonicalize_rep(c)
                .map_err(|source| AlgebraError::Class { class: c.clone(), source })?;
            if &canon != c {
                return Err(AlgebraError::Class { class: c.clone(), source: GroupError::BadClassRep(c.0.clone()) });
            }
        }
        Ok(())
    }

    /// `x_c x_d` by the product-to-sum rule.
    pub fn mul_gens(&self, c: &ClassRep, d: &ClassRep) -> SkeinElt {
        let g = self.group.rep_word(c);
        let h = self.group.rep_word(d);
        let w = Z4Exp::new(self.group.omega(&g, &h));
        let mut out = SkeinElt::zero();
        out.add_term(self.group.class_rep(&g.concat(&h)), a_pow(w));
        out.add_term(self.group.class_rep(&g.concat(&h.inverse())), a_pow(-w));
        out
    }

    /// Bilinear product. Fails when an operand holds a class that is not a
    /// canonical representative for this backend.
    pub fn mul(&self, u: &SkeinElt, v: &SkeinElt) -> Result<SkeinElt, AlgebraError> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.mul_unchecked(u, v))
    }

    pub(crate) fn mul_unchecked(&self, u: &SkeinElt, v: &SkeinElt) -> SkeinElt {
        let mut out = SkeinElt::scalar(u.unit * v.unit);
        for (k, b) in &v.terms {
            out.add_term(k.clone(), u.unit * *b);
        }
        for (k, a) in &u.terms {
            out.add_term(k.clone(), *a * v.unit);
        }
        for (c, a) in &u.terms {
            for (d, b) in &v.terms {
                let p = self.mul_gens(c, d).scale(*a * *b);
                out = &out + &p;
            }
        }
        out
    }

    /// Equality under the policy: formal coincidence is equality; on
    /// abelian backends formal forms are normal forms; free groups with
    /// zero omega fall back on the trace oracle; anything else is open.
    pub fn eq(&self, u: &SkeinElt, v: &SkeinElt, oracle: &TraceOracle) -> EqVerdict {
        if u == v {
            return EqVerdict::Equal;
        }
        if self.group.is_abelian() {
            return EqVerdict::Unequal;
        }
        match oracle.agree(self, u, v) {
            Ok(true) => EqVerdict::ProbablyEqual,
            Ok(false) => EqVerdict::Unequal,
            Err(_) => EqVerdict::FormallyDistinct,
        }
    }
}

/// An element of `F_p[A]/(A^2 + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpA {
    pub re: u64,
    pub im: u64,
}

/// A 2x2 matrix over `F_p`, row major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mat2(pub [u64; 4]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([1, 0, 0, 1])
    }

    pub fn mul(&self, o: &Mat2, p: u64) -> Mat2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        Mat2([(a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p])
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self, p: u64) -> Mat2 {
        let [a, b, c, d] = self.0;
        Mat2([d, (p - b) % p, (p - c) % p, a])
    }

    pub fn det(&self, p: u64) -> u64 {
        let [a, b, c, d] = self.0;
        (a * d % p + p - b * c % p) % p
    }

    pub fn trace(&self, p: u64) -> u64 {
        (self.0[0] + self.0[3]) % p
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Randomized evaluation of elements through `x_g -> tr rho(g)` for
/// representations `rho` into `SL_2(F_p)`, with coefficients mapped into
/// `F_p[A]/(A^2 + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceOracle {
    pub modulus: u64,
    pub rounds: usize,
    pub seed: u64,
}

impl TraceOracle {
    pub fn new(seed: u64) -> Self {
        TraceOracle { modulus: DEFAULT_MODULUS, rounds: DEFAULT_ROUNDS, seed }
    }

    fn supports(&self, alg: &SkeinAlgebra) -> bool {
        let g = &alg.group;
        g.omega_is_zero() && !g.has_torsion()
    }

    /// Random images of the generators. Abelian backends get commuting
    /// diagonal matrices.
    pub fn random_assignment(&self, alg: &SkeinAlgebra, rng: &mut ChaCha8Rng) -> Vec<Mat2> {
        let p = self.modulus;
        (0..alg.group.rank())
            .map(|_| {
                if alg.group.is_abelian() {
                    let t = rng.gen_range(1..p);
                    Mat2([t, 0, 0, pow_mod(t, p - 2, p)])
                } else {
                    let a = rng.gen_range(1..p);
                    let b = rng.gen_range(0..p);
                    let c = rng.gen_range(0..p);
                    let d = (1 + b * c) % p * pow_mod(a, p - 2, p) % p;
                    Mat2([a, b, c, d])
                }
            })
            .collect()
    }

    pub fn trace_eval(&self, alg: &SkeinAlgebra, u: &SkeinElt, assignment: &[Mat2]) -> Result<FpA, AlgebraError> {
        if !self.supports(alg) {
            return Err(AlgebraError::OracleBackend);
        }
        let rank = alg.group.rank();
        if assignment.len() != rank {
            return Err(AlgebraError::AssignmentSize { got: assignment.len(), rank });
        }
        let p = self.modulus;
        let lift = |x: i64| x.rem_euclid(p as i64) as u64;
        let mut re = lift(u.unit.re);
        let mut im = lift(u.unit.im);
        for (c, k) in &u.terms {
            let mut m = Mat2::identity();
            for &x in &alg.group.rep_word(c).0 {
                let g = assignment[x.unsigned_abs() as usize - 1];
                let g = if x > 0 { g } else { g.inv(p) };
                m = m.mul(&g, p);
            }
            let t = m.trace(p);
            re = (re + lift(k.re) * t) % p;
            im = (im + lift(k.im) * t) % p;
        }
        Ok(FpA { re, im })
    }

    /// Whether `u` and `v` agree on every round of random assignments.
    pub fn agree(&self, alg: &SkeinAlgebra, u: &SkeinElt, v: &SkeinElt) -> Result<bool, AlgebraError> {
        if !self.supports(alg) {
            return Err(AlgebraError::OracleBackend);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.rounds {
            let asg = self.random_assignment(alg, &mut rng);
            if self.trace_eval(alg, u, &asg)? != self.trace_eval(alg, v, &asg)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::symplectic_matrix;
    use proptest::prelude::*;

    fn torus() -> SkeinAlgebra {
        SkeinAlgebra::new(GroupSpec::torus())
    }

    fn x(alg: &SkeinAlgebra, w: &[i64]) -> SkeinElt {
        alg.gen_word(&Word(w.to_vec()))
    }

    #[test]
    fn gen_examples() {
        let t = torus();
        assert_eq!(t.gen(&ClassRep(vec![0, 0])), SkeinElt::scalar(CycCoeff::int(2)));
        let f = SkeinAlgebra::new(GroupSpec::free(2, None).unwrap());
        let xb = x(&f, &[2]);
        assert_eq!(xb.terms().len(), 1);
        assert_eq!(x(&t, &[1, -2, -2]), x(&t, &[-1, 2, 2]));
    }

    #[test]
    fn torus_product_to_sum() {
        let t = torus();
        let p = t.mul(&x(&t, &[1]), &x(&t, &[2])).unwrap();
        let mut expect = SkeinElt::zero();
        expect.add_term(ClassRep(vec![1, 1]), CycCoeff::A);
        expect.add_term(ClassRep(vec![1, -1]), CycCoeff::new(0, -1));
        assert_eq!(p, expect);
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(
            j,
            r#"{"unit":"0+0A","terms":[{"class":[1,1],"coeff":"0+1A"},{"class":[1,-1],"coeff":"0-1A"}]}"#
        );
        assert_eq!(serde_json::from_str::<SkeinElt>(&j).unwrap(), p);
    }

    #[test]
    fn square_and_unit() {
        let f = SkeinAlgebra::new(GroupSpec::free(2, None).unwrap());
        let g = x(&f, &[1, 2]);
        let sq = f.mul(&g, &g).unwrap();
        let expect = &x(&f, &[1, 2, 1, 2]) + &SkeinElt::scalar(CycCoeff::int(2));
        assert_eq!(sq, expect);
        let two = f.gen(&ClassRep(vec![]));
        assert_eq!(f.mul(&two, &g).unwrap(), g.scale(CycCoeff::int(2)));
    }

    #[test]
    fn torus_anticommutes() {
        let t = torus();
        let o = TraceOracle::new(1);
        let ab = t.mul(&x(&t, &[1]), &x(&t, &[2])).unwrap();
        let ba = t.mul(&x(&t, &[2]), &x(&t, &[1])).unwrap();
        assert_eq!(ba, -&ab);
        assert_eq!(t.eq(&ab, &ba, &o), EqVerdict::Unequal);
        assert_eq!(t.eq(&ab, &ab, &o), EqVerdict::Equal);
    }

    #[test]
    fn free_associativity_is_probable() {
        let f = SkeinAlgebra::new(GroupSpec::free(3, None).unwrap());
        let (a, b, c) = (x(&f, &[1]), x(&f, &[2]), x(&f, &[3]));
        let l = f.mul(&f.mul(&a, &b).unwrap(), &c).unwrap();
        let r = f.mul(&a, &f.mul(&b, &c).unwrap()).unwrap();
        assert_ne!(l, r);
        assert_eq!(f.eq(&l, &r, &TraceOracle::new(7)), EqVerdict::ProbablyEqual);
        let off = &l + &SkeinElt::one();
        assert_eq!(f.eq(&off, &r, &TraceOracle::new(7)), EqVerdict::Unequal);
    }

    #[test]
    fn deformed_free_is_flagged() {
        let f = SkeinAlgebra::new(GroupSpec::free(2, Some(symplectic_matrix(1))).unwrap());
        let u = x(&f, &[1]);
        let v = x(&f, &[2]);
        assert_eq!(f.eq(&u, &v, &TraceOracle::new(0)), EqVerdict::FormallyDistinct);
        let s = SkeinAlgebra::new(GroupSpec::surface(2).unwrap());
        let o = TraceOracle::new(0);
        assert_eq!(o.trace_eval(&s, &u, &[]), Err(AlgebraError::OracleBackend));
    }

    #[test]
    fn trace_examples() {
        let f = SkeinAlgebra::new(GroupSpec::free(2, None).unwrap());
        let o = TraceOracle::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let asg = o.random_assignment(&f, &mut rng);
        assert!(asg.iter().all(|m| m.det(o.modulus) == 1));
        let e = f.gen(&ClassRep(vec![]));
        assert_eq!(o.trace_eval(&f, &e, &asg).unwrap(), FpA { re: 2, im: 0 });
        let a = x(&f, &[1]);
        let rel = &(&f.mul(&a, &a).unwrap() - &x(&f, &[1, 1])) - &SkeinElt::scalar(CycCoeff::int(2));
        assert_eq!(rel, SkeinElt::zero());
        let raw = &x(&f, &[1, 1]) + &SkeinElt::scalar(CycCoeff::int(2));
        let sq = o.trace_eval(&f, &a, &asg).unwrap();
        let p = o.modulus;
        assert_eq!(o.trace_eval(&f, &raw, &asg).unwrap().re, sq.re * sq.re % p);
    }

    #[test]
    fn mul_rejects_foreign_classes() {
        let t = torus();
        let mut bad = SkeinElt::zero();
        bad.add_term(ClassRep(vec![1]), CycCoeff::ONE);
        assert!(matches!(t.mul(&bad, &bad), Err(AlgebraError::Class { .. })));
    }

    fn word(rank: i64, max: usize) -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec((1..=rank, any::<bool>()).prop_map(|(g, s)| if s { g } else { -g }), 0..max)
    }

    proptest! {
        #[test]
        fn inverse_and_rotation_invariance(w in word(4, 10), k in 0usize..10) {
            for g in [GroupSpec::free(4, None).unwrap(), GroupSpec::surface(2).unwrap()] {
                let alg = SkeinAlgebra::new(g);
                let v = Word(w.clone());
                prop_assert_eq!(alg.gen_word(&v), alg.gen_word(&v.inverse()));
                let k = if w.is_empty() { 0 } else { k % w.len() };
                let rot: Vec<i64> = w[k..].iter().chain(&w[..k]).copied().collect();
                prop_assert_eq!(alg.gen_word(&v), alg.gen_word(&Word(rot)));
            }
        }

        #[test]
        fn trace_is_multiplicative(u in word(2, 6), v in word(2, 6), seed in any::<u64>()) {
            let f = SkeinAlgebra::new(GroupSpec::free(2, None).unwrap());
            let o = TraceOracle::new(seed);
            let (xu, xv) = (f.gen_word(&Word(u)), f.gen_word(&Word(v)));
            let xu = &xu + &SkeinElt::scalar(CycCoeff::A);
            let prod = f.mul(&xu, &xv).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let asg = o.random_assignment(&f, &mut rng);
            let p = o.modulus;
            let (a, b, c) = (
                o.trace_eval(&f, &xu, &asg).unwrap(),
                o.trace_eval(&f, &xv, &asg).unwrap(),
                o.trace_eval(&f, &prod, &asg).unwrap(),
            );
            // (a.re + a.im A)(b.re + b.im A) with A^2 = -1
            let re = (a.re * b.re % p + p - a.im * b.im % p) % p;
            let im = (a.re * b.im + a.im * b.re) % p;
            prop_assert_eq!(c, FpA { re, im });
        }
    }
}
