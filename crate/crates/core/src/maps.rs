//! The map `Phi` from framed links to the skein algebra, its inverse `Psi` on
//! generators, and the link product.
//!
//! `Phi(L) = x_{g_1} ... x_{g_n} A^{-sum_i D(K_i) - 2 sum_{i<j} d(K_i, K_j)}`,
//! with the generator product reduced left to right.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{SkeinAlgebra, SkeinElt};
use crate::diagrams::{Component, Diagram, DiagramError, Item, SurfaceModel};
use crate::groups::{ClassRep, GroupSpec};
use crate::linking::{CaseOne, HomLink, LinkingError};
use crate::ring::{CycCoeff, Z4Exp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapsError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Linking(#[from] LinkingError),
    #[error("component {0} has no word")]
    MissingWord(usize),
    #[error("component {0}: word does not match its homology class")]
    ClassMismatch(usize),
    #[error("rational homology sphere links need a group with zero omega")]
    NonzeroOmega,
    #[error("cross linking matrix must be {rows}x{cols}")]
    CrossShape { rows: usize, cols: usize },
    #[error("the two diagrams live on different surfaces")]
    SurfaceMismatch,
}

/// Exponents that went into `Phi`, all mod 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiAudit {
    pub sum_big_d: u8,
    pub sum_d: u8,
    pub exponent: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiResult {
    pub element: SkeinElt,
    pub audit: PhiAudit,
}

fn assemble(alg: &SkeinAlgebra, classes: &[ClassRep], sum_big_d: Z4Exp, sum_d: Z4Exp) -> PhiResult {
    let exponent = -sum_big_d - sum_d * 2;
    let product = classes
        .iter()
        .fold(SkeinElt::one(), |acc, c| alg.mul_unchecked(&acc, &alg.gen(c)));
    PhiResult {
        element: product.shift(exponent),
        audit: PhiAudit { sum_big_d: sum_big_d.value(), sum_d: sum_d.value(), exponent: exponent.value() },
    }
}

/// `Phi` of a diagram on a surface.
pub fn phi_diagram(surface: &SurfaceModel, l: &Diagram) -> Result<PhiResult, MapsError> {
    l.validate(surface)?;
    let alg = SkeinAlgebra::new(surface.group.clone());
    let mut sum_big_d = Z4Exp::ZERO;
    let mut sum_d = Z4Exp::ZERO;
    for i in 0..l.len() {
        sum_big_d += l.big_d(i)?;
        for j in i + 1..l.len() {
            sum_d += l.inter_stats(surface, i, j)?.d;
        }
    }
    let classes: Vec<ClassRep> = (0..l.len()).map(|i| surface.group.class_rep(&l.word(i))).collect();
    Ok(assemble(&alg, &classes, sum_big_d, sum_d))
}

/// `Phi` of a link in a rational homology sphere, over the group `group`
/// of its fundamental group. Every component must carry a word.
pub fn phi_link(case: &CaseOne, group: &GroupSpec, l: &HomLink) -> Result<PhiResult, MapsError> {
    case.validate(l)?;
    if !group.omega_is_zero() {
        return Err(MapsError::NonzeroOmega);
    }
    let mut classes = Vec::with_capacity(l.len());
    for (i, comp) in l.components.iter().enumerate() {
        let w = comp.word.as_ref().ok_or(MapsError::MissingWord(i))?;
        group.check_word(w).map_err(|_| MapsError::ClassMismatch(i))?;
        if group.is_abelian() && group.torsion() == case.data().torsion() && group.rank() == group.torsion().len() {
            let h = group.homology(w);
            let expect: Vec<i64> =
                comp.class.iter().zip(case.data().torsion()).map(|(&a, &n)| a.rem_euclid(n)).collect();
            if h.torsion != expect {
                return Err(MapsError::ClassMismatch(i));
            }
        }
        classes.push(group.class_rep(w));
    }
    let mut sum_big_d = Z4Exp::ZERO;
    let mut sum_d = Z4Exp::ZERO;
    for i in 0..l.len() {
        sum_big_d += case.big_d(l, i)?;
        for j in i + 1..l.len() {
            sum_d += case.d(l, i, j)?;
        }
    }
    Ok(assemble(&SkeinAlgebra::new(group.clone()), &classes, sum_big_d, sum_d))
}

/// A diagram with the scale `A^scale` it carries as a preimage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiResult {
    pub diagram: Diagram,
    pub scale: Z4Exp,
}

/// The crossingless, untwisted curve reading the standard word of `c`,
/// scaled by `A^{D}` with `D = 0`.
pub fn psi(surface: &SurfaceModel, c: &ClassRep) -> PsiResult {
    let items = surface.group.rep_word(c).0.into_iter().map(Item::Letter).collect();
    let diagram = Diagram::new(vec![Component { twists: 0, items }], BTreeMap::new());
    let scale = diagram.big_d(0).expect("one component");
    PsiResult { diagram, scale }
}

/// `Phi` extended linearly to a scaled diagram.
pub fn phi_scaled(surface: &SurfaceModel, p: &PsiResult) -> Result<SkeinElt, MapsError> {
    Ok(phi_diagram(surface, &p.diagram)?.element.shift(p.scale))
}

/// Places `l1` over `l2`. Each pair of components `(i, j)` with
/// `omega = omega([K_i], [K_j]) != 0` gets `|omega|` new crossings of sign
/// `sgn(omega)` with `K_i` on top, appended to both components.
pub fn stack(surface: &SurfaceModel, l1: &Diagram, l2: &Diagram) -> Diagram {
    let mut out = l1.disjoint_union(l2);
    let n = l1.len();
    let mut next = out.next_id();
    for i in 0..n {
        for j in 0..l2.len() {
            let omega = surface.group.omega(&l1.word(i), &l2.word(j));
            for _ in 0..omega.unsigned_abs() {
                out.signs.insert(next, omega.signum() as i8);
                out.components[i].items.push(Item::Pass { crossing: next, over: true });
                out.components[n + j].items.push(Item::Pass { crossing: next, over: false });
                next += 1;
            }
        }
    }
    out
}

/// The product of two diagrams, realized as `Phi` of the stacked diagram.
pub fn skein_product_diagrams(surface: &SurfaceModel, l1: &Diagram, l2: &Diagram) -> Result<PhiResult, MapsError> {
    l1.validate(surface)?;
    l2.validate(surface)?;
    phi_diagram(surface, &stack(surface, l1, l2))
}

/// The product of two links in a rational homology sphere:
/// `(-1)^{d(L1, L2)} Phi(L1 u L2)`. `cross[a][b]` links component `a` of
/// `l1` with component `b` of `l2`.
pub fn skein_product_links(
    case: &CaseOne,
    group: &GroupSpec,
    l1: &HomLink,
    l2: &HomLink,
    cross: &[Vec<Rational64>],
) -> Result<PhiResult, MapsError> {
    if cross.len() != l1.len() || cross.iter().any(|r| r.len() != l2.len()) {
        return Err(MapsError::CrossShape { rows: l1.len(), cols: l2.len() });
    }
    let merged = l1.union(l2, cross);
    let n = l1.len();
    let mut d = Z4Exp::ZERO;
    for i in 0..n {
        for j in 0..l2.len() {
            d += case.d(&merged, i, n + j)?;
        }
    }
    let mut r = phi_link(case, group, &merged)?;
    if d.parity() == 1 {
        r.element = r.element.scale(CycCoeff::int(-1));
    }
    Ok(r)
}
