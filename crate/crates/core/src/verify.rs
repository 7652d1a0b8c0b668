//! Seeded verification suites. Every case draws from its own generator,
//! seeded from the run seed, the suite name and the case index, so a failing
//! record can be replayed on its own.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{EqVerdict, SkeinAlgebra, SkeinElt, TraceOracle};
use crate::diagrams::{Diagram, Smoothing, SurfaceModel};
use crate::groups::{symplectic_matrix, ClassRep, GroupSpec, Word};
use crate::linking::{lift_linking_form, CaseOne};
use crate::maps::{phi_diagram, phi_link, phi_scaled, psi, skein_product_diagrams, skein_product_links};
use crate::random::{self, CaseRng};
use crate::ring::{a_pow, CycCoeff, QuarterFrac, Z4Exp};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub const SUITES: [&str; 11] = [
    "lift",
    "crossing-switch",
    "skein",
    "torus",
    "deformed",
    "assoc",
    "roundtrip",
    "d-crosscheck",
    "D-welldef",
    "cyclic-span",
    "homomorphism",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub check: String,
    pub case: u64,
    pub seed: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Seed of case `case` of `suite` in a run with seed `seed`.
pub fn case_seed(seed: u64, suite: &str, case: u64) -> u64 {
    // FNV-1a keeps the suite tag stable across toolchains
    let tag = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ tag);
    r.set_stream(case);
    r.next_u64()
}

/// Collects check outcomes of one case.
struct Case {
    suite: &'static str,
    case: u64,
    seed: u64,
    records: Vec<Record>,
}

impl Case {
    fn new(suite: &'static str, case: u64, seed: u64) -> Self {
        Case { suite, case, seed, records: Vec::new() }
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) {
        self.records.push(Record {
            check: format!("{}/{}", self.suite, name),
            case: self.case,
            seed: self.seed,
            status: if ok { Status::Pass } else { Status::Fail },
            detail: (!ok).then(detail),
        });
    }

    fn rng(&self) -> CaseRng {
        CaseRng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown suite {0:?}")]
pub struct UnknownSuite(pub String);

/// Runs one suite, or all of them for `"all"`, in case order.
pub fn run(suite: &str, seed: u64, cases: u64) -> Result<Vec<Record>, UnknownSuite> {
    if suite == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run(s, seed, cases)?);
        }
        return Ok(out);
    }
    let (name, f): (&'static str, fn(&mut Case)) = match suite {
        "lift" => ("lift", lift_case),
        "crossing-switch" => ("crossing-switch", crossing_switch_case),
        "skein" => ("skein", skein_case),
        "torus" => ("torus", torus_case),
        "deformed" => ("deformed", deformed_case),
        "assoc" => ("assoc", assoc_case),
        "roundtrip" => ("roundtrip", roundtrip_case),
        "d-crosscheck" => ("d-crosscheck", d_crosscheck_case),
        "D-welldef" => ("D-welldef", big_d_case),
        "cyclic-span" => ("cyclic-span", cyclic_span_case),
        "homomorphism" => ("homomorphism", homomorphism_case),
        other => return Err(UnknownSuite(other.to_string())),
    };
    let cases = match name {
        "torus" => cases.min(TORUS_GRID),
        "cyclic-span" => cases.min(CYCLIC_MAX),
        _ => cases,
    };
    Ok((0..cases)
        .into_par_iter()
        .map(|i| {
            let s = case_seed(seed, name, i);
            let mut c = Case::new(name, i, s);
            // a panicking case is a failed check, not a crashed run
            match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&mut c))) {
                Ok(()) => c.records,
                Err(p) => {
                    let msg = p
                        .downcast_ref::<&str>()
                        .map(|s| s.to_string())
                        .or_else(|| p.downcast_ref::<String>().cloned())
                        .unwrap_or_else(|| "panic".into());
                    let mut c = Case::new(name, i, s);
                    c.check("no-panic", false, || msg);
                    c.records
                }
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect())
}

pub fn failures(records: &[Record]) -> usize {
    records.iter().filter(|r| r.status == Status::Fail).count()
}

fn oracle(rng: &mut CaseRng) -> TraceOracle {
    TraceOracle::new(rng.gen())
}

fn agrees(alg: &SkeinAlgebra, u: &SkeinElt, v: &SkeinElt, o: &TraceOracle) -> bool {
    matches!(alg.eq(u, v, o), EqVerdict::Equal | EqVerdict::ProbablyEqual)
}

fn lift_case(c: &mut Case) {
    let mut rng = c.rng();
    let data = random::rhs_data(&mut rng, 4);
    let hat = lift_linking_form(&data);
    let m = hat.matrix();
    let t = data.torsion();
    let lf = data.lf_matrix();
    let k = t.len();
    let symmetric = (0..k).all(|i| (0..k).all(|j| m[i][j] == m[j][i]));
    c.check("symmetric", symmetric, || format!("{m:?}"));
    let mut annihilated = true;
    let mut congruent = true;
    for i in 0..k {
        for j in 0..k {
            let a = m[i][j];
            annihilated &= a * t[i] == QuarterFrac::zero() && a * t[j] == QuarterFrac::zero();
            // a - lf must be an integer
            let l = lf[i][j];
            let diff = a - QuarterFrac::new(*l.numer(), *l.denom());
            congruent &= diff.to_z4().is_some();
        }
    }
    c.check("annihilated", annihilated, || format!("torsion {t:?}, lift {m:?}"));
    c.check("congruent", congruent, || format!("lf {lf:?}, lift {m:?}"));
}

fn crossing_switch_case(c: &mut Case) {
    let mut rng = c.rng();
    let (s, d) = random::mixed_diagram(&mut rng, 3, random::DEFAULT_MAX_CROSSINGS);
    let phi = phi_diagram(&s, &d).expect("valid diagram").element;
    let mut bad = Vec::new();
    for x in d.crossing_ids() {
        let flipped = d.crossing_change(x).expect("known crossing");
        match phi_diagram(&s, &flipped) {
            Ok(r) if r.element == -&phi => {}
            _ => bad.push(x),
        }
    }
    c.check("negates", bad.is_empty(), || format!("crossings {bad:?}"));
}

fn oriented_kind(sign: i64) -> (Smoothing, Smoothing) {
    if sign == 1 {
        (Smoothing::A, Smoothing::B)
    } else {
        (Smoothing::B, Smoothing::A)
    }
}

/// The identities relating `D` and `d` before and after smoothing crossing
/// `x`. Returns the names of those that fail.
fn d_identities(s: &SurfaceModel, d: &Diagram, x: u32) -> Vec<&'static str> {
    let [p, q] = d.passes_of(x).expect("known crossing");
    let eps = d.sign(x).expect("known crossing");
    let e = Z4Exp::new(eps);
    let (or_kind, rev_kind) = oriented_kind(eps);
    let or = d.smooth(x, or_kind).expect("smoothable");
    let rev = d.smooth(x, rev_kind).expect("smoothable");
    let mut bad = Vec::new();
    if p.comp != q.comp {
        let (g, h) = (p.comp.min(q.comp), p.comp.max(q.comp));
        let omega = Z4Exp::new(s.group.omega(&d.word(g), &d.word(h)));
        let lhs = d.big_d(g).unwrap() + d.big_d(h).unwrap() + d.inter_stats(s, g, h).unwrap().d * 2;
        if lhs != or.big_d(g).unwrap() - e + omega {
            bad.push("merge-oriented");
        }
        if lhs != rev.big_d(g).unwrap() + e - omega {
            bad.push("merge-reversed");
        }
    } else {
        let a = p.comp;
        let omega = Z4Exp::new(s.group.omega(&or.word(a), &or.word(a + 1)));
        let lhs = or.big_d(a).unwrap() + or.big_d(a + 1).unwrap() + or.inter_stats(s, a, a + 1).unwrap().d * 2;
        if lhs - d.big_d(a).unwrap() - e != omega {
            bad.push("split-oriented");
        }
        if lhs - rev.big_d(a).unwrap() != -omega {
            bad.push("split-reversed");
        }
    }
    bad
}

fn skein_case(c: &mut Case) {
    let mut rng = c.rng();
    let (s, d) = random::mixed_diagram(&mut rng, 3, random::DEFAULT_MAX_CROSSINGS);
    let alg = SkeinAlgebra::new(s.group.clone());
    let o = oracle(&mut rng);
    let phi = phi_diagram(&s, &d).expect("valid diagram").element;
    let mut bad = Vec::new();
    let mut ident = Vec::new();
    let (mut inter, mut selfc) = (0, 0);
    for x in d.crossing_ids() {
        let [p, q] = d.passes_of(x).expect("known crossing");
        if p.comp == q.comp {
            selfc += 1;
        } else {
            inter += 1;
        }
        let a = phi_diagram(&s, &d.smooth(x, Smoothing::A).expect("smoothable"));
        let b = phi_diagram(&s, &d.smooth(x, Smoothing::B).expect("smoothable"));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let rhs = &a.element.scale(CycCoeff::A) + &b.element.scale(CycCoeff::new(0, -1));
                if !agrees(&alg, &phi, &rhs, &o) {
                    bad.push(x);
                }
            }
            _ => bad.push(x),
        }
        for name in d_identities(&s, &d, x) {
            ident.push(format!("{name}@{x}"));
        }
    }
    let t = rng.gen_range(-3..=3);
    let lp = Diagram::new(vec![crate::diagrams::Component { twists: t, items: vec![] }], Default::default());
    let factor = a_pow(Z4Exp::new(t)) * 2;
    let with_loop = phi_diagram(&s, &d.disjoint_union(&lp)).expect("valid").element;
    let removed = lp.remove_trivial(&s).1;
    c.check("trivial-loop", with_loop == phi.scale(factor) && removed == factor, || {
        format!("twists {t}: {with_loop} vs {}", phi.scale(factor))
    });
    c.check("relation", bad.is_empty(), || format!("crossings {bad:?} ({inter} inter, {selfc} self)"));
    c.check("d-identities", ident.is_empty(), || ident.join(", "));
}

const TORUS_BOUND: i64 = 5;
const TORUS_SIDE: u64 = (2 * TORUS_BOUND + 1) as u64;
const TORUS_GRID: u64 = TORUS_SIDE.pow(4);

fn torus_case(c: &mut Case) {
    let mut i = c.case;
    let mut coord = [0i64; 4];
    for x in &mut coord {
        *x = (i % TORUS_SIDE) as i64 - TORUS_BOUND;
        i /= TORUS_SIDE;
    }
    let [p, q, r, s] = coord;
    let alg = SkeinAlgebra::new(GroupSpec::torus());
    let g = |v: [i64; 2]| alg.gen(&alg.group().class_rep(&Word(vector_word(v))));
    let got = alg.mul(&g([p, q]), &g([r, s])).expect("canonical classes");
    let w = Z4Exp::new(p * s - q * r);
    let expect = &g([p + r, q + s]).shift(w) + &g([p - r, q - s]).shift(-w);
    c.check("product-to-sum", got == expect, || format!("({p},{q})*({r},{s}): {got} vs {expect}"));
}

fn vector_word(v: [i64; 2]) -> Vec<i64> {
    let mut w = Vec::new();
    for (k, &e) in v.iter().enumerate() {
        w.extend(std::iter::repeat_n((k as i64 + 1) * e.signum(), e.unsigned_abs() as usize));
    }
    w
}

/// Backends with a nonzero form.
fn deformed_backends() -> Vec<(&'static str, GroupSpec)> {
    vec![
        ("torus", GroupSpec::torus()),
        ("punctured-torus", GroupSpec::free(2, Some(symplectic_matrix(1))).expect("valid")),
        ("genus-2", GroupSpec::surface(2).expect("valid")),
    ]
}

fn deformed_case(c: &mut Case) {
    let mut rng = c.rng();
    for (name, g) in deformed_backends() {
        let alg = SkeinAlgebra::new(g.clone());
        let gw = random::word(&mut rng, g.rank(), 8);
        let hw = random::word(&mut rng, g.rank(), 8);
        let inv = alg.gen_word(&gw) == alg.gen_word(&gw.inverse());
        c.check(&format!("{name}/inverse"), inv, || format!("{gw:?}"));
        let conj = alg.gen_word(&gw.concat(&hw)) == alg.gen_word(&hw.concat(&gw));
        c.check(&format!("{name}/conjugate"), conj, || format!("{gw:?} {hw:?}"));
        let (xg, xh) = (alg.gen_word(&gw), alg.gen_word(&hw));
        let gh = alg.mul(&xg, &xh).expect("canonical");
        let hg = alg.mul(&xh, &xg).expect("canonical");
        let sign = if g.omega(&gw, &hw).rem_euclid(2) == 0 { 1 } else { -1 };
        c.check(&format!("{name}/commutation"), hg == gh.scale(CycCoeff::int(sign)), || {
            format!("{gw:?} {hw:?}: {gh} vs {hg}")
        });
    }
}

fn abelian_backends() -> Vec<(&'static str, GroupSpec)> {
    vec![
        ("torus", GroupSpec::torus()),
        ("Z2", GroupSpec::abelian(2, vec![], None).expect("valid")),
        ("Z15", GroupSpec::cyclic(15).expect("valid")),
        ("ZxZ5", GroupSpec::abelian(1, vec![5], None).expect("valid")),
    ]
}

fn assoc_case(c: &mut Case) {
    let mut rng = c.rng();
    for (name, g) in abelian_backends() {
        let alg = SkeinAlgebra::new(g.clone());
        let [x, y, z] = [(); 3].map(|_| alg.gen_word(&random::word(&mut rng, g.rank(), 8)));
        let l = alg.mul(&alg.mul(&x, &y).unwrap(), &z).unwrap();
        let r = alg.mul(&x, &alg.mul(&y, &z).unwrap()).unwrap();
        c.check(&format!("{name}/formal"), l == r, || format!("{x} | {y} | {z}"));
    }
    let g = GroupSpec::free(3, None).expect("valid");
    let alg = SkeinAlgebra::new(g);
    let [x, y, z] = [(); 3].map(|_| alg.gen_word(&random::word(&mut rng, 3, 6)));
    let l = alg.mul(&alg.mul(&x, &y).unwrap(), &z).unwrap();
    let r = alg.mul(&x, &alg.mul(&y, &z).unwrap()).unwrap();
    let o = oracle(&mut rng);
    c.check("free3/trace", agrees(&alg, &l, &r, &o), || format!("{x} | {y} | {z}"));
}

fn roundtrip_backends() -> Vec<(&'static str, GroupSpec)> {
    let mut v = deformed_backends();
    v.push(("free3", GroupSpec::free(3, None).expect("valid")));
    v.push(("Z7", GroupSpec::cyclic(7).expect("valid")));
    v
}

fn roundtrip_case(c: &mut Case) {
    let mut rng = c.rng();
    for (name, g) in roundtrip_backends() {
        let s = SurfaceModel::new(g.clone());
        let alg = SkeinAlgebra::new(g.clone());
        let class = g.class_rep(&random::word(&mut rng, g.rank(), 10));
        let ok = phi_scaled(&s, &psi(&s, &class)).map(|e| e == alg.gen(&class));
        c.check(&format!("{name}/phi-psi"), ok == Ok(true), || format!("{class}"));
    }
    let (s, d) = random::mixed_diagram(&mut rng, 3, random::DEFAULT_MAX_CROSSINGS);
    let alg = SkeinAlgebra::new(s.group.clone());
    let mut perm: Vec<usize> = (0..d.len()).collect();
    rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
    let permuted = Diagram::new(perm.iter().map(|&i| d.components[i].clone()).collect(), d.signs.clone());
    let u = phi_diagram(&s, &d).expect("valid").element;
    let v = phi_diagram(&s, &permuted).expect("valid").element;
    let o = oracle(&mut rng);
    c.check("permutation", agrees(&alg, &u, &v, &o), || format!("perm {perm:?}: {u} vs {v}"));
}

fn d_crosscheck_case(c: &mut Case) {
    let mut rng = c.rng();
    let (s, d) = random::mixed_diagram(&mut rng, 3, random::DEFAULT_MAX_CROSSINGS);
    let n = d.len();
    let dd = |l: &Diagram, i, j| l.inter_stats(&s, i, j).unwrap().d;
    let mut bad = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if dd(&d, i, j) != d.over_count_d(i, j).unwrap() {
                bad.push(format!("over-count({i},{j})"));
            }
            let omega = Z4Exp::new(s.group.omega(&d.word(i), &d.word(j)));
            if dd(&d, i, j) - dd(&d, j, i) != omega {
                bad.push(format!("antisymmetry({i},{j})"));
            }
            let r = d.reverse(i).unwrap();
            if dd(&r, i, j).parity() != dd(&d, i, j).parity() {
                bad.push(format!("reversal({i},{j})"));
            }
            for k in 0..n {
                if k != i && k != j && j < k {
                    let sum = dd(&d, i, j) + dd(&d, i, k);
                    if d.d_sublinks(&s, &[i], &[j, k]).unwrap() != sum {
                        bad.push(format!("additivity({i},{j},{k})"));
                    }
                }
            }
        }
    }
    let with_loop = d.disjoint_union(&Diagram::new(
        vec![crate::diagrams::Component::default()],
        Default::default(),
    ));
    for j in 0..n {
        if dd(&with_loop, n, j) != Z4Exp::ZERO || dd(&with_loop, j, n) != Z4Exp::ZERO {
            bad.push(format!("trivial-loop({j})"));
        }
    }
    for x in d.crossing_ids() {
        let [p, q] = d.passes_of(x).unwrap();
        let involved: Vec<usize> = if p.comp == q.comp { vec![p.comp] } else { vec![p.comp.min(q.comp), p.comp.max(q.comp)] };
        for k in (0..n).filter(|k| !involved.contains(k)) {
            let before = d.d_sublinks(&s, &[k], &involved).unwrap().parity();
            for kind in [Smoothing::A, Smoothing::B] {
                let sm = d.smooth(x, kind).unwrap();
                let (kk, inv): (usize, Vec<usize>) = if involved.len() == 2 {
                    let (g, h) = (involved[0], involved[1]);
                    (if k < h { k } else { k - 1 }, vec![g])
                } else {
                    let a = involved[0];
                    if sm.len() > n {
                        (if k < a { k } else { k + 1 }, vec![a, a + 1])
                    } else {
                        (k, vec![a])
                    }
                };
                if sm.d_sublinks(&s, &[kk], &inv).unwrap().parity() != before {
                    bad.push(format!("smoothing({x},{kind:?},{k})"));
                }
            }
        }
    }
    c.check("d-properties", bad.is_empty(), || bad.join(", "));
}

fn big_d_case(c: &mut Case) {
    let mut rng = c.rng();
    let (s, d) = random::mixed_diagram(&mut rng, 1, random::DEFAULT_MAX_CROSSINGS);
    let closed = d.big_d(0).unwrap();
    let doubled = d.big_d_doubled(&s, 0).unwrap();
    c.check("closed-vs-doubled", closed == doubled, || format!("{closed} vs {doubled}"));

    let (s, d) = random::mixed_diagram(&mut rng, 3, 6);
    let n = d.len();
    let mut full = d.clone();
    for i in (0..n).rev() {
        full = full.double(i);
    }
    let values: Vec<Z4Exp> = (0..1u32 << n)
        .map(|mask| {
            let plus: Vec<usize> = (0..n).map(|i| 2 * i + (mask >> i & 1) as usize).collect();
            let minus: Vec<usize> = (0..n).map(|i| 2 * i + 1 - (mask >> i & 1) as usize).collect();
            full.d_sublinks(&s, &plus, &minus).unwrap()
        })
        .collect();
    c.check("diagram-splittings", values.iter().all(|v| *v == values[0]), || format!("{values:?}"));

    let case = CaseOne::new(random::rhs_data(&mut rng, 3));
    let n = rng.gen_range(1..=4);
    let l = random::hom_link(&mut rng, &case, n);
    let values: Vec<Z4Exp> = (0..1u32 << n)
        .map(|mask| {
            let plus: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            case.split_d(&l, &plus).unwrap()
        })
        .collect();
    c.check("link-splittings", values.iter().all(|v| *v == values[0]), || format!("{values:?}"));
}

const CYCLIC_MAX: u64 = 99;

/// Case `i` checks `Z/p` for `p = 2i + 3`.
fn cyclic_span_case(c: &mut Case) {
    let p = 2 * c.case as i64 + 3;
    let g = GroupSpec::cyclic(p).expect("odd");
    let mut classes: Vec<ClassRep> = (0..p).map(|k| g.class_rep(&Word(vec![1; k as usize]))).collect();
    classes.sort();
    classes.dedup();
    let expect = (p / 2 + 1) as usize;
    c.check(&format!("Z{p}"), classes.len() == expect, || format!("{} classes, expected {expect}", classes.len()));
}

fn homomorphism_case(c: &mut Case) {
    let mut rng = c.rng();
    let s = if rng.gen_bool(0.5) { SurfaceModel::torus() } else { SurfaceModel::planar(2).expect("valid") };
    let gen = |rng: &mut CaseRng| {
        let n = rng.gen_range(1..=2);
        if s.group.is_abelian() {
            random::torus_diagram(rng, n, 6)
        } else {
            random::planar_diagram(rng, 2, n, 6)
        }
    };
    let (l1, l2) = (gen(&mut rng), gen(&mut rng));
    let alg = SkeinAlgebra::new(s.group.clone());
    let o = oracle(&mut rng);
    let prod = skein_product_diagrams(&s, &l1, &l2).expect("valid").element;
    let expect = alg
        .mul(&phi_diagram(&s, &l1).unwrap().element, &phi_diagram(&s, &l2).unwrap().element)
        .expect("canonical");
    c.check("diagrams", agrees(&alg, &prod, &expect, &o), || format!("{prod} vs {expect}"));

    let case = CaseOne::new(random::rhs_data(&mut rng, 3));
    let g = random::rhs_group(case.data());
    let alg = SkeinAlgebra::new(g.clone());
    let (n1, n2) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
    let l1 = random::hom_link(&mut rng, &case, n1);
    let l2 = random::hom_link(&mut rng, &case, n2);
    let cross = random::cross_lk(&mut rng, &case, &l1, &l2);
    let prod = skein_product_links(&case, &g, &l1, &l2, &cross).expect("valid").element;
    let expect = alg
        .mul(&phi_link(&case, &g, &l1).unwrap().element, &phi_link(&case, &g, &l2).unwrap().element)
        .expect("canonical");
    c.check("links", prod == expect, || format!("{prod} vs {expect}"));
    let swapped: Vec<Vec<_>> = (0..l2.len()).map(|b| (0..l1.len()).map(|a| cross[a][b]).collect()).collect();
    let back = skein_product_links(&case, &g, &l2, &l1, &swapped).expect("valid").element;
    c.check("links-commute", back == prod, || format!("{back} vs {prod}"));
}
