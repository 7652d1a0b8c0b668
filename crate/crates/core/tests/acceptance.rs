//! Acceptance gate. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails.

use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::SeedableRng;
use skein_core::algebra::{SkeinAlgebra, SkeinElt, DEFAULT_MODULUS, DEFAULT_ROUNDS};
use skein_core::groups::{ClassRep, GroupSpec, Word};
use skein_core::linking::lift_linking_form;
use skein_core::random::{self, CaseRng};
use skein_core::ring::{a_pow, CycCoeff, QuarterFrac, Z4Exp};
use skein_core::verify::{self, Record, Status, DEFAULT_SEED};

const TIME_LIMIT: Duration = Duration::from_secs(60);

struct Outcome {
    id: u32,
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
    elapsed: Duration,
}

fn criterion(id: u32, name: &'static str, f: impl FnOnce() -> (usize, Vec<String>)) -> Outcome {
    let start = Instant::now();
    let (checks, failures) = f();
    Outcome { id, name, checks, failures, elapsed: start.elapsed() }
}

fn from_suite(suite: &str, cases: u64) -> (usize, Vec<String>) {
    let records: Vec<Record> = verify::run(suite, DEFAULT_SEED, cases).expect("known suite");
    let failures = records
        .iter()
        .filter(|r| r.status == Status::Fail)
        .map(|r| format!("{} case {} seed {}: {}", r.check, r.case, r.seed, r.detail.clone().unwrap_or_default()))
        .collect();
    (records.len(), failures)
}

/// Lift of `k/l` by searching for the unique `delta` in `0..4`.
fn lift_by_search(q: Rational64) -> QuarterFrac {
    let (k, l) = (*q.numer(), *q.denom());
    let delta = (0..4).find(|d| (k + d * l).rem_euclid(4) == 0).expect("l is odd");
    QuarterFrac::new(k + delta * l, l)
}

fn lift_criterion() -> (usize, Vec<String>) {
    let mut rng = CaseRng::seed_from_u64(DEFAULT_SEED);
    let mut fails = Vec::new();
    let mut checks = 0;
    for case in 0..500 {
        let data = random::rhs_data(&mut rng, 4);
        let hat = lift_linking_form(&data);
        let m = hat.matrix();
        let t = data.torsion();
        for i in 0..t.len() {
            for j in 0..t.len() {
                checks += 1;
                let a = m[i][j];
                let lf = data.lf_matrix()[i][j];
                let ok = a == m[j][i]
                    && a * t[i] == QuarterFrac::zero()
                    && a * t[j] == QuarterFrac::zero()
                    && (a - QuarterFrac::new(*lf.numer(), *lf.denom())).to_z4().is_some()
                    && a == lift_by_search(lf);
                if !ok {
                    fails.push(format!("case {case} entry ({i},{j}): torsion {t:?}, lf {lf}, lift {a}"));
                }
            }
        }
    }
    (checks, fails)
}

/// `x_(x,y)` built directly from the exponent vector with the sign that
/// makes the first nonzero entry positive.
fn torus_gen(v: [i64; 2]) -> SkeinElt {
    let canon = match v.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => [-v[0], -v[1]],
        _ => v,
    };
    let mut e = SkeinElt::zero();
    e.add_term(ClassRep(canon.to_vec()), CycCoeff::ONE);
    e
}

fn torus_criterion() -> (usize, Vec<String>) {
    let alg = SkeinAlgebra::new(GroupSpec::torus());
    let word = |v: [i64; 2]| {
        let mut w = vec![v[0].signum(); v[0].unsigned_abs() as usize];
        w.extend(vec![2 * v[1].signum(); v[1].unsigned_abs() as usize]);
        alg.gen_word(&Word(w))
    };
    let mut fails = Vec::new();
    let mut checks = 0;
    let r = -5..=5;
    for p in r.clone() {
        for q in r.clone() {
            for s1 in r.clone() {
                for s2 in r.clone() {
                    checks += 1;
                    let got = alg.mul(&word([p, q]), &word([s1, s2])).expect("canonical");
                    let w = p * s2 - q * s1;
                    let expect = &torus_gen([p + s1, q + s2]).scale(a_pow(Z4Exp::new(w)))
                        + &torus_gen([p - s1, q - s2]).scale(a_pow(Z4Exp::new(-w)));
                    if got != expect {
                        fails.push(format!("({p},{q})*({s1},{s2}): {got} vs {expect}"));
                    }
                }
            }
        }
    }
    (checks, fails)
}

fn cyclic_criterion() -> (usize, Vec<String>) {
    let mut fails = Vec::new();
    let mut checks = 0;
    for p in (3..=199).step_by(2) {
        checks += 1;
        let g = GroupSpec::cyclic(p).expect("odd");
        let mut classes: Vec<ClassRep> = (0..p).map(|k| g.class_rep(&Word(vec![1; k as usize]))).collect();
        classes.sort();
        classes.dedup();
        // oracle: k ~ p - k, so the classes are min(k, p - k)
        let mut direct: Vec<i64> = (0..p).map(|k| k.min(p - k)).collect();
        direct.sort();
        direct.dedup();
        let expect = (p / 2 + 1) as usize;
        if classes.len() != expect || direct.len() != expect {
            fails.push(format!("Z/{p}: {} classes, oracle {}, expected {expect}", classes.len(), direct.len()));
        }
    }
    (checks, fails)
}

#[test]
fn acceptance() {
    assert_eq!(DEFAULT_MODULUS, 10007);
    const { assert!(DEFAULT_ROUNDS >= 20) };
    let outcomes = vec![
        criterion(1, "linking form lift on 500 random instances", lift_criterion),
        criterion(2, "crossing change negates Phi on 200 diagrams", || from_suite("crossing-switch", 200)),
        criterion(3, "skein relation and D identities on 200 diagrams", || from_suite("skein", 200)),
        criterion(4, "torus product-to-sum on the 11^4 grid", torus_criterion),
        criterion(5, "deformed algebra identities, 1000 pairs per backend", || from_suite("deformed", 1000)),
        criterion(6, "associativity: abelian formal, free trace oracle", || from_suite("assoc", 1000)),
        criterion(7, "Phi after Psi and permutation invariance", || from_suite("roundtrip", 500)),
        criterion(8, "d cross-check and properties on 500 diagrams", || from_suite("d-crosscheck", 500)),
        criterion(9, "D closed form vs doubling, splitting independence", || from_suite("D-welldef", 300)),
        criterion(10, "cyclic group class count for odd p <= 199", cyclic_criterion),
        criterion(11, "Phi is multiplicative on 200 pairs per case", || from_suite("homomorphism", 200)),
    ];
    let mut failed = 0;
    for o in &outcomes {
        let ok = o.failures.is_empty() && o.checks > 0 && o.elapsed < TIME_LIMIT;
        failed += usize::from(!ok);
        println!(
            "{} criterion {:>2}: {} ({} checks, {} failures, {:.2?})",
            if ok { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.checks,
            o.failures.len(),
            o.elapsed
        );
        for f in o.failures.iter().take(5) {
            println!("    {f}");
        }
    }
    assert_eq!(failed, 0, "{failed} criteria failed");
}
