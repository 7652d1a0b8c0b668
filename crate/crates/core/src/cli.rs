//! Command-line front end. Results go to standard output as JSON; the exit
//! status is 0 on success, 1 for invalid input and 2 for failed checks.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::algebra::{SkeinAlgebra, SkeinElt};
use crate::diagrams::DEFAULT_CROSSING_CAP;
use crate::groups::{GroupSpec, Word};
use crate::json::{resolved_json, CaseOneLinkJson, CaseOnePairJson, DiagramJson, RhsJson};
use crate::linking::{lift_linking_form, CaseOne};
use crate::maps::{phi_diagram, phi_link, psi, skein_product_diagrams, skein_product_links};
use crate::random::rhs_group;
use crate::verify::{self, Status, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "skein4", version, about = "Skein module computations at A^4 = 1")]
pub struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of cases per verification suite.
    #[arg(long, global = true, default_value_t = 100)]
    pub cases: u64,
    /// Verification suite, or "all".
    #[arg(long, global = true, default_value = "all")]
    pub suite: String,
    /// Group backend as JSON, for commands that take bare words or classes.
    #[arg(long, global = true)]
    pub backend: Option<PathBuf>,
    /// Largest diagram `resolve` will expand.
    #[arg(long, global = true, default_value_t = DEFAULT_CROSSING_CAP)]
    pub crossing_cap: usize,
    /// Human-readable output.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lift a linking form: {"torsion":[5],"lf":[["1/5"]]}.
    Lift { input: PathBuf },
    /// Canonical class of a word, given as a JSON array, over --backend.
    Class { input: PathBuf },
    /// Product of two elements over --backend.
    Mul { left: PathBuf, right: PathBuf },
    /// Phi of a diagram, or of a link given as {"rhs","link"}.
    Phi { input: PathBuf },
    /// Standard diagram of a class, given as a JSON array, over --backend.
    Psi { input: PathBuf },
    /// State sum of a diagram.
    Resolve { input: PathBuf },
    /// Product of two diagrams, or of the pair in one {"rhs","left","right","cross"} file.
    Product { first: PathBuf, second: Option<PathBuf> },
    /// Run verification suites.
    Verify,
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(msg: String) -> Self {
        Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn render<T: Serialize>(v: &T, pretty: bool) -> String {
    let s = if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) };
    s.expect("serializable") + "\n"
}

fn backend(cli: &Cli) -> Result<GroupSpec, String> {
    let path = cli.backend.as_ref().ok_or("this command needs --backend FILE")?;
    read_json(path)
}

fn canonical_elt(alg: &SkeinAlgebra, e: &SkeinElt, what: &str) -> Result<SkeinElt, String> {
    let mut out = SkeinElt::scalar(e.unit());
    for (c, &k) in e.terms() {
        let canon = alg.group().canonicalize_rep(c).map_err(|err| format!("{what}.terms: {err}"))?;
        out.add_term(canon, k);
    }
    Ok(out)
}

fn case_one_group(rhs: &crate::linking::RhsData, g: &Option<GroupSpec>) -> GroupSpec {
    g.clone().unwrap_or_else(|| rhs_group(rhs))
}

fn dispatch(cli: &Cli) -> Result<Outcome, String> {
    fn emit<T: Serialize>(v: &T, pretty: bool) -> Outcome {
        Outcome { code: EXIT_OK, stdout: render(v, pretty), stderr: String::new() }
    }
    let ok = |v: serde_json::Value| emit(&v, cli.pretty);
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match &cli.command {
        Command::Lift { input } => {
            let data = read_json::<RhsJson>(input)?.to_data().map_err(|e| err(&e))?;
            let hat = lift_linking_form(&data);
            let m: Vec<Vec<String>> = hat.matrix().iter().map(|r| r.iter().map(|q| q.to_string()).collect()).collect();
            Ok(ok(json!({ "lift": m })))
        }
        Command::Class { input } => {
            let g = backend(cli)?;
            let w: Word = read_json(input)?;
            g.check_word(&w).map_err(|e| format!("word: {e}"))?;
            let c = g.classify(&w);
            Ok(ok(json!({ "class": c.rep.0, "reliable": c.reliable })))
        }
        Command::Mul { left, right } => {
            let alg = SkeinAlgebra::new(backend(cli)?);
            let u = canonical_elt(&alg, &read_json(left)?, "left")?;
            let v = canonical_elt(&alg, &read_json(right)?, "right")?;
            let p = alg.mul(&u, &v).map_err(|e| err(&e))?;
            Ok(emit(&p, cli.pretty))
        }
        Command::Phi { input } => {
            let value: serde_json::Value = read_json(input)?;
            let r = if value.get("surface").is_some() {
                let j: DiagramJson = serde_json::from_value(value).map_err(|e| err(&e))?;
                let (s, d) = j.to_diagram().map_err(|e| err(&e))?;
                phi_diagram(&s, &d).map_err(|e| err(&e))?
            } else {
                let j: CaseOneLinkJson = serde_json::from_value(value).map_err(|e| err(&e))?;
                let data = j.rhs.to_data().map_err(|e| format!("rhs.{e}"))?;
                let link = j.link.to_link().map_err(|e| format!("link.{e}"))?;
                let g = case_one_group(&data, &j.group);
                phi_link(&CaseOne::new(data), &g, &link).map_err(|e| err(&e))?
            };
            Ok(emit(&r, cli.pretty))
        }
        Command::Psi { input } => {
            let g = backend(cli)?;
            let c: crate::groups::ClassRep = crate::groups::ClassRep(read_json(input)?);
            let c = g.canonicalize_rep(&c).map_err(|e| format!("class: {e}"))?;
            let s = crate::diagrams::SurfaceModel::new(g);
            let p = psi(&s, &c);
            Ok(ok(json!({
                "diagram": DiagramJson::from_diagram(&s, &p.diagram),
                "scale": p.scale.value(),
            })))
        }
        Command::Resolve { input } => {
            let (s, d) = read_json::<DiagramJson>(input)?.to_diagram().map_err(|e| err(&e))?;
            let terms = d.resolve(&s, cli.crossing_cap).map_err(|e| err(&e))?;
            Ok(emit(&resolved_json(&s, &terms), cli.pretty))
        }
        Command::Product { first, second } => {
            let r = match second {
                Some(second) => {
                    let (s1, d1) = read_json::<DiagramJson>(first)?.to_diagram().map_err(|e| err(&e))?;
                    let (s2, d2) = read_json::<DiagramJson>(second)?.to_diagram().map_err(|e| err(&e))?;
                    if s1 != s2 {
                        return Err("surface: the two diagrams live on different surfaces".into());
                    }
                    skein_product_diagrams(&s1, &d1, &d2).map_err(|e| err(&e))?
                }
                None => {
                    let j: CaseOnePairJson = read_json(first)?;
                    let data = j.rhs.to_data().map_err(|e| format!("rhs.{e}"))?;
                    let l1 = j.left.to_link().map_err(|e| format!("left.{e}"))?;
                    let l2 = j.right.to_link().map_err(|e| format!("right.{e}"))?;
                    let cross = j.cross_matrix().map_err(|e| err(&e))?;
                    let g = case_one_group(&data, &j.group);
                    skein_product_links(&CaseOne::new(data), &g, &l1, &l2, &cross).map_err(|e| err(&e))?
                }
            };
            Ok(emit(&r, cli.pretty))
        }
        Command::Verify => {
            let records = verify::run(&cli.suite, cli.seed, cli.cases).map_err(|e| err(&e))?;
            let mut out = String::new();
            for r in &records {
                if cli.pretty {
                    let status = if r.status == Status::Pass { "PASS" } else { "FAIL" };
                    out.push_str(&format!("{status} {} case={} seed={}", r.check, r.case, r.seed));
                    if let Some(d) = &r.detail {
                        out.push_str(&format!(" {d}"));
                    }
                    out.push('\n');
                } else {
                    out.push_str(&render(r, false));
                }
            }
            let failed = verify::failures(&records);
            let code = if failed == 0 { EXIT_OK } else { EXIT_VERIFY };
            let stderr = format!("{} checks, {} failed\n", records.len(), failed);
            Ok(Outcome { code, stdout: out, stderr })
        }
    }
}

/// Runs one parsed invocation.
pub fn run(cli: &Cli) -> Outcome {
    dispatch(cli).unwrap_or_else(Outcome::input_error)
}

/// Parses arguments (program name first) and runs them. Usage errors exit
/// with status 1.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}
