use std::collections::BTreeMap;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sumprod::coloring::{is_x_consistent, Coloring, RationalColoring};
use sumprod::family::{enumerate_all_new, enumerate_extreme, enumerate_families, enumerate_lower, IndexSet};
use sumprod::identities;
use sumprod::pipeline::{
    build_full_consistent, build_lower_consistent, generalized_witness, hindman_witness, HindmanOutcome, Route,
};
use sumprod::rational::{parse_vector, scale, PosRational};
use sumprod::report::{all_pass, emit_report, Check, Report, SCHEMA_VERSION};
use sumprod::search::dut::{dut_threshold, dut_witness, unions_monochromatic};
use sumprod::search::folkman::{folkman_sums, folkman_witness};
use sumprod::search::schur::{schur_threshold, schur_witness};
use sumprod::search::vdw::{vdw_threshold, vdw_witness};
use sumprod::search::{SearchBudget, Threshold, Tracker};
use sumprod::{par, Error};

#[derive(Parser, Debug)]
#[command(name = "sumprod", version, about = "Search and verify monochromatic sum/product patterns over the positive rationals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Coloring as JSON, e.g. '{"kind":"val2_parity"}'.
    #[arg(long, default_value = r#"{"kind":"val2_parity"}"#)]
    coloring: String,
    #[arg(long, default_value_t = 200_000_000)]
    budget_candidates: u64,
    #[arg(long, default_value_t = 300)]
    budget_seconds: u64,
    /// Height bound for rational scans and window sizes.
    #[arg(long, default_value_t = 64)]
    height: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
    /// Dilation set, e.g. "1,2,1/2".
    #[arg(long, default_value = "1")]
    q: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Randomized exact checks of the algebraic identities.
    VerifyIdentities {
        #[arg(long, default_value_t = 1000)]
        cases: u64,
        /// Run one suite only.
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Classical finite searches.
    Search {
        problem: Problem,
        #[arg(long, value_enum, default_value_t = Mode::Witness)]
        mode: Mode,
        #[arg(long, default_value_t = 2)]
        r: u64,
        #[arg(long, default_value_t = 3)]
        k: u64,
        /// Size of the ground set searched in witness mode.
        #[arg(long, default_value_t = 20)]
        n: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Check a vector for consistency on a class of families.
    Consistency {
        #[arg(long)]
        v: String,
        #[arg(long, value_enum, default_value_t = Families::Lower)]
        families: Families,
        #[command(flatten)]
        common: Common,
    },
    /// Build a consistent vector by induction.
    Build {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, value_enum, default_value_t = BuildMode::Lower)]
        mode: BuildMode,
        #[command(flatten)]
        common: Common,
    },
    /// Find x with all finite sums and products of one color.
    Hindman {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "auto")]
        route: String,
        /// Use sums of products over disjoint index sets instead.
        #[arg(long)]
        generalized: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Schur, van der Waerden and disjoint-union thresholds at their smallest cases.
    Thresholds {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Problem {
    Schur,
    Vdw,
    Dut,
    Folkman,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Witness,
    Threshold,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Families {
    Lower,
    All,
    Extreme,
    New,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BuildMode {
    Lower,
    Full,
}

struct Ctx {
    coloring: Arc<Coloring>,
    budget: SearchBudget,
    qs: Vec<PosRational>,
    params: BTreeMap<String, String>,
}

impl Ctx {
    fn new(c: &Common) -> Result<Self, Error> {
        let coloring = Arc::new(Coloring::from_json(&c.coloring)?);
        let budget = SearchBudget {
            height_bound: c.height,
            max_candidates: c.budget_candidates,
            max_seconds: c.budget_seconds,
        };
        budget.validate()?;
        let qs = parse_vector(&c.q)?;
        if let Some(j) = c.jobs {
            if j == 0 {
                return Err(Error::InvalidInput("--jobs must be positive".into()));
            }
            par::set_jobs(j);
        }
        let mut params = BTreeMap::new();
        params.insert("coloring".into(), serde_json::to_string(coloring.spec()).expect("spec serializes"));
        params.insert("height".into(), c.height.to_string());
        params.insert("budget_candidates".into(), c.budget_candidates.to_string());
        params.insert("budget_seconds".into(), c.budget_seconds.to_string());
        params.insert("seed".into(), c.seed.to_string());
        params.insert("q".into(), qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(","));
        Ok(Ctx { coloring, budget, qs, params })
    }

    fn report(&self, command: &str) -> Report {
        let mut r = Report::new(command);
        r.params = self.params.clone();
        r
    }

    fn natural(&self) -> impl Fn(u64) -> Option<u64> + Sync + '_ {
        |n| self.coloring.color_natural(n)
    }
}

/// Parses `argv` (program name first) and runs the command; returns the exit
/// code and the text for standard output.
pub fn run(argv: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (0, e.to_string());
            }
            return (2, error_json("usage", &e.to_string()));
        }
    };
    match dispatch(cli.command) {
        Ok((code, report)) => (code, emit_report(&report)),
        Err(e) => (2, error_json(error_kind(&e), &e.to_string())),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::Dimension { .. } => "dimension",
        Error::InvalidInput(_) => "invalid_input",
        Error::Precondition(_) => "precondition",
        Error::Budget(_) => "budget",
        Error::MixedOmega(_) => "mixed_index_sets",
    }
}

fn error_json(kind: &str, message: &str) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "kind": kind, "message": message.trim_end() },
    });
    serde_json::to_string_pretty(&v).expect("error json serializes")
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("results serialize")
}

fn finish(mut r: Report, found: bool, elapsed_ms: u64) -> (i32, Report) {
    r.found = found;
    r.stats.elapsed_ms = elapsed_ms;
    (if found { 0 } else { 1 }, r)
}

fn dispatch(cmd: Command) -> Result<(i32, Report), Error> {
    match cmd {
        Command::VerifyIdentities { cases, suite, common } => {
            let ctx = Ctx::new(&common)?;
            let tracker = Tracker::new(&ctx.budget);
            let suites = match &suite {
                Some(s) => vec![identities::run_suite(s, common.seed, cases)?],
                None => identities::run_all(common.seed, cases)?,
            };
            let mut r = ctx.report("verify-identities").param("cases", cases);
            if let Some(s) = suite {
                r = r.param("suite", s);
            }
            r.checks = suites
                .iter()
                .map(|s| Check::new(format!("{}: {}/{}", s.name, s.passed, s.cases), s.pass()))
                .collect();
            r.witness = to_value(&suites);
            r.stats.candidates = suites.iter().map(|s| s.cases).sum();
            let ok = all_pass(&r.checks);
            Ok(finish(r, ok, tracker.elapsed_ms()))
        }
        Command::Search { problem, mode, r, k, n, common } => search(problem, mode, r, k, n, &common),
        Command::Consistency { v, families, common } => {
            let ctx = Ctx::new(&common)?;
            let tracker = Tracker::new(&ctx.budget);
            let v = parse_vector(&v)?;
            let fams = match families {
                Families::Lower => enumerate_lower(v.len())?,
                Families::All => enumerate_families(v.len())?,
                Families::Extreme => enumerate_extreme(v.len())?,
                Families::New => enumerate_all_new(v.len())?,
            };
            let mut r = ctx
                .report("consistency")
                .param("v", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
                .param("families", format!("{families:?}").to_lowercase());
            let mut failing = BTreeMap::new();
            for q in &ctx.qs {
                let rep = is_x_consistent(&scale(q, &v), &fams, ctx.coloring.as_ref())?;
                r.checks.push(Check::new(format!("q={q}: {} families", rep.checked), rep.consistent));
                if let Some(f) = rep.failing {
                    failing.insert(q.to_string(), f.to_string());
                }
            }
            r.witness = json!({ "families": fams.len(), "failing": failing });
            r.stats.candidates = (fams.len() * ctx.qs.len()) as u64;
            let ok = all_pass(&r.checks);
            Ok(finish(r, ok, tracker.elapsed_ms()))
        }
        Command::Build { n, mode, common } => {
            let ctx = Ctx::new(&common)?;
            let tracker = Tracker::new(&ctx.budget);
            let c: Arc<dyn RationalColoring> = ctx.coloring.clone();
            let out = match mode {
                BuildMode::Lower => build_lower_consistent(n, &ctx.qs, c, &tracker)?,
                BuildMode::Full => build_full_consistent(n, &ctx.qs, c, &tracker)?,
            };
            let mut r = ctx.report("build").param("n", n).param("mode", format!("{mode:?}").to_lowercase());
            r.stats.candidates = out.candidates;
            if let Some(b) = &out.found {
                r.checks = b.checks.clone();
                r.witness = to_value(b);
            } else {
                r.witness = json!({ "budget_exhausted": out.budget_exhausted });
            }
            Ok(finish(r, out.found.is_some(), tracker.elapsed_ms()))
        }
        Command::Hindman { k, route, generalized, common } => {
            let ctx = Ctx::new(&common)?;
            let tracker = Tracker::new(&ctx.budget);
            let route: Route = route.parse()?;
            let c: Arc<dyn RationalColoring> = ctx.coloring.clone();
            let out: HindmanOutcome = if generalized {
                generalized_witness(k, c, route, &tracker)?
            } else {
                hindman_witness(k, c, route, &tracker)?
            };
            let mut r = ctx
                .report("hindman")
                .param("k", k)
                .param("route", format!("{route:?}").to_lowercase())
                .param("generalized", generalized);
            r.stats.candidates = out.candidates;
            if let Some(w) = &out.witness {
                r.checks = w.checks.clone();
            }
            r.witness = to_value(&out);
            Ok(finish(r, out.witness.is_some(), tracker.elapsed_ms()))
        }
        Command::Thresholds { common } => {
            let ctx = Ctx::new(&common)?;
            let tracker = Tracker::new(&ctx.budget);
            let schur = schur_threshold(2, &ctx.budget)?;
            let vdw = vdw_threshold(3, 2, &ctx.budget)?;
            let dut = dut_threshold(2, 2, &ctx.budget)?;
            let mut r = ctx.report("thresholds");
            r.checks = vec![
                schur_certificate(&schur),
                vdw_certificate(&vdw, 3)?,
                dut_certificate(&dut, 2)?,
            ];
            r.witness = json!({ "schur_r2": schur, "vdw_k3_r2": vdw, "dut_r2_k2": dut });
            let ok = all_pass(&r.checks);
            Ok(finish(r, ok, tracker.elapsed_ms()))
        }
    }
}

fn lookup(cert: &[u64]) -> impl Fn(u64) -> Option<u64> + Sync + '_ {
    move |x| cert.get((x as usize).checked_sub(1)?).copied()
}

fn schur_certificate(t: &Threshold) -> Check {
    let below = t.value - 1;
    let s = schur_witness(&lookup(&t.certificate), below, true);
    Check::new(format!("schur certificate on [1..{below}] avoids x+y=z"), s.found.is_none())
}

fn vdw_certificate(t: &Threshold, k: u64) -> Result<Check, Error> {
    let below = t.value - 1;
    let s = vdw_witness(&lookup(&t.certificate), k, below)?;
    Ok(Check::new(format!("progression certificate on [1..{below}] avoids length {k}"), s.found.is_none()))
}

/// Certificates for subset colorings are indexed by mask minus one.
fn dut_certificate(t: &Threshold, k: usize) -> Result<Check, Error> {
    let below = (t.value - 1) as usize;
    let c = |s: IndexSet| t.certificate.get((s.mask() as usize).checked_sub(1)?).copied();
    let s = dut_witness(&c, below, k)?;
    Ok(Check::new(format!("union certificate on subsets of [{below}] avoids {k} blocks"), s.found.is_none()))
}

fn search(problem: Problem, mode: Mode, r_colors: u64, k: u64, n: u64, common: &Common) -> Result<(i32, Report), Error> {
    let ctx = Ctx::new(common)?;
    let tracker = Tracker::new(&ctx.budget);
    let mut rep = ctx
        .report("search")
        .param("problem", format!("{problem:?}").to_lowercase())
        .param("mode", format!("{mode:?}").to_lowercase());
    if mode == Mode::Threshold {
        rep = rep.param("r", r_colors);
        let (t, check) = match problem {
            Problem::Schur => {
                let t = schur_threshold(r_colors, &ctx.budget)?;
                let c = schur_certificate(&t);
                (t, c)
            }
            Problem::Vdw => {
                rep = rep.param("k", k);
                let t = vdw_threshold(k, r_colors, &ctx.budget)?;
                let c = vdw_certificate(&t, k)?;
                (t, c)
            }
            Problem::Dut => {
                rep = rep.param("k", k);
                let t = dut_threshold(r_colors, k as usize, &ctx.budget)?;
                let c = dut_certificate(&t, k as usize)?;
                (t, c)
            }
            Problem::Folkman => return Err(Error::InvalidInput("folkman has no threshold mode".into())),
        };
        rep.checks = vec![check];
        rep.witness = to_value(&t);
        let ok = all_pass(&rep.checks);
        return Ok(finish(rep, ok, tracker.elapsed_ms()));
    }
    let chi = ctx.natural();
    let (found, witness, candidates) = match problem {
        Problem::Schur => {
            rep = rep.param("n", n);
            let s = schur_witness(&chi, n, true);
            if let Some((x, y)) = s.found {
                rep.checks.push(Check::new("x, y, x+y share a color", chi(x) == chi(y) && chi(y) == chi(x + y)));
            }
            (s.found.is_some(), to_value(&s.found), s.candidates)
        }
        Problem::Vdw => {
            rep = rep.param("n", n).param("k", k);
            let s = vdw_witness(&chi, k, n)?;
            if let Some((a, d)) = s.found {
                rep.checks.push(Check::new("progression shares a color", (0..k).all(|i| chi(a + i * d) == chi(a))));
            }
            (s.found.is_some(), to_value(&s.found), s.candidates)
        }
        Problem::Dut => {
            rep = rep.param("n", n).param("k", k);
            let size = usize::try_from(n).map_err(|_| Error::InvalidInput("n too large".into()))?;
            let c = |s: IndexSet| ctx.coloring.color_natural(s.mask());
            let s = dut_witness(&c, size, k as usize)?;
            if let Some(b) = &s.found {
                rep.checks.push(Check::new("all unions share a color", unions_monochromatic(&c, b)));
            }
            (s.found.is_some(), to_value(&s.found), s.candidates)
        }
        Problem::Folkman => {
            rep = rep.param("k", k);
            let s = folkman_witness(&chi, k as usize, ctx.budget.height_bound, &tracker)?;
            if let Some(m) = &s.found {
                let sums = folkman_sums(m);
                let c0 = chi(*sums.iter().next().expect("nonempty"));
                rep.checks.push(Check::new("subset sums share a color", c0.is_some() && sums.iter().all(|&x| chi(x) == c0)));
            }
            (s.found.is_some(), to_value(&s.found), s.candidates)
        }
    };
    rep.witness = witness;
    rep.stats.candidates = candidates;
    Ok(finish(rep, found, tracker.elapsed_ms()))
}
