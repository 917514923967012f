use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use kps_core::design::{verify_bib, verify_pbib};
use kps_core::metrics::{self, fail_s, ConnectivityReport, ResiliencyReport};
use kps_core::oracle::{self, McConfig, DEFAULT_CAP};
use kps_core::report::{self, Table, SCHEMA};
use kps_core::scalar::render_rational;
use kps_core::sharedkey::{generic_discover, GdStsFamily, NodeLabel};
use kps_core::spec::{DesignSpec, RunSpec, SchemeSpec};
use kps_core::{tables, BetaMode, BlockDesign, Error, Exact, FailMode, Kps, Role};

/// Standard errors an MC estimate may deviate from its analytic target.
const MC_TOLERANCE: f64 = 4.0;

/// Agreement under the larger of the estimate's and the target's standard
/// error, so an all-hit run still tests a target just below 1.
fn agrees(est: &oracle::McEstimate, target: f64) -> bool {
    let se = est.stderr.max((target * (1.0 - target) / est.trials as f64).sqrt());
    (est.estimate - target).abs() <= MC_TOLERANCE * se + 1e-12
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "kps", version, about = "Key predistribution schemes from duals of PBIB and BIB designs")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Output file (a directory for `paper-tables`); stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo seed; overrides the run spec.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials; overrides the run spec.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Decimal places for probabilities.
    #[arg(long, global = true, default_value_t = 4)]
    precision: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an association scheme and print its parameters.
    Scheme {
        /// Scheme spec: a JSON file or inline JSON.
        spec: String,
    },
    /// Build and verify a design and its dual.
    Design {
        /// Design spec: a JSON file or inline JSON.
        spec: String,
        /// Print the design as an explicit-design JSON spec instead.
        #[arg(long)]
        export: bool,
    },
    /// Build a KPS and print its node-association tables.
    Kps {
        /// Run spec: a JSON file or inline JSON.
        spec: String,
    },
    /// Connectivity and resiliency of a KPS.
    Analyze {
        /// Run spec: a JSON file or inline JSON.
        spec: String,
        /// Comma-separated eta list; overrides the run spec.
        #[arg(long, value_delimiter = ',')]
        eta: Option<Vec<u32>>,
        /// Comma-separated s list; overrides the run spec.
        #[arg(long, value_delimiter = ',')]
        s: Option<Vec<u32>>,
    },
    /// Check the analytics against exhaustive and Monte Carlo oracles.
    Verify {
        /// Run spec: a JSON file or inline JSON.
        spec: String,
    },
    /// Keys shared by two nodes of the GD x Steiner-triple family.
    Discover {
        /// Node label `beta:gamma:zeta:u` (`beta:gamma:x` when g = 0 mod 3).
        first: String,
        second: String,
        /// Number of GD groups.
        #[arg(long)]
        a: usize,
        /// GD group size.
        #[arg(long)]
        f: usize,
        /// Replication of the Steiner triple system.
        #[arg(long)]
        g: usize,
    },
    /// Regenerate the toy and benchmark tables, one file per case.
    PaperTables,
}

enum Failure {
    Usage(String),
    Core(Error),
    Mismatch(Table),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(table)) => {
            let _ = emit(&cli, &table);
            eprintln!("verification mismatch");
            ExitCode::from(3)
        }
        Err(f) => {
            let (code, kind, message) = match f {
                Failure::Usage(m) => (1, "usage", m),
                Failure::Io(m) => (1, "io", m),
                Failure::Core(e) if e.is_design_error() => (2, "invalid_design", e.to_string()),
                Failure::Core(e) => (1, "usage", e.to_string()),
                Failure::Mismatch(_) => unreachable!(),
            };
            eprintln!("{}", json!({ "schema": SCHEMA, "error": { "kind": kind, "message": message } }));
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Scheme { spec } => emit(cli, &scheme_table(&parse::<SchemeSpec>(spec)?)?),
        Command::Design { spec, export } => {
            let spec = parse::<DesignSpec>(spec)?;
            let d = spec.build()?;
            if *export {
                let text = serde_json::to_string(&DesignSpec::explicit(&d)).expect("spec serializes") + "\n";
                return write_out(cli.out.as_deref(), &text);
            }
            emit(cli, &design_table(&d)?)
        }
        Command::Kps { spec } => emit(cli, &report::kps_rows(&parse::<RunSpec>(spec)?.build_kps()?)),
        Command::Analyze { spec, eta, s } => {
            let mut spec = parse::<RunSpec>(spec)?;
            if let Some(eta) = eta {
                spec.eta = eta.clone();
            }
            if let Some(s) = s {
                spec.s = s.clone();
            }
            emit(cli, &analyze(&spec, cli.precision)?)
        }
        Command::Verify { spec } => {
            let table = verify(cli, &parse::<RunSpec>(spec)?)?;
            if table.rows.iter().any(|r| r.metric == "status" && r.value == "fail") {
                return Err(Failure::Mismatch(table));
            }
            emit(cli, &table)
        }
        Command::Discover { first, second, a, f, g } => discover(cli, first, second, *a, *f, *g),
        Command::PaperTables => paper_tables(cli),
    }
}

/// Reads `arg` as inline JSON when it starts with `{`, else as a file path.
fn parse<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::Io(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Core(Error::Spec(e.to_string())))
}

fn render(cli: &Cli, table: &Table) -> String {
    match cli.format {
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&table.to_json()).expect("table serializes") + "\n",
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(cli: &Cli, table: &Table) -> Result<(), Failure> {
    write_out(cli.out.as_deref(), &render(cli, table))
}

fn scheme_table(spec: &SchemeSpec) -> Result<Table, Failure> {
    let s = spec.build()?;
    let mut t = Table::new("scheme");
    t.push("v", "", s.v_star());
    for j in 1..3 {
        t.push("theta", j, s.theta()[j]);
    }
    for j in 0..3 {
        for u in 0..3 {
            for w in 0..3 {
                t.push("phi", format!("{j}{u}{w}"), s.phi().get(j, u, w));
            }
        }
    }
    let check = s.validate();
    t.push("validation", "", check.mismatch.map_or("pass".to_string(), |m| m.to_string()));
    Ok(t)
}

fn design_table(d: &BlockDesign) -> Result<Table, Failure> {
    let mut t = Table::new("design");
    t.push("v", "", d.v_star());
    t.push("b", "", d.blocks().len());
    t.push("k", "", d.k_star());
    t.push("r", "", d.r_star());
    t.push("role", "", d.role().name());
    let check = match d.role() {
        Role::Bib { lambda } => {
            t.push("lambda", "", lambda);
            verify_bib(d, *lambda)
        }
        Role::Pbib { lambda1, lambda2, scheme } => {
            t.push("lambda", 1, lambda1);
            t.push("lambda", 2, lambda2);
            verify_pbib(d, scheme, *lambda1, *lambda2)
        }
        Role::Incidence => return Err(Error::UnsupportedRole.into()),
    };
    t.push("verification", "", check.violation.map_or("pass".to_string(), |v| v.to_string()));
    let dual = d.dual()?;
    t.push("dual_v", "", dual.v());
    t.push("dual_b", "", dual.b());
    t.push("dual_r", "", dual.r());
    t.push("dual_k", "", dual.k());
    t.push("dual_theta", 1, dual.theta()[1]);
    t.push("dual_theta", 2, dual.theta()[2]);
    t.push("dual_in_q", "", dual.in_q());
    Ok(t)
}

fn analyze(spec: &RunSpec, places: u32) -> Result<Table, Failure> {
    if spec.eta.is_empty() {
        return Err(Failure::Usage("analyze needs a nonempty eta list (spec `eta` or --eta)".into()));
    }
    let kps = spec.build_kps()?;
    let mut t = Table::new("analysis");
    t.push("v", "", kps.v());
    t.push("n", "", kps.n());
    t.push("k", "", kps.k());
    t.extend(report::connectivity_rows(&ConnectivityReport::compute(&kps, &spec.eta, spec.beta_mode), places));
    if !spec.s.is_empty() {
        t.extend(report::resiliency_rows(&ResiliencyReport::compute(&kps, &spec.s, spec.fail_mode)?, places));
    }
    Ok(t)
}

fn status(t: &mut Table, check: &str, pass: bool) {
    t.push("status", check, if pass { "pass" } else { "fail" });
}

fn verify(cli: &Cli, spec: &RunSpec) -> Result<Table, Failure> {
    let places = cli.precision;
    let designs = spec.build_designs()?;
    let kps = spec.build_kps()?;
    let mut t = Table::new("verify");

    for (i, d) in designs.iter().enumerate() {
        let report = match d.role() {
            Role::Bib { lambda } => verify_bib(d, *lambda),
            Role::Pbib { lambda1, lambda2, scheme } => verify_pbib(d, scheme, *lambda1, *lambda2),
            Role::Incidence => return Err(Error::UnsupportedRole.into()),
        };
        let name = format!("design {}", i + 1);
        t.push("design_check", &name, report.violation.as_ref().map_or("ok".to_string(), ToString::to_string));
        status(&mut t, &name, report.is_pass());
    }
    for (i, dd) in kps.duals().iter().enumerate() {
        let report = oracle::exhaustive_scheme_check(dd);
        let name = format!("dual scheme {}", i + 1);
        t.push("scheme_check", &name, report.mismatch.as_ref().map_or("ok".to_string(), ToString::to_string));
        status(&mut t, &name, report.is_pass());
    }

    if kps.n() <= DEFAULT_CAP {
        let analytic = metrics::pr1::<Exact>(&kps);
        let counted = oracle::exact_pr1(&kps, DEFAULT_CAP)?;
        t.push("pr1_analytic", "", render_rational(&analytic, places));
        t.push("pr1_enumerated", "", render_rational(&counted, places));
        status(&mut t, "pr1", analytic == counted);
        let first = kps.node_at(0);
        for (tuple, mu) in kps.mu_table() {
            let partner = (1..kps.n())
                .map(|i| kps.node_at(i))
                .find(|b| kps.assoc_tuple(&first, b).map_or(false, |x| x == tuple));
            if let Some(b) = partner {
                let counted = oracle::exact_mu(&kps, &first, &b, DEFAULT_CAP)?;
                t.push("mu_analytic", &tuple, mu);
                t.push("mu_enumerated", &tuple, counted);
                status(&mut t, &format!("mu {tuple}"), mu == counted);
            }
        }
    } else {
        t.push("exact_checks", "", format!("skipped: n = {} exceeds cap {DEFAULT_CAP}", kps.n()));
    }

    let cfg = McConfig {
        trials: cli.trials.unwrap_or(spec.oracle.trials),
        seed: cli.seed.unwrap_or(spec.oracle.seed),
        shards: spec.oracle.shards,
    };
    t.push("mc_algorithm", "", oracle::ALGORITHM);
    t.push("mc_seed", "", cfg.seed);
    t.push("mc_trials", "", cfg.trials);
    t.push("mc_shards", "", cfg.shards);
    let mc = |x: f64| format!("{x:.6}");
    let etas = if spec.eta.is_empty() { vec![1] } else { spec.eta.clone() };
    for eta in etas {
        let target = metrics::pr::<f64>(&kps, eta, BetaMode::Exact);
        let est = oracle::mc_two_hop(&kps, eta, &cfg)?;
        t.push("pr_analytic", eta, mc(target));
        t.push("pr_mc", eta, mc(est.estimate));
        t.push("pr_mc_stderr", eta, mc(est.stderr));
        status(&mut t, &format!("pr eta={eta}"), agrees(&est, target));
    }
    let ss = if spec.s.is_empty() { vec![1] } else { spec.s.clone() };
    for s in ss {
        let fail = fail_s::<f64>(&kps, s, FailMode::Exact)?;
        let est = oracle::mc_fail(&kps, s, &cfg)?;
        t.push("fail_analytic", s, mc(fail.value));
        t.push("fail_mc", s, mc(est.estimate));
        t.push("fail_mc_stderr", s, mc(est.stderr));
        let name = format!("fail s={s}");
        match (agrees(&est, fail.value), fail.warning) {
            (true, _) => status(&mut t, &name, true),
            (false, None) => status(&mut t, &name, false),
            (false, Some(w)) => {
                t.push("status", &name, "outside-precondition");
                t.push("warning", &name, w);
            }
        }
    }
    Ok(t)
}

fn discover(cli: &Cli, a: &str, b: &str, groups: usize, group_size: usize, g: usize) -> Result<(), Failure> {
    let (keys, note) = if g % 3 == 1 {
        let family = GdStsFamily::new(groups, group_size, g)?;
        let keys = family.discover(NodeLabel::parse(a)?, NodeLabel::parse(b)?)?;
        (keys.iter().map(ToString::to_string).collect::<Vec<_>>(), None)
    } else {
        let spec = RunSpec {
            designs: vec![
                DesignSpec::Pbib2 { scheme: SchemeSpec::Gd { a: groups, f: group_size } },
                DesignSpec::Sts { g },
            ],
            q: None,
            eta: Vec::new(),
            s: Vec::new(),
            beta_mode: BetaMode::default(),
            fail_mode: FailMode::default(),
            oracle: Default::default(),
        };
        let kps = spec.build_kps()?;
        let (na, nb) = (raw_node(&kps, a, group_size)?, raw_node(&kps, b, group_size)?);
        let keys = generic_discover(&kps, &na, &nb)?;
        let note = "generic key-ring intersection: labels exist only for g = 1 mod 3; keys are symbol(design)";
        (keys.iter().map(ToString::to_string).collect(), Some(note))
    };
    let text = match cli.format {
        Format::Csv => {
            let mut s = note.map(|n| format!("# note: {n}\n")).unwrap_or_default();
            for k in &keys {
                s.push_str(k);
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let mut v = json!({ "schema": SCHEMA, "kind": "discover", "a": a, "b": b, "keys": keys });
            if let Some(n) = note {
                v["note"] = json!(n);
            }
            serde_json::to_string_pretty(&v).expect("json serializes") + "\n"
        }
    };
    write_out(cli.out.as_deref(), &text)
}

/// `beta:gamma:x` with `x` the 0-based Steiner-system symbol.
fn raw_node(kps: &Kps, label: &str, f: usize) -> Result<kps_core::NodeId, Failure> {
    let parts: Vec<usize> = label
        .split(':')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::Label(format!("`{label}`: expected beta:gamma:x")))?;
    match parts[..] {
        [beta, gamma, x] if beta >= 1 && (1..=f).contains(&gamma) => {
            Ok(kps.node(&[((beta - 1) * f + gamma - 1) as u32, x as u32])?)
        }
        _ => Err(Error::Label(format!("`{label}`: expected beta:gamma:x with 1-based beta, gamma")).into()),
    }
}

fn paper_tables(cli: &Cli) -> Result<(), Failure> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("paper-tables"));
    fs::create_dir_all(&dir)?;
    let ext = match cli.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    for case in tables::benchmark_cases() {
        let table = tables::compute_table(&case, cli.precision)?;
        let path = dir.join(format!("example-{}.{ext}", case.id));
        fs::write(&path, render(cli, &table))?;
        println!("{}", path.display());
    }
    Ok(())
}
