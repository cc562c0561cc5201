//! `gct`: evaluate, rewrite and check string diagrams from the command line.
//!
//! Exit status is 0 on success, 1 when a law or soundness check fails and 2 on usage or
//! input errors. `GCT_TOLERANCE` overrides the default comparison tolerance.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gct::algebra::{
    check_coherence, check_complementarity, check_exponent_law, check_strong_complementarity, f4_pair, frel_pair, group_algebra_pair, spek_pair,
    zx_pair, AbelianGroup, LawMode, LawReport, ObservablePair,
};
use gct::diagram::text::{parse_diagram, parse_rule, print_diagram};
use gct::diagram::Phase;
use gct::models::fixtures;
use gct::models::{check_soundness, fmt_sig, AnyModel, Compare, DEFAULT_TOL};
use gct::nonlocality::{ghz_correlations, lhv_search, mermin_report, parity, support, ParityConstraint, MAX_SYSTEMS};
use gct::rewrite::{bialg_normalize_by_rewriting, builtin_rule, rewrite_to_fixpoint, spider_fuse, Fragment, Rule, DEFAULT_BUDGET};
use gct::signatures::{fixture, Signature};
use rand::SeedableRng;

const DIGITS: usize = 12;

#[derive(Parser)]
#[command(name = "gct", version, about = "String diagrams, observables and complementarity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a diagram file in a model and print the tensor.
    Eval {
        /// Signature fixture; defaults to the file's `signature` line.
        #[arg(long)]
        theory: Option<String>,
        #[arg(long)]
        model: String,
        file: PathBuf,
    },
    /// Rewrite a diagram and print the result.
    Rewrite {
        #[arg(long)]
        theory: Option<String>,
        /// Built-in rule by name (repeatable).
        #[arg(long = "builtin")]
        builtins: Vec<String>,
        /// Rule file (repeatable).
        #[arg(long = "rule")]
        rules: Vec<PathBuf>,
        /// Fuse same-coloured spiders to a fixpoint.
        #[arg(long, conflicts_with = "bialg")]
        fuse: bool,
        /// Bialgebra normal form by rewriting (white copies, gray merges).
        #[arg(long)]
        bialg: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        file: PathBuf,
    },
    /// Check algebraic laws of an observable pair.
    Check {
        #[arg(long)]
        pair: String,
        /// coherence, complementarity, strong-complementarity, exponent or all.
        #[arg(long, default_value = "all")]
        law: String,
        /// Exponent for the exponent law.
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// GHZ correlations for phased measurements, their parity and a hidden-state search.
    Ghz {
        #[arg(long, default_value_t = 3)]
        parties: usize,
        /// Comma-separated angles in degrees, one per party.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        angles: Vec<f64>,
        #[arg(long, default_value = "z2")]
        pair: String,
        /// Also print the full Mermin report.
        #[arg(long)]
        mermin: bool,
    },
    /// Check the built-in rules of a theory against a model.
    Soundness {
        #[arg(long, default_value = "boolcirc")]
        theory: String,
        #[arg(long)]
        model: String,
    },
}

enum Failure {
    /// A check ran and did not hold.
    Check(String),
    /// Bad flags, files or fixture names.
    Usage(String),
}

type Run = Result<String, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn tolerance() -> Result<f64, Failure> {
    match std::env::var("GCT_TOLERANCE") {
        Ok(v) => v.trim().parse::<f64>().ok().filter(|t| t.is_finite() && *t >= 0.0).ok_or_else(|| usage(format!("GCT_TOLERANCE '{v}' is not a tolerance"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn model(name: &str) -> Result<AnyModel, Failure> {
    let m = match name {
        "qubit" => AnyModel::Complex(fixtures::qubit()),
        "stab-qubit" => AnyModel::Complex(fixtures::stab_model()),
        "toy-z4-qubit" => AnyModel::Complex(fixtures::toy_z4_model()),
        "B" => AnyModel::Boolean(fixtures::bool_b()),
        "P" => AnyModel::Boolean(fixtures::bool_p()),
        "spek-frel" => AnyModel::Boolean(fixtures::spek_model()),
        "toy-z2xz2-frel" => AnyModel::Boolean(fixtures::toy_z2xz2_model()),
        other => {
            let sized = |prefix: &str| other.strip_prefix(prefix).and_then(|d| d.parse::<usize>().ok()).filter(|d| (1..=16).contains(d));
            if let Some(d) = sized("symgrp-R") {
                AnyModel::Complex(fixtures::symgrp(d))
            } else if let Some(p) = sized("bialg-z") {
                AnyModel::Complex(fixtures::cyclic_bialgebra(p))
            } else {
                return Err(usage(format!("unknown model '{other}'")));
            }
        }
    };
    Ok(m)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// The `--theory` fixture, or the one named by the file's `signature` line.
fn signature(theory: Option<&str>, text: &str) -> Result<Signature, Failure> {
    let name = match theory {
        Some(t) => t.to_string(),
        None => text
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .find_map(|l| l.strip_prefix("signature ").map(|s| s.trim().to_string()))
            .ok_or_else(|| usage("no --theory given and the file names no signature"))?,
    };
    fixture(&name).map_err(usage)
}

fn eval(theory: Option<&str>, model_name: &str, file: &Path) -> Run {
    let text = read(file)?;
    let sig = signature(theory, &text)?;
    let d = parse_diagram(&text, &sig).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let m = model(model_name)?;
    let t = m.interpret(&d).map_err(usage)?;
    let mut out = t.render(DIGITS);
    if let (Some(c), (1, 1)) = (t.as_complex(), t.shape()) {
        let z = c.get(0, 0);
        writeln!(out, "scalar {} {}", fmt_sig(z.re, DIGITS), fmt_signed_im(z.im)).unwrap();
    }
    Ok(out)
}

fn fmt_signed_im(im: f64) -> String {
    if im < 0.0 {
        format!("- {}i", fmt_sig(-im, DIGITS))
    } else {
        format!("+ {}i", fmt_sig(im, DIGITS))
    }
}

fn rewrite(theory: Option<&str>, builtins: &[String], rule_files: &[PathBuf], fuse: bool, bialg: bool, budget: usize, file: &Path) -> Run {
    let text = read(file)?;
    let sig = signature(theory, &text)?;
    let d = parse_diagram(&text, &sig).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let (result, header) = if fuse {
        (spider_fuse(&d).map_err(usage)?, "# spider fusion".to_string())
    } else if bialg {
        let (r, steps) = bialg_normalize_by_rewriting(&d, &Fragment::default(), budget).map_err(usage)?;
        (r, format!("# bialgebra normal form after {steps} steps"))
    } else {
        let mut rules = Vec::new();
        for name in builtins {
            rules.push(builtin(name, &sig).ok_or_else(|| usage(format!("unknown rule '{name}' for {}", sig.name)))?);
        }
        for path in rule_files {
            let rt = parse_rule(&read(path)?, &sig).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            rules.push(Rule::from_text(rt).map_err(usage)?);
        }
        if rules.is_empty() {
            return Err(usage("give --builtin, --rule, --fuse or --bialg"));
        }
        let run = rewrite_to_fixpoint(&rules, &d, budget).map_err(usage)?;
        (run.result, format!("# {} steps, {}", run.steps, if run.normal { "normal form reached" } else { "budget exhausted" }))
    };
    Ok(format!("{header}\n{}", print_diagram(&result, &sig.name)))
}

/// Built-in rules exist for Boolean circuits only.
fn builtin(name: &str, sig: &Signature) -> Option<Rule> {
    ["and", "or", "not", "fan"].iter().all(|g| sig.generator(g).is_some()).then(|| builtin_rule(name, sig)).flatten()
}

enum Pair {
    Complex(ObservablePair<gct::C64>),
    Relational(ObservablePair<bool>),
}

fn pair(name: &str) -> Result<Pair, Failure> {
    let group = |m: &[u32]| Pair::Complex(group_algebra_pair(&AbelianGroup::new(m)));
    Ok(match name {
        "z2" | "zx" => Pair::Complex(zx_pair()),
        "z3" => group(&[3]),
        "z4" => group(&[4]),
        "z2xz2" => group(&[2, 2]),
        "zz" => Pair::Complex(ObservablePair::new("Z/Z", fixtures::z_observable(), fixtures::z_observable())),
        "f4" => Pair::Complex(f4_pair(0.3).map_err(usage)?),
        "frel" => Pair::Relational(frel_pair()),
        "spek" => Pair::Relational(spek_pair()),
        other => return Err(usage(format!("unknown pair '{other}'"))),
    })
}

fn laws<S: Compare>(p: &ObservablePair<S>, law: &str, k: usize, mode: LawMode) -> Result<LawReport, Failure> {
    Ok(match law {
        "coherence" => check_coherence(p, mode),
        "complementarity" => check_complementarity(p, mode),
        "strong-complementarity" => check_strong_complementarity(p, mode),
        "exponent" => check_exponent_law(p, k, mode),
        "all" => {
            let mut r = LawReport::new(p.name.clone());
            for rep in [check_coherence(p, mode), check_complementarity(p, mode), check_strong_complementarity(p, mode), check_exponent_law(p, k, mode)] {
                r.lines.extend(rep.lines);
            }
            r
        }
        other => return Err(usage(format!("unknown law '{other}'"))),
    })
}

fn check(pair_name: &str, law: &str, k: usize) -> Run {
    let mode = LawMode { tol: tolerance()?, strict: false };
    let report = match pair(pair_name)? {
        Pair::Complex(p) => laws(&p, law, k, mode)?,
        Pair::Relational(p) => laws(&p, law, k, mode)?,
    };
    let text = report.to_string();
    if report.all_pass() {
        Ok(text)
    } else {
        Err(Failure::Check(text))
    }
}

fn ghz(parties: usize, degrees: &[f64], pair_name: &str, mermin: bool) -> Run {
    if degrees.len() != parties {
        return Err(usage(format!("{parties} parties need {parties} angles, got {}", degrees.len())));
    }
    let Pair::Complex(p) = pair(pair_name)? else {
        return Err(usage("GHZ correlations need a complex pair"));
    };
    let tol = tolerance()?;
    let angles: Vec<Phase> = degrees.iter().map(|d| Phase::angle(d.to_radians())).collect();
    let dist = ghz_correlations(&p, &angles).map_err(usage)?;
    let d = p.dim();
    let mut out = String::new();
    let shown: Vec<String> = degrees.iter().map(|a| fmt_sig(*a, DIGITS)).collect();
    writeln!(out, "pair {} parties {parties} angles {}", p.name, shown.join(",")).unwrap();
    for (idx, prob) in dist.probs.iter().enumerate() {
        let mut label = String::new();
        let mut rest = idx;
        let mut digits = vec![0; parties];
        for slot in digits.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        for x in digits {
            write!(label, "{x}").unwrap();
        }
        writeln!(out, "outcome {label} p={}", fmt_sig(*prob, DIGITS)).unwrap();
    }
    let g = AbelianGroup::new(&[d as u32]);
    let par = parity(&dist, &g, parties);
    let parts: Vec<String> = par.iter().enumerate().map(|(i, q)| format!("{i}:{}", fmt_sig(*q, DIGITS))).collect();
    writeln!(out, "parity {}", parts.join(" ")).unwrap();
    let allowed = support(&par, tol);
    if parties <= MAX_SYSTEMS {
        let lhv = lhv_search(parties, 1, d as u32, &[ParityConstraint { settings: vec![0; parties], allowed }]).map_err(usage)?;
        writeln!(out, "lhv {}: {lhv}", if lhv.feasible() { "feasible" } else { "infeasible" }).unwrap();
    } else {
        writeln!(out, "lhv skipped: more than {MAX_SYSTEMS} systems").unwrap();
    }
    if mermin {
        let report = mermin_report(&p, &Phase::Zero, &Phase::angle(std::f64::consts::FRAC_PI_2)).map_err(usage)?;
        write!(out, "{report}").unwrap();
    }
    Ok(out)
}

fn soundness(theory: &str, model_name: &str) -> Run {
    let sig = fixture(theory).map_err(usage)?;
    let rules: Vec<Rule> = ["distributivity", "de-morgan"].iter().filter_map(|n| builtin(n, &sig)).collect();
    if rules.is_empty() {
        return Err(usage(format!("theory '{theory}' has no built-in rules")));
    }
    let m = model(model_name)?;
    let mut rng = rand::rngs::StdRng::seed_from_u64(0);
    let report = check_soundness(&rules, &m, 64, tolerance()?, &mut rng).map_err(usage)?;
    let mut out = String::new();
    writeln!(out, "model {}", report.model).unwrap();
    for v in &report.verdicts {
        write!(out, "{} {}", if v.sound { "SOUND" } else { "UNSOUND" }, v.rule).unwrap();
        if let Some(w) = &v.witness {
            write!(out, " witness input={:?} lhs={} rhs={}", w.input, w.lhs, w.rhs).unwrap();
        }
        out.push('\n');
    }
    if report.all_sound() {
        Ok(out)
    } else {
        Err(Failure::Check(out))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval { theory, model, file } => eval(theory.as_deref(), model, file),
        Command::Rewrite { theory, builtins, rules, fuse, bialg, budget, file } => rewrite(theory.as_deref(), builtins, rules, *fuse, *bialg, *budget, file),
        Command::Check { pair, law, k } => check(pair, law, *k),
        Command::Ghz { parties, angles, pair, mermin } => ghz(*parties, angles, pair, *mermin),
        Command::Soundness { theory, model } => soundness(theory, model),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Check(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
