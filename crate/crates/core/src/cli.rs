//! Command-line front end: flag parsing, model files, DOT output.
//!
//! Model files are JSON documents:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "variables": [{ "name": "A", "kind": "discrete", "levels": ["no", "yes"] }],
//!   "arcs": [["A", "C"]],
//!   "locals": [{ "family": "cpt", "node": "A", "parents": [], "rows": [[0.3, 0.7]] }]
//! }
//! ```
//!
//! Gaussian locals use `"family": "gaussian"` with `intercept`,
//! `coefficients` and `residual_variance`. Reals are written in their
//! shortest round-trip form, so loading and re-emitting is byte-stable.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::citests::TestKind;
use crate::data::{gauss_stats, load_dataset, Dataset, Schema, VariableMeta};
use crate::error::{PgmError, Result};
use crate::ggm::{
    ggm_select, partial_correlations, relevance_network, shrink_correlation,
    shrink_correlation_with, Selection,
};
use crate::graph::{Dag, MixedGraph};
use crate::infer::{
    likelihood_weighting, logic_sampling, variable_elimination, Evidence, QueryResult,
};
use crate::learn::{gs_markov_network, Algorithm, LearnConfig, Learner};
use crate::params::{fit_network, BayesianNetwork, Cpt, GaussianLocal, LocalDistribution};
use crate::rng::{threads_from_env, with_threads};
use crate::scores::ScoreKind;
use crate::validate::{bootstrap_confidence, cross_validate, Loss};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: u32,
    variables: Vec<VariableEntry>,
    arcs: Vec<(String, String)>,
    #[serde(default)]
    locals: Vec<LocalEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableEntry {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    levels: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum LocalEntry {
    Cpt {
        node: String,
        parents: Vec<String>,
        rows: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        unseen_rows: Vec<usize>,
    },
    Gaussian {
        node: String,
        parents: Vec<String>,
        intercept: f64,
        coefficients: Vec<f64>,
        residual_variance: f64,
    },
}

fn model_err(e: impl std::fmt::Display) -> PgmError {
    PgmError::Model(e.to_string())
}

/// Serialises a network as a model document (ends with a newline).
pub fn model_to_string(bn: &BayesianNetwork) -> String {
    let g = bn.dag();
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        variables: bn
            .variables()
            .iter()
            .map(|v| VariableEntry {
                name: v.name.clone(),
                kind: if v.is_discrete() {
                    "discrete"
                } else {
                    "continuous"
                }
                .to_owned(),
                levels: v.levels().map(<[String]>::to_vec),
            })
            .collect(),
        arcs: g
            .arcs()
            .map(|(a, b)| (g.name(a).to_owned(), g.name(b).to_owned()))
            .collect(),
        locals: bn
            .locals()
            .iter()
            .map(|l| match l {
                LocalDistribution::Cpt(c) => LocalEntry::Cpt {
                    node: c.node.clone(),
                    parents: c.parents.clone(),
                    rows: c.rows.clone(),
                    unseen_rows: c.unseen_rows.clone(),
                },
                LocalDistribution::Gaussian(gl) => LocalEntry::Gaussian {
                    node: gl.node.clone(),
                    parents: gl.parents.clone(),
                    intercept: gl.intercept,
                    coefficients: gl.coefficients.clone(),
                    residual_variance: gl.residual_variance,
                },
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("model documents always serialise");
    s.push('\n');
    s
}

fn parse_file(text: &str) -> Result<(ModelFile, Dag, Vec<VariableMeta>)> {
    let file: ModelFile = serde_json::from_str(text).map_err(model_err)?;
    if file.format_version != FORMAT_VERSION {
        return Err(model_err(format!(
            "unsupported format_version {} (expected {FORMAT_VERSION})",
            file.format_version
        )));
    }
    let vars: Vec<VariableMeta> = file
        .variables
        .iter()
        .map(|v| match (v.kind.as_str(), &v.levels) {
            ("discrete", Some(levels)) => {
                Ok(VariableMeta::discrete(&v.name, levels.iter().cloned()))
            }
            ("continuous", None) => Ok(VariableMeta::continuous(&v.name)),
            _ => Err(model_err(format!(
                "variable '{}' has an invalid kind or levels",
                v.name
            ))),
        })
        .collect::<Result<_>>()?;
    let names: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
    let arcs: Vec<(&str, &str)> = file
        .arcs
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let dag = Dag::from_arcs(&names, &arcs)?;
    Ok((file, dag, vars))
}

/// Graph part of a model document; locals may be absent.
pub fn structure_from_str(text: &str) -> Result<Dag> {
    parse_file(text).map(|(_, dag, _)| dag)
}

pub fn model_from_str(text: &str) -> Result<BayesianNetwork> {
    let (file, dag, vars) = parse_file(text)?;
    let levels: BTreeMap<&str, usize> = vars
        .iter()
        .map(|v| (v.name.as_str(), v.levels().map_or(0, <[String]>::len)))
        .collect();
    let locals = file
        .locals
        .into_iter()
        .map(|l| match l {
            LocalEntry::Cpt {
                node,
                parents,
                rows,
                unseen_rows,
            } => {
                let parent_levels = parents
                    .iter()
                    .map(|p| {
                        levels
                            .get(p.as_str())
                            .copied()
                            .ok_or_else(|| model_err(format!("unknown parent '{p}'")))
                    })
                    .collect::<Result<_>>()?;
                Ok(LocalDistribution::Cpt(Cpt {
                    node,
                    parents,
                    parent_levels,
                    rows,
                    unseen_rows,
                }))
            }
            LocalEntry::Gaussian {
                node,
                parents,
                intercept,
                coefficients,
                residual_variance,
            } => Ok(LocalDistribution::Gaussian(GaussianLocal {
                node,
                parents,
                intercept,
                coefficients,
                residual_variance,
            })),
        })
        .collect::<Result<Vec<_>>>()?;
    BayesianNetwork::new(dag, vars, locals).map_err(model_err)
}

pub fn save_model(bn: &BayesianNetwork, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_string(bn)).map_err(|e| io_err(path, e))
}

pub fn load_model(path: &Path) -> Result<BayesianNetwork> {
    model_from_str(&read(path)?)
}

fn io_err(path: &Path, e: std::io::Error) -> PgmError {
    PgmError::Io(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// Extra attributes for particular node pairs, keyed by `(a, b)` with `a < b`.
pub type DotStyles = BTreeMap<(String, String), String>;

fn dot_id(name: &str) -> String {
    let plain = name
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        name.to_owned()
    } else {
        format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// DOT rendering: one line per arc (`A -> B;`) or undirected edge
/// (`A -> B [dir=none];`), sorted by endpoint names.
pub fn emit_dot(g: &MixedGraph, styles: &DotStyles) -> String {
    let mut lines: Vec<(usize, usize, bool)> = g
        .arcs()
        .map(|(a, b)| (a, b, true))
        .chain(g.edges().map(|(a, b)| (a, b, false)))
        .collect();
    lines.sort();
    let mut out = String::from("digraph g {\n");
    for (a, b, directed) in lines {
        let (na, nb) = (g.name(a), g.name(b));
        let key = if na < nb {
            (na.to_owned(), nb.to_owned())
        } else {
            (nb.to_owned(), na.to_owned())
        };
        let mut attrs: Vec<&str> = Vec::new();
        if !directed {
            attrs.push("dir=none");
        }
        if let Some(s) = styles.get(&key) {
            attrs.push(s);
        }
        let _ = write!(out, "  {} -> {}", dot_id(na), dot_id(nb));
        if !attrs.is_empty() {
            let _ = write!(out, " [{}]", attrs.join(", "));
        }
        out.push_str(";\n");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Parser)]
#[command(name = "pgm", version, about = "Graphical-model workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Optional sidecar of `name,kind[,levels...]` lines.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LearnArgs {
    #[arg(long, default_value = "hc")]
    algo: String,
    /// Independence test; defaults to g2 for discrete and zf for continuous data.
    #[arg(long)]
    test: Option<String>,
    #[arg(long, default_value = "bic")]
    score: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    iss: f64,
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    tabu: usize,
    #[arg(long = "max-parents", default_value_t = 5)]
    max_parents: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Learn a Bayesian network and fit its parameters.
    LearnBn {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        learn: LearnArgs,
        /// Model file to write (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Grow-Shrink Markov network: write only the undirected blanket graph.
        #[arg(long)]
        markov: bool,
    },
    /// Shrinkage graphical Gaussian model.
    LearnGgm {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value = "fdr")]
        select: String,
        /// Threshold on |pcor|, or the false discovery rate.
        #[arg(long, default_value_t = 0.2)]
        level: f64,
        /// Fixed shrinkage intensity instead of the estimated one.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pcor: Option<PathBuf>,
    },
    /// Correlation relevance network.
    Relevance {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conditional probability query on a model file.
    Infer {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        query: String,
        /// Hard evidence, `X=level,Y=level`.
        #[arg(long)]
        evidence: Option<String>,
        /// Soft evidence, `Z=p1,p2,...`; separate rows of a non-root with `;`.
        #[arg(long)]
        soft: Vec<String>,
        #[arg(long, default_value = "ve")]
        method: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// d-separation query; exit status 0 when separated, 1 when not.
    Dsep {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value = "")]
        given: String,
    },
    /// Bootstrap arc and adjacency frequencies.
    Bootstrap {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        learn: LearnArgs,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// K-fold cross-validated predictive loss.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        learn: LearnArgs,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// `mis` (discrete target) or `rss` (continuous target).
        #[arg(long, default_value = "mis")]
        loss: String,
    },
}

fn list(s: &str) -> Vec<&str> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect()
}

fn load_data(a: &DataArgs) -> Result<Dataset> {
    let schema = a
        .schema
        .as_deref()
        .map(|p| read(p).and_then(|t| Schema::parse(&t)))
        .transpose()?;
    let file = std::fs::File::open(&a.data).map_err(|e| io_err(&a.data, e))?;
    load_dataset(std::io::BufReader::new(file), schema.as_ref())
}

impl LearnArgs {
    fn learner(&self, d: &Dataset) -> Result<Learner> {
        let algorithm: Algorithm = self.algo.parse()?;
        let test = match &self.test {
            Some(t) => t.parse()?,
            None if d.all_continuous() => TestKind::FisherZ,
            None => TestKind::G2,
        };
        let config = LearnConfig {
            test,
            alpha: self.alpha,
            score: self.score.parse::<ScoreKind>()?,
            iss: self.iss,
            restarts: self.restarts,
            tabu_length: self.tabu,
            max_parents: self.max_parents,
            seed: self.seed,
            ..LearnConfig::default()
        };
        config.validate()?;
        Ok(Learner::new(algorithm, config))
    }
}

fn write_or_collect(path: Option<&Path>, text: &str, stdout: &mut String) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            stdout.push_str(text);
            Ok(())
        }
    }
}

fn parse_hard(s: &str) -> Result<Evidence> {
    let mut ev = Evidence::new();
    for item in list(s) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| PgmError::arg(format!("evidence '{item}' is not NAME=LEVEL")))?;
        ev = ev.hard(k.trim(), v.trim());
    }
    Ok(ev)
}

fn parse_soft(mut ev: Evidence, items: &[String]) -> Result<Evidence> {
    for item in items {
        let (k, v) = item.split_once('=').ok_or_else(|| {
            PgmError::arg(format!("soft evidence '{item}' is not NAME=P1,P2,..."))
        })?;
        let rows = v
            .split(';')
            .map(|row| {
                list(row)
                    .into_iter()
                    .map(|p| {
                        p.parse::<f64>()
                            .map_err(|_| PgmError::arg(format!("'{p}' is not a probability")))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ev = ev.soft_rows(k.trim(), rows);
    }
    Ok(ev)
}

/// Query table as CSV, preceded by `#` metadata lines.
pub fn format_query(r: &QueryResult) -> String {
    let mut out = format!("# method={}\n", r.method);
    if let Some(n) = r.samples {
        let _ = writeln!(out, "# samples={n}");
    }
    if let Some(a) = r.accepted {
        let _ = writeln!(out, "# accepted={a}");
    }
    if let Some(w) = r.effective_weight {
        let _ = writeln!(out, "# effective_weight={w}");
    }
    let _ = writeln!(out, "{},probability", r.nodes.join(","));
    let cards: Vec<usize> = r.levels.iter().map(Vec::len).collect();
    let mut assign = vec![0usize; cards.len()];
    for p in &r.table {
        let labels: Vec<&str> = assign
            .iter()
            .enumerate()
            .map(|(k, &v)| r.levels[k][v].as_str())
            .collect();
        let _ = writeln!(out, "{},{p}", labels.join(","));
        crate::factor::increment(&mut assign, &cards);
    }
    out
}

fn matrix_csv(names: &[String], m: &crate::linalg::Matrix) -> String {
    let mut out = format!(",{}\n", names.join(","));
    for (i, row) in m.to_rows().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{},{}", names[i], cells.join(","));
    }
    out
}

struct Outcome {
    stdout: String,
    stderr: String,
    code: i32,
}

fn execute(cli: Cli) -> Result<Outcome> {
    let mut stdout = String::new();
    let mut stderr = String::new();
    let mut code = 0;
    match cli.command {
        Command::LearnBn {
            data,
            learn,
            out,
            dot,
            markov,
        } => {
            let d = load_data(&data)?;
            let learner = learn.learner(&d)?;
            if markov {
                if out.is_some() {
                    return Err(PgmError::arg("--markov writes only a graph; use --dot"));
                }
                let g = gs_markov_network(&d, &learner.config)?;
                write_or_collect(
                    dot.as_deref(),
                    &emit_dot(&g, &DotStyles::new()),
                    &mut stdout,
                )?;
            } else {
                let learned = learner.learn(&d)?;
                let bn = fit_network(&d, &learned.to_dag(), learner.config.iss)?;
                write_or_collect(out.as_deref(), &model_to_string(&bn), &mut stdout)?;
                if let Some(p) = dot {
                    write_or_collect(
                        Some(&p),
                        &emit_dot(learned.graph(), &DotStyles::new()),
                        &mut stdout,
                    )?;
                }
            }
        }
        Command::LearnGgm {
            data,
            select,
            level,
            lambda,
            out,
            pcor,
        } => {
            let method = match select.as_str() {
                "threshold" => Selection::Threshold(level),
                "fdr" => Selection::Fdr(level),
                other => return Err(PgmError::arg(format!("unknown selection '{other}'"))),
            };
            let d = load_data(&data)?;
            let est = match lambda {
                Some(l) => shrink_correlation_with(&d, l)?,
                None => shrink_correlation(&d)?,
            };
            let pc = partial_correlations(&est.correlation)?;
            let res = ggm_select(&pc, d.n_rows(), method, &est.names)?;
            let mut styles = DotStyles::new();
            for i in 0..pc.dim() {
                for j in 0..i {
                    if pc[(i, j)] < 0.0 {
                        let (a, b) = (&est.names[i], &est.names[j]);
                        let key = if a < b {
                            (a.clone(), b.clone())
                        } else {
                            (b.clone(), a.clone())
                        };
                        styles.insert(key, "style=dotted".to_owned());
                    }
                }
            }
            let _ = writeln!(stderr, "shrinkage lambda = {}", est.lambda);
            write_or_collect(out.as_deref(), &emit_dot(&res.graph, &styles), &mut stdout)?;
            if let Some(p) = pcor {
                write_or_collect(Some(&p), &matrix_csv(&est.names, &pc), &mut stdout)?;
            }
        }
        Command::Relevance {
            data,
            threshold,
            out,
        } => {
            let d = load_data(&data)?;
            let s = gauss_stats(&d)?;
            let g = relevance_network(&s.correlation, threshold, &s.names)?;
            write_or_collect(
                out.as_deref(),
                &emit_dot(&g, &DotStyles::new()),
                &mut stdout,
            )?;
        }
        Command::Infer {
            model,
            query,
            evidence,
            soft,
            method,
            samples,
            seed,
        } => {
            let bn = load_model(&model)?;
            let ev = parse_soft(parse_hard(evidence.as_deref().unwrap_or(""))?, &soft)?;
            let q = list(&query);
            let r = match method.as_str() {
                "ve" => variable_elimination(&bn, &q, &ev)?,
                "ls" => logic_sampling(&bn, &q, &ev, samples, seed)?,
                "lw" => likelihood_weighting(&bn, &q, &ev, samples, seed)?,
                other => return Err(PgmError::arg(format!("unknown inference method '{other}'"))),
            };
            stdout.push_str(&format_query(&r));
        }
        Command::Dsep { model, x, y, given } => {
            let dag = structure_from_str(&read(&model)?)?;
            let separated = dag.d_separated(&list(&x), &list(&y), &list(&given))?;
            let _ = writeln!(stdout, "{separated}");
            code = if separated { 0 } else { 1 };
        }
        Command::Bootstrap {
            data,
            learn,
            replicates,
            out,
        } => {
            let d = load_data(&data)?;
            let learner = learn.learner(&d)?;
            let conf = bootstrap_confidence(&d, &learner, replicates, learn.seed)?;
            if conf.failed > 0 {
                let _ = writeln!(
                    stderr,
                    "{} replicate(s) failed and were skipped",
                    conf.failed
                );
            }
            let mut buf = Vec::new();
            conf.write_csv(&mut buf)?;
            write_or_collect(out.as_deref(), &String::from_utf8_lossy(&buf), &mut stdout)?;
        }
        Command::Cv {
            data,
            learn,
            target,
            folds,
            loss,
        } => {
            let d = load_data(&data)?;
            let learner = learn.learner(&d)?;
            let loss = match loss.as_str() {
                "mis" => Loss::Misclassification(target),
                "rss" => Loss::Rss(target),
                other => return Err(PgmError::arg(format!("unknown loss '{other}'"))),
            };
            let r = cross_validate(&d, &learner, folds, &loss, learn.seed)?;
            let _ = writeln!(stdout, "fold,{}", r.loss);
            for (k, v) in r.per_fold.iter().enumerate() {
                let _ = writeln!(stdout, "{},{v}", k + 1);
            }
            let _ = writeln!(stdout, "mean,{}", r.mean);
        }
    }
    Ok(Outcome {
        stdout,
        stderr,
        code,
    })
}

/// Runs the command line `argv` (program name first) and returns the exit
/// status. Errors print a single `error: ...` line and exit with status 2.
pub fn run<I, T>(argv: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "error: {}", first.trim_start_matches("error: "));
            return 2;
        }
    };
    match with_threads(threads_from_env(), move || execute(cli)) {
        Ok(o) => {
            let _ = out.write_all(o.stdout.as_bytes());
            let _ = err.write_all(o.stderr.as_bytes());
            o.code
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
