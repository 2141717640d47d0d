//! Command-line front end.
//!
//! Exit codes: 0 for positive results (witness proved, degrees consistent,
//! everything certified), 2 for structured negative findings, 1 for errors
//! and usage mistakes.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::audit::{run_noshow_audit, run_twin_audit, AuditConfig, AuditReport, AuditStatus};
use crate::conditions::{
    scan_nau, search_noshow_violation, search_twin_violation, NauScanResult, SearchConfig,
    SearchOutcome, ViolationCertificate,
};
use crate::degree::{coordinate_degrees, DegreeReport};
use crate::error::{Error, Result};
use crate::rules::{diagonal, restrict_pair, RuleSpec};
use crate::sphere::{default_net, SpherePoint};

#[derive(Debug, Parser)]
#[command(
    name = "sphere-paradox",
    version,
    about = "Degree audits and paradox witnesses for aggregation rules on spheres"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prove a Twin paradox for a rule with k >= 3 via its degree report.
    AuditTwin(RuleArgs),
    /// Prove a No Show paradox for a family at electorate size k >= 2.
    AuditNoshow(FamilyArgs),
    /// Degrees of the single-slot and pair restrictions, with additivity check.
    Degree(RuleArgs),
    /// Grid search for a Twin violation.
    WitnessTwin(RuleArgs),
    /// Grid search for a Participation violation.
    WitnessNoshow(FamilyArgs),
    /// Nowhere Anti-Unanimity scan of the diagonal and every pair restriction.
    NauScan(RuleArgs),
}

#[derive(Debug, Args)]
struct RuleArgs {
    /// dictator, rotated_dictator, constant, normalized_mean, antagonistic_mean, karcher_mean
    #[arg(long)]
    rule: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Builtin generating the family (same names as --rule)
    #[arg(long)]
    family: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value_t = 1)]
    winner: usize,
    /// Rotation in radians (rotated_dictator; constant uses e1 rotated by it)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    angle: f64,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long)]
    net_size: Option<usize>,
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    multistarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Common {
    fn spec(&self, name: &str) -> RuleSpec {
        let params = match name {
            "dictator" => json!({ "winner": self.winner }),
            "rotated_dictator" => json!({ "winner": self.winner, "angle": self.angle }),
            "constant" => {
                let c = SpherePoint::basepoint(self.dim).rotate_12(self.angle);
                json!({ "c": c.coords() })
            }
            _ => json!({}),
        };
        RuleSpec {
            name: name.to_string(),
            k: self.k,
            dim_n: self.dim,
            params,
        }
    }

    fn audit_config(&self) -> AuditConfig {
        let mut cfg = AuditConfig::with_seed(self.seed);
        if let Some(n) = self.net_size {
            cfg.net_size = n;
        }
        if let Some(l) = self.level {
            cfg.degree.simplicial.subdivision_level = l;
        }
        if let Some(m) = self.multistarts {
            cfg.antipode.multistarts = m;
        }
        cfg
    }

    fn search_config(&self) -> SearchConfig {
        let mut cfg = SearchConfig {
            seed: self.seed,
            ..SearchConfig::default()
        };
        if let Some(n) = self.net_size {
            cfg.net_size = n;
        }
        if let Some(m) = self.multistarts {
            cfg.restarts = m;
        }
        cfg
    }
}

/// One CSV row per certificate or degree entry.
pub trait CsvSummary {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

fn point_cell(p: &SpherePoint) -> String {
    serde_json::to_string(p.coords()).unwrap_or_default()
}

fn tag<T: Serialize>(v: T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl CsvSummary for DegreeReport {
    fn header(&self) -> Vec<&'static str> {
        vec!["rule", "alpha_or_pair", "degree", "additivity_ok"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let singles = self.d.iter().enumerate().map(|(a, d)| {
            vec![
                self.rule_name.clone(),
                (a + 1).to_string(),
                opt(*d),
                self.additivity_ok.to_string(),
            ]
        });
        let pairs = self.pair_degrees.iter().map(|p| {
            vec![
                self.rule_name.clone(),
                format!("{}-{}", p.i, p.j),
                opt(p.deg),
                (!self.failures.contains(&[p.i, p.j])).to_string(),
            ]
        });
        singles.chain(pairs).collect()
    }
}

const CERT_HEADER: [&str; 9] = [
    "condition",
    "kind",
    "focal_voter",
    "partner_voter",
    "d_before",
    "d_after",
    "margin",
    "verified",
    "after_profile",
];

fn cert_cells(c: Option<&ViolationCertificate>) -> Vec<String> {
    match c {
        None => vec![String::new(); CERT_HEADER.len()],
        Some(c) => vec![
            tag(c.condition),
            tag(c.kind),
            c.focal_voter.to_string(),
            opt(c.partner_voter),
            c.d_before.0.to_string(),
            c.d_after.0.to_string(),
            c.margin.0.to_string(),
            c.verified.to_string(),
            serde_json::to_string(&c.after_profile).unwrap_or_default(),
        ],
    }
}

impl CsvSummary for AuditReport {
    fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["rule", "mode", "status", "pair", "x0", "residual"];
        h.extend(CERT_HEADER);
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut row = vec![
            self.rule.clone(),
            tag(self.mode),
            tag(self.status),
            opt(self.pair.map(|[i, j]| format!("{i}-{j}"))),
            opt(self.antipode.as_ref().map(|a| point_cell(&a.point))),
            opt(self.antipode.as_ref().map(|a| a.residual)),
        ];
        row.extend(cert_cells(self.certificate.as_ref()));
        vec![row]
    }
}

/// Result of `witness-twin` / `witness-noshow`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub rule: String,
    pub search: SearchConfig,
    pub outcome: SearchOutcome,
}

impl CsvSummary for WitnessReport {
    fn header(&self) -> Vec<&'static str> {
        let mut h = vec!["rule", "profiles_examined", "singular_skipped"];
        h.extend(CERT_HEADER);
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut row = vec![
            self.rule.clone(),
            self.outcome.profiles_examined.to_string(),
            self.outcome.singular_skipped.to_string(),
        ];
        row.extend(cert_cells(self.outcome.certificate.as_ref()));
        vec![row]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NauEntry {
    pub map: String,
    pub scan: Option<NauScanResult>,
    pub error: Option<String>,
}

/// Result of `nau-scan`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NauReport {
    pub rule: String,
    pub lipschitz_bound: Option<f64>,
    pub maps: Vec<NauEntry>,
}

impl NauReport {
    fn all_certified(&self) -> bool {
        self.maps
            .iter()
            .all(|m| m.scan.as_ref().is_some_and(|s| s.certified))
    }
}

impl CsvSummary for NauReport {
    fn header(&self) -> Vec<&'static str> {
        vec![
            "rule",
            "map",
            "gap",
            "mesh",
            "certified",
            "slack",
            "worst_point",
            "error",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.maps
            .iter()
            .map(|m| {
                let s = m.scan.as_ref();
                vec![
                    self.rule.clone(),
                    m.map.clone(),
                    opt(s.map(|s| s.gap)),
                    opt(s.map(|s| s.net.mesh)),
                    opt(s.map(|s| s.certified)),
                    opt(s.and_then(|s| s.certificate_slack)),
                    opt(s.map(|s| point_cell(&s.worst_point))),
                    m.error.clone().unwrap_or_default(),
                ]
            })
            .collect()
    }
}

fn render<R: Serialize + CsvSummary>(report: &R, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(report)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(report.header())?;
            for row in report.rows() {
                w.write_record(&row)?;
            }
            w.into_inner().map_err(|e| Error::Io {
                path: PathBuf::from("<csv buffer>"),
                source: e.into_error(),
            })
        }
    }
}

/// Writes the report to `path` atomically (temp file + rename), or to
/// standard output when no path is given.
pub fn emit_report<R: Serialize + CsvSummary>(
    report: &R,
    format: Format,
    path: Option<&Path>,
) -> Result<()> {
    let bytes = render(report, format)?;
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(&bytes)
            .and_then(|_| out.flush())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            });
    };
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(&bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

enum Outcome {
    Positive,
    Negative,
}

impl Outcome {
    fn from(positive: bool) -> Self {
        if positive {
            Outcome::Positive
        } else {
            Outcome::Negative
        }
    }
}

fn emit<R: Serialize + CsvSummary>(report: &R, common: &Common) -> Result<()> {
    emit_report(report, common.format, common.out.as_deref())
}

/// Reports carry no wall time so that identical invocations produce
/// identical bytes; timing goes to standard error instead.
fn strip_time(mut report: AuditReport) -> AuditReport {
    if let Some(ms) = report.wall_time_ms.take() {
        eprintln!("audit finished in {ms} ms");
    }
    report
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::AuditTwin(a) => {
            let rule = a.common.spec(&a.rule).to_rule()?;
            let report = strip_time(run_twin_audit(&rule, &a.common.audit_config())?);
            emit(&report, &a.common)?;
            Ok(Outcome::from(
                report.status == AuditStatus::ProvedWithWitness,
            ))
        }
        Command::AuditNoshow(a) => {
            let family = a.common.spec(&a.family).to_family()?;
            let report = strip_time(run_noshow_audit(
                &family,
                a.common.k,
                &a.common.audit_config(),
            )?);
            emit(&report, &a.common)?;
            Ok(Outcome::from(
                report.status == AuditStatus::ProvedWithWitness,
            ))
        }
        Command::Degree(a) => {
            let rule = a.common.spec(&a.rule).to_rule()?;
            let report = coordinate_degrees(&rule, &a.common.audit_config().degree)?;
            emit(&report, &a.common)?;
            Ok(Outcome::from(report.additivity_ok))
        }
        Command::WitnessTwin(a) => {
            let rule = a.common.spec(&a.rule).to_rule()?;
            let search = a.common.search_config();
            let outcome = search_twin_violation(&rule, &search)?;
            let positive = outcome.certificate.is_some();
            emit(
                &WitnessReport {
                    rule: rule.name.clone(),
                    search,
                    outcome,
                },
                &a.common,
            )?;
            Ok(Outcome::from(positive))
        }
        Command::WitnessNoshow(a) => {
            let family = a.common.spec(&a.family).to_family()?;
            let search = a.common.search_config();
            let outcome = search_noshow_violation(&family, a.common.k, &search)?;
            let positive = outcome.certificate.is_some();
            emit(
                &WitnessReport {
                    rule: family.name.clone(),
                    search,
                    outcome,
                },
                &a.common,
            )?;
            Ok(Outcome::from(positive))
        }
        Command::NauScan(a) => {
            let rule = a.common.spec(&a.rule).to_rule()?;
            let size = a
                .common
                .net_size
                .unwrap_or(if rule.dim_n == 1 { 1024 } else { 4096 });
            let net = default_net(rule.dim_n, size, a.common.seed)?;
            let mut maps = vec![diagonal(&rule)];
            for i in 1..=rule.k {
                for j in (i + 1)..=rule.k {
                    maps.push(restrict_pair(&rule, i, j)?);
                }
            }
            let mut entries = Vec::with_capacity(maps.len());
            for g in &maps {
                let entry = match scan_nau(g, &net, rule.lipschitz_bound) {
                    Ok(scan) => NauEntry {
                        map: g.provenance.clone(),
                        scan: Some(scan),
                        error: None,
                    },
                    Err(e @ Error::UndefinedAtPoint { .. }) => NauEntry {
                        map: g.provenance.clone(),
                        scan: None,
                        error: Some(e.to_string()),
                    },
                    Err(e) => return Err(e),
                };
                entries.push(entry);
            }
            let report = NauReport {
                rule: rule.name.clone(),
                lipschitz_bound: rule.lipschitz_bound,
                maps: entries,
            };
            emit(&report, &a.common)?;
            Ok(Outcome::from(report.all_certified()))
        }
    }
}

/// Parses `argv` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Positive) => 0,
        Ok(Outcome::Negative) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
