//! End-to-end audits: the degree system behind the impossibility results, and
//! pipelines that turn a rule's degree report into a verified paradox.

use std::time::Instant;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::conditions::{
    best_antipode_candidate, noshow_witness_from_antipode, twin_witness_from_antipode,
    AntipodeConfig, AntipodeHit, ViolationCertificate,
};
use crate::degree::{coordinate_degrees, DegreeConfig, DegreeReport};
use crate::error::{Error, Result};
use crate::rules::{restrict_pair, AggregationRule, RuleFamily};
use crate::sphere::{default_net, SpherePoint};

/// Minimum geodesic distance between x₀ and the partner's starting point y.
const Y_SEPARATION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemStatus {
    Unsat,
    Sat,
}

/// Solvability over ℤ of d_i + d_j = 1 for all pairs i < j ≤ k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSystemVerdict {
    pub k: usize,
    pub status: SystemStatus,
    pub witness_solution: Option<Vec<i64>>,
    pub parameterization: Option<String>,
    pub refutation_trace: Option<Vec<String>>,
}

type Equation = ([Rational64; 3], Rational64);

fn show(eq: &Equation) -> String {
    let names = ["d₁", "d₂", "d₃"];
    let terms: Vec<String> =
        eq.0.iter()
            .zip(names)
            .filter(|(c, _)| **c != Rational64::from_integer(0))
            .map(|(c, n)| {
                if *c == Rational64::from_integer(1) {
                    n.to_string()
                } else {
                    format!("{c}·{n}")
                }
            })
            .collect();
    format!("{} = {}", terms.join(" + "), eq.1)
}

fn combine(a: &Equation, b: &Equation, c: &Equation) -> Equation {
    let coef = std::array::from_fn(|t| a.0[t] + b.0[t] - c.0[t]);
    (coef, a.1 + b.1 - c.1)
}

pub fn solve_twin_degree_system(k: usize) -> Result<DegreeSystemVerdict> {
    if k < 2 {
        return Err(Error::BadK { k, min: 2 });
    }
    if k == 2 {
        return Ok(DegreeSystemVerdict {
            k,
            status: SystemStatus::Sat,
            witness_solution: Some(vec![1, 0]),
            parameterization: Some("d₁ = t, d₂ = 1 − t, t ∈ ℤ".into()),
            refutation_trace: None,
        });
    }
    let (zero, one) = (Rational64::from_integer(0), Rational64::from_integer(1));
    let e12: Equation = ([one, one, zero], one);
    let e13: Equation = ([one, zero, one], one);
    let e23: Equation = ([zero, one, one], one);
    let mut trace: Vec<String> = [&e12, &e13, &e23].iter().map(|e| show(e)).collect();
    if k > 3 {
        trace.push(format!(
            "(the equations for voters 1, 2, 3 are a subsystem of the k = {k} system)"
        ));
    }
    let sum = combine(&e12, &e13, &e23);
    trace.push(format!(
        "({}) + ({}) − ({}): {}",
        show(&e12),
        show(&e13),
        show(&e23),
        show(&sum)
    ));
    let d1 = sum.1 / sum.0[0];
    debug_assert!(!d1.is_integer());
    trace.push(format!("d₁ = {d1}, not an integer"));
    Ok(DegreeSystemVerdict {
        k,
        status: SystemStatus::Unsat,
        witness_solution: None,
        parameterization: None,
        refutation_trace: Some(trace),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AuditConfig {
    pub degree: DegreeConfig,
    pub antipode: AntipodeConfig,
    /// Size of the net the partner point y is drawn from.
    pub net_size: usize,
    pub seed: u64,
}

impl AuditConfig {
    pub fn with_seed(seed: u64) -> Self {
        let mut cfg = Self {
            net_size: 64,
            ..Self::default()
        };
        cfg.seed = seed;
        cfg.antipode.seed = seed;
        cfg.degree.simplicial.seed = seed;
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMode {
    Twin,
    Noshow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditStatus {
    ProvedWithWitness,
    DegreesUnavailable,
    RulePartialDetected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub rule: String,
    pub mode: AuditMode,
    pub status: AuditStatus,
    pub degree_system: DegreeSystemVerdict,
    pub degrees: DegreeReport,
    pub pair: Option<[usize; 2]>,
    pub antipode: Option<AntipodeHit>,
    pub certificate: Option<ViolationCertificate>,
    pub wall_time_ms: Option<u64>,
}

struct Located {
    status: AuditStatus,
    degrees: DegreeReport,
    found: Option<([usize; 2], AntipodeHit)>,
}

/// Stages shared by both audits: degrees, pair choice, antipode search.
fn locate(rule: &AggregationRule, cfg: &AuditConfig) -> Result<Located> {
    if !(1..=2).contains(&rule.dim_n) {
        return Err(Error::UnsupportedDimension {
            n: rule.dim_n,
            reason: "audits need direct degree computation (n = 1, 2)".into(),
        });
    }
    let degrees = coordinate_degrees(rule, &cfg.degree)?;
    if !degrees.is_complete() {
        return Ok(Located {
            status: AuditStatus::DegreesUnavailable,
            degrees,
            found: None,
        });
    }
    if !degrees.additivity_ok {
        return Ok(Located {
            status: AuditStatus::RulePartialDetected,
            degrees,
            found: None,
        });
    }
    let pair = degrees
        .pair_degrees
        .iter()
        .find(|p| p.deg != Some(1))
        .map(|p| [p.i, p.j])
        .ok_or_else(|| {
            Error::Unverified(format!(
                "additive degree report with every D = 1 contradicts the unsat degree system at k = {}",
                rule.k
            ))
        })?;
    let g = restrict_pair(rule, pair[0], pair[1])?;
    let hit = best_antipode_candidate(&g, &cfg.antipode)?.ok_or(Error::AntipodeSearchStalled {
        best_residual: f64::INFINITY,
        tol: cfg.antipode.tol,
    })?;
    if hit.residual > cfg.antipode.tol {
        return Err(Error::AntipodeSearchStalled {
            best_residual: hit.residual,
            tol: cfg.antipode.tol,
        });
    }
    Ok(Located {
        status: AuditStatus::ProvedWithWitness,
        degrees,
        found: Some((pair, hit)),
    })
}

fn partner_point(x0: &SpherePoint, cfg: &AuditConfig) -> Result<SpherePoint> {
    let net = default_net(x0.dim(), cfg.net_size.max(8), cfg.seed)?;
    net.points
        .into_iter()
        .find(|y| y.dist(x0) > Y_SEPARATION)
        .ok_or_else(|| Error::BadParams("no net point farther than 0.5 from x0".into()))
}

/// Runs the twin pipeline on `rule` (k ≥ 3, n ∈ {1, 2}).
pub fn run_twin_audit(rule: &AggregationRule, cfg: &AuditConfig) -> Result<AuditReport> {
    let start = Instant::now();
    if rule.k < 3 {
        return Err(Error::BadK { k: rule.k, min: 3 });
    }
    let degree_system = solve_twin_degree_system(rule.k)?;
    let located = locate(rule, cfg)?;
    let (pair, antipode, certificate) = match located.found {
        Some((pair, hit)) => {
            let y = partner_point(&hit.point, cfg)?;
            let cert = twin_witness_from_antipode(rule, pair[0], pair[1], &hit.point, &y)?;
            (Some(pair), Some(hit), Some(cert))
        }
        None => (None, None, None),
    };
    Ok(AuditReport {
        rule: rule.name.clone(),
        mode: AuditMode::Twin,
        status: located.status,
        degree_system,
        degrees: located.degrees,
        pair,
        antipode,
        certificate,
        wall_time_ms: Some(start.elapsed().as_millis() as u64),
    })
}

/// Runs the pipeline on f^{(k+1)} and has voter j join a k-voter electorate.
pub fn run_noshow_audit(family: &RuleFamily, k: usize, cfg: &AuditConfig) -> Result<AuditReport> {
    let start = Instant::now();
    if k < 2 {
        return Err(Error::BadK { k, min: 2 });
    }
    family.rule(k)?;
    let with = family.rule(k + 1)?;
    let degree_system = solve_twin_degree_system(k + 1)?;
    let located = locate(&with, cfg)?;
    let (pair, antipode, certificate) = match located.found {
        Some((pair, hit)) => {
            let cert = noshow_witness_from_antipode(family, k, pair[0], pair[1], &hit.point)?;
            (Some(pair), Some(hit), Some(cert))
        }
        None => (None, None, None),
    };
    Ok(AuditReport {
        rule: family.name.clone(),
        mode: AuditMode::Noshow,
        status: located.status,
        degree_system,
        degrees: located.degrees,
        pair,
        antipode,
        certificate,
        wall_time_ms: Some(start.elapsed().as_millis() as u64),
    })
}
