//! Topological degree of self-maps of S¹ and S².
//!
//! S¹ uses angle lifting with adaptive bisection; S² uses a simplicial
//! approximation on an icosphere and counts signed preimages of generic
//! target points. For any n, a map that never hits the antipode of its input
//! is homotopic to the identity and so has degree 1; that is certified from a
//! sampled gap plus a Lipschitz bound.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::scan_nau;
use crate::error::{Error, Result};
use crate::rules::{restrict_coordinate, restrict_pair, AggregationRule, SphereSelfMap};
use crate::sphere::{random_point, SampleNet, SpherePoint};

/// Increments at least this large (in absolute value) trigger bisection.
const WINDING_GUARD: f64 = PI - 0.1;
/// Accepted distance of total/2π from the nearest integer.
pub const WINDING_RESIDUAL: f64 = 1e-6;
/// Orientation determinants below this are treated as degenerate.
const DET_EPS: f64 = 1e-12;
const MAX_TARGET_REDRAWS: usize = 10;
const MAX_EXTRA_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMethod {
    WindingLift,
    SimplicialS2,
    NauCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeResult {
    pub value: i64,
    pub method: DegreeMethod,
    pub samples_used: usize,
    pub refinement_depth: usize,
    /// Winding: |total/2π − value|. Simplicial: number of agreeing targets.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingConfig {
    pub initial_samples: usize,
    pub max_depth: usize,
}

impl Default for WindingConfig {
    fn default() -> Self {
        Self {
            initial_samples: 256,
            max_depth: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplicialConfig {
    pub subdivision_level: usize,
    pub targets: usize,
    pub seed: u64,
}

impl Default for SimplicialConfig {
    fn default() -> Self {
        Self {
            subdivision_level: 5,
            targets: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DegreeConfig {
    pub winding: WindingConfig,
    pub simplicial: SimplicialConfig,
}

fn wrap(d: f64) -> f64 {
    let w = (d + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

fn image_angle(g: &SphereSelfMap, theta: f64) -> Result<f64> {
    let y = g.eval(&SpherePoint::from_angle(theta))?;
    Ok(y.coords()[1].atan2(y.coords()[0]))
}

struct Lifter<'a> {
    g: &'a SphereSelfMap,
    max_depth: usize,
    samples: usize,
    deepest: usize,
}

impl Lifter<'_> {
    /// Lifted angle increment of g along the parameter arc [ta, tb].
    fn lift(&mut self, ta: f64, tb: f64, aa: f64, ab: f64, depth: usize) -> Result<f64> {
        let d = wrap(ab - aa);
        if d.abs() < WINDING_GUARD {
            return Ok(d);
        }
        if depth >= self.max_depth {
            return Err(Error::RefinementExceeded {
                theta_start: ta,
                theta_end: tb,
            });
        }
        let tm = 0.5 * (ta + tb);
        let am = image_angle(self.g, tm)?;
        self.samples += 1;
        self.deepest = self.deepest.max(depth + 1);
        Ok(self.lift(ta, tm, aa, am, depth + 1)? + self.lift(tm, tb, am, ab, depth + 1)?)
    }
}

/// Winding number of a circle map by lifting image angles around the loop.
pub fn winding_number(g: &SphereSelfMap, cfg: &WindingConfig) -> Result<DegreeResult> {
    if g.dim_n != 1 {
        return Err(Error::UnsupportedDimension {
            n: g.dim_n,
            reason: "winding numbers are for maps of S^1".into(),
        });
    }
    let n = cfg.initial_samples.max(3);
    let params: Vec<f64> = (0..n).map(|t| TAU * t as f64 / n as f64).collect();
    let evals: Vec<Result<f64>> = params.par_iter().map(|&t| image_angle(g, t)).collect();
    let mut angles = Vec::with_capacity(n);
    let mut undefined = Vec::new();
    for (t, r) in params.iter().zip(evals) {
        match r {
            Ok(a) => angles.push(a),
            Err(Error::UndefinedAtPoint { .. }) => {
                undefined.push(SpherePoint::from_angle(*t).coords().to_vec())
            }
            Err(e) => return Err(e),
        }
    }
    if !undefined.is_empty() {
        return Err(Error::UndefinedAtPoint {
            map: g.provenance.clone(),
            locations: undefined,
        });
    }
    let mut lifter = Lifter {
        g,
        max_depth: cfg.max_depth,
        samples: n,
        deepest: 0,
    };
    let mut total = 0.0;
    for t in 0..n {
        let (ta, aa) = (params[t], angles[t]);
        // the loop closes on the t = 0 sample itself
        let (tb, ab) = if t + 1 < n {
            (params[t + 1], angles[t + 1])
        } else {
            (TAU, angles[0])
        };
        total += lifter.lift(ta, tb, aa, ab, 0)?;
    }
    let turns = total / TAU;
    let value = turns.round();
    let residual = (turns - value).abs();
    if residual > WINDING_RESIDUAL {
        return Err(Error::NonIntegerTotal { residual });
    }
    Ok(DegreeResult {
        value: value as i64,
        method: DegreeMethod::WindingLift,
        samples_used: lifter.samples,
        refinement_depth: lifter.deepest,
        residual,
    })
}

/// Geodesic icosahedron: unit vertices and outward-oriented triangles.
#[derive(Debug, Clone)]
pub struct Icosphere {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

fn det3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn unit3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

impl Icosphere {
    pub fn new(level: usize) -> Self {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let raw = [
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ];
        let vertices: Vec<[f64; 3]> = raw.into_iter().map(unit3).collect();
        let faces = [
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        let triangles = faces
            .into_iter()
            .map(|[a, b, c]| {
                if det3(&vertices[a], &vertices[b], &vertices[c]) > 0.0 {
                    [a, b, c]
                } else {
                    [a, c, b]
                }
            })
            .collect();
        let mut mesh = Icosphere {
            vertices,
            triangles,
        };
        for _ in 0..level {
            mesh = mesh.subdivide();
        }
        mesh
    }

    fn subdivide(&self) -> Self {
        let mut vertices = self.vertices.clone();
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push(unit3([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(self.triangles.len() * 4);
        for &[a, b, c] in &self.triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        Icosphere {
            vertices,
            triangles,
        }
    }
}

fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let (mut diff, mut sum) = (0.0, 0.0);
    for t in 0..3 {
        diff += (a[t] - b[t]) * (a[t] - b[t]);
        sum += (a[t] + b[t]) * (a[t] + b[t]);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

enum Cover {
    Outside,
    Signed(i64),
    Ambiguous,
}

/// How the image triangle (a, b, c) covers the target y.
fn cover(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3], y: &[f64; 3]) -> Cover {
    let centroid = [a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]];
    if centroid[0] * y[0] + centroid[1] * y[1] + centroid[2] * y[2] <= 0.0 {
        return Cover::Outside;
    }
    let det = det3(a, b, c);
    let s = [det3(a, b, y), det3(b, c, y), det3(c, a, y)];
    if det.abs() < DET_EPS {
        // no interior; only worry when y lies on the collapsed triangle
        let c0 = unit3(centroid);
        let radius = [a, b, c].iter().map(|v| dist3(v, &c0)).fold(0.0, f64::max);
        if dist3(y, &c0) <= radius + 1e-9 && s.iter().all(|v| v.abs() <= 1e-9) {
            return Cover::Ambiguous;
        }
        return Cover::Outside;
    }
    let sign = det.signum();
    if s.iter().all(|v| v * sign > DET_EPS) {
        Cover::Signed(sign as i64)
    } else if s.iter().any(|v| v * sign < -DET_EPS) {
        Cover::Outside
    } else {
        Cover::Ambiguous
    }
}

fn map_vertices(g: &SphereSelfMap, mesh: &Icosphere) -> Result<Vec<[f64; 3]>> {
    let evals: Vec<Result<[f64; 3]>> = mesh
        .vertices
        .par_iter()
        .map(|v| {
            let y = g.eval(&SpherePoint::from_unit(v.to_vec()))?;
            let c = y.coords();
            Ok([c[0], c[1], c[2]])
        })
        .collect();
    let mut images = Vec::with_capacity(evals.len());
    let mut undefined = Vec::new();
    for (v, r) in mesh.vertices.iter().zip(evals) {
        match r {
            Ok(y) => images.push(y),
            Err(Error::UndefinedAtPoint { .. }) => undefined.push(v.to_vec()),
            Err(e) => return Err(e),
        }
    }
    if !undefined.is_empty() {
        return Err(Error::UndefinedAtPoint {
            map: g.provenance.clone(),
            locations: undefined,
        });
    }
    Ok(images)
}

fn star_condition_holds(mesh: &Icosphere, images: &[[f64; 3]]) -> bool {
    mesh.triangles.par_iter().all(|&[a, b, c]| {
        let (pa, pb, pc) = (&images[a], &images[b], &images[c]);
        dist3(pa, pb).max(dist3(pb, pc)).max(dist3(pc, pa)) < PI / 2.0
    })
}

fn signed_count(mesh: &Icosphere, images: &[[f64; 3]], y: &[f64; 3]) -> Option<i64> {
    let covers: Vec<Cover> = mesh
        .triangles
        .par_iter()
        .map(|&[a, b, c]| cover(&images[a], &images[b], &images[c], y))
        .collect();
    let mut count = 0;
    for c in covers {
        match c {
            Cover::Outside => {}
            Cover::Signed(s) => count += s,
            Cover::Ambiguous => return None,
        }
    }
    Some(count)
}

/// Degree of a self-map of S² by simplicial approximation on an icosphere.
pub fn simplicial_degree_s2(g: &SphereSelfMap, cfg: &SimplicialConfig) -> Result<DegreeResult> {
    if g.dim_n != 2 {
        return Err(Error::UnsupportedDimension {
            n: g.dim_n,
            reason: "simplicial degree is implemented for maps of S^2".into(),
        });
    }
    let mut level = cfg.subdivision_level;
    let (mesh, images) = loop {
        let mesh = Icosphere::new(level);
        let images = map_vertices(g, &mesh)?;
        if star_condition_holds(&mesh, &images) {
            break (mesh, images);
        }
        if level >= cfg.subdivision_level + MAX_EXTRA_LEVELS {
            return Err(Error::StarConditionFailed { level });
        }
        level += 1;
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut counts = Vec::with_capacity(cfg.targets);
    for _ in 0..cfg.targets.max(1) {
        let mut resolved = None;
        for _ in 0..MAX_TARGET_REDRAWS {
            let y = random_point(2, &mut rng);
            let yc = [y.coords()[0], y.coords()[1], y.coords()[2]];
            if let Some(c) = signed_count(&mesh, &images, &yc) {
                resolved = Some(c);
                break;
            }
        }
        match resolved {
            Some(c) => counts.push(c),
            None => return Err(Error::TargetDisagreement { counts }),
        }
    }
    if counts.iter().any(|&c| c != counts[0]) {
        return Err(Error::TargetDisagreement { counts });
    }
    Ok(DegreeResult {
        value: counts[0],
        method: DegreeMethod::SimplicialS2,
        samples_used: mesh.vertices.len(),
        refinement_depth: level,
        residual: counts.len() as f64,
    })
}

/// Dispatches on the sphere dimension.
pub fn degree(g: &SphereSelfMap, dim_n: usize, cfg: &DegreeConfig) -> Result<DegreeResult> {
    match dim_n {
        1 => winding_number(g, &cfg.winding),
        2 => simplicial_degree_s2(g, &cfg.simplicial),
        n => Err(Error::UnsupportedDimension {
            n,
            reason: "direct degree computation covers n = 1, 2; use homotopy_certificate_nau \
                     to certify degree 1 in any dimension"
                .into(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDegree {
    pub i: usize,
    pub j: usize,
    pub deg: Option<i64>,
}

/// Degrees d_α of the single-slot maps f_α and D[i,j] of the pair maps
/// f_{i,j}, with the additivity law D[i,j] = d_i + d_j checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    #[serde(rename = "rule")]
    pub rule_name: String,
    pub k: usize,
    pub dim_n: usize,
    pub d: Vec<Option<i64>>,
    #[serde(rename = "D")]
    pub pair_degrees: Vec<PairDegree>,
    pub additivity_ok: bool,
    pub failures: Vec<[usize; 2]>,
    pub diagnostics: BTreeMap<String, String>,
}

impl DegreeReport {
    pub fn pair(&self, i: usize, j: usize) -> Option<i64> {
        let (i, j) = (i.min(j), i.max(j));
        self.pair_degrees
            .iter()
            .find(|p| p.i == i && p.j == j)
            .and_then(|p| p.deg)
    }

    pub fn is_complete(&self) -> bool {
        self.d.iter().all(Option::is_some) && self.pair_degrees.iter().all(|p| p.deg.is_some())
    }

    fn missing(&self) -> usize {
        self.d.iter().filter(|d| d.is_none()).count()
            + self.pair_degrees.iter().filter(|p| p.deg.is_none()).count()
    }
}

/// Computes every d_α and D[i,j] of `rule`. Per-entry failures are recorded
/// in the diagnostics and leave the entry unavailable.
pub fn coordinate_degrees(rule: &AggregationRule, cfg: &DegreeConfig) -> Result<DegreeReport> {
    if !(1..=2).contains(&rule.dim_n) {
        return Err(Error::UnsupportedDimension {
            n: rule.dim_n,
            reason: "coordinate degrees are computed for n = 1, 2".into(),
        });
    }
    let mut diagnostics = BTreeMap::new();
    let mut record = |label: String, r: Result<DegreeResult>| match r {
        Ok(res) => Some(res.value),
        Err(e) => {
            diagnostics.insert(label, e.to_string());
            None
        }
    };
    let mut d = Vec::with_capacity(rule.k);
    for alpha in 1..=rule.k {
        let g = restrict_coordinate(rule, alpha)?;
        d.push(record(format!("f_{alpha}"), degree(&g, rule.dim_n, cfg)));
    }
    let mut pair_degrees = Vec::new();
    for i in 1..=rule.k {
        for j in (i + 1)..=rule.k {
            let g = restrict_pair(rule, i, j)?;
            let deg = record(format!("f_{{{i},{j}}}"), degree(&g, rule.dim_n, cfg));
            pair_degrees.push(PairDegree { i, j, deg });
        }
    }
    let failures: Vec<[usize; 2]> = pair_degrees
        .iter()
        .filter(|p| match (p.deg, d[p.i - 1], d[p.j - 1]) {
            (Some(dd), Some(di), Some(dj)) => dd != di + dj,
            _ => true,
        })
        .map(|p| [p.i, p.j])
        .collect();
    Ok(DegreeReport {
        rule_name: rule.name.clone(),
        k: rule.k,
        dim_n: rule.dim_n,
        d,
        pair_degrees,
        additivity_ok: failures.is_empty(),
        failures,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Additivity {
    Consistent,
    Violations(Vec<[usize; 2]>),
}

/// Integer check of D[i,j] = d_i + d_j on a complete report.
pub fn additivity_check(report: &DegreeReport) -> Result<Additivity> {
    if !report.is_complete() {
        return Err(Error::IncompleteReport {
            missing: report.missing(),
        });
    }
    let violations: Vec<[usize; 2]> = report
        .pair_degrees
        .iter()
        .filter_map(|p| {
            let sum = report.d[p.i - 1]? + report.d[p.j - 1]?;
            (p.deg? != sum).then_some([p.i, p.j])
        })
        .collect();
    Ok(if violations.is_empty() {
        Additivity::Consistent
    } else {
        Additivity::Violations(violations)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NauCertificate {
    CertifiedDegreeOne { gap: f64, slack: f64 },
    NotCertified { gap: f64, slack: f64 },
}

impl NauCertificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, NauCertificate::CertifiedDegreeOne { .. })
    }

    pub fn degree_result(&self, net: &SampleNet) -> Option<DegreeResult> {
        self.is_certified().then_some(DegreeResult {
            value: 1,
            method: DegreeMethod::NauCertificate,
            samples_used: net.points.len(),
            refinement_depth: 0,
            residual: 0.0,
        })
    }
}

/// Certifies deg(g) = 1 when the sampled antipodal gap beats (1 + L)·mesh:
/// then g(x) ≠ −x everywhere, the chord homotopy to the identity is defined
/// for all t, and homotopic maps share their degree.
pub fn homotopy_certificate_nau(
    g: &SphereSelfMap,
    lipschitz_bound: f64,
    net: &SampleNet,
) -> Result<NauCertificate> {
    if lipschitz_bound.is_nan() || lipschitz_bound < 0.0 {
        return Err(Error::BadParams(
            "Lipschitz bound must be non-negative".into(),
        ));
    }
    let scan = scan_nau(g, net, Some(lipschitz_bound))?;
    let slack = scan.certificate_slack.unwrap_or(f64::NEG_INFINITY);
    Ok(if scan.certified {
        NauCertificate::CertifiedDegreeOne {
            gap: scan.gap,
            slack,
        }
    } else {
        NauCertificate::NotCertified {
            gap: scan.gap,
            slack,
        }
    })
}
