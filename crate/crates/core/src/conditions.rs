//! Twin, Participation and Nowhere Anti-Unanimity (NAU) conditions:
//! pointwise checkers, grid searches for violations, the NAU scan, and the
//! constructive witnesses that turn an antipodal point of a restricted map
//! into a concrete paradox.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::{
    delete_voter, insert_voter, restrict_pair, twin_embedding, AggregationRule, Profile,
    RuleFamily, SphereSelfMap,
};
use crate::sphere::{default_net, random_point, Angle, NetDescriptor, SampleNet, SpherePoint};

/// Tolerance for "equal distance" and "equal point" judgments.
pub const TOL: f64 = 1e-9;

/// Residual accepted when a witness builder re-checks that x₀ is antipodal.
pub const WITNESS_ANTIPODE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Twin,
    Participation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// The distance to the focal voter increased.
    Weak,
    /// The distance stayed put where a strict decrease was required.
    Strictness,
}

/// Outcome of a single condition check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Holds,
    WeakViolation { margin: f64 },
    StrictnessViolation,
}

impl Verdict {
    pub fn kind(&self) -> Option<ViolationKind> {
        match self {
            Verdict::Holds => None,
            Verdict::WeakViolation { .. } => Some(ViolationKind::Weak),
            Verdict::StrictnessViolation => Some(ViolationKind::Strictness),
        }
    }

    pub fn is_violation(&self) -> bool {
        !matches!(self, Verdict::Holds)
    }
}

/// `new` must not exceed `old`, and must be strictly smaller whenever the
/// focal voter differs from the reference outcome.
fn judge(d_new: f64, d_old: f64, focal_to_reference: f64) -> Verdict {
    let margin = d_new - d_old;
    if margin > TOL {
        Verdict::WeakViolation { margin }
    } else if focal_to_reference > TOL && margin >= -TOL {
        Verdict::StrictnessViolation
    } else {
        Verdict::Holds
    }
}

/// A concrete, re-checkable paradox.
///
/// For twin certificates `after_profile` is `before_profile` with the partner's
/// preference replaced by the focal voter's. For participation certificates
/// `before_profile` is the abstention profile and `after_profile` has the
/// focal voter inserted; `focal_voter` indexes `after_profile`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationCertificate {
    pub condition: Condition,
    pub kind: ViolationKind,
    pub rule_name: String,
    pub before_profile: Profile,
    pub after_profile: Profile,
    pub focal_voter: usize,
    pub partner_voter: Option<usize>,
    pub d_before: Angle,
    pub d_after: Angle,
    pub margin: Angle,
    pub verified: bool,
}

impl ViolationCertificate {
    pub fn focal_point(&self) -> Result<&SpherePoint> {
        self.after_profile.voter(self.focal_voter)
    }
}

struct Measurement {
    d_before: f64,
    d_after: f64,
    verdict: Verdict,
}

fn measure_twin(
    rule: &AggregationRule,
    p: &Profile,
    i: usize,
    j: usize,
) -> Result<(Measurement, Profile)> {
    if i == j {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: p.len(),
        });
    }
    let xi = p.voter(i)?.clone();
    if xi.approx_eq(p.voter(j)?) {
        return Err(Error::TwinPreconditionViolated { i, j });
    }
    let after = p.with_voter(j, xi.clone())?;
    let before_out = rule.evaluate(p)?;
    let after_out = rule.evaluate(&after)?;
    let d_before = before_out.dist(&xi);
    let d_after = after_out.dist(&xi);
    Ok((
        Measurement {
            d_before,
            d_after,
            verdict: judge(d_after, d_before, d_before),
        },
        after,
    ))
}

/// Checks the Twin Condition for voters `i` (focal) and `j` (partner) at `p`.
pub fn check_twin(rule: &AggregationRule, p: &Profile, i: usize, j: usize) -> Result<Verdict> {
    measure_twin(rule, p, i, j).map(|(m, _)| m.verdict)
}

fn tag_undefined(e: Error, which: &str) -> Error {
    match e {
        Error::UndefinedAtProfile { rule, reason } => Error::UndefinedAtProfile {
            rule,
            reason: format!("{which}: {reason}"),
        },
        other => other,
    }
}

fn measure_participation(
    family: &RuleFamily,
    p: &Profile,
    i: usize,
) -> Result<(Measurement, Profile)> {
    let k_plus = p.len();
    if k_plus < 3 {
        return Err(Error::BadK {
            k: k_plus.saturating_sub(1),
            min: 2,
        });
    }
    let xi = p.voter(i)?.clone();
    let abstention = delete_voter(p, i)?;
    let with = family.rule(k_plus)?;
    let without = family.rule(k_plus - 1)?;
    let out_in = with
        .evaluate(p)
        .map_err(|e| tag_undefined(e, "participation profile"))?;
    let out_out = without
        .evaluate(&abstention)
        .map_err(|e| tag_undefined(e, "abstention profile"))?;
    let d_in = out_in.dist(&xi);
    let d_out = out_out.dist(&xi);
    Ok((
        Measurement {
            d_before: d_out,
            d_after: d_in,
            verdict: judge(d_in, d_out, d_out),
        },
        abstention,
    ))
}

/// Checks the Participation Condition for voter `i` of the (k+1)-profile `p`
/// against the k-profile where `i` abstains.
pub fn check_participation(family: &RuleFamily, p: &Profile, i: usize) -> Result<Verdict> {
    measure_participation(family, p, i).map(|(m, _)| m.verdict)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutsiderStability {
    Holds,
    Deviation(f64),
}

/// Inserts the current outcome y = f^{(k)}(p) as voter `i` and measures how
/// far f^{(k+1)} moves away from y.
pub fn check_outsider_stability(
    family: &RuleFamily,
    p: &Profile,
    i: usize,
) -> Result<OutsiderStability> {
    let y = family.rule(p.len())?.evaluate(p)?;
    let q = insert_voter(p, i, y.clone())?;
    let dev = family.rule(q.len())?.evaluate(&q)?.dist(&y);
    Ok(if dev <= TOL {
        OutsiderStability::Holds
    } else {
        OutsiderStability::Deviation(dev)
    })
}

fn twin_certificate(
    rule: &AggregationRule,
    before: Profile,
    after: Profile,
    i: usize,
    j: usize,
    m: &Measurement,
) -> Option<ViolationCertificate> {
    Some(ViolationCertificate {
        condition: Condition::Twin,
        kind: m.verdict.kind()?,
        rule_name: rule.name.clone(),
        before_profile: before,
        after_profile: after,
        focal_voter: i,
        partner_voter: Some(j),
        d_before: Angle(m.d_before),
        d_after: Angle(m.d_after),
        margin: Angle(m.d_after - m.d_before),
        verified: false,
    })
}

fn participation_certificate(
    family: &RuleFamily,
    full: Profile,
    abstention: Profile,
    i: usize,
    m: &Measurement,
) -> Option<ViolationCertificate> {
    Some(ViolationCertificate {
        condition: Condition::Participation,
        kind: m.verdict.kind()?,
        rule_name: family.name.clone(),
        before_profile: abstention,
        after_profile: full,
        focal_voter: i,
        partner_voter: None,
        d_before: Angle(m.d_before),
        d_after: Angle(m.d_after),
        margin: Angle(m.d_after - m.d_before),
        verified: false,
    })
}

fn check_certificate_shape(cert: &ViolationCertificate, m: &Measurement) -> Result<()> {
    let fail = |msg: String| Err(Error::Unverified(msg));
    if (m.d_before - cert.d_before.0).abs() > TOL || (m.d_after - cert.d_after.0).abs() > TOL {
        return fail(format!(
            "distances ({}, {}) re-evaluate to ({}, {})",
            cert.d_before.0, cert.d_after.0, m.d_before, m.d_after
        ));
    }
    if m.verdict.kind() != Some(cert.kind) {
        return fail(format!(
            "kind {:?} re-derives as {:?}",
            cert.kind, m.verdict
        ));
    }
    let margin = cert.margin.0;
    let ok = match cert.kind {
        ViolationKind::Weak => margin > TOL,
        ViolationKind::Strictness => margin.abs() <= TOL && cert.d_before.0 > TOL,
    };
    if !ok {
        return fail(format!(
            "margin {margin} inconsistent with kind {:?}",
            cert.kind
        ));
    }
    Ok(())
}

/// Re-evaluates a twin certificate through `rule`.
pub fn verify_twin_certificate(cert: &ViolationCertificate, rule: &AggregationRule) -> Result<()> {
    if cert.condition != Condition::Twin {
        return Err(Error::Unverified("not a twin certificate".into()));
    }
    let j = cert
        .partner_voter
        .ok_or_else(|| Error::Unverified("twin certificate without partner".into()))?;
    let (m, after) = measure_twin(rule, &cert.before_profile, cert.focal_voter, j)?;
    if after != cert.after_profile {
        return Err(Error::Unverified(
            "after profile is not the twinned profile".into(),
        ));
    }
    check_certificate_shape(cert, &m)
}

/// Re-evaluates a participation certificate through `family`.
pub fn verify_participation_certificate(
    cert: &ViolationCertificate,
    family: &RuleFamily,
) -> Result<()> {
    if cert.condition != Condition::Participation {
        return Err(Error::Unverified("not a participation certificate".into()));
    }
    let (m, abstention) = measure_participation(family, &cert.after_profile, cert.focal_voter)?;
    if abstention != cert.before_profile {
        return Err(Error::Unverified(
            "before profile is not the abstention profile".into(),
        ));
    }
    check_certificate_shape(cert, &m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Points per voter slot in the grid sweeps.
    pub net_size: usize,
    /// Maximum coordinate-descent sweeps when refining the best candidate.
    pub refine_steps: usize,
    /// Random full profiles swept coordinate-wise after the slice phase.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            net_size: 16,
            refine_steps: 40,
            restarts: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub certificate: Option<ViolationCertificate>,
    pub profiles_examined: usize,
    /// Profiles skipped because they sit within 1e-6 of a partial rule's
    /// singular set (or the rule failed to evaluate there).
    pub singular_skipped: usize,
}

#[derive(Clone)]
struct Candidate {
    margin: f64,
    focal: usize,
    partner: usize,
    profile: Profile,
}

/// Larger margin first, then smaller voter indices, then lexicographic profile.
fn better(a: &Candidate, b: &Candidate) -> Ordering {
    b.margin
        .total_cmp(&a.margin)
        .then(a.focal.cmp(&b.focal))
        .then(a.partner.cmp(&b.partner))
        .then_with(|| a.profile.lex_cmp(&b.profile))
}

fn pick(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if better(&a, &b) == Ordering::Greater {
            b
        } else {
            a
        }),
        (a, b) => a.or(b),
    }
}

#[derive(Default)]
struct Tally {
    best: Option<Candidate>,
    examined: usize,
    skipped: usize,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            best: pick(self.best, other.best),
            examined: self.examined + other.examined,
            skipped: self.skipped + other.skipped,
        }
    }
}

/// What a search needs to know about one condition.
trait Probe: Sync {
    /// Voters per profile.
    fn width(&self) -> usize;
    fn dim(&self) -> usize;
    /// Violation margin at (profile, focal, partner); `Err` means skip.
    fn examine(&self, p: &Profile, focal: usize, partner: usize) -> Result<Option<f64>>;
    /// Focal/partner combinations to test on each profile.
    fn roles(&self) -> Vec<(usize, usize)>;
}

struct TwinProbe<'a> {
    rule: &'a AggregationRule,
}

impl Probe for TwinProbe<'_> {
    fn width(&self) -> usize {
        self.rule.k
    }

    fn dim(&self) -> usize {
        self.rule.dim_n
    }

    fn examine(&self, p: &Profile, i: usize, j: usize) -> Result<Option<f64>> {
        if self.rule.near_singular(p) {
            return Err(Error::BadParams("near singular".into()));
        }
        let xi = p.voter(i)?;
        if xi.approx_eq(p.voter(j)?) {
            return Ok(None);
        }
        let after = p.with_voter(j, xi.clone())?;
        if self.rule.near_singular(&after) {
            return Err(Error::BadParams("near singular".into()));
        }
        let (m, _) = measure_twin(self.rule, p, i, j)?;
        Ok(m.verdict.is_violation().then_some(m.d_after - m.d_before))
    }

    fn roles(&self) -> Vec<(usize, usize)> {
        let k = self.rule.k;
        (1..=k)
            .flat_map(|i| (1..=k).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect()
    }
}

struct ParticipationProbe<'a> {
    family: &'a RuleFamily,
    with: AggregationRule,
    without: AggregationRule,
}

impl Probe for ParticipationProbe<'_> {
    fn width(&self) -> usize {
        self.with.k
    }

    fn dim(&self) -> usize {
        self.with.dim_n
    }

    fn examine(&self, p: &Profile, i: usize, _: usize) -> Result<Option<f64>> {
        if self.with.near_singular(p) || self.without.near_singular(&delete_voter(p, i)?) {
            return Err(Error::BadParams("near singular".into()));
        }
        let (m, _) = measure_participation(self.family, p, i)?;
        Ok(m.verdict.is_violation().then_some(m.d_after - m.d_before))
    }

    fn roles(&self) -> Vec<(usize, usize)> {
        (1..=self.with.k).map(|i| (i, 0)).collect()
    }
}

fn scan_profile<P: Probe>(probe: &P, p: &Profile, tally: &mut Tally) {
    for (focal, partner) in probe.roles() {
        tally.examined += 1;
        match probe.examine(p, focal, partner) {
            Ok(Some(margin)) => {
                let c = Candidate {
                    margin,
                    focal,
                    partner,
                    profile: p.clone(),
                };
                tally.best = pick(tally.best.take(), Some(c));
            }
            Ok(None) => {}
            Err(_) => tally.skipped += 1,
        }
    }
}

fn run_search<P: Probe>(
    probe: &P,
    cfg: &SearchConfig,
) -> Result<(Option<Candidate>, usize, usize)> {
    let k = probe.width();
    let n = probe.dim();
    let net = default_net(n, cfg.net_size.max(2), cfg.seed)?;
    let e1 = SpherePoint::basepoint(n);
    let background = Profile::new(vec![e1; k])?;

    // slices: two slots vary over the net, the rest sit at e1
    let slots: Vec<(usize, usize)> = (1..=k)
        .flat_map(|a| ((a + 1)..=k).map(move |b| (a, b)))
        .collect();
    let slice_tally = slots
        .par_iter()
        .map(|&(a, b)| {
            let mut tally = Tally::default();
            for xa in &net.points {
                for xb in &net.points {
                    let p = background
                        .with_voter(a, xa.clone())
                        .and_then(|p| p.with_voter(b, xb.clone()));
                    if let Ok(p) = p {
                        scan_profile(probe, &p, &mut tally);
                    }
                }
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);

    // random restarts with coordinate-wise sweeps
    let restart_tally = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed.wrapping_mul(0x9E37_79B9).wrapping_add(r as u64),
            );
            let mut tally = Tally::default();
            let pts: Vec<SpherePoint> = (0..k).map(|_| random_point(n, &mut rng)).collect();
            let Ok(p) = Profile::new(pts) else {
                return tally;
            };
            scan_profile(probe, &p, &mut tally);
            for slot in 1..=k {
                for v in &net.points {
                    if let Ok(q) = p.with_voter(slot, v.clone()) {
                        scan_profile(probe, &q, &mut tally);
                    }
                }
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);

    let total = slice_tally.merge(restart_tally);
    let refined = total.best.map(|c| refine(probe, c, &net, cfg.refine_steps));
    Ok((refined, total.examined, total.skipped))
}

/// Coordinate descent on the violation margin with a halving geodesic step.
fn refine<P: Probe>(probe: &P, mut best: Candidate, net: &SampleNet, sweeps: usize) -> Candidate {
    const STEP_FLOOR: f64 = 1e-6;
    let mut step = net.mesh.min(0.5);
    for _ in 0..sweeps {
        if step < STEP_FLOOR {
            break;
        }
        let mut improved = false;
        for slot in 1..=probe.width() {
            let x = best.profile.points()[slot - 1].clone();
            for dir in x.tangent_basis() {
                for sign in [1.0, -1.0] {
                    let v: Vec<f64> = dir.iter().map(|d| sign * step * d).collect();
                    let Ok(q) = best.profile.with_voter(slot, x.exp(&v)) else {
                        continue;
                    };
                    if let Ok(Some(margin)) = probe.examine(&q, best.focal, best.partner) {
                        if margin > best.margin {
                            best = Candidate {
                                margin,
                                profile: q,
                                ..best
                            };
                            improved = true;
                            break;
                        }
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Grid-plus-refinement search for a Twin Condition violation.
///
/// Absence of a certificate says nothing beyond "none at this resolution".
pub fn search_twin_violation(rule: &AggregationRule, cfg: &SearchConfig) -> Result<SearchOutcome> {
    if rule.k < 2 {
        return Err(Error::BadK { k: rule.k, min: 2 });
    }
    let probe = TwinProbe { rule };
    let (best, examined, skipped) = run_search(&probe, cfg)?;
    let certificate = match best {
        Some(c) => {
            let (m, after) = measure_twin(rule, &c.profile, c.focal, c.partner)?;
            twin_certificate(rule, c.profile, after, c.focal, c.partner, &m).and_then(|mut cert| {
                cert.verified = verify_twin_certificate(&cert, rule).is_ok();
                cert.verified.then_some(cert)
            })
        }
        None => None,
    };
    Ok(SearchOutcome {
        certificate,
        profiles_examined: examined,
        singular_skipped: skipped,
    })
}

/// Search for a Participation Condition violation between f^{(k)} and f^{(k+1)}.
pub fn search_noshow_violation(
    family: &RuleFamily,
    k: usize,
    cfg: &SearchConfig,
) -> Result<SearchOutcome> {
    if k < 2 {
        return Err(Error::BadK { k, min: 2 });
    }
    let probe = ParticipationProbe {
        family,
        with: family.rule(k + 1)?,
        without: family.rule(k)?,
    };
    let (best, examined, skipped) = run_search(&probe, cfg)?;
    let certificate = match best {
        Some(c) => {
            let (m, abstention) = measure_participation(family, &c.profile, c.focal)?;
            participation_certificate(family, c.profile, abstention, c.focal, &m).and_then(
                |mut cert| {
                    cert.verified = verify_participation_certificate(&cert, family).is_ok();
                    cert.verified.then_some(cert)
                },
            )
        }
        None => None,
    };
    Ok(SearchOutcome {
        certificate,
        profiles_examined: examined,
        singular_skipped: skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NauScanResult {
    pub map_provenance: String,
    pub worst_point: SpherePoint,
    /// min over the net of d(g(x), −x).
    pub gap: f64,
    pub net: NetDescriptor,
    pub certified: bool,
    /// gap − (1 + L)·mesh, when a Lipschitz bound L was supplied.
    pub certificate_slack: Option<f64>,
}

/// Measures how close `g` comes to sending a net point to its antipode.
///
/// With a Lipschitz bound L, `gap > (1 + L)·mesh` proves g(x) ≠ −x on the
/// whole sphere: every x is within `mesh` of a net point p, and
/// d(g(x), −x) ≥ d(g(p), −p) − L·mesh − mesh.
pub fn scan_nau(
    g: &SphereSelfMap,
    net: &SampleNet,
    lipschitz_bound: Option<f64>,
) -> Result<NauScanResult> {
    if net.dim() != g.dim_n {
        return Err(Error::DimensionMismatch {
            expected: g.dim_n,
            found: net.dim(),
        });
    }
    let evals: Vec<Result<f64>> = net
        .points
        .par_iter()
        .map(|x| g.eval(x).map(|gx| gx.dist(&x.antipode())))
        .collect();
    let mut undefined = Vec::new();
    let mut worst: Option<(usize, f64)> = None;
    for (idx, r) in evals.into_iter().enumerate() {
        match r {
            Ok(gap) => {
                if worst.is_none_or(|(_, w)| gap < w) {
                    worst = Some((idx, gap));
                }
            }
            Err(Error::UndefinedAtPoint { mut locations, .. }) => undefined.append(&mut locations),
            Err(e) => return Err(e),
        }
    }
    if !undefined.is_empty() {
        return Err(Error::UndefinedAtPoint {
            map: g.provenance.clone(),
            locations: undefined,
        });
    }
    let (idx, gap) = worst.ok_or_else(|| Error::BadParams("empty net".into()))?;
    let slack = lipschitz_bound.map(|l| gap - (1.0 + l) * net.mesh);
    Ok(NauScanResult {
        map_provenance: g.provenance.clone(),
        worst_point: net.points[idx].clone(),
        gap,
        net: net.descriptor(),
        certified: slack.is_some_and(|s| s > 0.0),
        certificate_slack: slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntipodeConfig {
    pub multistarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for AntipodeConfig {
    fn default() -> Self {
        Self {
            multistarts: 16,
            max_iter: 500,
            tol: 1e-9,
            seed: 0,
        }
    }
}

/// A point x₀ with its antipodal residual φ(x₀) = 1 + g(x₀)·x₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntipodeHit {
    pub point: SpherePoint,
    pub residual: f64,
}

/// φ(x) = 1 + g(x)·x, evaluated as ½‖g(x) + x‖² so that it keeps full
/// relative precision near zero.
pub fn antipodal_residual(g: &SphereSelfMap, x: &SpherePoint) -> Result<f64> {
    let gx = g.eval(x)?;
    let s: f64 = gx
        .coords()
        .iter()
        .zip(x.coords())
        .map(|(a, b)| (a + b) * (a + b))
        .sum();
    Ok(0.5 * s)
}

fn descend(g: &SphereSelfMap, start: &SpherePoint, max_iter: usize) -> Option<AntipodeHit> {
    const H: f64 = 1e-7;
    const ARMIJO: f64 = 0.1;
    let phi = |x: &SpherePoint| antipodal_residual(g, x).unwrap_or(f64::INFINITY);
    let mut x = start.clone();
    let mut f = phi(&x);
    if !f.is_finite() {
        return None;
    }
    let mut step = 1.0;
    for _ in 0..max_iter {
        if f <= 1e-32 || step < 1e-18 {
            break;
        }
        let basis = x.tangent_basis();
        let mut grad = vec![0.0; x.coords().len()];
        for b in &basis {
            let plus: Vec<f64> = b.iter().map(|c| H * c).collect();
            let minus: Vec<f64> = b.iter().map(|c| -H * c).collect();
            let d = (phi(&x.exp(&plus)) - phi(&x.exp(&minus))) / (2.0 * H);
            if !d.is_finite() {
                continue;
            }
            grad.iter_mut().zip(b).for_each(|(gc, bc)| *gc += d * bc);
        }
        if grad.iter().all(|c| *c == 0.0) {
            break;
        }
        let v: Vec<f64> = grad.iter().map(|c| -step * c).collect();
        let y = x.exp(&v);
        let fy = phi(&y);
        // sufficient decrease; plain decrease lets a step that mirrors x
        // across the minimum be accepted forever
        let gnorm2: f64 = grad.iter().map(|c| c * c).sum();
        if fy <= f - ARMIJO * step * gnorm2 {
            x = y;
            f = fy;
            step = (step * 2.0).min(4.0);
        } else {
            step *= 0.5;
        }
    }
    Some(AntipodeHit {
        point: x,
        residual: f,
    })
}

/// Multistart descent on φ; returns the best point found whatever its residual.
pub fn best_antipode_candidate(
    g: &SphereSelfMap,
    cfg: &AntipodeConfig,
) -> Result<Option<AntipodeHit>> {
    let starts = default_net(g.dim_n, cfg.multistarts.max(1), cfg.seed)?;
    let hits: Vec<Option<AntipodeHit>> = starts
        .points
        .par_iter()
        .map(|s| descend(g, s, cfg.max_iter))
        .collect();
    Ok(hits
        .into_iter()
        .flatten()
        .fold(None, |best: Option<AntipodeHit>, h| match best {
            Some(b) if b.residual <= h.residual => Some(b),
            _ => Some(h),
        }))
}

/// Looks for x₀ with g(x₀) = −x₀ (φ(x₀) ≤ tol). `None` when every start
/// stalls above the tolerance.
pub fn find_antipodal_point(
    g: &SphereSelfMap,
    cfg: &AntipodeConfig,
) -> Result<Option<AntipodeHit>> {
    Ok(best_antipode_candidate(g, cfg)?.filter(|h| h.residual <= cfg.tol))
}

fn require_antipodal(g: &SphereSelfMap, x0: &SpherePoint) -> Result<f64> {
    let residual = antipodal_residual(g, x0)?;
    if residual > WITNESS_ANTIPODE_TOL {
        return Err(Error::NotAntipodal { residual });
    }
    Ok(residual)
}

/// Turns an antipodal point of f_{i,j} into a Twin paradox.
///
/// Before: x₀ in slot i, `y` in slot j, e₁ elsewhere. After: δ_{i,j}(x₀),
/// whose outcome is −x₀, at distance π from the focal voter. Nothing can be
/// farther, so the twin move cannot have strictly helped voter i.
pub fn twin_witness_from_antipode(
    rule: &AggregationRule,
    i: usize,
    j: usize,
    x0: &SpherePoint,
    y: &SpherePoint,
) -> Result<ViolationCertificate> {
    let g = restrict_pair(rule, i, j)?;
    require_antipodal(&g, x0)?;
    let before = twin_embedding(rule.k, i, j, x0)?.with_voter(j, y.clone())?;
    twin_witness(rule, before, i, j)
}

/// Same construction on the unanimity diagonal: if f(x₀, …, x₀) = −x₀ then
/// moving voter j from `y` to x₀ cannot help voter i.
pub fn unanimity_twin_witness(
    rule: &AggregationRule,
    i: usize,
    j: usize,
    x0: &SpherePoint,
    y: &SpherePoint,
) -> Result<ViolationCertificate> {
    require_antipodal(&crate::rules::diagonal(rule), x0)?;
    let before = Profile::new(vec![x0.clone(); rule.k])?.with_voter(j, y.clone())?;
    twin_witness(rule, before, i, j)
}

fn twin_witness(
    rule: &AggregationRule,
    before: Profile,
    i: usize,
    j: usize,
) -> Result<ViolationCertificate> {
    let (m, after) = measure_twin(rule, &before, i, j)?;
    let mut cert = twin_certificate(rule, before, after, i, j, &m).ok_or_else(|| {
        Error::Unverified(format!(
            "profile does not violate the twin condition (d_before={}, d_after={})",
            m.d_before, m.d_after
        ))
    })?;
    verify_twin_certificate(&cert, rule)?;
    cert.verified = true;
    Ok(cert)
}

/// Turns an antipodal point of f^{(k+1)}_{i,j} into a No Show paradox: voter
/// j joins a k-voter electorate and drives the outcome to −x₀.
pub fn noshow_witness_from_antipode(
    family: &RuleFamily,
    k: usize,
    i: usize,
    j: usize,
    x0: &SpherePoint,
) -> Result<ViolationCertificate> {
    if k < 2 {
        return Err(Error::BadK { k, min: 2 });
    }
    let with = family.rule(k + 1)?;
    require_antipodal(&restrict_pair(&with, i, j)?, x0)?;
    let full = twin_embedding(k + 1, i, j, x0)?;
    let (m, abstention) = measure_participation(family, &full, j)?;
    let mut cert = participation_certificate(family, full, abstention, j, &m).ok_or_else(|| {
        Error::Unverified(format!(
            "profile does not violate participation (d_out={}, d_in={})",
            m.d_before, m.d_after
        ))
    })?;
    verify_participation_certificate(&cert, family)?;
    cert.verified = true;
    Ok(cert)
}
