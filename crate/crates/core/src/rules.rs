//! Aggregation rules (S^n)^k → S^n, rule families indexed by the number of
//! voters, and the slot embeddings that turn a rule into self-maps of S^n.
//!
//! Voter indices are 1-based throughout.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::sphere::{norm, normalize, SpherePoint, ZERO_NORM};

/// Profiles whose vector sum is shorter than this are treated as touching
/// the singular set of the mean-based rules during searches.
pub const SINGULAR_MARGIN: f64 = 1e-6;

/// Stationarity residual accepted from the Karcher mean iteration.
pub const KARCHER_RESIDUAL: f64 = 1e-8;

/// One preference per voter, all on the same sphere.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<SpherePoint>", into = "Vec<SpherePoint>")]
pub struct Profile {
    points: Vec<SpherePoint>,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.points.iter().map(|p| p.coords()))
            .finish()
    }
}

impl TryFrom<Vec<SpherePoint>> for Profile {
    type Error = Error;

    fn try_from(points: Vec<SpherePoint>) -> Result<Self> {
        Profile::new(points)
    }
}

impl From<Profile> for Vec<SpherePoint> {
    fn from(p: Profile) -> Self {
        p.points
    }
}

impl Profile {
    pub fn new(points: Vec<SpherePoint>) -> Result<Self> {
        let first = points
            .first()
            .ok_or(Error::IndexOutOfRange { index: 1, len: 0 })?;
        let n = first.dim();
        if let Some(bad) = points.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        Ok(Self { points })
    }

    /// Profile on S¹ from angles in radians.
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        Self::new(angles.iter().map(|&a| SpherePoint::from_angle(a)).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    /// Voter `i`'s preference (1-based).
    pub fn voter(&self, i: usize) -> Result<&SpherePoint> {
        check_index(i, self.len())?;
        Ok(&self.points[i - 1])
    }

    /// Copy of the profile with voter `j`'s preference replaced by `x`.
    pub fn with_voter(&self, j: usize, x: SpherePoint) -> Result<Profile> {
        check_index(j, self.len())?;
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        let mut points = self.points.clone();
        points[j - 1] = x;
        Ok(Profile { points })
    }

    fn vector_sum(&self) -> Vec<f64> {
        let mut sum = vec![0.0; self.dim() + 1];
        for p in &self.points {
            sum.iter_mut().zip(p.coords()).for_each(|(s, c)| *s += c);
        }
        sum
    }

    /// Lexicographic order on coordinates, used to break ties deterministically.
    pub(crate) fn lex_cmp(&self, other: &Profile) -> std::cmp::Ordering {
        let a = self.points.iter().flat_map(|p| p.coords());
        let b = other.points.iter().flat_map(|p| p.coords());
        a.zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| self.len().cmp(&other.len()))
    }
}

fn check_index(i: usize, len: usize) -> Result<()> {
    if i == 0 || i > len {
        Err(Error::IndexOutOfRange { index: i, len })
    } else {
        Ok(())
    }
}

/// The profile with voter `i` removed (1-based, order preserved).
pub fn delete_voter(p: &Profile, i: usize) -> Result<Profile> {
    check_index(i, p.len())?;
    if p.len() < 2 {
        return Err(Error::IndexOutOfRange { index: i, len: 1 });
    }
    let mut points = p.points.clone();
    points.remove(i - 1);
    Ok(Profile { points })
}

/// The profile with `x` inserted so that it becomes voter `i` (1 ≤ i ≤ k+1).
pub fn insert_voter(p: &Profile, i: usize, x: SpherePoint) -> Result<Profile> {
    check_index(i, p.len() + 1)?;
    if x.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: x.dim(),
        });
    }
    let mut points = p.points.clone();
    points.insert(i - 1, x);
    Ok(Profile { points })
}

/// δ^{(k)}_{i,j}(x): `x` in slots `i` and `j`, the basepoint e₁ elsewhere.
pub fn twin_embedding(k: usize, i: usize, j: usize, x: &SpherePoint) -> Result<Profile> {
    check_index(i, k)?;
    check_index(j, k)?;
    if i == j {
        return Err(Error::IndexOutOfRange { index: j, len: k });
    }
    let e1 = SpherePoint::basepoint(x.dim());
    let points = (1..=k)
        .map(|s| {
            if s == i || s == j {
                x.clone()
            } else {
                e1.clone()
            }
        })
        .collect();
    Ok(Profile { points })
}

/// `x` in slot `alpha`, e₁ elsewhere.
pub fn coordinate_embedding(k: usize, alpha: usize, x: &SpherePoint) -> Result<Profile> {
    check_index(alpha, k)?;
    let e1 = SpherePoint::basepoint(x.dim());
    let points = (1..=k)
        .map(|s| if s == alpha { x.clone() } else { e1.clone() })
        .collect();
    Ok(Profile { points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TotalityClaim {
    TotalContinuous,
    Partial,
    TotalDiscontinuous,
}

/// The built-in rule catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    /// Returns voter `winner`'s preference.
    Dictator { winner: usize },
    /// Ignores the profile.
    Constant { c: SpherePoint },
    /// normalize(Σ x_α); undefined where the sum vanishes.
    NormalizedMean,
    /// −normalize(Σ x_α); sends every unanimous profile to its antipode.
    AntagonisticMean,
    /// Riemannian center of mass by fixed-step gradient descent.
    KarcherMean { max_iter: usize, step_tol: f64 },
    /// The winner's preference rotated by `angle` in the (1,2)-plane.
    RotatedDictator { winner: usize, angle: f64 },
}

impl Builtin {
    pub fn karcher_default() -> Self {
        Builtin::KarcherMean {
            max_iter: 200,
            step_tol: 1e-10,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Builtin::Dictator { .. } => "dictator",
            Builtin::Constant { .. } => "constant",
            Builtin::NormalizedMean => "normalized_mean",
            Builtin::AntagonisticMean => "antagonistic_mean",
            Builtin::KarcherMean { .. } => "karcher_mean",
            Builtin::RotatedDictator { .. } => "rotated_dictator",
        }
    }

    fn display_name(&self) -> String {
        match self {
            Builtin::Dictator { winner } => format!("dictator(winner={winner})"),
            Builtin::Constant { c } => format!("constant(c={:?})", c.coords()),
            Builtin::RotatedDictator { winner, angle } => {
                format!("rotated_dictator(winner={winner}, angle={angle})")
            }
            Builtin::KarcherMean { max_iter, step_tol } => {
                format!("karcher_mean(max_iter={max_iter}, step_tol={step_tol:e})")
            }
            other => other.kind_name().to_string(),
        }
    }

    fn params_json(&self) -> Value {
        match self {
            Builtin::Dictator { winner } => json!({ "winner": winner }),
            Builtin::Constant { c } => json!({ "c": c.coords() }),
            Builtin::NormalizedMean | Builtin::AntagonisticMean => json!({}),
            Builtin::KarcherMean { max_iter, step_tol } => {
                json!({ "max_iter": max_iter, "step_tol": step_tol })
            }
            Builtin::RotatedDictator { winner, angle } => {
                json!({ "winner": winner, "angle": angle })
            }
        }
    }

    fn totality(&self) -> TotalityClaim {
        match self {
            Builtin::Dictator { .. }
            | Builtin::Constant { .. }
            | Builtin::RotatedDictator { .. } => TotalityClaim::TotalContinuous,
            _ => TotalityClaim::Partial,
        }
    }

    fn lipschitz(&self) -> Option<f64> {
        match self {
            Builtin::Dictator { .. } | Builtin::RotatedDictator { .. } => Some(1.0),
            Builtin::Constant { .. } => Some(0.0),
            _ => None,
        }
    }

    fn min_k(&self) -> usize {
        match self {
            Builtin::Dictator { winner } | Builtin::RotatedDictator { winner, .. } => *winner,
            _ => 1,
        }
    }
}

type ProfileFn = dyn Fn(&Profile) -> Result<SpherePoint> + Send + Sync;

#[derive(Clone)]
enum RuleBody {
    Builtin(Builtin),
    Custom(Arc<ProfileFn>),
}

/// A map (S^n)^k → S^n with metadata.
///
/// `lipschitz_bound` is a geodesic modulus valid when any subset of the
/// voter slots moves (sup-metric on profiles); restricted self-maps inherit it.
#[derive(Clone)]
pub struct AggregationRule {
    pub name: String,
    pub k: usize,
    pub dim_n: usize,
    pub totality_claim: TotalityClaim,
    pub lipschitz_bound: Option<f64>,
    body: RuleBody,
}

impl fmt::Debug for AggregationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AggregationRule")
            .field("name", &self.name)
            .field("k", &self.k)
            .field("dim_n", &self.dim_n)
            .field("totality_claim", &self.totality_claim)
            .finish_non_exhaustive()
    }
}

/// Instantiates a catalog rule for `k` voters on S^`dim_n`.
pub fn make_builtin(builtin: Builtin, k: usize, dim_n: usize) -> Result<AggregationRule> {
    if k == 0 {
        return Err(Error::BadParams("k must be at least 1".into()));
    }
    if dim_n == 0 {
        return Err(Error::BadParams("dim_n must be at least 1".into()));
    }
    match &builtin {
        Builtin::Dictator { winner } | Builtin::RotatedDictator { winner, .. }
            if *winner == 0 || *winner > k =>
        {
            return Err(Error::BadParams(format!("winner {winner} not in 1..={k}")));
        }
        Builtin::RotatedDictator { angle, .. } if !angle.is_finite() => {
            return Err(Error::BadParams("rotation angle must be finite".into()));
        }
        Builtin::Constant { c } if c.dim() != dim_n => {
            return Err(Error::BadParams(format!(
                "constant point lives on S^{}, rule on S^{dim_n}",
                c.dim()
            )));
        }
        Builtin::KarcherMean { max_iter, step_tol }
            if *max_iter == 0 || step_tol.is_nan() || *step_tol <= 0.0 =>
        {
            return Err(Error::BadParams(
                "karcher_mean needs max_iter > 0 and step_tol > 0".into(),
            ));
        }
        _ => {}
    }
    Ok(AggregationRule {
        name: builtin.display_name(),
        k,
        dim_n,
        totality_claim: builtin.totality(),
        lipschitz_bound: builtin.lipschitz(),
        body: RuleBody::Builtin(builtin),
    })
}

impl AggregationRule {
    /// A rule backed by an arbitrary closure, for experiments and tests.
    pub fn custom<F>(
        name: impl Into<String>,
        k: usize,
        dim_n: usize,
        totality_claim: TotalityClaim,
        lipschitz_bound: Option<f64>,
        f: F,
    ) -> Self
    where
        F: Fn(&Profile) -> Result<SpherePoint> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            k,
            dim_n,
            totality_claim,
            lipschitz_bound,
            body: RuleBody::Custom(Arc::new(f)),
        }
    }

    pub fn builtin(&self) -> Option<&Builtin> {
        match &self.body {
            RuleBody::Builtin(b) => Some(b),
            RuleBody::Custom(_) => None,
        }
    }

    /// The rule's social outcome at `p`.
    pub fn evaluate(&self, p: &Profile) -> Result<SpherePoint> {
        if p.len() != self.k {
            return Err(Error::BadParams(format!(
                "rule `{}` takes {} voters, profile has {}",
                self.name,
                self.k,
                p.len()
            )));
        }
        if p.dim() != self.dim_n {
            return Err(Error::DimensionMismatch {
                expected: self.dim_n,
                found: p.dim(),
            });
        }
        let out = match &self.body {
            RuleBody::Custom(f) => f(p)?,
            RuleBody::Builtin(b) => self.evaluate_builtin(b, p)?,
        };
        if out.dim() != self.dim_n {
            return Err(Error::DimensionMismatch {
                expected: self.dim_n,
                found: out.dim(),
            });
        }
        Ok(out)
    }

    fn undefined(&self, reason: impl Into<String>) -> Error {
        Error::UndefinedAtProfile {
            rule: self.name.clone(),
            reason: reason.into(),
        }
    }

    fn evaluate_builtin(&self, b: &Builtin, p: &Profile) -> Result<SpherePoint> {
        match b {
            Builtin::Dictator { winner } => Ok(p.points[winner - 1].clone()),
            Builtin::Constant { c } => Ok(c.clone()),
            Builtin::RotatedDictator { winner, angle } => {
                Ok(p.points[winner - 1].rotate_12(*angle))
            }
            Builtin::NormalizedMean => self.mean(p),
            Builtin::AntagonisticMean => self.mean(p).map(|m| m.antipode()),
            Builtin::KarcherMean { max_iter, step_tol } => self.karcher(p, *max_iter, *step_tol),
        }
    }

    fn mean(&self, p: &Profile) -> Result<SpherePoint> {
        normalize(&p.vector_sum()).map_err(|_| self.undefined("vector sum vanishes"))
    }

    fn karcher(&self, p: &Profile, max_iter: usize, step_tol: f64) -> Result<SpherePoint> {
        let mut m = self.mean(p)?;
        let k = p.len() as f64;
        for _ in 0..max_iter {
            let grad = self.log_sum(&m, p)?;
            let update: Vec<f64> = grad.iter().map(|g| g / k).collect();
            m = m.exp(&update);
            if norm(&update) < step_tol {
                break;
            }
        }
        let residual = norm(&self.log_sum(&m, p)?);
        if residual > KARCHER_RESIDUAL {
            return Err(self.undefined(format!(
                "karcher iteration did not reach stationarity (residual {residual:e})"
            )));
        }
        Ok(m)
    }

    /// Σ_α log_m(x_α), the negative gradient of ½ Σ d²(m, x_α).
    pub(crate) fn log_sum(&self, m: &SpherePoint, p: &Profile) -> Result<Vec<f64>> {
        let mut sum = vec![0.0; m.coords().len()];
        for x in p.points() {
            let l = m
                .log(x)
                .ok_or_else(|| self.undefined("a voter sits at the antipode of the iterate"))?;
            sum.iter_mut().zip(&l).for_each(|(s, v)| *s += v);
        }
        Ok(sum)
    }

    /// True when `p` lies within [`SINGULAR_MARGIN`] of the rule's known
    /// singular set. Always false for total rules.
    pub fn near_singular(&self, p: &Profile) -> bool {
        match self.builtin() {
            Some(
                Builtin::NormalizedMean | Builtin::AntagonisticMean | Builtin::KarcherMean { .. },
            ) => norm(&p.vector_sum()) <= SINGULAR_MARGIN,
            _ => false,
        }
    }

    /// The serializable description of a catalog rule.
    pub fn spec(&self) -> Option<RuleSpec> {
        self.builtin().map(|b| RuleSpec {
            name: b.kind_name().to_string(),
            k: self.k,
            dim_n: self.dim_n,
            params: b.params_json(),
        })
    }
}

type PointFn = dyn Fn(&SpherePoint) -> Result<SpherePoint> + Send + Sync;

/// A map S^n → S^n tagged with where it came from.
#[derive(Clone)]
pub struct SphereSelfMap {
    pub provenance: String,
    pub dim_n: usize,
    f: Arc<PointFn>,
}

impl fmt::Debug for SphereSelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SphereSelfMap({} on S^{})", self.provenance, self.dim_n)
    }
}

impl SphereSelfMap {
    pub fn new<F>(provenance: impl Into<String>, dim_n: usize, f: F) -> Self
    where
        F: Fn(&SpherePoint) -> Result<SpherePoint> + Send + Sync + 'static,
    {
        Self {
            provenance: provenance.into(),
            dim_n,
            f: Arc::new(f),
        }
    }

    pub fn identity(dim_n: usize) -> Self {
        Self::new("identity", dim_n, |x| Ok(x.clone()))
    }

    pub fn antipodal(dim_n: usize) -> Self {
        Self::new("antipodal", dim_n, |x| Ok(x.antipode()))
    }

    pub fn constant(c: SpherePoint) -> Self {
        Self::new(format!("constant {:?}", c.coords()), c.dim(), move |_| {
            Ok(c.clone())
        })
    }

    /// θ ↦ mθ on S¹.
    pub fn power(m: i64) -> Self {
        Self::new(format!("theta -> {m}*theta"), 1, move |x| {
            let theta = x.coords()[1].atan2(x.coords()[0]);
            Ok(SpherePoint::from_angle(m as f64 * theta))
        })
    }

    pub fn eval(&self, x: &SpherePoint) -> Result<SpherePoint> {
        if x.dim() != self.dim_n {
            return Err(Error::DimensionMismatch {
                expected: self.dim_n,
                found: x.dim(),
            });
        }
        (self.f)(x).map_err(|e| match e {
            Error::UndefinedAtProfile { .. } | Error::NearZeroVector { .. } => {
                Error::UndefinedAtPoint {
                    map: self.provenance.clone(),
                    locations: vec![x.coords().to_vec()],
                }
            }
            other => other,
        })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SphereSelfMap) -> SphereSelfMap {
        let (outer, inner_map) = (self.clone(), inner.clone());
        Self::new(
            format!("({}) o ({})", self.provenance, inner.provenance),
            self.dim_n,
            move |x| outer.eval(&inner_map.eval(x)?),
        )
    }
}

/// f_{i,j} = f ∘ δ^{(k)}_{i,j}.
pub fn restrict_pair(rule: &AggregationRule, i: usize, j: usize) -> Result<SphereSelfMap> {
    let probe = SpherePoint::basepoint(rule.dim_n);
    twin_embedding(rule.k, i, j, &probe)?;
    let r = rule.clone();
    Ok(SphereSelfMap::new(
        format!("f_{{{i},{j}}} of {}", rule.name),
        rule.dim_n,
        move |x| r.evaluate(&twin_embedding(r.k, i, j, x)?),
    ))
}

/// f_α: voter α varies, everyone else sits at e₁.
pub fn restrict_coordinate(rule: &AggregationRule, alpha: usize) -> Result<SphereSelfMap> {
    check_index(alpha, rule.k)?;
    let r = rule.clone();
    Ok(SphereSelfMap::new(
        format!("f_{alpha} of {}", rule.name),
        rule.dim_n,
        move |x| r.evaluate(&coordinate_embedding(r.k, alpha, x)?),
    ))
}

/// x ↦ f(x, …, x).
pub fn diagonal(rule: &AggregationRule) -> SphereSelfMap {
    let r = rule.clone();
    SphereSelfMap::new(format!("diagonal of {}", rule.name), rule.dim_n, move |x| {
        r.evaluate(&Profile::new(vec![x.clone(); r.k])?)
    })
}

type Generator = dyn Fn(usize) -> Result<AggregationRule> + Send + Sync;

/// Rules f^{(k)} indexed by the number of voters.
#[derive(Clone)]
pub struct RuleFamily {
    pub name: String,
    pub dim_n: usize,
    pub k_min: usize,
    generator: Arc<Generator>,
}

impl fmt::Debug for RuleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RuleFamily")
            .field("name", &self.name)
            .field("dim_n", &self.dim_n)
            .field("k_min", &self.k_min)
            .finish_non_exhaustive()
    }
}

impl RuleFamily {
    pub fn new<F>(name: impl Into<String>, dim_n: usize, k_min: usize, generator: F) -> Self
    where
        F: Fn(usize) -> Result<AggregationRule> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dim_n,
            k_min: k_min.max(2),
            generator: Arc::new(generator),
        }
    }

    /// The family k ↦ builtin on k voters.
    pub fn from_builtin(builtin: Builtin, dim_n: usize) -> Result<Self> {
        let k_min = builtin.min_k().max(2);
        make_builtin(builtin.clone(), k_min, dim_n)?;
        let name = format!("{}-family", builtin.display_name());
        Ok(Self::new(name, dim_n, k_min, move |k| {
            make_builtin(builtin.clone(), k, dim_n)
        }))
    }

    /// f^{(k)}.
    pub fn rule(&self, k: usize) -> Result<AggregationRule> {
        if k < self.k_min {
            return Err(Error::BadK { k, min: self.k_min });
        }
        let rule = (self.generator)(k)?;
        if rule.k != k || rule.dim_n != self.dim_n {
            return Err(Error::BadParams(format!(
                "family `{}` produced a rule for k={} on S^{} when asked for k={k} on S^{}",
                self.name, rule.k, rule.dim_n, self.dim_n
            )));
        }
        Ok(rule)
    }
}

/// Serializable rule description used by configs: `{"name", "k", "dim_n", "params"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub name: String,
    pub k: usize,
    pub dim_n: usize,
    #[serde(default = "empty_object")]
    pub params: Value,
}

fn empty_object() -> Value {
    Value::Object(Map::new())
}

impl RuleSpec {
    pub fn builtin(&self) -> Result<Builtin> {
        let params = match &self.params {
            Value::Object(m) => m.clone(),
            Value::Null => Map::new(),
            other => {
                return Err(Error::BadParams(format!(
                    "params must be an object, got {other}"
                )))
            }
        };
        let uint = |key: &str, default: Option<usize>| -> Result<usize> {
            match params.get(key) {
                Some(v) => v.as_u64().map(|u| u as usize).ok_or_else(|| {
                    Error::BadParams(format!("`{key}` must be a non-negative integer"))
                }),
                None => default.ok_or_else(|| Error::BadParams(format!("missing `{key}`"))),
            }
        };
        let real = |key: &str, default: f64| -> Result<f64> {
            match params.get(key) {
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| Error::BadParams(format!("`{key}` must be a number"))),
                None => Ok(default),
            }
        };
        Ok(match self.name.as_str() {
            "dictator" => Builtin::Dictator {
                winner: uint("winner", Some(1))?,
            },
            "rotated_dictator" => Builtin::RotatedDictator {
                winner: uint("winner", Some(1))?,
                angle: real("angle", 0.0)?,
            },
            "constant" => {
                let c = match params.get("c") {
                    Some(v) => {
                        let coords: Vec<f64> = serde_json::from_value(v.clone())
                            .map_err(|e| Error::BadParams(format!("`c`: {e}")))?;
                        SpherePoint::new(coords)?
                    }
                    None => SpherePoint::basepoint(self.dim_n),
                };
                Builtin::Constant { c }
            }
            "normalized_mean" => Builtin::NormalizedMean,
            "antagonistic_mean" => Builtin::AntagonisticMean,
            "karcher_mean" => Builtin::KarcherMean {
                max_iter: uint("max_iter", Some(200))?,
                step_tol: real("step_tol", 1e-10)?,
            },
            other => return Err(Error::BadParams(format!("unknown rule `{other}`"))),
        })
    }

    pub fn to_rule(&self) -> Result<AggregationRule> {
        make_builtin(self.builtin()?, self.k, self.dim_n)
    }

    /// The family generated by this record's builtin; `k` is ignored.
    pub fn to_family(&self) -> Result<RuleFamily> {
        RuleFamily::from_builtin(self.builtin()?, self.dim_n)
    }
}

/// Norm of the voters' vector sum, exposed for diagnostics.
pub fn sum_norm(p: &Profile) -> f64 {
    norm(&p.vector_sum())
}

/// True when the vector sum is too short to normalize.
pub fn sum_vanishes(p: &Profile) -> bool {
    sum_norm(p) <= ZERO_NORM
}
