//! Spherical geometry on S^n ⊂ ℝ^{n+1}.
//!
//! Points are stored as unit vectors. Distances are great-circle lengths
//! d(x, y) = arccos(x·y), evaluated as 2·atan2(‖x − y‖, ‖x + y‖), which is
//! the same function on unit vectors but keeps full precision near 0 and π.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation of `‖x‖` from 1 for a valid point.
pub const UNIT_TOL: f64 = 1e-9;
/// Vectors with norm at or below this cannot be normalized.
pub const ZERO_NORM: f64 = 1e-12;
/// Two points closer than this (geodesically) are the same point; also the
/// antipode tolerance of the chord homotopy.
pub const POINT_TOL: f64 = 1e-9;

/// A unit vector in ℝ^{n+1}, i.e. a point of S^n.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl fmt::Debug for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S^{}{:?}", self.dim(), self.coords)
    }
}

impl TryFrom<Vec<f64>> for SpherePoint {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        SpherePoint::new(coords)
    }
}

impl From<SpherePoint> for Vec<f64> {
    fn from(p: SpherePoint) -> Self {
        p.coords
    }
}

impl SpherePoint {
    /// Validates `coords` as a point of S^n with n = `coords.len() - 1 ≥ 1`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::UnsupportedDimension {
                n: coords.len().saturating_sub(1),
                reason: "spheres start at S^1".into(),
            });
        }
        let norm = norm(&coords);
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self { coords })
    }

    /// Caller guarantees unit norm (up to rounding).
    pub(crate) fn from_unit(coords: Vec<f64>) -> Self {
        debug_assert!((norm(&coords) - 1.0).abs() <= UNIT_TOL, "{coords:?}");
        Self { coords }
    }

    /// The basepoint e₁ = (1, 0, …, 0) of S^n.
    pub fn basepoint(n: usize) -> Self {
        Self::axis(n, 0)
    }

    /// The standard basis vector e_{axis+1} of ℝ^{n+1} (axis is 0-based).
    pub fn axis(n: usize, axis: usize) -> Self {
        assert!(axis <= n, "axis {axis} out of range for S^{n}");
        let mut coords = vec![0.0; n + 1];
        coords[axis] = 1.0;
        Self { coords }
    }

    /// The point (cos θ, sin θ) of S¹.
    pub fn from_angle(theta: f64) -> Self {
        Self {
            coords: vec![theta.cos(), theta.sin()],
        }
    }

    /// Angle in [0, 2π) of a point of S¹; `None` for n ≠ 1.
    pub fn angle(&self) -> Option<f64> {
        if self.dim() != 1 {
            return None;
        }
        let a = self.coords[1].atan2(self.coords[0]);
        let a = if a < 0.0 { a + TAU } else { a };
        Some(if a >= TAU { 0.0 } else { a })
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        dot(&self.coords, &other.coords)
    }

    /// Great-circle distance; both points must live on the same sphere.
    pub(crate) fn dist(&self, other: &SpherePoint) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let (mut diff, mut sum) = (0.0, 0.0);
        for (a, b) in self.coords.iter().zip(&other.coords) {
            diff += (a - b) * (a - b);
            sum += (a + b) * (a + b);
        }
        2.0 * diff.sqrt().atan2(sum.sqrt())
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    /// Geodesic equality at [`POINT_TOL`].
    pub fn approx_eq(&self, other: &SpherePoint) -> bool {
        self.dim() == other.dim() && self.dist(other) <= POINT_TOL
    }

    /// Riemannian exponential map: follows the geodesic from `self` with
    /// initial velocity `v` (assumed tangent at `self`).
    pub fn exp(&self, v: &[f64]) -> SpherePoint {
        let len = norm(v);
        if len == 0.0 {
            return self.clone();
        }
        let (s, c) = len.sin_cos();
        let raw: Vec<f64> = self
            .coords
            .iter()
            .zip(v)
            .map(|(x, vi)| c * x + s * vi / len)
            .collect();
        let n = norm(&raw);
        SpherePoint::from_unit(raw.into_iter().map(|c| c / n).collect())
    }

    /// Inverse exponential map. `None` when `y` is (numerically) the
    /// antipode of `self`, where the tangent direction is not unique.
    pub fn log(&self, y: &SpherePoint) -> Option<Vec<f64>> {
        let cos = self.dot(y);
        let perp: Vec<f64> = y
            .coords
            .iter()
            .zip(&self.coords)
            .map(|(yi, xi)| yi - cos * xi)
            .collect();
        let sin = norm(&perp);
        let theta = sin.atan2(cos);
        if sin <= ZERO_NORM {
            return if cos > 0.0 {
                Some(vec![0.0; self.coords.len()])
            } else {
                None
            };
        }
        Some(perp.into_iter().map(|p| p * theta / sin).collect())
    }

    /// Orthonormal basis of the tangent space at `self` (n vectors).
    pub fn tangent_basis(&self) -> Vec<Vec<f64>> {
        let m = self.coords.len();
        // drop the coordinate axis most aligned with the point
        let skip = (0..m)
            .max_by(|&a, &b| self.coords[a].abs().total_cmp(&self.coords[b].abs()))
            .unwrap_or(0);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
        for axis in (0..m).filter(|&a| a != skip) {
            let mut v = vec![0.0; m];
            v[axis] = 1.0;
            for _ in 0..2 {
                let p = dot(&v, &self.coords);
                axpy(&mut v, -p, &self.coords);
                for b in &basis {
                    let p = dot(&v, b);
                    axpy(&mut v, -p, b);
                }
            }
            let n = norm(&v);
            v.iter_mut().for_each(|c| *c /= n);
            basis.push(v);
        }
        basis
    }

    /// Rotation by `angle` in the (1,2)-coordinate plane.
    pub fn rotate_12(&self, angle: f64) -> SpherePoint {
        let (s, c) = angle.sin_cos();
        let mut coords = self.coords.clone();
        coords[0] = c * self.coords[0] - s * self.coords[1];
        coords[1] = s * self.coords[0] + c * self.coords[1];
        SpherePoint { coords }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

/// d(x, y) = arccos(x·y), in [0, π].
///
/// Agrees with the clamped arccos of the dot product to rounding.
pub fn geodesic_distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(x.dist(y))
}

/// Scales a nonzero vector onto the unit sphere.
pub fn normalize(v: &[f64]) -> Result<SpherePoint> {
    let n = norm(v);
    if n.is_nan() || n <= ZERO_NORM {
        return Err(Error::NearZeroVector { norm: n });
    }
    if v.len() < 2 {
        return Err(Error::UnsupportedDimension {
            n: v.len().saturating_sub(1),
            reason: "spheres start at S^1".into(),
        });
    }
    Ok(SpherePoint::from_unit(v.iter().map(|c| c / n).collect()))
}

pub fn antipode(x: &SpherePoint) -> SpherePoint {
    x.antipode()
}

/// h(t, x) = (t·g(x) + (1−t)·x) / ‖t·g(x) + (1−t)·x‖, the straight-line
/// homotopy from the identity (t = 0) to g (t = 1).
pub fn chord_homotopy(t: f64, x: &SpherePoint, gx: &SpherePoint) -> Result<SpherePoint> {
    geodesic_distance(x, gx)?;
    if gx.dist(&x.antipode()) <= POINT_TOL {
        return Err(Error::AntipodalPair);
    }
    if t == 0.0 {
        return Ok(x.clone());
    }
    if t == 1.0 {
        return Ok(gx.clone());
    }
    let v: Vec<f64> = x
        .coords
        .iter()
        .zip(&gx.coords)
        .map(|(xi, gi)| t * gi + (1.0 - t) * xi)
        .collect();
    normalize(&v)
}

/// An angle in radians; serialized as `{"rad": r, "deg": d}` with the degree
/// value redundant (it is recomputed, never read back).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(into = "AngleRepr", from = "AngleRepr")]
pub struct Angle(pub f64);

#[derive(Serialize, Deserialize)]
struct AngleRepr {
    rad: f64,
    #[serde(default, skip_deserializing)]
    deg: f64,
}

impl From<Angle> for AngleRepr {
    fn from(a: Angle) -> Self {
        AngleRepr {
            rad: a.0,
            deg: a.0.to_degrees(),
        }
    }
}

impl From<AngleRepr> for Angle {
    fn from(r: AngleRepr) -> Self {
        Angle(r.rad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetKind {
    CircleGrid,
    FibonacciS2,
    UniformRandom,
}

/// A finite sample of S^n with a covering radius `mesh`: every point of the
/// sphere lies within `mesh` (geodesically) of some net point.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleNet {
    pub points: Vec<SpherePoint>,
    pub mesh: f64,
    pub kind: NetKind,
    pub seed: Option<u64>,
}

/// Serializable summary of a net (the points themselves are reproducible).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetDescriptor {
    pub kind: NetKind,
    pub size: usize,
    pub dim_n: usize,
    pub mesh: f64,
    pub seed: Option<u64>,
}

impl SampleNet {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, SpherePoint::dim)
    }

    pub fn descriptor(&self) -> NetDescriptor {
        NetDescriptor {
            kind: self.kind,
            size: self.points.len(),
            dim_n: self.dim(),
            mesh: self.mesh,
            seed: self.seed,
        }
    }
}

/// Builds a deterministic sample net.
///
/// `circle_grid` puts `size` points at angles 2πt/size on S¹ (mesh π/size).
/// `fibonacci_s2` is the spiral lattice on S² with the conservative mesh
/// 2·√(4π/size). `uniform_random` normalizes seeded standard normals; it
/// carries no covering guarantee, so its mesh is the trivial bound π.
pub fn build_net(dim_n: usize, size: usize, kind: NetKind, seed: Option<u64>) -> Result<SampleNet> {
    if size == 0 {
        return Err(Error::BadParams("net size must be positive".into()));
    }
    let (points, mesh) = match kind {
        NetKind::CircleGrid => {
            if dim_n != 1 {
                return Err(Error::UnsupportedDimension {
                    n: dim_n,
                    reason: "circle_grid nets live on S^1".into(),
                });
            }
            let pts = (0..size)
                .map(|t| SpherePoint::from_angle(TAU * t as f64 / size as f64))
                .collect();
            (pts, PI / size as f64)
        }
        NetKind::FibonacciS2 => {
            if dim_n != 2 {
                return Err(Error::UnsupportedDimension {
                    n: dim_n,
                    reason: "fibonacci_s2 nets live on S^2".into(),
                });
            }
            let golden = PI * (3.0 - 5f64.sqrt());
            let pts = (0..size)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / size as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    let v = [r * phi.cos(), r * phi.sin(), z];
                    let n = norm(&v);
                    SpherePoint::from_unit(v.iter().map(|c| c / n).collect())
                })
                .collect();
            (pts, (2.0 * (4.0 * PI / size as f64).sqrt()).min(PI))
        }
        NetKind::UniformRandom => {
            if dim_n == 0 {
                return Err(Error::UnsupportedDimension {
                    n: 0,
                    reason: "spheres start at S^1".into(),
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
            let pts = (0..size).map(|_| random_point(dim_n, &mut rng)).collect();
            (pts, PI)
        }
    };
    Ok(SampleNet {
        points,
        mesh,
        kind,
        seed,
    })
}

/// The structured net for S¹/S², or a seeded random one otherwise.
pub fn default_net(dim_n: usize, size: usize, seed: u64) -> Result<SampleNet> {
    match dim_n {
        1 => build_net(1, size, NetKind::CircleGrid, None),
        2 => build_net(2, size, NetKind::FibonacciS2, None),
        n => build_net(n, size, NetKind::UniformRandom, Some(seed)),
    }
}

/// Rotation-invariant random point on S^n.
pub fn random_point<R: rand::Rng + ?Sized>(dim_n: usize, rng: &mut R) -> SpherePoint {
    loop {
        let v: Vec<f64> = (0..=dim_n).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(p) = normalize(&v) {
            return p;
        }
    }
}
