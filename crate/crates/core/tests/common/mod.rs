//! Independent re-implementations used as oracles. Nothing here calls the
//! library's geometry or rule evaluation.

#![allow(dead_code)]

use sphere_paradox::conditions::{Condition, ViolationCertificate, ViolationKind};
use sphere_paradox::rules::{Builtin, RuleFamily};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    (n > 1e-12).then(|| v.iter().map(|c| c / n).collect())
}

/// Great-circle distance via half-chord arcsines, switching to the antipode's
/// chord past π/2 so both ends stay well conditioned.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let (d, s) = (norm(&diff), norm(&sum));
    if d <= s {
        2.0 * (d / 2.0).min(1.0).asin()
    } else {
        std::f64::consts::PI - 2.0 * (s / 2.0).min(1.0).asin()
    }
}

fn rotate(x: &[f64], angle: f64) -> Vec<f64> {
    let (s, c) = angle.sin_cos();
    let mut y = x.to_vec();
    y[0] = c * x[0] - s * x[1];
    y[1] = s * x[0] + c * x[1];
    y
}

fn log_at(m: &[f64], x: &[f64]) -> Option<Vec<f64>> {
    let c = dot(m, x);
    let perp: Vec<f64> = x.iter().zip(m).map(|(xi, mi)| xi - c * mi).collect();
    let s = norm(&perp);
    if s < 1e-300 {
        return (c > 0.0).then(|| vec![0.0; m.len()]);
    }
    let theta = dist(m, x);
    Some(perp.iter().map(|p| p * theta / s).collect())
}

fn exp_at(m: &[f64], v: &[f64]) -> Vec<f64> {
    let t = norm(v);
    if t == 0.0 {
        return m.to_vec();
    }
    let raw: Vec<f64> = m
        .iter()
        .zip(v)
        .map(|(mi, vi)| t.cos() * mi + t.sin() * vi / t)
        .collect();
    unit(&raw).unwrap()
}

fn karcher(points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let sum: Vec<f64> = (0..points[0].len())
        .map(|c| points.iter().map(|p| p[c]).sum())
        .collect();
    let mut m = unit(&sum)?;
    let k = points.len() as f64;
    for _ in 0..100_000 {
        let mut g = vec![0.0; m.len()];
        for p in points {
            let l = log_at(&m, p)?;
            g.iter_mut().zip(&l).for_each(|(a, b)| *a += b / k);
        }
        let step = norm(&g);
        m = exp_at(&m, &g);
        if step < 1e-15 {
            break;
        }
    }
    Some(m)
}

/// Outcome of a builtin rule on raw coordinates.
pub fn eval(b: &Builtin, points: &[Vec<f64>]) -> Option<Vec<f64>> {
    let sum: Vec<f64> = (0..points[0].len())
        .map(|c| points.iter().map(|p| p[c]).sum())
        .collect();
    match b {
        Builtin::Dictator { winner } => Some(points[winner - 1].clone()),
        Builtin::RotatedDictator { winner, angle } => Some(rotate(&points[winner - 1], *angle)),
        Builtin::Constant { c } => Some(c.coords().to_vec()),
        Builtin::NormalizedMean => unit(&sum),
        Builtin::AntagonisticMean => unit(&sum).map(|u| u.iter().map(|c| -c).collect()),
        Builtin::KarcherMean { .. } => karcher(points),
    }
}

fn coords(p: &sphere_paradox::rules::Profile) -> Vec<Vec<f64>> {
    p.points().iter().map(|x| x.coords().to_vec()).collect()
}

/// Re-derives a certificate from scratch: profile relation, both outcomes,
/// both distances (to `tol`) and the verdict.
pub fn reverify(cert: &ViolationCertificate, builtin: &Builtin, tol: f64) -> Result<(), String> {
    let before = coords(&cert.before_profile);
    let after = coords(&cert.after_profile);
    let focal = after[cert.focal_voter - 1].clone();
    match cert.condition {
        Condition::Twin => {
            let j = cert
                .partner_voter
                .ok_or("twin certificate without partner")?;
            let mut expected = before.clone();
            expected[j - 1] = before[cert.focal_voter - 1].clone();
            if expected != after {
                return Err("after profile is not the twin move of before".into());
            }
        }
        Condition::Participation => {
            let mut expected = after.clone();
            expected.remove(cert.focal_voter - 1);
            if expected != before {
                return Err("before profile is not the abstention profile".into());
            }
        }
    }
    let out_before = eval(builtin, &before).ok_or("oracle: rule undefined at before profile")?;
    let out_after = eval(builtin, &after).ok_or("oracle: rule undefined at after profile")?;
    let d_before = dist(&out_before, &focal);
    let d_after = dist(&out_after, &focal);
    if (d_before - cert.d_before.0).abs() > tol || (d_after - cert.d_after.0).abs() > tol {
        return Err(format!(
            "distances differ: oracle ({d_before}, {d_after}) vs certificate ({}, {})",
            cert.d_before.0, cert.d_after.0
        ));
    }
    // both conditions demand strict improvement unless the focal voter
    // already sits at the earlier outcome
    let reference = d_before;
    let ok = match cert.kind {
        ViolationKind::Weak => d_after - d_before > tol,
        ViolationKind::Strictness => (d_after - d_before).abs() <= tol && reference > tol,
    };
    if !ok {
        return Err(format!(
            "verdict {:?} not reproduced ({d_before}, {d_after})",
            cert.kind
        ));
    }
    Ok(())
}

pub fn family_builtin(family: &RuleFamily) -> Builtin {
    family.rule(3).unwrap().builtin().unwrap().clone()
}
