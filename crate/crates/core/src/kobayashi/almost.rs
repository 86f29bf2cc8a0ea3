//! Almost-geodesic certification, geodesic production, and the visibility
//! probe.
//!
//! A curve σ is a (λ,κ)-almost-geodesic when (1) |t−s|/λ − κ ≤ K(σ(s),σ(t))
//! ≤ λ|t−s| + κ for all parameter pairs and (2) its speed in the metric is
//! at most λe^κ almost everywhere. The checks run at bracket resolution: a
//! pair passes when its distance bracket intersects the allowed interval.

use serde::{Deserialize, Serialize};

use crate::domains::{ComplexPoint, DomainSpec};
use crate::error::{Error, Result};

use super::path::{distance_lower, distance_solve, segment_bracket, PathCurve};
use super::{metric_domain, pull_back_point, DistanceParams, MetricDomain};

/// Outcome of an almost-geodesic verification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlmostGeodesicCheck {
    pub ok: bool,
    /// Max signed excess over all checks; ≤ 0 means every check passed.
    pub worst_violation: f64,
}

/// Reusable per-path data: segment brackets and prefix sums of length uppers.
pub(crate) struct PathAnalysis {
    domain: DomainSpec,
    path: PathCurve,
    prefix_upper: Vec<f64>,
    seg_speed_upper: Vec<f64>,
    pair_stride: usize,
}

pub(crate) fn analyze_path(
    domain: &DomainSpec,
    path: &PathCurve,
    params: &DistanceParams,
) -> Result<PathAnalysis> {
    let solved = match metric_domain(domain)? {
        MetricDomain::Direct(d) => d,
        MetricDomain::ViaCayley { ball } => ball,
    };
    let pts: Result<Vec<ComplexPoint>> = path
        .points
        .iter()
        .map(|p| pull_back_point(domain, p))
        .collect();
    let solved_path = PathCurve {
        times: path.times.clone(),
        points: pts?,
    };
    solved_path.validate_inside(&solved)?;
    let n = solved_path.len();
    let mut prefix_upper = vec![0.0; n];
    let mut seg_speed_upper = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n - 1 {
        let p = &solved_path.points[i];
        let q = &solved_path.points[i + 1];
        let dt = solved_path.times[i + 1] - solved_path.times[i];
        let seg = segment_bracket(&solved, p, q, params)?;
        prefix_upper[i + 1] = prefix_upper[i] + seg.upper;
        // finite-difference velocity (q−p)/dt scales the segment bracket
        seg_speed_upper.push(seg.upper / dt);
    }
    let pair_stride = ((n as f64) / 40.0).ceil() as usize;
    Ok(PathAnalysis {
        domain: solved,
        path: solved_path,
        prefix_upper,
        seg_speed_upper,
        pair_stride: pair_stride.max(1),
    })
}

pub(crate) fn check_almost_geodesic(
    analysis: &PathAnalysis,
    lambda: f64,
    kappa: f64,
) -> AlmostGeodesicCheck {
    let mut worst = f64::NEG_INFINITY;
    let n = analysis.path.len();
    if n == 1 {
        return AlmostGeodesicCheck {
            ok: true,
            worst_violation: 0.0,
        };
    }
    // condition (2): speed bound
    let speed_cap = lambda * kappa.exp();
    for &s in &analysis.seg_speed_upper {
        worst = worst.max(s - speed_cap);
    }
    // condition (1): sampled parameter pairs at bracket resolution
    let idx: Vec<usize> = (0..n).step_by(analysis.pair_stride).chain([n - 1]).collect();
    for (a, &i) in idx.iter().enumerate() {
        for &j in idx.iter().skip(a + 1) {
            if i == j {
                continue;
            }
            let gap = (analysis.path.times[j] - analysis.path.times[i]).abs();
            let pi = &analysis.path.points[i];
            let pj = &analysis.path.points[j];
            let along = analysis.prefix_upper[j] - analysis.prefix_upper[i];
            let chord = super::path::quick_upper_distance(&analysis.domain, pi, pj)
                .unwrap_or(f64::INFINITY);
            let upper = along.min(chord);
            let lower = distance_lower(&analysis.domain, pi, pj);
            // need K ≥ gap/λ − κ: genuine failure when even the upper misses
            worst = worst.max((gap / lambda - kappa) - upper);
            // need K ≤ λ·gap + κ: genuine failure when even the lower exceeds
            worst = worst.max(lower - (lambda * gap + kappa));
        }
    }
    AlmostGeodesicCheck {
        ok: worst <= 1e-9,
        worst_violation: worst,
    }
}

/// Verifies the (λ,κ)-almost-geodesic conditions on a sampled path.
pub fn verify_almost_geodesic(
    domain: &DomainSpec,
    path: &PathCurve,
    lambda: f64,
    kappa: f64,
    params: &DistanceParams,
) -> Result<AlmostGeodesicCheck> {
    if lambda < 1.0 || kappa < 0.0 {
        return Err(Error::argument("need λ ≥ 1 and κ ≥ 0"));
    }
    let analysis = analyze_path(domain, path, params)?;
    Ok(check_almost_geodesic(&analysis, lambda, kappa))
}

const KAPPA_GRID: [f64; 5] = [0.01, 0.05, 0.1, 0.5, 1.0];
const CERT_LAMBDA: f64 = 1.05;

/// Refined minimizing path between two points, reparameterized by
/// accumulated length, with the smallest grid κ certifying it at λ = 1.05.
pub fn geodesic_path(
    domain: &DomainSpec,
    z: &ComplexPoint,
    w: &ComplexPoint,
    params: &DistanceParams,
) -> Result<(PathCurve, (f64, f64))> {
    let solve = distance_solve(domain, z, w, params)?;
    // The solve runs in pulled-back (bounded) coordinates; push the polygon
    // back to the caller's domain when the query came through Cayley.
    let polygon: Vec<ComplexPoint> = match metric_domain(domain)? {
        MetricDomain::Direct(_) => solve.polygon,
        MetricDomain::ViaCayley { .. } => solve
            .polygon
            .iter()
            .map(crate::domains::cayley)
            .collect::<Result<_>>()?,
    };
    if polygon.len() == 1 {
        let path = PathCurve::new(vec![0.0], vec![polygon[0].clone()])?;
        return Ok((path, (CERT_LAMBDA, KAPPA_GRID[0])));
    }
    // times = accumulated estimated length (unit speed in the estimate)
    let mut times = Vec::with_capacity(polygon.len());
    times.push(0.0);
    let mut acc = 0.0;
    for (i, seg) in solve.seg_brackets.iter().enumerate() {
        // degenerate segments get a tiny positive slot to keep times strict
        acc += seg.estimate.max(1e-12 * (1.0 + i as f64));
        times.push(acc);
    }
    let path = PathCurve::new(times, polygon)?;
    let analysis = analyze_path(domain, &path, params)?;
    for kappa in KAPPA_GRID {
        let check = check_almost_geodesic(&analysis, CERT_LAMBDA, kappa);
        if check.ok {
            return Ok((path, (CERT_LAMBDA, kappa)));
        }
    }
    let check = check_almost_geodesic(&analysis, CERT_LAMBDA, 1.0);
    Err(Error::search(format!(
        "no κ ≤ 1 certifies the refined path at λ = {CERT_LAMBDA}; worst violation {:.3e}",
        check.worst_violation
    )))
}

/// Level statistics of the visibility probe.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VisibilityReport {
    /// Per-level min distance (upper estimate) from the base point to the
    /// refined geodesic between the two inward-pushed boundary points.
    pub levels: Vec<f64>,
    pub pass: bool,
}

/// Probes the visibility property: geodesics between interior points
/// converging to two distinct boundary points must pass uniformly close to
/// the base point. PASS rule: the statistic stays bounded across levels
/// (max ≤ level-3 value + 1).
pub fn visibility_probe(
    domain: &DomainSpec,
    x: &ComplexPoint,
    y: &ComplexPoint,
    n_levels: usize,
    z0: &ComplexPoint,
    params: &DistanceParams,
) -> Result<VisibilityReport> {
    if x.dist(y) < 1e-9 {
        return Err(Error::argument("visibility probe needs distinct boundary points"));
    }
    for p in [x, y] {
        if domain.defining_function(p)?.value.abs() > 1e-6 {
            return Err(Error::precondition("probe anchors must lie on the boundary"));
        }
    }
    let inward = |p: &ComplexPoint, depth: f64| -> Result<ComplexPoint> {
        let g = domain.defining_function(p)?.gradient;
        let gn = g.norm();
        if gn < 1e-12 {
            return Err(Error::numeric("degenerate boundary gradient"));
        }
        // real inward normal is −conj(∂r)/|∂r|
        let dir = ComplexPoint::new(g.coords().iter().map(|c| -c.conj() / gn).collect())?;
        let mut t = depth;
        for _ in 0..60 {
            let cand = p.add(&dir.scale_re(t));
            if domain.contains(&cand)? {
                return Ok(cand);
            }
            t *= 0.5;
        }
        Err(Error::numeric("could not step inside from the boundary"))
    };
    let mut levels = Vec::with_capacity(n_levels);
    for n in 1..=n_levels {
        let depth = 0.5f64.powi(n as i32);
        let zn = inward(x, depth)?;
        let wn = inward(y, depth)?;
        let (path, _) = geodesic_path(domain, &zn, &wn, params)?;
        let mut stat = f64::INFINITY;
        for p in &path.points {
            let d = super::path::quick_upper_distance(domain, z0, p)?;
            stat = stat.min(d);
        }
        levels.push(stat);
    }
    let reference = levels[(2).min(levels.len() - 1)] + 1.0;
    let pass = levels.iter().all(|&s| s <= reference);
    Ok(VisibilityReport { levels, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kobayashi::DistanceParams;

    fn pt(re: &[f64]) -> ComplexPoint {
        ComplexPoint::from_reals(re)
    }

    #[test]
    fn unit_speed_radial_geodesic_verifies() {
        let b1 = DomainSpec::ball(1);
        let n = 64;
        let t_max = 0.9f64.atanh();
        let times: Vec<f64> = (0..=n).map(|i| t_max * i as f64 / n as f64).collect();
        let points: Vec<ComplexPoint> = times.iter().map(|&t| pt(&[t.tanh()])).collect();
        let path = PathCurve::new(times, points).unwrap();
        let check =
            verify_almost_geodesic(&b1, &path, 1.0, 0.05, &DistanceParams::default()).unwrap();
        assert!(check.ok, "violation {:.3e}", check.worst_violation);
    }

    #[test]
    fn constant_path_inside_slack_verifies() {
        let b1 = DomainSpec::ball(1);
        let kappa = 0.2;
        let path = PathCurve::new(
            vec![0.0, kappa / 2.0, kappa],
            vec![pt(&[0.1]), pt(&[0.1]), pt(&[0.1])],
        )
        .unwrap();
        let check =
            verify_almost_geodesic(&b1, &path, 1.0, kappa, &DistanceParams::default()).unwrap();
        assert!(check.ok);
    }

    #[test]
    fn backtracking_path_fails_the_lower_bound() {
        let b1 = DomainSpec::ball(1);
        // Out to Kobayashi radius κ and straight back: the endpoints pair
        // violates K ≥ span/λ − κ.
        let kappa = 0.1;
        let lambda = 1.0;
        let span = 4.0 * lambda * kappa;
        let n = 32;
        let times: Vec<f64> = (0..=n).map(|i| span * i as f64 / n as f64).collect();
        let points: Vec<ComplexPoint> = times
            .iter()
            .map(|&t| {
                let s = if t <= span / 2.0 { t } else { span - t };
                pt(&[s.tanh()])
            })
            .collect();
        let path = PathCurve::new(times, points).unwrap();
        let check =
            verify_almost_geodesic(&b1, &path, lambda, kappa, &DistanceParams::default()).unwrap();
        assert!(!check.ok, "backtracking path must fail");
        assert!(check.worst_violation > 0.0);
    }

    #[test]
    fn geodesic_path_examples() {
        let b1 = DomainSpec::ball(1);
        let params = DistanceParams::default();
        let (path, (lambda, kappa)) = geodesic_path(&b1, &pt(&[0.0]), &pt(&[0.9]), &params).unwrap();
        assert!(lambda <= 1.05 && kappa <= 0.05, "certificate ({lambda}, {kappa})");
        // the refined path hugs the real axis
        for p in &path.points {
            assert!(p.coord(0).im.abs() < 1e-6);
        }
        // single-point path
        let (p, (_, kappa)) = geodesic_path(&b1, &pt(&[0.3]), &pt(&[0.3]), &params).unwrap();
        assert_eq!(p.len(), 1);
        assert!(kappa <= 0.01 + 1e-15);
    }

    #[test]
    fn ball2_geodesic_stays_near_the_slice_oracle() {
        // Endpoints on a complex line through 0: the slice geodesic is the
        // straight segment between them.
        let b2 = DomainSpec::ball(2);
        let a = 0.7 / 2f64.sqrt();
        let z = pt(&[-a, -a]);
        let w = pt(&[a, a]);
        let (path, _) = geodesic_path(&b2, &z, &w, &DistanceParams::default()).unwrap();
        for p in &path.points {
            // distance from the line x ↦ (x, x)
            let dev = (p.coord(0) - p.coord(1)).norm() / 2f64.sqrt();
            assert!(dev < 1e-2, "deviation {dev}");
        }
    }

    #[test]
    fn visibility_probe_on_disc_diameter() {
        let b1 = DomainSpec::ball(1);
        let mut params = DistanceParams::default();
        params.segments = 32;
        params.rounds = 2;
        let report = visibility_probe(
            &b1,
            &pt(&[1.0]),
            &pt(&[-1.0]),
            4,
            &ComplexPoint::origin(1),
            &params,
        )
        .unwrap();
        assert!(report.pass);
        // the diameter passes through the base point
        assert!(report.levels.iter().all(|&s| s < 0.5), "{:?}", report.levels);
    }

    #[test]
    fn visibility_probe_rejects_equal_anchors() {
        let b1 = DomainSpec::ball(1);
        assert!(visibility_probe(
            &b1,
            &pt(&[1.0]),
            &pt(&[1.0]),
            3,
            &ComplexPoint::origin(1),
            &DistanceParams::default()
        )
        .is_err());
    }
}
