//! Curves, lengths, and the Kobayashi pseudo-distance.
//!
//! The distance upper bound is the length of a piecewise-linear path refined
//! by node-wise pattern search against a cheap certified integrand (affine
//! discs), then integrated with the full disc optimizer. The lower bound is
//! the best disc-Poincaré distance over a library of holomorphic maps Ω → D:
//! coordinate projections and supporting half-space charts.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::domains::{ComplexPoint, DomainSpec};
use crate::error::{Error, Result};

use super::metric::{cheap_upper_unit, infinitesimal_metric};
use super::{metric_domain, pull_back_point, DistanceParams, MetricBracket, MetricDomain};

/// A discretized absolutely continuous curve with time stamps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathCurve {
    pub times: Vec<f64>,
    pub points: Vec<ComplexPoint>,
}

impl PathCurve {
    pub fn new(times: Vec<f64>, points: Vec<ComplexPoint>) -> Result<Self> {
        if times.len() != points.len() || times.is_empty() {
            return Err(Error::argument("times and points must match and be nonempty"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::argument("times must be strictly increasing"));
        }
        Ok(PathCurve { times, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn span(&self) -> f64 {
        self.times.last().unwrap() - self.times[0]
    }

    /// All points and segment midpoints inside the domain.
    pub fn validate_inside(&self, domain: &DomainSpec) -> Result<()> {
        for p in &self.points {
            if !domain.contains(p)? {
                return Err(Error::precondition("path exits the domain"));
            }
        }
        for w in self.points.windows(2) {
            let mid = w[0].add(&w[1]).scale_re(0.5);
            if !domain.contains(&mid)? {
                return Err(Error::precondition("path segment midpoint leaves the domain"));
            }
        }
        Ok(())
    }
}

/// Cheap certified upper bound for the metric with non-unit velocity.
pub(crate) fn cheap_metric(domain: &DomainSpec, z: &ComplexPoint, v: &ComplexPoint) -> f64 {
    let n = v.norm();
    if n == 0.0 {
        return 0.0;
    }
    n * cheap_upper_unit(domain, z, &v.scale_re(1.0 / n))
}

/// Cheap upper bound for the length of the straight segment [p, q]
/// subdivided `pieces` times; infinite if the chord leaves the domain.
fn chord_upper(domain: &DomainSpec, p: &ComplexPoint, q: &ComplexPoint, pieces: usize) -> f64 {
    let delta = q.sub(p);
    if delta.norm() == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for j in 0..pieces {
        let t0 = j as f64 / pieces as f64;
        let t1 = (j + 1) as f64 / pieces as f64;
        let mid = p.add(&delta.scale_re(0.5 * (t0 + t1)));
        match domain.contains(&mid) {
            Ok(true) => total += cheap_metric(domain, &mid, &delta.scale_re(t1 - t0)),
            _ => return f64::INFINITY,
        }
    }
    total
}

/// Certified lower bound for K(z, w) from the projection library alone.
pub fn distance_lower_bound(
    domain: &DomainSpec,
    z: &ComplexPoint,
    w: &ComplexPoint,
) -> Result<f64> {
    let solved = match metric_domain(domain)? {
        MetricDomain::Direct(d) => d,
        MetricDomain::ViaCayley { ball } => ball,
    };
    let zb = pull_back_point(domain, z)?;
    let wb = pull_back_point(domain, w)?;
    Ok(distance_lower(&solved, &zb, &wb))
}

/// Quick certified distance upper bound via chord integration (both points
/// must be interior; works on bounded kinds and the Siegel model).
pub fn quick_upper_distance(
    domain: &DomainSpec,
    z: &ComplexPoint,
    w: &ComplexPoint,
) -> Result<f64> {
    let solved = match metric_domain(domain)? {
        MetricDomain::Direct(d) => d,
        MetricDomain::ViaCayley { ball } => ball,
    };
    let zb = pull_back_point(domain, z)?;
    let wb = pull_back_point(domain, w)?;
    Ok(chord_upper(&solved, &zb, &wb, 16))
}

/// Best projection-library lower bound for K(z, w).
pub(crate) fn distance_lower(domain: &DomainSpec, z: &ComplexPoint, w: &ComplexPoint) -> f64 {
    let d = domain.dim();
    let mut best: f64 = 0.0;
    // Coordinate projections: ρ_D(z_i, w_i).
    for i in 0..d {
        let (a, b) = (z.coord(i), w.coord(i));
        if a.norm() < 1.0 && b.norm() < 1.0 {
            let m = (a - b) / (C64::new(1.0, 0.0) - a.conj() * b);
            let r = m.norm();
            if r < 1.0 {
                best = best.max(r.atanh());
            }
        }
    }
    // Supporting half-space charts anchored at projections of z, w, midpoint.
    let mid = z.add(w).scale_re(0.5);
    for anchor in [z, w, &mid] {
        let xstar = match domain.boundary_project(anchor) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let grad = match domain.defining_function(&xstar) {
            Ok(v) => v.gradient,
            Err(_) => continue,
        };
        let lam = |p: &ComplexPoint| -> C64 {
            p.coords()
                .iter()
                .zip(grad.coords())
                .map(|(a, b)| a * b)
                .sum()
        };
        let b_level = lam(&xstar).re;
        let (uz, uw) = (lam(z), lam(w));
        if uz.re >= b_level || uw.re >= b_level {
            continue;
        }
        // Disc chart of the half-space {Re u < b}: ψ(u) = (u − u_z)/(u + ū_z − 2b).
        let den = uw + uz.conj() - C64::new(2.0 * b_level, 0.0);
        if den.norm() < 1e-300 {
            continue;
        }
        let r = ((uw - uz) / den).norm();
        if r < 1.0 {
            best = best.max(r.atanh());
        }
    }
    best
}

/// ℓ_Ω(σ) = ∫ k_Ω(σ(t); σ′(t)) dt by composite midpoint quadrature of the
/// certified metric brackets over the path's segments.
pub fn path_length(
    domain: &DomainSpec,
    path: &PathCurve,
    params: &DistanceParams,
) -> Result<MetricBracket> {
    let solved = match metric_domain(domain)? {
        MetricDomain::Direct(d) => d,
        MetricDomain::ViaCayley { ball } => ball,
    };
    let pts: Result<Vec<ComplexPoint>> = path
        .points
        .iter()
        .map(|p| pull_back_point(domain, p))
        .collect();
    let pts = pts?;
    let solved_path = PathCurve {
        times: path.times.clone(),
        points: pts,
    };
    solved_path.validate_inside(&solved)?;
    let mut total = MetricBracket::zero();
    for w in solved_path.points.windows(2) {
        let seg = segment_bracket(&solved, &w[0], &w[1], params)?;
        total = total.add(&seg);
    }
    Ok(total)
}

/// Certified bracket for the length of one straight segment: trapezoid rule
/// on the endpoint metric brackets. The integrand is convex along chords of
/// the supported kinds, so the trapezoid value dominates the true integral.
pub(crate) fn segment_bracket(
    domain: &DomainSpec,
    p: &ComplexPoint,
    q: &ComplexPoint,
    params: &DistanceParams,
) -> Result<MetricBracket> {
    let delta = q.sub(p);
    if delta.norm() == 0.0 {
        return Ok(MetricBracket::zero());
    }
    let a = infinitesimal_metric(domain, p, &delta, &params.metric)?;
    let b = infinitesimal_metric(domain, q, &delta, &params.metric)?;
    Ok(a.add(&b).scale(0.5))
}

/// Internal distance solve keeping the refined polygon.
pub(crate) struct DistanceSolve {
    pub polygon: Vec<ComplexPoint>,
    pub seg_brackets: Vec<MetricBracket>,
    pub bracket: MetricBracket,
}

pub(crate) fn distance_solve(
    domain: &DomainSpec,
    z: &ComplexPoint,
    w: &ComplexPoint,
    params: &DistanceParams,
) -> Result<DistanceSolve> {
    let solved = match metric_domain(domain)? {
        MetricDomain::Direct(d) => d,
        MetricDomain::ViaCayley { ball } => ball,
    };
    let zb = pull_back_point(domain, z)?;
    let wb = pull_back_point(domain, w)?;
    if !solved.contains(&zb)? || !solved.contains(&wb)? {
        return Err(Error::precondition("distance endpoints must be interior"));
    }
    if zb.dist(&wb) < 1e-15 {
        return Ok(DistanceSolve {
            polygon: vec![zb],
            seg_brackets: vec![],
            bracket: MetricBracket::zero(),
        });
    }
    let n = params.segments.max(2);
    let mut polygon: Vec<ComplexPoint> = (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            zb.add(&wb.sub(&zb).scale_re(t))
        })
        .collect();
    for _ in 0..params.rounds {
        refine_sweep(&solved, &mut polygon);
        reparameterize(&solved, &mut polygon);
    }
    let mut seg_brackets = Vec::with_capacity(n);
    let mut total = MetricBracket::zero();
    for i in 0..n {
        let seg = segment_bracket(&solved, &polygon[i], &polygon[i + 1], params)?;
        total = total.add(&seg);
        seg_brackets.push(seg);
    }
    let lower = distance_lower(&solved, &zb, &wb);
    let bracket = MetricBracket {
        estimate: total.estimate,
        lower: lower.min(total.estimate),
        upper: total.upper,
    };
    Ok(DistanceSolve {
        polygon,
        seg_brackets,
        bracket,
    })
}

/// Kobayashi pseudo-distance with a certified bracket.
pub fn kobayashi_distance(
    domain: &DomainSpec,
    z: &ComplexPoint,
    w: &ComplexPoint,
    params: &DistanceParams,
) -> Result<MetricBracket> {
    Ok(distance_solve(domain, z, w, params)?.bracket)
}

fn cheap_len(domain: &DomainSpec, p: &ComplexPoint, q: &ComplexPoint) -> f64 {
    let delta = q.sub(p);
    if delta.norm() == 0.0 {
        return 0.0;
    }
    let mid = p.add(q).scale_re(0.5);
    if !domain.contains(&mid).unwrap_or(false) || !domain.contains(q).unwrap_or(false) {
        return f64::INFINITY;
    }
    cheap_metric(domain, &mid, &delta)
}

/// One node-wise pattern-search sweep against the cheap integrand.
fn refine_sweep(domain: &DomainSpec, polygon: &mut [ComplexPoint]) {
    let n = polygon.len();
    let d = polygon[0].dim();
    for pass in 0..2 {
        let order: Vec<usize> = if pass == 0 {
            (1..n - 1).collect()
        } else {
            (1..n - 1).rev().collect()
        };
        for i in order {
            let prev = polygon[i - 1].clone();
            let next = polygon[i + 1].clone();
            let local = |x: &ComplexPoint| -> f64 {
                cheap_len(domain, &prev, x) + cheap_len(domain, x, &next)
            };
            let mut cur = polygon[i].clone();
            let mut best = local(&cur);
            if !best.is_finite() {
                continue;
            }
            let mut h = 0.25 * prev.dist(&cur).max(cur.dist(&next));
            for _ in 0..8 {
                let mut improved = false;
                for coord in 0..d {
                    for dir in [
                        C64::new(h, 0.0),
                        C64::new(-h, 0.0),
                        C64::new(0.0, h),
                        C64::new(0.0, -h),
                    ] {
                        let mut cand = cur.coords().to_vec();
                        cand[coord] += dir;
                        let cand = ComplexPoint::new(cand).unwrap();
                        let val = local(&cand);
                        if val < best - 1e-15 {
                            best = val;
                            cur = cand;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    h *= 0.5;
                    if h < 1e-12 {
                        break;
                    }
                }
            }
            polygon[i] = cur;
        }
    }
}

/// Resamples the polygon at uniform fractions of cheap accumulated length.
fn reparameterize(domain: &DomainSpec, polygon: &mut Vec<ComplexPoint>) {
    let n = polygon.len();
    let mut cum = vec![0.0; n];
    for i in 1..n {
        let l = cheap_len(domain, &polygon[i - 1], &polygon[i]);
        cum[i] = cum[i - 1] + if l.is_finite() { l } else { polygon[i - 1].dist(&polygon[i]) };
    }
    let total = cum[n - 1];
    if total <= 0.0 {
        return;
    }
    let mut fresh = Vec::with_capacity(n);
    fresh.push(polygon[0].clone());
    let mut seg = 1usize;
    for i in 1..n - 1 {
        let target = total * i as f64 / (n - 1) as f64;
        while seg < n - 1 && cum[seg] < target {
            seg += 1;
        }
        let t0 = cum[seg - 1];
        let t1 = cum[seg];
        let frac = if t1 > t0 { (target - t0) / (t1 - t0) } else { 0.0 };
        let p = polygon[seg - 1].add(&polygon[seg].sub(&polygon[seg - 1]).scale_re(frac));
        fresh.push(p);
    }
    fresh.push(polygon[n - 1].clone());
    *polygon = fresh;
}
