//! Orbit dynamics of automorphisms: the elliptic / parabolic / hyperbolic
//! trichotomy, boundary fixed points, translation lengths, translated
//! almost-geodesics, north–south dynamics, ping-pong free-subgroup
//! certificates, and limit-set sampling.
//!
//! All operations here work on bounded domain kinds; Siegel-model flows
//! transport to the ball first (`WHPFlow::to_ball_moebius`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automorphisms::{boundary_extend, Automorphism};
use crate::domains::{ComplexPoint, DomainSpec};
use crate::error::{Error, Result};
use crate::kobayashi::{
    geodesic_path, kobayashi_distance, verify_almost_geodesic, DistanceParams, PathCurve,
};
use crate::parallel;

/// Orbit classification per the Wolff–Denjoy trichotomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Elliptic,
    Parabolic,
    Hyperbolic,
    Undetermined,
}

/// Tuning knobs for orbit classification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DynamicsParams {
    pub n_max: usize,
    /// Boundary distance below which an orbit counts as escaping.
    pub eps_boundary: f64,
    /// Separation threshold between ℓ⁺ and ℓ⁻ for hyperbolic vs parabolic.
    pub delta_sep: f64,
    /// Recurrence radius factor (times eps_boundary) witnessing ellipticity.
    pub recurrence_factor: f64,
    pub seed: u64,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        DynamicsParams {
            n_max: 10_000,
            eps_boundary: 1e-6,
            delta_sep: 1e-4,
            recurrence_factor: 10.0,
            seed: 0,
        }
    }
}

/// Orbit evidence attached to a classification report.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitEvidence {
    /// (n, certified boundary-distance upper bound) samples, forward orbit.
    pub forward_tail: Vec<(usize, f64)>,
    /// Same for the backward orbit.
    pub backward_tail: Vec<(usize, f64)>,
    /// |ℓ⁺ − ℓ⁻| when both limits exist (callers may re-threshold).
    pub separation: Option<f64>,
    /// |g(ℓ̂) − ℓ̂| fixed-point residuals for (ℓ⁺, ℓ⁻).
    pub fixed_point_residuals: Option<(f64, f64)>,
    /// Projected tail diameters for (ℓ⁺, ℓ⁻).
    pub tail_diameters: Option<(f64, f64)>,
}

/// Result of `classify` (translation_length is filled by its own operation).
#[derive(Clone, Debug, Serialize)]
pub struct DynamicsReport {
    pub classification: Classification,
    pub ell_plus: Option<ComplexPoint>,
    pub ell_minus: Option<ComplexPoint>,
    pub translation_length: Option<f64>,
    pub iterations_used: usize,
    pub evidence: OrbitEvidence,
}

enum ScanOutcome {
    /// Orbit re-entered the recurrence ball while staying off the boundary.
    Recurrent,
    /// Orbit escaped; boundary limit estimate with diagnostics.
    Escaped {
        limit: ComplexPoint,
        tail_diameter: f64,
        residual: f64,
    },
    Inconclusive,
}

struct Scan {
    outcome: ScanOutcome,
    iterations: usize,
    tail: Vec<(usize, f64)>,
}

/// Projects a near-boundary (possibly marginally outside) point onto the
/// boundary along the anchor ray.
fn project_near_boundary(domain: &DomainSpec, p: &ComplexPoint) -> Result<ComplexPoint> {
    if domain.contains(p)? {
        domain.boundary_project(p)
    } else {
        let anchor = domain.anchor();
        let dir = p.sub(&anchor);
        if dir.norm() < 1e-300 {
            return Err(Error::numeric("cannot project the anchor"));
        }
        domain.ray_to_boundary(&anchor, &dir.scale_re(1.0 / dir.norm()))
    }
}

/// Richardson extrapolation on the 1/n orbit model using nodes n, 2n, 4n.
/// Exact for geometric tails up to their own (smaller) error, and lifts
/// algebraically converging parabolic orbits to ~n⁻³ accuracy.
fn richardson_limit(orbit: &[ComplexPoint]) -> Option<ComplexPoint> {
    let n_total = orbit.len() - 1;
    if n_total < 8 {
        return None;
    }
    let n1 = n_total / 4;
    let (a, b, c) = (&orbit[n1], &orbit[2 * n1], &orbit[4 * n1]);
    let coords = (0..a.dim())
        .map(|i| (c.coord(i) * 8.0 - b.coord(i) * 6.0 + a.coord(i)) / 3.0)
        .collect();
    ComplexPoint::new(coords).ok()
}

fn orbit_scan(
    domain: &DomainSpec,
    g: &Automorphism,
    z0: &ComplexPoint,
    params: &DynamicsParams,
) -> Result<Scan> {
    let mut orbit = vec![z0.clone()];
    let mut tail: Vec<(usize, f64)> = Vec::new();
    let mut min_dist_lower = f64::INFINITY;
    let mut escape_at: Option<usize> = None;
    let recurrence_radius = params.recurrence_factor * params.eps_boundary;
    let stride = 1 + params.n_max / 16;
    let mut n = 0usize;
    while n < params.n_max {
        let next = match g.apply(orbit.last().unwrap()) {
            Ok(p) => p,
            // Orbit reached the numerical boundary: keep what we have.
            Err(_) => break,
        };
        if !domain.contains(&next).unwrap_or(false) {
            break;
        }
        n += 1;
        let (lo, up) = domain.euclidean_boundary_distance_bracket(&next)?;
        min_dist_lower = min_dist_lower.min(lo);
        if n <= 4 || n % stride == 0 {
            tail.push((n, up));
        }
        orbit.push(next.clone());
        match escape_at {
            None => {
                if up < params.eps_boundary {
                    escape_at = Some(n);
                    tail.push((n, up));
                } else if next.dist(z0) <= recurrence_radius
                    && min_dist_lower >= params.eps_boundary
                {
                    return Ok(Scan {
                        outcome: ScanOutcome::Recurrent,
                        iterations: n,
                        tail,
                    });
                }
            }
            Some(n_star) => {
                // extend to 4× the escape index so the extrapolation nodes
                // n*, 2n*, 4n* all exist
                if n >= 4 * n_star.max(2) || up < 1e-12 {
                    break;
                }
            }
        }
    }
    let iterations = orbit.len() - 1;
    if escape_at.is_none() {
        return Ok(Scan {
            outcome: ScanOutcome::Inconclusive,
            iterations,
            tail,
        });
    }
    // Boundary limit: candidates are the projected last point and the
    // projected Richardson extrapolation; the fixed-point residual decides.
    let mut candidates = Vec::new();
    if let Ok(p) = project_near_boundary(domain, orbit.last().unwrap()) {
        candidates.push(p);
    }
    if let Some(r) = richardson_limit(&orbit) {
        if let Ok(p) = project_near_boundary(domain, &r) {
            candidates.push(p);
        }
    }
    if candidates.is_empty() {
        return Ok(Scan {
            outcome: ScanOutcome::Inconclusive,
            iterations,
            tail,
        });
    }
    let residual_of = |x: &ComplexPoint| -> f64 {
        boundary_extend(domain, g, x)
            .map(|y| y.dist(x))
            .unwrap_or(f64::INFINITY)
    };
    let limit = candidates
        .into_iter()
        .min_by(|a, b| residual_of(a).partial_cmp(&residual_of(b)).unwrap())
        .unwrap();
    let residual = residual_of(&limit);
    let mut tail_diameter: f64 = 0.0;
    let from = (orbit.len() * 3) / 4;
    let mut prev: Option<ComplexPoint> = None;
    for p in orbit[from..].iter() {
        if let Ok(q) = project_near_boundary(domain, p) {
            if let Some(pr) = &prev {
                tail_diameter = tail_diameter.max(pr.dist(&q));
            }
            prev = Some(q);
        }
    }
    Ok(Scan {
        outcome: ScanOutcome::Escaped {
            limit,
            tail_diameter,
            residual,
        },
        iterations,
        tail,
    })
}

/// Classifies an automorphism by its orbit dynamics from z0.
pub fn classify(
    domain: &DomainSpec,
    g: &Automorphism,
    z0: &ComplexPoint,
    params: &DynamicsParams,
) -> Result<DynamicsReport> {
    if !domain.is_bounded() {
        return Err(Error::argument(
            "orbit dynamics needs a bounded domain; conjugate Siegel flows to the ball first",
        ));
    }
    g.check_domain(domain)?;
    if !domain.contains(z0)? {
        return Err(Error::precondition("base point must be interior"));
    }
    let forward = orbit_scan(domain, g, z0, params)?;
    let backward = orbit_scan(domain, &g.inverse()?, z0, params)?;
    let iterations_used = forward.iterations.max(backward.iterations);
    let mut evidence = OrbitEvidence {
        forward_tail: forward.tail,
        backward_tail: backward.tail,
        separation: None,
        fixed_point_residuals: None,
        tail_diameters: None,
    };
    let mk = |classification, ell_plus, ell_minus, evidence| DynamicsReport {
        classification,
        ell_plus,
        ell_minus,
        translation_length: None,
        iterations_used,
        evidence,
    };
    match (forward.outcome, backward.outcome) {
        (ScanOutcome::Recurrent, ScanOutcome::Recurrent) => {
            Ok(mk(Classification::Elliptic, None, None, evidence))
        }
        (
            ScanOutcome::Escaped {
                limit: lp,
                tail_diameter: tp,
                residual: rp,
            },
            ScanOutcome::Escaped {
                limit: lm,
                tail_diameter: tm,
                residual: rm,
            },
        ) => {
            let sep = lp.dist(&lm);
            evidence.separation = Some(sep);
            evidence.fixed_point_residuals = Some((rp, rm));
            evidence.tail_diameters = Some((tp, tm));
            let class = if sep > params.delta_sep {
                Classification::Hyperbolic
            } else {
                Classification::Parabolic
            };
            Ok(mk(class, Some(lp), Some(lm), evidence))
        }
        _ => Ok(mk(Classification::Undetermined, None, None, evidence)),
    }
}

/// ℓ⁺ of a non-elliptic automorphism, with an error bound from the tail
/// diameter and the fixed-point residual.
pub fn attracting_fixed_point(
    domain: &DomainSpec,
    g: &Automorphism,
    z0: &ComplexPoint,
    params: &DynamicsParams,
) -> Result<(ComplexPoint, f64)> {
    let report = classify(domain, g, z0, params)?;
    match report.classification {
        Classification::Elliptic => Err(Error::argument(
            "elliptic automorphisms have no attracting boundary fixed point",
        )),
        Classification::Undetermined => Err(Error::search("orbit scan was inconclusive")),
        _ => {
            let ell = report.ell_plus.expect("non-elliptic reports carry ℓ⁺");
            let (tp, _) = report.evidence.tail_diameters.unwrap_or((f64::NAN, 0.0));
            let (rp, _) = report
                .evidence
                .fixed_point_residuals
                .unwrap_or((f64::NAN, 0.0));
            Ok((ell, tp.max(rp)))
        }
    }
}

/// Knobs for the translation-length estimator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranslationParams {
    pub n_max: usize,
    /// Orbit points closer to the boundary than this are not used.
    pub dist_floor: f64,
    pub distance: DistanceParams,
    pub dynamics: DynamicsParams,
}

impl Default for TranslationParams {
    fn default() -> Self {
        let mut distance = DistanceParams::default();
        distance.segments = 128;
        distance.metric.degree_boost = 2;
        TranslationParams {
            n_max: 200,
            dist_floor: 1e-5,
            distance,
            dynamics: DynamicsParams::default(),
        }
    }
}

/// Translation length estimate with diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct TranslationLength {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    /// Largest orbit index whose distance solve backed the estimate.
    pub n_used: usize,
    /// b_{2m} ≤ 2·b_m held within bracket widths.
    pub subadditive_ok: bool,
}

/// L = lim K(gⁿz, z)/n for hyperbolic g, from the subadditive sequence at
/// the deepest representable orbit index ≤ n_max. By Fekete b_n/n ≥ L for
/// every n, so the minimum over the computed checkpoints is reported.
pub fn translation_length(
    domain: &DomainSpec,
    g: &Automorphism,
    z0: &ComplexPoint,
    params: &TranslationParams,
) -> Result<TranslationLength> {
    let report = classify(domain, g, z0, &params.dynamics)?;
    if report.classification != Classification::Hyperbolic {
        return Err(Error::argument(format!(
            "translation length needs a hyperbolic element, got {:?}",
            report.classification
        )));
    }
    let mut orbit = vec![z0.clone()];
    while orbit.len() <= params.n_max {
        let next = match g.apply(orbit.last().unwrap()) {
            Ok(p) => p,
            Err(_) => break,
        };
        if !domain.contains(&next).unwrap_or(false) {
            break;
        }
        let (_, up) = domain.euclidean_boundary_distance_bracket(&next)?;
        if up < params.dist_floor {
            break;
        }
        orbit.push(next);
    }
    let m = orbit.len() - 1;
    if m == 0 {
        return Err(Error::numeric(
            "orbit leaves the representable interior immediately",
        ));
    }
    let half = (m / 2).max(1);
    let b_m = kobayashi_distance(domain, z0, &orbit[m], &params.distance)?;
    let b_one = kobayashi_distance(domain, z0, &orbit[1], &params.distance)?;
    let b_half = if half < m && half > 1 {
        Some(kobayashi_distance(domain, z0, &orbit[half], &params.distance)?)
    } else {
        None
    };
    let mut estimate = (b_m.estimate / m as f64).min(b_one.estimate);
    if let Some(bh) = &b_half {
        estimate = estimate.min(bh.estimate / half as f64);
    }
    let subadditive_ok = match &b_half {
        Some(bh) if 2 * half == m => b_m.lower <= 2.0 * bh.upper + 1e-9,
        _ => true,
    };
    Ok(TranslationLength {
        estimate,
        lower: b_m.lower / m as f64,
        upper: (b_m.upper / m as f64).min(b_one.upper),
        n_used: m,
        subadditive_ok,
    })
}

/// Builds the translated almost-geodesic of a hyperbolic element: a refined
/// geodesic γ₀ from z0 to g·z0 extended by equivariance, so that
/// γ(t + nT) = gⁿγ(t) holds exactly by construction.
pub fn translated_almost_geodesic(
    domain: &DomainSpec,
    g: &Automorphism,
    z0: &ComplexPoint,
    n_range: (i64, i64),
    params: &TranslationParams,
) -> Result<(PathCurve, (f64, f64))> {
    let report = classify(domain, g, z0, &params.dynamics)?;
    if report.classification != Classification::Hyperbolic {
        return Err(Error::argument(
            "translated almost-geodesics need a hyperbolic element",
        ));
    }
    let (lo, hi) = n_range;
    if lo > 0 || hi < 0 || lo == hi {
        return Err(Error::argument("n_range must contain 0 and be nontrivial"));
    }
    let w = g.apply(z0)?;
    let (base, _) = geodesic_path(domain, z0, &w, &params.distance)?;
    let t_span = base.span();
    let s = base.len();
    let extend = |aut: &Automorphism, count: i64| -> Vec<Vec<ComplexPoint>> {
        let mut blocks: Vec<Vec<ComplexPoint>> = Vec::new();
        for _ in 0..count {
            let prev = blocks.last().unwrap_or(&base.points);
            let mut next = Vec::with_capacity(s);
            let mut ok = true;
            for p in prev {
                match aut.apply(p) {
                    Ok(q) if domain.contains(&q).unwrap_or(false) => next.push(q),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            blocks.push(next);
        }
        blocks
    };
    let blocks_pos = extend(g, hi);
    let blocks_neg = extend(&g.inverse()?, -lo);
    let mut times = Vec::new();
    let mut points = Vec::new();
    for (i, block) in blocks_neg.iter().enumerate().rev() {
        let shift = -((i + 1) as f64) * t_span;
        for (j, p) in block.iter().enumerate().take(s - 1) {
            times.push(shift + (base.times[j] - base.times[0]));
            points.push(p.clone());
        }
    }
    for (j, p) in base.points.iter().enumerate() {
        if j == s - 1 && !blocks_pos.is_empty() {
            continue;
        }
        times.push(base.times[j] - base.times[0]);
        points.push(p.clone());
    }
    for (i, block) in blocks_pos.iter().enumerate() {
        let shift = (i + 1) as f64 * t_span;
        let last_block = i + 1 == blocks_pos.len();
        for (j, p) in block.iter().enumerate() {
            if !last_block && j == s - 1 {
                continue;
            }
            times.push(shift + (base.times[j] - base.times[0]));
            points.push(p.clone());
        }
    }
    let path = PathCurve::new(times, points)?;
    for kappa in [0.01, 0.05, 0.1, 0.5, 1.0] {
        let check = verify_almost_geodesic(domain, &path, 1.05, kappa, &params.distance)?;
        if check.ok {
            return Ok((path, (1.05, kappa)));
        }
    }
    Err(Error::search(
        "no κ ≤ 1 certifies the translated path at λ = 1.05",
    ))
}

/// Seeded interior + boundary sample set for the inclusion checks; ring
/// samples are added near the given boundary centers.
fn sample_closure(
    domain: &DomainSpec,
    count: usize,
    seed: u64,
    extra_centers: &[ComplexPoint],
) -> Result<Vec<ComplexPoint>> {
    let d = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * count + extra_centers.len() * 8);
    let mut interior = Vec::with_capacity(count);
    while interior.len() < count {
        let p = ComplexPoint::new(
            (0..d)
                .map(|_| {
                    num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                })
                .collect(),
        )?;
        if domain.contains(&p)? {
            interior.push(p);
        }
    }
    for p in &interior {
        out.push(domain.boundary_project(p)?);
    }
    out.append(&mut interior);
    for c in extra_centers {
        for j in 0..8 {
            let mut coords = c.coords().to_vec();
            let phase = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
            coords[j % d] += num_complex::Complex64::from_polar(0.05, phase);
            let inward = ComplexPoint::new(coords)?.scale_re(0.9);
            if domain.contains(&inward)? {
                out.push(domain.boundary_project(&inward)?);
            }
        }
    }
    Ok(out)
}

/// North–south dynamics report.
#[derive(Clone, Debug, Serialize)]
pub struct NorthSouthCheck {
    pub n: usize,
    pub ok: bool,
}

/// Finds the smallest N with gᴺ(Ω̄ ∖ V) ⊂ U and g⁻ᴺ(Ω̄ ∖ U) ⊂ V on samples,
/// where U, V are Euclidean balls around ℓ⁺, ℓ⁻ with the given radii.
pub fn north_south_check(
    domain: &DomainSpec,
    g: &Automorphism,
    radii: (f64, f64),
    sample_count: usize,
    z0: &ComplexPoint,
    params: &DynamicsParams,
) -> Result<NorthSouthCheck> {
    let report = classify(domain, g, z0, params)?;
    if report.classification != Classification::Hyperbolic {
        return Err(Error::argument("north–south dynamics needs a hyperbolic element"));
    }
    let (ell_p, ell_m) = (report.ell_plus.unwrap(), report.ell_minus.unwrap());
    let (r_u, r_v) = radii;
    if ell_p.dist(&ell_m) <= r_u + r_v {
        return Err(Error::argument("U and V overlap; shrink the radii"));
    }
    let samples = sample_closure(domain, sample_count, params.seed, &[])?;
    let n_fwd = contraction_power(g, &samples, &ell_m, r_v, &ell_p, r_u, z0)?;
    let n_bwd = contraction_power(&g.inverse()?, &samples, &ell_p, r_u, &ell_m, r_v, z0)?;
    match (n_fwd, n_bwd) {
        (Some(a), Some(b)) => Ok(NorthSouthCheck {
            n: a.max(b),
            ok: true,
        }),
        _ => Ok(NorthSouthCheck { n: 10_000, ok: false }),
    }
}

/// Smallest N ≤ 1e4 with gᴺ(samples ∖ B(excl)) ⊂ B(target).
fn contraction_power(
    g: &Automorphism,
    samples: &[ComplexPoint],
    excl_center: &ComplexPoint,
    excl_radius: f64,
    target_center: &ComplexPoint,
    target_radius: f64,
    z0: &ComplexPoint,
) -> Result<Option<usize>> {
    let mut pts: Vec<ComplexPoint> = samples
        .iter()
        .chain(std::iter::once(z0))
        .filter(|p| p.dist(excl_center) > excl_radius)
        .cloned()
        .collect();
    for n in 1..=10_000usize {
        for p in pts.iter_mut() {
            *p = g.apply(p)?;
        }
        if pts.iter().all(|p| p.dist(target_center) < target_radius) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Free-subgroup witness data.
#[derive(Clone, Debug, Serialize)]
pub struct PingPongCertificate {
    /// Powers (m, n) applied to the two hyperbolic generators.
    pub powers: (usize, usize),
    /// Four boundary balls (center, radius) around ℓ₁⁺, ℓ₁⁻, ℓ₂⁺, ℓ₂⁻.
    pub neighborhoods: Vec<(ComplexPoint, f64)>,
    pub verified_word_length: usize,
    /// Smallest certified Kobayashi displacement of z0 over all tested words.
    pub min_displacement: f64,
    /// How many nontrivial reduced words were checked.
    pub words_checked: usize,
}

/// Certifies that powers of two hyperbolic elements generate a free group:
/// ping-pong inclusions hold on samples and every nontrivial reduced word up
/// to the given length displaces z0 by a certified positive amount.
pub fn pingpong_witness(
    domain: &DomainSpec,
    h1: &Automorphism,
    h2: &Automorphism,
    z0: &ComplexPoint,
    max_word_len: usize,
    params: &DynamicsParams,
) -> Result<PingPongCertificate> {
    let rep1 = classify(domain, h1, z0, params)?;
    let rep2 = classify(domain, h2, z0, params)?;
    if rep1.classification != Classification::Hyperbolic
        || rep2.classification != Classification::Hyperbolic
    {
        return Err(Error::argument("both generators must be hyperbolic"));
    }
    let fixed = [
        rep1.ell_plus.unwrap(),
        rep1.ell_minus.unwrap(),
        rep2.ell_plus.unwrap(),
        rep2.ell_minus.unwrap(),
    ];
    let mut s_min = f64::INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            s_min = s_min.min(fixed[i].dist(&fixed[j]));
        }
    }
    if s_min < 1e-6 {
        return Err(Error::argument("fixed points are not pairwise distinct"));
    }
    let radius = 0.2 * s_min;
    let samples = sample_closure(domain, 24, params.seed, &fixed)?;
    let mut chosen: Option<usize> = None;
    let mut a1 = h1.clone();
    let mut a2 = h2.clone();
    for m in 1..=1000usize {
        if m > 1 {
            a1 = a1.compose(h1)?;
            a2 = a2.compose(h2)?;
        }
        let ok = ping_inclusions(&a1, &samples, &fixed[0], &fixed[1], radius, z0)?
            && ping_inclusions(&a2, &samples, &fixed[2], &fixed[3], radius, z0)?;
        if ok {
            chosen = Some(m);
            break;
        }
    }
    let m = chosen.ok_or_else(|| Error::search("no power ≤ 1000 achieves the inclusions"))?;
    let letters = [
        h1.pow(m as i64)?,
        h1.pow(-(m as i64))?,
        h2.pow(m as i64)?,
        h2.pow(-(m as i64))?,
    ];
    // brute-force enumeration of nontrivial reduced words (depth-first)
    let mut min_displacement = f64::INFINITY;
    let mut words_checked = 0usize;
    let mut stack: Vec<(usize, usize, ComplexPoint)> = Vec::new();
    for (l, letter) in letters.iter().enumerate() {
        stack.push((l, 1, letter.apply(z0)?));
    }
    while let Some((letter, len, point)) = stack.pop() {
        words_checked += 1;
        let disp = crate::kobayashi::distance_lower_bound(domain, &point, z0)?;
        min_displacement = min_displacement.min(disp);
        if len < max_word_len {
            for next in 0..4usize {
                // reduced words only: never follow a letter by its inverse
                if next ^ 1 == letter {
                    continue;
                }
                if let Ok(q) = letters[next].apply(&point) {
                    stack.push((next, len + 1, q));
                }
            }
        }
    }
    if min_displacement <= 1e-6 {
        return Err(Error::search(format!(
            "a reduced word of length ≤ {max_word_len} moved z0 by a certified {min_displacement:.3e} only"
        )));
    }
    Ok(PingPongCertificate {
        powers: (m, m),
        neighborhoods: fixed.iter().map(|c| (c.clone(), radius)).collect(),
        verified_word_length: max_word_len,
        min_displacement,
        words_checked,
    })
}

fn ping_inclusions(
    a: &Automorphism,
    samples: &[ComplexPoint],
    attract: &ComplexPoint,
    repel: &ComplexPoint,
    radius: f64,
    z0: &ComplexPoint,
) -> Result<bool> {
    let a_inv = a.inverse()?;
    for p in samples.iter().chain(std::iter::once(z0)) {
        if p.dist(repel) > radius {
            match a.apply(p) {
                Ok(q) if q.dist(attract) < radius => {}
                _ => return Ok(false),
            }
        }
        if p.dist(attract) > radius {
            match a_inv.apply(p) {
                Ok(q) if q.dist(repel) < radius => {}
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

/// Samples the limit set: random long words in the generators (and their
/// inverses) applied to z0, projected to the boundary once the orbit comes
/// within 1e-6 of it. Deterministic per (seed, sample index).
pub fn limit_set_sample(
    domain: &DomainSpec,
    generators: &[Automorphism],
    n_samples: usize,
    seed: u64,
    z0: &ComplexPoint,
) -> Result<Vec<ComplexPoint>> {
    if generators.is_empty() {
        return Err(Error::argument("need at least one generator"));
    }
    let mut letters = Vec::with_capacity(2 * generators.len());
    for g in generators {
        letters.push(g.clone());
        letters.push(g.inverse()?);
    }
    let results = parallel::map_indexed(n_samples, |i| -> Option<ComplexPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let mut p = z0.clone();
        for step in 0..400 {
            let letter = &letters[rng.gen_range(0..letters.len())];
            p = match letter.apply(&p) {
                Ok(q) => q,
                Err(_) => break,
            };
            if step >= 10 {
                match domain.euclidean_boundary_distance_bracket(&p) {
                    Ok((_, up)) if up < 1e-6 => return project_near_boundary(domain, &p).ok(),
                    Ok(_) => {}
                    Err(_) => return project_near_boundary(domain, &p).ok(),
                }
            }
        }
        None
    });
    Ok(results.into_iter().flatten().collect())
}

/// Scans a sequence of automorphisms for its first hyperbolic member whose
/// fixed points match the sequence's empirical limits within `match_tol`.
pub fn hyperbolic_from_sequence(
    domain: &DomainSpec,
    sequence: &[Automorphism],
    z0: &ComplexPoint,
    match_tol: f64,
    params: &DynamicsParams,
) -> Result<(usize, DynamicsReport)> {
    if sequence.is_empty() {
        return Err(Error::argument("empty sequence"));
    }
    let last = sequence.last().unwrap();
    let empirical = |g: &Automorphism| -> Result<ComplexPoint> {
        let mut p = z0.clone();
        for _ in 0..400 {
            match g.apply(&p) {
                Ok(q) if domain.contains(&q).unwrap_or(false) => p = q,
                _ => break,
            }
            if domain.euclidean_boundary_distance_bracket(&p)?.1 < 1e-9 {
                break;
            }
        }
        project_near_boundary(domain, &p)
    };
    let x_plus = empirical(last)?;
    let x_minus = empirical(&last.inverse()?)?;
    for (i, g) in sequence.iter().enumerate() {
        let report = classify(domain, g, z0, params)?;
        if report.classification == Classification::Hyperbolic {
            let lp = report.ell_plus.as_ref().unwrap();
            let lm = report.ell_minus.as_ref().unwrap();
            if lp.dist(&x_plus) <= match_tol && lm.dist(&x_minus) <= match_tol {
                return Ok((i, report));
            }
        }
    }
    Err(Error::search(
        "no member of the sequence is hyperbolic with matching limits",
    ))
}

/// Orbit rows for CSV export: (n, point, boundary-distance upper bound).
pub fn orbit_rows(
    domain: &DomainSpec,
    g: &Automorphism,
    z0: &ComplexPoint,
    n_max: usize,
) -> Result<Vec<(usize, ComplexPoint, f64)>> {
    if !domain.contains(z0)? {
        return Err(Error::precondition("base point must be interior"));
    }
    let mut rows = Vec::with_capacity(n_max + 1);
    let (_, up0) = domain.euclidean_boundary_distance_bracket(z0)?;
    rows.push((0, z0.clone(), up0));
    let mut p = z0.clone();
    for n in 1..=n_max {
        p = match g.apply(&p) {
            Ok(q) => q,
            Err(_) => break,
        };
        if !domain.contains(&p).unwrap_or(false) {
            break;
        }
        let (_, up) = domain.euclidean_boundary_distance_bracket(&p)?;
        rows.push((n, p.clone(), up));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphisms::BallMoebius;
    use num_complex::Complex64 as C64;

    fn disc() -> DomainSpec {
        DomainSpec::ball(1)
    }

    fn h_a(a: f64) -> Automorphism {
        Automorphism::Moebius(BallMoebius::disc_hyperbolic(1, C64::new(a, 0.0)).unwrap())
    }

    fn pt(re: &[f64]) -> ComplexPoint {
        ComplexPoint::from_reals(re)
    }

    #[test]
    fn rotation_is_elliptic() {
        let g = Automorphism::Moebius(BallMoebius::rotation(&[std::f64::consts::PI / 7.0]));
        let report = classify(&disc(), &g, &pt(&[0.3]), &DynamicsParams::default()).unwrap();
        assert_eq!(report.classification, Classification::Elliptic);
        assert!(report.ell_plus.is_none() && report.ell_minus.is_none());
    }

    #[test]
    fn disc_hyperbolic_has_unit_fixed_points() {
        let report = classify(&disc(), &h_a(0.5), &pt(&[0.2]), &DynamicsParams::default()).unwrap();
        assert_eq!(report.classification, Classification::Hyperbolic);
        assert!(report.ell_plus.unwrap().dist(&pt(&[1.0])) < 1e-6);
        assert!(report.ell_minus.unwrap().dist(&pt(&[-1.0])) < 1e-6);
    }

    #[test]
    fn cayley_translation_is_parabolic() {
        let g = Automorphism::Moebius(BallMoebius::disc_parabolic(1, 1.0));
        let report = classify(&disc(), &g, &pt(&[0.0]), &DynamicsParams::default()).unwrap();
        assert_eq!(report.classification, Classification::Parabolic);
        assert!(report.ell_plus.as_ref().unwrap().dist(&pt(&[1.0])) < 1e-6);
        assert!(report.ell_minus.as_ref().unwrap().dist(&pt(&[1.0])) < 1e-6);
    }

    #[test]
    fn inverse_swaps_fixed_points() {
        let g = h_a(0.4);
        let params = DynamicsParams::default();
        let a = classify(&disc(), &g, &pt(&[0.1]), &params).unwrap();
        let b = classify(&disc(), &g.inverse().unwrap(), &pt(&[0.1]), &params).unwrap();
        assert_eq!(a.classification, b.classification);
        assert!(a.ell_plus.unwrap().dist(&b.ell_minus.unwrap()) < 1e-6);
        assert!(a.ell_minus.unwrap().dist(&b.ell_plus.unwrap()) < 1e-6);
    }

    #[test]
    fn conjugation_transports_fixed_points() {
        let g = h_a(0.5);
        let c = Automorphism::Moebius(BallMoebius::rotation(&[1.1]));
        let cgc = c
            .compose(&g)
            .unwrap()
            .compose(&c.inverse().unwrap())
            .unwrap();
        let params = DynamicsParams::default();
        let base = classify(&disc(), &g, &pt(&[0.1]), &params).unwrap();
        let conj = classify(&disc(), &cgc, &pt(&[0.1]), &params).unwrap();
        let expect_p = boundary_extend(&disc(), &c, &base.ell_plus.unwrap()).unwrap();
        let expect_m = boundary_extend(&disc(), &c, &base.ell_minus.unwrap()).unwrap();
        assert!(conj.ell_plus.unwrap().dist(&expect_p) < 1e-6);
        assert!(conj.ell_minus.unwrap().dist(&expect_m) < 1e-6);
    }

    #[test]
    fn translation_length_of_disc_hyperbolic() {
        let params = TranslationParams::default();
        let tl = translation_length(&disc(), &h_a(0.5), &pt(&[0.0]), &params).unwrap();
        let exact = 0.5f64.atanh();
        assert!(
            (tl.estimate - exact).abs() <= 1e-3,
            "estimate {} vs {} (n_used {})",
            tl.estimate,
            exact,
            tl.n_used
        );
        assert!(tl.subadditive_ok);
        // elliptic input is rejected
        let rot = Automorphism::Moebius(BallMoebius::rotation(&[0.3]));
        assert!(translation_length(&disc(), &rot, &pt(&[0.0]), &params).is_err());
    }

    #[test]
    fn translated_geodesic_is_equivariant_and_certified() {
        let g = h_a(0.5);
        let mut params = TranslationParams::default();
        params.distance.segments = 48;
        let (path, (lambda, kappa)) =
            translated_almost_geodesic(&disc(), &g, &pt(&[0.0]), (-2, 3), &params).unwrap();
        assert!(lambda <= 1.05 && kappa <= 0.1, "certificate ({lambda}, {kappa})");
        // exact equivariance: γ(t + T) = g·γ(t) on the stored grid
        let t_span = {
            // block span = K-length of one period: recover from the range
            let total = path.span();
            total / 5.0 // 5 blocks: [-2, 3]
        };
        let n = path.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let t = path.times[i];
            let target = t + t_span;
            // find the stored grid point at t + T
            if let Some(j) = path
                .times
                .iter()
                .position(|&tj| (tj - target).abs() < 1e-9 * (1.0 + target.abs()))
            {
                let moved = g.apply(&path.points[i]).unwrap();
                worst = worst.max(moved.dist(&path.points[j]));
            }
        }
        assert!(worst <= 1e-12, "equivariance residual {worst:.3e}");
        // terminal points of increasing truncations converge
        let ends: Vec<&ComplexPoint> = path.points.iter().rev().take(3).collect();
        assert!(ends[0].dist(ends[1]) < 1e-1);
    }

    #[test]
    fn north_south_contracts_quickly_on_the_disc() {
        let check = north_south_check(
            &disc(),
            &h_a(0.5),
            (0.5, 0.5),
            16,
            &pt(&[0.0]),
            &DynamicsParams::default(),
        )
        .unwrap();
        assert!(check.ok);
        assert!(check.n <= 20, "N = {}", check.n);
        // parabolic input fails the disjointness precondition (ℓ⁺ = ℓ⁻)
        let parab = Automorphism::Moebius(BallMoebius::disc_parabolic(1, 1.0));
        assert!(north_south_check(
            &disc(),
            &parab,
            (0.5, 0.5),
            8,
            &pt(&[0.0]),
            &DynamicsParams::default()
        )
        .is_err());
    }

    #[test]
    fn pingpong_on_rotated_conjugate_pair() {
        let h1 = h_a(0.5);
        let r = Automorphism::Moebius(BallMoebius::rotation(&[std::f64::consts::FRAC_PI_2]));
        let h2 = r
            .compose(&h1)
            .unwrap()
            .compose(&r.inverse().unwrap())
            .unwrap();
        let cert = pingpong_witness(
            &disc(),
            &h1,
            &h2,
            &pt(&[0.0]),
            4,
            &DynamicsParams::default(),
        )
        .unwrap();
        assert!(cert.min_displacement > 1e-6);
        assert_eq!(cert.powers.0, cert.powers.1);
        // identical generators share fixed points: rejected
        assert!(pingpong_witness(
            &disc(),
            &h1,
            &h1,
            &pt(&[0.0]),
            3,
            &DynamicsParams::default()
        )
        .is_err());
    }

    #[test]
    fn single_hyperbolic_limit_set_clusters_at_fixed_points() {
        let samples = limit_set_sample(&disc(), &[h_a(0.5)], 200, 7, &pt(&[0.0])).unwrap();
        assert!(samples.len() > 100);
        for s in &samples {
            let d = s.dist(&pt(&[1.0])).min(s.dist(&pt(&[-1.0])));
            assert!(d < 1e-3, "sample strayed {d}");
        }
    }

    #[test]
    fn sequence_scan_examples() {
        let params = DynamicsParams::default();
        // already hyperbolic at the first index
        let seq: Vec<Automorphism> = (1..=3).map(|n| h_a(0.5).pow(n).unwrap()) .collect();
        let (idx, report) = hyperbolic_from_sequence(&disc(), &seq, &pt(&[0.2]), 0.1, &params).unwrap();
        assert_eq!(idx, 0);
        assert_eq!(report.classification, Classification::Hyperbolic);
        // rotations never qualify
        let rots: Vec<Automorphism> = (1..=3)
            .map(|n| Automorphism::Moebius(BallMoebius::rotation(&[0.1 * n as f64])))
            .collect();
        assert!(hyperbolic_from_sequence(&disc(), &rots, &pt(&[0.2]), 0.1, &params).is_err());
        // perturbed powers become hyperbolic with limits near ±1
        let seq: Vec<Automorphism> = (1..=4)
            .map(|n| {
                Automorphism::Moebius(BallMoebius::rotation(&[1.0 / n as f64]))
                    .compose(&h_a(0.5).pow(n).unwrap())
                    .unwrap()
            })
            .collect();
        let (idx, report) = hyperbolic_from_sequence(&disc(), &seq, &pt(&[0.0]), 0.5, &params).unwrap();
        assert!(idx <= 2);
        assert_eq!(report.classification, Classification::Hyperbolic);
    }
}
