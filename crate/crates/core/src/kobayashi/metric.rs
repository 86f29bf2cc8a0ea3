//! Infinitesimal Kobayashi metric brackets.
//!
//! Upper bound: maximize |f′(0)| over polynomial discs f with f(0) = z and
//! f′(0) ∥ v that are feasible with margin on sampled boundary points of
//! |ζ| = 1. For every supported kind the feasible coefficient set is convex,
//! so a log-barrier Newton ascent from the affine disc converges to the
//! global optimum; the affine disc itself is always a valid fallback.
//!
//! Lower bound: best of the circumscribing ball, the supporting half-space
//! at the radial boundary point, and coordinate projections to the disc.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domains::{ComplexPoint, ConstraintEval, DomainSpec};
use crate::error::{Error, Result};

use super::disc::AnalyticDisc;
use super::{metric_domain, pull_back_point, pull_back_tangent, MetricBracket, MetricDomain, MetricParams};

/// Degree ladder for the automatic choice; deeper base points climb it.
const DEGREE_LADDER: [usize; 10] = [8, 12, 16, 24, 32, 40, 48, 64, 80, 96];

fn auto_degree(dist_lower: f64, boost: usize) -> usize {
    let base = if dist_lower >= 0.45 {
        0
    } else if dist_lower >= 0.25 {
        1
    } else if dist_lower >= 0.12 {
        2
    } else if dist_lower >= 0.05 {
        3
    } else if dist_lower >= 0.015 {
        4
    } else if dist_lower >= 0.004 {
        5
    } else {
        6
    };
    DEGREE_LADDER[(base + boost).min(DEGREE_LADDER.len() - 1)]
}

fn max_constraint_degree(domain: &DomainSpec) -> usize {
    match domain {
        DomainSpec::Ellipse { exponents } => *exponents.iter().max().unwrap() as usize,
        _ => 1,
    }
}

/// k_Ω(z; v) with a certified bracket. Homogeneity in v is exact by
/// construction: the optimizer runs once on v/|v| and the result scales.
pub fn infinitesimal_metric(
    domain: &DomainSpec,
    z: &ComplexPoint,
    v: &ComplexPoint,
    params: &MetricParams,
) -> Result<MetricBracket> {
    Ok(extremal_disc(domain, z, v, params)?.1)
}

/// Like `infinitesimal_metric` but also returns the winning disc (in ball
/// coordinates when the query was pulled back from the Siegel model).
pub fn extremal_disc(
    domain: &DomainSpec,
    z: &ComplexPoint,
    v: &ComplexPoint,
    params: &MetricParams,
) -> Result<(AnalyticDisc, MetricBracket)> {
    if v.dim() != domain.dim() || z.dim() != domain.dim() {
        return Err(Error::argument("metric query dimension mismatch"));
    }
    let vnorm = v.norm();
    if vnorm == 0.0 {
        return Err(Error::argument("metric direction must be nonzero"));
    }
    let solved = match metric_domain(domain)? {
        MetricDomain::Direct(d) => d,
        MetricDomain::ViaCayley { ball } => ball,
    };
    let zb = pull_back_point(domain, z)?;
    let vb = pull_back_tangent(domain, z, v)?;
    if !solved.contains(&zb)? {
        return Err(Error::precondition("metric base point must be interior"));
    }
    let vb_norm = vb.norm();
    if vb_norm == 0.0 {
        return Err(Error::numeric("tangent pull-back vanished"));
    }
    let vhat = vb.scale_re(1.0 / vb_norm);
    let lower_unit = lower_bound_unit(&solved, &zb, &vhat);
    let (c_best, coeffs) = optimize_unit(&solved, &zb, &vhat, params);
    let upper_unit = 1.0 / c_best;
    // The optimizer ran on the unit direction; |vb| carries the magnitude
    // (and the Cayley Jacobian, when the query was pulled back).
    let bracket = MetricBracket {
        estimate: upper_unit,
        lower: lower_unit.min(upper_unit),
        upper: upper_unit,
    }
    .scale(vb_norm);
    let disc = AnalyticDisc::new(coeffs)?;
    Ok((disc, bracket))
}

/// Certified lower bound for a unit direction.
pub(crate) fn lower_bound_unit(domain: &DomainSpec, z: &ComplexPoint, vhat: &ComplexPoint) -> f64 {
    let d = domain.dim();
    // Circumscribing ball B(z, R): every supported bounded kind sits in the
    // closed unit polydisc.
    let r_circ: f64 = (0..d)
        .map(|i| {
            let s = 1.0 + z.coord(i).norm();
            s * s
        })
        .sum::<f64>()
        .sqrt();
    let mut best = 1.0 / r_circ;
    // Coordinate projections Ω → D.
    for i in 0..d {
        let zi = z.coord(i).norm_sqr();
        if zi < 1.0 {
            best = best.max(vhat.coord(i).norm() / (1.0 - zi));
        }
    }
    // Supporting half-space at the radial boundary point.
    if let Ok(xstar) = domain.boundary_project(z) {
        if let Ok(df) = domain.defining_function(&xstar) {
            let lam = |p: &ComplexPoint| -> C64 {
                p.coords()
                    .iter()
                    .zip(df.gradient.coords())
                    .map(|(a, b)| a * b)
                    .sum()
            };
            let den = 2.0 * (lam(&xstar).re - lam(z).re);
            if den > 1e-300 {
                best = best.max(lam(vhat).norm() / den);
            }
        }
    }
    best
}

/// Certified affine-disc upper bound (closed form / scalar bisection only).
/// Used as the cheap integrand during path refinement.
pub(crate) fn cheap_upper_unit(domain: &DomainSpec, z: &ComplexPoint, vhat: &ComplexPoint) -> f64 {
    let rho = affine_radius_envelope(domain, z, vhat);
    if rho <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / rho
    }
}

/// Largest certified radius ρ with the affine disc z + ρζ·v̂ inside Ω.
fn affine_radius_envelope(domain: &DomainSpec, z: &ComplexPoint, vhat: &ComplexPoint) -> f64 {
    match domain {
        DomainSpec::Ball { .. } => {
            // sup_θ |z + ρe^{iθ}v̂|² = |z|² + ρ² + 2ρ|⟨v̂,z⟩| is exact.
            let b = vhat.herm(z).norm();
            let c = 1.0 - z.norm_sqr();
            if c <= 0.0 {
                0.0
            } else {
                -b + (b * b + c).sqrt()
            }
        }
        DomainSpec::Polydisc { dim } => {
            let mut rho = f64::INFINITY;
            for i in 0..*dim {
                let gap = 1.0 - z.coord(i).norm();
                let vi = vhat.coord(i).norm();
                if vi > 1e-300 {
                    rho = rho.min(gap / vi);
                }
            }
            rho.max(0.0)
        }
        DomainSpec::Ellipse { exponents } => {
            // Per-coordinate envelope Σ (|z_i| + ρ|v̂_i|)^{2m_i} ≤ 1.
            let g = |rho: f64| -> f64 {
                exponents
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| {
                        let s = z.coord(i).norm() + rho * vhat.coord(i).norm();
                        (s * s).powi(m as i32)
                    })
                    .sum::<f64>()
                    - 1.0
            };
            if g(0.0) >= 0.0 {
                return 0.0;
            }
            let mut hi = 1.0;
            while g(hi) < 0.0 && hi < 1e6 {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
        DomainSpec::Whp { .. } => 0.0,
    }
}

// ---------------------------------------------------------------------------
// The barrier-Newton disc optimizer.
// ---------------------------------------------------------------------------

struct Problem<'a> {
    domain: &'a DomainSpec,
    z: Vec<C64>,
    vhat: Vec<C64>,
    degree: usize,
    samples: usize,
    /// slack of the tightest constraint at the center, used to rescale
    /// constraints to O(1)
    r_scale: f64,
    /// feasibility margin in scaled units
    eps_s: f64,
    /// physical length of one optimizer unit (the affine radius)
    var_scale: f64,
    zeta: Vec<C64>,
}

impl<'a> Problem<'a> {
    fn dim(&self) -> usize {
        self.z.len()
    }

    fn n_params(&self) -> usize {
        1 + 2 * self.dim() * (self.degree - 1)
    }

    /// coefficient list (physical units) from the scaled parameter vector
    fn coefficients(&self, x: &[f64]) -> Vec<ComplexPoint> {
        let d = self.dim();
        let mut coeffs = Vec::with_capacity(self.degree + 1);
        coeffs.push(ComplexPoint::new(self.z.clone()).unwrap());
        let c = x[0] * self.var_scale;
        coeffs.push(
            ComplexPoint::new(self.vhat.iter().map(|v| v * c).collect()).unwrap(),
        );
        for m in 2..=self.degree {
            let mut row = Vec::with_capacity(d);
            for i in 0..d {
                let base = 1 + 2 * ((m - 2) * d + i);
                row.push(C64::new(x[base], x[base + 1]) * self.var_scale);
            }
            coeffs.push(ComplexPoint::new(row).unwrap());
        }
        coeffs
    }

    fn eval_disc(&self, x: &[f64], zeta: C64) -> Vec<C64> {
        let d = self.dim();
        let mut acc = vec![C64::new(0.0, 0.0); d];
        for m in (2..=self.degree).rev() {
            for i in 0..d {
                let base = 1 + 2 * ((m - 2) * d + i);
                acc[i] = acc[i] * zeta + C64::new(x[base], x[base + 1]);
            }
        }
        let c = x[0];
        for i in 0..d {
            acc[i] = (acc[i] * zeta + self.vhat[i] * c) * zeta * self.var_scale + self.z[i];
        }
        acc
    }

    /// All scaled slacks; None if any constraint is violated.
    fn slacks(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n_c = self.domain.constraint_count();
        let mut out = Vec::with_capacity(self.samples * n_c);
        let mut ev = ConstraintEval::default();
        for &zeta in &self.zeta {
            let f = self.eval_disc(x, zeta);
            for i in 0..n_c {
                self.domain.constraint_eval(i, &f, &mut ev);
                let s = -self.eps_s - ev.value / self.r_scale;
                if s <= 0.0 {
                    return None;
                }
                out.push(s);
            }
        }
        Some(out)
    }

    fn barrier_value(&self, x: &[f64], mu: f64) -> Option<f64> {
        let slacks = self.slacks(x)?;
        Some(x[0] + mu * slacks.iter().map(|s| s.ln()).sum::<f64>())
    }

    /// Gradient and Hessian of the barrier at x (maximization form:
    /// H is positive semidefinite, step = H⁻¹ grad).
    fn barrier_system(
        &self,
        x: &[f64],
        mu: f64,
        grad: &mut [f64],
        hess: &mut nalgebra::DMatrix<f64>,
    ) -> bool {
        let d = self.dim();
        let p = self.n_params();
        let n_c = self.domain.constraint_count();
        grad.fill(0.0);
        grad[0] = 1.0;
        hess.fill(0.0);
        let kappa = self.var_scale / self.r_scale;
        let mut ev = ConstraintEval::default();
        let mut gvec = vec![0.0; p];
        // powers up to 2·degree feed the curvature terms pow[m1 + m2]
        let mut pow = vec![C64::new(0.0, 0.0); 2 * self.degree + 2];
        for &zeta in &self.zeta {
            pow[0] = C64::new(1.0, 0.0);
            for m in 1..=2 * self.degree + 1 {
                pow[m] = pow[m - 1] * zeta;
            }
            let f = self.eval_disc(x, zeta);
            for ic in 0..n_c {
                self.domain.constraint_eval(ic, &f, &mut ev);
                let s = -self.eps_s - ev.value / self.r_scale;
                if s <= 0.0 {
                    return false;
                }
                let w1 = mu / s;
                let w2 = mu / (s * s);
                // first-order coefficients of the scaled constraint
                let gv: C64 = (0..d).map(|i| ev.grad[i] * self.vhat[i]).sum::<C64>() * pow[1];
                gvec[0] = 2.0 * kappa * gv.re;
                for m in 2..=self.degree {
                    for i in 0..d {
                        let t = ev.grad[i] * pow[m] * kappa;
                        let base = 1 + 2 * ((m - 2) * d + i);
                        gvec[base] = 2.0 * t.re;
                        gvec[base + 1] = -2.0 * t.im;
                    }
                }
                for (gslot, &gval) in grad.iter_mut().zip(gvec.iter()) {
                    *gslot -= w1 * gval;
                }
                // rank-one part of the Hessian (upper triangle)
                for a in 0..p {
                    let ga = gvec[a];
                    if ga == 0.0 {
                        continue;
                    }
                    let row = w2 * ga;
                    for b in a..p {
                        hess[(a, b)] += row * gvec[b];
                    }
                }
                // curvature part: coordinate-diagonal complex Hessians
                let kap2 = kappa * self.var_scale;
                for i in 0..d {
                    let holo = ev.holo_diag[i];
                    let mixed = ev.mixed_diag[i];
                    if holo.norm_sqr() == 0.0 && mixed == 0.0 {
                        continue;
                    }
                    let vi = self.vhat[i];
                    let h00a = holo * vi * vi * pow[2];
                    let h00b = mixed * vi.norm_sqr();
                    hess[(0, 0)] += w1 * kap2 * (2.0 * h00a.re + 2.0 * h00b);
                    for m in 2..=self.degree {
                        let base = 1 + 2 * ((m - 2) * d + i);
                        let a_term = holo * vi * pow[m + 1];
                        let b_term = mixed * vi * pow[1] * pow[m].conj();
                        // d/dc crossed with Re/Im of a_{m,i}
                        let cr = 2.0 * (a_term.re + b_term.re) * w1 * kap2;
                        let ci = 2.0 * (-a_term.im + b_term.im) * w1 * kap2;
                        hess[(0, base)] += cr;
                        hess[(0, base + 1)] += ci;
                        for m2 in m..=self.degree {
                            let base2 = 1 + 2 * ((m2 - 2) * d + i);
                            let aa = holo * pow[m + m2];
                            let bb = mixed * (pow[m] * pow[m2].conj());
                            let rr = 2.0 * (aa.re + bb.re) * w1 * kap2;
                            let ri = 2.0 * (-aa.im + bb.im) * w1 * kap2;
                            let ir = 2.0 * (-aa.im - bb.im) * w1 * kap2;
                            let ii = 2.0 * (-aa.re + bb.re) * w1 * kap2;
                            if base2 == base {
                                hess[(base, base)] += rr;
                                hess[(base, base + 1)] += ri;
                                hess[(base + 1, base + 1)] += ii;
                            } else {
                                hess[(base, base2)] += rr;
                                hess[(base, base2 + 1)] += ri;
                                hess[(base + 1, base2)] += ir;
                                hess[(base + 1, base2 + 1)] += ii;
                            }
                        }
                    }
                }
            }
        }
        // mirror the upper triangle
        for a in 0..p {
            for b in a + 1..p {
                hess[(b, a)] = hess[(a, b)];
            }
        }
        true
    }
}

/// Returns (best |f′(0)| along v̂, the winning coefficient list).
fn optimize_unit(
    domain: &DomainSpec,
    z: &ComplexPoint,
    vhat: &ComplexPoint,
    params: &MetricParams,
) -> (f64, Vec<ComplexPoint>) {
    let d = domain.dim();
    let n_c = domain.constraint_count();
    let mut ev = ConstraintEval::default();
    let mut r_scale = f64::INFINITY;
    for i in 0..n_c {
        domain.constraint_eval(i, z.coords(), &mut ev);
        r_scale = r_scale.min(-ev.value);
    }
    debug_assert!(r_scale > 0.0);
    let margin = (1e-6f64).min(0.5 * r_scale);
    let dist_lower = {
        let (lo, _) = domain
            .euclidean_boundary_distance_bracket(z)
            .unwrap_or((r_scale / 4.0, 1.0));
        lo
    };
    let degree = params
        .degree
        .unwrap_or_else(|| auto_degree(dist_lower, params.degree_boost))
        .max(1);
    let samples = params
        .boundary_samples
        .max(4 * degree * max_constraint_degree(domain))
        .max(16);
    let zeta: Vec<C64> = (0..samples)
        .map(|j| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / samples as f64))
        .collect();

    // Affine start: certified bisection on the margin-checked radius.
    let feasible_affine = |rho: f64| -> bool {
        let mut ev = ConstraintEval::default();
        for &zt in &zeta {
            let f: Vec<C64> = (0..d).map(|i| z.coord(i) + vhat.coord(i) * rho * zt).collect();
            for i in 0..n_c {
                domain.constraint_eval(i, &f, &mut ev);
                if ev.value > -margin {
                    return false;
                }
            }
        }
        true
    };
    let mut hi = 1.0;
    let mut guard = 0;
    while feasible_affine(hi) {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            break;
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if feasible_affine(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho_affine = lo;
    if rho_affine <= 0.0 {
        // Unreachable for interior points; fall back to the inscribed
        // Euclidean ball, which is certified by the distance bracket.
        let tiny = 0.9 * dist_lower;
        let coeffs = vec![z.clone(), vhat.scale_re(tiny)];
        return (tiny, coeffs);
    }

    let problem = Problem {
        domain,
        z: z.coords().to_vec(),
        vhat: vhat.coords().to_vec(),
        degree,
        samples,
        r_scale,
        eps_s: margin / r_scale,
        var_scale: rho_affine,
        zeta,
    };

    let p = problem.n_params();
    let start = {
        let mut x0 = vec![0.0; p];
        x0[0] = 0.95;
        while problem.slacks(&x0).is_none() && x0[0] > 1e-6 {
            x0[0] *= 0.9;
        }
        x0
    };

    let mut best_c = start[0];
    let mut best_x = start.clone();
    let run = |x0: Vec<f64>, best_c: &mut f64, best_x: &mut Vec<f64>| {
        if problem.slacks(&x0).is_none() {
            return;
        }
        if let Some(x) = barrier_ascent(&problem, x0, params.iterations) {
            if x[0] > *best_c && problem.slacks(&x).is_some() {
                *best_c = x[0];
                *best_x = x;
            }
        }
    };
    run(start.clone(), &mut best_c, &mut best_x);
    // Extra seeded starts; redundant for the convex kinds but kept for the
    // determinism contract (per-start seeds by counter, fixed merge order).
    for s in 0..params.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(s as u64 + 1));
        let mut x0 = start.clone();
        for (i, slot) in x0.iter_mut().enumerate().skip(1) {
            let m = 2 + (i - 1) / (2 * d);
            *slot += 0.1 / (m * m) as f64 * rng.gen_range(-1.0..1.0);
        }
        let mut shrink = 0;
        while problem.slacks(&x0).is_none() && shrink < 30 {
            for slot in x0.iter_mut().skip(1) {
                *slot *= 0.5;
            }
            shrink += 1;
        }
        run(x0, &mut best_c, &mut best_x);
    }

    let c_phys = best_c * problem.var_scale;
    (c_phys, problem.coefficients(&best_x))
}

fn barrier_ascent(problem: &Problem, mut x: Vec<f64>, iter_cap: usize) -> Option<Vec<f64>> {
    let p = problem.n_params();
    let mut grad = vec![0.0; p];
    let mut hess = nalgebra::DMatrix::<f64>::zeros(p, p);
    let mut mu = 0.1;
    let mu_final = 2e-8;
    while mu > mu_final {
        for _ in 0..iter_cap {
            if !problem.barrier_system(&x, mu, &mut grad, &mut hess) {
                return Some(x);
            }
            let mut ridge = 1e-12;
            let step = loop {
                let mut h = hess.clone();
                for i in 0..p {
                    h[(i, i)] += ridge;
                }
                match h.cholesky() {
                    Some(ch) => {
                        let g = nalgebra::DVector::from_column_slice(&grad);
                        break Some(ch.solve(&g));
                    }
                    None => {
                        ridge *= 100.0;
                        if ridge > 1e3 {
                            break None;
                        }
                    }
                }
            };
            let step = match step {
                Some(s) => s,
                None => return Some(x),
            };
            let decrement: f64 = grad.iter().zip(step.iter()).map(|(a, b)| a * b).sum();
            if decrement <= 1e-11 {
                break;
            }
            let base = problem.barrier_value(&x, mu)?;
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..50 {
                let cand: Vec<f64> = x
                    .iter()
                    .zip(step.iter())
                    .map(|(xi, si)| xi + alpha * si)
                    .collect();
                if let Some(val) = problem.barrier_value(&cand, mu) {
                    if val > base + 1e-4 * alpha * decrement {
                        x = cand;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        mu /= 6.0;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(re: &[f64]) -> ComplexPoint {
        ComplexPoint::from_reals(re)
    }

    fn cpt(c: Vec<C64>) -> ComplexPoint {
        ComplexPoint::new(c).unwrap()
    }

    /// Exact ball metric by the Schwarz–Pick slice oracle.
    pub(crate) fn ball_metric_oracle(z: &ComplexPoint, v: &ComplexPoint) -> f64 {
        let z2 = z.norm_sqr();
        let inner = v.herm(z).norm_sqr();
        ((v.norm_sqr() * (1.0 - z2) + inner).sqrt()) / (1.0 - z2)
    }

    #[test]
    fn ball_center_metric_is_one() {
        let b2 = DomainSpec::ball(2);
        let br = infinitesimal_metric(
            &b2,
            &ComplexPoint::origin(2),
            &pt(&[1.0, 0.0]),
            &MetricParams::default(),
        )
        .unwrap();
        assert!((br.estimate - 1.0).abs() < 1e-3, "estimate {}", br.estimate);
        assert!(br.lower <= 1.0 && 1.0 <= br.upper + 1e-9);
    }

    #[test]
    fn disc_schwarz_pick_value() {
        let b1 = DomainSpec::ball(1);
        let br = infinitesimal_metric(&b1, &pt(&[0.5]), &pt(&[1.0]), &MetricParams::default())
            .unwrap();
        let exact = 4.0 / 3.0;
        assert!(br.lower <= exact && exact <= br.upper);
        assert!(
            (br.estimate - exact).abs() / exact < 0.02,
            "estimate {} vs {}",
            br.estimate,
            exact
        );
    }

    #[test]
    fn polydisc_product_formula() {
        let p2 = DomainSpec::polydisc(2);
        let br = infinitesimal_metric(
            &p2,
            &ComplexPoint::origin(2),
            &pt(&[1.0, 1.0]),
            &MetricParams::default(),
        )
        .unwrap();
        // k = max(|v_1|/(1−|z_1|²), |v_2|/(1−|z_2|²)) = 1
        assert!(br.lower <= 1.0 + 1e-12 && 1.0 <= br.upper + 1e-9);
        assert!((br.estimate - 1.0).abs() < 0.02);
    }

    #[test]
    fn homogeneity_is_exact_by_construction() {
        let b2 = DomainSpec::ball(2);
        let z = cpt(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.25)]);
        let v = cpt(vec![C64::new(0.4, -0.7), C64::new(0.1, 0.2)]);
        let params = MetricParams::default();
        let k1 = infinitesimal_metric(&b2, &z, &v, &params).unwrap();
        let c = C64::new(-2.7, 1.3);
        let k2 = infinitesimal_metric(&b2, &z, &v.scale(c), &params).unwrap();
        let ratio = k2.estimate / k1.estimate;
        assert!(
            (ratio - c.norm()).abs() <= 1e-9 * c.norm(),
            "homogeneity broke: {ratio} vs {}",
            c.norm()
        );
    }

    #[test]
    fn brackets_contain_ball_oracle_on_random_queries() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let b2 = DomainSpec::ball(2);
        let params = MetricParams::default();
        for _ in 0..40 {
            let z = loop {
                let p = cpt(vec![
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                ]);
                if p.norm() < 0.9 {
                    break p;
                }
            };
            let v = cpt(vec![
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]);
            if v.norm() < 1e-3 {
                continue;
            }
            let exact = ball_metric_oracle(&z, &v);
            let br = infinitesimal_metric(&b2, &z, &v, &params).unwrap();
            assert!(
                br.lower <= exact * (1.0 + 1e-9) && exact <= br.upper * (1.0 + 1e-9),
                "bracket [{}, {}] misses {}",
                br.lower,
                br.upper,
                exact
            );
            assert!(
                (br.estimate - exact).abs() / exact < 0.02,
                "estimate {} vs exact {} at |z|={}",
                br.estimate,
                exact,
                z.norm()
            );
        }
    }

    #[test]
    fn extremal_disc_is_feasible_and_anchored() {
        let b2 = DomainSpec::ball(2);
        let z = cpt(vec![C64::new(0.4, 0.2), C64::new(0.1, -0.3)]);
        let v = pt(&[1.0, 0.5]);
        let (disc, _) = extremal_disc(&b2, &z, &v, &MetricParams::default()).unwrap();
        assert!(disc.center().dist(&z) < 1e-14);
        let margin = disc.feasibility_margin(&b2, 512).unwrap();
        assert!(margin < 0.0, "winning disc infeasible: margin {margin}");
        // f'(0) parallel to v
        let d0 = disc.derivative0();
        let cross = d0.coord(0) * v.coord(1) - d0.coord(1) * v.coord(0);
        assert!(cross.norm() < 1e-9 * d0.norm());
    }

    #[test]
    fn siegel_queries_pull_back_to_the_ball() {
        let s = DomainSpec::siegel(2);
        // cayley(0) = (i, 0); the metric there must match the ball at 0.
        let z = cpt(vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)]);
        let v = cpt(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        let br = infinitesimal_metric(&s, &z, &v, &MetricParams::default()).unwrap();
        // d(cayley⁻¹) at (i,0) maps (0, dz) to (0, 2i dz/(2i)) = (0, dz): k = 1/2?
        // cayley_inverse_tangent: ζ_j = 2i z_j/(w+i): ∂ζ_j/∂z_j = 2i/(2i) = 1.
        assert!(br.lower <= 1.0 + 1e-9 && 1.0 <= br.upper + 1e-9);
        assert!((br.estimate - 1.0).abs() < 0.02);
        // non-Siegel WHP must reject metric queries
        let w = DomainSpec::whp(2, vec![1, 4], vec![(vec![2], vec![2], 1.0)]).unwrap();
        let p = cpt(vec![C64::new(0.0, 2.0), C64::new(0.1, 0.0)]);
        assert!(infinitesimal_metric(&w, &p, &v, &MetricParams::default()).is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        let b1 = DomainSpec::ball(1);
        let params = MetricParams::default();
        assert!(infinitesimal_metric(&b1, &pt(&[0.5]), &pt(&[0.0]), &params).is_err());
        assert!(infinitesimal_metric(&b1, &pt(&[1.5]), &pt(&[1.0]), &params).is_err());
    }
}
