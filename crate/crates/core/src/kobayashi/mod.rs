//! Kobayashi infinitesimal metric, curve length, and pseudo-distance with
//! certified upper/lower brackets, plus almost-geodesic production and
//! verification and the boundary-visibility probe.
//!
//! Upper bounds come from feasible analytic discs (polynomial competitors in
//! the defining infimum) and from lengths of explicit paths; lower bounds
//! come from certified comparison maps: a circumscribing ball, supporting
//! half-spaces of the convex kinds, and coordinate projections to the unit
//! disc. Every randomized search takes an explicit seed.

mod almost;
mod disc;
mod metric;
mod path;

pub use almost::{
    geodesic_path, verify_almost_geodesic, visibility_probe, AlmostGeodesicCheck, VisibilityReport,
};
pub use disc::AnalyticDisc;
pub use metric::{extremal_disc, infinitesimal_metric};
pub use path::{
    distance_lower_bound, kobayashi_distance, path_length, quick_upper_distance, PathCurve,
};

use serde::{Deserialize, Serialize};

use crate::domains::{cayley_inverse, cayley_inverse_tangent, ComplexPoint, DomainSpec};
use crate::error::{Error, Result};

/// A certified two-sided estimate: lower ≤ (true value) ≤ upper, with
/// `estimate` the best computed value (here always the optimized upper).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MetricBracket {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl MetricBracket {
    pub fn zero() -> Self {
        MetricBracket {
            estimate: 0.0,
            lower: 0.0,
            upper: 0.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub(crate) fn scale(&self, s: f64) -> MetricBracket {
        MetricBracket {
            estimate: self.estimate * s,
            lower: self.lower * s,
            upper: self.upper * s,
        }
    }

    pub(crate) fn add(&self, other: &MetricBracket) -> MetricBracket {
        MetricBracket {
            estimate: self.estimate + other.estimate,
            lower: self.lower + other.lower,
            upper: self.upper + other.upper,
        }
    }
}

/// Tuning knobs for the disc optimizer behind `infinitesimal_metric`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricParams {
    /// Disc degree; `None` picks a degree from the base point's boundary
    /// distance (deeper points need less).
    pub degree: Option<usize>,
    /// Notches added to the automatic degree ladder (high-accuracy callers).
    pub degree_boost: usize,
    /// Boundary samples certifying disc feasibility (raised automatically
    /// when the disc degree needs denser sampling).
    pub boundary_samples: usize,
    /// Newton iteration cap per barrier level.
    pub iterations: usize,
    /// Extra seeded starts beyond the affine disc.
    pub starts: usize,
    pub seed: u64,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            degree: None,
            degree_boost: 0,
            boundary_samples: 256,
            iterations: 40,
            starts: 0,
            seed: 0,
        }
    }
}

/// Tuning knobs for distance/path computations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceParams {
    /// Piecewise-linear node count.
    pub segments: usize,
    /// Refinement rounds (node sweeps + reparameterization).
    pub rounds: usize,
    pub metric: MetricParams,
}

impl Default for DistanceParams {
    fn default() -> Self {
        DistanceParams {
            segments: 64,
            rounds: 3,
            metric: MetricParams::default(),
        }
    }
}

/// Resolves which bounded domain the metric machinery actually runs on:
/// bounded kinds pass through, the Siegel model pulls back to the ball.
pub(crate) enum MetricDomain {
    Direct(DomainSpec),
    ViaCayley { ball: DomainSpec },
}

pub(crate) fn metric_domain(domain: &DomainSpec) -> Result<MetricDomain> {
    if domain.is_bounded() {
        return Ok(MetricDomain::Direct(domain.clone()));
    }
    if domain.is_siegel() {
        return Ok(MetricDomain::ViaCayley {
            ball: DomainSpec::ball(domain.dim()),
        });
    }
    Err(Error::argument(
        "metric queries on WHP domains are only supported for the Siegel model",
    ))
}

pub(crate) fn pull_back_point(domain: &DomainSpec, z: &ComplexPoint) -> Result<ComplexPoint> {
    match metric_domain(domain)? {
        MetricDomain::Direct(_) => Ok(z.clone()),
        MetricDomain::ViaCayley { .. } => cayley_inverse(z),
    }
}

pub(crate) fn pull_back_tangent(
    domain: &DomainSpec,
    z: &ComplexPoint,
    v: &ComplexPoint,
) -> Result<ComplexPoint> {
    match metric_domain(domain)? {
        MetricDomain::Direct(_) => Ok(v.clone()),
        MetricDomain::ViaCayley { .. } => cayley_inverse_tangent(z, v),
    }
}
