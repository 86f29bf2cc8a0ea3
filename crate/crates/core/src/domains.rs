//! Explicit model domains: the unit ball, the unit polydisc, generalized
//! ellipses `{ Σ|z_i|^{2m_i} < 1 }`, and weighted homogeneous polynomial
//! domains `{ Im w > p(z) }` in Siegel form.
//!
//! Each kind carries a fixed canonical defining function `r` with membership
//! convention `r(z) < 0 ⇔ z ∈ Ω`, an analytic Wirtinger gradient, and the
//! boundary machinery (ray projection, certified distance brackets, complex
//! tangent bases) the metric and dynamics modules build on.

use num_complex::Complex64 as C64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Boundary tolerance used by operations that require on-boundary inputs.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Target residual for boundary projection.
pub const PROJECTION_TOL: f64 = 1e-10;
/// Gradient magnitude below this is treated as degenerate.
pub const DEGENERATE_GRAD: f64 = 1e-12;

/// A point of C^d as an ordered list of complex coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoint {
    coords: Vec<C64>,
}

impl ComplexPoint {
    /// Builds a point, rejecting empty or non-finite coordinate lists.
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::argument("a point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::argument("point coordinates must be finite"));
        }
        Ok(ComplexPoint { coords })
    }

    /// Origin of C^d.
    pub fn origin(dim: usize) -> Self {
        ComplexPoint {
            coords: vec![C64::new(0.0, 0.0); dim],
        }
    }

    pub fn from_reals(re: &[f64]) -> Self {
        ComplexPoint {
            coords: re.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> C64 {
        self.coords[i]
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Hermitian inner product ⟨z, w⟩ = Σ z_i conj(w_i).
    pub fn herm(&self, other: &ComplexPoint) -> C64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn add(&self, other: &ComplexPoint) -> ComplexPoint {
        ComplexPoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ComplexPoint) -> ComplexPoint {
        ComplexPoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> ComplexPoint {
        ComplexPoint {
            coords: self.coords.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> ComplexPoint {
        self.scale(C64::new(s, 0.0))
    }

    /// Euclidean distance to another point.
    pub fn dist(&self, other: &ComplexPoint) -> f64 {
        self.sub(other).norm()
    }

    /// First `k` coordinates (the split z^k used by ellipse automorphisms).
    pub fn head(&self, k: usize) -> ComplexPoint {
        ComplexPoint {
            coords: self.coords[..k].to_vec(),
        }
    }
}

impl Serialize for ComplexPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coords.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        ComplexPoint::new(pairs.iter().map(|p| C64::new(p[0], p[1])).collect())
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// One WHP monomial `c · z^α · z̄^β` (multi-indices over the z variables).
pub type Monomial = (Vec<u32>, Vec<u32>, f64);

/// Supported domain kinds with their defining data.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    /// Unit ball of C^d, r = |z|² − 1.
    Ball { dim: usize },
    /// Unit polydisc of C^d, r = max_i |z_i|² − 1.
    Polydisc { dim: usize },
    /// Generalized ellipse { Σ|z_i|^{2m_i} < 1 }, exponents normalized
    /// m_1 = … = m_k = 1 < m_{k+1} ≤ … ≤ m_d.
    Ellipse { exponents: Vec<u32> },
    /// Siegel-type domain { Im w > p(z) } in C × C^{d−1}; `weights[0]` is the
    /// w weight (always 1), `weights[1..]` the z weights, and monomials are
    /// Hermitian-symmetric so p is real-valued.
    Whp {
        dim: usize,
        weights: Vec<u32>,
        monomials: Vec<Monomial>,
    },
}

impl DomainSpec {
    pub fn ball(dim: usize) -> Self {
        DomainSpec::Ball { dim }
    }

    pub fn polydisc(dim: usize) -> Self {
        DomainSpec::Polydisc { dim }
    }

    pub fn ellipse(exponents: Vec<u32>) -> Result<Self> {
        let d = DomainSpec::Ellipse { exponents };
        d.validate()?;
        Ok(d)
    }

    /// The Siegel model { Im w > |z|² } biholomorphic to Ball(dim) via `cayley`.
    pub fn siegel(dim: usize) -> Self {
        let mut monomials = Vec::new();
        for j in 0..dim - 1 {
            let mut alpha = vec![0u32; dim - 1];
            alpha[j] = 1;
            monomials.push((alpha.clone(), alpha, 1.0));
        }
        let mut weights = vec![2u32; dim];
        weights[0] = 1;
        DomainSpec::Whp {
            dim,
            weights,
            monomials,
        }
    }

    /// Builds a WHP domain, symmetrizing the monomial list so p is real.
    pub fn whp(dim: usize, weights: Vec<u32>, monomials: Vec<Monomial>) -> Result<Self> {
        let mut sym: Vec<Monomial> = Vec::new();
        for (a, b, c) in monomials {
            if a == b {
                sym.push((a, b, c));
            } else {
                sym.push((a.clone(), b.clone(), c / 2.0));
                sym.push((b, a, c / 2.0));
            }
        }
        let d = DomainSpec::Whp {
            dim,
            weights,
            monomials: sym,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Ball { dim } | DomainSpec::Polydisc { dim } | DomainSpec::Whp { dim, .. } => {
                *dim
            }
            DomainSpec::Ellipse { exponents } => exponents.len(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, DomainSpec::Whp { .. })
    }

    /// True when this WHP spec is exactly the Siegel model { Im w > |z|² }.
    pub fn is_siegel(&self) -> bool {
        match self {
            DomainSpec::Whp {
                dim,
                weights,
                monomials,
            } => {
                let expect = DomainSpec::siegel(*dim);
                if let DomainSpec::Whp {
                    weights: ew,
                    monomials: em,
                    ..
                } = &expect
                {
                    let mut got = monomials.clone();
                    let mut want = em.clone();
                    got.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
                    want.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
                    weights == ew && got == want
                } else {
                    unreachable!()
                }
            }
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Ball { dim } | DomainSpec::Polydisc { dim } => {
                if *dim == 0 {
                    return Err(Error::argument("dimension must be at least 1"));
                }
            }
            DomainSpec::Ellipse { exponents } => {
                if exponents.is_empty() {
                    return Err(Error::argument("ellipse needs at least one exponent"));
                }
                if exponents[0] != 1 {
                    return Err(Error::argument(
                        "ellipse exponents must start with the block of 1s (m_1 = 1)",
                    ));
                }
                if exponents.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::argument("ellipse exponents must be sorted ascending"));
                }
                if exponents.iter().any(|&m| m == 0) {
                    return Err(Error::argument("ellipse exponents must be positive"));
                }
            }
            DomainSpec::Whp {
                dim,
                weights,
                monomials,
            } => {
                if *dim < 2 {
                    return Err(Error::argument("a WHP domain lives in C × C^{d−1}, d ≥ 2"));
                }
                if weights.len() != *dim {
                    return Err(Error::argument("WHP needs one weight per coordinate"));
                }
                if weights[0] != 1 {
                    return Err(Error::argument("the w coordinate carries weight 1"));
                }
                if weights.iter().any(|&m| m == 0) {
                    return Err(Error::argument("WHP weights must be positive"));
                }
                for (a, b, c) in monomials {
                    if a.len() != dim - 1 || b.len() != dim - 1 {
                        return Err(Error::argument(
                            "WHP monomial multi-indices must have length dim−1",
                        ));
                    }
                    if !c.is_finite() {
                        return Err(Error::argument("WHP coefficients must be finite"));
                    }
                    // Hermitian symmetry: the conjugate monomial appears with the
                    // same total coefficient, so p(z, z̄) is real.
                    let ca: f64 = monomials
                        .iter()
                        .filter(|(x, y, _)| x == a && y == b)
                        .map(|(_, _, c)| *c)
                        .sum();
                    let cb: f64 = monomials
                        .iter()
                        .filter(|(x, y, _)| x == b && y == a)
                        .map(|(_, _, c)| *c)
                        .sum();
                    if (ca - cb).abs() > 0.0 {
                        return Err(Error::argument(
                            "WHP monomial list is not Hermitian-symmetric (p would not be real)",
                        ));
                    }
                    // Weighted homogeneity: Σ (α_j + β_j)/m_j = 1 per monomial.
                    let s: f64 = a
                        .iter()
                        .zip(b)
                        .zip(&weights[1..])
                        .map(|((&aj, &bj), &mj)| (aj + bj) as f64 / mj as f64)
                        .sum();
                    if (s - 1.0).abs() > 1e-12 {
                        return Err(Error::argument(format!(
                            "monomial violates weighted homogeneity: Σ(α+β)/m = {s}, want 1"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_dim(&self, z: &ComplexPoint) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(Error::argument(format!(
                "point has dimension {}, domain has dimension {}",
                z.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Evaluates the WHP polynomial p(z, z̄) over the z block (length dim−1).
    pub fn whp_poly(&self, zs: &[C64]) -> f64 {
        match self {
            DomainSpec::Whp { monomials, .. } => {
                let mut total = 0.0;
                for (a, b, c) in monomials {
                    let mut term = C64::new(*c, 0.0);
                    for (j, z) in zs.iter().enumerate() {
                        term *= z.powu(a[j]) * z.conj().powu(b[j]);
                    }
                    total += term.re;
                }
                total
            }
            _ => unreachable!("whp_poly on non-WHP domain"),
        }
    }

    /// Strict membership r(z) < 0.
    pub fn contains(&self, z: &ComplexPoint) -> Result<bool> {
        Ok(self.defining_function(z)?.value < 0.0)
    }

    /// Canonical defining function value and Wirtinger gradient ∂r.
    pub fn defining_function(&self, z: &ComplexPoint) -> Result<DefiningFunctionValue> {
        self.check_dim(z)?;
        let c = z.coords();
        match self {
            DomainSpec::Ball { .. } => {
                let value = z.norm_sqr() - 1.0;
                let gradient = ComplexPoint::new(c.iter().map(|zi| zi.conj()).collect())?;
                Ok(DefiningFunctionValue { value, gradient })
            }
            DomainSpec::Polydisc { dim } => {
                let (imax, max) = c
                    .iter()
                    .map(|zi| zi.norm_sqr())
                    .enumerate()
                    .fold((0usize, f64::MIN), |acc, (i, v)| {
                        if v > acc.1 {
                            (i, v)
                        } else {
                            acc
                        }
                    });
                let mut grad = vec![C64::new(0.0, 0.0); *dim];
                grad[imax] = c[imax].conj();
                Ok(DefiningFunctionValue {
                    value: max - 1.0,
                    gradient: ComplexPoint::new(grad)?,
                })
            }
            DomainSpec::Ellipse { exponents } => {
                let mut value = -1.0;
                let mut grad = Vec::with_capacity(c.len());
                for (zi, &m) in c.iter().zip(exponents) {
                    let m = m as i32;
                    let zz = zi.norm_sqr();
                    value += zz.powi(m);
                    grad.push(zi.conj() * (m as f64) * zz.powi(m - 1));
                }
                Ok(DefiningFunctionValue {
                    value,
                    gradient: ComplexPoint::new(grad)?,
                })
            }
            DomainSpec::Whp { monomials, dim, .. } => {
                let w = c[0];
                let zs = &c[1..];
                let value = self.whp_poly(zs) - w.im;
                let mut grad = vec![C64::new(0.0, 0.5); 1]; // ∂(−Im w)/∂w = i/2
                for j in 0..dim - 1 {
                    let mut g = C64::new(0.0, 0.0);
                    for (a, b, coef) in monomials {
                        if a[j] == 0 {
                            continue;
                        }
                        let mut term = C64::new(*coef * a[j] as f64, 0.0);
                        for (l, zl) in zs.iter().enumerate() {
                            let e = if l == j { a[l] - 1 } else { a[l] };
                            term *= zl.powu(e) * zl.conj().powu(b[l]);
                        }
                        g += term;
                    }
                    grad.push(g);
                }
                Ok(DefiningFunctionValue {
                    value,
                    gradient: ComplexPoint::new(grad)?,
                })
            }
        }
    }

    /// Star-shaped interior anchor used for ray projections.
    pub fn anchor(&self) -> ComplexPoint {
        match self {
            DomainSpec::Ball { dim } | DomainSpec::Polydisc { dim } => ComplexPoint::origin(*dim),
            DomainSpec::Ellipse { exponents } => ComplexPoint::origin(exponents.len()),
            DomainSpec::Whp { dim, .. } => {
                // (i·s, 0) with s above the p-scale on the unit z-polydisc.
                let ones = vec![C64::new(1.0, 0.0); dim - 1];
                let scale = 1.0 + self.whp_poly(&ones).abs();
                let mut coords = vec![C64::new(0.0, 0.0); *dim];
                coords[0] = C64::new(0.0, scale);
                ComplexPoint { coords }
            }
        }
    }

    /// Projects an interior point to the boundary along the anchor ray.
    pub fn boundary_project(&self, z: &ComplexPoint) -> Result<ComplexPoint> {
        self.check_dim(z)?;
        if !self.is_bounded() {
            return Err(Error::precondition(
                "boundary projection requires a bounded domain kind",
            ));
        }
        if !self.contains(z)? {
            return Err(Error::precondition("boundary_project needs an interior point"));
        }
        let anchor = self.anchor();
        let dir = z.sub(&anchor);
        if dir.norm() < 1e-300 {
            // z is the anchor itself: project along the first coordinate axis.
            let mut d = vec![C64::new(0.0, 0.0); self.dim()];
            d[0] = C64::new(1.0, 0.0);
            return self.ray_to_boundary(&anchor, &ComplexPoint { coords: d });
        }
        self.ray_to_boundary(&anchor, &dir)
    }

    /// First boundary crossing of t ↦ base + t·dir, t > 0, to |r| ≤ 1e-10.
    pub(crate) fn ray_to_boundary(
        &self,
        base: &ComplexPoint,
        dir: &ComplexPoint,
    ) -> Result<ComplexPoint> {
        let at = |t: f64| base.add(&dir.scale_re(t));
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut guard = 0;
        while self.defining_function(&at(hi))?.value < 0.0 {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::numeric("ray never crosses the boundary"));
            }
        }
        // Bisection; the defining functions are strictly increasing along
        // outward rays for the star-shaped kinds.
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let rv = self.defining_function(&at(mid))?.value;
            if rv.abs() <= PROJECTION_TOL {
                return Ok(at(mid));
            }
            if rv < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = at(0.5 * (lo + hi));
        if self.defining_function(&x)?.value.abs() <= 1e-8 {
            Ok(x)
        } else {
            Err(Error::numeric("boundary bisection stalled"))
        }
    }

    /// Certified Lipschitz bound of r over the closure (bounded kinds).
    fn lipschitz_bound(&self) -> f64 {
        match self {
            DomainSpec::Ball { .. } | DomainSpec::Polydisc { .. } => 2.0,
            // |∂_i r| = m_i |z_i|^{2m_i−1} ≤ m_i on the closed unit polydisc.
            DomainSpec::Ellipse { exponents } => {
                2.0 * exponents
                    .iter()
                    .map(|&m| (m as f64) * (m as f64))
                    .sum::<f64>()
                    .sqrt()
            }
            DomainSpec::Whp { .. } => f64::INFINITY,
        }
    }

    /// Bracket lower ≤ dist(z, ∂Ω) ≤ upper for interior points of bounded kinds.
    ///
    /// The upper bound is the nearest boundary hit over the anchor ray and the
    /// 4d coordinate rays from z; the lower bound is |r(z)| over the Lipschitz
    /// bound of r on the closure.
    pub fn euclidean_boundary_distance_bracket(&self, z: &ComplexPoint) -> Result<(f64, f64)> {
        self.check_dim(z)?;
        if !self.is_bounded() {
            return Err(Error::precondition(
                "boundary distance bracket requires a bounded domain kind",
            ));
        }
        let rv = self.defining_function(z)?.value;
        if rv >= 0.0 {
            return Err(Error::precondition("point is not interior"));
        }
        let lower = -rv / self.lipschitz_bound();
        let mut upper = f64::INFINITY;
        let mut probe = |dir: ComplexPoint| -> Result<()> {
            if dir.norm() < 1e-300 {
                return Ok(());
            }
            let hit = self.ray_to_boundary(z, &dir.scale_re(1.0 / dir.norm()))?;
            upper = upper.min(hit.dist(z));
            Ok(())
        };
        probe(z.sub(&self.anchor()))?;
        for i in 0..self.dim() {
            for unit in [
                C64::new(1.0, 0.0),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
            ] {
                let mut d = vec![C64::new(0.0, 0.0); self.dim()];
                d[i] = unit;
                probe(ComplexPoint { coords: d })?;
            }
        }
        Ok((lower.min(upper), upper))
    }

    /// Unitary-orthonormal basis of the complex tangent space T_x^C ∂Ω,
    /// the kernel of v ↦ ⟨v, ∂r(x)⟩.
    pub fn complex_tangent_basis(&self, x: &ComplexPoint) -> Result<Vec<ComplexPoint>> {
        self.check_dim(x)?;
        let df = self.defining_function(x)?;
        if df.value.abs() > BOUNDARY_TOL {
            return Err(Error::precondition("point is not on the boundary"));
        }
        let g = df.gradient;
        let gn = g.norm();
        if gn < DEGENERATE_GRAD {
            return Err(Error::numeric("degenerate gradient on the boundary"));
        }
        // The kernel of v ↦ ⟨v, ḡ⟩... careful: ⟨v, ∂r⟩ = Σ v_i conj(∂_i r),
        // so the kernel is the Hermitian-orthogonal complement of ∂r.
        let n = g.scale_re(1.0 / gn);
        let d = self.dim();
        let mut basis: Vec<ComplexPoint> = Vec::with_capacity(d - 1);
        // Skip the coordinate most aligned with the normal, orthonormalize the rest.
        let skip = (0..d)
            .max_by(|&a, &b| {
                n.coord(a)
                    .norm_sqr()
                    .partial_cmp(&n.coord(b).norm_sqr())
                    .unwrap()
            })
            .unwrap();
        for i in (0..d).filter(|&i| i != skip) {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[i] = C64::new(1.0, 0.0);
            let mut v = ComplexPoint { coords: v };
            v = v.sub(&n.scale(v.herm(&n)));
            for b in &basis {
                v = v.sub(&b.scale(v.herm(b)));
            }
            let vn = v.norm();
            if vn < 1e-10 {
                return Err(Error::numeric("tangent basis construction degenerated"));
            }
            basis.push(v.scale_re(1.0 / vn));
        }
        Ok(basis)
    }
}

/// Defining function value and Wirtinger gradient at a point.
#[derive(Clone, Debug, Serialize)]
pub struct DefiningFunctionValue {
    pub value: f64,
    pub gradient: ComplexPoint,
}

// ---------------------------------------------------------------------------
// Constraint jets for the disc optimizer.
//
// Every bounded kind decomposes its defining inequality into smooth convex
// scalar constraints c_i(z) < 0 (one for ball/ellipse, d for the polydisc)
// whose complex Hessians are diagonal.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default)]
pub(crate) struct ConstraintEval {
    pub value: f64,
    /// ∂c/∂z_i
    pub grad: Vec<C64>,
    /// ∂²c/∂z_i∂z̄_i (real, nonnegative for the supported kinds)
    pub mixed_diag: Vec<f64>,
    /// ∂²c/∂z_i²
    pub holo_diag: Vec<C64>,
}

impl DomainSpec {
    pub(crate) fn constraint_count(&self) -> usize {
        match self {
            DomainSpec::Polydisc { dim } => *dim,
            _ => 1,
        }
    }

    /// Evaluates constraint `which` with first and second Wirtinger data.
    pub(crate) fn constraint_eval(&self, which: usize, z: &[C64], out: &mut ConstraintEval) {
        let d = z.len();
        out.grad.resize(d, C64::new(0.0, 0.0));
        out.mixed_diag.resize(d, 0.0);
        out.holo_diag.resize(d, C64::new(0.0, 0.0));
        out.grad.fill(C64::new(0.0, 0.0));
        out.mixed_diag.fill(0.0);
        out.holo_diag.fill(C64::new(0.0, 0.0));
        match self {
            DomainSpec::Ball { .. } => {
                let mut v = -1.0;
                for i in 0..d {
                    v += z[i].norm_sqr();
                    out.grad[i] = z[i].conj();
                    out.mixed_diag[i] = 1.0;
                }
                out.value = v;
            }
            DomainSpec::Polydisc { .. } => {
                let i = which;
                out.value = z[i].norm_sqr() - 1.0;
                out.grad[i] = z[i].conj();
                out.mixed_diag[i] = 1.0;
            }
            DomainSpec::Ellipse { exponents } => {
                let mut v = -1.0;
                for i in 0..d {
                    let m = exponents[i] as i32;
                    let zz = z[i].norm_sqr();
                    v += zz.powi(m);
                    out.grad[i] = z[i].conj() * (m as f64) * zz.powi(m - 1);
                    out.mixed_diag[i] = ((m * m) as f64) * zz.powi(m - 1);
                    if m >= 2 {
                        out.holo_diag[i] =
                            z[i].conj().powu(2) * ((m * (m - 1)) as f64) * zz.powi(m - 2);
                    }
                }
                out.value = v;
            }
            DomainSpec::Whp { .. } => unreachable!("the disc optimizer never sees WHP directly"),
        }
    }
}

// ---------------------------------------------------------------------------
// Cayley correspondence Ball(d) ↔ Siegel model { Im w > |z'|² }.
// ---------------------------------------------------------------------------

/// Ball point to Siegel point; c(0) = (i, 0, …, 0).
pub fn cayley(z: &ComplexPoint) -> Result<ComplexPoint> {
    if z.norm() >= 1.0 {
        return Err(Error::precondition("cayley needs |z| < 1"));
    }
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let den = one - z.coord(0);
    let mut coords = Vec::with_capacity(z.dim());
    coords.push(i * (one + z.coord(0)) / den);
    for j in 1..z.dim() {
        coords.push(z.coord(j) / den);
    }
    ComplexPoint::new(coords)
}

/// Siegel point back to the ball.
pub fn cayley_inverse(p: &ComplexPoint) -> Result<ComplexPoint> {
    let w = p.coord(0);
    let zs = &p.coords()[1..];
    let pz: f64 = zs.iter().map(|z| z.norm_sqr()).sum();
    if w.im <= pz {
        return Err(Error::precondition("cayley_inverse needs Im w > |z'|²"));
    }
    let i = C64::new(0.0, 1.0);
    let den = w + i;
    let mut coords = Vec::with_capacity(p.dim());
    coords.push((w - i) / den);
    for z in zs {
        coords.push(2.0 * i * z / den);
    }
    ComplexPoint::new(coords)
}

/// Complex Jacobian of `cayley_inverse` applied to a tangent vector at p.
pub fn cayley_inverse_tangent(p: &ComplexPoint, v: &ComplexPoint) -> Result<ComplexPoint> {
    let w = p.coord(0);
    let i = C64::new(0.0, 1.0);
    let den = w + i;
    let dw = v.coord(0);
    let mut coords = Vec::with_capacity(p.dim());
    // ζ_1 = (w−i)/(w+i): dζ_1 = 2i/(w+i)² dw
    coords.push(2.0 * i / (den * den) * dw);
    for j in 1..p.dim() {
        // ζ_j = 2i z_j/(w+i): dζ_j = 2i dz_j/(w+i) − 2i z_j/(w+i)² dw
        coords.push(2.0 * i * v.coord(j) / den - 2.0 * i * p.coord(j) / (den * den) * dw);
    }
    ComplexPoint::new(coords)
}

// ---------------------------------------------------------------------------
// JSON schema (kind-tagged), with strict unknown-field and Hermitian checks.
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    kind: String,
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    exponents: Option<Vec<u32>>,
    #[serde(default)]
    weights: Option<Vec<u32>>,
    #[serde(default)]
    monomials: Option<Vec<Monomial>>,
}

impl Serialize for DomainSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(None)?;
        match self {
            DomainSpec::Ball { dim } => {
                map.serialize_entry("kind", "ball")?;
                map.serialize_entry("dim", dim)?;
            }
            DomainSpec::Polydisc { dim } => {
                map.serialize_entry("kind", "polydisc")?;
                map.serialize_entry("dim", dim)?;
            }
            DomainSpec::Ellipse { exponents } => {
                map.serialize_entry("kind", "ellipse")?;
                map.serialize_entry("exponents", exponents)?;
            }
            DomainSpec::Whp {
                dim,
                weights,
                monomials,
            } => {
                map.serialize_entry("kind", "whp")?;
                map.serialize_entry("dim", dim)?;
                map.serialize_entry("weights", weights)?;
                map.serialize_entry("monomials", monomials)?;
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for DomainSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDomain::deserialize(d)?;
        let need_dim = |f: Option<usize>| f.ok_or_else(|| D::Error::custom("missing field `dim`"));
        let spec = match raw.kind.as_str() {
            "ball" => DomainSpec::Ball {
                dim: need_dim(raw.dim)?,
            },
            "polydisc" => DomainSpec::Polydisc {
                dim: need_dim(raw.dim)?,
            },
            "ellipse" => DomainSpec::Ellipse {
                exponents: raw
                    .exponents
                    .ok_or_else(|| D::Error::custom("missing field `exponents`"))?,
            },
            "whp" => DomainSpec::Whp {
                dim: need_dim(raw.dim)?,
                weights: raw
                    .weights
                    .ok_or_else(|| D::Error::custom("missing field `weights`"))?,
                monomials: raw
                    .monomials
                    .ok_or_else(|| D::Error::custom("missing field `monomials`"))?,
            },
            other => return Err(D::Error::custom(format!("unknown domain kind `{other}`"))),
        };
        spec.validate().map_err(|e| D::Error::custom(e.to_string()))?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(re: &[f64]) -> ComplexPoint {
        ComplexPoint::from_reals(re)
    }

    #[test]
    fn contains_examples() {
        let b2 = DomainSpec::ball(2);
        assert!(b2.contains(&pt(&[0.0, 0.0])).unwrap());
        assert!(!b2.contains(&pt(&[1.0, 0.0])).unwrap());
        let e = DomainSpec::ellipse(vec![1, 2]).unwrap();
        // 0.81 + 0.0625 = 0.8725 < 1
        assert!(e.contains(&pt(&[0.9, 0.5])).unwrap());
        assert!(b2.contains(&pt(&[0.0])).is_err());
    }

    #[test]
    fn defining_function_examples() {
        let b1 = DomainSpec::ball(1);
        let v = b1.defining_function(&pt(&[0.5])).unwrap();
        assert!((v.value + 0.75).abs() < 1e-15);

        let e = DomainSpec::ellipse(vec![1, 2]).unwrap();
        let v = e.defining_function(&pt(&[0.0, 0.0])).unwrap();
        assert!((v.value + 1.0).abs() < 1e-15);
        assert!(v.gradient.norm() < 1e-15);

        // Siegel point (w, z) = (2i, 1): r = |1|² − Im(2i) = 1 − 2 = −1.
        let s = DomainSpec::siegel(2);
        let p = ComplexPoint::new(vec![C64::new(0.0, 2.0), C64::new(1.0, 0.0)]).unwrap();
        let v = s.defining_function(&p).unwrap();
        assert!((v.value + 1.0).abs() < 1e-15);
    }

    #[test]
    fn wirtinger_gradient_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let domains = vec![
            DomainSpec::ball(2),
            DomainSpec::ellipse(vec![1, 2]).unwrap(),
            DomainSpec::ellipse(vec![1, 1, 3]).unwrap(),
            DomainSpec::siegel(2),
        ];
        let h = 1e-6;
        for dom in &domains {
            let d = dom.dim();
            for _ in 0..250 {
                let mut coords: Vec<C64> = (0..d)
                    .map(|_| C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
                    .collect();
                if let DomainSpec::Whp { .. } = dom {
                    coords[0].im += 2.0; // keep clear of the graph boundary
                }
                let z = ComplexPoint::new(coords.clone()).unwrap();
                let g = dom.defining_function(&z).unwrap().gradient;
                for i in 0..d {
                    let eval = |dre: f64, dim_: f64| {
                        let mut c = coords.clone();
                        c[i] += C64::new(dre, dim_);
                        dom.defining_function(&ComplexPoint::new(c).unwrap())
                            .unwrap()
                            .value
                    };
                    let dx = (eval(h, 0.0) - eval(-h, 0.0)) / (2.0 * h);
                    let dy = (eval(0.0, h) - eval(0.0, -h)) / (2.0 * h);
                    let fd = C64::new(dx, -dy) * 0.5; // ∂/∂z = (∂x − i∂y)/2
                    let err = (fd - g.coord(i)).norm();
                    let scale = 1.0 + g.coord(i).norm();
                    assert!(
                        err / scale < 1e-6,
                        "gradient mismatch {err:.3e} on {dom:?} coord {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn weighted_homogeneity_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let w = DomainSpec::whp(
            3,
            vec![1, 2, 4],
            vec![
                (vec![1, 0], vec![1, 0], 1.0),
                (vec![0, 2], vec![0, 2], 0.5),
                (vec![2, 0], vec![0, 0], 0.25),
            ],
        )
        .unwrap();
        let (weights, _) = match &w {
            DomainSpec::Whp { weights, dim, .. } => (weights.clone(), *dim),
            _ => unreachable!(),
        };
        for _ in 0..100 {
            let t: f64 = rng.gen_range(0.1..5.0);
            let zs: Vec<C64> = (0..2)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let scaled: Vec<C64> = zs
                .iter()
                .zip(&weights[1..])
                .map(|(z, &m)| z * t.powf(1.0 / m as f64))
                .collect();
            let lhs = w.whp_poly(&scaled);
            let rhs = t * w.whp_poly(&zs);
            assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn boundary_project_examples() {
        let b2 = DomainSpec::ball(2);
        let x = b2.boundary_project(&pt(&[0.5, 0.0])).unwrap();
        assert!(x.dist(&pt(&[1.0, 0.0])) < 1e-9);

        let e = DomainSpec::ellipse(vec![1, 2]).unwrap();
        let x = e.boundary_project(&pt(&[0.0, 0.5])).unwrap();
        assert!(x.dist(&pt(&[0.0, 1.0])) < 1e-9);

        // Independent bisection oracle along the ray through (0.3, 0.3).
        let z = pt(&[0.3, 0.3]);
        let x = e.boundary_project(&z).unwrap();
        assert!(e.defining_function(&x).unwrap().value.abs() <= PROJECTION_TOL);
        let r = |t: f64| {
            e.defining_function(&z.scale_re(t))
                .map(|v| v.value)
                .unwrap()
        };
        let (mut lo, mut hi) = (1.0, 4.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if r(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = z.scale_re(0.5 * (lo + hi));
        assert!(x.dist(&oracle) < 1e-10);
        // membership flips across the projected point along the ray
        let t = x.norm() / z.norm();
        assert!(e.contains(&z.scale_re(t * 0.999 / 1.0)).unwrap());
        assert!(!e.contains(&z.scale_re(t * 1.001)).unwrap());

        assert!(b2.boundary_project(&pt(&[2.0, 0.0])).is_err());
    }

    #[test]
    fn distance_bracket_on_ball_is_exact_upper() {
        let b1 = DomainSpec::ball(1);
        let (lo, hi) = b1
            .euclidean_boundary_distance_bracket(&pt(&[0.6]))
            .unwrap();
        assert!(lo <= 0.4 + 1e-12 && 0.4 <= hi + 1e-12);
        assert!((hi - 0.4).abs() < 1e-9);
        let b3 = DomainSpec::ball(3);
        let (lo, hi) = b3
            .euclidean_boundary_distance_bracket(&ComplexPoint::origin(3))
            .unwrap();
        assert!(lo <= 1.0 && (hi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn distance_bracket_vs_dense_boundary_sampling() {
        let e = DomainSpec::ellipse(vec![1, 2]).unwrap();
        let z = pt(&[0.3, 0.3]);
        let (lo, hi) = e.euclidean_boundary_distance_bracket(&z).unwrap();
        assert!(lo <= hi);
        // Brute-force min over ~1e5 boundary points (r1, θ1, r2=real here by
        // symmetry of the distance in each coordinate's phase): sample the
        // full torus of phases anyway.
        let mut best = f64::INFINITY;
        let n = 100;
        for i in 0..=n {
            let r1 = i as f64 / n as f64;
            let r2 = (1.0 - r1 * r1).max(0.0).powf(0.25);
            for j in 0..32 {
                let t1 = 2.0 * std::f64::consts::PI * j as f64 / 32.0;
                for l in 0..32 {
                    let t2 = 2.0 * std::f64::consts::PI * l as f64 / 32.0;
                    let b = ComplexPoint::new(vec![
                        C64::from_polar(r1, t1),
                        C64::from_polar(r2, t2),
                    ])
                    .unwrap();
                    best = best.min(b.dist(&z));
                }
            }
        }
        assert!(lo <= best + 1e-9, "lower {lo} vs sampled {best}");
        assert!(hi >= best - 2e-2, "upper {hi} vs sampled {best}");
    }

    #[test]
    fn tangent_basis_examples() {
        let b2 = DomainSpec::ball(2);
        let basis = b2.complex_tangent_basis(&pt(&[1.0, 0.0])).unwrap();
        assert_eq!(basis.len(), 1);
        assert!(basis[0].dist(&pt(&[0.0, 1.0])).min(basis[0].add(&pt(&[0.0, 1.0])).norm()) < 1e-10);

        let basis = b2.complex_tangent_basis(&pt(&[0.0, 1.0])).unwrap();
        assert!((basis[0].coord(0).norm() - 1.0).abs() < 1e-10);

        let e = DomainSpec::ellipse(vec![1, 2]).unwrap();
        let basis = e.complex_tangent_basis(&pt(&[0.0, 1.0])).unwrap();
        assert!((basis[0].coord(0).norm() - 1.0).abs() < 1e-10);
        let g = e.defining_function(&pt(&[0.0, 1.0])).unwrap().gradient;
        assert!(basis[0].herm(&g).norm() < 1e-10);
    }

    #[test]
    fn cayley_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let z0 = pt(&[0.0]);
        let c = cayley(&z0).unwrap();
        assert!(c.dist(&ComplexPoint::new(vec![C64::new(0.0, 1.0)]).unwrap()) < 1e-15);
        let siegel = DomainSpec::siegel(3);
        for _ in 0..100 {
            let mut coords: Vec<C64> = (0..3)
                .map(|_| C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
                .collect();
            while coords.iter().map(|c| c.norm_sqr()).sum::<f64>() >= 0.96 {
                coords.iter_mut().for_each(|c| *c *= 0.7);
            }
            let z = ComplexPoint::new(coords).unwrap();
            let s = cayley(&z).unwrap();
            assert!(siegel.contains(&s).unwrap());
            let back = cayley_inverse(&s).unwrap();
            assert!(back.dist(&z) < 1e-12);
        }
        assert!(cayley(&pt(&[1.0])).is_err());
    }

    #[test]
    fn json_schema_round_trip_and_rejections() {
        let e: DomainSpec = serde_json::from_str(r#"{"kind":"ellipse","exponents":[1,1,2]}"#).unwrap();
        assert_eq!(e, DomainSpec::ellipse(vec![1, 1, 2]).unwrap());
        let w: DomainSpec =
            serde_json::from_str(r#"{"kind":"whp","dim":2,"weights":[1,2],"monomials":[[[1],[1],1.0]]}"#)
                .unwrap();
        assert!(w.is_siegel());
        let round = serde_json::to_string(&w).unwrap();
        let w2: DomainSpec = serde_json::from_str(&round).unwrap();
        assert_eq!(w, w2);

        // non-Hermitian monomial list must be rejected
        let bad = r#"{"kind":"whp","dim":2,"weights":[1,2],"monomials":[[[2],[0],1.0]]}"#;
        assert!(serde_json::from_str::<DomainSpec>(bad).is_err());
        // unknown fields rejected
        let bad = r#"{"kind":"ball","dim":2,"extra":1}"#;
        assert!(serde_json::from_str::<DomainSpec>(bad).is_err());
        // unsorted ellipse exponents rejected
        let bad = r#"{"kind":"ellipse","exponents":[2,1]}"#;
        assert!(serde_json::from_str::<DomainSpec>(bad).is_err());
    }

    #[test]
    fn membership_agrees_with_sign_of_r() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for dom in [
            DomainSpec::ball(2),
            DomainSpec::polydisc(2),
            DomainSpec::ellipse(vec![1, 2]).unwrap(),
        ] {
            for _ in 0..2500 {
                let z = ComplexPoint::new(
                    (0..2)
                        .map(|_| C64::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)))
                        .collect(),
                )
                .unwrap();
                assert_eq!(
                    dom.contains(&z).unwrap(),
                    dom.defining_function(&z).unwrap().value < 0.0
                );
            }
        }
    }
}
