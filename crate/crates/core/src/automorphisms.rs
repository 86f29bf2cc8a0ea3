//! Closed-form automorphisms: fractional-linear ball maps from U(1,k)
//! matrices, Webster's automorphisms of generalized ellipses, and the
//! translation/dilation flows of weighted homogeneous polynomial domains.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use serde::{Deserialize, Serialize, Serializer};

use crate::domains::{ComplexPoint, DomainSpec, BOUNDARY_TOL};
use crate::error::{Error, Result};

/// Entrywise residual allowed on the J-isometry invariant.
pub const J_RESIDUAL_TOL: f64 = 1e-10;

pub(crate) fn j_matrix(n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    })
}

pub(crate) fn j_residual(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let r = m.adjoint() * j_matrix(n) * m - j_matrix(n);
    r.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Newton–Schulz style correction pulling a near-J-isometry back onto the
/// constraint manifold: g ← g·(3I − J g* J g)/2.
pub(crate) fn reproject_j(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    let j = j_matrix(n);
    for _ in 0..12 {
        if j_residual(m) <= 1e-13 {
            break;
        }
        let a = &j * m.adjoint() * &j * &*m;
        let corr = DMatrix::<C64>::identity(n, n) * C64::new(1.5, 0.0) - a * C64::new(0.5, 0.0);
        *m = &*m * corr;
    }
}

fn normalize_det_modulus(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    let d = m.determinant();
    let r = d.norm();
    if r > 0.0 {
        *m *= C64::new(r.powf(-1.0 / n as f64), 0.0);
    }
}

/// A ball automorphism represented by a U(1,k) matrix acting by fractional
/// linear transformations on homogeneous coordinates (1, z).
#[derive(Clone, Debug, PartialEq)]
pub struct BallMoebius {
    matrix: DMatrix<C64>,
}

impl BallMoebius {
    /// Validates g*Jg = J (entrywise 1e-10) after normalizing |det| to 1.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::argument("Moebius matrix must be square, size ≥ 2"));
        }
        let mut m = matrix;
        normalize_det_modulus(&mut m);
        let res = j_residual(&m);
        if res > J_RESIDUAL_TOL {
            return Err(Error::argument(format!(
                "matrix is not a J-isometry (residual {res:.3e})"
            )));
        }
        Ok(BallMoebius { matrix: m })
    }

    /// Like `new` but projects a slightly-off matrix back onto the constraint.
    pub fn new_projected(matrix: DMatrix<C64>) -> Result<Self> {
        let mut m = matrix;
        normalize_det_modulus(&mut m);
        if j_residual(&m) > J_RESIDUAL_TOL {
            reproject_j(&mut m);
            normalize_det_modulus(&mut m);
        }
        BallMoebius::new(m)
    }

    pub fn identity(k: usize) -> Self {
        BallMoebius {
            matrix: DMatrix::identity(k + 1, k + 1),
        }
    }

    /// Dimension k of the ball it acts on (matrix is (k+1)×(k+1)).
    pub fn k(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Hyperbolic disc element z ↦ (z+a)/(1+āz) embedded in the first
    /// coordinate of Ball(k), fixed points ±e_1.
    pub fn disc_hyperbolic(k: usize, a: C64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::argument("|a| < 1 required"));
        }
        let s = 1.0 / (1.0 - a.norm_sqr()).sqrt();
        let mut m = DMatrix::<C64>::identity(k + 1, k + 1);
        m[(0, 0)] = C64::new(s, 0.0);
        m[(0, 1)] = a.conj() * s;
        m[(1, 0)] = a * s;
        m[(1, 1)] = C64::new(s, 0.0);
        BallMoebius::new(m)
    }

    /// Unitary rotation by the given phases (one per ball coordinate).
    pub fn rotation(phases: &[f64]) -> Self {
        let k = phases.len();
        let mut m = DMatrix::<C64>::identity(k + 1, k + 1);
        for (i, &t) in phases.iter().enumerate() {
            m[(i + 1, i + 1)] = C64::from_polar(1.0, t);
        }
        BallMoebius { matrix: m }
    }

    /// The one-parameter Cartan element a_t (radial flow towards e_1).
    pub fn cartan(k: usize, t: f64) -> Self {
        let mut m = DMatrix::<C64>::identity(k + 1, k + 1);
        let (c, s) = ((t / 2.0).cosh(), (t / 2.0).sinh());
        m[(0, 0)] = C64::new(c, 0.0);
        m[(0, 1)] = C64::new(s, 0.0);
        m[(1, 0)] = C64::new(s, 0.0);
        m[(1, 1)] = C64::new(c, 0.0);
        BallMoebius { matrix: m }
    }

    /// Parabolic element fixing e_1 (Cayley transport of w ↦ w + s).
    pub fn disc_parabolic(k: usize, s: f64) -> Self {
        let mut m = DMatrix::<C64>::identity(k + 1, k + 1);
        let half = C64::new(0.0, s / 2.0);
        m[(0, 0)] = C64::new(1.0, 0.0) - half;
        m[(0, 1)] = half;
        m[(1, 0)] = -half;
        m[(1, 1)] = C64::new(1.0, 0.0) + half;
        BallMoebius { matrix: m }
    }

    /// Fractional-linear action on the closed ball.
    pub fn apply(&self, z: &ComplexPoint) -> Result<ComplexPoint> {
        let k = self.k();
        if z.dim() != k {
            return Err(Error::argument(format!(
                "point dimension {} does not match ball dimension {}",
                z.dim(),
                k
            )));
        }
        if z.norm() > 1.0 + 1e-9 {
            return Err(Error::precondition("Moebius action needs |z| ≤ 1"));
        }
        let mut xi = vec![C64::new(0.0, 0.0); k + 1];
        for i in 0..k + 1 {
            xi[i] = self.matrix[(i, 0)];
            for j in 0..k {
                xi[i] += self.matrix[(i, j + 1)] * z.coord(j);
            }
        }
        if xi[0].norm() < 1e-14 {
            return Err(Error::numeric("vanishing Moebius denominator"));
        }
        ComplexPoint::new(xi[1..].iter().map(|c| c / xi[0]).collect())
    }

    pub fn compose(&self, other: &BallMoebius) -> Result<BallMoebius> {
        if self.k() != other.k() {
            return Err(Error::argument("Moebius dimensions do not match"));
        }
        let mut m = &self.matrix * &other.matrix;
        if j_residual(&m) > J_RESIDUAL_TOL {
            reproject_j(&mut m);
        }
        normalize_det_modulus(&mut m);
        Ok(BallMoebius { matrix: m })
    }

    /// Exact inverse from the J-isometry identity g⁻¹ = J g* J.
    pub fn inverse(&self) -> BallMoebius {
        let j = j_matrix(self.k() + 1);
        BallMoebius {
            matrix: &j * self.matrix.adjoint() * &j,
        }
    }

    /// φ⁻¹(0), the Möbius parameter entering S_φ.
    pub fn inv_zero(&self) -> ComplexPoint {
        self.inverse()
            .apply(&ComplexPoint::origin(self.k()))
            .expect("inverse moves the origin inside the ball")
    }

    pub fn pow(&self, n: i64) -> BallMoebius {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut e = n.unsigned_abs();
        let mut acc = BallMoebius::identity(self.k());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq).expect("same dimension");
            }
            sq = sq.compose(&sq).expect("same dimension");
            e >>= 1;
        }
        acc
    }
}

/// Webster's rational factor S_φ(z) = (1−|φ⁻¹(0)|²)/(1−⟨z, φ⁻¹(0)⟩)².
///
/// For |z| ≤ 1 the value lies in the slit plane C∖(−∞,0], so principal
/// roots are continuous in z.
pub fn s_phi(phi: &BallMoebius, zk: &ComplexPoint) -> Result<C64> {
    if zk.dim() != phi.k() {
        return Err(Error::argument("s_phi: dimension mismatch"));
    }
    if zk.norm() > 1.0 + 1e-9 {
        return Err(Error::precondition("s_phi needs |z| ≤ 1"));
    }
    let a = phi.inv_zero();
    let den = C64::new(1.0, 0.0) - zk.herm(&a);
    Ok(C64::new(1.0 - a.norm_sqr(), 0.0) / (den * den))
}

/// An element of Aut_0 of a generalized ellipse: a ball Möbius map on the
/// exponent-1 block and phase factors with S_φ roots on the rest.
#[derive(Clone, Debug)]
pub struct WebsterAut {
    ellipse: DomainSpec,
    phi: BallMoebius,
    phases: Vec<f64>,
}

impl WebsterAut {
    pub fn new(ellipse: DomainSpec, phi: BallMoebius, phases: Vec<f64>) -> Result<Self> {
        let exponents = match &ellipse {
            DomainSpec::Ellipse { exponents } => exponents.clone(),
            _ => return Err(Error::argument("WebsterAut needs an ellipse domain")),
        };
        let k = exponents.iter().take_while(|&&m| m == 1).count();
        if phi.k() != k {
            return Err(Error::argument(format!(
                "Moebius part acts on B_{}, but the ellipse has {} exponent-1 coordinates",
                phi.k(),
                k
            )));
        }
        if phases.len() != exponents.len() - k {
            return Err(Error::argument(
                "need one phase per coordinate with exponent > 1",
            ));
        }
        Ok(WebsterAut {
            ellipse,
            phi,
            phases,
        })
    }

    pub fn identity(ellipse: DomainSpec) -> Result<Self> {
        let (k, rest) = match &ellipse {
            DomainSpec::Ellipse { exponents } => {
                let k = exponents.iter().take_while(|&&m| m == 1).count();
                (k, exponents.len() - k)
            }
            _ => return Err(Error::argument("WebsterAut needs an ellipse domain")),
        };
        WebsterAut::new(ellipse, BallMoebius::identity(k), vec![0.0; rest])
    }

    pub fn ellipse(&self) -> &DomainSpec {
        &self.ellipse
    }

    pub fn phi(&self) -> &BallMoebius {
        &self.phi
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    fn exponents(&self) -> &[u32] {
        match &self.ellipse {
            DomainSpec::Ellipse { exponents } => exponents,
            _ => unreachable!(),
        }
    }

    pub fn k(&self) -> usize {
        self.phi.k()
    }

    /// φ(z) = (φ(z^k), z_{k+1} e^{iθ} S_φ(z^k)^{1/2m_{k+1}}, …).
    pub fn apply(&self, z: &ComplexPoint) -> Result<ComplexPoint> {
        let rv = self.ellipse.defining_function(z)?.value;
        if rv > 1e-8 {
            return Err(Error::precondition("point is outside the closed ellipse"));
        }
        let k = self.k();
        let head = self.phi.apply(&z.head(k))?;
        let s = s_phi(&self.phi, &z.head(k))?;
        let exps = self.exponents();
        let mut coords: Vec<C64> = head.coords().to_vec();
        for (j, &theta) in self.phases.iter().enumerate() {
            let m = exps[k + j] as f64;
            let root = s.powf(1.0 / (2.0 * m));
            coords.push(z.coord(k + j) * C64::from_polar(1.0, theta) * root);
        }
        ComplexPoint::new(coords)
    }

    /// Composition g1 ∘ g2. The S_φ cocycle contributes a constant unimodular
    /// factor per coordinate; it is evaluated at the origin and folded into
    /// the composed phases.
    pub fn compose(&self, other: &WebsterAut) -> Result<WebsterAut> {
        if self.ellipse != other.ellipse {
            return Err(Error::argument("Webster composition needs matching ellipses"));
        }
        let k = self.k();
        let phi12 = self.phi.compose(&other.phi)?;
        let zero = ComplexPoint::origin(k);
        let s2 = s_phi(&other.phi, &zero)?;
        let s1_at = s_phi(&self.phi, &other.phi.apply(&zero)?)?;
        let s12 = s_phi(&phi12, &zero)?;
        let exps = self.exponents();
        let mut phases = Vec::with_capacity(self.phases.len());
        for j in 0..self.phases.len() {
            let e = 1.0 / (2.0 * exps[k + j] as f64);
            let factor = C64::from_polar(1.0, self.phases[j] + other.phases[j]) * s1_at.powf(e)
                * s2.powf(e)
                / s12.powf(e);
            phases.push(factor.arg());
        }
        WebsterAut::new(self.ellipse.clone(), phi12, phases)
    }

    pub fn inverse(&self) -> Result<WebsterAut> {
        let k = self.k();
        let phi_inv = self.phi.inverse();
        let zero = ComplexPoint::origin(k);
        let s = s_phi(&self.phi, &zero)?;
        let s_inv_at = s_phi(&phi_inv, &self.phi.apply(&zero)?)?;
        let exps = self.exponents();
        let mut phases = Vec::with_capacity(self.phases.len());
        for j in 0..self.phases.len() {
            let e = 1.0 / (2.0 * exps[k + j] as f64);
            let correction = (s.powf(e) * s_inv_at.powf(e)).arg();
            phases.push(-self.phases[j] - correction);
        }
        WebsterAut::new(self.ellipse.clone(), phi_inv, phases)
    }
}

/// Flow kind of a WHP one-parameter automorphism group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowKind {
    /// ũ_t(w, z) = (w + t, z)
    Translation(f64),
    /// ã_t(w, z) = (e^t w, e^{t/m_j} z_j)
    Dilation(f64),
}

/// Translation or dilation automorphism of a WHP domain.
#[derive(Clone, Debug)]
pub struct WHPFlow {
    spec: DomainSpec,
    kind: FlowKind,
}

impl WHPFlow {
    pub fn new(spec: DomainSpec, kind: FlowKind) -> Result<Self> {
        if !matches!(spec, DomainSpec::Whp { .. }) {
            return Err(Error::argument("WHPFlow needs a WHP domain"));
        }
        Ok(WHPFlow { spec, kind })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn apply(&self, p: &ComplexPoint) -> Result<ComplexPoint> {
        if self.spec.defining_function(p)?.value > 1e-8 {
            return Err(Error::precondition("point is outside the closed domain"));
        }
        self.apply_unchecked(p)
    }

    pub(crate) fn apply_unchecked(&self, p: &ComplexPoint) -> Result<ComplexPoint> {
        let weights = match &self.spec {
            DomainSpec::Whp { weights, .. } => weights,
            _ => unreachable!(),
        };
        let mut coords = p.coords().to_vec();
        match self.kind {
            FlowKind::Translation(t) => coords[0] += C64::new(t, 0.0),
            FlowKind::Dilation(t) => {
                coords[0] *= C64::new(t.exp(), 0.0);
                for (j, c) in coords.iter_mut().enumerate().skip(1) {
                    *c *= C64::new((t / weights[j] as f64).exp(), 0.0);
                }
            }
        }
        ComplexPoint::new(coords)
    }

    pub fn inverse(&self) -> WHPFlow {
        let kind = match self.kind {
            FlowKind::Translation(t) => FlowKind::Translation(-t),
            FlowKind::Dilation(t) => FlowKind::Dilation(-t),
        };
        WHPFlow {
            spec: self.spec.clone(),
            kind,
        }
    }

    pub fn compose(&self, other: &WHPFlow) -> Result<WHPFlow> {
        if self.spec != other.spec {
            return Err(Error::argument("WHP flow composition needs matching specs"));
        }
        let kind = match (self.kind, other.kind) {
            (FlowKind::Translation(a), FlowKind::Translation(b)) => FlowKind::Translation(a + b),
            (FlowKind::Dilation(a), FlowKind::Dilation(b)) => FlowKind::Dilation(a + b),
            _ => {
                return Err(Error::argument(
                    "translation and dilation flows do not compose within the family",
                ))
            }
        };
        Ok(WHPFlow {
            spec: self.spec.clone(),
            kind,
        })
    }

    /// Conjugates the flow through the Cayley map into a ball automorphism.
    /// Only available on the Siegel model, where the flow is linear on
    /// homogeneous coordinates.
    pub fn to_ball_moebius(&self) -> Result<BallMoebius> {
        if !self.spec.is_siegel() {
            return Err(Error::argument(
                "only Siegel-model flows transport to the ball",
            ));
        }
        let d = self.spec.dim();
        let n = d + 1;
        let mut flow = DMatrix::<C64>::identity(n, n);
        match self.kind {
            FlowKind::Translation(t) => flow[(1, 0)] = C64::new(t, 0.0),
            FlowKind::Dilation(t) => {
                flow[(1, 1)] = C64::new(t.exp(), 0.0);
                for j in 2..n {
                    flow[(j, j)] = C64::new((t / 2.0).exp(), 0.0);
                }
            }
        }
        // Homogeneous Cayley matrix: (1, ζ) ↦ (1−ζ_1, i(1+ζ_1), ζ').
        let mut cay = DMatrix::<C64>::zeros(n, n);
        cay[(0, 0)] = C64::new(1.0, 0.0);
        cay[(0, 1)] = C64::new(-1.0, 0.0);
        cay[(1, 0)] = C64::new(0.0, 1.0);
        cay[(1, 1)] = C64::new(0.0, 1.0);
        for j in 2..n {
            cay[(j, j)] = C64::new(1.0, 0.0);
        }
        let cay_inv = cay
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::numeric("Cayley matrix inversion failed"))?;
        let mut m = cay_inv * flow * cay;
        let det = m.determinant();
        let root = C64::from_polar(det.norm().powf(1.0 / n as f64), det.arg() / n as f64);
        m /= root;
        BallMoebius::new_projected(m)
    }
}

/// Any supported automorphism, tagged by the domain family it acts on.
#[derive(Clone, Debug)]
pub enum Automorphism {
    Moebius(BallMoebius),
    Webster(WebsterAut),
    Whp(WHPFlow),
}

impl Automorphism {
    /// Checks the automorphism acts on the given domain.
    pub fn check_domain(&self, domain: &DomainSpec) -> Result<()> {
        let ok = match self {
            Automorphism::Moebius(m) => *domain == DomainSpec::ball(m.k()),
            Automorphism::Webster(w) => domain == w.ellipse(),
            Automorphism::Whp(f) => domain == f.spec(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::argument("automorphism does not act on this domain"))
        }
    }

    pub fn apply(&self, z: &ComplexPoint) -> Result<ComplexPoint> {
        match self {
            Automorphism::Moebius(m) => m.apply(z),
            Automorphism::Webster(w) => w.apply(z),
            Automorphism::Whp(f) => f.apply(z),
        }
    }

    pub fn inverse(&self) -> Result<Automorphism> {
        Ok(match self {
            Automorphism::Moebius(m) => Automorphism::Moebius(m.inverse()),
            Automorphism::Webster(w) => Automorphism::Webster(w.inverse()?),
            Automorphism::Whp(f) => Automorphism::Whp(f.inverse()),
        })
    }

    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        Ok(match (self, other) {
            (Automorphism::Moebius(a), Automorphism::Moebius(b)) => {
                Automorphism::Moebius(a.compose(b)?)
            }
            (Automorphism::Webster(a), Automorphism::Webster(b)) => {
                Automorphism::Webster(a.compose(b)?)
            }
            (Automorphism::Whp(a), Automorphism::Whp(b)) => Automorphism::Whp(a.compose(b)?),
            _ => return Err(Error::argument("cannot compose automorphisms of different kinds")),
        })
    }

    pub fn pow(&self, n: i64) -> Result<Automorphism> {
        match self {
            Automorphism::Moebius(m) => Ok(Automorphism::Moebius(m.pow(n))),
            Automorphism::Whp(f) => {
                let kind = match f.kind() {
                    FlowKind::Translation(t) => FlowKind::Translation(t * n as f64),
                    FlowKind::Dilation(t) => FlowKind::Dilation(t * n as f64),
                };
                Ok(Automorphism::Whp(WHPFlow::new(f.spec().clone(), kind)?))
            }
            Automorphism::Webster(w) => {
                if n == 0 {
                    return Ok(Automorphism::Webster(WebsterAut::identity(
                        w.ellipse().clone(),
                    )?));
                }
                let base = if n > 0 { w.clone() } else { w.inverse()? };
                let mut acc = base.clone();
                for _ in 1..n.unsigned_abs() {
                    acc = acc.compose(&base)?;
                }
                Ok(Automorphism::Webster(acc))
            }
        }
    }
}

/// Smooth extension of the automorphism to the boundary: the same closed-form
/// formulas evaluated at a boundary point.
pub fn boundary_extend(
    domain: &DomainSpec,
    g: &Automorphism,
    x: &ComplexPoint,
) -> Result<ComplexPoint> {
    g.check_domain(domain)?;
    let rv = domain.defining_function(x)?.value;
    if rv.abs() > BOUNDARY_TOL {
        return Err(Error::precondition("point is not on the boundary"));
    }
    match g {
        Automorphism::Moebius(m) => m.apply(x),
        Automorphism::Webster(w) => w.apply(x),
        Automorphism::Whp(f) => f.apply_unchecked(x),
    }
}

// ---------------------------------------------------------------------------
// JSON encoding
// ---------------------------------------------------------------------------

type RawMatrix = Vec<Vec<[f64; 2]>>;

fn matrix_to_raw(m: &DMatrix<C64>) -> RawMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub(crate) fn raw_to_matrix(raw: &RawMatrix) -> Result<DMatrix<C64>> {
    let n = raw.len();
    if n == 0 || raw.iter().any(|row| row.len() != n) {
        return Err(Error::argument("matrix rows must be square"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        C64::new(raw[i][j][0], raw[i][j][1])
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAut {
    kind: String,
    #[serde(default)]
    matrix: Option<RawMatrix>,
    #[serde(default)]
    ellipse: Option<DomainSpec>,
    #[serde(default)]
    moebius: Option<RawMatrix>,
    #[serde(default)]
    phases: Option<Vec<f64>>,
    #[serde(default)]
    t: Option<f64>,
}

impl Serialize for Automorphism {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(None)?;
        match self {
            Automorphism::Moebius(m) => {
                map.serialize_entry("kind", "moebius")?;
                map.serialize_entry("matrix", &matrix_to_raw(m.matrix()))?;
            }
            Automorphism::Webster(w) => {
                map.serialize_entry("kind", "webster")?;
                map.serialize_entry("ellipse", w.ellipse())?;
                map.serialize_entry("moebius", &matrix_to_raw(w.phi().matrix()))?;
                map.serialize_entry("phases", &w.phases().to_vec())?;
            }
            Automorphism::Whp(f) => match f.kind() {
                FlowKind::Translation(t) => {
                    map.serialize_entry("kind", "whp_translation")?;
                    map.serialize_entry("t", &t)?;
                }
                FlowKind::Dilation(t) => {
                    map.serialize_entry("kind", "whp_dilation")?;
                    map.serialize_entry("t", &t)?;
                }
            },
        }
        map.end()
    }
}

/// Parses an automorphism from JSON. WHP flow entries carry only `t`, so the
/// acting domain must be supplied for them.
pub fn automorphism_from_json(
    json: &serde_json::Value,
    domain: Option<&DomainSpec>,
) -> Result<Automorphism> {
    let raw: RawAut =
        serde_json::from_value(json.clone()).map_err(|e| Error::argument(e.to_string()))?;
    match raw.kind.as_str() {
        "moebius" => {
            let m = raw
                .matrix
                .ok_or_else(|| Error::argument("moebius needs `matrix`"))?;
            Ok(Automorphism::Moebius(BallMoebius::new(raw_to_matrix(&m)?)?))
        }
        "webster" => {
            let ellipse = raw
                .ellipse
                .ok_or_else(|| Error::argument("webster needs `ellipse`"))?;
            let phi = BallMoebius::new(raw_to_matrix(
                &raw.moebius
                    .ok_or_else(|| Error::argument("webster needs `moebius`"))?,
            )?)?;
            let phases = raw
                .phases
                .ok_or_else(|| Error::argument("webster needs `phases`"))?;
            Ok(Automorphism::Webster(WebsterAut::new(ellipse, phi, phases)?))
        }
        "whp_translation" | "whp_dilation" => {
            let t = raw.t.ok_or_else(|| Error::argument("whp flow needs `t`"))?;
            let spec = domain
                .ok_or_else(|| Error::argument("whp flow needs the acting domain"))?
                .clone();
            let kind = if raw.kind == "whp_translation" {
                FlowKind::Translation(t)
            } else {
                FlowKind::Dilation(t)
            };
            Ok(Automorphism::Whp(WHPFlow::new(spec, kind)?))
        }
        other => Err(Error::argument(format!("unknown automorphism kind `{other}`"))),
    }
}
