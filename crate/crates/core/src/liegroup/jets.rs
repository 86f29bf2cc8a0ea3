//! Boundary 2-jets of ball automorphisms via exact order-2 Taylor
//! arithmetic.
//!
//! The boundary action is written in stereographic charts of the sphere
//! S^{2k−1}: h = σ_target⁻¹ ∘ g ∘ σ_x, a rational map of m = 2k−1 real
//! variables. Evaluating it on jet-valued inputs propagates first and second
//! derivatives through the chain rule exactly — no finite differences.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::automorphisms::BallMoebius;
use crate::domains::ComplexPoint;
use crate::error::{Error, Result};

/// Order-2 truncated Taylor value in m real variables.
#[derive(Clone, Debug)]
struct TJet {
    v: f64,
    g: DVector<f64>,
    h: DMatrix<f64>,
}

impl TJet {
    fn constant(m: usize, v: f64) -> TJet {
        TJet {
            v,
            g: DVector::zeros(m),
            h: DMatrix::zeros(m, m),
        }
    }

    fn variable(m: usize, idx: usize, v: f64) -> TJet {
        let mut g = DVector::zeros(m);
        g[idx] = 1.0;
        TJet {
            v,
            g,
            h: DMatrix::zeros(m, m),
        }
    }

    fn add(&self, o: &TJet) -> TJet {
        TJet {
            v: self.v + o.v,
            g: &self.g + &o.g,
            h: &self.h + &o.h,
        }
    }

    fn sub(&self, o: &TJet) -> TJet {
        TJet {
            v: self.v - o.v,
            g: &self.g - &o.g,
            h: &self.h - &o.h,
        }
    }

    fn scale(&self, s: f64) -> TJet {
        TJet {
            v: self.v * s,
            g: &self.g * s,
            h: &self.h * s,
        }
    }

    fn mul(&self, o: &TJet) -> TJet {
        let cross = &self.g * o.g.transpose();
        TJet {
            v: self.v * o.v,
            g: &self.g * o.v + &o.g * self.v,
            h: &self.h * o.v + &o.h * self.v + &cross + cross.transpose(),
        }
    }

    /// 1/f for f ≠ 0.
    fn recip(&self) -> TJet {
        let iv = 1.0 / self.v;
        let iv2 = iv * iv;
        let gg = &self.g * self.g.transpose();
        TJet {
            v: iv,
            g: &self.g * (-iv2),
            h: gg * (2.0 * iv2 * iv) - &self.h * iv2,
        }
    }
}

/// Complex jet as a (re, im) pair.
#[derive(Clone, Debug)]
struct CJet {
    re: TJet,
    im: TJet,
}

impl CJet {
    fn constant(m: usize, c: C64) -> CJet {
        CJet {
            re: TJet::constant(m, c.re),
            im: TJet::constant(m, c.im),
        }
    }

    fn add(&self, o: &CJet) -> CJet {
        CJet {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    fn mul(&self, o: &CJet) -> CJet {
        CJet {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    fn mul_const(&self, c: C64) -> CJet {
        CJet {
            re: self.re.scale(c.re).sub(&self.im.scale(c.im)),
            im: self.re.scale(c.im).add(&self.im.scale(c.re)),
        }
    }

    /// 1/z via z̄/|z|².
    fn recip(&self) -> CJet {
        let norm2 = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let inv = norm2.recip();
        CJet {
            re: self.re.mul(&inv),
            im: self.im.mul(&inv).scale(-1.0),
        }
    }
}

/// Which stereographic chart covers the image point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartTag {
    /// chart based at x itself
    Base,
    /// rotated fallback based at −x (image near the antipode of x)
    Antipode,
}

/// Second-order jet of the boundary action at x, in fixed chart coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryJet2 {
    pub base: ComplexPoint,
    pub image: ComplexPoint,
    pub chart: ChartTag,
    /// chart coordinates of the image (m = 2k−1 values)
    pub value: Vec<f64>,
    /// m×m Jacobian, row-major
    pub jacobian: Vec<Vec<f64>>,
    /// m Hessians of the component functions, each m×m row-major
    pub hessian: Vec<Vec<Vec<f64>>>,
}

impl BoundaryJet2 {
    /// Max-abs difference over the shared jet data; jets in different charts
    /// compare through the ambient image points (which then already differ).
    pub fn difference(&self, other: &BoundaryJet2) -> f64 {
        if self.chart != other.chart {
            return self.image.dist(&other.image);
        }
        let mut worst: f64 = self.image.dist(&other.image);
        for (a, b) in self.value.iter().zip(&other.value) {
            worst = worst.max((a - b).abs());
        }
        for (ra, rb) in self.jacobian.iter().zip(&other.jacobian) {
            for (a, b) in ra.iter().zip(rb) {
                worst = worst.max((a - b).abs());
            }
        }
        for (ha, hb) in self.hessian.iter().zip(&other.hessian) {
            for (ra, rb) in ha.iter().zip(hb) {
                for (a, b) in ra.iter().zip(rb) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }

    /// Same, restricted to the 1-jet (value + Jacobian).
    pub fn difference_1jet(&self, other: &BoundaryJet2) -> f64 {
        if self.chart != other.chart {
            return self.image.dist(&other.image);
        }
        let mut worst: f64 = self.image.dist(&other.image);
        for (a, b) in self.value.iter().zip(&other.value) {
            worst = worst.max((a - b).abs());
        }
        for (ra, rb) in self.jacobian.iter().zip(&other.jacobian) {
            for (a, b) in ra.iter().zip(rb) {
                worst = worst.max((a - b).abs());
            }
        }
        worst
    }
}

fn to_real(z: &ComplexPoint) -> DVector<f64> {
    let k = z.dim();
    DVector::from_fn(2 * k, |i, _| {
        let c = z.coord(i / 2);
        if i % 2 == 0 {
            c.re
        } else {
            c.im
        }
    })
}

/// Deterministic orthonormal basis of x^⊥ in R^{2k}, starting with i·x.
fn tangent_basis_real(x: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = x.len();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n - 1);
    let mut candidates: Vec<DVector<f64>> = Vec::with_capacity(n + 1);
    // multiplication by i in the real coordinates: (re, im) ↦ (−im, re)
    let ix = DVector::from_fn(n, |i, _| {
        if i % 2 == 0 {
            -x[i + 1]
        } else {
            x[i - 1]
        }
    });
    candidates.push(ix);
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        candidates.push(e);
    }
    for mut c in candidates {
        c -= x * x.dot(&c);
        for b in &basis {
            let d = b.dot(&c);
            c -= b * d;
        }
        let norm = c.norm();
        if norm > 1e-8 {
            basis.push(c / norm);
            if basis.len() == n - 1 {
                break;
            }
        }
    }
    basis
}

/// 2-jet of the boundary action of φ at x ∈ ∂B_k, by exact differentiation
/// of the rational fractional-linear formula in stereographic charts.
pub fn jet2_boundary(phi: &BallMoebius, x: &ComplexPoint) -> Result<BoundaryJet2> {
    let k = phi.k();
    if x.dim() != k {
        return Err(Error::argument("jet base point dimension mismatch"));
    }
    if (x.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::precondition("jet base point must lie on the sphere"));
    }
    let image = phi.apply(x)?;
    let m = 2 * k - 1;
    let x_real = to_real(x);
    let img_real = to_real(&image);
    // chart for the image: base at x unless the image sits near its antipode
    let (chart, y0) = if (&img_real + &x_real).norm() >= 0.5 {
        (ChartTag::Base, x_real.clone())
    } else {
        (ChartTag::Antipode, -&x_real)
    };
    let source_basis = tangent_basis_real(&x_real);
    let target_basis = tangent_basis_real(&y0);

    // seed jets: u_i are the chart variables at 0
    let vars: Vec<TJet> = (0..m).map(|i| TJet::variable(m, i, 0.0)).collect();
    // q = |u|²/4
    let mut q = TJet::constant(m, 0.0);
    for v in &vars {
        q = q.add(&v.mul(v).scale(0.25));
    }
    // σ_x(u) = ((1−q)·x + Σ u_i b_i) / (1+q), on the sphere
    let denom = TJet::constant(m, 1.0).add(&q).recip();
    let one_minus_q = TJet::constant(m, 1.0).sub(&q);
    let mut point_real: Vec<TJet> = (0..2 * k)
        .map(|c| one_minus_q.scale(x_real[c]))
        .collect();
    for (i, b) in source_basis.iter().enumerate() {
        for (c, slot) in point_real.iter_mut().enumerate() {
            *slot = slot.add(&vars[i].scale(b[c]));
        }
    }
    for slot in point_real.iter_mut() {
        *slot = slot.mul(&denom);
    }
    // pack into complex jets and apply the fractional-linear action
    let z: Vec<CJet> = (0..k)
        .map(|i| CJet {
            re: point_real[2 * i].clone(),
            im: point_real[2 * i + 1].clone(),
        })
        .collect();
    let mat = phi.matrix();
    let mut xi: Vec<CJet> = Vec::with_capacity(k + 1);
    for r in 0..=k {
        let mut acc = CJet::constant(m, mat[(r, 0)]);
        for (j, zj) in z.iter().enumerate() {
            acc = acc.add(&zj.mul_const(mat[(r, j + 1)]));
        }
        xi.push(acc);
    }
    let inv0 = xi[0].recip();
    let w: Vec<CJet> = (1..=k).map(|r| xi[r].mul(&inv0)).collect();
    // unpack to real coordinates
    let w_real: Vec<TJet> = (0..2 * k)
        .map(|c| {
            if c % 2 == 0 {
                w[c / 2].re.clone()
            } else {
                w[c / 2].im.clone()
            }
        })
        .collect();
    // σ_{y0}^{-1}(p) = 2·⟨p, b'_i⟩ / (1 + ⟨p, y0⟩)
    let mut inner_y0 = TJet::constant(m, 1.0);
    for c in 0..2 * k {
        inner_y0 = inner_y0.add(&w_real[c].scale(y0[c]));
    }
    let inv = inner_y0.recip();
    let mut out: Vec<TJet> = Vec::with_capacity(m);
    for b in &target_basis {
        let mut acc = TJet::constant(m, 0.0);
        for c in 0..2 * k {
            acc = acc.add(&w_real[c].scale(b[c]));
        }
        out.push(acc.mul(&inv).scale(2.0));
    }
    Ok(BoundaryJet2 {
        base: x.clone(),
        image,
        chart,
        value: out.iter().map(|j| j.v).collect(),
        jacobian: out
            .iter()
            .map(|j| j.g.iter().copied().collect())
            .collect(),
        hessian: out
            .iter()
            .map(|j| {
                (0..m)
                    .map(|r| (0..m).map(|c| j.h[(r, c)]).collect())
                    .collect()
            })
            .collect(),
    })
}
