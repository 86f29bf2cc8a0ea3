//! Concrete SU(1,k) toolkit: element classification by eigen-data, Jordan
//! and KAK decompositions, adjoint norms, the equivariant map from ellipse
//! limit sets onto the sphere, and boundary 2-jets of ball automorphisms.

mod adjoint;
mod decompose;
mod eigen;
mod jets;

pub use decompose::{
    jordan_decomposition, kak_decomposition, JordanDecomposition, JordanDiagnostics,
    KakDecomposition, KakDiagnostics,
};
pub use jets::{jet2_boundary, BoundaryJet2, ChartTag};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;

use crate::automorphisms::{j_residual, reproject_j, BallMoebius, WebsterAut};
use crate::domains::{ComplexPoint, DomainSpec};
use crate::error::{Error, Result};

/// An element of SU(1,k): g*Jg = J with det g = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SU1kElement {
    matrix: DMatrix<C64>,
}

impl SU1kElement {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::argument("SU(1,k) matrices are square, size ≥ 2"));
        }
        let res = j_residual(&matrix);
        if res > 1e-10 {
            return Err(Error::argument(format!(
                "not a J-isometry (residual {res:.3e})"
            )));
        }
        let det = matrix.determinant();
        if (det - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::argument(format!("det = {det} must be 1")));
        }
        Ok(SU1kElement { matrix })
    }

    /// Projects onto the J-isometry constraint and normalizes det to 1 by a
    /// central phase before validating.
    pub fn new_projected(matrix: DMatrix<C64>) -> Result<Self> {
        let n = matrix.nrows();
        let mut m = matrix;
        if j_residual(&m) > 1e-12 {
            reproject_j(&mut m);
        }
        let det = m.determinant();
        if det.norm() < 0.5 {
            return Err(Error::numeric("matrix is numerically singular"));
        }
        let root = C64::from_polar(det.norm().powf(1.0 / n as f64), det.arg() / n as f64);
        m /= root;
        SU1kElement::new(m)
    }

    pub fn identity(k: usize) -> Self {
        SU1kElement {
            matrix: DMatrix::identity(k + 1, k + 1),
        }
    }

    /// The Cartan one-parameter element a_t.
    pub fn cartan(k: usize, t: f64) -> Self {
        SU1kElement {
            matrix: BallMoebius::cartan(k, t).matrix().clone(),
        }
    }

    pub fn k(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn inverse(&self) -> SU1kElement {
        let j = crate::automorphisms::j_matrix(self.k() + 1);
        SU1kElement {
            matrix: &j * self.matrix.adjoint() * &j,
        }
    }

    pub fn compose(&self, other: &SU1kElement) -> Result<SU1kElement> {
        if self.k() != other.k() {
            return Err(Error::argument("dimension mismatch"));
        }
        SU1kElement::new_projected(&self.matrix * &other.matrix)
    }

    /// The fractional-linear action on the ball.
    pub fn to_moebius(&self) -> BallMoebius {
        BallMoebius::new(self.matrix.clone()).expect("SU(1,k) elements act on the ball")
    }

    /// Seeded random element: exp of a random algebra vector.
    pub fn random<R: Rng>(k: usize, rng: &mut R) -> SU1kElement {
        let basis = adjoint::su_basis(k);
        let n = k + 1;
        let mut x = DMatrix::<C64>::zeros(n, n);
        for b in &basis {
            x += b * C64::new(rng.gen_range(-0.8..0.8), 0.0);
        }
        SU1kElement::new_projected(x.exp()).expect("exp lands in the group")
    }
}

/// Lie-theoretic label of an element (via the eigenvalues of its matrix,
/// which determine the Ad-level classification for this group).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LieLabel {
    Elliptic,
    Hyperbolic,
    Unipotent,
    Mixed,
}

/// Eigenvalue with multiplicity, serialized as ([re, im], multiplicity).
#[derive(Clone, Debug, Serialize)]
pub struct EigenDatum {
    pub value: [f64; 2],
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LieClassification {
    pub label: LieLabel,
    pub eigen_data: Vec<EigenDatum>,
}

/// Classifies by eigen-data: unit-circle diagonalizable → elliptic; common
/// phase, positive moduli spread, diagonalizable → hyperbolic; single
/// eigenvalue with nontrivial nilpotent part → unipotent; else mixed.
/// Central elements report elliptic by the precedence rule.
pub fn classify_lie(g: &SU1kElement, tol: f64) -> Result<LieClassification> {
    let es = eigen::eigen_structure(g.matrix())?;
    let scale = 1.0 + g.matrix().norm();
    let diagonalizable = es.nilpotent.norm() <= 1e-9 * scale;
    let eigen_data: Vec<EigenDatum> = es
        .clusters
        .iter()
        .map(|&(mu, m)| EigenDatum {
            value: [mu.re, mu.im],
            multiplicity: m,
        })
        .collect();
    let single = es.clusters.len() == 1;
    // central: a scalar matrix
    let central = single && {
        let mu = es.clusters[0].0;
        (g.matrix() - DMatrix::<C64>::identity(g.k() + 1, g.k() + 1) * mu).norm() <= 1e-9 * scale
    };
    let all_unimodular = es
        .clusters
        .iter()
        .all(|&(mu, _)| (mu.norm() - 1.0).abs() <= tol);
    let common_phase = {
        let omega = {
            let mu = es.clusters[0].0;
            mu / mu.norm()
        };
        es.clusters.iter().all(|&(mu, _)| {
            let rotated = mu * omega.conj();
            rotated.re > 0.0 && rotated.im.abs() <= tol * (1.0 + mu.norm())
        })
    };
    let label = if central {
        LieLabel::Elliptic
    } else if diagonalizable && all_unimodular {
        LieLabel::Elliptic
    } else if diagonalizable && common_phase {
        LieLabel::Hyperbolic
    } else if single && !diagonalizable {
        LieLabel::Unipotent
    } else {
        LieLabel::Mixed
    };
    Ok(LieClassification { label, eigen_data })
}

/// Operator norm of Ad(g) on su(1,k) in the fixed Frobenius basis.
pub fn ad_norm(g: &SU1kElement) -> f64 {
    let m = adjoint::ad_matrix(g.matrix(), g.inverse().matrix());
    adjoint::operator_norm(&m)
}

/// The equivariant map from the ellipse limit sphere onto ∂B_k: projection
/// to the exponent-1 block, intertwining Webster automorphisms with their
/// Möbius parts. Returns F(g·x0).
pub fn equivariant_map(
    ellipse: &DomainSpec,
    x0: &ComplexPoint,
    g: &WebsterAut,
) -> Result<ComplexPoint> {
    if g.ellipse() != ellipse {
        return Err(Error::argument("automorphism acts on a different ellipse"));
    }
    let k = g.k();
    let head_norm = x0.head(k).norm();
    let tail_norm: f64 = (k..x0.dim())
        .map(|i| x0.coord(i).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if (head_norm - 1.0).abs() > 1e-8 || tail_norm > 1e-8 {
        return Err(Error::argument(
            "base point must lie on the limit sphere ∂E ∩ span{e_1..e_k}",
        ));
    }
    let image = g.apply(x0)?;
    Ok(image.head(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn classify_lie_examples() {
        // identity: elliptic by the precedence rule
        let id = SU1kElement::identity(1);
        assert_eq!(classify_lie(&id, 1e-8).unwrap().label, LieLabel::Elliptic);

        // Cartan element: hyperbolic with eigenvalues e^{±t/2}
        let a = SU1kElement::cartan(1, 1.0);
        let c = classify_lie(&a, 1e-8).unwrap();
        assert_eq!(c.label, LieLabel::Hyperbolic);
        let mut mods: Vec<f64> = c
            .eigen_data
            .iter()
            .map(|e| (e.value[0] * e.value[0] + e.value[1] * e.value[1]).sqrt())
            .collect();
        mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((mods[0] - (-0.5f64).exp()).abs() < 1e-9);
        assert!((mods[1] - (0.5f64).exp()).abs() < 1e-9);

        // Cayley-transported translation: unipotent, (g − I)² = 0
        let p = SU1kElement::new_projected(
            BallMoebius::disc_parabolic(1, 1.0).matrix().clone(),
        )
        .unwrap();
        let gm = p.matrix() - DMatrix::<C64>::identity(2, 2);
        assert!((&gm * &gm).norm() < 1e-12, "(g−I)² must vanish");
        assert_eq!(classify_lie(&p, 1e-8).unwrap().label, LieLabel::Unipotent);

        // rotations: elliptic
        let r = SU1kElement::new_projected(BallMoebius::rotation(&[0.9]).matrix().clone()).unwrap();
        assert_eq!(classify_lie(&r, 1e-8).unwrap().label, LieLabel::Elliptic);

        // mixed: hyperbolic times a genuine rotation in SU(1,2)
        let m = SU1kElement::new_projected(
            (BallMoebius::cartan(2, 1.0).matrix() * BallMoebius::rotation(&[0.0, 1.0]).matrix())
                .clone(),
        )
        .unwrap();
        let label = classify_lie(&m, 1e-8).unwrap().label;
        assert_eq!(label, LieLabel::Mixed);
    }

    #[test]
    fn ad_norm_examples() {
        assert!((ad_norm(&SU1kElement::identity(2)) - 1.0).abs() < 1e-9);
        let a = SU1kElement::cartan(1, 1.0);
        assert!((ad_norm(&a) - 1.0f64.exp()).abs() < 1e-9);
        // symmetry under inversion
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let g = SU1kElement::random(2, &mut rng);
            let n1 = ad_norm(&g);
            let n2 = ad_norm(&g.inverse());
            assert!((n1 - n2).abs() <= 1e-9 * n1.max(1.0), "{n1} vs {n2}");
        }
    }

    #[test]
    fn ad_norm_is_submultiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let g = SU1kElement::random(1, &mut rng);
            let h = SU1kElement::random(1, &mut rng);
            let gh = g.compose(&h).unwrap();
            assert!(ad_norm(&gh) <= ad_norm(&g) * ad_norm(&h) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn distance_norm_relation_is_exact_on_su1k() {
        // K(g·0, 0) = ½·log‖Ad(g)‖ with the Frobenius-adapted norm; the
        // left side is the slice oracle arctanh|g·0|.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let g = SU1kElement::random(2, &mut rng);
            let w = g.to_moebius().apply(&ComplexPoint::origin(2)).unwrap();
            let k_exact = w.norm().atanh();
            let bound = 0.5 * ad_norm(&g).ln();
            assert!(
                (k_exact - bound).abs() <= 1e-9 * (1.0 + bound),
                "K = {k_exact} vs ½·log‖Ad‖ = {bound}"
            );
        }
    }

    #[test]
    fn equivariant_map_examples() {
        let e = DomainSpec::ellipse(vec![1, 2]).unwrap();
        let id = WebsterAut::identity(e.clone()).unwrap();
        let x0 = ComplexPoint::new(vec![C64::from_polar(1.0, 0.7), C64::new(0.0, 0.0)]).unwrap();
        let f = equivariant_map(&e, &x0, &id).unwrap();
        assert!((f.coord(0) - x0.coord(0)).norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let phi = BallMoebius::disc_hyperbolic(1, C64::new(0.5, 0.0)).unwrap();
        for _ in 0..200 {
            let theta: f64 = rng.gen_range(0.0..6.28);
            let phase: f64 = rng.gen_range(0.0..6.28);
            let g = WebsterAut::new(e.clone(), phi.clone(), vec![phase]).unwrap();
            let x0 =
                ComplexPoint::new(vec![C64::from_polar(1.0, theta), C64::new(0.0, 0.0)]).unwrap();
            let lhs = equivariant_map(&e, &x0, &g).unwrap();
            let rhs = phi.apply(&x0.head(1)).unwrap();
            assert!(lhs.dist(&rhs) < 1e-9, "equivariance broke");
        }

        // off the limit set: rejected
        let bad = ComplexPoint::new(vec![C64::new(0.6, 0.0), C64::new(0.8, 0.0)]).unwrap();
        assert!(equivariant_map(&e, &bad, &id).is_err());
    }

    #[test]
    fn equivariant_map_is_injective_on_the_circle() {
        let e = DomainSpec::ellipse(vec![1, 2]).unwrap();
        let id = WebsterAut::identity(e.clone()).unwrap();
        let n = 1000;
        let mut images = Vec::with_capacity(n);
        for i in 0..n {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let x0 =
                ComplexPoint::new(vec![C64::from_polar(1.0, theta), C64::new(0.0, 0.0)]).unwrap();
            images.push(equivariant_map(&e, &x0, &id).unwrap());
        }
        let mut min_gap = f64::INFINITY;
        for i in 0..n {
            let j = (i + 1) % n;
            min_gap = min_gap.min(images[i].dist(&images[j]));
        }
        assert!(min_gap > 0.0);
    }
}
