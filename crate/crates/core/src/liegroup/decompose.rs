//! Multiplicative Jordan decomposition and KAK decomposition of SU(1,k)
//! elements.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::automorphisms::BallMoebius;
use crate::domains::ComplexPoint;
use crate::error::{Error, Result};

use super::eigen::eigen_structure;
use super::SU1kElement;

/// g = g_e · g_h · g_u with commuting elliptic, hyperbolic, unipotent parts.
#[derive(Clone, Debug)]
pub struct JordanDecomposition {
    pub elliptic: SU1kElement,
    pub hyperbolic: SU1kElement,
    pub unipotent: SU1kElement,
    pub diagnostics: JordanDiagnostics,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct JordanDiagnostics {
    /// ‖g_e·g_h·g_u − g‖
    pub reconstruction: f64,
    /// max pairwise commutator norm
    pub commutation: f64,
    /// worst J-isometry residual of the factors before re-projection
    pub j_residual: f64,
}

/// Multiplicative Jordan decomposition from the additive eigенstructure:
/// A = S + N splits off u = S⁻¹A, and the spectral projections of S give
/// h = Σ|μ|P and e = Σ(μ/|μ|)P.
pub fn jordan_decomposition(g: &SU1kElement) -> Result<JordanDecomposition> {
    let a = g.matrix();
    let n = a.nrows();
    let es = eigen_structure(a)?;
    let s = &es.semisimple;
    let s_inv = s
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::numeric("semisimple part is singular"))?;
    let u = &s_inv * a;
    let mut h = DMatrix::<C64>::zeros(n, n);
    let mut e = DMatrix::<C64>::zeros(n, n);
    for (p, &(mu, _)) in es.projections.iter().zip(&es.clusters) {
        let r = mu.norm();
        if r == 0.0 {
            return Err(Error::numeric("zero eigenvalue in SU(1,k)"));
        }
        h += p * C64::new(r, 0.0);
        e += p * (mu / r);
    }
    let j_residual = [&e, &h, &u]
        .iter()
        .map(|m| crate::automorphisms::j_residual(m))
        .fold(0.0f64, f64::max);
    let elliptic = SU1kElement::new_projected(e)?;
    let hyperbolic = SU1kElement::new_projected(h)?;
    let unipotent = SU1kElement::new_projected(u)?;
    let recon = elliptic.matrix() * hyperbolic.matrix() * unipotent.matrix() - a;
    let comm = |x: &DMatrix<C64>, y: &DMatrix<C64>| (x * y - y * x).norm();
    let commutation = comm(elliptic.matrix(), hyperbolic.matrix())
        .max(comm(elliptic.matrix(), unipotent.matrix()))
        .max(comm(hyperbolic.matrix(), unipotent.matrix()));
    Ok(JordanDecomposition {
        elliptic,
        hyperbolic,
        unipotent,
        diagnostics: JordanDiagnostics {
            reconstruction: recon.norm(),
            commutation,
            j_residual,
        },
    })
}

/// g = k₁ · a_t · k₂ with k_i block-diagonal compact and t ≥ 0.
#[derive(Clone, Debug)]
pub struct KakDecomposition {
    pub k1: SU1kElement,
    pub a: SU1kElement,
    pub k2: SU1kElement,
    pub t: f64,
    pub diagnostics: KakDiagnostics,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KakDiagnostics {
    /// ‖k₁·a·k₂ − g‖
    pub reconstruction: f64,
    /// off-block mass of k₂ (k₁ is block-diagonal by construction)
    pub block_residual: f64,
}

/// Constructive KAK: w = g·0 fixes t = 2·arctanh|w| and the first factor is
/// the block unitary rotating a_t·0 onto w; the compact remainder fixes 0.
pub fn kak_decomposition(g: &SU1kElement) -> Result<KakDecomposition> {
    let k = g.k();
    let n = k + 1;
    let moebius = BallMoebius::new(g.matrix().clone())?;
    let w = moebius.apply(&ComplexPoint::origin(k))?;
    let r = w.norm();
    if r >= 1.0 {
        return Err(Error::numeric("g·0 left the ball"));
    }
    let t = ((1.0 + r) / (1.0 - r)).ln();
    let a_mat = BallMoebius::cartan(k, t).matrix().clone();
    // block unitary U with U e_1 = w/|w| (any unitary when w = 0)
    let mut u = DMatrix::<C64>::identity(k, k);
    if r > 1e-14 {
        let what: Vec<C64> = w.coords().iter().map(|c| c / r).collect();
        let mut cols: Vec<Vec<C64>> = vec![what.clone()];
        // complete with coordinate vectors, skipping the most aligned one
        let skip = (0..k)
            .max_by(|&i, &j| {
                what[i]
                    .norm_sqr()
                    .partial_cmp(&what[j].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        for i in (0..k).filter(|&i| i != skip) {
            let mut v = vec![C64::new(0.0, 0.0); k];
            v[i] = C64::new(1.0, 0.0);
            for col in &cols {
                let ip: C64 = v.iter().zip(col).map(|(a, b)| a * b.conj()).sum();
                for (slot, c) in v.iter_mut().zip(col) {
                    *slot -= ip * c;
                }
            }
            let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return Err(Error::numeric("unitary completion degenerated"));
            }
            for slot in v.iter_mut() {
                *slot /= C64::new(norm, 0.0);
            }
            cols.push(v);
        }
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col.iter().enumerate() {
                u[(i, j)] = *c;
            }
        }
    }
    let mut k1 = DMatrix::<C64>::identity(n, n);
    for i in 0..k {
        for j in 0..k {
            k1[(i + 1, j + 1)] = u[(i, j)];
        }
    }
    // normalize det to 1 by a global phase (the projective action is unchanged)
    let det = k1.determinant();
    let phase = C64::from_polar(1.0, -det.arg() / n as f64);
    k1 *= phase;
    let k1_inv = k1.adjoint();
    let a_inv = BallMoebius::cartan(k, -t).matrix().clone();
    let k2 = a_inv * k1_inv * g.matrix();
    // the remainder must be block diagonal (it fixes the origin)
    let mut block_residual: f64 = 0.0;
    for i in 1..n {
        block_residual = block_residual.max(k2[(0, i)].norm()).max(k2[(i, 0)].norm());
    }
    if block_residual > 1e-9 {
        return Err(Error::numeric(format!(
            "KAK remainder is not compact (off-block {block_residual:.3e})"
        )));
    }
    let k1 = SU1kElement::new_projected(k1)?;
    let a = SU1kElement::new_projected(a_mat)?;
    let k2 = SU1kElement::new_projected(k2)?;
    let recon = (k1.matrix() * a.matrix() * k2.matrix() - g.matrix()).norm();
    Ok(KakDecomposition {
        k1,
        a,
        k2,
        t,
        diagnostics: KakDiagnostics {
            reconstruction: recon,
            block_residual,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::LieLabel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn jordan_of_identity_and_cartan() {
        let id = SU1kElement::identity(2);
        let jd = jordan_decomposition(&id).unwrap();
        assert!(jd.diagnostics.reconstruction < 1e-12);
        for f in [&jd.elliptic, &jd.hyperbolic, &jd.unipotent] {
            assert!((f.matrix() - id.matrix()).norm() < 1e-10);
        }

        let a = SU1kElement::cartan(1, 1.0);
        let jd = jordan_decomposition(&a).unwrap();
        assert!((jd.hyperbolic.matrix() - a.matrix()).norm() < 1e-9);
        assert!((jd.elliptic.matrix() - SU1kElement::identity(1).matrix()).norm() < 1e-9);
        assert!((jd.unipotent.matrix() - SU1kElement::identity(1).matrix()).norm() < 1e-9);
    }

    #[test]
    fn jordan_reconstructs_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for k in [1usize, 2] {
            for _ in 0..100 {
                let g = SU1kElement::random(k, &mut rng);
                let jd = jordan_decomposition(&g).unwrap();
                assert!(
                    jd.diagnostics.reconstruction < 1e-9,
                    "reconstruction {:.3e}",
                    jd.diagnostics.reconstruction
                );
                assert!(jd.diagnostics.commutation < 1e-9);
                // labels of the factors match their roles
                let le = super::super::classify_lie(&jd.elliptic, 1e-7).unwrap();
                assert!(
                    le.label == LieLabel::Elliptic,
                    "elliptic factor mislabeled {:?}",
                    le.label
                );
                let lh = super::super::classify_lie(&jd.hyperbolic, 1e-7).unwrap();
                assert!(
                    lh.label == LieLabel::Elliptic || lh.label == LieLabel::Hyperbolic,
                    "hyperbolic factor mislabeled {:?}",
                    lh.label
                );
            }
        }
    }

    #[test]
    fn jordan_commutes_with_conjugation_up_to_center() {
        // uniqueness up to center: decomposing c·g·c⁻¹ must give the
        // conjugated factors up to a central (k+1)-th root of unity
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = SU1kElement::random(2, &mut rng);
            let c = SU1kElement::random(2, &mut rng);
            let c_inv = c.inverse();
            let conj = SU1kElement::new_projected(
                c.matrix() * g.matrix() * c_inv.matrix(),
            )
            .unwrap();
            let jd = jordan_decomposition(&g).unwrap();
            let jc = jordan_decomposition(&conj).unwrap();
            let transported = c.matrix() * jd.hyperbolic.matrix() * c_inv.matrix();
            // compare up to a central phase
            let mut best = f64::INFINITY;
            let n = 3;
            for r in 0..n {
                let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / n as f64);
                best = best.min((jc.hyperbolic.matrix() - &transported * phase).norm());
            }
            assert!(best < 1e-7, "hyperbolic factor not conjugation-equivariant: {best:.3e}");
        }
    }

    #[test]
    fn kak_examples() {
        // compact block-diagonal element: t = 0
        let rot = SU1kElement::new_projected(
            BallMoebius::rotation(&[0.4, 1.3]).matrix().clone(),
        )
        .unwrap();
        let kd = kak_decomposition(&rot).unwrap();
        assert!(kd.t.abs() < 1e-12);
        assert!(kd.diagnostics.reconstruction < 1e-9);

        // a_t recovers t
        let a = SU1kElement::cartan(2, 1.7);
        let kd = kak_decomposition(&a).unwrap();
        assert!((kd.t - 1.7).abs() < 1e-10, "t = {}", kd.t);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in [1usize, 2] {
            for _ in 0..100 {
                let g = SU1kElement::random(k, &mut rng);
                let kd = kak_decomposition(&g).unwrap();
                assert!(kd.t >= 0.0);
                assert!(
                    kd.diagnostics.reconstruction < 1e-9,
                    "reconstruction {:.3e}",
                    kd.diagnostics.reconstruction
                );
            }
        }
    }
}
