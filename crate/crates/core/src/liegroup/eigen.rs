//! Clustered eigenstructure of small complex matrices: additive
//! semisimple + nilpotent splitting via Hermite interpolation, with spectral
//! projections for the diagonalizable part.
//!
//! Clusterings are tried from fine to coarse; a candidate is accepted when
//! the spectral projections are well conditioned and the residual nilpotent
//! part actually is nilpotent. Defective matrices (whose computed eigenvalues
//! scatter by roundoff^(1/m)) land in the coarser clusterings.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) struct EigenStructure {
    /// cluster means with multiplicities
    pub clusters: Vec<(C64, usize)>,
    /// S with A = S + N, [S, N] = 0, S diagonalizable
    pub semisimple: DMatrix<C64>,
    /// N nilpotent
    pub nilpotent: DMatrix<C64>,
    /// spectral projections of S onto the cluster eigenspaces
    pub projections: Vec<DMatrix<C64>>,
}

fn raw_eigenvalues(a: &DMatrix<C64>) -> Result<Vec<C64>> {
    let schur = a
        .clone()
        .try_schur(1e-14, 10_000)
        .ok_or_else(|| Error::numeric("Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    let mut vals: Vec<C64> = (0..a.nrows()).map(|i| t[(i, i)]).collect();
    // deterministic ordering
    vals.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    Ok(vals)
}

fn cluster_values(vals: &[C64], delta: f64) -> Vec<(C64, usize)> {
    // transitive merge of values within delta
    let n = vals.len();
    let mut group = (0..n).collect::<Vec<usize>>();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if group[i] != group[j] && (vals[i] - vals[j]).norm() <= delta {
                    let (a, b) = (group[i].min(group[j]), group[i].max(group[j]));
                    for g in group.iter_mut() {
                        if *g == b {
                            *g = a;
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: Vec<(C64, usize)> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for i in 0..n {
        if seen.contains(&group[i]) {
            continue;
        }
        seen.push(group[i]);
        let members: Vec<C64> = (0..n).filter(|&j| group[j] == group[i]).map(|j| vals[j]).collect();
        let mean = members.iter().sum::<C64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    out
}

/// Hermite interpolation polynomial p with p(μ_i) = μ_i and vanishing
/// derivatives up to order m_i − 1, evaluated on the matrix: S = p(A).
fn semisimple_part(a: &DMatrix<C64>, clusters: &[(C64, usize)]) -> Result<DMatrix<C64>> {
    let n = a.nrows();
    if clusters.iter().all(|&(_, m)| m == 1) {
        return Ok(a.clone());
    }
    // coefficients of p (degree ≤ n−1) from the confluent Vandermonde system
    let rows = n;
    let mut v = DMatrix::<C64>::zeros(rows, rows);
    let mut rhs = nalgebra::DVector::<C64>::zeros(rows);
    let mut r = 0usize;
    for &(mu, mult) in clusters {
        for l in 0..mult {
            // d^l/dx^l x^c at mu = c!/(c−l)! mu^{c−l}
            for c in 0..rows {
                if c >= l {
                    let mut fact = 1.0;
                    for f in 0..l {
                        fact *= (c - f) as f64;
                    }
                    v[(r, c)] = mu.powu((c - l) as u32) * fact;
                }
            }
            rhs[r] = if l == 0 { mu } else { C64::new(0.0, 0.0) };
            r += 1;
        }
    }
    let lu = v.lu();
    let coeffs = lu
        .solve(&rhs)
        .ok_or_else(|| Error::numeric("confluent Vandermonde solve failed"))?;
    // Horner on the matrix
    let mut s = DMatrix::<C64>::zeros(n, n);
    for c in (0..rows).rev() {
        s = s * a + DMatrix::<C64>::identity(n, n) * coeffs[c];
    }
    Ok(s)
}

fn lagrange_projections(
    s: &DMatrix<C64>,
    clusters: &[(C64, usize)],
) -> Vec<DMatrix<C64>> {
    let n = s.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    if clusters.len() == 1 {
        return vec![id];
    }
    clusters
        .iter()
        .enumerate()
        .map(|(i, &(mu_i, _))| {
            let mut p = id.clone();
            for (j, &(mu_j, _)) in clusters.iter().enumerate() {
                if j != i {
                    p = p * (s - &id * mu_j) / (mu_i - mu_j);
                }
            }
            p
        })
        .collect()
}

/// Tries clusterings fine → coarse and returns the first consistent one.
pub(crate) fn eigen_structure(a: &DMatrix<C64>) -> Result<EigenStructure> {
    let n = a.nrows();
    let scale = 1.0 + a.norm();
    let vals = raw_eigenvalues(a)?;
    let mut last_err = String::new();
    for delta in [1e-10, 3e-8, 1e-6, 3e-5, 1e-3] {
        let clusters = cluster_values(&vals, delta * scale);
        let s = match semisimple_part(a, &clusters) {
            Ok(s) => s,
            Err(e) => {
                last_err = e.to_string();
                continue;
            }
        };
        let nil = a - &s;
        // nilpotency of the residual to the max multiplicity
        let m_max = clusters.iter().map(|&(_, m)| m).max().unwrap();
        let mut pow = nil.clone();
        for _ in 1..m_max.min(n) {
            pow = &pow * &nil;
        }
        if pow.norm() > 1e-7 * scale.powi(m_max as i32) {
            last_err = format!("residual not nilpotent at delta {delta:.1e}");
            continue;
        }
        let projections = lagrange_projections(&s, &clusters);
        // conditioning and resolution-of-identity checks
        let proj_norm = projections.iter().map(|p| p.norm()).fold(0.0, f64::max);
        if proj_norm > 1e6 {
            last_err = format!("ill-conditioned projections at delta {delta:.1e}");
            continue;
        }
        let sum: DMatrix<C64> = projections
            .iter()
            .fold(DMatrix::<C64>::zeros(n, n), |acc, p| acc + p);
        if (sum - DMatrix::<C64>::identity(n, n)).norm() > 1e-7 {
            last_err = format!("projections do not resolve identity at delta {delta:.1e}");
            continue;
        }
        let mut eigen_ok = true;
        for (p, &(mu, _)) in projections.iter().zip(&clusters) {
            if (&s * p - p * mu).norm() > 1e-6 * scale * (1.0 + p.norm()) {
                eigen_ok = false;
                break;
            }
        }
        if !eigen_ok {
            last_err = format!("spectral equation failed at delta {delta:.1e}");
            continue;
        }
        return Ok(EigenStructure {
            clusters,
            semisimple: s,
            nilpotent: nil,
            projections,
        });
    }
    Err(Error::numeric(format!(
        "defective-eigenvalue conditioning failure: {last_err}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: &[&[(f64, f64)]]) -> DMatrix<C64> {
        let n = rows.len();
        DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j].0, rows[i][j].1))
    }

    #[test]
    fn splits_a_defective_matrix() {
        // strictly upper triangular bump: A = I + N with N² = 0
        let a = cm(&[&[(1.0, 0.0), (0.7, 0.2)], &[(0.0, 0.0), (1.0, 0.0)]]);
        let es = eigen_structure(&a).unwrap();
        assert_eq!(es.clusters.len(), 1);
        assert_eq!(es.clusters[0].1, 2);
        assert!((es.semisimple.clone() - DMatrix::<C64>::identity(2, 2)).norm() < 1e-8);
        assert!((es.nilpotent.clone() * es.nilpotent.clone()).norm() < 1e-12);
    }

    #[test]
    fn keeps_separated_eigenvalues_apart() {
        let a = cm(&[&[(2.0, 0.0), (1.0, 0.0)], &[(0.0, 0.0), (0.5, 0.0)]]);
        let es = eigen_structure(&a).unwrap();
        assert_eq!(es.clusters.len(), 2);
        assert!(es.nilpotent.norm() < 1e-9);
        // projections reconstruct A = Σ μ_i P_i for diagonalizable A
        let recon = es
            .projections
            .iter()
            .zip(&es.clusters)
            .fold(DMatrix::<C64>::zeros(2, 2), |acc, (p, &(mu, _))| {
                acc + p * mu
            });
        assert!((recon - a).norm() < 1e-9);
    }
}
