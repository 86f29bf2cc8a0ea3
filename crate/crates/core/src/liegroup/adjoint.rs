//! The real Lie algebra su(1,k) and the operator norm of Ad(g).
//!
//! su(1,k) = { X : X*J + JX = 0, tr X = 0 } has real dimension (k+1)² − 1.
//! The norm is fixed to the Frobenius inner product Re tr(XY*); with this
//! choice Ad(k) is orthogonal for block-unitary k and Ad(a_t) is symmetric
//! with norm e^t, so ‖Ad(g)‖ = e^{t(g)} exactly on SU(1,k).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Frobenius-orthonormal basis of su(1,k) as real vector space.
pub(crate) fn su_basis(k: usize) -> Vec<DMatrix<C64>> {
    let n = k + 1;
    let e = |i: usize, j: usize, c: C64| -> DMatrix<C64> {
        let mut m = DMatrix::<C64>::zeros(n, n);
        m[(i, j)] = c;
        m
    };
    let i_unit = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let mut gens: Vec<DMatrix<C64>> = Vec::new();
    // boost pairs mixing the 0th and q-th coordinates
    for q in 1..=k {
        gens.push(e(0, q, one) + e(q, 0, one));
        gens.push(e(0, q, i_unit) - e(q, 0, i_unit));
    }
    // compact rotations inside the negative block
    for p in 1..=k {
        for q in p + 1..=k {
            gens.push(e(p, q, one) - e(q, p, one));
            gens.push(e(p, q, i_unit) + e(q, p, i_unit));
        }
    }
    // imaginary diagonals, trace zero
    for l in 1..=k {
        gens.push(e(0, 0, i_unit) - e(l, l, i_unit));
    }
    // Gram–Schmidt in the real Frobenius inner product
    let ip = |a: &DMatrix<C64>, b: &DMatrix<C64>| -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
    };
    let mut basis: Vec<DMatrix<C64>> = Vec::with_capacity(gens.len());
    for mut g in gens {
        for b in &basis {
            let c = ip(&g, b);
            g -= b * C64::new(c, 0.0);
        }
        let norm = ip(&g, &g).sqrt();
        if norm > 1e-12 {
            basis.push(g / C64::new(norm, 0.0));
        }
    }
    debug_assert_eq!(basis.len(), n * n - 1);
    basis
}

/// Operator norm of Ad(g) on su(1,k) in the fixed Frobenius basis.
pub fn ad_matrix(g: &DMatrix<C64>, g_inv: &DMatrix<C64>) -> DMatrix<f64> {
    let k = g.nrows() - 1;
    let basis = su_basis(k);
    let dim = basis.len();
    let ip = |a: &DMatrix<C64>, b: &DMatrix<C64>| -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
    };
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (j, x) in basis.iter().enumerate() {
        let gx = g * x * g_inv;
        for (i, y) in basis.iter().enumerate() {
            m[(i, j)] = ip(&gx, y);
        }
    }
    m
}

pub(crate) fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
}
