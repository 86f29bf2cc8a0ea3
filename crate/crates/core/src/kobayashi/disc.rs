//! Polynomial analytic discs, the competitors in the Kobayashi infimum.

use num_complex::Complex64 as C64;

use crate::domains::{ComplexPoint, DomainSpec};
use crate::error::{Error, Result};

/// A polynomial holomorphic map f(ζ) = Σ a_j ζ^j from the unit disc into C^d.
#[derive(Clone, Debug)]
pub struct AnalyticDisc {
    coefficients: Vec<ComplexPoint>,
}

impl AnalyticDisc {
    pub fn new(coefficients: Vec<ComplexPoint>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::argument("a disc needs at least one coefficient"));
        }
        let d = coefficients[0].dim();
        if coefficients.iter().any(|c| c.dim() != d) {
            return Err(Error::argument("coefficient dimensions disagree"));
        }
        Ok(AnalyticDisc { coefficients })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[ComplexPoint] {
        &self.coefficients
    }

    /// f(0), the prescribed base point when used as a metric competitor.
    pub fn center(&self) -> &ComplexPoint {
        &self.coefficients[0]
    }

    /// f′(0).
    pub fn derivative0(&self) -> ComplexPoint {
        if self.coefficients.len() > 1 {
            self.coefficients[1].clone()
        } else {
            ComplexPoint::origin(self.coefficients[0].dim())
        }
    }

    /// Horner evaluation at ζ.
    pub fn eval(&self, zeta: C64) -> ComplexPoint {
        let d = self.coefficients[0].dim();
        let mut acc = vec![C64::new(0.0, 0.0); d];
        for a in self.coefficients.iter().rev() {
            for (i, slot) in acc.iter_mut().enumerate() {
                *slot = *slot * zeta + a.coord(i);
            }
        }
        ComplexPoint::new(acc).expect("finite coefficients stay finite")
    }

    /// Worst defining-constraint value over `samples` uniform points of
    /// |ζ| = 1. Feasible discs report a strictly negative margin; by the
    /// maximum principle for the plurisubharmonic canonical r this controls
    /// the full closed disc.
    pub fn feasibility_margin(&self, domain: &DomainSpec, samples: usize) -> Result<f64> {
        let n_c = domain.constraint_count();
        let mut worst = f64::MIN;
        let mut eval = Default::default();
        for j in 0..samples {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
            let z = self.eval(C64::from_polar(1.0, theta));
            for i in 0..n_c {
                domain.constraint_eval(i, z.coords(), &mut eval);
                worst = worst.max(eval.value);
            }
        }
        Ok(worst)
    }
}
