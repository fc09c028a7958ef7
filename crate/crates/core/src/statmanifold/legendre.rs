use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::FiniteExpFamily;
use crate::error::{Error, Result};

pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 100;
/// Newton solutions whose Fisher metric has an eigenvalue below this are
/// treated as runaway iterations towards the boundary of the domain.
pub const BOUNDARY_EIGENVALUE: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct LegendrePoint {
    pub eta: DVector<f64>,
    /// `φ(η) = ⟨θ, η⟩ − ψ(θ)`.
    pub phi: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct HessianProductResidual {
    /// `max |Hess ψ · (Hess ψ)⁻¹ − I|`.
    pub inverse: f64,
    /// `max |Hess ψ · J − I|` with `J` the Richardson-extrapolated
    /// central-difference Jacobian of `η ↦ θ`.
    pub finite_difference: f64,
}

impl HessianProductResidual {
    pub fn max(&self) -> f64 {
        self.inverse.max(self.finite_difference)
    }
}

impl FiniteExpFamily {
    pub fn legendre(&self, theta: &DVector<f64>) -> Result<LegendrePoint> {
        let psi = self.log_partition(theta)?;
        let eta = self.expectation(theta)?;
        Ok(LegendrePoint {
            phi: theta.dot(&eta) - psi,
            eta,
        })
    }

    /// Solves `∇ψ(θ) = η` by Newton's method with step halving on
    /// `ψ(θ) − ⟨θ, η⟩`, starting from `θ = 0`.
    pub fn legendre_inverse(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        let d = self.d();
        if eta.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: eta.len(),
            });
        }
        if eta.iter().any(|x| !x.is_finite()) {
            return Err(Error::EtaOutsideDomain("non-finite η".into()));
        }
        let objective =
            |th: &DVector<f64>| -> Result<f64> { Ok(self.log_partition(th)? - th.dot(eta)) };
        let mut theta = DVector::zeros(d);
        let mut f = objective(&theta)?;
        let mut polished = false;
        for _ in 0..NEWTON_MAX_ITER {
            let grad = self.expectation(&theta)? - eta;
            let g = self.fisher_covariance(&theta)?;
            let converged = grad.amax() <= NEWTON_TOL;
            if converged && polished {
                let lmin = SymmetricEigen::new(g).eigenvalues.min();
                if lmin < BOUNDARY_EIGENVALUE {
                    return Err(Error::EtaOutsideDomain(format!(
                        "Newton ran to the boundary (metric eigenvalue {lmin:.3e})"
                    )));
                }
                return Ok(theta);
            }
            let step = match g.clone().cholesky() {
                Some(ch) => ch.solve(&grad),
                None => {
                    return Err(Error::EtaOutsideDomain(
                        "metric lost positive definiteness during Newton".into(),
                    ))
                }
            };
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let cand = &theta - &step * t;
                let fc = objective(&cand)?;
                if fc <= f + 4.0 * f64::EPSILON * (1.0 + f.abs()) || converged {
                    theta = cand;
                    f = fc;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
            // One extra full step after the tolerance is met.
            polished = converged;
        }
        Err(Error::EtaOutsideDomain(format!(
            "no convergence in {NEWTON_MAX_ITER} Newton iterations"
        )))
    }

    /// `φ(η)`.
    pub fn dual_potential(&self, eta: &DVector<f64>) -> Result<f64> {
        let theta = self.legendre_inverse(eta)?;
        Ok(theta.dot(eta) - self.log_partition(&theta)?)
    }

    /// `Hess φ(η) = g(θ(η))⁻¹`.
    pub fn dual_metric(&self, eta: &DVector<f64>) -> Result<DMatrix<f64>> {
        let theta = self.legendre_inverse(eta)?;
        let g = self.fisher_metric(&theta)?;
        let inv = g.try_inverse().ok_or(Error::SingularMetric)?;
        Ok((&inv + inv.transpose()) * 0.5)
    }

    /// Residual of `Hess ψ(θ) · Hess φ(η(θ)) = I`. The finite-difference
    /// step along `η_c` is `h · g_cc`.
    pub fn hessian_product_residual(
        &self,
        theta: &DVector<f64>,
        h: f64,
    ) -> Result<HessianProductResidual> {
        let d = self.d();
        let g = self.fisher_metric(theta)?;
        let ginv = g.clone().try_inverse().ok_or(Error::SingularMetric)?;
        let eye = DMatrix::identity(d, d);
        let eta = self.expectation(theta)?;
        let jac = |h: f64| -> Result<DMatrix<f64>> {
            let mut j = DMatrix::zeros(d, d);
            for c in 0..d {
                let hc = h * g[(c, c)];
                let mut ep = eta.clone();
                ep[c] += hc;
                let mut em = eta.clone();
                em[c] -= hc;
                let col = (self.legendre_inverse(&ep)? - self.legendre_inverse(&em)?) / (2.0 * hc);
                j.set_column(c, &col);
            }
            Ok(j)
        };
        let fd = (jac(h / 2.0)? * 4.0 - jac(h)?) / 3.0;
        Ok(HessianProductResidual {
            inverse: (&g * ginv - &eye).amax(),
            finite_difference: (&g * fd - &eye).amax(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn bernoulli_examples() {
        let f = FiniteExpFamily::bernoulli();
        let lp = f.legendre(&dvector![0.0]).unwrap();
        assert!((lp.eta[0] - 0.5).abs() < 1e-15);
        assert!((lp.phi + 2f64.ln()).abs() < 1e-15);

        assert!(f.legendre_inverse(&dvector![0.5]).unwrap()[0].abs() < 1e-14);
        let e = std::f64::consts::E;
        let th = f.legendre_inverse(&dvector![e / (1.0 + e)]).unwrap();
        assert!((th[0] - 1.0).abs() < 1e-12);

        for eta in [0.0, 1.0, -0.2, 1.5] {
            assert!(
                matches!(
                    f.legendre_inverse(&dvector![eta]),
                    Err(Error::EtaOutsideDomain(_))
                ),
                "η={eta}"
            );
        }
    }

    #[test]
    fn categorical_uniform_entropy() {
        for k in 2..6 {
            let f = FiniteExpFamily::categorical(k).unwrap();
            let lp = f.legendre(&DVector::zeros(k - 1)).unwrap();
            assert!((lp.phi + (k as f64).ln()).abs() < 1e-14);
            assert!((f.dual_potential(&lp.eta).unwrap() - lp.phi).abs() < 1e-14);
        }
    }

    #[test]
    fn vertices_and_exterior_are_rejected() {
        let f = FiniteExpFamily::categorical(3).unwrap();
        for eta in [
            dvector![1.0, 0.0],
            dvector![0.0, 0.0],
            dvector![0.5, 0.5],
            dvector![0.7, 0.7],
        ] {
            assert!(f.legendre_inverse(&eta).is_err(), "{eta}");
        }
    }

    #[test]
    fn round_trip_and_hessian_product() {
        let f = FiniteExpFamily::categorical(4).unwrap();
        let th = dvector![0.7, -1.1, 0.4];
        let eta = f.expectation(&th).unwrap();
        assert!((f.legendre_inverse(&eta).unwrap() - &th).amax() < 1e-12);
        let r = f.hessian_product_residual(&th, 1e-3).unwrap();
        assert!(r.inverse < 1e-12, "{r:?}");
        assert!(r.finite_difference < 1e-8, "{r:?}");
    }
}
