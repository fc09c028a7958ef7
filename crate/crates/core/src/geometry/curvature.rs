use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::connections::metric_derivatives;
use super::fields::{check_point, partials, ConnectionField, MetricField};
use crate::error::Result;

/// `max |∂ᵢg_jk − Γ_{ij,k} − Γ*_{ik,j}|` over all index triples, with
/// first-kind symbols `Γ_{ij,k} = g_kl Γˡᵢⱼ`.
pub fn conjugacy_residual<M, C, D>(
    g: &M,
    conn: &C,
    dual: &D,
    x: &DVector<f64>,
    h: f64,
) -> Result<f64>
where
    M: MetricField + ?Sized,
    C: ConnectionField + ?Sized,
    D: ConnectionField + ?Sized,
{
    let d = g.dim();
    check_point(d, x)?;
    let dg = metric_derivatives(g, x, h)?;
    let gx = g.metric(x)?;
    let a = conn.christoffel(x)?.first_kind(&gx);
    let b = dual.christoffel(x)?.first_kind(&gx);
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let r = dg[(i * d + j) * d + k] - a[(i * d + j) * d + k] - b[(i * d + k) * d + j];
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// Riemann tensor `Rˡᵢⱼₖ = ∂ᵢΓˡⱼₖ − ∂ⱼΓˡᵢₖ + ΓˡᵢₘΓᵐⱼₖ − ΓˡⱼₘΓᵐᵢₖ`,
/// stored `[l][i][j][k]`, derivatives by central differences.
pub fn riemann<C: ConnectionField + ?Sized>(
    conn: &C,
    x: &DVector<f64>,
    h: f64,
) -> Result<Vec<f64>> {
    let d = conn.dim();
    check_point(d, x)?;
    let gam = conn.christoffel(x)?;
    let dgam = partials(|y| Ok(conn.christoffel(y)?.data().to_vec()), x, h)?;
    let dg = |a: usize, l: usize, j: usize, k: usize| dgam[a][(l * d + j) * d + k];
    let mut out = vec![0.0; d * d * d * d];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut r = dg(i, l, j, k) - dg(j, l, i, k);
                    for m in 0..d {
                        r += gam.get(l, i, m) * gam.get(m, j, k)
                            - gam.get(l, j, m) * gam.get(m, i, k);
                    }
                    out[((l * d + i) * d + j) * d + k] = r;
                }
            }
        }
    }
    Ok(out)
}

/// `max |Rˡᵢⱼₖ|`.
pub fn curvature_residual<C: ConnectionField + ?Sized>(
    conn: &C,
    x: &DVector<f64>,
    h: f64,
) -> Result<f64> {
    Ok(riemann(conn, x, h)?.iter().fold(0.0, |m, r| m.max(r.abs())))
}

/// A finite-difference residual evaluated at steps `h` and `h/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepProbe {
    pub h: f64,
    pub at_h: f64,
    pub at_half_h: f64,
}

impl StepProbe {
    pub fn new<F>(h: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        Ok(Self {
            h,
            at_h: f(h)?,
            at_half_h: f(h / 2.0)?,
        })
    }

    /// The larger of the two evaluations.
    pub fn residual(&self) -> f64 {
        self.at_h.max(self.at_half_h)
    }

    /// True when halving the step changes the residual by more than 10 %,
    /// i.e. the value reflects the discretization rather than the geometry.
    pub fn discretization_dominated(&self) -> bool {
        let scale = self.at_h.max(self.at_half_h);
        scale > 0.0 && (self.at_h - self.at_half_h).abs() > 0.1 * scale
    }
}

pub fn curvature_probe<C: ConnectionField + ?Sized>(
    conn: &C,
    x: &DVector<f64>,
    h: f64,
) -> Result<StepProbe> {
    StepProbe::new(h, |s| curvature_residual(conn, x, s))
}

pub fn conjugacy_probe<M, C, D>(
    g: &M,
    conn: &C,
    dual: &D,
    x: &DVector<f64>,
    h: f64,
) -> Result<StepProbe>
where
    M: MetricField + ?Sized,
    C: ConnectionField + ?Sized,
    D: ConnectionField + ?Sized,
{
    StepProbe::new(h, |s| conjugacy_residual(g, conn, dual, x, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        AlphaConnection, AlphaConnectionExpectation, DualFisherMetric, FisherMetric,
        FlatConnection, LeviCivita,
    };
    use crate::statmanifold::FiniteExpFamily;
    use nalgebra::dvector;

    #[test]
    fn flat_connection_has_zero_curvature() {
        assert_eq!(
            curvature_residual(&FlatConnection(3), &dvector![0.1, 0.2, 0.3], 1e-4).unwrap(),
            0.0
        );
    }

    #[test]
    fn bernoulli_conjugate_pairs() {
        let f = FiniteExpFamily::bernoulli();
        let g = FisherMetric(f.clone());
        let e = AlphaConnection {
            family: f.clone(),
            alpha: 1.0,
        };
        let m = AlphaConnection {
            family: f.clone(),
            alpha: -1.0,
        };
        for th in [-1.0, 0.0, 1.0] {
            let x = dvector![th];
            assert!(conjugacy_residual(&g, &e, &m, &x, 1e-4).unwrap() <= 1e-5);
        }
        let lc = LeviCivita::new(g.clone());
        assert!(conjugacy_residual(&g, &lc, &lc, &dvector![0.5], 1e-4).unwrap() <= 2e-5);
        assert!(conjugacy_residual(&g, &e, &e, &dvector![1.0], 1e-4).unwrap() > 1e-3);
    }

    #[test]
    fn categorical_flatness_and_curvature() {
        let f = FiniteExpFamily::categorical(3).unwrap();
        let th = dvector![0.2, -0.4];
        let e = AlphaConnection {
            family: f.clone(),
            alpha: 1.0,
        };
        assert!(curvature_residual(&e, &th, 1e-4).unwrap() <= 1e-5);

        let eta = f.expectation(&th).unwrap();
        let m = AlphaConnectionExpectation {
            family: f.clone(),
            alpha: -1.0,
        };
        assert!(curvature_residual(&m, &eta, 1e-4).unwrap() <= 1e-5);

        // α = 0 in either chart is curved; the two charts agree up to the
        // tensorial change of coordinates, so the residuals are comparable.
        let lc = LeviCivita::new(FisherMetric(f.clone()));
        let probe = curvature_probe(&lc, &th, 1e-3).unwrap();
        assert!(probe.residual() > 1e-2);
        assert!(!probe.discretization_dominated());
        let lc_dual = LeviCivita::new(DualFisherMetric(f.clone()));
        assert!(curvature_residual(&lc_dual, &eta, 1e-3).unwrap() > 1e-2);
    }

    #[test]
    fn alpha_duality() {
        let f = FiniteExpFamily::categorical(4).unwrap();
        let g = FisherMetric(f.clone());
        let x = dvector![0.1, 0.6, -0.3];
        for alpha in [0.0, 0.5, 1.0] {
            let a = AlphaConnection {
                family: f.clone(),
                alpha,
            };
            let b = AlphaConnection {
                family: f.clone(),
                alpha: -alpha,
            };
            assert!(conjugacy_residual(&g, &a, &b, &x, 1e-4).unwrap() <= 1e-5);
        }
        let eta = f.expectation(&x).unwrap();
        let gd = DualFisherMetric(f.clone());
        let m = AlphaConnectionExpectation {
            family: f.clone(),
            alpha: -1.0,
        };
        let e = AlphaConnectionExpectation {
            family: f.clone(),
            alpha: 1.0,
        };
        // The dual metric varies quickly near the simplex boundary; the
        // residual is pure O(h²) truncation and quarters with the step.
        let probe = conjugacy_probe(&gd, &e, &m, &eta, 1e-4).unwrap();
        assert!(probe.discretization_dominated());
        assert!(
            probe.at_half_h < probe.at_h / 3.0 && probe.at_half_h <= 1e-5,
            "{probe:?}"
        );
    }
}
