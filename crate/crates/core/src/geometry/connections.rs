use nalgebra::{DMatrix, DVector};

use super::fields::{check_point, partials, Christoffel, ConnectionField, MetricField};
use crate::error::{Error, Result};
use crate::statmanifold::FiniteExpFamily;

/// Default finite-difference step for connection and curvature checks.
pub const DEFAULT_H: f64 = 1e-4;

fn inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    g.clone().try_inverse().ok_or(Error::SingularMetric)
}

/// `∂_l g_ij` by central differences, stored `[l][i][j]`.
pub fn metric_derivatives<M: MetricField + ?Sized>(
    g: &M,
    x: &DVector<f64>,
    h: f64,
) -> Result<Vec<f64>> {
    let d = g.dim();
    check_point(d, x)?;
    let parts = partials(|y| Ok(g.metric(y)?.as_slice().to_vec()), x, h)?;
    let mut out = vec![0.0; d * d * d];
    for (l, p) in parts.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                // Column-major storage; average the two triangles.
                out[(l * d + i) * d + j] = 0.5 * (p[j * d + i] + p[i * d + j]);
            }
        }
    }
    Ok(out)
}

/// `Γᵏᵢⱼ = ½ gᵏˡ (∂ᵢg_jl + ∂ⱼg_il − ∂_l g_ij)`, derivatives by central
/// differences with step `h`.
pub fn levi_civita<M: MetricField + ?Sized>(
    g: &M,
    x: &DVector<f64>,
    h: f64,
) -> Result<Christoffel> {
    let d = g.dim();
    let dg = metric_derivatives(g, x, h)?;
    let ginv = inverse(&g.metric(x)?)?;
    let at = |l: usize, i: usize, j: usize| dg[(l * d + i) * d + j];
    let mut first = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                first[(i * d + j) * d + l] = 0.5 * (at(i, j, l) + at(j, i, l) - at(l, i, j));
            }
        }
    }
    Ok(Christoffel::from_first_kind(&ginv, &first))
}

/// `max |∇_k g_ij|` for the connection `conn`.
pub fn metric_compatibility_residual<M, C>(g: &M, conn: &C, x: &DVector<f64>, h: f64) -> Result<f64>
where
    M: MetricField + ?Sized,
    C: ConnectionField + ?Sized,
{
    let d = g.dim();
    let dg = metric_derivatives(g, x, h)?;
    let gx = g.metric(x)?;
    let gam = conn.christoffel(x)?;
    let mut worst: f64 = 0.0;
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut r = dg[(k * d + i) * d + j];
                for m in 0..d {
                    r -= gam.get(m, k, i) * gx[(m, j)] + gam.get(m, k, j) * gx[(i, m)];
                }
                worst = worst.max(r.abs());
            }
        }
    }
    Ok(worst)
}

/// The Levi-Civita connection of a metric field, by finite differences.
pub struct LeviCivita<M> {
    pub metric: M,
    pub h: f64,
}

impl<M: MetricField> LeviCivita<M> {
    pub fn new(metric: M) -> Self {
        Self {
            metric,
            h: DEFAULT_H,
        }
    }
}

impl<M: MetricField> ConnectionField for LeviCivita<M> {
    fn dim(&self) -> usize {
        self.metric.dim()
    }
    fn christoffel(&self, x: &DVector<f64>) -> Result<Christoffel> {
        levi_civita(&self.metric, x, self.h)
    }
    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.metric.in_domain(x)
    }
}

/// Fisher metric in the natural chart `θ`.
#[derive(Clone, Debug)]
pub struct FisherMetric(pub FiniteExpFamily);

impl MetricField for FisherMetric {
    fn dim(&self) -> usize {
        self.0.d()
    }
    fn metric(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.0.fisher_metric(x)
    }
    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.0.fisher_metric(x).is_ok()
    }
}

/// Fisher metric in the expectation chart `η`, `Hess φ(η)`.
#[derive(Clone, Debug)]
pub struct DualFisherMetric(pub FiniteExpFamily);

impl MetricField for DualFisherMetric {
    fn dim(&self) -> usize {
        self.0.d()
    }
    fn metric(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.0.dual_metric(x)
    }
    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.0.legendre_inverse(x).is_ok()
    }
}

fn natural_alpha(f: &FiniteExpFamily, alpha: f64, theta: &DVector<f64>) -> Result<Christoffel> {
    let ginv = inverse(&f.fisher_metric(theta)?)?;
    let c = 0.5 * (1.0 - alpha);
    let first: Vec<f64> = f.third_derivatives(theta)?.iter().map(|v| c * v).collect();
    Ok(Christoffel::from_first_kind(&ginv, &first))
}

/// α-connection in the natural chart:
/// `Γ^(α)ᵏᵢⱼ = ½(1 − α) gᵏˡ ψ_ijl`. `α = 1` is flat with `Γ ≡ 0`; `α = 0`
/// is the Levi-Civita connection of the Fisher metric.
pub fn alpha_connection(
    f: &FiniteExpFamily,
    alpha: f64,
    theta: &DVector<f64>,
) -> Result<Christoffel> {
    check_point(f.d(), theta)?;
    natural_alpha(f, alpha, theta)
}

/// `φ_ijk(η) = −G⁻¹_ia G⁻¹_jb G⁻¹_kc ψ_abc` at `θ = θ(η)`, stored `[i][j][k]`.
pub fn dual_third_derivatives(f: &FiniteExpFamily, eta: &DVector<f64>) -> Result<Vec<f64>> {
    let d = f.d();
    let theta = f.legendre_inverse(eta)?;
    let ginv = inverse(&f.fisher_metric(&theta)?)?;
    let psi3 = f.third_derivatives(&theta)?;
    // Contract one index at a time.
    let contract = |t: &[f64], axis: usize| -> Vec<f64> {
        let mut out = vec![0.0; d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let idx = [i, j, k];
                    let mut s = 0.0;
                    for a in 0..d {
                        let mut src = idx;
                        src[axis] = a;
                        s += ginv[(idx[axis], a)] * t[(src[0] * d + src[1]) * d + src[2]];
                    }
                    out[(i * d + j) * d + k] = s;
                }
            }
        }
        out
    };
    let t = contract(&contract(&contract(&psi3, 0), 1), 2);
    Ok(t.into_iter().map(|v| -v).collect())
}

/// α-connection in the expectation chart, first-kind symbols
/// `Γ_{ij,k} = ½(1 + α) φ_ijk` raised with `Hess φ`. `α = −1` is flat with
/// `Γ ≡ 0`.
pub fn alpha_connection_expectation(
    f: &FiniteExpFamily,
    alpha: f64,
    eta: &DVector<f64>,
) -> Result<Christoffel> {
    check_point(f.d(), eta)?;
    let theta = f.legendre_inverse(eta)?;
    let g = f.fisher_metric(&theta)?;
    let c = 0.5 * (1.0 + alpha);
    let first: Vec<f64> = dual_third_derivatives(f, eta)?
        .iter()
        .map(|v| c * v)
        .collect();
    Ok(Christoffel::from_first_kind(&g, &first))
}

/// The same connection obtained from the natural-chart symbols by the
/// change of coordinates `θ ↦ η`:
/// `Γ'ᶜᵢⱼ = G_ca (Γᵃ_bd G⁻¹_bi G⁻¹_dj + ∂²θ_a/∂η_i∂η_j)`.
pub fn alpha_connection_expectation_by_transform(
    f: &FiniteExpFamily,
    alpha: f64,
    eta: &DVector<f64>,
) -> Result<Christoffel> {
    let d = f.d();
    check_point(d, eta)?;
    let theta = f.legendre_inverse(eta)?;
    let g = f.fisher_metric(&theta)?;
    let ginv = inverse(&g)?;
    let psi3 = f.third_derivatives(&theta)?;
    let gam = natural_alpha(f, alpha, &theta)?;
    // ∂²θ_a/∂η_i∂η_j = −G⁻¹_ab ψ_bce G⁻¹_ci G⁻¹_ej.
    let mut hess_theta = vec![0.0; d * d * d];
    for a in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for b in 0..d {
                    for c in 0..d {
                        for e in 0..d {
                            s += ginv[(a, b)]
                                * psi3[(b * d + c) * d + e]
                                * ginv[(c, i)]
                                * ginv[(e, j)];
                        }
                    }
                }
                hess_theta[(a * d + i) * d + j] = -s;
            }
        }
    }
    let mut out = Christoffel::zeros(d);
    for i in 0..d {
        for j in i..d {
            let inner: Vec<f64> = (0..d)
                .map(|a| {
                    let mut s = hess_theta[(a * d + i) * d + j];
                    for b in 0..d {
                        for e in 0..d {
                            s += gam.get(a, b, e) * ginv[(b, i)] * ginv[(e, j)];
                        }
                    }
                    s
                })
                .collect();
            for c in 0..d {
                let v: f64 = (0..d).map(|a| g[(c, a)] * inner[a]).sum();
                out.set(c, i, j, v);
                out.set(c, j, i, v);
            }
        }
    }
    Ok(out)
}

/// α-connection of an exponential family in the natural chart.
#[derive(Clone, Debug)]
pub struct AlphaConnection {
    pub family: FiniteExpFamily,
    pub alpha: f64,
}

impl ConnectionField for AlphaConnection {
    fn dim(&self) -> usize {
        self.family.d()
    }
    fn christoffel(&self, x: &DVector<f64>) -> Result<Christoffel> {
        alpha_connection(&self.family, self.alpha, x)
    }
    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.family.fisher_metric(x).is_ok()
    }
}

/// α-connection of an exponential family in the expectation chart.
#[derive(Clone, Debug)]
pub struct AlphaConnectionExpectation {
    pub family: FiniteExpFamily,
    pub alpha: f64,
}

impl ConnectionField for AlphaConnectionExpectation {
    fn dim(&self) -> usize {
        self.family.d()
    }
    fn christoffel(&self, x: &DVector<f64>) -> Result<Christoffel> {
        alpha_connection_expectation(&self.family, self.alpha, x)
    }
    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.family.legendre_inverse(x).is_ok()
    }
}
