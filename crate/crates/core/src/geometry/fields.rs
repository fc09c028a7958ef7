use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Christoffel symbols of the second kind `Γᵏᵢⱼ`, stored `[k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// `Γᵏᵢⱼ = gᵏˡ Γ_{ij,l}` from symbols of the first kind stored
    /// `[i][j][l]`.
    pub fn from_first_kind(ginv: &DMatrix<f64>, first: &[f64]) -> Self {
        let d = ginv.nrows();
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in i..d {
                for k in 0..d {
                    let v: f64 = (0..d)
                        .map(|l| ginv[(k, l)] * first[(i * d + j) * d + l])
                        .sum();
                    out.set(k, i, j, v);
                    out.set(k, j, i, v);
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.dim + i) * self.dim + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// `Γ_{ij,l} = g_lk Γᵏᵢⱼ`, stored `[i][j][l]`.
    pub fn first_kind(&self, g: &DMatrix<f64>) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d * d];
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    out[(i * d + j) * d + l] = (0..d).map(|k| g[(l, k)] * self.get(k, i, j)).sum();
                }
            }
        }
        out
    }

    /// `max |Γᵏᵢⱼ − Γᵏⱼᵢ|`.
    pub fn torsion(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `aᵏ = Γᵏᵢⱼ uⁱ vʲ`.
    pub fn contract(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |k, _| {
            let mut s = 0.0;
            for i in 0..d {
                for j in 0..d {
                    s += self.get(k, i, j) * u[i] * v[j];
                }
            }
            s
        })
    }
}

/// A Riemannian metric on an open subset of `ℝᵈ`.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;
    fn metric(&self, x: &DVector<f64>) -> Result<DMatrix<f64>>;
    fn in_domain(&self, _x: &DVector<f64>) -> bool {
        true
    }
}

/// An affine connection on an open subset of `ℝᵈ`.
pub trait ConnectionField: Sync {
    fn dim(&self) -> usize;
    fn christoffel(&self, x: &DVector<f64>) -> Result<Christoffel>;
    fn in_domain(&self, _x: &DVector<f64>) -> bool {
        true
    }
}

impl<T: MetricField + ?Sized> MetricField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn metric(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        (**self).metric(x)
    }
    fn in_domain(&self, x: &DVector<f64>) -> bool {
        (**self).in_domain(x)
    }
}

impl<T: ConnectionField + ?Sized> ConnectionField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn christoffel(&self, x: &DVector<f64>) -> Result<Christoffel> {
        (**self).christoffel(x)
    }
    fn in_domain(&self, x: &DVector<f64>) -> bool {
        (**self).in_domain(x)
    }
}

#[derive(Clone, Debug)]
pub struct ConstantMetric(pub DMatrix<f64>);

impl MetricField for ConstantMetric {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn metric(&self, _x: &DVector<f64>) -> Result<DMatrix<f64>> {
        Ok(self.0.clone())
    }
}

/// Metric given by a closure.
pub struct MetricFn<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> MetricField for MetricFn<F>
where
    F: Fn(&DVector<f64>) -> Result<DMatrix<f64>> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn metric(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        (self.f)(x)
    }
}

/// `Γ ≡ 0`.
#[derive(Clone, Copy, Debug)]
pub struct FlatConnection(pub usize);

impl ConnectionField for FlatConnection {
    fn dim(&self) -> usize {
        self.0
    }
    fn christoffel(&self, _x: &DVector<f64>) -> Result<Christoffel> {
        Ok(Christoffel::zeros(self.0))
    }
}

/// Connection given by a closure.
pub struct ConnectionFn<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> ConnectionField for ConnectionFn<F>
where
    F: Fn(&DVector<f64>) -> Result<Christoffel> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn christoffel(&self, x: &DVector<f64>) -> Result<Christoffel> {
        (self.f)(x)
    }
}

/// Central-difference partials of a vector-valued map, one entry per axis.
pub(crate) fn partials<F>(f: F, x: &DVector<f64>, h: f64) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&DVector<f64>) -> Result<Vec<f64>>,
{
    (0..x.len())
        .map(|a| {
            let mut xp = x.clone();
            xp[a] += h;
            let mut xm = x.clone();
            xm[a] -= h;
            let (fp, fm) = (f(&xp)?, f(&xm)?);
            Ok(fp
                .iter()
                .zip(&fm)
                .map(|(p, m)| (p - m) / (2.0 * h))
                .collect())
        })
        .collect()
}

pub(crate) fn check_point(dim: usize, x: &DVector<f64>) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    Ok(())
}
