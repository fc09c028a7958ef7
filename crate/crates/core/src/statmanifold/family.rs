use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible Fisher eigenvalue.
pub const DEGENERACY_TOL: f64 = 1e-12;

const RANK_TOL: f64 = 1e-10;

/// Exponential family `p_θ(ω) ∝ λ(ω) exp(⟨θ, T(ω)⟩)` on `Ω = {0, …, k−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteExpFamily {
    t: DMatrix<f64>,
    base: DVector<f64>,
}

/// On-disk form: `{"k": 3, "d": 2, "T": [[0,0],[1,0],[0,1]], "base": [1,1,1]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub k: usize,
    pub d: usize,
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
    pub base: Vec<f64>,
}

/// `ψ` and its derivatives at one point. Tensors are flattened row-major.
#[derive(Clone, Debug)]
pub struct LogPartition {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
    /// `ψ_ijk`, present for `order ≥ 3`.
    pub third: Option<Vec<f64>>,
    /// `ψ_ijkl`, present for `order ≥ 4`.
    pub fourth: Option<Vec<f64>>,
}

fn check_len(v: &DVector<f64>, d: usize) -> Result<()> {
    if v.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: v.len(),
        });
    }
    Ok(())
}

impl FiniteExpFamily {
    /// `t` is `k × d`; `base` has `k` positive entries. The columns of `t`
    /// together with the constant vector must be linearly independent.
    pub fn new(t: DMatrix<f64>, base: DVector<f64>) -> Result<Self> {
        let (k, d) = t.shape();
        if base.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: base.len(),
            });
        }
        if d == 0 || k < 2 {
            return Err(Error::InvalidInput(format!(
                "need k ≥ 2 and d ≥ 1, got k={k}, d={d}"
            )));
        }
        if t.iter().chain(base.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry".into()));
        }
        if let Some(b) = base.iter().find(|b| **b <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "base weight {b} is not positive"
            )));
        }
        let mut aug = DMatrix::from_element(k, d + 1, 1.0);
        aug.view_mut((0, 1), (k, d)).copy_from(&t);
        let sv = aug.singular_values();
        let smax = sv.max();
        let smin = if k < d + 1 { 0.0 } else { sv.min() };
        if smin <= RANK_TOL * smax.max(1.0) {
            return Err(Error::DegenerateFamily {
                min_eigenvalue: smin,
            });
        }
        Ok(Self { t, base })
    }

    pub fn bernoulli() -> Self {
        Self::new(
            DMatrix::from_column_slice(2, 1, &[0.0, 1.0]),
            DVector::from_element(2, 1.0),
        )
        .expect("valid")
    }

    /// One-hot statistics on `k` outcomes, `d = k − 1`.
    pub fn categorical(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInput(format!(
                "categorical needs k ≥ 2, got {k}"
            )));
        }
        let t = DMatrix::from_fn(k, k - 1, |i, j| if i == j + 1 { 1.0 } else { 0.0 });
        Self::new(t, DVector::from_element(k, 1.0))
    }

    /// `"bernoulli"` or `"categorical:k"`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name.split_once(':') {
            None if name == "bernoulli" => Ok(Self::bernoulli()),
            Some(("categorical", k)) => {
                let k = k
                    .parse()
                    .map_err(|_| Error::UnknownFixture(name.to_string()))?;
                Self::categorical(k)
            }
            _ => Err(Error::UnknownFixture(name.to_string())),
        }
    }

    /// Built-in name, or otherwise a path to a JSON family file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::builtin(name_or_path) {
            Err(Error::UnknownFixture(_)) if Path::new(name_or_path).exists() => {
                Self::read_json(name_or_path)
            }
            other => other,
        }
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        if spec.t.len() != spec.k {
            return Err(Error::DimensionMismatch {
                expected: spec.k,
                got: spec.t.len(),
            });
        }
        if let Some(row) = spec.t.iter().find(|r| r.len() != spec.d) {
            return Err(Error::DimensionMismatch {
                expected: spec.d,
                got: row.len(),
            });
        }
        let t = DMatrix::from_fn(spec.k, spec.d, |i, j| spec.t[i][j]);
        Self::new(t, DVector::from_vec(spec.base.clone()))
    }

    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec {
            k: self.k(),
            d: self.d(),
            t: self
                .t
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            base: self.base.iter().copied().collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("plain data")
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn k(&self) -> usize {
        self.t.nrows()
    }

    pub fn d(&self) -> usize {
        self.t.ncols()
    }

    pub fn statistics(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.base
    }

    /// Same family with statistics affinely changed so that the score at
    /// `θ = 0` is orthonormal: `g(0) = I`.
    pub fn whitened(&self) -> Result<Self> {
        let zero = DVector::zeros(self.d());
        let eta = self.expectation(&zero)?;
        let g = self.fisher_metric(&zero)?;
        let l = g.cholesky().ok_or(Error::SingularMetric)?.l();
        let linv = l.try_inverse().ok_or(Error::SingularMetric)?;
        let centered = DMatrix::from_fn(self.k(), self.d(), |i, j| self.t[(i, j)] - eta[j]);
        Self::new(centered * linv.transpose(), self.base.clone())
    }

    fn check(&self, theta: &DVector<f64>) -> Result<()> {
        check_len(theta, self.d())?;
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite parameter".into()));
        }
        Ok(())
    }

    /// `log λ(ω) + ⟨θ, T(ω)⟩`.
    fn exponents(&self, theta: &DVector<f64>) -> DVector<f64> {
        &self.t * theta + self.base.map(f64::ln)
    }

    /// `ψ(θ) = log Σ λ(ω) exp⟨θ, T(ω)⟩`, with max-subtraction.
    pub fn log_partition(&self, theta: &DVector<f64>) -> Result<f64> {
        self.check(theta)?;
        let a = self.exponents(theta);
        let m = a.max();
        Ok(m + a.map(|x| (x - m).exp()).sum().ln())
    }

    pub fn probabilities(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(theta)?;
        let a = self.exponents(theta);
        let m = a.max();
        let w = a.map(|x| (x - m).exp());
        let s = w.sum();
        Ok(w / s)
    }

    /// `η = ∇ψ(θ) = 𝔼_θ[T]`.
    pub fn expectation(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.t.transpose() * self.probabilities(theta)?)
    }

    /// `η` at a complex parameter, used for complex-step differentiation.
    pub fn expectation_complex(&self, theta: &[Complex64]) -> Result<Vec<Complex64>> {
        if theta.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                got: theta.len(),
            });
        }
        let a: Vec<Complex64> = (0..self.k())
            .map(|i| {
                let mut s = Complex64::new(self.base[i].ln(), 0.0);
                for (j, th) in theta.iter().enumerate() {
                    s += th * self.t[(i, j)];
                }
                s
            })
            .collect();
        let m = a.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<Complex64> = a.iter().map(|z| (z - m).exp()).collect();
        let s: Complex64 = w.iter().sum();
        Ok((0..self.d())
            .map(|j| {
                w.iter()
                    .enumerate()
                    .map(|(i, wi)| wi * self.t[(i, j)])
                    .sum::<Complex64>()
                    / s
            })
            .collect())
    }

    /// Score table `∂ⱼℓ_θ(ω) = Tⱼ(ω) − ηⱼ`, `k × d`.
    pub fn score(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        let eta = self.expectation(theta)?;
        Ok(DMatrix::from_fn(self.k(), self.d(), |i, j| {
            self.t[(i, j)] - eta[j]
        }))
    }

    /// `max |𝔼_θ[∂ᵢℓ]|`.
    pub fn score_centering_residual(&self, theta: &DVector<f64>) -> Result<f64> {
        let p = self.probabilities(theta)?;
        Ok((self.score(theta)?.transpose() * p).amax())
    }

    /// `ψ` with derivatives up to `order` (2 ≤ order ≤ 4), by exact central
    /// moments of `T`.
    pub fn log_partition_derivatives(
        &self,
        theta: &DVector<f64>,
        order: usize,
    ) -> Result<LogPartition> {
        if !(2..=4).contains(&order) {
            return Err(Error::InvalidInput(format!(
                "derivative order {order} not in 2..=4"
            )));
        }
        let value = self.log_partition(theta)?;
        let p = self.probabilities(theta)?;
        let s = self.score(theta)?;
        let d = self.d();
        let hessian = s.transpose() * DMatrix::from_diagonal(&p) * &s;
        let moment = |idx: &[usize]| -> f64 {
            (0..self.k())
                .map(|w| p[w] * idx.iter().map(|&i| s[(w, i)]).product::<f64>())
                .sum()
        };
        let third = (order >= 3).then(|| {
            let mut out = vec![0.0; d * d * d];
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        out[(a * d + b) * d + c] = moment(&[a, b, c]);
                    }
                }
            }
            out
        });
        let fourth = (order >= 4).then(|| {
            let mut out = vec![0.0; d * d * d * d];
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        for e in 0..d {
                            out[((a * d + b) * d + c) * d + e] = moment(&[a, b, c, e])
                                - hessian[(a, b)] * hessian[(c, e)]
                                - hessian[(a, c)] * hessian[(b, e)]
                                - hessian[(a, e)] * hessian[(b, c)];
                        }
                    }
                }
            }
            out
        });
        Ok(LogPartition {
            value,
            gradient: self.t.transpose() * &p,
            hessian,
            third,
            fourth,
        })
    }

    /// Amari–Chentsov tensor `ψ_ijk = 𝔼[∂ᵢℓ ∂ⱼℓ ∂ₖℓ]`, flattened.
    pub fn third_derivatives(&self, theta: &DVector<f64>) -> Result<Vec<f64>> {
        Ok(self
            .log_partition_derivatives(theta, 3)?
            .third
            .expect("requested"))
    }

    /// `g_ij = 𝔼[∂ᵢℓ ∂ⱼℓ]` by exact summation over `Ω`.
    pub fn fisher_covariance(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        let p = self.probabilities(theta)?;
        let s = self.score(theta)?;
        let g = s.transpose() * DMatrix::from_diagonal(&p) * &s;
        Ok((&g + g.transpose()) * 0.5)
    }

    /// `Hess ψ(θ)`, by complex-step differentiation of `∇ψ`.
    pub fn fisher_hessian(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check(theta)?;
        let d = self.d();
        let h = 1e-30;
        let mut g = DMatrix::zeros(d, d);
        for j in 0..d {
            let z: Vec<Complex64> = (0..d)
                .map(|i| Complex64::new(theta[i], if i == j { h } else { 0.0 }))
                .collect();
            let eta = self.expectation_complex(&z)?;
            for i in 0..d {
                g[(i, j)] = eta[i].im / h;
            }
        }
        Ok((&g + g.transpose()) * 0.5)
    }

    /// Fisher metric (score covariance). Errors when the smallest
    /// eigenvalue falls below [`DEGENERACY_TOL`].
    pub fn fisher_metric(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        let g = self.fisher_covariance(theta)?;
        let min_eigenvalue = SymmetricEigen::new(g.clone()).eigenvalues.min();
        if min_eigenvalue < DEGENERACY_TOL {
            return Err(Error::DegenerateFamily { min_eigenvalue });
        }
        Ok(g)
    }

    /// `max |g_cov − g_hess|`.
    pub fn fisher_agreement(&self, theta: &DVector<f64>) -> Result<f64> {
        Ok((self.fisher_covariance(theta)? - self.fisher_hessian(theta)?).amax())
    }

    /// `aⁱ(ω) = Σⱼ gⁱʲ ∂ⱼℓ(ω)`, as a `d × k` table.
    pub fn dual_basis(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        let g = self.fisher_metric(theta)?;
        let ginv = g.try_inverse().ok_or(Error::SingularMetric)?;
        Ok(ginv * self.score(theta)?.transpose())
    }

    /// `max(|𝔼[aⁱ ∂ⱼℓ] − δⁱⱼ|, |𝔼[aⁱ]|)`.
    pub fn dual_basis_residual(&self, theta: &DVector<f64>) -> Result<f64> {
        let a = self.dual_basis(theta)?;
        let p = self.probabilities(theta)?;
        let s = self.score(theta)?;
        let d = self.d();
        let delta = (&a * DMatrix::from_diagonal(&p) * &s - DMatrix::identity(d, d)).amax();
        let mean = (&a * &p).amax();
        Ok(delta.max(mean))
    }
}
