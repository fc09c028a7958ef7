use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::numdiff;
use crate::statmanifold::FiniteExpFamily;

/// Finite-difference step for potentials without closed-form derivatives.
pub const FD_STEP: f64 = 1e-3;

/// A smooth scalar potential `Φ` on a chart of dimension `dim()`.
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, t: &DVector<f64>) -> f64;

    /// `Φ_ijk` flattened `[i][j][k]`. The default uses nested central
    /// differences with step [`FD_STEP`] and one Richardson step.
    fn third_derivatives(&self, t: &DVector<f64>) -> Vec<f64> {
        let f = |x: &[f64]| self.value(&DVector::from_column_slice(x));
        numdiff::third_derivatives(&f, t.as_slice(), FD_STEP)
    }

    /// True when [`Potential::third_derivatives`] is exact.
    fn closed_form(&self) -> bool {
        false
    }
}

/// `Σ c · t₁^e₁ ⋯ tₙ^eₙ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialPotential {
    n: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

fn falling(e: u32, k: u32) -> f64 {
    (0..k).map(|i| e as f64 - i as f64).product()
}

impl PolynomialPotential {
    pub fn new(n: usize, terms: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("polynomial in zero variables".into()));
        }
        if let Some((e, _)) = terms.iter().find(|(e, _)| e.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: e.len(),
            });
        }
        Ok(Self { n, terms })
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    /// Adds `c · t^e`.
    pub fn plus(mut self, exponents: &[u32], coefficient: f64) -> Result<Self> {
        if exponents.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: exponents.len(),
            });
        }
        self.terms.push((exponents.to_vec(), coefficient));
        Ok(self)
    }

    /// One monomial per line: `n` exponents then the coefficient, blank
    /// lines and `#` comments ignored.
    ///
    /// ```text
    /// # ½ t₁² t₃
    /// 2 0 1 0.5
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut terms = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 {
                return Err(err("need exponents and a coefficient".into()));
            }
            let (exps, coef) = fields.split_at(fields.len() - 1);
            let exps: Vec<u32> = exps
                .iter()
                .map(|e| e.parse().map_err(|_| err(format!("bad exponent {e:?}"))))
                .collect::<Result<_>>()?;
            let c: f64 = coef[0]
                .parse()
                .map_err(|_| err(format!("bad coefficient {:?}", coef[0])))?;
            match n {
                None => n = Some(exps.len()),
                Some(m) if m != exps.len() => {
                    return Err(err(format!("expected {m} exponents, got {}", exps.len())))
                }
                _ => {}
            }
            terms.push((exps, c));
        }
        let n = n.ok_or_else(|| Error::InvalidInput("empty polynomial file".into()))?;
        Self::new(n, terms)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (e, c) in &self.terms {
            for x in e {
                write!(s, "{x} ").expect("string write");
            }
            writeln!(s, "{c:?}").expect("string write");
        }
        s
    }
}

impl Potential for PolynomialPotential {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, t: &DVector<f64>) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(t.iter())
                    .map(|(k, x)| x.powi(*k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    fn third_derivatives(&self, t: &DVector<f64>) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n];
        for a in 0..n {
            for b in a..n {
                for c in b..n {
                    let mut order = vec![0u32; n];
                    for i in [a, b, c] {
                        order[i] += 1;
                    }
                    let v: f64 = self
                        .terms
                        .iter()
                        .filter(|(e, _)| e.iter().zip(&order).all(|(e, k)| e >= k))
                        .map(|(e, coef)| {
                            coef * e
                                .iter()
                                .zip(&order)
                                .zip(t.iter())
                                .map(|((e, k), x)| falling(*e, *k) * x.powi((*e - *k) as i32))
                                .product::<f64>()
                        })
                        .sum();
                    for (i, j, k) in [
                        (a, b, c),
                        (a, c, b),
                        (b, a, c),
                        (b, c, a),
                        (c, a, b),
                        (c, b, a),
                    ] {
                        out[(i * n + j) * n + k] = v;
                    }
                }
            }
        }
        out
    }

    fn closed_form(&self) -> bool {
        true
    }
}

/// Potential given by a closure; derivatives by finite differences.
pub struct FnPotential<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> Potential for FnPotential<F>
where
    F: Fn(&DVector<f64>) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, t: &DVector<f64>) -> f64 {
        (self.f)(t)
    }
}

/// `Φ = ψ`, the log-partition function of an exponential family, with
/// third derivatives from exact central moments.
#[derive(Clone, Debug)]
pub struct LogPartitionPotential(pub FiniteExpFamily);

impl Potential for LogPartitionPotential {
    fn dim(&self) -> usize {
        self.0.d()
    }
    fn value(&self, t: &DVector<f64>) -> f64 {
        self.0.log_partition(t).unwrap_or(f64::NAN)
    }
    fn third_derivatives(&self, t: &DVector<f64>) -> Vec<f64> {
        self.0
            .third_derivatives(t)
            .unwrap_or_else(|_| vec![f64::NAN; self.dim().pow(3)])
    }
    fn closed_form(&self) -> bool {
        true
    }
}

/// `max |Φ_ijk − Φ_σ(ijk)|` over all index permutations.
pub fn symmetry_residual<P: Potential + ?Sized>(p: &P, t: &DVector<f64>) -> f64 {
    let n = p.dim();
    let d3 = p.third_derivatives(t);
    let at = |i: usize, j: usize, k: usize| d3[(i * n + j) * n + k];
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = at(i, j, k);
                for w in [
                    at(i, k, j),
                    at(j, i, k),
                    at(j, k, i),
                    at(k, i, j),
                    at(k, j, i),
                ] {
                    worst = worst.max((v - w).abs());
                }
            }
        }
    }
    worst
}
