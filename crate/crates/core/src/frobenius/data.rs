use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::potential::{LogPartitionPotential, PolynomialPotential, Potential};
use crate::error::{Error, Result};
use crate::geometry::{curvature_residual, Christoffel, ConnectionField};
use crate::statmanifold::FiniteExpFamily;

const METRIC_SYMMETRY_TOL: f64 = 1e-12;

/// Built-in fixture names accepted by [`FrobeniusData::fixture`].
pub const FIXTURES: [&str; 3] = ["wdvv3", "wdvv3-perturbed", "cubic1"];

/// A flat metric, a potential and the product `∘` they determine.
#[derive(Clone)]
pub struct FrobeniusData {
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    potential: Arc<dyn Potential>,
    unit: Option<DVector<f64>>,
    /// Weights `dᵢ` of an Euler field `E = Σ dᵢ tᵢ ∂ᵢ`. Carried, never used.
    pub euler: Option<Vec<f64>>,
}

impl std::fmt::Debug for FrobeniusData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrobeniusData")
            .field("g", &self.g)
            .field("unit", &self.unit)
            .field("closed_form", &self.potential.closed_form())
            .finish()
    }
}

impl FrobeniusData {
    pub fn new(
        g: DMatrix<f64>,
        potential: Arc<dyn Potential>,
        unit: Option<DVector<f64>>,
    ) -> Result<Self> {
        let n = potential.dim();
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.nrows(),
            });
        }
        if let Some(e) = &unit {
            if e.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: e.len(),
                });
            }
        }
        if (&g - g.transpose()).amax() > METRIC_SYMMETRY_TOL * g.amax().max(1.0) {
            return Err(Error::InvalidInput("metric is not symmetric".into()));
        }
        let ginv = g.clone().try_inverse().ok_or(Error::SingularMetric)?;
        if !ginv.iter().all(|x| x.is_finite()) {
            return Err(Error::SingularMetric);
        }
        Ok(Self {
            g,
            ginv,
            potential,
            unit,
            euler: None,
        })
    }

    /// `"wdvv3"`, `"wdvv3-perturbed"` or `"cubic1"`.
    ///
    /// `wdvv3` is `Φ = ½t₁²t₃ + ½t₁t₂² + ¼t₂²t₃² + t₃⁵/60` with the
    /// antidiagonal metric and unit `∂₁`; the perturbed variant adds
    /// `t₁t₂t₃²` and has no unit. `cubic1` is `t³/6` with `g = 1`.
    pub fn fixture(name: &str) -> Result<Self> {
        match name {
            "wdvv3" | "wdvv3-perturbed" => {
                let mut p = PolynomialPotential::new(
                    3,
                    vec![
                        (vec![2, 0, 1], 0.5),
                        (vec![1, 2, 0], 0.5),
                        (vec![0, 2, 2], 0.25),
                        (vec![0, 0, 5], 1.0 / 60.0),
                    ],
                )?;
                let mut unit = Some(DVector::from_column_slice(&[1.0, 0.0, 0.0]));
                if name == "wdvv3-perturbed" {
                    p = p.plus(&[1, 1, 2], 1.0)?;
                    unit = None;
                }
                let g = DMatrix::from_fn(3, 3, |i, j| if i + j == 2 { 1.0 } else { 0.0 });
                let mut d = Self::new(g, Arc::new(p), unit)?;
                d.euler = Some(vec![1.0, 0.5, 0.0]);
                Ok(d)
            }
            "cubic1" => Self::new(
                DMatrix::from_element(1, 1, 1.0),
                Arc::new(PolynomialPotential::new(1, vec![(vec![3], 1.0 / 6.0)])?),
                Some(DVector::from_element(1, 1.0)),
            ),
            _ => Err(Error::UnknownFixture(name.to_string())),
        }
    }

    /// Random unital potential in two variables:
    /// `Φ = g₁₁t₁³/6 + g₁₂t₁²t₂/2 + g₂₂t₁t₂²/2 + f(t₂)` with `deg f ≤ 5`,
    /// so that `∂₁` is the unit.
    pub fn random_two_dim(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g11, g12, g22) = loop {
            let g11: f64 = rng.random_range(-2.0..2.0);
            let g12: f64 = rng.random_range(-2.0..2.0);
            let g22: f64 = rng.random_range(-2.0..2.0);
            if (g11 * g22 - g12 * g12).abs() > 0.1 {
                break (g11, g12, g22);
            }
        };
        let mut terms = vec![
            (vec![3, 0], g11 / 6.0),
            (vec![2, 1], g12 / 2.0),
            (vec![1, 2], g22 / 2.0),
        ];
        for e in 3..=5 {
            terms.push((vec![0, e], rng.random_range(-1.0..1.0)));
        }
        let p = PolynomialPotential::new(2, terms).expect("two variables");
        let g = DMatrix::from_row_slice(2, 2, &[g11, g12, g12, g22]);
        Self::new(
            g,
            Arc::new(p),
            Some(DVector::from_column_slice(&[1.0, 0.0])),
        )
        .expect("nonsingular by construction")
    }

    /// `Φ = ψ` with the metric frozen at `g = Hess ψ(θ₀)`.
    pub fn from_family(family: &FiniteExpFamily, theta0: &DVector<f64>) -> Result<Self> {
        let g = family.fisher_metric(theta0)?;
        let g = (&g + g.transpose()) * 0.5;
        Self::new(g, Arc::new(LogPartitionPotential(family.clone())), None)
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn metric_inverse(&self) -> &DMatrix<f64> {
        &self.ginv
    }

    pub fn potential(&self) -> &dyn Potential {
        self.potential.as_ref()
    }

    pub fn unit(&self) -> Option<&DVector<f64>> {
        self.unit.as_ref()
    }

    fn check(&self, t: &DVector<f64>) -> Result<()> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: t.len(),
            });
        }
        if t.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite point".into()));
        }
        Ok(())
    }

    pub fn third_derivatives(&self, t: &DVector<f64>) -> Result<Vec<f64>> {
        self.check(t)?;
        Ok(self.potential.third_derivatives(t))
    }

    /// `∘ᵏᵢⱼ = gᵏˡ Φ_ijl`, stored `[k][i][j]`.
    pub fn product(&self, t: &DVector<f64>) -> Result<Christoffel> {
        let d3 = self.third_derivatives(t)?;
        Ok(Christoffel::from_first_kind(&self.ginv, &d3))
    }

    /// `X ∘ Y` at `t`.
    pub fn multiply(
        &self,
        t: &DVector<f64>,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        Ok(self.product(t)?.contract(x, y))
    }

    /// `max |Φ_abe gᵉᶠ Φ_fcd − Φ_bce gᵉᶠ Φ_fad|`.
    pub fn wdvv_residual(&self, t: &DVector<f64>) -> Result<f64> {
        let n = self.dim();
        let d3 = self.third_derivatives(t)?;
        let at = |a: usize, b: usize, c: usize| d3[(a * n + b) * n + c];
        // q[a][b][f] = Φ_abe gᵉᶠ
        let mut q = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for f in 0..n {
                    q[(a * n + b) * n + f] = (0..n).map(|e| at(a, b, e) * self.ginv[(e, f)]).sum();
                }
            }
        }
        let lhs = |a: usize, b: usize, c: usize, d: usize| -> f64 {
            (0..n).map(|f| q[(a * n + b) * n + f] * at(f, c, d)).sum()
        };
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        worst = worst.max((lhs(a, b, c, d) - lhs(b, c, a, d)).abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// `max ‖(eᵢ∘eⱼ)∘eₖ − eᵢ∘(eⱼ∘eₖ)‖∞` over basis triples.
    pub fn associativity_residual(&self, t: &DVector<f64>) -> Result<f64> {
        let n = self.dim();
        let p = self.product(t)?;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let left: f64 = (0..n).map(|s| p.get(s, i, j) * p.get(m, s, k)).sum();
                        let right: f64 = (0..n).map(|s| p.get(s, j, k) * p.get(m, i, s)).sum();
                        worst = worst.max((left - right).abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// `max ‖e∘eᵢ − eᵢ‖∞` for the declared unit `e`.
    pub fn unit_residual(&self, t: &DVector<f64>) -> Result<f64> {
        let e = self.unit.as_ref().ok_or(Error::NoUnit)?;
        let n = self.dim();
        let p = self.product(t)?;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for k in 0..n {
                let v: f64 = (0..n).map(|s| e[s] * p.get(k, s, i)).sum();
                let target = if k == i { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        Ok(worst)
    }

    /// `|g(X∘Y, Z) − g(X, Y∘Z)|`.
    pub fn pairing_residual(
        &self,
        t: &DVector<f64>,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
    ) -> Result<f64> {
        let p = self.product(t)?;
        let xy = p.contract(x, y);
        let yz = p.contract(y, z);
        Ok((xy.dot(&(&self.g * z)) - x.dot(&(&self.g * yz))).abs())
    }

    pub fn pencil(&self, lambda: f64) -> PencilConnection<'_> {
        PencilConnection { data: self, lambda }
    }

    /// Curvature residual of `∇_λ` at `t` with difference step `h`.
    pub fn pencil_flatness(&self, lambda: f64, t: &DVector<f64>, h: f64) -> Result<f64> {
        self.check(t)?;
        curvature_residual(&self.pencil(lambda), t, h)
    }

    /// [`FrobeniusData::wdvv_residual`] at each point, in input order.
    pub fn wdvv_sweep(&self, points: &[DVector<f64>]) -> Result<Vec<f64>> {
        points.par_iter().map(|t| self.wdvv_residual(t)).collect()
    }

    /// [`FrobeniusData::pencil_flatness`] for each `(λ, t)`, in input order.
    pub fn pencil_sweep(&self, cases: &[(f64, DVector<f64>)], h: f64) -> Result<Vec<f64>> {
        cases
            .par_iter()
            .map(|(l, t)| self.pencil_flatness(*l, t, h))
            .collect()
    }
}

/// `∇_λ = ∇₀ + λ ∘` for a constant metric, so `Γ_λ = λ ∘`.
#[derive(Clone, Copy, Debug)]
pub struct PencilConnection<'a> {
    pub data: &'a FrobeniusData,
    pub lambda: f64,
}

impl ConnectionField for PencilConnection<'_> {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn christoffel(&self, t: &DVector<f64>) -> Result<Christoffel> {
        let n = self.dim();
        if self.lambda == 0.0 {
            return Ok(Christoffel::zeros(n));
        }
        let p = self.data.product(t)?;
        Christoffel::from_vec(n, p.data().iter().map(|v| self.lambda * v).collect())
    }
}

/// Parses a metric written as rows separated by `;`, e.g. `"0 0 1; 0 1 0; 1 0 0"`.
pub fn parse_metric(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|r| {
            r.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::InvalidInput(format!("bad metric entry {s:?}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: r.len(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::FnPotential;
    use nalgebra::dvector;

    fn points(seed: u64, n: usize, count: usize) -> Vec<DVector<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn fixture_satisfies_wdvv_and_has_unit() {
        let d = FrobeniusData::fixture("wdvv3").unwrap();
        for t in points(1, 3, 10) {
            assert!(d.wdvv_residual(&t).unwrap() <= 1e-12);
            assert!(d.associativity_residual(&t).unwrap() <= 1e-12);
            assert!(d.unit_residual(&t).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn perturbed_fixture_matches_oracle() {
        let d = FrobeniusData::fixture("wdvv3-perturbed").unwrap();
        let t = dvector![0.3, -0.7, 0.5];
        assert!((d.wdvv_residual(&t).unwrap() - 2.4).abs() < 1e-12);
        assert!(d.associativity_residual(&t).unwrap() > 1e-3);
        assert!(matches!(d.unit_residual(&t), Err(Error::NoUnit)));
        let c1 = d.pencil_flatness(1.0, &t, 1e-4).unwrap();
        let c_half = d.pencil_flatness(0.5, &t, 1e-4).unwrap();
        assert!((c1 - 2.4).abs() < 1e-6, "{c1}");
        assert!((c_half - 0.6).abs() < 1e-6, "{c_half}");
    }

    #[test]
    fn pencil_is_flat_on_fixture() {
        let d = FrobeniusData::fixture("wdvv3").unwrap();
        let t = dvector![0.3, -0.7, 0.5];
        assert_eq!(d.pencil_flatness(0.0, &t, 1e-4).unwrap(), 0.0);
        for l in [1.0, -1.0, 0.5, -0.5] {
            assert!(d.pencil_flatness(l, &t, 1e-4).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn cubic_gives_unit_product() {
        let d = FrobeniusData::fixture("cubic1").unwrap();
        let p = d.product(&dvector![0.7]).unwrap();
        assert_eq!(p.get(0, 0, 0), 1.0);
        assert!(FrobeniusData::fixture("nope").is_err());
    }

    #[test]
    fn random_two_dimensional_potentials_are_associative() {
        for seed in 0..20 {
            let d = FrobeniusData::random_two_dim(seed);
            for t in points(seed + 100, 2, 3) {
                assert!(d.wdvv_residual(&t).unwrap() <= 1e-9);
                assert!(d.associativity_residual(&t).unwrap() <= 1e-9);
                assert!(d.unit_residual(&t).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn pairing_is_invariant() {
        let d = FrobeniusData::fixture("wdvv3-perturbed").unwrap();
        let v = points(7, 3, 4);
        assert!(d.pairing_residual(&v[0], &v[1], &v[2], &v[3]).unwrap() < 1e-12);
    }

    #[test]
    fn family_product_is_amari_chentsov_contraction() {
        let f = FiniteExpFamily::categorical(3).unwrap();
        let th = dvector![0.2, -0.4];
        let d = FrobeniusData::from_family(&f, &th).unwrap();
        let p = d.product(&th).unwrap();
        let g = f.fisher_metric(&th).unwrap();
        let ginv = g.try_inverse().unwrap();
        let psi3 = f.third_derivatives(&th).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let v: f64 = (0..2)
                        .map(|l| ginv[(k, l)] * psi3[(i * 2 + j) * 2 + l])
                        .sum();
                    assert!((p.get(k, i, j) - v).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn finite_difference_potential_agrees() {
        let exact = FrobeniusData::fixture("wdvv3").unwrap();
        let fd = FrobeniusData::new(
            exact.metric().clone(),
            Arc::new(FnPotential {
                dim: 3,
                f: move |t: &DVector<f64>| {
                    0.5 * t[0] * t[0] * t[2]
                        + 0.5 * t[0] * t[1] * t[1]
                        + 0.25 * t[1] * t[1] * t[2] * t[2]
                        + t[2].powi(5) / 60.0
                },
            }),
            None,
        )
        .unwrap();
        let t = dvector![0.1, 0.2, -0.3];
        assert!(fd.wdvv_residual(&t).unwrap() < 1e-6);
        assert!(!fd.potential().closed_form());
    }

    #[test]
    fn sweeps_preserve_order() {
        let d = FrobeniusData::fixture("wdvv3-perturbed").unwrap();
        let pts = points(3, 3, 8);
        let sweep = d.wdvv_sweep(&pts).unwrap();
        for (t, r) in pts.iter().zip(&sweep) {
            assert_eq!(*r, d.wdvv_residual(t).unwrap());
        }
    }

    #[test]
    fn metric_parsing() {
        let g = parse_metric("0 0 1; 0 1 0; 1 0 0").unwrap();
        assert_eq!(g[(0, 2)], 1.0);
        assert!(parse_metric("1 2; 3").is_err());
        let p = Arc::new(PolynomialPotential::new(2, vec![]).unwrap());
        assert!(matches!(
            FrobeniusData::new(DMatrix::zeros(2, 2), p, None),
            Err(Error::SingularMetric)
        ));
    }
}
