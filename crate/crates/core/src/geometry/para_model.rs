use nalgebra::{DMatrix, DVector};

use super::connections::{alpha_connection, alpha_connection_expectation, LeviCivita, DEFAULT_H};
use super::fields::{check_point, Christoffel, ConnectionField, MetricField};
use super::geodesic::AffineSubspace;
use crate::algebra::{ParaStructureSpace, StructureConstants};
use crate::error::{Error, Result};
use crate::statmanifold::FiniteExpFamily;

/// Christoffel symbols with values in a rank-`r` algebra, `Γⁱˢⱼₖ` stored
/// `[i][s][j][k]` over a chart of algebra dimension `m`.
#[derive(Clone, Debug)]
pub struct AlgebraChristoffel {
    pub m: usize,
    pub r: usize,
    pub data: Vec<f64>,
}

impl AlgebraChristoffel {
    pub fn zeros(m: usize, r: usize) -> Self {
        Self {
            m,
            r,
            data: vec![0.0; m * r * m * m],
        }
    }

    pub fn get(&self, i: usize, s: usize, j: usize, k: usize) -> f64 {
        self.data[((i * self.r + s) * self.m + j) * self.m + k]
    }

    pub fn set(&mut self, i: usize, s: usize, j: usize, k: usize, v: f64) {
        self.data[((i * self.r + s) * self.m + j) * self.m + k] = v;
    }
}

/// Real components of an algebra-valued connection:
/// `Γ^(i,α)_(j,β)(k,γ) = Γⁱˢⱼₖ C^δ_sβ C^α_δγ`, with the real coordinate
/// `(j, β)` at index `j·r + β`.
pub fn assemble_algebra_connection(
    gamma: &AlgebraChristoffel,
    sc: &StructureConstants,
) -> Result<Christoffel> {
    let (m, r) = (gamma.m, gamma.r);
    if sc.rank() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: sc.rank(),
        });
    }
    // e_s e_β e_γ, component α.
    let mut triple = vec![0.0; r * r * r * r];
    for s in 0..r {
        for b in 0..r {
            for g in 0..r {
                for a in 0..r {
                    triple[((s * r + b) * r + g) * r + a] =
                        (0..r).map(|dl| sc.get(dl, s, b) * sc.get(a, dl, g)).sum();
                }
            }
        }
    }
    let n = m * r;
    let mut out = Christoffel::zeros(n);
    for i in 0..m {
        for a in 0..r {
            for j in 0..m {
                for b in 0..r {
                    for k in 0..m {
                        for g in 0..r {
                            let v: f64 = (0..r)
                                .map(|s| {
                                    gamma.get(i, s, j, k) * triple[((s * r + b) * r + g) * r + a]
                                })
                                .sum();
                            out.set(i * r + a, j * r + b, k * r + g, v);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The two leaf families of [`ParaModelManifold`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafFamily {
    /// `{x₋ = const}`: copies of the natural chart, e-flat.
    Natural,
    /// `{x₊ = const}`: copies of the expectation chart, m-flat.
    Expectation,
}

impl LeafFamily {
    pub fn other(self) -> Self {
        match self {
            LeafFamily::Natural => LeafFamily::Expectation,
            LeafFamily::Expectation => LeafFamily::Natural,
        }
    }
}

/// Doubled model `N = Θ × H` of an exponential family: points `(x₊, x₋)`
/// with `x₊` natural parameters and `x₋` expectation parameters of two
/// independent members, metric `Hess ψ(x₊) ⊕ Hess φ(x₋)` and
/// `K = I ⊕ (−I)`.
#[derive(Clone, Debug)]
pub struct ParaModelManifold {
    family: FiniteExpFamily,
}

impl ParaModelManifold {
    pub fn new(family: FiniteExpFamily) -> Self {
        Self { family }
    }

    pub fn family(&self) -> &FiniteExpFamily {
        &self.family
    }

    /// Dimension `d` of each factor.
    pub fn d(&self) -> usize {
        self.family.d()
    }

    pub fn split(&self, x: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let d = self.d();
        check_point(2 * d, x)?;
        Ok((x.rows(0, d).into_owned(), x.rows(d, d).into_owned()))
    }

    pub fn join(&self, plus: &DVector<f64>, minus: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            plus.len() + minus.len(),
            plus.iter().chain(minus.iter()).copied(),
        )
    }

    pub fn k(&self) -> DMatrix<f64> {
        let d = self.d();
        DMatrix::from_fn(2 * d, 2 * d, |i, j| match (i == j, i < d) {
            (true, true) => 1.0,
            (true, false) => -1.0,
            _ => 0.0,
        })
    }

    pub fn structure(&self) -> Result<ParaStructureSpace> {
        ParaStructureSpace::new(self.k())
    }

    /// Levi-Civita connection of the block metric, by finite differences.
    pub fn levi_civita(&self) -> LeviCivita<ParaModelManifold> {
        LeviCivita {
            metric: self.clone(),
            h: DEFAULT_H,
        }
    }

    /// Block connection with the `α₊`-connection of the natural chart on the
    /// first factor and the `α₋`-connection of the expectation chart on the
    /// second.
    pub fn connection(&self, alpha_plus: f64, alpha_minus: f64) -> ParaModelConnection {
        ParaModelConnection {
            model: self.clone(),
            alpha_plus,
            alpha_minus,
        }
    }

    /// e-connection on the first factor, m-connection on the second: `Γ ≡ 0`.
    pub fn dual_flat(&self) -> ParaModelConnection {
        self.connection(1.0, -1.0)
    }

    /// The conjugate of [`Self::dual_flat`] with respect to the block metric.
    pub fn dual_flat_conjugate(&self) -> ParaModelConnection {
        self.connection(-1.0, 1.0)
    }

    /// `σ(x₊, x₋) = (θ(x₋), η(x₊))`.
    pub fn peirce_mirror(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let (p, m) = self.split(x)?;
        let theta = self.family.legendre_inverse(&m)?;
        let eta = self.family.expectation(&p)?;
        Ok(self.join(&theta, &eta))
    }

    /// `‖σ(σ(x)) − x‖∞`.
    pub fn mirror_involution_residual(&self, x: &DVector<f64>) -> Result<f64> {
        Ok((self.peirce_mirror(&self.peirce_mirror(x)?)? - x).amax())
    }

    /// `‖Dσᵀ g(σx) Dσ − g(x)‖∞` with `Dσ` from Richardson-extrapolated
    /// central differences of the mirror.
    pub fn mirror_isometry_residual(&self, x: &DVector<f64>, h: f64) -> Result<f64> {
        let n = 2 * self.d();
        check_point(n, x)?;
        let jac = |h: f64| -> Result<DMatrix<f64>> {
            let mut j = DMatrix::zeros(n, n);
            for c in 0..n {
                let mut xp = x.clone();
                xp[c] += h;
                let mut xm = x.clone();
                xm[c] -= h;
                let col = (self.peirce_mirror(&xp)? - self.peirce_mirror(&xm)?) / (2.0 * h);
                j.set_column(c, &col);
            }
            Ok(j)
        };
        let dsigma = (jac(h / 2.0)? * 4.0 - jac(h)?) / 3.0;
        let pulled = dsigma.transpose() * self.metric(&self.peirce_mirror(x)?)? * &dsigma;
        Ok((pulled - self.metric(x)?).amax())
    }

    /// The leaf of `family` through `x`.
    pub fn leaf(&self, x: &DVector<f64>, family: LeafFamily) -> Result<AffineSubspace> {
        let d = self.d();
        check_point(2 * d, x)?;
        let axes: Vec<usize> = match family {
            LeafFamily::Natural => (0..d).collect(),
            LeafFamily::Expectation => (d..2 * d).collect(),
        };
        AffineSubspace::coordinate(x.clone(), &axes)
    }

    /// The coordinates held fixed along the leaf of `family` through `x`.
    pub fn leaf_label(&self, x: &DVector<f64>, family: LeafFamily) -> Result<DVector<f64>> {
        let (p, m) = self.split(x)?;
        Ok(match family {
            LeafFamily::Natural => m,
            LeafFamily::Expectation => p,
        })
    }

    /// Exact membership of `x` in the leaf of `family` labelled `label`.
    pub fn on_leaf(
        &self,
        x: &DVector<f64>,
        family: LeafFamily,
        label: &DVector<f64>,
    ) -> Result<bool> {
        Ok(self.leaf_label(x, family)? == *label)
    }

    /// `max(‖P₊B_nat − B_nat‖, ‖P₋B_exp − B_exp‖)` for the eigenprojectors
    /// `P± = (I ± K)/2` and coordinate bases `B` of the two leaf families.
    pub fn k_tangency_residual(&self, x: &DVector<f64>) -> Result<f64> {
        let (pp, pm) = self.structure()?.projectors();
        let bn = self.leaf(x, LeafFamily::Natural)?.basis;
        let be = self.leaf(x, LeafFamily::Expectation)?.basis;
        Ok((&pp * &bn - &bn).amax().max((&pm * &be - &be).amax()))
    }

    /// Block connection assembled from the 𝔄-valued symbols
    /// `Γ₊ e₊ + Γ₋ e₋` with the canonical-basis structure constants,
    /// reordered to the `(x₊, x₋)` chart.
    pub fn assembled_connection(
        &self,
        x: &DVector<f64>,
        alpha_plus: f64,
        alpha_minus: f64,
    ) -> Result<Christoffel> {
        let d = self.d();
        let (p, m) = self.split(x)?;
        let gp = alpha_connection(&self.family, alpha_plus, &p)?;
        let gm = alpha_connection_expectation(&self.family, alpha_minus, &m)?;
        let mut ga = AlgebraChristoffel::zeros(d, 2);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    ga.set(i, 0, j, k, gp.get(i, j, k));
                    ga.set(i, 1, j, k, gm.get(i, j, k));
                }
            }
        }
        let interleaved =
            assemble_algebra_connection(&ga, &StructureConstants::paracomplex_canonical())?;
        let to_chart = |idx: usize| (idx % 2) * d + idx / 2;
        let mut out = Christoffel::zeros(2 * d);
        for a in 0..2 * d {
            for b in 0..2 * d {
                for c in 0..2 * d {
                    out.set(
                        to_chart(a),
                        to_chart(b),
                        to_chart(c),
                        interleaved.get(a, b, c),
                    );
                }
            }
        }
        Ok(out)
    }
}

impl MetricField for ParaModelManifold {
    fn dim(&self) -> usize {
        2 * self.d()
    }

    fn metric(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let d = self.d();
        let (p, m) = self.split(x)?;
        let mut g = DMatrix::zeros(2 * d, 2 * d);
        g.view_mut((0, 0), (d, d))
            .copy_from(&self.family.fisher_metric(&p)?);
        g.view_mut((d, d), (d, d))
            .copy_from(&self.family.dual_metric(&m)?);
        Ok(g)
    }

    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.metric(x).is_ok()
    }
}

/// See [`ParaModelManifold::connection`].
#[derive(Clone, Debug)]
pub struct ParaModelConnection {
    pub model: ParaModelManifold,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
}

impl ConnectionField for ParaModelConnection {
    fn dim(&self) -> usize {
        2 * self.model.d()
    }

    fn christoffel(&self, x: &DVector<f64>) -> Result<Christoffel> {
        let d = self.model.d();
        let (p, m) = self.model.split(x)?;
        let f = &self.model.family;
        let gp = alpha_connection(f, self.alpha_plus, &p)?;
        let gm = alpha_connection_expectation(f, self.alpha_minus, &m)?;
        let mut out = Christoffel::zeros(2 * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    out.set(i, j, k, gp.get(i, j, k));
                    out.set(d + i, d + j, d + k, gm.get(i, j, k));
                }
            }
        }
        Ok(out)
    }

    fn in_domain(&self, x: &DVector<f64>) -> bool {
        self.model.in_domain(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{conjugacy_residual, curvature_residual, totally_geodesic_check};
    use nalgebra::dvector;

    fn bern() -> ParaModelManifold {
        ParaModelManifold::new(FiniteExpFamily::bernoulli())
    }

    #[test]
    fn bernoulli_fixed_point_and_leaf_swap() {
        let n = bern();
        let x = dvector![0.0, 0.5];
        assert_eq!(n.peirce_mirror(&x).unwrap(), x);
        let half = dvector![0.5];
        for t in [-2.0, -0.3, 0.0, 0.8, 3.0] {
            let y = dvector![t, 0.5];
            assert!(n.on_leaf(&y, LeafFamily::Natural, &half).unwrap());
            let sy = n.peirce_mirror(&y).unwrap();
            assert!(n
                .on_leaf(&sy, LeafFamily::Expectation, &dvector![0.0])
                .unwrap());
        }
    }

    #[test]
    fn mirror_is_involutive_isometry() {
        let n = ParaModelManifold::new(FiniteExpFamily::categorical(3).unwrap());
        let x = dvector![0.4, -0.7, 0.2, 0.5];
        assert!(n.mirror_involution_residual(&x).unwrap() < 1e-12);
        assert!(n.mirror_isometry_residual(&x, 1e-4).unwrap() < 1e-6);
    }

    #[test]
    fn block_connections() {
        let n = ParaModelManifold::new(FiniteExpFamily::categorical(3).unwrap());
        let x = dvector![0.4, -0.7, 0.2, 0.5];
        assert_eq!(n.dual_flat().christoffel(&x).unwrap().max_abs(), 0.0);
        assert!(
            conjugacy_residual(&n, &n.dual_flat(), &n.dual_flat_conjugate(), &x, 1e-4).unwrap()
                < 1e-5
        );
        assert_eq!(curvature_residual(&n.dual_flat(), &x, 1e-4).unwrap(), 0.0);
        let lc_fd = n.levi_civita().christoffel(&x).unwrap();
        let lc = n.connection(0.0, 0.0).christoffel(&x).unwrap();
        assert!(lc.max_abs_diff(&lc_fd) < 2e-5);
        for (ap, am) in [(0.0, 0.0), (1.0, -1.0), (0.5, 0.25)] {
            let a = n.assembled_connection(&x, ap, am).unwrap();
            let b = n.connection(ap, am).christoffel(&x).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-15);
        }
    }

    #[test]
    fn leaves_are_totally_geodesic() {
        let n = bern();
        let lc = n.levi_civita();
        let x = dvector![0.2, 0.4];
        for fam in [LeafFamily::Natural, LeafFamily::Expectation] {
            let leaf = n.leaf(&x, fam).unwrap();
            let starts = vec![
                (dvector![0.0], dvector![0.3]),
                (dvector![0.05], dvector![-0.2]),
            ];
            let r = totally_geodesic_check(&lc, &leaf, &starts, 1.0, 1e-2, 1e-6).unwrap();
            assert!(r.pass, "{fam:?}: {r:?}");
            assert_eq!(r.truncated, 0);
        }
        assert_eq!(n.k_tangency_residual(&x).unwrap(), 0.0);
    }

    #[test]
    fn assembly_with_general_constants() {
        // Rank-1 algebra ℝ reproduces the input.
        let mut g = AlgebraChristoffel::zeros(2, 1);
        g.set(0, 0, 1, 1, 3.0);
        g.set(1, 0, 0, 1, -2.0);
        let sc = StructureConstants::new(1, vec![1.0]).unwrap();
        let out = assemble_algebra_connection(&g, &sc).unwrap();
        assert_eq!(out.get(0, 1, 1), 3.0);
        assert_eq!(out.get(1, 0, 1), -2.0);
        assert!(assemble_algebra_connection(&g, &StructureConstants::paracomplex()).is_err());
    }
}
