//! Finite-dimensional commutative algebras given by structure constants.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::table::{parse_table, write_table, RawTable};

const SYMMETRY_TOL: f64 = 1e-12;
const IDEMPOTENT_TOL: f64 = 1e-12;

/// Structure constants `Cᵏᵢⱼ` with `eᵢ eⱼ = Σₖ Cᵏᵢⱼ eₖ`, stored as `[k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    rank: usize,
    c: Vec<f64>,
}

impl StructureConstants {
    pub fn new(rank: usize, c: Vec<f64>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidInput("rank must be positive".into()));
        }
        if c.len() != rank * rank * rank {
            return Err(Error::DimensionMismatch {
                expected: rank * rank * rank,
                got: c.len(),
            });
        }
        let sc = Self { rank, c };
        let asym = sc.commutativity_residual();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidInput(format!(
                "structure constants are not symmetric in the lower indices (residual {asym:e})"
            )));
        }
        Ok(sc)
    }

    fn from_fn(rank: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut c = vec![0.0; rank * rank * rank];
        for k in 0..rank {
            for i in 0..rank {
                for j in 0..rank {
                    c[RawTable::idx(rank, k, i, j)] = f(k, i, j);
                }
            }
        }
        Self { rank, c }
    }

    /// Basis `(1, ε)` with `ε² = s`.
    fn rank_two(square_of_generator: f64) -> Self {
        Self::from_fn(2, |k, i, j| match (k, i, j) {
            (0, 0, 0) => 1.0,
            (1, 0, 1) | (1, 1, 0) => 1.0,
            (0, 1, 1) => square_of_generator,
            _ => 0.0,
        })
    }

    /// Paracomplex numbers: `C¹₁₁ = C²₁₂ = C¹₂₂ = 1`, all others zero.
    pub fn paracomplex() -> Self {
        Self::rank_two(1.0)
    }

    /// Paracomplex numbers in the canonical basis `(e₊, e₋)`.
    pub fn paracomplex_canonical() -> Self {
        let p = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, -0.5]);
        Self::paracomplex()
            .change_basis(&p)
            .expect("canonical basis change is invertible")
    }

    /// Dual numbers, `ε² = 0`.
    pub fn dual_numbers() -> Self {
        Self::rank_two(0.0)
    }

    /// Complex numbers, `ε² = −1`.
    pub fn complex() -> Self {
        Self::rank_two(-1.0)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `Cᵏᵢⱼ` (0-based).
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.c[RawTable::idx(self.rank, k, i, j)]
    }

    pub fn raw(&self) -> &[f64] {
        &self.c
    }

    pub fn commutativity_residual(&self) -> f64 {
        let r = self.rank;
        let mut m: f64 = 0.0;
        for k in 0..r {
            for i in 0..r {
                for j in 0..i {
                    m = m.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        m
    }

    pub fn product(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let r = self.rank;
        (0..r)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..r {
                    for j in 0..r {
                        s += self.get(k, i, j) * a[i] * b[j];
                    }
                }
                s
            })
            .collect()
    }

    /// Matrix of `x ↦ a x`.
    pub fn left_mult(&self, a: &[f64]) -> DMatrix<f64> {
        let r = self.rank;
        DMatrix::from_fn(r, r, |k, j| (0..r).map(|i| a[i] * self.get(k, i, j)).sum())
    }

    /// Re-expresses the constants in the basis whose columns are `p`
    /// (written in the current basis).
    pub fn change_basis(&self, p: &DMatrix<f64>) -> Result<Self> {
        let r = self.rank;
        if p.shape() != (r, r) {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: p.nrows(),
            });
        }
        let q = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("basis change is singular".into()))?;
        let mut c = vec![0.0; r * r * r];
        for a in 0..r {
            for b in 0..r {
                let prod = self.product(p.column(a).as_slice(), p.column(b).as_slice());
                let coords = &q * DVector::from_vec(prod);
                for (cidx, v) in coords.iter().enumerate() {
                    c[RawTable::idx(r, cidx, a, b)] = *v;
                }
            }
        }
        // Clean rounding residue so exact constants stay exact.
        for v in c.iter_mut() {
            let rounded = v.round();
            if (*v - rounded).abs() < 1e-14 {
                *v = rounded;
            }
        }
        Self::new(r, c)
    }

    /// Unit element if one exists, found by least squares on `e x = x`.
    pub fn unit(&self) -> Option<Vec<f64>> {
        let r = self.rank;
        // Unknown e: Σᵢ eᵢ Cᵏᵢⱼ = δₖⱼ for all (k, j).
        let a = DMatrix::from_fn(r * r, r, |row, i| {
            let (k, j) = (row / r, row % r);
            self.get(k, i, j)
        });
        let b = DVector::from_fn(r * r, |row, _| if row / r == row % r { 1.0 } else { 0.0 });
        let e = (a.transpose() * &a).lu().solve(&(a.transpose() * &b))?;
        ((&a * &e - &b).amax() < 1e-10).then(|| e.iter().copied().collect())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = parse_table(text, true)?;
        Self::new(t.dim, t.c)
    }

    pub fn to_text(&self) -> String {
        write_table(&RawTable {
            dim: self.rank,
            c: self.c.clone(),
        })
    }
}

fn idempotent_residual(sc: &StructureConstants, a: &[f64]) -> f64 {
    sc.product(a, a)
        .iter()
        .zip(a)
        .map(|(p, x)| (p - x).abs())
        .fold(0.0, f64::max)
}

/// Real roots of `c₀ + c₁s + c₂s² + c₃s³`, polished by Newton.
fn real_poly_roots(coef: [f64; 4]) -> Vec<f64> {
    let scale = coef.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let eval = |s: f64| coef[0] + s * (coef[1] + s * (coef[2] + s * coef[3]));
    let deriv = |s: f64| coef[1] + s * (2.0 * coef[2] + s * 3.0 * coef[3]);
    let deg = (0..4)
        .rev()
        .find(|&i| coef[i].abs() > 1e-14 * scale)
        .unwrap_or(0);
    if deg == 0 {
        return Vec::new();
    }
    // Companion matrix of the monic polynomial.
    let lead = coef[deg];
    let comp = DMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -coef[deg - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<f64> = comp
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-7 * (1.0 + z.re.abs()))
        .map(|z| {
            let mut s = z.re;
            for _ in 0..50 {
                let d = deriv(s);
                if d == 0.0 {
                    break;
                }
                let step = eval(s) / d;
                s -= step;
                if step.abs() <= 1e-16 * (1.0 + s.abs()) {
                    break;
                }
            }
            s
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + b.abs()));
    roots
}

/// All nonzero solutions of `a a = a` in a rank-2 commutative algebra.
///
/// A nonzero idempotent `a = t u` forces `u u` to be parallel to `u`, so the
/// candidate directions are the roots of the binary cubic
/// `(u u)₁ u₂ − (u u)₂ u₁ = 0`. Each non-nilpotent direction yields exactly
/// one idempotent, which is then Newton-polished on `a a − a = 0`.
pub fn idempotents(sc: &StructureConstants) -> Result<Vec<Vec<f64>>> {
    if sc.rank() != 2 {
        return Err(Error::InvalidInput(format!(
            "idempotent solver needs rank 2, got {}",
            sc.rank()
        )));
    }
    let c = |k, i, j| sc.get(k, i, j);
    // u = (1, s): (u u)ₖ = Cᵏ₁₁ + 2Cᵏ₁₂ s + Cᵏ₂₂ s².
    let cubic = [
        -c(1, 0, 0),
        c(0, 0, 0) - 2.0 * c(1, 0, 1),
        2.0 * c(0, 0, 1) - c(1, 1, 1),
        c(0, 1, 1),
    ];
    if cubic.iter().all(|v| v.abs() < 1e-14) {
        return Err(Error::InvalidInput(
            "every direction squares into itself; idempotents are not isolated".into(),
        ));
    }
    let mut directions: Vec<[f64; 2]> = real_poly_roots(cubic)
        .into_iter()
        .map(|s| [1.0, s])
        .collect();
    // Direction at infinity, u = (0, 1).
    if c(0, 1, 1).abs() < 1e-14 {
        directions.push([0.0, 1.0]);
    }

    let mut found: Vec<Vec<f64>> = Vec::new();
    for u in directions {
        let w = sc.product(&u, &u);
        let uu = u[0] * u[0] + u[1] * u[1];
        let lambda = (w[0] * u[0] + w[1] * u[1]) / uu;
        if lambda.abs() < 1e-12 {
            continue;
        }
        let mut a = vec![u[0] / lambda, u[1] / lambda];
        for _ in 0..20 {
            let f: Vec<f64> = sc
                .product(&a, &a)
                .iter()
                .zip(&a)
                .map(|(p, x)| p - x)
                .collect();
            if f.iter().all(|v| v.abs() == 0.0) {
                break;
            }
            let jac = sc.left_mult(&a) * 2.0 - DMatrix::identity(2, 2);
            match jac.lu().solve(&DVector::from_vec(f)) {
                Some(step) => {
                    a[0] -= step[0];
                    a[1] -= step[1];
                }
                None => break,
            }
        }
        if idempotent_residual(sc, &a) <= IDEMPOTENT_TOL
            && !found
                .iter()
                .any(|b| (b[0] - a[0]).abs() + (b[1] - a[1]).abs() < 1e-9)
        {
            found.push(a);
        }
    }
    found.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    Ok(found)
}

/// Idempotents other than the unit; errors when there are none.
pub fn nontrivial_idempotents(sc: &StructureConstants) -> Result<Vec<Vec<f64>>> {
    let unit = sc.unit();
    let rest: Vec<Vec<f64>> = idempotents(sc)?
        .into_iter()
        .filter(|a| match &unit {
            Some(e) => (a[0] - e[0]).abs() + (a[1] - e[1]).abs() > 1e-9,
            None => true,
        })
        .collect();
    if rest.is_empty() {
        Err(Error::NoNontrivialIdempotent)
    } else {
        Ok(rest)
    }
}
