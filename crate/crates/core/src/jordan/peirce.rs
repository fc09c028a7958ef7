//! Peirce decompositions relative to idempotents.
//!
//! For an idempotent `a` the multiplication operator `L_a x = a•x` of a
//! Jordan algebra satisfies `L_a (2L_a − 1)(L_a − 1) = 0`, so it is
//! diagonalizable with spectrum in `{1, ½, 0}`. The Peirce spaces are
//! labelled `J₂, J₁, J₀` for the eigenvalues `1, ½, 0`. Projectors are built
//! by Lagrange interpolation over the eigenvalues that actually occur:
//! `E_λ = Π_{μ ≠ λ} (L_a − μ)/(λ − μ)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Schur};

use super::JordanAlgebra;
use crate::error::{Error, Result};

const IDEMPOTENT_TOL: f64 = 1e-12;
const SPECTRUM_TOL: f64 = 1e-6;
const MIN_POLY_TOL: f64 = 1e-8;

/// Label of a Peirce space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PeirceSpace {
    /// Eigenvalue 1 of `L_a`.
    Two,
    /// Eigenvalue ½.
    One,
    /// Eigenvalue 0.
    Zero,
}

impl PeirceSpace {
    pub const ALL: [PeirceSpace; 3] = [PeirceSpace::Two, PeirceSpace::One, PeirceSpace::Zero];

    pub fn eigenvalue(self) -> f64 {
        match self {
            PeirceSpace::Two => 1.0,
            PeirceSpace::One => 0.5,
            PeirceSpace::Zero => 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PeirceDecomposition {
    pub idempotent: DVector<f64>,
    pub e2: DMatrix<f64>,
    pub e1: DMatrix<f64>,
    pub e0: DMatrix<f64>,
    /// Eigenvalues of `L_a` as computed, real parts.
    pub spectrum: Vec<f64>,
}

fn scaled_residual(raw: f64, a: &DVector<f64>) -> f64 {
    raw / a.amax().powi(2).max(1.0)
}

fn check_idempotent(j: &JordanAlgebra, a: &DVector<f64>) -> Result<()> {
    if a.len() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            got: a.len(),
        });
    }
    let residual = scaled_residual((j.product(a, a) - a).amax(), a);
    if residual > IDEMPOTENT_TOL {
        return Err(Error::NotIdempotent { residual });
    }
    Ok(())
}

pub fn peirce_projections(j: &JordanAlgebra, a: &DVector<f64>) -> Result<PeirceDecomposition> {
    check_idempotent(j, a)?;
    let d = j.dim();
    let la = j.mult_operator(a);
    let id = DMatrix::<f64>::identity(d, d);
    let lagrange = |labels: &[f64], lambda: f64| -> DMatrix<f64> {
        labels
            .iter()
            .filter(|mu| **mu != lambda)
            .fold(id.clone(), |acc, mu| acc * ((&la - &id * *mu) / (lambda - mu)))
    };
    let annihilator = |labels: &[f64]| {
        labels
            .iter()
            .fold(id.clone(), |acc, mu| acc * (&la - &id * *mu))
            .amax()
    };
    let scale = |n: usize| MIN_POLY_TOL * la.amax().max(1.0).powi(n as i32);

    let all: Vec<f64> = PeirceSpace::ALL.iter().map(|s| s.eigenvalue()).collect();
    if annihilator(&all) > scale(3) {
        return Err(Error::SpectrumViolation {
            eigenvalue: worst_eigenvalue(&la, &all),
        });
    }
    let ranks: Vec<usize> = all
        .iter()
        .map(|l| lagrange(&all, *l).trace().round().max(0.0) as usize)
        .collect();
    let labels: Vec<f64> = all
        .iter()
        .zip(&ranks)
        .filter(|(_, r)| **r > 0)
        .map(|(l, _)| *l)
        .collect();
    // L_a must be annihilated by its squarefree spectral polynomial.
    if annihilator(&labels) > scale(labels.len()) {
        return Err(Error::SpectrumViolation {
            eigenvalue: worst_eigenvalue(&la, &labels),
        });
    }
    let spectrum: Vec<f64> = all
        .iter()
        .zip(&ranks)
        .flat_map(|(l, r)| std::iter::repeat_n(*l, *r))
        .collect();

    let projector = |lambda: f64| -> DMatrix<f64> {
        if !labels.contains(&lambda) {
            return DMatrix::zeros(d, d);
        }
        lagrange(&labels, lambda)
    };

    Ok(PeirceDecomposition {
        idempotent: a.clone(),
        e2: projector(1.0),
        e1: projector(0.5),
        e0: projector(0.0),
        spectrum,
    })
}

/// Eigenvalue of `la` farthest from `labels`; NaN if the Schur iteration
/// does not converge.
fn worst_eigenvalue(la: &DMatrix<f64>, labels: &[f64]) -> f64 {
    let dist = |x: f64| labels.iter().map(|l| (x - l).abs()).fold(f64::MAX, f64::min);
    Schur::try_new(la.clone(), f64::EPSILON, 10_000)
        .map(|s| s.complex_eigenvalues())
        .and_then(|ev| {
            ev.iter()
                .map(|z| if z.im.abs() > SPECTRUM_TOL { f64::NAN } else { z.re })
                .max_by(|x, y| dist(*x).total_cmp(&dist(*y)))
        })
        .unwrap_or(f64::NAN)
}

/// Orthonormal basis of the range of a projector.
pub fn projector_range(p: &DMatrix<f64>) -> DMatrix<f64> {
    // Eigenvectors of P Pᵀ; nonzero eigenvalues of a projector's Gram matrix are ≥ 1.
    let eig = (p * p.transpose()).symmetric_eigen();
    let cols: Vec<usize> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 0.25)
        .map(|(i, _)| i)
        .collect();
    DMatrix::from_fn(p.nrows(), cols.len(), |r, c| eig.eigenvectors[(r, cols[c])])
}

fn projector_rank(p: &DMatrix<f64>) -> usize {
    p.trace().round().max(0.0) as usize
}

impl PeirceDecomposition {
    pub fn projector(&self, space: PeirceSpace) -> &DMatrix<f64> {
        match space {
            PeirceSpace::Two => &self.e2,
            PeirceSpace::One => &self.e1,
            PeirceSpace::Zero => &self.e0,
        }
    }

    /// `(dim J₂, dim J₁, dim J₀)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (
            projector_rank(&self.e2),
            projector_rank(&self.e1),
            projector_rank(&self.e0),
        )
    }

    pub fn basis(&self, space: PeirceSpace) -> DMatrix<f64> {
        projector_range(self.projector(space))
    }

    /// `max |E₂ + E₁ + E₀ − I|`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.e2.nrows();
        (&self.e2 + &self.e1 + &self.e0 - DMatrix::identity(d, d)).amax()
    }

    /// `max |EᵢEⱼ − δᵢⱼEᵢ|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let ps = [&self.e2, &self.e1, &self.e0];
        let mut worst: f64 = 0.0;
        for (i, p) in ps.iter().enumerate() {
            for (k, q) in ps.iter().enumerate() {
                let prod = *p * *q;
                let r = if i == k {
                    (prod - *p).amax()
                } else {
                    prod.amax()
                };
                worst = worst.max(r);
            }
        }
        worst
    }

    /// `max |L_a Eλ − λ Eλ|`.
    pub fn eigen_residual(&self, j: &JordanAlgebra) -> f64 {
        let la = j.mult_operator(&self.idempotent);
        PeirceSpace::ALL
            .iter()
            .map(|s| {
                let p = self.projector(*s);
                (&la * p - p * s.eigenvalue()).amax()
            })
            .fold(0.0, f64::max)
    }

    /// `E₂ − E₁ + E₀`.
    pub fn reflection(&self) -> DMatrix<f64> {
        &self.e2 - &self.e1 + &self.e0
    }
}

/// Residuals of the Peirce multiplication rules, measured on orthonormal
/// bases of the Peirce spaces.
#[derive(Clone, Copy, Debug, Default)]
pub struct PeirceRules {
    /// `J₂•J₀ = 0`.
    pub two_zero: f64,
    /// `J₂•J₁ ⊆ J₁` and `J₀•J₁ ⊆ J₁`.
    pub diagonal_one: f64,
    /// `J₁•J₁ ⊆ J₂ + J₀`.
    pub one_one: f64,
}

impl PeirceRules {
    pub fn max(&self) -> f64 {
        self.two_zero.max(self.diagonal_one).max(self.one_one)
    }
}

pub fn peirce_rules(j: &JordanAlgebra, dec: &PeirceDecomposition) -> PeirceRules {
    let b2 = dec.basis(PeirceSpace::Two);
    let b1 = dec.basis(PeirceSpace::One);
    let b0 = dec.basis(PeirceSpace::Zero);
    let pairs = |x: &DMatrix<f64>, y: &DMatrix<f64>, f: &dyn Fn(DVector<f64>) -> f64| {
        let mut worst: f64 = 0.0;
        for u in x.column_iter() {
            for v in y.column_iter() {
                worst = worst.max(f(j.product(&u.into_owned(), &v.into_owned())));
            }
        }
        worst
    };
    let off_one = |p: DVector<f64>| ((&dec.e2 * &p).amax()).max((&dec.e0 * &p).amax());
    PeirceRules {
        two_zero: pairs(&b2, &b0, &|p| p.amax()),
        diagonal_one: pairs(&b2, &b1, &off_one).max(pairs(&b0, &b1, &off_one)),
        one_one: pairs(&b1, &b1, &|p| (&dec.e1 * &p).amax()),
    }
}

/// Decomposition relative to a complete family of orthogonal idempotents.
#[derive(Clone, Debug)]
pub struct PeirceFamily {
    /// Projector onto `Jᵢⱼ` for `i ≤ j` (0-based).
    pub projectors: BTreeMap<(usize, usize), DMatrix<f64>>,
}

impl PeirceFamily {
    pub fn dims(&self) -> BTreeMap<(usize, usize), usize> {
        self.projectors
            .iter()
            .map(|(k, p)| (*k, projector_rank(p)))
            .collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims().values().sum()
    }

    /// `max |Σ Pᵢⱼ − I|`.
    pub fn completeness_residual(&self) -> f64 {
        let mut it = self.projectors.values();
        let first = it.next().expect("nonempty family");
        let d = first.nrows();
        let sum = it.fold(first.clone(), |acc, p| acc + p);
        (sum - DMatrix::identity(d, d)).amax()
    }
}

/// `Jᵢᵢ = {x | aᵢ•x = x}`, `Jᵢⱼ = {x | aᵢ•x = aⱼ•x = ½x}`.
pub fn peirce_decompose_family(
    j: &JordanAlgebra,
    idempotents: &[DVector<f64>],
) -> Result<PeirceFamily> {
    if idempotents.is_empty() {
        return Err(Error::InvalidInput("empty idempotent family".into()));
    }
    let unit = j.unit().ok_or(Error::NoUnit)?;
    let mut sum = DVector::zeros(j.dim());
    for (i, a) in idempotents.iter().enumerate() {
        check_idempotent(j, a)?;
        for b in &idempotents[i + 1..] {
            let residual = j.product(a, b).amax();
            if residual > IDEMPOTENT_TOL * a.amax().max(1.0) * b.amax().max(1.0) {
                return Err(Error::NotOrthogonal { residual });
            }
        }
        sum += a;
    }
    let residual = (sum - &unit).amax();
    if residual > IDEMPOTENT_TOL * unit.amax().max(1.0) {
        return Err(Error::NotUnitSum { residual });
    }

    let decs: Vec<PeirceDecomposition> = idempotents
        .iter()
        .map(|a| peirce_projections(j, a))
        .collect::<Result<_>>()?;
    let mut projectors = BTreeMap::new();
    for i in 0..decs.len() {
        projectors.insert((i, i), decs[i].e2.clone());
        for k in i + 1..decs.len() {
            projectors.insert((i, k), &decs[i].e1 * &decs[k].e1);
        }
    }
    Ok(PeirceFamily { projectors })
}

/// Peirce reflection `E₂ − E₁ + E₀` attached to `(a, 1 − a)`.
pub fn peirce_reflection(j: &JordanAlgebra, a: &DVector<f64>) -> Result<DMatrix<f64>> {
    Ok(peirce_projections(j, a)?.reflection())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::StructureConstants;
    use crate::jordan::{sym_coords, sym_matrix};

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn paracomplex_e_plus() {
        let j = JordanAlgebra::from_structure(&StructureConstants::paracomplex());
        let dec = peirce_projections(&j, &v(&[0.5, 0.5])).unwrap();
        assert_eq!(dec.dims(), (1, 0, 1));
        // J₂ = span(e₊), J₀ = span(e₋).
        assert!((&dec.e2 * v(&[0.5, 0.5]) - v(&[0.5, 0.5])).amax() < 1e-15);
        assert!((&dec.e0 * v(&[0.5, -0.5]) - v(&[0.5, -0.5])).amax() < 1e-15);
        assert!((dec.reflection() - DMatrix::identity(2, 2)).amax() < 1e-15);
    }

    #[test]
    fn symmetric_two_by_two() {
        let j = JordanAlgebra::symmetric(2);
        let a = sym_coords(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let dec = peirce_projections(&j, &a).unwrap();
        assert_eq!(dec.dims(), (1, 1, 1));
        // Coordinates (M₁₁, M₁₂, M₂₂).
        assert!((&dec.e2 - DMatrix::from_diagonal(&v(&[1.0, 0.0, 0.0]))).amax() < 1e-14);
        assert!((&dec.e1 - DMatrix::from_diagonal(&v(&[0.0, 1.0, 0.0]))).amax() < 1e-14);
        assert!((&dec.e0 - DMatrix::from_diagonal(&v(&[0.0, 0.0, 1.0]))).amax() < 1e-14);

        let m = sym_coords(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]));
        let um = sym_matrix(2, (dec.reflection() * m).as_slice());
        assert_eq!(um, DMatrix::from_row_slice(2, 2, &[1.0, -2.0, -2.0, 3.0]));
    }

    #[test]
    fn unit_idempotent_gives_identity() {
        let j = JordanAlgebra::symmetric(3);
        let e = j.unit().unwrap();
        let dec = peirce_projections(&j, &e).unwrap();
        assert!((&dec.e2 - DMatrix::identity(6, 6)).amax() < 1e-14);
        assert_eq!(dec.e1.amax(), 0.0);
        assert_eq!(dec.e0.amax(), 0.0);
    }

    #[test]
    fn reflection_matches_quadratic_representation() {
        let j = JordanAlgebra::symmetric(3);
        let a = sym_coords(&DMatrix::from_diagonal(&v(&[1.0, 1.0, 0.0])));
        let u = &a * 2.0 - j.unit().unwrap();
        let refl = peirce_reflection(&j, &a).unwrap();
        assert!((refl - j.quadratic_representation(&u)).amax() < 1e-14);
    }

    #[test]
    fn errors() {
        let j = JordanAlgebra::symmetric(2);
        assert!(matches!(
            peirce_projections(&j, &v(&[2.0, 0.0, 0.0])),
            Err(Error::NotIdempotent { .. })
        ));
        // Commutative non-Jordan table where e₁ is idempotent but L_{e₁}
        // has eigenvalue 2.
        let mut c = vec![0.0; 8];
        c[0] = 1.0; // C¹₁₁
        c[crate::table::RawTable::idx(2, 1, 0, 1)] = 2.0;
        c[crate::table::RawTable::idx(2, 1, 1, 0)] = 2.0;
        let bad = JordanAlgebra::from_table(2, c).unwrap();
        assert!(matches!(
            peirce_projections(&bad, &v(&[1.0, 0.0])),
            Err(Error::SpectrumViolation { .. })
        ));
    }

    #[test]
    fn family_of_paracomplex_and_symmetric() {
        let j = JordanAlgebra::from_structure(&StructureConstants::paracomplex());
        let fam = peirce_decompose_family(&j, &[v(&[0.5, 0.5]), v(&[0.5, -0.5])]).unwrap();
        let dims = fam.dims();
        assert_eq!(dims[&(0, 0)], 1);
        assert_eq!(dims[&(1, 1)], 1);
        assert_eq!(dims[&(0, 1)], 0);

        let s = JordanAlgebra::symmetric(2);
        let e11 = v(&[1.0, 0.0, 0.0]);
        let e22 = v(&[0.0, 0.0, 1.0]);
        let fam = peirce_decompose_family(&s, &[e11.clone(), e22.clone()]).unwrap();
        assert_eq!(
            fam.dims().values().copied().collect::<Vec<_>>(),
            vec![1, 1, 1]
        );
        assert!(fam.completeness_residual() < 1e-14);

        let one = peirce_decompose_family(&s, &[s.unit().unwrap()]).unwrap();
        assert_eq!(one.total_dim(), 3);
        assert_eq!(one.dims()[&(0, 0)], 3);

        assert!(matches!(
            peirce_decompose_family(&s, &[e11.clone(), e11.clone()]),
            Err(Error::NotOrthogonal { .. })
        ));
        assert!(matches!(
            peirce_decompose_family(&s, &[e11]),
            Err(Error::NotUnitSum { .. })
        ));
    }

    #[test]
    fn multiplication_rules_on_spin_factor() {
        let j = JordanAlgebra::spin_factor(3);
        // Idempotent ½(1 + v) with |v| = 1.
        let a = v(&[0.5, 0.5, 0.0, 0.0]);
        let dec = peirce_projections(&j, &a).unwrap();
        assert_eq!(dec.dims(), (1, 2, 1));
        assert!(peirce_rules(&j, &dec).max() < 1e-12);
    }

    #[test]
    fn oblique_projector_range() {
        #[rustfmt::skip]
        let p = DMatrix::from_row_slice(3, 3, &[
            0.49964370602695835, 0.026684830231818113, -0.4996437060269598,
            0.013342415115909001, 0.0007125879460803675, -0.013342415115907669,
            -0.4996437060269598, -0.026684830231815337, 0.49964370602695857,
        ]);
        let b = projector_range(&p);
        assert_eq!(b.ncols(), 1);
        assert!((&p * &b - &b).amax() < 1e-12);
    }

    #[test]
    fn rules_at_rotated_rank_one() {
        let j = JordanAlgebra::symmetric(3);
        let q = DMatrix::from_fn(3, 3, |r, c| ((r * 3 + c) as f64 * 0.7).sin()).qr().q();
        let col = q.column(0);
        let dec = peirce_projections(&j, &sym_coords(&(col * col.transpose()))).unwrap();
        assert_eq!(dec.dims(), (1, 2, 3));
        assert!(peirce_rules(&j, &dec).max() < 1e-12);
    }
}
