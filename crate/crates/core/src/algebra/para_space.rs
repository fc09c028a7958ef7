//! Real paracomplex vector spaces `(E²ᵐ, K)` with `K² = I`.

use nalgebra::{DMatrix, DVector};

use super::Para64;
use crate::error::{Error, Result};

const INVOLUTION_TOL: f64 = 1e-12;

/// `max |K² − I|` scaled by `max(1, ‖K‖∞²)` so that well-posed but large
/// involutions are not rejected for rounding alone.
pub fn involution_residual(k: &DMatrix<f64>) -> f64 {
    let n = k.nrows();
    let raw = (k * k - DMatrix::identity(n, n)).amax();
    let norm = k
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    raw / norm.powi(2).max(1.0)
}

fn check_involution(k: &DMatrix<f64>) -> Result<()> {
    if !k.is_square() {
        return Err(Error::InvalidInput("endomorphism must be square".into()));
    }
    let residual = involution_residual(k);
    if residual > INVOLUTION_TOL {
        return Err(Error::NotInvolution { residual });
    }
    Ok(())
}

/// Splits `v` into its `±1` eigencomponents under the involution `k`:
/// `v₊ = (v + Kv)/2`, `v₋ = (v − Kv)/2`.
pub fn eigensplit(k: &DMatrix<f64>, v: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
    check_involution(k)?;
    if v.len() != k.nrows() {
        return Err(Error::DimensionMismatch {
            expected: k.nrows(),
            got: v.len(),
        });
    }
    let kv = k * v;
    Ok(((v + &kv) * 0.5, (v - &kv) * 0.5))
}

/// A paracomplex structure: an involution whose `±1` eigenspaces have
/// equal dimension `m`.
#[derive(Clone, Debug)]
pub struct ParaStructureSpace {
    k: DMatrix<f64>,
}

impl ParaStructureSpace {
    pub fn new(k: DMatrix<f64>) -> Result<Self> {
        check_involution(&k)?;
        let n = k.nrows();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "real dimension must be even and positive, got {n}"
            )));
        }
        // For an involution trace = dim E₊ − dim E₋.
        if k.trace().abs() > 0.5 {
            return Err(Error::InvalidInput(format!(
                "eigenspaces of K are unbalanced (trace {})",
                k.trace()
            )));
        }
        Ok(Self { k })
    }

    /// The standard structure `diag(I_m, −I_m)`.
    pub fn standard(m: usize) -> Self {
        let n = 2 * m;
        let k = DMatrix::from_fn(n, n, |i, j| match (i == j, i < m) {
            (true, true) => 1.0,
            (true, false) => -1.0,
            _ => 0.0,
        });
        Self { k }
    }

    pub fn m(&self) -> usize {
        self.k.nrows() / 2
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn split(&self, v: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        eigensplit(&self.k, v)
    }

    /// Projectors `(I ± K)/2` onto `E₊` and `E₋`.
    pub fn projectors(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.k.nrows();
        let id = DMatrix::identity(n, n);
        ((&id + &self.k) * 0.5, (&id - &self.k) * 0.5)
    }
}

/// `zᵅ = (z₊ᵅ + z₋ᵅ)/2 + ε(z₊ᵅ − z₋ᵅ)/2`.
pub fn adapted_to_paraholomorphic(z_plus: &[f64], z_minus: &[f64]) -> Result<Vec<Para64>> {
    if z_plus.len() != z_minus.len() {
        return Err(Error::DimensionMismatch {
            expected: z_plus.len(),
            got: z_minus.len(),
        });
    }
    Ok(z_plus
        .iter()
        .zip(z_minus)
        .map(|(p, m)| Para64::from_canonical(*p, *m))
        .collect())
}

pub fn paraholomorphic_to_adapted(z: &[Para64]) -> (Vec<f64>, Vec<f64>) {
    z.iter().map(|w| w.to_canonical()).unzip()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    #[test]
    fn split_examples() {
        let (p, m) = eigensplit(&swap(), &DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!(p.as_slice(), &[0.5, 0.5]);
        assert_eq!(m.as_slice(), &[0.5, -0.5]);

        let v = DVector::from_vec(vec![3.0, -2.0, 7.0]);
        let (p, m) = eigensplit(&DMatrix::identity(3, 3), &v).unwrap();
        assert_eq!(p, v);
        assert_eq!(m.amax(), 0.0);

        let v = DVector::from_vec(vec![1.0, 1.0]);
        let (p, m) = eigensplit(&swap(), &v).unwrap();
        assert_eq!(p, v);
        assert_eq!(m.amax(), 0.0);
    }

    #[test]
    fn rejects_non_involution() {
        let k = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            eigensplit(&k, &DVector::zeros(2)),
            Err(Error::NotInvolution { .. })
        ));
        assert!(eigensplit(&swap(), &DVector::zeros(3)).is_err());
    }

    #[test]
    fn para_structure_requires_balance() {
        assert!(ParaStructureSpace::new(swap()).is_ok());
        assert!(ParaStructureSpace::new(DMatrix::identity(2, 2)).is_err());
        assert!(ParaStructureSpace::new(DMatrix::identity(3, 3)).is_err());
        let s = ParaStructureSpace::standard(3);
        assert_eq!(s.m(), 3);
        let (pp, pm) = s.projectors();
        assert_eq!(pp.trace(), 3.0);
        assert_eq!(pm.trace(), 3.0);
    }

    #[test]
    fn adapted_coordinates() {
        let z = adapted_to_paraholomorphic(&[1.0, 1.0, 2.0], &[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(
            z,
            vec![
                Para64::new(1.0, 0.0),
                Para64::new(0.0, 1.0),
                Para64::new(1.0, 1.0)
            ]
        );
        let (p, m) = paraholomorphic_to_adapted(&z);
        assert_eq!(p, vec![1.0, 1.0, 2.0]);
        assert_eq!(m, vec![1.0, -1.0, 0.0]);
        assert!(adapted_to_paraholomorphic(&[1.0], &[]).is_err());
    }
}
