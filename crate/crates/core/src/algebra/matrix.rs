use nalgebra::{DMatrix, DVector};

use super::Para64;
use crate::error::{Error, Result};

/// Vector over the paracomplex numbers.
pub type ParaVector = Vec<Para64>;

/// Square matrix over the paracomplex numbers, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ParaMatrix {
    n: usize,
    entries: Vec<Para64>,
}

impl ParaMatrix {
    pub fn new(n: usize, entries: Vec<Para64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix size must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Para64::one(); n])
    }

    pub fn diagonal(d: &[Para64]) -> Self {
        let n = d.len();
        let mut entries = vec![Para64::zero(); n * n];
        for (i, v) in d.iter().enumerate() {
            entries[i * n + i] = *v;
        }
        Self { n, entries }
    }

    /// Builds `M₊ e₊ + M₋ e₋` from its canonical components.
    pub fn from_canonical(plus: &DMatrix<f64>, minus: &DMatrix<f64>) -> Result<Self> {
        let n = plus.nrows();
        if plus.shape() != (n, n) || minus.shape() != (n, n) {
            return Err(Error::InvalidInput(
                "canonical components must be square and of equal size".into(),
            ));
        }
        let entries = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                Para64::from_canonical(plus[(i, j)], minus[(i, j)])
            })
            .collect();
        Self::new(n, entries)
    }

    /// `(M₊, M₋)` with `M = M₊ e₊ + M₋ e₋`.
    pub fn to_canonical(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.n;
        let plus = DMatrix::from_fn(n, n, |i, j| self.get(i, j).to_canonical().0);
        let minus = DMatrix::from_fn(n, n, |i, j| self.get(i, j).to_canonical().1);
        (plus, minus)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Para64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Para64] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let entries = (0..n * n).map(|idx| self.get(idx % n, idx / n)).collect();
        Self { n, entries }
    }

    /// Entrywise `ε ↦ −ε`.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        self.conj().transpose()
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.n,
            });
        }
        let n = self.n;
        let mut entries = vec![Para64::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    entries[i * n + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn mul_vec(&self, v: &[Para64]) -> Result<ParaVector> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok((0..self.n)
            .map(|i| (0..self.n).fold(Para64::zero(), |acc, j| acc + self.get(i, j) * v[j]))
            .collect())
    }

    /// Real `2n × 2n` realization in the `(1, ε)` coordinates of each entry.
    pub fn realify(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(2 * n, 2 * n, |r, c| {
            let z = self.get(r / 2, c / 2);
            match (r % 2, c % 2) {
                (0, 0) | (1, 1) => z.x,
                _ => z.y,
            }
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (*a - *b).abs_max())
            .fold(0.0, f64::max)
    }
}

/// Splits a vector of paracomplex scalars into canonical component vectors.
pub fn vector_to_canonical(v: &[Para64]) -> (DVector<f64>, DVector<f64>) {
    let plus = DVector::from_iterator(v.len(), v.iter().map(|z| z.to_canonical().0));
    let minus = DVector::from_iterator(v.len(), v.iter().map(|z| z.to_canonical().1));
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let plus = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let minus = DMatrix::from_row_slice(2, 2, &[-1.0, 0.5, 0.0, 7.0]);
        let m = ParaMatrix::from_canonical(&plus, &minus).unwrap();
        let (p, q) = m.to_canonical();
        assert_eq!(p, plus);
        assert_eq!(q, minus);
    }

    #[test]
    fn product_is_componentwise_in_canonical_coordinates() {
        let a = ParaMatrix::new(
            2,
            vec![
                Para64::new(1.0, 2.0),
                Para64::new(0.0, 1.0),
                Para64::new(-1.0, 0.5),
                Para64::new(3.0, 0.0),
            ],
        )
        .unwrap();
        let b = a.transpose().conj();
        let (ap, am) = a.to_canonical();
        let (bp, bm) = b.to_canonical();
        let (cp, cm) = a.mul(&b).unwrap().to_canonical();
        assert!((cp - ap * bp).amax() < 1e-14);
        assert!((cm - am * bm).amax() < 1e-14);
    }

    #[test]
    fn conj_transpose_swaps_and_transposes_components() {
        let plus = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let minus = DMatrix::from_row_slice(2, 2, &[5.0, 6.0, 7.0, 8.0]);
        let m = ParaMatrix::from_canonical(&plus, &minus).unwrap();
        let (p, q) = m.conj_transpose().to_canonical();
        assert_eq!(p, minus.transpose());
        assert_eq!(q, plus.transpose());
    }

    #[test]
    fn rejects_bad_shape() {
        assert!(ParaMatrix::new(2, vec![Para64::one(); 3]).is_err());
        assert!(ParaMatrix::new(0, vec![]).is_err());
    }
}
