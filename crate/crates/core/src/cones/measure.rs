use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;

use crate::algebra::ParaMatrix;
use crate::error::{Error, Result};

/// Signed measure on a finite sample space, one weight per atom.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SignedMeasure {
    pub weights: Vec<f64>,
}

impl SignedMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite atom weight {w}")));
        }
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `‖μ‖ = Σ |μᵢ|`.
    pub fn total_variation(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|w| *w >= 0.0)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.weights.iter().all(|w| *w > 0.0)
    }

    /// One weight per line; blank lines and `#` comments are skipped.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut weights = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = match rec.get(0) {
                Some(f) if !f.is_empty() => f,
                _ => continue,
            };
            if rec.len() > 1 {
                return Err(Error::Parse {
                    line: line + 1,
                    message: "expected one weight per line".into(),
                });
            }
            let w: f64 = field.parse().map_err(|_| Error::Parse {
                line: line + 1,
                message: format!("not a number: {field:?}"),
            })?;
            weights.push(w);
        }
        Self::new(weights)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn to_csv(&self) -> String {
        self.weights.iter().map(|w| format!("{w}\n")).collect()
    }
}

/// Minimal split `μ = μ⁺ − μ⁻` into positive measures with disjoint
/// supports.
pub fn hahn_jordan(mu: &SignedMeasure) -> (SignedMeasure, SignedMeasure) {
    let plus = mu.weights.iter().map(|w| w.max(0.0)).collect();
    let minus = mu.weights.iter().map(|w| (-w).max(0.0)).collect();
    (
        SignedMeasure { weights: plus },
        SignedMeasure { weights: minus },
    )
}

/// Diagonal paracomplex matrix with entries `μ⁺ᵢ e₊ + μ⁻ᵢ e₋`.
pub fn measure_pair_embed(plus: &SignedMeasure, minus: &SignedMeasure) -> Result<ParaMatrix> {
    if plus.len() != minus.len() {
        return Err(Error::DimensionMismatch {
            expected: plus.len(),
            got: minus.len(),
        });
    }
    if plus.is_empty() {
        return Err(Error::InvalidInput("empty sample space".into()));
    }
    for (name, m) in [("positive", plus), ("negative", minus)] {
        if let Some((i, w)) = m.weights.iter().enumerate().find(|(_, w)| **w <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "{name} part has non-positive atom {i} (weight {w})"
            )));
        }
    }
    let p = DMatrix::from_diagonal(&plus.weights.clone().into());
    let m = DMatrix::from_diagonal(&minus.weights.clone().into());
    ParaMatrix::from_canonical(&p, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Para64;

    fn m(w: &[f64]) -> SignedMeasure {
        SignedMeasure::new(w.to_vec()).unwrap()
    }

    #[test]
    fn split_examples() {
        let (p, n) = hahn_jordan(&m(&[3.0, -2.0, 0.0]));
        assert_eq!(p.weights, vec![3.0, 0.0, 0.0]);
        assert_eq!(n.weights, vec![0.0, 2.0, 0.0]);

        let (p, n) = hahn_jordan(&m(&[1.0, 0.0, 4.0]));
        assert_eq!(p.weights, vec![1.0, 0.0, 4.0]);
        assert!(n.weights.iter().all(|w| *w == 0.0));

        let mu = m(&[-1.0, -1.0]);
        let (p, n) = hahn_jordan(&mu);
        assert_eq!(p.weights, vec![0.0, 0.0]);
        assert_eq!(n.weights, vec![1.0, 1.0]);
        assert_eq!(mu.total_variation(), 2.0);
    }

    #[test]
    fn embed_examples() {
        let e = measure_pair_embed(&m(&[1.0, 2.0]), &m(&[3.0, 4.0])).unwrap();
        let ep = Para64::e_plus();
        let em = Para64::e_minus();
        assert_eq!(e.get(0, 0), ep.scale(1.0) + em.scale(3.0));
        assert_eq!(e.get(1, 1), ep.scale(2.0) + em.scale(4.0));
        assert_eq!(e.get(0, 1), Para64::zero());

        let id = measure_pair_embed(&m(&[1.0; 3]), &m(&[1.0; 3])).unwrap();
        assert_eq!(id.max_abs_diff(&ParaMatrix::identity(3)), 0.0);

        assert!(measure_pair_embed(&m(&[1.0, 0.5]), &m(&[1.0, 0.0])).is_err());
        assert!(measure_pair_embed(&m(&[1.0]), &m(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn csv_reading() {
        let mu = SignedMeasure::from_csv("# weights\n0.5\n-1.25\n\n3\n".as_bytes()).unwrap();
        assert_eq!(mu.weights, vec![0.5, -1.25, 3.0]);
        assert_eq!(SignedMeasure::from_csv(mu.to_csv().as_bytes()).unwrap(), mu);
        assert!(SignedMeasure::from_csv("1\nx\n".as_bytes()).is_err());
        assert!(SignedMeasure::from_csv("1,2\n".as_bytes()).is_err());
    }
}
