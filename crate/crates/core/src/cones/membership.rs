use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::SignedMeasure;
use crate::algebra::ParaMatrix;
use crate::error::{Error, Result};

const SELF_ADJOINT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConeClass {
    RealPd(usize),
    ComplexPd(usize),
    /// Quaternion Hermitian matrices, tested through the `2n × 2n` complex
    /// embedding.
    QuaternionPd(usize),
    ParacomplexPd(usize),
    Measure(usize),
}

impl ConeClass {
    pub fn size(&self) -> usize {
        match *self {
            ConeClass::RealPd(n)
            | ConeClass::ComplexPd(n)
            | ConeClass::QuaternionPd(n)
            | ConeClass::ParacomplexPd(n)
            | ConeClass::Measure(n) => n,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ConeClass::RealPd(_) => "real-pd",
            ConeClass::ComplexPd(_) => "complex-pd",
            ConeClass::QuaternionPd(_) => "quaternion-pd",
            ConeClass::ParacomplexPd(_) => "paracomplex-pd",
            ConeClass::Measure(_) => "measure",
        }
    }

    pub fn identity(&self) -> ConeElement {
        let n = self.size();
        match self {
            ConeClass::RealPd(_) => ConeElement::Real(DMatrix::identity(n, n)),
            ConeClass::ComplexPd(_) => ConeElement::Complex(DMatrix::identity(n, n)),
            ConeClass::QuaternionPd(_) => ConeElement::Quaternion {
                a: DMatrix::identity(n, n),
                b: DMatrix::zeros(n, n),
            },
            ConeClass::ParacomplexPd(_) => ConeElement::Paracomplex(ParaMatrix::identity(n)),
            ConeClass::Measure(_) => ConeElement::Measure(SignedMeasure {
                weights: vec![1.0; n],
            }),
        }
    }
}

impl fmt::Display for ConeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tag(), self.size())
    }
}

impl FromStr for ConeClass {
    type Err = Error;

    /// `real-pd:3`, `complex-pd:2`, `quaternion-pd:2`, `paracomplex-pd:3`,
    /// `measure:5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown cone class {s:?}"));
        let (tag, n) = s.split_once(':').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Ok(match tag.trim() {
            "real-pd" => ConeClass::RealPd(n),
            "complex-pd" => ConeClass::ComplexPd(n),
            "quaternion-pd" => ConeClass::QuaternionPd(n),
            "paracomplex-pd" => ConeClass::ParacomplexPd(n),
            "measure" | "measure-cone" => ConeClass::Measure(n),
            _ => return Err(bad()),
        })
    }
}

/// An element of the ambient space of a cone class.
#[derive(Clone, Debug)]
pub enum ConeElement {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
    /// `Q = A + B j` with complex `n × n` blocks.
    Quaternion {
        a: DMatrix<Complex64>,
        b: DMatrix<Complex64>,
    },
    Paracomplex(ParaMatrix),
    Measure(SignedMeasure),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Ascending spectrum of a self-adjoint matrix. For the quaternion class
    /// this is the spectrum of the complex embedding, each value twice.
    Eigenvalues(Vec<f64>),
    /// Ascending spectra of the canonical components `M₊`, `M₋`.
    Canonical {
        plus: Vec<f64>,
        minus: Vec<f64>,
    },
    Weights(Vec<f64>),
    NotSelfAdjoint {
        residual: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub certificate: Certificate,
}

/// `[[A, B], [−B̄, Ā]]`.
pub fn quaternion_embedding(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n))
        .copy_from(&(-b.map(|z| z.conj())));
    m.view_mut((n, n), (n, n)).copy_from(&a.map(|z| z.conj()));
    m
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn real_spectrum(m: &DMatrix<f64>) -> std::result::Result<Vec<f64>, f64> {
    let residual = (m - m.transpose()).amax();
    if residual > SELF_ADJOINT_TOL * m.amax().max(1.0) {
        return Err(residual);
    }
    let sym = (m + m.transpose()) * 0.5;
    Ok(sorted(
        SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .copied()
            .collect(),
    ))
}

fn complex_spectrum(m: &DMatrix<Complex64>) -> std::result::Result<Vec<f64>, f64> {
    let adj = m.adjoint();
    let residual = (m - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if residual > SELF_ADJOINT_TOL * scale {
        return Err(residual);
    }
    let herm = (m + adj) * Complex64::new(0.5, 0.0);
    Ok(sorted(
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .collect(),
    ))
}

fn check_square<T>(m: &DMatrix<T>, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if m.nrows() != n { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

fn from_spectrum(spec: std::result::Result<Vec<f64>, f64>) -> Membership {
    match spec {
        Ok(ev) => Membership {
            member: ev.iter().all(|l| *l > 0.0),
            certificate: Certificate::Eigenvalues(ev),
        },
        Err(residual) => Membership {
            member: false,
            certificate: Certificate::NotSelfAdjoint { residual },
        },
    }
}

/// Membership in the open cone of class `c`.
///
/// The paracomplex class is tested componentwise: writing
/// `M = M₊ e₊ + M₋ e₋`, both `M₊` and `M₋` must be symmetric and positive
/// definite. The diagonal images of [`super::measure_pair_embed`] are members
/// exactly when both measures are strictly positive.
pub fn is_positive(c: ConeClass, x: &ConeElement) -> Result<Membership> {
    let n = c.size();
    Ok(match (c, x) {
        (ConeClass::RealPd(_), ConeElement::Real(m)) => {
            check_square(m, n)?;
            from_spectrum(real_spectrum(m))
        }
        (ConeClass::ComplexPd(_), ConeElement::Complex(m)) => {
            check_square(m, n)?;
            from_spectrum(complex_spectrum(m))
        }
        (ConeClass::QuaternionPd(_), ConeElement::Quaternion { a, b }) => {
            check_square(a, n)?;
            check_square(b, n)?;
            from_spectrum(complex_spectrum(&quaternion_embedding(a, b)))
        }
        (ConeClass::ParacomplexPd(_), ConeElement::Paracomplex(m)) => {
            if m.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.n(),
                });
            }
            let (p, q) = m.to_canonical();
            match (real_spectrum(&p), real_spectrum(&q)) {
                (Ok(plus), Ok(minus)) => Membership {
                    member: plus.iter().chain(&minus).all(|l| *l > 0.0),
                    certificate: Certificate::Canonical { plus, minus },
                },
                (Err(r), _) | (_, Err(r)) => Membership {
                    member: false,
                    certificate: Certificate::NotSelfAdjoint { residual: r },
                },
            }
        }
        (ConeClass::Measure(_), ConeElement::Measure(mu)) => {
            if mu.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: mu.len(),
                });
            }
            Membership {
                member: mu.is_strictly_positive(),
                certificate: Certificate::Weights(mu.weights.clone()),
            }
        }
        (c, _) => {
            return Err(Error::InvalidInput(format!(
                "element kind does not match cone class {c}"
            )))
        }
    })
}

/// Trace pairing: `tr(AB)` (real part for complex and quaternion classes),
/// `tr(A₊B₊) + tr(A₋B₋)` for the paracomplex class, `Σ aᵢbᵢ` for measures.
pub fn pairing(x: &ConeElement, y: &ConeElement) -> Result<f64> {
    let ctr = |p: &DMatrix<Complex64>, q: &DMatrix<Complex64>| -> f64 {
        p.iter()
            .zip(q.transpose().iter())
            .map(|(u, v)| (u * v).re)
            .sum()
    };
    match (x, y) {
        (ConeElement::Real(a), ConeElement::Real(b)) if a.shape() == b.shape() => {
            Ok(a.component_mul(&b.transpose()).sum())
        }
        (ConeElement::Complex(a), ConeElement::Complex(b)) if a.shape() == b.shape() => {
            Ok(ctr(a, b))
        }
        (ConeElement::Quaternion { a: a1, b: b1 }, ConeElement::Quaternion { a: a2, b: b2 })
            if a1.shape() == a2.shape() =>
        {
            Ok(0.5 * ctr(&quaternion_embedding(a1, b1), &quaternion_embedding(a2, b2)))
        }
        (ConeElement::Paracomplex(a), ConeElement::Paracomplex(b)) if a.n() == b.n() => {
            let (ap, am) = a.to_canonical();
            let (bp, bm) = b.to_canonical();
            Ok(ap.component_mul(&bp.transpose()).sum() + am.component_mul(&bm.transpose()).sum())
        }
        (ConeElement::Measure(a), ConeElement::Measure(b)) if a.len() == b.len() => {
            Ok(a.weights.iter().zip(&b.weights).map(|(u, v)| u * v).sum())
        }
        _ => Err(Error::InvalidInput(
            "pairing of incompatible elements".into(),
        )),
    }
}

fn real_witness(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, f64)> {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let (i, lmin) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if lmin > 0.0 {
        return None;
    }
    let v = eig.eigenvectors.column(i);
    let delta = lmin.abs() / (4.0 * (1.0 + m.trace().abs()));
    Some((v * v.transpose() + DMatrix::identity(n, n) * delta, lmin))
}

fn complex_witness(m: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let n = m.nrows();
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let (i, lmin) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if lmin > 0.0 {
        return None;
    }
    let v = eig.eigenvectors.column(i);
    let delta = lmin.abs() / (4.0 * (1.0 + m.trace().re.abs()));
    Some(v * v.adjoint() + DMatrix::identity(n, n) * Complex64::new(delta, 0.0))
}

/// For a self-adjoint `x` outside the open cone, a positive semidefinite
/// `b` (strictly positive whenever `x` has a negative eigenvalue) with
/// `⟨x, b⟩ ≤ 0`, built from an eigenvector of the smallest eigenvalue.
/// Returns `None` for members.
pub fn exclusion_witness(c: ConeClass, x: &ConeElement) -> Result<Option<ConeElement>> {
    let mem = is_positive(c, x)?;
    if mem.member {
        return Ok(None);
    }
    if let Certificate::NotSelfAdjoint { .. } = mem.certificate {
        return Err(Error::InvalidInput(
            "exclusion witness needs a self-adjoint element".into(),
        ));
    }
    Ok(match x {
        ConeElement::Real(m) => real_witness(m).map(|(w, _)| ConeElement::Real(w)),
        ConeElement::Complex(m) => complex_witness(m).map(ConeElement::Complex),
        ConeElement::Quaternion { a, b } => {
            // The witness is rebuilt from both embedded eigenvectors, which
            // keeps it in the image of the embedding.
            let e = quaternion_embedding(a, b);
            let w = complex_witness(&e).map(|w| {
                let n = a.nrows();
                let j = quaternion_embedding(&DMatrix::zeros(n, n), &DMatrix::identity(n, n));
                let wj = &j * w.map(|z| z.conj()) * j.adjoint();
                (w + wj) * Complex64::new(0.5, 0.0)
            });
            w.map(|w| {
                let n = a.nrows();
                ConeElement::Quaternion {
                    a: w.view((0, 0), (n, n)).into_owned(),
                    b: w.view((0, n), (n, n)).into_owned(),
                }
            })
        }
        ConeElement::Paracomplex(m) => {
            let (p, q) = m.to_canonical();
            let n = p.nrows();
            let eye = DMatrix::identity(n, n);
            let (wp, wq) = match (real_witness(&p), real_witness(&q)) {
                (Some((w, lmin)), _) => (w, eye * (lmin.abs() / (4.0 * (1.0 + q.trace().abs())))),
                (None, Some((w, lmin))) => {
                    (eye * (lmin.abs() / (4.0 * (1.0 + p.trace().abs()))), w)
                }
                (None, None) => return Ok(None),
            };
            Some(ConeElement::Paracomplex(ParaMatrix::from_canonical(
                &wp, &wq,
            )?))
        }
        ConeElement::Measure(mu) => {
            let (i, wmin) = mu
                .weights
                .iter()
                .copied()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or_else(|| Error::InvalidInput("empty measure".into()))?;
            let total: f64 = mu.weights.iter().map(|w| w.abs()).sum();
            let delta = if wmin == 0.0 {
                0.0
            } else {
                wmin.abs() / (4.0 * (1.0 + total))
            };
            let mut w = vec![delta; mu.len()];
            w[i] += 1.0;
            Some(ConeElement::Measure(SignedMeasure { weights: w }))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Para64;
    use crate::cones::measure_pair_embed;

    fn real(n: usize, xs: &[f64]) -> ConeElement {
        ConeElement::Real(DMatrix::from_row_slice(n, n, xs))
    }

    #[test]
    fn real_two_by_two() {
        let m = is_positive(ConeClass::RealPd(2), &real(2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        assert!(m.member);
        let Certificate::Eigenvalues(ev) = m.certificate else {
            panic!()
        };
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);

        let m = is_positive(ConeClass::RealPd(2), &real(2, &[1.0, 2.0, 2.0, 1.0])).unwrap();
        assert!(!m.member);

        let m = is_positive(ConeClass::RealPd(2), &real(2, &[2.0, 1.0, 0.0, 2.0])).unwrap();
        assert!(!m.member);
        assert!(matches!(m.certificate, Certificate::NotSelfAdjoint { .. }));

        assert!(is_positive(ConeClass::RealPd(3), &real(2, &[1.0, 0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn identity_in_every_class() {
        for c in [
            ConeClass::RealPd(3),
            ConeClass::ComplexPd(3),
            ConeClass::QuaternionPd(2),
            ConeClass::ParacomplexPd(3),
            ConeClass::Measure(4),
        ] {
            assert!(is_positive(c, &c.identity()).unwrap().member, "{c}");
            let neg = match c.identity() {
                ConeElement::Real(m) => ConeElement::Real(-m),
                ConeElement::Complex(m) => ConeElement::Complex(-m),
                ConeElement::Quaternion { a, b } => ConeElement::Quaternion { a: -a, b },
                ConeElement::Paracomplex(m) => {
                    let (p, q) = m.to_canonical();
                    ConeElement::Paracomplex(ParaMatrix::from_canonical(&-p, &-q).unwrap())
                }
                ConeElement::Measure(mu) => ConeElement::Measure(SignedMeasure {
                    weights: mu.weights.iter().map(|w| -w).collect(),
                }),
            };
            // The paracomplex identity is (I, I) in canonical coordinates.
            let n = match c {
                ConeClass::ParacomplexPd(k) => 2.0 * k as f64,
                _ => c.size() as f64,
            };
            assert_eq!(pairing(&neg, &c.identity()).unwrap(), -n, "{c}");
            let w = exclusion_witness(c, &neg).unwrap().unwrap();
            assert!(is_positive(c, &w).unwrap().member);
            assert!(pairing(&neg, &w).unwrap() < 0.0);
        }
    }

    #[test]
    fn paracomplex_diagonal_with_zero_component() {
        let d = ParaMatrix::diagonal(&[Para64::new(1.0, 1.0), Para64::new(1.0, -1.0)]);
        let (p, q) = d.to_canonical();
        assert_eq!(p, DMatrix::from_diagonal(&nalgebra::dvector![2.0, 0.0]));
        assert_eq!(q, DMatrix::from_diagonal(&nalgebra::dvector![0.0, 2.0]));
        let m = is_positive(ConeClass::ParacomplexPd(2), &ConeElement::Paracomplex(d)).unwrap();
        assert!(!m.member);
        let Certificate::Canonical { plus, minus } = m.certificate else {
            panic!()
        };
        assert_eq!(plus, vec![0.0, 2.0]);
        assert_eq!(minus, vec![0.0, 2.0]);
    }

    #[test]
    fn embedded_measures_are_members() {
        let p = SignedMeasure::new(vec![1.0, 2.0]).unwrap();
        let q = SignedMeasure::new(vec![3.0, 4.0]).unwrap();
        let e = measure_pair_embed(&p, &q).unwrap();
        let m = is_positive(ConeClass::ParacomplexPd(2), &ConeElement::Paracomplex(e)).unwrap();
        assert!(m.member);
    }

    #[test]
    fn complex_and_quaternion_match_realification() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[one * 2.0, i, -i, one * 2.0]);
        let m = is_positive(ConeClass::ComplexPd(2), &ConeElement::Complex(a.clone())).unwrap();
        let Certificate::Eigenvalues(ev) = m.certificate else {
            panic!()
        };
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);

        let b = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                one * 3.0,
                -one * 3.0,
                Complex64::new(0.0, 0.0),
            ],
        );
        let q = ConeElement::Quaternion { a, b };
        let m = is_positive(ConeClass::QuaternionPd(2), &q).unwrap();
        let Certificate::Eigenvalues(ev) = m.certificate else {
            panic!()
        };
        assert_eq!(ev.len(), 4);
        // Quaternion spectra come in pairs.
        assert!((ev[0] - ev[1]).abs() < 1e-12 && (ev[2] - ev[3]).abs() < 1e-12);
        // 2 ∓ √10 by a direct characteristic-polynomial computation.
        assert!((ev[0] - (2.0 - 10f64.sqrt())).abs() < 1e-12);
        assert!((ev[3] - (2.0 + 10f64.sqrt())).abs() < 1e-12);
        assert!(!m.member);
    }

    #[test]
    fn class_names_round_trip() {
        for s in [
            "real-pd:3",
            "complex-pd:2",
            "quaternion-pd:1",
            "paracomplex-pd:4",
            "measure:5",
        ] {
            assert_eq!(s.parse::<ConeClass>().unwrap().to_string(), s);
        }
        assert!("real-pd".parse::<ConeClass>().is_err());
        assert!("octonion-pd:3".parse::<ConeClass>().is_err());
        assert!("measure:0".parse::<ConeClass>().is_err());
    }
}
