use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    exclusion_witness, is_positive, pairing, quaternion_embedding, ConeClass, ConeElement,
    SignedMeasure,
};
use crate::algebra::ParaMatrix;
use crate::error::{Error, Result};

const MEMBER_SHIFT: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ProbeReport {
    pub class: String,
    pub trials: usize,
    pub violations: usize,
    pub seed: u64,
}

/// Generator for trial `t`: one ChaCha stream per trial, so trials can run
/// in any order.
pub fn trial_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    rng
}

fn real_member(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    &g * g.transpose() + DMatrix::identity(n, n) * MEMBER_SHIFT
}

fn complex_member(rng: &mut impl Rng, n: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    &g * g.adjoint() + DMatrix::identity(n, n) * Complex64::new(MEMBER_SHIFT, 0.0)
}

fn quaternion_member(rng: &mut impl Rng, n: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let ga = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let gb = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let g = quaternion_embedding(&ga, &gb);
    let m = &g * g.adjoint() + DMatrix::identity(2 * n, 2 * n) * Complex64::new(MEMBER_SHIFT, 0.0);
    (
        m.view((0, 0), (n, n)).into_owned(),
        m.view((0, n), (n, n)).into_owned(),
    )
}

/// A random member of the open cone.
pub fn random_member(c: ConeClass, rng: &mut impl Rng) -> Result<ConeElement> {
    let n = c.size();
    Ok(match c {
        ConeClass::RealPd(_) => ConeElement::Real(real_member(rng, n)),
        ConeClass::ComplexPd(_) => ConeElement::Complex(complex_member(rng, n)),
        ConeClass::QuaternionPd(_) => {
            let (a, b) = quaternion_member(rng, n);
            ConeElement::Quaternion { a, b }
        }
        ConeClass::ParacomplexPd(_) => {
            let p = real_member(rng, n);
            let q = real_member(rng, n);
            ConeElement::Paracomplex(ParaMatrix::from_canonical(&p, &q)?)
        }
        ConeClass::Measure(_) => ConeElement::Measure(SignedMeasure {
            weights: (0..n).map(|_| rng.random_range(0.01..1.0)).collect(),
        }),
    })
}

fn push_out_real(m: &DMatrix<f64>, s: f64) -> DMatrix<f64> {
    let lmin = SymmetricEigen::new(m.clone()).eigenvalues.min();
    m - DMatrix::identity(m.nrows(), m.nrows()) * (lmin + s)
}

/// A random self-adjoint element with smallest eigenvalue (or weight)
/// negative.
pub fn random_exterior(c: ConeClass, rng: &mut impl Rng) -> Result<ConeElement> {
    let s: f64 = rng.random_range(0.01..1.0);
    let base = random_member(c, rng)?;
    Ok(match base {
        ConeElement::Real(m) => ConeElement::Real(push_out_real(&m, s)),
        ConeElement::Complex(m) => {
            let lmin = SymmetricEigen::new(m.clone()).eigenvalues.min();
            let n = m.nrows();
            ConeElement::Complex(m - DMatrix::identity(n, n) * Complex64::new(lmin + s, 0.0))
        }
        ConeElement::Quaternion { a, b } => {
            let lmin = SymmetricEigen::new(quaternion_embedding(&a, &b))
                .eigenvalues
                .min();
            let n = a.nrows();
            ConeElement::Quaternion {
                a: a - DMatrix::identity(n, n) * Complex64::new(lmin + s, 0.0),
                b,
            }
        }
        ConeElement::Paracomplex(m) => {
            let (p, q) = m.to_canonical();
            let (p, q) = match rng.random_range(0..3) {
                0 => (push_out_real(&p, s), q),
                1 => (p, push_out_real(&q, s)),
                _ => (push_out_real(&p, s), push_out_real(&q, s)),
            };
            ConeElement::Paracomplex(ParaMatrix::from_canonical(&p, &q)?)
        }
        ConeElement::Measure(mut mu) => {
            let i = rng.random_range(0..mu.len());
            mu.weights[i] = -s;
            ConeElement::Measure(mu)
        }
    })
}

fn trial_violations(c: ConeClass, seed: u64, t: usize) -> Result<usize> {
    let mut rng = trial_rng(seed, t);
    let a = random_member(c, &mut rng)?;
    let b = random_member(c, &mut rng)?;
    let x = random_exterior(c, &mut rng)?;
    let mut v = 0;
    if !is_positive(c, &a)?.member || !is_positive(c, &b)?.member {
        v += 1;
    }
    if pairing(&a, &b)? <= 0.0 {
        v += 1;
    }
    if is_positive(c, &x)?.member {
        v += 1;
    }
    match exclusion_witness(c, &x)? {
        Some(w) if is_positive(c, &w)?.member && pairing(&x, &w)? < 0.0 => {}
        _ => v += 1,
    }
    Ok(v)
}

/// Samples member pairs `(a, b)` and checks `⟨a, b⟩ > 0`; samples exterior
/// points `x` and checks that a member `w` with `⟨x, w⟩ < 0` exists. Each
/// failed check counts as one violation.
pub fn self_duality_probe(c: ConeClass, trials: usize, seed: u64) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let per_trial: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| trial_violations(c, seed, t))
        .collect::<Result<_>>()?;
    Ok(ProbeReport {
        class: c.to_string(),
        trials,
        violations: per_trial.iter().sum(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probes_are_clean_and_deterministic() {
        for c in [
            ConeClass::RealPd(3),
            ConeClass::ComplexPd(2),
            ConeClass::QuaternionPd(2),
            ConeClass::ParacomplexPd(3),
            ConeClass::Measure(5),
        ] {
            let r = self_duality_probe(c, 200, 7).unwrap();
            assert_eq!(r.violations, 0, "{c}");
            assert_eq!(r, self_duality_probe(c, 200, 7).unwrap());
        }
        assert!(self_duality_probe(ConeClass::RealPd(2), 0, 1).is_err());
    }

    #[test]
    fn json_record() {
        let r = self_duality_probe(ConeClass::Measure(3), 10, 42).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"class":"measure:3","trials":10,"violations":0,"seed":42}"#
        );
        assert_eq!(serde_json::from_str::<ProbeReport>(&s).unwrap(), r);
    }
}
