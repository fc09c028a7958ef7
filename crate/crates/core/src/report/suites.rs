use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CaseRecord, Relation, Report, SuiteConfig};
use crate::algebra::{
    adapted_to_paraholomorphic, cauchy_riemann_residual, eigensplit, idempotents,
    paraholomorphic_to_adapted, Para64, Paracomplex, StructureConstants,
};
use crate::cones::{
    hahn_jordan, is_positive, measure_pair_embed, self_duality_probe, ConeClass, ConeElement,
    SignedMeasure,
};
use crate::error::{Error, Result};
use crate::frobenius::{symmetry_residual, FrobeniusData};
use crate::geometry::{
    alpha_connection, conjugacy_residual, curvature_residual, totally_geodesic_check,
    AffineSubspace, AlphaConnection, AlphaConnectionExpectation, ConnectionField, FisherMetric,
    LeafFamily, ParaModelManifold,
};
use crate::jordan::{
    herm_coords, jordan_from_associative, para_herm_coords, peirce_decompose_family,
    peirce_projections, peirce_rules, sym_coords, sym_matrix, AssociativeAlgebra, JordanAlgebra,
    Model,
};
use crate::statmanifold::FiniteExpFamily;

/// Suite names accepted by [`run_suite`], in report order.
pub const SUITES: [&str; 6] = [
    "algebra",
    "jordan",
    "cones",
    "statman",
    "geometry",
    "frobenius",
];

type Check = Box<dyn Fn(&mut ChaCha8Rng) -> Result<f64> + Send + Sync>;

struct Case {
    id: String,
    description: String,
    relation: Relation,
    tolerance: f64,
    check: Check,
}

fn case(
    id: impl Into<String>,
    description: impl Into<String>,
    relation: Relation,
    tolerance: f64,
    check: impl Fn(&mut ChaCha8Rng) -> Result<f64> + Send + Sync + 'static,
) -> Case {
    Case {
        id: id.into(),
        description: description.into(),
        relation,
        tolerance,
        check: Box::new(check),
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// The generator handed to case `id`: independent of every other case.
fn case_rng(seed: u64, id: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(id));
    rng
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, r: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-r..r))
}

fn uniform_matrix(rng: &mut ChaCha8Rng, n: usize, r: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-r..r))
}

fn maxed(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    values.into_iter().try_fold(0.0_f64, |m, v| Ok(m.max(v?)))
}

/// Runs suite `name` (one of [`SUITES`] or `"all"`), and writes the report
/// to `config.output` when set.
pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<Report> {
    let start = Instant::now();
    let mut report = match name {
        "all" => {
            let parts: Vec<Vec<CaseRecord>> = SUITES
                .par_iter()
                .map(|s| execute(cases_for(s, config)?, config.seed))
                .collect::<Result<_>>()?;
            Report::new("all", config.seed, parts.concat())
        }
        _ => Report::new(
            name,
            config.seed,
            execute(cases_for(name, config)?, config.seed)?,
        ),
    };
    report.timing.wall_time_s = start.elapsed().as_secs_f64();
    if let Some(path) = &config.output {
        std::fs::write(path, super::emit_table(&report, config.format)?)?;
    }
    Ok(report)
}

fn cases_for(name: &str, cfg: &SuiteConfig) -> Result<Vec<Case>> {
    Ok(match name {
        "algebra" => algebra_cases(cfg),
        "jordan" => jordan_cases(cfg),
        "cones" => cones_cases(cfg),
        "statman" => statman_cases(cfg),
        "geometry" => geometry_cases(cfg),
        "frobenius" => frobenius_cases(cfg),
        _ => return Err(Error::UnknownSuite(name.to_string())),
    })
}

fn execute(cases: Vec<Case>, seed: u64) -> Result<Vec<CaseRecord>> {
    Ok(cases
        .par_iter()
        .map(|c| {
            let mut rng = case_rng(seed, &c.id);
            let outcome = (c.check)(&mut rng);
            CaseRecord::new(
                c.id.clone(),
                c.description.clone(),
                outcome,
                c.relation,
                c.tolerance,
            )
        })
        .collect())
}

fn algebra_cases(cfg: &SuiteConfig) -> Vec<Case> {
    use Relation::*;
    let laws = cfg.tol("algebra.laws");
    let h = cfg.fd("cauchy_riemann");
    vec![
        case(
            "algebra.exact_laws",
            "ε² = 1, e±² = e±, e₊e₋ = 0, e₊ + e₋ = 1, e₊ − e₋ = ε in rationals; count of failures",
            AtMost,
            0.0,
            |_| {
                type Q = Paracomplex<Rational64>;
                let (one, eps, ep, em) = (Q::one(), Q::epsilon(), Q::e_plus(), Q::e_minus());
                let checks = [
                    eps * eps == one,
                    ep * ep == ep,
                    em * em == em,
                    ep * em == Q::zero(),
                    ep + em == one,
                    ep - em == eps,
                ];
                Ok(checks.iter().filter(|ok| !**ok).count() as f64)
            },
        ),
        case(
            "algebra.canonical_isomorphism",
            "ℝ⊕ℝ isomorphism over 10³ random pairs: |can(ab) − can(a)·can(b)|",
            AtMost,
            laws,
            |rng| {
                let mut worst: f64 = 0.0;
                for _ in 0..1000 {
                    let a = Para64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                    let b = Para64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                    let (p, m) = (a * b).to_canonical();
                    let (ap, am) = a.to_canonical();
                    let (bp, bm) = b.to_canonical();
                    worst = worst.max((p - ap * bp).abs()).max((m - am * bm).abs());
                    let back = Para64::from_canonical(ap, am);
                    worst = worst.max((back - a).abs_max());
                }
                Ok(worst)
            },
        ),
        case(
            "algebra.ring_laws",
            "associativity and commutativity over 10³ random triples",
            AtMost,
            laws,
            |rng| {
                let mut worst: f64 = 0.0;
                let mut draw =
                    || Para64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                for _ in 0..1000 {
                    let (a, b, c) = (draw(), draw(), draw());
                    worst = worst
                        .max(((a * b) * c - a * (b * c)).abs_max())
                        .max((a * b - b * a).abs_max());
                }
                Ok(worst)
            },
        ),
        case(
            "algebra.eigensplit",
            "v₊ + v₋ = v, Kv± = ±v± for 10³ random involutions, m ≤ 8",
            AtMost,
            cfg.tol("algebra.eigensplit"),
            |rng| {
                let mut worst: f64 = 0.0;
                for _ in 0..1000 {
                    let m = rng.random_range(1..=8);
                    let k = random_involution(rng, m);
                    let v = uniform(rng, 2 * m, 1.0);
                    let (p, q) = eigensplit(&k, &v)?;
                    worst = worst
                        .max((&p + &q - &v).amax())
                        .max((&k * &p - &p).amax())
                        .max((&k * &q + &q).amax());
                }
                Ok(worst)
            },
        ),
        case(
            "algebra.idempotents",
            "paracomplex idempotents are {1, e₊, e₋}: worst |a² − a| plus count mismatch",
            AtMost,
            cfg.tol("algebra.idempotent"),
            |_| {
                let sc = StructureConstants::paracomplex();
                let found = idempotents(&sc)?;
                let mut worst: f64 = (found.len() as f64 - 3.0).abs();
                for a in &found {
                    let a2 = sc.product(a, a);
                    worst = worst.max(
                        a2.iter()
                            .zip(a)
                            .map(|(x, y)| (x - y).abs())
                            .fold(0.0, f64::max),
                    );
                }
                for target in [[1.0, 0.0], [0.5, 0.5], [0.5, -0.5]] {
                    if !found
                        .iter()
                        .any(|a| (a[0] - target[0]).abs() + (a[1] - target[1]).abs() < 1e-12)
                    {
                        worst = worst.max(1.0);
                    }
                }
                Ok(worst)
            },
        ),
        case(
            "algebra.adapted_round_trip",
            "adapted ↔ paraholomorphic coordinates over random vectors",
            AtMost,
            cfg.tol("algebra.adapted"),
            |rng| {
                let mut worst: f64 = 0.0;
                for _ in 0..100 {
                    let m = rng.random_range(1..=6);
                    let zp: Vec<f64> = uniform(rng, m, 1.0).iter().copied().collect();
                    let zm: Vec<f64> = uniform(rng, m, 1.0).iter().copied().collect();
                    let z = adapted_to_paraholomorphic(&zp, &zm)?;
                    let (p, q) = paraholomorphic_to_adapted(&z);
                    for i in 0..m {
                        let (cp, cm) = z[i].to_canonical();
                        worst = worst
                            .max((p[i] - zp[i]).abs())
                            .max((q[i] - zm[i]).abs())
                            .max((cp - zp[i]).abs())
                            .max((cm - zm[i]).abs());
                    }
                }
                Ok(worst)
            },
        ),
        case(
            "algebra.cauchy_riemann_square",
            "f(z) = z² is paraholomorphic: residual at random points",
            AtMost,
            cfg.tol("algebra.cauchy_riemann"),
            move |rng| {
                let sq = |p: &[f64]| {
                    let z = Para64::new(p[0], p[1]);
                    let w = z * z;
                    vec![w.x, w.y]
                };
                Ok((0..10)
                    .map(|_| cauchy_riemann_residual(sq, uniform(rng, 2, 2.0).as_slice(), h))
                    .fold(0.0, f64::max))
            },
        ),
        case(
            "algebra.cauchy_riemann_identity",
            "identity map is 𝔄-linear: residual",
            AtMost,
            cfg.tol("algebra.cauchy_riemann_linear"),
            move |_| {
                Ok(cauchy_riemann_residual(
                    |p: &[f64]| p.to_vec(),
                    &[0.3, -1.2],
                    h,
                ))
            },
        ),
        case(
            "algebra.cauchy_riemann_projection",
            "f(x + εy) = x is not paraholomorphic: residual at (1, 1)",
            AtLeast,
            cfg.tol("algebra.cauchy_riemann_violation"),
            move |_| {
                Ok(cauchy_riemann_residual(
                    |p: &[f64]| vec![p[0], 0.0],
                    &[1.0, 1.0],
                    h,
                ))
            },
        ),
    ]
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    uniform_matrix(rng, n, 1.0).qr().q()
}

/// `K = P diag(I_m, −I_m) P⁻¹` with `P = Q (I + U)`, `U` small strictly upper
/// triangular.
fn random_involution(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<f64> {
    let n = 2 * m;
    let q = random_orthogonal(rng, n);
    let u = DMatrix::from_fn(n, n, |i, j| {
        if j > i {
            rng.random_range(-0.3..0.3)
        } else {
            0.0
        }
    });
    let p = q * (DMatrix::identity(n, n) + u);
    let pinv = p
        .clone()
        .try_inverse()
        .expect("unit upper triangular times orthogonal");
    let d = DMatrix::from_fn(n, n, |i, j| match (i == j, i < m) {
        (true, true) => 1.0,
        (true, false) => -1.0,
        _ => 0.0,
    });
    p * d * pinv
}

/// A random idempotent of `j` that is neither 0 nor the unit when the
/// model allows it.
fn random_idempotent(j: &JordanAlgebra, rng: &mut ChaCha8Rng) -> DVector<f64> {
    match j.model() {
        Model::Symmetric(n) => {
            let q = random_orthogonal(rng, n);
            let r = rng.random_range(1..n.max(2)).min(n);
            let cols = q.columns(0, r);
            sym_coords(&(cols * cols.transpose()))
        }
        Model::HermitianComplex(n) => {
            let g = DMatrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let q = g.qr().q();
            let r = rng.random_range(1..n.max(2)).min(n);
            let cols = q.columns(0, r);
            herm_coords(&(cols * cols.adjoint()))
        }
        Model::HermitianParacomplex(n) => {
            // Oblique projector X = S D S⁻¹; the element is X e₊ + Xᵀ e₋.
            let s = DMatrix::identity(n, n) + uniform_matrix(rng, n, 0.3);
            let sinv = s.clone().try_inverse().expect("near identity");
            let r = rng.random_range(1..n.max(2)).min(n);
            let d = DMatrix::from_fn(n, n, |i, k| if i == k && i < r { 1.0 } else { 0.0 });
            para_herm_coords(&(s * d * sinv))
        }
        Model::SpinFactor(n) => {
            let v = uniform(rng, n, 1.0).normalize();
            let mut a = DVector::zeros(n + 1);
            a[0] = 0.5;
            a.rows_mut(1, n).copy_from(&(v * 0.5));
            a
        }
        Model::Table => j.unit().expect("unital table"),
    }
}

fn jordan_models() -> Vec<(&'static str, JordanAlgebra)> {
    vec![
        ("sym2", JordanAlgebra::symmetric(2)),
        ("sym3", JordanAlgebra::symmetric(3)),
        ("sym4", JordanAlgebra::symmetric(4)),
        ("herm2", JordanAlgebra::hermitian_complex(2)),
        ("para1", JordanAlgebra::hermitian_paracomplex(1)),
        ("para2", JordanAlgebra::hermitian_paracomplex(2)),
        ("para3", JordanAlgebra::hermitian_paracomplex(3)),
        ("spin3", JordanAlgebra::spin_factor(3)),
        (
            "paracomplex",
            JordanAlgebra::from_structure(&StructureConstants::paracomplex()),
        ),
    ]
}

fn jordan_cases(cfg: &SuiteConfig) -> Vec<Case> {
    use Relation::*;
    let mut out = Vec::new();
    for (name, j) in jordan_models() {
        let j1 = j.clone();
        out.push(case(
            format!("jordan.identity.{name}"),
            "Jordan identity x•(x²•y) = x²•(x•y) on 10³ random pairs",
            AtMost,
            cfg.tol("jordan.identity"),
            move |rng| Ok(j1.jordan_identity_residual(1000, rng.random())),
        ));
        let j2 = j.clone();
        out.push(case(
            format!("jordan.peirce.{name}"),
            "E₂+E₁+E₀ = I, EᵢEⱼ = δᵢⱼEᵢ, L_a = 1, ½, 0 on the ranges, 5 random idempotents",
            AtMost,
            cfg.tol("jordan.peirce"),
            move |rng| {
                maxed((0..5).map(|_| {
                    let a = random_idempotent(&j2, rng);
                    let dec = peirce_projections(&j2, &a)?;
                    Ok(dec
                        .completeness_residual()
                        .max(dec.orthogonality_residual())
                        .max(dec.eigen_residual(&j2)))
                }))
            },
        ));
        let j3 = j.clone();
        out.push(case(
            format!("jordan.reflection.{name}"),
            "U = E₂ − E₁ + E₀: U² = I and U(x•y) = Ux•Uy on random pairs",
            AtMost,
            cfg.tol("jordan.reflection"),
            move |rng| {
                let d = j3.dim();
                maxed((0..5).map(|_| {
                    let a = random_idempotent(&j3, rng);
                    let u = peirce_projections(&j3, &a)?.reflection();
                    let mut worst = (&u * &u - DMatrix::identity(d, d)).amax();
                    for _ in 0..20 {
                        let x = uniform(rng, d, 1.0);
                        let y = uniform(rng, d, 1.0);
                        let lhs = &u * j3.product(&x, &y);
                        let rhs = j3.product(&(&u * &x), &(&u * &y));
                        worst = worst.max((lhs - rhs).amax());
                    }
                    // Same map as the quadratic representation of 2a − 1.
                    let unit = j3.unit().ok_or(Error::NoUnit)?;
                    let qr = j3.quadratic_representation(&(&a * 2.0 - unit));
                    Ok(worst.max((qr - u).amax()))
                }))
            },
        ));
        let j4 = j;
        out.push(case(
            format!("jordan.rules.{name}"),
            "Peirce multiplication rules, J₂•J₀ = 0 included",
            AtMost,
            cfg.tol("jordan.rules"),
            move |rng| {
                maxed((0..5).map(|_| {
                    let a = random_idempotent(&j4, rng);
                    Ok(peirce_rules(&j4, &peirce_projections(&j4, &a)?).max())
                }))
            },
        ));
    }
    out.push(case(
        "jordan.example.sym2_reflection",
        "Sym₂(ℝ), a = diag(1,0): U[[1,2],[2,3]] = [[1,−2],[−2,3]]",
        AtMost,
        cfg.tol("jordan.reflection"),
        |_| {
            let j = JordanAlgebra::symmetric(2);
            let a = sym_coords(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
            let m = sym_coords(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]));
            let um = peirce_projections(&j, &a)?.reflection() * m;
            let want = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, -2.0, 3.0]);
            Ok((sym_matrix(2, um.as_slice()) - want).amax())
        },
    ));
    out.push(case(
        "jordan.example.family_dims",
        "Peirce family dimensions: 𝔄 with (e₊, e₋) → (1, 0, 1), Sym₂ with (E₁₁, E₂₂) → (1, 1, 1); count of mismatches",
        AtMost,
        0.0,
        |_| {
            let p = JordanAlgebra::from_structure(&StructureConstants::paracomplex());
            let fp = peirce_decompose_family(
                &p,
                &[DVector::from_vec(vec![0.5, 0.5]), DVector::from_vec(vec![0.5, -0.5])],
            )?;
            let s = JordanAlgebra::symmetric(2);
            let fs = peirce_decompose_family(
                &s,
                &[DVector::from_vec(vec![1.0, 0.0, 0.0]), DVector::from_vec(vec![0.0, 0.0, 1.0])],
            )?;
            let got = [
                fp.dims()[&(0, 0)],
                fp.dims()[&(0, 1)],
                fp.dims()[&(1, 1)],
                fs.dims()[&(0, 0)],
                fs.dims()[&(0, 1)],
                fs.dims()[&(1, 1)],
            ];
            let want = [1, 0, 1, 1, 1, 1];
            Ok(got.iter().zip(&want).filter(|(a, b)| a != b).count() as f64)
        },
    ));
    out.push(case(
        "jordan.example.full_matrix",
        "Jordanized M₂(ℝ): E₁₁•E₁₂ = ½E₁₂ and Jordan identity",
        AtMost,
        cfg.tol("jordan.identity"),
        |rng| {
            let j = jordan_from_associative(&AssociativeAlgebra::full_matrix(2))?;
            let e = |i: usize| DVector::from_fn(4, |k, _| if k == i { 1.0 } else { 0.0 });
            let p = j.product(&e(0), &e(1));
            Ok((p - e(1) * 0.5)
                .amax()
                .max(j.jordan_identity_residual(1000, rng.random())))
        },
    ));
    out
}

/// Integer-valued weights in eighths, so every partial sum is exact.
fn dyadic_measure(rng: &mut ChaCha8Rng, n: usize) -> SignedMeasure {
    SignedMeasure {
        weights: (0..n)
            .map(|_| rng.random_range(-64i32..=64) as f64 / 8.0)
            .collect(),
    }
}

/// Brute force over all `2ⁿ` sets: `μ⁺(Ω) = max_S μ(S)`, `μ⁻(Ω) = −min_S μ(S)`.
fn hahn_jordan_mismatch(mu: &SignedMeasure) -> bool {
    let n = mu.len();
    let (mut best, mut worst) = (0.0_f64, 0.0_f64);
    for mask in 0u32..(1 << n) {
        let s: f64 = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| mu.weights[i])
            .sum();
        best = best.max(s);
        worst = worst.min(s);
    }
    let (p, m) = hahn_jordan(mu);
    let total = |m: &SignedMeasure| m.weights.iter().sum::<f64>();
    let split_ok = p
        .weights
        .iter()
        .zip(&m.weights)
        .zip(&mu.weights)
        .all(|((a, b), w)| a - b == *w && a * b == 0.0 && *a >= 0.0 && *b >= 0.0);
    !(split_ok && total(&p) == best && total(&m) == -worst)
}

fn cones_cases(_cfg: &SuiteConfig) -> Vec<Case> {
    use Relation::*;
    let mut out = vec![
        case(
            "cones.hahn_jordan_bruteforce",
            "Hahn–Jordan split equals the brute-force extremal sets, |Ω| ≤ 8; count of mismatches",
            AtMost,
            0.0,
            |rng| {
                let mut bad = 0;
                for n in 1..=8 {
                    for _ in 0..50 {
                        bad += hahn_jordan_mismatch(&dyadic_measure(rng, n)) as usize;
                    }
                }
                Ok(bad as f64)
            },
        ),
        case(
            "cones.measure_pair_embedding",
            "10³ random strictly positive pairs embed into the paracomplex cone; count rejected",
            AtMost,
            0.0,
            |rng| {
                let mut rejected = 0;
                for _ in 0..1000 {
                    let n = rng.random_range(1..=8);
                    let mut draw = || SignedMeasure {
                        weights: (0..n).map(|_| rng.random_range(1e-3..2.0)).collect(),
                    };
                    let (p, m) = (draw(), draw());
                    let x = ConeElement::Paracomplex(measure_pair_embed(&p, &m)?);
                    if !is_positive(ConeClass::ParacomplexPd(n), &x)?.member {
                        rejected += 1;
                    }
                }
                Ok(rejected as f64)
            },
        ),
        case(
            "cones.boundary_example",
            "diag(1+ε, 1−ε) lies on the boundary, not in the open cone",
            AtMost,
            0.0,
            |_| {
                let m = crate::algebra::ParaMatrix::diagonal(&[
                    Para64::new(1.0, 1.0),
                    Para64::new(1.0, -1.0),
                ]);
                let r = is_positive(ConeClass::ParacomplexPd(2), &ConeElement::Paracomplex(m))?;
                Ok(r.member as u8 as f64)
            },
        ),
    ];
    for class in [
        ConeClass::RealPd(3),
        ConeClass::ComplexPd(2),
        ConeClass::QuaternionPd(2),
        ConeClass::ParacomplexPd(3),
        ConeClass::Measure(5),
    ] {
        out.push(case(
            format!("cones.self_duality.{class}"),
            "self-duality probe, 10³ seeded trials; violations",
            AtMost,
            0.0,
            move |rng| Ok(self_duality_probe(class, 1000, rng.random())?.violations as f64),
        ));
    }
    out
}

fn random_family(rng: &mut ChaCha8Rng) -> FiniteExpFamily {
    loop {
        let k = rng.random_range(3..=5);
        let d = rng.random_range(1..=3.min(k - 1));
        let t = DMatrix::from_fn(k, d, |_, _| rng.random_range(-1.0..1.0));
        let base = DVector::from_fn(k, |_, _| rng.random_range(0.2..2.0));
        if let Ok(f) = FiniteExpFamily::new(t, base) {
            return f;
        }
    }
}

fn test_families() -> Vec<(&'static str, FiniteExpFamily)> {
    let mut v = vec![("bernoulli", FiniteExpFamily::bernoulli())];
    for (name, k) in [("categorical3", 3), ("categorical4", 4)] {
        v.push((name, FiniteExpFamily::categorical(k).expect("k ≥ 2")));
    }
    v
}

fn statman_cases(cfg: &SuiteConfig) -> Vec<Case> {
    use Relation::*;
    let hp = cfg.fd("hessian_product");
    let mut out = Vec::new();
    let mut families: Vec<(String, Option<FiniteExpFamily>)> = test_families()
        .into_iter()
        .map(|(n, f)| (n.to_string(), Some(f)))
        .collect();
    families.push(("categorical5".into(), FiniteExpFamily::categorical(5).ok()));
    families.push(("random".into(), None));
    for (name, fam) in families {
        let pick = move |rng: &mut ChaCha8Rng| fam.clone().unwrap_or_else(|| random_family(rng));
        let p1 = pick.clone();
        out.push(case(
            format!("statman.fisher.{name}"),
            "score covariance vs Hessian of ψ at 20 random θ",
            AtMost,
            cfg.tol("statman.fisher"),
            move |rng| {
                let f = p1(rng);
                maxed((0..20).map(|_| f.fisher_agreement(&uniform(rng, f.d(), 2.0))))
            },
        ));
        let p2 = pick.clone();
        out.push(case(
            format!("statman.dual_basis.{name}"),
            "⟨aⁱ, ∂ⱼℓ⟩ = δⁱⱼ at 20 random θ",
            AtMost,
            cfg.tol("statman.dual_basis"),
            move |rng| {
                let f = p2(rng);
                maxed((0..20).map(|_| f.dual_basis_residual(&uniform(rng, f.d(), 2.0))))
            },
        ));
        let p3 = pick.clone();
        out.push(case(
            format!("statman.score_centering.{name}"),
            "𝔼_θ[∂ℓ] = 0 at 20 random θ",
            AtMost,
            cfg.tol("statman.centering"),
            move |rng| {
                let f = p3(rng);
                maxed((0..20).map(|_| f.score_centering_residual(&uniform(rng, f.d(), 2.0))))
            },
        ));
        let p4 = pick.clone();
        out.push(case(
            format!("statman.legendre_round_trip.{name}"),
            "θ → η → θ at 20 random interior points",
            AtMost,
            cfg.tol("statman.legendre"),
            move |rng| {
                let f = p4(rng);
                maxed((0..20).map(|_| {
                    let th = uniform(rng, f.d(), 2.0);
                    let back = f.legendre_inverse(&f.expectation(&th)?)?;
                    Ok((back - th).amax())
                }))
            },
        ));
        let p5 = pick;
        out.push(case(
            format!("statman.hessian_product.{name}"),
            "Hess ψ(θ) · Hess φ(η) = I, closed form and finite-difference Jacobian, 20 points",
            AtMost,
            cfg.tol("statman.hessian_product"),
            move |rng| {
                let f = p5(rng);
                maxed((0..20).map(|_| {
                    Ok(f.hessian_product_residual(&uniform(rng, f.d(), 2.0), hp)?
                        .max())
                }))
            },
        ));
    }
    out.push(case(
        "statman.example.bernoulli_center",
        "Bernoulli g(0) = ¼",
        AtMost,
        cfg.tol("statman.fisher"),
        |_| {
            Ok(
                (FiniteExpFamily::bernoulli().fisher_metric(&DVector::zeros(1))?[(0, 0)] - 0.25)
                    .abs(),
            )
        },
    ));
    out
}

fn geometry_cases(cfg: &SuiteConfig) -> Vec<Case> {
    use Relation::*;
    let hc = cfg.fd("conjugacy");
    let hr = cfg.fd("curvature");
    let hi = cfg.fd("isometry");
    let dt = cfg.fd("geodesic_dt");
    let mut out = Vec::new();
    for (name, f) in test_families() {
        let f1 = f.clone();
        out.push(case(
            format!("geometry.conjugacy.{name}"),
            "∂g = Γ⁽¹⁾ + Γ⁽⁻¹⁾* in the natural chart at 10 random θ",
            AtMost,
            cfg.tol("geometry.conjugacy"),
            move |rng| {
                let g = FisherMetric(f1.clone());
                let e = AlphaConnection {
                    family: f1.clone(),
                    alpha: 1.0,
                };
                let m = AlphaConnection {
                    family: f1.clone(),
                    alpha: -1.0,
                };
                maxed(
                    (0..10).map(|_| conjugacy_residual(&g, &e, &m, &uniform(rng, f1.d(), 1.0), hc)),
                )
            },
        ));
        let f2 = f.clone();
        out.push(case(
            format!("geometry.flatness.{name}"),
            "curvature of ∇⁽¹⁾ in θ and of ∇⁽⁻¹⁾ in η at 10 random points",
            AtMost,
            cfg.tol("geometry.curvature"),
            move |rng| {
                let e = AlphaConnection {
                    family: f2.clone(),
                    alpha: 1.0,
                };
                let m = AlphaConnectionExpectation {
                    family: f2.clone(),
                    alpha: -1.0,
                };
                maxed((0..10).map(|_| {
                    let th = uniform(rng, f2.d(), 1.0);
                    let eta = f2.expectation(&th)?;
                    Ok(curvature_residual(&e, &th, hr)?.max(curvature_residual(&m, &eta, hr)?))
                }))
            },
        ));
        let f3 = f.clone();
        out.push(case(
            format!("geometry.mirror_involution.{name}"),
            "σ∘σ = id on the doubled model at 20 random points",
            AtMost,
            cfg.tol("geometry.mirror"),
            move |rng| {
                let n = ParaModelManifold::new(f3.clone());
                maxed((0..20).map(|_| n.mirror_involution_residual(&random_model_point(&n, rng)?)))
            },
        ));
        let f4 = f.clone();
        out.push(case(
            format!("geometry.mirror_isometry.{name}"),
            "σ*g = g at 5 random points",
            AtMost,
            cfg.tol("geometry.isometry"),
            move |rng| {
                let n = ParaModelManifold::new(f4.clone());
                maxed((0..5).map(|_| n.mirror_isometry_residual(&random_model_point(&n, rng)?, hi)))
            },
        ));
        let f5 = f.clone();
        out.push(case(
            format!("geometry.mirror_leaf_exchange.{name}"),
            "σ maps each natural leaf into one expectation leaf and back, exactly; count of failures",
            AtMost,
            0.0,
            move |rng| {
                let n = ParaModelManifold::new(f5.clone());
                let mut bad = 0usize;
                for _ in 0..20 {
                    let x = random_model_point(&n, rng)?;
                    for fam in [LeafFamily::Natural, LeafFamily::Expectation] {
                        let label = n.leaf_label(&x, fam)?;
                        let image_label = n.leaf_label(&n.peirce_mirror(&x)?, fam.other())?;
                        for _ in 0..3 {
                            // Another point on the same leaf.
                            let y = move_along_leaf(&n, &x, fam, rng);
                            bad += !n.on_leaf(&y, fam, &label)? as usize;
                            let sy = n.peirce_mirror(&y)?;
                            bad += !n.on_leaf(&sy, fam.other(), &image_label)? as usize;
                        }
                    }
                }
                Ok(bad as f64)
            },
        ));
        let f6 = f.clone();
        out.push(case(
            format!("geometry.leaf_geodesic.{name}"),
            "Levi-Civita geodesics from both leaf families stay in the leaf over t ∈ [0, 1]",
            AtMost,
            cfg.tol("geometry.leaf"),
            move |rng| {
                let n = ParaModelManifold::new(f6.clone());
                let lc = n.connection(0.0, 0.0);
                maxed(
                    (0..2)
                        .flat_map(|_| [LeafFamily::Natural, LeafFamily::Expectation])
                        .map(|fam| {
                            let x = random_model_point(&n, rng)?;
                            let leaf = n.leaf(&x, fam)?;
                            maxed((0..2).map(|_| full_leaf_geodesic(&lc, &leaf, rng, dt)))
                        }),
                )
            },
        ));
        let f9 = f.clone();
        out.push(case(
            format!("geometry.levi_civita.{name}"),
            "α = 0 on both factors agrees with the finite-difference Levi-Civita connection (relative)",
            AtMost,
            cfg.tol("geometry.levi_civita"),
            move |rng| {
                let n = ParaModelManifold::new(f9.clone());
                let lc = n.levi_civita();
                let closed = n.connection(0.0, 0.0);
                maxed((0..5).map(|_| {
                    let x = random_model_point(&n, rng)?;
                    let c = closed.christoffel(&x)?;
                    Ok(lc.christoffel(&x)?.max_abs_diff(&c) / c.max_abs().max(1.0))
                }))
            },
        ));
        let f7 = f.clone();
        out.push(case(
            format!("geometry.affine_subfamily.{name}"),
            "e-geodesics of coordinate subfamilies stay inside: deviation",
            AtMost,
            0.0,
            move |rng| {
                let e = AlphaConnection {
                    family: f7.clone(),
                    alpha: 1.0,
                };
                let d = f7.d();
                maxed((0..d).map(|axis| {
                    let sub = AffineSubspace::coordinate(uniform(rng, d, 1.0), &[axis])?;
                    let starts = vec![(DVector::zeros(1), DVector::from_element(1, 0.7))];
                    Ok(totally_geodesic_check(&e, &sub, &starts, 1.0, dt, 0.0)?.max_deviation)
                }))
            },
        ));
        let f8 = f;
        out.push(case(
            format!("geometry.assembly.{name}"),
            "𝔄-valued symbols assembled with structure constants equal the block connection",
            AtMost,
            cfg.tol("geometry.assembly"),
            move |rng| {
                let n = ParaModelManifold::new(f8.clone());
                maxed(
                    [(1.0, -1.0), (0.0, 0.0), (0.5, -0.25)]
                        .into_iter()
                        .map(|(ap, am)| {
                            let x = random_model_point(&n, rng)?;
                            let a = n.assembled_connection(&x, ap, am)?;
                            let b = n.connection(ap, am).christoffel(&x)?;
                            Ok(a.max_abs_diff(&b))
                        }),
                )
            },
        ));
    }
    out.push(case(
        "geometry.oblique_subfamily",
        "e-geodesics of an oblique affine subfamily of categorical(4) stay inside",
        AtMost,
        cfg.tol("geometry.oblique"),
        move |rng| {
            let f = FiniteExpFamily::categorical(4)?;
            let e = AlphaConnection {
                family: f,
                alpha: 1.0,
            };
            let basis = DMatrix::from_fn(3, 2, |_, _| rng.random_range(-1.0..1.0));
            let sub = AffineSubspace::new(uniform(rng, 3, 0.5), basis)?;
            let starts: Vec<_> = (0..3)
                .map(|_| (uniform(rng, 2, 0.2), uniform(rng, 2, 0.5)))
                .collect();
            Ok(totally_geodesic_check(&e, &sub, &starts, 1.0, dt, 0.0)?.max_deviation)
        },
    ));
    out.push(case(
        "geometry.k_tangency",
        "leaf tangents lie in the ±1 eigenspaces of K",
        AtMost,
        0.0,
        |rng| {
            let n = ParaModelManifold::new(FiniteExpFamily::categorical(3)?);
            n.k_tangency_residual(&random_model_point(&n, rng)?)
        },
    ));
    out.push(case(
        "geometry.natural_connection_symbols",
        "α-connection in θ is ½(1 − α)gᵏˡψ_ijl: ∇⁽¹⁾ vanishes identically",
        AtMost,
        0.0,
        |rng| {
            let f = FiniteExpFamily::categorical(4)?;
            Ok(alpha_connection(&f, 1.0, &uniform(rng, 3, 1.0))?.max_abs())
        },
    ));
    out
}

/// A point `(θ, η)` of the doubled model with `η` the mean of a random θ'.
fn random_model_point(n: &ParaModelManifold, rng: &mut ChaCha8Rng) -> Result<DVector<f64>> {
    let d = n.d();
    let p = uniform(rng, d, 1.0);
    let m = n.family().expectation(&uniform(rng, d, 1.0))?;
    Ok(n.join(&p, &m))
}

/// Deviation of one geodesic that stays in the domain up to `t = 1`; starts
/// that leave earlier are redrawn, and twenty misses are an error.
fn full_leaf_geodesic(
    lc: &impl ConnectionField,
    leaf: &AffineSubspace,
    rng: &mut ChaCha8Rng,
    dt: f64,
) -> Result<f64> {
    let d = leaf.basis.ncols();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let start = [(DVector::zeros(d), uniform(rng, d, 0.3))];
        let r = totally_geodesic_check(lc, leaf, &start, 1.0, dt, f64::INFINITY)?;
        worst = worst.max(r.max_deviation);
        if r.truncated == 0 {
            return Ok(worst);
        }
    }
    Err(Error::InvalidInput(
        "geodesic left the domain before t = 1 for 20 starts".into(),
    ))
}

fn move_along_leaf(
    n: &ParaModelManifold,
    x: &DVector<f64>,
    fam: LeafFamily,
    rng: &mut ChaCha8Rng,
) -> DVector<f64> {
    let d = n.d();
    let (p, m) = n.split(x).expect("model point");
    let fresh = uniform(rng, d, 1.0);
    match fam {
        LeafFamily::Natural => n.join(&fresh, &m),
        LeafFamily::Expectation => {
            let eta = n.family().expectation(&fresh).expect("finite θ");
            n.join(&p, &eta)
        }
    }
}

fn frobenius_cases(cfg: &SuiteConfig) -> Vec<Case> {
    use Relation::*;
    let hp = cfg.fd("pencil");
    let wdvv = cfg.tol("frobenius.wdvv");
    let violation = cfg.tol("frobenius.violation");
    let fixture = || FrobeniusData::fixture("wdvv3");
    let perturbed = || FrobeniusData::fixture("wdvv3-perturbed");
    let mut out = vec![
        case(
            "frobenius.wdvv.two_dim_random",
            "WDVV for 20 random unital potentials in two variables, 3 points each",
            AtMost,
            wdvv,
            |rng| {
                maxed((0..20).flat_map(|_| {
                    let d = FrobeniusData::random_two_dim(rng.random());
                    let pts: Vec<_> = (0..3).map(|_| uniform(rng, 2, 1.0)).collect();
                    pts.into_iter()
                        .map(move |t| Ok(d.wdvv_residual(&t)?.max(d.associativity_residual(&t)?)))
                        .collect::<Vec<_>>()
                }))
            },
        ),
        case(
            "frobenius.wdvv.fixture",
            "WDVV for the three-variable fixture at 10 random points",
            AtMost,
            wdvv,
            move |rng| {
                let d = fixture()?;
                let pts: Vec<_> = (0..10).map(|_| uniform(rng, 3, 1.0)).collect();
                maxed(d.wdvv_sweep(&pts)?.into_iter().map(Ok))
            },
        ),
        case(
            "frobenius.associativity.fixture",
            "(eᵢ∘eⱼ)∘eₖ = eᵢ∘(eⱼ∘eₖ) for the fixture at 10 random points",
            AtMost,
            wdvv,
            move |rng| {
                let d = fixture()?;
                maxed((0..10).map(|_| d.associativity_residual(&uniform(rng, 3, 1.0))))
            },
        ),
        case(
            "frobenius.unit.fixture",
            "∂₁ is the unit of ∘ for the fixture",
            AtMost,
            cfg.tol("frobenius.unit"),
            move |rng| {
                let d = fixture()?;
                maxed((0..10).map(|_| d.unit_residual(&uniform(rng, 3, 1.0))))
            },
        ),
        case(
            "frobenius.unit.cubic1",
            "Φ = t³/6, g = 1 gives ∘ = 1",
            AtMost,
            cfg.tol("frobenius.unit"),
            |rng| {
                let d = FrobeniusData::fixture("cubic1")?;
                Ok((d.product(&uniform(rng, 1, 1.0))?.get(0, 0, 0) - 1.0).abs())
            },
        ),
        case(
            "frobenius.pairing",
            "g(X∘Y, Z) = g(X, Y∘Z) for random X, Y, Z on both fixtures",
            AtMost,
            cfg.tol("frobenius.pairing"),
            move |rng| {
                let mut worst: f64 = 0.0;
                for d in [fixture()?, perturbed()?] {
                    for _ in 0..10 {
                        let v: Vec<_> = (0..4).map(|_| uniform(rng, 3, 1.0)).collect();
                        worst = worst.max(d.pairing_residual(&v[0], &v[1], &v[2], &v[3])?);
                    }
                }
                Ok(worst)
            },
        ),
        case(
            "frobenius.symmetry",
            "Φ_ijk symmetric under index permutations (closed form)",
            AtMost,
            cfg.tol("frobenius.symmetry"),
            move |rng| {
                let d = perturbed()?;
                Ok(symmetry_residual(d.potential(), &uniform(rng, 3, 1.0)))
            },
        ),
        case(
            "frobenius.contraction.categorical3",
            "Φ = ψ with frozen g: ∘ᵏᵢⱼ = gᵏˡψ_ijl at θ₀",
            AtMost,
            cfg.tol("frobenius.contraction"),
            |rng| {
                let f = FiniteExpFamily::categorical(3)?;
                let th = uniform(rng, 2, 1.0);
                let d = FrobeniusData::from_family(&f, &th)?;
                let p = d.product(&th)?;
                let q = alpha_connection(&f, -1.0, &th)?;
                // ½(1 − α) = 1 at α = −1.
                Ok(p.max_abs_diff(&q))
            },
        ),
        case(
            "frobenius.pencil.lambda_zero",
            "∇₀ is flat",
            AtMost,
            0.0,
            move |rng| fixture()?.pencil_flatness(0.0, &uniform(rng, 3, 1.0), hp),
        ),
        case(
            "frobenius.wdvv.perturbed",
            "perturbed potential Φ + t₁t₂t₃² violates WDVV at 10 random points (smallest residual)",
            Above,
            violation,
            move |rng| {
                let d = perturbed()?;
                let pts: Vec<_> = (0..10).map(|_| uniform(rng, 3, 1.0)).collect();
                Ok(d.wdvv_sweep(&pts)?.into_iter().fold(f64::INFINITY, f64::min))
            },
        ),
        case(
            "frobenius.associativity.perturbed",
            "perturbed potential: ∘ is not associative at (0.3, −0.7, 0.5)",
            Above,
            violation,
            move |_| perturbed()?.associativity_residual(&DVector::from_vec(vec![0.3, -0.7, 0.5])),
        ),
        case(
            "frobenius.pencil.perturbed",
            "perturbed potential: ∇₁ is curved at (0.3, −0.7, 0.5)",
            Above,
            violation,
            move |_| perturbed()?.pencil_flatness(1.0, &DVector::from_vec(vec![0.3, -0.7, 0.5]), hp),
        ),
        case(
            "frobenius.equivalence",
            "WDVV and associativity pass or fail together on fixtures, perturbations and random potentials; disagreements",
            AtMost,
            0.0,
            move |rng| {
                let mut data = vec![fixture()?, perturbed()?, FrobeniusData::fixture("cubic1")?];
                for s in 0..5 {
                    data.push(FrobeniusData::random_two_dim(rng.random::<u64>() ^ s));
                }
                let mut bad = 0usize;
                for d in &data {
                    for _ in 0..5 {
                        let t = uniform(rng, d.dim(), 1.0);
                        let w = d.wdvv_residual(&t)? <= wdvv;
                        let a = d.associativity_residual(&t)? <= wdvv;
                        bad += (w != a) as usize;
                    }
                }
                Ok(bad as f64)
            },
        ),
    ];
    for lambda in [1.0, -1.0, 0.5, -0.5] {
        out.push(case(
            format!("frobenius.pencil.fixture.{lambda}"),
            "structure-connection pencil is flat on the fixture at 5 random points",
            AtMost,
            cfg.tol("frobenius.pencil"),
            move |rng| {
                let d = fixture()?;
                let cases: Vec<_> = (0..5).map(|_| (lambda, uniform(rng, 3, 1.0))).collect();
                maxed(d.pencil_sweep(&cases, hp)?.into_iter().map(Ok))
            },
        ));
    }
    out
}
