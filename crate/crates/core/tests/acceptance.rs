//! End-to-end acceptance criteria. Runs without the libtest harness so every
//! criterion prints exactly one line, even when `cargo test` captures output.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use paraflat::algebra::{eigensplit, Para64, Paracomplex};
use paraflat::cones::{
    hahn_jordan, is_positive, measure_pair_embed, self_duality_probe, ConeClass, ConeElement,
    SignedMeasure,
};
use paraflat::frobenius::FrobeniusData;
use paraflat::geometry::{
    conjugacy_probe, conjugacy_residual, curvature_residual, totally_geodesic_check,
    AffineSubspace, AlphaConnection, AlphaConnectionExpectation, ConnectionField,
    DualFisherMetric, FisherMetric, LeafFamily, ParaModelManifold,
};
use paraflat::jordan::{
    para_herm_coords, peirce_projections, peirce_rules, sym_coords, JordanAlgebra,
};
use paraflat::report::{emit_table, run_suite, Format, SuiteConfig};
use paraflat::statmanifold::FiniteExpFamily;
use paraflat::Result;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn rng(tag: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(tag);
    r
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, r: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-r..r))
}

fn le(name: &str, value: f64, tol: f64) -> (bool, String) {
    (value <= tol, format!("{name} {value:.2e} ≤ {tol:e}"))
}

fn combine(parts: Vec<(bool, String)>) -> Outcome {
    Outcome {
        pass: parts.iter().all(|p| p.0),
        detail: parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join(", "),
    }
}

fn algebra_laws() -> Result<Outcome> {
    type Q = Paracomplex<Rational64>;
    let (one, eps, ep, em) = (Q::one(), Q::epsilon(), Q::e_plus(), Q::e_minus());
    let exact = eps * eps == one
        && ep * ep == ep
        && em * em == em
        && ep * em == Q::zero()
        && ep + em == one
        && ep - em == eps;
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = Para64::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let b = Para64::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        let (p, m) = (a * b).to_canonical();
        let (ap, am) = a.to_canonical();
        let (bp, bm) = b.to_canonical();
        // Componentwise product in ℝ⊕ℝ, independent of the paracomplex product.
        worst = worst.max((p - ap * bp).abs()).max((m - am * bm).abs());
        let back = Para64::from_canonical(ap, am);
        worst = worst.max((back.x - a.x).abs()).max((back.y - a.y).abs());
    }
    Ok(combine(vec![
        (exact, format!("exact rational laws {}", if exact { "hold" } else { "FAIL" })),
        le("ℝ⊕ℝ isomorphism", worst, 1e-12),
    ]))
}

fn eigensplit_lemma() -> Result<Outcome> {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let m = r.random_range(1..=8);
        let s = DMatrix::identity(2 * m, 2 * m)
            + DMatrix::from_fn(2 * m, 2 * m, |_, _| r.random_range(-0.3..0.3));
        let sinv = s.clone().try_inverse().expect("near identity");
        let d = DMatrix::from_fn(2 * m, 2 * m, |i, j| match (i == j, i < m) {
            (false, _) => 0.0,
            (true, true) => 1.0,
            (true, false) => -1.0,
        });
        let k = &s * d * sinv;
        let v = uniform(&mut r, 2 * m, 1.0);
        let (p, q) = eigensplit(&k, &v)?;
        worst = worst
            .max((&p + &q - &v).amax())
            .max((&k * &p - &p).amax())
            .max((&k * &q + &q).amax());
    }
    Ok(combine(vec![le("reconstruction and eigenvectors", worst, 1e-12)]))
}

fn peirce_suite() -> Result<Outcome> {
    let mut r = rng(3);
    let (mut proj, mut refl, mut two_zero): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut models: Vec<(JordanAlgebra, Box<dyn Fn(&mut ChaCha8Rng) -> DVector<f64>>)> = vec![];
    for n in 2..=4 {
        models.push((
            JordanAlgebra::symmetric(n),
            Box::new(move |r: &mut ChaCha8Rng| {
                let q = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0)).qr().q();
                let k = r.random_range(1..n);
                let c = q.columns(0, k);
                sym_coords(&(c * c.transpose()))
            }),
        ));
    }
    for n in 1..=3 {
        models.push((
            JordanAlgebra::hermitian_paracomplex(n),
            Box::new(move |r: &mut ChaCha8Rng| {
                let s = DMatrix::identity(n, n)
                    + DMatrix::from_fn(n, n, |_, _| r.random_range(-0.3..0.3));
                let sinv = s.clone().try_inverse().expect("near identity");
                let k = r.random_range(0..=n);
                let d = DMatrix::from_fn(n, n, |i, j| if i == j && i < k { 1.0 } else { 0.0 });
                para_herm_coords(&(s * d * sinv))
            }),
        ));
    }
    for (j, draw) in &models {
        let dim = j.dim();
        let unit = j.unit().expect("unital");
        for _ in 0..10 {
            let a = draw(&mut r);
            let dec = peirce_projections(j, &a)?;
            proj = proj
                .max(dec.completeness_residual())
                .max(dec.orthogonality_residual());
            let u = dec.reflection();
            refl = refl.max((&u * &u - DMatrix::identity(dim, dim)).amax());
            for _ in 0..10 {
                let x = uniform(&mut r, dim, 1.0);
                let y = uniform(&mut r, dim, 1.0);
                let lhs = &u * j.product(&x, &y);
                let rhs = j.product(&(&u * &x), &(&u * &y));
                refl = refl.max((lhs - rhs).amax());
            }
            // U agrees with the quadratic representation of 2a − 1.
            let qr = j.quadratic_representation(&(&a * 2.0 - &unit));
            refl = refl.max((qr - &u).amax());
            two_zero = two_zero.max(peirce_rules(j, &dec).two_zero);
        }
    }
    Ok(combine(vec![
        le("projectors", proj, 1e-10),
        le("reflection", refl, 1e-10),
        le("J₂•J₀", two_zero, 1e-10),
    ]))
}

fn fisher_families(r: &mut ChaCha8Rng) -> Vec<FiniteExpFamily> {
    let mut v = vec![FiniteExpFamily::bernoulli()];
    for k in 3..=4 {
        v.push(FiniteExpFamily::categorical(k).expect("k ≥ 2"));
    }
    while v.len() < 6 {
        let k = r.random_range(3..=5);
        let d = r.random_range(1..=3.min(k - 1));
        let t = DMatrix::from_fn(k, d, |_, _| r.random_range(-1.0..1.0));
        let base = DVector::from_fn(k, |_, _| r.random_range(0.2..2.0));
        if let Ok(f) = FiniteExpFamily::new(t, base) {
            v.push(f);
        }
    }
    v
}

fn fisher_metric() -> Result<Outcome> {
    let mut r = rng(4);
    let (mut agree, mut dual): (f64, f64) = (0.0, 0.0);
    for f in fisher_families(&mut r) {
        for _ in 0..20 {
            let th = uniform(&mut r, f.d(), 2.0);
            agree = agree.max(f.fisher_agreement(&th)?);
            dual = dual.max(f.dual_basis_residual(&th)?);
        }
    }
    Ok(combine(vec![
        le("covariance vs Hessian", agree, 1e-10),
        le("dual basis", dual, 1e-10),
    ]))
}

fn dual_flat() -> Result<(Outcome, String)> {
    let mut r = rng(5);
    let h = 1e-4;
    let (mut conj, mut curv): (f64, f64) = (0.0, 0.0);
    let mut dual_chart: f64 = 0.0;
    let mut dual_dominated = true;
    for f in [
        FiniteExpFamily::bernoulli(),
        FiniteExpFamily::categorical(3)?,
        FiniteExpFamily::categorical(4)?,
    ] {
        let g = FisherMetric(f.clone());
        let e = AlphaConnection { family: f.clone(), alpha: 1.0 };
        let m = AlphaConnection { family: f.clone(), alpha: -1.0 };
        let me = AlphaConnectionExpectation { family: f.clone(), alpha: -1.0 };
        let ee = AlphaConnectionExpectation { family: f.clone(), alpha: 1.0 };
        let gd = DualFisherMetric(f.clone());
        for _ in 0..10 {
            let th = uniform(&mut r, f.d(), 1.0);
            let eta = f.expectation(&th)?;
            conj = conj.max(conjugacy_residual(&g, &e, &m, &th, h)?);
            curv = curv
                .max(curvature_residual(&e, &th, h)?)
                .max(curvature_residual(&me, &eta, h)?);
            let p = conjugacy_probe(&gd, &me, &ee, &eta, h)?;
            dual_chart = dual_chart.max(p.residual());
            dual_dominated &= p.residual() <= 1e-5 || p.discretization_dominated();
        }
    }
    let info = format!(
        "expectation-chart conjugacy {dual_chart:.2e} ({})",
        if dual_dominated {
            "within tolerance or step-dominated"
        } else {
            "NOT step-dominated"
        }
    );
    Ok((
        combine(vec![
            le("conjugacy", conj, 1e-5),
            le("flat curvature", curv, 1e-5),
            (dual_dominated, "dual chart checked".to_string()),
        ]),
        info,
    ))
}

fn legendre() -> Result<Outcome> {
    let mut r = rng(6);
    let (mut round, mut hess): (f64, f64) = (0.0, 0.0);
    for f in fisher_families(&mut r) {
        for _ in 0..20 {
            let th = uniform(&mut r, f.d(), 2.0);
            let back = f.legendre_inverse(&f.expectation(&th)?)?;
            round = round.max((back - &th).amax());
            hess = hess.max(f.hessian_product_residual(&th, 1e-4)?.max());
        }
    }
    Ok(combine(vec![
        le("round trip", round, 1e-8),
        le("Hessian product", hess, 1e-8),
    ]))
}

fn model_point(n: &ParaModelManifold, r: &mut ChaCha8Rng) -> Result<DVector<f64>> {
    let d = n.d();
    let p = uniform(r, d, 1.0);
    let m = n.family().expectation(&uniform(r, d, 1.0))?;
    Ok(n.join(&p, &m))
}

fn leaves() -> Result<Outcome> {
    let mut r = rng(7);
    let mut dev: f64 = 0.0;
    let mut lc_gap: f64 = 0.0;
    let mut affine: f64 = 0.0;
    let (mut truncated, mut redrawn) = (0, 0);
    for f in [
        FiniteExpFamily::bernoulli(),
        FiniteExpFamily::categorical(3)?,
        FiniteExpFamily::categorical(4)?,
    ] {
        let n = ParaModelManifold::new(f.clone());
        let lc = n.connection(0.0, 0.0);
        let lc_fd = n.levi_civita();
        let d = n.d();
        for fam in [LeafFamily::Natural, LeafFamily::Expectation] {
            for _ in 0..2 {
                let x = model_point(&n, &mut r)?;
                let c = lc.christoffel(&x)?;
                lc_gap = lc_gap.max(lc_fd.christoffel(&x)?.max_abs_diff(&c) / c.max_abs().max(1.0));
                let leaf = n.leaf(&x, fam)?;
                for _ in 0..2 {
                    // Redraw starts whose geodesic leaves the domain before t = 1.
                    let mut tries = 0;
                    loop {
                        let start = [(DVector::zeros(d), uniform(&mut r, d, 0.3))];
                        let rep = totally_geodesic_check(&lc, &leaf, &start, 1.0, 1e-3, 1e-6)?;
                        dev = dev.max(rep.max_deviation);
                        tries += 1;
                        if rep.truncated == 0 {
                            break;
                        }
                        redrawn += 1;
                        if tries == 20 {
                            truncated += 1;
                            break;
                        }
                    }
                }
            }
        }
        let e = AlphaConnection { family: f.clone(), alpha: 1.0 };
        for axis in 0..f.d() {
            let sub = AffineSubspace::coordinate(uniform(&mut r, f.d(), 1.0), &[axis])?;
            let starts = vec![(DVector::zeros(1), DVector::from_element(1, 0.7))];
            affine = affine.max(totally_geodesic_check(&e, &sub, &starts, 1.0, 1e-3, 0.0)?.max_deviation);
        }
    }
    Ok(combine(vec![
        le("leaf deviation", dev, 1e-6),
        le("Levi-Civita closed form vs finite differences", lc_gap, 1e-5),
        (affine == 0.0, format!("affine subfamily deviation {affine:e} = 0")),
        (
            truncated == 0,
            format!("{truncated} truncated after redraws ({redrawn} redrawn)"),
        ),
    ]))
}

fn mirror() -> Result<Outcome> {
    let mut r = rng(8);
    let mut inv: f64 = 0.0;
    let mut bad = 0usize;
    for f in [
        FiniteExpFamily::bernoulli(),
        FiniteExpFamily::categorical(3)?,
        FiniteExpFamily::categorical(4)?,
    ] {
        let n = ParaModelManifold::new(f);
        let d = n.d();
        for _ in 0..20 {
            let x = model_point(&n, &mut r)?;
            inv = inv.max(n.mirror_involution_residual(&x)?);
            for fam in [LeafFamily::Natural, LeafFamily::Expectation] {
                let image = n.leaf_label(&n.peirce_mirror(&x)?, fam.other())?;
                let (p, m) = n.split(&x)?;
                for _ in 0..3 {
                    let fresh = uniform(&mut r, d, 1.0);
                    let y = match fam {
                        LeafFamily::Natural => n.join(&fresh, &m),
                        LeafFamily::Expectation => n.join(&p, &n.family().expectation(&fresh)?),
                    };
                    bad += !n.on_leaf(&n.peirce_mirror(&y)?, fam.other(), &image)? as usize;
                }
            }
        }
    }
    Ok(combine(vec![
        le("σ∘σ", inv, 1e-8),
        (bad == 0, format!("{bad} leaf-exchange failures")),
    ]))
}

fn frobenius() -> Result<Outcome> {
    let mut r = rng(9);
    let mut two: f64 = 0.0;
    for _ in 0..10 {
        let data = FrobeniusData::random_two_dim(r.random());
        for _ in 0..5 {
            two = two.max(data.wdvv_residual(&uniform(&mut r, 2, 1.0))?);
        }
    }
    let fixture = FrobeniusData::fixture("wdvv3")?;
    let perturbed = FrobeniusData::fixture("wdvv3-perturbed")?;
    let (mut fw, mut fp): (f64, f64) = (0.0, 0.0);
    let (mut pw, mut pp) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..5 {
        let t = uniform(&mut r, 3, 1.0);
        fw = fw.max(fixture.wdvv_residual(&t)?);
        pw = pw.min(perturbed.wdvv_residual(&t)?);
        for l in [1.0, -1.0, 0.5, -0.5] {
            fp = fp.max(fixture.pencil_flatness(l, &t, 1e-4)?);
            pp = pp.min(perturbed.pencil_flatness(l, &t, 1e-4)?);
        }
    }
    Ok(combine(vec![
        le("n = 2 random WDVV", two, 1e-9),
        le("fixture WDVV", fw, 1e-9),
        le("fixture pencil", fp, 1e-5),
        (pw > 1e-4, format!("perturbed WDVV {pw:.2e} > 1e-4")),
        (pp > 1e-4, format!("perturbed pencil {pp:.2e} > 1e-4")),
    ]))
}

fn hahn_jordan_mismatch(mu: &SignedMeasure) -> bool {
    let n = mu.len();
    let (mut best, mut worst) = (0.0_f64, 0.0_f64);
    for mask in 0u32..(1 << n) {
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| mu.weights[i]).sum();
        best = best.max(s);
        worst = worst.min(s);
    }
    let (p, m) = hahn_jordan(mu);
    let minimal = p.weights.iter().zip(&m.weights).all(|(a, b)| a * b == 0.0);
    let split = p
        .weights
        .iter()
        .zip(&m.weights)
        .zip(&mu.weights)
        .all(|((a, b), w)| a - b == *w && *a >= 0.0 && *b >= 0.0);
    !(minimal
        && split
        && p.weights.iter().sum::<f64>() == best
        && m.weights.iter().sum::<f64>() == -worst)
}

fn cones() -> Result<Outcome> {
    let mut r = rng(10);
    let mut mismatches = 0;
    for n in 1..=8 {
        for _ in 0..50 {
            let mu = SignedMeasure::new(
                (0..n).map(|_| r.random_range(-64i32..=64) as f64 / 8.0).collect(),
            )?;
            mismatches += hahn_jordan_mismatch(&mu) as usize;
        }
    }
    let mut rejected = 0;
    for _ in 0..1000 {
        let n = r.random_range(1..=8);
        let mut draw =
            || SignedMeasure::new((0..n).map(|_| r.random_range(1e-3..2.0)).collect());
        let (p, m) = (draw()?, draw()?);
        let x = ConeElement::Paracomplex(measure_pair_embed(&p, &m)?);
        rejected += !is_positive(ConeClass::ParacomplexPd(n), &x)?.member as usize;
    }
    let mut violations = 0;
    for class in [
        ConeClass::RealPd(3),
        ConeClass::ComplexPd(2),
        ConeClass::QuaternionPd(2),
        ConeClass::ParacomplexPd(3),
        ConeClass::Measure(5),
    ] {
        violations += self_duality_probe(class, 1000, SEED)?.violations;
    }
    Ok(combine(vec![
        (mismatches == 0, format!("{mismatches} Hahn–Jordan mismatches")),
        (rejected == 0, format!("{rejected}/1000 embeddings rejected")),
        (violations == 0, format!("{violations} self-duality violations")),
    ]))
}

fn determinism() -> Result<Outcome> {
    let cfg = SuiteConfig::default();
    let a = run_suite("all", &cfg)?;
    let b = run_suite("all", &cfg)?;
    let (ta, tb) = (emit_table(&a, Format::Csv)?, emit_table(&b, Format::Csv)?);
    let identical = ta == tb;
    Ok(combine(vec![
        (identical, format!("case tables {}", if identical { "identical" } else { "DIFFER" })),
        (a.pass, format!("all suites {}", if a.pass { "pass" } else { "FAIL" })),
        (
            a.timing.wall_time_s < 120.0,
            format!("one run {:.1} s < 120 s", a.timing.wall_time_s),
        ),
    ]))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Result<Outcome>); 10] = [
        ("algebra laws", 1, algebra_laws),
        ("eigensplit", 1, eigensplit_lemma),
        ("Peirce decomposition", 5, peirce_suite),
        ("Fisher metric", 2, fisher_metric),
        // 5 is listed separately below.
        ("Legendre duality", 2, legendre),
        ("totally geodesic leaves", 30, leaves),
        ("Peirce mirror", 5, mirror),
        ("WDVV and pencil", 10, frobenius),
        ("cones", 5, cones),
        ("determinism", 240, determinism),
    ];
    let numbers = [1, 2, 3, 4, 6, 7, 8, 9, 10, 11];
    let mut results: Vec<(usize, &str, bool, String, Duration, u64)> = Vec::new();
    for ((name, budget, f), num) in criteria.into_iter().zip(numbers) {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let (pass, detail) = match out {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        results.push((num, name, pass, detail, elapsed, budget));
    }
    let start = Instant::now();
    let (pass5, detail5) = match dual_flat() {
        Ok((o, info)) => (o.pass, format!("{}; {info}", o.detail)),
        Err(e) => (false, format!("error: {e}")),
    };
    results.push((5, "dual flat connections", pass5, detail5, start.elapsed(), 10));
    results.sort_by_key(|r| r.0);

    let mut all = true;
    for (num, name, pass, detail, elapsed, budget) in &results {
        let secs = elapsed.as_secs_f64();
        let in_time = secs < *budget as f64;
        let ok = *pass && in_time;
        all &= ok;
        println!(
            "criterion {num:>2} {} {name}: {detail}; {secs:.2} s (budget {budget} s)",
            if ok { "PASS" } else { "FAIL" },
        );
    }
    println!("acceptance: {}", if all { "PASS" } else { "FAIL" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
