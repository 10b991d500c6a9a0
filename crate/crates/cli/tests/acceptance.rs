//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line with
//! its runtime; the test fails if any criterion misses a bound or its time
//! limit. Reference values come from closed forms or from nalgebra's own
//! decompositions, never from the routines under test.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use csym_core::builders::binormal::{atom_case, generic_coefficients};
use csym_core::builders::{
    binormal_conjugation, blaschke_model_space, normal_rank_one, partial_isometry_counterexample, volterra_discretize,
    zoo_sample, Alpha, Atom, AtomCase, BinormalAtoms, BlaschkeProduct, ZooKind, DEFAULT_QUADRATURE,
};
use csym_core::diagnostics::{kernel_chain_test, kernel_dim_test, simple_eig_pairs_test, transpose_trace_test};
use csym_core::json::MatrixJson;
use csym_core::linalg::random_unitary;
use csym_core::tolerance::Tolerance;
use csym_core::verdict::WitnessLocation;
use csym_core::{decide, ComplexMatrix64, SolveConfig64, Status};
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;
type M = ComplexMatrix64;

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

/// `‖t s − s tᵀ‖_F / max(1, ‖t‖_F)`, computed here rather than by the library.
fn residual(t: &M, s: &M) -> f64 {
    (t * s - s * t.transpose()).norm() / t.norm().max(1.0)
}

/// Largest of `‖s s* − I‖` and `‖s − sᵀ‖`.
fn conjugation_defect(s: &M) -> f64 {
    let n = s.nrows();
    (s * s.adjoint() - M::identity(n, n)).norm().max((s - s.transpose()).norm())
}

fn random_complex(rng: &mut ChaCha8Rng) -> C {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> C {
    let r = radius * rng.random_range(0.0f64..1.0).sqrt();
    C::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

fn unimodular(rng: &mut ChaCha8Rng) -> C {
    C::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// A unit vector spanning the kernel of `m`, from nalgebra's SVD.
fn null_vector(m: &M) -> nalgebra::DVector<C> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.unwrap();
    let k = (0..svd.singular_values.len())
        .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .unwrap();
    v_t.row(k).adjoint()
}

fn gram_moduli(vs: &[nalgebra::DVector<C>]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            out.push(vs[i].dotc(&vs[j]).norm());
        }
    }
    out
}

fn run_check(dir: &Path, name: &str, m: &M) -> i32 {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&MatrixJson::from_matrix(m)).unwrap()).unwrap();
    Command::new(env!("CARGO_BIN_EXE_csym"))
        .arg("check")
        .arg(&path)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

/// Operators certified along the way, with their conjugation matrices.
type Certified = Vec<(String, M, M)>;

struct Outcome {
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { failures: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let f = partial_isometry_counterexample::<f64>(2).unwrap();
    let a = &f.a;

    // Eigenvalues from nalgebra's real Schur form.
    let real_a = DMatrix::from_fn(3, 3, |i, j| a[(i, j)].re);
    let mut eigs: Vec<C> = real_a.complex_eigenvalues().iter().copied().collect();
    eigs.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    let s3 = 3f64.sqrt() / 4.0;
    let expected = [c(0.5, 0.0), c(-0.25, s3), c(-0.25, -s3)];
    for (e, x) in eigs.iter().zip(expected) {
        o.require((e - x).norm() <= 1e-10, || format!("eigenvalue {e} != {x}"));
    }

    let id = M::identity(3, 3);
    let v: Vec<_> = expected.iter().map(|&l| null_vector(&(a - id.clone() * l))).collect();
    let w: Vec<_> = expected.iter().map(|&l| null_vector(&(a.adjoint() - id.clone() * l.conj()))).collect();
    for g in gram_moduli(&v) {
        o.require((g - 0.5).abs() <= 1e-10, || format!("A eigenvector Gram modulus {g} != 1/2"));
    }
    for g in gram_moduli(&w) {
        o.require((g - 1.0 / 3.0).abs() <= 1e-10, || format!("A* eigenvector Gram modulus {g} != 1/3"));
    }
    // The stated unit eigenvectors agree up to phase.
    let r6 = 6f64.sqrt();
    let stated = [
        [c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)].map(|z| z / r6),
        [c(-1.0, 3f64.sqrt()), c(-1.0, -3f64.sqrt()), c(4.0, 0.0)].map(|z| z / (2.0 * r6)),
    ];
    for (k, sv) in stated.iter().enumerate() {
        let sv = nalgebra::DVector::from_column_slice(sv);
        o.require((sv.dotc(&v[k]).norm() - 1.0).abs() <= 1e-10, || format!("v{} differs from the stated vector", k + 1));
    }

    let dir = tempfile::tempdir().unwrap();
    let code_a = run_check(dir.path(), "A.json", a);
    let code_t = run_check(dir.path(), "T.json", &f.t);
    o.require(code_a == 1, || format!("check on A exited {code_a}"));
    o.require(code_t == 1, || format!("check on T exited {code_t}"));
    o
}

fn criterion_2(certified: &mut Certified) -> Outcome {
    let mut o = Outcome::new();
    let values = [0.0, 0.5, 1.0, 2.0, -2.0];
    for &a in &values {
        for &b in &values {
            let t = zoo_sample::<f64>(ZooKind::Nilpotent3 { a, b }, 0, 3).unwrap();
            let v = decide(&t, &SolveConfig64::default()).unwrap();
            let expect_not = a * b != 0.0 && a.abs() != b.abs();
            match (expect_not, v.status) {
                (true, Status::NotCso) => {}
                (false, Status::Cso) => {
                    let s = v.certificate.unwrap().into_matrix();
                    let r = residual(&t, &s);
                    o.require(r <= 1e-8 && conjugation_defect(&s) <= 1e-8, || {
                        format!("nilpotent3({a},{b}) certificate residual {r:e}")
                    });
                    certified.push((format!("nilpotent3({a},{b})"), t, s));
                }
                (_, st) => o.failures.push(format!("nilpotent3({a},{b}) decided {st:?}")),
            }
        }
    }
    o
}

fn criterion_3(certified: &mut Certified) -> Outcome {
    let mut o = Outcome::new();
    let tol = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = [0usize; 3];
    for k in 0..200 {
        let m = rng.random_range(1..=16);
        let atoms: Vec<Atom<f64>> = (0..m)
            .map(|_| {
                let u1 = random_complex(&mut rng);
                let (v, u2) = match rng.random_range(0..3) {
                    0 => (random_complex(&mut rng), u1),
                    1 => (c(0.0, 0.0), random_complex(&mut rng)),
                    _ => (random_complex(&mut rng), random_complex(&mut rng)),
                };
                Atom { u1, v, u2, weight: rng.random_range(0.1..2.0) }
            })
            .collect();
        let atoms = BinormalAtoms::new(atoms).unwrap();
        for atom in &atoms.atoms {
            match atom_case(atom, &tol) {
                AtomCase::Equal => cases[0] += 1,
                AtomCase::Diagonal => cases[1] += 1,
                AtomCase::Generic => {
                    cases[2] += 1;
                    let (a, b) = generic_coefficients(atom.u1, atom.v, atom.u2);
                    let gap = (atom.u2 * b - (atom.u1 * b - a.conj() * atom.v)).norm();
                    o.require(gap <= 1e-12, || format!("instance {k}: atom identity off by {gap:e}"));
                }
            }
        }
        let t = atoms.triangular();
        let s = binormal_conjugation(&atoms, &tol).unwrap().into_matrix();
        let r = residual(&t, &s).max(conjugation_defect(&s));
        o.require(r <= 1e-10, || format!("instance {k}: residual {r:e}"));
        if k % 20 == 0 {
            certified.push((format!("binormal #{k}"), t, s));
        }
    }
    o.require(cases.iter().all(|&n| n > 0), || format!("atom cases not all exercised: {cases:?}"));
    o
}

fn criterion_4(certified: &mut Certified) -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..500 {
        let t = M::from_fn(2, 2, |_, _| random_complex(&mut rng));
        let v = decide(&t, &SolveConfig64::default()).unwrap();
        match v.certificate {
            Some(cert) if v.status == Status::Cso => {
                let s = cert.into_matrix();
                let r = residual(&t, &s).max(conjugation_defect(&s));
                o.require(r <= 1e-8, || format!("sample {k}: residual {r:e}"));
                if k % 50 == 0 {
                    certified.push((format!("2x2 #{k}"), t, s));
                }
            }
            _ => o.failures.push(format!("sample {k}: {:?} at {}", v.status, v.test)),
        }
    }
    o
}

fn criterion_5(certified: &mut Certified) -> Outcome {
    let mut o = Outcome::new();
    for k in 0..200u64 {
        let rank = (k % 4) as usize;
        let t = zoo_sample::<f64>(ZooKind::PartialIsometry { dim: 3, rank: Some(rank) }, k, 3).unwrap();
        let p = t.adjoint() * &t;
        o.require((&p * &p - &p).norm() <= 1e-12, || format!("sample {k} is not a partial isometry"));
        let v = decide(&t, &SolveConfig64::default()).unwrap();
        match v.certificate {
            Some(cert) if v.status == Status::Cso => {
                let s = cert.into_matrix();
                let r = residual(&t, &s).max(conjugation_defect(&s));
                o.require(r <= 1e-8, || format!("sample {k}: residual {r:e}"));
                if k % 20 == 0 {
                    certified.push((format!("partial isometry #{k}"), t, s));
                }
            }
            _ => o.failures.push(format!("sample {k} (rank {rank}): {:?} at {}", v.status, v.test)),
        }
    }
    o
}

fn criterion_6(certified: &mut Certified) -> Outcome {
    let mut o = Outcome::new();
    let tol = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut done = 0;
    while done < 20 {
        let d = rng.random_range(1..=8);
        let zeros: Vec<C> = (0..d).map(|_| random_disk(&mut rng, 0.9)).collect();
        let phi = BlaschkeProduct::new(zeros, unimodular(&mut rng)).unwrap();
        let lambda = random_disk(&mut rng, 0.9);
        if phi.eval(lambda).norm() < 1e-3 {
            continue;
        }
        done += 1;
        let b = blaschke_model_space(&phi, lambda, Alpha::Canonical, DEFAULT_QUADRATURE, &tol).unwrap();
        let s = b.c.matrix();
        let u = &b.u_lambda;
        let n = u.nrows();
        let unitarity = (u.adjoint() * u - M::identity(n, n)).norm();
        let ck = s * b.k_lambda.map(|z| z.conj());
        let q_ck = (&b.q_lambda - ck).norm();
        let identity = (&b.s_lambda - u + (&b.k_lambda * b.q_lambda.adjoint()) * (b.alpha + b.phi_at_lambda)).norm();
        let csym = residual(&b.s_lambda, s).max(conjugation_defect(s));
        for (name, value) in [("unitarity", unitarity), ("q - Ck", q_ck), ("rank-one identity", identity), ("csym", csym)] {
            o.require(value <= 1e-9, || format!("degree {d}: {name} {value:e}"));
        }
        o.require((b.alpha + b.phi_at_lambda / b.phi_at_lambda.norm()).norm() <= 1e-12, || {
            format!("degree {d}: alpha is not the canonical value")
        });
        certified.push((format!("model space degree {d}"), b.s_lambda.clone(), s.clone()));
    }
    for d in 1..=6 {
        let mut zeros: Vec<C> = (1..d).map(|_| random_disk(&mut rng, 0.9)).collect();
        zeros.insert(rng.random_range(0..d), c(0.0, 0.0));
        let phi = BlaschkeProduct::new(zeros, unimodular(&mut rng)).unwrap();
        let b = blaschke_model_space(&phi, c(0.0, 0.0), Alpha::Value(c(1.0, 0.0)), DEFAULT_QUADRATURE, &tol).unwrap();
        let p = b.s_lambda.adjoint() * &b.s_lambda;
        let defect = (&p * &p - &p).norm();
        o.require(defect <= 1e-9, || format!("S0 of degree {d} is not a partial isometry ({defect:e})"));
    }
    o
}

fn criterion_7(certified: &mut Certified) -> Outcome {
    let mut o = Outcome::new();
    let (v, flip) = volterra_discretize::<f64>(256).unwrap();
    let s = flip.into_matrix();
    let r = residual(&v, &s).max(conjugation_defect(&s));
    o.require(r <= 1e-14, || format!("residual {r:e}"));
    let re = DMatrix::from_fn(256, 256, |i, j| 0.5 * (v[(i, j)].re + v[(j, i)].re));
    let mut sigma: Vec<f64> = re.symmetric_eigenvalues().iter().map(|x| x.abs()).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    o.require(sigma[1] <= 1e-14, || format!("second singular value {:e}", sigma[1]));
    o.require((sigma[0] - 0.5).abs() <= 1e-12, || format!("top singular value {}", sigma[0]));
    certified.push(("volterra 256".into(), v, s));
    o
}

fn criterion_8(certified: &mut Certified) -> Outcome {
    let mut o = Outcome::new();
    let tol = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..200 {
        let n = rng.random_range(1..=12);
        let eigs: Vec<C> = (0..n).map(|_| random_complex(&mut rng) * 3.0).collect();
        let plain = k % 4 == 0;
        let theta: Vec<C> = (0..n).map(|_| if plain { c(1.0, 0.0) } else { unimodular(&mut rng) }).collect();
        let a = random_complex(&mut rng);
        let mut v = nalgebra::DVector::from_fn(n, |_, _| random_complex(&mut rng));
        if plain {
            v /= C::from(v.norm());
        }
        let (t, cert) = match normal_rank_one(&eigs, &theta, a, &v, &tol) {
            Ok(x) => x,
            Err(e) => {
                o.failures.push(format!("instance {k}: {e}"));
                continue;
            }
        };
        let s = cert.into_matrix();
        let r = residual(&t, &s).max(conjugation_defect(&s));
        o.require(r <= 1e-10, || format!("instance {k}: residual {r:e}"));
        if plain {
            // N + a·P with P the projection onto v.
            let expected = M::from_diagonal(&nalgebra::DVector::from_vec(eigs.clone())) + (&v * v.adjoint()) * a;
            let gap = (&t - expected).norm();
            o.require(gap <= 1e-12, || format!("instance {k}: theta = 1 differs from N + aP by {gap:e}"));
        }
        if k % 20 == 0 {
            certified.push((format!("normal + rank one #{k}"), t, s));
        }
    }
    o
}

fn criterion_9(certified: &Certified) -> Outcome {
    let mut o = Outcome::new();
    let tol = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, t, s) in certified {
        let verdicts = [
            kernel_dim_test(t, &tol),
            kernel_chain_test(t, &tol),
            simple_eig_pairs_test(t, &tol),
            transpose_trace_test(t, 6, &tol),
        ];
        for v in verdicts {
            match v {
                Ok(v) if v.status == Status::NotCso => o.failures.push(format!("{name}: refuted by {}", v.test)),
                Err(e) => o.failures.push(format!("{name}: {e}")),
                Ok(_) => {}
            }
        }
        let q: M = random_unitary(&mut rng, t.nrows());
        let moved = q.adjoint() * t * &q;
        let s2 = q.adjoint() * s * q.map(|z| z.conj());
        let r = residual(&moved, &s2).max(conjugation_defect(&s2));
        let bound = 1e-10 * (t.nrows() as f64).max(1.0);
        o.require(r <= bound, || format!("{name}: transported residual {r:e}"));
    }
    o.require(certified.len() >= 40, || format!("only {} certified operators collected", certified.len()));
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let r = |x: f64| c(x, 0.0);
    let t = M::from_row_slice(3, 3, &[r(0.), r(0.), r(1.), r(0.), r(1.), r(1.), r(0.), r(0.), r(0.)]);
    let v = simple_eig_pairs_test(&t, &tol()).unwrap();
    o.require(v.status == Status::NotCso, || format!("status {:?}", v.status));
    match v.obstruction {
        Some(w) => {
            let mut pair = [w.left_value, w.right_value];
            pair.sort_by(f64::total_cmp);
            o.require(pair[0].abs() <= 1e-10, || format!("witness modulus {} != 0", pair[0]));
            o.require((pair[1] - 0.5f64.sqrt()).abs() <= 1e-10, || format!("witness modulus {} != 1/sqrt 2", pair[1]));
            o.require(matches!(w.location, WitnessLocation::Pair(_, _)), || "witness is not an eigenpair".into());
        }
        None => o.failures.push("no witness".into()),
    }
    o
}

fn main() {
    let mut certified = Certified::new();
    let mut all_ok = true;
    let mut report = |n: usize, title: &str, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut o = f();
        let elapsed = start.elapsed();
        if elapsed > limit {
            o.failures.push(format!("took {elapsed:?}, limit {limit:?}"));
        }
        let ok = o.failures.is_empty();
        all_ok &= ok;
        println!(
            "criterion {n:>2} {}: {title} ({:.3} s)",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        for f in o.failures.iter().take(10) {
            println!("    {f}");
        }
    };
    let secs = Duration::from_secs;
    report(1, "partial isometry fixture", secs(1), &mut criterion_1);
    report(2, "nilpotent grid", secs(10), &mut || criterion_2(&mut certified));
    report(3, "binormal builder", secs(5), &mut || criterion_3(&mut certified));
    report(4, "2x2 universality", secs(30), &mut || criterion_4(&mut certified));
    report(5, "3-dim partial isometries", secs(60), &mut || criterion_5(&mut certified));
    report(6, "model space", secs(30), &mut || criterion_6(&mut certified));
    report(7, "volterra", secs(1), &mut || criterion_7(&mut certified));
    report(8, "normal plus rank one", secs(5), &mut || criterion_8(&mut certified));
    let snapshot = std::mem::take(&mut certified);
    report(9, "soundness", secs(60), &mut || criterion_9(&snapshot));
    report(10, "projection perturbation", Duration::from_secs(1), &mut criterion_10);
    if !all_ok {
        eprintln!("acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
