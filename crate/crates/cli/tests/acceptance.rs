//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! (with elapsed time against its budget) and exits non-zero on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hessenberg_cli::commands::sample_params;
use hessenberg_cli::document::parse_stream;
use hessenberg_core::construct::vertex_matrix;
use hessenberg_core::inverse::{recover, synth_first_row, synth_first_row_squares, EquivalenceTransform};
use hessenberg_core::verify::{verify_exact, verify_exact_matrix, verify_float, verify_symbolic};
use hessenberg_core::{build, Matrix, Mode, ParamVector};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hessenberg"))
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn exact(z: &[BigRational]) -> ParamVector {
    ParamVector::exact(z.to_vec()).unwrap()
}

/// Interior rational in (0, 1) with denominator below 60.
fn interior(rng: &mut ChaCha8Rng) -> BigRational {
    let q = rng.gen_range(2..60i64);
    ratio(rng.gen_range(1..q), q)
}

// 1. Golden matrices through `gen`, compared token by token.
fn golden() {
    let cases: [(&[&str], &[&[&str]]); 6] = [
        (&["0", "0"], &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "1"]]),
        (&["1", "1"], &[&["0", "0", "1"], &["-1", "0", "0"], &["0", "-1", "0"]]),
        (&["1", "0"], &[&["1", "0", "0"], &["0", "0", "1"], &["0", "-1", "0"]]),
        (
            &["1/2", "1"],
            &[
                &["0", "sqrt(1/2)", "sqrt(1/2)"],
                &["-1", "0", "0"],
                &["0", "-sqrt(1/2)", "sqrt(1/2)"],
            ],
        ),
        (
            &["1/2", "2/3"],
            &[
                &["sqrt(1/3)", "sqrt(1/3)", "sqrt(1/3)"],
                &["-sqrt(2/3)", "sqrt(1/6)", "sqrt(1/6)"],
                &["0", "-sqrt(1/2)", "sqrt(1/2)"],
            ],
        ),
        (&["1/2"], &[&["sqrt(1/2)", "sqrt(1/2)"], &["-sqrt(1/2)", "sqrt(1/2)"]]),
    ];
    for (z, want) in cases {
        let n = z.len() + 1;
        let out = bin()
            .args(["gen", &n.to_string()])
            .args(z)
            .args(["--mode", "exact", "--format", "text"])
            .output()
            .unwrap();
        assert!(out.status.success(), "gen {z:?} exited {:?}", out.status);
        let text = String::from_utf8(out.stdout).unwrap();
        let got: Vec<Vec<&str>> = text.lines().map(|l| l.split_whitespace().collect()).collect();
        let want: Vec<Vec<&str>> = want.iter().map(|r| r.to_vec()).collect();
        assert_eq!(got, want, "gen {n} {z:?}");
        // Columns separated by at least two spaces.
        for line in text.lines() {
            let gaps = line.split(|c: char| !c.is_whitespace()).filter(|g| !g.is_empty());
            assert!(gaps.into_iter().all(|g| g.len() >= 2), "{line:?}");
        }
    }
}

// 2. Exact unitarity on a fixed suite of 50 rational vectors, n = 2…10.
fn exact_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut saw_zero, mut saw_one) = (false, false);
    for k in 0..50 {
        let n = 2 + k % 9;
        let z: Vec<BigRational> = (1..n)
            .map(|_| match rng.gen_range(0..4) {
                0 => {
                    saw_zero = true;
                    BigRational::zero()
                }
                1 => {
                    saw_one = true;
                    BigRational::one()
                }
                _ => interior(&mut rng),
            })
            .collect();
        let report = verify_exact(&exact(&z)).unwrap();
        assert!(report.passed, "z = {z:?}: {:?}", report.failures);
    }
    assert!(saw_zero && saw_one);
}

// 3. Symbolic proof for every n in 2…12.
fn symbolic() {
    for n in 2..=12 {
        let report = verify_symbolic(n).unwrap();
        assert!(report.passed, "n = {n}: {:?}", report.failures);
    }
}

// 4. Float Gram residual ≤ 1e−12·n on 100 uniform samples per size.
fn float_scale() {
    for (i, n) in [16usize, 64, 256, 512].into_iter().enumerate() {
        let mut worst = 0.0f64;
        for z in sample_params(n, 100, 400 + i as u64) {
            let u = build(&z, Mode::Float).unwrap();
            let r = verify_float(&u, 1e-12 * n as f64).unwrap();
            assert!(r.passed, "n = {n}: residual {:?}", r.max_residual);
            worst = worst.max(r.max_residual.unwrap());
        }
        println!("    n = {n:>3}: worst residual {worst:.3e} (bound {:.1e})", 1e-12 * n as f64);
    }
}

// 5. recover(build(z)) == z within 1e−10, identity transform.
fn recovery_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(2..=32usize);
        let z: Vec<f64> = (1..n).map(|_| rng.gen_range(0.01..0.99)).collect();
        let u = build(&ParamVector::float(z.clone()).unwrap(), Mode::Float).unwrap();
        let r = recover(&u, 1e-10).unwrap();
        assert!(r.transform.is_identity(), "n = {n}: {:?}", r.transform);
        for (a, b) in r.z.to_f64_vec().iter().zip(&z) {
            let d = (a - b).abs();
            assert!(d <= 1e-10, "n = {n}: {a} vs {b}");
            worst = worst.max(d);
        }
    }
    println!("    worst parameter error {worst:.3e}");
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

// 6. Every sign flip and Hessenberg-preserving permutation of build(z) on a
// 5-point grid, n ∈ {2, 3}, recovered with an exact reconstruction.
fn equivalence_oracle() {
    let grid = [ratio(0, 1), ratio(1, 4), ratio(1, 2), ratio(3, 4), ratio(1, 1)];
    let (mut checked, mut permuted) = (0usize, 0usize);
    for n in [2usize, 3] {
        let perms = permutations(n);
        let mut zs: Vec<Vec<BigRational>> = vec![vec![]];
        for _ in 1..n {
            zs = zs
                .into_iter()
                .flat_map(|z| {
                    grid.iter().map(move |g| {
                        let mut z = z.clone();
                        z.push(g.clone());
                        z
                    })
                })
                .collect();
        }
        for z in &zs {
            let u = build(&exact(z), Mode::Exact).unwrap();
            for rs in 0..1u32 << n {
                for cs in 0..1u32 << n {
                    let signs = |m: u32| (0..n).map(|b| if m >> b & 1 == 1 { -1 } else { 1 }).collect();
                    for rp in &perms {
                        for cp in &perms {
                            let t = EquivalenceTransform::new(signs(rs), signs(cs), rp.clone(), cp.clone())
                                .unwrap();
                            let Ok(h) = t.apply(&u.matrix) else { continue };
                            let r = recover(&h, 0.0).unwrap_or_else(|e| panic!("z = {z:?}, {t:?}: {e}"));
                            let rebuilt = r.transform.apply(&build(&r.z, Mode::Exact).unwrap().matrix).unwrap();
                            assert!(matches!(rebuilt, Matrix::Exact { .. }));
                            assert_eq!(rebuilt, h, "z = {z:?}, {t:?}");
                            assert!(r.exact);
                            checked += 1;
                            if !t.has_identity_perms() {
                                permuted += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(permuted > 0);
    println!("    {checked} transformed matrices recovered ({permuted} with non-trivial permutations)");
}

// 7. `enumerate n` emits 2^{n−1} signed permutation matrices.
fn enumeration() {
    for n in 2..=8usize {
        let out = bin().args(["enumerate", &n.to_string(), "--format", "json"]).output().unwrap();
        assert!(out.status.success());
        let docs = parse_stream(&String::from_utf8(out.stdout).unwrap(), None).unwrap();
        assert_eq!(docs.len(), 1 << (n - 1), "n = {n}");
        let mut seen = std::collections::HashSet::new();
        for d in &docs {
            let m = d.to_matrix().unwrap();
            assert!(m.is_signed_permutation(0.0), "n = {n}: {d:?}");
            assert!(verify_exact_matrix(&m).unwrap().passed);
            seen.insert(format!("{:?}", d.entries));
        }
        assert_eq!(seen.len(), docs.len(), "n = {n}: duplicates");
        // Same set as the library's vertex list.
        for b in 0..1u64 << (n - 1) {
            let bits = hessenberg_core::construct::vertex_bits(n, b);
            let v = vertex_matrix(n, &bits).unwrap();
            assert_eq!(docs[b as usize].to_matrix().unwrap(), v.matrix);
        }
    }
}

// 8. Prescribed first row.
fn synthesis() {
    let s = synth_first_row_squares(&[ratio(1, 3), ratio(1, 3), ratio(1, 3)], 0.0).unwrap();
    assert_eq!(s.params, exact(&[ratio(1, 2), ratio(2, 3)]));
    let s = synth_first_row_squares(&vec![ratio(1, 4); 4], 0.0).unwrap();
    assert_eq!(s.params, exact(&[ratio(1, 2), ratio(2, 3), ratio(3, 4)]));
    let u = build(&s.params, Mode::Exact).unwrap();
    assert!(verify_exact_matrix(&u).unwrap().passed);
    for c in 0..4 {
        assert_eq!(u.get_exact(0, c).unwrap().square(), ratio(1, 4));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2..=10usize);
        // Exact roundtrip.
        let z: Vec<BigRational> = (1..n).map(|_| interior(&mut rng)).collect();
        let u = build(&exact(&z), Mode::Exact).unwrap();
        let sq: Vec<BigRational> = (0..n).map(|c| u.get_exact(0, c).unwrap().square()).collect();
        let s = synth_first_row_squares(&sq, 0.0).unwrap();
        assert_eq!(s.params, exact(&z));
        assert!(s.unconstrained.is_empty());
        // Float roundtrip at 1e−12.
        let zf: Vec<f64> = (1..n).map(|_| rng.gen_range(0.05..0.95)).collect();
        let u = build(&ParamVector::float(zf.clone()).unwrap(), Mode::Float).unwrap();
        let row: Vec<f64> = (0..n).map(|c| u.get_f64(0, c)).collect();
        let s = synth_first_row(&row, 1e-12).unwrap();
        for (a, b) in s.params.to_f64_vec().iter().zip(&zf) {
            let d = (a - b).abs();
            assert!(d <= 1e-12, "n = {n}: {a} vs {b}");
            worst = worst.max(d);
        }
    }
    println!("    worst float parameter error {worst:.3e}");
}

// 9. Deleting row 1 / column 1: rows 3… of the member over z_1…z_n equal rows
// 2… of the member over z_1…z_{n−1} behind a zero column; row 2 is row 1 of
// the smaller member scaled by √(1 − z_n).
fn recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 2..=10usize {
        for _ in 0..20 {
            let z: Vec<BigRational> = (0..n)
                .map(|_| match rng.gen_range(0..5) {
                    0 => BigRational::zero(),
                    1 => BigRational::one(),
                    _ => interior(&mut rng),
                })
                .collect();
            let big = build(&exact(&z), Mode::Exact).unwrap();
            let small = build(&exact(&z[..n - 1]), Mode::Exact).unwrap();
            for r in 1..n {
                assert!(big.get_exact(r + 1, 0).unwrap().is_zero());
                for c in 0..n {
                    assert_eq!(big.get_exact(r + 1, c + 1), small.get_exact(r, c), "n = {n}, z = {z:?}");
                }
            }
            let scale = BigRational::one() - &z[n - 1];
            for c in 0..n {
                let want = small.get_exact(0, c).unwrap().square() * &scale;
                assert_eq!(big.get_exact(1, c + 1).unwrap().square(), want);
                assert!(big.get_exact(1, c + 1).unwrap().sign() != hessenberg_core::radical::Sign::Neg);
            }
        }
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn(), u64); 9] = [
        ("1 golden matrices", golden, 1),
        ("2 exact unitarity", exact_suite, 10),
        ("3 symbolic proof n=2..12", symbolic, 60),
        ("4 float unitarity at scale", float_scale, 60),
        ("5 recovery roundtrip", recovery_roundtrip, 30),
        ("6 equivalence recovery", equivalence_oracle, 60),
        ("7 vertex enumeration", enumeration, 5),
        ("8 prescribed-row synthesis", synthesis, 5),
        ("9 recursion property", recursion, 5),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(f)).is_ok();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let verdict = if ok && in_time { "PASS" } else { "FAIL" };
        let note = if ok && !in_time { " (over budget)" } else { "" };
        println!("criterion {name}: {verdict} in {:.2}s (budget {budget}s){note}", elapsed.as_secs_f64());
        if verdict == "FAIL" {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
