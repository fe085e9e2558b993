use hessenberg_core::construct::{build, squared_entry_with, vertex_bits, vertex_matrix, Matrix};
use hessenberg_core::inverse::{
    recover, synth_first_row, synth_first_row_squares, synth_last_column_squares, DEFAULT_TOL,
};
use hessenberg_core::radical::{radical_mul, Radical, RadicalSum, Sign};
use hessenberg_core::verify::{gram_residual, verify_exact, verify_float};
use hessenberg_core::{Mode, ParamVector};
use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational_in(lo: i64, hi_open: bool) -> impl Strategy<Value = BigRational> {
    (1i64..50).prop_flat_map(move |d| {
        let upper = if hi_open { d - 1 } else { d };
        let lower = lo.min(upper);
        (lower..=upper).prop_map(move |p| BigRational::new(p.into(), d.into()))
    })
}

fn unit_rationals(max_len: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(rational_in(0, false), 1..max_len)
}

fn interior_rationals(max_len: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(
        (2i64..50).prop_flat_map(|d| (1..d).prop_map(move |p| BigRational::new(p.into(), d.into()))),
        1..max_len,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rows_and_columns_have_unit_norm(z in unit_rationals(9)) {
        let n = z.len() + 1;
        for a in 1..=n {
            let row = (1..=n).map(|j| squared_entry_with(&z, a, j).unwrap())
                .fold(BigRational::zero(), |s, x| s + x);
            let col = (1..=n).map(|i| squared_entry_with(&z, i, a).unwrap())
                .fold(BigRational::zero(), |s, x| s + x);
            prop_assert!(row.is_one());
            prop_assert!(col.is_one());
        }
    }

    #[test]
    fn zero_below_subdiagonal(z in prop::collection::vec(0.0f64..=1.0, 1..12)) {
        let n = z.len() + 1;
        for i in 3..=n {
            for j in 1..i - 1 {
                prop_assert_eq!(squared_entry_with(&z, i, j).unwrap(), 0.0);
            }
        }
        let u = build(&ParamVector::float(z).unwrap(), Mode::Float).unwrap();
        prop_assert!(u.is_hessenberg(0.0));
    }

    #[test]
    fn dropping_the_first_row_gives_the_smaller_member(z in unit_rationals(8)) {
        // Rows 3… of the (n+1)-member are rows 2… of the n-member with a zero
        // column in front; row 2 (past its first entry) is row 1 scaled by
        // √(1 − z_n).
        let big = build(&ParamVector::exact(z.clone()).unwrap(), Mode::Exact).unwrap();
        let m = z.len() + 1;
        if m < 3 { return Ok(()); }
        let small = build(&ParamVector::exact(z[..m - 2].to_vec()).unwrap(), Mode::Exact).unwrap();
        let n = m - 1;
        for r in 1..n {
            prop_assert!(big.get_exact(r + 1, 0).unwrap().is_zero());
            for c in 0..n {
                prop_assert_eq!(big.get_exact(r + 1, c + 1), small.get_exact(r, c));
            }
        }
        let scale = BigRational::one() - &z[m - 2];
        for c in 0..n {
            prop_assert_eq!(big.get_exact(1, c + 1).unwrap().square(), small.get_exact(0, c).unwrap().square() * &scale);
        }
    }

    #[test]
    fn float_gram_residual_is_tiny(z in prop::collection::vec(0.0f64..=1.0, 1..40)) {
        let n = z.len() + 1;
        let u = build(&ParamVector::float(z).unwrap(), Mode::Float).unwrap();
        prop_assert!(gram_residual(&u) <= 8.0 * n as f64 * f64::EPSILON);
    }

    #[test]
    fn radical_mul_agrees_with_floats(a in rational_in(0, false), b in rational_in(0, false), sa in -1i8..=1, sb in -1i8..=1) {
        let x = Radical::new(Sign::from_i8(sa), a).unwrap();
        let y = Radical::new(Sign::from_i8(sb), b).unwrap();
        let want = x.to_f64() * y.to_f64();
        let got = radical_mul(&x, &y).to_f64();
        prop_assert!((got - want).abs() <= 4.0 * f64::EPSILON * want.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn radical_sum_is_order_independent(
        terms in prop::collection::vec((rational_in(0, false), -1i8..=1, 1i64..4), 0..8),
        seed in any::<u64>(),
    ) {
        // Scaled copies (r·k²) land in the same class as r.
        let rads: Vec<Radical> = terms.iter().map(|(r, s, k)| {
            Radical::new(Sign::from_i8(*s), r * BigRational::from_integer((k * k).into())).unwrap()
        }).collect();
        let mut shuffled = rads.clone();
        let mut state = seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        let a: RadicalSum = rads.into_iter().collect();
        let b: RadicalSum = shuffled.into_iter().collect();
        prop_assert_eq!(&a, &b);
        prop_assert!((a.to_f64() - b.to_f64()).abs() < 1e-9);
    }

    #[test]
    fn exact_gram_is_identity(z in unit_rationals(7)) {
        let p = ParamVector::exact(z).unwrap();
        let u = build(&p, Mode::Exact).unwrap();
        let e = u.exact_entries().unwrap();
        let n = u.n();
        for a in 0..n {
            for b in a..n {
                let s: RadicalSum = (0..n).map(|k| radical_mul(&e[a * n + k], &e[b * n + k])).collect();
                if a == b {
                    prop_assert_eq!(s.as_rational(), Some(BigRational::one()));
                } else {
                    prop_assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn exact_and_float_verification_agree(z in unit_rationals(7)) {
        let p = ParamVector::exact(z).unwrap();
        let exact = verify_exact(&p).unwrap().passed;
        let float = verify_float(&build(&p, Mode::Float).unwrap(), 1e-12).unwrap().passed;
        prop_assert!(exact);
        prop_assert_eq!(exact, float);
    }

    #[test]
    fn recover_roundtrip_exact(z in interior_rationals(8)) {
        let p = ParamVector::exact(z).unwrap();
        let u = build(&p, Mode::Exact).unwrap();
        let r = recover(&u.matrix, DEFAULT_TOL).unwrap();
        prop_assert_eq!(r.z, p);
        prop_assert!(r.transform.is_identity());
    }

    #[test]
    fn recover_roundtrip_float(z in prop::collection::vec(0.01f64..0.99, 1..20)) {
        let p = ParamVector::float(z.clone()).unwrap();
        let u = build(&p, Mode::Float).unwrap();
        let r = recover(&u.matrix, DEFAULT_TOL).unwrap();
        for (a, b) in r.z.to_f64_vec().iter().zip(&z) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        prop_assert!(r.transform.is_identity());
    }

    #[test]
    fn recover_handles_sign_flips(z in unit_rationals(6), rows in any::<u16>(), cols in any::<u16>()) {
        let p = ParamVector::exact(z).unwrap();
        let n = p.n();
        let u = build(&p, Mode::Exact).unwrap();
        let flip = |bits: u16, k: usize| if bits >> k & 1 == 1 { -1 } else { 1 };
        let t = hessenberg_core::EquivalenceTransform::new(
            (0..n).map(|k| flip(rows, k)).collect(),
            (0..n).map(|k| flip(cols, k)).collect(),
            (0..n).collect(),
            (0..n).collect(),
        ).unwrap();
        let h = t.apply(&u.matrix).unwrap();
        let r = recover(&h, DEFAULT_TOL).unwrap();
        prop_assert_eq!(&r.z, &p);
        prop_assert_eq!(r.transform.apply(&u.matrix).unwrap(), h);
    }

    #[test]
    fn synthesis_roundtrips(z in interior_rationals(9)) {
        let p = ParamVector::exact(z).unwrap();
        let u = build(&p, Mode::Exact).unwrap();
        let n = u.n();
        let row: Vec<BigRational> = (0..n).map(|c| u.get_exact(0, c).unwrap().square()).collect();
        let col: Vec<BigRational> = (0..n).map(|r| u.get_exact(r, n - 1).unwrap().square()).collect();
        prop_assert_eq!(synth_first_row_squares(&row, 0.0).unwrap().params, p.clone());
        prop_assert_eq!(synth_last_column_squares(&col, 0.0).unwrap().params, p);
    }

    #[test]
    fn synthesized_first_row_matches_even_with_zeros(
        z in unit_rationals(8),
    ) {
        let u = build(&ParamVector::exact(z).unwrap(), Mode::Exact).unwrap();
        let n = u.n();
        let row: Vec<BigRational> = (0..n).map(|c| u.get_exact(0, c).unwrap().square()).collect();
        let s = synth_first_row_squares(&row, 0.0).unwrap();
        let v = build(&s.params, Mode::Exact).unwrap();
        for c in 0..n {
            prop_assert_eq!(v.get_exact(0, c), u.get_exact(0, c));
        }
        prop_assert!(hessenberg_core::sparsity_profile(&v).nnz <= hessenberg_core::construct::max_nonzeros(n));
        for k in &s.unconstrained {
            prop_assert!(s.params.as_exact().unwrap()[k - 1].is_zero());
        }
    }

    #[test]
    fn float_synthesis_of_arbitrary_unit_vectors(v in prop::collection::vec(0.0f64..1.0, 2..12)) {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let p: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let s = synth_first_row(&p, 1e-10).unwrap();
        let u = build(&s.params, Mode::Float).unwrap();
        for (c, want) in p.iter().enumerate() {
            prop_assert!((u.get_f64(0, c) - want).abs() < 1e-6, "col {c}: {} vs {want}", u.get_f64(0, c));
        }
    }
}

#[test]
fn vertices_are_signed_permutations() {
    for n in 2..=8 {
        for b in 0..(1u64 << (n - 1)) {
            let u = vertex_matrix(n, &vertex_bits(n, b)).unwrap();
            assert!(u.is_signed_permutation(0.0), "n={n} bits={b:b}");
        }
    }
}

/// Random products of adjacent Givens rotations (any angle, any sign) and a
/// final diagonal of ±1 are Hessenberg and orthogonal. Recovery must place
/// each one in the family up to signs, which exercises completeness
/// independently of the closed form.
#[test]
fn recover_random_givens_products() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for trial in 0..300 {
        let n = rng.gen_range(2..=12);
        let mut m = DMatrix::<f64>::identity(n, n);
        for k in 0..n - 1 {
            let theta: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            let (s, c) = theta.sin_cos();
            let mut g = DMatrix::<f64>::identity(n, n);
            g[(k, k)] = c;
            g[(k, k + 1)] = -s;
            g[(k + 1, k)] = s;
            g[(k + 1, k + 1)] = c;
            m *= g;
        }
        for c in 0..n {
            if rng.gen_bool(0.5) {
                m.column_mut(c).neg_mut();
            }
        }
        let entries: Vec<f64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
        let h = Matrix::from_float(n, entries).unwrap();
        assert!(h.is_hessenberg(1e-14), "trial {trial}");
        let r = recover(&h, 1e-10).unwrap_or_else(|e| panic!("trial {trial} n={n}: {e}"));
        assert!(r.transform.has_identity_perms());
    }
}
