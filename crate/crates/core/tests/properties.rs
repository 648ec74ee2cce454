use ccc_core::coframe::checks::{dd_zero, reconstruction};
use ccc_core::cone::sample_cone_modp;
use ccc_core::flatten::antiderivative;
use ccc_core::funcfield::{BigInt, PrimeField, Rationals, Scalars};
use ccc_core::xi::constraints::tangent_lines_nondegenerate;
use ccc_core::xi::{in_span_of_arguments, iota, recover_eta};
use ccc_core::{adapted_cone, models, parse_ratfunc, BigRational, Hypersurface, MultiPoly, RatFunc, XiConfig};
use num_traits::Zero;
use proptest::prelude::*;

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recover_eta_inverts_iota(eta in prop::collection::vec(-20i64..20, 3..7)) {
        let eta: Vec<BigRational> = eta.into_iter().map(rat).collect();
        let sigma = iota(&Rationals, &eta);
        let back = recover_eta(&Rationals, &sigma, 0.0).unwrap();
        prop_assert_eq!(back, Some(eta));
    }

    #[test]
    fn iota_values_lie_in_the_argument_span(
        eta in prop::collection::vec(-9i64..9, 4),
        u in prop::collection::vec(-9i64..9, 4),
        v in prop::collection::vec(-9i64..9, 4),
    ) {
        let f = Rationals;
        let eta: Vec<BigRational> = eta.into_iter().map(rat).collect();
        let u: Vec<BigRational> = u.into_iter().map(rat).collect();
        let v: Vec<BigRational> = v.into_iter().map(rat).collect();
        prop_assert!(in_span_of_arguments(&f, &iota(&f, &eta), &u, &v));
    }

    #[test]
    fn antiderivative_recovers_polynomial_potentials(
        coeffs in prop::collection::vec(-5i64..5, 10),
        base in prop::collection::vec(-3i64..3, 3),
    ) {
        let monos = ["1", "x1", "x2", "x3", "x1^2", "x1*x2", "x2*x3^2", "x3^3", "x1*x2*x3", "x2^2"];
        let text = coeffs
            .iter()
            .zip(monos)
            .map(|(c, m)| format!("({c})*{m}"))
            .collect::<Vec<_>>()
            .join(" + ");
        let h = parse_ratfunc(&text, &names(3)).unwrap();
        let form: Vec<RatFunc> = (0..3).map(|i| h.diff(i).unwrap()).collect();
        let base: Vec<BigRational> = base.into_iter().map(rat).collect();
        let pot = antiderivative(&form, &base).unwrap().expect("polynomial potential");
        prop_assert!(pot.logs.is_empty());
        let diff = &pot.rational - &h;
        prop_assert!(diff.is_constant());
        prop_assert!(pot.rational.evaluate(&base, &Rationals).unwrap().is_zero());
    }

    #[test]
    fn antiderivative_recovers_logarithms(
        a in 1i64..4,
        b in -3i64..3,
        q in prop::sample::select(vec![-2i64, -1, 1, 3]),
    ) {
        // h = q log(1 + a x1 + b x2) + x3
        let p = format!("1 + {a}*x1 + ({b})*x2");
        let pr = parse_ratfunc(&p, &names(3)).unwrap();
        let form: Vec<RatFunc> = (0..3)
            .map(|i| {
                let t = (&pr.diff(i).unwrap() / &pr).scale(&rat(q));
                if i == 2 { &t + &RatFunc::one(3) } else { t }
            })
            .collect();
        let base = vec![rat(0); 3];
        let pot = antiderivative(&form, &base).unwrap().expect("log potential");
        prop_assert_eq!(pot.logs.len(), 1);
        prop_assert_eq!(&pot.logs[0].coeff, &rat(q));
        prop_assert_eq!(pot.gradient(), form);
    }

    #[test]
    fn random_coframes_satisfy_dd_zero_and_reconstruction(seed in 0u64..1000, deg in 1u32..3) {
        let c = models::random_polynomial(3, deg, seed).unwrap();
        prop_assert!(dd_zero(&c).pass);
        prop_assert!(reconstruction(&c).pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sampled_cone_points_satisfy_the_cone_equation(seed in 0u64..10_000) {
        let z = Hypersurface::fermat(3, 4).unwrap();
        let c = models::random_polynomial(3, 1, seed % 7).unwrap();
        let cs = adapted_cone(&c, &z).unwrap();
        let p = 1_000_003;
        let field = PrimeField::new(p).unwrap();
        for pt in sample_cone_modp(&cs, 4, seed, p).unwrap() {
            prop_assert_eq!(z.f().evaluate(&pt.u, &field).unwrap(), 0);
            let a = c.matrix_at(&pt.x, &field).unwrap();
            for (row, uk) in a.iter().zip(&pt.u) {
                let ay = row.iter().zip(&pt.y).fold(0, |acc, (r, y)| field.add(&acc, &field.mul(r, y)));
                prop_assert_eq!(ay, *uk);
            }
            let mut xy = pt.x.clone();
            xy.extend(pt.y.iter().copied());
            prop_assert_eq!(cs.cone_equation().evaluate(&xy, &field).unwrap(), 0);
        }
    }

    #[test]
    fn tangent_line_rank_is_bounded(d in 2u32..6, seed in 0u64..50) {
        let z = Hypersurface::fermat(3, d).unwrap();
        let cfg = XiConfig { seed, ..XiConfig::default() };
        let r = tangent_lines_nondegenerate(&z, &cfg).unwrap();
        prop_assert!(r.rank <= 3);
        prop_assert_eq!(r.expected, 3);
    }
}

#[test]
fn fermat_polynomial_is_what_it_says() {
    let z = Hypersurface::fermat(3, 4).unwrap();
    let direct = MultiPoly::from_terms(
        3,
        (0..3)
            .map(|i| {
                let mut m = vec![0u16; 3];
                m[i] = 4;
                (m, rat(1))
            }),
    );
    assert_eq!(z.f(), &direct);
}

/// Products of inverse-matrix entries share split denominator factors on
/// both sides; their values must match the product of values.
#[test]
fn products_with_shared_denominator_factors_evaluate_correctly() {
    let f = Rationals;
    let pt = vec![
        BigRational::new(1.into(), 3.into()),
        BigRational::new(2.into(), 7.into()),
        BigRational::new((-1).into(), 5.into()),
    ];
    for seed in [602u64, 11, 88] {
        let c = models::random_polynomial(3, 2, seed).unwrap();
        let b: Vec<&RatFunc> = c.inverse().iter().flatten().collect();
        let vals: Vec<BigRational> = b.iter().map(|e| e.evaluate(&pt, &f).unwrap()).collect();
        for (x, vx) in b.iter().zip(&vals) {
            for (y, vy) in b.iter().zip(&vals) {
                let p = *x * *y;
                assert_eq!(p.evaluate(&pt, &f).unwrap(), vx * vy, "seed {seed}");
                let d = &p - &(*y * *x);
                assert!(d.is_zero(), "seed {seed}");
            }
        }
        assert!(reconstruction(&c).pass, "seed {seed}");
    }
}
