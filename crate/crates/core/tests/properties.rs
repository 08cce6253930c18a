use cscx_core::coefficients::{int, Gaussian};
use cscx_core::contact::ContactChart;
use cscx_core::forms::{reassemble, split_alpha};
use cscx_core::lefschetz::{full_decomposition, reassemble_decomposition, CsChart, SymplecticFiber, TwistedForm};
use cscx_core::{Coefficient, DifferentialForm, MultiIndex, Poly, Rational, Ring, Trig};
use proptest::prelude::*;

const M: usize = 4;

fn poly(nvars: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..3, nvars), -4i64..=4), 0..5).prop_map(move |terms| {
        Poly::from_terms(nvars, terms.into_iter().map(|(e, c)| (e, int(c)))).unwrap()
    })
}

/// Real trigonometric polynomials: sums of `a cos(k·x) + b sin(k·x)`.
fn trig(nvars: usize) -> impl Strategy<Value = Trig> {
    prop::collection::vec((prop::collection::vec(-2i64..=2, nvars), -3i64..=3, -3i64..=3), 0..4).prop_map(
        move |terms| {
            let mut modes = Vec::new();
            for (k, a, b) in terms {
                // a cos + b sin = ((a - ib)/2) e^{ikx} + ((a + ib)/2) e^{-ikx}
                let half = Rational::new(1.into(), 2.into());
                let z = Gaussian::new(int(a) * &half, -int(b) * &half);
                let minus: Vec<i64> = k.iter().map(|c| -c).collect();
                modes.push((k, z.clone()));
                modes.push((minus, z.conj()));
            }
            Trig::from_modes(nvars, modes).unwrap()
        },
    )
}

fn form_with<S>(nvars: usize, degree: usize, coeff: S, ring: Ring) -> impl Strategy<Value = DifferentialForm>
where
    S: Strategy<Value = Coefficient>,
{
    let idx = MultiIndex::all(nvars, degree);
    let n = idx.len();
    prop::collection::vec((0..n.max(1), coeff), 0..4).prop_map(move |terms| {
        DifferentialForm::from_terms(nvars, ring, degree, terms.into_iter().filter(|_| n > 0).map(|(i, c)| (idx[i], c)))
            .unwrap()
    })
}

fn poly_form(nvars: usize, degree: usize) -> impl Strategy<Value = DifferentialForm> {
    form_with(nvars, degree, poly(nvars).prop_map(Coefficient::from), Ring::Poly)
}

fn trig_form(nvars: usize, degree: usize) -> impl Strategy<Value = DifferentialForm> {
    form_with(nvars, degree, trig(nvars).prop_map(Coefficient::from), Ring::Trig)
}

fn constant_form(nvars: usize, degree: usize) -> impl Strategy<Value = DifferentialForm> {
    let idx = MultiIndex::all(nvars, degree);
    prop::collection::vec(-3i64..=3, idx.len()).prop_map(move |v| {
        DifferentialForm::constant(nvars, Ring::Poly, degree, idx.iter().copied().zip(v.into_iter().map(int))).unwrap()
    })
}

fn sign(p: usize) -> Rational {
    if p.is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_ring_axioms(a in poly(3), b in poly(3), c in poly(3)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn trig_ring_axioms(a in trig(2), b in trig(2), c in trig(2)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn leibniz_rule(a in poly(3), b in poly(3), axis in 0usize..3) {
        let lhs = (&a * &b).derivative(axis).unwrap();
        let rhs = &(&a.derivative(axis).unwrap() * &b) + &(&a * &b.derivative(axis).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn mixed_partials_commute(a in poly(3), t in trig(3), i in 0usize..3, j in 0usize..3) {
        prop_assert_eq!(
            a.derivative(i).unwrap().derivative(j).unwrap(),
            a.derivative(j).unwrap().derivative(i).unwrap()
        );
        prop_assert_eq!(
            t.derivative(i).unwrap().derivative(j).unwrap(),
            t.derivative(j).unwrap().derivative(i).unwrap()
        );
    }

    #[test]
    fn trig_reality_is_preserved(a in trig(2), b in trig(2), axis in 0usize..2) {
        prop_assert!(a.is_real());
        prop_assert!((&a * &b).is_real());
        prop_assert!(a.derivative(axis).unwrap().is_real());
    }

    #[test]
    fn d_squared_vanishes(f in poly_form(M, 1), g in trig_form(M, 2)) {
        prop_assert!(f.exterior_derivative().exterior_derivative().is_zero());
        prop_assert!(g.exterior_derivative().exterior_derivative().is_zero());
    }

    #[test]
    fn graded_leibniz(a in poly_form(M, 1), b in poly_form(M, 2), c in trig_form(M, 2), e in trig_form(M, 1)) {
        let lhs = a.wedge(&b).unwrap().exterior_derivative();
        let rhs = &a.exterior_derivative().wedge(&b).unwrap() + &a.wedge(&b.exterior_derivative()).unwrap().scale(&sign(1));
        prop_assert_eq!(lhs, rhs);
        let lhs = c.wedge(&e).unwrap().exterior_derivative();
        let rhs = &c.exterior_derivative().wedge(&e).unwrap() + &c.wedge(&e.exterior_derivative()).unwrap().scale(&sign(2));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reeb_lie_derivative_commutes_with_d(f in poly_form(5, 2), lam in prop::sample::select(vec![(1i64, 1i64), (2, 1), (-3, 1), (1, 5)])) {
        let chart = ContactChart::standard(2).unwrap().with_xi_scale(Rational::new(lam.0.into(), lam.1.into())).unwrap();
        let xi = chart.xi();
        let lhs = f.exterior_derivative().lie_derivative(xi).unwrap();
        let rhs = f.lie_derivative(xi).unwrap().exterior_derivative();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn split_round_trip(f in poly_form(5, 2), g in poly_form(5, 3)) {
        let chart = ContactChart::standard(2).unwrap().with_xi_scale(int(3)).unwrap();
        for form in [f, g] {
            let (h, a) = split_alpha(&form, chart.alpha_xi(), chart.xi());
            prop_assert!(h.interior_product(chart.xi()).unwrap().is_zero());
            prop_assert_eq!(reassemble(&h, &a, chart.alpha_xi()).unwrap(), form);
        }
    }

    #[test]
    fn primitive_projection_is_idempotent(f in constant_form(M, 2), g in constant_form(M, 3)) {
        let fiber = SymplecticFiber::standard(2);
        for form in [f, g] {
            let p = fiber.project(&form).unwrap();
            prop_assert!(fiber.is_primitive(&p).unwrap());
            prop_assert_eq!(fiber.project(&p).unwrap(), p);
        }
    }

    #[test]
    fn lefschetz_decomposition_round_trip(f in constant_form(6, 2), g in constant_form(6, 3), h in constant_form(6, 4)) {
        let chart = CsChart::affine(3).unwrap();
        for form in [f, g, h] {
            let k = form.degree();
            let parts = full_decomposition(&chart, &TwistedForm::plain(form.clone())).unwrap();
            prop_assert_eq!(reassemble_decomposition(&chart, &parts, k).unwrap(), form);
        }
    }
}

#[test]
fn lefschetz_commutator_is_scalar() {
    for n in [2usize, 3] {
        let fiber = SymplecticFiber::standard(n);
        for j in 0..=2 * n {
            let c = fiber.commutator(j).scalar_value().expect("scalar commutator");
            assert_eq!(c, int(j as i64 - n as i64), "n = {n}, j = {j}");
        }
    }
}

#[test]
fn zero_form_is_fixed_by_everything() {
    let z = DifferentialForm::zero(M, Ring::Poly, 2);
    assert!(z.exterior_derivative().is_zero());
    assert!(SymplecticFiber::standard(2).project(&z).unwrap().is_zero());
}
