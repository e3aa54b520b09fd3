use num_complex::Complex64;
use proptest::prelude::*;
use sharpkit::poly::{
    compose_poly, compose_tf, cos_power_expansion, eval_poly, freq_response, RealPolynomial,
    TransferFunction,
};

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 1..=max_len)
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * (1.0 + a.norm().max(b.norm()))
}

/// Denominator with roots inside the circle of radius 0.9.
fn stable_den() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0.0f64..0.9, 0.0f64..std::f64::consts::PI), 1..=2).prop_map(|roots| {
        let mut den = vec![1.0];
        for (r, a) in roots {
            let quad = [1.0, -2.0 * r * a.cos(), r * r];
            den = sharpkit::poly::convolve(&den, &quad);
        }
        den
    })
}

proptest! {
    #[test]
    fn composition_commutes_with_evaluation(
        f in coeffs(5), g in coeffs(4), re in -1.5f64..1.5, im in -1.5f64..1.5
    ) {
        let f = RealPolynomial::new(f);
        let g = RealPolynomial::new(g);
        let x = Complex64::new(re, im);
        let lhs = eval_poly(&compose_poly(&f, &g), x);
        let rhs = eval_poly(&f, eval_poly(&g, x));
        prop_assert!(close(lhs, rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn composition_is_associative(f in coeffs(3), g in coeffs(3), h in coeffs(3)) {
        let (f, g, h) = (RealPolynomial::new(f), RealPolynomial::new(g), RealPolynomial::new(h));
        let a = compose_poly(&compose_poly(&f, &g), &h);
        let b = compose_poly(&f, &compose_poly(&g, &h));
        prop_assert_eq!(a.coeffs().len(), b.coeffs().len());
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn composed_response_is_f_of_response(
        f in coeffs(5), num in coeffs(4), den in stable_den(), w in -3.1f64..3.1
    ) {
        let f = RealPolynomial::new(f);
        let g = TransferFunction::new(num, den).unwrap();
        let c = compose_tf(&f, &g);
        let lhs = freq_response(&c, w).unwrap();
        let rhs = eval_poly(&f, freq_response(&g, w).unwrap());
        prop_assert!(close(lhs, rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn composed_denominator_is_power(f in coeffs(6), num in coeffs(3), den in stable_den()) {
        let f = RealPolynomial::new(f);
        let g = TransferFunction::new(num, den.clone()).unwrap();
        let c = compose_tf(&f, &g);
        let expect = RealPolynomial::new(den).pow(f.degree());
        prop_assert_eq!(c.den().len(), expect.coeffs().len());
        for (x, y) in c.den().iter().zip(expect.coeffs()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn cos_expansion_round_trip(half in prop::collection::vec(-1.0f64..1.0, 1..=12)) {
        let l = half.len() - 1;
        let mut h = vec![0.0; 2 * l + 1];
        for (n, &v) in half.iter().enumerate() {
            h[l + n] = v;
            h[l - n] = v;
        }
        let b = cos_power_expansion(&h, l).unwrap();
        for i in 0..512 {
            let w = std::f64::consts::PI * i as f64 / 511.0;
            let direct: Complex64 = h
                .iter()
                .enumerate()
                .map(|(n, &c)| c * Complex64::from_polar(1.0, -w * (n as f64 - l as f64)))
                .sum();
            prop_assert!((b.eval_at_frequency(w) - direct.re).abs() < 1e-9);
            prop_assert!(direct.im.abs() < 1e-12);
        }
    }

    #[test]
    fn trailing_zeros_are_trimmed(mut c in coeffs(6), zeros in 0usize..4) {
        let before = RealPolynomial::new(c.clone());
        c.extend(std::iter::repeat_n(0.0, zeros));
        let after = RealPolynomial::new(c);
        prop_assert_eq!(before, after);
    }
}
