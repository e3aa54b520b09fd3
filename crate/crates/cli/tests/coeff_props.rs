use proptest::prelude::*;
use sharpkit_cli::coeffs::{format_list, format_rational, parse};

proptest! {
    #[test]
    fn list_round_trip_is_bit_exact(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..32)) {
        let back = parse(&format_list(&values)).unwrap();
        prop_assert_eq!(back.den, None);
        prop_assert_eq!(back.num.len(), values.len());
        for (a, b) in back.num.iter().zip(&values) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rational_round_trip_is_bit_exact(
        num in prop::collection::vec(-1e6f64..1e6, 1..16),
        den in prop::collection::vec(-1e6f64..1e6, 1..16),
    ) {
        let back = parse(&format_rational(&num, &den)).unwrap();
        prop_assert_eq!(back.num, num);
        prop_assert_eq!(back.den, Some(den));
    }
}
