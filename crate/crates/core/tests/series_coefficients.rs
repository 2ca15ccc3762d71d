use delta_resonance::stirling::{series_coefficient, stirling_cycle, StirlingTable};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Cycle counts by the falling-factorial expansion of x(x+1)...(x+p-1).
fn rising_factorial_row(p: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    for i in 0..p {
        let mut next = vec![0u128; row.len() + 1];
        for (q, &c) in row.iter().enumerate() {
            next[q + 1] += c;
            next[q] += c * i as u128;
        }
        row = next;
    }
    row
}

#[test]
fn matches_rising_factorial_coefficients() {
    for p in 0..=30 {
        let row = rising_factorial_row(p);
        for (q, &expected) in row.iter().enumerate() {
            assert_eq!(
                stirling_cycle(p, q).unwrap(),
                BigUint::from(expected),
                "[{p},{q}]"
            );
        }
    }
}

#[test]
fn unit_coefficients_invert_m() {
    for m in 1..=50 {
        let c = series_coefficient(0, m).unwrap();
        assert_eq!(
            c.value * BigRational::from_integer(m.into()),
            BigRational::one()
        );
    }
}

#[test]
fn out_of_table_is_an_error() {
    let t = StirlingTable::new(10);
    assert!(t.get(11, 3).is_err());
    assert!(t.get(10, 3).is_ok());
    assert!(series_coefficient(3, 0).is_err());
}

proptest! {
    #[test]
    fn recurrence_holds(p in 1usize..120, q in 1usize..120) {
        let lhs = stirling_cycle(p, q).unwrap();
        let rhs = stirling_cycle(p - 1, q - 1).unwrap()
            + BigUint::from(p - 1) * stirling_cycle(p - 1, q).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn row_sums_are_factorials(p in 0usize..60) {
        let sum: BigUint = (0..=p).map(|q| stirling_cycle(p, q).unwrap()).sum();
        let fact: BigUint = (1..=p).map(BigUint::from).product();
        prop_assert_eq!(sum, fact);
    }

    #[test]
    fn coefficient_sign_and_value(j in 0usize..20, m in 1usize..20) {
        let c = series_coefficient(j, m).unwrap();
        let m_fact: BigUint = (1..=m).map(BigUint::from).product();
        let magnitude = BigRational::new(
            stirling_cycle(j + m, j + 1).unwrap().into(),
            m_fact.into(),
        );
        let expected = if j % 2 == 0 { magnitude } else { -magnitude };
        prop_assert!(!c.value.is_zero());
        prop_assert_eq!(c.value, expected);
    }
}
