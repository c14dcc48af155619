mod common;

use common::{max_diff, random_block};
use proptest::prelude::*;
use quasicopy::block::{BlockOperator, Structure};
use quasicopy::linalg;

fn dims() -> impl Strategy<Value = usize> {
    prop_oneof![Just(1usize), Just(2), Just(4), Just(8)]
}

/// Which blocks of `x·y` can be nonzero given which blocks of `x` and `y` are present.
/// Bits: 1 = diag_top, 2 = diag_bot, 4 = off_top, 8 = off_bot.
fn product_mask(x: u8, y: u8) -> u8 {
    let has = |m: u8, bit: u8| m & bit != 0;
    let mut out = 0;
    if (has(x, 1) && has(y, 1)) || (has(x, 4) && has(y, 8)) {
        out |= 1;
    }
    if (has(x, 2) && has(y, 2)) || (has(x, 8) && has(y, 4)) {
        out |= 2;
    }
    if (has(x, 1) && has(y, 4)) || (has(x, 4) && has(y, 2)) {
        out |= 4;
    }
    if (has(x, 2) && has(y, 8)) || (has(x, 8) && has(y, 1)) {
        out |= 8;
    }
    out
}

fn present(op: &BlockOperator) -> u8 {
    [op.diag_top(), op.diag_bot(), op.off_top(), op.off_bot()]
        .iter()
        .enumerate()
        .map(|(k, b)| if b.is_some() { 1u8 << k } else { 0 })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn multiplication_is_a_homomorphism(d in dims(), mx in 0u8..16, my in 0u8..16, sx: u64, sy: u64) {
        let (x, y) = (random_block(d, mx, sx), random_block(d, my, sy));
        let xy = x.try_mul(&y).unwrap();
        prop_assert!(max_diff(&xy.to_dense(), &(x.to_dense() * y.to_dense())) <= 1e-12);
        prop_assert_eq!(present(&xy), product_mask(mx, my));
    }

    #[test]
    fn addition_is_exact(d in dims(), mx in 0u8..16, my in 0u8..16, sx: u64, sy: u64) {
        let (x, y) = (random_block(d, mx, sx), random_block(d, my, sy));
        let sum = x.try_add(&y).unwrap();
        prop_assert_eq!(sum.to_dense(), x.to_dense() + y.to_dense());
        prop_assert_eq!(present(&sum), mx | my);
    }

    #[test]
    fn adjoint_is_an_involution(d in dims(), m in 0u8..16, s: u64) {
        let x = random_block(d, m, s);
        prop_assert_eq!(x.adjoint().adjoint(), x.clone());
        prop_assert_eq!(x.adjoint().to_dense(), x.to_dense().adjoint());
        // Off-diagonal blocks trade places.
        let swapped = (m & 0b0011) | ((m & 4) << 1) | ((m & 8) >> 1);
        prop_assert_eq!(present(&x.adjoint()), swapped);
    }

    #[test]
    fn adjoint_reverses_products(d in dims(), mx in 0u8..16, my in 0u8..16, sx: u64, sy: u64) {
        let (x, y) = (random_block(d, mx, sx), random_block(d, my, sy));
        let lhs = x.try_mul(&y).unwrap().adjoint();
        let rhs = y.adjoint().try_mul(&x.adjoint()).unwrap();
        prop_assert!(max_diff(&lhs.to_dense(), &rhs.to_dense()) <= 1e-12);
    }

    #[test]
    fn trace_conjugates_under_adjoint(d in dims(), m in 0u8..16, s: u64) {
        let x = random_block(d, m, s);
        prop_assert_eq!(x.adjoint().trace(), x.trace().conj());
        prop_assert!((x.trace() - x.to_dense().trace()).norm() <= 1e-12);
    }

    #[test]
    fn dense_round_trip(d in dims(), m in 0u8..16, s: u64) {
        let x = random_block(d, m, s);
        let back = BlockOperator::from_dense(&x.to_dense(), d).unwrap();
        prop_assert_eq!(back.to_dense(), x.to_dense());
    }

    #[test]
    fn json_round_trip(d in dims(), m in 0u8..16, s: u64) {
        let x = random_block(d, m, s);
        let text = serde_json::to_string(&x).unwrap();
        let back: BlockOperator = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn structure_table() {
    let a = random_block(3, 0b0011, 1);
    let b = random_block(3, 0b1100, 2);
    assert_eq!(a.structure(), Structure::DirectSum);
    assert_eq!(b.structure(), Structure::BoxSum);
    assert_eq!(a.try_mul(&a).unwrap().structure(), Structure::DirectSum);
    assert_eq!(a.try_mul(&b).unwrap().structure(), Structure::BoxSum);
    assert_eq!(b.try_mul(&a).unwrap().structure(), Structure::BoxSum);
    assert_eq!(b.try_mul(&b).unwrap().structure(), Structure::DirectSum);
    assert_eq!(BlockOperator::zero(3).structure(), Structure::Zero);
    assert_eq!(a.try_add(&b).unwrap().structure(), Structure::Mixed);
}

#[test]
fn identity_is_neutral() {
    for d in [1, 2, 4, 8] {
        let x = random_block(d, 0b1111, d as u64);
        let one = BlockOperator::identity(d);
        assert_eq!(one.try_mul(&x).unwrap().to_dense(), x.to_dense());
        assert_eq!(x.try_mul(&one).unwrap().to_dense(), x.to_dense());
        assert_eq!(one.to_dense(), linalg::identity(2 * d));
    }
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let x = random_block(2, 0b1111, 1);
    let y = random_block(3, 0b1111, 2);
    assert!(x.try_mul(&y).is_err());
    assert!(x.try_add(&y).is_err());
    assert!(BlockOperator::from_dense(&linalg::identity(3), 2).is_err());
}
