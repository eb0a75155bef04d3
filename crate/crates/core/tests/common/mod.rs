//! Shared strategies for the randomized suites.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use purkit::coefficients::Scalar;
use purkit::ore::{MultiIndex, OpMatrix, ScalarOp};

pub const N: usize = 2;
pub const CASES: u32 = 200;

pub fn config() -> Config {
    Config { cases: CASES, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

pub fn monomial(e: (u32, u32)) -> Scalar {
    &Scalar::var(0).pow(e.0) * &Scalar::var(1).pow(e.1)
}

pub const MONOMIALS: [(u32, u32); 5] = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)];

pub fn poly() -> impl Strategy<Value = Scalar> {
    prop::collection::vec(-3i64..=3, MONOMIALS.len()).prop_map(|cs| {
        cs.iter().zip(MONOMIALS).fold(Scalar::zero(), |acc, (&c, m)| &acc + &(&Scalar::from_int(c) * &monomial(m)))
    })
}

pub fn scalar() -> impl Strategy<Value = Scalar> {
    (poly(), -2i64..=2, -2i64..=2).prop_map(|(num, a, b)| {
        // 1 + a x1 + b x2 never vanishes identically
        let den = &(&Scalar::one() + &(&Scalar::from_int(a) * &Scalar::var(0))) + &(&Scalar::from_int(b) * &Scalar::var(1));
        num.div(&den).expect("nonzero denominator")
    })
}

pub fn light_scalar() -> impl Strategy<Value = Scalar> {
    (poly(), 0usize..3).prop_map(|(num, k)| {
        let den = [Scalar::one(), &Scalar::one() + &Scalar::var(0), Scalar::var(1)][k].clone();
        num.div(&den).expect("nonzero denominator")
    })
}

pub fn multi_index() -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..N, 0..=2).prop_map(|axes| MultiIndex::from_axes(&axes))
}

pub fn op() -> impl Strategy<Value = ScalarOp> {
    prop::collection::vec((multi_index(), light_scalar()), 0..=2)
        .prop_map(|terms| terms.into_iter().fold(ScalarOp::zero(), |acc, (mu, a)| &acc + &ScalarOp::term(mu, a)))
}

pub fn matrix(p: usize, m: usize) -> impl Strategy<Value = OpMatrix> {
    prop::collection::vec(prop::collection::vec(op(), m), p).prop_map(move |e| OpMatrix::from_entries(N, m, e))
}

pub fn composable() -> impl Strategy<Value = (OpMatrix, OpMatrix)> {
    (1usize..=2, 1usize..=2, 1usize..=2).prop_flat_map(|(p, m, k)| (matrix(p, m), matrix(m, k)))
}

pub fn small_matrix() -> impl Strategy<Value = OpMatrix> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(p, m)| matrix(p, m))
}
