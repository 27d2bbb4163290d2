#![allow(dead_code)]

use std::sync::Arc;

use ::thue_mahler as tm;
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tm::number_field::{FieldElement, NumberField};
use tm::rational::Q;
use tm::s_arith::{PrimeSelector, SContext};

pub const PREC: u32 = 128;

/// The fields used throughout: Q, Q(i), Q(√2), Q(√5) and the cubic x³ − x − 1.
pub fn fields() -> Vec<(&'static str, Arc<NumberField>)> {
    let mk = |c: &[i64]| Arc::new(NumberField::from_poly(c).unwrap());
    vec![
        ("Q", Arc::new(NumberField::rationals())),
        ("Q(i)", mk(&[1, 0, 1])),
        ("Q(sqrt2)", mk(&[-2, 0, 1])),
        ("Q(sqrt5)", mk(&[-1, -1, 1])),
        ("x^3-x-1", mk(&[-1, -1, 0, 1])),
    ]
}

pub fn ctx(k: &Arc<NumberField>, primes: &[u64]) -> SContext {
    SContext::new(k.clone(), &PrimeSelector::all(primes), PREC).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// An algebraic integer with basis coordinates in [−b, b].
pub fn random_integer(k: &NumberField, rng: &mut ChaCha8Rng, b: i64) -> FieldElement {
    let c: Vec<BigInt> = (0..k.d).map(|_| BigInt::from(rng.gen_range(-b..=b))).collect();
    k.from_basis_ints(&c)
}

pub fn random_nonzero_integer(k: &NumberField, rng: &mut ChaCha8Rng, b: i64) -> FieldElement {
    loop {
        let a = random_integer(k, rng, b);
        if !a.is_zero() {
            return a;
        }
    }
}

/// A nonzero element with small numerators and denominators.
pub fn random_element(k: &NumberField, rng: &mut ChaCha8Rng) -> FieldElement {
    loop {
        let c: Vec<Q> = (0..k.d).map(|_| Q::new(BigInt::from(rng.gen_range(-40..=40)), BigInt::from(rng.gen_range(1..=12)))).collect();
        let a = k.from_basis_coords(&c);
        if !a.is_zero() {
            return a;
        }
    }
}
