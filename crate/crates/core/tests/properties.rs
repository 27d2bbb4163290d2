mod common;

use std::sync::Arc;

use ::thue_mahler as tm;
use common::{ctx, fields, PREC};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use tm::interval::Ival;
use tm::number_field::{FieldElement, NumberField};
use tm::places::{height, product_formula_check};
use tm::rational::{parse_q, Q};
use tm::s_arith::{SContext, SUnitExponents};

fn rational() -> impl Strategy<Value = Q> {
    (-5000i64..=5000, 1i64..=600).prop_map(|(n, d)| Q::new(n.into(), d.into()))
}

fn field_index() -> impl Strategy<Value = usize> {
    0usize..5
}

fn element(k: &NumberField, c: &[Q]) -> FieldElement {
    k.from_basis_coords(&c[..k.d])
}

fn coords() -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(rational(), 3)
}

fn small_coords() -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec((-60i64..=60, 1i64..=24).prop_map(|(n, d)| Q::new(n.into(), d.into())), 3)
}

thread_local! {
    static FIELDS: Vec<(&'static str, Arc<NumberField>)> = fields();
    static CONTEXTS: Vec<SContext> = fields().iter().map(|(_, k)| ctx(k, &[2, 3])).collect();
}

fn field(i: usize) -> Arc<NumberField> {
    FIELDS.with(|f| f[i].1.clone())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn interval_ops_enclose_exact_results(a in rational(), b in rational(), prec in 8u32..200) {
        let (x, y) = (Ival::point(&a, prec), Ival::point(&b, prec));
        prop_assert!(x.contains(&a));
        prop_assert!(x.add(&y).contains(&(&a + &b)));
        prop_assert!(x.sub(&y).contains(&(&a - &b)));
        prop_assert!(x.mul(&y).contains(&(&a * &b)));
        prop_assert!(x.sqr().contains(&(&a * &a)));
        prop_assert!(x.mul_q(&b).contains(&(&a * &b)));
        prop_assert!(x.add_q(&b).contains(&(&a + &b)));
        if !b.is_zero() {
            prop_assert!(x.div(&y).unwrap().contains(&(&a / &b)));
        }
    }

    #[test]
    fn ring_laws(i in field_index(), a in coords(), b in coords(), c in coords()) {
        let k = field(i);
        let (a, b, c) = (element(&k, &a), element(&k, &b), element(&k, &c));
        prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
        prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
        prop_assert_eq!(k.norm(&k.mul(&a, &b)), k.norm(&a) * k.norm(&b));
        prop_assert_eq!(k.trace(&k.add(&a, &b)), k.trace(&a) + k.trace(&b));
        if !a.is_zero() {
            prop_assert_eq!(k.mul(&a, &k.inv(&a).unwrap()), k.one());
        }
    }

    #[test]
    fn parse_display_round_trip(i in field_index(), a in coords()) {
        let k = field(i);
        let a = element(&k, &a);
        prop_assert_eq!(k.parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn product_formula_holds(i in field_index(), a in small_coords()) {
        let k = field(i);
        let a = element(&k, &a);
        prop_assume!(!a.is_zero());
        let r = product_formula_check(&k, &a, &parse_q("1/100000000000000000000").unwrap(), PREC).unwrap();
        prop_assert!(r.pass);
    }

    #[test]
    fn height_is_inversion_invariant(i in field_index(), a in small_coords()) {
        let k = field(i);
        let a = element(&k, &a);
        prop_assume!(!a.is_zero());
        let (h, hi) = (height(&k, &a, PREC), height(&k, &k.inv(&a).unwrap(), PREC));
        prop_assert!(!h.is_negative());
        prop_assert!(!h.sub(&hi).abs().lt(&Ival::zero(PREC)) && h.sub(&hi).abs().hi < parse_q("1/1000000000000").unwrap());
    }

    #[test]
    fn s_norm_is_multiplicative_and_dual(i in field_index(), a in small_coords(), b in small_coords()) {
        let (a, b, ok) = CONTEXTS.with(|cs| {
            let c = &cs[i];
            let k = c.k();
            let (a, b) = (element(k, &a), element(k, &b));
            if a.is_zero() || b.is_zero() {
                return (Q::one(), Q::one(), true);
            }
            let ab = k.mul(&a, &b);
            let dual = c.s_norm_ideal(&a).unwrap() == c.s_norm_places(&a).unwrap();
            (c.s_norm(&ab).unwrap(), c.s_norm(&a).unwrap() * c.s_norm(&b).unwrap(), dual)
        });
        prop_assert!(ok);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn s_unit_exponents_round_trip(i in field_index(), t in 0u32..4, e in prop::collection::vec(-4i64..=4, 6)) {
        CONTEXTS.with(|cs| -> Result<(), TestCaseError> {
            let c = &cs[i];
            let exps = SUnitExponents { torsion: t % c.w(), units: e[..c.r].to_vec(), primes: e[c.r..c.r + c.t].to_vec() };
            let u = c.build(&exps).unwrap();
            prop_assert!(c.is_s_unit(&u));
            prop_assert_eq!(c.s_norm(&u).unwrap(), Q::one());
            prop_assert_eq!(c.exponents(&u).unwrap(), exps);
            Ok(())
        })?;
    }
}

thread_local! {
    static FAMILY: (SContext, tm::constants::ProblemData, Vec<tm::thue_mahler::FamilySolution>) = {
        let c = ctx(&field(0), &[2, 3]);
        let k = c.k();
        let pd = tm::constants::problem_data(&c, &k.one(), &[k.one(), k.from_int(2), k.from_int(3)]).unwrap();
        let sols = tm::thue_mahler::solve_family_direct(&c, &pd, 2, 1, 1 << 30).unwrap();
        (c, pd, sols)
    };
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn family_solutions_verify_and_perturbations_fail(pick in any::<prop::sample::Index>(), which in 0usize..7, bump in 1i64..5) {
        use tm::thue_mahler::{classify_subsums, s3_dependence_test, verify_family_solution};
        FAMILY.with(|(c, pd, sols)| -> Result<(), TestCaseError> {
            let k = c.k();
            let s = &sols[pick.index(sols.len())];
            let t = s.tuple();
            let again = verify_family_solution(c, pd, &t).unwrap();
            prop_assert!(!again.trivial);
            prop_assert!(s3_dependence_test(c, s, &again).unwrap().is_some());
            prop_assert!(classify_subsums(c, pd, s, 2, None).is_ok());
            let mut bad = t.clone();
            bad[which] = k.add(&bad[which], &k.from_int(bump));
            let mut lhs = bad[2].clone();
            for j in 0..3 {
                lhs = k.mul(&lhs, &k.sub(&bad[0], &k.mul(&k.mul(&pd.alphas[j], &bad[3 + j]), &bad[1])));
            }
            if lhs != k.mul(&pd.mu, &bad[6]) {
                prop_assert!(verify_family_solution(c, pd, &bad).is_err());
            }
            Ok(())
        })?;
    }
}

#[test]
fn s_norm_and_units_over_q() {
    let c = ctx(&field(0), &[2]);
    let k = c.k();
    assert_eq!(c.s_norm(&k.from_int(40)).unwrap(), Q::from_integer(BigInt::from(5)));
    assert!(!c.is_s_unit(&k.from_q(&parse_q("-3/8").unwrap())));
    assert!(c.is_s_unit(&k.from_q(&parse_q("-1/8").unwrap())));
}
