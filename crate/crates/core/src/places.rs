//! Places of K with the normalized absolute values
//! |σa| (real), |σa|² (complex) and N(𝔓)^{-ord_𝔓 a} (finite).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::Ival;
use crate::number_field::{FieldElement, NumberField};
use crate::poly::Poly;
use crate::poly_fp::FpPoly;
use crate::rational::{factorize, lcm_denoms, qz, split_prime, Q};

/// A prime ideal 𝔓 = (p, g(θ)) of O_K above a rational prime p that does
/// not divide the index of Z[θ].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    /// Position among the primes above p, in canonical factor order.
    pub index: usize,
    /// Second generator g(θ).
    pub gen: FieldElement,
    /// An integral τ with v_𝔓(τ/p) = −1 and τ/p integral at every other prime.
    tau: FieldElement,
}

impl PrimeIdeal {
    pub fn norm(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.f as usize)
    }

    pub fn label(&self) -> String {
        format!("{}:{}", self.p, self.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Place {
    /// Archimedean place given by embedding `index`, local degree `dv`.
    Arch { index: usize, dv: u32 },
    Finite(PrimeIdeal),
}

impl Place {
    pub fn label(&self) -> String {
        match self {
            Place::Arch { index, dv } => format!("inf{index}{}", if *dv == 2 { "c" } else { "" }),
            Place::Finite(p) => p.label(),
        }
    }
}

pub fn arch_places(k: &NumberField) -> Vec<Place> {
    (0..k.n_arch()).map(|v| Place::Arch { index: v, dv: k.local_degree(v) }).collect()
}

/// Coordinates in the power basis of θ = a₀α.
pub fn theta_coords(k: &NumberField, a: &FieldElement) -> Vec<Q> {
    let mut s = Q::one();
    let a0 = qz(k.a0.clone());
    a.c.iter()
        .map(|c| {
            let r = c / &s;
            s *= &a0;
            r
        })
        .collect()
}

fn from_theta_poly(k: &NumberField, h: &Poly) -> FieldElement {
    let t = k.theta_gen();
    let mut r = k.zero();
    for c in h.coeffs().iter().rev() {
        r = k.add(&k.mul(&r, &t), &k.from_q(c));
    }
    r
}

fn is_p_integral(k: &NumberField, a: &FieldElement, p: u64) -> bool {
    let pb = BigInt::from(p);
    theta_coords(k, a).iter().all(|c| !(c.denom() % &pb).is_zero() || c.is_zero())
}

/// All primes of O_K above p, ordered by (residue degree, factor coefficients).
pub fn places_above(k: &NumberField, p: u64) -> Result<Vec<PrimeIdeal>> {
    if !crate::rational::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let g = &k.theta_poly;
    let gp = FpPoly::from_poly(g, p);
    let fac = gp.factor();
    // Dedekind criterion: g = Π g_i^{e_i} + p F; p is regular iff no repeated g_i divides F mod p
    let mut prod = Poly::one();
    for (h, e) in &fac {
        prod = prod.mul(&h.to_poly().pow(*e));
    }
    let fpoly = g.sub(&prod).scale(&Q::new(BigInt::one(), BigInt::from(p)));
    let fbar = FpPoly::from_poly(&fpoly, p);
    for (h, e) in &fac {
        if *e >= 2 && fbar.rem(h).is_zero() {
            return Err(Error::IndexDivisor(p));
        }
    }
    let mut out = Vec::new();
    for (i, (h, e)) in fac.iter().enumerate() {
        let cof = gp.divrem(h).0;
        let tau = from_theta_poly(k, &cof.to_poly());
        out.push(PrimeIdeal {
            p,
            e: *e,
            f: h.deg() as u32,
            index: i,
            gen: from_theta_poly(k, &h.to_poly()),
            tau,
        });
    }
    let sum: u32 = out.iter().map(|q| q.e * q.f).sum();
    if sum as usize != k.d {
        return Err(Error::Inconsistent(format!("sum of e*f above {p} is {sum}")));
    }
    Ok(out)
}

/// ord_𝔓(a) for a ≠ 0.
pub fn valuation(k: &NumberField, a: &FieldElement, pr: &PrimeIdeal) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    let tc = theta_coords(k, a);
    let den = lcm_denoms(tc.iter());
    let (vd, _) = split_prime(&den, pr.p);
    let mut x = k.scale(a, &qz(den));
    let step = k.scale(&pr.tau, &Q::new(BigInt::one(), BigInt::from(pr.p)));
    let mut n: i64 = 0;
    loop {
        let y = k.mul(&x, &step);
        if !is_p_integral(k, &y, pr.p) {
            break;
        }
        x = y;
        n += 1;
    }
    Ok(n - (pr.e as i64) * vd as i64)
}

/// Normalized absolute value.
#[derive(Clone, Debug)]
pub enum AbsValue {
    Enclosed(Ival),
    Exact(Q),
}

pub fn abs_value(k: &NumberField, a: &FieldElement, v: &Place, prec: u32) -> AbsValue {
    match v {
        Place::Arch { index, .. } => AbsValue::Enclosed(k.arch_abs(a, *index, prec)),
        Place::Finite(pr) => {
            if a.is_zero() {
                return AbsValue::Exact(Q::zero());
            }
            let o = valuation(k, a, pr).expect("nonzero");
            AbsValue::Exact(crate::rational::qpow(&qz(pr.norm()), -o))
        }
    }
}

/// Rational primes at which a nonzero element can have nonzero valuation.
pub fn support_primes(k: &NumberField, a: &FieldElement) -> Result<Vec<u64>> {
    let den = lcm_denoms(theta_coords(k, a).iter());
    let x = k.scale(a, &qz(den.clone()));
    let n = k.norm(&x);
    let mut ps: Vec<u64> = factorize(&den)?.into_iter().map(|(p, _)| p).collect();
    ps.extend(factorize(n.numer())?.into_iter().map(|(p, _)| p));
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}

/// log max{1, x} for a positive enclosure.
fn log_plus(x: &Ival) -> Ival {
    let one = Q::one();
    if x.hi <= one {
        return Ival::zero(x.prec);
    }
    if x.lo >= one {
        return x.ln().expect("positive");
    }
    let top = Ival::point(&x.hi, x.prec).ln().expect("positive");
    Ival::new(Q::zero(), top.hi, x.prec)
}

/// Absolute logarithmic height h(a) = (1/d) Σ_v log max{1, |a|_v}.
///
/// Evaluated through the Mahler measure of the characteristic polynomial,
/// which accounts for every finite place at once.
pub fn height(k: &NumberField, a: &FieldElement, prec: u32) -> Ival {
    if a.is_zero() {
        return Ival::zero(prec);
    }
    let cp = k.charpoly(a).primitive();
    let lc = cp.last().unwrap().abs();
    let mut s = Ival::point(&qz(lc), prec).ln().expect("positive");
    for z in k.embed(a, prec + 16) {
        let m = z.abs();
        s = s.add(&log_plus(&m));
    }
    s.mul_q(&Q::new(BigInt::one(), BigInt::from(k.d)))
}

#[derive(Clone, Debug)]
pub struct ProductFormulaReport {
    /// Enclosure of Σ_v log|a|_v.
    pub sum: Ival,
    /// Exact product of the finite absolute values.
    pub finite_product: Q,
    pub pass: bool,
}

/// Check Σ_v log|a|_v = 0 to within `tol`.
pub fn product_formula_check(k: &NumberField, a: &FieldElement, tol: &Q, prec: u32) -> Result<ProductFormulaReport> {
    if a.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut fin = Q::one();
    for p in support_primes(k, a)? {
        for pr in places_above(k, p)? {
            let o = valuation(k, a, &pr)?;
            fin *= crate::rational::qpow(&qz(pr.norm()), -o);
        }
    }
    let mut arch = Ival::int(1, prec);
    for v in 0..k.n_arch() {
        arch = arch.mul(&k.arch_abs(a, v, prec));
    }
    let sum = arch.mul_q(&fin).ln().ok_or_else(|| Error::Undecided("archimedean product not positive".into()))?;
    let pass = sum.lo.abs() < *tol && sum.hi.abs() < *tol;
    Ok(ProductFormulaReport { sum, finite_product: fin, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qi, qr};

    fn gauss() -> NumberField {
        NumberField::from_poly(&[1, 0, 1]).unwrap()
    }

    #[test]
    fn splitting_in_gaussian_integers() {
        let k = gauss();
        let p5 = places_above(&k, 5).unwrap();
        assert_eq!(p5.len(), 2);
        assert!(p5.iter().all(|q| q.e == 1 && q.f == 1 && q.norm() == BigInt::from(5)));
        let p2 = places_above(&k, 2).unwrap();
        assert_eq!((p2.len(), p2[0].e, p2[0].norm()), (1, 2, BigInt::from(2)));
        let p3 = places_above(&k, 3).unwrap();
        assert_eq!((p3.len(), p3[0].f, p3[0].norm()), (1, 2, BigInt::from(9)));
        assert_eq!(valuation(&k, &k.from_int(2), &p2[0]).unwrap(), 2);
        assert_eq!(valuation(&k, &k.parse("1:1").unwrap(), &p2[0]).unwrap(), 1);
        assert_eq!(valuation(&k, &k.parse("1/2:0").unwrap(), &p2[0]).unwrap(), -2);
        // 2 + i and 2 - i lie in different primes above 5
        let a = k.parse("2:1").unwrap();
        let v: Vec<i64> = p5.iter().map(|q| valuation(&k, &a, q).unwrap()).collect();
        assert_eq!(v.iter().sum::<i64>(), 1);
    }

    #[test]
    fn index_divisor_rejected() {
        // x^2 + 3: Z[sqrt -3] has index 2 in the maximal order
        let k = NumberField::from_poly(&[3, 0, 1]).unwrap();
        assert_eq!(places_above(&k, 2).unwrap_err(), Error::IndexDivisor(2));
        assert!(places_above(&k, 3).is_ok());
    }

    #[test]
    fn rational_absolute_values() {
        let q = NumberField::rationals();
        let p2 = places_above(&q, 2).unwrap().remove(0);
        assert_eq!(valuation(&q, &q.from_int(12), &p2).unwrap(), 2);
        match abs_value(&q, &q.from_int(12), &Place::Finite(p2), 64) {
            AbsValue::Exact(x) => assert_eq!(x, qr(1, 4)),
            _ => panic!(),
        }
        let k = gauss();
        match abs_value(&k, &k.parse("1:1").unwrap(), &Place::Arch { index: 0, dv: 2 }, 64) {
            AbsValue::Enclosed(x) => assert!(x.contains(&qi(2))),
            _ => panic!(),
        }
    }

    #[test]
    fn heights() {
        let q = NumberField::rationals();
        assert!(height(&q, &q.one(), 64).contains(&Q::zero()));
        let h2 = height(&q, &q.from_int(2), 64);
        assert!((h2.to_f64() - 2f64.ln()).abs() < 1e-15);
        let h = height(&q, &q.parse("3/2").unwrap(), 64);
        assert!((h.to_f64() - 3f64.ln()).abs() < 1e-15);
        let k = NumberField::from_poly(&[-1, -1, 1]).unwrap();
        let h = height(&k, &k.alpha(), 64);
        assert!((h.to_f64() - 0.2406059125298).abs() < 1e-12);
    }

    #[test]
    fn product_formula_examples() {
        let q = NumberField::rationals();
        let tol = Q::new(BigInt::one(), num_traits::pow(BigInt::from(10), 20));
        assert!(product_formula_check(&q, &q.from_int(12), &tol, 128).unwrap().pass);
        let k = NumberField::from_poly(&[-1, -1, 0, 1]).unwrap();
        let a = k.parse("3/7:-2:5/4").unwrap();
        assert!(product_formula_check(&k, &a, &tol, 128).unwrap().pass);
        assert_eq!(product_formula_check(&q, &q.zero(), &tol, 64).unwrap_err(), Error::ZeroElement);
    }
}
