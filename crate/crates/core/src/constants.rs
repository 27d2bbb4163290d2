//! Explicit constants: d(N), the unit-equation bounds, c₃, κ₁…κ₆, q and m.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::interval::Ival;
use crate::number_field::FieldElement;
use crate::places::{places_above, support_primes, valuation};
use crate::rational::{ceil_int, exact_sqrt, factorize, floor_int, log10_int, qi, qz, split_prime, Q};
use crate::s_arith::{DeltaK, SContext};

/// Working precision for constant evaluation.
pub const PREC: u32 = 160;

/// An exact integer, or a dyadic upper bound mant·2^exp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedUpper {
    pub exact: Option<BigInt>,
    pub mant: BigInt,
    pub exp: i64,
}

impl CertifiedUpper {
    pub fn exact(n: BigInt) -> Self {
        CertifiedUpper { exact: Some(n.clone()), mant: n, exp: 0 }
    }

    /// Upper bound from an enclosure of its natural logarithm.
    pub fn from_ln(l: &Ival) -> Self {
        let ln2 = Ival::ln2(PREC);
        let e = floor_int(&(&l.hi / &ln2.lo)).to_i64().expect("exponent fits i64") - 62;
        let shifted = Ival::point(&l.hi, PREC).sub(&ln2.mul_q(&qi(e))).exp();
        CertifiedUpper { exact: None, mant: ceil_int(&shifted.hi), exp: e }.normalized()
    }

    /// Upper bound for a nonnegative quantity known through an enclosure.
    pub fn from_ival(x: &Ival) -> Self {
        if !x.hi.is_positive() {
            return CertifiedUpper::exact(BigInt::zero());
        }
        if x.lo == x.hi && x.hi.is_integer() {
            return CertifiedUpper::exact(x.hi.to_integer());
        }
        CertifiedUpper::from_ln(&Ival::point(&x.hi, PREC).ln().expect("positive"))
    }

    fn normalized(mut self) -> Self {
        if self.exact.is_some() {
            return self;
        }
        let bits = self.mant.bits() as i64;
        if bits > 64 {
            let sh = bits - 64;
            let m = &self.mant >> sh as u64;
            self.mant = if (&m << sh as u64) == self.mant { m } else { m + 1 };
            self.exp += sh;
        }
        self
    }

    pub fn upper(&self) -> Q {
        if self.exp >= 0 {
            qz(&self.mant << self.exp as u64)
        } else {
            Q::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn ln_upper(&self) -> Ival {
        if self.mant.is_zero() {
            return Ival::zero(PREC);
        }
        Ival::point(&qz(self.mant.clone()), PREC)
            .ln()
            .unwrap()
            .add(&Ival::ln2(PREC).mul_q(&qi(self.exp)))
    }

    pub fn log10(&self) -> f64 {
        if let Some(n) = &self.exact {
            return if n.is_zero() { f64::NEG_INFINITY } else { log10_int(n) };
        }
        log10_int(&self.mant) + self.exp as f64 * std::f64::consts::LOG10_2
    }

    pub fn mul(&self, o: &CertifiedUpper) -> CertifiedUpper {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => CertifiedUpper::exact(a * b),
            _ => CertifiedUpper { exact: None, mant: &self.mant * &o.mant, exp: self.exp + o.exp }.normalized(),
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> CertifiedUpper {
        self.mul(&CertifiedUpper::exact(n.clone()))
    }

    pub fn pow(&self, e: u32) -> CertifiedUpper {
        let mut acc = CertifiedUpper::exact(BigInt::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Whether the bound certifies n ≤ value.
    pub fn admits(&self, n: &BigInt) -> bool {
        qz(n.clone()) <= self.upper()
    }

    /// Exact values of at most 40 digits as decimal strings, larger exact
    /// values as {"exact", "log10"}, otherwise {"upper": "m*2^e", "log10"}.
    pub fn to_json(&self) -> Value {
        match &self.exact {
            Some(n) if n.to_string().len() <= 40 => json!(n.to_string()),
            Some(n) => json!({ "exact": n.to_string(), "log10": format!("{:.6}", self.log10()) }),
            None => json!({
                "upper": format!("{}*2^{}", self.mant, self.exp),
                "log10": format!("{:.6}", self.log10()),
            }),
        }
    }
}

/// Number of positive divisors.
pub fn divisor_count(n: &BigInt) -> Result<BigInt> {
    if !n.is_positive() {
        return Err(Error::InvalidInput("d(N) needs N ≥ 1".into()));
    }
    Ok(factorize(n)?.iter().fold(BigInt::one(), |acc, (_, e)| acc * (e + 1)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitBoundVariant {
    Evertse,
    AmorosoViada,
}

/// Bound on the number of nondegenerate solutions of an ℓ-term unit equation
/// in a group of rank s.
pub fn evertse_bound(l: u32, s: u32, variant: UnitBoundVariant) -> Result<CertifiedUpper> {
    if l < 2 {
        return Err(Error::InvalidInput("unit equation needs ℓ ≥ 2".into()));
    }
    let v = match variant {
        UnitBoundVariant::Evertse if l == 2 => BigInt::one() << (8 * s + 24),
        UnitBoundVariant::Evertse => {
            let base = (BigInt::one() << 33u32) * BigInt::from((l + 1) * (l + 1));
            num_traits::pow(base, (l * l * l * s) as usize)
        }
        UnitBoundVariant::AmorosoViada => num_traits::pow(BigInt::from(8 * l), (4 * l.pow(4) * (l + s + 1)) as usize),
    };
    Ok(CertifiedUpper::exact(v))
}

/// κ₃ = 1 + 2^{8s+24} and κ₄ = 1 + (2^{4375}3^{250})^s.
pub fn small_kappas(s: u32) -> (BigInt, BigInt) {
    let k3 = (BigInt::one() << (8 * s + 24)) + 1;
    let base = (BigInt::one() << 4375u32) * num_traits::pow(BigInt::from(3), 250);
    let k4 = num_traits::pow(base, s as usize) + 1;
    (k3, k4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum C3Variant {
    /// ½ r^{r+1} δ_K^{−(r−1)}
    Paper,
    /// 0, 1/d, or 29e·r!·r·√(r−1)·log d
    Alt,
}

/// Enclosure of c₃.
pub fn c3(r: usize, d: usize, delta: &Ival, variant: C3Variant) -> Ival {
    let p = PREC;
    match variant {
        C3Variant::Paper => {
            if r == 0 {
                return Ival::zero(p);
            }
            let rr = Ival::int(r as i64, p).powi(r as u32 + 1).mul_q(&Q::new(BigInt::one(), BigInt::from(2)));
            let dp = delta.powi(r as u32 - 1);
            rr.div(&dp).expect("δ_K > 0")
        }
        C3Variant::Alt => match r {
            0 => Ival::zero(p),
            1 => Ival::point(&Q::new(BigInt::one(), BigInt::from(d)), p),
            _ => {
                let fact: i64 = (1..=r as i64).product();
                Ival::int(1, p)
                    .exp()
                    .mul_q(&qi(29 * fact * r as i64))
                    .mul(&Ival::int(r as i64 - 1, p).sqrt())
                    .mul(&Ival::int(d as i64, p).ln().unwrap())
            }
        },
    }
}

/// Problem data for the family equation: μ, α₁, α₂, α₃, q, k = N_S(μ), m = N_S(q³μ).
#[derive(Clone, Debug)]
pub struct ProblemData {
    pub mu: FieldElement,
    pub alphas: [FieldElement; 3],
    pub q: BigInt,
    pub k: Q,
    pub m: BigInt,
    pub ns_q: BigInt,
}

/// Least positive integer q with q·a ∈ O_S for every a in `xs`.
pub fn minimal_denominator(ctx: &SContext, xs: &[FieldElement]) -> Result<BigInt> {
    let k = ctx.k();
    if k.d == 1 {
        let mut q = BigInt::one();
        for x in xs {
            let mut den = x.c[0].denom().clone();
            for &p in &ctx.rational_primes {
                den = split_prime(&den, p).1;
            }
            q = q.lcm(&den);
        }
        return Ok(q);
    }
    let mut primes: Vec<u64> = Vec::new();
    for x in xs {
        primes.extend(support_primes(k, x)?);
    }
    primes.sort_unstable();
    primes.dedup();
    let mut q = BigInt::one();
    for p in primes {
        let mut need = 0i64;
        for pr in places_above(k, p)? {
            if ctx.primes.iter().any(|s| s.ideal == pr) {
                continue;
            }
            for x in xs {
                let o = valuation(k, x, &pr)?;
                if o < 0 {
                    need = need.max(Integer::div_ceil(&(-o), &(pr.e as i64)));
                }
            }
        }
        q *= num_traits::pow(BigInt::from(p), need as usize);
    }
    Ok(q)
}

pub fn problem_data(ctx: &SContext, mu: &FieldElement, alphas: &[FieldElement; 3]) -> Result<ProblemData> {
    if mu.is_zero() || alphas.iter().any(|a| a.is_zero()) {
        return Err(Error::ZeroElement);
    }
    let k = ctx.k();
    let q = minimal_denominator(ctx, alphas)?;
    let q3mu = k.scale(mu, &qz(&q * &q * &q));
    if !ctx.is_s_integer(&q3mu) {
        return Err(Error::Precondition("q³μ is not in O_S, so the family equation has no solution".into()));
    }
    let kk = ctx.s_norm(mu)?;
    let mq = ctx.s_norm(&q3mu)?;
    if !mq.is_integer() {
        return Err(Error::Inconsistent("N_S(q³μ) is not an integer".into()));
    }
    let ns_q = ctx.s_norm(&k.from_bigint(&q))?;
    if !ns_q.is_integer() || ns_q > qz(num_traits::pow(q.clone(), k.d)) {
        return Err(Error::Inconsistent("N_S(q) exceeds q^d".into()));
    }
    let ns_q = ns_q.to_integer();
    if qz(num_traits::pow(ns_q.clone(), 3)) * &kk != mq {
        return Err(Error::Inconsistent("m ≠ N_S(q)³k".into()));
    }
    Ok(ProblemData { mu: mu.clone(), alphas: alphas.clone(), q, k: kk, m: mq.to_integer(), ns_q })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PiExponent {
    /// π^{r₂}, as in the box-counting lemma.
    R2,
    /// π^{r²}, the literal form of the κ₅ display.
    RSquared,
}

#[derive(Clone, Debug)]
pub struct ConstantsReport {
    pub nu: BigInt,
    pub t: usize,
    pub r: usize,
    pub s: usize,
    pub theta: Ival,
    pub regulator: Ival,
    pub h_k: u64,
    pub c3: Ival,
    pub kappa3: CertifiedUpper,
    pub kappa4: CertifiedUpper,
    pub kappa5: CertifiedUpper,
    pub kappa6: CertifiedUpper,
    pub kappa1: CertifiedUpper,
    pub kappa2: CertifiedUpper,
    pub m: BigInt,
}

/// κ₅ = 2^{r+1} π^{r₂} |D_K|^{−1/2} e^{c₃dR_K} ν^{tdh_K} (1+θ)^d.
pub fn kappa5(ctx: &SContext, c3v: &Ival, pi_exp: PiExponent) -> CertifiedUpper {
    let k = ctx.k();
    let p = PREC;
    let d = k.d as i64;
    let r = ctx.r;
    let pi_pow = match pi_exp {
        PiExponent::R2 => k.r2 as u32,
        PiExponent::RSquared => (r * r) as u32,
    };
    let theta = k.theta(p);
    let reg = &ctx.unit_data.regulator;
    let tdh = BigInt::from(ctx.t as u64 * k.d as u64 * ctx.unit_data.h_k);
    let disc = qz(k.disc.abs());
    let exact_sqrt_d = exact_sqrt(&disc);
    if let (true, Some(sd)) = (pi_pow == 0 && c3v.hi.is_zero() && theta.lo == theta.hi, exact_sqrt_d) {
        let nu_pow = num_traits::pow(ctx.nu.clone(), tdh.to_usize().unwrap());
        let v = qz(BigInt::from(2).pow(r as u32 + 1)) * qz(nu_pow) * crate::rational::qpow(&(theta.lo.clone() + Q::one()), d)
            / sd;
        if v.is_integer() {
            return CertifiedUpper::exact(v.to_integer());
        }
    }
    let mut l = Ival::ln2(p).mul_q(&qi(r as i64 + 1));
    if pi_pow > 0 {
        l = l.add(&Ival::pi(p).ln().unwrap().mul_q(&qi(pi_pow as i64)));
    }
    l = l.sub(&Ival::point(&disc, p).ln().unwrap().mul_q(&Q::new(BigInt::one(), BigInt::from(2))));
    l = l.add(&c3v.mul(reg).mul_q(&qi(d)));
    if !tdh.is_zero() {
        l = l.add(&Ival::point(&qz(ctx.nu.clone()), p).ln().unwrap().mul_q(&qz(tdh)));
    }
    l = l.add(&theta.add_q(&Q::one()).ln().unwrap().mul_q(&qi(d)));
    CertifiedUpper::from_ln(&l)
}

pub fn kappa_report(
    ctx: &SContext,
    pd: &ProblemData,
    delta: &DeltaK,
    c3_variant: C3Variant,
    pi_exp: PiExponent,
) -> Result<ConstantsReport> {
    let k = ctx.k();
    let c3v = c3(ctx.r, k.d, &delta.value, c3_variant);
    let k5 = kappa5(ctx, &c3v, pi_exp);
    let dm = divisor_count(&pd.m)?;
    let k6 = CertifiedUpper::exact(&dm * &dm).mul(&k5.pow(3)).mul_int(&pd.m);
    let (k3, k4) = small_kappas(ctx.s as u32);
    let k3 = CertifiedUpper::exact(k3);
    let k4 = CertifiedUpper::exact(k4);
    let k1 = k6.mul(&k3.pow(2)).mul(&k4.pow(2));
    let k2 = k1.mul_int(&BigInt::from(4));
    Ok(ConstantsReport {
        nu: ctx.nu.clone(),
        t: ctx.t,
        r: ctx.r,
        s: ctx.s,
        theta: k.theta(PREC),
        regulator: ctx.unit_data.regulator.clone(),
        h_k: ctx.unit_data.h_k,
        c3: c3v,
        kappa3: k3,
        kappa4: k4,
        kappa5: k5,
        kappa6: k6,
        kappa1: k1,
        kappa2: k2,
        m: pd.m.clone(),
    })
}

/// Decimal rendering of an enclosure: lower and upper endpoints.
pub fn ival_json(x: &Ival) -> Value {
    json!({ "lo": format!("{:.20e}", x.lo.to_f64().unwrap_or(f64::NAN)), "hi": format!("{:.20e}", x.hi.to_f64().unwrap_or(f64::NAN)) })
}

impl ConstantsReport {
    pub fn to_json(&self) -> Value {
        json!({
            "nu": self.nu.to_string(),
            "t": self.t,
            "r": self.r,
            "s": self.s,
            "m": self.m.to_string(),
            "theta": ival_json(&self.theta),
            "R_K": ival_json(&self.regulator),
            "h_K": self.h_k,
            "c3": ival_json(&self.c3),
            "kappa1": self.kappa1.to_json(),
            "kappa2": self.kappa2.to_json(),
            "kappa3": self.kappa3.to_json(),
            "kappa4": self.kappa4.to_json(),
            "kappa5": self.kappa5.to_json(),
            "kappa6": self.kappa6.to_json(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_field::NumberField;
    use crate::rational::qr;
    use crate::s_arith::{delta_k, PrimeSelector};
    use std::sync::Arc;

    fn ctx(poly: &[i64], primes: &[u64]) -> SContext {
        let k = Arc::new(NumberField::from_poly(poly).unwrap());
        SContext::new(k, &PrimeSelector::all(primes), 128).unwrap()
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(&BigInt::from(1)).unwrap(), BigInt::from(1));
        assert_eq!(divisor_count(&BigInt::from(12)).unwrap(), BigInt::from(6));
        assert_eq!(divisor_count(&BigInt::from(97)).unwrap(), BigInt::from(2));
        assert!(divisor_count(&BigInt::zero()).is_err());
    }

    #[test]
    fn unit_equation_bounds() {
        let e = |l, s| evertse_bound(l, s, UnitBoundVariant::Evertse).unwrap().exact.unwrap();
        assert_eq!(e(2, 1), BigInt::one() << 32u32);
        assert_eq!(e(3, 1), BigInt::one() << 999u32);
        assert_eq!(e(2, 0), BigInt::one() << 24u32);
        assert!(evertse_bound(1, 0, UnitBoundVariant::Evertse).is_err());
        let (k3, k4) = small_kappas(1);
        assert_eq!(k3, BigInt::from(4294967297u64));
        assert_eq!(&k3 - 1, e(2, 1));
        assert!((log10_int(&(&k4 - 1)) - 1436.29).abs() < 0.01);
        assert_eq!(&k4 - 1, num_traits::pow((BigInt::one() << 33u32) * 36, 125));
        assert_eq!(small_kappas(0).1, BigInt::from(2));
    }

    #[test]
    fn c3_values() {
        let d = Ival::point(&qr(1, 10), PREC);
        assert!(c3(0, 1, &d, C3Variant::Paper).hi.is_zero());
        assert_eq!(c3(1, 2, &d, C3Variant::Paper).mid(), qr(1, 2));
        assert!((c3(2, 3, &d, C3Variant::Paper).to_f64() - 40.0).abs() < 1e-12);
        assert_eq!(c3(1, 2, &d, C3Variant::Alt).mid(), qr(1, 2));
    }

    #[test]
    fn minimal_q() {
        let c = ctx(&[0, 1], &[]);
        let k = c.k();
        let a = [k.from_q(&qr(1, 2)), k.from_q(&qr(1, 3)), k.one()];
        let pd = problem_data(&c, &k.one(), &a).unwrap();
        assert_eq!((pd.q.clone(), pd.m.clone()), (BigInt::from(6), BigInt::from(216)));
        let c = ctx(&[0, 1], &[2]);
        let a = [k.from_q(&qr(1, 2)), k.one(), k.one()];
        assert_eq!(problem_data(&c, &k.one(), &a).unwrap().q, BigInt::one());
    }

    #[test]
    fn rational_kappas() {
        let c = ctx(&[0, 1], &[]);
        let k = c.k();
        let pd = problem_data(&c, &k.one(), &[k.one(), k.one(), k.one()]).unwrap();
        let dk = delta_k(k, &qr(7, 10), 1 << 20, 128).unwrap();
        let rep = kappa_report(&c, &pd, &dk, C3Variant::Paper, PiExponent::R2).unwrap();
        assert_eq!(rep.kappa5.exact, Some(BigInt::from(4)));
        assert_eq!(rep.kappa6.exact, Some(BigInt::from(64)));
        let k3 = BigInt::from(16777217);
        assert_eq!(rep.kappa1.exact, Some(BigInt::from(64) * &k3 * &k3 * 4));
        let c = ctx(&[0, 1], &[2]);
        assert_eq!(kappa5(&c, &Ival::zero(PREC), PiExponent::R2).exact, Some(BigInt::from(8)));
    }

    #[test]
    fn kappa5_monotone_in_inputs() {
        let c = ctx(&[-1, -1, 1], &[2]);
        let d = Ival::point(&qr(48, 100), PREC);
        let base = kappa5(&c, &c3(1, 2, &d, C3Variant::Paper), PiExponent::R2);
        let bigger = kappa5(&c, &c3(1, 2, &d, C3Variant::Paper).add_q(&qr(1, 100)), PiExponent::R2);
        assert!(base.upper() <= bigger.upper());
        let mut c2 = c.clone();
        c2.nu += 1;
        assert!(base.upper() <= kappa5(&c2, &c3(1, 2, &d, C3Variant::Paper), PiExponent::R2).upper());
        let mut c3c = c.clone();
        c3c.unit_data.h_k = 2;
        assert!(base.upper() <= kappa5(&c3c, &c3(1, 2, &d, C3Variant::Paper), PiExponent::R2).upper());
        // direct f64 evaluation: 4·π⁰·5^{-1/2}·e^{0.5·2·log φ}·4^{2}·(1+θ)²
        let th = c.k().theta(64).to_f64();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let direct = 4.0 / 5f64.sqrt() * phi * 16.0 * (1.0 + th).powi(2);
        let got = base.upper().to_f64().unwrap();
        assert!(got >= direct && got < direct * (1.0 + 1e-12));
    }
}
