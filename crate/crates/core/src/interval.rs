//! Certified real and complex interval arithmetic.
//!
//! Endpoints are rationals; after every operation they are rounded outward
//! to dyadic rationals with `prec` fractional bits, so that sizes stay
//! bounded while every result encloses the exact value.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{ceil_int, floor_int, qi, qr, qz, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ival {
    pub lo: Q,
    pub hi: Q,
    pub prec: u32,
}

fn scale(prec: u32) -> BigInt {
    BigInt::one() << prec
}

/// n / 2^prec in lowest terms without a general gcd.
fn dyadic(n: BigInt, prec: u32) -> Q {
    if n.is_zero() {
        return Q::zero();
    }
    let tz = n.trailing_zeros().unwrap_or(0).min(prec as u64);
    Q::new_raw(n >> tz, BigInt::one() << (prec as u64 - tz))
}

/// Already a dyadic with at most `prec` fractional bits.
fn is_dyadic(x: &Q, prec: u32) -> bool {
    let d = x.denom();
    d.bits() <= prec as u64 + 1 && d.trailing_zeros() == Some(d.bits() - 1)
}

/// Exponent k when the denominator of x is 2^k.
fn two_power(x: &Q) -> Option<u64> {
    let d = x.denom();
    let tz = d.trailing_zeros().unwrap_or(0);
    (d.bits() == tz + 1).then_some(tz)
}

/// n / 2^k reduced by shifting out common factors of two.
fn reduce2(n: BigInt, k: u64) -> Q {
    if n.is_zero() {
        return Q::zero();
    }
    let tz = n.trailing_zeros().unwrap_or(0).min(k);
    Q::new_raw(n >> tz, BigInt::one() << (k - tz))
}

// The products and sums below skip gcds; non-dyadic results may come out
// unreduced and are only ever passed straight to outward rounding.

fn qmul(a: &Q, b: &Q) -> Q {
    match (two_power(a), two_power(b)) {
        (Some(i), Some(j)) => reduce2(a.numer() * b.numer(), i + j),
        _ => Q::new_raw(a.numer() * b.numer(), a.denom() * b.denom()),
    }
}

fn qadd(a: &Q, b: &Q) -> Q {
    match (two_power(a), two_power(b)) {
        (Some(i), Some(j)) => {
            let k = i.max(j);
            reduce2((a.numer() << (k - i)) + (b.numer() << (k - j)), k)
        }
        _ => Q::new_raw(a.numer() * b.denom() + b.numer() * a.denom(), a.denom() * b.denom()),
    }
}

fn qsub(a: &Q, b: &Q) -> Q {
    qadd(a, &-b)
}

fn qcmp(a: &Q, b: &Q) -> std::cmp::Ordering {
    match (two_power(a), two_power(b)) {
        (Some(i), Some(j)) => {
            let k = i.max(j);
            (a.numer() << (k - i)).cmp(&(b.numer() << (k - j)))
        }
        _ => a.cmp(b),
    }
}

fn qmin(a: Q, b: Q) -> Q {
    if qcmp(&a, &b).is_le() {
        a
    } else {
        b
    }
}

fn qmax(a: Q, b: Q) -> Q {
    if qcmp(&a, &b).is_ge() {
        a
    } else {
        b
    }
}

fn round_down(x: &Q, prec: u32) -> Q {
    if is_dyadic(x, prec) {
        return x.clone();
    }
    if let Some(k) = two_power(x) {
        return dyadic(x.numer() >> (k - prec as u64), prec);
    }
    let n = x.numer() << prec;
    dyadic(num_integer::Integer::div_floor(&n, x.denom()), prec)
}

fn round_up(x: &Q, prec: u32) -> Q {
    if is_dyadic(x, prec) {
        return x.clone();
    }
    if let Some(k) = two_power(x) {
        return dyadic(-((-x.numer()) >> (k - prec as u64)), prec);
    }
    let n = x.numer() << prec;
    dyadic(num_integer::Integer::div_ceil(&n, x.denom()), prec)
}

impl Ival {
    pub fn new(lo: Q, hi: Q, prec: u32) -> Self {
        debug_assert!(qcmp(&lo, &hi).is_le());
        Ival { lo: round_down(&lo, prec), hi: round_up(&hi, prec), prec }
    }

    pub fn point(x: &Q, prec: u32) -> Self {
        Ival::new(x.clone(), x.clone(), prec)
    }

    pub fn int(n: i64, prec: u32) -> Self {
        Ival::point(&qi(n), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Ival::int(0, prec)
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / qi(2)
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Strictly less, certified.
    pub fn lt(&self, o: &Ival) -> bool {
        self.hi < o.lo
    }

    pub fn le(&self, o: &Ival) -> bool {
        self.hi <= o.lo
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }

    fn p2(&self, o: &Ival) -> u32 {
        self.prec.max(o.prec)
    }

    pub fn add(&self, o: &Ival) -> Ival {
        Ival::new(qadd(&self.lo, &o.lo), qadd(&self.hi, &o.hi), self.p2(o))
    }

    pub fn sub(&self, o: &Ival) -> Ival {
        Ival::new(qsub(&self.lo, &o.hi), qsub(&self.hi, &o.lo), self.p2(o))
    }

    pub fn neg(&self) -> Ival {
        Ival { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn mul(&self, o: &Ival) -> Ival {
        let c = [qmul(&self.lo, &o.lo), qmul(&self.lo, &o.hi), qmul(&self.hi, &o.lo), qmul(&self.hi, &o.hi)];
        let [a, b, c2, d] = c;
        let (lo, hi) = (qmin(qmin(a.clone(), b.clone()), qmin(c2.clone(), d.clone())), qmax(qmax(a, b), qmax(c2, d)));
        Ival::new(lo, hi, self.p2(o))
    }

    pub fn mul_q(&self, k: &Q) -> Ival {
        let (a, b) = (qmul(&self.lo, k), qmul(&self.hi, k));
        if qcmp(&a, &b).is_le() {
            Ival::new(a, b, self.prec)
        } else {
            Ival::new(b, a, self.prec)
        }
    }

    pub fn add_q(&self, k: &Q) -> Ival {
        Ival::new(qadd(&self.lo, k), qadd(&self.hi, k), self.prec)
    }

    pub fn sqr(&self) -> Ival {
        if self.contains_zero() {
            let m = self.lo.abs().max(self.hi.abs());
            Ival::new(Q::zero(), qmul(&m, &m), self.prec)
        } else {
            let (a, b) = (qmul(&self.lo, &self.lo), qmul(&self.hi, &self.hi));
            Ival::new(qmin(a.clone(), b.clone()), qmax(a, b), self.prec)
        }
    }

    pub fn recip(&self) -> Option<Ival> {
        if self.contains_zero() {
            return None;
        }
        Some(Ival::new(self.hi.recip(), self.lo.recip(), self.prec))
    }

    pub fn div(&self, o: &Ival) -> Option<Ival> {
        o.recip().map(|r| self.mul(&r))
    }

    pub fn abs(&self) -> Ival {
        if self.contains_zero() {
            Ival::new(Q::zero(), self.lo.abs().max(self.hi.abs()), self.prec)
        } else if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn max(&self, o: &Ival) -> Ival {
        Ival::new(self.lo.clone().max(o.lo.clone()), self.hi.clone().max(o.hi.clone()), self.p2(o))
    }

    pub fn min(&self, o: &Ival) -> Ival {
        Ival::new(self.lo.clone().min(o.lo.clone()), self.hi.clone().min(o.hi.clone()), self.p2(o))
    }

    /// Convex hull.
    pub fn hull(&self, o: &Ival) -> Ival {
        Ival::new(self.lo.clone().min(o.lo.clone()), self.hi.clone().max(o.hi.clone()), self.p2(o))
    }

    pub fn powi(&self, e: u32) -> Ival {
        let mut r = Ival::int(1, self.prec);
        let mut b = self.clone();
        let mut e = e;
        // odd powers keep sign information, so square only nonnegative bases
        if self.contains_zero() || self.is_negative() {
            for _ in 0..e {
                r = r.mul(self);
            }
            return r;
        }
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.sqr();
            e >>= 1;
        }
        r
    }

    /// Square root of a nonnegative interval. Negative parts are clamped to 0.
    pub fn sqrt(&self) -> Ival {
        let p = self.prec;
        let s4 = BigInt::one() << (2 * p);
        let lo = if self.lo.is_positive() {
            floor_int(&(&self.lo * qz(s4.clone()))).sqrt()
        } else {
            BigInt::zero()
        };
        let hi_n = ceil_int(&(&self.hi.clone().max(Q::zero()) * qz(s4)));
        let mut hi = hi_n.sqrt();
        if &hi * &hi < hi_n {
            hi += 1;
        }
        Ival { lo: Q::new(lo, scale(p)), hi: Q::new(hi, scale(p)), prec: p }
    }

    /// Natural logarithm of a positive interval.
    pub fn ln(&self) -> Option<Ival> {
        if !self.is_positive() {
            return None;
        }
        let lo = ln_q(&self.lo, self.prec);
        let hi = if self.hi == self.lo { lo.clone() } else { ln_q(&self.hi, self.prec) };
        Some(Ival { lo: lo.lo, hi: hi.hi, prec: self.prec })
    }

    pub fn exp(&self) -> Ival {
        let lo = exp_q(&self.lo, self.prec);
        let hi = if self.hi == self.lo { lo.clone() } else { exp_q(&self.hi, self.prec) };
        Ival { lo: lo.lo, hi: hi.hi, prec: self.prec }
    }

    pub fn pi(prec: u32) -> Ival {
        cached(&PI_CACHE, prec, compute_pi)
    }

    pub fn ln2(prec: u32) -> Ival {
        cached(&LN2_CACHE, prec, |p| atanh_q(&qr(1, 3), p).mul_q(&qi(2)))
    }

    /// Raise to a rational power via exp(e * ln x).
    pub fn pow_q(&self, e: &Q) -> Option<Ival> {
        Some(self.ln()?.mul_q(e).exp())
    }
}

type Cache = OnceLock<Mutex<HashMap<u32, Ival>>>;
static PI_CACHE: Cache = OnceLock::new();
static LN2_CACHE: Cache = OnceLock::new();

fn cached(cache: &Cache, prec: u32, f: impl Fn(u32) -> Ival) -> Ival {
    let m = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = m.lock().unwrap().get(&prec) {
        return v.clone();
    }
    let v = f(prec);
    m.lock().unwrap().insert(prec, v.clone());
    v
}

/// Guard bits used inside series evaluations.
const GUARD: u32 = 24;

/// atanh(z) for a rational |z| <= 1/2, enclosed.
fn atanh_q(z: &Q, prec: u32) -> Ival {
    let wp = prec + GUARD;
    let zi = Ival::point(z, wp);
    let z2 = zi.sqr();
    let az = round_up(&z.abs(), 64);
    let mut term = zi.clone();
    let mut sum = Ival::zero(wp);
    let eps = Q::new(BigInt::one(), scale(wp));
    let mut k: i64 = 0;
    let mut zpow = az.clone();
    loop {
        sum = sum.add(&term.mul_q(&qr(1, 2 * k + 1)));
        k += 1;
        term = term.mul(&z2);
        zpow = round_up(&(&zpow * &az * &az), wp + 8);
        // tail bound: sum_{j>=k} |z|^{2j+1}/(2j+1) <= |z|^{2k+1} / (1 - z^2)
        let tail = &zpow / (Q::one() - &az * &az);
        if tail < eps || k > 10_000 {
            let t = Ival::new(-tail.clone(), tail, wp);
            return round_to(&sum.add(&t), prec);
        }
    }
}

/// arctan(x) for rational |x| <= 1/2.
fn atan_q(x: &Q, prec: u32) -> Ival {
    let wp = prec + GUARD;
    let xi = Ival::point(x, wp);
    let x2 = xi.sqr();
    let ax = round_up(&x.abs(), 64);
    let mut term = xi;
    let mut sum = Ival::zero(wp);
    let eps = Q::new(BigInt::one(), scale(wp));
    let mut k: i64 = 0;
    let mut xpow = ax.clone();
    loop {
        let t = term.mul_q(&qr(if k % 2 == 0 { 1 } else { -1 }, 2 * k + 1));
        sum = sum.add(&t);
        k += 1;
        term = term.mul(&x2);
        xpow = round_up(&(&xpow * &ax * &ax), wp + 8);
        let tail = &xpow / qi(2 * k + 1);
        if tail < eps {
            let t = Ival::new(-tail.clone(), tail, wp);
            return round_to(&sum.add(&t), prec);
        }
    }
}

fn compute_pi(prec: u32) -> Ival {
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    let a = atan_q(&qr(1, 5), prec + 8).mul_q(&qi(16));
    let b = atan_q(&qr(1, 239), prec + 8).mul_q(&qi(4));
    round_to(&a.sub(&b), prec)
}

fn round_to(x: &Ival, prec: u32) -> Ival {
    Ival::new(x.lo.clone(), x.hi.clone(), prec)
}

/// ln of a positive rational.
fn ln_q(a: &Q, prec: u32) -> Ival {
    assert!(a.is_positive());
    // a = m * 2^k with m in [3/4, 3/2)
    let mut k: i64 = a.numer().bits() as i64 - a.denom().bits() as i64;
    let mut m = a / pow2(k);
    while m >= qr(3, 2) {
        m /= qi(2);
        k += 1;
    }
    while m < qr(3, 4) {
        m *= qi(2);
        k -= 1;
    }
    let wp = prec + GUARD + 64 - (k.unsigned_abs().leading_zeros().min(64));
    let z = (&m - Q::one()) / (&m + Q::one());
    let lm = atanh_q(&z, wp).mul_q(&qi(2));
    let r = if k == 0 { lm } else { Ival::ln2(wp).mul_q(&qi(k)).add(&lm) };
    round_to(&r, prec)
}

fn pow2(k: i64) -> Q {
    if k >= 0 {
        qz(BigInt::one() << k as u64)
    } else {
        Q::new(BigInt::one(), BigInt::one() << (-k) as u64)
    }
}

/// exp of a rational.
fn exp_q(a: &Q, prec: u32) -> Ival {
    if a.is_zero() {
        return Ival::int(1, prec);
    }
    if a.is_negative() {
        let e = exp_q(&-a, prec + 4);
        return round_to(&e.recip().expect("exp is positive"), prec);
    }
    // a / 2^j <= 1/4, then square j times
    let mut j: u32 = 0;
    let mut r = a.clone();
    while r > qr(1, 4) {
        r /= qi(2);
        j += 1;
    }
    let mag = (a.to_f64().unwrap_or(1e6) * std::f64::consts::LOG2_E).ceil().max(0.0) as u32;
    let wp = prec + GUARD + j + mag;
    let ri = Ival::point(&r, wp);
    let r = round_up(&r, 64);
    let mut term = Ival::int(1, wp);
    let mut sum = Ival::zero(wp);
    let eps = Q::new(BigInt::one(), scale(wp));
    let mut n: i64 = 0;
    let mut rpow = Q::one();
    loop {
        sum = sum.add(&term);
        n += 1;
        term = term.mul(&ri).mul_q(&qr(1, n));
        rpow = round_up(&(&rpow * &r / qi(n)), wp + 8);
        // tail <= 2 r^n / n! for r <= 1/2
        let tail = qi(2) * &rpow;
        if tail < eps {
            sum = sum.add(&Ival::new(Q::zero(), tail, wp));
            break;
        }
    }
    for _ in 0..j {
        sum = sum.sqr();
    }
    round_to(&sum, prec)
}

/// Rectangular complex interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CIval {
    pub re: Ival,
    pub im: Ival,
}

impl CIval {
    pub fn real(re: Ival) -> Self {
        let p = re.prec;
        CIval { re, im: Ival::zero(p) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec.max(self.im.prec)
    }

    pub fn add(&self, o: &CIval) -> CIval {
        CIval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &CIval) -> CIval {
        CIval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &CIval) -> CIval {
        CIval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_q(&self, k: &Q) -> CIval {
        CIval { re: self.re.mul_q(k), im: self.im.mul_q(k) }
    }

    pub fn add_q(&self, k: &Q) -> CIval {
        CIval { re: self.re.add_q(k), im: self.im.clone() }
    }

    pub fn conj(&self) -> CIval {
        CIval { re: self.re.clone(), im: self.im.neg() }
    }

    /// |z|^2
    pub fn norm_sqr(&self) -> Ival {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> Ival {
        self.norm_sqr().sqrt()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn recip(&self) -> Option<CIval> {
        let n = self.norm_sqr();
        let inv = n.recip()?;
        Some(CIval { re: self.re.mul(&inv), im: self.im.neg().mul(&inv) })
    }

    pub fn width(&self) -> Q {
        self.re.width().max(self.im.width())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: &Ival, v: f64, tol: f64) {
        assert!((x.to_f64() - v).abs() < tol, "{} vs {v}", x.to_f64());
        assert!(x.width() < Q::new(BigInt::one(), BigInt::one() << 100u32));
    }

    #[test]
    fn constants_enclose_known_values() {
        close(&Ival::pi(128), std::f64::consts::PI, 1e-15);
        close(&Ival::ln2(128), std::f64::consts::LN_2, 1e-15);
        // pi digits 3.14159265358979323846264338327950288...
        let pi = Ival::pi(200);
        let lo = crate::rational::parse_q("314159265358979323846264338327950288/100000000000000000000000000000000000").unwrap();
        let hi = crate::rational::parse_q("314159265358979323846264338327950289/100000000000000000000000000000000000").unwrap();
        assert!(pi.lo > lo && pi.hi < hi);
    }

    #[test]
    fn ln_and_exp_are_inverse() {
        for v in [qr(1, 1000), qr(3, 7), qi(1), qi(2), qi(10), qi(123456789)] {
            let l = Ival::point(&v, 128).ln().unwrap();
            let e = l.exp();
            assert!(e.contains(&v), "exp(ln({v})) = [{}, {}]", e.lo, e.hi);
            close(&l, v.to_f64().unwrap().ln(), 1e-9);
        }
        assert!(Ival::int(1, 64).ln().unwrap().contains(&Q::zero()));
        close(&Ival::point(&qi(-3), 128).exp(), (-3f64).exp(), 1e-15);
    }

    #[test]
    fn sqrt_encloses() {
        let s = Ival::int(2, 100).sqrt();
        assert!(s.sqr().contains(&qi(2)));
        let s = Ival::int(9, 100).sqrt();
        assert!(s.contains(&qi(3)));
    }
}
