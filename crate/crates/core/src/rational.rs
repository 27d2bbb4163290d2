//! Small helpers over big integers and rationals.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qz(n: BigInt) -> Q {
    Q::from_integer(n)
}

pub fn floor_int(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil_int(x: &Q) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Exponent of the prime `p` in the nonzero integer `n`, and the cofactor.
pub fn split_prime(n: &BigInt, p: u64) -> (u32, BigInt) {
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut e = 0;
    if n.is_zero() {
        return (0, n);
    }
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return (e, n);
        }
        n = q;
        e += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn vp(x: &Q, p: u64) -> i64 {
    let (a, _) = split_prime(x.numer(), p);
    let (b, _) = split_prime(x.denom(), p);
    a as i64 - b as i64
}

/// Factor a nonzero integer: trial division by small primes, then
/// Miller–Rabin and Pollard–Brent on the cofactor. Prime factors must fit in
/// u64, which every prime handled by the field code does.
pub fn factorize(n: &BigInt) -> crate::Result<Vec<(u64, u32)>> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return Ok(out);
    }
    let mut p: u64 = 2;
    while p < 1 << 12 {
        if n.is_one() {
            return Ok(out);
        }
        if BigInt::from(p * p) > n {
            break;
        }
        let (e, rest) = split_prime(&n, p);
        if e > 0 {
            out.push((p, e));
            n = rest;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut large: Vec<BigInt> = Vec::new();
    if !n.is_one() {
        split_large(n, &mut large);
    }
    large.sort();
    for q in large {
        let q = q.to_u64().ok_or_else(|| crate::Error::InvalidInput(format!("prime factor {q} exceeds 2^64")))?;
        match out.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    Ok(out)
}

fn split_large(n: BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    let mut c = 1u64;
    let d = loop {
        if let Some(d) = pollard_brent(&n, &BigInt::from(c)) {
            break d;
        }
        c += 1;
    };
    let rest = &n / &d;
    split_large(d, out);
    split_large(rest, out);
}

/// Miller–Rabin with the first twelve prime bases: deterministic below
/// 3.3·10²⁴, a strong probable-prime test beyond.
pub fn is_probable_prime(n: &BigInt) -> bool {
    let bases = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if *n < BigInt::from(2) {
        return false;
    }
    for b in bases {
        if *n == BigInt::from(b) {
            return true;
        }
        if (n % b).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'base: for b in bases {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// A nontrivial factor of the composite n from x ↦ x² + c, if this c works.
fn pollard_brent(n: &BigInt, c: &BigInt) -> Option<BigInt> {
    if n.is_even() {
        return Some(BigInt::from(2));
    }
    let f = |x: &BigInt| (x * x + c) % n;
    let (mut y, mut r, mut q) = (BigInt::from(2), 1u64, BigInt::one());
    let m = 64u64;
    let (mut g, mut x, mut ys) = (BigInt::one(), BigInt::zero(), BigInt::zero());
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (g != *n).then_some(g)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exact square root of a nonnegative rational, if it exists.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &n * &n == *x.numer() && &d * &d == *x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Exact k-th root of a positive rational, if it exists.
pub fn exact_root(x: &Q, k: u32) -> Option<Q> {
    if x.is_negative() || k == 0 {
        return None;
    }
    let n = x.numer().nth_root(k);
    let d = x.denom().nth_root(k);
    if num_traits::pow(n.clone(), k as usize) == *x.numer()
        && num_traits::pow(d.clone(), k as usize) == *x.denom()
    {
        Some(Q::new(n, d))
    } else {
        None
    }
}

pub fn qpow(x: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Decimal logarithm of a positive big integer, accurate to ~1e-12.
pub fn log10_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 900 {
        return n.to_f64().unwrap_or(f64::INFINITY).log10();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}

pub fn log10_q(x: &Q) -> f64 {
    log10_int(x.numer()) - log10_int(x.denom())
}

pub fn sign_of(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Parse "a", "-a" or "a/b" into a rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else if let Some((i, f)) = s.split_once('.') {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = i.starts_with('-');
        let whole: BigInt = if i.is_empty() || i == "-" { BigInt::zero() } else { i.parse().ok()? };
        let scale = num_traits::pow(BigInt::from(10), f.len());
        let frac = Q::new(f.parse().ok()?, scale);
        Some(if neg { qz(whole) - frac } else { qz(whole) + frac })
    } else {
        Some(qz(s.parse().ok()?))
    }
}

pub fn q_to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
