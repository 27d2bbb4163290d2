//! Polynomials over a prime field F_p, with complete factorization.
//!
//! Primes are small (desk scale), so coefficients live in `u64` and all
//! products fit in `u128`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    pub p: u64,
    /// Constant term first; no trailing zeros.
    pub c: Vec<u64>,
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    r
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    /// Reduce an integral polynomial modulo p. Panics on p-adic denominators.
    pub fn from_poly(f: &Poly, p: u64) -> Self {
        let pb = BigInt::from(p);
        let c = f
            .coeffs()
            .iter()
            .map(|x| {
                let d = x.denom().mod_floor(&pb);
                assert!(d.to_u64() != Some(0), "denominator divisible by p");
                let n = x.numer().mod_floor(&pb).to_u64().unwrap();
                mulm(n, inv_mod(d.to_u64().unwrap(), p), p)
            })
            .collect();
        FpPoly::new(p, c)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_ints(&self.c.iter().map(|&x| x as i64).collect::<Vec<_>>())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn one(p: u64) -> Self {
        FpPoly::new(p, vec![1])
    }

    fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let p = self.p;
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                (a + p - b) % p
            })
            .collect();
        FpPoly::new(p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FpPoly::new(self.p, vec![]);
        }
        let p = self.p;
        let mut r = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                r[i + j] = (r[i + j] + mulm(a, b, p)) % p;
            }
        }
        FpPoly::new(p, r)
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero());
        let p = self.p;
        let dd = d.deg();
        let inv = inv_mod(*d.c.last().unwrap(), p);
        let mut r = self.c.clone();
        if r.len() < d.c.len() {
            return (FpPoly::new(p, vec![]), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let t = mulm(r[k + dd], inv, p);
            if t != 0 {
                for (j, &b) in d.c.iter().enumerate() {
                    r[k + j] = (r[k + j] + p - mulm(t, b, p)) % p;
                }
            }
            q[k] = t;
        }
        r.truncate(dd);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(*self.c.last().unwrap(), self.p);
        FpPoly::new(self.p, self.c.iter().map(|&a| mulm(a, inv, self.p)).collect())
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        FpPoly::new(
            p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| mulm(a, i as u64 % p, p))
                .collect(),
        )
    }

    fn powmod(&self, mut e: BigInt, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut r = FpPoly::one(self.p).rem(m);
        let two = BigInt::from(2);
        while e > BigInt::from(0) {
            if e.is_odd() {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e /= &two;
        }
        r
    }

    /// p-th root of a polynomial whose derivative vanishes.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        let c = self.c.iter().step_by(p).copied().collect();
        FpPoly::new(self.p, c)
    }

    /// Squarefree decomposition: list of (factor, multiplicity), factors monic.
    fn squarefree_decomposition(&self) -> Vec<(FpPoly, u32)> {
        let mut out = Vec::new();
        let f = self.monic();
        if f.deg() == 0 {
            return out;
        }
        let df = f.derivative();
        if df.is_zero() {
            for (g, m) in f.pth_root().squarefree_decomposition() {
                out.push((g, m * self.p as u32));
            }
            return out;
        }
        let mut c = f.gcd(&df);
        let mut w = f.divrem(&c).0;
        let mut i = 1;
        while w.deg() > 0 {
            let y = w.gcd(&c);
            let z = w.divrem(&y).0;
            if z.deg() > 0 {
                out.push((z.monic(), i));
            }
            i += 1;
            w = y;
            c = c.divrem(&w).0;
        }
        if c.deg() > 0 {
            for (g, m) in c.pth_root().squarefree_decomposition() {
                out.push((g, m * self.p as u32));
            }
        }
        out
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    fn ddf(&self) -> Vec<(FpPoly, usize)> {
        let p = self.p;
        let mut out = Vec::new();
        let mut f = self.clone();
        let x = FpPoly::x(p);
        let mut h = x.clone();
        let mut d = 0;
        while f.deg() >= 2 * (d + 1) {
            d += 1;
            h = h.powmod(BigInt::from(p), &f);
            let g = f.gcd(&h.sub(&x));
            if g.deg() > 0 {
                out.push((g.clone(), d));
                f = f.divrem(&g).0;
                h = h.rem(&f);
            }
        }
        if f.deg() > 0 {
            let n = f.deg();
            out.push((f, n));
        }
        out
    }

    /// Equal-degree splitting of a product of degree-`d` irreducibles.
    fn edf(&self, d: usize, seed: &mut u64) -> Vec<FpPoly> {
        let n = self.deg();
        if n == d {
            return vec![self.clone()];
        }
        let p = self.p;
        if p == 2 {
            return self.edf_brute(d);
        }
        loop {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let mut s = *seed;
            let coeffs: Vec<u64> = (0..n)
                .map(|_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (s >> 33) % p
                })
                .collect();
            let a = FpPoly::new(p, coeffs);
            if a.deg() == 0 {
                continue;
            }
            let e = (num_traits::pow(BigInt::from(p), d) - 1) / 2;
            let b = a.powmod(e, self).sub(&FpPoly::one(p));
            let g = self.gcd(&b);
            if g.deg() > 0 && g.deg() < n {
                let mut out = g.edf(d, seed);
                out.extend(self.divrem(&g).0.edf(d, seed));
                return out;
            }
        }
    }

    /// Characteristic 2: trial division by every monic irreducible of degree d.
    fn edf_brute(&self, d: usize) -> Vec<FpPoly> {
        let mut out = Vec::new();
        let mut f = self.clone();
        for bits in 0u64..(1 << d) {
            if f.deg() == 0 {
                break;
            }
            let mut c: Vec<u64> = (0..d).map(|i| (bits >> i) & 1).collect();
            c.push(1);
            let g = FpPoly::new(2, c);
            let (q, r) = f.divrem(&g);
            if r.is_zero() && g.is_irreducible() {
                out.push(g);
                f = q;
            }
        }
        out
    }

    pub fn is_irreducible(&self) -> bool {
        let f = self.monic();
        if f.deg() == 0 {
            return false;
        }
        let sq = f.squarefree_decomposition();
        if sq.len() != 1 || sq[0].1 != 1 {
            return false;
        }
        let dd = f.ddf();
        dd.len() == 1 && dd[0].1 == f.deg()
    }

    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted canonically.
    pub fn factor(&self) -> Vec<(FpPoly, u32)> {
        let mut out = Vec::new();
        let mut seed = 0x9e37_79b9_7f4a_7c15u64 ^ self.p;
        for (sf, m) in self.squarefree_decomposition() {
            for (g, d) in sf.ddf() {
                for h in g.edf(d, &mut seed) {
                    out.push((h, m));
                }
            }
        }
        out.sort_by(|a, b| (a.0.deg(), &a.0.c).cmp(&(b.0.deg(), &b.0.c)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64, c: &[u64]) -> FpPoly {
        FpPoly::new(p, c.to_vec())
    }

    #[test]
    fn factors_multiply_back() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let f = fp(p, &[1, 0, 0, 0, 1, 0, 1, 1]);
            let fac = f.factor();
            let mut prod = fp(p, &[1]);
            for (g, m) in &fac {
                assert!(g.is_irreducible());
                for _ in 0..*m {
                    prod = prod.mul(g);
                }
            }
            assert_eq!(prod, f.monic(), "p = {p}");
        }
    }

    #[test]
    fn known_splittings() {
        // x^2 + 1 over F_5 = (x + 2)(x + 3); over F_3 irreducible; over F_2 = (x + 1)^2
        assert_eq!(fp(5, &[1, 0, 1]).factor().len(), 2);
        assert_eq!(fp(3, &[1, 0, 1]).factor(), vec![(fp(3, &[1, 0, 1]), 1)]);
        assert_eq!(fp(2, &[1, 0, 1]).factor(), vec![(fp(2, &[1, 1]), 2)]);
        // x^4 + 1 splits into quadratics mod 3
        let f = fp(3, &[1, 0, 0, 0, 1]).factor();
        assert!(f.iter().all(|(g, _)| g.deg() == 2));
    }
}
