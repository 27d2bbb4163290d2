//! Exact arithmetic in K = Q[x]/(f) with certified complex embeddings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{CIval, Ival};
use crate::linalg::{self, Mat};
use crate::poly::Poly;
use crate::poly_fp::FpPoly;
use crate::rational::{floor_int, parse_q, q_to_string, qi, qz, Q};
use crate::roots::{isolate_roots, RootSet};

/// An element of K, stored by its coordinates in the power basis of α.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FieldElement {
    pub c: Vec<Q>,
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// The element as a rational, if it lies in Q.
    pub fn as_rational(&self) -> Option<Q> {
        if self.c.iter().skip(1).all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    fn poly(&self) -> Poly {
        Poly::new(self.c.clone())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{}", q_to_string(&q));
        }
        let parts: Vec<String> = self.c.iter().map(q_to_string).collect();
        write!(f, "{}", parts.join(":"))
    }
}

/// Field data that may be supplied by a configuration file.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct FieldConfig {
    pub min_poly: Vec<serde_json::Value>,
    #[serde(default)]
    pub basis: Option<Vec<Vec<serde_json::Value>>>,
    #[serde(default, rename = "h_K")]
    pub h_k: Option<u64>,
    #[serde(default)]
    pub fundamental_units: Option<Vec<Vec<serde_json::Value>>>,
    #[serde(default)]
    pub trust_level: Option<String>,
}

impl FieldConfig {
    pub fn rationals() -> Self {
        FieldConfig { min_poly: vec![0.into(), 1.into()], ..Default::default() }
    }

    pub fn from_poly(c: &[i64]) -> Self {
        FieldConfig { min_poly: c.iter().map(|&x| x.into()).collect(), ..Default::default() }
    }

    pub fn trusted(&self) -> bool {
        self.trust_level.as_deref() == Some("trusted")
    }

    pub fn min_poly_ints(&self) -> Result<Vec<BigInt>> {
        self.min_poly.iter().map(json_int).collect()
    }
}

pub fn json_int(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::InvalidInput(format!("not an integer: {n}"))),
        serde_json::Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("not an integer: {s}"))),
        _ => Err(Error::InvalidInput(format!("not an integer: {v}"))),
    }
}

pub fn json_rational(v: &serde_json::Value) -> Result<Q> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(qi)
            .ok_or_else(|| Error::InvalidInput(format!("not a rational: {n}"))),
        serde_json::Value::String(s) => {
            parse_q(s).ok_or_else(|| Error::InvalidInput(format!("not a rational: {s}")))
        }
        _ => Err(Error::InvalidInput(format!("not a rational: {v}"))),
    }
}

pub struct NumberField {
    /// Defining polynomial, constant term first.
    pub min_poly: Vec<BigInt>,
    f: Poly,
    pub d: usize,
    pub r1: usize,
    pub r2: usize,
    /// Leading coefficient a₀ of the defining polynomial.
    pub a0: BigInt,
    /// Monic minimal polynomial of θ = a₀α.
    pub theta_poly: Poly,
    pub basis: Vec<FieldElement>,
    pub basis_is_power_basis: bool,
    /// Columns are the power-basis coordinates of the integral basis.
    basis_mat: Mat,
    basis_inv: Mat,
    pub disc: BigInt,
    pub config: FieldConfig,
    roots: Mutex<BTreeMap<u32, Arc<RootSet>>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({})", self.f)
    }
}

impl NumberField {
    pub fn rationals() -> Self {
        NumberField::from_config(&FieldConfig::rationals()).expect("Q is a field")
    }

    pub fn from_poly(c: &[i64]) -> Result<Self> {
        NumberField::from_config(&FieldConfig::from_poly(c))
    }

    pub fn new(min_poly: &[BigInt], basis: Option<Vec<FieldElement>>) -> Result<Self> {
        let mut cfg = FieldConfig {
            min_poly: min_poly.iter().map(|x| x.to_string().into()).collect(),
            ..Default::default()
        };
        if let Some(b) = &basis {
            cfg.basis = Some(
                b.iter()
                    .map(|e| e.c.iter().map(|x| q_to_string(x).into()).collect())
                    .collect(),
            );
        }
        NumberField::from_config(&cfg)
    }

    pub fn from_config(cfg: &FieldConfig) -> Result<Self> {
        let coeffs = cfg.min_poly_ints()?;
        let f = Poly::from_bigints(&coeffs);
        if f.degree().unwrap_or(0) < 1 {
            return Err(Error::InvalidInput("defining polynomial must have degree at least 1".into()));
        }
        let d = f.deg();
        let a0 = f.lead().numer().clone();
        // g(x) = a0^{d-1} f(x / a0)
        let mut gc = Vec::with_capacity(d + 1);
        for (i, c) in f.coeffs().iter().enumerate() {
            let e = (d - 1) as i64 - i as i64;
            let s = if e >= 0 {
                qz(num_traits::pow(a0.clone(), e as usize))
            } else {
                Q::new(BigInt::one(), num_traits::pow(a0.clone(), (-e) as usize))
            };
            gc.push(c * s);
        }
        let theta_poly = Poly::new(gc);
        debug_assert!(theta_poly.is_integral() && theta_poly.lead().is_one());
        check_irreducible(&theta_poly)?;
        let rs = isolate_roots(&f, 64)?;
        let (r1, r2) = (rs.r1, rs.r2);

        let mut basis_is_power_basis = true;
        let basis: Vec<FieldElement> = match &cfg.basis {
            Some(b) => {
                basis_is_power_basis = false;
                let mut out = Vec::new();
                for e in b {
                    if e.len() != d {
                        return Err(Error::InvalidInput(format!("basis element needs {d} coordinates")));
                    }
                    out.push(FieldElement { c: e.iter().map(json_rational).collect::<Result<_>>()? });
                }
                if out.len() != d {
                    return Err(Error::InvalidInput(format!("basis needs {d} elements")));
                }
                out
            }
            None => (0..d)
                .map(|j| {
                    let mut c = vec![Q::zero(); d];
                    c[j] = qz(num_traits::pow(a0.clone(), j));
                    FieldElement { c }
                })
                .collect(),
        };
        let basis_mat: Mat = (0..d).map(|i| basis.iter().map(|w| w.c[i].clone()).collect()).collect();
        let basis_inv = linalg::inverse(&basis_mat)
            .ok_or_else(|| Error::InvalidInput("basis elements are linearly dependent".into()))?;
        let k = NumberField {
            min_poly: coeffs,
            f,
            d,
            r1,
            r2,
            a0,
            theta_poly,
            basis,
            basis_is_power_basis,
            basis_mat,
            basis_inv,
            disc: BigInt::zero(),
            config: cfg.clone(),
            roots: Mutex::new(BTreeMap::new()),
        };
        for (i, w) in k.basis.iter().enumerate() {
            if !k.is_integral(w) {
                return Err(Error::NonIntegralBasis { index: i });
            }
        }
        let tr: Mat = (0..d)
            .map(|i| (0..d).map(|j| k.trace(&k.mul(&k.basis[i], &k.basis[j]))).collect())
            .collect();
        let disc = linalg::det(&tr);
        debug_assert!(disc.is_integer());
        k.roots.lock().unwrap().insert(64, Arc::new(rs));
        Ok(NumberField { disc: disc.to_integer(), ..k })
    }

    pub fn defining_poly(&self) -> &Poly {
        &self.f
    }

    pub fn is_rationals(&self) -> bool {
        self.d == 1
    }

    /// Unit rank r₁ + r₂ − 1.
    pub fn unit_rank(&self) -> usize {
        self.r1 + self.r2 - 1
    }

    /// Number of archimedean places.
    pub fn n_arch(&self) -> usize {
        self.r1 + self.r2
    }

    // ---- construction ----

    pub fn zero(&self) -> FieldElement {
        FieldElement { c: vec![Q::zero(); self.d] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_q(&Q::one())
    }

    pub fn from_q(&self, q: &Q) -> FieldElement {
        let mut c = vec![Q::zero(); self.d];
        c[0] = q.clone();
        FieldElement { c }
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_q(&qi(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        self.from_q(&qz(n.clone()))
    }

    /// The generator α (a root of the defining polynomial).
    pub fn alpha(&self) -> FieldElement {
        self.from_poly_mod(&Poly::x())
    }

    /// The integral generator θ = a₀α.
    pub fn theta_gen(&self) -> FieldElement {
        self.from_poly_mod(&Poly::x().scale(&qz(self.a0.clone())))
    }

    pub fn from_poly_mod(&self, p: &Poly) -> FieldElement {
        let r = p.rem(&self.f);
        let mut c = r.coeffs().to_vec();
        c.resize(self.d, Q::zero());
        FieldElement { c }
    }

    pub fn from_coords(&self, c: &[Q]) -> Result<FieldElement> {
        if c.len() != self.d {
            return Err(Error::InvalidInput(format!("expected {} coordinates, got {}", self.d, c.len())));
        }
        Ok(FieldElement { c: c.to_vec() })
    }

    /// Element with the given coordinates in the integral basis.
    pub fn from_basis_coords(&self, n: &[Q]) -> FieldElement {
        FieldElement { c: linalg::mat_vec(&self.basis_mat, n) }
    }

    pub fn from_basis_ints(&self, n: &[BigInt]) -> FieldElement {
        let q: Vec<Q> = n.iter().cloned().map(qz).collect();
        self.from_basis_coords(&q)
    }

    /// Coordinates in the integral basis.
    pub fn basis_coords(&self, a: &FieldElement) -> Vec<Q> {
        linalg::mat_vec(&self.basis_inv, &a.c)
    }

    /// Parse "3/2" (a rational) or "c0:c1:…" (power-basis coordinates).
    pub fn parse(&self, s: &str) -> Result<FieldElement> {
        let s = s.trim();
        if s.contains(':') {
            let c: Vec<Q> = s
                .split(':')
                .map(|t| parse_q(t).ok_or_else(|| Error::InvalidInput(format!("bad coordinate '{t}'"))))
                .collect::<Result<_>>()?;
            self.from_coords(&c)
        } else {
            let q = parse_q(s).ok_or_else(|| Error::InvalidInput(format!("bad element '{s}'")))?;
            Ok(self.from_q(&q))
        }
    }

    // ---- arithmetic ----

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement { c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect() }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement { c: a.c.iter().zip(&b.c).map(|(x, y)| x - y).collect() }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement { c: a.c.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, a: &FieldElement, k: &Q) -> FieldElement {
        FieldElement { c: a.c.iter().map(|x| x * k).collect() }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        if self.d == 1 {
            return FieldElement { c: vec![&a.c[0] * &b.c[0]] };
        }
        self.from_poly_mod(&a.poly().mul(&b.poly()))
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.d == 1 {
            return Ok(FieldElement { c: vec![a.c[0].recip()] });
        }
        let (g, s, _) = a.poly().xgcd(&self.f);
        debug_assert!(g.is_one_poly());
        Ok(self.from_poly_mod(&s))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut e = e.unsigned_abs();
        let mut b = base;
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        Ok(r)
    }

    /// Matrix of multiplication by `a` on the power basis (columns are images).
    pub fn mult_matrix(&self, a: &FieldElement) -> Mat {
        let mut cols = Vec::with_capacity(self.d);
        let mut cur = a.clone();
        let x = self.alpha();
        for j in 0..self.d {
            if j > 0 {
                cur = self.mul(&cur, &x);
            }
            cols.push(cur.c.clone());
        }
        linalg::transpose(&cols)
    }

    pub fn norm(&self, a: &FieldElement) -> Q {
        if self.d == 1 {
            return a.c[0].clone();
        }
        linalg::det(&self.mult_matrix(a))
    }

    pub fn trace(&self, a: &FieldElement) -> Q {
        if self.d == 1 {
            return a.c[0].clone();
        }
        linalg::trace(&self.mult_matrix(a))
    }

    pub fn norm_trace(&self, a: &FieldElement) -> (Q, Q) {
        (self.norm(a), self.trace(a))
    }

    /// Characteristic polynomial of `a` over Q (monic, degree d).
    pub fn charpoly(&self, a: &FieldElement) -> Poly {
        linalg::charpoly(&self.mult_matrix(a))
    }

    /// Minimal polynomial of `a` over Q (monic).
    pub fn minpoly(&self, a: &FieldElement) -> Poly {
        self.charpoly(a).squarefree()
    }

    /// Degree [Q(a) : Q].
    pub fn element_degree(&self, a: &FieldElement) -> usize {
        self.minpoly(a).deg()
    }

    pub fn is_integral(&self, a: &FieldElement) -> bool {
        self.charpoly(a).is_integral()
    }

    /// Whether `a` is a root of unity.
    pub fn is_root_of_unity(&self, a: &FieldElement) -> bool {
        if a.is_zero() || !self.norm(a).abs().is_one() || !self.is_integral(a) {
            return false;
        }
        // orders of roots of unity in a degree-d field are bounded by phi(n) <= d
        let max_n = 2 * self.d * self.d + 2;
        let mut p = a.clone();
        for _ in 1..=max_n {
            if p == self.one() {
                return true;
            }
            p = self.mul(&p, a);
        }
        false
    }

    // ---- embeddings ----

    fn root_set(&self, prec: u32) -> Result<Arc<RootSet>> {
        let p = prec.div_ceil(32) * 32;
        {
            let cache = self.roots.lock().unwrap();
            if let Some((_, rs)) = cache.range(p..).next() {
                return Ok(rs.clone());
            }
        }
        let rs = Arc::new(isolate_roots(&self.f, p)?);
        self.roots.lock().unwrap().insert(p, rs.clone());
        Ok(rs)
    }

    /// Enclosures of σ_i(α) for all embeddings, at least `prec` bits.
    pub fn alpha_embeddings(&self, prec: u32) -> Vec<CIval> {
        self.root_set(prec).expect("roots isolate at any precision once isolated").roots.clone()
    }

    /// Enclosures of σ_i(a) for i = 0..d, in the order real embeddings,
    /// upper-half-plane embeddings, conjugates.
    pub fn embed(&self, a: &FieldElement, prec: u32) -> Vec<CIval> {
        let prec = prec.max(32);
        let mag: u64 = a.c.iter().map(|x| x.numer().bits() + x.denom().bits()).max().unwrap_or(0);
        // rounded up so that the cached root sets are shared between elements
        let mut wp = (prec + 32 + (mag as u32).min(4096) + 4 * self.d as u32).div_ceil(128) * 128;
        let tol = Q::new(BigInt::one(), BigInt::one() << prec);
        loop {
            let roots = self.alpha_embeddings(wp);
            let out: Vec<CIval> = roots.iter().map(|z| eval_at(&a.c, z, wp)).collect();
            let ok = out.iter().all(|v| {
                let scale = Q::one().max(v.re.hi.abs().max(v.im.hi.abs()));
                v.width() <= &tol * &scale
            });
            if ok || wp > 1 << 16 {
                return out;
            }
            wp *= 2;
        }
    }

    /// Enclosure of σ_i(a) at the i-th embedding only.
    pub fn embed_one(&self, a: &FieldElement, i: usize, prec: u32) -> CIval {
        self.embed(a, prec).swap_remove(i)
    }

    /// Index of the embedding representing archimedean place `v`
    /// (real places first, then one embedding per conjugate pair).
    pub fn place_embedding(&self, v: usize) -> usize {
        v
    }

    /// Local degree d_v of archimedean place `v`.
    pub fn local_degree(&self, v: usize) -> u32 {
        if v < self.r1 {
            1
        } else {
            2
        }
    }

    /// θ = max{1, max_σ Σ_j |σ(w_j)|}, enclosed.
    pub fn theta(&self, prec: u32) -> Ival {
        let mut best = Ival::int(1, prec);
        let embs: Vec<Vec<CIval>> = self.basis.iter().map(|w| self.embed(w, prec)).collect();
        for i in 0..self.d {
            let mut s = Ival::zero(prec);
            for e in &embs {
                s = s.add(&e[i].abs());
            }
            best = best.max(&s);
        }
        best
    }

    /// Whether the computed θ exceeds |D_K|^{1/2} (certified).
    pub fn theta_exceeds_disc_bound(&self, prec: u32) -> bool {
        let t = self.theta(prec);
        let s = Ival::point(&qz(self.disc.abs()), prec).sqrt();
        s.lt(&t)
    }

    /// log|σ_v(a)|^{d_v} ... here: the normalized archimedean absolute value
    /// |σ(a)| at real places and |σ(a)|² at complex places.
    pub fn arch_abs(&self, a: &FieldElement, v: usize, prec: u32) -> Ival {
        let z = self.embed_one(a, v, prec);
        if v < self.r1 {
            z.re.abs()
        } else {
            z.norm_sqr()
        }
    }

    /// Dual basis (w_j*) with Tr(w_i w_j*) = δ_ij.
    pub fn dual_basis(&self) -> Vec<FieldElement> {
        let d = self.d;
        let tr: Mat = (0..d)
            .map(|i| (0..d).map(|j| self.trace(&self.mul(&self.basis[i], &self.basis[j]))).collect())
            .collect();
        let inv = linalg::inverse(&tr).expect("trace form is nondegenerate");
        (0..d)
            .map(|j| {
                let mut e = self.zero();
                for (i, w) in self.basis.iter().enumerate() {
                    e = self.add(&e, &self.scale(w, &inv[i][j]));
                }
                e
            })
            .collect()
    }
}

trait IsOnePoly {
    fn is_one_poly(&self) -> bool;
}

impl IsOnePoly for Poly {
    fn is_one_poly(&self) -> bool {
        *self == Poly::one()
    }
}

/// Evaluate Σ c_j z^j over complex intervals.
pub fn eval_at(c: &[Q], z: &CIval, prec: u32) -> CIval {
    let mut acc = CIval::real(Ival::zero(prec));
    for a in c.iter().rev() {
        acc = acc.mul(z).add_q(a);
    }
    acc
}

/// Decide irreducibility over Q of a monic integer polynomial.
pub fn check_irreducible(g: &Poly) -> Result<()> {
    let d = g.deg();
    if d <= 1 {
        return Ok(());
    }
    if g.gcd(&g.derivative()).deg() > 0 {
        return Err(Error::Reducible("polynomial has a repeated factor".into()));
    }
    // factor degrees allowed by reductions modulo small primes
    let mut allowed: Vec<bool> = vec![true; d + 1];
    let mut used = 0;
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73] {
        let gp = FpPoly::from_poly(g, p);
        if gp.deg() != d || gp.gcd(&gp.derivative()).deg() > 0 {
            continue;
        }
        let degs: Vec<usize> = gp.factor().iter().map(|(h, _)| h.deg()).collect();
        let mut sums = vec![false; d + 1];
        sums[0] = true;
        for k in degs {
            for s in (k..=d).rev() {
                if sums[s - k] {
                    sums[s] = true;
                }
            }
        }
        for s in 0..=d {
            allowed[s] &= sums[s];
        }
        used += 1;
        if (1..d).all(|s| !allowed[s]) {
            return Ok(());
        }
        if used >= 8 {
            break;
        }
    }
    // exhaustive search over root subsets of the allowed sizes
    let mut prec = 64;
    'outer: loop {
        let rs = isolate_roots(g, prec)?;
        let n = rs.roots.len();
        for k in 1..=d / 2 {
            if !allowed[k] {
                continue;
            }
            for subset in subsets(n, k) {
                // expand Π (x − r) with interval coefficients
                let mut coeffs = vec![CIval::real(Ival::int(1, prec))];
                for &i in &subset {
                    let r = &rs.roots[i];
                    let mut next = vec![CIval::real(Ival::zero(prec)); coeffs.len() + 1];
                    for (j, c) in coeffs.iter().enumerate() {
                        next[j + 1] = next[j + 1].add(c);
                        next[j] = next[j].sub(&c.mul(r));
                    }
                    coeffs = next;
                }
                let mut cand = Vec::with_capacity(k + 1);
                let mut possible = true;
                for c in &coeffs {
                    if !c.im.contains_zero() {
                        possible = false;
                        break;
                    }
                    let lo = crate::rational::ceil_int(&c.re.lo);
                    let hi = floor_int(&c.re.hi);
                    if lo > hi {
                        possible = false;
                        break;
                    }
                    if lo != hi {
                        prec *= 2;
                        if prec > 1 << 14 {
                            return Err(Error::Undecided("irreducibility test".into()));
                        }
                        continue 'outer;
                    }
                    cand.push(lo);
                }
                if !possible {
                    continue;
                }
                let h = Poly::from_bigints(&cand);
                if g.rem(&h).is_zero() {
                    return Err(Error::Reducible(format!("has factor {h}")));
                }
            }
        }
        return Ok(());
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Integer nearest to a rational (ties away from zero are irrelevant here).
pub fn round_q(x: &Q) -> BigInt {
    floor_int(&(x + Q::new(BigInt::one(), BigInt::from(2))))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_invariants() {
        let k = NumberField::from_poly(&[1, 0, 1]).unwrap();
        assert_eq!((k.d, k.r1, k.r2), (2, 0, 1));
        assert_eq!(k.disc, BigInt::from(-4));
        let k = NumberField::from_poly(&[-1, -1, 0, 1]).unwrap();
        assert_eq!((k.r1, k.r2), (1, 1));
        assert_eq!(k.disc, BigInt::from(-23));
        assert_eq!(NumberField::from_poly(&[-1, 0, 1]).unwrap_err().kind(), "reducible_polynomial");
        assert_eq!(NumberField::from_poly(&[4, 0, 0, 0, 1]).unwrap_err().kind(), "reducible_polynomial");
        assert!(NumberField::from_poly(&[-2, 0, 0, 0, 1]).is_ok());
        let q = NumberField::rationals();
        assert_eq!((q.d, q.r1, q.r2), (1, 1, 0));
        assert_eq!(q.disc, BigInt::one());
    }

    #[test]
    fn gaussian_arithmetic() {
        let k = NumberField::from_poly(&[1, 0, 1]).unwrap();
        let a = k.parse("1:1").unwrap();
        assert_eq!(k.mul(&a, &a), k.parse("0:2").unwrap());
        let inv = k.inv(&a).unwrap();
        assert_eq!(inv, k.parse("1/2:-1/2").unwrap());
        assert_eq!(k.mul(&inv, &a), k.one());
        assert_eq!(k.div(&a, &k.zero()).unwrap_err(), Error::DivisionByZero);
        assert_eq!(k.norm_trace(&a), (qi(2), qi(2)));
        assert_eq!(k.norm_trace(&k.zero()), (qi(0), qi(0)));
        let e = k.embed(&k.alpha(), 32);
        assert!(e[0].im.contains(&qi(1)) && e[0].re.contains(&qi(0)));
    }

    #[test]
    fn golden_ratio() {
        let k = NumberField::from_poly(&[-1, -1, 1]).unwrap();
        let phi = k.alpha();
        assert_eq!(k.norm_trace(&phi), (qi(-1), qi(1)));
        let e = k.embed(&phi, 64);
        assert!((e[1].re.to_f64() - 1.618033988749895).abs() < 1e-14);
        assert!(k.is_integral(&phi));
        assert!(!k.is_integral(&k.parse("1/2:0").unwrap()));
        assert!(k.is_root_of_unity(&k.from_int(-1)));
        assert!(!k.is_root_of_unity(&phi));
    }

    #[test]
    fn non_monic_field() {
        // 2x^2 - 1: alpha = 1/sqrt 2, theta = 2 alpha = sqrt 2
        let k = NumberField::from_poly(&[-1, 0, 2]).unwrap();
        let t = k.theta_gen();
        assert_eq!(k.mul(&t, &t), k.from_int(2));
        assert_eq!(k.disc, BigInt::from(8));
    }

    #[test]
    fn supplied_basis_is_validated() {
        let five = [BigInt::from(-5), BigInt::zero(), BigInt::one()];
        let ok = vec![
            FieldElement { c: vec![qi(1), qi(0)] },
            FieldElement { c: vec![Q::new(1.into(), 2.into()), Q::new(1.into(), 2.into())] },
        ];
        let k = NumberField::new(&five, Some(ok)).unwrap();
        assert_eq!(k.disc, BigInt::from(5));
        let bad = vec![
            FieldElement { c: vec![qi(1), qi(0)] },
            FieldElement { c: vec![qi(0), Q::new(1.into(), 2.into())] },
        ];
        assert_eq!(NumberField::new(&five, Some(bad)).unwrap_err().kind(), "non_integral_basis");
    }
}
