//! Box enumeration of algebraic integers, S-denominator clearing, unit
//! balancing, the sets A₁(m) and A₂(m), and the decomposition β = εγ.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::constants::CertifiedUpper;
use crate::error::{Error, Result};
use crate::s_arith::SContext;
use crate::interval::{CIval, Ival};
use crate::linalg;
use crate::number_field::{FieldElement, NumberField};
use crate::poly::{sturm_count, Poly};
use crate::rational::{ceil_int, floor_int, qi, qz, Q};

/// The radius Q of a box {γ ∈ O_K : |σγ| ≤ Q for every embedding σ}.
#[derive(Clone, Debug)]
pub enum Radius {
    Rational(Q),
    /// The positive real `radicand^(1/degree)`.
    Root { radicand: Q, degree: u32 },
    /// A real known only through an enclosure; boundary ties that survive
    /// the maximal precision are counted as members.
    Enclosed(Ival),
}

impl Radius {
    pub fn enclose(&self, prec: u32) -> Ival {
        match self {
            Radius::Rational(q) => Ival::point(q, prec),
            Radius::Root { radicand, degree } => {
                if *degree == 1 {
                    return Ival::point(radicand, prec);
                }
                root_enclosure(radicand, *degree, prec)
            }
            Radius::Enclosed(iv) => iv.clone(),
        }
    }

    /// Polynomial whose positive root is Q², when Q is algebraic of known form.
    fn square_poly(&self) -> Option<Poly> {
        match self {
            Radius::Rational(q) => Some(Poly::new(vec![-(q * q), Q::one()])),
            Radius::Root { radicand, degree } => {
                let mut c = vec![Q::zero(); *degree as usize + 1];
                c[0] = -(radicand * radicand);
                c[*degree as usize] = Q::one();
                Some(Poly::new(c))
            }
            Radius::Enclosed(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(64).to_f64()
    }
}

/// Enclosure of the positive n-th root of a positive rational by bisection
/// on exact n-th powers.
pub fn root_enclosure(x: &Q, n: u32, prec: u32) -> Ival {
    let f = x.to_f64().unwrap_or(1.0).powf(1.0 / n as f64);
    let mut lo = Q::from_float(f * (1.0 - 1e-12)).unwrap_or_else(Q::zero).max(Q::zero());
    let mut hi = Q::from_float(f * (1.0 + 1e-12) + 1e-300).unwrap_or_else(|| x.clone() + Q::one());
    let pw = |q: &Q| num_traits::pow(q.clone(), n as usize);
    if pw(&lo) > *x {
        lo = Q::zero();
    }
    while pw(&hi) < *x {
        hi = &hi * qi(2) + Q::one();
    }
    let eps = Q::new(BigInt::one(), BigInt::one() << (prec + 2));
    while &hi - &lo > eps {
        let mid = Ival::new(&lo + (&hi - &lo) / qi(2), &lo + (&hi - &lo) / qi(2), prec + 8).lo;
        if pw(&mid) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ival::new(lo, hi, prec)
}

#[derive(Clone, Debug)]
pub struct BoxEnumeration {
    pub q: Radius,
    /// Members in lexicographic order of integral-basis coordinates.
    pub elements: Vec<FieldElement>,
    /// Upper bound 2^{r+1} π^{r₂} (Q+θ)^d |D_K|^{-1/2} on the member count.
    pub bound: Ival,
}

/// Enclosure of the count bound 2^{r+1} π^{r₂} (Q+θ)^d |D_K|^{-1/2}.
pub fn box_count_bound(k: &NumberField, q: &Ival, prec: u32) -> Ival {
    let r = k.unit_rank() as u32;
    let theta = k.theta(prec);
    let mut b = q.add(&theta).powi(k.d as u32);
    b = b.mul_q(&qz(BigInt::one() << (r + 1)));
    b = b.mul(&Ival::pi(prec).powi(k.r2 as u32));
    let disc = Ival::point(&qz(k.disc.abs()), prec).sqrt();
    b.div(&disc).expect("nonzero discriminant")
}

/// Per-coordinate bounds |n_j| ≤ Q Σ_σ |σ(w_j*)|.
fn coordinate_bounds(k: &NumberField, q: &Ival, prec: u32) -> Vec<BigInt> {
    k.dual_basis()
        .iter()
        .map(|w| {
            let s = k.embed(w, prec).iter().fold(Ival::zero(prec), |acc: Ival, z: &CIval| acc.add(&z.abs()));
            floor_int(&s.mul(q).hi)
        })
        .collect()
}

/// Number of integer points in the coordinate box, saturating.
fn box_volume(bounds: &[BigInt]) -> u128 {
    let mut v: u128 = 1;
    for b in bounds {
        let w = (b * BigInt::from(2) + BigInt::one()).to_u128().unwrap_or(u128::MAX);
        v = v.saturating_mul(w);
    }
    v
}

/// All γ ∈ O_K with |σγ| ≤ Q at every embedding.
pub fn enumerate_box(k: &NumberField, q: &Radius, cap: u128, prec: u32) -> Result<BoxEnumeration> {
    let qiv = q.enclose(prec);
    if !qiv.is_positive() {
        return Err(Error::InvalidInput("box radius must be positive".into()));
    }
    let bounds = coordinate_bounds(k, &qiv, prec);
    let vol = box_volume(&bounds);
    if vol > cap {
        return Err(Error::CapExceeded { required: vol, cap });
    }
    let d = k.d;
    let narch = k.n_arch();
    // f64 embedding table of the basis at one embedding per archimedean place
    let table: Vec<Vec<(f64, f64)>> = k
        .basis
        .iter()
        .map(|w| {
            let e = k.embed(w, 64);
            (0..narch).map(|v| (e[v].re.to_f64(), e[v].im.to_f64())).collect()
        })
        .collect();
    let qf = qiv.hi.to_f64().unwrap();
    let q2 = qf * qf;
    let b0: i64 = bounds[0].to_i64().ok_or(Error::CapExceeded { required: vol, cap })?;
    let rest: Vec<i64> = bounds[1..].iter().map(|b| b.to_i64().unwrap()).collect();
    let firsts: Vec<i64> = (-b0..=b0).collect();
    let chunks: Vec<Result<Vec<FieldElement>>> = firsts
        .par_iter()
        .map(|&n0| {
            let mut out = Vec::new();
            let mut n = vec![0i64; d];
            n[0] = n0;
            for j in 1..d {
                n[j] = -rest[j - 1];
            }
            loop {
                let mut status = 1; // 1 inside, 0 undecided, -1 outside
                for v in 0..narch {
                    let (mut re, mut im, mut mag) = (0f64, 0f64, 0f64);
                    for j in 0..d {
                        let (a, b) = table[j][v];
                        let x = n[j] as f64;
                        re += x * a;
                        im += x * b;
                        mag += (x * a).abs() + (x * b).abs();
                    }
                    let m2 = re * re + im * im;
                    let err = 1e-12 * (mag * mag + 1.0) + 1e-12 * q2;
                    if m2 - err > q2 {
                        status = -1;
                        break;
                    }
                    if m2 + err >= q2 {
                        status = 0;
                    }
                }
                if status >= 0 {
                    let nb: Vec<BigInt> = n.iter().map(|&x| BigInt::from(x)).collect();
                    let g = k.from_basis_ints(&nb);
                    if status == 1 || in_box_exact(k, &g, q, prec)? {
                        out.push(g);
                    }
                }
                // odometer over coordinates 1..d
                let mut j = d;
                loop {
                    if j == 1 {
                        return Ok(out);
                    }
                    j -= 1;
                    if n[j] < rest[j - 1] {
                        n[j] += 1;
                        break;
                    }
                    n[j] = -rest[j - 1];
                }
            }
        })
        .collect();
    let mut elements = Vec::new();
    for c in chunks {
        elements.extend(c?);
    }
    let bound = box_count_bound(k, &qiv, prec);
    if qz(BigInt::from(elements.len())) > bound.hi {
        return Err(Error::Inconsistent(format!(
            "box holds {} elements, above the bound {}",
            elements.len(),
            bound.to_f64()
        )));
    }
    Ok(BoxEnumeration { q: q.clone(), elements, bound })
}

/// Exact decision of |σγ| ≤ Q at every embedding.
pub fn in_box_exact(k: &NumberField, g: &FieldElement, q: &Radius, prec: u32) -> Result<bool> {
    if g.is_zero() {
        return Ok(true);
    }
    let mut p = prec.max(64);
    let mut undecided: Vec<usize> = (0..k.n_arch()).collect();
    loop {
        let t = q.enclose(p).sqr();
        let emb = k.embed(g, p);
        let mut next = Vec::new();
        for &v in &undecided {
            let z = emb[v].norm_sqr();
            if t.lt(&z) {
                return Ok(false);
            }
            if !z.lt(&t) && z.hi != t.lo {
                next.push(v);
            }
        }
        if next.is_empty() {
            return Ok(true);
        }
        // exact tie test on the remaining places
        if let Some(pt) = q.square_poly() {
            let mut all_equal = true;
            for &v in &next {
                if !boundary_equal(k, g, v, &pt, &emb[v], &t)? {
                    all_equal = false;
                }
            }
            if all_equal {
                return Ok(true);
            }
        }
        undecided = next;
        if p >= 4096 {
            return match q {
                Radius::Enclosed(_) => Ok(true),
                _ => Err(Error::Undecided("box membership".into())),
            };
        }
        p *= 2;
    }
}

/// Polynomial with |σ_v γ|² among its roots.
fn abs_sq_poly(k: &NumberField, g: &FieldElement, v: usize) -> Poly {
    if v < k.r1 {
        return k.charpoly(&k.mul(g, g));
    }
    // Π_{i,j} (y − β_i β_j) = Res_x(c(x), x^d c(y/x))
    let c = k.charpoly(g);
    let d = c.deg();
    let n = d * d;
    let pts: Vec<Q> = (0..=n).map(|i| qi(i as i64 + 1)).collect();
    let vals: Vec<Q> = pts
        .iter()
        .map(|y| {
            let h = Poly::new((0..=d).map(|kk| c.coeff(kk) * num_traits::pow(y.clone(), kk)).rev().collect());
            resultant(&c, &h)
        })
        .collect();
    interpolate(&pts, &vals)
}

pub fn resultant(a: &Poly, b: &Poly) -> Q {
    let (m, n) = (a.deg(), b.deg());
    let size = m + n;
    if size == 0 {
        return Q::one();
    }
    let mut s = vec![vec![Q::zero(); size]; size];
    for i in 0..n {
        for j in 0..=m {
            s[i][i + j] = a.coeff(m - j);
        }
    }
    for i in 0..m {
        for j in 0..=n {
            s[n + i][i + j] = b.coeff(n - j);
        }
    }
    linalg::det(&s)
}

/// Lagrange interpolation through the given points.
pub fn interpolate(xs: &[Q], ys: &[Q]) -> Poly {
    let mut out = Poly::zero();
    for i in 0..xs.len() {
        let mut term = Poly::constant(ys[i].clone());
        for j in 0..xs.len() {
            if i != j {
                let den = &xs[i] - &xs[j];
                term = term.mul(&Poly::new(vec![-&xs[j] / &den, Q::one() / &den]));
            }
        }
        out = out.add(&term);
    }
    out
}

/// Whether |σ_v γ|² equals the positive root of `pt` enclosed by `t`.
fn boundary_equal(k: &NumberField, g: &FieldElement, v: usize, pt: &Poly, z: &CIval, t: &Ival) -> Result<bool> {
    let pz = abs_sq_poly(k, g, v);
    let common = pz.gcd(pt);
    if common.deg() == 0 {
        return Ok(false);
    }
    let zi = z.norm_sqr();
    let lo = zi.lo.clone().max(t.lo.clone());
    let hi = zi.hi.clone().min(t.hi.clone());
    if lo > hi {
        return Ok(false);
    }
    let count_closed = |p: &Poly, a: &Q, b: &Q| -> usize {
        let sf = p.squarefree();
        let seq = sf.sturm();
        sturm_count(&seq, a, b) + usize::from(sf.eval(a).is_zero())
    };
    // unique candidates in each enclosure, and a shared root in the overlap
    let ok = count_closed(&common, &lo, &hi) == 1
        && count_closed(&pz, &zi.lo, &zi.hi) == 1
        && count_closed(pt, &t.lo, &t.hi) == 1;
    Ok(ok)
}

/// Ordered triples (k₁, k₂, k₃) of positive integers with k₁k₂k₃ = m.
pub fn build_a2(m: &BigInt) -> Result<Vec<[BigInt; 3]>> {
    let divs = divisors(m)?;
    let mut out = Vec::new();
    for a in &divs {
        let r = m / a;
        for b in &divs {
            if (&r % b).is_zero() {
                out.push([a.clone(), b.clone(), &r / b]);
            }
        }
    }
    Ok(out)
}

pub fn divisors(m: &BigInt) -> Result<Vec<BigInt>> {
    let mut ds = vec![BigInt::one()];
    for (p, e) in crate::rational::factorize(m)? {
        let mut next = Vec::new();
        for d in &ds {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= p;
            }
        }
        ds = next;
    }
    ds.sort();
    Ok(ds)
}

pub fn ceil_q(x: &Q) -> BigInt {
    ceil_int(x)
}

/// η₁ ∈ O_S^× with α = η₁β ∈ O_K and ord_𝔓(α) ∈ [0, step) at every 𝔓 ∈ S.
pub fn clear_s_denominators(ctx: &SContext, beta: &FieldElement) -> Result<(FieldElement, FieldElement)> {
    let k = ctx.k();
    if beta.is_zero() {
        return Ok((k.one(), k.zero()));
    }
    if !ctx.is_s_integer(beta) {
        return Err(Error::NotSInteger);
    }
    let mut eta = k.one();
    for p in &ctx.primes {
        let o = if k.d == 1 {
            crate::rational::vp(&beta.c[0], p.ideal.p)
        } else {
            crate::places::valuation(k, beta, &p.ideal)?
        };
        let e = o.div_euclid(p.step as i64);
        if e != 0 {
            eta = k.mul(&eta, &k.pow(&p.generator, -e)?);
        }
    }
    let alpha = k.mul(&eta, beta);
    if !k.is_integral(&alpha) {
        return Err(Error::Inconsistent(format!("cleared element {alpha} is not integral")));
    }
    // |N(α)| ≤ ν^{tdh_K} N_S(β)
    let tdh = (ctx.t * k.d) as u64 * ctx.unit_data.h_k;
    let bound = qz(num_traits::pow(ctx.nu.clone(), tdh as usize)) * ctx.s_norm(beta)?;
    if k.norm(&alpha).abs() > bound {
        return Err(Error::Inconsistent("cleared norm exceeds ν^{tdh_K} N_S(β)".into()));
    }
    Ok((eta, alpha))
}

/// Whether e^{−c₃R} ≤ |γ|_v / M^{d_v/d} ≤ e^{c₃R} holds at every archimedean place.
/// `Some(false)` when some place certainly fails, `None` when undecided.
pub fn balance_certificate(k: &NumberField, gamma: &FieldElement, c3r: &Ival, prec: u32) -> Option<bool> {
    if k.n_arch() == 1 {
        // |γ|_v = |N(γ)| exactly at the only archimedean place
        return Some(!gamma.is_zero() && !c3r.is_negative());
    }
    let m = k.norm(gamma).abs();
    let lm = Ival::point(&m, prec).ln()?;
    let d = qi(k.d as i64);
    let mut all = true;
    for v in 0..k.n_arch() {
        let lv = k.arch_abs(gamma, v, prec).ln()?;
        let dv = qi(k.local_degree(v) as i64);
        let dev = lv.sub(&lm.mul_q(&(dv / &d))).abs();
        if c3r.lt(&dev) {
            return Some(false);
        }
        if !dev.le(c3r) {
            all = false;
        }
    }
    if all {
        Some(true)
    } else {
        None
    }
}

/// A unit η₂ of O_K with γ = αη₂ balanced at every archimedean place.
pub fn balance_by_units(ctx: &SContext, alpha: &FieldElement, c3: &Ival) -> Result<(FieldElement, FieldElement)> {
    let k = ctx.k();
    if alpha.is_zero() {
        return Err(Error::ZeroElement);
    }
    let prec = ctx.prec;
    let c3r = c3.mul(&ctx.unit_data.regulator);
    let r = ctx.r;
    if r == 0 {
        // a single archimedean place, where |α|_v = |N(α)| exactly
        return Ok((k.one(), alpha.clone()));
    }
    let units = &ctx.unit_data.fundamental_units;
    let m = k.norm(alpha).abs();
    let lm = Ival::point(&m, 96).ln().ok_or(Error::ZeroElement)?;
    let d = qi(k.d as i64);
    let mut lat: linalg::Mat = Vec::with_capacity(r);
    let mut rhs = Vec::with_capacity(r);
    for v in 0..r {
        lat.push(
            units
                .iter()
                .map(|u| k.arch_abs(u, v, 96).ln().map(|x| x.mid()))
                .collect::<Option<Vec<_>>>()
                .ok_or(Error::ZeroElement)?,
        );
        let dv = qi(k.local_degree(v) as i64);
        let lv = k.arch_abs(alpha, v, 96).ln().ok_or(Error::ZeroElement)?;
        rhs.push(lv.sub(&lm.mul_q(&(dv / &d))).mid());
    }
    let x = linalg::solve(&lat, &rhs).ok_or_else(|| Error::Inconsistent("singular unit lattice".into()))?;
    let center: Vec<i64> = x.iter().map(|c| crate::number_field::round_q(c).to_i64().unwrap_or(0)).collect();
    for radius in 0..=4i64 {
        for off in offsets(r, radius) {
            let mut eta = k.one();
            for (i, u) in units.iter().enumerate() {
                let e = -(center[i] + off[i]);
                if e != 0 {
                    eta = k.mul(&eta, &k.pow(u, e)?);
                }
            }
            let g = k.mul(alpha, &eta);
            let mut p = prec;
            loop {
                match balance_certificate(k, &g, &c3r, p) {
                    Some(true) => return Ok((eta, g)),
                    Some(false) => break,
                    None if p < 1024 => p *= 2,
                    None => break,
                }
            }
        }
    }
    Err(Error::Undecided("no unit within the search radius certifies the balance bound".into()))
}

/// Offset vectors of sup-norm exactly `radius`, ordered by L1 norm then lexicographically.
fn offsets(r: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![-radius; r];
    loop {
        if v.iter().map(|x| x.abs()).max().unwrap_or(0) == radius {
            out.push(v.clone());
        }
        let mut j = r;
        loop {
            if j == 0 {
                out.sort_by_key(|o| (o.iter().map(|x| x.abs()).sum::<i64>(), o.clone()));
                return out;
            }
            j -= 1;
            if v[j] < radius {
                v[j] += 1;
                break;
            }
            v[j] = -radius;
        }
    }
}

/// The finite set A₁(m): nonzero integers in the box of radius
/// (ν^{tdh_K} m)^{1/d} e^{c₃R_K}.
#[derive(Clone, Debug)]
pub struct A1Set {
    pub m: BigInt,
    pub gammas: Vec<FieldElement>,
    pub kappa5m: CertifiedUpper,
    pub radius: Radius,
    c3: Ival,
}

impl A1Set {
    pub fn contains(&self, k: &NumberField, g: &FieldElement) -> bool {
        let key = k.basis_coords(g);
        self.gammas.binary_search_by(|x| k.basis_coords(x).cmp(&key)).is_ok()
    }

    pub fn c3(&self) -> &Ival {
        &self.c3
    }
}

pub fn a1_radius(ctx: &SContext, m: &BigInt, c3: &Ival) -> Radius {
    let k = ctx.k();
    let tdh = (ctx.t * k.d) as u64 * ctx.unit_data.h_k;
    let big_m = qz(num_traits::pow(ctx.nu.clone(), tdh as usize) * m);
    if ctx.r == 0 || c3.hi.is_zero() {
        return Radius::Root { radicand: big_m, degree: k.d as u32 };
    }
    let prec = ctx.prec;
    let base = root_enclosure(&big_m, k.d as u32, prec);
    let q = base.mul(&c3.mul(&ctx.unit_data.regulator).exp());
    Radius::Enclosed(q)
}

pub fn build_a1(ctx: &SContext, m: &BigInt, c3: &Ival, kappa5: &CertifiedUpper, cap: u128) -> Result<A1Set> {
    if !m.is_positive() {
        return Err(Error::InvalidInput("m must be positive".into()));
    }
    let k = ctx.k();
    let radius = a1_radius(ctx, m, c3);
    let b = enumerate_box(k, &radius, cap, ctx.prec)?;
    let gammas: Vec<FieldElement> = b.elements.into_iter().filter(|g| !g.is_zero()).collect();
    let kappa5m = kappa5.mul_int(m);
    if !kappa5m.admits(&BigInt::from(gammas.len())) {
        return Err(Error::Inconsistent(format!("|A₁({m})| = {} exceeds κ₅m", gammas.len())));
    }
    Ok(A1Set { m: m.clone(), gammas, kappa5m, radius, c3: c3.clone() })
}

/// β = εγ with ε ∈ O_S^× and γ ∈ A₁(m).
pub fn decompose(ctx: &SContext, beta: &FieldElement, a1: &A1Set) -> Result<(FieldElement, FieldElement)> {
    let k = ctx.k();
    if beta.is_zero() {
        return Err(Error::ZeroElement);
    }
    let ns = ctx.s_norm(beta)?;
    if ns != qz(a1.m.clone()) {
        return Err(Error::Precondition(format!("N_S(β) = {ns} but A₁ was built for m = {}", a1.m)));
    }
    let (eta1, alpha) = clear_s_denominators(ctx, beta)?;
    let (eta2, gamma) = balance_by_units(ctx, &alpha, &a1.c3)?;
    let eps = k.inv(&k.mul(&eta1, &eta2))?;
    if k.mul(&eps, &gamma) != *beta {
        return Err(Error::Inconsistent("β ≠ εγ".into()));
    }
    if !a1.contains(k, &gamma) {
        return Err(Error::Inconsistent(format!("γ = {gamma} is not in A₁({})", a1.m)));
    }
    Ok((eps, gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    #[test]
    fn rational_and_gaussian_boxes() {
        let q = NumberField::rationals();
        let b = enumerate_box(&q, &Radius::Rational(qr(53, 10)), 1 << 30, 64).unwrap();
        assert_eq!(b.elements.len(), 11);
        assert!((b.bound.to_f64() - 12.6).abs() < 1e-9);
        let k = NumberField::from_poly(&[1, 0, 1]).unwrap();
        let b = enumerate_box(&k, &Radius::Rational(qi(2)), 1 << 30, 64).unwrap();
        assert_eq!(b.elements.len(), 13);
        assert!((b.bound.to_f64() - 16.0 * std::f64::consts::PI).abs() < 1e-9);
        let b = enumerate_box(&k, &Radius::Rational(qr(1, 2)), 1 << 30, 64).unwrap();
        assert_eq!(b.elements, vec![k.zero()]);
    }

    #[test]
    fn boundary_ties_are_exact() {
        // |2 + i|² = 5 = (√5)² exactly
        let k = NumberField::from_poly(&[1, 0, 1]).unwrap();
        let r = Radius::Root { radicand: qi(5), degree: 2 };
        assert!(in_box_exact(&k, &k.parse("2:1").unwrap(), &r, 64).unwrap());
        assert!(!in_box_exact(&k, &k.parse("2:2").unwrap(), &r, 64).unwrap());
        // 1 + √2 against radius 1 + √2 given as a root of its square
        let k = NumberField::from_poly(&[-2, 0, 1]).unwrap();
        let g = k.parse("1:1").unwrap();
        assert!(in_box_exact(&k, &g, &Radius::Rational(qr(5, 2)), 64).unwrap());
        assert!(!in_box_exact(&k, &g, &Radius::Rational(qr(12, 5)), 64).unwrap());
    }

    #[test]
    fn a2_counts() {
        assert_eq!(build_a2(&BigInt::from(1)).unwrap().len(), 1);
        assert_eq!(build_a2(&BigInt::from(12)).unwrap().len(), 18);
        assert_eq!(build_a2(&BigInt::from(6)).unwrap().len(), 9);
    }

    fn ctx(poly: &[i64], primes: &[u64]) -> SContext {
        let k = std::sync::Arc::new(NumberField::from_poly(poly).unwrap());
        SContext::new(k, &crate::s_arith::PrimeSelector::all(primes), 128).unwrap()
    }

    #[test]
    fn clearing_and_decomposing_over_q() {
        let c = ctx(&[0, 1], &[2]);
        let k = c.k();
        let beta = k.from_q(&qr(5, 8));
        let (eta, alpha) = clear_s_denominators(&c, &beta).unwrap();
        assert_eq!((eta, alpha), (k.from_int(8), k.from_int(5)));
        assert_eq!(clear_s_denominators(&c, &k.zero()).unwrap(), (k.one(), k.zero()));
        let k5 = CertifiedUpper::exact(BigInt::from(8));
        let a1 = build_a1(&c, &BigInt::from(5), &Ival::zero(128), &k5, 1 << 20).unwrap();
        assert_eq!(a1.gammas.len(), 20);
        let (e, g) = decompose(&c, &beta, &a1).unwrap();
        assert_eq!((e, g), (k.from_q(&qr(1, 8)), k.from_int(5)));
        let (e, g) = decompose(&c, &k.from_int(-5), &a1).unwrap();
        assert_eq!(k.mul(&e, &g), k.from_int(-5));
        assert!(decompose(&c, &k.from_int(3), &a1).is_err());
        let c0 = ctx(&[0, 1], &[]);
        let a1 = build_a1(&c0, &BigInt::one(), &Ival::zero(128), &CertifiedUpper::exact(BigInt::from(4)), 1 << 20).unwrap();
        assert_eq!(a1.gammas, vec![k.from_int(-1), k.one()]);
    }

    #[test]
    fn units_balance_to_torsion() {
        let c = ctx(&[-1, -1, 1], &[]);
        let k = c.k();
        let c3 = Ival::point(&qr(1, 2), 128);
        let a = k.pow(&k.alpha(), 5).unwrap();
        let (eta, g) = balance_by_units(&c, &a, &c3).unwrap();
        assert_eq!(g, k.one());
        assert_eq!(k.mul(&a, &eta), g);
        let c = ctx(&[-2, 0, 1], &[]);
        let k = c.k();
        let (_, g) = balance_by_units(&c, &k.parse("3:2").unwrap(), &c3).unwrap();
        assert!(g == k.one() || g == k.from_int(-1));
        let (_, g) = balance_by_units(&c, &k.parse("7:5").unwrap(), &c3).unwrap();
        assert_eq!(k.norm(&g).abs(), qi(1));
        assert!(balance_by_units(&c, &k.zero(), &c3).is_err());
    }

    #[test]
    fn golden_ratio_a1_roundtrip() {
        let c = ctx(&[-1, -1, 1], &[2]);
        let k = c.k();
        let c3 = Ival::point(&qr(1, 2), 128);
        let k5 = crate::constants::kappa5(&c, &c3, crate::constants::PiExponent::R2);
        let a1 = build_a1(&c, &BigInt::from(11), &c3, &k5, 1 << 24).unwrap();
        let base = k.parse("3:1").unwrap();
        assert_eq!(c.s_norm(&base).unwrap(), qi(11));
        for (a, b) in [(0, 0), (3, -2), (-4, 5), (7, 1)] {
            let u = k.mul(&k.pow(&k.alpha(), a).unwrap(), &k.pow(&k.from_int(2), b).unwrap());
            let beta = k.mul(&u, &base);
            let (e, g) = decompose(&c, &beta, &a1).unwrap();
            assert_eq!(k.mul(&e, &g), beta);
            assert!(c.is_s_unit(&e));
        }
    }
}
