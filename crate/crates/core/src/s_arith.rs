//! The ring O_S, its unit group, the S-norm, unit and class data, and the
//! Lehmer-type constant δ_K.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::decomposition::{enumerate_box, resultant, Radius};
use crate::error::{Error, Result};
use crate::interval::Ival;
use crate::linalg;
use crate::number_field::{json_rational, FieldElement, NumberField};
use crate::places::{height, places_above, support_primes, theta_coords, valuation, PrimeIdeal};
use crate::rational::{exact_sqrt, factorize, is_prime, lcm_denoms, qi, qz, split_prime, Q};

/// Default cap on box enumerations performed while building field data.
pub const SEARCH_CAP: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    TrustedConfig,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Computed => "computed",
            Provenance::TrustedConfig => "trusted-config",
        }
    }
}

#[derive(Clone, Debug)]
pub struct UnitGroupData {
    /// Order of the torsion subgroup.
    pub w: u32,
    pub zeta: FieldElement,
    pub fundamental_units: Vec<FieldElement>,
    /// Enclosure of R_K (exactly 1 when the unit rank is 0).
    pub regulator: Ival,
    pub h_k: u64,
    pub h_k_provenance: Provenance,
}

/// Roots of unity, fundamental units, regulator and class number.
pub fn unit_class_data(k: &NumberField, prec: u32) -> Result<UnitGroupData> {
    let (w, zeta) = torsion(k, prec)?;
    let r = k.unit_rank();
    let units = match r {
        0 => vec![],
        1 => {
            let u = if k.d == 2 { real_quadratic_unit(k)? } else { rank_one_unit(k, prec)? };
            vec![normalize_unit(k, &u, w, &zeta, prec)?]
        }
        _ => {
            let cfg = k.config.fundamental_units.as_ref().ok_or_else(|| {
                Error::MissingData(format!("unit rank {r} needs fundamental_units in the field config"))
            })?;
            let mut us = Vec::new();
            for u in cfg {
                let c: Vec<Q> = u.iter().map(json_rational).collect::<Result<_>>()?;
                us.push(k.from_coords(&c)?);
            }
            if us.len() != r {
                return Err(Error::InvalidInput(format!("expected {r} fundamental units, got {}", us.len())));
            }
            us
        }
    };
    for u in &units {
        if !k.is_integral(u) || !k.norm(u).abs().is_one() {
            return Err(Error::InvalidInput(format!("{u} is not a unit")));
        }
    }
    let regulator = regulator(k, &units, prec)?;
    let (h_k, h_k_provenance) = class_number(k, &units, prec)?;
    Ok(UnitGroupData { w, zeta, fundamental_units: units, regulator, h_k, h_k_provenance })
}

fn coord_key(k: &NumberField, a: &FieldElement) -> (BigInt, Vec<Q>) {
    let c = k.basis_coords(a);
    let l1 = c.iter().fold(Q::zero(), |s, x| s + x.abs());
    (crate::rational::ceil_int(&l1), c)
}

/// Canonical choice among associates: least L1 norm of basis coordinates,
/// then lexicographically greatest coordinates.
pub fn canonical_pick<'a>(k: &NumberField, xs: impl IntoIterator<Item = &'a FieldElement>) -> Option<FieldElement> {
    let mut best: Option<(BigInt, Vec<Q>, FieldElement)> = None;
    for x in xs {
        let (l1, c) = coord_key(k, x);
        let better = match &best {
            None => true,
            Some((bl, bc, _)) => l1 < *bl || (l1 == *bl && c > *bc),
        };
        if better {
            best = Some((l1, c, x.clone()));
        }
    }
    best.map(|b| b.2)
}

fn torsion(k: &NumberField, prec: u32) -> Result<(u32, FieldElement)> {
    let b = enumerate_box(k, &Radius::Rational(Q::one()), SEARCH_CAP, prec)?;
    let roots: Vec<FieldElement> = b.elements.into_iter().filter(|x| k.is_root_of_unity(x)).collect();
    let w = roots.len() as u32;
    let gens: Vec<FieldElement> = roots
        .iter()
        .filter(|x| element_order(k, x, w) == w)
        .cloned()
        .collect();
    let zeta = canonical_pick(k, &gens).ok_or_else(|| Error::Inconsistent("no torsion generator".into()))?;
    Ok((w, zeta))
}

fn element_order(k: &NumberField, x: &FieldElement, w: u32) -> u32 {
    let mut p = x.clone();
    for n in 1..=w {
        if p == k.one() {
            return n;
        }
        p = k.mul(&p, x);
    }
    0
}

/// Fundamental unit of the quadratic order of discriminant D_K by the
/// continued fraction of the reduced number (P₀ + √D)/2.
fn real_quadratic_unit(k: &NumberField) -> Result<FieldElement> {
    let dd = k.disc.clone();
    // √D as an element: θ² + bθ + c = 0 gives (2θ + b)² = b² − 4c
    let g = &k.theta_poly;
    let b = g.coeff(1);
    let c = g.coeff(0);
    let dg = &b * &b - qi(4) * &c;
    let ratio = qz(dd.clone()) / &dg;
    let idx = exact_sqrt(&ratio).ok_or_else(|| Error::Inconsistent("basis discriminant ratio not a square".into()))?;
    let sqrt_d = k.scale(&k.add(&k.scale(&k.theta_gen(), &qi(2)), &k.from_q(&b)), &idx);
    let s = dd.sqrt();
    let parity = (&dd % 2u32 + 2u32) % 2u32;
    let mut p0 = s.clone();
    if (&p0 % 2u32 + 2u32) % 2u32 != parity {
        p0 -= 1;
    }
    if &p0 * &p0 == dd {
        p0 -= 2;
    }
    let q0 = BigInt::from(2);
    let (mut p, mut q) = (p0.clone(), q0.clone());
    let mut eps = k.one();
    loop {
        let omega = k.scale(&k.add(&k.from_bigint(&p), &sqrt_d), &Q::new(BigInt::one(), q.clone()));
        eps = k.mul(&eps, &omega);
        let a = (&p + &s).div_floor(&q);
        let pn = &a * &q - &p;
        let qn = (&dd - &pn * &pn) / &q;
        p = pn;
        q = qn;
        if p == p0 && q == q0 {
            break;
        }
    }
    if !k.is_integral(&eps) || !k.norm(&eps).abs().is_one() {
        return Err(Error::Inconsistent("continued fraction did not produce a unit".into()));
    }
    Ok(eps)
}

/// Unit of minimal max|σ| > 1 among all units, for unit rank one.
fn rank_one_unit(k: &NumberField, prec: u32) -> Result<FieldElement> {
    let mut q = qi(2);
    loop {
        let b = enumerate_box(k, &Radius::Rational(q.clone()), SEARCH_CAP, prec)?;
        let mut best: Option<(Ival, FieldElement)> = None;
        for x in b.elements {
            if x.is_zero() || !k.norm(&x).abs().is_one() || k.is_root_of_unity(&x) {
                continue;
            }
            let m = k.embed(&x, prec).iter().map(|z| z.abs()).reduce(|a, b| a.max(&b)).unwrap();
            let replace = match &best {
                None => true,
                Some((bm, _)) => m.lt(bm),
            };
            if replace {
                best = Some((m, x));
            }
        }
        if let Some((_, u)) = best {
            return Ok(u);
        }
        q *= qi(2);
    }
}

/// Among ζ^j u^{±1}, the representative that is > 1 at the last real
/// embedding, or of modulus > 1 at the first embedding with the canonical
/// torsion factor when K has no real embedding.
fn normalize_unit(k: &NumberField, u: &FieldElement, w: u32, zeta: &FieldElement, prec: u32) -> Result<FieldElement> {
    let e = if k.r1 > 0 { k.r1 - 1 } else { 0 };
    let z = k.embed_one(u, e, prec);
    let mut u = u.clone();
    if z.abs().lt(&Ival::int(1, prec)) {
        u = k.inv(&u)?;
    }
    let mut cands = Vec::new();
    let mut t = k.one();
    for _ in 0..w {
        cands.push(k.mul(&t, &u));
        t = k.mul(&t, zeta);
    }
    if k.r1 > 0 {
        for c in &cands {
            if k.embed_one(c, e, prec).re.is_positive() {
                return Ok(c.clone());
            }
        }
    }
    canonical_pick(k, &cands).ok_or(Error::ZeroElement)
}

/// log|u|_v at the first r archimedean places.
fn log_matrix(k: &NumberField, units: &[FieldElement], prec: u32) -> Result<Vec<Vec<Ival>>> {
    let r = units.len();
    let mut m = vec![Vec::with_capacity(r); r];
    for u in units {
        for (v, row) in m.iter_mut().enumerate() {
            let a = k.arch_abs(u, v, prec);
            row.push(a.ln().ok_or(Error::ZeroElement)?);
        }
    }
    Ok(m)
}

fn regulator(k: &NumberField, units: &[FieldElement], prec: u32) -> Result<Ival> {
    if units.is_empty() {
        return Ok(Ival::int(1, prec));
    }
    let m = log_matrix(k, units, prec + 32)?;
    let det = ival_det(&m);
    if det.contains_zero() {
        return Err(Error::InvalidInput("units are dependent (regulator 0)".into()));
    }
    Ok(det.abs())
}

/// Determinant of a small interval matrix by cofactor expansion.
pub fn ival_det(m: &[Vec<Ival>]) -> Ival {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let prec = m[0][0].prec;
    let mut acc = Ival::zero(prec);
    for j in 0..n {
        let minor: Vec<Vec<Ival>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let t = m[0][j].mul(&ival_det(&minor));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

fn class_number(k: &NumberField, units: &[FieldElement], prec: u32) -> Result<(u64, Provenance)> {
    let computed = compute_class_number(k, units, prec)?;
    let cfg = k.config.h_k;
    match (computed, cfg) {
        (Some(h), None) => Ok((h, Provenance::Computed)),
        (Some(h), Some(c)) => {
            if h != c {
                return Err(Error::InvalidInput(format!("configured h_K = {c} but computed {h}")));
            }
            Ok((h, Provenance::Computed))
        }
        (None, Some(c)) => {
            if k.config.trusted() {
                Ok((c, Provenance::TrustedConfig))
            } else {
                Err(Error::TrustViolation("h_K cannot be verified for this field; set trust_level to trusted".into()))
            }
        }
        (None, None) => Err(Error::MissingData("h_K could not be computed; supply it in the field config".into())),
    }
}

fn compute_class_number(k: &NumberField, units: &[FieldElement], prec: u32) -> Result<Option<u64>> {
    if k.d == 1 {
        return Ok(Some(1));
    }
    if k.d == 2 {
        let dd = k.disc.clone();
        if dd.is_negative() {
            return Ok(Some(imaginary_form_count(&dd)));
        }
        let hplus = indefinite_cycle_count(&dd);
        let n = k.norm(&units[0]);
        return Ok(Some(if n == qi(-1) { hplus } else { hplus / 2 }));
    }
    // Minkowski bound (4/π)^{r₂} d!/d^d √|D|
    let d = k.d as u32;
    let mut fact = BigInt::one();
    for i in 1..=d {
        fact *= i;
    }
    let frac = Q::new(fact, num_traits::pow(BigInt::from(d), d as usize));
    let four_pi = Ival::int(4, prec).div(&Ival::pi(prec)).unwrap().powi(k.r2 as u32);
    let mb = four_pi.mul_q(&frac).mul(&Ival::point(&qz(k.disc.abs()), prec).sqrt());
    let limit = crate::rational::floor_int(&mb.hi).to_u64().unwrap_or(u64::MAX);
    if limit > 10_000 {
        return Ok(None);
    }
    for p in 2..=limit {
        if !is_prime(p) {
            continue;
        }
        let ps = match places_above(k, p) {
            Ok(ps) => ps,
            Err(Error::IndexDivisor(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        for pr in ps {
            if qz(pr.norm()) > mb.hi {
                continue;
            }
            if principal_generator(k, units, &pr, 1, prec)?.is_none() {
                return Ok(None);
            }
        }
    }
    Ok(Some(1))
}

/// Number of reduced primitive positive definite forms of discriminant D < 0.
pub fn imaginary_form_count(dd: &BigInt) -> u64 {
    let n = -dd;
    let mut count = 0;
    let mut a = BigInt::one();
    while &a * &a * 3u32 <= n {
        let mut b: BigInt = -&a + 1;
        while b <= a {
            let num: BigInt = &b * &b - dd;
            let a4: BigInt = &a * 4u32;
            if (&num % &a4).is_zero() {
                let c: BigInt = &num / &a4;
                let ok_order = c >= a && !(b.is_negative() && c == a);
                if ok_order && a.gcd(&b).gcd(&c).is_one() {
                    count += 1;
                }
            }
            b += 1;
        }
        a += 1;
    }
    count
}

/// Number of cycles of reduced primitive indefinite forms of discriminant D > 0.
pub fn indefinite_cycle_count(dd: &BigInt) -> u64 {
    let s = dd.sqrt();
    let reduced = |a: &BigInt, b: &BigInt| -> bool {
        // 0 < b < √D and √D − b < 2|a| < √D + b
        let aa = a.abs() * 2u32;
        b.is_positive() && b <= &s && (&aa + b) * (&aa + b) > *dd && {
            let t = &aa - b;
            !t.is_positive() || &t * &t < *dd
        }
    };
    let mut forms = Vec::new();
    let mut b = BigInt::one();
    while b <= s {
        let num = &b * &b - dd;
        if (&num % 4u32).is_zero() {
            let ac = &num / 4u32;
            let m = ac.abs();
            let mut a = BigInt::one();
            while a <= m {
                if (&m % &a).is_zero() {
                    for sa in [a.clone(), -a.clone()] {
                        let c = &ac / &sa;
                        if reduced(&sa, &b) && sa.gcd(&b).gcd(&c).is_one() {
                            forms.push((sa, b.clone(), c));
                        }
                    }
                }
                a += 1;
            }
        }
        b += 1;
    }
    forms.sort();
    forms.dedup();
    let rho = |f: &(BigInt, BigInt, BigInt)| -> (BigInt, BigInt, BigInt) {
        let (_, b, c) = f;
        let m = c.abs() * 2u32;
        // b' ≡ −b (mod 2|c|), √D − 2|c| < b' < √D
        let mut bp = (-b).mod_floor(&m);
        // largest such b' below √D
        let top = &s - (&s - &bp).mod_floor(&m);
        bp = top;
        if &bp * &bp >= *dd {
            bp -= &m;
        }
        let cp = (&bp * &bp - dd) / (c * 4u32);
        (c.clone(), bp, cp)
    };
    let mut seen = vec![false; forms.len()];
    let mut cycles = 0;
    for i in 0..forms.len() {
        if seen[i] {
            continue;
        }
        cycles += 1;
        let mut f = forms[i].clone();
        loop {
            let j = forms.binary_search(&f).expect("reduction operator stays among reduced forms");
            if seen[j] {
                break;
            }
            seen[j] = true;
            f = rho(&f);
        }
    }
    cycles
}

/// Box radius that contains a unit-balanced generator of an ideal of norm N:
/// N^{1/d} exp(½ Σ_i max_σ |log|σ u_i||).
fn generator_radius(k: &NumberField, units: &[FieldElement], n: &BigInt, prec: u32) -> Radius {
    if units.is_empty() {
        return Radius::Root { radicand: qz(n.clone()), degree: k.d as u32 };
    }
    let mut s = Ival::zero(prec);
    for u in units {
        let m = k
            .embed(u, prec)
            .iter()
            .map(|z| z.abs().ln().expect("unit").abs())
            .reduce(|a, b| a.max(&b))
            .unwrap();
        s = s.add(&m);
    }
    let base = crate::decomposition::root_enclosure(&qz(n.clone()), k.d as u32, prec);
    let r = base.mul(&s.mul_q(&Q::new(BigInt::one(), BigInt::from(2))).exp());
    Radius::Enclosed(Ival::new(r.lo.clone(), r.hi.clone(), prec))
}

/// A generator of 𝔓^e, if 𝔓^e is principal.
fn principal_generator(
    k: &NumberField,
    units: &[FieldElement],
    pr: &PrimeIdeal,
    e: u32,
    prec: u32,
) -> Result<Option<FieldElement>> {
    let n = num_traits::pow(pr.norm(), e as usize);
    let rad = generator_radius(k, units, &n, prec);
    let b = enumerate_box(k, &rad, SEARCH_CAP, prec)?;
    let target = qz(n);
    let mut cands = Vec::new();
    for x in &b.elements {
        if x.is_zero() || k.norm(x).abs() != target {
            continue;
        }
        if valuation(k, x, pr)? == e as i64 {
            cands.push(x.clone());
        }
    }
    Ok(canonical_pick(k, &cands))
}

/// One finite place of S with its principal prime-power generator.
#[derive(Clone, Debug)]
pub struct SPrime {
    pub ideal: PrimeIdeal,
    /// Generator g with (g) = 𝔓^step.
    pub generator: FieldElement,
    /// Least k dividing h_K with 𝔓^k principal.
    pub step: u32,
}

/// Selects the places above `p`: all of them, or the one with `index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSelector {
    pub p: u64,
    pub index: Option<usize>,
}

impl PrimeSelector {
    /// Parse "2,3" or "5:0,7".
    pub fn parse_list(s: &str) -> Result<Vec<PrimeSelector>> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(vec![]);
        }
        s.split(',')
            .map(|t| {
                let t = t.trim();
                let (p, i) = match t.split_once(':') {
                    Some((p, i)) => (p, Some(i)),
                    None => (t, None),
                };
                let p: u64 = p.parse().map_err(|_| Error::InvalidInput(format!("bad prime '{t}'")))?;
                let index = match i {
                    Some(i) => Some(i.parse().map_err(|_| Error::InvalidInput(format!("bad place index '{t}'")))?),
                    None => None,
                };
                Ok(PrimeSelector { p, index })
            })
            .collect()
    }

    pub fn all(ps: &[u64]) -> Vec<PrimeSelector> {
        ps.iter().map(|&p| PrimeSelector { p, index: None }).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Outside,
    SInteger,
    SUnit,
}

impl Membership {
    pub fn as_str(&self) -> &'static str {
        match self {
            Membership::Outside => "outside",
            Membership::SInteger => "s_integer",
            Membership::SUnit => "s_unit",
        }
    }
}

/// Exponents of ε = ζ^{a₀} Π u_i^{a_i} Π g_j^{b_j}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SUnitExponents {
    pub torsion: u32,
    pub units: Vec<i64>,
    pub primes: Vec<i64>,
}

impl SUnitExponents {
    /// Free part (a₁…a_r, b₁…b_t) as one vector.
    pub fn free(&self) -> Vec<i64> {
        self.units.iter().chain(&self.primes).copied().collect()
    }
}

#[derive(Clone, Debug)]
pub struct SContext {
    pub field: Arc<NumberField>,
    pub unit_data: UnitGroupData,
    pub primes: Vec<SPrime>,
    /// Distinct rational primes below the finite places of S.
    pub rational_primes: Vec<u64>,
    /// Whether S holds every place above each of its rational primes.
    pub full: bool,
    /// Whether [O : Z[θ]] is supported on S (enables norm-based membership tests).
    index_in_s: bool,
    pub r: usize,
    pub t: usize,
    pub s: usize,
    pub nu: BigInt,
    pub prec: u32,
}

impl SContext {
    pub fn new(k: Arc<NumberField>, sel: &[PrimeSelector], prec: u32) -> Result<Self> {
        let unit_data = unit_class_data(&k, prec)?;
        Self::with_unit_data(k, sel, unit_data, prec)
    }

    pub fn with_unit_data(k: Arc<NumberField>, sel: &[PrimeSelector], unit_data: UnitGroupData, prec: u32) -> Result<Self> {
        let mut chosen: Vec<PrimeIdeal> = Vec::new();
        let mut full = true;
        for s in sel {
            let ps = places_above(&k, s.p)?;
            match s.index {
                None => chosen.extend(ps),
                Some(i) => {
                    let p = ps
                        .get(i)
                        .cloned()
                        .ok_or_else(|| Error::InvalidInput(format!("no place {i} above {}", s.p)))?;
                    if ps.len() > 1 {
                        full = false;
                    }
                    chosen.push(p);
                }
            }
        }
        chosen.sort_by_key(|a| (a.p, a.index));
        chosen.dedup();
        // a selection can still cover every place above p
        let mut rational_primes: Vec<u64> = chosen.iter().map(|p| p.p).collect();
        rational_primes.dedup();
        if !full {
            full = rational_primes
                .iter()
                .all(|&p| places_above(&k, p).map(|v| v.len()).unwrap_or(0) == chosen.iter().filter(|q| q.p == p).count());
        }
        let h = unit_data.h_k;
        let mut primes = Vec::new();
        for pr in chosen {
            let mut found = None;
            for e in crate::decomposition::divisors(&BigInt::from(h))? {
                let e = e.to_u32().unwrap();
                if let Some(g) = principal_generator(&k, &unit_data.fundamental_units, &pr, e, prec)? {
                    found = Some((g, e));
                    break;
                }
            }
            let (generator, step) = found.ok_or_else(|| {
                Error::Inconsistent(format!("no principal power of the prime above {} up to h_K = {h}", pr.p))
            })?;
            primes.push(SPrime { ideal: pr, generator, step });
        }
        let index_in_s = {
            let g = &k.theta_poly;
            let dg = resultant(g, &g.derivative()).abs();
            let idx2 = dg / qz(k.disc.abs());
            let idx = exact_sqrt(&idx2).map(|x| x.to_integer()).unwrap_or_else(BigInt::zero);
            !idx.is_zero() && is_smooth(&idx, &rational_primes)
        };
        let r = k.unit_rank();
        let t = primes.len();
        let nu = primes.iter().map(|p| p.ideal.norm()).max().unwrap_or_else(BigInt::one);
        Ok(SContext { field: k, unit_data, primes, rational_primes, full, index_in_s, r, t, s: r + t, nu, prec })
    }

    pub fn k(&self) -> &NumberField {
        &self.field
    }

    /// Generators in the order ζ, u₁…u_r, g₁…g_t.
    pub fn generators(&self) -> Vec<FieldElement> {
        let mut g = vec![self.unit_data.zeta.clone()];
        g.extend(self.unit_data.fundamental_units.iter().cloned());
        g.extend(self.primes.iter().map(|p| p.generator.clone()));
        g
    }

    pub fn w(&self) -> u32 {
        self.unit_data.w
    }

    fn fast(&self) -> bool {
        self.full && self.index_in_s
    }

    fn s_part(&self, n: &BigInt) -> BigInt {
        let mut n = n.abs();
        for &p in &self.rational_primes {
            n = split_prime(&n, p).1;
        }
        n
    }

    pub fn membership(&self, a: &FieldElement) -> Result<Membership> {
        if a.is_zero() {
            return Ok(Membership::SInteger);
        }
        let k = self.k();
        if self.fast() {
            let den = lcm_denoms(theta_coords(k, a).iter());
            if !is_smooth(&den, &self.rational_primes) {
                return Ok(Membership::Outside);
            }
            let n = k.norm(&k.scale(a, &qz(den)));
            return Ok(if self.s_part(n.numer()).is_one() { Membership::SUnit } else { Membership::SInteger });
        }
        let mut unit = true;
        for p in support_primes(k, a)? {
            for pr in places_above(k, p)? {
                if self.primes.iter().any(|q| q.ideal == pr) {
                    continue;
                }
                let o = valuation(k, a, &pr)?;
                if o < 0 {
                    return Ok(Membership::Outside);
                }
                if o > 0 {
                    unit = false;
                }
            }
        }
        Ok(if unit { Membership::SUnit } else { Membership::SInteger })
    }

    pub fn is_s_unit(&self, a: &FieldElement) -> bool {
        if a.is_zero() {
            return false;
        }
        if self.k().d == 1 {
            let q = &a.c[0];
            return self.s_part(q.numer()).is_one() && self.s_part(q.denom()).is_one();
        }
        matches!(self.membership(a), Ok(Membership::SUnit))
    }

    pub fn is_s_integer(&self, a: &FieldElement) -> bool {
        if self.k().d == 1 {
            return self.s_part(a.c[0].denom()).is_one();
        }
        matches!(self.membership(a), Ok(Membership::SUnit | Membership::SInteger))
    }

    /// N_S(a) = |N(a)| Π_{𝔓∈S} N(𝔓)^{-ord_𝔓 a}.
    pub fn s_norm(&self, a: &FieldElement) -> Result<Q> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let k = self.k();
        if k.d == 1 || self.full {
            let n = k.norm(a);
            return Ok(Q::new(self.s_part(n.numer()), self.s_part(n.denom())));
        }
        let mut n = k.norm(a).abs();
        for p in &self.primes {
            let o = valuation(k, a, &p.ideal)?;
            n *= crate::rational::qpow(&qz(p.ideal.norm()), o);
            let _ = &p.generator;
        }
        Ok(n)
    }

    /// N_S(a) as the norm of the prime-to-S part of the ideal (a), from the
    /// valuations at the primes outside S.
    pub fn s_norm_ideal(&self, a: &FieldElement) -> Result<Q> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let k = self.k();
        let mut n = Q::one();
        for p in support_primes(k, a)? {
            for pr in places_above(k, p)? {
                if self.primes.iter().any(|q| q.ideal == pr) {
                    continue;
                }
                let o = valuation(k, a, &pr)?;
                n *= crate::rational::qpow(&qz(pr.norm()), o);
            }
        }
        Ok(n)
    }

    /// Π_{v∈S} |a|_v, with the archimedean product certified by intervals
    /// and identified with |N(a)|.
    pub fn s_norm_places(&self, a: &FieldElement) -> Result<Q> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        let k = self.k();
        let mut arch = Ival::int(1, self.prec);
        for v in 0..k.n_arch() {
            arch = arch.mul(&k.arch_abs(a, v, self.prec));
        }
        let exact = k.norm(a).abs();
        if !arch.contains(&exact) {
            return Err(Error::Inconsistent("archimedean product does not enclose |N(a)|".into()));
        }
        let mut n = exact;
        for p in &self.primes {
            let o = valuation(k, a, &p.ideal)?;
            n *= crate::rational::qpow(&qz(p.ideal.norm()), -o);
        }
        Ok(n)
    }

    /// Build ζ^{a₀} Π u_i^{a_i} Π g_j^{b_j}.
    pub fn build(&self, e: &SUnitExponents) -> Result<FieldElement> {
        let k = self.k();
        let mut x = k.pow(&self.unit_data.zeta, e.torsion as i64)?;
        for (u, &a) in self.unit_data.fundamental_units.iter().zip(&e.units) {
            if a != 0 {
                x = k.mul(&x, &k.pow(u, a)?);
            }
        }
        for (g, &b) in self.primes.iter().zip(&e.primes) {
            if b != 0 {
                x = k.mul(&x, &k.pow(&g.generator, b)?);
            }
        }
        Ok(x)
    }

    /// Exponent vector of an S-unit in the generated group.
    pub fn exponents(&self, eps: &FieldElement) -> Result<SUnitExponents> {
        if eps.is_zero() {
            return Err(Error::ZeroElement);
        }
        let k = self.k();
        if k.d == 1 {
            return self.exponents_rational(&eps.c[0]);
        }
        if !self.is_s_unit(eps) {
            return Err(Error::NotSUnit(format!("{eps}")));
        }
        let mut primes = Vec::with_capacity(self.t);
        let mut rest = eps.clone();
        for p in &self.primes {
            let o = valuation(k, eps, &p.ideal)?;
            if o % p.step as i64 != 0 {
                return Err(Error::NotSUnit(format!(
                    "valuation {o} at the prime above {} is not a multiple of {}",
                    p.ideal.p, p.step
                )));
            }
            let b = o / p.step as i64;
            if b != 0 {
                rest = k.div(&rest, &k.pow(&p.generator, b)?)?;
            }
            primes.push(b);
        }
        let units = self.unit_log_solve(&rest)?;
        for (u, &a) in self.unit_data.fundamental_units.iter().zip(&units) {
            if a != 0 {
                rest = k.div(&rest, &k.pow(u, a)?)?;
            }
        }
        let mut z = k.one();
        for a0 in 0..self.w() {
            if z == rest {
                return Ok(SUnitExponents { torsion: a0, units, primes });
            }
            z = k.mul(&z, &self.unit_data.zeta);
        }
        Err(Error::Inconsistent(format!("{eps}: unit part is not generated by the fundamental units")))
    }

    fn exponents_rational(&self, q: &Q) -> Result<SUnitExponents> {
        let mut primes = Vec::with_capacity(self.t);
        let mut num = q.numer().clone();
        let mut den = q.denom().clone();
        for p in &self.primes {
            let (a, n2) = split_prime(&num, p.ideal.p);
            let (b, d2) = split_prime(&den, p.ideal.p);
            num = n2;
            den = d2;
            primes.push(a as i64 - b as i64);
        }
        if !num.abs().is_one() || !den.is_one() {
            return Err(Error::NotSUnit(crate::rational::q_to_string(q)));
        }
        let torsion = if num.is_negative() { 1 } else { 0 };
        Ok(SUnitExponents { torsion, units: vec![], primes })
    }

    fn unit_log_solve(&self, x: &FieldElement) -> Result<Vec<i64>> {
        let r = self.r;
        if r == 0 {
            return Ok(vec![]);
        }
        let k = self.k();
        let us = &self.unit_data.fundamental_units;
        let m = log_matrix(k, us, 96)?;
        let mf: linalg::Mat = m.iter().map(|row| row.iter().map(|v| v.mid()).collect()).collect();
        let rhs: Vec<Q> = (0..r).map(|v| k.arch_abs(x, v, 96).ln().map(|l| l.mid())).collect::<Option<_>>().ok_or(Error::ZeroElement)?;
        let sol = linalg::solve(&mf, &rhs).ok_or_else(|| Error::Inconsistent("singular unit log matrix".into()))?;
        Ok(sol.iter().map(|s| crate::number_field::round_q(s).to_i64().unwrap_or(0)).collect())
    }
}

pub fn is_smooth(n: &BigInt, primes: &[u64]) -> bool {
    let mut n = n.abs();
    if n.is_zero() {
        return false;
    }
    for &p in primes {
        n = split_prime(&n, p).1;
    }
    n.is_one()
}

#[derive(Clone, Debug)]
pub struct DeltaK {
    pub value: Ival,
    pub threshold: Q,
    pub witness: Option<FieldElement>,
    pub enumerated: usize,
}

/// δ_K from an exhaustive search of integers with every |σα| ≤ e^{dH}.
pub fn delta_k(k: &NumberField, h: &Q, cap: u128, prec: u32) -> Result<DeltaK> {
    if !h.is_positive() {
        return Err(Error::InvalidInput("height threshold must be positive".into()));
    }
    let d = qi(k.d as i64);
    let rad = Ival::point(&(h * &d), prec).exp();
    let b = enumerate_box(k, &Radius::Enclosed(rad), cap, prec)?;
    let hiv = Ival::point(h, prec);
    let mut best: Option<(Ival, FieldElement)> = None;
    for x in &b.elements {
        if x.is_zero() || k.is_root_of_unity(x) {
            continue;
        }
        let hx = height(k, x, prec);
        let replace = match &best {
            None => true,
            Some((bh, _)) => hx.lo < bh.lo,
        };
        if replace {
            best = Some((hx, x.clone()));
        }
    }
    let (value, witness) = match best {
        Some((hx, x)) if hx.lo < hiv.lo => (hx.min(&hiv), Some(x)),
        _ => (hiv, None),
    };
    Ok(DeltaK { value: value.mul_q(&d), threshold: h.clone(), witness, enumerated: b.elements.len() })
}

/// Primes of a rational number's factorization (numerator and denominator).
pub fn rational_support(q: &Q) -> Result<Vec<u64>> {
    let mut ps: Vec<u64> = factorize(q.numer())?.into_iter().chain(factorize(q.denom())?).map(|x| x.0).collect();
    ps.sort_unstable();
    ps.dedup();
    Ok(ps)
}
