//! Binary forms: twisted forms f_ε, the twisted Thue–Mahler search, the
//! S-equivalence relation, equivalence of twisted families and the
//! inequality 0 < N_S(f(x, y)) ≤ m.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::number_field::{FieldElement, NumberField};
use crate::poly::Poly;
use crate::rational::{parse_q, qz, Q};
use crate::s_arith::{PrimeSelector, SContext, SUnitExponents};
use crate::sunit::{sunits_in_box, SUnit};
use crate::thue_mahler::{coordinate_box, s_dependence_classic};

/// f(X, Y) = Σ a_j X^{n−j} Y^j with a_j = coeffs[j].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryForm {
    pub coeffs: Vec<Q>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<Q>) -> Result<Self> {
        if coeffs.len() < 2 || coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidInput("a binary form needs degree ≥ 1 and a nonzero coefficient".into()));
        }
        Ok(BinaryForm { coeffs })
    }

    pub fn from_ints(c: &[i64]) -> Self {
        BinaryForm { coeffs: c.iter().map(|&x| Q::from_integer(x.into())).collect() }
    }

    /// Comma-separated coefficients a₀, …, a_n.
    pub fn parse(s: &str) -> Result<Self> {
        let c = s
            .split(',')
            .map(|t| parse_q(t).ok_or_else(|| Error::InvalidInput(format!("bad coefficient {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn int_coeffs(&self) -> Result<Vec<BigInt>> {
        if !self.is_integral() {
            return Err(Error::InvalidInput(format!("form {self} has non-integral coefficients")));
        }
        Ok(self.coeffs.iter().map(|c| c.to_integer()).collect())
    }

    pub fn eval_q(&self, x: &Q, y: &Q) -> Q {
        let n = self.degree();
        let mut s = Q::zero();
        for (j, a) in self.coeffs.iter().enumerate() {
            s += a * pow_q(x, n - j) * pow_q(y, j);
        }
        s
    }

    pub fn eval(&self, k: &NumberField, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.lift(k).eval(k, x, y)
    }

    pub fn lift(&self, k: &NumberField) -> KForm {
        KForm { c: self.coeffs.iter().map(|a| k.from_q(a)).collect() }
    }

    /// f(Y, X)
    pub fn swap(&self) -> BinaryForm {
        BinaryForm { coeffs: self.coeffs.iter().rev().cloned().collect() }
    }

    pub fn neg(&self) -> BinaryForm {
        BinaryForm { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// The field Q(α) for a root α of f(x, 1), with α itself. The defining
    /// polynomial is a₀^{n−1} f(t/a₀, 1), so α = θ/a₀.
    pub fn root_field(&self) -> Result<(Arc<NumberField>, FieldElement)> {
        let a = self.int_coeffs()?;
        let n = self.degree();
        if a[0].is_zero() {
            return Err(Error::InvalidInput("f(1, 0) = 0: the leading coefficient must be nonzero".into()));
        }
        let a0 = &a[0];
        let mut low_to_high = vec![BigInt::zero(); n + 1];
        for (j, aj) in a.iter().enumerate() {
            low_to_high[n - j] = if j == 0 { BigInt::one() } else { aj * num_traits::pow(a0.clone(), j - 1) };
        }
        let k = Arc::new(NumberField::new(&low_to_high, None)?);
        let alpha = k.scale(&k.alpha(), &(Q::one() / qz(a0.clone())));
        Ok((k, alpha))
    }
}

impl std::fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

fn pow_q(x: &Q, e: usize) -> Q {
    num_traits::pow(x.clone(), e)
}

/// A binary form with coefficients in K, same layout as `BinaryForm`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KForm {
    pub c: Vec<FieldElement>,
}

impl KForm {
    pub fn eval(&self, k: &NumberField, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let n = self.c.len() - 1;
        let mut s = k.zero();
        for (j, a) in self.c.iter().enumerate() {
            let t = k.mul(&k.mul(a, &k.pow(x, (n - j) as i64).unwrap()), &k.pow(y, j as i64).unwrap());
            s = k.add(&s, &t);
        }
        s
    }

    /// f(αX + βY, γX + δY)
    pub fn transform(&self, k: &NumberField, m: &[FieldElement; 4]) -> KForm {
        let n = self.c.len() - 1;
        // polynomials in Y/X, index = power of Y
        let mul = |p: &[FieldElement], q: &[FieldElement]| -> Vec<FieldElement> {
            let mut r = vec![k.zero(); p.len() + q.len() - 1];
            for (i, a) in p.iter().enumerate() {
                for (j, b) in q.iter().enumerate() {
                    r[i + j] = k.add(&r[i + j], &k.mul(a, b));
                }
            }
            r
        };
        let l1 = [m[0].clone(), m[1].clone()];
        let l2 = [m[2].clone(), m[3].clone()];
        let mut p1 = vec![vec![k.one()]];
        let mut p2 = vec![vec![k.one()]];
        for e in 1..=n {
            p1.push(mul(&p1[e - 1], &l1));
            p2.push(mul(&p2[e - 1], &l2));
        }
        let mut out = vec![k.zero(); n + 1];
        for (j, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let t = mul(&p1[n - j], &p2[j]);
            for (i, ti) in t.iter().enumerate() {
                out[i] = k.add(&out[i], &k.mul(a, ti));
            }
        }
        KForm { c: out }
    }

    pub fn scale(&self, k: &NumberField, eta: &FieldElement) -> KForm {
        KForm { c: self.c.iter().map(|a| k.mul(a, eta)).collect() }
    }

    /// Π(X − r_iY)
    pub fn from_roots(k: &NumberField, roots: &[FieldElement]) -> KForm {
        let mut c = vec![k.one()];
        for r in roots {
            let mut next = vec![k.zero(); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i] = k.add(&next[i], a);
                next[i + 1] = k.sub(&next[i + 1], &k.mul(a, r));
            }
            c = next;
        }
        KForm { c }
    }
}

/// f_ε(X, Y) = a₀Π(X − σ_i(αε)Y) through the characteristic polynomial of αε.
pub fn make_twisted_form(ctx: &SContext, f: &BinaryForm, alpha: &FieldElement, eps: &FieldElement) -> Result<BinaryForm> {
    let k = ctx.k();
    let n = f.degree();
    if k.d != n {
        return Err(Error::InvalidInput(format!("[K:Q] = {} but deg f = {n}", k.d)));
    }
    if !f.eval(k, alpha, &k.one()).is_zero() {
        return Err(Error::InvalidInput("α is not a root of f(x, 1)".into()));
    }
    if !ctx.is_s_unit(eps) {
        return Err(Error::NotSUnit(eps.to_string()));
    }
    let cp: Poly = k.charpoly(&k.mul(alpha, eps));
    let a0 = &f.coeffs[0];
    let coeffs: Vec<Q> = (0..=n).map(|j| a0 * cp.coeff(n - j)).collect();
    let g = BinaryForm { coeffs };
    if !g.is_integral() {
        return Err(Error::InvalidInput(format!("twisted form {g} is not integral")));
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistSolution {
    pub x: BigInt,
    pub y: BigInt,
    pub eps: FieldElement,
    pub eps_exps: SUnitExponents,
    /// f_ε(x, y) = sign·k·Πp_i^{z_i}
    pub sign: i8,
    pub z: Vec<u32>,
    pub class: usize,
}

#[derive(Clone, Debug)]
pub struct TwistResult {
    pub solutions: Vec<TwistSolution>,
    pub twists: usize,
    /// Twists skipped, with the reason (degree below 3, non-integral form).
    pub rejected: Vec<(FieldElement, String)>,
    pub classes: usize,
    pub max_multiplicity: usize,
}

/// Exponents of n/k over the given primes when n/k = ±Πp^z, z ≥ 0.
fn smooth_exponents(v: &BigInt, kv: &BigInt, primes: &[u64]) -> Option<(i8, Vec<u32>)> {
    if v.is_zero() || !(v % kv).is_zero() {
        return None;
    }
    let mut r = (v / kv).abs();
    let sign = if (v / kv).is_negative() { -1 } else { 1 };
    let mut z = Vec::with_capacity(primes.len());
    for &p in primes {
        let p = BigInt::from(p);
        let mut e = 0;
        while (&r % &p).is_zero() {
            r /= &p;
            e += 1;
        }
        z.push(e);
    }
    r.is_one().then_some((sign, z))
}

/// Solutions of f_ε(x, y) = ±k·p₁^{z₁}⋯p_t^{z_t} with xy ≠ 0 and
/// gcd(xy, p₁⋯p_t) = 1 for ε in the S-unit exponent box of K = Q(α) (or an
/// explicit list) and |x|, |y| ≤ xy_box.
pub fn twist_search(
    f: &BinaryForm,
    kv: &BigInt,
    primes: &[u64],
    eps: Option<Vec<FieldElement>>,
    unit_box: i64,
    xy_box: i64,
    prec: u32,
    cap: u128,
) -> Result<TwistResult> {
    if kv.is_zero() {
        return Err(Error::InvalidInput("k must be nonzero".into()));
    }
    let (field, alpha) = f.root_field()?;
    let ctx = SContext::new(field, &PrimeSelector::all(primes), prec)?;
    let k = ctx.k();
    let units: Vec<SUnit> = match eps {
        Some(list) => list
            .into_iter()
            .map(|v| Ok(SUnit { exps: ctx.exponents(&v)?, value: v }))
            .collect::<Result<_>>()?,
        None => sunits_in_box(&ctx, unit_box, cap)?,
    };
    let side = 2 * xy_box as u128 + 1;
    let work = side * side * units.len() as u128;
    if work > cap {
        return Err(Error::CapExceeded { required: work, cap });
    }
    let pk: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    let per: Vec<Result<(Vec<TwistSolution>, Option<(FieldElement, String)>)>> = units
        .par_iter()
        .map(|u| {
            if k.element_degree(&k.mul(&alpha, &u.value)) < 3 {
                return Ok((vec![], Some((u.value.clone(), "[Q(αε):Q] < 3".to_string()))));
            }
            let g = match make_twisted_form(&ctx, f, &alpha, &u.value) {
                Ok(g) => g,
                Err(Error::InvalidInput(m)) => return Ok((vec![], Some((u.value.clone(), m)))),
                Err(e) => return Err(e),
            };
            let gi = g.int_coeffs()?;
            let n = g.degree();
            let mut out = Vec::new();
            for x in -xy_box..=xy_box {
                for y in -xy_box..=xy_box {
                    if x == 0 || y == 0 {
                        continue;
                    }
                    let (bx, by) = (BigInt::from(x), BigInt::from(y));
                    if !(&bx * &by).gcd(&pk).is_one() {
                        continue;
                    }
                    let mut v = BigInt::zero();
                    for (j, a) in gi.iter().enumerate() {
                        v += a * num_traits::pow(bx.clone(), n - j) * num_traits::pow(by.clone(), j);
                    }
                    if let Some((sign, z)) = smooth_exponents(&v, kv, primes) {
                        out.push(TwistSolution {
                            x: bx,
                            y: by,
                            eps: u.value.clone(),
                            eps_exps: u.exps.clone(),
                            sign,
                            z,
                            class: 0,
                        });
                    }
                }
            }
            Ok((out, None))
        })
        .collect();
    let mut sols = Vec::new();
    let mut rejected = Vec::new();
    for p in per {
        let (s, r) = p?;
        sols.extend(s);
        rejected.extend(r);
    }
    sols.sort_by(|a, b| (&a.eps, &a.x, &a.y).cmp(&(&b.eps, &b.x, &b.y)));
    // (x, y, ε) ~ (−x, −y, ε) ~ (x, −y, −ε) ~ (−x, y, −ε): the rational S-units η
    // compatible with gcd(xy, p₁⋯p_t) = 1 are ±1
    let key = |s: &TwistSolution| {
        let me = k.neg(&s.eps);
        let vars = [
            (s.x.clone(), s.y.clone(), s.eps.clone()),
            (-&s.x, -&s.y, s.eps.clone()),
            (s.x.clone(), -&s.y, me.clone()),
            (-&s.x, s.y.clone(), me),
        ];
        vars.into_iter().min_by(|a, b| (&a.2, &a.0, &a.1).cmp(&(&b.2, &b.0, &b.1))).unwrap()
    };
    let mut ids: BTreeMap<(FieldElement, BigInt, BigInt), usize> = BTreeMap::new();
    let mut counts: Vec<usize> = Vec::new();
    for s in sols.iter_mut() {
        let (x, y, e) = key(s);
        let next = ids.len();
        let id = *ids.entry((e, x, y)).or_insert(next);
        if id == counts.len() {
            counts.push(0);
        }
        counts[id] += 1;
        s.class = id;
    }
    let max_multiplicity = counts.iter().copied().max().unwrap_or(0);
    if max_multiplicity > 4 {
        return Err(Error::Inconsistent(format!("a class holds {max_multiplicity} > 4 tuples")));
    }
    Ok(TwistResult { solutions: sols, twists: units.len(), rejected, classes: counts.len(), max_multiplicity })
}

/// A witness g = ηf(αX + βY, γX + δY).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivWitness {
    pub m: [FieldElement; 4],
    pub eta: FieldElement,
}

#[derive(Clone, Debug)]
pub enum EquivOutcome {
    Equivalent(EquivWitness),
    NotFoundWithinBox { tried: u128 },
}

/// Order for search entries: nonzero elements by size, then zero.
fn entry_rank(k: &NumberField, a: &FieldElement) -> (bool, Q, Vec<std::cmp::Reverse<Q>>) {
    let c = k.basis_coords(a);
    let size: Q = c.iter().map(|x| qz(x.numer().abs() + x.denom() - BigInt::one())).sum();
    (a.is_zero(), size, c.into_iter().map(std::cmp::Reverse).collect())
}

fn entry_cost(k: &NumberField, a: &FieldElement) -> Q {
    entry_rank(k, a).1
}

/// Check g = ηf∘M exactly and return η.
pub fn check_witness(ctx: &SContext, f: &KForm, g: &KForm, m: &[FieldElement; 4]) -> Option<FieldElement> {
    let k = ctx.k();
    let det = k.sub(&k.mul(&m[0], &m[3]), &k.mul(&m[1], &m[2]));
    if det.is_zero() || !ctx.is_s_unit(&det) || m.iter().any(|e| !ctx.is_s_integer(e)) {
        return None;
    }
    let h = f.transform(k, m);
    let i = h.c.iter().position(|a| !a.is_zero())?;
    let eta = k.div(&g.c[i], &h.c[i]).ok()?;
    if eta.is_zero() || !ctx.is_s_unit(&eta) {
        return None;
    }
    (h.scale(k, &eta) == *g).then_some(eta)
}

/// Search for g = ηf(αX + βY, γX + δY) with entries c·u (c in the coordinate
/// box, u in the S-unit box) and αδ − βγ ∈ O_S^×. The first witness in the
/// order (total size, then α, δ, β, γ by rank) is returned.
pub fn s_equivalence_test(ctx: &SContext, f: &KForm, g: &KForm, b: i64, unit_box: i64, cap: u128) -> Result<EquivOutcome> {
    let k = ctx.k();
    if f.c.len() != g.c.len() {
        return Err(Error::InvalidInput("forms of different degrees".into()));
    }
    let units = sunits_in_box(ctx, unit_box, cap)?;
    let mut entries: Vec<FieldElement> = Vec::new();
    for c in coordinate_box(k, b) {
        for u in &units {
            entries.push(k.mul(&c, &u.value));
        }
    }
    entries.sort_by_key(|a| entry_rank(k, a));
    entries.dedup();
    let e = entries.len();
    let total = (e as u128).pow(4);
    if total > cap {
        return Err(Error::CapExceeded { required: total, cap });
    }
    let cost: Vec<Q> = entries.iter().map(|a| entry_cost(k, a)).collect();
    let mut order: Vec<[usize; 4]> = Vec::with_capacity(total as usize);
    for a in 0..e {
        for d in 0..e {
            for bb in 0..e {
                for c in 0..e {
                    order.push([a, bb, c, d]);
                }
            }
        }
    }
    order.sort_by(|p, q| {
        let cp: Q = p.iter().map(|&i| cost[i].clone()).sum();
        let cq: Q = q.iter().map(|&i| cost[i].clone()).sum();
        cp.cmp(&cq).then((p[0], p[3], p[1], p[2]).cmp(&(q[0], q[3], q[1], q[2])))
    });
    let hit = order.par_iter().position_first(|idx| {
        let m = idx.map(|i| entries[i].clone());
        check_witness(ctx, f, g, &m).is_some()
    });
    Ok(match hit {
        Some(p) => {
            let m = order[p].map(|i| entries[i].clone());
            let eta = check_witness(ctx, f, g, &m).unwrap();
            EquivOutcome::Equivalent(EquivWitness { m, eta })
        }
        None => EquivOutcome::NotFoundWithinBox { tried: total },
    })
}

/// The inverse witness: f = η′g∘M′ with M′ = adj(M)/… scaled to stay in O_S.
pub fn inverse_witness(ctx: &SContext, f: &KForm, g: &KForm, w: &EquivWitness) -> Option<EquivWitness> {
    let k = ctx.k();
    let [a, b, c, d] = w.m.clone();
    let m = [d, k.neg(&b), k.neg(&c), a];
    check_witness(ctx, g, f, &m).map(|eta| EquivWitness { m, eta })
}

/// ε̲ = (ε₁, …, ε_n) with ε₁ = 1, S-units, Card{α_iε_i} ≥ 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistVector {
    pub eps: Vec<FieldElement>,
}

impl TwistVector {
    pub fn new(ctx: &SContext, alphas: &[FieldElement], eps: Vec<FieldElement>) -> Result<Self> {
        let k = ctx.k();
        if eps.len() != alphas.len() || eps.is_empty() {
            return Err(Error::InvalidInput("twist vector length differs from the number of α".into()));
        }
        if eps[0] != k.one() {
            return Err(Error::InvalidInput("twist vectors are normalized with ε₁ = 1".into()));
        }
        for e in &eps {
            if !ctx.is_s_unit(e) {
                return Err(Error::NotSUnit(e.to_string()));
            }
        }
        let mut t: Vec<FieldElement> = alphas.iter().zip(&eps).map(|(a, e)| k.mul(a, e)).collect();
        t.sort();
        t.dedup();
        if t.len() < 3 {
            return Err(Error::Precondition("Card{α_iε_i} < 3: the vector is outside the admissible set".into()));
        }
        Ok(TwistVector { eps })
    }

    pub fn roots(&self, k: &NumberField, alphas: &[FieldElement]) -> Vec<FieldElement> {
        alphas.iter().zip(&self.eps).map(|(a, e)| k.mul(a, e)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Copy)]
pub enum FamilyCase {
    /// γ = 0
    Triangular,
    /// (α, δ) = (0, 0)
    AntiDiagonal,
}

#[derive(Clone, Debug)]
pub struct FamilyEquivReport {
    pub witness: Option<(FamilyCase, Vec<usize>, EquivWitness)>,
    pub antidiagonal_matchings_checked: usize,
    pub triangular_matchings_checked: usize,
}

fn permutations_of(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(i: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == p.len() {
            out.push(p.clone());
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            rec(i + 1, p, out);
            p.swap(i, j);
        }
    }
    rec(0, &mut p, &mut out);
    out.sort();
    out
}

/// Equivalence of f_ε̲ = Π(X − α_iε_iY) and f_ε̲′ within the two structural
/// cases. For (α, δ) = (0, 0) a matching σ with α_{σ(i)}ε_{σ(i)}α_iε′_i
/// constant is required; for γ = 0 the ratio α/δ is fixed by two roots and
/// the rest is checked exactly. Both checks run over all n! matchings.
pub fn family_equivalence_test(
    ctx: &SContext,
    alphas: &[FieldElement],
    eps: &TwistVector,
    eps_p: &TwistVector,
) -> Result<FamilyEquivReport> {
    let k = ctx.k();
    let n = alphas.len();
    let a = eps.roots(k, alphas);
    let bq = eps_p.roots(k, alphas);
    let f = KForm::from_roots(k, &a);
    let g = KForm::from_roots(k, &bq);
    let perms = permutations_of(n);
    let mut anti = 0;
    let mut tri = 0;
    let mut found = None;
    for s in &perms {
        anti += 1;
        // (α, β, γ, δ) = (0, c, 1, 0) with c = a_{σ(i)}b_i
        let c = k.mul(&a[s[0]], &bq[0]);
        if (0..n).all(|i| k.mul(&a[s[i]], &bq[i]) == c) {
            let m = [k.zero(), c, k.one(), k.zero()];
            if let Some(eta) = check_witness(ctx, &f, &g, &m) {
                found.get_or_insert((FamilyCase::AntiDiagonal, s.clone(), EquivWitness { m, eta }));
            }
        }
    }
    for s in &perms {
        tri += 1;
        // b_i α = a_{σ(i)} δ − β with δ = 1
        let den = k.sub(&bq[1], &bq[0]);
        if den.is_zero() {
            continue;
        }
        let r = k.div(&k.sub(&a[s[1]], &a[s[0]]), &den)?;
        let beta = k.sub(&a[s[0]], &k.mul(&r, &bq[0]));
        if (0..n).all(|i| k.sub(&a[s[i]], &k.mul(&r, &bq[i])) == beta) {
            let m = [r, beta, k.zero(), k.one()];
            if let Some(eta) = check_witness(ctx, &f, &g, &m) {
                found.get_or_insert((FamilyCase::Triangular, s.clone(), EquivWitness { m, eta }));
            }
        }
    }
    Ok(FamilyEquivReport { witness: found, antidiagonal_matchings_checked: anti, triangular_matchings_checked: tri })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsSolution {
    pub x: FieldElement,
    pub y: FieldElement,
    pub value: FieldElement,
    pub ns: BigInt,
    pub class: usize,
}

/// Every (x, y) in the coordinate box with 0 < N_S(f(x, y)) ≤ m; with
/// `nontrivial` only xy ≠ 0. Classes: x′ = ηx, y′ = ηy with η ∈ O_S^×.
pub fn ns_inequality_solve(ctx: &SContext, f: &BinaryForm, m: &BigInt, b: i64, nontrivial: bool, cap: u128) -> Result<Vec<NsSolution>> {
    if !m.is_positive() {
        return Err(Error::InvalidInput("m must be ≥ 1".into()));
    }
    let k = ctx.k();
    let fk = f.lift(k);
    let xs = coordinate_box(k, b);
    let work = (xs.len() as u128).pow(2);
    if work > cap {
        return Err(Error::CapExceeded { required: work, cap });
    }
    let pairs: Vec<(usize, usize)> = (0..xs.len()).flat_map(|i| (0..xs.len()).map(move |j| (i, j))).collect();
    let found: Vec<Result<Option<NsSolution>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (&xs[i], &xs[j]);
            if (x.is_zero() && y.is_zero()) || (nontrivial && (x.is_zero() || y.is_zero())) {
                return Ok(None);
            }
            let v = fk.eval(k, x, y);
            if v.is_zero() {
                return Ok(None);
            }
            let ns = ctx.s_norm(&v)?;
            if !ns.is_integer() || &ns.to_integer() > m {
                return Ok(None);
            }
            Ok(Some(NsSolution { x: x.clone(), y: y.clone(), value: v, ns: ns.to_integer(), class: 0 }))
        })
        .collect();
    let mut sols = Vec::new();
    for f in found {
        if let Some(s) = f? {
            sols.push(s);
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..sols.len() {
        let hit = reps
            .iter()
            .position(|&r| s_dependence_classic(ctx, (&sols[r].x, &sols[r].y), (&sols[i].x, &sols[i].y)));
        sols[i].class = match hit {
            Some(c) => c,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        };
    }
    Ok(sols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    fn cubic() -> BinaryForm {
        BinaryForm::from_ints(&[1, 0, -1, -1])
    }

    fn ctx_of(k: Arc<NumberField>, primes: &[u64]) -> SContext {
        SContext::new(k, &PrimeSelector::all(primes), 128).unwrap()
    }

    #[test]
    fn twisted_forms() {
        let f = BinaryForm::from_ints(&[1, 0, -2]);
        let (k, a) = f.root_field().unwrap();
        let ctx = ctx_of(k.clone(), &[]);
        let eps = k.add(&k.one(), &a);
        assert_eq!(make_twisted_form(&ctx, &f, &a, &eps).unwrap(), BinaryForm::from_ints(&[1, -4, 2]));
        assert_eq!(make_twisted_form(&ctx, &f, &a, &k.one()).unwrap(), f);
        assert!(make_twisted_form(&ctx, &f, &a, &k.from_int(2)).is_err());
        let f = cubic();
        let (k, a) = f.root_field().unwrap();
        let ctx = ctx_of(k.clone(), &[]);
        assert_eq!(make_twisted_form(&ctx, &f, &a, &a).unwrap(), BinaryForm::from_ints(&[1, -2, 1, -1]));
        // f_{α⁻²} = −f(Y, X): the roots are the 1/σ_i(α)
        let inv2 = k.pow(&a, -2).unwrap();
        assert_eq!(make_twisted_form(&ctx, &f, &a, &inv2).unwrap(), f.swap().neg());
        // a non-monic form: 2X² − 3Y² has root α = θ/2 with θ² = 6
        let g = BinaryForm::from_ints(&[2, 0, -3]);
        let (k2, a2) = g.root_field().unwrap();
        assert!(g.eval(&k2, &a2, &k2.one()).is_zero());
    }

    #[test]
    fn twisted_search() {
        let f = cubic();
        let (k, _) = f.root_field().unwrap();
        let r = twist_search(&f, &BigInt::one(), &[], Some(vec![k.one()]), 0, 50, 128, 1 << 30).unwrap();
        let has = |x: i64, y: i64| r.solutions.iter().any(|s| s.x == BigInt::from(x) && s.y == BigInt::from(y));
        assert!(has(1, 1) && has(4, 3));
        assert!(r.max_multiplicity <= 4);
        let e = twist_search(&f, &BigInt::one(), &[], Some(vec![k.one()]), 0, 0, 128, 1 << 30).unwrap();
        assert!(e.solutions.is_empty());
        let t = twist_search(&f, &BigInt::one(), &[2], None, 1, 20, 128, 1 << 30).unwrap();
        assert!(t.solutions.iter().all(|s| s.x.is_odd() && s.y.is_odd()));
        assert!(twist_search(&f, &BigInt::zero(), &[], None, 0, 5, 128, 1 << 30).is_err());
    }

    #[test]
    fn equivalence_witnesses() {
        let q = Arc::new(NumberField::rationals());
        let ctx = ctx_of(q.clone(), &[]);
        let k = ctx.k();
        let w = |f: &BinaryForm, g: &BinaryForm| match s_equivalence_test(&ctx, &f.lift(k), &g.lift(k), 1, 0, 1 << 20).unwrap() {
            EquivOutcome::Equivalent(w) => {
                let mut v: Vec<i64> = w.m.iter().map(|e| e.as_rational().unwrap().to_integer().try_into().unwrap()).collect();
                v.push(w.eta.as_rational().unwrap().to_integer().try_into().unwrap());
                assert!(inverse_witness(&ctx, &f.lift(k), &g.lift(k), &w).is_some());
                Some(v)
            }
            EquivOutcome::NotFoundWithinBox { .. } => None,
        };
        let f2 = BinaryForm::from_ints(&[1, 0, 1]);
        assert_eq!(w(&f2, &f2), Some(vec![1, 0, 0, 1, 1]));
        assert_eq!(w(&f2, &BinaryForm::from_ints(&[1, 2, 2])), Some(vec![1, 1, 0, 1, 1]));
        assert_eq!(w(&cubic(), &cubic().swap().neg()), Some(vec![0, 1, 1, 0, -1]));
        assert_eq!(w(&f2, &BinaryForm::from_ints(&[1, 0, 3])), None);
    }

    #[test]
    fn family_equivalence() {
        let q = Arc::new(NumberField::rationals());
        let ctx = ctx_of(q.clone(), &[2]);
        let k = ctx.k();
        let al: Vec<FieldElement> = [1, 2, 4].iter().map(|&n| k.from_int(n)).collect();
        let tv = |e: [Q; 3]| TwistVector::new(&ctx, &al, e.iter().map(|x| k.from_q(x)).collect()).unwrap();
        let one = tv([qr(1, 1), qr(1, 1), qr(1, 1)]);
        let r = family_equivalence_test(&ctx, &al, &one, &one).unwrap();
        assert!(r.witness.is_some());
        assert_eq!(r.antidiagonal_matchings_checked, 6);
        let inv = tv([qr(1, 1), qr(1, 4), qr(1, 16)]);
        let r = family_equivalence_test(&ctx, &al, &one, &inv).unwrap();
        let (case, _, w) = r.witness.unwrap();
        assert_eq!(case, FamilyCase::AntiDiagonal);
        assert_eq!(w.eta, k.from_q(&qr(-1, 8)));
        let other = tv([qr(1, 1), qr(2, 1), qr(2, 1)]);
        let r = family_equivalence_test(&ctx, &al, &one, &other).unwrap();
        assert!(r.witness.is_none());
        assert_eq!((r.antidiagonal_matchings_checked, r.triangular_matchings_checked), (6, 6));
        assert!(TwistVector::new(&ctx, &al, vec![k.one(), k.from_q(&qr(1, 2)), k.from_q(&qr(1, 4))]).is_err());
    }

    #[test]
    fn ns_inequality() {
        let q = Arc::new(NumberField::rationals());
        let ctx = ctx_of(q, &[]);
        let k = ctx.k();
        let s = ns_inequality_solve(&ctx, &cubic(), &BigInt::one(), 50, false, 1 << 20).unwrap();
        let has = |x: i64, y: i64| s.iter().any(|t| t.x == k.from_int(x) && t.y == k.from_int(y));
        assert!(has(1, 1) && has(4, 3) && has(1, 0));
        assert!(ns_inequality_solve(&ctx, &cubic(), &BigInt::zero(), 5, false, 1 << 20).is_err());
        assert!(ns_inequality_solve(&ctx, &cubic(), &BigInt::one(), 0, false, 1 << 20).unwrap().is_empty());
        let ctx2 = ctx_of(ctx.field.clone(), &[2]);
        let s2 = ns_inequality_solve(&ctx2, &BinaryForm::from_ints(&[1, 0, 1]), &BigInt::one(), 4, true, 1 << 20).unwrap();
        let c = |x: i64, y: i64| s2.iter().find(|t| t.x == k.from_int(x) && t.y == k.from_int(y)).unwrap().class;
        assert_eq!(c(1, 1), c(2, 2));
        assert_ne!(c(1, 1), c(1, -1));
    }
}
