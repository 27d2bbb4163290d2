//! The family equation (X − α₁E₁Y)(X − α₂E₂Y)(X − α₃E₃Y)Z = μE and the
//! classical equation Π(X − α_iY) = μE: verification, box searches,
//! dependence classes, the vanishing-subsum case analysis of the sum T, and
//! canonical representatives.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::constants::{CertifiedUpper, ProblemData};
use crate::decomposition::{build_a1, build_a2, decompose, divisors, A1Set};
use crate::error::{Error, Result};
use crate::interval::Ival;
use crate::number_field::{FieldElement, NumberField};
use crate::rational::{qz, Q};
use crate::places::valuation;
use crate::s_arith::SContext;
use crate::sunit::{build_a4, exponent_box, sunits_in_box};

/// A solution (x, y, z, ε₁, ε₂, ε₃, ε) with its derived data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySolution {
    pub x: FieldElement,
    pub y: FieldElement,
    pub z: FieldElement,
    pub eps_i: [FieldElement; 3],
    pub eps: FieldElement,
    /// α̃_i = α_iε_i
    pub alpha_t: [FieldElement; 3],
    /// β_i = x − α̃_i y
    pub beta: [FieldElement; 3],
    /// β′_i = qβ_i
    pub beta_p: [FieldElement; 3],
    /// k′_i = N_S(β′_i)
    pub k_p: [BigInt; 3],
    pub trivial: bool,
}

impl FamilySolution {
    pub fn tuple(&self) -> [FieldElement; 7] {
        [
            self.x.clone(),
            self.y.clone(),
            self.z.clone(),
            self.eps_i[0].clone(),
            self.eps_i[1].clone(),
            self.eps_i[2].clone(),
            self.eps.clone(),
        ]
    }
}

fn s_integer(ctx: &SContext, a: &FieldElement, what: &str) -> Result<()> {
    if ctx.is_s_integer(a) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} = {a} is not in O_S")))
    }
}

fn s_unit(ctx: &SContext, a: &FieldElement, what: &str) -> Result<()> {
    if ctx.is_s_unit(a) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} = {a} is not an S-unit")))
    }
}

/// Check a candidate 7-tuple exactly and populate the derived data.
pub fn verify_family_solution(ctx: &SContext, pd: &ProblemData, s7: &[FieldElement; 7]) -> Result<FamilySolution> {
    let k = ctx.k();
    let [x, y, z, e1, e2, e3, e] = s7.clone();
    s_integer(ctx, &x, "x")?;
    s_integer(ctx, &y, "y")?;
    s_integer(ctx, &z, "z")?;
    for (i, ei) in [&e1, &e2, &e3].into_iter().enumerate() {
        s_unit(ctx, ei, &format!("ε{}", i + 1))?;
    }
    s_unit(ctx, &e, "ε")?;
    let eps_i = [e1, e2, e3];
    let alpha_t: [FieldElement; 3] = std::array::from_fn(|i| k.mul(&pd.alphas[i], &eps_i[i]));
    if alpha_t[0] == alpha_t[1] || alpha_t[1] == alpha_t[2] || alpha_t[0] == alpha_t[2] {
        return Err(Error::Precondition("Card{α₁ε₁, α₂ε₂, α₃ε₃} < 3".into()));
    }
    let beta: [FieldElement; 3] = std::array::from_fn(|i| k.sub(&x, &k.mul(&alpha_t[i], &y)));
    let lhs = k.mul(&k.mul(&k.mul(&beta[0], &beta[1]), &beta[2]), &z);
    if lhs != k.mul(&pd.mu, &e) {
        return Err(Error::InvalidInput(format!("identity fails: left side {lhs}, μE = {}", k.mul(&pd.mu, &e))));
    }
    let qq = qz(pd.q.clone());
    let beta_p: [FieldElement; 3] = std::array::from_fn(|i| k.scale(&beta[i], &qq));
    let mut k_p: [BigInt; 3] = Default::default();
    for i in 0..3 {
        let n = ctx.s_norm(&beta_p[i])?;
        if !n.is_integer() {
            return Err(Error::Inconsistent("N_S(β′) is not an integer".into()));
        }
        k_p[i] = n.to_integer();
    }
    let trivial = x.is_zero() || y.is_zero();
    let q3 = k.scale(&k.mul(&pd.mu, &e), &(&qq * &qq * &qq));
    let prod = k.mul(&k.mul(&beta_p[0], &beta_p[1]), &beta_p[2]);
    if ctx.is_s_unit(&z) {
        // β′₁β′₂β′₃ = q³με/z, and k′₁k′₂k′₃ = m
        if k.mul(&prod, &z) != q3 {
            return Err(Error::Inconsistent("β′₁β′₂β′₃ z ≠ q³με".into()));
        }
        if &k_p[0] * &k_p[1] * &k_p[2] != pd.m {
            return Err(Error::Inconsistent("k′₁k′₂k′₃ ≠ m".into()));
        }
    }
    Ok(FamilySolution { x, y, z, eps_i, eps: e, alpha_t, beta, beta_p, k_p, trivial })
}

/// S³-dependence: x′ = xη₁, y′ = yη₁η₃⁻¹, z′ = zη₂, ε′_i = ε_iη₃, ε′ = εη₁³η₂.
pub fn s3_dependence_test(ctx: &SContext, a: &FamilySolution, b: &FamilySolution) -> Result<Option<[FieldElement; 3]>> {
    if a.trivial || b.trivial {
        return Err(Error::Precondition("S³-dependence is defined on nontrivial solutions".into()));
    }
    let k = ctx.k();
    let eta3 = k.div(&b.eps_i[0], &a.eps_i[0])?;
    for i in 1..3 {
        if k.mul(&a.eps_i[i], &eta3) != b.eps_i[i] {
            return Ok(None);
        }
    }
    let eta1 = k.div(&b.x, &a.x)?;
    let eta2 = k.div(&b.z, &a.z)?;
    for h in [&eta1, &eta2, &eta3] {
        if !ctx.is_s_unit(h) {
            return Ok(None);
        }
    }
    if k.div(&k.mul(&a.y, &eta1), &eta3)? != b.y {
        return Ok(None);
    }
    if k.mul(&k.mul(&a.eps, &k.pow(&eta1, 3)?), &eta2) != b.eps {
        return Ok(None);
    }
    Ok(Some([eta1, eta2, eta3]))
}

/// S-dependence of two solutions (x, y, ε) of Π(X − α_iY) = μE: the same
/// point of P¹ with an S-unit ratio.
pub fn s_dependence_classic(ctx: &SContext, a: (&FieldElement, &FieldElement), b: (&FieldElement, &FieldElement)) -> bool {
    let k = ctx.k();
    if k.mul(a.0, b.1) != k.mul(b.0, a.1) {
        return false;
    }
    let eta = if !a.0.is_zero() { k.div(b.0, a.0) } else { k.div(b.1, a.1) };
    match eta {
        Ok(e) => ctx.is_s_unit(&e),
        Err(_) => false,
    }
}

/// A solution (x, y, ε₁, ε₂, ε) of (X − Y)(X − E₁Y)(X − E₂Y) = E.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSolution {
    pub x: FieldElement,
    pub y: FieldElement,
    pub e1: FieldElement,
    pub e2: FieldElement,
    pub eps: FieldElement,
}

/// S-dependence of reduced solutions: x′ = xη, y′ = yη, ε′₁ = ε₁, ε′₂ = ε₂, ε′ = εη³.
pub fn s_dependence_reduced(ctx: &SContext, a: &ReducedSolution, b: &ReducedSolution) -> bool {
    let k = ctx.k();
    if a.e1 != b.e1 || a.e2 != b.e2 || a.x.is_zero() {
        return false;
    }
    let Ok(eta) = k.div(&b.x, &a.x) else { return false };
    ctx.is_s_unit(&eta)
        && k.mul(&a.y, &eta) == b.y
        && k.pow(&eta, 3).map(|e3| k.mul(&a.eps, &e3) == b.eps).unwrap_or(false)
}

/// Elements of O_K with basis coordinates in [−b, b].
pub fn coordinate_box(k: &NumberField, b: i64) -> Vec<FieldElement> {
    exponent_box(k.d, b)
        .into_iter()
        .map(|c| k.from_basis_ints(&c.into_iter().map(BigInt::from).collect::<Vec<_>>()))
        .collect()
}

fn divides(a: &BigInt, m: &BigInt) -> bool {
    !a.is_zero() && (m % a).is_zero()
}

/// Split c = μ/P as z·ε⁻¹ with z ∈ O_S and ε an S-unit: z = 1 when c is an
/// S-unit, otherwise the valuations of c at S are reduced into [0, step)
/// with the prime generators. None when no such split exists.
pub fn split_z(ctx: &SContext, c: &FieldElement) -> Result<Option<(FieldElement, FieldElement)>> {
    let k = ctx.k();
    if ctx.is_s_unit(c) {
        return Ok(Some((k.one(), k.inv(c)?)));
    }
    let mut eps = k.one();
    for sp in &ctx.primes {
        let v = valuation(k, c, &sp.ideal)?;
        let e = -(v.div_euclid(sp.step as i64));
        if e != 0 {
            eps = k.mul(&eps, &k.pow(&sp.generator, e)?);
        }
    }
    let z = k.mul(c, &eps);
    Ok(ctx.is_s_integer(&z).then_some((z, eps)))
}

/// Strategy (a): every nontrivial solution with x, y in the coordinate box
/// and ε₁, ε₂, ε₃ in the exponent box. The pair (z, ε) is fixed up to the
/// S³-transform z ↦ zη₂ by `split_z`.
pub fn solve_family_direct(ctx: &SContext, pd: &ProblemData, xy_box: i64, eps_box: i64, cap: u128) -> Result<Vec<FamilySolution>> {
    let k = ctx.k();
    let xs = coordinate_box(k, xy_box);
    let units = sunits_in_box(ctx, eps_box, cap)?;
    let work = (xs.len() as u128).pow(2).saturating_mul(units.len() as u128 * 3);
    if work > cap {
        return Err(Error::CapExceeded { required: work, cap });
    }
    let qq = qz(pd.q.clone());
    let q3 = &qq * &qq * &qq;
    let m = &pd.m;
    let pairs: Vec<(usize, usize)> = (0..xs.len())
        .flat_map(|i| (0..xs.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| !xs[i].is_zero() && !xs[j].is_zero())
        .collect();
    struct Cand {
        unit: usize,
        alpha_t: FieldElement,
        beta: FieldElement,
        beta_p: FieldElement,
        n: BigInt,
    }
    let found: Vec<Result<Vec<FamilySolution>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (&xs[i], &xs[j]);
            let mut out = Vec::new();
            // x − α_iε_iy with N_S(qβ) dividing m
            let mut cands: Vec<Vec<Cand>> = vec![Vec::new(), Vec::new(), Vec::new()];
            for (c, a) in cands.iter_mut().zip(&pd.alphas) {
                for (ui, u) in units.iter().enumerate() {
                    let at = k.mul(a, &u.value);
                    let b = k.sub(x, &k.mul(&at, y));
                    if b.is_zero() {
                        continue;
                    }
                    let bp = k.scale(&b, &qq);
                    let n = ctx.s_norm(&bp)?;
                    if n.is_integer() && divides(n.numer(), m) {
                        c.push(Cand { unit: ui, alpha_t: at, beta: b, beta_p: bp, n: n.to_integer() });
                    }
                }
            }
            for c1 in &cands[0] {
                for c2 in &cands[1] {
                    let n12 = &c1.n * &c2.n;
                    if c1.alpha_t == c2.alpha_t || !divides(&n12, m) {
                        continue;
                    }
                    let b12 = k.mul(&c1.beta, &c2.beta);
                    for c3 in &cands[2] {
                        if c3.alpha_t == c1.alpha_t || c3.alpha_t == c2.alpha_t || !divides(&(&n12 * &c3.n), m) {
                            continue;
                        }
                        let p = k.mul(&b12, &c3.beta);
                        let Some((z, e)) = split_z(ctx, &k.div(&pd.mu, &p)?)? else { continue };
                        let bp = [c1.beta_p.clone(), c2.beta_p.clone(), c3.beta_p.clone()];
                        let k_p = [c1.n.clone(), c2.n.clone(), c3.n.clone()];
                        if ctx.is_s_unit(&z) && &(&k_p[0] * &k_p[1] * &k_p[2]) != m {
                            return Err(Error::Inconsistent("k′₁k′₂k′₃ ≠ m".into()));
                        }
                        debug_assert_eq!(k.mul(&k.mul(&p, &z), &k.one()), k.mul(&pd.mu, &e));
                        debug_assert_eq!(k.mul(&k.mul(&k.mul(&bp[0], &bp[1]), &bp[2]), &z), k.scale(&k.mul(&pd.mu, &e), &q3));
                        out.push(FamilySolution {
                            x: x.clone(),
                            y: y.clone(),
                            z,
                            eps_i: [units[c1.unit].value.clone(), units[c2.unit].value.clone(), units[c3.unit].value.clone()],
                            eps: e,
                            alpha_t: [c1.alpha_t.clone(), c2.alpha_t.clone(), c3.alpha_t.clone()],
                            beta: [c1.beta.clone(), c2.beta.clone(), c3.beta.clone()],
                            beta_p: bp,
                            k_p,
                            trivial: false,
                        });
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut sols = Vec::new();
    for f in found {
        sols.extend(f?);
    }
    Ok(sols)
}

/// The data attached to a solution by the decomposition β′_i = γ_iw_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassKey {
    pub k_p: [BigInt; 3],
    pub gamma: [FieldElement; 3],
    pub u: [FieldElement; 3],
    pub v: [FieldElement; 3],
}

#[derive(Clone, Debug)]
pub struct CanonicalRep {
    pub x0: FieldElement,
    pub y0: FieldElement,
    pub eps0: FieldElement,
    pub u2: FieldElement,
    pub u3: FieldElement,
    pub key: ClassKey,
    pub w: [FieldElement; 3],
    /// η = ε₁ and η̃ = w₁
    pub eta: FieldElement,
    pub eta_t: FieldElement,
}

impl CanonicalRep {
    /// The representative as a 7-tuple (x₀, y₀, 1, 1, u₂, u₃, ε₀).
    pub fn tuple(&self, k: &NumberField) -> [FieldElement; 7] {
        [
            self.x0.clone(),
            self.y0.clone(),
            k.one(),
            k.one(),
            self.u2.clone(),
            self.u3.clone(),
            self.eps0.clone(),
        ]
    }
}

/// A₁(k′) for every divisor k′ of m.
pub struct A1Cache {
    sets: BTreeMap<BigInt, A1Set>,
}

impl A1Cache {
    pub fn new(ctx: &SContext, m: &BigInt, c3: &Ival, kappa5: &CertifiedUpper, cap: u128) -> Result<Self> {
        let mut sets = BTreeMap::new();
        for dv in divisors(m)? {
            let a = build_a1(ctx, &dv, c3, kappa5, cap)?;
            sets.insert(dv, a);
        }
        Ok(A1Cache { sets })
    }

    pub fn get(&self, m: &BigInt) -> Result<&A1Set> {
        self.sets.get(m).ok_or_else(|| Error::InvalidInput(format!("{m} does not divide m")))
    }
}

/// y₀, x₀ and ε₀ from γ₁, the α′_i and the ratios v_i = β_i/β₁.
fn rep_from(
    k: &NumberField,
    pd: &ProblemData,
    gamma1: &FieldElement,
    ap: &[FieldElement; 3],
    v: &[FieldElement; 3],
) -> Result<(FieldElement, FieldElement, FieldElement)> {
    let qq = qz(pd.q.clone());
    let y_of = |i: usize| -> Result<FieldElement> {
        let num = k.mul(gamma1, &k.sub(&v[0], &v[i]));
        let den = k.scale(&k.sub(&ap[i], &ap[0]), &qq);
        k.div(&num, &den)
    };
    let y0 = y_of(1)?;
    if y_of(2)? != y0 {
        return Err(Error::Inconsistent("the two expressions for y₀ disagree".into()));
    }
    let x0 = k.add(&k.scale(gamma1, &(Q::one() / &qq)), &k.mul(&ap[0], &y0));
    let g3 = k.pow(gamma1, 3)?;
    let eps0 = k.div(&k.mul(&g3, &k.mul(&v[1], &v[2])), &k.scale(&pd.mu, &(&qq * &qq * &qq)))?;
    Ok((x0, y0, eps0))
}

/// Canonical representative of the S³-class of a nontrivial solution.
pub fn canonicalize(ctx: &SContext, pd: &ProblemData, sol: &FamilySolution, a1: &A1Cache) -> Result<CanonicalRep> {
    if sol.trivial {
        return Err(Error::Precondition("canonical representatives exist for nontrivial solutions".into()));
    }
    let k = ctx.k();
    let mut gamma: [FieldElement; 3] = Default::default();
    let mut w: [FieldElement; 3] = Default::default();
    for i in 0..3 {
        let set = a1.get(&sol.k_p[i])?;
        let (wi, gi) = decompose(ctx, &sol.beta_p[i], set)?;
        gamma[i] = gi;
        w[i] = wi;
    }
    let u: [FieldElement; 3] = [k.one(), k.div(&sol.eps_i[1], &sol.eps_i[0])?, k.div(&sol.eps_i[2], &sol.eps_i[0])?];
    let ap: [FieldElement; 3] = std::array::from_fn(|i| k.mul(&pd.alphas[i], &u[i]));
    let v: [FieldElement; 3] = [k.one(), k.div(&sol.beta[1], &sol.beta[0])?, k.div(&sol.beta[2], &sol.beta[0])?];
    let (x0, y0, eps0) = rep_from(k, pd, &gamma[0], &ap, &v)?;
    let rep = CanonicalRep {
        x0,
        y0,
        eps0,
        u2: u[1].clone(),
        u3: u[2].clone(),
        key: ClassKey { k_p: sol.k_p.clone(), gamma, u, v },
        eta: sol.eps_i[0].clone(),
        eta_t: w[0].clone(),
        w,
    };
    let rs = verify_family_solution(ctx, pd, &rep.tuple(k))?;
    if s3_dependence_test(ctx, &rs, sol)?.is_none() {
        return Err(Error::Inconsistent("canonical representative is not S³-dependent on its source".into()));
    }
    Ok(rep)
}

/// Strategy (b): representatives (x₀, y₀, 1, 1, u₂, u₃, ε₀) assembled from
/// k′ ∈ A₂, γ₁ ∈ A₁(k′₁), u₂, u₃ in the exponent box and v ∈ A₄(u)².
pub fn solve_family_factored(
    ctx: &SContext,
    pd: &ProblemData,
    a1: &A1Cache,
    u_box: i64,
    v_box: i64,
    cap: u128,
) -> Result<Vec<FamilySolution>> {
    let k = ctx.k();
    let units = sunits_in_box(ctx, u_box, cap)?;
    let qq = qz(pd.q.clone());
    // (u, v) pairs for which both expressions of y₀/γ₁ agree
    let pairs: Vec<(usize, usize)> =
        (0..units.len()).flat_map(|i| (0..units.len()).map(move |j| (i, j))).collect();
    let shapes: Vec<Result<Vec<([FieldElement; 3], [FieldElement; 3])>>> = pairs
        .par_iter()
        .map(|&(i2, i3)| {
            let u = [k.one(), units[i2].value.clone(), units[i3].value.clone()];
            let ap: [FieldElement; 3] = std::array::from_fn(|i| k.mul(&pd.alphas[i], &u[i]));
            if ap[0] == ap[1] || ap[1] == ap[2] || ap[0] == ap[2] {
                return Ok(vec![]);
            }
            let a4 = build_a4(ctx, &ap, v_box, cap)?;
            let mut out = Vec::new();
            for v2 in &a4 {
                for v3 in &a4 {
                    let v = [k.one(), v2.value.clone(), v3.value.clone()];
                    // both y₀ expressions with γ₁ = q
                    let ya = k.div(&k.sub(&v[0], &v[1]), &k.sub(&ap[1], &ap[0]))?;
                    let yb = k.div(&k.sub(&v[0], &v[2]), &k.sub(&ap[2], &ap[0]))?;
                    if ya == yb {
                        out.push((u.clone(), v));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut uv = Vec::new();
    for s in shapes {
        uv.extend(s?);
    }
    let mut gammas: Vec<FieldElement> = Vec::new();
    for t in build_a2(&pd.m)? {
        let set = a1.get(&t[0])?;
        gammas.extend(set.gammas.iter().filter(|g| ctx.s_norm(g).map(|n| n == qz(t[0].clone())).unwrap_or(false)).cloned());
    }
    gammas.sort();
    gammas.dedup();
    let _ = &qq;
    let mut sols: Vec<FamilySolution> = Vec::new();
    for g in &gammas {
        for (u, v) in &uv {
            let ap: [FieldElement; 3] = std::array::from_fn(|i| k.mul(&pd.alphas[i], &u[i]));
            let (x0, y0, eps0) = rep_from(k, pd, g, &ap, v)?;
            if x0.is_zero() || y0.is_zero() || !ctx.is_s_integer(&x0) || !ctx.is_s_integer(&y0) || !ctx.is_s_unit(&eps0) {
                continue;
            }
            let s7 = [x0, y0, k.one(), k.one(), u[1].clone(), u[2].clone(), eps0];
            sols.push(verify_family_solution(ctx, pd, &s7)?);
        }
    }
    sols.sort_by_key(|a| a.tuple());
    sols.dedup_by(|a, b| a.tuple() == b.tuple());
    Ok(sols)
}

/// Union-find classes under S³-dependence; returns the class id of each
/// solution (ids in order of first appearance) and the class count. The
/// ratios ε_i/ε₁ and β_i/β₁ are S³-invariant, so only solutions sharing them
/// are compared.
pub fn partition_classes(ctx: &SContext, sols: &[FamilySolution]) -> Result<(Vec<usize>, usize)> {
    let k = ctx.k();
    let n = sols.len();
    let mut buckets: BTreeMap<Vec<FieldElement>, Vec<usize>> = BTreeMap::new();
    for (i, s) in sols.iter().enumerate() {
        if s.trivial {
            return Err(Error::Precondition("S³-dependence is defined on nontrivial solutions".into()));
        }
        let key = vec![
            k.div(&s.eps_i[1], &s.eps_i[0])?,
            k.div(&s.eps_i[2], &s.eps_i[0])?,
            k.div(&s.beta[1], &s.beta[0])?,
            k.div(&s.beta[2], &s.beta[0])?,
        ];
        buckets.entry(key).or_default().push(i);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    for members in buckets.values() {
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a == b {
                    continue;
                }
                if s3_dependence_test(ctx, &sols[i], &sols[j])?.is_some() {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut ids = BTreeMap::new();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let r = find(&mut parent, i);
        let next = ids.len();
        out.push(*ids.entry(r).or_insert(next));
    }
    Ok((out, ids.len()))
}

/// A solution (x, y, ε) of Π(X − α_iY) = μE with its dependence class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicSolution {
    pub x: FieldElement,
    pub y: FieldElement,
    pub eps: FieldElement,
    pub class: usize,
}

#[derive(Clone, Debug)]
pub struct ClassicResult {
    pub solutions: Vec<ClassicSolution>,
    pub classes: usize,
    pub warning: Option<String>,
}

/// Exhaustive search of Π(x − α_iy) = με over the coordinate box with
/// xy ≠ 0. With `coprime` (K = Q only) the pairs with gcd(xy, p₁⋯p_t) > 1
/// are dropped.
pub fn solve_classic(
    ctx: &SContext,
    alphas: &[FieldElement],
    mu: &FieldElement,
    b: i64,
    coprime: bool,
    cap: u128,
) -> Result<ClassicResult> {
    let k = ctx.k();
    if alphas.is_empty() {
        return Err(Error::InvalidInput("at least one α is required".into()));
    }
    if mu.is_zero() {
        return Err(Error::ZeroElement);
    }
    if coprime && k.d != 1 {
        return Err(Error::InvalidInput("the coprimality filter is defined over Q".into()));
    }
    let mut distinct = alphas.to_vec();
    distinct.sort();
    distinct.dedup();
    let warning = (distinct.len() < 3)
        .then(|| format!("Card{{α_i}} = {} < 3: finiteness is not claimed", distinct.len()));
    let xs = coordinate_box(k, b);
    let work = (xs.len() as u128).pow(2);
    if work > cap {
        return Err(Error::CapExceeded { required: work, cap });
    }
    let pk: BigInt = ctx.rational_primes.iter().map(|&p| BigInt::from(p)).product();
    let pairs: Vec<(usize, usize)> = (0..xs.len())
        .flat_map(|i| (0..xs.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| !xs[i].is_zero() && !xs[j].is_zero())
        .collect();
    let found: Vec<Result<Option<(FieldElement, FieldElement, FieldElement)>>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (&xs[i], &xs[j]);
            if coprime {
                let xy = k.mul(x, y).as_rational().unwrap().to_integer();
                if !num_integer::Integer::gcd(&xy, &pk).is_one() {
                    return Ok(None);
                }
            }
            let mut f = mu.clone();
            f = k.div(&k.one(), &f)?;
            for a in alphas {
                f = k.mul(&f, &k.sub(x, &k.mul(a, y)));
            }
            Ok((!f.is_zero() && ctx.is_s_unit(&f)).then(|| (x.clone(), y.clone(), f)))
        })
        .collect();
    let mut sols = Vec::new();
    for f in found {
        if let Some(t) = f? {
            sols.push(t);
        }
    }
    // S-dependent pairs share the point x/y of P¹
    let mut buckets: BTreeMap<FieldElement, Vec<usize>> = BTreeMap::new();
    for (i, (x, y, _)) in sols.iter().enumerate() {
        buckets.entry(k.div(x, y)?).or_default().push(i);
    }
    let mut class = vec![usize::MAX; sols.len()];
    let mut next = 0;
    for i in 0..sols.len() {
        if class[i] != usize::MAX {
            continue;
        }
        class[i] = next;
        let key = k.div(&sols[i].0, &sols[i].1)?;
        for &j in &buckets[&key] {
            if class[j] == usize::MAX && s_dependence_classic(ctx, (&sols[i].0, &sols[i].1), (&sols[j].0, &sols[j].1)) {
                class[j] = next;
            }
        }
        next += 1;
    }
    let solutions = sols
        .into_iter()
        .zip(class)
        .map(|((x, y, eps), class)| ClassicSolution { x, y, eps, class })
        .collect();
    Ok(ClassicResult { solutions, classes: next, warning })
}

/// Labels for the vanishing-subsum analysis of T.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseLabel {
    NoVanishingSubsum,
    RepeatedBeta,
    RepeatedAlphaTilde,
    AllDistinct,
    TwoPlusFour,
}

impl CaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::NoVanishingSubsum => "no-vanishing-subsum",
            CaseLabel::RepeatedBeta => "3+3-repeated-beta",
            CaseLabel::RepeatedAlphaTilde => "3+3-repeated-alpha-tilde",
            CaseLabel::AllDistinct => "3+3-all-distinct",
            CaseLabel::TwoPlusFour => "2+4-split",
        }
    }
}

/// One term ±β_bα̃_a of T (b, a are field-index 0, 1, 2).
#[derive(Clone, Debug)]
pub struct Term {
    pub sign: i8,
    pub b: usize,
    pub a: usize,
    pub value: FieldElement,
}

/// A unit-equation relation Σδ_kX_k = 1 verified exactly.
#[derive(Clone, Debug)]
pub struct Relation {
    pub deltas: Vec<FieldElement>,
    pub xs: Vec<FieldElement>,
}

#[derive(Clone, Debug)]
pub struct CaseCertificate {
    pub case: CaseLabel,
    /// (j₁, j₂, j₃) = (σ(1), σ(i), σ(j)) as field indices.
    pub perm: [usize; 3],
    pub sign: i8,
    pub terms: Vec<Term>,
    /// Index sets (into `terms`) of the declared vanishing subsums.
    pub vanishing: Vec<Vec<usize>>,
    pub relations: Vec<Relation>,
}

fn perm_sign(p: [usize; 3], base: [usize; 3]) -> i8 {
    let pos: Vec<usize> = p.iter().map(|x| base.iter().position(|b| b == x).unwrap()).collect();
    let mut inv = 0;
    for a in 0..3 {
        for b in (a + 1)..3 {
            if pos[a] > pos[b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn permutations(base: [usize; 3]) -> Vec<[usize; 3]> {
    let [a, b, c] = base;
    vec![[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

/// The pattern of T₁ for each case, as (β index, α̃ index) in terms of
/// positions (0, 1, 2) of (j₁, j₂, j₃).
fn templates(case: CaseLabel) -> Vec<Vec<(usize, usize)>> {
    match case {
        CaseLabel::RepeatedBeta => vec![vec![(0, 1), (0, 2), (2, 0)], vec![(0, 1), (0, 2), (2, 1)]],
        CaseLabel::RepeatedAlphaTilde => vec![vec![(0, 1), (1, 0), (2, 1)]],
        CaseLabel::AllDistinct => vec![vec![(0, 1), (1, 2), (2, 0)]],
        CaseLabel::TwoPlusFour => vec![vec![(0, 1), (1, 2)]],
        CaseLabel::NoVanishingSubsum => vec![vec![]],
    }
}

/// Exact analysis of the vanishing subsums of
/// T = β₁α̃_i − β₁α̃_j + β_iα̃_j − β_iα̃₁ + β_jα̃₁ − β_jα̃_i (i ∈ {2, 3}).
/// When the decomposition data (γ, w) is given, the unit-equation relations
/// of the case are verified as well.
pub fn classify_subsums(
    ctx: &SContext,
    pd: &ProblemData,
    sol: &FamilySolution,
    i: usize,
    gw: Option<(&[FieldElement; 3], &[FieldElement; 3])>,
) -> Result<CaseCertificate> {
    if sol.trivial {
        return Err(Error::Precondition("subsum analysis needs a nontrivial solution".into()));
    }
    if i != 2 && i != 3 {
        return Err(Error::InvalidInput("i must be 2 or 3".into()));
    }
    let k = ctx.k();
    let (ii, jj) = if i == 2 { (1, 2) } else { (2, 1) };
    let base = [0, ii, jj];
    let layout = [(1i8, 0, ii), (-1, 0, jj), (1, ii, jj), (-1, ii, 0), (1, jj, 0), (-1, jj, ii)];
    let terms: Vec<Term> = layout
        .iter()
        .map(|&(sign, b, a)| {
            let t = k.mul(&sol.beta[b], &sol.alpha_t[a]);
            Term { sign, b, a, value: if sign < 0 { k.neg(&t) } else { t } }
        })
        .collect();
    let sum_of = |mask: u32| -> FieldElement {
        let mut s = k.zero();
        for (n, t) in terms.iter().enumerate() {
            if mask & (1 << n) != 0 {
                s = k.add(&s, &t.value);
            }
        }
        s
    };
    if !sum_of(63).is_zero() {
        return Err(Error::Inconsistent("T ≠ 0".into()));
    }
    // two-term sums sharing a β index, an α̃ index, or transposed never vanish
    for a in 0..6 {
        for b in (a + 1)..6 {
            let (ta, tb) = (&terms[a], &terms[b]);
            let shaped = ta.b == tb.b || ta.a == tb.a || (ta.b == tb.a && ta.a == tb.b);
            if shaped && sum_of((1 << a) | (1 << b)).is_zero() {
                return Err(Error::Inconsistent("a structurally nonvanishing two-term subsum vanished".into()));
            }
        }
    }
    let zero_masks: Vec<u32> = (1..63u32).filter(|&m| sum_of(m).is_zero()).collect();
    let pairs: Vec<u32> = zero_masks.iter().copied().filter(|m| m.count_ones() == 2).collect();
    // no partition into three vanishing two-term subsums
    for a in &pairs {
        for b in &pairs {
            if a & b == 0 && pairs.contains(&(63 & !(a | b))) {
                return Err(Error::Inconsistent("T splits into three vanishing two-term subsums".into()));
            }
        }
    }
    let triples: Vec<u32> = zero_masks.iter().copied().filter(|m| m.count_ones() == 3).collect();
    let mask_set = |m: u32| -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = (0..6).filter(|n| m & (1 << n) != 0).map(|n| (terms[n].b, terms[n].a)).collect();
        v.sort();
        v
    };
    let to_idx = |m: u32| -> Vec<usize> { (0..6).filter(|n| m & (1 << n) != 0).collect() };
    let (case, t1) = if zero_masks.is_empty() {
        (CaseLabel::NoVanishingSubsum, 0u32)
    } else if let Some(&t1) = triples.first() {
        let idx = to_idx(t1);
        let bs: Vec<usize> = idx.iter().map(|&n| terms[n].b).collect();
        let as_: Vec<usize> = idx.iter().map(|&n| terms[n].a).collect();
        let distinct = |v: &[usize]| v[0] != v[1] && v[1] != v[2] && v[0] != v[2];
        let c = if !distinct(&bs) {
            CaseLabel::RepeatedBeta
        } else if !distinct(&as_) {
            CaseLabel::RepeatedAlphaTilde
        } else {
            CaseLabel::AllDistinct
        };
        (c, t1)
    } else if let Some(&p) = pairs.first() {
        let rest = 63 & !p;
        if zero_masks.iter().any(|&m| m & p == 0 && m != rest) {
            return Err(Error::Inconsistent("four-term part has a vanishing strict subsum".into()));
        }
        (CaseLabel::TwoPlusFour, p)
    } else {
        return Err(Error::Inconsistent("vanishing subsums of unexpected sizes".into()));
    };
    // locate σ: T₁ (or its complement for 3+3) matches the case pattern
    let mut found = None;
    if case == CaseLabel::NoVanishingSubsum {
        let p = [jj, 0, ii];
        found = Some((p, 0u32));
    } else {
        let candidates: Vec<u32> = if case == CaseLabel::TwoPlusFour {
            vec![t1]
        } else {
            triples.iter().copied().filter(|&m| {
                let idx = to_idx(m);
                let bs: Vec<usize> = idx.iter().map(|&n| terms[n].b).collect();
                let as_: Vec<usize> = idx.iter().map(|&n| terms[n].a).collect();
                let rep_b = bs[0] == bs[1] || bs[1] == bs[2] || bs[0] == bs[2];
                let rep_a = as_[0] == as_[1] || as_[1] == as_[2] || as_[0] == as_[2];
                match case {
                    CaseLabel::RepeatedBeta => rep_b,
                    CaseLabel::RepeatedAlphaTilde => !rep_b && rep_a,
                    _ => !rep_b && !rep_a,
                }
            }).collect()
        };
        'outer: for &m in &candidates {
            let have = mask_set(m);
            for p in permutations(base) {
                for tpl in templates(case) {
                    let mut want: Vec<(usize, usize)> = tpl.iter().map(|&(b, a)| (p[b], p[a])).collect();
                    want.sort();
                    if want == have {
                        found = Some((p, m));
                        break 'outer;
                    }
                }
            }
        }
    }
    let (perm, t1) = found.ok_or_else(|| Error::Inconsistent("no permutation matches the case pattern".into()))?;
    let sign = perm_sign(perm, base);
    let vanishing = if case == CaseLabel::NoVanishingSubsum { vec![] } else { vec![to_idx(t1), to_idx(63 & !t1)] };
    let relations = match gw {
        Some((g, w)) => case_relations(k, pd, sol, case, perm, g, w)?,
        None => vec![],
    };
    Ok(CaseCertificate { case, perm, sign, terms, vanishing, relations })
}

/// The unit-equation relations of each case, checked exactly.
fn case_relations(
    k: &NumberField,
    pd: &ProblemData,
    sol: &FamilySolution,
    case: CaseLabel,
    p: [usize; 3],
    g: &[FieldElement; 3],
    w: &[FieldElement; 3],
) -> Result<Vec<Relation>> {
    let al = &pd.alphas;
    let e = &sol.eps_i;
    let q = |a: &FieldElement, b: &FieldElement| k.div(a, b);
    let mul = |a: &FieldElement, b: &FieldElement| k.mul(a, b);
    let neg = |a: FieldElement| k.neg(&a);
    let [j1, j2, j3] = p;
    let mut rels: Vec<Relation> = match case {
        CaseLabel::NoVanishingSubsum => {
            // (j₁, j₂, j₃) = (j, 1, i)
            let (j, one, i) = (j1, j2, j3);
            let d = vec![
                q(&al[i], &al[one])?,
                neg(q(&mul(&g[one], &al[i]), &mul(&g[j], &al[one]))?),
                q(&mul(&g[one], &al[j]), &mul(&g[j], &al[one]))?,
                neg(q(&mul(&g[i], &al[j]), &mul(&g[j], &al[one]))?),
                q(&g[i], &g[j])?,
            ];
            let x = vec![
                q(&e[i], &e[one])?,
                mul(&q(&w[one], &w[j])?, &q(&e[i], &e[one])?),
                mul(&q(&w[one], &w[j])?, &q(&e[j], &e[one])?),
                mul(&q(&w[i], &w[j])?, &q(&e[j], &e[one])?),
                q(&w[i], &w[j])?,
            ];
            vec![Relation { deltas: d, xs: x }]
        }
        CaseLabel::RepeatedBeta => {
            let first = first_variant_vanishes(k, sol, p);
            if first {
                vec![
                    Relation {
                        deltas: vec![q(&al[j2], &al[j3])?, q(&mul(&g[j3], &al[j1]), &mul(&g[j1], &al[j3]))?],
                        xs: vec![q(&e[j2], &e[j3])?, mul(&q(&w[j3], &w[j1])?, &q(&e[j1], &e[j3])?)],
                    },
                    Relation {
                        deltas: vec![q(&al[j1], &al[j3])?, q(&mul(&g[j3], &al[j2]), &mul(&g[j2], &al[j3]))?],
                        xs: vec![q(&e[j1], &e[j3])?, mul(&q(&w[j3], &w[j2])?, &q(&e[j2], &e[j3])?)],
                    },
                ]
            } else {
                vec![
                    Relation {
                        deltas: vec![q(&al[j3], &al[j2])?, q(&g[j3], &g[j1])?],
                        xs: vec![q(&e[j3], &e[j2])?, q(&w[j3], &w[j1])?],
                    },
                    Relation {
                        deltas: vec![q(&al[j3], &al[j1])?, q(&g[j3], &g[j2])?],
                        xs: vec![q(&e[j3], &e[j1])?, q(&w[j3], &w[j2])?],
                    },
                ]
            }
        }
        CaseLabel::RepeatedAlphaTilde => vec![
            Relation {
                deltas: vec![q(&g[j3], &g[j1])?, q(&mul(&g[j2], &al[j1]), &mul(&g[j1], &al[j2]))?],
                xs: vec![q(&w[j3], &w[j1])?, mul(&q(&w[j2], &w[j1])?, &q(&e[j1], &e[j2])?)],
            },
            Relation {
                deltas: vec![q(&g[j2], &g[j1])?, q(&mul(&g[j3], &al[j1]), &mul(&g[j1], &al[j3]))?],
                xs: vec![q(&w[j2], &w[j1])?, mul(&q(&w[j3], &w[j1])?, &q(&e[j1], &e[j3])?)],
            },
        ],
        CaseLabel::AllDistinct => vec![
            Relation {
                deltas: vec![
                    neg(q(&mul(&g[j3], &al[j1]), &mul(&g[j1], &al[j2]))?),
                    neg(q(&mul(&g[j2], &al[j3]), &mul(&g[j1], &al[j2]))?),
                ],
                xs: vec![
                    mul(&q(&w[j3], &w[j1])?, &q(&e[j1], &e[j2])?),
                    mul(&q(&w[j2], &w[j1])?, &q(&e[j3], &e[j2])?),
                ],
            },
            Relation {
                deltas: vec![
                    neg(q(&mul(&g[j2], &al[j1]), &mul(&g[j1], &al[j3]))?),
                    neg(q(&mul(&g[j3], &al[j2]), &mul(&g[j1], &al[j3]))?),
                ],
                xs: vec![
                    mul(&q(&w[j2], &w[j1])?, &q(&e[j1], &e[j3])?),
                    mul(&q(&w[j3], &w[j1])?, &q(&e[j2], &e[j3])?),
                ],
            },
        ],
        CaseLabel::TwoPlusFour => {
            // w_{j1}ε_{j2}/(w_{j2}ε_{j3}) = −γ_{j2}α_{j3}/(γ_{j1}α_{j2})
            let lhs = q(&mul(&w[j1], &e[j2]), &mul(&w[j2], &e[j3]))?;
            let rhs = neg(q(&mul(&g[j2], &al[j3]), &mul(&g[j1], &al[j2]))?);
            if lhs != rhs {
                return Err(Error::Inconsistent("two-term relation fails".into()));
            }
            vec![Relation {
                deltas: vec![
                    q(&al[j2], &al[j1])?,
                    q(&mul(&g[j1], &al[j3]), &mul(&g[j3], &al[j1]))?,
                    q(&g[j2], &g[j3])?,
                ],
                xs: vec![
                    q(&e[j2], &e[j1])?,
                    q(&mul(&w[j1], &e[j3]), &mul(&w[j3], &e[j1]))?,
                    q(&w[j2], &w[j3])?,
                ],
            }]
        }
    };
    for r in &mut rels {
        let mut s = k.zero();
        for (d, x) in r.deltas.iter().zip(&r.xs) {
            s = k.add(&s, &k.mul(d, x));
        }
        if s != k.one() {
            return Err(Error::Inconsistent(format!("case relation sums to {s}, not 1")));
        }
    }
    Ok(rels)
}

/// Whether the repeated-β split has T₁ = β_{j1}α̃_{j2} − β_{j1}α̃_{j3} + β_{j3}α̃_{j1}
/// rather than the variant ending in −β_{j3}α̃_{j2}.
fn first_variant_vanishes(k: &NumberField, sol: &FamilySolution, p: [usize; 3]) -> bool {
    let [j1, j2, j3] = p;
    let t = |b: usize, a: usize| k.mul(&sol.beta[b], &sol.alpha_t[a]);
    k.add(&k.sub(&t(j1, j2), &t(j1, j3)), &t(j3, j1)).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{c3, kappa5, problem_data, C3Variant, PiExponent, PREC};
    use crate::rational::qr;
    use crate::s_arith::PrimeSelector;
    use std::sync::Arc;

    fn setup() -> (SContext, ProblemData) {
        let k = Arc::new(NumberField::from_poly(&[0, 1]).unwrap());
        let ctx = SContext::new(k.clone(), &PrimeSelector::all(&[2, 3]), 128).unwrap();
        let one = k.one();
        let pd = problem_data(&ctx, &one, &[one.clone(), one.clone(), one.clone()]).unwrap();
        (ctx, pd)
    }

    fn tuple(k: &NumberField, v: [Q; 7]) -> [FieldElement; 7] {
        v.map(|x| k.from_q(&x))
    }

    fn ints(k: &NumberField, v: [i64; 7]) -> [FieldElement; 7] {
        tuple(k, v.map(|x| qr(x, 1)))
    }

    fn a1cache(ctx: &SContext, m: &BigInt) -> A1Cache {
        let c = c3(ctx.unit_data.fundamental_units.len(), ctx.k().d, &Ival::point(&qr(1, 10), PREC), C3Variant::Paper);
        let k5 = kappa5(ctx, &c, PiExponent::R2);
        A1Cache::new(ctx, m, &c, &k5, 1 << 24).unwrap()
    }

    #[test]
    fn verification() {
        let (ctx, pd) = setup();
        let k = ctx.k();
        let s = verify_family_solution(&ctx, &pd, &ints(k, [3, 1, 1, 1, 2, 4, -2])).unwrap();
        assert!(!s.trivial);
        assert_eq!(s.beta, [k.from_int(2), k.from_int(1), k.from_int(-1)]);
        assert!(verify_family_solution(&ctx, &pd, &ints(k, [1, 0, 1, 1, 2, 4, 1])).unwrap().trivial);
        assert!(verify_family_solution(&ctx, &pd, &ints(k, [3, 1, 1, 1, 2, 4, 2])).is_err());
        assert!(verify_family_solution(&ctx, &pd, &ints(k, [3, 1, 1, 5, 2, 4, -2])).is_err());
        assert!(matches!(
            verify_family_solution(&ctx, &pd, &ints(k, [3, 1, 1, 1, 1, 4, 4])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn dependence() {
        let (ctx, pd) = setup();
        let k = ctx.k();
        let v = |t| verify_family_solution(&ctx, &pd, &t).unwrap();
        let a = v(ints(k, [3, 1, 1, 1, 2, 4, -2]));
        let b = v(ints(k, [6, 2, 1, 1, 2, 4, -16]));
        let c = v(tuple(k, [qr(3, 1), qr(1, 2), qr(1, 1), qr(2, 1), qr(4, 1), qr(8, 1), qr(-2, 1)]));
        let d = v(ints(k, [5, 1, 1, 1, 2, 4, 12]));
        let eta = |x: [i64; 3]| x.map(|n| k.from_int(n));
        assert_eq!(s3_dependence_test(&ctx, &a, &b).unwrap(), Some(eta([2, 1, 1])));
        assert_eq!(s3_dependence_test(&ctx, &a, &c).unwrap(), Some(eta([1, 1, 2])));
        assert_eq!(s3_dependence_test(&ctx, &a, &d).unwrap(), None);
        let (ids, n) = partition_classes(&ctx, &[a, b, c, d]).unwrap();
        assert_eq!((ids, n), (vec![0, 0, 0, 1], 2));
        let (two, four) = (k.from_int(2), k.from_int(4));
        let (three, six) = (k.from_int(3), k.from_int(6));
        assert!(s_dependence_classic(&ctx, (&two, &four), (&three, &six)));
        let ctx5 = SContext::new(ctx.field.clone(), &PrimeSelector::all(&[5]), 128).unwrap();
        assert!(!s_dependence_classic(&ctx5, (&two, &four), (&three, &six)));
    }

    #[test]
    fn subsum_cases() {
        let (ctx, pd) = setup();
        let k = ctx.k();
        let a1 = a1cache(&ctx, &pd.m);
        let a = verify_family_solution(&ctx, &pd, &ints(k, [3, 1, 1, 1, 2, 4, -2])).unwrap();
        let rep = canonicalize(&ctx, &pd, &a, &a1).unwrap();
        let cert = classify_subsums(&ctx, &pd, &a, 2, Some((&rep.key.gamma, &rep.w))).unwrap();
        let vals: Vec<FieldElement> = cert.terms.iter().map(|t| t.value.clone()).collect();
        assert_eq!(vals, [4, -8, 4, -1, -1, 2].map(|n| k.from_int(n)));
        assert_eq!(cert.case, CaseLabel::RepeatedBeta);
        assert_eq!(cert.relations.len(), 2);
        let d = verify_family_solution(&ctx, &pd, &ints(k, [5, 1, 1, 1, 2, 4, 12])).unwrap();
        let rep = canonicalize(&ctx, &pd, &d, &a1).unwrap();
        for i in [2, 3] {
            let cert = classify_subsums(&ctx, &pd, &d, i, Some((&rep.key.gamma, &rep.w))).unwrap();
            assert_eq!(cert.case, CaseLabel::NoVanishingSubsum);
            assert_eq!(cert.relations[0].deltas.len(), 5);
        }
    }

    #[test]
    fn canonical_rep() {
        let (ctx, pd) = setup();
        let k = ctx.k();
        let a1 = a1cache(&ctx, &pd.m);
        let a = verify_family_solution(&ctx, &pd, &ints(k, [3, 1, 1, 1, 2, 4, -2])).unwrap();
        let b = verify_family_solution(&ctx, &pd, &ints(k, [6, 2, 1, 1, 2, 4, -16])).unwrap();
        let ra = canonicalize(&ctx, &pd, &a, &a1).unwrap();
        let rb = canonicalize(&ctx, &pd, &b, &a1).unwrap();
        assert_eq!(ra.tuple(k), rb.tuple(k));
        assert_eq!(ra.key.v, [k.from_int(1), k.from_q(&qr(1, 2)), k.from_q(&qr(-1, 2))]);
        // y₀ = γ₁(1 − v₂)/(q(α′₂ − α′₁)) and ε₀ = γ₁³v₂v₃/(q³μ)
        let g = ra.key.gamma[0].as_rational().unwrap();
        assert_eq!(ra.y0, k.from_q(&(&g / qr(2, 1))));
        assert_eq!(ra.eps0, k.from_q(&(&g * &g * &g * qr(-1, 4))));
    }

    #[test]
    fn classic() {
        let (ctx, _) = setup();
        let k = ctx.k();
        let al = [1, 2, 4].map(|n| k.from_int(n));
        let r = solve_classic(&ctx, &al, &k.one(), 6, false, 1 << 20).unwrap();
        assert!(r.warning.is_none());
        let find = |x: i64, y: i64| r.solutions.iter().find(|s| s.x == k.from_int(x) && s.y == k.from_int(y));
        assert_eq!(find(3, 1).unwrap().eps, k.from_int(-2));
        assert!(r.solutions.iter().all(|s| !s.x.is_zero() && !s.y.is_zero()));
        assert_eq!(find(3, 1).unwrap().class, find(6, 2).unwrap().class);
        let ctx2 = SContext::new(ctx.field.clone(), &PrimeSelector::all(&[2]), 128).unwrap();
        let c = solve_classic(&ctx2, &al, &k.one(), 6, true, 1 << 20).unwrap();
        assert!(c.solutions.iter().all(|s| s.x != k.from_int(2) && s.y != k.from_int(2)));
        assert!(c.solutions.iter().any(|s| s.x == k.from_int(3) && s.y == k.from_int(1)));
        let w = solve_classic(&ctx, &al[..2], &k.one(), 2, false, 1 << 20).unwrap();
        assert!(w.warning.is_some());
    }

    #[test]
    fn strategies_agree() {
        let (ctx, pd) = setup();
        let k = ctx.k();
        let direct = solve_family_direct(&ctx, &pd, 6, 3, 1 << 30).unwrap();
        let has = |t: [i64; 7]| direct.iter().any(|s| s.tuple() == ints(k, t));
        assert!(has([3, 1, 1, 1, 2, 4, -2]));
        assert!(has([5, 1, 1, 1, 2, 4, 12]));
        assert!(direct.iter().all(|s| !s.trivial));
        assert!(solve_family_direct(&ctx, &pd, 0, 3, 1 << 30).unwrap().is_empty());
        let t0 = std::time::Instant::now();
        let a1 = a1cache(&ctx, &pd.m);
        let factored = solve_family_factored(&ctx, &pd, &a1, 3, 3, 1 << 30).unwrap();
        eprintln!("factored {} in {:?}", factored.len(), t0.elapsed());
        let reps: std::collections::HashSet<[FieldElement; 7]> = factored.iter().map(|f| f.tuple()).collect();
        let units = sunits_in_box(&ctx, 3, 1 << 30).unwrap();
        let in_box = |e: &FieldElement| units.iter().any(|u| &u.value == e);
        let mut checked = 0;
        for s in direct.iter().step_by(499) {
            let rep = canonicalize(&ctx, &pd, s, &a1).unwrap();
            if !(in_box(&rep.u2) && in_box(&rep.u3) && rep.key.v.iter().all(&in_box)) {
                continue;
            }
            checked += 1;
            assert!(reps.contains(&rep.tuple(k)), "missing rep for {:?}", s.tuple());
        }
        assert!(checked > 0);
    }
}
