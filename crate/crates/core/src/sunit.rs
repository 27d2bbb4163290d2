//! Exhaustive box search for the unit equation δ₁x₁ + ⋯ + δ_ℓx_ℓ = 1 and the
//! finite sets A₃, Ã₃ and A₄ built from it.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::constants::{evertse_bound, CertifiedUpper, UnitBoundVariant};
use crate::error::{Error, Result};
use crate::number_field::FieldElement;
use crate::s_arith::{SContext, SUnitExponents};

/// An S-unit together with its exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SUnit {
    pub exps: SUnitExponents,
    pub value: FieldElement,
}

impl PartialOrd for SUnit {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SUnit {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.exps.cmp(&other.exps)
    }
}

/// All integer vectors of length n with entries in [−b, b], lexicographically.
pub fn exponent_box(n: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-b..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Every ζ^{a₀}Πu_i^{a_i}Πg_j^{b_j} with |a_i|, |b_j| ≤ b, in exponent order.
pub fn sunits_in_box(ctx: &SContext, b: i64, cap: u128) -> Result<Vec<SUnit>> {
    let s = ctx.s;
    let side = (2 * b + 1) as u128;
    let total = (ctx.w() as u128).saturating_mul(side.saturating_pow(s as u32));
    if total > cap {
        return Err(Error::CapExceeded { required: total, cap });
    }
    let vecs = exponent_box(s, b);
    let w = ctx.w();
    let r = ctx.r;
    let mut items: Vec<(u32, Vec<i64>)> = Vec::with_capacity(total as usize);
    for a0 in 0..w {
        for f in &vecs {
            items.push((a0, f.clone()));
        }
    }
    let mut out: Vec<SUnit> = items
        .par_iter()
        .map(|(a0, f)| {
            let exps = SUnitExponents { torsion: *a0, units: f[..r].to_vec(), primes: f[r..].to_vec() };
            let value = ctx.build(&exps)?;
            Ok(SUnit { exps, value })
        })
        .collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct UnitSolution {
    pub xs: Vec<SUnit>,
}

#[derive(Clone, Debug)]
pub struct SolutionSetReport {
    pub solutions: Vec<UnitSolution>,
    pub degenerate: usize,
    pub bound: CertifiedUpper,
    pub searched: u128,
}

/// Whether some strict nonempty subsum of the δ_i x_i vanishes.
pub fn has_vanishing_subsum(ctx: &SContext, terms: &[FieldElement]) -> bool {
    let k = ctx.k();
    let l = terms.len();
    (1..(1u32 << l) - 1).any(|mask| {
        let mut s = k.zero();
        for (i, t) in terms.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = k.add(&s, t);
            }
        }
        s.is_zero()
    })
}

/// All solutions with x₁…x_{ℓ−1} in the exponent box and no vanishing
/// strict subsum; x_ℓ is solved for and kept when it is an S-unit.
pub fn solve_unit_equation(ctx: &SContext, deltas: &[FieldElement], b: i64, cap: u128) -> Result<SolutionSetReport> {
    let l = deltas.len();
    if l < 2 {
        return Err(Error::InvalidInput("the unit equation needs at least two terms".into()));
    }
    if deltas.iter().any(|d| d.is_zero()) {
        return Err(Error::ZeroElement);
    }
    if b < 0 {
        return Err(Error::InvalidInput("box must be nonnegative".into()));
    }
    let k = ctx.k();
    let units = sunits_in_box(ctx, b, cap)?;
    let n = units.len() as u128;
    let searched = n.checked_pow(l as u32 - 1).unwrap_or(u128::MAX);
    if searched > cap {
        return Err(Error::CapExceeded { required: searched, cap });
    }
    let last_inv = k.inv(&deltas[l - 1])?;
    let firsts: Vec<usize> = (0..units.len()).collect();
    let chunks: Vec<Result<(Vec<UnitSolution>, usize)>> = firsts
        .par_iter()
        .map(|&i0| {
            let mut sols = Vec::new();
            let mut degenerate = 0;
            let mut idx = vec![0usize; l - 1];
            idx[0] = i0;
            loop {
                let mut rest = k.one();
                for (j, &i) in idx.iter().enumerate() {
                    rest = k.sub(&rest, &k.mul(&deltas[j], &units[i].value));
                }
                if !rest.is_zero() {
                    let xl = k.mul(&rest, &last_inv);
                    if ctx.is_s_unit(&xl) {
                        match ctx.exponents(&xl) {
                            Ok(e) => {
                                let mut xs: Vec<SUnit> = idx.iter().map(|&i| units[i].clone()).collect();
                                xs.push(SUnit { exps: e, value: xl });
                                let terms: Vec<FieldElement> =
                                    xs.iter().zip(deltas).map(|(x, d)| k.mul(&x.value, d)).collect();
                                if has_vanishing_subsum(ctx, &terms) {
                                    degenerate += 1;
                                } else {
                                    sols.push(UnitSolution { xs });
                                }
                            }
                            Err(Error::NotSUnit(_)) => {}
                            Err(e) => return Err(e),
                        }
                    }
                }
                let mut j = l - 1;
                loop {
                    if j == 1 || l == 2 {
                        return Ok((sols, degenerate));
                    }
                    j -= 1;
                    if idx[j] + 1 < units.len() {
                        idx[j] += 1;
                        break;
                    }
                    idx[j] = 0;
                }
            }
        })
        .collect();
    let mut solutions = Vec::new();
    let mut degenerate = 0;
    for c in chunks {
        let (s, d) = c?;
        solutions.extend(s);
        degenerate += d;
    }
    solutions.sort_by(|a, b| a.xs.cmp(&b.xs));
    let bound = evertse_bound(l as u32, ctx.s as u32, UnitBoundVariant::Evertse)?;
    if !bound.admits(&BigInt::from(solutions.len())) {
        return Err(Error::Inconsistent("more solutions than the unit-equation bound".into()));
    }
    for s in &solutions {
        let mut sum = k.zero();
        for (x, d) in s.xs.iter().zip(deltas) {
            sum = k.add(&sum, &k.mul(&x.value, d));
        }
        if sum != k.one() {
            return Err(Error::Inconsistent("reported solution does not satisfy the equation".into()));
        }
    }
    Ok(SolutionSetReport { solutions, degenerate, bound, searched })
}

fn one_unit(ctx: &SContext) -> SUnit {
    SUnit {
        exps: SUnitExponents { torsion: 0, units: vec![0; ctx.r], primes: vec![0; ctx.t] },
        value: ctx.k().one(),
    }
}

fn sorted_unique(mut v: Vec<SUnit>) -> Vec<SUnit> {
    v.sort();
    v.dedup();
    v
}

/// A₃^{(ℓ)}(δ) = {1} ∪ {x₁ : nondegenerate solutions in the box}.
pub fn build_a3(ctx: &SContext, deltas: &[FieldElement], b: i64, cap: u128) -> Result<Vec<SUnit>> {
    let rep = solve_unit_equation(ctx, deltas, b, cap)?;
    let mut out = vec![one_unit(ctx)];
    out.extend(rep.solutions.into_iter().map(|s| s.xs[0].clone()));
    Ok(sorted_unique(out))
}

pub fn invert(ctx: &SContext, x: &SUnit) -> Result<SUnit> {
    let k = ctx.k();
    let w = ctx.w();
    let exps = SUnitExponents {
        torsion: (w - x.exps.torsion % w) % w,
        units: x.exps.units.iter().map(|a| -a).collect(),
        primes: x.exps.primes.iter().map(|a| -a).collect(),
    };
    Ok(SUnit { exps, value: k.inv(&x.value)? })
}

/// Elements x with x or x⁻¹ in A₃^{(ℓ)}(δ^σ) for σ the identity or a
/// transposition (1 i).
pub fn build_a3_tilde(ctx: &SContext, deltas: &[FieldElement], b: i64, cap: u128) -> Result<Vec<SUnit>> {
    let l = deltas.len();
    if l < 2 {
        return Err(Error::InvalidInput("the unit equation needs at least two terms".into()));
    }
    let mut all = Vec::new();
    for i in 0..l {
        let mut d = deltas.to_vec();
        d.swap(0, i);
        all.extend(build_a3(ctx, &d, b, cap)?);
    }
    let all = sorted_unique(all);
    let mut out = all.clone();
    for x in &all {
        out.push(invert(ctx, x)?);
    }
    Ok(sorted_unique(out))
}

/// A₄: 1 and the quotients t₂/t₁, t₃/t₁ over box solutions of
/// t₁(α′₂ − α′₃) + t₂(α′₃ − α′₁) + t₃(α′₁ − α′₂) = 0.
pub fn build_a4(ctx: &SContext, ap: &[FieldElement; 3], b: i64, cap: u128) -> Result<Vec<SUnit>> {
    let k = ctx.k();
    if ap[0] == ap[1] || ap[1] == ap[2] || ap[0] == ap[2] {
        return Err(Error::Precondition("α′₁, α′₂, α′₃ must be pairwise distinct".into()));
    }
    let den = k.sub(&ap[2], &ap[1]);
    let d1 = k.div(&k.sub(&ap[2], &ap[0]), &den)?;
    let d2 = k.div(&k.sub(&ap[0], &ap[1]), &den)?;
    let rep = solve_unit_equation(ctx, &[d1, d2], b, cap)?;
    let mut out = vec![one_unit(ctx)];
    for s in rep.solutions {
        out.extend(s.xs);
    }
    Ok(sorted_unique(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_field::NumberField;
    use crate::rational::qr;
    use crate::s_arith::PrimeSelector;
    use std::sync::Arc;

    fn ctx(poly: &[i64], primes: &[u64]) -> SContext {
        let k = Arc::new(NumberField::from_poly(poly).unwrap());
        SContext::new(k, &PrimeSelector::all(primes), 128).unwrap()
    }

    #[test]
    fn two_three_units() {
        let c = ctx(&[0, 1], &[2, 3]);
        let k = c.k();
        let one = k.one();
        let rep = solve_unit_equation(&c, &[one.clone(), one.clone()], 10, 1 << 30).unwrap();
        assert_eq!(rep.solutions.len(), 21);
        let pairs: Vec<(String, String)> = rep
            .solutions
            .iter()
            .map(|s| (s.xs[0].value.to_string(), s.xs[1].value.to_string()))
            .collect();
        for p in [("2", "-1"), ("1/2", "1/2"), ("9", "-8"), ("-8", "9")] {
            assert!(pairs.contains(&(p.0.to_string(), p.1.to_string())), "{p:?}");
        }
        let a3 = build_a3(&c, &[one.clone(), one.clone()], 10, 1 << 30).unwrap();
        let vals: Vec<String> = a3.iter().map(|x| x.value.to_string()).collect();
        for v in ["1", "2", "9", "1/2", "-8"] {
            assert!(vals.contains(&v.to_string()));
        }
        let at = build_a3_tilde(&c, &[one.clone(), one.clone()], 10, 1 << 30).unwrap();
        assert!(at.iter().any(|x| x.value == k.from_q(&qr(1, 9))));
        assert!(at.iter().any(|x| x.value == one));
    }

    #[test]
    fn trivial_group_has_no_solutions() {
        let c = ctx(&[0, 1], &[]);
        let one = c.k().one();
        assert!(solve_unit_equation(&c, &[one.clone(), one.clone()], 3, 1 << 20).unwrap().solutions.is_empty());
        assert_eq!(build_a3(&c, &[one.clone(), one.clone()], 3, 1 << 20).unwrap().len(), 1);
        assert!(build_a3(&c, &[one], 3, 1 << 20).is_err());
    }

    #[test]
    fn degenerate_tuples_are_excluded() {
        let c = ctx(&[0, 1], &[2]);
        let k = c.k();
        let one = k.one();
        let rep = solve_unit_equation(&c, &[one.clone(), one.clone(), one.clone()], 2, 1 << 20).unwrap();
        assert!(rep.degenerate > 0);
        for s in &rep.solutions {
            assert!(!has_vanishing_subsum(&c, &s.xs.iter().map(|x| x.value.clone()).collect::<Vec<_>>()));
        }
        assert!(has_vanishing_subsum(&c, &[one.clone(), k.from_int(2), k.from_int(-2)]));
    }

    #[test]
    fn a4_contains_quotients() {
        let c = ctx(&[0, 1], &[2, 3]);
        let k = c.k();
        let a4 = build_a4(&c, &[k.from_int(1), k.from_int(2), k.from_int(4)], 4, 1 << 24).unwrap();
        for v in [1, 2, 4] {
            assert!(a4.iter().any(|x| x.value == k.from_int(v)));
        }
        assert!(build_a4(&c, &[k.one(), k.one(), k.from_int(2)], 4, 1 << 24).is_err());
    }
}
