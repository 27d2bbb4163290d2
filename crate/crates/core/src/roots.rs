//! Certified isolation of the complex roots of a squarefree rational
//! polynomial.
//!
//! Floating-point Durand–Kerner gives starting points, Newton steps in
//! exact dyadic arithmetic refine them, and each root is certified by the
//! inclusion disk of radius `n |f(z)| / |f'(z)|`. Pairwise disjoint disks
//! prove that each one holds exactly one root.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::{CIval, Ival};
use crate::poly::{sturm_count_all, Poly};
use crate::rational::{floor_int, qi, Q};

/// Isolated roots: `r1` real roots in ascending order, then `r2` roots with
/// positive imaginary part, then their conjugates in the same order.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub r1: usize,
    pub r2: usize,
    pub roots: Vec<CIval>,
}

#[derive(Clone, Copy, Debug)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn mul(self, o: C64) -> C64 {
        C64 { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
    fn sub(self, o: C64) -> C64 {
        C64 { re: self.re - o.re, im: self.im - o.im }
    }
    fn div(self, o: C64) -> C64 {
        let n = o.re * o.re + o.im * o.im;
        C64 { re: (self.re * o.re + self.im * o.im) / n, im: (self.im * o.re - self.re * o.im) / n }
    }
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

fn approx_roots(f: &Poly) -> Vec<C64> {
    let n = f.deg();
    let lc = f.lead().to_f64().unwrap();
    let c: Vec<f64> = f.coeffs().iter().map(|x| x.to_f64().unwrap() / lc).collect();
    let bound = 1.0 + c[..n].iter().fold(0f64, |m, x| m.max(x.abs()));
    let eval = |z: C64| {
        c.iter().rev().fold(C64 { re: 0.0, im: 0.0 }, |acc, &a| {
            let m = acc.mul(z);
            C64 { re: m.re + a, im: m.im }
        })
    };
    let seed = C64 { re: 0.4, im: 0.9 };
    let mut z: Vec<C64> = Vec::with_capacity(n);
    let mut w = C64 { re: 1.0, im: 0.0 };
    for _ in 0..n {
        w = w.mul(seed);
        z.push(C64 { re: w.re * bound * 0.5, im: w.im * bound * 0.5 });
    }
    for _ in 0..2000 {
        let mut moved = 0f64;
        for i in 0..n {
            let mut den = C64 { re: 1.0, im: 0.0 };
            for j in 0..n {
                if i != j {
                    den = den.mul(z[i].sub(z[j]));
                }
            }
            if den.abs() == 0.0 {
                den = C64 { re: 1e-12, im: 1e-12 };
            }
            let step = eval(z[i]).div(den);
            z[i] = z[i].sub(step);
            moved = moved.max(step.abs());
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    z
}

/// Exact complex rational.
#[derive(Clone, Debug)]
struct CQ {
    re: Q,
    im: Q,
}

fn horner(f: &Poly, z: &CQ) -> CQ {
    let mut acc = CQ { re: Q::zero(), im: Q::zero() };
    for a in f.coeffs().iter().rev() {
        let re = &acc.re * &z.re - &acc.im * &z.im + a;
        let im = &acc.re * &z.im + &acc.im * &z.re;
        acc = CQ { re, im };
    }
    acc
}

fn round_dyadic(x: &Q, bits: u32) -> Q {
    let s = BigInt::one() << bits;
    Q::new(floor_int(&(x * Q::from_integer(s.clone()) + Q::new(BigInt::one(), BigInt::from(2)))), s)
}

fn from_f64(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

/// Squared inclusion radius `n^2 |f(z)|^2 / |f'(z)|^2`, or `None` if f'(z) = 0.
fn radius_sq(f: &Poly, df: &Poly, z: &CQ) -> Option<Q> {
    let a = horner(f, z);
    let b = horner(df, z);
    let nb = &b.re * &b.re + &b.im * &b.im;
    if nb.is_zero() {
        return None;
    }
    let n = qi(f.deg() as i64);
    Some(&n * &n * (&a.re * &a.re + &a.im * &a.im) / nb)
}

fn newton(f: &Poly, df: &Poly, z: &CQ, bits: u32, real: bool) -> Option<CQ> {
    let a = horner(f, z);
    let b = horner(df, z);
    let nb = &b.re * &b.re + &b.im * &b.im;
    if nb.is_zero() {
        return None;
    }
    let qre = (&a.re * &b.re + &a.im * &b.im) / &nb;
    let qim = (&a.im * &b.re - &a.re * &b.im) / &nb;
    Some(CQ {
        re: round_dyadic(&(&z.re - qre), bits),
        im: if real { Q::zero() } else { round_dyadic(&(&z.im - qim), bits) },
    })
}

/// Upper bound on the square root of a nonnegative rational.
fn sqrt_up(x: &Q, prec: u32) -> Q {
    Ival::point(x, prec).sqrt().hi
}

/// Isolate all roots of a squarefree polynomial with enclosures of width at
/// most about `2^-prec`.
pub fn isolate_roots(f: &Poly, prec: u32) -> Result<RootSet> {
    let n = f.deg();
    if n == 0 {
        return Err(Error::InvalidInput("constant polynomial has no roots".into()));
    }
    let df = f.derivative();
    if f.gcd(&df).deg() > 0 {
        return Err(Error::InvalidInput("polynomial is not squarefree".into()));
    }
    if n == 1 {
        let r = -f.coeff(0) / f.coeff(1);
        return Ok(RootSet { r1: 1, r2: 0, roots: vec![CIval::real(Ival::point(&r, prec))] });
    }
    let r1 = sturm_count_all(&f.sturm());
    let r2 = (n - r1) / 2;
    let mut approx = approx_roots(f);
    approx.sort_by(|a, b| a.im.abs().partial_cmp(&b.im.abs()).unwrap());
    let mut reals: Vec<CQ> = approx[..r1]
        .iter()
        .map(|z| CQ { re: from_f64(z.re), im: Q::zero() })
        .collect();
    let mut rest: Vec<C64> = approx[r1..].to_vec();
    rest.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
    let mut uppers: Vec<CQ> = rest[..r2]
        .iter()
        .map(|z| CQ { re: from_f64(z.re), im: from_f64(z.im.abs()) })
        .collect();

    let target = prec + 4;
    let bits = prec + 32;
    let eps2 = Q::new(BigInt::one(), BigInt::one() << (2 * target));
    let mut radii: Vec<Q> = vec![Q::zero(); r1 + r2];
    for (k, z) in reals.iter_mut().chain(uppers.iter_mut()).enumerate() {
        let real = k < r1;
        let mut done = false;
        for _ in 0..(64 + 2 * prec) {
            let r = radius_sq(f, &df, z).ok_or_else(|| Error::Undecided("critical point hit during root refinement".into()))?;
            if r <= eps2 {
                radii[k] = sqrt_up(&r, target + 8);
                done = true;
                break;
            }
            *z = newton(f, &df, z, bits, real)
                .ok_or_else(|| Error::Undecided("critical point hit during root refinement".into()))?;
        }
        if !done {
            return Err(Error::Undecided("root refinement did not converge".into()));
        }
    }

    // disjointness, including conjugate disks
    let mut disks: Vec<(CQ, Q)> = Vec::new();
    for (k, z) in reals.iter().enumerate() {
        disks.push((z.clone(), radii[k].clone()));
    }
    for (k, z) in uppers.iter().enumerate() {
        disks.push((z.clone(), radii[r1 + k].clone()));
        disks.push((CQ { re: z.re.clone(), im: -z.im.clone() }, radii[r1 + k].clone()));
    }
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            let dre = &disks[i].0.re - &disks[j].0.re;
            let dim = &disks[i].0.im - &disks[j].0.im;
            let dist2 = &dre * &dre + &dim * &dim;
            let s = &disks[i].1 + &disks[j].1;
            if dist2 <= &s * &s {
                return Err(Error::Undecided("root inclusion disks overlap".into()));
            }
        }
    }

    reals.sort_by(|a, b| a.re.cmp(&b.re));
    // radii for reals must follow the sort; recompute them from the final centers
    let mut roots = Vec::with_capacity(n);
    for z in &reals {
        let rho = sqrt_up(&radius_sq(f, &df, z).unwrap(), target + 8);
        let re = Ival::new(&z.re - &rho, &z.re + &rho, prec + 8);
        roots.push(CIval::real(re));
    }
    let mut up: Vec<(CQ, Q)> = uppers.into_iter().zip(radii[r1..].iter().cloned()).collect();
    up.sort_by(|a, b| (&a.0.re, &a.0.im).cmp(&(&b.0.re, &b.0.im)));
    let mut conj = Vec::new();
    for (z, rho) in &up {
        let re = Ival::new(&z.re - rho, &z.re + rho, prec + 8);
        let im = Ival::new(&z.im - rho, &z.im + rho, prec + 8);
        conj.push(CIval { re: re.clone(), im: im.neg() });
        roots.push(CIval { re, im });
    }
    roots.extend(conj);
    Ok(RootSet { r1, r2, roots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolates_gaussian_and_cubic_roots() {
        let rs = isolate_roots(&Poly::from_ints(&[1, 0, 1]), 64).unwrap();
        assert_eq!((rs.r1, rs.r2), (0, 1));
        assert!(rs.roots[0].im.contains(&qi(1)) && rs.roots[0].re.contains(&qi(0)));
        assert!(rs.roots[1].im.contains(&qi(-1)));
        assert!(rs.roots[0].width() < Q::new(BigInt::one(), BigInt::one() << 30u32));

        let rs = isolate_roots(&Poly::from_ints(&[-1, -1, 0, 1]), 128).unwrap();
        assert_eq!((rs.r1, rs.r2), (1, 1));
        assert!((rs.roots[0].re.to_f64() - 1.324717957244746).abs() < 1e-14);
    }

    #[test]
    fn real_roots_are_sorted() {
        let rs = isolate_roots(&Poly::from_ints(&[0, -1, 0, 1]), 64).unwrap();
        let v: Vec<f64> = rs.roots.iter().map(|z| z.re.to_f64()).collect();
        assert_eq!(rs.r1, 3);
        assert!(v[0] < v[1] && v[1] < v[2]);
        assert!(rs.roots[1].re.contains(&qi(0)));
    }

    #[test]
    fn non_monic_input() {
        let rs = isolate_roots(&Poly::from_ints(&[-2, 0, 3]), 64).unwrap();
        let s = (2f64 / 3.0).sqrt();
        assert!((rs.roots[1].re.to_f64() - s).abs() < 1e-15);
    }
}
