//! Exact linear algebra over Q on small dense matrices.

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::rational::Q;

pub type Mat = Vec<Vec<Q>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(Q::zero(), |acc, t| acc + &a[i][t] * &b[t][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Mat, v: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Q::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn det(a: &Mat) -> Q {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        let p = m[col][col].clone();
        d *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] -= t;
            }
        }
    }
    d
}

/// Inverse of a square matrix, or `None` if singular.
pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .zip(identity(n))
        .map(|(r, e)| r.iter().cloned().chain(e).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(piv, col);
        let p = m[col][col].clone();
        for c in 0..2 * n {
            m[col][c] = &m[col][c] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let t = &f * &m[col][c];
                    m[r][c] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solve a x = b for square nonsingular a.
pub fn solve(a: &Mat, b: &[Q]) -> Option<Vec<Q>> {
    Some(mat_vec(&inverse(a)?, b))
}

pub fn trace(a: &Mat) -> Q {
    (0..a.len()).fold(Q::zero(), |acc, i| acc + &a[i][i])
}

/// Characteristic polynomial det(xI - a) via Faddeev–LeVerrier.
pub fn charpoly(a: &Mat) -> Poly {
    let n = a.len();
    let mut c = vec![Q::zero(); n + 1];
    c[n] = Q::one();
    let mut mk = vec![vec![Q::zero(); n]; n];
    let id = identity(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let am = mat_mul(a, &mk);
        mk = am
            .iter()
            .zip(&id)
            .map(|(r, e)| r.iter().zip(e).map(|(x, y)| x + y * &c[n - k + 1]).collect())
            .collect();
        let t = trace(&mat_mul(a, &mk));
        c[n - k] = -t / Q::from_integer((k as i64).into());
    }
    Poly::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(det(&a), qi(18));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), qi(-1));
    }

    #[test]
    fn characteristic_polynomial() {
        // companion of x^2 - x - 1
        let a = m(&[&[0, 1], &[1, 1]]);
        assert_eq!(charpoly(&a), Poly::from_ints(&[-1, -1, 1]));
    }
}
