//! Dense eigenvalue solver for small real matrices: balancing followed by
//! Francis double-shift QR on the Hessenberg form, eigenvalues only.
//!
//! The inputs this crate cares about are already tridiagonal, hence
//! Hessenberg, but the reduction is kept so the routine accepts any small
//! dense matrix.

use num_complex::Complex;

use crate::{lit, Real};

#[derive(Debug, Clone)]
pub(crate) struct DenseMat<T> {
    pub n: usize,
    pub a: Vec<T>,
}

impl<T: Real> DenseMat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![T::zero(); n * n] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.a[i * self.n + j] = v;
    }
}

/// Iterative diagonal similarity scaling (radix 2); leaves eigenvalues
/// unchanged while shrinking the norm imbalance between rows and columns.
pub(crate) fn balance<T: Real>(m: &mut DenseMat<T>) {
    let n = m.n;
    let radix = lit::<T>(2.0);
    let radix_sq = radix * radix;
    let threshold = lit::<T>(0.95);
    loop {
        let mut done = true;
        for i in 0..n {
            let mut col_norm = T::zero();
            let mut row_norm = T::zero();
            for j in 0..n {
                if j != i {
                    col_norm += m.at(j, i).abs();
                    row_norm += m.at(i, j).abs();
                }
            }
            if col_norm == T::zero() || row_norm == T::zero() {
                continue;
            }
            let mut factor = T::one();
            let mut c = col_norm;
            let total = col_norm + row_norm;
            let mut g = row_norm / radix;
            while c < g {
                factor *= radix;
                c *= radix_sq;
            }
            g = row_norm * radix;
            while c > g {
                factor /= radix;
                c /= radix_sq;
            }
            if (c + row_norm) / factor < threshold * total {
                done = false;
                let inv = T::one() / factor;
                for j in 0..n {
                    let v = m.at(i, j) * inv;
                    m.set(i, j, v);
                }
                for j in 0..n {
                    let v = m.at(j, i) * factor;
                    m.set(j, i, v);
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form (eigenvalues preserved).
pub(crate) fn to_hessenberg<T: Real>(m: &mut DenseMat<T>) {
    let n = m.n;
    if n < 3 {
        return;
    }
    for col in 0..n - 2 {
        // find pivot row with largest magnitude below the subdiagonal
        let mut pivot = col + 1;
        let mut largest = m.at(col + 1, col).abs();
        for row in col + 2..n {
            if m.at(row, col).abs() > largest {
                largest = m.at(row, col).abs();
                pivot = row;
            }
        }
        if largest == T::zero() {
            continue;
        }
        if pivot != col + 1 {
            for j in 0..n {
                let tmp = m.at(pivot, j);
                m.set(pivot, j, m.at(col + 1, j));
                m.set(col + 1, j, tmp);
            }
            for i in 0..n {
                let tmp = m.at(i, pivot);
                m.set(i, pivot, m.at(i, col + 1));
                m.set(i, col + 1, tmp);
            }
        }
        let denom = m.at(col + 1, col);
        for row in col + 2..n {
            let factor = m.at(row, col) / denom;
            if factor == T::zero() {
                continue;
            }
            for j in 0..n {
                let v = m.at(row, j) - factor * m.at(col + 1, j);
                m.set(row, j, v);
            }
            for i in 0..n {
                let v = m.at(i, col + 1) + factor * m.at(i, row);
                m.set(i, col + 1, v);
            }
        }
        for row in col + 2..n {
            m.set(row, col, T::zero());
        }
    }
}

fn sign_like<T: Real>(magnitude: T, sign_of: T) -> T {
    if sign_of >= T::zero() {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by double-shift QR.
///
/// Returns `None` if any eigenvalue fails to deflate within the iteration
/// cap (100 iterations per eigenvalue).
pub(crate) fn hessenberg_eigenvalues<T: Real>(m: &mut DenseMat<T>) -> Option<Vec<Complex<T>>> {
    let n = m.n;
    let mut eig = Vec::with_capacity(n);
    if n == 0 {
        return Some(eig);
    }
    let half = lit::<T>(0.5);
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += m.at(i, j).abs();
        }
    }
    let mut t_shift = T::zero();
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // small-subdiagonal search
            let mut l = nn;
            while l >= 1 {
                let s = m.at((l - 1) as usize, (l - 1) as usize).abs()
                    + m.at(l as usize, l as usize).abs();
                let s = if s == T::zero() { anorm } else { s };
                if m.at(l as usize, (l - 1) as usize).abs() + s == s {
                    m.set(l as usize, (l - 1) as usize, T::zero());
                    break;
                }
                l -= 1;
            }
            let x = m.at(nn as usize, nn as usize);
            if l == nn {
                eig.push(Complex::new(x + t_shift, T::zero()));
                nn -= 1;
                break;
            }
            let y = m.at((nn - 1) as usize, (nn - 1) as usize);
            let w = m.at(nn as usize, (nn - 1) as usize) * m.at((nn - 1) as usize, nn as usize);
            if l == nn - 1 {
                let p = half * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x_shifted = x + t_shift;
                if q >= T::zero() {
                    let z = p + sign_like(z, p);
                    eig.push(Complex::new(x_shifted + z, T::zero()));
                    if z == T::zero() {
                        eig.push(Complex::new(x_shifted, T::zero()));
                    } else {
                        eig.push(Complex::new(x_shifted - w / z, T::zero()));
                    }
                } else {
                    eig.push(Complex::new(x_shifted + p, z));
                    eig.push(Complex::new(x_shifted + p, -z));
                }
                nn -= 2;
                break;
            }
            if its == 100 {
                return None;
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // exceptional shift
                t_shift += x;
                for i in 0..=nn as usize {
                    let v = m.at(i, i) - x;
                    m.set(i, i, v);
                }
                let s = m.at(nn as usize, (nn - 1) as usize).abs()
                    + m.at((nn - 1) as usize, (nn - 2) as usize).abs();
                x = lit::<T>(0.75) * s;
                y = x;
                w = lit::<T>(-0.4375) * s * s;
            }
            its += 1;
            // Francis double-shift sweep start
            let mut mrow = nn - 2;
            let (mut p, mut q, mut r) = (T::zero(), T::zero(), T::zero());
            while mrow >= l {
                let mu = mrow as usize;
                let z = m.at(mu, mu);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / m.at(mu + 1, mu) + m.at(mu, mu + 1);
                q = m.at(mu + 1, mu + 1) - z - rr - ss;
                r = m.at(mu + 2, mu + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if mrow == l {
                    break;
                }
                let u = m.at(mu, mu - 1).abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (m.at(mu - 1, mu - 1).abs() + z.abs() + m.at(mu + 1, mu + 1).abs());
                if u + v == v {
                    break;
                }
                mrow -= 1;
            }
            let mrow = mrow.max(l) as usize;
            for i in mrow + 2..=nn as usize {
                m.set(i, i - 2, T::zero());
                if i > mrow + 2 {
                    m.set(i, i - 3, T::zero());
                }
            }
            for k in mrow..=(nn - 1) as usize {
                if k != mrow {
                    p = m.at(k, k - 1);
                    q = m.at(k + 1, k - 1);
                    r = if k as isize != nn - 1 { m.at(k + 2, k - 1) } else { T::zero() };
                    x = p.abs() + q.abs() + r.abs();
                    if x == T::zero() {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                let s = sign_like((p * p + q * q + r * r).sqrt(), p);
                if s == T::zero() {
                    continue;
                }
                if k == mrow {
                    if l != mrow as isize {
                        let v = -m.at(k, k - 1);
                        m.set(k, k - 1, v);
                    }
                } else {
                    m.set(k, k - 1, -s * x);
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                // row modification
                for j in k..=nn as usize {
                    let mut pp = m.at(k, j) + q * m.at(k + 1, j);
                    if k as isize != nn - 1 {
                        pp += r * m.at(k + 2, j);
                        let v = m.at(k + 2, j) - pp * z;
                        m.set(k + 2, j, v);
                    }
                    let v1 = m.at(k + 1, j) - pp * y;
                    m.set(k + 1, j, v1);
                    let v0 = m.at(k, j) - pp * x;
                    m.set(k, j, v0);
                }
                // column modification
                let last = if (nn as usize) < k + 3 { nn as usize } else { k + 3 };
                for i in l as usize..=last {
                    let mut pp = x * m.at(i, k) + y * m.at(i, k + 1);
                    if k as isize != nn - 1 {
                        pp += z * m.at(i, k + 2);
                        let v = m.at(i, k + 2) - pp * r;
                        m.set(i, k + 2, v);
                    }
                    let v1 = m.at(i, k + 1) - pp * q;
                    m.set(i, k + 1, v1);
                    let v0 = m.at(i, k) - pp;
                    m.set(i, k, v0);
                }
            }
        }
    }
    Some(eig)
}

/// Eigenvalues of a small dense real matrix, sorted by real part then
/// imaginary part ascending.
pub(crate) fn dense_eigenvalues<T: Real>(mut m: DenseMat<T>) -> Option<Vec<Complex<T>>> {
    balance(&mut m);
    to_hessenberg(&mut m);
    let mut eig = hessenberg_eigenvalues(&mut m)?;
    eig.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal))
    });
    Some(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[f64]]) -> DenseMat<f64> {
        let n = rows.len();
        let mut m = DenseMat::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[test]
    fn diagonal_matrix() {
        let m = from_rows(&[&[-1.0, 0.0, 0.0], &[0.0, -2.0, 0.0], &[0.0, 0.0, -3.0]]);
        let eig = dense_eigenvalues(m).unwrap();
        let re: Vec<f64> = eig.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![-3.0, -2.0, -1.0]);
        assert!(eig.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn known_symmetric_pair() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let eig = dense_eigenvalues(from_rows(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert!((eig[0].re - 1.0).abs() < 1e-12);
        assert!((eig[1].re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_block_gives_complex_pair() {
        // [[0,-1],[1,0]] has eigenvalues +-i
        let eig = dense_eigenvalues(from_rows(&[&[0.0, -1.0], &[1.0, 0.0]])).unwrap();
        assert!(eig[0].re.abs() < 1e-14 && (eig[0].im + 1.0).abs() < 1e-14);
        assert!(eig[1].re.abs() < 1e-14 && (eig[1].im - 1.0).abs() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // companion of x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let m = from_rows(&[&[6.0, -11.0, 6.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let eig = dense_eigenvalues(m).unwrap();
        for (got, want) in eig.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got.re - want).abs() < 1e-10, "{got} vs {want}");
            assert!(got.im.abs() < 1e-10);
        }
    }

    #[test]
    fn characteristic_polynomial_residual_is_tiny() {
        // verify eigenvalues against det(A - lambda I) computed per value
        let m = from_rows(&[
            &[-7.0, 3.0, 0.0, 0.0],
            &[2.0, -5.0, 1.5, 0.0],
            &[0.0, 0.7, -4.0, 2.0],
            &[0.0, 0.0, 0.3, -2.0],
        ]);
        let eig = dense_eigenvalues(m.clone()).unwrap();
        for lambda in eig {
            // 4x4 complex determinant by Gaussian elimination
            let n = 4;
            let mut a: Vec<Complex<f64>> = (0..16)
                .map(|idx| {
                    let (i, j) = (idx / n, idx % n);
                    let mut v = Complex::new(m.at(i, j), 0.0);
                    if i == j {
                        v -= lambda;
                    }
                    v
                })
                .collect();
            let mut det = Complex::new(1.0, 0.0);
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&i, &j| {
                        a[i * n + col]
                            .norm()
                            .partial_cmp(&a[j * n + col].norm())
                            .unwrap()
                    })
                    .unwrap();
                if pivot != col {
                    for j in 0..n {
                        a.swap(col * n + j, pivot * n + j);
                    }
                    det = -det;
                }
                det *= a[col * n + col];
                for row in col + 1..n {
                    let f = a[row * n + col] / a[col * n + col];
                    for j in col..n {
                        let v = a[row * n + j] - f * a[col * n + j];
                        a[row * n + j] = v;
                    }
                }
            }
            assert!(det.norm() < 1e-8, "residual {det} for lambda {lambda}");
        }
    }
}
