//! Least-squares fitters: lines, vertex-form parabolas, axis-aligned
//! ellipses and hyperbolas, plus fit-window selection.
//!
//! The conic fitters regress `y^2` on `[1, x^2, y]`, so they stay linear
//! least squares; completing the square recovers the geometric parameters.

use thiserror::Error;

use crate::{lit, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("degenerate abscissae: all x values equal")]
    DegenerateAbscissae,
    #[error("quadratic coefficient vanished; the data is a line")]
    ZeroCurvature,
    #[error("normal equations are singular")]
    SingularSystem,
    #[error("data does not bend the right way for this conic (B = {0})")]
    WrongConicClass(String),
    #[error("inconsistent conic data: negative semi-axis squared")]
    NegativeAxis,
    #[error("selected fit window is empty")]
    EmptyWindow,
}

/// Least-squares line `y = m x + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit<T> {
    pub m: T,
    pub b: T,
    pub rms: T,
}

impl<T: Real> LineFit<T> {
    /// Abscissa where the fitted line crosses zero, `-b / m`.
    pub fn zero_crossing(&self) -> T {
        -self.b / self.m
    }
}

/// Least-squares parabola in vertex form `a (t - vertex)^2 + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolaFit<T> {
    pub a: T,
    pub vertex: T,
    pub offset: T,
    pub rms: T,
}

/// Axis-aligned ellipse `x^2/a^2 + (y - k)^2/b^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseFit<T> {
    pub a: T,
    pub b: T,
    pub k: T,
    pub rms: T,
}

/// Axis-aligned hyperbola `(y - k)^2/b^2 - x^2/a^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolaFit<T> {
    pub a: T,
    pub b: T,
    pub k: T,
    pub rms: T,
}

impl<T: Real> HyperbolaFit<T> {
    /// Slope of the asymptote approached for large `x`, `-b / a`.
    pub fn asymptotic_slope(&self) -> T {
        -self.b / self.a
    }
}

/// Window selection applied to a trace or parameter series before fitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowMode<T> {
    /// Keep points once the ordinate has dropped to `phi` times its first value.
    AfterFraction(T),
    /// Keep points with abscissa in `[t1, t2]`.
    TimeRange(T, T),
    /// Keep points whose ordinate stays below `a_max` (series of fitted
    /// horizontal semi-axes: drop entries once the conic reaches the boundary).
    BeforeBoundaryHit(T),
}

pub fn select_fit_window<T: Real>(
    trace: &[(T, T)],
    mode: WindowMode<T>,
) -> Result<Vec<(T, T)>, FitError> {
    if trace.is_empty() {
        return Err(FitError::EmptyWindow);
    }
    let kept: Vec<(T, T)> = match mode {
        WindowMode::AfterFraction(phi) => {
            let f0 = trace[0].1;
            trace.iter().copied().filter(|&(_, f)| f <= phi * f0).collect()
        }
        WindowMode::TimeRange(t1, t2) => {
            trace.iter().copied().filter(|&(t, _)| t >= t1 && t <= t2).collect()
        }
        WindowMode::BeforeBoundaryHit(a_max) => {
            trace.iter().copied().filter(|&(_, a)| a < a_max).collect()
        }
    };
    if kept.is_empty() {
        return Err(FitError::EmptyWindow);
    }
    Ok(kept)
}

pub fn fit_line<T: Real>(points: &[(T, T)]) -> Result<LineFit<T>, FitError> {
    if points.len() < 2 {
        return Err(FitError::TooFewPoints { needed: 2, got: points.len() });
    }
    let n = lit::<T>(points.len() as f64);
    let sx: T = points.iter().map(|&(x, _)| x).sum();
    let sy: T = points.iter().map(|&(_, y)| y).sum();
    let mx = sx / n;
    let my = sy / n;
    let sxx: T = points.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: T = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    if sxx == T::zero() {
        return Err(FitError::DegenerateAbscissae);
    }
    let m = sxy / sxx;
    let b = my - m * mx;
    let ss: T = points
        .iter()
        .map(|&(x, y)| {
            let r = y - m * x - b;
            r * r
        })
        .sum();
    Ok(LineFit { m, b, rms: (ss / n).sqrt() })
}

/// Solve a 3x3 system by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve3<T: Real>(mut a: [[T; 3]; 3], mut rhs: [T; 3]) -> Result<[T; 3], FitError> {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[pivot][col].abs() == T::zero() {
            return Err(FitError::SingularSystem);
        }
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= factor * a[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = rhs[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Least-squares regression on a three-function basis; returns coefficients
/// and the rms residual.
fn regress3<T: Real>(rows: &[([T; 3], T)]) -> Result<([T; 3], T), FitError> {
    let mut ata = [[T::zero(); 3]; 3];
    let mut atb = [T::zero(); 3];
    for (basis, y) in rows {
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += basis[i] * basis[j];
            }
            atb[i] += basis[i] * *y;
        }
    }
    let coeff = solve3(ata, atb)?;
    let n = lit::<T>(rows.len() as f64);
    let ss: T = rows
        .iter()
        .map(|(basis, y)| {
            let fit = coeff[0] * basis[0] + coeff[1] * basis[1] + coeff[2] * basis[2];
            let r = *y - fit;
            r * r
        })
        .sum();
    Ok((coeff, (ss / n).sqrt()))
}

pub fn fit_parabola_vertex<T: Real>(points: &[(T, T)]) -> Result<ParabolaFit<T>, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints { needed: 3, got: points.len() });
    }
    // Center the abscissae; the minimizer is unchanged and the normal
    // equations stay well conditioned for vertices far from zero.
    let n = lit::<T>(points.len() as f64);
    let tbar: T = points.iter().map(|&(t, _)| t).sum::<T>() / n;
    let rows: Vec<([T; 3], T)> = points
        .iter()
        .map(|&(t, y)| {
            let s = t - tbar;
            ([T::one(), s, s * s], y)
        })
        .collect();
    let ([gamma, beta, alpha], rms) = regress3(&rows)?;
    if alpha == T::zero() || !alpha.is_finite() {
        return Err(FitError::ZeroCurvature);
    }
    let vertex_local = -beta / (lit::<T>(2.0) * alpha);
    Ok(ParabolaFit {
        a: alpha,
        vertex: tbar + vertex_local,
        offset: gamma - beta * beta / (lit::<T>(4.0) * alpha),
        rms,
    })
}

/// Shared algebraic conic fit: regress `y^2 = A + B x^2 + C y`.
fn fit_conic<T: Real>(points: &[(T, T)]) -> Result<(T, T, T, T), FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints { needed: 3, got: points.len() });
    }
    let rows: Vec<([T; 3], T)> = points
        .iter()
        .map(|&(x, y)| ([T::one(), x * x, y], y * y))
        .collect();
    let ([a_coef, b_coef, c_coef], rms) = regress3(&rows)?;
    Ok((a_coef, b_coef, c_coef, rms))
}

/// Complete the square: `k = C/2`, `b^2 = A + k^2`, `a^2 = -b^2 / B` (B < 0).
pub fn fit_ellipse<T: Real>(points: &[(T, T)]) -> Result<EllipseFit<T>, FitError> {
    let (a_coef, b_coef, c_coef, rms) = fit_conic(points)?;
    if !(b_coef < T::zero()) {
        return Err(FitError::WrongConicClass(format!("{b_coef}")));
    }
    let k = c_coef / lit::<T>(2.0);
    let b_sq = a_coef + k * k;
    if !(b_sq > T::zero()) {
        return Err(FitError::NegativeAxis);
    }
    let a_sq = -b_sq / b_coef;
    Ok(EllipseFit { a: a_sq.sqrt(), b: b_sq.sqrt(), k, rms })
}

/// Same regression with the opposite bend: `B > 0`, `a^2 = b^2 / B`.
pub fn fit_hyperbola<T: Real>(points: &[(T, T)]) -> Result<HyperbolaFit<T>, FitError> {
    let (a_coef, b_coef, c_coef, rms) = fit_conic(points)?;
    if !(b_coef > T::zero()) {
        return Err(FitError::WrongConicClass(format!("{b_coef}")));
    }
    let k = c_coef / lit::<T>(2.0);
    let b_sq = a_coef + k * k;
    if !(b_sq > T::zero()) {
        return Err(FitError::NegativeAxis);
    }
    let a_sq = b_sq / b_coef;
    Ok(HyperbolaFit { a: a_sq.sqrt(), b: b_sq.sqrt(), k, rms })
}
