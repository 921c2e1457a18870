//! Adaptive Simpson quadrature.

use crate::{lit, Real};

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Classic recursive Simpson with Richardson correction; the depth cap keeps
/// pathological integrands from recursing forever.
pub fn adaptive_simpson<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T) -> T {
    let mid = (a + b) * lit::<T>(0.5);
    let fa = f(a);
    let fm = f(mid);
    let fb = f(b);
    let whole = simpson_panel(a, b, fa, fm, fb);
    adapt(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[inline]
fn simpson_panel<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / lit::<T>(6.0) * (fa + lit::<T>(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> T {
    let mid = (a + b) * lit::<T>(0.5);
    let lm = (a + mid) * lit::<T>(0.5);
    let rm = (mid + b) * lit::<T>(0.5);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_panel(a, mid, fa, flm, fm);
    let right = simpson_panel(mid, b, fm, frm, fb);
    let refined = left + right;
    let err = refined - whole;
    if depth == 0 || err.abs() <= lit::<T>(15.0) * tol {
        return refined + err / lit::<T>(15.0);
    }
    let half_tol = tol * lit::<T>(0.5);
    adapt(f, a, mid, fa, flm, fm, left, half_tol, depth - 1)
        + adapt(f, mid, b, fm, frm, fb, right, half_tol, depth - 1)
}
