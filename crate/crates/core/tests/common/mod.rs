//! Shared oracle machinery for the integration and acceptance suites.
//! Everything here is deliberately independent of the library's own
//! evaluation paths: plain Simpson recursion and textbook statistics.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Adaptive Simpson on [a, b].
#[allow(dead_code)] // each integration-test binary uses its own subset
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64) {
        let m = (a + b) / 2.0;
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = (a + b) / 2.0;
        let (left, flm) = simpson(f, a, fa, m, fm);
        let (right, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, frm, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, fm, tol, 40)
}

/// Iterated adaptive Simpson over the rectangle [0,x] × [0,y].
pub fn adaptive_simpson_2d(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, tol: f64) -> f64 {
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    adaptive_simpson(
        &|v: f64| adaptive_simpson(&|u: f64| f(u, v), 0.0, x, tol / 4.0),
        0.0,
        y,
        tol,
    )
}

/// Upper-tail p-value of a chi-square statistic.
#[allow(dead_code)] // each integration-test binary uses its own subset
pub fn chi_square_p_value(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    1.0 - dist.cdf(statistic)
}
