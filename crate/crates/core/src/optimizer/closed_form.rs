//! Closed forms for d-regular graphs and stars (with `p = 1`).

use crate::error::{Error, Result};

const STAR_BISECTION_TOL: f64 = 1e-12;

/// Optimal common transmit probability on a d-regular graph with common
/// generation probability `p`: `min(1 / (p (d + 1)), 1)`.
///
/// The clamp at 1 is only active when `p (d + 1) <= 1`, in which case
/// `p q* = p <= 1 / (d + 1) < 1`, so the clamped point still has finite age.
pub fn d_regular_closed_form(d: usize, p: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParams("degree must be at least 1".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "generation probability must lie in (0, 1], got {p}"
        )));
    }
    Ok((1.0 / (p * (d as f64 + 1.0))).min(1.0))
}

/// Optimal `(q1, q2)` for a star with `n` nodes and `p = 1`, where `q1` is the
/// hub and `q2` every leaf.
///
/// For `n > 3`, `q2` is the root of `1 - (n-1) q2 = q2^{3/2} (1-q2)^{(n-3)/2}`
/// on `(0, 1/(n-1))`: the left side is positive only there and the right side
/// is non-negative, so the bracket holds the unique root. Then
/// `q1 = r / (1 + r)` with `r = sqrt(q2) (1-q2)^{(n-3)/2}`.
pub fn star_solve(n: usize) -> Result<(f64, f64)> {
    match n {
        0 | 1 => Err(Error::InvalidSize(format!("star needs n >= 2, got {n}"))),
        2 => Ok((0.5, 0.5)),
        3 => {
            let q = (3.0 - 5f64.sqrt()) / 2.0;
            Ok((q, q))
        }
        _ => {
            let m = n as f64;
            let h =
                |q2: f64| 1.0 - (m - 1.0) * q2 - q2.powf(1.5) * (1.0 - q2).powf((m - 3.0) / 2.0);
            let q2 = bisect(h, 0.0, 1.0 / (m - 1.0), STAR_BISECTION_TOL);
            let r = q2.sqrt() * (1.0 - q2).powf((m - 3.0) / 2.0);
            Ok((r / (1.0 + r), q2))
        }
    }
}

/// Residuals of the two star optimality equations at `(q1, q2)`:
/// `1 - (n-1) q2 - q2^{3/2} (1-q2)^{(n-3)/2}` and
/// `q1^2 - q2 (1-q1)^2 (1-q2)^{n-3}`.
pub fn star_equation_residuals(n: usize, q1: f64, q2: f64) -> (f64, f64) {
    let m = n as f64;
    let leaf = 1.0 - (m - 1.0) * q2 - q2.powf(1.5) * (1.0 - q2).powf((m - 3.0) / 2.0);
    let hub = q1 * q1 - q2 * (1.0 - q1).powi(2) * (1.0 - q2).powf(m - 3.0);
    (leaf, hub)
}

/// Squared (polynomial) form of the leaf equation:
/// `sum_k C(n-3, k) (-1)^k q2^{k+3} + 2(n-1) q2 - (n-1)^2 q2^2 - 1`.
///
/// Squaring can admit spurious roots, so this is only used as a residual
/// check on the root found by [`star_solve`].
pub fn star_polynomial_check(n: usize, q2: f64) -> f64 {
    let m = n.saturating_sub(3);
    let mut binom = 1.0;
    let mut sum = 0.0;
    for k in 0..=m {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * q2.powi(k as i32 + 3);
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    let nm1 = n as f64 - 1.0;
    sum + 2.0 * nm1 * q2 - nm1 * nm1 * q2 * q2 - 1.0
}

/// Bisection for a continuous `f` with `f(lo) > 0 > f(hi)` (or the reverse).
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let lo_positive = f(lo) > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_regular_examples() {
        assert!((d_regular_closed_form(2, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d_regular_closed_form(1, 1.0).unwrap(), 0.5);
        assert_eq!(d_regular_closed_form(3, 0.2).unwrap(), 1.0);
        assert!(d_regular_closed_form(2, 0.0).is_err());
        assert!(d_regular_closed_form(0, 1.0).is_err());
    }

    #[test]
    fn d_regular_scale_symmetry() {
        // halving p doubles q* until the clamp
        for d in 1..6 {
            let q = d_regular_closed_form(d, 1.0).unwrap();
            let q_half = d_regular_closed_form(d, 0.5).unwrap();
            assert!((q_half - (2.0 * q).min(1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn star_special_cases() {
        assert_eq!(star_solve(2).unwrap(), (0.5, 0.5));
        let (q1, q2) = star_solve(3).unwrap();
        let want = (3.0 - 5f64.sqrt()) / 2.0;
        assert_eq!((q1, q2), (want, want));
        assert!((want - 0.381966).abs() < 1e-6);
        assert!(star_solve(1).is_err());
    }

    #[test]
    fn star_general_residuals() {
        for n in 4..=30 {
            let (q1, q2) = star_solve(n).unwrap();
            assert!(q2 > 0.0 && q2 < 1.0 / (n as f64 - 1.0));
            let (r_leaf, r_hub) = star_equation_residuals(n, q1, q2);
            assert!(
                r_leaf.abs() < 1e-10 && r_hub.abs() < 1e-10,
                "n={n}: {r_leaf} {r_hub}"
            );
        }
    }

    #[test]
    fn general_formula_reproduces_small_cases() {
        // the leaf equation is also valid at n = 2 and n = 3
        for (n, want) in [(2usize, 0.5), (3, (3.0 - 5f64.sqrt()) / 2.0)] {
            let (leaf, _) = star_equation_residuals(n, want, want);
            assert!(leaf.abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn polynomial_examples() {
        assert_eq!(star_polynomial_check(5, 0.0), -1.0);
        for n in [4, 6, 10, 30] {
            let (_, q2) = star_solve(n).unwrap();
            assert!(star_polynomial_check(n, q2).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| 2.0 - x * x, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }
}
