//! Double-exponential (tanh-sinh) quadrature on finite intervals.
//!
//! Used by the Mittag-Leffler evaluator for its integral representations.
//! Abscissae are generated from their distance to the nearer endpoint so
//! integrable endpoint singularities such as `s^(-0.9)` are resolved.

use std::f64::consts::FRAC_PI_2;

const MAX_LEVEL: u32 = 12;
const T_MAX: f64 = 6.0;

/// Integrate `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// `f` receives `(x, x - a, b - x)` so integrands with endpoint
/// singularities can use the exact endpoint distances.
pub(crate) fn tanh_sinh<F>(f: F, a: f64, b: f64, rel_tol: f64) -> f64
where
    F: Fn(f64, f64, f64) -> f64,
{
    if b <= a {
        return 0.0;
    }
    let len = b - a;
    let node = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let (eu, emu) = (u.exp(), (-u).exp());
        // distances to a and b
        let da = len / (1.0 + emu * emu);
        let db = len / (1.0 + eu * eu);
        let cosh_u = 0.5 * (eu + emu);
        let w = len * 0.5 * FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if w == 0.0 || !w.is_finite() || da <= 0.0 || db <= 0.0 {
            return 0.0;
        }
        let x = if da <= db { a + da } else { b - db };
        let v = f(x, da, db);
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };

    let mut step = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * step;
        if t > T_MAX {
            break;
        }
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut estimate = sum * step;

    for _ in 1..MAX_LEVEL {
        step *= 0.5;
        let mut added = 0.0;
        let mut k = 1;
        loop {
            let t = k as f64 * step;
            if t > T_MAX {
                break;
            }
            added += node(t) + node(-t);
            k += 2;
        }
        sum += added;
        let next = sum * step;
        let converged = (next - estimate).abs() <= rel_tol * next.abs();
        estimate = next;
        if converged {
            break;
        }
    }
    estimate
}
