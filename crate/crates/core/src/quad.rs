//! Adaptive quadrature helpers shared by the Young-function calculus and the
//! order-relation scans.

/// Adaptive Simpson quadrature of `f` on `[a, b]` with relative tolerance
/// `rel_tol`. The recursion depth is capped; the cap is generous for the
/// smooth integrands used in this crate.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let scale = whole.abs().max(1e-300);
    simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * scale, 60)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * abs_tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1)
}

/// Logarithmically spaced grid of `count` points on `[lo, hi]`, inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Golden-section maximization. Returns `(argmax, max)`.
pub fn golden_max(f: &dyn Fn(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let (x, v) = golden_min(&|t| -f(t), a, b, iters);
    (x, -v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_exact() {
        let v = adaptive_simpson(&|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-10);
    }

    #[test]
    fn simpson_log_integrand() {
        // integral_1^e ln(t) dt = 1
        let v = adaptive_simpson(&|x| x.ln(), 1.0, std::f64::consts::E, 1e-12);
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn golden_finds_parabola_min() {
        let (x, v) = golden_min(&|t| (t - 3.0) * (t - 3.0) + 1.0, 0.0, 10.0, 200);
        // argmin accuracy is limited to ~sqrt(machine eps): the quadratic
        // is flat to working precision within 1e-8 of the minimum
        assert!((x - 3.0).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
