//! Bounded scalar minimization: coarse scan, then golden-section refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]` until the bracket
/// is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= tol {
            break;
        }
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
    // endpoints may beat the interior on monotone stretches
    let mid = 0.5 * (a + b);
    [(a, f(a)), (mid, f(mid)), (b, f(b))]
        .into_iter()
        .fold((mid, f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best })
}

/// Scan `points` evenly spaced samples on `[lo, hi]`, then refine around the
/// best sample with golden-section search.
pub fn scan_then_golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let xs = crate::grid::linspace(lo, hi, points.max(3));
    let (best, _) = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, f(x)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let left = xs[best.saturating_sub(1)];
    let right = xs[(best + 1).min(xs.len() - 1)];
    golden_section(f, left, right, tol)
}
