//! Scalar root bracketing and refinement.

/// Brent's method on a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite
/// sign (or one of them zero). Stops when the bracket is narrower than
/// `xtol * max(1, |x|)` or no further floating-point progress is possible.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol * b.abs().max(1.0);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return None;
        }
    }
    Some(b)
}

/// All sign changes of `f` over the ordered `seeds`, each refined by [`brent`].
/// Exact zeros at seeds are reported once.
pub fn bracket_roots<F: FnMut(f64) -> f64>(mut f: F, seeds: &[f64], xtol: f64) -> Vec<f64> {
    let values: Vec<f64> = seeds.iter().map(|&s| f(s)).collect();
    let mut roots = Vec::new();
    for i in 0..seeds.len() {
        if values[i] == 0.0 {
            roots.push(seeds[i]);
            continue;
        }
        if i + 1 < seeds.len() {
            let (u, v) = (values[i], values[i + 1]);
            if u.is_finite() && v.is_finite() && v != 0.0 && u.signum() != v.signum() {
                if let Some(r) = brent(&mut f, seeds[i], seeds[i + 1], xtol) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

/// Golden-section search for a local minimum of `f` on `[lo, hi]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Value at zero of the interpolating polynomial through `(xs[i], ys[i])`
/// (Neville's scheme).
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut p = ys.to_vec();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = (xs[i + k] * p[i] - xs[i] * p[i + 1]) / (xs[i + k] - xs[i]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_sqrt2() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn brent_rejects_non_bracket() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn bracket_roots_of_cubic() {
        let seeds: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64 + 0.013).collect();
        let roots = bracket_roots(|x| (x - 1.0) * (x + 1.0) * (x - 0.5), &seeds, 1e-14);
        assert_eq!(roots.len(), 3);
        for (r, want) in roots.iter().zip([-1.0, 0.5, 1.0]) {
            assert!((r - want).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, v) = golden_min(|x| (x - 0.3) * (x - 0.3), -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(v < 1e-12);
    }

    #[test]
    fn neville_reproduces_polynomials() {
        let xs = [-0.2, -0.1, 0.1, 0.2];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - x + 2.0 * x * x * x).collect();
        assert!((neville_at_zero(&xs, &ys) - 3.0).abs() < 1e-14);
    }
}
