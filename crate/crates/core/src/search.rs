//! Derivative-free maximization: golden-section line search and cyclic
//! coordinate ascent over boxes and circles.

use std::f64::consts::TAU;

use crate::angle::wrap_tau;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes a unimodal `f` on `[lo, hi]` to an interval width of `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
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
    let fx = f(x);
    // endpoints of the final bracket can beat the midpoint on plateaus
    [(x, fx), (c, fc), (d, fd)].into_iter().fold(
        (x, fx),
        |best, cand| if cand.1 > best.1 { cand } else { best },
    )
}

/// Domain of one coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Angle on the circle `[0, 2π)`.
    Circle,
    /// Closed interval.
    Interval(f64, f64),
}

#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    /// Grid points scanned per coordinate before the golden-section refinement.
    pub scan_points: usize,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            scan_points: 24,
            tol: 1e-10,
            max_sweeps: 400,
        }
    }
}

/// Cyclic coordinate ascent. Each coordinate is scanned on a coarse grid and
/// the best cell is refined by golden section; a move is kept only if it
/// improves the objective. Stops once a full sweep gains less than `tol`.
pub fn coordinate_ascent<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    domains: &[Domain],
    opts: &AscentOptions,
) -> (Vec<f64>, f64) {
    assert_eq!(x0.len(), domains.len());
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut buf = x.clone();
    for _ in 0..opts.max_sweeps {
        let start = fx;
        for i in 0..x.len() {
            buf.copy_from_slice(&x);
            let (lo, width) = match domains[i] {
                Domain::Circle => (x[i] - 0.5 * TAU, TAU),
                Domain::Interval(lo, hi) => (lo, hi - lo),
            };
            let n = opts.scan_points.max(3);
            let step = width / (n as f64 - 1.0);
            let mut eval = |v: f64| {
                buf[i] = v;
                f(&buf)
            };
            let (mut best_k, mut best_v) = (0, f64::NEG_INFINITY);
            for k in 0..n {
                let v = eval(lo + step * k as f64);
                if v > best_v {
                    best_k = k;
                    best_v = v;
                }
            }
            let centre = lo + step * best_k as f64;
            let (mut a, mut b) = (centre - step, centre + step);
            if let Domain::Interval(l, h) = domains[i] {
                a = a.max(l);
                b = b.min(h);
            }
            let line = |v: f64| {
                let mut y = x.clone();
                y[i] = v;
                f(&y)
            };
            let (xi, fi) = golden_section_max(line, a, b, opts.tol);
            if fi > fx {
                x[i] = match domains[i] {
                    Domain::Circle => wrap_tau(xi),
                    Domain::Interval(..) => xi,
                };
                fx = fi;
            }
        }
        if fx - start < opts.tol {
            break;
        }
    }
    (x, fx)
}
