//! Adaptive quadrature and bracketed root finding.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const MAX_INTERVALS: usize = 5000;

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = h * x;
        let s = f(c - dx) + f(c + dx);
        kronrod += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * h,
        err: ((kronrod - gauss) * h).abs(),
    }
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// Subdivides the segment with the largest error estimate until the total
/// estimate falls below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, abs_tol, rel_tol).map(|v| -v);
    }
    let first = gk15(&f, a, b);
    let mut total = first.value;
    let mut err = first.err;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature",
                iterations: MAX_INTERVALS,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment can no longer be split in floating point.
            heap.push(worst);
            break;
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    if !total.is_finite() {
        return Err(Error::NoConvergence {
            what: "adaptive quadrature (non-finite integrand)",
            iterations: heap.len(),
        });
    }
    // Re-sum to shed the drift of the running updates.
    Ok(heap.iter().map(|s| s.value).sum())
}

/// Quadrature over `[a, ∞)` through the map x = a + t/(1 − t).
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let om = 1.0 - t;
            let v = f(a + t / om) / (om * om);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}

/// Root of `f` on `[a, b]` by bisection safeguarding secant and inverse
/// quadratic steps (Brent's method). Requires a sign change over the bracket.
pub fn find_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoBracket { what: "find_root" });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
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
    }
    Err(Error::NoConvergence {
        what: "find_root",
        iterations: max_iter,
    })
}

/// Root of `f(e^u)` searched over `u ∈ [ln lo, ln hi]`, for functions whose
/// root may sit anywhere across many decades of a positive argument.
pub fn find_root_log<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, max_iter: usize) -> Result<f64> {
    let u = find_root(|u: f64| f(u.exp()), lo.ln(), hi.ln(), 1e-15, max_iter)?;
    Ok(u.exp())
}

/// Grows `hi` by `factor` until `pred(hi)` is false. Returns `None` after
/// `max_steps` failures.
pub fn expand_while<P: Fn(f64) -> bool>(pred: P, start: f64, factor: f64, max_steps: usize) -> Option<f64> {
    let mut x = start;
    for _ in 0..max_steps {
        if !pred(x) {
            return Some(x);
        }
        x *= factor;
    }
    None
}

/// Largest `x ∈ [lo, hi]` with `pred(x)` true, for a predicate that is true
/// on an initial segment. Bisects geometrically; `lo` and `hi` must be > 0.
pub fn bisect_boundary<P: Fn(f64) -> bool>(pred: P, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..400 {
        if hi / lo - 1.0 <= rel_tol {
            break;
        }
        let mid = (lo * hi).sqrt();
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
