//! Zero location on a sampled interval: sign changes are refined by
//! bisection; tangential zeros (touches) by golden-section minimization of
//! `|f|`.

/// Stop bisecting once `|f(mid)|` drops below this.
pub const VALUE_TOL: f64 = 1e-12;
/// ... or once the bracket is narrower than this.
pub const BRACKET_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroKind {
    /// `f` changes sign across the zero.
    SignChange,
    /// `|f|` reaches (numerically) zero without a sign change.
    Touch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub at: f64,
    pub value: f64,
    pub kind: ZeroKind,
}

/// Bisection on a bracket with `f(lo)·f(hi) ≤ 0`.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() < VALUE_TOL || hi - lo < BRACKET_TOL {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimizes `g` on `[lo, hi]` by golden-section search.
pub fn golden_min<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..200 {
        if hi - lo < 1e-14 * (1.0 + lo.abs()) {
            break;
        }
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - r * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + r * (hi - lo);
            g2 = g(x2);
        }
    }
    if g1 <= g2 {
        x1
    } else {
        x2
    }
}

/// Zeros of `f` on `[lo, hi]` from `samples ≥ 2` equally spaced samples.
///
/// `touch_tol` is the largest `|f|` accepted at a tangential zero.
/// Endpoints are reported when `|f|` there is below `touch_tol`. Results are
/// sorted and deduplicated.
pub fn locate_zeros<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    samples: usize,
    touch_tol: f64,
) -> Vec<Zero> {
    let n = samples.max(2);
    if hi <= lo {
        let v = f(lo);
        return if v.abs() <= touch_tol {
            vec![Zero {
                at: lo,
                value: v,
                kind: ZeroKind::Touch,
            }]
        } else {
            Vec::new()
        };
    }
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out: Vec<Zero> = Vec::new();
    let is_zero = |v: f64| v.abs() <= touch_tol;

    for (i, (&x, &v)) in xs.iter().zip(&fs).enumerate() {
        if !is_zero(v) {
            continue;
        }
        let left = (0..i).rev().map(|k| fs[k]).find(|w| !is_zero(*w));
        let right = (i + 1..n).map(|k| fs[k]).find(|w| !is_zero(*w));
        let kind = match (left, right) {
            (Some(a), Some(b)) if (a < 0.0) != (b < 0.0) => ZeroKind::SignChange,
            _ => ZeroKind::Touch,
        };
        out.push(Zero {
            at: x,
            value: v,
            kind,
        });
    }

    for i in 0..n - 1 {
        let (a, b) = (fs[i], fs[i + 1]);
        if is_zero(a) || is_zero(b) {
            continue;
        }
        if (a < 0.0) != (b < 0.0) {
            let at = bisect(f, xs[i], xs[i + 1]);
            out.push(Zero {
                at,
                value: f(at),
                kind: ZeroKind::SignChange,
            });
        }
    }

    // Tangential zeros hide between samples as local minima of |f|.
    for i in 1..n - 1 {
        let (a, b, c) = (fs[i - 1].abs(), fs[i].abs(), fs[i + 1].abs());
        let same_sign = (fs[i - 1] < 0.0) == (fs[i] < 0.0) && (fs[i] < 0.0) == (fs[i + 1] < 0.0);
        if b <= a && b <= c && same_sign && !is_zero(fs[i]) {
            let at = golden_min(&|x: f64| f(x).abs(), xs[i - 1], xs[i + 1]);
            let v = f(at);
            if is_zero(v) {
                out.push(Zero {
                    at,
                    value: v,
                    kind: ZeroKind::Touch,
                });
            }
        }
    }

    out.sort_by(|p, q| p.at.total_cmp(&q.at));
    out.dedup_by(|p, q| (p.at - q.at).abs() < 1e-7);
    out
}
