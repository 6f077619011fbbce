//! Deterministic reductions.

#[allow(unused_imports)]
use num_traits::Float;

const LEAF: usize = 256;

/// Pairwise (fixed-tree) summation. The reduction tree depends only on the
/// slice length, so results are bit-stable for a given input.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        s
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// Pairwise sum of `f(i)` for `i in 0..n` without materializing the terms.
pub fn pairwise_sum_by(n: usize, f: &mut impl FnMut(usize) -> f64) -> f64 {
    fn rec(lo: usize, hi: usize, f: &mut impl FnMut(usize) -> f64) -> f64 {
        if hi - lo <= LEAF {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            s
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, f) + rec(mid, hi, f)
        }
    }
    rec(0, n, f)
}

/// `ln Σ exp(x_i)`, stable for very negative inputs.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = xs.into_iter().map(|x| (x - max).exp()).sum();
    max + s.ln()
}

/// Volume of the Euclidean ball of radius `r` in dimension `dim` (2, 3 or 4).
pub fn ball_volume(dim: usize, r: f64) -> f64 {
    use core::f64::consts::PI;
    match dim {
        2 => PI * r * r,
        3 => 4.0 / 3.0 * PI * r * r * r,
        4 => 0.5 * PI * PI * r.powi(4),
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// Five-point discrete Laplacian of `f` at `(x, y)` with step `h`.
pub fn five_point_laplacian(f: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
    (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h)
}
