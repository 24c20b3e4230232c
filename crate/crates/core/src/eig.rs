//! Eigenvalues of dense real non-symmetric matrices and exact trace powers.
//!
//! The eigensolver is the classical pipeline: diagonal balancing, Householder
//! reduction to upper Hessenberg form, then Francis implicit double-shift QR
//! with deflation. Complex conjugate pairs come out of converged 2x2 blocks,
//! so the iteration itself stays in real arithmetic.
//!
//! [`trace_powers`] never touches the eigensolver; the two paths are used to
//! cross-check each other.

use num_complex::Complex64;

use crate::matrix::Matrix;
use crate::{Error, Result};

/// Deflation threshold relative to the neighbouring diagonal entries.
pub const DEFLATION_EPS: f64 = 8.0 * f64::EPSILON;

/// Stalled sweeps between exceptional shifts.
pub const EXCEPTIONAL_SHIFT_PERIOD: usize = 10;

pub fn default_max_sweeps(n: usize) -> usize {
    30 * n.max(1)
}

/// Eigenvalues of a real matrix plus solver diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<Complex64>,
    /// Total QR sweeps over all deflations.
    pub iterations: usize,
    pub converged: bool,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    /// `sum_i lambda_i^k`.
    pub fn power_sum(&self, k: u32) -> Complex64 {
        self.values.iter().map(|z| z.powu(k)).sum()
    }
}

/// Parlett–Reinsch diagonal scaling by powers of two. Returns the scaled
/// matrix, which is similar to the input and exactly representable.
pub fn balance(mat: &Matrix) -> Matrix {
    const RADIX: f64 = 2.0;
    const RADIX_SQ: f64 = RADIX * RADIX;
    let n = mat.order();
    let mut a = mat.clone();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX_SQ;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX_SQ;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
    a
}

/// Upper Hessenberg form by Householder similarity transforms.
pub fn hessenberg(mat: &Matrix) -> Matrix {
    let n = mat.order();
    let mut h = mat.clone();
    if n < 3 {
        return h;
    }
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n - 2 {
        // Reflector annihilating h[k+2.., k].
        let scale: f64 = (k + 1..n).map(|i| h[(i, k)].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut norm_sq = 0.0;
        for i in k + 1..n {
            v[i] = h[(i, k)] / scale;
            norm_sq += v[i] * v[i];
        }
        let alpha = if v[k + 1] > 0.0 { -norm_sq.sqrt() } else { norm_sq.sqrt() };
        let tail_sq = norm_sq - v[k + 1] * v[k + 1];
        if tail_sq == 0.0 {
            continue;
        }
        v[k + 1] -= alpha;
        let vnorm_sq = tail_sq + v[k + 1] * v[k + 1];
        let beta = 2.0 / vnorm_sq;

        // Left: rows k+1.., columns k.. ; w = v^T H accumulated row by row.
        w[k..n].fill(0.0);
        for i in k + 1..n {
            let vi = v[i];
            let row = h.row(i);
            for j in k..n {
                w[j] += vi * row[j];
            }
        }
        for i in k + 1..n {
            let f = beta * v[i];
            let row = &mut h.as_mut_slice()[i * n..(i + 1) * n];
            for j in k..n {
                row[j] -= f * w[j];
            }
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let row = &mut h.as_mut_slice()[i * n..(i + 1) * n];
            let mut dot = 0.0;
            for j in k + 1..n {
                dot += row[j] * v[j];
            }
            let f = beta * dot;
            for j in k + 1..n {
                row[j] -= f * v[j];
            }
        }
        h[(k + 1, k)] = alpha * scale;
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    h
}

/// Full eigenvalue multiset of `mat`.
///
/// `max_sweeps` caps the QR sweeps spent on any single deflation. If a block
/// fails to split within that cap the result is returned with
/// `converged == false`; the eigenvalues of the unreduced window are then
/// reported as its diagonal entries.
pub fn eigenvalues(mat: &Matrix, max_sweeps: usize) -> Result<Spectrum> {
    let n = mat.order();
    if n == 0 {
        return Err(Error::InvalidDimension("eigenvalues of an empty matrix".into()));
    }
    if !mat.is_finite() {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let mut h = hessenberg(&balance(mat));
    Ok(francis_qr(&mut h, max_sweeps))
}

pub fn eigenvalues_default(mat: &Matrix) -> Result<Spectrum> {
    eigenvalues(mat, default_max_sweeps(mat.order()))
}

/// Implicit double-shift QR on an upper Hessenberg matrix, eigenvalues only.
fn francis_qr(h: &mut Matrix, max_sweeps: usize) -> Spectrum {
    let n = h.order();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut norm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            norm += h[(i, j)].abs();
        }
    }

    let mut exshift = 0.0;
    let mut iter = 0usize;
    let mut total = 0usize;
    let mut converged = true;
    // Active window is rows/columns lo..=hi; hi is signed so it can drop below 0.
    let mut hi = n as isize - 1;

    while hi >= 0 {
        let en = hi as usize;
        let mut l = en;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() <= DEFLATION_EPS * s {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }

        if l == en {
            wr[en] = h[(en, en)] + exshift;
            wi[en] = 0.0;
            hi -= 1;
            iter = 0;
            continue;
        }
        if l + 1 == en {
            let na = en - 1;
            let w = h[(en, na)] * h[(na, en)];
            let p = (h[(na, na)] - h[(en, en)]) / 2.0;
            let q = p * p + w;
            let z = q.abs().sqrt();
            let x = h[(en, en)] + exshift;
            if q >= 0.0 {
                let z = if p >= 0.0 { p + z } else { p - z };
                wr[na] = x + z;
                wr[en] = if z != 0.0 { x - w / z } else { wr[na] };
                wi[na] = 0.0;
                wi[en] = 0.0;
            } else {
                wr[na] = x + p;
                wr[en] = x + p;
                wi[na] = z;
                wi[en] = -z;
            }
            hi -= 2;
            iter = 0;
            continue;
        }

        if iter >= max_sweeps {
            converged = false;
            for i in 0..=en {
                wr[i] = h[(i, i)] + exshift;
                wi[i] = 0.0;
            }
            break;
        }

        let mut x = h[(en, en)];
        let mut y = h[(en - 1, en - 1)];
        let mut w = h[(en, en - 1)] * h[(en - 1, en)];

        if iter > 0 && iter % EXCEPTIONAL_SHIFT_PERIOD == 0 {
            if (iter / EXCEPTIONAL_SHIFT_PERIOD) % 2 == 1 {
                exshift += x;
                for i in 0..=en {
                    h[(i, i)] -= x;
                }
                let s = h[(en, en - 1)].abs() + h[(en - 1, en - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            } else {
                let mut s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=en {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
        }
        iter += 1;
        total += 1;

        // Look for two consecutive small subdiagonal entries.
        let mut m = en - 2;
        let (mut p, mut q, mut r);
        loop {
            let z = h[(m, m)];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / h[(m + 1, m)] + h[(m, m + 1)];
            q = h[(m + 1, m + 1)] - z - rr - ss;
            r = h[(m + 2, m + 1)];
            let s = p.abs() + q.abs() + r.abs();
            p /= s;
            q /= s;
            r /= s;
            if m == l {
                break;
            }
            let lhs = h[(m, m - 1)].abs() * (q.abs() + r.abs());
            let rhs = DEFLATION_EPS * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()));
            if lhs < rhs {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=en {
            h[(i, i - 2)] = 0.0;
            if i > m + 2 {
                h[(i, i - 3)] = 0.0;
            }
        }

        // Double QR step on rows l..=en, columns m..=en.
        for k in m..en {
            let not_last = k != en - 1;
            let mut xk = 0.0;
            if k != m {
                p = h[(k, k - 1)];
                q = h[(k + 1, k - 1)];
                r = if not_last { h[(k + 2, k - 1)] } else { 0.0 };
                xk = p.abs() + q.abs() + r.abs();
                if xk == 0.0 {
                    continue;
                }
                p /= xk;
                q /= xk;
                r /= xk;
            }
            let mut s = (p * p + q * q + r * r).sqrt();
            if p < 0.0 {
                s = -s;
            }
            if s == 0.0 {
                continue;
            }
            if k != m {
                h[(k, k - 1)] = -s * xk;
            } else if l != m {
                h[(k, k - 1)] = -h[(k, k - 1)];
            }
            p += s;
            let xr = p / s;
            let yr = q / s;
            let zr = r / s;
            q /= p;
            r /= p;

            for j in k..=en {
                let mut pp = h[(k, j)] + q * h[(k + 1, j)];
                if not_last {
                    pp += r * h[(k + 2, j)];
                    h[(k + 2, j)] -= pp * zr;
                }
                h[(k, j)] -= pp * xr;
                h[(k + 1, j)] -= pp * yr;
            }
            let top = en.min(k + 3);
            for i in l..=top {
                let mut pp = xr * h[(i, k)] + yr * h[(i, k + 1)];
                if not_last {
                    pp += zr * h[(i, k + 2)];
                    h[(i, k + 2)] -= pp * r;
                }
                h[(i, k)] -= pp;
                h[(i, k + 1)] -= pp * q;
            }
        }
    }

    Spectrum {
        values: wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect(),
        iterations: total,
        converged,
    }
}

/// `[Tr M, Tr M^2, ..., Tr M^k_max]` by repeated multiplication.
///
/// Only the powers up to `ceil(k_max/2)` are formed; `Tr M^(a+b)` is then the
/// elementwise pairing `sum_ij (M^a)_ij (M^b)_ji`.
pub fn trace_powers(mat: &Matrix, k_max: usize) -> Vec<f64> {
    if k_max == 0 {
        return Vec::new();
    }
    let half = k_max.div_ceil(2);
    let mut powers = Vec::with_capacity(half);
    powers.push(mat.clone());
    for _ in 1..half {
        let next = powers.last().unwrap().matmul(mat);
        powers.push(next);
    }
    (1..=k_max)
        .map(|k| {
            if k == 1 {
                return mat.trace();
            }
            let a = k.div_ceil(2);
            let b = k - a;
            powers[a - 1].trace_of_product(&powers[b - 1])
        })
        .collect()
}

/// `Tr(M^k)`; `k == 0` gives the order of the matrix.
pub fn trace_power(mat: &Matrix, k: usize) -> f64 {
    if k == 0 {
        return mat.order() as f64;
    }
    trace_powers(mat, k)[k - 1]
}

/// Fraction of eigenvalues with modulus at most `r`, for each radius in `grid`.
pub fn spectral_radial_cdf(spec: &Spectrum, grid: &[f64]) -> Vec<f64> {
    let mut moduli: Vec<f64> = spec.values.iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    let total = moduli.len().max(1) as f64;
    grid.iter()
        .map(|&r| moduli.partition_point(|&m| m <= r) as f64 / total)
        .collect()
}

/// Pairs two equally sized multisets by a minimum total-distance assignment
/// and returns the largest distance within the matching.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have the same size");
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let cost = |i: usize, j: usize| (a[i] - b[j]).norm();
    let assignment = hungarian(n, cost);
    assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost(i, j))
        .fold(0.0, f64::max)
}

// Kuhn–Munkres with potentials, O(n^3). Returns row -> column.
fn hungarian(n: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut rows = vec![0; n];
    for j in 1..=n {
        rows[p[j] - 1] = j - 1;
    }
    rows
}
