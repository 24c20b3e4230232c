//! Limiting variance of polynomial linear eigenvalue statistics.
//!
//! Two routes are provided: the closed form `sum_k 2k |a_k|^2` and a double
//! contour integral of `f(z) conj(f)(eta) K(z, eta)` over two circles,
//! evaluated with the periodic trapezoid rule. Two kernels are supported: the
//! full displayed kernel ([`KernelVariant::Paper`]) and its diagonal part
//! `2 (1 - z eta)^{-2}` ([`KernelVariant::Diagonal`]), generated by the
//! `Var(Tr M^k) = 2k` terms alone.
//!
//! The kernels are Laurent series in `1/z`, `1/eta` that converge only for
//! `|z eta| > 1`, so the contours sit on a circle of radius strictly above one.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::poly::Polynomial;
use crate::sum::{pairwise_reduce, NeumaierSum};
use crate::{Error, Result};

/// Distance below which an argument is treated as sitting on a pole.
pub const POLE_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_RADIUS: f64 = 1.5;
pub const DEFAULT_NODES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelVariant {
    /// `2(1-w)^{-2} + 4/(w(w^2-1)) + 4(1/(w(z-1)(eta-1)) - 1/(w(w-1)))`, `w = z eta`.
    Paper,
    /// `2(1-w)^{-2}`.
    Diagonal,
}

impl KernelVariant {
    pub const ALL: [KernelVariant; 2] = [KernelVariant::Paper, KernelVariant::Diagonal];

    pub fn as_str(&self) -> &'static str {
        match self {
            KernelVariant::Paper => "paper_kernel",
            KernelVariant::Diagonal => "diagonal_kernel",
        }
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `sum_{k>=1} 2k |a_k|^2`; the constant term does not fluctuate.
pub fn closed_form_variance(f: &Polynomial) -> f64 {
    f.coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| 2.0 * k as f64 * a.norm_sqr())
        .sum()
}

fn near(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < POLE_TOLERANCE
}

pub fn kernel_eval(z: Complex64, eta_bar: Complex64, variant: KernelVariant) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let w = z * eta_bar;
    let mut excluded = vec![("z*eta", w, Complex64::new(0.0, 0.0)), ("z*eta", w, one), ("z*eta", w, -one)];
    if variant == KernelVariant::Paper {
        excluded.push(("z", z, one));
        excluded.push(("eta", eta_bar, one));
    }
    for (name, value, pole) in excluded {
        if near(value, pole) {
            return Err(Error::Singularity(format!("{name} = {value} is within {POLE_TOLERANCE:e} of {pole}")));
        }
    }
    if (w.norm() - 1.0).abs() < POLE_TOLERANCE {
        return Err(Error::Singularity(format!(
            "|z*eta| = {} is on the unit circle, where the kernel series diverge",
            w.norm()
        )));
    }
    let diagonal = 2.0 / ((one - w) * (one - w));
    Ok(match variant {
        KernelVariant::Diagonal => diagonal,
        KernelVariant::Paper => {
            let even = 4.0 / (w * (w * w - one));
            let cross = 4.0 * (one / (w * (z - one) * (eta_bar - one)) - one / (w * (w - one)));
            diagonal + even + cross
        }
    })
}

/// Trapezoid-rule value of the double contour integral.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    pub variant: KernelVariant,
    pub radius: f64,
    pub nodes: usize,
    pub value: Complex64,
    /// Set when `nodes < 4(d+1)`.
    pub warning: Option<String>,
}

pub fn min_nodes(f: &Polynomial) -> usize {
    4 * (f.degree() + 1)
}

/// `-(1/4 pi^2) oint oint f(z) conj(f)(eta) K(z, eta) dz deta` with both
/// circles of radius `radius` traversed counter-clockwise.
///
/// The counter-clockwise orientation on both variables is the one for which
/// the diagonal kernel reproduces [`closed_form_variance`] on `f(z) = z`; it is
/// fixed here and not a parameter. With `z = r e^{i theta}` the prefactor and
/// `dz deta = -z eta dtheta dphi` combine to the plain node average of
/// `f(z) g(eta) K z eta`.
pub fn contour_variance(f: &Polynomial, variant: KernelVariant, radius: f64, nodes: usize) -> Result<Quadrature> {
    if !(radius.is_finite() && radius > 1.0) {
        return Err(Error::Config(format!("contour radius must exceed 1, got {radius}")));
    }
    if nodes == 0 {
        return Err(Error::Config("quadrature needs at least one node".into()));
    }
    let g = f.conj_coeffs();
    let points: Vec<Complex64> = (0..nodes)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / nodes as f64))
        .collect();
    let f_vals: Vec<Complex64> = points.iter().map(|&z| f.eval(z) * z).collect();
    let g_vals: Vec<Complex64> = points.iter().map(|&e| g.eval(e) * e).collect();

    let rows: Vec<(NeumaierSum, NeumaierSum)> = points
        .par_iter()
        .zip(&f_vals)
        .map(|(&z, &fz)| {
            let mut re = NeumaierSum::new();
            let mut im = NeumaierSum::new();
            for (&eta, &ge) in points.iter().zip(&g_vals) {
                let term = fz * ge * kernel_eval(z, eta, variant)?;
                re.add(term.re);
                im.add(term.im);
            }
            Ok((re, im))
        })
        .collect::<Result<_>>()?;
    let (re_parts, im_parts): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let scale = 1.0 / (nodes as f64 * nodes as f64);
    let value = Complex64::new(pairwise_reduce(&re_parts).value(), pairwise_reduce(&im_parts).value()) * scale;

    let needed = min_nodes(f);
    let warning = (nodes < needed).then(|| {
        format!("{nodes} nodes is below 4(d+1) = {needed} for degree {}; result may be inaccurate", f.degree())
    });
    Ok(Quadrature {
        variant,
        radius,
        nodes,
        value,
        warning,
    })
}

/// Partial sums of the Laurent expansion of the kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesCheck {
    /// All three series truncated at `k_max`.
    pub full: Complex64,
    /// Bound on the modulus of the omitted terms of `full`.
    pub full_tail_bound: f64,
    /// `2 sum_{k<=k_max} k w^{-k-1}` alone.
    pub diagonal: Complex64,
    pub diagonal_tail_bound: f64,
}

/// Truncates `2 sum k w^{-k-1} + 4 sum_{k even} w^{-k-1} + 4 sum_{k != l}
/// z^{-k-1} eta^{-l-1}` (with `w = z eta`) at `k, l <= k_max`.
pub fn resolvent_series_check(k_max: usize, z: Complex64, eta_bar: Complex64) -> Result<SeriesCheck> {
    if z.norm() <= 1.0 || eta_bar.norm() <= 1.0 {
        return Err(Error::Config("series check needs |z| > 1 and |eta| > 1".into()));
    }
    if k_max < 2 {
        return Err(Error::Config("series check needs k_max >= 2".into()));
    }
    let zi = z.inv();
    let ei = eta_bar.inv();
    let wi = zi * ei;

    let mut diagonal = Complex64::new(0.0, 0.0);
    let mut even = Complex64::new(0.0, 0.0);
    let mut wp = wi; // w^{-k-1}, starting at k = 1 below
    for k in 1..=k_max {
        wp *= wi;
        diagonal += 2.0 * k as f64 * wp;
        if k % 2 == 0 {
            even += 4.0 * wp;
        }
    }
    // Cross series: all pairs minus the diagonal k = l.
    let zs: Vec<Complex64> = (1..=k_max).map(|k| zi.powu(k as u32 + 1)).collect();
    let es: Vec<Complex64> = (1..=k_max).map(|k| ei.powu(k as u32 + 1)).collect();
    let mut cross = Complex64::new(0.0, 0.0);
    for (k, zk) in zs.iter().enumerate() {
        for (l, el) in es.iter().enumerate() {
            if k != l {
                cross += zk * el;
            }
        }
    }
    cross *= 4.0;

    let a = zi.norm();
    let b = ei.norm();
    let c = a * b;
    let big_k = k_max as i32;
    let kf = k_max as f64;
    // sum_{k>K} k c^{k+1} = c^2 [(K+1) c^K (1-c) + c^{K+1}] / (1-c)^2
    let diag_tail = 2.0 * c * c * ((kf + 1.0) * c.powi(big_k) * (1.0 - c) + c.powi(big_k + 1)) / ((1.0 - c) * (1.0 - c));
    let even_tail = 4.0 * c.powi(big_k + 2) / (1.0 - c * c);
    let geo = |x: f64| x * x / (1.0 - x);
    let geo_trunc = |x: f64| x * x * (1.0 - x.powi(big_k)) / (1.0 - x);
    let cross_tail = 4.0 * (geo(a) * geo(b) - geo_trunc(a) * geo_trunc(b));

    Ok(SeriesCheck {
        full: diagonal + even + cross,
        full_tail_bound: diag_tail + even_tail + cross_tail,
        diagonal,
        diagonal_tail_bound: diag_tail,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceReport {
    pub f: Polynomial,
    pub closed_form: f64,
    pub quadrature: Vec<Quadrature>,
}

impl VarianceReport {
    pub fn discrepancy(&self, variant: KernelVariant) -> Option<f64> {
        self.quadrature
            .iter()
            .find(|q| q.variant == variant)
            .map(|q| (q.value - Complex64::new(self.closed_form, 0.0)).norm())
    }
}

/// Closed form plus both kernel quadratures.
pub fn variance_report(f: &Polynomial, radius: f64, nodes: usize) -> Result<VarianceReport> {
    let quadrature = KernelVariant::ALL
        .iter()
        .map(|&v| contour_variance(f, v, radius, nodes))
        .collect::<Result<Vec<_>>>()?;
    Ok(VarianceReport {
        f: f.clone(),
        closed_form: closed_form_variance(f),
        quadrature,
    })
}
