//! Simultaneous (Aberth–Ehrlich) iteration for all complex zeros of a
//! rational polynomial, plus exact recovery of zeros that happen to be
//! rational.

use std::f64::consts::PI;

use dashu_ratio::RBig;
use num_complex::Complex64;
use thiserror::Error;

use crate::exact::Rational;
use crate::poly::RationalPolynomial;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Residual tolerance relative to `Σ |c_i| |z|^i`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 200,
        }
    }
}

/// Zeros with their residuals, ordered by `(re, im)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<Complex64>,
    /// `|P(z)| / Σ |c_i| |z|^i` for each zero.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl ZeroSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("the zero polynomial has no isolated zeros")]
    ZeroPolynomial,
    #[error("a constant polynomial has no zeros")]
    Constant,
    #[error("polynomial vanishes at the origin")]
    ZeroAtOrigin,
    #[error("zero finding did not converge in {} iterations (max residual {:.3e})", .best.iterations, .best.max_residual())]
    NotConverged { best: ZeroSet },
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn relative_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = horner(coeffs, z);
    let scale: f64 = coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * z.norm() + c.norm());
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

/// All complex zeros of `p`, with multiplicity.
pub fn find_zeros(p: &RationalPolynomial, opts: RootOptions) -> Result<ZeroSet, RootError> {
    let degree = match p.degree() {
        None => return Err(RootError::ZeroPolynomial),
        Some(0) => return Err(RootError::Constant),
        Some(d) => d,
    };
    if p.coeff(0) == RBig::ZERO {
        return Err(RootError::ZeroAtOrigin);
    }
    let coeffs: Vec<Complex64> = p
        .to_f64_coeffs()
        .into_iter()
        .map(|c| Complex64::new(c, 0.0))
        .collect();
    let lead = coeffs[degree];
    let radius = 1.0
        + coeffs[..degree]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut zeros: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let z = zeros[i];
            let (pz, dpz) = horner(&coeffs, z);
            if pz.norm() == 0.0 {
                continue;
            }
            let ratio = pz / dpz;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z - zeros[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                zeros[i] = z - step;
                max_step = max_step.max(step.norm() / z.norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }

    // Newton polish; the iteration above already sits within a few ulps.
    for z in zeros.iter_mut() {
        for _ in 0..3 {
            let (pz, dpz) = horner(&coeffs, *z);
            if dpz.norm() == 0.0 {
                break;
            }
            let next = *z - pz / dpz;
            if next.is_finite() && relative_residual(&coeffs, next) <= relative_residual(&coeffs, *z) {
                *z = next;
            } else {
                break;
            }
        }
    }

    symmetrize_conjugates(&mut zeros);
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let residuals: Vec<f64> = zeros.iter().map(|z| relative_residual(&coeffs, *z)).collect();
    let set = ZeroSet {
        zeros,
        residuals,
        iterations,
    };
    // a stalled iteration is still accepted when the residuals are small
    if set.max_residual() > opts.tol {
        return Err(RootError::NotConverged { best: set });
    }
    Ok(set)
}

/// Real coefficients force zeros to be real or to come in conjugate pairs;
/// snap numerically-real zeros to the axis and average conjugate partners.
fn symmetrize_conjugates(zeros: &mut [Complex64]) {
    let n = zeros.len();
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] {
            continue;
        }
        let z = zeros[i];
        let scale = z.norm().max(1e-300);
        if z.im.abs() <= 1e-10 * scale {
            zeros[i].im = 0.0;
            paired[i] = true;
            continue;
        }
        let partner = (0..n)
            .filter(|&j| j != i && !paired[j])
            .min_by(|&a, &b| {
                (zeros[a] - z.conj())
                    .norm()
                    .total_cmp(&(zeros[b] - z.conj()).norm())
            });
        if let Some(j) = partner {
            if (zeros[j] - z.conj()).norm() <= 1e-6 * scale {
                let avg = (z + zeros[j].conj()) * 0.5;
                zeros[i] = avg;
                zeros[j] = avg.conj();
                paired[i] = true;
                paired[j] = true;
            }
        }
    }
}

/// Rational zeros of `p` recovered exactly: each numerically real zero is
/// replaced by the simplest rational in a small window around it and kept
/// only if `p` vanishes there exactly. Distinct values, ascending.
pub fn rational_zeros(p: &RationalPolynomial, zeros: &ZeroSet) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    for z in &zeros.zeros {
        if z.im != 0.0 {
            continue;
        }
        let width = 1e-9 * z.re.abs().max(1.0);
        let (Ok(lo), Ok(hi)) = (RBig::try_from(z.re - width), RBig::try_from(z.re + width)) else {
            continue;
        };
        let candidate = RBig::simplest_in(lo, hi);
        if p.eval(&candidate) == RBig::ZERO && !out.contains(&candidate) {
            out.push(candidate);
        }
    }
    out.sort();
    out
}
