//! Levin u-transform of a sequence of partial sums.
//!
//! With `s_n = a_0 + ... + a_n` and remainder estimates `ω_n = (n + 1) a_n`,
//!
//! ```text
//! L_k = Σ_j (-1)^j C(k,j) (n0+j+1)^(k-1) s_{n0+j} / ω_{n0+j}
//!       ---------------------------------------------------
//!       Σ_j (-1)^j C(k,j) (n0+j+1)^(k-1) / ω_{n0+j}
//! ```
//!
//! It handles the logarithmic convergence of unit-argument series
//! (`a_n ~ n^(-1-s)`) as well as linear convergence.

use dashu_int::IBig;

use crate::exact::binomial;
use crate::real::{self, Real};

/// `L_k` built from `s_{n0}, ..., s_{n0+k}`. `None` if a term is zero or the
/// denominator cancels exactly.
pub fn levin_u(sums: &[Real], terms: &[Real], n0: usize, k: usize, precision: usize) -> Option<Real> {
    if n0 + k >= sums.len() || n0 + k >= terms.len() {
        return None;
    }
    let mut num = real::zero(precision);
    let mut den = real::zero(precision);
    for j in 0..=k {
        let n = n0 + j;
        if real::is_zero(&terms[n]) {
            return None;
        }
        let omega = terms[n].clone() * real::from_int(n as i64 + 1, precision);
        let weight = IBig::from(binomial(k, j)) * IBig::from(n as i64 + 1).pow(k.saturating_sub(1));
        let weight = real::from_int(if j % 2 == 0 { weight } else { -weight }, precision);
        let w_over = weight / omega;
        num += w_over.clone() * &sums[n];
        den += w_over;
    }
    if real::is_zero(&den) {
        return None;
    }
    Some(num / den)
}

/// All estimates `L_1, ..., L_kmax` that the available data supports.
pub fn levin_u_table(sums: &[Real], terms: &[Real], n0: usize, kmax: usize, precision: usize) -> Vec<Real> {
    (1..=kmax)
        .map_while(|k| levin_u(sums, terms, n0, k, precision))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn accelerates_zeta_two() {
        // Σ 1/(n+1)^2 = π²/6 converges like 1/n
        let p = 256;
        let mut sums = Vec::new();
        let mut terms = Vec::new();
        let mut s = real::zero(p);
        for n in 0..40 {
            let t = real::one(p) / real::from_rational(&int((n + 1) * (n + 1)), p);
            s += &t;
            terms.push(t);
            sums.push(s.clone());
        }
        let pi = Real::pi(p);
        let exact = pi.clone() * pi / real::from_int(6, p);
        let table = levin_u_table(&sums, &terms, 0, 30, p);
        let best = table.last().unwrap();
        let err = real::to_f64(&real::abs(&(best.clone() - &exact)));
        assert!(err < 1e-25, "levin error {err}");
        let direct = real::to_f64(&real::abs(&(sums[39].clone() - exact)));
        assert!(direct > 1e-3);
    }

    #[test]
    fn zero_term_rejected() {
        let p = 64;
        let terms = vec![real::one(p), real::zero(p), real::one(p)];
        let sums = vec![real::one(p), real::one(p), real::from_int(2, p)];
        assert!(levin_u(&sums, &terms, 0, 2, p).is_none());
        assert!(levin_u(&sums, &terms, 2, 0, p).is_some());
    }
}
