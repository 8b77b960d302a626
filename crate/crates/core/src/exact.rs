//! Exact rational machinery: Pochhammer symbols, Stirling numbers of the
//! second kind, and the coefficient sequences attached to a list of
//! integer-shifted parameter pairs `(f_j + m_j) / (f_j)`.
//!
//! Everything here is exact. Floating point only enters in [`crate::series`].

use std::fmt;
use std::str::FromStr;

use dashu_int::{IBig, UBig};
use dashu_ratio::RBig;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = RBig;

/// Shorthand for the rational `num / den`.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    RBig::from_parts_signed(IBig::from(num), IBig::from(den))
}

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> Rational {
    RBig::from(IBig::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational `{input}`: expected an integer or `p/q`")]
pub struct ParseRationalError {
    pub input: String,
}

/// Parses `"p/q"` or `"p"` (optionally signed) into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: s.to_string() };
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let valid = |x: &str, signed: bool| {
        let digits = if signed { x.strip_prefix(['-', '+']).unwrap_or(x) } else { x };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return Err(err());
    }
    let num = IBig::from_str(num.strip_prefix('+').unwrap_or(num)).map_err(|_| err())?;
    let den = UBig::from_str(den).map_err(|_| err())?;
    if den == UBig::ZERO {
        return Err(err());
    }
    Ok(RBig::from_parts(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if *q.denominator() == UBig::ONE {
        q.numerator().to_string()
    } else {
        format!("{}/{}", q.numerator(), q.denominator())
    }
}

/// Returns `Some(n)` when `q` equals the nonpositive integer `-n`.
pub fn nonpositive_integer(q: &Rational) -> Option<u64> {
    if *q.denominator() != UBig::ONE || q.numerator() > &IBig::ZERO {
        return None;
    }
    u64::try_from(-q.numerator().clone()).ok()
}

/// Product of rationals; the empty product is 1.
pub fn product<I: IntoIterator<Item = Rational>>(items: I) -> Rational {
    items.into_iter().fold(RBig::ONE, |acc, x| acc * x)
}

/// Sum of rationals; the empty sum is 0.
pub fn sum<I: IntoIterator<Item = Rational>>(items: I) -> Rational {
    items.into_iter().fold(RBig::ZERO, |acc, x| acc + x)
}

pub(crate) fn is_integer(q: &Rational) -> bool {
    *q.denominator() == UBig::ONE
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = v.iter().map(format_rational).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &Rational, n: usize) -> Rational {
    let mut acc = RBig::ONE;
    let mut x = a.clone();
    for _ in 0..n {
        if x == RBig::ZERO {
            return RBig::ZERO;
        }
        acc *= &x;
        x += RBig::ONE;
    }
    acc
}

/// `((a_p))_k = (a_1)_k ... (a_p)_k`; the empty product is 1.
pub fn pochhammer_product(params: &[Rational], k: usize) -> Rational {
    product(params.iter().map(|a| pochhammer(a, k)))
}

/// Binomial coefficient `C(n, k)` as an exact integer.
pub fn binomial(n: usize, k: usize) -> UBig {
    if k > n {
        return UBig::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = UBig::ONE;
    for i in 0..k {
        acc = acc * UBig::from(n - i) / UBig::from(i + 1);
    }
    acc
}

/// Stirling number of the second kind `S(j, k)`.
pub fn stirling2(j: usize, k: usize) -> UBig {
    if k > j {
        return UBig::ZERO;
    }
    stirling2_table(j)[j][k].clone()
}

/// Rows `0..=n` of the `S(j, k)` triangle, built from
/// `S(j, k) = k S(j-1, k) + S(j-1, k-1)`.
pub fn stirling2_table(n: usize) -> Vec<Vec<UBig>> {
    let mut rows: Vec<Vec<UBig>> = Vec::with_capacity(n + 1);
    rows.push(vec![UBig::ONE]);
    for j in 1..=n {
        let prev = &rows[j - 1];
        let mut row = vec![UBig::ZERO; j + 1];
        for k in 1..=j {
            let stay = if k < j { prev[k].clone() * UBig::from(k) } else { UBig::ZERO };
            row[k] = stay + &prev[k - 1];
        }
        rows.push(row);
    }
    rows
}

/// One numerator/denominator pair `(f + m) / f` with `m >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamPair {
    #[serde(with = "serde_rational")]
    pub f: Rational,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamPairsError {
    #[error("pair {index}: offset m must be a positive integer")]
    ZeroOffset { index: usize },
    #[error("pair {index}: (f)_m vanishes, so the product of base Pochhammer symbols is zero")]
    VanishingBase { index: usize },
    #[error("malformed pair `{0}`: expected `f:m` with rational f and positive integer m")]
    Malformed(String),
}

/// The sequence of pairs `(f_1, m_1), ..., (f_r, m_r)`.
///
/// `r = 0` is allowed and gives `m = 0` and a base product of 1.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<ParamPair>", into = "Vec<ParamPair>")]
pub struct ParamPairs {
    pairs: Vec<ParamPair>,
}

impl TryFrom<Vec<ParamPair>> for ParamPairs {
    type Error = ParamPairsError;

    fn try_from(pairs: Vec<ParamPair>) -> Result<Self, Self::Error> {
        for (index, p) in pairs.iter().enumerate() {
            if p.m == 0 {
                return Err(ParamPairsError::ZeroOffset { index });
            }
            if pochhammer(&p.f, p.m as usize) == RBig::ZERO {
                return Err(ParamPairsError::VanishingBase { index });
            }
        }
        Ok(Self { pairs })
    }
}

impl From<ParamPairs> for Vec<ParamPair> {
    fn from(pp: ParamPairs) -> Self {
        pp.pairs
    }
}

impl ParamPairs {
    pub fn new(pairs: impl IntoIterator<Item = (Rational, u32)>) -> Result<Self, ParamPairsError> {
        pairs
            .into_iter()
            .map(|(f, m)| ParamPair { f, m })
            .collect::<Vec<_>>()
            .try_into()
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Single pair `(f + m) / f`.
    pub fn single(f: Rational, m: u32) -> Result<Self, ParamPairsError> {
        Self::new([(f, m)])
    }

    pub fn pairs(&self) -> &[ParamPair] {
        &self.pairs
    }

    /// Number of pairs `r`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `m = m_1 + ... + m_r`.
    pub fn total_offset(&self) -> usize {
        self.pairs.iter().map(|p| p.m as usize).sum()
    }

    /// `Λ = (f_1)_{m_1} ... (f_r)_{m_r}`.
    pub fn base_product(&self) -> Rational {
        product(self.pairs.iter().map(|p| pochhammer(&p.f, p.m as usize)))
    }

    /// `(f_1 + x)_{m_1} ... (f_r + x)_{m_r}` at a rational point.
    pub fn shifted_product(&self, x: &Rational) -> Rational {
        product(self.pairs.iter().map(|p| pochhammer(&(&p.f + x), p.m as usize)))
    }

    /// The numerator parameters `f_j + m_j`.
    pub fn upper(&self) -> Vec<Rational> {
        self.pairs
            .iter()
            .map(|p| &p.f + int(p.m as i64))
            .collect()
    }

    /// The denominator parameters `f_j`.
    pub fn lower(&self) -> Vec<Rational> {
        self.pairs.iter().map(|p| p.f.clone()).collect()
    }

    /// Parses `f1:m1,f2:m2,...`; the empty string gives `r = 0`.
    pub fn parse(s: &str) -> Result<Self, ParamPairsError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let mut pairs = Vec::new();
        for item in s.split(',') {
            let malformed = || ParamPairsError::Malformed(item.to_string());
            let (f, m) = item.split_once(':').ok_or_else(malformed)?;
            let f = parse_rational(f).map_err(|_| malformed())?;
            let m: u32 = m.trim().parse().map_err(|_| malformed())?;
            pairs.push((f, m));
        }
        Self::new(pairs)
    }
}

impl fmt::Display for ParamPairs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .pairs
            .iter()
            .map(|p| format!("{}:{}", format_rational(&p.f), p.m))
            .collect();
        f.write_str(&items.join(","))
    }
}

/// Multiplies two ascending coefficient lists.
pub(crate) fn convolve(p: &[Rational], q: &[Rational]) -> Vec<Rational> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![RBig::ZERO; p.len() + q.len() - 1];
    for (i, x) in p.iter().enumerate() {
        if *x == RBig::ZERO {
            continue;
        }
        for (j, y) in q.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients `σ_0, ..., σ_m` of `(f_1 + x)_{m_1} ... (f_r + x)_{m_r}` in
/// powers of `x`, expanded by repeated multiplication by linear factors.
pub fn sigma_coefficients(pp: &ParamPairs) -> Vec<Rational> {
    let mut acc = vec![RBig::ONE];
    for p in pp.pairs() {
        for i in 0..p.m {
            acc = convolve(&acc, &[&p.f + int(i as i64), RBig::ONE]);
        }
    }
    acc
}

/// `C_k = (1/Λ) Σ_{j=k}^{m} σ_j S(j, k)` for `k = 0..=m`.
///
/// `ParamPairs` guarantees `Λ ≠ 0`, so this cannot fail.
pub fn c_coefficients(pp: &ParamPairs) -> Vec<Rational> {
    let sigma = sigma_coefficients(pp);
    let m = sigma.len() - 1;
    let lambda = &sigma[0];
    let table = stirling2_table(m);
    (0..=m)
        .map(|k| {
            sum((k..=m).map(|j| &sigma[j] * RBig::from(table[j][k].clone()))) / lambda
        })
        .collect()
}

/// `C_k` through the terminating unit-argument series
/// `((-1)^k / k!) Σ_{i=0}^{k} (-k)_i / i! Π_j (f_j + m_j)_i / (f_j)_i`.
///
/// Independent of [`c_coefficients`]; each ratio `(f+m)_i / (f)_i` is taken
/// as `(f+i)_m / (f)_m` so that no intermediate pole appears.
pub fn c_via_terminating_series(pp: &ParamPairs, k: usize) -> Rational {
    let minus_k = -int(k as i64);
    let lambda = pp.base_product();
    let mut sum = RBig::ZERO;
    for i in 0..=k {
        let ratio = pp.shifted_product(&int(i as i64)) / &lambda;
        sum += pochhammer(&minus_k, i) / pochhammer(&RBig::ONE, i) * ratio;
    }
    let sign = if k.is_multiple_of(2) { RBig::ONE } else { -RBig::ONE };
    sign * sum / pochhammer(&RBig::ONE, k)
}

/// Closed form for a single pair: `C_k = C(m, k) / (f)_k`.
pub fn c_single_pair_closed_form(f: &Rational, m: usize) -> Vec<Rational> {
    (0..=m)
        .map(|k| RBig::from(binomial(m, k)) / pochhammer(f, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&rat(7, 3), 0), RBig::ONE);
        assert_eq!(pochhammer(&rat(1, 2), 2), rat(3, 4));
        assert_eq!(pochhammer(&int(-3), 4), RBig::ZERO);
        assert_eq!(pochhammer(&int(-3), 3), int(-6));
    }

    #[test]
    fn pochhammer_product_examples() {
        assert_eq!(pochhammer_product(&[], 5), RBig::ONE);
        assert_eq!(pochhammer_product(&[int(1), int(2)], 2), int(12));
        assert_eq!(pochhammer_product(&[rat(1, 2)], 3), rat(15, 8));
    }

    fn partitions_into_blocks(n: usize, k: usize) -> u64 {
        // brute force: assign each element a block label, count surjective
        // labelings with canonical (first-occurrence ordered) labels
        let mut count = 0;
        let total = k.pow(n as u32);
        for code in 0..total {
            let mut labels = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                labels.push(c % k);
                c /= k;
            }
            let mut next = 0;
            let mut ok = true;
            for &l in &labels {
                if l > next {
                    ok = false;
                    break;
                }
                if l == next {
                    next += 1;
                }
            }
            if ok && next == k {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn stirling_examples() {
        for n in 0..=8 {
            assert_eq!(stirling2(n, n), UBig::ONE);
        }
        assert_eq!(stirling2(3, 2), UBig::from(3u8));
        assert_eq!(stirling2(4, 2), UBig::from(partitions_into_blocks(4, 2)));
        assert_eq!(stirling2(4, 2), UBig::from(7u8));
        assert_eq!(stirling2(5, 0), UBig::ZERO);
        assert_eq!(stirling2(0, 0), UBig::ONE);
        assert_eq!(stirling2(2, 5), UBig::ZERO);
        for n in 1..=6 {
            for k in 1..=n {
                assert_eq!(stirling2(n, k), UBig::from(partitions_into_blocks(n, k)));
            }
        }
    }

    #[test]
    fn stirling_falling_factorial_identity() {
        for j in 0..=6 {
            for x in 0..=6i64 {
                let mut total = IBig::ZERO;
                for k in 0..=j {
                    let falling: IBig = (0..k as i64).map(|i| IBig::from(x - i)).product();
                    total += IBig::from(stirling2(j, k)) * falling;
                }
                assert_eq!(total, IBig::from(x).pow(j));
            }
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_coefficients(&ParamPairs::empty()), vec![RBig::ONE]);
        let pp = ParamPairs::single(rat(1, 2), 2).unwrap();
        assert_eq!(sigma_coefficients(&pp), vec![rat(3, 4), int(2), int(1)]);
        let pp = ParamPairs::single(int(1), 1).unwrap();
        assert_eq!(sigma_coefficients(&pp), vec![int(1), int(1)]);
    }

    #[test]
    fn c_examples() {
        let pp = ParamPairs::single(rat(1, 2), 2).unwrap();
        assert_eq!(c_coefficients(&pp), vec![int(1), int(4), rat(4, 3)]);
        assert_eq!(c_via_terminating_series(&pp, 1), int(4));
        assert_eq!(c_via_terminating_series(&pp, 0), int(1));
        assert_eq!(c_coefficients(&ParamPairs::empty()), vec![int(1)]);
    }

    #[test]
    fn c_two_pairs_cross_check() {
        let pp = ParamPairs::new([(rat(1, 3), 1), (int(2), 2)]).unwrap();
        let c = c_coefficients(&pp);
        assert_eq!(c.len(), 4);
        assert_eq!(c[0], RBig::ONE);
        assert_eq!(c[3], RBig::ONE / pp.base_product());
        for (k, ck) in c.iter().enumerate() {
            assert_eq!(*ck, c_via_terminating_series(&pp, k));
        }
    }

    #[test]
    fn param_pairs_validation() {
        assert_eq!(
            ParamPairs::new([(rat(1, 2), 0)]),
            Err(ParamPairsError::ZeroOffset { index: 0 })
        );
        assert_eq!(
            ParamPairs::new([(rat(1, 2), 1), (int(-1), 3)]),
            Err(ParamPairsError::VanishingBase { index: 1 })
        );
        // (-5)_2 = 20 is fine
        assert!(ParamPairs::new([(int(-5), 2)]).is_ok());
        let pp = ParamPairs::parse("1/2:2, 3:1").unwrap();
        assert_eq!(pp.total_offset(), 3);
        assert_eq!(pp.to_string(), "1/2:2,3:1");
        assert!(ParamPairs::parse("").unwrap().is_empty());
        assert!(matches!(ParamPairs::parse("1/2"), Err(ParamPairsError::Malformed(_))));
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["3/4", "-7", "0", "-12/5"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_rational("6/8").unwrap()), "3/4");
        assert_eq!(format_rational(&parse_rational("+2/-1").unwrap_or(int(9))), "9");
        for bad in ["", "1/0", "a/2", "1.5", "1/-2", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn nonpositive_integer_detection() {
        assert_eq!(nonpositive_integer(&int(0)), Some(0));
        assert_eq!(nonpositive_integer(&int(-4)), Some(4));
        assert_eq!(nonpositive_integer(&int(2)), None);
        assert_eq!(nonpositive_integer(&rat(-1, 2)), None);
    }
}
