//! Closed-form and recursive bounds on `E_≤k(n)`, the halving-line upper
//! bound, crossing-number lower-bound pipelines and the numeric checks that
//! accompany them.
//!
//! Integer bounds are `i128`; anything involving a square root is kept as a
//! [`Surd`] and compared by squaring.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::approx;
use crate::error::{Error, Result};
use crate::geom::{int, ratio, Rational};
use crate::stats::{binom2, crossings_from_leq};

fn rat(v: i128) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

fn to_i128(x: &Rational) -> i128 {
    x.to_integer().to_i128().expect("bound fits in i128")
}

/// `C(x, 2)` for rational `x`: `x(x-1)/2` when `x ≥ 1`, else 0.
pub fn binom2_clamped(x: &Rational) -> Rational {
    if *x < int(1) {
        Rational::zero()
    } else {
        x * (x - int(1)) / int(2)
    }
}

fn check_level(n: usize, k: usize) -> Result<()> {
    if n < 2 || k + 1 > n / 2 {
        Err(Error::KOutOfRange { k, n })
    } else {
        Ok(())
    }
}

/// `3C(k+2,2) + 3C(k+2-⌊n/3⌋,2) - max(0, (k+1-⌊n/3⌋)(n-3⌊n/3⌋))`.
pub fn three_binomial_bound(n: usize, k: usize) -> Result<i128> {
    check_level(n, k)?;
    let (n, k) = (n as i128, k as i128);
    let t = n / 3;
    Ok(3 * binom2(k + 2) + 3 * binom2(k + 2 - t) - 0.max((k + 1 - t) * (n - 3 * t)))
}

/// A recursive sequence `u_first, u_{first+1}, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct USequence {
    pub n: usize,
    /// Index of the first value (`m - 1`).
    pub first: usize,
    pub values: Vec<i128>,
}

impl USequence {
    pub fn get(&self, k: usize) -> Option<i128> {
        k.checked_sub(self.first)
            .and_then(|i| self.values.get(i))
            .copied()
    }

    pub fn last_k(&self) -> usize {
        self.first + self.values.len() - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i128)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.first + i, v))
    }
}

/// `u_k = ⌈(C(n,2) + (n-2k-3) u_{k-1}) / (n-2k-2)⌉` for `k = first+1 ..= ⌊(n-3)/2⌋`.
fn extend(n: usize, first: usize, start: Rational) -> USequence {
    let total = rat(binom2(n as i128));
    let mut values = vec![start.ceil()];
    let mut k = first + 1;
    while 2 * k + 3 <= n {
        let prev = values.last().expect("seeded");
        let num = &total + rat(n as i128 - 2 * k as i128 - 3) * prev;
        values.push((num / rat(n as i128 - 2 * k as i128 - 2)).ceil());
        k += 1;
    }
    USequence {
        n,
        first,
        values: values.iter().map(to_i128).collect(),
    }
}

/// `m = ⌈(4n-11)/9⌉`.
pub fn u_start(n: usize) -> usize {
    (4 * n).saturating_sub(11).div_ceil(9).max(1)
}

pub fn u_sequence(n: usize) -> Result<USequence> {
    if n < 3 {
        return Err(Error::Precondition("u_k needs n >= 3".into()));
    }
    let m = u_start(n) as i128;
    let t = (n / 3) as i128;
    let third = ratio(n as i64, 3) - rat(t);
    let start = rat(3 * binom2(m + 1) + 3 * binom2(m + 1 - t)) - rat(3 * (m - t)) * third;
    Ok(extend(n, m as usize - 1, start))
}

/// Variant seeded at `m = 17n/36`; requires `36 | n`.
pub fn u_prime_sequence(n: usize) -> Result<USequence> {
    if n == 0 || !n.is_multiple_of(36) {
        return Err(Error::Precondition(format!(
            "u' needs n divisible by 36, got {n}"
        )));
    }
    let m = (17 * n / 36) as i128;
    let (t, q) = ((n / 3) as i128, (4 * n / 9) as i128);
    let start = rat(3 * binom2(m + 1) + 3 * binom2(m + 1 - t) + 18 * binom2(m + 1 - q));
    Ok(extend(n, m as usize - 1, start))
}

/// `base - coeff · √radicand` with `coeff ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub base: Rational,
    pub coeff: Rational,
    pub radicand: Rational,
}

impl Surd {
    /// Exact comparison of the surd against a rational.
    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        // base - c√r  vs  x   <=>   base - x  vs  c√r
        let lhs = &self.base - x;
        if lhs.is_negative() {
            return Ordering::Less;
        }
        let rhs2 = &self.coeff * &self.coeff * &self.radicand;
        (&lhs * &lhs).cmp(&rhs2)
    }

    pub fn to_f64(&self) -> f64 {
        approx::to_f64(&self.base)
            - approx::to_f64(&self.coeff) * approx::to_f64(&self.radicand).max(0.0).sqrt()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} - {}·√({}) ≈ {:.4}",
            self.base,
            self.coeff,
            self.radicand,
            self.to_f64()
        )
    }
}

/// `C(n,2) - (1/9)(5n²+19n-31)·√(1-(2k+2)/n)` for `m-1 ≤ k ≤ (n-2)/2`.
pub fn explicit_bound(n: usize, k: usize) -> Result<Surd> {
    if n < 3 || k + 1 < u_start(n) || 2 * k + 2 > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let ni = n as i128;
    Ok(Surd {
        base: rat(binom2(ni)),
        coeff: Rational::new(BigInt::from(5 * ni * ni + 19 * ni - 31), BigInt::from(9)),
        radicand: int(1) - Rational::new(BigInt::from(2 * k + 2), BigInt::from(n)),
    })
}

/// Upper bound on the number of halving lines, `n ≥ 8`.
pub fn halving_upper_bound(n: usize) -> Result<i128> {
    if n < 8 {
        return Err(Error::Precondition(format!(
            "halving bound needs n >= 8, got {n}"
        )));
    }
    let ni = n as i128;
    let v = if n.is_multiple_of(2) {
        Rational::new(BigInt::from(ni * (ni + 30)), BigInt::from(24)) - int(3)
    } else {
        Rational::new(BigInt::from((ni - 3) * (ni + 45)), BigInt::from(18)) + ratio(1, 9)
    };
    Ok(to_i128(&v.floor()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    /// Three-binomial bound below, halving bound at `k = ⌊n/2⌋-2`.
    Table1,
    /// Pointwise max of the three-binomial bound and `u_k`.
    Section5,
}

impl std::str::FromStr for Pipeline {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Pipeline::Table1),
            "section5" => Ok(Pipeline::Section5),
            other => Err(Error::Precondition(format!("unknown pipeline {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrBoundResult {
    pub n: usize,
    pub value: i128,
    /// Lower bounds on `E_≤k` for `k = 0..=⌊n/2⌋-2`.
    pub per_k_bounds_used: Vec<i128>,
    pub pipeline: Pipeline,
}

pub fn cr_lower_bound(n: usize, pipeline: Pipeline) -> Result<CrBoundResult> {
    if n < 8 {
        return Err(Error::Precondition(format!(
            "crossing bound needs n >= 8, got {n}"
        )));
    }
    let top = n / 2 - 2;
    let per_k: Vec<i128> = match pipeline {
        Pipeline::Table1 => {
            let mut v = (0..top)
                .map(|k| three_binomial_bound(n, k))
                .collect::<Result<Vec<_>>>()?;
            v.push(binom2(n as i128) - halving_upper_bound(n)?);
            v
        }
        Pipeline::Section5 => {
            let u = u_sequence(n)?;
            (0..=top)
                .map(|k| Ok(three_binomial_bound(n, k)?.max(u.get(k).unwrap_or(i128::MIN))))
                .collect::<Result<Vec<_>>>()?
        }
    };
    let value = crossings_from_leq(n, &per_k);
    Ok(CrBoundResult {
        n,
        value,
        per_k_bounds_used: per_k,
        pipeline,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    ThreeBinomial,
    USequence,
    Halving,
    Total,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub k: usize,
    pub three_binomial: i128,
    pub u_k: Option<i128>,
    pub u_prime_k: Option<i128>,
    /// Floating view of the explicit bound; exact value via [`explicit_bound`].
    pub explicit: Option<f64>,
    pub best: i128,
    pub source: BoundSource,
}

/// Per-k lower bounds on `E_≤k(n)`.
///
/// `best` combines the bounds valid for every point set; `u'` is listed for
/// reference only.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTable {
    pub n: usize,
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::Precondition(format!(
                "bound table needs n >= 4, got {n}"
            )));
        }
        let u = u_sequence(n)?;
        let up = u_prime_sequence(n).ok();
        let total = binom2(n as i128);
        let last = n / 2 - 1;
        let mut rows = Vec::with_capacity(last + 1);
        for k in 0..=last {
            let aich = three_binomial_bound(n, k)?;
            let u_k = u.get(k);
            let mut best = (aich, BoundSource::ThreeBinomial);
            if let Some(v) = u_k {
                if v > best.0 {
                    best = (v, BoundSource::USequence);
                }
            }
            if n >= 8 && k + 2 == n / 2 {
                let v = total - halving_upper_bound(n)?;
                if v > best.0 {
                    best = (v, BoundSource::Halving);
                }
            }
            if k == last {
                best = (total, BoundSource::Total);
            }
            rows.push(BoundRow {
                k,
                three_binomial: aich,
                u_k,
                u_prime_k: up.as_ref().and_then(|s| s.get(k)),
                explicit: explicit_bound(n, k).ok().map(|s| s.to_f64()),
                best: best.0,
                source: best.1,
            });
        }
        Ok(BoundTable { n, rows })
    }
}

/// Truncated series `3C(k+2,2) + 3C(k+2-n/3,2) + 3 Σ_{j=2}^{terms} j(j+1) C(k+2-c_j n, 2)`
/// with `c_j = 1/2 - 1/(3j(j+1))`.
pub fn series_bound(n: usize, k: usize, terms: usize) -> Result<Rational> {
    if terms < 1 {
        return Err(Error::Precondition("series needs at least one term".into()));
    }
    let (n, x) = (int(n as i64), int(k as i64 + 2));
    let mut sum = int(3) * binom2_clamped(&x) + int(3) * binom2_clamped(&(&x - &n / int(3)));
    for j in 2..=terms as i64 {
        let c = c_coefficient(j);
        sum += int(3 * j * (j + 1)) * binom2_clamped(&(&x - c * &n));
    }
    Ok(sum)
}

pub fn c_coefficient(j: i64) -> Rational {
    ratio(1, 2) - ratio(1, 3 * j * (j + 1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub first_integral: f64,
    pub second_integral: f64,
    pub sum: f64,
    pub first_error: f64,
    pub second_error: f64,
    pub sum_error: f64,
    pub constant: f64,
    pub limit_constant: f64,
    pub passes: bool,
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Integrates the two pieces of the asymptotic crossing constant and checks
/// them against `86/243`, `19/729` and `277/729`.
pub fn asymptotic_constants() -> AsymptoticReport {
    let f1 = |x: f64| 24.0 * 1.5 * (1.0 - 2.0 * x) * (x * x + (x - 1.0 / 3.0).max(0.0).powi(2));
    let f2 = |x: f64| 24.0 * (1.0 - 2.0 * x) * (0.5 - 5.0 / 9.0 * (1.0 - 2.0 * x).max(0.0).sqrt());
    let tol = 1e-13;
    // Split at the kink of the max term.
    let first = simpson(&f1, 0.0, 1.0 / 3.0, tol) + simpson(&f1, 1.0 / 3.0, 4.0 / 9.0, tol);
    let second = simpson(&f2, 4.0 / 9.0, 0.5, tol);
    let sum = first + second;
    let first_error = (first - 86.0 / 243.0).abs();
    let second_error = (second - 19.0 / 729.0).abs();
    let sum_error = (sum - 277.0 / 729.0).abs();
    let constant = 277.0 / 729.0;
    let limit_constant = 2.0 / 27.0 * (15.0 - std::f64::consts::PI.powi(2));
    AsymptoticReport {
        first_integral: first,
        second_integral: second,
        sum,
        first_error,
        second_error,
        sum_error,
        constant,
        limit_constant,
        passes: first_error < 1e-9
            && second_error < 1e-9
            && sum_error < 1e-9
            && constant > 0.379972
            && limit_constant > 0.380029,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub m: usize,
    /// Levels at which the two-sided ratio bracket was checked.
    pub bracket_levels: Vec<usize>,
    /// Levels at which the lower estimate was checked.
    pub estimate_levels: Vec<usize>,
    pub violations: Vec<String>,
}

impl LemmaReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// With `ρ_k = (C(n,2)-u_k)/(C(n,2)-u_{m-1})`, checks for `m-1 ≤ k ≤ (n-5)/2`
/// that `9(1-(2k+9/2)/n) < ρ_k² ≤ 9(1-(2k+2)/n)` (with `ρ_k ≥ 0`), and for
/// `m ≤ k ≤ (n-5)/2` that `9(1-(2k+9/2)/n)(C(n,2)-u_{m-1})² ≥ ((n-1)(n-2k-3))²`.
pub fn lemma_brackets(n: usize) -> Result<LemmaReport> {
    if n < 6 {
        return Err(Error::Precondition(format!(
            "lemma checks need n >= 6, got {n}"
        )));
    }
    let u = u_sequence(n)?;
    let m = u.first + 1;
    let total = binom2(n as i128);
    let d = rat(total - u.values[0]);
    let ni = n as i128;
    let mut report = LemmaReport {
        n,
        m,
        bracket_levels: Vec::new(),
        estimate_levels: Vec::new(),
        violations: Vec::new(),
    };
    let mut k = m - 1;
    while 2 * k + 5 <= n {
        let uk = u.get(k).expect("k within the recursion range");
        let rho = rat(total - uk) / &d;
        let lower = int(9)
            * (int(1) - Rational::new(BigInt::from(4 * k as i128 + 9), BigInt::from(2 * ni)));
        let upper =
            int(9) * (int(1) - Rational::new(BigInt::from(2 * k as i128 + 2), BigInt::from(ni)));
        let rho2 = &rho * &rho;
        report.bracket_levels.push(k);
        if rho.is_negative() || !(lower < rho2 && rho2 <= upper) {
            report.violations.push(format!(
                "ratio bracket fails at n = {n}, k = {k}: ρ = {rho}"
            ));
        }
        if k >= m {
            report.estimate_levels.push(k);
            let rhs = rat((ni - 1) * (ni - 2 * k as i128 - 3));
            if lower * &d * &d < &rhs * &rhs {
                report
                    .violations
                    .push(format!("lower estimate fails at n = {n}, k = {k}"));
            }
        }
        k += 1;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub n: usize,
    pub k: usize,
    pub f1_envelope: f64,
    pub f2_envelope: f64,
    pub explicit: f64,
    pub both_below: bool,
}

/// Evaluates the two earlier envelopes `C(n,2) - c n^{3/2} √(n-2k)` with
/// `c = √2/2` and `c = 13√3/36` next to the explicit bound.
pub fn comparison_bounds(n: usize, k: usize) -> Result<ComparisonReport> {
    if n < 3 || 3 * k < n || 2 * k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let (nf, kf) = (n as f64, k as f64);
    let total = nf * (nf - 1.0) / 2.0;
    let scale = nf.powf(1.5) * (nf - 2.0 * kf).sqrt();
    let f1 = total - 2f64.sqrt() / 2.0 * scale;
    let f2 = total - 13.0 * 3f64.sqrt() / 36.0 * scale;
    // Past k = (n-2)/2 the radicand would be negative; it is read as 0.
    let radicand = (1.0 - (2.0 * kf + 2.0) / nf).max(0.0);
    let explicit = total - radicand.sqrt() * (5.0 * nf * nf + 19.0 * nf - 31.0) / 9.0;
    Ok(ComparisonReport {
        n,
        k,
        f1_envelope: f1,
        f2_envelope: f2,
        explicit,
        both_below: f1 <= explicit && f2 <= explicit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_binomial_values() {
        assert_eq!(three_binomial_bound(24, 8).unwrap(), 138);
        assert_eq!(three_binomial_bound(24, 9).unwrap(), 174);
        assert_eq!(three_binomial_bound(20, 6).unwrap(), 85);
        assert_eq!(three_binomial_bound(9, 0).unwrap(), 3);
        assert!(three_binomial_bound(9, 4).is_err());
    }

    #[test]
    fn u_values() {
        let u = u_sequence(27).unwrap();
        assert_eq!((u.first, u.values.clone()), (10, vec![207, 255, 351]));
        let u = u_sequence(28).unwrap();
        assert_eq!((u.get(11), u.get(12)), (Some(249), Some(314)));
        let u = u_sequence(20).unwrap();
        assert_eq!((u.get(7), u.get(8)), (Some(113), Some(152)));
    }

    #[test]
    fn u_prime_values() {
        let u = u_prime_sequence(36).unwrap();
        assert_eq!((u.first, u.values.clone()), (16, vec![522]));
        assert_eq!(u_prime_sequence(72).unwrap().get(33), Some(2004));
        assert!(u_prime_sequence(18).is_err());
    }

    #[test]
    fn explicit_bound_values() {
        let s = explicit_bound(27, 11).unwrap();
        let v = int(351) - Rational::new(4127.into(), 27.into());
        assert_eq!(s.cmp_rational(&v), Ordering::Equal);
        assert_eq!(s.cmp_rational(&int(255)), Ordering::Less);
        assert_eq!(s.cmp_rational(&int(198)), Ordering::Greater);
        let s = explicit_bound(20, 9).unwrap();
        assert_eq!(s.cmp_rational(&int(190)), Ordering::Equal);
        assert_eq!(
            explicit_bound(36, 16).unwrap().cmp_rational(&int(522)),
            Ordering::Less
        );
        assert!(explicit_bound(27, 5).is_err());
    }

    #[test]
    fn halving_values() {
        let got: Vec<i128> = [14, 18, 24, 27, 28, 29, 32]
            .iter()
            .map(|&n| halving_upper_bound(n).unwrap())
            .collect();
        assert_eq!(got, vec![22, 33, 51, 96, 64, 107, 79]);
        assert!(halving_upper_bound(7).is_err());
    }

    #[test]
    fn pipeline_anchors() {
        for (n, v) in [(20, 1657), (23, 3077), (24, 3699)] {
            assert_eq!(cr_lower_bound(n, Pipeline::Table1).unwrap().value, v);
        }
        for (n, v) in [(28, 7233), (50, 84146), (99, 1402932)] {
            assert_eq!(cr_lower_bound(n, Pipeline::Section5).unwrap().value, v);
        }
    }

    #[test]
    fn u_dominates_after_crossover() {
        for n in 9..150 {
            let u = u_sequence(n).unwrap();
            let mut prev = i128::MIN;
            for (k, v) in u.iter() {
                assert!(v >= prev);
                prev = v;
                assert!(v <= binom2(n as i128));
                if k > u.first && k < n / 2 {
                    assert!(v >= three_binomial_bound(n, k).unwrap(), "n = {n}, k = {k}");
                }
            }
        }
    }

    #[test]
    fn table_best_is_monotone() {
        for n in [10, 27, 36, 51, 100] {
            let t = BoundTable::new(n).unwrap();
            assert!(t.rows.windows(2).all(|w| w[0].best <= w[1].best), "n = {n}");
            assert_eq!(t.rows.last().unwrap().best, binom2(n as i128));
        }
        let t = BoundTable::new(36).unwrap();
        assert_eq!(t.rows[16].u_prime_k, Some(522));
    }

    #[test]
    fn series_truncations() {
        assert_eq!(c_coefficient(2), ratio(4, 9));
        assert_eq!(series_bound(36, 15, 2).unwrap(), int(438));
        assert_eq!(series_bound(30, 7, 5).unwrap(), int(3 * 36));
        for n in [27, 40, 81] {
            for k in 0..n / 2 {
                let mut prev = series_bound(n, k, 1).unwrap();
                for t in 2..8 {
                    let next = series_bound(n, k, t).unwrap();
                    assert!(next >= prev);
                    prev = next;
                }
            }
        }
        assert!(series_bound(10, 2, 0).is_err());
    }

    #[test]
    fn integrals() {
        let r = asymptotic_constants();
        assert!(r.passes, "{r:?}");
    }

    #[test]
    fn brackets_small_and_medium() {
        for n in [6, 27, 41, 100] {
            let r = lemma_brackets(n).unwrap();
            assert!(r.passes(), "{r:?}");
        }
        let r = lemma_brackets(27).unwrap();
        assert!(r.bracket_levels.contains(&11));
        for n in 6..=40 {
            let r = lemma_brackets(n).unwrap();
            assert!(r.estimate_levels.len() <= 1);
            if let Some(&k) = r.estimate_levels.first() {
                assert_eq!(k, (n - 5) / 2);
            }
        }
    }

    #[test]
    fn comparison_envelopes() {
        for (n, k) in [(900, 430), (90, 40), (90, 45)] {
            let r = comparison_bounds(n, k).unwrap();
            assert!(r.both_below, "{r:?}");
        }
        let r = comparison_bounds(90, 45).unwrap();
        assert_eq!(r.f1_envelope, 4005.0);
        assert!(comparison_bounds(90, 10).is_err());
    }
}
