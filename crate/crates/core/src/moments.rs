//! Exact moments of the corner count and normal-limit diagnostics.
//!
//! Two independent routes reach the variance: the factorial moments read off
//! the generating-function coefficients, and the telescoped sum
//! `Var C_n = sum_{j=0}^{n-2} T_{n-j}(j+1)` built from the centring
//! functions `mu`, `alpha`, `beta`, `delta` below. Higher standardized moments
//! go through factorial moments only.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genfun::factorial_moments;
use crate::rational::{falling_factorial, int, num_den, sqrt_to_decimal, to_decimal, ExactRational};

pub const DEFAULT_MOMENT_CAP: usize = 10;
pub const DECIMAL_DIGITS: usize = 12;

fn domain(msg: String) -> Error {
    Error::Domain(msg)
}

fn nonzero(den: ExactRational, what: &str, n: usize, y: &ExactRational) -> Result<ExactRational> {
    if den.is_zero() {
        Err(domain(format!("{what} vanishes at n = {n}, y = {y}")))
    } else {
        Ok(den)
    }
}

/// (y + n - 1)_2 = (y + n - 1)(y + n - 2).
fn pair_denominator(n: usize, y: &ExactRational) -> Result<ExactRational> {
    let w = y + int(n as i64 - 1);
    nonzero(falling_factorial(&w, 2), "(y+n-1)_2", n, y)
}

/// mu_n(y) = (n-1)(n^2 + 3yn + n - 6) / (6 (y+n-1)_2), with mu_0 = mu_1 = 0.
///
/// At y = 1 this is E C_n.
pub fn mu(n: usize, y: &ExactRational) -> Result<ExactRational> {
    if n <= 1 {
        return Ok(ExactRational::zero());
    }
    let nn = int(n as i64);
    let num = (&nn - int(1)) * (&nn * &nn + int(3) * y * &nn + &nn - int(6));
    Ok(num / (int(6) * pair_denominator(n, y)?))
}

fn require_two(n: usize, what: &str) -> Result<()> {
    if n < 2 {
        Err(domain(format!("{what} needs n >= 2, got {n}")))
    } else {
        Ok(())
    }
}

/// alpha_n(y) = -(n + yn - y - 2) / (y+n-1)_2.
pub fn alpha(n: usize, y: &ExactRational) -> Result<ExactRational> {
    require_two(n, "alpha")?;
    let nn = int(n as i64);
    let num = &nn + y * &nn - y - int(2);
    Ok(-num / pair_denominator(n, y)?)
}

/// alpha_n(y) as mu_{n-1}(y+1) - mu_n(y).
pub fn alpha_by_difference(n: usize, y: &ExactRational) -> Result<ExactRational> {
    require_two(n, "alpha")?;
    Ok(mu(n - 1, &(y + int(1)))? - mu(n, y)?)
}

/// beta_n(y) = mu_{n-2}(y+1) - mu_n(y).
pub fn beta(n: usize, y: &ExactRational) -> Result<ExactRational> {
    require_two(n, "beta")?;
    Ok(mu(n - 2, &(y + int(1)))? - mu(n, y)?)
}

/// delta_n(y) = mu_{n-2}(y) - mu_n(y).
pub fn delta(n: usize, y: &ExactRational) -> Result<ExactRational> {
    require_two(n, "delta")?;
    Ok(mu(n - 2, y)? - mu(n, y)?)
}

/// T_n(y) = alpha^2 - alpha + 2((y+1)(y+n-2) beta - y^2 delta) / (y+n-1)_2.
pub fn t_coefficient(n: usize, y: &ExactRational) -> Result<ExactRational> {
    require_two(n, "T")?;
    let a = alpha(n, y)?;
    let b = beta(n, y)?;
    let d = delta(n, y)?;
    let y1 = y + int(1);
    let yn2 = y + int(n as i64 - 2);
    let inner = y1 * yn2 * b - y * y * d;
    Ok(&a * &a - &a + int(2) * inner / pair_denominator(n, y)?)
}

/// alpha_n(y) + ((y+1)(y+n-2) - y^2) / (y+n-1)_2, identically zero.
pub fn alpha_identity_residual(n: usize, y: &ExactRational) -> Result<ExactRational> {
    let y1 = y + int(1);
    let yn2 = y + int(n as i64 - 2);
    Ok(alpha(n, y)? + (y1 * yn2 - y * y) / pair_denominator(n, y)?)
}

/// Var C_n = sum_{j=0}^{n-2} T_{n-j}(j+1).
pub fn variance_via_t(n: usize) -> Result<ExactRational> {
    require_two(n, "variance_via_t")?;
    (0..=n - 2).try_fold(ExactRational::zero(), |acc, j| {
        Ok(acc + t_coefficient(n - j, &int(j as i64 + 1))?)
    })
}

/// Stirling numbers of the second kind S(r, j) for r, j <= max.
pub fn stirling2_table(max: usize) -> Vec<Vec<BigUint>> {
    let mut s = vec![vec![BigUint::zero(); max + 1]; max + 1];
    s[0][0] = BigUint::one();
    for r in 1..=max {
        for j in 1..=r {
            s[r][j] = &s[r - 1][j - 1] + &s[r - 1][j] * BigUint::from(j);
        }
    }
    s
}

/// E X^r = sum_j S(r, j) E (X)_j.
pub fn raw_from_factorial(factorial: &[ExactRational]) -> Vec<ExactRational> {
    let max = factorial.len().saturating_sub(1);
    let s = stirling2_table(max);
    (0..=max)
        .map(|r| {
            (0..=r)
                .map(|j| BigRational::from_integer(BigInt::from(s[r][j].clone())) * &factorial[j])
                .sum()
        })
        .collect()
}

/// E (X - E X)^m from raw moments E X^0..E X^max.
pub fn central_from_raw(raw: &[ExactRational]) -> Vec<ExactRational> {
    let mean = raw.get(1).cloned().unwrap_or_default();
    let neg_mean = -mean;
    (0..raw.len())
        .map(|m| {
            let mut binom = BigInt::one();
            let mut acc = ExactRational::zero();
            for i in 0..=m {
                let term = BigRational::from_integer(binom.clone())
                    * &raw[i]
                    * num_traits::pow(neg_mean.clone(), m - i);
                acc += term;
                binom = binom * BigInt::from(m - i) / BigInt::from(i + 1);
            }
            acc
        })
        .collect()
}

/// A signed square root `sign * sqrt(square)` of a non-negative rational.
///
/// Odd standardized moments carry an odd power of the standard deviation and
/// are in general irrational; this keeps them exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSqrt {
    negative: bool,
    square: ExactRational,
}

impl SignedSqrt {
    pub fn from_rational(q: &ExactRational) -> Self {
        SignedSqrt {
            negative: q.is_negative(),
            square: q * q,
        }
    }

    pub fn new(negative: bool, square: ExactRational) -> Self {
        assert!(!square.is_negative());
        SignedSqrt {
            negative: negative && !square.is_zero(),
            square,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// The value squared.
    pub fn square(&self) -> &ExactRational {
        &self.square
    }

    /// The exact value when it is rational.
    pub fn to_rational(&self) -> Option<ExactRational> {
        let num = self.square.numer().magnitude();
        let den = self.square.denom().magnitude();
        let (rn, rd) = (num.sqrt(), den.sqrt());
        if &(&rn * &rn) != num || &(&rd * &rd) != den {
            return None;
        }
        let v = BigRational::new(rn.into(), rd.into());
        Some(if self.negative { -v } else { v })
    }

    pub fn cmp_abs(&self, other: &SignedSqrt) -> Ordering {
        self.square.cmp(&other.square)
    }

    pub fn to_decimal(&self, sig: usize) -> String {
        sqrt_to_decimal(&self.square, self.negative, sig)
    }

    pub fn to_f64(&self) -> f64 {
        let v = crate::rational::to_f64(&self.square).sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }
}

/// E[((C_n - E C_n) / sigma_n)^m] with sigma_n the exact standard deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardizedMoment {
    pub n: usize,
    pub order: usize,
    pub central: ExactRational,
    pub variance: ExactRational,
}

impl StandardizedMoment {
    pub fn value(&self) -> SignedSqrt {
        let square = &self.central * &self.central / num_traits::pow(self.variance.clone(), self.order);
        SignedSqrt::new(self.central.is_negative(), square)
    }

    /// Rational value for even orders.
    pub fn exact(&self) -> Option<ExactRational> {
        self.order.is_multiple_of(2)
            .then(|| &self.central / num_traits::pow(self.variance.clone(), self.order / 2))
    }

    /// `(coefficient, radicand)` with value = coefficient * sqrt(radicand);
    /// the radicand is 1 for even orders and the variance for odd ones.
    pub fn surd_form(&self) -> (ExactRational, ExactRational) {
        match self.exact() {
            Some(q) => (q, ExactRational::one()),
            None => {
                let k = self.order.div_ceil(2);
                (
                    &self.central / num_traits::pow(self.variance.clone(), k),
                    self.variance.clone(),
                )
            }
        }
    }

    pub fn to_decimal(&self) -> String {
        match self.exact() {
            Some(q) => to_decimal(&q, DECIMAL_DIGITS),
            None => self.value().to_decimal(DECIMAL_DIGITS),
        }
    }

    /// Distance to the normal moment, as a signed square root.
    pub fn deviation(&self) -> SignedSqrt {
        match self.exact() {
            Some(q) => SignedSqrt::from_rational(&(q - gaussian_rational(self.order))),
            None => self.value(),
        }
    }
}

/// Normal moment of order m: 0 for odd m, (m-1)!! = m! / (2^(m/2) (m/2)!) for even m.
pub fn gaussian_target(m: usize) -> BigUint {
    if m % 2 == 1 {
        return BigUint::zero();
    }
    (1..m).step_by(2).map(BigUint::from).product()
}

fn gaussian_rational(m: usize) -> ExactRational {
    BigRational::from_integer(gaussian_target(m).into())
}

fn check_moment_request(n: usize, m_max: usize) -> Result<()> {
    if n < 2 {
        return Err(domain(format!(
            "standardized moments need n >= 2 (C_1 is constant), got {n}"
        )));
    }
    if m_max > DEFAULT_MOMENT_CAP {
        return Err(Error::CapExceeded {
            what: "moment order",
            requested: m_max,
            cap: DEFAULT_MOMENT_CAP,
        });
    }
    Ok(())
}

/// Central moments E(C_n - E C_n)^m for m = 0..=m_max (m_max >= 2 is forced).
pub fn central_moments(n: usize, m_max: usize) -> Result<Vec<ExactRational>> {
    let fm = factorial_moments(n, m_max.max(2))?;
    Ok(central_from_raw(&raw_from_factorial(&fm)))
}

/// Standardized moments of orders 1..=m_max.
pub fn standardized_moments(n: usize, m_max: usize) -> Result<Vec<StandardizedMoment>> {
    check_moment_request(n, m_max)?;
    let central = central_moments(n, m_max)?;
    let variance = central[2].clone();
    Ok((1..=m_max)
        .map(|order| StandardizedMoment {
            n,
            order,
            central: central[order].clone(),
            variance: variance.clone(),
        })
        .collect())
}

pub fn standardized_moment(n: usize, m: usize) -> Result<StandardizedMoment> {
    if m == 0 {
        return Err(domain("moment order must be at least 1".into()));
    }
    Ok(standardized_moments(n, m)?.swap_remove(m - 1))
}

#[derive(Debug, Clone)]
pub struct MomentEntry {
    pub moment: StandardizedMoment,
    pub target: BigUint,
    /// (moment(2n) - target) / (moment(n) - target) when 2n is also reported.
    pub ratio_to_double: Option<SignedSqrt>,
}

#[derive(Debug, Clone)]
pub struct MomentReport {
    pub n: usize,
    pub mean: ExactRational,
    pub variance: ExactRational,
    pub entries: Vec<MomentEntry>,
}

impl MomentReport {
    pub fn entry(&self, order: usize) -> &MomentEntry {
        &self.entries[order - 1]
    }
}

/// Standardized moments 1..=m_max per n, with Gaussian targets and
/// doubling ratios.
pub fn clt_report(n_list: &[usize], m_max: usize) -> Result<Vec<MomentReport>> {
    use rayon::prelude::*;

    for &n in n_list {
        check_moment_request(n, m_max)?;
    }
    let per_n: Vec<(usize, Vec<ExactRational>)> = n_list
        .par_iter()
        .map(|&n| Ok((n, central_moments(n, m_max)?)))
        .collect::<Result<_>>()?;
    let mut reports: Vec<MomentReport> = per_n
        .iter()
        .map(|(n, central)| {
            let variance = central[2].clone();
            let entries = (1..=m_max)
                .map(|order| MomentEntry {
                    moment: StandardizedMoment {
                        n: *n,
                        order,
                        central: central[order].clone(),
                        variance: variance.clone(),
                    },
                    target: gaussian_target(order),
                    ratio_to_double: None,
                })
                .collect();
            MomentReport {
                n: *n,
                mean: crate::genfun::mean_closed_form(*n).expect("n >= 2"),
                variance,
                entries,
            }
        })
        .collect();
    for i in 0..reports.len() {
        let Some(j) = reports.iter().position(|r| r.n == 2 * reports[i].n) else {
            continue;
        };
        for order in 1..=m_max {
            let here = reports[i].entry(order).moment.deviation();
            let there = reports[j].entry(order).moment.deviation();
            if here.square().is_zero() {
                continue;
            }
            let ratio = SignedSqrt::new(
                here.is_negative() != there.is_negative(),
                there.square() / here.square(),
            );
            reports[i].entries[order - 1].ratio_to_double = Some(ratio);
        }
    }
    Ok(reports)
}

/// One CSV/JSON row of a moment report.
#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub n: usize,
    pub m: usize,
    pub moment_num: String,
    pub moment_den: String,
    /// Exact value is moment_num / moment_den * sqrt(radicand).
    pub radicand: String,
    pub moment_decimal: String,
    pub gaussian_target: String,
    pub ratio_to_double: Option<String>,
}

pub fn report_rows(reports: &[MomentReport]) -> Vec<MomentRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.entries.iter().map(move |e| {
                let (coef, radicand) = e.moment.surd_form();
                let (num, den) = num_den(&coef);
                let (rn, rd) = num_den(&radicand);
                MomentRow {
                    n: r.n,
                    m: e.moment.order,
                    moment_num: num,
                    moment_den: den,
                    radicand: if rd == "1" { rn } else { format!("{rn}/{rd}") },
                    moment_decimal: e.moment.to_decimal(),
                    gaussian_target: e.target.to_string(),
                    ratio_to_double: e.ratio_to_double.as_ref().map(|q| q.to_decimal(DECIMAL_DIGITS)),
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{corner_distribution, Family};
    use crate::genfun::{mean_closed_form, variance_closed_form};
    use crate::rational::rat;

    fn y(v: i64) -> ExactRational {
        int(v)
    }

    #[test]
    fn mu_small_cases() {
        // mu_2(y) = 1 / (y + 1)
        for v in [rat(1, 3), rat(1, 1), rat(7, 2), rat(10, 1)] {
            assert_eq!(mu(2, &v).unwrap(), (&v + int(1)).recip());
        }
        assert_eq!(mu(0, &rat(3, 7)).unwrap(), int(0));
        for n in 2..30 {
            assert_eq!(mu(n, &y(1)).unwrap(), mean_closed_form(n).unwrap());
        }
        assert!(mu(3, &y(-1)).is_err());
    }

    #[test]
    fn alpha_beta_delta_at_two() {
        for v in [rat(1, 2), rat(1, 1), rat(5, 3)] {
            let expected = -(&v + int(1)).recip();
            assert_eq!(alpha(2, &v).unwrap(), expected);
            assert_eq!(beta(2, &v).unwrap(), expected);
            assert_eq!(delta(2, &v).unwrap(), expected);
        }
        assert!(beta(1, &y(1)).is_err());
    }

    fn grid() -> Vec<(usize, ExactRational)> {
        let ys = [rat(1, 3), rat(1, 2), rat(1, 1), rat(3, 2), rat(2, 1), rat(5, 1), rat(17, 2), rat(40, 1)];
        (2..=40)
            .flat_map(|n| ys.iter().map(move |v| (n, v.clone())))
            .collect()
    }

    #[test]
    fn alpha_routes_agree_and_identity_vanishes() {
        for (n, v) in grid() {
            assert_eq!(alpha(n, &v).unwrap(), alpha_by_difference(n, &v).unwrap());
            assert!(alpha_identity_residual(n, &v).unwrap().is_zero());
        }
    }

    #[test]
    fn coefficient_bounds_on_grid() {
        let two = int(2);
        let four = int(4);
        for (n, v) in grid() {
            if int(n as i64) + &v < int(7) {
                continue;
            }
            assert!(alpha(n, &v).unwrap().abs() <= two, "alpha n={n} y={v}");
            assert!(t_coefficient(n, &v).unwrap().abs() <= four, "T n={n} y={v}");
        }
    }

    #[test]
    fn t_at_two() {
        for v in [rat(1, 2), rat(1, 1), rat(9, 4)] {
            let inv = (&v + int(1)).recip();
            assert_eq!(t_coefficient(2, &v).unwrap(), &inv - &inv * &inv);
        }
        assert_eq!(t_coefficient(2, &y(1)).unwrap(), rat(1, 4));
    }

    #[test]
    fn variance_by_t_sum() {
        assert_eq!(variance_via_t(2).unwrap(), rat(1, 4));
        assert_eq!(variance_via_t(3).unwrap(), rat(5, 36));
        for n in 2..=60 {
            assert_eq!(variance_via_t(n).unwrap(), variance_closed_form(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn stirling_numbers() {
        let s = stirling2_table(5);
        let row: Vec<u32> = s[5].iter().map(|v| v.try_into().unwrap()).collect();
        assert_eq!(row, vec![0, 1, 15, 25, 10, 1]);
    }

    #[test]
    fn conversions_match_brute_force() {
        for n in 2..=7 {
            let dist = corner_distribution(n, Family::Permutation).unwrap();
            let fm = factorial_moments(n, 6).unwrap();
            for (j, f) in fm.iter().enumerate() {
                assert_eq!(f, &dist.factorial_moment(j), "n = {n}, j = {j}");
            }
            let raw = raw_from_factorial(&fm);
            for (r, v) in raw.iter().enumerate() {
                assert_eq!(v, &dist.raw_moment(r as u32));
            }
        }
    }

    #[test]
    fn first_two_standardized_moments() {
        for n in [2, 3, 10, 40] {
            let ms = standardized_moments(n, 4).unwrap();
            assert_eq!(ms[0].exact(), None);
            assert!(ms[0].value().square().is_zero());
            assert_eq!(ms[1].exact(), Some(int(1)));
        }
        assert!(standardized_moments(1, 3).is_err());
        assert!(standardized_moments(5, 11).is_err());
    }

    #[test]
    fn skewness_of_two_point_law() {
        // C_3 is 0 w.p. 1/6 and 1 w.p. 5/6
        let p = rat(5, 6);
        let q = int(1) - &p;
        let num = int(1) - int(2) * &p;
        let square = &num * &num / (&p * &q);
        let m3 = standardized_moment(3, 3).unwrap().value();
        assert_eq!(m3, SignedSqrt::new(true, square));
        assert_eq!(m3.square(), &rat(16, 5));
        assert_eq!(m3.to_decimal(12), "-1.788854382");
    }

    #[test]
    fn surd_form_reassembles() {
        let m = standardized_moment(9, 5).unwrap();
        let (coef, radicand) = m.surd_form();
        assert_eq!(&coef * &coef * radicand, m.value().square().clone());
        let m = standardized_moment(9, 4).unwrap();
        assert_eq!(m.surd_form().1, int(1));
    }

    #[test]
    fn gaussian_targets() {
        let t: Vec<u32> = (1..=8).map(|m| gaussian_target(m).try_into().unwrap()).collect();
        assert_eq!(t, vec![0, 1, 0, 3, 0, 15, 0, 105]);
    }

    #[test]
    fn signed_sqrt_rational_detection() {
        assert_eq!(SignedSqrt::from_rational(&rat(-3, 7)).to_rational(), Some(rat(-3, 7)));
        assert_eq!(SignedSqrt::new(false, int(2)).to_rational(), None);
    }

    #[test]
    fn report_ratios() {
        let reports = clt_report(&[10, 20], 4).unwrap();
        let r = reports[0].entry(4).ratio_to_double.clone().unwrap();
        let here = reports[0].entry(4).moment.exact().unwrap() - int(3);
        let there = reports[1].entry(4).moment.exact().unwrap() - int(3);
        assert_eq!(r.to_rational(), Some(there / here));
        assert!(reports[1].entry(4).ratio_to_double.is_none());
        let rows = report_rows(&reports);
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[1].moment_decimal, "1");
        assert_eq!(rows[3].gaussian_target, "3");
    }
}
