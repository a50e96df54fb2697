//! The bivariate generating function of permutation tableaux by corners (x)
//! and unrestricted rows (z).
//!
//! Everything is kept in the basis `(x - 1)^m` in x, so that
//! `C_n(x, z) = sum_m c_{n,m}(z) (x - 1)^m` and `c_{n,m}(1) / n!` is the m-th
//! binomial moment `E binom(C_n, m)`. The coefficients obey
//!
//! ```text
//! c_{n,m}(z) = z c_{n-1,m}(z+1) + z(z+1) c_{n-2,m-1}(z+1) - z^2 c_{n-2,m-1}(z)
//! ```
//!
//! with `c_{0,0} = 1`, `c_{1,0} = z` and `c_{0,m} = c_{1,m} = 0` for m > 0.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::enumerate::binomial;
use crate::error::{Error, Result};
use crate::poly::UniPoly;
use crate::rational::{factorial, from_big, rat, ExactRational};

pub const DEFAULT_GENFUN_CAP: usize = 60;
pub const DEFAULT_CNM_N_CAP: usize = 300;
pub const DEFAULT_CNM_M_CAP: usize = 10;

/// One level n of the recursion: c_{n,0..=m_max} and their shifts by one.
#[derive(Debug, Clone)]
struct Level {
    polys: Vec<UniPoly>,
    shifted: Vec<UniPoly>,
}

impl Level {
    fn new(polys: Vec<UniPoly>) -> Self {
        let shifted = polys.iter().map(UniPoly::shift_one).collect();
        Level { polys, shifted }
    }
}

/// Walks the recursion n = 0, 1, 2, ... keeping only the last two levels.
#[derive(Debug, Clone)]
pub struct CnmRecursion {
    m_max: usize,
    next_n: usize,
    prev: Option<Level>,
    prev2: Option<Level>,
}

impl CnmRecursion {
    pub fn new(m_max: usize) -> Self {
        CnmRecursion {
            m_max,
            next_n: 0,
            prev: None,
            prev2: None,
        }
    }

    /// Size of the level the next call to `next` returns.
    pub fn next_n(&self) -> usize {
        self.next_n
    }
}

impl Iterator for CnmRecursion {
    /// `(n, [c_{n,0}, ..., c_{n,m_max}])`
    type Item = (usize, Vec<UniPoly>);

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.next_n;
        let width = self.m_max + 1;
        let polys = match n {
            0 => unit_vector(UniPoly::one(), width),
            1 => unit_vector(UniPoly::z(), width),
            _ => {
                let p1 = self.prev.as_ref().expect("level n-1 present");
                let p2 = self.prev2.as_ref().expect("level n-2 present");
                (0..width)
                    .map(|m| {
                        let mut c = p1.shifted[m].mul_z_pow(1);
                        if m > 0 {
                            let s = &p2.shifted[m - 1];
                            let plain = &p2.polys[m - 1];
                            let z_z1 = s.mul_linear(&BigInt::from(1)).mul_z_pow(1);
                            c = &(&c + &z_z1) - &plain.mul_z_pow(2);
                        }
                        c
                    })
                    .collect()
            }
        };
        self.prev2 = self.prev.take();
        self.prev = Some(Level::new(polys.clone()));
        self.next_n += 1;
        Some((n, polys))
    }
}

fn unit_vector(first: UniPoly, width: usize) -> Vec<UniPoly> {
    let mut v = vec![UniPoly::zero(); width];
    v[0] = first;
    v
}

/// C_n(x, z) stored as `c_{n,m}(z)` for m = 0..=n/2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariatePoly {
    n: usize,
    cnm: Vec<UniPoly>,
}

impl BivariatePoly {
    pub fn n(&self) -> usize {
        self.n
    }

    /// c_{n,m}(z); zero outside 0..=n/2.
    pub fn cnm(&self, m: usize) -> UniPoly {
        self.cnm.get(m).cloned().unwrap_or_default()
    }

    pub fn coefficients(&self) -> &[UniPoly] {
        &self.cnm
    }

    /// C_n(1, z).
    pub fn at_x_one(&self) -> &UniPoly {
        &self.cnm[0]
    }

    /// Coefficients of x^k z^u in the monomial basis.
    pub fn to_monomial(&self) -> BTreeMap<(usize, usize), BigInt> {
        let mut out: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (m, c) in self.cnm.iter().enumerate() {
            for (u, cu) in c.coeffs().iter().enumerate() {
                if cu.is_zero() {
                    continue;
                }
                // (x - 1)^m = sum_k binom(m, k) (-1)^(m-k) x^k
                for k in 0..=m {
                    let mut term = BigInt::from(binomial(m, k)) * cu;
                    if (m - k) % 2 == 1 {
                        term = -term;
                    }
                    *out.entry((k, u)).or_default() += term;
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Evaluates C_n(x, z) at rational points.
    pub fn eval(&self, x: &BigRational, z: &BigRational) -> BigRational {
        let shift = x - BigRational::from_integer(1.into());
        self.cnm
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &shift + c.eval_rational(z))
    }

    /// `[[m, ["c0", "c1", ...]], ...]` with coefficients as decimal strings.
    pub fn dump(&self) -> Vec<(usize, Vec<String>)> {
        self.cnm
            .iter()
            .enumerate()
            .map(|(m, c)| (m, c.coeffs().iter().map(|v| v.to_string()).collect()))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GenfunDump {
    pub n: usize,
    pub cnm: Vec<(usize, Vec<String>)>,
}

impl From<&BivariatePoly> for GenfunDump {
    fn from(p: &BivariatePoly) -> Self {
        GenfunDump {
            n: p.n,
            cnm: p.dump(),
        }
    }
}

pub fn genfun(n: usize) -> Result<BivariatePoly> {
    genfun_capped(n, DEFAULT_GENFUN_CAP)
}

pub fn genfun_capped(n: usize, cap: usize) -> Result<BivariatePoly> {
    if n > cap {
        return Err(Error::CapExceeded {
            what: "generating function size",
            requested: n,
            cap,
        });
    }
    let (_, polys) = CnmRecursion::new(n / 2)
        .nth(n)
        .expect("the recursion is unbounded");
    let mut cnm = polys;
    while cnm.len() > 1 && cnm.last().is_some_and(UniPoly::is_zero) {
        cnm.pop();
    }
    Ok(BivariatePoly { n, cnm })
}

/// c_{n,m}(z) computed by the m-indexed recursion alone.
pub fn coeff_cnm(n: usize, m: usize) -> Result<UniPoly> {
    check_cnm_caps(n, m)?;
    if m > n / 2 {
        return Ok(UniPoly::zero());
    }
    let (_, mut polys) = CnmRecursion::new(m).nth(n).expect("unbounded");
    Ok(polys.swap_remove(m))
}

fn check_cnm_caps(n: usize, m: usize) -> Result<()> {
    if n > DEFAULT_CNM_N_CAP {
        return Err(Error::CapExceeded {
            what: "coefficient size n",
            requested: n,
            cap: DEFAULT_CNM_N_CAP,
        });
    }
    if m > DEFAULT_CNM_M_CAP {
        return Err(Error::CapExceeded {
            what: "coefficient index m",
            requested: m,
            cap: DEFAULT_CNM_M_CAP,
        });
    }
    Ok(())
}

/// `c_{k,j}(1)` for k = 0..=n_max and j = 0..=m_max, from one pass of the
/// recursion. `out[k][j]`.
pub fn cnm_at_one_table(n_max: usize, m_max: usize) -> Result<Vec<Vec<BigInt>>> {
    check_cnm_caps(n_max, m_max)?;
    Ok(CnmRecursion::new(m_max)
        .take(n_max + 1)
        .map(|(_, polys)| polys.iter().map(UniPoly::eval_one).collect())
        .collect())
}

/// E binom(C_n, j) = c_{n,j}(1) / n! for j = 0..=m_max.
pub fn binomial_moments(n: usize, m_max: usize) -> Result<Vec<ExactRational>> {
    let table = cnm_at_one_table(n, m_max)?;
    let nf = factorial(n);
    Ok(table[n]
        .iter()
        .map(|c| from_big(c.clone(), nf.clone()))
        .collect())
}

/// E (C_n)_j = j! c_{n,j}(1) / n! for j = 0..=m_max.
pub fn factorial_moments(n: usize, m_max: usize) -> Result<Vec<ExactRational>> {
    Ok(binomial_moments(n, m_max)?
        .into_iter()
        .enumerate()
        .map(|(j, b)| b * BigRational::from_integer(BigInt::from(factorial(j))))
        .collect())
}

/// Mean and variance of C_n for every n in 1..=n_max, sharing one recursion.
pub fn mean_variance_table(n_max: usize) -> Result<Vec<(usize, ExactRational, ExactRational)>> {
    let table = cnm_at_one_table(n_max, 2)?;
    let mut nf = BigUint::from(1u32);
    let mut out = Vec::with_capacity(n_max);
    for (n, row) in table.iter().enumerate().skip(1) {
        nf *= n;
        let mean = from_big(row[1].clone(), nf.clone());
        let second = from_big(&row[2] * 2, nf.clone());
        let var = &second - &mean * &mean + &mean;
        out.push((n, mean, var));
    }
    Ok(out)
}

/// E C_n = c_{n,1}(1) / n!.
pub fn mean_exact(n: usize) -> Result<ExactRational> {
    require_positive(n)?;
    Ok(binomial_moments(n, 1)?.swap_remove(1))
}

/// (n^2 + 4n - 6) / (6n) for n >= 2; zero for n = 1.
pub fn mean_closed_form(n: usize) -> Result<ExactRational> {
    require_positive(n)?;
    if n == 1 {
        return Ok(rat(0, 1));
    }
    let n = n as i64;
    Ok(rat(n * n + 4 * n - 6, 6 * n))
}

/// E C_n (C_n - 1) = 2 c_{n,2}(1) / n!.
pub fn second_factorial_moment(n: usize) -> Result<ExactRational> {
    require_positive(n)?;
    Ok(factorial_moments(n, 2)?.swap_remove(2))
}

/// (5n^4 + 16n^3 - 110n^2 - 151n + 600) / (180 n (n - 1)), valid for n >= 4.
pub fn second_factorial_moment_closed_form(n: usize) -> Result<ExactRational> {
    if n < 4 {
        return Err(Error::Domain(format!(
            "the closed form for E(C_n)_2 needs n >= 4, got {n}"
        )));
    }
    let n = BigInt::from(n);
    let num = BigInt::from(5) * n.pow(4) + BigInt::from(16) * n.pow(3)
        - BigInt::from(110) * n.pow(2)
        - BigInt::from(151) * &n
        + 600;
    let den = BigInt::from(180) * &n * (&n - 1);
    Ok(BigRational::new(num, den))
}

/// Var C_n = E(C_n)_2 - (E C_n)^2 + E C_n from the coefficient recursion.
pub fn variance_exact(n: usize) -> Result<ExactRational> {
    require_positive(n)?;
    let f = factorial_moments(n, 2)?;
    Ok(&f[2] - &f[1] * &f[1] + &f[1])
}

/// (11n^4 - 191n^2 + 360n + 180) / (180 n^2 (n - 1)) for n >= 4, with the
/// small cases 0, 1/4, 5/36.
pub fn variance_closed_form(n: usize) -> Result<ExactRational> {
    require_positive(n)?;
    Ok(match n {
        1 => rat(0, 1),
        2 => rat(1, 4),
        3 => rat(5, 36),
        _ => {
            let n = BigInt::from(n);
            let num = BigInt::from(11) * n.pow(4) - BigInt::from(191) * n.pow(2)
                + BigInt::from(360) * &n
                + 180;
            let den = BigInt::from(180) * n.pow(2) * (&n - 1);
            BigRational::new(num, den)
        }
    })
}

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Every coefficient of C_n in the monomial basis is a non-negative count
/// and the counts sum to n!.
pub fn monomial_counts_are_sane(p: &BivariatePoly) -> bool {
    let mono = p.to_monomial();
    let total: BigInt = mono.values().sum();
    mono.values().all(|v| !v.is_negative()) && total == BigInt::from(factorial(p.n))
}
