//! Deterministic oracle suite: exhaustive enumeration against the exact
//! pipeline. Output carries no timings so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;

use crate::enumerate::{enumerate_tree_like_tableaux, joint_counts};
use crate::error::Result;
use crate::genfun::{genfun, mean_closed_form, mean_variance_table, variance_closed_form};
use crate::moments::variance_via_t;
use crate::pasep::{current_activity, moves, to_pasep_state};
use crate::poly::UniPoly;
use crate::rational::{factorial, int, rat, ExactRational};
use crate::tableau::examples::thirteen_point_tree_like;
use crate::tableau::TreeLikeTableau;

/// Ranges covered by [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyLimits {
    pub permutation_n: usize,
    pub tree_like_n: usize,
    pub rising_n: usize,
    pub exact_n: usize,
}

impl Default for VerifyLimits {
    fn default() -> Self {
        VerifyLimits {
            permutation_n: 9,
            tree_like_n: 7,
            rising_n: 60,
            exact_n: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{mark} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

// All failure messages, or the success summary.
fn check(name: &'static str, failures: Vec<String>, ok: String) -> Check {
    if failures.is_empty() {
        Check { name, passed: true, detail: ok }
    } else {
        Check { name, passed: false, detail: failures.join("; ") }
    }
}

struct Enumerated {
    joint: Vec<BTreeMap<(usize, usize), BigUint>>,
    tree_like: Vec<Vec<TreeLikeTableau>>,
}

fn counting(e: &Enumerated, lim: &VerifyLimits) -> Check {
    let mut failures = Vec::new();
    for n in 1..=lim.permutation_n {
        let total: BigUint = e.joint[n - 1].values().sum();
        if total != factorial(n) {
            failures.push(format!("|P_{n}| = {total}, expected {}", factorial(n)));
        }
    }
    for n in 1..=lim.tree_like_n {
        let total = BigUint::from(e.tree_like[n - 1].len());
        if total != factorial(n) {
            failures.push(format!("|T_{n}| = {total}, expected {}", factorial(n)));
        }
    }
    check(
        "counting",
        failures,
        format!(
            "|P_n| = n! for n <= {}, |T_n| = n! for n <= {}",
            lim.permutation_n, lim.tree_like_n
        ),
    )
}

fn generating_function(e: &Enumerated, lim: &VerifyLimits) -> Result<Check> {
    let mut failures = Vec::new();
    for n in 1..=lim.permutation_n {
        let exact = genfun(n)?.to_monomial();
        let brute: BTreeMap<(usize, usize), BigInt> = e.joint[n - 1]
            .iter()
            .map(|(k, v)| (*k, BigInt::from(v.clone())))
            .collect();
        if exact != brute {
            failures.push(format!("n = {n}: recursion and enumeration disagree"));
        }
    }
    Ok(check(
        "generating-function",
        failures,
        format!("C_n(x, z) matches enumeration coefficientwise for n <= {}", lim.permutation_n),
    ))
}

fn rising_factorial(lim: &VerifyLimits) -> Result<Check> {
    let mut failures = Vec::new();
    for n in 1..=lim.rising_n {
        if genfun(n)?.at_x_one() != &UniPoly::rising_factorial(n) {
            failures.push(format!("C_{n}(1, z) is not z(z+1)...(z+{})", n - 1));
        }
    }
    Ok(check(
        "rising-factorial",
        failures,
        format!("C_n(1, z) = z(z+1)...(z+n-1) for n <= {}", lim.rising_n),
    ))
}

fn brute_moment(joint: &BTreeMap<(usize, usize), BigUint>, power: u32) -> ExactRational {
    let total: BigUint = joint.values().sum();
    let sum: BigUint = joint
        .iter()
        .map(|((c, _), v)| v * BigUint::from(*c).pow(power))
        .sum();
    BigRational::new(sum.into(), total.into())
}

fn mean(e: &Enumerated, table: &[(usize, ExactRational, ExactRational)], lim: &VerifyLimits) -> Result<Check> {
    let mut failures = Vec::new();
    for (n, m, _) in table.iter().filter(|(n, _, _)| *n >= 2) {
        if m != &mean_closed_form(*n)? {
            failures.push(format!("E C_{n} = {m}, closed form {}", mean_closed_form(*n)?));
        }
    }
    for n in 1..=lim.permutation_n {
        let brute = brute_moment(&e.joint[n - 1], 1);
        if brute != table[n - 1].1 {
            failures.push(format!("n = {n}: enumerated mean {brute}, exact {}", table[n - 1].1));
        }
    }
    Ok(check(
        "mean",
        failures,
        format!(
            "E C_n = (n^2+4n-6)/(6n) for 2 <= n <= {}; enumeration agrees for n <= {}",
            lim.exact_n, lim.permutation_n
        ),
    ))
}

fn variance(e: &Enumerated, table: &[(usize, ExactRational, ExactRational)], lim: &VerifyLimits) -> Result<Check> {
    let mut failures = Vec::new();
    let special = [int(0), rat(1, 4), rat(5, 36)];
    for (n, _, v) in table {
        let expected = if *n <= 3 {
            special[n - 1].clone()
        } else {
            variance_closed_form(*n)?
        };
        if v != &expected {
            failures.push(format!("Var C_{n} = {v}, expected {expected}"));
        }
        if *n >= 2 && variance_via_t(*n)? != *v {
            failures.push(format!("n = {n}: telescoped T-sum differs from {v}"));
        }
    }
    for n in 1..=lim.permutation_n {
        let m1 = brute_moment(&e.joint[n - 1], 1);
        let brute = brute_moment(&e.joint[n - 1], 2) - &m1 * &m1;
        if brute != table[n - 1].2 {
            failures.push(format!("n = {n}: enumerated variance {brute}, exact {}", table[n - 1].2));
        }
    }
    Ok(check(
        "variance",
        failures,
        format!(
            "Var C_n closed form for n <= {0} (0, 1/4, 5/36 at n = 1, 2, 3); T-sum agrees for 2 <= n <= {0}",
            lim.exact_n
        ),
    ))
}

fn tree_like_mean(e: &Enumerated, lim: &VerifyLimits) -> Check {
    let mut failures = Vec::new();
    for n in 1..=lim.tree_like_n {
        let all = &e.tree_like[n - 1];
        let corners: usize = all.iter().map(|t| t.corners()).sum();
        let m = rat(corners as i64, all.len() as i64);
        let expected = rat(n as i64 + 4, 6);
        if m != expected {
            failures.push(format!("n = {n}: mean corners {m}, expected (n+4)/6 = {expected}"));
        }
    }
    check(
        "tree-like-mean",
        failures,
        format!("mean corners over T_n = (n+4)/6 for n <= {}", lim.tree_like_n),
    )
}

fn pasep(e: &Enumerated, lim: &VerifyLimits) -> Check {
    let mut failures = Vec::new();
    let t = thirteen_point_tree_like();
    let state = to_pasep_state(&t).to_string();
    if state != "o*oo***oo**o" {
        failures.push(format!("thirteen-point example encodes to {state}"));
    }
    if current_activity(&t) != 7 {
        failures.push(format!("thirteen-point example has activity {}", current_activity(&t)));
    }
    for n in 1..=lim.tree_like_n {
        let bad = e.tree_like[n - 1]
            .iter()
            .filter(|t| moves(&to_pasep_state(t)).total() != 2 * t.corners() - 1)
            .count();
        if bad > 0 {
            failures.push(format!("n = {n}: {bad} tableaux with moves != 2c - 1"));
        }
    }
    check(
        "pasep",
        failures,
        format!(
            "example state o*oo***oo**o with activity 7; moves = 2c - 1 on T_n for n <= {}",
            lim.tree_like_n
        ),
    )
}

pub fn run(lim: &VerifyLimits) -> Result<VerifyReport> {
    let joint = (1..=lim.permutation_n).map(joint_counts).collect::<Result<_>>()?;
    let tree_like = (1..=lim.tree_like_n)
        .map(enumerate_tree_like_tableaux)
        .collect::<Result<_>>()?;
    let e = Enumerated { joint, tree_like };
    let table = mean_variance_table(lim.exact_n.max(lim.permutation_n))?;
    Ok(VerifyReport {
        checks: vec![
            counting(&e, lim),
            generating_function(&e, lim)?,
            rising_factorial(lim)?,
            mean(&e, &table, lim)?,
            variance(&e, &table, lim)?,
            tree_like_mean(&e, lim),
            pasep(&e, lim),
        ],
    })
}
