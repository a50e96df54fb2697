//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so every line prints.

use std::collections::{BTreeMap, HashMap};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use tableau_corners::enumerate::{enumerate_permutation_tableaux, enumerate_tree_like_tableaux, joint_counts};
use tableau_corners::genfun::{genfun, mean_variance_table};
use tableau_corners::moments::{central_moments, clt_report, variance_via_t, SignedSqrt};
use tableau_corners::pasep::{current_activity, moves, to_pasep_state};
use tableau_corners::poly::UniPoly;
use tableau_corners::rational::{factorial, int, rat, ExactRational};
use tableau_corners::sampler::{sample_corner_stats, sample_tableau};
use tableau_corners::tableau::examples::thirteen_point_tree_like;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok: String) -> Outcome {
    if failures.is_empty() {
        Outcome { passed: true, detail: ok }
    } else {
        Outcome {
            passed: false,
            detail: failures.join("; "),
        }
    }
}

fn counting() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 1..=9 {
        let count = enumerate_permutation_tableaux(n).unwrap().count();
        if BigUint::from(count) != factorial(n) {
            failures.push(format!("|P_{n}| = {count}"));
        }
    }
    for n in 1..=7 {
        let count = enumerate_tree_like_tableaux(n).unwrap().len();
        if BigUint::from(count) != factorial(n) {
            failures.push(format!("|T_{n}| = {count}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        failures.push(format!("enumeration took {elapsed:.1?}, budget 2 min"));
    }
    outcome(failures, format!("|P_n| = n! (n <= 9), |T_n| = n! (n <= 7) in {elapsed:.1?}"))
}

fn generating_function() -> Outcome {
    let mut failures = Vec::new();
    for n in 1..=9 {
        let brute: BTreeMap<(usize, usize), BigInt> = joint_counts(n)
            .unwrap()
            .into_iter()
            .map(|(k, v)| (k, BigInt::from(v)))
            .collect();
        if genfun(n).unwrap().to_monomial() != brute {
            failures.push(format!("n = {n} differs from enumeration"));
        }
    }
    outcome(failures, "sum x^c(T) z^u(T) over P_n matches coefficientwise for n <= 9".into())
}

fn rising_factorial() -> Outcome {
    let failures = (1..=60)
        .filter(|&n| genfun(n).unwrap().at_x_one() != &UniPoly::rising_factorial(n))
        .map(|n| format!("n = {n}"))
        .collect();
    outcome(failures, "C_n(1, z) = z(z+1)...(z+n-1) for n <= 60".into())
}

fn brute_moments(n: usize) -> (ExactRational, ExactRational) {
    let mut count = 0i64;
    let mut s1 = 0i64;
    let mut s2 = 0i64;
    for t in enumerate_permutation_tableaux(n).unwrap() {
        let c = t.corners() as i64;
        count += 1;
        s1 += c;
        s2 += c * c;
    }
    let m = rat(s1, count);
    let v = rat(s2, count) - &m * &m;
    (m, v)
}

fn mean(table: &[(usize, ExactRational, ExactRational)]) -> Outcome {
    let mut failures = Vec::new();
    for (n, m, _) in table.iter().filter(|(n, _, _)| (2..=200).contains(n)) {
        let n = *n as i64;
        if *m != rat(n * n + 4 * n - 6, 6 * n) {
            failures.push(format!("n = {n}: {m}"));
        }
    }
    for n in 1..=9 {
        if brute_moments(n).0 != table[n - 1].1 {
            failures.push(format!("n = {n}: enumerated mean differs"));
        }
    }
    outcome(
        failures,
        "E C_n = (n^2+4n-6)/(6n) for 2 <= n <= 200; enumerated means agree for n <= 9".into(),
    )
}

fn variance(table: &[(usize, ExactRational, ExactRational)]) -> Outcome {
    let mut failures = Vec::new();
    for (n, _, v) in table.iter().filter(|(n, _, _)| *n <= 200) {
        let k = *n as i64;
        let expected = match n {
            1 => int(0),
            2 => rat(1, 4),
            3 => rat(5, 36),
            _ => rat(11 * k.pow(4) - 191 * k * k + 360 * k + 180, 180 * k * k * (k - 1)),
        };
        if *v != expected {
            failures.push(format!("n = {n}: {v} != {expected}"));
        }
        if *n >= 2 && variance_via_t(*n).unwrap() != expected {
            failures.push(format!("n = {n}: T-sum differs"));
        }
    }
    outcome(
        failures,
        "closed form for 4 <= n <= 200, 0, 1/4, 5/36 at n = 1, 2, 3; T-sum equal for 2 <= n <= 200".into(),
    )
}

fn tree_like_mean() -> Outcome {
    let mut failures = Vec::new();
    for n in 1..=7 {
        let all = enumerate_tree_like_tableaux(n).unwrap();
        let corners: usize = all.iter().map(|t| t.corners()).sum();
        let m = rat(corners as i64, all.len() as i64);
        if m != rat(n as i64 + 4, 6) {
            failures.push(format!("n = {n}: mean {m}, (n+4)/6 = {}", rat(n as i64 + 4, 6)));
        }
    }
    outcome(failures, "mean corners over T_n = (n+4)/6 for 1 <= n <= 7".into())
}

fn normal_limit() -> Outcome {
    let start = Instant::now();
    let grid = [25, 50, 100, 200];
    let reports = clt_report(&grid, 8).unwrap();
    let mut failures = Vec::new();
    let m3: Vec<SignedSqrt> = reports.iter().map(|r| r.entry(3).moment.value()).collect();
    let dev4: Vec<ExactRational> = reports
        .iter()
        .map(|r| (r.entry(4).moment.exact().unwrap() - int(3)).abs())
        .collect();
    let dev6: Vec<ExactRational> = reports
        .iter()
        .map(|r| r.entry(6).moment.exact().unwrap() - int(15))
        .collect();
    for i in 1..grid.len() {
        if m3[i].cmp_abs(&m3[i - 1]) != std::cmp::Ordering::Less {
            failures.push(format!("|m3| not decreasing at n = {}", grid[i]));
        }
        if dev4[i] >= dev4[i - 1] {
            failures.push(format!("|m4 - 3| not decreasing at n = {}", grid[i]));
        }
        let ratio = &dev4[i] / &dev4[i - 1];
        if ratio < rat(3, 8) || ratio > rat(5, 8) {
            failures.push(format!("|m4 - 3| ratio {ratio} outside [3/8, 5/8] at n = {}", grid[i]));
        }
        let same_side = dev6[i].is_negative() == dev6[0].is_negative() && !dev6[i].is_zero();
        if !same_side || dev6[i].abs() >= dev6[i - 1].abs() {
            failures.push(format!("m6 not approaching 15 monotonically at n = {}", grid[i]));
        }
    }
    // |m3| sqrt(n) within a factor 2: compare m3^2 n, whose spread must stay below 4
    let scaled: Vec<ExactRational> = m3
        .iter()
        .zip(grid)
        .map(|(m, n)| m.square() * int(n as i64))
        .collect();
    let lo = scaled.iter().min().unwrap();
    let hi = scaled.iter().max().unwrap();
    if lo.is_zero() || hi / lo >= int(4) {
        failures.push("|m3| sqrt(n) varies by a factor of 2 or more".into());
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(600) {
        failures.push(format!("took {elapsed:.1?}, budget 10 min"));
    }
    let show: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "n={}: m3={} m4={} m6={}",
                r.n,
                r.entry(3).moment.to_decimal(),
                r.entry(4).moment.to_decimal(),
                r.entry(6).moment.to_decimal()
            )
        })
        .collect();
    outcome(failures, format!("{} ({elapsed:.1?})", show.join(", ")))
}

fn sampler() -> Outcome {
    let mut failures = Vec::new();
    let draws = 100_000u64;
    let all: Vec<_> = enumerate_permutation_tableaux(5).unwrap().collect();
    let mut observed: HashMap<_, u64> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..draws {
        *observed.entry(sample_tableau(5, &mut rng).unwrap()).or_default() += 1;
    }
    let expected = draws as f64 / all.len() as f64;
    let chi2: f64 = all
        .iter()
        .map(|t| {
            let o = *observed.get(t).unwrap_or(&0) as f64;
            (o - expected) * (o - expected) / expected
        })
        .sum();
    let critical = ChiSquared::new((all.len() - 1) as f64).unwrap().inverse_cdf(0.999);
    if observed.len() != all.len() || chi2 >= critical {
        failures.push(format!("chi2 = {chi2:.2} vs critical {critical:.2} over {} cells", all.len()));
    }

    let n = 100;
    let count = 100_000u64;
    let stats = sample_corner_stats(n, count, 42).unwrap();
    let central = central_moments(n, 4).unwrap();
    let var = central[2].to_f64().unwrap();
    let mu4 = central[4].to_f64().unwrap();
    let exact_mean = mean_variance_table(n).unwrap()[n - 1].1.to_f64().unwrap();
    let nf = count as f64;
    let se_mean = (var / nf).sqrt();
    let se_var = ((mu4 - var * var * (nf - 3.0) / (nf - 1.0)) / nf).sqrt();
    let z_mean = (stats.mean_f64() - exact_mean) / se_mean;
    let z_var = (stats.variance_f64() - var) / se_var;
    if z_mean.abs() > 4.0 {
        failures.push(format!("n = 100 sample mean off by {z_mean:.2} standard errors"));
    }
    if z_var.abs() > 4.0 {
        failures.push(format!("n = 100 sample variance off by {z_var:.2} standard errors"));
    }
    outcome(
        failures,
        format!(
            "P_5 chi2 = {chi2:.2} < {critical:.2}; n = 100 mean {} ({z_mean:+.2} se), variance {} ({z_var:+.2} se)",
            stats.mean, stats.variance
        ),
    )
}

fn pasep() -> Outcome {
    let mut failures = Vec::new();
    let t = thirteen_point_tree_like();
    let state = to_pasep_state(&t).to_string();
    if state != "o*oo***oo**o" || current_activity(&t) != 7 {
        failures.push(format!("example gives {state} with activity {}", current_activity(&t)));
    }
    let mut total = 0;
    for n in 1..=7 {
        for t in enumerate_tree_like_tableaux(n).unwrap() {
            total += 1;
            if moves(&to_pasep_state(&t)).total() != 2 * t.corners() - 1 {
                failures.push(format!("n = {n}: moves != 2c - 1"));
                break;
            }
        }
    }
    outcome(
        failures,
        format!("example encodes to o*oo***oo**o, activity 7; moves = 2c - 1 on all {total} tableaux of size <= 7"),
    )
}

fn stdout_of(args: &[&str]) -> Vec<u8> {
    Command::new(env!("CARGO_BIN_EXE_tabcorn"))
        .args(args)
        .output()
        .expect("binary runs")
        .stdout
}

fn determinism() -> Outcome {
    let mut failures = Vec::new();
    let verify = [stdout_of(&["verify"]), stdout_of(&["verify"])];
    if verify[0].is_empty() || verify[0] != verify[1] {
        failures.push("verify output differs between runs".into());
    }
    let sample_args = ["sample", "--n", "100", "--count", "100000", "--seed", "42", "--format", "json"];
    let a = stdout_of(&sample_args);
    let b = stdout_of(&sample_args);
    let mut single = sample_args.to_vec();
    single.extend(["--threads", "1"]);
    let c = stdout_of(&single);
    if a.is_empty() || a != b || a != c {
        failures.push("sample output differs for a fixed seed".into());
    }
    outcome(
        failures,
        format!(
            "verify ({} bytes) and sample --seed 42 ({} bytes) byte-identical across runs and thread counts",
            verify[0].len(),
            a.len()
        ),
    )
}

fn main() {
    let table = mean_variance_table(200).unwrap();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("counting", Box::new(counting)),
        ("generating function", Box::new(generating_function)),
        ("rising factorial", Box::new(rising_factorial)),
        ("mean", Box::new(|| mean(&table))),
        ("variance", Box::new(|| variance(&table))),
        ("tree-like mean", Box::new(tree_like_mean)),
        ("normal limit", Box::new(normal_limit)),
        ("sampler", Box::new(sampler)),
        ("pasep", Box::new(pasep)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let mark = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {mark} {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
