use std::fs;

use serde::Serialize;
use serde_json::json;
use tableau_corners::enumerate::distribution;
use tableau_corners::genfun::{genfun, mean_variance_table, GenfunDump};
use tableau_corners::moments::{clt_report, report_rows, DECIMAL_DIGITS};
use tableau_corners::pasep::pasep_report;
use tableau_corners::rational::{to_decimal, ExactRational};
use tableau_corners::sampler::{sample_corner_stats, CompletionTable, DEFAULT_DENSE_CAP};
use tableau_corners::tableau::{Tableau, TableauDoc};
use tableau_corners::verify::{self, VerifyLimits};

use crate::config::{Format, RunConfig, Task};
use crate::UserError;

/// Rendered output and whether every check in it passed.
pub struct Output {
    pub text: String,
    pub ok: bool,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output { text, ok: true }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Output, UserError> {
    match cfg.task {
        Task::Enum => cmd_enum(cfg).map(Output::from),
        Task::Genfun => cmd_genfun(cfg).map(Output::from),
        Task::Moments => cmd_moments(cfg).map(Output::from),
        Task::Sample => cmd_sample(cfg).map(Output::from),
        Task::Pasep => cmd_pasep(cfg).map(Output::from),
        Task::Verify => cmd_verify(cfg),
    }
}

fn csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

fn json_text<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn fraction(q: &ExactRational) -> String {
    if q.denom() == &1.into() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Serialize)]
struct DistributionRow {
    n: usize,
    family: String,
    stat: String,
    value: usize,
    count: String,
}

pub fn cmd_enum(cfg: &RunConfig) -> Result<String, UserError> {
    let tables = cfg
        .n
        .iter()
        .map(|&n| distribution(n, cfg.family, cfg.stat))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match cfg.format {
        Format::Json => json_text(
            &tables
                .iter()
                .map(|t| {
                    json!({
                        "n": t.n,
                        "family": t.family,
                        "stat": t.stat,
                        "total": t.total().to_string(),
                        "counts": t.counts.iter().map(|(k, v)| (k.to_string(), serde_json::Value::from(v.to_string()))).collect::<serde_json::Map<_, _>>(),
                    })
                })
                .collect::<Vec<_>>(),
        ),
        _ => csv(tables.iter().flat_map(|t| {
            t.counts.iter().map(move |(value, count)| DistributionRow {
                n: t.n,
                family: t.family.to_string(),
                stat: t.stat.to_string(),
                value: *value,
                count: count.to_string(),
            })
        })),
    })
}

#[derive(Serialize)]
struct MonomialRow {
    n: usize,
    corners: usize,
    unrestricted: usize,
    count: String,
}

#[derive(Serialize)]
struct ShiftedRow {
    n: usize,
    m: usize,
    polynomial: String,
}

#[derive(Serialize)]
struct SummaryRow {
    n: usize,
    mean_num: String,
    mean_den: String,
    variance_num: String,
    variance_den: String,
}

fn genfun_summary(cfg: &RunConfig) -> Result<String, UserError> {
    if cfg.n.contains(&0) {
        return Err(UserError("sizes start at 1".into()));
    }
    let n_max = cfg.n.iter().copied().max().unwrap_or(0);
    let table = mean_variance_table(n_max)?;
    let rows: Vec<_> = cfg
        .n
        .iter()
        .map(|&n| {
            let (_, mean, var) = &table[n - 1];
            SummaryRow {
                n,
                mean_num: mean.numer().to_string(),
                mean_den: mean.denom().to_string(),
                variance_num: var.numer().to_string(),
                variance_den: var.denom().to_string(),
            }
        })
        .collect();
    Ok(match cfg.format {
        Format::Json => json_text(&rows),
        _ => csv(rows),
    })
}

pub fn cmd_genfun(cfg: &RunConfig) -> Result<String, UserError> {
    if cfg.summary {
        return genfun_summary(cfg);
    }
    let polys = cfg.n.iter().map(|&n| genfun(n)).collect::<Result<Vec<_>, _>>()?;
    Ok(match (cfg.dump, cfg.format) {
        (true, Format::Json) => json_text(&polys.iter().map(GenfunDump::from).collect::<Vec<_>>()),
        (true, _) => csv(polys.iter().flat_map(|p| {
            p.coefficients().iter().enumerate().map(move |(m, c)| ShiftedRow {
                n: p.n(),
                m,
                polynomial: c.to_string(),
            })
        })),
        (false, Format::Json) => json_text(
            &polys
                .iter()
                .map(|p| {
                    let terms: Vec<_> = p
                        .to_monomial()
                        .into_iter()
                        .map(|((k, u), c)| json!({"corners": k, "unrestricted": u, "count": c.to_string()}))
                        .collect();
                    json!({"n": p.n(), "terms": terms})
                })
                .collect::<Vec<_>>(),
        ),
        (false, _) => csv(polys.iter().flat_map(|p| {
            p.to_monomial().into_iter().map(move |((k, u), c)| MonomialRow {
                n: p.n(),
                corners: k,
                unrestricted: u,
                count: c.to_string(),
            })
        })),
    })
}

#[derive(Serialize)]
struct MomentCsvRow {
    n: usize,
    m: usize,
    moment_num: String,
    moment_den: String,
    radicand: String,
    moment_decimal: String,
    gaussian_target: String,
    ratio_to_double: Option<String>,
    mean: String,
    variance: String,
}

pub fn cmd_moments(cfg: &RunConfig) -> Result<String, UserError> {
    let reports = clt_report(&cfg.n, cfg.max_order)?;
    let show = |q: &ExactRational| {
        if cfg.exact {
            fraction(q)
        } else {
            to_decimal(q, DECIMAL_DIGITS)
        }
    };
    let rows = report_rows(&reports);
    Ok(match cfg.format {
        Format::Json => json_text(
            &reports
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "mean": show(&r.mean),
                        "variance": show(&r.variance),
                        "moments": rows.iter().filter(|row| row.n == r.n).collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>(),
        ),
        _ => csv(rows.into_iter().map(|row| {
            let r = reports.iter().find(|r| r.n == row.n).expect("row belongs to a report");
            MomentCsvRow {
                n: row.n,
                m: row.m,
                moment_num: row.moment_num,
                moment_den: row.moment_den,
                radicand: row.radicand,
                moment_decimal: row.moment_decimal,
                gaussian_target: row.gaussian_target,
                ratio_to_double: row.ratio_to_double,
                mean: show(&r.mean),
                variance: show(&r.variance),
            }
        })),
    })
}

pub fn cmd_sample(cfg: &RunConfig) -> Result<String, UserError> {
    let mut stats = Vec::new();
    for &n in &cfg.n {
        if let Some(dir) = &cfg.cache_dir {
            if n <= DEFAULT_DENSE_CAP {
                let table = CompletionTable::cached(n, dir)?;
                assert!(table.check(), "cached completion table for n = {n} is inconsistent");
            }
        }
        stats.push(sample_corner_stats(n, cfg.count, cfg.seed)?);
    }
    Ok(match cfg.format {
        Format::Json if stats.len() == 1 => json_text(&stats[0]),
        Format::Json => json_text(&stats),
        _ => {
            let mut s = String::from(tableau_corners::sampler::SampleStats::csv_header());
            s.push('\n');
            for st in &stats {
                s.push_str(&st.to_csv_row());
                s.push('\n');
            }
            s
        }
    })
}

#[derive(Serialize)]
struct PasepRow {
    state: String,
    activity: usize,
    right_jumps: String,
    left_jumps: String,
    can_enter: bool,
    can_exit: bool,
}

fn join(v: &[usize]) -> String {
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn cmd_pasep(cfg: &RunConfig) -> Result<String, UserError> {
    let path = cfg.input.as_ref().expect("validated");
    let text = fs::read_to_string(path)
        .map_err(|e| UserError(format!("cannot read {}: {e}", path.display())))?;
    let t = match TableauDoc::from_json(&text)?.into_tableau()? {
        Tableau::TreeLike(t) => t,
        Tableau::Permutation(_) => {
            return Err(UserError("pasep needs a tree-like tableau (\"family\": \"treelike\")".into()))
        }
    };
    let report = pasep_report(&t);
    Ok(match cfg.format {
        Format::Csv => csv([PasepRow {
            activity: report.activity,
            right_jumps: join(&report.moves.right_jumps),
            left_jumps: join(&report.moves.left_jumps),
            can_enter: report.moves.can_enter,
            can_exit: report.moves.can_exit,
            state: report.state,
        }]),
        _ => json_text(&report),
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Output, UserError> {
    let report = verify::run(&VerifyLimits::default())?;
    let text = match cfg.format {
        Format::Json => json_text(&report),
        Format::Csv => csv(&report.checks),
        Format::Text => report.to_string(),
    };
    Ok(Output {
        text,
        ok: report.all_passed(),
    })
}
