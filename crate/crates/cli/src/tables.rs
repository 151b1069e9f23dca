use std::fmt::Write as _;

use kedge::bounds::{cr_lower_bound, halving_upper_bound, BoundTable, Pipeline};
use kedge::golden::{SECTION5, TABLE1, TABLE2};
use rayon::prelude::*;
use serde_json::json;

use crate::{print_json, CliResult, Failure, Format, TableKind};

fn opt(v: Option<i128>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

pub fn bound_table(t: &BoundTable, format: Format) -> String {
    let mut out = String::new();
    let header = ["k", "binomial", "u_k", "u'_k", "explicit", "best", "source"];
    let rows: Vec<[String; 7]> = t
        .rows
        .iter()
        .map(|r| {
            [
                r.k.to_string(),
                r.three_binomial.to_string(),
                opt(r.u_k),
                opt(r.u_prime_k),
                r.explicit.map_or_else(|| "-".into(), |x| format!("{x:.3}")),
                r.best.to_string(),
                serde_json::to_value(r.source)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
            ]
        })
        .collect();
    if format == Format::Csv {
        let _ = writeln!(out, "{}", header.join(","));
        for r in &rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        return out;
    }
    let _ = writeln!(out, "n = {}", t.n);
    let widths: Vec<usize> = (0..7)
        .map(|i| {
            rows.iter()
                .map(|r| r[i].len())
                .chain([header[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let _ = writeln!(out, "{}", line(header.to_vec()));
    for r in &rows {
        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
    }
    out
}

/// Rows of a horizontal table, first cell is the row name.
fn horizontal(rows: &[(&str, Vec<String>)]) -> String {
    let cols = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let width = |i: usize| {
        rows.iter()
            .filter_map(|r| r.1.get(i))
            .map(String::len)
            .max()
            .unwrap_or(0)
    };
    let name_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (name, cells) in rows {
        let mut line = format!("{name:<name_w$}");
        for i in 0..cols {
            let w = width(i);
            let _ = write!(line, "  {:>w$}", cells.get(i).map_or("", String::as_str));
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

fn emit(rows: &[(&str, Vec<String>)], format: Format) {
    match format {
        Format::Text => {
            // Wide tables wrap every 12 columns.
            let cols = rows[0].1.len();
            let blocks: Vec<String> = (0..cols)
                .step_by(12)
                .map(|lo| {
                    let part: Vec<(&str, Vec<String>)> = rows
                        .iter()
                        .map(|r| (r.0, r.1[lo..cols.min(lo + 12)].to_vec()))
                        .collect();
                    horizontal(&part)
                })
                .collect();
            print!("{}", blocks.join("\n"));
        }
        Format::Csv => {
            let names: Vec<&str> = rows.iter().map(|r| r.0).collect();
            println!("{}", names.join(","));
            for i in 0..rows[0].1.len() {
                let cells: Vec<&str> = rows.iter().map(|r| r.1[i].as_str()).collect();
                println!("{}", cells.join(","));
            }
        }
        Format::Json => {
            let cols: Vec<serde_json::Value> = (0..rows[0].1.len())
                .map(|i| {
                    let obj: serde_json::Map<String, serde_json::Value> = rows
                        .iter()
                        .map(|r| (r.0.to_string(), json!(r.1[i].parse::<i64>().ok())))
                        .collect();
                    serde_json::Value::Object(obj)
                })
                .collect();
            print_json(&json!(cols));
        }
    }
}

fn strings(v: &[i128]) -> Vec<String> {
    v.iter().map(i128::to_string).collect()
}

fn section5_values(ns: &[usize]) -> CliResult<Vec<i128>> {
    ns.par_iter()
        .map(|&n| Ok(cr_lower_bound(n, Pipeline::Section5)?.value))
        .collect()
}

pub fn cr_table(from: usize, to: usize, format: Format) -> CliResult<()> {
    if from > to {
        return Err(Failure::Input(format!("empty range {from}..{to}")));
    }
    let ns: Vec<usize> = (from..=to).collect();
    let values = section5_values(&ns)?;
    let n_col: Vec<i128> = ns.iter().map(|&n| n as i128).collect();
    emit(&[("n", strings(&n_col)), ("cr", strings(&values))], format);
    Ok(())
}

/// Recomputes a published table; with `check` any disagreement with the
/// reference values is an error naming the offending `n`.
pub fn published(which: TableKind, check: bool, format: Format) -> CliResult<()> {
    let mut mismatches: Vec<String> = Vec::new();
    let mut expect = |what: &str, n: usize, got: i128, want: i128| {
        if got != want {
            mismatches.push(format!(
                "{what} at n = {n}: computed {got}, reference {want}"
            ));
        }
    };
    match which {
        TableKind::Table1 => {
            let ns: Vec<usize> = TABLE1.iter().map(|r| r.0).collect();
            let rows: Vec<(i128, i128)> = ns
                .par_iter()
                .map(|&n| {
                    Ok((
                        halving_upper_bound(n)?,
                        cr_lower_bound(n, Pipeline::Table1)?.value,
                    ))
                })
                .collect::<CliResult<_>>()?;
            for (&(n, h, cr), &(gh, gcr)) in TABLE1.iter().zip(&rows) {
                expect("h", n, gh, h);
                expect("cr", n, gcr, cr);
            }
            let n_col: Vec<i128> = ns.iter().map(|&n| n as i128).collect();
            let h: Vec<i128> = rows.iter().map(|r| r.0).collect();
            let cr: Vec<i128> = rows.iter().map(|r| r.1).collect();
            emit(
                &[
                    ("n", strings(&n_col)),
                    ("h", strings(&h)),
                    ("cr", strings(&cr)),
                ],
                format,
            );
        }
        TableKind::Table2 => {
            let mut upper = Vec::new();
            for &(n, _, want) in &TABLE2 {
                let got = halving_upper_bound(n)?;
                expect("upper", n, got, want);
                upper.push(got);
            }
            let n_col: Vec<i128> = TABLE2.iter().map(|r| r.0 as i128).collect();
            let lower: Vec<i128> = TABLE2.iter().map(|r| r.1).collect();
            emit(
                &[
                    ("n", strings(&n_col)),
                    ("lower", strings(&lower)),
                    ("upper", strings(&upper)),
                ],
                format,
            );
        }
        TableKind::Section5 => {
            let ns: Vec<usize> = SECTION5.iter().map(|r| r.0).collect();
            let values = section5_values(&ns)?;
            for (&(n, want), &got) in SECTION5.iter().zip(&values) {
                expect("cr", n, got, want);
            }
            let n_col: Vec<i128> = ns.iter().map(|&n| n as i128).collect();
            emit(&[("n", strings(&n_col)), ("cr", strings(&values))], format);
        }
    }
    if !check {
        return Ok(());
    }
    if mismatches.is_empty() {
        eprintln!("check: all entries match the reference values");
        Ok(())
    } else {
        Err(Failure::Check(mismatches.join("; ")))
    }
}
