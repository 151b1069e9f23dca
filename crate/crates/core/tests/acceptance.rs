//! Acceptance suite: one PASS/FAIL line per criterion, with wall-clock
//! limits. Expected values are spelled out here rather than taken from the
//! library's own tables.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kedge::bounds::{
    asymptotic_constants, cr_lower_bound, halving_upper_bound, lemma_brackets, Pipeline,
};
use kedge::central::verify_central;
use kedge::constructions::{
    bichromatic_split, build_cluster_polygon, build_polygon_center, build_sr, SrConfig,
};
use kedge::golden::SECTION5;
use kedge::random::random_general_position;
use kedge::sequence::{halfperiod_from_points, TieBreak};
use kedge::stats::{
    crossings_bruteforce, crossings_from_edge_vector, edge_vector_bruteforce,
    edge_vector_from_halfperiod,
};
use kedge::PointSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXACT_N: [usize; 10] = [14, 16, 18, 20, 22, 23, 24, 25, 26, 27];

fn c2(x: i64) -> u64 {
    if x < 2 {
        0
    } else {
        (x * (x - 1) / 2) as u64
    }
}

/// Three-regime formula for `n = 9r`, restated independently.
fn tight_leq(r: usize, k: usize) -> u64 {
    let (r, k) = (r as i64, k as i64);
    if k < 3 * r {
        3 * c2(k + 2)
    } else if k <= 4 * r - 2 {
        3 * c2(k + 2) + 3 * c2(k - 3 * r + 2)
    } else {
        3 * c2(4 * r + 1) + 3 * c2(r + 1) + 3
    }
}

fn corpus() -> Vec<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..504)
        .map(|i| random_general_position(&mut rng, 5 + i % 8, 1000))
        .collect()
}

fn criterion(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Result<(), String>) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let verdict = match result {
        Ok(()) if elapsed <= limit => Ok(()),
        Ok(()) => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
        Err(e) => Err(e),
    };
    match &verdict {
        Ok(()) => println!("PASS  {id:>2}  {name}  ({elapsed:.2?})"),
        Err(e) => println!("FAIL  {id:>2}  {name}  ({elapsed:.2?}): {e}"),
    }
    verdict.is_ok()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    cond.then_some(()).ok_or_else(msg)
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() -> ExitCode {
    let mut ok = true;

    ok &= criterion(
        1,
        "halving-line bounds for the exactly determined sizes",
        secs(1),
        || {
            let want = [22, 27, 33, 38, 44, 75, 51, 85, 57, 96];
            let got: Vec<i128> = EXACT_N
                .iter()
                .map(|&n| halving_upper_bound(n).unwrap())
                .collect();
            check(got == want, || format!("{got:?}"))
        },
    );

    ok &= criterion(
        2,
        "crossing-number bounds for the exactly determined sizes",
        secs(1),
        || {
            let want = [324, 603, 1029, 1657, 2528, 3077, 3699, 4430, 5250, 6180];
            let got: Vec<i128> = EXACT_N
                .iter()
                .map(|&n| cr_lower_bound(n, Pipeline::Table1).unwrap().value)
                .collect();
            check(got == want, || format!("{got:?}"))
        },
    );

    ok &= criterion(3, "halving-line bounds for 28 <= n <= 33", secs(1), || {
        let got: Vec<i128> = (28..=33).map(|n| halving_upper_bound(n).unwrap()).collect();
        check(got == [64, 107, 72, 118, 79, 130], || format!("{got:?}"))
    });

    ok &= criterion(
        4,
        "crossing-number bounds for 28 <= n <= 99",
        secs(5),
        || {
            let got: Vec<(usize, i128)> = (28..=99)
                .map(|n| (n, cr_lower_bound(n, Pipeline::Section5).unwrap().value))
                .collect();
            check(got == SECTION5, || "table mismatch".into())?;
            let anchor = |n: usize| got[n - 28].1;
            check(
                (anchor(28), anchor(39), anchor(50), anchor(99)) == (7233, 29691, 84146, 1402932),
                || "anchor mismatch".into(),
            )
        },
    );

    ok &= criterion(
        5,
        "S_r attains the lower bound on E_<=k for r = 3, 4, 5",
        secs(120),
        || {
            for r in 3..=5 {
                let c = build_sr(&SrConfig::new(r)).map_err(|e| e.to_string())?;
                let v = edge_vector_bruteforce(&c.perturbed_set()).map_err(|e| e.to_string())?;
                for k in 0..4 * r {
                    check(v.leq(k) == tight_leq(r, k), || {
                        format!("r = {r}, k = {k}: {} != {}", v.leq(k), tight_leq(r, k))
                    })?;
                }
            }
            Ok(())
        },
    );

    ok &= criterion(
        6,
        "bichromatic and monochromatic split on S_3",
        secs(5),
        || {
            let c = build_sr(&SrConfig::new(3)).map_err(|e| e.to_string())?;
            let (bi, mono) = bichromatic_split(&c.perturbed.points, &c.perturbed.letters())
                .map_err(|e| e.to_string())?;
            for k in 0..12usize {
                let kk = k as i64;
                let want_bi = if k <= 8 {
                    3 * c2(kk + 2)
                } else {
                    3 * c2(10) + (kk - 8) as u64 * 27
                };
                let want_mono = match k {
                    0..=8 => 0,
                    9..=10 => 6 * c2(kk - 7),
                    _ => 6 * c2(4) + 3,
                };
                check((bi[k], mono[k]) == (want_bi, want_mono), || {
                    format!(
                        "k = {k}: ({}, {}) != ({want_bi}, {want_mono})",
                        bi[k], mono[k]
                    )
                })?;
            }
            check((bi[11], mono[11]) == (216, 39), || "k = 11 anchor".into())
        },
    );

    let sets = corpus();

    ok &= criterion(
        7,
        "crossing identity and swept edge vectors on random sets",
        secs(60),
        || {
            for (i, set) in sets.iter().enumerate() {
                let v = edge_vector_bruteforce(set).map_err(|e| e.to_string())?;
                let cr = crossings_bruteforce(set).map_err(|e| e.to_string())? as i128;
                let (f1, f2) = crossings_from_edge_vector(&v);
                check(cr == f1 && cr == f2, || {
                    format!("set {i}: {cr} vs {f1}, {f2}")
                })?;
                let h = halfperiod_from_points(set, TieBreak::Error).map_err(|e| e.to_string())?;
                let swept = edge_vector_from_halfperiod(&h).map_err(|e| e.to_string())?;
                check(swept == v, || format!("set {i}: swept vector differs"))?;
            }
            Ok(())
        },
    );

    ok &= criterion(
        8,
        "central inequality with auxiliary checks on random sets",
        secs(120),
        || {
            for (i, set) in sets.iter().enumerate() {
                let h = halfperiod_from_points(set, TieBreak::Error).map_err(|e| e.to_string())?;
                for k in 1..=(set.len() - 1) / 2 {
                    let r = verify_central(&h, k).map_err(|e| e.to_string())?;
                    check(r.all_hold(), || {
                        format!("set {i}, k = {k}: {:?}", r.failures())
                    })?;
                }
            }
            Ok(())
        },
    );

    ok &= criterion(9, "equality constructions", secs(5), || {
        let pc = build_polygon_center(3, 9, 12).map_err(|e| e.to_string())?;
        let v = edge_vector_bruteforce(&pc.set).map_err(|e| e.to_string())?;
        check((v.e(2), v.geq(3), pc.report.s) == (7, 15, 2), || {
            format!("{:?}", pc.report)
        })?;
        // (n-2k-1) E_{k-1} + C(s,2) = 2*7 + 1
        check(v.geq(3) == 2 * 7 + 1, || "no equality".into())?;
        let cp = build_cluster_polygon(1, 3, None, 12).map_err(|e| e.to_string())?;
        let v = edge_vector_bruteforce(&cp.set).map_err(|e| e.to_string())?;
        check((v.e(2), v.geq(3), cp.report.s) == (9, 18, 0), || {
            format!("{:?}", cp.report)
        })
    });

    ok &= criterion(
        10,
        "asymptotic constants by numerical integration",
        secs(1),
        || {
            let a = asymptotic_constants();
            check((a.first_integral - 86.0 / 243.0).abs() < 1e-9, || {
                format!("{}", a.first_integral)
            })?;
            check((a.second_integral - 19.0 / 729.0).abs() < 1e-9, || {
                format!("{}", a.second_integral)
            })?;
            check((a.sum - 277.0 / 729.0).abs() < 1e-9, || {
                format!("{}", a.sum)
            })?;
            let limit = 2.0 / 27.0 * (15.0 - std::f64::consts::PI.powi(2));
            check(limit > 0.380029, || format!("{limit}"))
        },
    );

    ok &= criterion(11, "lemma brackets for 6 <= n <= 200", secs(10), || {
        for n in 6..=200 {
            let r = lemma_brackets(n).map_err(|e| e.to_string())?;
            check(r.passes(), || format!("n = {n}: {:?}", r.violations))?;
        }
        Ok(())
    });

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
