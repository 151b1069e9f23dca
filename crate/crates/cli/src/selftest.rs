use std::time::{Duration, Instant};

use kedge::bounds::{
    asymptotic_constants, cr_lower_bound, halving_upper_bound, lemma_brackets, Pipeline,
};
use kedge::central::verify_central;
use kedge::constructions::{
    bichromatic_split, build_cluster_polygon, build_polygon_center, build_sr, expected_bichromatic,
    expected_leq, expected_monochromatic, SrConfig,
};
use kedge::golden::{SECTION5, TABLE1, TABLE2};
use kedge::random::random_general_position;
use kedge::sequence::{halfperiod_from_points, TieBreak};
use kedge::stats::{edge_vector_from_halfperiod, summarize_points};
use kedge::PointSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{CliResult, Failure, Scope};

struct Outcome {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    limit: Duration,
}

fn timed(
    id: u32,
    name: &'static str,
    limit_secs: u64,
    f: impl FnOnce() -> Result<(), String>,
) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_secs);
    let (passed, detail) = match result {
        Ok(()) if elapsed <= limit => (true, String::new()),
        Ok(()) => (false, format!("over the {limit_secs} s limit")),
        Err(e) => (false, e),
    };
    Outcome {
        id,
        name,
        passed,
        detail,
        elapsed,
        limit,
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: kedge::Error) -> String {
    e.to_string()
}

/// Random general-position sets, one seed per trial so the corpus does not
/// depend on thread scheduling.
fn corpus(seed: u64, trials: usize, nmax: usize) -> Vec<PointSet> {
    let span = nmax.saturating_sub(4).max(1);
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ i as u64);
            random_general_position(&mut rng, 5 + i % span, 1000)
        })
        .collect()
}

fn bounds_scope(out: &mut Vec<Outcome>) {
    out.push(timed(
        1,
        "halving-line upper bounds, exact sizes",
        1,
        || {
            for &(n, h, _) in &TABLE1 {
                let got = halving_upper_bound(n).map_err(err)?;
                require(got == h, || format!("n = {n}: {got} != {h}"))?;
            }
            Ok(())
        },
    ));
    out.push(timed(2, "crossing-number bounds, exact sizes", 1, || {
        for &(n, _, cr) in &TABLE1 {
            let got = cr_lower_bound(n, Pipeline::Table1).map_err(err)?.value;
            require(got == cr, || format!("n = {n}: {got} != {cr}"))?;
        }
        Ok(())
    }));
    out.push(timed(
        3,
        "halving-line upper bounds, 28 <= n <= 33",
        1,
        || {
            for &(n, _, upper) in &TABLE2 {
                let got = halving_upper_bound(n).map_err(err)?;
                require(got == upper, || format!("n = {n}: {got} != {upper}"))?;
            }
            Ok(())
        },
    ));
    out.push(timed(4, "crossing-number bounds, 28 <= n <= 99", 5, || {
        let bad: Vec<String> = SECTION5
            .par_iter()
            .filter_map(|&(n, cr)| match cr_lower_bound(n, Pipeline::Section5) {
                Ok(r) if r.value == cr => None,
                Ok(r) => Some(format!("n = {n}: {} != {cr}", r.value)),
                Err(e) => Some(format!("n = {n}: {e}")),
            })
            .collect();
        require(bad.is_empty(), || bad.join("; "))
    }));
    out.push(timed(10, "asymptotic constants", 1, || {
        let a = asymptotic_constants();
        require(a.passes, || format!("{a:?}"))
    }));
    out.push(timed(11, "lemma brackets, 6 <= n <= 200", 10, || {
        let bad: Vec<String> = (6..=200usize)
            .into_par_iter()
            .filter_map(|n| match lemma_brackets(n) {
                Ok(r) if r.passes() => None,
                Ok(r) => Some(format!("n = {n}: {:?}", r.violations)),
                Err(e) => Some(format!("n = {n}: {e}")),
            })
            .collect();
        require(bad.is_empty(), || bad.join("; "))
    }));
}

fn central_scope(out: &mut Vec<Outcome>, seed: u64, trials: usize, nmax: usize) {
    let sets = corpus(seed, trials, nmax);
    out.push(timed(
        7,
        "crossing identity and sweep edge vectors",
        60,
        || {
            let bad: Vec<String> = sets
                .par_iter()
                .enumerate()
                .filter_map(|(i, set)| {
                    let check = || -> kedge::Result<bool> {
                        let r = summarize_points(set)?;
                        let h = halfperiod_from_points(set, TieBreak::Error)?;
                        Ok(r.identity_holds() && edge_vector_from_halfperiod(&h)? == r.edge_vector)
                    };
                    match check() {
                        Ok(true) => None,
                        Ok(false) => Some(format!("trial {i}")),
                        Err(e) => Some(format!("trial {i}: {e}")),
                    }
                })
                .collect();
            require(bad.is_empty(), || bad.join("; "))
        },
    ));
    out.push(timed(
        8,
        "central inequality and auxiliary checks",
        120,
        || {
            let bad: Vec<String> = sets
                .par_iter()
                .enumerate()
                .flat_map_iter(|(i, set)| {
                    let n = set.len();
                    let h = halfperiod_from_points(set, TieBreak::Error);
                    (1..=(n - 1) / 2).filter_map(move |k| {
                        let h = h.as_ref().map_err(|e| e.to_string());
                        match h.and_then(|h| verify_central(h, k).map_err(err)) {
                            Ok(r) if r.all_hold() => None,
                            Ok(r) => Some(format!("trial {i}, k = {k}: {:?}", r.failures())),
                            Err(e) => Some(format!("trial {i}, k = {k}: {e}")),
                        }
                    })
                })
                .collect();
            require(bad.is_empty(), || bad.join("; "))
        },
    ));
}

fn constructions_scope(out: &mut Vec<Outcome>, rmax: usize) {
    out.push(timed(5, "S_r tightness of E_<=k", 120, || {
        for r in 3..=rmax {
            let c = build_sr(&SrConfig::new(r)).map_err(err)?;
            let want: Vec<u64> = (0..4 * r).map(|k| expected_leq(r, k)).collect();
            require(c.leq == want, || {
                format!("r = {r}: {:?} != {want:?}", c.leq)
            })?;
        }
        Ok(())
    }));
    out.push(timed(
        6,
        "S_3 bichromatic and monochromatic split",
        5,
        || {
            let c = build_sr(&SrConfig::new(3)).map_err(err)?;
            let (bi, mono) =
                bichromatic_split(&c.perturbed.points, &c.perturbed.letters()).map_err(err)?;
            for k in 0..12 {
                let want = (expected_bichromatic(3, k), expected_monochromatic(3, k));
                require((bi[k], mono[k]) == want, || {
                    format!("k = {k}: {:?} != {want:?}", (bi[k], mono[k]))
                })?;
            }
            Ok(())
        },
    ));
    out.push(timed(9, "equality constructions", 5, || {
        let pc = build_polygon_center(3, 9, 12).map_err(err)?.report;
        require(
            (pc.e_k_minus_1, pc.e_geq_k, pc.s) == (7, 15, 2) && pc.matches(),
            || format!("polygon-center: {pc:?}"),
        )?;
        let cp = build_cluster_polygon(1, 3, None, 12).map_err(err)?.report;
        require(
            (cp.e_k_minus_1, cp.e_geq_k, cp.s) == (9, 18, 0) && cp.matches(),
            || format!("cluster-polygon: {cp:?}"),
        )
    }));
}

pub fn run(scope: Scope, seed: u64, trials: usize, nmax: usize, rmax: usize) -> CliResult<()> {
    if nmax < 5 || rmax < 3 {
        return Err(Failure::Input("need --nmax >= 5 and --rmax >= 3".into()));
    }
    let mut out = Vec::new();
    if matches!(scope, Scope::Bounds | Scope::All) {
        bounds_scope(&mut out);
    }
    if matches!(scope, Scope::Central | Scope::All) {
        central_scope(&mut out, seed, trials, nmax);
    }
    if matches!(scope, Scope::Constructions | Scope::All) {
        constructions_scope(&mut out, rmax);
    }
    out.sort_by_key(|o| o.id);
    for o in &out {
        println!(
            "{} criterion {:>2}  {:<45} {:>8.3} s (limit {} s){}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.elapsed.as_secs_f64(),
            o.limit.as_secs(),
            if o.detail.is_empty() {
                String::new()
            } else {
                format!("  {}", o.detail)
            },
        );
    }
    let failed: Vec<String> = out
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id.to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "failed criteria: {}",
            failed.join(", ")
        )))
    }
}
