//! Block structure, rearrangement and classification of k-critical
//! transpositions, and the resulting upper bound on `E_≥k`.
//!
//! Conventions: `k`-critical swaps sit at positions `k` (left boundary of the
//! k-center) or `n-k` (right boundary). Swaps at positions `k+1 ..= n-k-1`
//! act inside the k-center and are the `(≥k+1)`-critical ones. Block `j ≥ 1`
//! is `τ_j` together with every swap strictly before `τ_{j+1}`; block 0 is
//! everything before `τ_1`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geom::{int, Rational};
use crate::sequence::{compute_s, Halfperiod};
use crate::stats::{binom2, edge_vector_from_positions};

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || 2 * k >= n {
        Err(Error::KOutOfRange { k, n })
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Swap at position `k`: the entering label comes from the left.
    Left,
    /// Swap at position `n - k`.
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub index: usize,
    /// Transposition indices (0-based) `start..end`; for `index ≥ 1` the
    /// first one is `τ_index`.
    pub start: usize,
    pub end: usize,
    pub side: Option<Side>,
    /// `p_j`, the label entering the k-center with `τ_j`.
    pub entering: Option<usize>,
    /// The label pushed out of the k-center by `τ_j`.
    pub leaving: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Outer,
    Critical(Side),
    Inner,
}

fn kind(n: usize, k: usize, position: usize) -> Kind {
    if position == k {
        Kind::Critical(Side::Left)
    } else if position == n - k {
        Kind::Critical(Side::Right)
    } else if position > k && position < n - k {
        Kind::Inner
    } else {
        Kind::Outer
    }
}

/// The `K + 1` blocks, `K` being the number of k-critical transpositions.
pub fn blocks(h: &Halfperiod, k: usize) -> Result<Vec<Block>> {
    let n = h.n();
    check_k(n, k)?;
    let total = h.transpositions().len();
    let mut out = vec![Block {
        index: 0,
        start: 0,
        end: total,
        side: None,
        entering: None,
        leaving: None,
    }];
    let mut perm = h.initial().to_vec();
    for (i, t) in h.transpositions().iter().enumerate() {
        let j = t.position;
        if let Kind::Critical(side) = kind(n, k, j) {
            let (left, right) = (perm[j - 1], perm[j]);
            let (entering, leaving) = match side {
                Side::Left => (left, right),
                Side::Right => (right, left),
            };
            out.last_mut().expect("block 0").end = i;
            out.push(Block {
                index: out.len(),
                start: i,
                end: total,
                side: Some(side),
                entering: Some(entering),
                leaving: Some(leaving),
            });
        }
        perm.swap(j - 1, j);
    }
    Ok(out)
}

/// Indices of the `(≥k+1)`-critical transpositions of block `b` (`b ≥ 1`)
/// that do not involve its entering label.
fn nonessential(h: &Halfperiod, k: usize, b: &Block) -> Vec<usize> {
    let n = h.n();
    let Some(p) = b.entering else {
        return Vec::new();
    };
    (b.start + 1..b.end)
        .filter(|&i| {
            let t = &h.transpositions()[i];
            kind(n, k, t.position) == Kind::Inner && t.pair.0 != p && t.pair.1 != p
        })
        .collect()
}

/// Number of nonessential transpositions over all blocks.
pub fn count_nonessential(h: &Halfperiod, k: usize) -> Result<usize> {
    Ok(blocks(h, k)?
        .iter()
        .map(|b| nonessential(h, k, b).len())
        .sum())
}

/// Rewrites block `j`: its nonessential swaps move right before `τ_j`, the
/// swaps of `p_j` follow `τ_j` consecutively, then the swaps outside the
/// k-center in their original order. The permutation at the end of the
/// block is unchanged.
pub fn rearrange_block(h: &Halfperiod, k: usize, blocks: &[Block], j: usize) -> Result<Halfperiod> {
    let n = h.n();
    let b = blocks
        .get(j)
        .filter(|b| b.index >= 1)
        .ok_or_else(|| Error::Precondition(format!("block {j} has no critical transposition")))?;
    let (side, p) = (b.side.expect("critical"), b.entering.expect("critical"));
    let positions = h.positions();
    let before = h.permutation_at(b.start);
    let target = h.permutation_at(b.end);
    let mut rank = vec![0; n];
    for (slot, &l) in target.iter().enumerate() {
        rank[l] = slot;
    }

    let mut out: Vec<usize> = positions[..b.start].to_vec();
    let mut perm = before;
    let swap = |perm: &mut Vec<usize>, out: &mut Vec<usize>, slot: usize| {
        perm.swap(slot, slot + 1);
        out.push(slot + 1);
    };

    // Slots (0-based) of the other center labels while the leaving label
    // still sits on the boundary.
    let (lo, hi) = match side {
        Side::Left => (k + 1, n - k - 1),
        Side::Right => (k, n - k - 2),
    };
    loop {
        let mut changed = false;
        for s in lo..hi {
            if rank[perm[s]] > rank[perm[s + 1]] {
                swap(&mut perm, &mut out, s);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    swap(&mut perm, &mut out, positions[b.start] - 1);
    match side {
        Side::Left => {
            let mut slot = k;
            while slot < rank[p] {
                swap(&mut perm, &mut out, slot);
                slot += 1;
            }
        }
        Side::Right => {
            let mut slot = n - k - 1;
            while slot > rank[p] {
                swap(&mut perm, &mut out, slot - 1);
                slot -= 1;
            }
        }
    }
    for &pos in &positions[b.start + 1..b.end] {
        if kind(n, k, pos) == Kind::Outer {
            swap(&mut perm, &mut out, pos - 1);
        }
    }
    if perm != target {
        return Err(Error::Verification(format!(
            "rearranging block {j} changed its final permutation"
        )));
    }
    if out.len() != b.end {
        return Err(Error::Verification(format!(
            "rearranging block {j} changed the number of transpositions"
        )));
    }
    out.extend_from_slice(&positions[b.end..]);
    let lambda = Halfperiod::from_positions(n, h.initial().to_vec(), &out)?;
    lambda
        .ensure_valid()
        .map_err(|e| Error::Verification(format!("rearranging block {j} broke validity: {e}")))?;
    Ok(lambda)
}

/// Repeats [`rearrange_block`] from the last block down to block 1 until
/// no `(≥k+1)`-critical transposition is nonessential.
pub fn rearrange_essential(h: &Halfperiod, k: usize) -> Result<Halfperiod> {
    h.ensure_valid()?;
    let n = h.n();
    let mut cur = h.clone();
    let count = blocks(&cur, k)?.len() - 1;
    for j in (1..=count).rev() {
        let bs = blocks(&cur, k)?;
        if !nonessential(&cur, k, &bs[j]).is_empty() {
            cur = rearrange_block(&cur, k, &bs, j)?;
        }
    }
    if count_nonessential(&cur, k)? != 0 {
        return Err(Error::Verification(
            "nonessential transpositions remain".into(),
        ));
    }
    let before = edge_vector_from_positions(n, h.positions());
    let after = edge_vector_from_positions(n, cur.positions());
    if before[..k] != after[..k]
        || before[k..].iter().sum::<u64>() != after[k..].iter().sum::<u64>()
    {
        return Err(Error::Verification(format!(
            "rearrangement changed low-level edge counts: {before:?} -> {after:?}"
        )));
    }
    Ok(cur)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class", content = "m")]
pub enum Class {
    ArrivingAugmenting(usize),
    ArrivingNeutral,
    Returning,
    DepartingCutting,
    DepartingStalling,
    NonCritical,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::ArrivingAugmenting(m) => write!(f, "{m}-augmenting"),
            Class::ArrivingNeutral => write!(f, "neutral"),
            Class::Returning => write!(f, "returning"),
            Class::DepartingCutting => write!(f, "cutting"),
            Class::DepartingStalling => write!(f, "stalling"),
            Class::NonCritical => write!(f, "non-critical"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranspositionRecord {
    pub step: usize,
    pub position: usize,
    pub block_index: usize,
    pub class: Class,
    /// Only for k-critical transpositions.
    pub weight: Option<usize>,
    pub heavy: Option<bool>,
    /// Only for `(≥k+1)`-critical transpositions.
    pub essential: Option<bool>,
}

/// Records of the rearranged halfperiod, on which classes are defined.
#[derive(Clone, Debug)]
pub struct Classification {
    pub k: usize,
    pub s: usize,
    pub rearranged: Halfperiod,
    pub nonessential_in_input: usize,
    pub records: Vec<TranspositionRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Region {
    L,
    C,
    R,
}

pub fn classify(h: &Halfperiod, k: usize) -> Result<Classification> {
    let nonessential_in_input = count_nonessential(h, k)?;
    let lambda = rearrange_essential(h, k)?;
    let s = compute_s(&lambda, k)?.s_value;
    let records = classify_all_essential(&lambda, k, s)?;
    Ok(Classification {
        k,
        s,
        rearranged: lambda,
        nonessential_in_input,
        records,
    })
}

fn classify_all_essential(h: &Halfperiod, k: usize, s: usize) -> Result<Vec<TranspositionRecord>> {
    let n = h.n();
    let bs = blocks(h, k)?;
    let mut region = vec![Region::C; n];
    for (slot, &l) in h.initial().iter().enumerate() {
        region[l] = if slot < k {
            Region::L
        } else if slot >= n - k {
            Region::R
        } else {
            Region::C
        };
    }
    let light_cap = n - 2 * k - 1 - s;
    let mut block_of = vec![0; h.transpositions().len()];
    for b in &bs {
        block_of[b.start..b.end]
            .iter_mut()
            .for_each(|x| *x = b.index);
    }

    let mut records: Vec<TranspositionRecord> = h
        .transpositions()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let b = &bs[block_of[i]];
            let essential = (kind(n, k, t.position) == Kind::Inner).then_some(match b.entering {
                None => true,
                Some(p) => t.pair.0 == p || t.pair.1 == p,
            });
            TranspositionRecord {
                step: t.step,
                position: t.position,
                block_index: b.index,
                class: Class::NonCritical,
                weight: None,
                heavy: None,
                essential,
            }
        })
        .collect();

    let mut in_center = 0usize;
    for &l in &h.initial()[k..n - k] {
        if region[l] == Region::C {
            in_center += 1;
        }
    }
    for b in bs.iter().skip(1) {
        let (side, p, q) = (
            b.side.expect("critical"),
            b.entering.expect("critical"),
            b.leaving.expect("critical"),
        );
        let class = if region[p] == Region::C {
            if region[q] == Region::C {
                Class::ArrivingNeutral
            } else {
                Class::ArrivingAugmenting(in_center + 1)
            }
        } else if (side == Side::Left) == (region[p] == Region::R) {
            Class::Returning
        } else {
            // The next k-critical swap of p is its exit from the center.
            let exit = bs[b.index + 1..]
                .iter()
                .find(|c| c.leaving == Some(p))
                .and_then(|c| c.side)
                .ok_or_else(|| {
                    Error::Verification(format!("label {} never leaves the center", p + 1))
                })?;
            if exit == side {
                Class::DepartingStalling
            } else {
                Class::DepartingCutting
            }
        };
        in_center =
            in_center + (region[p] == Region::C) as usize - (region[q] == Region::C) as usize;
        let weight = (b.start + 1..b.end)
            .filter(|&i| {
                let t = &h.transpositions()[i];
                kind(n, k, t.position) == Kind::Inner
                    && !(region[t.pair.0] == Region::C && region[t.pair.1] == Region::C)
            })
            .count();
        let r = &mut records[b.start];
        r.class = class;
        r.weight = Some(weight);
        r.heavy = Some(weight > light_cap);
    }
    Ok(records)
}

fn rational_str<S: Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralReport {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    /// `K = E_{k-1}`.
    pub critical: usize,
    pub augmenting: usize,
    pub neutral: usize,
    pub returning: usize,
    pub cutting: usize,
    pub stalling_light: usize,
    pub stalling_heavy: usize,
    pub e_geq_k: u64,
    #[serde(serialize_with = "rational_str")]
    pub bound_value: Rational,
    pub holds: bool,
    pub nonessential_in_input: usize,
    pub checks: Vec<Check>,
}

impl CentralReport {
    /// Main inequality and every auxiliary check.
    pub fn all_hold(&self) -> bool {
        self.holds && self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }
}

/// Evaluates `E_≥k ≤ (n-2k-1)K - (s/2)(K-n+1)` on `h` and the auxiliary
/// inequalities of the classification on its rearrangement.
pub fn verify_central(h: &Halfperiod, k: usize) -> Result<CentralReport> {
    h.ensure_valid()?;
    let n = h.n();
    check_k(n, k)?;
    let e = edge_vector_from_positions(n, h.positions());
    let big_k = e[k - 1] as usize;
    let e_geq_k: u64 = e[k..].iter().sum();
    let s = compute_s(h, k)?.s_value;
    let (ni, ki, si, kk) = (n as i64, k as i64, s as i64, big_k as i64);
    let bound_value = int((ni - 2 * ki - 1) * kk) - int(si) / int(2) * int(kk - ni + 1);
    let holds = int(e_geq_k as i64) <= bound_value;

    let cls = classify(h, k)?;
    let lam = &cls.rearranged;
    let mut checks = Vec::new();
    let mut check = |name: &'static str, holds: bool, detail: String| {
        checks.push(Check {
            name,
            holds,
            detail,
        })
    };

    let e_lam = edge_vector_from_positions(n, lam.positions());
    check(
        "rearrangement preserves low levels",
        e_lam[..k] == e[..k] && e_lam[k..].iter().sum::<u64>() == e_geq_k,
        format!("{:?} -> {:?}", e, e_lam),
    );
    let s_lam = compute_s(lam, k)?.s_value;
    check(
        "rearrangement preserves s",
        s_lam == s,
        format!("{s} -> {s_lam}"),
    );

    let crit: Vec<&TranspositionRecord> =
        cls.records.iter().filter(|r| r.weight.is_some()).collect();
    let (mut a, mut nn, mut r, mut c, mut sl, mut sh) = (0, 0, 0, 0, 0, 0);
    let (mut sum_w, mut aug_heavy_w) = (0i64, 0i64);
    let mut augmented = vec![false; n - 2 * k + 1];
    let cap = n - 2 * k - 1;
    let light_cap = cap - s;
    let mut weight_ok = true;
    let mut weight_detail = String::new();
    for rec in &crit {
        let w = rec.weight.expect("critical");
        let heavy = rec.heavy.expect("critical");
        sum_w += w as i64;
        let limit = match rec.class {
            Class::ArrivingAugmenting(m) => {
                a += 1;
                aug_heavy_w += w as i64;
                if m < augmented.len() {
                    augmented[m] = true;
                }
                (n - 2 * k).saturating_sub(m)
            }
            Class::ArrivingNeutral => {
                nn += 1;
                n - 2 * k - s
            }
            Class::Returning => {
                r += 1;
                light_cap
            }
            Class::DepartingCutting => {
                c += 1;
                cap
            }
            Class::DepartingStalling if heavy => {
                sh += 1;
                aug_heavy_w += w as i64;
                cap
            }
            Class::DepartingStalling => {
                sl += 1;
                light_cap
            }
            Class::NonCritical => unreachable!("weights only on critical records"),
        };
        if w > limit.min(cap) {
            weight_ok = false;
            weight_detail = format!(
                "step {}: {} with weight {w} > {}",
                rec.step,
                rec.class,
                limit.min(cap)
            );
        }
    }
    check("weight bounds", weight_ok, weight_detail);
    check(
        "class tallies sum to K",
        a + nn + r + c + sl + sh == big_k && crit.len() == big_k,
        format!("{a}+{nn}+{r}+{c}+{sl}+{sh} vs {big_k}"),
    );
    check(
        "K >= n - s",
        big_k + s >= n,
        format!("K = {big_k}, n - s = {}", n - s),
    );
    check("cutting at least 2k", c >= 2 * k, format!("C = {c}"));
    check(
        "cutting upper bound",
        2 * c + n <= 4 * k + big_k + s,
        format!(
            "2C = {} vs 4k + K - n + s = {}",
            2 * c,
            (4 * k + big_k + s) as i64 - n as i64
        ),
    );
    check(
        "returning at least C - 2k",
        r + 2 * k >= c,
        format!("R = {r}, C = {c}"),
    );
    let missing: Vec<usize> = (s + 1..=n - 2 * k).filter(|&m| !augmented[m]).collect();
    check(
        "augmenting levels present",
        missing.is_empty(),
        format!("missing m = {missing:?}"),
    );
    let centre = (n - 2 * k) as i64;
    check(
        "degree count",
        e_geq_k as i64 <= binom2(centre as i128) as i64 - nn as i64 + sum_w,
        format!("{e_geq_k} <= C({centre},2) - {nn} + {sum_w}"),
    );
    let rhs = light_cap as i64 * (a + sh) as i64 - binom2((n - 2 * k - s) as i128) as i64;
    check(
        "augmenting and heavy stalling weights",
        aug_heavy_w <= rhs,
        format!("{aug_heavy_w} <= {rhs}"),
    );
    check(
        "relaxed form",
        e_geq_k as i64 <= cap as i64 * kk + binom2(s as i128) as i64,
        format!("{e_geq_k} <= {} + C({s},2)", cap as i64 * kk),
    );

    Ok(CentralReport {
        n,
        k,
        s,
        critical: big_k,
        augmenting: a,
        neutral: nn,
        returning: r,
        cutting: c,
        stalling_light: sl,
        stalling_heavy: sh,
        e_geq_k,
        bound_value,
        holds,
        nonessential_in_input: cls.nonessential_in_input,
        checks,
    })
}
