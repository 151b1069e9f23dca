//! Halfperiods of circular and allowable sequences.
//!
//! A halfperiod on `n` labels is an initial permutation followed by `C(n,2)`
//! adjacent transpositions after which the permutation is reversed and every
//! pair of labels has been swapped exactly once. Labels are `0..n` in memory
//! and `1..=n` in text. Slots and positions are 1-based: a transposition at
//! position `j` swaps the labels in slots `j` and `j + 1`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Point, PointSet, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transposition {
    /// 1-based index in the halfperiod.
    pub step: usize,
    /// Slots `(position, position + 1)` are swapped.
    pub position: usize,
    /// Labels in the two slots before the swap, left one first.
    pub pair: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfperiod {
    n: usize,
    initial: Vec<usize>,
    transpositions: Vec<Transposition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    InitialNotPermutation,
    WrongLength {
        expected: usize,
        found: usize,
    },
    StepMislabelled {
        index: usize,
        step: usize,
    },
    PositionOutOfRange {
        step: usize,
        position: usize,
    },
    NotAdjacent {
        step: usize,
        pair: (usize, usize),
        found: (usize, usize),
    },
    PairRepeated {
        pair: (usize, usize),
        first: usize,
        again: usize,
    },
    PairNeverSwapped {
        pair: (usize, usize),
    },
    NotReversed,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InitialNotPermutation => write!(f, "initial sequence is not a permutation"),
            Violation::WrongLength { expected, found } => {
                write!(f, "expected {expected} transpositions, found {found}")
            }
            Violation::StepMislabelled { index, step } => {
                write!(f, "transposition #{index} carries step number {step}")
            }
            Violation::PositionOutOfRange { step, position } => {
                write!(f, "step {step}: position {position} out of range")
            }
            Violation::NotAdjacent { step, pair, found } => write!(
                f,
                "step {step}: labels {}/{} are not the ones in the swapped slots ({}/{})",
                pair.0 + 1,
                pair.1 + 1,
                found.0 + 1,
                found.1 + 1
            ),
            Violation::PairRepeated { pair, first, again } => write!(
                f,
                "pair {}/{} swapped at steps {first} and {again}",
                pair.0 + 1,
                pair.1 + 1
            ),
            Violation::PairNeverSwapped { pair } => {
                write!(f, "pair {}/{} never swapped", pair.0 + 1, pair.1 + 1)
            }
            Violation::NotReversed => {
                write!(f, "final permutation is not the reverse of the initial one")
            }
        }
    }
}

/// Axiom violations of a candidate halfperiod; empty iff valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn is_permutation(v: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    v.len() == n
        && v.iter()
            .all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

fn unordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Halfperiod {
    /// Assembles a halfperiod without checking it; see [`validate_allowable`].
    pub fn from_parts(n: usize, initial: Vec<usize>, transpositions: Vec<Transposition>) -> Self {
        Halfperiod {
            n,
            initial,
            transpositions,
        }
    }

    /// Builds the halfperiod obtained by applying swaps at the given
    /// positions, filling in labels and step numbers. Only the initial
    /// permutation and the position range are checked.
    pub fn from_positions(n: usize, initial: Vec<usize>, positions: &[usize]) -> Result<Self> {
        if !is_permutation(&initial, n) {
            return Err(Error::InvalidHalfperiod(
                "initial sequence is not a permutation".into(),
            ));
        }
        let mut perm = initial.clone();
        let mut transpositions = Vec::with_capacity(positions.len());
        for (i, &position) in positions.iter().enumerate() {
            if position == 0 || position >= n {
                return Err(Error::InvalidHalfperiod(format!(
                    "step {}: position {position} out of range",
                    i + 1
                )));
            }
            transpositions.push(Transposition {
                step: i + 1,
                position,
                pair: (perm[position - 1], perm[position]),
            });
            perm.swap(position - 1, position);
        }
        Ok(Halfperiod {
            n,
            initial,
            transpositions,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn transpositions(&self) -> &[Transposition] {
        &self.transpositions
    }

    pub fn positions(&self) -> Vec<usize> {
        self.transpositions.iter().map(|t| t.position).collect()
    }

    pub fn pair_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    /// `π_0, …, π_N`.
    pub fn permutations(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.transpositions.len() + 1);
        let mut perm = self.initial.clone();
        out.push(perm.clone());
        for t in &self.transpositions {
            perm.swap(t.position - 1, t.position);
            out.push(perm.clone());
        }
        out
    }

    pub fn permutation_at(&self, i: usize) -> Vec<usize> {
        let mut perm = self.initial.clone();
        for t in &self.transpositions[..i] {
            perm.swap(t.position - 1, t.position);
        }
        perm
    }

    pub fn final_permutation(&self) -> Vec<usize> {
        self.permutation_at(self.transpositions.len())
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_allowable(self);
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidHalfperiod(format!(
                "{v} ({} violation(s))",
                report.violations.len()
            ))),
        }
    }

    /// Edge level encoded by a swap at `position`: `min(j, n - j) - 1`.
    pub fn edge_level(&self, position: usize) -> usize {
        position.min(self.n - position) - 1
    }

    /// The halfperiod of the same allowable sequence starting at `π_i`.
    pub fn rotated(&self, i: usize) -> Halfperiod {
        let n = self.n;
        let positions: Vec<usize> = self.transpositions[i..]
            .iter()
            .map(|t| t.position)
            .chain(self.transpositions[..i].iter().map(|t| n - t.position))
            .collect();
        Halfperiod::from_positions(n, self.permutation_at(i), &positions)
            .expect("rotation of a well-formed halfperiod")
    }

    /// The halfperiod seen by sweeping the opposite way: permutations are
    /// read reversed, in reverse order, so swaps appear reversed with
    /// positions `j ↦ n - j`.
    pub fn reversed(&self) -> Halfperiod {
        let n = self.n;
        let positions: Vec<usize> = self
            .transpositions
            .iter()
            .rev()
            .map(|t| n - t.position)
            .collect();
        let mut start = self.final_permutation();
        start.reverse();
        Halfperiod::from_positions(n, start, &positions)
            .expect("reversal of a well-formed halfperiod")
    }

    /// `steps[a][b]`: 0-based index of the transposition swapping `a` and `b`.
    pub fn swap_steps(&self) -> Vec<Vec<usize>> {
        let mut steps = vec![vec![usize::MAX; self.n]; self.n];
        for (i, t) in self.transpositions.iter().enumerate() {
            let (a, b) = t.pair;
            steps[a][b] = i;
            steps[b][a] = i;
        }
        steps
    }

    /// Orientation of the triple `(a, b, c)` read off the order of the three
    /// swaps among them. For a geometric halfperiod this equals the sign of
    /// the orientation of the corresponding points.
    pub fn triple_sign(
        &self,
        steps: &[Vec<usize>],
        rank: &[usize],
        a: usize,
        b: usize,
        c: usize,
    ) -> i8 {
        // Sort by initial rank; the parity of the sort fixes the sign.
        let mut t = [a, b, c];
        let mut parity = 1i8;
        for i in 0..3 {
            for j in 0..2 - i {
                if rank[t[j]] > rank[t[j + 1]] {
                    t.swap(j, j + 1);
                    parity = -parity;
                }
            }
        }
        let [x, y, z] = t;
        // Either xy, xz, yz or yz, xz, xy.
        let sign = if steps[x][y] < steps[y][z] { 1 } else { -1 };
        sign * parity
    }

    /// Initial slot (0-based) of every label.
    pub fn initial_rank(&self) -> Vec<usize> {
        let mut rank = vec![0; self.n];
        for (slot, &l) in self.initial.iter().enumerate() {
            rank[l] = slot;
        }
        rank
    }
}

pub fn validate_allowable(h: &Halfperiod) -> ValidationReport {
    let n = h.n;
    let mut violations = Vec::new();
    if !is_permutation(&h.initial, n) {
        violations.push(Violation::InitialNotPermutation);
        return ValidationReport { violations };
    }
    let expected = n * n.saturating_sub(1) / 2;
    if h.transpositions.len() != expected {
        violations.push(Violation::WrongLength {
            expected,
            found: h.transpositions.len(),
        });
    }
    let mut first_swap = vec![vec![0usize; n]; n];
    let mut perm = h.initial.clone();
    for (i, t) in h.transpositions.iter().enumerate() {
        if t.step != i + 1 {
            violations.push(Violation::StepMislabelled {
                index: i + 1,
                step: t.step,
            });
        }
        if t.position == 0 || t.position >= n {
            violations.push(Violation::PositionOutOfRange {
                step: i + 1,
                position: t.position,
            });
            continue;
        }
        let found = (perm[t.position - 1], perm[t.position]);
        if found != t.pair {
            violations.push(Violation::NotAdjacent {
                step: i + 1,
                pair: t.pair,
                found,
            });
        }
        let (a, b) = unordered(found.0, found.1);
        if first_swap[a][b] != 0 {
            violations.push(Violation::PairRepeated {
                pair: (a, b),
                first: first_swap[a][b],
                again: i + 1,
            });
        } else {
            first_swap[a][b] = i + 1;
        }
        perm.swap(t.position - 1, t.position);
    }
    for a in 0..n {
        for b in a + 1..n {
            if first_swap[a][b] == 0 {
                violations.push(Violation::PairNeverSwapped { pair: (a, b) });
            }
        }
    }
    let mut reversed = h.initial.clone();
    reversed.reverse();
    if perm != reversed {
        violations.push(Violation::NotReversed);
    }
    ValidationReport { violations }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || 2 * k >= n {
        Err(Error::KOutOfRange { k, n })
    } else {
        Ok(())
    }
}

/// Labels in slots `k+1 ..= n-k` of `π_i`.
pub fn k_center(h: &Halfperiod, i: usize, k: usize) -> Result<BTreeSet<usize>> {
    check_k(h.n, k)?;
    if i > h.transpositions.len() {
        return Err(Error::Precondition(format!(
            "step index {i} beyond the halfperiod"
        )));
    }
    let perm = h.permutation_at(i);
    Ok(perm[k..h.n - k].iter().copied().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KCenterTrace {
    pub k: usize,
    /// `|C_0 ∩ C(k, π_i)|` for `i = 0..=N`.
    pub sizes: Vec<usize>,
    pub s_value: usize,
}

pub fn compute_s(h: &Halfperiod, k: usize) -> Result<KCenterTrace> {
    let n = h.n;
    check_k(n, k)?;
    let mut in_c0 = vec![false; n];
    for &l in &h.initial[k..n - k] {
        in_c0[l] = true;
    }
    let mut perm = h.initial.clone();
    let mut count = n - 2 * k;
    let mut sizes = Vec::with_capacity(h.transpositions.len() + 1);
    sizes.push(count);
    for t in &h.transpositions {
        let j = t.position;
        let (left, right) = (perm[j - 1], perm[j]);
        if j == k {
            // `left` enters the center, `right` leaves it.
            count = count + in_c0[left] as usize - in_c0[right] as usize;
        } else if j == n - k {
            count = count + in_c0[right] as usize - in_c0[left] as usize;
        }
        perm.swap(j - 1, j);
        sizes.push(count);
    }
    let s_value = *sizes.iter().min().expect("at least one permutation");
    Ok(KCenterTrace { k, sizes, s_value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Parallel spanned lines are an error.
    #[default]
    Error,
    /// Simultaneous events are ordered by pair index.
    Lexicographic,
}

/// Result of the rotational sweep: the halfperiod plus the point index
/// carried by each label.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub halfperiod: Halfperiod,
    pub point_of_label: Vec<usize>,
}

/// Normal of the segment `p_i p_j`, normalised into the half-open upper
/// half-plane so that angles lie in `[0, π)`.
fn event_direction(p: &Point, q: &Point) -> (Rational, Rational) {
    let dx = &q.x - &p.x;
    let dy = &q.y - &p.y;
    let (nx, ny) = (-dy, dx);
    if ny.is_negative() || (ny.is_zero() && nx.is_negative()) {
        (-nx, -ny)
    } else {
        (nx, ny)
    }
}

fn cmp_angle(a: &(Rational, Rational), b: &(Rational, Rational)) -> Ordering {
    let cross = &a.0 * &b.1 - &a.1 * &b.0;
    if cross.is_positive() {
        Ordering::Less
    } else if cross.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

/// Sweeps a directed line counterclockwise through half a turn, starting
/// just before the first direction at which two projections coincide.
pub fn sweep(set: &PointSet, tie: TieBreak) -> Result<Sweep> {
    set.require_general_position()?;
    let pts = set.points();
    let n = pts.len();
    if n < 2 {
        return Err(Error::Precondition(
            "a sweep needs at least two points".into(),
        ));
    }
    let mut events: Vec<((usize, usize), (Rational, Rational))> =
        Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            events.push(((i, j), event_direction(&pts[i], &pts[j])));
        }
    }
    events.sort_by(|a, b| cmp_angle(&a.1, &b.1).then(a.0.cmp(&b.0)));
    let ties: Vec<((usize, usize), (usize, usize))> = events
        .windows(2)
        .filter(|w| cmp_angle(&w[0].1, &w[1].1) == Ordering::Equal)
        .map(|w| (w[0].0, w[1].0))
        .collect();
    if !ties.is_empty() && tie == TieBreak::Error {
        return Err(Error::DirectionTie(ties));
    }

    let (ux, uy) = events[0].1.clone();
    let proj = |p: &Point| &p.x * &ux + &p.y * &uy;
    let deriv = |p: &Point| -(&p.x * &uy) + &p.y * &ux;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        proj(&pts[a])
            .cmp(&proj(&pts[b]))
            .then_with(|| deriv(&pts[b]).cmp(&deriv(&pts[a])))
    });
    let mut label_of_point = vec![0; n];
    for (label, &p) in order.iter().enumerate() {
        label_of_point[p] = label;
    }

    let mut perm: Vec<usize> = (0..n).collect();
    let mut slot: Vec<usize> = (0..n).collect();
    let mut positions = Vec::with_capacity(events.len());
    for ((i, j), _) in &events {
        let (a, b) = (label_of_point[*i], label_of_point[*j]);
        let (sa, sb) = (slot[a], slot[b]);
        let lo = sa.min(sb);
        if sa.abs_diff(sb) != 1 {
            return Err(Error::Verification(format!(
                "sweep produced a non-adjacent swap of points {i} and {j}"
            )));
        }
        positions.push(lo + 1);
        perm.swap(lo, lo + 1);
        slot[perm[lo]] = lo;
        slot[perm[lo + 1]] = lo + 1;
    }
    let halfperiod = Halfperiod::from_positions(n, (0..n).collect(), &positions)?;
    Ok(Sweep {
        halfperiod,
        point_of_label: order,
    })
}

/// Halfperiod of the circular sequence of a point set (labels follow the
/// initial projection order, so the initial permutation is the identity).
pub fn halfperiod_from_points(set: &PointSet, tie: TieBreak) -> Result<Halfperiod> {
    sweep(set, tie).map(|s| s.halfperiod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PointSet;

    fn convex(n: usize) -> PointSet {
        crate::constructions::regular_polygon(n, 0, 12).unwrap()
    }

    #[test]
    fn triangle_has_three_hull_swaps() {
        let set = PointSet::from_ints(&[(0, 0), (4, 1), (1, 3)]).unwrap();
        let h = halfperiod_from_points(&set, TieBreak::Error).unwrap();
        assert_eq!(h.transpositions().len(), 3);
        assert!(h.positions().iter().all(|&p| p == 1 || p == 2));
        assert!(validate_allowable(&h).is_valid());
    }

    #[test]
    fn repeated_swap_is_reported() {
        // 1 2 3: swap (1,2) twice then (2,3)
        let h = Halfperiod::from_positions(3, vec![0, 1, 2], &[1, 1, 2]).unwrap();
        let report = validate_allowable(&h);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::PairRepeated { pair: (0, 1), .. })));
        assert!(report.violations.contains(&Violation::NotReversed));
    }

    #[test]
    fn wrong_labels_are_reported() {
        let mut h = Halfperiod::from_positions(3, vec![0, 1, 2], &[1, 2, 1]).unwrap();
        h.transpositions[1].pair = (2, 1);
        assert!(matches!(
            validate_allowable(&h).violations.as_slice(),
            [Violation::NotAdjacent { step: 2, .. }]
        ));
    }

    #[test]
    fn every_reduced_word_of_n4_is_valid() {
        // Exhaustive: all position words of length 6 that reverse [4] with
        // each pair once are exactly the 16 reduced words of the longest
        // permutation.
        let mut valid = 0;
        let mut stack = vec![Vec::<usize>::new()];
        while let Some(w) = stack.pop() {
            if w.len() == 6 {
                let h = Halfperiod::from_positions(4, vec![0, 1, 2, 3], &w).unwrap();
                if validate_allowable(&h).is_valid() {
                    valid += 1;
                }
                continue;
            }
            for p in 1..4 {
                let mut next = w.clone();
                next.push(p);
                stack.push(next);
            }
        }
        assert_eq!(valid, 16);
    }

    #[test]
    fn k_center_endpoints() {
        let h = halfperiod_from_points(&convex(7), TieBreak::Lexicographic).unwrap();
        let n = 7;
        let last = n * (n - 1) / 2;
        for k in 1..=3 {
            let c0 = k_center(&h, 0, k).unwrap();
            assert_eq!(c0.len(), n - 2 * k);
            assert_eq!(k_center(&h, last, k).unwrap(), c0);
        }
        assert!(k_center(&h, 0, 0).is_err());
        assert!(k_center(&h, 0, 4).is_err());
    }

    #[test]
    fn singleton_centers_for_n5_k2() {
        let set = PointSet::from_ints(&[(0, 0), (10, 1), (3, 7), (5, 2), (-4, 6)]).unwrap();
        let h = halfperiod_from_points(&set, TieBreak::Error).unwrap();
        for i in 0..=10 {
            assert_eq!(k_center(&h, i, 2).unwrap().len(), 1);
        }
    }

    #[test]
    fn s_bound_on_convex_sets() {
        for n in 5..10 {
            let h = halfperiod_from_points(&convex(n), TieBreak::Lexicographic).unwrap();
            for k in 1..n.div_ceil(2) {
                if 2 * k >= n {
                    continue;
                }
                let trace = compute_s(&h, k).unwrap();
                assert_eq!(trace.sizes[0], n - 2 * k);
                assert!(trace.s_value < n - 2 * k);
            }
        }
    }

    #[test]
    fn parallel_pairs_need_opt_in() {
        // A square has two pairs of parallel sides.
        let set = PointSet::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        assert!(matches!(
            halfperiod_from_points(&set, TieBreak::Error),
            Err(Error::DirectionTie(_))
        ));
        let h = halfperiod_from_points(&set, TieBreak::Lexicographic).unwrap();
        assert!(validate_allowable(&h).is_valid());
    }

    #[test]
    fn collinear_input_is_rejected() {
        let set = PointSet::from_ints(&[(0, 0), (1, 1), (2, 2), (0, 5)]).unwrap();
        assert!(matches!(
            halfperiod_from_points(&set, TieBreak::Error),
            Err(Error::NotInGeneralPosition(_))
        ));
    }
}
