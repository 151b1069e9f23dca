//! k-edge statistics and crossing counts.
//!
//! Every quantity has a brute-force route over orientation signs and a fast
//! route through a halfperiod; the two are compared in tests.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{OrientationTable, PointSet};
use crate::sequence::Halfperiod;

pub fn binom2(n: i128) -> i128 {
    if n < 2 {
        0
    } else {
        n * (n - 1) / 2
    }
}

pub fn binom(n: i128, k: u32) -> i128 {
    if n < k as i128 {
        return 0;
    }
    let mut r: i128 = 1;
    for i in 0..k as i128 {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// `(E_0, …, E_{⌊n/2⌋-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeVector {
    n: usize,
    counts: Vec<u64>,
}

impl EdgeVector {
    pub fn new(n: usize, counts: Vec<u64>) -> Result<Self> {
        if n < 2 || counts.len() != n / 2 {
            return Err(Error::InvalidEdgeVector(format!(
                "n = {n} needs {} entries, got {}",
                n / 2,
                counts.len()
            )));
        }
        let total: u64 = counts.iter().sum();
        let expected = (n * (n - 1) / 2) as u64;
        if total != expected {
            return Err(Error::InvalidEdgeVector(format!(
                "entries sum to {total}, expected C({n},2) = {expected}"
            )));
        }
        Ok(EdgeVector { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `E_k`, zero beyond the last level.
    pub fn e(&self, k: usize) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn leq(&self, k: usize) -> u64 {
        self.counts.iter().take(k + 1).sum()
    }

    pub fn geq(&self, k: usize) -> u64 {
        self.counts.iter().skip(k).sum()
    }

    /// `(E_≤0, …, E_≤⌊n/2⌋-1)`.
    pub fn cumulative(&self) -> Vec<u64> {
        self.counts
            .iter()
            .scan(0, |acc, &e| {
                *acc += e;
                Some(*acc)
            })
            .collect()
    }

    pub fn halving_lines(&self) -> u64 {
        *self.counts.last().expect("n >= 2")
    }
}

pub fn edge_vector_from_table(t: &OrientationTable) -> EdgeVector {
    let n = t.n();
    let counts = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut local = vec![0u64; n / 2];
            for j in i + 1..n {
                let left = (0..n)
                    .filter(|&k| k != i && k != j && t.get(i, j, k) > 0)
                    .count();
                let side = left.min(n - 2 - left);
                local[side] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; n / 2],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    EdgeVector { n, counts }
}

/// Counts, for every pair, the points strictly on its smaller side.
pub fn edge_vector_bruteforce(set: &PointSet) -> Result<EdgeVector> {
    set.require_general_position()?;
    if set.len() < 2 {
        return Err(Error::Precondition("need at least two points".into()));
    }
    Ok(edge_vector_from_table(&OrientationTable::new(set.points())))
}

/// Level histogram of swap positions, without validating the halfperiod.
pub fn edge_vector_from_positions(
    n: usize,
    positions: impl IntoIterator<Item = usize>,
) -> Vec<u64> {
    let mut counts = vec![0u64; n / 2];
    for j in positions {
        counts[j.min(n - j) - 1] += 1;
    }
    counts
}

pub fn edge_vector_from_halfperiod(h: &Halfperiod) -> Result<EdgeVector> {
    h.ensure_valid()?;
    let n = h.n();
    EdgeVector::new(n, edge_vector_from_positions(n, h.positions()))
}

/// Number of 4-subsets in convex position for a (possibly abstract)
/// orientation table: a 4-set is convex iff no member lies inside the
/// triangle of the other three.
pub fn convex_quadrilaterals(t: &OrientationTable) -> u64 {
    let n = t.n();
    let inside = |a: usize, b: usize, c: usize, d: usize| {
        let s = t.get(a, b, d);
        s == t.get(b, c, d) && s == t.get(c, a, d)
    };
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut count = 0u64;
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        if !(inside(a, b, c, d)
                            || inside(a, b, d, c)
                            || inside(a, c, d, b)
                            || inside(b, c, d, a))
                        {
                            count += 1;
                        }
                    }
                }
            }
            count
        })
        .sum()
}

pub fn crossings_bruteforce(set: &PointSet) -> Result<u64> {
    set.require_general_position()?;
    Ok(convex_quadrilaterals(&OrientationTable::new(set.points())))
}

/// Orientation table of the order type encoded by a halfperiod.
pub fn chirotope(h: &Halfperiod) -> OrientationTable {
    let steps = h.swap_steps();
    let rank = h.initial_rank();
    OrientationTable::from_fn(h.n(), |a, b, c| h.triple_sign(&steps, &rank, a, b, c))
}

/// Convex 4-subsets of the order type of `h`, counted directly.
pub fn crossings_from_halfperiod(h: &Halfperiod) -> Result<u64> {
    h.ensure_valid()?;
    Ok(convex_quadrilaterals(&chirotope(h)))
}

/// Both closed forms of the crossing count in terms of k-edges:
/// `3C(n,4) - Σ k(n-k-2) E_k` and the cumulative form.
pub fn crossings_from_edge_vector(v: &EdgeVector) -> (i128, i128) {
    let n = v.n as i128;
    let form1 = 3 * binom(n, 4)
        - v.counts
            .iter()
            .enumerate()
            .map(|(k, &e)| {
                let k = k as i128;
                k * (n - k - 2) * e as i128
            })
            .sum::<i128>();
    let leq: Vec<i128> = v.cumulative().into_iter().map(|x| x as i128).collect();
    (form1, crossings_from_leq(v.n, &leq))
}

/// `Σ_{k=0}^{⌊n/2⌋-2} (n-2k-3) E_≤k - (3/4)C(n,3) + (1+(-1)^{n+1})(1/8)C(n,2)`.
/// Extra entries of `leq` beyond `⌊n/2⌋-2` are ignored. The result is an
/// integer for every `n`.
pub fn crossings_from_leq(n: usize, leq: &[i128]) -> i128 {
    let top = (n / 2).saturating_sub(1);
    let ni = n as i128;
    let sum: i128 = leq
        .iter()
        .take(top)
        .enumerate()
        .map(|(k, &e)| (ni - 2 * k as i128 - 3) * e)
        .sum();
    let odd = if n % 2 == 1 { 2 } else { 0 };
    let eighths = 8 * sum - 6 * binom(ni, 3) + odd * binom2(ni);
    debug_assert_eq!(eighths % 8, 0);
    eighths / 8
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossingReport {
    pub n: usize,
    pub cr_bruteforce: u64,
    pub cr_identity_form1: i128,
    pub cr_identity_form2: i128,
    pub edge_vector: EdgeVector,
}

impl CrossingReport {
    pub fn identity_holds(&self) -> bool {
        let cr = self.cr_bruteforce as i128;
        cr == self.cr_identity_form1 && cr == self.cr_identity_form2
    }
}

fn report(n: usize, cr: u64, v: EdgeVector) -> CrossingReport {
    let (f1, f2) = crossings_from_edge_vector(&v);
    CrossingReport {
        n,
        cr_bruteforce: cr,
        cr_identity_form1: f1,
        cr_identity_form2: f2,
        edge_vector: v,
    }
}

/// Brute-force counts for a point set plus both identity forms.
pub fn summarize_points(set: &PointSet) -> Result<CrossingReport> {
    set.require_general_position()?;
    if set.len() < 4 {
        return Err(Error::Precondition("need at least four points".into()));
    }
    let table = OrientationTable::new(set.points());
    let v = edge_vector_from_table(&table);
    Ok(report(set.len(), convex_quadrilaterals(&table), v))
}

/// Same report for an abstract halfperiod; the crossing count comes from
/// the encoded order type.
pub fn summarize_halfperiod(h: &Halfperiod) -> Result<CrossingReport> {
    let v = edge_vector_from_halfperiod(h)?;
    if h.n() < 4 {
        return Err(Error::Precondition("need at least four points".into()));
    }
    Ok(report(h.n(), convex_quadrilaterals(&chirotope(h)), v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::regular_polygon;
    use crate::geom::orientation;
    use crate::random::{random_abstract_halfperiod, random_general_position};
    use crate::sequence::{halfperiod_from_points, sweep, TieBreak};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn convex_small_cases() {
        let sq = PointSet::from_ints(&[(0, 0), (3, 0), (3, 2), (0, 3)]).unwrap();
        assert_eq!(edge_vector_bruteforce(&sq).unwrap().counts(), &[4, 2]);
        assert_eq!(crossings_bruteforce(&sq).unwrap(), 1);
        let tri = PointSet::from_ints(&[(0, 0), (6, 0), (0, 6), (1, 1)]).unwrap();
        assert_eq!(crossings_bruteforce(&tri).unwrap(), 0);
        let hex = regular_polygon(6, 0, 12).unwrap();
        let v = edge_vector_bruteforce(&hex).unwrap();
        assert_eq!(v.counts(), &[6, 6, 3]);
        assert_eq!(crossings_bruteforce(&hex).unwrap(), 15);
        assert_eq!(crossings_from_edge_vector(&v), (15, 15));
        let h = halfperiod_from_points(&hex, TieBreak::Lexicographic).unwrap();
        assert_eq!(edge_vector_from_halfperiod(&h).unwrap(), v);
    }

    #[test]
    fn octagon_report() {
        let r = summarize_points(&regular_polygon(8, 1, 12).unwrap()).unwrap();
        assert_eq!(r.cr_bruteforce, 70);
        assert_eq!(r.edge_vector.halving_lines(), 4);
        assert!(r.identity_holds());
    }

    #[test]
    fn lower_bound_vector_for_24() {
        let leq = [3, 9, 18, 30, 45, 63, 84, 108, 138, 174, 225];
        assert_eq!(crossings_from_leq(24, &leq), 3699);
    }

    #[test]
    fn malformed_vectors_rejected() {
        assert!(EdgeVector::new(6, vec![6, 6]).is_err());
        assert!(EdgeVector::new(6, vec![6, 6, 4]).is_err());
    }

    #[test]
    fn chirotope_matches_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let set = random_general_position(&mut rng, 8, 1000);
            let sw = sweep(&set, TieBreak::Lexicographic).unwrap();
            let chi = chirotope(&sw.halfperiod);
            let pts = set.points();
            for a in 0..8 {
                for b in 0..8 {
                    for c in 0..8 {
                        if a == b || b == c || a == c {
                            continue;
                        }
                        let (pa, pb, pc) = (
                            &pts[sw.point_of_label[a]],
                            &pts[sw.point_of_label[b]],
                            &pts[sw.point_of_label[c]],
                        );
                        assert_eq!(chi.get(a, b, c), orientation(pa, pb, pc).unwrap().as_sign());
                    }
                }
            }
        }
    }

    #[test]
    fn sweep_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..14 {
            let set = random_general_position(&mut rng, n, 500);
            let h = halfperiod_from_points(&set, TieBreak::Lexicographic).unwrap();
            assert!(crate::sequence::validate_allowable(&h).is_valid());
            assert_eq!(
                edge_vector_from_halfperiod(&h).unwrap(),
                edge_vector_bruteforce(&set).unwrap()
            );
        }
    }

    #[test]
    fn statistics_are_start_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let set = random_general_position(&mut rng, 9, 1000);
        let h = halfperiod_from_points(&set, TieBreak::Lexicographic).unwrap();
        let v = edge_vector_from_halfperiod(&h).unwrap();
        for i in [1, 5, 17, 35] {
            let r = h.rotated(i);
            assert!(crate::sequence::validate_allowable(&r).is_valid());
            assert_eq!(edge_vector_from_halfperiod(&r).unwrap(), v);
        }
        let rev = h.reversed();
        assert!(crate::sequence::validate_allowable(&rev).is_valid());
        assert_eq!(edge_vector_from_halfperiod(&rev).unwrap(), v);
    }

    #[test]
    fn identity_on_abstract_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 4..10 {
            for _ in 0..10 {
                let h = random_abstract_halfperiod(&mut rng, n);
                let r = summarize_halfperiod(&h).unwrap();
                assert!(r.identity_holds(), "{r:?}");
            }
        }
    }

    #[test]
    fn five_point_abstract_example() {
        // Boundary swaps forced at positions 1 and 4, the rest central.
        let h = Halfperiod::from_positions(5, vec![0, 1, 2, 3, 4], &[1, 2, 3, 4, 1, 2, 3, 1, 2, 1])
            .unwrap();
        let v = edge_vector_from_halfperiod(&h).unwrap();
        assert_eq!(v.counts().iter().sum::<u64>(), 10);
        assert_eq!(v.counts(), &[5, 5]);
    }
}
