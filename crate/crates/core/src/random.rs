//! Seeded random inputs: integer point sets in general position and random
//! abstract halfperiods.

use std::collections::HashSet;

use num_integer::Integer;
use rand::Rng;

use crate::geom::{Point, PointSet};
use crate::sequence::Halfperiod;

fn direction(p: (i64, i64), q: (i64, i64)) -> (i64, i64) {
    let (mut dx, mut dy) = (q.0 - p.0, q.1 - p.1);
    let g = dx.gcd(&dy);
    dx /= g;
    dy /= g;
    if dy < 0 || (dy == 0 && dx < 0) {
        (-dx, -dy)
    } else {
        (dx, dy)
    }
}

/// `n` distinct integer points in `[-range, range]²` with no three
/// collinear and no two spanned lines parallel.
pub fn random_general_position<R: Rng + ?Sized>(rng: &mut R, n: usize, range: i64) -> PointSet {
    assert!(
        range >= n as i64,
        "coordinate range too small for {n} points"
    );
    'outer: loop {
        let mut pts: Vec<(i64, i64)> = Vec::with_capacity(n);
        let mut dirs: HashSet<(i64, i64)> = HashSet::new();
        let mut attempts = 0;
        while pts.len() < n {
            attempts += 1;
            if attempts > 200 * n + 1000 {
                continue 'outer;
            }
            let c = (rng.gen_range(-range..=range), rng.gen_range(-range..=range));
            if pts.contains(&c) {
                continue;
            }
            let new_dirs: Vec<(i64, i64)> = pts.iter().map(|&p| direction(p, c)).collect();
            let fresh: HashSet<(i64, i64)> = new_dirs.iter().copied().collect();
            // Parallel to an existing line covers collinearity through two
            // earlier points as well.
            if fresh.len() != new_dirs.len() || new_dirs.iter().any(|d| dirs.contains(d)) {
                continue;
            }
            dirs.extend(fresh);
            pts.push(c);
        }
        return PointSet::new(pts.iter().map(|&(x, y)| Point::from_ints(x, y)).collect())
            .expect("distinct points");
    }
}

/// Random halfperiod on `n` labels starting at the identity: repeatedly swap
/// a uniformly chosen adjacent pair that is still in increasing order.
pub fn random_abstract_halfperiod<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Halfperiod {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut positions = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    loop {
        let open: Vec<usize> = (1..n).filter(|&j| perm[j - 1] < perm[j]).collect();
        if open.is_empty() {
            break;
        }
        let j = open[rng.gen_range(0..open.len())];
        perm.swap(j - 1, j);
        positions.push(j);
    }
    Halfperiod::from_positions(n, (0..n).collect(), &positions).expect("positions in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::validate_allowable;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sets_are_in_general_position() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 3..20 {
            let set = random_general_position(&mut rng, n, 100);
            assert_eq!(set.len(), n);
            assert!(set.is_general_position());
        }
    }

    #[test]
    fn abstract_halfperiods_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..12 {
            let h = random_abstract_halfperiod(&mut rng, n);
            assert!(validate_allowable(&h).is_valid());
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_general_position(&mut ChaCha8Rng::seed_from_u64(9), 10, 1000);
        let b = random_general_position(&mut ChaCha8Rng::seed_from_u64(9), 10, 1000);
        assert_eq!(a.points(), b.points());
    }
}
