//! Exact planar kernel: rational points, orientation, line intersection and
//! general-position checks. No floating point is used in any predicate.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::approx;
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses an integer or `p/q` literal.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().ok()?;
            let den: BigInt = den.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(Rational::new(num, den))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Debug)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
    pub label: Option<String>,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y, label: None }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(int(x), int(y))
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn same_location(&self, other: &Point) -> bool {
        self.x == other.x && self.y == other.y
    }

    /// `self + t (other - self)`.
    pub fn lerp(&self, other: &Point, t: &Rational) -> Point {
        Point::new(
            &self.x + t * (&other.x - &self.x),
            &self.y + t * (&other.y - &self.y),
        )
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (approx::to_f64(&self.x), approx::to_f64(&self.y))
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.same_location(other)
    }
}

impl Eq for Point {}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Collinear,
    CounterClockwise,
}

impl Orientation {
    pub fn from_sign<T: Signed>(v: &T) -> Self {
        if v.is_positive() {
            Orientation::CounterClockwise
        } else if v.is_negative() {
            Orientation::Clockwise
        } else {
            Orientation::Collinear
        }
    }

    pub fn as_sign(self) -> i8 {
        match self {
            Orientation::Clockwise => -1,
            Orientation::Collinear => 0,
            Orientation::CounterClockwise => 1,
        }
    }
}

/// Twice the signed area of `p q r`.
pub fn orient_det(p: &Point, q: &Point, r: &Point) -> Rational {
    (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x)
}

/// Sign of the determinant of `(q - p, r - p)`: counter-clockwise when `r`
/// lies strictly left of the directed line `p -> q`.
pub fn orientation(p: &Point, q: &Point, r: &Point) -> Result<Orientation> {
    if p.same_location(q) {
        return Err(Error::DegeneratePair);
    }
    Ok(Orientation::from_sign(&orient_det(p, q, r)))
}

/// Intersection of the lines `ab` and `cd`.
pub fn line_intersection(a: &Point, b: &Point, c: &Point, d: &Point) -> Result<Point> {
    if a.same_location(b) || c.same_location(d) {
        return Err(Error::NoUniqueIntersection);
    }
    let d1x = &b.x - &a.x;
    let d1y = &b.y - &a.y;
    let d2x = &d.x - &c.x;
    let d2y = &d.y - &c.y;
    let den = &d1x * &d2y - &d1y * &d2x;
    if den.is_zero() {
        return Err(Error::NoUniqueIntersection);
    }
    let t = ((&c.x - &a.x) * &d2y - (&c.y - &a.y) * &d2x) / den;
    Ok(Point::new(&a.x + &t * d1x, &a.y + &t * d1y))
}

/// Every collinear triple `(i, j, k)` with `i < j < k`.
pub fn check_general_position(points: &[Point]) -> Vec<(usize, usize, usize)> {
    let frame = IntegerFrame::new(points);
    let n = points.len();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let frame = &frame;
            (i + 1..n).flat_map(move |j| {
                (j + 1..n).filter_map(move |k| (frame.orient(i, j, k) == 0).then_some((i, j, k)))
            })
        })
        .collect()
}

/// Clockwise rotation by `2π/3` about the origin, realised as a rational
/// matrix whose `sin` entry is a decimal approximation of `√3/2`.
///
/// The matrix is linear, so collinearity and order along lines are preserved
/// exactly by [`Rotation120::apply`] and [`Rotation120::apply_inverse`]; only
/// the closure `θ³ = id` is approximate.
#[derive(Clone, Debug)]
pub struct Rotation120 {
    cos: Rational,
    sin: Rational,
    det: Rational,
    digits: u32,
}

impl Rotation120 {
    pub fn new(digits: u32) -> Self {
        let cos = ratio(-1, 2);
        let sin = approx::sqrt(&int(3), digits) / int(2);
        let det = &cos * &cos + &sin * &sin;
        Rotation120 {
            cos,
            sin,
            det,
            digits,
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point::new(
            &p.x * &self.cos + &p.y * &self.sin,
            -(&p.x * &self.sin) + &p.y * &self.cos,
        )
    }

    /// Exact inverse of [`Rotation120::apply`].
    pub fn apply_inverse(&self, p: &Point) -> Point {
        Point::new(
            (&p.x * &self.cos - &p.y * &self.sin) / &self.det,
            (&p.x * &self.sin + &p.y * &self.cos) / &self.det,
        )
    }
}

/// One application of the approximate clockwise `2π/3` rotation.
pub fn rotate_2pi3(p: &Point, digits: u32) -> Point {
    Rotation120::new(digits).apply(p)
}

/// Points rescaled by a common denominator so that orientation tests run on
/// big integers. Scaling by a positive factor preserves every sign.
#[derive(Clone, Debug)]
pub struct IntegerFrame {
    xs: Vec<BigInt>,
    ys: Vec<BigInt>,
}

impl IntegerFrame {
    pub fn new(points: &[Point]) -> Self {
        let mut l = BigInt::one();
        for p in points {
            l = l.lcm(p.x.denom());
            l = l.lcm(p.y.denom());
        }
        let scale = |v: &Rational| v.numer() * (&l / v.denom());
        IntegerFrame {
            xs: points.iter().map(|p| scale(&p.x)).collect(),
            ys: points.iter().map(|p| scale(&p.y)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn orient(&self, i: usize, j: usize, k: usize) -> i8 {
        let d = (&self.xs[j] - &self.xs[i]) * (&self.ys[k] - &self.ys[i])
            - (&self.ys[j] - &self.ys[i]) * (&self.xs[k] - &self.xs[i]);
        match d.sign() {
            num_bigint::Sign::Plus => 1,
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
        }
    }

    pub fn x(&self, i: usize) -> &BigInt {
        &self.xs[i]
    }

    pub fn y(&self, i: usize) -> &BigInt {
        &self.ys[i]
    }
}

/// Dense `n³` table of orientation signs.
#[derive(Clone, Debug)]
pub struct OrientationTable {
    n: usize,
    signs: Vec<i8>,
}

impl OrientationTable {
    pub fn new(points: &[Point]) -> Self {
        let frame = IntegerFrame::new(points);
        let n = points.len();
        let mut signs = vec![0i8; n * n * n];
        signs
            .par_chunks_mut(n * n)
            .enumerate()
            .for_each(|(i, plane)| {
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    for k in 0..n {
                        if k != i && k != j {
                            plane[j * n + k] = frame.orient(i, j, k);
                        }
                    }
                }
            });
        OrientationTable { n, signs }
    }

    /// Builds the table from an arbitrary sign function (used for abstract
    /// chirotopes derived from halfperiods).
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize) -> i8) -> Self {
        let mut signs = vec![0i8; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != j && j != k && i != k {
                        signs[(i * n + j) * n + k] = f(i, j, k);
                    }
                }
            }
        }
        OrientationTable { n, signs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> i8 {
        self.signs[(i * self.n + j) * self.n + k]
    }
}

/// An ordered list of distinct points with a verified general-position flag.
#[derive(Clone, Debug)]
pub struct PointSet {
    points: Vec<Point>,
    general_position: bool,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let mut sorted: Vec<usize> = (0..points.len()).collect();
        sorted.sort_by(|&a, &b| (&points[a].x, &points[a].y).cmp(&(&points[b].x, &points[b].y)));
        for w in sorted.windows(2) {
            if points[w[0]].same_location(&points[w[1]]) {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicatePoint(a, b));
            }
        }
        let general_position = check_general_position(&points).is_empty();
        Ok(PointSet {
            points,
            general_position,
        })
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Result<Self> {
        PointSet::new(
            coords
                .iter()
                .map(|&(x, y)| Point::from_ints(x, y))
                .collect(),
        )
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_general_position(&self) -> bool {
        self.general_position
    }

    pub fn collinear_triples(&self) -> Vec<(usize, usize, usize)> {
        if self.general_position {
            Vec::new()
        } else {
            check_general_position(&self.points)
        }
    }

    pub fn require_general_position(&self) -> Result<()> {
        if self.general_position {
            Ok(())
        } else {
            Err(Error::NotInGeneralPosition(self.collinear_triples()))
        }
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

/// Squared Euclidean length, exact.
pub fn norm2(x: &Rational, y: &Rational) -> Rational {
    x * x + y * y
}

/// `|dy/dx|` of the line through `p` and `q`; `None` for vertical lines.
pub fn abs_slope(p: &Point, q: &Point) -> Option<Rational> {
    let dx = &q.x - &p.x;
    if dx.is_zero() {
        None
    } else {
        Some(((&q.y - &p.y) / dx).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    #[test]
    fn unit_left_turn() {
        assert_eq!(
            orientation(&p(0, 0), &p(1, 0), &p(0, 1)).unwrap(),
            Orientation::CounterClockwise
        );
        assert_eq!(
            orientation(&p(0, 0), &p(1, 0), &p(2, 0)).unwrap(),
            Orientation::Collinear
        );
    }

    #[test]
    fn base_coordinates_turn_left() {
        // 290*194 - 200*264 = 3460
        let (a1, a2, a3) = (p(-700, -50), p(-410, 150), p(-436, 144));
        assert_eq!(orient_det(&a1, &a2, &a3), int(3460));
        let oracle = BigInt::from(-410 + 700) * BigInt::from(144 + 50)
            - BigInt::from(150 + 50) * BigInt::from(-436 + 700);
        assert_eq!(oracle, BigInt::from(3460));
        assert_eq!(
            orientation(&a1, &a2, &a3).unwrap(),
            Orientation::CounterClockwise
        );
    }

    #[test]
    fn degenerate_pair_is_an_error() {
        assert!(matches!(
            orientation(&p(1, 1), &p(1, 1), &p(0, 0)),
            Err(Error::DegeneratePair)
        ));
    }

    #[test]
    fn intersections() {
        let x = line_intersection(&p(0, 0), &p(1, 1), &p(0, 1), &p(1, 0)).unwrap();
        assert_eq!((x.x, x.y), (ratio(1, 2), ratio(1, 2)));
        let x = line_intersection(&p(0, 0), &p(2, 0), &p(1, -1), &p(1, 1)).unwrap();
        assert_eq!((x.x, x.y), (int(1), int(0)));
        assert!(line_intersection(&p(0, 0), &p(1, 0), &p(0, 1), &p(1, 1)).is_err());
        assert!(line_intersection(&p(0, 0), &p(0, 0), &p(0, 1), &p(1, 1)).is_err());
    }

    #[test]
    fn auxiliary_intersection_matches_cramer() {
        // ℓ(a'_2 a'_3) ∩ ℓ(a_2 a_3), solved by Cramer's rule on the two
        // implicit line equations.
        let (ap2, ap3, a2, a3) = (p(-1200, -10), p(-1170, -14), p(-410, 150), p(-436, 144));
        let x = line_intersection(&ap2, &ap3, &a2, &a3).unwrap();
        let line = |u: &Point, v: &Point| {
            let a = &v.y - &u.y;
            let b = &u.x - &v.x;
            let c = &a * &u.x + &b * &u.y;
            (a, b, c)
        };
        let (a1, b1, c1) = line(&ap2, &ap3);
        let (a2_, b2_, c2_) = line(&a2, &a3);
        let det = &a1 * &b2_ - &a2_ * &b1;
        let ox = (&c1 * &b2_ - &c2_ * &b1) / &det;
        let oy = (&a1 * &c2_ - &a2_ * &c1) / &det;
        assert_eq!((x.x.clone(), x.y.clone()), (ox, oy));
        assert_eq!(orient_det(&ap2, &ap3, &x), int(0));
        assert_eq!(orient_det(&a2, &a3, &x), int(0));
    }

    #[test]
    fn general_position_reports_triples() {
        assert!(check_general_position(&[p(0, 0), p(1, 0), p(0, 1)]).is_empty());
        assert_eq!(
            check_general_position(&[p(0, 0), p(1, 0), p(2, 0)]),
            vec![(0, 1, 2)]
        );
        let set = PointSet::from_ints(&[(0, 0), (1, 0), (2, 0), (5, 7)]).unwrap();
        assert!(!set.is_general_position());
        assert!(matches!(
            set.require_general_position(),
            Err(Error::NotInGeneralPosition(t)) if t == vec![(0, 1, 2)]
        ));
    }

    #[test]
    fn duplicate_points_rejected() {
        assert!(matches!(
            PointSet::from_ints(&[(0, 0), (1, 0), (0, 0)]),
            Err(Error::DuplicatePoint(0, 2))
        ));
    }

    #[test]
    fn rotation_of_unit_vector() {
        let q = rotate_2pi3(&p(1, 0), 15);
        let (x, y) = q.to_f64();
        assert!((x + 0.5).abs() < 1e-12);
        assert!((y + 3f64.sqrt() / 2.0).abs() < 1e-12);
        let o = rotate_2pi3(&p(0, 0), 15);
        assert_eq!(o, p(0, 0));
    }

    #[test]
    fn rotation_inverse_is_exact() {
        let rot = Rotation120::new(12);
        let a = p(-700, -50);
        assert_eq!(rot.apply_inverse(&rot.apply(&a)), a);
        let thrice = rot.apply(&rot.apply(&rot.apply(&a)));
        let (x, y) = thrice.to_f64();
        assert!((x + 700.0).abs() < 1e-6 && (y + 50.0).abs() < 1e-6);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("-3/6"), Some(ratio(-1, 2)));
        assert_eq!(parse_rational("+12"), Some(int(12)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
