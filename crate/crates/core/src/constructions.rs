//! Extremal point sets: the recursive 3-symmetric family `S_r`, a regular
//! polygon around a small central cluster, and a regular polygon whose
//! vertices are replaced by short radial clusters. Every claimed count is
//! re-derived with exact predicates on the emitted coordinates.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::approx;
use crate::error::{Error, Result};
use crate::geom::{
    abs_slope, check_general_position, int, line_intersection, orient_det, ratio, IntegerFrame,
    OrientationTable, Point, PointSet, Rational, Rotation120,
};
use crate::sequence::{compute_s, halfperiod_from_points, TieBreak};
use crate::stats::{binom2, edge_vector_from_table, EdgeVector};

/// Vertices of a regular `q`-gon on the unit circle, vertex `j` at angle
/// `2π(97j + phase)/(97q)`, each coordinate rounded to `digits` decimals.
pub fn polygon_vertices(q: usize, phase: i64, digits: u32) -> Vec<Point> {
    let den = 97 * q as i64;
    (0..q as i64)
        .map(|j| {
            let (c, s) = approx::cos_sin_turn(97 * j + phase, den, digits);
            Point::new(c, s)
        })
        .collect()
}

pub fn regular_polygon(q: usize, phase: i64, digits: u32) -> Result<PointSet> {
    if q < 3 {
        return Err(Error::Precondition(
            "a polygon needs at least three vertices".into(),
        ));
    }
    let set = PointSet::new(polygon_vertices(q, phase, digits))?;
    set.require_general_position()?;
    Ok(set)
}

/// Counts that the two equality constructions are checked against.
#[derive(Clone, Debug, Serialize)]
pub struct EqualityReport {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub edge_vector: EdgeVector,
    pub e_k_minus_1: u64,
    pub e_geq_k: u64,
    pub expected_s: usize,
    pub expected_e_k_minus_1: u64,
    pub expected_e_geq_k: u64,
    /// `(n-2k-1) E_{k-1} + C(s,2)`.
    pub relaxed_bound: u64,
    pub digits: u32,
}

impl EqualityReport {
    pub fn matches(&self) -> bool {
        self.s == self.expected_s
            && self.e_k_minus_1 == self.expected_e_k_minus_1
            && self.e_geq_k == self.expected_e_geq_k
            && self.e_geq_k == self.relaxed_bound
    }
}

#[derive(Clone, Debug)]
pub struct EqualityConstruction {
    pub set: PointSet,
    pub report: EqualityReport,
}

fn measure(
    set: &PointSet,
    k: usize,
    expected: (usize, u64, u64),
    digits: u32,
) -> Result<EqualityReport> {
    set.require_general_position()?;
    let n = set.len();
    let v = edge_vector_from_table(&OrientationTable::new(set.points()));
    let h = halfperiod_from_points(set, TieBreak::Lexicographic)?;
    let s = compute_s(&h, k)?.s_value;
    let e_km1 = v.e(k - 1);
    Ok(EqualityReport {
        n,
        k,
        s,
        e_k_minus_1: e_km1,
        e_geq_k: v.geq(k),
        expected_s: expected.0,
        expected_e_k_minus_1: expected.1,
        expected_e_geq_k: expected.2,
        relaxed_bound: (n - 2 * k - 1) as u64 * e_km1 + binom2(s as i128) as u64,
        edge_vector: v,
        digits,
    })
}

const ESCALATIONS: u32 = 4;

/// A regular `(2k+1)`-gon plus `n-2k-1` points on a tiny parabola at its
/// center.
pub fn build_polygon_center(k: usize, n: usize, digits: u32) -> Result<EqualityConstruction> {
    if k == 0 || n < 2 * k + 3 {
        return Err(Error::Precondition(format!(
            "need k >= 1 and n >= 2k + 3, got k = {k}, n = {n}"
        )));
    }
    let q = 2 * k + 1;
    let m = n - q;
    let expected = (m, q as u64, (binom2(m as i128) + (q * m) as i128) as u64);
    let mut digits = digits.max(6);
    let mut delta = Rational::new(BigInt::one(), BigInt::from(1000 * q * m * m));
    let mut last = String::new();
    for _ in 0..=ESCALATIONS {
        let mut pts = polygon_vertices(q, 1, digits);
        pts.extend((0..m as i64).map(|i| Point::new(&delta * int(i), &delta * int(i * i))));
        match PointSet::new(pts).and_then(|set| {
            let report = measure(&set, k, expected, digits)?;
            Ok((set, report))
        }) {
            Ok((set, report)) if report.matches() => {
                return Ok(EqualityConstruction { set, report })
            }
            Ok((_, report)) => last = format!("{report:?}"),
            Err(e) => last = e.to_string(),
        }
        digits *= 2;
        delta /= int(1000);
    }
    Err(Error::Verification(format!(
        "polygon-center construction failed after escalation: {last}"
    )))
}

/// A regular `(2t+1)`-gon with every vertex `v` replaced by the `m` points
/// `v(1 - iε) + i²ε²·v⊥`, `i = 0..m`.
pub fn build_cluster_polygon(
    t: usize,
    m: usize,
    epsilon: Option<Rational>,
    digits: u32,
) -> Result<EqualityConstruction> {
    if t == 0 || m == 0 {
        return Err(Error::Precondition("need t >= 1 and m >= 1".into()));
    }
    let q = 2 * t + 1;
    let (n, k) = (q * m, t * m);
    let expected = (0, n as u64, (2 * q as i128 * binom2(m as i128)) as u64);
    let mut eps = match epsilon {
        Some(e) if e.is_positive() => e,
        Some(_) => return Err(Error::Precondition("epsilon must be positive".into())),
        None => Rational::new(BigInt::one(), BigInt::from(100 * q * m)),
    };
    let mut digits = digits.max(6);
    let mut last = String::new();
    for _ in 0..=ESCALATIONS {
        let mut pts = Vec::with_capacity(n);
        for v in polygon_vertices(q, 1, digits) {
            for i in 0..m as i64 {
                let shrink = int(1) - &eps * int(i);
                let bend = &eps * &eps * int(i * i);
                pts.push(Point::new(
                    &v.x * &shrink - &v.y * &bend,
                    &v.y * &shrink + &v.x * &bend,
                ));
            }
        }
        match PointSet::new(pts).and_then(|set| {
            let report = measure(&set, k, expected, digits)?;
            Ok((set, report))
        }) {
            Ok((set, report)) if report.matches() => {
                return Ok(EqualityConstruction { set, report })
            }
            Ok((_, report)) => last = format!("{report:?}"),
            Err(e) => last = e.to_string(),
        }
        digits *= 2;
        eps /= int(10);
    }
    Err(Error::Verification(format!(
        "cluster-polygon construction failed after escalation: {last}"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Letter {
    A,
    B,
    C,
}

/// One of the nine classes: a letter and 0, 1 or 2 primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SrClass {
    pub letter: Letter,
    pub primes: u8,
}

impl fmt::Display for SrClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.letter {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
        };
        write!(f, "{c}{}", "'".repeat(self.primes as usize))
    }
}

#[derive(Clone, Debug)]
pub struct SrConfig {
    pub r: usize,
    /// Initial spacing of the points on the negative x-axis.
    pub far_factor: Rational,
    /// Where on each open segment new points go, in `(0, 1)`.
    pub segment_choice: Rational,
    pub perturbation_epsilon: Rational,
    /// Decimal digits of `√3/2` in the rotation.
    pub precision: u32,
}

impl SrConfig {
    pub fn new(r: usize) -> Self {
        SrConfig {
            r,
            far_factor: int(1000),
            segment_choice: ratio(1, 2),
            perturbation_epsilon: ratio(1, 1000),
            precision: 12,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.r < 3 {
            return Err(Error::Precondition(format!(
                "r must be at least 3, got {}",
                self.r
            )));
        }
        if !(self.segment_choice.is_positive() && self.segment_choice < int(1)) {
            return Err(Error::Precondition(
                "segment choice must lie in (0, 1)".into(),
            ));
        }
        if !self.perturbation_epsilon.is_positive() || !self.far_factor.is_positive() {
            return Err(Error::Precondition(
                "epsilon and far factor must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Points with their class; order is `a, a', a'', b, b', b'', c, c', c''`,
/// each class by increasing index.
#[derive(Clone, Debug)]
pub struct LabeledPointSet {
    pub points: Vec<Point>,
    pub classes: Vec<SrClass>,
}

impl LabeledPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.classes.iter().map(|c| c.letter).collect()
    }

    /// Index of each point's letter: 0, 1, 2.
    pub fn partition(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.letter as usize).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct SrConstruction {
    pub r: usize,
    pub raw: LabeledPointSet,
    pub perturbed: LabeledPointSet,
    pub far_factor: Rational,
    pub epsilon: Rational,
    pub precision: u32,
    pub properties: Vec<PropertyCheck>,
    /// Brute-force `E_≤k` of the perturbed set for `k < 4r`.
    pub leq: Vec<u64>,
}

impl SrConstruction {
    pub fn perturbed_set(&self) -> PointSet {
        PointSet::new(self.perturbed.points.clone()).expect("verified distinct")
    }
}

/// Right-hand side of the three-regime formula for `n = 9r`.
pub fn expected_leq(r: usize, k: usize) -> u64 {
    let (n, k) = (9 * r as i128, k as i128);
    let v = if k < n / 3 {
        3 * binom2(k + 2)
    } else if k <= 4 * n / 9 - 2 {
        3 * binom2(k + 2) + 3 * binom2(k - n / 3 + 2)
    } else {
        let top = 4 * n / 9 - 1;
        3 * binom2(top + 2) + 3 * binom2(top - n / 3 + 2) + 3
    };
    v as u64
}

pub fn expected_bichromatic(r: usize, k: usize) -> u64 {
    let (r, k) = (r as i128, k as i128);
    let v = if k < 3 * r {
        3 * binom2(k + 2)
    } else {
        3 * binom2(3 * r + 1) + (k - 3 * r + 1) * 9 * r
    };
    v as u64
}

pub fn expected_monochromatic(r: usize, k: usize) -> u64 {
    let (r, k) = (r as i128, k as i128);
    let v = if k < 3 * r {
        0
    } else if k <= 4 * r - 2 {
        6 * binom2(k - 3 * r + 2)
    } else {
        6 * binom2(r + 1) + 3
    };
    v as u64
}

/// Cumulative counts `(bichromatic, monochromatic)` of `(≤k)`-edges for
/// every `k`, where an edge is monochromatic iff both ends share a letter.
pub fn bichromatic_split(points: &[Point], letters: &[Letter]) -> Result<(Vec<u64>, Vec<u64>)> {
    if points.len() != letters.len() {
        return Err(Error::Precondition("one letter per point required".into()));
    }
    let set = PointSet::new(points.to_vec())?;
    set.require_general_position()?;
    let n = points.len();
    let t = OrientationTable::new(points);
    let (mut bi, mut mono) = (vec![0u64; n / 2], vec![0u64; n / 2]);
    for i in 0..n {
        for j in i + 1..n {
            let left = (0..n)
                .filter(|&x| x != i && x != j && t.get(i, j, x) > 0)
                .count();
            let side = left.min(n - 2 - left);
            if letters[i] == letters[j] {
                mono[side] += 1;
            } else {
                bi[side] += 1;
            }
        }
    }
    let cumulate = |v: Vec<u64>| {
        v.into_iter()
            .scan(0, |acc, e| {
                *acc += e;
                Some(*acc)
            })
            .collect::<Vec<u64>>()
    };
    Ok((cumulate(bi), cumulate(mono)))
}

/// `(bi, mono)` at a single level.
pub fn count_bichromatic_monochromatic(s: &LabeledPointSet, k: usize) -> Result<(u64, u64)> {
    let (bi, mono) = bichromatic_split(&s.points, &s.letters())?;
    if k >= bi.len() {
        return Err(Error::KOutOfRange { k, n: s.len() });
    }
    Ok((bi[k], mono[k]))
}

struct Base {
    rot: Rotation120,
    a: Vec<Point>,
    ap: Vec<Point>,
    a_inf: Point,
    ap_inf: Point,
    b_inf: Point,
}

fn sign(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// `x` strictly inside segment `pq`, assuming it is on the line.
fn strictly_between(p: &Point, q: &Point, x: &Point) -> bool {
    let dx = &q.x - &p.x;
    let dy = &q.y - &p.y;
    let t = ((&x.x - &p.x) * &dx + (&x.y - &p.y) * &dy) / (&dx * &dx + &dy * &dy);
    t.is_positive() && t < int(1)
}

/// Parameters of `pts` along the directed segment `from -> to`, or `None`
/// if some point is off the line.
fn along(from: &Point, to: &Point, pts: &[Point]) -> Option<Vec<Rational>> {
    let dx = &to.x - &from.x;
    let dy = &to.y - &from.y;
    let len2 = &dx * &dx + &dy * &dy;
    pts.iter()
        .map(|p| {
            orient_det(from, to, p)
                .is_zero()
                .then(|| ((&p.x - &from.x) * &dx + (&p.y - &from.y) * &dy) / &len2)
        })
        .collect()
}

/// `a_2..a_t` and `a'_2..a'_t` run in order towards their limit points;
/// every line `a'_i a_j` crosses the open segment `b_i b_{i+1}`, and every
/// line `a'_t a_j` crosses `b_t b_inf`.
fn properties(base: &Base, t: usize) -> Vec<PropertyCheck> {
    let (a, ap) = (&base.a[..t], &base.ap[..t]);
    let b: Vec<Point> = a.iter().map(|p| base.rot.apply(p)).collect();
    let increasing = |ts: Option<Vec<Rational>>| {
        ts.is_some_and(|ts| {
            ts[0].is_zero()
                && ts.windows(2).all(|w| w[0] < w[1])
                && ts.last().is_some_and(|x| *x < int(1))
        })
    };
    let p1 = increasing(along(&a[1], &base.a_inf, &a[1..]));
    let p2 = increasing(along(&ap[1], &base.ap_inf, &ap[1..]));
    let crosses = |u: &Point, v: &Point, p: &Point, q: &Point| {
        let (s1, s2) = (sign(&orient_det(u, v, p)), sign(&orient_det(u, v, q)));
        s1 != 0 && s2 != 0 && s1 != s2
    };
    let p3 = (1..t - 1).all(|i| (1..t).all(|j| crosses(&ap[i], &a[j], &b[i], &b[i + 1])));
    let p4 = (1..t).all(|j| crosses(&ap[t - 1], &a[j], &b[t - 1], &base.b_inf));
    vec![
        PropertyCheck {
            name: format!("a order, t = {t}"),
            holds: p1,
        },
        PropertyCheck {
            name: format!("a' order, t = {t}"),
            holds: p2,
        },
        PropertyCheck {
            name: format!("inner crossings, t = {t}"),
            holds: p3,
        },
        PropertyCheck {
            name: format!("outer crossings, t = {t}"),
            holds: p4,
        },
    ]
}

const A_BASE: [(i64, i64); 3] = [(-700, -50), (-410, 150), (-436, 144)];
const AP_BASE: [(i64, i64); 3] = [(-1300, 20), (-1200, -10), (-1170, -14)];

/// Recursion for the `A` and `A'` classes, checking the ordering and
/// crossing properties at each size.
fn grow(cfg: &SrConfig, precision: u32) -> Result<(Base, Vec<PropertyCheck>)> {
    let rot = Rotation120::new(precision);
    let a: Vec<Point> = A_BASE
        .iter()
        .map(|&(x, y)| Point::from_ints(x, y))
        .collect();
    let ap: Vec<Point> = AP_BASE
        .iter()
        .map(|&(x, y)| Point::from_ints(x, y))
        .collect();
    let c2 = rot.apply(&rot.apply(&a[1]));
    let c3 = rot.apply(&rot.apply(&a[2]));
    let a_inf = line_intersection(&a[1], &a[2], &c2, &c3)?;
    let ap_inf = line_intersection(&ap[1], &ap[2], &a[1], &a[2])?;
    let b_inf = rot.apply(&a_inf);
    let mut base = Base {
        rot,
        a,
        ap,
        a_inf,
        ap_inf,
        b_inf,
    };
    let mut checks = properties(&base, 3);
    let lambda = &cfg.segment_choice;
    for t in 3..cfg.r {
        let b_t = base.rot.apply(&base.a[t - 1]);
        let x = line_intersection(&base.ap[t - 1], &base.a[1], &b_t, &base.b_inf)?;
        if !strictly_between(&b_t, &base.b_inf, &x) {
            return Err(Error::Verification(format!(
                "step {t}: crossing point not inside b_t b_inf"
            )));
        }
        let b_next = x.lerp(&base.b_inf, lambda);
        let a_next = base.rot.apply_inverse(&b_next);
        let x2 = line_intersection(&b_next, &base.a_inf, &base.ap[t - 1], &base.ap_inf)?;
        if !strictly_between(&base.ap[t - 1], &base.ap_inf, &x2) {
            return Err(Error::Verification(format!(
                "step {t}: crossing point not inside a'_t a'_inf"
            )));
        }
        let ap_next = x2.lerp(&base.ap_inf, lambda);
        base.a.push(a_next);
        base.ap.push(ap_next);
        checks.extend(properties(&base, t + 1));
    }
    if let Some(c) = checks.iter().find(|c| !c.holds) {
        return Err(Error::Verification(format!("property {} fails", c.name)));
    }
    Ok((base, checks))
}

fn class_points(base: &Base, a2: &[Point]) -> LabeledPointSet {
    let r = base.a.len();
    let mut points = Vec::with_capacity(9 * r);
    let mut classes = Vec::with_capacity(9 * r);
    let groups: [&[Point]; 3] = [&base.a, &base.ap, a2];
    for (li, letter) in [Letter::A, Letter::B, Letter::C].into_iter().enumerate() {
        for (primes, g) in groups.iter().enumerate() {
            let class = SrClass {
                letter,
                primes: primes as u8,
            };
            for (i, p) in g.iter().enumerate() {
                let mut q = p.clone();
                for _ in 0..li {
                    q = base.rot.apply(&q);
                }
                points.push(q.labeled(format!("{class}_{}", i + 1)));
                classes.push(class);
            }
        }
    }
    LabeledPointSet { points, classes }
}

/// Doubles the spacing of `A''` until every line through a point of `A''`
/// and a point outside `B'' ∪ C''` is flatter than every line spanned
/// outside `A''`.
fn place_far(base: &Base, start: &Rational) -> Result<(LabeledPointSet, Rational)> {
    let r = base.a.len();
    let mut f = start.clone();
    for _ in 0..64 {
        let a2: Vec<Point> = (0..r)
            .map(|i| Point::new(-(&f * int((r - i) as i64)), Rational::zero()))
            .collect();
        let set = class_points(base, &a2);
        let is_a2 = |i: usize| {
            set.classes[i]
                == SrClass {
                    letter: Letter::A,
                    primes: 2,
                }
        };
        let is_bc2 = |i: usize| set.classes[i].primes == 2 && set.classes[i].letter != Letter::A;
        let n = set.len();
        let mut steepest_mixed: Option<Rational> = None;
        let mut flattest_inner: Option<Rational> = None;
        let mut vertical_mixed = false;
        for i in 0..n {
            for j in i + 1..n {
                let s = abs_slope(&set.points[i], &set.points[j]);
                if is_a2(i) || is_a2(j) {
                    if is_bc2(i) || is_bc2(j) {
                        continue;
                    }
                    match s {
                        None => vertical_mixed = true,
                        Some(s) => {
                            if steepest_mixed.as_ref().is_none_or(|m| s > *m) {
                                steepest_mixed = Some(s);
                            }
                        }
                    }
                } else if let Some(s) = s {
                    if flattest_inner.as_ref().is_none_or(|m| s < *m) {
                        flattest_inner = Some(s);
                    }
                }
            }
        }
        let ok = !vertical_mixed
            && match (&steepest_mixed, &flattest_inner) {
                (Some(m1), Some(m2)) => m1 < m2,
                _ => true,
            };
        if ok {
            return Ok((set, f));
        }
        f *= int(2);
    }
    Err(Error::Verification(
        "no far factor separates the slopes".into(),
    ))
}

/// Maximal collinear groups as sorted index lists.
fn collinear_lines(points: &[Point]) -> Vec<Vec<usize>> {
    let mut lines: Vec<BTreeSet<usize>> = Vec::new();
    for (i, j, k) in check_general_position(points) {
        match lines
            .iter_mut()
            .find(|l| [i, j, k].iter().filter(|x| l.contains(x)).count() >= 2)
        {
            Some(l) => l.extend([i, j, k]),
            None => lines.push([i, j, k].into_iter().collect()),
        }
    }
    lines.into_iter().map(|l| l.into_iter().collect()).collect()
}

/// Moves the `i`-th point of every collinear group (in order along the
/// group) by `i² ε` along the group's normal, away from the centroid.
fn perturb(points: &[Point], eps: &Rational) -> Vec<Point> {
    let n = int(points.len() as i64);
    let cx = points.iter().fold(Rational::zero(), |acc, p| acc + &p.x) / &n;
    let cy = points.iter().fold(Rational::zero(), |acc, p| acc + &p.y) / &n;
    let centroid = Point::new(cx, cy);
    let mut out = points.to_vec();
    for g in collinear_lines(points) {
        let (p0, p1) = (&points[g[0]], &points[g[1]]);
        let (dx, dy) = (&p1.x - &p0.x, &p1.y - &p0.y);
        let scale = dx.abs().max(dy.abs());
        let (nx, ny) = (-&dy / &scale, &dx / &scale);
        let away = if orient_det(p0, p1, &centroid).is_positive() {
            int(-1)
        } else {
            int(1)
        };
        let mut order = g.clone();
        order.sort_by_cached_key(|&i| (&points[i].x - &p0.x) * &dx + (&points[i].y - &p0.y) * &dy);
        for (i, &idx) in order.iter().enumerate() {
            let step = &away * int(((i + 1) * (i + 1)) as i64) * eps;
            let p = &mut out[idx];
            p.x = &p.x + &step * &nx;
            p.y = &p.y + &step * &ny;
        }
    }
    out
}

/// Cumulative `E_≤k` of a point set for `k < levels`.
fn leq_prefix(points: &[Point], levels: usize) -> Vec<u64> {
    edge_vector_from_table(&OrientationTable::new(points))
        .cumulative()
        .into_iter()
        .take(levels)
        .collect()
}

fn symmetry_holds(set: &LabeledPointSet) -> bool {
    // Index map a -> b -> c -> a on matching classes.
    let n = set.len();
    let third = n / 3;
    let sigma = |i: usize| (i + third) % n;
    let frame = IntegerFrame::new(&set.points);
    (0..n).all(|i| {
        (i + 1..n).all(|j| {
            (j + 1..n).all(|k| frame.orient(i, j, k) == frame.orient(sigma(i), sigma(j), sigma(k)))
        })
    })
}

/// Builds `S_r`, certifies the ordering and crossing properties, the slope
/// separation and 3-symmetry on the raw set, then perturbs it into general position and checks `E_≤k`
/// for all `k ≤ 4r - 1`. Rotation precision doubles (up to four times) and
/// the perturbation shrinks by 1000 (up to five times) on failure.
pub fn build_sr(cfg: &SrConfig) -> Result<SrConstruction> {
    cfg.validate()?;
    let r = cfg.r;
    let levels = 4 * r;
    let expected: Vec<u64> = (0..levels).map(|k| expected_leq(r, k)).collect();
    let mut precision = cfg.precision.max(6);
    let mut last = String::new();
    for _ in 0..=ESCALATIONS {
        let attempt = (|| -> Result<SrConstruction> {
            let (base, mut checks) = grow(cfg, precision)?;
            let (raw, far) = place_far(&base, &cfg.far_factor)?;
            checks.push(PropertyCheck {
                name: "slope separation".into(),
                holds: true,
            });
            let sym = symmetry_holds(&raw);
            checks.push(PropertyCheck {
                name: "3-symmetry".into(),
                holds: sym,
            });
            if !sym {
                return Err(Error::Verification(
                    "3-symmetry fails on the raw set".into(),
                ));
            }
            let mut eps = cfg.perturbation_epsilon.clone();
            let mut why = String::new();
            for _ in 0..5 {
                let moved = perturb(&raw.points, &eps);
                let set = PointSet::new(moved.clone())?;
                if set.is_general_position() {
                    let leq = leq_prefix(&moved, levels);
                    if leq == expected {
                        let perturbed = LabeledPointSet {
                            points: moved,
                            classes: raw.classes.clone(),
                        };
                        return Ok(SrConstruction {
                            r,
                            raw,
                            perturbed,
                            far_factor: far,
                            epsilon: eps,
                            precision,
                            properties: checks,
                            leq,
                        });
                    }
                    why = format!("E_<=k = {leq:?}, expected {expected:?}");
                } else {
                    why = "perturbed set still has collinear triples".into();
                }
                eps /= int(1000);
            }
            Err(Error::Verification(why))
        })();
        match attempt {
            Ok(c) => return Ok(c),
            Err(e) => last = e.to_string(),
        }
        precision *= 2;
    }
    Err(Error::Verification(format!(
        "S_{r} construction failed: {last}"
    )))
}

#[derive(Clone, Debug, Serialize)]
pub struct SrAudit {
    pub r: usize,
    pub n: usize,
    pub leq: Vec<u64>,
    pub expected: Vec<u64>,
    pub bichromatic: Vec<u64>,
    pub monochromatic: Vec<u64>,
    pub expected_bichromatic: Vec<u64>,
    pub expected_monochromatic: Vec<u64>,
    pub general_position: bool,
    pub properties_hold: bool,
    pub decomposable: bool,
}

impl SrAudit {
    pub fn passes(&self) -> bool {
        self.general_position
            && self.properties_hold
            && self.decomposable
            && self.leq == self.expected
            && self.bichromatic == self.expected_bichromatic
            && self.monochromatic == self.expected_monochromatic
    }
}

/// Recounts everything on the perturbed set from scratch.
pub fn audit_sr(c: &SrConstruction) -> Result<SrAudit> {
    let r = c.r;
    let levels = 4 * r;
    let set = PointSet::new(c.perturbed.points.clone())?;
    let (bi, mono) = bichromatic_split(&c.perturbed.points, &c.perturbed.letters())?;
    let decomposable = check_3decomposable(&set, &c.perturbed.partition())?.is_some();
    Ok(SrAudit {
        r,
        n: set.len(),
        leq: leq_prefix(&c.perturbed.points, levels),
        expected: (0..levels).map(|k| expected_leq(r, k)).collect(),
        bichromatic: bi[..levels].to_vec(),
        monochromatic: mono[..levels].to_vec(),
        expected_bichromatic: (0..levels).map(|k| expected_bichromatic(r, k)).collect(),
        expected_monochromatic: (0..levels).map(|k| expected_monochromatic(r, k)).collect(),
        general_position: set.is_general_position(),
        properties_hold: c.properties.iter().all(|p| p.holds),
        decomposable,
    })
}

/// Projection direction, as an integer vector, showing `middle` between the
/// two other parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionWitness {
    pub middle: usize,
    pub direction: (String, String),
}

fn cmp_angle(a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> Ordering {
    let cross = &a.0 * &b.1 - &a.1 * &b.0;
    0.cmp(&cross.signum().try_into().unwrap_or(0i32))
}

/// Searches for three projection directions, one per part, in which that
/// part appears strictly between the other two. Only one direction per
/// cell of the arrangement of critical directions is tried.
pub fn check_3decomposable(
    set: &PointSet,
    partition: &[usize],
) -> Result<Option<[DecompositionWitness; 3]>> {
    let n = set.len();
    if n == 0 || !n.is_multiple_of(3) || partition.len() != n {
        return Err(Error::Precondition(
            "need a partition of 3m points into three labelled parts".into(),
        ));
    }
    let mut sizes = [0usize; 3];
    for &p in partition {
        if p > 2 {
            return Err(Error::Precondition(format!("part index {p} out of range")));
        }
        sizes[p] += 1;
    }
    if sizes.iter().any(|&s| s != n / 3) {
        return Err(Error::Precondition(format!(
            "parts are not equal thirds: {sizes:?}"
        )));
    }
    let frame = IntegerFrame::new(set.points());
    let mut dirs: Vec<(BigInt, BigInt)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dx = frame.x(j) - frame.x(i);
            let dy = frame.y(j) - frame.y(i);
            let (mut ux, mut uy) = (-dy, dx);
            if uy.is_negative() || (uy.is_zero() && ux.is_negative()) {
                ux = -ux;
                uy = -uy;
            }
            dirs.push((ux, uy));
        }
    }
    dirs.sort_by(cmp_angle);
    dirs.dedup_by(|a, b| cmp_angle(a, b) == Ordering::Equal);
    let mut candidates: Vec<(BigInt, BigInt)> = dirs
        .windows(2)
        .map(|w| (&w[0].0 + &w[1].0, &w[0].1 + &w[1].1))
        .collect();
    if let (Some(first), Some(last)) = (dirs.first(), dirs.last()) {
        candidates.push((&last.0 - &first.0, &last.1 - &first.1));
    }
    let mut found: [Option<DecompositionWitness>; 3] = [None, None, None];
    for (ux, uy) in candidates {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_cached_key(|&i| frame.x(i) * &ux + frame.y(i) * &uy);
        let mut runs: Vec<usize> = Vec::new();
        for &i in &order {
            if runs.last() != Some(&partition[i]) {
                runs.push(partition[i]);
            }
        }
        if runs.len() == 3 {
            let m = runs[1];
            if found[m].is_none() {
                found[m] = Some(DecompositionWitness {
                    middle: m,
                    direction: (ux.to_string(), uy.to_string()),
                });
            }
        }
        if found.iter().all(Option::is_some) {
            break;
        }
    }
    Ok(match found {
        [Some(a), Some(b), Some(c)] => Some([a, b, c]),
        _ => None,
    })
}
