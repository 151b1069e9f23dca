//! Text formats for point sets and halfperiods.
//!
//! Point files: `#` comment lines, then `n`, then `n` lines `x y` where each
//! coordinate is an integer or `p/q`.
//!
//! Halfperiod files: `n`, the initial permutation (1-based labels), then
//! `C(n,2)` lines `step position labelA labelB`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::{parse_rational, Point};
use crate::sequence::{Halfperiod, Transposition};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_points(text: &str) -> Result<Vec<Point>> {
    let mut lines = content_lines(text);
    let (line, first) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty point file"))?;
    let n: usize = first
        .parse()
        .map_err(|_| parse_err(line, format!("expected point count, found {first:?}")))?;
    let mut points = Vec::with_capacity(n);
    for (line, l) in lines.by_ref().take(n) {
        let mut tok = l.split_whitespace();
        let (Some(x), Some(y), None) = (tok.next(), tok.next(), tok.next()) else {
            return Err(parse_err(line, "expected two coordinates"));
        };
        let x =
            parse_rational(x).ok_or_else(|| parse_err(line, format!("bad coordinate {x:?}")))?;
        let y =
            parse_rational(y).ok_or_else(|| parse_err(line, format!("bad coordinate {y:?}")))?;
        points.push(Point::new(x, y));
    }
    if points.len() != n {
        return Err(parse_err(
            0,
            format!("expected {n} points, found {}", points.len()),
        ));
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "trailing data after the last point"));
    }
    Ok(points)
}

pub fn write_points(points: &[Point], header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    let _ = writeln!(out, "{}", points.len());
    for p in points {
        let _ = writeln!(out, "{} {}", p.x, p.y);
    }
    out
}

pub fn parse_halfperiod(text: &str) -> Result<Halfperiod> {
    let mut lines = content_lines(text);
    let (line, first) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty halfperiod file"))?;
    let n: usize = first
        .parse()
        .map_err(|_| parse_err(line, format!("expected n, found {first:?}")))?;
    let (line, perm) = lines
        .next()
        .ok_or_else(|| parse_err(line, "missing initial permutation"))?;
    let label = |line: usize, s: &str| -> Result<usize> {
        let v: usize = s
            .parse()
            .map_err(|_| parse_err(line, format!("bad label {s:?}")))?;
        if v == 0 || v > n {
            return Err(parse_err(line, format!("label {v} outside 1..={n}")));
        }
        Ok(v - 1)
    };
    let initial = perm
        .split_whitespace()
        .map(|s| label(line, s))
        .collect::<Result<Vec<_>>>()?;
    let mut transpositions = Vec::new();
    for (line, l) in lines {
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 4 {
            return Err(parse_err(line, "expected `step position labelA labelB`"));
        }
        let step: usize = tok[0].parse().map_err(|_| parse_err(line, "bad step"))?;
        let position: usize = tok[1]
            .parse()
            .map_err(|_| parse_err(line, "bad position"))?;
        transpositions.push(Transposition {
            step,
            position,
            pair: (label(line, tok[2])?, label(line, tok[3])?),
        });
    }
    Ok(Halfperiod::from_parts(n, initial, transpositions))
}

pub fn write_halfperiod(h: &Halfperiod) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", h.n());
    let perm: Vec<String> = h.initial().iter().map(|l| (l + 1).to_string()).collect();
    let _ = writeln!(out, "{}", perm.join(" "));
    for t in h.transpositions() {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            t.step,
            t.position,
            t.pair.0 + 1,
            t.pair.1 + 1
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::ratio;

    #[test]
    fn parses_comments_and_fractions() {
        let pts = parse_points("# test\n3\n0 0\n1/2 -3\n# mid\n4/2 7\n").unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[1].x, ratio(1, 2));
        assert_eq!(pts[2].x, ratio(2, 1));
        let text = write_points(&pts, &[]);
        assert_eq!(text, "3\n0 0\n1/2 -3\n2 7\n");
    }

    #[test]
    fn rejects_malformed_point_files() {
        assert!(parse_points("").is_err());
        assert!(parse_points("2\n0 0\n").is_err());
        assert!(parse_points("1\n0 0 0\n").is_err());
        assert!(parse_points("1\n0 1/0\n").is_err());
        assert!(parse_points("1\n0 0\n5 5\n").is_err());
    }

    #[test]
    fn halfperiod_text_roundtrip() {
        let h = Halfperiod::from_positions(3, vec![0, 1, 2], &[1, 2, 1]).unwrap();
        let text = write_halfperiod(&h);
        assert_eq!(text, "3\n1 2 3\n1 1 1 2\n2 2 1 3\n3 1 2 3\n");
        let back = parse_halfperiod(&text).unwrap();
        assert_eq!(back, h);
    }
}
