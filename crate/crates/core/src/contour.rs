//! Marching-squares iso-lines on a rectangular sample lattice.
//!
//! The lattice is padded with a ring of "below level" samples whose
//! coordinates repeat the border coordinates. Every iso-line is therefore a
//! closed loop; where a region touches the window edge its loop runs along
//! the border samples.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Closed polygonal contour in axis-offset coordinates. The first vertex is
/// not repeated at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub vertices: Vec<(f64, f64)>,
}

impl Polyline {
    /// Unsigned shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        let mut twice = 0.0;
        for i in 0..n {
            let (x0, y0) = self.vertices[i];
            let (x1, y1) = self.vertices[(i + 1) % n];
            twice += x0 * y1 - x1 * y0;
        }
        (twice / 2.0).abs()
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, p: (f64, f64)) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        let mut j = n.wrapping_sub(1);
        for i in 0..n {
            let (xi, yi) = self.vertices[i];
            let (xj, yj) = self.vertices[j];
            if (yi > p.1) != (yj > p.1) && p.0 < (xj - xi) * (p.1 - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
        inside
    }
}

/// Smallest-area polyline containing `p`, if any.
pub fn enclosing(lines: &[Polyline], p: (f64, f64)) -> Option<&Polyline> {
    lines
        .iter()
        .filter(|l| l.contains(p))
        .min_by(|a, b| a.area().total_cmp(&b.area()))
}

// Edge identifiers on the padded lattice: horizontal edges join (i, j) and
// (i + 1, j); vertical edges join (i, j) and (i, j + 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

struct Padded<'a> {
    values: &'a [f64],
    xs: &'a [f64],
    ys: &'a [f64],
    level: f64,
}

impl Padded<'_> {
    fn nx(&self) -> usize {
        self.xs.len() + 2
    }

    fn ny(&self) -> usize {
        self.ys.len() + 2
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        if i == 0 || j == 0 || i > nx || j > ny {
            f64::NEG_INFINITY
        } else {
            self.values[(i - 1) * ny + (j - 1)]
        }
    }

    fn coord(&self, i: usize, j: usize) -> (f64, f64) {
        let ci = i.clamp(1, self.xs.len()) - 1;
        let cj = j.clamp(1, self.ys.len()) - 1;
        (self.xs[ci], self.ys[cj])
    }

    fn above(&self, i: usize, j: usize) -> bool {
        self.value(i, j) >= self.level
    }

    fn vertex(&self, e: Edge) -> (f64, f64) {
        let ((i0, j0), (i1, j1)) = match e {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (p0, p1) = (self.coord(i0, j0), self.coord(i1, j1));
        if p0 == p1 {
            return p0;
        }
        let (v0, v1) = (self.value(i0, j0), self.value(i1, j1));
        let t = ((self.level - v0) / (v1 - v0)).clamp(0.0, 1.0);
        (p0.0 + t * (p1.0 - p0.0), p0.1 + t * (p1.1 - p0.1))
    }
}

/// Iso-lines at `level` of `values` (row-major, `xs.len() x ys.len()`),
/// where a sample counts as inside when `value >= level`. Saddle cells are
/// resolved with the cell-centre average.
pub fn iso_lines(values: &[f64], xs: &[f64], ys: &[f64], level: f64) -> Vec<Polyline> {
    assert_eq!(values.len(), xs.len() * ys.len(), "value grid shape");
    let lat = Padded { values, xs, ys, level };
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for i in 0..lat.nx() - 1 {
        for j in 0..lat.ny() - 1 {
            // Corners counter-clockwise from (i, j).
            let c0 = lat.above(i, j);
            let c1 = lat.above(i + 1, j);
            let c2 = lat.above(i + 1, j + 1);
            let c3 = lat.above(i, j + 1);
            let case = (c0 as u8) | (c1 as u8) << 1 | (c2 as u8) << 2 | (c3 as u8) << 3;
            let bottom = Edge::H(i, j);
            let right = Edge::V(i + 1, j);
            let top = Edge::H(i, j + 1);
            let left = Edge::V(i, j);
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 | 10 => {
                    let centre = (lat.value(i, j) + lat.value(i + 1, j) + lat.value(i + 1, j + 1) + lat.value(i, j + 1)) / 4.0;
                    let joined = centre >= level;
                    // Case 5: corners 0 and 2 inside.
                    if (case == 5) == joined {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    link(&lat, segments)
}

fn link(lat: &Padded<'_>, segments: Vec<(Edge, Edge)>) -> Vec<Polyline> {
    let mut by_edge: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        by_edge.entry(*a).or_default().push(k);
        by_edge.entry(*b).or_default().push(k);
    }
    let mut used = alloc::vec![false; segments.len()];
    let mut lines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (first, mut current) = segments[start];
        let mut edges = alloc::vec![first];
        while current != first {
            edges.push(current);
            let next = by_edge[&current].iter().copied().find(|&k| !used[k]);
            let Some(k) = next else { break };
            used[k] = true;
            let (a, b) = segments[k];
            current = if a == current { b } else { a };
        }
        let mut vertices: Vec<(f64, f64)> = Vec::with_capacity(edges.len());
        for e in edges {
            let v = lat.vertex(e);
            // Border runs collapse several edges onto one sample.
            if vertices.last() != Some(&v) {
                vertices.push(v);
            }
        }
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        lines.push(Polyline { vertices });
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn axis(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn no_crossing_gives_nothing() {
        let xs = axis(5, 0.0, 1.0);
        assert!(iso_lines(&[0.0; 25], &xs, &xs, 1.0).is_empty());
    }

    #[test]
    fn circular_blob() {
        let xs = axis(101, -1.0, 1.0);
        let mut v = Vec::new();
        for x in &xs {
            for y in &xs {
                v.push(1.0 - (x * x + y * y).sqrt());
            }
        }
        let lines = iso_lines(&v, &xs, &xs, 0.5);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].contains((0.0, 0.0)));
        assert!(!lines[0].contains((0.9, 0.0)));
        assert_relative_eq!(lines[0].area(), PI * 0.25, max_relative = 0.01);
    }

    #[test]
    fn region_touching_border_is_closed_along_edge() {
        let xs = axis(21, 0.0, 1.0);
        let mut v = Vec::new();
        for x in &xs {
            for _y in &xs {
                v.push(1.0 - x);
            }
        }
        // Inside where x <= 0.5: a rectangle against the x = 0 edge.
        let lines = iso_lines(&v, &xs, &xs, 0.5);
        assert_eq!(lines.len(), 1);
        assert_relative_eq!(lines[0].area(), 0.5, max_relative = 1e-9);
        assert!(lines[0].contains((0.25, 0.5)));
    }

    #[test]
    fn two_blobs_and_enclosure() {
        let xs = axis(81, -2.0, 2.0);
        let mut v = Vec::new();
        for x in &xs {
            for y in &xs {
                let a = ((x + 1.0) * (x + 1.0) + y * y).sqrt();
                let b = ((x - 1.0) * (x - 1.0) + y * y).sqrt();
                v.push((1.0 - a).max(1.0 - b));
            }
        }
        let lines = iso_lines(&v, &xs, &xs, 0.6);
        assert_eq!(lines.len(), 2);
        assert!(enclosing(&lines, (-1.0, 0.0)).is_some());
        assert!(enclosing(&lines, (1.0, 0.0)).is_some());
        assert!(enclosing(&lines, (0.0, 0.0)).is_none());
    }

    #[test]
    fn ring_gives_outer_and_hole() {
        let xs = axis(121, -1.0, 1.0);
        let mut v = Vec::new();
        for x in &xs {
            for y in &xs {
                let r = (x * x + y * y).sqrt();
                v.push(if (0.3..=0.7).contains(&r) { 1.0 } else { 0.0 });
            }
        }
        let lines = iso_lines(&v, &xs, &xs, 0.5);
        assert_eq!(lines.len(), 2);
        let inner = enclosing(&lines, (0.0, 0.0)).unwrap();
        assert!(inner.area() < 0.5);
    }
}
