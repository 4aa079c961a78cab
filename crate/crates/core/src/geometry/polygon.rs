//! Straight-edged loops: Green's-theorem moments and topology checks.

use crate::quadrature::Point;

/// Raw area moments of a region bounded by straight-edged loops, taken about
/// the coordinate origin. Clockwise loops contribute negatively, so holes
/// given clockwise are subtracted automatically.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RawMoments {
    pub area: f64,
    /// `∫ x1 dA`, `∫ x2 dA`
    pub first: [f64; 2],
    /// `∫ x1² dA`
    pub xx: f64,
    /// `∫ x2² dA`
    pub yy: f64,
    /// `∫ x1 x2 dA`
    pub xy: f64,
}

impl RawMoments {
    pub fn of_loop(pts: &[Point]) -> Self {
        let mut m = RawMoments::default();
        let n = pts.len();
        for i in 0..n {
            let [x0, y0] = pts[i];
            let [x1, y1] = pts[(i + 1) % n];
            let c = x0 * y1 - x1 * y0;
            m.area += c;
            m.first[0] += (x0 + x1) * c;
            m.first[1] += (y0 + y1) * c;
            m.xx += (x0 * x0 + x0 * x1 + x1 * x1) * c;
            m.yy += (y0 * y0 + y0 * y1 + y1 * y1) * c;
            m.xy += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * c;
        }
        m.area /= 2.0;
        m.first[0] /= 6.0;
        m.first[1] /= 6.0;
        m.xx /= 12.0;
        m.yy /= 12.0;
        m.xy /= 24.0;
        m
    }

    pub fn add(&mut self, o: &RawMoments) {
        self.area += o.area;
        self.first[0] += o.first[0];
        self.first[1] += o.first[1];
        self.xx += o.xx;
        self.yy += o.yy;
        self.xy += o.xy;
    }

    pub fn centroid(&self) -> Point {
        [self.first[0] / self.area, self.first[1] / self.area]
    }
}

pub fn signed_area(pts: &[Point]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Proper crossing: the open segments cross at a single interior point.
pub fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Even-odd point-in-polygon test. Points exactly on an edge may go either way.
pub fn contains(pts: &[Point], p: Point) -> bool {
    let n = pts.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (pts[i], pts[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// True when no two non-adjacent edges of the loop touch and no adjacent pair overlaps.
pub fn is_simple(pts: &[Point]) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        if pts[i] == pts[(i + 1) % n] {
            return false;
        }
    }
    for i in 0..n {
        let (a1, a2) = (pts[i], pts[(i + 1) % n]);
        for j in (i + 1)..n {
            let (b1, b2) = (pts[j], pts[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // shared vertex only; reject folding back along the same line
                let shared = if j == i + 1 { a2 } else { a1 };
                let (other_a, other_b) = if j == i + 1 { (a1, b2) } else { (a2, b1) };
                if orient(other_a, shared, other_b) == 0.0 {
                    let u = [other_a[0] - shared[0], other_a[1] - shared[1]];
                    let v = [other_b[0] - shared[0], other_b[1] - shared[1]];
                    if u[0] * v[0] + u[1] * v[1] > 0.0 {
                        return false;
                    }
                }
                continue;
            }
            if segments_intersect(a1, a2, b1, b2) {
                return false;
            }
        }
    }
    true
}

/// True when any edge of `a` touches any edge of `b`.
pub fn loops_touch(a: &[Point], b: &[Point]) -> bool {
    let (na, nb) = (a.len(), b.len());
    (0..na).any(|i| (0..nb).any(|j| segments_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb])))
}

pub fn max_vertex_distance(pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            d = d.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_moments() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let m = RawMoments::of_loop(&sq);
        assert!((m.area - 1.0).abs() < 1e-15);
        assert!((m.centroid()[0] - 0.5).abs() < 1e-15);
        assert!((m.xx - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.xy - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bowtie_is_not_simple() {
        let bow = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(!is_simple(&bow));
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(is_simple(&sq));
    }

    #[test]
    fn spike_is_not_simple() {
        let spike = [[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.0, 1.0]];
        assert!(!is_simple(&spike));
    }

    #[test]
    fn contains_basic() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(contains(&sq, [0.5, 0.5]));
        assert!(!contains(&sq, [1.5, 0.5]));
    }
}
