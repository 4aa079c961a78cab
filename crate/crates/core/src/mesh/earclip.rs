//! Seed triangulation of polygons with holes: holes are bridged into the outer
//! loop, then ears are clipped greedily by best minimum angle.

use super::{min_angle, LoopTag, TriMesh, MIN_SEED_ANGLE_DEG};
use crate::error::{Error, Result};
use crate::geometry::polygon::{contains, orient, segments_cross};
use crate::quadrature::Point;

fn collinear_tol(pts: &[Point]) -> f64 {
    let d = crate::geometry::polygon::max_vertex_distance(pts);
    1e-12 * d * d
}

/// Inclusive containment; points within `tol` of an edge line count as inside.
fn point_in_triangle(p: Point, a: Point, b: Point, c: Point, tol: f64) -> bool {
    orient(a, b, p) >= -tol && orient(b, c, p) >= -tol && orient(c, a, p) >= -tol
}

/// Angle of `d` measured counterclockwise from `from`, in `[0, 2π)`.
fn ccw_angle(from: Point, d: Point) -> f64 {
    let a = d[1].atan2(d[0]) - from[1].atan2(from[0]);
    a.rem_euclid(std::f64::consts::TAU)
}

struct Bridger<'a> {
    nodes: &'a [Point],
    outer: &'a [Point],
    hole_loops: Vec<Vec<usize>>,
}

impl Bridger<'_> {
    fn visible(&self, merged: &[usize], pending: &[usize], m: usize, p: usize) -> bool {
        let (pm, pp) = (self.nodes[m], self.nodes[p]);
        let edges = |lp: &[usize]| {
            let n = lp.len();
            (0..n).map(move |i| (lp[i], lp[(i + 1) % n])).collect::<Vec<_>>()
        };
        let mut all = edges(merged);
        for &k in pending {
            all.extend(edges(&self.hole_loops[k]));
        }
        for (a, b) in all {
            if segments_cross(pm, pp, self.nodes[a], self.nodes[b]) {
                return false;
            }
        }
        // no other vertex may sit on the open segment
        for (i, &q) in self.nodes.iter().enumerate() {
            if i == m || i == p || q == pm || q == pp {
                continue;
            }
            if orient(pm, pp, q) == 0.0 {
                let t = ((q[0] - pm[0]) * (pp[0] - pm[0]) + (q[1] - pm[1]) * (pp[1] - pm[1]))
                    / ((pp[0] - pm[0]).powi(2) + (pp[1] - pm[1]).powi(2));
                if t > 0.0 && t < 1.0 {
                    return false;
                }
            }
        }
        let mid = [0.5 * (pm[0] + pp[0]), 0.5 * (pm[1] + pp[1])];
        contains(self.outer, mid)
            && self.hole_loops.iter().all(|h| {
                let pts: Vec<Point> = h.iter().map(|&i| self.nodes[i]).collect();
                !contains(&pts, mid)
            })
    }

    fn bridge(&self) -> Result<Vec<usize>> {
        let mut merged: Vec<usize> = (0..self.outer.len()).collect();
        let mut order: Vec<usize> = (0..self.hole_loops.len()).collect();
        let max_x = |k: usize| self.hole_loops[k].iter().map(|&i| self.nodes[i][0]).fold(f64::MIN, f64::max);
        order.sort_by(|&a, &b| max_x(b).total_cmp(&max_x(a)).then(a.cmp(&b)));
        for (done, &k) in order.iter().enumerate() {
            let hole = &self.hole_loops[k];
            let pending = &order[done + 1..];
            let hm = (0..hole.len())
                .max_by(|&a, &b| self.nodes[hole[a]][0].total_cmp(&self.nodes[hole[b]][0]).then(b.cmp(&a)))
                .unwrap();
            let m = hole[hm];
            let pm = self.nodes[m];
            let mut candidates: Vec<usize> = (0..merged.len()).collect();
            let dist = |pos: usize| {
                let q = self.nodes[merged[pos]];
                (q[0] - pm[0]).powi(2) + (q[1] - pm[1]).powi(2)
            };
            candidates.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)).then(a.cmp(&b)));
            let pos = candidates
                .into_iter()
                .find(|&pos| {
                    let n = merged.len();
                    let p = merged[pos];
                    let pp = self.nodes[p];
                    let prev = self.nodes[merged[(pos + n - 1) % n]];
                    let next = self.nodes[merged[(pos + 1) % n]];
                    let w = [next[0] - pp[0], next[1] - pp[1]];
                    let u = [prev[0] - pp[0], prev[1] - pp[1]];
                    let d = [pm[0] - pp[0], pm[1] - pp[1]];
                    let inside_wedge = {
                        let a = ccw_angle(w, d);
                        a > 0.0 && a < ccw_angle(w, u)
                    };
                    inside_wedge && self.visible(&merged, pending, m, p)
                })
                .ok_or_else(|| Error::DegeneratePolygon(format!("no visible bridge for hole {k}")))?;
            let mut spliced = merged[..=pos].to_vec();
            spliced.extend((0..=hole.len()).map(|i| hole[(hm + i) % hole.len()]));
            spliced.extend_from_slice(&merged[pos..]);
            merged = spliced;
        }
        Ok(merged)
    }
}

fn clip_ears(nodes: &[Point], mut poly: Vec<usize>, tol: f64) -> Result<Vec<[usize; 3]>> {
    let mut tris = Vec::with_capacity(poly.len().saturating_sub(2));
    while poly.len() > 3 {
        let n = poly.len();
        let mut best: Option<(f64, usize)> = None;
        for i in 0..n {
            let (a, b, c) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
            let (pa, pb, pc) = (nodes[a], nodes[b], nodes[c]);
            if orient(pa, pb, pc) <= tol {
                continue;
            }
            let blocked = poly.iter().any(|&q| {
                q != a && q != b && q != c && {
                    let pq = nodes[q];
                    pq != pa && pq != pb && pq != pc && point_in_triangle(pq, pa, pb, pc, tol)
                }
            });
            if blocked {
                continue;
            }
            let quality = min_angle(&[pa, pb, pc]);
            if best.is_none_or(|(q, _)| quality > q) {
                best = Some((quality, i));
            }
        }
        let (_, i) = best.ok_or_else(|| Error::DegeneratePolygon("no clippable ear left".into()))?;
        tris.push([poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]]);
        poly.remove(i);
    }
    let [a, b, c] = [poly[0], poly[1], poly[2]];
    if orient(nodes[a], nodes[b], nodes[c]) <= tol {
        return Err(Error::DegeneratePolygon("final ear has near-zero area".into()));
    }
    tris.push([a, b, c]);
    Ok(tris)
}

pub(super) fn seed_mesh(outer: &[Point], holes: &[Vec<Point>]) -> Result<TriMesh> {
    let tol = collinear_tol(outer);
    let mut nodes: Vec<Point> = outer.to_vec();
    let mut loops = vec![Some(LoopTag::Outer); outer.len()];
    let mut hole_loops = Vec::with_capacity(holes.len());
    for (k, h) in holes.iter().enumerate() {
        hole_loops.push((nodes.len()..nodes.len() + h.len()).collect::<Vec<_>>());
        nodes.extend_from_slice(h);
        loops.extend(std::iter::repeat_n(Some(LoopTag::Hole(k)), h.len()));
    }
    let all_loops = std::iter::once((0..outer.len()).collect::<Vec<_>>()).chain(hole_loops.iter().cloned());
    for lp in all_loops {
        let n = lp.len();
        for i in 0..n {
            let (a, b, c) = (nodes[lp[(i + n - 1) % n]], nodes[lp[i]], nodes[lp[(i + 1) % n]]);
            if orient(a, b, c).abs() <= tol {
                return Err(Error::DegeneratePolygon(format!("vertex {b:?} is collinear with its neighbours")));
            }
        }
    }
    let merged = Bridger { nodes: &nodes, outer, hole_loops }.bridge()?;
    let tris = clip_ears(&nodes, merged, tol)?;
    let worst = tris.iter().map(|t| min_angle(&[nodes[t[0]], nodes[t[1]], nodes[t[2]]])).fold(f64::MAX, f64::min);
    if worst.to_degrees() <= MIN_SEED_ANGLE_DEG {
        return Err(Error::PoorSeedQuality { min_angle_deg: worst.to_degrees(), limit_deg: MIN_SEED_ANGLE_DEG });
    }
    let mut curves = vec![(LoopTag::Outer, None)];
    curves.extend((0..holes.len()).map(|k| (LoopTag::Hole(k), None)));
    TriMesh::from_parts(nodes, tris, &loops, curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_shape_seed() {
        let outer = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        let m = seed_mesh(&outer, &[]).unwrap();
        assert_eq!(m.triangle_count(), 4);
        let area: f64 = (0..4).map(|t| m.area(t)).sum();
        assert!((area - 3.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_vertex_is_rejected() {
        let outer = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]];
        assert!(matches!(seed_mesh(&outer, &[]), Err(Error::DegeneratePolygon(_))));
    }

    #[test]
    fn thin_seed_is_flagged() {
        let outer = [[0.0, 0.0], [10.0, 0.0], [10.0, 1.0], [0.0, 1.0]];
        assert!(matches!(seed_mesh(&outer, &[]), Err(Error::PoorSeedQuality { .. })));
    }

    #[test]
    fn two_holes() {
        let outer = [[0.0, 0.0], [6.0, 0.0], [6.0, 3.0], [0.0, 3.0]];
        let h1 = vec![[1.0, 1.0], [1.0, 2.0], [2.0, 2.0], [2.0, 1.0]];
        let h2 = vec![[4.0, 1.0], [4.0, 2.0], [5.0, 2.0], [5.0, 1.0]];
        let m = seed_mesh(&outer, &[h1, h2]);
        // Either a valid two-hole mesh or an explicit quality rejection; never a broken mesh.
        match m {
            Ok(m) => {
                assert_eq!(m.euler_characteristic(), -1);
                let area: f64 = (0..m.triangle_count()).map(|t| m.area(t)).sum();
                assert!((area - 16.0).abs() < 1e-12);
            }
            Err(e) => assert!(matches!(e, Error::PoorSeedQuality { .. }), "{e}"),
        }
    }
}
