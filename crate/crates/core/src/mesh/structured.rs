//! Mapped structured meshes for the primitive shapes: concentric rings for
//! disks, annuli and ellipses, a diagonal-split grid for rectangles.

use std::f64::consts::TAU;

use super::{Curve, LoopTag, TriMesh};
use crate::error::{Error, Result};
use crate::quadrature::Point;

/// Joins two rings of nodes (both ordered counterclockwise and starting at
/// angle zero) with triangles, always taking the shorter diagonal.
fn zip_rings(inner: &[usize], outer: &[usize], nodes: &[Point], tris: &mut Vec<[usize; 3]>) {
    let (m, n) = (inner.len(), outer.len());
    let d2 = |a: usize, b: usize| {
        let (p, q) = (nodes[a], nodes[b]);
        (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
    };
    let (mut i, mut j) = (if m == 1 { 1 } else { 0 }, 0);
    while i < m || j < n {
        let a = inner[i % m];
        let b = outer[j % n];
        let advance_outer = if i == m {
            true
        } else if j == n {
            false
        } else {
            d2(a, outer[(j + 1) % n]) <= d2(inner[(i + 1) % m], b)
        };
        if advance_outer {
            tris.push([a, b, outer[(j + 1) % n]]);
            j += 1;
        } else {
            tris.push([a, b, inner[(i + 1) % m]]);
            i += 1;
        }
    }
}

fn ring(nodes: &mut Vec<Point>, count: usize, map: impl Fn(f64) -> Point) -> Vec<usize> {
    (0..count)
        .map(|j| {
            nodes.push(map(TAU * j as f64 / count as f64));
            nodes.len() - 1
        })
        .collect()
}

/// Searches the ring count so the mesh size meets `h_target`; `build` maps a
/// ring count to a mesh and `estimate` to its triangle count.
fn fit_rings(
    h_target: f64,
    budget: usize,
    first_guess: usize,
    estimate: impl Fn(usize) -> usize,
    build: impl Fn(usize) -> Result<TriMesh>,
) -> Result<TriMesh> {
    let check = |n: usize| {
        let requested = estimate(n);
        if requested > budget {
            Err(Error::ElementBudget { requested, budget })
        } else {
            Ok(())
        }
    };
    let mut n = first_guess.max(1);
    check(n)?;
    let probe = build(n)?;
    if probe.h() <= h_target {
        return Ok(probe);
    }
    n = ((n as f64) * probe.h() / h_target).ceil() as usize;
    loop {
        check(n)?;
        let mesh = build(n)?;
        if mesh.h() <= h_target {
            return Ok(mesh);
        }
        n += 1;
    }
}

/// Disk of radius 1 with `n` rings (ring `k` has `6k` nodes), mapped to the
/// ellipse with semi-axes `a`, `b`.
fn ellipse_rings(a: f64, b: f64, n: usize) -> Result<TriMesh> {
    let curve = if a == b { Curve::Circle { radius: a } } else { Curve::Ellipse { a, b } };
    let mut nodes = vec![[0.0, 0.0]];
    let mut tris = Vec::with_capacity(6 * n * n);
    let mut prev = vec![0usize];
    for k in 1..=n {
        let cur = if k == n {
            ring(&mut nodes, 6 * k, |t| curve.point_at(t))
        } else {
            let r = k as f64 / n as f64;
            ring(&mut nodes, 6 * k, |t| [a * r * t.cos(), b * r * t.sin()])
        };
        zip_rings(&prev, &cur, &nodes, &mut tris);
        prev = cur;
    }
    let mut loops = vec![None; nodes.len()];
    for &i in &prev {
        loops[i] = Some(LoopTag::Outer);
    }
    TriMesh::from_parts(nodes, tris, &loops, vec![(LoopTag::Outer, Some(curve))])
}

pub(super) fn ellipse(a: f64, b: f64, h_target: f64, budget: usize) -> Result<TriMesh> {
    let guess = (a.max(b) / h_target).ceil() as usize;
    fit_rings(h_target, budget, guess, |n| 6 * n * n, |n| ellipse_rings(a, b, n))
}

fn annulus_rings(outer: f64, inner: f64, n: usize) -> Result<TriMesh> {
    let spacing = (outer - inner) / n as f64;
    let mut nodes = Vec::new();
    let mut tris = Vec::new();
    let mut rings = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let r = if k == n { outer } else { inner + k as f64 * spacing };
        let count = ((TAU * r / spacing).round() as usize).max(6);
        rings.push(ring(&mut nodes, count, |t| [r * t.cos(), r * t.sin()]));
    }
    for w in rings.windows(2) {
        zip_rings(&w[0], &w[1], &nodes, &mut tris);
    }
    let mut loops = vec![None; nodes.len()];
    for &i in &rings[0] {
        loops[i] = Some(LoopTag::Hole(0));
    }
    for &i in &rings[n] {
        loops[i] = Some(LoopTag::Outer);
    }
    TriMesh::from_parts(
        nodes,
        tris,
        &loops,
        vec![(LoopTag::Outer, Some(Curve::Circle { radius: outer })), (LoopTag::Hole(0), Some(Curve::Circle { radius: inner }))],
    )
}

fn annulus_estimate(outer: f64, inner: f64, n: usize) -> usize {
    let spacing = (outer - inner) / n as f64;
    // two triangles per ring node pair, roughly
    (2.0 * TAU * (outer + inner) / 2.0 / spacing * n as f64) as usize + 12 * n
}

pub(super) fn annulus(outer: f64, inner: f64, h_target: f64, budget: usize) -> Result<TriMesh> {
    let guess = ((outer - inner) / h_target).ceil() as usize;
    fit_rings(h_target, budget, guess, |n| annulus_estimate(outer, inner, n), |n| annulus_rings(outer, inner, n))
}

pub(super) fn rectangle(width: f64, height: f64, h_target: f64, budget: usize) -> Result<TriMesh> {
    let cell = h_target / std::f64::consts::SQRT_2;
    let nx = (width / cell).ceil().max(1.0) as usize;
    let ny = (height / cell).ceil().max(1.0) as usize;
    let requested = 2 * nx * ny;
    if requested > budget {
        return Err(Error::ElementBudget { requested, budget });
    }
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    let mut loops = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([width * (i as f64 / nx as f64 - 0.5), height * (j as f64 / ny as f64 - 0.5)]);
            let on_edge = i == 0 || j == 0 || i == nx || j == ny;
            loops.push(on_edge.then_some(LoopTag::Outer));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut tris = Vec::with_capacity(requested);
    for j in 0..ny {
        for i in 0..nx {
            let (p00, p10, p11, p01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([p00, p10, p11]);
            tris.push([p00, p11, p01]);
        }
    }
    TriMesh::from_parts(nodes, tris, &loops, vec![(LoopTag::Outer, None)])
}
