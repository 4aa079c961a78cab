use std::collections::HashMap;

use super::{BoundaryEdge, TriMesh};

/// Splits every triangle into four through its edge midpoints. Midpoints of
/// edges on curved loops are projected back onto the curve.
pub fn refine(mesh: &TriMesh) -> TriMesh {
    let mut nodes = mesh.nodes().to_vec();
    let boundary: HashMap<(usize, usize), BoundaryEdge> =
        mesh.boundary_edges().iter().map(|e| ((e.nodes[0].min(e.nodes[1]), e.nodes[0].max(e.nodes[1])), *e)).collect();
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * mesh.triangle_count() / 2);
    let mut mid = |a: usize, b: usize, nodes: &mut Vec<[f64; 2]>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoints.entry(key).or_insert_with(|| {
            let (p, q) = (nodes[a], nodes[b]);
            let mut m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            if let Some(curve) = boundary.get(&key).and_then(|e| mesh.curve(e.tag)) {
                m = curve.snap(m);
            }
            nodes.push(m);
            nodes.len() - 1
        })
    };
    let mut tris = Vec::with_capacity(4 * mesh.triangle_count());
    for &[a, b, c] in mesh.triangles() {
        let ab = mid(a, b, &mut nodes);
        let bc = mid(b, c, &mut nodes);
        let ca = mid(c, a, &mut nodes);
        tris.push([a, ab, ca]);
        tris.push([ab, b, bc]);
        tris.push([ca, bc, c]);
        tris.push([ab, bc, ca]);
    }
    let mut edges = Vec::with_capacity(2 * mesh.boundary_edges().len());
    for e in mesh.boundary_edges() {
        let [a, b] = e.nodes;
        let m = mid(a, b, &mut nodes);
        edges.push(BoundaryEdge { nodes: [a, m], tag: e.tag });
        edges.push(BoundaryEdge { nodes: [m, b], tag: e.tag });
    }
    TriMesh::with_boundary(nodes, tris, edges, mesh.curves().to_vec(), mesh.refinements() + 1)
        .expect("midpoint subdivision of a valid mesh is valid")
}
