//! Legacy ASCII VTK export (`DATASET UNSTRUCTURED_GRID`, cell type 5).

use std::fmt::Write as _;
use std::path::Path;

use super::TriMesh;

/// VTK cell type id for a linear triangle.
pub const VTK_TRIANGLE: u8 = 5;

enum Data<'a> {
    Scalars(&'a str, &'a [f64]),
    Vectors(&'a str, &'a [[f64; 2]]),
}

pub struct VtkWriter<'a> {
    mesh: &'a TriMesh,
    title: String,
    point: Vec<Data<'a>>,
    cell: Vec<Data<'a>>,
}

impl<'a> VtkWriter<'a> {
    pub fn new(mesh: &'a TriMesh, title: impl Into<String>) -> Self {
        VtkWriter { mesh, title: title.into(), point: vec![], cell: vec![] }
    }

    pub fn point_scalars(mut self, name: &'a str, values: &'a [f64]) -> Self {
        assert_eq!(values.len(), self.mesh.node_count(), "point data length");
        self.point.push(Data::Scalars(name, values));
        self
    }

    pub fn cell_scalars(mut self, name: &'a str, values: &'a [f64]) -> Self {
        assert_eq!(values.len(), self.mesh.triangle_count(), "cell data length");
        self.cell.push(Data::Scalars(name, values));
        self
    }

    pub fn cell_vectors(mut self, name: &'a str, values: &'a [[f64; 2]]) -> Self {
        assert_eq!(values.len(), self.mesh.triangle_count(), "cell data length");
        self.cell.push(Data::Vectors(name, values));
        self
    }

    fn write_block(out: &mut String, data: &[Data<'_>]) {
        for d in data {
            match d {
                Data::Scalars(name, v) => {
                    let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
                    for x in v.iter() {
                        let _ = writeln!(out, "{x:e}");
                    }
                }
                Data::Vectors(name, v) => {
                    let _ = writeln!(out, "VECTORS {name} double");
                    for x in v.iter() {
                        let _ = writeln!(out, "{:e} {:e} 0", x[0], x[1]);
                    }
                }
            }
        }
    }

    pub fn render(&self) -> String {
        let m = self.mesh;
        let mut out = String::new();
        // the title line is limited to 256 characters and a single line
        let title: String = self.title.replace('\n', " ").chars().take(255).collect();
        let _ = writeln!(out, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
        let _ = writeln!(out, "POINTS {} double", m.node_count());
        for p in m.nodes() {
            let _ = writeln!(out, "{:e} {:e} 0", p[0], p[1]);
        }
        let nt = m.triangle_count();
        let _ = writeln!(out, "CELLS {nt} {}", 4 * nt);
        for t in m.triangles() {
            let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(out, "CELL_TYPES {nt}");
        for _ in 0..nt {
            let _ = writeln!(out, "{VTK_TRIANGLE}");
        }
        if !self.point.is_empty() {
            let _ = writeln!(out, "POINT_DATA {}", m.node_count());
            Self::write_block(&mut out, &self.point);
        }
        if !self.cell.is_empty() {
            let _ = writeln!(out, "CELL_DATA {nt}");
            Self::write_block(&mut out, &self.cell);
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::LoopTag;

    #[test]
    fn layout() {
        let nodes = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let m = TriMesh::from_parts(nodes, vec![[0, 1, 2], [0, 2, 3]], &[Some(LoopTag::Outer); 4], vec![(LoopTag::Outer, None)])
            .unwrap();
        let phi = [0.0, 1.0, 2.0, 3.0];
        let s = [[1.0, 0.0], [0.0, 1.0]];
        let text = VtkWriter::new(&m, "t").point_scalars("phi", &phi).cell_vectors("torsion", &s).render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[3], "DATASET UNSTRUCTURED_GRID");
        assert!(text.contains("CELLS 2 8\n3 0 1 2\n3 0 2 3\nCELL_TYPES 2\n5\n5\n"));
        assert!(text.contains("POINT_DATA 4\nSCALARS phi double 1\nLOOKUP_TABLE default\n"));
        assert!(text.contains("CELL_DATA 2\nVECTORS torsion double\n1e0 0e0 0\n"));
    }
}
