//! Shared inputs for the benchmarks in `benches/`.

use std::sync::Arc;

use svsection_core::{normalize_section, triangulate, Material, SectionSpec, Shape, TriMesh};

pub fn spec(shape: Shape) -> SectionSpec {
    let spec = SectionSpec::new("bench", shape, Material::new(1.0, 0.3).expect("valid material")).expect("valid shape");
    normalize_section(&spec).expect("normalizable").spec
}

pub fn disk() -> SectionSpec {
    spec(Shape::Circle { radius: 1.0 })
}

pub fn l_shape() -> SectionSpec {
    let outer = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
    spec(Shape::Polygon { outer, holes: vec![] })
}

pub fn mesh(spec: &SectionSpec, h: f64) -> Arc<TriMesh> {
    Arc::new(triangulate(spec, h).expect("meshable"))
}
