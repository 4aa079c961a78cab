//! Symmetric three-point rule on triangles, exact for polynomials of degree two.
//!
//! Points sit at barycentric coordinates (2/3, 1/6, 1/6) and permutations; every
//! weight is one third of the triangle area. All weights are positive, so
//! discrete Cauchy-Schwarz and Jensen inequalities built on this rule hold
//! exactly (up to rounding), which the bound checks rely on.

/// Barycentric coordinates of the three quadrature points.
pub const BARYCENTRIC: [[f64; 3]; 3] = [
    [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
];

/// Weight of each point relative to the triangle area.
pub const WEIGHT: f64 = 1.0 / 3.0;

pub type Point = [f64; 2];

#[inline]
pub fn map_point(v: &[Point; 3], bary: &[f64; 3]) -> Point {
    [
        bary[0] * v[0][0] + bary[1] * v[1][0] + bary[2] * v[2][0],
        bary[0] * v[0][1] + bary[1] * v[1][1] + bary[2] * v[2][1],
    ]
}

/// Physical quadrature points of a triangle.
#[inline]
pub fn points(v: &[Point; 3]) -> [Point; 3] {
    [map_point(v, &BARYCENTRIC[0]), map_point(v, &BARYCENTRIC[1]), map_point(v, &BARYCENTRIC[2])]
}

/// Integral of `f` over the triangle with vertices `v` and area `area`.
#[inline]
pub fn integrate<F: FnMut(Point) -> f64>(v: &[Point; 3], area: f64, mut f: F) -> f64 {
    let p = points(v);
    WEIGHT * area * (f(p[0]) + f(p[1]) + f(p[2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_quadratics_on_reference_triangle() {
        let v = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        // int x^2 = 1/12, int xy = 1/24, int 1 = 1/2 on the unit right triangle
        assert!((integrate(&v, 0.5, |p| p[0] * p[0]) - 1.0 / 12.0).abs() < 1e-15);
        assert!((integrate(&v, 0.5, |p| p[0] * p[1]) - 1.0 / 24.0).abs() < 1e-15);
        assert!((integrate(&v, 0.5, |_| 1.0) - 0.5).abs() < 1e-15);
    }
}
