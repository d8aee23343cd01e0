//! Polytope primitives: hull reduction, volume, diameter, difference body.

pub mod coord;
mod hull;

use std::cmp::Ordering;

use nalgebra::{Matrix3, Vector3};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use coord::{format_rational, parse_rational, Coord, Mode};
pub(crate) use hull::{det3, dot, sub};

pub type Point<S> = [S; 3];
pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("DegenerateInput: {0}")]
    DegenerateInput(String),
    #[error("ParseError: {0}")]
    Parse(String),
}

/// A convex polytope given by its extreme points.
///
/// Construction always goes through the hull, so the vertex list is
/// deduplicated, every vertex is extreme, and the body is full-dimensional.
/// `faces` is an outward-oriented triangulation of the boundary, indexing
/// into `vertices`.
#[derive(Clone, Debug)]
pub struct Polytope<S: Coord = f64> {
    vertices: Vec<Point<S>>,
    faces: Vec<[usize; 3]>,
}

impl<S: Coord> Polytope<S> {
    /// Convex hull of `points`; see [`convex_hull`].
    pub fn new(points: &[Point<S>]) -> Result<Self, GeomError> {
        convex_hull(points)
    }

    pub fn vertices(&self) -> &[Point<S>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn mode(&self) -> Mode {
        S::MODE
    }

    pub fn to_float(&self) -> Polytope<f64> {
        Polytope {
            vertices: self
                .vertices
                .iter()
                .map(|v| [v[0].to_f64(), v[1].to_f64(), v[2].to_f64()])
                .collect(),
            faces: self.faces.clone(),
        }
    }

    /// Volume of the hull, from a fan of tetrahedra over the vertex centroid.
    pub fn volume(&self) -> S {
        volume(self)
    }

    pub fn diameter_squared(&self) -> S {
        diameter_squared(self)
    }

    pub fn diameter(&self) -> f64 {
        self.diameter_squared().to_f64().sqrt()
    }
}

impl Polytope<f64> {
    /// Image under the linear map `t`. A linear bijection maps extreme points
    /// to extreme points, so the hull is carried over rather than recomputed.
    pub fn transformed(&self, t: &Mat3) -> Polytope<f64> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let w = t * Vec3::new(v[0], v[1], v[2]);
                [w.x, w.y, w.z]
            })
            .collect();
        let faces = if t.determinant() < 0.0 {
            self.faces.iter().map(|f| [f[0], f[2], f[1]]).collect()
        } else {
            self.faces.clone()
        };
        Polytope { vertices, faces }
    }

    pub fn vertex_vectors(&self) -> Vec<Vec3> {
        self.vertices.iter().map(|v| Vec3::new(v[0], v[1], v[2])).collect()
    }
}

impl Polytope<BigRational> {
    /// Exact lift of a float polytope (each double is a dyadic rational).
    pub fn from_float(p: &Polytope<f64>) -> Polytope<BigRational> {
        let lift = |x: f64| coord::rational_from_f64(x).expect("finite coordinate");
        Polytope {
            vertices: p.vertices.iter().map(|v| [lift(v[0]), lift(v[1]), lift(v[2])]).collect(),
            faces: p.faces.clone(),
        }
    }
}

/// Extreme points of `points`, together with a boundary triangulation.
///
/// Float inputs use orientation predicates with a tolerance of 1e-10 times
/// the cube of the bounding-box extent; rational inputs are exact.
pub fn convex_hull<S: Coord>(points: &[Point<S>]) -> Result<Polytope<S>, GeomError> {
    let h = hull::hull_indices(points)?;
    let mut remap = vec![usize::MAX; points.len()];
    for (new, &old) in h.vertices.iter().enumerate() {
        remap[old] = new;
    }
    Ok(Polytope {
        vertices: h.vertices.iter().map(|&i| points[i].clone()).collect(),
        faces: h.faces.iter().map(|f| [remap[f[0]], remap[f[1]], remap[f[2]]]).collect(),
    })
}

pub fn volume<S: Coord>(p: &Polytope<S>) -> S {
    let n = p.vertices.len() as i64;
    let mut c = [S::zero(), S::zero(), S::zero()];
    for v in &p.vertices {
        for k in 0..3 {
            c[k] = c[k].add(&v[k]);
        }
    }
    let c = [c[0].div_int(n), c[1].div_int(n), c[2].div_int(n)];
    let mut total = S::zero();
    for f in &p.faces {
        let a = sub(&p.vertices[f[0]], &c);
        let b = sub(&p.vertices[f[1]], &c);
        let d = sub(&p.vertices[f[2]], &c);
        total = total.add(&det3(&a, &b, &d).abs());
    }
    total.div_int(6)
}

/// Largest squared distance over all vertex pairs.
pub fn diameter_squared<S: Coord>(p: &Polytope<S>) -> S {
    let vs = &p.vertices;
    (0..vs.len())
        .into_par_iter()
        .map(|i| {
            let mut best = S::zero();
            for j in (i + 1)..vs.len() {
                let d = sub(&vs[i], &vs[j]);
                let d2 = dot(&d, &d);
                if d2 > best {
                    best = d2;
                }
            }
            best
        })
        .reduce(S::zero, |a, b| if b > a { b } else { a })
}

pub fn diameter<S: Coord>(p: &Polytope<S>) -> f64 {
    p.diameter()
}

/// The difference body `P - P`: hull of all pairwise vertex differences.
pub fn difference_body<S: Coord>(p: &Polytope<S>) -> Polytope<S> {
    let vs = &p.vertices;
    let mut diffs = Vec::with_capacity(vs.len() * vs.len());
    for a in vs {
        for b in vs {
            diffs.push(sub(a, b));
        }
    }
    convex_hull(&diffs).expect("difference body of a full-dimensional polytope is full-dimensional")
}

/// `|det(y1, y2, y3)| / 3!`, a lower bound for the volume of any convex body
/// containing segments parallel to the `y_i`.
pub fn simplex_volume_lower_bound(y1: &Vec3, y2: &Vec3, y3: &Vec3) -> f64 {
    Mat3::from_columns(&[*y1, *y2, *y3]).determinant().abs() / 6.0
}

/// Polytope JSON document: `{"vertices": [[x, y, z], ...]}` with each
/// coordinate a JSON number or a `"p/q"` string.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeDoc {
    pub vertices: Vec<[serde_json::Value; 3]>,
}

impl PolytopeDoc {
    pub fn parse(text: &str) -> Result<Self, GeomError> {
        serde_json::from_str(text).map_err(|e| GeomError::Parse(e.to_string()))
    }

    /// Exact coordinates. JSON numbers are read as exact decimals.
    pub fn rational_points(&self) -> Result<Vec<Point<BigRational>>, GeomError> {
        self.vertices
            .iter()
            .map(|row| {
                let mut out: [BigRational; 3] = Default::default();
                for (slot, v) in out.iter_mut().zip(row) {
                    let text = match v {
                        serde_json::Value::Number(n) => n.to_string(),
                        serde_json::Value::String(s) => s.clone(),
                        other => {
                            return Err(GeomError::Parse(format!("bad coordinate {other}")));
                        }
                    };
                    *slot = parse_rational(&text).map_err(|e| GeomError::Parse(e.to_string()))?;
                }
                Ok(out)
            })
            .collect()
    }

    pub fn float_points(&self) -> Result<Vec<Point<f64>>, GeomError> {
        Ok(self
            .rational_points()?
            .iter()
            .map(|p| [p[0].to_f64(), p[1].to_f64(), p[2].to_f64()])
            .collect())
    }

    pub fn from_polytope<S: Coord>(p: &Polytope<S>) -> Self {
        let enc = |x: &S| -> serde_json::Value {
            match S::MODE {
                Mode::Float => serde_json::json!(x.to_f64()),
                Mode::Rational => {
                    serde_json::Value::String(format_rational(&x.to_rational()))
                }
            }
        };
        PolytopeDoc {
            vertices: p.vertices.iter().map(|v| [enc(&v[0]), enc(&v[1]), enc(&v[2])]).collect(),
        }
    }
}

/// Orders two vertices lexicographically; used for canonical antipodal
/// representatives.
pub fn lex_cmp(a: &Vec3, b: &Vec3) -> Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)).then(a.z.total_cmp(&b.z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    fn cube() -> Vec<Point<f64>> {
        let mut v = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    v.push([x, y, z]);
                }
            }
        }
        v
    }

    fn regular_tetrahedron() -> Vec<Point<f64>> {
        let s = 1.0 / 2f64.sqrt();
        vec![[s, 0.0, 0.0], [0.0, s, 0.0], [0.0, 0.0, s], [s, s, s]]
    }

    #[test]
    fn hull_drops_interior_point() {
        let mut pts = cube();
        pts.push([0.5, 0.5, 0.5]);
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert!(!p.vertices().contains(&[0.5, 0.5, 0.5]));
    }

    #[test]
    fn hull_drops_face_and_edge_points_first_in_order() {
        // Non-extreme boundary points listed before the corners.
        let mut pts = vec![[0.5, 0.5, 1.0], [0.5, 0.0, 0.0], [0.5, 0.5, 0.0]];
        pts.extend(cube());
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert!((p.volume() - 1.0).abs() < 1e-12);

        let exact: Vec<Point<BigRational>> = pts
            .iter()
            .map(|v| [q((v[0] * 2.0) as i64, 2), q((v[1] * 2.0) as i64, 2), q((v[2] * 2.0) as i64, 2)])
            .collect();
        let p = convex_hull(&exact).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(p.volume(), q(1, 1));
    }

    #[test]
    fn simplex_is_its_own_hull() {
        let pts = regular_tetrahedron();
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.faces().len(), 4);
    }

    #[test]
    fn coplanar_input_is_rejected() {
        let pts = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.3, 0.2, 0.0]];
        assert!(matches!(convex_hull(&pts), Err(GeomError::DegenerateInput(_))));
        assert!(matches!(convex_hull(&pts[..3]), Err(GeomError::DegenerateInput(_))));
    }

    #[test]
    fn volume_and_diameter_of_cube() {
        let p = convex_hull(&cube()).unwrap();
        assert!((p.volume() - 1.0).abs() < 1e-12);
        assert!((p.diameter() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn extremal_simplex_exact_volume_and_diameter() {
        let pts = vec![
            [q(0, 1), q(0, 1), q(0, 1)],
            [q(1, 1), q(1, 2), q(1, 2)],
            [q(1, 2), q(1, 1), q(1, 2)],
            [q(1, 2), q(1, 2), q(1, 1)],
        ];
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.volume(), q(1, 12));
        assert_eq!(p.diameter_squared(), q(3, 2));
        assert!((p.diameter() - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn regular_tetrahedron_volume() {
        let p = convex_hull(&regular_tetrahedron()).unwrap();
        // Edge 1: (1/6)|det| of the three edge vectors from one corner.
        let s = 1.0 / 2f64.sqrt();
        let e1 = Vec3::new(-s, s, 0.0);
        let e2 = Vec3::new(-s, 0.0, s);
        let e3 = Vec3::new(0.0, s, s);
        let oracle = Mat3::from_columns(&[e1, e2, e3]).determinant().abs() / 6.0;
        assert!((oracle - 2f64.sqrt() / 12.0).abs() < 1e-15);
        assert!((p.volume() - oracle).abs() < 1e-12);
        assert!((p.diameter() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn difference_body_of_cube_and_tetrahedron() {
        let c = difference_body(&convex_hull(&cube()).unwrap());
        assert_eq!(c.vertices().len(), 8);
        assert!((c.volume() - 8.0).abs() < 1e-12);
        for v in c.vertices() {
            assert!(v.iter().all(|x| (x.abs() - 1.0).abs() < 1e-12));
        }

        let t = convex_hull(&regular_tetrahedron()).unwrap();
        let d = difference_body(&t);
        assert_eq!(d.vertices().len(), 12);
        assert!((d.volume() - 20.0 * 2f64.sqrt() / 12.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_lower_bound_examples() {
        let e = Mat3::identity();
        let v = simplex_volume_lower_bound(&e.column(0).into(), &e.column(1).into(), &e.column(2).into());
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
        let a = Vec3::new(1.0, 2.0, 3.0);
        let b = Vec3::new(2.0, 4.0, 6.0);
        assert_eq!(simplex_volume_lower_bound(&a, &b, &Vec3::z()), 0.0);

        // Tetrahedron edge directions with |det| = 1/sqrt(2).
        let s = 1.0 / 2f64.sqrt();
        let y1 = Vec3::new(1.0, 1.0, 0.0) * s;
        let y2 = Vec3::new(1.0, -1.0, 0.0) * s;
        let y3 = Vec3::new(0.0, 1.0, -1.0) * s;
        let lb = simplex_volume_lower_bound(&y1, &y2, &y3);
        assert!((lb - 2f64.sqrt() / 12.0).abs() < 1e-15);
    }

    #[test]
    fn json_accepts_numbers_and_fraction_strings() {
        let doc = PolytopeDoc::parse(r#"{"vertices": [[0, 0, 0], ["1", "1/2", 0.5], [0.5, 1, "1/2"], ["1/2", "1/2", 1]]}"#)
            .unwrap();
        let pts = doc.rational_points().unwrap();
        assert_eq!(pts[1][1], q(1, 2));
        assert_eq!(pts[1][2], q(1, 2));
        let p = convex_hull(&pts).unwrap();
        assert_eq!(p.volume(), q(1, 12));
        assert!(PolytopeDoc::parse(r#"{"vertices": [[0, 0, true]]}"#).unwrap().rational_points().is_err());
        assert!(PolytopeDoc::parse("not json").is_err());
    }
}
