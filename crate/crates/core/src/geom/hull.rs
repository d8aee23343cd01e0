//! Incremental 3D convex hull.
//!
//! Points are inserted one at a time; each insertion removes the facets the
//! point sees and stitches the horizon to the new apex. Flat facets come out
//! triangulated, and a final pass drops vertices whose incident facet normals
//! do not span R³ (points in the relative interior of a facet or an edge).

use std::cmp::Ordering;
use std::collections::HashSet;

use super::coord::{Coord, Mode};
use super::{GeomError, Point};

const FLOAT_REL_EPS: f64 = 1e-10;

pub(crate) fn sub<S: Coord>(a: &Point<S>, b: &Point<S>) -> Point<S> {
    [a[0].sub(&b[0]), a[1].sub(&b[1]), a[2].sub(&b[2])]
}

pub(crate) fn dot<S: Coord>(a: &Point<S>, b: &Point<S>) -> S {
    a[0].mul(&b[0]).add(&a[1].mul(&b[1])).add(&a[2].mul(&b[2]))
}

pub(crate) fn cross<S: Coord>(a: &Point<S>, b: &Point<S>) -> Point<S> {
    [
        a[1].mul(&b[2]).sub(&a[2].mul(&b[1])),
        a[2].mul(&b[0]).sub(&a[0].mul(&b[2])),
        a[0].mul(&b[1]).sub(&a[1].mul(&b[0])),
    ]
}

pub(crate) fn det3<S: Coord>(a: &Point<S>, b: &Point<S>, c: &Point<S>) -> S {
    dot(a, &cross(b, c))
}

/// Signed volume (times 6) of the tetrahedron `abcd`; positive when `d` lies
/// on the side of `abc` that its right-handed normal points to.
pub(crate) fn orient<S: Coord>(a: &Point<S>, b: &Point<S>, c: &Point<S>, d: &Point<S>) -> S {
    det3(&sub(b, a), &sub(c, a), &sub(d, a))
}

/// Tolerances for float predicates, scaled by the bounding box extent.
#[derive(Clone, Copy, Debug)]
struct Tolerances {
    len: f64,
    area: f64,
    vol: f64,
}

impl Tolerances {
    fn for_points<S: Coord>(points: &[Point<S>]) -> Self {
        if S::MODE == Mode::Rational {
            return Tolerances { len: 0.0, area: 0.0, vol: 0.0 };
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            for k in 0..3 {
                let v = p[k].to_f64();
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let extent = (0..3).map(|k| hi[k] - lo[k]).fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
        Tolerances {
            len: FLOAT_REL_EPS * extent,
            area: FLOAT_REL_EPS * extent * extent,
            vol: FLOAT_REL_EPS * extent * extent * extent,
        }
    }
}

/// Result of a hull computation, in terms of indices into the input slice.
#[derive(Clone, Debug)]
pub(crate) struct HullIndices {
    pub vertices: Vec<usize>,
    pub faces: Vec<[usize; 3]>,
}

pub(crate) fn hull_indices<S: Coord>(points: &[Point<S>]) -> Result<HullIndices, GeomError> {
    if points.len() < 4 {
        return Err(GeomError::DegenerateInput(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    let tol = Tolerances::for_points(points);
    let mut candidates = dedup(points, tol);
    // Two passes suffice: after the first, every survivor is extreme.
    for _ in 0..3 {
        let faces = incremental(points, &candidates, tol)?;
        let mut used: Vec<usize> = faces.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        let extreme: Vec<usize> = used
            .iter()
            .copied()
            .filter(|&v| is_extreme(points, v, &faces))
            .collect();
        if extreme.len() == used.len() {
            return Ok(HullIndices { vertices: used, faces });
        }
        candidates = extreme;
    }
    Err(GeomError::DegenerateInput(
        "hull did not stabilise; input is numerically degenerate".into(),
    ))
}

fn dedup<S: Coord>(points: &[Point<S>], tol: Tolerances) -> Vec<usize> {
    let mut keep: Vec<usize> = Vec::with_capacity(points.len());
    'outer: for (i, p) in points.iter().enumerate() {
        for &j in &keep {
            let d = sub(p, &points[j]);
            if dot(&d, &d).sign(tol.len * tol.len) != Ordering::Greater {
                continue 'outer;
            }
        }
        keep.push(i);
    }
    keep
}

fn incremental<S: Coord>(
    points: &[Point<S>],
    ids: &[usize],
    tol: Tolerances,
) -> Result<Vec<[usize; 3]>, GeomError> {
    if ids.len() < 4 {
        return Err(GeomError::DegenerateInput("fewer than 4 distinct points".into()));
    }
    let p = |i: usize| &points[i];

    let i0 = ids[0];
    let i1 = argmax(ids, |&i| {
        let d = sub(p(i), p(i0));
        dot(&d, &d)
    });
    let d01 = sub(p(i1), p(i0));
    if dot(&d01, &d01).sign(tol.len * tol.len) != Ordering::Greater {
        return Err(GeomError::DegenerateInput("all points coincide".into()));
    }
    let i2 = argmax(ids, |&i| {
        let c = cross(&d01, &sub(p(i), p(i0)));
        dot(&c, &c)
    });
    let c012 = cross(&d01, &sub(p(i2), p(i0)));
    if dot(&c012, &c012).sign(tol.area * tol.area) != Ordering::Greater {
        return Err(GeomError::DegenerateInput("points are collinear".into()));
    }
    let i3 = argmax(ids, |&i| orient(p(i0), p(i1), p(i2), p(i)).abs());
    let o = orient(p(i0), p(i1), p(i2), p(i3));
    let (a, b, c, d) = match o.sign(tol.vol) {
        Ordering::Less => (i0, i1, i2, i3),
        Ordering::Greater => (i0, i2, i1, i3),
        Ordering::Equal => {
            return Err(GeomError::DegenerateInput("points are coplanar".into()));
        }
    };
    let mut faces: Vec<[usize; 3]> = vec![[a, b, c], [a, d, b], [b, d, c], [c, d, a]];

    // Far points first keeps the intermediate hulls small.
    let centroid: [f64; 3] = {
        let mut s = [0.0; 3];
        for &i in &[a, b, c, d] {
            for k in 0..3 {
                s[k] += p(i)[k].to_f64() / 4.0;
            }
        }
        s
    };
    let mut order: Vec<usize> = ids.iter().copied().filter(|i| ![a, b, c, d].contains(i)).collect();
    let dist = |i: usize| -> f64 { (0..3).map(|k| (p(i)[k].to_f64() - centroid[k]).powi(2)).sum() };
    order.sort_by(|&x, &y| dist(y).total_cmp(&dist(x)).then(x.cmp(&y)));

    for &q in &order {
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| orient(p(f[0]), p(f[1]), p(f[2]), p(q)).sign(tol.vol) == Ordering::Greater)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            for e in 0..3 {
                edges.insert((f[e], f[(e + 1) % 3]));
            }
        }
        let mut next: Vec<[usize; 3]> = Vec::with_capacity(faces.len() + 4);
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for (f, &vis) in faces.iter().zip(&visible) {
            if vis {
                for e in 0..3 {
                    let (u, v) = (f[e], f[(e + 1) % 3]);
                    if !edges.contains(&(v, u)) {
                        horizon.push((u, v));
                    }
                }
            } else {
                next.push(*f);
            }
        }
        for (u, v) in horizon {
            next.push([u, v, q]);
        }
        faces = next;
    }
    Ok(faces)
}

fn argmax<S: Coord, F: Fn(&usize) -> S>(ids: &[usize], key: F) -> usize {
    let mut best = ids[0];
    let mut best_val = key(&ids[0]);
    for i in &ids[1..] {
        let v = key(i);
        if v > best_val {
            best = *i;
            best_val = v;
        }
    }
    best
}

fn is_extreme<S: Coord>(points: &[Point<S>], v: usize, faces: &[[usize; 3]]) -> bool {
    let normals: Vec<Point<S>> = faces
        .iter()
        .filter(|f| f.contains(&v))
        .map(|f| {
            let a = &points[f[0]];
            cross(&sub(&points[f[1]], a), &sub(&points[f[2]], a))
        })
        .collect();
    let norm = |n: &Point<S>| dot(n, n).to_f64().sqrt();
    let Some(first) = normals.first() else {
        return false;
    };
    let exact = S::MODE == Mode::Rational;
    let Some(second) = normals.iter().find(|n| {
        let c = cross(first, n);
        if exact {
            dot(&c, &c).sign(0.0) == Ordering::Greater
        } else {
            norm(&c) > 1e-9 * norm(first) * norm(n)
        }
    }) else {
        return false;
    };
    normals.iter().any(|n| {
        let d = det3(first, second, n);
        if exact {
            d.sign(0.0) != Ordering::Equal
        } else {
            d.to_f64().abs() > 1e-9 * norm(first) * norm(second) * norm(n)
        }
    })
}
