//! Lattice width, non-separability and the volume bound `Vol(K) >= ω(K)³/12`.
//!
//! The width `ω(K)` is the minimum over nonzero integer directions `u` of
//! `max_K ⟨u, x⟩ − min_K ⟨u, x⟩`. Candidate directions are enumerated
//! inside an ellipsoid derived from the minimal enclosing ellipsoid `E` of
//! `K − K`: since `E/√3 ⊆ K − K`, the width in direction `u` is at least
//! `√(uᵀ M⁻¹ u / 3)`, so only directions with `uᵀ M⁻¹ u <= 3 W²` can beat a
//! known width `W`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::geom::coord::format_rational;
use crate::geom::{difference_body, Coord, GeomError, Mat3, Mode, Polytope, Vec3};
use crate::john::{transform_to_ball, JohnError};
use crate::mvee::{mvee_centered, MveeError};

/// Relative slack on the enumeration ellipsoid, covering the accuracy of
/// the floating-point ellipsoid.
const SEARCH_MARGIN: f64 = 1.01;
const CHUNK: usize = 64;
/// The search only needs the ellipsoid to within `SEARCH_MARGIN`.
const ELLIPSOID_TOL: f64 = 1e-7;
/// Float-mode comparisons of `ω` against 1 closer than this are refused.
pub const KNIFE_EDGE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("ZeroDirection: lattice directions must be nonzero")]
    ZeroDirection,
    #[error("SingularLattice: basis determinant is zero")]
    SingularLattice,
    #[error("KnifeEdge: width {0} is within {KNIFE_EDGE:e} of 1; use rational mode")]
    KnifeEdge(f64),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Mvee(#[from] MveeError),
    #[error(transparent)]
    John(#[from] JohnError),
}

/// Primitive integer vector with first nonzero component positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeDirection([i64; 3]);

impl LatticeDirection {
    /// Divides by the gcd and fixes the sign.
    pub fn new(v: [i64; 3]) -> Result<Self, LatticeError> {
        let g = v.iter().fold(0i64, |g, &c| g.gcd(&c));
        if g == 0 {
            return Err(LatticeError::ZeroDirection);
        }
        let mut u = v.map(|c| c / g);
        if u.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
            u = u.map(|c| -c);
        }
        Ok(LatticeDirection(u))
    }

    pub fn components(&self) -> [i64; 3] {
        self.0
    }

    fn l1(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }
}

/// `B Z³` for a nonsingular rational matrix `B` (rows given row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeBasis {
    b: [[BigRational; 3]; 3],
    det: BigRational,
}

impl LatticeBasis {
    pub fn try_new(b: [[BigRational; 3]; 3]) -> Result<Self, LatticeError> {
        let det = det3(&b);
        if det.is_zero() {
            return Err(LatticeError::SingularLattice);
        }
        Ok(LatticeBasis { b, det })
    }

    pub fn identity() -> Self {
        let one = || BigRational::from_integer(BigInt::from(1));
        let zero = || <BigRational as Zero>::zero();
        Self::try_new([[one(), zero(), zero()], [zero(), one(), zero()], [zero(), zero(), one()]]).unwrap()
    }

    pub fn scaled_identity(s: i64) -> Result<Self, LatticeError> {
        let d = || BigRational::from_integer(BigInt::from(s));
        let zero = || <BigRational as Zero>::zero();
        Self::try_new([[d(), zero(), zero()], [zero(), d(), zero()], [zero(), zero(), d()]])
    }

    pub fn matrix(&self) -> &[[BigRational; 3]; 3] {
        &self.b
    }

    /// Lattice determinant `d(Λ) = |det B|`.
    pub fn determinant(&self) -> BigRational {
        Signed::abs(&self.det)
    }
}

fn det3(b: &[[BigRational; 3]; 3]) -> BigRational {
    &b[0][0] * (&b[1][1] * &b[2][2] - &b[1][2] * &b[2][1]) - &b[0][1] * (&b[1][0] * &b[2][2] - &b[1][2] * &b[2][0])
        + &b[0][2] * (&b[1][0] * &b[2][1] - &b[1][1] * &b[2][0])
}

fn dot<S: Coord>(x: &[S; 3], u: &LatticeDirection) -> S {
    let u = u.0;
    S::from_i64(u[0]).mul(&x[0]).add(&S::from_i64(u[1]).mul(&x[1])).add(&S::from_i64(u[2]).mul(&x[2]))
}

/// `max_K ⟨u, x⟩`.
pub fn support<S: Coord>(p: &Polytope<S>, u: &LatticeDirection) -> S {
    let mut it = p.vertices().iter().map(|v| dot(v, u));
    let first = it.next().expect("polytope has vertices");
    it.fold(first, |m, d| if d > m { d } else { m })
}

/// `max_K ⟨u, x⟩ − min_K ⟨u, x⟩`.
pub fn width_in_direction<S: Coord>(p: &Polytope<S>, u: &LatticeDirection) -> S {
    let mut it = p.vertices().iter().map(|v| dot(v, u));
    let first = it.next().expect("polytope has vertices");
    let (lo, hi) = it.fold((first.clone(), first), |(lo, hi), d| {
        if d < lo {
            (d, hi)
        } else if d > hi {
            (lo, d)
        } else {
            (lo, hi)
        }
    });
    hi.sub(&lo)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WidthSearch<S: Coord> {
    pub omega: S,
    pub direction: LatticeDirection,
    /// Directions whose width was evaluated exactly.
    pub evaluated: usize,
    /// Half-widths of the integer box that was enumerated.
    pub box_radius: [i64; 3],
}

/// Orders candidates: smaller width, then smaller L1 norm, then
/// lexicographically larger direction.
fn better<S: Coord>(a: (&S, &LatticeDirection), b: (&S, &LatticeDirection)) -> bool {
    match a.0.partial_cmp(b.0) {
        Some(Ordering::Less) => true,
        Some(Ordering::Greater) => false,
        _ => match a.1.l1().cmp(&b.1.l1()) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => a.1 .0 > b.1 .0,
        },
    }
}

/// Exact lattice width and a minimizing direction.
pub fn lattice_width<S: Coord>(p: &Polytope<S>) -> Result<WidthSearch<S>, LatticeError> {
    let axes = [[1, 0, 0], [0, 1, 0], [0, 0, 1]].map(|v| LatticeDirection::new(v).unwrap());
    let mut best_dir = axes[0];
    let mut best = width_in_direction(p, &best_dir);
    for u in &axes[1..] {
        let w = width_in_direction(p, u);
        if better((&w, u), (&best, &best_dir)) {
            best = w;
            best_dir = *u;
        }
    }
    let w0 = best.to_f64();

    let pts = difference_body(&p.to_float()).vertex_vectors();
    let e = mvee_centered(&pts, ELLIPSOID_TOL)?;
    let m = *e.shape();
    let g = m.try_inverse().ok_or(LatticeError::Mvee(MveeError::NotFullDimensional))?;
    let r2 = 3.0 * w0 * w0 * SEARCH_MARGIN;
    let radius: [i64; 3] = std::array::from_fn(|k| (r2 * m[(k, k)]).sqrt().floor() as i64);

    let mut candidates: Vec<(f64, LatticeDirection)> = Vec::new();
    for x in 0..=radius[0] {
        for y in -radius[1]..=radius[1] {
            for z in -radius[2]..=radius[2] {
                let v = [x, y, z];
                if v == [0, 0, 0] || v.iter().fold(0i64, |g, &c| g.gcd(&c)) != 1 {
                    continue;
                }
                let d = LatticeDirection::new(v).unwrap();
                if d.0 != v {
                    continue;
                }
                let f = Vec3::new(x as f64, y as f64, z as f64);
                let q = f.dot(&(g * f));
                if q <= r2 {
                    candidates.push(((q / 3.0).sqrt(), d));
                }
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1 .0.cmp(&a.1 .0)));

    // Chunks are evaluated in parallel; the bound is tightened between chunks.
    let mut evaluated = 0;
    for chunk in candidates.chunks(CHUNK) {
        let bound = best.to_f64() * (1.0 + 1e-6) + 1e-12;
        let live: Vec<LatticeDirection> = chunk.iter().take_while(|(lb, _)| *lb <= bound).map(|c| c.1).collect();
        if live.is_empty() {
            break;
        }
        evaluated += live.len();
        let winner = live
            .par_iter()
            .map(|u| (width_in_direction(p, u), *u))
            .reduce_with(|a, b| if better((&b.0, &b.1), (&a.0, &a.1)) { b } else { a });
        if let Some((w, u)) = winner {
            if better((&w, &u), (&best, &best_dir)) {
                best = w;
                best_dir = u;
            }
        }
        if live.len() < chunk.len() {
            break;
        }
    }
    assert!(
        best_dir.0.iter().zip(&radius).all(|(c, r)| c.abs() <= *r.max(&1)),
        "width minimizer {:?} outside the search box {radius:?}",
        best_dir.0
    );
    Ok(WidthSearch { omega: best, direction: best_dir, evaluated, box_radius: radius })
}

/// `ω(K) >= 1`: the translates `Z³ + K` meet every affine plane.
pub fn is_nonseparable_unit_lattice<S: Coord>(p: &Polytope<S>) -> Result<bool, LatticeError> {
    let omega = lattice_width(p)?.omega;
    nonseparable_from_width(&omega)
}

fn nonseparable_from_width<S: Coord>(omega: &S) -> Result<bool, LatticeError> {
    match S::MODE {
        Mode::Rational => Ok(omega.sub(&S::from_i64(1)).sign(0.0) != Ordering::Less),
        Mode::Float => {
            let w = omega.to_f64();
            if (w - 1.0).abs() < KNIFE_EDGE {
                Err(LatticeError::KnifeEdge(w))
            } else {
                Ok(w >= 1.0)
            }
        }
    }
}

/// `Vol(K) / d(Λ)`.
pub fn density<S: Coord>(p: &Polytope<S>, b: &LatticeBasis) -> S {
    S::from_rational(&(p.volume().to_rational() / b.determinant()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WidthReport<S: Coord> {
    pub omega: S,
    pub direction: LatticeDirection,
    pub volume: S,
    /// `ω³ / 12`.
    pub bound: S,
    /// `Vol − ω³/12`.
    pub slack: S,
    pub satisfied: bool,
    /// `None` when float mode refuses to decide.
    pub nonseparable: Option<bool>,
}

impl<S: Coord> WidthReport<S> {
    pub fn to_json(&self) -> Value {
        let num = |s: &S| match S::MODE {
            Mode::Rational => Value::String(format_rational(&s.to_rational())),
            Mode::Float => json!(s.to_f64()),
        };
        json!({
            "omega": num(&self.omega),
            "direction": self.direction.components(),
            "volume": num(&self.volume),
            "bound": num(&self.bound),
            "slack": num(&self.slack),
            "satisfied": self.satisfied,
            "nonseparable": self.nonseparable,
        })
    }
}

/// Computes both sides of `Vol(K) >= ω(K)³/12`. Exact in rational mode;
/// in float mode the comparison allows `1e-9`.
pub fn verify_width_volume_corollary<S: Coord>(p: &Polytope<S>) -> Result<WidthReport<S>, LatticeError> {
    let search = lattice_width(p)?;
    let omega = search.omega;
    let volume = p.volume();
    let bound = omega.mul(&omega).mul(&omega).div_int(12);
    let slack = volume.sub(&bound);
    let satisfied = match S::MODE {
        Mode::Rational => slack.sign(0.0) != Ordering::Less,
        Mode::Float => slack.to_f64() >= -1e-9,
    };
    let nonseparable = nonseparable_from_width(&omega).ok();
    Ok(WidthReport { omega, direction: search.direction, volume, bound, slack, satisfied, nonseparable })
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ChainReport {
    /// `Vol(K) / d(Z³)`.
    pub density: f64,
    /// `(√2/12) Diam(TK)³ / |det T|`.
    pub middle: f64,
    pub lower: f64,
    pub holds: bool,
}

/// Reproduces `Vol(K) >= (√2/12) Diam(TK)³ / |det T| >= 1/12` for the
/// normalizing map `T` of `K` and the lattice `Z³`.
pub fn chain_check<S: Coord>(p: &Polytope<S>, tol: f64) -> Result<ChainReport, LatticeError> {
    let fp = p.to_float();
    let pts = difference_body(&fp).vertex_vectors();
    let e = mvee_centered(&pts, ELLIPSOID_TOL)?;
    let t: Mat3 = transform_to_ball(&e);
    let diam = fp.transformed(&t).diameter();
    let middle = std::f64::consts::SQRT_2 / 12.0 * diam.powi(3) / t.determinant().abs();
    let density = fp.volume();
    let lower = 1.0 / 12.0;
    Ok(ChainReport { density, middle, lower, holds: density >= middle - tol && middle >= lower - tol })
}
