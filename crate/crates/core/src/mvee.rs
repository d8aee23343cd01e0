//! Minimal-volume enclosing ellipsoid of an origin-symmetric point set.
//!
//! For a symmetric set the optimal ellipsoid is centred at the origin, so the
//! problem is the D-optimal design problem: find weights `w` on the points
//! maximizing `log det(sum w_i s_i s_iᵀ)`. The shape matrix of the ellipsoid
//! is then `(3 sum w_i s_i s_iᵀ)⁻¹`. We run Khachiyan's barycentric ascent
//! with Todd–Yildirim away steps, which converges linearly near the optimum.

use nalgebra::SymmetricEigen;

use crate::geom::{lex_cmp, Mat3, Vec3};

const DIM: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MveeError {
    #[error("NotFullDimensional: points do not span R^3")]
    NotFullDimensional,
    #[error("NoConvergence: {iterations} iterations, remaining gap {gap:e}")]
    NoConvergence { iterations: usize, gap: f64 },
    #[error("TooFewContacts: contact directions span only {rank} dimensions")]
    TooFewContacts { rank: usize },
    #[error("InvalidShape: {0}")]
    InvalidShape(String),
}

/// Origin-centred ellipsoid `{x : xᵀ M x <= 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    m: Mat3,
}

impl Ellipsoid {
    /// Validates symmetry (to 1e-12 relative) and positive definiteness.
    pub fn new(m: Mat3) -> Result<Self, MveeError> {
        let scale = m.abs().max().max(f64::MIN_POSITIVE);
        if (m - m.transpose()).abs().max() > 1e-12 * scale {
            return Err(MveeError::InvalidShape("shape matrix is not symmetric".into()));
        }
        let m = (m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(m);
        if eig.eigenvalues.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
            return Err(MveeError::InvalidShape("shape matrix is not positive definite".into()));
        }
        Ok(Ellipsoid { m })
    }

    pub fn shape(&self) -> &Mat3 {
        &self.m
    }

    /// `xᵀ M x`; at most 1 exactly on the ellipsoid.
    pub fn gauge_squared(&self, x: &Vec3) -> f64 {
        x.dot(&(self.m * x))
    }

    pub fn row_major(&self) -> [f64; 9] {
        let m = &self.m;
        [m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(1, 0)], m[(1, 1)], m[(1, 2)], m[(2, 0)], m[(2, 1)], m[(2, 2)]]
    }
}

/// Solver output with the diagnostics needed by tests and reports.
#[derive(Clone, Debug)]
pub struct MveeSolution {
    pub ellipsoid: Ellipsoid,
    /// One representative per antipodal pair, canonical sign.
    pub representatives: Vec<Vec3>,
    /// Final design weights on `representatives`.
    pub weights: Vec<f64>,
    pub iterations: usize,
    /// `max_i s_iᵀ Σ⁻¹ s_i / 3 - 1` at exit.
    pub gap: f64,
    /// `log det M` of the best containing ellipsoid seen after each iteration.
    pub log_det_history: Vec<f64>,
}

/// Canonical representative of `{s, -s}`: the one whose first nonzero
/// coordinate is positive. Signed zeros are normalized to `+0`.
pub fn canonical_sign(s: &Vec3) -> Vec3 {
    let flip = s.iter().find(|&&c| c != 0.0).is_some_and(|&c| c < 0.0);
    let v = if flip { -s } else { *s };
    v.map(|c| c + 0.0)
}

fn representatives(points: &[Vec3]) -> Vec<Vec3> {
    let mut reps: Vec<Vec3> = points
        .iter()
        .filter(|s| s.norm_squared() > 0.0)
        .map(canonical_sign)
        .collect();
    reps.sort_by(lex_cmp);
    reps.dedup();
    reps
}

pub fn default_iteration_cap(m: usize, tol: f64) -> usize {
    (100.0 * m.max(1) as f64 * (1.0 / tol).ln().max(1.0)).ceil() as usize
}

/// Shape matrix of the minimal-volume origin-centred ellipsoid containing
/// `points` (assumed origin-symmetric; only `±s` pairs matter).
pub fn mvee_centered(points: &[Vec3], tol: f64) -> Result<Ellipsoid, MveeError> {
    mvee_centered_detailed(points, tol, None).map(|s| s.ellipsoid)
}

pub fn mvee_centered_detailed(
    points: &[Vec3],
    tol: f64,
    max_iterations: Option<usize>,
) -> Result<MveeSolution, MveeError> {
    let reps = representatives(points);
    let n = reps.len();
    if n < 3 {
        return Err(MveeError::NotFullDimensional);
    }
    // Contacts are later read off with tolerance `tol`, so the design itself
    // is solved a few orders of magnitude tighter.
    let inner_tol = (tol * 1e-3).max(1e-13);
    let cap = max_iterations.unwrap_or_else(|| default_iteration_cap(n, inner_tol));
    let outer: Vec<Mat3> = reps.iter().map(|s| s * s.transpose()).collect();

    let mut w = vec![1.0 / n as f64; n];
    let mut kappa = vec![0.0; n];
    let mut best: Option<(f64, Mat3)> = None;
    let mut history = Vec::new();
    let mut iterations = 0;

    loop {
        let sigma: Mat3 = outer.iter().zip(&w).map(|(o, &wi)| o * wi).sum();
        let inv = match sigma.cholesky() {
            Some(c) => c.inverse(),
            None => return Err(MveeError::NotFullDimensional),
        };
        if iterations == 0 {
            let eig = SymmetricEigen::new(sigma).eigenvalues;
            if eig.min() <= 1e-14 * eig.max() {
                return Err(MveeError::NotFullDimensional);
            }
        }
        let inv = (inv + inv.transpose()) * 0.5;
        for (k, s) in kappa.iter_mut().zip(&reps) {
            *k = s.dot(&(inv * s));
        }
        let (jp, kp) = argmax(&kappa, |_| true);
        let (jm, km) = argmin(&kappa, |i| w[i] > 0.0);
        let gap_plus = kp / DIM - 1.0;
        let gap_minus = 1.0 - km / DIM;

        // Scaling Σ⁻¹ by 1/κ_max gives an ellipsoid that contains every point.
        let feasible = inv / kp;
        let log_det = feasible.determinant().ln();
        match &best {
            Some((b, _)) if *b >= log_det => {}
            _ => best = Some((log_det, feasible)),
        }
        history.push(best.as_ref().map(|b| b.0).unwrap_or(log_det));

        if gap_plus <= inner_tol && gap_minus <= inner_tol {
            let (_, m) = best.expect("at least one iterate");
            return Ok(MveeSolution {
                ellipsoid: Ellipsoid::new((m + m.transpose()) * 0.5)?,
                representatives: reps,
                weights: w,
                iterations,
                gap: gap_plus,
                log_det_history: history,
            });
        }
        if iterations >= cap {
            return Err(MveeError::NoConvergence { iterations, gap: gap_plus.max(gap_minus) });
        }
        iterations += 1;

        if gap_plus >= gap_minus {
            let beta = (kp - DIM) / (DIM * (kp - 1.0));
            for wi in w.iter_mut() {
                *wi *= 1.0 - beta;
            }
            w[jp] += beta;
        } else {
            let wj = w[jm];
            let drop = -wj / (1.0 - wj);
            let beta = if km <= 1.0 { drop } else { ((km - DIM) / (DIM * (km - 1.0))).max(drop) };
            for wi in w.iter_mut() {
                *wi *= 1.0 - beta;
            }
            w[jm] += beta;
            if beta <= drop {
                w[jm] = 0.0;
            }
        }
    }
}

fn argmax(v: &[f64], allowed: impl Fn(usize) -> bool) -> (usize, f64) {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for (i, &x) in v.iter().enumerate() {
        if allowed(i) && x > best.1 {
            best = (i, x);
        }
    }
    best
}

fn argmin(v: &[f64], allowed: impl Fn(usize) -> bool) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (i, &x) in v.iter().enumerate() {
        if allowed(i) && x < best.1 {
            best = (i, x);
        }
    }
    best
}

/// Points of `points` on the boundary of `e` (`sᵀ M s >= 1 - tol`), one per
/// antipodal pair with the lexicographically larger sign.
pub fn contact_points(e: &Ellipsoid, points: &[Vec3], tol: f64) -> Result<Vec<Vec3>, MveeError> {
    let contacts: Vec<Vec3> = representatives(points)
        .into_iter()
        .filter(|s| e.gauge_squared(s) >= 1.0 - tol)
        .collect();
    let rank = direction_rank(&contacts);
    if rank < 3 {
        return Err(MveeError::TooFewContacts { rank });
    }
    Ok(contacts)
}

pub(crate) fn direction_rank(dirs: &[Vec3]) -> usize {
    if dirs.is_empty() {
        return 0;
    }
    let g: Mat3 = dirs.iter().map(|d| {
        let u = d / d.norm();
        u * u.transpose()
    })
    .sum();
    let eig = SymmetricEigen::new(g).eigenvalues;
    let top = eig.max();
    eig.iter().filter(|&&l| l > 1e-9 * top).count()
}
