//! Admissible sets and the region calculus used to bound the objective.
//!
//! An admissible set is a family of ten numbers `a_ij` (`1 <= i < j <= 5`)
//! bounded by 1 in absolute value and satisfying the five quadratic
//! relations that hold for `a_ij = det(u_i, u_j, u_6)`. Equivalently,
//! `a_ij = p_i × p_j` for five points `p_i` of the plane.

use std::collections::BTreeMap;
use std::ops::Deref;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::geom::{Mat3, Vec3};

/// Pairs `(i, j)` in storage order.
pub const PAIRS: [(usize, usize); 10] =
    [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)];

/// Default absolute tolerance for the determinant relations.
pub const RELATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdmissibleError {
    #[error("InvariantError: {0}")]
    Invariant(String),
    #[error("InfeasibleMagnitudes: |a14| + |a15| = {0} < 1")]
    InfeasibleMagnitudes(f64),
    #[error("NoSignAssignment: no sign pattern satisfies the relations for ({0}, {1})")]
    NoSignAssignment(f64, f64),
    #[error("SingularPoint: xy = 1")]
    SingularPoint,
    #[error("RelationViolation: max residual {0:e}")]
    RelationViolation(f64),
    #[error("Parse: {0}")]
    Parse(String),
}

/// Storage slot of the pair `{i, j}`, `i != j`, both in `1..=5`.
pub fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    assert!(1 <= i && j <= 5 && i != j, "pair ({i}, {j}) out of range");
    PAIRS.iter().position(|&p| p == (i, j)).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmissibleSet {
    a: [f64; 10],
}

impl AdmissibleSet {
    /// Wraps raw values without checking anything.
    pub fn from_values(a: [f64; 10]) -> Self {
        AdmissibleSet { a }
    }

    /// Checks `|a_ij| <= 1 + tol` and the relations at `tol`.
    pub fn try_new(a: [f64; 10], tol: f64) -> Result<Self, AdmissibleError> {
        let s = AdmissibleSet { a };
        if s.max_abs() > 1.0 + tol {
            return Err(AdmissibleError::Invariant(format!("entry of magnitude {} exceeds 1", s.max_abs())));
        }
        let r = s.max_residual();
        if r > tol {
            return Err(AdmissibleError::RelationViolation(r));
        }
        Ok(s)
    }

    pub fn zeros() -> Self {
        AdmissibleSet { a: [0.0; 10] }
    }

    pub fn values(&self) -> &[f64; 10] {
        &self.a
    }

    /// `a_ij` with `a_ji = -a_ij` and `a_ii = 0`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.a[pair_index(i, j)],
            std::cmp::Ordering::Greater => -self.a[pair_index(i, j)],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = pair_index(i, j);
        self.a[k] = if i < j { v } else { -v };
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        AdmissibleSet { a: self.a.map(|v| v * s) }
    }

    /// Set with `b_ij = a_{σ(i) σ(j)}`, where `perm[i-1] = σ(i)`.
    pub fn permuted(&self, perm: [usize; 5]) -> Self {
        let mut b = [0.0; 10];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            b[k] = self.get(perm[i - 1], perm[j - 1]);
        }
        AdmissibleSet { a: b }
    }

    /// Residuals of the five relations, each `lhs - rhs`.
    pub fn relation_residuals(&self) -> [f64; 5] {
        let a = |i, j| self.get(i, j);
        [
            a(1, 3) * a(2, 4) - a(1, 4) * a(2, 3) - a(1, 2) * a(3, 4),
            a(1, 3) * a(2, 5) - a(1, 5) * a(2, 3) - a(1, 2) * a(3, 5),
            a(1, 4) * a(2, 5) - a(1, 5) * a(2, 4) - a(1, 2) * a(4, 5),
            a(1, 4) * a(3, 5) - a(1, 5) * a(3, 4) - a(1, 3) * a(4, 5),
            a(2, 4) * a(3, 5) - a(2, 5) * a(3, 4) - a(2, 3) * a(4, 5),
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.relation_residuals().iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn to_doc(&self) -> AdmissibleDoc {
        AdmissibleDoc {
            a: PAIRS.iter().zip(&self.a).map(|(&(i, j), &v)| (format!("{i}{j}"), v)).collect(),
        }
    }

    pub fn from_doc(doc: &AdmissibleDoc) -> Result<Self, AdmissibleError> {
        let mut a = [0.0; 10];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            a[k] = *doc
                .a
                .get(&format!("{i}{j}"))
                .ok_or_else(|| AdmissibleError::Parse(format!("missing key \"{i}{j}\"")))?;
        }
        if doc.a.len() != 10 {
            return Err(AdmissibleError::Parse("expected exactly ten entries".into()));
        }
        Ok(AdmissibleSet { a })
    }
}

/// `{"a": {"12": v, ..., "45": v}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AdmissibleDoc {
    pub a: BTreeMap<String, f64>,
}

/// Six nonnegative weights summing to 3 with the largest one last.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaVector([f64; 6]);

impl LambdaVector {
    pub fn try_new(l: [f64; 6]) -> Result<Self, AdmissibleError> {
        if l.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(AdmissibleError::Invariant("weights must be finite and nonnegative".into()));
        }
        let sum: f64 = l.iter().sum();
        if (sum - 3.0).abs() > 1e-9 {
            return Err(AdmissibleError::Invariant(format!("weights sum to {sum}, expected 3")));
        }
        if l[..5].iter().any(|&v| v > l[5]) {
            return Err(AdmissibleError::Invariant("λ6 must be the largest weight".into()));
        }
        Ok(LambdaVector(l))
    }

    /// Rescales to sum 3 and swaps the largest weight into position 6.
    pub fn normalized(mut l: [f64; 6]) -> Result<Self, AdmissibleError> {
        let sum: f64 = l.iter().sum();
        if !(sum > 0.0) {
            return Err(AdmissibleError::Invariant("weights must have positive sum".into()));
        }
        for v in l.iter_mut() {
            *v *= 3.0 / sum;
        }
        let jmax = (0..6).rev().max_by(|&i, &j| l[i].total_cmp(&l[j])).unwrap();
        l.swap(jmax, 5);
        Self::try_new(l)
    }

    pub fn uniform() -> Self {
        LambdaVector([0.5; 6])
    }

    /// Uniform sample from the simplex `{Σλ = 3, λ >= 0}` (sorted uniforms
    /// on `[0, 3]`), with the largest coordinate moved to position 6.
    pub fn sample<R: Rng>(rng: &mut R) -> Self {
        let mut cuts = [0.0; 5];
        for c in cuts.iter_mut() {
            *c = rng.gen_range(0.0..3.0);
        }
        cuts.sort_by(f64::total_cmp);
        let mut l = [0.0; 6];
        let mut prev = 0.0;
        for k in 0..5 {
            l[k] = cuts[k] - prev;
            prev = cuts[k];
        }
        l[5] = 3.0 - prev;
        Self::from_gaps(l)
    }

    /// Like [`LambdaVector::sample`] but with `λ1 = 0`.
    pub fn sample_zero_first<R: Rng>(rng: &mut R) -> Self {
        let mut cuts = [0.0; 4];
        for c in cuts.iter_mut() {
            *c = rng.gen_range(0.0..3.0);
        }
        cuts.sort_by(f64::total_cmp);
        let mut l = [0.0; 6];
        let mut prev = 0.0;
        for k in 0..4 {
            l[k + 1] = cuts[k] - prev;
            prev = cuts[k];
        }
        l[5] = 3.0 - prev;
        Self::from_gaps(l)
    }

    fn from_gaps(mut l: [f64; 6]) -> Self {
        let jmax = (0..6).rev().max_by(|&i, &j| l[i].total_cmp(&l[j])).unwrap();
        l.swap(jmax, 5);
        // Gaps telescope to 3 up to rounding; absorb the error into λ6.
        let s: f64 = l[..5].iter().sum();
        l[5] = 3.0 - s;
        LambdaVector(l)
    }

    pub fn as_array(&self) -> &[f64; 6] {
        &self.0
    }
}

impl Deref for LambdaVector {
    type Target = [f64; 6];
    fn deref(&self) -> &[f64; 6] {
        &self.0
    }
}

/// `a_ij = det(u_i, u_j, u_6)`.
pub fn from_contact_vectors(u: &[Vec3; 6]) -> AdmissibleSet {
    let mut a = [0.0; 10];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        a[k] = Mat3::from_columns(&[u[i - 1], u[j - 1], u[5]]).determinant();
    }
    AdmissibleSet { a }
}

pub fn check_relations(a: &AdmissibleSet, tol: f64) -> bool {
    a.relation_residuals().iter().all(|r| r.abs() <= tol)
}

/// `Σ_{i<j<=5} λ_i λ_j a_ij²`.
pub fn objective(a: &AdmissibleSet, lambda: &[f64; 6]) -> f64 {
    PAIRS
        .iter()
        .zip(a.values())
        .map(|(&(i, j), v)| lambda[i - 1] * lambda[j - 1] * v * v)
        .sum()
}

/// Same sum as [`objective`]; equals 1 when `a` and `lambda` come from a John
/// decomposition.
pub fn parseval_sum(a: &AdmissibleSet, lambda: &[f64; 6]) -> f64 {
    objective(a, lambda)
}

/// Magnitudes `(|a23|, |a25|, |a34|)` of a peculiar set.
pub fn peculiar_magnitudes(x: f64, y: f64) -> (f64, f64, f64) {
    ((x + y - 1.0) / (x * y), (1.0 - y) / x, (1.0 - x) / y)
}

/// Peculiar set with `|a14| = x`, `|a15| = y`, `|a12| = |a13| = |a24| =
/// |a35| = |a45| = 1` and the remaining magnitudes forced by the relations.
/// Signs are found by search with `a12 = a13 = 1`, starting from pattern
/// `sign_seed mod 256`.
pub fn peculiar_from(x: f64, y: f64, sign_seed: u64) -> Result<AdmissibleSet, AdmissibleError> {
    if !(x > 0.0 && x <= 1.0 && y > 0.0 && y <= 1.0) {
        return Err(AdmissibleError::Invariant("magnitudes must lie in (0, 1]".into()));
    }
    if x + y < 1.0 - 1e-12 {
        return Err(AdmissibleError::InfeasibleMagnitudes(x + y));
    }
    let (a23, a25, a34) = peculiar_magnitudes(x, y);
    let a23 = a23.max(0.0);
    // Storage order: 12 13 14 15 23 24 25 34 35 45.
    let mags = [1.0, 1.0, x, y, a23, 1.0, a25, a34, 1.0, 1.0];
    let start = (sign_seed % 256) as u32;
    for step in 0..256u32 {
        let mask = (start + step) % 256;
        let mut a = mags;
        for (bit, slot) in (2..10).enumerate() {
            if mask >> bit & 1 == 1 {
                a[slot] = -a[slot];
            }
        }
        let s = AdmissibleSet { a };
        if check_relations(&s, RELATION_TOL) {
            return Ok(s);
        }
    }
    Err(AdmissibleError::NoSignAssignment(x, y))
}

/// Membership in Ω with every inequality relaxed by `slack`.
pub fn omega_contains_within(x: f64, y: f64, slack: f64) -> bool {
    let xy = x * y;
    x >= 0.5 - slack
        && y >= 0.5 - slack
        && xy <= 0.5 + slack
        && 2.0 * y - xy <= 1.0 + slack
        && 2.0 * x - xy <= 1.0 + slack
}

/// `Ω = {x >= ½, y >= ½, xy <= ½, 2y − xy <= 1, 2x − xy <= 1}` (closed).
pub fn omega_contains(x: f64, y: f64) -> bool {
    omega_contains_within(x, y, 0.0)
}

/// `g(x, y) = ((1 − x)/(1 − xy), 1 − xy)`; maps Ω into itself.
pub fn g_map(x: f64, y: f64) -> Result<(f64, f64), AdmissibleError> {
    let d = 1.0 - x * y;
    if d == 0.0 {
        return Err(AdmissibleError::SingularPoint);
    }
    Ok(((1.0 - x) / d, d))
}

pub fn five_square_max(x: f64, y: f64) -> f64 {
    let d = 1.0 - x * y;
    [x * x, y * y, d * d, ((1.0 - x) / d).powi(2), ((1.0 - y) / d).powi(2)]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn f_eval(x: f64, y: f64, l: &[f64; 6]) -> Result<f64, AdmissibleError> {
    let d = x * y - 1.0;
    if d == 0.0 {
        return Err(AdmissibleError::SingularPoint);
    }
    Ok(l[0] * l[4] * ((y - 1.0) / d).powi(2)
        + l[0] * l[3] * ((x - 1.0) / d).powi(2)
        + l[1] * l[2] * (1.0 - x * y).powi(2)
        + l[1] * l[4] * y * y
        + l[2] * l[3] * x * x)
}

/// `λ1λ2 + λ1λ3 + λ2λ4 + λ3λ5 + λ4λ5 + f(x, y)`; at most 2.
pub fn f_combined(x: f64, y: f64, l: &[f64; 6]) -> Result<f64, AdmissibleError> {
    let base = l[0] * l[1] + l[0] * l[2] + l[1] * l[3] + l[2] * l[4] + l[3] * l[4];
    Ok(base + f_eval(x, y, l)?)
}

/// Outcome of the Ω Monte Carlo check.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OmegaReport {
    pub samples: usize,
    pub in_omega: usize,
    /// Points of Ω whose image under `g` left Ω (beyond rounding slack).
    pub g_violations: Vec<[f64; 2]>,
    pub max_five_square: f64,
    pub argmax: [f64; 2],
}

/// Rounding slack for checking `g(Ω) ⊆ Ω` in floating point.
pub const OMEGA_IMAGE_SLACK: f64 = 1e-12;

/// Draws `samples` points uniformly from `[½, 1]²` (which contains Ω), and
/// for those in Ω checks the image under `g` and the five-square bound.
pub fn omega_monte_carlo(samples: usize, seed: u64) -> OmegaReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OmegaReport {
        samples,
        in_omega: 0,
        g_violations: Vec::new(),
        max_five_square: f64::NEG_INFINITY,
        argmax: [f64::NAN; 2],
    };
    for _ in 0..samples {
        let x = rng.gen_range(0.5..=1.0);
        let y = rng.gen_range(0.5..=1.0);
        if !omega_contains(x, y) {
            continue;
        }
        report.in_omega += 1;
        let (gx, gy) = g_map(x, y).expect("xy <= 1/2 inside Ω");
        if !omega_contains_within(gx, gy, OMEGA_IMAGE_SLACK) {
            report.g_violations.push([x, y]);
        }
        let v = five_square_max(x, y);
        if v > report.max_five_square {
            report.max_five_square = v;
            report.argmax = [x, y];
        }
    }
    report
}

/// Outcome of the peculiar-set sweep.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PeculiarReport {
    pub pairs: usize,
    pub lambdas_per_pair: usize,
    pub relation_failures: usize,
    pub max_objective: f64,
    pub argmax_magnitudes: [f64; 2],
    pub argmax_lambda: [f64; 6],
    pub max_f_combined: f64,
}

/// Samples feasible magnitude pairs `(x, y)` with `x + y >= 1`, builds the
/// peculiar set, and evaluates the objective against random weights. Also
/// evaluates the combined `f` bound on a `0.01` grid of `[0, 1]²` for the
/// same weights used with the first pair.
pub fn peculiar_sweep(pairs: usize, lambdas_per_pair: usize, seed: u64) -> PeculiarReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PeculiarReport {
        pairs,
        lambdas_per_pair,
        relation_failures: 0,
        max_objective: f64::NEG_INFINITY,
        argmax_magnitudes: [f64::NAN; 2],
        argmax_lambda: [f64::NAN; 6],
        max_f_combined: f64::NEG_INFINITY,
    };
    let mut grid_lambdas = Vec::new();
    for p in 0..pairs {
        let (x, y) = loop {
            let x: f64 = 1.0 - rng.gen_range(0.0..1.0);
            let y: f64 = 1.0 - rng.gen_range(0.0..1.0);
            if x + y >= 1.0 {
                break (x, y);
            }
        };
        let set = match peculiar_from(x, y, rng.gen()) {
            Ok(s) => s,
            Err(_) => {
                report.relation_failures += 1;
                continue;
            }
        };
        if !check_relations(&set, RELATION_TOL) || set.max_abs() > 1.0 + 1e-12 {
            report.relation_failures += 1;
        }
        for _ in 0..lambdas_per_pair {
            let l = LambdaVector::sample(&mut rng);
            let v = objective(&set, &l);
            if v > report.max_objective {
                report.max_objective = v;
                report.argmax_magnitudes = [x, y];
                report.argmax_lambda = *l;
            }
            if p == 0 && grid_lambdas.len() < 16 {
                grid_lambdas.push(l);
            }
        }
    }
    grid_lambdas.push(LambdaVector::uniform());
    for l in &grid_lambdas {
        for i in 0..=100 {
            for j in 0..=100 {
                let (x, y) = (i as f64 / 100.0, j as f64 / 100.0);
                if let Ok(v) = f_combined(x, y, l) {
                    report.max_f_combined = report.max_f_combined.max(v);
                }
            }
        }
    }
    report
}
