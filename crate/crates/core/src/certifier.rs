//! Numerical certification of the ceiling `Σ λ_i λ_j a_ij² <= 2` over
//! admissible sets.
//!
//! Admissible sets are parametrized by charts. With `p = a12 != 0`, the
//! entries `u = (a13, a14, a15)` and `v = (a23, a24, a25)` are free and
//! `(a34, a35, a45) = [u; v] / p`. With `a12 = 0` and `p = a13 != 0`, the
//! entries `a14, a15, a23, a34, a35` are free and `a24 = a14 a23 / p`,
//! `a25 = a15 a23 / p`, `a45 = (a14 a35 − a15 a34) / p`. Each chart is
//! explored from random starts on the faces of the cube by coordinate
//! ascent, first with a penalty on derived entries leaving `[−1, 1]`, then
//! with the constraints enforced exactly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::admissible::{
    check_relations, objective, peculiar_magnitudes, AdmissibleDoc, AdmissibleSet, LambdaVector, PAIRS,
};

/// Smallest pivot magnitude; smaller pivots are covered by the second chart.
pub const PIVOT_EPS: f64 = 1e-3;
/// Sets with at least this value get a structural classification.
pub const NEAR_MAX_THRESHOLD: f64 = 2.0 - 0.05;
const PENALTY_ROUNDS: usize = 5;
const MAX_SWEEPS: usize = 40;
const POLISH_SWEEPS: usize = 200;
const PATTERN_EVALS: usize = 40_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// `a12 != 0`.
    PivotA12,
    /// `a12 = 0`, `a13 != 0`.
    PivotA13,
}

impl Chart {
    fn pivot_slot(self) -> usize {
        match self {
            Chart::PivotA12 => 0,
            Chart::PivotA13 => 1,
        }
    }

    fn free_slots(self) -> &'static [usize] {
        match self {
            Chart::PivotA12 => &[1, 2, 3, 4, 5, 6],
            Chart::PivotA13 => &[2, 3, 4, 7, 8],
        }
    }

    fn derived_slots(self) -> [usize; 3] {
        match self {
            Chart::PivotA12 => [7, 8, 9],
            Chart::PivotA13 => [5, 6, 9],
        }
    }

    /// Numerators of the derived entries (to be divided by the pivot).
    fn numerators(self, a: &[f64; 10]) -> [f64; 3] {
        // Storage: 0:12 1:13 2:14 3:15 4:23 5:24 6:25 7:34 8:35 9:45.
        match self {
            Chart::PivotA12 => [
                a[1] * a[5] - a[2] * a[4],
                a[1] * a[6] - a[3] * a[4],
                a[2] * a[6] - a[3] * a[5],
            ],
            Chart::PivotA13 => [a[2] * a[4], a[3] * a[4], a[2] * a[8] - a[3] * a[7]],
        }
    }

    /// Fills pivot-dependent and derived slots of `a` in place.
    fn complete(self, a: &mut [f64; 10]) {
        if self == Chart::PivotA13 {
            a[0] = 0.0;
        }
        let p = a[self.pivot_slot()];
        let n = self.numerators(a);
        for (slot, v) in self.derived_slots().into_iter().zip(n) {
            a[slot] = v / p;
        }
    }
}

struct Problem {
    w: [f64; 10],
    chart: Chart,
}

impl Problem {
    fn value(&self, a: &[f64; 10]) -> f64 {
        a.iter().zip(&self.w).map(|(v, w)| w * v * v).sum()
    }

    fn penalty(&self, a: &[f64; 10]) -> f64 {
        self.chart
            .derived_slots()
            .iter()
            .map(|&s| {
                let h = (a[s].abs() - 1.0).max(0.0);
                h * h
            })
            .sum()
    }

    fn penalized(&self, a: &[f64; 10], mu: f64) -> f64 {
        self.value(a) - mu * self.penalty(a)
    }

    fn with(&self, a: &[f64; 10], slot: usize, t: f64) -> [f64; 10] {
        let mut b = *a;
        b[slot] = t;
        self.chart.complete(&mut b);
        b
    }

    /// Exact maximization of the penalized objective along one free slot
    /// over `[−1, 1]`. Entries are affine in the slot, so the function is
    /// piecewise quadratic with breakpoints where a derived entry crosses ±1.
    fn step_free_penalized(&self, a: &mut [f64; 10], slot: usize, mu: f64) -> f64 {
        let e0 = self.with(a, slot, 0.0);
        let e1 = self.with(a, slot, 1.0);
        let beta: Vec<f64> = e1.iter().zip(&e0).map(|(x, y)| x - y).collect();
        let derived = self.chart.derived_slots();
        let mut cuts = vec![-1.0, 1.0];
        for &d in &derived {
            if beta[d] != 0.0 {
                for s in [-1.0, 1.0] {
                    let t = (s - e0[d]) / beta[d];
                    if t > -1.0 && t < 1.0 {
                        cuts.push(t);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let mut candidates = cuts.clone();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let (mut qa, mut qb) = (0.0, 0.0);
            for k in 0..10 {
                qa += self.w[k] * beta[k] * beta[k];
                qb += 2.0 * self.w[k] * e0[k] * beta[k];
            }
            for &d in &derived {
                let v = e0[d] + beta[d] * mid;
                if v.abs() > 1.0 {
                    let s = v.signum();
                    qa -= mu * beta[d] * beta[d];
                    qb -= 2.0 * mu * beta[d] * (e0[d] - s);
                }
            }
            if qa < 0.0 {
                let t = -qb / (2.0 * qa);
                if t > w[0] && t < w[1] {
                    candidates.push(t);
                }
            }
        }
        let current = self.penalized(a, mu);
        let mut best = (current, a[slot]);
        for t in candidates {
            let v = self.penalized(&self.with(a, slot, t), mu);
            if v > best.0 {
                best = (v, t);
            }
        }
        *a = self.with(a, slot, best.1);
        best.0 - current
    }

    fn step_pivot_penalized(&self, a: &mut [f64; 10], mu: f64) -> f64 {
        let slot = self.chart.pivot_slot();
        let f = |p: f64| self.penalized(&self.with(a, slot, p), mu);
        const N: usize = 24;
        let grid: Vec<f64> = (0..=N).map(|k| PIVOT_EPS + (1.0 - PIVOT_EPS) * k as f64 / N as f64).collect();
        let (kbest, _) = grid
            .iter()
            .enumerate()
            .map(|(k, &p)| (k, f(p)))
            .fold((0, f64::NEG_INFINITY), |b, (k, v)| if v > b.1 { (k, v) } else { b });
        let (mut lo, mut hi) = (grid[kbest.saturating_sub(1)], grid[(kbest + 1).min(N)]);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - r * (hi - lo);
        let mut x2 = lo + r * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..40 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + r * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - r * (hi - lo);
                f1 = f(x1);
            }
        }
        let current = self.penalized(a, mu);
        let mut best = (current, a[slot]);
        for p in [grid[kbest], x1, x2] {
            let v = f(p);
            if v > best.0 {
                best = (v, p);
            }
        }
        *a = self.with(a, slot, best.1);
        best.0 - current
    }

    fn scale(&self, a: &[f64; 10]) -> f64 {
        a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Scale-invariant form of the problem: `value(a) / max|a_ij|²`. Since
    /// the objective and the relations are homogeneous, maximizing the ratio
    /// over the chart and normalizing is the same as maximizing the value
    /// over admissible sets, with no constraint left to track.
    fn ratio(&self, a: &[f64; 10]) -> f64 {
        let m = self.scale(a);
        if m == 0.0 {
            0.0
        } else {
            self.value(a) / (m * m)
        }
    }

    fn normalized(&self, a: &[f64; 10]) -> Option<[f64; 10]> {
        let m = self.scale(a);
        if !(m > 0.0) || !m.is_finite() {
            return None;
        }
        let b = a.map(|v| v / m);
        (b[self.chart.pivot_slot()].abs() >= PIVOT_EPS).then_some(b)
    }

    /// Maximizes the ratio along one free slot. All entries are affine in
    /// the slot, so on each piece of the upper envelope `max|a_ij|` the ratio
    /// is `q(t) / l(t)²` with `q` quadratic and `l` affine, whose only
    /// stationary point solves a linear equation. Candidates are envelope
    /// breakpoints and those stationary points.
    fn step_free_ratio(&self, a: &mut [f64; 10], slot: usize) -> f64 {
        let e0 = self.with(a, slot, 0.0);
        let e1 = self.with(a, slot, 1.0);
        let beta: [f64; 10] = std::array::from_fn(|k| e1[k] - e0[k]);
        let (mut qa, mut qb, mut qc) = (0.0, 0.0, 0.0);
        for k in 0..10 {
            qa += self.w[k] * beta[k] * beta[k];
            qb += 2.0 * self.w[k] * e0[k] * beta[k];
            qc += self.w[k] * e0[k] * e0[k];
        }
        let level = (0..10).filter(|&k| beta[k] == 0.0).fold(0.0f64, |m, k| m.max(e0[k].abs()));
        let mut lines: Vec<(f64, f64)> = Vec::new();
        for k in (0..10).filter(|&k| beta[k] != 0.0) {
            lines.push((e0[k], beta[k]));
            lines.push((-e0[k], -beta[k]));
        }
        let mut candidates = vec![a[slot]];
        for (i, &(c, b)) in lines.iter().enumerate() {
            if level > 0.0 {
                candidates.push((level - c) / b);
            }
            for &(c2, b2) in &lines[i + 1..] {
                if b != b2 {
                    candidates.push((c2 - c) / (b - b2));
                }
            }
            let den = 2.0 * qa * c - qb * b;
            if den != 0.0 {
                candidates.push((2.0 * b * qc - qb * c) / den);
            }
        }
        let current = self.ratio(a);
        let mut best = (current, *a);
        for t in candidates {
            if !t.is_finite() {
                continue;
            }
            if let Some(b) = self.normalized(&self.with(a, slot, t)) {
                let v = self.ratio(&b);
                if v > best.0 {
                    best = (v, b);
                }
            }
        }
        *a = best.1;
        best.0 - current
    }

    /// Along the pivot `p` the envelope is `max(M, p, C/p)` with `M` the
    /// largest free entry and `C` the largest numerator, and the ratio is
    /// monotone or convex in `p²` on every piece, so the breakpoints
    /// `M, C/M, √C` are the only candidates.
    fn step_pivot_ratio(&self, a: &mut [f64; 10]) -> f64 {
        let slot = self.chart.pivot_slot();
        let m_free = self.chart.free_slots().iter().fold(0.0f64, |m, &s| m.max(a[s].abs()));
        let c = self.chart.numerators(a).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let current = self.ratio(a);
        let mut best = (current, *a);
        for p in [m_free, c / m_free, c.sqrt()] {
            if !(p > 0.0) || !p.is_finite() {
                continue;
            }
            if let Some(b) = self.normalized(&self.with(a, slot, p)) {
                let v = self.ratio(&b);
                if v > best.0 {
                    best = (v, b);
                }
            }
        }
        *a = best.1;
        best.0 - current
    }

    /// Compass search on the ratio over coordinate and pairwise diagonal
    /// directions. Coordinate ascent alone stalls on ridges where several
    /// entries sit at ±1 and improving requires moving two variables at once.
    fn pattern_polish(&self, a: &mut [f64; 10], tol: f64) {
        let mut vars = vec![self.chart.pivot_slot()];
        vars.extend_from_slice(self.chart.free_slots());
        let n = vars.len();
        let mut dirs: Vec<Vec<(usize, f64)>> = Vec::new();
        for i in 0..n {
            dirs.push(vec![(vars[i], 1.0)]);
            dirs.push(vec![(vars[i], -1.0)]);
            for j in i + 1..n {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    dirs.push(vec![(vars[i], si), (vars[j], sj)]);
                }
            }
        }
        let mut current = self.ratio(a);
        let mut h = 1e-2;
        let mut evals = 0;
        while h > 1e-13 && evals < PATTERN_EVALS {
            let mut improved = false;
            for d in &dirs {
                let mut b = *a;
                for &(slot, sign) in d {
                    b[slot] += sign * h;
                }
                self.chart.complete(&mut b);
                evals += 1;
                if let Some(b) = self.normalized(&b) {
                    let v = self.ratio(&b);
                    if v > current + tol * 1e-6 {
                        *a = b;
                        current = v;
                        improved = true;
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
    }

    /// Rescales toward the origin until every entry is in `[−1, 1]`; the
    /// relations are homogeneous, so this stays inside the chart.
    fn make_feasible(&self, a: &mut [f64; 10]) {
        let slot = self.chart.pivot_slot();
        for _ in 0..8 {
            let m = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if m <= 1.0 {
                return;
            }
            if a[slot] / m >= PIVOT_EPS {
                for v in a.iter_mut() {
                    *v /= m;
                }
            } else {
                a[slot] = PIVOT_EPS;
                let md = self.chart.numerators(a).iter().fold(0.0f64, |m, v| m.max(v.abs())) / PIVOT_EPS;
                if md > 1.0 {
                    let s = 1.0 / md.sqrt();
                    for &f in self.chart.free_slots() {
                        a[f] *= s;
                    }
                }
            }
            self.chart.complete(a);
        }
    }

    fn run(&self, a: &mut [f64; 10], tol: f64) {
        let free = self.chart.free_slots();
        let mut mu = 1.0;
        for _ in 0..PENALTY_ROUNDS {
            for _ in 0..MAX_SWEEPS {
                let mut gain = self.step_pivot_penalized(a, mu);
                for &s in free {
                    gain += self.step_free_penalized(a, s, mu);
                }
                if gain <= tol {
                    break;
                }
            }
            mu *= 2.0;
        }
        self.make_feasible(a);
        for _ in 0..POLISH_SWEEPS {
            let mut gain = self.step_pivot_ratio(a);
            for &s in free {
                gain += self.step_free_ratio(a, s);
            }
            if gain <= tol * 1e-3 {
                break;
            }
        }
        self.pattern_polish(a, tol);
    }
}

fn pair_weights(l: &[f64; 6]) -> [f64; 10] {
    let mut w = [0.0; 10];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        w[k] = l[i - 1] * l[j - 1];
    }
    w
}

fn restart_rng(seed: u64, sample: u64, restart: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((sample << 24) | restart);
    rng
}

/// One restart: returns the admissible set found, in original indexing.
fn single_restart(l: &[f64; 6], restart: u64, rng: &mut ChaCha8Rng, tol: f64) -> AdmissibleSet {
    let chart = if restart % 4 == 3 { Chart::PivotA13 } else { Chart::PivotA12 };
    let mut perm = [1usize, 2, 3, 4, 5];
    if restart > 0 {
        perm.shuffle(rng);
    }
    // Work with b_ij = a_{σ(i)σ(j)}, whose weights are λ_{σ(i)}.
    let mut lp = [0.0; 6];
    for i in 0..5 {
        lp[i] = l[perm[i] - 1];
    }
    lp[5] = l[5];
    let problem = Problem { w: pair_weights(&lp), chart };

    let mut a = [0.0; 10];
    // Odd restarts start from lattice points of the cube, which is where
    // highly symmetric weight vectors put their maximizers.
    let discrete = restart % 2 == 1;
    for &s in chart.free_slots() {
        a[s] = if discrete { rng.gen_range(-1i32..=1) as f64 } else { rng.gen_range(-1.0..=1.0) };
    }
    // Start on faces of the cube: one coordinate of each row block at ±1.
    let free = chart.free_slots();
    let half = free.len() / 2;
    for block in [&free[..half], &free[half..]] {
        let s = block[rng.gen_range(0..block.len())];
        a[s] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    }
    a[chart.pivot_slot()] = if discrete { 1.0 } else { rng.gen_range(PIVOT_EPS..=1.0) };
    chart.complete(&mut a);

    problem.run(&mut a, tol);

    let m = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m > 1.0 {
        for v in a.iter_mut() {
            *v /= m;
        }
    }
    let b = AdmissibleSet::from_values(a);
    let mut inv = [0usize; 5];
    for i in 0..5 {
        inv[perm[i] - 1] = i + 1;
    }
    b.permuted(inv)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub lambda: LambdaVector,
    pub best_value: f64,
    pub best_set: AdmissibleSet,
    pub restarts: usize,
    /// Fraction of the 20 rows `(a_ik, a_il, a_im)` with an entry of
    /// magnitude 1 (within 1e-6).
    pub boundary_diagnostic: f64,
}

/// Best value after the first `k` restarts, for `k = 1..=restarts`.
pub fn restart_profile(l: &LambdaVector, restarts: usize, tol: f64, seed: u64, sample: u64) -> Vec<f64> {
    let mut best = f64::NEG_INFINITY;
    (0..restarts as u64)
        .map(|r| {
            let mut rng = restart_rng(seed, sample, r);
            let s = single_restart(l, r, &mut rng, tol);
            best = best.max(objective(&s, l));
            best
        })
        .collect()
}

/// Multi-start search for the largest objective at fixed weights.
pub fn maximize_objective(l: &LambdaVector, restarts: usize, tol: f64) -> CertificateReport {
    maximize_objective_seeded(l, restarts, tol, 0, 0)
}

pub fn maximize_objective_seeded(
    l: &LambdaVector,
    restarts: usize,
    tol: f64,
    seed: u64,
    sample: u64,
) -> CertificateReport {
    let restarts = restarts.max(1);
    let (best_value, best_set) = (0..restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(seed, sample, r);
            let s = single_restart(l, r, &mut rng, tol);
            (objective(&s, l), r, s)
        })
        .reduce_with(|x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x })
        .map(|(v, _, s)| (v, s))
        .expect("at least one restart");
    CertificateReport {
        lambda: *l,
        best_value,
        best_set,
        restarts,
        boundary_diagnostic: boundary_fraction(&best_set),
    }
}

/// Fraction of the 20 rows `(a_ik, a_il, a_im)` lying on the boundary of
/// `[−1, 1]³`.
pub fn boundary_fraction(a: &AdmissibleSet) -> f64 {
    let mut on = 0;
    for i in 1..=5 {
        let others: Vec<usize> = (1..=5).filter(|&k| k != i).collect();
        for skip in 0..4 {
            let row: Vec<usize> = others.iter().enumerate().filter(|&(p, _)| p != skip).map(|(_, &k)| k).collect();
            if row.iter().any(|&k| a.get(i, k).abs() >= 1.0 - 1e-6) {
                on += 1;
            }
        }
    }
    on as f64 / 20.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum StructureClass {
    /// Value below the near-maximal threshold; not classified.
    Skipped,
    ContainsZero,
    /// Matches the peculiar pattern after relabelling `i -> perm[i-1]`.
    Peculiar { perm: [usize; 5] },
    Unclassified,
}

const STRUCTURE_TOL: f64 = 1e-4;

/// Near-maximal sets either contain a zero or are peculiar up to relabelling.
pub fn boundary_structure_check(report: &CertificateReport) -> StructureClass {
    if report.best_value < NEAR_MAX_THRESHOLD {
        return StructureClass::Skipped;
    }
    classify(&report.best_set)
}

pub fn classify(a: &AdmissibleSet) -> StructureClass {
    if a.values().iter().any(|v| v.abs() <= STRUCTURE_TOL) {
        return StructureClass::ContainsZero;
    }
    match find_peculiar_permutation(a) {
        Some(perm) => StructureClass::Peculiar { perm },
        None => StructureClass::Unclassified,
    }
}

pub fn find_peculiar_permutation(a: &AdmissibleSet) -> Option<[usize; 5]> {
    let mut perm = [1usize, 2, 3, 4, 5];
    let mut found = None;
    permutations(&mut perm, 0, &mut |p| {
        if found.is_none() && is_peculiar(&a.permuted(*p)) {
            found = Some(*p);
        }
    });
    found
}

fn is_peculiar(b: &AdmissibleSet) -> bool {
    let near = |x: f64, y: f64| (x - y).abs() <= STRUCTURE_TOL;
    let unit = [(1, 2), (1, 3), (2, 4), (3, 5), (4, 5)];
    if !unit.iter().all(|&(i, j)| near(b.get(i, j).abs(), 1.0)) {
        return false;
    }
    let (x, y) = (b.get(1, 4).abs(), b.get(1, 5).abs());
    if x <= STRUCTURE_TOL || y <= STRUCTURE_TOL || x + y < 1.0 - STRUCTURE_TOL {
        return false;
    }
    let (m23, m25, m34) = peculiar_magnitudes(x, y);
    near(b.get(2, 3).abs(), m23) && near(b.get(2, 5).abs(), m25) && near(b.get(3, 4).abs(), m34)
}

fn permutations(p: &mut [usize; 5], k: usize, f: &mut impl FnMut(&[usize; 5])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Admissible set with value exactly 2 at `λ = (½, …, ½)`: the edge
/// directions of a regular tetrahedron, rescaled by √2 so that its nonzero
/// entries are ±1.
pub fn tetrahedron_witness() -> AdmissibleSet {
    // a_ij = det(u_i, u_j, u_6) · √2 for u = (1,1,0), (1,−1,0), (1,0,1),
    // (1,0,−1), (0,1,1), u6 = (0,1,−1), all over √2.
    AdmissibleSet::from_values([1.0, 0.0, 1.0, -1.0, -1.0, 0.0, -1.0, 1.0, -1.0, -1.0])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessEval {
    pub lambda: [f64; 6],
    pub value: f64,
    pub set: AdmissibleDoc,
}

pub fn witness_eval() -> WitnessEval {
    let l = LambdaVector::uniform();
    let w = tetrahedron_witness();
    WitnessEval { lambda: *l, value: objective(&w, &l), set: w.to_doc() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Uniform on the weight simplex.
    Simplex,
    /// Uniform on the face `λ1 = 0`.
    ZeroFirst,
}

impl Sampling {
    pub fn ceiling(self) -> f64 {
        match self {
            Sampling::Simplex => 2.0,
            Sampling::ZeroFirst => 1.8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertViolation {
    pub lambda: [f64; 6],
    pub value: f64,
    pub set: AdmissibleDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifySummary {
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
    pub sampling: Sampling,
    pub ceiling: f64,
    /// Largest value over all samples and the hard-coded witness.
    pub global_max: f64,
    pub argmax_lambda: [f64; 6],
    pub violations: Vec<CertViolation>,
    /// Largest value among sampled weights only (`null` with no samples).
    pub sampled_max: Option<f64>,
    pub witness: WitnessEval,
    pub near_maximal: usize,
    pub unclassified: Vec<CertViolation>,
    pub min_boundary_diagnostic: Option<f64>,
}

/// Samples weight vectors and maximizes the objective for each; values above
/// `ceiling + tol` are reported as violations.
pub fn certify_random(count: usize, seed: u64, restarts: usize, tol: f64) -> CertifySummary {
    certify_with(count, seed, restarts, tol, Sampling::Simplex)
}

pub fn certify_with(count: usize, seed: u64, restarts: usize, tol: f64, sampling: Sampling) -> CertifySummary {
    let ceiling = sampling.ceiling();
    let inner_tol = 1e-10;
    let reports: Vec<CertificateReport> = (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = restart_rng(seed, k, (1 << 24) - 1);
            let l = match sampling {
                Sampling::Simplex => LambdaVector::sample(&mut rng),
                Sampling::ZeroFirst => LambdaVector::sample_zero_first(&mut rng),
            };
            maximize_objective_seeded(&l, restarts, inner_tol, seed, k)
        })
        .collect();

    let witness = witness_eval();
    let mut global = match sampling {
        Sampling::Simplex => (witness.value, witness.lambda),
        Sampling::ZeroFirst => (f64::NEG_INFINITY, [f64::NAN; 6]),
    };
    let mut sampled_max: Option<f64> = None;
    let mut violations = Vec::new();
    let mut unclassified = Vec::new();
    let mut near = 0;
    let mut min_boundary: Option<f64> = None;
    for r in &reports {
        debug_assert!(check_relations(&r.best_set, 1e-7));
        if r.best_value > global.0 {
            global = (r.best_value, *r.lambda);
        }
        sampled_max = Some(sampled_max.map_or(r.best_value, |m| m.max(r.best_value)));
        let entry = || CertViolation { lambda: *r.lambda, value: r.best_value, set: r.best_set.to_doc() };
        if r.best_value > ceiling + tol {
            violations.push(entry());
        }
        match boundary_structure_check(r) {
            StructureClass::Skipped => {}
            StructureClass::Unclassified => {
                near += 1;
                unclassified.push(entry());
            }
            _ => near += 1,
        }
        min_boundary = Some(min_boundary.map_or(r.boundary_diagnostic, |m| m.min(r.boundary_diagnostic)));
    }
    if global.0 == f64::NEG_INFINITY {
        global.0 = 0.0;
    }
    CertifySummary {
        samples: count,
        restarts,
        seed,
        sampling,
        ceiling,
        global_max: global.0,
        argmax_lambda: global.1,
        violations,
        sampled_max,
        witness,
        near_maximal: near,
        unclassified,
        min_boundary_diagnostic: min_boundary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::{from_contact_vectors, peculiar_from, RELATION_TOL};
    use crate::geom::Vec3;

    #[test]
    fn witness_matches_tetrahedron_configuration() {
        let s = 1.0 / 2f64.sqrt();
        let u = [
            Vec3::new(1.0, 1.0, 0.0) * s,
            Vec3::new(1.0, -1.0, 0.0) * s,
            Vec3::new(1.0, 0.0, 1.0) * s,
            Vec3::new(1.0, 0.0, -1.0) * s,
            Vec3::new(0.0, 1.0, 1.0) * s,
            Vec3::new(0.0, 1.0, -1.0) * s,
        ];
        let derived = from_contact_vectors(&u).scaled(2f64.sqrt());
        let w = tetrahedron_witness();
        for (a, b) in derived.values().iter().zip(w.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(check_relations(&w, 0.0));
        assert_eq!(witness_eval().value, 2.0);
    }

    #[test]
    fn charts_produce_admissible_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for chart in [Chart::PivotA12, Chart::PivotA13] {
            for _ in 0..100 {
                let mut a = [0.0; 10];
                for &s in chart.free_slots() {
                    a[s] = rng.gen_range(-1.0..1.0);
                }
                a[chart.pivot_slot()] = rng.gen_range(0.1..1.0);
                chart.complete(&mut a);
                assert!(check_relations(&AdmissibleSet::from_values(a), 1e-9));
            }
        }
    }

    #[test]
    fn uniform_weights_reach_two() {
        let r = maximize_objective(&LambdaVector::uniform(), 32, 1e-10);
        assert!(r.best_value <= 2.0 + 1e-9);
        assert!(r.best_value >= 2.0 - 1e-6, "{}", r.best_value);
        assert!(check_relations(&r.best_set, 1e-7));
        assert!(r.best_set.max_abs() <= 1.0 + 1e-9);
    }

    #[test]
    fn zero_first_weights_stay_below_nine_fifths() {
        let l = LambdaVector::try_new([0.0, 0.45, 0.45, 0.6, 0.6, 0.9]).unwrap();
        let r = maximize_objective(&l, 32, 1e-10);
        assert!(r.best_value <= 1.8 + 1e-6);
    }

    #[test]
    fn single_active_term() {
        let l = LambdaVector::try_new([0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let r = maximize_objective(&l, 8, 1e-10);
        assert!(r.best_value <= 1.0 + 1e-12);
        assert!(r.best_value >= 1.0 - 1e-9);
    }

    #[test]
    fn restarts_are_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l = LambdaVector::sample(&mut rng);
        let p = restart_profile(&l, 16, 1e-10, 3, 0);
        assert!(p.windows(2).all(|w| w[1] >= w[0]));
        let r = maximize_objective_seeded(&l, 16, 1e-10, 3, 0);
        assert_eq!(r.best_value, p[15]);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&tetrahedron_witness()), StructureClass::ContainsZero);
        let p = peculiar_from(0.8, 0.7, 0).unwrap();
        assert!(matches!(classify(&p), StructureClass::Peculiar { perm: [1, 2, 3, 4, 5] }));
        let q = p.permuted([2, 4, 1, 5, 3]);
        assert!(check_relations(&q, RELATION_TOL));
        assert!(matches!(classify(&q), StructureClass::Peculiar { .. }));
        let report = CertificateReport {
            lambda: LambdaVector::uniform(),
            best_value: 1.0,
            best_set: q,
            restarts: 1,
            boundary_diagnostic: 0.0,
        };
        assert_eq!(boundary_structure_check(&report), StructureClass::Skipped);
    }

    #[test]
    fn boundary_fraction_of_witness() {
        // Every row of the witness has an entry ±1 except those consisting of
        // the zero entries a15, a25, a34 and their neighbours.
        let f = boundary_fraction(&tetrahedron_witness());
        assert!(f > 0.5 && f <= 1.0);
    }

    #[test]
    fn empty_run_reports_the_witness() {
        let s = certify_random(0, 42, 4, 1e-9);
        assert_eq!(s.global_max, 2.0);
        assert!(s.violations.is_empty());
        assert_eq!(s.sampled_max, None);
    }

    #[test]
    fn runs_are_deterministic() {
        let a = certify_random(3, 7, 4, 1e-9);
        let b = certify_random(3, 7, 4, 1e-9);
        assert_eq!(a, b);
    }
}

