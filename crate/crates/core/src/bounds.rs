//! Closed-form inequalities on products of the weights and an exhaustive
//! grid harness for them.
//!
//! Throughout, `Σ` denotes `Σ_{1<=i<j<=5} λ_i λ_j` and `λ6` is the largest
//! weight.

use rayon::prelude::*;
use serde::Serialize;

use crate::admissible::LambdaVector;

/// Absolute slack allowed when comparing a value to its bound.
pub const BOUND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundsError {
    #[error("IndexError: {0}")]
    Index(String),
    #[error("PreconditionError: {0}")]
    Precondition(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundEval {
    pub value: f64,
    pub bound: f64,
    pub satisfied: bool,
}

impl BoundEval {
    fn new(value: f64, bound: f64) -> Self {
        BoundEval { value, bound, satisfied: value <= bound + BOUND_TOL }
    }

    pub fn slack(&self) -> f64 {
        self.bound - self.value
    }
}

fn check_indices(idx: &[usize], range: std::ops::RangeInclusive<usize>) -> Result<(), BoundsError> {
    for (p, &i) in idx.iter().enumerate() {
        if !range.contains(&i) {
            return Err(BoundsError::Index(format!("index {i} outside {range:?}")));
        }
        if idx[..p].contains(&i) {
            return Err(BoundsError::Index(format!("index {i} repeated")));
        }
    }
    Ok(())
}

fn pair_sum(l: &[f64; 6]) -> f64 {
    let mut s = 0.0;
    for i in 0..5 {
        for j in i + 1..5 {
            s += l[i] * l[j];
        }
    }
    s
}

fn lam(l: &[f64; 6], i: usize) -> f64 {
    l[i - 1]
}

/// `Σ − λkλl − λmλn` for distinct `k, l, m, n`; at most 2.
pub fn pair_drop_sum(l: &LambdaVector, k: usize, ll: usize, m: usize, n: usize) -> Result<BoundEval, BoundsError> {
    check_indices(&[k, ll, m, n], 1..=5)?;
    Ok(pair_drop_raw(l, k, ll, m, n))
}

fn pair_drop_raw(l: &[f64; 6], k: usize, ll: usize, m: usize, n: usize) -> BoundEval {
    let v = pair_sum(l) - lam(l, k) * lam(l, ll) - lam(l, m) * lam(l, n);
    BoundEval::new(v, 2.0)
}

/// `Σ − λkλl − λlλn − λkλn` for distinct `k, l, n`; at most 9/5.
pub fn triple_drop_sum(l: &LambdaVector, k: usize, ll: usize, n: usize) -> Result<BoundEval, BoundsError> {
    check_indices(&[k, ll, n], 1..=5)?;
    Ok(triple_drop_raw(l, k, ll, n))
}

fn triple_drop_raw(l: &[f64; 6], k: usize, ll: usize, n: usize) -> BoundEval {
    let (a, b, c) = (lam(l, k), lam(l, ll), lam(l, n));
    BoundEval::new(pair_sum(l) - a * b - b * c - a * c, 1.8)
}

/// `Σ − λkλl` when `λ1 = 0`, for distinct `k, l` in `2..=5`; at most 9/5.
pub fn zero_lambda_drop(l: &LambdaVector, k: usize, ll: usize) -> Result<BoundEval, BoundsError> {
    if l[0] != 0.0 {
        return Err(BoundsError::Precondition(format!("λ1 = {} must be 0", l[0])));
    }
    check_indices(&[k, ll], 2..=5)?;
    Ok(zero_drop_raw(l, k, ll))
}

fn zero_drop_raw(l: &[f64; 6], k: usize, ll: usize) -> BoundEval {
    BoundEval::new(pair_sum(l) - lam(l, k) * lam(l, ll), 1.8)
}

/// `(3/5)(λ1λ5 + λ1λ4 + λ2λ3 + λ2λ5 + λ3λ4) + λ1λ2 + λ1λ3 + λ2λ4 + λ3λ5 +
/// λ4λ5`; at most 2.
pub fn weighted_sum(l: &LambdaVector) -> BoundEval {
    weighted_raw(l)
}

fn weighted_raw(l: &[f64; 6]) -> BoundEval {
    let p = |i, j| lam(l, i) * lam(l, j);
    let light = p(1, 5) + p(1, 4) + p(2, 3) + p(2, 5) + p(3, 4);
    let heavy = p(1, 2) + p(1, 3) + p(2, 4) + p(3, 5) + p(4, 5);
    BoundEval::new(0.6 * light + heavy, 2.0)
}

/// `ax² + by² + cz² <= a + b + c − min(a, b, c)` for `x + y + z = 0` and
/// `|x|, |y|, |z| <= 1`.
pub fn ignore_term_bound(a: f64, b: f64, c: f64, x: f64, y: f64, z: f64) -> Result<BoundEval, BoundsError> {
    if a < 0.0 || b < 0.0 || c < 0.0 {
        return Err(BoundsError::Precondition("coefficients must be nonnegative".into()));
    }
    if x.abs() > 1.0 || y.abs() > 1.0 || z.abs() > 1.0 {
        return Err(BoundsError::Precondition("x, y, z must lie in [-1, 1]".into()));
    }
    if (x + y + z).abs() > 1e-12 {
        return Err(BoundsError::Precondition("x + y + z must vanish".into()));
    }
    Ok(BoundEval::new(a * x * x + b * y * y + c * z * z, a + b + c - a.min(b).min(c)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    PairDrop,
    TripleDrop,
    ZeroLambdaDrop,
    WeightedSum,
}

impl Lemma {
    pub const ALL: [Lemma; 4] = [Lemma::PairDrop, Lemma::TripleDrop, Lemma::ZeroLambdaDrop, Lemma::WeightedSum];

    pub fn bound(self) -> f64 {
        match self {
            Lemma::PairDrop | Lemma::WeightedSum => 2.0,
            Lemma::TripleDrop | Lemma::ZeroLambdaDrop => 1.8,
        }
    }

    /// Explicit weights and indices at which the bound is attained.
    pub fn tight_witness(self) -> (LambdaVector, Vec<usize>) {
        let l = |v: [f64; 6]| LambdaVector::try_new(v).expect("valid witness");
        match self {
            Lemma::PairDrop => (LambdaVector::uniform(), vec![2, 3, 1, 4]),
            Lemma::TripleDrop => (l([0.4, 0.4, 0.4, 0.6, 0.6, 0.6]), vec![1, 2, 3]),
            Lemma::ZeroLambdaDrop => (l([0.0, 0.6, 0.6, 0.6, 0.6, 0.6]), vec![2, 3]),
            Lemma::WeightedSum => (LambdaVector::uniform(), vec![]),
        }
    }

    pub fn eval(self, l: &LambdaVector, idx: &[usize]) -> Result<BoundEval, BoundsError> {
        let arity = |n: usize| {
            if idx.len() == n {
                Ok(())
            } else {
                Err(BoundsError::Index(format!("expected {n} indices, got {}", idx.len())))
            }
        };
        match self {
            Lemma::PairDrop => {
                arity(4)?;
                pair_drop_sum(l, idx[0], idx[1], idx[2], idx[3])
            }
            Lemma::TripleDrop => {
                arity(3)?;
                triple_drop_sum(l, idx[0], idx[1], idx[2])
            }
            Lemma::ZeroLambdaDrop => {
                arity(2)?;
                zero_lambda_drop(l, idx[0], idx[1])
            }
            Lemma::WeightedSum => {
                arity(0)?;
                Ok(weighted_sum(l))
            }
        }
    }
}

/// Every index combination each lemma quantifies over.
fn index_sets(lemma: Lemma) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    match lemma {
        Lemma::PairDrop => {
            // Each 4-subset splits into pairs in three ways.
            for skip in 1..=5 {
                let q: Vec<usize> = (1..=5).filter(|&i| i != skip).collect();
                out.push(vec![q[0], q[1], q[2], q[3]]);
                out.push(vec![q[0], q[2], q[1], q[3]]);
                out.push(vec![q[0], q[3], q[1], q[2]]);
            }
        }
        Lemma::TripleDrop => {
            for k in 1..=5 {
                for l in k + 1..=5 {
                    for n in l + 1..=5 {
                        out.push(vec![k, l, n]);
                    }
                }
            }
        }
        Lemma::ZeroLambdaDrop => {
            for k in 2..=5 {
                for l in k + 1..=5 {
                    out.push(vec![k, l]);
                }
            }
        }
        Lemma::WeightedSum => out.push(vec![]),
    }
    out
}

fn eval_raw(lemma: Lemma, l: &[f64; 6], idx: &[usize]) -> BoundEval {
    match lemma {
        Lemma::PairDrop => pair_drop_raw(l, idx[0], idx[1], idx[2], idx[3]),
        Lemma::TripleDrop => triple_drop_raw(l, idx[0], idx[1], idx[2]),
        Lemma::ZeroLambdaDrop => zero_drop_raw(l, idx[0], idx[1]),
        Lemma::WeightedSum => weighted_raw(l),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub lemma: Lemma,
    pub lambda: [f64; 6],
    pub indices: Vec<usize>,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaSummary {
    pub lemma: Lemma,
    pub bound: f64,
    /// Largest value over the grid.
    pub max_value: f64,
    pub argmax_lambda: [f64; 6],
    pub argmax_indices: Vec<usize>,
    pub points_checked: usize,
    pub violations: usize,
    /// Value at the explicit tight witness.
    pub witness_lambda: [f64; 6],
    pub witness_indices: Vec<usize>,
    pub witness_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub step: f64,
    pub points: usize,
    /// First violations found, capped at [`MAX_REPORTED_VIOLATIONS`].
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    /// Largest `value − bound` over all lemmas and grid points.
    pub max_value: f64,
    pub argmax_lambda: [f64; 6],
    pub lemmas: Vec<LemmaSummary>,
}

pub const MAX_REPORTED_VIOLATIONS: usize = 100;

#[derive(Clone, Debug)]
struct Acc {
    best: Vec<(f64, [u32; 6], usize)>,
    checked: Vec<usize>,
    violations: Vec<(Lemma, [u32; 6], usize, f64)>,
    violation_count: usize,
    points: usize,
}

impl Acc {
    fn empty() -> Self {
        Acc {
            best: vec![(f64::NEG_INFINITY, [u32::MAX; 6], 0); 4],
            checked: vec![0; 4],
            violations: Vec::new(),
            violation_count: 0,
            points: 0,
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        for k in 0..4 {
            self.best[k] = better(self.best[k], other.best[k]);
            self.checked[k] += other.checked[k];
        }
        self.violations.extend(other.violations);
        self.violations.sort_by(|a, b| a.1.cmp(&b.1).then(a.2.cmp(&b.2)));
        self.violations.truncate(MAX_REPORTED_VIOLATIONS);
        self.violation_count += other.violation_count;
        self.points += other.points;
        self
    }
}

/// Larger value wins; ties go to the lexicographically smaller counts, then
/// the smaller index-set number, so the reduction is schedule independent.
fn better(a: (f64, [u32; 6], usize), b: (f64, [u32; 6], usize)) -> (f64, [u32; 6], usize) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if (b.1, b.2) < (a.1, a.2) {
                b
            } else {
                a
            }
        }
    }
}

/// Checks all four bounds at every grid point `λ = c · 3/N` of the simplex,
/// `N = round(3/step)`, with `λ6 = max`.
pub fn grid_verify_all(step: f64) -> Result<GridReport, BoundsError> {
    if !(step > 0.0 && step <= 3.0) {
        return Err(BoundsError::Precondition(format!("grid step {step} must lie in (0, 3]")));
    }
    let n = (3.0 / step).round().max(1.0) as u32;
    let scale = 3.0 / n as f64;
    let sets: Vec<Vec<Vec<usize>>> = Lemma::ALL.iter().map(|&l| index_sets(l)).collect();

    let acc = (0..=n)
        .into_par_iter()
        .map(|c1| {
            let mut acc = Acc::empty();
            for c2 in 0..=n - c1 {
                for c3 in 0..=n - c1 - c2 {
                    for c4 in 0..=n - c1 - c2 - c3 {
                        for c5 in 0..=n - c1 - c2 - c3 - c4 {
                            let c6 = n - c1 - c2 - c3 - c4 - c5;
                            let c = [c1, c2, c3, c4, c5, c6];
                            if c[..5].iter().any(|&v| v > c6) {
                                continue;
                            }
                            acc.points += 1;
                            let l = c.map(|v| v as f64 * scale);
                            for (k, &lemma) in Lemma::ALL.iter().enumerate() {
                                if lemma == Lemma::ZeroLambdaDrop && c1 != 0 {
                                    continue;
                                }
                                for (s, idx) in sets[k].iter().enumerate() {
                                    let e = eval_raw(lemma, &l, idx);
                                    acc.checked[k] += 1;
                                    acc.best[k] = better(acc.best[k], (e.value, c, s));
                                    if !e.satisfied {
                                        acc.violation_count += 1;
                                        if acc.violations.len() < MAX_REPORTED_VIOLATIONS {
                                            acc.violations.push((lemma, c, s, e.value));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            acc
        })
        .reduce(Acc::empty, Acc::merge);

    let to_l = |c: [u32; 6]| c.map(|v| v as f64 * scale);
    let mut lemmas = Vec::new();
    let mut top = (f64::NEG_INFINITY, [0.0; 6]);
    for (k, &lemma) in Lemma::ALL.iter().enumerate() {
        let (value, c, s) = acc.best[k];
        let (wl, widx) = lemma.tight_witness();
        let witness_value = lemma.eval(&wl, &widx).expect("witness indices are valid").value;
        let excess = value - lemma.bound();
        if excess > top.0 {
            top = (excess, to_l(c));
        }
        lemmas.push(LemmaSummary {
            lemma,
            bound: lemma.bound(),
            max_value: value,
            argmax_lambda: to_l(c),
            argmax_indices: sets[k][s].clone(),
            points_checked: acc.checked[k],
            violations: acc.violations.iter().filter(|v| v.0 == lemma).count(),
            witness_lambda: *wl,
            witness_indices: widx,
            witness_value,
        });
    }
    let violations = acc
        .violations
        .iter()
        .map(|&(lemma, c, s, value)| {
            let k = Lemma::ALL.iter().position(|&l| l == lemma).unwrap();
            Violation { lemma, lambda: to_l(c), indices: sets[k][s].clone(), value, bound: lemma.bound() }
        })
        .collect();
    Ok(GridReport {
        step,
        points: acc.points,
        violations,
        violation_count: acc.violation_count,
        max_value: top.0,
        argmax_lambda: top.1,
        lemmas,
    })
}
