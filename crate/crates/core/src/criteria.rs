//! The decision procedures: cyclic semiampleness, the tree-effectivity
//! (second) criterion, the democratic test, effectivity via balancedness,
//! the nef construction from balanced forms, certificate emission, and the
//! per-`n` classification of the symmetric F-cone's extremal rays.

use crate::budget::Budget;
use crate::divisors::{
    keel_rewrite, parasymmetric, DivisorExpression, DivisorError, SymmetricDivisor,
};
use crate::fcone;
use crate::groupfn::{self, SymmetricFunction};
use crate::quadforms::{
    self, BalanceStatus, BalanceWitness, CyclicQuadraticForm, ZeroSumMinimumWithVector,
};
use crate::rat::{self, Rat};
use crate::weightings::{all_binary_trees, cyclic_weighting, Weighting};
use num::bigint::BigInt;
use num::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error("n = {0} out of range for this criterion")]
    BadN(usize),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("f(0) = {0} != 0")]
    NonzeroAtZero(String),
    #[error("condition (dagger) fails: Q_f attains {value} < m(f) = {bound} at {vector:?}")]
    ConditionDaggerFails {
        vector: Vec<i64>,
        value: String,
        bound: String,
    },
    #[error("divisor is not cyclic semiample; no certificates exist along this route")]
    NotCyclicSemiample,
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    QuadForm(#[from] quadforms::QuadFormError),
    #[error(transparent)]
    Weighting(#[from] crate::weightings::WeightingError),
    #[error(transparent)]
    Tree(#[from] crate::weightings::TreeError),
    #[error(transparent)]
    Fcone(#[from] fcone::FconeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A subset of residues violating the cyclic inequality system.
    Subset { subset: Vec<usize> },
    /// A quadruple a+b+A+B = n violating the tree-effectivity inequality.
    Quadruple {
        a: usize,
        b: usize,
        big_a: usize,
        big_b: usize,
        lambda: String,
    },
    /// A composition of n and a sub-multiset where the democratic flow bound
    /// fails.
    Composition { parts: Vec<usize>, side: Vec<usize> },
    /// A balancedness violation.
    Balance {
        vector: Vec<i64>,
        sum: i64,
        value: String,
        reference: String,
    },
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Weightings(Vec<Weighting>),
    BoundaryRepresentatives(Vec<CertificateEntry>),
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl CriterionReport {
    fn pass(criterion: &str) -> Self {
        CriterionReport {
            criterion: criterion.to_string(),
            verdict: Verdict::Pass,
            witness: None,
            certificate: None,
        }
    }

    fn fail(criterion: &str, witness: Witness) -> Self {
        CriterionReport {
            criterion: criterion.to_string(),
            verdict: Verdict::Fail,
            witness: Some(witness),
            certificate: None,
        }
    }

    pub fn is_pass(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Folded coefficients `a_0, ..., a_{n-1}` (with `a_0 = a_1 = 0`) of a
/// symmetric divisor, cleared to integers. The cyclic criterion is
/// scale-invariant, so the scale is dropped.
fn folded_integer_coefficients(d: &SymmetricDivisor) -> Vec<BigInt> {
    let n = d.n();
    let all: Vec<Rat> = (0..n as i64).map(|j| d.coefficient(j)).collect();
    let (ints, _) = rat::scale_to_integers(&all);
    ints
}

/// The cyclic semiampleness criterion: for every subset `S` of `Z_n`,
/// `2 a_{|S|} >= sum_{i,j in S} (a_{i-j+1} + a_{i-j-1} - 2 a_{i-j})`.
///
/// This is entry-sum minimality of the leading principal minors of the
/// associated circulant form (the orientation that makes the near-constant
/// vector the minimizer). Enumeration fixes `0 in S` and `|S| <= n/2` by
/// translation and complement invariance; the least witness is by size, then
/// lexicographic.
pub fn cyclic_semiample_test(
    d: &SymmetricDivisor,
    budget: &Budget,
) -> Result<CriterionReport, CriteriaError> {
    let name = "cyclic-semiample";
    let n = d.n();
    if n < 5 {
        return Err(CriteriaError::BadN(n));
    }
    if n > budget.max_cyclic_n {
        return Err(CriteriaError::ResourceLimit(format!(
            "cyclic subset scan capped at n <= {}",
            budget.max_cyclic_n
        )));
    }
    let a = folded_integer_coefficients(d);
    match scan_cyclic_subsets(&a, n) {
        CyclicScan::Pass => Ok(CriterionReport::pass(name)),
        CyclicScan::Fail(subset) => Ok(CriterionReport::fail(
            name,
            Witness::Subset { subset },
        )),
    }
}

/// Whether every inequality with `2 <= |S| <= n-2` holds strictly, except on
/// cyclically contiguous subsets, which are rotations of the leading minor
/// and give equality identically (used for interior certificates like
/// psi - Delta).
pub fn cyclic_semiample_all_strict(d: &SymmetricDivisor) -> bool {
    let n = d.n();
    let a = folded_integer_coefficients(d);
    let g = second_difference(&a, n);
    let mut ok = true;
    let mut subset = vec![0usize];
    let mut rhs = g[0].clone();
    strict_dfs(&a, &g, n, &mut subset, &mut rhs, &mut ok);
    ok
}

/// A subset of `Z_n` is a cyclic interval iff the indicator changes value
/// exactly twice around the circle.
fn is_cyclic_interval(subset: &[usize], n: usize) -> bool {
    let mut bits = vec![false; n];
    for &x in subset {
        bits[x] = true;
    }
    let changes = (0..n).filter(|&i| bits[i] != bits[(i + 1) % n]).count();
    changes == 2
}

fn second_difference(a: &[BigInt], n: usize) -> Vec<BigInt> {
    (0..n)
        .map(|x| &a[(x + n - 1) % n] + &a[(x + 1) % n] - 2 * &a[x])
        .collect()
}

enum CyclicScan {
    Pass,
    Fail(Vec<usize>),
}

/// Fast path over i128 when coefficients are small, exact big-integer path
/// otherwise.
fn scan_cyclic_subsets(a: &[BigInt], n: usize) -> CyclicScan {
    let fits = a.iter().all(|x| {
        i128::try_from(x).map(|v| v.abs() < (1i128 << 80)) == Ok(true)
    });
    if fits {
        let a_small: Vec<i128> = a.iter().map(|x| i128::try_from(x).unwrap()).collect();
        let g: Vec<i128> = (0..n)
            .map(|x| a_small[(x + n - 1) % n] + a_small[(x + 1) % n] - 2 * a_small[x])
            .collect();
        let mut best: Option<Vec<usize>> = None;
        let mut subset = vec![0usize];
        let mut rhs = g[0];
        small_dfs(&a_small, &g, n, &mut subset, &mut rhs, &mut best);
        match best {
            None => CyclicScan::Pass,
            Some(s) => CyclicScan::Fail(s),
        }
    } else {
        let g = second_difference(a, n);
        let mut best: Option<Vec<usize>> = None;
        let mut subset = vec![0usize];
        let mut rhs = g[0].clone();
        big_dfs(a, &g, n, &mut subset, &mut rhs, &mut best);
        match best {
            None => CyclicScan::Pass,
            Some(s) => CyclicScan::Fail(s),
        }
    }
}

fn small_dfs(
    a: &[i128],
    g: &[i128],
    n: usize,
    subset: &mut Vec<usize>,
    rhs: &mut i128,
    best: &mut Option<Vec<usize>>,
) {
    let size = subset.len();
    if 2 * a[size.min(n - size)] < *rhs
        && best
            .as_ref()
            .is_none_or(|b| (size, &subset[..]) < (b.len(), &b[..]))
    {
        *best = Some(subset.clone());
    }
    if size == n / 2 {
        return;
    }
    let last = *subset.last().unwrap();
    for x in last + 1..n {
        let mut delta = g[0];
        for &y in subset.iter() {
            delta += 2 * g[(x + n - y) % n];
        }
        subset.push(x);
        *rhs += delta;
        small_dfs(a, g, n, subset, rhs, best);
        subset.pop();
        *rhs -= delta;
    }
}

fn big_dfs(
    a: &[BigInt],
    g: &[BigInt],
    n: usize,
    subset: &mut Vec<usize>,
    rhs: &mut BigInt,
    best: &mut Option<Vec<usize>>,
) {
    let size = subset.len();
    if 2 * &a[size.min(n - size)] < *rhs
        && best
            .as_ref()
            .is_none_or(|b| (size, &subset[..]) < (b.len(), &b[..]))
    {
        *best = Some(subset.clone());
    }
    if size == n / 2 {
        return;
    }
    let last = *subset.last().unwrap();
    for x in last + 1..n {
        let mut delta = g[0].clone();
        for &y in subset.iter() {
            delta += 2 * &g[(x + n - y) % n];
        }
        subset.push(x);
        *rhs += &delta;
        big_dfs(a, g, n, subset, rhs, best);
        subset.pop();
        *rhs -= &delta;
    }
}

fn strict_dfs(
    a: &[BigInt],
    g: &[BigInt],
    n: usize,
    subset: &mut Vec<usize>,
    rhs: &mut BigInt,
    ok: &mut bool,
) {
    if !*ok {
        return;
    }
    let size = subset.len();
    if size >= 2 {
        let lhs = 2 * &a[size.min(n - size)];
        if is_cyclic_interval(subset, n) {
            // rotations of the leading minor: equality always
            debug_assert_eq!(lhs, *rhs);
        } else if lhs <= *rhs {
            *ok = false;
            return;
        }
    }
    if size == n / 2 {
        return;
    }
    let last = *subset.last().unwrap();
    for x in last + 1..n {
        let mut delta = g[0].clone();
        for &y in subset.iter() {
            delta += 2 * &g[(x + n - y) % n];
        }
        subset.push(x);
        *rhs += &delta;
        strict_dfs(a, g, n, subset, rhs, ok);
        subset.pop();
        *rhs -= &delta;
    }
}

/// The second (tree-effectivity) criterion: for some `lambda >= lambda_F-nef`
/// the function `f_lambda(r) = lambda r(n-r) - a_r` is nonnegative,
/// subadditive on `{0..n}`, and satisfies the quadratic tree inequality for
/// all nonnegative `a+b+A+B = n`.
pub fn second_criterion_test(
    d: &SymmetricDivisor,
    lambdas: Option<&[Rat]>,
) -> Result<CriterionReport, CriteriaError> {
    let name = "second-criterion";
    let n = d.n();
    if n < 5 {
        return Err(CriteriaError::BadN(n));
    }
    let lambda_min = d.lambda_fnef();
    let defaults = [lambda_min.clone()];
    let candidates: &[Rat] = lambdas.unwrap_or(&defaults);
    let mut last_witness = None;
    for lambda in candidates {
        if *lambda < lambda_min {
            continue; // below lambda_F-nef: f_lambda is not F-nef, skip
        }
        match check_tree_inequalities(d, lambda) {
            None => {
                return Ok(CriterionReport::pass(name));
            }
            Some(w) => last_witness = Some(w),
        }
    }
    match last_witness {
        Some(w) => Ok(CriterionReport::fail(name, w)),
        // every supplied lambda was below lambda_F-nef
        None => Ok(CriterionReport {
            criterion: name.to_string(),
            verdict: Verdict::Fail,
            witness: None,
            certificate: None,
        }),
    }
}

fn check_tree_inequalities(d: &SymmetricDivisor, lambda: &Rat) -> Option<Witness> {
    let n = d.n();
    let f: Vec<Rat> = (0..=n)
        .map(|r| lambda * rat::int((r * (n - r)) as i64) - d.coefficient(r as i64))
        .collect();
    let quad = |a: usize, b: usize, big_a: usize, big_b: usize| Witness::Quadruple {
        a,
        b,
        big_a,
        big_b,
        lambda: rat::format_rat(lambda),
    };
    for (r, v) in f.iter().enumerate() {
        if v.is_negative() {
            return Some(quad(r, 0, 0, n - r));
        }
    }
    for x in 0..=n {
        for y in 0..=n - x {
            if &f[x] + &f[y] < f[x + y] {
                return Some(quad(x, y, 0, n - x - y));
            }
        }
    }
    for a in 0..=n {
        for b in 0..=n - a {
            for big_a in 0..=n - a - b {
                let big_b = n - a - b - big_a;
                let lhs = (&f[b] - &f[a] + &f[a + b]) * &f[big_a]
                    + (&f[a] - &f[b] + &f[a + b]) * &f[big_b]
                    + (&f[a] + &f[b] - &f[a + b]) * &f[a + b];
                let rhs = rat::int(2) * &f[big_b + b] * &f[a + b];
                if lhs < rhs {
                    return Some(quad(a, b, big_a, big_b));
                }
            }
        }
    }
    None
}

/// The democratic test: with `f` the associated F-nef function of `D`, every
/// composition `d_1 + ... + d_k = n` into `k >= 4` positive parts and every
/// proper sub-multiset `I` must satisfy the democratic flow bound
/// `[s(s+1) sum_J f + (k-s)(k-s-1) sum_I f] / ((k-1)(k-2)) >= f(d(I))`.
/// Compositions with `k = 3` hold automatically (every proper partition of a
/// 3-set has a singleton side).
pub fn democratic_test(d: &SymmetricDivisor) -> Result<CriterionReport, CriteriaError> {
    let f = d.associated_fnef_function();
    democratic_test_with_function(d.n(), &f)
}

/// The democratic test against an explicit representing function.
pub fn democratic_test_with_function(
    n: usize,
    f: &SymmetricFunction,
) -> Result<CriterionReport, CriteriaError> {
    let name = "democratic";
    if n < 5 {
        return Err(CriteriaError::BadN(n));
    }
    let values: Vec<Rat> = (0..=n as i64).map(|r| f.eval(r).clone()).collect();
    if let Some(r) = (1..n).find(|&r| values[r].is_negative()) {
        return Ok(CriterionReport::fail(
            name,
            Witness::Composition {
                parts: vec![r, n - r],
                side: vec![r],
            },
        ));
    }
    let mut witness: Option<Witness> = None;
    let mut parts: Vec<usize> = Vec::new();
    democratic_partitions(n, n, &mut parts, &values, &mut witness);
    match witness {
        None => Ok(CriterionReport::pass(name)),
        Some(w) => Ok(CriterionReport::fail(name, w)),
    }
}

/// Enumerates partitions of `n` (descending parts) with at least 4 parts and
/// stops at the first flow-bound violation.
fn democratic_partitions(
    remaining: usize,
    max_part: usize,
    parts: &mut Vec<usize>,
    f: &[Rat],
    witness: &mut Option<Witness>,
) {
    if witness.is_some() {
        return;
    }
    if remaining == 0 {
        if parts.len() >= 4 {
            check_democratic_partition(parts, f, witness);
        }
        return;
    }
    for p in (1..=max_part.min(remaining)).rev() {
        parts.push(p);
        democratic_partitions(remaining - p, p, parts, f, witness);
        parts.pop();
        if witness.is_some() {
            return;
        }
    }
}

fn check_democratic_partition(parts: &[usize], f: &[Rat], witness: &mut Option<Witness>) {
    let k = parts.len();
    // distinct values with multiplicities
    let mut items: Vec<(usize, usize)> = Vec::new();
    for &p in parts {
        match items.last_mut() {
            Some((v, c)) if *v == p => *c += 1,
            _ => items.push((p, 1)),
        }
    }
    let total: Rat = parts.iter().map(|&p| f[p].clone()).sum();
    let kk = rat::int(((k - 1) * (k - 2)) as i64);
    // every sub-multiset: counts per distinct value
    let mut counts = vec![0usize; items.len()];
    loop {
        // advance odometer
        let mut i = 0;
        loop {
            if i == items.len() {
                return;
            }
            if counts[i] < items[i].1 {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
        let s: usize = counts.iter().sum();
        if s == 0 || s == k {
            continue;
        }
        let sum_i: Rat = counts
            .iter()
            .zip(&items)
            .map(|(&c, &(v, _))| f[v].clone() * rat::int(c as i64))
            .sum();
        let sum_j = &total - &sum_i;
        let d_i: usize = counts.iter().zip(&items).map(|(&c, &(v, _))| c * v).sum();
        let flow = (rat::int((s * (s + 1)) as i64) * &sum_j
            + rat::int(((k - s) * (k - s - 1)) as i64) * &sum_i)
            / &kk;
        if flow < f[d_i] {
            let side: Vec<usize> = counts
                .iter()
                .zip(&items)
                .flat_map(|(&c, &(v, _))| std::iter::repeat(v).take(c))
                .collect();
            *witness = Some(Witness::Composition {
                parts: parts.to_vec(),
                side,
            });
            return;
        }
    }
}

fn require_zero_at_zero(f: &SymmetricFunction) -> Result<(), CriteriaError> {
    if !f.eval(0).is_zero() {
        return Err(CriteriaError::NonzeroAtZero(rat::format_rat(f.eval(0))));
    }
    Ok(())
}

/// Weak cyclic effectivity of `f` (f(0) = 0): weak balancedness of `Q_f`.
pub fn weak_cyclic_effectivity(
    f: &SymmetricFunction,
) -> Result<CriterionReport, CriteriaError> {
    let name = "weak-cyclic-effectivity";
    require_zero_at_zero(f)?;
    let q = CyclicQuadraticForm::from_function(f);
    match quadforms::is_weakly_balanced(&q) {
        quadforms::WeakBalanceVerdict::Pass => Ok(CriterionReport::pass(name)),
        quadforms::WeakBalanceVerdict::Fail { witness } => Ok(CriterionReport::fail(
            name,
            Witness::Subset { subset: witness },
        )),
    }
}

fn balance_witness(w: &BalanceWitness) -> Witness {
    Witness::Balance {
        vector: w.vector.clone(),
        sum: w.sum,
        value: rat::format_rat(&w.q_value),
        reference: rat::format_rat(&w.reference_value),
    }
}

/// Cyclic effectivity of `f` (f(0) = 0): balancedness of `Q_f`. A pass means
/// every parasymmetric divisor built from `f` is boundary semiample.
pub fn cyclic_effectivity(
    f: &SymmetricFunction,
    budget: &Budget,
) -> Result<CriterionReport, CriteriaError> {
    let name = "cyclic-effectivity";
    require_zero_at_zero(f)?;
    let q = CyclicQuadraticForm::from_function(f);
    let verdict = quadforms::is_balanced(&q, budget)?;
    Ok(match verdict.status {
        BalanceStatus::Balanced => CriterionReport::pass(name),
        BalanceStatus::NotBalanced => CriterionReport::fail(
            name,
            balance_witness(verdict.witness.as_ref().expect("witness on failure")),
        ),
        BalanceStatus::Inconclusive => CriterionReport {
            criterion: name.to_string(),
            verdict: Verdict::Inconclusive,
            witness: None,
            certificate: None,
        },
    })
}

/// Builds the nef divisor of the tilde construction: checks condition
/// (dagger) (the minimum of `Q_f` on nonzero zero-sum vectors is at least
/// `m(f)`), then returns `parasymmetric(tilde(f), d)` with a pass report.
pub fn new_nef_divisor(
    f: &SymmetricFunction,
    d: &[i64],
    assume_cyclically_effective: bool,
    budget: &Budget,
) -> Result<(DivisorExpression, CriterionReport), CriteriaError> {
    let name = "new-nef";
    let m = f.modulus();
    if m < 3 {
        return Err(CriteriaError::BadN(m));
    }
    require_zero_at_zero(f)?;
    if !assume_cyclically_effective {
        let report = cyclic_effectivity(f, budget)?;
        if !report.is_pass() {
            return Err(CriteriaError::ConditionDaggerFails {
                vector: Vec::new(),
                value: "Q_f is not balanced".into(),
                bound: String::new(),
            });
        }
    }
    let q = CyclicQuadraticForm::from_function(f);
    let bound = groupfn::m_of(f);
    match quadforms::min_on_zero_sum_with_vector(&q, budget)? {
        ZeroSumMinimumWithVector::Exact { value, vector } => {
            if value < bound {
                return Err(CriteriaError::ConditionDaggerFails {
                    vector,
                    value: rat::format_rat(&value),
                    bound: rat::format_rat(&bound),
                });
            }
        }
        ZeroSumMinimumWithVector::Inconclusive => {
            let expr = parasymmetric(&groupfn::tilde(f), d)?;
            return Ok((
                expr,
                CriterionReport {
                    criterion: name.to_string(),
                    verdict: Verdict::Inconclusive,
                    witness: None,
                    certificate: None,
                },
            ));
        }
    }
    let expr = parasymmetric(&groupfn::tilde(f), d)?;
    Ok((expr, CriterionReport::pass(name)))
}

/// One boundary representative per 0-dimensional stratum: the tree, a planar
/// ordering, the rewriting weighting for `2 p_D`, and the resulting
/// effective boundary expression.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateEntry {
    pub tree: String,
    pub ordering: Vec<usize>,
    pub weighting: Weighting,
    pub boundary: DivisorExpression,
}

/// Emits one effective-boundary representative of `|2D|` per unrooted binary
/// tree: the cyclic weighting of a planar ordering rewrites `2D` to a
/// boundary expression that is nonnegative and vanishes on the tree's own
/// partitions.
pub fn emit_certificates(
    d: &SymmetricDivisor,
    budget: &Budget,
) -> Result<Vec<CertificateEntry>, CriteriaError> {
    let n = d.n();
    if n > budget.max_certificate_n {
        return Err(CriteriaError::ResourceLimit(format!(
            "certificate emission capped at n <= {}",
            budget.max_certificate_n
        )));
    }
    if !cyclic_semiample_test(d, budget)?.is_pass() {
        return Err(CriteriaError::NotCyclicSemiample);
    }
    let two_p = d.p_function().scale(&rat::int(2));
    let double = d.scale(&rat::int(2)).expression();
    let ones: Vec<i64> = vec![1; n];
    let mut out = Vec::new();
    for tree in all_binary_trees(n) {
        let orderings = tree.planar_orderings()?;
        let sigma = orderings.first().expect("binary trees embed").clone();
        let w = cyclic_weighting(&two_p, &ones, &sigma)?;
        let rewritten = keel_rewrite(&double, &w);
        for k in 1..=n {
            debug_assert!(rewritten.psi(k).is_zero(), "psi residual at {k}");
        }
        out.push(CertificateEntry {
            tree: tree.to_newick(),
            ordering: sigma.labels().to_vec(),
            weighting: w,
            boundary: rewritten,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RayClass {
    CyclicSemiample,
    SecondCriterion,
    Democratic,
    Unclassified,
}

/// Per-`n` classification of the symmetric F-cone's extremal rays, in the
/// order of the experimental table: rays / cyclic semiample / second
/// criterion among the rest / democratic among the rest.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationRow {
    pub n: usize,
    pub ray_count: usize,
    pub cyclic_count: usize,
    pub second_count: usize,
    pub democratic_count: usize,
    pub rays: Vec<(SymmetricDivisor, RayClass)>,
}

impl ClassificationRow {
    pub fn counts(&self) -> (usize, usize, usize, usize) {
        (
            self.ray_count,
            self.cyclic_count,
            self.second_count,
            self.democratic_count,
        )
    }
}

pub fn classify_ray(
    d: &SymmetricDivisor,
    budget: &Budget,
) -> Result<RayClass, CriteriaError> {
    if cyclic_semiample_test(d, budget)?.is_pass() {
        return Ok(RayClass::CyclicSemiample);
    }
    if second_criterion_test(d, None)?.is_pass() {
        return Ok(RayClass::SecondCriterion);
    }
    if democratic_test(d)?.is_pass() {
        return Ok(RayClass::Democratic);
    }
    Ok(RayClass::Unclassified)
}

/// Runs the full classification for one `n`, optionally bounding worker
/// parallelism. Results are aggregated in the canonical (sorted) ray order
/// regardless of the thread count.
pub fn semiample_test(
    n: usize,
    jobs: Option<usize>,
    budget: &Budget,
) -> Result<ClassificationRow, CriteriaError> {
    if n < 8 {
        return Err(CriteriaError::BadN(n));
    }
    let rays = fcone::extreme_rays(&fcone::fcone_inequalities(n))?;
    let divisors: Vec<SymmetricDivisor> = rays
        .iter()
        .map(|coords| {
            SymmetricDivisor::new(n, coords.iter().map(|&c| rat::int(c)).collect())
                .expect("ray has the right dimension")
        })
        .collect();
    let classify_all = || -> Result<Vec<RayClass>, CriteriaError> {
        divisors
            .par_iter()
            .map(|d| classify_ray(d, budget))
            .collect()
    };
    let classes: Vec<RayClass> = match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CriteriaError::ResourceLimit(e.to_string()))?
            .install(classify_all)?,
        None => classify_all()?,
    };
    let count = |c: RayClass| classes.iter().filter(|&&x| x == c).count();
    Ok(ClassificationRow {
        n,
        ray_count: divisors.len(),
        cyclic_count: count(RayClass::CyclicSemiample),
        second_count: count(RayClass::SecondCriterion),
        democratic_count: count(RayClass::Democratic),
        rays: divisors.into_iter().zip(classes).collect(),
    })
}
