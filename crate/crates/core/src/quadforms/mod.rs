//! Cyclic (circulant) quadratic forms, the balancedness hierarchy, exact
//! positive-semidefiniteness, and rigorous minimum enumeration.
//!
//! A cyclic form in `m` variables is `Q(x) = sum q(i-j) x_i x_j` for an even
//! generator `q: Z_m -> Q`. Balancedness (Condition (n): the minimum of `Q`
//! on each hyperplane `sum x = n` is attained at the near-constant vector
//! `v_n`) is decided rigorously whenever the PSD reduction of `Q` is positive
//! semidefinite with radical contained in `{sum x = 0}`: the radical is
//! quotiented away and each residue slice is enumerated exactly.

mod enumerate;
mod linalg;

use crate::budget::{Budget, VisitCounter};
use crate::groupfn::SymmetricFunction;
use crate::rat::{self, Rat};
use enumerate::enumerate_ellipsoid;
use linalg::{
    classify_definiteness, integer_kernel, unimodular_completion, Definiteness, IMat, QMat,
};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadFormError {
    #[error("symmetry violation at index {0}: generator[{0}] != generator[m-{0}]")]
    SymmetryViolation(usize),
    #[error("generator length {found} does not match modulus {modulus}")]
    LengthMismatch { modulus: usize, found: usize },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("unsupported modulus {m} for named form {kind}")]
    UnsupportedModulus { kind: char, m: usize },
    #[error("enumeration budget exceeded after {visited} visits")]
    ResourceLimit { visited: u64 },
}

/// A cyclic quadratic form `Q(x) = sum_{i,j} q(i-j) x_i x_j` on `Z^m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicQuadraticForm {
    modulus: usize,
    generator: Vec<Rat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceStatus {
    Balanced,
    NotBalanced,
    Inconclusive,
}

/// A Condition-(n) violation: an integer vector whose `Q`-value undercuts the
/// near-constant vector of the same coordinate sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceWitness {
    pub vector: Vec<i64>,
    pub sum: i64,
    pub q_value: Rat,
    pub reference_value: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancednessVerdict {
    pub status: BalanceStatus,
    pub witness: Option<BalanceWitness>,
    pub certified_box: Option<u32>,
}

impl BalancednessVerdict {
    fn balanced() -> Self {
        BalancednessVerdict {
            status: BalanceStatus::Balanced,
            witness: None,
            certified_box: None,
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.status == BalanceStatus::Balanced
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeakBalanceVerdict {
    Pass,
    /// Lexicographically least subset whose principal-minor entry sum is
    /// smaller than the leading one of the same size.
    Fail { witness: Vec<usize> },
}

impl WeakBalanceVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, WeakBalanceVerdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroSumMinimum {
    Exact(Rat),
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedForm {
    A,
    B,
    C,
    D,
}

impl CyclicQuadraticForm {
    pub fn new(modulus: usize, generator: Vec<Rat>) -> Result<Self, QuadFormError> {
        if modulus == 0 {
            return Err(QuadFormError::ZeroModulus);
        }
        if generator.len() != modulus {
            return Err(QuadFormError::LengthMismatch {
                modulus,
                found: generator.len(),
            });
        }
        for k in 1..modulus {
            if generator[k] != generator[modulus - k] {
                return Err(QuadFormError::SymmetryViolation(k.min(modulus - k)));
            }
        }
        Ok(CyclicQuadraticForm { modulus, generator })
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn generator(&self) -> &[Rat] {
        &self.generator
    }

    pub fn is_zero(&self) -> bool {
        self.generator.iter().all(Rat::is_zero)
    }

    fn gen_at(&self, k: i64) -> &Rat {
        &self.generator[k.rem_euclid(self.modulus as i64) as usize]
    }

    /// The associated form of a symmetric function:
    /// `q_f(a) = (f(a+1) + f(a-1) - 2 f(a)) / 2`. The generator sums to zero.
    pub fn from_function(f: &SymmetricFunction) -> Self {
        let m = f.modulus();
        let two = rat::int(2);
        let generator = (0..m as i64)
            .map(|a| (f.eval(a + 1) + f.eval(a - 1) - f.eval(a) * &two) / &two)
            .collect();
        CyclicQuadraticForm {
            modulus: m,
            generator,
        }
    }

    /// The circulant sum of squares `sum_k L(x_k, x_{k+1}, ..., x_{k+m-1})^2`.
    pub fn from_linear(m: usize, coeffs: &[Rat]) -> Result<Self, QuadFormError> {
        if m == 0 {
            return Err(QuadFormError::ZeroModulus);
        }
        if coeffs.len() != m {
            return Err(QuadFormError::LengthMismatch {
                modulus: m,
                found: coeffs.len(),
            });
        }
        let mut generator = vec![Rat::zero(); m];
        for s in 0..m {
            for t in 0..m {
                let d = (s + m - t) % m;
                generator[d] += &coeffs[s] * &coeffs[t];
            }
        }
        Ok(CyclicQuadraticForm {
            modulus: m,
            generator,
        })
    }

    /// The worked families: A is the identity form, B, C, D are the circulant
    /// sums of squares of `x_i - x_{i+1} + x_{i+2}`, `x_i + x_{i+k-1}`
    /// (m = 2k, k odd), and `x_i + x_{i+k}` (m = 2k+1).
    pub fn named(kind: NamedForm, m: usize) -> Result<Self, QuadFormError> {
        if m == 0 {
            return Err(QuadFormError::ZeroModulus);
        }
        let mut coeffs = vec![Rat::zero(); m];
        match kind {
            NamedForm::A => {
                let mut generator = vec![Rat::zero(); m];
                generator[0] = Rat::one();
                return CyclicQuadraticForm::new(m, generator);
            }
            NamedForm::B => {
                if m < 3 {
                    return Err(QuadFormError::UnsupportedModulus { kind: 'B', m });
                }
                coeffs[0] = rat::int(1);
                coeffs[1] = rat::int(-1);
                coeffs[2 % m] += rat::int(1);
            }
            NamedForm::C => {
                if m % 2 != 0 || (m / 2) % 2 == 0 {
                    return Err(QuadFormError::UnsupportedModulus { kind: 'C', m });
                }
                let k = m / 2;
                coeffs[0] += rat::int(1);
                coeffs[(k - 1) % m] += rat::int(1);
            }
            NamedForm::D => {
                if m % 2 == 0 {
                    return Err(QuadFormError::UnsupportedModulus { kind: 'D', m });
                }
                let k = m / 2;
                coeffs[0] += rat::int(1);
                coeffs[k % m] += rat::int(1);
            }
        }
        CyclicQuadraticForm::from_linear(m, &coeffs)
    }

    /// `Q(v) = sum q(i-j) v_i v_j`.
    pub fn evaluate(&self, v: &[i64]) -> Rat {
        assert_eq!(v.len(), self.modulus, "vector length mismatch");
        let m = self.modulus;
        let mut acc = Rat::zero();
        for i in 0..m {
            if v[i] == 0 {
                continue;
            }
            for j in 0..m {
                if v[j] == 0 {
                    continue;
                }
                let d = (i + m - j) % m;
                acc += &self.generator[d] * rat::int(v[i] * v[j]);
            }
        }
        acc
    }

    /// The PSD reduction `mQ + (m q(0) - 2 sum_k q(k)) (sum x)^2`, itself
    /// cyclic; `Q` satisfies Condition (n) iff the reduction does.
    pub fn psd_reduction(&self) -> CyclicQuadraticForm {
        let m = rat::int(self.modulus as i64);
        let total: Rat = self.generator.iter().sum();
        let shift = &m * &self.generator[0] - rat::int(2) * total;
        let generator = self
            .generator
            .iter()
            .map(|q| q * &m + &shift)
            .collect();
        CyclicQuadraticForm {
            modulus: self.modulus,
            generator,
        }
    }

    /// Exact positive semidefiniteness over the rationals.
    pub fn is_psd(&self) -> bool {
        classify_definiteness(&self.gram()) != Definiteness::Indefinite
    }

    fn gram(&self) -> QMat {
        let m = self.modulus;
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| self.generator[(i + m - j) % m].clone())
                    .collect()
            })
            .collect()
    }

    fn integer_gram(&self) -> IMat {
        let (ints, _) = rat::scale_to_integers(&self.generator);
        let m = self.modulus;
        (0..m)
            .map(|i| (0..m).map(|j| ints[(i + m - j) % m].clone()).collect())
            .collect()
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let (m, generator) = rat::parse_literal(s).map_err(|e| e.to_string())?;
        CyclicQuadraticForm::new(m, generator).map_err(|e| e.to_string())
    }
}

impl fmt::Display for CyclicQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rat::format_literal(self.modulus, &self.generator))
    }
}

/// The near-constant vector `v_n = ((1+c)_r, (c)_{m-r})` where `n = mc + r`.
pub fn balanced_vector(m: usize, n: i64) -> Vec<i64> {
    let mi = m as i64;
    let c = n.div_euclid(mi);
    let r = n.rem_euclid(mi) as usize;
    let mut v = vec![c; m];
    for slot in v.iter_mut().take(r) {
        *slot = c + 1;
    }
    v
}

/// Weak balancedness: every principal-minor entry sum dominates the leading
/// one of the same size. Enumerates subsets in lexicographic order (as sorted
/// index lists) and reports the first violation.
pub fn is_weakly_balanced(q: &CyclicQuadraticForm) -> WeakBalanceVerdict {
    let m = q.modulus();
    // leading[r] = Q(v_r) = entry sum of the leading principal r x r minor
    let leading: Vec<Rat> = (0..=m)
        .map(|r| q.evaluate(&balanced_vector(m, r as i64)))
        .collect();
    let mut subset: Vec<usize> = Vec::new();
    let mut value = Rat::zero();
    fn dfs(
        q: &CyclicQuadraticForm,
        leading: &[Rat],
        subset: &mut Vec<usize>,
        value: &mut Rat,
        next: usize,
    ) -> Option<Vec<usize>> {
        let m = q.modulus();
        for x in next..m {
            // incremental entry-sum update: adding x contributes
            // q(0) + 2 sum_{y in S} q(x - y)
            let mut delta = q.generator()[0].clone();
            for &y in subset.iter() {
                delta += rat::int(2) * q.gen_at(x as i64 - y as i64);
            }
            subset.push(x);
            *value += &delta;
            if *value < leading[subset.len()] {
                return Some(subset.clone());
            }
            if let Some(w) = dfs(q, leading, subset, value, x + 1) {
                return Some(w);
            }
            subset.pop();
            *value -= &delta;
        }
        None
    }
    match dfs(q, &leading, &mut subset, &mut value, 0) {
        Some(witness) => WeakBalanceVerdict::Fail { witness },
        None => WeakBalanceVerdict::Pass,
    }
}

/// `l`-balancedness: exhaustive scan of the box `{0,...,l}^m`, comparing each
/// point against the near-constant vector of its coordinate sum.
pub fn is_ell_balanced(
    q: &CyclicQuadraticForm,
    level: u32,
    budget: &Budget,
) -> Result<BalancednessVerdict, QuadFormError> {
    let m = q.modulus();
    let points = (level as u128 + 1).checked_pow(m as u32);
    match points {
        Some(p) if p <= budget.max_visits as u128 => {}
        _ => {
            return Err(QuadFormError::ResourceLimit {
                visited: budget.max_visits,
            })
        }
    }
    let mut reference: Vec<Option<Rat>> = vec![None; m * level as usize + 1];
    let mut v = vec![0i64; m];
    let mut violators: Vec<(Vec<i64>, i64, Rat, Rat)> = Vec::new();
    loop {
        let sum: i64 = v.iter().sum();
        let val = q.evaluate(&v);
        let reference_value = reference[sum as usize]
            .get_or_insert_with(|| q.evaluate(&balanced_vector(m, sum)))
            .clone();
        if val < reference_value {
            violators.push((v.clone(), sum, val, reference_value));
        }
        // odometer increment
        let mut i = 0;
        while i < m {
            if v[i] < level as i64 {
                v[i] += 1;
                break;
            }
            v[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
    }
    let mut verdict = pick_witness(q, violators);
    verdict.certified_box = Some(level);
    Ok(verdict)
}

/// Canonical not-balanced verdict from a list of violators, or balanced-status
/// when the list is empty (caller adjusts status/box fields as needed).
fn pick_witness(
    q: &CyclicQuadraticForm,
    violators: Vec<(Vec<i64>, i64, Rat, Rat)>,
) -> BalancednessVerdict {
    if violators.is_empty() {
        return BalancednessVerdict::balanced();
    }
    let min_val = violators
        .iter()
        .map(|(_, _, val, _)| val.clone())
        .min()
        .unwrap();
    let best = violators
        .into_iter()
        .filter(|(_, _, val, _)| *val == min_val)
        .map(|(vec, _, val, _)| (canonicalize_vector(&vec), val))
        .min_by(|a, b| a.0.cmp(&b.0))
        .unwrap();
    let (vector, q_value) = best;
    let sum: i64 = vector.iter().sum();
    let reference_value = q.evaluate(&balanced_vector(q.modulus(), sum));
    BalancednessVerdict {
        status: BalanceStatus::NotBalanced,
        witness: Some(BalanceWitness {
            vector,
            sum,
            q_value,
            reference_value,
        }),
        certified_box: None,
    }
}

/// Sign-normalizes (positive coordinate sum, or first nonzero positive when
/// the sum vanishes) and takes the lexicographically least cyclic shift.
fn canonicalize_vector(v: &[i64]) -> Vec<i64> {
    let sum: i64 = v.iter().sum();
    let flip = match sum.cmp(&0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0),
    };
    let base: Vec<i64> = if flip {
        v.iter().map(|x| -x).collect()
    } else {
        v.to_vec()
    };
    let m = base.len();
    (0..m)
        .map(|s| {
            (0..m)
                .map(|i| base[(i + s) % m])
                .collect::<Vec<i64>>()
        })
        .min()
        .unwrap()
}

/// Rigorous balancedness.
///
/// The PSD reduction is classified exactly. Positive (semi)definite
/// reductions whose radical lies in `{sum x = 0}` are decided by quotienting
/// out the radical and enumerating each residue slice `sum x = r`,
/// `r = 0..m/2`, below the near-constant value (ties pass). Indefinite
/// reductions, or radicals meeting `{sum x != 0}`, fall back to the budget's
/// box level and report `inconclusive` when the box shows no witness.
pub fn is_balanced(
    q: &CyclicQuadraticForm,
    budget: &Budget,
) -> Result<BalancednessVerdict, QuadFormError> {
    let m = q.modulus();
    if m == 1 {
        // a single variable: every slice holds exactly the vector (n) = v_n
        return Ok(BalancednessVerdict::balanced());
    }
    let w = q.psd_reduction();
    if w.is_zero() {
        // Q is a multiple of (sum x)^2: constant on every slice
        return Ok(BalancednessVerdict::balanced());
    }
    match classify_definiteness(&w.gram()) {
        Definiteness::Indefinite => fallback_box(q, budget),
        Definiteness::PositiveDefinite => balanced_via_quotient(q, &w, Vec::new(), budget),
        Definiteness::PositiveSemidefinite => {
            let kernel = integer_kernel(&w.integer_gram());
            let radical_in_zero_sum = kernel
                .iter()
                .all(|row| row.iter().sum::<BigInt>().is_zero());
            if radical_in_zero_sum {
                balanced_via_quotient(q, &w, kernel, budget)
            } else {
                fallback_box(q, budget)
            }
        }
    }
}

fn fallback_box(
    q: &CyclicQuadraticForm,
    budget: &Budget,
) -> Result<BalancednessVerdict, QuadFormError> {
    let mut verdict = is_ell_balanced(q, budget.fallback_level, budget)?;
    if verdict.status == BalanceStatus::Balanced {
        verdict.status = BalanceStatus::Inconclusive;
    }
    Ok(verdict)
}

fn balanced_via_quotient(
    q: &CyclicQuadraticForm,
    w: &CyclicQuadraticForm,
    kernel: IMat,
    budget: &Budget,
) -> Result<BalancednessVerdict, QuadFormError> {
    let m = q.modulus();
    let k = kernel.len();
    let d = m - k;
    let gram_w = w.gram();
    // basis of Z^m whose first k rows span the radical lattice
    let (t, _tinv) = if k == 0 {
        (identity_imat(m), identity_imat(m))
    } else {
        unimodular_completion(&kernel, m)
    };
    let quot: Vec<&Vec<BigInt>> = t[k..].iter().collect();
    // reduced Gram and reduced coordinate-sum functional
    let mut gram_r = vec![vec![Rat::zero(); d]; d];
    for a in 0..d {
        for b in 0..d {
            let mut acc = Rat::zero();
            for i in 0..m {
                if quot[a][i].is_zero() {
                    continue;
                }
                for j in 0..m {
                    if quot[b][j].is_zero() {
                        continue;
                    }
                    acc += &gram_w[i][j] * Rat::from_integer(&quot[a][i] * &quot[b][j]);
                }
            }
            gram_r[a][b] = acc;
        }
    }
    let s_bar: Vec<BigInt> = quot
        .iter()
        .map(|row| row.iter().sum::<BigInt>())
        .collect();
    // particular solution of s_bar . y = 1 (the coordinate sum is surjective)
    let y_unit = solve_gcd_one(&s_bar);
    // basis of the zero-sum sublattice of the quotient
    let s_col: IMat = s_bar.iter().map(|s| vec![s.clone()]).collect();
    let zero_basis = integer_kernel(&s_col);
    let d_slice = zero_basis.len();
    debug_assert_eq!(d_slice, d - 1);

    let counter = VisitCounter::new(budget.max_visits);
    let mut violators: Vec<(Vec<i64>, i64, Rat, Rat)> = Vec::new();
    for r in 0..=(m / 2) as i64 {
        let v_r = balanced_vector(m, r);
        let bound_w = w.evaluate(&v_r);
        // particular point of the slice in quotient coordinates
        let y0: Vec<BigInt> = y_unit.iter().map(|y| y * r).collect();
        // value and linear data of y -> (y0 + z B) G (y0 + z B)^T
        if d_slice == 0 {
            let val = eval_gram_big(&gram_r, &y0);
            debug_assert!(val >= bound_w);
            continue;
        }
        // G'' = B G B^T, rhs_a = (B G y0)_a
        let mut gram_z = vec![vec![Rat::zero(); d_slice]; d_slice];
        for a in 0..d_slice {
            for b in 0..d_slice {
                let mut acc = Rat::zero();
                for i in 0..d {
                    for j in 0..d {
                        acc += &gram_r[i][j]
                            * Rat::from_integer(&zero_basis[a][i] * &zero_basis[b][j]);
                    }
                }
                gram_z[a][b] = acc;
            }
        }
        let mut rhs = vec![Rat::zero(); d_slice];
        for a in 0..d_slice {
            let mut acc = Rat::zero();
            for i in 0..d {
                for j in 0..d {
                    acc += &gram_r[i][j]
                        * Rat::from_integer(&zero_basis[a][i] * &y0[j]);
                }
            }
            rhs[a] = acc;
        }
        // complete the square: value(z) = (z + c) G'' (z + c)^T + const
        let c = solve_linear(&gram_z, &rhs);
        let mut cross = Rat::zero();
        for a in 0..d_slice {
            cross += &c[a] * &rhs[a];
        }
        let constant = eval_gram_big(&gram_r, &y0) - cross;
        let slice_bound = &bound_w - &constant;
        debug_assert!(
            !slice_bound.is_negative(),
            "v_r lies in its own slice, bound cannot be negative"
        );
        let center: Vec<Rat> = c.iter().map(|x| -x.clone()).collect();
        let mut slice_violators: Vec<(Vec<i64>, Rat)> = Vec::new();
        let complete = enumerate_ellipsoid(
            &gram_z,
            &center,
            &slice_bound,
            &counter,
            &mut |z, val| {
                let w_value = val + &constant;
                if w_value < bound_w {
                    // lift: y = y0 + z B, then x = y . quot
                    let mut y = y0.clone();
                    for (a, &za) in z.iter().enumerate() {
                        for i in 0..d {
                            y[i] += &zero_basis[a][i] * za;
                        }
                    }
                    let mut x = vec![BigInt::zero(); m];
                    for (i, yi) in y.iter().enumerate() {
                        for (j, xj) in x.iter_mut().enumerate() {
                            *xj += yi * &quot[i][j];
                        }
                    }
                    let xi: Vec<i64> = x
                        .iter()
                        .map(|v| i64::try_from(v).expect("witness coordinate overflow"))
                        .collect();
                    slice_violators.push((xi, w_value));
                }
            },
        );
        if !complete {
            return Err(QuadFormError::ResourceLimit {
                visited: counter.used(),
            });
        }
        for (x, _w_value) in slice_violators {
            debug_assert_eq!(x.iter().sum::<i64>(), r);
            let q_value = q.evaluate(&x);
            let reference = q.evaluate(&v_r);
            debug_assert!(q_value < reference);
            violators.push((x, r, q_value, reference));
        }
    }
    Ok(pick_witness(q, violators))
}

fn identity_imat(m: usize) -> IMat {
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn eval_gram_big(gram: &QMat, v: &[BigInt]) -> Rat {
    let n = gram.len();
    let mut acc = Rat::zero();
    for i in 0..n {
        for j in 0..n {
            acc += &gram[i][j] * Rat::from_integer(&v[i] * &v[j]);
        }
    }
    acc
}

/// Solves `s . y = 1` for an integer vector with `gcd(s) = 1`.
fn solve_gcd_one(s: &[BigInt]) -> Vec<BigInt> {
    let mut y = vec![BigInt::zero(); s.len()];
    let mut g = BigInt::zero();
    for (i, si) in s.iter().enumerate() {
        if si.is_zero() {
            continue;
        }
        if g.is_zero() {
            g = si.abs();
            y[i] = if si.is_negative() {
                BigInt::from(-1)
            } else {
                BigInt::one()
            };
            continue;
        }
        let (gg, u, v) = egcd(&g, si);
        for yj in y.iter_mut() {
            *yj *= &u;
        }
        y[i] = v;
        g = gg;
    }
    assert!(g.is_one(), "coordinate-sum functional is not surjective");
    y
}

/// Extended gcd: returns (g, u, v) with u*a + v*b = g >= 0.
fn egcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if b.is_zero() {
        if a.is_negative() {
            return (-a.clone(), BigInt::from(-1), BigInt::zero());
        }
        return (a.clone(), BigInt::one(), BigInt::zero());
    }
    let (q, r) = num::Integer::div_rem(a, b);
    let (g, u, v) = egcd(b, &r);
    let w = &u - &v * q;
    (g, v, w)
}

/// Solves a positive definite rational system `A x = b` by Gaussian
/// elimination with exact arithmetic.
fn solve_linear(a: &QMat, b: &[Rat]) -> Vec<Rat> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .expect("singular system");
        m.swap(col, piv);
        let pv = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &pv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let delta = &f * &m[col][c];
                    m[r][c] = &m[r][c] - delta;
                }
            }
        }
    }
    (0..n).map(|i| m[i][n].clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroSumMinimumWithVector {
    Exact { value: Rat, vector: Vec<i64> },
    Inconclusive,
}

/// Exact minimum of `Q` over nonzero integer vectors with coordinate sum 0,
/// when the restriction to the zero-sum lattice is positive definite
/// (enumeration below a seed value) or positive semidefinite (minimum 0).
pub fn min_on_zero_sum(
    q: &CyclicQuadraticForm,
    budget: &Budget,
) -> Result<ZeroSumMinimum, QuadFormError> {
    Ok(match min_on_zero_sum_with_vector(q, budget)? {
        ZeroSumMinimumWithVector::Exact { value, .. } => ZeroSumMinimum::Exact(value),
        ZeroSumMinimumWithVector::Inconclusive => ZeroSumMinimum::Inconclusive,
    })
}

/// As `min_on_zero_sum`, also reporting a minimizing vector.
pub fn min_on_zero_sum_with_vector(
    q: &CyclicQuadraticForm,
    budget: &Budget,
) -> Result<ZeroSumMinimumWithVector, QuadFormError> {
    let m = q.modulus();
    if m < 2 {
        return Ok(ZeroSumMinimumWithVector::Inconclusive);
    }
    // basis e_i - e_{m-1}, i = 0..m-1
    let d = m - 1;
    let gram_full = q.gram();
    let mut gram = vec![vec![Rat::zero(); d]; d];
    for a in 0..d {
        for b in 0..d {
            // (e_a - e_{m-1}) G (e_b - e_{m-1})
            gram[a][b] = &gram_full[a][b] - &gram_full[a][m - 1] - &gram_full[m - 1][b]
                + &gram_full[m - 1][m - 1];
        }
    }
    let lift = |z: &[i64]| -> Vec<i64> {
        let mut x: Vec<i64> = z.to_vec();
        x.push(-z.iter().sum::<i64>());
        x
    };
    match classify_definiteness(&gram) {
        Definiteness::Indefinite => Ok(ZeroSumMinimumWithVector::Inconclusive),
        Definiteness::PositiveSemidefinite => {
            // a nonzero radical vector of the restriction attains 0
            let (ints, _) = rat::scale_to_integers(
                &gram.iter().flatten().cloned().collect::<Vec<Rat>>(),
            );
            let imat: linalg::IMat = ints.chunks(d).map(|c| c.to_vec()).collect();
            let kernel = integer_kernel(&imat);
            let z: Vec<i64> = kernel
                .first()
                .expect("PSD with kernel has a radical vector")
                .iter()
                .map(|b| i64::try_from(b).expect("radical vector overflow"))
                .collect();
            Ok(ZeroSumMinimumWithVector::Exact {
                value: Rat::zero(),
                vector: lift(&z),
            })
        }
        Definiteness::PositiveDefinite => {
            // seed: the best difference vector e_i - e_j
            let (seed_k, seed) = (1..m)
                .map(|k| (k, (&q.generator()[0] - &q.generator()[k]) * rat::int(2)))
                .min_by(|a, b| a.1.cmp(&b.1))
                .unwrap();
            let counter = VisitCounter::new(budget.max_visits);
            let center = vec![Rat::zero(); d];
            let mut best: Option<(Rat, Vec<i64>)> = None;
            let complete =
                enumerate_ellipsoid(&gram, &center, &seed, &counter, &mut |z, val| {
                    if z.iter().any(|&zi| zi != 0)
                        && best.as_ref().is_none_or(|(b, _)| val < b)
                    {
                        best = Some((val.clone(), z.to_vec()));
                    }
                });
            if !complete {
                return Err(QuadFormError::ResourceLimit {
                    visited: counter.used(),
                });
            }
            Ok(match best {
                Some((value, z)) => ZeroSumMinimumWithVector::Exact {
                    value,
                    vector: lift(&z),
                },
                None => {
                    // unreachable: the seed vector lies in its own ellipsoid
                    let mut x = vec![0i64; m];
                    x[0] = 1;
                    x[seed_k] = -1;
                    ZeroSumMinimumWithVector::Exact {
                        value: seed,
                        vector: x,
                    }
                }
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupfn::{standard_function, StandardKind};
    use crate::rat::{int, rat};

    fn form(m: usize, gen: &[i64]) -> CyclicQuadraticForm {
        CyclicQuadraticForm::new(m, gen.iter().map(|&v| int(v)).collect()).unwrap()
    }

    #[test]
    fn constructor_and_symmetry() {
        assert!(CyclicQuadraticForm::new(4, vec![int(1), int(0), int(2), int(0)]).is_ok());
        assert!(matches!(
            CyclicQuadraticForm::new(4, vec![int(1), int(1), int(2), int(0)]),
            Err(QuadFormError::SymmetryViolation(1))
        ));
    }

    #[test]
    fn q_from_function_examples() {
        let a5 = standard_function(StandardKind::A, 5).unwrap();
        let q = CyclicQuadraticForm::from_function(&a5);
        assert_eq!(q.generator(), form(5, &[4, -1, -1, -1, -1]).generator());
        let zero = crate::groupfn::SymmetricFunction::zero(4);
        assert!(CyclicQuadraticForm::from_function(&zero).is_zero());
        let e5 = standard_function(StandardKind::E, 5).unwrap();
        let qe = CyclicQuadraticForm::from_function(&e5);
        let expected = vec![int(-1), rat(3, 2), int(-1), int(-1), rat(3, 2)];
        assert_eq!(qe.generator(), &expected[..]);
        let total: Rat = qe.generator().iter().sum();
        assert!(total.is_zero());
    }

    #[test]
    fn evaluate_examples() {
        let q3 = CyclicQuadraticForm::named(NamedForm::A, 3).unwrap();
        assert_eq!(q3.evaluate(&[1, 1, 1]), int(3));
        let a5 = standard_function(StandardKind::A, 5).unwrap();
        let q = CyclicQuadraticForm::from_function(&a5);
        assert_eq!(q.evaluate(&[1, 1, 0, 0, 0]), int(6));
        assert_eq!(q.evaluate(&[1, -1, 0, 0, 0]), int(10));
    }

    #[test]
    fn balanced_vector_examples() {
        assert_eq!(balanced_vector(4, 6), vec![2, 2, 1, 1]);
        assert_eq!(balanced_vector(5, 0), vec![0; 5]);
        assert_eq!(balanced_vector(3, -1), vec![0, 0, -1]);
    }

    #[test]
    fn named_form_generators() {
        assert_eq!(
            CyclicQuadraticForm::named(NamedForm::A, 4).unwrap().generator(),
            form(4, &[1, 0, 0, 0]).generator()
        );
        // expansion of sum (x_i - x_{i+1} + x_{i+2})^2 for m = 6
        assert_eq!(
            CyclicQuadraticForm::named(NamedForm::B, 6).unwrap().generator(),
            form(6, &[3, -2, 1, 0, 1, -2]).generator()
        );
        let d5 = CyclicQuadraticForm::named(NamedForm::D, 5).unwrap();
        assert_eq!(d5.generator(), form(5, &[2, 0, 1, 1, 0]).generator());
        assert!(CyclicQuadraticForm::named(NamedForm::C, 8).is_err());
        assert!(CyclicQuadraticForm::named(NamedForm::D, 6).is_err());
        // linear-form route agrees with the named constructor
        let mut l = vec![int(0); 7];
        l[0] = int(1);
        l[1] = int(-1);
        l[2] = int(1);
        assert_eq!(
            CyclicQuadraticForm::from_linear(7, &l).unwrap(),
            CyclicQuadraticForm::named(NamedForm::B, 7).unwrap()
        );
    }

    #[test]
    fn psd_reduction_examples() {
        let a5 = standard_function(StandardKind::A, 5).unwrap();
        let q = CyclicQuadraticForm::from_function(&a5);
        let w = q.psd_reduction();
        // 25 sum x^2 + 15 (sum x)^2 has generator 25*[1,0,..] + 15*ones
        assert_eq!(w.generator(), form(5, &[40, 15, 15, 15, 15]).generator());
        let zero = form(3, &[0, 0, 0]);
        assert!(zero.psd_reduction().is_zero());
        let sq = CyclicQuadraticForm::named(NamedForm::A, 3).unwrap();
        assert_eq!(
            sq.psd_reduction().generator(),
            form(3, &[4, 1, 1]).generator()
        );
    }

    #[test]
    fn is_psd_examples() {
        assert!(CyclicQuadraticForm::named(NamedForm::A, 4).unwrap().is_psd());
        let a5 = standard_function(StandardKind::A, 5).unwrap();
        assert!(CyclicQuadraticForm::from_function(&a5).is_psd());
        // B on m = 6 is PSD with a nontrivial kernel
        assert!(CyclicQuadraticForm::named(NamedForm::B, 6).unwrap().is_psd());
        // and an indefinite circulant is caught
        assert!(!form(3, &[0, 1, 1]).is_psd());
    }

    #[test]
    fn weakly_balanced_examples() {
        for m in 3..=10 {
            let am = standard_function(StandardKind::A, m).unwrap();
            assert!(is_weakly_balanced(&CyclicQuadraticForm::from_function(&am)).is_pass());
        }
        assert!(is_weakly_balanced(&form(4, &[0, 0, 0, 0])).is_pass());
        // p_D for Delta_2 + Delta_3 + 2 Delta_4 on n = 9 fails; the least
        // violating subset in pure lexicographic order is the complement
        // translate of the {0,3,6} pattern
        let p = crate::groupfn::p_from_coefficients(9, &[int(1), int(1), int(2)]);
        let q = CyclicQuadraticForm::from_function(&p);
        match is_weakly_balanced(&q) {
            WeakBalanceVerdict::Fail { witness } => {
                assert_eq!(witness, vec![0, 1, 3, 4, 6, 7]);
                let chi: Vec<i64> = (0..9)
                    .map(|i| i64::from(witness.contains(&i)))
                    .collect();
                assert!(q.evaluate(&chi) < q.evaluate(&balanced_vector(9, 6)));
            }
            WeakBalanceVerdict::Pass => panic!("expected failure"),
        }
    }

    #[test]
    fn ell_balanced_examples() {
        let budget = Budget::default();
        let sq4 = CyclicQuadraticForm::named(NamedForm::A, 4).unwrap();
        assert!(is_ell_balanced(&sq4, 1, &budget).unwrap().is_balanced());
        let b7 = CyclicQuadraticForm::named(NamedForm::B, 7).unwrap();
        let v = is_ell_balanced(&b7, 1, &budget).unwrap();
        assert!(v.is_balanced());
        assert_eq!(v.certified_box, Some(1));
        let a5 = standard_function(StandardKind::A, 5).unwrap();
        let q = CyclicQuadraticForm::from_function(&a5);
        assert!(is_ell_balanced(&q, 2, &budget).unwrap().is_balanced());
    }

    #[test]
    fn balanced_a_forms() {
        let budget = Budget::default();
        for m in 2..=8 {
            let am = standard_function(StandardKind::A, m).unwrap();
            let q = CyclicQuadraticForm::from_function(&am);
            let verdict = is_balanced(&q, &budget).unwrap();
            assert!(verdict.is_balanced(), "Q_A_{m} must be balanced");
        }
    }

    #[test]
    fn balanced_b_form_witnesses() {
        let budget = Budget::default();
        // m = 7: witness (-1,-1,0,1,1,1,0) with value 1 against v_1 value 3
        let b7 = CyclicQuadraticForm::named(NamedForm::B, 7).unwrap();
        let verdict = is_balanced(&b7, &budget).unwrap();
        assert_eq!(verdict.status, BalanceStatus::NotBalanced);
        let w = verdict.witness.unwrap();
        assert_eq!(w.vector, vec![-1, -1, 0, 1, 1, 1, 0]);
        assert_eq!(w.q_value, int(1));
        assert_eq!(w.reference_value, int(3));
        assert_eq!(w.sum, 1);
        // m = 5: canonical witness from the second period pattern
        let b5 = CyclicQuadraticForm::named(NamedForm::B, 5).unwrap();
        let verdict = is_balanced(&b5, &budget).unwrap();
        let w = verdict.witness.unwrap();
        assert_eq!(w.q_value, int(1));
        assert_eq!(w.reference_value, int(3));
        assert_eq!(w.vector, vec![-1, 0, 1, 1, 0]);
    }

    #[test]
    fn balanced_b_form_psd_kernel_cases() {
        let budget = Budget::default();
        for m in [6usize, 12] {
            let b = CyclicQuadraticForm::named(NamedForm::B, m).unwrap();
            let verdict = is_balanced(&b, &budget).unwrap();
            assert!(verdict.is_balanced(), "B_{m} must be balanced (PSD kernel)");
        }
    }

    #[test]
    fn zero_form_is_balanced() {
        let budget = Budget::default();
        let zero = form(4, &[0, 0, 0, 0]);
        assert!(is_balanced(&zero, &budget).unwrap().is_balanced());
    }

    #[test]
    fn min_on_zero_sum_examples() {
        let budget = Budget::default();
        for (m, expect) in [(5usize, 10i64), (3, 6)] {
            let am = standard_function(StandardKind::A, m).unwrap();
            let q = CyclicQuadraticForm::from_function(&am);
            assert_eq!(
                min_on_zero_sum(&q, &budget).unwrap(),
                ZeroSumMinimum::Exact(int(expect))
            );
        }
        let zero = form(4, &[0, 0, 0, 0]);
        assert_eq!(
            min_on_zero_sum(&zero, &budget).unwrap(),
            ZeroSumMinimum::Exact(int(0))
        );
    }

    #[test]
    fn shift_identity_random() {
        // Q(v + c 1) - Q(v) = 2c (sum q) (sum v) + Q(c 1)
        let q = form(5, &[3, -1, 2, 2, -1]);
        let total: Rat = q.generator().iter().sum();
        let cases = [
            (vec![1i64, -2, 0, 3, 1], 2i64),
            (vec![0, 0, 1, 0, 0], -1),
            (vec![4, 1, 1, -3, 2], 3),
        ];
        for (v, c) in cases {
            let shifted: Vec<i64> = v.iter().map(|x| x + c).collect();
            let lhs = q.evaluate(&shifted) - q.evaluate(&v);
            let ones = vec![c; 5];
            let sum_v: i64 = v.iter().sum();
            let rhs = int(2 * c) * &total * int(sum_v) + q.evaluate(&ones);
            assert_eq!(lhs, rhs);
        }
    }
}
