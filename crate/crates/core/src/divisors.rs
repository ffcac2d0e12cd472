//! Divisor classes on the moduli of stable n-pointed rational curves in
//! psi/boundary coordinates: parasymmetric divisors, F-curve intersections,
//! Keel-relation rewriting, boundary restriction, and the symmetric
//! `Delta_r` basis.

use crate::budget::Budget;
use crate::groupfn::{self, SymmetricFunction};
use crate::rat::{self, Rat};
use crate::weightings::Weighting;
use num::{Signed, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DivisorError {
    #[error("tuple sums to {sum} != 0 (mod {modulus})")]
    SumNotZero { sum: i64, modulus: usize },
    #[error("n = {0} is out of range for this operation")]
    BadN(usize),
    #[error("boundary keys require both sides of size >= 2")]
    DegeneratePartition,
    #[error("expression is not S_n-symmetric: {0}")]
    NotSymmetric(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

/// An element of the Picard group tensored with Q, written as
/// `sum psi[k] psi_k + sum boundary[I,J] Delta_{I,J}`.
///
/// Boundary keys are canonical: the sorted side containing the label `n`,
/// both sides of size at least 2. Missing keys mean coefficient zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorExpression {
    n: usize,
    psi: Vec<Rat>,
    boundary: BTreeMap<Vec<usize>, Rat>,
}

impl Serialize for DivisorExpression {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        // {"boundary": [[[1,2,9], "-2"], ...], "n": 9, "psi": ["2", ...]}
        let mut map = serializer.serialize_map(Some(3))?;
        let boundary: Vec<(&Vec<usize>, String)> = self
            .boundary
            .iter()
            .map(|(k, v)| (k, rat::format_rat(v)))
            .collect();
        map.serialize_entry("boundary", &boundary)?;
        map.serialize_entry("n", &self.n)?;
        let psi: Vec<String> = self.psi.iter().map(rat::format_rat).collect();
        map.serialize_entry("psi", &psi)?;
        map.end()
    }
}

impl DivisorExpression {
    pub fn zero(n: usize) -> Self {
        DivisorExpression {
            n,
            psi: vec![Rat::zero(); n],
            boundary: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn psi(&self, k: usize) -> &Rat {
        &self.psi[k - 1]
    }

    pub fn set_psi(&mut self, k: usize, v: Rat) {
        self.psi[k - 1] = v;
    }

    /// Canonical key of the partition containing the given side: the sorted
    /// side that contains label `n`.
    pub fn canonical_key(&self, side: &[usize]) -> Result<Vec<usize>, DivisorError> {
        let side_set: BTreeSet<usize> = side.iter().copied().collect();
        if side_set.len() < 2 || self.n - side_set.len() < 2 {
            return Err(DivisorError::DegeneratePartition);
        }
        let key: Vec<usize> = if side_set.contains(&self.n) {
            side_set.into_iter().collect()
        } else {
            (1..=self.n).filter(|k| !side_set.contains(k)).collect()
        };
        Ok(key)
    }

    pub fn boundary_coefficient(&self, side: &[usize]) -> Result<Rat, DivisorError> {
        let key = self.canonical_key(side)?;
        Ok(self.boundary.get(&key).cloned().unwrap_or_else(Rat::zero))
    }

    pub fn set_boundary(&mut self, side: &[usize], v: Rat) -> Result<(), DivisorError> {
        let key = self.canonical_key(side)?;
        if v.is_zero() {
            self.boundary.remove(&key);
        } else {
            self.boundary.insert(key, v);
        }
        Ok(())
    }

    pub fn boundary_entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Rat)> {
        self.boundary.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.psi.iter().all(Rat::is_zero) && self.boundary.values().all(Rat::is_zero)
    }

    /// All canonical partition keys for this `n` (sides containing `n`, both
    /// sides of size >= 2).
    pub fn all_keys(n: usize) -> Vec<Vec<usize>> {
        let mut keys = Vec::new();
        let full = (1u32 << (n - 1)) - 1; // subsets of 1..n-1 joining n
        for rest in 0..=full {
            let size = rest.count_ones() as usize + 1;
            if size < 2 || n - size < 2 {
                continue;
            }
            let mut key: Vec<usize> = (0..n - 1)
                .filter(|i| rest & (1 << i) != 0)
                .map(|i| i + 1)
                .collect();
            key.push(n);
            keys.push(key);
        }
        keys.sort();
        keys
    }
}

fn check_tuple(f: &SymmetricFunction, d: &[i64]) -> Result<(), DivisorError> {
    let m = f.modulus();
    let sum: i64 = d.iter().sum();
    if sum.rem_euclid(m as i64) != 0 {
        return Err(DivisorError::SumNotZero { sum, modulus: m });
    }
    Ok(())
}

/// The parasymmetric divisor: `sum f(d_i) psi_i - sum f(d(I)) Delta_{I,J}`.
pub fn parasymmetric(
    f: &SymmetricFunction,
    d: &[i64],
) -> Result<DivisorExpression, DivisorError> {
    let n = d.len();
    if !(4..=20).contains(&n) {
        return Err(DivisorError::BadN(n));
    }
    check_tuple(f, d)?;
    let mut expr = DivisorExpression::zero(n);
    for (i, &di) in d.iter().enumerate() {
        expr.psi[i] = f.eval(di).clone();
    }
    for key in DivisorExpression::all_keys(n) {
        let dsum: i64 = key.iter().map(|&k| d[k - 1]).sum();
        let coeff = -f.eval(dsum).clone();
        if !coeff.is_zero() {
            expr.boundary.insert(key, coeff);
        }
    }
    Ok(expr)
}

/// F-curve intersection of the parasymmetric divisor with block sums
/// `(A, B, C)` (and `D = -A-B-C`):
/// `f(A)+f(B)+f(C)+f(A+B+C) - f(A+B) - f(A+C) - f(B+C)`.
pub fn fcurve_intersection(f: &SymmetricFunction, sums: (i64, i64, i64)) -> Rat {
    let (a, b, c) = sums;
    let m = f.modulus();
    groupfn::fnef_deficit(
        f,
        a.rem_euclid(m as i64) as usize,
        b.rem_euclid(m as i64) as usize,
        c.rem_euclid(m as i64) as usize,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FnefDivisorVerdict {
    Pass,
    /// Lexicographically least achievable sorted triple of block sums with
    /// negative F-value.
    Fail { witness: (usize, usize, usize) },
}

impl FnefDivisorVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, FnefDivisorVerdict::Pass)
    }
}

/// Decides F-nefness of the parasymmetric divisor for the given tuple: every
/// partition of `[n]` into 4 nonempty blocks must meet the divisor
/// nonnegatively. Achievable block-sum triples come from integer
/// compositions (constant tuples) or a subset-sum dynamic program.
pub fn is_fnef_divisor(
    f: &SymmetricFunction,
    d: &[i64],
    budget: &Budget,
) -> Result<FnefDivisorVerdict, DivisorError> {
    let n = d.len();
    if n < 4 {
        return Ok(FnefDivisorVerdict::Pass);
    }
    check_tuple(f, d)?;
    let m = f.modulus();
    let mut achievable: BTreeSet<[usize; 4]> = BTreeSet::new();
    if d.iter().all(|&x| x == d[0]) {
        if n > 64 {
            return Err(DivisorError::ResourceLimit(format!(
                "constant-tuple scan capped at n <= 64, got {n}"
            )));
        }
        for a in 1..=n / 4 {
            for b in a..=(n - a) / 3 {
                for c in b..=(n - a - b) / 2 {
                    let dd = n - a - b - c;
                    if dd < c {
                        continue;
                    }
                    let mut sums = [
                        (a as i64 * d[0]).rem_euclid(m as i64) as usize,
                        (b as i64 * d[0]).rem_euclid(m as i64) as usize,
                        (c as i64 * d[0]).rem_euclid(m as i64) as usize,
                        (dd as i64 * d[0]).rem_euclid(m as i64) as usize,
                    ];
                    sums.sort_unstable();
                    achievable.insert(sums);
                }
            }
        }
    } else {
        // DP over elements: blocks fill in first-occurrence order; state is
        // (sums of blocks 1..3 mod m, number of open blocks)
        let state_estimate = (m as u64).pow(3) * 5 * n as u64;
        if state_estimate > budget.max_visits {
            return Err(DivisorError::ResourceLimit(format!(
                "F-nef DP estimate {state_estimate} exceeds the budget"
            )));
        }
        let mi = m as i64;
        let mut states: BTreeSet<(usize, usize, usize, usize)> =
            BTreeSet::from([(0, 0, 0, 0)]);
        for &di in d {
            let mut next = BTreeSet::new();
            for &(s1, s2, s3, k) in &states {
                for blk in 0..(k + 1).min(4) {
                    let mut s = [s1, s2, s3];
                    if blk < 3 {
                        s[blk] = (s[blk] as i64 + di).rem_euclid(mi) as usize;
                    }
                    next.insert((s[0], s[1], s[2], k.max(blk + 1)));
                }
            }
            states = next;
        }
        for (s1, s2, s3, k) in states {
            if k == 4 {
                let s4 = (-(s1 as i64 + s2 as i64 + s3 as i64)).rem_euclid(mi) as usize;
                let mut sums = [s1, s2, s3, s4];
                sums.sort_unstable();
                achievable.insert(sums);
            }
        }
    }
    for sums in achievable {
        let (a, b, c) = (sums[0], sums[1], sums[2]);
        if groupfn::fnef_deficit(f, a, b, c).is_negative() {
            return Ok(FnefDivisorVerdict::Fail { witness: (a, b, c) });
        }
    }
    Ok(FnefDivisorVerdict::Pass)
}

/// Applies each Keel relation `psi_i + psi_j = sum Delta_{I,J}` exactly
/// `w(i~j)` times: psi coefficients drop by vertex flows, boundary
/// coefficients rise by cut flows. The divisor class is unchanged.
pub fn keel_rewrite(expr: &DivisorExpression, w: &Weighting) -> DivisorExpression {
    let n = expr.n;
    assert_eq!(n, w.n(), "weighting size mismatch");
    let mut out = DivisorExpression::zero(n);
    for k in 1..=n {
        out.psi[k - 1] = expr.psi(k) - w.vertex_flow(k);
    }
    for key in DivisorExpression::all_keys(n) {
        let old = expr
            .boundary
            .get(&key)
            .cloned()
            .unwrap_or_else(Rat::zero);
        let flow = w.partition_flow(&key);
        let coeff = old + flow;
        if !coeff.is_zero() {
            out.boundary.insert(key, coeff);
        }
    }
    out
}

/// One factor of the restriction of a parasymmetric divisor to a boundary
/// divisor: the tuple values on one side plus the attaching-point value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryFactor {
    pub side_values: Vec<u64>,
    pub attach: u64,
}

/// Restriction to `Delta_{I,J}`: the two factors carry the same function,
/// the side values, and the complementary sum as the attaching label.
pub fn restrict_to_boundary(
    f: &SymmetricFunction,
    d: &[i64],
    side: &[usize],
) -> Result<(BoundaryFactor, BoundaryFactor), DivisorError> {
    check_tuple(f, d)?;
    let n = d.len();
    let side_set: BTreeSet<usize> = side.iter().copied().collect();
    if side_set.is_empty() || side_set.len() == n {
        return Err(DivisorError::DegeneratePartition);
    }
    let m = f.modulus() as i64;
    let reduce = |x: i64| x.rem_euclid(m) as u64;
    let side_values: Vec<u64> = side_set.iter().map(|&k| reduce(d[k - 1])).collect();
    let other_values: Vec<u64> = (1..=n)
        .filter(|k| !side_set.contains(k))
        .map(|k| reduce(d[k - 1]))
        .collect();
    let side_sum: i64 = side_set.iter().map(|&k| d[k - 1]).sum();
    let other_sum: i64 = (1..=n)
        .filter(|k| !side_set.contains(k))
        .map(|k| d[k - 1])
        .sum();
    Ok((
        BoundaryFactor {
            side_values,
            attach: reduce(other_sum),
        },
        BoundaryFactor {
            side_values: other_values,
            attach: reduce(side_sum),
        },
    ))
}

/// A symmetric divisor `sum_{r=2}^{n/2} a_r Delta_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricDivisor {
    n: usize,
    a: Vec<Rat>,
}

impl Serialize for SymmetricDivisor {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(2))?;
        let a: Vec<String> = self.a.iter().map(rat::format_rat).collect();
        map.serialize_entry("a", &a)?;
        map.serialize_entry("n", &self.n)?;
        map.end()
    }
}

impl SymmetricDivisor {
    pub fn new(n: usize, a: Vec<Rat>) -> Result<Self, DivisorError> {
        if n < 4 {
            return Err(DivisorError::BadN(n));
        }
        if a.len() != n / 2 - 1 {
            return Err(DivisorError::BadN(n));
        }
        Ok(SymmetricDivisor { n, a })
    }

    pub fn zero(n: usize) -> Self {
        SymmetricDivisor {
            n,
            a: vec![Rat::zero(); n / 2 - 1],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[Rat] {
        &self.a
    }

    /// `a_j` with the conventions `a_0 = a_1 = 0`, `a_j = a_{n-j}`.
    pub fn coefficient(&self, j: i64) -> Rat {
        let n = self.n as i64;
        let r = j.rem_euclid(n);
        let r = r.min(n - r) as usize;
        if r < 2 {
            Rat::zero()
        } else {
            self.a[r - 2].clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Rat::is_zero)
    }

    pub fn scale(&self, c: &Rat) -> SymmetricDivisor {
        SymmetricDivisor {
            n: self.n,
            a: self.a.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &SymmetricDivisor) -> SymmetricDivisor {
        assert_eq!(self.n, other.n);
        SymmetricDivisor {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    /// The function `p_D` on `Z_n`.
    pub fn p_function(&self) -> SymmetricFunction {
        groupfn::p_from_coefficients(self.n, &self.a)
    }

    /// The associated F-nef function `f_D`.
    pub fn associated_fnef_function(&self) -> SymmetricFunction {
        groupfn::associated_fnef_function(self.n, &self.a)
    }

    pub fn lambda_fnef(&self) -> Rat {
        groupfn::lambda_fnef(self.n, &self.a)
    }

    /// The dense psi/boundary expression `sum_r a_r Delta_r`.
    pub fn expression(&self) -> DivisorExpression {
        let mut expr = DivisorExpression::zero(self.n);
        for key in DivisorExpression::all_keys(self.n) {
            let coeff = self.coefficient(key.len() as i64);
            if !coeff.is_zero() {
                expr.boundary.insert(key, coeff);
            }
        }
        expr
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let (n, a) = crate::rat::parse_literal_header(s).map_err(|e| e.to_string())?;
        SymmetricDivisor::new(n, a).map_err(|e| e.to_string())
    }
}

impl fmt::Display for SymmetricDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.a.iter().map(rat::format_rat).collect();
        write!(f, "{}:{}", self.n, body.join(","))
    }
}

/// The S_n-average of an arbitrary expression in the `Delta_r` basis:
/// `a_r = mean(boundary at size r) + mean(psi) * r(n-r)/(n-1)`. This map is
/// invariant under `keel_rewrite` with any weighting.
pub fn symmetrized_class(expr: &DivisorExpression) -> SymmetricDivisor {
    let n = expr.n;
    let mean_psi: Rat = expr.psi.iter().sum::<Rat>() / rat::int(n as i64);
    let mut by_size_sum: Vec<Rat> = vec![Rat::zero(); n / 2 + 1];
    let mut by_size_count: Vec<u64> = vec![0; n / 2 + 1];
    for key in DivisorExpression::all_keys(n) {
        let r = (n - key.len()).min(key.len());
        by_size_sum[r] += expr
            .boundary
            .get(&key)
            .cloned()
            .unwrap_or_else(Rat::zero);
        by_size_count[r] += 1;
    }
    let a: Vec<Rat> = (2..=n / 2)
        .map(|r| {
            let mean_boundary = &by_size_sum[r] / rat::int(by_size_count[r] as i64);
            let keel = &mean_psi * rat::int((r * (n - r)) as i64) / rat::int((n - 1) as i64);
            mean_boundary + keel
        })
        .collect();
    SymmetricDivisor { n, a }
}

/// Converts an S_n-symmetric expression to the `Delta_r` basis; errors when
/// the psi part is not constant or a boundary coefficient varies within a
/// size class.
pub fn to_symmetric_class(expr: &DivisorExpression) -> Result<SymmetricDivisor, DivisorError> {
    let n = expr.n;
    for k in 2..=n {
        if expr.psi(k) != expr.psi(1) {
            return Err(DivisorError::NotSymmetric(format!(
                "psi_1 != psi_{k}"
            )));
        }
    }
    let mut by_size: Vec<Option<Rat>> = vec![None; n / 2 + 1];
    for key in DivisorExpression::all_keys(n) {
        let r = (n - key.len()).min(key.len());
        let coeff = expr
            .boundary
            .get(&key)
            .cloned()
            .unwrap_or_else(Rat::zero);
        match &by_size[r] {
            None => by_size[r] = Some(coeff),
            Some(seen) if *seen == coeff => {}
            Some(seen) => {
                return Err(DivisorError::NotSymmetric(format!(
                    "boundary coefficients at size {r} differ: {} vs {}",
                    rat::format_rat(seen),
                    rat::format_rat(&coeff)
                )))
            }
        }
    }
    Ok(symmetrized_class(expr))
}

/// The ample class `psi - Delta` in the `Delta_r` basis:
/// `a_i = (i(n-i) - (n-1)) / (n-1)`.
pub fn psi_minus_delta(n: usize) -> SymmetricDivisor {
    assert!(n >= 5, "psi - Delta needs n >= 5");
    let a = (2..=n / 2)
        .map(|i| {
            rat::int((i * (n - i)) as i64 - (n - 1) as i64) / rat::int((n - 1) as i64)
        })
        .collect();
    SymmetricDivisor { n, a }
}
