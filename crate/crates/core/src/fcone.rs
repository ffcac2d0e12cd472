//! The symmetric F-cone: inequality rows from F-curves and extremal-ray
//! enumeration by the double description method in exact integer arithmetic.

use crate::rat::Rat;
use num::bigint::BigInt;
use num::Zero;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FconeError {
    #[error("cone has a lineality space of dimension {}", lineality.len())]
    NotPointed { lineality: Vec<Vec<i64>> },
    #[error("integer overflow during ray combination")]
    Overflow,
    #[error("empty inequality list")]
    Empty,
    #[error("snapshot io: {0}")]
    Snapshot(#[from] std::io::Error),
    #[error("snapshot does not match this computation")]
    SnapshotMismatch,
}

/// Inequality rows of the symmetric F-cone in the variables `a_2..a_{n/2}`:
/// one row per partition `a <= b <= c <= d` of `n` into 4 positive parts,
/// expressing `a_{a+b} + a_{a+c} + a_{b+c} - a_a - a_b - a_c - a_d >= 0`
/// with `a_0 = a_1 = 0`, `a_j = a_{n-j}`. Duplicate rows are removed.
pub fn fcone_inequalities(n: usize) -> Vec<Vec<i64>> {
    let dim = n / 2 - 1;
    let fold = |j: usize| -> Option<usize> {
        let r = j.min(n - j);
        (r >= 2).then(|| r - 2)
    };
    let mut rows = std::collections::BTreeSet::new();
    for a in 1..=n / 4 {
        for b in a..=(n - a) / 3 {
            for c in b..=(n - a - b) / 2 {
                let d = n - a - b - c;
                if d < c {
                    continue;
                }
                let mut row = vec![0i64; dim];
                for pair in [a + b, a + c, b + c] {
                    if let Some(idx) = fold(pair) {
                        row[idx] += 1;
                    }
                }
                for single in [a, b, c, d] {
                    if let Some(idx) = fold(single) {
                        row[idx] -= 1;
                    }
                }
                rows.insert(row);
            }
        }
    }
    rows.into_iter().collect()
}

#[derive(Debug, Clone)]
struct Ray {
    coords: Vec<i128>,
    /// Tight-row bitmask over the rows processed so far.
    zeros: Vec<u64>,
}

impl Ray {
    fn set_zero_bit(&mut self, idx: usize) {
        self.zeros[idx / 64] |= 1 << (idx % 64);
    }
}

fn dot(row: &[i64], coords: &[i128]) -> Result<i128, FconeError> {
    let mut acc: i128 = 0;
    for (r, c) in row.iter().zip(coords) {
        let term = (*r as i128).checked_mul(*c).ok_or(FconeError::Overflow)?;
        acc = acc.checked_add(term).ok_or(FconeError::Overflow)?;
    }
    Ok(acc)
}

fn gcd_reduce(coords: &mut [i128]) {
    let mut g: i128 = 0;
    for &c in coords.iter() {
        g = gcd(g, c.abs());
    }
    if g > 1 {
        for c in coords.iter_mut() {
            *c /= g;
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Rank of an integer matrix by fraction-free Gaussian elimination.
fn rank_i128(rows: &[Vec<i128>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| Rat::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0usize;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pv = m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &pv;
                for cc in c..cols {
                    let delta = &f * &m[rank][cc];
                    m[r][cc] = &m[r][cc] - delta;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Solves `A x = e_j` over the rationals for square invertible `A` and
/// returns the primitive integer direction of `x`.
fn solve_unit(a: &[&Vec<i64>], j: usize) -> Vec<i128> {
    let dim = a.len();
    let mut m: Vec<Vec<Rat>> = (0..dim)
        .map(|r| {
            let mut row: Vec<Rat> = a[r]
                .iter()
                .map(|&x| Rat::from_integer(BigInt::from(x)))
                .collect();
            row.push(Rat::from_integer(BigInt::from(u8::from(r == j))));
            row
        })
        .collect();
    for c in 0..dim {
        let p = (c..dim).find(|&r| !m[r][c].is_zero()).expect("invertible");
        m.swap(c, p);
        let pv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x / &pv;
        }
        for r in 0..dim {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for cc in c..=dim {
                    let delta = &f * &m[c][cc];
                    m[r][cc] = &m[r][cc] - delta;
                }
            }
        }
    }
    let sol: Vec<Rat> = (0..dim).map(|r| m[r][dim].clone()).collect();
    let (ints, _) = crate::rat::scale_to_integers(&sol);
    let mut coords: Vec<i128> = ints
        .iter()
        .map(|b| i128::try_from(b).expect("initial ray overflow"))
        .collect();
    gcd_reduce(&mut coords);
    coords
}

/// Integer basis of the rational kernel of the rows (for the NotPointed
/// report).
fn kernel_basis(rows: &[Vec<i64>], dim: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| Rat::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for c in 0..dim {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pv = m[rank][c].clone();
        for x in m[rank].iter_mut() {
            *x = &*x / &pv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for cc in 0..dim {
                    let delta = &f * &m[rank][cc];
                    m[r][cc] = &m[r][cc] - delta;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rat::zero(); dim];
            v[fc] = Rat::from_integer(1.into());
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][fc].clone();
            }
            let (ints, _) = crate::rat::scale_to_integers(&v);
            ints.iter()
                .map(|b| i64::try_from(b).expect("kernel overflow"))
                .collect()
        })
        .collect()
}

/// Optional streaming of intermediate ray sets, for long runs.
#[derive(Debug, Clone, Default)]
pub struct DdOptions {
    pub snapshot_path: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    version: u32,
    row_fingerprint: u64,
    processed: usize,
    rays: Vec<Vec<String>>,
}

fn row_fingerprint(rows: &[Vec<i64>]) -> u64 {
    // order-sensitive FNV over the row data
    let mut h: u64 = 0xcbf29ce484222325;
    for row in rows {
        for &x in row {
            h ^= x as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Extremal rays of `{x : row . x >= 0 for all rows}` by double description.
///
/// Rows are inserted by increasing number of zero coefficients; rays are
/// primitive integer vectors in the cone's own orientation, sorted
/// lexicographically. Errors with the lineality basis when the cone is not
/// pointed.
pub fn extreme_rays(ineqs: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, FconeError> {
    extreme_rays_with(ineqs, &DdOptions::default())
}

pub fn extreme_rays_with(
    ineqs: &[Vec<i64>],
    options: &DdOptions,
) -> Result<Vec<Vec<i64>>, FconeError> {
    if ineqs.is_empty() {
        return Err(FconeError::Empty);
    }
    let dim = ineqs[0].len();
    if dim == 0 {
        return Ok(Vec::new());
    }
    // insertion heuristic: by increasing number of zero coefficients
    let mut order: Vec<usize> = (0..ineqs.len()).collect();
    order.sort_by_key(|&i| {
        (
            ineqs[i].iter().filter(|&&x| x == 0).count(),
            i,
        )
    });
    let rows: Vec<Vec<i64>> = order.iter().map(|&i| ineqs[i].clone()).collect();

    // pointedness and initial independent rows
    let as128: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    if rank_i128(&as128) < dim {
        return Err(FconeError::NotPointed {
            lineality: kernel_basis(&rows, dim),
        });
    }
    let mut base: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut candidate: Vec<Vec<i128>> = base.iter().map(|&b| as128[b].clone()).collect();
        candidate.push(as128[i].clone());
        if rank_i128(&candidate) == candidate.len() {
            base.push(i);
            if base.len() == dim {
                break;
            }
        }
    }
    let word_count = rows.len().div_ceil(64);

    // simplicial start: rays dual to the base rows, signed into the cone
    let base_rows: Vec<&Vec<i64>> = base.iter().map(|&b| &rows[b]).collect();
    let mut rays: Vec<Ray> = Vec::new();
    for j in 0..dim {
        let mut coords = solve_unit(&base_rows, j);
        let v = dot(&rows[base[j]], &coords)?;
        debug_assert!(v != 0);
        if v < 0 {
            for c in coords.iter_mut() {
                *c = -*c;
            }
        }
        let mut ray = Ray {
            coords,
            zeros: vec![0u64; word_count],
        };
        for (k, &b) in base.iter().enumerate() {
            if k != j {
                ray.set_zero_bit(b);
            }
        }
        rays.push(ray);
    }
    let mut processed: Vec<bool> = vec![false; rows.len()];
    for &b in &base {
        processed[b] = true;
    }

    // resume from a snapshot when one matches
    let fingerprint = row_fingerprint(&rows);
    let mut start_at = 0usize;
    let insertion_order: Vec<usize> = (0..rows.len()).filter(|i| !processed[*i]).collect();
    if let Some(path) = &options.snapshot_path {
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            let snap: Snapshot =
                serde_json::from_str(&text).map_err(|_| FconeError::SnapshotMismatch)?;
            if snap.version != 1 || snap.row_fingerprint != fingerprint {
                return Err(FconeError::SnapshotMismatch);
            }
            start_at = snap.processed;
            rays = snap
                .rays
                .iter()
                .map(|coords| {
                    let coords: Vec<i128> = coords
                        .iter()
                        .map(|s| s.parse().map_err(|_| FconeError::SnapshotMismatch))
                        .collect::<Result<_, _>>()?;
                    Ok(Ray {
                        coords,
                        zeros: vec![0u64; word_count],
                    })
                })
                .collect::<Result<Vec<_>, FconeError>>()?;
            // rebuild tight sets against all rows processed so far
            for ray in rays.iter_mut() {
                for &b in base.iter().chain(&insertion_order[..start_at]) {
                    if dot(&rows[b], &ray.coords)? == 0 {
                        ray.set_zero_bit(b);
                    }
                }
            }
        }
    }

    for (step, &ri) in insertion_order.iter().enumerate().skip(start_at) {
        let row = &rows[ri];
        let mut positive: Vec<usize> = Vec::new();
        let mut negative: Vec<usize> = Vec::new();
        let mut values: Vec<i128> = Vec::with_capacity(rays.len());
        for (k, ray) in rays.iter_mut().enumerate() {
            let v = dot(row, &ray.coords)?;
            if v == 0 {
                ray.set_zero_bit(ri);
            } else if v > 0 {
                positive.push(k);
            } else {
                negative.push(k);
            }
            values.push(v);
        }
        if negative.is_empty() {
            continue;
        }
        let mut new_rays: Vec<Ray> = Vec::new();
        for &p in &positive {
            for &q in &negative {
                if !adjacent(&rays[p], &rays[q], &rows, dim, word_count) {
                    continue;
                }
                // alpha r_q + beta r_p with alpha = row.r_p > 0, beta = -row.r_q > 0
                let alpha = values[p];
                let beta = -values[q];
                let mut coords = Vec::with_capacity(dim);
                for i in 0..dim {
                    let t1 = alpha
                        .checked_mul(rays[q].coords[i])
                        .ok_or(FconeError::Overflow)?;
                    let t2 = beta
                        .checked_mul(rays[p].coords[i])
                        .ok_or(FconeError::Overflow)?;
                    coords.push(t1.checked_add(t2).ok_or(FconeError::Overflow)?);
                }
                gcd_reduce(&mut coords);
                let mut zeros: Vec<u64> = rays[p]
                    .zeros
                    .iter()
                    .zip(&rays[q].zeros)
                    .map(|(a, b)| a & b)
                    .collect();
                zeros[ri / 64] |= 1 << (ri % 64);
                new_rays.push(Ray { coords, zeros });
            }
        }
        let keep: Vec<Ray> = rays
            .drain(..)
            .enumerate()
            .filter(|(k, _)| !negative.contains(k))
            .map(|(_, r)| r)
            .collect();
        rays = keep;
        rays.extend(new_rays);
        if let Some(path) = &options.snapshot_path {
            let snap = Snapshot {
                version: 1,
                row_fingerprint: fingerprint,
                processed: step + 1,
                rays: rays
                    .iter()
                    .map(|r| r.coords.iter().map(|c| c.to_string()).collect())
                    .collect(),
            };
            let mut file = std::fs::File::create(path)?;
            file.write_all(serde_json::to_string(&snap).expect("snapshot json").as_bytes())?;
        }
    }

    let mut out: Vec<Vec<i64>> = rays
        .into_iter()
        .map(|r| {
            r.coords
                .iter()
                .map(|&c| i64::try_from(c))
                .collect::<Result<Vec<i64>, _>>()
                .map_err(|_| FconeError::Overflow)
        })
        .collect::<Result<_, _>>()?;
    out.sort();
    Ok(out)
}

/// Algebraic adjacency: the rows tight at both rays span a space of rank
/// `dim - 2`. Prefiltered by tight-set cardinality.
fn adjacent(a: &Ray, b: &Ray, rows: &[Vec<i64>], dim: usize, word_count: usize) -> bool {
    let mut count = 0u32;
    let mut common = vec![0u64; word_count];
    for w in 0..word_count {
        common[w] = a.zeros[w] & b.zeros[w];
        count += common[w].count_ones();
    }
    if (count as usize) < dim.saturating_sub(2) {
        return false;
    }
    let mut tight: Vec<Vec<i128>> = Vec::with_capacity(count as usize);
    for (w, &word) in common.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let t = bits.trailing_zeros() as usize;
            let idx = w * 64 + t;
            tight.push(rows[idx].iter().map(|&x| x as i128).collect());
            bits &= bits - 1;
        }
    }
    rank_i128(&tight) == dim - 2
}

/// Number of extremal rays of the symmetric F-cone.
pub fn ray_counts(n: usize) -> Result<usize, FconeError> {
    Ok(extreme_rays(&fcone_inequalities(n))?.len())
}

/// A pointed rational cone in both descriptions: facet normals (`row . x >=
/// 0`) and primitive extremal rays, canonically sorted.
#[derive(Debug, Clone, Serialize)]
pub struct PolyhedralCone {
    pub dim: usize,
    pub inequalities: Vec<Vec<i64>>,
    pub rays: Vec<Vec<i64>>,
}

impl PolyhedralCone {
    /// The symmetric F-cone in the coordinates `a_2..a_{n/2}`.
    pub fn symmetric_fcone(n: usize) -> Result<Self, FconeError> {
        let inequalities = fcone_inequalities(n);
        let rays = extreme_rays(&inequalities)?;
        Ok(PolyhedralCone {
            dim: n / 2 - 1,
            inequalities,
            rays,
        })
    }

    /// Re-verifies the defining invariants: every ray satisfies every
    /// inequality, is primitive, and its tight set has rank `dim - 1`.
    pub fn verify(&self) -> bool {
        self.rays.iter().all(|ray| {
            let mut tight: Vec<Vec<i128>> = Vec::new();
            let mut g: i128 = 0;
            for &c in ray {
                g = gcd(g, c as i128);
            }
            if g != 1 {
                return false;
            }
            for row in &self.inequalities {
                let v: i128 = row
                    .iter()
                    .zip(ray)
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum();
                if v < 0 {
                    return false;
                }
                if v == 0 {
                    tight.push(row.iter().map(|&x| x as i128).collect());
                }
            }
            self.dim <= 1 || rank_i128(&tight) == self.dim - 1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_rows_small() {
        // n = 8: partitions (1,1,1,5), (1,1,2,4), (1,1,3,3), (1,2,2,3), (2,2,2,2)
        let rows = fcone_inequalities(8);
        assert_eq!(rows.len(), 5);
        // n = 9 row for (1,1,1,6): 3 a_2 - a_3
        let rows9 = fcone_inequalities(9);
        assert!(rows9.contains(&vec![3, -1, 0]));
    }

    #[test]
    fn small_ray_counts() {
        assert_eq!(ray_counts(5).unwrap(), 1);
        assert_eq!(ray_counts(6).unwrap(), 2);
        assert_eq!(ray_counts(8).unwrap(), 4);
    }

    #[test]
    fn n6_rays_exact() {
        let rays = extreme_rays(&fcone_inequalities(6)).unwrap();
        assert_eq!(rays, vec![vec![1, 3], vec![2, 1]]);
    }

    #[test]
    fn rays_satisfy_all_inequalities_and_are_extremal() {
        for n in [8usize, 10, 12] {
            let rows = fcone_inequalities(n);
            let rays = extreme_rays(&rows).unwrap();
            let dim = n / 2 - 1;
            for ray in &rays {
                let mut tight: Vec<Vec<i128>> = Vec::new();
                for row in &rows {
                    let v: i128 = row
                        .iter()
                        .zip(ray)
                        .map(|(&a, &b)| a as i128 * b as i128)
                        .sum();
                    assert!(v >= 0, "ray {ray:?} violates a facet at n={n}");
                    if v == 0 {
                        tight.push(row.iter().map(|&x| x as i128).collect());
                    }
                }
                assert_eq!(rank_i128(&tight), dim - 1, "ray {ray:?} not extremal");
                // primitive
                let g = ray.iter().fold(0i128, |g, &c| gcd(g, c as i128));
                assert_eq!(g, 1, "ray {ray:?} not primitive");
            }
        }
    }

    #[test]
    fn brute_force_cross_check() {
        // enumerate candidate rays from all (dim-1)-subsets of rows
        for n in [8usize, 9, 10, 11, 12] {
            let rows = fcone_inequalities(n);
            let dim = n / 2 - 1;
            let rays = extreme_rays(&rows).unwrap();
            let mut brute = std::collections::BTreeSet::new();
            let idx: Vec<usize> = (0..rows.len()).collect();
            for combo in combinations(&idx, dim - 1) {
                let sub: Vec<Vec<i128>> = combo
                    .iter()
                    .map(|&i| rows[i].iter().map(|&x| x as i128).collect())
                    .collect();
                if rank_i128(&sub) != dim - 1 {
                    continue;
                }
                if let Some(dir) = null_direction(&sub, dim) {
                    for cand in [dir.clone(), dir.iter().map(|x| -x).collect()] {
                        let ok = rows.iter().all(|row| {
                            row.iter()
                                .zip(&cand)
                                .map(|(&a, &b)| a as i128 * b)
                                .sum::<i128>()
                                >= 0
                        });
                        if !ok {
                            continue;
                        }
                        let tight: Vec<Vec<i128>> = rows
                            .iter()
                            .filter(|row| {
                                row.iter()
                                    .zip(&cand)
                                    .map(|(&a, &b)| a as i128 * b)
                                    .sum::<i128>()
                                    == 0
                            })
                            .map(|row| row.iter().map(|&x| x as i128).collect())
                            .collect();
                        if rank_i128(&tight) == dim - 1 {
                            brute.insert(
                                cand.iter().map(|&x| x as i64).collect::<Vec<i64>>(),
                            );
                        }
                    }
                }
            }
            let brute: Vec<Vec<i64>> = brute.into_iter().collect();
            assert_eq!(rays, brute, "double description vs brute force at n={n}");
        }
    }

    #[test]
    fn insertion_order_independence() {
        let rows = fcone_inequalities(12);
        let baseline = extreme_rays(&rows).unwrap();
        let mut shuffled = rows.clone();
        shuffled.reverse();
        shuffled.swap(0, 3);
        assert_eq!(extreme_rays(&shuffled).unwrap(), baseline);
    }

    #[test]
    fn not_pointed_reports_lineality() {
        // single inequality in dim 2: lineality along its kernel
        let rows = vec![vec![1i64, 1]];
        match extreme_rays(&rows) {
            Err(FconeError::NotPointed { lineality }) => {
                assert_eq!(lineality.len(), 1);
                assert_eq!(lineality[0][0] + lineality[0][1], 0);
            }
            other => panic!("expected NotPointed, got {other:?}"),
        }
    }

    fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for (i, &x) in items.iter().enumerate() {
            for mut rest in combinations(&items[i + 1..], k - 1) {
                let mut v = vec![x];
                v.append(&mut rest);
                out.push(v);
            }
        }
        out
    }

    fn null_direction(rows: &[Vec<i128>], dim: usize) -> Option<Vec<i128>> {
        let as64: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i64).collect())
            .collect();
        let basis = kernel_basis(&as64, dim);
        if basis.len() == 1 {
            Some(basis[0].iter().map(|&x| x as i128).collect())
        } else {
            None
        }
    }
}
