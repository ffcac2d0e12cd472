//! Small exact linear algebra over the integers and rationals: symmetric
//! definiteness classification, integer kernels via Hermite reduction, and
//! unimodular basis completion via Smith reduction.

use crate::rat::Rat;
use num::bigint::BigInt;
use num::{One, Signed, Zero};

pub type IMat = Vec<Vec<BigInt>>;
pub type QMat = Vec<Vec<Rat>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    /// Positive semidefinite with a nontrivial radical.
    PositiveSemidefinite,
    Indefinite,
}

/// Classifies a symmetric rational matrix by diagonal-pivoted congruence
/// elimination. Exact; no floating point.
pub fn classify_definiteness(g: &QMat) -> Definiteness {
    let n = g.len();
    let mut m = g.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots = 0usize;
    loop {
        if active.is_empty() {
            break;
        }
        if active
            .iter()
            .any(|&i| m[i][i].is_negative())
        {
            return Definiteness::Indefinite;
        }
        // pick a positive diagonal pivot
        let pivot = active.iter().copied().find(|&i| m[i][i].is_positive());
        match pivot {
            Some(p) => {
                let d = m[p][p].clone();
                active.retain(|&i| i != p);
                for &i in &active {
                    if m[i][p].is_zero() {
                        continue;
                    }
                    let factor = &m[i][p] / &d;
                    for &j in &active {
                        let delta = &factor * &m[p][j];
                        m[i][j] = &m[i][j] - delta;
                    }
                }
                for &i in &active {
                    m[i][p] = Rat::zero();
                    m[p][i] = Rat::zero();
                }
                pivots += 1;
            }
            None => {
                // all remaining diagonal entries are zero: any nonzero
                // off-diagonal entry makes the form indefinite
                for (ai, &i) in active.iter().enumerate() {
                    for &j in &active[ai + 1..] {
                        if !m[i][j].is_zero() {
                            return Definiteness::Indefinite;
                        }
                    }
                }
                break;
            }
        }
    }
    if pivots == n {
        Definiteness::PositiveDefinite
    } else {
        Definiteness::PositiveSemidefinite
    }
}

/// Basis of the saturated integer kernel lattice `{x : x M = 0}` of an
/// integer matrix, via Hermite reduction of `(M | I)`.
pub fn integer_kernel(mat: &IMat) -> IMat {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut h = mat.clone();
    let mut u: IMat = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        // gcd-reduce column below pivot_row using row operations
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if !h[r][col].is_zero() {
                    best = match best {
                        None => Some(r),
                        Some(b) => {
                            if h[r][col].abs() < h[b][col].abs() {
                                Some(r)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(b) = best else { break };
            h.swap(pivot_row, b);
            u.swap(pivot_row, b);
            let mut done = true;
            let pv = h[pivot_row][col].clone();
            for r in pivot_row + 1..rows {
                if h[r][col].is_zero() {
                    continue;
                }
                let q = div_round(&h[r][col], &pv);
                if !q.is_zero() {
                    for c in 0..cols {
                        let delta = &q * &h[pivot_row][c];
                        h[r][c] = &h[r][c] - delta;
                    }
                    for c in 0..rows {
                        let delta = &q * &u[pivot_row][c];
                        u[r][c] = &u[r][c] - delta;
                    }
                }
                if !h[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !h[pivot_row][col].is_zero() {
            pivot_row += 1;
            if pivot_row == rows {
                break;
            }
        }
    }
    u[pivot_row..].to_vec()
}

/// Rounded division minimizing the remainder (for Euclidean reduction).
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = num::Integer::div_rem(a, b);
    let two_r: BigInt = &r * 2;
    if two_r.abs() > b.abs() {
        if (r.is_positive()) == (b.is_positive()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Given a saturated `k x m` integer matrix `K` of rank `k`, returns a
/// unimodular `m x m` matrix `T` (rows are a basis of `Z^m`) whose first `k`
/// rows span the same lattice as the rows of `K`, together with `T^{-1}`.
///
/// Built from the Smith reduction `U K V = [diag(d) | 0]`; saturation means
/// every `d_i = 1`, so the first `k` rows of `V^{-1}` span `rowspan(K)`.
pub fn unimodular_completion(k_rows: &IMat, m: usize) -> (IMat, IMat) {
    let k = k_rows.len();
    let mut a = k_rows.clone();
    // V and Vinv track column operations: A := A * C, V := V * C, Vinv := C^{-1} * Vinv
    let mut v: IMat = identity(m);
    let mut vinv: IMat = identity(m);

    let mut done = 0usize;
    while done < k.min(m) {
        // find a nonzero entry in the remaining block
        let mut piv: Option<(usize, usize)> = None;
        for i in done..k {
            for j in done..m {
                if !a[i][j].is_zero()
                    && piv.is_none_or(|(pi, pj): (usize, usize)| {
                        a[i][j].abs() < a[pi][pj].abs()
                    })
                {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        // move pivot to (done, done)
        a.swap(done, pi);
        swap_cols(&mut a, done, pj);
        swap_cols(&mut v, done, pj);
        vinv.swap(done, pj);
        // clear row and column at the pivot
        let mut again = true;
        while again {
            again = false;
            let pv = a[done][done].clone();
            // column ops to clear the pivot row
            for j in done + 1..m {
                if a[done][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[done][j], &pv);
                if !q.is_zero() {
                    // C = I - q E_{done,j}; Vinv := C^{-1} Vinv adds q times
                    // row j to row `done`
                    col_axpy(&mut a, j, done, &-q.clone());
                    col_axpy(&mut v, j, done, &-q.clone());
                    row_axpy(&mut vinv, j, done, &q);
                }
                if !a[done][j].is_zero() {
                    // pivot shrinks: swap and retry
                    swap_cols(&mut a, done, j);
                    swap_cols(&mut v, done, j);
                    vinv.swap(done, j);
                    again = true;
                }
            }
            // row ops to clear the pivot column (no transform needed: only the
            // row span of K matters)
            let pv = a[done][done].clone();
            for i in done + 1..k {
                if a[i][done].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][done], &pv);
                if !q.is_zero() {
                    for c in 0..m {
                        let delta = &q * &a[done][c];
                        a[i][c] = &a[i][c] - delta;
                    }
                }
                if !a[i][done].is_zero() {
                    a.swap(done, i);
                    again = true;
                }
            }
        }
        done += 1;
    }
    assert_eq!(done, k, "kernel rows are not linearly independent");
    for i in 0..done {
        assert!(
            a[i][i].abs().is_one(),
            "kernel lattice is not saturated (invariant factor {})",
            a[i][i]
        );
    }
    // K = U^{-1} D V^{-1} with |d_i| = 1, so the first k rows of V^{-1} span
    // rowspan(K); T = V^{-1} (tracked as vinv), T^{-1} = V.
    (vinv, v)
}

fn identity(m: usize) -> IMat {
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn swap_cols(a: &mut IMat, i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// col_j += q * col_i
fn col_axpy(a: &mut IMat, j: usize, i: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let delta = q * &row[i];
        row[j] = &row[j] + delta;
    }
}

/// row_j += q * row_i
fn row_axpy(a: &mut IMat, i: usize, j: usize, q: &BigInt) {
    let src = a[i].clone();
    for (c, val) in a[j].iter_mut().enumerate() {
        *val += q * &src[c];
    }
}

#[cfg(test)]
pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    let m = b[0].len();
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..inner).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::int;

    fn qm(rows: &[&[i64]]) -> QMat {
        rows.iter()
            .map(|r| r.iter().map(|&v| int(v)).collect())
            .collect()
    }

    fn im(rows: &[&[i64]]) -> IMat {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn definiteness_basics() {
        assert_eq!(
            classify_definiteness(&qm(&[&[1, 0], &[0, 1]])),
            Definiteness::PositiveDefinite
        );
        assert_eq!(
            classify_definiteness(&qm(&[&[1, 1], &[1, 1]])),
            Definiteness::PositiveSemidefinite
        );
        assert_eq!(
            classify_definiteness(&qm(&[&[0, 1], &[1, 0]])),
            Definiteness::Indefinite
        );
        assert_eq!(
            classify_definiteness(&qm(&[&[-1, 0], &[0, 1]])),
            Definiteness::Indefinite
        );
        // zero matrix is PSD with full kernel
        assert_eq!(
            classify_definiteness(&qm(&[&[0, 0], &[0, 0]])),
            Definiteness::PositiveSemidefinite
        );
    }

    #[test]
    fn kernel_of_rank_deficient_matrix() {
        // kernel of [[1,1,0],[1,1,0],[0,0,1]] is spanned by (1,-1,0)
        let k = integer_kernel(&im(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]));
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(&v[0] + &v[1], BigInt::zero());
        assert!(v[2].is_zero());
        assert!(v[0].abs().is_one());
    }

    #[test]
    fn completion_is_unimodular_and_spans() {
        let kernel = im(&[&[1, 1, 0, -1], &[0, 2, 1, 0]]);
        let (t, tinv) = unimodular_completion(&kernel, 4);
        let prod = mat_mul(&t, &tinv);
        assert_eq!(prod, identity(4));
        // first two rows of t must span the kernel lattice: each kernel row is
        // an integer combination of them and vice versa (check via rank and
        // membership through tinv)
        for row in &kernel {
            let coeffs: Vec<BigInt> = (0..4)
                .map(|j| (0..4).map(|c| &row[c] * &tinv[c][j]).sum())
                .collect();
            assert!(coeffs[2].is_zero() && coeffs[3].is_zero());
        }
    }
}
