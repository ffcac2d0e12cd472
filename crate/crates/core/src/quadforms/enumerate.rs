//! Exact lattice-point enumeration inside ellipsoids (Fincke–Pohst style).
//!
//! Works over a positive definite rational Gram matrix with an arbitrary
//! rational center; traversal bounds are exact integers obtained from integer
//! square roots and verified with rational predicates, so no floating point
//! enters any verdict.

use crate::budget::VisitCounter;
use crate::rat::Rat;
use num::bigint::BigInt;
use num::{Signed, Zero};

/// Cholesky-like data: Q(x) = sum_i d[i] * (x_i + sum_{j>i} u[i][j] x_j)^2.
struct Ldl {
    d: Vec<Rat>,
    u: Vec<Vec<Rat>>,
}

/// Decomposes a positive definite rational Gram matrix. Panics on
/// non-positive pivots; callers classify definiteness first.
fn ldl(gram: &[Vec<Rat>]) -> Ldl {
    let n = gram.len();
    let mut a = gram.to_vec();
    let mut d = vec![Rat::zero(); n];
    let mut u = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        d[i] = a[i][i].clone();
        assert!(
            d[i].is_positive(),
            "ldl: matrix is not positive definite"
        );
        for j in i + 1..n {
            u[i][j] = &a[i][j] / &d[i];
        }
        for r in i + 1..n {
            for c in r..n {
                let delta = &u[i][r] * &a[i][c];
                a[r][c] = &a[r][c] - delta;
                if r != c {
                    a[c][r] = a[r][c].clone();
                }
            }
        }
    }
    Ldl { d, u }
}

/// Largest integer `x` with `(x - c)^2 <= b`, i.e. `floor(c + sqrt(b))`.
/// Requires `b >= 0`.
fn floor_center_plus_sqrt(c: &Rat, b: &Rat) -> BigInt {
    debug_assert!(!b.is_negative());
    // sqrt(b) = sqrt(num*den) / den for b = num/den
    let num = b.numer();
    let den = b.denom();
    let root = (num * den).sqrt(); // floor sqrt of a nonnegative integer
    let approx = c + Rat::new(root, den.clone());
    let mut x = approx.floor().to_integer();
    // fix up with the exact predicate (at most a couple of steps)
    let ok = |x: &BigInt| {
        let diff = Rat::from_integer(x.clone()) - c;
        !diff.is_positive() || &diff * &diff <= *b
    };
    while ok(&(&x + 1)) {
        x += 1;
    }
    while !ok(&x) {
        x -= 1;
    }
    x
}

/// Smallest integer `x` with `(x - c)^2 <= b`, i.e. `ceil(c - sqrt(b))`.
fn ceil_center_minus_sqrt(c: &Rat, b: &Rat) -> BigInt {
    -floor_center_plus_sqrt(&(-c), b)
}

/// Enumerates every integer vector `x` with `Q(x - center) <= bound` where
/// `Q` is the positive definite form with the given Gram matrix, invoking
/// `visit(x, value)` for each. Returns false if the visit budget runs out.
pub fn enumerate_ellipsoid<F>(
    gram: &[Vec<Rat>],
    center: &[Rat],
    bound: &Rat,
    counter: &VisitCounter,
    visit: &mut F,
) -> bool
where
    F: FnMut(&[i64], &Rat),
{
    let n = gram.len();
    if bound.is_negative() {
        return true;
    }
    if n == 0 {
        visit(&[], &Rat::zero());
        return true;
    }
    let dec = ldl(gram);
    let mut x = vec![0i64; n];
    // remaining[i] = bound - sum_{k>i} d_k ( ... )^2 available at level i
    let mut remaining = vec![Rat::zero(); n + 1];
    remaining[n] = bound.clone();
    // shift[i] = sum_{j>i} u[i][j] * (x_j - center_j), maintained on descent
    recurse(
        &dec,
        center,
        n,
        n,
        &mut x,
        &mut remaining,
        counter,
        visit,
    )
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    dec: &Ldl,
    center: &[Rat],
    n: usize,
    level: usize,
    x: &mut Vec<i64>,
    remaining: &mut Vec<Rat>,
    counter: &VisitCounter,
    visit: &mut F,
) -> bool
where
    F: FnMut(&[i64], &Rat),
{
    if level == 0 {
        let value = remaining[n].clone() - remaining[0].clone();
        visit(x, &value);
        return true;
    }
    let i = level - 1;
    // effective center for x_i: c_i - sum_{j>i} u[i][j] (x_j - c_j)
    let mut c = center[i].clone();
    for j in level..n {
        let diff = Rat::from_integer(BigInt::from(x[j])) - &center[j];
        c -= &dec.u[i][j] * diff;
    }
    let b = &remaining[level] / &dec.d[i];
    if b.is_negative() {
        return true;
    }
    let lo = ceil_center_minus_sqrt(&c, &b);
    let hi = floor_center_plus_sqrt(&c, &b);
    let mut xi = lo;
    while xi <= hi {
        if !counter.spend(1) {
            return false;
        }
        let xv = i64::try_from(&xi).expect("enumeration coordinate overflow");
        x[i] = xv;
        let diff = Rat::from_integer(xi.clone()) - &c;
        remaining[level - 1] = &remaining[level] - &dec.d[i] * (&diff * &diff);
        if !remaining[level - 1].is_negative()
            && !recurse(dec, center, n, level - 1, x, remaining, counter, visit)
        {
            return false;
        }
        xi += 1;
    }
    x[i] = 0;
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn integer_sqrt_bounds() {
        let c = rat(1, 2);
        let b = int(2);
        // floor(1/2 + sqrt 2) = 1; smallest x with (x - 1/2)^2 <= 2 is 0
        assert_eq!(floor_center_plus_sqrt(&c, &b), BigInt::from(1));
        assert_eq!(ceil_center_minus_sqrt(&c, &b), BigInt::from(0));
        // brute cross-check on a grid of rational centers and bounds
        for cn in -9..=9i64 {
            for cd in 1..=4i64 {
                for bn in 0..=30i64 {
                    let c = rat(cn, cd);
                    let b = rat(bn, 3);
                    let hi = floor_center_plus_sqrt(&c, &b);
                    let lo = ceil_center_minus_sqrt(&c, &b);
                    let pred = |x: i64| {
                        let d = int(x) - &c;
                        &d * &d <= b
                    };
                    for x in -15..=15i64 {
                        let inside = BigInt::from(x) >= lo && BigInt::from(x) <= hi;
                        assert_eq!(pred(x), inside, "c={c} b={b} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn enumerates_small_ball() {
        // x^2 + y^2 <= 4 around the origin: 13 integer points
        let gram = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        let center = vec![int(0), int(0)];
        let counter = crate::budget::VisitCounter::new(10_000);
        let mut pts = Vec::new();
        let ok = enumerate_ellipsoid(&gram, &center, &int(4), &counter, &mut |x, v| {
            pts.push((x.to_vec(), v.clone()));
        });
        assert!(ok);
        assert_eq!(pts.len(), 13);
        for (x, v) in &pts {
            assert_eq!(*v, int(x[0] * x[0] + x[1] * x[1]));
        }
    }
}
