//! Symmetric rational-valued functions on finite cyclic groups `Z_m`, the
//! F-nefness test, and the standard constructions the divisor criteria use.

use crate::rat::{self, Rat};
use num::bigint::BigInt;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupFnError {
    #[error("symmetry violation at index {0}: values[{0}] != values[m-{0}]")]
    SymmetryViolation(usize),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("values length {found} does not match modulus {modulus}")]
    LengthMismatch { modulus: usize, found: usize },
    #[error("unsupported modulus {m} for standard function {kind}")]
    UnsupportedModulus { kind: char, m: usize },
}

/// A symmetric (even) function `f: Z_m -> Q`, stored by its value table.
///
/// `values[a]` holds `f(a)` for the canonical residue `a` in `0..m`; evenness
/// `f(a) = f(-a)` is enforced at construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricFunction {
    modulus: usize,
    values: Vec<Rat>,
}

impl SymmetricFunction {
    pub fn new(modulus: usize, values: Vec<Rat>) -> Result<Self, GroupFnError> {
        if modulus == 0 {
            return Err(GroupFnError::ZeroModulus);
        }
        if values.len() != modulus {
            return Err(GroupFnError::LengthMismatch {
                modulus,
                found: values.len(),
            });
        }
        for a in 1..modulus {
            if values[a] != values[modulus - a] {
                return Err(GroupFnError::SymmetryViolation(a.min(modulus - a)));
            }
        }
        Ok(SymmetricFunction { modulus, values })
    }

    pub fn zero(modulus: usize) -> Self {
        SymmetricFunction {
            modulus,
            values: vec![Rat::zero(); modulus],
        }
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// Canonical residue of `k` in `0..m`.
    pub fn residue(&self, k: i64) -> usize {
        let m = self.modulus as i64;
        k.rem_euclid(m) as usize
    }

    /// Evaluates `f` at any integer representative.
    pub fn eval(&self, k: i64) -> &Rat {
        &self.values[self.residue(k)]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Rat::is_zero)
    }

    /// Pointwise `self + c * other` (moduli must agree).
    pub fn add_scaled(&self, other: &SymmetricFunction, c: &Rat) -> SymmetricFunction {
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b * c)
            .collect();
        SymmetricFunction {
            modulus: self.modulus,
            values,
        }
    }

    pub fn scale(&self, c: &Rat) -> SymmetricFunction {
        SymmetricFunction {
            modulus: self.modulus,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let (m, values) = rat::parse_literal(s).map_err(|e| e.to_string())?;
        SymmetricFunction::new(m, values).map_err(|e| e.to_string())
    }
}

impl fmt::Display for SymmetricFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rat::format_literal(self.modulus, &self.values))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardKind {
    A,
    B,
    E,
}

impl FromStr for StandardKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(StandardKind::A),
            "B" | "b" => Ok(StandardKind::B),
            "E" | "e" => Ok(StandardKind::E),
            other => Err(format!("unknown standard function kind `{other}`")),
        }
    }
}

/// The standard functions: `A_m(i) = <i><m-i>`, `B_m` overriding
/// `B_m(1) = B_m(m-1) = 3m-1`, and `E_m` overriding `E_m(0) = m`.
pub fn standard_function(
    kind: StandardKind,
    m: usize,
) -> Result<SymmetricFunction, GroupFnError> {
    if m == 0 {
        return Err(GroupFnError::ZeroModulus);
    }
    let mut values: Vec<Rat> = (0..m)
        .map(|i| rat::int((i as i64) * ((m - i) as i64)))
        .collect();
    match kind {
        StandardKind::A => {}
        StandardKind::B => {
            if m <= 2 {
                return Err(GroupFnError::UnsupportedModulus { kind: 'B', m });
            }
            values[1] = rat::int(3 * m as i64 - 1);
            values[m - 1] = rat::int(3 * m as i64 - 1);
        }
        StandardKind::E => {
            values[0] = rat::int(m as i64);
        }
    }
    SymmetricFunction::new(m, values)
}

/// Verdict of the F-nefness scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FnefVerdict {
    Pass,
    /// Lexicographically least triple `(a, b, c)` with
    /// `f(a)+f(b)+f(c)+f(a+b+c) < f(a+b)+f(a+c)+f(b+c)`.
    Fail { witness: (usize, usize, usize) },
}

impl FnefVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, FnefVerdict::Pass)
    }
}

/// The F-nef deficit `f(a)+f(b)+f(c)+f(a+b+c) - f(a+b) - f(a+c) - f(b+c)`.
pub fn fnef_deficit(f: &SymmetricFunction, a: usize, b: usize, c: usize) -> Rat {
    let (a, b, c) = (a as i64, b as i64, c as i64);
    f.eval(a) + f.eval(b) + f.eval(c) + f.eval(a + b + c)
        - f.eval(a + b)
        - f.eval(a + c)
        - f.eval(b + c)
}

/// Scans all triples in `Z_m^3` for a violation of the F-nef inequality.
pub fn is_fnef(f: &SymmetricFunction) -> FnefVerdict {
    let m = f.modulus();
    for a in 0..m {
        for b in a..m {
            for c in b..m {
                if fnef_deficit(f, a, b, c).is_negative() {
                    return FnefVerdict::Fail { witness: (a, b, c) };
                }
            }
        }
    }
    FnefVerdict::Pass
}

/// `d_f(a, b) = f(a) + f(b) - f(a+b)`.
pub fn d_f(f: &SymmetricFunction, a: i64, b: i64) -> Rat {
    f.eval(a) + f.eval(b) - f.eval(a + b)
}

/// The function `p_D` of a symmetric divisor `D = sum a_r Delta_r` on `Z_n`:
/// `p(0) = p(1) = 0`, `p(r) = p(n-r) = -a_r`.
pub fn p_from_coefficients(n: usize, a: &[Rat]) -> SymmetricFunction {
    assert!(n >= 4, "p_D needs n >= 4");
    assert_eq!(a.len(), n / 2 - 1, "expected coefficients a_2..a_{{n/2}}");
    let mut values = vec![Rat::zero(); n];
    for (idx, ar) in a.iter().enumerate() {
        let r = idx + 2;
        values[r] = -ar.clone();
        values[n - r] = -ar.clone();
    }
    SymmetricFunction::new(n, values).expect("p_D is even by construction")
}

/// `lambda_F-nef(D)`: the literal maximum of
/// `(p(a+b)+p(a+c)+p(b+c)-p(a)-p(b)-p(c)-p(d)) / (2n min{a,..,n-d})`
/// over `a,b,c,d in {1,..,n-1}` with `a+b+c+d = 2n`. May be negative.
pub fn lambda_fnef(n: usize, a: &[Rat]) -> Rat {
    let p = p_from_coefficients(n, a);
    let ni = n as i64;
    let mut best: Option<Rat> = None;
    for x in 1..ni {
        for y in x..ni {
            for z in y..ni {
                let w = 2 * ni - x - y - z;
                if w < z || w > ni - 1 {
                    continue;
                }
                let num = p.eval(x + y) + p.eval(x + z) + p.eval(y + z)
                    - p.eval(x)
                    - p.eval(y)
                    - p.eval(z)
                    - p.eval(w);
                let min = [x, y, z, w, ni - x, ni - y, ni - z, ni - w]
                    .into_iter()
                    .min()
                    .unwrap();
                let ratio = num / rat::int(2 * ni * min);
                if best.as_ref().is_none_or(|b| ratio > *b) {
                    best = Some(ratio);
                }
            }
        }
    }
    best.unwrap_or_else(Rat::zero)
}

/// The associated F-nef function `f_D = lambda_F-nef(D) A_n + p_D`.
pub fn associated_fnef_function(n: usize, a: &[Rat]) -> SymmetricFunction {
    let lambda = lambda_fnef(n, a);
    let p = p_from_coefficients(n, a);
    let a_n = standard_function(StandardKind::A, n).expect("A_n");
    p.add_scaled(&a_n, &lambda)
}

/// `m(f) = (1/2) min over nonzero a, b of (2f(a)+2f(b)-f(a+b)-f(a-b))`.
///
/// The pairs come from sides of tree partitions with nonzero `d`-sum, so both
/// arguments range over `Z_m \ {0}`; for `m = 1` the value is `f(0)`.
pub fn m_of(f: &SymmetricFunction) -> Rat {
    let m = f.modulus() as i64;
    if m == 1 {
        return f.eval(0).clone();
    }
    let mut best: Option<Rat> = None;
    for a in 1..m {
        for b in a..m {
            let v = f.eval(a) * rat::int(2) + f.eval(b) * rat::int(2)
                - f.eval(a + b)
                - f.eval(a - b);
            if best.as_ref().is_none_or(|c| v < *c) {
                best = Some(v);
            }
        }
    }
    best.unwrap() / rat::int(2)
}

/// Replaces the value at `0` by `m(f)`, keeping every other value.
pub fn tilde(f: &SymmetricFunction) -> SymmetricFunction {
    let mut values = f.values().to_vec();
    values[0] = m_of(f);
    SymmetricFunction::new(f.modulus(), values).expect("tilde preserves evenness")
}

/// Integer-valued view of a function after clearing denominators.
pub fn integer_values(f: &SymmetricFunction) -> (Vec<BigInt>, BigInt) {
    rat::scale_to_integers(f.values())
}
