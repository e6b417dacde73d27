//! p-adic arithmetic at finite precision: splitting types, Hilbert symbols,
//! local norm-group images and Frobenius lifts.
//!
//! Nothing here implements general p-adic analysis. Computations run at a
//! finite precision p^k and are re-run at p^(k+1); agreement of the two is
//! the stability contract that makes the finite answers trustworthy.

mod norms;
mod ring;
mod symbols;

pub use norms::{
    fundamental_lemma_check, local_norm_image, unit_level, unit_norms_by_enumeration,
    LocalUnitLevel,
};
pub use ring::{frobenius_action, modinv, PolyModRing, RingElem};
pub use symbols::{
    conic_solvable, hilbert_symbol, hilbert_symbol_rational, legendre_symbol, relevant_places,
    Place,
};

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("place is ramified in the given extension")]
    RamifiedPlace,
    #[error("precision unstable at p={p}, k={k}; raise the precision")]
    PrecisionUnstable { p: u64, k: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

impl std::fmt::Display for SplittingType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SplittingType::Split => write!(f, "SPLIT"),
            SplittingType::Inert => write!(f, "INERT"),
            SplittingType::Ramified => write!(f, "RAMIFIED"),
        }
    }
}

/// The defining data of a degree-l cyclic local extension at a finite place.
#[derive(Debug, Clone)]
pub struct LocalExtension {
    pub p: u64,
    pub degree: u32,
    /// Monic integral defining polynomial, low degree first, length degree+1.
    pub poly: Vec<BigInt>,
    /// Recomputed from the defining data, never trusted from the caller.
    pub splitting: SplittingType,
}

/// Default working precision: k = 3, raised to 5 at p = 2 where Hensel needs
/// more headroom.
pub fn default_precision(p: u64) -> u32 {
    if p == 2 {
        5
    } else {
        3
    }
}

pub const MAX_PRECISION: u32 = 12;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_squarefree(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    let mut n = d.unsigned_abs();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            n /= q;
            if n % q == 0 {
                return false;
            }
        }
        q += 1;
    }
    true
}

pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Splitting type of the prime p in Q(sqrt(d)) for squarefree d.
pub fn quadratic_splitting(d: i64, p: u64) -> Result<SplittingType, LocalError> {
    if !is_squarefree(d) || d == 1 {
        return Err(LocalError::BadInput(format!("d = {d} is not squarefree (or is 1)")));
    }
    if !is_prime(p) {
        return Err(LocalError::BadInput(format!("{p} is not prime")));
    }
    let disc: i64 = if d.rem_euclid(4) == 1 { d } else { 4 * d };
    if (disc % p as i64) == 0 {
        return Ok(SplittingType::Ramified);
    }
    if p == 2 {
        // d is odd here (2 unramified forces d = 1 mod 4).
        return Ok(if d.rem_euclid(8) == 1 { SplittingType::Split } else { SplittingType::Inert });
    }
    match legendre_symbol(&BigInt::from(d), p) {
        1 => Ok(SplittingType::Split),
        -1 => Ok(SplittingType::Inert),
        _ => Ok(SplittingType::Ramified),
    }
}

/// Splitting type of p in the cyclic cubic field of conductor f, realized by
/// the index-3 subgroup (the cubes) of (Z/f)^*.
pub fn cubic_splitting(f: u64, p: u64) -> Result<SplittingType, LocalError> {
    if !matches!(f, 7 | 9 | 13) {
        return Err(LocalError::BadInput(format!("unsupported cubic conductor {f}")));
    }
    if !is_prime(p) {
        return Err(LocalError::BadInput(format!("{p} is not prime")));
    }
    if f % p == 0 {
        return Ok(SplittingType::Ramified);
    }
    // Cubes mod f form the unique index-3 subgroup.
    let cubes: std::collections::BTreeSet<u64> = (1..f)
        .filter(|x| num_integer::gcd(*x, f) == 1)
        .map(|x| x * x % f * x % f)
        .collect();
    Ok(if cubes.contains(&(p % f)) { SplittingType::Split } else { SplittingType::Inert })
}

impl LocalExtension {
    /// Quadratic extension Q_p(sqrt(d)), using the maximal-order polynomial.
    pub fn quadratic(d: i64, p: u64) -> Result<Self, LocalError> {
        let splitting = quadratic_splitting(d, p)?;
        let poly = if d.rem_euclid(4) == 1 {
            // t^2 - t + (1-d)/4
            vec![BigInt::from((1 - d) / 4), BigInt::from(-1), BigInt::from(1)]
        } else {
            vec![BigInt::from(-d), BigInt::from(0), BigInt::from(1)]
        };
        Ok(LocalExtension { p, degree: 2, poly, splitting })
    }

    /// Cyclic cubic extension of conductor f in {7, 9, 13}, defined by the
    /// Gaussian-period cubic.
    pub fn cubic(f: u64, p: u64) -> Result<Self, LocalError> {
        let splitting = cubic_splitting(f, p)?;
        let poly: Vec<i64> = match f {
            7 => vec![-1, -2, 1, 1],
            9 => vec![1, -3, 0, 1],
            13 => vec![1, -4, 1, 1],
            _ => unreachable!(),
        };
        Ok(LocalExtension {
            p,
            degree: 3,
            poly: poly.into_iter().map(BigInt::from).collect(),
            splitting,
        })
    }
}

/// Result of a local norm-group computation at precision p^k.
#[derive(Debug, Clone)]
pub struct NormGroupResult {
    pub p: u64,
    pub k: u32,
    /// Generators of the unit-norm image, as residues mod p^k.
    pub unit_image_gens: Vec<u64>,
    /// The full image as a residue set, when small enough to enumerate.
    pub unit_image: Option<std::collections::BTreeSet<u64>>,
    /// [units : unit image].
    pub unit_index: u64,
    /// Minimal positive valuation of a norm.
    pub valuation_step: u32,
    /// Total index [local group : norm group] = unit_index * valuation_step.
    pub index: u64,
    /// Agreement between precision k and k+1.
    pub stable: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_splitting_examples() {
        assert_eq!(quadratic_splitting(-1, 5).unwrap(), SplittingType::Split);
        assert_eq!(quadratic_splitting(2, 5).unwrap(), SplittingType::Inert);
        assert_eq!(quadratic_splitting(-1, 2).unwrap(), SplittingType::Ramified);
        assert_eq!(quadratic_splitting(5, 5).unwrap(), SplittingType::Ramified);
        assert_eq!(quadratic_splitting(-7, 2).unwrap(), SplittingType::Split); // -7 = 1 mod 8
        assert_eq!(quadratic_splitting(5, 2).unwrap(), SplittingType::Inert); // 5 = 5 mod 8
        assert!(quadratic_splitting(12, 5).is_err());
        assert!(quadratic_splitting(-1, 6).is_err());
    }

    #[test]
    fn quadratic_splitting_matches_root_enumeration() {
        // split <=> x^2 = d has a root mod p (odd unramified p).
        for d in [-1i64, 2, -2, 3, -3, 5, -5, 7, -7, 13] {
            for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
                let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
                if disc % p as i64 == 0 {
                    continue;
                }
                let has_root =
                    (0..p).any(|x| (x * x) % p == d.rem_euclid(p as i64) as u64 % p);
                let expected =
                    if has_root { SplittingType::Split } else { SplittingType::Inert };
                assert_eq!(quadratic_splitting(d, p).unwrap(), expected, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn cubic_splitting_examples() {
        // f = 7: split iff p = +-1 mod 7.
        assert_eq!(cubic_splitting(7, 13).unwrap(), SplittingType::Split);
        assert_eq!(cubic_splitting(7, 29).unwrap(), SplittingType::Split);
        assert_eq!(cubic_splitting(7, 2).unwrap(), SplittingType::Inert);
        assert_eq!(cubic_splitting(7, 7).unwrap(), SplittingType::Ramified);
        // f = 9: split iff p = +-1 mod 9.
        assert_eq!(cubic_splitting(9, 17).unwrap(), SplittingType::Split);
        assert_eq!(cubic_splitting(9, 19).unwrap(), SplittingType::Split);
        assert_eq!(cubic_splitting(9, 2).unwrap(), SplittingType::Inert);
        assert_eq!(cubic_splitting(9, 3).unwrap(), SplittingType::Ramified);
        // f = 13: cubes mod 13 are {1,5,8,12}.
        assert_eq!(cubic_splitting(13, 5).unwrap(), SplittingType::Split);
        assert_eq!(cubic_splitting(13, 2).unwrap(), SplittingType::Inert);
        assert_eq!(cubic_splitting(13, 13).unwrap(), SplittingType::Ramified);
        assert!(cubic_splitting(11, 5).is_err());
    }

    #[test]
    fn primality_and_squarefree() {
        assert!(is_prime(2) && is_prime(97) && !is_prime(1) && !is_prime(91));
        assert!(is_squarefree(-163) && is_squarefree(6) && !is_squarefree(12) && !is_squarefree(0));
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
    }
}
