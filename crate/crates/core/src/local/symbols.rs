//! Hilbert symbols over every completion of Q: the classical case formulas
//! (Legendre symbols at odd p, the mod-8 characters at 2, signs at infinity)
//! cross-validated by a brute-force conic-solvability oracle at finite
//! precision.

use super::{is_prime, LocalError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Place {
    Finite(u64),
    Infinity,
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

/// Legendre symbol (a|p) in {-1, 0, 1} for an odd prime p.
pub fn legendre_symbol(a: &BigInt, p: u64) -> i32 {
    debug_assert!(p > 2 && is_prime(p));
    let pb = BigInt::from(p);
    let a = a.mod_floor(&pb);
    if a.is_zero() {
        return 0;
    }
    let e = BigInt::from((p - 1) / 2);
    let r = a.modpow(&e, &pb);
    if r == BigInt::from(1) {
        1
    } else {
        -1
    }
}

/// p-adic valuation of a nonzero rational.
fn val_p(x: &BigRational, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let mut v = 0i64;
    let mut n = x.numer().abs();
    while (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    let mut d = x.denom().clone();
    while (&d % &pb).is_zero() {
        d /= &pb;
        v -= 1;
    }
    v
}

/// The p-free unit part of x, reduced mod p^j (j >= 1).
fn unit_part_mod(x: &BigRational, p: u64, j: u32) -> u64 {
    let pb = BigInt::from(p);
    let mut n = x.numer().clone();
    while (&n % &pb).is_zero() {
        n /= &pb;
    }
    let mut d = x.denom().clone();
    while (&d % &pb).is_zero() {
        d /= &pb;
    }
    let m = p.pow(j);
    let mb = BigInt::from(m);
    let n_red = n.mod_floor(&mb).to_u64().expect("reduced");
    let d_red = d.mod_floor(&mb).to_u64().expect("reduced");
    let inv = super::ring::modinv(d_red, m);
    (inv as u128 * n_red as u128 % m as u128) as u64
}

/// Hilbert symbol (a, b)_v in {+1, -1}: whether z^2 = a x^2 + b y^2 has a
/// nontrivial solution over the completion at v. Case formulas throughout.
pub fn hilbert_symbol(
    a: &BigRational,
    b: &BigRational,
    place: Place,
) -> Result<i32, LocalError> {
    if a.is_zero() || b.is_zero() {
        return Err(LocalError::BadInput("Hilbert symbol needs nonzero arguments".into()));
    }
    match place {
        Place::Infinity => {
            Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 })
        }
        Place::Finite(2) => {
            let alpha = val_p(a, 2);
            let beta = val_p(b, 2);
            let u = unit_part_mod(a, 2, 3); // mod 8
            let v = unit_part_mod(b, 2, 3);
            let eps = |x: u64| ((x - 1) / 2) % 2; // (x-1)/2 mod 2
            let omega = |x: u64| ((x * x - 1) / 8) % 2; // (x^2-1)/8 mod 2
            let exponent = eps(u) * eps(v)
                + (alpha.rem_euclid(2) as u64) * omega(v)
                + (beta.rem_euclid(2) as u64) * omega(u);
            Ok(if exponent % 2 == 0 { 1 } else { -1 })
        }
        Place::Finite(p) => {
            if !is_prime(p) {
                return Err(LocalError::BadInput(format!("{p} is not prime")));
            }
            let alpha = val_p(a, p);
            let beta = val_p(b, p);
            let u = BigInt::from(unit_part_mod(a, p, 1));
            let v = BigInt::from(unit_part_mod(b, p, 1));
            let mut sign = 1i32;
            if (alpha * beta).rem_euclid(2) == 1 && (p - 1) / 2 % 2 == 1 {
                sign = -sign;
            }
            if beta.rem_euclid(2) == 1 {
                sign *= legendre_symbol(&u, p);
            }
            if alpha.rem_euclid(2) == 1 {
                sign *= legendre_symbol(&v, p);
            }
            Ok(sign)
        }
    }
}

/// Convenience entry for integer arguments.
pub fn hilbert_symbol_rational(a: i64, b: i64, place: Place) -> Result<i32, LocalError> {
    hilbert_symbol(
        &BigRational::from(BigInt::from(a)),
        &BigRational::from(BigInt::from(b)),
        place,
    )
}

/// Brute-force oracle: does z^2 = a x^2 + b y^2 have a primitive solution mod
/// p^k? For Hensel-stable k (3 at odd p, 5 at p = 2, with a and b scaled to
/// valuation 0 or 1) this decides solvability over Q_p.
pub fn conic_solvable(a: &BigRational, b: &BigRational, p: u64, k: u32) -> bool {
    let m = p.pow(k);
    // Scale by squares: valuations to {0,1}, denominators cleared.
    let reduce = |x: &BigRational| -> u64 {
        let v = val_p(x, p).rem_euclid(2) as u32;
        let u = unit_part_mod(x, p, k);
        u * p.pow(v) % m
    };
    let aa = reduce(a);
    let bb = reduce(b);
    let squares: std::collections::HashSet<u64> =
        (0..m).map(|z| ((z as u128 * z as u128) % m as u128) as u64).collect();
    for x in 0..m {
        let ax2 = (aa as u128 * x as u128 % m as u128 * x as u128 % m as u128) as u64;
        for y in 0..m {
            if x % p == 0 && y % p == 0 {
                continue; // both divisible: cannot be primitive (z would be a unit square of positive valuation)
            }
            let by2 = (bb as u128 * y as u128 % m as u128 * y as u128 % m as u128) as u64;
            if squares.contains(&((ax2 + by2) % m)) {
                return true;
            }
        }
    }
    false
}

/// The finite places where (a, b) can possibly be -1: the primes dividing
/// 2 a b (numerators and denominators).
pub fn relevant_places(a: &BigRational, b: &BigRational) -> Vec<Place> {
    let mut primes = std::collections::BTreeSet::new();
    primes.insert(2u64);
    for big in [a.numer(), a.denom(), b.numer(), b.denom()] {
        let mut n = big.abs().to_u64().expect("desk-scale symbol arguments");
        let mut q = 2u64;
        while q * q <= n {
            if n % q == 0 {
                primes.insert(q);
                while n % q == 0 {
                    n /= q;
                }
            }
            q += 1;
        }
        if n > 1 {
            primes.insert(n);
        }
    }
    let mut out: Vec<Place> = primes.into_iter().map(Place::Finite).collect();
    out.push(Place::Infinity);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn sym(a: i64, b: i64, place: Place) -> i32 {
        hilbert_symbol_rational(a, b, place).unwrap()
    }

    #[test]
    fn classic_values() {
        assert_eq!(sym(-1, -1, Place::Finite(2)), -1);
        assert_eq!(sym(-1, -1, Place::Infinity), -1);
        assert_eq!(sym(2, 5, Place::Finite(5)), -1);
        for b in [-7i64, -2, 3, 10] {
            for v in [Place::Infinity, Place::Finite(2), Place::Finite(3), Place::Finite(5)] {
                assert_eq!(sym(1, b, v), 1, "(1, {b})_{v} must be +1");
            }
        }
        assert!(hilbert_symbol_rational(0, 3, Place::Infinity).is_err());
    }

    #[test]
    fn oracle_agrees_on_classics() {
        let r = |x: i64| BigRational::from(BigInt::from(x));
        assert!(!conic_solvable(&r(-1), &r(-1), 2, 5));
        assert!(!conic_solvable(&r(2), &r(5), 5, 2));
        assert!(conic_solvable(&r(-1), &r(2), 2, 5)); // z^2 = -x^2 + 2y^2: (1,1,1)
        assert!(conic_solvable(&r(5), &r(-1), 5, 3));
    }

    #[test]
    fn symbol_matches_oracle_on_small_corpus() {
        let r = |x: i64| BigRational::from(BigInt::from(x));
        for p in [2u64, 3, 5, 7] {
            let k = if p == 2 { 5 } else { 3 };
            for a in [-10i64, -5, -3, -2, -1, 1, 2, 3, 5, 6, 10] {
                for b in [-6i64, -1, 2, 3, 5, 7] {
                    let s = sym(a, b, Place::Finite(p));
                    let o = conic_solvable(&r(a), &r(b), p, k);
                    assert_eq!(s == 1, o, "(a,b,p) = ({a},{b},{p})");
                }
            }
        }
    }

    #[test]
    fn rational_arguments() {
        // (1/2, 5)_2 = (2,5)_2 * (4,5)... direct: val(1/2) = -1 at 2.
        let a = BigRational::new(BigInt::from(1), BigInt::from(2));
        let b = BigRational::from(BigInt::from(5));
        let s = hilbert_symbol(&a, &b, Place::Finite(2)).unwrap();
        // (2^-1 * 1, 5): omega(5) = (25-1)/8 = 3, odd: symbol = -1.
        assert_eq!(s, -1);
        // Symbols are invariant under multiplying arguments by squares.
        let a4 = &a * BigRational::from(BigInt::from(4));
        assert_eq!(hilbert_symbol(&a4, &b, Place::Finite(2)).unwrap(), s);
    }

    #[test]
    fn bilinearity_symmetry_product_formula() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(0x51b3);
        for _ in 0..50 {
            let nz = |rng: &mut rand_chacha::ChaCha20Rng| -> i64 {
                loop {
                    let x = rng.gen_range(-40i64..=40);
                    if x != 0 {
                        return x;
                    }
                }
            };
            let a = nz(&mut rng);
            let b = nz(&mut rng);
            let b2 = nz(&mut rng);
            let ar = BigRational::from(BigInt::from(a));
            let br = BigRational::from(BigInt::from(b));
            let places = relevant_places(&ar, &(&br * BigRational::from(BigInt::from(b2))));
            let mut product = 1i32;
            for v in &places {
                let s_ab = sym(a, b, *v);
                // symmetry
                assert_eq!(s_ab, sym(b, a, *v));
                // bilinearity
                assert_eq!(sym(a, b * b2, *v), s_ab * sym(a, b2, *v));
                product *= s_ab;
            }
            assert_eq!(product, 1, "product formula fails for ({a}, {b})");
        }
    }
}
