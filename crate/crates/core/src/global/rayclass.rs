//! The finite model of the idele class group of Q modulo a conductor m and
//! the infinite place: the carrier is (Z/m)^* (with the positive-
//! representative convention; without the infinity condition, residues are
//! folded by +-1).

use super::GlobalError;
use crate::group::{enumerate_abelian_from_pool, EnumeratedAbelianGroup, GroupElement};
use crate::local::factor_u64;
use crate::local::modinv;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone)]
pub struct RayClassModel {
    pub modulus: u64,
    pub infinity: bool,
    /// Prime-power factorization of the modulus.
    factors: Vec<(u64, u32)>,
    carrier: EnumeratedAbelianGroup<u64>,
}

fn modmul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl RayClassModel {
    pub fn new(modulus: u64, infinity: bool) -> Result<Self, GlobalError> {
        if modulus < 3 {
            return Err(GlobalError::BadInput(format!(
                "modulus {modulus} too small for a ray-class model"
            )));
        }
        let fold = move |x: u64| -> u64 {
            if infinity {
                x
            } else {
                x.min(modulus - x)
            }
        };
        let pool = (2..modulus).filter(|x| num_integer::gcd(*x, modulus) == 1).map(fold);
        let carrier =
            enumerate_abelian_from_pool(1u64, pool, move |a, b| fold(modmul(*a, *b, modulus)));
        Ok(RayClassModel { modulus, infinity, factors: factor_u64(modulus), carrier })
    }

    pub fn order(&self) -> u64 {
        self.carrier.order() as u64
    }

    fn fold(&self, x: u64) -> u64 {
        if self.infinity {
            x
        } else {
            x.min(self.modulus - x)
        }
    }

    pub fn class_element(&self, residue: u64) -> Result<GroupElement, GlobalError> {
        let r = residue % self.modulus;
        if num_integer::gcd(r, self.modulus) != 1 {
            return Err(GlobalError::NotCoprime);
        }
        Ok(self
            .carrier
            .coords_of(&self.fold(r))
            .cloned()
            .expect("carrier covers all coprime residues"))
    }

    /// Class of a rational coprime to the modulus: |r| mod m, the positive-
    /// representative convention. Signs never enter here; the infinite place
    /// contributes only through the explicit `infinity_class` generator.
    pub fn class_of_rational(&self, r: &BigRational) -> Result<u64, GlobalError> {
        if r.is_zero() {
            return Err(GlobalError::BadInput("zero has no class".into()));
        }
        let m = BigInt::from(self.modulus);
        let num = r.numer().abs().mod_floor(&m).to_u64().expect("reduced");
        let den = r.denom().mod_floor(&m).to_u64().expect("reduced");
        if num_integer::gcd(num, self.modulus) != 1 || num_integer::gcd(den, self.modulus) != 1 {
            return Err(GlobalError::NotCoprime);
        }
        Ok(self.fold(modmul(num, modinv(den, self.modulus), self.modulus)))
    }

    /// Class of the idele concentrated at p with value p^a * u, where u must
    /// be known mod p^(v_p(m)+1) at least. The canonical decomposition against
    /// the unique positive rational p^a gives the closed-form class:
    /// CRT(u mod p^(v_p(m)), p^(-a) mod q^(v_q(m)) for the other q | m).
    pub fn idele_class(&self, p: u64, a: i64, u: u64, k: u32) -> Result<u64, GlobalError> {
        if !crate::local::is_prime(p) {
            return Err(GlobalError::BadInput(format!("{p} is not prime")));
        }
        let vp = self.factors.iter().find(|(q, _)| *q == p).map(|(_, e)| *e).unwrap_or(0);
        if k < vp + 1 {
            return Err(GlobalError::BadInput(format!(
                "idele unit residue needs precision at least v_p(m)+1 = {}",
                vp + 1
            )));
        }
        if u % p == 0 {
            return Err(GlobalError::NotCoprime);
        }
        let mut residue = 1u64;
        let mut partial_modulus = 1u64;
        for &(q, e) in &self.factors {
            let qe = q.pow(e);
            let component = if q == p {
                u % qe
            } else {
                // p^(-a) mod q^e
                let pa = if a >= 0 {
                    pow_mod(p % qe, a as u64, qe)
                } else {
                    modinv(pow_mod(p % qe, (-a) as u64, qe), qe)
                };
                modinv(pa, qe)
            };
            residue = crt_combine(residue, partial_modulus, component, qe);
            partial_modulus *= qe;
        }
        Ok(self.fold(residue % self.modulus))
    }

    /// Class of the idele that is -1 at the infinite place and 1 elsewhere.
    pub fn infinity_class(&self) -> u64 {
        self.fold(self.modulus - 1)
    }

    /// The class of the full diagonal of a rational coprime to m, decomposed
    /// as the product of its prime-concentrated pieces times the residual
    /// unit diagonal |r| mod m. A diagonal is principal, so this must always
    /// return the identity — the consistency check tying `idele_class` to
    /// `class_of_rational`.
    pub fn diagonal_class(&self, r: &BigRational) -> Result<u64, GlobalError> {
        let mut acc = 1u64;
        let combine = |acc: &mut u64, c: u64| *acc = self.fold(modmul(*acc, c, self.modulus));
        let num = r.numer().abs().to_u64().expect("desk scale");
        let den = r.denom().to_u64().expect("desk scale");
        for (p, e) in factor_u64(num) {
            combine(&mut acc, self.idele_class(p, e as i64, unit_part_mod(r, p, p), 1)?);
        }
        for (p, e) in factor_u64(den) {
            combine(&mut acc, self.idele_class(p, -(e as i64), unit_part_mod(r, p, p), 1)?);
        }
        // The residual unit diagonal: r at every other place, positive ratio
        // at infinity after dividing by sign(r) * p-content.
        combine(&mut acc, self.class_of_rational(r)?);
        Ok(acc)
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = modmul(acc, b, m);
        }
        b = modmul(b, b, m);
        e >>= 1;
    }
    acc
}

fn crt_combine(a: u64, m: u64, b: u64, n: u64) -> u64 {
    // x = a mod m, x = b mod n, gcd(m, n) = 1
    if m == 1 {
        return b % n;
    }
    let diff = (b % n + n - a % n) % n;
    let step = modmul(diff, modinv(m % n, n), n);
    a + m * step
}

/// The p-free unit part of r, reduced mod `modulus` (a power of p).
fn unit_part_mod(r: &BigRational, p: u64, modulus: u64) -> u64 {
    let pb = BigInt::from(p);
    let mb = BigInt::from(modulus);
    let mut n = r.numer().clone();
    while (&n % &pb).is_zero() {
        n /= &pb;
    }
    let mut d = r.denom().clone();
    while (&d % &pb).is_zero() {
        d /= &pb;
    }
    let nr = n.mod_floor(&mb).to_u64().expect("reduced");
    let dr = d.mod_floor(&mb).to_u64().expect("reduced");
    modmul(nr, modinv(dr, modulus), modulus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn carrier_structure() {
        let m = RayClassModel::new(4, true).unwrap();
        assert_eq!(m.order(), 2);
        let m = RayClassModel::new(20, true).unwrap();
        assert_eq!(m.order(), 8);
        let folded = RayClassModel::new(20, false).unwrap();
        assert_eq!(folded.order(), 4);
    }

    #[test]
    fn class_of_rational_properties() {
        let m = RayClassModel::new(20, true).unwrap();
        // multiplicative
        let a = rat(3);
        let b = rat(7);
        let ab = &a * &b;
        assert_eq!(
            m.class_of_rational(&ab).unwrap(),
            modmul(m.class_of_rational(&a).unwrap(), m.class_of_rational(&b).unwrap(), 20)
        );
        // trivial on positive rationals = 1 mod m; nontrivial on 3
        assert_eq!(m.class_of_rational(&rat(21)).unwrap(), 1);
        assert_eq!(m.class_of_rational(&rat(3)).unwrap(), 3);
        assert!(m.class_of_rational(&rat(5)).is_err());
        // rational arguments
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert_eq!(m.class_of_rational(&third).unwrap(), 7); // 3*7 = 21 = 1 mod 20
    }

    #[test]
    fn idele_class_examples() {
        // model m = 4: the idele "2 at p = 2" lands in the identity class.
        let m = RayClassModel::new(4, true).unwrap();
        assert_eq!(m.idele_class(2, 1, 1, 3).unwrap(), 1);
        // unit idele at p not dividing m: identity.
        assert_eq!(m.idele_class(7, 0, 1, 1).unwrap(), 1);
        // the idele "5 at p = 5": class of 5^{-1} = 1 mod 4.
        assert_eq!(m.idele_class(5, 1, 1, 1).unwrap(), 1);
        // the idele "3 at p = 3" on m = 4: 3^{-1} = 3 mod 4.
        assert_eq!(m.idele_class(3, 1, 1, 1).unwrap(), 3);
        // precision guard
        assert!(m.idele_class(2, 1, 1, 1).is_err());
    }

    #[test]
    fn diagonal_ideles_are_trivial() {
        // The diagonal embedding of any rational coprime to m has the
        // identity class; this ties idele_class to class_of_rational.
        for modulus in [4u64, 5, 20, 163] {
            let m = RayClassModel::new(modulus, true).unwrap();
            for r in [3i64, -3, 7, -7, 9, 55, -55, 6, -1, 2, -30] {
                if num_integer::gcd(r.unsigned_abs(), modulus) != 1 {
                    continue;
                }
                let c = m.diagonal_class(&rat(r)).unwrap();
                assert_eq!(c, 1, "diagonal of {r} mod {modulus} is not trivial");
            }
            // and non-integral rationals
            let half = BigRational::new(BigInt::from(1), BigInt::from(2));
            let frac = BigRational::new(BigInt::from(-21), BigInt::from(11));
            if modulus % 2 != 0 {
                assert_eq!(m.diagonal_class(&half).unwrap(), 1);
            }
            if modulus % 3 != 0 && modulus % 7 != 0 && modulus % 11 != 0 {
                assert_eq!(m.diagonal_class(&frac).unwrap(), 1);
            }
        }
    }

    #[test]
    fn idele_class_multiplicative_in_local_value() {
        let m = RayClassModel::new(20, true).unwrap();
        // (p^a u)(p^b v) = p^(a+b) uv at p = 3
        let c1 = m.idele_class(3, 1, 2, 2).unwrap();
        let c2 = m.idele_class(3, 2, 5, 2).unwrap();
        let c12 = m.idele_class(3, 3, 10, 2).unwrap();
        assert_eq!(modmul(c1, c2, 20), c12);
        // at the dividing prime p = 5 with enough precision
        let c1 = m.idele_class(5, 0, 7, 2).unwrap();
        let c2 = m.idele_class(5, 1, 11, 2).unwrap();
        let c12 = m.idele_class(5, 1, 77 % 25, 2).unwrap();
        assert_eq!(modmul(c1, c2, 20), c12);
    }
}
