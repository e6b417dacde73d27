//! Number-theoretic instantiation over Q: quadratic and cyclic cubic fields,
//! ray-class models of the idele class group, global norm indices, the
//! Hasse-norm oracle, and the bridge that builds arithmetic sigma-modules.

mod bridge;
mod forms;
mod hasse;
mod normindex;
mod rayclass;

pub use bridge::{build_sigma_module, build_sigma_module_with_policy, BridgeOutcome};
pub use forms::{class_group_imag, fundamental_unit_real, ClassGroup, ReducedForm};
pub use hasse::{hasse_check, is_global_norm, is_local_norm_everywhere, HasseOutcome, NormEquationResult};
pub use normindex::{norm_index, norm_subgroup, FieldData, NormIndexReport};
pub use rayclass::RayClassModel;

use crate::local::{is_squarefree, LocalError};
use crate::sigma::SigmaError;
use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GlobalError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("argument is not coprime to the modulus")]
    NotCoprime,
    #[error("no principal-ideal generator found for the prime {prime} within height {bound}")]
    GeneratorSearchFailed { prime: u64, bound: u64 },
    #[error("Hilbert 90 fails on the constructed module (defect {defect}) at precision {k}")]
    H90Defect { defect: String, k: u32 },
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Sigma(#[from] SigmaError),
}

/// A quadratic field Q(sqrt(d)) for squarefree d.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadField {
    pub d: i64,
    pub discriminant: i64,
    /// |discriminant|, the modulus of the ray-class model.
    pub conductor: u64,
    pub real: bool,
}

impl QuadField {
    pub fn ramified_primes(&self) -> Vec<u64> {
        crate::local::factor_u64(self.conductor).into_iter().map(|(p, _)| p).collect()
    }

    /// Monic minimal polynomial of the maximal-order generator.
    pub fn order_polynomial(&self) -> Vec<BigInt> {
        if self.d.rem_euclid(4) == 1 {
            vec![BigInt::from((1 - self.d) / 4), BigInt::from(-1), BigInt::from(1)]
        } else {
            vec![BigInt::from(-self.d), BigInt::from(0), BigInt::from(1)]
        }
    }

    /// Norm of x + y*omega, where omega generates the maximal order.
    pub fn norm(&self, x: &BigInt, y: &BigInt) -> BigInt {
        if self.d.rem_euclid(4) == 1 {
            // omega = (1+sqrt d)/2: N = x^2 + xy + y^2 (1-d)/4
            x * x + x * y + y * y * BigInt::from((1 - self.d) / 4)
        } else {
            x * x - y * y * BigInt::from(self.d)
        }
    }

    /// The Galois conjugate of x + y*omega in the same basis.
    pub fn conjugate(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        if self.d.rem_euclid(4) == 1 {
            // omega -> 1 - omega
            (x + y, -y)
        } else {
            (x.clone(), -y)
        }
    }
}

/// Discriminant and conductor per the classical rules.
pub fn field_data(d: i64) -> Result<QuadField, GlobalError> {
    if d == 0 || d == 1 || !is_squarefree(d) {
        return Err(GlobalError::BadInput(format!("d = {d} must be squarefree, not 0 or 1")));
    }
    let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
    Ok(QuadField {
        d,
        discriminant,
        conductor: discriminant.unsigned_abs(),
        real: d > 0,
    })
}

/// A cyclic cubic field from the supported conductor list, realized inside
/// the f-th cyclotomic level by the index-3 subgroup of (Z/f)^*.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicCubicField {
    pub conductor: u64,
    /// Monic defining cubic (a Gaussian-period polynomial), low degree first.
    pub poly: Vec<BigInt>,
}

pub fn cubic_data(f: u64) -> Result<CyclicCubicField, GlobalError> {
    let poly: Vec<i64> = match f {
        7 => vec![-1, -2, 1, 1],
        9 => vec![1, -3, 0, 1],
        13 => vec![1, -4, 1, 1],
        _ => {
            return Err(GlobalError::BadInput(format!(
                "unsupported cubic conductor {f} (supported: 7, 9, 13)"
            )))
        }
    };
    Ok(CyclicCubicField { conductor: f, poly: poly.into_iter().map(BigInt::from).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_data_examples() {
        let f = field_data(-1).unwrap();
        assert_eq!((f.discriminant, f.conductor, f.real), (-4, 4, false));
        let f = field_data(5).unwrap();
        assert_eq!((f.discriminant, f.conductor, f.real), (5, 5, true));
        let f = field_data(-5).unwrap();
        assert_eq!((f.discriminant, f.conductor), (-20, 20));
        let f = field_data(-163).unwrap();
        assert_eq!((f.discriminant, f.conductor), (-163, 163));
        assert!(field_data(12).is_err());
        assert!(field_data(1).is_err());
        assert!(cubic_data(11).is_err());
        assert_eq!(cubic_data(9).unwrap().conductor, 9);
    }

    #[test]
    fn quad_norm_and_conjugate() {
        let f = field_data(-1).unwrap();
        // N(2 + i) = 5
        assert_eq!(f.norm(&BigInt::from(2), &BigInt::from(1)), BigInt::from(5));
        let f5 = field_data(5).unwrap();
        // omega = (1+sqrt5)/2: N(omega) = (1-5)/4 = -1
        assert_eq!(f5.norm(&BigInt::from(0), &BigInt::from(1)), BigInt::from(-1));
        // conjugation is an involution preserving the norm
        for (x, y) in [(3i64, 2i64), (-1, 4), (7, -5)] {
            for field in [&f, &f5] {
                let (cx, cy) = field.conjugate(&BigInt::from(x), &BigInt::from(y));
                assert_eq!(field.norm(&cx, &cy), field.norm(&BigInt::from(x), &BigInt::from(y)));
                let (bx, by) = field.conjugate(&cx, &cy);
                assert_eq!((bx, by), (BigInt::from(x), BigInt::from(y)));
            }
        }
    }
}
