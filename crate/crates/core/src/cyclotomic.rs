//! Exact arithmetic in Q[x]/Phi_e(x), the value ring for characters and
//! trace sums.
//!
//! Values are stored as sparse polynomials in zeta_e with exponents reduced
//! mod e (i.e. representatives in Q[x]/(x^e - 1)); equality and
//! canonicalization divide by the cyclotomic polynomial Phi_e, never by any
//! numerical approximation. Mixed conductors are embedded into the lcm first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

/// An element of Q[x]/Phi_e(x).
#[derive(Debug, Clone)]
pub struct CyclotomicValue {
    conductor: u64,
    /// exponent (mod conductor) -> rational coefficient; no zero entries.
    coeffs: BTreeMap<u64, BigRational>,
}

struct ConductorTable {
    phi: usize,
    /// Reduction rows: x^(phi + i) mod Phi_e for i in 0..e-phi, as integer
    /// coefficient vectors of length phi.
    reductions: Vec<Vec<BigInt>>,
}

fn table_cache() -> &'static Mutex<std::collections::HashMap<u64, Arc<ConductorTable>>> {
    static CACHE: OnceLock<Mutex<std::collections::HashMap<u64, Arc<ConductorTable>>>> =
        OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(std::collections::HashMap::new()))
}

/// Euler phi by trial division (desk-scale conductors).
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Coefficients of Phi_e, low degree first, computed by exact division of
/// x^e - 1 by all lower cyclotomic polynomials.
pub fn cyclotomic_polynomial(e: u64) -> Vec<BigInt> {
    assert!(e >= 1);
    // x^e - 1
    let mut num = vec![BigInt::zero(); e as usize + 1];
    num[0] = -BigInt::one();
    num[e as usize] = BigInt::one();
    for d in 1..e {
        if e % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = poly_div_exact(&num, &phi_d);
        }
    }
    num
}

/// Exact division of integer polynomials (monic divisor), low degree first.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem: Vec<BigInt> = num.to_vec();
    let dn = num.len() - 1;
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let c = rem[k + dd].clone();
        if !c.is_zero() {
            quot[k] = c.clone();
            for j in 0..=dd {
                rem[k + j] -= &c * &den[j];
            }
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

fn table_for(e: u64) -> Arc<ConductorTable> {
    {
        let cache = table_cache().lock().unwrap();
        if let Some(t) = cache.get(&e) {
            return Arc::clone(t);
        }
    }
    let phi_poly = cyclotomic_polynomial(e);
    let phi = phi_poly.len() - 1;
    // Row i: x^(phi+i) mod Phi_e. x^phi = -(lower coefficients); each next row
    // is the previous one shifted with the overflow folded back in.
    let mut reductions: Vec<Vec<BigInt>> = Vec::with_capacity((e as usize).saturating_sub(phi));
    if phi > 0 {
        let base: Vec<BigInt> = (0..phi).map(|j| -phi_poly[j].clone()).collect();
        let mut cur = base.clone();
        for _ in 0..(e as usize - phi) {
            reductions.push(cur.clone());
            // multiply by x: shift up, fold x^phi via base
            let overflow = cur[phi - 1].clone();
            let mut next = vec![BigInt::zero(); phi];
            for j in (1..phi).rev() {
                next[j] = cur[j - 1].clone();
            }
            for j in 0..phi {
                next[j] += &overflow * &base[j];
            }
            cur = next;
        }
    }
    let table = Arc::new(ConductorTable { phi, reductions });
    table_cache().lock().unwrap().insert(e, Arc::clone(&table));
    table
}

impl CyclotomicValue {
    pub fn zero() -> Self {
        CyclotomicValue { conductor: 1, coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(n)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !q.is_zero() {
            coeffs.insert(0, q);
        }
        CyclotomicValue { conductor: 1, coeffs }
    }

    /// zeta_e^k, with k reduced mod e.
    pub fn zeta(e: u64, k: i64) -> Self {
        assert!(e >= 1);
        let kk = BigInt::from(k).mod_floor(&BigInt::from(e));
        let exp: u64 = kk.to_string().parse().expect("reduced exponent");
        let mut coeffs = BTreeMap::new();
        coeffs.insert(exp, BigRational::one());
        CyclotomicValue { conductor: e, coeffs }
    }

    pub fn zeta_pow_big(e: u64, k: &BigInt) -> Self {
        let kk = k.mod_floor(&BigInt::from(e));
        let exp: u64 = kk.to_string().parse().expect("reduced exponent");
        let mut coeffs = BTreeMap::new();
        coeffs.insert(exp, BigRational::one());
        CyclotomicValue { conductor: e, coeffs }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Fast structural zero test (sufficient, not necessary).
    fn is_structurally_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Re-expresses the value in a multiple of its conductor.
    pub fn embed(&self, new_conductor: u64) -> Self {
        assert!(new_conductor % self.conductor == 0, "embedding needs a multiple conductor");
        let scale = new_conductor / self.conductor;
        let coeffs =
            self.coeffs.iter().map(|(k, c)| (k * scale, c.clone())).collect::<BTreeMap<_, _>>();
        CyclotomicValue { conductor: new_conductor, coeffs }
    }

    fn lcm_conductor(&self, other: &Self) -> u64 {
        self.conductor.lcm(&other.conductor)
    }

    pub fn add(&self, other: &Self) -> Self {
        let e = self.lcm_conductor(other);
        let mut a = self.embed(e);
        for (k, c) in other.embed(e).coeffs {
            let entry = a.coeffs.entry(k).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                a.coeffs.remove(&k);
            }
        }
        a
    }

    pub fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }

    pub fn neg(&self) -> Self {
        CyclotomicValue {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let e = self.lcm_conductor(other);
        let a = self.embed(e);
        let b = other.embed(e);
        let mut coeffs: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (ka, ca) in &a.coeffs {
            for (kb, cb) in &b.coeffs {
                let k = (ka + kb) % e;
                let entry = coeffs.entry(k).or_insert_with(BigRational::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    coeffs.remove(&k);
                }
            }
        }
        CyclotomicValue { conductor: e, coeffs }
    }

    pub fn scalar_mul(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        CyclotomicValue {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, c * q)).collect(),
        }
    }

    pub fn scalar_mul_int(&self, n: i64) -> Self {
        self.scalar_mul(&BigRational::from(BigInt::from(n)))
    }

    /// Multiplies by zeta_e^k where e is this value's conductor.
    pub fn mul_zeta_pow(&self, k: u64) -> Self {
        let e = self.conductor;
        let k = k % e;
        let coeffs = self.coeffs.iter().map(|(j, c)| ((j + k) % e, c.clone())).collect();
        CyclotomicValue { conductor: e, coeffs }
    }

    /// Canonical coefficient vector in the power basis 1, x, ..., x^(phi-1)
    /// of Q[x]/Phi_e, obtained by exact polynomial remainder.
    pub fn canonical_coeffs(&self) -> Vec<BigRational> {
        let table = table_for(self.conductor);
        let mut out = vec![BigRational::zero(); table.phi];
        for (&k, c) in &self.coeffs {
            let k = k as usize;
            if k < table.phi {
                out[k] += c;
            } else {
                let row = &table.reductions[k - table.phi];
                for (j, r) in row.iter().enumerate() {
                    if !r.is_zero() {
                        out[j] += c * BigRational::from(r.clone());
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        if self.is_structurally_zero() {
            return true;
        }
        self.canonical_coeffs().iter().all(|c| c.is_zero())
    }

    /// The rational this value equals, if it is rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        let canon = self.canonical_coeffs();
        if canon.iter().skip(1).all(|c| c.is_zero()) {
            Some(canon.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        let q = self.to_rational()?;
        if q.denom().is_one() {
            Some(q.numer().clone())
        } else {
            None
        }
    }
}

impl PartialEq for CyclotomicValue {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for CyclotomicValue {}

impl std::fmt::Display for CyclotomicValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{q}");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                if *k == 0 {
                    format!("{c}")
                } else if c.is_one() {
                    format!("z{}^{k}", self.conductor)
                } else {
                    format!("{c}*z{}^{k}", self.conductor)
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta4_squared_is_minus_one() {
        let z = CyclotomicValue::zeta(4, 1);
        assert_eq!(z.mul(&z), CyclotomicValue::from_integer(-1));
    }

    #[test]
    fn zeta3_orthogonality() {
        let sum = CyclotomicValue::zeta(3, 0)
            .add(&CyclotomicValue::zeta(3, 1))
            .add(&CyclotomicValue::zeta(3, 2));
        assert!(sum.is_zero());
    }

    #[test]
    fn zeta6_inverse() {
        let prod = CyclotomicValue::zeta(6, 1).mul(&CyclotomicValue::zeta(6, 5));
        assert_eq!(prod, CyclotomicValue::one());
        assert_eq!(prod.to_integer(), Some(BigInt::one()));
    }

    #[test]
    fn mixed_conductor_equality() {
        // zeta_6^3 = -1 = zeta_2
        assert_eq!(CyclotomicValue::zeta(6, 3), CyclotomicValue::zeta(2, 1));
        // zeta_6 = -zeta_3^2
        assert_eq!(CyclotomicValue::zeta(6, 1), CyclotomicValue::zeta(3, 2).neg());
    }

    #[test]
    fn cyclotomic_polynomials_known() {
        let to_i64 = |v: Vec<BigInt>| -> Vec<i64> {
            v.iter().map(|c| c.to_string().parse().unwrap()).collect()
        };
        assert_eq!(to_i64(cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(to_i64(cyclotomic_polynomial(2)), vec![1, 1]);
        assert_eq!(to_i64(cyclotomic_polynomial(4)), vec![1, 0, 1]);
        assert_eq!(to_i64(cyclotomic_polynomial(6)), vec![1, -1, 1]);
        assert_eq!(to_i64(cyclotomic_polynomial(12)), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(105).len() as u64, euler_phi(105) + 1);
    }

    #[test]
    fn full_orthogonality_sums() {
        // sum over k of zeta_e^(j*k) = e when e | j, else 0.
        for e in [1u64, 2, 3, 4, 5, 6, 8, 9, 12] {
            for j in 0..e {
                let mut s = CyclotomicValue::zero();
                for k in 0..e {
                    s.add_assign(&CyclotomicValue::zeta(e, (j * k) as i64));
                }
                if j == 0 {
                    assert_eq!(s.to_integer(), Some(BigInt::from(e)));
                } else {
                    assert!(s.is_zero(), "e={e} j={j}");
                }
            }
        }
    }

    #[test]
    fn rational_coefficients_exact() {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let v = CyclotomicValue::zeta(5, 1).scalar_mul(&half);
        let w = v.add(&v);
        assert_eq!(w, CyclotomicValue::zeta(5, 1));
        assert!(v.sub(&v).is_zero());
        assert_eq!(v.to_rational(), None);
    }

    #[test]
    fn mul_zeta_pow_matches_mul() {
        let v = CyclotomicValue::zeta(12, 5).add(&CyclotomicValue::from_integer(3));
        let a = v.mul_zeta_pow(7);
        let b = v.mul(&CyclotomicValue::zeta(12, 7));
        assert_eq!(a, b);
    }
}
