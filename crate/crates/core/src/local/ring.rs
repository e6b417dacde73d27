//! Arithmetic in (Z/p^k)[t]/(g) for a monic integral polynomial g of degree
//! at most 3 — the finite-precision model of the local ring of integers.
//! Norms are determinants of multiplication matrices; no factorization of g
//! over Q_p is ever needed.

use super::LocalError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

/// An element, as coefficients [c_0, c_1, ...] of length = degree.
pub type RingElem = Vec<u64>;

#[derive(Debug, Clone)]
pub struct PolyModRing {
    pub p: u64,
    pub k: u32,
    /// p^k.
    pub modulus: u64,
    pub degree: usize,
    /// Non-leading coefficients of the monic modulus polynomial, reduced.
    poly_low: Vec<u64>,
}

fn modmul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn modsub(a: u64, b: u64, m: u64) -> u64 {
    (a + m - b % m) % m
}

/// Inverse of a unit mod m (m a prime power).
pub fn modinv(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert_eq!(old_r.abs(), 1, "not a unit mod {m}");
    let inv = old_s * old_r.signum();
    inv.rem_euclid(m as i128) as u64
}

impl PolyModRing {
    pub fn new(p: u64, k: u32, poly: &[BigInt]) -> Result<Self, LocalError> {
        let degree = poly.len() - 1;
        if !(1..=3).contains(&degree) {
            return Err(LocalError::BadInput("only degrees 1..3 are supported".into()));
        }
        if poly[degree] != BigInt::from(1) {
            return Err(LocalError::BadInput("modulus polynomial must be monic".into()));
        }
        let modulus = p
            .checked_pow(k)
            .ok_or_else(|| LocalError::BadInput(format!("p^k overflows: {p}^{k}")))?;
        let m_big = BigInt::from(modulus);
        let poly_low = poly[..degree]
            .iter()
            .map(|c| c.mod_floor(&m_big).to_u64().expect("reduced coefficient"))
            .collect();
        Ok(PolyModRing { p, k, modulus, degree, poly_low })
    }

    /// The same ring at a different precision.
    pub fn at_precision(&self, k: u32) -> Result<Self, LocalError> {
        let mut poly: Vec<BigInt> = self.poly_low.iter().map(|&c| BigInt::from(c)).collect();
        poly.push(BigInt::from(1));
        // poly_low is reduced mod p^self.k; for a higher precision the caller
        // must construct from the exact polynomial instead.
        assert!(k <= self.k, "use PolyModRing::new with the exact polynomial to raise precision");
        PolyModRing::new(self.p, k, &poly)
    }

    pub fn zero(&self) -> RingElem {
        vec![0; self.degree]
    }

    pub fn one(&self) -> RingElem {
        let mut e = self.zero();
        e[0] = 1 % self.modulus;
        e
    }

    pub fn gen_t(&self) -> RingElem {
        let mut e = self.zero();
        if self.degree >= 2 {
            e[1] = 1;
        } else {
            // degree 1: t = -poly_low[0]
            e[0] = modsub(0, self.poly_low[0], self.modulus);
        }
        e
    }

    pub fn from_u64(&self, c: u64) -> RingElem {
        let mut e = self.zero();
        e[0] = c % self.modulus;
        e
    }

    pub fn from_i64(&self, c: i64) -> RingElem {
        self.from_u64(c.rem_euclid(self.modulus as i64) as u64)
    }

    pub fn from_coeffs(&self, coeffs: &[BigInt]) -> RingElem {
        assert!(coeffs.len() <= self.degree);
        let m = BigInt::from(self.modulus);
        let mut e = self.zero();
        for (i, c) in coeffs.iter().enumerate() {
            e[i] = c.mod_floor(&m).to_u64().expect("reduced");
        }
        e
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.modulus).collect()
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        a.iter().zip(b).map(|(x, y)| modsub(*x, *y, self.modulus)).collect()
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        a.iter().map(|x| modsub(0, *x, self.modulus)).collect()
    }

    pub fn scalar_mul(&self, c: u64, a: &RingElem) -> RingElem {
        a.iter().map(|x| modmul(c % self.modulus, *x, self.modulus)).collect()
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let d = self.degree;
        let m = self.modulus;
        // Convolve.
        let mut prod = vec![0u64; 2 * d - 1];
        for i in 0..d {
            if a[i] == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] = (prod[i + j] + modmul(a[i], b[j], m)) % m;
            }
        }
        // Reduce by the monic modulus polynomial: t^d = -poly_low.
        for idx in (d..2 * d - 1).rev() {
            let c = prod[idx];
            if c == 0 {
                continue;
            }
            prod[idx] = 0;
            for j in 0..d {
                let sub = modmul(c, self.poly_low[j], m);
                prod[idx - d + j] = modsub(prod[idx - d + j], sub, m);
            }
        }
        prod.truncate(d);
        prod
    }

    pub fn pow(&self, a: &RingElem, mut e: u64) -> RingElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Columns of the multiplication-by-a matrix (a * t^j for j < degree).
    fn mult_matrix(&self, a: &RingElem) -> Vec<RingElem> {
        let mut cols = Vec::with_capacity(self.degree);
        let mut cur = a.clone();
        for _ in 0..self.degree {
            cols.push(cur.clone());
            cur = self.mul(&cur, &self.gen_t());
        }
        cols
    }

    /// Norm of a: determinant of the multiplication-by-a matrix mod p^k.
    pub fn norm(&self, a: &RingElem) -> u64 {
        let m = self.modulus;
        let cols = self.mult_matrix(a);
        match self.degree {
            1 => cols[0][0] % m,
            2 => {
                let (a00, a10) = (cols[0][0], cols[0][1]);
                let (a01, a11) = (cols[1][0], cols[1][1]);
                modsub(modmul(a00, a11, m), modmul(a01, a10, m), m)
            }
            3 => {
                let a = |i: usize, j: usize| cols[j][i];
                let mut det = 0u64;
                let plus = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];
                let minus = [(2, 1, 0), (0, 2, 1), (1, 0, 2)];
                for (i, j, k) in plus {
                    det = (det + modmul(modmul(a(0, i), a(1, j), m), a(2, k), m)) % m;
                }
                for (i, j, k) in minus {
                    det = modsub(det, modmul(modmul(a(0, i), a(1, j), m), a(2, k), m), m);
                }
                det
            }
            _ => unreachable!(),
        }
    }

    pub fn is_unit(&self, a: &RingElem) -> bool {
        self.norm(a) % self.p != 0
    }

    /// Inverse of a unit, by solving the multiplication system mod p^k.
    pub fn inverse(&self, a: &RingElem) -> RingElem {
        let d = self.degree;
        let m = self.modulus;
        let cols = self.mult_matrix(a);
        // Augmented [M | e_0] in row-major.
        let mut rows: Vec<Vec<u64>> = (0..d)
            .map(|i| {
                let mut r: Vec<u64> = (0..d).map(|j| cols[j][i]).collect();
                r.push(if i == 0 { 1 % m } else { 0 });
                r
            })
            .collect();
        for col in 0..d {
            let pivot = (col..d)
                .find(|&r| rows[r][col] % self.p != 0)
                .expect("unit multiplication matrix has a unit pivot in every column");
            rows.swap(col, pivot);
            let inv = modinv(rows[col][col], m);
            for x in rows[col].iter_mut() {
                *x = modmul(*x, inv, m);
            }
            for r in 0..d {
                if r != col && rows[r][col] != 0 {
                    let factor = rows[r][col];
                    let src = rows[col].clone();
                    for (x, s) in rows[r].iter_mut().zip(&src) {
                        *x = modsub(*x, modmul(factor, *s, m), m);
                    }
                }
            }
        }
        (0..d).map(|i| rows[i][d]).collect()
    }

    /// v_p of the coefficient content (the largest m with p^m dividing every
    /// coefficient), capped at k.
    pub fn content_valuation(&self, a: &RingElem) -> u32 {
        if a.iter().all(|&c| c == 0) {
            return self.k;
        }
        let mut v = u32::MAX;
        for &c in a {
            if c == 0 {
                continue;
            }
            let mut x = c;
            let mut vc = 0;
            while x % self.p == 0 {
                x /= self.p;
                vc += 1;
            }
            v = v.min(vc);
        }
        v
    }

    /// Exact division of every coefficient by p^m; panics when not exact.
    pub fn divide_by_p_power(&self, a: &RingElem, m: u32) -> RingElem {
        let q = self.p.pow(m);
        a.iter()
            .map(|&c| {
                assert_eq!(c % q, 0, "non-exact division by p^{m}");
                c / q
            })
            .collect()
    }

    /// Evaluates an integral polynomial at a ring element.
    pub fn eval_poly(&self, coeffs: &[u64], x: &RingElem) -> RingElem {
        let mut acc = self.zero();
        for &c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &self.from_u64(c));
        }
        acc
    }

    /// Iterates over all ring elements (coefficient odometer).
    pub fn all_elements(&self) -> impl Iterator<Item = RingElem> + '_ {
        let d = self.degree;
        let m = self.modulus;
        let total = (m as u128).pow(d as u32);
        (0..total).map(move |mut idx| {
            let mut e = vec![0u64; d];
            for c in e.iter_mut() {
                *c = (idx % m as u128) as u64;
                idx /= m as u128;
            }
            e
        })
    }

    pub fn element_count(&self) -> u128 {
        (self.modulus as u128).pow(self.degree as u32)
    }
}

/// The Frobenius lift on an unramified extension ring: the unique root of the
/// modulus polynomial congruent to t^p mod p, refined by Newton iteration.
/// Returns the image of t; the automorphism is a + b t + c t^2 ->
/// a + b s + c s^2.
pub fn frobenius_action(ring: &PolyModRing, poly: &[BigInt]) -> Result<RingElem, LocalError> {
    let m = BigInt::from(ring.modulus);
    let g: Vec<u64> = poly
        .iter()
        .map(|c| c.mod_floor(&m).to_u64().expect("reduced"))
        .collect();
    // g' coefficients.
    let dg: Vec<u64> = (1..g.len())
        .map(|i| modmul(i as u64 % ring.modulus, g[i], ring.modulus))
        .collect();
    let mut s = ring.pow(&ring.gen_t(), ring.p);
    for _ in 0..64 {
        let val = ring.eval_poly(&g, &s);
        if val.iter().all(|&c| c == 0) {
            return Ok(s);
        }
        let deriv = ring.eval_poly(&dg, &s);
        if !ring.is_unit(&deriv) {
            return Err(LocalError::PrecisionUnstable { p: ring.p, k: ring.k });
        }
        let step = ring.mul(&val, &ring.inverse(&deriv));
        s = ring.sub(&s, &step);
    }
    Err(LocalError::PrecisionUnstable { p: ring.p, k: ring.k })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_ring(k: u32) -> PolyModRing {
        // Z[i] mod 5^k, i.e. t^2 + 1 (split at 5, but the ring is still fine).
        PolyModRing::new(5, k, &[BigInt::from(1), BigInt::from(0), BigInt::from(1)]).unwrap()
    }

    #[test]
    fn ring_arithmetic_basics() {
        let r = gaussian_ring(2);
        let t = r.gen_t();
        // t^2 = -1
        assert_eq!(r.mul(&t, &t), r.from_i64(-1));
        // norm(a + bt) = a^2 + b^2
        let x = r.from_coeffs(&[BigInt::from(3), BigInt::from(4)]);
        assert_eq!(r.norm(&x), 25 % 25);
        let y = r.from_coeffs(&[BigInt::from(2), BigInt::from(1)]);
        assert_eq!(r.norm(&y), 5);
        let u = r.from_coeffs(&[BigInt::from(2), BigInt::from(3)]);
        assert_eq!(r.norm(&u), 13 % 25);
        assert!(r.is_unit(&u));
        let inv = r.inverse(&u);
        assert_eq!(r.mul(&u, &inv), r.one());
    }

    #[test]
    fn cubic_norm_is_multiplicative() {
        // t^3 + t^2 - 2t - 1 mod 7^2 (the conductor-7 cubic).
        let r = PolyModRing::new(
            7,
            2,
            &[BigInt::from(-1), BigInt::from(-2), BigInt::from(1), BigInt::from(1)],
        )
        .unwrap();
        let a = r.from_coeffs(&[BigInt::from(2), BigInt::from(1), BigInt::from(3)]);
        let b = r.from_coeffs(&[BigInt::from(5), BigInt::from(0), BigInt::from(1)]);
        assert_eq!(
            r.norm(&r.mul(&a, &b)),
            modmul(r.norm(&a), r.norm(&b), r.modulus),
            "norm must be multiplicative"
        );
    }

    #[test]
    fn frobenius_fixes_base_and_squares_to_identity() {
        // Inert quadratic: t^2 - 2 at p = 5.
        let poly = vec![BigInt::from(-2), BigInt::from(0), BigInt::from(1)];
        let r = PolyModRing::new(5, 3, &poly).unwrap();
        let s = frobenius_action(&r, &poly).unwrap();
        // sigma(t) = s satisfies g(s) = 0 and s = t^5 mod 5.
        assert_eq!(r.eval_poly(&[125 - 2, 0, 1], &s), r.zero());
        // sigma restricted to base elements is the identity: trivially, since
        // sigma acts through t only. sigma^2 = id: s applied twice gives t.
        let apply = |x: &RingElem| -> RingElem {
            // a + b t -> a + b s
            r.add(&r.from_u64(x[0]), &r.scalar_mul(x[1], &s))
        };
        let t = r.gen_t();
        let once = apply(&t);
        let twice = apply(&once);
        assert_eq!(twice, t, "sigma^2 = identity on the generator");
        assert_ne!(once, t, "sigma is not the identity");
        // sigma(t) = -t for t^2 = 2 (the root swap).
        assert_eq!(once, r.neg(&t));
    }

    #[test]
    fn modinv_examples() {
        assert_eq!(modinv(3, 125), 42); // 3*42 = 126 = 1 mod 125
        assert_eq!(modinv(5, 8), 5); // 25 = 1 mod 8
        for a in [1u64, 3, 7, 9, 11] {
            assert_eq!(modmul(a, modinv(a, 16), 16), 1);
        }
    }
}
