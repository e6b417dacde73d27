//! Local norm-group images at finite precision.
//!
//! Norms of units are collected from a provably generating family of the unit
//! group of (Z/p^k)[t]/(g) — all units with coefficients below p together
//! with 1 + p t^i — so the generated subgroup is the exact norm image. At
//! p = 2 the unit group is small enough to enumerate outright. Every result
//! is recomputed at precision k+1 and compared (the stability contract).

use super::ring::PolyModRing;
use super::{factor_u64, LocalError, LocalExtension, NormGroupResult, SplittingType};
use crate::group::{enumerate_abelian, enumerate_abelian_from_pool, EnumeratedAbelianGroup, FgAbelianGroup};
use std::collections::BTreeSet;

fn modmul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
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

/// The unit group (Z/p^k)^* with an explicit generator map. Small groups get
/// a full discrete-log table; large odd-p groups use the cyclic structure
/// (primitive root plus factored order).
#[derive(Debug, Clone)]
pub struct LocalUnitLevel {
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
    pub order: u64,
    pub carrier: FgAbelianGroup,
    pub generator_residues: Vec<u64>,
    order_factors: Vec<(u64, u32)>,
    table: Option<EnumeratedAbelianGroup<u64>>,
}

const TABLE_BOUND: u64 = 1 << 19;

/// Primitive root mod p^k for odd p (a primitive root mod p^2 works for all k).
fn primitive_root(p: u64, modulus: u64) -> u64 {
    let factors = factor_u64(p - 1);
    let mut g = 2u64;
    loop {
        let ok = factors.iter().all(|(q, _)| modpow(g, (p - 1) / q, p) != 1);
        if ok {
            break;
        }
        g += 1;
    }
    if modulus > p && modpow(g, p - 1, p * p) == 1 {
        g += p;
    }
    g % modulus
}

pub fn unit_level(p: u64, k: u32) -> Result<LocalUnitLevel, LocalError> {
    if !super::is_prime(p) {
        return Err(LocalError::BadInput(format!("{p} is not prime")));
    }
    let modulus = p
        .checked_pow(k)
        .ok_or_else(|| LocalError::BadInput(format!("p^k overflows: {p}^{k}")))?;
    let order = modulus / p * (p - 1);
    let generator_residues: Vec<u64> = if p == 2 {
        match k {
            1 => vec![],
            2 => vec![3],
            _ => vec![modulus - 1, 5],
        }
    } else {
        vec![primitive_root(p, modulus)]
    };
    let table = if order <= TABLE_BOUND {
        Some(enumerate_abelian(1u64, generator_residues.clone(), |a, b| {
            modmul(*a, *b, modulus)
        }))
    } else {
        None
    };
    let carrier = match &table {
        Some(t) => {
            assert_eq!(t.order() as u64, order, "generators must span the unit group");
            t.group.clone()
        }
        None => FgAbelianGroup::cyclic(order),
    };
    Ok(LocalUnitLevel {
        p,
        k,
        modulus,
        order,
        carrier,
        generator_residues,
        order_factors: factor_u64(order),
        table,
    })
}

impl LocalUnitLevel {
    /// Discrete log against the carrier coordinates (table-backed groups).
    pub fn coords_of(&self, residue: u64) -> Option<crate::group::GroupElement> {
        self.table.as_ref().and_then(|t| t.coords_of(&(residue % self.modulus)).cloned())
    }

    /// Exact multiplicative order of a unit residue.
    pub fn element_order(&self, residue: u64) -> u64 {
        let x = residue % self.modulus;
        debug_assert_eq!(num_integer::gcd(x, self.p), 1);
        let mut t = self.order;
        for (q, _) in &self.order_factors {
            while t % q == 0 && modpow(x, t / q, self.modulus) == 1 {
                t /= q;
            }
        }
        t
    }

    /// Order of the subgroup generated by the given residues.
    pub fn subgroup_order(&self, gens: &[u64]) -> u64 {
        if self.table.is_some() {
            // BFS closure in the table-backed group.
            let sub = enumerate_abelian_from_pool(1u64, gens.to_vec(), |a, b| {
                modmul(*a, *b, self.modulus)
            });
            return sub.order() as u64;
        }
        // Cyclic case: the subgroup order is the lcm of element orders.
        let mut l = 1u64;
        for &g in gens {
            if modpow(g, l, self.modulus) != 1 {
                l = num_integer::lcm(l, self.element_order(g));
            }
        }
        l
    }
}

/// Norms of a provably generating family of the unit group, streamed into an
/// incremental subgroup-order computation. Returns (greedy generator list,
/// subgroup order, optionally the full residue set).
fn unit_norm_data(
    ring: &PolyModRing,
    level: &LocalUnitLevel,
) -> Result<(Vec<u64>, u64, Option<BTreeSet<u64>>), LocalError> {
    let p = ring.p;
    let modulus = ring.modulus;
    let mut gens: Vec<u64> = Vec::new();
    let mut order = 1u64;

    if p == 2 {
        // Enumerate the whole unit group of the ring.
        if ring.element_count() > 32 << 20 {
            return Err(LocalError::BadInput(
                "2-adic enumeration beyond the supported precision".into(),
            ));
        }
        let mut set: BTreeSet<u64> = BTreeSet::new();
        for x in ring.all_elements() {
            let n = ring.norm(&x);
            if n % p != 0 {
                set.insert(n);
            }
        }
        order = set.len() as u64;
        // Greedy generators out of the set.
        let mut have = 1u64;
        for &s in &set {
            let mut candidate = gens.clone();
            candidate.push(s);
            let new_order = level.subgroup_order(&candidate);
            if new_order > have {
                gens.push(s);
                have = new_order;
            }
            if have == order {
                break;
            }
        }
        assert_eq!(have, order, "norm set must be a subgroup");
        return Ok((gens, order, Some(set)));
    }

    // p odd: family = units with coefficients below p, plus 1 + p t^i.
    let feed = |x: Vec<u64>, gens: &mut Vec<u64>, order: &mut u64| {
        if !ring.is_unit(&x) {
            return;
        }
        let n = ring.norm(&x);
        if modpow(n, *order, modulus) != 1 {
            gens.push(n);
            *order = num_integer::lcm(*order, level.element_order(n));
        }
    };
    let d = ring.degree;
    let count = p.pow(d as u32);
    for idx in 0..count {
        let mut x = vec![0u64; d];
        let mut rem = idx;
        for c in x.iter_mut() {
            *c = rem % p;
            rem /= p;
        }
        feed(x, &mut gens, &mut order);
        if order == level.order {
            break;
        }
    }
    for i in 0..d {
        let mut x = ring.one();
        x[i] = (x[i] + p) % modulus;
        feed(x, &mut gens, &mut order);
    }

    // Explicit set when the ambient unit group is small.
    let set = if level.order <= 1 << 16 {
        let mut set = BTreeSet::new();
        let mut frontier = vec![1u64];
        set.insert(1u64);
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = modmul(x, g, modulus);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        assert_eq!(set.len() as u64, order);
        Some(set)
    } else {
        None
    };
    Ok((gens, order, set))
}

/// The minimal positive valuation of a norm, verified by search in the
/// ramified case.
fn valuation_step(ext: &LocalExtension, ring: &PolyModRing) -> Result<u32, LocalError> {
    match ext.splitting {
        SplittingType::Split => Ok(1),
        SplittingType::Inert => Ok(ext.degree),
        SplittingType::Ramified => {
            // Search an element whose norm has valuation exactly 1.
            let p = ring.p;
            for a in 0..p * p {
                for ti in [ring.gen_t(), ring.mul(&ring.gen_t(), &ring.gen_t())] {
                    let x = ring.add(&ring.from_u64(a), &ti);
                    let n = ring.norm(&x);
                    if n % p == 0 && n % (p * p) != 0 {
                        return Ok(1);
                    }
                }
            }
            Err(LocalError::PrecisionUnstable { p, k: ring.k })
        }
    }
}

/// Computes the local norm image at precision k, with the stability
/// comparison against k+1 built in.
pub fn local_norm_image(ext: &LocalExtension, k: u32) -> Result<NormGroupResult, LocalError> {
    let at = |kk: u32| -> Result<(Vec<u64>, u64, Option<BTreeSet<u64>>, u64), LocalError> {
        let ring = PolyModRing::new(ext.p, kk, &ext.poly)?;
        let level = unit_level(ext.p, kk)?;
        let (gens, order, set) = unit_norm_data(&ring, &level)?;
        Ok((gens, order, set, level.order))
    };
    let (gens, order, set, ambient) = at(k)?;
    let (gens_up, order_up, set_up, ambient_up) = at(k + 1)?;

    // Stability: the image at k+1 reduced mod p^k must equal the image at k.
    let pk = ext.p.pow(k);
    let level_k = unit_level(ext.p, k)?;
    let reduced_order = {
        let reduced: Vec<u64> = gens_up.iter().map(|g| g % pk).collect();
        level_k.subgroup_order(&reduced)
    };
    let mut stable = reduced_order == order && ambient / order == ambient_up / order_up;
    if let (Some(s), Some(su)) = (&set, &set_up) {
        let reduced: BTreeSet<u64> = su.iter().map(|x| x % pk).collect();
        stable &= reduced == *s;
    }

    let ring = PolyModRing::new(ext.p, k, &ext.poly)?;
    let step = valuation_step(ext, &ring)?;
    let unit_index = ambient / order;
    Ok(NormGroupResult {
        p: ext.p,
        k,
        unit_image_gens: gens,
        unit_image: set,
        unit_index,
        valuation_step: step,
        index: unit_index * step as u64,
        stable,
    })
}

/// Full-enumeration oracle for the unit norm image (tests and small cases
/// only; the generated route must agree with this wherever it runs).
pub fn unit_norms_by_enumeration(ext: &LocalExtension, k: u32) -> Result<BTreeSet<u64>, LocalError> {
    let ring = PolyModRing::new(ext.p, k, &ext.poly)?;
    if ring.element_count() > 8 << 20 {
        return Err(LocalError::BadInput("enumeration oracle bound exceeded".into()));
    }
    let mut set = BTreeSet::new();
    for x in ring.all_elements() {
        if ring.is_unit(&x) {
            set.insert(ring.norm(&x));
        }
    }
    Ok(set)
}

/// The arithmetic fundamental-lemma check: at an unramified place the norm
/// image of the finite-level units is the full base unit group, at precision
/// k and k+1 both.
pub fn fundamental_lemma_check(ext: &LocalExtension, k: u32) -> Result<bool, LocalError> {
    if ext.splitting == SplittingType::Ramified {
        return Err(LocalError::RamifiedPlace);
    }
    let r = local_norm_image(ext, k)?;
    let r_up = local_norm_image(ext, k + 1)?;
    Ok(r.unit_index == 1 && r_up.unit_index == 1 && r.stable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn unit_level_structures() {
        let u = unit_level(5, 3).unwrap();
        assert_eq!(u.order, 100);
        assert_eq!(u.carrier.invariant_factors(), &[BigUint::from(100u32)]);
        let u2 = unit_level(2, 5).unwrap();
        assert_eq!(u2.order, 16);
        assert_eq!(
            u2.carrier.invariant_factors(),
            &[BigUint::from(2u32), BigUint::from(8u32)]
        );
        // order = p^(k-1)(p-1)
        let u3 = unit_level(97, 2).unwrap();
        assert_eq!(u3.order, 97 * 96);
    }

    #[test]
    fn element_orders_in_unit_level() {
        let u = unit_level(7, 2).unwrap(); // cyclic of order 42
        assert_eq!(u.element_order(1), 1);
        assert_eq!(u.element_order(48), 2); // -1 mod 49
        let g = u.generator_residues[0];
        assert_eq!(u.element_order(g), 42);
        assert_eq!(u.subgroup_order(&[48, g]), 42);
    }

    #[test]
    fn inert_quadratic_norms_are_full() {
        // d = 2, p = 5 (inert), k = 2: all units are norms, index 2 overall.
        let ext = LocalExtension::quadratic(2, 5).unwrap();
        let r = local_norm_image(&ext, 2).unwrap();
        assert_eq!(r.unit_index, 1);
        assert_eq!(r.valuation_step, 2);
        assert_eq!(r.index, 2);
        assert!(r.stable);
        // enumeration oracle agrees
        let oracle = unit_norms_by_enumeration(&ext, 2).unwrap();
        assert_eq!(oracle.len() as u64, unit_level(5, 2).unwrap().order);
    }

    #[test]
    fn ramified_two_adic_example() {
        // d = -1, p = 2 (ramified), k = 3: image {1, 5} mod 8, index 2.
        let ext = LocalExtension::quadratic(-1, 2).unwrap();
        let r = local_norm_image(&ext, 3).unwrap();
        let set = r.unit_image.clone().expect("small set");
        assert_eq!(set, BTreeSet::from([1u64, 5u64]));
        assert_eq!(r.unit_index, 2);
        assert_eq!(r.valuation_step, 1);
        assert_eq!(r.index, 2);
        assert!(r.stable);
    }

    #[test]
    fn ramified_odd_p_matches_enumeration() {
        // d = -5 at p = 5: unit norms are the squares (index 2).
        let ext = LocalExtension::quadratic(-5, 5).unwrap();
        let r = local_norm_image(&ext, 3).unwrap();
        assert_eq!(r.unit_index, 2);
        let oracle = unit_norms_by_enumeration(&ext, 3).unwrap();
        assert_eq!(oracle.len() as u64, 100 / 2);
        assert_eq!(r.unit_image.clone().unwrap(), oracle);
        assert!(r.stable);
    }

    #[test]
    fn split_norms_are_full() {
        let ext = LocalExtension::quadratic(-1, 5).unwrap(); // split
        let r = local_norm_image(&ext, 3).unwrap();
        assert_eq!(r.unit_index, 1);
        assert_eq!(r.valuation_step, 1);
        assert_eq!(r.index, 1);
        let oracle = unit_norms_by_enumeration(&ext, 2).unwrap();
        assert_eq!(oracle.len() as u64, unit_level(5, 2).unwrap().order);
    }

    #[test]
    fn cubic_ramified_at_seven() {
        // Conductor 7 at p = 7: totally ramified, unit index 3.
        let ext = LocalExtension::cubic(7, 7).unwrap();
        let r = local_norm_image(&ext, 2).unwrap();
        assert_eq!(r.unit_index, 3);
        assert_eq!(r.valuation_step, 1);
        assert_eq!(r.index, 3);
        assert!(r.stable);
        // Enumeration oracle at k = 2: |R| = 7^6 under the bound.
        let oracle = unit_norms_by_enumeration(&ext, 2).unwrap();
        let closure = {
            let level = unit_level(7, 2).unwrap();
            level.subgroup_order(&oracle.iter().copied().collect::<Vec<_>>())
        };
        assert_eq!(closure, oracle.len() as u64, "oracle image is a subgroup");
        assert_eq!(oracle.len() as u64, unit_level(7, 2).unwrap().order / 3);
    }

    #[test]
    fn cubic_inert_fundamental_lemma() {
        let ext = LocalExtension::cubic(7, 2).unwrap(); // 2 is inert for f=7
        assert!(fundamental_lemma_check(&ext, 3).unwrap());
        let ext5 = LocalExtension::cubic(13, 2).unwrap();
        assert!(fundamental_lemma_check(&ext5, 3).unwrap());
    }

    #[test]
    fn fundamental_lemma_examples() {
        let inert = LocalExtension::quadratic(2, 5).unwrap();
        assert!(fundamental_lemma_check(&inert, 3).unwrap());
        let split = LocalExtension::quadratic(-1, 5).unwrap();
        assert!(fundamental_lemma_check(&split, 3).unwrap());
        let ram = LocalExtension::quadratic(-1, 2).unwrap();
        assert!(matches!(
            fundamental_lemma_check(&ram, 3),
            Err(LocalError::RamifiedPlace)
        ));
    }

    #[test]
    fn generated_route_matches_enumeration_widely() {
        // Cross-validation of the two independent implementations.
        for (d, p, k) in [
            (-1i64, 3u64, 2u32),
            (-1, 7, 2),
            (2, 3, 3),
            (-2, 5, 2),
            (3, 7, 2),
            (-3, 3, 3),
            (-7, 7, 2),
            (13, 13, 2),
        ] {
            let ext = LocalExtension::quadratic(d, p).unwrap();
            let r = local_norm_image(&ext, k).unwrap();
            let oracle = unit_norms_by_enumeration(&ext, k).unwrap();
            assert_eq!(
                oracle.len() as u64 * r.unit_index,
                unit_level(p, k).unwrap().order,
                "(d,p,k)=({d},{p},{k})"
            );
            if let Some(set) = &r.unit_image {
                assert_eq!(set, &oracle, "(d,p,k)=({d},{p},{k})");
            }
        }
    }

    use num_bigint::BigUint;
}
