//! Deterministic fixture generators: seeded random sigma-modules and test
//! functions for the randomized identity suites, the induced-module family,
//! and the exhaustive small-module search for nontrivial knots.
//!
//! Everything is a pure function of (seed, index), so suites generate the
//! same instance stream regardless of parallelism.

use crate::cyclotomic::CyclotomicValue;
use crate::group::{FgAbelianGroup, GroupElement, GroupHom};
use crate::matrix::IntMatrix;
use crate::sigma::{check_h90, y_groups, H90Level, SigmaModule, TestFunction};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn rng_for(seed: u64, index: u64, salt: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

/// A random finite abelian group of order at most `max_order`.
fn random_group(rng: &mut ChaCha20Rng, max_order: u64) -> FgAbelianGroup {
    let shape = rng.gen_range(0..10u32);
    let factors: Vec<u64> = match shape {
        // cyclic
        0..=3 => vec![rng.gen_range(2..=max_order.min(500))],
        // (Z/a)^2
        4..=6 => {
            let a = rng.gen_range(2..=((max_order as f64).sqrt() as u64).max(2));
            vec![a, a]
        }
        // (Z/a)^3
        7 => {
            let a = rng.gen_range(2..=((max_order as f64).cbrt() as u64).max(2));
            vec![a, a, a]
        }
        // Z/a x Z/(a*b)
        _ => {
            let a = rng.gen_range(2..=12u64);
            let maxb = (max_order / (a * a)).max(1);
            let b = rng.gen_range(1..=maxb.min(12));
            vec![a, a * b]
        }
    };
    FgAbelianGroup::new(factors.into_iter().map(BigUint::from).collect(), 0)
}

/// A random automorphism with sigma^n = 1, built from permutations of equal
/// factors, unit scalings and shears, with rejection sampling.
fn random_sigma(rng: &mut ChaCha20Rng, g: &FgAbelianGroup, n: u64) -> GroupHom {
    let dim = g.dim();
    let identity = GroupHom::identity(g);
    if dim == 0 || n == 1 {
        return identity;
    }
    let factors: Vec<u64> =
        g.invariant_factors().iter().map(|d| d.to_u64().expect("desk scale")).collect();
    'attempts: for _ in 0..60 {
        let mut m = IntMatrix::identity(dim);
        let kind = rng.gen_range(0..6u32);
        match kind {
            0 => {} // identity
            1 => {
                // cyclic shift of a block of equal factors
                if let Some((start, len)) = equal_block(&factors, rng) {
                    let mut perm = IntMatrix::zeros(dim, dim);
                    for i in 0..dim {
                        if i >= start && i < start + len {
                            let j = start + ((i - start) + 1) % len;
                            perm.set(j, i, BigInt::one());
                        } else {
                            perm.set(i, i, BigInt::one());
                        }
                    }
                    m = perm;
                }
            }
            2 => {
                // unit scaling of one coordinate
                let i = rng.gen_range(0..dim);
                let d = factors[i];
                let u = rng.gen_range(1..d.max(2));
                if num_integer::gcd(u, d) != 1 {
                    continue 'attempts;
                }
                m.set(i, i, BigInt::from(u));
            }
            3 => {
                // negation
                for i in 0..dim {
                    m.set(i, i, BigInt::from(-1));
                }
            }
            4 => {
                // shear between two coordinates (the hom constructor rejects
                // directions that break well-definedness)
                let i = rng.gen_range(0..dim);
                let j = rng.gen_range(0..dim);
                if i == j {
                    continue 'attempts;
                }
                m.set(i, j, BigInt::from(rng.gen_range(1..=4i64)));
            }
            _ => {
                // swap of two equal factors twisted by a unit
                if let Some((start, len)) = equal_block(&factors, rng) {
                    if len >= 2 {
                        let mut perm = IntMatrix::identity(dim);
                        perm.set(start, start, BigInt::from(0));
                        perm.set(start + 1, start + 1, BigInt::from(0));
                        perm.set(start + 1, start, BigInt::one());
                        let d = factors[start];
                        let u = rng.gen_range(1..d.max(2));
                        if num_integer::gcd(u, d) != 1 {
                            continue 'attempts;
                        }
                        perm.set(start, start + 1, BigInt::from(u));
                        m = perm;
                    }
                }
            }
        }
        let Ok(h) = GroupHom::new(g.clone(), g.clone(), m) else { continue };
        let order_divides_n = h.order_dividing(n).map(|m| n % m == 0).unwrap_or(false);
        if order_divides_n && h.is_automorphism() {
            return h;
        }
    }
    identity
}

fn equal_block(factors: &[u64], rng: &mut ChaCha20Rng) -> Option<(usize, usize)> {
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < factors.len() {
        let mut end = start + 1;
        while end < factors.len() && factors[end] == factors[start] {
            end += 1;
        }
        if end - start >= 2 {
            blocks.push((start, end - start));
        }
        start = end;
    }
    if blocks.is_empty() {
        None
    } else {
        let k = rng.gen_range(0..blocks.len());
        Some(blocks[k])
    }
}

fn random_element(rng: &mut ChaCha20Rng, g: &FgAbelianGroup) -> GroupElement {
    let mut coords: Vec<BigInt> = Vec::with_capacity(g.dim());
    for d in g.invariant_factors() {
        coords.push(BigInt::from(rng.gen_range(0..d.to_u64().expect("desk scale"))));
    }
    for _ in 0..g.free_rank() {
        coords.push(BigInt::from(rng.gen_range(-3i64..=3)));
    }
    g.element(coords)
}

/// Deterministic random valid sigma-module number `index` for `seed`.
/// |G| <= `max_order`, sigma-order n <= `max_n`, sigma-stable random Gamma,
/// and a random twist kappa with N(kappa) in Gamma_K.
pub fn random_module(seed: u64, index: u64, max_order: u64, max_n: u64) -> SigmaModule {
    let mut rng = rng_for(seed, index, 0x6d6f_6475);
    let g = random_group(&mut rng, max_order);
    let n = rng.gen_range(1..=max_n);
    let sigma = random_sigma(&mut rng, &g, n);
    // Gamma: close random elements under sigma.
    let mut gamma_gens = Vec::new();
    for _ in 0..rng.gen_range(0..=2u32) {
        let mut x = random_element(&mut rng, &g);
        for _ in 0..n {
            gamma_gens.push(x.clone());
            x = sigma.apply(&x);
        }
    }
    let base = SigmaModule::untwisted(g.clone(), sigma, n, gamma_gens)
        .expect("construction is valid by design");
    // kappa by rejection; 0 always works.
    for _ in 0..40 {
        let kappa = random_element(&mut rng, &g);
        if let Ok(m) = base.with_kappa(kappa) {
            return m;
        }
    }
    base
}

/// Deterministic random test function with small support and cyclotomic
/// values of small conductor (so canonical reduction stays fast).
pub fn random_test_function(m: &SigmaModule, seed: u64, index: u64) -> TestFunction {
    let mut rng = rng_for(seed, index, 0x7465_7374);
    let g = &m.group;
    let order = g.order().to_u64().unwrap_or(u64::MAX);
    let max_support = 8usize.min(order as usize);
    let support_size = rng.gen_range(0..=max_support);
    let exponent = g.exponent().to_u64().unwrap_or(1);
    // Conductors: 1 plus small divisors of the exponent and {2,3,4}.
    let mut conductors = vec![1u64, 2, 3, 4];
    for d in [5u64, 6, 8, 12] {
        if exponent % d == 0 {
            conductors.push(d);
        }
    }
    let mut pairs = Vec::new();
    for _ in 0..support_size {
        let point = random_element(&mut rng, g);
        let e = conductors[rng.gen_range(0..conductors.len())];
        let k = rng.gen_range(0..e) as i64;
        let c = rng.gen_range(-4i64..=4);
        let mut v = CyclotomicValue::zeta(e, k).scalar_mul_int(if c == 0 { 1 } else { c });
        if rng.gen_bool(0.25) {
            let e2 = conductors[rng.gen_range(0..conductors.len())];
            let k2 = rng.gen_range(0..e2) as i64;
            v = v.add(&CyclotomicValue::zeta(e2, k2).scalar_mul_int(rng.gen_range(-3i64..=3)));
        }
        if rng.gen_bool(0.15) {
            let den = rng.gen_range(2..=3i64);
            v = v.scalar_mul(&BigRational::new(BigInt::one(), BigInt::from(den)));
        }
        pairs.push((point, v));
    }
    TestFunction::new(g, pairs)
}

/// The induced-module family: products of a group with itself, sigma the
/// coordinate shift — Hilbert 90 holds at G-level for all of them.
pub fn induced_fixtures() -> Vec<SigmaModule> {
    let mut out = Vec::new();
    // A x A with the swap, Gamma in {0, diagonal, 2A x 2A}.
    for a in [2u64, 3, 4, 5, 6, 7, 8] {
        let g = FgAbelianGroup::new(vec![BigUint::from(a); 2], 0);
        let swap =
            GroupHom::new(g.clone(), g.clone(), IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]))
                .expect("swap");
        for gamma in [
            vec![],
            vec![g.element_i64(&[1, 1])],
            vec![g.element_i64(&[2, 0]), g.element_i64(&[0, 2])],
        ] {
            out.push(
                SigmaModule::untwisted(g.clone(), swap.clone(), 2, gamma).expect("induced"),
            );
        }
    }
    // A^3 with the 3-cycle.
    for a in [2u64, 3, 4] {
        let g = FgAbelianGroup::new(vec![BigUint::from(a); 3], 0);
        let cycle = GroupHom::new(
            g.clone(),
            g.clone(),
            IntMatrix::from_rows(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]),
        )
        .expect("cycle");
        for gamma in [vec![], vec![g.element_i64(&[1, 1, 1])]] {
            out.push(
                SigmaModule::untwisted(g.clone(), cycle.clone(), 3, gamma).expect("induced"),
            );
        }
    }
    // Longer cycles: A^4 and (Z/2)^6.
    for (a, k) in [(2u64, 4usize), (3, 4), (2, 6)] {
        let g = FgAbelianGroup::new(vec![BigUint::from(a); k], 0);
        let mut m = IntMatrix::zeros(k, k);
        for i in 0..k {
            m.set((i + 1) % k, i, BigInt::one());
        }
        let cycle = GroupHom::new(g.clone(), g.clone(), m).expect("cycle");
        let diag = vec![g.element(vec![BigInt::one(); k])];
        out.push(
            SigmaModule::untwisted(g.clone(), cycle.clone(), k as u64, vec![]).expect("induced"),
        );
        out.push(SigmaModule::untwisted(g, cycle, k as u64, diag).expect("induced"));
    }
    out
}

/// The negative-control family (Z/ell, sigma = id, n = ell): the norm is
/// zero and Hilbert 90 fails with defect exactly ell.
pub fn h90_failing_family(ells: &[u64]) -> Vec<SigmaModule> {
    ells.iter()
        .map(|&ell| {
            let g = FgAbelianGroup::cyclic(ell);
            SigmaModule::untwisted(g.clone(), GroupHom::identity(&g), ell, vec![])
                .expect("control family")
        })
        .collect()
}

/// Exhaustive search over induced modules (Z/m)^2 with the swap and cyclic
/// sigma-stable Gamma, |G| <= `max_order`: returns every module where
/// G-level Hilbert 90 holds, Gamma-level fails, and the knot is nontrivial.
pub fn knot_search(max_order: u64) -> Vec<SigmaModule> {
    let mut out = Vec::new();
    let mut m = 2u64;
    while m * m <= max_order {
        let g = FgAbelianGroup::new(vec![BigUint::from(m); 2], 0);
        let swap =
            GroupHom::new(g.clone(), g.clone(), IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]))
                .expect("swap");
        for x in 0..m {
            for y in 0..=x {
                let gen = g.element_i64(&[x as i64, y as i64]);
                let orbit = vec![gen.clone(), swap.apply(&gen)];
                let module = SigmaModule::untwisted(g.clone(), swap.clone(), 2, orbit)
                    .expect("search module");
                if check_h90(&module, H90Level::Group).holds()
                    && !check_h90(&module, H90Level::Gamma).holds()
                {
                    let rep = y_groups(&module);
                    if rep.knot.order().to_u64().map(|k| k > 1).unwrap_or(false) {
                        out.push(module);
                    }
                }
            }
        }
        m += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigma::verify_trace_formula;

    #[test]
    fn random_modules_are_deterministic() {
        let a = random_module(42, 7, 100, 4);
        let b = random_module(42, 7, 100, 4);
        assert_eq!(a.group, b.group);
        assert!(a.sigma.same_map_as(&b.sigma));
        assert_eq!(a.kappa, b.kappa);
        let fa = random_test_function(&a, 42, 7);
        let fb = random_test_function(&b, 42, 7);
        assert_eq!(fa, fb);
        // Different index, different instance (almost surely).
        let c = random_module(42, 8, 100, 4);
        assert!(a.group != c.group || !a.sigma.same_map_as(&c.sigma) || a.kappa != c.kappa);
    }

    #[test]
    fn random_instances_satisfy_trace_identity() {
        for i in 0..60 {
            let m = random_module(0xabc, i, 200, 6);
            let f = random_test_function(&m, 0xabc, i);
            let report =
                verify_trace_formula(&m, &f).unwrap_or_else(|e| panic!("instance {i}: {e}"));
            assert!(report.consistent());
        }
    }

    #[test]
    fn induced_fixtures_pass_g_level_h90() {
        for (i, m) in induced_fixtures().iter().enumerate() {
            assert!(
                check_h90(m, H90Level::Group).holds(),
                "induced fixture {i} fails G-level H90"
            );
        }
    }

    #[test]
    fn knot_search_finds_the_z4_example() {
        let found = knot_search(64);
        assert!(!found.is_empty(), "no nontrivial knot below order 64");
        // The (Z/4)^2 module with Gamma = <(2,2)> is among them.
        let has_z4 = found.iter().any(|m| {
            m.group.invariant_factors() == [BigUint::from(4u32), BigUint::from(4u32)]
        });
        assert!(has_z4);
    }
}
