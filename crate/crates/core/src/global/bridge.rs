//! The arithmetic bridge: builds a sigma-module out of genuine p-adic data of
//! an imaginary quadratic field — per-place valuation and finite-level unit
//! coordinates, sigma assembled from Frobenius lifts, coordinate swaps and
//! ramified conjugation, Gamma the image of the S-unit generators found by
//! norm-equation search.
//!
//! Every Gamma generator is embedded twice (directly, and through the exact
//! field norm) and the two embeddings are asserted consistent, so the dlog
//! tables, uniformizer corrections and Frobenius lifts all cross-check.

use super::forms::class_group_imag;
use super::{GlobalError, QuadField};
use crate::group::{
    enumerate_abelian_from_pool, product, EnumeratedAbelianGroup, FgAbelianGroup, GroupElement,
    GroupHom,
};
use crate::local::{frobenius_action, modinv, PolyModRing, RingElem};
use crate::local::{default_precision, quadratic_splitting, unit_level, SplittingType};
use crate::matrix::IntMatrix;
use crate::sigma::{check_h90, H90Level, H90Report, RaySigmaModule, SigmaModule};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The outcome of a bridge construction.
#[derive(Debug)]
pub struct BridgeOutcome {
    pub module: SigmaModule,
    pub ray: RaySigmaModule,
    pub precision: u32,
    pub h90_group: H90Report,
    pub h90_gamma: H90Report,
    pub place_descriptions: Vec<String>,
    pub gamma_descriptions: Vec<String>,
}

/// An exact element x + y*omega of the maximal order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct FieldElem {
    x: BigInt,
    y: BigInt,
}

impl FieldElem {
    fn from_i64(x: i64, y: i64) -> Self {
        FieldElem { x: BigInt::from(x), y: BigInt::from(y) }
    }
}

/// One place of L above a rational prime in S, with its finite-level data.
enum PlaceBlock {
    /// Two conjugate places; the embedding roots are Hensel lifts of the two
    /// roots of the order polynomial. Unit level: (Z/p^k)^*.
    Split {
        p: u64,
        k: u32,
        /// working modulus p^cap, cap >= k + max valuation headroom
        cap: u32,
        /// roots of the order polynomial mod p^cap, one per place
        roots: [u64; 2],
        units: crate::local::LocalUnitLevel,
    },
    /// A single unramified place; sigma acts as the Frobenius lift.
    Inert {
        p: u64,
        k: u32,
        ring: PolyModRing,
        ring_cap: PolyModRing,
        frobenius_t: RingElem,
        units: EnumeratedAbelianGroup<RingElem>,
    },
    /// A single ramified place; sigma is the ring conjugation; the
    /// uniformizer correction sigma(pi)/pi enters as a dlog column.
    Ramified {
        p: u64,
        k: u32,
        ring: PolyModRing,
        ring_cap: PolyModRing,
        /// pi as an exact element (coordinates in the order basis)
        pi: FieldElem,
        /// e = pi^2 / p, a unit of the ring
        unit_e: RingElem,
        units: EnumeratedAbelianGroup<RingElem>,
    },
}

impl PlaceBlock {
    fn describe(&self) -> String {
        match self {
            PlaceBlock::Split { p, k, .. } => format!("p = {p}: split, two places, units mod {p}^{k}"),
            PlaceBlock::Inert { p, k, .. } => format!("p = {p}: inert, Frobenius action, units mod {p}^{k}"),
            PlaceBlock::Ramified { p, k, .. } => {
                format!("p = {p}: ramified, conjugation action, units mod {p}^{k}")
            }
        }
    }

    /// Number of places this block carries.
    fn place_count(&self) -> usize {
        match self {
            PlaceBlock::Split { .. } => 2,
            _ => 1,
        }
    }

    fn unit_group(&self) -> FgAbelianGroup {
        match self {
            PlaceBlock::Split { units, .. } => units.carrier.clone(),
            PlaceBlock::Inert { units, .. } | PlaceBlock::Ramified { units, .. } => {
                units.group.clone()
            }
        }
    }
}

/// Conjugation on ring elements in the order basis: t -> -t, or t -> 1 - t
/// for the (1+sqrt d)/2 basis.
fn ring_conjugate(field: &QuadField, ring: &PolyModRing, x: &RingElem) -> RingElem {
    let a = ring.from_u64(x[0]);
    let b = x[1];
    if field.d.rem_euclid(4) == 1 {
        // omega -> 1 - omega
        let one_minus_t = ring.sub(&ring.one(), &ring.gen_t());
        ring.add(&a, &ring.scalar_mul(b, &one_minus_t))
    } else {
        ring.sub(&a, &ring.scalar_mul(b, &ring.gen_t()))
    }
}

/// A provably generating family for the unit group of the local ring: for odd
/// p, all units with coefficients below p plus 1 + p t^i; at p = 2 (or tiny
/// rings) simply every unit.
fn unit_generators(ring: &PolyModRing) -> Vec<RingElem> {
    let mut gens = Vec::new();
    if ring.p == 2 || ring.element_count() <= 4096 {
        for x in ring.all_elements() {
            if ring.is_unit(&x) {
                gens.push(x);
            }
        }
        return gens;
    }
    let p = ring.p;
    let d = ring.degree;
    for idx in 0..p.pow(d as u32) {
        let mut x = vec![0u64; d];
        let mut rem = idx;
        for c in x.iter_mut() {
            *c = rem % p;
            rem /= p;
        }
        if ring.is_unit(&x) {
            gens.push(x);
        }
    }
    for i in 0..d {
        let mut x = ring.one();
        x[i] = (x[i] + p) % ring.modulus;
        gens.push(x);
    }
    gens
}

fn enumerate_ring_units(ring: &PolyModRing) -> EnumeratedAbelianGroup<RingElem> {
    let ring2 = ring.clone();
    enumerate_abelian_from_pool(ring.one(), unit_generators(ring), move |a, b| ring2.mul(a, b))
}

/// Hensel-lifts the two roots of the order polynomial mod p^cap (split p).
fn split_roots(field: &QuadField, p: u64, cap: u32) -> Result<[u64; 2], GlobalError> {
    let modulus = p
        .checked_pow(cap)
        .ok_or_else(|| GlobalError::BadInput(format!("p^cap overflows: {p}^{cap}")))?;
    let poly = field.order_polynomial();
    let c0 = poly[0].mod_floor(&BigInt::from(modulus)).to_u64().unwrap();
    let c1 = poly[1].mod_floor(&BigInt::from(modulus)).to_u64().unwrap();
    let eval = |x: u64| -> u64 {
        // x^2 + c1 x + c0 mod modulus
        let x2 = (x as u128 * x as u128 % modulus as u128) as u64;
        ((x2 as u128 + c1 as u128 * x as u128 % modulus as u128 + c0 as u128)
            % modulus as u128) as u64
    };
    let deriv = |x: u64| -> u64 {
        ((2u128 * x as u128 + c1 as u128) % modulus as u128) as u64
    };
    let mut roots = Vec::new();
    for r0 in 0..p {
        if eval(r0) % p == 0 {
            // Newton lift
            let mut r = r0;
            for _ in 0..64 {
                let v = eval(r);
                if v == 0 {
                    break;
                }
                let dv = deriv(r);
                let step = (v as u128 * modinv(dv % modulus, modulus) as u128
                    % modulus as u128) as u64;
                r = (r + modulus - step) % modulus;
            }
            assert_eq!(eval(r), 0, "Hensel lift failed at p = {p}");
            roots.push(r);
        }
    }
    if roots.len() != 2 {
        return Err(GlobalError::BadInput(format!(
            "expected two roots mod {p}^{cap}, found {}",
            roots.len()
        )));
    }
    Ok([roots[0], roots[1]])
}

/// Finds an element of norm p^j not divisible by p, for the place generators.
fn norm_equation_element(
    field: &QuadField,
    p: u64,
    j: u32,
    exclude_p_divisible: bool,
) -> Option<FieldElem> {
    let target = BigInt::from(p).pow(j);
    let abs_d = field.d.unsigned_abs();
    if field.d.rem_euclid(4) == 1 {
        // u^2 + |d| y^2 = 4 p^j, u = y mod 2, x = (u - y)/2.
        let four_t = BigInt::from(4) * &target;
        let ymax = (4 * p.pow(j) / abs_d) as i64 + 1;
        for y in 0..=ymax {
            let rest = &four_t - BigInt::from(abs_d) * BigInt::from(y) * BigInt::from(y);
            if rest.is_negative() {
                break;
            }
            if let Some(u) = exact_sqrt(&rest) {
                if (&u - BigInt::from(y)).is_even() {
                    let x = (&u - BigInt::from(y)) / 2;
                    let cand = FieldElem { x, y: BigInt::from(y) };
                    if candidate_ok(field, &cand, p, exclude_p_divisible, &target) {
                        return Some(cand);
                    }
                    // also try the sign variant x = (-u - y)/2
                    let x2 = (-&u - BigInt::from(y)) / 2;
                    let cand = FieldElem { x: x2, y: BigInt::from(y) };
                    if candidate_ok(field, &cand, p, exclude_p_divisible, &target) {
                        return Some(cand);
                    }
                }
            }
        }
    } else {
        // x^2 + |d| y^2 = p^j.
        let ymax = (p.pow(j) / abs_d) as i64 + 1;
        for y in 0..=ymax {
            let rest = &target - BigInt::from(abs_d) * BigInt::from(y) * BigInt::from(y);
            if rest.is_negative() {
                break;
            }
            if let Some(x) = exact_sqrt(&rest) {
                let cand = FieldElem { x, y: BigInt::from(y) };
                if candidate_ok(field, &cand, p, exclude_p_divisible, &target) {
                    return Some(cand);
                }
            }
        }
    }
    None
}

fn candidate_ok(
    field: &QuadField,
    cand: &FieldElem,
    p: u64,
    exclude_p_divisible: bool,
    target: &BigInt,
) -> bool {
    if field.norm(&cand.x, &cand.y) != *target {
        return false;
    }
    if exclude_p_divisible {
        let pb = BigInt::from(p);
        if (&cand.x % &pb).is_zero() && (&cand.y % &pb).is_zero() {
            return false;
        }
    }
    true
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// The torsion unit generating the roots of unity of the field.
fn torsion_unit(field: &QuadField) -> FieldElem {
    match field.d {
        -1 => FieldElem::from_i64(0, 1), // i
        -3 => FieldElem::from_i64(0, 1), // (1+sqrt(-3))/2, order 6
        _ => FieldElem::from_i64(-1, 0),
    }
}

fn conjugate_elem(field: &QuadField, e: &FieldElem) -> FieldElem {
    let (x, y) = field.conjugate(&e.x, &e.y);
    FieldElem { x, y }
}

/// Builds the arithmetic sigma-module for an imaginary quadratic field, S a
/// set of primes containing the ramified ones, at base precision k.
pub fn build_sigma_module(
    field: &QuadField,
    s_primes: &[u64],
    k: u32,
) -> Result<BridgeOutcome, GlobalError> {
    if field.real {
        return Err(GlobalError::BadInput(
            "the bridge is restricted to imaginary quadratic fields".into(),
        ));
    }
    let mut s: Vec<u64> = s_primes.to_vec();
    s.sort();
    s.dedup();
    for p in &s {
        if !crate::local::is_prime(*p) {
            return Err(GlobalError::BadInput(format!("{p} is not prime")));
        }
    }
    for p in field.ramified_primes() {
        if !s.contains(&p) {
            return Err(GlobalError::BadInput(format!(
                "S must contain the ramified prime {p}"
            )));
        }
    }

    // Class data and S-unit generators: torsion unit plus, for each prime, a
    // generator of the smallest principal power of a place above it (and its
    // conjugate).
    let class_group = class_group_imag(field.discriminant)?;
    let class_number = class_group.order() as u32;
    let mut gamma_elems: Vec<(String, FieldElem)> = Vec::new();
    gamma_elems.push(("torsion unit".into(), torsion_unit(field)));
    for &p in &s {
        let elem = match quadratic_splitting(field.d, p)? {
            SplittingType::Inert => FieldElem::from_i64(p as i64, 0),
            SplittingType::Split => {
                let mut found = None;
                for j in 1..=class_number {
                    if let Some(e) = norm_equation_element(field, p, j, true) {
                        found = Some(e);
                        break;
                    }
                }
                found.ok_or(GlobalError::GeneratorSearchFailed {
                    prime: p,
                    bound: class_number as u64,
                })?
            }
            SplittingType::Ramified => match norm_equation_element(field, p, 1, false) {
                Some(e) => e,
                // The ramified class is nontrivial; its square is (p).
                None => FieldElem::from_i64(p as i64, 0),
            },
        };
        let conj = conjugate_elem(field, &elem);
        gamma_elems.push((format!("generator above {p}"), elem));
        gamma_elems.push((format!("conjugate generator above {p}"), conj));
    }
    // Valuation headroom: the largest p-valuation any generator can have.
    let headroom = 2 * class_number + 3;

    // Local blocks.
    let mut blocks: Vec<PlaceBlock> = Vec::new();
    for &p in &s {
        let kp = k.max(default_precision(p));
        let cap = kp + headroom;
        match quadratic_splitting(field.d, p)? {
            SplittingType::Split => {
                let roots = split_roots(field, p, cap)?;
                let units = unit_level(p, kp)?;
                blocks.push(PlaceBlock::Split { p, k: kp, cap, roots, units });
            }
            SplittingType::Inert => {
                let poly = field.order_polynomial();
                let ring = PolyModRing::new(p, kp, &poly)?;
                let ring_cap = PolyModRing::new(p, cap, &poly)?;
                let frobenius_t = frobenius_action(&ring, &poly)?;
                let units = enumerate_ring_units(&ring);
                blocks.push(PlaceBlock::Inert { p, k: kp, ring, ring_cap, frobenius_t, units });
            }
            SplittingType::Ramified => {
                let poly = field.order_polynomial();
                let ring = PolyModRing::new(p, kp, &poly)?;
                let ring_cap = PolyModRing::new(p, cap, &poly)?;
                let pi = ramified_uniformizer(field, p);
                // e = pi^2 / p, an exact unit of the order.
                let pi_cap = ring_cap.from_coeffs(&[pi.x.clone(), pi.y.clone()]);
                let pi_sq = ring_cap.mul(&pi_cap, &pi_cap);
                let e_cap = ring_cap.divide_by_p_power(&pi_sq, 1);
                let unit_e: RingElem = e_cap.iter().map(|&c| c % ring.modulus).collect();
                assert!(ring.is_unit(&unit_e), "pi^2/p must be a unit");
                let units = enumerate_ring_units(&ring);
                blocks.push(PlaceBlock::Ramified { p, k: kp, ring, ring_cap, pi, unit_e, units });
            }
        }
    }

    // Assemble the global group: per place a free valuation factor and the
    // unit factor, through the canonical product.
    let mut factors: Vec<FgAbelianGroup> = Vec::new();
    // (block index, place-in-block) -> (val factor index, unit factor index)
    let mut slot: Vec<Vec<(usize, usize)>> = Vec::new();
    for b in &blocks {
        let mut block_slots = Vec::new();
        for _ in 0..b.place_count() {
            let val_idx = factors.len();
            factors.push(FgAbelianGroup::free(1));
            let unit_idx = factors.len();
            factors.push(b.unit_group());
            block_slots.push((val_idx, unit_idx));
        }
        slot.push(block_slots);
    }
    let prod = product(&factors);
    let g = prod.group.clone();

    // sigma: swap on split pairs, Frobenius on inert units, conjugation plus
    // the sigma(pi)/pi correction on ramified blocks.
    let mut sigma = GroupHom::zero(&g, &g);
    for (bi, b) in blocks.iter().enumerate() {
        match b {
            PlaceBlock::Split { .. } => {
                let (v1, u1) = slot[bi][0];
                let (v2, u2) = slot[bi][1];
                for (from, to) in [(v1, v2), (v2, v1), (u1, u2), (u2, u1)] {
                    sigma = sigma
                        .add(&prod.embeddings[to].compose(&prod.projections[from]));
                }
            }
            PlaceBlock::Inert { ring, frobenius_t, units, .. } => {
                let (v, u) = slot[bi][0];
                sigma = sigma.add(&prod.embeddings[v].compose(&prod.projections[v]));
                let frob = |x: &RingElem| -> RingElem {
                    // a + b t -> a + b s
                    ring.add(&ring.from_u64(x[0]), &ring.scalar_mul(x[1], frobenius_t))
                };
                let action = unit_action_matrix(units, frob);
                let action_hom =
                    GroupHom::new(units.group.clone(), units.group.clone(), action)
                        .expect("Frobenius acts on the unit group");
                sigma = sigma.add(
                    &prod.embeddings[u].compose(&action_hom).compose(&prod.projections[u]),
                );
            }
            PlaceBlock::Ramified { ring, pi, units, .. } => {
                let (v, u) = slot[bi][0];
                sigma = sigma.add(&prod.embeddings[v].compose(&prod.projections[v]));
                let conj = |x: &RingElem| -> RingElem { ring_conjugate(field, ring, x) };
                let action = unit_action_matrix(units, conj);
                let action_hom =
                    GroupHom::new(units.group.clone(), units.group.clone(), action)
                        .expect("conjugation acts on the unit group");
                sigma = sigma.add(
                    &prod.embeddings[u].compose(&action_hom).compose(&prod.projections[u]),
                );
                // epsilon = sigma(pi)/pi: unit whose dlog column couples the
                // valuation coordinate into the units.
                let sigma_pi = conjugate_elem(field, pi);
                let pi_ring = ring.from_coeffs(&[pi.x.clone(), pi.y.clone()]);
                let sigma_pi_ring = ring.from_coeffs(&[sigma_pi.x.clone(), sigma_pi.y.clone()]);
                // eps * pi = sigma(pi): solve through pi^2 = e p:
                // eps = sigma(pi) * pi / (e p).
                let num = ring.mul(&sigma_pi_ring, &pi_ring);
                let eps = {
                    let over_p = ring.divide_by_p_power(&num, 1);
                    let e_unit = match b {
                        PlaceBlock::Ramified { unit_e, .. } => unit_e.clone(),
                        _ => unreachable!(),
                    };
                    ring.mul(&over_p, &ring.inverse(&e_unit))
                };
                assert!(ring.is_unit(&eps), "sigma(pi)/pi must be a unit");
                let eps_coords =
                    units.coords_of(&eps).expect("unit table covers eps").clone();
                // column: val coordinate -> eps dlog in the unit factor
                let col = IntMatrix::from_columns(&[eps_coords.coords], units.group.dim());
                let eps_hom = GroupHom::new(
                    FgAbelianGroup::free(1),
                    units.group.clone(),
                    col,
                )
                .expect("dlog column");
                sigma = sigma.add(
                    &prod.embeddings[u].compose(&eps_hom).compose(&prod.projections[v]),
                );
            }
        }
    }

    // Gamma generators embedded into the product coordinates.
    let embed = |e: &FieldElem| -> GroupElement {
        let mut acc = g.zero();
        for (bi, b) in blocks.iter().enumerate() {
            match b {
                PlaceBlock::Split { p, k, cap, roots, units } => {
                    for (pl, &root) in roots.iter().enumerate() {
                        let (vi, ui) = slot[bi][pl];
                        let modulus = p.pow(*cap);
                        let image = (e.x.clone() + e.y.clone() * BigInt::from(root))
                            .mod_floor(&BigInt::from(modulus))
                            .to_u64()
                            .unwrap();
                        assert!(image != 0, "valuation headroom exceeded at p = {p}");
                        let mut v = 0u32;
                        let mut u = image;
                        while u % p == 0 {
                            u /= p;
                            v += 1;
                        }
                        let u = u % p.pow(*k);
                        let dlog = units.coords_of(u).expect("unit dlog");
                        acc = g.add(
                            &acc,
                            &prod.embeddings[vi]
                                .apply(&FgAbelianGroup::free(1).element_i64(&[v as i64])),
                        );
                        acc = g.add(&acc, &prod.embeddings[ui].apply(&dlog));
                    }
                }
                PlaceBlock::Inert { p, ring, ring_cap, units, .. } => {
                    let (vi, ui) = slot[bi][0];
                    let z = ring_cap.from_coeffs(&[e.x.clone(), e.y.clone()]);
                    let v = ring_cap.content_valuation(&z);
                    assert!(v < ring_cap.k, "valuation headroom exceeded at p = {p}");
                    let unit_cap = ring_cap.divide_by_p_power(&z, v);
                    let unit: RingElem =
                        unit_cap.iter().map(|&c| c % ring.modulus).collect();
                    let dlog = units.coords_of(&unit).expect("unit dlog").clone();
                    acc = g.add(
                        &acc,
                        &prod.embeddings[vi]
                            .apply(&FgAbelianGroup::free(1).element_i64(&[v as i64])),
                    );
                    acc = g.add(&acc, &prod.embeddings[ui].apply(&dlog));
                }
                PlaceBlock::Ramified { p, ring, ring_cap, pi, unit_e, units, .. } => {
                    let (vi, ui) = slot[bi][0];
                    // v_w = v_p of the exact field norm (f = 1).
                    let n = field.norm(&e.x, &e.y);
                    let mut v = 0u32;
                    let mut rest = n.abs();
                    let pb = BigInt::from(*p);
                    while (&rest % &pb).is_zero() {
                        rest /= &pb;
                        v += 1;
                    }
                    // unit part u = z * pi^s * e^{-m} / p^m with s = v mod 2,
                    // m = (v+s)/2.
                    let sft = v % 2;
                    let m = (v + sft) / 2;
                    let z = ring_cap.from_coeffs(&[e.x.clone(), e.y.clone()]);
                    let pi_cap = ring_cap.from_coeffs(&[pi.x.clone(), pi.y.clone()]);
                    let mut y = z;
                    if sft == 1 {
                        y = ring_cap.mul(&y, &pi_cap);
                    }
                    let w = ring_cap.divide_by_p_power(&y, m);
                    let w_k: RingElem = w.iter().map(|&c| c % ring.modulus).collect();
                    let e_inv_m = ring.pow(&ring.inverse(unit_e), m as u64);
                    let unit = ring.mul(&w_k, &e_inv_m);
                    assert!(ring.is_unit(&unit), "unit-part extraction failed");
                    let dlog = units.coords_of(&unit).expect("unit dlog").clone();
                    acc = g.add(
                        &acc,
                        &prod.embeddings[vi]
                            .apply(&FgAbelianGroup::free(1).element_i64(&[v as i64])),
                    );
                    acc = g.add(&acc, &prod.embeddings[ui].apply(&dlog));
                }
            }
        }
        acc
    };

    let gamma_gens: Vec<GroupElement> =
        gamma_elems.iter().map(|(_, e)| embed(e)).collect();
    let module = SigmaModule::untwisted(g.clone(), sigma, 2, gamma_gens)?;

    // Cross-check: for every generator, sigma(embed(alpha)) = embed(conj
    // alpha) and embed(alpha) + embed(conj alpha) = embed(N(alpha)) through
    // the exact field norm.
    for (name, e) in &gamma_elems {
        let emb = embed(e);
        let conj = conjugate_elem(field, e);
        assert_eq!(
            module.sigma.apply(&emb),
            embed(&conj),
            "sigma disagrees with exact conjugation on {name}"
        );
        let n = field.norm(&e.x, &e.y);
        let n_elem = FieldElem { x: n, y: BigInt::zero() };
        assert_eq!(
            module.norm.apply(&emb),
            embed(&n_elem),
            "module norm disagrees with the exact field norm on {name}"
        );
    }

    let h90_group = check_h90(&module, H90Level::Group);
    let h90_gamma = check_h90(&module, H90Level::Gamma);
    let ray = RaySigmaModule::new(module.clone());
    Ok(BridgeOutcome {
        module,
        ray,
        precision: k,
        h90_group,
        h90_gamma,
        place_descriptions: blocks.iter().map(|b| b.describe()).collect(),
        gamma_descriptions: gamma_elems
            .iter()
            .map(|(n, e)| format!("{n}: ({}, {})", e.x, e.y))
            .collect(),
    })
}

/// Uniformizer of the ramified place above p, as an exact element.
fn ramified_uniformizer(field: &QuadField, p: u64) -> FieldElem {
    if field.d.rem_euclid(4) == 1 {
        // odd p | d: sqrt(d) = 2 omega - 1
        FieldElem::from_i64(-1, 2)
    } else if p == 2 && field.d.rem_euclid(4) == 3 {
        // 1 + sqrt(d)
        FieldElem::from_i64(1, 1)
    } else {
        // p | d (including p = 2 with even d): sqrt(d)
        FieldElem::from_i64(0, 1)
    }
}

/// Matrix of a multiplicative map on a table-backed unit group, by applying
/// the map to each canonical generator and taking dlogs.
fn unit_action_matrix(
    units: &EnumeratedAbelianGroup<RingElem>,
    action: impl Fn(&RingElem) -> RingElem,
) -> IntMatrix {
    let dim = units.group.dim();
    let mut cols = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut coords = vec![BigInt::zero(); dim];
        coords[i] = BigInt::one();
        let gen_elem = units.group.element(coords);
        let concrete = units.element_of(&gen_elem).expect("basis generator").clone();
        let image = action(&concrete);
        cols.push(units.coords_of(&image).expect("closed under the action").coords.clone());
    }
    IntMatrix::from_columns(&cols, dim)
}

/// Retries the construction at increasing precision until Hilbert 90 holds at
/// both levels, per the precision-escalation policy.
pub fn build_sigma_module_with_policy(
    field: &QuadField,
    s_primes: &[u64],
    k0: u32,
) -> Result<BridgeOutcome, GlobalError> {
    let mut k = k0;
    loop {
        let outcome = build_sigma_module(field, s_primes, k)?;
        if outcome.h90_group.holds() && outcome.h90_gamma.holds() {
            return Ok(outcome);
        }
        if k >= 8 {
            return Err(GlobalError::H90Defect {
                defect: format!(
                    "G-level {}, Gamma-level {}",
                    outcome.h90_group.defect, outcome.h90_gamma.defect
                ),
                k,
            });
        }
        k += 1;
    }
}
