//! Place-by-place test functions, local orbital sums, and the construction of
//! the matched base function h from f.
//!
//! Matching is computed by fiber enumeration, not by formula: every delta in
//! a norm fiber is evaluated and the orbital values are compared. A
//! disagreement is returned as `WellDefinedness` — which doubles as a
//! detector for G-level Hilbert-90 failures.

use crate::cyclotomic::CyclotomicValue;
use crate::group::{group_calculus, product, FgAbelianGroup, GroupElement, GroupHom};
use crate::local::{fundamental_lemma_check, LocalError, LocalExtension, PolyModRing, SplittingType};
use crate::sigma::{SigmaError, SigmaModule, TestFunction};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatchingError {
    #[error("matching is not well defined: fiber of {norm_value:?} contains {delta_a:?} and {delta_b:?} with different orbital sums")]
    WellDefinedness {
        norm_value: Vec<BigInt>,
        delta_a: Vec<BigInt>,
        delta_b: Vec<BigInt>,
    },
    #[error("inconsistent place system: {0}")]
    PlaceMismatch(String),
    #[error("unit matching is only stated at unramified places")]
    RamifiedPlace,
    #[error(transparent)]
    Sigma(#[from] SigmaError),
    #[error(transparent)]
    Local(#[from] LocalError),
}

/// A list of local sigma-modules together with their direct product, sigma
/// acting placewise.
#[derive(Debug, Clone)]
pub struct PlaceSystem {
    pub places: Vec<SigmaModule>,
    pub global: SigmaModule,
    pub embeddings: Vec<GroupHom>,
    pub projections: Vec<GroupHom>,
}

impl PlaceSystem {
    pub fn new(places: Vec<SigmaModule>) -> Result<Self, MatchingError> {
        if places.is_empty() {
            return Err(MatchingError::PlaceMismatch("no places given".into()));
        }
        let n = places[0].order;
        for (w, m) in places.iter().enumerate() {
            if m.order != n {
                return Err(MatchingError::PlaceMismatch(format!(
                    "place {w} has sigma-order {} instead of {n}",
                    m.order
                )));
            }
            if !m.group.is_zero_elem(&m.kappa) {
                return Err(MatchingError::PlaceMismatch(format!(
                    "place {w} carries a twist; place systems are untwisted"
                )));
            }
        }
        let groups: Vec<FgAbelianGroup> = places.iter().map(|m| m.group.clone()).collect();
        let prod = product(&groups);
        // sigma acts placewise: sum of E_w . sigma_w . P_w.
        let mut sigma = GroupHom::zero(&prod.group, &prod.group);
        for (w, m) in places.iter().enumerate() {
            sigma = sigma.add(&prod.embeddings[w].compose(&m.sigma).compose(&prod.projections[w]));
        }
        let mut gamma_gens = Vec::new();
        for (w, m) in places.iter().enumerate() {
            for g in m.gamma.gens_in_ambient() {
                gamma_gens.push(prod.embeddings[w].apply(&g));
            }
        }
        let global = SigmaModule::untwisted(prod.group.clone(), sigma.clone(), n, gamma_gens)?;
        // Structural verification of the product shape.
        let orders_multiply = match global.group.order() {
            crate::group::Index::Finite(total) => {
                let mut prod_order = num_bigint::BigUint::from(1u32);
                let mut all_finite = true;
                for g in &groups {
                    match g.order() {
                        crate::group::Index::Finite(o) => prod_order *= o,
                        crate::group::Index::Infinite => all_finite = false,
                    }
                }
                !all_finite || prod_order == total
            }
            crate::group::Index::Infinite => true,
        };
        if !orders_multiply {
            return Err(MatchingError::PlaceMismatch(
                "product group order does not match the factors".into(),
            ));
        }
        for (w, m) in places.iter().enumerate() {
            let lhs = sigma.compose(&prod.embeddings[w]);
            let rhs = prod.embeddings[w].compose(&m.sigma);
            if !lhs.same_map_as(&rhs) {
                return Err(MatchingError::PlaceMismatch(format!(
                    "sigma does not act placewise at place {w}"
                )));
            }
        }
        Ok(PlaceSystem {
            places,
            global,
            embeddings: prod.embeddings,
            projections: prod.projections,
        })
    }

    /// Components of a global point, one per place.
    pub fn factor_point(&self, x: &GroupElement) -> Vec<GroupElement> {
        self.projections.iter().map(|p| p.apply(x)).collect()
    }

    /// The global point with the given per-place components.
    pub fn point_from_factors(&self, xs: &[GroupElement]) -> GroupElement {
        assert_eq!(xs.len(), self.places.len());
        let mut acc = self.global.group.zero();
        for (e, x) in self.embeddings.iter().zip(xs) {
            acc = self.global.group.add(&acc, &e.apply(x));
        }
        acc
    }
}

/// A factorized test function: one local function per place.
#[derive(Debug, Clone)]
pub struct FactorizedFunction {
    pub locals: Vec<TestFunction>,
}

impl FactorizedFunction {
    /// The induced global function f(x) = prod_w f_w(x_w), built over the
    /// product of the local supports.
    pub fn induced_global(&self, sys: &PlaceSystem) -> TestFunction {
        let mut pairs: Vec<(GroupElement, CyclotomicValue)> =
            vec![(sys.global.group.zero(), CyclotomicValue::one())];
        for (w, fw) in self.locals.iter().enumerate() {
            let mut next = Vec::new();
            for (point, value) in &pairs {
                for (s, v) in fw.support() {
                    let p = sys.global.group.add(point, &sys.embeddings[w].apply(s));
                    next.push((p, value.mul(v)));
                }
            }
            pairs = next;
        }
        TestFunction::new(&sys.global.group, pairs)
    }

    /// Spot-check of the pointwise factorization f(x) = prod f_w(x_w).
    pub fn verify_pointwise(
        &self,
        sys: &PlaceSystem,
        global: &TestFunction,
        sample_points: &[GroupElement],
    ) -> bool {
        for x in sample_points {
            let mut prod = CyclotomicValue::one();
            for (w, fw) in self.locals.iter().enumerate() {
                prod = prod.mul(&fw.value_at(&sys.projections[w].apply(x)));
            }
            if global.value_at(x) != prod {
                return false;
            }
        }
        true
    }
}

/// The untwisted orbital sum O_delta(f) = sum over y in G_K\G of
/// f(delta + (sigma-1)y), computed through the cokernel of (sigma-1):
/// the sum equals the total f-mass on the coset delta + (sigma-1)G.
pub fn local_orbital(
    m: &SigmaModule,
    delta: &GroupElement,
    f: &TestFunction,
) -> CyclotomicValue {
    let coker = group_calculus(&m.sigma_minus_one()).cokernel;
    let key = coker.class_key(delta);
    let mut acc = CyclotomicValue::zero();
    for (s, v) in f.support() {
        if coker.class_key(s) == key {
            acc.add_assign(v);
        }
    }
    acc
}

/// Literal coset-enumeration orbital (the oracle for `local_orbital`),
/// with a representative-shift re-check.
pub fn local_orbital_enumerated(
    m: &SigmaModule,
    delta: &GroupElement,
    f: &TestFunction,
) -> CyclotomicValue {
    let g = &m.group;
    let cosets = crate::group::quotient_by_subgroup(g, &m.fixed);
    let sm1 = m.sigma_minus_one();
    let run = |shift: &GroupElement| {
        let mut acc = CyclotomicValue::zero();
        for c in cosets.group.elements().expect("finite coset space") {
            let y = g.add(&cosets.lift(&c), shift);
            acc.add_assign(&f.value_at(&g.add(delta, &sm1.apply(&y))));
        }
        acc
    };
    let base = run(&g.zero());
    let mut shift_coords = vec![BigInt::from(0); g.dim()];
    if !shift_coords.is_empty() {
        shift_coords[0] = BigInt::from(1);
    }
    let shifted = run(&g.element(shift_coords));
    assert_eq!(base, shifted, "orbital sum depends on coset representatives");
    base
}

/// Builds the matched function h for f on a finite local module: h(N(delta))
/// is the common orbital value over the fiber, zero off the norm image.
/// Every fiber is enumerated and checked for agreement.
pub fn match_function(m: &SigmaModule, f: &TestFunction) -> Result<TestFunction, MatchingError> {
    let g = &m.group;
    let coker = group_calculus(&m.sigma_minus_one()).cokernel;
    // Total f-mass per (sigma-1)G-coset: the orbital value of any delta in
    // that coset.
    let mut mass: BTreeMap<Vec<BigInt>, CyclotomicValue> = BTreeMap::new();
    for (s, v) in f.support() {
        mass.entry(coker.class_key(s))
            .or_insert_with(CyclotomicValue::zero)
            .add_assign(v);
    }
    let orbital_of = |delta: &GroupElement| -> CyclotomicValue {
        mass.get(&coker.class_key(delta)).cloned().unwrap_or_else(CyclotomicValue::zero)
    };
    // Fibers of N over all of G.
    let mut fibers: BTreeMap<GroupElement, (GroupElement, CyclotomicValue)> = BTreeMap::new();
    for delta in g.elements().expect("matching needs a finite local module") {
        let t = m.norm.apply(&delta);
        let o = orbital_of(&delta);
        match fibers.get(&t) {
            None => {
                fibers.insert(t, (delta, o));
            }
            Some((first, expected)) => {
                if o != *expected {
                    return Err(MatchingError::WellDefinedness {
                        norm_value: t.coords.clone(),
                        delta_a: first.coords.clone(),
                        delta_b: delta.coords.clone(),
                    });
                }
            }
        }
    }
    let pairs: Vec<(GroupElement, CyclotomicValue)> =
        fibers.into_iter().map(|(t, (_, o))| (t, o)).collect();
    Ok(TestFunction::new(g, pairs))
}

/// h(gamma) = prod_w h_w(gamma_w) over the product of the local supports.
pub fn assemble_global(
    sys: &PlaceSystem,
    locals: &[TestFunction],
) -> Result<TestFunction, MatchingError> {
    if locals.len() != sys.places.len() {
        return Err(MatchingError::PlaceMismatch(format!(
            "{} local functions for {} places",
            locals.len(),
            sys.places.len()
        )));
    }
    Ok(FactorizedFunction { locals: locals.to_vec() }.induced_global(sys))
}

/// Asserts that the global orbital sum factors as the product of the local
/// orbital sums at the given delta.
pub fn verify_factorization(
    sys: &PlaceSystem,
    f: &FactorizedFunction,
    delta: &GroupElement,
) -> bool {
    let global_f = f.induced_global(sys);
    let global_orbital = local_orbital(&sys.global, delta, &global_f);
    let mut prod = CyclotomicValue::one();
    for (w, fw) in f.locals.iter().enumerate() {
        let dw = sys.projections[w].apply(delta);
        prod = prod.mul(&local_orbital(&sys.places[w], &dw, fw));
    }
    global_orbital == prod
}

/// The arithmetic unit-matching check: at an unramified place the indicator
/// of the local unit group matches the indicator of the base unit group at
/// precision k — the norm map on finite-level units is surjective with
/// constant fiber size.
pub fn verify_unit_matching(ext: &LocalExtension, k: u32) -> Result<bool, MatchingError> {
    if ext.splitting == SplittingType::Ramified {
        return Err(MatchingError::RamifiedPlace);
    }
    let surjective = fundamental_lemma_check(ext, k)?;
    // Fiber sizes of a group homomorphism are constant over the image; for
    // small rings verify that literally by counting.
    let ring = PolyModRing::new(ext.p, k, &ext.poly)?;
    if ring.element_count() <= 1 << 16 {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for x in ring.all_elements() {
            if ring.is_unit(&x) {
                *counts.entry(ring.norm(&x)).or_insert(0) += 1;
            }
        }
        let mut sizes: Vec<u64> = counts.values().copied().collect();
        sizes.dedup();
        if sizes.len() != 1 {
            return Ok(false);
        }
    }
    Ok(surjective)
}
