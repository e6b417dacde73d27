//! The three sides of the twisted trace formula and their exact comparison.
//!
//! Kernel trace: sum over x in G/Gamma, delta in Gamma of f(-x+delta+theta(x))
//! with theta(x) = kappa + sigma(x). Spectral side: sum over characters eta of
//! G/Gamma with eta = eta.sigma of eta(f). Geometric side:
//! c * sum over delta in Gamma/(sigma-1)Gamma of the orbital sum O_delta(f),
//! c = [G_K : Gamma_K]. All three agree exactly on every valid module.

use super::{gamma_as_subgroup_of_itself, SigmaError, SigmaModule, TestFunction, TraceReport};
use crate::character::characters_fixed_by;
use crate::cyclotomic::CyclotomicValue;
use crate::group::{
    group_calculus, quotient_by_subgroup, subgroup_from_elements, GroupElement, GroupHom,
};
use crate::matrix::solve;
use num_bigint::BigInt;
use std::collections::BTreeMap;

const DIRECT_ENUMERATION_BOUND: u64 = 200_000;

fn use_direct_path(m: &SigmaModule) -> bool {
    m.group
        .order()
        .to_u64()
        .map(|n| n <= DIRECT_ENUMERATION_BOUND)
        .unwrap_or(false)
}

/// Brute-force kernel trace; the oracle the other two sides are checked
/// against. Enumerates classes x and (on finite G) all of Gamma literally.
pub fn kernel_trace(m: &SigmaModule, f: &TestFunction) -> CyclotomicValue {
    let g = &m.group;
    let mut acc = CyclotomicValue::zero();
    if use_direct_path(m) {
        let gamma_elems = m
            .gamma
            .elements_in_ambient()
            .expect("finite Gamma on the direct path");
        for q in m.class_quotient.group.elements().expect("finite class group") {
            let x = m.class_quotient.lift(&q);
            let tx = g.sub(&m.theta(&x), &x);
            for delta in &gamma_elems {
                acc.add_assign(&f.value_at(&g.add(delta, &tx)));
            }
        }
        return acc;
    }
    // General path: the inner Gamma-sum collapses to a membership test,
    // delta = s - kappa - (sigma-1)x, done in class coordinates.
    let sq = &m.sigma_on_classes;
    let sm1_q = sq.sub(&GroupHom::identity(&sq.source));
    let targets: Vec<(GroupElement, &CyclotomicValue)> = f
        .support()
        .map(|(s, v)| (m.class_quotient.project(&g.sub(s, &m.kappa)), v))
        .collect();
    let class_count = m.class_quotient.group.order().to_u64();
    if class_count.map(|n| n <= 4 * DIRECT_ENUMERATION_BOUND).unwrap_or(false) {
        for q in m.class_quotient.group.elements().expect("finite class group") {
            let w = sm1_q.apply(&q);
            for (t, v) in &targets {
                if *t == w {
                    acc.add_assign(v);
                }
            }
        }
        return acc;
    }
    // Very large class groups: count the solutions of (sigma_Q - 1) q = t
    // exactly instead of enumerating them — |ker| per solvable target.
    let calc = group_calculus(&sm1_q);
    let kernel_order = calc
        .kernel
        .group
        .order()
        .finite()
        .cloned()
        .expect("finite class group");
    let multiplier = CyclotomicValue::from_rational(num_rational::BigRational::from(
        BigInt::from(kernel_order),
    ));
    for (t, v) in &targets {
        if calc.image.contains(t) {
            acc.add_assign(&v.mul(&multiplier));
        }
    }
    acc
}

/// Spectral side: sum over the fixed characters eta of G/Gamma of
/// eta(f) = sum_g f(theta(g)) eta(g).
pub fn spectral_side(m: &SigmaModule, f: &TestFunction) -> CyclotomicValue {
    spectral_terms(m, f).1
}

/// The fixed characters paired with the full spectral value.
pub(crate) fn spectral_terms(m: &SigmaModule, f: &TestFunction) -> (usize, CyclotomicValue) {
    let q = &m.class_quotient;
    let fixed = characters_fixed_by(&q.group, &m.sigma_on_classes)
        .expect("class group is finite");
    // Precompute the class of theta^{-1}(w) for each support point w.
    let pre: Vec<(GroupElement, &CyclotomicValue)> = f
        .support()
        .map(|(w, v)| (q.project(&m.theta_preimage(w)), v))
        .collect();
    let mut total = CyclotomicValue::zero();
    for chi in &fixed {
        for (class, v) in &pre {
            total.add_assign(&v.mul(&chi.value(class)));
        }
    }
    (fixed.len(), total)
}

/// Geometric side: c * sum over delta-classes of the orbital sum, together
/// with the number of delta-classes that entered.
pub fn geometric_side(m: &SigmaModule, f: &TestFunction) -> CyclotomicValue {
    geometric_terms(m, f).1
}

pub(crate) fn geometric_terms(m: &SigmaModule, f: &TestFunction) -> (usize, CyclotomicValue) {
    let g = &m.group;
    let c = CyclotomicValue::from_rational(num_rational::BigRational::from(BigInt::from(
        m.counting_constant(),
    )));
    let (_, sm1_gamma) = gamma_as_subgroup_of_itself(m);
    let delta_classes = quotient_by_subgroup(&m.gamma.group, &sm1_gamma);
    let sm1 = m.sigma_minus_one();

    if use_direct_path(m) {
        let cosets = quotient_by_subgroup(g, &m.fixed);
        let y_reps: Vec<GroupElement> = cosets
            .group
            .elements()
            .expect("finite coset space on the direct path")
            .map(|c| cosets.lift(&c))
            .collect();
        // A fixed nonzero shift for the representative-independence check.
        let y_shift = g.element({
            let mut v = vec![BigInt::from(0); g.dim()];
            if !v.is_empty() {
                v[0] = BigInt::from(1);
            }
            v
        });
        let delta_shift = m
            .gamma
            .gens_in_ambient()
            .first()
            .map(|gamma1| sm1.apply(gamma1));

        let mut total = CyclotomicValue::zero();
        let mut count = 0usize;
        for dc in delta_classes.group.elements().expect("finite delta classes") {
            let delta = m.gamma.embed.apply(&delta_classes.lift(&dc));
            let orbital = |delta: &GroupElement, shift: &GroupElement| {
                let mut o = CyclotomicValue::zero();
                for y in &y_reps {
                    let ys = g.add(y, shift);
                    let arg = g.add(&g.add(delta, &m.kappa), &sm1.apply(&ys));
                    o.add_assign(&f.value_at(&arg));
                }
                o
            };
            let o = orbital(&delta, &g.zero());
            // Independence under change of coset representatives.
            assert_eq!(
                o,
                orbital(&delta, &y_shift),
                "orbital sum depends on coset representatives"
            );
            // Independence under delta -> delta + (sigma-1)Gamma.
            if let Some(ds) = &delta_shift {
                assert_eq!(
                    o,
                    orbital(&g.add(&delta, ds), &g.zero()),
                    "orbital sum depends on the delta representative"
                );
            }
            total.add_assign(&o);
            count += 1;
        }
        return (count, c.mul(&total));
    }

    // General path: only delta-classes meeting supp(f) - kappa - (sigma-1)G
    // contribute; each orbital sum is a membership-filtered support sum.
    let sm1_image = group_calculus(&sm1).image;
    // D = Gamma meet (sigma-1)G, expressed inside the abstract Gamma.
    let d_sub = crate::group::intersect_subgroups(g, &m.gamma, &sm1_image);
    let d_in_gamma: Vec<GroupElement> = d_sub
        .gens_in_ambient()
        .iter()
        .map(|x| m.gamma.express(x).expect("D lies in Gamma"))
        .collect();
    let d_abstract = subgroup_from_elements(&m.gamma.group, &d_in_gamma);
    // (sigma-1)Gamma inside D's abstract structure.
    let sm1_in_d: Vec<GroupElement> = sm1_gamma
        .gens_in_ambient()
        .iter()
        .map(|x| d_abstract.express(x).expect("(sigma-1)Gamma lies in D"))
        .collect();
    let sm1_in_d_sub = subgroup_from_elements(&d_abstract.group, &sm1_in_d);
    let d_mod = quotient_by_subgroup(&d_abstract.group, &sm1_in_d_sub);
    let d_reps: Vec<GroupElement> = d_mod
        .group
        .elements()
        .expect("D/(sigma-1)Gamma is finite when [G_K:Gamma_K] is")
        .map(|c| m.gamma.embed.apply(&d_abstract.embed.apply(&d_mod.lift(&c))))
        .collect();

    let gamma_lattice = &m.gamma.lattice_basis;
    let sm1_lattice = &sm1_image.lattice_basis;
    let stacked = gamma_lattice.hstack(sm1_lattice);
    let mut classes: BTreeMap<Vec<BigInt>, GroupElement> = BTreeMap::new();
    for (s, _) in f.support() {
        let rhs = g.sub(s, &m.kappa);
        let Some(sol) = solve(&stacked, &rhs.coords) else { continue };
        let a: Vec<BigInt> = sol[..gamma_lattice.cols()].to_vec();
        let delta_s = g.element(gamma_lattice.apply(&a));
        for d in &d_reps {
            let delta = g.add(&delta_s, d);
            let in_gamma = m.gamma.express(&delta).expect("delta lies in Gamma");
            let key = delta_classes.class_key(&in_gamma);
            classes.entry(key).or_insert(delta);
        }
    }
    let orbital = |delta: &GroupElement| {
        let mut o = CyclotomicValue::zero();
        for (s, v) in f.support() {
            let diff = g.sub(&g.sub(s, delta), &m.kappa);
            if sm1_image.contains(&diff) {
                o.add_assign(v);
            }
        }
        o
    };
    let mut total = CyclotomicValue::zero();
    for delta in classes.values() {
        let o = orbital(delta);
        if let Some(gamma1) = m.gamma.gens_in_ambient().first() {
            let shifted = g.add(delta, &sm1.apply(gamma1));
            assert_eq!(o, orbital(&shifted), "orbital sum depends on the delta representative");
        }
        total.add_assign(&o);
    }
    (classes.len(), c.mul(&total))
}

/// Computes all three sides and checks the exact identity. A failure is a
/// bug, not a data condition, and is returned as `IdentityViolation`.
pub fn verify_trace_formula(m: &SigmaModule, f: &TestFunction) -> Result<TraceReport, SigmaError> {
    let kernel = kernel_trace(m, f);
    let (fixed_count, spectral) = spectral_terms(m, f);
    let (delta_count, geometric) = geometric_terms(m, f);
    let report = TraceReport {
        spectral,
        geometric,
        kernel_trace: kernel,
        c: m.counting_constant(),
        fixed_character_count: fixed_count,
        delta_class_count: delta_count,
    };
    if !report.consistent() {
        return Err(SigmaError::IdentityViolation {
            spectral: report.spectral.to_string(),
            geometric: report.geometric.to_string(),
            kernel: report.kernel_trace.to_string(),
        });
    }
    Ok(report)
}
