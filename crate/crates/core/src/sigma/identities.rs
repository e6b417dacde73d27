//! Hilbert-90 checks, the Y-group exact sequence, the sharp and flat
//! character identities, kappa-twist summation and the crucial index ratio.
//!
//! Hilbert 90 is a checked hypothesis here, never an assumption: finite
//! truncations can violate it, and the conditional identities fail loudly
//! with `HypothesisNotMet` instead of silently asserting.

use super::trace::{geometric_side, spectral_side, verify_trace_formula};
use super::{RaySigmaModule, SigmaError, SigmaModule, TestFunction};
use crate::character::dual_characters;
use crate::cyclotomic::CyclotomicValue;
use crate::group::{
    group_calculus, induced_on_subgroup, intersect_subgroups, quotient_by_subgroup,
    subgroup_from_elements, sum_of_subgroups, FgAbelianGroup, GroupElement, GroupHom, Index,
    QuotientData, SubgroupData,
};
use crate::matrix::solve;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;

/// Re-expresses `inner` (a subgroup of the common ambient group) inside the
/// abstract structure of `outer`; panics unless `inner` is contained in it.
pub(crate) fn subgroup_inside(outer: &SubgroupData, inner: &SubgroupData) -> SubgroupData {
    let gens: Vec<GroupElement> = inner
        .gens_in_ambient()
        .iter()
        .map(|x| outer.express(x).expect("nested subgroup containment"))
        .collect();
    subgroup_from_elements(&outer.group, &gens)
}

/// Quotient `outer / inner` of nested subgroups of a common ambient group.
pub(crate) fn relative_quotient(outer: &SubgroupData, inner: &SubgroupData) -> QuotientData {
    let inner_in_outer = subgroup_inside(outer, inner);
    quotient_by_subgroup(&outer.group, &inner_in_outer)
}

pub(crate) fn relative_index(outer: &SubgroupData, inner: &SubgroupData) -> Index {
    relative_quotient(outer, inner).group.order()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum H90Level {
    /// defect = |ker(N on G) / (sigma-1)G|
    Group,
    /// defect = |(ker N meet Gamma) / (sigma-1)Gamma|
    Gamma,
}

#[derive(Debug, Clone)]
pub struct H90Report {
    pub level: H90Level,
    pub defect: Index,
}

impl H90Report {
    pub fn holds(&self) -> bool {
        self.defect.is_one()
    }
}

/// Checks the Hilbert-90 shape of the module at the requested level.
pub fn check_h90(m: &SigmaModule, level: H90Level) -> H90Report {
    let defect = match level {
        H90Level::Group => {
            let ker_n = group_calculus(&m.norm).kernel;
            let sm1_image = group_calculus(&m.sigma_minus_one()).image;
            relative_index(&ker_n, &sm1_image)
        }
        H90Level::Gamma => {
            let norm_on_gamma =
                induced_on_subgroup(&m.norm, &m.gamma).expect("Gamma is N-stable");
            // Both the kernel and (sigma-1)Gamma live inside the abstract Gamma.
            let ker = group_calculus(&norm_on_gamma).kernel;
            let (_, sm1_gamma) = super::gamma_as_subgroup_of_itself(m);
            relative_index(&ker, &sm1_gamma)
        }
    };
    H90Report { level, defect }
}

pub fn h90_holds_both(m: &SigmaModule) -> bool {
    check_h90(m, H90Level::Group).holds() && check_h90(m, H90Level::Gamma).holds()
}

/// Internal Y-group data shared by the sharp identity and kappa summation.
pub(crate) struct YData {
    /// N(G) as a subgroup of G.
    pub ng: SubgroupData,
    /// N(Gamma) as a subgroup of G.
    pub ngamma: SubgroupData,
    /// Y_sharp = N(G)/N(Gamma), as a quotient of the abstract N(G).
    pub ysharp: QuotientData,
    /// Gamma_K meet N(G) as a subgroup of G.
    pub knot_sub: SubgroupData,
    /// knot = (Gamma_K meet N(G)) / N(Gamma).
    pub knot: QuotientData,
    /// Y_flat = Gamma_K N(G) / Gamma_K.
    pub yflat: QuotientData,
}

pub(crate) fn y_data(m: &SigmaModule) -> YData {
    let ng = group_calculus(&m.norm).image;
    let ngamma_gens: Vec<GroupElement> =
        m.gamma.gens_in_ambient().iter().map(|g| m.norm.apply(g)).collect();
    let ngamma = subgroup_from_elements(&m.group, &ngamma_gens);
    let ysharp = relative_quotient(&ng, &ngamma);
    let knot_sub = intersect_subgroups(&m.group, &m.gamma_fixed, &ng);
    let knot = relative_quotient(&knot_sub, &ngamma);
    let sum = sum_of_subgroups(&m.group, &m.gamma_fixed, &ng);
    let yflat = relative_quotient(&sum, &m.gamma_fixed);
    YData { ng, ngamma, ysharp, knot_sub, knot, yflat }
}

impl YData {
    /// Class of `t` (an element of N(G)) in Y_sharp.
    pub fn ysharp_class(&self, t: &GroupElement) -> GroupElement {
        let in_ng = self.ng.express(t).expect("element of N(G)");
        self.ysharp.project(&in_ng)
    }
}

#[derive(Debug, Clone)]
pub struct YGroupsReport {
    pub ysharp: FgAbelianGroup,
    pub yflat: FgAbelianGroup,
    pub knot: FgAbelianGroup,
    /// |Y_sharp| = |knot| * |Y_flat| plus the structural exactness of
    /// 0 -> knot -> Y_sharp -> Y_flat -> 0.
    pub exact: bool,
    /// When G-level H90 holds: is the norm-induced map
    /// (G/Gamma)/(sigma-1)(G/Gamma) -> Y_sharp an isomorphism?
    pub transport_is_iso: Option<bool>,
}

pub fn y_groups(m: &SigmaModule) -> YGroupsReport {
    let y = y_data(m);
    // Structural exactness: knot -> Y_sharp injective, Y_sharp -> Y_flat
    // surjective with kernel the image of the knot.
    let knot_to_ysharp = hom_from_gens(&y.knot.group, &y.ysharp.group, |gen| {
        let in_g = embed_from_quotient(&y.knot_sub, &y.knot, gen);
        y.ysharp_class(&in_g)
    });
    let sum = sum_of_subgroups(&m.group, &m.gamma_fixed, &y.ng);
    let ysharp_to_yflat = hom_from_gens(&y.ysharp.group, &y.yflat.group, |gen| {
        let in_ng = y.ysharp.lift(gen);
        let in_g = y.ng.embed.apply(&in_ng);
        let in_sum = sum.express(&in_g).expect("N(G) lies in Gamma_K N(G)");
        y.yflat.project(&in_sum)
    });
    let mut exact = match (&knot_to_ysharp, &ysharp_to_yflat) {
        (Ok(i), Ok(p)) => {
            let ci = group_calculus(i);
            let cp = group_calculus(p);
            ci.kernel.group.is_trivial()
                && cp.cokernel.group.is_trivial()
                && cp.kernel.same_subgroup_as(&ci.image)
        }
        _ => false,
    };
    // Counting form when everything is finite.
    if let (Index::Finite(a), Index::Finite(b), Index::Finite(c)) = (
        y.ysharp.group.order(),
        y.knot.group.order(),
        y.yflat.group.order(),
    ) {
        exact &= a == b * c;
    }

    let transport_is_iso = if check_h90(m, H90Level::Group).holds() {
        let q = &m.class_quotient;
        let sm1_q = m.sigma_on_classes.sub(&GroupHom::identity(&q.group));
        let sm1_q_image = group_calculus(&sm1_q).image;
        let q2 = quotient_by_subgroup(&q.group, &sm1_q_image);
        let transport = hom_from_gens(&q2.group, &y.ysharp.group, |gen| {
            let in_q = q2.lift(gen);
            let in_g = q.lift(&in_q);
            y.ysharp_class(&m.norm.apply(&in_g))
        });
        Some(match transport {
            Ok(t) => {
                let c = group_calculus(&t);
                c.kernel.group.is_trivial() && c.cokernel.group.is_trivial()
            }
            Err(_) => false,
        })
    } else {
        None
    };

    YGroupsReport {
        ysharp: y.ysharp.group.clone(),
        yflat: y.yflat.group.clone(),
        knot: y.knot.group.clone(),
        exact,
        transport_is_iso,
    }
}

/// Builds a hom from generator images computed by a closure; fails when the
/// images do not respect the relations (which itself is a finding).
fn hom_from_gens(
    source: &FgAbelianGroup,
    target: &FgAbelianGroup,
    image_of: impl Fn(&GroupElement) -> GroupElement,
) -> Result<GroupHom, crate::group::AbelianError> {
    let images: Vec<GroupElement> = (0..source.dim())
        .map(|i| {
            let mut v = vec![BigInt::from(0); source.dim()];
            v[i] = BigInt::from(1);
            image_of(&source.element(v))
        })
        .collect();
    GroupHom::from_images(source.clone(), target.clone(), &images)
}

/// Lifts a class of `quotient` (built over `sub.group`) back to the ambient
/// group of `sub`.
fn embed_from_quotient(
    sub: &SubgroupData,
    quotient: &QuotientData,
    class: &GroupElement,
) -> GroupElement {
    sub.embed.apply(&quotient.lift(class))
}

#[derive(Debug, Clone)]
pub struct SharpReport {
    pub character_side: CyclotomicValue,
    pub point_side: CyclotomicValue,
    pub spectral: CyclotomicValue,
    pub ysharp_order: BigUint,
    pub c: BigUint,
    pub holds: bool,
}

/// The sharp identity for kappa = identity: the double character sum over
/// (Y_sharp)^D against the matched function h equals |Y_sharp| times the sum
/// of h over N(Gamma), and both equal the spectral side for f.
pub fn sharp_identity(
    m: &SigmaModule,
    f: &TestFunction,
    h: &TestFunction,
) -> Result<SharpReport, SigmaError> {
    if !m.group.is_zero_elem(&m.kappa) {
        return Err(SigmaError::HypothesisNotMet(
            "sharp identity is stated for kappa = identity".into(),
        ));
    }
    let g_level = check_h90(m, H90Level::Group);
    let gamma_level = check_h90(m, H90Level::Gamma);
    if !g_level.holds() || !gamma_level.holds() {
        return Err(SigmaError::HypothesisNotMet(format!(
            "Hilbert 90 fails (G-level defect {}, Gamma-level defect {})",
            g_level.defect, gamma_level.defect
        )));
    }
    let y = y_data(m);
    let ysharp_order = y
        .ysharp
        .group
        .order()
        .finite()
        .cloned()
        .ok_or_else(|| SigmaError::HypothesisNotMet("Y_sharp is infinite".into()))?;

    // Character side: sum over chi in (Y_sharp)^D and t in N(G) of chi(t) h(t).
    let chars = dual_characters(&y.ysharp.group)?;
    let mut character_side = CyclotomicValue::zero();
    for (t, v) in h.support() {
        if y.ng.contains(t) {
            let class = y.ysharp_class(t);
            for chi in &chars {
                character_side.add_assign(&v.mul(&chi.value(&class)));
            }
        }
    }

    // Point side: |Y_sharp| * sum over N(Gamma) of h.
    let mut gamma_sum = CyclotomicValue::zero();
    for (t, v) in h.support() {
        if y.ngamma.contains(t) {
            gamma_sum.add_assign(v);
        }
    }
    let point_side = gamma_sum
        .scalar_mul(&BigRational::from(BigInt::from(ysharp_order.clone())));

    let spectral = spectral_side(m, f);
    let holds = character_side == point_side
        && character_side == spectral
        && ysharp_order == m.counting_constant();
    Ok(SharpReport {
        character_side,
        point_side,
        spectral,
        ysharp_order,
        c: m.counting_constant(),
        holds,
    })
}

#[derive(Debug, Clone)]
pub struct FlatReport {
    pub character_side: CyclotomicValue,
    pub point_side: CyclotomicValue,
    pub holds: bool,
    /// Present when the restricted form was requested: the factor
    /// [X_K : Y_flat] and both sides of the restricted identity.
    pub restricted: Option<(BigUint, CyclotomicValue, CyclotomicValue)>,
}

/// The degenerate (sigma = id) trace formula for a function h on G, plus the
/// restricted form against a subgroup Y_flat of X_K = G/Gamma when requested.
pub fn flat_identity(
    m: &SigmaModule,
    h: &TestFunction,
    yflat: Option<&SubgroupData>,
) -> Result<FlatReport, SigmaError> {
    if m.sigma_exact_order() != 1 {
        return Err(SigmaError::HypothesisNotMet(
            "flat identity is the degenerate case sigma = identity".into(),
        ));
    }
    let q = &m.class_quotient;
    let chars = dual_characters(&q.group)?;
    let classes: Vec<(GroupElement, &CyclotomicValue)> =
        h.support().map(|(s, v)| (q.project(s), v)).collect();
    let mut character_side = CyclotomicValue::zero();
    for chi in &chars {
        for (class, v) in &classes {
            character_side.add_assign(&v.mul(&chi.value(class)));
        }
    }
    let mut gamma_sum = CyclotomicValue::zero();
    for (s, v) in h.support() {
        if m.gamma.contains(s) {
            gamma_sum.add_assign(v);
        }
    }
    let index = q
        .group
        .order()
        .finite()
        .cloned()
        .expect("class group is finite by module validity");
    let point_side = gamma_sum.scalar_mul(&BigRational::from(BigInt::from(index)));
    let mut holds = character_side == point_side;

    let restricted = match yflat {
        None => None,
        Some(sub) => {
            assert_eq!(sub.ambient, q.group, "Y_flat must be a subgroup of G/Gamma");
            // Support must lie in the preimage of Y_flat.
            let mut restricted_classes = Vec::new();
            for (class, v) in &classes {
                match sub.express(class) {
                    Some(inner) => restricted_classes.push((inner, *v)),
                    None => return Err(SigmaError::SupportViolation),
                }
            }
            let factor = relative_index_of_sub(&q.group, sub);
            let flat_chars = dual_characters(&sub.group)?;
            let mut flat_sum = CyclotomicValue::zero();
            for chi in &flat_chars {
                for (class, v) in &restricted_classes {
                    flat_sum.add_assign(&v.mul(&chi.value(class)));
                }
            }
            let rhs = flat_sum.scalar_mul(&BigRational::from(BigInt::from(factor.clone())));
            holds &= character_side == rhs;
            Some((factor, character_side.clone(), rhs))
        }
    };
    Ok(FlatReport { character_side, point_side, holds, restricted })
}

fn relative_index_of_sub(ambient: &FgAbelianGroup, sub: &SubgroupData) -> BigUint {
    quotient_by_subgroup(ambient, sub)
        .group
        .order()
        .finite()
        .cloned()
        .expect("finite index")
}

#[derive(Debug, Clone)]
pub struct KappaReport {
    pub twists: Vec<GroupElement>,
    pub spectral_sum: CyclotomicValue,
    pub geometric_sum: CyclotomicValue,
    /// |Y_sharp| * sum of h over Gamma_K meet N(G) -- the summed identity.
    pub expected: CyclotomicValue,
    pub knot_order: BigUint,
    pub ysharp_order: BigUint,
    pub c: BigUint,
    pub gamma_h90_holds: bool,
    pub holds: bool,
}

/// Sums the kappa_i-twisted trace formulas over representatives kappa_i of
/// the knot (Gamma_K meet N(G))/N(Gamma), lifted through N, and verifies the
/// summed identity against the matched fiber sums of f.
///
/// G-level Hilbert 90 is required (it makes the matched function well
/// defined). When Gamma-level Hilbert 90 also holds the knot is provably
/// trivial and the identity reduces to the sharp identity with the constant
/// |Y_sharp| = c; with a Gamma-level defect the knot can be nontrivial and
/// the constant is |Y_sharp| = c * defect.
pub fn kappa_sum(m: &SigmaModule, f: &TestFunction) -> Result<KappaReport, SigmaError> {
    if !m.group.is_zero_elem(&m.kappa) {
        return Err(SigmaError::HypothesisNotMet(
            "kappa summation starts from the untwisted module".into(),
        ));
    }
    if !check_h90(m, H90Level::Group).holds() {
        return Err(SigmaError::HypothesisNotMet(
            "G-level Hilbert 90 fails; matching is not well defined".into(),
        ));
    }
    let gamma_h90 = check_h90(m, H90Level::Gamma).holds();
    let y = y_data(m);
    let knot_order = y
        .knot
        .group
        .order()
        .finite()
        .cloned()
        .ok_or_else(|| SigmaError::HypothesisNotMet("knot is infinite".into()))?;
    let ysharp_order = y
        .ysharp
        .group
        .order()
        .finite()
        .cloned()
        .ok_or_else(|| SigmaError::HypothesisNotMet("Y_sharp is infinite".into()))?;

    // Matched fiber sums: h(t) = sum of f over the N-fiber of t. Under
    // G-level H90 this is the orbital matching.
    let mut h: BTreeMap<GroupElement, CyclotomicValue> = BTreeMap::new();
    for (s, v) in f.support() {
        let t = m.norm.apply(s);
        h.entry(t).or_insert_with(CyclotomicValue::zero).add_assign(v);
    }

    // Representatives kappa_i: lift knot classes through N.
    let mut twists = Vec::new();
    let rel = m.group.relation_matrix();
    let stacked = m.norm.matrix.hstack(&rel);
    for class in y.knot.group.elements()? {
        let t = embed_from_quotient(&y.knot_sub, &y.knot, &class);
        let sol = solve(&stacked, &t.coords)
            .expect("knot classes lie in N(G), so the lift exists");
        let kappa = m.group.element(sol[..m.group.dim()].to_vec());
        twists.push(kappa);
    }

    let mut spectral_sum = CyclotomicValue::zero();
    let mut geometric_sum = CyclotomicValue::zero();
    for kappa in &twists {
        let twisted = m.with_kappa(kappa.clone())?;
        // Each twisted formula is itself verified.
        verify_trace_formula(&twisted, f)?;
        spectral_sum.add_assign(&spectral_side(&twisted, f));
        geometric_sum.add_assign(&geometric_side(&twisted, f));
    }

    let mut knot_h_sum = CyclotomicValue::zero();
    for (t, v) in &h {
        if y.knot_sub.contains(t) {
            knot_h_sum.add_assign(v);
        }
    }
    let expected =
        knot_h_sum.scalar_mul(&BigRational::from(BigInt::from(ysharp_order.clone())));

    let mut holds = spectral_sum == expected && geometric_sum == expected;
    if gamma_h90 {
        // Spec display: the knot is trivial and the constant is c exactly.
        holds &= knot_order.is_one() && ysharp_order == m.counting_constant();
        let mut ngamma_h_sum = CyclotomicValue::zero();
        for (t, v) in &h {
            if y.ngamma.contains(t) {
                ngamma_h_sum.add_assign(v);
            }
        }
        let display = ngamma_h_sum.scalar_mul(&BigRational::from(BigInt::from(
            &knot_order * &ysharp_order,
        )));
        holds &= spectral_sum == display;
    }

    Ok(KappaReport {
        twists,
        spectral_sum,
        geometric_sum,
        expected,
        knot_order,
        ysharp_order,
        c: m.counting_constant(),
        gamma_h90_holds: gamma_h90,
        holds,
    })
}

#[derive(Debug, Clone)]
pub struct CrucialRatioReport {
    /// [G_K : Gamma_K N(G)]
    pub numerator: Index,
    /// [(Gamma_K meet N(G)) : N(Gamma)]
    pub denominator: Index,
    pub h90_group: bool,
    pub h90_gamma: bool,
    /// [Z : nZ] when a ray component is attached.
    pub ray_factor: Option<Index>,
}

impl CrucialRatioReport {
    /// The asserted value of the ratio (n with a ray, 1 without); errors with
    /// `HypothesisNotMet` when the H90 preconditions fail. The raw indices
    /// stay available in the report either way.
    pub fn assert_ratio(&self, expected: u64) -> Result<(), SigmaError> {
        if !self.h90_group || !self.h90_gamma {
            return Err(SigmaError::HypothesisNotMet(format!(
                "H90 fails; raw ratio components are {} / {} (warning: unasserted)",
                self.numerator, self.denominator
            )));
        }
        let num = self
            .numerator
            .finite()
            .ok_or_else(|| SigmaError::HypothesisNotMet("infinite numerator".into()))?;
        let den = self
            .denominator
            .finite()
            .ok_or_else(|| SigmaError::HypothesisNotMet("infinite denominator".into()))?;
        let ray = match &self.ray_factor {
            None => BigUint::one(),
            Some(ix) => ix
                .finite()
                .cloned()
                .ok_or_else(|| SigmaError::HypothesisNotMet("infinite ray index".into()))?,
        };
        if num * ray == den * BigUint::from(expected) {
            Ok(())
        } else {
            Err(SigmaError::HypothesisNotMet(format!(
                "ratio is {} * {:?} / {}, expected {expected}",
                self.numerator, self.ray_factor, self.denominator
            )))
        }
    }
}

/// The crucial index ratio [G_K : Gamma_K N(G)] / [(Gamma_K meet N(G)) : N(Gamma)],
/// computed purely by SNF index arithmetic, independent of any trace sum.
pub fn crucial_ratio(m: &SigmaModule) -> CrucialRatioReport {
    let y = y_data(m);
    let sum = sum_of_subgroups(&m.group, &m.gamma_fixed, &y.ng);
    let numerator = relative_index(&m.fixed, &sum);
    let denominator = y.knot.group.order();
    CrucialRatioReport {
        numerator,
        denominator,
        h90_group: check_h90(m, H90Level::Group).holds(),
        h90_gamma: check_h90(m, H90Level::Gamma).holds(),
        ray_factor: None,
    }
}

/// The crucial ratio with the rank-1 ray attached: the numerator picks up the
/// exact factor [Z : nZ] = n.
pub fn crucial_ratio_with_ray(r: &RaySigmaModule) -> CrucialRatioReport {
    let mut report = crucial_ratio(&r.base);
    report.ray_factor = Some(r.ray_index());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IntMatrix;
    use num_traits::ToPrimitive;

    fn cyclic_id_module(ell: u64) -> SigmaModule {
        // G = Z/ell, sigma = id, n = ell: N = 0, the H90 negative control.
        let g = FgAbelianGroup::cyclic(ell);
        SigmaModule::untwisted(g.clone(), GroupHom::identity(&g), ell, vec![]).unwrap()
    }

    fn induced_module(a: u64, gamma: Vec<Vec<i64>>) -> SigmaModule {
        let g = FgAbelianGroup::new(vec![num_bigint::BigUint::from(a); 2], 0);
        let swap =
            GroupHom::new(g.clone(), g.clone(), IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]))
                .unwrap();
        let gens = gamma.iter().map(|v| g.element_i64(v)).collect();
        SigmaModule::untwisted(g, swap, 2, gens).unwrap()
    }

    #[test]
    fn h90_defect_for_identity_sigma() {
        for ell in [2u64, 3, 5] {
            let m = cyclic_id_module(ell);
            let rep = check_h90(&m, H90Level::Group);
            assert!(!rep.holds());
            assert_eq!(rep.defect.to_u64(), Some(ell));
        }
    }

    #[test]
    fn h90_holds_for_induced_modules() {
        // Induced A x A with swap: ker N = antidiagonal = (sigma-1)G.
        for a in [2u64, 3, 4, 6] {
            let m = induced_module(a, vec![]);
            assert!(check_h90(&m, H90Level::Group).holds());
        }
        // Ray component alone: Z with sigma trivial, N = x n: ker N = 0.
        let z = FgAbelianGroup::free(1);
        let m = SigmaModule::untwisted(z.clone(), GroupHom::identity(&z), 2, vec![]);
        // sigma=id with n=2 on Z: N = x2, ker N = 0, (sigma-1)Z = 0: defect 1.
        let m = m.unwrap();
        assert!(check_h90(&m, H90Level::Group).holds());
    }

    #[test]
    fn y_groups_diagonal_gamma() {
        // G = (Z/3)^2, swap, Gamma = diagonal: N(G) = diagonal = N(Gamma).
        let m = induced_module(3, vec![vec![1, 1]]);
        let rep = y_groups(&m);
        assert!(rep.ysharp.is_trivial());
        assert!(rep.knot.is_trivial());
        assert!(rep.exact);
        assert_eq!(rep.transport_is_iso, Some(true));
    }

    #[test]
    fn y_groups_trivial_gamma() {
        // Gamma = 0: N(Gamma) = 0, knot = 0, Y_sharp = Y_flat.
        let m = induced_module(4, vec![]);
        let rep = y_groups(&m);
        assert!(rep.knot.is_trivial());
        assert!(rep.exact);
        assert_eq!(rep.ysharp, rep.yflat);
    }

    #[test]
    fn nontrivial_knot_module() {
        // G = (Z/4)^2 swap, Gamma = <(2,2)>: G-level H90 holds, Gamma-level
        // fails, and the knot has order 2.
        let m = induced_module(4, vec![vec![2, 2]]);
        assert!(check_h90(&m, H90Level::Group).holds());
        assert!(!check_h90(&m, H90Level::Gamma).holds());
        let rep = y_groups(&m);
        assert_eq!(rep.knot.order().to_u64(), Some(2));
        assert!(rep.exact, "exactness must hold even on H90-violating fixtures");
    }

    #[test]
    fn crucial_ratio_examples() {
        // (Z/3)^2 swap, diagonal Gamma: ratio 1 (all indices 1).
        let m = induced_module(3, vec![vec![1, 1]]);
        let rep = crucial_ratio(&m);
        assert_eq!(rep.numerator.to_u64(), Some(1));
        assert_eq!(rep.denominator.to_u64(), Some(1));
        rep.assert_ratio(1).unwrap();
        // With a ray, the ratio is exactly n = 2.
        let ray = RaySigmaModule::new(m);
        assert!(ray.validate());
        let rep = crucial_ratio_with_ray(&ray);
        assert_eq!(rep.ray_factor.as_ref().and_then(|ix| ix.to_u64()), Some(2));
        rep.assert_ratio(2).unwrap();
    }

    #[test]
    fn crucial_ratio_h90_failure_reports_raw() {
        // Z/2 with sigma = id, n = 2, Gamma = 0: H90 fails at G-level; the
        // raw ratio is [Z/2 : 0]/1 = 2 and the assertion errors.
        let m = cyclic_id_module(2);
        let rep = crucial_ratio(&m);
        assert_eq!(rep.numerator.to_u64(), Some(2));
        assert_eq!(rep.denominator.to_u64(), Some(1));
        assert!(!rep.h90_group);
        assert!(matches!(rep.assert_ratio(1), Err(SigmaError::HypothesisNotMet(_))));
    }

    #[test]
    fn flat_identity_basic() {
        // h = indicator of identity: both sides equal [G_K : Gamma_K].
        let g = FgAbelianGroup::cyclic(4);
        let m = SigmaModule::untwisted(
            g.clone(),
            GroupHom::identity(&g),
            1,
            vec![g.element_i64(&[2])],
        )
        .unwrap();
        let h = TestFunction::indicator(&g, g.zero());
        let rep = flat_identity(&m, &h, None).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.character_side.to_integer().and_then(|n| n.to_u64()), Some(2));
    }

    #[test]
    fn flat_identity_restricted() {
        // X_K = Z/4, Y_flat = 2Z/4: restriction factor 2.
        let g = FgAbelianGroup::cyclic(4);
        let m = SigmaModule::untwisted(g.clone(), GroupHom::identity(&g), 1, vec![]).unwrap();
        let q = &m.class_quotient;
        let half = subgroup_from_elements(&q.group, &[q.group.element_i64(&[2])]);
        // h supported on the preimage classes of Y_flat = {0, 2}.
        let h = TestFunction::indicator_of_set(
            &g,
            vec![g.element_i64(&[0]), g.element_i64(&[2])],
        );
        let rep = flat_identity(&m, &h, Some(&half)).unwrap();
        assert!(rep.holds);
        let (factor, _, _) = rep.restricted.unwrap();
        assert_eq!(factor.to_u64(), Some(2));
        // Off-support mass triggers the violation.
        let bad = TestFunction::indicator(&g, g.element_i64(&[1]));
        assert!(matches!(
            flat_identity(&m, &bad, Some(&half)),
            Err(SigmaError::SupportViolation)
        ));
    }

    #[test]
    fn sharp_identity_on_induced_module() {
        // A x A swap with Gamma = B x B, B = 2Z/4: |Y_sharp| = [A:B] = 2 = c.
        let m = induced_module(4, vec![vec![2, 0], vec![0, 2]]);
        assert!(h90_holds_both(&m));
        let f = TestFunction::indicator(&m.group, m.group.zero());
        // Matched fiber sums as h.
        let mut pairs = Vec::new();
        for (s, v) in f.support() {
            pairs.push((m.norm.apply(s), v.clone()));
        }
        let h = TestFunction::new(&m.group, pairs);
        let rep = sharp_identity(&m, &f, &h).unwrap();
        assert!(rep.holds, "sharp identity: {rep:?}");
        assert_eq!(rep.ysharp_order.to_u64(), Some(2));
        assert_eq!(rep.c.to_u64(), Some(2));
    }

    #[test]
    fn sharp_identity_requires_h90() {
        let m = cyclic_id_module(2);
        let f = TestFunction::indicator(&m.group, m.group.zero());
        let h = f.clone();
        assert!(matches!(
            sharp_identity(&m, &f, &h),
            Err(SigmaError::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn kappa_sum_trivial_knot_reduces_to_sharp() {
        let m = induced_module(4, vec![vec![2, 0], vec![0, 2]]);
        let f = TestFunction::indicator(&m.group, m.group.zero());
        let rep = kappa_sum(&m, &f).unwrap();
        assert_eq!(rep.twists.len(), 1);
        assert!(rep.gamma_h90_holds);
        assert!(rep.holds, "kappa sum: {rep:?}");
    }

    #[test]
    fn kappa_sum_with_nontrivial_knot() {
        // The (Z/4)^2 swap module with Gamma = <(2,2)>: knot of order 2,
        // two twists, and the summed identity still holds exactly.
        let m = induced_module(4, vec![vec![2, 2]]);
        let f = TestFunction::new(
            &m.group,
            vec![
                (m.group.element_i64(&[0, 0]), CyclotomicValue::from_integer(1)),
                (m.group.element_i64(&[1, 1]), CyclotomicValue::from_integer(2)),
                (m.group.element_i64(&[1, 0]), CyclotomicValue::zeta(4, 1)),
            ],
        );
        let rep = kappa_sum(&m, &f).unwrap();
        assert_eq!(rep.twists.len(), 2);
        assert!(!rep.gamma_h90_holds);
        assert_eq!(rep.knot_order.to_u64(), Some(2));
        assert!(rep.holds, "kappa sum with knot: {rep:?}");
    }

    #[test]
    fn kappa_sum_zero_function() {
        let m = induced_module(3, vec![vec![1, 1]]);
        let rep = kappa_sum(&m, &TestFunction::zero()).unwrap();
        assert!(rep.spectral_sum.is_zero());
        assert!(rep.geometric_sum.is_zero());
        assert!(rep.holds);
    }
}
