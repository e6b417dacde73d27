//! Finite sigma-modules: an abelian group G with an automorphism sigma of
//! order n, a sigma-stable subgroup Gamma and a twist kappa, together with
//! the derived structure (fixed subgroup, norm map, class quotient) that the
//! twisted trace formula runs on.
//!
//! G is usually finite; groups with free rank are supported as long as both
//! G/Gamma and [G_sigma : Gamma_sigma] stay finite, which is exactly what the
//! trace identities need.

mod exterior;
mod identities;
mod trace;

pub use exterior::exterior_constant_check;
pub use identities::{
    check_h90, crucial_ratio, crucial_ratio_with_ray, flat_identity, h90_holds_both, kappa_sum, sharp_identity,
    y_groups, CrucialRatioReport, FlatReport, H90Level, H90Report, KappaReport, SharpReport,
    YGroupsReport,
};
pub use trace::{geometric_side, kernel_trace, spectral_side, verify_trace_formula};

use crate::cyclotomic::CyclotomicValue;
use crate::group::{
    group_calculus, induced_on_quotient, induced_on_subgroup, intersect_subgroups,
    quotient_by_subgroup, subgroup_from_elements, AbelianError, FgAbelianGroup, GroupElement,
    GroupHom, Index, QuotientData, SubgroupData,
};
use num_bigint::{BigInt, BigUint};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SigmaError {
    #[error("invalid sigma-module: {0:?}")]
    InvalidModule(Vec<String>),
    #[error("trace identity violated: spectral={spectral}, geometric={geometric}, kernel={kernel}")]
    IdentityViolation { spectral: String, geometric: String, kernel: String },
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("support violation: test function has mass outside the allowed preimage")]
    SupportViolation,
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// A finitely supported function on G with values in Q[x]/Phi_e.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    values: BTreeMap<GroupElement, CyclotomicValue>,
}

impl TestFunction {
    pub fn zero() -> Self {
        TestFunction { values: BTreeMap::new() }
    }

    pub fn new(group: &FgAbelianGroup, pairs: Vec<(GroupElement, CyclotomicValue)>) -> Self {
        let mut values = BTreeMap::new();
        for (x, v) in pairs {
            assert_eq!(x.coords.len(), group.dim(), "support point outside the group");
            if !v.is_zero() {
                let entry = values.entry(group.element(x.coords)).or_insert_with(
                    CyclotomicValue::zero,
                );
                entry.add_assign(&v);
            }
        }
        values.retain(|_, v| !v.is_zero());
        TestFunction { values }
    }

    /// Indicator function of a single point.
    pub fn indicator(group: &FgAbelianGroup, point: GroupElement) -> Self {
        Self::new(group, vec![(point, CyclotomicValue::one())])
    }

    /// Indicator of a finite set of points.
    pub fn indicator_of_set(group: &FgAbelianGroup, points: Vec<GroupElement>) -> Self {
        Self::new(
            group,
            points.into_iter().map(|p| (p, CyclotomicValue::one())).collect(),
        )
    }

    pub fn value_at(&self, x: &GroupElement) -> CyclotomicValue {
        self.values.get(x).cloned().unwrap_or_else(CyclotomicValue::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&GroupElement, &CyclotomicValue)> {
        self.values.iter()
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// The translate `x -> f(t + x)`; support moves by `-t`.
    pub fn translate(&self, group: &FgAbelianGroup, t: &GroupElement) -> Self {
        let values = self
            .values
            .iter()
            .map(|(x, v)| (group.sub(x, t), v.clone()))
            .collect();
        TestFunction { values }
    }
}

/// The validated sigma-module with all derived structure precomputed.
#[derive(Debug, Clone)]
pub struct SigmaModule {
    pub group: FgAbelianGroup,
    pub sigma: GroupHom,
    /// The modeled Galois order n (sigma^n = 1; n need not be the exact order,
    /// degenerate controls use sigma = id with n > 1).
    pub order: u64,
    pub gamma: SubgroupData,
    pub kappa: GroupElement,
    /// N = sum of sigma^i for i < n.
    pub norm: GroupHom,
    /// G_K = ker(sigma - 1).
    pub fixed: SubgroupData,
    /// Gamma_K = Gamma meet G_K.
    pub gamma_fixed: SubgroupData,
    /// Q = G/Gamma with projection and lift.
    pub class_quotient: QuotientData,
    /// sigma induced on Q.
    pub sigma_on_classes: GroupHom,
    /// [G_K : Gamma_K]; the trace operations need this finite, but a module
    /// with an infinite index is still a valid sigma-module.
    pub measure_constant: Index,
    sigma_inverse: GroupHom,
    exact_order: u64,
}

/// Structural facts recorded while validating a module.
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub sigma_exact_order: u64,
    pub order_matches: bool,
    pub fixed_group: FgAbelianGroup,
    pub gamma_fixed_group: FgAbelianGroup,
    pub class_count: Index,
    pub measure_constant: Index,
}

impl SigmaModule {
    /// Builds and validates a sigma-module; `InvalidModule` lists every
    /// violated invariant.
    pub fn new(
        group: FgAbelianGroup,
        sigma: GroupHom,
        order: u64,
        gamma_gens: Vec<GroupElement>,
        kappa: GroupElement,
    ) -> Result<SigmaModule, SigmaError> {
        let mut violations: Vec<String> = Vec::new();
        if sigma.source != group || sigma.target != group {
            return Err(SigmaError::InvalidModule(vec![
                "sigma is not an endomorphism of G".into()
            ]));
        }
        if order == 0 {
            violations.push("sigma order must be positive".into());
        }
        if !sigma.is_automorphism() {
            violations.push("sigma is not an automorphism".into());
        }
        let exact_order = match sigma.order_dividing(order.max(1)) {
            Some(m) => m,
            None => {
                violations.push(format!("sigma^{order} is not the identity"));
                return Err(SigmaError::InvalidModule(violations));
            }
        };

        // N = sum_{i<n} sigma^i.
        let mut norm = GroupHom::zero(&group, &group);
        let mut pow = GroupHom::identity(&group);
        for _ in 0..order {
            norm = norm.add(&pow);
            pow = sigma.compose(&pow);
        }

        let gamma = subgroup_from_elements(&group, &gamma_gens);
        // sigma(Gamma) = Gamma.
        let image_gens: Vec<GroupElement> =
            gamma.gens_in_ambient().iter().map(|g| sigma.apply(g)).collect();
        let sigma_gamma = subgroup_from_elements(&group, &image_gens);
        if !sigma_gamma.same_subgroup_as(&gamma) {
            violations.push("Gamma is not sigma-stable".into());
        }

        let diff = sigma.sub(&GroupHom::identity(&group));
        let fixed = group_calculus(&diff).kernel;
        let gamma_fixed = intersect_subgroups(&group, &gamma, &fixed);

        // N * sigma = N and image(N) inside G_K.
        if !norm.compose(&sigma).same_map_as(&norm) {
            violations.push("N . sigma != N".into());
        }
        if !diff.compose(&norm).same_map_as(&GroupHom::zero(&group, &group)) {
            violations.push("image of N is not fixed by sigma".into());
        }

        // N(kappa) must lie in Gamma_K.
        let n_kappa = norm.apply(&kappa);
        if !gamma_fixed.contains(&n_kappa) {
            violations.push("N(kappa) is not in Gamma_K".into());
        }

        let class_quotient = quotient_by_subgroup(&group, &gamma);

        // c = [G_K : Gamma_K], computed inside the fixed subgroup.
        let gamma_in_fixed: Vec<GroupElement> = gamma_fixed
            .gens_in_ambient()
            .iter()
            .map(|g| fixed.express(g).expect("Gamma_K lies in G_K"))
            .collect();
        let sub = subgroup_from_elements(&fixed.group, &gamma_in_fixed);
        let measure_constant = quotient_by_subgroup(&fixed.group, &sub).group.order();

        if !violations.is_empty() {
            return Err(SigmaError::InvalidModule(violations));
        }

        let sigma_on_classes = induced_on_quotient(&sigma, &class_quotient)?;
        let sigma_inverse = if exact_order == 1 {
            GroupHom::identity(&group)
        } else {
            let mut inv = sigma.clone();
            for _ in 0..exact_order - 2 {
                inv = sigma.compose(&inv);
            }
            inv
        };

        Ok(SigmaModule {
            group,
            sigma,
            order,
            gamma,
            kappa,
            norm,
            fixed,
            gamma_fixed,
            class_quotient,
            sigma_on_classes,
            measure_constant,
            sigma_inverse,
            exact_order,
        })
    }

    /// Same module with a different twist kappa (`N(kappa)` is re-checked).
    pub fn with_kappa(&self, kappa: GroupElement) -> Result<SigmaModule, SigmaError> {
        let n_kappa = self.norm.apply(&kappa);
        if !self.gamma_fixed.contains(&n_kappa) {
            return Err(SigmaError::InvalidModule(vec![
                "N(kappa) is not in Gamma_K".into()
            ]));
        }
        let mut m = self.clone();
        m.kappa = kappa;
        Ok(m)
    }

    pub fn structure_report(&self) -> StructureReport {
        StructureReport {
            sigma_exact_order: self.exact_order,
            order_matches: self.exact_order == self.order,
            fixed_group: self.fixed.group.clone(),
            gamma_fixed_group: self.gamma_fixed.group.clone(),
            class_count: self.class_quotient.group.order(),
            measure_constant: self.measure_constant.clone(),
        }
    }

    /// c = [G_K : Gamma_K] as an exact integer; the trace operations require
    /// it to be finite.
    pub fn counting_constant(&self) -> BigUint {
        self.measure_constant
            .finite()
            .cloned()
            .expect("trace operations need [G_K : Gamma_K] finite")
    }

    /// theta(x) = kappa + sigma(x).
    pub fn theta(&self, x: &GroupElement) -> GroupElement {
        self.group.add(&self.kappa, &self.sigma.apply(x))
    }

    /// The unique g with theta(g) = w.
    pub fn theta_preimage(&self, w: &GroupElement) -> GroupElement {
        self.sigma_inverse.apply(&self.group.sub(w, &self.kappa))
    }

    pub fn sigma_inverse(&self) -> &GroupHom {
        &self.sigma_inverse
    }

    pub fn sigma_exact_order(&self) -> u64 {
        self.exact_order
    }

    /// (sigma - 1) as a hom on G.
    pub fn sigma_minus_one(&self) -> GroupHom {
        self.sigma.sub(&GroupHom::identity(&self.group))
    }

    /// Convenience: an untwisted module over a finite group given raw data.
    pub fn untwisted(
        group: FgAbelianGroup,
        sigma: GroupHom,
        order: u64,
        gamma_gens: Vec<GroupElement>,
    ) -> Result<SigmaModule, SigmaError> {
        let kappa = group.zero();
        Self::new(group, sigma, order, gamma_gens, kappa)
    }
}

/// A sigma-module extended by a rank-1 "ray" component Z on which sigma acts
/// trivially and the norm acts as multiplication by n.
#[derive(Debug, Clone)]
pub struct RaySigmaModule {
    pub base: SigmaModule,
    pub ray: FgAbelianGroup,
    pub ray_norm: GroupHom,
}

impl RaySigmaModule {
    pub fn new(base: SigmaModule) -> Self {
        let ray = FgAbelianGroup::free(1);
        let n = BigInt::from(base.order);
        let m = crate::matrix::IntMatrix::from_bigint_rows(&[vec![n]]);
        let ray_norm = GroupHom::new(ray.clone(), ray.clone(), m).expect("ray norm");
        RaySigmaModule { base, ray, ray_norm }
    }

    /// [Z : nZ] computed by actual index arithmetic on the ray.
    pub fn ray_index(&self) -> Index {
        let gen = self.ray.element_i64(&[self.base.order as i64]);
        crate::group::subgroup_index(&self.ray, &[gen])
    }

    /// (sigma - 1) vanishes on the ray and N is injective with cokernel of
    /// order n; both checked by construction.
    pub fn validate(&self) -> bool {
        let calc = group_calculus(&self.ray_norm);
        calc.kernel.group.is_trivial()
            && calc.cokernel.group.order().to_u64() == Some(self.base.order)
    }
}

/// Report produced by `verify_trace_formula`.
#[derive(Debug, Clone)]
pub struct TraceReport {
    pub spectral: CyclotomicValue,
    pub geometric: CyclotomicValue,
    pub kernel_trace: CyclotomicValue,
    /// c = [G_K : Gamma_K].
    pub c: BigUint,
    pub fixed_character_count: usize,
    pub delta_class_count: usize,
}

impl TraceReport {
    pub fn consistent(&self) -> bool {
        self.spectral == self.geometric && self.geometric == self.kernel_trace
    }
}

// Re-exported helpers used by identities and matching.
pub(crate) fn gamma_as_subgroup_of_itself(
    m: &SigmaModule,
) -> (GroupHom, SubgroupData) {
    // sigma restricted to Gamma's abstract structure, and (sigma-1)Gamma as a
    // subgroup of the abstract Gamma.
    let sigma_on_gamma =
        induced_on_subgroup(&m.sigma, &m.gamma).expect("Gamma is sigma-stable");
    let diff = sigma_on_gamma.sub(&GroupHom::identity(&m.gamma.group));
    let image = group_calculus(&diff).image;
    (sigma_on_gamma, image)
}
