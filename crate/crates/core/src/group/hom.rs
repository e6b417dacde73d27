//! Homomorphisms between groups in canonical coordinates, and the derived
//! calculus: kernels, images, cokernels, subgroup lattices, quotient maps.

use super::{canonicalize_presentation, AbelianError, FgAbelianGroup, GroupElement};
use crate::matrix::{kernel_basis, smith_normal_form, solve, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// A homomorphism `source -> target` given by an integer matrix acting on
/// coordinates (`dim(target) x dim(source)`).
#[derive(Debug, Clone)]
pub struct GroupHom {
    pub source: FgAbelianGroup,
    pub target: FgAbelianGroup,
    pub matrix: IntMatrix,
}

impl GroupHom {
    /// Builds a hom after checking well-definedness: each source relation
    /// `d_i e_i` must map into the relation lattice of the target.
    pub fn new(
        source: FgAbelianGroup,
        target: FgAbelianGroup,
        matrix: IntMatrix,
    ) -> Result<Self, AbelianError> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(AbelianError::DimensionMismatch {
                got: matrix.cols(),
                want: source.dim(),
            });
        }
        for (i, d) in source.invariant_factors().iter().enumerate() {
            let d = BigInt::from(d.clone());
            for j in 0..target.dim() {
                let v = &d * matrix.at(j, i);
                let ok = if j < target.torsion_rank() {
                    (v % BigInt::from(target.invariant_factors()[j].clone())).is_zero()
                } else {
                    v.is_zero()
                };
                if !ok {
                    return Err(AbelianError::IllFormedHom(format!(
                        "source relation {d}*e_{i} escapes the target lattice at coordinate {j}"
                    )));
                }
            }
        }
        Ok(GroupHom { source, target, matrix })
    }

    /// Builds a hom from the images of the canonical generators.
    pub fn from_images(
        source: FgAbelianGroup,
        target: FgAbelianGroup,
        images: &[GroupElement],
    ) -> Result<Self, AbelianError> {
        assert_eq!(images.len(), source.dim(), "one image per generator");
        let cols: Vec<Vec<BigInt>> = images.iter().map(|e| e.coords.clone()).collect();
        let matrix = IntMatrix::from_columns(&cols, target.dim());
        Self::new(source, target, matrix)
    }

    pub fn identity(g: &FgAbelianGroup) -> Self {
        GroupHom { source: g.clone(), target: g.clone(), matrix: IntMatrix::identity(g.dim()) }
    }

    pub fn zero(source: &FgAbelianGroup, target: &FgAbelianGroup) -> Self {
        GroupHom {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.dim(), source.dim()),
        }
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        debug_assert_eq!(x.coords.len(), self.source.dim());
        self.target.element(self.matrix.apply(&x.coords))
    }

    /// `self` after `other`: `x -> self(other(x))`.
    pub fn compose(&self, other: &GroupHom) -> GroupHom {
        assert_eq!(other.target, self.source, "composition mismatch");
        GroupHom {
            source: other.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    pub fn add(&self, other: &GroupHom) -> GroupHom {
        assert_eq!(self.source, other.source);
        assert_eq!(self.target, other.target);
        let mut m = IntMatrix::zeros(self.matrix.rows(), self.matrix.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                m.set(i, j, self.matrix.at(i, j) + other.matrix.at(i, j));
            }
        }
        GroupHom { source: self.source.clone(), target: self.target.clone(), matrix: m }
    }

    pub fn sub(&self, other: &GroupHom) -> GroupHom {
        assert_eq!(self.source, other.source);
        assert_eq!(self.target, other.target);
        let mut m = IntMatrix::zeros(self.matrix.rows(), self.matrix.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                m.set(i, j, self.matrix.at(i, j) - other.matrix.at(i, j));
            }
        }
        GroupHom { source: self.source.clone(), target: self.target.clone(), matrix: m }
    }

    /// Matrix with torsion-target rows reduced; a complete invariant of the
    /// map itself (two matrices induce the same hom iff these agree).
    pub fn canonical_matrix(&self) -> IntMatrix {
        let mut m = self.matrix.clone();
        for j in 0..self.target.torsion_rank() {
            let d = BigInt::from(self.target.invariant_factors()[j].clone());
            for i in 0..m.cols() {
                let v = m.at(j, i).mod_floor(&d);
                m.set(j, i, v);
            }
        }
        m
    }

    pub fn same_map_as(&self, other: &GroupHom) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.canonical_matrix() == other.canonical_matrix()
    }

    pub fn is_identity_map(&self) -> bool {
        self.source == self.target && self.same_map_as(&GroupHom::identity(&self.source))
    }

    /// Exact order of an endomorphism under composition, up to `bound`.
    pub fn order_dividing(&self, bound: u64) -> Option<u64> {
        assert_eq!(self.source, self.target);
        let mut pow = self.clone();
        for k in 1..=bound {
            if pow.is_identity_map() {
                return Some(k);
            }
            pow = self.compose(&pow);
        }
        None
    }

    /// True when the hom is bijective.
    pub fn is_automorphism(&self) -> bool {
        if self.source != self.target {
            return false;
        }
        let c = group_calculus(self);
        c.kernel.group.is_trivial() && c.cokernel.group.is_trivial()
    }
}

/// A subgroup of `ambient`: its abstract structure, the embedding hom, and the
/// lattice basis used to express elements.
#[derive(Debug, Clone)]
pub struct SubgroupData {
    pub ambient: FgAbelianGroup,
    pub group: FgAbelianGroup,
    pub embed: GroupHom,
    /// Columns span the subgroup lattice in `Z^dim(ambient)` (relation
    /// lattice included).
    pub lattice_basis: IntMatrix,
    /// Lattice coordinates -> canonical subgroup coordinates.
    to_canonical: IntMatrix,
}

impl SubgroupData {
    /// Coordinates of `x` in the subgroup, or `None` when `x` is outside.
    pub fn express(&self, x: &GroupElement) -> Option<GroupElement> {
        let rel = self.ambient.relation_matrix();
        let stacked = self.lattice_basis.hstack(&rel);
        let z = solve(&stacked, &x.coords)?;
        // Map lattice coordinates through the presentation: the embed matrix
        // is basis * from_canonical, so invert through to_canonical instead.
        let zb: Vec<BigInt> = z[..self.lattice_basis.cols()].to_vec();
        Some(self.group.element(self.to_canonical.apply(&zb)))
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.express(x).is_some()
    }

    pub fn order(&self) -> super::Index {
        self.group.order()
    }

    /// Generators of the subgroup as ambient elements.
    pub fn gens_in_ambient(&self) -> Vec<GroupElement> {
        (0..self.group.dim())
            .map(|i| {
                let mut e = vec![BigInt::zero(); self.group.dim()];
                e[i] = BigInt::one();
                self.embed.apply(&self.group.element(e))
            })
            .collect()
    }

    /// Enumerates all elements (finite subgroups only) as ambient elements.
    pub fn elements_in_ambient(&self) -> Result<Vec<GroupElement>, AbelianError> {
        Ok(self.group.elements()?.map(|h| self.embed.apply(&h)).collect())
    }

    pub fn same_subgroup_as(&self, other: &SubgroupData) -> bool {
        assert_eq!(self.ambient, other.ambient);
        self.gens_in_ambient().iter().all(|g| other.contains(g))
            && other.gens_in_ambient().iter().all(|g| self.contains(g))
    }
}

// SubgroupData::express needs the presentation's to_canonical; carried here.
#[derive(Debug, Clone)]
pub struct QuotientData {
    pub ambient: FgAbelianGroup,
    pub group: FgAbelianGroup,
    pub project: GroupHom,
    /// Representative lift: canonical quotient coords -> ambient coords.
    /// A section modulo the kernel lattice, not a group hom in general.
    pub lift_matrix: IntMatrix,
    /// Columns span the kernel lattice of `project` in `Z^dim(ambient)`.
    pub kernel_lattice: IntMatrix,
}

impl QuotientData {
    pub fn project(&self, x: &GroupElement) -> GroupElement {
        self.project.apply(x)
    }

    /// A representative of the class `q` in the ambient group.
    pub fn lift(&self, q: &GroupElement) -> GroupElement {
        self.ambient.element(self.lift_matrix.apply(&q.coords))
    }

    /// Canonical key identifying the class of `x` (equal iff same class).
    pub fn class_key(&self, x: &GroupElement) -> Vec<BigInt> {
        self.project(x).coords
    }
}

/// Subgroup of `ambient` generated by raw coordinate vectors.
pub fn subgroup_from_gens(ambient: &FgAbelianGroup, gens: &[Vec<BigInt>]) -> SubgroupData {
    let dim = ambient.dim();
    let cols: Vec<Vec<BigInt>> = gens.to_vec();
    let a = IntMatrix::from_columns(&cols, dim);
    let rel = ambient.relation_matrix();
    let full = a.hstack(&rel);
    // Basis of the subgroup lattice from the SNF column space.
    let snf = smith_normal_form(&full);
    let rank = snf.rank();
    let mut basis_cols = Vec::new();
    for i in 0..rank {
        let col = snf.u_inv.column(i);
        let s_i = snf.s.at(i, i);
        basis_cols.push(col.into_iter().map(|c| c * s_i).collect::<Vec<BigInt>>());
    }
    let basis = IntMatrix::from_columns(&basis_cols, dim);
    // Relations of the presentation Z^rank -> lattice/Lambda.
    let stacked = basis.hstack(&rel);
    let ker = kernel_basis(&stacked);
    let mut rel_cols = Vec::new();
    for j in 0..ker.cols() {
        rel_cols.push(ker.column(j)[..rank].to_vec());
    }
    let relations = IntMatrix::from_columns(&rel_cols, rank);
    let pres = canonicalize_presentation(rank, &relations);
    let embed_matrix = basis.mul(&pres.from_canonical);
    let embed = GroupHom::new(pres.group.clone(), ambient.clone(), embed_matrix)
        .expect("subgroup embedding is well defined by construction");
    SubgroupData {
        ambient: ambient.clone(),
        group: pres.group,
        embed,
        lattice_basis: basis,
        to_canonical: pres.to_canonical,
    }
}

/// Subgroup generated by (already reduced) group elements.
pub fn subgroup_from_elements(ambient: &FgAbelianGroup, gens: &[GroupElement]) -> SubgroupData {
    let raw: Vec<Vec<BigInt>> = gens.iter().map(|g| g.coords.clone()).collect();
    subgroup_from_gens(ambient, &raw)
}

/// The quotient `ambient / sub` with projection and a representative lift.
pub fn quotient_by_subgroup(ambient: &FgAbelianGroup, sub: &SubgroupData) -> QuotientData {
    assert_eq!(&sub.ambient, ambient);
    let rel = ambient.relation_matrix();
    let kernel_lattice = sub.lattice_basis.hstack(&rel);
    let pres = canonicalize_presentation(ambient.dim(), &kernel_lattice);
    let project = GroupHom::new(ambient.clone(), pres.group.clone(), pres.to_canonical)
        .expect("quotient projection is well defined by construction");
    QuotientData {
        ambient: ambient.clone(),
        group: pres.group,
        project,
        lift_matrix: pres.from_canonical,
        kernel_lattice,
    }
}

/// Kernel, image and cokernel of a hom, with inclusion/projection data.
#[derive(Debug, Clone)]
pub struct Calculus {
    pub kernel: SubgroupData,
    pub image: SubgroupData,
    pub cokernel: QuotientData,
}

pub fn group_calculus(h: &GroupHom) -> Calculus {
    // Image: generated by the images of all source generators.
    let img_gens: Vec<Vec<BigInt>> =
        (0..h.source.dim()).map(|j| h.matrix.column(j)).collect();
    let image = subgroup_from_gens(&h.target, &img_gens);

    // Kernel lattice: x with M x in the target relation lattice.
    let rel_t = h.target.relation_matrix();
    let stacked = h.matrix.hstack(&rel_t);
    let ker = kernel_basis(&stacked);
    let mut ker_gens = Vec::new();
    for j in 0..ker.cols() {
        ker_gens.push(ker.column(j)[..h.source.dim()].to_vec());
    }
    let kernel = subgroup_from_gens(&h.source, &ker_gens);

    let cokernel = quotient_by_subgroup(&h.target, &image);
    Calculus { kernel, image, cokernel }
}

/// Preimage of a subgroup of the target under `h`.
pub fn preimage_of_subgroup(h: &GroupHom, sub: &SubgroupData) -> SubgroupData {
    assert_eq!(sub.ambient, h.target);
    let rel_t = h.target.relation_matrix();
    // Solve M x = A z + Lambda w; kernel of [M | -A | -Lambda].
    let mut neg_a = sub.lattice_basis.clone();
    let mut neg_rel = rel_t.clone();
    for m in [&mut neg_a, &mut neg_rel] {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = -m.at(i, j).clone();
                m.set(i, j, v);
            }
        }
    }
    let stacked = h.matrix.hstack(&neg_a).hstack(&neg_rel);
    let ker = kernel_basis(&stacked);
    let mut gens = Vec::new();
    for j in 0..ker.cols() {
        gens.push(ker.column(j)[..h.source.dim()].to_vec());
    }
    subgroup_from_gens(&h.source, &gens)
}

/// Intersection of two subgroups of the same ambient group.
pub fn intersect_subgroups(
    ambient: &FgAbelianGroup,
    a: &SubgroupData,
    b: &SubgroupData,
) -> SubgroupData {
    assert_eq!(&a.ambient, ambient);
    assert_eq!(&b.ambient, ambient);
    let rel = ambient.relation_matrix();
    let mut neg_b = b.lattice_basis.clone();
    let mut neg_rel = rel.clone();
    for m in [&mut neg_b, &mut neg_rel] {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = -m.at(i, j).clone();
                m.set(i, j, v);
            }
        }
    }
    let stacked = a.lattice_basis.hstack(&neg_b).hstack(&neg_rel);
    let ker = kernel_basis(&stacked);
    let s1 = a.lattice_basis.cols();
    let mut gens = Vec::new();
    for j in 0..ker.cols() {
        let z1: Vec<BigInt> = ker.column(j)[..s1].to_vec();
        gens.push(a.lattice_basis.apply(&z1));
    }
    subgroup_from_gens(ambient, &gens)
}

/// Subgroup generated by the union of two subgroups.
pub fn sum_of_subgroups(
    ambient: &FgAbelianGroup,
    a: &SubgroupData,
    b: &SubgroupData,
) -> SubgroupData {
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..a.lattice_basis.cols() {
        gens.push(a.lattice_basis.column(j));
    }
    for j in 0..b.lattice_basis.cols() {
        gens.push(b.lattice_basis.column(j));
    }
    subgroup_from_gens(ambient, &gens)
}

/// The endomorphism induced by `h` on `ambient / sub`; errors when `h` does
/// not preserve the kernel lattice.
pub fn induced_on_quotient(h: &GroupHom, q: &QuotientData) -> Result<GroupHom, AbelianError> {
    assert_eq!(h.source, q.ambient);
    assert_eq!(h.target, q.ambient);
    // h must map the kernel lattice into itself.
    for j in 0..q.kernel_lattice.cols() {
        let img = h.matrix.apply(&q.kernel_lattice.column(j));
        if solve(&q.kernel_lattice, &img).is_none() {
            return Err(AbelianError::IllFormedHom(
                "map does not preserve the quotient kernel lattice".into(),
            ));
        }
    }
    let m = q.project.matrix.mul(&h.matrix).mul(&q.lift_matrix);
    GroupHom::new(q.group.clone(), q.group.clone(), m)
}

/// Restriction of `h` to a subgroup of its source, as a hom from the
/// subgroup's abstract structure.
pub fn restrict_to_subgroup(h: &GroupHom, sub: &SubgroupData) -> GroupHom {
    assert_eq!(sub.ambient, h.source);
    h.compose(&sub.embed)
}

/// The endomorphism induced by `h` on a subgroup it stabilizes.
pub fn induced_on_subgroup(h: &GroupHom, sub: &SubgroupData) -> Result<GroupHom, AbelianError> {
    let restricted = restrict_to_subgroup(h, sub);
    let mut cols = Vec::new();
    for j in 0..sub.group.dim() {
        let mut e = vec![BigInt::zero(); sub.group.dim()];
        e[j] = BigInt::one();
        let img = restricted.apply(&sub.group.element(e));
        match sub.express(&img) {
            Some(c) => cols.push(c.coords),
            None => {
                return Err(AbelianError::IllFormedHom(
                    "map does not stabilize the subgroup".into(),
                ))
            }
        }
    }
    let m = IntMatrix::from_columns(&cols, sub.group.dim());
    GroupHom::new(sub.group.clone(), sub.group.clone(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn z_mod(n: u64) -> FgAbelianGroup {
        FgAbelianGroup::cyclic(n)
    }

    #[test]
    fn calculus_mul2_on_z4() {
        // h = multiplication by 2 on Z/4: kernel = image = cokernel = Z/2.
        let g = z_mod(4);
        let h = GroupHom::new(g.clone(), g.clone(), IntMatrix::from_rows(&[vec![2]])).unwrap();
        let c = group_calculus(&h);
        assert_eq!(c.kernel.group.invariant_factors(), &[BigUint::from(2u32)]);
        assert_eq!(c.image.group.invariant_factors(), &[BigUint::from(2u32)]);
        assert_eq!(c.cokernel.group.invariant_factors(), &[BigUint::from(2u32)]);
        // |source| = |kernel| * |image|
        assert_eq!(
            g.order().finite().unwrap().clone(),
            c.kernel.group.order().finite().unwrap() * c.image.group.order().finite().unwrap()
        );
    }

    #[test]
    fn calculus_mul_n_on_z() {
        // h = multiplication by n on Z: cokernel = Z/n.
        let z = FgAbelianGroup::free(1);
        let h = GroupHom::new(z.clone(), z.clone(), IntMatrix::from_rows(&[vec![2]])).unwrap();
        let c = group_calculus(&h);
        assert!(c.kernel.group.is_trivial());
        assert_eq!(c.cokernel.group.invariant_factors(), &[BigUint::from(2u32)]);
    }

    #[test]
    fn calculus_sum_map_on_klein() {
        // (a,b) -> a+b from Z/2 x Z/2 to Z/2: kernel is the diagonal.
        let g = FgAbelianGroup::new(vec![BigUint::from(2u32), BigUint::from(2u32)], 0);
        let t = z_mod(2);
        let h = GroupHom::new(g.clone(), t.clone(), IntMatrix::from_rows(&[vec![1, 1]])).unwrap();
        let c = group_calculus(&h);
        assert_eq!(c.kernel.group.invariant_factors(), &[BigUint::from(2u32)]);
        // 4-element enumeration: the kernel is exactly {(0,0),(1,1)}.
        let kernel_elems = c.kernel.elements_in_ambient().unwrap();
        let expected: std::collections::HashSet<_> =
            [g.element_i64(&[0, 0]), g.element_i64(&[1, 1])].into_iter().collect();
        let got: std::collections::HashSet<_> = kernel_elems.into_iter().collect();
        assert_eq!(got, expected);
        assert_eq!(c.image.group.invariant_factors(), &[BigUint::from(2u32)]);
    }

    #[test]
    fn ill_formed_hom_rejected() {
        // Z/2 -> Z/4 by 1 is not well defined (2*1 not in 4Z).
        let s = z_mod(2);
        let t = z_mod(4);
        let r = GroupHom::new(s, t, IntMatrix::from_rows(&[vec![1]]));
        assert!(matches!(r, Err(AbelianError::IllFormedHom(_))));
    }

    #[test]
    fn subgroup_express_and_membership() {
        let g = FgAbelianGroup::new(vec![BigUint::from(4u32), BigUint::from(4u32)], 0);
        let sub = subgroup_from_elements(&g, &[g.element_i64(&[2, 2])]);
        assert_eq!(sub.group.invariant_factors(), &[BigUint::from(2u32)]);
        assert!(sub.contains(&g.element_i64(&[2, 2])));
        assert!(sub.contains(&g.element_i64(&[0, 0])));
        assert!(!sub.contains(&g.element_i64(&[2, 0])));
        let c = sub.express(&g.element_i64(&[2, 2])).unwrap();
        assert_eq!(sub.embed.apply(&c), g.element_i64(&[2, 2]));
    }

    #[test]
    fn quotient_projection_and_lift() {
        let g = FgAbelianGroup::new(vec![BigUint::from(4u32)], 1);
        let sub = subgroup_from_elements(&g, &[g.element_i64(&[0, 2])]);
        let q = quotient_by_subgroup(&g, &sub);
        // Z/4 x Z / <(0,2)> = Z/4 x Z/2
        let mut factors = q.group.invariant_factors().to_vec();
        factors.sort();
        assert_eq!(factors, vec![BigUint::from(2u32), BigUint::from(4u32)]);
        assert_eq!(q.group.free_rank(), 0);
        for x in [g.element_i64(&[1, 3]), g.element_i64(&[3, -2])] {
            let lifted = q.lift(&q.project(&x));
            // lift of the class differs from x by an element of the subgroup
            assert!(sub.contains(&g.sub(&lifted, &x)));
        }
    }

    #[test]
    fn intersection_and_sum() {
        let g = FgAbelianGroup::new(vec![BigUint::from(12u32)], 0);
        let a = subgroup_from_elements(&g, &[g.element_i64(&[2])]);
        let b = subgroup_from_elements(&g, &[g.element_i64(&[3])]);
        let meet = intersect_subgroups(&g, &a, &b);
        assert_eq!(meet.group.order().to_u64(), Some(2)); // <6>
        let join = sum_of_subgroups(&g, &a, &b);
        assert_eq!(join.group.order().to_u64(), Some(12)); // gcd(2,3)=1
    }

    #[test]
    fn functoriality_order_identity() {
        // |G| = |H| * [G:H] over a family of subgroup fixtures.
        let g = FgAbelianGroup::new(vec![BigUint::from(2u32), BigUint::from(8u32)], 0);
        let fixtures: Vec<Vec<GroupElement>> = vec![
            vec![],
            vec![g.element_i64(&[1, 0])],
            vec![g.element_i64(&[0, 2])],
            vec![g.element_i64(&[1, 1])],
            vec![g.element_i64(&[1, 2]), g.element_i64(&[0, 4])],
        ];
        for gens in fixtures {
            let sub = subgroup_from_elements(&g, &gens);
            let q = quotient_by_subgroup(&g, &sub);
            let total = g.order().finite().unwrap().clone();
            assert_eq!(
                total,
                sub.group.order().finite().unwrap() * q.group.order().finite().unwrap()
            );
        }
    }

    #[test]
    fn induced_maps() {
        // Swap on (Z/3)^2, quotient by the diagonal.
        let g = FgAbelianGroup::new(vec![BigUint::from(3u32), BigUint::from(3u32)], 0);
        let swap =
            GroupHom::new(g.clone(), g.clone(), IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]))
                .unwrap();
        let diag = subgroup_from_elements(&g, &[g.element_i64(&[1, 1])]);
        let q = quotient_by_subgroup(&g, &diag);
        let induced = induced_on_quotient(&swap, &q).unwrap();
        // On the quotient, swap acts as negation: x ~ (x,0), swap -> (0,x) ~ (-x,0).
        let x = q.project(&g.element_i64(&[1, 0]));
        assert_eq!(induced.apply(&x), q.group.neg(&x));
        // Swap stabilizes the diagonal and acts as the identity there.
        let on_sub = induced_on_subgroup(&swap, &diag).unwrap();
        assert!(on_sub.is_identity_map());
    }
}
