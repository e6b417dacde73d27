//! Finitely generated abelian groups in Smith-normal-form coordinates.
//!
//! A group is `Z/d_1 x ... x Z/d_r x Z^rho` with a divisibility chain
//! `d_1 | d_2 | ... | d_r`, `d_i >= 2`. Elements are coordinate vectors with
//! torsion coordinates reduced to `[0, d_i)`. Homomorphisms are integer
//! matrices acting on coordinates; every kernel, image, cokernel and index is
//! computed through the Smith normal form of an integer matrix.

mod enumerated;
mod hom;

pub use enumerated::{enumerate_abelian, enumerate_abelian_from_pool, EnumeratedAbelianGroup};
pub use hom::{
    group_calculus, induced_on_quotient, induced_on_subgroup, intersect_subgroups,
    preimage_of_subgroup, quotient_by_subgroup, restrict_to_subgroup, subgroup_from_elements,
    subgroup_from_gens, sum_of_subgroups, Calculus, GroupHom, QuotientData, SubgroupData,
};

use crate::matrix::{smith_normal_form, IntMatrix};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    /// The matrix does not map source relations into the target relation lattice.
    #[error("ill-formed homomorphism: {0}")]
    IllFormedHom(String),
    #[error("operation requires a finite group (free rank is {0})")]
    NotFinite(usize),
    #[error("coordinate length {got} does not match group dimension {want}")]
    DimensionMismatch { got: usize, want: usize },
}

/// A subgroup index: finite groups have an exact order, quotients with free
/// rank are `Infinite`. `Infinite` is a value, not an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Index {
    Finite(BigUint),
    Infinite,
}

impl Index {
    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            Index::Finite(n) => Some(n),
            Index::Infinite => None,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Index::Finite(n) if n.is_one())
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.finite().and_then(|n| n.to_u64())
    }
}

impl std::fmt::Display for Index {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => write!(f, "INFINITE"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FgAbelianGroup {
    invariant_factors: Vec<BigUint>,
    free_rank: usize,
}

/// An element of an `FgAbelianGroup`, as a reduced coordinate vector.
/// Torsion coordinates lie in `[0, d_i)`; free coordinates are arbitrary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub coords: Vec<BigInt>,
}

impl FgAbelianGroup {
    /// A group with the given invariant factors (chain checked) and free rank.
    pub fn new(invariant_factors: Vec<BigUint>, free_rank: usize) -> Self {
        for (i, d) in invariant_factors.iter().enumerate() {
            assert!(*d >= BigUint::from(2u32), "invariant factor {d} < 2");
            if i + 1 < invariant_factors.len() {
                assert!(
                    (&invariant_factors[i + 1] % d).is_zero(),
                    "divisibility chain broken: {} does not divide {}",
                    d,
                    invariant_factors[i + 1]
                );
            }
        }
        FgAbelianGroup { invariant_factors, free_rank }
    }

    pub fn trivial() -> Self {
        Self::new(vec![], 0)
    }

    pub fn cyclic(n: u64) -> Self {
        assert!(n >= 1);
        if n == 1 {
            Self::trivial()
        } else {
            Self::new(vec![BigUint::from(n)], 0)
        }
    }

    pub fn free(rank: usize) -> Self {
        Self::new(vec![], rank)
    }

    pub fn invariant_factors(&self) -> &[BigUint] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Coordinate dimension `r + rho`.
    pub fn dim(&self) -> usize {
        self.invariant_factors.len() + self.free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    pub fn order(&self) -> Index {
        if self.free_rank > 0 {
            return Index::Infinite;
        }
        let mut n = BigUint::one();
        for d in &self.invariant_factors {
            n *= d;
        }
        Index::Finite(n)
    }

    /// Exponent of the torsion part (1 for trivial/free groups).
    pub fn exponent(&self) -> BigUint {
        self.invariant_factors.last().cloned().unwrap_or_else(BigUint::one)
    }

    /// The relation lattice of `Z^dim`, as columns `d_i * e_i` (torsion only).
    pub fn relation_matrix(&self) -> IntMatrix {
        let dim = self.dim();
        let r = self.invariant_factors.len();
        let mut m = IntMatrix::zeros(dim, r);
        for (i, d) in self.invariant_factors.iter().enumerate() {
            m.set(i, i, BigInt::from(d.clone()));
        }
        m
    }

    pub fn reduce_coords(&self, mut coords: Vec<BigInt>) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.dim(), "coordinate length mismatch");
        for (i, d) in self.invariant_factors.iter().enumerate() {
            let d = BigInt::from(d.clone());
            coords[i] = coords[i].mod_floor(&d);
        }
        coords
    }

    pub fn element(&self, coords: Vec<BigInt>) -> GroupElement {
        GroupElement { coords: self.reduce_coords(coords) }
    }

    pub fn element_i64(&self, coords: &[i64]) -> GroupElement {
        self.element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { coords: vec![BigInt::zero(); self.dim()] }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        self.element(coords)
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.element(a.coords.iter().map(|x| -x).collect())
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let coords = a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect();
        self.element(coords)
    }

    pub fn scalar_mul(&self, k: &BigInt, a: &GroupElement) -> GroupElement {
        self.element(a.coords.iter().map(|x| k * x).collect())
    }

    pub fn is_zero_elem(&self, a: &GroupElement) -> bool {
        a.coords.iter().all(|c| c.is_zero())
    }

    /// Iterates over all elements of a finite group (odometer order).
    pub fn elements(&self) -> Result<ElementIter<'_>, AbelianError> {
        if self.free_rank > 0 {
            return Err(AbelianError::NotFinite(self.free_rank));
        }
        Ok(ElementIter { group: self, current: vec![BigInt::zero(); self.dim()], done: false })
    }

    /// Order of an element of a finite group.
    pub fn element_order(&self, a: &GroupElement) -> BigUint {
        let mut ord = BigUint::one();
        for (i, d) in self.invariant_factors.iter().enumerate() {
            if a.coords[i].is_zero() {
                continue;
            }
            let c = a.coords[i].to_biguint().expect("reduced coordinate");
            let g = c.gcd(d);
            ord = ord.lcm(&(d / g));
        }
        for j in self.invariant_factors.len()..self.dim() {
            assert!(a.coords[j].is_zero(), "element of infinite order");
        }
        ord
    }
}

pub struct ElementIter<'a> {
    group: &'a FgAbelianGroup,
    current: Vec<BigInt>,
    done: bool,
}

impl Iterator for ElementIter<'_> {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        if self.done {
            return None;
        }
        let out = GroupElement { coords: self.current.clone() };
        // Odometer increment over torsion coordinates.
        let mut i = 0;
        loop {
            if i == self.group.invariant_factors.len() {
                self.done = true;
                break;
            }
            self.current[i] += 1;
            if self.current[i].to_biguint().as_ref() == Some(&self.group.invariant_factors[i]) {
                self.current[i] = BigInt::zero();
                i += 1;
            } else {
                break;
            }
        }
        Some(out)
    }
}

/// A group presented as `Z^dim` modulo the column lattice of `relations`,
/// together with coordinate maps to and from the canonical SNF form.
pub(crate) struct Presentation {
    pub group: FgAbelianGroup,
    /// canonical coords = to_canonical * raw coords (then reduce)
    pub to_canonical: IntMatrix,
    /// raw coords representative = from_canonical * canonical coords
    pub from_canonical: IntMatrix,
}

/// Canonicalizes `Z^dim / cols(relations)` into invariant-factor form.
pub(crate) fn canonicalize_presentation(dim: usize, relations: &IntMatrix) -> Presentation {
    assert_eq!(relations.rows(), dim);
    let snf = smith_normal_form(relations);
    let n = dim.min(relations.cols());
    let mut torsion: Vec<(usize, BigUint)> = Vec::new();
    let mut free: Vec<usize> = Vec::new();
    for i in 0..dim {
        let d = if i < n { snf.s.at(i, i).clone() } else { BigInt::zero() };
        if d.is_zero() {
            free.push(i);
        } else if !d.is_one() {
            torsion.push((i, d.to_biguint().expect("nonnegative SNF diagonal")));
        }
    }
    let kept: Vec<usize> =
        torsion.iter().map(|(i, _)| *i).chain(free.iter().copied()).collect();
    let mut to_canonical = IntMatrix::zeros(kept.len(), dim);
    for (row, &i) in kept.iter().enumerate() {
        for j in 0..dim {
            to_canonical.set(row, j, snf.u.at(i, j).clone());
        }
    }
    let mut from_canonical = IntMatrix::zeros(dim, kept.len());
    for (col, &i) in kept.iter().enumerate() {
        for j in 0..dim {
            from_canonical.set(j, col, snf.u_inv.at(j, i).clone());
        }
    }
    let group = FgAbelianGroup::new(torsion.into_iter().map(|(_, d)| d).collect(), free.len());
    Presentation { group, to_canonical, from_canonical }
}

/// Direct product with the embeddings and projections of each factor.
pub struct ProductGroup {
    pub group: FgAbelianGroup,
    pub embeddings: Vec<GroupHom>,
    pub projections: Vec<GroupHom>,
}

/// Computes the direct product of groups in canonical form.
pub fn product(factors: &[FgAbelianGroup]) -> ProductGroup {
    let dim: usize = factors.iter().map(|g| g.dim()).sum();
    let nrel: usize = factors.iter().map(|g| g.torsion_rank()).sum();
    let mut relations = IntMatrix::zeros(dim, nrel);
    let mut roff = 0;
    let mut coff = 0;
    for g in factors {
        let rel = g.relation_matrix();
        for i in 0..rel.rows() {
            for j in 0..rel.cols() {
                relations.set(roff + i, coff + j, rel.at(i, j).clone());
            }
        }
        roff += g.dim();
        coff += g.torsion_rank();
    }
    let pres = canonicalize_presentation(dim, &relations);
    let mut embeddings = Vec::new();
    let mut projections = Vec::new();
    let mut off = 0;
    for g in factors {
        // embedding: factor coords -> raw product coords -> canonical
        let mut inj = IntMatrix::zeros(dim, g.dim());
        for j in 0..g.dim() {
            inj.set(off + j, j, BigInt::one());
        }
        let emb = pres.to_canonical.mul(&inj);
        embeddings.push(
            GroupHom::new(g.clone(), pres.group.clone(), emb).expect("product embedding"),
        );
        // projection: canonical -> raw -> factor coords
        let mut proj = IntMatrix::zeros(g.dim(), dim);
        for j in 0..g.dim() {
            proj.set(j, off + j, BigInt::one());
        }
        let prj = proj.mul(&pres.from_canonical);
        projections.push(
            GroupHom::new(pres.group.clone(), g.clone(), prj).expect("product projection"),
        );
        off += g.dim();
    }
    ProductGroup { group: pres.group, embeddings, projections }
}

/// Index of the subgroup generated by `gens` inside `g`; `Infinite` when the
/// quotient has positive free rank.
pub fn subgroup_index(g: &FgAbelianGroup, gens: &[GroupElement]) -> Index {
    let sub = subgroup_from_elements(g, gens);
    quotient_by_subgroup(g, &sub).group.order()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_of_cyclics() {
        let a = FgAbelianGroup::cyclic(4);
        let b = FgAbelianGroup::cyclic(6);
        let p = product(&[a.clone(), b.clone()]);
        // Z/4 x Z/6 = Z/2 x Z/12
        assert_eq!(
            p.group.invariant_factors(),
            &[BigUint::from(2u32), BigUint::from(12u32)]
        );
        // Embeddings compose with projections to the identity on each factor.
        let e0 = &p.embeddings[0];
        let x = a.element_i64(&[3]);
        let round = p.projections[0].apply(&e0.apply(&x));
        assert_eq!(round, x);
        let cross = p.projections[1].apply(&e0.apply(&x));
        assert!(b.is_zero_elem(&cross));
    }

    #[test]
    fn subgroup_index_examples() {
        // G = Z/4, H = <2> -> 2
        let g = FgAbelianGroup::cyclic(4);
        let h = vec![g.element_i64(&[2])];
        assert_eq!(subgroup_index(&g, &h), Index::Finite(BigUint::from(2u32)));

        // G = Z, H = <2> -> 2
        let z = FgAbelianGroup::free(1);
        let h = vec![z.element_i64(&[2])];
        assert_eq!(subgroup_index(&z, &h), Index::Finite(BigUint::from(2u32)));

        // G = Z, H = {} -> INFINITE
        assert_eq!(subgroup_index(&z, &[]), Index::Infinite);

        // (Z/5)^x = Z/4 with 4 = class of order 2: index 2.
        let g = FgAbelianGroup::cyclic(4);
        let h = vec![g.element_i64(&[2])]; // 4 = g^2 for a generator g of (Z/5)^x
        assert_eq!(subgroup_index(&g, &h), Index::Finite(BigUint::from(2u32)));
    }

    #[test]
    fn element_arithmetic_reduces() {
        let g = FgAbelianGroup::new(vec![BigUint::from(4u32)], 1);
        let a = g.element_i64(&[3, 5]);
        let b = g.element_i64(&[2, -7]);
        let s = g.add(&a, &b);
        assert_eq!(s, g.element_i64(&[1, -2]));
        let n = g.neg(&a);
        assert_eq!(n, g.element_i64(&[1, -5]));
        assert!(g.is_zero_elem(&g.add(&a, &n)));
    }

    #[test]
    fn enumeration_counts() {
        let g = FgAbelianGroup::new(vec![BigUint::from(2u32), BigUint::from(6u32)], 0);
        let elems: Vec<_> = g.elements().unwrap().collect();
        assert_eq!(elems.len(), 12);
        let uniq: std::collections::HashSet<_> = elems.into_iter().collect();
        assert_eq!(uniq.len(), 12);
        assert!(FgAbelianGroup::free(1).elements().is_err());
    }

    #[test]
    fn element_orders() {
        let g = FgAbelianGroup::new(vec![BigUint::from(2u32), BigUint::from(6u32)], 0);
        assert_eq!(g.element_order(&g.element_i64(&[1, 3])), BigUint::from(2u32));
        assert_eq!(g.element_order(&g.element_i64(&[1, 1])), BigUint::from(6u32));
        assert_eq!(g.element_order(&g.zero()), BigUint::one());
    }
}
