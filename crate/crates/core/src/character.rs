//! Characters of finite abelian groups with values in exact cyclotomic
//! arithmetic, plus the dual-side calculus (characters trivial on a subgroup,
//! characters fixed by an automorphism).

use crate::cyclotomic::CyclotomicValue;
use crate::group::{
    group_calculus, AbelianError, FgAbelianGroup, GroupElement, GroupHom, SubgroupData,
};
use crate::matrix::IntMatrix;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

/// A character of a finite group of exponent `e`: the value on the i-th
/// canonical generator is `zeta_e^(a_i * e/d_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    moduli: Vec<BigUint>,
    exponent: u64,
    exps: Vec<BigUint>,
}

impl Character {
    pub fn trivial(owner: &FgAbelianGroup) -> Self {
        assert!(owner.is_finite());
        Character {
            moduli: owner.invariant_factors().to_vec(),
            exponent: group_exponent_u64(owner),
            exps: vec![BigUint::zero(); owner.torsion_rank()],
        }
    }

    /// Builds the character with exponent vector `a` (an element of the dual
    /// group in canonical coordinates).
    pub fn from_dual_coords(owner: &FgAbelianGroup, a: &GroupElement) -> Self {
        assert!(owner.is_finite());
        assert_eq!(a.coords.len(), owner.torsion_rank());
        Character {
            moduli: owner.invariant_factors().to_vec(),
            exponent: group_exponent_u64(owner),
            exps: a
                .coords
                .iter()
                .map(|c| c.to_biguint().expect("reduced dual coordinate"))
                .collect(),
        }
    }

    pub fn exponent_vector(&self) -> &[BigUint] {
        &self.exps
    }

    /// zeta_e-exponent of the value on `x`, reduced mod e.
    fn zeta_exponent(&self, x: &GroupElement) -> u64 {
        assert_eq!(x.coords.len(), self.moduli.len(), "character needs torsion coordinates");
        let e = BigInt::from(self.exponent);
        let mut acc = BigInt::zero();
        for (i, d) in self.moduli.iter().enumerate() {
            let step = BigInt::from(self.exponent) / BigInt::from(d.clone());
            acc += BigInt::from(self.exps[i].clone()) * &x.coords[i] * step;
        }
        acc.mod_floor(&e).to_u64().expect("exponent fits u64")
    }

    pub fn value(&self, x: &GroupElement) -> CyclotomicValue {
        CyclotomicValue::zeta(self.exponent, self.zeta_exponent(x) as i64)
    }

    /// Value as a pure root of unity `(e, k)`, handy for fast accumulation.
    pub fn value_exponent(&self, x: &GroupElement) -> (u64, u64) {
        (self.exponent, self.zeta_exponent(x))
    }

    pub fn mul(&self, other: &Character) -> Character {
        assert_eq!(self.moduli, other.moduli);
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&self.moduli)
            .map(|((a, b), d)| (a + b) % d)
            .collect();
        Character { moduli: self.moduli.clone(), exponent: self.exponent, exps }
    }

    pub fn inverse(&self) -> Character {
        let exps = self
            .exps
            .iter()
            .zip(&self.moduli)
            .map(|(a, d)| if a.is_zero() { BigUint::zero() } else { d - a })
            .collect();
        Character { moduli: self.moduli.clone(), exponent: self.exponent, exps }
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|a| a.is_zero())
    }

    /// Pullback along a hom into the owner: `x -> chi(h(x))`.
    pub fn pullback(&self, h: &GroupHom) -> impl Fn(&GroupElement) -> CyclotomicValue + '_ {
        let h = h.clone();
        move |x: &GroupElement| self.value(&h.apply(x))
    }
}

fn group_exponent_u64(g: &FgAbelianGroup) -> u64 {
    g.exponent().to_u64().expect("desk-scale group exponent")
}

/// The dual group of a finite group (abstractly isomorphic to it).
pub fn dual_group(g: &FgAbelianGroup) -> Result<FgAbelianGroup, AbelianError> {
    if !g.is_finite() {
        return Err(AbelianError::NotFinite(g.free_rank()));
    }
    Ok(FgAbelianGroup::new(g.invariant_factors().to_vec(), 0))
}

/// All |G| characters of a finite group.
pub fn dual_characters(g: &FgAbelianGroup) -> Result<Vec<Character>, AbelianError> {
    let dual = dual_group(g)?;
    Ok(dual.elements()?.map(|a| Character::from_dual_coords(g, &a)).collect())
}

/// The map on dual coordinates induced by `alpha: G -> G` via
/// `chi -> chi . alpha`. Entry (i,j) is `m_ji * d_i / d_j`, an exact integer
/// by well-definedness of `alpha`.
pub fn dual_hom(alpha: &GroupHom) -> Result<GroupHom, AbelianError> {
    assert_eq!(alpha.source, alpha.target, "dual action needs an endomorphism");
    let g = &alpha.source;
    let dual = dual_group(g)?;
    let r = g.torsion_rank();
    let mut b = IntMatrix::zeros(r, r);
    for i in 0..r {
        let d_i = BigInt::from(g.invariant_factors()[i].clone());
        for j in 0..r {
            let d_j = BigInt::from(g.invariant_factors()[j].clone());
            let num = alpha.matrix.at(j, i) * &d_i;
            let (q, rem) = num.div_rem(&d_j);
            assert!(rem.is_zero(), "well-formed hom guarantees exact division");
            b.set(i, j, q);
        }
    }
    GroupHom::new(dual.clone(), dual, b)
}

/// Characters of `g` trivial on the given subgroup; there are exactly [G:H]
/// of them (the dual of G/H lifted).
pub fn characters_trivial_on(
    g: &FgAbelianGroup,
    sub: &SubgroupData,
) -> Result<Vec<Character>, AbelianError> {
    let dual = dual_group(g)?;
    let e = group_exponent_u64(g);
    if e == 1 {
        return Ok(vec![Character::trivial(g)]);
    }
    let gens = sub.gens_in_ambient();
    if gens.is_empty() {
        return dual_characters(g);
    }
    // Evaluation hom dual -> (Z/e)^s, a -> (sum_i a_i (e/d_i) g_i)_gens.
    let target = FgAbelianGroup::new(vec![BigUint::from(e); gens.len()], 0);
    let mut m = IntMatrix::zeros(gens.len(), dual.dim());
    for (row, gen) in gens.iter().enumerate() {
        for i in 0..dual.dim() {
            let step = BigInt::from(e) / BigInt::from(g.invariant_factors()[i].clone());
            m.set(row, i, step * &gen.coords[i]);
        }
    }
    let eval = GroupHom::new(dual, target, m)?;
    let kernel = group_calculus(&eval).kernel;
    let mut out = Vec::new();
    for a in kernel.elements_in_ambient()? {
        out.push(Character::from_dual_coords(g, &a));
    }
    Ok(out)
}

/// Characters with `chi . alpha = chi`, a subgroup of the dual.
pub fn characters_fixed_by(
    g: &FgAbelianGroup,
    alpha: &GroupHom,
) -> Result<Vec<Character>, AbelianError> {
    let b = dual_hom(alpha)?;
    let diff = b.sub(&GroupHom::identity(&b.source));
    let kernel = group_calculus(&diff).kernel;
    let mut out = Vec::new();
    for a in kernel.elements_in_ambient()? {
        out.push(Character::from_dual_coords(g, &a));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::subgroup_from_elements;
    use std::collections::HashSet;

    #[test]
    fn dual_count_and_closure() {
        let g = FgAbelianGroup::cyclic(6);
        let chars = dual_characters(&g).unwrap();
        assert_eq!(chars.len(), 6);
        let set: HashSet<_> = chars.iter().cloned().collect();
        assert_eq!(set.len(), 6);
        for a in &chars {
            for b in &chars {
                assert!(set.contains(&a.mul(b)), "dual not closed under product");
            }
        }
        // trivial group: one character
        let chars = dual_characters(&FgAbelianGroup::trivial()).unwrap();
        assert_eq!(chars.len(), 1);
    }

    #[test]
    fn klein_characters_real() {
        let g = FgAbelianGroup::new(vec![BigUint::from(2u32); 2], 0);
        let chars = dual_characters(&g).unwrap();
        assert_eq!(chars.len(), 4);
        for chi in &chars {
            for x in g.elements().unwrap() {
                let v = chi.value(&x);
                assert!(
                    v == CyclotomicValue::one() || v == CyclotomicValue::from_integer(-1),
                    "Klein character value must be +-1"
                );
            }
        }
    }

    #[test]
    fn homomorphism_property() {
        let g = FgAbelianGroup::new(vec![BigUint::from(2u32), BigUint::from(12u32)], 0);
        let chars = dual_characters(&g).unwrap();
        let elems: Vec<_> = g.elements().unwrap().collect();
        for chi in chars.iter().take(5) {
            for x in elems.iter().take(6) {
                for y in elems.iter().take(6) {
                    assert_eq!(
                        chi.value(&g.add(x, y)),
                        chi.value(x).mul(&chi.value(y)),
                        "character is not multiplicative"
                    );
                }
            }
        }
    }

    #[test]
    fn duality_orthogonality() {
        // sum over the dual of chi(g) = |G| at g = 0, else 0.
        for factors in [vec![6u32], vec![2, 2], vec![2, 4], vec![3, 3]] {
            let g = FgAbelianGroup::new(factors.iter().map(|&n| BigUint::from(n)).collect(), 0);
            let chars = dual_characters(&g).unwrap();
            for x in g.elements().unwrap() {
                let mut s = CyclotomicValue::zero();
                for chi in &chars {
                    s.add_assign(&chi.value(&x));
                }
                if g.is_zero_elem(&x) {
                    assert_eq!(s.to_integer(), g.order().to_u64().map(BigInt::from));
                } else {
                    assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn fixed_by_swap_on_klein() {
        let g = FgAbelianGroup::new(vec![BigUint::from(2u32); 2], 0);
        let swap =
            GroupHom::new(g.clone(), g.clone(), IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]))
                .unwrap();
        let fixed = characters_fixed_by(&g, &swap).unwrap();
        assert_eq!(fixed.len(), 2);
        // Enumeration oracle: filter all four characters by hand.
        let by_filter: Vec<_> = dual_characters(&g)
            .unwrap()
            .into_iter()
            .filter(|chi| {
                g.elements().unwrap().all(|x| chi.value(&swap.apply(&x)) == chi.value(&x))
            })
            .collect();
        assert_eq!(fixed.len(), by_filter.len());
    }

    #[test]
    fn trivial_on_subgroups() {
        let g = FgAbelianGroup::new(vec![BigUint::from(2u32), BigUint::from(4u32)], 0);
        // H = 0: all |G| characters.
        let zero_sub = subgroup_from_elements(&g, &[]);
        assert_eq!(characters_trivial_on(&g, &zero_sub).unwrap().len(), 8);
        // H = G: only the trivial character.
        let full =
            subgroup_from_elements(&g, &[g.element_i64(&[1, 0]), g.element_i64(&[0, 1])]);
        let only = characters_trivial_on(&g, &full).unwrap();
        assert_eq!(only.len(), 1);
        assert!(only[0].is_trivial());
        // Count is always [G:H].
        let sub = subgroup_from_elements(&g, &[g.element_i64(&[0, 2])]);
        let chars = characters_trivial_on(&g, &sub).unwrap();
        assert_eq!(chars.len(), 4);
        for chi in &chars {
            assert_eq!(chi.value(&g.element_i64(&[0, 2])), CyclotomicValue::one());
        }
    }
}
