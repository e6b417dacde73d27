//! Structure discovery for a concrete finite abelian group given by
//! generators and a multiplication rule.
//!
//! A breadth-first closure over the Cayley graph collects one exponent vector
//! per element plus every non-tree relation; the relation lattice of the
//! generator presentation is generated by exactly those relations, so a Smith
//! reduction yields the invariant factors and a full discrete-log table.

use super::{canonicalize_presentation, FgAbelianGroup, GroupElement};
use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

/// A finite abelian group of concrete elements `T` with its abstract
/// structure and a two-way dictionary between elements and coordinates.
#[derive(Debug, Clone)]
pub struct EnumeratedAbelianGroup<T: Clone + Eq + Hash> {
    pub group: FgAbelianGroup,
    pub generators: Vec<T>,
    coords: HashMap<T, GroupElement>,
    elements: HashMap<Vec<BigInt>, T>,
}

impl<T: Clone + Eq + Hash> EnumeratedAbelianGroup<T> {
    pub fn order(&self) -> usize {
        self.coords.len()
    }

    pub fn contains(&self, t: &T) -> bool {
        self.coords.contains_key(t)
    }

    /// Discrete log: canonical coordinates of a concrete element.
    pub fn coords_of(&self, t: &T) -> Option<&GroupElement> {
        self.coords.get(t)
    }

    pub fn element_of(&self, coords: &GroupElement) -> Option<&T> {
        self.elements.get(&coords.coords)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &GroupElement)> {
        self.coords.iter()
    }
}

/// Picks a small generating set out of a pool of elements (greedy closure
/// growth) and enumerates the group it generates. Keeping the generator
/// count low keeps the exponent vectors and the relation matrix small.
pub fn enumerate_abelian_from_pool<T, F>(
    identity: T,
    pool: impl IntoIterator<Item = T>,
    op: F,
) -> EnumeratedAbelianGroup<T>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut gens: Vec<T> = Vec::new();
    let mut closure: std::collections::HashSet<T> = std::collections::HashSet::new();
    closure.insert(identity.clone());
    for candidate in pool {
        if closure.contains(&candidate) {
            continue;
        }
        gens.push(candidate);
        // Re-close under the enlarged generator set.
        let mut frontier: Vec<T> = closure.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = op(&x, g);
                if closure.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    enumerate_abelian(identity, gens, op)
}

/// Closes `gens` under `op` starting from `identity` and returns the group
/// structure. The closure must be finite.
pub fn enumerate_abelian<T, F>(
    identity: T,
    gens: Vec<T>,
    op: F,
) -> EnumeratedAbelianGroup<T>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let m = gens.len();
    let mut expo: HashMap<T, Vec<BigInt>> = HashMap::new();
    let mut relations: Vec<Vec<BigInt>> = Vec::new();
    expo.insert(identity.clone(), vec![BigInt::zero(); m]);
    let mut queue = VecDeque::new();
    queue.push_back(identity.clone());
    while let Some(x) = queue.pop_front() {
        let vx = expo[&x].clone();
        for (i, g) in gens.iter().enumerate() {
            let y = op(&x, g);
            let mut vy = vx.clone();
            vy[i] += 1;
            match expo.get(&y) {
                None => {
                    expo.insert(y.clone(), vy);
                    queue.push_back(y);
                }
                Some(existing) => {
                    let rel: Vec<BigInt> =
                        vy.iter().zip(existing).map(|(a, b)| a - b).collect();
                    if rel.iter().any(|c| !c.is_zero()) {
                        relations.push(rel);
                    }
                }
            }
        }
    }
    let rel_matrix = IntMatrix::from_columns(&relations, m);
    let pres = canonicalize_presentation(m, &rel_matrix);
    debug_assert_eq!(pres.group.free_rank(), 0, "closure of a finite group");
    let mut coords = HashMap::with_capacity(expo.len());
    let mut elements = HashMap::with_capacity(expo.len());
    for (t, v) in expo {
        let c = pres.group.element(pres.to_canonical.apply(&v));
        elements.insert(c.coords.clone(), t.clone());
        coords.insert(t, c);
    }
    debug_assert_eq!(
        coords.len(),
        elements.len(),
        "distinct elements collapsed to one coordinate vector"
    );
    EnumeratedAbelianGroup { group: pres.group, generators: gens, coords, elements }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn units_mod_8() {
        // (Z/8)^* = Z/2 x Z/2
        let e = enumerate_abelian(1u64, vec![3, 5, 7], |a, b| (a * b) % 8);
        assert_eq!(e.order(), 4);
        assert_eq!(
            e.group.invariant_factors(),
            &[BigUint::from(2u32), BigUint::from(2u32)]
        );
        // Dictionary round-trips.
        for (t, c) in e.iter() {
            assert_eq!(e.element_of(c), Some(t));
        }
    }

    #[test]
    fn units_mod_7_cyclic() {
        let e = enumerate_abelian(1u64, vec![3], |a, b| (a * b) % 7);
        assert_eq!(e.order(), 6);
        assert_eq!(e.group.invariant_factors(), &[BigUint::from(6u32)]);
        // coords are consistent with multiplication
        let c3 = e.coords_of(&3).unwrap().clone();
        let c2 = e.coords_of(&2).unwrap().clone(); // 3^2 = 2 mod 7
        assert_eq!(e.group.add(&c3, &c3), c2);
    }

    #[test]
    fn redundant_generators() {
        let e = enumerate_abelian(1u64, vec![2, 4, 8], |a, b| (a * b) % 15);
        assert_eq!(e.order(), 4); // <2> in (Z/15)^* has order 4
        assert_eq!(e.group.invariant_factors(), &[BigUint::from(4u32)]);
    }
}
