//! The global norm subgroup inside the ray-class model and its index — the
//! finite-level shadow of the norm index theorem. Unramified primes
//! contribute through their residue degree, ramified primes through the
//! local norm-group data, and the real place through the sign generator when
//! the field's archimedean norms fill all of R*.

use super::rayclass::RayClassModel;
use super::{CyclicCubicField, GlobalError, QuadField};
use crate::local::{
    cubic_splitting, default_precision, local_norm_image, quadratic_splitting, LocalExtension,
    SplittingType,
};
use crate::matrix::{determinant, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone)]
pub enum FieldData {
    Quad(QuadField),
    Cubic(CyclicCubicField),
}

impl FieldData {
    pub fn degree(&self) -> u64 {
        match self {
            FieldData::Quad(_) => 2,
            FieldData::Cubic(_) => 3,
        }
    }

    pub fn modulus(&self) -> u64 {
        match self {
            FieldData::Quad(f) => f.conductor,
            FieldData::Cubic(f) => f.conductor,
        }
    }

    /// Norms at the real place cover all of R* except for imaginary
    /// quadratic fields, whose norms are positive.
    pub fn real_norms_are_surjective(&self) -> bool {
        match self {
            FieldData::Quad(f) => f.real,
            FieldData::Cubic(_) => true,
        }
    }

    pub fn splitting(&self, p: u64) -> Result<SplittingType, GlobalError> {
        Ok(match self {
            FieldData::Quad(f) => quadratic_splitting(f.d, p)?,
            FieldData::Cubic(f) => cubic_splitting(f.conductor, p)?,
        })
    }

    pub fn local_extension(&self, p: u64) -> Result<LocalExtension, GlobalError> {
        Ok(match self {
            FieldData::Quad(f) => LocalExtension::quadratic(f.d, p)?,
            FieldData::Cubic(f) => LocalExtension::cubic(f.conductor, p)?,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            FieldData::Quad(f) => format!("Q(sqrt({}))", f.d),
            FieldData::Cubic(f) => format!("cyclic cubic of conductor {}", f.conductor),
        }
    }

    /// Exact norm of an element given by integral coordinates in the power
    /// basis of the defining polynomial (degree-many coordinates).
    fn exact_norm(&self, coords: &[BigInt]) -> BigInt {
        match self {
            FieldData::Quad(f) => f.norm(&coords[0], &coords[1]),
            FieldData::Cubic(f) => {
                // Norm = det of multiplication by x in Z[t]/(g).
                let g = &f.poly;
                let d = 3usize;
                let mut cols: Vec<Vec<BigInt>> = Vec::new();
                let mut cur = coords.to_vec();
                for _ in 0..d {
                    cols.push(cur.clone());
                    // cur *= t mod g
                    let mut next = vec![BigInt::zero(); d + 1];
                    for i in 0..d {
                        next[i + 1] = cur[i].clone();
                    }
                    let lead = next[d].clone();
                    for i in 0..d {
                        next[i] -= &lead * &g[i];
                    }
                    next.truncate(d);
                    cur = next;
                }
                determinant(&IntMatrix::from_columns(&cols, d))
            }
        }
    }

    /// Searches an integral element whose norm has p-valuation exactly
    /// `valuation_step`, returning (step, unit part of the norm).
    fn ramified_minimal_norm(&self, p: u64, step: u32) -> Result<(u32, BigInt), GlobalError> {
        let deg = self.degree() as usize;
        let bound: i64 = (p * p).min(400) as i64;
        let mut best: Option<BigInt> = None;
        let mut coords = vec![0i64; deg];
        // Small box search over integral elements.
        fn walk(
            coords: &mut Vec<i64>,
            idx: usize,
            bound: i64,
            f: &mut impl FnMut(&[i64]),
        ) {
            if idx == coords.len() {
                f(coords);
                return;
            }
            for c in -bound..=bound {
                coords[idx] = c;
                walk(coords, idx + 1, bound, f);
            }
        }
        let small_bound = if deg == 2 { bound.min(60) } else { 12 };
        walk(&mut coords, 0, small_bound, &mut |c: &[i64]| {
            if best.is_some() {
                return;
            }
            let coords_big: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            let n = self.exact_norm(&coords_big);
            if n.is_zero() {
                return;
            }
            let mut v = 0u32;
            let mut rest = n.abs();
            let pb = BigInt::from(p);
            while (&rest % &pb).is_zero() {
                rest /= &pb;
                v += 1;
            }
            if v == step {
                // signed unit part (the sign matters at the real place but
                // not in the residue class computation)
                best = Some(if n.is_negative() { -rest } else { rest });
            }
        });
        match best {
            Some(u) => Ok((step, u)),
            None => Err(GlobalError::GeneratorSearchFailed { prime: p, bound: small_bound as u64 }),
        }
    }
}

/// Primes up to the bound, by sieve.
fn primes_up_to(bound: u64) -> Vec<u64> {
    let mut sieve = vec![true; (bound + 1) as usize];
    let mut out = Vec::new();
    for p in 2..=bound as usize {
        if sieve[p] {
            out.push(p as u64);
            let mut q = p * p;
            while q <= bound as usize {
                sieve[q] = false;
                q += p;
            }
        }
    }
    out
}

/// Generators of the norm subgroup K* N(I_L) inside the ray-class model,
/// together with a log of which source contributed which class.
pub fn norm_subgroup(
    field: &FieldData,
    model: &RayClassModel,
    bound: u64,
    precision: u32,
) -> Result<(Vec<u64>, Vec<(String, u64)>), GlobalError> {
    if bound < 2 * model.modulus {
        return Err(GlobalError::BadInput(format!(
            "prime bound {bound} below twice the modulus {}",
            model.modulus
        )));
    }
    let mut gens: Vec<u64> = Vec::new();
    let mut log: Vec<(String, u64)> = Vec::new();
    let push = |source: String, class: u64, gens: &mut Vec<u64>, log: &mut Vec<(String, u64)>| {
        if class != 1 && !gens.contains(&class) {
            gens.push(class);
        }
        log.push((source, class));
    };

    for p in primes_up_to(bound) {
        if model.modulus % p == 0 {
            continue; // ramified primes handled below
        }
        match field.splitting(p)? {
            SplittingType::Split => {
                let class = model.idele_class(p, 1, 1, 1)?;
                push(format!("split {p}"), class, &mut gens, &mut log);
            }
            SplittingType::Inert => {
                let f = field.degree() as i64;
                let class = model.idele_class(p, f, 1, 1)?;
                push(format!("inert {p}^{f}"), class, &mut gens, &mut log);
            }
            SplittingType::Ramified => unreachable!("ramified primes divide the modulus"),
        }
    }

    // Ramified primes: unit-norm generators plus a minimal-valuation norm.
    for (p_idx, p) in field_ramified_primes(field).into_iter().enumerate() {
        let _ = p_idx;
        let vp = crate::local::factor_u64(model.modulus)
            .into_iter()
            .find(|(q, _)| *q == p)
            .map(|(_, e)| e)
            .unwrap_or(0);
        let k = default_precision(p).max(vp + 1).max(precision.min(6));
        let ext = field.local_extension(p)?;
        let image = local_norm_image(&ext, k)?;
        for &u in &image.unit_image_gens {
            let class = model.idele_class(p, 0, u, k)?;
            push(format!("ramified {p} unit norm {u}"), class, &mut gens, &mut log);
        }
        let (step, unit) = field.ramified_minimal_norm(p, image.valuation_step)?;
        let pk = BigInt::from(p.pow(k));
        let u_res = unit.mod_floor(&pk).to_u64().expect("reduced unit");
        let class = model.idele_class(p, step as i64, u_res, k)?;
        push(
            format!("ramified {p} minimal-valuation norm p^{step}*{unit}"),
            class,
            &mut gens,
            &mut log,
        );
    }

    if field.real_norms_are_surjective() {
        push("real place sign".into(), model.infinity_class(), &mut gens, &mut log);
    }
    Ok((gens, log))
}

fn field_ramified_primes(field: &FieldData) -> Vec<u64> {
    match field {
        FieldData::Quad(f) => f.ramified_primes(),
        FieldData::Cubic(f) => crate::local::factor_u64(f.conductor)
            .into_iter()
            .map(|(p, _)| p)
            .collect(),
    }
}

#[derive(Debug, Clone)]
pub struct NormIndexReport {
    pub field: String,
    pub modulus: u64,
    pub prime_bound: u64,
    pub index: u64,
    pub stabilized: bool,
    pub generator_log: Vec<(String, u64)>,
}

fn subgroup_order(model: &RayClassModel, gens: &[u64]) -> u64 {
    // Multiplicative closure of the generated subgroup.
    let modulus = model.modulus;
    let mut set = std::collections::BTreeSet::new();
    set.insert(1u64);
    let mut frontier = vec![1u64];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = ((x as u128 * g as u128) % modulus as u128) as u64;
            let y = if model.infinity { y } else { y.min(modulus - y) };
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set.len() as u64
}

/// The index of the norm subgroup in the ray-class model, with the
/// stabilization comparison between bounds B/2 and B. The report never
/// asserts the theorem; acceptance compares the index against the degree.
pub fn norm_index(
    field: &FieldData,
    bound: u64,
    precision: u32,
) -> Result<NormIndexReport, GlobalError> {
    let model = RayClassModel::new(field.modulus(), true)?;
    let (gens_full, log) = norm_subgroup(field, &model, bound, precision)?;
    let index = model.order() / subgroup_order(&model, &gens_full);
    let half_bound = (bound / 2).max(2 * model.modulus);
    let (gens_half, _) = norm_subgroup(field, &model, half_bound, precision)?;
    let half_index = model.order() / subgroup_order(&model, &gens_half);
    Ok(NormIndexReport {
        field: field.describe(),
        modulus: model.modulus,
        prime_bound: bound,
        index,
        stabilized: index == half_index,
        generator_log: log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::global::{cubic_data, field_data};

    fn quad(d: i64) -> FieldData {
        FieldData::Quad(field_data(d).unwrap())
    }

    #[test]
    fn gaussian_field_norm_subgroup_is_trivial() {
        // L = Q(i), m = 4: split p = 1 mod 4 give class 1, inert p^2 = 1,
        // ramified-2 contributions land in the identity class.
        let f = quad(-1);
        let model = RayClassModel::new(4, true).unwrap();
        let (gens, _log) = norm_subgroup(&f, &model, 50, 3).unwrap();
        assert!(gens.is_empty(), "nontrivial generator: {gens:?}");
        let report = norm_index(&f, 50, 3).unwrap();
        assert_eq!(report.index, 2);
    }

    #[test]
    fn real_quadratic_five() {
        // L = Q(sqrt 5), m = 5: subgroup {1, 4} in (Z/5)^*.
        let f = quad(5);
        let model = RayClassModel::new(5, true).unwrap();
        let (gens, _) = norm_subgroup(&f, &model, 50, 3).unwrap();
        let mut closure = std::collections::BTreeSet::from([1u64]);
        for g in gens {
            closure.insert(g);
        }
        assert_eq!(closure, std::collections::BTreeSet::from([1u64, 4u64]));
        let report = norm_index(&f, 50, 3).unwrap();
        assert_eq!(report.index, 2);
    }

    #[test]
    fn cubic_conductor_seven() {
        let f = FieldData::Cubic(cubic_data(7).unwrap());
        let report = norm_index(&f, 100, 3).unwrap();
        assert_eq!(report.index, 3);
        assert!(report.stabilized);
    }

    #[test]
    fn norm_index_degree_two_examples() {
        for d in [-1i64, 2, -2, 3, -5] {
            let report = norm_index(&quad(d), 200, 3).unwrap();
            assert_eq!(report.index, 2, "index for d = {d}");
            assert!(report.stabilized, "stabilization for d = {d}");
        }
    }

    #[test]
    fn bound_too_small_rejected() {
        let f = quad(-5);
        assert!(matches!(
            norm_index(&f, 30, 3),
            Err(GlobalError::BadInput(_))
        ));
    }
}
