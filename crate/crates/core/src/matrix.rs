//! Dense integer matrices with exact (unbounded) entries and Smith normal form.
//!
//! Every kernel, image, quotient and index computation in this crate reduces to
//! the Smith normal form computed here. Entries are `BigInt`; there is no
//! floating point anywhere in this module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A `rows x cols` integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, e) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(*e));
            }
        }
        m
    }

    pub fn from_bigint_rows(rows: &[Vec<BigInt>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, e) in row.iter().enumerate() {
                m.set(i, j, e.clone());
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigInt>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, e) in col.iter().enumerate() {
                m.set(i, j, e.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        let cur = out.at(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.at(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.at(i, j).clone());
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_a += c * row_b
    fn row_add(&mut self, a: usize, b: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = c * self.at(b, j);
            let val = self.at(a, j) + delta;
            self.set(a, j, val);
        }
    }

    /// col_a += c * col_b
    fn col_add(&mut self, a: usize, b: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = c * self.at(i, b);
            let val = self.at(i, a) + delta;
            self.set(i, a, val);
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.at(a, j).clone();
            self.set(a, j, v);
        }
    }

    fn negate_col(&mut self, a: usize) {
        for i in 0..self.rows {
            let v = -self.at(i, a).clone();
            self.set(i, a, v);
        }
    }
}

/// Result of the Smith decomposition: `u * m * v = s` with `u`, `v` unimodular.
///
/// The inverses are tracked alongside so callers can change basis in both
/// directions without re-solving.
#[derive(Clone, Debug)]
pub struct Snf {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Snf {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        let n = self.s.rows().min(self.s.cols());
        (0..n).filter(|&i| !self.s.at(i, i).is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.at(i, i).clone()).collect()
    }
}

/// Smith normal form by elementary row/column reduction, pivoting on the
/// minimal nonzero |entry|. Unbounded integers keep every step exact; the
/// divisibility chain s_1 | s_2 | ... is enforced before each pivot is final.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let rows = m.rows();
    let cols = m.cols();
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    // Elementary operations, mirrored into the transforms and their inverses.
    macro_rules! rswap {
        ($a:expr, $b:expr) => {{
            s.swap_rows($a, $b);
            u.swap_rows($a, $b);
            u_inv.swap_cols($a, $b);
        }};
    }
    macro_rules! cswap {
        ($a:expr, $b:expr) => {{
            s.swap_cols($a, $b);
            v.swap_cols($a, $b);
            v_inv.swap_rows($a, $b);
        }};
    }
    macro_rules! radd {
        ($a:expr, $b:expr, $c:expr) => {{
            let c: BigInt = $c;
            s.row_add($a, $b, &c);
            u.row_add($a, $b, &c);
            u_inv.col_add($b, $a, &(-c));
        }};
    }
    macro_rules! cadd {
        ($a:expr, $b:expr, $c:expr) => {{
            let c: BigInt = $c;
            s.col_add($a, $b, &c);
            v.col_add($a, $b, &c);
            v_inv.row_add($b, $a, &(-c));
        }};
    }

    let n = rows.min(cols);
    for k in 0..n {
        loop {
            // Pivot: minimal nonzero absolute value in the trailing block.
            let mut pivot: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if !s.at(i, j).is_zero() {
                        let better = match pivot {
                            None => true,
                            Some((pi, pj)) => s.at(i, j).abs() < s.at(pi, pj).abs(),
                        };
                        if better {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                // Trailing block is zero; done.
                return finish(s, u, v, u_inv, v_inv);
            };
            rswap!(k, pi);
            cswap!(k, pj);

            // Clear the pivot column and row by euclidean steps.
            let mut dirty = false;
            for i in k + 1..rows {
                if !s.at(i, k).is_zero() {
                    let q = s.at(i, k).div_floor(s.at(k, k));
                    radd!(i, k, -q);
                    if !s.at(i, k).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue; // a smaller remainder appeared; re-pivot
            }
            for j in k + 1..cols {
                if !s.at(k, j).is_zero() {
                    let q = s.at(k, j).div_floor(s.at(k, k));
                    cadd!(j, k, -q);
                    if !s.at(k, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }

            // Divisibility: the pivot must divide every remaining entry.
            let mut fixed = true;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(s.at(i, j) % s.at(k, k)).is_zero() {
                        // Fold the offending row into row k and restart the pivot.
                        radd!(k, i, BigInt::one());
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
    }
    finish(s, u, v, u_inv, v_inv)
}

fn finish(
    mut s: IntMatrix,
    mut u: IntMatrix,
    v: IntMatrix,
    mut u_inv: IntMatrix,
    v_inv: IntMatrix,
) -> Snf {
    // Normalize diagonal signs.
    let n = s.rows().min(s.cols());
    for k in 0..n {
        if s.at(k, k).is_negative() {
            s.negate_row(k);
            u.negate_row(k);
            u_inv.negate_col(k);
        }
    }
    Snf { s, u, v, u_inv, v_inv }
}

/// Solves `m * x = b` over the integers. Returns one solution (free
/// coordinates set to zero) or `None` when no integral solution exists.
pub fn solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows());
    let snf = smith_normal_form(m);
    let ub = snf.u.apply(b);
    let n = m.rows().min(m.cols());
    let mut y = vec![BigInt::zero(); m.cols()];
    for i in 0..m.rows() {
        if i < n && !snf.s.at(i, i).is_zero() {
            let (q, r) = ub[i].div_rem(snf.s.at(i, i));
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    Some(snf.v.apply(&y))
}

/// Basis of the integer kernel of `m`, returned as matrix columns.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let n = m.rows().min(m.cols());
    let mut kernel_cols: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..m.cols() {
        let in_diag = j < n && !snf.s.at(j, j).is_zero();
        if !in_diag {
            kernel_cols.push(snf.v.column(j));
        }
    }
    IntMatrix::from_columns(&kernel_cols, m.cols())
}

/// Determinant by fraction-free elimination; used in tests to certify that
/// transforms are unimodular and by the quadratic-ring norm maps.
pub fn determinant(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows(), m.cols(), "determinant needs a square matrix");
    let n = m.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a.at(k, k).is_zero() {
            let swap = (k + 1..n).find(|&i| !a.at(i, k).is_zero());
            match swap {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let val = (a.at(k, k) * a.at(i, j) - a.at(i, k) * a.at(k, j)) / &prev;
                a.set(i, j, val);
            }
            a.set(i, k, BigInt::zero());
        }
        prev = a.at(k, k).clone();
    }
    sign * a.at(n - 1, n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn gcd_of_k_minors(m: &IntMatrix, k: usize) -> BigInt {
        // Independent oracle: gcd over all k x k minors, by enumeration.
        fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for mut rest in combos(n - first - 1, k - 1) {
                    for r in rest.iter_mut() {
                        *r += first + 1;
                    }
                    rest.insert(0, first);
                    out.push(rest);
                }
            }
            out
        }
        let mut g = BigInt::zero();
        for rsel in combos(m.rows(), k) {
            for csel in combos(m.cols(), k) {
                let mut sub = IntMatrix::zeros(k, k);
                for (a, &i) in rsel.iter().enumerate() {
                    for (b, &j) in csel.iter().enumerate() {
                        sub.set(a, b, m.at(i, j).clone());
                    }
                }
                g = g.gcd(&determinant(&sub));
            }
        }
        g
    }

    fn assert_snf_contract(m: &IntMatrix) {
        let snf = smith_normal_form(m);
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.s, "U*M*V != S");
        assert_eq!(snf.u.mul(&snf.u_inv), IntMatrix::identity(m.rows()));
        assert_eq!(snf.v.mul(&snf.v_inv), IntMatrix::identity(m.cols()));
        assert_eq!(determinant(&snf.u).abs().to_i64(), Some(1));
        assert_eq!(determinant(&snf.v).abs().to_i64(), Some(1));
        // Diagonal, nonnegative, divisibility chain.
        let n = m.rows().min(m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    assert!(snf.s.at(i, j).is_zero(), "off-diagonal nonzero");
                }
            }
        }
        for i in 0..n {
            assert!(!snf.s.at(i, i).is_negative());
            if i + 1 < n && !snf.s.at(i, i).is_zero() && !snf.s.at(i + 1, i + 1).is_zero() {
                assert!((snf.s.at(i + 1, i + 1) % snf.s.at(i, i)).is_zero(), "chain broken");
            }
            if snf.s.at(i, i).is_zero() && i + 1 < n {
                assert!(snf.s.at(i + 1, i + 1).is_zero(), "zero before nonzero");
            }
        }
        // Product of the first k diagonal entries = gcd of k x k minors.
        let mut prod = BigInt::one();
        for k in 1..=n {
            prod *= snf.s.at(k - 1, k - 1);
            assert_eq!(prod, gcd_of_k_minors(m, k), "minor gcd mismatch at k={k}");
            if prod.is_zero() {
                break;
            }
        }
    }

    #[test]
    fn snf_2x2_example() {
        // d1 = gcd(2,4,6,8) = 2, d1*d2 = |det| = |16-24| = 8.
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let snf = smith_normal_form(&m);
        assert_eq!(snf.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        assert_snf_contract(&m);
    }

    #[test]
    fn snf_identity_and_zero() {
        let id = IntMatrix::identity(3);
        let snf = smith_normal_form(&id);
        assert_eq!(snf.s, id);
        let z = IntMatrix::zeros(2, 3);
        let snf = smith_normal_form(&z);
        assert!(snf.s.is_zero());
        assert_snf_contract(&z);
    }

    #[test]
    fn snf_known_4x4() {
        let m = IntMatrix::from_rows(&[
            vec![-6, 111, -36, 6],
            vec![5, -672, 210, 74],
            vec![0, -255, 81, 24],
            vec![-7, 255, -81, -10],
        ]);
        let snf = smith_normal_form(&m);
        assert_eq!(
            snf.diagonal(),
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(21), BigInt::from(0)]
        );
        assert_snf_contract(&m);
    }

    #[test]
    fn snf_random_matrices_match_minor_gcds() {
        // 500 seeded random matrices, dims <= 8 for the contract, minors
        // checked up to 5x5 to keep the oracle enumeration reasonable.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(0x5eed_0001);
        for trial in 0..500 {
            let r = rng.gen_range(1..=5usize);
            let c = rng.gen_range(1..=5usize);
            let mut m = IntMatrix::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, BigInt::from(rng.gen_range(-50i64..=50)));
                }
            }
            assert_snf_contract(&m);
            let _ = trial;
        }
    }

    #[test]
    fn snf_larger_dims_contract() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(0x5eed_0002);
        for _ in 0..30 {
            let r = rng.gen_range(6..=8usize);
            let c = rng.gen_range(6..=8usize);
            let mut m = IntMatrix::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, BigInt::from(rng.gen_range(-50i64..=50)));
                }
            }
            // Full contract minus the minor oracle (too many minors at 8x8).
            let snf = smith_normal_form(&m);
            assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.s);
            assert_eq!(determinant(&snf.u).abs().to_i64(), Some(1));
            assert_eq!(determinant(&snf.v).abs().to_i64(), Some(1));
        }
    }

    #[test]
    fn solve_and_kernel() {
        let m = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        let b = vec![BigInt::from(6), BigInt::from(14)];
        let x = solve(&m, &b).expect("solvable");
        assert_eq!(m.apply(&x), b);
        assert!(solve(&m, &[BigInt::from(1), BigInt::from(0)]).is_none());

        let m = IntMatrix::from_rows(&[vec![2, -4]]);
        let k = kernel_basis(&m);
        assert_eq!(k.cols(), 1);
        let col = k.column(0);
        // Kernel of (2,-4) is generated by (2,1).
        assert_eq!(&col[0] * 2, &col[1] * 4);
        assert_eq!(col[0].abs(), BigInt::from(2));
    }
}
