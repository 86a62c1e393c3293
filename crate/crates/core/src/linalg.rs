//! Exact integer matrices: Smith normal form, kernel lattices, minors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols} after dropping a row and a column")]
    NotSquareAfterDrop { rows: usize, cols: usize },
    #[error("drop index out of range")]
    DropOutOfRange,
}

/// Dense row-major matrix over arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, data: rows.iter().flatten().map(|&v| BigInt::from(v)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &x[j]).sum())
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant by fraction-free elimination. Panics on non-square input.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        bareiss(self.rows, self.data.clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let t = q * &self.data[src * self.cols + j];
            self.data[dst * self.cols + j] -= t;
        }
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let t = q * &self.data[i * self.cols + src];
            self.data[i * self.cols + dst] -= t;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self.data[r * self.cols + j]);
            self.data[r * self.cols + j] = -v;
        }
    }
}

fn bareiss(n: usize, mut a: Vec<BigInt>) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                Some(p) => {
                    for j in 0..n {
                        a.swap(k * n + j, p * n + j);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
        }
        prev = a[k * n + k].clone();
    }
    let d = a[n * n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl SnfResult {
    /// Nonzero diagonal entries of `s`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Smith normal form with smallest-magnitude pivoting: `u * m * v == s`.
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut rank = 0;
    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = a.get(i, j);
                    if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                debug_assert!(u.mul(m).mul(&v) == a);
                return SnfResult { s: a, u, v, rank };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t) / &p;
                a.row_axpy(i, t, &q);
                u.row_axpy(i, t, &q);
                clean &= a.get(i, t).is_zero();
            }
            for j in t + 1..c {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j) / &p;
                a.col_axpy(j, t, &q);
                v.col_axpy(j, t, &q);
                clean &= a.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into the pivot row
            let offender = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let one = -BigInt::one();
                    a.row_axpy(t, i, &one);
                    u.row_axpy(t, i, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        rank += 1;
    }
    debug_assert!(u.mul(m).mul(&v) == a);
    SnfResult { s: a, u, v, rank }
}

/// Lattice basis of `{x : m x = 0}`; exactly `cols - rank` vectors.
pub fn integer_kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m);
    (snf.rank..m.cols).map(|j| (0..m.cols).map(|i| snf.v.get(i, j).clone()).collect()).collect()
}

/// `|det|` of `m` with one row and one column removed.
pub fn minor_determinant(m: &IntMatrix, drop_row: usize, drop_col: usize) -> Result<BigInt, LinalgError> {
    if drop_row >= m.rows || drop_col >= m.cols {
        return Err(LinalgError::DropOutOfRange);
    }
    let (r, c) = (m.rows - 1, m.cols - 1);
    if r != c {
        return Err(LinalgError::NotSquareAfterDrop { rows: r, cols: c });
    }
    let rows: Vec<usize> = (0..m.rows).filter(|&i| i != drop_row).collect();
    let cols: Vec<usize> = (0..m.cols).filter(|&j| j != drop_col).collect();
    if r > 24 && m.data.iter().all(|x| x.bits() < 32) {
        let small: Vec<i64> = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| m.get(i, j).to_i64().expect("small entry"))
            .collect();
        return Ok(multimodular_det(r, &small).abs());
    }
    let data = rows.iter().flat_map(|&i| cols.iter().map(move |&j| m.get(i, j).clone())).collect();
    Ok(bareiss(r, data).abs())
}

fn primes() -> &'static [u64] {
    static P: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    P.get_or_init(|| {
        let mut out = Vec::new();
        let mut x = (1u64 << 61) - 1;
        while out.len() < 64 {
            if is_prime(x) {
                out.push(x);
            }
            x -= 2;
        }
        out
    })
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn det_mod(n: usize, a: &[i64], p: u64) -> u64 {
    let mut m: Vec<u64> = a.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
    let mut det = 1u64;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| m[i * n + k] != 0) else {
            return 0;
        };
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            det = (p - det) % p;
        }
        let pv = m[k * n + k];
        det = mulmod(det, pv, p);
        let inv = powmod(pv, p - 2, p);
        for i in k + 1..n {
            let f = mulmod(m[i * n + k], inv, p);
            if f == 0 {
                continue;
            }
            for j in k..n {
                let t = mulmod(f, m[k * n + j], p);
                m[i * n + j] = (m[i * n + j] + p - t) % p;
            }
        }
    }
    det
}

/// Exact determinant via Chinese remaindering over 61-bit primes, with enough
/// primes to exceed twice the Hadamard bound.
fn multimodular_det(n: usize, a: &[i64]) -> BigInt {
    let mut log2_bound = 1.0f64;
    for i in 0..n {
        let s: f64 = a[i * n..(i + 1) * n].iter().map(|&x| (x as f64) * (x as f64)).sum();
        if s == 0.0 {
            return BigInt::zero();
        }
        log2_bound += 0.5 * s.log2();
    }
    let mut value = BigInt::zero();
    let mut modulus = BigInt::one();
    let mut used_bits = 0.0;
    let mut k = 0;
    while used_bits <= log2_bound + 2.0 {
        let p = primes()[k];
        k += 1;
        let r = det_mod(n, a, p);
        // value + modulus * t == r (mod p)
        let pb = BigInt::from(p);
        let cur = (&value % &pb + &pb) % &pb;
        let diff = (BigInt::from(r) - cur + &pb) % &pb;
        let mm = (&modulus % &pb).to_u64().unwrap();
        let t = mulmod(diff.to_u64().unwrap(), powmod(mm, p - 2, p), p);
        value += &modulus * BigInt::from(t);
        modulus *= &pb;
        used_bits += (p as f64).log2();
    }
    let half = &modulus >> 1;
    if value > half {
        value - modulus
    } else {
        value
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &b in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % b == 0 {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &b in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}
