//! Exact integer and rational helpers shared by every module.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(int(n), int(d))
}

pub fn rat_int(n: &Int) -> Rat {
    BigRational::from_integer(n.clone())
}

pub fn rat_usize(n: usize) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Renders a rational as `num/den`, or `num` when the denominator is 1.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse number {0:?}")]
pub struct ParseNumError(pub String);

pub fn parse_int(s: &str) -> Result<Int, ParseNumError> {
    s.trim().parse::<BigInt>().map_err(|_| ParseNumError(s.to_string()))
}

/// Accepts `a/b`, integers and finite decimals such as `0.375`.
pub fn parse_rat(s: &str) -> Result<Rat, ParseNumError> {
    let t = s.trim();
    let err = || ParseNumError(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_int(n).map_err(|_| err())?;
        let d = parse_int(d).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let neg = whole.starts_with('-');
        let w = if whole.is_empty() || whole == "-" || whole == "+" {
            Int::zero()
        } else {
            parse_int(whole).map_err(|_| err())?
        };
        let f = parse_int(frac).map_err(|_| err())?;
        let scale = num_traits::pow(int(10), frac.len());
        let mag = w.abs() * &scale + f;
        let n = if neg { -mag } else { mag };
        return Ok(BigRational::new(n, scale));
    }
    parse_int(t).map(BigRational::from_integer).map_err(|_| err())
}

pub fn ceil_div(a: &Int, b: &Int) -> Int {
    a.div_ceil(b)
}

pub fn floor_div(a: &Int, b: &Int) -> Int {
    a.div_floor(b)
}

/// Nonnegative gcd of all entries; zero for the zero vector.
pub fn gcd_all(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

/// Returns `(g, c)` with `g = gcd(v) >= 0` and `c·v = g`.
pub fn bezout(v: &[Int]) -> (Int, Vec<Int>) {
    let mut g = Int::zero();
    let mut coeffs = vec![Int::zero(); v.len()];
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let e = g.extended_gcd(x);
        for c in coeffs.iter_mut().take(i) {
            *c = &*c * &e.x;
        }
        coeffs[i] = e.y.clone();
        g = e.gcd;
        if g.is_negative() {
            g = -g;
            for c in coeffs.iter_mut().take(i + 1) {
                *c = -&*c;
            }
        }
    }
    (g, coeffs)
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn vsub(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vadd(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vscale(c: &Int, a: &[Int]) -> Vec<Int> {
    a.iter().map(|x| c * x).collect()
}

pub fn is_nonneg(v: &[Int]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

pub fn is_zero_vec(v: &[Int]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn fmt_vec(v: &[Int]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed when there are no rows.
    pub fn from_rows(rows: Vec<Vec<Int>>, cols: usize) -> Option<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(IntMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| ints(r)).collect(), cols).expect("ragged matrix literal")
    }

    /// The `rows × cols` matrix with row `i` equal to `col[i] · row`.
    pub fn outer(col: &[Int], row: &[Int]) -> Self {
        let data = col.iter().flat_map(|c| row.iter().map(move |r| c * r)).collect();
        IntMatrix { rows: col.len(), cols: row.len(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Int] {
        &self.data
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.rows, v.len(), "vector-matrix shape mismatch");
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &v[i] * self.get(i, j)).sum())
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    pub fn is_nonneg(&self) -> bool {
        is_nonneg(&self.data)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows).map(|i| fmt_vec(self.row(i))).collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Hermite normal form of the lattice spanned by `rows`: echelon rows with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`.
/// Zero rows are dropped.
pub fn hermite_rows(rows: Vec<Vec<Int>>, width: usize) -> Vec<Vec<Int>> {
    let mut m: Vec<Vec<Int>> = rows.into_iter().filter(|r| !is_zero_vec(r)).collect();
    let mut out: Vec<Vec<Int>> = Vec::new();
    for col in 0..width {
        loop {
            let nz: Vec<usize> = (0..m.len()).filter(|&i| !m[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| m[i][col].abs()).unwrap();
            for &i in &nz {
                if i == piv {
                    continue;
                }
                let q = m[i][col].div_floor(&m[piv][col]);
                let prow = m[piv].clone();
                for (x, y) in m[i].iter_mut().zip(&prow) {
                    *x -= &q * y;
                }
            }
        }
        if let Some(i) = (0..m.len()).find(|&i| !m[i][col].is_zero()) {
            let mut r = m.swap_remove(i);
            if r[col].is_negative() {
                r.iter_mut().for_each(|x| *x = -&*x);
            }
            for prev in out.iter_mut() {
                let q = prev[col].div_floor(&r[col]);
                for (x, y) in prev.iter_mut().zip(&r) {
                    *x -= &q * y;
                }
            }
            out.push(r);
        }
        m.retain(|r| !is_zero_vec(r));
    }
    out
}

/// Lattice basis of `{v ∈ ℤ^p : row·v = 0}` in Hermite normal form.
pub fn kernel_of_row(row: &[Int]) -> Vec<Vec<Int>> {
    let p = row.len();
    // Column operations on [row; I] until row = (g, 0, ..., 0).
    let mut top = row.to_vec();
    let mut basis: Vec<Vec<Int>> = (0..p)
        .map(|j| (0..p).map(|i| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    loop {
        let nz: Vec<usize> = (0..p).filter(|&j| !top[j].is_zero()).collect();
        if nz.len() <= 1 {
            break;
        }
        let piv = *nz.iter().min_by_key(|&&j| top[j].abs()).unwrap();
        for &j in &nz {
            if j == piv {
                continue;
            }
            let q = top[j].div_floor(&top[piv]);
            let t = &q * &top[piv];
            top[j] -= t;
            let pcol = basis[piv].clone();
            for (x, y) in basis[j].iter_mut().zip(&pcol) {
                *x -= &q * y;
            }
        }
    }
    let kernel: Vec<Vec<Int>> = (0..p).filter(|&j| top[j].is_zero()).map(|j| basis[j].clone()).collect();
    hermite_rows(kernel, p)
}

/// Lattice basis of `{v ∈ ℤ^width : r·v = 0 for every row r}`.
pub fn integer_kernel(rows: &[Vec<Int>], width: usize) -> Vec<Vec<Int>> {
    let mut basis: Vec<Vec<Int>> = (0..width)
        .map(|j| (0..width).map(|i| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect();
    for row in rows {
        if basis.is_empty() {
            break;
        }
        let restricted: Vec<Int> = basis.iter().map(|b| dot(row, b)).collect();
        basis = kernel_of_row(&restricted)
            .into_iter()
            .map(|c| {
                let mut v = vec![Int::zero(); width];
                for (ci, b) in c.iter().zip(&basis) {
                    v = vadd(&v, &vscale(ci, b));
                }
                v
            })
            .collect();
    }
    hermite_rows(basis, width)
}

/// Solves `x · basis = v` for a Hermite basis; `None` if `v` is outside the lattice.
pub fn lattice_coords(basis: &[Vec<Int>], v: &[Int]) -> Option<Vec<Int>> {
    let mut rest = v.to_vec();
    let mut coords = Vec::with_capacity(basis.len());
    for b in basis {
        let col = b.iter().position(|x| !x.is_zero())?;
        let (q, r) = rest[col].div_rem(&b[col]);
        if !r.is_zero() {
            return None;
        }
        for (x, y) in rest.iter_mut().zip(b) {
            *x -= &q * y;
        }
        coords.push(q);
    }
    if is_zero_vec(&rest) {
        Some(coords)
    } else {
        None
    }
}
