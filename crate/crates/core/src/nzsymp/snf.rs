//! Smith normal form over ℤ with unimodular transforms, and the exact
//! linear algebra built on it.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NzError;

type Mat = Vec<Vec<BigInt>>;

fn identity(n: usize) -> Mat {
    (0..n).map(|r| (0..n).map(|c| if r == c { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// U A V = D with U, V unimodular and D diagonal, d₀ | d₁ | … .
#[derive(Clone, Debug)]
pub struct Smith {
    /// The nonzero invariant factors, all positive.
    pub factors: Vec<BigInt>,
    pub u: Mat,
    pub v: Mat,
    pub rows: usize,
    pub cols: usize,
}

fn row_axpy(m: &mut Mat, dst: usize, src: usize, q: &BigInt) {
    let src_row = m[src].clone();
    for (d, s) in m[dst].iter_mut().zip(src_row) {
        *d -= q * s;
    }
}

fn col_axpy(m: &mut Mat, dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] -= q * s;
    }
}

fn swap_cols(m: &mut Mat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

pub fn smith(a: &DMatrix<i64>) -> Smith {
    let (m, n) = a.shape();
    let mut d: Mat = (0..m).map(|r| (0..n).map(|c| BigInt::from(a[(r, c)])).collect()).collect();
    let mut u = identity(m);
    let mut v = identity(n);
    let mut t = 0;
    while t < m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for r in t..m {
            for c in t..n {
                if !d[r][c].is_zero() && best.is_none_or(|(br, bc)| d[r][c].abs() < d[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        d.swap(t, pr);
        u.swap(t, pr);
        swap_cols(&mut d, t, pc);
        swap_cols(&mut v, t, pc);
        loop {
            for r in t + 1..m {
                if !d[r][t].is_zero() {
                    let q = d[r][t].div_floor(&d[t][t]);
                    row_axpy(&mut d, r, t, &q);
                    row_axpy(&mut u, r, t, &q);
                }
            }
            for c in t + 1..n {
                if !d[t][c].is_zero() {
                    let q = d[t][c].div_floor(&d[t][t]);
                    col_axpy(&mut d, c, t, &q);
                    col_axpy(&mut v, c, t, &q);
                }
            }
            // a nonzero remainder is smaller than the pivot: make it the pivot
            if let Some(r) = (t + 1..m).find(|&r| !d[r][t].is_zero()) {
                d.swap(t, r);
                u.swap(t, r);
                continue;
            }
            if let Some(c) = (t + 1..n).find(|&c| !d[t][c].is_zero()) {
                swap_cols(&mut d, t, c);
                swap_cols(&mut v, t, c);
                continue;
            }
            let bad = (t + 1..m).find(|&r| (t + 1..n).any(|c| !d[r][c].is_multiple_of(&d[t][t])));
            match bad {
                Some(r) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut d, t, r, &minus_one);
                    row_axpy(&mut u, t, r, &minus_one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut().chain(u[t].iter_mut()) {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    Smith { factors: (0..t).map(|i| d[i][i].clone()).collect(), u, v, rows: m, cols: n }
}

fn to_i64(x: &BigInt) -> Result<i64, NzError> {
    x.to_i64().ok_or(NzError::Overflow)
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Invariant factors other than 1.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// A basis of the integer kernel, as columns; it spans a saturated lattice.
    pub fn kernel(&self) -> Result<DMatrix<i64>, NzError> {
        let r = self.rank();
        let mut out = DMatrix::zeros(self.cols, self.cols - r);
        for c in r..self.cols {
            for row in 0..self.cols {
                out[(row, c - r)] = to_i64(&self.v[row][c])?;
            }
        }
        Ok(out)
    }

    /// An integer solution of A x = b, if one exists.
    pub fn solve(&self, b: &[i64]) -> Result<Option<Vec<i64>>, NzError> {
        assert_eq!(b.len(), self.rows, "right-hand side does not match");
        let c: Vec<BigInt> =
            self.u.iter().map(|row| row.iter().zip(b).map(|(x, y)| x * BigInt::from(*y)).sum()).collect();
        let mut y = vec![BigInt::zero(); self.cols];
        for (i, ci) in c.iter().enumerate() {
            if i < self.rank() {
                let (q, rem) = ci.div_rem(&self.factors[i]);
                if !rem.is_zero() {
                    return Ok(None);
                }
                y[i] = q;
            } else if !ci.is_zero() {
                return Ok(None);
            }
        }
        let x = self.v.iter().map(|row| to_i64(&row.iter().zip(&y).map(|(a, b)| a * b).sum::<BigInt>())).collect::<Result<_, _>>()?;
        Ok(Some(x))
    }
}

pub fn rank(a: &DMatrix<i64>) -> usize {
    smith(a).rank()
}

/// Saturated integer kernel basis of A.
pub fn integer_kernel(a: &DMatrix<i64>) -> Result<DMatrix<i64>, NzError> {
    smith(a).kernel()
}

/// [A | B] side by side.
pub fn hstack(a: &DMatrix<i64>, b: &DMatrix<i64>) -> DMatrix<i64> {
    assert_eq!(a.nrows(), b.nrows());
    DMatrix::from_fn(a.nrows(), a.ncols() + b.ncols(), |r, c| if c < a.ncols() { a[(r, c)] } else { b[(r, c - a.ncols())] })
}

/// Rows of space-separated integers, one line per row.
pub fn to_text(m: &DMatrix<i64>) -> String {
    let mut s = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| m[(r, c)].to_string()).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn from_text(s: &str) -> Result<DMatrix<i64>, NzError> {
    let rows: Vec<Vec<i64>> = s
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|w| w.parse::<i64>().map_err(|_| NzError::MatrixText(w.to_string()))).collect())
        .collect::<Result<_, _>>()?;
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(NzError::MatrixText("ragged rows".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}
