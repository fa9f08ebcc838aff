//! Dense polynomial matrices.

use std::fmt;

use crate::arith::{Poly, Ring};
use crate::error::{Error, Result};
use crate::groebner::FreeVector;

/// Row-major matrix of polynomials.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `[[a, b], [c, d]]`, one inner list per row.
impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", row.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl Matrix {
    pub fn zero(ring: &Ring, rows: usize, cols: usize) -> Matrix {
        Matrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> Matrix {
        let mut m = Matrix::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: &Ring, rows: usize, cols: usize, data: Vec<Vec<Poly>>) -> Result<Matrix> {
        if data.len() != rows || data.iter().any(|r| r.len() != cols) {
            return Err(Error::Structural(format!("matrix rows do not form a {rows}x{cols} array")));
        }
        let entries: Vec<Poly> = data.into_iter().flatten().collect();
        for e in &entries {
            ring.check_same(e.ring())?;
        }
        Ok(Matrix {
            ring: ring.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn from_columns(ring: &Ring, rows: usize, cols: &[FreeVector]) -> Result<Matrix> {
        let mut m = Matrix::zero(ring, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            ring.check_same(c.ring())?;
            if c.rank() != rows {
                return Err(Error::Structural(format!(
                    "column of length {} in a matrix with {rows} rows",
                    c.rank()
                )));
            }
            for (i, x) in c.comps().iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Poly) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> FreeVector {
        FreeVector::new(&self.ring, (0..self.rows).map(|i| self.get(i, j).clone()).collect())
            .expect("same ring")
    }

    pub fn columns(&self) -> Vec<FreeVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Poly> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        self.ring.check_same(&o.ring)?;
        if self.cols != o.rows {
            return Err(Error::Structural(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Matrix::zero(&self.ring, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &FreeVector) -> Result<FreeVector> {
        if v.rank() != self.cols {
            return Err(Error::Structural(format!(
                "applying a {}x{} matrix to a vector of length {}",
                self.rows,
                self.cols,
                v.rank()
            )));
        }
        let col = Matrix::from_columns(&self.ring, self.cols, std::slice::from_ref(v))?;
        Ok(self.mul(&col)?.column(0))
    }

    fn zip(&self, o: &Matrix, f: impl Fn(&Poly, &Poly) -> Poly) -> Result<Matrix> {
        self.ring.check_same(&o.ring)?;
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::Structural(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, o: &Matrix) -> Result<Matrix> {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Matrix) -> Result<Matrix> {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, f: &Poly) -> Matrix {
        Matrix {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * f).collect(),
        }
    }

    pub fn map_entries(&self, ring: &Ring, f: impl Fn(&Poly) -> Result<Poly>) -> Result<Matrix> {
        Ok(Matrix {
            ring: ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect::<Result<Vec<_>>>()?,
        })
    }

    pub fn hconcat(&self, o: &Matrix) -> Result<Matrix> {
        self.ring.check_same(&o.ring)?;
        if self.rows != o.rows {
            return Err(Error::Structural("hconcat of different heights".into()));
        }
        let mut m = Matrix::zero(&self.ring, self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..o.cols {
                m.set(i, self.cols + j, o.get(i, j).clone());
            }
        }
        Ok(m)
    }

    pub fn vconcat(&self, o: &Matrix) -> Result<Matrix> {
        Ok(self.transpose().hconcat(&o.transpose())?.transpose())
    }

    pub fn block_diag(&self, o: &Matrix) -> Matrix {
        let mut m = Matrix::zero(&self.ring, self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    /// Kronecker product; row index `i * o.rows + k`, column `j * o.cols + l`.
    pub fn kronecker(&self, o: &Matrix) -> Matrix {
        let mut m = Matrix::zero(&self.ring, self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        m.set(i * o.rows + k, j * o.cols + l, a * o.get(k, l));
                    }
                }
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zero(&self.ring, idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(r, j, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        self.transpose().select_rows(idx).transpose()
    }

    fn det_of(&self, rows: &[usize], cols: &[usize]) -> Poly {
        match rows.len() {
            0 => self.ring.one(),
            1 => self.get(rows[0], cols[0]).clone(),
            2 => {
                let a = self.get(rows[0], cols[0]) * self.get(rows[1], cols[1]);
                let b = self.get(rows[0], cols[1]) * self.get(rows[1], cols[0]);
                &a - &b
            }
            _ => {
                let mut acc = self.ring.zero();
                let r0 = rows[0];
                for (k, &c) in cols.iter().enumerate() {
                    let e = self.get(r0, c);
                    if e.is_zero() {
                        continue;
                    }
                    let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = e * &self.det_of(&rows[1..], &rest);
                    acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
                }
                acc
            }
        }
    }

    /// All nonzero `k x k` minors, deduplicated, in a fixed order.
    pub fn minors(&self, k: usize) -> Vec<Poly> {
        if k == 0 {
            return vec![self.ring.one()];
        }
        if k > self.rows || k > self.cols {
            return Vec::new();
        }
        let mut out: Vec<Poly> = Vec::new();
        for rs in subsets(self.rows, k) {
            for cs in subsets(self.cols, k) {
                let d = self.det_of(&rs, &cs);
                if !d.is_zero() && !out.contains(&d) {
                    out.push(d);
                }
            }
        }
        out
    }

    pub fn determinant(&self) -> Result<Poly> {
        if self.rows != self.cols {
            return Err(Error::Structural("determinant of a non-square matrix".into()));
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(self.det_of(&idx, &idx))
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::MonomialOrder;

    #[test]
    fn determinant_and_minors() {
        let r = Ring::new(32003, &["x", "y"], MonomialOrder::GrevLex).unwrap();
        let p = |s: &str| r.parse_poly(s).unwrap();
        let m = Matrix::from_rows(
            &r,
            3,
            3,
            vec![
                vec![p("x"), p("1"), p("0")],
                vec![p("0"), p("y"), p("1")],
                vec![p("1"), p("0"), p("x")],
            ],
        )
        .unwrap();
        assert_eq!(m.determinant().unwrap(), p("x^2*y + 1"));
        assert_eq!(m.minors(3).len(), 1);
        assert_eq!(subsets(4, 2).len(), 6);
        let col = Matrix::from_rows(&r, 2, 1, vec![vec![p("y")], vec![p("-x")]]).unwrap();
        assert_eq!(col.minors(1), vec![p("y"), p("-x")]);
        assert!(col.minors(2).is_empty());
    }

    #[test]
    fn products() {
        let r = Ring::new(32003, &["x"], MonomialOrder::GrevLex).unwrap();
        let x = r.var(0);
        let a = Matrix::from_rows(&r, 1, 2, vec![vec![x.clone(), r.one()]]).unwrap();
        let b = a.transpose();
        assert_eq!(a.mul(&b).unwrap().get(0, 0), &(&x.pow(2) + &r.one()));
        assert_eq!(a.kronecker(&Matrix::identity(&r, 2)).cols(), 4);
        assert!(a.mul(&a).is_err());
    }
}
