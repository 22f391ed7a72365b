//! Exact integer and rational matrices: Smith normal form, Gaussian
//! elimination, kernels, determinants. Dense and unoptimized; fans at desk
//! scale never exceed a few dozen rows.

use num::{Integer, One, Signed, Zero};

use crate::arith::{to_rat, Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rat(&self) -> RatMat {
        RatMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(to_rat).collect(),
        }
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols);
        let d = self.to_rat().det();
        debug_assert!(d.is_integer());
        d.to_integer()
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

    /// row a -= q * row b
    fn sub_row(&mut self, a: usize, b: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let sub = q * self.at(b, j);
            *self.at_mut(a, j) -= sub;
        }
    }

    /// col a -= q * col b
    fn sub_col(&mut self, a: usize, b: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let sub = q * self.at(i, b);
            *self.at_mut(i, a) -= sub;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.at(a, j).clone();
            *self.at_mut(a, j) = v;
        }
    }

    fn add_row(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            let add = self.at(b, j).clone();
            *self.at_mut(a, j) += add;
        }
    }

    /// Smith normal form: unimodular `u`, `v` with `u * self * v = s`,
    /// `s` diagonal with d_1 | d_2 | ... and nonnegative entries.
    pub fn smith_normal_form(&self) -> SmithForm {
        let mut s = self.clone();
        let mut u = IntMat::identity(self.rows);
        let mut v = IntMat::identity(self.cols);
        let n = self.rows.min(self.cols);

        for t in 0..n {
            'pivot: loop {
                // smallest nonzero entry of the trailing block -> (t, t)
                let mut best: Option<(usize, usize)> = None;
                for i in t..s.rows {
                    for j in t..s.cols {
                        if s.at(i, j).is_zero() {
                            continue;
                        }
                        let better = match &best {
                            None => true,
                            Some((bi, bj)) => s.at(i, j).abs() < s.at(*bi, *bj).abs(),
                        };
                        if better {
                            best = Some((i, j));
                        }
                    }
                }
                let (pi, pj) = match best {
                    Some(p) => p,
                    None => break 'pivot, // trailing block is zero
                };
                s.swap_rows(t, pi);
                u.swap_rows(t, pi);
                s.swap_cols(t, pj);
                v.swap_cols(t, pj);

                let mut dirty = false;
                for i in t + 1..s.rows {
                    if !s.at(i, t).is_zero() {
                        let q = s.at(i, t).div_floor(s.at(t, t));
                        s.sub_row(i, t, &q);
                        u.sub_row(i, t, &q);
                        if !s.at(i, t).is_zero() {
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..s.cols {
                    if !s.at(t, j).is_zero() {
                        let q = s.at(t, j).div_floor(s.at(t, t));
                        s.sub_col(j, t, &q);
                        v.sub_col(j, t, &q);
                        if !s.at(t, j).is_zero() {
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    continue 'pivot;
                }
                // pivot divides the rest of the block, else pull the offending
                // row up and keep reducing
                for i in t + 1..s.rows {
                    for j in t + 1..s.cols {
                        if !s.at(i, j).mod_floor(s.at(t, t)).is_zero() {
                            s.add_row(t, i);
                            u.add_row(t, i);
                            continue 'pivot;
                        }
                    }
                }
                if s.at(t, t).is_negative() {
                    s.negate_row(t);
                    u.negate_row(t);
                }
                break 'pivot;
            }
        }
        SmithForm { s, u, v }
    }

    /// Product of the nonzero diagonal entries of the Smith form: the index of
    /// the row span inside its saturation. 1 for the 0x? matrix.
    pub fn elementary_divisor_product(&self) -> Int {
        let snf = self.smith_normal_form();
        let mut p = Int::one();
        for t in 0..self.rows.min(self.cols) {
            let d = snf.s.at(t, t);
            if !d.is_zero() {
                p *= d;
            }
        }
        p
    }
}

pub struct SmithForm {
    pub s: IntMat,
    pub u: IntMat,
    pub v: IntMat,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.s.rows.min(self.s.cols)).map(|t| self.s.at(t, t).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        RatMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Like `from_rows` but keeps the column count meaningful when there are
    /// no rows.
    pub fn from_rows_or_empty(rows: Vec<Vec<Rat>>, cols: usize) -> Self {
        if rows.is_empty() {
            RatMat::zero(0, cols)
        } else {
            RatMat::from_rows(rows)
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMat {
        let mut out = RatMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            for j in 0..self.cols {
                self.data.swap(r * self.cols + j, p * self.cols + j);
            }
            let inv = self.at(r, c).recip();
            for j in 0..self.cols {
                let v = self.at(r, j) * &inv;
                *self.at_mut(r, j) = v;
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in 0..self.cols {
                        let sub = &f * self.at(r, j);
                        *self.at_mut(i, j) -= sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.at(i, c).is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            det *= m.at(c, c);
            let inv = m.at(c, c).recip();
            for i in c + 1..n {
                if m.at(i, c).is_zero() {
                    continue;
                }
                let f = m.at(i, c) * &inv;
                for j in c..n {
                    let sub = &f * m.at(c, j);
                    *m.at_mut(i, j) -= sub;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = RatMat::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, n + i) = Rat::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut out = RatMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                *out.at_mut(i, j) = aug.at(i, n + j).clone();
            }
        }
        Some(out)
    }

    /// One exact solution of `self * x = rhs` (free variables set to 0),
    /// together with whether the solution is unique. `None` if inconsistent.
    pub fn solve(&self, rhs: &[Rat]) -> Option<(Vec<Rat>, bool)> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = RatMat::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = rhs[i].clone();
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None; // row (0 ... 0 | 1)
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.at(r, self.cols).clone();
        }
        Some((x, pivots.len() == self.cols))
    }

    /// Basis of the right kernel {x : self * x = 0}.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for &f in &free {
            let mut x = vec![Rat::zero(); self.cols];
            x[f] = Rat::one();
            for (r, &c) in pivots.iter().enumerate() {
                x[c] = -m.at(r, f).clone();
            }
            basis.push(x);
        }
        basis
    }
}
