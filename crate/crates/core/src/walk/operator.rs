use faer::{c64, Mat, MatRef};

use super::Registers;

/// Drop accumulated entries below this magnitude when composing.
const PRUNE: f64 = 1e-15;

/// Linear map stored column by column as `(row, value)` lists. Every operator in the walk
/// construction has a handful of entries per column, so composition stays cheap even when the
/// dense matrix would not fit in memory.
#[derive(Clone, Debug)]
pub struct Operator {
    rows: usize,
    cols: Vec<Vec<(usize, c64)>>,
}

fn re(v: f64) -> c64 {
    c64::new(v, 0.0)
}

impl Operator {
    pub fn from_columns(rows: usize, ncols: usize, f: impl FnMut(usize) -> Vec<(usize, c64)>) -> Self {
        Self { rows, cols: (0..ncols).map(f).collect() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_columns(dim, dim, |j| vec![(j, re(1.0))])
    }

    pub fn permutation(dim: usize, mut f: impl FnMut(usize) -> usize) -> Self {
        Self::from_columns(dim, dim, |j| vec![(f(j), re(1.0))])
    }

    /// Permutation of basis states given as an in-place map on register digits.
    pub fn basis_map(space: &Registers, f: impl Fn(&mut [usize])) -> Self {
        let mut d = vec![0; space.dims().len()];
        Self::permutation(space.size(), |j| {
            space.decode_into(j, &mut d);
            f(&mut d);
            space.encode(&d)
        })
    }

    pub fn from_dense(m: MatRef<'_, c64>) -> Self {
        Self::from_columns(m.nrows(), m.ncols(), |j| {
            (0..m.nrows()).filter(|&i| m[(i, j)] != re(0.0)).map(|i| (i, m[(i, j)])).collect()
        })
    }

    pub fn from_real(m: MatRef<'_, f64>) -> Self {
        Self::from_columns(m.nrows(), m.ncols(), |j| {
            (0..m.nrows()).filter(|&i| m[(i, j)] != 0.0).map(|i| (i, re(m[(i, j)]))).collect()
        })
    }

    /// `local` acting on the registers `which` of `space` (in `local_space` order), identity
    /// elsewhere, applied only on basis states where `control` holds. `control` must not depend
    /// on the registers in `which`.
    pub fn embed_controlled(
        space: &Registers,
        local: &Operator,
        local_space: &Registers,
        which: &[usize],
        control: impl Fn(&[usize]) -> bool,
    ) -> Self {
        assert_eq!(local.rows, local_space.size());
        assert_eq!(local.ncols(), local_space.size());
        let mut d = vec![0; space.dims().len()];
        let mut ld = vec![0; which.len()];
        Self::from_columns(space.size(), space.size(), |j| {
            space.decode_into(j, &mut d);
            if !control(&d) {
                return vec![(j, re(1.0))];
            }
            for (l, &w) in ld.iter_mut().zip(which) {
                *l = d[w];
            }
            local
                .column(local_space.encode(&ld))
                .iter()
                .map(|&(li, a)| {
                    local_space.decode_into(li, &mut ld);
                    for (&l, &w) in ld.iter().zip(which) {
                        d[w] = l;
                    }
                    (space.encode(&d), a)
                })
                .collect()
        })
    }

    pub fn embed(space: &Registers, local: &Operator, local_space: &Registers, which: &[usize]) -> Self {
        Self::embed_controlled(space, local, local_space, which, |_| true)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, c64)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// `next · self`: apply `self` first.
    pub fn then(&self, next: &Operator) -> Operator {
        assert_eq!(next.ncols(), self.rows, "dimension mismatch in composition");
        let mut acc = vec![re(0.0); next.rows];
        let mut touched = Vec::new();
        let cols = self
            .cols
            .iter()
            .map(|col| {
                for &(i, a) in col {
                    for &(k, b) in &next.cols[i] {
                        if acc[k] == re(0.0) {
                            touched.push(k);
                        }
                        acc[k] += a * b;
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                let out = touched
                    .iter()
                    .filter(|&&k| acc[k].norm() > PRUNE)
                    .map(|&k| (k, acc[k]))
                    .collect();
                for &k in &touched {
                    acc[k] = re(0.0);
                }
                touched.clear();
                out
            })
            .collect();
        Operator { rows: next.rows, cols }
    }

    pub fn adjoint(&self) -> Operator {
        let mut cols = vec![Vec::new(); self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, a) in col {
                cols[i].push((j, a.conj()));
            }
        }
        Operator { rows: self.ncols(), cols }
    }

    /// `a·self + b·1` for square operators.
    pub fn affine(&self, a: f64, b: f64) -> Operator {
        assert_eq!(self.rows, self.ncols());
        let cols = self
            .cols
            .iter()
            .enumerate()
            .map(|(j, col)| {
                let mut out: Vec<(usize, c64)> = col.iter().map(|&(i, v)| (i, v * a)).collect();
                match out.iter_mut().find(|(i, _)| *i == j) {
                    Some(entry) => entry.1 += b,
                    None => out.push((j, re(b))),
                }
                out.retain(|(_, v)| v.norm() > PRUNE);
                out
            })
            .collect();
        Operator { rows: self.rows, cols }
    }

    /// `2 V V† - 1` for an isometry `V`.
    pub fn reflection_through(v: &Operator) -> Operator {
        v.adjoint().then(v).affine(2.0, -1.0)
    }

    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        assert_eq!(x.len(), self.ncols());
        let mut out = vec![re(0.0); self.rows];
        for (col, &xj) in self.cols.iter().zip(x) {
            if xj == re(0.0) {
                continue;
            }
            for &(i, a) in col {
                out[i] += a * xj;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut m = Mat::zeros(self.rows, self.ncols());
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, a) in col {
                m[(i, j)] += a;
            }
        }
        m
    }

    pub fn is_real(&self) -> bool {
        self.cols.iter().flatten().all(|(_, a)| a.im == 0.0)
    }

    pub fn to_dense_real(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.rows, self.ncols());
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, a) in col {
                m[(i, j)] += a.re;
            }
        }
        m
    }

    /// `max |(V†V - 1)_{ij}|`.
    pub fn isometry_defect(&self) -> f64 {
        self.then(&self.adjoint()).distance(&Operator::identity(self.ncols()))
    }

    /// `max |(A - B)_{ij}|`.
    pub fn distance(&self, other: &Operator) -> f64 {
        assert_eq!((self.rows, self.ncols()), (other.rows, other.ncols()));
        let mut acc = vec![re(0.0); self.rows];
        let mut worst = 0.0f64;
        for (a, b) in self.cols.iter().zip(&other.cols) {
            for &(i, v) in a {
                acc[i] += v;
            }
            for &(i, v) in b {
                acc[i] -= v;
            }
            for &(i, _) in a.iter().chain(b) {
                worst = worst.max(acc[i].norm());
                acc[i] = re(0.0);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_order() {
        let x = Operator::permutation(2, |j| 1 - j);
        let p = Operator::from_columns(2, 2, |j| vec![(j, c64::new(0.0, j as f64 + 1.0))]);
        let px = x.then(&p);
        // |0> -> |1> -> 2i|1>
        assert_eq!(px.column(0), &[(1, c64::new(0.0, 2.0))]);
        assert!(px.adjoint().then(&px.adjoint().adjoint()).distance(&Operator::identity(2)) > 1.0);
        assert!(px.isometry_defect() > 1.0);
        assert!(x.isometry_defect() == 0.0);
    }

    #[test]
    fn embedding_acts_on_the_named_register() {
        let space = Registers::new(&[2, 3]);
        let shift = Operator::permutation(3, |j| (j + 1) % 3);
        let op = Operator::embed_controlled(&space, &shift, &Registers::new(&[3]), &[1], |d| d[0] == 1);
        assert_eq!(op.column(space.encode(&[0, 2]))[0].0, space.encode(&[0, 2]));
        assert_eq!(op.column(space.encode(&[1, 2]))[0].0, space.encode(&[1, 0]));
    }

    #[test]
    fn reflection_squares_to_identity() {
        let s = 0.5f64.sqrt();
        let v = Operator::from_columns(2, 1, |_| vec![(0, re(s)), (1, re(s))]);
        let r = Operator::reflection_through(&v);
        assert!(r.then(&r).distance(&Operator::identity(2)) < 1e-15);
        assert!((r.column(0).iter().find(|e| e.0 == 1).unwrap().1 - re(1.0)).norm() < 1e-15);
    }
}
