//! Exact vectors and matrices over a runtime finite field.
//!
//! Storage is row-major. Index sets passed to submatrix helpers must be
//! strictly increasing. Reduction is Gaussian elimination with first-nonzero
//! pivoting, which makes every derived object (RREF, solutions with free
//! variables set to zero, nullspace bases) deterministic.

use crate::gf::{Fe, Field};

/// Vector over a field. Coordinates are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VecGF {
    field: Field,
    v: Vec<Fe>,
}

impl VecGF {
    pub fn new(field: Field, v: Vec<Fe>) -> VecGF {
        debug_assert!(v.iter().all(|e| e.val() < field.q()));
        VecGF { field, v }
    }

    pub fn zeros(field: Field, len: usize) -> VecGF {
        VecGF { field, v: vec![Fe::ZERO; len] }
    }

    /// Standard basis vector e_i.
    pub fn unit(field: Field, len: usize, i: usize) -> VecGF {
        assert!(i < len);
        let mut v = vec![Fe::ZERO; len];
        v[i] = Fe::ONE;
        VecGF { field, v }
    }

    pub fn from_vals(field: Field, vals: &[u64]) -> Result<VecGF, crate::gf::FieldError> {
        let v = vals.iter().map(|&x| field.elem(x)).collect::<Result<_, _>>()?;
        Ok(VecGF { field, v })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn get(&self, i: usize) -> Fe {
        self.v[i]
    }

    pub fn set(&mut self, i: usize, e: Fe) {
        debug_assert!(e.val() < self.field.q());
        self.v[i] = e;
    }

    pub fn iter(&self) -> impl Iterator<Item = Fe> + '_ {
        self.v.iter().copied()
    }

    pub fn vals(&self) -> Vec<u32> {
        self.v.iter().map(|e| e.val()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|e| e.is_zero())
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.v.iter().filter(|e| !e.is_zero()).count()
    }

    /// Indices of nonzero coordinates, increasing.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.v[i].is_zero()).collect()
    }

    pub fn add(&self, other: &VecGF) -> VecGF {
        assert_eq!(self.field, other.field, "field mismatch");
        assert_eq!(self.len(), other.len(), "length mismatch");
        let v = self
            .v
            .iter()
            .zip(&other.v)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        VecGF { field: self.field, v }
    }

    pub fn sub(&self, other: &VecGF) -> VecGF {
        assert_eq!(self.field, other.field, "field mismatch");
        self.add(&other.scale(self.field.neg(Fe::ONE)))
    }

    pub fn scale(&self, c: Fe) -> VecGF {
        let v = self.v.iter().map(|&a| self.field.mul(a, c)).collect();
        VecGF { field: self.field, v }
    }

    pub fn dot(&self, other: &VecGF) -> Fe {
        assert_eq!(self.field, other.field, "field mismatch");
        assert_eq!(self.len(), other.len(), "length mismatch");
        let f = self.field;
        self.v
            .iter()
            .zip(&other.v)
            .fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    /// Subvector at the given strictly increasing indices.
    pub fn restrict(&self, idx: &[usize]) -> VecGF {
        check_increasing(idx, self.len());
        VecGF {
            field: self.field,
            v: idx.iter().map(|&i| self.v[i]).collect(),
        }
    }
}

impl std::fmt::Display for VecGF {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.v.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

fn check_increasing(idx: &[usize], bound: usize) {
    for w in idx.windows(2) {
        assert!(w[0] < w[1], "index set must be strictly increasing");
    }
    if let Some(&last) = idx.last() {
        assert!(last < bound, "index {last} out of range (< {bound})");
    }
}

/// Row-major matrix over a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatGF {
    field: Field,
    rows: usize,
    cols: usize,
    a: Vec<Fe>,
}

impl MatGF {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> MatGF {
        MatGF { field, rows, cols, a: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> MatGF {
        let mut m = MatGF::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    pub fn from_entries(field: Field, rows: usize, cols: usize, a: Vec<Fe>) -> MatGF {
        assert_eq!(a.len(), rows * cols, "entry count must be rows*cols");
        debug_assert!(a.iter().all(|e| e.val() < field.q()));
        MatGF { field, rows, cols, a }
    }

    pub fn from_vals(
        field: Field,
        rows: usize,
        cols: usize,
        vals: &[u64],
    ) -> Result<MatGF, crate::gf::FieldError> {
        assert_eq!(vals.len(), rows * cols, "entry count must be rows*cols");
        let a = vals.iter().map(|&x| field.elem(x)).collect::<Result<_, _>>()?;
        Ok(MatGF { field, rows, cols, a })
    }

    /// Stack row vectors. All rows must share field and length.
    pub fn from_rows(field: Field, rows: &[VecGF]) -> MatGF {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut a = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.field(), field, "field mismatch");
            assert_eq!(r.len(), cols, "ragged rows");
            a.extend(r.iter());
        }
        MatGF { field, rows: rows.len(), cols, a }
    }

    pub fn random<R: rand::Rng>(rng: &mut R, field: Field, rows: usize, cols: usize) -> MatGF {
        let a = (0..rows * cols)
            .map(|_| Fe::from_raw(rng.gen_range(0..field.q())))
            .collect();
        MatGF { field, rows, cols, a }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.a[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: Fe) {
        debug_assert!(e.val() < self.field.q());
        self.a[r * self.cols + c] = e;
    }

    pub fn entries(&self) -> &[Fe] {
        &self.a
    }

    pub fn row(&self, r: usize) -> VecGF {
        VecGF {
            field: self.field,
            v: self.a[r * self.cols..(r + 1) * self.cols].to_vec(),
        }
    }

    pub fn col(&self, c: usize) -> VecGF {
        VecGF {
            field: self.field,
            v: (0..self.rows).map(|r| self.get(r, c)).collect(),
        }
    }

    pub fn rows_vec(&self) -> Vec<VecGF> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn transpose(&self) -> MatGF {
        let mut t = MatGF::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Submatrix keeping the given strictly increasing rows.
    pub fn rows_by(&self, idx: &[usize]) -> MatGF {
        check_increasing(idx, self.rows);
        let mut a = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            a.extend_from_slice(&self.a[r * self.cols..(r + 1) * self.cols]);
        }
        MatGF { field: self.field, rows: idx.len(), cols: self.cols, a }
    }

    /// Submatrix keeping the given strictly increasing columns.
    pub fn cols_by(&self, idx: &[usize]) -> MatGF {
        check_increasing(idx, self.cols);
        let mut a = Vec::with_capacity(self.rows * idx.len());
        for r in 0..self.rows {
            for &c in idx {
                a.push(self.get(r, c));
            }
        }
        MatGF { field: self.field, rows: self.rows, cols: idx.len(), a }
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &MatGF) -> MatGF {
        assert_eq!(self.field, other.field, "field mismatch");
        assert_eq!(self.cols, other.cols, "column mismatch");
        let mut a = self.a.clone();
        a.extend_from_slice(&other.a);
        MatGF { field: self.field, rows: self.rows + other.rows, cols: self.cols, a }
    }

    pub fn mul(&self, other: &MatGF) -> MatGF {
        assert_eq!(self.field, other.field, "field mismatch");
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let f = self.field;
        let mut out = MatGF::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let cur = out.get(r, c);
                    out.set(r, c, f.add(cur, f.mul(a, other.get(k, c))));
                }
            }
        }
        out
    }

    /// Row vector times matrix: x (len rows) -> x*M (len cols).
    pub fn vec_mul(&self, x: &VecGF) -> VecGF {
        assert_eq!(self.field, x.field(), "field mismatch");
        assert_eq!(x.len(), self.rows, "dimension mismatch");
        let f = self.field;
        let mut out = vec![Fe::ZERO; self.cols];
        for r in 0..self.rows {
            let xv = x.get(r);
            if xv.is_zero() {
                continue;
            }
            for c in 0..self.cols {
                out[c] = f.add(out[c], f.mul(xv, self.get(r, c)));
            }
        }
        VecGF { field: f, v: out }
    }

    /// Reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut pr = 0usize;
        for c in 0..self.cols {
            if pr == self.rows {
                break;
            }
            // First-nonzero pivoting: take the topmost unused row with a nonzero entry.
            let Some(src) = (pr..self.rows).find(|&r| !self.get(r, c).is_zero()) else {
                continue;
            };
            if src != pr {
                for k in 0..self.cols {
                    let t = self.get(src, k);
                    self.set(src, k, self.get(pr, k));
                    self.set(pr, k, t);
                }
            }
            let inv = f.inv(self.get(pr, c)).expect("pivot is nonzero");
            for k in 0..self.cols {
                self.set(pr, k, f.mul(self.get(pr, k), inv));
            }
            for r in 0..self.rows {
                if r == pr {
                    continue;
                }
                let factor = self.get(r, c);
                if factor.is_zero() {
                    continue;
                }
                for k in 0..self.cols {
                    let v = f.sub(self.get(r, k), f.mul(factor, self.get(pr, k)));
                    self.set(r, k, v);
                }
            }
            pivots.push(c);
            pr += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }
}

impl std::fmt::Display for MatGF {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            if r + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// One solution y of y*A = b with free variables set to zero, or None if the
/// system is infeasible. Infeasibility is a value, not a fault.
pub fn solve_left(a: &MatGF, b: &VecGF) -> Option<VecGF> {
    assert_eq!(a.field(), b.field(), "field mismatch");
    assert_eq!(b.len(), a.cols(), "rhs length must equal column count");
    let f = a.field();
    // y*A = b is A^T y^T = b^T; augment A^T with b and reduce.
    let mut m = MatGF::zeros(f, a.cols(), a.rows() + 1);
    for r in 0..a.cols() {
        for c in 0..a.rows() {
            m.set(r, c, a.get(c, r));
        }
        m.set(r, a.rows(), b.get(r));
    }
    let pivots = m.rref();
    let mut y = VecGF::zeros(f, a.rows());
    for (pr, &pc) in pivots.iter().enumerate() {
        if pc == a.rows() {
            return None; // pivot in the augmented column: inconsistent
        }
        y.set(pc, m.get(pr, a.rows()));
    }
    Some(y)
}

/// Basis of the left nullspace {y : y*A = 0}, deterministic (one basis vector
/// per free column of A^T, in increasing order, free coordinate set to one).
pub fn nullspace_left(a: &MatGF) -> Vec<VecGF> {
    let f = a.field();
    let mut t = a.transpose();
    let pivots = t.rref();
    let piv_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..a.rows() {
        if piv_set.contains(&free) {
            continue;
        }
        let mut v = VecGF::zeros(f, a.rows());
        v.set(free, Fe::ONE);
        for (pr, &pc) in pivots.iter().enumerate() {
            v.set(pc, f.neg(t.get(pr, free)));
        }
        basis.push(v);
    }
    basis
}

/// True iff v lies in the row span of the given vectors.
pub fn span_member(span: &[VecGF], v: &VecGF) -> bool {
    if v.is_zero() {
        return true;
    }
    if span.is_empty() {
        return false;
    }
    let field = v.field();
    let m = MatGF::from_rows(field, span);
    let mut aug = Vec::with_capacity(span.len() + 1);
    aug.extend_from_slice(span);
    aug.push(v.clone());
    let m2 = MatGF::from_rows(field, &aug);
    m.rank() == m2.rank()
}

/// A vector c in the row space of `basis` with c[target] = 1 and c[k] = 0 for
/// every k outside `allowed` and distinct from `target`, or None. `allowed`
/// must be strictly increasing and must not contain `target`. Deterministic:
/// free variables are set to zero.
pub fn rowspace_pattern_solve(basis: &MatGF, target: usize, allowed: &[usize]) -> Option<VecGF> {
    check_increasing(allowed, basis.cols());
    assert!(target < basis.cols());
    debug_assert!(!allowed.contains(&target));
    let f = basis.field();
    let allowed_set: std::collections::BTreeSet<usize> = allowed.iter().copied().collect();
    // Zero-constrained columns in increasing order, then the target column.
    let mut cols: Vec<usize> = (0..basis.cols())
        .filter(|k| *k != target && !allowed_set.contains(k))
        .collect();
    cols.push(target);
    // Solve y * basis[cols] = (0,...,0,1), then expand c = y*basis.
    let mut a = MatGF::zeros(f, basis.rows(), cols.len());
    for (j, &c) in cols.iter().enumerate() {
        for r in 0..basis.rows() {
            a.set(r, j, basis.get(r, c));
        }
    }
    let mut b = VecGF::zeros(f, cols.len());
    b.set(cols.len() - 1, Fe::ONE);
    let y = solve_left(&a, &b)?;
    Some(basis.vec_mul(&y))
}

/// Iterator over all vectors of the given length in lexicographic order
/// (coordinate 0 is the most significant digit).
pub struct VectorIter {
    field: Field,
    len: usize,
    next: u128,
    total: u128,
}

pub fn enumerate_vectors(field: Field, len: usize) -> VectorIter {
    let total = (field.q() as u128)
        .checked_pow(len as u32)
        .expect("vector space too large to enumerate");
    VectorIter { field, len, next: 0, total }
}

/// q^len as u128, or None on overflow. Used for budget prechecks.
pub fn space_size(q: u32, len: usize) -> Option<u128> {
    (q as u128).checked_pow(len as u32)
}

impl Iterator for VectorIter {
    type Item = VecGF;

    fn next(&mut self) -> Option<VecGF> {
        if self.next == self.total {
            return None;
        }
        let v = index_to_vector(self.field, self.len, self.next);
        self.next += 1;
        Some(v)
    }
}

/// Decode an enumeration index into a vector, big-endian base q.
pub fn index_to_vector(field: Field, len: usize, idx: u128) -> VecGF {
    let q = field.q() as u128;
    let mut v = vec![Fe::ZERO; len];
    let mut rest = idx;
    for slot in v.iter_mut().rev() {
        *slot = Fe::from_raw((rest % q) as u32);
        rest /= q;
    }
    debug_assert_eq!(rest, 0);
    VecGF { field, v }
}

/// Inverse of `index_to_vector`.
pub fn vector_to_index(v: &VecGF) -> u128 {
    let q = v.field().q() as u128;
    v.iter().fold(0u128, |acc, e| acc * q + e.val() as u128)
}
