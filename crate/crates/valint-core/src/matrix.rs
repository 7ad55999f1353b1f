//! Matrices over the residue field K and over F, with exact determinants,
//! inverses, and the Iwasawa decomposition tau = A U Lambda (A integral with
//! unit determinant, U unipotent upper triangular, Lambda diagonal).

use std::fmt;

use crate::error::{Error, Result};
use crate::gamma::{GammaValue, GroupElement};
use crate::local::{KElem, LocalFieldSpec};
use crate::valued::{FElem, FieldContext};

// ---------------------------------------------------------------------------
// KMatrix
// ---------------------------------------------------------------------------

/// An n x n matrix over K, row-major.
#[derive(Debug, Clone)]
pub struct KMatrix {
    n: usize,
    entries: Vec<KElem>,
}

impl KMatrix {
    pub fn from_rows(rows: Vec<Vec<KElem>>) -> Result<Self> {
        let n = rows.len();
        for r in &rows {
            if r.len() != n {
                return Err(Error::Dimension { expected: n, got: r.len() });
            }
        }
        Ok(KMatrix { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn identity(spec: LocalFieldSpec, n: usize) -> Self {
        let mut entries = vec![KElem::zero(spec); n * n];
        for i in 0..n {
            entries[i * n + i] = KElem::one(spec);
        }
        KMatrix { n, entries }
    }

    pub fn diagonal(diag: Vec<KElem>) -> Self {
        let n = diag.len();
        let spec = diag[0].spec();
        let mut entries = vec![KElem::zero(spec); n * n];
        for (i, d) in diag.into_iter().enumerate() {
            entries[i * n + i] = d;
        }
        KMatrix { n, entries }
    }

    /// Embeds a 2x2 block into the identity at coordinates (i, j), 0-indexed.
    pub fn embed_2x2(spec: LocalFieldSpec, n: usize, i: usize, j: usize, block: &[KElem; 4]) -> Self {
        assert!(i < j && j < n);
        let mut m = KMatrix::identity(spec, n);
        m.set(i, i, block[0].clone());
        m.set(i, j, block[1].clone());
        m.set(j, i, block[2].clone());
        m.set(j, j, block[3].clone());
        m
    }

    /// Permutation matrix: result maps e_j to e_{perm[j]}; as an action on
    /// points, (P u)_i = u_{perm^{-1}(i)}.
    pub fn permutation(spec: LocalFieldSpec, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = KMatrix {
            n,
            entries: vec![KElem::zero(spec); n * n],
        };
        for (j, &i) in perm.iter().enumerate() {
            m.set(i, j, KElem::one(spec));
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &KElem {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: KElem) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_identity(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                let e = self.get(i, j);
                let want_one = i == j;
                if want_one {
                    if !e.sub(&KElem::one(e.spec())).is_exact_zero() {
                        return false;
                    }
                } else if !e.is_exact_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && !self.get(i, j).is_exact_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let spec = self.entries[0].spec();
        let mut out = KMatrix { n, entries: vec![KElem::zero(spec); n * n] };
        for i in 0..n {
            for j in 0..n {
                let mut acc = KElem::zero(spec);
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn matvec(&self, v: &[KElem]) -> Vec<KElem> {
        debug_assert_eq!(self.n, v.len());
        let spec = self.entries[0].spec();
        (0..self.n)
            .map(|i| {
                let mut acc = KElem::zero(spec);
                for j in 0..self.n {
                    acc = acc.add(&self.get(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn det(&self) -> KElem {
        let spec = self.entries[0].spec();
        det_generic(self.n, &|i, j| self.get(i, j).clone(), &KElem::zero(spec), &kelem_add, &kelem_mul, &kelem_neg)
    }

    /// Gauss-Jordan inverse with min-valuation pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let spec = self.entries[0].spec();
        let mut a = self.clone();
        let mut inv = KMatrix::identity(spec, n);
        for col in 0..n {
            // pivot: minimal valuation, lowest row index
            let mut pivot: Option<(usize, i64)> = None;
            for row in col..n {
                let e = a.get(row, col);
                if e.known_nonzero() {
                    let v = e.val_finite()?;
                    match pivot {
                        None => pivot = Some((row, v)),
                        Some((_, pv)) if v < pv => pivot = Some((row, v)),
                        _ => {}
                    }
                } else if !e.is_exact_zero() {
                    return Err(Error::PrecisionExhausted(
                        "matrix entry zero to precision during inversion".into(),
                    ));
                }
            }
            let (prow, _) = pivot.ok_or_else(|| {
                Error::SingularMatrix(format!("no pivot in column {}", col))
            })?;
            if prow != col {
                a.swap_rows(prow, col);
                inv.swap_rows(prow, col);
            }
            let pinv = a.get(col, col).inv()?;
            for j in 0..n {
                a.set(col, j, a.get(col, j).mul(&pinv));
                inv.set(col, j, inv.get(col, j).mul(&pinv));
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a.get(row, col).clone();
                if factor.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(row, j, a.get(row, j).sub(&factor.mul(a.get(col, j))));
                    inv.set(row, j, inv.get(row, j).sub(&factor.mul(inv.get(col, j))));
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        for j in 0..self.n {
            let n = self.n;
            self.entries.swap(r1 * n + j, r2 * n + j);
        }
    }

    /// Minimal valuation over nonzero entries.
    pub fn min_entry_val(&self) -> Result<i64> {
        let mut m: Option<i64> = None;
        for e in &self.entries {
            if e.known_nonzero() {
                let v = e.val_finite()?;
                m = Some(m.map_or(v, |x: i64| x.min(v)));
            } else if !e.is_exact_zero() {
                return Err(Error::PrecisionExhausted(
                    "matrix entry zero to precision".into(),
                ));
            }
        }
        m.ok_or_else(|| Error::SingularMatrix("zero matrix".into()))
    }
}

fn kelem_add(a: &KElem, b: &KElem) -> KElem {
    a.add(b)
}
fn kelem_mul(a: &KElem, b: &KElem) -> KElem {
    a.mul(b)
}
fn kelem_neg(a: &KElem) -> KElem {
    a.neg()
}

/// Cofactor determinant over any commutative ring; n stays small here.
fn det_generic<T: Clone>(
    n: usize,
    get: &dyn Fn(usize, usize) -> T,
    zero: &T,
    add: &dyn Fn(&T, &T) -> T,
    mul: &dyn Fn(&T, &T) -> T,
    neg: &dyn Fn(&T) -> T,
) -> T {
    if n == 0 {
        // det of the empty matrix is 1; callers with n = 0 handle this
        // before reaching here.
        unreachable!("determinant of 0x0 handled by callers");
    }
    if n == 1 {
        return get(0, 0);
    }
    let mut acc = zero.clone();
    for j in 0..n {
        let minor = det_generic(
            n - 1,
            &|r, c| get(r + 1, if c < j { c } else { c + 1 }),
            zero,
            add,
            mul,
            neg,
        );
        let term = mul(&get(0, j), &minor);
        let term = if j % 2 == 0 { term } else { neg(&term) };
        acc = add(&acc, &term);
    }
    acc
}

impl fmt::Display for KMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// FMatrix
// ---------------------------------------------------------------------------

/// An n x n matrix over F, row-major.
#[derive(Debug, Clone)]
pub struct FMatrix {
    n: usize,
    entries: Vec<FElem>,
}

/// The Iwasawa factors of an invertible tau: tau = A U Lambda.
#[derive(Debug, Clone)]
pub struct IwasawaFactors {
    /// Integral with unit determinant (residue matrix invertible over K).
    pub a: FMatrix,
    /// Unipotent upper triangular.
    pub u: FMatrix,
    /// Diagonal invertible.
    pub lam: FMatrix,
}

impl FMatrix {
    pub fn from_rows(rows: Vec<Vec<FElem>>) -> Result<Self> {
        let n = rows.len();
        for r in &rows {
            if r.len() != n {
                return Err(Error::Dimension { expected: n, got: r.len() });
            }
        }
        Ok(FMatrix { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn identity(ctx: &FieldContext, n: usize) -> Self {
        let mut entries = vec![FElem::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = FElem::one(ctx);
        }
        FMatrix { n, entries }
    }

    pub fn diagonal(diag: Vec<FElem>) -> Self {
        let n = diag.len();
        let mut entries = vec![FElem::zero(); n * n];
        for (i, d) in diag.into_iter().enumerate() {
            entries[i * n + i] = d;
        }
        FMatrix { n, entries }
    }

    /// Lifts a K matrix entrywise into F.
    pub fn from_k(ctx: &FieldContext, m: &KMatrix) -> Self {
        let n = m.n();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(FElem::from_k(ctx, m.get(i, j).clone()));
            }
        }
        FMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &FElem {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FElem) {
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = FMatrix { n, entries: vec![FElem::zero(); n * n] };
        for i in 0..n {
            for j in 0..n {
                let mut acc = FElem::zero();
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn matvec(&self, v: &[FElem]) -> Vec<FElem> {
        debug_assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| {
                let mut acc = FElem::zero();
                for j in 0..self.n {
                    acc = acc.add(&self.get(i, j).mul(&v[j]));
                }
                acc
            })
            .collect()
    }

    /// Multiplies on the left by diag(d): row i scaled by d_i.
    pub fn scale_rows(&self, d: &[FElem]) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, d[i].mul(self.get(i, j)));
            }
        }
        out
    }

    pub fn det(&self) -> FElem {
        if self.n == 0 {
            // empty product: the determinant is 1, but a context-free 1 is
            // not constructible; callers special-case n = 0.
            unreachable!("determinant of 0x0 handled by callers");
        }
        det_generic(
            self.n,
            &|i, j| self.get(i, j).clone(),
            &FElem::zero(),
            &|a, b| a.add(b),
            &|a, b| a.mul(b),
            &|a| a.neg(),
        )
    }

    /// |det tau| in C(Gamma).
    pub fn det_abs(&self, ctx: &FieldContext) -> Result<GammaValue> {
        if self.n == 0 {
            return Ok(ctx.gv_one());
        }
        let d = self.det();
        if d.is_exact_zero() {
            return Err(Error::SingularMatrix("determinant is zero".into()));
        }
        d.abs()
            .map_err(|e| match e {
                Error::Domain(_) | Error::PrecisionExhausted(_) => {
                    Error::SingularMatrix("determinant is zero (to precision)".into())
                }
                other => other,
            })
    }

    /// Gauss-Jordan inverse with min-valuation (lex) pivoting.
    pub fn inverse(&self, ctx: &FieldContext) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = FMatrix::identity(ctx, n);
        for col in 0..n {
            let mut pivot: Option<(usize, GroupElement)> = None;
            for row in col..n {
                let e = a.get(row, col);
                if e.is_exact_zero() {
                    continue;
                }
                let v = e.nu_finite()?;
                match &pivot {
                    None => pivot = Some((row, v)),
                    Some((_, pv)) if v < *pv => pivot = Some((row, v)),
                    _ => {}
                }
            }
            let (prow, _) =
                pivot.ok_or_else(|| Error::SingularMatrix(format!("no pivot in column {}", col)))?;
            if prow != col {
                a.swap_rows(prow, col);
                inv.swap_rows(prow, col);
            }
            let pinv = a.get(col, col).inv(ctx)?;
            for j in 0..n {
                a.set(col, j, a.get(col, j).mul(&pinv));
                inv.set(col, j, inv.get(col, j).mul(&pinv));
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a.get(row, col).clone();
                if factor.is_exact_zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(row, j, a.get(row, j).sub(&factor.mul(a.get(col, j))));
                    inv.set(row, j, inv.get(row, j).sub(&factor.mul(inv.get(col, j))));
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        for j in 0..self.n {
            let n = self.n;
            self.entries.swap(r1 * n + j, r2 * n + j);
        }
    }

    /// Iwasawa decomposition tau = A U Lambda. Deterministic pivot rule: in
    /// each column take the entry of minimal valuation (lex) with lowest row
    /// index among the remaining rows.
    pub fn iwasawa(&self, ctx: &FieldContext) -> Result<IwasawaFactors> {
        let n = self.n;
        // Maintain tau = A * R with A in GL_n(O_F); R becomes upper
        // triangular through integral row operations applied to R (and the
        // corresponding inverse column operations applied to A).
        let mut r = self.clone();
        let mut a = FMatrix::identity(ctx, n);
        for col in 0..n {
            let mut pivot: Option<(usize, GroupElement)> = None;
            for row in col..n {
                let e = r.get(row, col);
                if e.is_exact_zero() {
                    continue;
                }
                let v = e.nu_finite()?;
                match &pivot {
                    None => pivot = Some((row, v)),
                    Some((_, pv)) if v < *pv => pivot = Some((row, v)),
                    _ => {}
                }
            }
            let (prow, _) = pivot.ok_or_else(|| {
                Error::SingularMatrix(format!("singular to precision at column {}", col))
            })?;
            if prow != col {
                // R <- S R (swap rows), A <- A S
                r.swap_rows(prow, col);
                a.swap_cols(prow, col);
            }
            let pivot_inv = r.get(col, col).inv(ctx)?;
            for row in (col + 1)..n {
                let e = r.get(row, col).clone();
                if e.is_exact_zero() {
                    continue;
                }
                let m = e.mul(&pivot_inv); // integral by pivot choice
                // R <- E R with E = I - m e_{row,col}: row_row -= m * row_col
                for j in 0..n {
                    let v = r.get(row, j).sub(&m.mul(r.get(col, j)));
                    r.set(row, j, v);
                }
                // A <- A E^{-1} = A (I + m e_{row,col}): col_col += m * col_row
                for i in 0..n {
                    let v = a.get(i, col).add(&m.mul(a.get(i, row)));
                    a.set(i, col, v);
                }
            }
        }
        // R = U Lambda with Lambda = diag(R) and U = R Lambda^{-1}
        let mut lam = FMatrix { n, entries: vec![FElem::zero(); n * n] };
        let mut u = FMatrix::identity(ctx, n);
        for i in 0..n {
            lam.set(i, i, r.get(i, i).clone());
        }
        for j in 0..n {
            let dinv = r.get(j, j).inv(ctx)?;
            for i in 0..j {
                u.set(i, j, r.get(i, j).mul(&dinv));
            }
        }
        Ok(IwasawaFactors { a, u, lam })
    }

    fn swap_cols(&mut self, c1: usize, c2: usize) {
        if c1 == c2 {
            return;
        }
        for i in 0..self.n {
            let n = self.n;
            self.entries.swap(i * n + c1, i * n + c2);
        }
    }

    /// Entrywise residue matrix; requires all entries integral.
    pub fn residue(&self, ctx: &FieldContext) -> Result<KMatrix> {
        let n = self.n;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(self.get(i, j).residue(ctx)?);
            }
            rows.push(row);
        }
        KMatrix::from_rows(rows)
    }

    /// True when all entries are integral and the determinant is a unit,
    /// i.e. the matrix lies in GL_n(O_F).
    pub fn is_gl_o(&self, ctx: &FieldContext) -> Result<bool> {
        for e in &self.entries {
            if !e.is_exact_zero() && !e.is_integral(ctx)? {
                return Ok(false);
            }
        }
        if self.n == 0 {
            return Ok(true);
        }
        let d = self.det();
        Ok(d.nu_finite()? == ctx.gzero())
    }

    pub fn is_unipotent_upper(&self, ctx: &FieldContext) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                let e = self.get(i, j);
                if i == j {
                    if !e.sub(&FElem::one(ctx)).is_exact_zero() {
                        return false;
                    }
                } else if i > j && !e.is_exact_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && !self.get(i, j).is_exact_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Entrywise equality to the coarser of the two cutoffs; used by the
    /// decomposition tests.
    pub fn eq_to_cutoff(&self, other: &Self) -> bool {
        if self.n != other.n {
            return false;
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self.get(i, j).sub(other.get(i, j));
                if !(d.is_exact_zero() || d.is_apparent_zero()) {
                    return false;
                }
            }
        }
        true
    }

    pub fn render(&self, rank: usize) -> String {
        let mut rows = Vec::new();
        for i in 0..self.n {
            let cols: Vec<String> = (0..self.n).map(|j| self.get(i, j).render(rank)).collect();
            rows.push(format!("[{}]", cols.join(", ")));
        }
        format!("[{}]", rows.join(", "))
    }
}


impl FMatrix {
    /// Identity test tolerant of exact zero off-diagonals only.
    pub fn is_identity_shape(&self, ctx: &FieldContext) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                let e = self.get(i, j);
                if i == j {
                    if !e.sub(&FElem::one(ctx)).is_exact_zero() {
                        return false;
                    }
                } else if !e.is_exact_zero() {
                    return false;
                }
            }
        }
        true
    }
}
