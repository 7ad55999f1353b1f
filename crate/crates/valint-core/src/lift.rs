//! Lifted functions on F^n and the repeated-integral engine.
//!
//! The computable model of integrable functions on F^n is the span of terms
//! `coeff * g^{a,gamma}(tau x + b)` with g a step function on K^n, a and b
//! in F^n, gamma in Gamma^n and tau invertible over F. Partial integration
//! rewrites such a term into one of the same shape in one fewer variable,
//! following the constructive route: fold (a, gamma) into the affine data,
//! Iwasawa-decompose tau = A U Lambda, absorb A into g at residue level,
//! strip the integrated coordinate's diagonal entry, and reduce the
//! remaining upper-triangular shears by an explicit SL_2 case analysis per
//! sheared coordinate. The repeated integral over every coordinate order
//! agrees with the closed form `coeff * |det tau|^-1 * (integral of g) *
//! X^(sum gamma)`, which is what the verification report checks.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gamma::{GammaValue, GroupElement};
use crate::local::KElem;
use crate::matrix::{FMatrix, KMatrix};
use crate::stepfn::StepFn;
use crate::valued::{FElem, FieldContext};

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// `coeff * g^{a,gamma}`: the lift of g at (a, gamma) scaled by a constant.
/// Pointwise, the lift takes the value g(rho((x-a) t(-gamma))) on the coset
/// a + t(gamma) O_F^n and 0 elsewhere.
#[derive(Debug, Clone)]
pub struct LiftedTerm {
    pub coeff: GammaValue,
    pub g: StepFn,
    pub a: Vec<FElem>,
    pub gamma: Vec<GroupElement>,
}

impl LiftedTerm {
    pub fn new(coeff: GammaValue, g: StepFn, a: Vec<FElem>, gamma: Vec<GroupElement>) -> Result<Self> {
        let n = g.dim();
        if a.len() != n {
            return Err(Error::Dimension { expected: n, got: a.len() });
        }
        if gamma.len() != n {
            return Err(Error::Dimension { expected: n, got: gamma.len() });
        }
        Ok(LiftedTerm { coeff, g, a, gamma })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Pointwise evaluation.
    pub fn eval(&self, ctx: &FieldContext, x: &[FElem]) -> Result<GammaValue> {
        if x.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: x.len() });
        }
        let mut u = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            let z = x[i].sub(&self.a[i]).shift_t(&self.gamma[i].neg());
            if !z.nu_at_least(&ctx.gzero())? {
                return Ok(ctx.gv_zero());
            }
            u.push(z.residue(ctx)?);
        }
        Ok(self.coeff.mul(&self.g.eval(&u)?))
    }

    /// The integral of the lift: coeff * (Haar integral of g) * X^(sum
    /// gamma_i). Translation by a contributes nothing.
    pub fn integral(&self, ctx: &FieldContext) -> GammaValue {
        let total = GroupElement::sum(&self.gamma, ctx.rank);
        self.coeff
            .mul(&self.g.haar_integral())
            .mul(&GammaValue::x_power(total))
    }
}

/// The lift of g at (a, gamma) with unit coefficient.
pub fn lift(ctx: &FieldContext, g: StepFn, a: Vec<FElem>, gamma: Vec<GroupElement>) -> Result<LiftedTerm> {
    LiftedTerm::new(ctx.gv_one(), g, a, gamma)
}

/// One-variable integral of a lifted term (n = 1).
pub fn integrate_simple(ctx: &FieldContext, term: &LiftedTerm) -> Result<GammaValue> {
    if term.dim() != 1 {
        return Err(Error::Dimension { expected: 1, got: term.dim() });
    }
    Ok(term.integral(ctx))
}

/// `x -> base(tau x + shift)`.
#[derive(Debug, Clone)]
pub struct AffineImageTerm {
    pub base: LiftedTerm,
    pub tau: FMatrix,
    pub shift: Vec<FElem>,
}

impl AffineImageTerm {
    pub fn from_lifted(ctx: &FieldContext, base: LiftedTerm) -> Self {
        let n = base.dim();
        AffineImageTerm {
            base,
            tau: FMatrix::identity(ctx, n),
            shift: vec![FElem::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn eval(&self, ctx: &FieldContext, x: &[FElem]) -> Result<GammaValue> {
        let mut y = self.tau.matvec(x);
        for (yi, s) in y.iter_mut().zip(&self.shift) {
            *yi = yi.add(s);
        }
        self.base.eval(ctx, &y)
    }

    /// Closed-form integral: coeff * |det tau|^-1 * integral(g) * X^(sum
    /// gamma).
    pub fn integral_closed_form(&self, ctx: &FieldContext) -> Result<GammaValue> {
        let det_abs = self.tau.det_abs(ctx)?;
        Ok(self.base.integral(ctx).mul(&det_abs.inv()?))
    }
}

/// A finite sum of affine-image terms: the working representation of the
/// integrable class on F^n. Immutable; all rewriting produces new values.
#[derive(Debug, Clone)]
pub struct FFunction {
    dim: usize,
    terms: Vec<AffineImageTerm>,
}

impl FFunction {
    pub fn zero(dim: usize) -> Self {
        FFunction { dim, terms: Vec::new() }
    }

    pub fn from_term(term: AffineImageTerm) -> Self {
        FFunction { dim: term.dim(), terms: vec![term] }
    }

    pub fn from_lifted(ctx: &FieldContext, term: LiftedTerm) -> Self {
        FFunction::from_term(AffineImageTerm::from_lifted(ctx, term))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[AffineImageTerm] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension { expected: self.dim, got: other.dim });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(FFunction { dim: self.dim, terms })
    }

    pub fn scale(&self, c: &GammaValue) -> Self {
        if c.is_zero() {
            return FFunction::zero(self.dim);
        }
        FFunction {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    t.base.coeff = t.base.coeff.mul(c);
                    t
                })
                .collect(),
        }
    }

    pub fn eval(&self, ctx: &FieldContext, x: &[FElem]) -> Result<GammaValue> {
        let mut acc = ctx.gv_zero();
        for t in &self.terms {
            acc = acc.add(&t.eval(ctx, x)?);
        }
        Ok(acc)
    }

    /// `x -> f(sigma x + c)`: folds the affine substitution into every term.
    pub fn compose_affine(&self, sigma: &FMatrix, c: &[FElem]) -> Result<Self> {
        if sigma.n() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: sigma.n() });
        }
        if c.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: c.len() });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let tau = t.tau.mul(sigma);
                let extra = t.tau.matvec(c);
                let shift: Vec<FElem> = t
                    .shift
                    .iter()
                    .zip(&extra)
                    .map(|(s, e)| s.add(e))
                    .collect();
                AffineImageTerm { base: t.base.clone(), tau, shift }
            })
            .collect();
        Ok(FFunction { dim: self.dim, terms })
    }

    /// `x -> f(alpha x + a)` with alpha a vector of nonzero scalars.
    pub fn scale_translate(&self, ctx: &FieldContext, alpha: &[FElem], a: &[FElem]) -> Result<Self> {
        if alpha.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: alpha.len() });
        }
        for s in alpha {
            if s.is_exact_zero() {
                return Err(Error::DivisionByZero("zero scale in scale_translate".into()));
            }
        }
        let _ = ctx;
        self.compose_affine(&FMatrix::diagonal(alpha.to_vec()), a)
    }

    /// `x -> f(x + a)`.
    pub fn translate(&self, ctx: &FieldContext, a: &[FElem]) -> Result<Self> {
        self.compose_affine(&FMatrix::identity(ctx, self.dim), a)
    }

    /// Closed-form integral: sum over terms of coeff * |det tau|^-1 *
    /// integral(g) * X^(sum gamma).
    pub fn integral_closed_form(&self, ctx: &FieldContext) -> Result<GammaValue> {
        let mut acc = ctx.gv_zero();
        for t in &self.terms {
            acc = acc.add(&t.integral_closed_form(ctx)?);
        }
        Ok(acc)
    }

    /// The partial integral along coordinate r (1-indexed): a function of
    /// the remaining n-1 variables, pointwise equal to the fibre integral.
    pub fn partial_integral(&self, ctx: &FieldContext, r: usize) -> Result<FFunction> {
        if r == 0 || r > self.dim {
            return Err(Error::Domain(format!("integration coordinate {} out of range", r)));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(partial_integral_term(ctx, t, r)?);
        }
        Ok(FFunction { dim: self.dim - 1, terms })
    }

    /// Folds partial integrals along the given order (a permutation of
    /// 1..n referring to the original coordinates).
    pub fn repeated_integral(&self, ctx: &FieldContext, order: &[usize]) -> Result<GammaValue> {
        let n = self.dim;
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::Dimension { expected: n, got: order.len() });
        }
        for &c in order {
            if c == 0 || c > n || seen[c - 1] {
                return Err(Error::Domain(format!("order is not a permutation: {:?}", order)));
            }
            seen[c - 1] = true;
        }
        let mut f = self.clone();
        let mut live: Vec<usize> = (1..=n).collect();
        for &coord in order {
            let pos = live.iter().position(|&c| c == coord).expect("validated");
            f = f.partial_integral(ctx, pos + 1)?;
            live.remove(pos);
        }
        f.eval(ctx, &[])
    }

    /// Evaluates all n! coordinate orders and the closed form; exact
    /// agreement of everything is the pass condition.
    pub fn fubini_report(&self, ctx: &FieldContext) -> FubiniReport {
        let n = self.dim;
        let closed = self.integral_closed_form(ctx);
        let mut orders = Vec::new();
        for perm in permutations(n) {
            let v = self.repeated_integral(ctx, &perm);
            orders.push((perm, v));
        }
        FubiniReport { dim: n, closed, orders }
    }
}

/// The characteristic function of a + tau (rho^{-1}(O_K))^n, i.e. the
/// indicator of an affine image of the lifted unit polybox.
pub fn coset_char_fn(ctx: &FieldContext, a: &[FElem], tau: &FMatrix) -> Result<FFunction> {
    let n = tau.n();
    if a.len() != n {
        return Err(Error::Dimension { expected: n, got: a.len() });
    }
    let unit = StepFn::indicator_ranked(
        crate::stepfn::BoxN::new(vec![crate::local::Ball::unit(ctx.k); n]),
        ctx.rank,
    );
    let base = lift(ctx, unit, vec![FElem::zero(); n], vec![ctx.gzero(); n])?;
    let tau_inv = tau.inverse(ctx)?;
    let shift: Vec<FElem> = tau_inv.matvec(a).into_iter().map(|e| e.neg()).collect();
    Ok(FFunction::from_term(AffineImageTerm { base, tau: tau_inv, shift }))
}

// ---------------------------------------------------------------------------
// Verification report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FubiniReport {
    pub dim: usize,
    pub closed: Result<GammaValue>,
    pub orders: Vec<(Vec<usize>, Result<GammaValue>)>,
}

impl FubiniReport {
    pub fn pass(&self) -> bool {
        let closed = match &self.closed {
            Ok(v) => v,
            Err(_) => return false,
        };
        self.orders.iter().all(|(_, r)| match r {
            Ok(v) => v.eq(closed),
            Err(_) => false,
        })
    }

    pub fn value(&self) -> Option<&GammaValue> {
        self.closed.as_ref().ok()
    }
}

impl fmt::Display for FubiniReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pass() {
            write!(f, "FUBINI PASS value={}", self.value().unwrap())
        } else {
            match &self.closed {
                Err(e) => write!(f, "FUBINI FAIL closed-form error: {}", e),
                Ok(closed) => {
                    for (perm, r) in &self.orders {
                        match r {
                            Err(e) => {
                                return write!(
                                    f,
                                    "FUBINI FAIL order={:?} error: {}",
                                    perm, e
                                );
                            }
                            Ok(v) if !v.eq(closed) => {
                                return write!(
                                    f,
                                    "FUBINI FAIL order={:?} value={} closed={}",
                                    perm, v, closed
                                );
                            }
                            _ => {}
                        }
                    }
                    write!(f, "FUBINI FAIL (inconsistent report)")
                }
            }
        }
    }
}

/// All permutations of 1..=n, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (1..=n).collect(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// Partial integration of a single term
// ---------------------------------------------------------------------------

/// Affine form over the remaining variables: cst + sum lin[j] * v_j.
#[derive(Debug, Clone)]
struct AffineF {
    cst: FElem,
    lin: BTreeMap<usize, FElem>,
}

impl AffineF {
    fn zero() -> Self {
        AffineF { cst: FElem::zero(), lin: BTreeMap::new() }
    }

    fn add(&self, other: &Self) -> Self {
        let mut lin = self.lin.clone();
        for (j, c) in &other.lin {
            let e = lin.entry(*j).or_insert_with(FElem::zero);
            *e = e.add(c);
        }
        lin.retain(|_, c| !c.is_exact_zero());
        AffineF { cst: self.cst.add(&other.cst), lin }
    }

    fn scale(&self, f: &FElem) -> Self {
        if f.is_exact_zero() {
            return AffineF::zero();
        }
        AffineF {
            cst: self.cst.mul(f),
            lin: self.lin.iter().map(|(j, c)| (*j, c.mul(f))).collect(),
        }
    }

    /// self - f * v_j.
    fn sub_var_multiple(&self, j: usize, f: &FElem) -> Self {
        let mut lin = self.lin.clone();
        let e = lin.entry(j).or_insert_with(FElem::zero);
        *e = e.sub(f);
        lin.retain(|_, c| !c.is_exact_zero());
        AffineF { cst: self.cst.clone(), lin }
    }
}

struct ShearOut {
    /// Composite SL_n(K) change of variables to pull g back by.
    tau: KMatrix,
    /// Lift orders for the remaining slots.
    delta: Vec<GroupElement>,
    /// Lift points for the remaining slots, affine over later slots.
    cs: Vec<AffineF>,
    /// X-exponent factor carried out of the integral.
    xfac: GroupElement,
}

/// Reduction of an integral of `h^0(w_1 + alpha_1 z, ..., w_k + alpha_k z,
/// w_{k+1}, .., w_{n-1}, z) dz` (with the trailing slots of `alphas` zero),
/// where the last K-coordinate additionally carries lift data (a, gamma).
/// Peels the shears from the highest slot down; each nonzero peel
/// contributes an SL_2 block on residue coordinates (slot, n-1), a support
/// coset for that slot, and an X-exponent bookkeeping step.
fn shear_reduce(
    ctx: &FieldContext,
    n_total: usize,
    alphas: &[FElem],
    a: AffineF,
    gamma: GroupElement,
) -> Result<ShearOut> {
    let k = alphas.len();
    if k == 0 {
        return Ok(ShearOut {
            tau: KMatrix::identity(ctx.k, n_total),
            delta: Vec::new(),
            cs: Vec::new(),
            xfac: gamma,
        });
    }
    let j = k - 1;
    let alpha = &alphas[j];
    if alpha.is_exact_zero() {
        let sub = shear_reduce(ctx, n_total, &alphas[..j], a, gamma)?;
        let mut delta = sub.delta;
        delta.push(ctx.gzero());
        let mut cs = sub.cs;
        cs.push(AffineF::zero());
        return Ok(ShearOut { tau: sub.tau, delta, cs, xfac: sub.xfac });
    }
    let nu_alpha = alpha.nu_finite()?;
    let m = nu_alpha.add(&gamma);
    let delta_j = m.min_with_zero();
    let e = alpha.inv(ctx)?.mul(&FElem::t_split(ctx, &nu_alpha));
    let ebar = e.residue(ctx)?;
    let ebar_inv = ebar.inv()?;
    let zero_g = ctx.gzero();
    let k0 = ctx.k_zero();
    let k1 = ctx.k_one();
    let block: [KElem; 4] = if m < zero_g {
        [k0.clone(), ebar_inv, ebar.neg(), k0]
    } else if m == zero_g {
        [k0, ebar_inv, ebar.neg(), k1]
    } else {
        [k1.clone(), k0, ebar.neg(), k1]
    };
    let tau_emb = KMatrix::embed_2x2(ctx.k, n_total, j, n_total - 1, &block);

    // c_j = -alpha * a; the support of slot j is c_j + t(delta_j) O_F.
    let c_j = a.scale(&alpha.neg());
    // new lift point for the last coordinate:
    // a' = a + (c_j - v_j) * e * t(gamma - delta_j)
    let factor = e.mul(&FElem::t_split(ctx, &gamma.sub(&delta_j)));
    let a_next = a.add(&c_j.scale(&factor)).sub_var_multiple(j, &factor);
    let gamma_next = gamma.sub(&delta_j);

    let sub = shear_reduce(ctx, n_total, &alphas[..j], a_next, gamma_next)?;
    let mut delta = sub.delta;
    delta.push(delta_j);
    let mut cs = sub.cs;
    cs.push(c_j);
    Ok(ShearOut { tau: tau_emb.mul(&sub.tau), delta, cs, xfac: sub.xfac })
}

/// Integrates one affine-image term along coordinate r (1-indexed),
/// producing a term in n-1 variables.
fn partial_integral_term(
    ctx: &FieldContext,
    term: &AffineImageTerm,
    r: usize,
) -> Result<AffineImageTerm> {
    let n = term.dim();
    let ri = r - 1; // 0-indexed integrated coordinate

    // A. fold lift data into the affine part: g^{a,gamma}(y) =
    // g^0(diag(t(-gamma)) (y - a)).
    let d_neg: Vec<FElem> = term
        .base
        .gamma
        .iter()
        .map(|g| FElem::t_split(ctx, &g.neg()))
        .collect();
    let tau1 = term.tau.scale_rows(&d_neg);
    let b1: Vec<FElem> = (0..n)
        .map(|i| term.shift[i].sub(&term.base.a[i]).mul(&d_neg[i]))
        .collect();

    // B. Iwasawa tau1 = A U Lambda; absorb A into g at residue level.
    let iw = tau1.iwasawa(ctx)?;
    let abar = iw.a.residue(ctx)?;
    let h = if abar.is_identity() {
        term.base.g.clone()
    } else {
        let zeros = vec![ctx.k_zero(); n];
        term.base.g.affine_pullback(ctx, &abar, &zeros)?
    };
    let c = iw.a.inverse(ctx)?.matvec(&b1);

    // C. strip the integrated coordinate: z = lam_r x_r + s_r.
    let lam: Vec<FElem> = (0..n).map(|i| iw.lam.get(i, i).clone()).collect();
    let multiplier = lam[ri].abs()?.inv()?;
    let rem: Vec<usize> = (0..n).filter(|&i| i != ri).collect();
    let nm1 = n - 1;
    let pos = |i0: usize| -> usize {
        rem.iter().position(|&x| x == i0).expect("remaining coordinate")
    };

    // s_r as an affine form over the remaining variables
    let mut s_row = vec![FElem::zero(); nm1];
    let mut s_cst = c[ri].clone();
    for &j0 in &rem {
        if j0 > ri {
            s_row[pos(j0)] = iw.u.get(ri, j0).mul(&lam[j0]);
        }
    }
    let _ = &mut s_cst;

    // w rows: v = M x' + m over the remaining variables
    let mut m_rows = vec![vec![FElem::zero(); nm1]; nm1];
    let mut m_cst = vec![FElem::zero(); nm1];
    for &i0 in &rem {
        let pi = pos(i0);
        let mut row = vec![FElem::zero(); nm1];
        for &j0 in &rem {
            if j0 == i0 {
                row[pos(j0)] = lam[i0].clone();
            } else if j0 > i0 {
                let u_ij = iw.u.get(i0, j0);
                if !u_ij.is_exact_zero() {
                    row[pos(j0)] = u_ij.mul(&lam[j0]);
                }
            }
        }
        let mut cst = c[i0].clone();
        if i0 < ri {
            let f = iw.u.get(i0, ri).clone();
            if !f.is_exact_zero() {
                for pj in 0..nm1 {
                    row[pj] = row[pj].sub(&f.mul(&s_row[pj]));
                }
                cst = cst.sub(&f.mul(&s_cst));
            }
        }
        m_rows[pi] = row;
        m_cst[pi] = cst;
    }

    // D. permute the integrated residue coordinate to the last slot.
    let mut perm: Vec<usize> = (0..n).filter(|&i| i != ri).collect();
    perm.push(ri);
    let h_perm = if ri == n - 1 { h } else { h.permute(&perm)? };

    // the shear coefficients alpha_pi = U[i0][ri] for slots before ri
    let mut alphas = vec![FElem::zero(); nm1];
    for &i0 in &rem {
        if i0 < ri {
            alphas[pos(i0)] = iw.u.get(i0, ri).clone();
        }
    }

    // E. shear reduction.
    let out = shear_reduce(ctx, n, &alphas, AffineF::zero(), ctx.gzero())?;

    // F. pull g back by the composite SL_n(K) matrix and integrate the last
    // residue coordinate fibrewise.
    let h_final = if out.tau.is_identity() {
        h_perm
    } else {
        let zeros = vec![ctx.k_zero(); n];
        h_perm.affine_pullback(ctx, &out.tau, &zeros)?
    };
    let g_hat = h_final.partial_integral(n)?;

    // G. assemble the (n-1)-dimensional affine data:
    // y = (I - C) v - c0, then v = M x' + m.
    let mut ic = FMatrix::identity(ctx, nm1);
    let mut c0 = vec![FElem::zero(); nm1];
    for pi in 0..nm1 {
        let aff = &out.cs[pi];
        c0[pi] = aff.cst.clone();
        for (j, coefficient) in &aff.lin {
            let cur = ic.get(pi, *j).clone();
            ic.set(pi, *j, cur.sub(coefficient));
        }
    }
    let m_mat = FMatrix::from_rows(m_rows)?;
    let tau_final = ic.mul(&m_mat);
    let shift_vec = ic.matvec(&m_cst);
    let shift_final: Vec<FElem> = shift_vec
        .iter()
        .zip(&c0)
        .map(|(s, c)| s.sub(c))
        .collect();

    // H. coefficient bookkeeping.
    let coeff = term
        .base
        .coeff
        .mul(&multiplier)
        .mul(&GammaValue::x_power(out.xfac));
    let base = LiftedTerm::new(coeff, g_hat, vec![FElem::zero(); nm1], out.delta)?;
    Ok(AffineImageTerm { base, tau: tau_final, shift: shift_final })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{Ball, LocalFieldSpec};
    use crate::stepfn::BoxN;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn ctx() -> FieldContext {
        FieldContext::new(LocalFieldSpec::padic(3, 24), 1)
    }

    fn g1(e: i64) -> GroupElement {
        GroupElement(vec![e])
    }

    fn t_pow(ctx: &FieldContext, e: i64) -> FElem {
        FElem::t_split(ctx, &g1(e))
    }

    fn fint(ctx: &FieldContext, n: i64) -> FElem {
        FElem::from_integer(ctx, n)
    }

    fn unit_indicator(ctx: &FieldContext, n: usize) -> StepFn {
        StepFn::indicator_ranked(BoxN::new(vec![Ball::unit(ctx.k); n]), ctx.rank)
    }

    fn x_pow(e: i64) -> GammaValue {
        GammaValue::x_power(g1(e))
    }

    #[test]
    fn lift_pointwise_semantics() {
        let ctx = ctx();
        // g = indicator(O_K), a = 0, gamma = 0: the characteristic function
        // of rho^{-1}(O_K) = O_F restricted to residues in O_K.
        let term = lift(&ctx, unit_indicator(&ctx, 1), vec![FElem::zero()], vec![g1(0)]).unwrap();
        // inside: x = 2 + t
        let x_in = fint(&ctx, 2).add(&t_pow(&ctx, 1));
        assert!(term.eval(&ctx, &[x_in]).unwrap().eq(&ctx.gv_one()));
        // rho(x) = 1/3 is outside O_K although x is in O_F per nu
        let x_res_out = FElem::from_k(
            &ctx,
            crate::local::KElem::from_rational(ctx.k, BigRational::new(BigInt::from(1), BigInt::from(3))),
        );
        assert!(term.eval(&ctx, &[x_res_out]).unwrap().is_zero());
        // outside the coset entirely
        assert!(term.eval(&ctx, &[t_pow(&ctx, -1)]).unwrap().is_zero());
    }

    #[test]
    fn lift_at_a_gamma_matches_base_point() {
        let ctx = ctx();
        // g^{a,gamma}(a + t(gamma) x) = g^0(x)
        let b = Ball::new(&KElem::from_integer(ctx.k, 1), 1).unwrap();
        let g = StepFn::indicator_ranked(BoxN::new(vec![b]), 1);
        let a = t_pow(&ctx, -2);
        let gamma = g1(3);
        let term = lift(&ctx, g.clone(), vec![a.clone()], vec![gamma.clone()]).unwrap();
        let base = lift(&ctx, g, vec![FElem::zero()], vec![g1(0)]).unwrap();
        for xi in [fint(&ctx, 0), fint(&ctx, 1), fint(&ctx, 4), t_pow(&ctx, 1), fint(&ctx, 2)] {
            let lhs = term
                .eval(&ctx, &[a.add(&t_pow(&ctx, 3).mul(&xi))])
                .unwrap();
            let rhs = base.eval(&ctx, &[xi]).unwrap();
            assert!(lhs.eq(&rhs));
        }
    }

    #[test]
    fn integrate_simple_examples() {
        let ctx = ctx();
        // integral of (indicator O_K)^{0,0} is 1
        let t0 = lift(&ctx, unit_indicator(&ctx, 1), vec![FElem::zero()], vec![g1(0)]).unwrap();
        assert!(integrate_simple(&ctx, &t0).unwrap().eq(&ctx.gv_one()));
        // gamma = 2: X^2
        let t2 = lift(&ctx, unit_indicator(&ctx, 1), vec![FElem::zero()], vec![g1(2)]).unwrap();
        assert!(integrate_simple(&ctx, &t2).unwrap().eq(&x_pow(2)));
        // g = indicator(3 O_K), a = t^-1, gamma = -1: (1/3) X^-1
        let g = StepFn::indicator_ranked(
            BoxN::new(vec![Ball::new(&KElem::zero(ctx.k), 1).unwrap()]),
            1,
        );
        let tm = lift(&ctx, g, vec![t_pow(&ctx, -1)], vec![g1(-1)]).unwrap();
        let expect = GammaValue::from_rational(1, BigRational::new(BigInt::from(1), BigInt::from(3)))
            .mul(&x_pow(-1));
        assert!(integrate_simple(&ctx, &tm).unwrap().eq(&expect));
    }

    #[test]
    fn scale_translate_laws() {
        let ctx = ctx();
        let f = FFunction::from_lifted(
            &ctx,
            lift(&ctx, unit_indicator(&ctx, 1), vec![FElem::zero()], vec![g1(0)]).unwrap(),
        );
        // alpha = t: integral becomes X^-1
        let scaled = f
            .scale_translate(&ctx, &[t_pow(&ctx, 1)], &[FElem::zero()])
            .unwrap();
        assert!(scaled.integral_closed_form(&ctx).unwrap().eq(&x_pow(-1)));
        assert!(scaled.repeated_integral(&ctx, &[1]).unwrap().eq(&x_pow(-1)));
        // translation only: integral unchanged
        let shifted = f.translate(&ctx, &[t_pow(&ctx, -3)]).unwrap();
        assert!(shifted.repeated_integral(&ctx, &[1]).unwrap().eq(&ctx.gv_one()));
        // identity scale
        let same = f
            .scale_translate(&ctx, &[fint(&ctx, 1)], &[FElem::zero()])
            .unwrap();
        assert!(same.repeated_integral(&ctx, &[1]).unwrap().eq(&ctx.gv_one()));
        // zero scale rejected
        assert!(f.scale_translate(&ctx, &[FElem::zero()], &[FElem::zero()]).is_err());
    }

    #[test]
    fn partial_integral_plain_lift() {
        let ctx = ctx();
        // f = (indicator O^2)^{0,0}, integrate coordinate 2: the lift of the
        // partial Haar integral, i.e. (indicator O)^{0,0}.
        let f = FFunction::from_lifted(
            &ctx,
            lift(
                &ctx,
                unit_indicator(&ctx, 2),
                vec![FElem::zero(), FElem::zero()],
                vec![g1(0), g1(0)],
            )
            .unwrap(),
        );
        let p = f.partial_integral(&ctx, 2).unwrap();
        assert_eq!(p.dim(), 1);
        // pointwise: equals indicator lift on F
        let probe = [fint(&ctx, 0), fint(&ctx, 2), t_pow(&ctx, 1), t_pow(&ctx, -1)];
        let expect = FFunction::from_lifted(
            &ctx,
            lift(&ctx, unit_indicator(&ctx, 1), vec![FElem::zero()], vec![g1(0)]).unwrap(),
        );
        for x in &probe {
            let lhs = p.eval(&ctx, std::slice::from_ref(x)).unwrap();
            let rhs = expect.eval(&ctx, std::slice::from_ref(x)).unwrap();
            assert!(lhs.eq(&rhs));
        }
        assert!(f.repeated_integral(&ctx, &[1, 2]).unwrap().eq(&ctx.gv_one()));
    }

    #[test]
    fn unipotent_shear_is_invariant() {
        let ctx = ctx();
        // f = g^0 composed with U = [[1,1],[0,1]]: both orders agree and the
        // integral equals the integral of g.
        let g = unit_indicator(&ctx, 2);
        let base = lift(&ctx, g, vec![FElem::zero(), FElem::zero()], vec![g1(0), g1(0)]).unwrap();
        let u = FMatrix::from_rows(vec![
            vec![fint(&ctx, 1), fint(&ctx, 1)],
            vec![FElem::zero(), fint(&ctx, 1)],
        ])
        .unwrap();
        let f = FFunction::from_lifted(&ctx, base)
            .compose_affine(&u, &[FElem::zero(), FElem::zero()])
            .unwrap();
        let v12 = f.repeated_integral(&ctx, &[1, 2]).unwrap();
        let v21 = f.repeated_integral(&ctx, &[2, 1]).unwrap();
        assert!(v12.eq(&v21));
        assert!(v12.eq(&ctx.gv_one()));
    }

    #[test]
    fn shear_with_big_coefficient() {
        let ctx = ctx();
        // U with a negative-valuation shear entry exercises the nontrivial
        // case analysis.
        let g = unit_indicator(&ctx, 2);
        let base = lift(&ctx, g, vec![FElem::zero(), FElem::zero()], vec![g1(0), g1(0)]).unwrap();
        let u = FMatrix::from_rows(vec![
            vec![fint(&ctx, 1), t_pow(&ctx, -1)],
            vec![FElem::zero(), fint(&ctx, 1)],
        ])
        .unwrap();
        let f = FFunction::from_lifted(&ctx, base)
            .compose_affine(&u, &[FElem::zero(), FElem::zero()])
            .unwrap();
        let report = f.fubini_report(&ctx);
        assert!(report.pass(), "report: {}", report);
        assert!(report.value().unwrap().eq(&ctx.gv_one()));
    }

    #[test]
    fn diagonal_scaling_closed_form() {
        let ctx = ctx();
        // f = g^0 o diag(t, 1): iterated integral is X^-1 * integral(g).
        let g = unit_indicator(&ctx, 2);
        let base = lift(&ctx, g, vec![FElem::zero(), FElem::zero()], vec![g1(0), g1(0)]).unwrap();
        let d = FMatrix::diagonal(vec![t_pow(&ctx, 1), fint(&ctx, 1)]);
        let f = FFunction::from_lifted(&ctx, base)
            .compose_affine(&d, &[FElem::zero(), FElem::zero()])
            .unwrap();
        for order in [[1usize, 2], [2, 1]] {
            assert!(f.repeated_integral(&ctx, &order).unwrap().eq(&x_pow(-1)));
        }
        assert!(f.integral_closed_form(&ctx).unwrap().eq(&x_pow(-1)));
    }

    #[test]
    fn repeated_integral_of_lift_with_gammas() {
        let ctx = ctx();
        // n = 2, gamma = (1, 2): every order gives X^3.
        let f = FFunction::from_lifted(
            &ctx,
            lift(
                &ctx,
                unit_indicator(&ctx, 2),
                vec![t_pow(&ctx, -1), fint(&ctx, 5)],
                vec![g1(1), g1(2)],
            )
            .unwrap(),
        );
        for order in [[1usize, 2], [2, 1]] {
            assert!(f.repeated_integral(&ctx, &order).unwrap().eq(&x_pow(3)));
        }
        // zero function integrates to zero
        let z = FFunction::zero(2);
        assert!(z.repeated_integral(&ctx, &[1, 2]).unwrap().is_zero());
    }

    #[test]
    fn coset_char_fn_measure() {
        let ctx = ctx();
        // integral of the characteristic function of a + tau (rho^-1 O)^n is
        // |det tau|.
        let tau = FMatrix::from_rows(vec![
            vec![t_pow(&ctx, 1), fint(&ctx, 1)],
            vec![FElem::zero(), fint(&ctx, 3)],
        ])
        .unwrap();
        let a = [t_pow(&ctx, -1), fint(&ctx, 2)];
        let f = coset_char_fn(&ctx, &a, &tau).unwrap();
        let expect = tau.det_abs(&ctx).unwrap();
        assert!(f.integral_closed_form(&ctx).unwrap().eq(&expect));
        assert!(f.repeated_integral(&ctx, &[2, 1]).unwrap().eq(&expect));
    }

    #[test]
    fn fubini_report_general_matrix() {
        let ctx = ctx();
        let g = unit_indicator(&ctx, 2);
        let base = lift(&ctx, g, vec![FElem::zero(), FElem::zero()], vec![g1(0), g1(0)]).unwrap();
        let tau = FMatrix::from_rows(vec![
            vec![t_pow(&ctx, 1), fint(&ctx, 1)],
            vec![fint(&ctx, 3), fint(&ctx, 1)],
        ])
        .unwrap();
        let f = FFunction::from_lifted(&ctx, base)
            .compose_affine(&tau, &[t_pow(&ctx, -1), fint(&ctx, 1)])
            .unwrap();
        let report = f.fubini_report(&ctx);
        assert!(report.pass(), "report: {}", report);
        let expect = tau.det_abs(&ctx).unwrap().inv().unwrap();
        assert!(report.value().unwrap().eq(&expect));
        // determinism
        let report2 = f.fubini_report(&ctx);
        assert_eq!(format!("{}", report), format!("{}", report2));
    }
}
