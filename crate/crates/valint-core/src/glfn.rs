//! Matrix-level integration: the coordinate identification of M_N(F) with
//! F^(N^2), integrals over M_N(F) and GL_N(F), lifts of residue-level
//! functions to both groups, and two-sided translation invariance.
//!
//! The identification T is fixed row-major (basis e_11, e_12, .., e_NN), so
//! it restricts to O_F^(N^2) <-> M_N(O_F) and commutes with residue maps.
//! The Haar measure on GL_N(K) is d_GL x = |det x|^(-N) d_M x; with that
//! exponent the coordinate action of right/left translation has determinant
//! det(sigma)^N and the translated integrals match exactly.

use num_rational::BigRational;
use std::fmt;

use crate::error::{Error, Result};
use crate::gamma::{GammaValue, GroupElement};
use crate::lift::{lift, FFunction};
use crate::local::KElem;
use crate::matrix::{FMatrix, KMatrix};
use crate::stepfn::{BoxN, StepFn};
use crate::valued::{FElem, FieldContext};

/// The fixed row-major bijection between F^(N^2) and N x N matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixCoords {
    pub n_size: usize,
}

impl MatrixCoords {
    pub fn new(n_size: usize) -> Self {
        MatrixCoords { n_size }
    }

    pub fn dim(&self) -> usize {
        self.n_size * self.n_size
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_size + j
    }

    pub fn to_matrix(&self, v: &[FElem]) -> Result<FMatrix> {
        if v.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: v.len() });
        }
        let n = self.n_size;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| v[self.index(i, j)].clone()).collect())
            .collect();
        FMatrix::from_rows(rows)
    }

    pub fn to_k_matrix(&self, v: &[KElem]) -> Result<KMatrix> {
        if v.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: v.len() });
        }
        let n = self.n_size;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| v[self.index(i, j)].clone()).collect())
            .collect();
        KMatrix::from_rows(rows)
    }
}

/// Which side a translation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// A function on GL_N(F) represented by the stored extension of
/// `tau -> phi(tau) |det tau|^(-N)` to matrix space, in coordinates.
#[derive(Debug, Clone)]
pub struct GLFunction {
    pub n_size: usize,
    /// The extension, a function on F^(N^2).
    pub ext: FFunction,
}

/// The integral over M_N(F): the repeated integral of the coordinate
/// function (closed form; the repeated-integral route is available through
/// `FFunction` directly).
pub fn mn_integral(ctx: &FieldContext, f: &FFunction) -> Result<GammaValue> {
    f.integral_closed_form(ctx)
}

/// Weights a residue-level step function on K^(N^2) by |det|^(-N),
/// refining boxes until the determinant valuation is constant on each.
/// Boxes meeting determinant valuation above `ctx.det_vmax` are an error.
pub fn gl_weight(ctx: &FieldContext, g: &StepFn, n_size: usize) -> Result<StepFn> {
    let coords = MatrixCoords::new(n_size);
    let n = coords.dim();
    if g.dim() != n {
        return Err(Error::Dimension { expected: n, got: g.dim() });
    }
    let nn = n_size as i64;
    let mut out: Vec<(BoxN, GammaValue)> = Vec::new();
    let mut work: Vec<(BoxN, GammaValue)> = g.terms().to_vec();
    let mut processed: u128 = 0;
    while let Some((bx, coeff)) = work.pop() {
        processed += 1;
        if processed > ctx.depth_limit as u128 {
            return Err(Error::DepthLimit(format!(
                "determinant refinement exceeded {} boxes",
                ctx.depth_limit
            )));
        }
        let m = bx.balls.iter().map(|b| b.depth()).min().unwrap();
        // entry valuation lower bound over the box
        let mut sigma: i64 = 0;
        for b in &bx.balls {
            let lb = if b.center().is_exact_zero() {
                b.depth()
            } else {
                b.center().val_finite()?.min(b.depth())
            };
            sigma = sigma.min(lb);
        }
        // det(x) - det(c) has valuation >= m + (N-1) * sigma on the box
        let bound = m + (nn - 1) * sigma;
        let centers: Vec<KElem> = bx.balls.iter().map(|b| b.center().clone()).collect();
        let det_c = coords.to_k_matrix(&centers)?.det();
        let v_known = if det_c.is_exact_zero() {
            None
        } else {
            Some(det_c.val_finite()?)
        };
        match v_known {
            Some(v) if v < bound => {
                if v > ctx.det_vmax {
                    return Err(Error::DepthLimit(format!(
                        "support has determinant valuation {} above v_max {}",
                        v, ctx.det_vmax
                    )));
                }
                // |det|^(-N) = p^(N v)
                let w = ctx.k.p_pow(nn * v);
                out.push((bx, coeff.scale_rat(&w)));
            }
            _ => {
                // undetermined; if the guaranteed bound already exceeds
                // v_max the support is too degenerate.
                if bound > ctx.det_vmax {
                    return Err(Error::DepthLimit(format!(
                        "support meets determinant valuation above v_max {}",
                        ctx.det_vmax
                    )));
                }
                let depths: Vec<i64> =
                    bx.balls.iter().map(|b| b.depth().max(m + 1)).collect();
                for sub in bx.refine(&depths)? {
                    work.push((sub, coeff.clone()));
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    StepFn::from_terms(n, out)
}

/// Lifts a step function on K^(N^2) to matrix space over F: the function
/// g^0 supported on M_N(O_F)-coordinates, as a member of the integrable
/// class. Its integral equals the Haar integral of g.
pub fn lift_to_mn(ctx: &FieldContext, g: &StepFn) -> Result<FFunction> {
    let n = g.dim();
    let term = lift(ctx, g.clone(), vec![FElem::zero(); n], vec![ctx.gzero(); n])?;
    Ok(FFunction::from_lifted(ctx, term))
}

/// Lifts a step function supported in the invertible locus to GL_N(F): the
/// stored extension is the lift of the |det|^(-N)-weighted function.
pub fn lift_to_gl(ctx: &FieldContext, g: &StepFn, n_size: usize) -> Result<GLFunction> {
    let weighted = gl_weight(ctx, g, n_size)?;
    Ok(GLFunction { n_size, ext: lift_to_mn(ctx, &weighted)? })
}

/// The integral over GL_N(F): the matrix-space integral of the stored
/// extension.
pub fn gl_integral(ctx: &FieldContext, phi: &GLFunction) -> Result<GammaValue> {
    mn_integral(ctx, &phi.ext)
}

/// The coordinate action of right (resp. left) multiplication by sigma on
/// F^(N^2): T(action(x)) = T(x) sigma (resp. sigma T(x)).
pub fn action_matrix(ctx: &FieldContext, sigma: &FMatrix, side: Side) -> FMatrix {
    let n_size = sigma.n();
    let coords = MatrixCoords::new(n_size);
    let n = coords.dim();
    let mut m = FMatrix::identity(ctx, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, FElem::zero());
        }
    }
    match side {
        Side::Right => {
            // (x sigma)_{ij} = sum_k x_{ik} sigma_{kj}
            for i in 0..n_size {
                for j in 0..n_size {
                    for k in 0..n_size {
                        m.set(coords.index(i, j), coords.index(i, k), sigma.get(k, j).clone());
                    }
                }
            }
        }
        Side::Left => {
            // (sigma x)_{ij} = sum_k sigma_{ik} x_{kj}
            for i in 0..n_size {
                for j in 0..n_size {
                    for k in 0..n_size {
                        m.set(coords.index(i, j), coords.index(k, j), sigma.get(i, k).clone());
                    }
                }
            }
        }
    }
    m
}

/// The translate `tau -> phi(tau sigma)` (right) or `tau -> phi(sigma tau)`
/// (left): composes the extension with the coordinate action and multiplies
/// by |det sigma|^N.
pub fn gl_translate(
    ctx: &FieldContext,
    phi: &GLFunction,
    sigma: &FMatrix,
    side: Side,
) -> Result<GLFunction> {
    if sigma.n() != phi.n_size {
        return Err(Error::Dimension { expected: phi.n_size, got: sigma.n() });
    }
    let action = action_matrix(ctx, sigma, side);
    let det_abs = sigma.det_abs(ctx)?;
    let factor = det_abs.pow(phi.n_size as i64)?;
    let composed = phi
        .ext
        .compose_affine(&action, &vec![FElem::zero(); action.n()])?
        .scale(&factor);
    Ok(GLFunction { n_size: phi.n_size, ext: composed })
}

/// The step function 1 on the invertible-residue cell of M_N(O_K) at depth
/// 1: one depth-1 box per invertible matrix over F_p. Used by tests and the
/// script runner.
pub fn unit_det_cell(ctx: &FieldContext, n_size: usize) -> Result<StepFn> {
    let coords = MatrixCoords::new(n_size);
    let n = coords.dim();
    let p = ctx.k.p as u64;
    let total = p.pow(n as u32);
    if total > ctx.depth_limit {
        return Err(Error::DepthLimit("unit cell enumeration too large".into()));
    }
    let mut terms = Vec::new();
    for code in 0..total {
        let mut digits = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            digits.push((c % p) as u32);
            c /= p;
        }
        let entries: Vec<KElem> = digits
            .iter()
            .map(|&d| KElem::from_integer(ctx.k, d as i64))
            .collect();
        let mat = coords.to_k_matrix(&entries)?;
        let det = mat.det();
        if det.is_exact_zero() || det.val_finite()? > 0 {
            continue;
        }
        let balls: Vec<crate::local::Ball> = entries
            .iter()
            .map(|e| crate::local::Ball::new(e, 1))
            .collect::<Result<_>>()?;
        terms.push((BoxN::new(balls), GammaValue::one(ctx.rank)));
    }
    StepFn::from_terms(n, terms)
}

/// Exponent and rational part of a monomial |.|-value; errors when the
/// value is not a monomial (absolute values always are).
pub fn monomial_parts(v: &GammaValue) -> Result<(BigRational, GroupElement)> {
    let (c, g) = v
        .as_monomial()
        .ok_or_else(|| Error::Domain("expected a monomial value".into()))?;
    if !c.is_real() {
        return Err(Error::Domain("expected a real monomial coefficient".into()));
    }
    Ok((c.re, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{Ball, LocalFieldSpec};
    use num_bigint::BigInt;

    fn ctx() -> FieldContext {
        FieldContext::new(LocalFieldSpec::padic(3, 24), 1)
    }

    fn fint(ctx: &FieldContext, n: i64) -> FElem {
        FElem::from_integer(ctx, n)
    }

    fn t_pow(ctx: &FieldContext, e: i64) -> FElem {
        FElem::t_split(ctx, &GroupElement(vec![e]))
    }

    #[test]
    fn mn_lift_integral_is_haar() {
        let ctx = ctx();
        // indicator of M_2(O_K) integrates to 1
        let g = StepFn::indicator_ranked(BoxN::new(vec![Ball::unit(ctx.k); 4]), 1);
        let f = lift_to_mn(&ctx, &g).unwrap();
        assert!(mn_integral(&ctx, &f).unwrap().eq(&ctx.gv_one()));
    }

    #[test]
    fn gl_weight_units_unchanged() {
        let ctx = ctx();
        let cell = unit_det_cell(&ctx, 2).unwrap();
        let w = gl_weight(&ctx, &cell, 2).unwrap();
        // |det| = 1 on every box: the weight changes nothing
        assert!(w.haar_integral().eq(&cell.haar_integral()));
        // |GL_2(F_3)| = 48 of 81 depth-1 cells
        assert_eq!(cell.num_terms(), 48);
        let expect = GammaValue::from_rational(
            1,
            BigRational::new(BigInt::from(48), BigInt::from(81)),
        );
        assert!(cell.haar_integral().eq(&expect));
    }

    #[test]
    fn gl_weight_valuation_one_box() {
        let ctx = ctx();
        // the box of matrices congruent to diag(3,1) mod 9 with off-diagonal
        // zero mod 9: det has valuation 1 on it, weight = p^(N*v) = 9.
        let k = |n: i64| KElem::from_integer(ctx.k, n);
        let balls = vec![
            Ball::new(&k(3), 2).unwrap(),
            Ball::new(&k(0), 2).unwrap(),
            Ball::new(&k(0), 2).unwrap(),
            Ball::new(&k(1), 2).unwrap(),
        ];
        let g = StepFn::indicator_ranked(BoxN::new(balls), 1);
        let w = gl_weight(&ctx, &g, 2).unwrap();
        let expect = g.haar_integral().scale_rat(&BigRational::from_integer(BigInt::from(9)));
        assert!(w.haar_integral().eq(&expect));
    }

    #[test]
    fn gl_weight_degenerate_support_rejected() {
        let mut ctx = ctx();
        ctx.det_vmax = 1;
        // the zero-matrix box at depth 1 meets det valuation >= 2 > v_max
        let g = StepFn::indicator_ranked(
            BoxN::new(vec![Ball::new(&KElem::zero(ctx.k), 1).unwrap(); 4]),
            1,
        );
        assert!(matches!(gl_weight(&ctx, &g, 2), Err(Error::DepthLimit(_))));
    }

    #[test]
    fn gl_lift_unit_cell_measure() {
        let ctx = ctx();
        let cell = unit_det_cell(&ctx, 2).unwrap();
        let phi = lift_to_gl(&ctx, &cell, 2).unwrap();
        let expect = GammaValue::from_rational(
            1,
            BigRational::new(BigInt::from(48), BigInt::from(81)),
        );
        assert!(gl_integral(&ctx, &phi).unwrap().eq(&expect));
    }

    #[test]
    fn action_matrix_determinant_law() {
        let ctx = ctx();
        let sigma = FMatrix::from_rows(vec![
            vec![t_pow(&ctx, 1), fint(&ctx, 1)],
            vec![fint(&ctx, 3), fint(&ctx, 1)],
        ])
        .unwrap();
        for side in [Side::Right, Side::Left] {
            let r = action_matrix(&ctx, &sigma, side);
            let lhs = r.det_abs(&ctx).unwrap();
            let rhs = sigma.det_abs(&ctx).unwrap().pow(2).unwrap();
            assert!(lhs.eq(&rhs));
        }
    }

    #[test]
    fn translation_invariance() {
        let ctx = ctx();
        let cell = unit_det_cell(&ctx, 2).unwrap();
        let phi = lift_to_gl(&ctx, &cell, 2).unwrap();
        let base = gl_integral(&ctx, &phi).unwrap();
        let sigma = FMatrix::from_rows(vec![
            vec![t_pow(&ctx, -1), fint(&ctx, 2)],
            vec![fint(&ctx, 0), fint(&ctx, 3)],
        ])
        .unwrap();
        for side in [Side::Right, Side::Left] {
            let tr = gl_translate(&ctx, &phi, &sigma, side).unwrap();
            let v = gl_integral(&ctx, &tr).unwrap();
            assert!(v.eq(&base), "side {}: {} vs {}", side, v, base);
        }
        // identity translate leaves the function itself unchanged
        let id = FMatrix::identity(&ctx, 2);
        let tr = gl_translate(&ctx, &phi, &id, Side::Right).unwrap();
        assert!(gl_integral(&ctx, &tr).unwrap().eq(&base));
    }
}
