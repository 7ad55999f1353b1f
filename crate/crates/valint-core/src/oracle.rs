//! Independent verification oracles.
//!
//! Everything here recomputes quantities of the engine by brute force or by
//! direct coset analysis, sharing none of the rewriting machinery it is used
//! to check. The test suites and the script runner's `check random`
//! statement are the only consumers; engine results never depend on this
//! module.

use num_rational::BigRational;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gamma::{GammaValue, GroupElement};
use crate::lift::AffineImageTerm;
use crate::local::KElem;
use crate::stepfn::StepFn;
use crate::valued::{FElem, FieldContext};

/// Brute-force Haar integral of a step function: refine the plane to depth
/// m, sample the function at every coset representative meeting the
/// support, and sum p^(-m n) * value. Requires m at least the deepest box
/// depth.
pub fn enum_integral(ctx: &FieldContext, f: &StepFn, m: i64) -> Result<GammaValue> {
    let n = f.dim();
    if n == 0 {
        return f.eval(&[]);
    }
    let spec = ctx.k;
    // collect the depth-m representatives refined from every support box
    let mut reps: BTreeSet<Vec<(i64, Vec<u32>)>> = BTreeSet::new();
    let mut count: u128 = 0;
    for (bx, _) in f.terms() {
        for ball in &bx.balls {
            if ball.depth() > m {
                return Err(Error::Domain(format!(
                    "enumeration depth {} above box depth {}",
                    m,
                    ball.depth()
                )));
            }
        }
        let depths = vec![m; n];
        for sub in bx.refine(&depths)? {
            count += 1;
            if count > ctx.depth_limit as u128 {
                return Err(Error::DepthLimit("enumeration oracle over limit".into()));
            }
            let key: Vec<(i64, Vec<u32>)> = sub
                .balls
                .iter()
                .map(|b| b.center().finite_digits(m))
                .collect();
            reps.insert(key);
        }
    }
    let cell = ctx.k.p_pow(-m * n as i64);
    let mut acc = GammaValue::zero(ctx.rank);
    for key in reps {
        let point: Vec<KElem> = key
            .iter()
            .map(|(v, d)| KElem::from_digit_value(spec, *v, d))
            .collect();
        let val = f.eval(&point)?;
        acc = acc.add(&val.scale_rat(&cell));
    }
    Ok(acc)
}

/// Exact integral over K of v -> g(dir * v + base) by direct coset
/// intersection. Requires dir nonzero.
pub fn line_integral(
    ctx: &FieldContext,
    g: &StepFn,
    dir: &[KElem],
    base: &[KElem],
) -> Result<GammaValue> {
    let n = g.dim();
    if dir.len() != n || base.len() != n {
        return Err(Error::Dimension { expected: n, got: dir.len().min(base.len()) });
    }
    if dir.iter().all(|d| d.is_exact_zero()) {
        return Err(Error::Domain("line integral needs a nonzero direction".into()));
    }
    let mut acc = GammaValue::zero(ctx.rank);
    'terms: for (bx, coeff) in g.terms() {
        // intersect the per-coordinate constraints on v
        let mut coset: Option<(KElem, i64)> = None;
        for (i, ball) in bx.balls.iter().enumerate() {
            if dir[i].is_exact_zero() {
                if !ball.member(&base[i])? {
                    continue 'terms;
                }
                continue;
            }
            let vi = dir[i].val_finite()?;
            let center = ball.center().sub(&base[i]).div(&dir[i])?;
            let depth = ball.depth() - vi;
            coset = match coset {
                None => Some((center, depth)),
                Some((c0, d0)) => {
                    let (ca, da, cb, db) = if d0 <= depth {
                        (c0, d0, center, depth)
                    } else {
                        (center, depth, c0, d0)
                    };
                    let diff = cb.sub(&ca);
                    let inside = if diff.is_exact_zero() {
                        true
                    } else {
                        diff.val_finite()? >= da
                    };
                    if !inside {
                        continue 'terms;
                    }
                    Some((cb, db))
                }
            };
        }
        let (_, depth) = coset.expect("some nonzero direction");
        acc = acc.add(&coeff.scale_rat(&ctx.k.p_pow(-depth)));
    }
    Ok(acc)
}

/// Direct one-variable integral of the section of an affine-image term at
/// the remaining coordinates `x_rest` (coordinate r is 1-indexed). Computes
/// the support coset of the section in F by intersecting the per-coordinate
/// coset conditions, then reduces to a residue-level line integral. Shares
/// nothing with the partial-integration rewriting.
pub fn direct_section_integral(
    ctx: &FieldContext,
    term: &AffineImageTerm,
    x_rest: &[FElem],
    r: usize,
) -> Result<GammaValue> {
    let n = term.dim();
    if x_rest.len() != n - 1 {
        return Err(Error::Dimension { expected: n - 1, got: x_rest.len() });
    }
    let ri = r - 1;
    // column of tau at the integrated coordinate, and the affine constant
    let p_col: Vec<FElem> = (0..n).map(|i| term.tau.get(i, ri).clone()).collect();
    let mut x_embed = Vec::with_capacity(n);
    let mut it = x_rest.iter();
    for i in 0..n {
        if i == ri {
            x_embed.push(FElem::zero());
        } else {
            x_embed.push(it.next().unwrap().clone());
        }
    }
    let mut q = term.tau.matvec(&x_embed);
    for (qi, s) in q.iter_mut().zip(&term.shift) {
        *qi = qi.add(s);
    }

    // intersect { v : p_i v + q_i in a_i + t(gamma_i) O_F }
    let mut coset: Option<(FElem, GroupElement)> = None;
    for i in 0..n {
        let ai = &term.base.a[i];
        let gi = &term.base.gamma[i];
        if p_col[i].is_exact_zero() {
            if !q[i].sub(ai).nu_at_least(gi)? {
                return Ok(ctx.gv_zero());
            }
            continue;
        }
        let vi = p_col[i].nu_finite()?;
        let center = ai.sub(&q[i]).div(ctx, &p_col[i])?;
        let depth = gi.sub(&vi);
        coset = match coset {
            None => Some((center, depth)),
            Some((c0, d0)) => {
                let (ca, da, cb, db) = if d0 <= depth {
                    (c0, d0, center, depth)
                } else {
                    (center, depth, c0, d0)
                };
                if !cb.sub(&ca).nu_at_least(&da)? {
                    return Ok(ctx.gv_zero());
                }
                Some((cb, db))
            }
        };
    }
    let (c_star, m_star) = coset.ok_or_else(|| {
        Error::SingularMatrix("integrated coordinate has a zero column".into())
    })?;

    // residue-level direction and base point:
    // u_i(v) = rho(p_i t(m*-gamma_i)) * rho(xi) + rho((p_i c* + q_i - a_i) t(-gamma_i))
    let mut dir = Vec::with_capacity(n);
    let mut base = Vec::with_capacity(n);
    for i in 0..n {
        let gi = &term.base.gamma[i];
        let shift = m_star.sub(gi);
        let d = p_col[i].shift_t(&shift);
        dir.push(d.residue(ctx)?);
        let cst = p_col[i]
            .mul(&c_star)
            .add(&q[i])
            .sub(&term.base.a[i])
            .shift_t(&gi.neg());
        base.push(cst.residue(ctx)?);
    }
    let line = line_integral(ctx, &term.base.g, &dir, &base)?;
    Ok(term
        .base
        .coeff
        .mul(&GammaValue::x_power(m_star))
        .mul(&line))
}

/// Number of invertible n x n matrices over F_p by brute force.
pub fn count_invertible(p: u32, n_size: usize) -> u64 {
    let n = n_size * n_size;
    let total = (p as u64).pow(n as u32);
    let mut count = 0u64;
    for code in 0..total {
        let mut digits = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            digits.push((c % p as u64) as i64);
            c /= p as u64;
        }
        if det_mod_p(p, n_size, &digits) != 0 {
            count += 1;
        }
    }
    count
}

fn det_mod_p(p: u32, n: usize, entries: &[i64]) -> i64 {
    fn rec(p: i64, n: usize, get: &dyn Fn(usize, usize) -> i64) -> i64 {
        if n == 1 {
            return get(0, 0).rem_euclid(p);
        }
        let mut acc = 0i64;
        for j in 0..n {
            let minor = rec(p, n - 1, &|r, c| get(r + 1, if c < j { c } else { c + 1 }));
            let term = get(0, j) * minor % p;
            acc = if j % 2 == 0 { acc + term } else { acc - term };
            acc = acc.rem_euclid(p);
        }
        acc
    }
    rec(p as i64, n, &|i, j| entries[i * n + j])
}

/// Residue-level Haar integral over GL_N(K) of g with the measure
/// |det x|^(-N) d_M x, by depth-m coset enumeration. Independent of
/// `gl_weight`: the determinant is taken at each representative directly.
/// Every representative in the support must have determinant valuation
/// strictly below m.
pub fn gl_haar_enum(
    ctx: &FieldContext,
    g: &StepFn,
    n_size: usize,
    m: i64,
) -> Result<GammaValue> {
    let coords = crate::glfn::MatrixCoords::new(n_size);
    let n = coords.dim();
    if g.dim() != n {
        return Err(Error::Dimension { expected: n, got: g.dim() });
    }
    let spec = ctx.k;
    let mut reps: BTreeSet<Vec<(i64, Vec<u32>)>> = BTreeSet::new();
    for (bx, _) in g.terms() {
        let depths = vec![m; n];
        for sub in bx.refine(&depths)? {
            let key: Vec<(i64, Vec<u32>)> = sub
                .balls
                .iter()
                .map(|b| b.center().finite_digits(m))
                .collect();
            reps.insert(key);
        }
    }
    let cell = ctx.k.p_pow(-m * n as i64);
    let mut acc = GammaValue::zero(ctx.rank);
    for key in reps {
        let point: Vec<KElem> = key
            .iter()
            .map(|(v, d)| KElem::from_digit_value(spec, *v, d))
            .collect();
        let val = g.eval(&point)?;
        if val.is_zero() {
            continue;
        }
        let det = coords.to_k_matrix(&point)?.det();
        if det.is_exact_zero() {
            return Err(Error::Domain(
                "support representative with zero determinant".into(),
            ));
        }
        let v = det.val_finite()?;
        if v >= m {
            return Err(Error::PrecisionExhausted(format!(
                "determinant valuation {} not resolved at enumeration depth {}",
                v, m
            )));
        }
        let weight: BigRational = ctx.k.p_pow(n_size as i64 * v);
        acc = acc.add(&val.scale_rat(&(cell.clone() * weight)));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{Ball, LocalFieldSpec};
    use crate::stepfn::BoxN;

    fn ctx() -> FieldContext {
        FieldContext::new(LocalFieldSpec::padic(3, 24), 1)
    }

    #[test]
    fn enum_matches_haar() {
        let ctx = ctx();
        let k = |n: i64| KElem::from_integer(ctx.k, n);
        let b = BoxN::new(vec![Ball::unit(ctx.k), Ball::new(&k(1), 1).unwrap()]);
        let f = StepFn::indicator_ranked(b, 1)
            .add(&StepFn::indicator_ranked(
                BoxN::new(vec![Ball::new(&k(0), 1).unwrap(), Ball::unit(ctx.k)]),
                1,
            ))
            .unwrap();
        for m in [1, 2] {
            let lhs = enum_integral(&ctx, &f, m).unwrap();
            assert!(lhs.eq(&f.haar_integral()));
        }
    }

    #[test]
    fn line_integral_diagonal_case() {
        let ctx = ctx();
        // g = indicator(O^2); v -> g(v, v - 1): measure of O intersect 1+O = 0?
        // 1 is in O, so the constraint is v in O and v in 1 + O = O: measure 1.
        let g = StepFn::indicator_ranked(BoxN::new(vec![Ball::unit(ctx.k); 2]), 1);
        let one = KElem::one(ctx.k);
        let val = line_integral(
            &ctx,
            &g,
            &[one.clone(), one.clone()],
            &[KElem::zero(ctx.k), KElem::from_integer(ctx.k, -1)],
        )
        .unwrap();
        assert!(val.eq(&GammaValue::one(1)));
        // shifted out of reach: base (1/3, 0) along direction (0, 1)
        let third = KElem::from_rational(
            ctx.k,
            num_rational::BigRational::new(num_bigint::BigInt::from(1), num_bigint::BigInt::from(3)),
        );
        let val2 = line_integral(&ctx, &g, &[KElem::zero(ctx.k), one], &[third, KElem::zero(ctx.k)])
            .unwrap();
        assert!(val2.is_zero());
    }

    #[test]
    fn gl2_f3_count() {
        assert_eq!(count_invertible(3, 2), 48);
        assert_eq!(count_invertible(2, 2), 6);
    }
}
