//! The computable Schwartz-Bruhat class on K^n: C(Gamma)-weighted sums of
//! indicator functions of boxes (products of balls), with exact Haar
//! integration, sections, partial integrals, and affine change of variables.
//!
//! Semantics of a `StepFn` is always the pointwise sum of
//! coefficient * indicator(box); overlapping terms are allowed and resolved
//! by `canonicalize`, which refines to per-coordinate common depth.

use num_rational::BigRational;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gamma::GammaValue;
use crate::local::{Ball, KElem, LocalFieldSpec};
use crate::matrix::KMatrix;
use crate::valued::FieldContext;

/// A product of n balls: the basic box in K^n. Dimension 0 (empty product)
/// is the one-point space with measure 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BoxN {
    pub balls: Vec<Ball>,
}

impl BoxN {
    pub fn new(balls: Vec<Ball>) -> Self {
        BoxN { balls }
    }

    pub fn dim(&self) -> usize {
        self.balls.len()
    }

    pub fn measure(&self, spec: LocalFieldSpec) -> BigRational {
        let mut m = BigRational::one();
        for b in &self.balls {
            m *= b.measure();
        }
        let _ = spec;
        m
    }

    pub fn member(&self, u: &[KElem]) -> Result<bool> {
        if u.len() != self.balls.len() {
            return Err(Error::Dimension { expected: self.balls.len(), got: u.len() });
        }
        for (b, x) in self.balls.iter().zip(u) {
            if !b.member(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Splits every coordinate ball to the given per-coordinate depths,
    /// producing the grid of sub-boxes.
    pub fn refine(&self, depths: &[i64]) -> Result<Vec<BoxN>> {
        let mut grids: Vec<Vec<Ball>> = Vec::with_capacity(self.balls.len());
        for (b, &d) in self.balls.iter().zip(depths) {
            grids.push(b.split(d)?);
        }
        let mut out = vec![Vec::new()];
        for grid in &grids {
            let mut next = Vec::with_capacity(out.len() * grid.len());
            for prefix in &out {
                for b in grid {
                    let mut v = prefix.clone();
                    v.push(b.clone());
                    next.push(v);
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(BoxN::new).collect())
    }
}

impl fmt::Display for BoxN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.balls.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A finite GammaValue-weighted sum of box indicators on K^n.
#[derive(Debug, Clone)]
pub struct StepFn {
    dim: usize,
    terms: Vec<(BoxN, GammaValue)>,
}

impl StepFn {
    pub fn zero(dim: usize) -> Self {
        StepFn { dim, terms: Vec::new() }
    }

    pub fn indicator(b: BoxN) -> Self {
        let dim = b.dim();
        let rank_one = GammaValue::one(1);
        let _ = rank_one;
        StepFn { dim, terms: vec![(b, GammaValue::one(1))] }
    }

    /// Indicator with an explicit coefficient rank (the session rank).
    pub fn indicator_ranked(b: BoxN, rank: usize) -> Self {
        let dim = b.dim();
        StepFn { dim, terms: vec![(b, GammaValue::one(rank))] }
    }

    pub fn from_terms(dim: usize, terms: Vec<(BoxN, GammaValue)>) -> Result<Self> {
        for (b, _) in &terms {
            if b.dim() != dim {
                return Err(Error::Dimension { expected: dim, got: b.dim() });
            }
        }
        Ok(StepFn { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(BoxN, GammaValue)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension { expected: self.dim, got: other.dim });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(StepFn { dim: self.dim, terms })
    }

    pub fn scale(&self, c: &GammaValue) -> Self {
        if c.is_zero() {
            return StepFn::zero(self.dim);
        }
        StepFn {
            dim: self.dim,
            terms: self.terms.iter().map(|(b, k)| (b.clone(), k.mul(c))).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        StepFn {
            dim: self.dim,
            terms: self.terms.iter().map(|(b, k)| (b.clone(), k.neg())).collect(),
        }
    }

    /// Pointwise value at u: the sum of coefficients of boxes containing u.
    pub fn eval(&self, u: &[KElem]) -> Result<GammaValue> {
        if u.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: u.len() });
        }
        let rank = self.rank();
        let mut acc = GammaValue::zero(rank);
        for (b, c) in &self.terms {
            if b.member(u)? {
                acc = acc.add(c);
            }
        }
        Ok(acc)
    }

    fn rank(&self) -> usize {
        self.terms.first().map(|(_, c)| c.rank()).unwrap_or(1)
    }

    /// Exact Haar integral: sum of coefficient * product of ball measures.
    pub fn haar_integral(&self) -> GammaValue {
        let rank = self.rank();
        let mut acc = GammaValue::zero(rank);
        for (b, c) in &self.terms {
            let spec = b.balls.first().map(|x| x.spec());
            let m = match spec {
                Some(s) => b.measure(s),
                None => BigRational::one(),
            };
            acc = acc.add(&c.scale_rat(&m));
        }
        acc
    }

    /// Canonical form: pairwise-disjoint boxes of per-coordinate common
    /// depth, no zero coefficients, deterministic order.
    pub fn canonicalize(&self, ctx: &FieldContext) -> Result<Self> {
        if self.terms.is_empty() {
            return Ok(StepFn::zero(self.dim));
        }
        if self.dim == 0 {
            // one-point space: single coefficient
            let mut acc = GammaValue::zero(self.rank());
            for (_, c) in &self.terms {
                acc = acc.add(c);
            }
            let terms = if acc.is_zero() { Vec::new() } else { vec![(BoxN::new(Vec::new()), acc)] };
            return Ok(StepFn { dim: 0, terms });
        }
        let mut depths = vec![i64::MIN; self.dim];
        for (b, _) in &self.terms {
            for (i, ball) in b.balls.iter().enumerate() {
                depths[i] = depths[i].max(ball.depth());
            }
        }
        // enforce the enumeration limit
        let mut total: u128 = 0;
        for (b, _) in &self.terms {
            let mut cnt: u128 = 1;
            for (i, ball) in b.balls.iter().enumerate() {
                let w = (depths[i] - ball.depth()) as u32;
                cnt = cnt.saturating_mul((ball.spec().p as u128).saturating_pow(w));
            }
            total = total.saturating_add(cnt);
        }
        if total > ctx.depth_limit as u128 {
            return Err(Error::DepthLimit(format!(
                "canonicalization would enumerate {} boxes (limit {})",
                total, ctx.depth_limit
            )));
        }
        let mut acc: BTreeMap<BoxN, GammaValue> = BTreeMap::new();
        for (b, c) in &self.terms {
            for sub in b.refine(&depths)? {
                match acc.get_mut(&sub) {
                    Some(e) => *e = e.add(c),
                    None => {
                        acc.insert(sub, c.clone());
                    }
                }
            }
        }
        let terms: Vec<(BoxN, GammaValue)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(StepFn { dim: self.dim, terms })
    }

    /// True when the canonical form is the zero function.
    pub fn is_zero_fn(&self, ctx: &FieldContext) -> Result<bool> {
        Ok(self.canonicalize(ctx)?.terms.is_empty())
    }

    /// Pointwise equality via canonical forms.
    pub fn eq_canonical(&self, ctx: &FieldContext, other: &Self) -> Result<bool> {
        Ok(self.sub_fn(other)?.is_zero_fn(ctx)?)
    }

    pub fn sub_fn(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// The section u -> f(u with v inserted at coordinate r) (1-indexed r).
    pub fn section(&self, r: usize, v: &KElem) -> Result<StepFn> {
        if r == 0 || r > self.dim {
            return Err(Error::Domain(format!("section coordinate {} out of range", r)));
        }
        let mut terms = Vec::new();
        for (b, c) in &self.terms {
            if b.balls[r - 1].member(v)? {
                let mut balls = b.balls.clone();
                balls.remove(r - 1);
                terms.push((BoxN::new(balls), c.clone()));
            }
        }
        Ok(StepFn { dim: self.dim - 1, terms })
    }

    /// Exact fiberwise Haar integral along coordinate r (1-indexed).
    pub fn partial_integral(&self, r: usize) -> Result<StepFn> {
        if r == 0 || r > self.dim {
            return Err(Error::Domain(format!("integration coordinate {} out of range", r)));
        }
        let mut terms = Vec::new();
        for (b, c) in &self.terms {
            let m = b.balls[r - 1].measure();
            let mut balls = b.balls.clone();
            balls.remove(r - 1);
            terms.push((BoxN::new(balls), c.scale_rat(&m)));
        }
        Ok(StepFn { dim: self.dim - 1, terms })
    }

    /// Reorders coordinates: result(u_1..u_n) = self(u_perm[0], ..,
    /// u_perm[n-1]), i.e. coordinate i of the result box is ball
    /// perm.position(i)... Concretely: result ball at position j is the
    /// input ball at position perm[j].
    pub fn permute(&self, perm: &[usize]) -> Result<StepFn> {
        if perm.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: perm.len() });
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (b, c) in &self.terms {
            let balls: Vec<Ball> = perm.iter().map(|&j| b.balls[j].clone()).collect();
            terms.push((BoxN::new(balls), c.clone()));
        }
        Ok(StepFn { dim: self.dim, terms })
    }

    /// The pullback u -> f(A u + b) for A invertible over K.
    ///
    /// Exact algorithm: for each support box, the preimage is a coset of the
    /// lattice A^{-1} D O^n; a uniform depth m with pi^m O^n inside the
    /// lattice makes the preimage an exact union of depth-m boxes, which are
    /// enumerated inside a bounding box and membership-tested at centres.
    pub fn affine_pullback(&self, ctx: &FieldContext, a: &KMatrix, b: &[KElem]) -> Result<StepFn> {
        let n = self.dim;
        if a.n() != n {
            return Err(Error::Dimension { expected: n, got: a.n() });
        }
        if b.len() != n {
            return Err(Error::Dimension { expected: n, got: b.len() });
        }
        if n == 0 {
            return Ok(self.clone());
        }
        let spec = ctx.k;

        // Fast path: translation by b only.
        if a.is_identity() {
            let mut terms = Vec::with_capacity(self.terms.len());
            for (bx, c) in &self.terms {
                let mut balls = Vec::with_capacity(n);
                for (i, ball) in bx.balls.iter().enumerate() {
                    let center = ball.center().sub(&b[i]);
                    balls.push(Ball::new(&center, ball.depth())?);
                }
                terms.push((BoxN::new(balls), c.clone()));
            }
            return Ok(StepFn { dim: n, terms });
        }

        // Fast path: diagonal A (per-coordinate affine maps).
        if a.is_diagonal() {
            let mut terms = Vec::with_capacity(self.terms.len());
            for (bx, c) in &self.terms {
                let mut balls = Vec::with_capacity(n);
                for (i, ball) in bx.balls.iter().enumerate() {
                    let aii = a.get(i, i);
                    let v = aii.val_finite().map_err(|_| {
                        Error::SingularMatrix("diagonal pullback with zero entry".into())
                    })?;
                    // a_ii u + b_i in Ball(c_i, d) <=> u in Ball((c_i-b_i)/a_ii, d - v)
                    let center = ball.center().sub(&b[i]).div(aii)?;
                    balls.push(Ball::new(&center, ball.depth() - v)?);
                }
                terms.push((BoxN::new(balls), c.clone()));
            }
            return Ok(StepFn { dim: n, terms });
        }

        let a_inv = a.inverse()?;
        let sigma_a = a.min_entry_val()?;
        let sigma_inv = a_inv.min_entry_val()?;

        let mut out_terms: Vec<(BoxN, GammaValue)> = Vec::new();
        let mut enumerated: u128 = 0;
        for (bx, coeff) in &self.terms {
            let dmax = bx.balls.iter().map(|x| x.depth()).max().unwrap();
            let dmin = bx.balls.iter().map(|x| x.depth()).min().unwrap();
            // pi^m O^n lies inside A^{-1} D O^n once m + sigma(A) >= dmax
            let m = dmax - sigma_a.min(0);
            // the preimage lies inside x0 + pi^kappa O^n
            let kappa = dmin + sigma_inv.min(0);
            let width = (m - kappa).max(0) as u32;
            let count = (spec.p as u128)
                .checked_pow(width.saturating_mul(n as u32))
                .ok_or_else(|| Error::DepthLimit("pullback coset count overflows".into()))?;
            enumerated = enumerated.saturating_add(count);
            if enumerated > ctx.depth_limit as u128 {
                return Err(Error::DepthLimit(format!(
                    "pullback would enumerate more than {} cosets",
                    ctx.depth_limit
                )));
            }
            // x0 = A^{-1} (center - b)
            let rhs: Vec<KElem> = bx
                .balls
                .iter()
                .zip(b)
                .map(|(ball, bi)| ball.center().sub(bi))
                .collect();
            let x0 = a_inv.matvec(&rhs);

            // enumerate candidate centres x0 + digit offsets in [kappa, m)
            let mut counters = vec![0u64; n];
            let per_coord = (spec.p as u64).pow(width);
            loop {
                let mut u = Vec::with_capacity(n);
                for (i, &cnt) in counters.iter().enumerate() {
                    let mut digits = Vec::with_capacity(width as usize);
                    let mut jj = cnt;
                    for _ in 0..width {
                        digits.push((jj % spec.p as u64) as u32);
                        jj /= spec.p as u64;
                    }
                    let offset = KElem::from_digit_value(spec, kappa, &digits);
                    u.push(x0[i].add(&offset).truncate_to(m)?);
                }
                // test A u + b in box
                let au = a.matvec(&u);
                let mut ok = true;
                for (i, ball) in bx.balls.iter().enumerate() {
                    if !ball.member(&au[i].add(&b[i]))? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    let balls: Vec<Ball> =
                        u.iter().map(|c| Ball::new(c, m)).collect::<Result<_>>()?;
                    out_terms.push((BoxN::new(balls), coeff.clone()));
                }
                // increment the counter vector
                let mut idx = 0;
                loop {
                    if idx == n {
                        break;
                    }
                    counters[idx] += 1;
                    if counters[idx] < per_coord {
                        break;
                    }
                    counters[idx] = 0;
                    idx += 1;
                }
                if idx == n {
                    break;
                }
            }
        }
        let result = StepFn { dim: n, terms: out_terms };
        // merge duplicate boxes for compactness (exact, no refinement)
        let mut acc: BTreeMap<BoxN, GammaValue> = BTreeMap::new();
        for (bx, c) in result.terms {
            match acc.get_mut(&bx) {
                Some(e) => *e = e.add(&c),
                None => {
                    acc.insert(bx, c);
                }
            }
        }
        Ok(StepFn {
            dim: n,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }
}

impl fmt::Display for StepFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(b, c)| format!("({}) * indicator({})", c, b))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::KKind;
    use num_bigint::BigInt;

    fn ctx() -> FieldContext {
        FieldContext::new(LocalFieldSpec::padic(3, 24), 1)
    }

    fn k(ctx: &FieldContext, n: i64) -> KElem {
        KElem::from_integer(ctx.k, n)
    }

    fn unit_box(ctx: &FieldContext, n: usize) -> BoxN {
        BoxN::new(vec![Ball::unit(ctx.k); n])
    }

    fn gv_rat(num: i64, den: i64) -> GammaValue {
        GammaValue::from_rational(1, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    #[test]
    fn eval_indicator() {
        let ctx = ctx();
        let f = StepFn::indicator(unit_box(&ctx, 2));
        assert!(f.eval(&[k(&ctx, 0), k(&ctx, 0)]).unwrap().eq(&GammaValue::one(1)));
        let third = KElem::from_rational(
            ctx.k,
            BigRational::new(BigInt::from(1), BigInt::from(3)),
        );
        assert!(f.eval(&[third, k(&ctx, 0)]).unwrap().is_zero());
    }

    #[test]
    fn add_scale_cancel() {
        let ctx = ctx();
        let f = StepFn::indicator(unit_box(&ctx, 1));
        let g = f.add(&f.scale(&GammaValue::from_integer(1, -1))).unwrap();
        assert!(g.is_zero_fn(&ctx).unwrap());
    }

    #[test]
    fn canonicalize_overlapping() {
        let ctx = ctx();
        // indicator(O_K) + indicator(1+3O_K) over Q_3: three depth-1 boxes
        // with coefficients 1, 2, 1.
        let f = StepFn::indicator(unit_box(&ctx, 1));
        let b1 = Ball::new(&k(&ctx, 1), 1).unwrap();
        let g = f.add(&StepFn::indicator(BoxN::new(vec![b1]))).unwrap();
        let c = g.canonicalize(&ctx).unwrap();
        assert_eq!(c.num_terms(), 3);
        // pointwise oracle at depth-1 coset representatives
        for rep in 0..3i64 {
            let expect = if rep == 1 { 2 } else { 1 };
            let v = c.eval(&[k(&ctx, rep)]).unwrap();
            assert!(v.eq(&GammaValue::from_integer(1, expect)));
            let v0 = g.eval(&[k(&ctx, rep)]).unwrap();
            assert!(v.eq(&v0));
        }
        // idempotence
        let c2 = c.canonicalize(&ctx).unwrap();
        assert_eq!(c.terms().len(), c2.terms().len());
        for ((b1, c1), (b2, c2)) in c.terms().iter().zip(c2.terms()) {
            assert_eq!(b1, b2);
            assert!(c1.eq(c2));
        }
    }

    #[test]
    fn haar_integral_products() {
        let ctx = ctx();
        assert!(StepFn::indicator(unit_box(&ctx, 2)).haar_integral().eq(&GammaValue::one(1)));
        let b = BoxN::new(vec![
            Ball::new(&k(&ctx, 0), 1).unwrap(),
            Ball::new(&k(&ctx, 0), 2).unwrap(),
        ]);
        assert!(StepFn::indicator(b).haar_integral().eq(&gv_rat(1, 27)));
    }

    #[test]
    fn section_and_partial() {
        let ctx = ctx();
        let f = StepFn::indicator(unit_box(&ctx, 2));
        let s = f.section(1, &k(&ctx, 0)).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.eval(&[k(&ctx, 0)]).unwrap().eq(&GammaValue::one(1)));
        let third = KElem::from_rational(
            ctx.k,
            BigRational::new(BigInt::from(1), BigInt::from(3)),
        );
        let s2 = f.section(1, &third).unwrap();
        assert!(s2.is_zero_fn(&ctx).unwrap());

        let p = f.partial_integral(1).unwrap();
        assert_eq!(p.dim(), 1);
        assert!(p.eval(&[k(&ctx, 0)]).unwrap().eq(&GammaValue::one(1)));
        // order independence
        let p12 = f.partial_integral(1).unwrap().partial_integral(1).unwrap();
        let p21 = f.partial_integral(2).unwrap().partial_integral(1).unwrap();
        assert!(p12.haar_integral().eq(&p21.haar_integral()));
    }

    #[test]
    fn pullback_identity_and_translation() {
        let ctx = ctx();
        let f = StepFn::indicator(unit_box(&ctx, 2));
        let id = KMatrix::identity(ctx.k, 2);
        let g = f
            .affine_pullback(&ctx, &id, &[k(&ctx, 0), k(&ctx, 0)])
            .unwrap();
        assert!(g.eq_canonical(&ctx, &f).unwrap());
        // translation preserves the integral
        let g2 = f
            .affine_pullback(&ctx, &id, &[k(&ctx, 5), k(&ctx, -1)])
            .unwrap();
        assert!(g2.haar_integral().eq(&f.haar_integral()));
    }

    #[test]
    fn pullback_diagonal_scaling() {
        let ctx = ctx();
        // A = diag(3, 1) on indicator(O^2): integral of pullback = 3
        let f = StepFn::indicator(unit_box(&ctx, 2));
        let a = KMatrix::diagonal(vec![k(&ctx, 3), k(&ctx, 1)]);
        let g = f
            .affine_pullback(&ctx, &a, &[k(&ctx, 0), k(&ctx, 0)])
            .unwrap();
        assert!(g.haar_integral().eq(&GammaValue::from_integer(1, 3)));
    }

    #[test]
    fn pullback_rotation_preserves_unit_box() {
        let ctx = ctx();
        // [[0,1],[-1,0]] has determinant 1 and preserves the integral over O^2
        let f = StepFn::indicator(unit_box(&ctx, 2));
        let a = KMatrix::from_rows(vec![
            vec![k(&ctx, 0), k(&ctx, 1)],
            vec![k(&ctx, -1), k(&ctx, 0)],
        ])
        .unwrap();
        let g = f
            .affine_pullback(&ctx, &a, &[k(&ctx, 0), k(&ctx, 0)])
            .unwrap();
        assert!(g.haar_integral().eq(&f.haar_integral()));
        assert!(g.eq_canonical(&ctx, &f).unwrap());
    }

    #[test]
    fn pullback_general_det_law() {
        let ctx = ctx();
        // A = [[1, 1], [3, 1]] (det = -2, |det| = 1), box of depth (1, 0)
        let bx = BoxN::new(vec![
            Ball::new(&k(&ctx, 2), 1).unwrap(),
            Ball::unit(ctx.k),
        ]);
        let f = StepFn::indicator(bx);
        let a = KMatrix::from_rows(vec![
            vec![k(&ctx, 1), k(&ctx, 1)],
            vec![k(&ctx, 3), k(&ctx, 1)],
        ])
        .unwrap();
        let b = [k(&ctx, 1), k(&ctx, 2)];
        let g = f.affine_pullback(&ctx, &a, &b).unwrap();
        let det_abs = a.det().abs().unwrap();
        let expect = f.haar_integral().scale_rat(&det_abs.recip());
        assert!(g.haar_integral().eq(&expect));
        // spot-check pointwise: g(u) = f(Au + b) on a few points
        for x in [-1i64, 0, 1, 2, 3, 4] {
            for y in [-1i64, 0, 1, 2] {
                let u = [k(&ctx, x), k(&ctx, y)];
                let au = a.matvec(&u);
                let fu = f.eval(&[au[0].add(&b[0]), au[1].add(&b[1])]).unwrap();
                let gu = g.eval(&u).unwrap();
                assert!(fu.eq(&gu));
            }
        }
    }

    #[test]
    fn laurent_field_smoke() {
        let ctx = FieldContext::new(LocalFieldSpec::laurent_ff(2, 24), 1);
        assert_eq!(ctx.k.kind, KKind::LaurentFF);
        let f = StepFn::indicator(BoxN::new(vec![Ball::unit(ctx.k); 2]));
        assert!(f.haar_integral().eq(&GammaValue::one(1)));
        let u = KElem::uniformizer(ctx.k);
        let a = KMatrix::diagonal(vec![u.clone(), KElem::one(ctx.k)]);
        let g = f
            .affine_pullback(&ctx, &a, &[KElem::zero(ctx.k), KElem::zero(ctx.k)])
            .unwrap();
        assert!(g.haar_integral().eq(&GammaValue::from_integer(1, 2)));
    }
}
