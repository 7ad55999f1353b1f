//! Seeded random generators for engine objects. Deterministic: the same
//! seed always yields the same objects, so randomized suites are
//! reproducible byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gamma::{GammaValue, GroupElement};
use crate::lift::{lift, AffineImageTerm, FFunction, LiftedTerm};
use crate::local::{Ball, KElem};
use crate::matrix::FMatrix;
use crate::qi::GaussianRational;
use crate::stepfn::{BoxN, StepFn};
use crate::valued::{FElem, FieldContext};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn gen_range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// A ball of depth in [min_depth, max_depth] with a short random centre.
    pub fn ball(&mut self, ctx: &FieldContext, min_depth: i64, max_depth: i64) -> Ball {
        let depth = self.rng.gen_range(min_depth..=max_depth);
        let lo = depth - self.rng.gen_range(1..=3);
        let len = (depth - lo) as usize;
        let digits: Vec<u32> = (0..len).map(|_| self.rng.gen_range(0..ctx.k.p)).collect();
        let center = KElem::from_digit_value(ctx.k, lo, &digits);
        Ball::new(&center, depth).expect("exact centre")
    }

    pub fn box_n(&mut self, ctx: &FieldContext, n: usize, max_depth: i64) -> BoxN {
        BoxN::new((0..n).map(|_| self.ball(ctx, 0, max_depth)).collect())
    }

    /// A small Gaussian-rational times X^k coefficient.
    pub fn gv_coeff(&mut self, ctx: &FieldContext) -> GammaValue {
        let num = self.rng.gen_range(-3i64..=3);
        let num = if num == 0 { 1 } else { num };
        let den = self.rng.gen_range(1i64..=3);
        let mut g = vec![0i64; ctx.rank];
        g[0] = self.rng.gen_range(-2..=2);
        GammaValue::monomial(GaussianRational::from_ratio(num, den), GroupElement(g))
    }

    /// A step function with up to `terms` boxes of depth at most max_depth.
    pub fn step_fn(&mut self, ctx: &FieldContext, n: usize, terms: usize, max_depth: i64) -> StepFn {
        let mut f = StepFn::zero(n);
        let count = self.rng.gen_range(1..=terms);
        for _ in 0..count {
            let b = self.box_n(ctx, n, max_depth);
            let c = self.gv_coeff(ctx);
            f = f
                .add(&StepFn::indicator_ranked(b, ctx.rank).scale(&c))
                .expect("same dimension");
        }
        f
    }

    /// A group element with entries in [lo, hi].
    pub fn gamma(&mut self, ctx: &FieldContext, lo: i64, hi: i64) -> GroupElement {
        GroupElement((0..ctx.rank).map(|_| self.rng.gen_range(lo..=hi)).collect())
    }

    /// An exact element of F: a short Laurent polynomial with integer
    /// coefficients and exponents in [vmin, vmax]. Never exactly zero when
    /// `nonzero` is set.
    pub fn felem(&mut self, ctx: &FieldContext, vmin: i64, vmax: i64, nonzero: bool) -> FElem {
        loop {
            let mut acc = FElem::zero();
            let terms = self.rng.gen_range(1..=3);
            for _ in 0..terms {
                let mut g = vec![0i64; ctx.rank];
                g[0] = self.rng.gen_range(vmin..=vmax);
                let c = self.rng.gen_range(-(ctx.k.p as i64)..=(ctx.k.p as i64));
                acc = acc.add(&FElem::monomial(
                    KElem::from_integer(ctx.k, c),
                    GroupElement(g),
                ));
            }
            if !nonzero || !acc.is_exact_zero() {
                return acc;
            }
        }
    }

    /// An invertible matrix over F with entry valuations in [vmin, vmax];
    /// resamples until the determinant is known nonzero.
    pub fn fmatrix_invertible(&mut self, ctx: &FieldContext, n: usize, vmin: i64, vmax: i64) -> FMatrix {
        loop {
            let rows: Vec<Vec<FElem>> = (0..n)
                .map(|_| (0..n).map(|_| self.felem(ctx, vmin, vmax, false)).collect())
                .collect();
            let m = FMatrix::from_rows(rows).expect("square");
            if !m.det().is_exact_zero() {
                return m;
            }
        }
    }

    /// A unipotent upper-triangular matrix with entry valuations in
    /// [vmin, vmax].
    pub fn unipotent(&mut self, ctx: &FieldContext, n: usize, vmin: i64, vmax: i64) -> FMatrix {
        let mut m = FMatrix::identity(ctx, n);
        for i in 0..n {
            for j in (i + 1)..n {
                if self.rng.gen_bool(0.7) {
                    m.set(i, j, self.felem(ctx, vmin, vmax, false));
                }
            }
        }
        m
    }

    /// A random lifted term with small support and lift data.
    pub fn lifted_term(&mut self, ctx: &FieldContext, n: usize, max_depth: i64) -> LiftedTerm {
        let g = self.step_fn(ctx, n, 2, max_depth);
        let a: Vec<FElem> = (0..n).map(|_| self.felem(ctx, -2, 2, false)).collect();
        let gamma: Vec<GroupElement> = (0..n).map(|_| self.gamma(ctx, -2, 2)).collect();
        lift(ctx, g, a, gamma).expect("dimensions agree")
    }

    /// A random member of the integrable class: a lifted term composed with
    /// an invertible affine substitution.
    pub fn ffunction(&mut self, ctx: &FieldContext, n: usize, vmin: i64, vmax: i64) -> FFunction {
        let base = self.lifted_term(ctx, n, 1);
        let tau = self.fmatrix_invertible(ctx, n, vmin, vmax);
        let shift: Vec<FElem> = (0..n).map(|_| self.felem(ctx, vmin, vmax, false)).collect();
        FFunction::from_term(AffineImageTerm { base, tau, shift })
    }
}
