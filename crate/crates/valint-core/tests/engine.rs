//! Randomized differential tests: the rewriting engine against independent
//! oracles (direct coset analysis, brute-force enumeration, closed forms).

use valint_core::gamma::{GammaValue, GroupElement};
use valint_core::lift::{lift, permutations, FFunction};
use valint_core::local::LocalFieldSpec;
use valint_core::matrix::FMatrix;
use valint_core::oracle;
use valint_core::sample::Sampler;
use valint_core::stepfn::StepFn;
use valint_core::valued::{FElem, FieldContext};

fn ctx_q3() -> FieldContext {
    FieldContext::new(LocalFieldSpec::padic(3, 24), 1)
}

fn ctx_f2() -> FieldContext {
    FieldContext::new(LocalFieldSpec::laurent_ff(2, 24), 1)
}

#[test]
fn repeated_equals_closed_form_random() {
    for (ctx, seed) in [(ctx_q3(), 11u64), (ctx_f2(), 12)] {
        let mut s = Sampler::new(seed);
        for n in 1..=3usize {
            let cases = if n == 3 { 6 } else { 12 };
            for _ in 0..cases {
                let f = s.ffunction(&ctx, n, -1, 1);
                let closed = f.integral_closed_form(&ctx).expect("closed form");
                for order in permutations(n) {
                    let v = f.repeated_integral(&ctx, &order).expect("repeated integral");
                    assert!(
                        v.eq(&closed),
                        "order {:?}: {} vs closed {}",
                        order,
                        v,
                        closed
                    );
                }
            }
        }
    }
}

#[test]
fn partial_integral_matches_section_oracle() {
    // Pointwise: the rewritten partial integral evaluated at sample points
    // equals the direct one-variable section integral.
    let ctx = ctx_q3();
    let mut s = Sampler::new(23);
    for n in 2..=3usize {
        for _case in 0..8 {
            let f = s.ffunction(&ctx, n, -1, 1);
            let term = &f.terms()[0];
            for r in 1..=n {
                let p = f.partial_integral(&ctx, r).expect("partial integral");
                for _probe in 0..6 {
                    let x_rest: Vec<FElem> =
                        (0..n - 1).map(|_| s.felem(&ctx, -2, 2, false)).collect();
                    let lhs = p.eval(&ctx, &x_rest).expect("eval of rewritten term");
                    let rhs = oracle::direct_section_integral(&ctx, term, &x_rest, r)
                        .expect("direct section integral");
                    assert!(
                        lhs.eq(&rhs),
                        "n={} r={} x={:?}: engine {} vs oracle {}",
                        n,
                        r,
                        x_rest.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                        lhs,
                        rhs
                    );
                }
            }
        }
    }
}

#[test]
fn translation_and_scaling_laws_random() {
    let ctx = ctx_q3();
    let mut s = Sampler::new(37);
    for n in 1..=3usize {
        for _ in 0..6 {
            let f = s.ffunction(&ctx, n, -1, 1);
            let base = f.repeated_integral(&ctx, &(1..=n).collect::<Vec<_>>()).unwrap();
            // translation invariance
            let a: Vec<FElem> = (0..n).map(|_| s.felem(&ctx, -2, 2, false)).collect();
            let shifted = f.translate(&ctx, &a).unwrap();
            let v = shifted
                .repeated_integral(&ctx, &(1..=n).collect::<Vec<_>>())
                .unwrap();
            assert!(v.eq(&base));
            // scaling: integral of f(alpha x) = |alpha|^-1 integral f
            let alpha: Vec<FElem> = (0..n).map(|_| s.felem(&ctx, -1, 1, true)).collect();
            let scaled = f
                .scale_translate(&ctx, &alpha, &vec![FElem::zero(); n])
                .unwrap();
            let v2 = scaled
                .repeated_integral(&ctx, &(1..=n).collect::<Vec<_>>())
                .unwrap();
            let mut inv_abs = ctx.gv_one();
            for al in &alpha {
                inv_abs = inv_abs.mul(&al.abs().unwrap().inv().unwrap());
            }
            assert!(v2.eq(&base.mul(&inv_abs)));
        }
    }
}

#[test]
fn lifted_integral_law_random() {
    // repeated integral of g^{a,gamma} = (Haar integral of g) * X^(sum gamma)
    for (ctx, seed) in [(ctx_q3(), 41u64), (ctx_f2(), 42)] {
        let mut s = Sampler::new(seed);
        for n in 1..=3usize {
            for _ in 0..8 {
                let term = s.lifted_term(&ctx, n, 2);
                let expect = term.integral(&ctx);
                let f = FFunction::from_lifted(&ctx, term);
                for order in permutations(n) {
                    let v = f.repeated_integral(&ctx, &order).unwrap();
                    assert!(v.eq(&expect), "order {:?}", order);
                }
            }
        }
    }
}

#[test]
fn sections_of_lifts_are_lifted_sections() {
    // Fixing one coordinate of g^{a,gamma} inside its coset gives the lift
    // of the corresponding section of g at the remaining data.
    let ctx = ctx_q3();
    let mut s = Sampler::new(53);
    for _ in 0..10 {
        let term = s.lifted_term(&ctx, 2, 1);
        // fix coordinate 1 at a point of the coset a_1 + t(gamma_1) O_F
        let x0 = term.a[0].add(
            &FElem::t_split(&ctx, &term.gamma[0]).mul(&s.felem(&ctx, 0, 2, false)),
        );
        let xi = x0.sub(&term.a[0]).shift_t(&term.gamma[0].neg());
        let u0 = xi.residue(&ctx).expect("inside the coset");
        let g_section = term.g.section(1, &u0).expect("residue section");
        let expect = lift(
            &ctx,
            g_section,
            vec![term.a[1].clone()],
            vec![term.gamma[1].clone()],
        )
        .unwrap();
        for _probe in 0..8 {
            let y = s.felem(&ctx, -2, 2, false);
            let lhs = term.eval(&ctx, &[x0.clone(), y.clone()]).unwrap();
            let rhs = expect.eval(&ctx, &[y]).unwrap().mul(&term.coeff);
            assert!(lhs.eq(&rhs));
        }
    }
}

#[test]
fn pullback_det_law_and_enumeration() {
    // integral of u -> f(Au + b) is |det A|^-1 integral f, and matches the
    // brute-force enumeration oracle.
    for (ctx, seed) in [(ctx_q3(), 61u64), (ctx_f2(), 62)] {
        let mut s = Sampler::new(seed);
        for n in 1..=3usize {
            let (vlo, vhi, cases) = if n == 3 { (-1, 1, 4) } else { (-2, 2, 8) };
            for _ in 0..cases {
                let f = s.step_fn(&ctx, n, 2, 1);
                let a = loop {
                    let m = s.fmatrix_invertible(&ctx, n, vlo, vhi);
                    // reduce to a residue-level matrix: sample K-entries via
                    // the F-sampler's residues is overkill; build directly
                    let rows: Vec<Vec<valint_core::local::KElem>> = (0..n)
                        .map(|i| {
                            (0..n)
                                .map(|j| {
                                    let e = m.get(i, j);
                                    // evaluate the Laurent polynomial at t = p
                                    // to get a K value with a similar size
                                    let mut acc = valint_core::local::KElem::zero(ctx.k);
                                    for (g, c) in e.terms() {
                                        let pw = valint_core::local::KElem::pi_pow(ctx.k, g.0[0]);
                                        acc = acc.add(&pw.mul(c));
                                    }
                                    acc
                                })
                                .collect()
                        })
                        .collect();
                    let km = valint_core::matrix::KMatrix::from_rows(rows).unwrap();
                    if km.det().known_nonzero() {
                        break km;
                    }
                };
                let b: Vec<valint_core::local::KElem> = (0..n)
                    .map(|_| valint_core::local::KElem::from_integer(ctx.k, s.gen_range_i64(-4, 4)))
                    .collect();
                let g = match f.affine_pullback(&ctx, &a, &b) {
                    Ok(g) => g,
                    Err(valint_core::Error::DepthLimit(_)) => continue,
                    Err(e) => panic!("pullback failed: {}", e),
                };
                let det_abs = a.det().abs().unwrap();
                let expect = f.haar_integral().scale_rat(&det_abs.recip());
                assert!(g.haar_integral().eq(&expect));
                // enumeration oracle at a depth refining all result boxes
                let m = g
                    .terms()
                    .iter()
                    .flat_map(|(bx, _)| bx.balls.iter().map(|x| x.depth()))
                    .max()
                    .unwrap_or(0);
                if m <= 3 {
                    let e = oracle::enum_integral(&ctx, &g, m).unwrap();
                    assert!(e.eq(&expect));
                }
            }
        }
    }
}

#[test]
fn partial_integral_commutes_full_orders() {
    // all 3! orders on a genuinely mixed 3x3 example with shears of
    // negative valuation
    let ctx = ctx_q3();
    let one = FElem::one(&ctx);
    let t = |e: i64| FElem::t_split(&ctx, &GroupElement(vec![e]));
    let g = {
        let mut s = Sampler::new(71);
        s.step_fn(&ctx, 3, 2, 1)
    };
    let base = lift(
        &ctx,
        g,
        vec![FElem::zero(), t(-1), FElem::from_integer(&ctx, 2)],
        vec![GroupElement(vec![1]), GroupElement(vec![0]), GroupElement(vec![-1])],
    )
    .unwrap();
    let tau = FMatrix::from_rows(vec![
        vec![one.clone(), t(-1), t(1)],
        vec![FElem::zero(), one.clone(), FElem::from_integer(&ctx, 3)],
        vec![FElem::zero(), FElem::zero(), t(-2)],
    ])
    .unwrap();
    let f = FFunction::from_lifted(&ctx, base)
        .compose_affine(&tau, &[t(-2), FElem::zero(), one])
        .unwrap();
    let report = f.fubini_report(&ctx);
    assert!(report.pass(), "{}", report);
}

#[test]
fn gamma_field_axioms_random() {
    let mut s = Sampler::new(83);
    let ctx = ctx_q3();
    let rand_gv = |s: &mut Sampler| {
        let mut acc = GammaValue::zero(1);
        for _ in 0..3 {
            acc = acc.add(&s.gv_coeff(&ctx));
        }
        acc
    };
    for _ in 0..300 {
        let a = rand_gv(&mut s);
        let b = rand_gv(&mut s);
        let c = rand_gv(&mut s);
        assert!(a.add(&b).add(&c).eq(&a.add(&b.add(&c))));
        assert!(a.mul(&b).mul(&c).eq(&a.mul(&b.mul(&c))));
        assert!(a.mul(&b.add(&c)).eq(&a.mul(&b).add(&a.mul(&c))));
        assert!(a.add(&b).eq(&b.add(&a)));
        assert!(a.mul(&b).eq(&b.mul(&a)));
        if !a.is_zero() {
            assert!(a.mul(&a.inv().unwrap()).eq(&GammaValue::one(1)));
        }
    }
}

#[test]
fn rank2_lift_smoke() {
    // rank-2 session: lifted integral law with gamma in Z^2 (lex).
    let ctx = FieldContext::new(LocalFieldSpec::padic(3, 24), 2);
    let mut s = Sampler::new(91);
    let g = s.step_fn(&ctx, 2, 2, 1);
    let gamma = vec![GroupElement(vec![1, -2]), GroupElement(vec![0, 3])];
    let a = vec![
        FElem::t_split(&ctx, &GroupElement(vec![-1, 0])),
        FElem::zero(),
    ];
    let term = lift(&ctx, g, a, gamma).unwrap();
    let expect = term.integral(&ctx);
    let f = FFunction::from_lifted(&ctx, term);
    for order in permutations(2) {
        assert!(f.repeated_integral(&ctx, &order).unwrap().eq(&expect));
    }
    // diagonal monomial scaling at rank 2
    let d = FMatrix::diagonal(vec![
        FElem::t_split(&ctx, &GroupElement(vec![1, 1])),
        FElem::t_split(&ctx, &GroupElement(vec![0, -1])),
    ]);
    let f2 = f.compose_affine(&d, &[FElem::zero(), FElem::zero()]).unwrap();
    let det_inv = d.det_abs(&ctx).unwrap().inv().unwrap();
    assert!(f2
        .integral_closed_form(&ctx)
        .unwrap()
        .eq(&expect.mul(&det_inv)));
    assert!(f2
        .repeated_integral(&ctx, &[2, 1])
        .unwrap()
        .eq(&expect.mul(&det_inv)));
}
