//! The valued field F, realised concretely as the rank-r iterated Laurent
//! series field K((t_1))...((t_r)), with split valuation nu: F* -> Z^r
//! (lexicographic), splitting gamma -> t(gamma), residue map rho: O_F -> K,
//! and the C(Gamma)-valued absolute value |x| = |rho(x t(-nu x))| X^(nu x).
//!
//! Elements are finite sums of monomials t^gamma with K coefficients,
//! together with an optional cutoff: `None` means the element is exact,
//! `Some(c)` means it is known modulo { y : nu(y) >= c } (a lex-closed
//! O_F-submodule, so the error calculus is sound under ring operations).
//! Operations are exact to the propagated cutoff and fail fast when a
//! decision (valuation, membership, inversion) is not determined.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gamma::{GammaValue, GroupElement};
use crate::local::{KElem, LocalFieldSpec};
use crate::qi::GaussianRational;

// ---------------------------------------------------------------------------
// Session context
// ---------------------------------------------------------------------------

/// Session-wide constants: the residue field, the value-group rank, series
/// cutoffs and enumeration limits. Shared immutably by all operations.
#[derive(Debug, Clone)]
pub struct FieldContext {
    pub k: LocalFieldSpec,
    pub rank: usize,
    /// Relative precision used when an exact element must be truncated
    /// (series inversion): result cutoff = nu(result) + rel_cutoff.
    pub rel_cutoff: GroupElement,
    /// Hard bound on enumerated cosets in pullbacks and refinements.
    pub depth_limit: u64,
    /// Maximum determinant valuation allowed on supports of GL weights.
    pub det_vmax: i64,
    /// Hard bound on geometric-series terms in f_inv.
    pub series_max_terms: u32,
}

impl FieldContext {
    pub fn new(k: LocalFieldSpec, rank: usize) -> Self {
        assert!(rank >= 1);
        let mut rel = vec![0i64; rank];
        rel[0] = 12;
        FieldContext {
            k,
            rank,
            rel_cutoff: GroupElement(rel),
            depth_limit: 1_000_000,
            det_vmax: 3,
            series_max_terms: 128,
        }
    }

    pub fn gzero(&self) -> GroupElement {
        GroupElement::zero(self.rank)
    }

    pub fn gv_zero(&self) -> GammaValue {
        GammaValue::zero(self.rank)
    }

    pub fn gv_one(&self) -> GammaValue {
        GammaValue::one(self.rank)
    }

    pub fn k_zero(&self) -> KElem {
        KElem::zero(self.k)
    }

    pub fn k_one(&self) -> KElem {
        KElem::one(self.k)
    }
}

// ---------------------------------------------------------------------------
// FElem
// ---------------------------------------------------------------------------

/// Valuation of an element of F: finite (a group element) or +infinity for
/// exact zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FVal {
    Finite(GroupElement),
    Infinite,
}

/// An element of F as a finite sum of monomials t^gamma with K
/// coefficients, known modulo { nu >= cutoff } when `cutoff` is finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FElem {
    terms: BTreeMap<GroupElement, KElem>,
    cutoff: Option<GroupElement>,
}

impl FElem {
    // -- constructors -------------------------------------------------------

    pub fn zero() -> Self {
        FElem { terms: BTreeMap::new(), cutoff: None }
    }

    pub fn from_terms(terms: BTreeMap<GroupElement, KElem>, cutoff: Option<GroupElement>) -> Self {
        let mut e = FElem { terms, cutoff };
        e.normalize();
        e
    }

    pub fn from_k(ctx: &FieldContext, c: KElem) -> Self {
        FElem::monomial(c, ctx.gzero())
    }

    pub fn from_integer(ctx: &FieldContext, n: i64) -> Self {
        FElem::from_k(ctx, KElem::from_integer(ctx.k, n))
    }

    /// c * t^gamma.
    pub fn monomial(c: KElem, gamma: GroupElement) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_exact_zero() {
            terms.insert(gamma, c);
        }
        FElem { terms, cutoff: None }
    }

    /// The splitting t(gamma): the monomial 1 * t^gamma, so that
    /// nu(t(gamma)) = gamma exactly.
    pub fn t_split(ctx: &FieldContext, gamma: &GroupElement) -> Self {
        FElem::monomial(ctx.k_one(), gamma.clone())
    }

    pub fn one(ctx: &FieldContext) -> Self {
        FElem::from_integer(ctx, 1)
    }

    fn normalize(&mut self) {
        if let Some(c) = &self.cutoff {
            let c = c.clone();
            self.terms.retain(|g, _| *g < c);
        }
        self.terms.retain(|_, k| !k.is_exact_zero());
    }

    pub fn cutoff(&self) -> Option<&GroupElement> {
        self.cutoff.as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &KElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &GroupElement) -> Option<&KElem> {
        self.terms.get(g)
    }

    pub fn is_exact(&self) -> bool {
        self.cutoff.is_none() && self.terms.values().all(|k| k.is_exact())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.cutoff.is_none()
    }

    /// Zero as far as the cutoff and coefficient precisions can tell, but
    /// not exactly zero.
    pub fn is_apparent_zero(&self) -> bool {
        !self.is_exact_zero() && self.terms.values().all(|k| k.is_apparent_zero())
            && (self.cutoff.is_some() || !self.terms.is_empty())
    }

    // -- valuation / residue -------------------------------------------------

    /// The split valuation nu. Errors when the leading term is not decidable
    /// at the current precision.
    pub fn nu(&self) -> Result<FVal> {
        for (g, c) in &self.terms {
            if c.known_nonzero() {
                return Ok(FVal::Finite(g.clone()));
            }
            // A coefficient that is zero to precision blocks the decision.
            return Err(Error::PrecisionExhausted(format!(
                "leading coefficient at t^{} is zero to precision",
                g
            )));
        }
        match &self.cutoff {
            None => Ok(FVal::Infinite),
            Some(c) => Err(Error::PrecisionExhausted(format!(
                "element is zero modulo nu >= {}; valuation undecidable",
                c
            ))),
        }
    }

    pub fn nu_finite(&self) -> Result<GroupElement> {
        match self.nu()? {
            FVal::Finite(g) => Ok(g),
            FVal::Infinite => Err(Error::Domain("valuation of zero".into())),
        }
    }

    /// nu(self) >= gamma, or zero; decidable membership in t(gamma) O_F.
    pub fn nu_at_least(&self, gamma: &GroupElement) -> Result<bool> {
        for (g, c) in &self.terms {
            if g < gamma {
                if c.known_nonzero() {
                    return Ok(false);
                }
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient at t^{} is zero to precision; comparison with {} undecidable",
                    g, gamma
                )));
            } else {
                return Ok(true);
            }
        }
        match &self.cutoff {
            None => Ok(true),
            Some(c) => {
                if c >= gamma {
                    Ok(true)
                } else {
                    Err(Error::PrecisionExhausted(format!(
                        "zero modulo nu >= {}; comparison with {} undecidable",
                        c, gamma
                    )))
                }
            }
        }
    }

    pub fn is_integral(&self, ctx: &FieldContext) -> Result<bool> {
        self.nu_at_least(&ctx.gzero())
    }

    /// The residue rho: O_F -> K; the coefficient at exponent 0.
    pub fn residue(&self, ctx: &FieldContext) -> Result<KElem> {
        if !self.is_integral(ctx)? {
            return Err(Error::Domain("residue of a non-integral element".into()));
        }
        // The residue needs the coefficient at exponent zero to be known,
        // i.e. the cutoff must lie strictly above 0.
        if let Some(c) = &self.cutoff {
            if *c <= ctx.gzero() {
                return Err(Error::PrecisionExhausted(
                    "cutoff at or below 0; residue undetermined".into(),
                ));
            }
        }
        Ok(self
            .terms
            .get(&ctx.gzero())
            .cloned()
            .unwrap_or_else(|| ctx.k_zero()))
    }

    /// |x| = |rho(x t(-nu x))|_K * X^(nu x), a positive rational monomial.
    pub fn abs(&self) -> Result<GammaValue> {
        let v = self.nu_finite()?;
        let lead = self.terms.get(&v).expect("leading term exists");
        let a = lead.abs()?;
        Ok(GammaValue::monomial(GaussianRational::from_rational(a), v))
    }

    // -- arithmetic ----------------------------------------------------------

    fn min_cutoff(a: &Option<GroupElement>, b: &Option<GroupElement>) -> Option<GroupElement> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.clone().min(y.clone())),
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (None, None) => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let cutoff = FElem::min_cutoff(&self.cutoff, &other.cutoff);
        let mut terms = self.terms.clone();
        for (g, c) in &other.terms {
            match terms.get_mut(g) {
                Some(e) => {
                    *e = e.add(c);
                }
                None => {
                    terms.insert(g.clone(), c.clone());
                }
            }
        }
        FElem::from_terms(terms, cutoff)
    }

    pub fn neg(&self) -> Self {
        FElem {
            terms: self.terms.iter().map(|(g, c)| (g.clone(), c.neg())).collect(),
            cutoff: self.cutoff.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Lower bound on nu that is certain at current knowledge (for the
    /// product cutoff rule).
    fn nu_lower(&self) -> Option<GroupElement> {
        if let Some((g, _)) = self.terms.iter().next() {
            return Some(g.clone());
        }
        self.cutoff.clone()
        // exact zero: None, handled by caller
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return FElem::zero();
        }
        // cutoff = min(nu(a) + cut(b), nu(b) + cut(a))
        let cutoff = {
            let ca = other
                .cutoff
                .as_ref()
                .and_then(|cb| self.nu_lower().map(|va| va.add(cb)));
            let cb = self
                .cutoff
                .as_ref()
                .and_then(|ca| other.nu_lower().map(|vb| vb.add(ca)));
            FElem::min_cutoff(&ca, &cb)
        };
        let mut terms: BTreeMap<GroupElement, KElem> = BTreeMap::new();
        for (g1, c1) in &self.terms {
            for (g2, c2) in &other.terms {
                let g = g1.add(g2);
                if let Some(cut) = &cutoff {
                    if g >= *cut {
                        continue;
                    }
                }
                let prod = c1.mul(c2);
                match terms.get_mut(&g) {
                    Some(e) => *e = e.add(&prod),
                    None => {
                        terms.insert(g, prod);
                    }
                }
            }
        }
        FElem::from_terms(terms, cutoff)
    }

    pub fn scale_k(&self, c: &KElem) -> Self {
        if c.is_exact_zero() {
            return FElem::zero();
        }
        FElem {
            terms: self.terms.iter().map(|(g, k)| (g.clone(), k.mul(c))).collect(),
            cutoff: self.cutoff.clone(),
        }
    }

    /// Multiplication by the exact monomial t^gamma.
    pub fn shift_t(&self, gamma: &GroupElement) -> Self {
        FElem {
            terms: self.terms.iter().map(|(g, c)| (g.add(gamma), c.clone())).collect(),
            cutoff: self.cutoff.as_ref().map(|c| c.add(gamma)),
        }
    }

    /// Inversion by leading-term extraction and geometric series expansion.
    pub fn inv(&self, ctx: &FieldContext) -> Result<Self> {
        if self.is_exact_zero() {
            return Err(Error::DivisionByZero("inverse of 0 in F".into()));
        }
        let v = self.nu_finite()?;
        let lead = self.terms.get(&v).expect("leading term");
        let lead_inv = lead.inv()?;
        // self = lead * t^v * (1 + eps), nu(eps) > 0
        let mut eps_terms: BTreeMap<GroupElement, KElem> = BTreeMap::new();
        for (g, c) in &self.terms {
            if g == &v {
                continue;
            }
            eps_terms.insert(g.sub(&v), c.mul(&lead_inv));
        }
        let eps_cut = self.cutoff.as_ref().map(|c| c.sub(&v));
        let eps = FElem::from_terms(eps_terms, eps_cut.clone());

        // relative precision of the result
        let rel_in = eps_cut.clone();
        let rel = match rel_in {
            None => ctx.rel_cutoff.clone(),
            Some(r) => r.min(ctx.rel_cutoff.clone()),
        };

        let mut series = FElem::one(ctx);
        let eps_has_terms = eps.terms.keys().next().is_some();
        if eps_has_terms {
            let nu_eps = eps.nu_finite().map_err(|_| {
                Error::PrecisionExhausted("tail of inversion is zero to precision".into())
            })?;
            // smallest k with k*nu(eps) >= rel
            let mut needed: Option<u32> = None;
            for k in 1..=ctx.series_max_terms {
                if nu_eps.scale(k as i64) >= rel {
                    needed = Some(k);
                    break;
                }
            }
            let needed = needed.ok_or_else(|| {
                Error::PrecisionExhausted(format!(
                    "geometric series for inversion does not reach cutoff {} within {} terms",
                    rel, ctx.series_max_terms
                ))
            })?;
            let rel_bound = FElem {
                terms: BTreeMap::new(),
                cutoff: Some(rel.clone()),
            };
            let mut power = FElem::one(ctx);
            let neg_eps = eps.neg();
            series = FElem::one(ctx);
            for _ in 0..needed {
                power = power.mul(&neg_eps);
                series = series.add(&power);
            }
            // record the truncation
            series = series.add(&rel_bound);
        } else if eps_cut.is_some() {
            // exact-to-cutoff unit part: the inverse carries the same
            // relative cutoff
            series = series.add(&FElem { terms: BTreeMap::new(), cutoff: Some(rel) });
        }

        // result = lead_inv * t^(-v) * series
        Ok(series.scale_k(&lead_inv).shift_t(&v.neg()))
    }

    pub fn div(&self, ctx: &FieldContext, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv(ctx)?))
    }

    pub fn pow(&self, ctx: &FieldContext, e: i64) -> Result<Self> {
        let mut base = if e >= 0 { self.clone() } else { self.inv(ctx)? };
        let mut k = e.unsigned_abs();
        let mut acc = FElem::one(ctx);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Renders with the session's variable names (t, or t1..tr).
    pub fn render(&self, rank: usize) -> String {
        fn tmono(rank: usize, g: &GroupElement) -> String {
            if rank == 1 {
                let e = g.0[0];
                if e == 0 {
                    return "t^0".to_string();
                }
                return format!("t^{}", e);
            }
            let mut parts = Vec::new();
            for (i, &e) in g.0.iter().enumerate() {
                if e != 0 {
                    parts.push(format!("t{}^{}", i + 1, e));
                }
            }
            if parts.is_empty() {
                "t^0".to_string()
            } else {
                parts.join("*")
            }
        }
        if self.terms.is_empty() {
            return match &self.cutoff {
                None => "0".to_string(),
                Some(c) => format!("O(t^{})", c),
            };
        }
        let mut parts = Vec::new();
        for (g, c) in &self.terms {
            parts.push(format!("{}*({})", tmono(rank, g), c));
        }
        let mut s = parts.join(" + ");
        if let Some(c) = &self.cutoff {
            s.push_str(&format!(" + O(t^{})", c));
        }
        s
    }
}

impl fmt::Display for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Rank is recoverable from any exponent; default to 1 for zero.
        let rank = self.terms.keys().next().map(|g| g.rank()).unwrap_or(1);
        write!(f, "{}", self.render(rank))
    }
}
