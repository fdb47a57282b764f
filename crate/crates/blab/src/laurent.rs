//! Sparse exact multivariate Laurent polynomial arithmetic over the
//! integers and prime residue fields.
//!
//! Polynomials are finite maps from exponent vectors to nonzero
//! arbitrary-precision coefficients. Parsing and canonical serialization
//! round-trip; divisibility is exact (no floating point anywhere).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

use crate::field::{ExtElem, ExtField};

/// Ordered variable names shared by all polynomials of one context.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct VarContext {
    pub names: Vec<String>,
}

impl VarContext {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Arc<Self> {
        Arc::new(VarContext { names: names.into_iter().map(Into::into).collect() })
    }

    /// Context `x1, ..., xk`.
    pub fn xs(k: usize) -> Arc<Self> {
        Self::new((1..=k).map(|i| format!("x{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Exponent vector of a Laurent monomial; ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpVec(pub Vec<i32>);

impl ExpVec {
    pub fn zero(k: usize) -> Self {
        ExpVec(vec![0; k])
    }

    pub fn unit(k: usize, i: usize) -> Self {
        let mut v = vec![0; k];
        v[i] = 1;
        ExpVec(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> ExpVec {
        ExpVec(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, n: i32) -> ExpVec {
        ExpVec(self.0.iter().map(|a| a.checked_mul(n).expect("exponent overflow")).collect())
    }
}

/// Coefficient domain: exact integers or residues modulo `m`.
///
/// Residues are stored reduced into `[0, m)`. Ring operations work for any
/// modulus; divisibility and fingerprinting require `m` prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoeffDomain {
    Integers,
    Mod(u64),
}

impl CoeffDomain {
    fn reduce(&self, c: BigInt) -> BigInt {
        match self {
            CoeffDomain::Integers => c,
            CoeffDomain::Mod(m) => {
                let m = BigInt::from(*m);
                let mut r = c % &m;
                if r.is_negative() {
                    r += &m;
                }
                r
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LaurentError {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("mismatched variable contexts")]
    ContextMismatch,
    #[error("mismatched coefficient domains")]
    DomainMismatch,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("divisor has no positive degree in the pivot variable")]
    PivotFree,
    #[error("operation requires the integer coefficient domain")]
    NotIntegers,
    #[error("operation requires a prime modulus")]
    NotPrimeModulus,
    #[error("zero polynomial has no content decomposition")]
    ZeroContent,
    #[error("variable {0} evaluated at a non-invertible point with negative exponent")]
    NonInvertiblePoint(usize),
}

/// Sparse Laurent polynomial: a map from exponent vectors to nonzero
/// coefficients, tagged with its variable context and coefficient domain.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    ctx: Arc<VarContext>,
    domain: CoeffDomain,
    terms: BTreeMap<ExpVec, BigInt>,
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({})", self.serialize())
    }
}

impl LaurentPoly {
    pub fn zero(ctx: &Arc<VarContext>, domain: CoeffDomain) -> Self {
        LaurentPoly { ctx: Arc::clone(ctx), domain, terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<VarContext>, domain: CoeffDomain, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(ctx, domain);
        p.add_term(ExpVec::zero(ctx.len()), c.into());
        p
    }

    pub fn one(ctx: &Arc<VarContext>, domain: CoeffDomain) -> Self {
        Self::constant(ctx, domain, 1)
    }

    pub fn var(ctx: &Arc<VarContext>, domain: CoeffDomain, i: usize) -> Self {
        let mut p = Self::zero(ctx, domain);
        p.add_term(ExpVec::unit(ctx.len(), i), BigInt::one());
        p
    }

    pub fn monomial(
        ctx: &Arc<VarContext>,
        domain: CoeffDomain,
        exps: ExpVec,
        c: impl Into<BigInt>,
    ) -> Self {
        let mut p = Self::zero(ctx, domain);
        p.add_term(exps, c.into());
        p
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn domain(&self) -> CoeffDomain {
        self.domain
    }

    pub fn num_vars(&self) -> usize {
        self.ctx.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &ExpVec) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Add `c` to the coefficient at `exps`, dropping the term if it cancels.
    pub fn add_term(&mut self, exps: ExpVec, c: BigInt) {
        let c = self.domain.reduce(c);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = self.domain.reduce(e.get() + c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_compat(&self, other: &Self) -> Result<(), LaurentError> {
        if self.ctx.names != other.ctx.names {
            return Err(LaurentError::ContextMismatch);
        }
        if self.domain != other.domain {
            return Err(LaurentError::DomainMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_compat(other)?;
        let mut out = Self::zero(&self.ctx, self.domain);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("polynomial context mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("polynomial context mismatch")
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("polynomial context mismatch")
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(&self.ctx, self.domain);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero(&self.ctx, self.domain);
        for (e, k) in &self.terms {
            out.add_term(e.clone(), k * c);
        }
        out
    }

    /// Multiply by the monomial `coeff * x^exps`.
    pub fn mul_monomial(&self, exps: &ExpVec, coeff: &BigInt) -> Self {
        let mut out = Self::zero(&self.ctx, self.domain);
        for (e, c) in &self.terms {
            out.add_term(e.add(exps), c * coeff);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.ctx, self.domain);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Replace every exponent vector `e` by `N*e`.
    pub fn substitute_power(&self, n: u32) -> Self {
        assert!(n >= 1, "substitute_power requires N >= 1");
        let mut out = Self::zero(&self.ctx, self.domain);
        for (e, c) in &self.terms {
            out.add_term(e.scale(n as i32), c.clone());
        }
        out
    }

    /// True iff the polynomial is nonzero and every coefficient is a unit
    /// sign (`+1` or `-1`; modulo `m`, a residue of `1` or `m-1`).
    pub fn is_flat(&self) -> bool {
        if self.terms.is_empty() {
            return false;
        }
        self.terms.values().all(|c| match self.domain {
            CoeffDomain::Integers => c.magnitude().is_one(),
            CoeffDomain::Mod(m) => {
                let c = c.to_u64().unwrap_or(u64::MAX);
                c == 1 || c + 1 == m
            }
        })
    }

    pub fn min_exp(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|e| e.0[var]).min()
    }

    pub fn max_exp(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|e| e.0[var]).max()
    }

    /// Lexicographically largest exponent vector (the leading term).
    pub fn leading(&self) -> Option<(&ExpVec, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Lexicographically smallest exponent vector (the trailing term).
    pub fn trailing(&self) -> Option<(&ExpVec, &BigInt)> {
        self.terms.iter().next()
    }

    /// Strip the monomial unit: returns `(shift, p0)` with `self = x^shift * p0`
    /// and `p0` having minimal exponent `0` in every variable.
    pub fn strip_units(&self) -> (ExpVec, Self) {
        let k = self.num_vars();
        if self.is_zero() {
            return (ExpVec::zero(k), self.clone());
        }
        let shift = ExpVec((0..k).map(|v| self.min_exp(v).unwrap()).collect());
        let mut out = Self::zero(&self.ctx, self.domain);
        for (e, c) in &self.terms {
            out.add_term(e.sub(&shift), c.clone());
        }
        (shift, out)
    }

    /// Content (positive gcd of the coefficients) and primitive part.
    pub fn content_and_primitive(&self) -> Result<(BigInt, Self), LaurentError> {
        if self.domain != CoeffDomain::Integers {
            return Err(LaurentError::NotIntegers);
        }
        if self.is_zero() {
            return Err(LaurentError::ZeroContent);
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
        }
        let mut out = Self::zero(&self.ctx, self.domain);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c / &g);
        }
        Ok((g, out))
    }

    /// Pseudo-division of `self` by `p` with respect to the pivot variable:
    /// returns `(q, r, e)` with `lc^e * self = q*p + r`, where `lc` is the
    /// coefficient of `p` at its top pivot exponent and the pivot degree of
    /// `r` is less than that of `p` (degrees counted after shifting any
    /// negative pivot exponents away, which is multiplication by a unit).
    /// When `lc` is a unit (`+/-` monomial) the division is exact and
    /// `e = 0`.
    pub fn pseudo_divide(
        &self,
        p: &Self,
        pivot: usize,
    ) -> Result<(Self, Self, u32), LaurentError> {
        self.check_compat(p)?;
        if p.is_zero() {
            return Err(LaurentError::ZeroDivisor);
        }
        let p_lo = p.min_exp(pivot).unwrap();
        let p_hi = p.max_exp(pivot).unwrap();
        if p_hi == p_lo {
            return Err(LaurentError::PivotFree);
        }
        if self.is_zero() {
            return Ok((self.clone(), self.clone(), 0));
        }

        // Negative pivot exponents are shifted away (a unit multiple) so the
        // textbook division loop applies; honest inputs are untouched.
        let f_shift = self.min_exp(pivot).unwrap().min(0);
        let p_shift = p_lo.min(0);

        // Split a polynomial into pivot-exponent slices; slices keep the full
        // context with pivot exponent zeroed.
        let slices = |f: &Self, lo: i32| -> BTreeMap<i32, Self> {
            let mut m: BTreeMap<i32, Self> = BTreeMap::new();
            for (e, c) in &f.terms {
                let d = e.0[pivot] - lo;
                let mut e0 = e.clone();
                e0.0[pivot] = 0;
                m.entry(d)
                    .or_insert_with(|| Self::zero(&f.ctx, f.domain))
                    .add_term(e0, c.clone());
            }
            m.retain(|_, v| !v.is_zero());
            m
        };

        let p_slices = slices(p, p_shift);
        let deg_p = p_hi - p_shift;
        let lc = p_slices.get(&deg_p).unwrap().clone();
        let lc_unit = lc.num_terms() == 1 && {
            let (_, c) = lc.leading().unwrap();
            match self.domain {
                CoeffDomain::Integers => c.magnitude().is_one(),
                CoeffDomain::Mod(_) => true, // any nonzero residue is invertible mod a prime
            }
        };
        let lc_inv_term = if lc_unit {
            let (e, c) = lc.leading().unwrap();
            let inv_c = match self.domain {
                CoeffDomain::Integers => c.clone(), // +/-1 is its own inverse
                CoeffDomain::Mod(m) => {
                    let c = c.to_u64().unwrap();
                    BigInt::from(crate::field::pow_mod(c, m - 2, m))
                }
            };
            Some((e.neg(), inv_c))
        } else {
            None
        };

        let mut r = slices(self, f_shift);
        let mut q: BTreeMap<i32, Self> = BTreeMap::new();
        let mut e_count = 0u32;

        loop {
            let Some(&r_hi) = r.keys().next_back() else { break };
            if r_hi < deg_p {
                break;
            }
            let shift = r_hi - deg_p;
            let s_coeff = if let Some((ref inv_e, ref inv_c)) = lc_inv_term {
                r.get(&r_hi).unwrap().mul_monomial(inv_e, inv_c)
            } else {
                // scale the running remainder and quotient by lc; the
                // reduction coefficient is then the old top slice.
                let lt_r = r.get(&r_hi).unwrap().clone();
                for v in r.values_mut() {
                    *v = v.mul(&lc);
                }
                for v in q.values_mut() {
                    *v = v.mul(&lc);
                }
                e_count += 1;
                lt_r
            };
            match q.entry(shift) {
                std::collections::btree_map::Entry::Vacant(en) => {
                    en.insert(s_coeff.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut en) => {
                    let s = en.get().add(&s_coeff);
                    if s.is_zero() {
                        en.remove();
                    } else {
                        *en.get_mut() = s;
                    }
                }
            }
            for (pd, pc) in &p_slices {
                let d = pd + shift;
                let delta = s_coeff.mul(pc);
                if delta.is_zero() {
                    continue;
                }
                match r.entry(d) {
                    std::collections::btree_map::Entry::Vacant(en) => {
                        en.insert(delta.neg());
                    }
                    std::collections::btree_map::Entry::Occupied(mut en) => {
                        let s = en.get().sub(&delta);
                        if s.is_zero() {
                            en.remove();
                        } else {
                            *en.get_mut() = s;
                        }
                    }
                }
            }
        }

        // Restore pivot shifts: q gains f_shift - p_shift, r gains f_shift.
        let unslice = |m: BTreeMap<i32, Self>, off: i32| -> Self {
            let mut out = Self::zero(&self.ctx, self.domain);
            for (d, sl) in m {
                for (e, c) in &sl.terms {
                    let mut e2 = e.clone();
                    e2.0[pivot] += d + off;
                    out.add_term(e2, c.clone());
                }
            }
            out
        };
        Ok((unslice(q, f_shift - p_shift), unslice(r, f_shift), e_count))
    }

    /// Exact divisibility: does `p` divide `self` in the Laurent ring?
    ///
    /// Monomial units are stripped from both sides; over the integers the
    /// integer content must divide and the primitive parts are divided by
    /// exact leading-term elimination, which is a complete decision
    /// procedure in the polynomial ring. Over a prime modulus coefficient
    /// division always succeeds.
    pub fn divisible_by(&self, p: &Self) -> Result<bool, LaurentError> {
        self.check_compat(p)?;
        if p.is_zero() {
            return Err(LaurentError::ZeroDivisor);
        }
        if self.is_zero() {
            return Ok(true);
        }
        Ok(self.try_exact_div(p)?.is_some())
    }

    /// Exact quotient `self / p` in the Laurent ring, if it exists.
    pub fn try_exact_div(&self, p: &Self) -> Result<Option<Self>, LaurentError> {
        self.check_compat(p)?;
        if p.is_zero() {
            return Err(LaurentError::ZeroDivisor);
        }
        if self.is_zero() {
            return Ok(Some(Self::zero(&self.ctx, self.domain)));
        }
        let (shift_f, f0) = self.strip_units();
        let (shift_p, p0) = p.strip_units();

        let (f0, p0, int_content) = match self.domain {
            CoeffDomain::Integers => {
                let (cf, fp) = f0.content_and_primitive()?;
                let (cp, pp) = p0.content_and_primitive()?;
                if !(&cf % &cp).is_zero() {
                    return Ok(None);
                }
                (fp, pp, Some(cf / cp))
            }
            CoeffDomain::Mod(_) => (f0, p0, None),
        };

        // Leading-term elimination in lex order over nonnegative exponents.
        let mut rem = f0;
        let mut quo = Self::zero(&self.ctx, self.domain);
        let (p_lead_e, p_lead_c) = {
            let (e, c) = p0.leading().unwrap();
            (e.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (r_e, r_c) = {
                let (e, c) = rem.leading().unwrap();
                (e.clone(), c.clone())
            };
            let m_e = r_e.sub(&p_lead_e);
            if m_e.0.iter().any(|&x| x < 0) {
                return Ok(None);
            }
            let m_c = match self.domain {
                CoeffDomain::Integers => {
                    let (d, r) = r_c.div_rem(&p_lead_c);
                    if !r.is_zero() {
                        return Ok(None);
                    }
                    d
                }
                CoeffDomain::Mod(m) => {
                    let inv = crate::field::pow_mod(p_lead_c.to_u64().unwrap(), m - 2, m);
                    self.domain.reduce(r_c * BigInt::from(inv))
                }
            };
            quo.add_term(m_e.clone(), m_c.clone());
            rem = rem.sub(&p0.mul_monomial(&m_e, &m_c));
        }
        let mut quo = quo;
        if let Some(c) = int_content {
            quo = quo.scale(&c);
        }
        // restore the stripped units
        let shift = shift_f.sub(&shift_p);
        quo = quo.mul_monomial(&shift, &BigInt::one());
        debug_assert_eq!(quo.mul(p), *self);
        Ok(Some(quo))
    }

    /// Exact evaluation at a point of `F_{q^e}` coordinates. Coordinates at
    /// variables occurring with negative exponents must be invertible.
    pub fn evaluate(&self, field: &ExtField, point: &[ExtElem]) -> Result<ExtElem, LaurentError> {
        assert_eq!(point.len(), self.num_vars());
        // precompute per-variable inverses lazily
        let mut invs: Vec<Option<ExtElem>> = vec![None; point.len()];
        let mut acc = field.zero();
        for (e, c) in &self.terms {
            let mut t = field.from_bigint(c);
            for (v, &exp) in e.0.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                let base = if exp > 0 {
                    point[v]
                } else {
                    if invs[v].is_none() {
                        if field.is_zero(&point[v]) {
                            return Err(LaurentError::NonInvertiblePoint(v));
                        }
                        invs[v] = Some(field.inv(&point[v]));
                    }
                    invs[v].unwrap()
                };
                t = field.mul(&t, &field.pow(&base, exp.unsigned_abs() as u128));
            }
            acc = field.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Substitute a polynomial for variable `v`; requires the variable to
    /// occur only with nonnegative exponents.
    pub fn substitute_var(&self, v: usize, g: &Self) -> Result<Self, LaurentError> {
        self.check_compat(g)?;
        let mut out = Self::zero(&self.ctx, self.domain);
        // group by exponent of v, then Horner is overkill: powers are small
        let mut pow_cache: Vec<Self> = vec![Self::one(&self.ctx, self.domain)];
        for (e, c) in &self.terms {
            let d = e.0[v];
            assert!(d >= 0, "substitute_var requires nonnegative exponents in the substituted variable");
            let d = d as usize;
            while pow_cache.len() <= d {
                let next = pow_cache.last().unwrap().mul(g);
                pow_cache.push(next);
            }
            let mut e0 = e.clone();
            e0.0[v] = 0;
            let term = pow_cache[d].mul_monomial(&e0, c);
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Canonical serialization: terms in descending lexicographic order,
    /// explicit `*` between factors, `^` only for exponents other than one.
    pub fn serialize(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.magnitude();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.is_zero() {
                factors.push(mag.to_string());
            }
            for (v, &exp) in e.0.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                if exp == 1 {
                    factors.push(self.ctx.names[v].clone());
                } else {
                    factors.push(format!("{}^{}", self.ctx.names[v], exp));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// A flat sign pattern: a nonempty support with signs, i.e. a Laurent
/// polynomial whose coefficients are all `+1` or `-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatPattern {
    pub signed_support: BTreeMap<ExpVec, i8>,
}

impl FlatPattern {
    pub fn new(signed_support: BTreeMap<ExpVec, i8>) -> Self {
        assert!(!signed_support.is_empty(), "flat patterns are nonempty");
        assert!(signed_support.values().all(|&s| s == 1 || s == -1));
        FlatPattern { signed_support }
    }

    pub fn to_poly(&self, ctx: &Arc<VarContext>, domain: CoeffDomain) -> LaurentPoly {
        let mut p = LaurentPoly::zero(ctx, domain);
        for (e, &s) in &self.signed_support {
            p.add_term(e.clone(), BigInt::from(s));
        }
        p
    }

    pub fn from_poly(p: &LaurentPoly) -> Option<Self> {
        if !p.is_flat() {
            return None;
        }
        let mut m = BTreeMap::new();
        for (e, c) in p.terms() {
            let s = match p.domain {
                CoeffDomain::Integers => {
                    if c.is_negative() {
                        -1
                    } else {
                        1
                    }
                }
                CoeffDomain::Mod(_) => {
                    if c.is_one() {
                        1
                    } else {
                        -1
                    }
                }
            };
            m.insert(e.clone(), s);
        }
        Some(FlatPattern { signed_support: m })
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    ctx: Arc<VarContext>,
    domain: CoeffDomain,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LaurentError> {
        Err(LaurentError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<LaurentPoly, LaurentError> {
        let mut sign = 1i32;
        if let Some(c) = self.peek() {
            if c == b'+' {
                self.pos += 1;
            } else if c == b'-' {
                sign = -1;
                self.pos += 1;
            }
        }
        let mut acc = self.term()?;
        if sign < 0 {
            acc = acc.neg();
        }
        while let Some(c) = self.peek() {
            if c == b'+' || c == b'-' {
                self.pos += 1;
                let t = self.term()?;
                acc = if c == b'+' { acc.add(&t) } else { acc.sub(&t) };
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LaurentPoly, LaurentError> {
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            if c == b'*' {
                self.pos += 1;
                let f = self.factor()?;
                acc = acc.mul(&f);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LaurentPoly, LaurentError> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(LaurentPoly::constant(&self.ctx, self.domain, n))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric()
                        || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                let Some(v) = self.ctx.index_of(name) else {
                    return Err(LaurentError::UnknownVariable(name.to_string()));
                };
                let mut exp: i64 = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    exp = self.signed_integer()?;
                }
                let exp: i32 = match exp.try_into() {
                    Ok(e) => e,
                    Err(_) => return self.err("exponent out of range"),
                };
                let mut e = ExpVec::zero(self.ctx.len());
                e.0[v] = exp;
                Ok(LaurentPoly::monomial(&self.ctx, self.domain, e, 1))
            }
            Some(c) => self.err(format!("unexpected character `{}`", c as char)),
        }
    }

    fn integer(&mut self) -> Result<BigInt, LaurentError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn signed_integer(&mut self) -> Result<i64, LaurentError> {
        self.skip_ws();
        let mut sign = 1i64;
        if self.peek() == Some(b'-') {
            sign = -1;
            self.pos += 1;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        let n = self.integer()?;
        let n: i64 = n.to_i64().ok_or(LaurentError::Parse {
            pos: self.pos,
            msg: "exponent out of range".into(),
        })?;
        Ok(sign * n)
    }
}

/// Parse a polynomial in the grammar
/// `expr := [sign] term ((+|-) term)*; term := factor (* factor)*;`
/// `factor := var [^ signed_int] | ( expr ) | integer`.
pub fn parse(
    text: &str,
    ctx: &Arc<VarContext>,
    domain: CoeffDomain,
) -> Result<LaurentPoly, LaurentError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, ctx: Arc::clone(ctx), domain };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// Shorthand used throughout tests and examples: parse over `Z` in the
/// `x1..xk` context.
pub fn zpoly(text: &str, k: usize) -> LaurentPoly {
    parse(text, &VarContext::xs(k), CoeffDomain::Integers).expect("valid polynomial literal")
}
