//! Equality, canonical forms, and probabilistic fingerprints in quotient
//! rings of the Laurent algebra.
//!
//! Three ring families are supported: the free Laurent ring, quotients by a
//! single polynomial `p`, and the localization that hosts the torsion-free
//! Baumslag group in two dimensions, `Z[Y1^±, Y2^±, (1+Y1)^-1, (1+Y2)^-1]`.
//! The Baumslag localization is presented on four formal variables
//! `y1, z1, y2, z2` with the implicit relations `z1 = 1 + y1`,
//! `z2 = 1 + y2`; raw elements are Laurent polynomials in those variables.
//!
//! Equality is always exact. Fingerprints are sound (equal elements never
//! disagree) and complete up to a documented Schwartz-Zippel failure
//! probability, and every consumer that counts by fingerprint confirms
//! collisions through `eq_mod`.

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use thiserror::Error;

use crate::field::{ExtElem, ExtField, FpPoly};
use crate::laurent::{CoeffDomain, ExpVec, LaurentError, LaurentPoly, VarContext};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuotientError {
    #[error("element representation does not match the ring")]
    RepresentationMismatch,
    #[error("canonical forms are not implemented for this ring; use fingerprints with eq_mod confirmation")]
    UnsupportedCanonicalForm,
    #[error("no usable evaluation point found within the retry budget")]
    NoRootFound,
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Ring descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingKind {
    /// `Z[x1^±, ..., xk^±]` (or the same over a residue domain).
    FreeLaurent,
    /// Quotient by the ideal generated by one primitive polynomial; the
    /// pivot is a variable in which `p` has positive degree.
    SinglePoly { p: LaurentPoly, pivot: usize },
    /// `Z[y1^±, y2^±, (1+y1)^-1, (1+y2)^-1]` on the formal variables
    /// `y1, z1, y2, z2` with `z1 = 1+y1`, `z2 = 1+y2`.
    BaumslagLocalization,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientRing {
    pub kind: RingKind,
    pub ctx: Arc<VarContext>,
    pub domain: CoeffDomain,
    /// A single-polynomial ring records, but does not verify, the caller's
    /// claim that `p` is irreducible.
    pub irreducible_asserted: bool,
}

impl QuotientRing {
    pub fn free(ctx: &Arc<VarContext>, domain: CoeffDomain) -> Self {
        QuotientRing {
            kind: RingKind::FreeLaurent,
            ctx: Arc::clone(ctx),
            domain,
            irreducible_asserted: false,
        }
    }

    /// Quotient by `(p)`. `p` is normalized to its primitive part. The pivot
    /// prefers the highest-index variable in which `p` is linear with a
    /// unit-monomial leading coefficient (that variable can be eliminated,
    /// giving canonical forms), falling back to the variable of smallest
    /// positive degree.
    pub fn single_poly(p: &LaurentPoly) -> Result<Self, QuotientError> {
        assert!(!p.is_zero(), "quotient by the zero polynomial");
        let p = match p.domain() {
            CoeffDomain::Integers => p.content_and_primitive()?.1,
            CoeffDomain::Mod(_) => p.clone(),
        };
        let pivot = (0..p.num_vars())
            .rev()
            .find(|&v| linear_pivot_substitution(&p, v).is_some())
            .or_else(|| pick_pivot(&p))
            .ok_or(LaurentError::PivotFree)?;
        Ok(QuotientRing {
            ctx: Arc::clone(p.ctx()),
            domain: p.domain(),
            kind: RingKind::SinglePoly { p, pivot },
            irreducible_asserted: true,
        })
    }

    /// The Baumslag localization on formal variables `y1, z1, y2, z2`.
    pub fn baumslag_localization() -> Self {
        let ctx = VarContext::new(vec!["y1", "z1", "y2", "z2"]);
        QuotientRing {
            kind: RingKind::BaumslagLocalization,
            ctx,
            domain: CoeffDomain::Integers,
            irreducible_asserted: false,
        }
    }

    pub fn zero(&self) -> RingElem {
        RingElem::from_poly(LaurentPoly::zero(&self.ctx, self.domain))
    }

    pub fn one(&self) -> RingElem {
        RingElem::from_poly(LaurentPoly::one(&self.ctx, self.domain))
    }
}

/// Pivot with the smallest positive degree spread, lowest index on ties.
pub fn pick_pivot(p: &LaurentPoly) -> Option<usize> {
    let mut best: Option<(i32, usize)> = None;
    for v in 0..p.num_vars() {
        let lo = p.min_exp(v)?;
        let hi = p.max_exp(v)?;
        let spread = hi - lo;
        if spread > 0 {
            match best {
                Some((s, _)) if s <= spread => {}
                _ => best = Some((spread, v)),
            }
        }
    }
    best.map(|(_, v)| v)
}

/// Element representation: either a raw Laurent polynomial or a reduced
/// localized fraction `num / prod(gen_i^den_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingRep {
    Poly(LaurentPoly),
    Fraction { num: LaurentPoly, den: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    pub rep: RingRep,
}

impl RingElem {
    pub fn from_poly(p: LaurentPoly) -> Self {
        RingElem { rep: RingRep::Poly(p) }
    }

    pub fn as_poly(&self) -> Option<&LaurentPoly> {
        match &self.rep {
            RingRep::Poly(p) => Some(p),
            RingRep::Fraction { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.rep {
            RingRep::Poly(p) => p.is_zero(),
            RingRep::Fraction { num, .. } => num.is_zero(),
        }
    }
}

/// Denominator generators of the localized canonical form, in the fixed
/// reduction order.
fn localization_generators(ring: &QuotientRing) -> Option<Vec<LaurentPoly>> {
    match &ring.kind {
        RingKind::BaumslagLocalization => {
            // y1, 1+y1, y2, 1+y2 expressed in the (y1, z1, y2, z2) context
            let c = &ring.ctx;
            let d = ring.domain;
            let y1 = LaurentPoly::var(c, d, 0);
            let y2 = LaurentPoly::var(c, d, 2);
            let one = LaurentPoly::one(c, d);
            Some(vec![y1.clone(), one.add(&y1), y2.clone(), one.add(&y2)])
        }
        RingKind::SinglePoly { p, pivot } => {
            // supported when p is linear in the pivot with a unit-monomial
            // leading coefficient: pivot = v(other vars) after substitution
            let subst = linear_pivot_substitution(p, *pivot)?;
            let c = &ring.ctx;
            let d = ring.domain;
            let mut gens = Vec::new();
            for v in 0..c.len() {
                if v != *pivot {
                    gens.push(LaurentPoly::var(c, d, v));
                }
            }
            gens.push(subst);
            Some(gens)
        }
        RingKind::FreeLaurent => None,
    }
}

/// If `p` is linear in the pivot with a unit-monomial leading coefficient,
/// returns the substitution value for the pivot variable: the Laurent
/// polynomial `v` in the remaining variables with `pivot = v mod (p)`.
pub fn linear_pivot_substitution(p: &LaurentPoly, pivot: usize) -> Option<LaurentPoly> {
    let lo = p.min_exp(pivot)?;
    let hi = p.max_exp(pivot)?;
    if hi - lo != 1 {
        return None;
    }
    // split into the two pivot slices (pivot exponent zeroed in both)
    let mut top = LaurentPoly::zero(p.ctx(), p.domain());
    let mut bot = LaurentPoly::zero(p.ctx(), p.domain());
    for (e, c) in p.terms() {
        let mut e0 = e.clone();
        e0.0[pivot] = 0;
        if e.0[pivot] == hi {
            top.add_term(e0, c.clone());
        } else {
            bot.add_term(e0, c.clone());
        }
    }
    if top.num_terms() != 1 {
        return None;
    }
    let (te, tc) = top.leading().map(|(e, c)| (e.clone(), c.clone()))?;
    if !tc.magnitude().is_one() {
        return None;
    }
    // p = tc*x^te*pivot^(lo+1) + bot*pivot^lo = 0 modulo (p), and pivot^lo is
    // a unit, so pivot = -bot * x^-te / tc with tc = ±1 its own inverse.
    let subst = bot.neg().mul_monomial(&te.neg(), &tc);
    if subst.is_zero() {
        return None; // pivot would be zero, not a unit
    }
    Some(subst)
}

/// Substitute away the localized variables of a raw element, producing
/// `(num, den)` with `num` an honest polynomial and `den` exponents over
/// `localization_generators`. No reduction is performed here.
fn to_fraction_raw(
    ring: &QuotientRing,
    a: &LaurentPoly,
) -> Result<(LaurentPoly, Vec<u32>), QuotientError> {
    match &ring.kind {
        RingKind::BaumslagLocalization => {
            let c = &ring.ctx;
            let d = ring.domain;
            // strip negative exponents of z1, z2 into denominator slots
            let z1_lo = a.min_exp(1).unwrap_or(0).min(0);
            let z2_lo = a.min_exp(3).unwrap_or(0).min(0);
            let shift = ExpVec(vec![0, -z1_lo, 0, -z2_lo]);
            let shifted = a.mul_monomial(&shift, &BigInt::one());
            // substitute z1 -> 1+y1, z2 -> 1+y2 (nonnegative exponents now)
            let one = LaurentPoly::one(c, d);
            let z1v = one.add(&LaurentPoly::var(c, d, 0));
            let z2v = one.add(&LaurentPoly::var(c, d, 2));
            let g = shifted.substitute_var(1, &z1v)?.substitute_var(3, &z2v)?;
            // fold y-negativity into denominator slots
            let y1_lo = g.min_exp(0).unwrap_or(0).min(0);
            let y2_lo = g.min_exp(2).unwrap_or(0).min(0);
            let num = g.mul_monomial(&ExpVec(vec![-y1_lo, 0, -y2_lo, 0]), &BigInt::one());
            let den =
                vec![(-y1_lo) as u32, (-z1_lo) as u32, (-y2_lo) as u32, (-z2_lo) as u32];
            Ok((num, den))
        }
        RingKind::SinglePoly { p, pivot } => {
            let subst = linear_pivot_substitution(p, *pivot)
                .ok_or(QuotientError::UnsupportedCanonicalForm)?;
            let pv = *pivot;
            let k = ring.ctx.len();
            // strip negative pivot exponents into the substitution slot
            let p_lo = a.min_exp(pv).unwrap_or(0).min(0);
            let shifted = a.mul_monomial(&ExpVec::unit(k, pv).scale(-p_lo), &BigInt::one());
            let g = shifted.substitute_var(pv, &subst)?;
            // fold remaining-variable negativity into denominator slots
            let rem_vars: Vec<usize> = (0..k).filter(|v| *v != pv).collect();
            let mut den = Vec::with_capacity(k);
            let mut unshift = ExpVec::zero(k);
            for &v in &rem_vars {
                let lo = g.min_exp(v).unwrap_or(0).min(0);
                unshift.0[v] = -lo;
                den.push((-lo) as u32);
            }
            den.push((-p_lo) as u32);
            let num = g.mul_monomial(&unshift, &BigInt::one());
            Ok((num, den))
        }
        RingKind::FreeLaurent => Err(QuotientError::UnsupportedCanonicalForm),
    }
}

/// Exact equality in the quotient ring.
pub fn eq_mod(a: &RingElem, b: &RingElem, ring: &QuotientRing) -> Result<bool, QuotientError> {
    match &ring.kind {
        RingKind::FreeLaurent => match (&a.rep, &b.rep) {
            (RingRep::Poly(pa), RingRep::Poly(pb)) => Ok(pa == pb),
            _ => Err(QuotientError::RepresentationMismatch),
        },
        RingKind::SinglePoly { p, .. } => match (&a.rep, &b.rep) {
            (RingRep::Poly(pa), RingRep::Poly(pb)) => {
                let diff = pa.try_sub(pb)?;
                Ok(diff.divisible_by(p)?)
            }
            _ => {
                // fractions only arise for rings with canonical forms
                let ca = canonicalize(a, ring)?;
                let cb = canonicalize(b, ring)?;
                Ok(ca == cb)
            }
        },
        RingKind::BaumslagLocalization => {
            // cross-multiply and compare polynomials exactly
            let (na, da) = match &a.rep {
                RingRep::Poly(p) => to_fraction_raw(ring, p)?,
                RingRep::Fraction { num, den } => (num.clone(), den.clone()),
            };
            let (nb, db) = match &b.rep {
                RingRep::Poly(p) => to_fraction_raw(ring, p)?,
                RingRep::Fraction { num, den } => (num.clone(), den.clone()),
            };
            let gens = localization_generators(ring).unwrap();
            let mut lhs = na;
            let mut rhs = nb;
            for (i, g) in gens.iter().enumerate() {
                let ea = da.get(i).copied().unwrap_or(0);
                let eb = db.get(i).copied().unwrap_or(0);
                lhs = lhs.mul(&g.pow(eb));
                rhs = rhs.mul(&g.pow(ea));
            }
            Ok(lhs == rhs)
        }
    }
}

/// Unique reduced representative. Supported for the free ring (identity),
/// the Baumslag localization, and single-polynomial rings that are linear in
/// the pivot with a unit-monomial leading coefficient.
pub fn canonicalize(a: &RingElem, ring: &QuotientRing) -> Result<RingElem, QuotientError> {
    match &ring.kind {
        RingKind::FreeLaurent => match &a.rep {
            RingRep::Poly(_) => Ok(a.clone()),
            RingRep::Fraction { .. } => Err(QuotientError::RepresentationMismatch),
        },
        RingKind::SinglePoly { .. } | RingKind::BaumslagLocalization => {
            let gens = localization_generators(ring)
                .ok_or(QuotientError::UnsupportedCanonicalForm)?;
            let (mut num, mut den) = match &a.rep {
                RingRep::Poly(p) => to_fraction_raw(ring, p)?,
                RingRep::Fraction { num, den } => (num.clone(), den.clone()),
            };
            if num.is_zero() {
                return Ok(RingElem {
                    rep: RingRep::Fraction {
                        num: LaurentPoly::zero(&ring.ctx, ring.domain),
                        den: vec![0; gens.len()],
                    },
                });
            }
            // fixed reduction order: divide by each generator while possible
            for (i, g) in gens.iter().enumerate() {
                while den[i] > 0 {
                    match num.try_exact_div(g)? {
                        Some(q) => {
                            num = q;
                            den[i] -= 1;
                        }
                        None => break,
                    }
                }
            }
            Ok(RingElem { rep: RingRep::Fraction { num, den } })
        }
    }
}

/// Fingerprint: evaluations at deterministic pseudo-random points where the
/// ring relations vanish. Two coordinates per seed; equal ring elements
/// always produce equal fingerprints under the same seed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub seed: u64,
    pub values: Vec<u64>,
}

const FINGERPRINT_COORDS: usize = 2;
const ROOT_RETRIES: usize = 8;

/// Evaluation point for one fingerprint coordinate.
struct EvalPoint {
    field: ExtField,
    coords: Vec<ExtElem>,
}

fn derive_point(ring: &QuotientRing, seed: u64, coord: usize) -> Result<EvalPoint, QuotientError> {
    let q = crate::field::prime_by_index((seed as usize).wrapping_add(coord));
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (((coord as u64) << 32).wrapping_add(0x9e37_79b9)));
    match &ring.kind {
        RingKind::FreeLaurent => Err(QuotientError::UnsupportedCanonicalForm),
        RingKind::BaumslagLocalization => {
            let field = ExtField::prime(q);
            // y and 1+y must both be invertible: avoid 0 and q-1
            let y1 = rng.gen_range(1..q - 1);
            let y2 = rng.gen_range(1..q - 1);
            let coords = vec![
                field.from_base(y1),
                field.from_base(y1 + 1),
                field.from_base(y2),
                field.from_base(y2 + 1),
            ];
            Ok(EvalPoint { field, coords })
        }
        RingKind::SinglePoly { p, pivot } => {
            let k = ring.ctx.len();
            'retry: for _ in 0..ROOT_RETRIES {
                let base = ExtField::prime(q);
                let mut samples: Vec<u64> = Vec::with_capacity(k);
                for _ in 0..k {
                    samples.push(rng.gen_range(1..q));
                }
                // specialize p to a univariate polynomial in the pivot
                let lo = p.min_exp(*pivot).unwrap();
                let hi = p.max_exp(*pivot).unwrap();
                let deg = (hi - lo) as usize;
                let mut coeffs = vec![0u64; deg + 1];
                for (e, c) in p.terms() {
                    let mut t = base.from_bigint(c);
                    for (v, &exp) in e.0.iter().enumerate() {
                        if v == *pivot || exp == 0 {
                            continue;
                        }
                        let x = base.from_base(samples[v]);
                        let x = if exp < 0 { base.inv(&x) } else { x };
                        t = base.mul(&t, &base.pow(&x, exp.unsigned_abs() as u128));
                    }
                    let d = (e.0[*pivot] - lo) as usize;
                    coeffs[d] = ((coeffs[d] as u128 + t[0] as u128) % q as u128) as u64;
                }
                if coeffs[deg] == 0 {
                    continue 'retry;
                }
                let Some((field, root)) = FpPoly::any_root(&coeffs, q, &mut rng) else {
                    continue 'retry;
                };
                if field.is_zero(&root) {
                    continue 'retry; // pivot coordinate must stay invertible
                }
                let mut coords: Vec<ExtElem> =
                    samples.iter().map(|&s| field.from_base(s)).collect();
                coords[*pivot] = root;
                return Ok(EvalPoint { field, coords });
            }
            Err(QuotientError::NoRootFound)
        }
    }
}

/// Deterministic fingerprint of `a` in `ring` under `seed`.
///
/// Distinct elements collide per coordinate with probability at most
/// `deg/q` over the point choice (Schwartz-Zippel), `q ~ 2^61`.
pub fn fingerprint(
    a: &RingElem,
    ring: &QuotientRing,
    seed: u64,
) -> Result<Fingerprint, QuotientError> {
    let mut values = Vec::with_capacity(FINGERPRINT_COORDS * 3);
    for coord in 0..FINGERPRINT_COORDS {
        let pt = derive_point(ring, seed, coord)?;
        let v = eval_elem(a, ring, &pt)?;
        values.extend_from_slice(&v);
    }
    Ok(Fingerprint { seed, values })
}

fn eval_elem(a: &RingElem, ring: &QuotientRing, pt: &EvalPoint) -> Result<ExtElem, QuotientError> {
    match &a.rep {
        RingRep::Poly(p) => Ok(p.evaluate(&pt.field, &pt.coords)?),
        RingRep::Fraction { num, den } => {
            let gens =
                localization_generators(ring).ok_or(QuotientError::RepresentationMismatch)?;
            let mut acc = num.evaluate(&pt.field, &pt.coords)?;
            for (i, g) in gens.iter().enumerate() {
                let e = den.get(i).copied().unwrap_or(0);
                if e == 0 {
                    continue;
                }
                let gv = g.evaluate(&pt.field, &pt.coords)?;
                if pt.field.is_zero(&gv) {
                    return Err(QuotientError::NoRootFound);
                }
                acc = pt.field.mul(&acc, &pt.field.pow(&pt.field.inv(&gv), e as u128));
            }
            Ok(acc)
        }
    }
}
