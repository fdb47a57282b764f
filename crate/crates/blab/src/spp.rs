//! The spaced polynomial property: deciders, certificates, refutations, and
//! mechanical verification of the supporting polynomial identities.
//!
//! A Laurent polynomial `p` has the spaced polynomial property (SPP) when
//! there is an `N > 0` such that `p` divides no nonzero flat polynomial
//! evaluated at `N`-th powers of the variables (flat = all coefficients
//! `±1`). Generalized cyclotomics (unit multiples of a univariate cyclotomic
//! evaluated at a monomial) never have the property; the univariate decider
//! certifies the property through exact Graeffe root-modulus bounds, and the
//! multivariate path combines the cyclotomic detector, a leading-coefficient
//! obstruction, and exhaustive flat-pattern searches.
//!
//! All certificates are exact: root-modulus bounds are integer inequalities
//! on Graeffe iterates, never floating-point estimates.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

use crate::laurent::{CoeffDomain, ExpVec, FlatPattern, LaurentError, LaurentPoly, VarContext};
use crate::quotient::pick_pivot;

#[derive(Debug, Error)]
pub enum SppError {
    #[error("the zero polynomial has no spaced-polynomial status")]
    ZeroInput,
    #[error("decider requires a univariate polynomial")]
    NotUnivariate,
    #[error("search box of {0} candidates exceeds the cap of {1}")]
    SearchCap(u128, u128),
    #[error("sign pattern violates the at-most-one-d constraint")]
    PatternConstraint,
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Decomposition of a generalized cyclotomic:
/// `p = sign * Phi_n(x^direction) * x^monomial_factor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenCycDecomposition {
    pub sign: i8,
    pub monomial_factor: ExpVec,
    pub direction: Vec<i32>,
    pub cyclotomic_index: u32,
}

/// Certificate kinds for a positive verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum CertificateKind {
    /// An extreme coefficient (lex-leading or lex-trailing) of the primitive
    /// part is not `±1`, or the content exceeds 1; no flat multiple can
    /// exist at any `N`.
    LeadingObstruction,
    /// A root of modulus `rho > 1` certified by exact integer bounds on a
    /// Graeffe iterate, with `rho^N > 2`.
    RootModulus { modulus_estimate: f64, graeffe_level: u32 },
    /// Exhaustive flat search found no multiple within the stated bound
    /// (a consistency cross-check, not a proof of the property).
    ExhaustiveBound { candidates: u128 },
}

/// Refutation: a flat pattern family that stays divisible at every `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoSppWitness {
    /// The base flat pattern `u`; `u(x^N)` is divisible by `p` for all `N`.
    pub base: FlatPattern,
    /// The monomial order `n` with `p | x^(n*direction) - 1`, when derived
    /// from a cyclotomic structure.
    pub power_order: Option<u32>,
    /// The `N` values at which divisibility was explicitly re-verified.
    pub tested_n: Vec<u32>,
}

#[derive(Clone, Debug)]
pub enum SppVerdict {
    HasSpp { n: u32, certificate: CertificateKind },
    NoSpp { counterexample: NoSppWitness },
    /// Not decided within the budget; if the search refuted the specific
    /// `N` that was tried, the witness for that `N` is attached.
    UnknownUpToBound { bound: u128, counterexample_at_n: Option<(u32, FlatPattern)> },
}

// ---------------------------------------------------------------------------
// Cyclotomic polynomials
// ---------------------------------------------------------------------------

/// Dense ascending coefficients of the n-th cyclotomic polynomial, computed
/// by dividing `t^n - 1` by the cyclotomic polynomials of proper divisors.
pub fn cyclotomic(n: u32) -> Vec<BigInt> {
    assert!(n >= 1);
    let mut memo: BTreeMap<u32, Vec<BigInt>> = BTreeMap::new();
    cyclotomic_memo(n, &mut memo)
}

fn cyclotomic_memo(n: u32, memo: &mut BTreeMap<u32, Vec<BigInt>>) -> Vec<BigInt> {
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    // t^n - 1
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_memo(d, memo);
            num = poly_div_exact(&num, &phi_d);
        }
    }
    memo.insert(n, num.clone());
    num
}

/// Exact division of dense univariate integer polynomials (panics if not
/// exact; callers only divide `t^n - 1` by known factors).
fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        let c = &r[i] / &b[db];
        if c.is_zero() && r[i].is_zero() {
            continue;
        }
        q[i - db] = c.clone();
        for (k, bk) in b.iter().enumerate() {
            let sub = bk * &c;
            r[i - db + k] -= sub;
        }
    }
    assert!(r.iter().all(|c| c.is_zero()), "inexact cyclotomic division");
    q
}

fn euler_phi(n: u32) -> u32 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Index search bound for cyclotomics of a given degree: all `n` with
/// `phi(n) = deg` satisfy `n <= 3*deg*loglog(deg+16) + 30`.
fn cyclotomic_index_bound(deg: u32) -> u32 {
    let d = deg as f64;
    (3.0 * d * (d + 16.0).ln().ln()).ceil() as u32 + 30
}

// ---------------------------------------------------------------------------
// Generalized cyclotomic detection
// ---------------------------------------------------------------------------

/// Detect whether `p` is a unit multiple of a univariate cyclotomic
/// evaluated at a monomial: `p = sign * Phi_n(x^v) * x^w` with `v` primitive.
///
/// Returns the exact decomposition or `None`. The reconstruction invariant
/// holds by construction: the decomposition is verified before returning.
pub fn detect_generalized_cyclotomic(
    p: &LaurentPoly,
) -> Result<Option<GenCycDecomposition>, SppError> {
    if p.is_zero() {
        return Err(SppError::ZeroInput);
    }
    let k = p.num_vars();
    let support: Vec<ExpVec> = p.terms().map(|(e, _)| e.clone()).collect();
    if support.len() < 2 {
        return Ok(None); // a monomial is a unit, not an irreducible cyclotomic
    }
    // all support points must lie on a line base + c*v with v primitive
    let base = support[0].clone();
    let diffs: Vec<Vec<i64>> = support
        .iter()
        .map(|e| e.0.iter().zip(&base.0).map(|(a, b)| (*a as i64) - (*b as i64)).collect())
        .collect();
    let first = diffs.iter().find(|d| d.iter().any(|&x| x != 0)).unwrap();
    let g = first.iter().fold(0i64, |acc, &x| num_integer::gcd(acc, x.abs()));
    let v: Vec<i64> = first.iter().map(|x| x / g).collect();
    let mut offsets: Vec<i64> = Vec::with_capacity(diffs.len());
    for d in &diffs {
        // d must equal c*v for an integer c
        let c = match v.iter().zip(d).find(|(vi, _)| **vi != 0) {
            Some((vi, di)) => {
                if di % vi != 0 {
                    return Ok(None);
                }
                di / vi
            }
            None => 0,
        };
        if v.iter().zip(d).any(|(vi, di)| vi * c != *di) {
            return Ok(None);
        }
        offsets.push(c);
    }
    let min_c = *offsets.iter().min().unwrap();
    let deg = (*offsets.iter().max().unwrap() - min_c) as u32;
    if deg == 0 {
        return Ok(None);
    }
    // univariate profile q(t) = sum coeff_j t^(c_j - min_c)
    let mut q = vec![BigInt::zero(); deg as usize + 1];
    for (e, c) in p.terms() {
        let idx = support.iter().position(|s| s == e).unwrap();
        q[(offsets[idx] - min_c) as usize] = c.clone();
    }
    if q[0].is_zero() || q[deg as usize].is_zero() {
        return Ok(None);
    }
    // compare against ±Phi_n for every n of matching degree within the bound
    let bound = cyclotomic_index_bound(deg);
    for n in 1..=bound {
        if euler_phi(n) != deg {
            continue;
        }
        let phi = cyclotomic(n);
        let matches_pos = phi == q;
        let matches_neg = phi.iter().zip(&q).all(|(a, b)| *a == -b);
        if matches_pos || matches_neg {
            let sign: i8 = if matches_pos { 1 } else { -1 };
            let v32: Vec<i32> = v.iter().map(|&x| x as i32).collect();
            // monomial factor w: p = sign * Phi_n(x^v) * x^w
            let mut w = ExpVec::zero(k);
            for (i, wi) in w.0.iter_mut().enumerate() {
                *wi = base.0[i] + (min_c as i32) * v32[i];
            }
            let dec = GenCycDecomposition {
                sign,
                monomial_factor: w,
                direction: v32,
                cyclotomic_index: n,
            };
            debug_assert!(reconstruct(&dec, p.ctx(), p.domain()) == *p);
            return Ok(Some(dec));
        }
    }
    Ok(None)
}

/// Rebuild `sign * Phi_n(x^v) * x^w` as a Laurent polynomial.
pub fn reconstruct(
    dec: &GenCycDecomposition,
    ctx: &Arc<VarContext>,
    domain: CoeffDomain,
) -> LaurentPoly {
    let phi = cyclotomic(dec.cyclotomic_index);
    let mut out = LaurentPoly::zero(ctx, domain);
    for (j, c) in phi.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut e = dec.monomial_factor.clone();
        for (i, ei) in e.0.iter_mut().enumerate() {
            *ei += (j as i32) * dec.direction[i];
        }
        out.add_term(e, c * BigInt::from(dec.sign));
    }
    out
}

// ---------------------------------------------------------------------------
// Leading obstruction
// ---------------------------------------------------------------------------

/// True when no flat polynomial can be a multiple of `p` at any `N`: the
/// content exceeds one, or an extreme coefficient (lex-leading or trailing)
/// of the primitive part is not `±1`. Flat polynomials have content 1 and
/// unit extreme coefficients, and extreme coefficients are multiplicative.
pub fn leading_obstruction(p: &LaurentPoly) -> Result<bool, SppError> {
    if p.is_zero() {
        return Err(SppError::ZeroInput);
    }
    let (content, prim) = p.content_and_primitive()?;
    if content > BigInt::one() {
        return Ok(true);
    }
    let lead_unit = prim.leading().map(|(_, c)| c.magnitude().is_one()).unwrap_or(false);
    let trail_unit = prim.trailing().map(|(_, c)| c.magnitude().is_one()).unwrap_or(false);
    Ok(!(lead_unit && trail_unit))
}

// ---------------------------------------------------------------------------
// Graeffe root-modulus certification
// ---------------------------------------------------------------------------

/// One Graeffe root-squaring step on dense ascending coefficients:
/// the returned polynomial has the squares of the roots.
fn graeffe_step(c: &[BigInt]) -> Vec<BigInt> {
    let d = c.len() - 1;
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for (i, ci) in c.iter().enumerate() {
        if i % 2 == 0 {
            even.push(ci.clone());
        } else {
            odd.push(ci.clone());
        }
    }
    let sq = |a: &[BigInt]| -> Vec<BigInt> {
        if a.is_empty() {
            return vec![];
        }
        let mut out = vec![BigInt::zero(); 2 * a.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            for (j, aj) in a.iter().enumerate() {
                out[i + j] += ai * aj;
            }
        }
        out
    };
    let e2 = sq(&even);
    let o2 = sq(&odd);
    let mut out = vec![BigInt::zero(); d + 1];
    for (i, v) in e2.into_iter().enumerate() {
        if i <= d {
            out[i] += v;
        }
    }
    for (i, v) in o2.into_iter().enumerate() {
        if i + 1 <= d {
            out[i + 1] -= v;
        }
    }
    // normalize sign so the leading coefficient is positive
    if out[d].is_negative() {
        for x in &mut out {
            *x = -&*x;
        }
    }
    out
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut out = BigInt::one();
    for i in 0..k.min(n - k) {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

/// Smallest `N <= n_cap` with a certified `rho^N > 2`, where `rho` is the
/// largest root modulus of the polynomial with the given ascending
/// coefficients, or `None`. The certificate is the exact integer inequality
/// `|a_{d-j}|^N > 2^(2^m * j) * (C(d,j) |a_d|)^N` on a Graeffe iterate,
/// which implies `rho >= (|a_{d-j}| / (C(d,j)|a_d|))^(1/(2^m j))`.
fn certify_modulus_n(coeffs: &[BigInt], n_cap: u32) -> Option<(u32, f64, u32)> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return None;
    }
    let mut iter = coeffs.to_vec();
    let mut best: Option<(u32, f64, u32)> = None;
    let mut stable = 0;
    for m in 1..=10u32 {
        iter = graeffe_step(&iter);
        let two_m: u32 = 1 << m;
        let mut found: Option<(u32, f64)> = None;
        'n_loop: for n in 1..=n_cap {
            for j in 1..=d as u32 {
                let num = iter[d - j as usize].magnitude();
                if num.is_zero() {
                    continue;
                }
                let den = binomial(d as u32, j).magnitude() * iter[d].magnitude();
                // check num^N > 2^(2^m * j) * den^N exactly
                let exp = (two_m as u64) * (j as u64);
                let lhs = num.pow(n);
                let rhs = {
                    let mut t = den.pow(n);
                    t <<= exp as usize;
                    t
                };
                if lhs > rhs {
                    // estimate rho ~ (num/den)^(1/(2^m j)); display only
                    let log2_ratio = match (num.to_f64(), den.to_f64()) {
                        (Some(nf), Some(df)) if nf.is_finite() && df.is_finite() && df > 0.0 => {
                            (nf / df).log2()
                        }
                        _ => num.bits() as f64 - den.bits() as f64,
                    };
                    let est =
                        (log2_ratio * std::f64::consts::LN_2 / (two_m as f64 * j as f64)).exp();
                    found = Some((n, est));
                    break 'n_loop;
                }
            }
        }
        match (found, &best) {
            (Some((n, est)), Some((bn, _, _))) => {
                if n < *bn {
                    best = Some((n, est, m));
                    stable = 0;
                } else {
                    stable += 1;
                    if stable >= 2 {
                        break;
                    }
                }
            }
            (Some((n, est)), None) => {
                best = Some((n, est, m));
                stable = 0;
            }
            (None, _) => {}
        }
        // coefficient blowup guard: Graeffe squares sizes every step
        if iter.iter().map(|c| c.bits()).max().unwrap_or(0) > 1 << 16 {
            break;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Univariate decider
// ---------------------------------------------------------------------------

/// Decide the spaced polynomial property for a univariate Laurent
/// polynomial (irreducibility asserted by the caller).
///
/// Order of tests: leading/content obstruction (`HasSpp(1)`), divisibility
/// of some `t^n - 1` within the cyclotomic index bound (`NoSpp` with the
/// power family), then exact Graeffe certification of a root modulus above
/// one (`HasSpp(N)` with the smallest certified `N`). Units are `NoSpp`
/// (they divide everything); inputs whose root moduli cannot be separated
/// from 1 within the precision cap come back `UnknownUpToBound`.
pub fn univariate_spp_decide(p: &LaurentPoly) -> Result<SppVerdict, SppError> {
    if p.is_zero() {
        return Err(SppError::ZeroInput);
    }
    if p.num_vars() != 1 {
        return Err(SppError::NotUnivariate);
    }
    let (_, p0) = p.strip_units();
    let ctx = p.ctx();
    let deg = p0.max_exp(0).unwrap() as u32;
    if deg == 0 {
        // constant: a unit divides everything, larger constants divide no
        // flat polynomial (content obstruction)
        let c = p0.coeff(&ExpVec::zero(1));
        if c.magnitude().is_one() {
            let base = FlatPattern::new(BTreeMap::from([
                (ExpVec(vec![0]), -1i8),
                (ExpVec(vec![1]), 1i8),
            ]));
            return Ok(SppVerdict::NoSpp {
                counterexample: NoSppWitness {
                    base,
                    power_order: Some(1),
                    tested_n: vec![1, 2, 3, 5],
                },
            });
        }
        return Ok(SppVerdict::HasSpp { n: 1, certificate: CertificateKind::LeadingObstruction });
    }
    if leading_obstruction(&p0)? {
        return Ok(SppVerdict::HasSpp { n: 1, certificate: CertificateKind::LeadingObstruction });
    }
    // cyclotomic-style refutation: p | t^n - 1 for some n in the index bound
    let bound = cyclotomic_index_bound(deg);
    for n in 1..=bound {
        let mut tn = LaurentPoly::zero(ctx, p.domain());
        tn.add_term(ExpVec(vec![n as i32]), BigInt::one());
        tn.add_term(ExpVec(vec![0]), BigInt::from(-1));
        if tn.divisible_by(&p0)? {
            let base = FlatPattern::new(BTreeMap::from([
                (ExpVec(vec![0]), -1i8),
                (ExpVec(vec![n as i32]), 1i8),
            ]));
            // divisibility persists at every N; re-verify a few explicitly
            let tested = [1u32, 2, 3, 5];
            for big_n in tested {
                let u_n = base.to_poly(ctx, p.domain()).substitute_power(big_n);
                debug_assert!(u_n.divisible_by(&p0).unwrap());
            }
            return Ok(SppVerdict::NoSpp {
                counterexample: NoSppWitness {
                    base,
                    power_order: Some(n),
                    tested_n: tested.to_vec(),
                },
            });
        }
    }
    // exact root-modulus certification on p and its reversal
    let mut coeffs = vec![BigInt::zero(); deg as usize + 1];
    for (e, c) in p0.terms() {
        coeffs[e.0[0] as usize] = c.clone();
    }
    let reversed: Vec<BigInt> = coeffs.iter().rev().cloned().collect();
    let fwd = certify_modulus_n(&coeffs, 64);
    let bwd = certify_modulus_n(&reversed, 64);
    let pick = match (fwd, bwd) {
        (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
        (a, b) => a.or(b),
    };
    if let Some((n, est, level)) = pick {
        return Ok(SppVerdict::HasSpp {
            n,
            certificate: CertificateKind::RootModulus {
                modulus_estimate: est,
                graeffe_level: level,
            },
        });
    }
    Ok(SppVerdict::UnknownUpToBound { bound: 0, counterexample_at_n: None })
}

// ---------------------------------------------------------------------------
// Exhaustive counterexample search
// ---------------------------------------------------------------------------

/// Exhaustively search flat patterns `u` with support in the box
/// `{0..=box_hi}^d` for one with `p | u(x^N)`.
///
/// Enumeration order: support subsets by size then lexicographic position
/// list, then sign vectors with the first support point fixed to `+1`
/// (a flat `u` is divisible iff `-u` is). Returns the first hit.
pub fn spp_search_counterexample(
    p: &LaurentPoly,
    n: u32,
    box_hi: u32,
    cap: u128,
) -> Result<Option<FlatPattern>, SppError> {
    if p.is_zero() {
        return Err(SppError::ZeroInput);
    }
    let d = p.num_vars();
    let points: Vec<ExpVec> = box_points(d, box_hi);
    let total: u128 = 3u128
        .checked_pow(points.len() as u32)
        .ok_or(SppError::SearchCap(u128::MAX, cap))?;
    if total > cap {
        return Err(SppError::SearchCap(total, cap));
    }

    // fast path: if p has a unit leading coefficient in its pivot, the
    // remainder map is additive; precompute remainders of the box monomials
    let pivot = pick_pivot(p);
    let remainders: Option<Vec<LaurentPoly>> = pivot.and_then(|pv| {
        let hi = p.max_exp(pv).unwrap();
        let mut top = LaurentPoly::zero(p.ctx(), p.domain());
        for (e, c) in p.terms() {
            if e.0[pv] == hi {
                let mut e0 = e.clone();
                e0.0[pv] = 0;
                top.add_term(e0, c.clone());
            }
        }
        let unit = top.num_terms() == 1 && top.leading().unwrap().1.magnitude().is_one();
        if !unit {
            return None;
        }
        let rems = points
            .iter()
            .map(|pt| {
                let mono =
                    LaurentPoly::monomial(p.ctx(), p.domain(), pt.scale(n as i32), 1);
                mono.pseudo_divide(p, pv).map(|(_, r, _)| r)
            })
            .collect::<Result<Vec<_>, _>>()
            .ok()?;
        Some(rems)
    });

    // enumerate subsets by size, then combination order, then signs
    let np = points.len();
    for size in 1..=np {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            // iterate sign vectors over the combo, first sign fixed +1
            let mut found = enumerate_signs(p, n, &points, &combo, remainders.as_deref())?;
            if let Some(pattern) = found.take() {
                return Ok(Some(pattern));
            }
            // next combination in lex order
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if combo[i] != i + np - size {
                    combo[i] += 1;
                    for j in i + 1..size {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    combo.clear();
                    break;
                }
            }
            if combo.is_empty() {
                break;
            }
        }
    }
    Ok(None)
}

fn box_points(d: usize, hi: u32) -> Vec<ExpVec> {
    let mut out = vec![ExpVec(Vec::new())];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * (hi as usize + 1));
        for p in &out {
            for e in 0..=hi as i32 {
                let mut v = p.0.clone();
                v.push(e);
                next.push(ExpVec(v));
            }
        }
        out = next;
    }
    out
}

fn enumerate_signs(
    p: &LaurentPoly,
    n: u32,
    points: &[ExpVec],
    combo: &[usize],
    remainders: Option<&[LaurentPoly]>,
) -> Result<Option<FlatPattern>, SppError> {
    let size = combo.len();
    // signs for positions 1..size (position 0 fixed to +1)
    let variants = 1usize << (size - 1);
    for mask in 0..variants {
        let signs: Vec<i8> = std::iter::once(1i8)
            .chain((0..size - 1).map(|b| if mask >> b & 1 == 0 { 1 } else { -1 }))
            .collect();
        let divisible = match remainders {
            Some(rems) => {
                let mut acc = LaurentPoly::zero(p.ctx(), p.domain());
                for (slot, &pt_idx) in combo.iter().enumerate() {
                    acc = if signs[slot] == 1 {
                        acc.add(&rems[pt_idx])
                    } else {
                        acc.sub(&rems[pt_idx])
                    };
                }
                if !acc.is_zero() {
                    false
                } else {
                    // remainder-zero under a unit pivot lc is exact, but
                    // confirm through the full divisibility test anyway
                    build_candidate(p, n, points, combo, &signs).divisible_by(p)?
                }
            }
            None => build_candidate(p, n, points, combo, &signs).divisible_by(p)?,
        };
        if divisible {
            let mut support = BTreeMap::new();
            for (slot, &pt_idx) in combo.iter().enumerate() {
                support.insert(points[pt_idx].clone(), signs[slot]);
            }
            return Ok(Some(FlatPattern::new(support)));
        }
    }
    Ok(None)
}

fn build_candidate(
    p: &LaurentPoly,
    n: u32,
    points: &[ExpVec],
    combo: &[usize],
    signs: &[i8],
) -> LaurentPoly {
    let mut u = LaurentPoly::zero(p.ctx(), p.domain());
    for (slot, &pt_idx) in combo.iter().enumerate() {
        u.add_term(points[pt_idx].scale(n as i32), BigInt::from(signs[slot]));
    }
    u
}

// ---------------------------------------------------------------------------
// The nine-fold product identity
// ---------------------------------------------------------------------------

/// Sparse bivariate polynomial with coefficients in `Z[zeta]/(zeta^2+zeta+1)`
/// stored as pairs `(a, b) = a + b*zeta`.
type EisPoly = BTreeMap<(i32, i32), (i64, i64)>;

fn eis_mul(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    // (a0 + a1 z)(b0 + b1 z) with z^2 = -1 - z
    let (a0, a1) = a;
    let (b0, b1) = b;
    (a0 * b0 - a1 * b1, a0 * b1 + a1 * b0 - a1 * b1)
}

fn eis_poly_mul(a: &EisPoly, b: &EisPoly) -> EisPoly {
    let mut out = EisPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = (ea.0 + eb.0, ea.1 + eb.1);
            let c = eis_mul(*ca, *cb);
            let entry = out.entry(e).or_insert((0, 0));
            entry.0 += c.0;
            entry.1 += c.1;
            if *entry == (0, 0) {
                out.remove(&e);
            }
        }
    }
    out
}

const ZETA_POWERS: [(i64, i64); 3] = [(1, 0), (0, 1), (-1, -1)];

/// Expand `prod_{i,j=0..2} (1 + zeta^i x + zeta^j y)` exactly over
/// `Z[zeta]/(zeta^2 + zeta + 1)`, reduce to `Z[x, y]`, and compare with the
/// expected ten-term polynomial. Returns the polynomial and the comparison.
///
/// Two independent expansion routes are used: the direct nine-fold product
/// and the grouped route through `(a+b)(a+zb)(a+z^2 b) = a^3 + b^3`.
pub fn verify_nine_product() -> (LaurentPoly, bool) {
    let ctx = VarContext::xs(2);
    // direct route
    let mut direct = EisPoly::from([((0, 0), (1, 0))]);
    for zi in ZETA_POWERS {
        for zj in ZETA_POWERS {
            let factor = EisPoly::from([((0, 0), (1, 0)), ((1, 0), zi), ((0, 1), zj)]);
            direct = eis_poly_mul(&direct, &factor);
        }
    }
    // grouped route: product over i of ((1 + zeta^i x)^3 + y^3)
    let mut grouped = EisPoly::from([((0, 0), (1, 0))]);
    for zi in ZETA_POWERS {
        let lin = EisPoly::from([((0, 0), (1, 0)), ((1, 0), zi)]);
        let cube = eis_poly_mul(&eis_poly_mul(&lin, &lin), &lin);
        let mut factor = cube;
        let e = factor.entry((0, 3)).or_insert((0, 0));
        e.0 += 1;
        grouped = eis_poly_mul(&grouped, &factor);
    }
    let routes_agree = direct == grouped;
    // reduce to Z[x, y]: every zeta-component must vanish
    let mut zeta_free = true;
    let mut out = LaurentPoly::zero(&ctx, CoeffDomain::Integers);
    for (e, (a, b)) in &direct {
        if *b != 0 {
            zeta_free = false;
        }
        out.add_term(ExpVec(vec![e.0, e.1]), BigInt::from(*a));
    }
    let expected = crate::laurent::parse(
        "1 + 3*x1^3 + 3*x2^3 + 3*x1^6 + 3*x2^6 + 3*x1^6*x2^3 + 3*x1^3*x2^6 + x1^9 + x2^9 - 21*x1^3*x2^3",
        &ctx,
        CoeffDomain::Integers,
    )
    .unwrap();
    let ok = routes_agree && zeta_free && out == expected;
    (out, ok)
}

// ---------------------------------------------------------------------------
// Baumslag flat sums
// ---------------------------------------------------------------------------

/// One signed term `Y1^(3a) (1+Y1)^(3b) Y2^c (1+Y2)^d`.
pub type BaumslagTerm = ((u32, u32, u32, u32), i8);

/// Expand `f = sum sign * Y1^(3a)(1+Y1)^(3b) Y2^c (1+Y2)^d` exactly and
/// return whether `f` is nonzero. The constraint that each `(a, b, c)`
/// carries at most one `d` is enforced.
pub fn verify_baumslag_flat_nonzero(pattern: &[BaumslagTerm]) -> Result<bool, SppError> {
    if pattern.is_empty() {
        return Err(SppError::PatternConstraint);
    }
    let mut seen: BTreeMap<(u32, u32, u32), u32> = BTreeMap::new();
    for ((a, b, c, d), s) in pattern {
        if *s != 1 && *s != -1 {
            return Err(SppError::PatternConstraint);
        }
        if let Some(prev_d) = seen.insert((*a, *b, *c), *d) {
            if prev_d != *d {
                return Err(SppError::PatternConstraint);
            }
        }
    }
    let ctx = VarContext::new(vec!["y1", "y2"]);
    let dom = CoeffDomain::Integers;
    let one = LaurentPoly::one(&ctx, dom);
    let y1 = LaurentPoly::var(&ctx, dom, 0);
    let y2 = LaurentPoly::var(&ctx, dom, 1);
    let y1p1 = one.add(&y1);
    let y2p1 = one.add(&y2);
    let mut f = LaurentPoly::zero(&ctx, dom);
    for ((a, b, c, d), s) in pattern {
        let mut t = LaurentPoly::monomial(
            &ctx,
            dom,
            ExpVec(vec![3 * *a as i32, *c as i32]),
            *s,
        );
        t = t.mul(&y1p1.pow(3 * b));
        t = t.mul(&y2p1.pow(*d));
        f = f.add(&t);
    }
    Ok(!f.is_zero())
}

// ---------------------------------------------------------------------------
// Multivariate semi-decision
// ---------------------------------------------------------------------------

/// Multivariate semi-decision pipeline: cyclotomic detector, leading
/// obstruction, then exhaustive flat search at the given `N` within the
/// budget. A search hit refutes the property for that specific `N` only and
/// is reported inside the `UnknownUpToBound` verdict.
pub fn spp_certify_pair(p: &LaurentPoly, n: u32, budget: u128) -> Result<SppVerdict, SppError> {
    if p.is_zero() {
        return Err(SppError::ZeroInput);
    }
    if let Some(dec) = detect_generalized_cyclotomic(p)? {
        let order = dec.cyclotomic_index;
        let k = p.num_vars();
        let mut hi = ExpVec::zero(k);
        for (i, h) in hi.0.iter_mut().enumerate() {
            *h = order as i32 * dec.direction[i];
        }
        let base = FlatPattern::new(BTreeMap::from([(ExpVec::zero(k), -1i8), (hi, 1i8)]));
        let tested = [1u32, 2, 3];
        for big_n in tested {
            let u_n = base.to_poly(p.ctx(), p.domain()).substitute_power(big_n);
            debug_assert!(u_n.divisible_by(p).unwrap());
        }
        return Ok(SppVerdict::NoSpp {
            counterexample: NoSppWitness {
                base,
                power_order: Some(order),
                tested_n: tested.to_vec(),
            },
        });
    }
    if leading_obstruction(p)? {
        return Ok(SppVerdict::HasSpp { n: 1, certificate: CertificateKind::LeadingObstruction });
    }
    // largest box {0..=B}^d fitting the budget
    let d = p.num_vars() as u32;
    let mut box_hi = 0u32;
    loop {
        let pts = ((box_hi + 2) as u128).pow(d);
        let Some(total) = 3u128.checked_pow(pts.min(200) as u32) else { break };
        if pts > 200 || total > budget {
            break;
        }
        box_hi += 1;
    }
    let pts = ((box_hi + 1) as u128).pow(d);
    let bound = 3u128.saturating_pow(pts.min(200) as u32);
    match spp_search_counterexample(p, n, box_hi, budget.max(bound))? {
        Some(pattern) => Ok(SppVerdict::UnknownUpToBound {
            bound,
            counterexample_at_n: Some((n, pattern)),
        }),
        None => Ok(SppVerdict::UnknownUpToBound { bound, counterexample_at_n: None }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::zpoly;

    #[test]
    fn cyclotomic_polynomials() {
        let to_i: fn(&[BigInt]) -> Vec<i64> = |v| v.iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(to_i(&cyclotomic(1)), vec![-1, 1]);
        assert_eq!(to_i(&cyclotomic(2)), vec![1, 1]);
        assert_eq!(to_i(&cyclotomic(3)), vec![1, 1, 1]);
        assert_eq!(to_i(&cyclotomic(4)), vec![1, 0, 1]);
        assert_eq!(to_i(&cyclotomic(6)), vec![1, -1, 1]);
        assert_eq!(to_i(&cyclotomic(12)), vec![1, 0, -1, 0, 1]);
        // phi(105) has coefficients of magnitude 2
        let c105 = cyclotomic(105);
        assert!(c105.iter().any(|c| c.magnitude() > BigInt::one().magnitude()));
    }

    #[test]
    fn detect_examples() {
        // x^2 + x + 1 = Phi_3
        let dec = detect_generalized_cyclotomic(&zpoly("x1^2 + x1 + 1", 1)).unwrap().unwrap();
        assert_eq!(dec.cyclotomic_index, 3);
        assert_eq!(dec.direction, vec![1]);
        // x1*x2 - 1 = Phi_1(x1 x2)
        let dec = detect_generalized_cyclotomic(&zpoly("x1*x2 - 1", 2)).unwrap().unwrap();
        assert_eq!(dec.cyclotomic_index, 1);
        assert_eq!(dec.direction, vec![1, 1]);
        // 1 + x1 - x2 is not generalized cyclotomic
        assert!(detect_generalized_cyclotomic(&zpoly("1 + x1 - x2", 2)).unwrap().is_none());
        // 1 + x + y is not (support not collinear)
        assert!(detect_generalized_cyclotomic(&zpoly("1 + x1 + x2", 2)).unwrap().is_none());
    }

    #[test]
    fn detect_with_units_and_signs() {
        // 1 - x = -(x - 1) = Phi_1(x^-1) * x
        let dec = detect_generalized_cyclotomic(&zpoly("1 - x1", 1)).unwrap().unwrap();
        assert_eq!(dec.cyclotomic_index, 1);
        let rec = reconstruct(&dec, &VarContext::xs(1), CoeffDomain::Integers);
        assert_eq!(rec, zpoly("1 - x1", 1));
        // unit-shifted: x^-1 y (x y^2 - 1)-style support on a line
        let p = zpoly("x1^2*x2^3 - x1*x2", 2);
        let dec = detect_generalized_cyclotomic(&p).unwrap().unwrap();
        let rec = reconstruct(&dec, &VarContext::xs(2), CoeffDomain::Integers);
        assert_eq!(rec, p);
        // negative of a cyclotomic still reconstructs exactly
        let p = zpoly("-x1^2 - x1 - 1", 1);
        let dec = detect_generalized_cyclotomic(&p).unwrap().unwrap();
        assert_eq!(dec.sign, -1);
        let rec = reconstruct(&dec, &VarContext::xs(1), CoeffDomain::Integers);
        assert_eq!(rec, p);
    }

    #[test]
    fn decide_cyclotomic_no_spp() {
        let v = univariate_spp_decide(&zpoly("x1^2 + x1 + 1", 1)).unwrap();
        match v {
            SppVerdict::NoSpp { counterexample } => {
                assert_eq!(counterexample.power_order, Some(3));
                // explicit re-verification at N = 1, 2, 5
                let p = zpoly("x1^2 + x1 + 1", 1);
                for n in [1u32, 2, 5] {
                    let u = counterexample
                        .base
                        .to_poly(&VarContext::xs(1), CoeffDomain::Integers)
                        .substitute_power(n);
                    assert!(u.divisible_by(&p).unwrap());
                }
            }
            other => panic!("expected NoSpp, got {other:?}"),
        }
    }

    #[test]
    fn decide_golden_ratio_has_spp_at_2() {
        // x^2 - x - 1: largest root (1+sqrt5)/2 ~ 1.618, squared ~ 2.618 > 2
        let v = univariate_spp_decide(&zpoly("x1^2 - x1 - 1", 1)).unwrap();
        match v {
            SppVerdict::HasSpp { n, certificate } => {
                assert_eq!(n, 2);
                match certificate {
                    CertificateKind::RootModulus { modulus_estimate, .. } => {
                        assert!((modulus_estimate - 1.618).abs() < 0.2);
                    }
                    other => panic!("expected root-modulus certificate, got {other:?}"),
                }
            }
            other => panic!("expected HasSpp, got {other:?}"),
        }
        // cross-check: no flat multiple at N=2 with support up to degree 8
        assert!(spp_search_counterexample(&zpoly("x1^2 - x1 - 1", 1), 2, 8, 1 << 40)
            .unwrap()
            .is_none());
    }

    #[test]
    fn decide_leading_obstruction_cases() {
        // x - 2
        let v = univariate_spp_decide(&zpoly("x1 - 2", 1)).unwrap();
        assert!(matches!(
            v,
            SppVerdict::HasSpp { n: 1, certificate: CertificateKind::LeadingObstruction }
        ));
        // cross-check by exhaustive flat search at N = 1, degree <= 8
        assert!(spp_search_counterexample(&zpoly("x1 - 2", 1), 1, 8, 1 << 40)
            .unwrap()
            .is_none());
        // 1 + 2x has only a root of modulus 1/2; the obstruction still fires
        let v = univariate_spp_decide(&zpoly("1 + 2*x1", 1)).unwrap();
        assert!(matches!(
            v,
            SppVerdict::HasSpp { n: 1, certificate: CertificateKind::LeadingObstruction }
        ));
        // units have no spaced polynomial property
        let v = univariate_spp_decide(&zpoly("x1", 1)).unwrap();
        assert!(matches!(v, SppVerdict::NoSpp { .. }));
    }

    #[test]
    fn search_prop55_negative_control() {
        // at N = 1 the first hit is 1 + x + y itself
        let p = zpoly("1 + x1 + x2", 2);
        let hit = spp_search_counterexample(&p, 1, 2, 1 << 40).unwrap().unwrap();
        let u = hit.to_poly(&VarContext::xs(2), CoeffDomain::Integers);
        assert_eq!(u, p);
        // at N = 2, x*y - 1-style generalized cyclotomic keeps dividing
        let gc = zpoly("x1*x2 - 1", 2);
        let hit = spp_search_counterexample(&gc, 2, 1, 1 << 40).unwrap().unwrap();
        let u = hit.to_poly(&VarContext::xs(2), CoeffDomain::Integers).substitute_power(2);
        assert!(u.divisible_by(&gc).unwrap());
    }

    #[test]
    fn search_cap_errors() {
        let p = zpoly("1 + x1 + x2", 2);
        assert!(matches!(
            spp_search_counterexample(&p, 3, 2, 100),
            Err(SppError::SearchCap(_, 100))
        ));
    }

    #[test]
    fn nine_product_identity() {
        let (poly, ok) = verify_nine_product();
        assert!(ok);
        assert_eq!(poly.num_terms(), 10);
        // spot values
        let c = |s: &str| poly.coeff(&exp2(s));
        assert_eq!(c("3,3"), BigInt::from(-21));
        assert_eq!(c("9,0"), BigInt::from(1));
        assert_eq!(c("0,0"), BigInt::from(1));
        assert_eq!(c("6,3"), BigInt::from(3));
        // all exponents divisible by 3
        for (e, _) in poly.terms() {
            assert!(e.0.iter().all(|x| x % 3 == 0));
        }
        // sum of |coefficients| excluding the x^3 y^3 term is 21
        let sum: BigInt = poly
            .terms()
            .filter(|(e, _)| e.0 != vec![3, 3])
            .map(|(_, c)| c.abs())
            .sum();
        assert_eq!(sum, BigInt::from(21));
    }

    fn exp2(s: &str) -> ExpVec {
        let v: Vec<i32> = s.split(',').map(|t| t.parse().unwrap()).collect();
        ExpVec(v)
    }

    #[test]
    fn baumslag_flat_examples() {
        // single positive term is nonzero
        assert!(verify_baumslag_flat_nonzero(&[((0, 0, 0, 0), 1)]).unwrap());
        // Y1^3 - (Y1+1)^3 is nonzero
        assert!(verify_baumslag_flat_nonzero(&[((1, 0, 0, 0), 1), ((0, 1, 0, 0), -1)]).unwrap());
        // constraint violation: same (a,b,c) with two different d values
        assert!(matches!(
            verify_baumslag_flat_nonzero(&[((0, 0, 0, 0), 1), ((0, 0, 0, 1), -1)]),
            Err(SppError::PatternConstraint)
        ));
        // empty pattern is rejected
        assert!(verify_baumslag_flat_nonzero(&[]).is_err());
    }

    #[test]
    fn baumslag_flat_random_patterns() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            // random valid pattern: a,b <= 2, c,d <= 3, at most one d per (a,b,c)
            let mut chosen: BTreeMap<(u32, u32, u32), (u32, i8)> = BTreeMap::new();
            let count = rng.gen_range(1..=8);
            for _ in 0..count {
                let key = (rng.gen_range(0..=2), rng.gen_range(0..=2), rng.gen_range(0..=3));
                let d = rng.gen_range(0..=3);
                let s: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
                chosen.entry(key).or_insert((d, s));
            }
            let pattern: Vec<BaumslagTerm> = chosen
                .into_iter()
                .map(|((a, b, c), (d, s))| ((a, b, c, d), s))
                .collect();
            assert!(
                verify_baumslag_flat_nonzero(&pattern).unwrap(),
                "pattern expanded to zero: {pattern:?}"
            );
        }
    }

    #[test]
    fn certify_pair_examples() {
        // 1 + x + y at N = 3 within 3^9: undecided, no counterexample
        let v = spp_certify_pair(&zpoly("1 + x1 + x2", 2), 3, 19683).unwrap();
        match v {
            SppVerdict::UnknownUpToBound { bound, counterexample_at_n } => {
                assert_eq!(bound, 19683);
                assert!(counterexample_at_n.is_none());
            }
            other => panic!("expected unknown, got {other:?}"),
        }
        // x1 x2 - 1: refuted by the detector
        let v = spp_certify_pair(&zpoly("x1*x2 - 1", 2), 3, 19683).unwrap();
        assert!(matches!(v, SppVerdict::NoSpp { .. }));
        // 2 + x + y: leading obstruction at N = 1
        let v = spp_certify_pair(&zpoly("2 + x1 + x2", 2), 1, 19683).unwrap();
        assert!(matches!(
            v,
            SppVerdict::HasSpp { n: 1, certificate: CertificateKind::LeadingObstruction }
        ));
        // cross-check the obstruction with an exhaustive search at N = 1
        assert!(spp_search_counterexample(&zpoly("2 + x1 + x2", 2), 1, 2, 1 << 40)
            .unwrap()
            .is_none());
    }

    #[test]
    fn detector_implies_counterexamples_at_small_n() {
        // every detected generalized cyclotomic yields counterexamples at
        // N = 1, 2, 3 within a small box
        for text in ["x1^2 + x1 + 1", "x1 + 1", "x1 - 1"] {
            let p = zpoly(text, 1);
            let dec = detect_generalized_cyclotomic(&p).unwrap();
            assert!(dec.is_some(), "{text}");
            let n_ord = dec.unwrap().cyclotomic_index;
            for big_n in [1u32, 2, 3] {
                let hit = spp_search_counterexample(&p, big_n, n_ord, 1 << 40).unwrap();
                assert!(hit.is_some(), "{text} at N={big_n}");
            }
        }
    }

    #[test]
    fn restriction_trick_three_vars() {
        // 1 + x1 - x2 in three variables: a counterexample search projected
        // to the minimal x3-power reduces to the two-variable case, so the
        // 2-var search box covers the 3-var question for x3-free patterns
        let p3 = zpoly("1 + x1 - x2", 3);
        let p2 = zpoly("1 + x1 - x2", 2);
        // no counterexample in either view at N = 3 within the box
        assert!(spp_search_counterexample(&p2, 3, 2, 1 << 40).unwrap().is_none());
        // x3-free 3-var patterns embed the 2-var patterns: check samples
        let u2 = zpoly("1 + x1 - x2^2", 2).substitute_power(3);
        let u3 = zpoly("1 + x1 - x2^2", 3).substitute_power(3);
        assert_eq!(u2.divisible_by(&p2).unwrap(), u3.divisible_by(&p3).unwrap());
    }
}
