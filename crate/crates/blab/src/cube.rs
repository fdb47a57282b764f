//! Cube-independence certification.
//!
//! A list `g_1, ..., g_n` is cube independent when the `2^n` subset products
//! `g_1^{e_1} ... g_n^{e_n}` (`e_i` in `{0,1}`, order preserved) are
//! pairwise distinct. The brute-force check enumerates the products along a
//! prefix tree (one group multiplication per node), keys them by canonical
//! form or fingerprint, and confirms any key collision exactly before
//! reporting a witness, so verdicts are never wrong in either direction.
//!
//! The structured variant for commuting unipotent families checks that every
//! nonzero `{-1,0,1}`-combination of the upper entries is nonzero modulo the
//! ring relation, which is equivalent for those inputs and cheaper per step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

use crate::groups::{GroupElem, GroupError, GroupSpec, Homomorphism};
use crate::laurent::LaurentPoly;
use crate::quotient::{self, QuotientRing, RingElem, RingKind};

/// Cap on `2^n` product enumeration.
pub const DEFAULT_BRUTE_CAP: usize = 20;
/// Cap on `3^n` sign-combination enumeration.
pub const DEFAULT_FLAT_CAP: usize = 12;

#[derive(Debug, Error)]
pub enum CubeError {
    #[error("{0} elements exceed the enumeration cap of {1}")]
    OverCap(usize, usize),
    #[error("conjugator projections must be pairwise distinct")]
    DuplicateProjection,
    #[error("delta pair must be two distinct elements with equal projection")]
    BadDeltaPair,
    #[error("flat-combination check requires unipotent elements (zero diagonal exponents)")]
    NotUnipotent,
    #[error("could not find {0} distinct sublattice elements within the word budget")]
    SamplingBudget(usize),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Quotient(#[from] crate::quotient::QuotientError),
}

/// A two-element set `{delta_1, delta_2}` with equal projection, plus the
/// projection it is measured against.
#[derive(Clone, Debug)]
pub struct DeltaPair {
    pub delta1: GroupElem,
    pub delta2: GroupElem,
    pub projection: Homomorphism,
}

impl DeltaPair {
    pub fn new(
        spec: &GroupSpec,
        delta1: GroupElem,
        delta2: GroupElem,
        projection: Homomorphism,
    ) -> Result<Self, CubeError> {
        if spec.equals(&delta1, &delta2) {
            return Err(CubeError::BadDeltaPair);
        }
        if spec.project(projection, &delta1)? != spec.project(projection, &delta2)? {
            return Err(CubeError::BadDeltaPair);
        }
        Ok(DeltaPair { delta1, delta2, projection })
    }

    /// The difference element `delta_1^-1 delta_2`.
    pub fn dbar(&self, spec: &GroupSpec) -> GroupElem {
        spec.multiply(&spec.inverse(&self.delta1), &self.delta2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CubeMethod {
    BruteForce,
    FlatCombination,
}

/// Outcome of a cube-independence check. On failure the witness holds two
/// distinct epsilon vectors whose products were verified equal by `equals`.
#[derive(Clone, Debug, Serialize)]
pub struct CubeReport {
    pub independent: bool,
    pub n: usize,
    pub witness: Option<(Vec<u8>, Vec<u8>)>,
    pub method: CubeMethod,
}

/// Key for product-distinctness bookkeeping: canonical bytes where canonical
/// forms exist, otherwise fingerprint values.
fn elem_key(
    elem: &GroupElem,
    spec: &GroupSpec,
    seed: u64,
) -> Result<(Vec<i32>, Vec<u64>), CubeError> {
    let upper = RingElem::from_poly(elem.upper.clone());
    let vals = match &spec.ring.kind {
        RingKind::FreeLaurent => {
            // exact: hash the canonical term list
            use std::hash::{Hash, Hasher};
            let mut h1 = std::collections::hash_map::DefaultHasher::new();
            elem.upper.hash(&mut h1);
            vec![h1.finish()]
        }
        _ => quotient::fingerprint(&upper, &spec.ring, seed)?.values,
    };
    Ok((elem.exps.0.clone(), vals))
}

/// Brute-force cube independence of `gamma` in `spec`.
///
/// Enumerates all `2^n` ordered subset products depth-first so each step
/// costs one multiplication, keys endpoints by `elem_key`, and confirms
/// collisions with exact equality. Elements need not commute.
pub fn check_cube_independent(
    gamma: &[GroupElem],
    spec: &GroupSpec,
    cap: usize,
) -> Result<CubeReport, CubeError> {
    let n = gamma.len();
    if n > cap {
        return Err(CubeError::OverCap(n, cap));
    }
    let seed = 0xC0BEu64;
    let mut seen: HashMap<(Vec<i32>, Vec<u64>), Vec<(Vec<u8>, GroupElem)>> = HashMap::new();

    // DFS over the prefix tree: stack of (depth, eps prefix, product).
    let mut stack: Vec<(usize, Vec<u8>, GroupElem)> = vec![(0, Vec::new(), spec.identity())];
    while let Some((depth, eps, prod)) = stack.pop() {
        if depth == n {
            let key = elem_key(&prod, spec, seed)?;
            let bucket = seen.entry(key).or_default();
            for (other_eps, other_prod) in bucket.iter() {
                // fingerprint collision: confirm exactly
                if spec.equals(other_prod, &prod) {
                    debug_assert_ne!(other_eps, &eps);
                    return Ok(CubeReport {
                        independent: false,
                        n,
                        witness: Some((other_eps.clone(), eps)),
                        method: CubeMethod::BruteForce,
                    });
                }
            }
            bucket.push((eps, prod));
            continue;
        }
        let mut eps0 = eps.clone();
        eps0.push(0);
        let mut eps1 = eps;
        eps1.push(1);
        let with = spec.multiply(&prod, &gamma[depth]);
        stack.push((depth + 1, eps0, prod));
        stack.push((depth + 1, eps1, with));
    }
    Ok(CubeReport { independent: true, n, witness: None, method: CubeMethod::BruteForce })
}

/// Cube independence of the pair along the image of its projection:
/// conjugate `dbar = delta1^-1 delta2` by each `h_i` and test the conjugates.
///
/// The `h_i` must have pairwise distinct projections.
pub fn check_cube_along_image(
    pair: &DeltaPair,
    h: &[GroupElem],
    spec: &GroupSpec,
    cap: usize,
) -> Result<CubeReport, CubeError> {
    let mut projs: Vec<Vec<i32>> = Vec::with_capacity(h.len());
    for hi in h {
        let p = spec.project(pair.projection, hi)?;
        if projs.contains(&p) {
            return Err(CubeError::DuplicateProjection);
        }
        projs.push(p);
    }
    let dbar = pair.dbar(spec);
    let rho: Vec<GroupElem> = h.iter().map(|hi| spec.conjugate(hi, &dbar)).collect();
    check_cube_independent(&rho, spec, cap)
}

/// Structured check for commuting unipotent families: independence holds iff
/// every nonzero `{-1,0,1}`-combination of the upper entries is nonzero in
/// the quotient ring. Enumerates the `3^n - 1` sign patterns directly on
/// polynomials.
pub fn flat_combination_check(
    uppers: &[RingElem],
    ring: &QuotientRing,
    cap: usize,
) -> Result<CubeReport, CubeError> {
    let n = uppers.len();
    if n > cap {
        return Err(CubeError::OverCap(n, cap));
    }
    let polys: Vec<&LaurentPoly> = uppers
        .iter()
        .map(|u| u.as_poly().ok_or(CubeError::Quotient(quotient::QuotientError::RepresentationMismatch)))
        .collect::<Result<_, _>>()?;
    let zero = LaurentPoly::zero(&ring.ctx, ring.domain);

    let is_zero_mod = |f: &LaurentPoly| -> Result<bool, CubeError> {
        if f.is_zero() {
            return Ok(true);
        }
        match &ring.kind {
            RingKind::FreeLaurent => Ok(false),
            RingKind::SinglePoly { p, .. } => Ok(f.divisible_by(p).map_err(quotient::QuotientError::from)?),
            RingKind::BaumslagLocalization => Ok(quotient::eq_mod(
                &RingElem::from_poly(f.clone()),
                &ring.zero(),
                ring,
            )?),
        }
    };

    // DFS over sign assignments with a running partial sum.
    let mut signs: Vec<i8> = Vec::with_capacity(n);
    let mut sums: Vec<LaurentPoly> = vec![zero.clone()];
    let mut cursor: Vec<i8> = vec![-2; n + 1]; // -2 marks "not yet visited"
    let mut depth = 0usize;
    loop {
        if depth == n {
            if signs.iter().any(|&s| s != 0) && is_zero_mod(sums.last().unwrap())? {
                // translate the sign vector into two epsilon vectors
                let eps_a: Vec<u8> = signs.iter().map(|&s| u8::from(s == 1)).collect();
                let eps_b: Vec<u8> = signs.iter().map(|&s| u8::from(s == -1)).collect();
                return Ok(CubeReport {
                    independent: false,
                    n,
                    witness: Some((eps_a, eps_b)),
                    method: CubeMethod::FlatCombination,
                });
            }
            // backtrack
            loop {
                if depth == 0 {
                    return Ok(CubeReport {
                        independent: true,
                        n,
                        witness: None,
                        method: CubeMethod::FlatCombination,
                    });
                }
                depth -= 1;
                signs.pop();
                sums.pop();
                if cursor[depth] < 1 {
                    break;
                }
                cursor[depth] = -2;
            }
        }
        // advance the sign at `depth`: order 0, -1, +1
        let next = match cursor[depth] {
            -2 => 0i8,
            0 => -1,
            -1 => 1,
            _ => unreachable!(),
        };
        cursor[depth] = next;
        let prev = sums.last().unwrap();
        let s = match next {
            0 => prev.clone(),
            1 => prev.add(polys[depth]),
            -1 => prev.sub(polys[depth]),
            _ => unreachable!(),
        };
        signs.push(next);
        sums.push(s);
        depth += 1;
    }
}

/// Group-level wrapper: checks that the elements are unipotent and delegates
/// to `flat_combination_check` on their upper entries.
pub fn flat_combination_check_elems(
    gamma: &[GroupElem],
    spec: &GroupSpec,
    cap: usize,
) -> Result<CubeReport, CubeError> {
    if gamma.iter().any(|g| !g.exps.is_zero()) {
        return Err(CubeError::NotUnipotent);
    }
    let uppers: Vec<RingElem> =
        gamma.iter().map(|g| RingElem::from_poly(g.upper.clone())).collect();
    flat_combination_check(&uppers, &spec.ring, cap)
}

/// Per-coordinate moduli for sublattice membership of a projection value;
/// `0` or `1` leaves a coordinate unconstrained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeMask(pub Vec<u32>);

impl LatticeMask {
    pub fn uniform(rank: usize, n: u32) -> Self {
        LatticeMask(vec![n; rank])
    }

    pub fn contains(&self, point: &[i32]) -> bool {
        point.iter().zip(&self.0).all(|(&x, &m)| m <= 1 || x.rem_euclid(m as i32) == 0)
    }
}

/// Sample `count` random short words whose projections lie in the sublattice
/// and are pairwise distinct. Deterministic in `rng_seed`.
///
/// Words are random generator products whose projection is then corrected
/// into the lattice by appending diagonal generators.
pub fn sample_sublattice_elements(
    spec: &GroupSpec,
    projection: Homomorphism,
    mask: &LatticeMask,
    count: usize,
    rng_seed: u64,
) -> Result<Vec<GroupElem>, CubeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out: Vec<GroupElem> = Vec::with_capacity(count);
    let mut seen: Vec<Vec<i32>> = Vec::with_capacity(count);
    // generators that move exactly one projected coordinate
    let rank = spec.projection_rank(projection)?;
    let mut movers: Vec<Option<GroupElem>> = vec![None; rank];
    for g in &spec.generators {
        let p = spec.project(projection, &g.elem)?;
        let nz: Vec<usize> = (0..rank).filter(|&i| p[i] != 0).collect();
        if nz.len() == 1 && p[nz[0]] == 1 {
            movers[nz[0]] = Some(g.elem.clone());
        }
    }
    let budget = 200 * count.max(1);
    for _ in 0..budget {
        if out.len() == count {
            break;
        }
        let len = rng.gen_range(0..=6);
        let mut h = spec.identity();
        for _ in 0..len {
            let i = rng.gen_range(0..spec.generators.len());
            let g = spec.generators[i].elem.clone();
            let g = if rng.gen_bool(0.5) { spec.inverse(&g) } else { g };
            h = spec.multiply(&h, &g);
        }
        // correct the projection into the lattice
        let p = spec.project(projection, &h)?;
        for i in 0..rank {
            let m = *mask.0.get(i).unwrap_or(&0);
            if m <= 1 {
                continue;
            }
            let r = p[i].rem_euclid(m as i32);
            if r != 0 {
                let Some(mover) = &movers[i] else {
                    return Err(CubeError::SamplingBudget(count));
                };
                let inv = spec.inverse(mover);
                for _ in 0..r {
                    h = spec.multiply(&h, &inv);
                }
            }
        }
        let p = spec.project(projection, &h)?;
        debug_assert!(mask.contains(&p));
        if seen.contains(&p) {
            continue;
        }
        seen.push(p);
        out.push(h);
    }
    if out.len() < count {
        return Err(CubeError::SamplingBudget(count));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{GroupSpec, Lamp};
    use crate::laurent::zpoly;

    #[test]
    fn lamplighter_distinct_lamps_independent() {
        // Z wr Z with lamps at 0 and 1
        let spec = GroupSpec::lamplighter(1, Lamp::Z);
        let d = spec.generator("d").unwrap().clone();
        let m = spec.generator("m1").unwrap().clone();
        let lamp0 = d.clone();
        let lamp1 = spec.conjugate(&m, &d);
        let rep = check_cube_independent(&[lamp0, lamp1], &spec, DEFAULT_BRUTE_CAP).unwrap();
        assert!(rep.independent);
        assert_eq!(rep.n, 2);
    }

    #[test]
    fn mod2_torsion_witness() {
        // Z wr Z/2Z: the same lamp twice collapses, eps (1,1) vs (0,0)
        let spec = GroupSpec::lamplighter(1, Lamp::ZMod(2));
        let d = spec.generator("d").unwrap().clone();
        let rep = check_cube_independent(&[d.clone(), d.clone()], &spec, DEFAULT_BRUTE_CAP).unwrap();
        assert!(!rep.independent);
        let (a, b) = rep.witness.expect("witness on failure");
        // verify the witness re-multiplies to equal elements
        let prod = |eps: &[u8]| {
            let mut acc = spec.identity();
            for (i, &e) in eps.iter().enumerate() {
                if e == 1 {
                    let g = if i == 0 { &d } else { &d };
                    acc = spec.multiply(&acc, g);
                }
            }
            acc
        };
        assert!(spec.equals(&prod(&a), &prod(&b)));
        assert_ne!(a, b);
    }

    #[test]
    fn over_cap_is_an_error() {
        let spec = GroupSpec::lamplighter(1, Lamp::Z);
        let d = spec.generator("d").unwrap().clone();
        let many: Vec<_> = (0..5).map(|_| d.clone()).collect();
        assert!(matches!(
            check_cube_independent(&many, &spec, 4),
            Err(CubeError::OverCap(5, 4))
        ));
    }

    #[test]
    fn g3_conjugates_independent_small() {
        // conjugates over distinct points of (3Z)^3 are cube independent
        let spec = GroupSpec::restricted_baumslag();
        let d = spec.generator("d").unwrap().clone();
        let mask = LatticeMask::uniform(3, 3);
        let h = sample_sublattice_elements(&spec, Homomorphism::Pi, &mask, 6, 42).unwrap();
        for hi in &h {
            let p = spec.project(Homomorphism::Pi, hi).unwrap();
            assert!(p.iter().all(|c| c % 3 == 0), "projection in (3Z)^3");
        }
        let gamma: Vec<GroupElem> = h.iter().map(|hi| spec.conjugate(hi, &d)).collect();
        let rep = check_cube_independent(&gamma, &spec, DEFAULT_BRUTE_CAP).unwrap();
        assert!(rep.independent);
    }

    #[test]
    fn along_image_g3() {
        // pair (identity, d): dbar = d, conjugates over the sublattice
        let spec = GroupSpec::restricted_baumslag();
        let d = spec.generator("d").unwrap().clone();
        let e = spec.identity();
        let pair = DeltaPair::new(&spec, e, d, Homomorphism::Pi).unwrap();
        let mask = LatticeMask::uniform(3, 3);
        let h = sample_sublattice_elements(&spec, Homomorphism::Pi, &mask, 6, 7).unwrap();
        let rep = check_cube_along_image(&pair, &h, &spec, DEFAULT_BRUTE_CAP).unwrap();
        assert!(rep.independent);
    }

    #[test]
    fn bad_delta_pair_rejected() {
        let spec = GroupSpec::restricted_baumslag();
        let d = spec.generator("d").unwrap().clone();
        // equal elements rejected
        assert!(matches!(
            DeltaPair::new(&spec, d.clone(), d.clone(), Homomorphism::Pi),
            Err(CubeError::BadDeltaPair)
        ));
        // unequal projections rejected
        let m1 = spec.generator("m1").unwrap().clone();
        assert!(matches!(
            DeltaPair::new(&spec, d, m1, Homomorphism::Pi),
            Err(CubeError::BadDeltaPair)
        ));
    }

    #[test]
    fn duplicate_projection_rejected() {
        let spec = GroupSpec::restricted_baumslag();
        let d = spec.generator("d").unwrap().clone();
        let e = spec.identity();
        let pair = DeltaPair::new(&spec, e.clone(), d.clone(), Homomorphism::Pi).unwrap();
        // two h with the same projection (both identity exps)
        let h = vec![spec.identity(), d];
        assert!(matches!(
            check_cube_along_image(&pair, &h, &spec, DEFAULT_BRUTE_CAP),
            Err(CubeError::DuplicateProjection)
        ));
    }

    #[test]
    fn z_base_overlapping_supports_still_independent() {
        // Z/2 lamps over a Z base: even with dbar supports overlapping, the
        // along-image check holds whenever the h projections are distinct
        // (the base is orderable, so the top lamp position identifies each
        // epsilon). The genuine torsion failure needs repeated positions.
        let spec = GroupSpec::lamplighter(1, Lamp::ZMod(2));
        let d = spec.generator("d").unwrap().clone();
        let m = spec.generator("m1").unwrap().clone();
        // delta2 = lamp at 0 and lamp at 1, delta1 = identity
        let two_lamps = spec.multiply(&d, &spec.conjugate(&m, &d));
        let pair =
            DeltaPair::new(&spec, spec.identity(), two_lamps.clone(), Homomorphism::Pi).unwrap();
        // h1 = identity (proj 0), h2 = shift by 1 (proj 1): supports overlap
        let h = vec![spec.identity(), m.clone()];
        let rep = check_cube_along_image(&pair, &h, &spec, DEFAULT_BRUTE_CAP).unwrap();
        assert!(rep.independent);

        // torsion collapse with repeated positions: the same two-lamp element
        // twice multiplies to the identity mod 2, and the witness verifies
        let rep = check_cube_independent(
            &[two_lamps.clone(), two_lamps.clone()],
            &spec,
            DEFAULT_BRUTE_CAP,
        )
        .unwrap();
        assert!(!rep.independent);
        let (a, b) = rep.witness.unwrap();
        let prod = |eps: &[u8]| {
            let mut acc = spec.identity();
            for &e in eps.iter() {
                if e == 1 {
                    acc = spec.multiply(&acc, &two_lamps);
                }
            }
            acc
        };
        assert!(spec.equals(&prod(&a), &prod(&b)));
    }

    #[test]
    fn flat_combination_examples() {
        let spec = GroupSpec::restricted_baumslag();
        let ring = &spec.ring;
        // uppers {X1^3, X2^3, X3^3}: all 26 combinations nonzero mod p
        let uppers = vec![
            RingElem::from_poly(zpoly("x1^3", 3)),
            RingElem::from_poly(zpoly("x2^3", 3)),
            RingElem::from_poly(zpoly("x3^3", 3)),
        ];
        let rep = flat_combination_check(&uppers, ring, DEFAULT_FLAT_CAP).unwrap();
        assert!(rep.independent);

        // uppers {1, 1}: combination (1,-1) vanishes
        let ones = vec![
            RingElem::from_poly(zpoly("1", 3)),
            RingElem::from_poly(zpoly("1", 3)),
        ];
        let rep = flat_combination_check(&ones, ring, DEFAULT_FLAT_CAP).unwrap();
        assert!(!rep.independent);
        let (a, b) = rep.witness.unwrap();
        assert_ne!(a, b);

        // q * distinct monomials with q nonzero mod p: independent
        let q = zpoly("1 + x3", 3);
        let uppers = vec![
            RingElem::from_poly(q.mul(&zpoly("x1^3", 3))),
            RingElem::from_poly(q.mul(&zpoly("x2^3", 3))),
        ];
        let rep = flat_combination_check(&uppers, ring, DEFAULT_FLAT_CAP).unwrap();
        assert!(rep.independent);
    }

    #[test]
    fn flat_check_agrees_with_bruteforce() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let spec = GroupSpec::restricted_baumslag();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for trial in 0..100 {
            let n = rng.gen_range(2..=5usize);
            // random unipotent commuting family with small monomial uppers
            let gamma: Vec<GroupElem> = (0..n)
                .map(|_| {
                    let e = crate::laurent::ExpVec(
                        (0..3).map(|_| 3 * rng.gen_range(-1..=1)).collect(),
                    );
                    GroupElem {
                        upper: spec.diag_monomial(&e),
                        exps: crate::laurent::ExpVec::zero(3),
                    }
                })
                .collect();
            let brute = check_cube_independent(&gamma, &spec, 8).unwrap();
            let flat = flat_combination_check_elems(&gamma, &spec, 8).unwrap();
            assert_eq!(brute.independent, flat.independent, "trial {trial}");
        }
    }

    #[test]
    fn non_unipotent_rejected() {
        let spec = GroupSpec::restricted_baumslag();
        let m1 = spec.generator("m1").unwrap().clone();
        assert!(matches!(
            flat_combination_check_elems(&[m1], &spec, 8),
            Err(CubeError::NotUnipotent)
        ));
    }

    #[test]
    fn monotonicity_of_independence() {
        // any sublist of an independent list is independent
        let spec = GroupSpec::restricted_baumslag();
        let d = spec.generator("d").unwrap().clone();
        let mask = LatticeMask::uniform(3, 3);
        let h = sample_sublattice_elements(&spec, Homomorphism::Pi, &mask, 5, 23).unwrap();
        let gamma: Vec<GroupElem> = h.iter().map(|hi| spec.conjugate(hi, &d)).collect();
        assert!(check_cube_independent(&gamma, &spec, 20).unwrap().independent);
        for skip in 0..gamma.len() {
            let sub: Vec<GroupElem> = gamma
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, g)| g.clone())
                .collect();
            assert!(check_cube_independent(&sub, &spec, 20).unwrap().independent);
        }
    }

    #[test]
    fn baumslag_pair_and_lattice_sampling() {
        // s = M_{Y1} d, s' = M_{Y1+1}: delta1 = s s', delta2 = s' s
        let spec = GroupSpec::baumslag_tf();
        let s = spec.word_to_elem(&["my1", "d"]).unwrap();
        let sp = spec.word_to_elem(&["mz1"]).unwrap();
        let d1 = spec.multiply(&s, &sp);
        let d2 = spec.multiply(&sp, &s);
        let pair = DeltaPair::new(&spec, d1, d2, Homomorphism::Phi).unwrap();
        // lattice 3Z x 3Z x Z on phi
        let mask = LatticeMask(vec![3, 3, 1]);
        let h = sample_sublattice_elements(&spec, Homomorphism::Phi, &mask, 5, 99).unwrap();
        for hi in &h {
            let p = spec.project(Homomorphism::Phi, hi).unwrap();
            assert_eq!(p[0].rem_euclid(3), 0);
            assert_eq!(p[1].rem_euclid(3), 0);
        }
        let rep = check_cube_along_image(&pair, &h, &spec, DEFAULT_BRUTE_CAP).unwrap();
        assert!(rep.independent);
    }

    #[test]
    fn sampling_lattice_trivial() {
        let spec = GroupSpec::restricted_baumslag();
        let mask = LatticeMask::uniform(3, 1);
        let h = sample_sublattice_elements(&spec, Homomorphism::Pi, &mask, 8, 5).unwrap();
        assert_eq!(h.len(), 8);
        let mut projs: Vec<Vec<i32>> = h
            .iter()
            .map(|hi| spec.project(Homomorphism::Pi, hi).unwrap())
            .collect();
        projs.sort();
        projs.dedup();
        assert_eq!(projs.len(), 8, "projections pairwise distinct");
    }
}
