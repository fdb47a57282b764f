//! Random-walk trajectories and the fresh-point entropy lower-bound
//! estimator.
//!
//! The estimator mirrors the conditional-entropy argument: along a
//! trajectory, count positions whose projection lands on a fresh sublattice
//! point and whose next increment is one of a fixed two-element set `Delta`
//! with equal projection. A certified cube-independence hypothesis makes the
//! `2^k` Delta-swapped variants of the trajectory hit distinct endpoints, so
//! `mean(k_n)/n * H(nu)` is an unbiased Monte Carlo estimate of a quantity
//! that bounds the Delta-restriction entropy rate from below (`nu` is the
//! restriction of the step measure to `Delta`, entropies in nats).
//!
//! Everything is deterministic given the master seed; per-trial generators
//! are derived by a counter-mode split so trials can run on any number of
//! worker threads with identical output.

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};
use thiserror::Error;

use crate::cube::{self, CubeError, DeltaPair, LatticeMask};
use crate::groups::{GroupElem, GroupError, GroupSpec, Homomorphism};
use crate::quotient::{self, RingElem, RingKind};

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("atom probabilities must be positive and sum to exactly 1 (got {0})")]
    BadProbabilities(String),
    #[error("affine combination weights must sum to exactly 1")]
    BadWeights,
    #[error("probability denominators overflow the sampling table")]
    DenominatorOverflow,
    #[error("no non-commuting pair found within the search budget")]
    SemigroupBudget,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cube(#[from] CubeError),
}

/// One atom of a finitely supported measure: a generator word, its resolved
/// element, and an exact rational probability.
#[derive(Clone, Debug)]
pub struct MeasureAtom {
    pub word: Vec<String>,
    pub elem: GroupElem,
    pub prob: Ratio<u64>,
}

/// Finitely supported probability measure on generator words.
#[derive(Clone, Debug)]
pub struct Measure {
    pub atoms: Vec<MeasureAtom>,
    denom: u64,
    cum: Vec<u64>,
}

impl Measure {
    pub fn new(spec: &GroupSpec, atoms: Vec<(Vec<String>, Ratio<u64>)>) -> Result<Self, WalkError> {
        let mut resolved = Vec::with_capacity(atoms.len());
        let mut total = Ratio::<u64>::zero();
        for (word, prob) in atoms {
            if prob <= Ratio::zero() {
                return Err(WalkError::BadProbabilities(format!("{prob}")));
            }
            total += prob;
            let elem = spec.word_to_elem(&word)?;
            resolved.push(MeasureAtom { word, elem, prob });
        }
        if total != Ratio::one() {
            return Err(WalkError::BadProbabilities(format!("{total}")));
        }
        let denom = resolved
            .iter()
            .try_fold(1u64, |acc, a| {
                let d = *a.prob.denom();
                acc.checked_mul(d / num_integer::gcd(acc, d))
            })
            .ok_or(WalkError::DenominatorOverflow)?;
        let mut cum = Vec::with_capacity(resolved.len());
        let mut acc = 0u64;
        for a in &resolved {
            acc += a.prob.numer() * (denom / a.prob.denom());
            cum.push(acc);
        }
        debug_assert_eq!(acc, denom);
        Ok(Measure { atoms: resolved, denom, cum })
    }

    /// Uniform measure on the spec's generators and their inverses.
    pub fn uniform_symmetric(spec: &GroupSpec) -> Result<Self, WalkError> {
        let n = spec.generators.len() as u64 * 2;
        let p = Ratio::new(1, n);
        let mut atoms = Vec::new();
        for g in &spec.generators {
            atoms.push((vec![g.name.clone()], p));
            atoms.push((vec![format!("{}^-1", g.name)], p));
        }
        Measure::new(spec, atoms)
    }

    fn sample_index<R: Rng>(&self, rng: &mut R) -> usize {
        let r = rng.gen_range(0..self.denom);
        self.cum.partition_point(|&c| c <= r)
    }

    /// Exact probability that a `j`-step product equals `target`, by
    /// enumerating atom sequences (`j` is small in every caller).
    pub fn convolution_prob(
        &self,
        spec: &GroupSpec,
        j: u32,
        target: &GroupElem,
    ) -> Ratio<u64> {
        let mut total = Ratio::zero();
        let mut stack: Vec<(u32, GroupElem, Ratio<u64>)> =
            vec![(0, spec.identity(), Ratio::one())];
        while let Some((depth, prod, prob)) = stack.pop() {
            if depth == j {
                if prod.exps == target.exps && spec.equals(&prod, target) {
                    total += prob;
                }
                continue;
            }
            for a in &self.atoms {
                stack.push((depth + 1, spec.multiply(&prod, &a.elem), prob * a.prob));
            }
        }
        total
    }
}

/// Affine combination of convolution powers `sum_j w_j mu^(*j)`: sampling
/// picks `j` by weight and takes `j` base steps.
#[derive(Clone, Debug)]
pub struct AffineCombination {
    pub base: Measure,
    pub weights: Vec<(u32, Ratio<u64>)>,
    denom: u64,
    cum: Vec<u64>,
}

impl AffineCombination {
    pub fn new(base: Measure, weights: Vec<(u32, Ratio<u64>)>) -> Result<Self, WalkError> {
        let total: Ratio<u64> = weights.iter().map(|(_, w)| *w).sum();
        if total != Ratio::one() || weights.iter().any(|(_, w)| *w <= Ratio::zero()) {
            return Err(WalkError::BadWeights);
        }
        let denom = weights
            .iter()
            .try_fold(1u64, |acc, (_, w)| {
                let d = *w.denom();
                acc.checked_mul(d / num_integer::gcd(acc, d))
            })
            .ok_or(WalkError::DenominatorOverflow)?;
        let mut cum = Vec::with_capacity(weights.len());
        let mut acc = 0u64;
        for (_, w) in &weights {
            acc += w.numer() * (denom / w.denom());
            cum.push(acc);
        }
        Ok(AffineCombination { base, weights, denom, cum })
    }

    /// The trivial combination `1 * mu`.
    pub fn plain(base: Measure) -> Self {
        AffineCombination::new(base, vec![(1, Ratio::one())]).expect("weights sum to 1")
    }

    fn sample_power<R: Rng>(&self, rng: &mut R) -> u32 {
        let r = rng.gen_range(0..self.denom);
        self.weights[self.cum.partition_point(|&c| c <= r)].0
    }

    /// Sample one increment: the composed element and its atom index path.
    pub fn sample_increment<R: Rng>(&self, spec: &GroupSpec, rng: &mut R) -> (GroupElem, Vec<u16>) {
        let j = self.sample_power(rng);
        let mut elem = spec.identity();
        let mut path = Vec::with_capacity(j as usize);
        for _ in 0..j {
            let idx = self.base.sample_index(rng);
            path.push(idx as u16);
            spec.multiply_in_place(&mut elem, &self.base.atoms[idx].elem);
        }
        (elem, path)
    }

    /// Exact probability that one increment equals `target`.
    pub fn increment_prob(&self, spec: &GroupSpec, target: &GroupElem) -> Ratio<u64> {
        let mut total = Ratio::zero();
        for (j, w) in &self.weights {
            if *j == 0 {
                if spec.is_identity(target) {
                    total += *w;
                }
                continue;
            }
            total += *w * self.base.convolution_prob(spec, *j, target);
        }
        total
    }
}

/// Per-trial seed derivation: a splitmix64 counter mode over
/// `(master, n, trial)`, so trials are independent and order-free.
pub fn trial_seed(master: u64, n: usize, trial: usize) -> u64 {
    let mut z = master
        .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(n as u64 + 1))
        .wrapping_add(0xbf58_476d_1ce4_e5b9u64.wrapping_mul(trial as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A fully materialized trajectory (for tests and small runs; long
/// experiments stream instead).
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub increments: Vec<GroupElem>,
    pub states: Vec<GroupElem>,
}

/// Sample a trajectory `X_1 .. X_n` with i.i.d. increments from `mu`.
pub fn sample_trajectory(
    spec: &GroupSpec,
    mu: &AffineCombination,
    n: usize,
    seed: u64,
) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut increments = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    let mut state = spec.identity();
    for _ in 0..n {
        let (inc, _) = mu.sample_increment(spec, &mut rng);
        spec.multiply_in_place(&mut state, &inc);
        increments.push(inc);
        states.push(state.clone());
    }
    Trajectory { increments, states }
}

/// Count fresh-Delta positions of a materialized trajectory: positions
/// `i < n` where `X_i` projects onto a fresh sublattice point and the next
/// increment is in the pair.
pub fn fresh_delta_count(
    trajectory: &Trajectory,
    pair: &DeltaPair,
    mask: &LatticeMask,
    spec: &GroupSpec,
) -> Result<u64, WalkError> {
    let mut seen: HashSet<Vec<i32>> = HashSet::new();
    let mut k = 0u64;
    let n = trajectory.increments.len();
    let ident = spec.identity();
    for i in 0..n {
        let state = if i == 0 { &ident } else { &trajectory.states[i - 1] };
        let proj = spec.project(pair.projection, state)?;
        if !mask.contains(&proj) {
            continue;
        }
        let fresh = seen.insert(proj);
        if !fresh {
            continue;
        }
        let inc = &trajectory.increments[i];
        if spec.equals(inc, &pair.delta1) || spec.equals(inc, &pair.delta2) {
            k += 1;
        }
    }
    Ok(k)
}

/// Streaming outcome of a single trial.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub k_n: u64,
    pub marked_fresh: u64,
    pub delta_steps: u64,
    pub endpoint: GroupElem,
    /// Diagonal exponents of `X_i` at each counted position.
    pub delta_positions: Vec<crate::laurent::ExpVec>,
    /// Atom index paths of every increment (for replay), present only when
    /// recording was requested.
    pub paths: Option<Vec<Vec<u16>>>,
}

/// Run one `n`-step trial, streaming the state.
pub fn run_trial(
    spec: &GroupSpec,
    mu: &AffineCombination,
    pair: Option<&DeltaPair>,
    mask: &LatticeMask,
    n: usize,
    seed: u64,
    record_paths: bool,
) -> Result<TrialOutcome, WalkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = spec.identity();
    let mut seen: HashSet<Vec<i32>> = HashSet::new();
    let mut delta_memo: HashMap<Vec<u16>, bool> = HashMap::new();
    let mut out = TrialOutcome {
        k_n: 0,
        marked_fresh: 0,
        delta_steps: 0,
        endpoint: spec.identity(),
        delta_positions: Vec::new(),
        paths: record_paths.then(Vec::new),
    };
    let projection = pair.map(|p| p.projection).unwrap_or(Homomorphism::Pi);
    for _ in 0..n {
        let proj = spec.project(projection, &state)?;
        let marked_fresh = mask.contains(&proj) && seen.insert(proj);
        if marked_fresh {
            out.marked_fresh += 1;
        }
        let (inc, path) = mu.sample_increment(spec, &mut rng);
        if let Some(pair) = pair {
            let is_delta = *delta_memo.entry(path.clone()).or_insert_with(|| {
                spec.equals(&inc, &pair.delta1) || spec.equals(&inc, &pair.delta2)
            });
            if is_delta {
                out.delta_steps += 1;
                if marked_fresh {
                    out.k_n += 1;
                    out.delta_positions.push(state.exps.clone());
                }
            }
        }
        if let Some(paths) = &mut out.paths {
            paths.push(path);
        }
        spec.multiply_in_place(&mut state, &inc);
    }
    out.endpoint = state;
    Ok(out)
}

/// Aggregated statistics of one experiment at a fixed `n`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct WalkStats {
    pub n: usize,
    pub trials: usize,
    pub fresh_delta_counts: Vec<u64>,
    pub mean_rate: f64,
    pub h_nu: f64,
    pub lower_bound_rate: f64,
    pub endpoint_entropy_plugin: f64,
    pub endpoint_entropy_miller_madow: f64,
    pub distinct_endpoints: usize,
    pub range_fraction: f64,
}

/// The lower-bound rate `mean(k_n)/n * H(nu)`; `stats` must be populated.
pub fn delta_restriction_lower_bound(stats: &WalkStats) -> f64 {
    stats.mean_rate * stats.h_nu
}

/// Entropy (nats) of the two-point restriction of the step measure to the
/// pair, computed from exact probabilities.
pub fn pair_entropy(
    spec: &GroupSpec,
    mu: &AffineCombination,
    pair: &DeltaPair,
) -> f64 {
    let p1 = mu.increment_prob(spec, &pair.delta1);
    let p2 = mu.increment_prob(spec, &pair.delta2);
    let total = p1 + p2;
    if total.is_zero() {
        return 0.0;
    }
    let a = (p1 / total).to_f64().unwrap();
    let b = (p2 / total).to_f64().unwrap();
    let mut h = 0.0;
    for x in [a, b] {
        if x > 0.0 {
            h -= x * x.ln();
        }
    }
    h
}

/// Endpoint keying: exact canonical bytes in the free ring, fingerprints
/// with eq_mod confirmation elsewhere.
fn endpoint_key(spec: &GroupSpec, elem: &GroupElem, seed: u64) -> (Vec<i32>, Vec<u64>) {
    match &spec.ring.kind {
        RingKind::FreeLaurent => {
            use std::hash::{Hash, Hasher};
            let mut h = std::collections::hash_map::DefaultHasher::new();
            elem.upper.hash(&mut h);
            (elem.exps.0.clone(), vec![h.finish()])
        }
        _ => {
            let fp = quotient::fingerprint(
                &RingElem::from_poly(elem.upper.clone()),
                &spec.ring,
                seed,
            )
            .expect("fingerprint available for quotient rings");
            (elem.exps.0.clone(), fp.values)
        }
    }
}

/// Exact distinct-endpoint counting: bucket by key, confirm collisions.
fn tally_endpoints(spec: &GroupSpec, endpoints: &[GroupElem], seed: u64) -> Vec<usize> {
    let mut buckets: HashMap<(Vec<i32>, Vec<u64>), Vec<(usize, usize)>> = HashMap::new();
    let mut counts: Vec<usize> = Vec::new();
    for (i, e) in endpoints.iter().enumerate() {
        let key = endpoint_key(spec, e, seed);
        let bucket = buckets.entry(key).or_default();
        let mut matched = false;
        for (rep_idx, class) in bucket.iter() {
            // key collision: confirm before merging
            if spec.equals(&endpoints[*rep_idx], e) {
                counts[*class] += 1;
                matched = true;
                break;
            }
        }
        if !matched {
            bucket.push((i, counts.len()));
            counts.push(1);
        }
    }
    counts
}

/// Plug-in and Miller-Madow endpoint entropy estimates over `trials`
/// independent trajectories (a biased desk-scale proxy for the true
/// distribution entropy at time `n`).
pub fn endpoint_entropy_estimate(
    spec: &GroupSpec,
    mu: &AffineCombination,
    n: usize,
    trials: usize,
    master_seed: u64,
) -> Result<(f64, f64, usize), WalkError> {
    let mask = LatticeMask::uniform(0, 1);
    let endpoints: Vec<GroupElem> = (0..trials)
        .map(|t| {
            run_trial(spec, mu, None, &mask, n, trial_seed(master_seed, n, t), false)
                .map(|o| o.endpoint)
        })
        .collect::<Result<_, _>>()?;
    let counts = tally_endpoints(spec, &endpoints, master_seed);
    Ok(entropy_from_counts(&counts, trials))
}

pub(crate) fn entropy_from_counts(counts: &[usize], trials: usize) -> (f64, f64, usize) {
    let t = trials as f64;
    let plugin: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.ln()
        })
        .sum();
    let mm = plugin + (counts.len() as f64 - 1.0) / (2.0 * t);
    (plugin, mm, counts.len())
}

/// Mean over trials of the fraction of fresh projected points among
/// `X_1 .. X_n`.
pub fn range_stats(
    spec: &GroupSpec,
    mu: &AffineCombination,
    projection: Homomorphism,
    n: usize,
    trials: usize,
    master_seed: u64,
) -> Result<f64, WalkError> {
    let mut total = 0.0;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(master_seed, n, t));
        let mut state = spec.identity();
        let mut seen: HashSet<Vec<i32>> = HashSet::new();
        for _ in 0..n {
            let (inc, _) = mu.sample_increment(spec, &mut rng);
            spec.multiply_in_place(&mut state, &inc);
            seen.insert(spec.project(projection, &state)?);
        }
        total += seen.len() as f64 / n as f64;
    }
    Ok(total / trials as f64)
}

/// Search the support semigroup for a non-commuting pair `s, s'` and build
/// the pair `delta1 = s s'`, `delta2 = s' s` (equal projection by
/// construction) together with an affine combination of convolution powers
/// whose support contains both.
///
/// When `lattice` is given, the pair's projection is additionally required
/// to lie in the sublattice.
pub fn build_delta_pair_via_semigroup(
    mu: &Measure,
    spec: &GroupSpec,
    projection: Homomorphism,
    lattice: Option<&LatticeMask>,
    max_len: usize,
) -> Result<(AffineCombination, DeltaPair), WalkError> {
    let atoms = &mu.atoms;
    // enumerate words over atom indices by total length, then lex
    let words_of_len = |l: usize| -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..l {
            let mut next = Vec::new();
            for w in &out {
                for i in 0..atoms.len() {
                    let mut w2 = w.clone();
                    w2.push(i);
                    next.push(w2);
                }
            }
            out = next;
        }
        out
    };
    let resolve = |w: &[usize]| -> GroupElem {
        let mut acc = spec.identity();
        for &i in w {
            spec.multiply_in_place(&mut acc, &atoms[i].elem);
        }
        acc
    };
    for total in 2..=2 * max_len {
        for la in 1..total.min(max_len + 1) {
            let lb = total - la;
            if lb < 1 || lb > max_len {
                continue;
            }
            for wa in words_of_len(la) {
                let s = resolve(&wa);
                for wb in words_of_len(lb) {
                    let sp = resolve(&wb);
                    let d1 = spec.multiply(&s, &sp);
                    let d2 = spec.multiply(&sp, &s);
                    if spec.equals(&d1, &d2) {
                        continue;
                    }
                    if let Some(mask) = lattice {
                        let proj = spec.project(projection, &d1)?;
                        if !mask.contains(&proj) {
                            continue;
                        }
                    }
                    let pair = DeltaPair::new(spec, d1, d2, projection)?;
                    let l = (la + lb) as u32;
                    let half = Ratio::new(1, 2);
                    let affine =
                        AffineCombination::new(mu.clone(), vec![(1, half), (l, half)])?;
                    return Ok((affine, pair));
                }
            }
        }
    }
    Err(WalkError::SemigroupBudget)
}

/// Outcome of the micro check on one trajectory: the `2^k` Delta-swapped
/// variants, their endpoint distinctness, the cube-independence certificate
/// for the swap conjugates, and a full-replay spot check.
#[derive(Clone, Debug)]
pub struct MicroCheck {
    pub k: usize,
    pub distinct_endpoints: usize,
    pub conjugates_independent: bool,
    pub replay_matches: bool,
}

/// Exhaustively verify, for one sampled trajectory with `k_n <= max_k`
/// counted positions, that the `2^k` Delta-swapped variants produce exactly
/// `2^k` distinct endpoints.
///
/// Endpoints are built through the exact identity
/// `endpoint(swapped S) = endpoint * prod_{i in S} conj_i` where
/// `conj_i = (X_i d1) dbar (X_i d1)^-1` is unipotent; one variant is
/// additionally recomputed by full replay as an honesty check.
pub fn micro_delta_swap_check(
    spec: &GroupSpec,
    mu: &AffineCombination,
    pair: &DeltaPair,
    mask: &LatticeMask,
    n: usize,
    seed: u64,
    max_k: usize,
) -> Result<Option<MicroCheck>, WalkError> {
    let outcome = run_trial(spec, mu, Some(pair), mask, n, seed, false)?;
    let k = outcome.delta_positions.len();
    if k == 0 || k > max_k {
        return Ok(None);
    }
    let dbar = pair.dbar(spec);
    // conjugate uppers: shift dbar's upper by exps(X_i) + exps(delta1)
    let conj: Vec<GroupElem> = outcome
        .delta_positions
        .iter()
        .map(|exps| {
            let shift = exps.add(&pair.delta1.exps);
            GroupElem {
                upper: dbar.upper.mul_monomial(&shift, &num_bigint::BigInt::one()),
                exps: crate::laurent::ExpVec::zero(spec.num_exps()),
            }
        })
        .collect();
    let cube_rep = cube::check_cube_independent(&conj, spec, max_k)?;
    // all 2^k endpoint variants
    let mut endpoints: Vec<GroupElem> = Vec::with_capacity(1 << k);
    for mask_bits in 0..(1u32 << k) {
        let mut e = outcome.endpoint.clone();
        for (i, c) in conj.iter().enumerate() {
            if mask_bits >> i & 1 == 1 {
                // unipotent: adds the shifted upper, exponents unchanged
                e.upper = e.upper.add(&c.upper);
            }
        }
        endpoints.push(e);
    }
    let counts = tally_endpoints(spec, &endpoints, seed ^ 0xD157);
    // replay spot check: re-walk the trajectory with every counted position
    // swapped (delta1 <-> delta2). A swap at position i changes the endpoint
    // by +conj_i (when delta1 held) or -conj_i (when delta2 held), so the
    // replayed endpoint must equal one of the 2^k signed variants.
    let replay_matches = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = spec.identity();
        let mut seen: HashSet<Vec<i32>> = HashSet::new();
        for _ in 0..n {
            let proj = spec.project(pair.projection, &state)?;
            let marked_fresh = mask.contains(&proj) && seen.insert(proj);
            let (inc, _path) = mu.sample_increment(spec, &mut rng);
            let is_delta =
                spec.equals(&inc, &pair.delta1) || spec.equals(&inc, &pair.delta2);
            let swapped = if marked_fresh && is_delta {
                if spec.equals(&inc, &pair.delta1) {
                    pair.delta2.clone()
                } else {
                    pair.delta1.clone()
                }
            } else {
                inc
            };
            spec.multiply_in_place(&mut state, &swapped);
        }
        let mut found = false;
        'signs: for signs in 0..(1u32 << k) {
            let mut e = outcome.endpoint.clone();
            for (i, c) in conj.iter().enumerate() {
                if signs >> i & 1 == 1 {
                    e.upper = e.upper.add(&c.upper);
                } else {
                    e.upper = e.upper.sub(&c.upper);
                }
            }
            if spec.equals(&e, &state) {
                found = true;
                break 'signs;
            }
        }
        found
    };
    Ok(Some(MicroCheck {
        k,
        distinct_endpoints: counts.len(),
        conjugates_independent: cube_rep.independent,
        replay_matches,
    }))
}
