//! JSON configuration schemas for groups, measures, and experiments.
//!
//! A group config is one of
//! `{"family":"gkp","vars":["x1","x2","x3"],"relation":"1 + x1 - x2"}`,
//! `{"family":"lamplighter","base_rank":2,"lamp":"z2"}` (lamp `"z"` or
//! `"z<m>"`), or `{"family":"baumslag-tf"}`. Experiment configs bundle a
//! group, a measure (atom words with exact rational probabilities and an
//! optional affine combination of convolution powers), an optional
//! Delta-pair designation, and the sublattice moduli for fresh-point
//! marking.

use num_rational::Ratio;
use serde::Deserialize;
use std::sync::Arc;
use thiserror::Error;

use crate::cube::{CubeError, DeltaPair, LatticeMask};
use crate::groups::{Family, GroupError, GroupSpec, Homomorphism, Lamp};
use crate::laurent::{CoeffDomain, LaurentError, LaurentPoly, VarContext};
use crate::walks::{AffineCombination, Measure, WalkError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("could not read `{0}`: {1}")]
    Io(String, std::io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid rational `{0}` (expected `num/den` or an integer)")]
    BadRational(String),
    #[error("unknown lamp `{0}` (expected `z` or `z<m>`)")]
    BadLamp(String),
    #[error("unknown projection `{0}`")]
    BadProjection(String),
    #[error("gkp group configs need a `vars` list")]
    MissingVars,
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Cube(#[from] CubeError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub family: String,
    #[serde(default)]
    pub vars: Option<Vec<String>>,
    #[serde(default)]
    pub relation: Option<String>,
    #[serde(default)]
    pub base_rank: Option<usize>,
    #[serde(default)]
    pub lamp: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub word: Vec<String>,
    pub prob: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub power: u32,
    pub weight: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub atoms: Vec<AtomConfig>,
    #[serde(default)]
    pub affine: Option<Vec<WeightConfig>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeltaConfig {
    /// Explicit pair given as generator words.
    Atoms { delta1: Vec<String>, delta2: Vec<String>, projection: String },
    /// Search the support semigroup for a non-commuting pair whose product
    /// projection lies in the experiment's sublattice.
    Semigroup { max_len: usize, projection: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupConfig,
    pub measure: MeasureConfig,
    #[serde(default)]
    pub delta: Option<DeltaConfig>,
    /// Sublattice moduli on the projection coordinates (0 or 1 means
    /// unconstrained).
    #[serde(default)]
    pub lattice: Option<Vec<u32>>,
}

/// Everything an experiment needs, resolved.
pub struct ExperimentSetup {
    pub spec: GroupSpec,
    pub measure: AffineCombination,
    pub pair: Option<DeltaPair>,
    pub mask: LatticeMask,
}

pub fn parse_rational(text: &str) -> Result<Ratio<u64>, ConfigError> {
    let bad = || ConfigError::BadRational(text.to_string());
    if let Some((n, d)) = text.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Ratio::new(n, d))
    } else {
        let n: u64 = text.trim().parse().map_err(|_| bad())?;
        Ok(Ratio::from_integer(n))
    }
}

fn parse_projection(text: &str) -> Result<Homomorphism, ConfigError> {
    match text {
        "pi" => Ok(Homomorphism::Pi),
        "phi" => Ok(Homomorphism::Phi),
        "phi_prime" => Ok(Homomorphism::PhiPrime),
        other => Err(ConfigError::BadProjection(other.to_string())),
    }
}

pub fn build_group(cfg: &GroupConfig) -> Result<GroupSpec, ConfigError> {
    match cfg.family.as_str() {
        "gkp" => {
            let vars = cfg.vars.as_ref().ok_or(ConfigError::MissingVars)?;
            let ctx = VarContext::new(vars.clone());
            match &cfg.relation {
                Some(rel) => {
                    let p = crate::laurent::parse(rel, &ctx, CoeffDomain::Integers)?;
                    Ok(GroupSpec::gkp_with_relation(&p)?)
                }
                None => {
                    let ring = crate::quotient::QuotientRing::free(&ctx, CoeffDomain::Integers);
                    Ok(GroupSpec::gkp(ring))
                }
            }
        }
        "lamplighter" => {
            let rank = cfg.base_rank.unwrap_or(1);
            let lamp = match cfg.lamp.as_deref().unwrap_or("z") {
                "z" => Lamp::Z,
                other => {
                    let m: u64 = other
                        .strip_prefix('z')
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| ConfigError::BadLamp(other.to_string()))?;
                    Lamp::ZMod(m)
                }
            };
            Ok(GroupSpec::lamplighter(rank, lamp))
        }
        "baumslag-tf" => Ok(GroupSpec::baumslag_tf()),
        other => Err(ConfigError::BadLamp(format!("unknown family {other}"))),
    }
}

pub fn build_measure(spec: &GroupSpec, cfg: &MeasureConfig) -> Result<AffineCombination, ConfigError> {
    let atoms = cfg
        .atoms
        .iter()
        .map(|a| Ok((a.word.clone(), parse_rational(&a.prob)?)))
        .collect::<Result<Vec<_>, ConfigError>>()?;
    let base = Measure::new(spec, atoms)?;
    match &cfg.affine {
        None => Ok(AffineCombination::plain(base)),
        Some(weights) => {
            let ws = weights
                .iter()
                .map(|w| Ok((w.power, parse_rational(&w.weight)?)))
                .collect::<Result<Vec<_>, ConfigError>>()?;
            Ok(AffineCombination::new(base, ws)?)
        }
    }
}

/// Resolve a full experiment: group, measure, optional pair, lattice mask.
pub fn build_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSetup, ConfigError> {
    let spec = build_group(&cfg.group)?;
    let measure = build_measure(&spec, &cfg.measure)?;
    let default_rank = match spec.family {
        Family::BaumslagTF => 3, // phi
        _ => spec.num_exps(),
    };
    let mask = LatticeMask(
        cfg.lattice
            .clone()
            .unwrap_or_else(|| vec![1; default_rank]),
    );
    let pair = match &cfg.delta {
        None => None,
        Some(DeltaConfig::Atoms { delta1, delta2, projection }) => {
            let proj = parse_projection(projection)?;
            let d1 = spec.word_to_elem(delta1)?;
            let d2 = spec.word_to_elem(delta2)?;
            Some(DeltaPair::new(&spec, d1, d2, proj)?)
        }
        Some(DeltaConfig::Semigroup { max_len, projection }) => {
            let proj = parse_projection(projection)?;
            let (aff, pair) = crate::walks::build_delta_pair_via_semigroup(
                &measure.base,
                &spec,
                proj,
                Some(&mask),
                *max_len,
            )?;
            // replace the measure with the affine combination built around
            // the discovered pair
            return Ok(ExperimentSetup { spec, measure: aff, pair: Some(pair), mask });
        }
    };
    Ok(ExperimentSetup { spec, measure, pair, mask })
}

pub fn load_experiment(path: &str) -> Result<ExperimentSetup, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(path.to_string(), e))?;
    let cfg: ExperimentConfig = serde_json::from_str(&text)?;
    build_experiment(&cfg)
}

pub fn load_experiment_config(path: &str) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(path.to_string(), e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Infer the variable context of a polynomial literal: every identifier in
/// the text, sorted by (letter part, numeric suffix).
pub fn infer_context(text: &str) -> Arc<VarContext> {
    let mut names: Vec<String> = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let name = &text[start..i];
            if !names.iter().any(|n| n == name) {
                names.push(name.to_string());
            }
        } else {
            i += 1;
        }
    }
    names.sort_by_key(|n| {
        let split = n.find(|c: char| c.is_ascii_digit()).unwrap_or(n.len());
        let (alpha, num) = n.split_at(split);
        (alpha.to_string(), num.parse::<u64>().unwrap_or(0))
    });
    VarContext::new(names)
}

/// Parse a polynomial with an inferred context over the integers.
pub fn parse_poly_inferred(text: &str) -> Result<LaurentPoly, ConfigError> {
    let ctx = infer_context(text);
    Ok(crate::laurent::parse(text, &ctx, CoeffDomain::Integers)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/8").unwrap(), Ratio::new(1, 8));
        assert_eq!(parse_rational("3").unwrap(), Ratio::from_integer(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn group_from_json() {
        let cfg: GroupConfig = serde_json::from_str(
            r#"{"family":"gkp","vars":["x1","x2","x3"],"relation":"1 + x1 - x2"}"#,
        )
        .unwrap();
        let spec = build_group(&cfg).unwrap();
        assert_eq!(spec.generators.len(), 4);

        let cfg: GroupConfig =
            serde_json::from_str(r#"{"family":"lamplighter","base_rank":2,"lamp":"z2"}"#).unwrap();
        let spec = build_group(&cfg).unwrap();
        assert!(matches!(spec.family, Family::Lamplighter { base_rank: 2, lamp: Lamp::ZMod(2) }));

        let cfg: GroupConfig = serde_json::from_str(r#"{"family":"baumslag-tf"}"#).unwrap();
        let spec = build_group(&cfg).unwrap();
        assert_eq!(spec.generators.len(), 5);
    }

    #[test]
    fn experiment_from_json() {
        let text = r#"{
            "group": {"family":"gkp","vars":["x1","x2","x3"],"relation":"1 + x1 - x2"},
            "measure": {"atoms": [
                {"word": ["d"], "prob": "1/4"},
                {"word": ["d^-1"], "prob": "1/4"},
                {"word": ["m1"], "prob": "1/4"},
                {"word": ["m1^-1"], "prob": "1/4"}
            ]},
            "delta": {"mode":"atoms","delta1":[],"delta2":["d"],"projection":"pi"},
            "lattice": [3, 3, 3]
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        let setup = build_experiment(&cfg).unwrap();
        assert!(setup.pair.is_some());
        assert_eq!(setup.mask.0, vec![3, 3, 3]);
    }

    #[test]
    fn inferred_context() {
        let ctx = infer_context("x2^3 + x1 - x10*y1");
        assert_eq!(ctx.names, vec!["x1", "x2", "x10", "y1"]);
        let p = parse_poly_inferred("1 + x1 + x2").unwrap();
        assert_eq!(p.num_vars(), 2);
    }
}
