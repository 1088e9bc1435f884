//! Hyperparameter spaces for DynaMOSA and MIO.
//!
//! A [`ParamSpace`] is an ordered list of typed parameters. The order fixes
//! the coordinate layout used by differential evolution, and each parameter
//! also carries the discrete levels that grid search enumerates.

mod presets;

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use presets::{preset, preset_names, PRESETS};

/// Parameter names shared by the spaces, their presets and the algorithm configs.
pub mod names {
    pub const CHROMOSOME_LENGTH: &str = "chromosome_length";
    pub const MUTATIONS: &str = "mutations";
    pub const POPULATION_SIZE: &str = "population_size";
    pub const CROSSOVER_RATE: &str = "crossover_rate";
    pub const SELECTION: &str = "selection";
    pub const RANK_BIAS: &str = "rank_bias";
    pub const TOURNAMENT_SIZE: &str = "tournament_size";

    pub const PHASE_SWITCH: &str = "phase_switch";
    pub const EXPLORE_TESTS_PER_TARGET: &str = "explore_tests_per_target";
    pub const EXPLORE_RANDOM_PROBABILITY: &str = "explore_random_probability";
    pub const EXPLORE_MUTATIONS: &str = "explore_mutations";
    pub const EXPLOIT_MUTATIONS: &str = "exploit_mutations";

    pub const RANK: &str = "rank";
    pub const TOURNAMENT: &str = "tournament";
}

pub const DYNAMOSA_SPACE_ID: &str = "dynamosa";
pub const MIO_SPACE_ID: &str = "mio";

/// A single parameter value. Serialises as a bare JSON integer, number or string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Tag(String),
}

impl ParamValue {
    pub fn tag(s: &str) -> Self {
        ParamValue::Tag(s.to_string())
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v}"),
            ParamValue::Tag(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamDomain {
    Continuous { lo: f64, hi: f64 },
    Integer { lo: i64, hi: i64 },
    Categorical { options: Vec<String> },
}

impl ParamDomain {
    fn check(&self) -> std::result::Result<(), String> {
        match self {
            ParamDomain::Continuous { lo, hi } if lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less) => {
                Err(format!("empty interval [{lo}, {hi}]"))
            }
            ParamDomain::Integer { lo, hi } if lo >= hi => Err(format!("empty interval [{lo}, {hi}]")),
            ParamDomain::Categorical { options } if options.len() < 2 => {
                Err("categorical domain needs at least two options".into())
            }
            ParamDomain::Categorical { options } => {
                let unique: HashSet<_> = options.iter().collect();
                if unique.len() != options.len() {
                    Err("duplicate categorical option".into())
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn contains(&self, value: &ParamValue) -> bool {
        match (self, value) {
            (ParamDomain::Continuous { lo, hi }, ParamValue::Real(v)) => *lo <= *v && *v <= *hi,
            (ParamDomain::Integer { lo, hi }, ParamValue::Int(v)) => lo <= v && v <= hi,
            (ParamDomain::Categorical { options }, ParamValue::Tag(t)) => options.contains(t),
            _ => false,
        }
    }

    /// Coordinate bounds used by differential evolution.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            ParamDomain::Continuous { lo, hi } => (*lo, *hi),
            ParamDomain::Integer { lo, hi } => (*lo as f64, *hi as f64),
            ParamDomain::Categorical { options } => (0.0, options.len() as f64),
        }
    }

    /// Accepts integers written for a continuous domain (`1` for `1.0`).
    fn coerce(&self, value: &ParamValue) -> ParamValue {
        match (self, value) {
            (ParamDomain::Continuous { .. }, ParamValue::Int(v)) => ParamValue::Real(*v as f64),
            _ => value.clone(),
        }
    }
}

/// Marks a parameter as meaningful only for some configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relevance {
    Always,
    WhenTag { param: String, tag: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub domain: ParamDomain,
    pub grid_levels: Vec<ParamValue>,
    pub relevance: Relevance,
}

impl ParamSpec {
    pub fn new(name: &str, domain: ParamDomain, grid_levels: Vec<ParamValue>) -> Self {
        ParamSpec {
            name: name.to_string(),
            domain,
            grid_levels,
            relevance: Relevance::Always,
        }
    }

    pub fn relevant_when(mut self, param: &str, tag: &str) -> Self {
        self.relevance = Relevance::WhenTag {
            param: param.to_string(),
            tag: tag.to_string(),
        };
        self
    }
}

/// A typed hyperparameter configuration.
///
/// Serialises as `{"space": <id>, "values": {name: value}}` with values in
/// the space's parameter order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub space: String,
    pub values: IndexMap<String, ParamValue>,
}

impl Configuration {
    pub fn get(&self, name: &str) -> Result<&ParamValue> {
        self.values.get(name).ok_or_else(|| Error::InvalidValue {
            name: name.to_string(),
            reason: "missing".into(),
        })
    }

    pub fn int(&self, name: &str) -> Result<i64> {
        match self.get(name)? {
            ParamValue::Int(v) => Ok(*v),
            other => Err(type_error(name, "integer", other)),
        }
    }

    pub fn real(&self, name: &str) -> Result<f64> {
        match self.get(name)? {
            ParamValue::Real(v) => Ok(*v),
            ParamValue::Int(v) => Ok(*v as f64),
            other => Err(type_error(name, "real", other)),
        }
    }

    pub fn tag(&self, name: &str) -> Result<&str> {
        match self.get(name)? {
            ParamValue::Tag(v) => Ok(v),
            other => Err(type_error(name, "categorical", other)),
        }
    }

    /// Stable 64-bit digest of the canonical JSON form.
    pub fn digest(&self) -> u64 {
        let json = serde_json::to_string(self).expect("configuration serialises");
        crate::experiment::fnv1a64(json.as_bytes())
    }

    /// Compact `name=value` listing, used in logs and report labels.
    pub fn summary(&self) -> String {
        self.values
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn type_error(name: &str, expected: &str, found: &ParamValue) -> Error {
    Error::InvalidValue {
        name: name.to_string(),
        reason: format!("expected {expected} value, found {found}"),
    }
}

/// Clamping event raised while decoding an out-of-bounds coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeWarning {
    pub name: String,
    pub coordinate: f64,
    pub clamped_to: ParamValue,
}

#[derive(Debug, Clone)]
pub struct Decoded {
    pub config: Configuration,
    pub warnings: Vec<DecodeWarning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub grid_id: usize,
    pub config: Configuration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    pub id: String,
    specs: Vec<ParamSpec>,
}

impl ParamSpace {
    pub fn new(id: &str, specs: Vec<ParamSpec>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, spec) in specs.iter().enumerate() {
            let invalid = |reason: String| Error::InvalidValue {
                name: spec.name.clone(),
                reason,
            };
            if !seen.insert(spec.name.as_str()) {
                return Err(invalid("duplicate parameter name".into()));
            }
            spec.domain.check().map_err(invalid)?;
            if spec.grid_levels.is_empty() {
                return Err(invalid("no grid levels".into()));
            }
            for (j, level) in spec.grid_levels.iter().enumerate() {
                if !spec.domain.contains(level) {
                    return Err(invalid(format!("grid level {level} outside domain")));
                }
                if spec.grid_levels[..j].contains(level) {
                    return Err(invalid(format!("duplicate grid level {level}")));
                }
            }
            if let Relevance::WhenTag { param, tag } = &spec.relevance {
                let owner = specs[..i]
                    .iter()
                    .find(|s| &s.name == param)
                    .ok_or_else(|| invalid(format!("relevance refers to unknown earlier parameter `{param}`")))?;
                if !owner.domain.contains(&ParamValue::Tag(tag.clone())) {
                    return Err(invalid(format!("relevance tag `{tag}` not an option of `{param}`")));
                }
            }
        }
        Ok(ParamSpace {
            id: id.to_string(),
            specs,
        })
    }

    pub fn specs(&self) -> &[ParamSpec] {
        &self.specs
    }

    pub fn dimension(&self) -> usize {
        self.specs.len()
    }

    pub fn spec(&self, name: &str) -> Option<&ParamSpec> {
        self.specs.iter().find(|s| s.name == name)
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.specs.iter().map(|s| s.domain.bounds()).collect()
    }

    /// Whether parameter `index` influences the algorithm under `config`.
    pub fn is_relevant(&self, index: usize, config: &Configuration) -> bool {
        match &self.specs[index].relevance {
            Relevance::Always => true,
            Relevance::WhenTag { param, tag } => {
                matches!(config.values.get(param), Some(ParamValue::Tag(t)) if t == tag)
            }
        }
    }

    /// Checks that `config` has exactly one in-domain value per parameter.
    pub fn validate(&self, config: &Configuration) -> Result<()> {
        if config.space != self.id {
            return Err(Error::SpaceMismatch {
                expected: self.id.clone(),
                found: config.space.clone(),
            });
        }
        for spec in &self.specs {
            let value = config.get(&spec.name)?;
            if !spec.domain.contains(value) {
                return Err(Error::InvalidValue {
                    name: spec.name.clone(),
                    reason: format!("{value} outside domain {:?}", spec.domain),
                });
            }
        }
        if config.values.len() != self.specs.len() {
            let extra: Vec<_> = config
                .values
                .keys()
                .filter(|k| self.spec(k).is_none())
                .cloned()
                .collect();
            return Err(Error::InvalidValue {
                name: extra.join(","),
                reason: format!("not a parameter of space `{}`", self.id),
            });
        }
        Ok(())
    }

    /// Reorders values into parameter order, coerces integer literals written
    /// for continuous parameters, and validates the result.
    pub fn normalize(&self, config: &Configuration) -> Result<Configuration> {
        let mut values = IndexMap::new();
        for spec in &self.specs {
            let v = config.get(&spec.name)?;
            values.insert(spec.name.clone(), spec.domain.coerce(v));
        }
        for key in config.values.keys() {
            if self.spec(key).is_none() {
                return Err(Error::InvalidValue {
                    name: key.clone(),
                    reason: format!("not a parameter of space `{}`", self.id),
                });
            }
        }
        let normalized = Configuration {
            space: config.space.clone(),
            values,
        };
        self.validate(&normalized)?;
        Ok(normalized)
    }

    /// Maps a real vector onto a configuration.
    ///
    /// Integer coordinates round half away from zero, categorical coordinates
    /// take the floor as option index. Out-of-bounds coordinates are clamped
    /// and reported in [`Decoded::warnings`].
    pub fn decode(&self, vector: &[f64]) -> Result<Decoded> {
        if vector.len() != self.specs.len() {
            return Err(Error::DimensionMismatch {
                space: self.id.clone(),
                expected: self.specs.len(),
                actual: vector.len(),
            });
        }
        let mut values = IndexMap::with_capacity(self.specs.len());
        let mut warnings = Vec::new();
        for (spec, &c) in self.specs.iter().zip(vector) {
            let (value, clamped) = match &spec.domain {
                ParamDomain::Continuous { lo, hi } => {
                    if c.is_nan() {
                        (ParamValue::Real(*lo), true)
                    } else {
                        (ParamValue::Real(c.clamp(*lo, *hi)), c < *lo || c > *hi)
                    }
                }
                ParamDomain::Integer { lo, hi } => {
                    let (flo, fhi) = (*lo as f64, *hi as f64);
                    if c.is_nan() {
                        (ParamValue::Int(*lo), true)
                    } else {
                        let r = c.round().clamp(flo, fhi) as i64;
                        (ParamValue::Int(r), c < flo || c > fhi)
                    }
                }
                ParamDomain::Categorical { options } => {
                    let count = options.len();
                    let idx = if c.is_nan() || c < 0.0 {
                        0
                    } else {
                        (c.floor() as usize).min(count - 1)
                    };
                    let out = c.is_nan() || c < 0.0 || c >= count as f64;
                    (ParamValue::Tag(options[idx].clone()), out)
                }
            };
            if clamped {
                warnings.push(DecodeWarning {
                    name: spec.name.clone(),
                    coordinate: c,
                    clamped_to: value.clone(),
                });
            }
            values.insert(spec.name.clone(), value);
        }
        Ok(Decoded {
            config: Configuration {
                space: self.id.clone(),
                values,
            },
            warnings,
        })
    }

    /// Inverse of [`decode`](Self::decode) on valid configurations.
    /// Categorical tags map to option index + 0.5.
    pub fn encode(&self, config: &Configuration) -> Result<Vec<f64>> {
        let config = self.normalize(config)?;
        Ok(self
            .specs
            .iter()
            .map(|spec| match (&spec.domain, &config.values[&spec.name]) {
                (ParamDomain::Categorical { options }, ParamValue::Tag(t)) => {
                    options.iter().position(|o| o == t).expect("validated") as f64 + 0.5
                }
                (_, ParamValue::Int(v)) => *v as f64,
                (_, ParamValue::Real(v)) => *v,
                (_, ParamValue::Tag(_)) => unreachable!("validated"),
            })
            .collect())
    }

    /// Equality on relevant parameters only.
    pub fn equivalent(&self, a: &Configuration, b: &Configuration) -> bool {
        a.space == b.space
            && self.specs.iter().enumerate().all(|(i, spec)| {
                let ra = self.is_relevant(i, a);
                if ra != self.is_relevant(i, b) {
                    return false;
                }
                !ra || a.values.get(&spec.name) == b.values.get(&spec.name)
            })
    }

    /// Lexicographic product of the grid levels in parameter order.
    ///
    /// Points that differ only in irrelevant parameters are collapsed: an
    /// irrelevant parameter is pinned to its first level. Ids are 1-based.
    pub fn grid(&self) -> Vec<GridPoint> {
        let counts: Vec<usize> = self.specs.iter().map(|s| s.grid_levels.len()).collect();
        let mut idx = vec![0usize; counts.len()];
        let mut out = Vec::new();
        loop {
            let config = Configuration {
                space: self.id.clone(),
                values: self
                    .specs
                    .iter()
                    .zip(&idx)
                    .map(|(s, &i)| (s.name.clone(), s.grid_levels[i].clone()))
                    .collect(),
            };
            let canonical = (0..self.specs.len()).all(|i| idx[i] == 0 || self.is_relevant(i, &config));
            if canonical {
                out.push(GridPoint {
                    grid_id: out.len() + 1,
                    config,
                });
            }
            // odometer, last parameter fastest
            let mut pos = counts.len();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < counts[pos] {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

/// The seven-dimensional DynaMOSA space.
pub fn dynamosa_space() -> ParamSpace {
    use names::*;
    use ParamValue::{Int, Real};
    let ints = |v: &[i64]| v.iter().map(|&x| Int(x)).collect::<Vec<_>>();
    ParamSpace::new(
        DYNAMOSA_SPACE_ID,
        vec![
            ParamSpec::new(
                CHROMOSOME_LENGTH,
                ParamDomain::Integer { lo: 5, hi: 100 },
                ints(&[5, 10, 25, 50, 100]),
            ),
            ParamSpec::new(
                MUTATIONS,
                ParamDomain::Integer { lo: 0, hi: 25 },
                ints(&[0, 1, 5, 10, 25]),
            ),
            ParamSpec::new(
                POPULATION_SIZE,
                ParamDomain::Integer { lo: 4, hi: 200 },
                ints(&[4, 10, 50, 100, 200]),
            ),
            ParamSpec::new(
                CROSSOVER_RATE,
                ParamDomain::Continuous { lo: 0.0, hi: 1.0 },
                vec![Real(0.0), Real(0.25), Real(0.5), Real(0.75), Real(1.0)],
            ),
            ParamSpec::new(
                SELECTION,
                ParamDomain::Categorical {
                    options: vec![RANK.into(), TOURNAMENT.into()],
                },
                vec![ParamValue::tag(RANK), ParamValue::tag(TOURNAMENT)],
            ),
            ParamSpec::new(
                RANK_BIAS,
                ParamDomain::Continuous { lo: 1.01, hi: 1.99 },
                vec![Real(1.2), Real(1.7)],
            )
            .relevant_when(SELECTION, RANK),
            ParamSpec::new(TOURNAMENT_SIZE, ParamDomain::Integer { lo: 1, hi: 20 }, ints(&[2, 7]))
                .relevant_when(SELECTION, TOURNAMENT),
        ],
    )
    .expect("dynamosa space is well formed")
}

/// The six-dimensional MIO space. Exploitation keeps one test per target and
/// never samples randomly, so those two values are not dimensions.
pub fn mio_space() -> ParamSpace {
    use names::*;
    use ParamValue::{Int, Real};
    let ints = |v: &[i64]| v.iter().map(|&x| Int(x)).collect::<Vec<_>>();
    let unit = ParamDomain::Continuous { lo: 0.0, hi: 1.0 };
    ParamSpace::new(
        MIO_SPACE_ID,
        vec![
            ParamSpec::new(
                CHROMOSOME_LENGTH,
                ParamDomain::Integer { lo: 10, hi: 50 },
                ints(&[10, 25, 50]),
            ),
            ParamSpec::new(
                PHASE_SWITCH,
                unit.clone(),
                vec![Real(0.0), Real(0.25), Real(0.5), Real(0.75), Real(1.0)],
            ),
            ParamSpec::new(
                EXPLORE_TESTS_PER_TARGET,
                ParamDomain::Integer { lo: 1, hi: 25 },
                ints(&[1, 10, 25]),
            ),
            ParamSpec::new(
                EXPLORE_RANDOM_PROBABILITY,
                unit,
                vec![Real(0.0), Real(1.0 / 3.0), Real(2.0 / 3.0), Real(1.0)],
            ),
            ParamSpec::new(
                EXPLORE_MUTATIONS,
                ParamDomain::Integer { lo: 1, hi: 25 },
                ints(&[1, 10, 25]),
            ),
            ParamSpec::new(
                EXPLOIT_MUTATIONS,
                ParamDomain::Integer { lo: 1, hi: 25 },
                ints(&[1, 10, 25]),
            ),
        ],
    )
    .expect("mio space is well formed")
}

/// The space a configuration claims to belong to.
pub fn space_by_id(id: &str) -> Result<ParamSpace> {
    match id {
        DYNAMOSA_SPACE_ID => Ok(dynamosa_space()),
        MIO_SPACE_ID => Ok(mio_space()),
        other => Err(Error::InvalidParams(format!("unknown space `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels(space: &ParamSpace, name: &str) -> Vec<ParamValue> {
        space.spec(name).unwrap().grid_levels.clone()
    }

    #[test]
    fn dynamosa_space_shape() {
        let space = dynamosa_space();
        assert_eq!(space.dimension(), 7);
        use ParamValue::Real;
        assert_eq!(
            levels(&space, names::CROSSOVER_RATE),
            vec![Real(0.0), Real(0.25), Real(0.5), Real(0.75), Real(1.0)]
        );
        assert_eq!(space.grid().len(), 2500);
    }

    #[test]
    fn mio_space_shape() {
        let space = mio_space();
        assert_eq!(space.dimension(), 6);
        use ParamValue::Real;
        assert_eq!(
            levels(&space, names::EXPLORE_RANDOM_PROBABILITY),
            vec![Real(0.0), Real(1.0 / 3.0), Real(2.0 / 3.0), Real(1.0)]
        );
        assert_eq!(space.grid().len(), 1620);
    }

    #[test]
    fn decode_rounds_and_floors() {
        let space = dynamosa_space();
        let mut v: Vec<f64> = space.bounds().iter().map(|b| b.0).collect();
        v[2] = 4.6;
        v[4] = 0.0;
        let d = space.decode(&v).unwrap();
        assert!(d.warnings.is_empty());
        assert_eq!(d.config.int(names::POPULATION_SIZE).unwrap(), 5);
        assert_eq!(d.config.tag(names::SELECTION).unwrap(), names::RANK);
    }

    #[test]
    fn decode_at_lower_bounds() {
        let space = dynamosa_space();
        let v: Vec<f64> = space.bounds().iter().map(|b| b.0).collect();
        let c = space.decode(&v).unwrap().config;
        assert_eq!(c.int(names::CHROMOSOME_LENGTH).unwrap(), 5);
        assert_eq!(c.int(names::MUTATIONS).unwrap(), 0);
        assert_eq!(c.int(names::POPULATION_SIZE).unwrap(), 4);
        assert_eq!(c.real(names::CROSSOVER_RATE).unwrap(), 0.0);
        assert_eq!(c.tag(names::SELECTION).unwrap(), names::RANK);
        assert_eq!(c.real(names::RANK_BIAS).unwrap(), 1.01);
        assert_eq!(c.int(names::TOURNAMENT_SIZE).unwrap(), 1);
    }

    #[test]
    fn decode_clamps_and_warns() {
        let space = dynamosa_space();
        let mut v: Vec<f64> = space.bounds().iter().map(|b| b.0).collect();
        v[0] = 250.0;
        v[4] = 2.0;
        let d = space.decode(&v).unwrap();
        assert_eq!(d.config.int(names::CHROMOSOME_LENGTH).unwrap(), 100);
        assert_eq!(d.config.tag(names::SELECTION).unwrap(), names::TOURNAMENT);
        assert_eq!(d.warnings.len(), 2);
        assert!(space.decode(&v[..3]).is_err());
    }

    #[test]
    fn encode_rules() {
        let space = dynamosa_space();
        let default = preset("dynamosa-default").unwrap();
        let v = space.encode(&default).unwrap();
        assert_eq!(v[4], 1.5);
        assert_eq!(v[5], 1.7);
        assert_eq!(space.decode(&v).unwrap().config, default);

        let mut bad = default.clone();
        bad.values.insert(names::POPULATION_SIZE.into(), ParamValue::Int(500));
        assert!(space.encode(&bad).is_err());
    }

    #[test]
    fn single_spec_grid() {
        let space = ParamSpace::new(
            "one",
            vec![ParamSpec::new(
                "k",
                ParamDomain::Categorical {
                    options: vec!["a".into(), "b".into()],
                },
                vec![ParamValue::tag("a"), ParamValue::tag("b")],
            )],
        )
        .unwrap();
        let grid = space.grid();
        assert_eq!(grid.len(), 2);
        assert_eq!((grid[0].grid_id, grid[0].config.tag("k").unwrap()), (1, "a"));
        assert_eq!((grid[1].grid_id, grid[1].config.tag("k").unwrap()), (2, "b"));
    }

    #[test]
    fn rejects_malformed_specs() {
        let bad_grid = ParamSpec::new("x", ParamDomain::Integer { lo: 0, hi: 3 }, vec![ParamValue::Int(4)]);
        assert!(ParamSpace::new("s", vec![bad_grid]).is_err());
        let empty = ParamSpec::new(
            "x",
            ParamDomain::Continuous { lo: 1.0, hi: 1.0 },
            vec![ParamValue::Real(1.0)],
        );
        assert!(ParamSpace::new("s", vec![empty]).is_err());
        let dup = ParamSpec::new(
            "x",
            ParamDomain::Integer { lo: 0, hi: 3 },
            vec![ParamValue::Int(1), ParamValue::Int(1)],
        );
        assert!(ParamSpace::new("s", vec![dup]).is_err());
    }

    #[test]
    fn relevance_aware_equality() {
        let space = dynamosa_space();
        let a = preset("dynamosa-gs").unwrap();
        let mut b = a.clone();
        b.values.insert(names::TOURNAMENT_SIZE.into(), ParamValue::Int(19));
        assert_ne!(a, b);
        assert!(space.equivalent(&a, &b));
        b.values.insert(names::RANK_BIAS.into(), ParamValue::Real(1.3));
        assert!(!space.equivalent(&a, &b));
    }

    #[test]
    fn configuration_json_layout() {
        let c = preset("dynamosa-default").unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(
            json,
            r#"{"space":"dynamosa","values":{"chromosome_length":40,"mutations":1,"population_size":50,"crossover_rate":0.75,"selection":"tournament","rank_bias":1.7,"tournament_size":5}}"#
        );
        let back: Configuration = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn normalize_coerces_integer_literals() {
        let space = mio_space();
        let json = r#"{"space":"mio","values":{"phase_switch":1,"chromosome_length":10,
            "explore_tests_per_target":1,"explore_random_probability":0,
            "explore_mutations":1,"exploit_mutations":1}}"#;
        let c: Configuration = serde_json::from_str(json).unwrap();
        assert!(space.validate(&c).is_err());
        let n = space.normalize(&c).unwrap();
        assert_eq!(n.values.get_index(1).unwrap().0, names::PHASE_SWITCH);
        assert_eq!(n.real(names::PHASE_SWITCH).unwrap(), 1.0);
    }
}
