//! Named configurations: the tools' defaults and the best settings found by
//! each tuner/objective combination.

use indexmap::IndexMap;

use super::{dynamosa_space, mio_space, names::*, Configuration, ParamValue};
use crate::error::{Error, Result};

enum Row {
    Dynamosa {
        length: i64,
        crossover: f64,
        mutations: i64,
        population: i64,
        bias: f64,
        selection: &'static str,
        tournament: i64,
    },
    Mio {
        length: i64,
        switch: f64,
        tests_per_target: i64,
        random: f64,
        explore_mutations: i64,
        exploit_mutations: i64,
    },
}

const fn dm(
    length: i64,
    crossover: f64,
    mutations: i64,
    population: i64,
    bias: f64,
    selection: &'static str,
    tournament: i64,
) -> Row {
    Row::Dynamosa {
        length,
        crossover,
        mutations,
        population,
        bias,
        selection,
        tournament,
    }
}

const fn mio(
    length: i64,
    switch: f64,
    tests_per_target: i64,
    random: f64,
    explore_mutations: i64,
    exploit_mutations: i64,
) -> Row {
    Row::Mio {
        length,
        switch,
        tests_per_target,
        random,
        explore_mutations,
        exploit_mutations,
    }
}

#[rustfmt::skip]
const TABLE: &[(&str, Row)] = &[
    ("dynamosa-default", dm(40, 0.75, 1, 50, 1.7, TOURNAMENT, 5)),
    ("dynamosa-gs",      dm(100, 0.75, 1, 4, 1.2, RANK, 5)),
    ("dynamosa-de-1+1",  dm(53, 0.7371902799042689, 3, 18, 1.3880136909602547, RANK, 4)),
    ("dynamosa-de-1+10", dm(39, 0.6761984293507988, 2, 18, 1.340019211181281, RANK, 12)),
    ("dynamosa-de-1+0",  dm(48, 0.6480085675338735, 3, 10, 1.681839842637804, RANK, 4)),
    ("dynamosa-de-10+1", dm(45, 0.5725919133789719, 4, 8, 1.4399447184211887, RANK, 12)),
    ("dynamosa-de-0+1",  dm(46, 0.5485404465990583, 3, 10, 1.3417410413300472, RANK, 3)),
    ("mio-default",      mio(40, 0.5, 10, 0.5, 1, 10)),
    // exact grid levels 2/3 and 1/3 rather than rounded decimals
    ("mio-gs-114",       mio(10, 0.0, 10, 2.0 / 3.0, 1, 10)),
    ("mio-gs-325",       mio(10, 0.25, 1, 1.0 / 3.0, 1, 1)),
    ("mio-de-1+1",       mio(48, 0.761911379260028, 24, 0.6725632331222376, 1, 5)),
    ("mio-de-1+10",      mio(12, 0.09257220676705963, 16, 0.7281693389867376, 6, 1)),
    ("mio-de-1+0",       mio(28, 0.09293011967714027, 1, 0.02319032555223932, 6, 2)),
    ("mio-de-10+1",      mio(17, 0.2952122304290511, 24, 0.31171486653710284, 7, 4)),
    ("mio-de-0+1",       mio(35, 0.07844694968476967, 16, 0.3325342365940621, 1, 13)),
];

/// Names of every registered preset, in registry order.
pub const PRESETS: &[&str] = &[
    "dynamosa-default",
    "dynamosa-gs",
    "dynamosa-de-1+1",
    "dynamosa-de-1+10",
    "dynamosa-de-1+0",
    "dynamosa-de-10+1",
    "dynamosa-de-0+1",
    "mio-default",
    "mio-gs-114",
    "mio-gs-325",
    "mio-de-1+1",
    "mio-de-1+10",
    "mio-de-1+0",
    "mio-de-10+1",
    "mio-de-0+1",
];

pub fn preset_names() -> Vec<String> {
    PRESETS.iter().map(|s| s.to_string()).collect()
}

/// Looks up a preset and validates it against its space.
pub fn preset(name: &str) -> Result<Configuration> {
    let row = TABLE
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, r)| r)
        .ok_or_else(|| Error::UnknownPreset {
            name: name.to_string(),
            available: preset_names(),
        })?;
    use ParamValue::{Int, Real};
    let (space, values): (_, Vec<(&str, ParamValue)>) = match *row {
        Row::Dynamosa {
            length,
            crossover,
            mutations,
            population,
            bias,
            selection,
            tournament,
        } => (
            dynamosa_space(),
            vec![
                (CHROMOSOME_LENGTH, Int(length)),
                (MUTATIONS, Int(mutations)),
                (POPULATION_SIZE, Int(population)),
                (CROSSOVER_RATE, Real(crossover)),
                (SELECTION, ParamValue::tag(selection)),
                (RANK_BIAS, Real(bias)),
                (TOURNAMENT_SIZE, Int(tournament)),
            ],
        ),
        Row::Mio {
            length,
            switch,
            tests_per_target,
            random,
            explore_mutations,
            exploit_mutations,
        } => (
            mio_space(),
            vec![
                (CHROMOSOME_LENGTH, Int(length)),
                (PHASE_SWITCH, Real(switch)),
                (EXPLORE_TESTS_PER_TARGET, Int(tests_per_target)),
                (EXPLORE_RANDOM_PROBABILITY, Real(random)),
                (EXPLORE_MUTATIONS, Int(explore_mutations)),
                (EXPLOIT_MUTATIONS, Int(exploit_mutations)),
            ],
        ),
    };
    let config = Configuration {
        space: space.id.clone(),
        values: values
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect::<IndexMap<_, _>>(),
    };
    space
        .validate(&config)
        .map_err(|e| Error::InvalidParams(format!("preset `{name}` violates its tuning bounds: {e}")))?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_matches_table() {
        assert_eq!(PRESETS.len(), TABLE.len());
        for (name, (row_name, _)) in PRESETS.iter().zip(TABLE) {
            assert_eq!(name, row_name);
        }
    }

    #[test]
    fn all_presets_validate() {
        for name in PRESETS {
            preset(name).unwrap();
        }
    }

    #[test]
    fn default_rows() {
        let d = preset("dynamosa-default").unwrap();
        assert_eq!(d.int(CHROMOSOME_LENGTH).unwrap(), 40);
        assert_eq!(d.real(CROSSOVER_RATE).unwrap(), 0.75);
        assert_eq!(d.int(MUTATIONS).unwrap(), 1);
        assert_eq!(d.int(POPULATION_SIZE).unwrap(), 50);
        assert_eq!(d.real(RANK_BIAS).unwrap(), 1.7);
        assert_eq!(d.tag(SELECTION).unwrap(), TOURNAMENT);
        assert_eq!(d.int(TOURNAMENT_SIZE).unwrap(), 5);

        let gs = preset("dynamosa-gs").unwrap();
        assert_eq!(gs.int(CHROMOSOME_LENGTH).unwrap(), 100);
        assert_eq!(gs.int(POPULATION_SIZE).unwrap(), 4);
        assert_eq!(gs.real(RANK_BIAS).unwrap(), 1.2);
        assert_eq!(gs.tag(SELECTION).unwrap(), RANK);

        let m = preset("mio-default").unwrap();
        assert_eq!(m.int(CHROMOSOME_LENGTH).unwrap(), 40);
        assert_eq!(m.real(PHASE_SWITCH).unwrap(), 0.5);
        assert_eq!(m.int(EXPLORE_TESTS_PER_TARGET).unwrap(), 10);
        assert_eq!(m.real(EXPLORE_RANDOM_PROBABILITY).unwrap(), 0.5);
        assert_eq!(m.int(EXPLORE_MUTATIONS).unwrap(), 1);
        assert_eq!(m.int(EXPLOIT_MUTATIONS).unwrap(), 10);
    }

    #[test]
    fn unknown_preset_lists_names() {
        let err = preset("nope").unwrap_err().to_string();
        assert!(err.contains("dynamosa-default") && err.contains("mio-gs-325"));
    }
}
