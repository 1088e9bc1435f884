// MIO with an early phase switch: pools shrink to one test and random
// sampling stops once the switch fires.

use sbst_tune::mio::{phase_params, run_mio_observed, MioConfig};
use sbst_tune::operators::RandomSource;
use sbst_tune::param_space::preset;
use sbst_tune::run::{Budget, EventLog, SampleSource, SearchEvent};
use sbst_tune::subject::{GeneratorParams, Subject};

pub fn run_example() -> sbst_tune::Result<EventLog> {
    let subject = Subject::generate("demo", 11, GeneratorParams::default())?;
    let config = MioConfig {
        phase_switch: 0.3,
        ..MioConfig::try_from(&preset("mio-default")?)?
    };
    println!("exploration {:?}", phase_params(&config, 0.0));
    println!("exploitation {:?}", phase_params(&config, 0.3));

    let mut log = EventLog::default();
    let result = run_mio_observed(
        &subject,
        &config,
        Budget::Evaluations(800),
        8,
        &mut RandomSource::new(5),
        &mut log,
    )?;

    let (mut random, mut pooled, mut largest) = ([0u32; 2], [0u32; 2], [0usize; 2]);
    let mut phase = 0;
    for event in &log.events {
        match event {
            SearchEvent::PhaseSwitch { evaluation } => {
                println!("switch at evaluation {evaluation}");
                phase = 1;
            }
            SearchEvent::Sampled {
                source: SampleSource::Random,
                ..
            } => random[phase] += 1,
            SearchEvent::Sampled {
                source: SampleSource::Pool(_),
                ..
            } => pooled[phase] += 1,
            SearchEvent::Pools { largest: n, .. } => largest[phase] = largest[phase].max(*n),
            _ => {}
        }
    }
    for (p, name) in ["exploration", "exploitation"].iter().enumerate() {
        println!(
            "{name:>12}: {} random, {} from pools, largest pool {}",
            random[p], pooled[p], largest[p]
        );
    }
    println!("coverage {:.3}", result.coverage());
    Ok(log)
}

fn main() -> sbst_tune::Result<()> {
    run_example().map(|_| ())
}
