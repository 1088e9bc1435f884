// Generate a subject suite, look at one subject and score a random test
// against every goal.

use sbst_tune::experiment::{split_suite, Suite};
use sbst_tune::operators::{random_testcase, RandomSource};
use sbst_tune::subject::GeneratorParams;

pub fn run_example() -> sbst_tune::Result<Suite> {
    let suite = Suite::generate(10, 42, GeneratorParams::default())?;
    for s in &suite.subjects {
        println!(
            "{}: {} nodes, {} goals, {} roots",
            s.id,
            s.node_count(),
            s.goal_count(),
            s.root_count()
        );
    }

    let subject = &suite.subjects[0];
    let mut rng = RandomSource::new(7);
    let test = random_testcase(subject, 10, &mut rng);
    let trace = subject.execute(&test);
    println!("\n{} statements against {}", test.len(), subject.id);
    for goal in subject.goals() {
        println!("  {goal:?}: fitness {:.3}", subject.fitness(&trace, goal));
    }
    println!("covered: {:?}", subject.covered_goals(&trace));

    let (train, test_ids) = split_suite(&suite.ids(), 0.8, 1)?;
    println!("\ntrain {train:?}\ntest  {test_ids:?}");
    Ok(suite)
}

fn main() -> sbst_tune::Result<()> {
    run_example().map(|_| ())
}
