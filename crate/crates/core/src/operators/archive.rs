use crate::subject::{Goal, Subject, TestCase};

/// Covered goals and their shortest known witness. Entries are never removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    witnesses: Vec<Option<TestCase>>,
    covered: usize,
}

impl Archive {
    pub fn new(goal_count: usize) -> Self {
        Archive {
            witnesses: vec![None; goal_count],
            covered: 0,
        }
    }

    pub fn for_subject(subject: &Subject) -> Self {
        Archive::new(subject.goal_count())
    }

    /// Executes `test` and records every goal it covers.
    pub fn update(&mut self, subject: &Subject, test: &TestCase) -> Vec<Goal> {
        let trace = subject.execute(test);
        self.record(&subject.covered_goals(&trace), test)
    }

    /// Records `test` as witness for the already-computed `covered` goals.
    /// A stored witness is replaced only by a strictly shorter one. Returns
    /// the goals that were not covered before.
    pub fn record(&mut self, covered: &[Goal], test: &TestCase) -> Vec<Goal> {
        let mut fresh = Vec::new();
        for &goal in covered {
            let slot = &mut self.witnesses[goal.index()];
            match slot {
                None => {
                    *slot = Some(test.clone());
                    self.covered += 1;
                    fresh.push(goal);
                }
                Some(existing) if test.len() < existing.len() => *existing = test.clone(),
                Some(_) => {}
            }
        }
        fresh
    }

    pub fn is_covered(&self, goal: Goal) -> bool {
        self.witnesses[goal.index()].is_some()
    }

    pub fn witness(&self, goal: Goal) -> Option<&TestCase> {
        self.witnesses[goal.index()].as_ref()
    }

    pub fn covered_count(&self) -> usize {
        self.covered
    }

    pub fn goal_count(&self) -> usize {
        self.witnesses.len()
    }

    pub fn coverage(&self) -> f64 {
        self.covered as f64 / self.witnesses.len() as f64
    }

    pub fn covered_goals(&self) -> impl Iterator<Item = Goal> + '_ {
        self.witnesses
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_some())
            .map(|(i, _)| Goal::from_index(i))
    }

    pub fn entries(&self) -> impl Iterator<Item = (Goal, &TestCase)> + '_ {
        self.witnesses
            .iter()
            .enumerate()
            .filter_map(|(i, w)| w.as_ref().map(|t| (Goal::from_index(i), t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subject::{BranchNode, GeneratorParams, Relop, Statement::*};

    fn subject() -> Subject {
        let node = BranchNode {
            id: 0,
            slot: 0,
            relop: Relop::Eq,
            constant: 5,
            parent: None,
        };
        Subject::from_nodes("a".into(), 0, GeneratorParams::default(), vec![node]).unwrap()
    }

    #[test]
    fn inserts_and_keeps_shortest() {
        let s = subject();
        let mut archive = Archive::for_subject(&s);
        let short = TestCase::new(vec![Const(5)]);
        let long = TestCase::new(vec![Const(5), Const(1)]);
        assert_eq!(archive.update(&s, &long), vec![Goal::new(0, true)]);
        assert_eq!(archive.witness(Goal::new(0, true)), Some(&long));
        assert!(archive.update(&s, &short).is_empty());
        assert_eq!(archive.witness(Goal::new(0, true)), Some(&short));
        archive.update(&s, &long);
        assert_eq!(archive.witness(Goal::new(0, true)), Some(&short));
        assert_eq!(archive.coverage(), 0.5);
        archive.update(&s, &TestCase::new(vec![Const(9)]));
        assert_eq!(archive.coverage(), 1.0);
    }
}
