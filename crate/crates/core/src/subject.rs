//! Synthetic programs under test.
//!
//! A [`Subject`] is a forest of branch predicates. A node is reached only when
//! its parent is reached and takes the required outcome, so nested branches
//! become coverable only after their enclosing branch is. Test cases are
//! straight-line integer programs; predicate `i` reads the value produced by
//! statement `slot`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Statement {
    Const(i64),
    Add(usize, usize),
    Sub(usize, usize),
    Neg(usize),
}

impl Statement {
    fn operands_below(&self, pos: usize) -> bool {
        match *self {
            Statement::Const(_) => true,
            Statement::Add(i, j) | Statement::Sub(i, j) => i < pos && j < pos,
            Statement::Neg(i) => i < pos,
        }
    }
}

/// A straight-line test: statement `i` defines slot `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TestCase {
    pub statements: Vec<Statement>,
}

impl TestCase {
    pub fn new(statements: Vec<Statement>) -> Self {
        TestCase { statements }
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    /// Length in `[1, max_len]` and every operand refers to an earlier slot.
    pub fn is_valid(&self, max_len: usize) -> bool {
        !self.statements.is_empty()
            && self.statements.len() <= max_len
            && self.statements.iter().enumerate().all(|(pos, s)| s.operands_below(pos))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relop {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relop {
    pub const ALL: [Relop; 6] = [Relop::Eq, Relop::Ne, Relop::Lt, Relop::Le, Relop::Gt, Relop::Ge];

    /// Predicate value and branch distances `(d_true, d_false)` for `v relop k`.
    pub fn distances(self, v: i64, k: i64) -> (bool, f64, f64) {
        let (v, k) = (v as i128, k as i128);
        let d = |x: i128| x as f64;
        match self {
            Relop::Eq => (v == k, d((v - k).abs()), if v == k { 1.0 } else { 0.0 }),
            Relop::Ne => (v != k, if v == k { 1.0 } else { 0.0 }, d((v - k).abs())),
            Relop::Lt if v < k => (true, 0.0, d(k - v)),
            Relop::Lt => (false, d(v - k + 1), 0.0),
            Relop::Le if v <= k => (true, 0.0, d(k - v + 1)),
            Relop::Le => (false, d(v - k), 0.0),
            Relop::Gt if v > k => (true, 0.0, d(v - k)),
            Relop::Gt => (false, d(k - v + 1), 0.0),
            Relop::Ge if v >= k => (true, 0.0, d(v - k + 1)),
            Relop::Ge => (false, d(k - v), 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchNode {
    pub id: usize,
    pub slot: usize,
    pub relop: Relop,
    #[serde(rename = "const")]
    pub constant: i64,
    /// Enclosing node and the outcome it must take.
    pub parent: Option<(usize, bool)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub roots: usize,
    pub max_depth: usize,
    pub child_prob: f64,
    pub slot_span: usize,
    pub const_range: (i64, i64),
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            roots: 5,
            max_depth: 4,
            child_prob: 0.5,
            slot_span: 12,
            const_range: (-50, 50),
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.roots < 1 {
            return fail("roots must be at least 1");
        }
        if self.max_depth < 1 {
            return fail("max_depth must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.child_prob) {
            return fail("child_prob must lie in [0, 1]");
        }
        if self.slot_span < 1 {
            return fail("slot_span must be at least 1");
        }
        if self.const_range.0 > self.const_range.1 {
            return fail("const_range is empty");
        }
        Ok(())
    }
}

/// One outcome of one branch node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Goal {
    pub node: usize,
    pub outcome: bool,
}

impl Goal {
    pub fn new(node: usize, outcome: bool) -> Self {
        Goal { node, outcome }
    }

    /// Dense id: `2 * node` for the true branch, `2 * node + 1` for the false branch.
    pub fn index(self) -> usize {
        2 * self.node + usize::from(!self.outcome)
    }

    pub fn from_index(index: usize) -> Self {
        Goal {
            node: index / 2,
            outcome: index.is_multiple_of(2),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SubjectRepr {
    id: String,
    seed: u64,
    params: GeneratorParams,
    nodes: Vec<BranchNode>,
}

/// A generated program under test. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubjectRepr", into = "SubjectRepr")]
pub struct Subject {
    pub id: String,
    pub seed: u64,
    pub params: GeneratorParams,
    nodes: Vec<BranchNode>,
    children: Vec<[Vec<usize>; 2]>,
    depth: Vec<usize>,
}

impl From<Subject> for SubjectRepr {
    fn from(s: Subject) -> Self {
        SubjectRepr {
            id: s.id,
            seed: s.seed,
            params: s.params,
            nodes: s.nodes,
        }
    }
}

impl TryFrom<SubjectRepr> for Subject {
    type Error = Error;

    fn try_from(r: SubjectRepr) -> Result<Self> {
        Subject::from_nodes(r.id, r.seed, r.params, r.nodes)
    }
}

fn outcome_slot(outcome: bool) -> usize {
    usize::from(!outcome)
}

impl Subject {
    /// Builds a subject from explicit nodes. Node ids must equal their
    /// position and a parent must precede its children.
    pub fn from_nodes(id: String, seed: u64, params: GeneratorParams, nodes: Vec<BranchNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParams(format!("subject `{id}` has no nodes")));
        }
        let mut children = vec![[Vec::new(), Vec::new()]; nodes.len()];
        let mut depth = vec![0; nodes.len()];
        for (pos, node) in nodes.iter().enumerate() {
            if node.id != pos {
                return Err(Error::InvalidParams(format!(
                    "subject `{id}`: node at position {pos} has id {}",
                    node.id
                )));
            }
            if let Some((p, outcome)) = node.parent {
                if p >= pos {
                    return Err(Error::InvalidParams(format!(
                        "subject `{id}`: node {pos} has parent {p}, parents must precede children"
                    )));
                }
                children[p][outcome_slot(outcome)].push(pos);
                depth[pos] = depth[p] + 1;
            }
        }
        Ok(Subject {
            id,
            seed,
            params,
            nodes,
            children,
            depth,
        })
    }

    /// Deterministic subject for `(seed, params)`. Nodes are numbered in
    /// depth-first pre-order; each node above `max_depth` spawns a child under
    /// each outcome with probability `child_prob`.
    pub fn generate(id: &str, seed: u64, params: GeneratorParams) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes = Vec::new();
        // explicit stack of (parent, depth) in pre-order
        let mut stack: Vec<(Option<(usize, bool)>, usize)> = Vec::new();
        for _ in 0..params.roots {
            stack.push((None, 1));
            while let Some((parent, depth)) = stack.pop() {
                let id = nodes.len();
                nodes.push(BranchNode {
                    id,
                    slot: rng.gen_range(0..params.slot_span),
                    relop: Relop::ALL[rng.gen_range(0..Relop::ALL.len())],
                    constant: rng.gen_range(params.const_range.0..=params.const_range.1),
                    parent,
                });
                if depth < params.max_depth {
                    let spawn_true = rng.gen_bool(params.child_prob);
                    let spawn_false = rng.gen_bool(params.child_prob);
                    // pushed in reverse so the true-branch subtree is numbered first
                    if spawn_false {
                        stack.push((Some((id, false)), depth + 1));
                    }
                    if spawn_true {
                        stack.push((Some((id, true)), depth + 1));
                    }
                }
            }
        }
        Subject::from_nodes(id.to_string(), seed, params, nodes)
    }

    pub fn nodes(&self) -> &[BranchNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.parent.is_none()).count()
    }

    pub fn goal_count(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn goals(&self) -> impl Iterator<Item = Goal> + '_ {
        (0..self.goal_count()).map(Goal::from_index)
    }

    pub fn root_goals(&self) -> Vec<Goal> {
        self.nodes
            .iter()
            .filter(|n| n.parent.is_none())
            .flat_map(|n| [Goal::new(n.id, true), Goal::new(n.id, false)])
            .collect()
    }

    pub fn contains(&self, goal: Goal) -> bool {
        goal.node < self.nodes.len()
    }

    /// Nesting depth of a node; roots have depth 0.
    pub fn depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    /// The goal whose coverage makes `goal` reachable, if any.
    pub fn parent_goal(&self, goal: Goal) -> Option<Goal> {
        self.nodes[goal.node].parent.map(|(p, o)| Goal::new(p, o))
    }

    /// Both goals of every node nested directly under `goal`.
    pub fn children(&self, goal: Goal) -> Vec<Goal> {
        self.children[goal.node][outcome_slot(goal.outcome)]
            .iter()
            .flat_map(|&c| [Goal::new(c, true), Goal::new(c, false)])
            .collect()
    }

    pub fn const_range(&self) -> (i64, i64) {
        self.params.const_range
    }

    /// Runs `test` with wrapping arithmetic and records per-node branch distances.
    pub fn execute(&self, test: &TestCase) -> ExecutionTrace {
        let mut slots: Vec<i64> = Vec::with_capacity(test.len());
        for s in &test.statements {
            let v = match *s {
                Statement::Const(k) => k,
                Statement::Add(i, j) => slots[i].wrapping_add(slots[j]),
                Statement::Sub(i, j) => i64::wrapping_sub(slots[i], slots[j]),
                Statement::Neg(i) => i64::wrapping_neg(slots[i]),
            };
            slots.push(v);
        }
        let mut nodes: Vec<NodeStatus> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let reached = match node.parent {
                None => true,
                Some((p, o)) => nodes[p].outcome == Some(o),
            };
            let status = if reached && node.slot < slots.len() {
                let (value, d_true, d_false) = node.relop.distances(slots[node.slot], node.constant);
                NodeStatus {
                    reached,
                    outcome: Some(value),
                    d_true,
                    d_false,
                }
            } else {
                NodeStatus {
                    reached,
                    outcome: None,
                    d_true: f64::INFINITY,
                    d_false: f64::INFINITY,
                }
            };
            nodes.push(status);
        }
        ExecutionTrace {
            slot_values: slots,
            nodes,
        }
    }

    /// Approach level plus normalised branch distance; zero iff `goal` is covered.
    pub fn goal_fitness(&self, trace: &ExecutionTrace, goal: Goal) -> Result<f64> {
        if !self.contains(goal) {
            return Err(Error::UnknownGoal {
                subject: self.id.clone(),
                node: goal.node,
                outcome: goal.outcome,
            });
        }
        Ok(self.fitness(trace, goal))
    }

    /// Unchecked variant of [`goal_fitness`](Self::goal_fitness).
    pub fn fitness(&self, trace: &ExecutionTrace, goal: Goal) -> f64 {
        let status = &trace.nodes[goal.node];
        if status.reached {
            return normalise(status.distance(goal.outcome));
        }
        let mut current = goal.node;
        let mut level = 0.0;
        loop {
            let (parent, required) = self.nodes[current].parent.expect("roots are always reached");
            level += 1.0;
            let p = &trace.nodes[parent];
            if p.reached {
                return level + normalise(p.distance(required));
            }
            current = parent;
        }
    }

    /// Goals whose fitness is zero under `trace`.
    pub fn covered_goals(&self, trace: &ExecutionTrace) -> Vec<Goal> {
        trace
            .nodes
            .iter()
            .enumerate()
            .filter_map(|(id, s)| s.outcome.map(|o| Goal::new(id, o)))
            .collect()
    }

    /// 64-bit digest of the subject id, used for seed derivation.
    pub fn digest(&self) -> u64 {
        crate::experiment::fnv1a64(self.id.as_bytes())
    }
}

/// `d / (d + 1)`, with `+inf` mapped to 1.
pub fn normalise(d: f64) -> f64 {
    if d.is_infinite() {
        1.0
    } else {
        d / (d + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeStatus {
    pub reached: bool,
    /// Predicate value; `None` when unreached or when the slot is missing.
    pub outcome: Option<bool>,
    pub d_true: f64,
    pub d_false: f64,
}

impl NodeStatus {
    pub fn distance(&self, outcome: bool) -> f64 {
        if outcome {
            self.d_true
        } else {
            self.d_false
        }
    }

    pub fn evaluable(&self) -> bool {
        self.outcome.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionTrace {
    pub slot_values: Vec<i64>,
    pub nodes: Vec<NodeStatus>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use Statement::*;

    fn params() -> GeneratorParams {
        GeneratorParams {
            roots: 3,
            max_depth: 3,
            child_prob: 0.5,
            slot_span: 4,
            const_range: (-5, 5),
        }
    }

    fn node(id: usize, slot: usize, relop: Relop, constant: i64, parent: Option<(usize, bool)>) -> BranchNode {
        BranchNode {
            id,
            slot,
            relop,
            constant,
            parent,
        }
    }

    fn subject(nodes: Vec<BranchNode>) -> Subject {
        Subject::from_nodes("t".into(), 0, params(), nodes).unwrap()
    }

    #[test]
    fn generation_is_deterministic() {
        let a = Subject::generate("s", 7, params()).unwrap();
        let b = Subject::generate("s", 7, params()).unwrap();
        assert_eq!(a, b);
        let c = Subject::generate("s", 8, params()).unwrap();
        assert_ne!(a.nodes(), c.nodes());
    }

    #[test]
    fn depth_one_gives_roots_only() {
        let p = GeneratorParams {
            max_depth: 1,
            child_prob: 1.0,
            ..params()
        };
        let s = Subject::generate("s", 3, p).unwrap();
        assert_eq!(s.node_count(), 3);
        assert!(s.nodes().iter().all(|n| n.parent.is_none()));
    }

    #[test]
    fn zero_spawn_probability() {
        let p = GeneratorParams {
            child_prob: 0.0,
            ..params()
        };
        let s = Subject::generate("s", 7, p).unwrap();
        assert_eq!(s.node_count(), 3);
        assert_eq!(s.goal_count(), 6);
    }

    #[test]
    fn invalid_params_rejected() {
        for p in [
            GeneratorParams { roots: 0, ..params() },
            GeneratorParams {
                max_depth: 0,
                ..params()
            },
            GeneratorParams {
                child_prob: 1.5,
                ..params()
            },
            GeneratorParams {
                const_range: (3, 1),
                ..params()
            },
        ] {
            assert!(Subject::generate("s", 1, p).is_err());
        }
    }

    #[test]
    fn equality_distances() {
        let s = subject(vec![node(0, 0, Relop::Eq, 5, None)]);
        let t = s.execute(&TestCase::new(vec![Const(5)]));
        assert_eq!(t.nodes[0].outcome, Some(true));
        assert_eq!((t.nodes[0].d_true, t.nodes[0].d_false), (0.0, 1.0));
        assert_eq!(s.covered_goals(&t), vec![Goal::new(0, true)]);

        let t = s.execute(&TestCase::new(vec![Const(7)]));
        assert_eq!(t.nodes[0].outcome, Some(false));
        assert_eq!(t.nodes[0].d_true, 2.0);
        assert!((s.goal_fitness(&t, Goal::new(0, true)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.goal_fitness(&t, Goal::new(0, false)).unwrap(), 0.0);
    }

    #[test]
    fn relational_distances() {
        // (v, k) = (3, 5) and (5, 5) and (7, 5)
        let cases = [
            (Relop::Lt, 3, (true, 0.0, 2.0)),
            (Relop::Lt, 5, (false, 1.0, 0.0)),
            (Relop::Le, 5, (true, 0.0, 1.0)),
            (Relop::Le, 7, (false, 2.0, 0.0)),
            (Relop::Gt, 7, (true, 0.0, 2.0)),
            (Relop::Gt, 5, (false, 1.0, 0.0)),
            (Relop::Ge, 5, (true, 0.0, 1.0)),
            (Relop::Ge, 3, (false, 2.0, 0.0)),
            (Relop::Ne, 5, (false, 1.0, 0.0)),
            (Relop::Ne, 8, (true, 0.0, 3.0)),
        ];
        for (op, v, expected) in cases {
            assert_eq!(op.distances(v, 5), expected, "{op:?} {v}");
        }
    }

    #[test]
    fn missing_slot_is_unevaluable() {
        let s = subject(vec![node(0, 3, Relop::Eq, 0, None)]);
        let t = s.execute(&TestCase::new(vec![Const(0), Const(0)]));
        assert!(t.nodes[0].reached && !t.nodes[0].evaluable());
        assert!(s.covered_goals(&t).is_empty());
        assert_eq!(s.goal_fitness(&t, Goal::new(0, true)).unwrap(), 1.0);
    }

    #[test]
    fn approach_level_below_uncovered_root() {
        // root: slot0 == 5, child under true: slot0 > 100
        let s = subject(vec![
            node(0, 0, Relop::Eq, 5, None),
            node(1, 0, Relop::Gt, 100, Some((0, true))),
        ]);
        let t = s.execute(&TestCase::new(vec![Const(1)]));
        let f = s.goal_fitness(&t, Goal::new(1, true)).unwrap();
        assert!((f - 1.8).abs() < 1e-15);
        assert!(s.goal_fitness(&t, Goal::new(2, true)).is_err());
    }

    #[test]
    fn wrapping_arithmetic() {
        let s = subject(vec![node(0, 1, Relop::Lt, 0, None)]);
        let t = s.execute(&TestCase::new(vec![Const(i64::MAX), Add(0, 0)]));
        assert_eq!(t.slot_values[1], -2);
        assert_eq!(t.nodes[0].outcome, Some(true));
    }

    #[test]
    fn children_of_goals() {
        let s = subject(vec![
            node(0, 0, Relop::Eq, 5, None),
            node(1, 0, Relop::Gt, 100, Some((0, true))),
        ]);
        assert_eq!(
            s.children(Goal::new(0, true)),
            vec![Goal::new(1, true), Goal::new(1, false)]
        );
        assert!(s.children(Goal::new(0, false)).is_empty());
        assert!(s.children(Goal::new(1, true)).is_empty());
    }

    #[test]
    fn rejects_bad_forest() {
        let bad = vec![
            node(0, 0, Relop::Eq, 0, Some((1, true))),
            node(1, 0, Relop::Eq, 0, None),
        ];
        assert!(Subject::from_nodes("x".into(), 0, params(), bad).is_err());
    }

    #[test]
    fn json_layout() {
        let s = subject(vec![
            node(0, 0, Relop::Le, 5, None),
            node(1, 2, Relop::Ne, -1, Some((0, false))),
        ]);
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["nodes"][0]["relop"], "<=");
        assert_eq!(json["nodes"][0]["parent"], serde_json::Value::Null);
        assert_eq!(json["nodes"][1]["parent"], serde_json::json!([0, false]));
        assert_eq!(json["nodes"][1]["const"], -1);
        let back: Subject = serde_json::from_value(json).unwrap();
        assert_eq!(back, s);
    }
}
