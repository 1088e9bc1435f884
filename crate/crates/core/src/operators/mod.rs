//! Genetic operators shared by DynaMOSA and MIO.

mod archive;
mod selection;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::subject::{Statement, Subject, TestCase};

pub use archive::Archive;
pub use selection::{rank_probabilities, rank_select, tournament_select};

/// Seeded, splittable random stream.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// An independent child stream; advances this stream by one word pair.
    pub fn split(&mut self) -> RandomSource {
        let next = self.rng.next_u64();
        RandomSource::new(crate::experiment::mix64(next ^ self.seed))
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// A statement valid at position `pos`: a constant, or an operation over
/// earlier slots when any exist. The four kinds are equally likely.
pub fn random_statement(pos: usize, subject: &Subject, rng: &mut impl Rng) -> Statement {
    let (lo, hi) = subject.const_range();
    if pos == 0 {
        return Statement::Const(rng.gen_range(lo..=hi));
    }
    match rng.gen_range(0..4) {
        0 => Statement::Const(rng.gen_range(lo..=hi)),
        1 => Statement::Add(rng.gen_range(0..pos), rng.gen_range(0..pos)),
        2 => Statement::Sub(rng.gen_range(0..pos), rng.gen_range(0..pos)),
        _ => Statement::Neg(rng.gen_range(0..pos)),
    }
}

/// A test of uniformly random length in `[1, max_len]`.
pub fn random_testcase(subject: &Subject, max_len: usize, rng: &mut impl Rng) -> TestCase {
    assert!(max_len >= 1, "max_len must be at least 1");
    let len = rng.gen_range(1..=max_len);
    TestCase::new((0..len).map(|pos| random_statement(pos, subject, rng)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mutation {
    Insert,
    Delete,
    Replace,
}

const MUTATIONS: [Mutation; 3] = [Mutation::Insert, Mutation::Delete, Mutation::Replace];

/// Applies `count` single-step mutations in sequence.
pub fn apply_mutations(
    test: &TestCase,
    count: usize,
    max_len: usize,
    subject: &Subject,
    rng: &mut impl Rng,
) -> TestCase {
    let mut statements = test.statements.clone();
    for _ in 0..count {
        mutate_once(&mut statements, max_len, subject, rng);
    }
    TestCase::new(statements)
}

fn mutate_once(statements: &mut Vec<Statement>, max_len: usize, subject: &Subject, rng: &mut impl Rng) {
    let len = statements.len();
    let allowed = |m: Mutation| match m {
        Mutation::Insert => len < max_len,
        Mutation::Delete => len > 1,
        Mutation::Replace => true,
    };
    let mut op = MUTATIONS[rng.gen_range(0..MUTATIONS.len())];
    if !allowed(op) {
        let rest: Vec<Mutation> = MUTATIONS.iter().copied().filter(|&m| allowed(m)).collect();
        op = rest[rng.gen_range(0..rest.len())];
    }
    match op {
        Mutation::Insert => {
            let at = rng.gen_range(0..=len);
            let fresh = random_statement(at, subject, rng);
            statements.insert(at, fresh);
            for s in &mut statements[at + 1..] {
                *s = remap(*s, |r| if r >= at { r + 1 } else { r });
            }
        }
        Mutation::Delete => {
            let at = rng.gen_range(0..len);
            statements.remove(at);
            for (pos, s) in statements.iter_mut().enumerate().skip(at) {
                let shifted = remap(*s, |r| match r.cmp(&at) {
                    std::cmp::Ordering::Less => r,
                    std::cmp::Ordering::Equal => STALE,
                    std::cmp::Ordering::Greater => r - 1,
                });
                *s = redraw(shifted, pos, subject, rng);
            }
        }
        Mutation::Replace => {
            let at = rng.gen_range(0..len);
            statements[at] = random_statement(at, subject, rng);
        }
    }
}

fn remap(s: Statement, f: impl Fn(usize) -> usize) -> Statement {
    match s {
        Statement::Const(k) => Statement::Const(k),
        Statement::Add(i, j) => Statement::Add(f(i), f(j)),
        Statement::Sub(i, j) => Statement::Sub(f(i), f(j)),
        Statement::Neg(i) => Statement::Neg(f(i)),
    }
}

/// Marks an operand whose target statement no longer exists.
const STALE: usize = usize::MAX;

/// Re-draws operands of `s` (now at `pos`) that do not point at an earlier
/// slot. With no earlier slot the statement becomes a constant.
fn redraw(s: Statement, pos: usize, subject: &Subject, rng: &mut impl Rng) -> Statement {
    if matches!(s, Statement::Const(_)) {
        return s;
    }
    if pos == 0 {
        let (lo, hi) = subject.const_range();
        return Statement::Const(rng.gen_range(lo..=hi));
    }
    let mut fix = |r: usize| if r >= pos { rng.gen_range(0..pos) } else { r };
    match s {
        Statement::Add(i, j) => {
            let i = fix(i);
            Statement::Add(i, fix(j))
        }
        Statement::Sub(i, j) => {
            let i = fix(i);
            Statement::Sub(i, fix(j))
        }
        Statement::Neg(i) => Statement::Neg(fix(i)),
        Statement::Const(_) => unreachable!(),
    }
}

/// Single-point crossover.
///
/// One uniform fraction `u` fixes both cut points,
/// `alpha = 1 + floor(u * len(p1))` and `beta = 1 + floor(u * len(p2))`, so
/// each is uniform over its parent and identical parents reproduce
/// themselves. Children are truncated to `max_len`.
pub fn crossover(
    p1: &TestCase,
    p2: &TestCase,
    max_len: usize,
    subject: &Subject,
    rng: &mut impl Rng,
) -> (TestCase, TestCase) {
    let u: f64 = rng.gen();
    let cut = |len: usize| (1 + (u * len as f64).floor() as usize).min(len);
    let alpha = cut(p1.len());
    let beta = cut(p2.len());
    let mut c1 = splice(&p1.statements[..alpha], &p2.statements[beta..], beta, subject, rng);
    let mut c2 = splice(&p2.statements[..beta], &p1.statements[alpha..], alpha, subject, rng);
    c1.truncate(max_len);
    c2.truncate(max_len);
    (TestCase::new(c1), TestCase::new(c2))
}

/// `prefix ++ suffix`, where `suffix` originally started at `offset`.
/// References inside the suffix follow it; others stay if still valid.
fn splice(
    prefix: &[Statement],
    suffix: &[Statement],
    offset: usize,
    subject: &Subject,
    rng: &mut impl Rng,
) -> Vec<Statement> {
    let base = prefix.len();
    let mut out = Vec::with_capacity(base + suffix.len());
    out.extend_from_slice(prefix);
    for &s in suffix {
        let pos = out.len();
        let moved = remap(s, |r| if r >= offset { base + (r - offset) } else { r });
        out.push(redraw(moved, pos, subject, rng));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subject::GeneratorParams;

    fn subject() -> Subject {
        Subject::generate("ops", 11, GeneratorParams::default()).unwrap()
    }

    #[test]
    fn single_slot_tests_are_constants() {
        let s = subject();
        let mut rng = RandomSource::new(1);
        for _ in 0..200 {
            let t = random_testcase(&s, 1, &mut rng);
            assert_eq!(t.len(), 1);
            assert!(matches!(t.statements[0], Statement::Const(_)));
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = subject();
        let a = random_testcase(&s, 30, &mut RandomSource::new(9));
        let b = random_testcase(&s, 30, &mut RandomSource::new(9));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_mutations_is_identity() {
        let s = subject();
        let mut rng = RandomSource::new(2);
        let t = random_testcase(&s, 20, &mut rng);
        assert_eq!(apply_mutations(&t, 0, 20, &s, &mut rng), t);
    }

    #[test]
    fn length_one_never_deletes() {
        let s = subject();
        let mut rng = RandomSource::new(3);
        let t = TestCase::new(vec![Statement::Const(1)]);
        for _ in 0..500 {
            let m = apply_mutations(&t, 1, 1, &s, &mut rng);
            assert_eq!(m.len(), 1);
            let m = apply_mutations(&t, 1, 5, &s, &mut rng);
            assert!(m.len() == 1 || m.len() == 2);
        }
    }

    #[test]
    fn identical_parents_reproduce() {
        let s = subject();
        let mut rng = RandomSource::new(4);
        for _ in 0..200 {
            let p = random_testcase(&s, 25, &mut rng);
            let (a, b) = crossover(&p, &p, 25, &s, &mut rng);
            assert_eq!(a, p);
            assert_eq!(b, p);
        }
    }

    #[test]
    fn crossover_conserves_statements() {
        let s = subject();
        let mut rng = RandomSource::new(5);
        for _ in 0..500 {
            let p1 = random_testcase(&s, 30, &mut rng);
            let p2 = random_testcase(&s, 30, &mut rng);
            let (a, b) = crossover(&p1, &p2, usize::MAX, &s, &mut rng);
            assert_eq!(a.len() + b.len(), p1.len() + p2.len());
            assert!(a.is_valid(usize::MAX) && b.is_valid(usize::MAX));
            let (a, b) = crossover(&p1, &p2, 10, &s, &mut rng);
            assert!(a.is_valid(10) && b.is_valid(10));
        }
    }

    #[test]
    fn split_streams_differ() {
        let mut parent = RandomSource::new(42);
        let mut a = parent.split();
        let mut b = parent.split();
        assert_ne!(a.next_u64(), b.next_u64());
        let mut again = RandomSource::new(42);
        assert_eq!(again.split().next_u64(), RandomSource::new(42).split().next_u64());
        assert!(parent.position() > 0);
    }
}
