//! Pareto sorting over fitness vectors restricted to a set of target indices.
//! All objectives are minimised.

/// `a` dominates `b`: no worse on every target and strictly better on one.
pub fn dominates(a: &[f64], b: &[f64], targets: &[usize]) -> bool {
    let mut strictly = false;
    for &t in targets {
        if a[t] > b[t] {
            return false;
        }
        if a[t] < b[t] {
            strictly = true;
        }
    }
    strictly
}

/// Fast non-dominated sorting. Returns fronts of input indices, best first;
/// members of a front are in ascending index order.
pub fn nondominated_sort<V: AsRef<[f64]>>(vectors: &[V], targets: &[usize]) -> Vec<Vec<usize>> {
    let n = vectors.len();
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut counts = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (vectors[i].as_ref(), vectors[j].as_ref());
            if dominates(a, b, targets) {
                dominated[i].push(j);
                counts[j] += 1;
            } else if dominates(b, a, targets) {
                dominated[j].push(i);
                counts[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| counts[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated[i] {
                counts[j] -= 1;
                if counts[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each member of `front`, in `front` order.
///
/// Boundary members of every objective get `+inf`; interior members sum the
/// normalised gap between their neighbours. An objective with `max == min`
/// adds nothing to interior members.
pub fn crowding_distance<V: AsRef<[f64]>>(vectors: &[V], front: &[usize], targets: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut distance = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    for &t in targets {
        let value = |k: usize| vectors[front[k]].as_ref()[t];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let lo = value(order[0]);
        let hi = value(order[n - 1]);
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 || !span.is_finite() {
            continue;
        }
        for k in 1..n - 1 {
            let gap = value(order[k + 1]) - value(order[k - 1]);
            distance[order[k]] += gap / span;
        }
    }
    distance
}
