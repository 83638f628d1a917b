//! Inductive Miner, basic variant without infrequency filtering.
//!
//! Recursively looks for an exclusive-choice, sequence, parallel or loop cut
//! in the directly-follows graph of the (sub)log, splits the log along the
//! first cut found and recurses on each part. When no cut applies the result
//! is a flower model, so the discovered tree always accepts every log trace.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::eventlog::{directly_follows, Activity, DirectlyFollowsProfile, EventLog, Trace};
use crate::processtree::ProcessTree;

/// Variant name recorded in experiment metadata.
pub const MINER_VARIANT: &str = "IM-basic";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot discover a model from an empty log")]
pub struct EmptyLogError;

pub fn discover(log: &EventLog) -> Result<ProcessTree, EmptyLogError> {
    if log.is_empty() {
        return Err(EmptyLogError);
    }
    Ok(mine(log))
}

/// Directly-follows profile of a (sub)log.
pub fn dfg(log: &EventLog) -> DirectlyFollowsProfile {
    directly_follows(log)
}

/// Directly-follows graph over a sorted alphabet, indexed by position.
struct Graph {
    activities: Vec<Activity>,
    edge: Vec<Vec<bool>>,
    start: Vec<bool>,
    end: Vec<bool>,
}

impl Graph {
    fn new(profile: &DirectlyFollowsProfile) -> Self {
        let activities: Vec<Activity> = profile.alphabet.iter().cloned().collect();
        let index = |a: &Activity| activities.binary_search(a).unwrap();
        let n = activities.len();
        let mut edge = vec![vec![false; n]; n];
        for (a, b) in profile.pairs.keys() {
            edge[index(a)][index(b)] = true;
        }
        let mut start = vec![false; n];
        let mut end = vec![false; n];
        for a in profile.start_counts.keys() {
            start[index(a)] = true;
        }
        for a in profile.end_counts.keys() {
            end[index(a)] = true;
        }
        Graph { activities, edge, start, end }
    }

    fn len(&self) -> usize {
        self.activities.len()
    }

    /// `reach[a][b]`: a non-empty directly-follows path leads from `a` to `b`.
    fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        (0..n)
            .map(|s| {
                let mut seen = vec![false; n];
                let mut stack: Vec<usize> = (0..n).filter(|&t| self.edge[s][t]).collect();
                for &t in &stack {
                    seen[t] = true;
                }
                while let Some(u) = stack.pop() {
                    for v in 0..n {
                        if self.edge[u][v] && !seen[v] {
                            seen[v] = true;
                            stack.push(v);
                        }
                    }
                }
                seen
            })
            .collect()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut x = x;
        while self.0[x] != root {
            let next = self.0[x];
            self.0[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller index as root so groups stay ordered by their minimum
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }

    /// Groups ordered by smallest member, members ascending.
    fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = self.find(x);
            by_root[r].push(x);
        }
        by_root.into_iter().filter(|g| !g.is_empty()).collect()
    }
}

fn xor_cut(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let n = g.len();
    let mut uf = UnionFind::new(n);
    for a in 0..n {
        for b in 0..n {
            if g.edge[a][b] {
                uf.union(a, b);
            }
        }
    }
    let groups = uf.groups();
    (groups.len() > 1).then_some(groups)
}

fn sequence_cut(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let n = g.len();
    let reach = g.reachability();
    let mut uf = UnionFind::new(n);
    // Merge until every pair of groups is ordered one way only: groups that
    // reach each other (a cycle) or neither reaches the other cannot be
    // sequenced and are merged.
    loop {
        let groups = uf.groups();
        let reaches = |x: &[usize], y: &[usize]| x.iter().any(|&a| y.iter().any(|&b| reach[a][b]));
        let mut merged = false;
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                if reaches(&groups[i], &groups[j]) == reaches(&groups[j], &groups[i]) {
                    merged |= uf.union(groups[i][0], groups[j][0]);
                }
            }
        }
        if !merged {
            break;
        }
    }
    let groups = uf.groups();
    if groups.len() < 2 {
        return None;
    }
    let reaches = |x: &[usize], y: &[usize]| x.iter().any(|&a| y.iter().any(|&b| reach[a][b]));
    let mut ranked: Vec<(usize, Vec<usize>)> = groups
        .iter()
        .map(|x| (groups.iter().filter(|y| reaches(x, y) && *y != x).count(), x.clone()))
        .collect();
    ranked.sort_by_key(|r| std::cmp::Reverse(r.0));
    Some(ranked.into_iter().map(|(_, g)| g).collect())
}

fn parallel_cut(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let n = g.len();
    let mut uf = UnionFind::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if !(g.edge[a][b] && g.edge[b][a]) {
                uf.union(a, b);
            }
        }
    }
    let groups = uf.groups();
    if groups.len() < 2 {
        return None;
    }
    // Every part needs a start and an end activity. Pair up parts that have
    // only one of the two, then fold the remainder into the first complete part.
    let has_start = |x: &[usize]| x.iter().any(|&a| g.start[a]);
    let has_end = |x: &[usize]| x.iter().any(|&a| g.end[a]);
    let mut complete = Vec::new();
    let mut only_start = Vec::new();
    let mut only_end = Vec::new();
    let mut neither = Vec::new();
    for x in groups {
        match (has_start(&x), has_end(&x)) {
            (true, true) => complete.push(x),
            (true, false) => only_start.push(x),
            (false, true) => only_end.push(x),
            (false, false) => neither.push(x),
        }
    }
    let mut leftovers = Vec::new();
    let mut ends = only_end.into_iter();
    for mut s in only_start {
        match ends.next() {
            Some(e) => {
                s.extend(e);
                complete.push(s);
            }
            None => leftovers.push(s),
        }
    }
    leftovers.extend(ends);
    leftovers.extend(neither);
    if complete.is_empty() {
        return None;
    }
    for x in leftovers {
        complete[0].extend(x);
    }
    let mut parts: Vec<Vec<usize>> = complete
        .into_iter()
        .map(|mut x| {
            x.sort_unstable();
            x
        })
        .collect();
    parts.sort();
    (parts.len() > 1).then_some(parts)
}

/// Loop cut: the body holds every start and end activity; each remaining
/// connected component becomes a redo part if it is entered only from end
/// activities (all of them) and left only towards start activities (all of them).
fn loop_cut(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let n = g.len();
    let mut in_body: Vec<bool> = (0..n).map(|a| g.start[a] || g.end[a]).collect();
    let mut uf = UnionFind::new(n);
    for a in 0..n {
        for b in 0..n {
            if g.edge[a][b] && !in_body[a] && !in_body[b] {
                uf.union(a, b);
            }
        }
    }
    let mut candidates: Vec<Vec<usize>> = uf.groups().into_iter().filter(|x| !in_body[x[0]]).collect();
    if candidates.is_empty() {
        return None;
    }
    let touches_inner_body = |c: &[usize], in_body: &[bool]| {
        c.iter().any(|&x| {
            (0..n).any(|b| in_body[b] && ((g.edge[b][x] && !g.end[b]) || (g.edge[x][b] && !g.start[b])))
        })
    };
    loop {
        let before = candidates.len();
        let (absorb, keep): (Vec<_>, Vec<_>) =
            candidates.into_iter().partition(|c| touches_inner_body(c, &in_body));
        for c in &absorb {
            for &x in c {
                in_body[x] = true;
            }
        }
        candidates = keep;
        if candidates.len() == before {
            break;
        }
    }
    let (redo, absorb): (Vec<_>, Vec<_>) = candidates.into_iter().partition(|c| {
        c.iter().all(|&x| {
            let from_end: Vec<bool> = (0..n).filter(|&e| g.end[e]).map(|e| g.edge[e][x]).collect();
            let to_start: Vec<bool> = (0..n).filter(|&s| g.start[s]).map(|s| g.edge[x][s]).collect();
            (from_end.iter().all(|&b| b) || !from_end.iter().any(|&b| b))
                && (to_start.iter().all(|&b| b) || !to_start.iter().any(|&b| b))
        })
    });
    for c in &absorb {
        for &x in c {
            in_body[x] = true;
        }
    }
    if redo.is_empty() {
        return None;
    }
    let body: Vec<usize> = (0..n).filter(|&a| in_body[a]).collect();
    let mut parts = vec![body];
    parts.extend(redo);
    Some(parts)
}

fn part_sets(g: &Graph, parts: &[Vec<usize>]) -> Vec<BTreeSet<Activity>> {
    parts
        .iter()
        .map(|p| p.iter().map(|&i| g.activities[i].clone()).collect())
        .collect()
}

fn part_of(sets: &[BTreeSet<Activity>], a: &Activity) -> usize {
    sets.iter().position(|s| s.contains(a)).expect("activity outside every part")
}

fn split_xor(log: &EventLog, sets: &[BTreeSet<Activity>]) -> Vec<EventLog> {
    let mut logs = vec![EventLog::new(); sets.len()];
    for (trace, m) in log.entries() {
        logs[part_of(sets, &trace.events()[0])].add(trace.clone(), m);
    }
    logs
}

fn split_project(log: &EventLog, sets: &[BTreeSet<Activity>]) -> Vec<EventLog> {
    let mut logs = vec![EventLog::new(); sets.len()];
    for (trace, m) in log.entries() {
        for (set, sub) in sets.iter().zip(logs.iter_mut()) {
            let projected: Vec<Activity> = trace.events().iter().filter(|a| set.contains(*a)).cloned().collect();
            sub.add(Trace::new(projected), m);
        }
    }
    logs
}

fn split_loop(log: &EventLog, sets: &[BTreeSet<Activity>]) -> Vec<EventLog> {
    let mut logs = vec![EventLog::new(); sets.len()];
    for (trace, m) in log.entries() {
        let mut current: Option<usize> = None;
        let mut segment = Vec::new();
        for a in trace.events() {
            let p = part_of(sets, a);
            if current.is_some_and(|c| c != p) {
                logs[current.unwrap()].add(Trace::new(std::mem::take(&mut segment)), m);
            }
            current = Some(p);
            segment.push(a.clone());
        }
        if let Some(c) = current {
            logs[c].add(Trace::new(segment), m);
        }
    }
    logs
}

fn flower(alphabet: &BTreeSet<Activity>) -> ProcessTree {
    let mut leaves: Vec<ProcessTree> = alphabet.iter().cloned().map(ProcessTree::Leaf).collect();
    let redo = if leaves.len() == 1 {
        leaves.pop().unwrap()
    } else {
        ProcessTree::Xor(leaves)
    };
    ProcessTree::looped(ProcessTree::Silent, redo)
}

fn mine(log: &EventLog) -> ProcessTree {
    let empty = log.multiplicity(&Trace::default());
    if empty > 0 {
        let rest: EventLog = log.entries().filter(|(t, _)| !t.is_empty()).map(|(t, m)| (t.clone(), m)).collect();
        if rest.is_empty() {
            return ProcessTree::Silent;
        }
        return ProcessTree::Xor(vec![ProcessTree::Silent, mine(&rest)]);
    }
    let alphabet = log.alphabet();
    if alphabet.len() == 1 {
        let a = alphabet.iter().next().unwrap().clone();
        return if log.entries().all(|(t, _)| t.len() == 1) {
            ProcessTree::Leaf(a)
        } else {
            ProcessTree::looped(ProcessTree::Leaf(a), ProcessTree::Silent)
        };
    }
    let g = Graph::new(&directly_follows(log));
    type Split = fn(&EventLog, &[BTreeSet<Activity>]) -> Vec<EventLog>;
    let cuts: [(fn(&Graph) -> Option<Vec<Vec<usize>>>, Split, fn(Vec<ProcessTree>) -> ProcessTree); 4] = [
        (xor_cut, split_xor, ProcessTree::Xor),
        (sequence_cut, split_project, ProcessTree::Sequence),
        (parallel_cut, split_project, ProcessTree::Parallel),
        (loop_cut, split_loop, |mut children| {
            let body = children.remove(0);
            let redo = if children.len() == 1 {
                children.pop().unwrap()
            } else {
                ProcessTree::Xor(children)
            };
            ProcessTree::looped(body, redo)
        }),
    ];
    for (find, split, build) in cuts {
        if let Some(parts) = find(&g) {
            let sets = part_sets(&g, &parts);
            let children = split(log, &sets).iter().map(mine).collect();
            return build(children);
        }
    }
    flower(alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log(traces: &[(&str, u64)]) -> EventLog {
        traces
            .iter()
            .map(|(s, m)| (s.split_whitespace().collect::<Trace>(), *m))
            .collect()
    }

    fn lang_eq(found: &ProcessTree, expected: &str) -> bool {
        let expected: ProcessTree = expected.parse().unwrap();
        found.to_automaton().language_eq(&expected.to_automaton())
    }

    #[test]
    fn empty_log() {
        assert_eq!(discover(&EventLog::new()), Err(EmptyLogError));
    }

    #[test]
    fn sequence() {
        let t = discover(&log(&[("a b", 1)])).unwrap();
        assert_eq!(t.to_string(), "seq(a,b)");
    }

    #[test]
    fn parallel() {
        let t = discover(&log(&[("a b", 1), ("b a", 1)])).unwrap();
        assert_eq!(t.to_string(), "and(a,b)");
    }

    #[test]
    fn choice() {
        let t = discover(&log(&[("a", 1), ("b", 1)])).unwrap();
        assert_eq!(t.to_string(), "xor(a,b)");
    }

    #[test]
    fn repeated_single_activity() {
        let l = log(&[("a a", 1)]);
        let t = discover(&l).unwrap();
        let aut = t.to_automaton();
        assert!(aut.accepts_trace(&"a a".split_whitespace().collect()));
        assert!(matches!(t, ProcessTree::Loop(..)));
    }

    #[test]
    fn empty_traces_become_optional() {
        let t = discover(&log(&[("a b", 2), ("", 1)])).unwrap();
        assert_eq!(t.to_string(), "xor(tau,seq(a,b))");
    }

    #[test]
    fn loop_with_redo() {
        let t = discover(&log(&[("a b", 1), ("a b c a b", 1), ("a b c a b c a b", 1)])).unwrap();
        assert!(lang_eq(&t, "loop(seq(a,b),c)"), "{t}");
    }

    #[test]
    fn sequence_with_choice() {
        let t = discover(&log(&[("a b d", 1), ("a c d", 1)])).unwrap();
        assert_eq!(t.to_string(), "seq(a,xor(b,c),d)");
    }

    #[test]
    fn optional_in_sequence() {
        let t = discover(&log(&[("a b", 1), ("b", 1)])).unwrap();
        assert!(lang_eq(&t, "seq(xor(a,tau),b)"), "{t}");
    }

    #[test]
    fn falls_through_to_flower() {
        // a and b follow each other both ways but only a starts/ends
        let l = log(&[("a b a", 1), ("a", 1), ("a b b a", 1)]);
        let t = discover(&l).unwrap();
        let aut = t.to_automaton();
        for (trace, _) in l.entries() {
            assert!(aut.accepts_trace(trace), "{t} rejects {trace:?}");
        }
    }

    #[test]
    fn deterministic_output() {
        let l = log(&[("c a b", 3), ("a c b", 1), ("d", 2)]);
        assert_eq!(discover(&l), discover(&l));
    }
}
