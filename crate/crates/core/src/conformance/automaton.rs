//! Finite automata over activity labels.
//!
//! [`Automaton`] is always deterministic and trimmed. [`Nfa`] is the
//! construction-time representation with ε-moves; [`Nfa::determinize`] turns it
//! back into an [`Automaton`].

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::eventlog::{Activity, EventLog, Trace};

pub type StateId = usize;

/// A trimmed deterministic finite acceptor.
///
/// The empty language is represented by a single non-final state without
/// transitions; every other automaton has all states reachable from the
/// initial state and co-reachable to a final state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    initial: StateId,
    finals: Vec<bool>,
    transitions: Vec<BTreeMap<Activity, StateId>>,
}

impl Automaton {
    /// Builds an automaton from raw parts, trimming it.
    ///
    /// Panics if a transition targets a state out of range.
    pub fn from_parts(
        initial: StateId,
        finals: Vec<bool>,
        transitions: Vec<BTreeMap<Activity, StateId>>,
    ) -> Self {
        assert_eq!(finals.len(), transitions.len());
        assert!(initial < finals.len());
        for row in &transitions {
            assert!(row.values().all(|&t| t < finals.len()), "transition target out of range");
        }
        Automaton { initial, finals, transitions }.trim()
    }

    /// Untrimmed construction for tests of trimming preconditions.
    #[cfg(test)]
    pub(crate) fn raw(
        initial: StateId,
        finals: Vec<bool>,
        transitions: Vec<BTreeMap<Activity, StateId>>,
    ) -> Self {
        Automaton { initial, finals, transitions }
    }

    pub fn empty_language() -> Self {
        Automaton {
            initial: 0,
            finals: vec![false],
            transitions: vec![BTreeMap::new()],
        }
    }

    pub fn epsilon() -> Self {
        Automaton {
            initial: 0,
            finals: vec![true],
            transitions: vec![BTreeMap::new()],
        }
    }

    pub fn single(activity: Activity) -> Self {
        Automaton {
            initial: 0,
            finals: vec![false, true],
            transitions: vec![BTreeMap::from([(activity, 1)]), BTreeMap::new()],
        }
    }

    /// Minimal acceptor of a finite set of words, built as a prefix tree.
    pub fn from_words<'a, I: IntoIterator<Item = &'a [Activity]>>(words: I) -> Self {
        let mut finals = vec![false];
        let mut transitions: Vec<BTreeMap<Activity, StateId>> = vec![BTreeMap::new()];
        for word in words {
            let mut state = 0;
            for a in word {
                state = match transitions[state].get(a) {
                    Some(&next) => next,
                    None => {
                        let next = finals.len();
                        finals.push(false);
                        transitions.push(BTreeMap::new());
                        transitions[state].insert(a.clone(), next);
                        next
                    }
                };
            }
            finals[state] = true;
        }
        Automaton { initial: 0, finals, transitions }.minimize()
    }

    /// Acceptor of the distinct traces of `log`; multiplicities are ignored.
    pub fn from_log(log: &EventLog) -> Self {
        Self::from_words(log.entries().map(|(t, _)| t.events()))
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.finals[state]
    }

    pub fn transitions(&self, state: StateId) -> &BTreeMap<Activity, StateId> {
        &self.transitions[state]
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.iter().map(BTreeMap::len).sum()
    }

    pub fn step(&self, state: StateId, a: &Activity) -> Option<StateId> {
        self.transitions[state].get(a).copied()
    }

    pub fn accepts(&self, word: &[Activity]) -> bool {
        let mut state = self.initial;
        for a in word {
            match self.step(state, a) {
                Some(next) => state = next,
                None => return false,
            }
        }
        self.finals[state]
    }

    pub fn accepts_trace(&self, trace: &Trace) -> bool {
        self.accepts(trace.events())
    }

    pub fn is_empty_language(&self) -> bool {
        !self.finals.iter().any(|&f| f)
    }

    /// True when the language consists of exactly one word.
    pub fn is_single_word(&self) -> bool {
        let finals = self.finals.iter().filter(|&&f| f).count();
        finals == 1
            && self.transitions.iter().all(|row| row.len() <= 1)
            && self
                .finals
                .iter()
                .zip(&self.transitions)
                .all(|(&f, row)| !f || row.is_empty())
    }

    pub fn alphabet(&self) -> BTreeSet<Activity> {
        self.transitions.iter().flat_map(|row| row.keys().cloned()).collect()
    }

    /// True when every state is reachable and co-reachable, or the automaton
    /// is the canonical empty-language acceptor.
    pub fn is_trimmed(&self) -> bool {
        if self.is_empty_language() {
            return self.num_states() == 1 && self.transitions[0].is_empty();
        }
        let fwd = self.reachable();
        let bwd = self.coreachable();
        fwd.iter().zip(&bwd).all(|(&f, &b)| f && b)
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            for &t in self.transitions[s].values() {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (s, row) in self.transitions.iter().enumerate() {
            for &t in row.values() {
                preds[t].push(s);
            }
        }
        let mut seen = self.finals.clone();
        let mut stack: Vec<StateId> = (0..n).filter(|&s| seen[s]).collect();
        while let Some(s) = stack.pop() {
            for &p in &preds[s] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Removes states that are unreachable or cannot reach a final state.
    pub fn trim(self) -> Self {
        let fwd = self.reachable();
        let bwd = self.coreachable();
        if !bwd[self.initial] {
            return Self::empty_language();
        }
        let keep: Vec<bool> = fwd.iter().zip(&bwd).map(|(&f, &b)| f && b).collect();
        if keep.iter().all(|&k| k) {
            return self;
        }
        let mut remap = vec![usize::MAX; self.num_states()];
        let mut next = 0;
        for (s, &k) in keep.iter().enumerate() {
            if k {
                remap[s] = next;
                next += 1;
            }
        }
        let mut finals = Vec::with_capacity(next);
        let mut transitions = Vec::with_capacity(next);
        for (s, row) in self.transitions.into_iter().enumerate() {
            if !keep[s] {
                continue;
            }
            finals.push(self.finals[s]);
            transitions.push(
                row.into_iter()
                    .filter(|(_, t)| keep[*t])
                    .map(|(a, t)| (a, remap[t]))
                    .collect(),
            );
        }
        Automaton {
            initial: remap[self.initial],
            finals,
            transitions,
        }
    }

    /// Minimal automaton in canonical state numbering: states are numbered in
    /// breadth-first order from the initial state, following labels in sorted
    /// order. Language-equal automata therefore minimize to equal values.
    pub fn minimize(self) -> Self {
        let dfa = self.trim();
        if dfa.is_empty_language() {
            return dfa;
        }
        let n = dfa.num_states();
        // Moore partition refinement. Missing transitions go to an implicit
        // sink, encoded as `usize::MAX`.
        let mut class: Vec<usize> = dfa.finals.iter().map(|&f| f as usize).collect();
        let mut num_classes = if class.iter().all(|&c| c == class[0]) { 1 } else { 2 };
        if num_classes == 1 {
            class.iter_mut().for_each(|c| *c = 0);
        }
        loop {
            let mut signatures: HashMap<(usize, Vec<(&Activity, usize)>), usize> = HashMap::new();
            let mut next_class = vec![0; n];
            for s in 0..n {
                let sig: Vec<(&Activity, usize)> =
                    dfa.transitions[s].iter().map(|(a, &t)| (a, class[t])).collect();
                let len = signatures.len();
                next_class[s] = *signatures.entry((class[s], sig)).or_insert(len);
            }
            let count = signatures.len();
            class = next_class;
            if count == num_classes {
                break;
            }
            num_classes = count;
        }
        // Canonical BFS numbering of the quotient.
        let mut order = vec![usize::MAX; num_classes];
        let mut repr = vec![usize::MAX; num_classes];
        for s in 0..n {
            if repr[class[s]] == usize::MAX {
                repr[class[s]] = s;
            }
        }
        let mut queue = VecDeque::from([class[dfa.initial]]);
        order[class[dfa.initial]] = 0;
        let mut visit = vec![class[dfa.initial]];
        let mut next = 1;
        while let Some(c) = queue.pop_front() {
            for &t in dfa.transitions[repr[c]].values() {
                let tc = class[t];
                if order[tc] == usize::MAX {
                    order[tc] = next;
                    next += 1;
                    queue.push_back(tc);
                    visit.push(tc);
                }
            }
        }
        let finals = visit.iter().map(|&c| dfa.finals[repr[c]]).collect();
        let transitions = visit
            .iter()
            .map(|&c| {
                dfa.transitions[repr[c]]
                    .iter()
                    .map(|(a, &t)| (a.clone(), order[class[t]]))
                    .collect()
            })
            .collect();
        Automaton {
            initial: 0,
            finals,
            transitions,
        }
    }

    /// Language equality, decided by comparing canonical minimal automata.
    pub fn language_eq(&self, other: &Automaton) -> bool {
        self.clone().minimize() == other.clone().minimize()
    }

    /// Trimmed product acceptor of the intersection of both languages.
    pub fn intersect(&self, other: &Automaton) -> Automaton {
        let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut pairs = vec![(self.initial, other.initial)];
        index.insert((self.initial, other.initial), 0);
        let mut finals = Vec::new();
        let mut transitions = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            finals.push(self.finals[p] && other.finals[q]);
            let mut row = BTreeMap::new();
            let (small, large, flip) = if self.transitions[p].len() <= other.transitions[q].len() {
                (&self.transitions[p], &other.transitions[q], false)
            } else {
                (&other.transitions[q], &self.transitions[p], true)
            };
            for (a, &s1) in small {
                if let Some(&s2) = large.get(a) {
                    let key = if flip { (s2, s1) } else { (s1, s2) };
                    let len = pairs.len();
                    let id = *index.entry(key).or_insert_with(|| {
                        pairs.push(key);
                        len
                    });
                    row.insert(a.clone(), id);
                }
            }
            transitions.push(row);
            i += 1;
        }
        Automaton {
            initial: 0,
            finals,
            transitions,
        }
        .trim()
    }

    /// Directly-follows pairs occurring in some accepted word.
    pub fn df_pairs(&self) -> BTreeSet<(Activity, Activity)> {
        let mut incoming: Vec<BTreeSet<&Activity>> = vec![BTreeSet::new(); self.num_states()];
        for row in &self.transitions {
            for (a, &t) in row {
                incoming[t].insert(a);
            }
        }
        let mut pairs = BTreeSet::new();
        for (s, row) in self.transitions.iter().enumerate() {
            for a in &incoming[s] {
                for b in row.keys() {
                    pairs.insert(((*a).clone(), b.clone()));
                }
            }
        }
        pairs
    }

    /// Activities that begin some accepted word.
    pub fn start_activities(&self) -> BTreeSet<Activity> {
        self.transitions[self.initial].keys().cloned().collect()
    }

    /// Activities that end some accepted word.
    pub fn end_activities(&self) -> BTreeSet<Activity> {
        let mut ends = BTreeSet::new();
        for row in &self.transitions {
            for (a, &t) in row {
                if self.finals[t] {
                    ends.insert(a.clone());
                }
            }
        }
        ends
    }

    /// All accepted words of length at most `max_len`, in length-lexicographic order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<Activity>> {
        let mut out = Vec::new();
        let mut frontier = vec![(self.initial, Vec::new())];
        for len in 0..=max_len {
            let mut next = Vec::new();
            for (s, word) in frontier {
                if self.finals[s] {
                    out.push(word.clone());
                }
                if len == max_len {
                    continue;
                }
                for (a, &t) in &self.transitions[s] {
                    let mut w = word.clone();
                    w.push(a.clone());
                    next.push((t, w));
                }
            }
            frontier = next;
        }
        out
    }
}

/// Nondeterministic automaton with ε-moves (`None` labels).
#[derive(Clone, Debug)]
pub struct Nfa {
    initial: StateId,
    finals: Vec<bool>,
    moves: Vec<Vec<(Option<Activity>, StateId)>>,
}

impl From<&Automaton> for Nfa {
    fn from(dfa: &Automaton) -> Self {
        Nfa {
            initial: dfa.initial,
            finals: dfa.finals.clone(),
            moves: dfa
                .transitions
                .iter()
                .map(|row| row.iter().map(|(a, &t)| (Some(a.clone()), t)).collect())
                .collect(),
        }
    }
}

impl Nfa {
    fn num_states(&self) -> usize {
        self.finals.len()
    }

    /// Appends the states of `other`, returning the offset of its state ids.
    fn absorb(&mut self, other: Nfa) -> usize {
        let offset = self.num_states();
        self.finals.extend(other.finals);
        self.moves.extend(
            other
                .moves
                .into_iter()
                .map(|row| row.into_iter().map(|(a, t)| (a, t + offset)).collect()),
        );
        offset
    }

    fn finals(&self) -> Vec<StateId> {
        (0..self.num_states()).filter(|&s| self.finals[s]).collect()
    }

    pub fn concat(mut self, other: Nfa) -> Nfa {
        let first_finals = self.finals();
        let other_initial = other.initial;
        self.finals.iter_mut().for_each(|f| *f = false);
        let offset = self.absorb(other);
        for f in first_finals {
            self.moves[f].push((None, other_initial + offset));
        }
        self
    }

    pub fn union(mut self, other: Nfa) -> Nfa {
        let other_initial = other.initial;
        let offset = self.absorb(other);
        let start = self.num_states();
        self.finals.push(false);
        self.moves.push(vec![(None, self.initial), (None, other_initial + offset)]);
        self.initial = start;
        self
    }

    /// `body · (redo · body)*`
    pub fn repeat(mut self, redo: Nfa) -> Nfa {
        let body_finals = self.finals();
        let redo_finals = redo.finals();
        let redo_initial = redo.initial;
        let offset = self.absorb(redo);
        for f in &redo_finals {
            self.finals[f + offset] = false;
            self.moves[f + offset].push((None, self.initial));
        }
        for f in body_finals {
            self.moves[f].push((None, redo_initial + offset));
        }
        self
    }

    /// Shuffle product: both operands advance independently, each step moving
    /// exactly one side; a label shared by both may move either side.
    pub fn shuffle(self, other: Nfa) -> Nfa {
        let width = other.num_states();
        let id = |p: StateId, q: StateId| p * width + q;
        let n = self.num_states() * width;
        let mut finals = vec![false; n];
        let mut moves = vec![Vec::new(); n];
        for p in 0..self.num_states() {
            for q in 0..width {
                let s = id(p, q);
                finals[s] = self.finals[p] && other.finals[q];
                for (a, t) in &self.moves[p] {
                    moves[s].push((a.clone(), id(*t, q)));
                }
                for (a, t) in &other.moves[q] {
                    moves[s].push((a.clone(), id(p, *t)));
                }
            }
        }
        Nfa {
            initial: id(self.initial, other.initial),
            finals,
            moves,
        }
    }

    fn closure(&self, seed: impl IntoIterator<Item = StateId>) -> BTreeSet<StateId> {
        let mut set: BTreeSet<StateId> = BTreeSet::new();
        let mut stack: Vec<StateId> = Vec::new();
        for s in seed {
            if set.insert(s) {
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for (a, t) in &self.moves[s] {
                if a.is_none() && set.insert(*t) {
                    stack.push(*t);
                }
            }
        }
        set
    }

    /// Subset construction over ε-closures, followed by minimization.
    pub fn determinize(&self) -> Automaton {
        let start = self.closure([self.initial]);
        let mut index: HashMap<BTreeSet<StateId>, StateId> = HashMap::new();
        index.insert(start.clone(), 0);
        let mut subsets = vec![start];
        let mut finals = Vec::new();
        let mut transitions = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            let subset = subsets[i].clone();
            finals.push(subset.iter().any(|&s| self.finals[s]));
            let mut targets: BTreeMap<&Activity, Vec<StateId>> = BTreeMap::new();
            for &s in &subset {
                for (a, t) in &self.moves[s] {
                    if let Some(a) = a {
                        targets.entry(a).or_default().push(*t);
                    }
                }
            }
            let mut row = BTreeMap::new();
            for (a, ts) in targets {
                let closed = self.closure(ts);
                let len = subsets.len();
                let id = *index.entry(closed.clone()).or_insert_with(|| {
                    subsets.push(closed);
                    len
                });
                row.insert(a.clone(), id);
            }
            transitions.push(row);
            i += 1;
        }
        Automaton {
            initial: 0,
            finals,
            transitions,
        }
        .minimize()
    }
}
