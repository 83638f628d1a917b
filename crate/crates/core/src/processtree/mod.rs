//! Process trees: the model class for true processes and discovered models.
//!
//! Canonical text form: `seq(xor(a,b),and(c,tau))`, with `loop(do,redo)`.
//! Labels that are not plain identifiers, or that read `tau`, are written in
//! single quotes with `''` as the escaped quote.

mod generate;
mod simulate;

pub use generate::{generate, GeneratorError, GeneratorParams};
pub use simulate::{simulate, simulate_trace, SimulationParams};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::conformance::{Automaton, Nfa};
use crate::eventlog::Activity;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProcessTree {
    Leaf(Activity),
    Silent,
    Sequence(Vec<ProcessTree>),
    Xor(Vec<ProcessTree>),
    Parallel(Vec<ProcessTree>),
    Loop(Box<ProcessTree>, Box<ProcessTree>),
}

impl ProcessTree {
    pub fn leaf(label: &str) -> Self {
        ProcessTree::Leaf(Activity::from(label))
    }

    pub fn looped(body: ProcessTree, redo: ProcessTree) -> Self {
        ProcessTree::Loop(Box::new(body), Box::new(redo))
    }

    pub fn children(&self) -> Vec<&ProcessTree> {
        match self {
            ProcessTree::Leaf(_) | ProcessTree::Silent => Vec::new(),
            ProcessTree::Sequence(c) | ProcessTree::Xor(c) | ProcessTree::Parallel(c) => c.iter().collect(),
            ProcessTree::Loop(body, redo) => vec![body, redo],
        }
    }

    /// Leaf labels in left-to-right order, with repetitions.
    pub fn leaves(&self) -> Vec<&Activity> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Activity>) {
        match self {
            ProcessTree::Leaf(a) => out.push(a),
            _ => self.children().into_iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn activities(&self) -> BTreeSet<Activity> {
        self.leaves().into_iter().cloned().collect()
    }

    pub fn has_duplicate_labels(&self) -> bool {
        let leaves = self.leaves();
        leaves.len() != leaves.iter().collect::<BTreeSet<_>>().len()
    }

    pub fn contains_silent(&self) -> bool {
        matches!(self, ProcessTree::Silent) || self.children().into_iter().any(ProcessTree::contains_silent)
    }

    /// Whether the tree lies in the class the basic Inductive Miner
    /// rediscovers from a directly-follows complete log: no silent steps, no
    /// duplicate labels, and no loop body that can start and end with the
    /// same activity.
    pub fn is_rediscoverable(&self) -> bool {
        !self.contains_silent() && !self.has_duplicate_labels() && self.loops_separable()
    }

    fn loops_separable(&self) -> bool {
        if let ProcessTree::Loop(body, _) = self {
            if !body.boundary(true).is_disjoint(&body.boundary(false)) {
                return false;
            }
        }
        self.children().into_iter().all(ProcessTree::loops_separable)
    }

    /// First (`start`) or last activities of a silent-free tree.
    fn boundary(&self, start: bool) -> BTreeSet<&Activity> {
        match self {
            ProcessTree::Leaf(a) => BTreeSet::from([a]),
            ProcessTree::Silent => BTreeSet::new(),
            ProcessTree::Sequence(c) => {
                let edge = if start { c.first() } else { c.last() };
                edge.map(|c| c.boundary(start)).unwrap_or_default()
            }
            ProcessTree::Xor(c) | ProcessTree::Parallel(c) => c.iter().flat_map(|c| c.boundary(start)).collect(),
            ProcessTree::Loop(body, _) => body.boundary(start),
        }
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(ProcessTree::depth).max().unwrap_or(0)
    }

    /// Longest trace that play-out can emit when every loop body runs at most
    /// `max_loop_iterations` times.
    pub fn max_trace_len(&self, max_loop_iterations: usize) -> usize {
        let k = max_loop_iterations.max(1);
        match self {
            ProcessTree::Leaf(_) => 1,
            ProcessTree::Silent => 0,
            ProcessTree::Sequence(c) | ProcessTree::Parallel(c) => c.iter().map(|c| c.max_trace_len(k)).sum(),
            ProcessTree::Xor(c) => c.iter().map(|c| c.max_trace_len(k)).max().unwrap_or(0),
            ProcessTree::Loop(body, redo) => k * body.max_trace_len(k) + (k - 1) * redo.max_trace_len(k),
        }
    }

    /// Minimal deterministic acceptor of the tree's trace language.
    ///
    /// Built bottom-up: each operator combines the minimized acceptors of its
    /// children through an ε-NFA (concatenation, union, `do·(redo·do)*`, or
    /// shuffle product), which is then determinized and minimized.
    pub fn to_automaton(&self) -> Automaton {
        match self {
            ProcessTree::Leaf(a) => Automaton::single(a.clone()),
            ProcessTree::Silent => Automaton::epsilon(),
            ProcessTree::Sequence(c) => fold(c, Nfa::concat),
            ProcessTree::Xor(c) => fold(c, Nfa::union),
            ProcessTree::Parallel(c) => fold(c, Nfa::shuffle),
            ProcessTree::Loop(body, redo) => {
                Nfa::from(&body.to_automaton()).repeat(Nfa::from(&redo.to_automaton())).determinize()
            }
        }
    }
}

fn fold(children: &[ProcessTree], op: fn(Nfa, Nfa) -> Nfa) -> Automaton {
    let mut iter = children.iter();
    let first = iter.next().expect("operator without children").to_automaton();
    iter.fold(first, |acc, child| op(Nfa::from(&acc), Nfa::from(&child.to_automaton())).determinize())
}

fn is_plain_label(s: &str) -> bool {
    s != "tau"
        && !s.is_empty()
        && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '+' | '/'))
}

impl fmt::Display for ProcessTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, children) = match self {
            ProcessTree::Leaf(a) => {
                return if is_plain_label(a.as_str()) {
                    f.write_str(a.as_str())
                } else {
                    write!(f, "'{}'", a.as_str().replace('\'', "''"))
                };
            }
            ProcessTree::Silent => return f.write_str("tau"),
            ProcessTree::Sequence(_) => ("seq", self.children()),
            ProcessTree::Xor(_) => ("xor", self.children()),
            ProcessTree::Parallel(_) => ("and", self.children()),
            ProcessTree::Loop(..) => ("loop", self.children()),
        };
        write!(f, "{name}(")?;
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("tree syntax error at offset {offset}: {message}")]
pub struct TreeParseError {
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, TreeParseError> {
        Err(TreeParseError {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), TreeParseError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            self.error(format!("expected `{c}`"))
        }
    }

    fn quoted(&mut self) -> Result<String, TreeParseError> {
        self.expect('\'')?;
        let mut out = String::new();
        let mut chars = self.src[self.pos..].char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            if c == '\'' {
                if let Some((_, '\'')) = chars.peek() {
                    chars.next();
                    out.push('\'');
                } else {
                    self.pos += i + 1;
                    return Ok(out);
                }
            } else {
                out.push(c);
            }
        }
        self.error("unterminated quoted label")
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '\''))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn tree(&mut self) -> Result<ProcessTree, TreeParseError> {
        if self.peek() == Some('\'') {
            let label = self.quoted()?;
            return match Activity::new(&label) {
                Some(a) => Ok(ProcessTree::Leaf(a)),
                None => self.error("empty label"),
            };
        }
        let start = self.pos;
        let word = self.word();
        if word.is_empty() {
            return self.error("expected a label or operator");
        }
        if self.peek() != Some('(') {
            return Ok(match word {
                "tau" => ProcessTree::Silent,
                label => ProcessTree::leaf(label),
            });
        }
        self.expect('(')?;
        let mut children = vec![self.tree()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            children.push(self.tree()?);
        }
        self.expect(')')?;
        let arity_error = |min: &str| TreeParseError {
            offset: start,
            message: format!("`{word}` needs {min} children"),
        };
        match word {
            "seq" | "xor" | "and" if children.len() < 2 => Err(arity_error("at least 2")),
            "seq" => Ok(ProcessTree::Sequence(children)),
            "xor" => Ok(ProcessTree::Xor(children)),
            "and" => Ok(ProcessTree::Parallel(children)),
            "loop" if children.len() != 2 => Err(arity_error("exactly 2")),
            "loop" => {
                let redo = children.pop().unwrap();
                let body = children.pop().unwrap();
                Ok(ProcessTree::looped(body, redo))
            }
            other => Err(TreeParseError {
                offset: start,
                message: format!("unknown operator `{other}`"),
            }),
        }
    }
}

impl FromStr for ProcessTree {
    type Err = TreeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = Parser { src: s, pos: 0 };
        let tree = parser.tree()?;
        if parser.peek().is_some() {
            return parser.error("trailing input");
        }
        Ok(tree)
    }
}
