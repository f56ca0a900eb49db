//! Knuth-Bendix completion for path equations.
//!
//! A presentation's equations are oriented by shortlex order into rewrite rules
//! `lhs -> rhs` (with `lhs` shortlex-greater) and completed by resolving
//! critical pairs. Once complete, every path has a unique irreducible form,
//! which is the shortlex-least path of its congruence class. Reducing a
//! subword keeps the path well typed because both sides of every rule are
//! parallel.

use std::cmp::Ordering;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::graph::{shortlex, EdgeId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Rule {
    pub lhs: Vec<EdgeId>,
    pub rhs: Vec<EdgeId>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct RewriteSystem {
    rules: Vec<Rule>,
    index: Index,
}

/// Completion gave up after creating more than `cap` rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Diverged {
    pub rules: usize,
}

fn find(haystack: &[EdgeId], needle: &[EdgeId]) -> Option<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return None;
    }
    haystack.windows(needle.len()).position(|w| w == needle)
}

/// Rules indexed by the last edge of their left side.
#[derive(Clone, Debug, Default)]
struct Index(HashMap<EdgeId, Vec<usize>>);

impl Index {
    fn build(rules: &[Rule]) -> Self {
        let mut map: HashMap<EdgeId, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            map.entry(*r.lhs.last().expect("left sides are nonempty"))
                .or_default()
                .push(i);
        }
        Index(map)
    }

    fn matching<'r>(&self, rules: &'r [Rule], word: &[EdgeId]) -> Option<&'r Rule> {
        let last = word.last()?;
        self.0
            .get(last)?
            .iter()
            .map(|&i| &rules[i])
            .find(|r| word.ends_with(&r.lhs))
    }
}

fn reduce_indexed(rules: &[Rule], index: &Index, word: &[EdgeId]) -> Vec<EdgeId> {
    // Left-to-right reduction with an output stack: after each push only a
    // suffix of the stack can have become reducible.
    let mut out: Vec<EdgeId> = Vec::with_capacity(word.len());
    let mut input: Vec<EdgeId> = word.iter().rev().copied().collect();
    while let Some(x) = input.pop() {
        out.push(x);
        if let Some(rule) = index.matching(rules, &out) {
            out.truncate(out.len() - rule.lhs.len());
            input.extend(rule.rhs.iter().rev());
        }
    }
    out
}

/// Critical pairs allowed per permitted rule before completion gives up.
pub(crate) const PAIRS_PER_RULE: usize = 64;

/// Pending equations, shortest first, ties in arrival order.
#[derive(Default)]
struct Queue {
    heap: BinaryHeap<Reverse<(usize, usize, Vec<EdgeId>, Vec<EdgeId>)>>,
    seq: usize,
}

impl Queue {
    fn push(&mut self, (a, b): (Vec<EdgeId>, Vec<EdgeId>)) {
        self.seq += 1;
        self.heap.push(Reverse((a.len().max(b.len()), self.seq, a, b)));
    }

    fn pop(&mut self) -> Option<(Vec<EdgeId>, Vec<EdgeId>)> {
        self.heap.pop().map(|Reverse((_, _, a, b))| (a, b))
    }

    fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

impl RewriteSystem {
    /// Completion that gives up once more than `cap` rules have been created
    /// (counting rules later retired by interreduction) or more than
    /// `PAIRS_PER_RULE * cap` critical pairs have been queued.
    pub fn complete(
        equations: impl IntoIterator<Item = (Vec<EdgeId>, Vec<EdgeId>)>,
        cap: usize,
    ) -> Result<Self, Diverged> {
        let mut rules: Vec<Rule> = Vec::new();
        let mut index = Index::default();
        let mut pending = Queue::default();
        for eq in equations {
            pending.push(eq);
        }
        let mut created = 0usize;
        let pair_budget = cap.saturating_mul(PAIRS_PER_RULE);
        loop {
            while let Some((a, b)) = pending.pop() {
                let a = reduce_indexed(&rules, &index, &a);
                let b = reduce_indexed(&rules, &index, &b);
                let (lhs, rhs) = match shortlex(&a, &b) {
                    Ordering::Equal => continue,
                    Ordering::Greater => (a, b),
                    Ordering::Less => (b, a),
                };
                created += 1;
                if created > cap {
                    return Err(Diverged { rules: created });
                }
                // Rules whose left side contains the new left side are retired
                // and re-queued as equations.
                let mut kept = Vec::with_capacity(rules.len() + 1);
                for old in rules.drain(..) {
                    if find(&old.lhs, &lhs).is_some() {
                        pending.push((old.lhs, old.rhs));
                    } else {
                        kept.push(old);
                    }
                }
                let new = Rule { lhs, rhs };
                for old in &kept {
                    for cp in critical_pairs(&new, old, false) {
                        pending.push(cp);
                    }
                    for cp in critical_pairs(old, &new, false) {
                        pending.push(cp);
                    }
                }
                for cp in critical_pairs(&new, &new, true) {
                    pending.push(cp);
                }
                kept.push(new);
                rules = kept;
                if pending.seq > pair_budget {
                    return Err(Diverged { rules: created });
                }
                index = Index::build(&rules);
                for i in 0..rules.len() {
                    let reduced = reduce_indexed(&rules, &index, &rules[i].rhs);
                    rules[i].rhs = reduced;
                }
            }

            // Confirm confluence over the final rule set.
            for i in 0..rules.len() {
                for j in 0..rules.len() {
                    for (u, v) in critical_pairs(&rules[i], &rules[j], i == j) {
                        if reduce_indexed(&rules, &index, &u) != reduce_indexed(&rules, &index, &v) {
                            pending.push((u, v));
                        }
                    }
                }
            }
            if pending.is_empty() {
                break;
            }
        }
        rules.sort_by(|a, b| shortlex(&a.lhs, &b.lhs).then_with(|| a.rhs.cmp(&b.rhs)));
        let index = Index::build(&rules);
        Ok(RewriteSystem { rules, index })
    }

    pub fn reduce(&self, word: &[EdgeId]) -> Vec<EdgeId> {
        reduce_indexed(&self.rules, &self.index, word)
    }

    /// True when some left side is a suffix of `word`. For a word whose proper
    /// prefix is irreducible this decides irreducibility.
    pub fn has_reducible_suffix(&self, word: &[EdgeId]) -> bool {
        self.index.matching(&self.rules, word).is_some()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }
}

fn critical_pairs(r1: &Rule, r2: &Rule, same: bool) -> Vec<(Vec<EdgeId>, Vec<EdgeId>)> {
    let mut out = Vec::new();
    let (l1, l2) = (&r1.lhs, &r2.lhs);
    // Proper overlap: l1 = x o, l2 = o y with x, o, y nonempty.
    for k in 1..l1.len().min(l2.len()) {
        if l1[l1.len() - k..] == l2[..k] {
            let mut via_first = r1.rhs.clone();
            via_first.extend_from_slice(&l2[k..]);
            let mut via_second = l1[..l1.len() - k].to_vec();
            via_second.extend_from_slice(&r2.rhs);
            out.push((via_first, via_second));
        }
    }
    // Inclusion: l2 occurs inside l1.
    if !same {
        if let Some(pos) = find(l1, l2) {
            let mut via_second = l1[..pos].to_vec();
            via_second.extend_from_slice(&r2.rhs);
            via_second.extend_from_slice(&l1[pos + l2.len()..]);
            out.push((r1.rhs.clone(), via_second));
        }
    }
    out
}
