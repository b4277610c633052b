use std::collections::HashMap;

use crate::dynamics::words::{self, Word};
use crate::dynamics::SystemDescriptor;
use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::observables::LocallyConstant;

/// Edge `w[..s] -> w[1..]` for an admissible word `w` of length `s + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub tgt: usize,
    pub word: Word,
    pub u: Rational,
    pub psi: Rational,
}

/// Higher-block presentation of a shift on which two locally constant
/// functions become edge weights.
///
/// Nodes are admissible words of length `s = max(r - 1, 1)`; a periodic point
/// is a closed walk and its orbit sums are the walk's edge sums.
#[derive(Clone, Debug)]
pub struct WordGraph {
    pub span: usize,
    pub nodes: Vec<Word>,
    pub index: HashMap<Word, usize>,
    pub edges: Vec<Edge>,
    pub out: Vec<Vec<usize>>,
}

impl WordGraph {
    pub fn new(system: &SystemDescriptor, u: &LocallyConstant, psi: &LocallyConstant) -> Result<Self> {
        if !system.is_shift() {
            return Err(Error::KindMismatch { system: system.name() });
        }
        let r = u.depth.max(psi.depth);
        let span = r.saturating_sub(1).max(1);
        let nodes = system.admissible_words(span);
        let index: HashMap<Word, usize> = nodes.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut edges = Vec::new();
        let mut out = vec![Vec::new(); nodes.len()];
        for w in system.admissible_words(span + 1) {
            let lookup = |lc: &LocallyConstant| {
                lc.table.get(&w[..lc.depth]).cloned().ok_or_else(|| Error::InadmissibleWord {
                    word: words::word_to_string(&w[..lc.depth]),
                })
            };
            let e = Edge {
                src: index[&w[..span]],
                tgt: index[&w[1..]],
                u: lookup(u)?,
                psi: lookup(psi)?,
                word: w,
            };
            out[e.src].push(edges.len());
            edges.push(e);
        }
        Ok(WordGraph {
            span,
            nodes,
            index,
            edges,
            out,
        })
    }

    /// The periodic word traced by a closed walk given as edge indices.
    pub fn cycle_word(&self, cycle: &[usize]) -> Word {
        cycle.iter().map(|&e| self.edges[e].word[0]).collect()
    }

    /// Edge index sequence of the closed walk traced by `w^∞` starting at phase 0.
    pub fn walk_of(&self, w: &[u8]) -> Result<Vec<usize>> {
        let n = w.len();
        (0..n)
            .map(|i| {
                let key: Word = (0..=self.span).map(|j| w[(i + j) % n]).collect();
                let src = self.index.get(&key[..self.span]);
                src.and_then(|&s| self.out[s].iter().copied().find(|&e| self.edges[e].word == key))
                    .ok_or_else(|| Error::InadmissibleWord {
                        word: words::word_to_string(&key),
                    })
            })
            .collect()
    }

    /// All simple cycles of length `<= max_len`, each rooted at its smallest node.
    pub fn simple_cycles(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut found = Vec::new();
        let mut on_path = vec![false; self.nodes.len()];
        let mut path = Vec::new();
        for start in 0..self.nodes.len() {
            self.extend_cycles(start, start, max_len, &mut on_path, &mut path, &mut found);
        }
        found
    }

    fn extend_cycles(
        &self,
        start: usize,
        at: usize,
        max_len: usize,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
    ) {
        if path.len() >= max_len {
            return;
        }
        on_path[at] = true;
        for &e in &self.out[at] {
            let t = self.edges[e].tgt;
            if t == start {
                path.push(e);
                found.push(path.clone());
                path.pop();
            } else if t > start && !on_path[t] {
                path.push(e);
                self.extend_cycles(start, t, max_len, on_path, path, found);
                path.pop();
            }
        }
        on_path[at] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::int;

    #[test]
    fn full_shift_cycle_counts() {
        // Simple cycles of the complete digraph with loops on m nodes.
        for m in 2..=5u8 {
            let s = SystemDescriptor::full_shift(m);
            let u = LocallyConstant::constant(&s, int(0));
            let g = WordGraph::new(&s, &u, &u).unwrap();
            let m = m as usize;
            let expected: usize = (1..=m)
                .map(|k| {
                    let choose = (0..k).fold(1usize, |acc, i| acc * (m - i) / (i + 1));
                    choose * (1..k).product::<usize>()
                })
                .sum();
            assert_eq!(g.simple_cycles(m).len(), expected);
        }
    }

    #[test]
    fn walks_round_trip() {
        let s = SystemDescriptor::full_shift(2);
        let u = LocallyConstant::from_fn(&s, 3, |w| int(w.iter().map(|&c| c as i64).sum()));
        let g = WordGraph::new(&s, &u, &u).unwrap();
        assert_eq!(g.span, 2);
        let w = vec![0, 0, 1, 0, 1, 1];
        let walk = g.walk_of(&w).unwrap();
        assert_eq!(g.cycle_word(&walk), w);
        let total: Rational = walk.iter().map(|&e| g.edges[e].u.clone()).sum();
        assert_eq!(total, u.cyclic_sum(&w).unwrap());
    }
}
