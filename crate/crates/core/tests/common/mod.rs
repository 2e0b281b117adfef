#![allow(dead_code)]

use std::collections::HashMap;

use abel_core::algebra::{Alphabet, Word};
use num_bigint::BigUint;

/// Ordered tree whose internal nodes have exactly `n` child slots; a `Leaf`
/// is an empty slot.
#[derive(Clone, Debug)]
pub enum Tree {
    Leaf,
    Node(Vec<Tree>),
}

impl Tree {
    pub fn internal(&self) -> usize {
        match self {
            Tree::Leaf => 0,
            Tree::Node(c) => 1 + c.iter().map(Tree::internal).sum::<usize>(),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Node(c) => c.iter().map(Tree::leaves).sum(),
        }
    }

    /// Parent index of every internal node in preorder (`None` for the root).
    fn parents(&self) -> Vec<Option<usize>> {
        fn go(t: &Tree, parent: Option<usize>, out: &mut Vec<Option<usize>>) {
            if let Tree::Node(children) = t {
                let me = out.len();
                out.push(parent);
                for c in children {
                    go(c, Some(me), out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, None, &mut out);
        out
    }
}

/// Every shape with `k` internal nodes, each with `n` ordered slots.
pub fn tree_shapes(n: usize, k: usize) -> Vec<Tree> {
    if k == 0 {
        return vec![Tree::Leaf];
    }
    let mut out = Vec::new();
    // distribute k - 1 internal nodes over n slots
    fn fill(n: usize, slot: usize, rest: usize, cur: &mut Vec<Tree>, out: &mut Vec<Tree>) {
        if slot == n {
            if rest == 0 {
                out.push(Tree::Node(cur.clone()));
            }
            return;
        }
        for size in 0..=rest {
            for sub in tree_shapes(n, size) {
                cur.push(sub);
                fill(n, slot + 1, rest - size, cur, out);
                cur.pop();
            }
        }
    }
    fill(n, 0, k - 1, &mut Vec::new(), &mut out);
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Increasing trees: shapes with labels `0..k` that grow from root to leaves.
/// Returns every (shape, labelling) pair as the shape's leaf count.
pub fn increasing_trees(n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for shape in tree_shapes(n, k) {
        let parents = shape.parents();
        for labels in permutations(k) {
            let increasing = parents
                .iter()
                .enumerate()
                .all(|(v, p)| p.is_none_or(|p| labels[p] < labels[v]));
            if increasing {
                out.push(shape.leaves());
            }
        }
    }
    out
}

/// `(X_{i_1} ∘ ... ∘ X_{i_k})(x)` at `x = 0`, with `X_i f = x^i f'`, computed
/// on dense polynomial coefficients.
pub fn cf_by_operators(v: &Word) -> BigUint {
    // p[m] = coefficient of x^m
    let mut p: Vec<BigUint> = vec![BigUint::from(0u32), BigUint::from(1u32)];
    for l in v.letters().rev() {
        let i = l.index();
        let mut next = vec![BigUint::from(0u32); p.len() + i];
        for (m, c) in p.iter().enumerate().skip(1) {
            next[m - 1 + i] += c * BigUint::from(m);
        }
        p = next;
    }
    p.first().cloned().unwrap_or_default()
}

/// Multiset of all interleavings of `v` and `w`, by choosing the positions
/// of `v` in the merged word.
pub fn interleavings(v: &Word, w: &Word) -> HashMap<Word, u64> {
    let (vl, wl): (Vec<_>, Vec<_>) = (v.letters().collect(), w.letters().collect());
    let total = vl.len() + wl.len();
    let mut out = HashMap::new();
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != vl.len() {
            continue;
        }
        let (mut a, mut b) = (vl.iter(), wl.iter());
        let merged = (0..total).map(|pos| {
            if mask & (1 << pos) != 0 {
                *a.next().unwrap()
            } else {
                *b.next().unwrap()
            }
        });
        *out.entry(Word::from_letters(merged)).or_insert(0) += 1;
    }
    out
}

pub fn all_words(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    (0..=max_len).flat_map(|k| alphabet.words_of_length(k)).collect()
}

pub fn binomial_u64(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}
