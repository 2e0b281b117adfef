//! Exact counting: increasing full n-ary trees, integer partitions,
//! Chen-Fliess coefficients of the vector fields `x^i d/dx` and the index
//! sets `M0(k)` of their nonvanishing integrals.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::algebra::{Alphabet, Word};
use crate::error::{Error, Result};

pub fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

/// `(l1 + ... + lm)! / (l1! ... lm!)`.
pub fn multinomial(parts: &[usize]) -> BigUint {
    let total: usize = parts.iter().sum();
    parts
        .iter()
        .fold(factorial(total), |acc, &l| acc / factorial(l))
}

pub fn catalan(k: usize) -> BigUint {
    binomial(2 * k, k) / BigUint::from(k + 1)
}

/// Number of increasing full `n`-ary trees with `k` internal vertices, from
/// the closed product `((n-1)(k-1)+1) ··· ((n-1)+1)`; `1` for `k = 0`.
pub fn tree_count_product(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for j in 1..k {
        // n = 0 makes the first factor zero
        let factor = (n as i128 - 1) * j as i128 + 1;
        if factor <= 0 {
            return BigUint::zero();
        }
        acc *= BigUint::from(factor as u128);
    }
    acc
}

/// Tree counts `|T_n^k|` for `k = 0..=K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeCountTable {
    pub n: usize,
    pub counts: Vec<BigUint>,
}

/// Every weak composition of `total` into `parts` nonnegative summands.
fn weak_compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=rest {
            cur.push(first);
            go(rest - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Tree counts from the root-split recurrence
/// `|T^{k+1}| = Σ_{l1+...+ln = k} multinomial(k; l) · |T^{l1}| ··· |T^{ln}|`.
///
/// The recurrence needs `n >= 1`; for `n = 0` use [`tree_count_product`].
pub fn tree_count_recurrence(n: usize, order: usize) -> Result<TreeCountTable> {
    if n == 0 {
        return Err(Error::Config(
            "tree count recurrence is defined for n >= 1 only".into(),
        ));
    }
    let mut counts = vec![BigUint::one()];
    for k in 0..order {
        let next = weak_compositions(k, n)
            .iter()
            .map(|l| {
                l.iter()
                    .fold(multinomial(l), |acc, &lj| acc * &counts[lj])
            })
            .fold(BigUint::zero(), |acc, x| acc + x);
        counts.push(next);
    }
    Ok(TreeCountTable { n, counts })
}

/// Number of partitions of `k` into parts no larger than `max_part`.
///
/// By conjugation this also counts partitions into at most `max_part` parts.
pub fn bounded_partition_count(k: usize, max_part: usize) -> BigUint {
    let mut ways = vec![BigUint::zero(); k + 1];
    ways[0] = BigUint::one();
    for part in 1..=max_part.min(k) {
        for total in part..=k {
            let add = ways[total - part].clone();
            ways[total] += add;
        }
    }
    ways[k].clone()
}

pub fn partition_count(k: usize) -> BigUint {
    bounded_partition_count(k, k)
}

/// Operator form of `X_{i1} ··· X_{ik}` applied to `h(x) = x`, modulo second
/// and higher derivatives: `coefficient · x^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfOperator {
    pub coefficient: BigUint,
    pub exponent: i64,
}

/// Suffix product `i_k (i_k + i_{k-1} - 1) ··· (i_k + ... + i_2 - k + 2)`
/// and exponent `i_1 + ... + i_k - k + 1` for `v = a_{i1} ··· a_{ik}`.
pub fn cf_operator(v: &Word) -> CfOperator {
    let idx = v.indices();
    let k = idx.len();
    let exponent = idx.iter().sum::<usize>() as i64 - k as i64 + 1;
    let mut coefficient = BigUint::one();
    let mut suffix = 0i64;
    for (steps, &i) in idx.iter().skip(1).rev().enumerate() {
        suffix += i as i64;
        let factor = suffix - steps as i64;
        if factor <= 0 {
            coefficient = BigUint::zero();
            break;
        }
        coefficient *= BigUint::from(factor as u64);
    }
    CfOperator {
        coefficient,
        exponent,
    }
}

/// Chen-Fliess coefficient of the word `v`.
///
/// With `evaluate_at_zero` the operator is evaluated at `x = 0`, which keeps
/// only words with index sum `|v| - 1`; otherwise the operator coefficient
/// alone is returned.
pub fn cf_coefficient(v: &Word, evaluate_at_zero: bool) -> BigUint {
    if v.is_empty() {
        return BigUint::zero();
    }
    let op = cf_operator(v);
    if evaluate_at_zero && op.exponent != 0 {
        return BigUint::zero();
    }
    op.coefficient
}

/// Letter-index sequence `(i_1, ..., i_k)` of a Chen-Fliess integral.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CfIndex {
    pub indices: Vec<usize>,
}

impl CfIndex {
    /// Membership in `M0(k)`: `Σ i_j = k - 1` and
    /// `i_k + ... + i_j - (k - j) >= 0` for `j = 2..=k`.
    pub fn is_in_m0(&self) -> bool {
        let k = self.indices.len();
        if k == 0 || self.indices.iter().sum::<usize>() != k - 1 {
            return false;
        }
        let mut suffix = 0i64;
        for (steps, &i) in self.indices.iter().skip(1).rev().enumerate() {
            suffix += i as i64;
            if suffix < steps as i64 {
                return false;
            }
        }
        true
    }

    pub fn word(&self, alphabet: &Alphabet) -> Result<Word> {
        alphabet.word(&self.indices)
    }
}

/// All of `M0(k)` within `{0..n}^k`, in lexicographic order.
pub fn enumerate_m0(k: usize, n: usize) -> Vec<CfIndex> {
    // Fill positions from the end; `pos` is the 1-based index being chosen.
    fn go(pos: usize, k: usize, n: usize, suffix: usize, tail: &mut Vec<usize>, out: &mut Vec<CfIndex>) {
        let target = k - 1;
        if pos == 1 {
            let first = target - suffix;
            if first <= n {
                let mut indices = Vec::with_capacity(k);
                indices.push(first);
                indices.extend(tail.iter().rev());
                out.push(CfIndex { indices });
            }
            return;
        }
        for i in 0..=n {
            let s = suffix + i;
            if s > target {
                break;
            }
            // i_k + ... + i_pos >= k - pos, and the remaining pos-1 letters must reach the target
            if s + pos < k || s + n * (pos - 1) < target {
                continue;
            }
            tail.push(i);
            go(pos - 1, k, n, s, tail, out);
            tail.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    go(k, k, n, 0, &mut Vec::with_capacity(k), &mut out);
    out.sort();
    out
}

/// `|M0(k)|` restricted to letters `<= n`, counted without enumeration.
pub fn m0_count(k: usize, n: usize) -> BigUint {
    if k == 0 {
        return BigUint::zero();
    }
    let target = k - 1;
    // ways[s]: number of admissible suffixes i_pos..i_k with sum s
    let mut ways = vec![BigUint::zero(); target + 1];
    ways[0] = BigUint::one();
    for pos in (2..=k).rev() {
        let mut next = vec![BigUint::zero(); target + 1];
        for (prev, w) in ways.iter().enumerate().filter(|(_, w)| !w.is_zero()) {
            for i in 0..=n.min(target - prev) {
                let s = prev + i;
                if s + pos >= k && s + n * (pos - 1) >= target {
                    next[s] += w;
                }
            }
        }
        ways = next;
    }
    ways.iter()
        .enumerate()
        .filter(|(s, _)| target - s <= n)
        .map(|(_, w)| w.clone())
        .sum()
}

/// `C(n, i)` as a signed integer, used as a coefficient multiplier.
pub fn binomial_int(n: usize, k: usize) -> BigInt {
    BigInt::from(binomial(n, k))
}
