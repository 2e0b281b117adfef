//! Symbolic solution of the shuffle equation
//! `Z = a0 + Σ_i C(n,i) Z^⧢i · a_i`, graded by degree, together with the
//! closed forms available for the linear, Riccati and two-term equations.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{shuffle_exp_truncated, Alphabet, Coeff, GradedSeries, JsonTerm, Letter, NCPolynomial};
use crate::combinatorics::{binomial_int, factorial};
use crate::error::{Error, Result};

/// Default cap on the truncation order.
pub const DEFAULT_ORDER_GUARD: usize = 16;

/// Whether user-facing coefficients are the `u_i` of `ẋ = Σ C(n,i) u_i x^i`
/// or raw `c_i` of `ẋ = Σ c_i x^i`, related by `u_i = c_i / C(n,i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Normalized,
    Raw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquationSpec {
    pub n: usize,
    pub normalization: Normalization,
    pub order_guard: usize,
}

impl EquationSpec {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            normalization: Normalization::Normalized,
            order_guard: DEFAULT_ORDER_GUARD,
        }
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn with_guard(mut self, guard: usize) -> Self {
        self.order_guard = guard;
        self
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.n)
    }

    /// `C(n, i)`.
    pub fn binomial(&self, i: usize) -> BigInt {
        binomial_int(self.n, i)
    }

    pub fn check_order(&self, order: usize) -> Result<()> {
        if order > self.order_guard {
            return Err(Error::GuardExceeded {
                order,
                guard: self.order_guard,
            });
        }
        Ok(())
    }
}

/// Multi-indices `(l_1, ..., l_i)` with `l_j >= 1` summing to `k`: either all
/// compositions (`N_i(k)`) or only the nondecreasing ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndexSet {
    pub k: usize,
    pub i: usize,
    pub ordered: bool,
    pub elements: Vec<Vec<usize>>,
}

impl MultiIndexSet {
    /// All compositions of `k` into `i` positive parts, lexicographic order.
    pub fn compositions(k: usize, i: usize) -> Self {
        Self::build(k, i, false)
    }

    /// Nondecreasing compositions, i.e. partitions of `k` into exactly `i` parts.
    pub fn partitions(k: usize, i: usize) -> Self {
        Self::build(k, i, true)
    }

    fn build(k: usize, i: usize, ordered: bool) -> Self {
        fn go(rest: usize, slots: usize, min: usize, ordered: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if slots == 0 {
                if rest == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            if ordered {
                let mut l = min;
                while l * slots <= rest {
                    cur.push(l);
                    go(rest - l, slots - 1, l, ordered, cur, out);
                    cur.pop();
                    l += 1;
                }
            } else {
                for l in 1..=rest.saturating_sub(slots - 1) {
                    cur.push(l);
                    go(rest - l, slots - 1, l, ordered, cur, out);
                    cur.pop();
                }
            }
        }
        let mut elements = Vec::new();
        if i > 0 {
            go(k, i, 1, ordered, &mut Vec::with_capacity(i), &mut elements);
        } else if k == 0 {
            elements.push(Vec::new());
        }
        Self {
            k,
            i,
            ordered,
            elements,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Number of distinct rearrangements of `l`: `i! / Π_m mult_m!`.
pub fn rearrangement_count(l: &[usize]) -> u64 {
    let mut mult: HashMap<usize, usize> = HashMap::new();
    for &x in l {
        *mult.entry(x).or_insert(0) += 1;
    }
    let r = mult
        .values()
        .fold(factorial(l.len()), |acc, &m| acc / factorial(m));
    u64::try_from(r).expect("rearrangement count fits in u64")
}

/// Memoized `Z_{l_1} ⧢ ... ⧢ Z_{l_i}` keyed by the sorted multi-index.
struct ShuffleMemo {
    cache: HashMap<Vec<usize>, NCPolynomial>,
}

impl ShuffleMemo {
    fn new() -> Self {
        Self {
            cache: HashMap::new(),
        }
    }

    fn product(&mut self, parts: &[NCPolynomial], sorted: &[usize]) -> NCPolynomial {
        if let Some(p) = self.cache.get(sorted) {
            return p.clone();
        }
        let p = match sorted {
            [] => NCPolynomial::one(),
            [single] => parts[*single].clone(),
            [rest @ .., last] => {
                let head = self.product(parts, rest);
                head.shuffle(&parts[*last])
            }
        };
        self.cache.insert(sorted.to_vec(), p.clone());
        p
    }
}

/// Runs `Z_{k+1} = Σ_{(i, c)} c Σ_{l ∈ N_i(k)} Z_{l_1} ⧢ ... ⧢ Z_{l_i} · a_i`
/// with `Z_0 = 0` and `Z_1 = a0`.
fn expand_recursion(order: usize, terms: &[(Letter, BigInt)]) -> GradedSeries {
    let a0 = Letter::A0;
    let mut parts = vec![NCPolynomial::zero(); order + 1];
    if order >= 1 {
        parts[1] = NCPolynomial::from_letter(a0);
    }
    let mut memo = ShuffleMemo::new();
    for k in 1..order {
        let mut next = NCPolynomial::zero();
        for (letter, weight) in terms {
            let i = letter.index();
            if i > k || weight.is_zero() {
                continue;
            }
            let mut inner = NCPolynomial::zero();
            for l in &MultiIndexSet::compositions(k, i).elements {
                let mut key = l.clone();
                key.sort_unstable();
                inner.add_assign_scaled(&memo.product(&parts, &key), &Coeff::one());
            }
            next.add_assign_scaled(
                &inner.concat_letter(*letter),
                &BigRational::from_integer(weight.clone()),
            );
        }
        parts[k + 1] = next;
    }
    GradedSeries::new(parts).expect("recursion produces homogeneous parts")
}

/// Graded solution `Z` of the shuffle equation truncated at `order`.
pub fn expand_general(spec: &EquationSpec, order: usize) -> Result<GradedSeries> {
    spec.check_order(order)?;
    let alphabet = spec.alphabet()?;
    let terms: Vec<(Letter, BigInt)> = (1..=spec.n)
        .map(|i| Ok((alphabet.letter(i)?, spec.binomial(i))))
        .collect::<Result<_>>()?;
    Ok(expand_recursion(order, &terms))
}

/// Checks `Z = a0 + Σ C(n,i) Z^⧢i · a_i` part by part up to the order of `z`.
pub fn verify_algebraic_equation(z: &GradedSeries, spec: &EquationSpec) -> Result<bool> {
    let alphabet = spec.alphabet()?;
    for p in z.parts() {
        if alphabet.validate(p).is_err() {
            return Ok(false);
        }
    }
    let order = z.order();
    let mut rhs = GradedSeries::zero(order);
    if order >= 1 {
        rhs.set_part(1, NCPolynomial::from_letter(alphabet.letter(0)?))?;
    }
    let mut power = GradedSeries::from_polynomial(&NCPolynomial::one(), order);
    for i in 1..=spec.n {
        power = power.shuffle(z);
        let term = power.concat_letter(alphabet.letter(i)?);
        let weight = BigRational::from_integer(spec.binomial(i));
        for k in 0..=order {
            let mut p = rhs.part(k).clone();
            p.add_assign_scaled(term.part(k), &weight);
            rhs.set_part(k, p)?;
        }
    }
    Ok(rhs == *z)
}

/// `Z = a0 · (1 + a1 + a1 a1 + ...)`, the solution for `n = 1`.
pub fn expand_linear_closed_form(order: usize) -> GradedSeries {
    let a = Alphabet::new(1).expect("two letters");
    let (a0, a1) = (a.letter(0).unwrap(), a.letter(1).unwrap());
    let mut parts = vec![NCPolynomial::zero(); order + 1];
    let mut word = NCPolynomial::from_letter(a0);
    for part in parts.iter_mut().skip(1) {
        *part = word.clone();
        word = word.concat_letter(a1);
    }
    GradedSeries::new(parts).expect("homogeneous")
}

/// Checks `exp_⧢(a1) ⧢ (exp_⧢(-a1) · a0) = Σ a0 a1^k` through degree `order`.
pub fn n1_identity_check(order: usize) -> Result<bool> {
    let a = Alphabet::new(1)?;
    let (a0, a1) = (a.letter(0)?, a.letter(1)?);
    let one_letter = NCPolynomial::from_letter(a1);
    let left = shuffle_exp_truncated(&one_letter, order)?;
    let right = shuffle_exp_truncated(&one_letter.neg(), order)?.concat_letter(a0);
    let product = left.shuffle(&right);
    Ok(product == expand_linear_closed_form(order))
}

/// Riccati case `n = 2` through `Z_{k+1} = 2 Z_k·a1 + Σ_{l=1}^{k-1} Z_l ⧢ Z_{k-l} · a2`.
pub fn expand_riccati(order: usize) -> Result<GradedSeries> {
    EquationSpec::new(2).check_order(order)?;
    let a = Alphabet::new(2)?;
    let (a0, a1, a2) = (a.letter(0)?, a.letter(1)?, a.letter(2)?);
    let two = Coeff::from_integer(BigInt::from(2));
    let mut parts = vec![NCPolynomial::zero(); order + 1];
    if order >= 1 {
        parts[1] = NCPolynomial::from_letter(a0);
    }
    for k in 1..order {
        let mut next = parts[k].concat_letter(a1).scale(&two);
        for l in 1..k {
            let prod = parts[l].shuffle(&parts[k - l]).concat_letter(a2);
            next.add_assign_scaled(&prod, &Coeff::one());
        }
        parts[k + 1] = next;
    }
    GradedSeries::new(parts)
}

/// `Ω = a1 + Z·a2` for the Riccati solution `Z`, truncated at `order(Z) + 1`.
pub fn omega_series(z: &GradedSeries) -> Result<GradedSeries> {
    let a = Alphabet::new(2)?;
    let (a1, a2) = (a.letter(1)?, a.letter(2)?);
    let order = z.order() + 1;
    let mut parts = vec![NCPolynomial::zero(); order + 1];
    parts[1] = NCPolynomial::from_letter(a1);
    for k in 1..=z.order() {
        parts[k + 1].add_assign_scaled(&z.part(k).concat_letter(a2), &Coeff::one());
    }
    GradedSeries::new(parts)
}

/// Solution of `ẋ = u0 + u_n x^n`: the general recursion restricted to the
/// letters `{a0, a_n}`. Only degrees `k n + 1` are nonzero.
pub fn two_term_expand(n: usize, order: usize) -> Result<GradedSeries> {
    if n == 0 {
        return Err(Error::Config("two-term equation needs n >= 1".into()));
    }
    let spec = EquationSpec::new(n);
    spec.check_order(order)?;
    let alphabet = spec.alphabet()?;
    Ok(expand_recursion(order, &[(alphabet.letter(n)?, BigInt::one())]))
}

/// JSON document `{"n": .., "K": .., "parts": [[{word, num, den}]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesDocument {
    pub n: usize,
    #[serde(rename = "K")]
    pub order: usize,
    pub parts: Vec<Vec<JsonTerm>>,
}

impl SeriesDocument {
    pub fn from_series(n: usize, z: &GradedSeries) -> Self {
        Self {
            n,
            order: z.order(),
            parts: z.to_json_parts(),
        }
    }

    pub fn to_series(&self) -> Result<GradedSeries> {
        if self.parts.len() != self.order + 1 {
            return Err(Error::Parse(format!(
                "K = {} but {} parts given",
                self.order,
                self.parts.len()
            )));
        }
        let z = GradedSeries::from_json_parts(&self.parts)?;
        let alphabet = Alphabet::new(self.n)?;
        for p in z.parts() {
            alphabet.validate(p)?;
        }
        Ok(z)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
