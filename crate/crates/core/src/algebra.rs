//! Noncommutative polynomials over a finite alphabet `a0..an` with exact
//! rational coefficients, the concatenation product and the shuffle product.
//!
//! Words are ordered canonically: shorter words first, then lexicographically
//! by letter index. Polynomials keep their terms in that order and never store
//! a zero coefficient, so rendering and serialization are deterministic.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact coefficient type.
pub type Coeff = BigRational;

/// One letter `a_i`; obtained from an [`Alphabet`], which validates the index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    /// `a0`, present in every alphabet.
    pub const A0: Letter = Letter(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// The alphabet `{a0, ..., an}` attached to a polynomial equation of degree `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet {
    degree: usize,
}

impl Alphabet {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > u8::MAX as usize - 1 {
            return Err(Error::AlphabetTooLarge(degree));
        }
        Ok(Self { degree })
    }

    /// Largest letter index `n`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of letters, `n + 1`.
    pub fn size(&self) -> usize {
        self.degree + 1
    }

    pub fn letter(&self, index: usize) -> Result<Letter> {
        if index > self.degree {
            return Err(Error::LetterOutOfRange {
                index,
                max: self.degree,
            });
        }
        Ok(Letter(index as u8))
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..=self.degree as u8).map(Letter)
    }

    pub fn word(&self, indices: &[usize]) -> Result<Word> {
        indices
            .iter()
            .map(|&i| self.letter(i).map(|l| l.0))
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }

    pub fn contains(&self, word: &Word) -> bool {
        word.0.iter().all(|&b| (b as usize) <= self.degree)
    }

    /// Checks that every word of `p` is spelled in this alphabet.
    pub fn validate(&self, p: &NCPolynomial) -> Result<()> {
        for w in p.terms.keys() {
            if let Some(&b) = w.0.iter().find(|&&b| b as usize > self.degree) {
                return Err(Error::LetterOutOfRange {
                    index: b as usize,
                    max: self.degree,
                });
            }
        }
        Ok(())
    }

    /// All words of length `k`, in canonical order.
    pub fn words_of_length(&self, k: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|w| self.letters().map(move |l| w.with_letter(l)))
                .collect();
        }
        out
    }
}

/// A finite sequence of letters; the empty word is the unit `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        Word(letters.into_iter().map(|l| l.0).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl DoubleEndedIterator<Item = Letter> + ExactSizeIterator + '_ {
        self.0.iter().map(|&b| Letter(b))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|&b| b as usize).collect()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().map(|&b| Letter(b))
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().map(|&b| Letter(b))
    }

    /// Sum of the letter indices.
    pub fn index_sum(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    pub fn with_letter(&self, l: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(l.0);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub(crate) fn bytes(&self) -> &[u8] {
        &self.0
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "a{b}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "1" {
            return Ok(Word::empty());
        }
        s.split('.')
            .map(|tok| {
                tok.strip_prefix('a')
                    .and_then(|d| d.parse::<u8>().ok())
                    .ok_or_else(|| Error::Parse(format!("bad letter `{tok}` in word `{s}`")))
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

/// Multiplicities of all interleavings of two words, computed with the
/// recursion `(vb) ⧢ (wc) = (v ⧢ wc)·b + (vb ⧢ w)·c`.
///
/// Row `i`, column `j` of the table holds `v[..i] ⧢ w[..j]`; only the
/// previous row is kept.
pub fn shuffle_words(v: &Word, w: &Word) -> HashMap<Word, u64> {
    let (v, w) = (&v.0, &w.0);
    let single = |word: &[u8]| {
        let mut m = HashMap::with_capacity(1);
        m.insert(Word(word.to_vec()), 1u64);
        m
    };
    let mut prev: Vec<HashMap<Word, u64>> = (0..=w.len()).map(|j| single(&w[..j])).collect();
    for i in 1..=v.len() {
        let mut row: Vec<HashMap<Word, u64>> = Vec::with_capacity(w.len() + 1);
        row.push(single(&v[..i]));
        for j in 1..=w.len() {
            let mut cell: HashMap<Word, u64> = HashMap::new();
            for (word, m) in &prev[j] {
                *cell.entry(word.with_letter(Letter(v[i - 1]))).or_insert(0) += m;
            }
            for (word, m) in &row[j - 1] {
                *cell.entry(word.with_letter(Letter(w[j - 1]))).or_insert(0) += m;
            }
            row.push(cell);
        }
        prev = row;
    }
    prev.pop().unwrap_or_default()
}

/// Finite linear combination of words with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NCPolynomial {
    terms: BTreeMap<Word, Coeff>,
}

impl NCPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::empty())
    }

    pub fn from_word(w: Word) -> Self {
        Self::monomial(w, Coeff::one())
    }

    pub fn from_letter(l: Letter) -> Self {
        Self::from_word(Word::from_letters([l]))
    }

    pub fn monomial(w: Word, c: Coeff) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Coeff)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    /// Adds `c·w`, dropping the entry if the sum cancels.
    pub fn add_term(&mut self, w: Word, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of words with nonzero coefficient.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Coeff)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }

    /// Scalar product `<p, w>`.
    pub fn coefficient(&self, w: &Word) -> Coeff {
        self.terms.get(w).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn constant_term(&self) -> Coeff {
        self.coefficient(&Word::empty())
    }

    /// Sum of absolute values of the coefficients.
    pub fn word_norm(&self) -> Coeff {
        self.terms
            .values()
            .fold(Coeff::zero(), |acc, c| acc + c.abs())
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Word::len)
    }

    pub fn is_homogeneous(&self, degree: usize) -> bool {
        self.terms.keys().all(|w| w.len() == degree)
    }

    pub fn homogeneous_part(&self, degree: usize) -> NCPolynomial {
        self.filter_words(|w| w.len() == degree)
    }

    pub fn filter_words(&self, mut keep: impl FnMut(&Word) -> bool) -> NCPolynomial {
        NCPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| keep(w))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: &Coeff) -> NCPolynomial {
        if factor.is_zero() {
            return Self::zero();
        }
        NCPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Coeff::one());
        out
    }

    pub fn sub(&self, other: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Coeff::one());
        out
    }

    pub fn neg(&self) -> NCPolynomial {
        self.scale(&-Coeff::one())
    }

    /// `self += factor · other`.
    pub fn add_assign_scaled(&mut self, other: &NCPolynomial, factor: &Coeff) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c * factor);
        }
    }

    /// Concatenation product, the bilinear extension of word juxtaposition.
    pub fn concat(&self, other: &NCPolynomial) -> NCPolynomial {
        let mut out = NCPolynomial::zero();
        for (v, cv) in &self.terms {
            for (w, cw) in &other.terms {
                out.add_term(v.concat(w), cv * cw);
            }
        }
        out
    }

    /// Right concatenation by a single letter, `p·a_i`.
    pub fn concat_letter(&self, l: Letter) -> NCPolynomial {
        NCPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.with_letter(l), c.clone()))
                .collect(),
        }
    }

    /// Left concatenation by a single letter, `a_i·p`.
    pub fn prepend_letter(&self, l: Letter) -> NCPolynomial {
        NCPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (Word::from_letters([l]).concat(w), c.clone()))
                .collect(),
        }
    }

    pub fn shuffle(&self, other: &NCPolynomial) -> NCPolynomial {
        self.shuffle_truncated(other, usize::MAX)
    }

    /// Shuffle product keeping only words of length at most `max_degree`.
    pub fn shuffle_truncated(&self, other: &NCPolynomial, max_degree: usize) -> NCPolynomial {
        let mut acc: HashMap<Word, Coeff> = HashMap::new();
        for (v, cv) in &self.terms {
            for (w, cw) in &other.terms {
                if v.len().saturating_add(w.len()) > max_degree {
                    continue;
                }
                let c = cv * cw;
                for (word, m) in shuffle_words(v, w) {
                    let term = &c * BigInt::from(m);
                    *acc.entry(word).or_insert_with(Coeff::zero) += term;
                }
            }
        }
        NCPolynomial {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// `p^⧢m`, with `p^⧢0 = 1`.
    pub fn shuffle_power(&self, m: usize) -> NCPolynomial {
        let mut out = NCPolynomial::one();
        for _ in 0..m {
            out = self.shuffle(&out);
        }
        out
    }

    /// Canonical text rendering, e.g. `2 a0.a1.a1 + 1/2 a0.a0.a2 - 1 1`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.terms
            .iter()
            .map(|(w, c)| JsonTerm::new(w, c))
            .collect()
    }

    pub fn from_json_terms(terms: &[JsonTerm]) -> Result<Self> {
        let mut p = NCPolynomial::zero();
        for t in terms {
            let (w, c) = t.decode()?;
            p.add_term(w, c);
        }
        Ok(p)
    }
}

fn format_coeff(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let mag = format_coeff(&c.abs());
            match (i, c.is_negative()) {
                (0, false) => write!(f, "{mag} {w}")?,
                (0, true) => write!(f, "-{mag} {w}")?,
                (_, false) => write!(f, " + {mag} {w}")?,
                (_, true) => write!(f, " - {mag} {w}")?,
            }
        }
        Ok(())
    }
}

fn parse_coeff(tok: &str) -> Result<Coeff> {
    let bad = || Error::Parse(format!("bad coefficient `{tok}`"));
    let (num, den) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Coeff::new(num, den))
}

impl FromStr for NCPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(NCPolynomial::zero());
        }
        let mut tokens = s.split_whitespace().peekable();
        let mut p = NCPolynomial::zero();
        let mut first = true;
        while tokens.peek().is_some() {
            let negative = if first {
                false
            } else {
                match tokens.next() {
                    Some("+") => false,
                    Some("-") => true,
                    other => {
                        return Err(Error::Parse(format!(
                            "expected `+` or `-`, found {other:?}"
                        )))
                    }
                }
            };
            first = false;
            let coeff = tokens
                .next()
                .ok_or_else(|| Error::Parse("missing coefficient".into()))?;
            let word = tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing word after `{coeff}`")))?;
            let mut c = parse_coeff(coeff)?;
            if negative {
                c = -c;
            }
            p.add_term(word.parse()?, c);
        }
        Ok(p)
    }
}

/// JSON form of one term: `{"word": [indices], "num": .., "den": ..}`.
///
/// Numerator and denominator are emitted as JSON integers of arbitrary size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub word: Vec<usize>,
    pub num: serde_json::Number,
    pub den: serde_json::Number,
}

impl JsonTerm {
    pub fn new(w: &Word, c: &Coeff) -> Self {
        let number = |b: &BigInt| -> serde_json::Number {
            // arbitrary_precision accepts any decimal integer literal
            b.to_string().parse().expect("integer literal")
        };
        JsonTerm {
            word: w.indices(),
            num: number(c.numer()),
            den: number(c.denom()),
        }
    }

    pub fn decode(&self) -> Result<(Word, Coeff)> {
        let int = |n: &serde_json::Number| -> Result<BigInt> {
            n.to_string()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("coefficient part `{n}` is not an integer")))
        };
        let den = int(&self.den)?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        let word = self
            .word
            .iter()
            .map(|&i| u8::try_from(i).map_err(|_| Error::Parse(format!("letter index {i} too large"))))
            .collect::<Result<Vec<u8>>>()?;
        Ok((Word(word), Coeff::new(int(&self.num)?, den)))
    }
}

/// A truncated series `S = S_0 + S_1 + ... + S_K` stored by homogeneous part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    parts: Vec<NCPolynomial>,
}

impl GradedSeries {
    /// Builds a series from its parts, checking that part `k` is homogeneous of degree `k`.
    pub fn new(parts: Vec<NCPolynomial>) -> Result<Self> {
        for (k, p) in parts.iter().enumerate() {
            if let Some(w) = p.words().find(|w| w.len() != k) {
                return Err(Error::NotHomogeneous {
                    degree: k,
                    word: w.to_string(),
                    len: w.len(),
                });
            }
        }
        Ok(Self { parts })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            parts: vec![NCPolynomial::zero(); order + 1],
        }
    }

    /// Splits `p` into homogeneous parts, dropping everything above `order`.
    pub fn from_polynomial(p: &NCPolynomial, order: usize) -> Self {
        let mut parts = vec![NCPolynomial::zero(); order + 1];
        for (w, c) in p.terms() {
            if w.len() <= order {
                parts[w.len()].add_term(w.clone(), c.clone());
            }
        }
        Self { parts }
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn part(&self, k: usize) -> &NCPolynomial {
        &self.parts[k]
    }

    pub fn parts(&self) -> &[NCPolynomial] {
        &self.parts
    }

    /// Replaces part `k`; the caller must keep it homogeneous of degree `k`.
    pub fn set_part(&mut self, k: usize, p: NCPolynomial) -> Result<()> {
        if let Some(w) = p.words().find(|w| w.len() != k) {
            return Err(Error::NotHomogeneous {
                degree: k,
                word: w.to_string(),
                len: w.len(),
            });
        }
        self.parts[k] = p;
        Ok(())
    }

    pub fn to_polynomial(&self) -> NCPolynomial {
        let mut out = NCPolynomial::zero();
        for p in &self.parts {
            out.add_assign_scaled(p, &Coeff::one());
        }
        out
    }

    pub fn truncate(&self, order: usize) -> GradedSeries {
        let mut parts: Vec<_> = self.parts.iter().take(order + 1).cloned().collect();
        parts.resize(order + 1, NCPolynomial::zero());
        GradedSeries { parts }
    }

    pub fn add(&self, other: &GradedSeries) -> GradedSeries {
        let order = self.order().min(other.order());
        GradedSeries {
            parts: (0..=order)
                .map(|k| self.parts[k].add(&other.parts[k]))
                .collect(),
        }
    }

    /// Shuffle product truncated at the smaller of the two orders.
    pub fn shuffle(&self, other: &GradedSeries) -> GradedSeries {
        let order = self.order().min(other.order());
        let mut parts = vec![NCPolynomial::zero(); order + 1];
        for (i, p) in self.parts.iter().enumerate().take(order + 1) {
            if p.is_zero() {
                continue;
            }
            for (j, q) in other.parts.iter().enumerate().take(order + 1 - i) {
                if q.is_zero() {
                    continue;
                }
                let prod = p.shuffle(q);
                parts[i + j].add_assign_scaled(&prod, &Coeff::one());
            }
        }
        GradedSeries { parts }
    }

    /// `S·a_i`, keeping the order (the top part is shifted out).
    pub fn concat_letter(&self, l: Letter) -> GradedSeries {
        let order = self.order();
        let mut parts = vec![NCPolynomial::zero(); order + 1];
        for k in 0..order {
            parts[k + 1] = self.parts[k].concat_letter(l);
        }
        GradedSeries { parts }
    }

    /// `a_i·S`, keeping the order.
    pub fn prepend_letter(&self, l: Letter) -> GradedSeries {
        let order = self.order();
        let mut parts = vec![NCPolynomial::zero(); order + 1];
        for k in 0..order {
            parts[k + 1] = self.parts[k].prepend_letter(l);
        }
        GradedSeries { parts }
    }

    pub fn to_json_parts(&self) -> Vec<Vec<JsonTerm>> {
        self.parts.iter().map(NCPolynomial::to_json_terms).collect()
    }

    pub fn from_json_parts(parts: &[Vec<JsonTerm>]) -> Result<Self> {
        let parts = parts
            .iter()
            .map(|p| NCPolynomial::from_json_terms(p))
            .collect::<Result<Vec<_>>>()?;
        GradedSeries::new(parts)
    }
}

/// `exp_⧢(p) = Σ p^⧢m / m!` truncated at degree `order`.
///
/// `p` must have no constant term, otherwise the terms of the sum would not
/// have increasing minimal degree.
pub fn shuffle_exp_truncated(p: &NCPolynomial, order: usize) -> Result<GradedSeries> {
    let c = p.constant_term();
    if !c.is_zero() {
        return Err(Error::ConstantTerm(format_coeff(&c)));
    }
    let p = p.filter_words(|w| w.len() <= order);
    let mut sum = NCPolynomial::one();
    let mut power = NCPolynomial::one();
    let mut factorial = BigInt::one();
    for m in 1..=order {
        power = p.shuffle_truncated(&power, order);
        if power.is_zero() {
            break;
        }
        factorial *= BigInt::from(m);
        sum.add_assign_scaled(&power, &Coeff::new(BigInt::one(), factorial.clone()));
    }
    Ok(GradedSeries::from_polynomial(&sum, order))
}

/// Converts a nonnegative integral coefficient to `u64`, if it fits.
pub fn coeff_to_u64(c: &Coeff) -> Option<u64> {
    if c.is_integer() {
        c.numer().to_u64()
    } else {
        None
    }
}

/// Converts a nonnegative integral coefficient to an unbounded integer.
pub fn coeff_to_biguint(c: &Coeff) -> Option<num_bigint::BigUint> {
    if c.is_integer() {
        c.numer().to_biguint()
    } else {
        None
    }
}
