//! Numerical evaluation of iterated integrals on a uniform grid.
//!
//! All integrals are cumulative composite trapezoid sums on the grid shared
//! by the controls, so every order of the expansion is available at every
//! grid point and feeds the next order pointwise.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::algebra::{Alphabet, Coeff, GradedSeries, NCPolynomial, Word};
use crate::combinatorics::{binomial, cf_coefficient, enumerate_m0};
use crate::error::{Error, Result};
use crate::series::{rearrangement_count, EquationSpec, MultiIndexSet};

/// Longest word accepted by the word-by-word evaluation path.
pub const MAX_ORACLE_WORD_LEN: usize = 12;

/// Uniform grid `t_j = j T / (N - 1)` with sampled controls `u_0..u_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlGrid {
    horizon: f64,
    times: Vec<f64>,
    samples: Vec<Vec<f64>>,
    bound: f64,
}

impl ControlGrid {
    /// `samples[i][j] = u_i(t_j)`. Without `bound`, the observed sup of the
    /// samples is used; a given bound must dominate every sample.
    pub fn new(horizon: f64, samples: Vec<Vec<f64>>, bound: Option<f64>) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::Grid(format!("horizon must be positive, got {horizon}")));
        }
        let points = samples.first().map_or(0, Vec::len);
        if samples.is_empty() || points < 2 {
            return Err(Error::Grid("need at least one control and two grid points".into()));
        }
        if let Some((i, s)) = samples.iter().enumerate().find(|(_, s)| s.len() != points) {
            return Err(Error::Grid(format!(
                "control u{i} has {} samples, expected {points}",
                s.len()
            )));
        }
        if samples.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Grid("control samples must be finite".into()));
        }
        let observed = samples
            .iter()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.abs()));
        let bound = match bound {
            Some(m) if m < observed => {
                return Err(Error::Grid(format!(
                    "bound M = {m} is below the observed control maximum {observed}"
                )))
            }
            Some(m) => m,
            None => observed,
        };
        let step = horizon / (points - 1) as f64;
        let times = (0..points).map(|j| j as f64 * step).collect();
        Ok(Self {
            horizon,
            times,
            samples,
            bound,
        })
    }

    /// Samples `control(i, t)` for `i = 0..=n` on `points` grid points.
    pub fn from_fn(
        horizon: f64,
        points: usize,
        n: usize,
        control: impl Fn(usize, f64) -> f64,
    ) -> Result<Self> {
        if points < 2 {
            return Err(Error::Grid(format!("need at least two grid points, got {points}")));
        }
        let step = horizon / (points - 1) as f64;
        let samples = (0..=n)
            .map(|i| (0..points).map(|j| control(i, j as f64 * step)).collect())
            .collect();
        Self::new(horizon, samples, None)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.horizon / (self.times.len() - 1) as f64
    }

    /// Polynomial degree `n`; the grid carries `n + 1` controls.
    pub fn degree(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn control(&self, i: usize) -> &[f64] {
        &self.samples[i]
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// Certified bound `M >= sup |u_i|`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Same grid with control `i` multiplied by `factors[i]`; the bound is
    /// recomputed from the new samples.
    pub fn scaled(&self, factors: &[f64]) -> Result<Self> {
        if factors.len() != self.samples.len() {
            return Err(Error::AlphabetMismatch {
                expected: self.samples.len(),
                found: factors.len(),
            });
        }
        let samples = self
            .samples
            .iter()
            .zip(factors)
            .map(|(s, f)| s.iter().map(|x| x * f).collect())
            .collect();
        Self::new(self.horizon, samples, None)
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if let Some(l) = w.letters().find(|l| l.index() > self.degree()) {
            return Err(Error::LetterOutOfRange {
                index: l.index(),
                max: self.degree(),
            });
        }
        Ok(())
    }
}

/// `F_j = ∫_0^{t_j} f` by the composite trapezoid rule, with `F_0 = 0`.
pub fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for pair in values.windows(2) {
        acc += 0.5 * step * (pair[0] + pair[1]);
        out.push(acc);
    }
    out
}

/// `∫_0^t prev(s) u(s) ds` on the grid.
fn integrate_against(prev: &[f64], control: &[f64], step: f64) -> Vec<f64> {
    let integrand: Vec<f64> = prev.iter().zip(control).map(|(a, b)| a * b).collect();
    cumulative_trapezoid(&integrand, step)
}

/// `Υ^t(v)` at every grid point. The first letter is the innermost integral
/// and the last letter the outermost.
pub fn iterated_integral(v: &Word, grid: &ControlGrid) -> Result<Vec<f64>> {
    grid.check_word(v)?;
    let step = grid.step();
    let mut acc = vec![1.0; grid.len()];
    for l in v.letters() {
        acc = integrate_against(&acc, grid.control(l.index()), step);
    }
    Ok(acc)
}

/// `Σ c_v Υ^t(v)` for a list of words, sharing the integrals of common
/// prefixes. Returns the values and the number of quadratures performed.
pub fn evaluate_words(terms: &[(Word, f64)], grid: &ControlGrid) -> Result<(Vec<f64>, usize)> {
    for (w, _) in terms {
        grid.check_word(w)?;
        if w.len() > MAX_ORACLE_WORD_LEN {
            return Err(Error::WordTooLong {
                len: w.len(),
                limit: MAX_ORACLE_WORD_LEN,
            });
        }
    }
    let mut order: Vec<&(Word, f64)> = terms.iter().collect();
    order.sort_by(|a, b| a.0.bytes().cmp(b.0.bytes()));

    let step = grid.step();
    let ones = vec![1.0; grid.len()];
    let mut out = vec![0.0; grid.len()];
    // stack[d] = Υ of the current prefix of length d + 1
    let mut stack: Vec<(u8, Vec<f64>)> = Vec::new();
    let mut quadratures = 0;
    for (w, c) in order {
        let bytes = w.bytes();
        let common = stack
            .iter()
            .zip(bytes)
            .take_while(|((a, _), b)| a == *b)
            .count();
        stack.truncate(common);
        for &b in &bytes[common..] {
            let base = stack.last().map_or(&ones, |(_, v)| v);
            let next = integrate_against(base, grid.control(b as usize), step);
            quadratures += 1;
            stack.push((b, next));
        }
        let value = stack.last().map_or(&ones, |(_, v)| v);
        for (o, x) in out.iter_mut().zip(value) {
            *o += c * x;
        }
    }
    Ok((out, quadratures))
}

fn to_f64(c: &Coeff) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

fn polynomial_terms(p: &NCPolynomial) -> Vec<(Word, f64)> {
    p.terms().map(|(w, c)| (w.clone(), to_f64(c))).collect()
}

/// Per-order values `Φ_k(t_j)` of an expansion, their partial sum and the
/// majorant of the discarded tail.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTable {
    pub order: usize,
    pub times: Vec<f64>,
    /// `phi[k - 1][j] = Φ_k(t_j)` for `k = 1..=order`.
    pub phi: Vec<Vec<f64>>,
    /// `Σ_{k <= order} Φ_k(t_j)`.
    pub partial: Vec<f64>,
    /// Tail majorant at each grid point; infinite outside the certified radius.
    pub bound: Vec<f64>,
    /// `integral_counts[k - 1]` quadratures were performed to produce `Φ_k`.
    pub integral_counts: Vec<usize>,
}

impl ExpansionTable {
    fn assemble(
        spec: &EquationSpec,
        grid: &ControlGrid,
        phi: Vec<Vec<f64>>,
        integral_counts: Vec<usize>,
    ) -> Self {
        let order = phi.len();
        let mut partial = vec![0.0; grid.len()];
        for row in &phi {
            for (p, x) in partial.iter_mut().zip(row) {
                *p += x;
            }
        }
        Self {
            order,
            times: grid.times().to_vec(),
            phi,
            partial,
            bound: remainder_bound(spec, grid, order),
            integral_counts,
        }
    }

    pub fn phi(&self, k: usize) -> &[f64] {
        &self.phi[k - 1]
    }
}

/// Word-by-word evaluation `Φ_k = Σ_v <Z_k, v> Υ^t(v)`.
pub fn evaluate_series(z: &GradedSeries, grid: &ControlGrid) -> Result<ExpansionTable> {
    let spec = EquationSpec::new(grid.degree());
    let mut phi = Vec::with_capacity(z.order());
    let mut counts = Vec::with_capacity(z.order());
    for k in 1..=z.order() {
        let (values, quadratures) = evaluate_words(&polynomial_terms(z.part(k)), grid)?;
        phi.push(values);
        counts.push(quadratures);
    }
    Ok(ExpansionTable::assemble(&spec, grid, phi, counts))
}

/// `Φ_1 = ∫ u_0` and
/// `Φ_{k+1} = Σ_i C(n,i) Σ_{l nondecreasing, |l| = i, Σl = k} R(l) ∫ Φ_{l_1}···Φ_{l_i} u_i`,
/// one quadrature per `(i, l)` and no expansion into words.
pub fn expansion_via_products(
    spec: &EquationSpec,
    grid: &ControlGrid,
    order: usize,
) -> Result<ExpansionTable> {
    spec.check_order(order)?;
    if grid.degree() != spec.n {
        return Err(Error::AlphabetMismatch {
            expected: spec.n + 1,
            found: grid.degree() + 1,
        });
    }
    let step = grid.step();
    let mut phi: Vec<Vec<f64>> = Vec::with_capacity(order);
    let mut counts = Vec::with_capacity(order);
    if order >= 1 {
        phi.push(cumulative_trapezoid(grid.control(0), step));
        counts.push(1);
    }
    for k in 1..order {
        let mut next = vec![0.0; grid.len()];
        let mut quadratures = 0;
        for i in 1..=spec.n.min(k) {
            let weight = binomial(spec.n, i).to_f64().unwrap_or(f64::INFINITY);
            for l in &MultiIndexSet::partitions(k, i).elements {
                let factor = weight * rearrangement_count(l) as f64;
                let integrand: Vec<f64> = (0..grid.len())
                    .map(|j| l.iter().map(|&lj| phi[lj - 1][j]).product::<f64>() * grid.control(i)[j])
                    .collect();
                let integral = cumulative_trapezoid(&integrand, step);
                quadratures += 1;
                for (n, x) in next.iter_mut().zip(&integral) {
                    *n += factor * x;
                }
            }
        }
        phi.push(next);
        counts.push(quadratures);
    }
    Ok(ExpansionTable::assemble(spec, grid, phi, counts))
}

/// Radius of certified absolute convergence, `min{T, 1/(M(n-1))}` for `n >= 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusReport {
    pub n: usize,
    pub bound: f64,
    pub horizon: f64,
    pub radius: f64,
}

impl RadiusReport {
    /// Whether the tail bound is valid at `t`: `0 <= t <= T` and, for
    /// `n >= 2`, `t < 1/(M(n-1))` strictly.
    pub fn is_certified(&self, t: f64) -> bool {
        if !(0.0..=self.horizon).contains(&t) {
            return false;
        }
        self.n <= 1 || self.bound == 0.0 || t * self.bound * ((self.n - 1) as f64) < 1.0
    }

    pub fn flags(&self, times: &[f64]) -> Vec<bool> {
        times.iter().map(|&t| self.is_certified(t)).collect()
    }
}

pub fn convergence_radius(spec: &EquationSpec, bound: f64, horizon: f64) -> RadiusReport {
    let radius = if spec.n >= 2 && bound > 0.0 {
        horizon.min(1.0 / (bound * (spec.n - 1) as f64))
    } else {
        horizon
    };
    RadiusReport {
        n: spec.n,
        bound,
        horizon,
        radius,
    }
}

/// `Σ_{k > order} ‖Z_k‖ (M t)^k / k!` at a single time, `‖Z_k‖` taken from the
/// closed product. Terms are summed until they drop below `f64::EPSILON`
/// relative to the running sum, then a geometric majorant covers the rest.
pub fn tail_majorant(n: usize, bound: f64, t: f64, order: usize) -> f64 {
    let x = bound * t;
    if x == 0.0 {
        return 0.0;
    }
    if n == 0 {
        return if order == 0 { x } else { 0.0 };
    }
    let ratio = |k: usize| ((n - 1) as f64 * k as f64 + 1.0) / (k as f64 + 1.0) * x;
    // term_k = ‖Z_k‖ x^k / k!, term_1 = x
    let mut term = x;
    let mut k = 1;
    while k <= order {
        term *= ratio(k);
        k += 1;
        if term == 0.0 {
            return 0.0;
        }
    }
    let mut sum = 0.0;
    const MAX_TERMS: usize = 1_000_000;
    for _ in 0..MAX_TERMS {
        sum += term;
        let r = ratio(k);
        term *= r;
        k += 1;
        if term <= f64::EPSILON * sum {
            break;
        }
        if !term.is_finite() {
            return f64::INFINITY;
        }
    }
    // every later ratio is at most the limit (n - 1) x for n >= 2 and at most
    // the current one for n = 1
    let rho = if n >= 2 { (n - 1) as f64 * x } else { ratio(k) };
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    sum + term / (1.0 - rho)
}

/// Tail majorant at every grid point, using the grid's bound `M`.
pub fn remainder_bound(spec: &EquationSpec, grid: &ControlGrid, order: usize) -> Vec<f64> {
    let radius = convergence_radius(spec, grid.bound(), grid.horizon());
    grid.times()
        .iter()
        .map(|&t| {
            if radius.is_certified(t) {
                tail_majorant(spec.n, grid.bound(), t, order)
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

/// `Υ^t(v)` for every word up to a fixed length, each computed from its
/// prefix with a single quadrature.
#[derive(Clone, Debug)]
pub struct SignatureTable {
    max_len: usize,
    values: HashMap<Word, Vec<f64>>,
}

impl SignatureTable {
    pub fn build(grid: &ControlGrid, max_len: usize) -> Result<Self> {
        if max_len > MAX_ORACLE_WORD_LEN {
            return Err(Error::WordTooLong {
                len: max_len,
                limit: MAX_ORACLE_WORD_LEN,
            });
        }
        let alphabet = Alphabet::new(grid.degree())?;
        let step = grid.step();
        let mut values = HashMap::new();
        values.insert(Word::empty(), vec![1.0; grid.len()]);
        let mut frontier = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(frontier.len() * (grid.degree() + 1));
            for w in &frontier {
                for l in alphabet.letters() {
                    let v = integrate_against(&values[w], grid.control(l.index()), step);
                    let child = w.with_letter(l);
                    values.insert(child.clone(), v);
                    next.push(child);
                }
            }
            frontier = next;
        }
        Ok(Self { max_len, values })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn get(&self, w: &Word) -> Option<&[f64]> {
        self.values.get(w).map(Vec::as_slice)
    }

    /// `Σ_v <p, v> Υ^t(v)`; `None` if some word is not tabulated.
    pub fn evaluate(&self, p: &NCPolynomial) -> Option<Vec<f64>> {
        let len = self.values[&Word::empty()].len();
        let mut out = vec![0.0; len];
        for (w, c) in p.terms() {
            let c = to_f64(c);
            for (o, x) in out.iter_mut().zip(self.get(w)?) {
                *o += c * x;
            }
        }
        Some(out)
    }

    /// Tabulated version of [`homomorphism_check`].
    pub fn homomorphism_deviation(&self, v: &Word, w: &Word) -> Option<f64> {
        let shuffled =
            NCPolynomial::from_word(v.clone()).shuffle(&NCPolynomial::from_word(w.clone()));
        let lhs = self.evaluate(&shuffled)?;
        let (a, b) = (self.get(v)?, self.get(w)?);
        Some(
            lhs.iter()
                .zip(a.iter().zip(b))
                .map(|(s, (x, y))| (s - x * y).abs())
                .fold(0.0, f64::max),
        )
    }
}

/// `max_j |Υ(v ⧢ w) - Υ(v) Υ(w)|` over the grid.
pub fn homomorphism_check(v: &Word, w: &Word, grid: &ControlGrid) -> Result<f64> {
    let shuffled = NCPolynomial::from_word(v.clone()).shuffle(&NCPolynomial::from_word(w.clone()));
    let (lhs, _) = evaluate_words(&polynomial_terms(&shuffled), grid)?;
    let left = iterated_integral(v, grid)?;
    let right = iterated_integral(w, grid)?;
    Ok(lhs
        .iter()
        .zip(left.iter().zip(&right))
        .map(|(s, (a, b))| (s - a * b).abs())
        .fold(0.0, f64::max))
}

/// Chen-Fliess terms `Σ_{i ∈ M0(k)} X_{a_i}(x)(0) Υ^t(a_i)` for `k = 1..=order`
/// against the raw controls `c_i`. Returns the per-order values and the size
/// of `M0(k)` for each order.
pub fn chen_fliess_terms(raw: &ControlGrid, order: usize) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    let n = raw.degree();
    let alphabet = Alphabet::new(n)?;
    let mut values = Vec::with_capacity(order);
    let mut sizes = Vec::with_capacity(order);
    for k in 1..=order {
        let m0 = enumerate_m0(k, n);
        sizes.push(m0.len());
        let terms = m0
            .iter()
            .map(|idx| {
                let w = idx.word(&alphabet)?;
                let c = cf_coefficient(&w, true).to_f64().unwrap_or(f64::INFINITY);
                Ok((w, c))
            })
            .filter(|r: &Result<(Word, f64)>| r.as_ref().map_or(true, |(_, c)| *c != 0.0))
            .collect::<Result<Vec<_>>>()?;
        values.push(evaluate_words(&terms, raw)?.0);
    }
    Ok((values, sizes))
}

/// `x(t) - ∫_0^t Σ_i C(n,i) u_i x^i` for a candidate solution sampled on the grid.
pub fn integral_equation_residual(spec: &EquationSpec, grid: &ControlGrid, x: &[f64]) -> Vec<f64> {
    let integrand: Vec<f64> = (0..grid.len())
        .map(|j| {
            (0..=spec.n)
                .map(|i| {
                    binomial(spec.n, i).to_f64().unwrap_or(f64::INFINITY)
                        * grid.control(i)[j]
                        * x[j].powi(i as i32)
                })
                .sum()
        })
        .collect();
    let integral = cumulative_trapezoid(&integrand, grid.step());
    x.iter().zip(&integral).map(|(a, b)| a - b).collect()
}

/// First grid time at which the two highest nonvanishing orders of the table
/// stop decreasing, `|Φ_hi(t)| >= |Φ_lo(t)|`. A ratio test, not a certificate.
pub fn empirical_divergence_onset(table: &ExpansionTable) -> Option<f64> {
    let nonzero: Vec<usize> = (1..=table.order)
        .filter(|&k| table.phi(k).iter().any(|x| *x != 0.0))
        .collect();
    let (&hi, &lo) = match nonzero.as_slice() {
        [.., lo, hi] => (hi, lo),
        _ => return None,
    };
    table
        .times
        .iter()
        .enumerate()
        .skip(1)
        .find(|&(j, _)| {
            let (a, b) = (table.phi(hi)[j].abs(), table.phi(lo)[j].abs());
            b > 0.0 && a >= b
        })
        .map(|(_, &t)| t)
}
