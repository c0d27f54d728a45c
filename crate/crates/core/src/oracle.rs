//! Independent reference implementations used to cross-check the main code
//! paths in tests: the free associative logarithm log(exp x · exp y), a
//! floating-point Gauss-Legendre quadrature over standard simplices, and
//! closed-form counts of rooted binary trees. Nothing here is used by the
//! production kernels.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::glie::Dgla;
use crate::rational::{factorial, rat, Rat};

/// Truncated series in the free associative algebra on two letters `x`, `y`:
/// a finite sum of words with rational coefficients, every word longer than
/// `cap` identified with zero. The empty word is the unit.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSeries {
    cap: usize,
    terms: BTreeMap<Vec<u8>, Rat>,
}

fn word_name(word: &[u8]) -> String {
    word.iter().map(|&l| if l == 0 { 'x' } else { 'y' }).collect()
}

impl FreeSeries {
    pub fn zero(cap: usize) -> Self {
        FreeSeries { cap, terms: BTreeMap::new() }
    }

    pub fn one(cap: usize) -> Self {
        let mut s = FreeSeries::zero(cap);
        s.add_term(Vec::new(), rat(1));
        s
    }

    /// The letter `x` (0) or `y` (1) as a series.
    pub fn generator(cap: usize, letter: u8) -> Result<Self> {
        if letter > 1 {
            return Err(Error::Bound("the free oracle has two generators".into()));
        }
        if cap == 0 {
            return Err(Error::Bound("a zero cap truncates the generators away".into()));
        }
        let mut s = FreeSeries::zero(cap);
        s.add_term(vec![letter], rat(1));
        Ok(s)
    }

    fn add_term(&mut self, word: Vec<u8>, c: Rat) {
        if c.is_zero() || word.len() > self.cap {
            return;
        }
        let entry = self.terms.entry(word.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&word);
        }
    }

    pub fn add(&self, other: &FreeSeries) -> FreeSeries {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> FreeSeries {
        let mut out = FreeSeries::zero(self.cap);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), c * v);
        }
        out
    }

    /// Concatenation product, truncated beyond the cap.
    pub fn mul(&self, other: &FreeSeries) -> FreeSeries {
        let mut out = FreeSeries::zero(self.cap);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                if a.len() + b.len() > self.cap {
                    continue;
                }
                let mut word = a.clone();
                word.extend_from_slice(b);
                out.add_term(word, c * d);
            }
        }
        out
    }

    fn constant_term(&self) -> Rat {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rat::zero)
    }

    /// Exponential of a series without constant term; finite by truncation.
    pub fn exp(&self) -> Result<FreeSeries> {
        if !self.constant_term().is_zero() {
            return Err(Error::Malformed("exp needs a series without constant term".into()));
        }
        let mut out = FreeSeries::one(self.cap);
        let mut power = FreeSeries::one(self.cap);
        for k in 1..=self.cap {
            power = power.mul(self);
            out = out.add(&power.scale(&(rat(1) / factorial(k))));
        }
        Ok(out)
    }

    /// Logarithm of a series with constant term 1; finite by truncation.
    pub fn log(&self) -> Result<FreeSeries> {
        if self.constant_term() != rat(1) {
            return Err(Error::Malformed("log needs a series with constant term 1".into()));
        }
        let mut u = self.clone();
        u.add_term(Vec::new(), rat(-1));
        let mut out = FreeSeries::zero(self.cap);
        let mut power = FreeSeries::one(self.cap);
        for k in 1..=self.cap {
            power = power.mul(&u);
            let sign = if k % 2 == 1 { rat(1) } else { rat(-1) };
            out = out.add(&power.scale(&(sign / rat(k as i64))));
        }
        Ok(out)
    }

    /// Coefficient of a word written in the letters `x` and `y`.
    pub fn coefficient(&self, word: &str) -> Rat {
        let key: Vec<u8> = word.bytes().map(|b| u8::from(b != b'x')).collect();
        self.terms.get(&key).cloned().unwrap_or_else(Rat::zero)
    }

    /// All nonzero terms as `(word name, coefficient)`, deterministic order.
    pub fn named_terms(&self) -> Vec<(String, Rat)> {
        self.terms.iter().map(|(w, c)| (word_name(w), c.clone())).collect()
    }
}

/// `log(exp x · exp y)` in the free associative algebra, truncated.
pub fn free_bch(cap: usize) -> Result<FreeSeries> {
    let x = FreeSeries::generator(cap, 0)?;
    let y = FreeSeries::generator(cap, 1)?;
    x.exp()?.mul(&y.exp()?).log()
}

/// The free associative algebra truncated beyond `cap`, viewed as a Lie
/// algebra in degree 0 under commutators. Basis elements are the nonempty
/// words ordered by length then lexicographically.
pub fn free_word_dgla(cap: usize) -> Result<Arc<Dgla>> {
    if cap == 0 || cap > 8 {
        return Err(Error::Bound("word algebra caps between 1 and 8 are supported".into()));
    }
    let mut words: Vec<Vec<u8>> = Vec::new();
    for len in 1..=cap {
        let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..len {
            layer = layer
                .into_iter()
                .flat_map(|w| {
                    [0u8, 1].into_iter().map(move |l| {
                        let mut v = w.clone();
                        v.push(l);
                        v
                    })
                })
                .collect();
        }
        layer.sort();
        words.extend(layer);
    }
    let basis: Vec<(String, i64)> = words.iter().map(|w| (word_name(w), 0)).collect();
    let mut brackets = Vec::new();
    for i in 0..words.len() {
        for j in (i + 1)..words.len() {
            if words[i].len() + words[j].len() > cap {
                continue;
            }
            let mut forward = words[i].clone();
            forward.extend_from_slice(&words[j]);
            let mut backward = words[j].clone();
            backward.extend_from_slice(&words[i]);
            if forward == backward {
                continue;
            }
            brackets.push((
                basis[i].0.clone(),
                basis[j].0.clone(),
                vec![(word_name(&forward), rat(1)), (word_name(&backward), rat(-1))],
            ));
        }
    }
    Dgla::new(&format!("free-words-{cap}"), basis, Vec::new(), brackets)
}

/// Gauss-Legendre nodes and weights on `[0, 1]`, by Newton iteration on the
/// Legendre recurrence. Exact for polynomials of degree `< 2 * points`.
pub fn gauss_legendre(points: usize) -> Vec<(f64, f64)> {
    assert!(points >= 1, "quadrature needs at least one node");
    let mut out = Vec::with_capacity(points);
    let n = points;
    for i in 1..=n {
        // root of P_n on [-1, 1]
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("nodes are finite"));
    out
}

/// `(P_n(x), P_n'(x))` via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn simplex_rec(
    gl: &[(f64, f64)],
    coords: &mut Vec<f64>,
    n: usize,
    remaining: f64,
    f: &dyn Fn(&[f64]) -> f64,
) -> f64 {
    if coords.len() == n {
        return f(coords);
    }
    let mut acc = 0.0;
    for &(u, w) in gl {
        coords.push(u * remaining);
        acc += w * remaining * simplex_rec(gl, coords, n, remaining * (1.0 - u), f);
        coords.pop();
    }
    acc
}

/// Numeric integral over the standard simplex `t_1..t_n >= 0, sum <= 1` in
/// canonical coordinates, by iterated Gauss-Legendre quadrature after the
/// triangular substitution `t_i = u_i * (1 - t_1 - .. - t_{i-1})`. Exact up
/// to rounding for polynomial integrands of per-variable degree below
/// `2 * points`.
pub fn simplex_quadrature(n: usize, points: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let gl = gauss_legendre(points);
    let mut coords = Vec::with_capacity(n);
    simplex_rec(&gl, &mut coords, n, 1.0, f)
}

/// Catalan numbers: planar binary rooted trees with `n + 1` leaves.
pub fn catalan(n: usize) -> u64 {
    let mut c = vec![0u64; n + 1];
    c[0] = 1;
    for m in 1..=n {
        for i in 0..m {
            c[m] += c[i] * c[m - 1 - i];
        }
    }
    c[n]
}

/// Wedderburn-Etherington numbers: unordered binary rooted trees with `n`
/// leaves.
pub fn wedderburn_etherington(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut w = vec![0u64; n + 1];
    w[1] = 1;
    for m in 2..=n {
        for i in 1..=(m - 1) / 2 {
            w[m] += w[i] * w[m - i];
        }
        if m % 2 == 0 {
            let half = w[m / 2];
            w[m] += half * (half + 1) / 2;
        }
    }
    w[n]
}
