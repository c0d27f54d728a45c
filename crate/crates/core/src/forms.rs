//! Polynomial differential forms on standard simplices.
//!
//! Forms on the n-simplex live in Q[t_0..t_n, dt_0..dt_n] modulo the
//! relations sum t_i = 1 and sum dt_i = 0. We store them in canonical
//! coordinates: t_0 and dt_0 are eliminated, so a form is a sparse sum of
//! monomials `c * t^e * dt_S` with `e` an exponent vector over t_1..t_n and
//! `S` an ascending subset of {1..n}. All public constructors accept full
//! coordinates and canonicalize.
//!
//! The module provides the wedge product, the exterior differential, face
//! pullbacks, exact simplex integration (Dirichlet), elementary Whitney
//! forms, and the Dupont dilation homotopies `h_a`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{factorial, format_rat, rat, Rat};

/// Strictly increasing multi-index `(a_0 < a_1 < ... < a_r)` in `{0..=n}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed(format!(
                "multi-index {indices:?} is not strictly increasing"
            )));
        }
        Ok(MultiIndex(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cardinality minus one: the simplex dimension the index spans.
    pub fn top(&self) -> usize {
        self.0.len() - 1
    }

    /// Complement inside `{0..=n}`, ascending.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..=n).filter(|i| !self.0.contains(i)).collect()
    }

    /// All multi-indices with `r+1` entries in `{0..=n}`, ascending order.
    pub fn enumerate(r: usize, n: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(start: usize, need: usize, n: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if need == 0 {
                out.push(MultiIndex(current.clone()));
                return;
            }
            for i in start..=n {
                if n + 1 - i < need {
                    break;
                }
                current.push(i);
                rec(i + 1, need - 1, n, current, out);
                current.pop();
            }
        }
        rec(0, r + 1, n, &mut current, &mut out);
        out
    }
}

/// Monomial key: exponents of `t_1..t_n` plus an ascending `dt` subset
/// encoded as a bitmask (bit `i-1` stands for `dt_i`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Term {
    exps: Vec<u16>,
    dts: u32,
}

/// Sign and union for `dt_A ∧ dt_B`; `None` when they intersect.
fn merge_masks(a: u32, b: u32) -> Option<(u32, bool)> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    Some((a | b, inversions % 2 == 1))
}

/// Polynomial differential form on the standard n-simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyForm {
    n: usize,
    terms: BTreeMap<Term, Rat>,
}

impl PolyForm {
    pub fn zero(n: usize) -> Self {
        PolyForm { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        let mut f = PolyForm::zero(n);
        f.add_term(vec![0; n], 0, c);
        f
    }

    pub fn one(n: usize) -> Self {
        PolyForm::constant(n, rat(1))
    }

    pub fn simplex_dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Adds `c * t^exps * dt_mask`, keeping the sparse map normalized.
    fn add_term(&mut self, exps: Vec<u16>, dts: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(exps.len(), self.n);
        let key = Term { exps, dts };
        let entry = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Canonical coordinate `t_i` for `1 <= i <= n`, or `1 - sum t_j` for
    /// `i = 0`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        assert!(i <= n, "coordinate index out of range");
        let mut f = PolyForm::zero(n);
        if i == 0 {
            f.add_term(vec![0; n], 0, rat(1));
            for j in 1..=n {
                let mut e = vec![0; n];
                e[j - 1] = 1;
                f.add_term(e, 0, rat(-1));
            }
        } else {
            let mut e = vec![0; n];
            e[i - 1] = 1;
            f.add_term(e, 0, rat(1));
        }
        f
    }

    /// `dt_i` for `1 <= i <= n`, or `-sum dt_j` for `i = 0`.
    pub fn coordinate_differential(n: usize, i: usize) -> Self {
        assert!(i <= n, "coordinate index out of range");
        let mut f = PolyForm::zero(n);
        if i == 0 {
            for j in 1..=n {
                f.add_term(vec![0; n], 1 << (j - 1), rat(-1));
            }
        } else {
            f.add_term(vec![0; n], 1 << (i - 1), rat(1));
        }
        f
    }

    pub fn add(&self, other: &PolyForm) -> Result<PolyForm> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.exps.clone(), k.dts, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolyForm) -> Result<PolyForm> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.exps.clone(), k.dts, -v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> PolyForm {
        if c.is_zero() {
            return PolyForm::zero(self.n);
        }
        PolyForm {
            n: self.n,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), c * v)).collect(),
        }
    }

    fn check_dim(&self, other: &PolyForm) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Degree(format!(
                "forms on different simplices ({} vs {})",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// Form degree when homogeneous; `None` for `0` or mixed degrees.
    pub fn degree(&self) -> Option<usize> {
        let mut deg = None;
        for k in self.terms.keys() {
            let d = k.dts.count_ones() as usize;
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Monomial expansion: `(exponents of t_1..t_n, ascending dt indices,
    /// coefficient)` per term.
    pub fn monomials(&self) -> Vec<(Vec<u16>, Vec<usize>, Rat)> {
        self.terms
            .iter()
            .map(|(k, v)| {
                let dts: Vec<usize> =
                    (1..=self.n).filter(|i| k.dts & (1 << (i - 1)) != 0).collect();
                (k.exps.clone(), dts, v.clone())
            })
            .collect()
    }

    /// Single monomial `c * t^exps * dt_{i_1} ∧ ... ∧ dt_{i_r}` with the
    /// indices ascending.
    pub fn from_monomial(n: usize, exps: &[u16], dts: &[usize], c: Rat) -> Result<PolyForm> {
        if exps.len() != n {
            return Err(Error::Degree(format!("need {n} exponents, got {}", exps.len())));
        }
        let mut mask = 0u32;
        for w in dts.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Degree("dt indices must be strictly ascending".into()));
            }
        }
        for &i in dts {
            if i == 0 || i > n {
                return Err(Error::Degree(format!("dt index {i} out of range on the {n}-simplex")));
            }
            mask |= 1 << (i - 1);
        }
        let mut f = PolyForm::zero(n);
        f.add_term(exps.to_vec(), mask, c);
        Ok(f)
    }

    /// Coefficient of one monomial.
    pub fn coefficient(&self, exps: &[u16], dts: &[usize]) -> Rat {
        let mut mask = 0u32;
        for &i in dts {
            mask |= 1 << (i - 1);
        }
        self.terms
            .get(&Term { exps: exps.to_vec(), dts: mask })
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// Largest total polynomial degree over the monomials.
    pub fn polynomial_degree(&self) -> u16 {
        self.terms
            .keys()
            .map(|k| k.exps.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Coefficient form of `dt_i` pulled to the front: on terms containing
    /// `dt_i` the sign counts the dt factors before position `i`; terms
    /// without `dt_i` are dropped.
    pub fn contract_dt(&self, i: usize) -> PolyForm {
        assert!(i >= 1 && i <= self.n);
        let bit = 1u32 << (i - 1);
        let mut out = PolyForm::zero(self.n);
        for (k, v) in &self.terms {
            if k.dts & bit == 0 {
                continue;
            }
            let before = (k.dts & (bit - 1)).count_ones();
            let c = if before % 2 == 0 { v.clone() } else { -v.clone() };
            out.add_term(k.exps.clone(), k.dts & !bit, c);
        }
        out
    }

    /// Antiderivative in `t_i`: bumps each exponent of `t_i` by one and
    /// divides. Intended for forms not involving `dt_i`.
    pub fn antiderivative(&self, i: usize) -> PolyForm {
        assert!(i >= 1 && i <= self.n);
        let mut out = PolyForm::zero(self.n);
        for (k, v) in &self.terms {
            let mut exps = k.exps.clone();
            exps[i - 1] += 1;
            let c = v / rat(exps[i - 1] as i64);
            out.add_term(exps, k.dts, c);
        }
        out
    }

    /// Component of a fixed form degree.
    pub fn degree_part(&self, d: usize) -> PolyForm {
        PolyForm {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.dts.count_ones() as usize == d)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Wedge product. Polynomial factors commute; the sign comes from
    /// interleaving the `dt` monomials.
    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm> {
        self.check_dim(other)?;
        let mut out = PolyForm::zero(self.n);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let Some((mask, flip)) = merge_masks(ka.dts, kb.dts) else {
                    continue;
                };
                let exps: Vec<u16> =
                    ka.exps.iter().zip(&kb.exps).map(|(a, b)| a + b).collect();
                let mut c = ca * cb;
                if flip {
                    c = -c;
                }
                out.add_term(exps, mask, c);
            }
        }
        Ok(out)
    }

    /// Exterior differential.
    pub fn dform(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.n);
        for (k, c) in &self.terms {
            for i in 1..=self.n {
                let e = k.exps[i - 1];
                if e == 0 {
                    continue;
                }
                let bit = 1u32 << (i - 1);
                let Some((mask, flip)) = merge_masks(bit, k.dts) else {
                    continue;
                };
                let mut exps = k.exps.clone();
                exps[i - 1] -= 1;
                let mut coeff = c * rat(e as i64);
                if flip {
                    coeff = -coeff;
                }
                out.add_term(exps, mask, coeff);
            }
        }
        out
    }

    /// Substitutes `t_i -> images_t[i-1]` and `dt_i -> images_dt[i-1]`; all
    /// images live on a common simplex.
    pub fn substitute(&self, images_t: &[PolyForm], images_dt: &[PolyForm]) -> Result<PolyForm> {
        assert_eq!(images_t.len(), self.n);
        assert_eq!(images_dt.len(), self.n);
        let m = images_t
            .first()
            .or_else(|| images_dt.first())
            .map_or(0, PolyForm::simplex_dim);
        let mut out = PolyForm::zero(m);
        for (k, c) in &self.terms {
            let mut acc = PolyForm::constant(m, c.clone());
            for i in 1..=self.n {
                for _ in 0..k.exps[i - 1] {
                    acc = acc.wedge(&images_t[i - 1])?;
                }
            }
            let mut mask = k.dts;
            while mask != 0 {
                let i = mask.trailing_zeros() as usize + 1;
                acc = acc.wedge(&images_dt[i - 1])?;
                mask &= mask - 1;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Pullback along the k-th coface `Δ^{n-1} -> Δ^n` (set `t_k = 0`).
    pub fn face_map(&self, k: usize) -> Result<PolyForm> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Degree("no faces of the 0-simplex".into()));
        }
        if k > n {
            return Err(Error::Degree(format!("face index {k} out of range for Δ^{n}")));
        }
        let m = n - 1;
        let mut images_t = Vec::with_capacity(n);
        let mut images_dt = Vec::with_capacity(n);
        for i in 1..=n {
            if i == k {
                images_t.push(PolyForm::zero(m));
                images_dt.push(PolyForm::zero(m));
            } else if i < k {
                images_t.push(PolyForm::coordinate(m, i));
                images_dt.push(PolyForm::coordinate_differential(m, i));
            } else {
                // i > k: the i-th vertex coordinate becomes index i-1. When
                // k = 0 and i = 1, index 0 unfolds to 1 - sum t_j.
                images_t.push(PolyForm::coordinate(m, i - 1));
                images_dt.push(PolyForm::coordinate_differential(m, i - 1));
            }
        }
        self.substitute(&images_t, &images_dt)
    }

    /// Evaluates a form at vertex `v` (all `dt` parts die); returns the
    /// constant value.
    pub fn evaluate_vertex(&self, v: usize) -> Result<Rat> {
        if v > self.n {
            return Err(Error::Degree(format!("vertex {v} out of range for Δ^{}", self.n)));
        }
        let mut acc = Rat::zero();
        for (k, c) in &self.terms {
            if k.dts != 0 {
                continue;
            }
            // t_i = delta_{iv}: a monomial survives iff every positive
            // exponent sits at i = v.
            let survives =
                (1..=self.n).all(|i| k.exps[i - 1] == 0 || i == v);
            if survives {
                acc += c;
            }
        }
        Ok(acc)
    }

    /// Exact integral of the top-degree component over the simplex, with
    /// the orientation making `dt_1 ∧ ... ∧ dt_n` positive.
    pub fn integrate_simplex(&self) -> Rat {
        let n = self.n;
        if n == 0 {
            return self
                .terms
                .get(&Term { exps: Vec::new(), dts: 0 })
                .cloned()
                .unwrap_or_else(Rat::zero);
        }
        let full: u32 = (1 << n) - 1;
        let mut acc = Rat::zero();
        for (k, c) in &self.terms {
            if k.dts != full {
                continue;
            }
            // Dirichlet: ∫ t_1^{a_1}..t_n^{a_n} dt = (prod a_i!)/(n + sum a_i)!.
            let mut num = Rat::from_integer(1.into());
            let mut total = 0usize;
            for &e in &k.exps {
                num *= factorial(e as usize);
                total += e as usize;
            }
            acc += c * num / factorial(n + total);
        }
        acc
    }

    /// Elementary Whitney form `ω_I = Σ_s (-1)^s t_{a_s} dt_{a_0} ∧ ..
    /// (omit s) .. ∧ dt_{a_r}` in canonical coordinates.
    pub fn whitney(index: &MultiIndex, n: usize) -> Result<PolyForm> {
        if index.is_empty() {
            return Err(Error::Malformed("empty multi-index".into()));
        }
        if *index.indices().last().unwrap() > n {
            return Err(Error::Degree(format!(
                "multi-index {:?} does not fit Δ^{n}",
                index.indices()
            )));
        }
        let mut out = PolyForm::zero(n);
        for (s, &a_s) in index.indices().iter().enumerate() {
            let mut part = PolyForm::coordinate(n, a_s);
            for (j, &a_j) in index.indices().iter().enumerate() {
                if j != s {
                    part = part.wedge(&PolyForm::coordinate_differential(n, a_j))?;
                }
            }
            if s % 2 == 1 {
                part = part.scale(&rat(-1));
            }
            out = out.add(&part)?;
        }
        Ok(out)
    }

    /// Dupont homotopy `h_a`: pull back along the dilation toward vertex
    /// `a`, extract the `du` component (with `du` moved to the front), and
    /// integrate `u` over `[0,1]`. Lowers form degree by one.
    pub fn dupont_h(&self, a: usize) -> Result<PolyForm> {
        let n = self.n;
        if a > n {
            return Err(Error::Degree(format!("vertex {a} out of range for Δ^{n}")));
        }
        // Extended monomials: (u exponent, t exponents, dt mask, has du).
        type UKey = (u16, Vec<u16>, u32, bool);
        let mut du_part: BTreeMap<UKey, Rat> = BTreeMap::new();
        // Images of t_i and dt_i under the dilation pullback, as lists of
        // (u_exp, t factor index or 0, dt mask, has_du, coefficient).
        // t_i -> (1-u) t_i          (i != a)
        // t_a -> (1-u) t_a + u      (a >= 1)
        // dt_i -> (1-u) dt_i - t_i du
        // dt_a -> (1-u) dt_a + (1 - t_a) du
        #[derive(Clone)]
        struct UTerm {
            u: u16,
            exps: Vec<u16>,
            dts: u32,
            du: bool,
            c: Rat,
        }
        let img_t = |i: usize| -> Vec<UTerm> {
            let mut e = vec![0u16; n];
            e[i - 1] = 1;
            let mut v = vec![
                UTerm { u: 0, exps: e.clone(), dts: 0, du: false, c: rat(1) },
                UTerm { u: 1, exps: e, dts: 0, du: false, c: rat(-1) },
            ];
            if i == a {
                v.push(UTerm { u: 1, exps: vec![0; n], dts: 0, du: false, c: rat(1) });
            }
            v
        };
        let img_dt = |i: usize| -> Vec<UTerm> {
            let bit = 1u32 << (i - 1);
            let mut e = vec![0u16; n];
            e[i - 1] = 1;
            let mut v = vec![
                UTerm { u: 0, exps: vec![0; n], dts: bit, du: false, c: rat(1) },
                UTerm { u: 1, exps: vec![0; n], dts: bit, du: false, c: rat(-1) },
            ];
            if i == a {
                v.push(UTerm { u: 0, exps: vec![0; n], dts: 0, du: true, c: rat(1) });
                v.push(UTerm { u: 0, exps: e, dts: 0, du: true, c: rat(-1) });
            } else {
                v.push(UTerm { u: 0, exps: e, dts: 0, du: true, c: rat(-1) });
            }
            v
        };
        // Multiply two u-terms; du is kept at the front of the dt monomial.
        let mul = |x: &UTerm, y: &UTerm| -> Option<UTerm> {
            if x.du && y.du {
                return None;
            }
            let (mask, mut flip) = merge_masks(x.dts, y.dts)?;
            if y.du {
                // Move the du of y to the front across x's dt block.
                if x.dts.count_ones() % 2 == 1 {
                    flip = !flip;
                }
            }
            let mut c = &x.c * &y.c;
            if flip {
                c = -c;
            }
            Some(UTerm {
                u: x.u + y.u,
                exps: x.exps.iter().zip(&y.exps).map(|(p, q)| p + q).collect(),
                dts: mask,
                du: x.du || y.du,
                c,
            })
        };
        for (k, c) in &self.terms {
            let mut acc = vec![UTerm { u: 0, exps: vec![0; n], dts: 0, du: false, c: c.clone() }];
            for i in 1..=n {
                for _ in 0..k.exps[i - 1] {
                    let imgs = img_t(i);
                    let mut next = Vec::new();
                    for x in &acc {
                        for y in &imgs {
                            if let Some(z) = mul(x, y) {
                                next.push(z);
                            }
                        }
                    }
                    acc = next;
                }
            }
            let mut mask = k.dts;
            while mask != 0 {
                let i = mask.trailing_zeros() as usize + 1;
                let imgs = img_dt(i);
                let mut next = Vec::new();
                for x in &acc {
                    for y in &imgs {
                        if let Some(z) = mul(x, y) {
                            next.push(z);
                        }
                    }
                }
                acc = next;
                mask &= mask - 1;
            }
            for t in acc {
                if !t.du || t.c.is_zero() {
                    continue;
                }
                let key = (t.u, t.exps, t.dts, true);
                *du_part.entry(key).or_insert_with(Rat::zero) += t.c;
            }
        }
        let mut out = PolyForm::zero(n);
        for ((u, exps, dts, _), c) in du_part {
            // ∫_0^1 u^p du = 1/(p+1).
            out.add_term(exps, dts, c / rat(u as i64 + 1));
        }
        Ok(out)
    }

    /// Iterated homotopy `h_I = h_{a_r} ∘ ... ∘ h_{a_0}` (apply `h_{a_0}`
    /// first).
    pub fn dupont_h_multi(&self, index: &MultiIndex) -> Result<PolyForm> {
        let mut acc = self.clone();
        for &a in index.indices() {
            acc = acc.dupont_h(a)?;
        }
        Ok(acc)
    }

    /// Deterministic rendering: terms in key order, exact coefficients.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let mut s = format_rat(c);
            for i in 1..=self.n {
                let e = k.exps[i - 1];
                if e == 1 {
                    s.push_str(&format!(" t{i}"));
                } else if e > 1 {
                    s.push_str(&format!(" t{i}^{e}"));
                }
            }
            let mut mask = k.dts;
            while mask != 0 {
                let i = mask.trailing_zeros() + 1;
                s.push_str(&format!(" dt{i}"));
                mask &= mask - 1;
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Sampler;

    fn t(n: usize, i: usize) -> PolyForm {
        PolyForm::coordinate(n, i)
    }

    fn dt(n: usize, i: usize) -> PolyForm {
        PolyForm::coordinate_differential(n, i)
    }

    #[test]
    fn canonical_coordinates_respect_relations() {
        // t_0 + t_1 + t_2 = 1 and dt_0 + dt_1 + dt_2 = 0 on Δ^2.
        let sum_t = t(2, 0).add(&t(2, 1)).unwrap().add(&t(2, 2)).unwrap();
        assert_eq!(sum_t, PolyForm::one(2));
        let sum_dt = dt(2, 0).add(&dt(2, 1)).unwrap().add(&dt(2, 2)).unwrap();
        assert!(sum_dt.is_zero());
    }

    #[test]
    fn wedge_is_graded_commutative() {
        let mut s = Sampler::new(7);
        for n in 1..=3 {
            for _ in 0..20 {
                let a = s.poly_form(n, 2, None);
                let b = s.poly_form(n, 2, None);
                let ab = a.wedge(&b).unwrap();
                // Compare degree parts: a_p ∧ b_q = (-1)^{pq} b_q ∧ a_p.
                for p in 0..=n {
                    for q in 0..=n {
                        let lhs = a.degree_part(p).wedge(&b.degree_part(q)).unwrap();
                        let mut rhs = b.degree_part(q).wedge(&a.degree_part(p)).unwrap();
                        if p * q % 2 == 1 {
                            rhs = rhs.scale(&rat(-1));
                        }
                        assert_eq!(lhs, rhs);
                    }
                }
                // Sanity: full product is the sum of the degree parts.
                let mut total = PolyForm::zero(n);
                for p in 0..=n {
                    for q in 0..=n {
                        total = total
                            .add(&a.degree_part(p).wedge(&b.degree_part(q)).unwrap())
                            .unwrap();
                    }
                }
                assert_eq!(ab, total);
            }
        }
    }

    #[test]
    fn wedge_is_associative() {
        let mut s = Sampler::new(11);
        for n in 1..=3 {
            for _ in 0..10 {
                let a = s.poly_form(n, 2, None);
                let b = s.poly_form(n, 2, None);
                let c = s.poly_form(n, 2, None);
                let lhs = a.wedge(&b).unwrap().wedge(&c).unwrap();
                let rhs = a.wedge(&b.wedge(&c).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn d_squares_to_zero_and_is_a_derivation() {
        let mut s = Sampler::new(13);
        for n in 1..=3 {
            for _ in 0..15 {
                let a = s.poly_form(n, 3, None);
                assert!(a.dform().dform().is_zero());
                let b = s.poly_form(n, 3, None);
                // Leibniz on homogeneous parts: d(a∧b) = da∧b + (-1)^p a∧db.
                for p in 0..=n {
                    let ap = a.degree_part(p);
                    let lhs = ap.wedge(&b).unwrap().dform();
                    let mut rhs = ap.dform().wedge(&b).unwrap();
                    let mut second = ap.wedge(&b.dform()).unwrap();
                    if p % 2 == 1 {
                        second = second.scale(&rat(-1));
                    }
                    rhs = rhs.add(&second).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn face_maps_satisfy_simplicial_identities() {
        // δ^{j,n-1} ∘ δ^{k,n} = δ^{k-1,n-1} ∘ δ^{j,n} for j < k.
        let mut s = Sampler::new(17);
        for n in 2..=3 {
            for _ in 0..10 {
                let a = s.poly_form(n, 2, None);
                for k in 0..=n {
                    for j in 0..k {
                        let lhs = a.face_map(k).unwrap().face_map(j).unwrap();
                        let rhs = a.face_map(j).unwrap().face_map(k - 1).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn face_map_examples() {
        // δ^{0,1}(t_1) = 1 on Δ^0.
        let f = t(1, 1).face_map(0).unwrap();
        assert_eq!(f, PolyForm::one(0));
        // δ^{1,1}(t_1) = 0.
        let f = t(1, 1).face_map(1).unwrap();
        assert!(f.is_zero());
        // On Δ^2: δ^{2,2}(ω_{(0,1)}) = ω_{(0,1)} on Δ^1.
        let w01 = PolyForm::whitney(&MultiIndex::new(vec![0, 1]).unwrap(), 2).unwrap();
        let restricted = w01.face_map(2).unwrap();
        let w01_dim1 = PolyForm::whitney(&MultiIndex::new(vec![0, 1]).unwrap(), 1).unwrap();
        assert_eq!(restricted, w01_dim1);
        // δ^{1,2}(ω_{(0,1)}) = 0 (vertex 1 is collapsed away).
        assert!(w01.face_map(1).unwrap().is_zero());
        // δ^{0,2}(ω_{(0,1)}) = 0 as well: the pullback lands on the face
        // spanned by vertices 1, 2 and ω_{(0,1)} restricts to zero there.
        assert!(w01.face_map(0).unwrap().is_zero());
    }

    #[test]
    fn whitney_examples() {
        // ω_{(a)} = t_a.
        for n in 1..=3 {
            for a in 0..=n {
                let w = PolyForm::whitney(&MultiIndex::new(vec![a]).unwrap(), n).unwrap();
                assert_eq!(w, t(n, a));
            }
        }
        // ω_{(0,1)} on Δ^1 = t_0 dt_1 - t_1 dt_0 = dt_1 in canonical form.
        let w = PolyForm::whitney(&MultiIndex::new(vec![0, 1]).unwrap(), 1).unwrap();
        assert_eq!(w, dt(1, 1));
    }

    #[test]
    fn whitney_restriction_is_kronecker() {
        // Pulling ω_I back along the face opposite a vertex in I kills it;
        // along a vertex not in I it restricts to the reindexed ω.
        let idx = MultiIndex::new(vec![0, 2]).unwrap();
        let w = PolyForm::whitney(&idx, 2).unwrap();
        assert!(w.face_map(0).unwrap().is_zero());
        assert!(w.face_map(2).unwrap().is_zero());
        let r = w.face_map(1).unwrap();
        // Face 1 of Δ^2 keeps vertices {0, 2} which reindex to {0, 1}.
        let expected = PolyForm::whitney(&MultiIndex::new(vec![0, 1]).unwrap(), 1).unwrap();
        assert_eq!(r, expected);
    }

    #[test]
    fn whitney_normalization() {
        // ∫_{Δ^i} i! ω_{(0..i)} = 1 for i <= 4.
        for i in 1..=4 {
            let idx = MultiIndex::new((0..=i).collect()).unwrap();
            let w = PolyForm::whitney(&idx, i).unwrap();
            assert_eq!(w.integrate_simplex() * factorial(i), rat(1), "i = {i}");
        }
    }

    #[test]
    fn integrate_examples() {
        // ∫_{Δ^1} dt_1 = 1.
        assert_eq!(dt(1, 1).integrate_simplex(), rat(1));
        // ∫_{Δ^1} t_0 t_1 dt_1 = 1/6.
        let f = t(1, 0).wedge(&t(1, 1)).unwrap().wedge(&dt(1, 1)).unwrap();
        assert_eq!(f.integrate_simplex(), crate::rational::ratio(1, 6));
        // ∫_{Δ^2} ω_{(0,1,2)} = 1/2.
        let w = PolyForm::whitney(&MultiIndex::new(vec![0, 1, 2]).unwrap(), 2).unwrap();
        assert_eq!(w.integrate_simplex(), crate::rational::ratio(1, 2));
        // Non-top components integrate to zero.
        assert_eq!(t(2, 1).integrate_simplex(), rat(0));
        // Δ^0: integral is evaluation.
        assert_eq!(PolyForm::one(0).integrate_simplex(), rat(1));
    }

    #[test]
    fn dform_of_whitney_edge_form() {
        let w = PolyForm::whitney(&MultiIndex::new(vec![0, 1]).unwrap(), 1).unwrap();
        // On Δ^1 the differential of dt_1 vanishes.
        assert!(w.dform().is_zero());
        // On Δ^2: d(ω_{(0,1)}) = d(t_0 dt_1 - t_1 dt_0) = 2 dt_0 ∧ dt_1
        // = 2 dt_1 ∧ dt_2 after eliminating dt_0.
        let w2 = PolyForm::whitney(&MultiIndex::new(vec![0, 1]).unwrap(), 2).unwrap();
        let expected = dt(2, 1).wedge(&dt(2, 2)).unwrap().scale(&rat(2));
        assert_eq!(w2.dform(), expected);
    }

    #[test]
    fn stokes_on_random_forms() {
        // ∫_{Δ^n} dα = Σ_k (-1)^k ∫_{Δ^{n-1}} δ^{k,n} α.
        let mut s = Sampler::new(23);
        for n in 1..=3 {
            for _ in 0..12 {
                let alpha = s.poly_form(n, 3, Some(n - 1));
                let lhs = alpha.dform().integrate_simplex();
                let mut rhs = Rat::zero();
                for k in 0..=n {
                    let sign = if k % 2 == 0 { rat(1) } else { rat(-1) };
                    rhs += sign * alpha.face_map(k).unwrap().integrate_simplex();
                }
                assert_eq!(lhs, rhs, "n = {n}");
            }
        }
    }

    #[test]
    fn dupont_h_worked_example() {
        // h_0(dt_1) = -t_1 on Δ^1.
        let h = dt(1, 1).dupont_h(0).unwrap();
        assert_eq!(h, t(1, 1).scale(&rat(-1)));
        // h_1(dt_1) = 1 - t_1 = t_0.
        let h = dt(1, 1).dupont_h(1).unwrap();
        assert_eq!(h, t(1, 0));
    }

    #[test]
    fn dupont_h_homotopy_identity() {
        // d h_a + h_a d = ev_a - id on random forms.
        let mut s = Sampler::new(29);
        for n in 1..=2 {
            for a in 0..=n {
                for _ in 0..10 {
                    let alpha = s.poly_form(n, 2, None);
                    let lhs = alpha.dupont_h(a).unwrap().dform().add(
                        &alpha.dform().dupont_h(a).unwrap(),
                    )
                    .unwrap();
                    let ev = PolyForm::constant(n, alpha.evaluate_vertex(a).unwrap());
                    let rhs = ev.sub(&alpha).unwrap();
                    assert_eq!(lhs, rhs, "n = {n}, a = {a}");
                }
            }
        }
    }

    #[test]
    fn dupont_h_drops_degree_and_kills_functions() {
        let mut s = Sampler::new(31);
        for n in 1..=2 {
            for a in 0..=n {
                let f = s.poly_form(n, 3, Some(0));
                assert!(f.dupont_h(a).unwrap().is_zero());
                let w = s.poly_form(n, 2, Some(1));
                let h = w.dupont_h(a).unwrap();
                assert!(h.is_zero() || h.degree() == Some(0));
            }
        }
    }

    #[test]
    fn dupont_h_multi_on_one_form_vanishes_twice() {
        // Two degree drops on a 1-form give zero.
        let idx = MultiIndex::new(vec![0, 1]).unwrap();
        let w = dt(2, 1);
        assert!(w.dupont_h_multi(&idx).unwrap().is_zero());
    }

    #[test]
    fn multi_index_enumeration() {
        let all = MultiIndex::enumerate(1, 2);
        assert_eq!(all.len(), 3);
        assert_eq!(all[0].indices(), &[0, 1]);
        assert_eq!(all[2].indices(), &[1, 2]);
        assert_eq!(MultiIndex::new(vec![0, 2]).unwrap().complement(3), vec![1, 3]);
        assert!(MultiIndex::new(vec![1, 1]).is_err());
    }

    #[test]
    fn vertex_evaluation() {
        // t_0 at vertex 0 is 1, at others 0.
        for v in 0..=2 {
            let val = t(2, 0).evaluate_vertex(v).unwrap();
            assert_eq!(val, if v == 0 { rat(1) } else { rat(0) });
        }
        let f = t(2, 1).wedge(&t(2, 2)).unwrap();
        assert_eq!(f.evaluate_vertex(1).unwrap(), rat(0));
        let g = t(2, 1).scale(&rat(3));
        assert_eq!(g.evaluate_vertex(1).unwrap(), rat(3));
    }
}
