//! Finite-dimensional differential graded Lie algebras presented by
//! structure constants.
//!
//! A [`Dgla`] stores a graded basis, a differential, and bracket constants
//! for ordered basis pairs only; the other half of the bracket is produced
//! by graded antisymmetry. Elements carry sparse coordinates over either
//! plain rationals or the maximal ideal of an Artin local algebra, so the
//! same arithmetic serves both structural validation (over Q) and
//! deformation computations (over `g ⊗ m_A`).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::artin::ArtinLocalAlgebra;
use crate::error::{Error, Result};
use crate::rational::{format_rat, Rat};
use crate::report::{Report, Violation};

/// Coefficient basis slot: the unit of `A`, or a monomial of `m_A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CoeffKey {
    One,
    Mono(usize),
}

/// Coefficient context for element arithmetic.
#[derive(Debug, Clone)]
pub enum CoeffRing {
    Rationals,
    Artin(Arc<ArtinLocalAlgebra>),
}

impl CoeffRing {
    /// Product of two coefficient slots as a sparse combination.
    pub fn mul_keys(&self, a: CoeffKey, b: CoeffKey) -> Result<Vec<(CoeffKey, Rat)>> {
        match (a, b) {
            (CoeffKey::One, k) | (k, CoeffKey::One) => {
                Ok(vec![(k, Rat::from_integer(1.into()))])
            }
            (CoeffKey::Mono(i), CoeffKey::Mono(j)) => match self {
                CoeffRing::Rationals => Err(Error::Degree(
                    "ideal monomials multiplied without an Artin context".into(),
                )),
                CoeffRing::Artin(alg) => Ok(alg
                    .mul_basis(i, j)
                    .iter()
                    .map(|(k, c)| (CoeffKey::Mono(*k), c.clone()))
                    .collect()),
            },
        }
    }

    /// Filtration degree of a coefficient slot (`One` sits in degree 0).
    pub fn filtration(&self, k: CoeffKey) -> usize {
        match (self, k) {
            (_, CoeffKey::One) => 0,
            (CoeffRing::Artin(alg), CoeffKey::Mono(i)) => alg.monomial_filtration(i),
            (CoeffRing::Rationals, CoeffKey::Mono(_)) => 0,
        }
    }

    pub fn nilpotency_order(&self) -> Option<usize> {
        match self {
            CoeffRing::Rationals => None,
            CoeffRing::Artin(alg) => Some(alg.nilpotency_order()),
        }
    }
}

/// DGLA presented by structure constants.
#[derive(Debug)]
pub struct Dgla {
    pub name: String,
    basis: Vec<(String, i64)>,
    index: BTreeMap<String, usize>,
    /// `d e_j = sum_i c_{ij} e_i`, sparse by source index.
    diff: BTreeMap<usize, Vec<(usize, Rat)>>,
    /// `[e_i, e_j]` for `i <= j`, sparse.
    brackets: BTreeMap<(usize, usize), Vec<(usize, Rat)>>,
}

impl Dgla {
    pub fn new(
        name: &str,
        basis: Vec<(String, i64)>,
        diff: Vec<(String, Vec<(String, Rat)>)>,
        brackets: Vec<(String, String, Vec<(String, Rat)>)>,
    ) -> Result<Arc<Self>> {
        let index: BTreeMap<String, usize> =
            basis.iter().enumerate().map(|(i, (n, _))| (n.clone(), i)).collect();
        if index.len() != basis.len() {
            return Err(Error::Malformed(format!("duplicate basis name in DGLA '{name}'")));
        }
        let look = |n: &str| -> Result<usize> {
            index
                .get(n)
                .copied()
                .ok_or_else(|| Error::Unresolved(format!("basis '{n}' in DGLA '{name}'")))
        };
        let mut dmap: BTreeMap<usize, Vec<(usize, Rat)>> = BTreeMap::new();
        for (src, combo) in diff {
            let j = look(&src)?;
            let mut entry = Vec::new();
            for (t, c) in combo {
                let i = look(&t)?;
                if !c.is_zero() {
                    entry.push((i, c));
                }
            }
            entry.sort_by_key(|(i, _)| *i);
            if !entry.is_empty() {
                dmap.insert(j, entry);
            }
        }
        let mut bmap: BTreeMap<(usize, usize), Vec<(usize, Rat)>> = BTreeMap::new();
        for (x, y, combo) in brackets {
            let i = look(&x)?;
            let j = look(&y)?;
            let mut entry = Vec::new();
            for (t, c) in combo {
                let k = look(&t)?;
                if !c.is_zero() {
                    entry.push((k, c));
                }
            }
            entry.sort_by_key(|(k, _)| *k);
            let (key, flip) = if i <= j { ((i, j), false) } else { ((j, i), true) };
            if flip {
                // Store the ordered pair, adjusting by graded antisymmetry.
                let sign = koszul_sign(basis[i].1, basis[j].1);
                for (_, c) in entry.iter_mut() {
                    *c = -sign.clone() * c.clone();
                }
            }
            if let Some(prev) = bmap.get(&key) {
                if *prev != entry {
                    return Err(Error::Malformed(format!(
                        "conflicting bracket entries for ({x}, {y}) in DGLA '{name}'"
                    )));
                }
            }
            if !entry.is_empty() {
                bmap.insert(key, entry);
            }
        }
        Ok(Arc::new(Dgla { name: name.to_string(), basis, index, diff: dmap, brackets: bmap }))
    }

    /// The zero DGLA.
    pub fn zero(name: &str) -> Arc<Self> {
        Dgla::new(name, Vec::new(), Vec::new(), Vec::new()).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_name(&self, i: usize) -> &str {
        &self.basis[i].0
    }

    pub fn basis_degree(&self, i: usize) -> i64 {
        self.basis[i].1
    }

    pub fn basis_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Unresolved(format!("basis '{name}' in DGLA '{}'", self.name)))
    }

    /// Indices of basis elements in a fixed degree, ascending.
    pub fn degree_indices(&self, degree: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].1 == degree).collect()
    }

    pub fn degrees_present(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.basis.iter().map(|(_, d)| *d).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// Differential of a basis element, sparse.
    pub fn diff_basis(&self, j: usize) -> &[(usize, Rat)] {
        static EMPTY: &[(usize, Rat)] = &[];
        self.diff.get(&j).map_or(EMPTY, Vec::as_slice)
    }

    /// Bracket of basis elements, with antisymmetry for unordered pairs.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<(usize, Rat)> {
        if i <= j {
            self.brackets.get(&(i, j)).cloned().unwrap_or_default()
        } else {
            let sign = koszul_sign(self.basis[i].1, self.basis[j].1);
            self.brackets
                .get(&(j, i))
                .map(|combo| combo.iter().map(|(k, c)| (*k, -&sign * c)).collect())
                .unwrap_or_default()
        }
    }

    /// Structural validation: grading, d^2 = 0, graded Leibniz and Jacobi.
    pub fn validate(self: &Arc<Self>) -> Report {
        let mut report = Report::new();
        let dim = self.dim();
        // Grading of the differential and brackets.
        for j in 0..dim {
            for (i, c) in self.diff_basis(j) {
                if self.basis[*i].1 != self.basis[j].1 + 1 && !c.is_zero() {
                    report.push(Violation::new(
                        "grading",
                        &self.name,
                        format!(
                            "d {} hits {} of degree {} (expected {})",
                            self.basis[j].0,
                            self.basis[*i].0,
                            self.basis[*i].1,
                            self.basis[j].1 + 1
                        ),
                    ));
                }
            }
        }
        for i in 0..dim {
            for j in i..dim {
                for (k, c) in self.bracket_basis(i, j) {
                    if self.basis[k].1 != self.basis[i].1 + self.basis[j].1 && !c.is_zero() {
                        report.push(Violation::new(
                            "grading",
                            &self.name,
                            format!(
                                "[{}, {}] hits {} of degree {} (expected {})",
                                self.basis[i].0,
                                self.basis[j].0,
                                self.basis[k].0,
                                self.basis[k].1,
                                self.basis[i].1 + self.basis[j].1
                            ),
                        ));
                    }
                }
            }
        }
        // Even-degree diagonal brackets vanish in characteristic zero.
        for i in 0..dim {
            if self.basis[i].1 % 2 == 0 && !self.bracket_basis(i, i).is_empty() {
                report.push(Violation::new(
                    "antisymmetry",
                    &self.name,
                    format!("[{}, {}] must vanish in even degree", self.basis[i].0, self.basis[i].0),
                ));
            }
        }
        // d^2 = 0.
        for j in 0..dim {
            let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
            for (i, c) in self.diff_basis(j) {
                for (k, d) in self.diff_basis(*i) {
                    *acc.entry(*k).or_insert_with(Rat::zero) += c * d;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            if !acc.is_empty() {
                report.push(Violation::new(
                    "d-squared",
                    &self.name,
                    format!("d^2 {} != 0", self.basis[j].0),
                ));
            }
        }
        // Graded Leibniz: d[x,y] = [dx,y] + (-1)^{|x|} [x,dy].
        for i in 0..dim {
            for j in 0..dim {
                let mut lhs: BTreeMap<usize, Rat> = BTreeMap::new();
                for (k, c) in self.bracket_basis(i, j) {
                    for (l, d) in self.diff_basis(k) {
                        *lhs.entry(*l).or_insert_with(Rat::zero) += &c * d;
                    }
                }
                let mut rhs: BTreeMap<usize, Rat> = BTreeMap::new();
                for (k, c) in self.diff_basis(i) {
                    for (l, d) in self.bracket_basis(*k, j) {
                        *rhs.entry(l).or_insert_with(Rat::zero) += c * &d;
                    }
                }
                let sign = if self.basis[i].1.rem_euclid(2) == 1 { -1 } else { 1 };
                for (k, c) in self.diff_basis(j) {
                    for (l, d) in self.bracket_basis(i, *k) {
                        *rhs.entry(l).or_insert_with(Rat::zero) +=
                            Rat::from_integer(sign.into()) * c * &d;
                    }
                }
                lhs.retain(|_, v| !v.is_zero());
                rhs.retain(|_, v| !v.is_zero());
                if lhs != rhs {
                    report.push(Violation::new(
                        "leibniz",
                        &self.name,
                        format!("d[{}, {}] fails Leibniz", self.basis[i].0, self.basis[j].0),
                    ));
                }
            }
        }
        // Graded Jacobi in ad form: [x,[y,z]] = [[x,y],z] + (-1)^{|x||y|}[y,[x,z]].
        for x in 0..dim {
            for y in 0..dim {
                for z in 0..dim {
                    let mut lhs: BTreeMap<usize, Rat> = BTreeMap::new();
                    for (k, c) in self.bracket_basis(y, z) {
                        for (l, d) in self.bracket_basis(x, k) {
                            *lhs.entry(l).or_insert_with(Rat::zero) += &c * &d;
                        }
                    }
                    let mut rhs: BTreeMap<usize, Rat> = BTreeMap::new();
                    for (k, c) in self.bracket_basis(x, y) {
                        for (l, d) in self.bracket_basis(k, z) {
                            *rhs.entry(l).or_insert_with(Rat::zero) += &c * &d;
                        }
                    }
                    let sign = koszul_sign(self.basis[x].1, self.basis[y].1);
                    for (k, c) in self.bracket_basis(x, z) {
                        for (l, d) in self.bracket_basis(y, k) {
                            *rhs.entry(l).or_insert_with(Rat::zero) += &sign * &c * &d;
                        }
                    }
                    lhs.retain(|_, v| !v.is_zero());
                    rhs.retain(|_, v| !v.is_zero());
                    if lhs != rhs {
                        report.push(Violation::new(
                            "jacobi",
                            &self.name,
                            format!(
                                "Jacobi fails on ({}, {}, {})",
                                self.basis[x].0, self.basis[y].0, self.basis[z].0
                            ),
                        ));
                    }
                }
            }
        }
        report
    }
}

/// `(-1)^{pq}` as a rational.
pub fn koszul_sign(p: i64, q: i64) -> Rat {
    if (p.rem_euclid(2)) * (q.rem_euclid(2)) == 1 {
        Rat::from_integer((-1).into())
    } else {
        Rat::from_integer(1.into())
    }
}

/// `(-1)^n` as a rational.
pub fn power_sign(n: i64) -> Rat {
    if n.rem_euclid(2) == 1 {
        Rat::from_integer((-1).into())
    } else {
        Rat::from_integer(1.into())
    }
}

/// Sparse element of `g` or `g ⊗ m_A`.
#[derive(Debug, Clone)]
pub struct GElement {
    pub ambient: Arc<Dgla>,
    coords: BTreeMap<(usize, CoeffKey), Rat>,
}

impl PartialEq for GElement {
    fn eq(&self, other: &Self) -> bool {
        self.ambient.name == other.ambient.name && self.coords == other.coords
    }
}

impl GElement {
    pub fn zero(ambient: &Arc<Dgla>) -> Self {
        GElement { ambient: Arc::clone(ambient), coords: BTreeMap::new() }
    }

    pub fn basis(ambient: &Arc<Dgla>, i: usize) -> Self {
        let mut coords = BTreeMap::new();
        coords.insert((i, CoeffKey::One), Rat::from_integer(1.into()));
        GElement { ambient: Arc::clone(ambient), coords }
    }

    pub fn from_coords(
        ambient: &Arc<Dgla>,
        entries: Vec<((usize, CoeffKey), Rat)>,
    ) -> Self {
        let mut out = GElement::zero(ambient);
        for (key, c) in entries {
            out.add_term(key, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (&(usize, CoeffKey), &Rat)> {
        self.coords.iter()
    }

    pub fn add_term(&mut self, key: (usize, CoeffKey), c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.coords.entry(key).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.coords.remove(&key);
        }
    }

    fn check_same(&self, other: &GElement) -> Result<()> {
        if !Arc::ptr_eq(&self.ambient, &other.ambient) && self.ambient.name != other.ambient.name {
            return Err(Error::AmbientMismatch(format!(
                "elements of '{}' and '{}'",
                self.ambient.name, other.ambient.name
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &GElement) -> Result<GElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coords {
            out.add_term(*k, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GElement) -> Result<GElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coords {
            out.add_term(*k, -v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> GElement {
        if c.is_zero() {
            return GElement::zero(&self.ambient);
        }
        GElement {
            ambient: Arc::clone(&self.ambient),
            coords: self.coords.iter().map(|(k, v)| (*k, c * v)).collect(),
        }
    }

    /// Internal degree when homogeneous; `None` for zero or mixed elements.
    pub fn degree(&self) -> Option<i64> {
        let mut deg = None;
        for ((i, _), _) in &self.coords {
            let d = self.ambient.basis_degree(*i);
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Applies the internal differential (coefficient slots untouched).
    pub fn differential(&self) -> GElement {
        let mut out = GElement::zero(&self.ambient);
        for ((j, key), c) in &self.coords {
            for (i, d) in self.ambient.diff_basis(*j) {
                out.add_term((*i, *key), c * d);
            }
        }
        out
    }

    /// Graded bracket; coefficient slots multiply through `ring`.
    pub fn bracket(&self, other: &GElement, ring: &CoeffRing) -> Result<GElement> {
        self.check_same(other)?;
        let mut out = GElement::zero(&self.ambient);
        for ((i, ka), c) in &self.coords {
            for ((j, kb), d) in &other.coords {
                let combo = self.ambient.bracket_basis(*i, *j);
                if combo.is_empty() {
                    continue;
                }
                for (key, e) in ring.mul_keys(*ka, *kb)? {
                    for (k, f) in &combo {
                        out.add_term((*k, key), c * d * &e * f);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiplies by a coefficient slot (tensoring with a monomial).
    pub fn tensor_key(&self, key: CoeffKey, ring: &CoeffRing) -> Result<GElement> {
        let mut out = GElement::zero(&self.ambient);
        for ((i, ka), c) in &self.coords {
            for (k, e) in ring.mul_keys(*ka, key)? {
                out.add_term((*i, k), c * &e);
            }
        }
        Ok(out)
    }

    /// Minimal coefficient filtration degree over the support (None if zero).
    pub fn min_filtration(&self, ring: &CoeffRing) -> Option<usize> {
        self.coords.keys().map(|(_, k)| ring.filtration(*k)).min()
    }

    /// Rendering with basis names, deterministic term order.
    pub fn render(&self, ring: &CoeffRing) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for ((i, key), c) in &self.coords {
            let mono = match (key, ring) {
                (CoeffKey::One, _) => String::new(),
                (CoeffKey::Mono(m), CoeffRing::Artin(alg)) => {
                    format!("*{}", alg.monomial_names()[*m])
                }
                (CoeffKey::Mono(m), CoeffRing::Rationals) => format!("*m{m}"),
            };
            parts.push(format!("{} {}{}", format_rat(c), self.ambient.basis_name(*i), mono));
        }
        parts.join(" + ")
    }
}

/// Marker for a nilpotent tensor context `g ⊗ m_A`: the DGLA, the Artin
/// coefficients, and the bound that makes BCH and gauge series finite.
#[derive(Debug, Clone)]
pub struct TensorContext {
    pub dgla: Arc<Dgla>,
    pub algebra: Arc<ArtinLocalAlgebra>,
}

impl TensorContext {
    pub fn ring(&self) -> CoeffRing {
        CoeffRing::Artin(Arc::clone(&self.algebra))
    }

    /// Series in `g ⊗ m_A` truncate beyond this total word length.
    pub fn truncation_order(&self) -> usize {
        self.algebra.nilpotency_order()
    }
}

/// Forms the nilpotent DGLA `g ⊗ m_A` as a computation context.
pub fn tensor_nilpotent(g: &Arc<Dgla>, a: &Arc<ArtinLocalAlgebra>) -> TensorContext {
    TensorContext { dgla: Arc::clone(g), algebra: Arc::clone(a) }
}

/// Degree-homogeneous linear map between DGLAs, stored column-sparse.
#[derive(Debug, Clone)]
pub struct GLinMap {
    pub source: Arc<Dgla>,
    pub target: Arc<Dgla>,
    pub degree: i64,
    /// `cols[j]` = image of source basis `j`.
    cols: Vec<Vec<(usize, Rat)>>,
}

impl GLinMap {
    pub fn new(
        source: &Arc<Dgla>,
        target: &Arc<Dgla>,
        degree: i64,
        cols: Vec<Vec<(usize, Rat)>>,
    ) -> Result<Self> {
        if cols.len() != source.dim() {
            return Err(Error::Malformed(format!(
                "map from '{}' has {} columns, expected {}",
                source.name,
                cols.len(),
                source.dim()
            )));
        }
        for (j, col) in cols.iter().enumerate() {
            for (i, c) in col {
                if *i >= target.dim() {
                    return Err(Error::Malformed(format!(
                        "map into '{}' hits basis index {i} out of range",
                        target.name
                    )));
                }
                if !c.is_zero() && target.basis_degree(*i) != source.basis_degree(j) + degree {
                    return Err(Error::Degree(format!(
                        "map entry {} -> {} violates declared degree {}",
                        source.basis_name(j),
                        target.basis_name(*i),
                        degree
                    )));
                }
            }
        }
        Ok(GLinMap {
            source: Arc::clone(source),
            target: Arc::clone(target),
            degree,
            cols,
        })
    }

    pub fn zero_map(source: &Arc<Dgla>, target: &Arc<Dgla>, degree: i64) -> Self {
        GLinMap {
            source: Arc::clone(source),
            target: Arc::clone(target),
            degree,
            cols: vec![Vec::new(); source.dim()],
        }
    }

    pub fn identity(g: &Arc<Dgla>) -> Self {
        GLinMap {
            source: Arc::clone(g),
            target: Arc::clone(g),
            degree: 0,
            cols: (0..g.dim()).map(|i| vec![(i, Rat::from_integer(1.into()))]).collect(),
        }
    }

    pub fn column(&self, j: usize) -> &[(usize, Rat)] {
        &self.cols[j]
    }

    pub fn apply(&self, x: &GElement) -> Result<GElement> {
        if x.ambient.name != self.source.name {
            return Err(Error::AmbientMismatch(format!(
                "map expects '{}', element lives in '{}'",
                self.source.name, x.ambient.name
            )));
        }
        let mut out = GElement::zero(&self.target);
        for ((j, key), c) in &x.coords {
            for (i, d) in &self.cols[*j] {
                out.add_term((*i, *key), c * d);
            }
        }
        Ok(out)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &GLinMap) -> Result<GLinMap> {
        if other.target.name != self.source.name {
            return Err(Error::AmbientMismatch(format!(
                "cannot compose: inner lands in '{}', outer expects '{}'",
                other.target.name, self.source.name
            )));
        }
        let mut cols = vec![Vec::new(); other.source.dim()];
        for j in 0..other.source.dim() {
            let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
            for (m, c) in &other.cols[j] {
                for (i, d) in &self.cols[*m] {
                    *acc.entry(*i).or_insert_with(Rat::zero) += c * d;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            cols[j] = acc.into_iter().collect();
        }
        GLinMap::new(&other.source, &self.target, self.degree + other.degree, cols)
    }

    /// Checks `f ∘ d = d ∘ f` on the basis (degree-zero maps).
    pub fn is_chain_map(&self) -> bool {
        for j in 0..self.source.dim() {
            let mut lhs: BTreeMap<usize, Rat> = BTreeMap::new();
            for (m, c) in self.source.diff_basis(j) {
                for (i, d) in &self.cols[*m] {
                    *lhs.entry(*i).or_insert_with(Rat::zero) += c * d;
                }
            }
            let mut rhs: BTreeMap<usize, Rat> = BTreeMap::new();
            for (m, c) in &self.cols[j] {
                for (i, d) in self.target.diff_basis(*m) {
                    *rhs.entry(*i).or_insert_with(Rat::zero) += c * d;
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            if lhs != rhs {
                return false;
            }
        }
        true
    }

    /// Checks `f[x,y] = [fx, fy]` on all basis pairs.
    pub fn is_lie_morphism(&self) -> bool {
        let ring = CoeffRing::Rationals;
        for i in 0..self.source.dim() {
            for j in i..self.source.dim() {
                let xi = GElement::basis(&self.source, i);
                let xj = GElement::basis(&self.source, j);
                let lhs = self.apply(&xi.bracket(&xj, &ring).unwrap()).unwrap();
                let rhs = self
                    .apply(&xi)
                    .unwrap()
                    .bracket(&self.apply(&xj).unwrap(), &ring)
                    .unwrap();
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
pub mod tests {
    use super::*;
    use crate::rational::rat;

    pub fn sl2() -> Arc<Dgla> {
        Dgla::new(
            "sl2",
            vec![("e".into(), 0), ("f".into(), 0), ("h".into(), 0)],
            vec![],
            vec![
                ("e".into(), "f".into(), vec![("h".into(), rat(1))]),
                ("h".into(), "e".into(), vec![("e".into(), rat(2))]),
                ("h".into(), "f".into(), vec![("f".into(), rat(-2))]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn sl2_validates() {
        let g = sl2();
        assert!(g.validate().is_clean());
    }

    #[test]
    fn perturbed_sl2_fails_jacobi() {
        let g = Dgla::new(
            "bad",
            vec![("e".into(), 0), ("f".into(), 0), ("h".into(), 0)],
            vec![],
            vec![
                ("e".into(), "f".into(), vec![("h".into(), rat(1)), ("e".into(), rat(1))]),
                ("h".into(), "e".into(), vec![("e".into(), rat(2))]),
                ("h".into(), "f".into(), vec![("f".into(), rat(-2))]),
            ],
        )
        .unwrap();
        let report = g.validate();
        assert!(report.violations().iter().any(|v| v.kind == "jacobi"));
    }

    #[test]
    fn bracket_by_antisymmetry() {
        let g = sl2();
        let e = GElement::basis(&g, 0);
        let f = GElement::basis(&g, 1);
        let h = GElement::basis(&g, 2);
        let ring = CoeffRing::Rationals;
        // [f, e] = -h by antisymmetry of the stored (e, f) entry.
        let fe = f.bracket(&e, &ring).unwrap();
        assert_eq!(fe, h.scale(&rat(-1)));
        // [e, h] = -2e.
        let eh = e.bracket(&h, &ring).unwrap();
        assert_eq!(eh, e.scale(&rat(-2)));
    }

    #[test]
    fn bracket_bilinear_over_artin() {
        let alg = Arc::new(
            crate::artin::ArtinLocalAlgebra::new(
                "A3",
                vec!["t".into(), "t2".into()],
                vec![("t".into(), "t".into(), vec![("t2".into(), rat(1))])],
            )
            .unwrap(),
        );
        let g = sl2();
        let ring = CoeffRing::Artin(Arc::clone(&alg));
        let et = GElement::from_coords(&g, vec![((0, CoeffKey::Mono(0)), rat(1))]);
        let ft = GElement::from_coords(&g, vec![((1, CoeffKey::Mono(0)), rat(1))]);
        // [e t, f t] = h t^2.
        let b = et.bracket(&ft, &ring).unwrap();
        assert_eq!(b, GElement::from_coords(&g, vec![((2, CoeffKey::Mono(1)), rat(1))]));
        // One more power of t kills it.
        let b2 = b.tensor_key(CoeffKey::Mono(0), &ring).unwrap();
        assert!(b2.is_zero());
    }

    #[test]
    fn graded_case_with_differential_validates() {
        // Two-term DGLA: x in degree 0, y in degree 1, d x = y, [x, x] = 0,
        // [x, y] = y (a semidirect product line).
        let g = Dgla::new(
            "line",
            vec![("x".into(), 0), ("y".into(), 1)],
            vec![("x".into(), vec![("y".into(), rat(1))])],
            vec![("x".into(), "y".into(), vec![("y".into(), rat(1))])],
        )
        .unwrap();
        // Leibniz: d[x,x] = 0 and [dx,x] + [x,dx] = [y,x] + [x,y]
        // = -[x,y] + [x,y] = 0. Jacobi trivial. Must validate.
        assert!(g.validate().is_clean());
        let x = GElement::basis(&g, 0);
        let y = GElement::basis(&g, 1);
        let ring = CoeffRing::Rationals;
        // [y, x] = -(-1)^{1*0}[x, y] = -y.
        assert_eq!(y.bracket(&x, &ring).unwrap(), y.scale(&rat(-1)));
        assert_eq!(x.differential(), y);
    }

    #[test]
    fn linmap_respects_degrees_and_composition() {
        let g = sl2();
        let id = GLinMap::identity(&g);
        let comp = id.compose(&id).unwrap();
        let e = GElement::basis(&g, 0);
        assert_eq!(comp.apply(&e).unwrap(), e);
        assert!(id.is_chain_map());
        assert!(id.is_lie_morphism());
        // A degree violation is rejected at construction.
        let bad = GLinMap::new(
            &g,
            &Dgla::new("shift", vec![("z".into(), 1)], vec![], vec![]).unwrap(),
            0,
            vec![vec![(0, rat(1))], vec![], vec![]],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn ambient_mismatch_rejected() {
        let g = sl2();
        let h = Dgla::new("other", vec![("a".into(), 0)], vec![], vec![]).unwrap();
        let x = GElement::basis(&g, 0);
        let y = GElement::basis(&h, 0);
        assert!(x.bracket(&y, &CoeffRing::Rationals).is_err());
        assert!(x.add(&y).is_err());
    }
}
