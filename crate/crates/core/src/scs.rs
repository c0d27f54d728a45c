//! Semicosimplicial DGLAs, their total complex, and the Thom-Whitney
//! complex with the Dupont contraction.
//!
//! A semicosimplicial DGLA is a finite tower of DGLAs `g_0, g_1, ..., g_N`
//! with coface morphisms `∂_{k,i}: g_{i-1} -> g_i` for `0 <= k <= i`
//! satisfying the cosimplicial identities. Levels beyond `N` are zero.
//!
//! Two complexes are attached to it: the total complex `Tot` (level i in
//! degree i plus internal degree, differential = alternating coface sum
//! plus `(-1)^level` times the internal differential) and the Thom-Whitney
//! complex `C_TW` of face-compatible families `x_n` in `Ω_n ⊗ g_n`. The
//! Dupont maps `E`, `I`, `h` form an explicit contraction of `C_TW` onto
//! `Tot`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::forms::{MultiIndex, PolyForm};
use crate::glie::{power_sign, CoeffKey, CoeffRing, Dgla, GElement, GLinMap};
use crate::linalg::{nullspace, Mat};
use crate::rational::{factorial, rat, Rat};
use crate::report::{Report, Violation};
use crate::rng::Sampler;

/// Semicosimplicial DGLA, truncated at a finite level.
#[derive(Debug)]
pub struct ScsDgla {
    pub name: String,
    levels: Vec<Arc<Dgla>>,
    /// `cofaces[i-1][k]` is `∂_{k,i}: g_{i-1} -> g_i`.
    cofaces: Vec<Vec<GLinMap>>,
}

impl ScsDgla {
    pub fn new(name: &str, levels: Vec<Arc<Dgla>>, cofaces: Vec<Vec<GLinMap>>) -> Result<Arc<Self>> {
        if levels.is_empty() {
            return Err(Error::Malformed("a semicosimplicial DGLA needs at least level 0".into()));
        }
        if cofaces.len() != levels.len() - 1 {
            return Err(Error::Malformed(format!(
                "object '{name}': {} levels need {} coface families, got {}",
                levels.len(),
                levels.len() - 1,
                cofaces.len()
            )));
        }
        for (i, family) in cofaces.iter().enumerate() {
            let level = i + 1;
            if family.len() != level + 1 {
                return Err(Error::Malformed(format!(
                    "object '{name}': level {level} needs {} cofaces, got {}",
                    level + 1,
                    family.len()
                )));
            }
            for (k, map) in family.iter().enumerate() {
                if map.source.name != levels[i].name || map.target.name != levels[level].name {
                    return Err(Error::Malformed(format!(
                        "object '{name}': coface ({k},{level}) has mismatched endpoints"
                    )));
                }
                if map.degree != 0 {
                    return Err(Error::Degree(format!(
                        "object '{name}': coface ({k},{level}) must have degree 0"
                    )));
                }
            }
        }
        Ok(Arc::new(ScsDgla { name: name.to_string(), levels, cofaces }))
    }

    /// Highest nonzero level.
    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, i: usize) -> &Arc<Dgla> {
        &self.levels[i]
    }

    pub fn coface(&self, k: usize, i: usize) -> &GLinMap {
        &self.cofaces[i - 1][k]
    }

    /// Alternating coface sum `∂_i = Σ_k (-1)^k ∂_{k,i}` applied to a
    /// level `i-1` element.
    pub fn coface_alternating(&self, i: usize, x: &GElement) -> Result<GElement> {
        let mut acc = GElement::zero(&self.levels[i]);
        for k in 0..=i {
            let img = self.coface(k, i).apply(x)?;
            acc = if k % 2 == 0 { acc.add(&img)? } else { acc.sub(&img)? };
        }
        Ok(acc)
    }

    /// Structural validation: cosimplicial identities and coface morphism
    /// properties. Level DGLAs are validated separately.
    pub fn validate(self: &Arc<Self>) -> Report {
        let mut report = Report::new();
        for i in 1..=self.max_level() {
            for (k, map) in self.cofaces[i - 1].iter().enumerate() {
                if !map.is_chain_map() {
                    report.push(Violation::new(
                        "coface-chain-map",
                        &self.name,
                        format!("coface ({k},{i}) does not commute with d"),
                    ));
                }
                if !map.is_lie_morphism() {
                    report.push(Violation::new(
                        "coface-lie-morphism",
                        &self.name,
                        format!("coface ({k},{i}) does not preserve brackets"),
                    ));
                }
            }
        }
        // ∂_{k+1,i+1} ∂_{l,i} = ∂_{l,i+1} ∂_{k,i} for l <= k <= i.
        for i in 1..self.max_level() {
            for k in 0..=i {
                for l in 0..=k {
                    let lhs = self.coface(k + 1, i + 1).compose(self.coface(l, i)).unwrap();
                    let rhs = self.coface(l, i + 1).compose(self.coface(k, i)).unwrap();
                    let same = (0..self.levels[i - 1].dim())
                        .all(|j| lhs.column(j) == rhs.column(j));
                    if !same {
                        report.push(Violation::new(
                            "cosimplicial-identity",
                            &self.name,
                            format!("∂_({},{}) ∂_({l},{i}) != ∂_({l},{}) ∂_({k},{i})", k + 1, i + 1, i + 1),
                        ));
                    }
                }
            }
        }
        report
    }

    /// The object computing the positive-degree part of the totalization:
    /// level 0 replaced by the zero DGLA.
    pub fn positive_truncation(self: &Arc<Self>) -> Result<Arc<ScsDgla>> {
        let zero = Dgla::zero(&format!("{}_zero0", self.name));
        let mut levels = self.levels.clone();
        levels[0] = Arc::clone(&zero);
        let mut cofaces = self.cofaces.clone();
        if !cofaces.is_empty() {
            cofaces[0] = (0..=1).map(|_| GLinMap::zero_map(&zero, &self.levels[1], 0)).collect();
        }
        ScsDgla::new(&format!("{}_pos", self.name), levels, cofaces)
    }

    /// Pairs `(level, basis index)` spanning the total complex in a fixed
    /// total degree.
    pub fn tot_degree_basis(&self, degree: i64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, g) in self.levels.iter().enumerate() {
            for b in 0..g.dim() {
                if i as i64 + g.basis_degree(b) == degree {
                    out.push((i, b));
                }
            }
        }
        out
    }

    /// Matrix of the total differential from degree `deg` to `deg+1` over
    /// the rationals.
    pub fn tot_differential_matrix(self: &Arc<Self>, deg: i64) -> Mat {
        let src = self.tot_degree_basis(deg);
        let dst = self.tot_degree_basis(deg + 1);
        let pos: BTreeMap<(usize, usize), usize> =
            dst.iter().enumerate().map(|(p, k)| (*k, p)).collect();
        let mut m = Mat::zero(dst.len(), src.len());
        for (j, (level, b)) in src.iter().enumerate() {
            let x = TotElement::basis(self, *level, *b);
            let dx = x.tot_differential().unwrap();
            for (i, comp) in dx.components.iter().enumerate() {
                for ((bb, key), c) in comp.support() {
                    debug_assert_eq!(*key, CoeffKey::One);
                    if let Some(p) = pos.get(&(i, *bb)) {
                        m[(*p, j)] = c.clone();
                    }
                }
            }
        }
        m
    }
}

/// Element of the total complex: one component per level.
#[derive(Debug, Clone)]
pub struct TotElement {
    pub scs: Arc<ScsDgla>,
    pub components: Vec<GElement>,
}

impl PartialEq for TotElement {
    fn eq(&self, other: &Self) -> bool {
        self.scs.name == other.scs.name && self.components == other.components
    }
}

impl TotElement {
    pub fn zero(scs: &Arc<ScsDgla>) -> Self {
        TotElement {
            scs: Arc::clone(scs),
            components: (0..=scs.max_level()).map(|i| GElement::zero(scs.level(i))).collect(),
        }
    }

    pub fn basis(scs: &Arc<ScsDgla>, level: usize, b: usize) -> Self {
        let mut out = TotElement::zero(scs);
        out.components[level] = GElement::basis(scs.level(level), b);
        out
    }

    pub fn from_component(scs: &Arc<ScsDgla>, level: usize, x: GElement) -> Result<Self> {
        if x.ambient.name != scs.level(level).name {
            return Err(Error::AmbientMismatch(format!(
                "component for level {level} lives in '{}', expected '{}'",
                x.ambient.name,
                scs.level(level).name
            )));
        }
        let mut out = TotElement::zero(scs);
        out.components[level] = x;
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(GElement::is_zero)
    }

    fn check_same(&self, other: &TotElement) -> Result<()> {
        if self.scs.name != other.scs.name {
            return Err(Error::AmbientMismatch(format!(
                "total elements over '{}' and '{}'",
                self.scs.name, other.scs.name
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TotElement) -> Result<TotElement> {
        self.check_same(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TotElement { scs: Arc::clone(&self.scs), components })
    }

    pub fn sub(&self, other: &TotElement) -> Result<TotElement> {
        self.check_same(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(TotElement { scs: Arc::clone(&self.scs), components })
    }

    pub fn scale(&self, c: &Rat) -> TotElement {
        TotElement {
            scs: Arc::clone(&self.scs),
            components: self.components.iter().map(|x| x.scale(c)).collect(),
        }
    }

    /// Total degree (level + internal) when homogeneous.
    pub fn total_degree(&self) -> Option<i64> {
        let mut deg = None;
        for (i, comp) in self.components.iter().enumerate() {
            for ((b, _), _) in comp.support() {
                let d = i as i64 + comp.ambient.basis_degree(*b);
                match deg {
                    None => deg = Some(d),
                    Some(e) if e != d => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    /// Total differential: level `i` picks up `∂_i x_{i-1} + (-1)^i d x_i`.
    pub fn tot_differential(&self) -> Result<TotElement> {
        let scs = &self.scs;
        let mut out = TotElement::zero(scs);
        for i in 0..=scs.max_level() {
            let mut acc = self.components[i].differential().scale(&power_sign(i as i64));
            if i >= 1 {
                acc = acc.add(&scs.coface_alternating(i, &self.components[i - 1])?)?;
            }
            out.components[i] = acc;
        }
        Ok(out)
    }

    /// Dense coordinates over a fixed total-degree basis (Q coefficients).
    pub fn to_dense(&self, basis: &[(usize, usize)]) -> Result<Vec<Rat>> {
        let pos: BTreeMap<(usize, usize), usize> =
            basis.iter().enumerate().map(|(p, k)| (*k, p)).collect();
        let mut v = vec![Rat::zero(); basis.len()];
        for (i, comp) in self.components.iter().enumerate() {
            for ((b, key), c) in comp.support() {
                if *key != CoeffKey::One {
                    return Err(Error::Degree(
                        "dense coordinates only for rational coefficients".into(),
                    ));
                }
                let p = pos.get(&(i, *b)).ok_or_else(|| {
                    Error::Degree("element has support outside the given degree basis".into())
                })?;
                v[*p] = c.clone();
            }
        }
        Ok(v)
    }

    pub fn from_dense(scs: &Arc<ScsDgla>, basis: &[(usize, usize)], v: &[Rat]) -> Self {
        let mut out = TotElement::zero(scs);
        for (p, (i, b)) in basis.iter().enumerate() {
            if !v[p].is_zero() {
                out.components[*i].add_term((*b, CoeffKey::One), v[p].clone());
            }
        }
        out
    }

    /// Splits by coefficient monomial: returns the rational-coefficient
    /// element attached to each monomial slot that occurs.
    pub fn split_by_key(&self) -> BTreeMap<CoeffKey, TotElement> {
        let mut out: BTreeMap<CoeffKey, TotElement> = BTreeMap::new();
        for (i, comp) in self.components.iter().enumerate() {
            for ((b, key), c) in comp.support() {
                let entry = out
                    .entry(*key)
                    .or_insert_with(|| TotElement::zero(&self.scs));
                entry.components[i].add_term((*b, CoeffKey::One), c.clone());
            }
        }
        out
    }

    /// Tensors a rational-coefficient element with a monomial slot.
    pub fn tensor_key(&self, key: CoeffKey, ring: &CoeffRing) -> Result<TotElement> {
        let components = self
            .components
            .iter()
            .map(|x| x.tensor_key(key, ring))
            .collect::<Result<Vec<_>>>()?;
        Ok(TotElement { scs: Arc::clone(&self.scs), components })
    }

    pub fn render(&self, ring: &CoeffRing) -> String {
        let mut parts = Vec::new();
        for (i, comp) in self.components.iter().enumerate() {
            if !comp.is_zero() {
                parts.push(format!("level {i}: {}", comp.render(ring)));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("; ")
        }
    }
}

/// Element of `⊕_n Ω_n ⊗ g_n` (level capped); members of the Thom-Whitney
/// complex are the face-compatible ones.
#[derive(Debug, Clone)]
pub struct TwElement {
    pub scs: Arc<ScsDgla>,
    /// `levels[n]` maps `(g-basis index, coefficient slot)` to a form on Δ^n.
    levels: Vec<BTreeMap<(usize, CoeffKey), PolyForm>>,
}

impl PartialEq for TwElement {
    fn eq(&self, other: &Self) -> bool {
        self.scs.name == other.scs.name && self.levels == other.levels
    }
}

impl TwElement {
    pub fn zero(scs: &Arc<ScsDgla>) -> Self {
        TwElement {
            scs: Arc::clone(scs),
            levels: vec![BTreeMap::new(); scs.max_level() + 1],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(BTreeMap::is_empty)
    }

    pub fn level_entries(&self, n: usize) -> impl Iterator<Item = (&(usize, CoeffKey), &PolyForm)> {
        self.levels[n].iter()
    }

    /// Number of stored (entry, form-term) pairs, a size diagnostic.
    pub fn term_count(&self) -> usize {
        self.levels.iter().flat_map(|l| l.values()).map(PolyForm::term_count).sum()
    }

    pub fn add_entry(&mut self, n: usize, key: (usize, CoeffKey), form: PolyForm) {
        if form.is_zero() {
            return;
        }
        debug_assert_eq!(form.simplex_dim(), n);
        match self.levels[n].entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(form);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&form).unwrap();
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_same(&self, other: &TwElement) -> Result<()> {
        if self.scs.name != other.scs.name {
            return Err(Error::AmbientMismatch(format!(
                "Thom-Whitney elements over '{}' and '{}'",
                self.scs.name, other.scs.name
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TwElement) -> Result<TwElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (n, level) in other.levels.iter().enumerate() {
            for (key, form) in level {
                out.add_entry(n, *key, form.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TwElement) -> Result<TwElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (n, level) in other.levels.iter().enumerate() {
            for (key, form) in level {
                out.add_entry(n, *key, form.scale(&rat(-1)));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> TwElement {
        if c.is_zero() {
            return TwElement::zero(&self.scs);
        }
        TwElement {
            scs: Arc::clone(&self.scs),
            levels: self
                .levels
                .iter()
                .map(|level| level.iter().map(|(k, f)| (*k, f.scale(c))).collect())
                .collect(),
        }
    }

    /// Total degree (form + internal) when homogeneous.
    pub fn total_degree(&self) -> Option<i64> {
        let mut deg = None;
        for (n, level) in self.levels.iter().enumerate() {
            let g = self.scs.level(n);
            for ((b, _), form) in level {
                for d in 0..=n {
                    if form.degree_part(d).is_zero() {
                        continue;
                    }
                    let total = d as i64 + g.basis_degree(*b);
                    match deg {
                        None => deg = Some(total),
                        Some(e) if e != total => return None,
                        _ => {}
                    }
                }
            }
        }
        deg
    }

    /// Thom-Whitney differential `d_Ω ⊗ 1 + (-1)^{form degree} 1 ⊗ d_g`.
    pub fn tw_differential(&self) -> TwElement {
        let mut out = TwElement::zero(&self.scs);
        for (n, level) in self.levels.iter().enumerate() {
            let g = self.scs.level(n);
            for ((b, key), form) in level {
                out.add_entry(n, (*b, *key), form.dform());
                for p in 0..=n {
                    let part = form.degree_part(p);
                    if part.is_zero() {
                        continue;
                    }
                    let signed = part.scale(&power_sign(p as i64));
                    for (bb, c) in g.diff_basis(*b) {
                        out.add_entry(n, (*bb, *key), signed.scale(c));
                    }
                }
            }
        }
        out
    }

    /// Level-wise wedge-bracket with the Koszul sign
    /// `[η⊗x, μ⊗y] = (-1)^{|x| |μ|} (η∧μ) ⊗ [x,y]`.
    pub fn tw_bracket(&self, other: &TwElement, ring: &CoeffRing) -> Result<TwElement> {
        self.check_same(other)?;
        let mut out = TwElement::zero(&self.scs);
        for (n, level) in self.levels.iter().enumerate() {
            let g = self.scs.level(n);
            for ((bx, kx), eta) in level {
                let deg_x = g.basis_degree(*bx);
                for ((by, ky), mu) in &other.levels[n] {
                    let combo = g.bracket_basis(*bx, *by);
                    if combo.is_empty() {
                        continue;
                    }
                    let keys = ring.mul_keys(*kx, *ky)?;
                    if keys.is_empty() {
                        continue;
                    }
                    for q in 0..=n {
                        let mu_q = mu.degree_part(q);
                        if mu_q.is_zero() {
                            continue;
                        }
                        let mut prod = eta.wedge(&mu_q)?;
                        if deg_x.rem_euclid(2) == 1 && q % 2 == 1 {
                            prod = prod.scale(&rat(-1));
                        }
                        if prod.is_zero() {
                            continue;
                        }
                        for (key, e) in &keys {
                            for (bz, c) in &combo {
                                out.add_entry(n, (*bz, *key), prod.scale(&(e * c)));
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Face-compatibility defects `δ^{k,n} x_n - ∂_{k,n} x_{n-1}`; empty
    /// iff the element lies in the Thom-Whitney complex.
    pub fn compatibility_defects(&self) -> Result<Vec<(usize, usize)>> {
        let mut bad = Vec::new();
        for n in 1..=self.scs.max_level() {
            for k in 0..=n {
                // LHS: faces of the level-n part.
                let mut lhs: BTreeMap<(usize, CoeffKey), PolyForm> = BTreeMap::new();
                for (key, form) in &self.levels[n] {
                    let f = form.face_map(k)?;
                    if !f.is_zero() {
                        merge_form(&mut lhs, *key, f);
                    }
                }
                // RHS: coface ∂_{k,n} applied to the level n-1 part.
                let mut rhs: BTreeMap<(usize, CoeffKey), PolyForm> = BTreeMap::new();
                let map = self.scs.coface(k, n);
                for ((b, key), form) in &self.levels[n - 1] {
                    for (bb, c) in map.column(*b) {
                        merge_form(&mut rhs, (*bb, *key), form.scale(c));
                    }
                }
                if lhs != rhs {
                    bad.push((k, n));
                }
            }
        }
        Ok(bad)
    }

    /// Extraction `E(γ)_n = Σ_{i<=n} i! Σ_{I ∈ I(i,n)} ω_I ⊗ ∂^{Ī} γ_i`
    /// where `Ī` is the ascending complement and `∂^{Ī}` composes cofaces
    /// from level `i+1` upward.
    pub fn dupont_e(tot: &TotElement) -> Result<TwElement> {
        let scs = &tot.scs;
        let mut out = TwElement::zero(scs);
        for i in 0..=scs.max_level() {
            let gamma = &tot.components[i];
            if gamma.is_zero() {
                continue;
            }
            let fact = factorial(i);
            for n in i..=scs.max_level() {
                for index in MultiIndex::enumerate(i, n) {
                    let omega = PolyForm::whitney(&index, n)?.scale(&fact);
                    if omega.is_zero() {
                        continue;
                    }
                    let mut img = gamma.clone();
                    for (step, b) in index.complement(n).into_iter().enumerate() {
                        img = scs.coface(b, i + 1 + step).apply(&img)?;
                    }
                    for ((b, key), c) in img.support() {
                        out.add_entry(n, (*b, *key), omega.scale(c));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Integration `I(x)_i = ∫_{Δ^i} x_i` (top form component per level).
    pub fn dupont_i(&self) -> TotElement {
        let mut out = TotElement::zero(&self.scs);
        for (n, level) in self.levels.iter().enumerate() {
            for ((b, key), form) in level {
                let val = form.integrate_simplex();
                if !val.is_zero() {
                    out.components[n].add_term((*b, *key), val);
                }
            }
        }
        out
    }

    /// Dupont homotopy `h(x)_n = Σ_{r<i} Σ_{I ∈ I(r,n)} r! ω_I ∧ h_I(x_n)`
    /// applied per form degree `i`.
    pub fn dupont_h(&self) -> Result<TwElement> {
        let mut out = TwElement::zero(&self.scs);
        for (n, level) in self.levels.iter().enumerate() {
            for ((b, key), form) in level {
                for i in 1..=n {
                    let part = form.degree_part(i);
                    if part.is_zero() {
                        continue;
                    }
                    for r in 0..i {
                        let fact = factorial(r);
                        for index in MultiIndex::enumerate(r, n) {
                            let hi = part.dupont_h_multi(&index)?;
                            if hi.is_zero() {
                                continue;
                            }
                            let omega = PolyForm::whitney(&index, n)?;
                            let contrib = omega.wedge(&hi)?.scale(&fact);
                            out.add_entry(n, (*b, *key), contrib);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (n, level) in self.levels.iter().enumerate() {
            for ((b, key), form) in level {
                let mono = match key {
                    CoeffKey::One => String::new(),
                    CoeffKey::Mono(m) => format!("*m{m}"),
                };
                parts.push(format!(
                    "level {n} {}{}: {}",
                    self.scs.level(n).basis_name(*b),
                    mono,
                    form.render()
                ));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("; ")
        }
    }
}

fn merge_form(
    map: &mut BTreeMap<(usize, CoeffKey), PolyForm>,
    key: (usize, CoeffKey),
    form: PolyForm,
) {
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(form);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().add(&form).unwrap();
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
}

/// Level-wise morphism of semicosimplicial DGLAs.
#[derive(Debug, Clone)]
pub struct ScsMorphism {
    pub name: String,
    pub source: Arc<ScsDgla>,
    pub target: Arc<ScsDgla>,
    pub maps: Vec<GLinMap>,
}

impl ScsMorphism {
    pub fn new(
        name: &str,
        source: &Arc<ScsDgla>,
        target: &Arc<ScsDgla>,
        maps: Vec<GLinMap>,
    ) -> Result<Self> {
        if maps.len() != source.max_level() + 1 || source.max_level() != target.max_level() {
            return Err(Error::Malformed(format!(
                "morphism '{name}': need one level map per level on matching towers"
            )));
        }
        for (i, map) in maps.iter().enumerate() {
            if map.source.name != source.level(i).name || map.target.name != target.level(i).name {
                return Err(Error::Malformed(format!(
                    "morphism '{name}': level {i} map has mismatched endpoints"
                )));
            }
            if map.degree != 0 {
                return Err(Error::Degree(format!("morphism '{name}': level {i} map must be degree 0")));
            }
        }
        Ok(ScsMorphism {
            name: name.to_string(),
            source: Arc::clone(source),
            target: Arc::clone(target),
            maps,
        })
    }

    /// Validation: level maps are DGLA morphisms commuting with cofaces.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();
        for (i, map) in self.maps.iter().enumerate() {
            if !map.is_chain_map() {
                report.push(Violation::new(
                    "morphism-chain-map",
                    &self.name,
                    format!("level {i} map does not commute with d"),
                ));
            }
            if !map.is_lie_morphism() {
                report.push(Violation::new(
                    "morphism-lie",
                    &self.name,
                    format!("level {i} map does not preserve brackets"),
                ));
            }
        }
        for i in 1..=self.source.max_level() {
            for k in 0..=i {
                let lhs = self.maps[i].compose(self.source.coface(k, i)).unwrap();
                let rhs = self.target.coface(k, i).compose(&self.maps[i - 1]).unwrap();
                let same = (0..self.source.level(i - 1).dim())
                    .all(|j| lhs.column(j) == rhs.column(j));
                if !same {
                    report.push(Violation::new(
                        "morphism-coface",
                        &self.name,
                        format!("level {i} map does not intertwine coface ({k},{i})"),
                    ));
                }
            }
        }
        report
    }

    pub fn apply_tot(&self, x: &TotElement) -> Result<TotElement> {
        if x.scs.name != self.source.name {
            return Err(Error::AmbientMismatch(format!(
                "morphism '{}' expects '{}', element lives over '{}'",
                self.name, self.source.name, x.scs.name
            )));
        }
        let mut out = TotElement::zero(&self.target);
        for (i, comp) in x.components.iter().enumerate() {
            out.components[i] = self.maps[i].apply(comp)?;
        }
        Ok(out)
    }

    pub fn apply_tw(&self, x: &TwElement) -> Result<TwElement> {
        if x.scs.name != self.source.name {
            return Err(Error::AmbientMismatch(format!(
                "morphism '{}' expects '{}', element lives over '{}'",
                self.name, self.source.name, x.scs.name
            )));
        }
        let mut out = TwElement::zero(&self.target);
        for (n, level) in x.levels.iter().enumerate() {
            for ((b, key), form) in level {
                for (bb, c) in self.maps[n].column(*b) {
                    out.add_entry(n, (*bb, *key), form.scale(c));
                }
            }
        }
        Ok(out)
    }
}

/// Generator of random face-compatible elements, used by the contraction
/// and side-condition batteries. Kernel bases (forms with vanishing face
/// restrictions) are precomputed per level up to a polynomial degree cap.
pub struct CompatibleSampler {
    scs: Arc<ScsDgla>,
    /// For each level `n >= 1`: Thom-Whitney elements supported at level n
    /// alone whose faces all vanish.
    relative_cells: Vec<Vec<TwElement>>,
}

impl CompatibleSampler {
    pub fn new(scs: &Arc<ScsDgla>) -> Result<Self> {
        // Form-space basis at level n: monomials of polynomial degree <= 2
        // with any dt subset, tensored with the g_n basis.
        let mut relative_cells = Vec::new();
        for n in 1..=scs.max_level() {
            let g = scs.level(n);
            let monos = monomial_basis(n, 2);
            let vars: Vec<(usize, PolyForm)> = monos
                .iter()
                .flat_map(|m| (0..g.dim()).map(move |b| (b, m.clone())))
                .collect();
            // Constraint: all k faces vanish. Use the coefficients of the
            // faces in the (lower-level) monomial basis as rows.
            let lower = monomial_keys(n - 1, 3);
            let mut rows: Vec<Vec<Rat>> = Vec::new();
            for k in 0..=n {
                let faced: Vec<PolyForm> =
                    vars.iter().map(|(_, m)| m.face_map(k).unwrap()).collect();
                for (exps, dts) in &lower {
                    for b in 0..g.dim() {
                        let row: Vec<Rat> = vars
                            .iter()
                            .zip(&faced)
                            .map(|((vb, _), f)| {
                                if *vb == b {
                                    f.coefficient(exps, dts)
                                } else {
                                    Rat::zero()
                                }
                            })
                            .collect();
                        rows.push(row);
                    }
                }
            }
            // A cell at level n below the top also answers to the level n+1
            // face conditions against the zero component there: every coface
            // image of the cell must vanish.
            if n < scs.max_level() {
                let upper = scs.level(n + 1);
                let here = monomial_keys(n, 2);
                for k in 0..=(n + 1) {
                    let coface = scs.coface(k, n + 1);
                    for (exps, dts) in &here {
                        for bb in 0..upper.dim() {
                            let row: Vec<Rat> = vars
                                .iter()
                                .map(|(vb, m)| {
                                    let weight = coface
                                        .column(*vb)
                                        .iter()
                                        .find(|(i, _)| *i == bb)
                                        .map(|(_, c)| c.clone())
                                        .unwrap_or_else(Rat::zero);
                                    m.coefficient(exps, dts) * weight
                                })
                                .collect();
                            rows.push(row);
                        }
                    }
                }
            }
            let mat = Mat::from_rows(if rows.is_empty() {
                vec![vec![Rat::zero(); vars.len()]]
            } else {
                rows
            });
            let kernel = nullspace(&mat);
            let mut cells = Vec::new();
            for v in kernel {
                let mut tw = TwElement::zero(scs);
                for (j, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        let (b, m) = &vars[j];
                        tw.add_entry(n, (*b, CoeffKey::One), m.scale(c));
                    }
                }
                if !tw.is_zero() {
                    cells.push(tw);
                }
            }
            relative_cells.push(cells);
        }
        Ok(CompatibleSampler { scs: Arc::clone(scs), relative_cells })
    }

    /// A random element of the Thom-Whitney complex: an extraction of a
    /// random total element, a differential of another, a bracket of two
    /// more, plus random relative cells at every level.
    pub fn sample(&self, sampler: &mut Sampler) -> Result<TwElement> {
        let mut acc = TwElement::dupont_e(&self.random_tot(sampler))?;
        let second = TwElement::dupont_e(&self.random_tot(sampler))?;
        acc = acc.add(&second.tw_differential())?;
        let third = TwElement::dupont_e(&self.random_tot(sampler))?;
        acc = acc.add(&third.tw_bracket(&second, &CoeffRing::Rationals)?)?;
        for cells in &self.relative_cells {
            for cell in cells {
                if sampler.index(3) == 0 {
                    acc = acc.add(&cell.scale(&sampler.rat()))?;
                }
            }
        }
        Ok(acc)
    }

    fn random_tot(&self, sampler: &mut Sampler) -> TotElement {
        let mut out = TotElement::zero(&self.scs);
        for i in 0..=self.scs.max_level() {
            let g = self.scs.level(i);
            for b in 0..g.dim() {
                if sampler.index(2) == 0 {
                    out.components[i].add_term((b, CoeffKey::One), sampler.rat());
                }
            }
        }
        out
    }
}

/// All monomials `t^e dt_S` on Δ^n with total polynomial degree <= cap,
/// represented as `(exponents, dt subset)`.
fn monomial_keys(n: usize, cap: u16) -> Vec<(Vec<u16>, Vec<usize>)> {
    let mut exps_list: Vec<Vec<u16>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for e in &exps_list {
            let used: u16 = e.iter().sum();
            for v in 0..=(cap - used) {
                let mut e2 = e.clone();
                e2.push(v);
                next.push(e2);
            }
        }
        exps_list = next;
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let dts: Vec<usize> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        for e in &exps_list {
            out.push((e.clone(), dts.clone()));
        }
    }
    out
}

fn monomial_basis(n: usize, cap: u16) -> Vec<PolyForm> {
    monomial_keys(n, cap)
        .into_iter()
        .map(|(exps, dts)| PolyForm::from_monomial(n, &exps, &dts, rat(1)).unwrap())
        .collect()
}

#[cfg(test)]
pub mod tests {
    use super::*;
    use crate::glie;
    use crate::linalg::Cohomology;

    /// Cover-of-a-point tower: constant Q presheaf on three opens with the
    /// full nerve. Levels Q^3, Q^3, Q with the standard deletion cofaces.
    pub fn abelian_point_cover() -> Arc<ScsDgla> {
        let g0 = Dgla::new(
            "pt0",
            vec![("u1".into(), 0), ("u2".into(), 0), ("u3".into(), 0)],
            vec![],
            vec![],
        )
        .unwrap();
        let g1 = Dgla::new(
            "pt1",
            vec![("u12".into(), 0), ("u13".into(), 0), ("u23".into(), 0)],
            vec![],
            vec![],
        )
        .unwrap();
        let g2 = Dgla::new("pt2", vec![("u123".into(), 0)], vec![], vec![]).unwrap();
        let one = rat(1);
        // (d_0 x)_{ij} = x_j and (d_1 x)_{ij} = x_i; columns list the pair
        // slots each open hits.
        let d01 = GLinMap::new(
            &g0,
            &g1,
            0,
            vec![vec![], vec![(0, one.clone())], vec![(1, one.clone()), (2, one.clone())]],
        )
        .unwrap();
        let d11 = GLinMap::new(
            &g0,
            &g1,
            0,
            vec![vec![(0, one.clone()), (1, one.clone())], vec![(2, one.clone())], vec![]],
        )
        .unwrap();
        let d02 = GLinMap::new(&g1, &g2, 0, vec![vec![], vec![], vec![(0, one.clone())]]).unwrap();
        let d12 = GLinMap::new(&g1, &g2, 0, vec![vec![], vec![(0, one.clone())], vec![]]).unwrap();
        let d22 = GLinMap::new(&g1, &g2, 0, vec![vec![(0, one.clone())], vec![], vec![]]).unwrap();
        ScsDgla::new(
            "abelian_point_cover",
            vec![g0, g1, g2],
            vec![vec![d01, d11], vec![d02, d12, d22]],
        )
        .unwrap()
    }

    /// Constant sl2 presheaf on two opens: level 0 is two commuting sl2
    /// summands, level 1 their common restriction.
    pub fn sl2_pair_cover() -> Arc<ScsDgla> {
        let two = rat(2);
        let one = rat(1);
        let summand_brackets = |tag: &str| -> Vec<(String, String, Vec<(String, Rat)>)> {
            vec![
                (format!("e{tag}"), format!("f{tag}"), vec![(format!("h{tag}"), one.clone())]),
                (format!("h{tag}"), format!("e{tag}"), vec![(format!("e{tag}"), two.clone())]),
                (format!("h{tag}"), format!("f{tag}"), vec![(format!("f{tag}"), -two.clone())]),
            ]
        };
        let mut brackets = summand_brackets("@1");
        brackets.extend(summand_brackets("@2"));
        let g0 = Dgla::new(
            "sl2pair0",
            vec![
                ("e@1".into(), 0),
                ("f@1".into(), 0),
                ("h@1".into(), 0),
                ("e@2".into(), 0),
                ("f@2".into(), 0),
                ("h@2".into(), 0),
            ],
            vec![],
            brackets,
        )
        .unwrap();
        let g1 = Dgla::new(
            "sl2pair1",
            vec![("e".into(), 0), ("f".into(), 0), ("h".into(), 0)],
            vec![],
            summand_brackets(""),
        )
        .unwrap();
        // (d_0 x)_{12} = x_2 and (d_1 x)_{12} = x_1.
        let d0 = GLinMap::new(
            &g0,
            &g1,
            0,
            vec![
                vec![],
                vec![],
                vec![],
                vec![(0, one.clone())],
                vec![(1, one.clone())],
                vec![(2, one.clone())],
            ],
        )
        .unwrap();
        let d1 = GLinMap::new(
            &g0,
            &g1,
            0,
            vec![
                vec![(0, one.clone())],
                vec![(1, one.clone())],
                vec![(2, one)],
                vec![],
                vec![],
                vec![],
            ],
        )
        .unwrap();
        ScsDgla::new("sl2_pair_cover", vec![g0, g1], vec![vec![d0, d1]]).unwrap()
    }

    #[test]
    fn pair_cover_validates() {
        let scs = sl2_pair_cover();
        let report = scs.validate();
        assert!(report.is_clean(), "{}", report.render_text());
        for i in 0..=scs.max_level() {
            assert!(scs.level(i).validate().is_clean());
        }
    }

    #[test]
    fn point_cover_validates() {
        let scs = abelian_point_cover();
        let report = scs.validate();
        assert!(report.is_clean(), "{}", report.render_text());
    }

    #[test]
    fn corrupted_coface_fails_cosimplicial_identity() {
        let scs = abelian_point_cover();
        let one = rat(1);
        // Swap the roles of d_{0,2} and d_{2,2}.
        let g1 = Arc::clone(scs.level(1));
        let g2 = Arc::clone(scs.level(2));
        let bad_d02 = GLinMap::new(&g1, &g2, 0, vec![vec![(0, one.clone())], vec![], vec![]]).unwrap();
        let d12 = GLinMap::new(&g1, &g2, 0, vec![vec![], vec![(0, one.clone())], vec![]]).unwrap();
        let bad_d22 = GLinMap::new(&g1, &g2, 0, vec![vec![], vec![], vec![(0, one)]]).unwrap();
        let levels = vec![Arc::clone(scs.level(0)), g1, g2];
        let cofaces = vec![
            vec![scs.coface(0, 1).clone(), scs.coface(1, 1).clone()],
            vec![bad_d02, d12, bad_d22],
        ];
        let bad = ScsDgla::new("corrupt", levels, cofaces).unwrap();
        let report = bad.validate();
        assert!(!report.is_clean());
        assert!(report
            .violations()
            .iter()
            .any(|v| v.kind == "cosimplicial-identity"));
    }

    #[test]
    fn non_lie_coface_is_flagged() {
        let sl2 = glie::tests::sl2();
        // e <-> f, h -> h is not a Lie morphism: [e,f] = h but [f,e] = -h.
        let one = rat(1);
        let swap = GLinMap::new(
            &sl2,
            &sl2,
            0,
            vec![vec![(1, one.clone())], vec![(0, one.clone())], vec![(2, one.clone())]],
        )
        .unwrap();
        let id = GLinMap::identity(&sl2);
        let scs = ScsDgla::new("sl2_swap", vec![Arc::clone(&sl2), sl2], vec![vec![swap, id]]).unwrap();
        let report = scs.validate();
        assert!(report.violations().iter().any(|v| v.kind == "coface-lie-morphism"));
    }

    #[test]
    fn tot_differential_squares_to_zero() {
        let scs = abelian_point_cover();
        for i in 0..=scs.max_level() {
            for b in 0..scs.level(i).dim() {
                let x = TotElement::basis(&scs, i, b);
                let ddx = x.tot_differential().unwrap().tot_differential().unwrap();
                assert!(ddx.is_zero(), "d^2 != 0 on level {i} basis {b}");
            }
        }
    }

    #[test]
    fn point_cover_cohomology_is_a_point() {
        let scs = abelian_point_cover();
        let d0 = scs.tot_differential_matrix(0);
        let d1 = scs.tot_differential_matrix(1);
        let dm1 = Mat::zero(scs.tot_degree_basis(0).len(), 0);
        let h0 = Cohomology::new(&dm1, &d0);
        assert_eq!(h0.dim_h(), 1);
        let d2 = Mat::zero(0, scs.tot_degree_basis(2).len());
        let h1 = Cohomology::new(&d0, &d1);
        assert_eq!(h1.dim_h(), 0);
        let h2 = Cohomology::new(&d1, &d2);
        assert_eq!(h2.dim_h(), 0);
    }

    #[test]
    fn extraction_is_compatible_and_sections_integration() {
        let scs = abelian_point_cover();
        let mut sampler = Sampler::new(11);
        for _ in 0..20 {
            let mut tot = TotElement::zero(&scs);
            for i in 0..=scs.max_level() {
                for b in 0..scs.level(i).dim() {
                    tot.components[i].add_term((b, CoeffKey::One), sampler.rat());
                }
            }
            let e = TwElement::dupont_e(&tot).unwrap();
            assert!(e.compatibility_defects().unwrap().is_empty());
            let back = e.dupont_i();
            assert_eq!(back, tot, "I(E(x)) != x");
        }
    }

    #[test]
    fn extraction_is_a_chain_map() {
        let scs = abelian_point_cover();
        let mut sampler = Sampler::new(12);
        for _ in 0..10 {
            let mut tot = TotElement::zero(&scs);
            for i in 0..=scs.max_level() {
                for b in 0..scs.level(i).dim() {
                    tot.components[i].add_term((b, CoeffKey::One), sampler.rat());
                }
            }
            let lhs = TwElement::dupont_e(&tot.tot_differential().unwrap()).unwrap();
            let rhs = TwElement::dupont_e(&tot).unwrap().tw_differential();
            assert_eq!(lhs, rhs, "E d != d E");
        }
    }

    #[test]
    fn contraction_homotopy_identity() {
        let scs = abelian_point_cover();
        let gen = CompatibleSampler::new(&scs).unwrap();
        let mut sampler = Sampler::new(13);
        for round in 0..25 {
            let x = gen.sample(&mut sampler).unwrap();
            assert!(x.compatibility_defects().unwrap().is_empty(), "sample not compatible");
            let ei = TwElement::dupont_e(&x.dupont_i()).unwrap();
            let lhs = ei.sub(&x).unwrap();
            let h = x.dupont_h().unwrap();
            let rhs = h.tw_differential().add(&x.tw_differential().dupont_h().unwrap()).unwrap();
            assert_eq!(lhs, rhs, "EI - id != dh + hd (round {round})");
        }
    }

    #[test]
    fn homotopy_side_structure() {
        let scs = abelian_point_cover();
        let gen = CompatibleSampler::new(&scs).unwrap();
        let mut sampler = Sampler::new(14);
        for _ in 0..10 {
            let x = gen.sample(&mut sampler).unwrap();
            let h = x.dupont_h().unwrap();
            // Integration only sees top-degree parts, and h lowers degree.
            assert!(h.dupont_i().is_zero(), "I h != 0");
            // I is a chain map on compatible elements.
            let lhs = x.tw_differential().dupont_i();
            let rhs = x.dupont_i().tot_differential().unwrap();
            assert_eq!(lhs, rhs, "I d != d I");
        }
    }

    #[test]
    fn homotopy_annihilates_extractions() {
        let scs = abelian_point_cover();
        let mut sampler = Sampler::new(15);
        for _ in 0..10 {
            let mut tot = TotElement::zero(&scs);
            for i in 0..=scs.max_level() {
                for b in 0..scs.level(i).dim() {
                    tot.components[i].add_term((b, CoeffKey::One), sampler.rat());
                }
            }
            let e = TwElement::dupont_e(&tot).unwrap();
            assert!(e.dupont_h().unwrap().is_zero(), "h E != 0");
        }
    }

    #[test]
    fn positive_truncation_zeroes_level_zero() {
        let scs = abelian_point_cover();
        let pos = scs.positive_truncation().unwrap();
        assert_eq!(pos.level(0).dim(), 0);
        assert_eq!(pos.level(1).dim(), 3);
        assert!(pos.validate().is_clean());
        // Degree-0 part of the truncated totalization is empty.
        assert!(pos.tot_degree_basis(0).is_empty());
        assert_eq!(pos.tot_degree_basis(1).len(), 3);
    }

    #[test]
    fn morphism_validation_and_application() {
        let scs = abelian_point_cover();
        // Scaling every level by 2 commutes with everything (abelian).
        let maps: Vec<GLinMap> = (0..=scs.max_level())
            .map(|i| {
                let g = scs.level(i);
                GLinMap::new(
                    g,
                    g,
                    0,
                    (0..g.dim()).map(|b| vec![(b, rat(2))]).collect(),
                )
                .unwrap()
            })
            .collect();
        let m = ScsMorphism::new("double", &scs, &scs, maps).unwrap();
        assert!(m.validate().is_clean());
        let x = TotElement::basis(&scs, 1, 2);
        let y = m.apply_tot(&x).unwrap();
        assert_eq!(y.components[1].support().next().unwrap().1, &rat(2));
        // Naturality: apply then differentiate = differentiate then apply.
        let lhs = m.apply_tot(&x.tot_differential().unwrap()).unwrap();
        let rhs = m.apply_tot(&x).unwrap().tot_differential().unwrap();
        assert_eq!(lhs, rhs);
    }
}
