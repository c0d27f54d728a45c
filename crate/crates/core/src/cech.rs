//! Cech semicosimplicial DGLAs from finite cover nerves: presheaves of Lie
//! algebras indexed by subsets of opens, the induced tower of product DGLAs
//! with deletion cofaces, tangent and obstruction spaces of the total
//! complex, and obstruction naturality under a morphism of presheaves.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::Zero;

use crate::artin::ArtinLocalAlgebra;
use crate::deform::{mc_residual_linfty, mc_solve_order_by_order};
use crate::error::{Error, Result};
use crate::glie::{CoeffKey, Dgla, GLinMap};
use crate::linalg::Cohomology;
use crate::rational::Rat;
use crate::report::{Report, Violation};
use crate::scs::{ScsDgla, ScsMorphism, TotElement};
use crate::transfer::TransferEngine;

/// Renders a subset of opens as its comma-separated 1-based indices.
pub fn subset_label(key: &[usize]) -> String {
    key.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn normalize_key(key: &[usize], k: usize, context: &str) -> Result<Vec<usize>> {
    if key.is_empty() {
        return Err(Error::Malformed(format!("{context}: empty subset key")));
    }
    let mut out = key.to_vec();
    out.sort_unstable();
    for w in out.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Malformed(format!(
                "{context}: repeated open in subset {}",
                subset_label(key)
            )));
        }
    }
    if out[0] < 1 || out[out.len() - 1] > k {
        return Err(Error::Malformed(format!(
            "{context}: subset {} falls outside 1..={k}",
            subset_label(key)
        )));
    }
    Ok(out)
}

/// All strictly ascending `size`-subsets of `1..=k`, lexicographic.
fn subsets_of_size(k: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(k: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for j in start..=k {
            cur.push(j);
            rec(k, size, j + 1, cur, out);
            cur.pop();
        }
    }
    if size >= 1 && size <= k {
        rec(k, size, 1, &mut cur, &mut out);
    }
    out
}

/// A presheaf of Lie algebras on the nerve of a finite cover. Subsets with
/// empty intersection are simply absent; every subset of a present subset
/// must itself be present. Restrictions are stored for one-step inclusions
/// and composed on demand.
#[derive(Debug)]
pub struct CoverNerve {
    pub name: String,
    opens: Vec<String>,
    algebras: BTreeMap<Vec<usize>, Arc<Dgla>>,
    restrictions: BTreeMap<(Vec<usize>, Vec<usize>), GLinMap>,
}

impl CoverNerve {
    pub fn new(
        name: &str,
        opens: Vec<String>,
        algebras: Vec<(Vec<usize>, Arc<Dgla>)>,
        restrictions: Vec<(Vec<usize>, Vec<usize>, GLinMap)>,
    ) -> Result<CoverNerve> {
        if opens.is_empty() {
            return Err(Error::Malformed(format!("nerve '{name}': no opens")));
        }
        let distinct: BTreeSet<&String> = opens.iter().collect();
        if distinct.len() != opens.len() {
            return Err(Error::Malformed(format!("nerve '{name}': duplicate open names")));
        }
        let k = opens.len();
        let mut algebra_map = BTreeMap::new();
        for (key, g) in algebras {
            let key = normalize_key(&key, k, &format!("nerve '{name}'"))?;
            if algebra_map.insert(key.clone(), g).is_some() {
                return Err(Error::Malformed(format!(
                    "nerve '{name}': subset {} declared twice",
                    subset_label(&key)
                )));
            }
        }
        if algebra_map.is_empty() {
            return Err(Error::Malformed(format!("nerve '{name}': no subsets present")));
        }
        // presence is closed under shrinking the subset
        for key in algebra_map.keys() {
            if key.len() < 2 {
                continue;
            }
            for drop in 0..key.len() {
                let mut sub = key.clone();
                sub.remove(drop);
                if !algebra_map.contains_key(&sub) {
                    return Err(Error::Malformed(format!(
                        "nerve '{name}': subset {} is present but {} is not",
                        subset_label(key),
                        subset_label(&sub)
                    )));
                }
            }
        }
        let mut restriction_map = BTreeMap::new();
        for (src, tgt, map) in restrictions {
            let src = normalize_key(&src, k, &format!("nerve '{name}'"))?;
            let tgt = normalize_key(&tgt, k, &format!("nerve '{name}'"))?;
            if tgt.len() != src.len() + 1 || !src.iter().all(|i| tgt.contains(i)) {
                return Err(Error::Malformed(format!(
                    "nerve '{name}': restriction {} -> {} is not a one-step inclusion",
                    subset_label(&src),
                    subset_label(&tgt)
                )));
            }
            let (ga, gb) = match (algebra_map.get(&src), algebra_map.get(&tgt)) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Malformed(format!(
                        "nerve '{name}': restriction {} -> {} references an absent subset",
                        subset_label(&src),
                        subset_label(&tgt)
                    )))
                }
            };
            if map.source.name != ga.name || map.target.name != gb.name || map.degree != 0 {
                return Err(Error::Malformed(format!(
                    "nerve '{name}': restriction {} -> {} has mismatched endpoints",
                    subset_label(&src),
                    subset_label(&tgt)
                )));
            }
            if restriction_map.insert((src.clone(), tgt.clone()), map).is_some() {
                return Err(Error::Malformed(format!(
                    "nerve '{name}': restriction {} -> {} declared twice",
                    subset_label(&src),
                    subset_label(&tgt)
                )));
            }
        }
        // every one-step inclusion of present subsets carries exactly one map
        for tgt in algebra_map.keys() {
            if tgt.len() < 2 {
                continue;
            }
            for drop in 0..tgt.len() {
                let mut src = tgt.clone();
                src.remove(drop);
                if !restriction_map.contains_key(&(src.clone(), tgt.clone())) {
                    return Err(Error::Malformed(format!(
                        "nerve '{name}': missing restriction {} -> {}",
                        subset_label(&src),
                        subset_label(tgt)
                    )));
                }
            }
        }
        Ok(CoverNerve {
            name: name.to_string(),
            opens,
            algebras: algebra_map,
            restrictions: restriction_map,
        })
    }

    /// Constant presheaf shorthand: the same Lie algebra on every present
    /// subset, all restrictions the identity.
    pub fn constant(
        name: &str,
        opens: Vec<String>,
        present: &[Vec<usize>],
        g: &Arc<Dgla>,
    ) -> Result<CoverNerve> {
        let k = opens.len();
        let mut keys = Vec::new();
        for key in present {
            keys.push(normalize_key(key, k, &format!("nerve '{name}'"))?);
        }
        let algebras = keys.iter().map(|key| (key.clone(), Arc::clone(g))).collect();
        let mut restrictions = Vec::new();
        let key_set: BTreeSet<&Vec<usize>> = keys.iter().collect();
        for tgt in &keys {
            if tgt.len() < 2 {
                continue;
            }
            for drop in 0..tgt.len() {
                let mut src = tgt.clone();
                src.remove(drop);
                if key_set.contains(&src) {
                    restrictions.push((src, tgt.clone(), GLinMap::identity(g)));
                }
            }
        }
        CoverNerve::new(name, opens, algebras, restrictions)
    }

    /// Constant presheaf on the full nerve: every nonempty subset present.
    pub fn constant_full(name: &str, opens: Vec<String>, g: &Arc<Dgla>) -> Result<CoverNerve> {
        let k = opens.len();
        let mut present = Vec::new();
        for size in 1..=k {
            present.extend(subsets_of_size(k, size));
        }
        CoverNerve::constant(name, opens, &present, g)
    }

    pub fn opens(&self) -> &[String] {
        &self.opens
    }

    pub fn is_present(&self, key: &[usize]) -> bool {
        self.algebras.contains_key(key)
    }

    pub fn algebra(&self, key: &[usize]) -> Option<&Arc<Dgla>> {
        self.algebras.get(key)
    }

    pub fn restriction(&self, src: &[usize], tgt: &[usize]) -> Option<&GLinMap> {
        self.restrictions.get(&(src.to_vec(), tgt.to_vec()))
    }

    /// Largest cardinality among present subsets.
    pub fn max_subset_size(&self) -> usize {
        self.algebras.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Present subsets of the given cardinality, lexicographic.
    pub fn present_subsets(&self, size: usize) -> Vec<Vec<usize>> {
        subsets_of_size(self.opens.len(), size)
            .into_iter()
            .filter(|s| self.algebras.contains_key(s))
            .collect()
    }

    /// Presheaf validation: restrictions are morphisms of DGLAs and all
    /// composition squares commute.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();
        for ((src, tgt), map) in &self.restrictions {
            let label = format!("{}: {} -> {}", self.name, subset_label(src), subset_label(tgt));
            if !map.is_chain_map() {
                report.push(Violation::new("restriction-chain", &label, "does not commute with d"));
            }
            if !map.is_lie_morphism() {
                report.push(Violation::new(
                    "restriction-lie",
                    &label,
                    "does not preserve the bracket",
                ));
            }
        }
        for key in self.algebras.keys() {
            for (j_pos, &j) in key.iter().enumerate() {
                for (l_pos, &l) in key.iter().enumerate().skip(j_pos + 1) {
                    // both orders of inserting j and l back must agree
                    let mut base = key.clone();
                    base.remove(l_pos);
                    base.remove(j_pos);
                    if base.is_empty() {
                        continue;
                    }
                    let mut with_j = base.clone();
                    with_j.insert(with_j.binary_search(&j).unwrap_err(), j);
                    let mut with_l = base.clone();
                    with_l.insert(with_l.binary_search(&l).unwrap_err(), l);
                    let via_j = self.restrictions[&(with_j.clone(), key.clone())]
                        .compose(&self.restrictions[&(base.clone(), with_j.clone())])
                        .expect("endpoints were checked at construction");
                    let via_l = self.restrictions[&(with_l.clone(), key.clone())]
                        .compose(&self.restrictions[&(base.clone(), with_l.clone())])
                        .expect("endpoints were checked at construction");
                    let base_algebra = &self.algebras[&base];
                    for b in 0..base_algebra.dim() {
                        let x = crate::glie::GElement::basis(base_algebra, b);
                        let lhs = via_j.apply(&x).expect("basis element of the declared source");
                        let rhs = via_l.apply(&x).expect("basis element of the declared source");
                        if lhs != rhs {
                            report.push(Violation::new(
                                "restriction-square",
                                &format!("{}: {}", self.name, subset_label(key)),
                                format!(
                                    "restrictions from {} disagree on '{}'",
                                    subset_label(&base),
                                    base_algebra.basis_name(b)
                                ),
                            ));
                            break;
                        }
                    }
                }
            }
        }
        report
    }
}

/// Layout of one level of the Cech tower: present subsets with the offset
/// of their component in the product basis.
fn level_layout(nerve: &CoverNerve, n: usize) -> Vec<(Vec<usize>, Arc<Dgla>, usize)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for key in nerve.present_subsets(n + 1) {
        let g = Arc::clone(&nerve.algebras[&key]);
        let dim = g.dim();
        out.push((key, g, offset));
        offset += dim;
    }
    out
}

fn product_dgla(name: &str, layout: &[(Vec<usize>, Arc<Dgla>, usize)]) -> Result<Arc<Dgla>> {
    let mut basis = Vec::new();
    let mut diff = Vec::new();
    let mut brackets = Vec::new();
    for (key, g, _) in layout {
        let label = subset_label(key);
        let local = |b: usize| format!("{}@{label}", g.basis_name(b));
        for b in 0..g.dim() {
            basis.push((local(b), g.basis_degree(b)));
            let db: Vec<(String, Rat)> =
                g.diff_basis(b).iter().map(|(i, c)| (local(*i), c.clone())).collect();
            if !db.is_empty() {
                diff.push((local(b), db));
            }
        }
        for i in 0..g.dim() {
            for j in i..g.dim() {
                let entry: Vec<(String, Rat)> = g
                    .bracket_basis(i, j)
                    .into_iter()
                    .map(|(t, c)| (local(t), c))
                    .collect();
                if !entry.is_empty() {
                    brackets.push((local(i), local(j), entry));
                }
            }
        }
    }
    Dgla::new(name, basis, diff, brackets)
}

/// Builds the Cech semicosimplicial DGLA of a cover nerve: level `n` is the
/// product over present `(n+1)`-subsets, and the coface `(k, n)` deletes the
/// k-th index of the target subset and restricts.
pub fn build_cech_scs(nerve: &CoverNerve) -> Result<Arc<ScsDgla>> {
    let depth = nerve.max_subset_size();
    let layouts: Vec<_> = (0..depth).map(|n| level_layout(nerve, n)).collect();
    let mut levels = Vec::with_capacity(depth);
    for (n, layout) in layouts.iter().enumerate() {
        levels.push(product_dgla(&format!("{}:level{n}", nerve.name), layout)?);
    }
    let mut cofaces = Vec::new();
    for i in 1..depth {
        let source_layout = &layouts[i - 1];
        let offsets: BTreeMap<&Vec<usize>, (usize, usize)> = source_layout
            .iter()
            .map(|(key, g, off)| (key, (*off, g.dim())))
            .collect();
        let source_dim: usize = source_layout.iter().map(|(_, g, _)| g.dim()).sum();
        let mut family = Vec::with_capacity(i + 1);
        for k in 0..=i {
            let mut cols: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); source_dim];
            for (tgt, _, tgt_off) in &layouts[i] {
                let mut src = tgt.clone();
                src.remove(k);
                let (src_off, src_dim) = offsets[&src];
                let map = &nerve.restrictions[&(src.clone(), tgt.clone())];
                for b in 0..src_dim {
                    for (img, c) in map.column(b) {
                        cols[src_off + b].push((tgt_off + img, c.clone()));
                    }
                }
            }
            for col in &mut cols {
                col.sort_by_key(|(i, _)| *i);
            }
            family.push(GLinMap::new(&levels[i - 1], &levels[i], 0, cols)?);
        }
        cofaces.push(family);
    }
    ScsDgla::new(&nerve.name, levels, cofaces)
}

/// Representatives of H^1 and H^2 of the total complex over the rationals,
/// computed by exact elimination: the tangent space of the associated
/// deformation problem and the space containing its obstructions.
pub fn tangent_obstruction_spaces(scs: &Arc<ScsDgla>) -> (Vec<TotElement>, Vec<TotElement>) {
    let mut out = Vec::new();
    for degree in [1i64, 2i64] {
        let basis = scs.tot_degree_basis(degree);
        let d_in = scs.tot_differential_matrix(degree - 1);
        let d_out = scs.tot_differential_matrix(degree);
        let h = Cohomology::new(&d_in, &d_out);
        out.push(
            h.representatives()
                .iter()
                .map(|v| TotElement::from_dense(scs, &basis, v))
                .collect::<Vec<_>>(),
        );
    }
    let h2 = out.pop().expect("two degrees were pushed");
    let h1 = out.pop().expect("two degrees were pushed");
    (h1, h2)
}

/// A morphism of presheaves of Lie algebras over a common cover shape: one
/// Lie morphism per present subset, commuting with restrictions. Source and
/// target must present the same subsets.
#[derive(Debug)]
pub struct LieSheafMorphism {
    pub name: String,
    pub source: Arc<CoverNerve>,
    pub target: Arc<CoverNerve>,
    maps: BTreeMap<Vec<usize>, GLinMap>,
}

impl LieSheafMorphism {
    pub fn new(
        name: &str,
        source: &Arc<CoverNerve>,
        target: &Arc<CoverNerve>,
        maps: Vec<(Vec<usize>, GLinMap)>,
    ) -> Result<LieSheafMorphism> {
        if source.opens.len() != target.opens.len() {
            return Err(Error::Malformed(format!(
                "morphism '{name}': covers have different numbers of opens"
            )));
        }
        let source_keys: BTreeSet<&Vec<usize>> = source.algebras.keys().collect();
        let target_keys: BTreeSet<&Vec<usize>> = target.algebras.keys().collect();
        if source_keys != target_keys {
            return Err(Error::Malformed(format!(
                "morphism '{name}': covers present different subsets"
            )));
        }
        let k = source.opens.len();
        let mut map_table = BTreeMap::new();
        for (key, map) in maps {
            let key = normalize_key(&key, k, &format!("morphism '{name}'"))?;
            let (ga, gb) = match (source.algebras.get(&key), target.algebras.get(&key)) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Malformed(format!(
                        "morphism '{name}': subset {} is not present",
                        subset_label(&key)
                    )))
                }
            };
            if map.source.name != ga.name || map.target.name != gb.name || map.degree != 0 {
                return Err(Error::Malformed(format!(
                    "morphism '{name}': component {} has mismatched endpoints",
                    subset_label(&key)
                )));
            }
            if map_table.insert(key.clone(), map).is_some() {
                return Err(Error::Malformed(format!(
                    "morphism '{name}': component {} declared twice",
                    subset_label(&key)
                )));
            }
        }
        for key in source.algebras.keys() {
            if !map_table.contains_key(key) {
                return Err(Error::Malformed(format!(
                    "morphism '{name}': missing component {}",
                    subset_label(key)
                )));
            }
        }
        Ok(LieSheafMorphism {
            name: name.to_string(),
            source: Arc::clone(source),
            target: Arc::clone(target),
            maps: map_table,
        })
    }

    pub fn component(&self, key: &[usize]) -> Option<&GLinMap> {
        self.maps.get(key)
    }

    /// Per-subset morphism properties and the commuting squares against all
    /// one-step restrictions.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();
        for (key, map) in &self.maps {
            let label = format!("{}: {}", self.name, subset_label(key));
            if !map.is_chain_map() {
                report.push(Violation::new("sheaf-morphism-chain", &label, "does not commute with d"));
            }
            if !map.is_lie_morphism() {
                report.push(Violation::new(
                    "sheaf-morphism-lie",
                    &label,
                    "does not preserve the bracket",
                ));
            }
        }
        for ((src, tgt), r1) in &self.source.restrictions {
            let r2 = &self.target.restrictions[&(src.clone(), tgt.clone())];
            let top = self.maps[tgt].compose(r1).expect("endpoints were checked at construction");
            let bottom = r2.compose(&self.maps[src]).expect("endpoints were checked at construction");
            let g = &self.source.algebras[src];
            for b in 0..g.dim() {
                let x = crate::glie::GElement::basis(g, b);
                let lhs = top.apply(&x).expect("basis element of the declared source");
                let rhs = bottom.apply(&x).expect("basis element of the declared source");
                if lhs != rhs {
                    report.push(Violation::new(
                        "sheaf-morphism-square",
                        &format!("{}: {} -> {}", self.name, subset_label(src), subset_label(tgt)),
                        format!("square does not commute on '{}'", g.basis_name(b)),
                    ));
                    break;
                }
            }
        }
        report
    }

    /// The induced morphism of Cech towers, block diagonal on each level.
    /// The two towers must have been built from this morphism's nerves.
    pub fn induced(
        &self,
        source_scs: &Arc<ScsDgla>,
        target_scs: &Arc<ScsDgla>,
    ) -> Result<ScsMorphism> {
        let depth = self.source.max_subset_size();
        for (scs, nerve) in [(source_scs, &self.source), (target_scs, &self.target)] {
            if scs.max_level() + 1 != depth {
                return Err(Error::Malformed(format!(
                    "morphism '{}': tower '{}' does not match the nerve depth",
                    self.name, scs.name
                )));
            }
            for n in 0..depth {
                let layout = level_layout(nerve, n);
                let dim: usize = layout.iter().map(|(_, g, _)| g.dim()).sum();
                if scs.level(n).dim() != dim {
                    return Err(Error::Malformed(format!(
                        "morphism '{}': tower '{}' level {n} does not match the nerve",
                        self.name, scs.name
                    )));
                }
            }
        }
        let mut level_maps = Vec::with_capacity(depth);
        for n in 0..depth {
            let src_layout = level_layout(&self.source, n);
            let tgt_layout = level_layout(&self.target, n);
            let src_dim: usize = src_layout.iter().map(|(_, g, _)| g.dim()).sum();
            let mut cols: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); src_dim];
            for ((key, g, src_off), (_, _, tgt_off)) in src_layout.iter().zip(tgt_layout.iter()) {
                let map = &self.maps[key];
                for b in 0..g.dim() {
                    for (img, c) in map.column(b) {
                        cols[src_off + b].push((tgt_off + img, c.clone()));
                    }
                }
            }
            for col in &mut cols {
                col.sort_by_key(|(i, _)| *i);
            }
            level_maps.push(GLinMap::new(source_scs.level(n), target_scs.level(n), 0, cols)?);
        }
        ScsMorphism::new(&self.name, source_scs, target_scs, level_maps)
    }
}

/// Checks that obstructions push forward along a morphism of towers: the
/// image of a stalled lift has matching residual, and the obstruction class
/// of the pushed problem at the same filtration layer is the image of the
/// source obstruction class.
pub fn obstruction_naturality_check(
    phi: &ScsMorphism,
    algebra: &Arc<ArtinLocalAlgebra>,
    seed: &TotElement,
) -> Result<Report> {
    let mut report = Report::new();
    let name = phi.name.clone();
    let engine1 = TransferEngine::new(&phi.source);
    let engine2 = TransferEngine::new(&phi.target);
    let outcome1 = mc_solve_order_by_order(&engine1, algebra, seed)?;
    let seed2 = phi.apply_tot(seed)?;
    if !seed2.tot_differential()?.is_zero() {
        report.push(Violation::new(
            "naturality-seed",
            &name,
            "the pushed seed is not closed at first order",
        ));
        return Ok(report);
    }
    let outcome2 = mc_solve_order_by_order(&engine2, algebra, &seed2)?;
    match &outcome1.solution {
        Some(x) => {
            report.note(format!("{name}: source problem lifts to the full order"));
            let y = phi.apply_tot(x)?;
            if !mc_residual_linfty(&engine2, &y, algebra)?.is_zero() {
                report.push(Violation::new(
                    "naturality-mc",
                    &name,
                    "the image of a Maurer-Cartan solution fails the target equation",
                ));
            }
            if outcome2.solution.is_none() {
                report.push(Violation::new(
                    "obstruction-naturality",
                    &name,
                    "the target solver reports an obstruction although the pushed solution lifts",
                ));
            } else {
                report.note(format!("{name}: target problem lifts to the full order"));
            }
        }
        None => {
            let layer = outcome1.obstructions[0].layer;
            report.note(format!(
                "{name}: source problem obstructed at layer {layer} in {} component(s)",
                outcome1.obstructions.len()
            ));
            let partial = outcome1
                .partial
                .as_ref()
                .expect("an obstructed outcome carries its stalled lift");
            let r1 = mc_residual_linfty(&engine1, partial, algebra)?;
            let p2 = phi.apply_tot(partial)?;
            let r2 = mc_residual_linfty(&engine2, &p2, algebra)?;
            if phi.apply_tot(&r1)? != r2 {
                report.push(Violation::new(
                    "residual-naturality",
                    &name,
                    "the pushed residual differs from the residual of the pushed lift",
                ));
            }
            let basis2 = phi.target.tot_degree_basis(2);
            let d1 = phi.target.tot_differential_matrix(1);
            let d2 = phi.target.tot_differential_matrix(2);
            let h2 = Cohomology::new(&d1, &d2);
            let mut pushed: BTreeMap<usize, Vec<Rat>> = BTreeMap::new();
            for (key, part) in r1.split_by_key() {
                let mono = match key {
                    CoeffKey::Mono(m) if algebra.monomial_filtration(m) == layer => m,
                    _ => continue,
                };
                let w = phi.apply_tot(&part)?.to_dense(&basis2)?;
                if !h2.is_cocycle(&w) {
                    report.push(Violation::new(
                        "naturality-cocycle",
                        &name,
                        format!(
                            "pushed residual at '{}' is not closed",
                            algebra.monomial_names()[mono]
                        ),
                    ));
                    continue;
                }
                pushed.insert(mono, h2.class_of(&w)?);
            }
            let mut direct: BTreeMap<usize, Vec<Rat>> = BTreeMap::new();
            for (key, part) in r2.split_by_key() {
                let mono = match key {
                    CoeffKey::Mono(m) if algebra.monomial_filtration(m) == layer => m,
                    _ => continue,
                };
                let w = part.to_dense(&basis2)?;
                if !h2.is_cocycle(&w) {
                    continue;
                }
                direct.insert(mono, h2.class_of(&w)?);
            }
            let monos: BTreeSet<usize> = pushed.keys().chain(direct.keys()).copied().collect();
            let zero_class = vec![Rat::zero(); h2.dim_h()];
            let mut vanishing = true;
            for mono in monos {
                let a = pushed.get(&mono).unwrap_or(&zero_class);
                let b = direct.get(&mono).unwrap_or(&zero_class);
                if a != b {
                    report.push(Violation::new(
                        "obstruction-naturality",
                        &name,
                        format!(
                            "pushed class at '{}' differs from the target obstruction",
                            algebra.monomial_names()[mono]
                        ),
                    ));
                }
                if a.iter().any(|c| !c.is_zero()) {
                    vanishing = false;
                }
            }
            if vanishing {
                report.note(format!("{name}: every pushed obstruction class vanishes"));
            }
            match outcome2.solution {
                Some(_) => report.note(format!("{name}: target problem lifts to the full order")),
                None => report.note(format!(
                    "{name}: target problem obstructed at layer {}",
                    outcome2.obstructions[0].layer
                )),
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
pub mod tests {
    use super::*;
    use crate::glie::tests::sl2;
    use crate::glie::GElement;
    use crate::rational::rat;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn two_opens_constant_nerve_builds_the_pair_tower() {
        let g = sl2();
        let nerve = CoverNerve::constant_full("pair", names(&["U", "V"]), &g).unwrap();
        assert!(nerve.validate().is_clean());
        let scs = build_cech_scs(&nerve).unwrap();
        assert_eq!(scs.max_level(), 1);
        assert_eq!(scs.level(0).dim(), 6);
        assert_eq!(scs.level(1).dim(), 3);
        assert_eq!(scs.level(0).basis_name(0), "e@1");
        assert_eq!(scs.level(0).basis_name(3), "e@2");
        assert_eq!(scs.level(1).basis_name(2), "h@1,2");
        assert!(scs.validate().is_clean());
        // the 0th coface deletes index 0 of {1,2} and restricts from {2}
        let e2 = GElement::basis(scs.level(0), 3);
        let img = scs.coface(0, 1).apply(&e2).unwrap();
        assert_eq!(img, GElement::basis(scs.level(1), 0));
        let e1 = GElement::basis(scs.level(0), 0);
        let img = scs.coface(1, 1).apply(&e1).unwrap();
        assert_eq!(img, GElement::basis(scs.level(1), 0));
        assert!(scs.coface(0, 1).apply(&e1).unwrap().is_zero());
    }

    #[test]
    fn three_opens_constant_nerve_has_the_expected_dimensions() {
        let g = sl2();
        let nerve = CoverNerve::constant_full("triple", names(&["A", "B", "C"]), &g).unwrap();
        let scs = build_cech_scs(&nerve).unwrap();
        assert_eq!(scs.max_level(), 2);
        assert_eq!(scs.level(0).dim(), 9);
        assert_eq!(scs.level(1).dim(), 9);
        assert_eq!(scs.level(2).dim(), 3);
        assert!(scs.validate().is_clean());
        assert!(nerve.validate().is_clean());
    }

    #[test]
    fn contractible_nerve_has_no_tangent_or_obstruction_space() {
        let g = sl2();
        let nerve = CoverNerve::constant_full("full", names(&["A", "B", "C"]), &g).unwrap();
        let scs = build_cech_scs(&nerve).unwrap();
        let (h1, h2) = tangent_obstruction_spaces(&scs);
        assert!(h1.is_empty());
        assert!(h2.is_empty());
    }

    #[test]
    fn circle_nerve_of_an_abelian_presheaf_has_a_tangent_line() {
        let line = crate::glie::Dgla::new("q", vec![("u".into(), 0)], Vec::new(), Vec::new()).unwrap();
        let present =
            vec![vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3], vec![2, 3]];
        let nerve =
            CoverNerve::constant("circle", names(&["A", "B", "C"]), &present, &line).unwrap();
        assert!(nerve.validate().is_clean());
        let scs = build_cech_scs(&nerve).unwrap();
        // the triple overlap is absent, so the tower stops at level 1
        assert_eq!(scs.max_level(), 1);
        let (h1, h2) = tangent_obstruction_spaces(&scs);
        assert_eq!(h1.len(), 1);
        assert!(h2.is_empty());
    }

    #[test]
    fn one_open_has_trivial_cohomology() {
        let g = sl2();
        let nerve = CoverNerve::constant_full("single", names(&["X"]), &g).unwrap();
        let scs = build_cech_scs(&nerve).unwrap();
        assert_eq!(scs.max_level(), 0);
        let (h1, h2) = tangent_obstruction_spaces(&scs);
        assert!(h1.is_empty());
        assert!(h2.is_empty());
    }

    #[test]
    fn presence_gaps_and_missing_restrictions_are_rejected() {
        let g = sl2();
        // pair {1,2} present without the singleton {2}
        let err = CoverNerve::new(
            "gap",
            names(&["U", "V"]),
            vec![(vec![1], Arc::clone(&g)), (vec![1, 2], Arc::clone(&g))],
            Vec::new(),
        );
        assert!(matches!(err, Err(Error::Malformed(_))));
        // both singletons present but no restriction to the pair
        let err = CoverNerve::new(
            "missing",
            names(&["U", "V"]),
            vec![
                (vec![1], Arc::clone(&g)),
                (vec![2], Arc::clone(&g)),
                (vec![1, 2], Arc::clone(&g)),
            ],
            Vec::new(),
        );
        assert!(matches!(err, Err(Error::Malformed(_))));
    }

    #[test]
    fn broken_restriction_square_is_reported() {
        let g = sl2();
        let mut restrictions = Vec::new();
        let full: Vec<Vec<usize>> = vec![vec![1], vec![2], vec![1, 2]];
        for tgt in &full {
            if tgt.len() < 2 {
                continue;
            }
            for drop in 0..tgt.len() {
                let mut src = tgt.clone();
                src.remove(drop);
                restrictions.push((src, tgt.clone(), GLinMap::identity(&g)));
            }
        }
        // a non-morphism restriction: swap e and f without adjusting h
        let swap = GLinMap::new(
            &g,
            &g,
            0,
            vec![vec![(1, rat(1))], vec![(0, rat(1))], vec![(2, rat(1))]],
        )
        .unwrap();
        restrictions[0].2 = swap;
        let nerve = CoverNerve::new(
            "broken",
            names(&["U", "V"]),
            vec![
                (vec![1], Arc::clone(&g)),
                (vec![2], Arc::clone(&g)),
                (vec![1, 2], Arc::clone(&g)),
            ],
            restrictions,
        )
        .unwrap();
        let report = nerve.validate();
        assert!(!report.is_clean());
        assert!(report.violations().iter().any(|v| v.kind == "restriction-lie"));
    }

    #[test]
    fn identity_morphism_pushes_obstructions_to_themselves() {
        use crate::corpus::truncated_polynomial_ring;
        use crate::glie::{CoeffKey, CoeffRing};

        let g = sl2();
        let nerve = Arc::new(
            CoverNerve::constant_full("id-src", names(&["A", "B", "C"]), &g).unwrap(),
        );
        let target = Arc::new(
            CoverNerve::constant_full("id-tgt", names(&["A", "B", "C"]), &g).unwrap(),
        );
        let keys: Vec<Vec<usize>> = vec![
            vec![1],
            vec![2],
            vec![3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3],
            vec![1, 2, 3],
        ];
        let maps = keys.iter().map(|k| (k.clone(), GLinMap::identity(&g))).collect();
        let phi = LieSheafMorphism::new("id", &nerve, &target, maps).unwrap();
        assert!(phi.validate().is_clean());
        let scs1 = build_cech_scs(&nerve).unwrap();
        let scs2 = build_cech_scs(&target).unwrap();
        let induced = phi.induced(&scs1, &scs2).unwrap();
        assert!(induced.validate().is_clean());

        let algebra = truncated_polynomial_ring(3).unwrap();
        let ring = CoeffRing::Artin(Arc::clone(&algebra));
        let t = CoeffKey::Mono(algebra.monomial_index("t").unwrap());
        // a closed first-order seed: the Cech differential of a level-0 basis
        // vector is a coboundary, hence closed
        let a = GElement::basis(scs1.level(0), 0);
        let m = scs1.coface_alternating(1, &a).unwrap();
        let seed = TotElement::from_component(&scs1, 1, m)
            .unwrap()
            .tensor_key(t, &ring)
            .unwrap();
        let report = obstruction_naturality_check(&induced, &algebra, &seed).unwrap();
        assert!(report.is_clean(), "{}", report.render_text());
    }
}
