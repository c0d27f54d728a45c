//! Homotopy transfer of the Thom-Whitney bracket onto the total complex.
//!
//! The contraction `(E, I, h)` induces a sequence of graded-symmetric
//! brackets on the shifted total complex, one per arity, given by sums
//! over rooted binary trees: leaves apply `E`, internal edges apply the
//! homotopy `h` after the wedge-bracket, and the root applies `I`. Each
//! unordered tree class enters with weight `1/|Aut|` after symmetrizing
//! the inputs over positions.
//!
//! Degree bookkeeping happens on the shifted complex: an element of the
//! total complex in degree `d` has shifted degree `d - 1`, the arity-1
//! bracket is the total differential, and the arity-2 bracket is
//! `(u, v) -> (-1)^{shifted |u|} I [E u, E v]`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::glie::CoeffKey;
use crate::rational::{rat, Rat};
use crate::report::{Report, Violation};
use crate::scs::{ScsDgla, TotElement, TwElement};

/// Rooted binary tree with unordered branches.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TreeShape {
    Leaf,
    Node(Box<TreeShape>, Box<TreeShape>),
}

impl TreeShape {
    /// Canonical node constructor: the smaller branch goes first.
    pub fn node(a: TreeShape, b: TreeShape) -> TreeShape {
        if a <= b {
            TreeShape::Node(Box::new(a), Box::new(b))
        } else {
            TreeShape::Node(Box::new(b), Box::new(a))
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeShape::Leaf => 1,
            TreeShape::Node(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    fn key(&self) -> String {
        match self {
            TreeShape::Leaf => "l".to_string(),
            TreeShape::Node(l, r) => format!("({}{})", l.key(), r.key()),
        }
    }
}

/// Tree class together with the order of its automorphism group.
#[derive(Debug, Clone)]
pub struct DecoratedTree {
    pub shape: TreeShape,
    pub automorphisms: u64,
}

impl DecoratedTree {
    pub fn leaves(&self) -> usize {
        self.shape.leaf_count()
    }
}

fn automorphism_order(shape: &TreeShape) -> u64 {
    match shape {
        TreeShape::Leaf => 1,
        TreeShape::Node(l, r) => {
            let base = automorphism_order(l) * automorphism_order(r);
            if l == r {
                2 * base
            } else {
                base
            }
        }
    }
}

/// All unordered binary tree classes with `n` leaves.
pub fn enumerate_trees(n: usize) -> Result<Vec<DecoratedTree>> {
    if n == 0 {
        return Err(Error::Bound("trees need at least one leaf".into()));
    }
    let mut classes: Vec<Vec<TreeShape>> = vec![Vec::new(); n + 1];
    if n >= 1 {
        classes[1] = vec![TreeShape::Leaf];
    }
    for m in 2..=n {
        let mut out = Vec::new();
        for i in 1..=m / 2 {
            let j = m - i;
            for (a_pos, a) in classes[i].iter().enumerate() {
                for (b_pos, b) in classes[j].iter().enumerate() {
                    if i == j && b_pos < a_pos {
                        continue;
                    }
                    out.push(TreeShape::node(a.clone(), b.clone()));
                }
            }
        }
        out.sort();
        out.dedup();
        classes[m] = out;
    }
    Ok(classes[n]
        .iter()
        .map(|shape| DecoratedTree { automorphisms: automorphism_order(shape), shape: shape.clone() })
        .collect())
}

/// Basis element of the total complex, addressed by level and index.
pub type TotKey = (usize, usize);

/// Transfer engine with persistent caches of rational basis evaluations.
pub struct TransferEngine {
    scs: Arc<ScsDgla>,
    /// Scale applied at every internal homotopy edge; 1 for the genuine
    /// contraction, anything else breaks the higher coherences.
    h_scale: Rat,
    subtree_cache: RefCell<BTreeMap<(String, Vec<TotKey>), TwElement>>,
    root_cache: RefCell<BTreeMap<Vec<TotKey>, TotElement>>,
}

impl TransferEngine {
    pub fn new(scs: &Arc<ScsDgla>) -> Self {
        TransferEngine {
            scs: Arc::clone(scs),
            h_scale: rat(1),
            subtree_cache: RefCell::new(BTreeMap::new()),
            root_cache: RefCell::new(BTreeMap::new()),
        }
    }

    /// Replaces the homotopy by a scalar multiple. Used as a negative
    /// control: the relation checker must fail for any scale other than 1.
    pub fn with_homotopy_scale(mut self, c: Rat) -> Self {
        self.h_scale = c;
        self
    }

    pub fn scs(&self) -> &Arc<ScsDgla> {
        &self.scs
    }

    /// Shifted degree of a basis element of the total complex.
    pub fn shifted_degree(&self, key: TotKey) -> i64 {
        key.0 as i64 + self.scs.level(key.0).basis_degree(key.1) - 1
    }

    fn degrees(&self, tuple: &[TotKey]) -> Vec<i64> {
        tuple.iter().map(|k| self.shifted_degree(*k)).collect()
    }

    /// Sorts a tuple, tracking the Koszul sign of the permutation. `None`
    /// when a repeated entry has odd shifted degree (the value vanishes).
    fn canonical(&self, tuple: &[TotKey]) -> Option<(Vec<TotKey>, bool)> {
        let mut keys = tuple.to_vec();
        let mut degs = self.degrees(tuple);
        let mut negate = false;
        // Insertion sort keeps the sign bookkeeping local to adjacent swaps.
        for i in 1..keys.len() {
            let mut j = i;
            while j > 0 && keys[j - 1] > keys[j] {
                if degs[j - 1].rem_euclid(2) == 1 && degs[j].rem_euclid(2) == 1 {
                    negate = !negate;
                }
                keys.swap(j - 1, j);
                degs.swap(j - 1, j);
                j -= 1;
            }
        }
        for w in keys.windows(2) {
            if w[0] == w[1] && self.shifted_degree(w[0]).rem_euclid(2) == 1 {
                return None;
            }
        }
        Some((keys, negate))
    }

    /// Koszul sign of the unshuffle pulling `subset` (ascending positions)
    /// to the front: each odd entry of the subset crosses the odd
    /// complement entries that originally preceded it.
    fn unshuffle_sign(degs: &[i64], subset: &[usize]) -> bool {
        let mut negate = false;
        for &j in subset {
            if degs[j].rem_euclid(2) == 0 {
                continue;
            }
            let jumps = (0..j)
                .filter(|p| !subset.contains(p) && degs[*p].rem_euclid(2) == 1)
                .count();
            if jumps % 2 == 1 {
                negate = !negate;
            }
        }
        negate
    }

    /// Extraction of a basis element as a Thom-Whitney element.
    fn leaf_value(&self, key: TotKey) -> Result<TwElement> {
        TwElement::dupont_e(&TotElement::basis(&self.scs, key.0, key.1))
    }

    /// Symmetrized tree evaluation capped with the homotopy: leaves apply
    /// the extraction, every node applies the shifted bracket followed
    /// by `h`, summed over order-preserving splits of the input positions.
    fn subtree_value(&self, shape: &TreeShape, tuple: &[TotKey]) -> Result<TwElement> {
        if let TreeShape::Leaf = shape {
            debug_assert_eq!(tuple.len(), 1);
            return self.leaf_value(tuple[0]);
        }
        let Some((sorted, negate)) = self.canonical(tuple) else {
            return Ok(TwElement::zero(&self.scs));
        };
        let cache_key = (shape.key(), sorted.clone());
        let cached = self.subtree_cache.borrow().get(&cache_key).cloned();
        let value = match cached {
            Some(v) => v,
            None => {
                let raw = self.node_sum(shape, &sorted, true)?;
                self.subtree_cache.borrow_mut().insert(cache_key, raw.clone());
                raw
            }
        };
        Ok(if negate { value.scale(&rat(-1)) } else { value })
    }

    /// Sum over position splits at one node. With `cap_h` the bracket is
    /// followed by the homotopy; otherwise the raw bracket is returned for
    /// the root to integrate.
    fn node_sum(&self, shape: &TreeShape, tuple: &[TotKey], cap_h: bool) -> Result<TwElement> {
        let TreeShape::Node(l, r) = shape else {
            return Err(Error::Bound("node evaluation on a leaf".into()));
        };
        let degs = self.degrees(tuple);
        let n = tuple.len();
        let nl = l.leaf_count();
        let mut acc = TwElement::zero(&self.scs);
        for subset in combinations(n, nl) {
            let rest: Vec<usize> = (0..n).filter(|p| !subset.contains(p)).collect();
            let left_tuple: Vec<TotKey> = subset.iter().map(|&p| tuple[p]).collect();
            let right_tuple: Vec<TotKey> = rest.iter().map(|&p| tuple[p]).collect();
            let left = self.subtree_value(l, &left_tuple)?;
            if left.is_zero() {
                continue;
            }
            let right = self.subtree_value(r, &right_tuple)?;
            if right.is_zero() {
                continue;
            }
            let mut negate = Self::unshuffle_sign(&degs, &subset);
            // Shifted-bracket sign (-1)^{|left|} with |left| the sum of the
            // shifted input degrees.
            let wl: i64 = subset.iter().map(|&p| degs[p]).sum();
            if wl.rem_euclid(2) == 1 {
                negate = !negate;
            }
            let prod = left.tw_bracket(&right, &crate::glie::CoeffRing::Rationals)?;
            if prod.is_zero() {
                continue;
            }
            let signed = if negate { prod.scale(&rat(-1)) } else { prod };
            acc = acc.add(&signed)?;
        }
        if cap_h {
            acc = acc.dupont_h()?.scale(&self.h_scale);
        }
        Ok(acc)
    }

    /// Transferred bracket of the given arity on a basis tuple.
    pub fn transferred_bracket_basis(&self, tuple: &[TotKey]) -> Result<TotElement> {
        if tuple.is_empty() {
            return Err(Error::Bound("transferred bracket needs at least one input".into()));
        }
        if tuple.len() == 1 {
            return TotElement::basis(&self.scs, tuple[0].0, tuple[0].1).tot_differential();
        }
        let Some((sorted, negate)) = self.canonical(tuple) else {
            return Ok(TotElement::zero(&self.scs));
        };
        let cached = self.root_cache.borrow().get(&sorted).cloned();
        let value = match cached {
            Some(v) => v,
            None => {
                let mut acc = TotElement::zero(&self.scs);
                for tree in enumerate_trees(sorted.len())? {
                    let raw = self.node_sum(&tree.shape, &sorted, false)?;
                    let weight = rat(1) / rat(tree.automorphisms as i64);
                    acc = acc.add(&raw.dupont_i().scale(&weight))?;
                }
                self.root_cache.borrow_mut().insert(sorted, acc.clone());
                acc
            }
        };
        Ok(if negate { value.scale(&rat(-1)) } else { value })
    }

    /// Transferred bracket on general rational-coefficient elements, by
    /// multilinear expansion over supports.
    pub fn transferred_bracket(&self, inputs: &[TotElement]) -> Result<TotElement> {
        let supports = self.flatten(inputs)?;
        let mut acc = TotElement::zero(&self.scs);
        let mut tuple = vec![(0usize, 0usize); inputs.len()];
        self.expand(&supports, 0, &mut tuple, &rat(1), &mut acc)?;
        Ok(acc)
    }

    fn flatten(&self, inputs: &[TotElement]) -> Result<Vec<Vec<(TotKey, Rat)>>> {
        let mut out = Vec::with_capacity(inputs.len());
        for x in inputs {
            if x.scs.name != self.scs.name {
                return Err(Error::AmbientMismatch(format!(
                    "transfer over '{}' fed an element over '{}'",
                    self.scs.name, x.scs.name
                )));
            }
            let mut support = Vec::new();
            for (i, comp) in x.components.iter().enumerate() {
                for ((b, key), c) in comp.support() {
                    if *key != CoeffKey::One {
                        return Err(Error::Degree(
                            "transfer evaluation expects rational coefficients".into(),
                        ));
                    }
                    support.push(((i, *b), c.clone()));
                }
            }
            out.push(support);
        }
        Ok(out)
    }

    fn expand(
        &self,
        supports: &[Vec<(TotKey, Rat)>],
        pos: usize,
        tuple: &mut Vec<TotKey>,
        coeff: &Rat,
        acc: &mut TotElement,
    ) -> Result<()> {
        if pos == supports.len() {
            let value = self.transferred_bracket_basis(tuple)?;
            *acc = acc.add(&value.scale(coeff))?;
            return Ok(());
        }
        for (key, c) in &supports[pos] {
            tuple[pos] = *key;
            let next = coeff * c;
            self.expand(supports, pos + 1, tuple, &next, acc)?;
        }
        Ok(())
    }

    /// Quasi-isomorphism component of the given arity: the homotopy-capped
    /// tree sum (arity 1 is the plain extraction).
    pub fn einfty_component(&self, inputs: &[TotElement]) -> Result<TwElement> {
        if inputs.is_empty() {
            return Err(Error::Bound("component needs at least one input".into()));
        }
        if inputs.len() == 1 {
            return TwElement::dupont_e(&inputs[0]);
        }
        let supports = self.flatten(inputs)?;
        let mut acc = TwElement::zero(&self.scs);
        let mut tuple = vec![(0usize, 0usize); inputs.len()];
        self.expand_einfty(&supports, 0, &mut tuple, &rat(1), &mut acc)?;
        Ok(acc)
    }

    fn expand_einfty(
        &self,
        supports: &[Vec<(TotKey, Rat)>],
        pos: usize,
        tuple: &mut Vec<TotKey>,
        coeff: &Rat,
        acc: &mut TwElement,
    ) -> Result<()> {
        if pos == supports.len() {
            for tree in enumerate_trees(tuple.len())? {
                let weight = coeff / rat(tree.automorphisms as i64);
                let value = self.subtree_value(&tree.shape, tuple)?;
                *acc = acc.add(&value.scale(&weight))?;
            }
            return Ok(());
        }
        for (key, c) in &supports[pos] {
            tuple[pos] = *key;
            let next = coeff * c;
            self.expand_einfty(supports, pos + 1, tuple, &next, acc)?;
        }
        Ok(())
    }

    /// Symmetrized homotopy-capped evaluation of one tree class on general
    /// inputs (no automorphism weight).
    pub fn evaluate_tree(&self, tree: &DecoratedTree, inputs: &[TotElement]) -> Result<TwElement> {
        if inputs.len() != tree.leaves() {
            return Err(Error::Bound(format!(
                "tree with {} leaves fed {} inputs",
                tree.leaves(),
                inputs.len()
            )));
        }
        let supports = self.flatten(inputs)?;
        let mut acc = TwElement::zero(&self.scs);
        let mut tuple = vec![(0usize, 0usize); inputs.len()];
        self.expand_tree(&tree.shape, &supports, 0, &mut tuple, &rat(1), &mut acc)?;
        Ok(acc)
    }

    fn expand_tree(
        &self,
        shape: &TreeShape,
        supports: &[Vec<(TotKey, Rat)>],
        pos: usize,
        tuple: &mut Vec<TotKey>,
        coeff: &Rat,
        acc: &mut TwElement,
    ) -> Result<()> {
        if pos == supports.len() {
            let value = self.subtree_value(shape, tuple)?;
            *acc = acc.add(&value.scale(coeff))?;
            return Ok(());
        }
        for (key, c) in &supports[pos] {
            tuple[pos] = *key;
            let next = coeff * c;
            self.expand_tree(shape, supports, pos + 1, tuple, &next, acc)?;
        }
        Ok(())
    }

    /// Generalized Jacobi residual of one arity on a basis tuple:
    /// `sum over splits of q(q(front), rest)` with Koszul unshuffle signs.
    pub fn relation_residual(&self, tuple: &[TotKey]) -> Result<TotElement> {
        let n = tuple.len();
        let degs = self.degrees(tuple);
        let mut acc = TotElement::zero(&self.scs);
        for i in 1..=n {
            for subset in combinations(n, i) {
                let negate = Self::unshuffle_sign(&degs, &subset);
                let inner_tuple: Vec<TotKey> = subset.iter().map(|&p| tuple[p]).collect();
                let inner = self.transferred_bracket_basis(&inner_tuple)?;
                if inner.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = (0..n).filter(|p| !subset.contains(p)).collect();
                let mut inputs = Vec::with_capacity(n - i + 1);
                inputs.push(inner);
                for &p in &rest {
                    inputs.push(TotElement::basis(&self.scs, tuple[p].0, tuple[p].1));
                }
                let outer = self.transferred_bracket(&inputs)?;
                let signed = if negate { outer.scale(&rat(-1)) } else { outer };
                acc = acc.add(&signed)?;
            }
        }
        Ok(acc)
    }

    /// Checks the generalized Jacobi identities on every basis tuple of
    /// each arity up to the bound.
    pub fn check_linfty_relations(&self, max_arity: usize) -> Result<Report> {
        let mut report = Report::new();
        let basis: Vec<TotKey> = (0..=self.scs.max_level())
            .flat_map(|i| (0..self.scs.level(i).dim()).map(move |b| (i, b)))
            .collect();
        for arity in 1..=max_arity {
            let mut checked = 0usize;
            for tuple in multisets(&basis, arity) {
                let residual = self.relation_residual(&tuple)?;
                checked += 1;
                if !residual.is_zero() {
                    let names: Vec<String> = tuple
                        .iter()
                        .map(|(i, b)| format!("{}@{i}", self.scs.level(*i).basis_name(*b)))
                        .collect();
                    report.push(Violation::new(
                        "linfty-relation",
                        &self.scs.name,
                        format!(
                            "arity {arity} residual nonzero on ({}): {}",
                            names.join(", "),
                            residual.render(&crate::glie::CoeffRing::Rationals)
                        ),
                    ));
                }
            }
            report.note(format!("arity {arity}: {checked} basis tuples checked"));
        }
        Ok(report)
    }
}

/// Ascending index subsets of size `k` from `0..n`.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Ascending multisets of size `k` drawn from the given keys.
pub(crate) fn multisets(keys: &[TotKey], k: usize) -> Vec<Vec<TotKey>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(
        keys: &[TotKey],
        start: usize,
        k: usize,
        current: &mut Vec<TotKey>,
        out: &mut Vec<Vec<TotKey>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..keys.len() {
            current.push(keys[i]);
            rec(keys, i, k, current, out);
            current.pop();
        }
    }
    rec(keys, 0, k, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scs::tests::{abelian_point_cover, sl2_pair_cover};

    #[test]
    fn tree_class_counts_and_automorphisms() {
        let counts: Vec<usize> =
            (1..=6).map(|n| enumerate_trees(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6]);
        let two = enumerate_trees(2).unwrap();
        assert_eq!(two[0].automorphisms, 2);
        let four = enumerate_trees(4).unwrap();
        let mut auts: Vec<u64> = four.iter().map(|t| t.automorphisms).collect();
        auts.sort();
        assert_eq!(auts, vec![2, 8]);
        let five = enumerate_trees(5).unwrap();
        let mut auts: Vec<u64> = five.iter().map(|t| t.automorphisms).collect();
        auts.sort();
        assert_eq!(auts, vec![2, 4, 8]);
    }

    #[test]
    fn abelian_brackets_vanish_above_arity_one() {
        let scs = abelian_point_cover();
        let engine = TransferEngine::new(&scs);
        let basis: Vec<TotKey> = (0..=scs.max_level())
            .flat_map(|i| (0..scs.level(i).dim()).map(move |b| (i, b)))
            .collect();
        for a in &basis {
            for b in &basis {
                let q2 = engine.transferred_bracket_basis(&[*a, *b]).unwrap();
                assert!(q2.is_zero(), "arity 2 bracket nonzero on abelian object");
            }
        }
        let q3 = engine
            .transferred_bracket_basis(&[basis[0], basis[3], basis[6]])
            .unwrap();
        assert!(q3.is_zero());
    }

    #[test]
    fn transferred_bracket_is_graded_symmetric() {
        let scs = sl2_pair_cover();
        let engine = TransferEngine::new(&scs);
        // Degree-0 shifted inputs commute symmetrically.
        let u = (1usize, 0usize);
        let v = (1usize, 2usize);
        let a = engine.transferred_bracket_basis(&[u, v]).unwrap();
        let b = engine.transferred_bracket_basis(&[v, u]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn relations_hold_through_arity_three() {
        let scs = sl2_pair_cover();
        let engine = TransferEngine::new(&scs);
        let report = engine.check_linfty_relations(3).unwrap();
        assert!(report.is_clean(), "{}", report.render_text());
    }

    #[test]
    fn scaled_homotopy_breaks_the_relations() {
        let scs = sl2_pair_cover();
        let engine = TransferEngine::new(&scs).with_homotopy_scale(rat(2));
        let report = engine.check_linfty_relations(3).unwrap();
        assert!(!report.is_clean(), "scaled homotopy must violate coherence");
    }

    #[test]
    fn tree_evaluation_matches_component_sum() {
        let scs = sl2_pair_cover();
        let engine = TransferEngine::new(&scs);
        let u = TotElement::basis(&scs, 0, 0);
        let v = TotElement::basis(&scs, 0, 1);
        let trees = enumerate_trees(2).unwrap();
        let direct = engine.evaluate_tree(&trees[0], &[u.clone(), v.clone()]).unwrap();
        let weighted = engine.einfty_component(&[u, v]).unwrap();
        assert_eq!(weighted, direct.scale(&(rat(1) / rat(2))));
    }
}
