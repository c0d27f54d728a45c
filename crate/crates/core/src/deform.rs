//! Deformations with nilpotent coefficients: BCH products, gauge actions,
//! Maurer-Cartan and cocycle residuals, order-by-order solvers with
//! obstruction classes in H^2, and the gauge-path map comparing transferred
//! Maurer-Cartan elements with nonabelian 1-cocycles.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::artin::ArtinLocalAlgebra;
use crate::error::{Error, Result};
use crate::forms::PolyForm;
use crate::glie::{CoeffKey, CoeffRing, Dgla, GElement};
use crate::linalg::{self, Cohomology, Mat};
use crate::rational::{factorial, rat, ratio, Rat};
use crate::report::{Report, Violation};
use crate::rng::Sampler;
use crate::scs::{ScsDgla, TotElement, TwElement};
use crate::transfer::TransferEngine;

/// A word in two letters with its coefficient in the Dynkin presentation of
/// the Baker-Campbell-Hausdorff series. `true` stands for the left argument;
/// words are evaluated with right-nested brackets.
fn dynkin_terms(weight_cap: usize) -> Vec<(Rat, Vec<bool>)> {
    fn rec(cap: usize, used: usize, blocks: &mut Vec<(usize, usize)>, out: &mut Vec<(Rat, Vec<bool>)>) {
        if !blocks.is_empty() {
            let mut denom = rat(blocks.len() as i64) * rat(used as i64);
            for &(r, s) in blocks.iter() {
                denom *= factorial(r) * factorial(s);
            }
            let sign = if blocks.len() % 2 == 1 { Rat::one() } else { -Rat::one() };
            let mut word = Vec::with_capacity(used);
            for &(r, s) in blocks.iter() {
                word.extend(std::iter::repeat(true).take(r));
                word.extend(std::iter::repeat(false).take(s));
            }
            out.push((sign / denom, word));
        }
        if used == cap {
            return;
        }
        let remaining = cap - used;
        for r in 0..=remaining {
            for s in 0..=(remaining - r) {
                if r + s == 0 {
                    continue;
                }
                blocks.push((r, s));
                rec(cap, used + r + s, blocks, out);
                blocks.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(weight_cap, 0, &mut Vec::new(), &mut out);
    out
}

/// Sums the Dynkin series for any bracket structure supplied as closures.
/// Words whose filtration weight reaches `order` are dropped; `fx`, `fy` are
/// lower bounds for the filtration of the two arguments.
fn dynkin_sum<T, FB, FC, FZ>(
    weight_cap: usize,
    x: &T,
    y: &T,
    zero: T,
    bracket: FB,
    combine: FC,
    is_zero: FZ,
    fx: usize,
    fy: usize,
    order: usize,
) -> Result<T>
where
    T: Clone,
    FB: Fn(&T, &T) -> Result<T>,
    FC: Fn(&T, &T, &Rat) -> Result<T>,
    FZ: Fn(&T) -> bool,
{
    let mut acc = zero;
    for (c, word) in dynkin_terms(weight_cap) {
        let m = word.len();
        if m >= 2 && word[m - 1] == word[m - 2] {
            continue;
        }
        let trues = word.iter().filter(|b| **b).count();
        if trues * fx + (m - trues) * fy >= order {
            continue;
        }
        let pick = |b: bool| if b { x } else { y };
        let mut val = pick(word[m - 1]).clone();
        let mut vanished = false;
        for i in (0..m - 1).rev() {
            val = bracket(pick(word[i]), &val)?;
            if is_zero(&val) {
                vanished = true;
                break;
            }
        }
        if vanished {
            continue;
        }
        acc = combine(&acc, &val, &c)?;
    }
    Ok(acc)
}

fn nilpotency(ring: &CoeffRing, what: &str) -> Result<usize> {
    ring.nilpotency_order()
        .ok_or_else(|| Error::Degree(format!("{what} needs a nilpotent coefficient ring")))
}

/// Baker-Campbell-Hausdorff product of two degree-0 elements of the maximal
/// ideal, via the Dynkin series truncated at the nilpotency order.
pub fn bch(x: &GElement, y: &GElement, ring: &CoeffRing) -> Result<GElement> {
    let order = nilpotency(ring, "the BCH product")?;
    for e in [x, y] {
        if !matches!(e.degree(), None | Some(0)) {
            return Err(Error::Degree("the BCH product is defined for degree-0 elements".into()));
        }
        if e.min_filtration(ring) == Some(0) {
            return Err(Error::Degree("BCH arguments must lie in the maximal ideal".into()));
        }
    }
    let fx = x.min_filtration(ring).unwrap_or(order);
    let fy = y.min_filtration(ring).unwrap_or(order);
    dynkin_sum(
        order - 1,
        x,
        y,
        GElement::zero(&x.ambient),
        |a, b| a.bracket(b, ring),
        |acc, v, c| acc.add(&v.scale(c)),
        GElement::is_zero,
        fx,
        fy,
        order,
    )
}

fn tw_min_filtration(x: &TwElement, ring: &CoeffRing) -> Option<usize> {
    let mut out: Option<usize> = None;
    for n in 0..=x.scs.max_level() {
        for ((_, key), form) in x.level_entries(n) {
            if form.is_zero() {
                continue;
            }
            let f = ring.filtration(*key);
            out = Some(out.map_or(f, |o| o.min(f)));
        }
    }
    out
}

/// BCH product on degree-0 Thom-Whitney elements.
pub fn tw_bch(x: &TwElement, y: &TwElement, ring: &CoeffRing) -> Result<TwElement> {
    let order = nilpotency(ring, "the BCH product")?;
    for e in [x, y] {
        if !matches!(e.total_degree(), None | Some(0)) {
            return Err(Error::Degree("the BCH product is defined for degree-0 elements".into()));
        }
        if tw_min_filtration(e, ring) == Some(0) {
            return Err(Error::Degree("BCH arguments must lie in the maximal ideal".into()));
        }
    }
    let fx = tw_min_filtration(x, ring).unwrap_or(order);
    let fy = tw_min_filtration(y, ring).unwrap_or(order);
    dynkin_sum(
        order - 1,
        x,
        y,
        TwElement::zero(&x.scs),
        |a, b| a.tw_bracket(b, ring),
        |acc, v, c| acc.add(&v.scale(c)),
        TwElement::is_zero,
        fx,
        fy,
        order,
    )
}

/// Gauge action `e^a * x = sum ad_a^k/k! (x) - sum ad_a^k/(k+1)! (da)` of a
/// degree-0 element of the maximal ideal on a degree-1 element.
pub fn gauge_action(a: &GElement, x: &GElement, ring: &CoeffRing) -> Result<GElement> {
    let order = nilpotency(ring, "the gauge action")?;
    if !matches!(a.degree(), None | Some(0)) {
        return Err(Error::Degree("gauge parameters must have degree 0".into()));
    }
    if a.min_filtration(ring) == Some(0) {
        return Err(Error::Degree("gauge parameters must lie in the maximal ideal".into()));
    }
    if !matches!(x.degree(), None | Some(1)) {
        return Err(Error::Degree("the gauge action is defined on degree-1 elements".into()));
    }
    let mut out = GElement::zero(&a.ambient);
    let mut cur = x.clone();
    let mut k = 0usize;
    while !cur.is_zero() {
        out = out.add(&cur.scale(&(Rat::one() / factorial(k))))?;
        cur = a.bracket(&cur, ring)?;
        k += 1;
        if k > order + 1 {
            return Err(Error::Inconsistent("gauge exponential failed to terminate".into()));
        }
    }
    let mut cur = a.differential();
    let mut k = 0usize;
    while !cur.is_zero() {
        out = out.sub(&cur.scale(&(Rat::one() / factorial(k + 1))))?;
        cur = a.bracket(&cur, ring)?;
        k += 1;
        if k > order + 1 {
            return Err(Error::Inconsistent("gauge exponential failed to terminate".into()));
        }
    }
    Ok(out)
}

/// Gauge action on the Thom-Whitney complex; same series as `gauge_action`
/// with the level-wise differential and bracket.
pub fn tw_gauge_action(a: &TwElement, x: &TwElement, ring: &CoeffRing) -> Result<TwElement> {
    let order = nilpotency(ring, "the gauge action")?;
    if !matches!(a.total_degree(), None | Some(0)) {
        return Err(Error::Degree("gauge parameters must have degree 0".into()));
    }
    if tw_min_filtration(a, ring) == Some(0) {
        return Err(Error::Degree("gauge parameters must lie in the maximal ideal".into()));
    }
    if !matches!(x.total_degree(), None | Some(1)) {
        return Err(Error::Degree("the gauge action is defined on degree-1 elements".into()));
    }
    let mut out = TwElement::zero(&a.scs);
    let mut cur = x.clone();
    let mut k = 0usize;
    while !cur.is_zero() {
        out = out.add(&cur.scale(&(Rat::one() / factorial(k))))?;
        cur = a.tw_bracket(&cur, ring)?;
        k += 1;
        if k > order + 1 {
            return Err(Error::Inconsistent("gauge exponential failed to terminate".into()));
        }
    }
    let mut cur = a.tw_differential();
    let mut k = 0usize;
    while !cur.is_zero() {
        out = out.sub(&cur.scale(&(Rat::one() / factorial(k + 1))))?;
        cur = a.tw_bracket(&cur, ring)?;
        k += 1;
        if k > order + 1 {
            return Err(Error::Inconsistent("gauge exponential failed to terminate".into()));
        }
    }
    Ok(out)
}

/// Maurer-Cartan residual `dx + [x,x]/2` in a single DGLA.
pub fn mc_residual_dgla(x: &GElement, ring: &CoeffRing) -> Result<GElement> {
    if !matches!(x.degree(), None | Some(1)) {
        return Err(Error::Degree("Maurer-Cartan candidates must have degree 1".into()));
    }
    x.differential().add(&x.bracket(x, ring)?.scale(&ratio(1, 2)))
}

/// Maurer-Cartan residual on the Thom-Whitney complex.
pub fn tw_mc_residual(x: &TwElement, ring: &CoeffRing) -> Result<TwElement> {
    if !matches!(x.total_degree(), None | Some(1)) {
        return Err(Error::Degree("Maurer-Cartan candidates must have degree 1".into()));
    }
    x.tw_differential().add(&x.tw_bracket(x, ring)?.scale(&ratio(1, 2)))
}

fn neg(x: &GElement) -> GElement {
    x.scale(&rat(-1))
}

/// Nonabelian cocycle residual of a degree-0 level-1 element: the BCH
/// product of its three faces, right-grouped. `None` when the object has no
/// level 2, in which case there is no cocycle condition.
pub fn cocycle_residual(scs: &Arc<ScsDgla>, m: &GElement, ring: &CoeffRing) -> Result<Option<GElement>> {
    if !matches!(m.degree(), None | Some(0)) {
        return Err(Error::Degree("cocycles are degree-0 elements of level 1".into()));
    }
    if scs.max_level() < 2 {
        return Ok(None);
    }
    let d0 = scs.coface(0, 2).apply(m)?;
    let d1 = scs.coface(1, 2).apply(m)?;
    let d2 = scs.coface(2, 2).apply(m)?;
    let inner = bch(&neg(&d1), &d2, ring)?;
    Ok(Some(bch(&d0, &inner, ring)?))
}

/// Conjugates a cocycle by a degree-0 level-0 element:
/// `e^{-d_1 a} e^m e^{d_0 a}` as one BCH word.
pub fn bordism_twist(scs: &Arc<ScsDgla>, m: &GElement, a: &GElement, ring: &CoeffRing) -> Result<GElement> {
    let d0a = scs.coface(0, 1).apply(a)?;
    let d1a = scs.coface(1, 1).apply(a)?;
    let inner = bch(m, &d0a, ring)?;
    bch(&neg(&d1a), &inner, ring)
}

/// Difference between the twist of `m1` by `a` and `m0`; zero exactly when
/// `a` is a bordism from `m0` to `m1`.
pub fn bordism_defect(
    scs: &Arc<ScsDgla>,
    a: &GElement,
    m0: &GElement,
    m1: &GElement,
    ring: &CoeffRing,
) -> Result<GElement> {
    bordism_twist(scs, m1, a, ring)?.sub(m0)
}

pub fn bordism_check(
    scs: &Arc<ScsDgla>,
    a: &GElement,
    m0: &GElement,
    m1: &GElement,
    ring: &CoeffRing,
) -> Result<bool> {
    Ok(bordism_defect(scs, a, m0, m1, ring)?.is_zero())
}

/// A descent datum: a Maurer-Cartan element at level 0 with a degree-0
/// gluing element at level 1 intertwining its two faces.
#[derive(Debug, Clone)]
pub struct DescentDatum {
    pub l: GElement,
    pub m: GElement,
}

/// Checks the three descent conditions for `(l, m)`.
pub fn descent_check(scs: &Arc<ScsDgla>, datum: &DescentDatum, ring: &CoeffRing) -> Result<Report> {
    let mut report = Report::new();
    let name = scs.name.clone();
    let r = mc_residual_dgla(&datum.l, ring)?;
    if !r.is_zero() {
        report.push(Violation::new("descent-mc", &name, format!("dl + [l,l]/2 = {}", r.render(ring))));
    }
    let lhs = gauge_action(&datum.m, &scs.coface(0, 1).apply(&datum.l)?, ring)?;
    let rhs = scs.coface(1, 1).apply(&datum.l)?;
    if lhs != rhs {
        report.push(Violation::new(
            "descent-gauge",
            &name,
            "e^m applied to the 0th face of l differs from the 1st face",
        ));
    }
    if let Some(r) = cocycle_residual(scs, &datum.m, ring)? {
        if !r.is_zero() {
            report.push(Violation::new(
                "descent-cocycle",
                &name,
                format!("triple-overlap defect {}", r.render(ring)),
            ));
        }
    }
    Ok(report)
}

/// Checks that `a` is a morphism of descent data from `from` to `to`.
pub fn descent_morphism_check(
    scs: &Arc<ScsDgla>,
    from: &DescentDatum,
    to: &DescentDatum,
    a: &GElement,
    ring: &CoeffRing,
) -> Result<Report> {
    let mut report = Report::new();
    let name = scs.name.clone();
    if gauge_action(a, &from.l, ring)? != to.l {
        report.push(Violation::new("morphism-gauge", &name, "e^a * l_0 differs from l_1"));
    }
    let defect = bordism_defect(scs, a, &from.m, &to.m, ring)?;
    if !defect.is_zero() {
        report.push(Violation::new(
            "morphism-cocycle",
            &name,
            format!("gluing defect {}", defect.render(ring)),
        ));
    }
    Ok(report)
}

fn keyed_parts(x: &TotElement, ring: &CoeffRing) -> Result<Vec<(CoeffKey, usize, TotElement)>> {
    let mut parts = Vec::new();
    for (key, part) in x.split_by_key() {
        let f = ring.filtration(key);
        if f == 0 {
            return Err(Error::Degree("the element must take values in the maximal ideal".into()));
        }
        parts.push((key, f, part));
    }
    Ok(parts)
}

/// Index multisets `i_1 <= ... <= i_n` whose total filtration stays below
/// `order`, so that the corresponding coefficient products survive.
fn index_multisets(filts: &[usize], n: usize, order: usize) -> Vec<Vec<usize>> {
    fn rec(
        filts: &[usize],
        n: usize,
        order: usize,
        start: usize,
        used: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let remaining = n - cur.len();
        for i in start..filts.len() {
            let used2 = used + filts[i];
            if used2 + (remaining - 1) >= order {
                continue;
            }
            cur.push(i);
            rec(filts, n, order, i, used2, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(filts, n, order, 0, 0, &mut Vec::new(), &mut out);
    out
}

fn multiset_symmetry_factor(idxs: &[usize]) -> Rat {
    let mut denom = Rat::one();
    let mut run = 1usize;
    for i in 1..=idxs.len() {
        if i < idxs.len() && idxs[i] == idxs[i - 1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    Rat::one() / denom
}

fn key_product(ring: &CoeffRing, keys: &[CoeffKey]) -> Result<Vec<(CoeffKey, Rat)>> {
    let mut prods: Vec<(CoeffKey, Rat)> = vec![(keys[0], Rat::one())];
    for &k in &keys[1..] {
        let mut next: BTreeMap<CoeffKey, Rat> = BTreeMap::new();
        for (k0, c0) in &prods {
            for (k1, c1) in ring.mul_keys(*k0, k)? {
                let entry = next.entry(k1).or_insert_with(Rat::zero);
                *entry += c0 * &c1;
            }
        }
        prods = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if prods.is_empty() {
            break;
        }
    }
    Ok(prods)
}

/// Maurer-Cartan residual `sum_n q_n(x,..,x)/n!` for the transferred
/// structure, expanded over coefficient monomials with divided powers.
pub fn mc_residual_linfty(
    engine: &TransferEngine,
    x: &TotElement,
    algebra: &Arc<ArtinLocalAlgebra>,
) -> Result<TotElement> {
    let ring = CoeffRing::Artin(Arc::clone(algebra));
    if !matches!(x.total_degree(), None | Some(1)) {
        return Err(Error::Degree("Maurer-Cartan candidates must have total degree 1".into()));
    }
    let parts = keyed_parts(x, &ring)?;
    let filts: Vec<usize> = parts.iter().map(|(_, f, _)| *f).collect();
    let order = algebra.nilpotency_order();
    let mut acc = x.tot_differential()?;
    for n in 2..order {
        for idxs in index_multisets(&filts, n, order) {
            let inputs: Vec<TotElement> = idxs.iter().map(|&i| parts[i].2.clone()).collect();
            let val = engine.transferred_bracket(&inputs)?;
            if val.is_zero() {
                continue;
            }
            let keys: Vec<CoeffKey> = idxs.iter().map(|&i| parts[i].0).collect();
            let sym = multiset_symmetry_factor(&idxs);
            for (key, c) in key_product(&ring, &keys)? {
                acc = acc.add(&val.tensor_key(key, &ring)?.scale(&(&c * &sym)))?;
            }
        }
    }
    Ok(acc)
}

fn tw_tensor_key(v: &TwElement, key: CoeffKey, ring: &CoeffRing) -> Result<TwElement> {
    let mut out = TwElement::zero(&v.scs);
    for n in 0..=v.scs.max_level() {
        let entries: Vec<((usize, CoeffKey), PolyForm)> =
            v.level_entries(n).map(|(k, f)| (*k, f.clone())).collect();
        for ((b, k0), form) in entries {
            for (k1, c) in ring.mul_keys(k0, key)? {
                out.add_entry(n, (b, k1), form.scale(&c));
            }
        }
    }
    Ok(out)
}

/// Image `sum_n E_n(x,..,x)/n!` of a Maurer-Cartan candidate under the
/// transferred quasi-isomorphism into the Thom-Whitney complex.
pub fn einfty_image(
    engine: &TransferEngine,
    x: &TotElement,
    algebra: &Arc<ArtinLocalAlgebra>,
) -> Result<TwElement> {
    let ring = CoeffRing::Artin(Arc::clone(algebra));
    if !matches!(x.total_degree(), None | Some(1)) {
        return Err(Error::Degree("Maurer-Cartan candidates must have total degree 1".into()));
    }
    let parts = keyed_parts(x, &ring)?;
    let filts: Vec<usize> = parts.iter().map(|(_, f, _)| *f).collect();
    let order = algebra.nilpotency_order();
    let mut acc = TwElement::dupont_e(x)?;
    for n in 2..order {
        for idxs in index_multisets(&filts, n, order) {
            let inputs: Vec<TotElement> = idxs.iter().map(|&i| parts[i].2.clone()).collect();
            let val = engine.einfty_component(&inputs)?;
            if val.is_zero() {
                continue;
            }
            let keys: Vec<CoeffKey> = idxs.iter().map(|&i| parts[i].0).collect();
            let sym = multiset_symmetry_factor(&idxs);
            for (key, c) in key_product(&ring, &keys)? {
                acc = acc.add(&tw_tensor_key(&val, key, &ring)?.scale(&(&c * &sym)))?;
            }
        }
    }
    Ok(acc)
}

/// One obstruction coordinate met while lifting a deformation order by order.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionClass {
    pub layer: usize,
    pub monomial: String,
    pub class: Vec<Rat>,
}

/// Result of an order-by-order lift: a full solution, or the obstruction
/// classes at the first layer where lifting fails together with the lift
/// through the layers below it.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: Option<TotElement>,
    pub partial: Option<TotElement>,
    pub obstructions: Vec<ObstructionClass>,
    pub steps: Vec<String>,
}

/// Shared driver for the order-by-order solvers. The residual closure
/// reports per-monomial dense components against the degree-2 basis; the
/// correction closure adds a degree-1 primitive tensored with a monomial.
fn layered_solve<S>(
    algebra: &Arc<ArtinLocalAlgebra>,
    h2: &Cohomology,
    d1: &Mat,
    state: S,
    residual_dense: impl Fn(&S) -> Result<Vec<(usize, Vec<Rat>)>>,
    correct: impl Fn(&S, usize, &[Rat]) -> Result<S>,
) -> Result<(Option<S>, Option<S>, Vec<ObstructionClass>, Vec<String>)> {
    let order = algebra.nilpotency_order();
    let mut state = state;
    let mut steps = Vec::new();
    for layer in 2..order {
        let mut current: Vec<(usize, Vec<Rat>)> = Vec::new();
        for (mono, v) in residual_dense(&state)? {
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            let f = algebra.monomial_filtration(mono);
            if f < layer {
                return Err(Error::Inconsistent(format!(
                    "residual component of filtration {f} survives below layer {layer}"
                )));
            }
            if f == layer {
                current.push((mono, v));
            }
        }
        let mut obstructions = Vec::new();
        for (mono, v) in &current {
            if !h2.is_cocycle(v) {
                return Err(Error::Inconsistent("a layer residual is not closed".into()));
            }
            let class = h2.class_of(v)?;
            if class.iter().any(|c| !c.is_zero()) {
                obstructions.push(ObstructionClass {
                    layer,
                    monomial: algebra.monomial_names()[*mono].clone(),
                    class,
                });
            }
        }
        if !obstructions.is_empty() {
            steps.push(format!("layer {layer}: obstructed in {} component(s)", obstructions.len()));
            return Ok((None, Some(state), obstructions, steps));
        }
        let lifted = current.len();
        for (mono, v) in current {
            let rhs: Vec<Rat> = v.iter().map(|c| -c).collect();
            let xi = linalg::solve(d1, &rhs)
                .ok_or_else(|| Error::Inconsistent("a vanishing class admits no primitive".into()))?;
            state = correct(&state, mono, &xi)?;
        }
        steps.push(format!("layer {layer}: lifted {lifted} component(s)"));
    }
    for (_, v) in residual_dense(&state)? {
        if !v.iter().all(Zero::is_zero) {
            return Err(Error::Inconsistent("a residual survives past the top filtration layer".into()));
        }
    }
    Ok((Some(state), None, Vec::new(), steps))
}

fn check_first_order_seed(x: &TotElement, ring: &CoeffRing) -> Result<()> {
    if !matches!(x.total_degree(), None | Some(1)) {
        return Err(Error::Degree("seeds must have total degree 1".into()));
    }
    for (key, _) in x.split_by_key() {
        if ring.filtration(key) != 1 {
            return Err(Error::Malformed("seeds must be homogeneous of filtration order 1".into()));
        }
    }
    Ok(())
}

/// Lifts a closed first-order seed to a Maurer-Cartan element of the
/// transferred structure, or returns its obstruction classes in H^2.
pub fn mc_solve_order_by_order(
    engine: &TransferEngine,
    algebra: &Arc<ArtinLocalAlgebra>,
    seed: &TotElement,
) -> Result<SolveOutcome> {
    let scs = engine.scs();
    let ring = CoeffRing::Artin(Arc::clone(algebra));
    check_first_order_seed(seed, &ring)?;
    if !seed.tot_differential()?.is_zero() {
        return Err(Error::Malformed("the seed is not closed at first order".into()));
    }
    let basis1 = scs.tot_degree_basis(1);
    let basis2 = scs.tot_degree_basis(2);
    let d1 = scs.tot_differential_matrix(1);
    let d2 = scs.tot_differential_matrix(2);
    let h2 = Cohomology::new(&d1, &d2);
    let (solution, partial, obstructions, steps) = layered_solve(
        algebra,
        &h2,
        &d1,
        seed.clone(),
        |x| {
            let mut out = Vec::new();
            for (key, part) in mc_residual_linfty(engine, x, algebra)?.split_by_key() {
                match key {
                    CoeffKey::Mono(k) => out.push((k, part.to_dense(&basis2)?)),
                    CoeffKey::One => {
                        return Err(Error::Inconsistent("the residual has a rational component".into()))
                    }
                }
            }
            Ok(out)
        },
        |x, mono, xi| {
            let delta =
                TotElement::from_dense(scs, &basis1, xi).tensor_key(CoeffKey::Mono(mono), &ring)?;
            x.add(&delta)
        },
    )?;
    Ok(SolveOutcome { solution, partial, obstructions, steps })
}

fn degree_zero_indices(g: &Arc<Dgla>) -> Vec<usize> {
    (0..g.dim()).filter(|&b| g.basis_degree(b) == 0).collect()
}

fn g_dense(x: &GElement, basis: &[usize]) -> Result<Vec<Rat>> {
    let positions: BTreeMap<usize, usize> =
        basis.iter().enumerate().map(|(p, &b)| (b, p)).collect();
    let mut out = vec![Rat::zero(); basis.len()];
    for (&(b, key), c) in x.support() {
        if !matches!(key, CoeffKey::One) {
            return Err(Error::Inconsistent("expected a rational component".into()));
        }
        let p = positions
            .get(&b)
            .ok_or_else(|| Error::Degree("a component falls outside the expected degree".into()))?;
        out[*p] = c.clone();
    }
    Ok(out)
}

fn g_split_by_key(x: &GElement) -> BTreeMap<CoeffKey, GElement> {
    let mut out: BTreeMap<CoeffKey, GElement> = BTreeMap::new();
    for (&(b, key), c) in x.support() {
        out.entry(key)
            .or_insert_with(|| GElement::zero(&x.ambient))
            .add_term((b, CoeffKey::One), c.clone());
    }
    out
}

/// Alternating coface sum from level `i-1` to level `i` restricted to
/// degree-0 basis elements on both sides.
fn cech_degree_zero_matrix(
    scs: &Arc<ScsDgla>,
    i: usize,
    source: &[usize],
    target: &[usize],
) -> Result<Mat> {
    let mut cols = Vec::with_capacity(source.len());
    for &b in source {
        let x = GElement::basis(scs.level(i - 1), b);
        let y = scs.coface_alternating(i, &x)?;
        cols.push(g_dense(&y, target)?);
    }
    Ok(Mat::from_cols(&cols, target.len()))
}

/// Lifts a closed first-order seed in level 1 to a nonabelian cocycle, or
/// returns its obstruction classes in the H^2 of the degree-0 rows.
pub fn cocycle_solve_order_by_order(
    scs: &Arc<ScsDgla>,
    algebra: &Arc<ArtinLocalAlgebra>,
    seed: &GElement,
) -> Result<SolveOutcome> {
    let ring = CoeffRing::Artin(Arc::clone(algebra));
    if !matches!(seed.degree(), None | Some(0)) {
        return Err(Error::Degree("cocycle seeds are degree-0 elements of level 1".into()));
    }
    for (&(_, key), _) in seed.support() {
        if ring.filtration(key) != 1 {
            return Err(Error::Malformed("seeds must be homogeneous of filtration order 1".into()));
        }
    }
    if scs.max_level() < 2 {
        let solution = TotElement::from_component(scs, 1, seed.clone())?;
        return Ok(SolveOutcome {
            solution: Some(solution),
            partial: None,
            obstructions: Vec::new(),
            steps: vec!["no triple level: the seed is already a cocycle".into()],
        });
    }
    if !scs.coface_alternating(2, seed)?.is_zero() {
        return Err(Error::Malformed("the seed is not closed at first order".into()));
    }
    let c1 = degree_zero_indices(scs.level(1));
    let c2 = degree_zero_indices(scs.level(2));
    let d12 = cech_degree_zero_matrix(scs, 2, &c1, &c2)?;
    let d23 = if scs.max_level() >= 3 {
        let c3 = degree_zero_indices(scs.level(3));
        cech_degree_zero_matrix(scs, 3, &c2, &c3)?
    } else {
        Mat::zero(0, c2.len())
    };
    let h2 = Cohomology::new(&d12, &d23);
    let g1 = Arc::clone(scs.level(1));
    let (solution, partial, obstructions, steps) = layered_solve(
        algebra,
        &h2,
        &d12,
        seed.clone(),
        |m| {
            let r = cocycle_residual(scs, m, &ring)?
                .expect("level 2 exists on this branch");
            let mut out = Vec::new();
            for (key, part) in g_split_by_key(&r) {
                match key {
                    CoeffKey::Mono(k) => out.push((k, g_dense(&part, &c2)?)),
                    CoeffKey::One => {
                        return Err(Error::Inconsistent("the residual has a rational component".into()))
                    }
                }
            }
            Ok(out)
        },
        |m, mono, xi| {
            let mut delta = GElement::zero(&g1);
            for (pos, &b) in c1.iter().enumerate() {
                if !xi[pos].is_zero() {
                    delta.add_term((b, CoeffKey::Mono(mono)), xi[pos].clone());
                }
            }
            m.add(&delta)
        },
    )?;
    let solution = match solution {
        Some(m) => Some(TotElement::from_component(scs, 1, m)?),
        None => None,
    };
    let partial = match partial {
        Some(m) => Some(TotElement::from_component(scs, 1, m)?),
        None => None,
    };
    Ok(SolveOutcome { solution, partial, obstructions, steps })
}

type PathMap = BTreeMap<(usize, CoeffKey), PolyForm>;

fn path_insert(map: &mut PathMap, key: (usize, CoeffKey), form: PolyForm) -> Result<()> {
    if form.is_zero() {
        return Ok(());
    }
    match map.remove(&key) {
        Some(old) => {
            let sum = old.add(&form)?;
            if !sum.is_zero() {
                map.insert(key, sum);
            }
        }
        None => {
            map.insert(key, form);
        }
    }
    Ok(())
}

fn path_add(a: &PathMap, b: &PathMap) -> Result<PathMap> {
    let mut out = a.clone();
    for (k, f) in b {
        path_insert(&mut out, *k, f.clone())?;
    }
    Ok(out)
}

fn path_scale(a: &PathMap, c: &Rat) -> PathMap {
    if c.is_zero() {
        return PathMap::new();
    }
    a.iter().map(|(k, f)| (*k, f.scale(c))).collect()
}

fn path_bracket(g: &Arc<Dgla>, a: &PathMap, b: &PathMap, ring: &CoeffRing) -> Result<PathMap> {
    let mut out = PathMap::new();
    for ((b1, k1), f1) in a {
        for ((b2, k2), f2) in b {
            let items = g.bracket_basis(*b1, *b2);
            if items.is_empty() {
                continue;
            }
            let prod = f1.wedge(f2)?;
            if prod.is_zero() {
                continue;
            }
            for (key, ck) in ring.mul_keys(*k1, *k2)? {
                for (bi, cb) in &items {
                    path_insert(&mut out, (*bi, key), prod.scale(&(&ck * cb)))?;
                }
            }
        }
    }
    Ok(out)
}

fn path_derivative(a: &PathMap) -> PathMap {
    a.iter()
        .filter_map(|(k, f)| {
            let d = f.dform().contract_dt(1);
            if d.is_zero() {
                None
            } else {
                Some((*k, d))
            }
        })
        .collect()
}

/// Reads the level-1 component of a Thom-Whitney Maurer-Cartan element as a
/// gauge path `e^{p} * xi` based at the last vertex of the edge and returns
/// the gauge witness accumulated over the whole edge.
///
/// On the edge the affine coordinate of the path parameter is the 0th
/// barycentric coordinate, so the path vanishes at vertex 1 and the witness
/// is read off at vertex 0.
pub fn phi_map(x: &TwElement, ring: &CoeffRing) -> Result<GElement> {
    let scs = Arc::clone(&x.scs);
    if scs.max_level() < 1 {
        return Err(Error::Bound("the comparison map needs a level-1 component".into()));
    }
    if !matches!(x.total_degree(), None | Some(1)) {
        return Err(Error::Degree("gauge paths have total degree 1".into()));
    }
    let order = nilpotency(ring, "the comparison map")?;
    let g1 = Arc::clone(scs.level(1));
    let mut alpha = PathMap::new();
    let mut xi = PathMap::new();
    for (&(b, key), form) in x.level_entries(1) {
        if ring.filtration(key) == 0 {
            return Err(Error::Degree("path decomposition needs maximal-ideal coefficients".into()));
        }
        let one_part = form.degree_part(1);
        if !one_part.is_zero() {
            path_insert(&mut alpha, (b, key), one_part.contract_dt(1))?;
        }
        let zero_part = form.degree_part(0);
        if !zero_part.is_zero() {
            let c = zero_part.evaluate_vertex(1)?;
            path_insert(&mut xi, (b, key), PolyForm::constant(1, c))?;
        }
    }
    let mut p = PathMap::new();
    let mut converged = false;
    for _ in 0..=order + 1 {
        let mut integrand = alpha.clone();
        let mut cur = path_derivative(&p);
        for k in 1..order {
            cur = path_bracket(&g1, &p, &cur, ring)?;
            if cur.is_empty() {
                break;
            }
            integrand = path_add(&integrand, &path_scale(&cur, &(Rat::one() / factorial(k + 1))))?;
        }
        let mut next = PathMap::new();
        for (key, f) in &integrand {
            let anti = f.antiderivative(1);
            let at_one = anti.evaluate_vertex(1)?;
            next_insert_primitive(&mut next, *key, &anti, at_one)?;
        }
        if next == p {
            converged = true;
            break;
        }
        p = next;
    }
    if !converged {
        return Err(Error::Inconsistent("the gauge path iteration did not stabilize".into()));
    }
    let mut p_tw = TwElement::zero(&scs);
    for (key, f) in &p {
        p_tw.add_entry(1, *key, f.clone());
    }
    let mut xi_tw = TwElement::zero(&scs);
    for (key, f) in &xi {
        xi_tw.add_entry(1, *key, f.clone());
    }
    let mut x1 = TwElement::zero(&scs);
    for (&key, form) in x.level_entries(1) {
        x1.add_entry(1, key, form.clone());
    }
    if tw_gauge_action(&p_tw, &xi_tw, ring)? != x1 {
        return Err(Error::Inconsistent("the path decomposition does not reproduce the input".into()));
    }
    let mut out = GElement::zero(&g1);
    for ((b, key), f) in &p {
        let c = f.evaluate_vertex(0)?;
        if !c.is_zero() {
            out.add_term((*b, *key), c);
        }
    }
    Ok(out)
}

/// Inserts `-(F(u) - F(1))` for an antiderivative `F`, anchoring the path at
/// vertex 1.
fn next_insert_primitive(map: &mut PathMap, key: (usize, CoeffKey), anti: &PolyForm, at_one: Rat) -> Result<()> {
    let form = PolyForm::constant(1, at_one).sub(anti)?;
    path_insert(map, key, form)
}

/// Randomized consistency battery for the correspondence between cocycles
/// and transferred Maurer-Cartan elements: constructed cocycles satisfy the
/// Maurer-Cartan equation, solved Maurer-Cartan elements satisfy the cocycle
/// equation, and the gauge-path witness inverts the extension.
pub fn main_theorem_check(
    scs: &Arc<ScsDgla>,
    algebra: &Arc<ArtinLocalAlgebra>,
    instances: usize,
    seed: u64,
) -> Result<Report> {
    let ring = CoeffRing::Artin(Arc::clone(algebra));
    let engine = TransferEngine::new(scs);
    let mut sampler = Sampler::new(seed);
    let mut report = Report::new();
    for i in 0..=scs.max_level() {
        let g = scs.level(i);
        for b in 0..g.dim() {
            if g.basis_degree(b) != 0 {
                return Err(Error::Degree("the cocycle comparison needs degree-0 levels".into()));
            }
        }
    }
    let g0 = Arc::clone(scs.level(0));
    let g1 = Arc::clone(scs.level(1));
    let monomials: Vec<usize> = (0..algebra.dim()).collect();
    let layer1: Vec<usize> =
        monomials.iter().copied().filter(|&k| algebra.monomial_filtration(k) == 1).collect();
    let basis1 = scs.tot_degree_basis(1);
    let d1 = scs.tot_differential_matrix(1);
    let kernel = linalg::nullspace(&d1);
    report.note(format!(
        "first-order cocycle space has dimension {} over {} first-layer monomial(s)",
        kernel.len(),
        layer1.len()
    ));
    let mut twists = 0usize;
    let mut solves = 0usize;
    for instance in 0..instances {
        let tag = format!("{} #{instance}", scs.name);
        if instance % 2 == 0 {
            twists += 1;
            let step = (|| -> Result<()> {
                let mut a = GElement::zero(&g0);
                for b in 0..g0.dim() {
                    for &k in &monomials {
                        if sampler.bool() {
                            a.add_term((b, CoeffKey::Mono(k)), sampler.rat());
                        }
                    }
                }
                if a.is_zero() && g0.dim() > 0 && !monomials.is_empty() {
                    a.add_term((0, CoeffKey::Mono(monomials[0])), rat(1));
                }
                let m = bordism_twist(scs, &GElement::zero(&g1), &a, &ring)?;
                if let Some(r) = cocycle_residual(scs, &m, &ring)? {
                    if !r.is_zero() {
                        report.push(Violation::new(
                            "twist-cocycle",
                            &tag,
                            "a bordism twist of 0 violates the cocycle equation",
                        ));
                        return Ok(());
                    }
                }
                let x = TotElement::from_component(scs, 1, m.clone())?;
                if !mc_residual_linfty(&engine, &x, algebra)?.is_zero() {
                    report.push(Violation::new(
                        "cocycle-mc",
                        &tag,
                        "a constructed cocycle fails the transferred Maurer-Cartan equation",
                    ));
                    return Ok(());
                }
                let e = einfty_image(&engine, &x, algebra)?;
                if phi_map(&e, &ring)? != m {
                    report.push(Violation::new(
                        "phi-roundtrip",
                        &tag,
                        "the gauge-path witness of the extended element differs from the cocycle",
                    ));
                }
                Ok(())
            })();
            if let Err(e) = step {
                report.push(Violation::new("battery-error", &tag, e.to_string()));
            }
        } else {
            if kernel.is_empty() || layer1.is_empty() {
                report.note(format!("{tag}: no first-order seeds available"));
                continue;
            }
            solves += 1;
            let step = (|| -> Result<()> {
                let mut seed_el = TotElement::zero(scs);
                for v in &kernel {
                    for &k in &layer1 {
                        if sampler.bool() {
                            let part = TotElement::from_dense(scs, &basis1, v)
                                .tensor_key(CoeffKey::Mono(k), &ring)?
                                .scale(&sampler.nonzero_rat());
                            seed_el = seed_el.add(&part)?;
                        }
                    }
                }
                if seed_el.is_zero() {
                    let part = TotElement::from_dense(scs, &basis1, &kernel[0])
                        .tensor_key(CoeffKey::Mono(layer1[0]), &ring)?;
                    seed_el = seed_el.add(&part)?;
                }
                let mc = mc_solve_order_by_order(&engine, algebra, &seed_el)?;
                let co = cocycle_solve_order_by_order(scs, algebra, &seed_el.components[1])?;
                match (&mc.solution, &co.solution) {
                    (Some(x), Some(m_tot)) => {
                        for (level, comp) in x.components.iter().enumerate() {
                            if level != 1 && !comp.is_zero() {
                                report.push(Violation::new(
                                    "mc-support",
                                    &tag,
                                    format!("the Maurer-Cartan solution has a level-{level} component"),
                                ));
                            }
                        }
                        if let Some(r) = cocycle_residual(scs, &x.components[1], &ring)? {
                            if !r.is_zero() {
                                report.push(Violation::new(
                                    "mc-cocycle",
                                    &tag,
                                    "a Maurer-Cartan solution violates the cocycle equation",
                                ));
                            }
                        }
                        let m = m_tot.components[1].clone();
                        let m_x = TotElement::from_component(scs, 1, m)?;
                        if !mc_residual_linfty(&engine, &m_x, algebra)?.is_zero() {
                            report.push(Violation::new(
                                "cocycle-mc",
                                &tag,
                                "a solved cocycle fails the transferred Maurer-Cartan equation",
                            ));
                        }
                        let e = einfty_image(&engine, x, algebra)?;
                        if phi_map(&e, &ring)? != x.components[1] {
                            report.push(Violation::new(
                                "phi-roundtrip",
                                &tag,
                                "the gauge-path witness differs from the Maurer-Cartan solution",
                            ));
                        }
                    }
                    (None, None) => {
                        if mc.obstructions == co.obstructions {
                            report.note(format!(
                                "{tag}: seed obstructed identically on both sides at layer {}",
                                mc.obstructions[0].layer
                            ));
                        } else {
                            report.push(Violation::new(
                                "obstruction-mismatch",
                                &tag,
                                "the two solvers disagree on the obstruction",
                            ));
                        }
                    }
                    _ => {
                        report.push(Violation::new(
                            "obstruction-mismatch",
                            &tag,
                            "one solver lifts the seed and the other does not",
                        ));
                    }
                }
                Ok(())
            })();
            if let Err(e) = step {
                report.push(Violation::new("battery-error", &tag, e.to_string()));
            }
        }
    }
    report.note(format!("instances: {instances} ({twists} twist, {solves} solver)"));
    Ok(report)
}

/// Discreteness of the positive truncation: no degree-0 path unknowns
/// survive, and the dt-component of the path equation forces constant paths.
pub fn path_discreteness_check(scs: &Arc<ScsDgla>) -> Result<Report> {
    let mut report = Report::new();
    let pos = scs.positive_truncation()?;
    let b0 = pos.tot_degree_basis(0);
    if b0.is_empty() {
        report.note("positive truncation: no degree-0 path unknowns");
    } else {
        report.push(Violation::new(
            "positive-truncation",
            &scs.name,
            format!("{} degree-0 coordinates survive the truncation", b0.len()),
        ));
    }
    // with no degree-0 unknowns the dt-component of the path equation reads
    // dx/dt = 0 on polynomial paths; its kernel is spanned by the constants
    let dim = pos.tot_degree_basis(1).len();
    let degree_cap = 3usize;
    let mut cols = Vec::new();
    for j in 0..=degree_cap {
        for p in 0..dim {
            let mut col = vec![Rat::zero(); degree_cap * dim];
            if j >= 1 {
                col[(j - 1) * dim + p] = rat(j as i64);
            }
            cols.push(col);
        }
    }
    let derivative = Mat::from_cols(&cols, degree_cap * dim);
    let kernel = linalg::nullspace(&derivative);
    if kernel.len() == dim {
        report.note(format!("path equation kernel: dimension {dim}, constant paths only"));
    } else {
        report.push(Violation::new(
            "path-discreteness",
            &scs.name,
            format!("kernel dimension {} differs from the constant space {}", kernel.len(), dim),
        ));
    }
    Ok(report)
}
