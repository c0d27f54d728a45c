//! Shared example objects: truncated coefficient rings, small Lie algebras,
//! and Cech towers over hand-picked covers with known cohomology. Tests,
//! benchmarks, and the shipped workspace files all draw from here.

use std::sync::Arc;

use crate::artin::ArtinLocalAlgebra;
use crate::cech::{build_cech_scs, CoverNerve, LieSheafMorphism};
use crate::error::{Error, Result};
use crate::glie::{Dgla, GLinMap};
use crate::rational::{rat, ratio, Rat};
use crate::scs::{ScsDgla, ScsMorphism};

/// `Q[t]/(t^order)` with monomial basis `t, t2, ..`.
pub fn truncated_polynomial_ring(order: usize) -> Result<Arc<ArtinLocalAlgebra>> {
    if order < 2 {
        return Err(Error::Bound(format!(
            "a truncation order of {order} leaves no maximal ideal"
        )));
    }
    let name_of = |p: usize| if p == 1 { "t".to_string() } else { format!("t{p}") };
    let monomials: Vec<String> = (1..order).map(name_of).collect();
    let mut products = Vec::new();
    for i in 1..order {
        for j in i..order {
            let value = if i + j < order { vec![(name_of(i + j), rat(1))] } else { Vec::new() };
            products.push((name_of(i), name_of(j), value));
        }
    }
    Ok(Arc::new(ArtinLocalAlgebra::new(&format!("Q[t]/(t^{order})"), monomials, products)?))
}

/// `Q[s,t]/(s^2,t^2)`, a two-variable square-zero ring of length 4.
pub fn two_variable_square_zero() -> Result<Arc<ArtinLocalAlgebra>> {
    Ok(Arc::new(ArtinLocalAlgebra::new(
        "Q[s,t]/(s^2,t^2)",
        vec!["s".into(), "t".into(), "st".into()],
        vec![
            ("s".into(), "t".into(), vec![("st".into(), rat(1))]),
            ("s".into(), "s".into(), Vec::new()),
            ("t".into(), "t".into(), Vec::new()),
        ],
    )?))
}

/// The Lie algebra of traceless 2x2 matrices in degree 0.
pub fn sl2_dgla() -> Arc<Dgla> {
    Dgla::new(
        "sl2",
        vec![("e".into(), 0), ("f".into(), 0), ("h".into(), 0)],
        Vec::new(),
        vec![
            ("e".into(), "f".into(), vec![("h".into(), rat(1))]),
            ("h".into(), "e".into(), vec![("e".into(), rat(2))]),
            ("h".into(), "f".into(), vec![("f".into(), rat(-2))]),
        ],
    )
    .expect("fixed bracket table")
}

/// The Lie algebra of all 2x2 matrices in degree 0, basis `e11, e12, e21,
/// e22` with commutator brackets.
pub fn gl2_dgla() -> Arc<Dgla> {
    Dgla::new(
        "gl2",
        vec![("e11".into(), 0), ("e12".into(), 0), ("e21".into(), 0), ("e22".into(), 0)],
        Vec::new(),
        vec![
            ("e11".into(), "e12".into(), vec![("e12".into(), rat(1))]),
            ("e11".into(), "e21".into(), vec![("e21".into(), rat(-1))]),
            ("e12".into(), "e21".into(), vec![("e11".into(), rat(1)), ("e22".into(), rat(-1))]),
            ("e12".into(), "e22".into(), vec![("e12".into(), rat(1))]),
            ("e21".into(), "e22".into(), vec![("e21".into(), rat(-1))]),
        ],
    )
    .expect("fixed bracket table")
}

/// The one-dimensional abelian Lie algebra in degree 0.
pub fn line_dgla(name: &str) -> Arc<Dgla> {
    Dgla::new(name, vec![("u".into(), 0)], Vec::new(), Vec::new()).expect("abelian line")
}

/// The Borel subalgebra `span{h, e}` of sl2, `[h, e] = 2e`.
pub fn borel_dgla() -> Arc<Dgla> {
    Dgla::new(
        "borel",
        vec![("h".into(), 0), ("e".into(), 0)],
        Vec::new(),
        vec![("h".into(), "e".into(), vec![("e".into(), rat(2))])],
    )
    .expect("fixed bracket table")
}

fn open_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("U{i}")).collect()
}

/// Constant sl2 presheaf on two opens: levels of dimension 6 and 3.
pub fn sl2_two_opens() -> Arc<ScsDgla> {
    let nerve = CoverNerve::constant_full("sl2-two-opens", open_names(2), &sl2_dgla())
        .expect("full nerve on two opens");
    build_cech_scs(&nerve).expect("constant presheaf")
}

/// Constant sl2 presheaf on three opens with every intersection nonempty:
/// levels of dimension 9, 9, 3 and vanishing positive cohomology.
pub fn sl2_three_opens() -> Arc<ScsDgla> {
    let nerve = CoverNerve::constant_full("sl2-three-opens", open_names(3), &sl2_dgla())
        .expect("full nerve on three opens");
    build_cech_scs(&nerve).expect("constant presheaf")
}

/// Constant rank-one abelian presheaf on the circle nerve: three opens,
/// pairwise intersections present, empty triple intersection. H^1 = Q.
pub fn abelian_circle() -> Arc<ScsDgla> {
    let present = vec![vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3], vec![2, 3]];
    let nerve = CoverNerve::constant("abelian-circle", open_names(3), &present, &line_dgla("q"))
        .expect("circle nerve");
    build_cech_scs(&nerve).expect("constant presheaf")
}

/// Nonconstant Borel presheaf on the full three-open nerve: every subset
/// carries `span{h, e}`, and the restriction to a larger subset rescales `e`
/// by the ratio of fixed positive weights. No weight ratio along a one-step
/// inclusion equals 1, so no restriction map is the identity.
pub fn borel_nonconstant() -> Arc<ScsDgla> {
    let weight = |key: &[usize]| -> i64 {
        match key {
            [_] => 1,
            [1, 2] => 2,
            [1, 3] => 3,
            [2, 3] => 5,
            [1, 2, 3] => 30,
            _ => unreachable!("three opens only"),
        }
    };
    let g = borel_dgla();
    let rescale = |c: Rat| {
        GLinMap::new(&g, &g, 0, vec![vec![(0, rat(1))], vec![(1, c)]]).expect("diagonal map")
    };
    let mut algebras = Vec::new();
    let mut restrictions = Vec::new();
    let subsets: Vec<Vec<usize>> = vec![
        vec![1],
        vec![2],
        vec![3],
        vec![1, 2],
        vec![1, 3],
        vec![2, 3],
        vec![1, 2, 3],
    ];
    for s in &subsets {
        algebras.push((s.clone(), Arc::clone(&g)));
    }
    for tgt in &subsets {
        if tgt.len() < 2 {
            continue;
        }
        for drop in 0..tgt.len() {
            let mut src = tgt.clone();
            src.remove(drop);
            let scale = ratio(weight(tgt), weight(&src));
            restrictions.push((src, tgt.clone(), rescale(scale)));
        }
    }
    let nerve = CoverNerve::new("borel-nonconstant", open_names(3), algebras, restrictions)
        .expect("weights telescope");
    build_cech_scs(&nerve).expect("nonconstant presheaf")
}

/// The seven-vertex torus triangulation as a cover nerve: every pair of
/// vertices is an edge and the fourteen triangles are `{i, i+1, i+3}` and
/// `{i, i+2, i+3}` modulo seven. Euler characteristic 0; with constant
/// coefficients H^0 = Q, H^1 = Q^2, H^2 = Q.
fn torus_present() -> Vec<Vec<usize>> {
    let v = |r: usize| (r % 7) + 1;
    let mut present: Vec<Vec<usize>> = (1..=7).map(|i| vec![i]).collect();
    for i in 1..=7 {
        for j in (i + 1)..=7 {
            present.push(vec![i, j]);
        }
    }
    for r in 0..7 {
        for shape in [[0usize, 1, 3], [0, 2, 3]] {
            let mut tri: Vec<usize> = shape.iter().map(|&d| v(r + d)).collect();
            tri.sort_unstable();
            present.push(tri);
        }
    }
    present
}

/// Constant gl2 and rank-one towers on the torus nerve together with the
/// induced trace morphism between them.
pub fn torus_trace_setup() -> (Arc<ScsDgla>, Arc<ScsDgla>, ScsMorphism) {
    let present = torus_present();
    let gl2 = gl2_dgla();
    let line = line_dgla("q");
    let source = Arc::new(
        CoverNerve::constant("gl2-torus", open_names(7), &present, &gl2).expect("torus nerve"),
    );
    let target = Arc::new(
        CoverNerve::constant("q-torus", open_names(7), &present, &line).expect("torus nerve"),
    );
    let trace = GLinMap::new(
        &gl2,
        &line,
        0,
        vec![vec![(0, rat(1))], Vec::new(), Vec::new(), vec![(0, rat(1))]],
    )
    .expect("trace of a 2x2 matrix");
    let maps = present.iter().map(|s| (s.clone(), trace.clone())).collect();
    let phi = LieSheafMorphism::new("trace", &source, &target, maps).expect("trace commutes");
    let scs1 = build_cech_scs(&source).expect("constant presheaf");
    let scs2 = build_cech_scs(&target).expect("constant presheaf");
    let induced = phi.induced(&scs1, &scs2).expect("towers built from these nerves");
    (scs1, scs2, induced)
}

/// Negative control: the three-open sl2 tower with one coface composed with
/// a Lie algebra automorphism, which breaks the cosimplicial identities.
pub fn corrupted_sl2_three_opens() -> Arc<ScsDgla> {
    let base = sl2_three_opens();
    let level2 = base.level(2);
    // e and f swap, h flips sign; this is an automorphism of sl2, so the
    // corrupted map is still a Lie morphism and only the simplicial
    // structure breaks
    let aut = GLinMap::new(
        level2,
        level2,
        0,
        vec![vec![(1, rat(1))], vec![(0, rat(1))], vec![(2, rat(-1))]],
    )
    .expect("swap automorphism");
    let corrupted = aut.compose(base.coface(1, 2)).expect("matching endpoints");
    let levels = vec![
        Arc::clone(base.level(0)),
        Arc::clone(base.level(1)),
        Arc::clone(base.level(2)),
    ];
    let cofaces = vec![
        vec![base.coface(0, 1).clone(), base.coface(1, 1).clone()],
        vec![base.coface(0, 2).clone(), corrupted, base.coface(2, 2).clone()],
    ];
    ScsDgla::new("sl2-three-opens-corrupted", levels, cofaces).expect("well-formed shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::tangent_obstruction_spaces;

    #[test]
    fn truncated_rings_have_the_expected_filtration() {
        let a4 = truncated_polynomial_ring(4).unwrap();
        assert_eq!(a4.dim(), 3);
        assert_eq!(a4.nilpotency_order(), 4);
        assert_eq!(a4.monomial_filtration(a4.monomial_index("t").unwrap()), 1);
        assert_eq!(a4.monomial_filtration(a4.monomial_index("t3").unwrap()), 3);
        assert!(a4.validate().is_clean());
        let b = two_variable_square_zero().unwrap();
        assert_eq!(b.nilpotency_order(), 3);
        assert!(b.validate().is_clean());
        assert!(truncated_polynomial_ring(1).is_err());
    }

    #[test]
    fn standard_lie_algebras_validate() {
        assert!(sl2_dgla().validate().is_clean());
        assert!(gl2_dgla().validate().is_clean());
        assert!(borel_dgla().validate().is_clean());
        assert!(line_dgla("q").validate().is_clean());
    }

    #[test]
    fn corpus_towers_validate_with_expected_shapes() {
        let two = sl2_two_opens();
        assert_eq!(two.max_level(), 1);
        assert_eq!((two.level(0).dim(), two.level(1).dim()), (6, 3));
        assert!(two.validate().is_clean());

        let three = sl2_three_opens();
        assert_eq!(three.max_level(), 2);
        assert_eq!(
            (three.level(0).dim(), three.level(1).dim(), three.level(2).dim()),
            (9, 9, 3)
        );
        assert!(three.validate().is_clean());

        let circle = abelian_circle();
        assert_eq!(circle.max_level(), 1);
        assert_eq!((circle.level(0).dim(), circle.level(1).dim()), (3, 3));
        assert!(circle.validate().is_clean());

        let borel = borel_nonconstant();
        assert_eq!(borel.max_level(), 2);
        assert_eq!(
            (borel.level(0).dim(), borel.level(1).dim(), borel.level(2).dim()),
            (6, 6, 2)
        );
        assert!(borel.validate().is_clean());
    }

    #[test]
    fn full_nerves_have_no_positive_cohomology() {
        for scs in [sl2_two_opens(), sl2_three_opens(), borel_nonconstant()] {
            let (h1, h2) = tangent_obstruction_spaces(&scs);
            assert!(h1.is_empty(), "{} has tangent classes", scs.name);
            assert!(h2.is_empty(), "{} has obstruction classes", scs.name);
        }
    }

    #[test]
    fn circle_and_torus_have_the_expected_cohomology() {
        let (h1, h2) = tangent_obstruction_spaces(&abelian_circle());
        assert_eq!((h1.len(), h2.len()), (1, 0));

        let (gl2_torus, q_torus, trace) = torus_trace_setup();
        assert!(gl2_torus.validate().is_clean());
        assert!(q_torus.validate().is_clean());
        assert!(trace.validate().is_clean());
        let (h1, h2) = tangent_obstruction_spaces(&q_torus);
        assert_eq!((h1.len(), h2.len()), (2, 1));
        let (h1, h2) = tangent_obstruction_spaces(&gl2_torus);
        assert_eq!((h1.len(), h2.len()), (8, 4));
    }

    #[test]
    fn corrupted_tower_fails_validation() {
        let bad = corrupted_sl2_three_opens();
        let report = bad.validate();
        assert!(!report.is_clean());
        assert!(report
            .violations()
            .iter()
            .any(|v| v.kind == "cosimplicial-identity"));
    }
}
