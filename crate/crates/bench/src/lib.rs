//! Shared fixtures for the kernel benchmarks: one mid-sized tower with a
//! nonabelian presheaf, a truncated coefficient ring, and ready-made inputs
//! for the operators being timed.

use std::sync::Arc;

use descent_core::artin::ArtinLocalAlgebra;
use descent_core::corpus;
use descent_core::glie::{CoeffKey, CoeffRing, GElement};
use descent_core::rng::Sampler;
use descent_core::scs::{CompatibleSampler, ScsDgla, TotElement, TwElement};

pub fn tower() -> Arc<ScsDgla> {
    corpus::sl2_three_opens()
}

pub fn coefficients() -> Arc<ArtinLocalAlgebra> {
    corpus::truncated_polynomial_ring(4).expect("fixture ring")
}

/// A fixed compatible Thom-Whitney element of the fixture tower.
pub fn tw_sample(scs: &Arc<ScsDgla>) -> TwElement {
    let source = CompatibleSampler::new(scs).expect("fixture sampler");
    let mut rng = Sampler::new(2024);
    source.sample(&mut rng).expect("fixture sample")
}

/// A fixed degree-1 first-order element of the fixture tower.
pub fn mc_candidate(scs: &Arc<ScsDgla>, algebra: &Arc<ArtinLocalAlgebra>) -> TotElement {
    let g1 = scs.level(1);
    let t = algebra.monomial_index("t").expect("fixture monomial");
    let mut x = GElement::zero(g1);
    for (j, name) in ["e@1,2", "e@1,3", "h@2,3"].iter().enumerate() {
        let b = g1.basis_index(name).expect("fixture basis");
        x.add_term((b, CoeffKey::Mono(t)), descent_core::rational::rat(1 + j as i64));
    }
    TotElement::from_component(scs, 1, x).expect("fixture element")
}

/// Two degree-0 level-0 arguments for the BCH product.
pub fn bch_arguments(
    scs: &Arc<ScsDgla>,
    algebra: &Arc<ArtinLocalAlgebra>,
) -> (GElement, GElement, CoeffRing) {
    let g0 = scs.level(0);
    let ring = CoeffRing::Artin(Arc::clone(algebra));
    let t = algebra.monomial_index("t").expect("fixture monomial");
    let mut x = GElement::zero(g0);
    x.add_term((g0.basis_index("e@1").expect("basis"), CoeffKey::Mono(t)), descent_core::rational::rat(1));
    x.add_term((g0.basis_index("f@2").expect("basis"), CoeffKey::Mono(t)), descent_core::rational::rat(2));
    let mut y = GElement::zero(g0);
    y.add_term((g0.basis_index("h@1").expect("basis"), CoeffKey::Mono(t)), descent_core::rational::rat(1));
    y.add_term((g0.basis_index("e@3").expect("basis"), CoeffKey::Mono(t)), descent_core::rational::rat(-1));
    (x, y, ring)
}
