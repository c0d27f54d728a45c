//! Textual workspace schema: one JSON document declaring coefficient rings,
//! Lie algebras, covers, towers, tower morphisms, named elements, and named
//! jobs, together with its resolution into live objects. Every rational is
//! written as a string `"p"` or `"p/q"`, every matrix as a column map from
//! source basis names to target basis names, and every reference is checked
//! at load time.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::artin::ArtinLocalAlgebra;
use crate::cech::{build_cech_scs, subset_label, CoverNerve, LieSheafMorphism};
use crate::error::{Error, Result};
use crate::glie::{CoeffKey, Dgla, GElement, GLinMap};
use crate::rational::{parse_rat, Rat};
use crate::scs::{ScsDgla, ScsMorphism, TotElement};

/// Column map `source basis name -> (target basis name -> coefficient)`.
pub type Columns = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceFile {
    #[serde(default)]
    pub artin_algebras: Vec<ArtinDecl>,
    #[serde(default)]
    pub lie_algebras: Vec<LieDecl>,
    #[serde(default)]
    pub covers: Vec<CoverDecl>,
    #[serde(default)]
    pub towers: Vec<TowerDecl>,
    #[serde(default)]
    pub morphisms: Vec<MorphismDecl>,
    #[serde(default)]
    pub elements: Vec<ElementDecl>,
    #[serde(default)]
    pub jobs: Vec<JobDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtinDecl {
    pub name: String,
    pub monomials: Vec<String>,
    #[serde(default)]
    pub products: Vec<ProductDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDecl {
    pub left: String,
    pub right: String,
    #[serde(default)]
    pub value: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieDecl {
    pub name: String,
    pub basis: Vec<BasisDecl>,
    #[serde(default)]
    pub differential: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub brackets: Vec<BracketDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDecl {
    pub name: String,
    #[serde(default)]
    pub degree: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketDecl {
    pub left: String,
    pub right: String,
    #[serde(default)]
    pub value: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDecl {
    pub name: String,
    pub opens: Vec<String>,
    /// Constant presheaf shorthand; mutually exclusive with `subsets`.
    #[serde(default)]
    pub constant: Option<ConstantCoverDecl>,
    #[serde(default)]
    pub subsets: Vec<SubsetDecl>,
    #[serde(default)]
    pub restrictions: Vec<RestrictionDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantCoverDecl {
    pub algebra: String,
    /// `"full"` or an explicit list of present subsets (1-based opens).
    pub present: PresenceDecl,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum PresenceDecl {
    Keyword(String),
    Subsets(Vec<Vec<usize>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetDecl {
    pub key: Vec<usize>,
    pub algebra: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionDecl {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub columns: Columns,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerDecl {
    pub name: String,
    pub cover: String,
    /// Entry-wise coface replacements, used mainly for negative controls.
    #[serde(default)]
    pub coface_overrides: Vec<CofaceOverrideDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CofaceOverrideDecl {
    pub level: usize,
    pub k: usize,
    pub columns: Columns,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDecl {
    pub name: String,
    pub source_cover: String,
    pub target_cover: String,
    pub source_tower: String,
    pub target_tower: String,
    /// One component per present subset, keyed by its label (`"1,2"`).
    pub components: BTreeMap<String, Columns>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDecl {
    pub name: String,
    pub tower: String,
    pub algebra: String,
    pub terms: Vec<TermDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDecl {
    pub level: usize,
    pub basis: String,
    pub monomial: String,
    pub coeff: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDecl {
    pub name: String,
    pub command: String,
    #[serde(default)]
    pub tower: Option<String>,
    #[serde(default)]
    pub algebra: Option<String>,
    #[serde(default)]
    pub morphism: Option<String>,
    /// Name of a declared element used as the first-order seed.
    #[serde(default)]
    pub seed: Option<String>,
    #[serde(default)]
    pub instances: Option<usize>,
    #[serde(default)]
    pub rng_seed: Option<u64>,
}

/// A declared degree-1 element, resolved against its tower and coefficients.
#[derive(Debug)]
pub struct NamedElement {
    pub name: String,
    pub tower: Arc<ScsDgla>,
    pub algebra: Arc<ArtinLocalAlgebra>,
    pub value: TotElement,
}

/// Job kinds that take their parameters from the workspace file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobKind {
    MainTheorem,
    ObstructionNaturality,
}

/// A named job with every reference resolved.
#[derive(Debug)]
pub struct ResolvedJob {
    pub name: String,
    pub kind: JobKind,
    pub tower: Option<Arc<ScsDgla>>,
    pub algebra: Option<Arc<ArtinLocalAlgebra>>,
    pub morphism: Option<String>,
    /// Index into [`Workspace::elements`].
    pub seed: Option<usize>,
    pub instances: Option<usize>,
    pub rng_seed: Option<u64>,
}

/// A fully resolved workspace: every declaration constructed, every
/// reference a live object. Maps iterate in name order; elements and jobs
/// keep declaration order.
#[derive(Debug)]
pub struct Workspace {
    pub algebras: BTreeMap<String, Arc<ArtinLocalAlgebra>>,
    pub lie_algebras: BTreeMap<String, Arc<Dgla>>,
    pub covers: BTreeMap<String, Arc<CoverNerve>>,
    pub towers: BTreeMap<String, Arc<ScsDgla>>,
    pub sheaf_morphisms: BTreeMap<String, LieSheafMorphism>,
    pub morphisms: BTreeMap<String, ScsMorphism>,
    pub elements: Vec<NamedElement>,
    pub jobs: Vec<ResolvedJob>,
}

/// Reads and resolves a workspace file.
pub fn load(path: &Path) -> Result<Workspace> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_str(&text)
}

/// Parses and resolves a workspace document.
pub fn parse_str(text: &str) -> Result<Workspace> {
    let file: WorkspaceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    resolve(file)
}

fn named_terms(value: &BTreeMap<String, String>, what: &str) -> Result<Vec<(String, Rat)>> {
    let mut out = Vec::new();
    for (name, coeff) in value {
        let c = parse_rat(coeff)
            .map_err(|e| Error::Parse(format!("{what}, entry '{name}': {e}")))?;
        out.push((name.clone(), c));
    }
    Ok(out)
}

fn columns_to_map(
    source: &Arc<Dgla>,
    target: &Arc<Dgla>,
    columns: &Columns,
    what: &str,
) -> Result<GLinMap> {
    let mut cols: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); source.dim()];
    for (src_name, images) in columns {
        let j = source
            .basis_index(src_name)
            .map_err(|_| Error::Unresolved(format!("{what}: source basis '{src_name}'")))?;
        for (tgt_name, coeff) in images {
            let i = target
                .basis_index(tgt_name)
                .map_err(|_| Error::Unresolved(format!("{what}: target basis '{tgt_name}'")))?;
            let c = parse_rat(coeff)
                .map_err(|e| Error::Parse(format!("{what}, column '{src_name}': {e}")))?;
            cols[j].push((i, c));
        }
    }
    for col in &mut cols {
        col.sort_by_key(|(i, _)| *i);
    }
    GLinMap::new(source, target, 0, cols)
}

fn parse_subset_label(label: &str, what: &str) -> Result<Vec<usize>> {
    label
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("{what}: bad subset label '{label}'")))
        })
        .collect()
}

fn resolve(file: WorkspaceFile) -> Result<Workspace> {
    let mut algebras = BTreeMap::new();
    for decl in &file.artin_algebras {
        let mut products = Vec::new();
        for p in &decl.products {
            let value = named_terms(&p.value, &format!("algebra '{}'", decl.name))?;
            products.push((p.left.clone(), p.right.clone(), value));
        }
        let alg = ArtinLocalAlgebra::new(&decl.name, decl.monomials.clone(), products)?;
        if algebras.insert(decl.name.clone(), Arc::new(alg)).is_some() {
            return Err(Error::Malformed(format!("algebra '{}' declared twice", decl.name)));
        }
    }

    let mut lie_algebras = BTreeMap::new();
    for decl in &file.lie_algebras {
        let basis: Vec<(String, i64)> =
            decl.basis.iter().map(|b| (b.name.clone(), b.degree)).collect();
        let mut diff = Vec::new();
        for (src, value) in &decl.differential {
            diff.push((src.clone(), named_terms(value, &format!("algebra '{}'", decl.name))?));
        }
        let mut brackets = Vec::new();
        for b in &decl.brackets {
            let value = named_terms(&b.value, &format!("algebra '{}'", decl.name))?;
            brackets.push((b.left.clone(), b.right.clone(), value));
        }
        let g = Dgla::new(&decl.name, basis, diff, brackets)?;
        if lie_algebras.insert(decl.name.clone(), g).is_some() {
            return Err(Error::Malformed(format!("Lie algebra '{}' declared twice", decl.name)));
        }
    }

    let lie = |name: &str| -> Result<&Arc<Dgla>> {
        lie_algebras
            .get(name)
            .ok_or_else(|| Error::Unresolved(format!("Lie algebra '{name}'")))
    };

    let mut covers = BTreeMap::new();
    for decl in &file.covers {
        let what = format!("cover '{}'", decl.name);
        let nerve = match (&decl.constant, decl.subsets.is_empty()) {
            (Some(constant), true) => {
                if !decl.restrictions.is_empty() {
                    return Err(Error::Malformed(format!(
                        "{what}: constant covers carry identity restrictions"
                    )));
                }
                let g = lie(&constant.algebra)?;
                match &constant.present {
                    PresenceDecl::Keyword(word) if word == "full" => {
                        CoverNerve::constant_full(&decl.name, decl.opens.clone(), g)?
                    }
                    PresenceDecl::Keyword(word) => {
                        return Err(Error::Parse(format!(
                            "{what}: unknown presence keyword '{word}'"
                        )))
                    }
                    PresenceDecl::Subsets(present) => {
                        CoverNerve::constant(&decl.name, decl.opens.clone(), present, g)?
                    }
                }
            }
            (None, false) => {
                let mut table = BTreeMap::new();
                let mut subsets = Vec::new();
                for s in &decl.subsets {
                    let mut key = s.key.clone();
                    key.sort_unstable();
                    let g = Arc::clone(lie(&s.algebra)?);
                    table.insert(key.clone(), Arc::clone(&g));
                    subsets.push((s.key.clone(), g));
                }
                let mut restrictions = Vec::new();
                for r in &decl.restrictions {
                    let mut from = r.from.clone();
                    from.sort_unstable();
                    let mut to = r.to.clone();
                    to.sort_unstable();
                    let (src, tgt) = match (table.get(&from), table.get(&to)) {
                        (Some(a), Some(b)) => (a, b),
                        _ => {
                            return Err(Error::Unresolved(format!(
                                "{what}: restriction {} -> {} references an absent subset",
                                subset_label(&from),
                                subset_label(&to)
                            )))
                        }
                    };
                    let label = format!(
                        "{what}, restriction {} -> {}",
                        subset_label(&from),
                        subset_label(&to)
                    );
                    let map = columns_to_map(src, tgt, &r.columns, &label)?;
                    restrictions.push((r.from.clone(), r.to.clone(), map));
                }
                CoverNerve::new(&decl.name, decl.opens.clone(), subsets, restrictions)?
            }
            (Some(_), false) => {
                return Err(Error::Malformed(format!(
                    "{what}: 'constant' and 'subsets' are mutually exclusive"
                )))
            }
            (None, true) => {
                return Err(Error::Malformed(format!(
                    "{what}: declare either 'constant' or 'subsets'"
                )))
            }
        };
        if covers.insert(decl.name.clone(), Arc::new(nerve)).is_some() {
            return Err(Error::Malformed(format!("cover '{}' declared twice", decl.name)));
        }
    }

    let mut towers = BTreeMap::new();
    for decl in &file.towers {
        let what = format!("tower '{}'", decl.name);
        let nerve = covers
            .get(&decl.cover)
            .ok_or_else(|| Error::Unresolved(format!("{what}: cover '{}'", decl.cover)))?;
        let built = build_cech_scs(nerve)?;
        let levels: Vec<Arc<Dgla>> =
            (0..=built.max_level()).map(|i| Arc::clone(built.level(i))).collect();
        let mut cofaces: Vec<Vec<GLinMap>> = (1..=built.max_level())
            .map(|i| (0..=i).map(|k| built.coface(k, i).clone()).collect())
            .collect();
        for over in &decl.coface_overrides {
            if over.level == 0 || over.level > built.max_level() || over.k > over.level {
                return Err(Error::Malformed(format!(
                    "{what}: no coface ({}, {})",
                    over.k, over.level
                )));
            }
            let label = format!("{what}, coface ({}, {})", over.k, over.level);
            cofaces[over.level - 1][over.k] = columns_to_map(
                &levels[over.level - 1],
                &levels[over.level],
                &over.columns,
                &label,
            )?;
        }
        let scs = ScsDgla::new(&decl.name, levels, cofaces)?;
        if towers.insert(decl.name.clone(), scs).is_some() {
            return Err(Error::Malformed(format!("tower '{}' declared twice", decl.name)));
        }
    }

    let mut sheaf_morphisms = BTreeMap::new();
    let mut morphisms = BTreeMap::new();
    for decl in &file.morphisms {
        let what = format!("morphism '{}'", decl.name);
        let source = covers
            .get(&decl.source_cover)
            .ok_or_else(|| Error::Unresolved(format!("{what}: cover '{}'", decl.source_cover)))?;
        let target = covers
            .get(&decl.target_cover)
            .ok_or_else(|| Error::Unresolved(format!("{what}: cover '{}'", decl.target_cover)))?;
        let mut maps = Vec::new();
        for (label, columns) in &decl.components {
            let key = parse_subset_label(label, &what)?;
            let (src_g, tgt_g) = match (source.algebra(&key), target.algebra(&key)) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Unresolved(format!(
                        "{what}: subset '{label}' is not present on both covers"
                    )))
                }
            };
            let map = columns_to_map(src_g, tgt_g, columns, &format!("{what}, subset '{label}'"))?;
            maps.push((key, map));
        }
        let sheaf = LieSheafMorphism::new(&decl.name, source, target, maps)?;
        let source_tower = towers
            .get(&decl.source_tower)
            .ok_or_else(|| Error::Unresolved(format!("{what}: tower '{}'", decl.source_tower)))?;
        let target_tower = towers
            .get(&decl.target_tower)
            .ok_or_else(|| Error::Unresolved(format!("{what}: tower '{}'", decl.target_tower)))?;
        let induced = sheaf.induced(source_tower, target_tower)?;
        if sheaf_morphisms.insert(decl.name.clone(), sheaf).is_some() {
            return Err(Error::Malformed(format!("morphism '{}' declared twice", decl.name)));
        }
        morphisms.insert(decl.name.clone(), induced);
    }

    let mut elements = Vec::new();
    let mut element_names = BTreeSet::new();
    for decl in &file.elements {
        let what = format!("element '{}'", decl.name);
        if !element_names.insert(decl.name.clone()) {
            return Err(Error::Malformed(format!("element '{}' declared twice", decl.name)));
        }
        let tower = towers
            .get(&decl.tower)
            .ok_or_else(|| Error::Unresolved(format!("{what}: tower '{}'", decl.tower)))?;
        let algebra = algebras
            .get(&decl.algebra)
            .ok_or_else(|| Error::Unresolved(format!("{what}: algebra '{}'", decl.algebra)))?;
        let mut value = TotElement::zero(tower);
        for term in &decl.terms {
            if term.level > tower.max_level() {
                return Err(Error::Malformed(format!(
                    "{what}: level {} exceeds the tower depth",
                    term.level
                )));
            }
            let g = tower.level(term.level);
            let b = g
                .basis_index(&term.basis)
                .map_err(|_| Error::Unresolved(format!("{what}: basis '{}'", term.basis)))?;
            let m = algebra
                .monomial_index(&term.monomial)
                .map_err(|_| Error::Unresolved(format!("{what}: monomial '{}'", term.monomial)))?;
            let c = parse_rat(&term.coeff)
                .map_err(|e| Error::Parse(format!("{what}: {e}")))?;
            let part = GElement::from_coords(g, vec![((b, CoeffKey::Mono(m)), c)]);
            value = value.add(&TotElement::from_component(tower, term.level, part)?)?;
        }
        elements.push(NamedElement {
            name: decl.name.clone(),
            tower: Arc::clone(tower),
            algebra: Arc::clone(algebra),
            value,
        });
    }

    let mut jobs = Vec::new();
    let mut job_names = BTreeSet::new();
    for decl in &file.jobs {
        let what = format!("job '{}'", decl.name);
        if !job_names.insert(decl.name.clone()) {
            return Err(Error::Malformed(format!("job '{}' declared twice", decl.name)));
        }
        let kind = match decl.command.as_str() {
            "main-theorem" => JobKind::MainTheorem,
            "obstruction-naturality" => JobKind::ObstructionNaturality,
            other => {
                return Err(Error::Parse(format!(
                    "{what}: '{other}' is not a declarable job command"
                )))
            }
        };
        let tower = match &decl.tower {
            Some(name) => Some(Arc::clone(towers.get(name).ok_or_else(|| {
                Error::Unresolved(format!("{what}: tower '{name}'"))
            })?)),
            None => None,
        };
        let algebra = match &decl.algebra {
            Some(name) => Some(Arc::clone(algebras.get(name).ok_or_else(|| {
                Error::Unresolved(format!("{what}: algebra '{name}'"))
            })?)),
            None => None,
        };
        let morphism = match &decl.morphism {
            Some(name) => {
                if !morphisms.contains_key(name) {
                    return Err(Error::Unresolved(format!("{what}: morphism '{name}'")));
                }
                Some(name.clone())
            }
            None => None,
        };
        let seed = match &decl.seed {
            Some(name) => Some(
                elements
                    .iter()
                    .position(|e| &e.name == name)
                    .ok_or_else(|| Error::Unresolved(format!("{what}: element '{name}'")))?,
            ),
            None => None,
        };
        match kind {
            JobKind::MainTheorem => {
                if tower.is_none() || algebra.is_none() {
                    return Err(Error::Malformed(format!(
                        "{what}: main-theorem jobs need a tower and an algebra"
                    )));
                }
            }
            JobKind::ObstructionNaturality => {
                let (m_name, s_idx) = match (&morphism, seed) {
                    (Some(m), Some(s)) => (m, s),
                    _ => {
                        return Err(Error::Malformed(format!(
                            "{what}: obstruction-naturality jobs need a morphism and a seed"
                        )))
                    }
                };
                let m = &morphisms[m_name];
                let el = &elements[s_idx];
                if el.tower.name != m.source.name {
                    return Err(Error::Malformed(format!(
                        "{what}: seed '{}' does not live on the source tower",
                        el.name
                    )));
                }
                if let Some(a) = &algebra {
                    if a.name != el.algebra.name {
                        return Err(Error::Malformed(format!(
                            "{what}: the job algebra differs from the seed's"
                        )));
                    }
                }
            }
        }
        jobs.push(ResolvedJob {
            name: decl.name.clone(),
            kind,
            tower,
            algebra,
            morphism,
            seed,
            instances: decl.instances,
            rng_seed: decl.rng_seed,
        });
    }

    Ok(Workspace {
        algebras,
        lie_algebras,
        covers,
        towers,
        sheaf_morphisms,
        morphisms,
        elements,
        jobs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glie::CoeffRing;

    fn minimal_text() -> String {
        r#"{
  "artin_algebras": [
    {"name": "Q[t]/(t^3)", "monomials": ["t", "t2"],
     "products": [{"left": "t", "right": "t", "value": {"t2": "1"}}]}
  ],
  "lie_algebras": [
    {"name": "sl2",
     "basis": [{"name": "e"}, {"name": "f"}, {"name": "h"}],
     "brackets": [
       {"left": "e", "right": "f", "value": {"h": "1"}},
       {"left": "h", "right": "e", "value": {"e": "2"}},
       {"left": "h", "right": "f", "value": {"f": "-2"}}
     ]}
  ],
  "covers": [
    {"name": "pair", "opens": ["U1", "U2"],
     "constant": {"algebra": "sl2", "present": "full"}}
  ],
  "towers": [{"name": "pair", "cover": "pair"}],
  "elements": [
    {"name": "m0", "tower": "pair", "algebra": "Q[t]/(t^3)",
     "terms": [{"level": 1, "basis": "e@1,2", "monomial": "t", "coeff": "1"}]}
  ],
  "jobs": [
    {"name": "battery", "command": "main-theorem", "tower": "pair",
     "algebra": "Q[t]/(t^3)", "instances": 4, "rng_seed": 11}
  ]
}"#
        .to_string()
    }

    #[test]
    fn a_minimal_workspace_resolves() {
        let ws = parse_str(&minimal_text()).unwrap();
        assert_eq!(ws.algebras.len(), 1);
        assert_eq!(ws.towers["pair"].max_level(), 1);
        assert_eq!(ws.towers["pair"].level(0).dim(), 6);
        assert_eq!(ws.elements.len(), 1);
        let el = &ws.elements[0];
        assert_eq!(el.value.total_degree(), Some(1));
        assert_eq!(ws.jobs.len(), 1);
        assert_eq!(ws.jobs[0].kind, JobKind::MainTheorem);
        assert_eq!(ws.jobs[0].instances, Some(4));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_str("{\n  \"artin_algebras\": [\n    {\"nam\": 3}\n  ]\n}").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("line"), "got: {text}");
        assert!(text.contains("column"), "got: {text}");
    }

    #[test]
    fn unresolved_references_are_rejected() {
        let broken = minimal_text().replace("\"cover\": \"pair\"", "\"cover\": \"missing\"");
        assert!(matches!(parse_str(&broken), Err(Error::Unresolved(_))));
        let broken = minimal_text().replace("\"basis\": \"e@1,2\"", "\"basis\": \"zz\"");
        assert!(matches!(parse_str(&broken), Err(Error::Unresolved(_))));
        let dup = minimal_text().replace(
            "\"towers\": [{\"name\": \"pair\", \"cover\": \"pair\"}]",
            "\"towers\": [{\"name\": \"pair\", \"cover\": \"pair\"}, {\"name\": \"pair\", \"cover\": \"pair\"}]",
        );
        assert!(matches!(parse_str(&dup), Err(Error::Malformed(_))));
    }

    #[test]
    fn coface_overrides_replace_single_entries() {
        let text = minimal_text().replace(
            "\"towers\": [{\"name\": \"pair\", \"cover\": \"pair\"}]",
            r#""towers": [{"name": "pair", "cover": "pair",
              "coface_overrides": [{"level": 1, "k": 0,
                "columns": {"e@2": {"e@1,2": "1", "f@1,2": "1"},
                            "f@2": {"f@1,2": "1"},
                            "h@2": {"h@1,2": "1"}}}]}]"#,
        );
        let ws = parse_str(&text).unwrap();
        let tower = &ws.towers["pair"];
        let x = GElement::basis(tower.level(0), tower.level(0).basis_index("e@2").unwrap());
        let image = tower.coface(0, 1).apply(&x).unwrap();
        let expected = GElement::basis(tower.level(1), tower.level(1).basis_index("e@1,2").unwrap())
            .add(&GElement::basis(tower.level(1), tower.level(1).basis_index("f@1,2").unwrap()))
            .unwrap();
        assert_eq!(image, expected);
    }

    fn corpus_path(file: &str) -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(file)
    }

    fn assert_same_tower(a: &Arc<ScsDgla>, b: &Arc<ScsDgla>) {
        assert_eq!(a.max_level(), b.max_level(), "'{}' vs '{}'", a.name, b.name);
        for i in 0..=a.max_level() {
            assert_eq!(a.level(i).dim(), b.level(i).dim());
            for j in 0..a.level(i).dim() {
                assert_eq!(a.level(i).basis_name(j), b.level(i).basis_name(j));
            }
        }
        for i in 1..=a.max_level() {
            for k in 0..=i {
                for j in 0..a.level(i - 1).dim() {
                    assert_eq!(
                        a.coface(k, i).column(j),
                        b.coface(k, i).column(j),
                        "coface ({k}, {i}) column {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn the_shipped_corpus_matches_the_builtin_towers() {
        let ws = load(&corpus_path("main.json")).unwrap();
        assert_same_tower(&ws.towers["sl2-three-opens"], &crate::corpus::sl2_three_opens());
        assert_same_tower(&ws.towers["abelian-circle"], &crate::corpus::abelian_circle());
        assert_eq!(ws.jobs.len(), 1);
        assert_eq!(ws.jobs[0].instances, Some(100));
        assert_eq!(ws.jobs[0].rng_seed, Some(7));
        for el in &ws.elements {
            assert_eq!(el.value.total_degree(), Some(1));
            assert!(el.value.tot_differential().unwrap().is_zero(), "'{}' is open", el.name);
        }
    }

    #[test]
    fn the_naturality_corpus_matches_the_builtin_torus() {
        let ws = load(&corpus_path("naturality.json")).unwrap();
        let (gl2_torus, q_torus, _) = crate::corpus::torus_trace_setup();
        assert_same_tower(&ws.towers["gl2-torus"], &gl2_torus);
        assert_same_tower(&ws.towers["q-torus"], &q_torus);
        assert!(ws.morphisms["trace"].validate().is_clean());
        let seed = &ws.elements[0];
        assert_eq!(seed.value.total_degree(), Some(1));
        assert!(seed.value.tot_differential().unwrap().is_zero());
        let ring = CoeffRing::Artin(Arc::clone(&seed.algebra));
        let order = seed.value.components.iter().filter_map(|c| c.min_filtration(&ring)).min();
        assert_eq!(order, Some(1));
    }

    #[test]
    fn the_negative_corpus_matches_the_corrupted_builder() {
        let ws = load(&corpus_path("negative_corrupted_coface.json")).unwrap();
        let tower = &ws.towers["sl2-three-opens-corrupted"];
        assert_same_tower(tower, &crate::corpus::corrupted_sl2_three_opens());
        let report = tower.validate();
        assert!(report.violations().iter().any(|v| v.kind == "cosimplicial-identity"));
    }
}
