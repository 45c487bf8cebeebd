//! Finite standard models, dependence models, and the transformations
//! between them: team extraction and embedding, the full team, dropping
//! unnamed facts, distinguishing, the product lift, and the expansion that
//! interprets the dependence proxy relations.
//!
//! Domain elements are opaque ids held in a sorted list; everywhere else
//! they are referenced by index. All values are immutable once built.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::Error;
use crate::mcheck::{self, BisimRelation};
use crate::syntax::{ExpandedSignature, LfdFormula, LfdVar, Signature, VarMap, VarSet};
use crate::Result;

/// Index into a model's domain list.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ElemId(pub u32);

/// One relation's interpretation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<ElemId>>,
}

/// An ordinary first-order structure over a finite domain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StandardModel {
    domain: Vec<String>,
    pub interp: BTreeMap<String, Relation>,
}

impl StandardModel {
    /// Builds a model from element names and facts given by name.
    pub fn new(
        mut domain: Vec<String>,
        facts: Vec<(String, usize, Vec<Vec<String>>)>,
    ) -> Result<StandardModel> {
        domain.sort();
        domain.dedup();
        let mut m = StandardModel {
            domain,
            interp: BTreeMap::new(),
        };
        for (rel, arity, tuples) in facts {
            let mut set = BTreeSet::new();
            for t in tuples {
                if t.len() != arity {
                    return Err(Error::ArityMismatch {
                        rel: rel.clone(),
                        expected: arity,
                        got: t.len(),
                    });
                }
                let ids = t
                    .iter()
                    .map(|e| {
                        m.elem(e)
                            .ok_or_else(|| Error::Validation(format!("unknown element `{e}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                set.insert(ids);
            }
            if m.interp
                .insert(rel.clone(), Relation { arity, tuples: set })
                .is_some()
            {
                return Err(Error::Validation(format!("duplicate relation `{rel}`")));
            }
        }
        Ok(m)
    }

    /// Empty interpretation for every relation of the signature.
    pub fn empty(sig: &Signature, domain: Vec<String>) -> Result<StandardModel> {
        let mut m = StandardModel::new(domain, Vec::new())?;
        for (rel, arity) in sig.relations() {
            m.interp.insert(
                rel.to_string(),
                Relation {
                    arity,
                    tuples: BTreeSet::new(),
                },
            );
        }
        Ok(m)
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn domain_size(&self) -> usize {
        self.domain.len()
    }

    pub fn elem(&self, name: &str) -> Option<ElemId> {
        self.domain
            .binary_search_by(|d| d.as_str().cmp(name))
            .ok()
            .map(|i| ElemId(i as u32))
    }

    pub fn elem_name(&self, id: ElemId) -> &str {
        &self.domain[id.0 as usize]
    }

    pub fn elems(&self) -> impl Iterator<Item = ElemId> {
        (0..self.domain.len() as u32).map(ElemId)
    }

    /// Truth of a ground atom; errors on unknown relation or bad arity.
    pub fn holds(&self, rel: &str, tuple: &[ElemId]) -> Result<bool> {
        let r = self
            .interp
            .get(rel)
            .ok_or_else(|| Error::UnknownRelation(rel.to_string()))?;
        if r.arity != tuple.len() {
            return Err(Error::ArityMismatch {
                rel: rel.to_string(),
                expected: r.arity,
                got: tuple.len(),
            });
        }
        Ok(r.tuples.contains(tuple))
    }

    /// Like [`holds`](Self::holds) but treats a missing relation as empty.
    pub fn holds_or_empty(&self, rel: &str, tuple: &[ElemId]) -> bool {
        self.interp
            .get(rel)
            .map(|r| r.tuples.contains(tuple))
            .unwrap_or(false)
    }

    pub fn add_fact(&mut self, rel: &str, arity: usize, tuple: Vec<ElemId>) {
        self.interp
            .entry(rel.to_string())
            .or_insert_with(|| Relation {
                arity,
                tuples: BTreeSet::new(),
            })
            .tuples
            .insert(tuple);
    }

    pub fn validate(&self) -> Result<()> {
        for (rel, r) in &self.interp {
            for t in &r.tuples {
                if t.len() != r.arity {
                    return Err(Error::ArityMismatch {
                        rel: rel.clone(),
                        expected: r.arity,
                        got: t.len(),
                    });
                }
                if t.iter().any(|e| e.0 as usize >= self.domain.len()) {
                    return Err(Error::Validation(format!(
                        "tuple element out of domain in `{rel}`"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A total assignment of the LFD variables, stored in canonical order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Assignment(pub Vec<ElemId>);

impl Assignment {
    pub fn get(&self, v: LfdVar) -> ElemId {
        self.0[v.0 as usize]
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn agrees_on(&self, other: &Assignment, set: VarSet) -> bool {
        set.iter().all(|v| self.get(v) == other.get(v))
    }

    /// Values of a variable set in canonical order.
    pub fn values(&self, set: VarSet) -> Vec<ElemId> {
        set.iter().map(|v| self.get(v)).collect()
    }

    pub fn image(&self) -> BTreeSet<ElemId> {
        self.0.iter().copied().collect()
    }

    /// The agreement set of two assignments.
    pub fn agreement(&self, other: &Assignment) -> VarSet {
        (0..self.0.len() as u8)
            .map(LfdVar)
            .filter(|v| self.get(*v) == other.get(*v))
            .collect()
    }
}

/// A standard model together with a team of admissible assignments.
///
/// Empty teams are representable as an edge case; evaluation entry points
/// reject them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DependenceModel {
    pub base: StandardModel,
    pub team: BTreeSet<Assignment>,
}

impl DependenceModel {
    pub fn new(base: StandardModel, team: BTreeSet<Assignment>) -> DependenceModel {
        DependenceModel { base, team }
    }

    pub fn validate(&self, sig: &Signature) -> Result<()> {
        self.base.validate()?;
        for s in &self.team {
            if s.k() != sig.k() {
                return Err(Error::Validation(format!(
                    "assignment has {} entries, signature has {} variables",
                    s.k(),
                    sig.k()
                )));
            }
            if s.0.iter().any(|e| e.0 as usize >= self.base.domain_size()) {
                return Err(Error::Validation("assignment value out of domain".into()));
            }
        }
        Ok(())
    }

    /// Union of the images of all team members.
    pub fn team_image(&self) -> BTreeSet<ElemId> {
        self.team.iter().flat_map(|s| s.image()).collect()
    }
}

// ---------------------------------------------------------------------------
// JSON model files
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RelationFile {
    arity: usize,
    tuples: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    domain: Vec<String>,
    relations: BTreeMap<String, RelationFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    team: Option<Vec<BTreeMap<String, String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vars: Option<Vec<String>>,
}

fn model_to_file(m: &StandardModel) -> ModelFile {
    ModelFile {
        domain: m.domain.clone(),
        relations: m
            .interp
            .iter()
            .map(|(rel, r)| {
                (
                    rel.clone(),
                    RelationFile {
                        arity: r.arity,
                        tuples: r
                            .tuples
                            .iter()
                            .map(|t| t.iter().map(|e| m.elem_name(*e).to_string()).collect())
                            .collect(),
                    },
                )
            })
            .collect(),
        team: None,
        vars: None,
    }
}

fn model_from_file(f: &ModelFile) -> Result<StandardModel> {
    let m = StandardModel::new(
        f.domain.clone(),
        f.relations
            .iter()
            .map(|(rel, r)| (rel.clone(), r.arity, r.tuples.clone()))
            .collect(),
    )?;
    m.validate()?;
    Ok(m)
}

/// Canonical JSON for a standard model: keys sorted, tuples sorted.
pub fn standard_to_json(m: &StandardModel) -> String {
    serde_json::to_string(&model_to_file(m)).expect("model serialization cannot fail")
}

pub fn standard_from_json(src: &str) -> Result<StandardModel> {
    let file: ModelFile = serde_json::from_str(src)?;
    model_from_file(&file)
}

/// Canonical JSON for a dependence model, with the team spelled out by
/// variable name.
pub fn dependence_to_json(dm: &DependenceModel, sig: &Signature) -> String {
    let mut file = model_to_file(&dm.base);
    file.vars = Some(sig.var_names().to_vec());
    file.team = Some(
        dm.team
            .iter()
            .map(|s| {
                sig.vars()
                    .map(|v| {
                        (
                            sig.var_name(v).to_string(),
                            dm.base.elem_name(s.get(v)).to_string(),
                        )
                    })
                    .collect()
            })
            .collect(),
    );
    serde_json::to_string(&file).expect("model serialization cannot fail")
}

/// Reads a dependence model. When `sig` is absent the file must carry a
/// `vars` list; relation arities come from the file either way.
pub fn dependence_from_json(
    src: &str,
    sig: Option<&Signature>,
) -> Result<(Signature, DependenceModel)> {
    let file: ModelFile = serde_json::from_str(src)?;
    let base = model_from_file(&file)?;
    let sig = match sig {
        Some(s) => {
            if let Some(vars) = &file.vars {
                if vars != s.var_names() {
                    return Err(Error::Validation(
                        "model file variable list disagrees with the signature".into(),
                    ));
                }
            }
            s.clone()
        }
        None => {
            let vars = file.vars.clone().ok_or_else(|| {
                Error::Validation("model file has no vars list and no signature given".into())
            })?;
            Signature::new(
                file.relations
                    .iter()
                    .filter(|(_, r)| r.arity > 0)
                    .map(|(n, r)| (n.clone(), r.arity)),
                vars,
            )?
        }
    };
    let mut team = BTreeSet::new();
    for entry in file.team.unwrap_or_default() {
        let mut values = Vec::with_capacity(sig.k());
        for v in sig.var_names() {
            let name = entry.get(v).ok_or_else(|| {
                Error::Validation(format!("team entry missing variable `{v}`"))
            })?;
            let id = base
                .elem(name)
                .ok_or_else(|| Error::Validation(format!("unknown element `{name}`")))?;
            values.push(id);
        }
        if entry.len() != sig.k() {
            return Err(Error::Validation("team entry has extra variables".into()));
        }
        team.insert(Assignment(values));
    }
    let dm = DependenceModel::new(base, team);
    dm.validate(&sig)?;
    Ok((sig, dm))
}

// ---------------------------------------------------------------------------
// Transformations
// ---------------------------------------------------------------------------

/// Extracts a team from the admissibility relation of a standard model over
/// the expanded signature, removing that relation from the relational part.
pub fn extract_team(exp: &ExpandedSignature, m: &StandardModel) -> Result<DependenceModel> {
    let a = m
        .interp
        .get(&exp.a_name)
        .ok_or_else(|| Error::UnknownRelation(exp.a_name.clone()))?;
    if a.arity != exp.k() {
        return Err(Error::ArityMismatch {
            rel: exp.a_name.clone(),
            expected: exp.k(),
            got: a.arity,
        });
    }
    let team: BTreeSet<Assignment> = a.tuples.iter().map(|t| Assignment(t.clone())).collect();
    let mut base = m.clone();
    base.interp.remove(&exp.a_name);
    Ok(DependenceModel::new(base, team))
}

/// Inverse of [`extract_team`]: interprets the admissibility relation as the
/// set of team value tuples.
pub fn embed_team(exp: &ExpandedSignature, dm: &DependenceModel) -> Result<StandardModel> {
    if dm.base.interp.contains_key(&exp.a_name) {
        return Err(Error::Validation(format!(
            "model already interprets `{}`",
            exp.a_name
        )));
    }
    let mut m = dm.base.clone();
    m.interp.insert(
        exp.a_name.clone(),
        Relation {
            arity: exp.k(),
            tuples: dm.team.iter().map(|s| s.0.clone()).collect(),
        },
    );
    Ok(m)
}

/// The full dependence model: every total assignment is admissible.
pub fn full_team(sig: &Signature, m: &StandardModel, caps: &Caps) -> Result<DependenceModel> {
    let n = m.domain_size();
    if n == 0 {
        return Err(Error::Validation("empty domain".into()));
    }
    let size = n.checked_pow(sig.k() as u32).unwrap_or(usize::MAX);
    if size > caps.team_cap {
        return Err(Error::ResourceCap(format!(
            "full team would hold {size} assignments (cap {})",
            caps.team_cap
        )));
    }
    let mut team = BTreeSet::new();
    let mut current = vec![ElemId(0); sig.k()];
    loop {
        team.insert(Assignment(current.clone()));
        // Odometer over the domain.
        let mut i = 0;
        loop {
            if i == current.len() {
                return Ok(DependenceModel::new(m.clone(), team));
            }
            if (current[i].0 as usize) + 1 < n {
                current[i].0 += 1;
                break;
            }
            current[i].0 = 0;
            i += 1;
        }
    }
}

/// Throws away the facts not witnessed inside the image of a single team
/// member. The domain is unchanged.
pub fn drop_unnamed_facts(dm: &DependenceModel) -> StandardModel {
    let images: Vec<BTreeSet<ElemId>> = dm.team.iter().map(|s| s.image()).collect();
    let mut m = dm.base.clone();
    for r in m.interp.values_mut() {
        r.tuples.retain(|t| {
            images
                .iter()
                .any(|img| t.iter().all(|e| img.contains(e)))
        });
    }
    m
}

/// True when every element assigned anywhere in the team is assigned by a
/// unique variable.
pub fn is_distinguished(dm: &DependenceModel) -> bool {
    let mut owner: BTreeMap<ElemId, LfdVar> = BTreeMap::new();
    for s in &dm.team {
        for (i, e) in s.0.iter().enumerate() {
            let v = LfdVar(i as u8);
            match owner.get(e) {
                Some(prev) if *prev != v => return false,
                _ => {
                    owner.insert(*e, v);
                }
            }
        }
    }
    true
}

/// Rebuilds a dependence model over variable-tagged values so that it becomes
/// distinguished, returning the relation pairing each assignment with its
/// tagged copy. That relation is a dependence bisimulation.
pub fn distinguish(sig: &Signature, dm: &DependenceModel) -> (DependenceModel, BisimRelation) {
    let mut names = BTreeSet::new();
    for s in &dm.team {
        for v in sig.vars() {
            names.insert(format!("{}:{}", sig.var_name(v), dm.base.elem_name(s.get(v))));
        }
    }
    let domain: Vec<String> = names.into_iter().collect();
    let tag = |v: LfdVar, e: ElemId| -> ElemId {
        let name = format!("{}:{}", sig.var_name(v), dm.base.elem_name(e));
        ElemId(
            domain
                .binary_search(&name)
                .expect("tagged element present") as u32,
        )
    };

    let mut interp: BTreeMap<String, Relation> = BTreeMap::new();
    for (rel, r) in &dm.base.interp {
        let mut tuples = BTreeSet::new();
        for s in &dm.team {
            for combo in var_tuples(sig.k(), r.arity) {
                let values: Vec<ElemId> = combo.iter().map(|v| s.get(*v)).collect();
                if r.tuples.contains(&values) {
                    tuples.insert(combo.iter().map(|v| tag(*v, s.get(*v))).collect());
                }
            }
        }
        interp.insert(
            rel.clone(),
            Relation {
                arity: r.arity,
                tuples,
            },
        );
    }

    let mut team = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    for s in &dm.team {
        let tagged = Assignment(sig.vars().map(|v| tag(v, s.get(v))).collect());
        team.insert(tagged.clone());
        pairs.insert((s.clone(), tagged));
    }
    (
        DependenceModel::new(StandardModel { domain, interp }, team),
        BisimRelation { pairs },
    )
}

/// All tuples of LFD variables of the given length, lexicographic.
pub fn var_tuples(k: usize, len: usize) -> Vec<Vec<LfdVar>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * k);
        for prefix in &out {
            for v in 0..k as u8 {
                let mut t = prefix.clone();
                t.push(LfdVar(v));
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Lifts a standard model with a guarded assignment into a distinguished
/// dependence model over the product of the domain with the variable set.
///
/// Returns the model, a variable map identifying first-order variables with
/// LFD variables (injective exactly on distinct values), and an admissible
/// assignment tracking the input assignment through the map.
pub fn lift_distinguished(
    sig: &Signature,
    m: &StandardModel,
    s: &BTreeMap<String, ElemId>,
    caps: &Caps,
) -> Result<(DependenceModel, VarMap, Assignment)> {
    let k = sig.k();
    if sig.max_arity() > k {
        return Err(Error::Validation(format!(
            "need at least {} variables for the maximum relation arity",
            sig.max_arity()
        )));
    }
    if m.domain_size() == 0 {
        return Err(Error::Validation("empty domain".into()));
    }
    let image: BTreeSet<ElemId> = s.values().copied().collect();
    let guarded = m.interp.values().any(|r| {
        r.tuples
            .iter()
            .any(|t| image.iter().all(|e| t.contains(e)))
    });
    if !guarded && !image.is_empty() {
        return Err(Error::Validation("assignment is not guarded".into()));
    }
    let team_size = m
        .domain_size()
        .checked_pow(k as u32)
        .unwrap_or(usize::MAX);
    if team_size > caps.team_cap {
        return Err(Error::ResourceCap(format!(
            "lifted team would hold {team_size} assignments (cap {})",
            caps.team_cap
        )));
    }

    let domain: Vec<String> = m
        .domain()
        .iter()
        .flat_map(|e| {
            sig.var_names()
                .iter()
                .map(move |v| format!("{v}:{e}"))
        })
        .collect();
    let mut out = StandardModel::new(domain, Vec::new())?;
    let pair = |e: ElemId, v: LfdVar| -> ElemId {
        out.elem(&format!("{}:{}", sig.var_name(v), m.elem_name(e)))
            .expect("product element present")
    };

    for (rel, r) in &m.interp {
        out.interp.insert(
            rel.clone(),
            Relation {
                arity: r.arity,
                tuples: BTreeSet::new(),
            },
        );
        for t in &r.tuples {
            for combo in var_tuples(k, r.arity) {
                let ok = (0..t.len()).all(|i| {
                    (0..t.len()).all(|j| t[i] == t[j] || combo[i] != combo[j])
                });
                if ok {
                    let tagged = (0..t.len()).map(|i| pair(t[i], combo[i])).collect();
                    out.interp.get_mut(rel).unwrap().tuples.insert(tagged);
                }
            }
        }
    }

    // Every assignment sending each variable to one of its own tagged values.
    let mut team = BTreeSet::new();
    let mut counters = vec![0usize; k];
    let n = m.domain_size();
    loop {
        let assignment = Assignment(
            (0..k)
                .map(|i| pair(ElemId(counters[i] as u32), LfdVar(i as u8)))
                .collect(),
        );
        team.insert(assignment);
        let mut i = 0;
        loop {
            if i == k {
                break;
            }
            if counters[i] + 1 < n {
                counters[i] += 1;
                break;
            }
            counters[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }

    // Group the first-order variables by their value; equal values share an
    // LFD variable, distinct values get distinct ones.
    let mut rho = BTreeMap::new();
    let mut value_var: BTreeMap<ElemId, LfdVar> = BTreeMap::new();
    let mut next = 0u8;
    for (x, e) in s {
        let v = *value_var.entry(*e).or_insert_with(|| {
            let v = LfdVar(next);
            next += 1;
            v
        });
        rho.insert(x.clone(), v);
    }
    if next as usize > k {
        return Err(Error::Validation(
            "assignment takes more distinct values than there are variables".into(),
        ));
    }

    let least = ElemId(0);
    let mut t_values = Vec::with_capacity(k);
    for i in 0..k {
        let v = LfdVar(i as u8);
        let source = value_var
            .iter()
            .find(|(_, mapped)| **mapped == v)
            .map(|(e, _)| *e)
            .unwrap_or(least);
        t_values.push(pair(source, v));
    }
    let t = Assignment(t_values);
    let dm = DependenceModel::new(out, team);
    assert!(dm.team.contains(&t), "tracked assignment must be admissible");
    Ok((dm, VarMap(rho), t))
}

/// Expands a dependence model to the full signature: the admissibility
/// relation lists the team's value tuples, and each proxy relation collects
/// the canonical value tuples of the assignments satisfying the
/// corresponding dependence statement, as judged by the model checker.
pub fn expand_dependence(exp: &ExpandedSignature, dm: &DependenceModel) -> Result<StandardModel> {
    let mut m = embed_team(exp, dm)?;
    let k = exp.k();
    for v in VarSet::all_subsets(k) {
        for u in VarSet::all_subsets(k) {
            let rel = exp.r_name(v, u).to_string();
            if m.interp.contains_key(&rel) {
                return Err(Error::Validation(format!(
                    "model already interprets `{rel}`"
                )));
            }
            let statement = LfdFormula::conj_all(u.iter().map(|uv| LfdFormula::dep(v, uv)));
            let mut tuples = BTreeSet::new();
            for s in &dm.team {
                let holds = match &statement {
                    Some(f) => mcheck::eval_lfd(dm, s, f)?,
                    None => true,
                };
                if holds {
                    tuples.insert(s.values(v));
                }
            }
            m.interp.insert(
                rel,
                Relation {
                    arity: v.len(),
                    tuples,
                },
            );
        }
    }
    Ok(m)
}
