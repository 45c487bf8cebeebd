//! Types over a formula closure, type-model verification, complete
//! satisfiability for the dependence language by type elimination, bounded
//! unraveling of certificates into concrete dependence models, and the
//! reconstruction of a dependence model from a standard model of the guarded
//! reduction.
//!
//! A type is a bitset over the canonical closure order. A type model is a
//! set of types satisfying the witness and universal conditions; it
//! certifies satisfiability, and unraveling turns it into a concrete model.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::caps::Caps;
use crate::error::Error;
use crate::mcheck::eval_fo;
use crate::models::{Assignment, DependenceModel, ElemId, StandardModel};
use crate::syntax::print::print_lfd;
use crate::syntax::{
    closure, single_negation, ExpandedSignature, FoFormula, LfdFormula, LfdVar, Signature, VarSet,
};
use crate::translate::{gf_translation, non_decomposable, setup_conjuncts};
use crate::Result;

/// A type as a bitset over the closure order.
pub type TypeBits = u128;

pub fn bit(bits: TypeBits, i: usize) -> bool {
    bits & (1 << i) != 0
}

enum NodeKind {
    Atom,
    Dep(VarSet, LfdVar),
    And(usize, usize),
    Not(usize),
    E(VarSet, usize),
}

/// The closure of a formula with every index precomputed: structural views
/// of each member, free-variable masks per variable subset, and the
/// positions of all dependence atoms.
pub struct ClosureTable {
    pub sig: Signature,
    pub formulas: Vec<LfdFormula>,
    pub psi: usize,
    index: HashMap<LfdFormula, usize>,
    kinds: Vec<NodeKind>,
    pub free: Vec<VarSet>,
    mask_free_in: Vec<TypeBits>,
    dep_idx: Vec<Vec<usize>>,
    e_list: Vec<(usize, VarSet, usize)>,
    and_list: Vec<(usize, usize, usize)>,
    not_list: Vec<(usize, usize)>,
    last_dep: usize,
    pub nondecomp: Vec<usize>,
}

impl ClosureTable {
    pub fn new(sig: &Signature, psi: &LfdFormula, caps: &Caps) -> Result<ClosureTable> {
        let formulas = closure(sig, psi, caps.closure_cap)?;
        let k = sig.k();
        let index: HashMap<LfdFormula, usize> = formulas
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
        let mut kinds = Vec::with_capacity(formulas.len());
        let mut e_list = Vec::new();
        let mut and_list = Vec::new();
        let mut not_list = Vec::new();
        let mut nondecomp = Vec::new();
        let mut dep_idx = vec![vec![usize::MAX; k]; 1 << k];
        let mut last_dep = 0;
        for (i, f) in formulas.iter().enumerate() {
            let kind = match f {
                LfdFormula::Atom(..) => {
                    nondecomp.push(i);
                    NodeKind::Atom
                }
                LfdFormula::Dep(v, u) => {
                    nondecomp.push(i);
                    dep_idx[v.0 as usize][u.0 as usize] = i;
                    last_dep = i;
                    NodeKind::Dep(*v, *u)
                }
                LfdFormula::And(a, b) => {
                    and_list.push((i, index[&**a], index[&**b]));
                    NodeKind::And(index[&**a], index[&**b])
                }
                LfdFormula::Not(a) => {
                    not_list.push((i, index[&**a]));
                    NodeKind::Not(index[&**a])
                }
                LfdFormula::E(v, a) => {
                    nondecomp.push(i);
                    e_list.push((i, *v, index[&**a]));
                    NodeKind::E(*v, index[&**a])
                }
            };
            kinds.push(kind);
        }
        let free: Vec<VarSet> = formulas.iter().map(crate::syntax::free_vars_lfd).collect();
        let mask_free_in = VarSet::all_subsets(k)
            .map(|v| {
                let mut mask: TypeBits = 0;
                for (i, f) in free.iter().enumerate() {
                    if f.is_subset(v) {
                        mask |= 1 << i;
                    }
                }
                mask
            })
            .collect();
        Ok(ClosureTable {
            sig: sig.clone(),
            formulas,
            psi: index[psi],
            index,
            kinds,
            free,
            mask_free_in,
            dep_idx,
            e_list,
            and_list,
            not_list,
            last_dep,
            nondecomp,
        })
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn index_of(&self, f: &LfdFormula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn k(&self) -> usize {
        self.sig.k()
    }

    fn sentence_mask(&self) -> TypeBits {
        self.mask_free_in[0]
    }
}

/// The failing type condition, when a bitset is not a type.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TypeViolation {
    NegConsistency(usize),
    AndConsistency(usize),
    EConsistency(usize),
    Projection(VarSet, LfdVar),
    Transitivity(VarSet, VarSet),
}

/// Checks the five type conditions.
pub fn check_type(t: &ClosureTable, bits: TypeBits) -> std::result::Result<(), TypeViolation> {
    for &(i, inner) in &t.not_list {
        if bit(bits, i) == bit(bits, inner) {
            return Err(TypeViolation::NegConsistency(i));
        }
    }
    for &(i, a, b) in &t.and_list {
        if bit(bits, i) != (bit(bits, a) && bit(bits, b)) {
            return Err(TypeViolation::AndConsistency(i));
        }
    }
    for &(i, _, body) in &t.e_list {
        if bit(bits, body) && !bit(bits, i) {
            return Err(TypeViolation::EConsistency(i));
        }
    }
    let k = t.k();
    for v in VarSet::all_subsets(k) {
        for u in v.iter() {
            if !bit(bits, t.dep_idx[v.0 as usize][u.0 as usize]) {
                return Err(TypeViolation::Projection(v, u));
            }
        }
    }
    for v in VarSet::all_subsets(k) {
        let dv = dep_closure_type(t, bits, v);
        for u in VarSet::all_subsets(k) {
            if u.is_subset(dv) && !dep_closure_type(t, bits, u).is_subset(dv) {
                return Err(TypeViolation::Transitivity(v, u));
            }
        }
    }
    Ok(())
}

/// Variables whose dependence atom over `v` is recorded in the type.
pub fn dep_closure_type(t: &ClosureTable, bits: TypeBits, v: VarSet) -> VarSet {
    (0..t.k() as u8)
        .map(LfdVar)
        .filter(|u| bit(bits, t.dep_idx[v.0 as usize][u.0 as usize]))
        .collect()
}

/// Whether two types agree on every member whose free variables lie in `v`.
pub fn sim_v(t: &ClosureTable, a: TypeBits, b: TypeBits, v: VarSet) -> bool {
    (a ^ b) & t.mask_free_in[v.0 as usize] == 0
}

/// All types over the closure, generated by branching only on atoms,
/// unforced dependence atoms and modal formulas with a false body; the
/// remaining bits are propagated, and transitivity prunes the search as soon
/// as every dependence bit is decided.
pub fn enumerate_types(t: &ClosureTable) -> Vec<TypeBits> {
    fn transitivity_ok(t: &ClosureTable, bits: TypeBits) -> bool {
        let k = t.k();
        let closures: Vec<VarSet> = VarSet::all_subsets(k)
            .map(|v| dep_closure_type(t, bits, v))
            .collect();
        VarSet::all_subsets(k).all(|v| {
            let dv = closures[v.0 as usize];
            VarSet::all_subsets(k)
                .all(|u| !u.is_subset(dv) || closures[u.0 as usize].is_subset(dv))
        })
    }

    fn rec(t: &ClosureTable, i: usize, bits: TypeBits, out: &mut Vec<TypeBits>) {
        if i == t.len() {
            out.push(bits);
            return;
        }
        let mut step = |value: bool| {
            let next = if value { bits | (1 << i) } else { bits };
            if i == t.last_dep && !transitivity_ok(t, next) {
                return;
            }
            rec(t, i + 1, next, out);
        };
        match &t.kinds[i] {
            NodeKind::Atom => {
                step(false);
                step(true);
            }
            NodeKind::Dep(v, u) => {
                if v.contains(*u) {
                    step(true);
                } else {
                    step(false);
                    step(true);
                }
            }
            NodeKind::And(a, b) => step(bit(bits, *a) && bit(bits, *b)),
            NodeKind::Not(a) => step(!bit(bits, *a)),
            NodeKind::E(_, body) => {
                if bit(bits, *body) {
                    step(true);
                } else {
                    step(false);
                    step(true);
                }
            }
        }
    }

    let mut out = Vec::new();
    rec(t, 0, 0, &mut out);
    out
}

/// A set of types, sorted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TypeModel {
    pub types: Vec<TypeBits>,
}

impl TypeModel {
    pub fn new(mut types: Vec<TypeBits>) -> TypeModel {
        types.sort_unstable();
        types.dedup();
        TypeModel { types }
    }

    pub fn contains_psi(&self, t: &ClosureTable) -> bool {
        self.types.iter().any(|ty| bit(*ty, t.psi))
    }
}

/// Verdict of checking the witness and universal conditions. The empty set
/// is vacuously a type model but certifies nothing, which `for_psi` records.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TypeModelVerdict {
    Ok { for_psi: bool },
    NotAType { ty: TypeBits, violation: TypeViolation },
    WitnessFail { ty: TypeBits, e_index: usize },
    UniversalFail { left: TypeBits, right: TypeBits },
}

impl TypeModelVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, TypeModelVerdict::Ok { .. })
    }
}

pub fn is_type_model(t: &ClosureTable, tm: &TypeModel) -> TypeModelVerdict {
    for &ty in &tm.types {
        if let Err(violation) = check_type(t, ty) {
            return TypeModelVerdict::NotAType { ty, violation };
        }
    }
    let mask = t.sentence_mask();
    for &a in &tm.types {
        for &b in &tm.types {
            if (a ^ b) & mask != 0 {
                return TypeModelVerdict::UniversalFail { left: a, right: b };
            }
        }
    }
    for &ty in &tm.types {
        for &(e, v, body) in &t.e_list {
            if bit(ty, e) {
                let c = dep_closure_type(t, ty, v);
                let witnessed = tm
                    .types
                    .iter()
                    .any(|other| sim_v(t, ty, *other, c) && bit(*other, body));
                if !witnessed {
                    return TypeModelVerdict::WitnessFail { ty, e_index: e };
                }
            }
        }
    }
    TypeModelVerdict::Ok {
        for_psi: tm.contains_psi(t),
    }
}

/// Satisfiability verdict; the positive case carries a certificate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SatVerdict {
    Sat(TypeModel),
    Unsat,
}

impl SatVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatVerdict::Sat(_))
    }
}

/// Complete satisfiability decision by type elimination.
///
/// Candidates are grouped by their sentence profile, which realizes the
/// universal condition exactly; within each group, types whose modal demands
/// lack a witness are deleted until a fixpoint. The returned certificate is
/// the witness-closed subset of the surviving group reachable from a type
/// containing the goal formula.
pub fn decide_sat(t: &ClosureTable) -> SatVerdict {
    let all = enumerate_types(t);
    let mask = t.sentence_mask();
    let mut groups: BTreeMap<TypeBits, Vec<TypeBits>> = BTreeMap::new();
    for ty in all {
        groups.entry(ty & mask).or_default().push(ty);
    }
    for group in groups.values() {
        let mut alive = group.clone();
        alive.sort_unstable();
        loop {
            let before = alive.len();
            let snapshot = alive.clone();
            alive.retain(|ty| {
                t.e_list.iter().all(|&(e, v, body)| {
                    !bit(*ty, e) || {
                        let c = dep_closure_type(t, *ty, v);
                        snapshot
                            .iter()
                            .any(|other| sim_v(t, *ty, *other, c) && bit(*other, body))
                    }
                })
            });
            if alive.len() == before {
                break;
            }
        }
        if let Some(&root) = alive.iter().find(|ty| bit(**ty, t.psi)) {
            // Shrink the certificate to the types actually needed.
            let mut chosen: BTreeSet<TypeBits> = [root].into();
            let mut work = vec![root];
            while let Some(ty) = work.pop() {
                for &(e, v, body) in &t.e_list {
                    if bit(ty, e) {
                        let c = dep_closure_type(t, ty, v);
                        let already = chosen
                            .iter()
                            .any(|other| sim_v(t, ty, *other, c) && bit(*other, body));
                        if !already {
                            let w = *alive
                                .iter()
                                .find(|other| sim_v(t, ty, **other, c) && bit(**other, body))
                                .expect("fixpoint guarantees a witness");
                            chosen.insert(w);
                            work.push(w);
                        }
                    }
                }
            }
            return SatVerdict::Sat(TypeModel::new(chosen.into_iter().collect()));
        }
    }
    SatVerdict::Unsat
}

/// One node of an unraveled tree.
#[derive(Clone, Debug)]
pub struct UnravelNode {
    pub assignment: Assignment,
    pub ty: TypeBits,
    pub depth: usize,
    pub parent: Option<usize>,
}

/// A dependence model unraveled from a type model, together with the
/// intended type of every node.
pub struct Unraveling {
    pub model: DependenceModel,
    pub nodes: Vec<UnravelNode>,
    pub depth: usize,
}

/// Unravels a type model into a concrete dependence model, to the given
/// depth.
///
/// One root per type; from a node of type `ty`, each modal demand spawns a
/// child with a witness type, copying the values of the dependence closure
/// of the fixed set and assigning globally fresh values elsewhere, and each
/// missing dependence atom spawns a counterexample child of the same type.
/// Children are deduplicated by copy set and target type. The variables
/// globally determined by the empty set share one value tuple across all
/// roots. Fresh values are serialized as node-path/variable pairs, so the
/// result is reproducible and distinguished-like.
pub fn unravel(t: &ClosureTable, tm: &TypeModel, depth: usize, caps: &Caps) -> Result<Unraveling> {
    if depth == 0 {
        return Err(Error::Validation("unravel depth must be at least 1".into()));
    }
    let verdict = is_type_model(t, tm);
    if !verdict.is_ok() {
        return Err(Error::Validation(format!(
            "input is not a type model: {verdict:?}"
        )));
    }
    let k = t.k();

    struct RawNode {
        ty: TypeBits,
        depth: usize,
        parent: Option<usize>,
        path: String,
        values: Vec<String>,
    }

    let mut raw: Vec<RawNode> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    if let Some(&first) = tm.types.first() {
        let globals = dep_closure_type(t, first, VarSet::EMPTY);
        for (i, &ty) in tm.types.iter().enumerate() {
            let path = format!("t{i}");
            let values = (0..k as u8)
                .map(LfdVar)
                .map(|v| {
                    if globals.contains(v) {
                        format!("g:{}", t.sig.var_name(v))
                    } else {
                        format!("{path}:{}", t.sig.var_name(v))
                    }
                })
                .collect();
            raw.push(RawNode {
                ty,
                depth: 0,
                parent: None,
                path,
                values,
            });
            queue.push_back(i);
        }
    }

    while let Some(at) = queue.pop_front() {
        if raw[at].depth >= depth {
            continue;
        }
        let ty = raw[at].ty;
        // One child per distinct (copy set, target type) pair.
        let mut specs: BTreeSet<(u32, TypeBits)> = BTreeSet::new();
        for &(e, v, body) in &t.e_list {
            if bit(ty, e) {
                let c = dep_closure_type(t, ty, v);
                let witness = *tm
                    .types
                    .iter()
                    .find(|other| sim_v(t, ty, **other, c) && bit(**other, body))
                    .expect("type model provides a witness");
                specs.insert((c.0, witness));
            }
        }
        for v in VarSet::all_subsets(k) {
            let dv = dep_closure_type(t, ty, v);
            if dv != VarSet::full(k) {
                // Some dependence atom over v fails; its counterexample child
                // copies exactly the closure of v.
                specs.insert((dv.0, ty));
            }
        }
        for (j, (c_bits, target)) in specs.into_iter().enumerate() {
            let c = VarSet(c_bits);
            let path = format!("{}.{j}", raw[at].path);
            let values = (0..k as u8)
                .map(LfdVar)
                .map(|v| {
                    if c.contains(v) {
                        raw[at].values[v.0 as usize].clone()
                    } else {
                        format!("{path}:{}", t.sig.var_name(v))
                    }
                })
                .collect();
            let child = RawNode {
                ty: target,
                depth: raw[at].depth + 1,
                parent: Some(at),
                path,
                values,
            };
            raw.push(child);
            queue.push_back(raw.len() - 1);
            if raw.len() > caps.unravel_node_cap {
                return Err(Error::ResourceCap(format!(
                    "unraveling exceeds {} nodes",
                    caps.unravel_node_cap
                )));
            }
        }
    }

    let domain: Vec<String> = raw
        .iter()
        .flat_map(|n| n.values.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut model = StandardModel::empty(&t.sig, domain)?;
    let resolve = |m: &StandardModel, name: &str| m.elem(name).expect("value collected");

    for node in &raw {
        for &i in &t.nondecomp {
            if let LfdFormula::Atom(rel, args) = &t.formulas[i] {
                if bit(node.ty, i) {
                    let tuple: Vec<ElemId> = args
                        .iter()
                        .map(|v| resolve(&model, &node.values[v.0 as usize]))
                        .collect();
                    model.add_fact(rel, args.len(), tuple);
                }
            }
        }
    }

    let nodes: Vec<UnravelNode> = raw
        .iter()
        .map(|n| UnravelNode {
            assignment: Assignment(
                n.values.iter().map(|name| resolve(&model, name)).collect(),
            ),
            ty: n.ty,
            depth: n.depth,
            parent: n.parent,
        })
        .collect();
    let team: BTreeSet<Assignment> = nodes.iter().map(|n| n.assignment.clone()).collect();
    Ok(Unraveling {
        model: DependenceModel::new(model, team),
        nodes,
        depth,
    })
}

/// Default unraveling depth for a goal formula: its modal nesting depth
/// plus one.
pub fn default_depth(psi: &LfdFormula) -> usize {
    psi.e_depth() + 1
}

/// Sound-truth coverage of the bounded truth property: with this many levels
/// of tree left below a node, membership of the formula in the node's type
/// forces the formula true there.
pub fn scope_true(t: &ClosureTable, idx: usize, budget: usize) -> bool {
    match &t.kinds[idx] {
        NodeKind::Atom | NodeKind::Dep(..) => true,
        NodeKind::And(a, b) => scope_true(t, *a, budget) && scope_true(t, *b, budget),
        NodeKind::Not(a) => scope_false(t, *a, budget),
        NodeKind::E(_, body) => budget > 0 && scope_true(t, *body, budget - 1),
    }
}

/// Sound-falsity coverage: absence from the node's type forces the formula
/// false there. Falsity of a modal formula quantifies over the entire team,
/// so it needs its body soundly false even at the horizon.
pub fn scope_false(t: &ClosureTable, idx: usize, budget: usize) -> bool {
    match &t.kinds[idx] {
        NodeKind::Atom => true,
        NodeKind::Dep(..) => budget > 0,
        NodeKind::And(a, b) => scope_false(t, *a, budget) && scope_false(t, *b, budget),
        NodeKind::Not(a) => scope_true(t, *a, budget),
        NodeKind::E(_, body) => scope_false(t, *body, 0),
    }
}

fn batch_translations(t: &ClosureTable, exp: &ExpandedSignature) -> Vec<FoFormula> {
    t.formulas.iter().map(|f| gf_translation(exp, f)).collect()
}

fn named_env(sig: &Signature, s: &Assignment) -> BTreeMap<String, ElemId> {
    sig.vars()
        .map(|v| (sig.var_name(v).to_string(), s.get(v)))
        .collect()
}

/// The type a standard model over the expanded signature realizes at an
/// admissible tuple: the closure members whose guarded translation holds.
pub fn type_from_standard(
    t: &ClosureTable,
    exp: &ExpandedSignature,
    m: &StandardModel,
    s: &Assignment,
) -> Result<TypeBits> {
    if !m.holds(&exp.a_name, &s.0)? {
        return Err(Error::Validation(
            "assignment tuple is not admissible in the model".into(),
        ));
    }
    let translations = batch_translations(t, exp);
    type_at(t, m, &translations, s)
}

fn type_at(
    t: &ClosureTable,
    m: &StandardModel,
    translations: &[FoFormula],
    s: &Assignment,
) -> Result<TypeBits> {
    let env = named_env(&t.sig, s);
    let mut bits: TypeBits = 0;
    for (i, tr) in translations.iter().enumerate() {
        if eval_fo(m, &env, tr)? {
            bits |= 1 << i;
        }
    }
    Ok(bits)
}

/// Checks the setup theory against a standard model by evaluation.
pub fn check_setup(t: &ClosureTable, exp: &ExpandedSignature, m: &StandardModel) -> Result<()> {
    let empty = BTreeMap::new();
    for (i, conjunct) in setup_conjuncts(exp, &t.formulas).iter().enumerate() {
        if !eval_fo(m, &empty, conjunct)? {
            return Err(Error::SetupViolated(format!("conjunct {i} fails")));
        }
    }
    Ok(())
}

/// Collects the types of every admissible tuple of a standard model
/// satisfying the setup theory. The result is a type model.
pub fn type_model_from_standard(
    t: &ClosureTable,
    exp: &ExpandedSignature,
    m: &StandardModel,
) -> Result<TypeModel> {
    check_setup(t, exp, m)?;
    let a = m
        .interp
        .get(&exp.a_name)
        .ok_or_else(|| Error::UnknownRelation(exp.a_name.clone()))?;
    if a.tuples.is_empty() {
        return Err(Error::NoAdmissibleTuples);
    }
    let translations = batch_translations(t, exp);
    let mut types = Vec::new();
    for tuple in a.tuples.clone() {
        types.push(type_at(t, m, &translations, &Assignment(tuple))?);
    }
    Ok(TypeModel::new(types))
}

/// Reconstructs a dependence model from a standard model of the guarded
/// reduction: unravel the realized type model and point at a root realizing
/// the type of the given admissible tuple.
pub fn reconstruct(
    t: &ClosureTable,
    exp: &ExpandedSignature,
    m: &StandardModel,
    s: &Assignment,
    depth: usize,
    caps: &Caps,
) -> Result<(Unraveling, Assignment)> {
    let tm = type_model_from_standard(t, exp, m)?;
    let target = type_from_standard(t, exp, m, s)?;
    let unraveled = unravel(t, &tm, depth, caps)?;
    let root = unraveled
        .nodes
        .iter()
        .find(|n| n.depth == 0 && n.ty == target)
        .expect("every type has a root");
    let assignment = root.assignment.clone();
    Ok((unraveled, assignment))
}

/// JSON certificate: the closure table as canonical text plus each type as
/// its list of member indices.
pub fn certificate_json(t: &ClosureTable, tm: &TypeModel) -> serde_json::Value {
    serde_json::json!({
        "closure": t
            .formulas
            .iter()
            .map(|f| print_lfd(f, &t.sig))
            .collect::<Vec<_>>(),
        "types": tm
            .types
            .iter()
            .map(|ty| (0..t.len()).filter(|i| bit(*ty, *i)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

/// Restates the five type conditions directly on formula sets; used by tests
/// as an independent oracle for the propagation-based enumerator.
pub fn naive_type_filter(t: &ClosureTable) -> Vec<TypeBits> {
    let n = t.len();
    assert!(n <= 20, "naive filter is for tiny closures only");
    let as_set = |bits: TypeBits| -> BTreeSet<LfdFormula> {
        (0..n)
            .filter(|i| bit(bits, *i))
            .map(|i| t.formulas[i].clone())
            .collect()
    };
    let mut out = Vec::new();
    'candidates: for bits in 0..(1u128 << n) {
        let set = as_set(bits);
        for f in &t.formulas {
            let neg = single_negation(f);
            if t.index_of(&neg).is_some() {
                let has_f = set.contains(f);
                let has_neg = set.contains(&neg);
                if let LfdFormula::Not(_) = f {
                } else if has_f == has_neg {
                    continue 'candidates;
                }
            }
            if let LfdFormula::Not(inner) = f {
                if set.contains(f) == set.contains(inner) {
                    continue 'candidates;
                }
            }
            if let LfdFormula::And(a, b) = f {
                if set.contains(f) != (set.contains(a) && set.contains(b)) {
                    continue 'candidates;
                }
            }
            if let LfdFormula::E(_, body) = f {
                if set.contains(body) && !set.contains(f) {
                    continue 'candidates;
                }
            }
        }
        let k = t.k();
        for v in VarSet::all_subsets(k) {
            for u in v.iter() {
                if !set.contains(&LfdFormula::dep(v, u)) {
                    continue 'candidates;
                }
            }
        }
        let dep_set = |v: VarSet| -> VarSet {
            (0..k as u8)
                .map(LfdVar)
                .filter(|u| set.contains(&LfdFormula::dep(v, *u)))
                .collect()
        };
        for v in VarSet::all_subsets(k) {
            for u in VarSet::all_subsets(k) {
                if u.is_subset(dep_set(v)) && !dep_set(u).is_subset(dep_set(v)) {
                    continue 'candidates;
                }
            }
        }
        out.push(bits);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcheck::eval_lfd;
    use crate::models::expand_dependence;
    use crate::syntax::parse_lfd;

    fn sig1() -> Signature {
        Signature::new(vec![("P".to_string(), 1)], vec!["x".into()]).unwrap()
    }

    fn table(sig: &Signature, src: &str) -> ClosureTable {
        let psi = parse_lfd(src, sig).unwrap();
        ClosureTable::new(sig, &psi, &Caps::default()).unwrap()
    }

    #[test]
    fn enumeration_matches_naive_filter() {
        let sig = sig1();
        for src in ["P(x)", "E[] P(x)", "(P(x) & D[] x)", "~E[x] ~P(x)"] {
            let t = table(&sig, src);
            let fast: BTreeSet<TypeBits> = enumerate_types(&t).into_iter().collect();
            let slow: BTreeSet<TypeBits> = naive_type_filter(&t).into_iter().collect();
            assert_eq!(fast, slow, "mismatch for {src}");
        }
    }

    #[test]
    fn four_types_for_a_bare_atom() {
        let sig = sig1();
        let t = table(&sig, "P(x)");
        let types = enumerate_types(&t);
        assert_eq!(types.len(), 4);
        for ty in &types {
            assert!(check_type(&t, *ty).is_ok());
        }
    }

    #[test]
    fn e_consistency_constrains_types() {
        let sig = sig1();
        let t = table(&sig, "E[] P(x)");
        let p = t.index_of(&parse_lfd("P(x)", &sig).unwrap()).unwrap();
        let ep = t.index_of(&parse_lfd("E[] P(x)", &sig).unwrap()).unwrap();
        for ty in enumerate_types(&t) {
            assert!(!bit(ty, p) || bit(ty, ep));
        }
    }

    #[test]
    fn sim_facts() {
        let sig = sig1();
        let t = table(&sig, "E[] P(x)");
        let types = enumerate_types(&t);
        let full = VarSet::full(t.k());
        for &a in &types {
            assert!(sim_v(&t, a, a, full));
            for &b in &types {
                assert_eq!(sim_v(&t, a, b, full), a == b);
                if sim_v(&t, a, b, VarSet::EMPTY) {
                    assert_eq!(
                        dep_closure_type(&t, a, VarSet::EMPTY),
                        dep_closure_type(&t, b, VarSet::EMPTY)
                    );
                }
            }
        }
        // Two types differing only in a formula with a larger free set still
        // agree below it.
        let differing: Vec<_> = types
            .iter()
            .filter(|ty| sim_v(&t, types[0], **ty, VarSet::EMPTY))
            .collect();
        assert!(!differing.is_empty());
    }

    #[test]
    fn projected_dependence_is_forced() {
        let sig = sig1();
        let t = table(&sig, "P(x)");
        for ty in enumerate_types(&t) {
            assert!(dep_closure_type(&t, ty, VarSet::full(1)).contains(LfdVar(0)));
        }
    }

    #[test]
    fn empty_set_is_a_vacuous_type_model() {
        let sig = sig1();
        let t = table(&sig, "P(x)");
        let verdict = is_type_model(&t, &TypeModel::new(Vec::new()));
        assert_eq!(verdict, TypeModelVerdict::Ok { for_psi: false });
    }

    #[test]
    fn dropping_a_witness_breaks_the_model() {
        let sig = sig1();
        let t = table(&sig, "E[] P(x)");
        let cert = match decide_sat(&t) {
            SatVerdict::Sat(tm) => tm,
            SatVerdict::Unsat => panic!("satisfiable formula"),
        };
        assert!(is_type_model(&t, &cert).is_ok());
        let p = t.index_of(&parse_lfd("P(x)", &sig).unwrap()).unwrap();
        let pruned: Vec<TypeBits> = cert
            .types
            .iter()
            .copied()
            .filter(|ty| !bit(*ty, p))
            .collect();
        if !pruned.is_empty() && pruned.len() < cert.types.len() {
            let verdict = is_type_model(&t, &TypeModel::new(pruned));
            assert!(matches!(verdict, TypeModelVerdict::WitnessFail { .. }));
        }
    }

    #[test]
    fn contradiction_is_unsat() {
        let sig = sig1();
        let t = table(&sig, "(E[] P(x) & ~E[] P(x))");
        assert_eq!(decide_sat(&t), SatVerdict::Unsat);
    }

    #[test]
    fn constant_variable_with_both_values_is_unsat() {
        let sig = sig1();
        let t = table(&sig, "((D[] x & E[] P(x)) & E[] ~P(x))");
        assert_eq!(decide_sat(&t), SatVerdict::Unsat);
    }

    #[test]
    fn satisfiable_formula_certifies_itself() {
        let sig = sig1();
        let t = table(&sig, "(E[] P(x) & E[] ~P(x))");
        match decide_sat(&t) {
            SatVerdict::Sat(tm) => {
                assert!(is_type_model(&t, &tm).is_ok());
                assert!(tm.contains_psi(&t));
            }
            SatVerdict::Unsat => panic!("expected satisfiable"),
        }
    }

    #[test]
    fn unravel_realizes_dependence_atoms_at_inner_nodes() {
        let sig = sig1();
        let t = table(&sig, "(E[] P(x) & E[] ~P(x))");
        let tm = match decide_sat(&t) {
            SatVerdict::Sat(tm) => tm,
            SatVerdict::Unsat => panic!(),
        };
        let u = unravel(&t, &tm, 2, &Caps::default()).unwrap();
        for node in &u.nodes {
            if node.depth < u.depth {
                for v in VarSet::all_subsets(t.k()) {
                    for uv in (0..t.k() as u8).map(LfdVar) {
                        let expected = bit(node.ty, t.dep_idx[v.0 as usize][uv.0 as usize]);
                        let actual =
                            eval_lfd(&u.model, &node.assignment, &LfdFormula::dep(v, uv)).unwrap();
                        assert_eq!(actual, expected, "dependence atom disagrees");
                    }
                }
            }
        }
        // Roots realize the goal formula within scope.
        let psi = &t.formulas[t.psi];
        let root = u.nodes.iter().find(|n| n.depth == 0 && bit(n.ty, t.psi));
        if let Some(root) = root {
            if scope_true(&t, t.psi, u.depth) {
                assert!(eval_lfd(&u.model, &root.assignment, psi).unwrap());
            }
        }
    }

    #[test]
    fn unravel_agreement_sets_are_dependence_closed() {
        let sig = sig1();
        let t = table(&sig, "(E[] P(x) & E[] ~P(x))");
        let tm = match decide_sat(&t) {
            SatVerdict::Sat(tm) => tm,
            SatVerdict::Unsat => panic!(),
        };
        let u = unravel(&t, &tm, 2, &Caps::default()).unwrap();
        for a in &u.nodes {
            for b in &u.nodes {
                let x = a.assignment.agreement(&b.assignment);
                assert_eq!(dep_closure_type(&t, a.ty, x), x);
                assert_eq!(dep_closure_type(&t, b.ty, x), x);
            }
        }
    }

    #[test]
    fn expansion_realizes_the_same_types() {
        let sig = sig1();
        let exp = sig.expanded().unwrap();
        let t = table(&sig, "E[] P(x)");
        let m = StandardModel::new(
            vec!["a".into(), "b".into()],
            vec![("P".into(), 1, vec![vec!["a".into()]])],
        )
        .unwrap();
        let team: BTreeSet<Assignment> = [
            Assignment(vec![m.elem("a").unwrap()]),
            Assignment(vec![m.elem("b").unwrap()]),
        ]
        .into_iter()
        .collect();
        let dm = DependenceModel::new(m, team.clone());
        let hat = expand_dependence(&exp, &dm).unwrap();
        let tm = type_model_from_standard(&t, &exp, &hat).unwrap();
        assert!(is_type_model(&t, &tm).is_ok());
        // The realized types agree with direct evaluation.
        let mut direct = Vec::new();
        for s in &team {
            let mut bits: TypeBits = 0;
            for (i, f) in t.formulas.iter().enumerate() {
                if eval_lfd(&dm, s, f).unwrap() {
                    bits |= 1 << i;
                }
            }
            direct.push(bits);
        }
        assert_eq!(TypeModel::new(direct), tm);
    }

    #[test]
    fn reconstruction_agrees_with_the_source_model() {
        let sig = sig1();
        let exp = sig.expanded().unwrap();
        let caps = Caps::default();
        let t = table(&sig, "(E[] P(x) & E[] ~P(x))");
        let m = StandardModel::new(
            vec!["a".into(), "b".into()],
            vec![("P".into(), 1, vec![vec!["a".into()]])],
        )
        .unwrap();
        let team: BTreeSet<Assignment> = [
            Assignment(vec![m.elem("a").unwrap()]),
            Assignment(vec![m.elem("b").unwrap()]),
        ]
        .into_iter()
        .collect();
        let dm = DependenceModel::new(m, team);
        let hat = expand_dependence(&exp, &dm).unwrap();
        let s = Assignment(vec![hat.elem("a").unwrap()]);
        let target = type_from_standard(&t, &exp, &hat, &s).unwrap();
        let (u, root) = reconstruct(&t, &exp, &hat, &s, 2, &caps).unwrap();
        let root_node = u
            .nodes
            .iter()
            .find(|n| n.assignment == root && n.depth == 0)
            .unwrap();
        assert_eq!(root_node.ty, target);
        for (i, f) in t.formulas.iter().enumerate() {
            if scope_true(&t, i, u.depth) && scope_false(&t, i, u.depth) {
                let expected = bit(target, i);
                assert_eq!(
                    eval_lfd(&u.model, &root, f).unwrap(),
                    expected,
                    "bounded agreement fails at {:?}",
                    f
                );
            }
        }
    }

    #[test]
    fn scope_budgets() {
        let sig = sig1();
        let t = table(&sig, "E[] D[] x");
        let psi = t.psi;
        assert!(scope_true(&t, psi, 1));
        // Falsity of a modal formula over a dependence body is never
        // certified, because the horizon could hide a counterexample.
        assert!(!scope_false(&t, psi, 5));
        let d = t
            .index_of(&LfdFormula::dep(VarSet::EMPTY, LfdVar(0)))
            .unwrap();
        assert!(scope_false(&t, d, 1));
        assert!(!scope_false(&t, d, 0));
        // Coverage grows with the budget.
        for i in 0..t.len() {
            for b in 0..3 {
                assert!(!scope_true(&t, i, b) || scope_true(&t, i, b + 1));
                assert!(!scope_false(&t, i, b) || scope_false(&t, i, b + 1));
            }
        }
    }
}
