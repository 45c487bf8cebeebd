//! Abstract syntax for both languages, signatures, free-variable and closure
//! computation, and guardedness classification.
//!
//! Variables of the dependence language are interned as indices into the
//! signature's canonical variable list; sets of them are bitmasks. First-order
//! variables are plain names, since the first-order side treats variables as
//! interchangeable placeholders.

mod parse;
mod print;

pub use parse::{parse_fo, parse_lfd, parse_lfd_infer, parse_signature};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::Error;
use crate::Result;

/// An LFD variable, as an index into the signature's canonical order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LfdVar(pub u8);

/// A set of LFD variables, as a bitmask over the canonical order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct VarSet(pub u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn singleton(v: LfdVar) -> VarSet {
        VarSet(1 << v.0)
    }

    pub fn full(k: usize) -> VarSet {
        VarSet(if k >= 32 { u32::MAX } else { (1u32 << k) - 1 })
    }

    pub fn contains(self, v: LfdVar) -> bool {
        self.0 & (1 << v.0) != 0
    }

    pub fn with(self, v: LfdVar) -> VarSet {
        VarSet(self.0 | (1 << v.0))
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn inter(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    pub fn minus(self, other: VarSet) -> VarSet {
        VarSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in canonical (ascending index) order.
    pub fn iter(self) -> impl Iterator<Item = LfdVar> {
        (0..32u8).filter(move |i| self.0 & (1 << i) != 0).map(LfdVar)
    }

    /// All subsets of the first `k` variables, in ascending bitmask order.
    pub fn all_subsets(k: usize) -> impl Iterator<Item = VarSet> {
        (0u32..(1u32 << k)).map(VarSet)
    }
}

impl FromIterator<LfdVar> for VarSet {
    fn from_iter<T: IntoIterator<Item = LfdVar>>(iter: T) -> Self {
        iter.into_iter().fold(VarSet::EMPTY, VarSet::with)
    }
}

const RESERVED_NAMES: &[&str] = &["exists", "forall"];

fn valid_base_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !RESERVED_NAMES.contains(&name)
}

/// A relational signature together with the ordered list of LFD variables.
///
/// The variable list order is the canonical order used everywhere a set of
/// variables has to be rendered as a tuple.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Signature {
    relations: BTreeMap<String, usize>,
    lfd_vars: Vec<String>,
    var_index: HashMap<String, LfdVar>,
}

impl Signature {
    pub fn new<I, S>(relations: I, lfd_vars: Vec<String>) -> Result<Signature>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut rels = BTreeMap::new();
        for (name, arity) in relations {
            let name = name.into();
            if !valid_base_name(&name) {
                return Err(Error::InvalidSignature(format!("bad relation name `{name}`")));
            }
            if arity == 0 {
                return Err(Error::InvalidSignature(format!(
                    "relation `{name}` must have arity at least 1"
                )));
            }
            if rels.insert(name.clone(), arity).is_some() {
                return Err(Error::InvalidSignature(format!("duplicate relation `{name}`")));
            }
        }
        if lfd_vars.is_empty() {
            return Err(Error::InvalidSignature("variable list is empty".into()));
        }
        if lfd_vars.len() > 16 {
            return Err(Error::InvalidSignature("more than 16 variables".into()));
        }
        let mut var_index = HashMap::new();
        for (i, v) in lfd_vars.iter().enumerate() {
            if !valid_base_name(v) {
                return Err(Error::InvalidSignature(format!("bad variable name `{v}`")));
            }
            if var_index.insert(v.clone(), LfdVar(i as u8)).is_some() {
                return Err(Error::InvalidSignature(format!("duplicate variable `{v}`")));
            }
        }
        // Priming a variable name must not collide with another variable,
        // otherwise the first-order translation would capture it.
        for v in &lfd_vars {
            if var_index.contains_key(&format!("{v}'")) {
                return Err(Error::InvalidSignature(format!(
                    "variable `{v}'` collides with the primed copy of `{v}`"
                )));
            }
        }
        Ok(Signature {
            relations: rels,
            lfd_vars,
            var_index,
        })
    }

    fn new_unchecked(relations: BTreeMap<String, usize>, lfd_vars: Vec<String>) -> Signature {
        let var_index = lfd_vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), LfdVar(i as u8)))
            .collect();
        Signature {
            relations,
            lfd_vars,
            var_index,
        }
    }

    /// Number of LFD variables.
    pub fn k(&self) -> usize {
        self.lfd_vars.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = LfdVar> + '_ {
        (0..self.k() as u8).map(LfdVar)
    }

    pub fn var_name(&self, v: LfdVar) -> &str {
        &self.lfd_vars[v.0 as usize]
    }

    pub fn var_names(&self) -> &[String] {
        &self.lfd_vars
    }

    pub fn var(&self, name: &str) -> Option<LfdVar> {
        self.var_index.get(name).copied()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn arity(&self, rel: &str) -> Option<usize> {
        self.relations.get(rel).copied()
    }

    pub fn max_arity(&self) -> usize {
        self.relations.values().copied().max().unwrap_or(0)
    }

    /// Names of the variable tuple for a set, in canonical order.
    pub fn set_names(&self, set: VarSet) -> Vec<String> {
        set.iter().map(|v| self.var_name(v).to_string()).collect()
    }

    /// Derives the expanded signature used by the guarded reduction.
    pub fn expanded(&self) -> Result<ExpandedSignature> {
        ExpandedSignature::new(self)
    }
}

fn fresh_name(candidate: String, taken: &BTreeMap<String, usize>) -> String {
    let mut name = candidate;
    while taken.contains_key(&name) {
        name.push('\'');
    }
    name
}

/// The expanded signature: the base relations plus the admissibility
/// relation `A` and one proxy relation per pair of variable subsets.
///
/// `R_{V}_{U}` interprets the dependence statement "the variables `U` are
/// locally determined by `V`"; its arity is `|V|` and its argument tuple
/// enumerates `V` canonically. Names are derived deterministically from the
/// base signature, priming until fresh.
#[derive(Clone, Debug)]
pub struct ExpandedSignature {
    pub base: Signature,
    pub full: Signature,
    pub a_name: String,
    r_names: BTreeMap<(u32, u32), String>,
    r_lookup: HashMap<String, (VarSet, VarSet)>,
}

impl ExpandedSignature {
    fn new(base: &Signature) -> Result<ExpandedSignature> {
        let k = base.k();
        if k > 6 {
            return Err(Error::ResourceCap(format!(
                "expanded signature for {k} variables would hold {} proxy relations",
                1u64 << (2 * k)
            )));
        }
        let mut relations = base.relations.clone();
        let a_name = fresh_name("A".to_string(), &relations);
        relations.insert(a_name.clone(), k);
        let mut r_names = BTreeMap::new();
        let mut r_lookup = HashMap::new();
        for v in VarSet::all_subsets(k) {
            for u in VarSet::all_subsets(k) {
                let rendered = format!(
                    "R_{{{}}}_{{{}}}",
                    base.set_names(v).join(" "),
                    base.set_names(u).join(" ")
                );
                let name = fresh_name(rendered, &relations);
                // Arity |V|; the empty-set proxies are nullary and the
                // signature map records that as 0 even though base relations
                // must have positive arity.
                relations.insert(name.clone(), v.len());
                r_names.insert((v.0, u.0), name.clone());
                r_lookup.insert(name, (v, u));
            }
        }
        Ok(ExpandedSignature {
            base: base.clone(),
            full: Signature::new_unchecked(relations, base.lfd_vars.clone()),
            a_name,
            r_names,
            r_lookup,
        })
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    pub fn r_name(&self, v: VarSet, u: VarSet) -> &str {
        &self.r_names[&(v.0, u.0)]
    }

    /// Recognizes a proxy relation name.
    pub fn proxy_sets(&self, name: &str) -> Option<(VarSet, VarSet)> {
        self.r_lookup.get(name).copied()
    }
}

/// A formula of the dependence language.
///
/// `Dep(V, u)` states that `u` is locally determined by the set `V`;
/// `E(V, f)` is the existential modality that keeps the values of `V` fixed.
/// Disjunction and implication are parser sugar and never appear here.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum LfdFormula {
    Atom(String, Vec<LfdVar>),
    Dep(VarSet, LfdVar),
    And(Box<LfdFormula>, Box<LfdFormula>),
    Not(Box<LfdFormula>),
    E(VarSet, Box<LfdFormula>),
}

impl LfdFormula {
    pub fn atom(rel: impl Into<String>, args: Vec<LfdVar>) -> LfdFormula {
        LfdFormula::Atom(rel.into(), args)
    }

    pub fn dep(v: VarSet, u: LfdVar) -> LfdFormula {
        LfdFormula::Dep(v, u)
    }

    pub fn and(a: LfdFormula, b: LfdFormula) -> LfdFormula {
        LfdFormula::And(Box::new(a), Box::new(b))
    }

    pub fn not(a: LfdFormula) -> LfdFormula {
        LfdFormula::Not(Box::new(a))
    }

    pub fn e(v: VarSet, f: LfdFormula) -> LfdFormula {
        LfdFormula::E(v, Box::new(f))
    }

    /// The always-true formula: projection dependence of the first variable
    /// on itself. The language has no constants, so this is the canonical
    /// encoding of truth.
    pub fn top() -> LfdFormula {
        LfdFormula::dep(VarSet::singleton(LfdVar(0)), LfdVar(0))
    }

    pub fn bottom() -> LfdFormula {
        LfdFormula::not(LfdFormula::top())
    }

    /// Left-associated conjunction; `None` for an empty iterator.
    pub fn conj_all<I: IntoIterator<Item = LfdFormula>>(items: I) -> Option<LfdFormula> {
        items.into_iter().reduce(LfdFormula::and)
    }

    /// Disjunction encoded through conjunction and negation, deduplicating
    /// repeated disjuncts while preserving first occurrence order.
    pub fn disj_encode(items: Vec<LfdFormula>) -> LfdFormula {
        let mut seen = BTreeSet::new();
        let unique: Vec<LfdFormula> = items
            .into_iter()
            .filter(|f| seen.insert(f.clone()))
            .collect();
        match unique.len() {
            0 => LfdFormula::bottom(),
            1 => unique.into_iter().next().unwrap(),
            _ => LfdFormula::not(
                LfdFormula::conj_all(unique.into_iter().map(LfdFormula::not)).unwrap(),
            ),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            LfdFormula::Atom(..) | LfdFormula::Dep(..) => 1,
            LfdFormula::And(a, b) => 1 + a.node_count() + b.node_count(),
            LfdFormula::Not(a) | LfdFormula::E(_, a) => 1 + a.node_count(),
        }
    }

    /// Nesting depth of the existential modality.
    pub fn e_depth(&self) -> usize {
        match self {
            LfdFormula::Atom(..) | LfdFormula::Dep(..) => 0,
            LfdFormula::And(a, b) => a.e_depth().max(b.e_depth()),
            LfdFormula::Not(a) => a.e_depth(),
            LfdFormula::E(_, a) => 1 + a.e_depth(),
        }
    }

    /// Inserts this formula and all its subformulas into `out`.
    pub fn subformulas_into(&self, out: &mut BTreeSet<LfdFormula>) {
        if out.insert(self.clone()) {
            match self {
                LfdFormula::Atom(..) | LfdFormula::Dep(..) => {}
                LfdFormula::And(a, b) => {
                    a.subformulas_into(out);
                    b.subformulas_into(out);
                }
                LfdFormula::Not(a) | LfdFormula::E(_, a) => a.subformulas_into(out),
            }
        }
    }

    /// Checks variables and relation arities against the signature.
    pub fn validate(&self, sig: &Signature) -> Result<()> {
        let k = sig.k() as u8;
        let check_var = |v: LfdVar| {
            if v.0 < k {
                Ok(())
            } else {
                Err(Error::UnknownVar(format!("#{}", v.0)))
            }
        };
        match self {
            LfdFormula::Atom(rel, args) => {
                let arity = sig
                    .arity(rel)
                    .ok_or_else(|| Error::UnknownRelation(rel.clone()))?;
                if args.len() != arity {
                    return Err(Error::ArityMismatch {
                        rel: rel.clone(),
                        expected: arity,
                        got: args.len(),
                    });
                }
                args.iter().try_for_each(|v| check_var(*v))
            }
            LfdFormula::Dep(v, u) => {
                if !v.is_subset(VarSet::full(sig.k())) {
                    return Err(Error::UnknownVar("dependence base".into()));
                }
                check_var(*u)
            }
            LfdFormula::And(a, b) => {
                a.validate(sig)?;
                b.validate(sig)
            }
            LfdFormula::Not(a) => a.validate(sig),
            LfdFormula::E(v, a) => {
                if !v.is_subset(VarSet::full(sig.k())) {
                    return Err(Error::UnknownVar("modality set".into()));
                }
                a.validate(sig)
            }
        }
    }
}

/// Free variables of a dependence formula. The dependence atom and the
/// modality both display exactly the variables they keep fixed.
pub fn free_vars_lfd(phi: &LfdFormula) -> VarSet {
    match phi {
        LfdFormula::Atom(_, args) => args.iter().copied().collect(),
        LfdFormula::Dep(v, _) => *v,
        LfdFormula::And(a, b) => free_vars_lfd(a).union(free_vars_lfd(b)),
        LfdFormula::Not(a) => free_vars_lfd(a),
        LfdFormula::E(v, _) => *v,
    }
}

/// Single negation: strips one outer negation, or adds one.
pub fn single_negation(phi: &LfdFormula) -> LfdFormula {
    match phi {
        LfdFormula::Not(inner) => (**inner).clone(),
        other => LfdFormula::not(other.clone()),
    }
}

/// The closure of a formula: all subformulas, every dependence atom over the
/// signature, and the single negation of everything collected.
///
/// Returned in a canonical deterministic order (ascending node count, then
/// structural order), so bitset indices over it are stable.
pub fn closure(sig: &Signature, psi: &LfdFormula, cap: usize) -> Result<Vec<LfdFormula>> {
    psi.validate(sig)?;
    let mut set = BTreeSet::new();
    psi.subformulas_into(&mut set);
    for v in VarSet::all_subsets(sig.k()) {
        for u in sig.vars() {
            set.insert(LfdFormula::dep(v, u));
        }
    }
    let base: Vec<LfdFormula> = set.iter().cloned().collect();
    for f in base {
        set.insert(single_negation(&f));
    }
    if set.len() > cap {
        return Err(Error::ClosureCap {
            size: set.len(),
            cap,
        });
    }
    let mut out: Vec<LfdFormula> = set.into_iter().collect();
    out.sort_by_key(|f| (f.node_count(), f.clone()));
    Ok(out)
}

/// A first-order formula.
///
/// `Exists` is raw unguarded quantification. `GuardedExists` represents
/// `exists ȳ (guard & body)` with the guard atom split out; its invariants
/// are that the bound variables and the free variables of the body all occur
/// in the guard atom. Disjunction, implication and the universal quantifier
/// are parser sugar.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FoFormula {
    Atom(String, Vec<String>),
    Eq(String, String),
    And(Box<FoFormula>, Box<FoFormula>),
    Not(Box<FoFormula>),
    Exists(Vec<String>, Box<FoFormula>),
    GuardedExists {
        guard_rel: String,
        guard_args: Vec<String>,
        bound: Vec<String>,
        body: Box<FoFormula>,
    },
}

impl FoFormula {
    pub fn atom(rel: impl Into<String>, args: Vec<String>) -> FoFormula {
        FoFormula::Atom(rel.into(), args)
    }

    pub fn eq(a: impl Into<String>, b: impl Into<String>) -> FoFormula {
        FoFormula::Eq(a.into(), b.into())
    }

    pub fn and(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::And(Box::new(a), Box::new(b))
    }

    pub fn not(a: FoFormula) -> FoFormula {
        FoFormula::Not(Box::new(a))
    }

    /// Quantifier constructor that recognizes a guard: when the body is a
    /// conjunction whose left conjunct is an atom covering the body's free
    /// variables and all bound variables, the guarded form is built.
    pub fn exists(bound: Vec<String>, body: FoFormula) -> FoFormula {
        if let FoFormula::And(left, right) = &body {
            if let FoFormula::Atom(rel, args) = &**left {
                let guard_vars: BTreeSet<&String> = args.iter().collect();
                let covers_free = body.free_vars().iter().all(|x| guard_vars.contains(x));
                let covers_bound = bound.iter().all(|y| guard_vars.contains(y));
                if covers_free && covers_bound {
                    return FoFormula::GuardedExists {
                        guard_rel: rel.clone(),
                        guard_args: args.clone(),
                        bound,
                        body: right.clone(),
                    };
                }
            }
        }
        FoFormula::Exists(bound, Box::new(body))
    }

    pub fn guarded_exists(
        guard_rel: impl Into<String>,
        guard_args: Vec<String>,
        bound: Vec<String>,
        body: FoFormula,
    ) -> FoFormula {
        FoFormula::GuardedExists {
            guard_rel: guard_rel.into(),
            guard_args,
            bound,
            body: Box::new(body),
        }
    }

    /// Universal guarded sentence `forall x̄ (guard -> body)`, encoded as the
    /// negation of a guarded existential.
    pub fn forall_guarded(
        guard_rel: impl Into<String>,
        guard_args: Vec<String>,
        bound: Vec<String>,
        body: FoFormula,
    ) -> FoFormula {
        FoFormula::not(FoFormula::guarded_exists(
            guard_rel,
            guard_args,
            bound,
            FoFormula::not(body),
        ))
    }

    pub fn implies(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::not(FoFormula::and(a, FoFormula::not(b)))
    }

    pub fn conj_all<I: IntoIterator<Item = FoFormula>>(items: I) -> Option<FoFormula> {
        items.into_iter().reduce(FoFormula::and)
    }

    pub fn disj_encode(items: Vec<FoFormula>) -> Option<FoFormula> {
        let mut seen = BTreeSet::new();
        let unique: Vec<FoFormula> = items
            .into_iter()
            .filter(|f| seen.insert(f.clone()))
            .collect();
        match unique.len() {
            0 => None,
            1 => unique.into_iter().next(),
            _ => Some(FoFormula::not(
                FoFormula::conj_all(unique.into_iter().map(FoFormula::not)).unwrap(),
            )),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            FoFormula::Atom(_, args) => args.iter().cloned().collect(),
            FoFormula::Eq(a, b) => [a.clone(), b.clone()].into_iter().collect(),
            FoFormula::And(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            FoFormula::Not(a) => a.free_vars(),
            FoFormula::Exists(bound, body) => {
                let mut s = body.free_vars();
                for y in bound {
                    s.remove(y);
                }
                s
            }
            FoFormula::GuardedExists {
                guard_args,
                bound,
                body,
                ..
            } => {
                let mut s: BTreeSet<String> = guard_args.iter().cloned().collect();
                s.extend(body.free_vars());
                for y in bound {
                    s.remove(y);
                }
                s
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            FoFormula::Atom(..) | FoFormula::Eq(..) => 1,
            FoFormula::And(a, b) => 1 + a.node_count() + b.node_count(),
            FoFormula::Not(a) => 1 + a.node_count(),
            FoFormula::Exists(_, body) => 1 + body.node_count(),
            FoFormula::GuardedExists { body, .. } => 2 + body.node_count(),
        }
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        match self {
            FoFormula::Atom(_, args) => args.iter().cloned().collect(),
            FoFormula::Eq(a, b) => [a.clone(), b.clone()].into_iter().collect(),
            FoFormula::And(a, b) => {
                let mut s = a.all_vars();
                s.extend(b.all_vars());
                s
            }
            FoFormula::Not(a) => a.all_vars(),
            FoFormula::Exists(bound, body) => {
                let mut s = body.all_vars();
                s.extend(bound.iter().cloned());
                s
            }
            FoFormula::GuardedExists {
                guard_args,
                bound,
                body,
                ..
            } => {
                let mut s = body.all_vars();
                s.extend(guard_args.iter().cloned());
                s.extend(bound.iter().cloned());
                s
            }
        }
    }

    /// Whether any equality atom occurs.
    pub fn has_eq(&self) -> bool {
        match self {
            FoFormula::Eq(..) => true,
            FoFormula::Atom(..) => false,
            FoFormula::And(a, b) => a.has_eq() || b.has_eq(),
            FoFormula::Not(a) => a.has_eq(),
            FoFormula::Exists(_, body) | FoFormula::GuardedExists { body, .. } => body.has_eq(),
        }
    }

    /// Relation names with their arities, inferred from the atoms. Fails on
    /// inconsistent use.
    pub fn relations_used(&self) -> Result<BTreeMap<String, usize>> {
        fn walk(f: &FoFormula, out: &mut BTreeMap<String, usize>) -> Result<()> {
            match f {
                FoFormula::Atom(rel, args) => {
                    if let Some(prev) = out.insert(rel.clone(), args.len()) {
                        if prev != args.len() {
                            return Err(Error::ArityMismatch {
                                rel: rel.clone(),
                                expected: prev,
                                got: args.len(),
                            });
                        }
                    }
                    Ok(())
                }
                FoFormula::Eq(..) => Ok(()),
                FoFormula::And(a, b) => {
                    walk(a, out)?;
                    walk(b, out)
                }
                FoFormula::Not(a) => walk(a, out),
                FoFormula::Exists(_, body) => walk(body, out),
                FoFormula::GuardedExists {
                    guard_rel,
                    guard_args,
                    body,
                    ..
                } => {
                    if let Some(prev) = out.insert(guard_rel.clone(), guard_args.len()) {
                        if prev != guard_args.len() {
                            return Err(Error::ArityMismatch {
                                rel: guard_rel.clone(),
                                expected: prev,
                                got: guard_args.len(),
                            });
                        }
                    }
                    walk(body, out)
                }
            }
        }
        let mut out = BTreeMap::new();
        walk(self, &mut out)?;
        Ok(out)
    }

    /// Top-level conjunct spine.
    pub fn conjuncts(&self) -> Vec<&FoFormula> {
        match self {
            FoFormula::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            other => vec![other],
        }
    }

    pub fn classify(&self) -> GfClass {
        classify_fo(self)
    }
}

/// Guardedness classification of a first-order formula.
///
/// `SelfGuarded` strengthens `Gf`: some top-level atomic conjunct covers all
/// free variables of the formula.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GfClass {
    NotGf,
    Gf,
    SelfGuarded,
}

impl GfClass {
    pub fn is_gf(self) -> bool {
        !matches!(self, GfClass::NotGf)
    }
}

fn quantifiers_guarded(phi: &FoFormula) -> bool {
    match phi {
        FoFormula::Atom(..) | FoFormula::Eq(..) => true,
        FoFormula::And(a, b) => quantifiers_guarded(a) && quantifiers_guarded(b),
        FoFormula::Not(a) => quantifiers_guarded(a),
        FoFormula::GuardedExists {
            guard_args,
            bound,
            body,
            ..
        } => {
            let guard_vars: BTreeSet<&String> = guard_args.iter().collect();
            body.free_vars().iter().all(|x| guard_vars.contains(x))
                && bound.iter().all(|y| guard_vars.contains(y))
                && quantifiers_guarded(body)
        }
        FoFormula::Exists(bound, body) => {
            // A raw quantifier still counts as guarded when some conjunct of
            // the body is an atom covering everything it binds and uses.
            let free: BTreeSet<String> = body.free_vars();
            let has_guard = body.conjuncts().iter().any(|c| {
                if let FoFormula::Atom(_, args) = c {
                    let vars: BTreeSet<&String> = args.iter().collect();
                    free.iter().all(|x| vars.contains(x)) && bound.iter().all(|y| vars.contains(y))
                } else {
                    false
                }
            });
            has_guard && quantifiers_guarded(body)
        }
    }
}

/// Classifies a formula as outside the guarded fragment, guarded, or
/// additionally self-guarded.
pub fn classify_fo(phi: &FoFormula) -> GfClass {
    if !quantifiers_guarded(phi) {
        return GfClass::NotGf;
    }
    let free = phi.free_vars();
    let self_guarded = phi.conjuncts().iter().any(|c| {
        if let FoFormula::Atom(_, args) = c {
            let vars: BTreeSet<&String> = args.iter().collect();
            !free.is_empty() && free.iter().all(|x| vars.contains(x))
        } else {
            false
        }
    });
    if self_guarded {
        GfClass::SelfGuarded
    } else {
        GfClass::Gf
    }
}

/// Standard first-order free variables; quantifiers bind.
pub fn free_vars_fo(phi: &FoFormula) -> BTreeSet<String> {
    phi.free_vars()
}

/// A mapping from first-order variables to LFD variables, driving the
/// translation from the guarded fragment into the dependence language.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct VarMap(pub BTreeMap<String, LfdVar>);

impl VarMap {
    pub fn get(&self, x: &str) -> Option<LfdVar> {
        self.0.get(x).copied()
    }

    pub fn image(&self) -> VarSet {
        self.0.values().copied().collect()
    }

    /// Restriction to the given variables.
    pub fn restrict(&self, vars: &BTreeSet<String>) -> VarMap {
        VarMap(
            self.0
                .iter()
                .filter(|(x, _)| vars.contains(*x))
                .map(|(x, v)| (x.clone(), *v))
                .collect(),
        )
    }

    pub fn render(&self, sig: &Signature) -> String {
        self.0
            .iter()
            .map(|(x, v)| format!("{x}={}", sig.var_name(*v)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for LfdVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sig1() -> Signature {
        Signature::new(vec![("P".to_string(), 1)], vec!["x".into()]).unwrap()
    }

    pub(crate) fn sig2() -> Signature {
        Signature::new(
            vec![("P".to_string(), 1), ("R".to_string(), 2)],
            vec!["x".into(), "y".into()],
        )
        .unwrap()
    }

    fn v(i: u8) -> LfdVar {
        LfdVar(i)
    }

    #[test]
    fn free_vars_atom() {
        // free(P(x,y)) = {x,y}
        let f = LfdFormula::atom("R", vec![v(0), v(1)]);
        assert_eq!(free_vars_lfd(&f), VarSet(0b11));
    }

    #[test]
    fn free_vars_modality_shows_fixed_set() {
        // free(E[x] P(y)) = {x}
        let f = LfdFormula::e(VarSet::singleton(v(0)), LfdFormula::atom("P", vec![v(1)]));
        assert_eq!(free_vars_lfd(&f), VarSet::singleton(v(0)));
    }

    #[test]
    fn free_vars_dep_and_not() {
        // free(D[] x & ~P(y)) = {y}
        let f = LfdFormula::and(
            LfdFormula::dep(VarSet::EMPTY, v(0)),
            LfdFormula::not(LfdFormula::atom("P", vec![v(1)])),
        );
        assert_eq!(free_vars_lfd(&f), VarSet::singleton(v(1)));
    }

    #[test]
    fn single_negation_cases() {
        let p = LfdFormula::atom("P", vec![v(0)]);
        assert_eq!(single_negation(&LfdFormula::not(p.clone())), p);
        assert_eq!(single_negation(&p), LfdFormula::not(p.clone()));
        let nn = LfdFormula::not(LfdFormula::not(p.clone()));
        assert_eq!(single_negation(&nn), LfdFormula::not(p));
    }

    #[test]
    fn closure_sizes() {
        let sig = sig1();
        // P(x) with one variable: P, ~P and the 4 dependence literals.
        let cl = closure(&sig, &LfdFormula::atom("P", vec![v(0)]), 64).unwrap();
        assert_eq!(cl.len(), 6);
        // E[] P(x) adds the modal formula and its negation.
        let cl = closure(
            &sig,
            &LfdFormula::e(VarSet::EMPTY, LfdFormula::atom("P", vec![v(0)])),
            64,
        )
        .unwrap();
        assert_eq!(cl.len(), 8);
    }

    #[test]
    fn closure_rejects_unknown_variable() {
        let sig = sig1();
        let bad = LfdFormula::dep(VarSet::singleton(v(0)), v(1));
        assert!(closure(&sig, &bad, 64).is_err());
    }

    #[test]
    fn closure_dep_atom_count() {
        let sig = sig2();
        let cl = closure(&sig, &LfdFormula::atom("P", vec![v(0)]), 64).unwrap();
        let deps = cl
            .iter()
            .filter(|f| matches!(f, LfdFormula::Dep(..)))
            .count();
        let k = sig.k();
        assert_eq!(deps, k * (1 << k));
        for d in cl.iter().filter(|f| matches!(f, LfdFormula::Dep(..))) {
            assert!(cl.contains(&LfdFormula::not(d.clone())));
        }
    }

    #[test]
    fn closure_is_idempotent() {
        let sig = sig2();
        let psi = LfdFormula::and(
            LfdFormula::e(VarSet::singleton(v(0)), LfdFormula::atom("P", vec![v(1)])),
            LfdFormula::not(LfdFormula::atom("R", vec![v(0), v(1)])),
        );
        let cl = closure(&sig, &psi, 64).unwrap();
        let cl_set: BTreeSet<_> = cl.iter().cloned().collect();
        for member in &cl {
            let inner = closure(&sig, member, 64).unwrap();
            for f in inner {
                assert!(cl_set.contains(&f), "closure not idempotent at {f:?}");
            }
        }
    }

    #[test]
    fn closure_cap_is_enforced() {
        let sig = sig2();
        let psi = LfdFormula::atom("P", vec![v(0)]);
        match closure(&sig, &psi, 4) {
            Err(Error::ClosureCap { .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn guardedness_examples() {
        // exists y . (G(x,y) & P(y)) is guarded but not self-guarded.
        let f = FoFormula::exists(
            vec!["y".into()],
            FoFormula::and(
                FoFormula::atom("G", vec!["x".into(), "y".into()]),
                FoFormula::atom("P", vec!["y".into()]),
            ),
        );
        assert!(matches!(f, FoFormula::GuardedExists { .. }));
        assert_eq!(f.classify(), GfClass::Gf);

        // exists x . P(x) & ~exists y . P(y): unary atoms guard themselves.
        let part = |x: &str| {
            FoFormula::Exists(
                vec![x.to_string()],
                Box::new(FoFormula::atom("P", vec![x.to_string()])),
            )
        };
        let sentence = FoFormula::and(part("x"), FoFormula::not(part("y")));
        assert_eq!(sentence.classify(), GfClass::Gf);

        // exists y . (P(x) & Q(y)) has no guard covering {x, y}.
        let bad = FoFormula::exists(
            vec!["y".into()],
            FoFormula::and(
                FoFormula::atom("P", vec!["x".into()]),
                FoFormula::atom("Q", vec!["y".into()]),
            ),
        );
        assert!(matches!(bad, FoFormula::Exists(..)));
        assert_eq!(bad.classify(), GfClass::NotGf);
    }

    #[test]
    fn self_guarded_needs_top_level_atom() {
        let f = FoFormula::and(
            FoFormula::atom("A", vec!["x".into(), "y".into()]),
            FoFormula::atom("P", vec!["x".into()]),
        );
        assert_eq!(f.classify(), GfClass::SelfGuarded);
    }

    #[test]
    fn fo_free_vars() {
        let f = FoFormula::exists(
            vec!["y".into()],
            FoFormula::and(
                FoFormula::atom("G", vec!["x".into(), "y".into()]),
                FoFormula::atom("P", vec!["y".into()]),
            ),
        );
        assert_eq!(
            f.free_vars(),
            ["x".to_string()].into_iter().collect::<BTreeSet<_>>()
        );
        let g = FoFormula::and(
            FoFormula::atom("P", vec!["x".into()]),
            FoFormula::not(FoFormula::atom("Q", vec!["y".into()])),
        );
        assert_eq!(g.free_vars().len(), 2);
        assert_eq!(FoFormula::eq("x", "y").free_vars().len(), 2);
    }

    #[test]
    fn expanded_signature_names_are_fresh_and_stable() {
        let sig = Signature::new(
            vec![("A".to_string(), 2), ("R_{x}_{y}".to_string(), 1)],
            vec!["x".into(), "y".into()],
        );
        // R_{x}_{y} is not a valid base name (braces), so build from clean base.
        assert!(sig.is_err());

        let sig = Signature::new(vec![("A".to_string(), 1)], vec!["x".into()]).unwrap();
        let exp = sig.expanded().unwrap();
        assert_eq!(exp.a_name, "A'");
        assert_eq!(exp.r_name(VarSet::EMPTY, VarSet::EMPTY), "R_{}_{}");
        assert_eq!(
            exp.r_name(VarSet::singleton(v(0)), VarSet::singleton(v(0))),
            "R_{x}_{x}"
        );
        assert_eq!(
            exp.proxy_sets("R_{x}_{x}"),
            Some((VarSet::singleton(v(0)), VarSet::singleton(v(0))))
        );
        assert_eq!(exp.full.arity("R_{}_{x}"), Some(0));
    }

    #[test]
    fn varset_iterates_in_canonical_order() {
        let s = VarSet(0b101);
        let vs: Vec<LfdVar> = s.iter().collect();
        assert_eq!(vs, vec![v(0), v(2)]);
        assert_eq!(VarSet::all_subsets(2).count(), 4);
    }
}
