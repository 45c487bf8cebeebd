//! Independent ground truth: exhaustive bounded search for finite models of
//! dependence-language and guarded formulas, plus deterministic random
//! corpus generation.
//!
//! The searchers carry their own truth evaluation, sharing nothing with the
//! model checkers beyond the formula types, so a model found here and
//! verified there is a genuine cross-check. A negative answer only means
//! nothing was found up to the bound; it is never an unsatisfiability claim.

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng as _;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::models::{Assignment, DependenceModel, ElemId, StandardModel};
use crate::syntax::{FoFormula, LfdFormula, LfdVar, Signature, VarSet};
use crate::Result;

// ---------------------------------------------------------------------------
// Brute-force search for dependence models
// ---------------------------------------------------------------------------

type Facts = BTreeMap<String, BTreeSet<Vec<usize>>>;

fn lfd_truth(facts: &Facts, team: &[Vec<usize>], at: usize, phi: &LfdFormula) -> bool {
    let s = &team[at];
    match phi {
        LfdFormula::Atom(rel, args) => {
            let tuple: Vec<usize> = args.iter().map(|v| s[v.0 as usize]).collect();
            facts.get(rel).map(|f| f.contains(&tuple)).unwrap_or(false)
        }
        LfdFormula::And(a, b) => {
            lfd_truth(facts, team, at, a) && lfd_truth(facts, team, at, b)
        }
        LfdFormula::Not(a) => !lfd_truth(facts, team, at, a),
        LfdFormula::E(v, body) => (0..team.len()).any(|j| {
            v.iter().all(|w| team[j][w.0 as usize] == s[w.0 as usize])
                && lfd_truth(facts, team, j, body)
        }),
        LfdFormula::Dep(v, u) => team.iter().all(|t| {
            v.iter().any(|w| t[w.0 as usize] != s[w.0 as usize])
                || t[u.0 as usize] == s[u.0 as usize]
        }),
    }
}

fn all_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * n);
        for prefix in &out {
            for e in 0..n {
                let mut t = prefix.clone();
                t.push(e);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Teams are enumerated up to domain-element interchangeability: scanning
/// the team in order, elements must first appear as 0, 1, 2, ... and every
/// element must be used. Any model is isomorphic to one of this shape over
/// the domain its team covers.
fn team_is_canonical(team: &[Vec<usize>], n: usize) -> bool {
    let mut next_expected = 0usize;
    for s in team {
        for &e in s {
            if e > next_expected {
                return false;
            }
            if e == next_expected {
                next_expected += 1;
            }
        }
    }
    next_expected == n
}

fn combinations(total: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, total: usize, size: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == size {
            out.push(acc.clone());
            return;
        }
        for i in start..total {
            acc.push(i);
            rec(i + 1, total, size, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, total, size, &mut Vec::new(), &mut out);
    out
}

/// Relations occurring in a dependence formula, with their signature arity.
fn lfd_relations(sig: &Signature, phi: &LfdFormula) -> Vec<(String, usize)> {
    fn walk(phi: &LfdFormula, out: &mut BTreeMap<String, usize>) {
        match phi {
            LfdFormula::Atom(rel, args) => {
                out.insert(rel.clone(), args.len());
            }
            LfdFormula::Dep(..) => {}
            LfdFormula::And(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            LfdFormula::Not(a) | LfdFormula::E(_, a) => walk(a, out),
        }
    }
    let mut map = BTreeMap::new();
    walk(phi, &mut map);
    let _ = sig;
    map.into_iter().collect()
}

/// Exhaustive search for a dependence model of `phi`, over domains up to
/// `max_dom` and teams up to `max_team`, with symmetry reduction by element
/// interchangeability. Returns the first hit in a deterministic order.
pub fn brute_sat_lfd(
    sig: &Signature,
    phi: &LfdFormula,
    max_dom: usize,
    max_team: usize,
) -> Option<(DependenceModel, Assignment)> {
    brute_sat_lfd_search(sig, phi, max_dom, max_team, true)
}

/// Same search without the symmetry reduction; only sensible at the very
/// smallest bounds. Used to validate that the reduction never changes the
/// verdict.
pub fn brute_sat_lfd_unreduced(
    sig: &Signature,
    phi: &LfdFormula,
    max_dom: usize,
    max_team: usize,
) -> Option<(DependenceModel, Assignment)> {
    brute_sat_lfd_search(sig, phi, max_dom, max_team, false)
}

fn brute_sat_lfd_search(
    sig: &Signature,
    phi: &LfdFormula,
    max_dom: usize,
    max_team: usize,
    reduce: bool,
) -> Option<(DependenceModel, Assignment)> {
    let k = sig.k();
    let rels = lfd_relations(sig, phi);
    for n in 1..=max_dom {
        let assignments = all_tuples(n, k);
        let spaces: Vec<Vec<Vec<usize>>> =
            rels.iter().map(|(_, a)| all_tuples(n, *a)).collect();
        for team_size in 1..=max_team.min(assignments.len()) {
            for combo in combinations(assignments.len(), team_size) {
                let team: Vec<Vec<usize>> =
                    combo.iter().map(|i| assignments[*i].clone()).collect();
                if reduce && !team_is_canonical(&team, n) {
                    continue;
                }
                if let Some(found) =
                    search_interps(&rels, &spaces, 0, &mut BTreeMap::new(), &team, phi)
                {
                    let (facts, at) = found;
                    return Some(build_lfd_result(sig, n, &facts, &team, at));
                }
            }
        }
    }
    None
}

fn search_interps(
    rels: &[(String, usize)],
    spaces: &[Vec<Vec<usize>>],
    depth: usize,
    facts: &mut Facts,
    team: &[Vec<usize>],
    phi: &LfdFormula,
) -> Option<(Facts, usize)> {
    if depth == rels.len() {
        for at in 0..team.len() {
            if lfd_truth(facts, team, at, phi) {
                return Some((facts.clone(), at));
            }
        }
        return None;
    }
    let space = &spaces[depth];
    for mask in 0u64..(1u64 << space.len()) {
        let chosen: BTreeSet<Vec<usize>> = space
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, t)| t.clone())
            .collect();
        facts.insert(rels[depth].0.clone(), chosen);
        if let Some(found) = search_interps(rels, spaces, depth + 1, facts, team, phi) {
            return Some(found);
        }
    }
    facts.remove(&rels[depth].0);
    None
}

fn build_lfd_result(
    sig: &Signature,
    n: usize,
    facts: &Facts,
    team: &[Vec<usize>],
    at: usize,
) -> (DependenceModel, Assignment) {
    let domain: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut m = StandardModel::empty(sig, domain).expect("fresh domain");
    for (rel, tuples) in facts {
        for t in tuples {
            let tuple: Vec<ElemId> = t.iter().map(|e| ElemId(*e as u32)).collect();
            m.add_fact(rel, t.len(), tuple);
        }
    }
    let to_assignment =
        |s: &Vec<usize>| Assignment(s.iter().map(|e| ElemId(*e as u32)).collect());
    let team_set: BTreeSet<Assignment> = team.iter().map(to_assignment).collect();
    let witness = to_assignment(&team[at]);
    (DependenceModel::new(m, team_set), witness)
}

// ---------------------------------------------------------------------------
// Brute-force search for standard models of guarded formulas
// ---------------------------------------------------------------------------

enum Prop {
    Const(bool),
    Var(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

struct AtomTable {
    ids: BTreeMap<(String, Vec<usize>), usize>,
    atoms: Vec<(String, Vec<usize>)>,
}

impl AtomTable {
    fn new() -> AtomTable {
        AtomTable {
            ids: BTreeMap::new(),
            atoms: Vec::new(),
        }
    }

    fn id(&mut self, rel: &str, tuple: Vec<usize>) -> usize {
        if let Some(&i) = self.ids.get(&(rel.to_string(), tuple.clone())) {
            return i;
        }
        let i = self.atoms.len();
        self.ids.insert((rel.to_string(), tuple.clone()), i);
        self.atoms.push((rel.to_string(), tuple));
        i
    }
}

fn ground(
    phi: &FoFormula,
    env: &mut BTreeMap<String, usize>,
    atoms: &mut AtomTable,
    n: usize,
) -> Prop {
    match phi {
        FoFormula::Atom(rel, args) => {
            let tuple: Vec<usize> = args.iter().map(|x| env[x]).collect();
            Prop::Var(atoms.id(rel, tuple))
        }
        FoFormula::Eq(a, b) => Prop::Const(env[a] == env[b]),
        FoFormula::And(a, b) => Prop::And(vec![
            ground(a, env, atoms, n),
            ground(b, env, atoms, n),
        ]),
        FoFormula::Not(a) => Prop::Not(Box::new(ground(a, env, atoms, n))),
        FoFormula::Exists(bound, body) => {
            ground_exists(bound, None, body, env, atoms, n)
        }
        FoFormula::GuardedExists {
            guard_rel,
            guard_args,
            bound,
            body,
        } => ground_exists(bound, Some((guard_rel, guard_args)), body, env, atoms, n),
    }
}

fn ground_exists(
    bound: &[String],
    guard: Option<(&String, &Vec<String>)>,
    body: &FoFormula,
    env: &mut BTreeMap<String, usize>,
    atoms: &mut AtomTable,
    n: usize,
) -> Prop {
    if bound.is_empty() {
        let grounded = ground(body, env, atoms, n);
        return match guard {
            Some((rel, args)) => {
                let tuple: Vec<usize> = args.iter().map(|x| env[x]).collect();
                Prop::And(vec![Prop::Var(atoms.id(rel, tuple)), grounded])
            }
            None => grounded,
        };
    }
    let (first, rest) = bound.split_first().map(|(f, r)| (f.clone(), r)).unwrap();
    let saved = env.get(&first).copied();
    let mut branches = Vec::with_capacity(n);
    for e in 0..n {
        env.insert(first.clone(), e);
        branches.push(ground_exists(rest, guard, body, env, atoms, n));
    }
    match saved {
        Some(v) => {
            env.insert(first, v);
        }
        None => {
            env.remove(&first);
        }
    }
    Prop::Or(branches)
}

/// Three-valued evaluation that also reports the first atom still undecided
/// along the unsettled frontier, which is the next branching candidate.
fn eval3(p: &Prop, assign: &[Option<bool>]) -> (Option<bool>, Option<usize>) {
    match p {
        Prop::Const(b) => (Some(*b), None),
        Prop::Var(i) => match assign[*i] {
            Some(b) => (Some(b), None),
            None => (None, Some(*i)),
        },
        Prop::Not(a) => {
            let (v, w) = eval3(a, assign);
            (v.map(|b| !b), w)
        }
        Prop::And(items) => {
            let mut unknown = None;
            for item in items {
                match eval3(item, assign) {
                    (Some(false), _) => return (Some(false), None),
                    (Some(true), _) => {}
                    (None, w) => {
                        if unknown.is_none() {
                            unknown = w;
                        }
                    }
                }
            }
            if unknown.is_none() {
                (Some(true), None)
            } else {
                (None, unknown)
            }
        }
        Prop::Or(items) => {
            let mut unknown = None;
            for item in items {
                match eval3(item, assign) {
                    (Some(true), _) => return (Some(true), None),
                    (Some(false), _) => {}
                    (None, w) => {
                        if unknown.is_none() {
                            unknown = w;
                        }
                    }
                }
            }
            if unknown.is_none() {
                (Some(false), None)
            } else {
                (None, unknown)
            }
        }
    }
}

fn dpll(p: &Prop, assign: &mut Vec<Option<bool>>) -> bool {
    match eval3(p, assign) {
        (Some(v), _) => v,
        (None, Some(var)) => {
            for value in [true, false] {
                assign[var] = Some(value);
                if dpll(p, assign) {
                    return true;
                }
            }
            assign[var] = None;
            false
        }
        (None, None) => unreachable!("unknown value without an unknown atom"),
    }
}

/// Exhaustive bounded search for a standard model of a first-order formula,
/// by grounding over each domain size and backtracking over atom truth
/// values. Open formulas additionally require the satisfying assignment to
/// be guarded by some fact.
pub fn brute_sat_gf(
    phi: &FoFormula,
    max_dom: usize,
) -> Result<Option<(StandardModel, BTreeMap<String, ElemId>)>> {
    let arities = phi.relations_used()?;
    let free: Vec<String> = phi.free_vars().into_iter().collect();
    for n in 1..=max_dom {
        for values in all_tuples(n, free.len()) {
            let mut env: BTreeMap<String, usize> = free
                .iter()
                .cloned()
                .zip(values.iter().copied())
                .collect();
            let mut atoms = AtomTable::new();
            let mut grounded = ground(phi, &mut env, &mut atoms, n);
            if !free.is_empty() {
                // The satisfying assignment must live inside some fact.
                let image: BTreeSet<usize> = values.iter().copied().collect();
                let mut covering = Vec::new();
                for (rel, arity) in &arities {
                    for tuple in all_tuples(n, *arity) {
                        let covers = image.iter().all(|e| tuple.contains(e));
                        if covers {
                            covering.push(Prop::Var(atoms.id(rel, tuple)));
                        }
                    }
                }
                grounded = Prop::And(vec![grounded, Prop::Or(covering)]);
            }
            let mut assign = vec![None; atoms.atoms.len()];
            if dpll(&grounded, &mut assign) {
                let domain: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
                let mut m = StandardModel::new(domain, Vec::new())?;
                for (rel, arity) in &arities {
                    m.interp.insert(
                        rel.clone(),
                        crate::models::Relation {
                            arity: *arity,
                            tuples: BTreeSet::new(),
                        },
                    );
                }
                for (i, (rel, tuple)) in atoms.atoms.iter().enumerate() {
                    if assign[i] == Some(true) {
                        let ids: Vec<ElemId> =
                            tuple.iter().map(|e| ElemId(*e as u32)).collect();
                        m.add_fact(rel, tuple.len(), ids);
                    }
                }
                let assignment: BTreeMap<String, ElemId> = free
                    .iter()
                    .cloned()
                    .zip(values.iter().map(|e| ElemId(*e as u32)))
                    .collect();
                return Ok(Some((m, assignment)));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Deterministic random corpus
// ---------------------------------------------------------------------------

/// Shape parameters for corpus generation.
#[derive(Clone, Copy, Debug)]
pub struct CorpusParams {
    pub domain_max: usize,
    pub team_max: usize,
    pub lfd_depth: usize,
    pub lfd_e_depth: usize,
    pub gf_depth: usize,
    pub fact_density: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            domain_max: 3,
            team_max: 4,
            lfd_depth: 3,
            lfd_e_depth: 3,
            gf_depth: 2,
            fact_density: 0.4,
        }
    }
}

/// Seeded generator of formulas and models over a fixed signature. The same
/// seed always reproduces the same stream.
pub struct Corpus {
    pub sig: Signature,
    pub params: CorpusParams,
    rng: ChaCha8Rng,
    fresh: usize,
}

impl Corpus {
    pub fn new(sig: Signature, seed: u64, params: CorpusParams) -> Corpus {
        Corpus {
            sig,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
            fresh: 0,
        }
    }

    fn pick_var(&mut self) -> LfdVar {
        LfdVar(self.rng.gen_range(0..self.sig.k()) as u8)
    }

    fn pick_set(&mut self) -> VarSet {
        VarSet(self.rng.gen_range(0..(1u32 << self.sig.k())))
    }

    fn pick_relation(&mut self) -> (String, usize) {
        let rels: Vec<(String, usize)> = self
            .sig
            .relations()
            .map(|(n, a)| (n.to_string(), a))
            .collect();
        rels[self.rng.gen_range(0..rels.len())].clone()
    }

    pub fn lfd_formula(&mut self) -> LfdFormula {
        let depth = self.params.lfd_depth;
        let e_depth = self.params.lfd_e_depth;
        self.lfd_rec(depth, e_depth)
    }

    fn lfd_rec(&mut self, depth: usize, e_depth: usize) -> LfdFormula {
        let leaf_only = depth == 0;
        let choice = if leaf_only {
            self.rng.gen_range(0..2)
        } else if e_depth == 0 {
            self.rng.gen_range(0..4)
        } else {
            self.rng.gen_range(0..5)
        };
        match choice {
            0 => {
                let (rel, arity) = self.pick_relation();
                let args = (0..arity).map(|_| self.pick_var()).collect();
                LfdFormula::Atom(rel, args)
            }
            1 => LfdFormula::dep(self.pick_set(), self.pick_var()),
            2 => LfdFormula::not(self.lfd_rec(depth - 1, e_depth)),
            3 => LfdFormula::and(
                self.lfd_rec(depth - 1, e_depth),
                self.lfd_rec(depth - 1, e_depth),
            ),
            _ => LfdFormula::e(self.pick_set(), self.lfd_rec(depth - 1, e_depth - 1)),
        }
    }

    fn fresh_var(&mut self) -> String {
        self.fresh += 1;
        format!("z{}", self.fresh)
    }

    /// A guarded formula whose free variables are among `scope`.
    pub fn gf_formula(&mut self, scope: &[String], depth: usize) -> FoFormula {
        let can_atom = !scope.is_empty();
        let choice = if depth == 0 {
            if can_atom {
                0
            } else {
                3
            }
        } else if can_atom {
            self.rng.gen_range(0..4)
        } else {
            3
        };
        match choice {
            0 => {
                let (rel, arity) = self.pick_relation();
                let args = (0..arity)
                    .map(|_| scope[self.rng.gen_range(0..scope.len())].clone())
                    .collect();
                FoFormula::Atom(rel, args)
            }
            1 => FoFormula::not(self.gf_formula(scope, depth - 1)),
            2 => FoFormula::and(
                self.gf_formula(scope, depth - 1),
                self.gf_formula(scope, depth - 1),
            ),
            _ => {
                // Guarded quantifier: the guard mixes in-scope variables with
                // fresh bound ones; the body lives over the guard variables.
                let (rel, arity) = self.pick_relation();
                let mut args: Vec<String> = Vec::with_capacity(arity);
                let mut bound: Vec<String> = Vec::new();
                for _ in 0..arity {
                    if !scope.is_empty() && self.rng.gen_bool(0.4) {
                        args.push(scope[self.rng.gen_range(0..scope.len())].clone());
                    } else {
                        let y = self.fresh_var();
                        bound.push(y.clone());
                        args.push(y);
                    }
                }
                if bound.is_empty() {
                    let y = self.fresh_var();
                    bound.push(y.clone());
                    args.push(y);
                    args.remove(0);
                }
                let guard_scope: Vec<String> = {
                    let mut vs: Vec<String> = args.clone();
                    vs.sort();
                    vs.dedup();
                    vs
                };
                let body = self.gf_formula(
                    &guard_scope,
                    depth.saturating_sub(1).min(1),
                );
                FoFormula::exists(bound, FoFormula::and(FoFormula::Atom(rel, args), body))
            }
        }
    }

    pub fn gf_sentence(&mut self) -> FoFormula {
        let depth = self.params.gf_depth;
        let one = self.gf_formula(&[], depth);
        if self.rng.gen_bool(0.4) {
            let two = self.gf_formula(&[], depth.saturating_sub(1));
            if self.rng.gen_bool(0.5) {
                FoFormula::and(one, FoFormula::not(two))
            } else {
                FoFormula::and(one, two)
            }
        } else {
            one
        }
    }

    pub fn standard_model(&mut self) -> StandardModel {
        let n = self.rng.gen_range(1..=self.params.domain_max);
        let domain: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let mut m = StandardModel::empty(&self.sig, domain).expect("fresh domain");
        let rels: Vec<(String, usize)> = self
            .sig
            .relations()
            .map(|(r, a)| (r.to_string(), a))
            .collect();
        for (rel, arity) in rels {
            for tuple in all_tuples(n, arity) {
                if self.rng.gen_bool(self.params.fact_density) {
                    let ids = tuple.iter().map(|e| ElemId(*e as u32)).collect();
                    m.add_fact(&rel, arity, ids);
                }
            }
        }
        m
    }

    pub fn dependence_model(&mut self) -> DependenceModel {
        let base = self.standard_model();
        let n = base.domain_size();
        let k = self.sig.k();
        let size = self.rng.gen_range(1..=self.params.team_max);
        let mut team = BTreeSet::new();
        for _ in 0..size {
            let s = Assignment(
                (0..k)
                    .map(|_| ElemId(self.rng.gen_range(0..n) as u32))
                    .collect(),
            );
            team.insert(s);
        }
        DependenceModel::new(base, team)
    }

    /// A distinguished dependence model: every variable draws from its own
    /// tagged value pool, and facts are seeded from team images so that some
    /// of them are named.
    pub fn distinguished_model(&mut self) -> DependenceModel {
        let k = self.sig.k();
        let pool = self.rng.gen_range(1..=self.params.domain_max);
        let domain: Vec<String> = (0..k)
            .flat_map(|v| {
                (0..pool).map(move |i| format!("{}:{i}", v))
            })
            .map(|s| s)
            .collect();
        // Tag by variable index to keep pools disjoint regardless of names.
        let mut m = StandardModel::empty(&self.sig, domain).expect("fresh domain");
        let elem = |m: &StandardModel, v: usize, i: usize| {
            m.elem(&format!("{v}:{i}")).expect("pool element")
        };
        let size = self.rng.gen_range(1..=self.params.team_max);
        let mut team = BTreeSet::new();
        for _ in 0..size {
            let s = Assignment(
                (0..k)
                    .map(|v| elem(&m, v, self.rng.gen_range(0..pool)))
                    .collect(),
            );
            team.insert(s);
        }
        let team_vec: Vec<Assignment> = team.iter().cloned().collect();
        let rels: Vec<(String, usize)> = self
            .sig
            .relations()
            .map(|(r, a)| (r.to_string(), a))
            .collect();
        for (rel, arity) in &rels {
            for s in &team_vec {
                for combo in crate::models::var_tuples(k, *arity) {
                    if self.rng.gen_bool(self.params.fact_density / 2.0) {
                        let tuple: Vec<ElemId> = combo.iter().map(|v| s.get(*v)).collect();
                        m.add_fact(rel, *arity, tuple);
                    }
                }
            }
        }
        // A little unnamed noise, dropped by the fact-dropping transformation.
        for (rel, arity) in &rels {
            for _ in 0..2 {
                if self.rng.gen_bool(self.params.fact_density / 3.0) {
                    let tuple: Vec<ElemId> = (0..*arity)
                        .map(|_| {
                            let v = self.rng.gen_range(0..k);
                            let i = self.rng.gen_range(0..pool);
                            elem(&m, v, i)
                        })
                        .collect();
                    m.add_fact(rel, *arity, tuple);
                }
            }
        }
        DependenceModel::new(m, team)
    }

    pub fn pick_assignment(&mut self, dm: &DependenceModel) -> Assignment {
        let team: Vec<&Assignment> = dm.team.iter().collect();
        team[self.rng.gen_range(0..team.len())].clone()
    }

    pub fn gen_bool(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn gen_range(&mut self, upper: usize) -> usize {
        self.rng.gen_range(0..upper)
    }
}
