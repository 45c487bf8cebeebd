//! Semantics: model checking for the dependence language over teams and for
//! first-order formulas over standard models, dependence closure, and
//! dependence-bisimulation checking and computation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::Error;
use crate::models::{var_tuples, Assignment, DependenceModel, ElemId, StandardModel};
use crate::syntax::{FoFormula, LfdFormula, LfdVar, Signature, VarSet};
use crate::Result;

/// Truth of a dependence-language formula at a team member.
///
/// The existential modality searches the team for a witness agreeing on the
/// fixed set; the dependence atom quantifies universally over the team.
/// Recursion is memoized per subformula and team member.
pub fn eval_lfd(dm: &DependenceModel, s: &Assignment, phi: &LfdFormula) -> Result<bool> {
    if dm.team.is_empty() {
        return Err(Error::EmptyTeam);
    }
    let team: Vec<&Assignment> = dm.team.iter().collect();
    let at = team.binary_search(&s).map_err(|_| Error::NotInTeam)?;
    validate_vars(phi, team[0].k())?;
    let mut memo = HashMap::new();
    eval_lfd_rec(dm, &team, at, phi, &mut memo)
}

fn validate_vars(phi: &LfdFormula, k: usize) -> Result<()> {
    let full = VarSet::full(k);
    let check = |set: VarSet| {
        if set.is_subset(full) {
            Ok(())
        } else {
            Err(Error::UnknownVar("variable index out of range".into()))
        }
    };
    match phi {
        LfdFormula::Atom(_, args) => check(args.iter().copied().collect()),
        LfdFormula::Dep(v, u) => check(v.with(*u)),
        LfdFormula::And(a, b) => {
            validate_vars(a, k)?;
            validate_vars(b, k)
        }
        LfdFormula::Not(a) => validate_vars(a, k),
        LfdFormula::E(v, a) => {
            check(*v)?;
            validate_vars(a, k)
        }
    }
}

fn eval_lfd_rec(
    dm: &DependenceModel,
    team: &[&Assignment],
    at: usize,
    phi: &LfdFormula,
    memo: &mut HashMap<(usize, usize), bool>,
) -> Result<bool> {
    let key = (phi as *const LfdFormula as usize, at);
    if let Some(v) = memo.get(&key) {
        return Ok(*v);
    }
    let s = team[at];
    let value = match phi {
        LfdFormula::Atom(rel, args) => {
            let tuple: Vec<ElemId> = args.iter().map(|v| s.get(*v)).collect();
            dm.base.holds(rel, &tuple)?
        }
        LfdFormula::And(a, b) => {
            eval_lfd_rec(dm, team, at, a, memo)? && eval_lfd_rec(dm, team, at, b, memo)?
        }
        LfdFormula::Not(a) => !eval_lfd_rec(dm, team, at, a, memo)?,
        LfdFormula::E(v, body) => {
            let mut found = false;
            for (j, t) in team.iter().enumerate() {
                if s.agrees_on(t, *v) && eval_lfd_rec(dm, team, j, body, memo)? {
                    found = true;
                    break;
                }
            }
            found
        }
        LfdFormula::Dep(v, u) => team
            .iter()
            .all(|t| !s.agrees_on(t, *v) || s.get(*u) == t.get(*u)),
    };
    memo.insert(key, value);
    Ok(value)
}

/// Standard Tarskian truth of a first-order formula under a partial
/// assignment. The guarded quantifier is read as its plain first-order form.
pub fn eval_fo(m: &StandardModel, s: &BTreeMap<String, ElemId>, phi: &FoFormula) -> Result<bool> {
    let mut env = s.clone();
    eval_fo_rec(m, &mut env, phi)
}

fn eval_fo_rec(
    m: &StandardModel,
    env: &mut BTreeMap<String, ElemId>,
    phi: &FoFormula,
) -> Result<bool> {
    match phi {
        FoFormula::Atom(rel, args) => {
            let tuple = args
                .iter()
                .map(|x| {
                    env.get(x)
                        .copied()
                        .ok_or_else(|| Error::UnassignedVar(x.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            m.holds(rel, &tuple)
        }
        FoFormula::Eq(a, b) => {
            let va = env
                .get(a)
                .copied()
                .ok_or_else(|| Error::UnassignedVar(a.clone()))?;
            let vb = env
                .get(b)
                .copied()
                .ok_or_else(|| Error::UnassignedVar(b.clone()))?;
            Ok(va == vb)
        }
        FoFormula::And(a, b) => Ok(eval_fo_rec(m, env, a)? && eval_fo_rec(m, env, b)?),
        FoFormula::Not(a) => Ok(!eval_fo_rec(m, env, a)?),
        FoFormula::Exists(bound, body) => exists_rec(m, env, bound, None, body),
        FoFormula::GuardedExists {
            guard_rel,
            guard_args,
            bound,
            body,
        } => exists_rec(m, env, bound, Some((guard_rel, guard_args)), body),
    }
}

fn exists_rec(
    m: &StandardModel,
    env: &mut BTreeMap<String, ElemId>,
    bound: &[String],
    guard: Option<(&String, &Vec<String>)>,
    body: &FoFormula,
) -> Result<bool> {
    if bound.is_empty() {
        let guard_ok = match guard {
            Some((rel, args)) => {
                let tuple = args
                    .iter()
                    .map(|x| {
                        env.get(x)
                            .copied()
                            .ok_or_else(|| Error::UnassignedVar(x.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                m.holds(rel, &tuple)?
            }
            None => true,
        };
        return Ok(guard_ok && eval_fo_rec(m, env, body)?);
    }
    let (first, rest) = bound.split_first().map(|(f, r)| (f.clone(), r)).unwrap();
    let saved = env.get(&first).copied();
    for e in m.elems() {
        env.insert(first.clone(), e);
        if exists_rec(m, env, rest, guard, body)? {
            restore(env, &first, saved);
            return Ok(true);
        }
    }
    restore(env, &first, saved);
    Ok(false)
}

fn restore(env: &mut BTreeMap<String, ElemId>, key: &str, saved: Option<ElemId>) {
    match saved {
        Some(v) => {
            env.insert(key.to_string(), v);
        }
        None => {
            env.remove(key);
        }
    }
}

/// The set of variables locally determined by `v` at `s`: all `u` such that
/// the dependence atom over `(v, u)` holds. Always contains `v`.
pub fn dep_closure(dm: &DependenceModel, s: &Assignment, v: VarSet) -> Result<VarSet> {
    let k = s.k();
    let mut out = VarSet::EMPTY;
    for u in (0..k as u8).map(LfdVar) {
        if eval_lfd(dm, s, &LfdFormula::dep(v, u))? {
            out = out.with(u);
        }
    }
    Ok(out)
}

/// The set of variables two assignments agree on.
pub fn agreement_set(s: &Assignment, t: &Assignment) -> VarSet {
    s.agreement(t)
}

/// A relation between the teams of two dependence models.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BisimRelation {
    pub pairs: BTreeSet<(Assignment, Assignment)>,
}

/// Outcome of verifying a candidate dependence bisimulation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BisimCheck {
    Ok,
    Fail(BisimFailure),
}

impl BisimCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, BisimCheck::Ok)
    }
}

/// The failing clause, naming the offending pair.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BisimFailure {
    PairOutsideTeams(Assignment, Assignment),
    NotTotalLeft(Assignment),
    NotTotalRight(Assignment),
    Atom {
        left: Assignment,
        right: Assignment,
        rel: String,
        args: Vec<LfdVar>,
    },
    Forth {
        left: Assignment,
        right: Assignment,
        witness_demand: Assignment,
    },
    Back {
        left: Assignment,
        right: Assignment,
        witness_demand: Assignment,
    },
}

impl BisimFailure {
    pub fn clause(&self) -> &'static str {
        match self {
            BisimFailure::PairOutsideTeams(..) => "pair",
            BisimFailure::NotTotalLeft(_) | BisimFailure::NotTotalRight(_) => "totality",
            BisimFailure::Atom { .. } => "atom",
            BisimFailure::Forth { .. } => "forth",
            BisimFailure::Back { .. } => "back",
        }
    }
}

fn atom_harmony(
    sig: &Signature,
    left: &DependenceModel,
    right: &DependenceModel,
    s: &Assignment,
    s2: &Assignment,
) -> Option<(String, Vec<LfdVar>)> {
    for (rel, arity) in sig.relations() {
        for combo in var_tuples(sig.k(), arity) {
            let lt: Vec<ElemId> = combo.iter().map(|v| s.get(*v)).collect();
            let rt: Vec<ElemId> = combo.iter().map(|v| s2.get(*v)).collect();
            if left.base.holds_or_empty(rel, &lt) != right.base.holds_or_empty(rel, &rt) {
                return Some((rel.to_string(), combo));
            }
        }
    }
    None
}

/// Precomputed dependence closures for every team member and variable set.
struct ClosureTableSide {
    team: Vec<Assignment>,
    closures: Vec<Vec<VarSet>>,
}

impl ClosureTableSide {
    fn new(dm: &DependenceModel, k: usize) -> ClosureTableSide {
        let team: Vec<Assignment> = dm.team.iter().cloned().collect();
        let closures = team
            .iter()
            .map(|s| {
                VarSet::all_subsets(k)
                    .map(|v| {
                        let mut out = VarSet::EMPTY;
                        for u in (0..k as u8).map(LfdVar) {
                            if team
                                .iter()
                                .all(|t| !s.agrees_on(t, v) || s.get(u) == t.get(u))
                            {
                                out = out.with(u);
                            }
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        ClosureTableSide { team, closures }
    }

    fn index(&self, s: &Assignment) -> Option<usize> {
        self.team.binary_search(s).ok()
    }

    fn dep_closed(&self, idx: usize, v: VarSet) -> bool {
        self.closures[idx][v.0 as usize] == v
    }
}

/// Verifies the three bisimulation clauses plus totality.
pub fn check_dep_bisim(
    sig: &Signature,
    left: &DependenceModel,
    right: &DependenceModel,
    z: &BisimRelation,
) -> BisimCheck {
    let k = sig.k();
    let lt = ClosureTableSide::new(left, k);
    let rt = ClosureTableSide::new(right, k);

    for (s, s2) in &z.pairs {
        if lt.index(s).is_none() || rt.index(s2).is_none() {
            return BisimCheck::Fail(BisimFailure::PairOutsideTeams(s.clone(), s2.clone()));
        }
    }
    let dom: BTreeSet<&Assignment> = z.pairs.iter().map(|(s, _)| s).collect();
    let cod: BTreeSet<&Assignment> = z.pairs.iter().map(|(_, s)| s).collect();
    for s in &left.team {
        if !dom.contains(s) {
            return BisimCheck::Fail(BisimFailure::NotTotalLeft(s.clone()));
        }
    }
    for s2 in &right.team {
        if !cod.contains(s2) {
            return BisimCheck::Fail(BisimFailure::NotTotalRight(s2.clone()));
        }
    }

    for (s, s2) in &z.pairs {
        if let Some((rel, args)) = atom_harmony(sig, left, right, s, s2) {
            return BisimCheck::Fail(BisimFailure::Atom {
                left: s.clone(),
                right: s2.clone(),
                rel,
                args,
            });
        }
        let s2_idx = rt.index(s2).unwrap();
        for t in &left.team {
            let v = s.agreement(t);
            let ok = right.team.iter().any(|t2| {
                v.is_subset(s2.agreement(t2))
                    && z.pairs.contains(&(t.clone(), t2.clone()))
                    && rt.dep_closed(s2_idx, v)
            });
            if !ok {
                return BisimCheck::Fail(BisimFailure::Forth {
                    left: s.clone(),
                    right: s2.clone(),
                    witness_demand: t.clone(),
                });
            }
        }
        let s_idx = lt.index(s).unwrap();
        for t2 in &right.team {
            let v = s2.agreement(t2);
            let ok = left.team.iter().any(|t| {
                v.is_subset(s.agreement(t))
                    && z.pairs.contains(&(t.clone(), t2.clone()))
                    && lt.dep_closed(s_idx, v)
            });
            if !ok {
                return BisimCheck::Fail(BisimFailure::Back {
                    left: s.clone(),
                    right: s2.clone(),
                    witness_demand: t2.clone(),
                });
            }
        }
    }
    BisimCheck::Ok
}

/// Computes the greatest dependence bisimulation by coinductive refinement:
/// start from the atom-harmonious pairs and delete pairs violating forth or
/// back until a fixpoint. Bisimulations are total by definition, so a
/// non-total fixpoint means there is none.
pub fn greatest_dep_bisim(
    sig: &Signature,
    left: &DependenceModel,
    right: &DependenceModel,
) -> Option<BisimRelation> {
    let k = sig.k();
    let lt = ClosureTableSide::new(left, k);
    let rt = ClosureTableSide::new(right, k);
    let nl = lt.team.len();
    let nr = rt.team.len();

    let mut related = vec![vec![false; nr]; nl];
    for (i, s) in lt.team.iter().enumerate() {
        for (j, s2) in rt.team.iter().enumerate() {
            related[i][j] = atom_harmony(sig, left, right, s, s2).is_none();
        }
    }

    loop {
        let mut changed = false;
        for i in 0..nl {
            for j in 0..nr {
                if !related[i][j] {
                    continue;
                }
                let forth_ok = (0..nl).all(|ti| {
                    let v = lt.team[i].agreement(&lt.team[ti]);
                    (0..nr).any(|tj| {
                        related[ti][tj]
                            && v.is_subset(rt.team[j].agreement(&rt.team[tj]))
                            && rt.dep_closed(j, v)
                    })
                });
                let back_ok = forth_ok
                    && (0..nr).all(|tj| {
                        let v = rt.team[j].agreement(&rt.team[tj]);
                        (0..nl).any(|ti| {
                            related[ti][tj]
                                && v.is_subset(lt.team[i].agreement(&lt.team[ti]))
                                && lt.dep_closed(i, v)
                        })
                    });
                if !back_ok {
                    related[i][j] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let total_left = (0..nl).all(|i| (0..nr).any(|j| related[i][j]));
    let total_right = (0..nr).all(|j| (0..nl).any(|i| related[i][j]));
    if !total_left || !total_right {
        return None;
    }
    let mut pairs = BTreeSet::new();
    for i in 0..nl {
        for j in 0..nr {
            if related[i][j] {
                pairs.insert((lt.team[i].clone(), rt.team[j].clone()));
            }
        }
    }
    Some(BisimRelation { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::models::{distinguish, full_team};
    use crate::syntax::parse_lfd;

    fn sig2() -> Signature {
        Signature::new(
            vec![("P".to_string(), 1), ("R".to_string(), 2)],
            vec!["x".into(), "y".into()],
        )
        .unwrap()
    }

    fn model_ab() -> StandardModel {
        StandardModel::new(
            vec!["a".into(), "b".into()],
            vec![("P".into(), 1, vec![vec!["a".into()]]), ("R".into(), 2, vec![])],
        )
        .unwrap()
    }

    fn asg(m: &StandardModel, names: &[&str]) -> Assignment {
        Assignment(names.iter().map(|n| m.elem(n).unwrap()).collect())
    }

    #[test]
    fn modality_searches_the_team() {
        let sig = sig2();
        let m = model_ab();
        let s = asg(&m, &["a", "b"]);
        let dm = DependenceModel::new(m, [s.clone()].into_iter().collect());
        let yes = parse_lfd("E[] P(x)", &sig).unwrap();
        let no = parse_lfd("E[] P(y)", &sig).unwrap();
        assert!(eval_lfd(&dm, &s, &yes).unwrap());
        assert!(!eval_lfd(&dm, &s, &no).unwrap());
    }

    #[test]
    fn projection_dependence_always_holds() {
        let sig = sig2();
        let m = model_ab();
        let team: BTreeSet<Assignment> =
            [asg(&m, &["a", "b"]), asg(&m, &["b", "a"])].into_iter().collect();
        let dm = DependenceModel::new(m, team);
        for s in dm.team.clone() {
            for v in VarSet::all_subsets(sig.k()) {
                for u in v.iter() {
                    assert!(eval_lfd(&dm, &s, &LfdFormula::dep(v, u)).unwrap());
                }
            }
        }
    }

    #[test]
    fn global_dependence_fails_when_values_vary() {
        let sig = sig2();
        let m = model_ab();
        let team: BTreeSet<Assignment> =
            [asg(&m, &["a", "a"]), asg(&m, &["b", "a"])].into_iter().collect();
        let dm = DependenceModel::new(m, team.clone());
        let d = parse_lfd("D[] x", &sig).unwrap();
        for s in &team {
            assert!(!eval_lfd(&dm, s, &d).unwrap());
        }
    }

    #[test]
    fn eval_rejects_outsiders_and_empty_teams() {
        let sig = sig2();
        let m = model_ab();
        let inside = asg(&m, &["a", "a"]);
        let outside = asg(&m, &["b", "b"]);
        let dm = DependenceModel::new(m.clone(), [inside].into_iter().collect());
        let f = parse_lfd("P(x)", &sig).unwrap();
        assert!(matches!(eval_lfd(&dm, &outside, &f), Err(Error::NotInTeam)));
        let empty = DependenceModel::new(m, BTreeSet::new());
        assert!(matches!(eval_lfd(&empty, &outside, &f), Err(Error::EmptyTeam)));
    }

    #[test]
    fn fo_evaluation() {
        use crate::syntax::parse_fo;
        let m = model_ab();
        let empty = BTreeMap::new();
        let sat = parse_fo("exists x . P(x)", false).unwrap();
        assert!(eval_fo(&m, &empty, &sat).unwrap());
        let unsat = parse_fo("(exists x . P(x) & ~exists y . P(y))", false).unwrap();
        assert!(!eval_fo(&m, &empty, &unsat).unwrap());
        let a = m.elem("a").unwrap();
        let env: BTreeMap<String, ElemId> = [("x".to_string(), a), ("y".to_string(), a)].into();
        assert!(eval_fo(&m, &env, &parse_fo("x = y", true).unwrap()).unwrap());
        assert!(matches!(
            eval_fo(&m, &empty, &parse_fo("P(z)", false).unwrap()),
            Err(Error::UnassignedVar(_))
        ));
    }

    #[test]
    fn forall_matches_its_encoding() {
        use crate::syntax::parse_fo;
        let m = StandardModel::new(
            vec!["a".into(), "b".into()],
            vec![
                ("P".into(), 1, vec![vec!["b".into()]]),
                (
                    "R".into(),
                    2,
                    vec![vec!["a".into(), "b".into()], vec!["b".into(), "b".into()]],
                ),
            ],
        )
        .unwrap();
        let forall = parse_fo("forall x y . (R(x,y) -> P(y))", false).unwrap();
        let encoded = parse_fo("~exists x y . (R(x,y) & ~P(y))", false).unwrap();
        assert_eq!(forall, encoded);
        assert!(eval_fo(&m, &BTreeMap::new(), &forall).unwrap());
    }

    #[test]
    fn dep_closure_facts() {
        let sig = sig2();
        let m = model_ab();
        // Singleton team: everything is determined by anything.
        let s = asg(&m, &["a", "b"]);
        let dm = DependenceModel::new(m.clone(), [s.clone()].into_iter().collect());
        assert_eq!(
            dep_closure(&dm, &s, VarSet::EMPTY).unwrap(),
            VarSet::full(sig.k())
        );
        // Full team over two elements: nothing beyond the base is determined.
        let full = full_team(&sig, &m, &Caps::default()).unwrap();
        for s in full.team.clone() {
            for v in VarSet::all_subsets(sig.k()) {
                assert_eq!(dep_closure(&full, &s, v).unwrap(), v);
            }
        }
    }

    #[test]
    fn agreement_sets() {
        let m = model_ab();
        let s = asg(&m, &["a", "b"]);
        assert_eq!(agreement_set(&s, &s), VarSet::full(2));
        assert_eq!(agreement_set(&s, &asg(&m, &["b", "a"])), VarSet::EMPTY);
        assert_eq!(
            agreement_set(&s, &asg(&m, &["a", "a"])),
            VarSet::singleton(LfdVar(0))
        );
    }

    #[test]
    fn identity_is_a_bisimulation() {
        let sig = sig2();
        let m = model_ab();
        let team: BTreeSet<Assignment> =
            [asg(&m, &["a", "b"]), asg(&m, &["a", "a"])].into_iter().collect();
        let dm = DependenceModel::new(m, team.clone());
        let z = BisimRelation {
            pairs: team.iter().map(|s| (s.clone(), s.clone())).collect(),
        };
        assert!(check_dep_bisim(&sig, &dm, &dm, &z).is_ok());
    }

    #[test]
    fn distinguish_pairs_form_a_bisimulation() {
        let sig = sig2();
        let m = model_ab();
        let team: BTreeSet<Assignment> =
            [asg(&m, &["a", "a"]), asg(&m, &["b", "a"])].into_iter().collect();
        let dm = DependenceModel::new(m, team);
        let (d, z) = distinguish(&sig, &dm);
        assert!(check_dep_bisim(&sig, &dm, &d, &z).is_ok());
        assert!(greatest_dep_bisim(&sig, &dm, &d).is_some());
    }

    #[test]
    fn atom_disagreement_is_reported() {
        let sig = sig2();
        let m = model_ab();
        let s_a = asg(&m, &["a", "a"]);
        let s_b = asg(&m, &["b", "b"]);
        let left = DependenceModel::new(m.clone(), [s_a.clone()].into_iter().collect());
        let right = DependenceModel::new(m.clone(), [s_b.clone()].into_iter().collect());
        let z = BisimRelation {
            pairs: [(s_a, s_b)].into_iter().collect(),
        };
        match check_dep_bisim(&sig, &left, &right, &z) {
            BisimCheck::Fail(f) => assert_eq!(f.clause(), "atom"),
            BisimCheck::Ok => panic!("expected an atom counterexample"),
        }
    }

    #[test]
    fn greatest_bisim_contains_identity_and_detects_difference() {
        let sig = sig2();
        let m = model_ab();
        let team: BTreeSet<Assignment> =
            [asg(&m, &["a", "b"]), asg(&m, &["b", "a"])].into_iter().collect();
        let dm = DependenceModel::new(m.clone(), team.clone());
        let z = greatest_dep_bisim(&sig, &dm, &dm).expect("reflexive bisimulation");
        for s in &team {
            assert!(z.pairs.contains(&(s.clone(), s.clone())));
        }

        // Models disagreeing on a sentence admit no bisimulation.
        let holds_p = DependenceModel::new(m.clone(), [asg(&m, &["a", "a"])].into_iter().collect());
        let lacks_p = DependenceModel::new(m.clone(), [asg(&m, &["b", "b"])].into_iter().collect());
        let sentence = parse_lfd("E[] P(x)", &sig).unwrap();
        let sa = asg(&m, &["a", "a"]);
        let sb = asg(&m, &["b", "b"]);
        assert!(eval_lfd(&holds_p, &sa, &sentence).unwrap());
        assert!(!eval_lfd(&lacks_p, &sb, &sentence).unwrap());
        assert!(greatest_dep_bisim(&sig, &holds_p, &lacks_p).is_none());
    }
}
