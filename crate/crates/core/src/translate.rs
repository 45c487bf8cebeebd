//! Formula translations in both directions.
//!
//! Dependence language into first-order logic: the compositional translation
//! over the admissibility relation, in two flavors. [`fo_translation`] renders
//! dependence atoms with equality and unguarded quantifiers; [`gf_translation`]
//! replaces them by proxy relations and stays inside the guarded fragment.
//! Together with [`setup_conjuncts`] this yields the equisatisfiable guarded
//! reduction [`gf_reduction`].
//!
//! Guarded fragment into the dependence language: [`gf_to_lfd`] drives an
//! abstract substitution from first-order variables to LFD variables through
//! the formula; the quantifier clause disjoins over every extension of the
//! substitution to the bound variables.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::caps::Caps;
use crate::error::Error;
use crate::syntax::{
    closure, ExpandedSignature, FoFormula, LfdFormula, LfdVar, VarMap, VarSet,
};
use crate::Result;

enum DepStyle {
    Equality,
    Proxy,
}

fn prime(name: &str) -> String {
    format!("{name}'")
}

fn translate(exp: &ExpandedSignature, phi: &LfdFormula, style: &DepStyle) -> FoFormula {
    let sig = &exp.base;
    match phi {
        LfdFormula::Atom(rel, args) => FoFormula::Atom(
            rel.clone(),
            args.iter().map(|v| sig.var_name(*v).to_string()).collect(),
        ),
        LfdFormula::And(a, b) => FoFormula::and(
            translate(exp, a, style),
            translate(exp, b, style),
        ),
        LfdFormula::Not(a) => FoFormula::not(translate(exp, a, style)),
        LfdFormula::Dep(v, u) => match style {
            DepStyle::Proxy => FoFormula::Atom(
                exp.r_name(*v, VarSet::singleton(*u)).to_string(),
                sig.set_names(*v),
            ),
            DepStyle::Equality => {
                // forall primed copies: admissible and agreeing on V implies
                // agreeing on u.
                let primes: Vec<String> =
                    sig.var_names().iter().map(|n| prime(n)).collect();
                let consequent =
                    FoFormula::eq(sig.var_name(*u), prime(sig.var_name(*u)));
                let body = match FoFormula::conj_all(
                    v.iter()
                        .map(|w| FoFormula::eq(sig.var_name(w), prime(sig.var_name(w)))),
                ) {
                    Some(antecedent) => FoFormula::implies(antecedent, consequent),
                    None => consequent,
                };
                FoFormula::not(FoFormula::exists(
                    primes.clone(),
                    FoFormula::and(
                        FoFormula::Atom(exp.a_name.clone(), primes),
                        FoFormula::not(body),
                    ),
                ))
            }
        },
        LfdFormula::E(v, body) => {
            let inner = translate(exp, body, style);
            let bound = sig.set_names(VarSet::full(sig.k()).minus(*v));
            let guard_args = sig.var_names().to_vec();
            if bound.is_empty() {
                FoFormula::and(FoFormula::Atom(exp.a_name.clone(), guard_args), inner)
            } else {
                FoFormula::guarded_exists(exp.a_name.clone(), guard_args, bound, inner)
            }
        }
    }
}

/// First-order translation over the base signature plus the admissibility
/// relation. Dependence atoms come out as unguarded universal statements with
/// equality, so the result is only guarded for dependence-free input.
pub fn fo_translation(exp: &ExpandedSignature, phi: &LfdFormula) -> FoFormula {
    translate(exp, phi, &DepStyle::Equality)
}

/// Guarded translation over the expanded signature: identical to
/// [`fo_translation`] except that dependence atoms become proxy relation
/// atoms. The output is always in the guarded fragment.
pub fn gf_translation(exp: &ExpandedSignature, phi: &LfdFormula) -> FoFormula {
    translate(exp, phi, &DepStyle::Proxy)
}

/// Conjoins the translation with the admissibility atom over the canonical
/// variable tuple, the form in which truth of the translation matches truth
/// of the original at a team member.
pub fn with_admissibility(exp: &ExpandedSignature, translated: FoFormula) -> FoFormula {
    FoFormula::and(
        translated,
        FoFormula::Atom(exp.a_name.clone(), exp.base.var_names().to_vec()),
    )
}

/// Whether a formula's main connective is neither conjunction nor negation.
pub fn non_decomposable(phi: &LfdFormula) -> bool {
    matches!(
        phi,
        LfdFormula::Atom(..) | LfdFormula::Dep(..) | LfdFormula::E(..)
    )
}

/// The guarded theory forcing the proxy relations to behave like dependence
/// atoms on every admissible tuple, in a deterministic order:
///
/// 1. one projection conjunct per variable subset,
/// 2. one transitivity conjunct per triple of subsets,
/// 3. one transfer conjunct per non-decomposable closure member and pair of
///    subsets, moving a witness across a recorded dependence.
///
/// The projection conjunct for the empty set degenerates to the nullary
/// proxy of the vacuous dependence statement, which is true in every
/// intended expansion; this keeps the conjunct count exactly one per subset.
pub fn setup_conjuncts(exp: &ExpandedSignature, cl: &[LfdFormula]) -> Vec<FoFormula> {
    let sig = &exp.base;
    let k = sig.k();
    let all_vars = sig.var_names().to_vec();
    let guarded_all = |body: FoFormula| {
        FoFormula::forall_guarded(exp.a_name.clone(), all_vars.clone(), all_vars.clone(), body)
    };
    let proxy = |v: VarSet, u: VarSet| {
        FoFormula::Atom(exp.r_name(v, u).to_string(), sig.set_names(v))
    };

    let mut out = Vec::new();
    for v in VarSet::all_subsets(k) {
        let body = FoFormula::conj_all(
            v.iter().map(|u| proxy(v, VarSet::singleton(u))),
        )
        .unwrap_or_else(|| proxy(VarSet::EMPTY, VarSet::EMPTY));
        out.push(guarded_all(body));
    }
    for v in VarSet::all_subsets(k) {
        for u in VarSet::all_subsets(k) {
            for w in VarSet::all_subsets(k) {
                let body = FoFormula::implies(
                    FoFormula::and(proxy(v, u), proxy(u, w)),
                    proxy(v, w),
                );
                out.push(guarded_all(body));
            }
        }
    }
    for xi in cl.iter().filter(|f| non_decomposable(f)) {
        for v in VarSet::all_subsets(k) {
            for u in VarSet::all_subsets(k) {
                let here = gf_translation(exp, &LfdFormula::e(v, xi.clone()));
                let there = gf_translation(exp, &LfdFormula::e(v.union(u), xi.clone()));
                let body =
                    FoFormula::implies(FoFormula::and(proxy(v, u), here), there);
                out.push(guarded_all(body));
            }
        }
    }
    out
}

/// The setup theory as one sentence.
pub fn setup_sentence(exp: &ExpandedSignature, psi: &LfdFormula, caps: &Caps) -> Result<FoFormula> {
    let cl = closure(&exp.base, psi, caps.closure_cap)?;
    Ok(FoFormula::conj_all(setup_conjuncts(exp, &cl)).expect("setup is never empty"))
}

/// The satisfiability-preserving guarded reduction: the guarded translation,
/// the setup theory, and admissibility of the canonical variable tuple.
pub fn gf_reduction(exp: &ExpandedSignature, psi: &LfdFormula, caps: &Caps) -> Result<FoFormula> {
    let setup = setup_sentence(exp, psi, caps)?;
    Ok(FoFormula::and(
        gf_translation(exp, psi),
        FoFormula::and(
            setup,
            FoFormula::Atom(exp.a_name.clone(), exp.base.var_names().to_vec()),
        ),
    ))
}

struct TauCtx<'a> {
    exp: &'a ExpandedSignature,
    node_cap: usize,
    nodes: usize,
    memo: HashMap<(usize, Vec<(String, LfdVar)>), LfdFormula>,
}

impl TauCtx<'_> {
    fn charge(&mut self, f: &LfdFormula) -> Result<()> {
        self.nodes += f.node_count();
        if self.nodes > self.node_cap {
            Err(Error::ResourceCap(format!(
                "translation exceeds {} nodes",
                self.node_cap
            )))
        } else {
            Ok(())
        }
    }
}

fn map_args(rho: &VarMap, args: &[String]) -> Result<Vec<LfdVar>> {
    args.iter()
        .map(|x| rho.get(x).ok_or_else(|| Error::RhoMismatch(x.clone())))
        .collect()
}

fn tau_rec(ctx: &mut TauCtx, phi: &FoFormula, rho: &VarMap) -> Result<LfdFormula> {
    let key = (
        phi as *const FoFormula as usize,
        rho.0.iter().map(|(x, v)| (x.clone(), *v)).collect::<Vec<_>>(),
    );
    if let Some(hit) = ctx.memo.get(&key) {
        return Ok(hit.clone());
    }
    let sig = &ctx.exp.base;
    let k = sig.k();
    let out = match phi {
        FoFormula::Atom(rel, args) => {
            if rel == &ctx.exp.a_name {
                // True exactly when the arguments map onto the canonical
                // variable tuple, position by position.
                let mapped = map_args(rho, args)?;
                let canonical: Vec<LfdVar> = (0..k as u8).map(LfdVar).collect();
                if mapped == canonical {
                    LfdFormula::top()
                } else {
                    LfdFormula::bottom()
                }
            } else if let Some((v, u)) = ctx.exp.proxy_sets(rel) {
                // A proxy atom reads back as the dependence statement when
                // the arguments map onto the canonical enumeration of its
                // base set; over distinguished models it is false otherwise.
                let mapped = map_args(rho, args)?;
                let canonical: Vec<LfdVar> = v.iter().collect();
                if mapped == canonical {
                    LfdFormula::conj_all(u.iter().map(|uv| LfdFormula::dep(v, uv)))
                        .unwrap_or_else(LfdFormula::top)
                } else {
                    LfdFormula::bottom()
                }
            } else {
                LfdFormula::Atom(rel.clone(), map_args(rho, args)?)
            }
        }
        FoFormula::Eq(x, y) => {
            let (a, b) = (
                rho.get(x).ok_or_else(|| Error::RhoMismatch(x.clone()))?,
                rho.get(y).ok_or_else(|| Error::RhoMismatch(y.clone()))?,
            );
            if a == b {
                LfdFormula::top()
            } else {
                LfdFormula::bottom()
            }
        }
        FoFormula::And(a, b) => LfdFormula::and(
            tau_rec(ctx, a, &rho.restrict(&a.free_vars()))?,
            tau_rec(ctx, b, &rho.restrict(&b.free_vars()))?,
        ),
        FoFormula::Not(a) => LfdFormula::not(tau_rec(ctx, a, rho)?),
        FoFormula::Exists(..) | FoFormula::GuardedExists { .. } => {
            let (bound, inner_parts): (&[String], Vec<&FoFormula>) = match phi {
                FoFormula::Exists(bound, body) => (bound, vec![body]),
                FoFormula::GuardedExists { bound, .. } => (bound, Vec::new()),
                _ => unreachable!(),
            };
            let fixed = rho.image();
            let mut disjuncts = Vec::new();
            for extension in var_maps(bound, k) {
                let mut rho2 = rho.clone();
                for (x, v) in &extension {
                    rho2.0.insert(x.clone(), *v);
                }
                let translated = match phi {
                    FoFormula::GuardedExists {
                        guard_rel,
                        guard_args,
                        body,
                        ..
                    } => {
                        let guard = FoFormula::Atom(guard_rel.clone(), guard_args.clone());
                        let g = tau_rec(ctx, &guard, &rho2.restrict(&guard.free_vars()))?;
                        let b = tau_rec(ctx, body, &rho2.restrict(&body.free_vars()))?;
                        LfdFormula::and(g, b)
                    }
                    _ => {
                        let body = inner_parts[0];
                        tau_rec(ctx, body, &rho2.restrict(&body.free_vars()))?
                    }
                };
                disjuncts.push(LfdFormula::e(fixed, translated));
            }
            LfdFormula::disj_encode(disjuncts)
        }
    };
    ctx.charge(&out)?;
    ctx.memo.insert(key, out.clone());
    Ok(out)
}

/// All maps from the listed variables into the LFD variables, lexicographic.
fn var_maps(vars: &[String], k: usize) -> Vec<Vec<(String, LfdVar)>> {
    let mut out = vec![Vec::new()];
    for x in vars {
        let mut next = Vec::with_capacity(out.len() * k);
        for prefix in &out {
            for v in 0..k as u8 {
                let mut m = prefix.clone();
                m.push((x.clone(), LfdVar(v)));
                next.push(m);
            }
        }
        out = next;
    }
    out
}

/// Translates a guarded first-order formula into the dependence language
/// under a variable map covering exactly its free variables.
///
/// Extended atom clauses handle the expanded signature: the admissibility
/// atom is true only on the canonical variable sequence; a proxy atom reads
/// back as its dependence statement; equality compares the mapped variables.
pub fn gf_to_lfd(
    exp: &ExpandedSignature,
    phi: &FoFormula,
    rho: &VarMap,
    caps: &Caps,
) -> Result<LfdFormula> {
    if !phi.classify().is_gf() {
        return Err(Error::Unguarded);
    }
    let free = phi.free_vars();
    let dom: BTreeSet<String> = rho.0.keys().cloned().collect();
    if free != dom {
        return Err(Error::RhoMismatch(format!(
            "map domain {{{}}} differs from free variables {{{}}}",
            dom.iter().cloned().collect::<Vec<_>>().join(","),
            free.iter().cloned().collect::<Vec<_>>().join(",")
        )));
    }
    let mut ctx = TauCtx {
        exp,
        node_cap: caps.translation_node_cap,
        nodes: 0,
        memo: HashMap::new(),
    };
    tau_rec(&mut ctx, phi, rho)
}

/// Enumerates every variable map on the free variables together with its
/// translation. Sentences yield exactly the empty map.
pub fn gf_to_lfd_all(
    exp: &ExpandedSignature,
    phi: &FoFormula,
    caps: &Caps,
) -> Result<Vec<(VarMap, LfdFormula)>> {
    let k = exp.base.k();
    if exp.base.max_arity() > k {
        return Err(Error::Validation(format!(
            "need at least {} variables for the maximum relation arity",
            exp.base.max_arity()
        )));
    }
    let free: Vec<String> = phi.free_vars().into_iter().collect();
    let mut out = Vec::new();
    for assignment in var_maps(&free, k) {
        let rho = VarMap(assignment.into_iter().collect::<BTreeMap<_, _>>());
        let translated = gf_to_lfd(exp, phi, &rho, caps)?;
        out.push((rho, translated));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_fo, parse_lfd, GfClass, Signature};

    fn sig2() -> Signature {
        Signature::new(
            vec![("P".to_string(), 1), ("R".to_string(), 2)],
            vec!["x".into(), "y".into()],
        )
        .unwrap()
    }

    #[test]
    fn translation_of_modality_is_guarded() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        // E[x] P(y) becomes exists y . (A(x,y) & P(y)).
        let phi = parse_lfd("E[x] P(y)", &sig).unwrap();
        let tr = fo_translation(&exp, &phi);
        let expected = FoFormula::guarded_exists(
            "A",
            vec!["x".into(), "y".into()],
            vec!["y".into()],
            FoFormula::atom("P", vec!["y".into()]),
        );
        assert_eq!(tr, expected);
        assert!(tr.classify().is_gf());
    }

    #[test]
    fn atom_translation_is_identity() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        let phi = parse_lfd("R(x,y)", &sig).unwrap();
        assert_eq!(
            fo_translation(&exp, &phi),
            FoFormula::atom("R", vec!["x".into(), "y".into()])
        );
    }

    #[test]
    fn dependence_translation_uses_unguarded_equality() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        let phi = parse_lfd("D[x] y", &sig).unwrap();
        let tr = fo_translation(&exp, &phi);
        assert_eq!(tr.classify(), GfClass::NotGf);
        assert!(tr.has_eq());
        // The proxy flavor stays guarded and mentions no equality.
        let bullet = gf_translation(&exp, &phi);
        assert_eq!(bullet, FoFormula::atom("R_{x}_{y}", vec!["x".into()]));
        assert!(!bullet.has_eq());
    }

    #[test]
    fn proxy_translation_matches_equality_translation_without_dependence() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        for src in ["P(x)", "E[] (P(x) & ~R(x,y))", "E[x y] R(y,x)"] {
            let phi = parse_lfd(src, &sig).unwrap();
            assert_eq!(fo_translation(&exp, &phi), gf_translation(&exp, &phi));
        }
    }

    #[test]
    fn guarded_translation_always_lands_in_gf() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        for src in [
            "D[] x",
            "(D[x] y & E[y] P(x))",
            "~E[x] (D[x y] x & P(y))",
        ] {
            let phi = parse_lfd(src, &sig).unwrap();
            assert!(gf_translation(&exp, &phi).classify().is_gf(), "{src}");
        }
    }

    #[test]
    fn setup_conjunct_counts() {
        let sig = Signature::new(vec![("P".to_string(), 1)], vec!["x".into()]).unwrap();
        let exp = sig.expanded().unwrap();
        let psi = parse_lfd("P(x)", &sig).unwrap();
        let cl = closure(&sig, &psi, 64).unwrap();
        let conjuncts = setup_conjuncts(&exp, &cl);
        // k = 1: 2 projection, 8 transitivity, and the closure holds three
        // non-decomposable members (the atom and two dependence atoms), each
        // contributing 4 transfer conjuncts.
        let n_xi = cl.iter().filter(|f| non_decomposable(f)).count();
        assert_eq!(n_xi, 3);
        assert_eq!(conjuncts.len(), 2 + 8 + n_xi * 4);
        for c in &conjuncts {
            assert!(c.classify().is_gf());
            assert!(c.free_vars().is_empty());
        }
    }

    #[test]
    fn setup_conjuncts_of_conjunction_are_the_union() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        let caps = Caps::default();
        let a = parse_lfd("E[x] P(y)", &sig).unwrap();
        let b = parse_lfd("E[] R(x,y)", &sig).unwrap();
        let combined = LfdFormula::and(a.clone(), LfdFormula::not(b.clone()));
        let cl_a = closure(&sig, &a, caps.closure_cap).unwrap();
        let cl_b = closure(&sig, &b, caps.closure_cap).unwrap();
        let cl_ab = closure(&sig, &combined, caps.closure_cap).unwrap();
        let set =
            |cl: &[LfdFormula]| -> BTreeSet<FoFormula> { setup_conjuncts(&exp, cl).into_iter().collect() };
        let union: BTreeSet<FoFormula> = set(&cl_a).union(&set(&cl_b)).cloned().collect();
        assert_eq!(set(&cl_ab), union);
    }

    #[test]
    fn reduction_shape() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        let psi = parse_lfd("E[] P(x)", &sig).unwrap();
        let sigma = gf_reduction(&exp, &psi, &Caps::default()).unwrap();
        assert_eq!(sigma.classify(), GfClass::SelfGuarded);
        // Only the canonical variables occur; the reduction introduces no
        // primed copies.
        let vars = sigma.all_vars();
        let expected: BTreeSet<String> = sig.var_names().iter().cloned().collect();
        assert_eq!(vars, expected);
    }

    #[test]
    fn gf_to_lfd_mirrors_placeholder_variables() {
        let sig = Signature::new(vec![("P".to_string(), 1)], vec!["v1".into(), "v2".into()])
            .unwrap();
        let exp = sig.expanded().unwrap();
        let caps = Caps::default();
        let phi = parse_fo("(exists x . P(x) & ~exists y . P(y))", false).unwrap();
        let tau = gf_to_lfd(&exp, &phi, &VarMap::default(), &caps).unwrap();
        // The two quantifiers translate to the same disjunction of
        // modalities, which the outer conjunction then contradicts.
        let disj = LfdFormula::disj_encode(vec![
            LfdFormula::e(VarSet::EMPTY, parse_lfd("P(v1)", &sig).unwrap()),
            LfdFormula::e(VarSet::EMPTY, parse_lfd("P(v2)", &sig).unwrap()),
        ]);
        assert_eq!(tau, LfdFormula::and(disj.clone(), LfdFormula::not(disj)));
    }

    #[test]
    fn admissibility_atom_translates_by_sequence_comparison() {
        let sig = Signature::new(vec![("P".to_string(), 1)], vec!["v1".into(), "v2".into()])
            .unwrap();
        let exp = sig.expanded().unwrap();
        let caps = Caps::default();
        let id = VarMap(
            [
                ("v1".to_string(), LfdVar(0)),
                ("v2".to_string(), LfdVar(1)),
            ]
            .into(),
        );
        let straight = parse_fo("A(v1,v2)", false).unwrap();
        assert_eq!(
            gf_to_lfd(&exp, &straight, &id, &caps).unwrap(),
            LfdFormula::top()
        );
        let swapped = parse_fo("A(v2,v1)", false).unwrap();
        assert_eq!(
            gf_to_lfd(&exp, &swapped, &id, &caps).unwrap(),
            LfdFormula::bottom()
        );
    }

    #[test]
    fn proxy_atom_translates_to_dependence() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        let caps = Caps::default();
        let rho = VarMap([("x".to_string(), LfdVar(0))].into());
        let phi = parse_fo("R_{x}_{y}(x)", false).unwrap();
        assert_eq!(
            gf_to_lfd(&exp, &phi, &rho, &caps).unwrap(),
            LfdFormula::dep(VarSet::singleton(LfdVar(0)), LfdVar(1))
        );
        // Arguments off the canonical enumeration collapse to falsity.
        let rho_y = VarMap([("y".to_string(), LfdVar(1))].into());
        let phi = parse_fo("R_{x}_{y}(y)", false).unwrap();
        assert_eq!(
            gf_to_lfd(&exp, &phi, &rho_y, &caps).unwrap(),
            LfdFormula::bottom()
        );
    }

    #[test]
    fn equality_clause() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        let caps = Caps::default();
        let phi = parse_fo("exists u w . (R(u,w) & u = w)", true).unwrap();
        let rho = VarMap::default();
        let tau = gf_to_lfd(&exp, &phi, &rho, &caps).unwrap();
        // Among the four extensions, exactly those mapping u and w together
        // keep the equality conjunct true.
        let sat_disjuncts = match &tau {
            LfdFormula::Not(inner) => inner.node_count(),
            _ => 0,
        };
        assert!(sat_disjuncts > 0);
    }

    #[test]
    fn rho_domain_is_checked() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        let caps = Caps::default();
        let phi = parse_fo("P(x)", false).unwrap();
        assert!(matches!(
            gf_to_lfd(&exp, &phi, &VarMap::default(), &caps),
            Err(Error::RhoMismatch(_))
        ));
        let unguarded = parse_fo("exists y . (P(x) & P(y))", false).unwrap();
        let rho = VarMap([("x".to_string(), LfdVar(0))].into());
        assert!(matches!(
            gf_to_lfd(&exp, &unguarded, &rho, &caps),
            Err(Error::Unguarded)
        ));
    }

    #[test]
    fn translation_enumeration_counts() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        let caps = Caps::default();
        let sentence = parse_fo("exists x . P(x)", false).unwrap();
        assert_eq!(gf_to_lfd_all(&exp, &sentence, &caps).unwrap().len(), 1);
        let open = parse_fo("(R(u,w) & P(u))", false).unwrap();
        assert_eq!(gf_to_lfd_all(&exp, &open, &caps).unwrap().len(), 4);
    }

    #[test]
    fn booleans_commute_with_translations() {
        let sig = sig2();
        let exp = sig.expanded().unwrap();
        let caps = Caps::default();
        let a = parse_lfd("P(x)", &sig).unwrap();
        let b = parse_lfd("D[x] y", &sig).unwrap();
        assert_eq!(
            gf_translation(&exp, &LfdFormula::and(a.clone(), b.clone())),
            FoFormula::and(gf_translation(&exp, &a), gf_translation(&exp, &b))
        );
        let phi = parse_fo("R(u,w)", false).unwrap();
        let rho = VarMap(
            [
                ("u".to_string(), LfdVar(0)),
                ("w".to_string(), LfdVar(1)),
            ]
            .into(),
        );
        assert_eq!(
            gf_to_lfd(&exp, &FoFormula::not(phi.clone()), &rho, &caps).unwrap(),
            LfdFormula::not(gf_to_lfd(&exp, &phi, &rho, &caps).unwrap())
        );
    }
}
