use std::collections::BTreeSet;
use std::thread;

use crate::fol::{evaluate, infer_sorts, Formula, GroundAtom, Interpretation, Sort, Value};
use crate::syntax::{Atom, Predicate};
use crate::translation::CompletionTheory;

use super::ground::{is_complement, GroundHead, GroundProgram};
use super::{Domain, ModelSet, OracleError, OracleLimits};

/// Runs `check` on every mask in `0..2^bits`, split across threads, and
/// collects the accepted models.
fn enumerate<F>(bits: usize, check: F) -> Result<ModelSet, OracleError>
where
    F: Fn(u64) -> Result<Option<BTreeSet<GroundAtom>>, OracleError> + Sync,
{
    let total: u64 = 1 << bits;
    let workers = thread::available_parallelism().map_or(1, |n| n.get()) as u64;
    let workers = if total < 256 { 1 } else { workers.min(total) };
    let chunk = total.div_ceil(workers);
    let results: Vec<Result<ModelSet, OracleError>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let check = &check;
                scope.spawn(move || {
                    let mut out = ModelSet::new();
                    for mask in w * chunk..((w + 1) * chunk).min(total) {
                        if let Some(m) = check(mask)? {
                            out.insert(m);
                        }
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = ModelSet::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn subset(base: &[GroundAtom], mask: u64) -> impl Iterator<Item = &GroundAtom> {
    base.iter()
        .enumerate()
        .filter(move |(i, _)| mask & (1 << i) != 0)
        .map(|(_, a)| a)
}

/// Stable models of a ground program, with complement atoms of choice rules
/// projected out.
///
/// Only the atoms occurring under negation are guessed: for each guess `T`,
/// the least model `M` of the reduct is computed and accepted when `M`
/// agrees with `T` on those atoms. This yields exactly the sets `S` with
/// `S = LM(P^S)`, since the reduct depends on nothing else. Negated atoms
/// that head no rule are false in every candidate and unconditional facts
/// are true in every candidate, so neither is guessed.
pub fn stable_models(program: &GroundProgram, limits: OracleLimits) -> Result<ModelSet, OracleError> {
    let mut heads = BTreeSet::new();
    let mut facts = BTreeSet::new();
    for r in &program.rules {
        if let GroundHead::Atom(a) = &r.head {
            heads.insert(a);
            if r.positive.is_empty() && r.negative.is_empty() && r.double_negative.is_empty() {
                facts.insert(a);
            }
        }
    }
    let (negated, fixed): (Vec<GroundAtom>, Vec<GroundAtom>) = program
        .negated_atoms()
        .into_iter()
        .partition(|a| heads.contains(a) && !facts.contains(a));
    if negated.len() > limits.max_base {
        return Err(OracleError::CapExceeded {
            what: "the set of undetermined negated ground atoms",
            size: negated.len(),
            cap: limits.max_base,
        });
    }
    let fixed_true: BTreeSet<GroundAtom> = fixed.into_iter().filter(|a| facts.contains(a)).collect();
    enumerate(negated.len(), |mask| {
        let mut guess: BTreeSet<GroundAtom> = subset(&negated, mask).cloned().collect();
        guess.extend(fixed_true.iter().cloned());
        let Some(model) = program.reduct_least_model(&guess) else {
            return Ok(None);
        };
        let agrees = negated.iter().all(|a| model.contains(a) == guess.contains(a));
        Ok(agrees.then(|| model.into_iter().filter(|a| !is_complement(a)).collect()))
    })
}

fn value_term(v: &Value) -> crate::syntax::Term {
    v.to_term()
}

fn sort_domain(domain: &Domain, sort: Sort) -> Vec<Value> {
    let mut out = Vec::new();
    if sort != Sort::Object {
        if let Some((lo, hi)) = domain.int_bounds {
            out.extend((lo..=hi).map(Value::Int));
        }
    }
    if sort != Sort::Integer {
        out.extend(domain.universe.iter().cloned().map(Value::Sym));
    }
    out
}

struct Prepared {
    formulas: Vec<Formula>,
    base: Vec<GroundAtom>,
}

/// Infers sorts over `formulas` together with the fixed atoms and builds the
/// sorted Herbrand base of the `open` predicates.
fn prepare(
    formulas: &[Formula],
    open: &BTreeSet<Predicate>,
    domain: &Domain,
    fixed: &BTreeSet<GroundAtom>,
) -> Result<Prepared, OracleError> {
    let mut all: Vec<Formula> = formulas.to_vec();
    all.extend(
        fixed
            .iter()
            .map(|a| Formula::Atom(Atom::new(a.predicate.clone(), a.args.iter().map(value_term).collect()))),
    );
    let sorts = infer_sorts(&all).map_err(|e| OracleError::Sort(e.to_string()))?;
    let formulas = formulas
        .iter()
        .enumerate()
        .map(|(i, f)| sorts.annotate(i, f))
        .collect();
    let mut base = Vec::new();
    for p in open {
        let mut tuples: Vec<Vec<Value>> = vec![Vec::new()];
        for i in 0..p.arity {
            let values = sort_domain(domain, sorts.position(p, i));
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    values.iter().map(move |v| {
                        let mut t = t.clone();
                        t.push(v.clone());
                        t
                    })
                })
                .collect();
        }
        base.extend(tuples.into_iter().map(|args| GroundAtom::new(p.name.clone(), args)));
    }
    Ok(Prepared { formulas, base })
}

fn interpretation(domain: &Domain, atoms: BTreeSet<GroundAtom>) -> Interpretation {
    Interpretation {
        universe: domain.universe.clone(),
        int_bounds: domain.int_bounds,
        atoms,
    }
}

/// Finite models of `formulas` in which the atoms of `open` predicates vary
/// over their sorted base and every other atom is fixed to `fixed`.
pub fn completion_models(
    formulas: &[Formula],
    open: &BTreeSet<Predicate>,
    domain: &Domain,
    fixed: &BTreeSet<GroundAtom>,
    limits: OracleLimits,
) -> Result<ModelSet, OracleError> {
    let fixed: BTreeSet<GroundAtom> = fixed
        .iter()
        .filter(|a| a.args.iter().all(|v| domain.contains(v)))
        .cloned()
        .collect();
    let prepared = prepare(formulas, open, domain, &fixed)?;
    if prepared.base.len() > limits.max_base {
        return Err(OracleError::CapExceeded {
            what: "the Herbrand base of the defined predicates",
            size: prepared.base.len(),
            cap: limits.max_base,
        });
    }
    enumerate(prepared.base.len(), |mask| {
        let mut atoms = fixed.clone();
        atoms.extend(subset(&prepared.base, mask).cloned());
        let interp = interpretation(domain, atoms);
        for f in &prepared.formulas {
            if !evaluate(f, &interp)? {
                return Ok(None);
            }
        }
        Ok(Some(interp.atoms))
    })
}

/// Models of a completion theory with input predicates fixed to
/// `input_facts`.
pub fn completion_models_of(
    theory: &CompletionTheory,
    domain: &Domain,
    input_facts: &BTreeSet<GroundAtom>,
    limits: OracleLimits,
) -> Result<ModelSet, OracleError> {
    let formulas: Vec<Formula> = theory.formulas().cloned().collect();
    let open: BTreeSet<Predicate> = theory.definitions.iter().map(|d| d.predicate.clone()).collect();
    completion_models(&formulas, &open, domain, input_facts, limits)
}

/// Searches the finite interpretations over `domain` for one that satisfies
/// every axiom and falsifies the conjecture. All predicates are open.
pub fn find_countermodel(
    axioms: &[Formula],
    conjecture: &Formula,
    domain: &Domain,
    limits: OracleLimits,
) -> Result<Option<BTreeSet<GroundAtom>>, OracleError> {
    let mut formulas = axioms.to_vec();
    formulas.push(conjecture.clone());
    let mut open = BTreeSet::new();
    for f in &formulas {
        f.collect_predicates(&mut open);
    }
    let prepared = prepare(&formulas, &open, domain, &BTreeSet::new())?;
    if prepared.base.len() > limits.max_base {
        return Err(OracleError::CapExceeded {
            what: "the Herbrand base of the theory",
            size: prepared.base.len(),
            cap: limits.max_base,
        });
    }
    let (conj, axioms) = prepared.formulas.split_last().expect("conjecture present");
    let found = enumerate(prepared.base.len(), |mask| {
        let interp = interpretation(domain, subset(&prepared.base, mask).cloned().collect());
        for f in axioms {
            if !evaluate(f, &interp)? {
                return Ok(None);
            }
        }
        Ok((!evaluate(conj, &interp)?).then_some(interp.atoms))
    })?;
    // fewest true atoms first, then lexicographic; keeps reports deterministic
    Ok(found.into_iter().min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b))))
}
