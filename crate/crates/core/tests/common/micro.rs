//! Every propositional program over atoms `a`, `b` with at most three
//! distinct rules from 26 templates, plus brute-force reference semantics
//! that share no code with the library.

use std::collections::BTreeSet;

pub const ATOMS: [&str; 2] = ["a", "b"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MicroRule {
    pub head: Option<usize>,
    pub pos: Option<usize>,
    pub neg: Option<usize>,
}

impl MicroRule {
    fn text(&self) -> String {
        let mut body = Vec::new();
        if let Some(p) = self.pos {
            body.push(ATOMS[p].to_string());
        }
        if let Some(n) = self.neg {
            body.push(format!("not {}", ATOMS[n]));
        }
        let head = self.head.map_or("", |h| ATOMS[h]);
        if body.is_empty() {
            format!("{head}.")
        } else {
            format!("{head} :- {}.", body.join(", "))
        }
    }

    fn body_holds(&self, m: [bool; 2]) -> bool {
        self.pos.is_none_or(|p| m[p]) && self.neg.is_none_or(|n| !m[n])
    }
}

/// Facts, rules with a positive and/or a negated body atom, constraints.
pub fn templates() -> Vec<MicroRule> {
    let bodies: Vec<(Option<usize>, Option<usize>)> = [
        (Some(0), None),
        (Some(1), None),
        (None, Some(0)),
        (None, Some(1)),
    ]
    .into_iter()
    .chain((0..2).flat_map(|p| (0..2).map(move |n| (Some(p), Some(n)))))
    .collect();
    let mut out: Vec<MicroRule> = (0..2).map(|h| MicroRule { head: Some(h), pos: None, neg: None }).collect();
    for head in [Some(0), Some(1), None] {
        for &(pos, neg) in &bodies {
            out.push(MicroRule { head, pos, neg });
        }
    }
    out
}

pub struct MicroProgram {
    pub rules: Vec<MicroRule>,
    pub source: String,
}

/// All sets of at most three distinct templates.
pub fn programs() -> Vec<MicroProgram> {
    let t = templates();
    let mut sets: Vec<Vec<usize>> = vec![vec![]];
    for i in 0..t.len() {
        sets.push(vec![i]);
        for j in i + 1..t.len() {
            sets.push(vec![i, j]);
            for k in j + 1..t.len() {
                sets.push(vec![i, j, k]);
            }
        }
    }
    sets.into_iter()
        .map(|s| {
            let rules: Vec<MicroRule> = s.iter().map(|&i| t[i]).collect();
            let source = rules.iter().map(|r| r.text() + "\n").collect();
            MicroProgram { rules, source }
        })
        .collect()
}

fn interpretations() -> impl Iterator<Item = [bool; 2]> {
    (0..4).map(|m| [m & 1 != 0, m & 2 != 0])
}

/// Whether an atom depends positively on itself.
pub fn has_positive_cycle(rules: &[MicroRule]) -> bool {
    let mut reach = [[false; 2]; 2];
    for r in rules {
        if let (Some(h), Some(p)) = (r.head, r.pos) {
            reach[h][p] = true;
        }
    }
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                reach[i][j] |= reach[i][k] && reach[k][j];
            }
        }
    }
    reach[0][0] || reach[1][1]
}

/// Stable models by reduct and least fixpoint.
pub fn stable_models(rules: &[MicroRule]) -> BTreeSet<BTreeSet<String>> {
    interpretations()
        .filter(|&m| {
            if rules.iter().any(|r| r.head.is_none() && r.body_holds(m)) {
                return false;
            }
            let reduct: Vec<&MicroRule> = rules
                .iter()
                .filter(|r| r.head.is_some() && r.neg.is_none_or(|n| !m[n]))
                .collect();
            let mut least = [false; 2];
            loop {
                let mut changed = false;
                for r in &reduct {
                    let h = r.head.unwrap();
                    if !least[h] && r.pos.is_none_or(|p| least[p]) {
                        least[h] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            least == m
        })
        .map(as_set)
        .collect()
}

/// Models of the completion: each atom is equivalent to the disjunction
/// of its rule bodies and no constraint body holds.
pub fn completion_models(rules: &[MicroRule]) -> BTreeSet<BTreeSet<String>> {
    interpretations()
        .filter(|&m| {
            let supported = (0..2).all(|a| m[a] == rules.iter().any(|r| r.head == Some(a) && r.body_holds(m)));
            supported && !rules.iter().any(|r| r.head.is_none() && r.body_holds(m))
        })
        .map(as_set)
        .collect()
}

fn as_set(m: [bool; 2]) -> BTreeSet<String> {
    (0..2).filter(|&i| m[i]).map(|i| ATOMS[i].to_string()).collect()
}

/// Checks one program against the references. Returns whether it is tight.
pub fn check(program: &MicroProgram) -> Result<bool, String> {
    use aspv::analysis::{is_tight, InterfaceDecl};
    use aspv::oracle::{crosscheck, Domain, OracleLimits};

    let parsed = aspv::syntax::parse_program(&program.source).map_err(|e| format!("{e}\n{}", program.source))?;
    let tight = is_tight(&parsed).tight;
    let cyclic = has_positive_cycle(&program.rules);
    if tight == cyclic {
        return Err(format!("is_tight says {tight}, cycle search says {cyclic}:\n{}", program.source));
    }
    if !tight {
        return Ok(false);
    }
    let names = |models: &aspv::oracle::ModelSet| -> BTreeSet<BTreeSet<String>> {
        models.iter().map(|m| m.iter().map(|a| a.predicate.clone()).collect()).collect()
    };
    let decl = InterfaceDecl::new([], []).unwrap();
    let report = crosscheck(&parsed, &decl, &Domain::default(), &BTreeSet::new(), OracleLimits::default())
        .map_err(|e| format!("{e}\n{}", program.source))?;
    let expected = stable_models(&program.rules);
    if names(&report.stable_models) != expected {
        return Err(format!("oracle stable models differ from reference:\n{}", program.source));
    }
    if expected != completion_models(&program.rules) {
        return Err(format!("reference stable and supported models differ:\n{}", program.source));
    }
    if !report.equal {
        return Err(format!("crosscheck mismatch:\n{}", program.source));
    }
    Ok(true)
}
