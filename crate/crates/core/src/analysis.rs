//! Predicate dependency graph, tightness and interface classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Predicate, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub from: Predicate,
    pub to: Predicate,
    pub polarity: Polarity,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DependencyGraph {
    pub nodes: BTreeSet<Predicate>,
    pub edges: BTreeSet<Edge>,
}

/// An edge runs from a head predicate to every predicate in the same rule's
/// body. Negated and doubly negated atoms give negative edges; inside a
/// conditional literal each atom contributes an edge of its own polarity.
pub fn build_dependency_graph(program: &Program) -> DependencyGraph {
    let mut graph = DependencyGraph {
        nodes: program.signature(),
        edges: BTreeSet::new(),
    };
    for rule in &program.rules {
        let Some(head) = rule.head.atom() else { continue };
        let from = head.predicate();
        for element in &rule.body {
            for (atom, positive) in element.atoms() {
                graph.edges.insert(Edge {
                    from: from.clone(),
                    to: atom.predicate(),
                    polarity: if positive {
                        Polarity::Positive
                    } else {
                        Polarity::Negative
                    },
                });
            }
        }
    }
    graph
}

impl DependencyGraph {
    pub fn has_edge(&self, from: &Predicate, to: &Predicate, polarity: Polarity) -> bool {
        self.edges.contains(&Edge {
            from: from.clone(),
            to: to.clone(),
            polarity,
        })
    }

    fn positive_successors(&self) -> BTreeMap<&Predicate, Vec<&Predicate>> {
        let mut succ: BTreeMap<&Predicate, Vec<&Predicate>> = BTreeMap::new();
        for e in &self.edges {
            if e.polarity == Polarity::Positive {
                succ.entry(&e.from).or_default().push(&e.to);
            }
        }
        succ
    }

    /// Finds a cycle of positive edges, returned as the sequence of nodes
    /// `c0 -> c1 -> ... -> ck -> c0`.
    pub fn positive_cycle(&self) -> Option<Vec<Predicate>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Unvisited,
            OnStack,
            Done,
        }

        fn visit<'a>(
            node: &'a Predicate,
            succ: &BTreeMap<&'a Predicate, Vec<&'a Predicate>>,
            marks: &mut BTreeMap<&'a Predicate, Mark>,
            stack: &mut Vec<&'a Predicate>,
        ) -> Option<Vec<Predicate>> {
            marks.insert(node, Mark::OnStack);
            stack.push(node);
            for &next in succ.get(node).map(Vec::as_slice).unwrap_or_default() {
                match marks.get(next).copied().unwrap_or(Mark::Unvisited) {
                    Mark::OnStack => {
                        let start = stack.iter().position(|n| *n == next).expect("on stack");
                        return Some(stack[start..].iter().map(|p| (*p).clone()).collect());
                    }
                    Mark::Unvisited => {
                        if let Some(cycle) = visit(next, succ, marks, stack) {
                            return Some(cycle);
                        }
                    }
                    Mark::Done => {}
                }
            }
            stack.pop();
            marks.insert(node, Mark::Done);
            None
        }

        let succ = self.positive_successors();
        let mut marks = BTreeMap::new();
        for node in &self.nodes {
            if marks.get(node).copied().unwrap_or(Mark::Unvisited) == Mark::Unvisited {
                if let Some(cycle) = visit(node, &succ, &mut marks, &mut Vec::new()) {
                    return Some(cycle);
                }
            }
        }
        None
    }

    /// Graphviz rendering; negative edges are dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dependencies {\n");
        for node in &self.nodes {
            writeln!(out, "  \"{node}\";").unwrap();
        }
        for e in &self.edges {
            let style = match e.polarity {
                Polarity::Positive => "",
                Polarity::Negative => " [style=dashed, label=\"not\"]",
            };
            writeln!(out, "  \"{}\" -> \"{}\"{style};", e.from, e.to).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tightness {
    pub tight: bool,
    /// A positive cycle when the program is not tight.
    pub witness: Option<Vec<Predicate>>,
}

/// A program is tight iff its positive dependency graph is acyclic.
pub fn is_tight(program: &Program) -> Tightness {
    let witness = build_dependency_graph(program).positive_cycle();
    Tightness {
        tight: witness.is_none(),
        witness,
    }
}

pub fn format_cycle(cycle: &[Predicate]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(ToString::to_string).collect();
    if let Some(first) = cycle.first() {
        parts.push(first.to_string());
    }
    parts.join(" -> ")
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("predicates declared as both input and output: {}", list(.0))]
pub struct OverlappingInterface(pub Vec<Predicate>);

fn list(preds: &[Predicate]) -> String {
    preds.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Input (extensional) and output predicates of a program or module.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InterfaceDecl {
    inputs: BTreeSet<Predicate>,
    outputs: BTreeSet<Predicate>,
}

impl InterfaceDecl {
    pub fn new(
        inputs: impl IntoIterator<Item = Predicate>,
        outputs: impl IntoIterator<Item = Predicate>,
    ) -> Result<Self, OverlappingInterface> {
        let inputs: BTreeSet<_> = inputs.into_iter().collect();
        let outputs: BTreeSet<_> = outputs.into_iter().collect();
        let overlap: Vec<_> = inputs.intersection(&outputs).cloned().collect();
        if !overlap.is_empty() {
            return Err(OverlappingInterface(overlap));
        }
        Ok(Self { inputs, outputs })
    }

    pub fn inputs(&self) -> &BTreeSet<Predicate> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<Predicate> {
        &self.outputs
    }

    pub fn is_input(&self, p: &Predicate) -> bool {
        self.inputs.contains(p)
    }

    pub fn is_public(&self, p: &Predicate) -> bool {
        self.inputs.contains(p) || self.outputs.contains(p)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InterfaceReport {
    /// Inputs that some rule defines; inputs must be extensional.
    pub inputs_in_heads: Vec<Predicate>,
    /// Predicates of the program that are neither input nor output.
    pub private: Vec<Predicate>,
    /// Declared predicates that the program never mentions.
    pub missing: Vec<Predicate>,
}

impl InterfaceReport {
    pub fn is_clean(&self) -> bool {
        self.inputs_in_heads.is_empty() && self.missing.is_empty()
    }

    pub fn has_violations(&self) -> bool {
        !self.inputs_in_heads.is_empty()
    }
}

pub fn check_interface(program: &Program, decl: &InterfaceDecl) -> InterfaceReport {
    let signature = program.signature();
    let heads = program.head_predicates();
    InterfaceReport {
        inputs_in_heads: decl.inputs.intersection(&heads).cloned().collect(),
        private: signature
            .iter()
            .filter(|p| !decl.is_public(p))
            .cloned()
            .collect(),
        missing: decl
            .inputs
            .iter()
            .chain(&decl.outputs)
            .filter(|p| !signature.contains(p))
            .cloned()
            .collect(),
    }
}
