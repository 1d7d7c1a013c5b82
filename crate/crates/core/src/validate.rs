//! Static program validation: range restriction, EDB-head prohibition,
//! reserved-predicate use and arity consistency.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{Pred, Program, Sym, Var, ANSWER_PRED};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    /// A head variable that does not occur in the body. Rules are 1-indexed.
    RangeRestrictionViolation { rule: usize, variable: Var },
    /// An EDB predicate used as a rule head.
    EdbInHead { rule: usize, pred: Pred },
    /// The reserved predicate `answer` used in a rule or declared EDB.
    ReservedAnswerUse { rule: Option<usize> },
    /// A predicate used with two different arities.
    ArityConflict { name: Sym, arities: (usize, usize) },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::RangeRestrictionViolation { rule, variable } => write!(
                f,
                "rule {}: not range-restricted: head variable {} does not occur in the body",
                rule, variable
            ),
            Diagnostic::EdbInHead { rule, pred } => {
                write!(f, "rule {}: EDB predicate {} in rule head", rule, pred)
            }
            Diagnostic::ReservedAnswerUse { rule: Some(rule) } => {
                write!(f, "rule {}: reserved predicate '{}' used", rule, ANSWER_PRED)
            }
            Diagnostic::ReservedAnswerUse { rule: None } => {
                write!(f, "reserved predicate '{}' declared as EDB", ANSWER_PRED)
            }
            Diagnostic::ArityConflict { name, arities } => write!(
                f,
                "arity conflict for {}: used with arity {} and arity {}",
                name, arities.0, arities.1
            ),
        }
    }
}

/// Check a program. An empty result means the program is valid:
/// every rule is range-restricted, no EDB predicate occurs in a head,
/// `answer` is unused, and arities are consistent.
pub fn validate(program: &Program) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    for (idx, rule) in program.rules.iter().enumerate() {
        let rule_no = idx + 1;
        let body_vars: BTreeSet<&Var> = rule.body.iter().flat_map(|l| l.vars()).collect();
        let mut reported: BTreeSet<&Var> = BTreeSet::new();
        for v in rule.head.vars() {
            if !body_vars.contains(v) && reported.insert(v) {
                out.push(Diagnostic::RangeRestrictionViolation {
                    rule: rule_no,
                    variable: v.clone(),
                });
            }
        }
        if program.edb.contains(&rule.head.pred_key()) {
            out.push(Diagnostic::EdbInHead {
                rule: rule_no,
                pred: rule.head.pred_key(),
            });
        }
        if rule.head.is_answer() || rule.body.iter().any(|l| l.is_answer()) {
            out.push(Diagnostic::ReservedAnswerUse { rule: Some(rule_no) });
        }
    }

    if program.edb.iter().any(|p| p.name.as_str() == ANSWER_PRED) {
        out.push(Diagnostic::ReservedAnswerUse { rule: None });
    }

    let mut arities: BTreeMap<Sym, usize> = BTreeMap::new();
    let mut conflicts: BTreeSet<Sym> = BTreeSet::new();
    let mut record = |name: &Sym, arity: usize, out: &mut Vec<Diagnostic>| {
        match arities.get(name) {
            Some(&seen) if seen != arity => {
                if conflicts.insert(name.clone()) {
                    out.push(Diagnostic::ArityConflict {
                        name: name.clone(),
                        arities: (seen, arity),
                    });
                }
            }
            Some(_) => {}
            None => {
                arities.insert(name.clone(), arity);
            }
        }
    };
    for p in &program.edb {
        record(&p.name, p.arity, &mut out);
    }
    for rule in &program.rules {
        record(&rule.head.pred, rule.head.args.len(), &mut out);
        for l in &rule.body {
            record(&l.pred, l.args.len(), &mut out);
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;
    use crate::ast::{Literal, Rule, Term};
    use alloc::vec;

    #[test]
    fn path_program_is_valid() {
        let p = parse_program(
            "path(X,Y) :- edge(X,Y).\npath(X,Z) :- edge(X,Y), path(Y,Z).\n% edb edge/2",
        )
        .unwrap();
        assert_eq!(validate(&p), vec![]);
    }

    #[test]
    fn detects_range_restriction_violation() {
        let p = parse_program("p(X,Y) :- q(X).\n% edb q/1").unwrap();
        assert_eq!(
            validate(&p),
            vec![Diagnostic::RangeRestrictionViolation {
                rule: 1,
                variable: Var::Named(Sym::new("Y")),
            }]
        );
    }

    #[test]
    fn detects_edb_in_head() {
        let p = parse_program("edge(X,Y) :- path(X,Y).\npath(X,Y) :- edge(X,Y).\n% edb edge/2")
            .unwrap();
        assert_eq!(
            validate(&p),
            vec![Diagnostic::EdbInHead {
                rule: 1,
                pred: Pred::new("edge", 2),
            }]
        );
    }

    #[test]
    fn detects_answer_use_in_ast_constructed_program() {
        // The parser rejects `answer` outright; programs built directly from
        // the AST are caught here.
        let mut p = Program::default();
        p.rules.push(Rule::new(
            Literal::new("answer", vec![Term::var("X")]),
            vec![Literal::new("q", vec![Term::var("X")])],
        ));
        p.edb.insert(Pred::new("q", 1));
        assert_eq!(
            validate(&p),
            vec![Diagnostic::ReservedAnswerUse { rule: Some(1) }]
        );
    }

    #[test]
    fn detects_arity_conflicts_in_ast_constructed_program() {
        let mut p = Program::default();
        p.rules.push(Rule::new(
            Literal::new("p", vec![Term::var("X")]),
            vec![Literal::new("q", vec![Term::var("X")])],
        ));
        p.rules.push(Rule::new(
            Literal::new("p", vec![Term::var("X"), Term::var("X")]),
            vec![Literal::new("q", vec![Term::var("X")])],
        ));
        p.edb.insert(Pred::new("q", 1));
        assert_eq!(
            validate(&p),
            vec![Diagnostic::ArityConflict {
                name: Sym::new("p"),
                arities: (1, 2),
            }]
        );
    }

    #[test]
    fn idb_facts_are_accepted() {
        let p = parse_program("p(1).\nq(X) :- p(X).").unwrap();
        assert_eq!(validate(&p), vec![]);
    }
}
