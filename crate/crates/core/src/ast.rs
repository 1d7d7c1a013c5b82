//! Datalog abstract syntax: terms, literals, rules, programs, databases and
//! queries, plus the guarded-rule form produced by the compiler.
//!
//! All values are immutable after construction and safe to share across
//! concurrent readers.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// The reserved bookkeeping predicate appended to extended queries.
pub const ANSWER_PRED: &str = "answer";

/// An interned symbol. Clones share the underlying allocation; comparison is
/// by string value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(s: &str) -> Self {
        Sym(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// A constant: an integer or a symbol. Integers order before symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Const {
    Int(i64),
    Sym(Sym),
}

impl Const {
    pub fn sym(s: &str) -> Self {
        Const::Sym(Sym::new(s))
    }
}

fn is_plain_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Int(n) => write!(f, "{}", n),
            Const::Sym(s) if is_plain_symbol(s.as_str()) => write!(f, "{}", s),
            Const::Sym(s) => write!(f, "'{}'", s),
        }
    }
}

/// A variable. `Named` comes from source text; `Gen` is a renamed-apart
/// variable created during resolution; `Norm` is a normalized goal variable
/// rendered `V1, V2, …`; `Param` is a state parameter rendered `C1, C2, …`.
///
/// Parameter and normalized-variable indices are always >= 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Named(Sym),
    Gen(u64),
    Norm(u32),
    Param(u32),
}

impl Var {
    pub fn is_param(&self) -> bool {
        matches!(self, Var::Param(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Named(s) => write!(f, "{}", s),
            Var::Gen(n) => write!(f, "_G{}", n),
            Var::Norm(i) => write!(f, "V{}", i),
            Var::Param(i) => write!(f, "C{}", i),
        }
    }
}

/// Terms are variables or constants; no function symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(Const),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::Named(Sym::new(name)))
    }

    pub fn norm(i: u32) -> Self {
        debug_assert!(i >= 1);
        Term::Var(Var::Norm(i))
    }

    pub fn param(i: u32) -> Self {
        debug_assert!(i >= 1);
        Term::Var(Var::Param(i))
    }

    pub fn int(n: i64) -> Self {
        Term::Const(Const::Int(n))
    }

    pub fn sym(s: &str) -> Self {
        Term::Const(Const::sym(s))
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Term::Const(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}", v),
            Term::Const(c) => write!(f, "{}", c),
        }
    }
}

/// A predicate identified by name and arity, printed `name/arity`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pred {
    pub name: Sym,
    pub arity: usize,
}

impl Pred {
    pub fn new(name: &str, arity: usize) -> Self {
        Pred {
            name: Sym::new(name),
            arity,
        }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// A positive literal `p(t1, …, tm)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub pred: Sym,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Literal {
            pred: Sym::new(pred),
            args,
        }
    }

    pub fn pred_key(&self) -> Pred {
        Pred {
            name: self.pred.clone(),
            arity: self.args.len(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn is_answer(&self) -> bool {
        self.pred.as_str() == ANSWER_PRED
    }

    /// Variables in argument order, with duplicates.
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.args.iter().filter_map(Term::as_var)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", t)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A rule `head :- body.`; an empty body is a fact-shaped rule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Literal,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn new(head: Literal, body: Vec<Literal>) -> Self {
        Rule { head, body }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", l)?;
            }
        }
        write!(f, ".")
    }
}

/// A rule extended with disequality guards, the shape emitted by the
/// compiler. Guards are checked after the body binds both sides.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GuardedRule {
    pub head: Literal,
    pub body: Vec<Literal>,
    pub neqs: Vec<(Term, Term)>,
}

impl GuardedRule {
    pub fn plain(head: Literal, body: Vec<Literal>) -> Self {
        GuardedRule {
            head,
            body,
            neqs: Vec::new(),
        }
    }
}

impl From<&Rule> for GuardedRule {
    fn from(r: &Rule) -> Self {
        GuardedRule::plain(r.head.clone(), r.body.clone())
    }
}

impl fmt::Display for GuardedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() || !self.neqs.is_empty() {
            write!(f, " :- ")?;
            let mut first = true;
            for l in &self.body {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "{}", l)?;
            }
            for (a, b) in &self.neqs {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "{} != {}", a, b)?;
            }
        }
        write!(f, ".")
    }
}

/// A logic program: rules plus the declared EDB predicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub edb: BTreeSet<Pred>,
}

impl Program {
    /// The IDB predicates: everything that occurs in a rule head.
    pub fn idb(&self) -> BTreeSet<Pred> {
        self.rules.iter().map(|r| r.head.pred_key()).collect()
    }

    pub fn is_edb(&self, pred: &Pred) -> bool {
        self.edb.contains(pred)
    }

    pub fn rules_for<'a>(&'a self, pred: &'a Pred) -> impl Iterator<Item = &'a Rule> {
        self.rules.iter().filter(move |r| r.head.pred_key() == *pred)
    }

    /// All predicate names used anywhere (rules or EDB declarations).
    pub fn pred_names(&self) -> BTreeSet<Sym> {
        let mut names: BTreeSet<Sym> = self.edb.iter().map(|p| p.name.clone()).collect();
        for r in &self.rules {
            names.insert(r.head.pred.clone());
            for l in &r.body {
                names.insert(l.pred.clone());
            }
        }
        names
    }

    /// Declared arity for a predicate name, from EDB declarations or usage.
    pub fn arity_of(&self, name: &str) -> Option<usize> {
        for p in &self.edb {
            if p.name.as_str() == name {
                return Some(p.arity);
            }
        }
        for r in &self.rules {
            if r.head.pred.as_str() == name {
                return Some(r.head.args.len());
            }
            for l in &r.body {
                if l.pred.as_str() == name {
                    return Some(l.args.len());
                }
            }
        }
        None
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.edb {
            writeln!(f, "% edb {}", p)?;
        }
        for r in &self.rules {
            writeln!(f, "{}", r)?;
        }
        Ok(())
    }
}

/// Errors raised when assembling a database from parsed facts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DatabaseError {
    NotGround(Literal),
    UndeclaredPredicate(Pred),
}

impl fmt::Display for DatabaseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatabaseError::NotGround(l) => write!(f, "fact is not ground: {}", l),
            DatabaseError::UndeclaredPredicate(p) => {
                write!(f, "fact uses undeclared EDB predicate {}", p)
            }
        }
    }
}

impl core::error::Error for DatabaseError {}

/// A finite set of ground EDB facts. Insertion order is preserved for
/// deterministic SLD clause ordering; duplicates are dropped (set semantics).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Database {
    facts: Vec<Literal>,
    seen: BTreeSet<Literal>,
}

impl Database {
    pub fn empty() -> Self {
        Database::default()
    }

    /// Build a database, checking every fact is ground and uses a declared
    /// EDB predicate of the program.
    pub fn new(program: &Program, facts: Vec<Literal>) -> Result<Self, DatabaseError> {
        let mut db = Database::default();
        for fact in facts {
            if !fact.is_ground() {
                return Err(DatabaseError::NotGround(fact));
            }
            let key = fact.pred_key();
            if !program.edb.contains(&key) {
                return Err(DatabaseError::UndeclaredPredicate(key));
            }
            db.insert(fact);
        }
        Ok(db)
    }

    /// Build a database without checking declarations (test convenience).
    pub fn from_facts(facts: Vec<Literal>) -> Self {
        let mut db = Database::default();
        for fact in facts {
            db.insert(fact);
        }
        db
    }

    fn insert(&mut self, fact: Literal) {
        if self.seen.insert(fact.clone()) {
            self.facts.push(fact);
        }
    }

    pub fn facts(&self) -> &[Literal] {
        &self.facts
    }

    pub fn facts_for<'a>(&'a self, pred: &'a Pred) -> impl Iterator<Item = &'a Literal> {
        self.facts.iter().filter(move |f| f.pred_key() == *pred)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }
}

/// A query: a conjunction of literals. The answer variables are the distinct
/// variables of the literals in first-occurrence order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub literals: Vec<Literal>,
    pub answer_vars: Vec<Var>,
}

impl Query {
    pub fn new(literals: Vec<Literal>) -> Self {
        let mut answer_vars = Vec::new();
        for lit in &literals {
            for v in lit.vars() {
                if !answer_vars.contains(v) {
                    answer_vars.push(v.clone());
                }
            }
        }
        Query {
            literals,
            answer_vars,
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?- ")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", l)?;
        }
        write!(f, ".")
    }
}

/// Render an answer tuple: constants joined by commas, `true` for the empty
/// tuple of a ground query.
pub fn format_tuple(tuple: &[Const]) -> String {
    if tuple.is_empty() {
        return "true".to_string();
    }
    let mut out = String::new();
    for (i, c) in tuple.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&c.to_string());
    }
    out
}

/// Per-predicate tuple counts, shared by stats reporting.
pub type PredCounts = BTreeMap<Pred, usize>;

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn term_display() {
        assert_eq!(Term::var("X").to_string(), "X");
        assert_eq!(Term::norm(3).to_string(), "V3");
        assert_eq!(Term::param(1).to_string(), "C1");
        assert_eq!(Term::int(-5).to_string(), "-5");
        assert_eq!(Term::sym("a").to_string(), "a");
        assert_eq!(Term::sym("Hello world").to_string(), "'Hello world'");
    }

    #[test]
    fn literal_display() {
        let l = Literal::new("edge", vec![Term::int(0), Term::var("Y")]);
        assert_eq!(l.to_string(), "edge(0,Y)");
        let p = Literal::new("p", vec![]);
        assert_eq!(p.to_string(), "p");
    }

    #[test]
    fn rule_display() {
        let r = Rule::new(
            Literal::new("path", vec![Term::var("X"), Term::var("Y")]),
            vec![Literal::new("edge", vec![Term::var("X"), Term::var("Y")])],
        );
        assert_eq!(r.to_string(), "path(X,Y) :- edge(X,Y).");
        let f = Rule::new(Literal::new("p", vec![Term::int(1)]), vec![]);
        assert_eq!(f.to_string(), "p(1).");
    }

    #[test]
    fn guarded_rule_display() {
        let r = GuardedRule {
            head: Literal::new("s1", vec![Term::var("Y")]),
            body: vec![
                Literal::new("s0", vec![]),
                Literal::new("edge", vec![Term::var("X"), Term::var("Y")]),
            ],
            neqs: vec![(Term::var("X"), Term::int(0))],
        };
        assert_eq!(r.to_string(), "s1(Y) :- s0, edge(X,Y), X != 0.");
    }

    #[test]
    fn query_answer_vars_first_occurrence() {
        let q = Query::new(vec![
            Literal::new("edge", vec![Term::var("X"), Term::var("Y")]),
            Literal::new("path", vec![Term::var("Y"), Term::var("Z")]),
        ]);
        assert_eq!(
            q.answer_vars,
            vec![
                Var::Named(Sym::new("X")),
                Var::Named(Sym::new("Y")),
                Var::Named(Sym::new("Z"))
            ]
        );
        assert_eq!(q.to_string(), "?- edge(X,Y), path(Y,Z).");
    }

    #[test]
    fn database_dedups_preserving_order() {
        let f1 = Literal::new("edge", vec![Term::int(0), Term::int(1)]);
        let f2 = Literal::new("edge", vec![Term::int(1), Term::int(2)]);
        let db = Database::from_facts(vec![f1.clone(), f2.clone(), f1.clone()]);
        assert_eq!(db.facts(), &[f1, f2]);
    }

    #[test]
    fn database_checks_declarations() {
        let mut program = Program::default();
        program.edb.insert(Pred::new("edge", 2));
        let bad = Database::new(
            &program,
            vec![Literal::new("node", vec![Term::int(0)])],
        );
        assert_eq!(
            bad,
            Err(DatabaseError::UndeclaredPredicate(Pred::new("node", 1)))
        );
        let nonground = Database::new(
            &program,
            vec![Literal::new("edge", vec![Term::int(0), Term::var("X")])],
        );
        assert!(matches!(nonground, Err(DatabaseError::NotGround(_))));
    }

    #[test]
    fn tuple_formatting() {
        assert_eq!(format_tuple(&[]), "true");
        assert_eq!(format_tuple(&[Const::Int(1)]), "1");
        assert_eq!(
            format_tuple(&[Const::Int(0), Const::sym("a")]),
            "0,a"
        );
    }
}
