//! Text parsing for programs, queries and fact files.
//!
//! Grammar:
//!
//! ```text
//! program   := (directive | rule)*
//! directive := "%" "edb" name "/" integer
//! rule      := atom ( ":-" atom ("," atom)* )? "."
//! atom      := name "(" term ("," term)* ")" | name
//! term      := VARIABLE | CONSTANT
//! query     := "?-" atom ("," atom)* "."
//! ```
//!
//! Variables start uppercase; constants start lowercase, or are integers, or
//! are single-quoted. `%` starts a comment to end of line, except for the
//! `% edb name/arity` directive. Fact files contain one ground atom per
//! line, each terminated by `.`.
//!
//! Variable names that render like a normalized variable (`V1, V2, …`) or a
//! parameter (`C1, C2, …`) are reserved, as is the predicate `answer`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{Const, Literal, Pred, Program, Query, Rule, Term, ANSWER_PRED};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Variable(String),
    Int(i64),
    Quoted(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Slash,
    ColonDash,
    QueryDash,
    /// `% edb` introducer; the name/arity follow as ordinary tokens.
    EdbDirective,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    src: &'a str,
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            chars: src.chars().peekable(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn error(&self, line: usize, col: usize, message: String) -> ParseError {
        ParseError { line, col, message }
    }

    fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump();
                }
                '%' => {
                    self.bump();
                    // A directive is `% edb ...`; anything else is a comment.
                    let rest = &self.src[self.pos..];
                    let line_end = rest.find('\n').unwrap_or(rest.len());
                    let line_text = &rest[..line_end];
                    let trimmed = line_text.trim_start();
                    if trimmed == "edb" || trimmed.starts_with("edb ") || trimmed.starts_with("edb\t")
                    {
                        while matches!(self.peek(), Some(' ') | Some('\t')) {
                            self.bump();
                        }
                        for _ in 0..3 {
                            self.bump();
                        }
                        out.push(Token {
                            tok: Tok::EdbDirective,
                            line,
                            col,
                        });
                    } else {
                        while let Some(c) = self.peek() {
                            if c == '\n' {
                                break;
                            }
                            self.bump();
                        }
                    }
                }
                '(' => {
                    self.bump();
                    out.push(Token {
                        tok: Tok::LParen,
                        line,
                        col,
                    });
                }
                ')' => {
                    self.bump();
                    out.push(Token {
                        tok: Tok::RParen,
                        line,
                        col,
                    });
                }
                ',' => {
                    self.bump();
                    out.push(Token {
                        tok: Tok::Comma,
                        line,
                        col,
                    });
                }
                '.' => {
                    self.bump();
                    out.push(Token {
                        tok: Tok::Dot,
                        line,
                        col,
                    });
                }
                '/' => {
                    self.bump();
                    out.push(Token {
                        tok: Tok::Slash,
                        line,
                        col,
                    });
                }
                ':' => {
                    self.bump();
                    if self.peek() == Some('-') {
                        self.bump();
                        out.push(Token {
                            tok: Tok::ColonDash,
                            line,
                            col,
                        });
                    } else {
                        return Err(self.error(line, col, "expected ':-'".to_string()));
                    }
                }
                '?' => {
                    self.bump();
                    if self.peek() == Some('-') {
                        self.bump();
                        out.push(Token {
                            tok: Tok::QueryDash,
                            line,
                            col,
                        });
                    } else {
                        return Err(self.error(line, col, "expected '?-'".to_string()));
                    }
                }
                '\'' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some('\'') => break,
                            Some('\n') | None => {
                                return Err(self.error(
                                    line,
                                    col,
                                    "unterminated quoted constant".to_string(),
                                ))
                            }
                            Some(c) => s.push(c),
                        }
                    }
                    out.push(Token {
                        tok: Tok::Quoted(s),
                        line,
                        col,
                    });
                }
                '-' => {
                    self.bump();
                    match self.peek() {
                        Some(d) if d.is_ascii_digit() => {
                            let n = self.lex_int(line, col, true)?;
                            out.push(Token {
                                tok: Tok::Int(n),
                                line,
                                col,
                            });
                        }
                        _ => {
                            return Err(self.error(line, col, "expected digit after '-'".to_string()))
                        }
                    }
                }
                d if d.is_ascii_digit() => {
                    let n = self.lex_int(line, col, false)?;
                    out.push(Token {
                        tok: Tok::Int(n),
                        line,
                        col,
                    });
                }
                a if a.is_ascii_alphabetic() => {
                    let mut s = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let tok = if a.is_ascii_uppercase() {
                        Tok::Variable(s)
                    } else {
                        Tok::Name(s)
                    };
                    out.push(Token { tok, line, col });
                }
                other => {
                    return Err(self.error(line, col, format!("unexpected character '{}'", other)))
                }
            }
        }
        Ok(out)
    }

    fn lex_int(&mut self, line: usize, col: usize, neg: bool) -> Result<i64, ParseError> {
        let mut digits = String::new();
        if neg {
            digits.push('-');
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.bump();
            } else {
                break;
            }
        }
        digits
            .parse::<i64>()
            .map_err(|_| self.error(line, col, format!("integer out of range: {}", digits)))
    }
}

/// True iff `name` is the canonical rendering of a normalized variable or a
/// parameter (`V` or `C` followed by an integer >= 1 with no leading zeros).
pub fn is_reserved_var_name(name: &str) -> bool {
    let rest = match name.strip_prefix('V').or_else(|| name.strip_prefix('C')) {
        Some(rest) => rest,
        None => return false,
    };
    !rest.is_empty()
        && rest.bytes().all(|b| b.is_ascii_digit())
        && !rest.starts_with('0')
}

struct Parser {
    tokens: Vec<Token>,
    index: usize,
    arities: BTreeMap<String, (usize, usize, usize)>, // name -> (arity, line, col)
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser {
            tokens,
            index: 0,
            arities: BTreeMap::new(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.index)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.index).cloned();
        if t.is_some() {
            self.index += 1;
        }
        t
    }

    fn eof_error(&self, message: &str) -> ParseError {
        let (line, col) = self
            .tokens
            .last()
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1));
        ParseError {
            line,
            col,
            message: format!("unexpected end of input: {}", message),
        }
    }

    fn err_at(&self, tok: &Token, message: String) -> ParseError {
        ParseError {
            line: tok.line,
            col: tok.col,
            message,
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ParseError> {
        match self.next() {
            Some(t) if t.tok == want => Ok(t),
            Some(t) => Err(self.err_at(&t, format!("expected {}", what))),
            None => Err(self.eof_error(what)),
        }
    }

    fn check_pred(&mut self, name: &str, arity: usize, line: usize, col: usize) -> Result<(), ParseError> {
        if name == ANSWER_PRED {
            return Err(ParseError {
                line,
                col,
                message: format!("reserved predicate '{}' may not be used", ANSWER_PRED),
            });
        }
        match self.arities.get(name) {
            Some(&(seen, l0, c0)) if seen != arity => Err(ParseError {
                line,
                col,
                message: format!(
                    "arity conflict for {}: used with arity {} here but arity {} at {}:{}",
                    name, arity, seen, l0, c0
                ),
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(name.to_string(), (arity, line, col));
                Ok(())
            }
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some(t) => match t.tok {
                Tok::Variable(name) => {
                    if is_reserved_var_name(&name) {
                        Err(self.err_at(
                            &t,
                            format!("reserved variable name '{}' (V<n> and C<n> are internal)", name),
                        ))
                    } else {
                        Ok(Term::var(&name))
                    }
                }
                Tok::Name(name) => Ok(Term::sym(&name)),
                Tok::Int(n) => Ok(Term::int(n)),
                Tok::Quoted(s) => Ok(Term::sym(&s)),
                _ => Err(self.err_at(&t, "expected term".to_string())),
            },
            None => Err(self.eof_error("expected term")),
        }
    }

    fn parse_atom(&mut self) -> Result<Literal, ParseError> {
        let t = match self.next() {
            Some(t) => t,
            None => return Err(self.eof_error("expected atom")),
        };
        let name = match &t.tok {
            Tok::Name(n) => n.clone(),
            _ => return Err(self.err_at(&t, "expected predicate name".to_string())),
        };
        let mut args = Vec::new();
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::LParen)) {
            self.next();
            loop {
                args.push(self.parse_term()?);
                match self.next() {
                    Some(t) if t.tok == Tok::Comma => continue,
                    Some(t) if t.tok == Tok::RParen => break,
                    Some(t) => return Err(self.err_at(&t, "expected ',' or ')'".to_string())),
                    None => return Err(self.eof_error("expected ')'")),
                }
            }
        }
        self.check_pred(&name, args.len(), t.line, t.col)?;
        Ok(Literal::new(&name, args))
    }

    fn parse_program(&mut self) -> Result<Program, ParseError> {
        let mut program = Program::default();
        while let Some(t) = self.peek() {
            if t.tok == Tok::EdbDirective {
                self.next();
                let name_tok = match self.next() {
                    Some(t) => t,
                    None => return Err(self.eof_error("expected predicate name after '% edb'")),
                };
                let name = match &name_tok.tok {
                    Tok::Name(n) => n.clone(),
                    _ => {
                        return Err(
                            self.err_at(&name_tok, "expected predicate name after '% edb'".to_string())
                        )
                    }
                };
                self.expect(Tok::Slash, "'/' in edb declaration")?;
                let arity_tok = match self.next() {
                    Some(t) => t,
                    None => return Err(self.eof_error("expected arity")),
                };
                let arity = match arity_tok.tok {
                    Tok::Int(n) if n >= 0 => n as usize,
                    _ => return Err(self.err_at(&arity_tok, "expected nonnegative arity".to_string())),
                };
                self.check_pred(&name, arity, name_tok.line, name_tok.col)?;
                program.edb.insert(Pred::new(&name, arity));
            } else {
                let head = self.parse_atom()?;
                let mut body = Vec::new();
                match self.next() {
                    Some(t) if t.tok == Tok::Dot => {}
                    Some(t) if t.tok == Tok::ColonDash => loop {
                        body.push(self.parse_atom()?);
                        match self.next() {
                            Some(t) if t.tok == Tok::Comma => continue,
                            Some(t) if t.tok == Tok::Dot => break,
                            Some(t) => {
                                return Err(self.err_at(&t, "expected ',' or '.'".to_string()))
                            }
                            None => return Err(self.eof_error("expected '.'")),
                        }
                    },
                    Some(t) => return Err(self.err_at(&t, "expected ':-' or '.'".to_string())),
                    None => return Err(self.eof_error("expected ':-' or '.'")),
                }
                program.rules.push(Rule::new(head, body));
            }
        }
        Ok(program)
    }

    fn parse_query(&mut self) -> Result<Query, ParseError> {
        self.expect(Tok::QueryDash, "'?-'")?;
        let mut literals = Vec::new();
        loop {
            literals.push(self.parse_atom()?);
            match self.next() {
                Some(t) if t.tok == Tok::Comma => continue,
                Some(t) if t.tok == Tok::Dot => break,
                Some(t) => return Err(self.err_at(&t, "expected ',' or '.'".to_string())),
                None => return Err(self.eof_error("expected '.'")),
            }
        }
        if let Some(t) = self.peek() {
            let t = t.clone();
            return Err(self.err_at(&t, "trailing input after query".to_string()));
        }
        Ok(Query::new(literals))
    }

    fn parse_facts(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut facts = Vec::new();
        while self.peek().is_some() {
            let start = self.peek().cloned();
            let atom = self.parse_atom()?;
            if !atom.is_ground() {
                let t = start.unwrap();
                return Err(self.err_at(&t, format!("fact is not ground: {}", atom)));
            }
            self.expect(Tok::Dot, "'.' after fact")?;
            facts.push(atom);
        }
        Ok(facts)
    }
}

/// Parse a program: rules plus `% edb name/arity` declarations.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    Parser::new(tokens).parse_program()
}

/// Parse a query of the form `?- atom, atom.`.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    Parser::new(tokens).parse_query()
}

/// Parse a fact file: ground atoms terminated by `.`.
pub fn parse_facts(text: &str) -> Result<Vec<Literal>, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    Parser::new(tokens).parse_facts()
}

/// Parse constant text from an external source (CSV cells): integers when
/// they look like integers, symbols otherwise.
pub fn parse_const(text: &str) -> Const {
    match text.parse::<i64>() {
        Ok(n) => Const::Int(n),
        Err(_) => Const::sym(text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const PATH_PROGRAM: &str = "path(X,Y) :- edge(X,Y).\npath(X,Z) :- edge(X,Y), path(Y,Z).\n% edb edge/2";

    #[test]
    fn parses_path_program() {
        let p = parse_program(PATH_PROGRAM).unwrap();
        assert_eq!(p.rules.len(), 2);
        assert_eq!(p.edb.len(), 1);
        assert!(p.edb.contains(&Pred::new("edge", 2)));
        assert_eq!(p.idb().into_iter().collect::<Vec<_>>(), vec![Pred::new("path", 2)]);
    }

    #[test]
    fn parses_empty_program() {
        let p = parse_program("").unwrap();
        assert!(p.rules.is_empty());
        assert!(p.edb.is_empty());
    }

    #[test]
    fn parses_single_rule_program() {
        let p = parse_program("p(X) :- q(X,Y).\n% edb q/2").unwrap();
        assert_eq!(p.idb().into_iter().collect::<Vec<_>>(), vec![Pred::new("p", 1)]);
    }

    #[test]
    fn comments_are_skipped_but_directives_are_not() {
        let p = parse_program("% just a comment\np(X) :- q(X). % trailing\n% edb q/1\n").unwrap();
        assert_eq!(p.rules.len(), 1);
        assert!(p.edb.contains(&Pred::new("q", 1)));
    }

    #[test]
    fn rejects_reserved_answer_predicate() {
        let err = parse_program("answer(X) :- q(X).\n% edb q/1").unwrap_err();
        assert!(err.message.contains("answer"));
        assert_eq!(err.line, 1);
    }

    #[test]
    fn rejects_reserved_variable_names() {
        assert!(parse_program("p(V1) :- q(V1).\n% edb q/1").is_err());
        assert!(parse_program("p(C2) :- q(C2).\n% edb q/1").is_err());
        // C0 and V0 are not renders of any parameter or normalized variable.
        assert!(parse_program("p(C0) :- q(C0).\n% edb q/1").is_ok());
        assert!(parse_program("p(V01) :- q(V01).\n% edb q/1").is_ok());
    }

    #[test]
    fn rejects_arity_conflicts() {
        let err = parse_program("p(X) :- q(X).\np(X,Y) :- q(X), q(Y).\n% edb q/1").unwrap_err();
        assert!(err.message.contains("arity conflict"));
        let err = parse_program("% edb q/2\np(X) :- q(X).").unwrap_err();
        assert!(err.message.contains("arity conflict"));
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse_program("p(X) :- q(X).\np(X) :- ,\n% edb q/1").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.col, 9);
    }

    #[test]
    fn parses_queries() {
        let q = parse_query("?- path(0,A).").unwrap();
        assert_eq!(q.literals.len(), 1);
        assert_eq!(q.answer_vars.len(), 1);
        let q = parse_query("?- edge(X,Y), path(Y,Z).").unwrap();
        assert_eq!(q.answer_vars.len(), 3);
        let q = parse_query("?- p.").unwrap();
        assert!(q.answer_vars.is_empty());
    }

    #[test]
    fn parses_facts() {
        let facts = parse_facts("edge(0,1).\nedge(1,2).\n% comment\nedge(2,3).").unwrap();
        assert_eq!(facts.len(), 3);
        let err = parse_facts("edge(0,X).").unwrap_err();
        assert!(err.message.contains("not ground"));
    }

    #[test]
    fn quoted_and_zero_arity() {
        let p = parse_program("p('Hello world') :- q.\n% edb q/0").unwrap();
        assert_eq!(p.rules[0].head.args[0], Term::sym("Hello world"));
        assert_eq!(p.rules[0].body[0].args.len(), 0);
    }

    #[test]
    fn print_parse_round_trip() {
        let p1 = parse_program(PATH_PROGRAM).unwrap();
        let printed = p1.to_string();
        let p2 = parse_program(&printed).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn negative_integers() {
        let facts = parse_facts("p(-5).").unwrap();
        assert_eq!(facts[0].args[0], Term::int(-5));
    }

    #[test]
    fn reserved_name_predicate_in_facts() {
        assert!(parse_facts("answer(1).").is_err());
    }
}
