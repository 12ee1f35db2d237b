//! Recursive-descent parser for the rule language.
//!
//! The grammar is deliberately closed: the only top-level form is a
//! `rule/3` statement terminated by a period. `neg/1` and `prefer/2` are
//! reserved functors, `%` starts a comment that runs to end of line.
//!
//! ```text
//! program   := { statement }
//! statement := "rule" "(" label "," head "," body ")" "."
//! label     := ident [ "(" term { "," term } ")" ]
//! head      := "prefer" "(" label "," label ")" | literal
//! body      := "[" [ literal { "," literal } ] "]"
//! literal   := "neg" "(" atom ")" | atom
//! atom      := ident [ "(" arg { "," arg } ")" ]
//! arg       := variable "=" ident | variable | ident
//! ident     := [a-z][a-zA-Z0-9_]*
//! variable  := [A-Z][a-zA-Z0-9_]*
//! ```
//!
//! A binding `X = c` denotes the substitution `{X -> c}` applied to the
//! whole enclosing statement, so parsed statements never contain binding
//! nodes. Anything outside the grammar above (strings, numbers, operators,
//! nested terms, double negation) is rejected with a positioned error.

use std::fmt;

use thiserror::Error;

use super::ast::{
    Atom, Bindings, Head, Literal, PreferenceAtom, Program, Query, Rule, SourceSpan, Term,
};

/// Functors with fixed meaning that cannot be used as predicate or label
/// names.
pub const RESERVED_FUNCTORS: [&str; 3] = ["rule", "neg", "prefer"];

/// A parse failure with its position and the token set that would have been
/// accepted there.
#[derive(Debug, Clone, Error)]
pub struct ParseError {
    pub file: String,
    pub line: usize,
    pub col: usize,
    /// Descriptions of the tokens that were expected, possibly empty for
    /// non-alternation failures (e.g. double negation).
    pub expected: Vec<String>,
    /// Description of what was found instead.
    pub found: String,
    message: String,
}

impl ParseError {
    fn new(pos: Pos, file: &str, message: String, expected: Vec<String>, found: String) -> Self {
        Self {
            file: file.to_string(),
            line: pos.line,
            col: pos.col,
            expected,
            found,
            message,
        }
    }

    fn expected(pos: Pos, file: &str, expected: &[&str], found: String) -> Self {
        let expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        let message = format!("expected {}, found {}", or_list(&expected), found);
        Self::new(pos, file, message, expected, found)
    }

    fn message(pos: Pos, file: &str, message: impl Into<String>) -> Self {
        Self::new(pos, file, message.into(), Vec::new(), String::new())
    }

    /// A positioned error with a free-form message, for other input formats
    /// that share this error type.
    pub fn at(file: &str, line: usize, col: usize, message: impl Into<String>) -> Self {
        Self::new(
            Pos { line, col },
            file,
            message.into(),
            Vec::new(),
            String::new(),
        )
    }

    pub fn message_text(&self) -> &str {
        &self.message
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}",
            self.file, self.line, self.col, self.message
        )
    }
}

fn or_list(items: &[String]) -> String {
    match items.len() {
        0 => String::from("nothing"),
        1 => items[0].clone(),
        _ => format!("one of {}", items.to_vec().join(", ")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Variable(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Period,
    Equals,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Variable(s) => format!("variable `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Period => "`.`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    pos: Pos,
}

fn lex(text: &str, file: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '%' => {
                // Comment to end of line.
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' | ')' | '[' | ']' | ',' | '.' | '=' => {
                chars.next();
                col += 1;
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    '.' => Tok::Period,
                    _ => Tok::Equals,
                };
                out.push(Spanned { tok, pos });
            }
            c if c.is_ascii_lowercase() || c.is_ascii_uppercase() => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let tok = if name.chars().next().unwrap().is_ascii_lowercase() {
                    Tok::Ident(name)
                } else {
                    Tok::Variable(name)
                };
                out.push(Spanned { tok, pos });
            }
            other => {
                return Err(ParseError::message(
                    pos,
                    file,
                    format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    file: String,
    /// Bindings collected from `X = c` forms in the current statement.
    bindings: Bindings,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> &Spanned {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError::expected(t.pos, &self.file, expected, t.tok.describe())
    }

    fn expect(&mut self, tok: Tok, describe: &str) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&[describe]))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => {
                let pos = self.peek().pos;
                self.advance();
                Ok((name, pos))
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn named_ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        let (name, pos) = self.expect_ident(what)?;
        if RESERVED_FUNCTORS.contains(&name.as_str()) {
            return Err(ParseError::message(
                pos,
                &self.file,
                format!("`{name}` is a reserved functor and cannot be used as a name"),
            ));
        }
        Ok((name, pos))
    }

    fn record_binding(
        &mut self,
        var: String,
        constant: String,
        pos: Pos,
    ) -> Result<(), ParseError> {
        if let Some(existing) = self.bindings.get(&var) {
            if existing != &constant {
                return Err(ParseError::message(
                    pos,
                    &self.file,
                    format!("conflicting bindings for {var}: `{existing}` and `{constant}`"),
                ));
            }
        }
        self.bindings.insert(var, constant);
        Ok(())
    }

    /// `arg := variable "=" ident | variable | ident`; a binding is recorded
    /// and the variable is left in place to be substituted afterwards.
    fn parse_arg(&mut self) -> Result<Term, ParseError> {
        match self.peek().tok.clone() {
            Tok::Variable(name) => {
                let pos = self.peek().pos;
                self.advance();
                if self.peek().tok == Tok::Equals {
                    self.advance();
                    let (constant, _) = self.expect_ident("constant")?;
                    self.record_binding(name.clone(), constant, pos)?;
                }
                Ok(Term::Variable(name))
            }
            Tok::Ident(name) => {
                self.advance();
                if self.peek().tok == Tok::LParen {
                    return Err(ParseError::message(
                        self.peek().pos,
                        &self.file,
                        format!("nested term under `{name}`: atom arguments must be constants or variables"),
                    ));
                }
                Ok(Term::Constant(name))
            }
            _ => Err(self.error(&["constant", "variable"])),
        }
    }

    fn parse_arg_list(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if self.peek().tok != Tok::LParen {
            return Ok(args);
        }
        self.advance();
        loop {
            args.push(self.parse_arg()?);
            match self.peek().tok {
                Tok::Comma => {
                    self.advance();
                }
                Tok::RParen => {
                    self.advance();
                    break;
                }
                _ => return Err(self.error(&["`,`", "`)`"])),
            }
        }
        Ok(args)
    }

    fn parse_atom(&mut self) -> Result<Atom, ParseError> {
        let (functor, _) = self.named_ident("predicate name")?;
        let args = self.parse_arg_list()?;
        Ok(Atom::new(functor, args))
    }

    /// A label is an identifier with optional constant/variable parameters;
    /// bindings are not allowed in label position.
    fn parse_label(&mut self) -> Result<Atom, ParseError> {
        let (name, _) = self.named_ident("rule label")?;
        let mut args = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.advance();
            loop {
                match self.peek().tok.clone() {
                    Tok::Variable(v) => {
                        self.advance();
                        args.push(Term::Variable(v));
                    }
                    Tok::Ident(c) => {
                        self.advance();
                        args.push(Term::Constant(c));
                    }
                    _ => return Err(self.error(&["constant", "variable"])),
                }
                match self.peek().tok {
                    Tok::Comma => {
                        self.advance();
                    }
                    Tok::RParen => {
                        self.advance();
                        break;
                    }
                    Tok::Equals => {
                        return Err(ParseError::message(
                            self.peek().pos,
                            &self.file,
                            "bindings are not allowed inside rule labels",
                        ))
                    }
                    _ => return Err(self.error(&["`,`", "`)`"])),
                }
            }
        }
        Ok(Atom::new(name, args))
    }

    fn parse_literal(&mut self) -> Result<Literal, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) if name == "neg" => {
                self.advance();
                self.expect(Tok::LParen, "`(`")?;
                if let Tok::Ident(inner) = &self.peek().tok {
                    if inner == "neg" {
                        return Err(ParseError::message(
                            self.peek().pos,
                            &self.file,
                            "double negation is not allowed",
                        ));
                    }
                    if inner == "prefer" {
                        return Err(ParseError::message(
                            self.peek().pos,
                            &self.file,
                            "`prefer` cannot be negated",
                        ));
                    }
                }
                let atom = self.parse_atom()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Literal::negative(atom))
            }
            Tok::Ident(_) => Ok(Literal::positive(self.parse_atom()?)),
            _ => Err(self.error(&["literal"])),
        }
    }

    fn parse_head(&mut self) -> Result<Head, ParseError> {
        if let Tok::Ident(name) = &self.peek().tok {
            if name == "prefer" {
                self.advance();
                self.expect(Tok::LParen, "`(`")?;
                let stronger = self.parse_label()?;
                self.expect(Tok::Comma, "`,`")?;
                let weaker = self.parse_label()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Head::Preference(PreferenceAtom { stronger, weaker }));
            }
        }
        Ok(Head::Literal(self.parse_literal()?))
    }

    fn parse_body(&mut self) -> Result<Vec<Literal>, ParseError> {
        self.expect(Tok::LBracket, "`[`")?;
        let mut body = Vec::new();
        if self.peek().tok == Tok::RBracket {
            self.advance();
            return Ok(body);
        }
        loop {
            if let Tok::Ident(name) = &self.peek().tok {
                if name == "prefer" {
                    return Err(ParseError::message(
                        self.peek().pos,
                        &self.file,
                        "`prefer` may only appear as a rule head",
                    ));
                }
            }
            body.push(self.parse_literal()?);
            match self.peek().tok {
                Tok::Comma => {
                    self.advance();
                }
                Tok::RBracket => {
                    self.advance();
                    break;
                }
                _ => return Err(self.error(&["`,`", "`]`"])),
            }
        }
        Ok(body)
    }

    fn parse_statement(&mut self) -> Result<Rule, ParseError> {
        self.bindings.clear();
        let start = self.peek().pos;
        match self.peek().tok.clone() {
            Tok::Ident(name) if name == "rule" => {
                self.advance();
            }
            _ => return Err(self.error(&["`rule`"])),
        }
        self.expect(Tok::LParen, "`(`")?;
        let label = self.parse_label()?;
        self.expect(Tok::Comma, "`,`")?;
        let head = self.parse_head()?;
        self.expect(Tok::Comma, "`,`")?;
        let body = self.parse_body()?;
        self.expect(Tok::RParen, "`)`")?;
        self.expect(Tok::Period, "`.`")?;

        let span = SourceSpan::new(self.file.clone(), start.line, start.col);
        let rule = Rule::new(label, head, body, span);
        // Inline bindings substitute over the whole statement.
        Ok(rule.substitute(&self.bindings))
    }
}

/// Parses program text into its normalized form: bindings applied,
/// comments and whitespace discarded.
pub fn parse_program(source_text: &str, origin: &str) -> Result<Program, ParseError> {
    let toks = lex(source_text, origin)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        file: origin.to_string(),
        bindings: Bindings::new(),
    };
    let mut rules = Vec::new();
    while parser.peek().tok != Tok::Eof {
        rules.push(parser.parse_statement()?);
    }
    Ok(Program::new(rules, vec![origin.to_string()]))
}

/// Parses a single goal literal, e.g. `neg(use(X = lime))`. A trailing
/// period is accepted. The returned query carries the normalized literal
/// and any inline bindings.
pub fn parse_query(text: &str, origin: &str) -> Result<Query, ParseError> {
    let toks = lex(text, origin)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        file: origin.to_string(),
        bindings: Bindings::new(),
    };
    let literal = parser.parse_literal()?;
    if parser.peek().tok == Tok::Period {
        parser.advance();
    }
    if parser.peek().tok != Tok::Eof {
        return Err(parser.error(&["end of input"]));
    }
    let bindings = parser.bindings.clone();
    Ok(Query {
        literal: literal.substitute(&bindings),
        bindings,
    })
}
