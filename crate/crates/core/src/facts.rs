//! The fact-file format.
//!
//! One fact per line, each terminated by `.`; `%` starts a comment.
//!
//! ```text
//! op(ID,DUR).  needs(OP,CLASS).  res(CLASS,IDX,OP).
//! job(JID,DEADLINE).  recipe(JID,OP).  prec(JID,OP1,OP2).
//! ```
//!
//! Identifiers match `[a-z][A-Za-z0-9_]*`, integers are non-negative
//! decimals. Several facts may share a line. Repeated facts are merged.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::instance::{
    find_cycle_edge, Demand, Instance, JobSpec, OperationSpec, ResourceInstance,
};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: `{fact}`: {message}")]
    Semantic {
        line: usize,
        fact: String,
        message: String,
    },
    #[error("invalid JSON instance: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Arg {
    Id(String),
    Int(u64),
}

#[derive(Debug, Clone)]
struct Fact {
    pred: String,
    args: Vec<Arg>,
    line: usize,
}

impl Fact {
    fn render(&self) -> String {
        let args: Vec<String> = self
            .args
            .iter()
            .map(|a| match a {
                Arg::Id(s) => s.clone(),
                Arg::Int(n) => n.to_string(),
            })
            .collect();
        format!("{}({}).", self.pred, args.join(","))
    }

    fn id(&self, i: usize) -> &str {
        match &self.args[i] {
            Arg::Id(s) => s,
            Arg::Int(_) => unreachable!("argument kinds are checked on decode"),
        }
    }

    fn int(&self, i: usize) -> u64 {
        match &self.args[i] {
            Arg::Int(n) => *n,
            Arg::Id(_) => unreachable!("argument kinds are checked on decode"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            src: text.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.col,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += 1;
            if c == b'\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == b'%' {
                while !matches!(self.peek(), None | Some(b'\n')) {
                    self.bump();
                }
            } else if c.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, want: u8) -> Result<(), ParseError> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.err(format!(
                "expected `{}`, found `{}`",
                want as char, c as char
            ))),
            None => Err(self.err(format!("expected `{}`, found end of input", want as char))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return Err(self.err("expected an identifier")),
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.bump();
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                digits
                    .parse()
                    .map(Arg::Int)
                    .map_err(|_| self.err("integer out of range"))
            }
            Some(c) if c.is_ascii_lowercase() => self.ident().map(Arg::Id),
            _ => Err(self.err("expected an identifier or a non-negative integer")),
        }
    }

    fn fact(&mut self) -> Result<Option<Fact>, ParseError> {
        self.skip_trivia();
        if self.peek().is_none() {
            return Ok(None);
        }
        let line = self.line;
        let pred = self.ident()?;
        self.expect(b'(')?;
        let mut args = vec![self.arg()?];
        loop {
            self.skip_trivia();
            match self.peek() {
                Some(b',') => {
                    self.bump();
                    args.push(self.arg()?);
                }
                Some(b')') => {
                    self.bump();
                    break;
                }
                _ => return Err(self.err("expected `,` or `)`")),
            }
        }
        self.expect(b'.')?;
        Ok(Some(Fact { pred, args, line }))
    }
}

fn check_shape(f: &Fact) -> Result<(), ParseError> {
    // true = identifier, false = integer
    let shape: &[bool] = match f.pred.as_str() {
        "op" => &[true, false],
        "needs" => &[true, true],
        "res" => &[true, false, true],
        "job" => &[true, false],
        "recipe" => &[true, true],
        "prec" => &[true, true, true],
        other => {
            return Err(ParseError::Semantic {
                line: f.line,
                fact: f.render(),
                message: format!("unknown predicate `{other}/{}`", f.args.len()),
            })
        }
    };
    let ok = shape.len() == f.args.len()
        && shape
            .iter()
            .zip(&f.args)
            .all(|(want_id, a)| matches!(a, Arg::Id(_)) == *want_id);
    if ok {
        Ok(())
    } else {
        Err(ParseError::Semantic {
            line: f.line,
            fact: f.render(),
            message: format!("malformed `{}` fact", f.pred),
        })
    }
}

/// Parses a fact file into a canonical [`Instance`], rejecting dangling
/// references and cyclic precedence.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut facts = Vec::new();
    while let Some(f) = lexer.fact()? {
        check_shape(&f)?;
        facts.push(f);
    }
    build(&facts)
}

fn semantic(f: &Fact, message: impl Into<String>) -> ParseError {
    ParseError::Semantic {
        line: f.line,
        fact: f.render(),
        message: message.into(),
    }
}

fn build(facts: &[Fact]) -> Result<Instance, ParseError> {
    let mut ops: BTreeMap<String, (u32, &Fact)> = BTreeMap::new();
    let mut jobs: BTreeMap<String, (u32, &Fact)> = BTreeMap::new();
    for f in facts {
        match f.pred.as_str() {
            "op" => {
                let dur =
                    u32::try_from(f.int(1)).map_err(|_| semantic(f, "duration out of range"))?;
                if dur == 0 {
                    return Err(semantic(f, "duration must be at least 1"));
                }
                if let Some((prev, _)) = ops.insert(f.id(0).to_string(), (dur, f)) {
                    if prev != dur {
                        return Err(semantic(
                            f,
                            format!("conflicting duration (earlier {prev})"),
                        ));
                    }
                }
            }
            "job" => {
                let d =
                    u32::try_from(f.int(1)).map_err(|_| semantic(f, "deadline out of range"))?;
                if let Some((prev, _)) = jobs.insert(f.id(0).to_string(), (d, f)) {
                    if prev != d {
                        return Err(semantic(
                            f,
                            format!("conflicting deadline (earlier {prev})"),
                        ));
                    }
                }
            }
            _ => {}
        }
    }

    let mut demands: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut resources: BTreeMap<(String, u32), BTreeSet<String>> = BTreeMap::new();
    let mut recipes: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut precs: Vec<&Fact> = Vec::new();
    for f in facts {
        match f.pred.as_str() {
            "needs" => {
                if !ops.contains_key(f.id(0)) {
                    return Err(semantic(f, format!("undeclared operation `{}`", f.id(0))));
                }
                demands
                    .entry(f.id(0).to_string())
                    .or_default()
                    .insert(f.id(1).to_string());
            }
            "res" => {
                let idx = u32::try_from(f.int(1)).map_err(|_| semantic(f, "index out of range"))?;
                if idx == 0 {
                    return Err(semantic(f, "instance index must be at least 1"));
                }
                if !ops.contains_key(f.id(2)) {
                    return Err(semantic(f, format!("undeclared operation `{}`", f.id(2))));
                }
                resources
                    .entry((f.id(0).to_string(), idx))
                    .or_default()
                    .insert(f.id(2).to_string());
            }
            "recipe" => {
                if !jobs.contains_key(f.id(0)) {
                    return Err(semantic(f, format!("undeclared job `{}`", f.id(0))));
                }
                if !ops.contains_key(f.id(1)) {
                    return Err(semantic(f, format!("undeclared operation `{}`", f.id(1))));
                }
                recipes
                    .entry(f.id(0).to_string())
                    .or_default()
                    .insert(f.id(1).to_string());
            }
            "prec" => precs.push(f),
            _ => {}
        }
    }

    let mut precedence: BTreeMap<String, BTreeSet<(String, String)>> = BTreeMap::new();
    let mut prec_fact: BTreeMap<(String, String, String), &Fact> = BTreeMap::new();
    for f in precs {
        let (j, a, b) = (f.id(0), f.id(1), f.id(2));
        if !jobs.contains_key(j) {
            return Err(semantic(f, format!("undeclared job `{j}`")));
        }
        let recipe = recipes.get(j);
        for op in [a, b] {
            if !recipe.is_some_and(|r| r.contains(op)) {
                return Err(semantic(
                    f,
                    format!("operation `{op}` is not in the recipe of `{j}`"),
                ));
            }
        }
        precedence
            .entry(j.to_string())
            .or_default()
            .insert((a.to_string(), b.to_string()));
        prec_fact.insert((j.to_string(), a.to_string(), b.to_string()), f);
    }
    for (j, pairs) in &precedence {
        if let Some((a, b)) = find_cycle_edge(pairs) {
            let f = prec_fact[&(j.clone(), a, b)];
            return Err(semantic(f, format!("precedence cycle in job `{j}`")));
        }
    }

    let mut inst = Instance {
        operations: ops
            .iter()
            .map(|(id, (duration, _))| OperationSpec {
                id: id.clone(),
                duration: *duration,
            })
            .collect(),
        resources: resources
            .into_iter()
            .map(|((class, index), capabilities)| ResourceInstance {
                class,
                index,
                capabilities,
            })
            .collect(),
        demands: demands
            .into_iter()
            .map(|(op, classes)| Demand { op, classes })
            .collect(),
        jobs: jobs
            .iter()
            .map(|(id, (deadline, _))| JobSpec {
                id: id.clone(),
                ops: recipes.remove(id).unwrap_or_default(),
                precedence: precedence.remove(id).unwrap_or_default(),
                deadline: *deadline,
            })
            .collect(),
    };
    inst.canonicalize();
    Ok(inst)
}

/// Renders an instance as facts in canonical order. Resources without any
/// capability cannot be expressed in this format and are dropped.
pub fn to_facts(inst: &Instance) -> String {
    let mut inst = inst.clone();
    inst.canonicalize();
    let mut out = String::new();
    for o in &inst.operations {
        let _ = writeln!(out, "op({},{}).", o.id, o.duration);
    }
    for d in &inst.demands {
        for c in &d.classes {
            let _ = writeln!(out, "needs({},{}).", d.op, c);
        }
    }
    for r in &inst.resources {
        for op in &r.capabilities {
            let _ = writeln!(out, "res({},{},{}).", r.class, r.index, op);
        }
    }
    for j in &inst.jobs {
        let _ = writeln!(out, "job({},{}).", j.id, j.deadline);
    }
    for j in &inst.jobs {
        for op in &j.ops {
            let _ = writeln!(out, "recipe({},{}).", j.id, op);
        }
    }
    for j in &inst.jobs {
        for (a, b) in &j.precedence {
            let _ = writeln!(out, "prec({},{},{}).", j.id, a, b);
        }
    }
    out
}

pub fn parse_json(text: &str) -> Result<Instance, ParseError> {
    let mut inst: Instance = serde_json::from_str(text)?;
    inst.canonicalize();
    Ok(inst)
}

pub fn to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(inst).expect("instance serializes")
}

/// Loads an instance from disk; `.json` files use the JSON mirror, anything
/// else is read as facts.
pub fn load_instance(path: &Path) -> Result<Instance, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_json(&text)
    } else {
        parse_instance(&text)
    }
}
