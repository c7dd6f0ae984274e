//! Tree description text: `Node := Kind ['(' args ')'] ['{' Node* '}']`.
//! Arguments are bare words or double-quoted strings; `#` starts a comment.

use super::{BtError, BtNode, DecoratorKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Open,
    Close,
    LBrace,
    RBrace,
    Comma,
}

fn is_bare(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '+' | '-' | ':' | '/')
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, BtError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line = 1;
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '(' | ')' | '{' | '}' | ',' => {
                chars.next();
                let t = match c {
                    '(' => Tok::Open,
                    ')' => Tok::Close,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    _ => Tok::Comma,
                };
                out.push((t, line));
            }
            '"' => {
                let start = line;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(e @ ('"' | '\\')) => s.push(e),
                            Some('n') => s.push('\n'),
                            _ => return Err(BtError::Parse { line, msg: "bad escape".into() }),
                        },
                        Some('\n') => {
                            line += 1;
                            s.push('\n');
                        }
                        Some(ch) => s.push(ch),
                        None => return Err(BtError::Parse { line: start, msg: "unterminated string".into() }),
                    }
                }
                out.push((Tok::Quoted(s), start));
            }
            c if is_bare(c) => {
                let mut s = String::new();
                while let Some(&c) = chars.peek().filter(|c| is_bare(**c)) {
                    s.push(c);
                    chars.next();
                }
                out.push((Tok::Word(s), line));
            }
            other => {
                return Err(BtError::Parse { line, msg: format!("unexpected character `{other}`") });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or(1, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, BtError> {
        Err(BtError::Parse { line: self.line(), msg: msg.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn args(&mut self) -> Result<Option<Vec<String>>, BtError> {
        if !self.eat(&Tok::Open) {
            return Ok(None);
        }
        let mut out = Vec::new();
        if self.eat(&Tok::Close) {
            return Ok(Some(out));
        }
        loop {
            match self.peek().cloned() {
                Some(Tok::Word(w)) | Some(Tok::Quoted(w)) => {
                    out.push(w);
                    self.pos += 1;
                }
                _ => return self.err("expected an argument"),
            }
            if self.eat(&Tok::Close) {
                return Ok(Some(out));
            }
            if !self.eat(&Tok::Comma) {
                return self.err("expected `,` or `)`");
            }
        }
    }

    fn node(&mut self) -> Result<BtNode, BtError> {
        let line = self.line();
        let kind = match self.peek().cloned() {
            Some(Tok::Word(w)) => w,
            _ => return self.err("expected a node kind"),
        };
        self.pos += 1;
        let args = self.args()?;
        let mut children = Vec::new();
        let braced = self.eat(&Tok::LBrace);
        if braced {
            while !self.eat(&Tok::RBrace) {
                if self.peek().is_none() {
                    return self.err("missing `}`");
                }
                children.push(self.node()?);
            }
        }
        let at = |msg: String| Err(BtError::Parse { line, msg });
        let one_num = |args: &Option<Vec<String>>| -> Option<u64> {
            match args.as_deref() {
                Some([a]) => a.parse().ok(),
                _ => None,
            }
        };
        let no_args = args.as_ref().is_none_or(|a| a.is_empty());
        let node = match kind.as_str() {
            "Sequence" | "Fallback" => {
                if !no_args {
                    return at(format!("{kind} takes no arguments"));
                }
                if children.is_empty() {
                    return at(format!("{kind} needs at least one child"));
                }
                if kind == "Sequence" {
                    BtNode::Sequence(children)
                } else {
                    BtNode::Fallback(children)
                }
            }
            "Parallel" => {
                let Some(t) = one_num(&args) else {
                    return at("Parallel needs a success threshold".into());
                };
                if children.is_empty() || t == 0 || t as usize > children.len() {
                    return at(format!("Parallel({t}) with {} children", children.len()));
                }
                BtNode::Parallel { threshold: t as usize, children }
            }
            "Inverter" | "ForceSuccess" | "Retry" | "Timeout" => {
                let d = match kind.as_str() {
                    "Inverter" | "ForceSuccess" if !no_args => {
                        return at(format!("{kind} takes no arguments"));
                    }
                    "Inverter" => DecoratorKind::Inverter,
                    "ForceSuccess" => DecoratorKind::ForceSuccess,
                    _ => match (kind.as_str(), one_num(&args)) {
                        ("Retry", Some(n)) if n >= 1 && n <= u32::MAX as u64 => DecoratorKind::Retry(n as u32),
                        ("Timeout", Some(t)) => DecoratorKind::Timeout(t),
                        _ => return at(format!("{kind} needs one numeric argument")),
                    },
                };
                if children.len() != 1 {
                    return at(format!("{kind} needs exactly one child, found {}", children.len()));
                }
                BtNode::Decorator(d, Box::new(children.pop().unwrap()))
            }
            "Leaf" => {
                if braced {
                    return at("Leaf cannot have children".into());
                }
                let mut a = args.unwrap_or_default().into_iter();
                let Some(task) = a.next() else {
                    return at("Leaf needs a task id".into());
                };
                BtNode::Leaf { task, args: a.collect() }
            }
            other => return at(format!("unknown node kind `{other}`")),
        };
        Ok(node)
    }
}

pub fn load_tree(src: &str) -> Result<BtNode, BtError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let root = p.node()?;
    if p.peek().is_some() {
        return p.err("trailing input after the root node");
    }
    Ok(root)
}

fn quote(a: &str) -> String {
    if !a.is_empty() && a.chars().all(is_bare) {
        a.to_string()
    } else {
        let esc = a.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n");
        format!("\"{esc}\"")
    }
}

fn write_node(n: &BtNode, depth: usize, out: &mut String) {
    out.push_str(&"  ".repeat(depth));
    match n {
        BtNode::Leaf { task, args } => {
            let all: Vec<String> = std::iter::once(task.as_str()).chain(args.iter().map(String::as_str)).map(quote).collect();
            out.push_str(&format!("Leaf({})\n", all.join(", ")));
            return;
        }
        other => out.push_str(&other.label()),
    }
    out.push_str(" {\n");
    for c in n.children() {
        write_node(c, depth + 1, out);
    }
    out.push_str(&"  ".repeat(depth));
    out.push_str("}\n");
}

pub fn serialize_tree(n: &BtNode) -> String {
    let mut s = String::new();
    write_node(n, 0, &mut s);
    s
}
