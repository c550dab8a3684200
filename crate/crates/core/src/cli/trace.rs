//! Line-oriented trace format.
//!
//! ```text
//! addv v | delv v | link u v l [a] | cut v | addl v l [a] | dell v l [a]
//! ea u v t | ld u v t | reach u v td ta
//! ```
//!
//! `#` starts a comment. Times are decimal integers, `+inf` or `-inf`; label
//! times are finite. A missing arrival means the label has no latency.

use std::fmt;

use crate::model::{Label, TimeValue, Update, VertexId};

/// One trace line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Update(Update),
    Ea(VertexId, VertexId, TimeValue),
    Ld(VertexId, VertexId, TimeValue),
    Reach(VertexId, VertexId, TimeValue, TimeValue),
}

impl Op {
    pub fn is_query(&self) -> bool {
        !matches!(self, Op::Update(_))
    }

    /// Short name used in diagnostics and benchmark rows.
    pub fn name(&self) -> &'static str {
        match self {
            Op::Update(Update::AddVertex(_)) => "addv",
            Op::Update(Update::DeleteVertex(_)) => "delv",
            Op::Update(Update::Link { .. }) => "link",
            Op::Update(Update::Cut(_)) => "cut",
            Op::Update(Update::AddLabel(..)) => "addl",
            Op::Update(Update::DeleteLabel(..)) => "dell",
            Op::Ea(..) => "ea",
            Op::Ld(..) => "ld",
            Op::Reach(..) => "reach",
        }
    }
}

struct LabelArgs(Label);

impl fmt::Display for LabelArgs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.dep == self.0.arr {
            write!(f, "{}", self.0.dep)
        } else {
            write!(f, "{} {}", self.0.dep, self.0.arr)
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Update(Update::AddVertex(v)) => write!(f, "addv {v}"),
            Op::Update(Update::DeleteVertex(v)) => write!(f, "delv {v}"),
            Op::Update(Update::Link { child, parent, label }) => {
                write!(f, "link {child} {parent} {}", LabelArgs(*label))
            }
            Op::Update(Update::Cut(v)) => write!(f, "cut {v}"),
            Op::Update(Update::AddLabel(v, l)) => write!(f, "addl {v} {}", LabelArgs(*l)),
            Op::Update(Update::DeleteLabel(v, l)) => write!(f, "dell {v} {}", LabelArgs(*l)),
            Op::Ea(u, v, t) => write!(f, "ea {u} {v} {t}"),
            Op::Ld(u, v, t) => write!(f, "ld {u} {v} {t}"),
            Op::Reach(u, v, td, ta) => write!(f, "reach {u} {v} {td} {ta}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn vertex(tok: &str) -> Result<VertexId, String> {
    tok.parse::<u32>()
        .map(VertexId)
        .map_err(|_| format!("invalid vertex `{tok}`"))
}

fn time(tok: &str) -> Result<TimeValue, String> {
    tok.parse()
}

fn label(dep: &str, arr: Option<&&str>) -> Result<Label, String> {
    let d: i64 = dep.parse().map_err(|_| format!("invalid label time `{dep}`"))?;
    let a: i64 = match arr {
        Some(a) => a.parse().map_err(|_| format!("invalid label time `{a}`"))?,
        None => d,
    };
    Label::new(d, a).map_err(|e| e.to_string())
}

fn parse_line(toks: &[&str]) -> Result<Op, String> {
    let (cmd, args) = toks.split_first().expect("non-empty line");
    let arity = |lo: usize, hi: usize| {
        if args.len() < lo || args.len() > hi {
            Err(format!(
                "`{cmd}` takes {} arguments, got {}",
                if lo == hi {
                    lo.to_string()
                } else {
                    format!("{lo} or {hi}")
                },
                args.len()
            ))
        } else {
            Ok(())
        }
    };
    Ok(match *cmd {
        "addv" => {
            arity(1, 1)?;
            Op::Update(Update::AddVertex(vertex(args[0])?))
        }
        "delv" => {
            arity(1, 1)?;
            Op::Update(Update::DeleteVertex(vertex(args[0])?))
        }
        "link" => {
            arity(3, 4)?;
            Op::Update(Update::Link {
                child: vertex(args[0])?,
                parent: vertex(args[1])?,
                label: label(args[2], args.get(3))?,
            })
        }
        "cut" => {
            arity(1, 1)?;
            Op::Update(Update::Cut(vertex(args[0])?))
        }
        "addl" => {
            arity(2, 3)?;
            Op::Update(Update::AddLabel(vertex(args[0])?, label(args[1], args.get(2))?))
        }
        "dell" => {
            arity(2, 3)?;
            Op::Update(Update::DeleteLabel(vertex(args[0])?, label(args[1], args.get(2))?))
        }
        "ea" => {
            arity(3, 3)?;
            Op::Ea(vertex(args[0])?, vertex(args[1])?, time(args[2])?)
        }
        "ld" => {
            arity(3, 3)?;
            Op::Ld(vertex(args[0])?, vertex(args[1])?, time(args[2])?)
        }
        "reach" => {
            arity(4, 4)?;
            Op::Reach(vertex(args[0])?, vertex(args[1])?, time(args[2])?, time(args[3])?)
        }
        other => return Err(format!("unknown operation `{other}`")),
    })
}

/// Parses a whole trace into `(line number, op)` pairs, numbering from 1.
pub fn parse(text: &str) -> Result<Vec<(usize, Op)>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let op = parse_line(&toks).map_err(|message| ParseError { line: i + 1, message })?;
        out.push((i + 1, op));
    }
    Ok(out)
}

/// Renders ops one per line.
pub fn render(ops: &[Op]) -> String {
    let mut s = String::new();
    for op in ops {
        s.push_str(&op.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_form() {
        let text = "\
# header
addv 0
addv 1   # trailing comment
link 1 0 3
link 2 0 3 5
addl 1 4
dell 1 4
cut 1
delv 1
ea 1 0 -inf
ld 1 0 +inf
reach 0 1 -2 7
";
        let ops = parse(text).unwrap();
        assert_eq!(ops.len(), 11);
        assert_eq!(ops[0].0, 2);
        assert_eq!(
            ops[3].1,
            Op::Update(Update::Link {
                child: VertexId(2),
                parent: VertexId(0),
                label: Label::new(3, 5).unwrap()
            })
        );
        let again = parse(&render(&ops.iter().map(|(_, o)| o.clone()).collect::<Vec<_>>())).unwrap();
        assert_eq!(
            again.into_iter().map(|(_, o)| o).collect::<Vec<_>>(),
            ops.into_iter().map(|(_, o)| o).collect::<Vec<_>>()
        );
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse("addv 0\n\nlink 1 0\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(parse("ea 0 0 soon").unwrap_err().message.contains("soon"));
        assert!(parse("frobnicate 1").unwrap_err().message.contains("unknown"));
        assert!(parse("addl 1 5 4").is_err());
        assert!(parse("addv -1").is_err());
    }
}
