//! Reader and writer for EDP v1 model files and presentation files.
//!
//! Model files are line-oriented. `#` starts a comment, tokens are
//! whitespace-separated, and matrices are written row-major with `;`
//! between rows:
//!
//! ```text
//! p 2
//! group.order 2
//! group.table 0 1 ; 1 0
//! module.rank 2
//! module.relations 1 ; 1
//! module.action 1 = 0 1 ; 1 0
//! ```
//!
//! Instead of `group.table` a group may be given by permutation generators,
//! one per line as `group.perm <k> : <cycles>` with `k` counting from 0 and
//! points counting from 0. Elements are then numbered by breadth-first
//! closure: identity first, generator `k` next (id `k + 1` when the
//! generators are distinct and non-trivial), then products. With
//! permutation generators the action may be given on generator ids only;
//! the remaining matrices are filled in from the closure words.
//!
//! Omitting every `module.action` line gives the trivial action, and
//! omitting the module block gives the zero module.

use std::collections::BTreeMap;

use edp_core::exactlin::IntMatrix;
use edp_core::pgroup::Subgroup;
use edp_core::presentation::{PermutationModule, PresentationMap};
use edp_core::{FiniteGroup, GModule};
use num_bigint::BigInt;
use thiserror::Error;

/// Syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("validation error: {0}")]
    Validation(#[from] edp_core::Error),
}

/// A parsed and validated model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub p: u64,
    pub group: FiniteGroup,
    pub module: GModule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn err(self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token<'a> {
    text: &'a str,
    pos: Pos,
}

const SYMBOLS: &[char] = &[';', ':', '=', '(', ')', ','];

fn tokenize(line: &str, line_no: usize) -> Vec<Token<'_>> {
    fn flush<'a>(code: &'a str, start: &mut Option<(usize, usize)>, end: usize, line: usize, out: &mut Vec<Token<'a>>) {
        if let Some((b, column)) = start.take() {
            out.push(Token {
                text: &code[b..end],
                pos: Pos { line, column },
            });
        }
    }
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col0, (b, c)) in code.char_indices().enumerate() {
        if c.is_whitespace() {
            flush(code, &mut start, b, line_no, &mut out);
        } else if SYMBOLS.contains(&c) {
            flush(code, &mut start, b, line_no, &mut out);
            out.push(Token {
                text: &code[b..b + c.len_utf8()],
                pos: Pos {
                    line: line_no,
                    column: col0 + 1,
                },
            });
        } else if start.is_none() {
            start = Some((b, col0 + 1));
        }
    }
    flush(code, &mut start, code.len(), line_no, &mut out);
    out
}

/// Cursor over the tokens of one line, after its keyword.
struct Cursor<'a, 'b> {
    tokens: &'b [Token<'a>],
    at: usize,
    end: Pos,
}

impl<'a, 'b> Cursor<'a, 'b> {
    fn new(tokens: &'b [Token<'a>], end: Pos) -> Self {
        Cursor { tokens, at: 0, end }
    }

    fn peek(&self) -> Option<&'b Token<'a>> {
        self.tokens.get(self.at)
    }

    fn pos(&self) -> Pos {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn next(&mut self) -> Option<&'b Token<'a>> {
        let t = self.tokens.get(self.at);
        self.at += usize::from(t.is_some());
        t
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t.text == sym => Ok(()),
            Some(t) => Err(t.pos.err(format!("expected `{sym}`, found `{}`", t.text))),
            None => Err(self.end.err(format!("expected `{sym}` before end of line"))),
        }
    }

    fn usize(&mut self, what: &str) -> Result<(usize, Pos), ParseError> {
        match self.next() {
            Some(t) => t
                .text
                .parse::<usize>()
                .map(|v| (v, t.pos))
                .map_err(|_| t.pos.err(format!("expected {what}, found `{}`", t.text))),
            None => Err(self.end.err(format!("expected {what} before end of line"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) => Err(t.pos.err(format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }

    /// Rows of integers separated by `;`, up to end of line.
    fn matrix(&mut self) -> Result<Vec<Vec<BigInt>>, ParseError> {
        let mut rows = vec![Vec::new()];
        while let Some(t) = self.next() {
            if t.text == ";" {
                rows.push(Vec::new());
                continue;
            }
            let v: BigInt = t
                .text
                .parse()
                .map_err(|_| t.pos.err(format!("expected an integer, found `{}`", t.text)))?;
            rows.last_mut().unwrap().push(v);
        }
        Ok(rows)
    }
}

fn rows_to_matrix(rows: Vec<Vec<BigInt>>, n: usize, cols: Option<usize>, pos: Pos) -> Result<IntMatrix, ParseError> {
    if rows.len() != n {
        return Err(pos.err(format!("expected {n} rows, found {}", rows.len())));
    }
    let width = cols.unwrap_or_else(|| rows.first().map_or(0, Vec::len));
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(pos.err(format!("row {i} has {} entries, expected {width}", rows[i].len())));
    }
    if width == 0 && n > 0 {
        return Err(pos.err("empty matrix row"));
    }
    Ok(IntMatrix::from_data(n, width, rows.into_iter().flatten().collect()))
}

/// Permutation of `0..degree` from disjoint cycles.
fn cycles_to_perm(cycles: &Cycles, degree: usize) -> Result<Vec<usize>, ParseError> {
    let mut perm: Vec<usize> = (0..degree).collect();
    let mut used = vec![false; degree];
    for cycle in cycles {
        for (i, &(a, pos)) in cycle.iter().enumerate() {
            if std::mem::replace(&mut used[a], true) {
                return Err(pos.err(format!("point {a} appears twice in one generator")));
            }
            perm[a] = cycle[(i + 1) % cycle.len()].0;
        }
    }
    Ok(perm)
}

type Cycles = Vec<Vec<(usize, Pos)>>;

struct Field<T> {
    value: T,
    pos: Pos,
}

#[derive(Default)]
struct Raw {
    p: Option<Field<u64>>,
    order: Option<Field<usize>>,
    table: Option<Field<Vec<Vec<usize>>>>,
    perms: Vec<Field<Cycles>>,
    rank: Option<Field<usize>>,
    relations: Option<Field<Option<Vec<Vec<BigInt>>>>>,
    actions: BTreeMap<usize, Field<Vec<Vec<BigInt>>>>,
}

fn set_once<T>(slot: &mut Option<Field<T>>, value: T, pos: Pos, key: &str) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(pos.err(format!("duplicate `{key}` line")));
    }
    *slot = Some(Field { value, pos });
    Ok(())
}

fn read_raw(text: &str) -> Result<(Raw, Pos), ParseError> {
    let mut raw = Raw::default();
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let tokens = tokenize(line, line_no);
        let Some((key, rest)) = tokens.split_first() else {
            continue;
        };
        let end = Pos {
            line: line_no,
            column: line.chars().count() + 1,
        };
        let mut cur = Cursor::new(rest, end);
        match key.text {
            "p" => {
                let (v, pos) = cur.usize("a prime")?;
                cur.finish()?;
                set_once(&mut raw.p, v as u64, pos, "p")?;
            }
            "group.order" => {
                let (v, pos) = cur.usize("a group order")?;
                cur.finish()?;
                set_once(&mut raw.order, v, pos, "group.order")?;
            }
            "group.table" => {
                let pos = cur.pos();
                let mut rows = vec![Vec::new()];
                while cur.peek().is_some() {
                    if cur.peek().unwrap().text == ";" {
                        cur.next();
                        rows.push(Vec::new());
                        continue;
                    }
                    let (v, _) = cur.usize("an element id")?;
                    rows.last_mut().unwrap().push(v);
                }
                set_once(&mut raw.table, rows, pos, "group.table")?;
            }
            "group.perm" => {
                let (k, kpos) = cur.usize("a generator number")?;
                if k != raw.perms.len() {
                    return Err(kpos.err(format!("expected generator number {}", raw.perms.len())));
                }
                cur.expect(":")?;
                let mut cycles = Vec::new();
                while cur.peek().is_some() {
                    cur.expect("(")?;
                    let mut cycle = Vec::new();
                    while cur.peek().is_some_and(|t| t.text != ")") {
                        cycle.push(cur.usize("a point")?);
                    }
                    cur.expect(")")?;
                    if !cycle.is_empty() {
                        cycles.push(cycle);
                    }
                }
                raw.perms.push(Field {
                    value: cycles,
                    pos: kpos,
                });
            }
            "module.rank" => {
                let (v, pos) = cur.usize("a rank")?;
                cur.finish()?;
                set_once(&mut raw.rank, v, pos, "module.rank")?;
            }
            "module.relations" => {
                let pos = cur.pos();
                let value = if cur.peek().is_some_and(|t| t.text == "none") {
                    cur.next();
                    cur.finish()?;
                    None
                } else {
                    Some(cur.matrix()?)
                };
                set_once(&mut raw.relations, value, pos, "module.relations")?;
            }
            "module.action" => {
                let (id, pos) = cur.usize("an element id")?;
                cur.expect("=")?;
                let rows = cur.matrix()?;
                if raw.actions.insert(id, Field { value: rows, pos }).is_some() {
                    return Err(pos.err(format!("duplicate action for element {id}")));
                }
            }
            other => return Err(key.pos.err(format!("unknown keyword `{other}`"))),
        }
    }
    Ok((
        raw,
        Pos {
            line: last_line + 1,
            column: 1,
        },
    ))
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let (raw, eof) = read_raw(text)?;
    let p = raw.p.as_ref().ok_or_else(|| eof.err("missing `p` line"))?.value;

    let (group, words, gen_ids) = match (&raw.table, raw.perms.is_empty()) {
        (Some(t), true) => (FiniteGroup::from_table(p, t.value.clone())?, None, Vec::new()),
        (None, false) => {
            let degree = raw
                .perms
                .iter()
                .flat_map(|f| f.value.iter().flatten())
                .map(|&(a, _)| a + 1)
                .max()
                .unwrap_or(1);
            let gens = raw
                .perms
                .iter()
                .map(|f| cycles_to_perm(&f.value, degree))
                .collect::<Result<Vec<_>, _>>()?;
            let (g, ids, words) = FiniteGroup::from_permutations(p, degree, &gens)?;
            (g, Some(words), ids)
        }
        (Some(t), false) => return Err(t.pos.err("`group.table` and `group.perm` are exclusive").into()),
        (None, true) => return Err(eof.err("missing `group.table` or `group.perm` lines").into()),
    };
    if let Some(o) = &raw.order {
        if o.value != group.order() {
            return Err(o
                .pos
                .err(format!(
                    "declared order {} but the group has order {}",
                    o.value,
                    group.order()
                ))
                .into());
        }
    }

    let n = raw.rank.as_ref().map_or(0, |f| f.value);
    if raw.rank.is_none() {
        if let Some(f) = raw
            .relations
            .as_ref()
            .map(|f| f.pos)
            .or(raw.actions.values().next().map(|f| f.pos))
        {
            return Err(f.err("module data given without `module.rank`").into());
        }
    }
    let relations = match &raw.relations {
        Some(Field { value: Some(rows), pos }) => rows_to_matrix(rows.clone(), n, None, *pos)?,
        _ => IntMatrix::zeros(n, 0),
    };

    let order = group.order();
    let mut actions: Vec<Option<IntMatrix>> = vec![None; order];
    actions[0] = Some(IntMatrix::identity(n));
    for (&id, f) in &raw.actions {
        if id >= order {
            return Err(f
                .pos
                .err(format!("element id {id} out of range for a group of order {order}"))
                .into());
        }
        let m = rows_to_matrix(f.value.clone(), n, Some(n), f.pos)?;
        if id == 0 && !m.is_identity() {
            return Err(edp_core::Error::InvalidParameter("element 0 must act as the identity".into()).into());
        }
        actions[id] = Some(m);
    }
    if raw.actions.is_empty() {
        actions.iter_mut().for_each(|a| *a = Some(IntMatrix::identity(n)));
    } else if let Some(words) = &words {
        if let Some(&g) = gen_ids.iter().find(|&&g| actions[g].is_none()) {
            return Err(edp_core::Error::InvalidParameter(format!("missing action for generator element {g}")).into());
        }
        // parents precede children in the closure order
        for id in 1..order {
            if actions[id].is_none() {
                let (parent, gi) = words[id].expect("non-identity elements have words");
                let m = actions[parent]
                    .as_ref()
                    .unwrap()
                    .mul(actions[gen_ids[gi]].as_ref().unwrap());
                actions[id] = Some(m);
            }
        }
    }
    if let Some(id) = actions.iter().position(Option::is_none) {
        return Err(edp_core::Error::InvalidParameter(format!("missing action for element {id}")).into());
    }
    let actions: Vec<IntMatrix> = actions.into_iter().skip(1).map(Option::unwrap).collect();
    let module = GModule::new(p, group.clone(), relations, actions)?;
    Ok(Model { p, group, module })
}

fn write_matrix(out: &mut String, m: &IntMatrix) {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| m.row(i).iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    out.push_str(&rows.join(" ; "));
}

/// Canonical text of a module; the group is always written as a table.
pub fn serialize_model(module: &GModule) -> String {
    let g = module.group();
    let mut out = String::new();
    out.push_str(&format!("p {}\n", module.p()));
    out.push_str(&format!("group.order {}\n", g.order()));
    let rows: Vec<String> = g
        .table()
        .iter()
        .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    out.push_str(&format!("group.table {}\n", rows.join(" ; ")));
    let n = module.ngens();
    out.push_str(&format!("module.rank {n}\n"));
    out.push_str("module.relations ");
    if module.relations().cols() == 0 {
        out.push_str("none");
    } else {
        write_matrix(&mut out, module.relations());
    }
    out.push('\n');
    if n > 0 {
        for id in 1..g.order() {
            out.push_str(&format!("module.action {id} = "));
            write_matrix(&mut out, module.action(id));
            out.push('\n');
        }
    }
    out
}

/// Parses a presentation file against a module: one line per summand,
/// `summand <ids> ; x = <entries>`, where `<ids>` lists the elements of
/// the stabilizer separated by commas and `x` is the image of the coset
/// of the identity in generator coordinates.
pub fn parse_presentation(text: &str, module: &GModule) -> Result<PresentationMap, ModelError> {
    let group = module.group();
    let n = module.ngens();
    let mut summands = Vec::new();
    let mut images = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let tokens = tokenize(line, line_no);
        let Some((key, rest)) = tokens.split_first() else {
            continue;
        };
        if key.text != "summand" {
            return Err(key.pos.err(format!("expected `summand`, found `{}`", key.text)).into());
        }
        let end = Pos {
            line: line_no,
            column: line.chars().count() + 1,
        };
        let mut cur = Cursor::new(rest, end);
        let mut ids = Vec::new();
        let start = cur.pos();
        loop {
            let (id, pos) = cur.usize("an element id")?;
            if id >= group.order() {
                return Err(pos.err(format!("element id {id} out of range")).into());
            }
            ids.push(id);
            if cur.peek().is_some_and(|t| t.text == ",") {
                cur.next();
            } else {
                break;
            }
        }
        cur.expect(";")?;
        match cur.next() {
            Some(t) if t.text == "x" => {}
            Some(t) => return Err(t.pos.err(format!("expected `x`, found `{}`", t.text)).into()),
            None => return Err(end.err("expected `x`").into()),
        }
        cur.expect("=")?;
        let xpos = cur.pos();
        let rows = cur.matrix()?;
        let x = rows_to_matrix(rows, 1, Some(n), xpos)?;
        let h: Subgroup = group
            .subgroup(&ids)
            .map_err(|_| ModelError::from(start.err("listed elements do not form a subgroup")))?;
        summands.push(h);
        images.push(x.row(0).to_vec());
    }
    let domain = PermutationModule::new(group.clone(), summands)?;
    Ok(PresentationMap::new(domain, module.clone(), images)?)
}

/// Presentation-file text for a map, readable by [`parse_presentation`].
pub fn serialize_presentation(phi: &PresentationMap) -> String {
    let mut out = String::new();
    for (h, x) in phi.domain().summands().iter().zip(phi.images()) {
        let ids: Vec<String> = h.elements().iter().map(ToString::to_string).collect();
        let xs: Vec<String> = x.iter().map(ToString::to_string).collect();
        out.push_str(&format!("summand {} ; x = {}\n", ids.join(","), xs.join(" ")));
    }
    out
}
