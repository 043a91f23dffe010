//! Text formats.
//!
//! ```text
//! sum      := term (('+'|'-') term)*
//! term     := [rational '*'] diagram
//! rational := ['-'] digits ['/' digits]
//! diagram  := 'D[' edge (';' edge)* ']' | 'empty'
//! edge     := end '-' end
//! end      := 'leg(' label ')' | vertex '.' slot
//! label    := ident | 'd' ident
//! ```
//!
//! Vertex names are `v` followed by digits; slots are 0, 1, 2 in cyclic
//! order. A label that starts with `d` and has more characters is the dual
//! of the rest, so primal variable names never start with `d`.
//!
//! Skeleton diagrams use `S[strand x: p1,p2; circle y: p3; edges p1-v1.0; ...]`
//! where attachment points are listed in strand order.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::label::{Attach, LegKey, VarLabel};
use crate::linalg::RatMatrix;
use crate::sum::{Caps, LinComb};
use crate::Rational;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Cursor {
            src,
            pos: 0,
            line,
            line_start: 0,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            column: self.src[self.line_start..self.pos].chars().count() + 1,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
            if c == '\n' {
                self.line += 1;
                self.line_start = self.pos;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let r = self.rest();
        let mut chars = r.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_alphabetic() || c == '_' => {}
            _ => return self.err("expected identifier"),
        }
        let end = chars
            .find(|(_, c)| !(c.is_alphanumeric() || *c == '_' || *c == '\''))
            .map_or(r.len(), |(i, _)| i);
        self.pos += end;
        Ok(&r[..end])
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let r = self.rest();
        let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
        if end == 0 {
            return self.err("expected digits");
        }
        self.pos += end;
        Ok(r[..end].parse().expect("digits"))
    }

    fn rational(&mut self) -> Result<Rational> {
        let neg = self.eat("-");
        let n = self.digits()?;
        let d = if self.eat("/") {
            let d = self.digits()?;
            if d.is_zero() {
                return self.err("zero denominator");
            }
            d
        } else {
            BigInt::one()
        };
        let r = Rational::new(n, d);
        Ok(if neg { -r } else { r })
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }
}

fn parse_label(s: &str) -> VarLabel {
    match s.strip_prefix('d') {
        Some(rest) if !rest.is_empty() => VarLabel::dual_of(rest),
        _ => VarLabel::primal(s),
    }
}

/// Ends as parsed: vertex (by name) with slot, or a leg payload.
enum RawEnd<L> {
    Vertex(String, usize),
    Leg(L),
}

fn parse_vertex_end<L>(c: &mut Cursor<'_>) -> Result<RawEnd<L>> {
    let name = c.ident()?;
    if !name.starts_with('v') || name.len() < 2 || !name[1..].chars().all(|x| x.is_ascii_digit()) {
        return c.err(format!("bad vertex name `{name}`"));
    }
    c.expect(".")?;
    let slot = c.digits()?;
    let slot: usize = match slot.try_into() {
        Ok(s) if s < 3 => s,
        _ => return c.err("slot must be 0, 1 or 2"),
    };
    Ok(RawEnd::Vertex(name.to_string(), slot))
}

/// Assembles a diagram from raw edges; `legs` come in order of appearance.
fn assemble<K: LegKey>(c: &Cursor<'_>, edges: Vec<(RawEnd<K>, RawEnd<K>)>) -> Result<Diagram<K>> {
    let mut vnames: HashMap<String, usize> = HashMap::new();
    let mut legs = Vec::new();
    let mut ends = Vec::new();
    let mut index = |e: RawEnd<K>| match e {
        RawEnd::Vertex(n, s) => {
            let k = vnames.len();
            let v = *vnames.entry(n).or_insert(k);
            Err((v, s))
        }
        RawEnd::Leg(k) => {
            legs.push(k);
            Ok(legs.len() - 1)
        }
    };
    for (a, b) in edges {
        ends.push((index(a), index(b)));
    }
    let nv = vnames.len();
    let h = |e: std::result::Result<usize, (usize, usize)>| match e {
        Ok(i) => 3 * nv + i,
        Err((v, s)) => 3 * v + s,
    };
    let n = 3 * nv + legs.len();
    let mut partner = vec![u32::MAX; n];
    for (a, b) in ends {
        let (ha, hb) = (h(a), h(b));
        if ha == hb || partner[ha] != u32::MAX || partner[hb] != u32::MAX {
            return c.err("a vertex slot is used twice");
        }
        partner[ha] = hb as u32;
        partner[hb] = ha as u32;
    }
    if partner.contains(&u32::MAX) {
        return c.err("every vertex needs all three slots connected");
    }
    Diagram::from_parts(nv, legs, partner).or_else(|e| c.err(e.to_string()))
}

fn parse_diagram(c: &mut Cursor<'_>) -> Result<Diagram<VarLabel>> {
    if c.eat("empty") {
        return Ok(Diagram::empty());
    }
    c.expect("D[")?;
    let mut edges = Vec::new();
    loop {
        let a = parse_b_end(c)?;
        c.expect("-")?;
        let b = parse_b_end(c)?;
        edges.push((a, b));
        if c.eat("]") {
            break;
        }
        c.expect(";")?;
    }
    assemble(c, edges)
}

fn parse_b_end(c: &mut Cursor<'_>) -> Result<RawEnd<VarLabel>> {
    if c.eat("leg(") {
        let l = parse_label(c.ident()?);
        c.expect(")")?;
        Ok(RawEnd::Leg(l))
    } else {
        parse_vertex_end(c)
    }
}

fn parse_sum_at(c: &mut Cursor<'_>, caps: Caps) -> Result<LinComb<VarLabel>> {
    let mut s = LinComb::zero(caps);
    let mut first = true;
    loop {
        let mut sign = Rational::one();
        if !first {
            if c.eat("+") {
            } else if c.eat("-") {
                sign = -sign;
            } else {
                break;
            }
        }
        first = false;
        let coeff = match c.peek() {
            Some(ch) if ch.is_ascii_digit() || ch == '-' => {
                let r = c.rational()?;
                c.expect("*")?;
                r
            }
            _ => Rational::one(),
        };
        let d = parse_diagram(c)?;
        s.add_term(&d, sign * coeff);
    }
    Ok(s)
}

/// Parses a whole diagram sum.
pub fn parse_sum(text: &str, caps: Caps) -> Result<LinComb<VarLabel>> {
    let mut c = Cursor::new(text, 1);
    let s = parse_sum_at(&mut c, caps)?;
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    Ok(s)
}

/// Parses a single diagram.
pub fn parse_diagram_text(text: &str) -> Result<Diagram<VarLabel>> {
    let mut c = Cursor::new(text, 1);
    let d = parse_diagram(&mut c)?;
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    Ok(d)
}

fn write_edges<K: LegKey>(out: &mut String, d: &Diagram<K>, mut leg: impl FnMut(&mut String, usize)) {
    let base = 3 * d.num_vertices();
    let mut end = |out: &mut String, h: usize| {
        if h < base {
            let _ = write!(out, "v{}.{}", h / 3 + 1, h % 3);
        } else {
            leg(out, h - base);
        }
    };
    let mut first = true;
    // print each edge from its leg end when it has one
    let order: Vec<usize> = (base..d.num_half_edges()).chain(0..base).collect();
    let mut done = vec![false; d.num_half_edges()];
    for h in order {
        if done[h] {
            continue;
        }
        let p = d.partner(h);
        done[h] = true;
        done[p] = true;
        if !first {
            out.push_str("; ");
        }
        first = false;
        end(out, h);
        out.push('-');
        end(out, p);
    }
}

pub fn print_diagram(d: &Diagram<VarLabel>) -> String {
    if d.is_empty() {
        return "empty".into();
    }
    let mut out = String::from("D[");
    write_edges(&mut out, d, |o, i| {
        let _ = write!(o, "leg({})", d.legs()[i]);
    });
    out.push(']');
    out
}

fn print_lincomb<K>(s: &LinComb<K>, mut pd: impl FnMut(&Diagram<K>) -> String) -> String
where
    K: LegKey,
{
    if s.is_zero() {
        return "0*empty".into();
    }
    let mut out = String::new();
    for (i, (d, c)) in s.terms().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        // a leading sign must belong to a coefficient
        if !a.is_one() || (i == 0 && neg) {
            let _ = write!(out, "{a}*");
        }
        out.push_str(&pd(d));
    }
    out
}

/// Prints a sum in the grammar; the zero sum prints as `0*empty`.
pub fn print_sum(s: &LinComb<VarLabel>) -> String {
    print_lincomb(s, print_diagram)
}

/// Parses a series file: `<rational>\t<diagram>` per line, `#` comments.
pub fn parse_series(text: &str, caps: Caps) -> Result<LinComb<VarLabel>> {
    let mut s = LinComb::zero(caps);
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let tab = body.find('\t').unwrap_or(body.len());
        let mut c = Cursor::new(&body[..tab], i + 1);
        let coeff = c.rational()?;
        if !c.at_end() || tab == body.len() {
            return c.err("expected a tab after the coefficient");
        }
        let mut c = Cursor::new(body, i + 1);
        c.pos = tab + 1;
        let d = parse_diagram(&mut c)?;
        if !c.at_end() {
            return c.err("unexpected trailing input");
        }
        s.add_term(&d, coeff);
    }
    Ok(s)
}

pub fn print_series(s: &LinComb<VarLabel>) -> String {
    let mut out = String::new();
    for (d, c) in s.terms() {
        let _ = writeln!(out, "{c}\t{}", print_diagram(d));
    }
    out
}

/// Parses a covariance file: a line of comma-separated labels, then one
/// row of rationals per label (separated by commas or whitespace).
pub fn parse_covariance(text: &str) -> Result<(Vec<VarLabel>, RatMatrix)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty());
    let Some((ln, header)) = lines.next() else {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty covariance file".into(),
        });
    };
    let mut c = Cursor::new(header, ln);
    let mut labels = Vec::new();
    loop {
        let l = parse_label(c.ident()?);
        if l.is_dual() || labels.contains(&l) {
            return c.err(format!("bad or repeated label `{l}`"));
        }
        labels.push(l);
        if c.at_end() {
            break;
        }
        c.expect(",")?;
    }
    let n = labels.len();
    let mut rows = Vec::new();
    for (ln, line) in lines {
        let mut c = Cursor::new(line, ln);
        let mut row = Vec::new();
        while !c.at_end() {
            row.push(c.rational()?);
            c.eat(",");
        }
        if row.len() != n {
            return c.err(format!("expected {n} entries, found {}", row.len()));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            column: 1,
            message: format!("expected {n} rows, found {}", rows.len()),
        });
    }
    let m = RatMatrix::from_rows(rows)?;
    for i in 0..n {
        for j in 0..i {
            if m[(i, j)] != m[(j, i)] {
                return Err(Error::Parse {
                    line: ln + 1 + i,
                    column: 1,
                    message: format!("matrix is not symmetric at ({}, {})", i + 1, j + 1),
                });
            }
        }
    }
    Ok((labels, m))
}

/// Prints a covariance in the format read by [`parse_covariance`].
pub fn print_covariance(labels: &[VarLabel], m: &RatMatrix) -> String {
    let names: Vec<String> = labels.iter().map(ToString::to_string).collect();
    let mut out = names.join(",");
    out.push('\n');
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| m[(i, j)].to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses a skeleton diagram.
pub fn parse_skeleton(text: &str) -> Result<Diagram<Attach>> {
    let mut c = Cursor::new(text, 1);
    c.expect("S[")?;
    let mut points: HashMap<String, Attach> = HashMap::new();
    loop {
        let closed = if c.eat("strand") {
            false
        } else if c.eat("circle") {
            true
        } else {
            break;
        };
        let name = c.ident()?.to_string();
        c.expect(":")?;
        let mut pos = 0u32;
        while !matches!(c.peek(), Some(';') | Some(']')) {
            if pos > 0 {
                c.expect(",")?;
            }
            let p = c.ident()?.to_string();
            let a = Attach {
                strand: name.as_str().into(),
                closed,
                pos,
            };
            if points.insert(p.clone(), a).is_some() {
                return c.err(format!("point `{p}` listed twice"));
            }
            pos += 1;
        }
        c.expect(";")?;
    }
    let mut edges = Vec::new();
    if c.eat("edges") {
        loop {
            let a = skel_end(&mut c, &points)?;
            c.expect("-")?;
            let b = skel_end(&mut c, &points)?;
            edges.push((a, b));
            if !c.eat(";") {
                break;
            }
        }
    }
    c.expect("]")?;
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    let used: usize = edges
        .iter()
        .map(|(a, b)| matches!(a, RawEnd::Leg(_)) as usize + matches!(b, RawEnd::Leg(_)) as usize)
        .sum();
    if used != points.len() {
        return c.err("every attachment point must be used exactly once");
    }
    assemble(&c, edges)
}

fn skel_end(c: &mut Cursor<'_>, points: &HashMap<String, Attach>) -> Result<RawEnd<Attach>> {
    let save = c.pos;
    let name = c.ident()?;
    if let Some(a) = points.get(name) {
        return Ok(RawEnd::Leg(a.clone()));
    }
    c.pos = save;
    parse_vertex_end(c)
}

pub fn print_skeleton(d: &Diagram<Attach>) -> String {
    let mut strands: Vec<(&str, bool, Vec<usize>)> = Vec::new();
    let mut order: Vec<usize> = (0..d.legs().len()).collect();
    order.sort_by(|&a, &b| d.legs()[a].cmp(&d.legs()[b]));
    let mut names = vec![String::new(); d.legs().len()];
    for (k, &i) in order.iter().enumerate() {
        let a = &d.legs()[i];
        names[i] = format!("p{}", k + 1);
        match strands.last_mut() {
            Some((s, c, v)) if *s == &*a.strand && *c == a.closed => v.push(i),
            _ => strands.push((&a.strand, a.closed, vec![i])),
        }
    }
    let mut out = String::from("S[");
    for (s, closed, pts) in &strands {
        let ps: Vec<&str> = pts.iter().map(|&i| names[i].as_str()).collect();
        let _ = write!(
            out,
            "{} {s}: {}; ",
            if *closed { "circle" } else { "strand" },
            ps.join(",")
        );
    }
    if d.num_half_edges() > 0 {
        out.push_str("edges ");
        write_edges(&mut out, d, |o, i| o.push_str(&names[i]));
    }
    out.push(']');
    out
}

pub fn print_skeleton_sum(s: &LinComb<Attach>) -> String {
    print_lincomb(s, print_skeleton)
}
