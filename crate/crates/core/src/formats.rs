//! Text formats: group and element literals, presentation files (.gp),
//! diagram files (.od), group-ring element files (.gre), and detection
//! input files (.det). Parsing is line oriented with positions reported on
//! errors; printing is canonical so that parse-then-print is idempotent
//! and print-then-parse is the identity.

use crate::abelian::{FinAbGroup, GroupElem};
use crate::decomp::{CosetData, DetectionInput};
use crate::diagram::{ArcSpec, EndPoint, OneOneDiagram, Side};
use crate::fox::{FreeWord, GroupPresentation};
use crate::ring::{Coeff, GroupRingElem};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn at_line(line: usize, msg: impl Into<String>) -> Self {
        ParseError::new(line, 1, msg)
    }
}

// ---------------------------------------------------------------------------
// Group literals: `Z^r x Z/d1 x ... x Z/dk`, `Z`, `0`.

pub fn format_group(g: &FinAbGroup) -> String {
    g.to_string()
}

pub fn parse_group(s: &str) -> Result<FinAbGroup, ParseError> {
    parse_group_at(s, 1)
}

fn parse_group_at(s: &str, line: usize) -> Result<FinAbGroup, ParseError> {
    let s = s.trim();
    if s == "0" {
        return Ok(FinAbGroup::trivial());
    }
    let mut rank = 0usize;
    let mut torsion = Vec::new();
    for part in s.split('x') {
        let part = part.trim();
        if part == "Z" {
            rank += 1;
        } else if let Some(r) = part.strip_prefix("Z^") {
            rank += r
                .trim()
                .parse::<usize>()
                .map_err(|_| ParseError::at_line(line, format!("bad rank: {part}")))?;
        } else if let Some(d) = part.strip_prefix("Z/") {
            torsion.push(
                d.trim()
                    .parse::<u64>()
                    .map_err(|_| ParseError::at_line(line, format!("bad divisor: {part}")))?,
            );
        } else {
            return Err(ParseError::at_line(line, format!("bad group factor: {part}")));
        }
    }
    FinAbGroup::new(rank, torsion)
        .map_err(|e| ParseError::at_line(line, format!("invalid group: {e}")))
}

// ---------------------------------------------------------------------------
// Group element literals: `(a1,...,ar | b1,...,bk)`.

pub fn format_group_elem(g: &GroupElem) -> String {
    g.to_string()
}

pub fn parse_group_elem(group: &FinAbGroup, s: &str) -> Result<GroupElem, ParseError> {
    parse_group_elem_at(group, s, 1)
}

fn parse_group_elem_at(
    group: &FinAbGroup,
    s: &str,
    line: usize,
) -> Result<GroupElem, ParseError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| ParseError::at_line(line, "element literal must be parenthesized"))?;
    let (free_s, tors_s) = match inner.split_once('|') {
        Some((a, b)) => (a, b),
        None => (inner, ""),
    };
    let ints = |txt: &str| -> Result<Vec<i64>, ParseError> {
        txt.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| ParseError::at_line(line, format!("bad integer: {t}")))
            })
            .collect()
    };
    group
        .elem(ints(free_s)?, ints(tors_s)?)
        .map_err(|e| ParseError::at_line(line, format!("element does not fit group: {e}")))
}

// ---------------------------------------------------------------------------
// Group-ring element literals: signed monomial list such as
// `3*t^2*r - 1/2*t^-1`, generators named per the group declaration.

pub fn default_names(group: &FinAbGroup) -> Vec<String> {
    let mut names = Vec::new();
    if group.rank() == 1 {
        names.push("t".to_string());
    } else {
        for i in 1..=group.rank() {
            names.push(format!("t{i}"));
        }
    }
    if group.torsion_divisors().len() == 1 {
        names.push("r".to_string());
    } else {
        for i in 1..=group.torsion_divisors().len() {
            names.push(format!("r{i}"));
        }
    }
    names
}

pub fn format_elem_default(e: &GroupRingElem) -> String {
    format_elem(e, &default_names(e.group()))
}

pub fn format_elem(e: &GroupRingElem, names: &[String]) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let rank = e.group().rank();
    let mut out = String::new();
    for (i, (key, coeff)) in e.terms().enumerate() {
        let neg = coeff.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let abs = coeff.abs();
        let mut factors: Vec<String> = Vec::new();
        for (idx, &stored) in key
            .free_part()
            .iter()
            .chain(key.torsion_part())
            .enumerate()
        {
            if stored == 0 {
                continue;
            }
            let name = &names[idx];
            let is_free = idx < rank;
            if e.is_half() && is_free {
                if stored % 2 == 0 {
                    factors.push(exp_factor(name, stored / 2));
                } else {
                    factors.push(format!("{name}^{stored}/2"));
                }
            } else {
                factors.push(exp_factor(name, stored));
            }
        }
        let coeff_str = if abs.denom().is_one() {
            abs.numer().to_string()
        } else {
            format!("{}/{}", abs.numer(), abs.denom())
        };
        if factors.is_empty() {
            out.push_str(&coeff_str);
        } else if abs.is_one() {
            out.push_str(&factors.join("*"));
        } else {
            out.push_str(&coeff_str);
            out.push('*');
            out.push_str(&factors.join("*"));
        }
    }
    out
}

fn exp_factor(name: &str, e: i64) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{name}^{e}")
    }
}

/// Exponent with denominator 1 or 2, kept as twice the value.
#[derive(Clone, Copy)]
struct HalfExp(i64);

pub fn parse_elem(
    group: &FinAbGroup,
    names: &[String],
    s: &str,
) -> Result<GroupRingElem, ParseError> {
    parse_elem_at(group, names, s, 1)
}

fn parse_elem_at(
    group: &FinAbGroup,
    names: &[String],
    s: &str,
    line: usize,
) -> Result<GroupRingElem, ParseError> {
    let s = s.trim();
    if s == "0" {
        return Ok(GroupRingElem::zero(group));
    }
    if names.len() != group.dim() {
        return Err(ParseError::at_line(line, "wrong number of generator names"));
    }
    // Split into signed terms at top level; a sign inside an exponent
    // follows '^' and stays with its term.
    let mut terms: Vec<(i64, String)> = Vec::new(); // (sign, body)
    let mut sign = 1i64;
    let mut cur = String::new();
    for (idx, ch) in s.char_indices() {
        match ch {
            '+' | '-' => {
                let prev = s[..idx].trim_end().chars().last();
                if prev == Some('^') {
                    cur.push(ch);
                } else if cur.trim().is_empty() {
                    if ch == '-' {
                        sign = -sign;
                    }
                } else {
                    terms.push((sign, cur.trim().to_string()));
                    cur = String::new();
                    sign = if ch == '+' { 1 } else { -1 };
                }
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        terms.push((sign, cur.trim().to_string()));
    }

    let mut collected: Vec<(Vec<HalfExp>, Coeff)> = Vec::new();
    let mut any_half = false;
    for (sign, body) in terms {
        let (coeff, exps) = parse_term(group, names, &body, line)?;
        if exps
            .iter()
            .take(group.rank())
            .any(|e| e.0 % 2 != 0)
        {
            any_half = true;
        }
        collected.push((exps, coeff * Coeff::from_integer(sign)));
    }

    if any_half {
        let terms = collected
            .into_iter()
            .map(|(exps, c)| {
                let free: Vec<i64> = exps[..group.rank()].iter().map(|e| e.0).collect();
                let tors: Vec<i64> = exps[group.rank()..].iter().map(|e| e.0 / 2).collect();
                group
                    .elem(free, tors)
                    .map(|k| (k, c))
                    .map_err(|e| ParseError::at_line(line, e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        GroupRingElem::from_half_terms(group, terms)
            .map_err(|e| ParseError::at_line(line, e.to_string()))
    } else {
        let terms = collected
            .into_iter()
            .map(|(exps, c)| {
                let free: Vec<i64> = exps[..group.rank()].iter().map(|e| e.0 / 2).collect();
                let tors: Vec<i64> = exps[group.rank()..].iter().map(|e| e.0 / 2).collect();
                group
                    .elem(free, tors)
                    .map(|k| (k, c))
                    .map_err(|e| ParseError::at_line(line, e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        GroupRingElem::from_terms(group, terms)
            .map_err(|e| ParseError::at_line(line, e.to_string()))
    }
}

fn parse_term(
    group: &FinAbGroup,
    names: &[String],
    body: &str,
    line: usize,
) -> Result<(Coeff, Vec<HalfExp>), ParseError> {
    let mut coeff = Coeff::one();
    let mut exps = vec![HalfExp(0); group.dim()];
    for factor in body.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(ParseError::at_line(line, "empty factor"));
        }
        if factor.chars().next().unwrap().is_ascii_digit() {
            // Numeric coefficient, possibly a fraction.
            let (num_s, den_s) = match factor.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (factor, "1"),
            };
            let num: i64 = num_s
                .parse()
                .map_err(|_| ParseError::at_line(line, format!("bad coefficient: {factor}")))?;
            let den: i64 = den_s
                .parse()
                .map_err(|_| ParseError::at_line(line, format!("bad coefficient: {factor}")))?;
            if den != 1 && den != 2 {
                return Err(ParseError::at_line(
                    line,
                    format!("coefficient denominator must be 1 or 2: {factor}"),
                ));
            }
            coeff *= Coeff::new(num, den);
        } else {
            let (name, exp2) = parse_power(factor, line)?;
            let Some(idx) = names.iter().position(|n| n == &name) else {
                return Err(ParseError::at_line(line, format!("unknown generator: {name}")));
            };
            if idx >= group.rank() && exp2.0 % 2 != 0 {
                return Err(ParseError::at_line(
                    line,
                    format!("torsion generator {name} cannot carry a half exponent"),
                ));
            }
            exps[idx].0 += exp2.0;
        }
    }
    Ok((coeff, exps))
}

/// Parses `name`, `name^k`, or `name^k/2`; returns twice the exponent.
fn parse_power(factor: &str, line: usize) -> Result<(String, HalfExp), ParseError> {
    match factor.split_once('^') {
        None => Ok((factor.to_string(), HalfExp(2))),
        Some((name, e)) => {
            let e = e.trim();
            let (num_s, is_half) = match e.strip_suffix("/2") {
                Some(n) => (n, true),
                None => (e, false),
            };
            let n: i64 = num_s
                .parse()
                .map_err(|_| ParseError::at_line(line, format!("bad exponent: {factor}")))?;
            Ok((
                name.trim().to_string(),
                HalfExp(if is_half { n } else { 2 * n }),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Presentation files (.gp): `gens:`, `rel:` lines, `meridian:`.

pub fn parse_word(s: &str, names: &[String]) -> Result<FreeWord, ParseError> {
    parse_word_at(s, names, 1)
}

fn parse_word_at(s: &str, names: &[String], line: usize) -> Result<FreeWord, ParseError> {
    let mut letters = Vec::new();
    for tok in s.split_whitespace() {
        if let Some(idx) = names.iter().position(|n| n == tok) {
            letters.push((idx, 1i8));
            continue;
        }
        let lowered = lower_first(tok);
        if let Some(idx) = names.iter().position(|n| n == &lowered) {
            letters.push((idx, -1i8));
            continue;
        }
        return Err(ParseError::at_line(line, format!("unknown letter: {tok}")));
    }
    Ok(FreeWord::new(letters))
}

fn lower_first(tok: &str) -> String {
    let mut chars = tok.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

pub fn format_word(w: &FreeWord, names: &[String]) -> String {
    w.letters()
        .iter()
        .map(|&(g, e)| {
            if e == 1 {
                names[g].clone()
            } else {
                upper_first(&names[g])
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn upper_first(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

pub fn parse_presentation(input: &str) -> Result<GroupPresentation, ParseError> {
    let mut names: Option<Vec<String>> = None;
    let mut relators = Vec::new();
    let mut meridian: Option<FreeWord> = None;
    for (ln, raw) in input.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = strip_comment(raw);
        if trimmed.is_empty() {
            continue;
        }
        let Some((key, rest)) = trimmed.split_once(':') else {
            return Err(ParseError::at_line(line_no, "expected `key: value`"));
        };
        match key.trim() {
            "gens" => {
                let ns: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if ns.is_empty() {
                    return Err(ParseError::at_line(line_no, "no generators"));
                }
                for n in &ns {
                    if !n.chars().next().unwrap().is_lowercase() {
                        return Err(ParseError::at_line(
                            line_no,
                            format!("generator names must start lowercase: {n}"),
                        ));
                    }
                }
                names = Some(ns);
            }
            "rel" => {
                let ns = names
                    .as_ref()
                    .ok_or_else(|| ParseError::at_line(line_no, "gens must come first"))?;
                relators.push(parse_word_at(rest, ns, line_no)?);
            }
            "meridian" => {
                let ns = names
                    .as_ref()
                    .ok_or_else(|| ParseError::at_line(line_no, "gens must come first"))?;
                meridian = Some(parse_word_at(rest, ns, line_no)?);
            }
            other => {
                return Err(ParseError::at_line(line_no, format!("unknown key: {other}")));
            }
        }
    }
    let names = names.ok_or_else(|| ParseError::at_line(1, "missing gens line"))?;
    let meridian = meridian.ok_or_else(|| ParseError::at_line(1, "missing meridian line"))?;
    GroupPresentation::new(names, relators, meridian)
        .map_err(|e| ParseError::at_line(1, e.to_string()))
}

pub fn format_presentation(p: &GroupPresentation) -> String {
    let mut out = format!("gens: {}\n", p.names().join(" "));
    for r in p.relators() {
        out.push_str(&format!("rel: {}\n", format_word(r, p.names())));
    }
    out.push_str(&format!("meridian: {}\n", format_word(p.meridian(), p.names())));
    out
}

fn strip_comment(raw: &str) -> &str {
    match raw.find('#') {
        Some(i) => raw[..i].trim(),
        None => raw.trim(),
    }
}

// ---------------------------------------------------------------------------
// Diagram files (.od).

fn side_of(c: char, line: usize) -> Result<Side, ParseError> {
    match c {
        '+' => Ok(Side::Plus),
        '-' => Ok(Side::Minus),
        other => Err(ParseError::at_line(line, format!("bad side: {other}"))),
    }
}

fn parse_endpoint(tok: &str, line: usize) -> Result<EndPoint, ParseError> {
    let mut chars = tok.chars();
    let side = side_of(
        chars
            .next()
            .ok_or_else(|| ParseError::at_line(line, "empty endpoint"))?,
        line,
    )?;
    let pos: usize = chars
        .as_str()
        .parse()
        .map_err(|_| ParseError::at_line(line, format!("bad endpoint: {tok}")))?;
    Ok(EndPoint { side, pos })
}

pub fn parse_diagram(input: &str) -> Result<OneOneDiagram, ParseError> {
    let mut p: Option<usize> = None;
    let mut arcs = Vec::new();
    let mut z: Option<(usize, Side)> = None;
    let mut w: Option<(usize, Side)> = None;
    for (ln, raw) in input.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = strip_comment(raw);
        if trimmed.is_empty() {
            continue;
        }
        let Some((key, rest)) = trimmed.split_once(':') else {
            return Err(ParseError::at_line(line_no, "expected `key: value`"));
        };
        let rest = rest.trim();
        match key.trim() {
            "p" => {
                p = Some(rest.parse().map_err(|_| {
                    ParseError::at_line(line_no, format!("bad intersection count: {rest}"))
                })?);
            }
            "arc" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 || !toks[2].starts_with("w=") {
                    return Err(ParseError::at_line(
                        line_no,
                        "arc line must be `arc: <start> <end> w=<winding>`",
                    ));
                }
                let start = parse_endpoint(toks[0], line_no)?;
                let end = parse_endpoint(toks[1], line_no)?;
                let winding: i64 = toks[2][2..]
                    .parse()
                    .map_err(|_| ParseError::at_line(line_no, "bad winding"))?;
                arcs.push(ArcSpec {
                    start,
                    end,
                    winding,
                });
            }
            "z" | "w" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 || toks[0] != "gap" {
                    return Err(ParseError::at_line(
                        line_no,
                        "mark line must be `z: gap <index> <side>`",
                    ));
                }
                let gap: usize = toks[1]
                    .parse()
                    .map_err(|_| ParseError::at_line(line_no, "bad gap index"))?;
                let side = side_of(
                    toks[2]
                        .chars()
                        .next()
                        .ok_or_else(|| ParseError::at_line(line_no, "missing side"))?,
                    line_no,
                )?;
                if key.trim() == "z" {
                    z = Some((gap, side));
                } else {
                    w = Some((gap, side));
                }
            }
            other => {
                return Err(ParseError::at_line(line_no, format!("unknown key: {other}")));
            }
        }
    }
    let p = p.ok_or_else(|| ParseError::at_line(1, "missing p line"))?;
    let z = z.ok_or_else(|| ParseError::at_line(1, "missing z line"))?;
    let w = w.ok_or_else(|| ParseError::at_line(1, "missing w line"))?;
    Ok(OneOneDiagram::new(p, arcs, z, w))
}

pub fn format_diagram(d: &OneOneDiagram) -> String {
    let mut out = format!("p: {}\n", d.p);
    for a in &d.arcs {
        out.push_str(&format!(
            "arc: {}{} {}{} w={}\n",
            a.start.side.symbol(),
            a.start.pos,
            a.end.side.symbol(),
            a.end.pos,
            a.winding
        ));
    }
    out.push_str(&format!("z: gap {} {}\n", d.z.0, d.z.1.symbol()));
    out.push_str(&format!("w: gap {} {}\n", d.w.0, d.w.1.symbol()));
    out
}

// ---------------------------------------------------------------------------
// Group-ring element files (.gre).

#[derive(Debug, Clone, PartialEq)]
pub struct GreFile {
    pub group: FinAbGroup,
    pub names: Vec<String>,
    pub elem: GroupRingElem,
    pub meridian: Option<GroupElem>,
    pub dim: Option<u64>,
}

pub fn parse_gre(input: &str) -> Result<GreFile, ParseError> {
    let mut group: Option<FinAbGroup> = None;
    let mut names: Option<Vec<String>> = None;
    let mut elem: Option<GroupRingElem> = None;
    let mut meridian: Option<GroupElem> = None;
    let mut dim: Option<u64> = None;
    for (ln, raw) in input.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = strip_comment(raw);
        if trimmed.is_empty() {
            continue;
        }
        let Some((key, rest)) = trimmed.split_once(':') else {
            return Err(ParseError::at_line(line_no, "expected `key: value`"));
        };
        let rest = rest.trim();
        match key.trim() {
            "group" => group = Some(parse_group_at(rest, line_no)?),
            "gens" => {
                names = Some(rest.split_whitespace().map(str::to_string).collect());
            }
            "elem" => {
                let g = group
                    .as_ref()
                    .ok_or_else(|| ParseError::at_line(line_no, "group must come first"))?;
                let ns = names.clone().unwrap_or_else(|| default_names(g));
                if ns.len() != g.dim() {
                    return Err(ParseError::at_line(line_no, "wrong number of generators"));
                }
                elem = Some(parse_elem_at(g, &ns, rest, line_no)?);
            }
            "meridian" => {
                let g = group
                    .as_ref()
                    .ok_or_else(|| ParseError::at_line(line_no, "group must come first"))?;
                let ns = names.clone().unwrap_or_else(|| default_names(g));
                let e = parse_elem_at(g, &ns, rest, line_no)?;
                let mut terms = e.terms();
                let (key_elem, coeff) = terms
                    .next()
                    .ok_or_else(|| ParseError::at_line(line_no, "meridian must be a monomial"))?;
                if terms.next().is_some() || *coeff != Coeff::one() || e.is_half() {
                    return Err(ParseError::at_line(line_no, "meridian must be a monomial"));
                }
                meridian = Some(key_elem.clone());
            }
            "dim" => {
                dim = Some(rest.parse().map_err(|_| {
                    ParseError::at_line(line_no, format!("bad dimension: {rest}"))
                })?);
            }
            other => {
                return Err(ParseError::at_line(line_no, format!("unknown key: {other}")));
            }
        }
    }
    let group = group.ok_or_else(|| ParseError::at_line(1, "missing group line"))?;
    let names = names.unwrap_or_else(|| default_names(&group));
    let elem = elem.ok_or_else(|| ParseError::at_line(1, "missing elem line"))?;
    Ok(GreFile {
        group,
        names,
        elem,
        meridian,
        dim,
    })
}

pub fn format_gre(f: &GreFile) -> String {
    let mut out = format!("group: {}\n", format_group(&f.group));
    out.push_str(&format!("gens: {}\n", f.names.join(" ")));
    out.push_str(&format!("elem: {}\n", format_elem(&f.elem, &f.names)));
    if let Some(m) = &f.meridian {
        let mono = GroupRingElem::monomial(&f.group, m, Coeff::one())
            .expect("meridian lives in the group");
        out.push_str(&format!("meridian: {}\n", format_elem(&mono, &f.names)));
    }
    if let Some(d) = f.dim {
        out.push_str(&format!("dim: {d}\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// Detection input files (.det).

pub fn parse_det(input: &str) -> Result<DetectionInput, ParseError> {
    let mut group: Option<FinAbGroup> = None;
    let mut names: Option<Vec<String>> = None;
    let mut meridian: Option<GroupElem> = None;
    let mut per_coset: BTreeMap<Vec<i64>, CosetData> = BTreeMap::new();
    let mut current: Option<(Vec<i64>, Option<u64>, Option<GroupRingElem>)> = None;

    let finish =
        |cur: &mut Option<(Vec<i64>, Option<u64>, Option<GroupRingElem>)>,
         per: &mut BTreeMap<Vec<i64>, CosetData>,
         line_no: usize|
         -> Result<(), ParseError> {
            if let Some((key, dim, chi)) = cur.take() {
                let dim =
                    dim.ok_or_else(|| ParseError::at_line(line_no, "coset missing dim"))?;
                let chi =
                    chi.ok_or_else(|| ParseError::at_line(line_no, "coset missing chi"))?;
                per.insert(key, CosetData { dim, chi });
            }
            Ok(())
        };

    for (ln, raw) in input.lines().enumerate() {
        let line_no = ln + 1;
        let trimmed = strip_comment(raw);
        if trimmed.is_empty() {
            continue;
        }
        let Some((key, rest)) = trimmed.split_once(':') else {
            return Err(ParseError::at_line(line_no, "expected `key: value`"));
        };
        let rest = rest.trim();
        match key.trim() {
            "group" => group = Some(parse_group_at(rest, line_no)?),
            "gens" => names = Some(rest.split_whitespace().map(str::to_string).collect()),
            "meridian" => {
                let g = group
                    .as_ref()
                    .ok_or_else(|| ParseError::at_line(line_no, "group must come first"))?;
                meridian = Some(parse_group_elem_at(g, rest, line_no)?);
            }
            "coset" => {
                finish(&mut current, &mut per_coset, line_no)?;
                let inner = rest
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| {
                        ParseError::at_line(line_no, "coset key must be (b1,...,bk)")
                    })?;
                let key: Vec<i64> = inner
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<i64>().map_err(|_| {
                            ParseError::at_line(line_no, format!("bad coset index: {t}"))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                current = Some((key, None, None));
            }
            "dim" => {
                let Some(cur) = current.as_mut() else {
                    return Err(ParseError::at_line(line_no, "dim outside a coset block"));
                };
                cur.1 = Some(rest.parse().map_err(|_| {
                    ParseError::at_line(line_no, format!("bad dimension: {rest}"))
                })?);
            }
            "chi" => {
                let g = group
                    .as_ref()
                    .ok_or_else(|| ParseError::at_line(line_no, "group must come first"))?;
                let ns = names.clone().unwrap_or_else(|| default_names(g));
                let Some(cur) = current.as_mut() else {
                    return Err(ParseError::at_line(line_no, "chi outside a coset block"));
                };
                cur.2 = Some(parse_elem_at(g, &ns, rest, line_no)?);
            }
            other => {
                return Err(ParseError::at_line(line_no, format!("unknown key: {other}")));
            }
        }
    }
    finish(&mut current, &mut per_coset, input.lines().count())?;
    let group = group.ok_or_else(|| ParseError::at_line(1, "missing group line"))?;
    let meridian = meridian.ok_or_else(|| ParseError::at_line(1, "missing meridian line"))?;
    Ok(DetectionInput {
        group,
        meridian,
        per_coset,
    })
}

pub fn format_det(inp: &DetectionInput, names: &[String]) -> String {
    let mut out = format!("group: {}\n", format_group(&inp.group));
    out.push_str(&format!("gens: {}\n", names.join(" ")));
    out.push_str(&format!("meridian: {}\n", format_group_elem(&inp.meridian)));
    for (key, data) in &inp.per_coset {
        out.push_str(&format!(
            "coset: ({})\n",
            key.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
        ));
        out.push_str(&format!("dim: {}\n", data.dim));
        out.push_str(&format!("chi: {}\n", format_elem(&data.chi, names)));
    }
    out
}

impl fmt::Display for GreFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_gre(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_literals_round_trip() {
        for s in ["0", "Z", "Z^2", "Z x Z/5", "Z^3 x Z/2 x Z/4"] {
            let g = parse_group(s).unwrap();
            assert_eq!(format_group(&g), s);
        }
        assert!(parse_group("Z/1").is_err());
        assert!(parse_group("Z/4 x Z/2").is_err());
    }

    #[test]
    fn elem_literals_round_trip() {
        let g = parse_group("Z x Z/5").unwrap();
        let names = default_names(&g);
        for s in [
            "0",
            "1",
            "t",
            "3*t^2*r - 1/2*t^-1",
            "1 + r + t + r*t + r^2*t - r^3*t - r^4*t + r*t^2 + r^2*t^2",
            "t^1/2 + t^-1/2",
            "2*t^3/2 - r^3",
        ] {
            let e = parse_elem(&g, &names, s).unwrap();
            let printed = format_elem(&e, &names);
            let reparsed = parse_elem(&g, &names, &printed).unwrap();
            assert_eq!(e, reparsed, "round trip through `{printed}` from `{s}`");
        }
        // Canonical printing is idempotent.
        let e = parse_elem(&g, &names, "r*t + 1 - t*r^6").unwrap();
        let p1 = format_elem(&e, &names);
        let p2 = format_elem(&parse_elem(&g, &names, &p1).unwrap(), &names);
        assert_eq!(p1, p2);
        // Torsion generators cannot carry half exponents.
        assert!(parse_elem(&g, &names, "r^1/2").is_err());
    }

    #[test]
    fn word_parsing() {
        let names: Vec<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        let w = parse_word("x y x Y X Y", &names).unwrap();
        assert_eq!(format_word(&w, &names), "x y x Y X Y");
        // Unreduced input is reduced on construction.
        let w = parse_word("x X y", &names).unwrap();
        assert_eq!(format_word(&w, &names), "y");
        assert!(parse_word("q", &names).is_err());
    }

    #[test]
    fn presentation_round_trip() {
        let text = "gens: x y\nrel: x y x Y X Y\nmeridian: x\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(format_presentation(&p), text);
    }

    #[test]
    fn diagram_round_trip() {
        let text = "p: 2\narc: -0 +1 w=1\narc: -1 +0 w=0\nz: gap 0 -\nw: gap 1 +\n";
        let d = parse_diagram(text).unwrap();
        assert_eq!(format_diagram(&d), text);
        let reparsed = parse_diagram(&format_diagram(&d)).unwrap();
        assert_eq!(d, reparsed);
    }

    #[test]
    fn gre_round_trip() {
        // Canonical printing puts free generators first within a monomial.
        let text = "group: Z x Z/5\ngens: t r\nelem: 1 + r + t + t*r + t*r^2 - t*r^3 - t*r^4 + t^2*r + t^2*r^2\nmeridian: t\ndim: 9\n";
        let f = parse_gre(text).unwrap();
        assert_eq!(f.dim, Some(9));
        assert_eq!(format_gre(&f), text);
        // The factor order used in hand-written files is accepted too.
        let alt = "group: Z x Z/5\ngens: t r\nelem: 1 + r + t + r*t + r^2*t - r^3*t - r^4*t + r*t^2 + r^2*t^2\nmeridian: t\ndim: 9\n";
        assert_eq!(parse_gre(alt).unwrap().elem, f.elem);
    }

    #[test]
    fn det_round_trip() {
        let text = "group: Z x Z/2\ngens: m s\nmeridian: (1 | 0)\ncoset: (0)\ndim: 1\nchi: 1\ncoset: (1)\ndim: 1\nchi: s\n";
        let inp = parse_det(text).unwrap();
        assert_eq!(inp.per_coset.len(), 2);
        let names: Vec<String> = ["m", "s"].iter().map(|s| s.to_string()).collect();
        assert_eq!(format_det(&inp, &names), text);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_presentation("gens: x\nrel: q\nmeridian: x\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_diagram("p: 1\narc: zz\nz: gap 0 -\nw: gap 0 +\n").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
