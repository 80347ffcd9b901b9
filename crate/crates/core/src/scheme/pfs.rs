//! Line-oriented scheme file format (PFS v1): parser and canonical serializer.

use super::{FoldingScheme, Meta, Multipolygon, PairingGenerator, Point, Polygon, Rule, RulePiece, SegmentPairing, Singular};
use crate::error::{Error, Result};
use crate::rational::{fmt_rat, parse_rat, Rat};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, column, message: message.into() }
}

fn rational(line: usize, tok: &Token) -> Result<Rat> {
    parse_rat(tok.text).ok_or_else(|| syntax(line, tok.column, format!("expected a rational number, found `{}`", tok.text)))
}

fn index(line: usize, tok: &Token) -> Result<usize> {
    tok.text.parse().map_err(|_| syntax(line, tok.column, format!("expected a non-negative integer, found `{}`", tok.text)))
}

/// Splits off a trailing `on=<p>` option.
fn polygon_option<'a, 'b>(line: usize, toks: &'b [Token<'a>]) -> Result<(usize, &'b [Token<'a>])> {
    if let Some(last) = toks.last() {
        if let Some(v) = last.text.strip_prefix("on=") {
            let p = v.parse().map_err(|_| syntax(line, last.column, format!("bad polygon index `{v}`")))?;
            return Ok((p, &toks[..toks.len() - 1]));
        }
    }
    Ok((0, toks))
}

fn arity(line: usize, toks: &[Token], keyword: &Token, n: usize) -> Result<()> {
    if toks.len() != n {
        let column = toks.get(n).map(|t| t.column).unwrap_or(keyword.column);
        return Err(syntax(line, column, format!("`{}` expects {} fields, found {}", keyword.text, n, toks.len())));
    }
    Ok(())
}

/// Parses PFS v1 text into a checked scheme.
pub fn parse_scheme(text: &str) -> Result<FoldingScheme> {
    let mut polygons: Vec<(usize, usize, Vec<Point>)> = Vec::new();
    let mut pairs = Vec::new();
    let mut rules: Vec<Rule> = Vec::new();
    let mut singular = Vec::new();
    let mut meta = Meta::default();
    for (ln0, raw) in text.lines().enumerate() {
        let line = ln0 + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokenize(content);
        let Some(kw) = toks.first() else { continue };
        let args = &toks[1..];
        match kw.text {
            "polygon" => {
                if args.is_empty() {
                    return Err(syntax(line, kw.column, "`polygon` needs an id"));
                }
                let id = index(line, &args[0])?;
                let coords = &args[1..];
                if coords.len() < 6 || !coords.len().is_multiple_of(2) {
                    return Err(syntax(line, kw.column, "`polygon` needs at least three coordinate pairs"));
                }
                let mut pts = Vec::new();
                for c in coords.chunks(2) {
                    pts.push(Point::new(rational(line, &c[0])?, rational(line, &c[1])?));
                }
                if polygons.iter().any(|(i, _, _)| *i == id) {
                    return Err(syntax(line, args[0].column, format!("duplicate polygon id {id}")));
                }
                polygons.push((id, line, pts));
            }
            "pair" => {
                arity(line, args, kw, 5)?;
                let p = index(line, &args[0])?;
                let v: Vec<Rat> = args[1..].iter().map(|t| rational(line, t)).collect::<Result<_>>()?;
                let pairing = SegmentPairing::new(p, v[0], v[1], v[2], v[3]).map_err(|e| match e {
                    Error::LengthMismatch { a_len, b_len, .. } => Error::LengthMismatch { line: Some(line), a_len, b_len },
                    Error::InvalidScheme(m) => syntax(line, kw.column, m),
                    other => other,
                })?;
                pairs.push(pairing);
            }
            "rule" => {
                let (poly, args) = polygon_option(line, args)?;
                arity(line, args, kw, 6)?;
                let id = index(line, &args[0])?;
                let v: Vec<Rat> = args[1..].iter().map(|t| rational(line, t)).collect::<Result<_>>()?;
                let piece = RulePiece { src_lo: v[0], src_hi: v[1], dst_lo: v[2], dst_hi: v[3] };
                match rules.iter_mut().find(|r| r.id == id) {
                    Some(r) => {
                        if r.sigma != v[4] || r.poly != poly {
                            return Err(syntax(line, kw.column, format!("pieces of rule {id} disagree on contraction or polygon")));
                        }
                        r.pieces.push(piece);
                    }
                    None => {
                        rules.push(Rule { id, poly, sigma: v[4], pieces: vec![piece] });
                    }
                }
            }
            "singular" => {
                let (poly, args) = polygon_option(line, args)?;
                if args.first().map(|t| t.text) == Some("cantor") {
                    arity(line, args, kw, 4)?;
                    singular.push(Singular::Cantor { poly, lo: rational(line, &args[1])?, hi: rational(line, &args[2])?, ratio: rational(line, &args[3])? });
                } else {
                    arity(line, args, kw, 1)?;
                    singular.push(Singular::Point { poly, t: rational(line, &args[0])? });
                }
            }
            "meta" => {
                for a in args {
                    let Some((k, v)) = a.text.split_once('=') else {
                        return Err(syntax(line, a.column, format!("expected key=value, found `{}`", a.text)));
                    };
                    let value = Token { text: v, column: a.column + k.len() + 1 };
                    match k {
                        "name" => meta.name = v.to_string(),
                        "rbar" => meta.rbar = Some(rational(line, &value)?),
                        "hbar" => meta.hbar = Some(rational(line, &value)?),
                        _ => return Err(syntax(line, a.column, format!("unknown meta key `{k}`"))),
                    }
                }
            }
            other => return Err(syntax(line, kw.column, format!("unknown keyword `{other}`"))),
        }
    }
    if polygons.is_empty() {
        return Err(syntax(1, 1, "no polygon declared"));
    }
    polygons.sort_by_key(|(id, _, _)| *id);
    let mut polys = Vec::new();
    for (k, (id, line, pts)) in polygons.into_iter().enumerate() {
        if id != k {
            return Err(syntax(line, 1, format!("polygon ids must be 0..n-1; missing id {k}")));
        }
        polys.push(Polygon::new(id, pts)?);
    }
    let mp = Multipolygon::new(polys)?;
    for r in rules.iter_mut() {
        r.pieces.sort_by_key(|a| a.src_lo);
    }
    FoldingScheme::new(mp, PairingGenerator { base: pairs, rules, singular }, meta)
}

fn suffix(poly: usize) -> String {
    if poly == 0 {
        String::new()
    } else {
        format!(" on={poly}")
    }
}

/// Canonical PFS v1 text: meta, polygons, pairs, rules, singular declarations.
pub fn serialize_scheme(s: &FoldingScheme) -> String {
    let mut out = String::new();
    let m = &s.meta;
    if !m.name.is_empty() || m.rbar.is_some() || m.hbar.is_some() {
        let mut fields = Vec::new();
        if !m.name.is_empty() {
            fields.push(format!("name={}", m.name));
        }
        if let Some(r) = &m.rbar {
            fields.push(format!("rbar={}", fmt_rat(r)));
        }
        if let Some(h) = &m.hbar {
            fields.push(format!("hbar={}", fmt_rat(h)));
        }
        out.push_str(&format!("meta {}\n", fields.join(" ")));
    }
    for (i, p) in s.multipolygon.polygons.iter().enumerate() {
        let coords: Vec<String> = p.vertices.iter().flat_map(|v| [fmt_rat(&v.x), fmt_rat(&v.y)]).collect();
        out.push_str(&format!("polygon {} {}\n", i, coords.join(" ")));
    }
    for p in &s.generator.base {
        out.push_str(&format!("pair {} {} {} {} {}\n", p.poly, fmt_rat(&p.a0), fmt_rat(&p.a1), fmt_rat(&p.b0), fmt_rat(&p.b1)));
    }
    for r in &s.generator.rules {
        for piece in &r.pieces {
            out.push_str(&format!(
                "rule {} {} {} {} {} {}{}\n",
                r.id,
                fmt_rat(&piece.src_lo),
                fmt_rat(&piece.src_hi),
                fmt_rat(&piece.dst_lo),
                fmt_rat(&piece.dst_hi),
                fmt_rat(&r.sigma),
                suffix(r.poly)
            ));
        }
    }
    for sg in &s.generator.singular {
        match sg {
            Singular::Point { poly, t } => out.push_str(&format!("singular {}{}\n", fmt_rat(t), suffix(*poly))),
            Singular::Cantor { poly, lo, hi, ratio } => {
                out.push_str(&format!("singular cantor {} {} {}{}\n", fmt_rat(lo), fmt_rat(hi), fmt_rat(ratio), suffix(*poly)))
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PILLOW: &str = "meta name=pillow\npolygon 0 0 0 1 0 1 1 0 1\npair 0 0 1/2 1/2 1\npair 0 1 3/2 3/2 2\npair 0 2 5/2 5/2 3\npair 0 3 7/2 7/2 4\n";

    #[test]
    fn pillowcase_of_folds_round_trips() {
        let s = parse_scheme(PILLOW).unwrap();
        assert_eq!(s.generator.base.len(), 4);
        assert_eq!(serialize_scheme(&s), PILLOW);
    }

    #[test]
    fn reports_length_mismatch_with_line() {
        let text = "polygon 0 0 0 1 0 1 1 0 1\n# comment\npair 0 0 1/4 1 4/3\n";
        match parse_scheme(text) {
            Err(Error::LengthMismatch { line: Some(3), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reports_syntax_errors_with_position() {
        match parse_scheme("polygon 0 0 0 1 0 1 1 0 1\npair 0 0 x 1 2\n") {
            Err(Error::Syntax { line: 2, column: 10, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_scheme("polygon 0 0 0 1 0 1 1 0 1\nfold 1\n"), Err(Error::Syntax { line: 2, column: 1, .. })));
    }

    #[test]
    fn reports_fullness_violation() {
        let text = "polygon 0 0 0 1 0 1 1 0 1\npair 0 0 1/2 1/2 1\n";
        assert!(matches!(parse_scheme(text), Err(Error::Fullness { .. })));
    }

    #[test]
    fn reports_non_simple_polygon() {
        let text = "polygon 0 0 0 1 1 1 0 0 1\npair 0 0 1 1 2\n";
        assert!(matches!(parse_scheme(text), Err(Error::Polygon { .. })));
    }
}
