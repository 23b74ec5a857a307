//! The MLMAP and MLCERT text formats.
//!
//! MLMAP v1 is line-oriented and hand-writable. `#` starts a comment.
//!
//! ```text
//! mlmap 1
//! k 2
//! group 1 4          # axis 1 is Z/4 (orders are normalized to
//! group 2 4          # canonical prime-power form at parse time)
//! codomain T         # or: codomain group 4 2
//! entry 1 1 1/4      # generator indices (1-based), then the value
//! ```
//!
//! Unspecified entries are zero. Values are fractions `a/b` for torus
//! codomains and coordinate tuples for group codomains. Multiaffine
//! documents add `term <axes>` headers (comma-separated 1-based axes)
//! before their entry blocks. Entries violating the order-divisibility
//! invariant are rejected at parse time with their line number.
//!
//! MLCERT v1 wraps one `term q=<q> I=<axes>` header plus two embedded
//! MLMAP blocks (introduced by `left` and `right`) per certificate term.

use crate::group::{FinAbGroup, GroupElement};
use crate::map::{mask_axes, MultiAffine, MultiMapG, MultiMapT, TensorShape};
use crate::structure::{CertTerm, RankCertificate};
use crate::torus::{parse_fraction, TorusValue};
use crate::{Error, Result};
use num_traits::Signed;
use std::collections::BTreeMap;

/// A parsed MLMAP document.
#[derive(Debug, Clone)]
pub enum MlmapDocument {
    Linear(MultiMapT),
    GroupValued(MultiMapG),
    Affine(MultiAffine),
}

impl MlmapDocument {
    pub fn domains(&self) -> &[FinAbGroup] {
        match self {
            MlmapDocument::Linear(m) => m.domains(),
            MlmapDocument::GroupValued(m) => m.domains(),
            MlmapDocument::Affine(m) => m.domains(),
        }
    }
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Nonempty lines as (line number, [(column, token)]), comments stripped.
fn tokenize(text: &str) -> Vec<(usize, Vec<(usize, String)>)> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut toks = Vec::new();
        let mut pos = 0usize;
        let bytes = line.as_bytes();
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
                continue;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            toks.push((start + 1, line[start..pos].to_string()));
        }
        if !toks.is_empty() {
            out.push((lineno + 1, toks));
        }
    }
    out
}

fn parse_u64(line: usize, tok: &(usize, String)) -> Result<u64> {
    tok.1.parse::<u64>().map_err(|_| err(line, tok.0, format!("expected an integer, got `{}`", tok.1)))
}

fn parse_usize(line: usize, tok: &(usize, String)) -> Result<usize> {
    tok.1.parse::<usize>().map_err(|_| err(line, tok.0, format!("expected an index, got `{}`", tok.1)))
}

/// Parses an MLMAP document.
pub fn parse_mlmap(text: &str) -> Result<MlmapDocument> {
    let lines = tokenize(text);
    parse_mlmap_lines(&lines)
}

fn parse_mlmap_lines(lines: &[(usize, Vec<(usize, String)>)]) -> Result<MlmapDocument> {
    let mut it = lines.iter().peekable();
    let Some((l0, head)) = it.next() else {
        return Err(err(1, 1, "empty document"));
    };
    if head.len() != 2 || head[0].1 != "mlmap" || head[1].1 != "1" {
        return Err(err(*l0, head[0].0, "expected header `mlmap 1`"));
    }
    let Some((l1, kline)) = it.next() else {
        return Err(err(*l0 + 1, 1, "missing `k <arity>`"));
    };
    if kline.len() != 2 || kline[0].1 != "k" {
        return Err(err(*l1, kline[0].0, "expected `k <arity>`"));
    }
    let k = parse_usize(*l1, &kline[1])?;
    if k == 0 || k > 30 {
        return Err(err(*l1, kline[1].0, "arity must be between 1 and 30"));
    }
    let mut domains = Vec::with_capacity(k);
    for axis in 1..=k {
        let Some((l, g)) = it.next() else {
            return Err(err(*l1, 1, format!("missing `group {axis} ...`")));
        };
        if g[0].1 != "group" {
            return Err(err(*l, g[0].0, format!("expected `group {axis} ...`")));
        }
        let idx = parse_usize(*l, &g[1])?;
        if idx != axis {
            return Err(err(*l, g[1].0, format!("group lines must be in order; expected {axis}")));
        }
        let orders: Vec<u64> =
            g[2..].iter().map(|t| parse_u64(*l, t)).collect::<Result<_>>()?;
        let group = FinAbGroup::new(&orders).map_err(|e| err(*l, g[0].0, e.to_string()))?;
        domains.push(group);
    }
    let Some((lc, cline)) = it.next() else {
        return Err(err(*l1, 1, "missing `codomain` line"));
    };
    if cline[0].1 != "codomain" {
        return Err(err(*lc, cline[0].0, "expected `codomain T` or `codomain group ...`"));
    }
    enum Codomain {
        Torus,
        Group(FinAbGroup),
    }
    let codomain = match cline.get(1).map(|t| t.1.as_str()) {
        Some("T") => Codomain::Torus,
        Some("group") => {
            let orders: Vec<u64> =
                cline[2..].iter().map(|t| parse_u64(*lc, t)).collect::<Result<_>>()?;
            let g = FinAbGroup::new(&orders).map_err(|e| err(*lc, cline[0].0, e.to_string()))?;
            Codomain::Group(g)
        }
        _ => return Err(err(*lc, cline[0].0, "codomain must be `T` or `group <orders>`")),
    };

    // entry and term lines
    struct RawEntry {
        line: usize,
        idx: Vec<usize>,
        value_tokens: Vec<(usize, String)>,
    }
    let mut plain: Vec<RawEntry> = Vec::new();
    let mut by_term: BTreeMap<u32, Vec<RawEntry>> = BTreeMap::new();
    let mut current_term: Option<u32> = None;
    for (l, toks) in it {
        match toks[0].1.as_str() {
            "term" => {
                if !matches!(codomain, Codomain::Torus) {
                    return Err(err(*l, toks[0].0, "terms require a torus codomain"));
                }
                if toks.len() != 2 {
                    return Err(err(*l, toks[0].0, "expected `term <axes>`"));
                }
                let mut mask = 0u32;
                for part in toks[1].1.split(',') {
                    let axis: usize = part
                        .parse()
                        .map_err(|_| err(*l, toks[1].0, format!("bad axis `{part}`")))?;
                    if axis == 0 || axis > k {
                        return Err(err(*l, toks[1].0, format!("axis {axis} out of range")));
                    }
                    let bit = 1u32 << (axis - 1);
                    if mask & bit != 0 {
                        return Err(err(*l, toks[1].0, format!("axis {axis} repeated")));
                    }
                    mask |= bit;
                }
                by_term.entry(mask).or_default();
                current_term = Some(mask);
            }
            "entry" => {
                let arity = match current_term {
                    Some(mask) => mask.count_ones() as usize,
                    None => k,
                };
                if !plain.is_empty() && current_term.is_some() {
                    return Err(err(*l, toks[0].0, "entries must not mix plain and term blocks"));
                }
                if toks.len() < arity + 2 {
                    return Err(err(*l, toks[0].0, "entry is missing indices or value"));
                }
                let idx: Vec<usize> = toks[1..=arity]
                    .iter()
                    .map(|t| parse_usize(*l, t))
                    .collect::<Result<_>>()?;
                let entry = RawEntry {
                    line: *l,
                    idx,
                    value_tokens: toks[arity + 1..].to_vec(),
                };
                match current_term {
                    Some(mask) => by_term.get_mut(&mask).unwrap().push(entry),
                    None => plain.push(entry),
                }
            }
            other => return Err(err(*l, toks[0].0, format!("unknown directive `{other}`"))),
        }
    }

    let build_linear = |domains: &[FinAbGroup], entries: &[RawEntry]| -> Result<MultiMapT> {
        let shape = TensorShape::of(domains);
        let mut tensor = vec![TorusValue::zero(); shape.len()];
        let mut seen = vec![false; shape.len()];
        for e in entries {
            let flat = check_indices(domains, &e.idx, e.line)?;
            if seen[flat] {
                return Err(err(e.line, 1, "duplicate entry"));
            }
            seen[flat] = true;
            if e.value_tokens.len() != 1 {
                return Err(err(e.line, e.value_tokens[0].0, "torus entries take one fraction"));
            }
            let r = parse_fraction(&e.value_tokens[0].1)
                .map_err(|er| err(e.line, e.value_tokens[0].0, er.to_string()))?;
            if r.is_negative() || r >= num_rational::BigRational::from_integer(1.into()) {
                return Err(err(
                    e.line,
                    e.value_tokens[0].0,
                    "torus values must satisfy 0 <= a/b < 1",
                ));
            }
            tensor[flat] = TorusValue::from_ratio(r);
        }
        MultiMapT::new(domains.to_vec(), tensor).map_err(|er| err(entries.first().map(|e| e.line).unwrap_or(1), 1, er.to_string()))
    };

    match codomain {
        Codomain::Torus if by_term.is_empty() => {
            Ok(MlmapDocument::Linear(build_linear(&domains, &plain)?))
        }
        Codomain::Torus => {
            if !plain.is_empty() {
                return Err(err(plain[0].line, 1, "entries must follow a `term` header"));
            }
            let mut terms = BTreeMap::new();
            for (mask, entries) in by_term {
                let sub: Vec<FinAbGroup> =
                    mask_axes(mask).iter().map(|&i| domains[i].clone()).collect();
                let term = build_linear(&sub, &entries)?;
                if !term.is_zero() {
                    terms.insert(mask, term);
                }
            }
            let aff = MultiAffine::new(domains, terms).map_err(|e| err(1, 1, e.to_string()))?;
            Ok(MlmapDocument::Affine(aff))
        }
        Codomain::Group(cod) => {
            let shape = TensorShape::of(&domains);
            let mut tensor = vec![cod.zero(); shape.len()];
            let mut seen = vec![false; shape.len()];
            for e in &plain {
                let flat = check_indices(&domains, &e.idx, e.line)?;
                if seen[flat] {
                    return Err(err(e.line, 1, "duplicate entry"));
                }
                seen[flat] = true;
                if e.value_tokens.len() != cod.rank() {
                    return Err(err(
                        e.line,
                        e.value_tokens.first().map(|t| t.0).unwrap_or(1),
                        format!("group entries take {} coordinates", cod.rank()),
                    ));
                }
                let coords: Vec<u64> = e
                    .value_tokens
                    .iter()
                    .map(|t| parse_u64(e.line, t))
                    .collect::<Result<_>>()?;
                for (c, &f) in coords.iter().zip(cod.factors()) {
                    if *c >= f {
                        return Err(err(e.line, 1, format!("coordinate {c} exceeds order {f}")));
                    }
                }
                tensor[flat] = GroupElement { coords };
            }
            let map = MultiMapG::new(domains, cod, tensor)
                .map_err(|er| err(plain.first().map(|e| e.line).unwrap_or(1), 1, er.to_string()))?;
            Ok(MlmapDocument::GroupValued(map))
        }
    }
}

fn check_indices(domains: &[FinAbGroup], idx: &[usize], line: usize) -> Result<usize> {
    let shape = TensorShape::of(domains);
    let mut zero_based = Vec::with_capacity(idx.len());
    for (axis, (&j, g)) in idx.iter().zip(domains).enumerate() {
        if j == 0 || j > g.rank() {
            return Err(err(
                line,
                1,
                format!("generator index {j} out of range for axis {} (rank {})", axis + 1, g.rank()),
            ));
        }
        zero_based.push(j - 1);
    }
    Ok(shape.flat(&zero_based))
}

/// Canonical text for a document: groups in canonical form, entries in
/// lexicographic order, zero entries omitted, fractions reduced.
pub fn emit_mlmap(doc: &MlmapDocument) -> String {
    let mut out = String::from("mlmap 1\n");
    let domains = doc.domains();
    out.push_str(&format!("k {}\n", domains.len()));
    for (i, g) in domains.iter().enumerate() {
        let orders: Vec<String> = g.factors().iter().map(|f| f.to_string()).collect();
        if orders.is_empty() {
            out.push_str(&format!("group {}\n", i + 1));
        } else {
            out.push_str(&format!("group {} {}\n", i + 1, orders.join(" ")));
        }
    }
    match doc {
        MlmapDocument::Linear(m) => {
            out.push_str("codomain T\n");
            emit_torus_entries(&mut out, m);
        }
        MlmapDocument::Affine(m) => {
            out.push_str("codomain T\n");
            for (&mask, term) in m.terms() {
                if term.is_zero() {
                    continue;
                }
                let axes: Vec<String> =
                    mask_axes(mask).iter().map(|&i| (i + 1).to_string()).collect();
                out.push_str(&format!("term {}\n", axes.join(",")));
                emit_torus_entries(&mut out, term);
            }
        }
        MlmapDocument::GroupValued(m) => {
            let orders: Vec<String> =
                m.codomain().factors().iter().map(|f| f.to_string()).collect();
            if orders.is_empty() {
                out.push_str("codomain group\n");
            } else {
                out.push_str(&format!("codomain group {}\n", orders.join(" ")));
            }
            let shape = m.shape();
            for idx in shape.indices() {
                let entry = m.entry(&idx);
                if m.codomain().is_zero(entry) {
                    continue;
                }
                let indices: Vec<String> = idx.iter().map(|j| (j + 1).to_string()).collect();
                let coords: Vec<String> = entry.coords.iter().map(|c| c.to_string()).collect();
                out.push_str(&format!("entry {} {}\n", indices.join(" "), coords.join(" ")));
            }
        }
    }
    out
}

fn emit_torus_entries(out: &mut String, m: &MultiMapT) {
    let shape = m.shape();
    for idx in shape.indices() {
        let entry = m.entry(&idx);
        if entry.is_zero() {
            continue;
        }
        let indices: Vec<String> = idx.iter().map(|j| (j + 1).to_string()).collect();
        out.push_str(&format!("entry {} {}\n", indices.join(" "), entry));
    }
}

// ---------------------------------------------------------------------------
// MLCERT
// ---------------------------------------------------------------------------

/// Parses an MLCERT document into a certificate (unverified).
pub fn parse_mlcert(text: &str) -> Result<RankCertificate> {
    let lines = tokenize(text);
    let mut it = lines.iter().enumerate().peekable();
    let Some((_, (l0, head))) = it.next() else {
        return Err(err(1, 1, "empty document"));
    };
    if head.len() != 2 || head[0].1 != "mlcert" || head[1].1 != "1" {
        return Err(err(*l0, head[0].0, "expected header `mlcert 1`"));
    }
    let mut terms = Vec::new();
    while let Some((_, (l, toks))) = it.next() {
        if toks[0].1 != "term" {
            return Err(err(*l, toks[0].0, "expected `term q=<q> I=<axes>`"));
        }
        let mut q: Option<u64> = None;
        let mut i_axes: Option<Vec<usize>> = None;
        for t in &toks[1..] {
            if let Some(v) = t.1.strip_prefix("q=") {
                q = Some(v.parse().map_err(|_| err(*l, t.0, "bad q"))?);
            } else if let Some(v) = t.1.strip_prefix("I=") {
                let axes: Vec<usize> = v
                    .split(',')
                    .map(|p| p.parse::<usize>().map_err(|_| err(*l, t.0, "bad axis list")))
                    .collect::<Result<_>>()?;
                if axes.iter().any(|&a| a == 0) {
                    return Err(err(*l, t.0, "axes are 1-based"));
                }
                let mut zero: Vec<usize> = axes.iter().map(|&a| a - 1).collect();
                zero.sort_unstable();
                zero.dedup();
                if zero.len() != axes.len() {
                    return Err(err(*l, t.0, "repeated axis"));
                }
                i_axes = Some(zero);
            } else {
                return Err(err(*l, t.0, format!("unknown field `{}`", t.1)));
            }
        }
        let q = q.ok_or_else(|| err(*l, toks[0].0, "term needs q=<prime power>"))?;
        let i_axes = i_axes.ok_or_else(|| err(*l, toks[0].0, "term needs I=<axes>"))?;
        if crate::group::prime_power_base(q).is_none() {
            return Err(err(*l, toks[0].0, format!("q = {q} is not a prime power")));
        }

        let mut sides = Vec::with_capacity(2);
        for side in ["left", "right"] {
            let Some((_, (ls, s))) = it.next() else {
                return Err(err(*l, 1, format!("missing `{side}` block")));
            };
            if s.len() != 1 || s[0].1 != side {
                return Err(err(*ls, s[0].0, format!("expected `{side}`")));
            }
            let mut block = Vec::new();
            while let Some((_, (lb, toks))) = it.peek() {
                let word = toks[0].1.as_str();
                if word == "term" || word == "right" || word == "left" {
                    break;
                }
                block.push((*lb, toks.clone()));
                it.next();
            }
            let doc = parse_mlmap_lines(&block)?;
            let MlmapDocument::GroupValued(map) = doc else {
                return Err(err(*ls, 1, "certificate factors must be group-valued maps"));
            };
            if map.codomain().factors() != [q] {
                return Err(err(*ls, 1, format!("factor codomain must be Z/{q}")));
            }
            sides.push(map);
        }
        let right = sides.pop().unwrap();
        let left = sides.pop().unwrap();
        if left.arity() != i_axes.len() {
            return Err(err(*l, 1, "left factor arity does not match |I|"));
        }
        terms.push(CertTerm { q, i_axes, left, right });
    }
    Ok(RankCertificate { terms })
}

/// Canonical text for a certificate.
pub fn emit_mlcert(cert: &RankCertificate) -> String {
    let mut out = String::from("mlcert 1\n");
    for term in &cert.terms {
        let axes: Vec<String> = term.i_axes.iter().map(|&a| (a + 1).to_string()).collect();
        out.push_str(&format!("term q={} I={}\n", term.q, axes.join(",")));
        out.push_str("left\n");
        out.push_str(&emit_mlmap(&MlmapDocument::GroupValued(term.left.clone())));
        out.push_str("right\n");
        out.push_str(&emit_mlmap(&MlmapDocument::GroupValued(term.right.clone())));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::m_q;
    use crate::structure::{search_decomposition, verify_certificate};
    use crate::Budget;

    const M2_DOC: &str = "mlmap 1\nk 2\ngroup 1 2\ngroup 2 2\ncodomain T\nentry 1 1 1/2\n";

    #[test]
    fn minimal_roundtrip() {
        let doc = parse_mlmap(M2_DOC).unwrap();
        let MlmapDocument::Linear(map) = &doc else { panic!("linear expected") };
        assert_eq!(*map, m_q(2).unwrap());
        assert_eq!(emit_mlmap(&doc), M2_DOC);
    }

    #[test]
    fn parse_normalizes_groups() {
        let text = "mlmap 1\nk 1\ngroup 1 6\ncodomain T\nentry 2 1/3\n";
        let doc = parse_mlmap(text).unwrap();
        let MlmapDocument::Linear(map) = &doc else { panic!() };
        assert_eq!(map.domains()[0].factors(), &[2, 3]);
        // emit is canonical, parse(emit) is identity
        let emitted = emit_mlmap(&doc);
        assert!(emitted.contains("group 1 2 3"));
        let again = parse_mlmap(&emitted).unwrap();
        assert_eq!(emit_mlmap(&again), emitted);
    }

    #[test]
    fn invariant_violations_are_rejected_with_lines() {
        let text = "mlmap 1\nk 2\ngroup 1 2\ngroup 2 2\ncodomain T\nentry 1 1 1/3\n";
        match parse_mlmap(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_entries_default_to_zero() {
        let text = "mlmap 1\nk 2\ngroup 1 4\ngroup 2 4\ncodomain T\n";
        let doc = parse_mlmap(text).unwrap();
        let MlmapDocument::Linear(map) = &doc else { panic!() };
        assert!(map.is_zero());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(parse_mlmap(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_mlmap("mlmap 2\n"), Err(Error::Parse { line: 1, .. })));
        let bad_index = "mlmap 1\nk 1\ngroup 1 4\ncodomain T\nentry 2 1/4\n";
        assert!(matches!(parse_mlmap(bad_index), Err(Error::Parse { line: 5, .. })));
        let unknown = "mlmap 1\nk 1\ngroup 1 4\ncodomain T\nfoo\n";
        assert!(matches!(parse_mlmap(unknown), Err(Error::Parse { line: 5, .. })));
        let dup = "mlmap 1\nk 1\ngroup 1 4\ncodomain T\nentry 1 1/4\nentry 1 2/4\n";
        assert!(matches!(parse_mlmap(dup), Err(Error::Parse { line: 6, .. })));
    }

    #[test]
    fn group_codomain_documents() {
        let text = "mlmap 1\nk 2\ngroup 1 4\ngroup 2 4\ncodomain group 4\nentry 1 1 2\n";
        let doc = parse_mlmap(text).unwrap();
        let MlmapDocument::GroupValued(map) = &doc else { panic!() };
        assert_eq!(map.codomain().factors(), &[4]);
        assert_eq!(map.entry(&[0, 0]).coords, vec![2]);
        assert_eq!(emit_mlmap(&doc), text);
        // coordinate out of range
        let bad = "mlmap 1\nk 1\ngroup 1 4\ncodomain group 4\nentry 1 5\n";
        assert!(matches!(parse_mlmap(bad), Err(Error::Parse { line: 5, .. })));
    }

    #[test]
    fn affine_documents() {
        let text = "mlmap 1\nk 3\ngroup 1 3\ngroup 2 3\ngroup 3 3\ncodomain T\n\
                    term 1,2\nentry 1 1 1/3\nterm 1,3\nentry 1 1 1/3\nterm 2,3\nentry 1 1 1/3\n";
        let doc = parse_mlmap(text).unwrap();
        let MlmapDocument::Affine(aff) = &doc else { panic!() };
        assert_eq!(aff.degree(), 2);
        assert_eq!(emit_mlmap(&doc), text);
    }

    #[test]
    fn certificate_roundtrip() {
        let phi = m_q(3).unwrap();
        let cert = search_decomposition(&phi, 3, 1, &Budget::default()).unwrap().unwrap();
        let text = emit_mlcert(&cert);
        let parsed = parse_mlcert(&text).unwrap();
        assert!(verify_certificate(&phi, &parsed).unwrap().is_verified());
        assert_eq!(emit_mlcert(&parsed), text);
    }

    #[test]
    fn certificate_parse_errors() {
        assert!(matches!(parse_mlcert("mlcert 2\n"), Err(Error::Parse { .. })));
        let bad_q = "mlcert 1\nterm q=6 I=1\nleft\nmlmap 1\nk 1\ngroup 1 2\ncodomain group 6\nright\nmlmap 1\nk 1\ngroup 1 2\ncodomain group 6\n";
        assert!(matches!(parse_mlcert(bad_q), Err(Error::Parse { .. })));
    }
}
