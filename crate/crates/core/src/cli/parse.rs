//! Parsers for the `--tree`, `--chart` and `--factors` mini-formats.
//!
//! Tree: marking groups joined by `;` (a group may be empty), then edges `j-k`, all separated
//! by whitespace, e.g. `1,2;3,4,5;6,7 0-1 0-2`. A chart adds `t[j-k]=p/q`, `a[i]=p/q|inf` and
//! `b[j-k]=p/q` (the node coordinate on `j`'s line); anything omitted is sampled from the seed.
//!
//! Factors: divisor classes separated by `;`, each a signed sum of `[coef*]symbol` with
//! symbols `psiI`, `D{i,j,..}` (one side of a boundary divisor), `Dmu` and `DmuPsi`.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use crate::divisor::{d_mu_boundary_form, d_mu_psi_form};
use crate::error::{Error, Result};
use crate::family::{random_rational, Coord, LocalChart, MAX_RETRIES};
use crate::intersection::{DivisorExpression, DivisorSymbol};
use crate::strata::{Signature, Split, StableTree};
use crate::{Marks, Rational};

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

/// Whitespace-separated tokens with their byte offsets.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(st)) => {
                out.push((st, &s[st..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(st) = start {
        out.push((st, &s[st..]));
    }
    out
}

fn parse_uint(s: &str, pos: usize) -> Result<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(perr(
            pos,
            format!("expected a nonnegative integer, found {s:?}"),
        ));
    }
    s.parse()
        .map_err(|_| perr(pos, format!("integer {s:?} out of range")))
}

/// `-?digits(/digits)?` with a nonzero denominator.
pub fn parse_rational(s: &str, pos: usize) -> Result<Rational> {
    let (num, den, den_pos) = match s.find('/') {
        Some(k) => (&s[..k], &s[k + 1..], pos + k + 1),
        None => (s, "1", pos),
    };
    let digits = num.strip_prefix('-').unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(perr(pos, format!("expected a rational p/q, found {s:?}")));
    }
    if den.is_empty() || !den.bytes().all(|b| b.is_ascii_digit()) {
        return Err(perr(den_pos, format!("bad denominator {den:?}")));
    }
    let n: BigInt = num.parse().map_err(|_| perr(pos, "bad numerator"))?;
    let d: BigInt = den.parse().map_err(|_| perr(den_pos, "bad denominator"))?;
    if d.is_zero() {
        return Err(perr(den_pos, "zero denominator"));
    }
    Ok(Rational::new(n, d))
}

fn parse_groups(tok: &str, pos: usize, n: usize) -> Result<Vec<Marks>> {
    let mut groups = Vec::new();
    let mut off = 0;
    for group in tok.split(';') {
        let mut m = Marks::EMPTY;
        let mut goff = off;
        if !group.is_empty() {
            for item in group.split(',') {
                let i = parse_uint(item, pos + goff)?;
                if i == 0 || i > n {
                    return Err(perr(pos + goff, format!("marking {i} outside 1..{n}")));
                }
                if m.contains(i) {
                    return Err(perr(pos + goff, format!("marking {i} repeated")));
                }
                m |= Marks::singleton(i);
                goff += item.len() + 1;
            }
        }
        groups.push(m);
        off += group.len() + 1;
    }
    Ok(groups)
}

fn parse_pair(s: &str, pos: usize) -> Result<(usize, usize)> {
    let k = s
        .find('-')
        .ok_or_else(|| perr(pos, format!("expected j-k, found {s:?}")))?;
    Ok((
        parse_uint(&s[..k], pos)?,
        parse_uint(&s[k + 1..], pos + k + 1)?,
    ))
}

/// `name[inner]=value` split into its parts with the offsets of `inner` and `value`.
fn parse_assignment(tok: &str, pos: usize) -> Result<(&str, &str, usize, &str, usize)> {
    let open = tok
        .find('[')
        .ok_or_else(|| perr(pos, format!("unrecognized token {tok:?}")))?;
    let close = tok
        .find(']')
        .ok_or_else(|| perr(pos + open, "missing ']'"))?;
    if close < open || tok.as_bytes().get(close + 1) != Some(&b'=') {
        return Err(perr(pos + close, "expected ']='"));
    }
    Ok((
        &tok[..open],
        &tok[open + 1..close],
        pos + open + 1,
        &tok[close + 2..],
        pos + close + 2,
    ))
}

#[derive(Default)]
struct ChartSpec {
    t: Vec<(usize, (usize, usize), Rational)>,
    a: Vec<(usize, usize, Coord)>,
    b: Vec<(usize, (usize, usize), Rational)>,
}

fn parse_parts(spec: &str, n: usize, allow_chart: bool) -> Result<(StableTree, ChartSpec)> {
    let toks = tokens(spec);
    let Some(&(pos0, first)) = toks.first() else {
        return Err(perr(0, "empty specification"));
    };
    let vertices = parse_groups(first, pos0, n)?;
    let mut edges = Vec::new();
    let mut chart = ChartSpec::default();
    for &(pos, tok) in &toks[1..] {
        if tok.contains('[') {
            if !allow_chart {
                return Err(perr(
                    pos,
                    format!("chart parameter {tok:?} not allowed in a tree"),
                ));
            }
            let (name, inner, ipos, value, vpos) = parse_assignment(tok, pos)?;
            match name {
                "t" => chart
                    .t
                    .push((pos, parse_pair(inner, ipos)?, parse_rational(value, vpos)?)),
                "b" => chart
                    .b
                    .push((pos, parse_pair(inner, ipos)?, parse_rational(value, vpos)?)),
                "a" => {
                    let i = parse_uint(inner, ipos)?;
                    if i == 0 || i > n {
                        return Err(perr(ipos, format!("marking {i} outside 1..{n}")));
                    }
                    let c = if value == "inf" {
                        Coord::Infinity
                    } else {
                        Coord::Finite(parse_rational(value, vpos)?)
                    };
                    chart.a.push((pos, i, c));
                }
                _ => {
                    return Err(perr(
                        pos,
                        format!("unknown parameter {name:?}; expected t, a or b"),
                    ))
                }
            }
        } else {
            let (j, k) = parse_pair(tok, pos)?;
            if j >= vertices.len() || k >= vertices.len() {
                return Err(perr(
                    pos,
                    format!("edge {tok} names a vertex beyond {}", vertices.len() - 1),
                ));
            }
            edges.push((j, k));
        }
    }
    let tree = StableTree::new(n, vertices, edges)?;
    Ok((tree, chart))
}

/// Parse a `--tree` specification for `n` markings. Vertex indices follow the given order.
pub fn parse_tree(spec: &str, n: usize) -> Result<StableTree> {
    parse_parts(spec, n, false).map(|(t, _)| t)
}

/// Parse a `--chart` specification; unspecified parameters and coordinates are drawn from `rng`
/// (parameters nonzero), resampling until the special points on each line are distinct.
pub fn parse_chart<R: Rng>(spec: &str, sig: &Signature, rng: &mut R) -> Result<LocalChart> {
    let (tree, cs) = parse_parts(spec, sig.n(), true)?;
    let ne = tree.num_edges();
    let mut t: Vec<Option<Rational>> = vec![None; ne];
    for (pos, (j, k), v) in cs.t {
        let e = tree
            .edge_index(j, k)
            .map_err(|_| perr(pos, format!("no edge {j}-{k}")))?;
        t[e] = Some(v);
    }
    let mut home: Vec<Option<Coord>> = vec![None; sig.n()];
    for (_, i, c) in cs.a {
        home[i - 1] = Some(c);
    }
    let mut nodes: Vec<(Option<Rational>, Option<Rational>)> = vec![(None, None); ne];
    for (pos, (j, k), v) in cs.b {
        let e = tree
            .edge_index(j, k)
            .map_err(|_| perr(pos, format!("no edge {j}-{k}")))?;
        if tree.edges()[e].0 == j {
            nodes[e].0 = Some(v);
        } else {
            nodes[e].1 = Some(v);
        }
    }
    let t: Vec<Rational> = t
        .into_iter()
        .map(|x| {
            x.unwrap_or_else(|| loop {
                let r = random_rational(rng);
                if !r.is_zero() {
                    break r;
                }
            })
        })
        .collect();
    let mut last = None;
    for _ in 0..MAX_RETRIES {
        let h = home
            .iter()
            .map(|c| {
                c.clone()
                    .unwrap_or_else(|| Coord::Finite(random_rational(rng)))
            })
            .collect();
        let b = nodes
            .iter()
            .map(|(x, y)| {
                (
                    x.clone().unwrap_or_else(|| random_rational(rng)),
                    y.clone().unwrap_or_else(|| random_rational(rng)),
                )
            })
            .collect();
        match LocalChart::new(sig.clone(), tree.clone(), t.clone(), h, b) {
            Ok(c) => return Ok(c),
            Err(e @ Error::InvalidChart(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
        let fully_given = home.iter().all(Option::is_some)
            && nodes.iter().all(|(x, y)| x.is_some() && y.is_some());
        if fully_given {
            break;
        }
    }
    Err(last.unwrap_or(Error::SamplingExhausted(MAX_RETRIES)))
}

struct Scanner<'a> {
    s: &'a [u8],
    pos: usize,
    base: usize,
}

impl Scanner<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn at(&self) -> usize {
        self.base + self.pos
    }

    fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).expect("ascii")
    }
}

fn parse_symbol(sc: &mut Scanner, n: usize, sig: Option<&Signature>) -> Result<DivisorExpression> {
    let pos = sc.at();
    let need_sig = || sig.ok_or_else(|| perr(pos, "Dmu needs --d and --kappa"));
    if sc.eat("psi") {
        let p = sc.at();
        let i = parse_uint(sc.digits(), p)?;
        let sym = DivisorSymbol::Psi(i);
        sym.check(n).map_err(|e| perr(p, e.to_string()))?;
        return Ok(DivisorExpression::symbol(sym));
    }
    if sc.eat("DmuPsi") {
        return Ok(d_mu_psi_form(need_sig()?));
    }
    if sc.eat("Dmu") {
        return Ok(d_mu_boundary_form(need_sig()?));
    }
    if sc.eat("D{") {
        let mut side = Marks::EMPTY;
        loop {
            sc.skip_ws();
            let p = sc.at();
            let i = parse_uint(sc.digits(), p)?;
            if i == 0 || i > n {
                return Err(perr(p, format!("marking {i} outside 1..{n}")));
            }
            side |= Marks::singleton(i);
            if sc.eat(",") {
                continue;
            }
            if sc.eat("}") {
                break;
            }
            return Err(perr(sc.at(), "expected ',' or '}'"));
        }
        let split = Split::new(n, side).map_err(|e| perr(pos, e.to_string()))?;
        return Ok(DivisorExpression::boundary(split));
    }
    Err(perr(pos, "expected psiI, D{..}, Dmu or DmuPsi"))
}

fn parse_factor(
    src: &str,
    base: usize,
    n: usize,
    sig: Option<&Signature>,
) -> Result<DivisorExpression> {
    let mut sc = Scanner {
        s: src.as_bytes(),
        pos: 0,
        base,
    };
    let mut out = DivisorExpression::new();
    if sc.peek().is_none() {
        return Err(perr(base, "empty factor"));
    }
    let mut first = true;
    while sc.peek().is_some() {
        let mut sign = Rational::from_integer(1.into());
        if sc.eat("-") {
            sign = -sign;
        } else if !sc.eat("+") && !first {
            return Err(perr(sc.at(), "expected '+' or '-'"));
        }
        first = false;
        sc.skip_ws();
        let mut coeff = sign;
        if matches!(sc.peek(), Some(b'0'..=b'9')) {
            let p = sc.at();
            let num = sc.digits().to_string();
            let text = if sc.eat("/") {
                let den = sc.digits();
                format!("{num}/{den}")
            } else {
                num
            };
            coeff *= parse_rational(&text, p)?;
            if !sc.eat("*") {
                return Err(perr(sc.at(), "expected '*' after coefficient"));
            }
        }
        let sym = parse_symbol(&mut sc, n, sig)?;
        out = out.add(&sym.scale(&coeff));
    }
    Ok(out)
}

/// Parse a `;`-separated list of divisor classes on `M_0,n`. `Dmu` and `DmuPsi` need `sig`.
pub fn parse_factors(
    spec: &str,
    n: usize,
    sig: Option<&Signature>,
) -> Result<Vec<DivisorExpression>> {
    let mut out = Vec::new();
    let mut off = 0;
    for part in spec.split(';') {
        out.push(parse_factor(part, off, n, sig)?);
        off += part.len() + 1;
    }
    Ok(out)
}
