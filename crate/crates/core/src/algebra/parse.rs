//! Text grammar for polynomials and truncated series.
//!
//! Terms `c*X^k` joined by `+` (or `-`), whitespace ignored. `c` is a decimal
//! residue, or a bracketed polynomial in `t` for extension fields
//! (`[t+1]*X^2 + [t]*X + 1`). `X^1` may be written `X`; a missing coefficient
//! means 1. Series additionally allow negative exponents (`X^-3`) and a final
//! `O(X^-k)` term marking the first uncertified index.

use super::field::{FieldElement, FieldSpec};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Terms of a parsed expression, exponent to coefficient, plus the optional big-O index.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedTerms {
    pub terms: Vec<(i64, FieldElement)>,
    /// Exponent `e` of a trailing `O(X^e)`.
    pub big_o: Option<i64>,
}

/// Terms as (exponent, coefficient, position), plus the big-O exponent.
type RawExpression<C> = (Vec<(i64, C, usize)>, Option<i64>);

struct Parser {
    toks: Vec<(usize, char)>,
    i: usize,
    end: usize,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        position,
        message: message.into(),
    })
}

impl Parser {
    fn new(s: &str) -> Self {
        let toks: Vec<(usize, char)> = s
            .chars()
            .enumerate()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Parser {
            toks,
            i: 0,
            end: s.chars().count(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.toks.get(self.i).map(|t| t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            err(self.pos(), format!("expected '{c}'"))
        }
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos();
        let mut v: u64 = 0;
        let mut any = false;
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as u64))
                .ok_or(Error::Parse {
                    position: start,
                    message: "number too large".into(),
                })?;
            self.i += 1;
            any = true;
        }
        if any {
            Ok(v)
        } else {
            err(start, "expected a number")
        }
    }

    fn signed_exponent(&mut self) -> Result<i64> {
        let close = if self.eat('(') {
            Some(')')
        } else if self.eat('{') {
            Some('}')
        } else {
            None
        };
        let neg = self.eat('-');
        let n = self.number()? as i64;
        if let Some(c) = close {
            self.expect(c)?;
        }
        Ok(if neg { -n } else { n })
    }

    /// `var [^ exponent]`, after the variable has been seen.
    fn monomial_exponent(&mut self) -> Result<i64> {
        if self.eat('^') {
            self.signed_exponent()
        } else {
            Ok(1)
        }
    }

    /// Generic `term (sign term)*` loop. `coeff` parses a coefficient when one is present.
    fn expression<C: Copy>(
        &mut self,
        var: char,
        allow_big_o: bool,
        mut coeff: impl FnMut(&mut Parser) -> Result<Option<C>>,
        one: C,
        negate: impl Fn(C) -> C,
    ) -> Result<RawExpression<C>> {
        let mut out = Vec::new();
        let mut big_o = None;
        if self.peek().is_none() {
            return err(self.pos(), "empty expression");
        }
        let mut neg = self.eat('-');
        loop {
            let term_pos = self.pos();
            if big_o.is_some() {
                return err(term_pos, "O(...) must be the last term");
            }
            if allow_big_o && self.peek() == Some('O') {
                self.i += 1;
                self.expect('(')?;
                if !self.eat(var) {
                    return err(self.pos(), format!("expected '{var}'"));
                }
                let e = self.monomial_exponent()?;
                self.expect(')')?;
                big_o = Some(e);
            } else {
                let c = coeff(self)?;
                let (c, e) = match c {
                    Some(c) => {
                        let star = self.eat('*');
                        if self.eat(var) {
                            (c, self.monomial_exponent()?)
                        } else if star {
                            return err(self.pos(), format!("expected '{var}' after '*'"));
                        } else {
                            (c, 0)
                        }
                    }
                    None => {
                        if self.eat(var) {
                            (one, self.monomial_exponent()?)
                        } else {
                            return err(term_pos, format!("expected a coefficient or '{var}'"));
                        }
                    }
                };
                out.push((e, if neg { negate(c) } else { c }, term_pos));
            }
            match self.peek() {
                None => break,
                Some('+') => {
                    self.i += 1;
                    neg = false;
                }
                Some('-') => {
                    self.i += 1;
                    neg = true;
                }
                Some(c) => return err(self.pos(), format!("unexpected character '{c}'")),
            }
            if self.peek().is_none() {
                return err(self.pos(), "dangling operator");
            }
        }
        Ok((out, big_o))
    }
}

/// Parses a polynomial over F_p in `var` (decimal coefficients), little-endian residues.
pub fn parse_fp_poly(p: u32, s: &str, var: char) -> Result<Vec<u32>> {
    let mut parser = Parser::new(s);
    let (terms, _) = parse_fp_terms(&mut parser, p, var)?;
    if parser.peek().is_some() {
        return err(parser.pos(), "trailing input");
    }
    Ok(terms)
}

fn parse_fp_terms(parser: &mut Parser, p: u32, var: char) -> Result<(Vec<u32>, usize)> {
    let (terms, _) = parser.expression(
        var,
        false,
        |ps| {
            if ps.peek().is_some_and(|c| c.is_ascii_digit()) {
                Ok(Some((ps.number()? % p as u64) as u32))
            } else {
                Ok(None)
            }
        },
        1u32,
        |c| (p - c) % p,
    )?;
    let mut out: Vec<u32> = Vec::new();
    for (e, c, pos) in terms {
        if e < 0 {
            return err(pos, "negative exponent not allowed here");
        }
        let e = e as usize;
        if e >= 1 << 20 {
            return err(pos, "exponent too large");
        }
        if out.len() <= e {
            out.resize(e + 1, 0);
        }
        out[e] = (out[e] + c) % p;
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    Ok((out, 0))
}

fn field_coefficient(ps: &mut Parser, field: &FieldSpec) -> Result<Option<FieldElement>> {
    match ps.peek() {
        Some(c) if c.is_ascii_digit() => {
            let v = ps.number()?;
            Ok(Some(field.from_int((v % field.characteristic() as u64) as i64)))
        }
        Some('[') => {
            let open = ps.pos();
            ps.i += 1;
            if field.is_prime_field() {
                return err(open, "bracketed coefficients need an extension field");
            }
            // the inner expression stops at ']'
            let mut depth_end = ps.i;
            while depth_end < ps.toks.len() && ps.toks[depth_end].1 != ']' {
                depth_end += 1;
            }
            if depth_end == ps.toks.len() {
                return err(open, "unclosed '['");
            }
            let mut inner = Parser {
                toks: ps.toks[ps.i..depth_end].to_vec(),
                i: 0,
                end: ps.toks[depth_end].0,
            };
            let (digits, _) = parse_fp_terms(&mut inner, field.characteristic(), 't')?;
            ps.i = depth_end + 1;
            Ok(Some(field.from_digits(&digits)?))
        }
        _ => Ok(None),
    }
}

/// Parses terms with possibly negative exponents and an optional `O(X^e)` tail.
pub fn parse_terms(field: &FieldSpec, s: &str) -> Result<ParsedTerms> {
    let mut parser = Parser::new(s);
    let k = field.clone();
    let (raw, big_o) = parser.expression(
        'X',
        true,
        |ps| field_coefficient(ps, field),
        FieldElement::ONE,
        move |c| k.neg(c),
    )?;
    let mut terms: Vec<(i64, FieldElement)> = Vec::new();
    for (e, c, _) in raw {
        match terms.iter_mut().find(|t| t.0 == e) {
            Some(t) => t.1 = field.add(t.1, c),
            None => terms.push((e, c)),
        }
    }
    terms.retain(|t| !t.1.is_zero());
    terms.sort_by_key(|t| std::cmp::Reverse(t.0));
    if let Some(o) = big_o {
        if let Some(&(e, _)) = terms.iter().find(|t| t.0 <= o) {
            return err(0, format!("term X^{e} is not above O(X^{o})"));
        }
    }
    Ok(ParsedTerms { terms, big_o })
}

/// Parses a polynomial in X over the given field.
pub fn parse_poly(field: &FieldSpec, s: &str) -> Result<Poly> {
    let parsed = parse_terms(field, s)?;
    if parsed.big_o.is_some() {
        return err(0, "O(...) is not allowed in a polynomial");
    }
    let top = parsed.terms.first().map_or(0, |t| t.0);
    if let Some(t) = parsed.terms.iter().find(|t| t.0 < 0) {
        return err(0, format!("negative exponent X^{} in a polynomial", t.0));
    }
    if top >= 1 << 20 {
        return err(0, "degree too large");
    }
    let mut coeffs = vec![FieldElement::ZERO; top as usize + 1];
    for (e, c) in parsed.terms {
        coeffs[e as usize] = c;
    }
    Ok(Poly::from_coeffs(field, coeffs))
}

/// Renders `(exponent, coefficient)` pairs, highest exponent first, in the grammar above.
pub fn render_terms(field: &FieldSpec, terms: &[(i64, FieldElement)]) -> String {
    let parts: Vec<String> = terms
        .iter()
        .filter(|t| !t.1.is_zero())
        .map(|&(e, c)| {
            let mono = match e {
                1 => "X".to_string(),
                _ => format!("X^{e}"),
            };
            if e == 0 {
                field.render(c)
            } else if c == FieldElement::ONE {
                mono
            } else {
                format!("{}*{}", field.render(c), mono)
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Two-line diagnostic with a caret under the offending character.
pub fn caret_diagnostic(input: &str, position: usize, message: &str) -> String {
    format!("{input}\n{}^ {message}", " ".repeat(position))
}
