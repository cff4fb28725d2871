use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::Poly;
use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Parse either the comma form `c0,c1,...,cn` (ascending) or an expression
/// such as `T^3 + 2*T - 1`. Integer coefficients are reduced mod q.
pub fn parse_poly(text: &str, spec: FieldSpec) -> Result<Poly> {
    if text.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    if text.contains(',') {
        parse_comma(text, spec)
    } else {
        Parser { src: text.as_bytes(), pos: 0, spec }.expression()
    }
}

fn reduce_big(digits: &str, spec: FieldSpec) -> u32 {
    let v: BigInt = digits.parse().expect("caller passes ASCII digits");
    let r = ((v % spec.q()) + spec.q()) % spec.q();
    r.to_u32().unwrap()
}

fn parse_comma(text: &str, spec: FieldSpec) -> Result<Poly> {
    let mut coeffs = Vec::new();
    let mut offset = 0;
    for field in text.split(',') {
        let t = field.trim();
        let lead = field.len() - field.trim_start().len();
        let (neg, digits) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim_start()),
            None => (false, t.strip_prefix('+').unwrap_or(t).trim_start()),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Syntax {
                pos: offset + lead,
                msg: format!("expected integer coefficient, found {t:?}"),
            });
        }
        let r = reduce_big(digits, spec);
        coeffs.push(if neg { spec.neg(r) } else { r });
        offset += field.len() + 1;
    }
    Ok(Poly::from_raw(spec, coeffs))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    spec: FieldSpec,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn number(&mut self) -> Option<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn expression(&mut self) -> Result<Poly> {
        let mut coeffs: Vec<u32> = Vec::new();
        let mut first = true;
        loop {
            let neg = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                None if first => return Err(Error::EmptyInput),
                None => break,
                Some(_) if first => false,
                Some(c) => return self.err(format!("expected '+' or '-', found {:?}", c as char)),
            };
            first = false;
            let (c, e) = self.term()?;
            let c = if neg { self.spec.neg(c) } else { c };
            if coeffs.len() <= e {
                coeffs.resize(e + 1, 0);
            }
            coeffs[e] = self.spec.add(coeffs[e], c);
        }
        Ok(Poly::from_raw(self.spec, coeffs))
    }

    /// `k`, `T`, `T^e`, `k*T`, `k*T^e`
    fn term(&mut self) -> Result<(u32, usize)> {
        let spec = self.spec;
        let coeff = match self.number() {
            Some(d) => {
                let c = reduce_big(d, spec);
                if self.peek() != Some(b'*') {
                    return Ok((c, 0));
                }
                self.pos += 1;
                c
            }
            None => 1,
        };
        match self.peek() {
            Some(b'T') => self.pos += 1,
            Some(c) => return self.err(format!("expected coefficient or 'T', found {:?}", c as char)),
            None => return self.err("unexpected end of input"),
        }
        if self.peek() != Some(b'^') {
            return Ok((coeff, 1));
        }
        self.pos += 1;
        let at = {
            self.skip_ws();
            self.pos
        };
        let exp = match self.number() {
            Some(d) => d.parse::<usize>().ok().filter(|&e| e <= 1 << 16),
            None => return self.err("expected exponent after '^'"),
        };
        match exp {
            Some(e) => Ok((coeff, e)),
            None => Err(Error::Syntax { pos: at, msg: "exponent too large".into() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldSpec {
        FieldSpec::new(3).unwrap()
    }

    #[test]
    fn reads_expression_form() {
        let f = parse_poly("T^3+2*T+2", f3()).unwrap();
        assert_eq!(f.coeffs(), &[2, 2, 0, 1]);
        assert!(parse_poly("0", f3()).unwrap().is_zero());
        assert_eq!(parse_poly(" - T + 5 ", f3()).unwrap().coeffs(), &[2, 2]);
        assert_eq!(parse_poly("T+T", f3()).unwrap().coeffs(), &[0, 2]);
        assert_eq!(parse_poly("4*T^0", f3()).unwrap().coeffs(), &[1]);
    }

    #[test]
    fn comma_form_matches_expression_form() {
        let a = parse_poly("1,2,0,1", f3()).unwrap();
        let b = parse_poly("T^3+2*T+1", f3()).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly("-1, 4", f3()).unwrap().coeffs(), &[2, 1]);
        assert!(parse_poly("0,0,0", f3()).unwrap().is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_poly("", f3()), Err(Error::EmptyInput));
        assert_eq!(parse_poly("   ", f3()), Err(Error::EmptyInput));
        assert!(matches!(parse_poly("T^", f3()), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_poly("T+x", f3()), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_poly("2T", f3()), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(parse_poly("1,a", f3()), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_poly("T+", f3()), Err(Error::Syntax { .. })));
    }
}
