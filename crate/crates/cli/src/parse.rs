//! Recursive-descent parser for the function DSL.
//!
//! ```text
//! expr  := "const" rat | "affine" "(" rat "," rat "," expr ")" | "glue" "(" expr "," expr ")"
//!        | "spike" "(" expr "," point "," rat ")" | "stack" "(" seq "," rat ")"
//!        | "sum" "(" expr "," expr ")" | "prod" "(" expr "," expr ")" | "canon" "(" ord "," side ")"
//! seq   := "cycle" "[" expr { "," expr } "]" | "fund" "(" ord "," side [ "," "shrink" ] ")"
//! point := bits "~" bit
//! rat   := int [ "/" posint ]
//! side  := "two" | "left" | "right" | "one" | "limit" | "cont"
//! ```

use bourgain::{Error, FuncExpr, Ordinal, ParseError, Point, Rational, Result, Sidedness};

const EXPR_START: &[&str] = &["const", "affine", "glue", "spike", "stack", "sum", "prod", "canon"];
const SIDES: &[&str] = &["two", "left", "right", "one", "limit", "cont"];

pub fn parse_expr(text: &str) -> Result<FuncExpr> {
    let mut p = Parser { text, pos: 0 };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input", &["end of input"]));
    }
    Ok(f)
}

pub fn parse_point(text: &str) -> Result<Point> {
    let mut p = Parser { text, pos: 0 };
    let x = p.point()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input", &["end of input"]));
    }
    Ok(x)
}

/// Parses `p,eps`.
pub fn parse_pair(text: &str) -> Result<(Rational, Rational)> {
    let mut p = Parser { text, pos: 0 };
    let a = p.rat()?;
    p.expect(",")?;
    let b = p.rat()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input", &["end of input"]));
    }
    Ok((a, b))
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str, expected: &[&str]) -> Error {
        Error::Parse(ParseError::at(self.text, self.pos, msg, expected))
    }

    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{tok}'"), &[tok]))
        }
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(self.rest().len());
        self.pos += len;
        &self.text[start..self.pos]
    }

    /// Re-anchors an error from a sub-parser that saw only `self.text[start..]`.
    fn relocate(&self, start: usize, e: Error) -> Error {
        match e {
            Error::Parse(pe) => {
                let sub = &self.text[start..];
                let line_start: usize = sub.split_inclusive('\n').take(pe.line - 1).map(str::len).sum();
                let col = sub[line_start..].char_indices().nth(pe.col - 1).map_or(sub.len() - line_start, |(i, _)| i);
                let exp: Vec<&str> = pe.expected.iter().map(String::as_str).collect();
                Error::Parse(ParseError::at(self.text, start + line_start + col, pe.message, &exp))
            }
            other => other,
        }
    }

    /// Scans a balanced span up to a top-level `,` or closing bracket.
    fn span(&mut self) -> (usize, String) {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0usize;
        let mut end = self.text.len();
        for (i, c) in self.rest().char_indices() {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' if depth == 0 => {
                    end = start + i;
                    break;
                }
                ')' | ']' => depth -= 1,
                ',' if depth == 0 => {
                    end = start + i;
                    break;
                }
                _ => {}
            }
        }
        self.pos = end;
        (start, self.text[start..end].trim_end().to_string())
    }

    fn rat(&mut self) -> Result<Rational> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.rest().as_bytes();
        let mut i = 0;
        if i < bytes.len() && bytes[i] == b'-' {
            i += 1;
        }
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'/') {
            i += 1;
        }
        if i == 0 || (i == 1 && bytes[0] == b'-') {
            return Err(self.error("expected a rational number", &["integer", "integer/positive integer"]));
        }
        self.pos += i;
        Rational::parse(&self.text[start..self.pos]).map_err(|e| self.relocate(start, e))
    }

    fn ord(&mut self) -> Result<Ordinal> {
        let (start, s) = self.span();
        if s.is_empty() {
            return Err(self.error("expected an ordinal", &["natural number", "w"]));
        }
        Ordinal::parse(&s).map_err(|e| self.relocate(start, e))
    }

    fn side(&mut self) -> Result<Sidedness> {
        let start = self.pos;
        let name = self.ident().to_string();
        Sidedness::parse(&name).ok_or_else(|| {
            self.pos = start;
            self.skip_ws();
            self.error(&format!("unknown side '{name}'"), SIDES)
        })
    }

    fn point(&mut self) -> Result<Point> {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().find(|c: char| c != '0' && c != '1').unwrap_or(self.rest().len());
        self.pos += len;
        let word: Vec<bool> = self.text[start..self.pos].chars().map(|c| c == '1').collect();
        if !self.rest().starts_with('~') {
            return Err(self.error("expected '~' before the tail bit", &["0", "1", "~"]));
        }
        self.pos += 1;
        let tail = match self.rest().chars().next() {
            Some('0') => false,
            Some('1') => true,
            _ => return Err(self.error("expected the tail bit", &["0", "1"])),
        };
        self.pos += 1;
        Ok(Point::new(word, tail))
    }

    fn semantic(&self, start: usize, e: Error) -> Error {
        match e {
            Error::Precondition(m) | Error::Semantic(m) => {
                let pe = ParseError::at(self.text, start, "", &[]);
                Error::Semantic(format!("{}:{}: {m}", pe.line, pe.col))
            }
            other => other,
        }
    }

    fn expr(&mut self) -> Result<FuncExpr> {
        self.skip_ws();
        let start = self.pos;
        let head = self.ident().to_string();
        match head.as_str() {
            "const" => Ok(FuncExpr::Const(self.rat()?)),
            "affine" => {
                self.expect("(")?;
                let a = self.rat()?;
                self.expect(",")?;
                let b = self.rat()?;
                self.expect(",")?;
                let f = self.expr()?;
                self.expect(")")?;
                FuncExpr::affine(a, b, f).map_err(|e| self.semantic(start, e))
            }
            "glue" | "sum" | "prod" => {
                self.expect("(")?;
                let a = self.expr()?;
                self.expect(",")?;
                let b = self.expr()?;
                self.expect(")")?;
                Ok(match head.as_str() {
                    "glue" => FuncExpr::glue(a, b),
                    "sum" => FuncExpr::sum(a, b),
                    _ => FuncExpr::prod(a, b),
                })
            }
            "spike" => {
                self.expect("(")?;
                let f = self.expr()?;
                self.expect(",")?;
                let z = self.point()?;
                self.expect(",")?;
                let v = self.rat()?;
                self.expect(")")?;
                Ok(FuncExpr::spike(f, z, v))
            }
            "stack" => {
                self.expect("(")?;
                self.skip_ws();
                let seq_start = self.pos;
                let kind = self.ident().to_string();
                match kind.as_str() {
                    "cycle" => {
                        self.expect("[")?;
                        let mut items = vec![self.expr()?];
                        while self.eat(",") {
                            items.push(self.expr()?);
                        }
                        self.expect("]")?;
                        self.expect(",")?;
                        let v = self.rat()?;
                        self.expect(")")?;
                        FuncExpr::cycle(items, v).map_err(|e| self.semantic(start, e))
                    }
                    "fund" => {
                        self.expect("(")?;
                        let o = self.ord()?;
                        self.expect(",")?;
                        let side = self.side()?;
                        let shrink = if self.eat(",") {
                            let at = self.pos;
                            if self.ident() != "shrink" {
                                self.pos = at;
                                self.skip_ws();
                                return Err(self.error("expected 'shrink'", &["shrink"]));
                            }
                            true
                        } else {
                            false
                        };
                        self.expect(")")?;
                        self.expect(",")?;
                        let v = self.rat()?;
                        self.expect(")")?;
                        FuncExpr::fund(o, side, shrink, v).map_err(|e| self.semantic(start, e))
                    }
                    _ => {
                        self.pos = seq_start;
                        Err(self.error("expected a stack sequence", &["cycle", "fund"]))
                    }
                }
            }
            "canon" => {
                self.expect("(")?;
                let o = self.ord()?;
                self.expect(",")?;
                let side = self.side()?;
                self.expect(")")?;
                FuncExpr::canon(o, side).map_err(|e| self.semantic(start, e))
            }
            _ => {
                self.pos = start;
                Err(self.error("expected an expression", EXPR_START))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bourgain::funcalc::one_sided_example;

    #[test]
    fn examples() {
        let f = parse_expr("spike(const 1, ~0, 0)").unwrap();
        assert_eq!(f, FuncExpr::spike(FuncExpr::constant(1), Point::constant(false), 0));
        let g = parse_expr("glue(spike(const 1, ~1, 0), spike(const -1, ~0, 0))").unwrap();
        assert_eq!(g, one_sided_example());
        let h = parse_expr("canon(w+1, left)").unwrap();
        assert_eq!(h, FuncExpr::Canon(Ordinal::parse("w+1").unwrap(), Sidedness::Left));
        let s = parse_expr("stack(fund(w^2, right, shrink), 0)").unwrap();
        assert_eq!(parse_expr(&s.to_string()).unwrap(), s);
        assert_eq!(parse_pair("1/2, 1/4").unwrap(), (Rational::new(1, 2), Rational::new(1, 4)));
    }

    #[test]
    fn errors_carry_positions() {
        let Err(Error::Parse(e)) = parse_expr("glue(const 1,\n  const x)") else { panic!() };
        assert_eq!((e.line, e.col), (2, 9));
        let Err(Error::Parse(e)) = parse_expr("blob(1)") else { panic!() };
        assert_eq!((e.line, e.col), (1, 1));
        assert!(e.expected.contains(&"glue".to_string()));
        let Err(Error::Parse(e)) = parse_expr("canon(w+, two)") else { panic!() };
        assert_eq!(e.line, 1);
        assert!(e.col > 7);
        assert!(matches!(parse_expr("affine(0, 1, const 2)"), Err(Error::Semantic(_))));
        assert!(matches!(parse_expr("canon(3, limit)"), Err(Error::Semantic(_))));
        let Err(Error::Parse(e)) = parse_expr("canon(3, up)") else { panic!() };
        assert_eq!(e.col, 10);
    }
}
