//! Lattice-expression language.
//!
//! ```text
//! expr := term ("+" term)*
//! term := atom ("^" INT)? ("(" INT ")")?
//! atom := "U" | "A" INT | "D" INT | "E" INT | "<" SIGNED_INT ">"
//!       | "[" row (";" row)* "]"
//! row  := SIGNED_INT ("," SIGNED_INT)*
//! ```
//!
//! `+` is the orthogonal direct sum, `^n` the n-fold sum and `(k)` rescales
//! the form by `k`. Root lattices are negative definite. A bracketed matrix
//! may also be written in nested form, `[[4,2],[2,4]]`.

use crate::error::{Error, Result};
use crate::lattice::Lattice;

pub fn parse_lattice_expr(text: &str) -> Result<Lattice> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let l = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(l.with_label(text.trim()))
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn uint(&mut self) -> Result<u64> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "integer out of range".into() })
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let start = self.pos;
        let v = self.uint()?;
        let v = i64::try_from(v).map_err(|_| Error::Parse { pos: start, msg: "integer out of range".into() })?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<Lattice> {
        let mut parts = vec![self.term()?];
        while self.eat(b'+') {
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Lattice::direct_sum(&parts) })
    }

    fn term(&mut self) -> Result<Lattice> {
        let mut l = self.atom()?;
        if self.eat(b'^') {
            let at = self.pos;
            let n = self.uint()?;
            if n == 0 {
                return Err(Error::Parse { pos: at, msg: "exponent must be positive".into() });
            }
            let copies = vec![l; n as usize];
            l = Lattice::direct_sum(&copies);
        }
        if self.eat(b'(') {
            let at = self.pos;
            let k = self.int()?;
            if k == 0 {
                return Err(Error::Parse { pos: at, msg: "scale must be nonzero".into() });
            }
            self.expect(b')')?;
            l = l.rescale(k)?;
        }
        Ok(l)
    }

    fn atom(&mut self) -> Result<Lattice> {
        let at = self.pos;
        match self.peek() {
            Some(b'U') => {
                self.pos += 1;
                Ok(Lattice::hyperbolic())
            }
            Some(c @ (b'A' | b'D' | b'E')) => {
                self.pos += 1;
                let n = self.uint()? as usize;
                Lattice::root(c as char, n).map_err(|_| Error::Parse {
                    pos: at,
                    msg: format!("no root lattice {}{}", c as char, n),
                })
            }
            Some(b'<') => {
                self.pos += 1;
                let k = self.int()?;
                self.expect(b'>')?;
                Lattice::diagonal(k)
            }
            Some(b'[') => {
                self.pos += 1;
                let rows = if self.peek() == Some(b'[') { self.nested_rows()? } else { self.flat_rows()? };
                Lattice::new(rows)
            }
            _ => Err(self.err("expected U, A<n>, D<n>, E<n>, <k> or [..]")),
        }
    }

    fn row(&mut self) -> Result<Vec<i64>> {
        let mut r = vec![self.int()?];
        while self.eat(b',') {
            r.push(self.int()?);
        }
        Ok(r)
    }

    fn flat_rows(&mut self) -> Result<Vec<Vec<i64>>> {
        let mut rows = vec![self.row()?];
        while self.eat(b';') {
            rows.push(self.row()?);
        }
        self.expect(b']')?;
        Ok(rows)
    }

    fn nested_rows(&mut self) -> Result<Vec<Vec<i64>>> {
        let mut rows = Vec::new();
        loop {
            self.expect(b'[')?;
            rows.push(self.row()?);
            self.expect(b']')?;
            if !self.eat(b',') {
                break;
            }
        }
        self.expect(b']')?;
        Ok(rows)
    }
}
