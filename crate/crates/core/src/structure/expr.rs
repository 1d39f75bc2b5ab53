//! Structure expressions: `series(...)`, `parallel(...)`, `koutofn(k; ...)`
//! and integer component leaves.

use std::fmt;

use crate::error::{Error, Result};

/// Bit patterns of the first six state bits inside one 64-state block.
pub(crate) const LOW_BIT_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// A 1-based component id.
    Component(usize),
    Series(Vec<Expr>),
    Parallel(Vec<Expr>),
    KOutOfN { k: usize, children: Vec<Expr> },
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let mut parser = Parser { src: text, pos: 0 };
        let expr = parser.expr()?;
        parser.skip_ws();
        if parser.pos < text.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(expr)
    }

    pub fn series_of(ids: impl IntoIterator<Item = usize>) -> Expr {
        Expr::Series(ids.into_iter().map(Expr::Component).collect())
    }

    pub fn parallel_of(ids: impl IntoIterator<Item = usize>) -> Expr {
        Expr::Parallel(ids.into_iter().map(Expr::Component).collect())
    }

    pub fn k_out_of_n_of(k: usize, ids: impl IntoIterator<Item = usize>) -> Expr {
        Expr::KOutOfN {
            k,
            children: ids.into_iter().map(Expr::Component).collect(),
        }
    }

    /// Every leaf id in left-to-right order, repeats included.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Component(id) => out.push(*id),
            Expr::Series(c) | Expr::Parallel(c) | Expr::KOutOfN { children: c, .. } => {
                c.iter().for_each(|e| e.collect_leaves(out))
            }
        }
    }

    /// Evaluates at a single state; bit `i - 1` of `state` is component `i`.
    pub fn eval(&self, state: u32) -> bool {
        match self {
            Expr::Component(id) => state >> (id - 1) & 1 == 1,
            Expr::Series(c) => c.iter().all(|e| e.eval(state)),
            Expr::Parallel(c) => c.iter().any(|e| e.eval(state)),
            Expr::KOutOfN { k, children } => {
                children.iter().filter(|e| e.eval(state)).count() >= *k
            }
        }
    }

    /// Evaluates all 64 states of block `block` at once (state = 64 * block + bit).
    pub(crate) fn eval_block(&self, block: usize) -> u64 {
        match self {
            Expr::Component(id) => {
                let bit = id - 1;
                if bit < 6 {
                    LOW_BIT_MASKS[bit]
                } else if (block >> (bit - 6)) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                }
            }
            Expr::Series(c) => c.iter().fold(u64::MAX, |acc, e| acc & e.eval_block(block)),
            Expr::Parallel(c) => c.iter().fold(0, |acc, e| acc | e.eval_block(block)),
            Expr::KOutOfN { k, children } => {
                // at_least[c] has a bit set where at least c children so far work
                let mut at_least = vec![0u64; k + 1];
                at_least[0] = u64::MAX;
                for child in children {
                    let w = child.eval_block(block);
                    for c in (1..=*k).rev() {
                        at_least[c] |= at_least[c - 1] & w;
                    }
                }
                at_least[*k]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Expr::Component(id) if *id == 0 => Err(Error::Parse {
                position: 0,
                token: "0".into(),
                message: "component ids start at 1".into(),
            }),
            Expr::Component(_) => Ok(()),
            Expr::Series(c) | Expr::Parallel(c) => c.iter().try_for_each(Expr::validate),
            Expr::KOutOfN { k, children } => {
                if *k == 0 || *k > children.len() {
                    return Err(Error::BadK {
                        k: *k,
                        n: children.len(),
                    });
                }
                children.iter().try_for_each(Expr::validate)
            }
        }
    }

    pub(crate) fn checked(self) -> Result<Expr> {
        self.validate()?;
        Ok(self)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, items: &[Expr]) -> fmt::Result {
            for (idx, e) in items.iter().enumerate() {
                if idx > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            Ok(())
        }
        match self {
            Expr::Component(id) => write!(f, "{id}"),
            Expr::Series(c) => {
                f.write_str("series(")?;
                list(f, c)?;
                f.write_str(")")
            }
            Expr::Parallel(c) => {
                f.write_str("parallel(")?;
                list(f, c)?;
                f.write_str(")")
            }
            Expr::KOutOfN { k, children } => {
                write!(f, "koutofn({k};")?;
                list(f, children)?;
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    /// The lexeme starting at the current position, for diagnostics.
    fn current_token(&self) -> String {
        let rest = &self.src[self.pos..];
        match rest.chars().next() {
            None => "<end of input>".into(),
            Some(c) if c.is_ascii_alphanumeric() => rest
                .chars()
                .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                .collect(),
            Some(c) => c.to_string(),
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            token: self.current_token(),
            message: message.into(),
        }
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected '{ch}'")))
        }
    }

    fn int(&mut self) -> Result<usize> {
        self.skip_ws();
        let digits: &str = {
            let rest = &self.src[self.pos..];
            let len = rest.bytes().take_while(u8::is_ascii_digit).count();
            &rest[..len]
        };
        if digits.is_empty() {
            return Err(self.error("expected an integer"));
        }
        let value = digits
            .parse::<usize>()
            .map_err(|_| self.error("integer out of range"))?;
        self.pos += digits.len();
        Ok(value)
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .bytes()
            .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
            .count();
        let start = self.pos;
        self.pos += len;
        &self.src[start..start + len]
    }

    fn expr(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let id = self.int()?;
                if id == 0 {
                    self.pos = start;
                    return Err(self.error("component ids start at 1"));
                }
                Ok(Expr::Component(id))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident().to_owned();
                match name.as_str() {
                    "series" => {
                        self.expect('(')?;
                        let items = self.list()?;
                        self.expect(')')?;
                        Ok(Expr::Series(items))
                    }
                    "parallel" => {
                        self.expect('(')?;
                        let items = self.list()?;
                        self.expect(')')?;
                        Ok(Expr::Parallel(items))
                    }
                    "koutofn" => {
                        self.expect('(')?;
                        self.skip_ws();
                        let k_pos = self.pos;
                        let k = self.int()?;
                        self.expect(';')?;
                        let children = self.list()?;
                        self.expect(')')?;
                        if k == 0 || k > children.len() {
                            self.pos = k_pos;
                            return Err(self.error(&format!(
                                "k = {k} must lie in 1..={}",
                                children.len()
                            )));
                        }
                        Ok(Expr::KOutOfN { k, children })
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error("unknown gate; expected series, parallel or koutofn"))
                    }
                }
            }
            _ => Err(self.error("expected a component id or a gate")),
        }
    }

    fn list(&mut self) -> Result<Vec<Expr>> {
        let mut items = vec![self.expr()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            items.push(self.expr()?);
        }
        Ok(items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_expression() {
        let e = Expr::parse(" parallel( 1 , series(2,3) ) ").unwrap();
        assert_eq!(
            e,
            Expr::Parallel(vec![Expr::Component(1), Expr::series_of([2, 3])])
        );
        assert_eq!(e.to_string(), "parallel(1,series(2,3))");
    }

    #[test]
    fn parses_k_out_of_n() {
        let e = Expr::parse("koutofn(2;1,2,3)").unwrap();
        assert_eq!(e, Expr::k_out_of_n_of(2, [1, 2, 3]));
        assert!(e.eval(0b101));
        assert!(!e.eval(0b001));
    }

    #[test]
    fn reports_position_and_token() {
        match Expr::parse("series(1,,2)") {
            Err(Error::Parse {
                position, token, ..
            }) => {
                assert_eq!(position, 9);
                assert_eq!(token, ",");
            }
            other => panic!("unexpected {other:?}"),
        }
        match Expr::parse("serie(1)") {
            Err(Error::Parse { position, token, .. }) => {
                assert_eq!(position, 0);
                assert_eq!(token, "serie");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Expr::parse("series(1,2"),
            Err(Error::Parse { token, .. }) if token == "<end of input>"
        ));
        assert!(Expr::parse("series(1,2) x").is_err());
        assert!(Expr::parse("koutofn(4;1,2,3)").is_err());
        assert!(Expr::parse("koutofn(0;1,2,3)").is_err());
        assert!(Expr::parse("0").is_err());
        assert!(Expr::parse("").is_err());
    }

    #[test]
    fn block_evaluation_matches_scalar() {
        let e = Expr::parse("parallel(koutofn(2;1,7,3),series(8,2),5)").unwrap();
        for block in 0..4 {
            let word = e.eval_block(block);
            for bit in 0..64 {
                let state = (block * 64 + bit) as u32;
                assert_eq!(word >> bit & 1 == 1, e.eval(state), "state {state}");
            }
        }
    }
}
