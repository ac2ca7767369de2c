use super::ast::{BinOp, Expr};
use super::lexer::{tokenize, Tok};
use super::{ParseError, SourceSpan};

/// Parses `text`. Precedence from low to high: `+ -`, `* /`, unary `-`,
/// `^` (right-associative), call, atom.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: String) -> ParseError {
        ParseError { span: self.span(), message }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", t.describe(), self.peek().describe())))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == &Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == &Tok::Caret {
            self.bump();
            return Ok(Expr::bin(BinOp::Pow, base, self.unary()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        match self.bump() {
            Tok::Num(x) => Ok(Expr::Num(x)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if self.peek() != &Tok::LParen {
                    return Ok(Expr::Sym(name));
                }
                self.bump();
                let args = self.list(&[Tok::Semi, Tok::RParen])?;
                let fields = if self.peek() == &Tok::Semi {
                    self.bump();
                    self.list(&[Tok::RParen])?
                } else {
                    Vec::new()
                };
                self.expect(&Tok::RParen)?;
                Ok(Expr::Call { name, args, fields })
            }
            t => {
                self.pos = start;
                Err(self.error(format!("expected an expression, found {}", t.describe())))
            }
        }
    }

    /// Comma-separated expressions up to (not including) one of `end`.
    fn list(&mut self, end: &[Tok]) -> Result<Vec<Expr>, ParseError> {
        let mut out = Vec::new();
        if end.contains(self.peek()) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.peek() == &Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn num(x: f64) -> Expr {
        Expr::Num(x)
    }

    #[test]
    fn precedence() {
        let e = parse("2+3*4^2").unwrap();
        let want = Expr::bin(
            BinOp::Add,
            num(2.0),
            Expr::bin(BinOp::Mul, num(3.0), Expr::bin(BinOp::Pow, num(4.0), num(2.0))),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn power_is_right_associative_and_binds_tighter_than_minus() {
        assert_eq!(
            parse("-a^b^c").unwrap(),
            Expr::Neg(Box::new(Expr::bin(
                BinOp::Pow,
                Expr::Sym("a".into()),
                Expr::bin(BinOp::Pow, Expr::Sym("b".into()), Expr::Sym("c".into()))
            )))
        );
        assert_eq!(parse("a^-2").unwrap(), Expr::bin(BinOp::Pow, Expr::Sym("a".into()), Expr::Neg(Box::new(num(2.0)))));
    }

    #[test]
    fn call_with_field_selectors() {
        let e = parse("Sjk(1, 2; 1, 2) + S(2)").unwrap();
        let Expr::Bin(BinOp::Add, a, b) = e else { panic!() };
        assert!(matches!(*a, Expr::Call { ref name, ref args, ref fields } if name == "Sjk" && args.len() == 2 && fields.len() == 2));
        assert!(matches!(*b, Expr::Call { ref name, ref fields, .. } if name == "S" && fields.is_empty()));
    }

    #[test]
    fn grammar_exercise() {
        let e = parse("u_x1x2 ^ 2 + S(2)").unwrap();
        let Expr::Bin(BinOp::Add, a, b) = e else { panic!() };
        assert!(matches!(*a, Expr::Bin(BinOp::Pow, ..)));
        assert!(matches!(*b, Expr::Call { .. }));
    }

    #[test]
    fn errors_point_inside_input() {
        for src in ["2 +", "(u", "S(1,", "u )", "3 4", "*"] {
            let err = parse(src).unwrap_err();
            assert!(err.span.start <= src.len() && err.span.end <= src.len(), "{src}: {err}");
        }
        assert_eq!(parse("u + * 2").unwrap_err().span, SourceSpan { start: 4, end: 5 });
        assert_eq!(parse("S(").unwrap_err().span, SourceSpan { start: 2, end: 2 });
    }

    #[test]
    fn corpus_round_trip() {
        for src in [
            "(1 - R(1)) * S(1) - R(2)",
            "R(2) - R(1) * S(1)",
            "a - (b - c) - d / (e * f) / g",
            "(a^b)^c + -(-x)^2 - -3",
            "exp(-u) * log(u_x1^2 + 1e-3)",
            "Sjk(1, 2; 1, 2) / S(2; 2)^0.5",
            "conj(u_t) * u_t + tr(w) + det(theta) + contract(grad, hess, grad)",
            "2 * (x1 + x2) * u1_x2x3 - u_tt + u_x1t",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000).prop_map(|k| Expr::Num(k as f64 / 8.0)),
            prop::sample::select(vec!["u", "u_x1", "x2", "t", "theta"]).prop_map(|s| Expr::Sym(s.into())),
        ];
        leaf.prop_recursive(5, 40, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (
                    prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow]),
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, a, b)| Expr::bin(op, a, b)),
                (prop::collection::vec(inner.clone(), 0..3), prop::collection::vec(inner, 0..2)).prop_map(
                    |(args, fields)| Expr::Call {
                        name: "f".into(),
                        args,
                        fields
                    }
                ),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let printed = e.to_string();
            prop_assert_eq!(parse(&printed).unwrap(), e);
        }
    }
}
