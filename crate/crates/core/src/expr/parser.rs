use super::{BinOp, Expr, Func, ParseError, Var, MAX_DEPTH};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn err(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    } else {
                        return Err(err(i, "malformed exponent in number"));
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit
                    .parse()
                    .map_err(|_| err(start, format!("malformed number '{lit}'")))?;
                out.push(Token {
                    tok: Tok::Num(value),
                    offset: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(text[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(err(start, format!("unexpected character '{ch}'")));
            }
        };
        out.push(Token { tok, offset: start });
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    nesting: usize,
}

type Node = (Expr, usize);

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn nest<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T, ParseError>) -> Result<T, ParseError> {
        self.nesting += 1;
        if self.nesting > MAX_DEPTH {
            return Err(err(self.offset(), format!("expression nests deeper than {MAX_DEPTH}")));
        }
        let r = f(self);
        self.nesting -= 1;
        r
    }

    fn node(&self, at: usize, expr: Expr, depth: usize) -> Result<Node, ParseError> {
        if depth > MAX_DEPTH {
            Err(err(at, format!("expression nests deeper than {MAX_DEPTH}")))
        } else {
            Ok((expr, depth))
        }
    }

    fn binary(&self, at: usize, op: BinOp, lhs: Node, rhs: Node) -> Result<Node, ParseError> {
        let depth = 1 + lhs.1.max(rhs.1);
        self.node(
            at,
            Expr::Binary {
                op,
                lhs: Box::new(lhs.0),
                rhs: Box::new(rhs.0),
            },
            depth,
        )
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let at = self.offset();
            self.bump();
            let rhs = self.term()?;
            lhs = self.binary(at, op, lhs, rhs)?;
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            let at = self.offset();
            self.bump();
            let rhs = self.unary()?;
            lhs = self.binary(at, op, lhs, rhs)?;
        }
    }

    // unary minus sits above '^' so that -x^2 = -(x^2)
    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            let at = self.offset();
            self.bump();
            let (inner, depth) = self.nest(|p| p.unary())?;
            return self.node(at, Expr::Neg(Box::new(inner)), depth + 1);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            let at = self.offset();
            self.bump();
            let exponent = self.nest(|p| p.unary())?;
            return self.binary(at, BinOp::Pow, base, exponent);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let at = self.offset();
        let Some(token) = self.bump() else {
            return Err(err(at, "unexpected end of input"));
        };
        match token.tok {
            Tok::Num(v) => Ok((Expr::Num(v), 1)),
            Tok::LParen => {
                let inner = self.nest(|p| p.expr())?;
                self.expect_rparen(at)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek() == Some(&Tok::LParen) {
                    let func = Func::from_name(&name)
                        .ok_or_else(|| err(at, format!("unknown function '{name}'")))?;
                    self.bump();
                    let mut args = Vec::new();
                    let mut depth = 0;
                    loop {
                        let (arg, d) = self.nest(|p| p.expr())?;
                        depth = depth.max(d);
                        args.push(arg);
                        if self.peek() == Some(&Tok::Comma) {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect_rparen(at)?;
                    if args.len() != func.arity() {
                        return Err(err(
                            at,
                            format!(
                                "{} takes {} argument(s), got {}",
                                func.name(),
                                func.arity(),
                                args.len()
                            ),
                        ));
                    }
                    self.node(at, Expr::Call { func, args }, depth + 1)
                } else {
                    let var = Var::from_name(&name)
                        .ok_or_else(|| err(at, format!("unknown identifier '{name}'")))?;
                    Ok((Expr::Var(var), 1))
                }
            }
            Tok::RParen => Err(err(at, "unbalanced ')'")),
            other => Err(err(at, format!("unexpected token {}", describe(&other)))),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.bump();
                Ok(())
            }
            Some(other) => Err(err(
                self.offset(),
                format!("expected ')' but found {}", describe(other)),
            )),
            None => Err(err(open, "unbalanced '(': missing ')'")),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
    }
}

pub(super) fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(err(0, "empty expression"));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        nesting: 0,
    };
    let (expr, _) = p.expr()?;
    if p.pos < p.tokens.len() {
        let t = &p.tokens[p.pos];
        let msg = if t.tok == Tok::RParen {
            "unbalanced ')'".to_string()
        } else {
            format!("trailing input starting with {}", describe(&t.tok))
        };
        return Err(err(t.offset, msg));
    }
    Ok(expr)
}
