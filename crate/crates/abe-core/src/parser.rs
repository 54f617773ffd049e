//! Policy text parser.
//!
//! ```text
//! policy     := or
//! or         := and ("OR" and)*
//! and        := primary ("AND" primary)*
//! primary    := STRING | comparison | "(" policy ")"
//! comparison := (IDENT | STRING) OP (INT | DATE)
//! OP         := ">" | "<" | ">=" | "<=" | "="
//! ```
//!
//! Keywords are case-insensitive. `DATE` is `YYYY-MM-DD` and stands for
//! UTC midnight as a UNIX timestamp. Positions in errors are 1-based
//! character offsets.

use chrono::NaiveDate;

use crate::attribute::Attribute;
use crate::error::AbeError;
use crate::policy::{CompareOp, PolicyExpr};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Str(String),
    Ident(String),
    Int(u64),
    Op(String),
    LParen,
    RParen,
    And,
    Or,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Ident(s) => format!("identifier {s}"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::Op(o) => format!("operator {o}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::And => "AND".into(),
            Tok::Or => "OR".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '/' | ':')
}

fn syntax(position: usize, message: impl Into<String>) -> AbeError {
    AbeError::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, AbeError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        match c {
            '(' => {
                out.push((Tok::LParen, pos));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, pos));
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err(syntax(chars.len() + 1, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => match chars.get(i + 1) {
                            Some(&e @ ('"' | '\\')) => {
                                s.push(e);
                                i += 2;
                            }
                            _ => return Err(syntax(i + 1, "invalid escape")),
                        },
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                out.push((Tok::Str(s), pos));
            }
            '<' | '>' | '=' | '!' | '~' => {
                let start = i;
                while i < chars.len() && matches!(chars[i], '<' | '>' | '=' | '!' | '~') {
                    i += 1;
                }
                out.push((Tok::Op(chars[start..i].iter().collect()), pos));
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '-') {
                    i += 1;
                }
                let lit: String = chars[start..i].iter().collect();
                out.push((Tok::Int(number(&lit, pos)?), pos));
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let tok = if word.eq_ignore_ascii_case("and") {
                    Tok::And
                } else if word.eq_ignore_ascii_case("or") {
                    Tok::Or
                } else {
                    Tok::Ident(word)
                };
                out.push((tok, pos));
            }
            other => return Err(syntax(pos, format!("unexpected character {other:?}"))),
        }
    }
    out.push((Tok::Eof, chars.len() + 1));
    Ok(out)
}

fn number(lit: &str, pos: usize) -> Result<u64, AbeError> {
    if lit.contains('-') {
        let date = NaiveDate::parse_from_str(lit, "%Y-%m-%d")
            .map_err(|_| syntax(pos, format!("invalid date {lit}")))?;
        let ts = date.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc().timestamp();
        return u32::try_from(ts)
            .map(u64::from)
            .map_err(|_| AbeError::IntegerOutOfRange { position: pos });
    }
    match lit.parse::<u64>() {
        Ok(v) if v <= u64::from(u32::MAX) => Ok(v),
        _ => Err(AbeError::IntegerOutOfRange { position: pos }),
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> AbeError {
        syntax(self.pos(), format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn or(&mut self) -> Result<PolicyExpr, AbeError> {
        let mut items = vec![self.and()?];
        while *self.peek() == Tok::Or {
            self.bump();
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 { items.pop().expect("one") } else { PolicyExpr::Or(items) })
    }

    fn and(&mut self) -> Result<PolicyExpr, AbeError> {
        let mut items = vec![self.primary()?];
        while *self.peek() == Tok::And {
            self.bump();
            items.push(self.primary()?);
        }
        Ok(if items.len() == 1 { items.pop().expect("one") } else { PolicyExpr::And(items) })
    }

    fn primary(&mut self) -> Result<PolicyExpr, AbeError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.or()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("')'"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Str(s) => {
                let (_, pos) = self.bump();
                if matches!(self.peek(), Tok::Op(_)) {
                    return self.comparison(s, pos);
                }
                Attribute::parse(&s).map(PolicyExpr::Leaf).map_err(|e| match e {
                    AbeError::InvalidAttribute(_, why) => syntax(pos, format!("invalid attribute: {why}")),
                    other => other,
                })
            }
            Tok::Ident(s) => {
                let (_, pos) = self.bump();
                if !matches!(self.peek(), Tok::Op(_)) {
                    return Err(self.unexpected("comparison operator"));
                }
                self.comparison(s, pos)
            }
            _ => Err(self.unexpected("attribute or '('")),
        }
    }

    fn comparison(&mut self, attr: String, attr_pos: usize) -> Result<PolicyExpr, AbeError> {
        if let Err(AbeError::InvalidAttribute(_, why)) = Attribute::plain(attr.as_str()) {
            return Err(syntax(attr_pos, format!("invalid attribute: {why}")));
        }
        let (Tok::Op(sym), op_pos) = self.bump() else {
            unreachable!("caller checked for an operator")
        };
        let op = CompareOp::from_symbol(&sym).ok_or(AbeError::UnknownOperator {
            position: op_pos,
            op: sym,
        })?;
        match self.peek() {
            Tok::Int(v) => {
                let value = u32::try_from(*v).expect("lexer bounds integers");
                self.bump();
                Ok(PolicyExpr::Compare { attr, op, value })
            }
            _ => Err(self.unexpected("integer")),
        }
    }
}

/// Parses and simplifies a policy. Comparisons are kept; see
/// [`PolicyExpr::normalize`] for their expansion.
pub fn parse_policy(text: &str) -> Result<PolicyExpr, AbeError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let expr = p.or()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("AND, OR or end of input"));
    }
    Ok(expr.simplify())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(s: &str) -> PolicyExpr {
        PolicyExpr::leaf(s).unwrap()
    }

    #[test]
    fn mixed_policy() {
        let got = parse_policy(r#""doctor" OR "trainer" OR ("researcher" AND "start_date" > 1672531200)"#).unwrap();
        let want = PolicyExpr::Or(vec![
            leaf("doctor"),
            leaf("trainer"),
            PolicyExpr::And(vec![
                leaf("researcher"),
                PolicyExpr::Compare { attr: "start_date".into(), op: CompareOp::Gt, value: 1_672_531_200 },
            ]),
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn duplicate_leaves_collapse() {
        assert_eq!(parse_policy(r#""a" AND "a""#).unwrap(), leaf("a"));
    }

    #[test]
    fn dangling_or_reports_end_position() {
        match parse_policy(r#""a" OR"#) {
            Err(AbeError::Syntax { position, .. }) => assert_eq!(position, 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dates_and_bare_identifiers() {
        assert_eq!(
            parse_policy("start_date > 2023-01-01").unwrap(),
            PolicyExpr::Compare { attr: "start_date".into(), op: CompareOp::Gt, value: 1_672_531_200 }
        );
        assert_eq!(
            parse_policy(r#"x <= 7 and "y""#).unwrap(),
            PolicyExpr::And(vec![PolicyExpr::Compare { attr: "x".into(), op: CompareOp::Le, value: 7 }, leaf("y")])
        );
    }

    #[test]
    fn error_kinds() {
        assert_eq!(parse_policy("x != 3"), Err(AbeError::UnknownOperator { position: 3, op: "!=".into() }));
        assert_eq!(parse_policy("x > 4294967296"), Err(AbeError::IntegerOutOfRange { position: 5 }));
        assert!(parse_policy("x > 4294967295").is_ok());
        assert!(matches!(parse_policy("x"), Err(AbeError::Syntax { position: 2, .. })));
        assert!(matches!(parse_policy(r#"("a""#), Err(AbeError::Syntax { position: 5, .. })));
        assert!(matches!(parse_policy(r#""a" "b""#), Err(AbeError::Syntax { position: 5, .. })));
        assert!(matches!(parse_policy(r#""__master__""#), Err(AbeError::Syntax { position: 1, .. })));
        assert!(matches!(parse_policy(""), Err(AbeError::Syntax { position: 1, .. })));
        assert!(matches!(parse_policy("x > 1969-12-31"), Err(AbeError::IntegerOutOfRange { .. })));
    }

    #[test]
    fn display_round_trips() {
        for text in [
            r#""a" AND ("b" OR "c")"#,
            r#""q\"uote" OR "x" >= 3"#,
            r#""/org/mhealth/diabetes/id123/cgm/blood-glucose" AND "home""#,
        ] {
            let p = parse_policy(text).unwrap();
            assert_eq!(p.to_string(), text);
            assert_eq!(parse_policy(&p.to_string()).unwrap(), p);
        }
    }
}
