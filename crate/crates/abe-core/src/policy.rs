//! Policy expressions and the bag-of-bits expansion of integer comparisons.

use std::fmt;

use crate::attribute::{bits_of, check_width, quote, Attribute, MAX_BIT_WIDTH};
use crate::error::AbeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
}

impl CompareOp {
    pub const ALL: [CompareOp; 5] = [CompareOp::Lt, CompareOp::Gt, CompareOp::Le, CompareOp::Ge, CompareOp::Eq];

    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Lt => "<",
            CompareOp::Gt => ">",
            CompareOp::Le => "<=",
            CompareOp::Ge => ">=",
            CompareOp::Eq => "=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CompareOp> {
        CompareOp::ALL.into_iter().find(|op| op.symbol() == s)
    }

    pub fn holds(self, lhs: u64, rhs: u64) -> bool {
        match self {
            CompareOp::Lt => lhs < rhs,
            CompareOp::Gt => lhs > rhs,
            CompareOp::Le => lhs <= rhs,
            CompareOp::Ge => lhs >= rhs,
            CompareOp::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PolicyExpr {
    And(Vec<PolicyExpr>),
    Or(Vec<PolicyExpr>),
    Leaf(Attribute),
    Compare { attr: String, op: CompareOp, value: u32 },
    /// Satisfied by every attribute set.
    True,
    /// Satisfied by no attribute set; cannot be compiled into a tree.
    False,
}

impl PolicyExpr {
    pub fn leaf(s: &str) -> Result<PolicyExpr, AbeError> {
        Attribute::parse(s).map(PolicyExpr::Leaf)
    }

    pub fn and(children: Vec<PolicyExpr>) -> PolicyExpr {
        PolicyExpr::And(children).simplify()
    }

    pub fn or(children: Vec<PolicyExpr>) -> PolicyExpr {
        PolicyExpr::Or(children).simplify()
    }

    /// Flattens nested gates of the same kind, drops duplicate siblings,
    /// folds constants and collapses single-child gates.
    pub fn simplify(self) -> PolicyExpr {
        let (is_and, children) = match self {
            PolicyExpr::And(c) => (true, c),
            PolicyExpr::Or(c) => (false, c),
            other => return other,
        };
        let mut flat: Vec<PolicyExpr> = Vec::with_capacity(children.len());
        for child in children.into_iter().map(PolicyExpr::simplify) {
            match (is_and, child) {
                (true, PolicyExpr::And(inner)) | (false, PolicyExpr::Or(inner)) => {
                    for c in inner {
                        if !flat.contains(&c) {
                            flat.push(c);
                        }
                    }
                }
                (true, PolicyExpr::True) | (false, PolicyExpr::False) => {}
                (true, PolicyExpr::False) => return PolicyExpr::False,
                (false, PolicyExpr::True) => return PolicyExpr::True,
                (_, c) => {
                    if !flat.contains(&c) {
                        flat.push(c);
                    }
                }
            }
        }
        match flat.len() {
            0 if is_and => PolicyExpr::True,
            0 => PolicyExpr::False,
            1 => flat.pop().expect("one child"),
            _ if is_and => PolicyExpr::And(flat),
            _ => PolicyExpr::Or(flat),
        }
    }

    /// Replaces every comparison by its bit-prefix expansion over `width`
    /// bits and simplifies. The result contains no `Compare` nodes.
    pub fn expand(&self, width: u32) -> Result<PolicyExpr, AbeError> {
        let expanded = match self {
            PolicyExpr::And(c) => PolicyExpr::And(c.iter().map(|x| x.expand(width)).collect::<Result<_, _>>()?),
            PolicyExpr::Or(c) => PolicyExpr::Or(c.iter().map(|x| x.expand(width)).collect::<Result<_, _>>()?),
            PolicyExpr::Compare { attr, op, value } => expand_comparison(attr, *op, u64::from(*value), width)?,
            other => other.clone(),
        };
        Ok(expanded.simplify())
    }

    /// Expansion at the fixed timestamp width of 32 bits.
    pub fn normalize(&self) -> Result<PolicyExpr, AbeError> {
        self.expand(MAX_BIT_WIDTH)
    }

    pub fn is_normalized(&self) -> bool {
        match self {
            PolicyExpr::And(c) | PolicyExpr::Or(c) => c.len() >= 2 && c.iter().all(PolicyExpr::is_normalized),
            PolicyExpr::Compare { .. } => false,
            _ => true,
        }
    }

    /// Leaf attributes in left-to-right order, duplicates included.
    pub fn leaves(&self) -> Vec<&Attribute> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Attribute>) {
        match self {
            PolicyExpr::And(c) | PolicyExpr::Or(c) => c.iter().for_each(|x| x.collect_leaves(out)),
            PolicyExpr::Leaf(a) => out.push(a),
            _ => {}
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }
}

/// Bag-of-bits expansion of `attr op value` over `width`-bit integers.
///
/// `GT`: one leaf per zero bit of `value`, holding the prefix above that bit
/// followed by `1`. `LT` is the dual over one bits. `EQ` is the full-width
/// prefix. `GE`/`LE` shift by one, and become `True` at the domain edge.
pub fn expand_comparison(attr: &str, op: CompareOp, value: u64, width: u32) -> Result<PolicyExpr, AbeError> {
    check_width(value, width)?;
    Attribute::plain(attr)?;
    let max = (1u64 << width) - 1;
    let bits = bits_of(value, width);
    let prefix_leaf = |i: usize, last: char| {
        let mut b = bits[..i].to_owned();
        b.push(last);
        Attribute::bit_prefix(attr, &b).map(PolicyExpr::Leaf)
    };
    let expr = match op {
        CompareOp::Eq => PolicyExpr::Leaf(Attribute::bit_prefix(attr, &bits)?),
        CompareOp::Gt => PolicyExpr::Or(
            bits.char_indices()
                .filter(|(_, c)| *c == '0')
                .map(|(i, _)| prefix_leaf(i, '1'))
                .collect::<Result<_, _>>()?,
        ),
        CompareOp::Lt => PolicyExpr::Or(
            bits.char_indices()
                .filter(|(_, c)| *c == '1')
                .map(|(i, _)| prefix_leaf(i, '0'))
                .collect::<Result<_, _>>()?,
        ),
        CompareOp::Ge if value == 0 => PolicyExpr::True,
        CompareOp::Ge => return expand_comparison(attr, CompareOp::Gt, value - 1, width),
        CompareOp::Le if value == max => PolicyExpr::True,
        CompareOp::Le => return expand_comparison(attr, CompareOp::Lt, value + 1, width),
    };
    Ok(expr.simplify())
}

/// Canonical text: single spaces, quoted attributes, nested gates always
/// parenthesized. Parsing the output yields the same expression.
impl fmt::Display for PolicyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyExpr::And(c) | PolicyExpr::Or(c) => {
                let sep = if matches!(self, PolicyExpr::And(_)) { " AND " } else { " OR " };
                for (i, child) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    if matches!(child, PolicyExpr::And(_) | PolicyExpr::Or(_)) {
                        write!(f, "({child})")?;
                    } else {
                        write!(f, "{child}")?;
                    }
                }
                Ok(())
            }
            PolicyExpr::Leaf(a) => f.write_str(&quote(a.as_str())),
            PolicyExpr::Compare { attr, op, value } => write!(f, "{} {} {value}", quote(attr), op.symbol()),
            PolicyExpr::True => f.write_str("TRUE"),
            PolicyExpr::False => f.write_str("FALSE"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribute::data_attributes_for;

    fn leaf(s: &str) -> PolicyExpr {
        PolicyExpr::leaf(s).unwrap()
    }

    #[test]
    fn gt_five_over_three_bits() {
        assert_eq!(expand_comparison("x", CompareOp::Gt, 5, 3).unwrap(), leaf("x:pfx:11"));
        assert_eq!(expand_comparison("x", CompareOp::Eq, 5, 3).unwrap(), leaf("x:pfx:101"));
    }

    #[test]
    fn edge_constants() {
        assert_eq!(expand_comparison("x", CompareOp::Ge, 0, 4).unwrap(), PolicyExpr::True);
        assert_eq!(expand_comparison("x", CompareOp::Le, 15, 4).unwrap(), PolicyExpr::True);
        assert_eq!(expand_comparison("x", CompareOp::Gt, 15, 4).unwrap(), PolicyExpr::False);
        assert_eq!(expand_comparison("x", CompareOp::Lt, 0, 4).unwrap(), PolicyExpr::False);
        assert!(expand_comparison("x", CompareOp::Lt, 16, 4).is_err());
    }

    #[test]
    fn gt_leaf_count_is_zero_bits() {
        for x in [0u64, 1, 0x8000_0000, 0xffff_fffe, 1_672_531_200] {
            let e = expand_comparison("ts", CompareOp::Gt, x, 32).unwrap();
            assert_eq!(e.leaf_count() as u32, 32 - x.count_ones(), "{x}");
        }
    }

    #[test]
    fn expansion_selects_satisfying_values() {
        // Independent check: a value satisfies an Or of prefix leaves iff
        // one of its data-side prefixes is listed.
        for op in CompareOp::ALL {
            for x in 0..8 {
                let e = expand_comparison("x", op, x, 3).unwrap();
                for v in 0..8 {
                    let data = data_attributes_for("x", v, 3).unwrap();
                    let sat = match &e {
                        PolicyExpr::True => true,
                        PolicyExpr::False => false,
                        other => other.leaves().iter().any(|a| data.contains(a)),
                    };
                    assert_eq!(sat, op.holds(v, x), "{v} {} {x}", op.symbol());
                }
            }
        }
    }

    #[test]
    fn simplify_rules() {
        let a = leaf("a");
        let b = leaf("b");
        assert_eq!(PolicyExpr::and(vec![a.clone(), a.clone()]), a);
        assert_eq!(
            PolicyExpr::and(vec![a.clone(), PolicyExpr::And(vec![b.clone(), a.clone()])]),
            PolicyExpr::And(vec![a.clone(), b.clone()])
        );
        assert_eq!(PolicyExpr::or(vec![a.clone(), PolicyExpr::True]), PolicyExpr::True);
        assert_eq!(PolicyExpr::and(vec![a.clone(), PolicyExpr::True]), a);
        assert_eq!(PolicyExpr::and(vec![a.clone(), PolicyExpr::False]), PolicyExpr::False);
        assert_eq!(PolicyExpr::or(vec![a.clone(), PolicyExpr::False]), a);
    }

    #[test]
    fn display_is_canonical() {
        let e = PolicyExpr::Or(vec![
            leaf("doctor"),
            PolicyExpr::And(vec![
                leaf("researcher"),
                PolicyExpr::Compare { attr: "start_date".into(), op: CompareOp::Gt, value: 1_672_531_200 },
            ]),
        ]);
        assert_eq!(e.to_string(), r#""doctor" OR ("researcher" AND "start_date" > 1672531200)"#);
    }
}
