//! A SMARTS subset for atom typing: bracket atoms with `#n`, element
//! symbols (upper case aliphatic, lower case aromatic), `A`, `a`, `*`,
//! `H<n>` (total H), `X<n>` (total degree), charges, `!`, `&`/implicit
//! and, `,` and `;`; bonds `- = # : ~`; branches. No ring closures or
//! recursive SMARTS. An unwritten bond means single or aromatic.

use thiserror::Error;

use super::perception::Perceived;
use crate::elements::Element;
use crate::structio::BondOrder;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("pattern '{pattern}': {reason} at offset {offset}")]
pub struct SmartsError {
    pub pattern: String,
    pub offset: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Prim {
    Any,
    Number(u8),
    Aliphatic(u8),
    Aromatic(u8),
    AnyAliphatic,
    AnyAromatic,
    HCount(u8),
    Degree(u8),
    Charge(i8),
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Prim(Prim),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BondPred {
    SingleOrAromatic,
    Single,
    Double,
    Triple,
    Aromatic,
    Any,
}

impl BondPred {
    fn accepts(self, b: BondOrder) -> bool {
        match self {
            BondPred::SingleOrAromatic => matches!(b, BondOrder::Single | BondOrder::Aromatic),
            BondPred::Single => b == BondOrder::Single,
            BondPred::Double => b == BondOrder::Double,
            BondPred::Triple => b == BondOrder::Triple,
            BondPred::Aromatic => b == BondOrder::Aromatic,
            BondPred::Any => true,
        }
    }
}

/// A tree-shaped pattern; atom 0 is the root and every other atom has an
/// earlier parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Smarts {
    atoms: Vec<Expr>,
    parent: Vec<Option<(usize, BondPred)>>,
}

/// Graph view used for matching: hydrogens are explicit nodes.
#[derive(Debug, Clone)]
pub struct MatchGraph {
    pub number: Vec<u8>,
    pub aromatic: Vec<bool>,
    pub charge: Vec<i8>,
    pub hydrogens: Vec<u8>,
    pub adjacency: Vec<Vec<(usize, BondOrder)>>,
}

impl MatchGraph {
    /// Heavy atoms keep their indices; implied and explicit hydrogens are
    /// appended as single-bonded nodes after them.
    pub fn with_explicit_hydrogens(p: &Perceived) -> MatchGraph {
        let n = p.len();
        let mut g = MatchGraph {
            number: (0..n).map(|i| p.element(i).number()).collect(),
            aromatic: p.aromatic_atom.clone(),
            charge: (0..n).map(|i| p.charge(i)).collect(),
            hydrogens: p.hydrogens.clone(),
            adjacency: p
                .adjacency
                .iter()
                .map(|l| l.iter().map(|&(w, k)| (w, p.bond_kind(k))).collect())
                .collect(),
        };
        for i in 0..n {
            for _ in 0..p.hydrogens[i] {
                let h = g.number.len();
                g.number.push(1);
                g.aromatic.push(false);
                g.charge.push(0);
                g.hydrogens.push(0);
                g.adjacency.push(vec![(i, BondOrder::Single)]);
                g.adjacency[i].push((h, BondOrder::Single));
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.number.len()
    }

    pub fn is_empty(&self) -> bool {
        self.number.is_empty()
    }

    fn total_h(&self, i: usize) -> u8 {
        // explicit H nodes carry the count already, so count neighbors
        self.adjacency[i].iter().filter(|&&(w, _)| self.number[w] == 1).count() as u8
    }
}

fn eval(e: &Expr, g: &MatchGraph, i: usize) -> bool {
    match e {
        Expr::Prim(p) => match *p {
            Prim::Any => true,
            Prim::Number(z) => g.number[i] == z,
            Prim::Aliphatic(z) => g.number[i] == z && !g.aromatic[i],
            Prim::Aromatic(z) => g.number[i] == z && g.aromatic[i],
            Prim::AnyAliphatic => !g.aromatic[i],
            Prim::AnyAromatic => g.aromatic[i],
            Prim::HCount(h) => g.total_h(i) == h,
            Prim::Degree(x) => g.adjacency[i].len() == usize::from(x),
            Prim::Charge(c) => g.charge[i] == c,
        },
        Expr::Not(inner) => !eval(inner, g, i),
        Expr::And(v) => v.iter().all(|x| eval(x, g, i)),
        Expr::Or(v) => v.iter().any(|x| eval(x, g, i)),
    }
}

struct Parser<'a> {
    src: &'a str,
    b: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: &str) -> SmartsError {
        SmartsError {
            pattern: self.src.to_string(),
            offset: self.pos,
            reason: reason.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.b.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.src[start..self.pos].parse().unwrap_or(u32::MAX))
    }

    fn element(&mut self, bracket: bool) -> Option<Prim> {
        let c = self.peek()?;
        if c.is_ascii_uppercase() {
            if let Some(n) = self.b.get(self.pos + 1).filter(|n| n.is_ascii_lowercase()) {
                let two = format!("{}{}", c as char, *n as char);
                let known = Element::from_symbol(&two).is_some_and(|e| e.symbol() == two);
                if known && (bracket || two == "Cl" || two == "Br") {
                    self.pos += 2;
                    return Element::from_symbol(&two).map(|e| Prim::Aliphatic(e.number()));
                }
            }
            let one = (c as char).to_string();
            let e = Element::from_symbol(&one)?;
            self.pos += 1;
            Some(Prim::Aliphatic(e.number()))
        } else if matches!(c, b'b' | b'c' | b'n' | b'o' | b'p' | b's') {
            let e = Element::from_symbol(&(c as char).to_string())?;
            self.pos += 1;
            Some(Prim::Aromatic(e.number()))
        } else {
            None
        }
    }

    fn primitive(&mut self) -> Result<Expr, SmartsError> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end"))?;
        let prim = match c {
            b'#' => {
                self.pos += 1;
                let z = self.digits().ok_or_else(|| self.err("atomic number expected"))?;
                Prim::Number(u8::try_from(z).map_err(|_| self.err("atomic number too large"))?)
            }
            b'H' => {
                self.pos += 1;
                Prim::HCount(self.digits().unwrap_or(1) as u8)
            }
            b'X' => {
                self.pos += 1;
                Prim::Degree(self.digits().unwrap_or(1) as u8)
            }
            b'+' | b'-' => {
                let sign: i32 = if c == b'+' { 1 } else { -1 };
                self.pos += 1;
                let mag = match self.digits() {
                    Some(d) => d as i32,
                    None => {
                        let mut m = 1;
                        while self.peek() == Some(c) {
                            self.pos += 1;
                            m += 1;
                        }
                        m
                    }
                };
                Prim::Charge((sign * mag) as i8)
            }
            b'*' => {
                self.pos += 1;
                Prim::Any
            }
            b'A' => {
                self.pos += 1;
                Prim::AnyAliphatic
            }
            b'a' => {
                self.pos += 1;
                Prim::AnyAromatic
            }
            _ => self.element(true).ok_or_else(|| self.err("unknown atom primitive"))?,
        };
        Ok(Expr::Prim(prim))
    }

    fn unary(&mut self) -> Result<Expr, SmartsError> {
        if self.peek() == Some(b'!') {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        self.primitive()
    }

    fn high_and(&mut self) -> Result<Expr, SmartsError> {
        let mut v = vec![self.unary()?];
        loop {
            match self.peek() {
                Some(b'&') => {
                    self.pos += 1;
                    v.push(self.unary()?);
                }
                Some(b',' | b';' | b']') | None => break,
                Some(_) => v.push(self.unary()?),
            }
        }
        Ok(if v.len() == 1 { v.pop().unwrap() } else { Expr::And(v) })
    }

    fn or(&mut self) -> Result<Expr, SmartsError> {
        let mut v = vec![self.high_and()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            v.push(self.high_and()?);
        }
        Ok(if v.len() == 1 { v.pop().unwrap() } else { Expr::Or(v) })
    }

    fn low_and(&mut self) -> Result<Expr, SmartsError> {
        let mut v = vec![self.or()?];
        while self.peek() == Some(b';') {
            self.pos += 1;
            v.push(self.or()?);
        }
        Ok(if v.len() == 1 { v.pop().unwrap() } else { Expr::And(v) })
    }

    fn atom(&mut self) -> Result<Expr, SmartsError> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let e = self.low_and()?;
                if self.peek() != Some(b']') {
                    return Err(self.err("']' expected"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'*') => {
                self.pos += 1;
                Ok(Expr::Prim(Prim::Any))
            }
            Some(b'A') => {
                self.pos += 1;
                Ok(Expr::Prim(Prim::AnyAliphatic))
            }
            Some(b'a') => {
                self.pos += 1;
                Ok(Expr::Prim(Prim::AnyAromatic))
            }
            _ => self.element(false).map(Expr::Prim).ok_or_else(|| self.err("atom expected")),
        }
    }

    fn bond(&mut self) -> BondPred {
        let p = match self.peek() {
            Some(b'-') => BondPred::Single,
            Some(b'=') => BondPred::Double,
            Some(b'#') => BondPred::Triple,
            Some(b':') => BondPred::Aromatic,
            Some(b'~') => BondPred::Any,
            _ => return BondPred::SingleOrAromatic,
        };
        self.pos += 1;
        p
    }
}

impl Smarts {
    pub fn parse(src: &str) -> Result<Smarts, SmartsError> {
        let mut p = Parser {
            src,
            b: src.as_bytes(),
            pos: 0,
        };
        let mut s = Smarts {
            atoms: vec![p.atom()?],
            parent: vec![None],
        };
        let mut stack: Vec<usize> = Vec::new();
        let mut prev = 0;
        while let Some(c) = p.peek() {
            match c {
                b'(' => {
                    p.pos += 1;
                    stack.push(prev);
                }
                b')' => {
                    p.pos += 1;
                    prev = stack.pop().ok_or_else(|| p.err("unbalanced ')'"))?;
                }
                _ => {
                    let bond = p.bond();
                    let atom = p.atom()?;
                    s.atoms.push(atom);
                    s.parent.push(Some((prev, bond)));
                    prev = s.atoms.len() - 1;
                }
            }
        }
        if !stack.is_empty() {
            return Err(p.err("unbalanced '('"));
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// True when some match maps the pattern root onto atom `root`.
    pub fn matches_at(&self, g: &MatchGraph, root: usize) -> bool {
        if !eval(&self.atoms[0], g, root) {
            return false;
        }
        let mut map = vec![usize::MAX; self.atoms.len()];
        map[0] = root;
        self.extend(g, 1, &mut map)
    }

    fn extend(&self, g: &MatchGraph, k: usize, map: &mut Vec<usize>) -> bool {
        if k == self.atoms.len() {
            return true;
        }
        let (parent, bond) = self.parent[k].expect("non-root atoms have a parent");
        for &(w, order) in &g.adjacency[map[parent]] {
            if map[..k].contains(&w) || !bond.accepts(order) || !eval(&self.atoms[k], g, w) {
                continue;
            }
            map[k] = w;
            if self.extend(g, k + 1, map) {
                return true;
            }
        }
        map[k] = usize::MAX;
        false
    }
}
