use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A generator symbol, stored as its rank in the ShortLex order of the
/// alphabet. Comparing two `Gen`s therefore compares them in ShortLex order.
pub type Gen = u8;

/// Symmetric generating alphabet with a formal inverse for every symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorAlphabet {
    symbols: Vec<String>,
    inverse: Vec<Gen>,
    single_char: bool,
}

impl GeneratorAlphabet {
    /// Builds an alphabet from generator names, an inverse map and an
    /// optional explicit ShortLex order of all symbols.
    ///
    /// A generator missing from `inverses` gets the case-swapped name as its
    /// inverse when it is a single ASCII letter (`a` <-> `A`).
    pub fn new(
        generators: &[String],
        inverses: &BTreeMap<String, String>,
        shortlex_order: Option<&[String]>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidInput("no generators".into()));
        }
        let mut pairs: Vec<(String, String)> = Vec::new();
        for g in generators {
            let inv = match inverses.get(g) {
                Some(i) => i.clone(),
                None => swap_case(g).ok_or_else(|| {
                    Error::InvalidInput(format!("no inverse given for generator {g:?}"))
                })?,
            };
            pairs.push((g.clone(), inv));
        }
        let mut default_order: Vec<String> = Vec::new();
        for (g, i) in &pairs {
            if !default_order.contains(g) {
                default_order.push(g.clone());
            }
            if !default_order.contains(i) {
                default_order.push(i.clone());
            }
        }
        let order: Vec<String> = match shortlex_order {
            Some(o) => {
                let mut a: Vec<&String> = o.iter().collect();
                let mut b: Vec<&String> = default_order.iter().collect();
                a.sort();
                b.sort();
                if a != b {
                    return Err(Error::InvalidInput(format!(
                        "shortlex_order {o:?} is not a permutation of the symbols {default_order:?}"
                    )));
                }
                o.to_vec()
            }
            None => default_order,
        };
        if order.len() > Gen::MAX as usize {
            return Err(Error::InvalidInput("too many generator symbols".into()));
        }
        for s in &order {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::InvalidInput(format!("bad symbol name {s:?}")));
            }
        }
        let pos = |s: &str| order.iter().position(|x| x == s).unwrap() as Gen;
        let mut inverse = vec![Gen::MAX; order.len()];
        for (g, i) in &pairs {
            let (gp, ip) = (pos(g), pos(i));
            for (x, y) in [(gp, ip), (ip, gp)] {
                if inverse[x as usize] != Gen::MAX && inverse[x as usize] != y {
                    return Err(Error::InvalidInput(format!(
                        "inconsistent inverse for {:?}",
                        order[x as usize]
                    )));
                }
                inverse[x as usize] = y;
            }
        }
        let single_char = order.iter().all(|s| s.chars().count() == 1);
        Ok(Self {
            symbols: order,
            inverse,
            single_char,
        })
    }

    /// Free alphabet on `rank` letters `a, b, c, ...` with inverses `A, B, C, ...`,
    /// ordered `a < A < b < B < ...`.
    pub fn free(rank: usize) -> Self {
        assert!((1..=26).contains(&rank));
        let gens: Vec<String> = (0..rank)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect();
        Self::new(&gens, &BTreeMap::new(), None).expect("free alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn inverse(&self, s: Gen) -> Gen {
        self.inverse[s as usize]
    }

    pub fn symbol(&self, s: Gen) -> &str {
        &self.symbols[s as usize]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn gens(&self) -> impl Iterator<Item = Gen> + '_ {
        (0..self.symbols.len()).map(|s| s as Gen)
    }

    /// True when no symbol is its own inverse.
    pub fn is_fixed_point_free(&self) -> bool {
        self.gens().all(|s| self.inverse(s) != s)
    }

    pub fn lookup(&self, sym: &str) -> Option<Gen> {
        self.symbols.iter().position(|s| s == sym).map(|p| p as Gen)
    }

    /// Parses a word. Symbols are matched greedily (longest name first);
    /// whitespace separates tokens and is otherwise ignored. `""` and `"1"`
    /// (when `1` is not a symbol) denote the empty word.
    pub fn parse(&self, text: &str) -> Result<Vec<Gen>> {
        let trimmed = text.trim();
        if trimmed.is_empty() || (trimmed == "1" && self.lookup("1").is_none()) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for token in trimmed.split_whitespace() {
            let mut rest = token;
            while !rest.is_empty() {
                let best = self
                    .symbols
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| rest.starts_with(s.as_str()))
                    .max_by_key(|(_, s)| s.len());
                match best {
                    Some((i, s)) => {
                        out.push(i as Gen);
                        rest = &rest[s.len()..];
                    }
                    None => return Err(Error::UnknownSymbol(text.to_string())),
                }
            }
        }
        Ok(out)
    }

    pub fn format(&self, word: &[Gen]) -> String {
        let sep = if self.single_char { "" } else { " " };
        word.iter()
            .map(|&s| self.symbol(s))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Formal inverse of a word.
    pub fn invert(&self, word: &[Gen]) -> Vec<Gen> {
        word.iter().rev().map(|&s| self.inverse(s)).collect()
    }

    /// Free reduction: cancels adjacent `s s^-1` pairs.
    pub fn free_reduce(&self, word: &[Gen]) -> Vec<Gen> {
        let mut out: Vec<Gen> = Vec::with_capacity(word.len());
        for &s in word {
            match out.last() {
                Some(&t) if self.inverse(t) == s => {
                    out.pop();
                }
                _ => out.push(s),
            }
        }
        out
    }

    pub fn is_reduced(&self, word: &[Gen]) -> bool {
        word.windows(2).all(|w| self.inverse(w[0]) != w[1])
    }
}

fn swap_case(s: &str) -> Option<String> {
    let mut chars = s.chars();
    let c = chars.next()?;
    if chars.next().is_some() || !c.is_ascii_alphabetic() {
        return None;
    }
    Some(if c.is_ascii_lowercase() {
        c.to_ascii_uppercase().to_string()
    } else {
        c.to_ascii_lowercase().to_string()
    })
}
