use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Gen, GroupContext, GroupElement};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureSource {
    ShortlexTower,
    Explicit,
}

/// The last-letter field `l(g)`: the generator leading from `g` one step back
/// towards `1_G` along its distinguished geodesic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguishedGeodesicStructure {
    pub radius: u32,
    pub source: StructureSource,
    last_letter: BTreeMap<GroupElement, Gen>,
}

impl DistinguishedGeodesicStructure {
    pub fn explicit(radius: u32, last_letter: BTreeMap<GroupElement, Gen>) -> Self {
        Self {
            radius,
            source: StructureSource::Explicit,
            last_letter,
        }
    }

    /// `l(g)`, or `None` for the identity and for elements outside the ball.
    pub fn last_letter(&self, g: &GroupElement) -> Option<Gen> {
        self.last_letter.get(g).copied()
    }

    /// Checks both axioms on the ball: following `l` from `g` reaches `1_G`
    /// in exactly `|g|` steps, and the path read backwards is the
    /// distinguished word of `g` (so truncating it yields the distinguished
    /// word of the truncation).
    pub fn check(&self, ctx: &GroupContext) -> Result<()> {
        for g in ctx.ball(self.radius)? {
            let mut cur = g.clone();
            let mut letters = Vec::new();
            while !cur.is_identity() {
                let s = self.last_letter(&cur).ok_or_else(|| {
                    Error::PropositionViolated(format!("no last letter at {}", ctx.format(&cur)))
                })?;
                cur = ctx.mul_gen(&cur, s)?;
                letters.push(ctx.alphabet().inverse(s));
                if letters.len() > g.len() as usize {
                    break;
                }
            }
            letters.reverse();
            if letters.len() != g.len() as usize || ctx.normal_form(&letters)? != g {
                return Err(Error::PropositionViolated(format!(
                    "distinguished path of {} is not a geodesic to 1",
                    ctx.format(&g)
                )));
            }
        }
        Ok(())
    }
}

pub(super) fn shortlex_tower(
    ctx: &GroupContext,
    radius: u32,
) -> Result<DistinguishedGeodesicStructure> {
    let mut map = BTreeMap::new();
    for g in ctx.ball(radius)? {
        if let Some(s) = g.last_letter() {
            map.insert(g, ctx.alphabet().inverse(s));
        }
    }
    Ok(DistinguishedGeodesicStructure {
        radius,
        source: StructureSource::ShortlexTower,
        last_letter: map,
    })
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn last_letter_examples() {
        let g = GroupContext::free(2);
        let s = g.distinguished_structure(3).unwrap();
        let al = g.alphabet();
        assert_eq!(s.last_letter(&g.parse("ab").unwrap()), al.lookup("B"));
        assert_eq!(s.last_letter(&g.parse("a").unwrap()), al.lookup("A"));
        assert_eq!(s.last_letter(&GroupElement::identity()), None);
        s.check(&g).unwrap();

        let a = GeneratorAlphabet::free(2);
        let rel = a.parse("abAB").unwrap();
        let z = GroupContext::presented(a, vec![rel], 5).unwrap();
        let s = z.distinguished_structure(5).unwrap();
        assert_eq!(
            s.last_letter(&z.parse("ba").unwrap()),
            z.alphabet().lookup("B")
        );
        s.check(&z).unwrap();
    }
}
