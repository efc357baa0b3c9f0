//! Finitely presented groups: normal forms, the word metric, Cayley balls,
//! geodesic enumeration and the distinguished geodesic structure.

mod alphabet;
pub mod ball;
mod element;
mod geodesics;
mod structure;
mod symmetry;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

pub use alphabet::{Gen, GeneratorAlphabet};
pub use ball::BallTable;
pub use element::{GroupElement, Segment};
pub use geodesics::GeodesicList;
pub use structure::{DistinguishedGeodesicStructure, StructureSource};
pub use symmetry::label_symmetries;

use crate::error::{Error, Result};

/// Default cap on the number of geodesics returned per endpoint pair.
pub const DEFAULT_GEODESIC_CAP: usize = 10_000;

/// Extra depth explored by the coset enumerator beyond `r_max`.
pub const DEFAULT_ENUMERATION_SLACK: u32 = 2;

const DEFAULT_MAX_COSETS: usize = 40_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    /// Free group, words freely reduced, no radius limit.
    FreeExact,
    /// General presentation, everything certified inside `B(r_max)`.
    BallTruncated { r_max: u32 },
}

/// On-disk group description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub generators: Vec<String>,
    #[serde(default)]
    pub inverses: BTreeMap<String, String>,
    #[serde(default)]
    pub relators: Vec<String>,
    #[serde(default)]
    pub shortlex_order: Option<Vec<String>>,
    pub mode: String,
    #[serde(default)]
    pub r_max: Option<u32>,
}

/// The ambient group `(G, d_S)` together with its Cayley-ball cache.
#[derive(Debug)]
pub struct GroupContext {
    alphabet: GeneratorAlphabet,
    relators: Vec<Vec<Gen>>,
    mode: Mode,
    ball: Option<Arc<BallTable>>,
    free_cache: Mutex<HashMap<u32, Arc<BallTable>>>,
    rows: Mutex<HashMap<u32, Arc<Vec<u8>>>>,
}

const MAX_CACHED_ROWS: usize = 512;

impl GroupContext {
    /// Free group of the given rank on `a, b, ...`.
    pub fn free(rank: usize) -> Self {
        Self::free_on(GeneratorAlphabet::free(rank))
    }

    pub fn free_on(alphabet: GeneratorAlphabet) -> Self {
        Self {
            alphabet,
            relators: Vec::new(),
            mode: Mode::FreeExact,
            ball: None,
            free_cache: Mutex::new(HashMap::new()),
            rows: Mutex::new(HashMap::new()),
        }
    }

    /// Presentation in ball-truncated mode; builds `B(r_max)` eagerly.
    pub fn presented(
        alphabet: GeneratorAlphabet,
        relators: Vec<Vec<Gen>>,
        r_max: u32,
    ) -> Result<Self> {
        Self::presented_with(alphabet, relators, r_max, DEFAULT_ENUMERATION_SLACK)
    }

    pub fn presented_with(
        alphabet: GeneratorAlphabet,
        relators: Vec<Vec<Gen>>,
        r_max: u32,
        slack: u32,
    ) -> Result<Self> {
        let table = ball::enumerate_ball(&alphabet, &relators, r_max, slack, DEFAULT_MAX_COSETS)?;
        Ok(Self {
            alphabet,
            relators,
            mode: Mode::BallTruncated { r_max },
            ball: Some(Arc::new(table)),
            free_cache: Mutex::new(HashMap::new()),
            rows: Mutex::new(HashMap::new()),
        })
    }

    pub fn from_group_file(file: &GroupFile) -> Result<Self> {
        let alphabet = GeneratorAlphabet::new(
            &file.generators,
            &file.inverses,
            file.shortlex_order.as_deref(),
        )?;
        match file.mode.as_str() {
            "free" => {
                if !file.relators.is_empty() {
                    return Err(Error::InvalidInput(
                        "mode \"free\" does not accept relators".into(),
                    ));
                }
                if !alphabet.is_fixed_point_free() {
                    return Err(Error::InvalidInput(
                        "mode \"free\" needs every generator distinct from its inverse".into(),
                    ));
                }
                Ok(Self::free_on(alphabet))
            }
            "ball" => {
                let r_max = file.r_max.ok_or_else(|| {
                    Error::InvalidInput("mode \"ball\" requires \"r_max\"".into())
                })?;
                let relators = file
                    .relators
                    .iter()
                    .map(|r| alphabet.parse(r))
                    .collect::<Result<Vec<_>>>()?;
                Self::presented(alphabet, relators, r_max)
            }
            other => Err(Error::InvalidInput(format!(
                "unknown mode {other:?} (expected \"free\" or \"ball\")"
            ))),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let file: GroupFile = serde_json::from_str(&text)?;
        Self::from_group_file(&file)
    }

    pub fn alphabet(&self) -> &GeneratorAlphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Vec<Gen>] {
        &self.relators
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_free(&self) -> bool {
        self.mode == Mode::FreeExact
    }

    /// Certification radius, `None` in free-exact mode.
    pub fn r_max(&self) -> Option<u32> {
        match self.mode {
            Mode::FreeExact => None,
            Mode::BallTruncated { r_max } => Some(r_max),
        }
    }

    pub fn parse(&self, text: &str) -> Result<GroupElement> {
        let w = self.alphabet.parse(text)?;
        self.normal_form(&w)
    }

    pub fn format(&self, g: &GroupElement) -> String {
        self.alphabet.format(g.word())
    }

    pub fn generator(&self, s: Gen) -> GroupElement {
        GroupElement::from_normal_form(vec![s])
    }

    fn out_of_ball(&self, word: &[Gen]) -> Error {
        Error::OutOfCertifiedBall {
            word: self.alphabet.format(word),
            radius: self.r_max().unwrap_or(0),
        }
    }

    /// The ShortLex normal form of the element spelled by `word`.
    pub fn normal_form(&self, word: &[Gen]) -> Result<GroupElement> {
        match &self.ball {
            None => Ok(GroupElement(self.alphabet.free_reduce(word))),
            Some(t) => {
                let reduced = self.alphabet.free_reduce(word);
                let idx = t.trace(0, &reduced).ok_or_else(|| self.out_of_ball(word))?;
                Ok(GroupElement(t.word(idx).to_vec()))
            }
        }
    }

    /// Table index of `g` in ball mode.
    pub fn index(&self, g: &GroupElement) -> Result<u32> {
        let t = self.ball.as_ref().expect("ball mode");
        t.index_of(g.word())
            .ok_or_else(|| self.out_of_ball(g.word()))
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        match &self.ball {
            None => {
                let mut w = g.word().to_vec();
                w.extend_from_slice(h.word());
                Ok(GroupElement(self.alphabet.free_reduce(&w)))
            }
            Some(t) => {
                let i = self.index(g)?;
                match t.trace(i, h.word()) {
                    Some(x) => Ok(GroupElement(t.word(x).to_vec())),
                    None => {
                        // Try the other association: (h^-1 g^-1)^-1.
                        let hi = t.inverse(self.index(h)?);
                        let gi = self.alphabet.invert(g.word());
                        let x = t.trace(hi, &gi).ok_or_else(|| {
                            let mut w = g.word().to_vec();
                            w.extend_from_slice(h.word());
                            self.out_of_ball(&w)
                        })?;
                        Ok(GroupElement(t.word(t.inverse(x)).to_vec()))
                    }
                }
            }
        }
    }

    pub fn mul_gen(&self, g: &GroupElement, s: Gen) -> Result<GroupElement> {
        match &self.ball {
            None => {
                let mut w = g.word().to_vec();
                match w.last() {
                    Some(&t) if self.alphabet.inverse(t) == s => {
                        w.pop();
                    }
                    _ => w.push(s),
                }
                Ok(GroupElement(w))
            }
            Some(t) => {
                let i = self.index(g)?;
                let x = t.mul(i, s);
                if x == ball::NONE {
                    let mut w = g.word().to_vec();
                    w.push(s);
                    return Err(self.out_of_ball(&w));
                }
                Ok(GroupElement(t.word(x).to_vec()))
            }
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        match &self.ball {
            None => GroupElement(self.alphabet.invert(g.word())),
            Some(t) => {
                let i = t.index_of(g.word()).expect("element of the ball");
                GroupElement(t.word(t.inverse(i)).to_vec())
            }
        }
    }

    /// `d_S(g, h) = |g^-1 h|`.
    ///
    /// In ball mode the product is first traced through the table; when the
    /// walk leaves the ball the distance is read from a breadth-first search
    /// inside the ball, which is accepted only if every geodesic between the
    /// two points is guaranteed to stay inside.
    pub fn word_metric(&self, g: &GroupElement, h: &GroupElement) -> Result<u32> {
        if let Ok(x) = self.multiply(&self.inverse(g), h) {
            return Ok(x.len());
        }
        let t = self.ball.as_ref().expect("free products never fail");
        let (gi, hi) = (self.index(g)?, self.index(h)?);
        let row = self.distance_row(hi);
        let m = row[gi as usize] as u32;
        if self.inside_certified(g.len(), h.len(), m, t.radius()) {
            return Ok(m);
        }
        let mut w = self.alphabet.invert(g.word());
        w.extend_from_slice(h.word());
        Err(self.out_of_ball(&w))
    }

    /// Whether every geodesic of length `m` between points of lengths `a`
    /// and `b` lies in `B(r)`.
    pub(crate) fn inside_certified(&self, a: u32, b: u32, m: u32, r: u32) -> bool {
        m != u8::MAX as u32 && (a + b + m <= 2 * r || m + a.min(b) <= r)
    }

    /// Breadth-first distances to table element `src`, inside the ball.
    pub(crate) fn distance_row(&self, src: u32) -> Arc<Vec<u8>> {
        let t = self.ball.as_ref().expect("ball mode");
        if let Some(r) = self.rows.lock().expect("row cache poisoned").get(&src) {
            return Arc::clone(r);
        }
        let row = Arc::new(bfs_row(t, src));
        let mut cache = self.rows.lock().expect("row cache poisoned");
        if cache.len() >= MAX_CACHED_ROWS {
            cache.clear();
        }
        cache.insert(src, Arc::clone(&row));
        row
    }

    /// Multiplication table of `B(radius)`.
    pub fn table(&self, radius: u32) -> Result<Arc<BallTable>> {
        match &self.ball {
            Some(t) => {
                if radius > t.radius() {
                    return Err(Error::OutOfCertifiedBall {
                        word: format!("<ball of radius {radius}>"),
                        radius: t.radius(),
                    });
                }
                Ok(Arc::clone(t))
            }
            None => {
                let mut cache = self.free_cache.lock().expect("ball cache poisoned");
                if let Some(t) = cache.get(&radius) {
                    return Ok(Arc::clone(t));
                }
                let budget = 20_000_000u64;
                let n = self.alphabet.len() as u64;
                let mut size = 1u64;
                let mut sphere = 1u64;
                for k in 0..radius {
                    sphere = sphere.saturating_mul(if k == 0 { n } else { n - 1 });
                    size = size.saturating_add(sphere);
                }
                if size > budget {
                    return Err(Error::BudgetExceeded {
                        what: "free ball size",
                        budget,
                    });
                }
                let t = Arc::new(ball::free_ball(&self.alphabet, radius));
                cache.insert(radius, Arc::clone(&t));
                Ok(t)
            }
        }
    }

    /// All elements with `d_S(g, 1) <= radius`, ShortLex-sorted.
    pub fn ball(&self, radius: u32) -> Result<Vec<GroupElement>> {
        let t = self.table(radius)?;
        Ok((0..t.ball_end(radius))
            .map(|i| GroupElement(t.word(i as u32).to_vec()))
            .collect())
    }

    /// All geodesic edge paths from `g` to `h`, ShortLex-first, capped at
    /// `cap` entries.
    pub fn enumerate_geodesics(
        &self,
        g: &GroupElement,
        h: &GroupElement,
        cap: usize,
    ) -> Result<GeodesicList> {
        geodesics::enumerate(self, g, h, cap)
    }

    /// The ShortLex last-letter field on the ball of the given radius.
    pub fn distinguished_structure(&self, radius: u32) -> Result<DistinguishedGeodesicStructure> {
        structure::shortlex_tower(self, radius)
    }
}

/// Breadth-first distances from `src` inside the table, saturating at 255.
pub fn bfs_row(t: &BallTable, src: u32) -> Vec<u8> {
    let mut d = vec![u8::MAX; t.len()];
    d[src as usize] = 0;
    let mut queue = vec![src];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let dx = d[x as usize];
        for s in 0..t.ngen() as Gen {
            let y = t.mul(x, s);
            if y != ball::NONE && d[y as usize] == u8::MAX {
                d[y as usize] = dx.saturating_add(1);
                queue.push(y);
            }
        }
    }
    d
}
