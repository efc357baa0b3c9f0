//! Cayley balls as explicit multiplication tables.
//!
//! A [`BallTable`] stores every element of `B(R)` in ShortLex order together
//! with its right-multiplication row. Entries leading outside the ball are
//! `NONE`. Free groups get their table by listing reduced words; general
//! presentations go through a truncated coset enumeration over the trivial
//! subgroup (Felsch-style deductions, no definitions beyond depth `R + 1`).

use std::collections::{HashMap, VecDeque};

use super::{Gen, GeneratorAlphabet};
use crate::error::{Error, Result};

pub const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct BallTable {
    ngen: usize,
    radius: u32,
    words: Vec<Vec<Gen>>,
    depth: Vec<u32>,
    mult: Vec<u32>,
    inv: Vec<u32>,
    index: HashMap<Vec<Gen>, u32>,
    sphere_start: Vec<usize>,
}

impl BallTable {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn ngen(&self) -> usize {
        self.ngen
    }

    pub fn word(&self, idx: u32) -> &[Gen] {
        &self.words[idx as usize]
    }

    pub fn depth(&self, idx: u32) -> u32 {
        self.depth[idx as usize]
    }

    pub fn inverse(&self, idx: u32) -> u32 {
        self.inv[idx as usize]
    }

    #[inline]
    pub fn mul(&self, idx: u32, s: Gen) -> u32 {
        self.mult[idx as usize * self.ngen + s as usize]
    }

    /// Right-multiplies `start` by `word` letter by letter; `None` as soon as
    /// the walk leaves the ball.
    #[inline]
    pub fn trace(&self, start: u32, word: &[Gen]) -> Option<u32> {
        let mut cur = start;
        for &s in word {
            cur = self.mul(cur, s);
            if cur == NONE {
                return None;
            }
        }
        Some(cur)
    }

    /// Index of a normal-form word.
    pub fn index_of(&self, word: &[Gen]) -> Option<u32> {
        self.index.get(word).copied()
    }

    /// Elements of radius `<= r` occupy indices `0..ball_end(r)`.
    pub fn ball_end(&self, r: u32) -> usize {
        let k = (r as usize + 1).min(self.sphere_start.len() - 1);
        self.sphere_start[k]
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.sphere_start.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Distance between two table elements, or `None` when the walk from
    /// `p^-1` along the normal form of `q` leaves the ball. Any value
    /// returned is exact.
    pub fn distance(&self, p: u32, q: u32) -> Option<u32> {
        let x = self.trace(self.inverse(p), self.word(q))?;
        Some(self.depth(x))
    }

    pub(crate) fn from_parts(
        ngen: usize,
        radius: u32,
        gen_inv: &[Gen],
        words: Vec<Vec<Gen>>,
        mult: Vec<u32>,
    ) -> Self {
        let depth: Vec<u32> = words.iter().map(|w| w.len() as u32).collect();
        let mut sphere_start = vec![0usize];
        for k in 0..=radius {
            let end = depth.iter().take_while(|&&d| d <= k).count();
            sphere_start.push(end);
        }
        let index: HashMap<Vec<Gen>, u32> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let mut t = Self {
            ngen,
            radius,
            words,
            depth,
            mult,
            inv: Vec::new(),
            index,
            sphere_start,
        };
        t.inv = (0..t.words.len())
            .map(|i| {
                let w = &t.words[i];
                let mut x = 0u32;
                for &s in w.iter().rev() {
                    x = t.mul(x, gen_inv[s as usize]);
                }
                x
            })
            .collect();
        t
    }
}

/// Ball of reduced words in the free group on `alphabet`.
pub fn free_ball(alphabet: &GeneratorAlphabet, radius: u32) -> BallTable {
    let ngen = alphabet.len();
    let mut words: Vec<Vec<Gen>> = vec![Vec::new()];
    let mut sphere: Vec<usize> = vec![0];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &i in &sphere {
            for s in alphabet.gens() {
                let w = &words[i];
                if w.last().is_some_and(|&t| alphabet.inverse(t) == s) {
                    continue;
                }
                let mut nw = w.clone();
                nw.push(s);
                next.push(words.len());
                words.push(nw);
            }
        }
        sphere = next;
    }
    let index: HashMap<&[Gen], u32> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_slice(), i as u32))
        .collect();
    let mut mult = vec![NONE; words.len() * ngen];
    for (i, w) in words.iter().enumerate() {
        for s in alphabet.gens() {
            let target = if w.last().is_some_and(|&t| alphabet.inverse(t) == s) {
                index.get(&w[..w.len() - 1]).copied()
            } else if (w.len() as u32) < radius {
                let mut nw = w.clone();
                nw.push(s);
                index.get(nw.as_slice()).copied()
            } else {
                None
            };
            mult[i * ngen + s as usize] = target.unwrap_or(NONE);
        }
    }
    drop(index);
    let gen_inv: Vec<Gen> = alphabet.gens().map(|s| alphabet.inverse(s)).collect();
    BallTable::from_parts(ngen, radius, &gen_inv, words, mult)
}

/// Builds `B(radius)` for a finite presentation by truncated coset
/// enumeration.
///
/// Every coset whose depth label is below `radius + slack` gets all its
/// neighbours defined; relator consequences are propagated by scanning all
/// cyclic conjugates of the relators and their inverses after each
/// definition, with full coincidence processing. Identifications found this
/// way are always correct; completeness within the ball is what the
/// `slack` margin buys and is cross-checked by the test suite against
/// independent word-problem oracles.
pub fn enumerate_ball(
    alphabet: &GeneratorAlphabet,
    relators: &[Vec<Gen>],
    radius: u32,
    slack: u32,
    max_cosets: usize,
) -> Result<BallTable> {
    let mut e = Enumerator::new(alphabet, relators, max_cosets);
    let define_depth = radius + slack.max(1);
    e.run(define_depth)?;
    Ok(e.extract(radius))
}

struct Enumerator {
    ngen: usize,
    inv: Vec<usize>,
    table: Vec<u32>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    rels: Vec<Vec<usize>>,
    rels_by_first: Vec<Vec<usize>>,
    deductions: Vec<(u32, usize)>,
    queue: VecDeque<u32>,
    max_cosets: usize,
}

impl Enumerator {
    fn new(alphabet: &GeneratorAlphabet, relators: &[Vec<Gen>], max_cosets: usize) -> Self {
        let ngen = alphabet.len();
        let inv: Vec<usize> = alphabet
            .gens()
            .map(|s| alphabet.inverse(s) as usize)
            .collect();
        let mut rels: Vec<Vec<usize>> = Vec::new();
        for r in relators {
            let r: Vec<usize> = r.iter().map(|&s| s as usize).collect();
            let rinv: Vec<usize> = r.iter().rev().map(|&s| inv[s]).collect();
            for base in [r, rinv] {
                for k in 0..base.len() {
                    let mut c = base[k..].to_vec();
                    c.extend_from_slice(&base[..k]);
                    if !rels.contains(&c) {
                        rels.push(c);
                    }
                }
            }
        }
        let mut rels_by_first = vec![Vec::new(); ngen];
        for (i, r) in rels.iter().enumerate() {
            if let Some(&f) = r.first() {
                rels_by_first[f].push(i);
            }
        }
        let mut e = Self {
            ngen,
            inv,
            table: Vec::new(),
            parent: Vec::new(),
            depth: Vec::new(),
            rels,
            rels_by_first,
            deductions: Vec::new(),
            queue: VecDeque::new(),
            max_cosets,
        };
        e.new_coset(0);
        e
    }

    fn new_coset(&mut self, depth: u32) -> u32 {
        let c = self.parent.len() as u32;
        self.parent.push(c);
        self.depth.push(depth);
        self.table.extend(std::iter::repeat_n(NONE, self.ngen));
        c
    }

    #[inline]
    fn get(&self, c: u32, s: usize) -> u32 {
        self.table[c as usize * self.ngen + s]
    }

    #[inline]
    fn set(&mut self, c: u32, s: usize, d: u32) {
        self.table[c as usize * self.ngen + s] = d;
    }

    fn find(&mut self, mut c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[c as usize] != root {
            let next = self.parent[c as usize];
            self.parent[c as usize] = root;
            c = next;
        }
        root
    }

    fn live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn run(&mut self, define_depth: u32) -> Result<()> {
        loop {
            let mut c = 0u32;
            while (c as usize) < self.parent.len() {
                if self.live(c) && self.depth[c as usize] < define_depth {
                    for s in 0..self.ngen {
                        if !self.live(c) {
                            break;
                        }
                        if self.get(c, s) == NONE {
                            self.define(c, s)?;
                        }
                    }
                }
                c += 1;
            }
            // Depth labels only bound the true distance from above; refresh
            // them and define any rows that fell inside the window.
            let true_depth = self.bfs_depths();
            let mut missing = false;
            for (c, &d) in true_depth.iter().enumerate().take(self.parent.len()) {
                if !self.live(c as u32) {
                    continue;
                }
                if d != NONE {
                    self.depth[c] = d;
                }
                if d < define_depth && (0..self.ngen).any(|s| self.get(c as u32, s) == NONE) {
                    missing = true;
                }
            }
            if !missing {
                return Ok(());
            }
        }
    }

    fn define(&mut self, c: u32, s: usize) -> Result<()> {
        if self.parent.len() >= self.max_cosets {
            return Err(Error::BudgetExceeded {
                what: "coset enumeration",
                budget: self.max_cosets as u64,
            });
        }
        let d = self.new_coset(self.depth[c as usize] + 1);
        self.set(c, s, d);
        let si = self.inv[s];
        self.set(d, si, c);
        self.deductions.push((c, s));
        self.process_deductions();
        Ok(())
    }

    fn process_deductions(&mut self) {
        while let Some((c, s)) = self.deductions.pop() {
            let c = self.find(c);
            let d = self.get(c, s);
            if d == NONE {
                continue;
            }
            for k in 0..self.rels_by_first[s].len() {
                let r = self.rels_by_first[s][k];
                self.scan(c, r);
            }
            let d = self.find(d);
            let si = self.inv[s];
            for k in 0..self.rels_by_first[si].len() {
                let r = self.rels_by_first[si][k];
                self.scan(d, r);
            }
        }
    }

    fn scan(&mut self, c: u32, r: usize) {
        let c = self.find(c);
        let n = self.rels[r].len();
        let mut f = c;
        let mut i = 0;
        while i < n {
            let nx = self.get(f, self.rels[r][i]);
            if nx == NONE {
                break;
            }
            f = nx;
            i += 1;
        }
        if i == n {
            if f != c {
                self.coincidence(f, c);
            }
            return;
        }
        let mut b = c;
        let mut j = n;
        while j > i {
            let nx = self.get(b, self.inv[self.rels[r][j - 1]]);
            if nx == NONE {
                break;
            }
            b = nx;
            j -= 1;
        }
        if j == i {
            self.coincidence(f, b);
        } else if j == i + 1 {
            let s = self.rels[r][i];
            self.set(f, s, b);
            let si = self.inv[s];
            self.set(b, si, f);
            self.deductions.push((f, s));
        }
    }

    fn merge(&mut self, k: u32, l: u32) {
        let k = self.find(k);
        let l = self.find(l);
        if k == l {
            return;
        }
        let (lo, hi) = if k < l { (k, l) } else { (l, k) };
        self.parent[hi as usize] = lo;
        let dh = self.depth[hi as usize];
        let dl = &mut self.depth[lo as usize];
        *dl = (*dl).min(dh);
        self.queue.push_back(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(e) = self.queue.pop_front() {
            for s in 0..self.ngen {
                let f = self.get(e, s);
                if f == NONE {
                    continue;
                }
                let si = self.inv[s];
                self.set(f, si, NONE);
                let e1 = self.find(e);
                let f1 = self.find(f);
                let e1s = self.get(e1, s);
                if e1s != NONE {
                    self.merge(f1, e1s);
                } else {
                    let f1si = self.get(f1, si);
                    if f1si != NONE {
                        self.merge(e1, f1si);
                    } else {
                        self.set(e1, s, f1);
                        self.set(f1, si, e1);
                        self.deductions.push((e1, s));
                    }
                }
            }
        }
    }

    fn bfs_depths(&mut self) -> Vec<u32> {
        let n = self.parent.len();
        let mut dist = vec![NONE; n];
        let root = self.find(0);
        dist[root as usize] = 0;
        let mut q = VecDeque::from([root]);
        while let Some(c) = q.pop_front() {
            for s in 0..self.ngen {
                let d = self.get(c, s);
                if d == NONE {
                    continue;
                }
                let d = self.find(d);
                if dist[d as usize] == NONE {
                    dist[d as usize] = dist[c as usize] + 1;
                    q.push_back(d);
                }
            }
        }
        dist
    }

    fn extract(&mut self, radius: u32) -> BallTable {
        let n = self.parent.len();
        let mut idx_of = vec![NONE; n];
        let root = self.find(0);
        let mut cosets: Vec<u32> = vec![root];
        let mut words: Vec<Vec<Gen>> = vec![Vec::new()];
        idx_of[root as usize] = 0;
        let mut sphere: Vec<u32> = vec![root];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &c in &sphere {
                let parent_idx = idx_of[c as usize] as usize;
                for s in 0..self.ngen {
                    let d = self.get(c, s);
                    if d == NONE {
                        continue;
                    }
                    let d = self.find(d);
                    if idx_of[d as usize] == NONE {
                        idx_of[d as usize] = words.len() as u32;
                        let mut w = words[parent_idx].clone();
                        w.push(s as Gen);
                        words.push(w);
                        cosets.push(d);
                        next.push(d);
                    }
                }
            }
            sphere = next;
        }
        let mut mult = vec![NONE; words.len() * self.ngen];
        for (i, &c) in cosets.iter().enumerate() {
            for s in 0..self.ngen {
                let d = self.get(c, s);
                if d == NONE {
                    continue;
                }
                let d = self.find(d);
                mult[i * self.ngen + s] = idx_of[d as usize];
            }
        }
        let gen_inv: Vec<Gen> = self.inv.iter().map(|&s| s as Gen).collect();
        BallTable::from_parts(self.ngen, radius, &gen_inv, words, mult)
    }
}
