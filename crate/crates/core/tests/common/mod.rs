//! String-level oracles for F₂ on `a, A, b, B` (inverse = case swap), kept
//! independent of the library's group code.
#![allow(dead_code)]

use std::path::PathBuf;

use bshadow::geometry::HyperbolicityCertificate;
use rand::Rng;

pub const LETTERS: [char; 4] = ['a', 'A', 'b', 'B'];

pub fn inv(c: char) -> char {
    if c.is_ascii_lowercase() {
        c.to_ascii_uppercase()
    } else {
        c.to_ascii_lowercase()
    }
}

pub fn reduce(s: &str) -> String {
    let mut out: Vec<char> = Vec::new();
    for c in s.chars() {
        if out.last() == Some(&inv(c)) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out.into_iter().collect()
}

pub fn invert(s: &str) -> String {
    s.chars().rev().map(inv).collect()
}

/// First `n` letters of the reduced ray `u prefix period^oo`.
pub fn ray_letters(u: &str, prefix: &str, period: &str, n: usize) -> String {
    let reps = n + u.len() + prefix.len() + 4;
    let long = reduce(&format!("{u}{prefix}{}", period.repeat(reps)));
    long.chars().take(n).collect()
}

pub fn common_prefix(a: &str, b: &str) -> usize {
    a.chars().zip(b.chars()).take_while(|(x, y)| x == y).count()
}

/// Tree distance of the points at depth `i` on two rays from the root.
pub fn tree_distance(a: &str, b: &str, i: usize) -> usize {
    let p = common_prefix(a, b).min(i);
    2 * (i - p)
}

pub fn random_reduced<R: Rng>(rng: &mut R, len: usize) -> String {
    let mut s = String::new();
    while s.len() < len {
        let c = LETTERS[rng.gen_range(0..4)];
        if !s.ends_with(inv(c)) {
            s.push(c);
        }
    }
    s
}

/// A cyclically reduced non-trivial period.
pub fn random_period<R: Rng>(rng: &mut R, max_len: usize) -> String {
    loop {
        let n = rng.gen_range(1..=max_len);
        let s = random_reduced(rng, n);
        let (f, l) = (s.chars().next().unwrap(), s.chars().last().unwrap());
        if s.len() == 1 || f != inv(l) {
            return s;
        }
    }
}

pub fn tree_cert() -> HyperbolicityCertificate {
    HyperbolicityCertificate {
        delta: 0,
        radius_certified: 0,
        method: "tree".into(),
        exact: true,
        triangles_checked: 0,
        witness: None,
    }
}

pub fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}
