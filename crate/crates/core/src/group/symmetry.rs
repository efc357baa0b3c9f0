//! Relabelings of the generators that extend to automorphisms of the group.
//! They act on the Cayley graph as isometries fixing `1_G`.

use std::collections::BTreeSet;

use super::{Gen, GeneratorAlphabet};

/// Letter permutations commuting with inversion and preserving the symmetrised
/// relator set. The identity comes first. Alphabets above 12 letters only get
/// the identity.
pub fn label_symmetries(alphabet: &GeneratorAlphabet, relators: &[Vec<Gen>]) -> Vec<Vec<Gen>> {
    let n = alphabet.len();
    let identity: Vec<Gen> = alphabet.gens().collect();
    if n > 12 || !alphabet.is_fixed_point_free() {
        return vec![identity];
    }
    let closure = symmetrise(alphabet, relators);
    // One representative per inverse pair; each maps to a letter of a free pair.
    let reps: Vec<Gen> = alphabet
        .gens()
        .filter(|&s| s < alphabet.inverse(s))
        .collect();
    let mut out = vec![identity.clone()];
    let mut image = vec![Gen::MAX; n];
    let mut used = vec![false; n];
    extend(alphabet, &reps, 0, &mut image, &mut used, &mut |img| {
        if img != identity.as_slice() && preserves(img, &closure) {
            out.push(img.to_vec());
        }
    });
    out
}

fn extend(
    alphabet: &GeneratorAlphabet,
    reps: &[Gen],
    i: usize,
    image: &mut Vec<Gen>,
    used: &mut Vec<bool>,
    emit: &mut dyn FnMut(&[Gen]),
) {
    if i == reps.len() {
        emit(image);
        return;
    }
    let s = reps[i];
    for t in alphabet.gens() {
        let ti = alphabet.inverse(t);
        if used[t as usize] || used[ti as usize] {
            continue;
        }
        image[s as usize] = t;
        image[alphabet.inverse(s) as usize] = ti;
        used[t as usize] = true;
        used[ti as usize] = true;
        extend(alphabet, reps, i + 1, image, used, emit);
        used[t as usize] = false;
        used[ti as usize] = false;
    }
}

fn symmetrise(alphabet: &GeneratorAlphabet, relators: &[Vec<Gen>]) -> BTreeSet<Vec<Gen>> {
    let mut set = BTreeSet::new();
    for r in relators {
        for w in [r.clone(), alphabet.invert(r)] {
            for k in 0..w.len().max(1) {
                let mut c = w[k..].to_vec();
                c.extend_from_slice(&w[..k]);
                set.insert(c);
            }
        }
    }
    set
}

fn preserves(image: &[Gen], closure: &BTreeSet<Vec<Gen>>) -> bool {
    closure
        .iter()
        .all(|w| closure.contains(&w.iter().map(|&s| image[s as usize]).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_rank_two_has_eight() {
        let a = GeneratorAlphabet::free(2);
        assert_eq!(label_symmetries(&a, &[]).len(), 8);
    }

    #[test]
    fn commutator_keeps_all_eight() {
        // every signed permutation maps abAB to a cyclic conjugate of it or of its inverse
        let a = GeneratorAlphabet::free(2);
        let r = a.parse("abAB").unwrap();
        assert_eq!(label_symmetries(&a, &[r]).len(), 8);
    }

    #[test]
    fn lopsided_relator_keeps_only_total_inversion() {
        // AAB is a rotation of the inverse BAA; swapping a and b never works
        let a = GeneratorAlphabet::free(2);
        let r = a.parse("aab").unwrap();
        let syms = label_symmetries(&a, &[r]);
        assert_eq!(syms.len(), 2);
        assert_eq!(syms[1], vec![1, 0, 3, 2]);
    }
}
