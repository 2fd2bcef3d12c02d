//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use geocurrents::morphisms::Endomorphism;
use geocurrents::words::{random_cyclic_word, symmetric_count, trial_rng, Alphabet, CyclicWord, Word};

pub type Identity = (&'static str, fn(&Maps, &CyclicWord) -> (i64, i64));

pub struct Maps {
    pub tau: Endomorphism,
    pub sigma: Endomorphism,
    pub tau_inv: Endomorphism,
    pub sigma_inv: Endomorphism,
}

impl Maps {
    pub fn new() -> Self {
        let tau = Endomorphism::tau(2).unwrap();
        let sigma = Endomorphism::sigma(2).unwrap();
        Maps { tau_inv: tau.inverse_map().unwrap(), sigma_inv: sigma.inverse_map().unwrap(), tau, sigma }
    }
}

/// Image of a cyclic word under a composite, applied right to left.
pub fn img(fs: &[&Endomorphism], w: &CyclicWord) -> CyclicWord {
    fs.iter().rev().fold(w.clone(), |w, f| f.apply_cyclic(&w).unwrap().expect("automorphisms keep words nontrivial"))
}

pub fn n(v: &str, w: &CyclicWord) -> i64 {
    let v: Word = v.parse().unwrap();
    symmetric_count(&v, w).unwrap() as i64
}

pub fn len(w: &CyclicWord) -> i64 {
    w.len() as i64
}

pub fn corpus() -> Vec<CyclicWord> {
    let alphabet = Alphabet::new(2).unwrap();
    let mut rng = trial_rng(0x1de7, 0);
    (0..1000).map(|_| random_cyclic_word(&alphabet, 200, &mut rng)).collect()
}

/// Identities that hold as written.
pub const HOLDING: &[Identity] = &[
    ("n(b, τw) = n(b, w)", |m, w| (n("b", &img(&[&m.tau], w)), n("b", w))),
    ("n(aB, τw) = n(bA, τw)", |m, w| {
        let t = img(&[&m.tau], w);
        (n("aB", &t), n("bA", &t))
    }),
    ("n(bA, τw) = n(bAB, w) + n(bAA, w)", |m, w| (n("bA", &img(&[&m.tau], w)), n("bAB", w) + n("bAA", w))),
    ("|τw| = |w| + n(b, w) - 2n(bA, w)", |m, w| (len(&img(&[&m.tau], w)), len(w) + n("b", w) - 2 * n("bA", w))),
    ("|τw| = |w| + n(a, τw) - n(a, w)", |m, w| {
        let t = img(&[&m.tau], w);
        (len(&t), len(w) + n("a", &t) - n("a", w))
    }),
    ("n(a, τw) = n(a, w) + n(b, w) - 2n(bA, w)", |m, w| {
        (n("a", &img(&[&m.tau], w)), n("a", w) + n("b", w) - 2 * n("bA", w))
    }),
    ("n(bAB, τw) = n(bAB, w)", |m, w| (n("bAB", &img(&[&m.tau], w)), n("bAB", w))),
    ("n(bAA, τw) = n(bAAA, w) + n(bAAB, w)", |m, w| (n("bAA", &img(&[&m.tau], w)), n("bAAA", w) + n("bAAB", w))),
    ("n(b, τ²w) = n(b, w)", |m, w| (n("b", &img(&[&m.tau, &m.tau], w)), n("b", w))),
    ("n(bA, τ²w) = n(bAB, w) + n(bAAA, w) + n(bAAB, w)", |m, w| {
        (n("bA", &img(&[&m.tau, &m.tau], w)), n("bAB", w) + n("bAAA", w) + n("bAAB", w))
    }),
    ("n(a, τ²w) = n(a) + 2n(b) - 2n(bA) - 2n(bAB) - 2n(bAA)", |m, w| {
        (
            n("a", &img(&[&m.tau, &m.tau], w)),
            n("a", w) + 2 * n("b", w) - 2 * n("bA", w) - 2 * n("bAB", w) - 2 * n("bAA", w),
        )
    }),
    ("|τ²w| = |w| + 2n(b) - 2n(bA) - 2n(bAB) - 2n(bAA)", |m, w| {
        (
            len(&img(&[&m.tau, &m.tau], w)),
            len(w) + 2 * n("b", w) - 2 * n("bA", w) - 2 * n("bAB", w) - 2 * n("bAA", w),
        )
    }),
    ("|σw| = |w| + n(a, w) - 2n(aB, w)", |m, w| (len(&img(&[&m.sigma], w)), len(w) + n("a", w) - 2 * n("aB", w))),
    ("|στ²w| expanded", |m, w| {
        (
            len(&img(&[&m.sigma, &m.tau, &m.tau], w)),
            len(w) + 4 * n("b", w) + n("a", w)
                - 4 * n("bA", w)
                - 6 * n("bAB", w)
                - 4 * n("bAA", w)
                - 2 * n("bAAA", w)
                - 2 * n("bAAB", w),
        )
    }),
    ("|τ⁻¹w| = |w| + n(b, w) - 2n(ba, w)", |m, w| {
        (len(&img(&[&m.tau_inv], w)), len(w) + n("b", w) - 2 * n("ba", w))
    }),
    ("|τ⁻¹w| = |w| + n(a, τ⁻¹w) - n(a, w)", |m, w| {
        let t = img(&[&m.tau_inv], w);
        (len(&t), len(w) + n("a", &t) - n("a", w))
    }),
    ("n(a, τ⁻¹w) = n(a, w) + n(b, w) - 2n(ba, w)", |m, w| {
        (n("a", &img(&[&m.tau_inv], w)), n("a", w) + n("b", w) - 2 * n("ba", w))
    }),
    ("|σ⁻¹w| = |w| + n(a, w) - 2n(ab, w)", |m, w| {
        (len(&img(&[&m.sigma_inv], w)), len(w) + n("a", w) - 2 * n("ab", w))
    }),
    ("|σ⁻¹w| = |w| + n(b, σ⁻¹w) - n(b, w)", |m, w| {
        let s = img(&[&m.sigma_inv], w);
        (len(&s), len(w) + n("b", &s) - n("b", w))
    }),
    ("n(b, σ⁻¹w) = n(a, w) + n(b, w) - 2n(ab, w)", |m, w| {
        (n("b", &img(&[&m.sigma_inv], w)), n("a", w) + n("b", w) - 2 * n("ab", w))
    }),
    ("n(ba, σ⁻¹w) = n(ba, w) - n(aba, w)", |m, w| (n("ba", &img(&[&m.sigma_inv], w)), n("ba", w) - n("aba", w))),
    ("n(baa, σ⁻¹w) = n(baba, w) - n(ababa, w)", |m, w| {
        (n("baa", &img(&[&m.sigma_inv], w)), n("baba", w) - n("ababa", w))
    }),
];

/// Plausible variants that fail on random words.
pub const STATED_FALSE: &[Identity] = &[
    ("n(ba, τ⁻¹w) = n(baa, w)", |m, w| (n("ba", &img(&[&m.tau_inv], w)), n("baa", w))),
    ("|τ⁻²w| = |w| + 2n(b) - 2n(ba) - 2n(baa)", |m, w| {
        (len(&img(&[&m.tau_inv, &m.tau_inv], w)), len(w) + 2 * n("b", w) - 2 * n("ba", w) - 2 * n("baa", w))
    }),
    ("|τ⁻²σ⁻¹w| = |w| + 2n(a) + 2n(b) - 4n(ab) - 2n(ba) + 2n(aba) - 2n(baba) + 2n(ababa)", |m, w| {
        (
            len(&img(&[&m.tau_inv, &m.tau_inv, &m.sigma_inv], w)),
            len(w) + 2 * n("a", w) + 2 * n("b", w) - 4 * n("ab", w) - 2 * n("ba", w) + 2 * n("aba", w)
                - 2 * n("baba", w)
                + 2 * n("ababa", w),
        )
    }),
];

/// The correct forms of those variants.
pub const CORRECTED: &[Identity] = &[
    ("n(ba, τ⁻¹w) = n(baa, w) + n(baB, w)", |m, w| (n("ba", &img(&[&m.tau_inv], w)), n("baa", w) + n("baB", w))),
    ("|τ⁻²w| = |w| + 2n(b) - 2n(ba) - 2n(baa) - 2n(baB)", |m, w| {
        (
            len(&img(&[&m.tau_inv, &m.tau_inv], w)),
            len(w) + 2 * n("b", w) - 2 * n("ba", w) - 2 * n("baa", w) - 2 * n("baB", w),
        )
    }),
    ("n(baB, σ⁻¹w) = n(ba) - n(aba) - n(bab) + n(abab)", |m, w| {
        (n("baB", &img(&[&m.sigma_inv], w)), n("ba", w) - n("aba", w) - n("bab", w) + n("abab", w))
    }),
    ("|τ⁻²σ⁻¹w| expanded", |m, w| {
        (
            len(&img(&[&m.tau_inv, &m.tau_inv, &m.sigma_inv], w)),
            len(w) + 3 * n("a", w) + 2 * n("b", w) - 6 * n("ab", w) - 4 * n("ba", w) + 4 * n("aba", w)
                + 2 * n("bab", w)
                - 2 * n("abab", w)
                - 2 * n("baba", w)
                + 2 * n("ababa", w),
        )
    }),
];

pub fn first_failure(id: &Identity, maps: &Maps, words: &[CyclicWord]) -> Option<(CyclicWord, i64, i64)> {
    words.iter().find_map(|w| {
        let (l, r) = (id.1)(maps, w);
        (l != r).then(|| (w.clone(), l, r))
    })
}

