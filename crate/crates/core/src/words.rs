//! Letters, freely reduced words and cyclic words over a free basis.
//!
//! A [`Letter`] is stored as `2 * generator + sign`, so the formal inverse is
//! the letter with the low bit flipped and the total order is
//! `a < A < b < B < ...`. The same encoding indexes oriented edges of a
//! chart (edge `e` forward is `2e`, reversed is `2e + 1`), which lets the
//! reduction and necklace routines below serve both words and edge paths.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u32);

impl Letter {
    pub fn generator(index: usize) -> Self {
        Letter(2 * index as u32)
    }

    pub fn generator_inverse(index: usize) -> Self {
        Letter(2 * index as u32 + 1)
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    #[inline]
    pub fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// Signed form: generator `i` is `i + 1`, its inverse `-(i + 1)`.
    pub fn to_signed(self) -> i32 {
        let g = self.index() as i32 + 1;
        if self.is_inverse() {
            -g
        } else {
            g
        }
    }

    pub fn from_signed(s: i32) -> Result<Self> {
        match s {
            0 => Err(Error::invalid("letter 0 does not exist")),
            s if s > 0 => Ok(Letter::generator(s as usize - 1)),
            s => Ok(Letter::generator_inverse((-s) as usize - 1)),
        }
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'a'..='z' => Ok(Letter::generator(c as usize - 'a' as usize)),
            'A'..='Z' => Ok(Letter::generator_inverse(c as usize - 'A' as usize)),
            _ => Err(Error::invalid(format!("'{c}' is not a letter"))),
        }
    }

    pub fn to_char(self) -> char {
        let i = self.index();
        if i >= 26 {
            return '?';
        }
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + i as u8) as char
    }
}

/// The symmetric generating set of a free group of rank `k >= 2`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    rank: usize,
}

impl Alphabet {
    pub fn new(rank: usize) -> Result<Self> {
        if rank < 2 {
            return Err(Error::invalid(format!("rank must be at least 2, got {rank}")));
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of letters, `2k`.
    pub fn size(&self) -> usize {
        2 * self.rank
    }

    pub fn contains(&self, l: Letter) -> bool {
        l.index() < self.rank
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..2 * self.rank as u32).map(Letter)
    }

    pub fn check(&self, letters: &[Letter]) -> Result<()> {
        match letters.iter().find(|l| !self.contains(**l)) {
            Some(l) => Err(Error::invalid(format!(
                "letter {} is outside the rank-{} alphabet",
                l.to_signed(),
                self.rank
            ))),
            None => Ok(()),
        }
    }

    /// Parses letters (`a..z`, `A..Z` for inverses) without reducing them.
    /// Whitespace is ignored.
    pub fn parse_letters(&self, text: &str) -> Result<Vec<Letter>> {
        let letters = parse_raw(text)?;
        self.check(&letters)?;
        Ok(letters)
    }
}

pub(crate) fn parse_raw(text: &str) -> Result<Vec<Letter>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(Letter::from_char)
        .collect()
}

pub(crate) fn letters_to_string(letters: &[Letter]) -> String {
    letters.iter().map(|l| l.to_char()).collect()
}

/// Free reduction by a single stack pass.
pub fn free_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        push_reduced(&mut out, l);
    }
    out
}

#[inline]
pub(crate) fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    if stack.last() == Some(&l.inverse()) {
        stack.pop();
    } else {
        stack.push(l);
    }
}

pub(crate) fn is_freely_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|p| p[1] != p[0].inverse())
}

pub(crate) fn is_cyclically_reduced(letters: &[Letter]) -> bool {
    is_freely_reduced(letters)
        && match (letters.first(), letters.last()) {
            (Some(f), Some(l)) => letters.len() == 1 || *f != l.inverse(),
            _ => true,
        }
}

/// For a freely reduced sequence, the number of letters stripped from each
/// end to make it cyclically reduced.
pub(crate) fn cyclic_core_offset(reduced: &[Letter]) -> usize {
    let n = reduced.len();
    let mut i = 0;
    while 2 * i + 1 < n && reduced[i] == reduced[n - 1 - i].inverse() {
        i += 1;
    }
    i
}

pub(crate) fn inverse_letters(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

/// Start index of the lexicographically least rotation (Booth's algorithm).
pub fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| s[i % n];
    let mut fail: Vec<isize> = vec![-1; 2 * n];
    let mut k: usize = 0;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = fail[j - k - 1];
        while i != -1 && sj != at(k + i as usize + 1) {
            if sj < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = fail[i as usize];
        }
        if sj != at((k as isize + i + 1) as usize) {
            // here i == -1
            if sj < at(k) {
                k = j;
            }
            fail[j - k] = -1;
        } else {
            fail[j - k] = i + 1;
        }
    }
    k % n
}

pub(crate) fn canonical_rotation(s: &[Letter]) -> Vec<Letter> {
    let r = least_rotation(s);
    s[r..].iter().chain(s[..r].iter()).copied().collect()
}

/// Occurrences of `v` on the necklace `w`, wrapping around as often as
/// needed; each start position on the necklace is counted once.
pub(crate) fn necklace_count(v: &[Letter], w: &[Letter]) -> u64 {
    let n = w.len();
    if n == 0 || v.is_empty() {
        return 0;
    }
    (0..n)
        .filter(|&i| v.iter().enumerate().all(|(t, &l)| w[(i + t) % n] == l))
        .count() as u64
}

/// Calls `f` with the length-`m` window starting at each necklace position.
pub(crate) fn necklace_windows(w: &[Letter], m: usize, mut f: impl FnMut(&[Letter])) {
    let n = w.len();
    let mut buf = Vec::with_capacity(m);
    for i in 0..n {
        buf.clear();
        buf.extend((0..m).map(|t| w[(i + t) % n]));
        f(&buf);
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Freely reduces `letters`, all of which must come from `alphabet`.
    pub fn reduce(alphabet: &Alphabet, letters: &[Letter]) -> Result<Self> {
        alphabet.check(letters)?;
        Ok(Word { letters: free_reduce(letters) })
    }

    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(is_freely_reduced(&letters));
        Word { letters }
    }

    pub(crate) fn from_letters(letters: &[Letter]) -> Self {
        Word { letters: free_reduce(letters) }
    }

    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let raw = alphabet.parse_letters(text)?;
        Ok(Word { letters: free_reduce(&raw) })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: inverse_letters(&self.letters) }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut out, l);
        }
        Word { letters: out }
    }

    pub fn pow(&self, n: usize) -> Word {
        (0..n).fold(Word::identity(), |acc, _| acc.concat(self))
    }

    /// Largest generator index used plus one (0 for the identity).
    pub fn min_rank(&self) -> usize {
        self.letters.iter().map(|l| l.index() + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&letters_to_string(&self.letters))
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses without an alphabet bound; use [`Word::parse`] to enforce one.
    fn from_str(s: &str) -> Result<Self> {
        Ok(Word::from_letters(&parse_raw(s)?))
    }
}

/// A conjugacy class representative: a nonempty cyclically reduced word in
/// its least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

impl CyclicWord {
    /// Cyclic word of the conjugacy class of `w`, `None` for the identity.
    pub fn from_word(w: &Word) -> Option<Self> {
        cyclic_reduce(w).0
    }

    /// Cyclically reduces an arbitrary letter sequence.
    pub fn from_letters(letters: &[Letter]) -> Option<Self> {
        CyclicWord::from_word(&Word::from_letters(letters))
    }

    pub(crate) fn from_cyclically_reduced(letters: &[Letter]) -> Self {
        debug_assert!(!letters.is_empty() && is_cyclically_reduced(letters));
        CyclicWord { letters: canonical_rotation(letters) }
    }

    /// Accepts `~ab` or `ab`; the input is reduced and cyclically reduced.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Self> {
        let body = text.trim().trim_start_matches('~');
        let w = Word::parse(alphabet, body)?;
        CyclicWord::from_word(&w)
            .ok_or_else(|| Error::invalid(format!("'{text}' is the trivial conjugacy class")))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::from_cyclically_reduced(&inverse_letters(&self.letters))
    }

    pub fn to_word(&self) -> Word {
        Word { letters: self.letters.clone() }
    }

    pub fn min_rank(&self) -> usize {
        self.letters.iter().map(|l| l.index() + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "~{}", letters_to_string(&self.letters))
    }
}

impl FromStr for CyclicWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('~');
        CyclicWord::from_letters(&parse_raw(body)?)
            .ok_or_else(|| Error::invalid(format!("'{s}' is the trivial conjugacy class")))
    }
}

/// Splits `w = conjugator · core · conjugator⁻¹` with `core` cyclically
/// reduced. The core comes back in canonical rotation (`None` when `w` is
/// trivial).
pub fn cyclic_reduce(w: &Word) -> (Option<CyclicWord>, Word) {
    let letters = w.letters();
    let off = cyclic_core_offset(letters);
    let conjugator = Word { letters: letters[..off].to_vec() };
    let core = &letters[off..letters.len() - off];
    if core.is_empty() {
        (None, conjugator)
    } else {
        (Some(CyclicWord::from_cyclically_reduced(core)), conjugator)
    }
}

/// `⟨v, w⟩`: the number of positions on the necklace `w` at which `v` can be
/// read going forward.
pub fn count_occurrences(v: &Word, w: &CyclicWord) -> Result<u64> {
    if v.is_empty() {
        return Err(Error::invalid("cannot count occurrences of the empty word"));
    }
    Ok(necklace_count(v.letters(), w.letters()))
}

/// `n(v, w) = ⟨v, w⟩ + ⟨v⁻¹, w⟩`.
pub fn symmetric_count(v: &Word, w: &CyclicWord) -> Result<u64> {
    Ok(count_occurrences(v, w)? + count_occurrences(&v.inverse(), w)?)
}

/// Deterministic random stream for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform non-backtracking word of length `n`: the first letter is uniform
/// over all `2k` letters, every later one uniform over the `2k - 1` letters
/// that do not cancel.
pub fn random_reduced_word<R: Rng + ?Sized>(alphabet: &Alphabet, n: usize, rng: &mut R) -> Result<Word> {
    if n == 0 {
        return Err(Error::invalid("random word length must be at least 1"));
    }
    Ok(Word { letters: random_letters(alphabet.size(), n, rng) })
}

pub(crate) fn random_letters<R: Rng + ?Sized>(size: usize, n: usize, rng: &mut R) -> Vec<Letter> {
    let mut out = Vec::with_capacity(n);
    let first = Letter(rng.gen_range(0..size as u32));
    out.push(first);
    let mut prev = first;
    for _ in 1..n {
        let banned = prev.inverse().0;
        let mut r = rng.gen_range(0..size as u32 - 1);
        if r >= banned {
            r += 1;
        }
        prev = Letter(r);
        out.push(prev);
    }
    out
}

/// Random nontrivial cyclic word of length at most `max_len`.
pub fn random_cyclic_word<R: Rng + ?Sized>(alphabet: &Alphabet, max_len: usize, rng: &mut R) -> CyclicWord {
    loop {
        let n = rng.gen_range(1..=max_len.max(1));
        let w = Word { letters: random_letters(alphabet.size(), n, rng) };
        if let Some(c) = CyclicWord::from_word(&w) {
            return c;
        }
    }
}

/// All cyclic words (one per conjugacy class) of length `1..=max_len`.
pub fn all_cyclic_words(alphabet: &Alphabet, max_len: usize) -> Vec<CyclicWord> {
    let mut out = Vec::new();
    for n in 1..=max_len {
        for_each_reduced(alphabet.size(), n, &mut |w| {
            if is_cyclically_reduced(w) && least_rotation(w) == 0 {
                out.push(CyclicWord { letters: w.to_vec() });
            }
        });
    }
    out
}

/// Enumerates all freely reduced sequences of length `n` over `size` letters
/// in lexicographic order.
pub(crate) fn for_each_reduced(size: usize, n: usize, f: &mut dyn FnMut(&[Letter])) {
    fn go(size: usize, n: usize, buf: &mut Vec<Letter>, f: &mut dyn FnMut(&[Letter])) {
        if buf.len() == n {
            f(buf);
            return;
        }
        for x in 0..size as u32 {
            let l = Letter(x);
            if buf.last() == Some(&l.inverse()) {
                continue;
            }
            buf.push(l);
            go(size, n, buf, f);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(n);
    go(size, n, &mut buf, f);
}
