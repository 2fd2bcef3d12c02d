//! Homomorphisms between free groups given by generator images.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::words::{parse_raw, push_reduced, Alphabet, CyclicWord, Letter, Word};

#[derive(Clone, Debug)]
pub struct Endomorphism {
    domain_rank: usize,
    codomain_rank: usize,
    images: Vec<Word>,
    // image of every domain letter, including inverses
    letter_images: Vec<Vec<Letter>>,
    inverse: Option<Box<Endomorphism>>,
}

impl PartialEq for Endomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.domain_rank == other.domain_rank
            && self.codomain_rank == other.codomain_rank
            && self.images == other.images
    }
}

impl Eq for Endomorphism {}

impl Endomorphism {
    /// `images[i]` is the image of generator `i`; images are freely reduced.
    pub fn new(domain_rank: usize, codomain_rank: usize, images: Vec<Word>) -> Result<Self> {
        let codomain = Alphabet::new(codomain_rank)?;
        if domain_rank == 0 || images.len() != domain_rank {
            return Err(Error::invalid(format!("expected {domain_rank} generator images, got {}", images.len())));
        }
        for w in &images {
            codomain.check(w.letters())?;
        }
        let letter_images = images.iter().flat_map(|w| [w.letters().to_vec(), w.inverse().letters().to_vec()]).collect();
        Ok(Endomorphism { domain_rank, codomain_rank, images, letter_images, inverse: None })
    }

    /// Attaches an inverse after checking both composites are the identity.
    pub fn with_inverse(mut self, inverse: Endomorphism) -> Result<Self> {
        let ok = inverse.domain_rank == self.codomain_rank
            && inverse.codomain_rank == self.domain_rank
            && self.compose(&inverse).map(|c| c.is_identity()).unwrap_or(false)
            && inverse.compose(&self).map(|c| c.is_identity()).unwrap_or(false);
        if !ok {
            return Err(Error::invalid("proposed inverse does not invert the map"));
        }
        let mut inv = inverse;
        inv.inverse = Some(Box::new(Endomorphism { inverse: None, ..self.clone() }));
        self.inverse = Some(Box::new(inv));
        Ok(self)
    }

    fn from_strs(k: usize, images: &[&str]) -> Self {
        let alphabet = Alphabet::new(k).expect("rank at least 2");
        let words = (0..k)
            .map(|i| match images.get(i) {
                Some(s) => Word::parse(&alphabet, s).expect("valid builtin image"),
                None => Word::from_reduced(vec![Letter::generator(i)]),
            })
            .collect();
        Endomorphism::new(k, k, words).expect("valid builtin")
    }

    fn certified(f: Endomorphism, g: Endomorphism) -> Self {
        f.with_inverse(g).expect("builtin inverse is correct")
    }

    pub fn identity(k: usize) -> Result<Self> {
        Alphabet::new(k)?;
        let id = Endomorphism::from_strs(k, &[]);
        Ok(Endomorphism::certified(id.clone(), id))
    }

    fn single(k: usize, i: usize, image: Vec<Letter>) -> Endomorphism {
        let mut f = Endomorphism::from_strs(k, &[]);
        f.images[i] = Word::from_letters(&image);
        Endomorphism::new(k, k, f.images).expect("valid elementary map")
    }

    fn check_indices(k: usize, idx: &[usize]) -> Result<()> {
        Alphabet::new(k)?;
        if idx.iter().any(|&i| i >= k) {
            return Err(Error::invalid(format!("generator index out of range for rank {k}")));
        }
        if idx.len() == 2 && idx[0] == idx[1] {
            return Err(Error::invalid("the two generator indices must differ"));
        }
        Ok(())
    }

    /// `a_i ↦ a_i a_j`.
    pub fn right_multiply(k: usize, i: usize, j: usize) -> Result<Self> {
        Endomorphism::check_indices(k, &[i, j])?;
        let (gi, gj) = (Letter::generator(i), Letter::generator(j));
        Ok(Endomorphism::certified(
            Endomorphism::single(k, i, vec![gi, gj]),
            Endomorphism::single(k, i, vec![gi, gj.inverse()]),
        ))
    }

    /// `a_i ↦ a_j a_i`.
    pub fn left_multiply(k: usize, i: usize, j: usize) -> Result<Self> {
        Endomorphism::check_indices(k, &[i, j])?;
        let (gi, gj) = (Letter::generator(i), Letter::generator(j));
        Ok(Endomorphism::certified(
            Endomorphism::single(k, i, vec![gj, gi]),
            Endomorphism::single(k, i, vec![gj.inverse(), gi]),
        ))
    }

    /// `a_i ↦ a_i⁻¹`.
    pub fn invert(k: usize, i: usize) -> Result<Self> {
        Endomorphism::check_indices(k, &[i])?;
        let f = Endomorphism::single(k, i, vec![Letter::generator_inverse(i)]);
        Ok(Endomorphism::certified(f.clone(), f))
    }

    /// Exchanges `a_i` and `a_j`.
    pub fn swap(k: usize, i: usize, j: usize) -> Result<Self> {
        Endomorphism::check_indices(k, &[i, j])?;
        let mut images: Vec<Word> = (0..k).map(|g| Word::from_reduced(vec![Letter::generator(g)])).collect();
        images.swap(i, j);
        let f = Endomorphism::new(k, k, images)?;
        Ok(Endomorphism::certified(f.clone(), f))
    }

    /// `τ`: `b ↦ ba`.
    pub fn tau(k: usize) -> Result<Self> {
        Endomorphism::right_multiply(k, 1, 0)
    }

    /// `σ`: `a ↦ ab`.
    pub fn sigma(k: usize) -> Result<Self> {
        Endomorphism::right_multiply(k, 0, 1)
    }

    /// `ϑ`: every generator to its inverse.
    pub fn theta(k: usize) -> Result<Self> {
        Alphabet::new(k)?;
        let images = (0..k).map(|g| Word::from_reduced(vec![Letter::generator_inverse(g)])).collect();
        let f = Endomorphism::new(k, k, images)?;
        Ok(Endomorphism::certified(f.clone(), f))
    }

    /// `φ = στ²`: `a ↦ ab`, `b ↦ babab`.
    pub fn phi(k: usize) -> Result<Self> {
        let t = Endomorphism::tau(k)?;
        Endomorphism::sigma(k)?.compose(&t.compose(&t)?)
    }

    /// `φ⁻¹`: `a ↦ aaaB`, `b ↦ bAA`.
    pub fn phi_inverse(k: usize) -> Result<Self> {
        Endomorphism::phi(k)?.inverse_map()
    }

    pub fn domain_rank(&self) -> usize {
        self.domain_rank
    }

    pub fn codomain_rank(&self) -> usize {
        self.codomain_rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image_of(&self, l: Letter) -> &[Letter] {
        &self.letter_images[l.0 as usize]
    }

    pub fn inverse(&self) -> Option<&Endomorphism> {
        self.inverse.as_deref()
    }

    pub fn inverse_map(&self) -> Result<Endomorphism> {
        self.inverse
            .as_deref()
            .cloned()
            .ok_or_else(|| Error::Unsupported("map carries no certified inverse".into()))
    }

    pub fn is_identity(&self) -> bool {
        self.domain_rank == self.codomain_rank
            && self.images.iter().enumerate().all(|(i, w)| w.letters() == [Letter::generator(i)])
    }

    pub fn is_automorphism_certified(&self) -> bool {
        self.inverse.is_some()
    }

    /// Letterwise substitution followed by free reduction.
    pub fn apply_letters(&self, letters: &[Letter]) -> Vec<Letter> {
        let mut out = Vec::new();
        for &l in letters {
            for &x in self.image_of(l) {
                push_reduced(&mut out, x);
            }
        }
        out
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.min_rank() > self.domain_rank {
            return Err(Error::RankMismatch { expected: self.domain_rank, found: w.min_rank() });
        }
        Ok(Word::from_reduced(self.apply_letters(w.letters())))
    }

    /// Image of a conjugacy class, `None` when it dies.
    pub fn apply_cyclic(&self, w: &CyclicWord) -> Result<Option<CyclicWord>> {
        if w.min_rank() > self.domain_rank {
            return Err(Error::RankMismatch { expected: self.domain_rank, found: w.min_rank() });
        }
        Ok(CyclicWord::from_word(&Word::from_reduced(self.apply_letters(w.letters()))))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism> {
        if other.codomain_rank != self.domain_rank {
            return Err(Error::invalid(format!(
                "cannot compose: inner codomain rank {} differs from outer domain rank {}",
                other.codomain_rank, self.domain_rank
            )));
        }
        let images = other.images.iter().map(|w| Word::from_reduced(self.apply_letters(w.letters()))).collect();
        let mut f = Endomorphism::new(other.domain_rank, self.codomain_rank, images)?;
        if let (Some(si), Some(oi)) = (&self.inverse, &other.inverse) {
            let images = si.images.iter().map(|w| Word::from_reduced(oi.apply_letters(w.letters()))).collect();
            let mut g = Endomorphism::new(self.codomain_rank, other.domain_rank, images)?;
            g.inverse = Some(Box::new(f.clone()));
            f.inverse = Some(Box::new(g));
        }
        Ok(f)
    }

    /// `self^n`; negative powers need a certified inverse.
    pub fn pow(&self, n: i64) -> Result<Endomorphism> {
        if self.domain_rank != self.codomain_rank {
            return Err(Error::invalid("only maps F → F can be iterated"));
        }
        let base = if n < 0 { self.inverse_map()? } else { self.clone() };
        let mut acc = Endomorphism::identity(self.domain_rank)?;
        if base.inverse.is_none() {
            acc.inverse = None;
        }
        for _ in 0..n.unsigned_abs() {
            acc = base.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Injectivity via Stallings folding of the wedge of image loops: the map
    /// is injective iff the folded graph has rank equal to the domain rank.
    pub fn is_injective(&self) -> bool {
        if self.images.iter().any(|w| w.is_empty()) {
            return false;
        }
        folded_rank(&self.images) == self.domain_rank
    }

    /// Parses `a=>ab; b=>babab`. Listed generators must start at `a` and be
    /// consecutive; the codomain rank is at least `k`.
    pub fn parse_images(text: &str, k: usize) -> Result<Endomorphism> {
        let mut images: Vec<Option<Word>> = Vec::new();
        for clause in text.split([';', ',']).map(str::trim).filter(|c| !c.is_empty()) {
            let (lhs, rhs) = clause
                .split_once("=>")
                .ok_or_else(|| Error::invalid(format!("clause '{clause}' lacks '=>'")))?;
            let lhs = parse_raw(lhs)?;
            let g = match lhs.as_slice() {
                [g] if !g.is_inverse() => g.index(),
                _ => return Err(Error::invalid(format!("left side of '{clause}' must be one generator"))),
            };
            if images.len() <= g {
                images.resize(g + 1, None);
            }
            if images[g].is_some() {
                return Err(Error::invalid(format!("generator {} given twice", Letter::generator(g).to_char())));
            }
            images[g] = Some(Word::from_letters(&parse_raw(rhs)?));
        }
        let images: Vec<Word> = images
            .into_iter()
            .enumerate()
            .map(|(g, w)| w.ok_or_else(|| Error::invalid(format!("no image for {}", Letter::generator(g).to_char()))))
            .collect::<Result<_>>()?;
        let codomain = images.iter().map(Word::min_rank).max().unwrap_or(0).max(k).max(images.len());
        Endomorphism::new(images.len(), codomain, images)
    }

    /// Parses a map expression at rank `k`: builtins `id`, `tau`, `sigma`,
    /// `theta`, `phi`, `phi_inv`, explicit image lists, parentheses,
    /// composition `f*g` (apply `g` first) and powers `f^n`, `f^-1`.
    pub fn parse(expr: &str, k: usize) -> Result<Endomorphism> {
        let mut p = Parser { s: expr.as_bytes(), i: 0, k, src: expr };
        let f = p.product()?;
        p.skip_ws();
        if p.i != p.s.len() {
            return Err(Error::invalid(format!("unexpected input at offset {} in '{expr}'", p.i)));
        }
        Ok(f)
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.images.iter().enumerate().map(|(i, w)| format!("{}=>{}", Letter::generator(i).to_char(), w)).collect();
        f.write_str(&parts.join("; "))
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    k: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn product(&mut self) -> Result<Endomorphism> {
        let mut f = self.power()?;
        while self.peek() == Some(b'*') {
            self.i += 1;
            let g = self.power()?;
            f = f.compose(&g)?;
        }
        Ok(f)
    }

    fn power(&mut self) -> Result<Endomorphism> {
        let f = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(f);
        }
        self.i += 1;
        self.skip_ws();
        let start = self.i;
        if self.s.get(self.i) == Some(&b'-') {
            self.i += 1;
        }
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        let n: i64 = self.src[start..self.i]
            .parse()
            .map_err(|_| Error::invalid(format!("bad exponent in '{}'", self.src)))?;
        f.pow(n)
    }

    fn atom(&mut self) -> Result<Endomorphism> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let start = self.i;
                let mut depth = 1;
                while self.i < self.s.len() && depth > 0 {
                    match self.s[self.i] {
                        b'(' => depth += 1,
                        b')' => depth -= 1,
                        _ => {}
                    }
                    self.i += 1;
                }
                if depth != 0 {
                    return Err(Error::invalid(format!("unbalanced parentheses in '{}'", self.src)));
                }
                let inner = &self.src[start..self.i - 1];
                if inner.contains("=>") {
                    Endomorphism::parse_images(inner, self.k)
                } else {
                    Endomorphism::parse(inner, self.k)
                }
            }
            Some(_) => {
                let rest = &self.src[self.i..];
                if rest.contains("=>") && !rest.contains('*') && !rest.contains('^') {
                    self.i = self.s.len();
                    return Endomorphism::parse_images(rest, self.k);
                }
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
                    self.i += 1;
                }
                let k = self.k;
                match &self.src[start..self.i] {
                    "id" => Endomorphism::identity(k),
                    "tau" => Endomorphism::tau(k),
                    "sigma" => Endomorphism::sigma(k),
                    "theta" => Endomorphism::theta(k),
                    "phi" => Endomorphism::phi(k),
                    "phi_inv" => Endomorphism::phi_inverse(k),
                    other => Err(Error::invalid(format!("unknown map '{other}'"))),
                }
            }
            None => Err(Error::invalid(format!("empty map expression in '{}'", self.src))),
        }
    }
}

/// Rank of the subgroup generated by `words`, by Stallings folding.
fn folded_rank(words: &[Word]) -> usize {
    // edges (tail, label, head) with positive labels only; a reversed
    // traversal reads the inverse label
    let mut edges: Vec<(usize, Letter, usize)> = Vec::new();
    let mut nv = 1;
    for w in words {
        let letters = w.letters();
        let mut prev = 0;
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() {
                0
            } else {
                nv += 1;
                nv - 1
            };
            if l.is_inverse() {
                edges.push((next, l.inverse(), prev));
            } else {
                edges.push((prev, l, next));
            }
            prev = next;
        }
    }
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    loop {
        let mut canon: BTreeSet<(usize, Letter, usize)> = BTreeSet::new();
        for &(a, l, b) in &edges {
            let (a, b) = (find(&mut parent, a), find(&mut parent, b));
            canon.insert((a, l, b));
        }
        edges = canon.into_iter().collect();
        // look for two edges leaving (or entering) one vertex with one label
        let mut merge = None;
        let mut seen_out = std::collections::BTreeMap::new();
        let mut seen_in = std::collections::BTreeMap::new();
        for &(a, l, b) in &edges {
            if let Some(&b2) = seen_out.get(&(a, l)) {
                if b2 != b {
                    merge = Some((b2, b));
                    break;
                }
            }
            seen_out.insert((a, l), b);
            if let Some(&a2) = seen_in.get(&(b, l)) {
                if a2 != a {
                    merge = Some((a2, a));
                    break;
                }
            }
            seen_in.insert((b, l), a);
        }
        match merge {
            Some((x, y)) => {
                let (x, y) = (find(&mut parent, x), find(&mut parent, y));
                let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                parent[hi] = lo;
            }
            None => break,
        }
    }
    let vertices: BTreeSet<usize> = edges.iter().flat_map(|&(a, _, b)| [a, b]).chain([0]).collect();
    edges.len() + 1 - vertices.len()
}

/// A random product of `1..=max_len` elementary Nielsen maps, with its
/// certified inverse.
pub fn random_nielsen<R: Rng + ?Sized>(k: usize, max_len: usize, rng: &mut R) -> Result<Endomorphism> {
    let len = rng.gen_range(1..=max_len.max(1));
    let mut f = Endomorphism::identity(k)?;
    for _ in 0..len {
        let i = rng.gen_range(0..k);
        let mut j = rng.gen_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        let g = match rng.gen_range(0..4) {
            0 => Endomorphism::right_multiply(k, i, j)?,
            1 => Endomorphism::left_multiply(k, i, j)?,
            2 => Endomorphism::invert(k, i)?,
            _ => Endomorphism::swap(k, i, j)?,
        };
        f = g.compose(&f)?;
    }
    Ok(f)
}
