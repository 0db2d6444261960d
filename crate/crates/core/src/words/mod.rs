//! Free-group words over the darts of a rose, Dehn's algorithm for
//! `F / <<w^n>>` and reduced van Kampen diagrams.

mod dehn;
mod diagram;

pub use dehn::{dehn_solve, dehn_solve_with, DehnConfig, DehnError, DehnOutcome, Replacement, Threshold};
pub use diagram::{build_reduced_diagram, DiagramError, VanKampenDiagram};

use std::fmt;

use thiserror::Error;

use crate::complex::{Dart, Graph};

/// A word in the free group on the petals of a rose: each letter is a dart,
/// forward darts are generators and backward darts their inverses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Dart>);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("empty word")]
    Empty,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

/// Result of the proper-power test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerInfo {
    pub is_proper_power: bool,
    pub root: Word,
    pub exponent: usize,
}

impl Word {
    pub fn new(letters: Vec<Dart>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Dart] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(crate::complex::reverse_path(&self.0))
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, k: usize) -> Word {
        Word(self.0.iter().copied().cycle().take(self.len() * k).collect())
    }

    pub fn free_reduce(&self, cyclic: bool) -> Word {
        free_reduce(self, cyclic)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[1] != p[0].reverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_freely_reduced()
            && (self.len() < 2 || self.0[0] != self.0[self.len() - 1].reverse())
    }

    /// Parses whitespace-separated generator names, `~` marking an inverse.
    pub fn parse(text: &str, gamma: &Graph) -> Result<Word, WordError> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            let (name, inv) = match tok.strip_suffix('~') {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let e = gamma
                .find_edge(name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            out.push(Dart::new(e, inv));
        }
        Ok(Word(out))
    }

    pub fn render(&self, gamma: &Graph) -> String {
        render_darts(&self.0, gamma)
    }
}

pub(crate) fn render_darts(darts: &[Dart], gamma: &Graph) -> String {
    let mut s = String::new();
    for (i, d) in darts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&gamma.edge(d.edge()).name);
        if d.is_reversed() {
            s.push('~');
        }
    }
    s
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Free reduction; with `cyclic`, also cancels across the seam.
pub fn free_reduce(u: &Word, cyclic: bool) -> Word {
    let mut out: Vec<Dart> = Vec::with_capacity(u.len());
    for &d in &u.0 {
        if out.last() == Some(&d.reverse()) {
            out.pop();
        } else {
            out.push(d);
        }
    }
    if cyclic {
        let mut lo = 0;
        let mut hi = out.len();
        while hi - lo >= 2 && out[lo] == out[hi - 1].reverse() {
            lo += 1;
            hi -= 1;
        }
        out = out[lo..hi].to_vec();
    }
    Word(out)
}

/// Maximal `k` with `u = root^k` as cyclic words, by scanning rotations.
pub fn is_proper_power(u: &Word) -> Result<PowerInfo, WordError> {
    let len = u.len();
    if len == 0 {
        return Err(WordError::Empty);
    }
    let period = (1..=len)
        .find(|&p| len % p == 0 && (0..len).all(|i| u.0[i] == u.0[(i + p) % len]))
        .unwrap_or(len);
    let exponent = len / period;
    Ok(PowerInfo {
        is_proper_power: exponent >= 2,
        root: Word(u.0[..period].to_vec()),
        exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rose() -> Graph {
        Graph::rose(&["a", "b"])
    }

    fn w(s: &str) -> Word {
        Word::parse(s, &rose()).unwrap()
    }

    #[test]
    fn free_reduction_examples() {
        assert_eq!(w("a a~ b").free_reduce(false), w("b"));
        assert_eq!(w("b~ a b").free_reduce(true), w("a"));
        let r = w("a b a~ b~");
        assert_eq!(r.free_reduce(true), r);
        assert_eq!(w("a b b~ a~").free_reduce(false), Word::empty());
    }

    #[test]
    fn proper_powers() {
        let p = is_proper_power(&w("a b a b")).unwrap();
        assert_eq!((p.is_proper_power, p.root.clone(), p.exponent), (true, w("a b"), 2));
        let p = is_proper_power(&w("a b")).unwrap();
        assert_eq!((p.is_proper_power, p.exponent), (false, 1));
        let p = is_proper_power(&w("a b a b a b")).unwrap();
        assert_eq!((p.root, p.exponent), (w("a b"), 3));
        assert_eq!(is_proper_power(&Word::empty()), Err(WordError::Empty));
    }

    #[test]
    fn proper_power_agrees_with_rotation_brute_force() {
        // every cyclic word of length <= 6 over {a, b, a~, b~}
        let letters = [Dart(0), Dart(1), Dart(2), Dart(3)];
        for len in 1..=6usize {
            for code in 0..4usize.pow(len as u32) {
                let mut c = code;
                let u: Vec<Dart> = (0..len)
                    .map(|_| {
                        let d = letters[c % 4];
                        c /= 4;
                        d
                    })
                    .collect();
                let word = Word(u.clone());
                let info = is_proper_power(&word).unwrap();
                let brute = (2..=len)
                    .filter(|k| len % k == 0)
                    .filter(|k| {
                        let p = len / k;
                        (0..len).all(|i| u[i] == u[i % p])
                    })
                    .max()
                    .unwrap_or(1);
                assert_eq!(info.exponent, brute, "{word}");
                assert_eq!(info.root.pow(info.exponent), word);
            }
        }
    }

    #[test]
    fn parse_and_render() {
        let g = rose();
        let u = w("a b~ a");
        assert_eq!(u.render(&g), "a b~ a");
        assert_eq!(
            Word::parse("c", &g),
            Err(WordError::UnknownGenerator("c".into()))
        );
    }
}
