//! Reduced words in the free product of order-two groups.
//!
//! A word is stored as maximal alternating runs `a b a b ...`, so unipotent
//! powers `(σ_i σ_j)^k` with `k` in the billions cost O(1) memory. The
//! letter sequence is read left to right and the rightmost letter acts first.

use std::fmt;

/// Alternating run `a, b, a, b, ...` of `len` letters. For `len == 1` the
/// second letter is stored equal to the first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Run {
    pub a: u32,
    pub b: u32,
    pub len: u64,
}

impl Run {
    /// Letter at position `k` of the run.
    pub fn letter(&self, k: u64) -> u32 {
        if k % 2 == 0 {
            self.a
        } else {
            self.b
        }
    }
    pub fn first(&self) -> u32 {
        self.a
    }
    pub fn last(&self) -> u32 {
        self.letter(self.len - 1)
    }
}

/// Reduced word, canonical up to letter sequence (greedy maximal runs).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    runs: Vec<Run>,
    len: u64,
}

impl Word {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a word from letters, collapsing `σ_i σ_i`.
    pub fn from_letters<I: IntoIterator<Item = usize>>(letters: I) -> Self {
        let mut w = Word::new();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// `(a b)^k` as a word of `2k` letters.
    pub fn alternating_power(a: usize, b: usize, k: u64) -> Self {
        let mut w = Word::new();
        w.push_alternating(a, b, 2 * k);
        w
    }

    /// Total number of letters.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn first_letter(&self) -> Option<usize> {
        self.runs.first().map(|r| r.first() as usize)
    }

    pub fn last_letter(&self) -> Option<usize> {
        self.runs.last().map(|r| r.last() as usize)
    }

    /// Largest generator index used, if any.
    pub fn max_letter(&self) -> Option<usize> {
        self.runs.iter().map(|r| r.a.max(r.b) as usize).max()
    }

    /// Appends one letter on the right.
    pub fn push(&mut self, letter: usize) {
        self.push_alternating(letter, letter, 1);
    }

    /// Removes the rightmost letter.
    pub fn pop(&mut self) -> Option<usize> {
        let l = self.last_letter()?;
        self.pop_n(1);
        Some(l)
    }

    /// Removes up to `m` letters from the last run.
    fn pop_n(&mut self, m: u64) {
        let Some(run) = self.runs.last_mut() else { return };
        let m = m.min(run.len);
        run.len -= m;
        if run.len == 0 {
            self.runs.pop();
        } else if run.len == 1 {
            run.b = run.a;
        }
        self.len -= m;
    }

    /// Appends `n` letters `a, b, a, b, ...` on the right, cancelling any
    /// adjacent equal letters.
    pub fn push_alternating(&mut self, a: usize, b: usize, n: u64) {
        let (mut a, mut b, mut n) = (a as u32, b as u32, n);
        if n == 0 {
            return;
        }
        if n == 1 {
            b = a;
        }
        // Cancellation: the tail read backwards against the incoming letters.
        while n > 0 {
            let Some(tail) = self.runs.last().copied() else { break };
            if tail.last() != a {
                break;
            }
            let m = if tail.len >= 2 && n >= 2 && tail.letter(tail.len - 2) == b {
                tail.len.min(n)
            } else {
                1
            };
            self.pop_n(m);
            n -= m;
            if m % 2 == 1 {
                std::mem::swap(&mut a, &mut b);
            }
            if n == 1 {
                b = a;
            }
        }
        if n == 0 {
            return;
        }
        // Absorb a prefix into the tail run, keeping runs maximal from the left.
        if let Some(tail) = self.runs.last_mut() {
            let (expect, after) = if tail.len == 1 {
                (None, tail.a)
            } else {
                (Some(tail.letter(tail.len)), tail.letter(tail.len + 1))
            };
            let first_fits = match expect {
                Some(e) => e == a,
                None => true,
            };
            if first_fits {
                let take = if n >= 2 && b == after { n } else { 1 };
                if tail.len == 1 {
                    tail.b = a;
                }
                tail.len += take;
                self.len += take;
                n -= take;
                if n == 0 {
                    return;
                }
                if take % 2 == 1 {
                    std::mem::swap(&mut a, &mut b);
                }
                if n == 1 {
                    b = a;
                }
            }
        }
        self.runs.push(Run { a, b, len: n });
        self.len += n;
    }

    /// Appends another word on the right.
    pub fn append(&mut self, other: &Word) {
        for r in &other.runs {
            self.push_alternating(r.a as usize, r.b as usize, r.len);
        }
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.append(other);
        w
    }

    /// The inverse element, i.e. the reversed letter sequence.
    pub fn inverse(&self) -> Word {
        let mut w = Word::new();
        for r in self.runs.iter().rev() {
            let other = if r.len >= 2 { r.letter(r.len - 2) } else { r.last() };
            w.push_alternating(r.last() as usize, other as usize, r.len);
        }
        w
    }

    /// Prefix of `k` letters.
    pub fn prefix(&self, k: u64) -> Word {
        let mut w = Word::new();
        let mut left = k.min(self.len);
        for r in &self.runs {
            if left == 0 {
                break;
            }
            let take = r.len.min(left);
            w.push_alternating(r.a as usize, r.b as usize, take);
            left -= take;
        }
        w
    }

    /// Iterates over letters left to right. Intended for short words.
    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.runs.iter().flat_map(|r| (0..r.len).map(move |k| r.letter(k) as usize))
    }

    /// Letters as a vector, refusing words longer than `limit`.
    pub fn to_vec(&self, limit: u64) -> Option<Vec<usize>> {
        (self.len <= limit).then(|| self.letters().collect())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        let mut first = true;
        for r in &self.runs {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            if r.len <= 8 {
                let parts: Vec<String> = (0..r.len).map(|k| r.letter(k).to_string()).collect();
                f.write_str(&parts.join(","))?;
            } else {
                write!(f, "({},{})^{}", r.a, r.b, r.len / 2)?;
                if r.len % 2 == 1 {
                    write!(f, ",{}", r.a)?;
                }
            }
        }
        f.write_str("]")
    }
}
