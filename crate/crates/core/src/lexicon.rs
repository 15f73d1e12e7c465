//! Integer-count verbalization matrices.
//!
//! Entry `(n, h)` holds the number of "balls" out of `M` that associate object
//! `n` with word `h`, so the association probability is `count / M`. Entries at
//! `0` and at `M` are absorbing: a transfer touching either endpoint is skipped
//! as a whole, which keeps every row summing to `M`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Index of an object, in `[0, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectId(pub usize);

/// Index of a word, in `[0, H)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WordId(pub usize);

const NO_SLOT: u32 = u32::MAX;

/// An `N x H` table of association counts, each row summing to `M`.
///
/// Besides the counts the matrix keeps, per row, the set of words with a
/// positive count (for O(1) uniform draws) and the number of binary rows (for
/// O(1) freeze detection).
#[derive(Clone, Debug)]
pub struct VerbalizationMatrix {
    n_objects: usize,
    n_words: usize,
    resolution: u32,
    counts: Vec<u32>,
    support: Vec<u32>,
    slot: Vec<u32>,
    state: Vec<RowState>,
    frozen_rows: usize,
}

#[derive(Clone, Copy, Debug, Default)]
struct RowState {
    support_len: u32,
    // maximal count, number of words attaining it, and the argmax word
    // (meaningful only when the maximum is unique)
    best: u32,
    best_ties: u32,
    best_word: u32,
}

impl PartialEq for VerbalizationMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n_objects == other.n_objects
            && self.n_words == other.n_words
            && self.resolution == other.resolution
            && self.counts == other.counts
    }
}

impl Eq for VerbalizationMatrix {}

fn check_dims(n_objects: usize, n_words: usize, resolution: u32) -> Result<()> {
    if n_objects == 0 {
        return Err(Error::config("number of objects must be at least 1"));
    }
    if n_words == 0 {
        return Err(Error::config("number of words must be at least 1"));
    }
    if resolution == 0 {
        return Err(Error::config("resolution M must be at least 1"));
    }
    if n_words >= NO_SLOT as usize {
        return Err(Error::config("too many words"));
    }
    Ok(())
}

impl VerbalizationMatrix {
    /// Draws every row independently as a multinomial sample of `resolution`
    /// balls over `n_words` equiprobable slots.
    pub fn random<R: Rng + ?Sized>(
        n_objects: usize,
        n_words: usize,
        resolution: u32,
        rng: &mut R,
    ) -> Result<Self> {
        check_dims(n_objects, n_words, resolution)?;
        let mut counts = vec![0u32; n_objects * n_words];
        for row in counts.chunks_exact_mut(n_words) {
            // Sequential conditional binomials: slot h takes Bin(rest, 1/(H-h)).
            let mut rest = u64::from(resolution);
            let (last, head) = row.split_last_mut().expect("n_words >= 1");
            for (h, slot) in head.iter_mut().enumerate() {
                if rest == 0 {
                    break;
                }
                let p = 1.0 / (n_words - h) as f64;
                let k = Binomial::new(rest, p)
                    .expect("valid binomial parameters")
                    .sample(rng);
                *slot = k as u32;
                rest -= k;
            }
            *last = rest as u32;
        }
        Ok(Self::from_counts_unchecked(
            n_objects, n_words, resolution, counts,
        ))
    }

    /// Builds a matrix from explicit rows; each row must have `n_words`
    /// entries summing to `resolution`.
    pub fn from_rows<V: AsRef<[u32]>>(rows: &[V], resolution: u32) -> Result<Self> {
        let n_objects = rows.len();
        let n_words = rows.first().map_or(0, |r| r.as_ref().len());
        check_dims(n_objects, n_words, resolution)?;
        let mut counts = Vec::with_capacity(n_objects * n_words);
        for (n, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_words {
                return Err(Error::DimensionMismatch(format!(
                    "row {n} has {} entries, expected {n_words}",
                    row.len()
                )));
            }
            let sum: u64 = row.iter().map(|&c| u64::from(c)).sum();
            if sum != u64::from(resolution) {
                return Err(Error::config(format!(
                    "row {n} sums to {sum}, expected {resolution}"
                )));
            }
            counts.extend_from_slice(row);
        }
        Ok(Self::from_counts_unchecked(
            n_objects, n_words, resolution, counts,
        ))
    }

    /// Binary matrix in which object `n` is named by `words[n]`.
    pub fn from_assignment(words: &[WordId], n_words: usize, resolution: u32) -> Result<Self> {
        check_dims(words.len(), n_words, resolution)?;
        let mut counts = vec![0u32; words.len() * n_words];
        for (n, w) in words.iter().enumerate() {
            if w.0 >= n_words {
                return Err(Error::OutOfRange {
                    what: "word",
                    index: w.0,
                    bound: n_words,
                });
            }
            counts[n * n_words + w.0] = resolution;
        }
        Ok(Self::from_counts_unchecked(
            words.len(),
            n_words,
            resolution,
            counts,
        ))
    }

    fn from_counts_unchecked(
        n_objects: usize,
        n_words: usize,
        resolution: u32,
        counts: Vec<u32>,
    ) -> Self {
        let mut m = VerbalizationMatrix {
            n_objects,
            n_words,
            resolution,
            counts,
            support: vec![0; n_objects * n_words],
            slot: vec![NO_SLOT; n_objects * n_words],
            state: vec![RowState::default(); n_objects],
            frozen_rows: 0,
        };
        for n in 0..n_objects {
            let base = n * n_words;
            let mut len = 0u32;
            for h in 0..n_words {
                if m.counts[base + h] > 0 {
                    m.support[base + len as usize] = h as u32;
                    m.slot[base + h] = len;
                    len += 1;
                }
            }
            m.state[n].support_len = len;
            if len == 1 {
                m.frozen_rows += 1;
            }
            m.rescan_best(n);
        }
        m
    }

    fn rescan_best(&mut self, row: usize) {
        let base = row * self.n_words;
        let mut best = 0u32;
        let mut ties = 0u32;
        let mut word = 0u32;
        for (h, &c) in self.counts[base..base + self.n_words].iter().enumerate() {
            if c > best {
                best = c;
                ties = 1;
                word = h as u32;
            } else if c == best {
                ties += 1;
            }
        }
        let st = &mut self.state[row];
        st.best = best;
        st.best_ties = ties;
        st.best_word = word;
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_words(&self) -> usize {
        self.n_words
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn count(&self, object: ObjectId, word: WordId) -> u32 {
        self.counts[object.0 * self.n_words + word.0]
    }

    pub fn row(&self, object: ObjectId) -> &[u32] {
        let base = object.0 * self.n_words;
        &self.counts[base..base + self.n_words]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.counts.chunks_exact(self.n_words)
    }

    /// Association probability `count / M`.
    pub fn probability(&self, object: ObjectId, word: WordId) -> f64 {
        f64::from(self.count(object, word)) / f64::from(self.resolution)
    }

    /// A row is binary when a single word holds all `M` balls.
    pub fn is_row_binary(&self, object: ObjectId) -> bool {
        self.state[object.0].support_len == 1
    }

    /// The word holding all balls of a binary row.
    pub fn binary_word(&self, object: ObjectId) -> Option<WordId> {
        self.is_row_binary(object)
            .then(|| WordId(self.support[object.0 * self.n_words] as usize))
    }

    pub fn frozen_rows(&self) -> usize {
        self.frozen_rows
    }

    /// True iff every row is binary. Constant time.
    pub fn is_frozen(&self) -> bool {
        self.frozen_rows == self.n_objects
    }

    /// Words sharing the maximal count of a row, in ascending order.
    pub fn argmax_words(&self, object: ObjectId) -> SmallVec<[WordId; 4]> {
        let row = self.row(object);
        let best = row.iter().copied().max().unwrap_or(0);
        row.iter()
            .enumerate()
            .filter(|&(_, &c)| c == best)
            .map(|(h, _)| WordId(h))
            .collect()
    }

    /// Production: the word with the largest count in the object's row, ties
    /// broken uniformly at random. Consumes a draw only when there is a tie.
    ///
    /// Panics if `object` is out of range.
    pub fn speak<R: Rng + ?Sized>(&self, object: ObjectId, rng: &mut R) -> WordId {
        let n = object.0;
        let ties = self.state[n].best_ties;
        if ties == 1 {
            return WordId(self.state[n].best_word as usize);
        }
        let best = self.state[n].best;
        let pick = rng.random_range(0..ties) as usize;
        let h = self
            .row(object)
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == best)
            .nth(pick)
            .map(|(h, _)| h)
            .expect("row has a maximum");
        WordId(h)
    }

    /// Introspective obverter: among `candidates`, the object this matrix
    /// would most strongly associate with `word`. Ties are broken uniformly at
    /// random, in candidate order.
    pub fn interpret<R: Rng + ?Sized>(
        &self,
        word: WordId,
        candidates: &[ObjectId],
        rng: &mut R,
    ) -> Result<ObjectId> {
        if candidates.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        if word.0 >= self.n_words {
            return Err(Error::OutOfRange {
                what: "word",
                index: word.0,
                bound: self.n_words,
            });
        }
        if let Some(bad) = candidates.iter().find(|o| o.0 >= self.n_objects) {
            return Err(Error::OutOfRange {
                what: "object",
                index: bad.0,
                bound: self.n_objects,
            });
        }
        if candidates.len() == 1 {
            return Ok(candidates[0]);
        }
        let mut best = 0u32;
        let mut ties = 0u32;
        for &o in candidates {
            let c = self.count(o, word);
            if ties == 0 || c > best {
                best = c;
                ties = 1;
            } else if c == best {
                ties += 1;
            }
        }
        let pick = if ties > 1 {
            rng.random_range(0..ties) as usize
        } else {
            0
        };
        Ok(candidates
            .iter()
            .copied()
            .filter(|&o| self.count(o, word) == best)
            .nth(pick)
            .expect("candidate attains the maximum"))
    }

    /// Uniform draw among the words of a non-binary row that have a positive
    /// count (equivalently, a count strictly between 0 and `M`). `None` for a
    /// binary row.
    pub fn draw_active_word<R: Rng + ?Sized>(
        &self,
        object: ObjectId,
        rng: &mut R,
    ) -> Option<WordId> {
        let len = self.state[object.0].support_len;
        if len <= 1 {
            return None;
        }
        let k = rng.random_range(0..len) as usize;
        Some(WordId(self.support[object.0 * self.n_words + k] as usize))
    }

    /// Moves one ball of row `object` from `dec_word` to `inc_word`.
    ///
    /// Returns `false` and leaves the row untouched for a self-transfer, a
    /// binary row, or when either endpoint sits at zero.
    pub fn apply_transfer(&mut self, object: ObjectId, inc_word: WordId, dec_word: WordId) -> bool {
        if inc_word == dec_word || self.state[object.0].support_len <= 1 {
            return false;
        }
        let base = object.0 * self.n_words;
        let inc = base + inc_word.0;
        let dec = base + dec_word.0;
        let (ci, cd) = (self.counts[inc], self.counts[dec]);
        if ci == 0 || cd == 0 {
            return false;
        }
        self.counts[inc] = ci + 1;
        self.counts[dec] = cd - 1;
        if cd == 1 {
            self.remove_from_support(object.0, dec_word.0);
        }
        if ci + 1 == self.resolution {
            self.frozen_rows += 1;
        }
        self.update_best(object.0, inc_word.0, ci + 1, cd);
        true
    }

    // `inc` now holds `inc_count`; the decremented word held `dec_before`.
    fn update_best(&mut self, row: usize, inc: usize, inc_count: u32, dec_before: u32) {
        let best = self.state[row].best;
        let ties = self.state[row].best_ties;
        if inc_count > best {
            self.state[row].best = inc_count;
            self.state[row].best_ties = 1;
            self.state[row].best_word = inc as u32;
        } else if inc_count == best {
            if dec_before == best {
                // the increment replaces the decrement among the maxima
                if ties == 1 {
                    self.state[row].best_word = inc as u32;
                }
            } else {
                self.state[row].best_ties = ties + 1;
            }
        } else if dec_before == best {
            if ties > 2 {
                self.state[row].best_ties = ties - 1;
            } else {
                self.rescan_best(row);
            }
        }
    }

    fn remove_from_support(&mut self, row: usize, word: usize) {
        let base = row * self.n_words;
        let pos = self.slot[base + word];
        debug_assert_ne!(pos, NO_SLOT);
        let last = self.state[row].support_len - 1;
        let moved = self.support[base + last as usize];
        self.support[base + pos as usize] = moved;
        self.slot[base + moved as usize] = pos;
        self.slot[base + word] = NO_SLOT;
        self.state[row].support_len = last;
    }
}
