//! Communication accuracy of frozen lexicons.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::game::GameResult;
use crate::lexicon::{ObjectId, VerbalizationMatrix, WordId};

pub type Rational = Ratio<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommunicationReport {
    /// phi_n: reciprocal of the number of objects sharing object n's word.
    pub per_object_accuracy: Vec<Rational>,
    pub mean_accuracy: Rational,
    pub error: Rational,
    /// H_u, the sum of phi_n; always an integer.
    pub used_words: Rational,
}

impl CommunicationReport {
    pub fn error_f64(&self) -> f64 {
        self.error.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mean_accuracy_f64(&self) -> f64 {
        self.mean_accuracy.to_f64().unwrap_or(f64::NAN)
    }

    pub fn used_words_f64(&self) -> f64 {
        self.used_words.to_f64().unwrap_or(f64::NAN)
    }
}

/// Word of every object of a frozen matrix.
pub fn lexicon_words(matrix: &VerbalizationMatrix) -> Result<Vec<WordId>> {
    (0..matrix.n_objects())
        .map(|n| {
            matrix
                .binary_word(ObjectId(n))
                .ok_or(Error::NotFrozen { row: n })
        })
        .collect()
}

/// Exact accuracy, error and used-word count of a frozen matrix.
pub fn accuracy_report(matrix: &VerbalizationMatrix) -> Result<CommunicationReport> {
    let words = lexicon_words(matrix)?;
    let mut homonyms = vec![0u64; matrix.n_words()];
    for w in &words {
        homonyms[w.0] += 1;
    }
    let per_object_accuracy: Vec<Rational> = words
        .iter()
        .map(|w| Rational::new(1, homonyms[w.0]))
        .collect();

    // Sum word by word so partial sums keep a denominator no larger than the
    // biggest homonym class.
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by_key(|&n| words[n]);
    let used_words = order
        .iter()
        .fold(Rational::zero(), |acc, &n| acc + per_object_accuracy[n]);

    let n = words.len() as u64;
    let mean_accuracy = used_words / n;
    let error = Rational::from_integer(1) - mean_accuracy;
    Ok(CommunicationReport {
        per_object_accuracy,
        mean_accuracy,
        error,
        used_words,
    })
}

/// Lower bound on the error of any lexicon with ratio H/N = `alpha`.
pub fn optimal_error(alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::Domain(format!("alpha must be non-negative, got {alpha}")));
    }
    Ok((1.0 - alpha).max(0.0))
}

/// Fraction of rows whose argmax word sets differ.
pub fn consensus_distance(a: &VerbalizationMatrix, b: &VerbalizationMatrix) -> Result<f64> {
    if a.n_objects() != b.n_objects() || a.n_words() != b.n_words() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.n_objects(),
            a.n_words(),
            b.n_objects(),
            b.n_words()
        )));
    }
    let differing = (0..a.n_objects())
        .filter(|&n| a.argmax_words(ObjectId(n)) != b.argmax_words(ObjectId(n)))
        .count();
    Ok(differing as f64 / a.n_objects() as f64)
}

/// Both agents' measures for a finished game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameReport {
    pub agent_i: CommunicationReport,
    pub agent_j: CommunicationReport,
    pub consensus_distance: f64,
}

impl GameReport {
    /// Headline error, taken on agent I.
    pub fn error(&self) -> f64 {
        self.agent_i.error_f64()
    }
}

pub fn game_report(result: &GameResult) -> Result<GameReport> {
    Ok(GameReport {
        agent_i: accuracy_report(&result.matrix_i)?,
        agent_j: accuracy_report(&result.matrix_j)?,
        consensus_distance: consensus_distance(&result.matrix_i, &result.matrix_j)?,
    })
}
