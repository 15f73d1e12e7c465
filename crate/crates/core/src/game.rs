//! Two-agent language game: context sampling, the two episode rules and
//! full games run until both verbalization matrices freeze.
//!
//! A game owns a single random stream. Within an episode draws are taken in a
//! fixed order: context, topic, production tie-break, interpretation tie-break
//! (supervised only), then the random words of the updates, speaker before
//! hearer and context objects in sampled order. Updates that are certain to be
//! blocked (binary row, endpoint at zero) consume no draw.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lexicon::{ObjectId, VerbalizationMatrix, WordId};

pub const DEFAULT_MAX_EPISODES: u64 = 2_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LearningMode {
    /// Cross-situational: no feedback, only the hearer learns.
    Unsupervised,
    /// Operant conditioning: success/failure feedback, both agents learn.
    Supervised,
}

impl LearningMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LearningMode::Unsupervised => "unsupervised",
            LearningMode::Supervised => "supervised",
        }
    }
}

impl fmt::Display for LearningMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearningMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unsupervised" | "u" => Ok(LearningMode::Unsupervised),
            "supervised" | "s" => Ok(LearningMode::Supervised),
            other => Err(Error::config(format!("unknown learning mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub n_objects: usize,
    pub n_words: usize,
    pub context_size: usize,
    pub resolution: u32,
    pub mode: LearningMode,
    pub max_episodes: u64,
    pub seed: u64,
}

impl GameConfig {
    pub fn new(
        n_objects: usize,
        n_words: usize,
        context_size: usize,
        resolution: u32,
        mode: LearningMode,
    ) -> Self {
        GameConfig {
            n_objects,
            n_words,
            context_size,
            resolution,
            mode,
            max_episodes: DEFAULT_MAX_EPISODES,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_episodes(mut self, max_episodes: u64) -> Self {
        self.max_episodes = max_episodes;
        self
    }

    /// Word-to-object ratio H/N.
    pub fn alpha(&self) -> f64 {
        self.n_words as f64 / self.n_objects as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_objects == 0 || self.n_words == 0 {
            return Err(Error::config("N and H must be at least 1"));
        }
        if self.context_size == 0 || self.context_size > self.n_objects {
            return Err(Error::config(format!(
                "context size C={} must satisfy 1 <= C <= N={}",
                self.context_size, self.n_objects
            )));
        }
        if self.resolution == 0 {
            return Err(Error::config("resolution M must be at least 1"));
        }
        if self.max_episodes == 0 {
            return Err(Error::config("max_episodes must be at least 1"));
        }
        Ok(())
    }
}

/// The C distinct objects shown in one episode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    objects: SmallVec<[ObjectId; 8]>,
}

impl Context {
    pub fn objects(&self) -> &[ObjectId] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Uniform choice of the episode topic among the context objects.
    pub fn pick_topic<R: Rng + ?Sized>(&self, rng: &mut R) -> ObjectId {
        self.objects[rng.random_range(0..self.objects.len() as u32) as usize]
    }
}

/// A uniformly random C-subset of the N objects (Floyd's algorithm).
pub fn sample_context<R: Rng + ?Sized>(
    n_objects: usize,
    context_size: usize,
    rng: &mut R,
) -> Result<Context> {
    if context_size > n_objects {
        return Err(Error::config(format!(
            "context size {context_size} exceeds number of objects {n_objects}"
        )));
    }
    let mut objects = SmallVec::with_capacity(context_size);
    for j in n_objects - context_size..n_objects {
        let t = ObjectId(rng.random_range(0..=j as u32) as usize);
        if objects.contains(&t) {
            objects.push(ObjectId(j));
        } else {
            objects.push(t);
        }
    }
    Ok(Context { objects })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Agent {
    I,
    J,
}

impl Agent {
    pub fn other(self) -> Agent {
        match self {
            Agent::I => Agent::J,
            Agent::J => Agent::I,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpisodeRecord {
    pub speaker: Agent,
    pub topic: ObjectId,
    pub word: WordId,
    /// Present only for supervised episodes.
    pub hearer_guess: Option<ObjectId>,
    pub success: Option<bool>,
}

/// Cross-situational update with an explicit context and topic: each context
/// row of the hearer moves one ball from a random positive word to the
/// speaker's word.
pub fn unsupervised_update<R: Rng + ?Sized>(
    speaker: &VerbalizationMatrix,
    hearer: &mut VerbalizationMatrix,
    context: &[ObjectId],
    topic: ObjectId,
    rng: &mut R,
) -> WordId {
    let word = speaker.speak(topic, rng);
    for &n in context {
        if hearer.count(n, word) == 0 {
            continue;
        }
        if let Some(dec) = hearer.draw_active_word(n, rng) {
            hearer.apply_transfer(n, word, dec);
        }
    }
    word
}

pub fn unsupervised_episode<R: Rng + ?Sized>(
    speaker_tag: Agent,
    speaker: &VerbalizationMatrix,
    hearer: &mut VerbalizationMatrix,
    config: &GameConfig,
    rng: &mut R,
) -> EpisodeRecord {
    let context = sample_context(config.n_objects, config.context_size, rng)
        .expect("validated configuration");
    let topic = context.pick_topic(rng);
    let word = unsupervised_update(speaker, hearer, context.objects(), topic, rng);
    EpisodeRecord {
        speaker: speaker_tag,
        topic,
        word,
        hearer_guess: None,
        success: None,
    }
}

/// Feedback update with an explicit context and topic. Returns the spoken
/// word, the hearer's guess and whether it was correct.
pub fn supervised_update<R: Rng + ?Sized>(
    speaker: &mut VerbalizationMatrix,
    hearer: &mut VerbalizationMatrix,
    context: &[ObjectId],
    topic: ObjectId,
    rng: &mut R,
) -> (WordId, ObjectId, bool) {
    let word = speaker.speak(topic, rng);
    let guess = hearer
        .interpret(word, context, rng)
        .expect("context is non-empty and in range");
    let success = guess == topic;
    if success {
        // reinforce `word` for the topic in both agents
        if let Some(hs) = speaker.draw_active_word(topic, rng) {
            speaker.apply_transfer(topic, word, hs);
        }
        if hearer.count(topic, word) > 0 {
            if let Some(hh) = hearer.draw_active_word(topic, rng) {
                hearer.apply_transfer(topic, word, hh);
            }
        }
    } else {
        // weaken `word` for the topic (speaker) and the wrong guess (hearer)
        if let Some(hs) = speaker.draw_active_word(topic, rng) {
            speaker.apply_transfer(topic, hs, word);
        }
        if hearer.count(guess, word) > 0 {
            if let Some(hh) = hearer.draw_active_word(guess, rng) {
                hearer.apply_transfer(guess, hh, word);
            }
        }
    }
    (word, guess, success)
}

pub fn supervised_episode<R: Rng + ?Sized>(
    speaker_tag: Agent,
    speaker: &mut VerbalizationMatrix,
    hearer: &mut VerbalizationMatrix,
    config: &GameConfig,
    rng: &mut R,
) -> EpisodeRecord {
    let context = sample_context(config.n_objects, config.context_size, rng)
        .expect("validated configuration");
    let topic = context.pick_topic(rng);
    let (word, guess, success) = supervised_update(speaker, hearer, context.objects(), topic, rng);
    EpisodeRecord {
        speaker: speaker_tag,
        topic,
        word,
        hearer_guess: Some(guess),
        success: Some(success),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameResult {
    pub matrix_i: VerbalizationMatrix,
    pub matrix_j: VerbalizationMatrix,
    pub episodes: u64,
    pub frozen: bool,
    pub consensus: bool,
}

/// Per-row argmax sets of the two matrices agree.
pub fn same_lexicon(a: &VerbalizationMatrix, b: &VerbalizationMatrix) -> bool {
    a.n_objects() == b.n_objects()
        && (0..a.n_objects()).all(|n| a.argmax_words(ObjectId(n)) == b.argmax_words(ObjectId(n)))
}

/// An in-progress game. Roles alternate strictly, agent I speaking first.
#[derive(Clone, Debug)]
pub struct Game<R = ChaCha8Rng> {
    config: GameConfig,
    agent_i: VerbalizationMatrix,
    agent_j: VerbalizationMatrix,
    episodes: u64,
    rng: R,
}

impl Game<ChaCha8Rng> {
    /// New game seeded from `config.seed`.
    pub fn new(config: &GameConfig) -> Result<Self> {
        Self::with_rng(config, ChaCha8Rng::seed_from_u64(config.seed))
    }
}

impl<R: Rng> Game<R> {
    pub fn with_rng(config: &GameConfig, mut rng: R) -> Result<Self> {
        config.validate()?;
        let agent_i = VerbalizationMatrix::random(
            config.n_objects,
            config.n_words,
            config.resolution,
            &mut rng,
        )?;
        let agent_j = VerbalizationMatrix::random(
            config.n_objects,
            config.n_words,
            config.resolution,
            &mut rng,
        )?;
        Ok(Game {
            config: config.clone(),
            agent_i,
            agent_j,
            episodes: 0,
            rng,
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn agent(&self, agent: Agent) -> &VerbalizationMatrix {
        match agent {
            Agent::I => &self.agent_i,
            Agent::J => &self.agent_j,
        }
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    pub fn is_frozen(&self) -> bool {
        self.agent_i.is_frozen() && self.agent_j.is_frozen()
    }

    pub fn next_speaker(&self) -> Agent {
        if self.episodes.is_multiple_of(2) {
            Agent::I
        } else {
            Agent::J
        }
    }

    /// Plays one episode regardless of freezing.
    pub fn step(&mut self) -> EpisodeRecord {
        let tag = self.next_speaker();
        let (speaker, hearer) = match tag {
            Agent::I => (&mut self.agent_i, &mut self.agent_j),
            Agent::J => (&mut self.agent_j, &mut self.agent_i),
        };
        let record = match self.config.mode {
            LearningMode::Unsupervised => {
                unsupervised_episode(tag, speaker, hearer, &self.config, &mut self.rng)
            }
            LearningMode::Supervised => {
                supervised_episode(tag, speaker, hearer, &self.config, &mut self.rng)
            }
        };
        self.episodes += 1;
        record
    }

    /// Plays until both matrices are binary or the episode cap is reached.
    pub fn run(mut self) -> GameResult {
        while !self.is_frozen() && self.episodes < self.config.max_episodes {
            self.step();
        }
        self.finish()
    }

    pub fn finish(self) -> GameResult {
        let frozen = self.is_frozen();
        let consensus = same_lexicon(&self.agent_i, &self.agent_j);
        GameResult {
            matrix_i: self.agent_i,
            matrix_j: self.agent_j,
            episodes: self.episodes,
            frozen,
            consensus,
        }
    }
}

/// Runs a full game seeded from `config.seed`.
pub fn run_game(config: &GameConfig) -> Result<GameResult> {
    Ok(Game::new(config)?.run())
}

pub fn run_game_with_rng<R: Rng>(config: &GameConfig, rng: R) -> Result<GameResult> {
    Ok(Game::with_rng(config, rng)?.run())
}
