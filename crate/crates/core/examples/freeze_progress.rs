//! Steps one game by hand and reports how the rows of both agents freeze.
//!
//! `cargo run --release -p lexiboot-core --example freeze_progress -- 96 48 1`

use lexiboot_core::game::{Agent, Game};
use lexiboot_core::{game_report, GameConfig, LearningMode};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let (n, h, seed) = match args[..] {
        [n, h, seed] => (n, h, seed as u64),
        [n, h] => (n, h, 0),
        _ => (96, 48, 1),
    };
    let config = GameConfig::new(n, h, 2, 10_000, LearningMode::Unsupervised).with_seed(seed);
    let mut game = Game::new(&config).unwrap();
    let mut next = 0;
    while !game.is_frozen() {
        game.step();
        let frozen = game.agent(Agent::I).frozen_rows() + game.agent(Agent::J).frozen_rows();
        if frozen >= next {
            println!("{frozen:>4}/{} rows frozen after {} episodes", 2 * n, game.episodes());
            next = frozen + (n / 6).max(1);
        }
    }
    let report = game_report(&game.finish()).unwrap();
    println!("error {:.4} (agent I), {:.4} (agent J)", report.agent_i.error_f64(), report.agent_j.error_f64());
}
