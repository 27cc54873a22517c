//! Distance and logical-action checks for surface-code patches that change
//! shape over time.
//!
//! A program (see [`program`]) is compiled to a gate-level circuit
//! ([`circuit`]). Every single fault of that circuit is propagated to the
//! measurement sets it flips, which gives two graphs of detection events
//! ([`nest`]). Shortest boundary-to-boundary chains in those graphs give the
//! distance ([`distance`]). A noiseless stabilizer simulation checks the
//! encoded gate ([`logic`]). Nests can be exported as 3D scenes ([`export`]).

pub mod pauli_core;
pub mod program;
pub mod circuit;
pub mod nest;
pub mod distance;
pub mod logic;
pub mod export;
pub mod cli;

/// Runs `f` on a rayon pool capped by `GATECHECK_THREADS` when it is set.
pub(crate) fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let threads = std::env::var("GATECHECK_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    match threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/programs.md")]
    struct Programs;
    #[doc = include_str!("../../../book/src/circuits.md")]
    struct Circuits;
    #[doc = include_str!("../../../book/src/nests.md")]
    struct Nests;
    #[doc = include_str!("../../../book/src/distance.md")]
    struct Distance;
    #[doc = include_str!("../../../book/src/logic.md")]
    struct Logic;
    #[doc = include_str!("../../../book/src/export.md")]
    struct Export;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
