//! Deterministic, seedable simulator of quantum-event probabilities built
//! from phasor sums over generated path families.
//!
//! Each experiment associates a finite family of paths with a transit
//! between two points; every path contributes one unit-modulus complex
//! "clock-pointer" `e^{iφ}` with `φ = 2π·length/wavelength` (plus any arm
//! phase shifter), and the event probability is the normalized absolute
//! square of the family sum. No measure or weight is ever placed on path
//! space — families are refined, not integrated against a distribution.
//!
//! The crate covers:
//!
//! * [`phasor`] — clock-pointer arithmetic, compensated in-order summation,
//!   and the amplitude → probability rule;
//! * [`paths`] — path families, mirror-fan generation, head-to-tail traces,
//!   congruence, winding numbers;
//! * [`sqm`] — a small matrix-evolution oracle used to cross-check every
//!   prediction through an independent route;
//! * [`mzi`] — the square interferometer, disturbed-arm variants, and the
//!   bomb-testing tally;
//! * [`rarity`] — the two-particle interferometer whose left/right path
//!   congruence coordinates the wings;
//! * [`toybell`] — the classical twin clock-pointer model;
//! * [`events`] — an event-level Monte Carlo realization of the local
//!   beamsplitter decision rule, with a fidelity report against the
//!   amplitude prediction;
//! * [`bell`] — CHSH and nine-pair-average evaluators over any backend;
//! * [`checks`] — the release criteria as a self-check suite;
//! * [`seeding`] — the seed-splitting scheme that makes every run
//!   reproducible and thread-count invariant.

pub mod bell;
pub mod checks;
pub mod error;
pub mod events;
pub mod mzi;
pub mod paths;
pub mod phasor;
pub mod rarity;
pub mod seeding;
pub mod sqm;
pub mod toybell;

pub use error::{Result, SimError};
