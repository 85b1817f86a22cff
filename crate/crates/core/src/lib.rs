//! Analysis of finite empirical models over simplicial measurement scenarios.
//!
//! A model assigns an exact rational joint distribution to every maximal
//! context of a [`scenario::SimplicialScenario`]. On top of that the crate
//! offers:
//!
//! * acyclicity by Graham reduction ([`scenario`]),
//! * marginals, disturbance audits and skeleton restriction ([`model`]),
//! * an exact rational simplex solver with duality certificates ([`lp`]),
//! * the contextual fraction, contextuality class and dimension hierarchy
//!   ([`fraction`]),
//! * Markov kernels on edges, their orthogonal part, transport, holonomy
//!   groups and per-face curvature ([`connection`]),
//! * the JSON model document, the builtin corpus, DOT export and reports
//!   ([`document`], [`builtin`], [`dot`], [`report`]).

pub mod builtin;
pub mod connection;
pub mod document;
pub mod dot;
pub mod fraction;
pub mod lp;
pub mod model;
pub mod rational;
pub mod report;
pub mod scenario;

pub use rational::Rational;
