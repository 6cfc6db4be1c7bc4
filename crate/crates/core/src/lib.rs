//! Time-dependent route planning on a customizable multi-level overlay.
//!
//! Arc costs are periodic piecewise-linear travel-time functions ([`plf`]).
//! A nested [`partition`] of the road [`network`] defines an [`overlay`] of
//! shortcut cliques between cell boundary vertices. [`customization`] fills
//! them with exact or approximated shortcut profiles, [`query`] answers
//! earliest-arrival queries on the overlay, and [`live_update`] patches the
//! overlay after traffic reports. [`Engine`] bundles all of it behind the
//! caller's vertex ids.
//!
//! ```
//! use tdcrp::customization::CustomizationConfig;
//! use tdcrp::network::{generate_synthetic, SyntheticParams};
//! use tdcrp::partition::build_partition;
//! use tdcrp::query::QueryConfig;
//! use tdcrp::Engine;
//!
//! let net = generate_synthetic(&SyntheticParams::new(8, 8, 0.5, 6, 1));
//! let mut engine = Engine::new(&net, &build_partition(&net, &[8, 32])?)?;
//! engine.customize(&CustomizationConfig::with_epsilon(2, 0.01));
//! let res = engine.querier(QueryConfig::default()).run(0, 63, 0.0);
//! assert!(res.arrival.is_some());
//! # Ok::<(), tdcrp::Error>(())
//! ```

pub mod customization;
pub mod engine;
pub mod error;
pub mod live_update;
pub mod network;
pub mod overlay;
pub mod partition;
pub mod plf;
pub mod query;
mod queue;

pub use engine::{Engine, EngineQuery};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/time-functions.md")]
    mod time_functions {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/overlay.md")]
    mod overlay {}
    #[doc = include_str!("../../../book/src/customization.md")]
    mod customization {}
    #[doc = include_str!("../../../book/src/queries.md")]
    mod queries {}
    #[doc = include_str!("../../../book/src/live-traffic.md")]
    mod live_traffic {}
    #[doc = include_str!("../../../book/src/snapshots.md")]
    mod snapshots {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
