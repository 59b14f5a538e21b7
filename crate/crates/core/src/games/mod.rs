//! Benchmark games and example feasible regions.

pub mod finite;
pub mod format;
pub mod identical;
pub mod regions;
pub mod routing;

pub use finite::{mixed_extension, FinitePotentialGame, MultilinearFn};
pub use format::{finite_game_to_text, parse_finite_game, parse_topology, topology_to_text};
pub use identical::{identical_interest_game, IdenticalInterestUtility, ProductFn};
pub use regions::{counterexample_region, example_game, example_region, COUNTEREXAMPLE_BOX};
pub use routing::{routing_game, RoutingTopology, DEFAULT_ROUTING_LIPSCHITZ};
