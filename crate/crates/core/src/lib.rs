//! Toolchain for running several temporally exclusive dataflow applications on
//! one circuit-switched 2D-mesh NoC.
//!
//! The flow: parse each application as an acyclic dataflow graph ([`graph`]),
//! merge the set into a union graph with shared node copies and colored edges,
//! pack nodes connected by identical color combinations ([`merge`]), place the
//! packed graph's external ports on router local ports and route every external
//! edge as a link tree ([`pnr`]), derive a per-application crossbar
//! configuration ([`noc`]), and finally verify by discrete-event simulation
//! that the configured NoC computes exactly what the original application graph
//! computes ([`sim`]). [`imaging`] supplies the integer-exact operator library
//! used by the bundled day/night preprocessor demo.

pub mod graph;
pub mod imaging;
pub mod merge;
pub mod noc;
pub mod pnr;
pub mod randgraph;
pub mod registry;
pub mod report;
pub mod sim;
pub mod stream_file;
pub mod token;
