//! Exact simulation of entanglement concentration for three-photon W states
//! using parity-check measurements.
//!
//! * [`statevec`]: labeled pure states, projections, partial traces.
//! * [`pcm`]: the ideal even/odd parity check and its bit-flip correction.
//! * [`protocol`]: branch tables of the concentration rounds and recursion.
//! * [`metrics`]: concurrence, three-tangle, transformation efficiency.
//! * [`oracle`]: brute-force enumeration used to check the closed forms.
//! * [`cli`]: the commands behind the `wecp` binary.

pub mod cli;
pub mod metrics;
pub mod oracle;
pub mod pcm;
pub mod protocol;
pub mod statevec;

pub use protocol::{recurse, run_round_one, WCoefficients};
pub use statevec::{PureState, QubitLabel};
