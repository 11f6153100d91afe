//! Complex linear algebra and the quantum object model: pure states,
//! density operators, channels in Kraus form and measurements.

pub mod channel;
pub mod linalg;
pub mod state;

pub use channel::{apply_channel, channel_from_measurement, extend_with_ancilla, Measurement, QuantumChannel};
pub use linalg::{CMatrix, CVector, C64};
pub use state::{max_entangled, support_projector, DensityOperator, PureState};
