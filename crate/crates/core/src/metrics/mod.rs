//! Certification of approximate constrained Nash equilibria.

mod kkt;
mod nash;
mod report;

pub use kkt::{kkt_certificate, kkt_implies_nash_check, KktCertificate, KktNashCheck};
pub use nash::{is_epsilon_nash, nash_gap, EpsilonNash, InnerStatus, NashGapReport, PlayerGap};
pub use report::{kkt_to_text, nash_to_text};
