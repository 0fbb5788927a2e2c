//! Reference programs shipped with the crate.

use crate::frontend;
use crate::ir::Program;

/// Source of the Wi-Fi access point troubleshooting program.
pub const WIFI_AP_SOURCE: &str = include_str!("../corpus/wifi_ap.qrs");

pub fn wifi_access_point() -> Program {
    frontend::parse(WIFI_AP_SOURCE).expect("reference corpus parses")
}
