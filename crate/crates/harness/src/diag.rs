//! Diagnostic output, gated by the `SIM_LOG` environment variable:
//! unset/empty/"off" is silent, "debug" is chatty, anything else is terse.

use std::sync::OnceLock;

static LEVEL: OnceLock<u8> = OnceLock::new();

pub fn verbosity() -> u8 {
    *LEVEL.get_or_init(|| match std::env::var("SIM_LOG").ok().as_deref() {
        None | Some("") | Some("off") | Some("0") => 0,
        Some("debug") | Some("2") => 2,
        Some(_) => 1,
    })
}

pub fn info(msg: impl FnOnce() -> String) {
    if verbosity() >= 1 {
        eprintln!("[swapsim] {}", msg());
    }
}

pub fn debug(msg: impl FnOnce() -> String) {
    if verbosity() >= 2 {
        eprintln!("[swapsim] {}", msg());
    }
}
