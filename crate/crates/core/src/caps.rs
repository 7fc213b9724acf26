//! Size caps and the thread budget.
//!
//! Caps default to desk-scale limits. `CCSTAB_CAP_OVERRIDE` takes a
//! comma-separated list such as `pair=1024,ternary=256`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::RwLock;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Ground-set size for pair colorings and closures.
    pub pair: usize,
    /// Ground-set size for m = 3.
    pub ternary: usize,
    /// Ground-set size for m = 4.
    pub quaternary: usize,
    /// Base ground-set size for tensor squares and 2-extensions.
    pub two_extension: usize,
    /// Ground-set size for two-point extensions (σ₃, σ₄, n_y).
    pub pair_extension: usize,
    /// Ground-set size for the automorphism oracle.
    pub orbits: usize,
    /// Ground-set size for the pebble-game oracle.
    pub game: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            pair: 512,
            ternary: 200,
            quaternary: 40,
            two_extension: 64,
            pair_extension: 64,
            orbits: 10,
            game: 5,
        }
    }
}

impl Caps {
    /// Parses an override string on top of the defaults.
    pub fn parse_override(spec: &str) -> std::result::Result<Caps, String> {
        let mut caps = Caps::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("bad number in `{item}`"))?;
            let slot = match key.trim() {
                "pair" => &mut caps.pair,
                "ternary" => &mut caps.ternary,
                "quaternary" => &mut caps.quaternary,
                "two_extension" => &mut caps.two_extension,
                "pair_extension" => &mut caps.pair_extension,
                "orbits" => &mut caps.orbits,
                "game" => &mut caps.game,
                other => return Err(format!("unknown cap `{other}`")),
            };
            *slot = value;
        }
        Ok(caps)
    }

    pub fn from_env() -> std::result::Result<Caps, String> {
        match std::env::var("CCSTAB_CAP_OVERRIDE") {
            Ok(spec) => Caps::parse_override(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }
}

static CAPS: RwLock<Option<Caps>> = RwLock::new(None);
static THREADS: AtomicUsize = AtomicUsize::new(1);

/// Active caps. Reads the environment on first use; an unparsable override
/// falls back to the defaults (the CLI reports the parse error itself).
pub fn caps() -> Caps {
    if let Some(c) = *CAPS.read().unwrap() {
        return c;
    }
    let c = Caps::from_env().unwrap_or_default();
    *CAPS.write().unwrap() = Some(c);
    c
}

pub fn set_caps(c: Caps) {
    *CAPS.write().unwrap() = Some(c);
}

/// Worker threads used for independent per-point extension work.
pub fn threads() -> usize {
    THREADS.load(Ordering::Relaxed).max(1)
}

pub fn set_threads(k: usize) {
    THREADS.store(k.max(1), Ordering::Relaxed);
}

pub(crate) fn check(what: &'static str, value: usize, cap: usize) -> Result<()> {
    if value > cap {
        Err(Error::CapExceeded { what, value, cap })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_parsing() {
        let c = Caps::parse_override("pair=1024, game=6").unwrap();
        assert_eq!(c.pair, 1024);
        assert_eq!(c.game, 6);
        assert_eq!(c.ternary, 200);
        assert!(Caps::parse_override("bogus=1").is_err());
        assert!(Caps::parse_override("pair").is_err());
    }
}
