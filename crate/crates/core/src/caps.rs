//! Size limits shared by every constructor that can blow up combinatorially.

use crate::error::{Error, Result};

pub const CAP_ENV: &str = "SUBSUM_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest admissible field order `q`.
    pub field_order: u64,
    /// Largest admissible number of graph vertices.
    pub vertices: u64,
    /// Search-tree nodes the automorphism search may visit.
    pub search_nodes: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { field_order: 1024, vertices: 20_000, search_nodes: 10_000_000 }
    }
}

impl Caps {
    /// Parses an override such as `"field=4096,vertices=50000,nodes=1e8"`.
    ///
    /// A bare integer raises the field and vertex caps together.
    pub fn parse_override(&self, text: &str) -> Result<Caps> {
        let bad = |msg: String| Error::Parse { line: 0, msg: format!("{CAP_ENV}: {msg}") };
        let num = |v: &str| -> Result<u64> {
            let v = v.trim();
            if let Some((mant, exp)) = v.split_once(['e', 'E']) {
                let mant: u64 = mant.parse().map_err(|_| bad(format!("bad number {v:?}")))?;
                let exp: u32 = exp.parse().map_err(|_| bad(format!("bad number {v:?}")))?;
                return 10u64
                    .checked_pow(exp)
                    .and_then(|e| e.checked_mul(mant))
                    .ok_or_else(|| bad(format!("number {v:?} overflows")));
            }
            v.parse().map_err(|_| bad(format!("bad number {v:?}")))
        };
        let mut caps = *self;
        let text = text.trim();
        if text.is_empty() {
            return Ok(caps);
        }
        if !text.contains('=') {
            let v = num(text)?;
            caps.field_order = v;
            caps.vertices = v;
            return Ok(caps);
        }
        for part in text.split(',') {
            let (key, value) =
                part.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            let value = num(value)?;
            match key.trim() {
                "field" => caps.field_order = value,
                "vertices" => caps.vertices = value,
                "nodes" => caps.search_nodes = value,
                other => return Err(bad(format!("unknown cap {other:?}"))),
            }
        }
        Ok(caps)
    }

    /// Defaults, overridden by `SUBSUM_CAP` when set.
    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAP_ENV) {
            Ok(text) => Caps::default().parse_override(&text),
            Err(_) => Ok(Caps::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides() {
        let base = Caps::default();
        assert_eq!(base.parse_override("").unwrap(), base);
        let c = base.parse_override("5000").unwrap();
        assert_eq!((c.field_order, c.vertices, c.search_nodes), (5000, 5000, base.search_nodes));
        let c = base.parse_override("nodes=1e8, field=64").unwrap();
        assert_eq!((c.field_order, c.vertices, c.search_nodes), (64, base.vertices, 100_000_000));
        assert!(base.parse_override("color=3").is_err());
        assert!(base.parse_override("field=x").is_err());
    }
}
