use crate::error::Error;

/// Size caps guarding the operations that can blow up combinatorially.
///
/// The defaults keep every structure at desk scale; all of them can be
/// overridden, either programmatically or through the `LFDGF_CAPS`
/// environment variable handled by the CLI (`closure_cap=128,team_cap=...`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of formulas in a subformula closure. The default of 64
    /// keeps types inside one machine word; anything up to 128 still fits the
    /// bitset representation.
    pub closure_cap: usize,
    /// Maximum team size a transformation is allowed to materialize.
    pub team_cap: usize,
    /// Maximum node count for a formula produced by the GF-to-LFD
    /// translation, which is exponential in the quantifier rank.
    pub translation_node_cap: usize,
    /// Maximum number of tree nodes built while unraveling a type model.
    pub unravel_node_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            closure_cap: 64,
            team_cap: 4096,
            translation_node_cap: 100_000,
            unravel_node_cap: 50_000,
        }
    }
}

/// Hard bound imposed by the bitset representation of types.
pub const CLOSURE_BITSET_LIMIT: usize = 128;

impl Caps {
    /// Applies comma-separated `key=value` overrides, as accepted from the
    /// `LFDGF_CAPS` environment variable and config files.
    pub fn apply_overrides(&mut self, spec: &str) -> Result<(), Error> {
        for item in spec.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Validation(format!("bad cap override `{item}`")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::Validation(format!("bad cap value in `{item}`")))?;
            match key.trim() {
                "closure_cap" => self.closure_cap = value,
                "team_cap" => self.team_cap = value,
                "translation_node_cap" => self.translation_node_cap = value,
                "unravel_node_cap" => self.unravel_node_cap = value,
                other => {
                    return Err(Error::Validation(format!("unknown cap `{other}`")));
                }
            }
        }
        if self.closure_cap > CLOSURE_BITSET_LIMIT {
            return Err(Error::Validation(format!(
                "closure_cap {} exceeds the bitset limit {}",
                self.closure_cap, CLOSURE_BITSET_LIMIT
            )));
        }
        Ok(())
    }
}
