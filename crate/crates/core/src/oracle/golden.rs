use std::str::FromStr;

use super::Sector;
use crate::error::{Error, Result};

/// Frozen reference energies shipped with the crate.
pub const GOLDEN_REGISTRY: &str = include_str!("../../data/golden_energies.txt");

/// One line of the registry: `lattice tau U n_up n_down E0 tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenEntry {
    pub lattice: (usize, usize),
    pub tau: f64,
    pub u: f64,
    pub sector: Sector,
    pub energy: f64,
    pub tol: f64,
}

impl FromStr for GoldenEntry {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let err = || Error::Parse(format!("malformed golden entry `{line}`"));
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 7 {
            return Err(err());
        }
        let (nx, ny) = f[0].split_once('x').ok_or_else(err)?;
        let num = |s: &str| s.parse::<f64>().map_err(|_| err());
        let int = |s: &str| s.parse::<u32>().map_err(|_| err());
        Ok(GoldenEntry {
            lattice: (
                nx.parse().map_err(|_| err())?,
                ny.parse().map_err(|_| err())?,
            ),
            tau: num(f[1])?,
            u: num(f[2])?,
            sector: Sector::new(int(f[3])?, int(f[4])?),
            energy: num(f[5])?,
            tol: num(f[6])?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRegistry {
    pub entries: Vec<GoldenEntry>,
}

impl GoldenRegistry {
    pub fn parse(text: &str) -> Result<Self> {
        let entries = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<_>>()?;
        Ok(GoldenRegistry { entries })
    }

    pub fn builtin() -> Self {
        Self::parse(GOLDEN_REGISTRY).expect("shipped registry parses")
    }

    pub fn lookup(
        &self,
        lattice: (usize, usize),
        tau: f64,
        u: f64,
        sector: Sector,
    ) -> Option<&GoldenEntry> {
        self.entries
            .iter()
            .find(|e| e.lattice == lattice && e.tau == tau && e.u == u && e.sector == sector)
    }
}
