//! Zig-zag ordered honeycomb lattices and the site/spin → qubit map.
//!
//! Sites are numbered row by row along a snake: even rows run left to right,
//! odd rows right to left, so consecutive indices are always neighbours in a
//! row or joined by the vertical bond at the row turn. Each site owns qubits
//! `2i` and `2i + 1`. On even rows spin up sits on `2i`; on odd rows the
//! order is mirrored (spin up on `2i + 1`), following the direction of the
//! snake. With this convention the 1×1 measurement groups come out as the
//! qubit pairs `(0,2),(1,3),(6,8),(7,9)` / `(2,4),(3,5),(8,10),(9,11)` /
//! `(4,7),(5,6),(0,11),(1,10)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub orientation: Orientation,
}

/// A qubit pair `(low, high)`.
pub type QubitPair = (usize, usize);

/// Four simultaneously measurable groups of qubit pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeGroups {
    /// On-site pairs `(2i, 2i+1)`.
    pub coulomb: Vec<QubitPair>,
    /// Horizontal bonds at even position within their row.
    pub horizontal_even: Vec<QubitPair>,
    /// Horizontal bonds at odd position within their row.
    pub horizontal_odd: Vec<QubitPair>,
    pub vertical: Vec<QubitPair>,
}

impl EdgeGroups {
    pub fn as_array(&self) -> [&[QubitPair]; 4] {
        [
            &self.coulomb,
            &self.horizontal_even,
            &self.horizontal_odd,
            &self.vertical,
        ]
    }
}

// Row 0 spans columns 0..=6, row 1 columns 6..=1 (snake), vertical bonds at
// columns 6, 4 and 2. Thirteen sites, fourteen bonds.
const TABLE_2X1_ROWS: [&[usize]; 2] = [&[0, 1, 2, 3, 4, 5, 6], &[7, 8, 9, 10, 11, 12]];
const TABLE_2X1_VERTICAL: [(usize, usize); 3] = [(6, 7), (4, 9), (2, 11)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoneycombLattice {
    nx: usize,
    ny: usize,
    rows: Vec<Vec<usize>>,
    row_of: Vec<usize>,
    edges: Vec<Edge>,
}

impl HoneycombLattice {
    /// Builds an `nx × ny` lattice.
    ///
    /// `(1, k)` is a strip of `k` hexagons (two rows of `2k + 1` sites);
    /// `(2, 1)` is the fixed 13-site table above. Anything else is rejected.
    pub fn build(nx: usize, ny: usize) -> Result<Self> {
        match (nx, ny) {
            (1, k) if k >= 1 => {
                let width = 2 * k + 1;
                let row0: Vec<usize> = (0..width).collect();
                let row1: Vec<usize> = (width..2 * width).collect();
                // Column c of row 1 holds site 2·width − 1 − c.
                let vertical = (0..width)
                    .step_by(2)
                    .map(|c| (c, 2 * width - 1 - c))
                    .collect::<Vec<_>>();
                Self::from_rows(nx, ny, vec![row0, row1], &vertical)
            }
            (2, 1) => Self::from_rows(
                2,
                1,
                TABLE_2X1_ROWS.iter().map(|r| r.to_vec()).collect(),
                &TABLE_2X1_VERTICAL,
            ),
            _ => Err(Error::Config(format!(
                "unsupported honeycomb geometry {nx}x{ny} (supported: 1xk, 2x1)"
            ))),
        }
    }

    /// Assembles a lattice from snake-ordered rows and explicit vertical bonds.
    pub fn from_rows(
        nx: usize,
        ny: usize,
        rows: Vec<Vec<usize>>,
        vertical: &[(usize, usize)],
    ) -> Result<Self> {
        let n_sites: usize = rows.iter().map(Vec::len).sum();
        let mut row_of = vec![usize::MAX; n_sites];
        let mut expected = 0;
        for (r, row) in rows.iter().enumerate() {
            for &s in row {
                if s != expected {
                    return Err(Error::Config(
                        "rows must enumerate sites in snake order".into(),
                    ));
                }
                row_of[s] = r;
                expected += 1;
            }
        }
        let mut edges = Vec::new();
        for row in &rows {
            for w in row.windows(2) {
                edges.push(Edge {
                    a: w[0],
                    b: w[1],
                    orientation: Orientation::Horizontal,
                });
            }
        }
        for &(a, b) in vertical {
            edges.push(Edge {
                a: a.min(b),
                b: a.max(b),
                orientation: Orientation::Vertical,
            });
        }
        let lat = HoneycombLattice {
            nx,
            ny,
            rows,
            row_of,
            edges,
        };
        lat.validate()?;
        Ok(lat)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_sites();
        if n == 0 {
            return Err(Error::Config("lattice has no sites".into()));
        }
        if 2 * n > crate::pauli::MAX_QUBITS {
            return Err(Error::Capacity {
                what: "qubits for lattice",
                requested: 2 * n,
                limit: crate::pauli::MAX_QUBITS,
            });
        }
        let mut degree = vec![0usize; n];
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(Error::Config(format!("invalid edge {} {}", e.a, e.b)));
            }
            if !seen.insert((e.a.min(e.b), e.a.max(e.b))) {
                return Err(Error::Config(format!("duplicate edge {} {}", e.a, e.b)));
            }
            degree[e.a] += 1;
            degree[e.b] += 1;
        }
        if let Some(site) = degree.iter().position(|&d| d > 3) {
            return Err(Error::Config(format!("site {site} has degree > 3")));
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn n_sites(&self) -> usize {
        self.row_of.len()
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row_of(&self, site: usize) -> usize {
        self.row_of[site]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Site-site adjacency as a dense 0/1 matrix.
    pub fn adjacency(&self) -> Vec<Vec<f64>> {
        let n = self.n_sites();
        let mut m = vec![vec![0.0; n]; n];
        for e in &self.edges {
            m[e.a][e.b] = 1.0;
            m[e.b][e.a] = 1.0;
        }
        m
    }

    pub fn qubit_of(&self, site: usize, spin: Spin) -> usize {
        let spin_bit = matches!(spin, Spin::Down) as usize;
        let mirrored = self.row_of[site] % 2;
        2 * site + (spin_bit ^ mirrored)
    }

    /// Inverse of [`qubit_of`](Self::qubit_of).
    pub fn site_spin_of(&self, qubit: usize) -> (usize, Spin) {
        let site = qubit / 2;
        let bit = (qubit % 2) ^ (self.row_of[site] % 2);
        (site, if bit == 0 { Spin::Up } else { Spin::Down })
    }

    /// Qubits of one spin species, ascending.
    pub fn spin_qubits(&self, spin: Spin) -> Vec<usize> {
        (0..self.n_sites())
            .map(|s| self.qubit_of(s, spin))
            .collect()
    }

    pub fn spin_mask(&self, spin: Spin) -> u64 {
        self.spin_qubits(spin).iter().fold(0, |m, q| m | 1 << q)
    }

    /// Same-spin qubit pairs `(low, high)` for one bond, up first.
    pub fn edge_pairs(&self, e: &Edge) -> [QubitPair; 2] {
        Spin::BOTH.map(|spin| {
            let qa = self.qubit_of(e.a, spin);
            let qb = self.qubit_of(e.b, spin);
            (qa.min(qb), qa.max(qb))
        })
    }

    /// Splits all two-qubit terms into four groups of disjoint pairs.
    pub fn edge_groups(&self) -> EdgeGroups {
        let coulomb = (0..self.n_sites()).map(|s| (2 * s, 2 * s + 1)).collect();
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for row in &self.rows {
            for (k, w) in row.windows(2).enumerate() {
                let e = Edge {
                    a: w[0],
                    b: w[1],
                    orientation: Orientation::Horizontal,
                };
                let target = if k % 2 == 0 { &mut even } else { &mut odd };
                target.extend(self.edge_pairs(&e));
            }
        }
        let mut vertical: Vec<QubitPair> = self
            .edges
            .iter()
            .filter(|e| e.orientation == Orientation::Vertical)
            .flat_map(|e| self.edge_pairs(e))
            .collect();
        even.sort_unstable();
        odd.sort_unstable();
        vertical.sort_unstable();
        EdgeGroups {
            coulomb,
            horizontal_even: even,
            horizontal_odd: odd,
            vertical,
        }
    }

    /// One bond per line as `a b H|V`.
    pub fn adjacency_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for HoneycombLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.edges {
            let tag = match e.orientation {
                Orientation::Horizontal => 'H',
                Orientation::Vertical => 'V',
            };
            writeln!(f, "{} {} {}", e.a, e.b, tag)?;
        }
        Ok(())
    }
}

/// Parsed adjacency listing, used for fixtures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyListing(pub Vec<Edge>);

impl FromStr for AdjacencyListing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("bad adjacency line `{line}`"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let a = parts[0].parse().map_err(|_| bad())?;
            let b = parts[1].parse().map_err(|_| bad())?;
            let orientation = match parts[2] {
                "H" => Orientation::Horizontal,
                "V" => Orientation::Vertical,
                _ => return Err(bad()),
            };
            edges.push(Edge { a, b, orientation });
        }
        Ok(AdjacencyListing(edges))
    }
}
