//! Honeycomb lattice geometry.
//!
//! The lattice is built from `Lx × Ly` unit cells, each holding one A and one
//! B site. Cells are addressed by `(row, col)` with `row < Ly`, `col < Lx`, and
//! sites are indexed cell-major, sublattice-minor:
//!
//! ```text
//! index(row, col, A) = 2 * (row * Lx + col)
//! index(row, col, B) = 2 * (row * Lx + col) + 1
//! ```
//!
//! The site index is also the bit position of the spin in a state vector.
//!
//! Every A site at `(r, c)` owns one bond of each type:
//!
//! ```text
//! z-link: A(r, c) -- B(r, c)
//! x-link: A(r, c) -- B(r, c - 1)
//! y-link: A(r, c) -- B(r - 1, c)
//! ```
//!
//! With nearest-neighbour vectors `d_z = (0, 1)`, `d_x = (√3/2, -1/2)`,
//! `d_y = (-√3/2, -1/2)` from A to B, the hexagon anchored at cell `(r, c)` is
//! traversed counterclockwise as
//!
//! ```text
//! 1 = A(r, c), 2 = B(r, c), 3 = A(r, c+1), 4 = B(r-1, c+1), 5 = A(r-1, c+1), 6 = B(r-1, c)
//! ```
//!
//! so the boundary bonds are `12: z, 23: x, 34: y, 45: z, 56: x, 61: y`, and the
//! bond leaving the hexagon at position `n` has type `x, y, z, x, y, z`. That is
//! the letter pattern of the plaquette operator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LinkType {
    X,
    Y,
    Z,
}

impl LinkType {
    pub const ALL: [LinkType; 3] = [LinkType::X, LinkType::Y, LinkType::Z];

    fn slot(self) -> usize {
        match self {
            LinkType::X => 0,
            LinkType::Y => 1,
            LinkType::Z => 2,
        }
    }
}

impl fmt::Display for LinkType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LinkType::X => "x",
            LinkType::Y => "y",
            LinkType::Z => "z",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Torus,
    Open,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "torus" | "periodic" => Ok(Boundary::Torus),
            "open" => Ok(Boundary::Open),
            other => Err(Error::Parse(format!("unknown boundary '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub row: usize,
    pub col: usize,
    pub sublattice: Sublattice,
    pub index: usize,
}

/// A nearest-neighbour link. `a` is always the A-sublattice end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bond {
    pub a: Site,
    pub b: Site,
    pub link: LinkType,
}

impl Bond {
    pub fn endpoints(&self) -> (usize, usize) {
        (self.a.index, self.b.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plaquette {
    pub label: usize,
    /// Anchor cell `(row, col)`.
    pub cell: (usize, usize),
    /// Sites 1..6 in counterclockwise order.
    pub sites: [Site; 6],
    /// Boundary bonds: entry `n` joins `sites[n]` and `sites[(n + 1) % 6]`.
    pub bonds: [usize; 6],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoneycombLattice {
    pub lx: usize,
    pub ly: usize,
    pub boundary: Boundary,
    pub sites: Vec<Site>,
    pub bonds: Vec<Bond>,
    pub plaquettes: Vec<Plaquette>,
    /// `site_bonds[i][slot]` is the bond of the given type touching site `i`.
    #[serde(skip)]
    site_bonds: Vec<[Option<usize>; 3]>,
}

pub fn build_lattice(lx: usize, ly: usize, boundary: Boundary) -> Result<HoneycombLattice> {
    HoneycombLattice::new(lx, ly, boundary)
}

impl HoneycombLattice {
    pub fn new(lx: usize, ly: usize, boundary: Boundary) -> Result<Self> {
        match boundary {
            Boundary::Torus if lx < 2 || ly < 2 => {
                return Err(Error::Size(format!(
                    "torus extents must be at least 2 (got {lx}x{ly}); smaller tori make plaquettes overlap themselves"
                )))
            }
            Boundary::Open if lx < 1 || ly < 1 => {
                return Err(Error::Size(format!("open extents must be positive (got {lx}x{ly})")))
            }
            _ => {}
        }
        // Keeps 2 * lx * ly far from overflowing and vectors sane.
        if lx.saturating_mul(ly) > 1 << 20 {
            return Err(Error::Size(format!("{lx}x{ly} cells is too large")));
        }

        let n_cells = lx * ly;
        let mut sites = Vec::with_capacity(2 * n_cells);
        for row in 0..ly {
            for col in 0..lx {
                for sublattice in [Sublattice::A, Sublattice::B] {
                    let index = sites.len();
                    sites.push(Site { row, col, sublattice, index });
                }
            }
        }

        let torus = boundary == Boundary::Torus;
        let site_at = |row: usize, col: usize, sub: Sublattice| -> Site {
            sites[2 * (row * lx + col) + usize::from(sub == Sublattice::B)]
        };

        let mut bonds = Vec::with_capacity(3 * n_cells);
        // cell_bonds[cell][slot] indexes the bond owned by that cell's A site.
        let mut cell_bonds = vec![[None; 3]; n_cells];
        for row in 0..ly {
            for col in 0..lx {
                let a = site_at(row, col, Sublattice::A);
                for link in LinkType::ALL {
                    let partner = match link {
                        LinkType::Z => Some((row, col)),
                        LinkType::X => {
                            if col > 0 {
                                Some((row, col - 1))
                            } else if torus {
                                Some((row, lx - 1))
                            } else {
                                None
                            }
                        }
                        LinkType::Y => {
                            if row > 0 {
                                Some((row - 1, col))
                            } else if torus {
                                Some((ly - 1, col))
                            } else {
                                None
                            }
                        }
                    };
                    if let Some((br, bc)) = partner {
                        cell_bonds[row * lx + col][link.slot()] = Some(bonds.len());
                        bonds.push(Bond { a, b: site_at(br, bc, Sublattice::B), link });
                    }
                }
            }
        }

        let mut site_bonds = vec![[None; 3]; sites.len()];
        for (k, bond) in bonds.iter().enumerate() {
            site_bonds[bond.a.index][bond.link.slot()] = Some(k);
            site_bonds[bond.b.index][bond.link.slot()] = Some(k);
        }

        let mut plaquettes = Vec::new();
        for row in 0..ly {
            for col in 0..lx {
                let (right, below) = if torus {
                    ((col + 1) % lx, (row + ly - 1) % ly)
                } else {
                    if col + 1 >= lx || row == 0 {
                        continue;
                    }
                    (col + 1, row - 1)
                };
                let sites6 = [
                    site_at(row, col, Sublattice::A),
                    site_at(row, col, Sublattice::B),
                    site_at(row, right, Sublattice::A),
                    site_at(below, right, Sublattice::B),
                    site_at(below, right, Sublattice::A),
                    site_at(below, col, Sublattice::B),
                ];
                let owned = |r: usize, c: usize, link: LinkType| cell_bonds[r * lx + c][link.slot()];
                let bond_ids = [
                    owned(row, col, LinkType::Z),
                    owned(row, right, LinkType::X),
                    owned(row, right, LinkType::Y),
                    owned(below, right, LinkType::Z),
                    owned(below, right, LinkType::X),
                    owned(row, col, LinkType::Y),
                ];
                if bond_ids.iter().any(Option::is_none) {
                    continue;
                }
                let label = plaquettes.len();
                plaquettes.push(Plaquette {
                    label,
                    cell: (row, col),
                    sites: sites6,
                    bonds: bond_ids.map(Option::unwrap),
                });
            }
        }

        Ok(Self { lx, ly, boundary, sites, bonds, plaquettes, site_bonds })
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn n_plaquettes(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn site_index(&self, row: usize, col: usize, sublattice: Sublattice) -> usize {
        2 * (row * self.lx + col) + usize::from(sublattice == Sublattice::B)
    }

    pub fn plaquette(&self, p: usize) -> Result<&Plaquette> {
        self.plaquettes.get(p).ok_or(Error::Lookup { kind: "plaquette", index: p })
    }

    pub fn plaquette_sites(&self, p: usize) -> Result<[Site; 6]> {
        Ok(self.plaquette(p)?.sites)
    }

    pub fn bonds_of_type(&self, link: LinkType) -> Vec<Bond> {
        self.bonds.iter().copied().filter(|b| b.link == link).collect()
    }

    /// Bond of type `link` touching `site`, if present.
    pub fn bond_at(&self, site: usize, link: LinkType) -> Option<usize> {
        self.site_bonds.get(site).and_then(|slots| slots[link.slot()])
    }

    /// The `link`-neighbour of `site`, if the bond exists.
    pub fn neighbor(&self, site: usize, link: LinkType) -> Option<usize> {
        let bond = &self.bonds[self.bond_at(site, link)?];
        Some(if bond.a.index == site { bond.b.index } else { bond.a.index })
    }

    /// Labels of the plaquettes whose boundary contains `bond` (two on a torus).
    pub fn plaquettes_of_bond(&self, bond: usize) -> Vec<usize> {
        self.plaquettes
            .iter()
            .filter(|p| p.bonds.contains(&bond))
            .map(|p| p.label)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lattice serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: HoneycombLattice =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        // Rebuild so derived lookup tables are present and the document is checked.
        let rebuilt = HoneycombLattice::new(raw.lx, raw.ly, raw.boundary)?;
        if rebuilt.sites != raw.sites || rebuilt.bonds != raw.bonds || rebuilt.plaquettes != raw.plaquettes {
            return Err(Error::Parse("lattice document does not match its extents".into()));
        }
        Ok(rebuilt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn torus_counts() {
        for (lx, ly) in [(2, 2), (3, 3), (4, 2), (2, 5)] {
            let lat = build_lattice(lx, ly, Boundary::Torus).unwrap();
            assert_eq!(lat.n_sites(), 2 * lx * ly);
            assert_eq!(lat.bonds.len(), 3 * lx * ly);
            assert_eq!(lat.n_plaquettes(), lx * ly);
            for link in LinkType::ALL {
                assert_eq!(lat.bonds_of_type(link).len(), lx * ly);
            }
        }
    }

    #[test]
    fn open_2x2_drops_edge_bonds_and_plaquettes() {
        let lat = build_lattice(2, 2, Boundary::Open).unwrap();
        assert_eq!(lat.n_sites(), 8);
        assert!(lat.bonds.len() < 12);
        assert_eq!(lat.bonds.len(), 8);
        assert_eq!(lat.n_plaquettes(), 1);
    }

    #[test]
    fn small_torus_rejected() {
        assert!(matches!(build_lattice(1, 3, Boundary::Torus), Err(Error::Size(_))));
        assert!(matches!(build_lattice(3, 1, Boundary::Torus), Err(Error::Size(_))));
        assert!(build_lattice(1, 1, Boundary::Open).is_ok());
    }

    #[test]
    fn indexing_formula() {
        let lat = build_lattice(3, 2, Boundary::Torus).unwrap();
        for s in &lat.sites {
            assert_eq!(lat.site_index(s.row, s.col, s.sublattice), s.index);
        }
    }

    #[test]
    fn every_site_has_one_bond_per_type_on_torus() {
        let lat = build_lattice(3, 3, Boundary::Torus).unwrap();
        for s in &lat.sites {
            for link in LinkType::ALL {
                let count = lat
                    .bonds
                    .iter()
                    .filter(|b| b.link == link && (b.a.index == s.index || b.b.index == s.index))
                    .count();
                assert_eq!(count, 1);
            }
        }
        let z: Vec<usize> = lat
            .bonds_of_type(LinkType::Z)
            .iter()
            .flat_map(|b| [b.a.index, b.b.index])
            .collect();
        let unique: HashSet<_> = z.iter().collect();
        assert_eq!(z.len(), lat.n_sites());
        assert_eq!(unique.len(), lat.n_sites());
    }

    #[test]
    fn plaquette_ordering() {
        let lat = build_lattice(2, 2, Boundary::Torus).unwrap();
        let expected_links =
            [LinkType::Z, LinkType::X, LinkType::Y, LinkType::Z, LinkType::X, LinkType::Y];
        for p in &lat.plaquettes {
            let distinct: HashSet<_> = p.sites.iter().map(|s| s.index).collect();
            assert_eq!(distinct.len(), 6);
            assert_eq!(p.sites[0].sublattice, Sublattice::A);
            for n in 0..6 {
                let bond = lat.bonds[p.bonds[n]];
                let ends = [bond.a.index, bond.b.index];
                assert!(ends.contains(&p.sites[n].index));
                assert!(ends.contains(&p.sites[(n + 1) % 6].index));
                assert_eq!(bond.link, expected_links[n]);
            }
        }
    }

    #[test]
    fn unknown_plaquette() {
        let lat = build_lattice(2, 2, Boundary::Torus).unwrap();
        assert!(matches!(lat.plaquette_sites(4), Err(Error::Lookup { .. })));
    }

    #[test]
    fn every_bond_borders_two_plaquettes_on_torus() {
        let lat = build_lattice(3, 3, Boundary::Torus).unwrap();
        for k in 0..lat.bonds.len() {
            assert_eq!(lat.plaquettes_of_bond(k).len(), 2);
        }
    }

    #[test]
    fn neighbors_are_symmetric() {
        let lat = build_lattice(3, 2, Boundary::Torus).unwrap();
        for s in 0..lat.n_sites() {
            for link in LinkType::ALL {
                let n = lat.neighbor(s, link).unwrap();
                assert_eq!(lat.neighbor(n, link), Some(s));
                assert_ne!(lat.sites[n].sublattice, lat.sites[s].sublattice);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let lat = build_lattice(2, 3, Boundary::Open).unwrap();
        let back = HoneycombLattice::from_json(&lat.to_json()).unwrap();
        assert_eq!(back, lat);
        assert_eq!(back.bond_at(1, LinkType::Z), lat.bond_at(1, LinkType::Z));
    }
}
