//! Z2 gauge fields on the bonds.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, HoneycombLattice, LinkType, Sublattice};

/// `u_jk = ±1` per bond, oriented with `j` on sublattice A.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaugeConfig {
    u: Vec<i8>,
}

impl GaugeConfig {
    pub fn vortex_free(lattice: &HoneycombLattice) -> Self {
        Self { u: vec![1; lattice.bonds.len()] }
    }

    pub fn from_values(lattice: &HoneycombLattice, u: Vec<i8>) -> Result<Self> {
        if u.len() != lattice.bonds.len() {
            return Err(Error::Size(format!("{} gauge values for {} bonds", u.len(), lattice.bonds.len())));
        }
        if u.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::Domain("gauge values must be +1 or -1".into()));
        }
        Ok(Self { u })
    }

    pub fn values(&self) -> &[i8] {
        &self.u
    }

    pub fn u(&self, bond: usize) -> i8 {
        self.u[bond]
    }

    pub fn flip(&mut self, bond: usize) {
        self.u[bond] = -self.u[bond];
    }

    /// `Π u` over all bonds.
    pub fn product(&self) -> i8 {
        self.u.iter().product()
    }

    /// `w_p = Π_{(j,k)∈∂p} u_jk` for every plaquette.
    pub fn fluxes(&self, lattice: &HoneycombLattice) -> Vec<i8> {
        lattice
            .plaquettes
            .iter()
            .map(|p| p.bonds.iter().map(|&b| self.u[b]).product())
            .collect()
    }

    /// Flips `u` on every bond touching a site in `sites`.
    pub fn gauge_transform(&self, lattice: &HoneycombLattice, sites: &[usize]) -> Self {
        let mut out = self.clone();
        for &s in sites {
            for link in LinkType::ALL {
                if let Some(b) = lattice.bond_at(s, link) {
                    out.flip(b);
                }
            }
        }
        out
    }

    /// Gauge-inequivalent configurations with the same fluxes: on a torus the
    /// four choices of `Z2` holonomy around the two cycles, otherwise just `self`.
    pub fn holonomy_variants(&self, lattice: &HoneycombLattice) -> Vec<GaugeConfig> {
        if lattice.boundary != Boundary::Torus {
            return vec![self.clone()];
        }
        // y-bonds leaving A-row 0 cut every vertical cycle once; x-bonds
        // leaving A-column 0 cut every horizontal one.
        let row_cut: Vec<usize> = (0..lattice.lx)
            .filter_map(|c| lattice.bond_at(lattice.site_index(0, c, Sublattice::A), LinkType::Y))
            .collect();
        let col_cut: Vec<usize> = (0..lattice.ly)
            .filter_map(|r| lattice.bond_at(lattice.site_index(r, 0, Sublattice::A), LinkType::X))
            .collect();
        let mut out = Vec::with_capacity(4);
        for (a, b) in [(false, false), (true, false), (false, true), (true, true)] {
            let mut g = self.clone();
            if a {
                row_cut.iter().for_each(|&bond| g.flip(bond));
            }
            if b {
                col_cut.iter().for_each(|&bond| g.flip(bond));
            }
            out.push(g);
        }
        out
    }
}

/// A gauge field realizing `target` fluxes. Starts from `u = +1` and flips `u`
/// along a shortest dual path between consecutive vortices (by index); ties
/// go to the lower plaquette index. On open lattices an unpaired vortex is
/// routed to the outer face.
pub fn gauge_from_flux(lattice: &HoneycombLattice, target: &[i8]) -> Result<GaugeConfig> {
    let n_p = lattice.n_plaquettes();
    if target.len() != n_p {
        return Err(Error::Constraint(format!("{} flux values for {n_p} plaquettes", target.len())));
    }
    if target.iter().any(|&w| w != 1 && w != -1) {
        return Err(Error::Constraint("flux values must be +1 or -1".into()));
    }
    let vortices: Vec<usize> = (0..n_p).filter(|&p| target[p] < 0).collect();
    let torus = lattice.boundary == Boundary::Torus;
    if torus && vortices.len() % 2 == 1 {
        return Err(Error::Constraint("a torus carries an even number of vortices".into()));
    }

    // Dual graph: plaquettes plus the outer face (index n_p) on open lattices.
    let outside = n_p;
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_p + 1];
    for bond in 0..lattice.bonds.len() {
        let ps = lattice.plaquettes_of_bond(bond);
        let (a, b) = match ps.as_slice() {
            [a, b] => (*a, *b),
            [a] => (*a, outside),
            _ => continue,
        };
        adjacency[a].push((b, bond));
        adjacency[b].push((a, bond));
    }
    for list in adjacency.iter_mut() {
        list.sort_unstable();
    }

    let mut gauge = GaugeConfig::vortex_free(lattice);
    let mut pairs: Vec<(usize, usize)> = vortices.chunks(2).filter(|c| c.len() == 2).map(|c| (c[0], c[1])).collect();
    if vortices.len() % 2 == 1 {
        pairs.push((vortices[vortices.len() - 1], outside));
    }
    for (from, to) in pairs {
        let path = dual_path(&adjacency, from, to).ok_or_else(|| {
            Error::Constraint(format!("plaquettes {from} and {to} are not connected on the dual lattice"))
        })?;
        path.into_iter().for_each(|bond| gauge.flip(bond));
    }
    if gauge.fluxes(lattice) != target {
        return Err(Error::Constraint("flux pattern cannot be realized on this lattice".into()));
    }
    Ok(gauge)
}

fn dual_path(adjacency: &[Vec<(usize, usize)>], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; adjacency.len()];
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(node) = queue.pop_front() {
        if node == to {
            let mut bonds = Vec::new();
            let mut cur = to;
            while let Some((p, bond)) = prev[cur] {
                bonds.push(bond);
                cur = p;
            }
            return Some(bonds);
        }
        for &(next, bond) in &adjacency[node] {
            if !seen[next] {
                seen[next] = true;
                prev[next] = Some((node, bond));
                queue.push_back(next);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;

    #[test]
    fn all_plus_flux_gives_all_plus_gauge() {
        let lat = build_lattice(3, 3, Boundary::Torus).unwrap();
        let g = gauge_from_flux(&lat, &[1; 9]).unwrap();
        assert!(g.values().iter().all(|&u| u == 1));
    }

    #[test]
    fn z_link_flip_creates_adjacent_pair() {
        let lat = build_lattice(3, 3, Boundary::Torus).unwrap();
        let mut g = GaugeConfig::vortex_free(&lat);
        let bond = lat.bond_at(lat.site_index(1, 1, Sublattice::A), LinkType::Z).unwrap();
        g.flip(bond);
        let w = g.fluxes(&lat);
        let flipped: Vec<usize> = (0..9).filter(|&p| w[p] < 0).collect();
        assert_eq!(flipped, lat.plaquettes_of_bond(bond));
    }

    #[test]
    fn odd_vortex_count_on_torus_rejected() {
        let lat = build_lattice(2, 2, Boundary::Torus).unwrap();
        assert!(matches!(gauge_from_flux(&lat, &[-1, 1, 1, 1]), Err(Error::Constraint(_))));
    }

    #[test]
    fn open_lattice_accepts_single_vortex() {
        let lat = build_lattice(3, 3, Boundary::Open).unwrap();
        let mut target = vec![1; lat.n_plaquettes()];
        target[0] = -1;
        let g = gauge_from_flux(&lat, &target).unwrap();
        assert_eq!(g.fluxes(&lat), target);
    }

    #[test]
    fn holonomies_keep_fluxes() {
        let lat = build_lattice(3, 2, Boundary::Torus).unwrap();
        let base = gauge_from_flux(&lat, &[-1, 1, 1, -1, 1, 1]).unwrap();
        let variants = base.holonomy_variants(&lat);
        assert_eq!(variants.len(), 4);
        for v in &variants {
            assert_eq!(v.fluxes(&lat), base.fluxes(&lat));
        }
        for i in 0..4 {
            for j in 0..i {
                assert_ne!(variants[i], variants[j]);
            }
        }
    }

    #[test]
    fn gauge_transform_keeps_fluxes() {
        let lat = build_lattice(3, 3, Boundary::Torus).unwrap();
        let g = GaugeConfig::vortex_free(&lat).gauge_transform(&lat, &[0, 7, 14]);
        assert_eq!(g.fluxes(&lat), vec![1; 9]);
        assert_eq!(g.values().iter().filter(|&&u| u < 0).count(), 9);
    }
}
