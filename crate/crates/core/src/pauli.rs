//! Multi-site Pauli strings with exact phase tracking in `{±1, ±i}`.
//!
//! Letters are stored sorted by site with identities omitted, so structural
//! equality is operator equality.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{HoneycombLattice, LinkType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Single-site product `self * other` as `(i^k, letter)`; `None` is the identity.
    fn product(self, other: Pauli) -> (Phase, Option<Pauli>) {
        use Pauli::*;
        match (self, other) {
            (X, X) | (Y, Y) | (Z, Z) => (Phase::ONE, None),
            (X, Y) => (Phase::I, Some(Z)),
            (Y, Z) => (Phase::I, Some(X)),
            (Z, X) => (Phase::I, Some(Y)),
            (Y, X) => (Phase::MINUS_I, Some(Z)),
            (Z, Y) => (Phase::MINUS_I, Some(X)),
            (X, Z) => (Phase::MINUS_I, Some(Y)),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl From<LinkType> for Pauli {
    fn from(link: LinkType) -> Self {
        match link {
            LinkType::X => Pauli::X,
            LinkType::Y => Pauli::Y,
            LinkType::Z => Pauli::Z,
        }
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(Error::Parse(format!("unknown Pauli axis '{other}'"))),
        }
    }
}

/// Element `i^k` of the phase group, `k` taken mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    phase: Phase,
    letters: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(site: usize, letter: Pauli) -> Self {
        Self { phase: Phase::ONE, letters: vec![(site, letter)] }
    }

    /// Builds the ordered product of the given single-site letters.
    pub fn from_letters<I>(letters: I) -> Self
    where
        I: IntoIterator<Item = (usize, Pauli)>,
    {
        letters
            .into_iter()
            .fold(Self::identity(), |acc, (site, letter)| acc.multiply(&Self::single(site, letter)))
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = self.phase * phase;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[(usize, Pauli)] {
        &self.letters
    }

    pub fn letter_at(&self, site: usize) -> Option<Pauli> {
        self.letters
            .binary_search_by_key(&site, |&(s, _)| s)
            .ok()
            .map(|k| self.letters[k].1)
    }

    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Hermitian iff the phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn max_site(&self) -> Option<usize> {
        self.letters.last().map(|&(s, _)| s)
    }

    /// Same letters with phase `+1`.
    pub fn unsigned(&self) -> Self {
        Self { phase: Phase::ONE, letters: self.letters.clone() }
    }

    /// Exact product `self · other`.
    pub fn multiply(&self, other: &PauliString) -> PauliString {
        let mut phase = self.phase * other.phase;
        let mut letters = Vec::with_capacity(self.letters.len() + other.letters.len());
        let (mut i, mut j) = (0, 0);
        while i < self.letters.len() || j < other.letters.len() {
            match (self.letters.get(i), other.letters.get(j)) {
                (Some(&(sa, pa)), Some(&(sb, pb))) if sa == sb => {
                    let (ph, letter) = pa.product(pb);
                    phase = phase * ph;
                    if let Some(l) = letter {
                        letters.push((sa, l));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(sa, pa)), Some(&(sb, _))) if sa < sb => {
                    letters.push((sa, pa));
                    i += 1;
                }
                (Some(&(sa, pa)), None) => {
                    letters.push((sa, pa));
                    i += 1;
                }
                (_, Some(&(sb, pb))) => {
                    letters.push((sb, pb));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        PauliString { phase, letters }
    }

    /// Adjoint: same letters, conjugated phase.
    pub fn adjoint(&self) -> Self {
        Self { phase: self.phase.conj(), letters: self.letters.clone() }
    }

    /// Inverse in the Pauli group (equal to the adjoint).
    pub fn inverse(&self) -> Self {
        self.adjoint()
    }

    /// `true` iff the strings commute: an even number of sites carry
    /// different non-identity letters.
    pub fn commutes(&self, other: &PauliString) -> bool {
        let (mut i, mut j, mut clashes) = (0, 0, 0usize);
        while i < self.letters.len() && j < other.letters.len() {
            let (sa, pa) = self.letters[i];
            let (sb, pb) = other.letters[j];
            if sa == sb {
                if pa != pb {
                    clashes += 1;
                }
                i += 1;
                j += 1;
            } else if sa < sb {
                i += 1;
            } else {
                j += 1;
            }
        }
        clashes % 2 == 0
    }

    /// Bit masks `(x_mask, z_mask, n_y)` of the string over a register; Y counts in both masks.
    pub fn masks(&self) -> (u64, u64, u32) {
        let (mut x, mut z, mut ny) = (0u64, 0u64, 0u32);
        for &(s, p) in &self.letters {
            let bit = 1u64 << s;
            match p {
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        (x, z, ny)
    }

    /// `σ|b⟩ = factor · (-1)^{popcount(b & z_mask)} |b ⊕ x_mask⟩`; returns `(x_mask, z_mask, factor)`.
    pub(crate) fn action(&self) -> (usize, usize, Complex64) {
        let (x, z, ny) = self.masks();
        let factor = (self.phase * Phase::from_power(ny)).to_complex();
        (x as usize, z as usize, factor)
    }
}

pub fn multiply(p: &PauliString, q: &PauliString) -> PauliString {
    p.multiply(q)
}

pub fn commutes(p: &PauliString, q: &PauliString) -> bool {
    p.commutes(q)
}

/// Plaquette operator `σ₁ˣ σ₂ʸ σ₃ᶻ σ₄ˣ σ₅ʸ σ₆ᶻ` over the plaquette's ordered sites.
pub fn plaquette_operator(lattice: &HoneycombLattice, p: usize) -> Result<PauliString> {
    let sites = lattice.plaquette_sites(p)?;
    let pattern = [Pauli::X, Pauli::Y, Pauli::Z, Pauli::X, Pauli::Y, Pauli::Z];
    Ok(PauliString::from_letters(sites.iter().zip(pattern).map(|(s, l)| (s.index, l))))
}

impl Mul for &PauliString {
    type Output = PauliString;

    fn mul(self, rhs: &PauliString) -> PauliString {
        self.multiply(rhs)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase)?;
        for &(s, p) in &self.letters {
            write!(f, " {}{}", p.symbol(), s)?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `"+i X3 Y7 Z12"`. The phase token is optional (defaults to `+1`);
    /// `I` tokens are skipped and repeated sites are multiplied in order.
    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace().peekable();
        let phase = match tokens.peek().copied() {
            Some("+1") | Some("1") => Phase::ONE,
            Some("-1") => Phase::MINUS_ONE,
            Some("+i") | Some("i") => Phase::I,
            Some("-i") => Phase::MINUS_I,
            _ => {
                return parse_letters(tokens);
            }
        };
        tokens.next();
        Ok(parse_letters(tokens)?.with_phase(phase))
    }
}

fn parse_letters<'a>(tokens: impl Iterator<Item = &'a str>) -> Result<PauliString> {
    let mut out = PauliString::identity();
    for tok in tokens {
        let (head, tail) = tok.split_at(1.min(tok.len()));
        if head == "I" || head == "i" && tail.is_empty() {
            continue;
        }
        let letter: Pauli = head.parse()?;
        let site: usize = tail
            .parse()
            .map_err(|_| Error::Parse(format!("bad site in token '{tok}'")))?;
        out = out.multiply(&PauliString::single(site, letter));
    }
    Ok(out)
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, Boundary};

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn single_site_products() {
        assert_eq!(p("X0").multiply(&p("Y0")), p("+i Z0"));
        assert_eq!(p("Y0").multiply(&p("X0")), p("-i Z0"));
        for l in ["X0", "Y0", "Z0", "X5"] {
            let s = p(l);
            assert_eq!(s.multiply(&s), PauliString::identity());
        }
    }

    #[test]
    fn commutation() {
        assert!(!p("X0").commutes(&p("Y0")));
        assert!(p("X0").commutes(&p("Y1")));
        assert!(p("X0 X1").commutes(&p("Y0 Y1")));
        assert!(!p("X0 X1").commutes(&p("Z0")));
    }

    #[test]
    fn text_round_trip() {
        let s = p("+i X3 Y7 Z12");
        assert_eq!(s.to_string(), "+i X3 Y7 Z12");
        assert_eq!(p(&s.to_string()), s);
        assert_eq!(PauliString::identity().to_string(), "+1");
        assert_eq!(p("+1"), PauliString::identity());
        assert_eq!(p("Z2 X1"), p("X1 Z2"));
        assert!("Q3".parse::<PauliString>().is_err());
        assert!("Xa".parse::<PauliString>().is_err());
    }

    #[test]
    fn plaquette_operator_is_involution() {
        let lat = build_lattice(3, 3, Boundary::Torus).unwrap();
        for q in 0..lat.n_plaquettes() {
            let w = plaquette_operator(&lat, q).unwrap();
            assert_eq!(w.weight(), 6);
            assert_eq!(w.phase(), Phase::ONE);
            assert_eq!(w.multiply(&w), PauliString::identity());
        }
        assert!(plaquette_operator(&lat, 9).is_err());
    }

    #[test]
    fn plaquette_operators_commute_pairwise() {
        let lat = build_lattice(3, 3, Boundary::Torus).unwrap();
        let ws: Vec<_> = (0..9).map(|q| plaquette_operator(&lat, q).unwrap()).collect();
        for a in &ws {
            for b in &ws {
                assert!(a.commutes(b));
            }
        }
    }

    #[test]
    fn product_of_all_plaquettes_on_torus_is_identity() {
        for (lx, ly) in [(2, 2), (3, 3), (2, 3)] {
            let lat = build_lattice(lx, ly, Boundary::Torus).unwrap();
            let prod = (0..lat.n_plaquettes())
                .map(|q| plaquette_operator(&lat, q).unwrap())
                .fold(PauliString::identity(), |acc, w| acc.multiply(&w));
            assert!(prod.is_identity());
            assert_eq!(prod.phase(), Phase::ONE);
        }
    }
}
