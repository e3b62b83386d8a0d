//! Bit-packed Pauli strings and the constant-time kernels on them.
//!
//! A string on `n` sites is stored as a base-four numeral with two bits per
//! site (I=0, X=1, Y=2, Z=3). Site 1 occupies the lowest bit pair, so the
//! big-endian text rendering puts site 1 leftmost: `"ZYX"` with `n = 3` is
//! the integer 27.

use crate::bits::PauliBits;
use crate::Error;
use std::fmt;

/// Single-site Pauli codes.
pub const PAULI_I: u8 = 0;
pub const PAULI_X: u8 = 1;
pub const PAULI_Y: u8 = 2;
pub const PAULI_Z: u8 = 3;

/// Phase exponent table for single-site products: `P_a P_b = i^k P_{a XOR b}`
/// with `k = PHASE_EXP[a][b]`. This is the cached Levi-Civita data; all sign
/// bookkeeping stays in integer arithmetic mod 4.
pub const PHASE_EXP: [[u8; 4]; 4] = [
    [0, 0, 0, 0],
    [0, 0, 1, 3],
    [0, 3, 0, 1],
    [0, 1, 3, 0],
];

/// Multiplicative phase `i^k` with `k` mod 4.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub struct Phase {
    k: u8,
}

impl Phase {
    pub fn new(k: u8) -> Self {
        Phase { k: k & 3 }
    }

    /// Exponent in {0, 1, 2, 3}.
    pub fn exponent(&self) -> u8 {
        self.k
    }

    pub fn compose(&self, other: Phase) -> Phase {
        Phase::new(self.k.wrapping_add(other.k))
    }

    /// Real value of `i^k`; fails for imaginary phases.
    pub fn real_value(&self) -> Option<f64> {
        match self.k {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }
}

/// Bit-packed Pauli string with its site count.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PauliWord<B: PauliBits> {
    nqubits: u32,
    bits: B,
}

impl<B: PauliBits> PauliWord<B> {
    /// All-identity string on `n` sites.
    pub fn identity(nqubits: usize) -> Self {
        assert!(
            nqubits >= 1 && nqubits <= B::SITE_CAPACITY,
            "qubit count {nqubits} out of range for word capacity {}",
            B::SITE_CAPACITY
        );
        PauliWord {
            nqubits: nqubits as u32,
            bits: B::zero(),
        }
    }

    /// Build from explicit non-identity entries at 1-indexed sites.
    pub fn encode(nqubits: usize, entries: &[(usize, u8)]) -> Result<Self, Error> {
        let mut w: PauliWord<B> = PauliWord::identity(nqubits);
        let mut seen: Vec<usize> = Vec::with_capacity(entries.len());
        for &(site, code) in entries {
            if site < 1 || site > nqubits {
                return Err(Error::SiteOutOfRange { site, nqubits });
            }
            if seen.contains(&site) {
                return Err(Error::DuplicateSite(site));
            }
            if code < 1 || code > 3 {
                return Err(Error::InvalidPauliCode(code));
            }
            seen.push(site);
            w.bits = w.bits.with_code(site - 1, code);
        }
        Ok(w)
    }

    /// Reconstruct from the base-four numeral value.
    pub fn from_value(nqubits: usize, value: u128) -> Self {
        let mut w: PauliWord<B> = PauliWord::identity(nqubits);
        assert!(
            nqubits >= 64 || value >> (2 * nqubits) == 0,
            "value has bits above site {nqubits}"
        );
        w.bits = B::from_u128(value);
        w
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits as usize
    }

    pub fn bits(&self) -> B {
        self.bits
    }

    /// Numeric value when it fits in 128 bits.
    pub fn value(&self) -> Option<u128> {
        self.bits.to_u128()
    }

    pub fn is_identity(&self) -> bool {
        self.bits.is_zero()
    }

    /// Pauli code at a 1-indexed site.
    pub fn get_pauli(&self, site: usize) -> Result<u8, Error> {
        if site < 1 || site > self.nqubits() {
            return Err(Error::SiteOutOfRange {
                site,
                nqubits: self.nqubits(),
            });
        }
        Ok(self.bits.code_at(site - 1))
    }

    /// Copy with the code at a 1-indexed site replaced.
    pub fn set_pauli(&self, site: usize, code: u8) -> Result<Self, Error> {
        if site < 1 || site > self.nqubits() {
            return Err(Error::SiteOutOfRange {
                site,
                nqubits: self.nqubits(),
            });
        }
        if code > 3 {
            return Err(Error::InvalidPauliCode(code));
        }
        Ok(PauliWord {
            nqubits: self.nqubits,
            bits: self.bits.with_code(site - 1, code),
        })
    }

    /// Unchecked code read at a 1-indexed site. Panics on out-of-range sites
    /// only in debug builds.
    #[inline]
    pub fn code(&self, site: usize) -> u8 {
        debug_assert!(site >= 1 && site <= self.nqubits());
        self.bits.code_at(site - 1)
    }

    /// Unchecked code write at a 1-indexed site.
    #[inline]
    pub fn with_code(&self, site: usize, code: u8) -> Self {
        debug_assert!(site >= 1 && site <= self.nqubits() && code <= 3);
        PauliWord {
            nqubits: self.nqubits,
            bits: self.bits.with_code(site - 1, code),
        }
    }

    /// Operator product `self · other`: word by XOR, phase by the per-site
    /// Levi-Civita table.
    pub fn product(&self, other: &Self) -> Result<(Self, Phase), Error> {
        if self.nqubits != other.nqubits {
            return Err(Error::NQubitsMismatch(self.nqubits(), other.nqubits()));
        }
        let word = PauliWord {
            nqubits: self.nqubits,
            bits: self.bits.xor(&other.bits),
        };
        // only sites where both factors are non-identity can contribute a phase
        let both = nonidentity_mask(&self.bits).and(&nonidentity_mask(&other.bits));
        let mut k: u8 = 0;
        for site0 in 0..self.nqubits() {
            if both.code_at(site0) & 1 == 1 {
                k = k.wrapping_add(
                    PHASE_EXP[self.bits.code_at(site0) as usize][other.bits.code_at(site0) as usize],
                );
            }
        }
        Ok((word, Phase::new(k)))
    }

    /// Whether the two strings commute: an even number of sites must hold
    /// anticommuting single-site pairs.
    pub fn commutes(&self, other: &Self) -> Result<bool, Error> {
        if self.nqubits != other.nqubits {
            return Err(Error::NQubitsMismatch(self.nqubits(), other.nqubits()));
        }
        Ok(commutes_bits(&self.bits, &other.bits))
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> u32 {
        let w = self.bits;
        B::mask_r().and(&w.or(&w.shr1())).count_ones()
    }

    /// Number of X or Y sites.
    pub fn xy_weight(&self) -> u32 {
        let w = self.bits;
        B::mask_r().and(&w.xor(&w.shr1())).count_ones()
    }

    /// Number of Y or Z sites.
    pub fn yz_weight(&self) -> u32 {
        // m_L selects the left bit of every pair, set exactly for Y and Z
        self.bits.and(&B::mask_r().shl1()).count_ones()
    }

    /// Parse a big-endian symbol string ("ZYX" puts Z on site 1).
    pub fn parse(text: &str) -> Result<Self, Error> {
        let symbols: Vec<char> = text.trim().chars().collect();
        if symbols.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        let mut w: PauliWord<B> = PauliWord::identity(symbols.len());
        for (i, ch) in symbols.iter().enumerate() {
            let code = match ch.to_ascii_uppercase() {
                'I' => PAULI_I,
                'X' => PAULI_X,
                'Y' => PAULI_Y,
                'Z' => PAULI_Z,
                other => return Err(Error::Parse(format!("unknown Pauli symbol '{other}'"))),
            };
            w.bits = w.bits.with_code(i, code);
        }
        Ok(w)
    }
}

/// Mask with the low bit of every non-identity site set.
#[inline]
fn nonidentity_mask<B: PauliBits>(w: &B) -> B {
    B::mask_r().and(&w.or(&w.shr1()))
}

/// Bitwise commutation test on raw words of equal capacity.
#[inline]
pub fn commutes_bits<B: PauliBits>(a: &B, b: &B) -> bool {
    let m_r = B::mask_r();
    let m_l = m_r.shl1();
    let lhs = a.and(&m_r).and(&b.and(&m_l).shr1());
    let rhs = b.and(&m_r).and(&a.and(&m_l).shr1());
    lhs.xor(&rhs).count_ones() % 2 == 0
}

pub fn code_symbol(code: u8) -> char {
    match code & 3 {
        0 => 'I',
        1 => 'X',
        2 => 'Y',
        _ => 'Z',
    }
}

impl<B: PauliBits> fmt::Display for PauliWord<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in 1..=self.nqubits() {
            write!(f, "{}", code_symbol(self.code(site)))?;
        }
        Ok(())
    }
}
