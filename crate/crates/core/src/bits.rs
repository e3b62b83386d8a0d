//! Storage backends for bit-packed Pauli strings.
//!
//! A Pauli string on `n` sites is a base-four numeral occupying `2n` bits,
//! two bits per site (I=0, X=1, Y=2, Z=3). Any unsigned integer wide enough
//! can hold it; beyond 64 sites a fixed-length limb array takes over. All
//! kernels in [`crate::pauli`] are generic over this trait so that the same
//! code runs on `u8` words and 256-bit multi-limb words.

use std::fmt::Debug;
use std::hash::Hash;

/// Raw bit storage for a packed Pauli string.
///
/// Bits above position `2n` are required to stay zero, which lets the
/// alternating masks span the full width without per-`n` masking.
pub trait PauliBits:
    Copy + Clone + Eq + Ord + Hash + Debug + Send + Sync + 'static
{
    /// Number of sites this storage can hold (bit width / 2).
    const SITE_CAPACITY: usize;

    fn zero() -> Self;
    fn is_zero(&self) -> bool;

    /// Two-bit code at 0-based site index.
    fn code_at(&self, site0: usize) -> u8;

    /// Copy with the two-bit code at 0-based site index replaced.
    fn with_code(&self, site0: usize, code: u8) -> Self;

    fn xor(&self, other: &Self) -> Self;
    fn and(&self, other: &Self) -> Self;
    fn or(&self, other: &Self) -> Self;
    fn shr1(&self) -> Self;
    fn shl1(&self) -> Self;
    fn count_ones(&self) -> u32;

    /// Alternating mask `...010101` selecting the right bit of every pair.
    fn mask_r() -> Self;

    /// Numeric value when it fits in 128 bits; `None` otherwise.
    fn to_u128(&self) -> Option<u128>;

    /// Build from a numeric value. Panics if the value does not fit.
    fn from_u128(value: u128) -> Self;
}

macro_rules! impl_pauli_bits_uint {
    ($($t:ty),*) => {$(
        impl PauliBits for $t {
            const SITE_CAPACITY: usize = <$t>::BITS as usize / 2;

            #[inline]
            fn zero() -> Self {
                0
            }

            #[inline]
            fn is_zero(&self) -> bool {
                *self == 0
            }

            #[inline]
            fn code_at(&self, site0: usize) -> u8 {
                ((self >> (2 * site0)) & 0b11) as u8
            }

            #[inline]
            fn with_code(&self, site0: usize, code: u8) -> Self {
                let cleared = self & !((0b11 as $t) << (2 * site0));
                cleared | ((code as $t) << (2 * site0))
            }

            #[inline]
            fn xor(&self, other: &Self) -> Self {
                self ^ other
            }

            #[inline]
            fn and(&self, other: &Self) -> Self {
                self & other
            }

            #[inline]
            fn or(&self, other: &Self) -> Self {
                self | other
            }

            #[inline]
            fn shr1(&self) -> Self {
                self >> 1
            }

            #[inline]
            fn shl1(&self) -> Self {
                self << 1
            }

            #[inline]
            fn count_ones(&self) -> u32 {
                <$t>::count_ones(*self)
            }

            #[inline]
            fn mask_r() -> Self {
                let mut m: $t = 0;
                let mut shift = 0;
                while shift < <$t>::BITS {
                    m |= 1 << shift;
                    shift += 2;
                }
                m
            }

            #[inline]
            fn to_u128(&self) -> Option<u128> {
                Some(*self as u128)
            }

            #[inline]
            fn from_u128(value: u128) -> Self {
                <$t>::try_from(value).expect("value too wide for word type")
            }
        }
    )*};
}

impl_pauli_bits_uint!(u8, u16, u32, u64, u128);

/// Fixed-length little-endian limb array for strings beyond 64 sites.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub struct Limbs<const K: usize>(pub [u64; K]);

/// 256-bit storage, up to 128 sites.
pub type Limbs4 = Limbs<4>;

impl<const K: usize> PartialOrd for Limbs<K> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<const K: usize> Ord for Limbs<K> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // numeric order: compare from the most significant limb down
        for i in (0..K).rev() {
            match self.0[i].cmp(&other.0[i]) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl<const K: usize> PauliBits for Limbs<K> {
    const SITE_CAPACITY: usize = K * 32;

    #[inline]
    fn zero() -> Self {
        Limbs([0; K])
    }

    #[inline]
    fn is_zero(&self) -> bool {
        self.0.iter().all(|&l| l == 0)
    }

    #[inline]
    fn code_at(&self, site0: usize) -> u8 {
        let bit = 2 * site0;
        ((self.0[bit / 64] >> (bit % 64)) & 0b11) as u8
    }

    #[inline]
    fn with_code(&self, site0: usize, code: u8) -> Self {
        let bit = 2 * site0;
        let mut limbs = self.0;
        limbs[bit / 64] &= !(0b11u64 << (bit % 64));
        limbs[bit / 64] |= (code as u64) << (bit % 64);
        Limbs(limbs)
    }

    #[inline]
    fn xor(&self, other: &Self) -> Self {
        let mut limbs = self.0;
        for (l, r) in limbs.iter_mut().zip(other.0.iter()) {
            *l ^= r;
        }
        Limbs(limbs)
    }

    #[inline]
    fn and(&self, other: &Self) -> Self {
        let mut limbs = self.0;
        for (l, r) in limbs.iter_mut().zip(other.0.iter()) {
            *l &= r;
        }
        Limbs(limbs)
    }

    #[inline]
    fn or(&self, other: &Self) -> Self {
        let mut limbs = self.0;
        for (l, r) in limbs.iter_mut().zip(other.0.iter()) {
            *l |= r;
        }
        Limbs(limbs)
    }

    #[inline]
    fn shr1(&self) -> Self {
        let mut limbs = [0u64; K];
        for i in 0..K {
            limbs[i] = self.0[i] >> 1;
            if i + 1 < K {
                limbs[i] |= self.0[i + 1] << 63;
            }
        }
        Limbs(limbs)
    }

    #[inline]
    fn shl1(&self) -> Self {
        let mut limbs = [0u64; K];
        for i in 0..K {
            limbs[i] = self.0[i] << 1;
            if i > 0 {
                limbs[i] |= self.0[i - 1] >> 63;
            }
        }
        Limbs(limbs)
    }

    #[inline]
    fn count_ones(&self) -> u32 {
        self.0.iter().map(|l| l.count_ones()).sum()
    }

    #[inline]
    fn mask_r() -> Self {
        Limbs([0x5555_5555_5555_5555u64; K])
    }

    fn to_u128(&self) -> Option<u128> {
        let mut value: u128 = 0;
        for (i, &limb) in self.0.iter().enumerate() {
            if i >= 2 {
                if limb != 0 {
                    return None;
                }
                continue;
            }
            value |= (limb as u128) << (64 * i);
        }
        Some(value)
    }

    fn from_u128(value: u128) -> Self {
        let mut limbs = [0u64; K];
        limbs[0] = value as u64;
        if K > 1 {
            limbs[1] = (value >> 64) as u64;
        } else {
            assert!(value >> 64 == 0, "value too wide for word type");
        }
        Limbs(limbs)
    }
}

/// Smallest built-in width from {8, 16, 32, 64, 128} bits covering `2n` bits,
/// reported in bits; `None` when a multi-limb word is needed.
pub fn native_width_for(nqubits: usize) -> Option<u32> {
    let bits = 2 * nqubits;
    [8u32, 16, 32, 64, 128].into_iter().find(|&w| bits <= w as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_r_alternates() {
        assert_eq!(u8::mask_r(), 0b01010101);
        assert_eq!(u64::mask_r(), 0x5555_5555_5555_5555);
        assert_eq!(Limbs4::mask_r().0, [0x5555_5555_5555_5555u64; 4]);
    }

    #[test]
    fn limb_shifts_carry_across_boundaries() {
        let w = Limbs::<4>([1u64 << 63, 0, 0, 0]);
        assert_eq!(w.shl1().0, [0, 1, 0, 0]);
        assert_eq!(Limbs::<4>([0, 1, 0, 0]).shr1().0, [1u64 << 63, 0, 0, 0]);
    }

    #[test]
    fn limb_code_round_trip() {
        let mut w = Limbs4::zero();
        for site in [0usize, 31, 32, 63, 100, 127] {
            w = w.with_code(site, 3);
            assert_eq!(w.code_at(site), 3);
            w = w.with_code(site, 1);
            assert_eq!(w.code_at(site), 1);
        }
    }

    #[test]
    fn width_selection() {
        assert_eq!(native_width_for(3), Some(8));
        assert_eq!(native_width_for(4), Some(8));
        assert_eq!(native_width_for(5), Some(16));
        assert_eq!(native_width_for(64), Some(128));
        assert_eq!(native_width_for(65), None);
    }
}
