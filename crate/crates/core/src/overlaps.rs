//! Inner products of a propagated Pauli sum with states and operators.
//!
//! All routines stream the sum once and use bitwise membership tests. Per
//! the normalized-Pauli convention, only [`overlap_with_pauli_sum`] carries
//! an explicit 2^n factor.

use crate::bits::PauliBits;
use crate::coeff::{Coeff, Real};
use crate::pauli::{PauliWord, PAULI_I, PAULI_X, PAULI_Z};
use crate::sum::PauliSum;
use crate::Error;

/// Tensor product of single-qubit stabilizer states: one Pauli axis and a
/// sign per site, representing (I + s sigma)/2 at each qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductStabilizerState {
    /// Pauli code per site, X, Y, or Z.
    pub axes: Vec<u8>,
    /// +1 or -1 per site.
    pub signs: Vec<i8>,
}

impl ProductStabilizerState {
    pub fn new(axes: Vec<u8>, signs: Vec<i8>) -> Result<Self, Error> {
        if axes.len() != signs.len() {
            return Err(Error::Invalid("axis and sign counts differ".into()));
        }
        if axes.iter().any(|&a| !(PAULI_X..=PAULI_Z).contains(&a)) {
            return Err(Error::Invalid("stabilizer axis must be X, Y, or Z".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Invalid("stabilizer sign must be +1 or -1".into()));
        }
        Ok(ProductStabilizerState { axes, signs })
    }

    /// |0...0> as the all-(Z, +1) product.
    pub fn all_zero(n: usize) -> Self {
        ProductStabilizerState {
            axes: vec![PAULI_Z; n],
            signs: vec![1; n],
        }
    }

    /// |+...+> as the all-(X, +1) product.
    pub fn all_plus(n: usize) -> Self {
        ProductStabilizerState {
            axes: vec![PAULI_X; n],
            signs: vec![1; n],
        }
    }

    /// Computational basis state |x> with one bit per site.
    pub fn computational(bits: &[u8]) -> Self {
        ProductStabilizerState {
            axes: vec![PAULI_Z; bits.len()],
            signs: bits.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect(),
        }
    }

    pub fn nqubits(&self) -> usize {
        self.axes.len()
    }
}

/// Tr[|0^n><0^n| S]: sum of coefficients of I/Z-only words.
pub fn overlap_with_zero<B: PauliBits, T: Real, C: Coeff<T>>(s: &PauliSum<B, T, C>) -> T {
    let mut acc = T::zero();
    for (w, c) in s.iter() {
        if w.xy_weight() == 0 {
            acc += c.value();
        }
    }
    acc
}

/// Tr[|+^n><+^n| S]: sum of coefficients of I/X-only words.
pub fn overlap_with_plus<B: PauliBits, T: Real, C: Coeff<T>>(s: &PauliSum<B, T, C>) -> T {
    let mut acc = T::zero();
    for (w, c) in s.iter() {
        if w.yz_weight() == 0 {
            acc += c.value();
        }
    }
    acc
}

/// Tr[|x><x| S] for a computational basis bitstring, one 0/1 entry per site.
pub fn overlap_with_computational<B: PauliBits, T: Real, C: Coeff<T>>(
    s: &PauliSum<B, T, C>,
    x: &[u8],
) -> Result<T, Error> {
    if x.len() != s.nqubits() {
        return Err(Error::NQubitsMismatch(x.len(), s.nqubits()));
    }
    let mut acc = T::zero();
    'words: for (w, c) in s.iter() {
        if w.xy_weight() != 0 {
            continue;
        }
        let mut sign = T::one();
        for (site0, &bit) in x.iter().enumerate() {
            if bit != 0 && w.code(site0 + 1) == PAULI_Z {
                sign = -sign;
            }
            if bit > 1 {
                continue 'words;
            }
        }
        acc += c.value() * sign;
    }
    Ok(acc)
}

/// Tr[rho S] for a product stabilizer state.
pub fn overlap_with_product_stabilizer<B: PauliBits, T: Real, C: Coeff<T>>(
    s: &PauliSum<B, T, C>,
    rho: &ProductStabilizerState,
) -> Result<T, Error> {
    if rho.nqubits() != s.nqubits() {
        return Err(Error::NQubitsMismatch(rho.nqubits(), s.nqubits()));
    }
    let mut acc = T::zero();
    'words: for (w, c) in s.iter() {
        let mut sign = T::one();
        for site in 1..=s.nqubits() {
            let code = w.code(site);
            if code == PAULI_I {
                continue;
            }
            if code != rho.axes[site - 1] {
                continue 'words;
            }
            if rho.signs[site - 1] < 0 {
                sign = -sign;
            }
        }
        acc += c.value() * sign;
    }
    Ok(acc)
}

/// Tr[rho S] with rho itself given as a Pauli sum of the density operator;
/// the 2^n factor restores the unnormalized-Pauli convention.
pub fn overlap_with_pauli_sum<B: PauliBits, T: Real>(
    rho: &PauliSum<B, T>,
    s: &PauliSum<B, T>,
) -> Result<T, Error> {
    let factor = T::from_f64_lossy((1u64 << rho.nqubits()) as f64);
    Ok(rho.scalar_product(s)? * factor)
}

/// Two-point correlator read-off: the coefficient of Q in the propagated
/// sum, which equals 2^{-n} Tr[Q E(Q)] when the sum is E(Q).
pub fn correlation_lookup<B: PauliBits, T: Real, C: Coeff<T>>(
    s: &PauliSum<B, T, C>,
    q: &PauliWord<B>,
) -> T {
    s.get_coeff(q)
}
