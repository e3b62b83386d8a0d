//! Dense brute-force reference simulations for small qubit counts.
//!
//! Two independent paths supply ground truth: a Schrodinger statevector
//! simulation for unitary circuits on pure states (n <= 10), and a density
//! matrix / Pauli-vector simulation covering channels (n <= 6). The
//! Heisenberg counterpart conjugates the observable through the circuit and
//! reports every one of the 4^n Pauli coefficients.

use crate::bits::PauliBits;
use crate::circuits::Circuit;
use crate::gates::{
    amplitude_damping_kraus, builtin_clifford_unitary, ptm_from_kraus, transfer_table_from_ptm,
    Angle, Gate, NoiseKind, TransferTable,
};
use crate::linalg::{self, CMat};
use crate::overlaps::ProductStabilizerState;
use crate::pauli::{PauliWord, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z};
use crate::sum::PauliSum;
use crate::Error;
use num_complex::Complex64;

const STATEVECTOR_MAX_QUBITS: usize = 10;
const DENSITY_MAX_QUBITS: usize = 6;

/// Input state of an expectation value.
#[derive(Clone, Debug)]
pub enum StateSpec<B: PauliBits> {
    Zero,
    Plus,
    /// One 0/1 entry per site, site 1 first.
    Bitstring(Vec<u8>),
    Stabilizer(ProductStabilizerState),
    /// Density operator given directly as a Pauli sum.
    PauliSum(PauliSum<B, f64>),
}

impl<B: PauliBits> StateSpec<B> {
    fn is_pure_product(&self) -> bool {
        !matches!(self, StateSpec::PauliSum(_))
    }
}

/// Local action of one gate, used by both dense paths.
enum LocalChannel {
    Unitary(CMat),
    Kraus(Vec<CMat>),
    /// Heisenberg transfer rows (input substring to weighted outputs).
    Table(TransferTable),
}

fn local_channel(gate: &Gate, thetas: &[f64]) -> Result<(LocalChannel, Vec<usize>), Error> {
    Ok(match gate {
        Gate::Clifford { name, sites } => (
            LocalChannel::Unitary(builtin_clifford_unitary(name)?),
            sites.clone(),
        ),
        Gate::CliffordTable { table, sites } => {
            let map = table
                .entries
                .iter()
                .map(|&(out, sign)| vec![(out, sign as f64)])
                .collect();
            (
                LocalChannel::Table(TransferTable {
                    arity: table.arity,
                    map,
                }),
                sites.clone(),
            )
        }
        Gate::PauliRotation {
            codes,
            sites,
            angle,
        } => {
            let theta = match angle {
                Angle::Fixed(t) => *t,
                Angle::Slot(s) => thetas[*s],
            };
            let generator = linalg::substring_matrix(codes);
            (
                LocalChannel::Unitary(linalg::rotation_unitary(&generator, theta)),
                sites.clone(),
            )
        }
        Gate::PauliNoise { kind, sites } => {
            let kraus = match *kind {
                NoiseKind::Depolarizing1 { p } => pauli_mixture_kraus(1, &{
                    let mut v = vec![p / 3.0; 4];
                    v[0] = 1.0 - p;
                    v
                }),
                NoiseKind::Dephasing { p } => pauli_mixture_kraus(1, &[1.0 - p, 0.0, 0.0, p]),
                NoiseKind::Depolarizing2 { p } => pauli_mixture_kraus(2, &{
                    let mut v = vec![p / 15.0; 16];
                    v[0] = 1.0 - p;
                    v
                }),
                NoiseKind::PauliXYZ { px, py, pz } => {
                    pauli_mixture_kraus(1, &[1.0 - px - py - pz, px, py, pz])
                }
            };
            (LocalChannel::Kraus(kraus), sites.clone())
        }
        Gate::AmplitudeDamping { site, gamma } => (
            LocalChannel::Kraus(amplitude_damping_kraus(*gamma).to_vec()),
            vec![*site],
        ),
        Gate::ProjectorZero { site } => {
            let mut k: CMat = linalg::identity(2);
            k[(1, 1)] = linalg::czero();
            (LocalChannel::Kraus(vec![k]), vec![*site])
        }
        Gate::TransferMap { table, sites } => {
            (LocalChannel::Table((**table).clone()), sites.clone())
        }
    })
}

/// Kraus set of a probabilistic Pauli mixture with one probability per
/// substring index.
fn pauli_mixture_kraus(arity: usize, probs: &[f64]) -> Vec<CMat> {
    probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(idx, &p)| {
            linalg::substring_matrix_from_index(arity, idx).mapv(|v| v * linalg::cre(p.sqrt()))
        })
        .collect()
}

/// Heisenberg transfer rows of a local channel.
fn heisenberg_table(channel: &LocalChannel, arity: usize) -> Result<TransferTable, Error> {
    Ok(match channel {
        LocalChannel::Unitary(u) => {
            let ptm = ptm_from_kraus(arity, std::slice::from_ref(u))?;
            transfer_table_from_ptm(arity, &ptm)
        }
        LocalChannel::Kraus(kraus) => {
            let ptm = ptm_from_kraus(arity, kraus)?;
            transfer_table_from_ptm(arity, &ptm)
        }
        LocalChannel::Table(t) => t.clone(),
    })
}

/// Global bit position of a 1-indexed site in a basis index: site 1 is the
/// most significant bit.
#[inline]
fn site_bit(n: usize, site: usize) -> usize {
    n - site
}

/// Apply a local unitary to a statevector; the first listed site is the
/// most significant local qubit.
fn apply_local_unitary(state: &mut Vec<Complex64>, n: usize, u: &CMat, sites: &[usize]) {
    let k = sites.len();
    let dim = state.len();
    let mut next = vec![linalg::czero(); dim];
    for (c, &amp) in state.iter().enumerate() {
        if amp == linalg::czero() {
            continue;
        }
        let mut lc = 0usize;
        for (i, &s) in sites.iter().enumerate() {
            lc |= ((c >> site_bit(n, s)) & 1) << (k - 1 - i);
        }
        for lr in 0..(1usize << k) {
            let m = u[(lr, lc)];
            if m == linalg::czero() {
                continue;
            }
            let mut r = c;
            for (i, &s) in sites.iter().enumerate() {
                let bit = (lr >> (k - 1 - i)) & 1;
                let pos = site_bit(n, s);
                r = (r & !(1 << pos)) | (bit << pos);
            }
            next[r] += m * amp;
        }
    }
    *state = next;
}

/// Statevector of a pure product state spec.
fn build_statevector<B: PauliBits>(n: usize, spec: &StateSpec<B>) -> Result<Vec<Complex64>, Error> {
    let single_states: Vec<[Complex64; 2]> = match spec {
        StateSpec::Zero => vec![[linalg::cre(1.0), linalg::czero()]; n],
        StateSpec::Plus => {
            let s = linalg::cre(std::f64::consts::FRAC_1_SQRT_2);
            vec![[s, s]; n]
        }
        StateSpec::Bitstring(bits) => {
            if bits.len() != n {
                return Err(Error::NQubitsMismatch(bits.len(), n));
            }
            bits.iter()
                .map(|&b| match b {
                    0 => Ok([linalg::cre(1.0), linalg::czero()]),
                    1 => Ok([linalg::czero(), linalg::cre(1.0)]),
                    _ => Err(Error::Invalid("bitstring entries must be 0 or 1".into())),
                })
                .collect::<Result<_, _>>()?
        }
        StateSpec::Stabilizer(rho) => {
            if rho.nqubits() != n {
                return Err(Error::NQubitsMismatch(rho.nqubits(), n));
            }
            let h = std::f64::consts::FRAC_1_SQRT_2;
            rho.axes
                .iter()
                .zip(rho.signs.iter())
                .map(|(&axis, &sign)| {
                    let plus = sign > 0;
                    match (axis, plus) {
                        (PAULI_Z, true) => [linalg::cre(1.0), linalg::czero()],
                        (PAULI_Z, false) => [linalg::czero(), linalg::cre(1.0)],
                        (PAULI_X, true) => [linalg::cre(h), linalg::cre(h)],
                        (PAULI_X, false) => [linalg::cre(h), linalg::cre(-h)],
                        (PAULI_Y, true) => [linalg::cre(h), linalg::cim(h)],
                        (PAULI_Y, false) => [linalg::cre(h), linalg::cim(-h)],
                        _ => unreachable!("axes validated at construction"),
                    }
                })
                .collect()
        }
        StateSpec::PauliSum(_) => {
            return Err(Error::Invalid("Pauli-sum states are not pure products".into()))
        }
    };
    let mut state = vec![linalg::cre(1.0)];
    for site_state in single_states {
        let mut next = vec![linalg::czero(); state.len() * 2];
        for (i, &amp) in state.iter().enumerate() {
            next[2 * i] = amp * site_state[0];
            next[2 * i + 1] = amp * site_state[1];
        }
        state = next;
    }
    Ok(state)
}

/// <psi| P |psi> for a Pauli word.
fn word_expectation<B: PauliBits>(state: &[Complex64], word: &PauliWord<B>) -> f64 {
    let n = word.nqubits();
    let mut acc = linalg::czero();
    for (b, &amp) in state.iter().enumerate() {
        if amp == linalg::czero() {
            continue;
        }
        // P |b> = lambda |b ^ flips>
        let mut target = b;
        let mut lambda = linalg::cre(1.0);
        for site in 1..=n {
            let code = word.code(site);
            if code == PAULI_I {
                continue;
            }
            let pos = site_bit(n, site);
            let bit = (b >> pos) & 1;
            match code {
                PAULI_X => target ^= 1 << pos,
                PAULI_Y => {
                    target ^= 1 << pos;
                    lambda *= if bit == 0 {
                        linalg::cim(1.0)
                    } else {
                        linalg::cim(-1.0)
                    };
                }
                _ => {
                    if bit == 1 {
                        lambda = -lambda;
                    }
                }
            }
        }
        acc += state[target].conj() * lambda * amp;
    }
    acc.re
}

/// Dense matrix of a Pauli sum over all n sites.
fn dense_from_sum<B: PauliBits>(sum: &PauliSum<B, f64>) -> CMat {
    let n = sum.nqubits();
    let dim = 1usize << n;
    let mut m: CMat = ndarray::Array2::zeros((dim, dim));
    for (w, &c) in sum.iter() {
        let codes: Vec<u8> = (1..=n).map(|s| w.code(s)).collect();
        m = m + linalg::substring_matrix(&codes).mapv(|v| v * linalg::cre(c));
    }
    m
}

/// Dense density matrix of a state spec.
fn dense_rho<B: PauliBits>(n: usize, spec: &StateSpec<B>) -> Result<CMat, Error> {
    match spec {
        StateSpec::PauliSum(sum) => {
            if sum.nqubits() != n {
                return Err(Error::NQubitsMismatch(sum.nqubits(), n));
            }
            Ok(dense_from_sum(sum))
        }
        _ => {
            let psi = build_statevector(n, spec)?;
            let dim = psi.len();
            let mut rho: CMat = ndarray::Array2::zeros((dim, dim));
            for i in 0..dim {
                for j in 0..dim {
                    rho[(i, j)] = psi[i] * psi[j].conj();
                }
            }
            Ok(rho)
        }
    }
}

/// Embed a local matrix into the full Hilbert space.
fn embed(n: usize, local: &CMat, sites: &[usize]) -> CMat {
    let k = sites.len();
    let dim = 1usize << n;
    let mut full: CMat = ndarray::Array2::zeros((dim, dim));
    for c in 0..dim {
        let mut lc = 0usize;
        for (i, &s) in sites.iter().enumerate() {
            lc |= ((c >> site_bit(n, s)) & 1) << (k - 1 - i);
        }
        for lr in 0..(1usize << k) {
            let m = local[(lr, lc)];
            if m == linalg::czero() {
                continue;
            }
            let mut r = c;
            for (i, &s) in sites.iter().enumerate() {
                let bit = (lr >> (k - 1 - i)) & 1;
                let pos = site_bit(n, s);
                r = (r & !(1 << pos)) | (bit << pos);
            }
            full[(r, c)] = m;
        }
    }
    full
}

/// Pauli coefficient vector of a dense operator, indexed by word value.
fn pauli_vector(n: usize, m: &CMat) -> Vec<Complex64> {
    let npauli = 4usize.pow(n as u32);
    let dim = 1usize << n;
    let mut v = vec![linalg::czero(); npauli];
    for (idx, slot) in v.iter_mut().enumerate() {
        let codes: Vec<u8> = (0..n).map(|i| ((idx >> (2 * i)) & 3) as u8).collect();
        let p = linalg::substring_matrix(&codes);
        *slot = linalg::trace(&p.dot(m)) / linalg::cre(dim as f64);
    }
    v
}

fn dense_from_pauli_vector(n: usize, v: &[Complex64]) -> CMat {
    let dim = 1usize << n;
    let mut m: CMat = ndarray::Array2::zeros((dim, dim));
    for (idx, &c) in v.iter().enumerate() {
        if c == linalg::czero() {
            continue;
        }
        let codes: Vec<u8> = (0..n).map(|i| ((idx >> (2 * i)) & 3) as u8).collect();
        m = m + linalg::substring_matrix(&codes).mapv(|x| x * c);
    }
    m
}

/// Apply a Heisenberg transfer table in the Schrodinger direction to a
/// density matrix via its Pauli vector.
fn apply_table_schrodinger(n: usize, rho: &CMat, table: &TransferTable, sites: &[usize]) -> CMat {
    let r = pauli_vector(n, rho);
    let mut out = vec![linalg::czero(); r.len()];
    for (g_out, slot) in out.iter_mut().enumerate() {
        let mut a = 0usize;
        for (i, &s) in sites.iter().enumerate() {
            a |= ((g_out >> (2 * (s - 1))) & 3) << (2 * i);
        }
        let mut acc = linalg::czero();
        for &(b, val) in &table.map[a] {
            let mut g_in = g_out;
            for (i, &s) in sites.iter().enumerate() {
                let crumb = ((b as usize) >> (2 * i)) & 3;
                g_in = (g_in & !(3 << (2 * (s - 1)))) | (crumb << (2 * (s - 1)));
            }
            acc += linalg::cre(val) * r[g_in];
        }
        *slot = acc;
    }
    dense_from_pauli_vector(n, &out)
}

fn circuit_is_unitary(circ: &Circuit) -> bool {
    circ.gates().iter().all(|g| {
        matches!(
            g,
            Gate::Clifford { .. } | Gate::PauliRotation { .. }
        )
    })
}

/// Tr[rho_final O]: builds the state and pushes it forward through the
/// circuit in Schrodinger order.
pub fn dense_expectation<B: PauliBits>(
    circ: &Circuit,
    thetas: &[f64],
    observable: &PauliSum<B, f64>,
    state: &StateSpec<B>,
) -> Result<f64, Error> {
    circ.check_thetas(thetas)?;
    let n = circ.nqubits();
    if observable.nqubits() != n {
        return Err(Error::NQubitsMismatch(observable.nqubits(), n));
    }
    if circuit_is_unitary(circ) && state.is_pure_product() {
        if n > STATEVECTOR_MAX_QUBITS {
            return Err(Error::GuardExceeded(format!(
                "statevector path limited to {STATEVECTOR_MAX_QUBITS} qubits, got {n}"
            )));
        }
        let mut psi = build_statevector(n, state)?;
        for gate in circ.gates() {
            let (channel, sites) = local_channel(gate, thetas)?;
            match channel {
                LocalChannel::Unitary(u) => apply_local_unitary(&mut psi, n, &u, &sites),
                _ => unreachable!("unitary circuit"),
            }
        }
        let mut acc = 0.0;
        for (w, &c) in observable.iter() {
            acc += c * word_expectation(&psi, w);
        }
        return Ok(acc);
    }
    if n > DENSITY_MAX_QUBITS {
        return Err(Error::GuardExceeded(format!(
            "density path limited to {DENSITY_MAX_QUBITS} qubits, got {n}"
        )));
    }
    let mut rho = dense_rho(n, state)?;
    for gate in circ.gates() {
        let (channel, sites) = local_channel(gate, thetas)?;
        rho = match channel {
            LocalChannel::Unitary(u) => {
                let full = embed(n, &u, &sites);
                full.dot(&rho).dot(&linalg::dagger(&full))
            }
            LocalChannel::Kraus(kraus) => {
                let dim = rho.dim().0;
                let mut next: CMat = ndarray::Array2::zeros((dim, dim));
                for k in kraus {
                    let full = embed(n, &k, &sites);
                    next = next + full.dot(&rho).dot(&linalg::dagger(&full));
                }
                next
            }
            LocalChannel::Table(table) => apply_table_schrodinger(n, &rho, &table, &sites),
        };
    }
    let obs = dense_from_sum(observable);
    let value = linalg::trace(&rho.dot(&obs));
    if value.im.abs() > 1e-9 {
        return Err(Error::Invalid("expectation came out complex".into()));
    }
    Ok(value.re)
}

/// Full Heisenberg coefficient vector over all 4^n words, indexed by word
/// value, after pushing the observable backward through the circuit.
pub fn dense_heisenberg<B: PauliBits>(
    circ: &Circuit,
    thetas: &[f64],
    observable: &PauliSum<B, f64>,
) -> Result<Vec<f64>, Error> {
    circ.check_thetas(thetas)?;
    let n = circ.nqubits();
    if n > DENSITY_MAX_QUBITS {
        return Err(Error::GuardExceeded(format!(
            "Heisenberg oracle limited to {DENSITY_MAX_QUBITS} qubits, got {n}"
        )));
    }
    if observable.nqubits() != n {
        return Err(Error::NQubitsMismatch(observable.nqubits(), n));
    }
    let npauli = 4usize.pow(n as u32);
    let mut v = vec![0.0f64; npauli];
    for (w, &c) in observable.iter() {
        v[w.value().expect("small n") as usize] += c;
    }
    for gate in circ.gates().iter().rev() {
        let (channel, sites) = local_channel(gate, thetas)?;
        let table = heisenberg_table(&channel, sites.len())?;
        let mut next = vec![0.0f64; npauli];
        for (g, &val) in v.iter().enumerate() {
            if val == 0.0 {
                continue;
            }
            let mut j = 0usize;
            for (i, &s) in sites.iter().enumerate() {
                j |= ((g >> (2 * (s - 1))) & 3) << (2 * i);
            }
            for &(out, alpha) in &table.map[j] {
                let mut g_out = g;
                for (i, &s) in sites.iter().enumerate() {
                    let crumb = ((out as usize) >> (2 * i)) & 3;
                    g_out = (g_out & !(3 << (2 * (s - 1)))) | (crumb << (2 * (s - 1)));
                }
                next[g_out] += alpha * val;
            }
        }
        v = next;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::Circuit;
    use crate::propagation::propagate;
    use crate::sum::TruncationConfig;
    use approx::assert_abs_diff_eq;

    type W = PauliWord<u64>;
    type S = PauliSum<u64, f64>;

    fn worked_example() -> (Circuit, Vec<f64>) {
        let mut c = Circuit::new(2);
        c.push_rotation(vec![PAULI_Z, PAULI_Z], vec![1, 2]).unwrap();
        c.push_rotation(vec![PAULI_X], vec![2]).unwrap();
        c.push_rotation(vec![PAULI_X], vec![1]).unwrap();
        (c, vec![-0.8, std::f64::consts::FRAC_PI_3, 0.3])
    }

    #[test]
    fn worked_example_expectation() {
        let (circ, thetas) = worked_example();
        let obs = S::single(W::parse("ZI").unwrap(), 1.0);
        let e = dense_expectation(&circ, &thetas, &obs, &StateSpec::Zero).unwrap();
        assert_abs_diff_eq!(e, 0.3f64.cos(), epsilon = 1e-12);
    }

    #[test]
    fn identity_circuit_z_on_zero() {
        let circ = Circuit::new(3);
        let obs = S::single(W::parse("ZII").unwrap(), 1.0);
        let e = dense_expectation(&circ, &[], &obs, &StateSpec::Zero).unwrap();
        assert_abs_diff_eq!(e, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn full_depolarizing_kills_z() {
        let mut circ = Circuit::new(1);
        circ.push(Gate::PauliNoise {
            kind: NoiseKind::Depolarizing1 { p: 0.75 },
            sites: vec![1],
        })
        .unwrap();
        let obs = S::single(W::parse("Z").unwrap(), 1.0);
        let e = dense_expectation(&circ, &[], &obs, &StateSpec::Zero).unwrap();
        assert_abs_diff_eq!(e, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn heisenberg_matches_worked_example() {
        let (circ, thetas) = worked_example();
        let obs = S::single(W::parse("ZI").unwrap(), 1.0);
        let v = dense_heisenberg(&circ, &thetas, &obs).unwrap();
        let nonzero: Vec<usize> = v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x.abs() > 1e-12)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(nonzero.len(), 3);
        // ZI = 3, YI = 2, XZ = 13
        assert_abs_diff_eq!(v[3], 0.3f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(v[2], 0.3f64.sin() * 0.8f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(v[13], -0.3f64.sin() * 0.8f64.sin(), epsilon = 1e-12);
    }

    #[test]
    fn heisenberg_agrees_with_propagate() {
        let (circ, thetas) = worked_example();
        let obs = S::single(W::parse("ZI").unwrap(), 1.0);
        let v = dense_heisenberg(&circ, &thetas, &obs).unwrap();
        let (sum, _) = propagate(&circ, obs, &thetas, &TruncationConfig::none()).unwrap();
        for (idx, &coeff) in v.iter().enumerate() {
            let w = W::from_value(2, idx as u128);
            assert_abs_diff_eq!(sum.get_coeff(&w), coeff, epsilon = 1e-12);
        }
    }

    #[test]
    fn clifford_only_heisenberg_is_signed_permutation() {
        let mut circ = Circuit::new(2);
        circ.push_clifford("H", vec![1]).unwrap();
        circ.push_clifford("CNOT", vec![1, 2]).unwrap();
        let obs = S::single(W::parse("XZ").unwrap(), 0.5);
        let v = dense_heisenberg(&circ, &[], &obs).unwrap();
        let hits: Vec<f64> = v.iter().copied().filter(|x| x.abs() > 1e-12).collect();
        assert_eq!(hits.len(), 1);
        assert_abs_diff_eq!(hits[0].abs(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn schrodinger_heisenberg_duality_with_channels() {
        let mut circ = Circuit::new(2);
        circ.push_clifford("H", vec![1]).unwrap();
        circ.push_rotation(vec![PAULI_Z, PAULI_Z], vec![1, 2]).unwrap();
        circ.push(Gate::AmplitudeDamping { site: 2, gamma: 0.3 }).unwrap();
        circ.push(Gate::PauliNoise {
            kind: NoiseKind::Dephasing { p: 0.1 },
            sites: vec![1],
        })
        .unwrap();
        circ.push(Gate::ProjectorZero { site: 1 }).unwrap();
        let thetas = [0.7];
        let mut obs = S::new(2);
        obs.add(W::parse("ZI").unwrap(), 0.8).unwrap();
        obs.add(W::parse("XY").unwrap(), -0.4).unwrap();

        let v = dense_heisenberg(&circ, &thetas, &obs).unwrap();
        for state in [
            StateSpec::Zero,
            StateSpec::Plus,
            StateSpec::Bitstring(vec![1, 0]),
            StateSpec::Stabilizer(
                ProductStabilizerState::new(vec![PAULI_Y, PAULI_X], vec![-1, 1]).unwrap(),
            ),
        ] {
            let direct = dense_expectation(&circ, &thetas, &obs, &state).unwrap();
            // recombine the Heisenberg vector against the bare state
            let mut back = S::new(2);
            for (idx, &c) in v.iter().enumerate() {
                if c.abs() > 1e-14 {
                    back.add(W::from_value(2, idx as u128), c).unwrap();
                }
            }
            let empty = Circuit::new(2);
            let via_heisenberg = dense_expectation(&empty, &[], &back, &state).unwrap();
            assert_abs_diff_eq!(direct, via_heisenberg, epsilon = 1e-10);
        }
    }

    #[test]
    fn unitary_heisenberg_conserves_l2() {
        let topo = crate::circuits::bricklayer_topology(3, false).unwrap();
        let circ = crate::circuits::tfi_trotter_circuit(&topo, 3, 2, true).unwrap();
        let thetas: Vec<f64> = (0..circ.nparams()).map(|i| 0.15 + 0.02 * i as f64).collect();
        let obs = S::single(W::parse("ZII").unwrap(), 1.0);
        let v = dense_heisenberg(&circ, &thetas, &obs).unwrap();
        let l2sq: f64 = v.iter().map(|x| x * x).sum();
        assert_abs_diff_eq!(l2sq, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn guards_are_hard_errors() {
        let circ = Circuit::new(7);
        let obs = S::single(W::identity(7), 1.0);
        assert!(dense_heisenberg(&circ, &[], &obs).is_err());
        let circ = Circuit::new(11);
        let obs = S::single(W::identity(11), 1.0);
        assert!(dense_expectation(&circ, &[], &obs, &StateSpec::Zero).is_err());
    }

    #[test]
    fn pauli_sum_state() {
        // rho = (I + 0.6 Z)/2 on one qubit; <Z> = 0.6
        let mut rho = S::new(1);
        rho.add(W::identity(1), 0.5).unwrap();
        rho.add(W::parse("Z").unwrap(), 0.3).unwrap();
        let obs = S::single(W::parse("Z").unwrap(), 1.0);
        let circ = Circuit::new(1);
        let e = dense_expectation(&circ, &[], &obs, &StateSpec::PauliSum(rho)).unwrap();
        assert_abs_diff_eq!(e, 0.6, epsilon = 1e-12);
    }
}
