//! Circuit operations and their action on single weighted Pauli words.
//!
//! Cliffords act through signed-permutation lookup tables, Pauli rotations
//! through commutator branching, noise channels through diagonal damping
//! factors, amplitude damping through its Heisenberg normal form, and
//! arbitrary k-qubit channels through sparse transfer maps built from their
//! Pauli transfer matrix.

use crate::bits::PauliBits;
use crate::coeff::{Coeff, Real};
use crate::linalg::{self, CMat};
use crate::pauli::{PauliWord, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z};
use crate::Error;
use ndarray::Array2;
use smallvec::SmallVec;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

/// Up to two outputs cover every gate except transfer maps.
pub type Branches<B, C> = SmallVec<[(PauliWord<B>, C); 2]>;

/// Angle of a parameterized rotation: bound at construction or read from the
/// parameter vector at a slot assigned by the circuit.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Slot(usize),
}

/// Pauli noise channels, all diagonal in the Pauli basis.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum NoiseKind {
    /// Uniform single-qubit depolarizing with probability p.
    Depolarizing1 { p: f64 },
    /// Single-qubit dephasing with probability p.
    Dephasing { p: f64 },
    /// Uniform two-qubit depolarizing with probability p.
    Depolarizing2 { p: f64 },
    /// Inhomogeneous single-qubit Pauli noise.
    PauliXYZ { px: f64, py: f64, pz: f64 },
}

impl NoiseKind {
    pub fn arity(&self) -> usize {
        match self {
            NoiseKind::Depolarizing2 { .. } => 2,
            _ => 1,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        let ok = match self {
            NoiseKind::Depolarizing1 { p }
            | NoiseKind::Dephasing { p }
            | NoiseKind::Depolarizing2 { p } => (0.0..=1.0).contains(p),
            NoiseKind::PauliXYZ { px, py, pz } => {
                px >= &0.0 && py >= &0.0 && pz >= &0.0 && px + py + pz <= 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGate("noise probability out of range".into()))
        }
    }
}

/// A circuit operation with its 1-indexed target sites.
#[derive(Clone, Debug)]
pub enum Gate {
    /// Built-in named Clifford.
    Clifford { name: String, sites: Vec<usize> },
    /// Clifford given directly as a lookup table.
    CliffordTable {
        table: Arc<CliffordTable>,
        sites: Vec<usize>,
    },
    /// exp(i theta G / 2) conjugation with G the listed Pauli substring.
    PauliRotation {
        codes: Vec<u8>,
        sites: Vec<usize>,
        angle: Angle,
    },
    PauliNoise { kind: NoiseKind, sites: Vec<usize> },
    AmplitudeDamping { site: usize, gamma: f64 },
    ProjectorZero { site: usize },
    TransferMap {
        table: Arc<TransferTable>,
        sites: Vec<usize>,
    },
}

impl Gate {
    /// T gate as a Z rotation by pi/4.
    pub fn t_gate(site: usize) -> Gate {
        Gate::PauliRotation {
            codes: vec![PAULI_Z],
            sites: vec![site],
            angle: Angle::Fixed(std::f64::consts::FRAC_PI_4),
        }
    }

    pub fn sites(&self) -> &[usize] {
        match self {
            Gate::Clifford { sites, .. }
            | Gate::CliffordTable { sites, .. }
            | Gate::PauliRotation { sites, .. }
            | Gate::PauliNoise { sites, .. }
            | Gate::TransferMap { sites, .. } => sites,
            Gate::AmplitudeDamping { site, .. } | Gate::ProjectorZero { site } => {
                std::slice::from_ref(site)
            }
        }
    }

    pub fn is_parameterized(&self) -> bool {
        matches!(
            self,
            Gate::PauliRotation {
                angle: Angle::Slot(_),
                ..
            }
        )
    }

    pub fn validate(&self, nqubits: usize) -> Result<(), Error> {
        let sites = self.sites();
        for &s in sites {
            if s < 1 || s > nqubits {
                return Err(Error::SiteOutOfRange { site: s, nqubits });
            }
        }
        for (i, &s) in sites.iter().enumerate() {
            if sites[..i].contains(&s) {
                return Err(Error::DuplicateSite(s));
            }
        }
        match self {
            Gate::Clifford { name, sites } => {
                let table = builtin_clifford(name)?;
                if table.arity != sites.len() {
                    return Err(Error::InvalidGate(format!(
                        "{name} takes {} sites, got {}",
                        table.arity,
                        sites.len()
                    )));
                }
            }
            Gate::CliffordTable { table, sites } => {
                if table.arity != sites.len() {
                    return Err(Error::InvalidGate("table arity mismatch".into()));
                }
            }
            Gate::PauliRotation { codes, sites, .. } => {
                if codes.len() != sites.len() {
                    return Err(Error::InvalidGate("generator code count mismatch".into()));
                }
                if codes.iter().all(|&c| c == PAULI_I) {
                    return Err(Error::InvalidGate("all-identity rotation generator".into()));
                }
                if codes.iter().any(|&c| c > 3) {
                    return Err(Error::InvalidPauliCode(*codes.iter().max().unwrap()));
                }
            }
            Gate::PauliNoise { kind, sites } => {
                kind.validate()?;
                if kind.arity() != sites.len() {
                    return Err(Error::InvalidGate("noise arity mismatch".into()));
                }
            }
            Gate::AmplitudeDamping { gamma, .. } => {
                if !(*gamma > 0.0 && *gamma <= 1.0) {
                    return Err(Error::InvalidGate("gamma out of (0, 1]".into()));
                }
            }
            Gate::ProjectorZero { .. } => {}
            Gate::TransferMap { table, sites } => {
                if table.arity != sites.len() {
                    return Err(Error::InvalidGate("transfer map arity mismatch".into()));
                }
            }
        }
        Ok(())
    }
}

/// Signed-permutation table of a k-qubit Clifford: substring code to
/// (substring code, sign).
#[derive(Clone, Debug)]
pub struct CliffordTable {
    pub arity: usize,
    pub entries: Vec<(u16, i8)>,
}

impl CliffordTable {
    /// The table of the inverse Clifford.
    pub fn inverse(&self) -> CliffordTable {
        let mut entries = vec![(0u16, 1i8); self.entries.len()];
        for (input, &(output, sign)) in self.entries.iter().enumerate() {
            entries[output as usize] = (input as u16, sign);
        }
        CliffordTable {
            arity: self.arity,
            entries,
        }
    }
}

/// Sparse Heisenberg transfer map of a k-qubit channel: input substring code
/// to weighted output substrings.
#[derive(Clone, Debug)]
pub struct TransferTable {
    pub arity: usize,
    pub map: Vec<Vec<(u16, f64)>>,
}

/// Extract the packed substring code of `w` at the listed sites (first site
/// in the lowest crumb).
#[inline]
pub fn extract_substring<B: PauliBits>(w: &PauliWord<B>, sites: &[usize]) -> usize {
    let mut idx = 0usize;
    for (i, &s) in sites.iter().enumerate() {
        idx |= (w.code(s) as usize) << (2 * i);
    }
    idx
}

/// Replace the substring of `w` at the listed sites by a packed code.
#[inline]
pub fn replace_substring<B: PauliBits>(
    w: &PauliWord<B>,
    sites: &[usize],
    index: usize,
) -> PauliWord<B> {
    let mut out = *w;
    for (i, &s) in sites.iter().enumerate() {
        out = out.with_code(s, ((index >> (2 * i)) & 3) as u8);
    }
    out
}

/// Clifford action: substring permuted by the table, coefficient picks up
/// the table sign.
#[inline]
pub fn apply_clifford<B: PauliBits, T: Real, C: Coeff<T>>(
    w: &PauliWord<B>,
    c: &C,
    table: &CliffordTable,
    sites: &[usize],
) -> (PauliWord<B>, C) {
    let (out, sign) = table.entries[extract_substring(w, sites)];
    let word = replace_substring(w, sites, out as usize);
    let coeff = if sign < 0 {
        c.scale(-T::one())
    } else {
        *c
    };
    (word, coeff)
}

/// Rotation R_G(theta)[P] = e^{i theta G/2} P e^{-i theta G/2}. Commuting
/// words pass through; anticommuting words branch into cos(theta) P +
/// sin(theta) P' with P' = i [G, P] / 2.
pub fn apply_pauli_rotation<B: PauliBits, T: Real, C: Coeff<T>>(
    w: &PauliWord<B>,
    c: &C,
    generator: &PauliWord<B>,
    theta: T,
) -> Branches<B, C> {
    let mut out = Branches::new();
    if w.commutes(generator).expect("matching nqubits") {
        out.push((*w, *c));
        return out;
    }
    let (word, phase) = generator.product(w).expect("matching nqubits");
    // P' = i G P; i * i^k is real (+-1) exactly when G and P anticommute
    let sigma = match (phase.exponent() + 1) % 4 {
        0 => T::one(),
        2 => -T::one(),
        _ => unreachable!("anticommuting product phase must be odd"),
    };
    out.push((*w, c.cos_branch(theta.cos())));
    out.push((word, c.sin_branch(sigma * theta.sin())));
    out
}

/// Diagonal damping factor of a Pauli noise channel for a given word; the
/// word itself never changes.
pub fn apply_pauli_noise<B: PauliBits, T: Real, C: Coeff<T>>(
    w: &PauliWord<B>,
    c: &C,
    kind: &NoiseKind,
    sites: &[usize],
) -> (PauliWord<B>, C) {
    let factor = match kind {
        NoiseKind::Depolarizing1 { p } => {
            if w.code(sites[0]) != PAULI_I {
                1.0 - 4.0 * p / 3.0
            } else {
                1.0
            }
        }
        NoiseKind::Dephasing { p } => match w.code(sites[0]) {
            PAULI_X | PAULI_Y => 1.0 - 2.0 * p,
            _ => 1.0,
        },
        NoiseKind::Depolarizing2 { p } => {
            if w.code(sites[0]) != PAULI_I || w.code(sites[1]) != PAULI_I {
                1.0 - 16.0 * p / 15.0
            } else {
                1.0
            }
        }
        NoiseKind::PauliXYZ { px, py, pz } => match w.code(sites[0]) {
            PAULI_X => 1.0 - 2.0 * py - 2.0 * pz,
            PAULI_Y => 1.0 - 2.0 * px - 2.0 * pz,
            PAULI_Z => 1.0 - 2.0 * px - 2.0 * py,
            _ => 1.0,
        },
    };
    if factor == 1.0 {
        (*w, *c)
    } else {
        (*w, c.scale(T::from_f64_lossy(factor)))
    }
}

/// Heisenberg (adjoint) amplitude damping at one site: I fixed, X and Y
/// damped by sqrt(1-gamma), Z branches into (1-gamma) Z + gamma I.
pub fn apply_amplitude_damping<B: PauliBits, T: Real, C: Coeff<T>>(
    w: &PauliWord<B>,
    c: &C,
    site: usize,
    gamma: f64,
) -> Branches<B, C> {
    let mut out = Branches::new();
    match w.code(site) {
        PAULI_I => out.push((*w, *c)),
        PAULI_X | PAULI_Y => {
            out.push((*w, c.scale(T::from_f64_lossy((1.0 - gamma).sqrt()))))
        }
        _ => {
            out.push((*w, c.scale(T::from_f64_lossy(1.0 - gamma))));
            out.push((
                w.with_code(site, PAULI_I),
                c.scale(T::from_f64_lossy(gamma)),
            ));
        }
    }
    out
}

/// Zero projector at one site: I and Z map to (I + Z)/2, X and Y vanish.
pub fn apply_projector_zero<B: PauliBits, T: Real, C: Coeff<T>>(
    w: &PauliWord<B>,
    c: &C,
    site: usize,
) -> Branches<B, C> {
    let mut out = Branches::new();
    match w.code(site) {
        PAULI_I | PAULI_Z => {
            let half = c.scale(T::from_f64_lossy(0.5));
            out.push((w.with_code(site, PAULI_I), half));
            out.push((w.with_code(site, PAULI_Z), half));
        }
        _ => {}
    }
    out
}

/// Generic channel action through its sparse transfer map.
pub fn apply_transfer_map<B: PauliBits, T: Real, C: Coeff<T>>(
    w: &PauliWord<B>,
    c: &C,
    table: &TransferTable,
    sites: &[usize],
) -> Vec<(PauliWord<B>, C)> {
    let idx = extract_substring(w, sites);
    table.map[idx]
        .iter()
        .map(|&(out, alpha)| {
            (
                replace_substring(w, sites, out as usize),
                c.scale(T::from_f64_lossy(alpha)),
            )
        })
        .collect()
}

/// Build the signed-permutation table of a Clifford unitary by conjugating
/// every basis substring and decomposing the result in the Pauli basis.
pub fn build_clifford_table(arity: usize, unitary: &CMat) -> Result<CliffordTable, Error> {
    let dim = 1usize << arity;
    if unitary.dim() != (dim, dim) {
        return Err(Error::Invalid(format!(
            "unitary dimension {:?} does not match arity {arity}",
            unitary.dim()
        )));
    }
    let udag = linalg::dagger(unitary);
    let basis: Vec<CMat> = (0..4usize.pow(arity as u32))
        .map(|j| linalg::substring_matrix_from_index(arity, j))
        .collect();
    let mut entries = Vec::with_capacity(basis.len());
    for pj in &basis {
        // Heisenberg action on the observable: U^dag P U
        let conj = udag.dot(pj).dot(unitary);
        let mut hit: Option<(u16, i8)> = None;
        for (i, pi) in basis.iter().enumerate() {
            let alpha = linalg::trace(&pi.dot(&conj)) / linalg::cre(dim as f64);
            if alpha.norm() < 1e-12 {
                continue;
            }
            if hit.is_some() || (alpha.re.abs() - 1.0).abs() > 1e-12 || alpha.im.abs() > 1e-12 {
                return Err(Error::NotClifford(
                    "conjugated Pauli is not a single signed Pauli".into(),
                ));
            }
            hit = Some((i as u16, if alpha.re > 0.0 { 1 } else { -1 }));
        }
        let hit = hit.ok_or_else(|| Error::NotClifford("conjugation vanished".into()))?;
        entries.push(hit);
    }
    Ok(CliffordTable { arity, entries })
}

/// Dense unitary of a built-in Clifford name.
pub fn builtin_clifford_unitary(name: &str) -> Result<CMat, Error> {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let z = linalg::czero;
    let r = linalg::cre;
    Ok(match name.to_ascii_uppercase().as_str() {
        "H" => ndarray::array![[r(s2), r(s2)], [r(s2), r(-s2)]],
        "X" => linalg::pauli_matrix(PAULI_X),
        "Y" => linalg::pauli_matrix(PAULI_Y),
        "Z" => linalg::pauli_matrix(PAULI_Z),
        "S" => ndarray::array![[r(1.0), z()], [z(), linalg::cim(1.0)]],
        // control is the first listed site, which sits on the most
        // significant qubit of the dense matrix
        "CNOT" => {
            let mut m: CMat = Array2::zeros((4, 4));
            for (col, row) in [(0usize, 0usize), (1, 1), (2, 3), (3, 2)] {
                m[(row, col)] = r(1.0);
            }
            m
        }
        "CZ" => {
            let mut m = linalg::identity(4);
            m[(3, 3)] = r(-1.0);
            m
        }
        "SWAP" => {
            let mut m: CMat = Array2::zeros((4, 4));
            for (col, row) in [(0usize, 0usize), (1, 2), (2, 1), (3, 3)] {
                m[(row, col)] = r(1.0);
            }
            m
        }
        other => return Err(Error::UnknownClifford(other.into())),
    })
}

/// Cached lookup table for a built-in Clifford name.
pub fn builtin_clifford(name: &str) -> Result<Arc<CliffordTable>, Error> {
    static CACHE: OnceLock<HashMap<String, Arc<CliffordTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        let mut m = HashMap::new();
        for name in ["H", "X", "Y", "Z", "S", "CNOT", "CZ", "SWAP"] {
            let u = builtin_clifford_unitary(name).expect("built-in name");
            let arity = if u.dim().0 == 2 { 1 } else { 2 };
            let table = build_clifford_table(arity, &u).expect("built-ins are Clifford");
            m.insert(name.to_string(), Arc::new(table));
        }
        m
    });
    cache
        .get(&name.to_ascii_uppercase())
        .cloned()
        .ok_or_else(|| Error::UnknownClifford(name.into()))
}

/// Pauli transfer matrix of a channel given by Kraus operators, in the
/// normalized Pauli basis: entry (i, j) = Tr[P_i E(P_j)] / 2^k.
pub fn ptm_from_kraus(arity: usize, kraus: &[CMat]) -> Result<Array2<f64>, Error> {
    let dim = 1usize << arity;
    if kraus.is_empty() {
        return Err(Error::Invalid("empty Kraus set".into()));
    }
    for k in kraus {
        if k.dim() != (dim, dim) {
            return Err(Error::Invalid("Kraus dimension mismatch".into()));
        }
    }
    // trace non-increasing: tr(sum K^dag K) <= dim
    let mut completeness = linalg::identity(dim).mapv(|v| v * linalg::czero());
    for k in kraus {
        completeness = completeness + linalg::dagger(k).dot(k);
    }
    let total = linalg::trace(&completeness);
    if total.re > dim as f64 + 1e-9 || total.im.abs() > 1e-9 {
        return Err(Error::Invalid("Kraus set is trace increasing".into()));
    }
    let npauli = 4usize.pow(arity as u32);
    let basis: Vec<CMat> = (0..npauli)
        .map(|j| linalg::substring_matrix_from_index(arity, j))
        .collect();
    let mut ptm = Array2::zeros((npauli, npauli));
    for (j, pj) in basis.iter().enumerate() {
        let mut image = pj.mapv(|v| v * linalg::czero());
        for k in kraus {
            image = image + k.dot(pj).dot(&linalg::dagger(k));
        }
        for (i, pi) in basis.iter().enumerate() {
            let alpha = linalg::trace(&pi.dot(&image)) / linalg::cre(dim as f64);
            if alpha.im.abs() > 1e-9 {
                return Err(Error::Invalid("PTM entry not real".into()));
            }
            ptm[(i, j)] = alpha.re;
        }
    }
    Ok(ptm)
}

/// Heisenberg transfer map from a PTM: row j of the PTM lists the expansion
/// of the adjoint action on P_j. Entries below 1e-12 are dropped.
pub fn transfer_table_from_ptm(arity: usize, ptm: &Array2<f64>) -> TransferTable {
    let npauli = 4usize.pow(arity as u32);
    let mut map = Vec::with_capacity(npauli);
    for j in 0..npauli {
        let mut row = Vec::new();
        for i in 0..npauli {
            let alpha = ptm[(j, i)];
            if alpha.abs() >= 1e-12 {
                row.push((i as u16, alpha));
            }
        }
        map.push(row);
    }
    TransferTable { arity, map }
}

/// PTM plus sparsified Heisenberg transfer map of a Kraus channel.
pub fn ptm_from_channel(
    arity: usize,
    kraus: &[CMat],
) -> Result<(Array2<f64>, TransferTable), Error> {
    let ptm = ptm_from_kraus(arity, kraus)?;
    let table = transfer_table_from_ptm(arity, &ptm);
    Ok((ptm, table))
}

/// Kraus pair of single-qubit amplitude damping.
pub fn amplitude_damping_kraus(gamma: f64) -> [CMat; 2] {
    let z = linalg::czero;
    let r = linalg::cre;
    [
        ndarray::array![[r(1.0), z()], [z(), r((1.0 - gamma).sqrt())]],
        ndarray::array![[z(), r(gamma.sqrt())], [z(), z()]],
    ]
}

impl TransferTable {
    /// Load from JSON: `{"arity": k, "map": {"IZ": [["ZZ", 1.0], ...], ...}}`
    /// where substrings list the first targeted site leftmost. Inputs absent
    /// from the map act as zero.
    pub fn from_json(value: &serde_json::Value) -> Result<Self, Error> {
        let arity = value
            .get("arity")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Parse("transfer map missing arity".into()))?
            as usize;
        if arity == 0 || arity > 4 {
            return Err(Error::Invalid("transfer map arity out of 1..=4".into()));
        }
        let npauli = 4usize.pow(arity as u32);
        let mut map = vec![Vec::new(); npauli];
        let obj = value
            .get("map")
            .and_then(|v| v.as_object())
            .ok_or_else(|| Error::Parse("transfer map missing map object".into()))?;
        for (key, rows) in obj {
            let input = parse_substring(key, arity)?;
            let rows = rows
                .as_array()
                .ok_or_else(|| Error::Parse("transfer map row not an array".into()))?;
            let mut entries = Vec::with_capacity(rows.len());
            for row in rows {
                let pair = row
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| Error::Parse("transfer map entry not a pair".into()))?;
                let out = pair[0]
                    .as_str()
                    .ok_or_else(|| Error::Parse("transfer map output not a string".into()))?;
                let alpha = pair[1]
                    .as_f64()
                    .ok_or_else(|| Error::Parse("transfer map coefficient not a number".into()))?;
                if !alpha.is_finite() {
                    return Err(Error::Invalid("transfer map coefficient not finite".into()));
                }
                entries.push((parse_substring(out, arity)? as u16, alpha));
            }
            map[input] = entries;
        }
        Ok(TransferTable { arity, map })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        for (input, entries) in self.map.iter().enumerate() {
            if entries.is_empty() {
                continue;
            }
            let rows: Vec<serde_json::Value> = entries
                .iter()
                .map(|&(out, alpha)| {
                    serde_json::json!([render_substring(out as usize, self.arity), alpha])
                })
                .collect();
            obj.insert(render_substring(input, self.arity), rows.into());
        }
        serde_json::json!({ "arity": self.arity, "map": obj })
    }
}

fn parse_substring(text: &str, arity: usize) -> Result<usize, Error> {
    if text.len() != arity {
        return Err(Error::Parse(format!(
            "substring '{text}' does not have {arity} sites"
        )));
    }
    let mut idx = 0usize;
    for (i, ch) in text.chars().enumerate() {
        let code = match ch.to_ascii_uppercase() {
            'I' => 0usize,
            'X' => 1,
            'Y' => 2,
            'Z' => 3,
            other => return Err(Error::Parse(format!("unknown Pauli symbol '{other}'"))),
        };
        idx |= code << (2 * i);
    }
    Ok(idx)
}

fn render_substring(index: usize, arity: usize) -> String {
    (0..arity)
        .map(|i| crate::pauli::code_symbol(((index >> (2 * i)) & 3) as u8))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type W = PauliWord<u64>;

    #[test]
    fn hadamard_table_matches_known_action() {
        let h = builtin_clifford("H").unwrap();
        assert_eq!(h.entries, vec![(0, 1), (3, 1), (2, -1), (1, 1)]);
    }

    #[test]
    fn cnot_known_entries() {
        let cnot = builtin_clifford("CNOT").unwrap();
        // IZ (index 12) -> ZZ (index 15), sign +1
        assert_eq!(cnot.entries[12], (15, 1));
        // XZ (site1 X, site2 Z, index 13) -> YY (index 10), sign -1
        assert_eq!(cnot.entries[13], (10, -1));
    }

    #[test]
    fn clifford_tables_are_signed_permutations() {
        for name in ["H", "X", "Y", "Z", "S", "CNOT", "CZ", "SWAP"] {
            let t = builtin_clifford(name).unwrap();
            let mut seen = vec![false; t.entries.len()];
            for &(out, sign) in &t.entries {
                assert!(sign == 1 || sign == -1);
                assert!(!seen[out as usize], "{name} not a permutation");
                seen[out as usize] = true;
            }
            // gate then inverse is the identity
            let inv = t.inverse();
            for input in 0..t.entries.len() {
                let (mid, s1) = t.entries[input];
                let (back, s2) = inv.entries[mid as usize];
                assert_eq!(back as usize, input);
                assert_eq!(s1 * s2, 1);
            }
        }
    }

    #[test]
    fn apply_clifford_on_words() {
        let h = builtin_clifford("H").unwrap();
        let x = W::parse("X").unwrap();
        let (w, c) = apply_clifford(&x, &1.0f64, &h, &[1]);
        assert_eq!(w.to_string(), "Z");
        assert_eq!(c, 1.0);
        let (w, c) = apply_clifford(&W::identity(1), &0.5f64, &h, &[1]);
        assert!(w.is_identity());
        assert_eq!(c, 0.5);

        let cnot = builtin_clifford("CNOT").unwrap();
        let xz = W::parse("XZ").unwrap();
        let (w, c) = apply_clifford(&xz, &1.0f64, &cnot, &[1, 2]);
        assert_eq!(w.to_string(), "YY");
        assert_eq!(c, -1.0);
    }

    #[test]
    fn rotation_branches_match_worked_example() {
        // RX on site 1 with theta = 0.3 acting on ZI
        let zi = W::parse("ZI").unwrap();
        let gen = W::parse("XI").unwrap();
        let out = apply_pauli_rotation(&zi, &1.0f64, &gen, 0.3);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].0, zi);
        assert_abs_diff_eq!(out[0].1, 0.3f64.cos(), epsilon = 1e-15);
        assert_eq!(out[1].0.to_string(), "YI");
        assert_abs_diff_eq!(out[1].1, 0.3f64.sin(), epsilon = 1e-15);

        // RX on site 2 commutes with ZI
        let gen2 = W::parse("IX").unwrap();
        let out = apply_pauli_rotation(&zi, &1.0f64, &gen2, std::f64::consts::FRAC_PI_3);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], (zi, 1.0));

        // RZZ(-0.8) on YI with incoming coefficient sin(0.3)
        let yi = W::parse("YI").unwrap();
        let zz = W::parse("ZZ").unwrap();
        let out = apply_pauli_rotation(&yi, &0.3f64.sin(), &zz, -0.8);
        assert_eq!(out.len(), 2);
        assert_abs_diff_eq!(out[0].1, 0.3f64.sin() * 0.8f64.cos(), epsilon = 1e-15);
        assert_eq!(out[1].0.to_string(), "XZ");
        assert_abs_diff_eq!(out[1].1, -0.3f64.sin() * 0.8f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn double_rotation_equals_doubled_angle() {
        let zi = W::parse("ZI").unwrap();
        let gen = W::parse("XI").unwrap();
        let theta = 0.37;
        let once = apply_pauli_rotation(&zi, &1.0f64, &gen, 2.0 * theta);
        let mut acc = std::collections::HashMap::new();
        for (w, c) in apply_pauli_rotation(&zi, &1.0f64, &gen, theta) {
            for (w2, c2) in apply_pauli_rotation(&w, &c, &gen, theta) {
                *acc.entry(w2).or_insert(0.0) += c2;
            }
        }
        for (w, c) in once {
            assert_abs_diff_eq!(acc.get(&w).copied().unwrap_or(0.0), c, epsilon = 1e-12);
        }
    }

    #[test]
    fn t_gate_branches_with_equal_magnitude() {
        let x = W::parse("X").unwrap();
        let gen = W::parse("Z").unwrap();
        let out = apply_pauli_rotation(&x, &1.0f64, &gen, std::f64::consts::FRAC_PI_4);
        assert_eq!(out.len(), 2);
        assert_abs_diff_eq!(out[0].1.abs(), out[1].1.abs(), epsilon = 1e-15);
        let words: Vec<String> = out.iter().map(|(w, _)| w.to_string()).collect();
        assert_eq!(words, vec!["X", "Y"]);
        // Z and I commute with the generator
        for text in ["Z", "I"] {
            let w = W::parse(text).unwrap();
            assert_eq!(apply_pauli_rotation(&w, &1.0f64, &gen, std::f64::consts::FRAC_PI_4).len(), 1);
        }
    }

    #[test]
    fn noise_factors() {
        let x = W::parse("X").unwrap();
        let p = 0.03;
        let (_, c) = apply_pauli_noise(&x, &1.0f64, &NoiseKind::Depolarizing1 { p }, &[1]);
        assert_abs_diff_eq!(c, 1.0 - 4.0 * p / 3.0, epsilon = 1e-15);
        let y = W::parse("Y").unwrap();
        let (_, c) = apply_pauli_noise(&y, &1.0f64, &NoiseKind::Dephasing { p }, &[1]);
        assert_abs_diff_eq!(c, 1.0 - 2.0 * p, epsilon = 1e-15);
        let z = W::parse("Z").unwrap();
        let (_, c) = apply_pauli_noise(&z, &1.0f64, &NoiseKind::Dephasing { p }, &[1]);
        assert_eq!(c, 1.0);
        let i = W::identity(1);
        for kind in [
            NoiseKind::Depolarizing1 { p },
            NoiseKind::Dephasing { p },
            NoiseKind::PauliXYZ { px: 0.01, py: 0.02, pz: 0.03 },
        ] {
            let (w, c) = apply_pauli_noise(&i, &1.0f64, &kind, &[1]);
            assert!(w.is_identity());
            assert_eq!(c, 1.0);
        }
        let zz = W::parse("ZI").unwrap();
        let (_, c) = apply_pauli_noise(&zz, &1.0f64, &NoiseKind::Depolarizing2 { p }, &[1, 2]);
        assert_abs_diff_eq!(c, 1.0 - 16.0 * p / 15.0, epsilon = 1e-15);
    }

    #[test]
    fn amplitude_damping_action() {
        let gamma = 0.2;
        let i = W::identity(1);
        assert_eq!(apply_amplitude_damping(&i, &1.0f64, 1, gamma)[0], (i, 1.0));
        let x = W::parse("X").unwrap();
        let out = apply_amplitude_damping(&x, &1.0f64, 1, gamma);
        assert_eq!(out.len(), 1);
        assert_abs_diff_eq!(out[0].1, (1.0 - gamma).sqrt(), epsilon = 1e-15);
        let z = W::parse("Z").unwrap();
        let out = apply_amplitude_damping(&z, &1.0f64, 1, gamma);
        assert_eq!(out.len(), 2);
        assert_abs_diff_eq!(out[0].1, 1.0 - gamma, epsilon = 1e-15);
        assert!(out[1].0.is_identity());
        assert_abs_diff_eq!(out[1].1, gamma, epsilon = 1e-15);
    }

    #[test]
    fn amplitude_damping_matches_kraus_ptm() {
        let gamma = 0.2;
        let kraus = amplitude_damping_kraus(gamma);
        let (_, table) = ptm_from_channel(1, &kraus).unwrap();
        for code in 0..4u8 {
            let w = W::identity(1).with_code(1, code);
            let direct = apply_amplitude_damping(&w, &1.0f64, 1, gamma);
            let via_map = apply_transfer_map(&w, &1.0f64, &table, &[1]);
            let mut lhs = std::collections::HashMap::new();
            for (w, c) in direct {
                *lhs.entry(w).or_insert(0.0) += c;
            }
            for (w, c) in &via_map {
                assert_abs_diff_eq!(lhs.get(w).copied().unwrap_or(0.0), *c, epsilon = 1e-12);
            }
            assert_eq!(lhs.len(), via_map.len());
        }
    }

    #[test]
    fn projector_zero_action() {
        let z = W::parse("Z").unwrap();
        let out = apply_projector_zero(&z, &1.0f64, 1);
        assert_eq!(out.len(), 2);
        assert!(out[0].0.is_identity());
        assert_eq!((out[0].1, out[1].1), (0.5, 0.5));
        assert_eq!(out[1].0, z);
        assert!(apply_projector_zero(&W::parse("X").unwrap(), &1.0f64, 1).is_empty());
        let out = apply_projector_zero(&W::identity(1), &1.0f64, 1);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn hadamard_ptm_rows() {
        let u = builtin_clifford_unitary("H").unwrap();
        let kraus = [u];
        let ptm = ptm_from_kraus(1, &kraus).unwrap();
        let expected = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(ptm[(i, j)], expected[i][j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn transfer_map_agrees_with_clifford_and_noise() {
        // Hadamard as transfer map vs direct table application
        let u = builtin_clifford_unitary("H").unwrap();
        let (_, table) = ptm_from_channel(1, std::slice::from_ref(&u)).unwrap();
        let h = builtin_clifford("H").unwrap();
        for code in 0..4u8 {
            let w = W::identity(1).with_code(1, code);
            let direct = apply_clifford(&w, &1.0f64, &h, &[1]);
            let via_map = apply_transfer_map(&w, &1.0f64, &table, &[1]);
            assert_eq!(via_map.len(), 1);
            assert_eq!(via_map[0].0, direct.0);
            assert_abs_diff_eq!(via_map[0].1, direct.1, epsilon = 1e-12);
        }

        // depolarizing as transfer map: Kraus set sqrt(1-p) I, sqrt(p/3) {X,Y,Z}
        let p = 0.12;
        let kraus: Vec<CMat> = [
            (1.0f64 - p, 0u8),
            (p / 3.0, 1),
            (p / 3.0, 2),
            (p / 3.0, 3),
        ]
        .iter()
        .map(|&(w, c)| linalg::pauli_matrix(c).mapv(|v| v * linalg::cre(w.sqrt())))
        .collect();
        let (_, table) = ptm_from_channel(1, &kraus).unwrap();
        for code in 0..4u8 {
            let w = W::identity(1).with_code(1, code);
            let (_, damped) =
                apply_pauli_noise(&w, &1.0f64, &NoiseKind::Depolarizing1 { p }, &[1]);
            let via_map = apply_transfer_map(&w, &1.0f64, &table, &[1]);
            assert_eq!(via_map.len(), 1);
            assert_abs_diff_eq!(via_map[0].1, damped, epsilon = 1e-12);
        }
    }

    #[test]
    fn not_clifford_is_rejected() {
        use num_complex::Complex64;
        let t = ndarray::array![
            [linalg::cre(1.0), linalg::czero()],
            [
                linalg::czero(),
                Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)
            ]
        ];
        assert!(build_clifford_table(1, &t).is_err());
    }

    #[test]
    fn transfer_table_json_round_trip() {
        let gamma = 0.3;
        let (_, table) = ptm_from_channel(1, &amplitude_damping_kraus(gamma)).unwrap();
        let json = table.to_json();
        let back = TransferTable::from_json(&json).unwrap();
        assert_eq!(back.arity, table.arity);
        for (a, b) in table.map.iter().zip(back.map.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn gate_validation() {
        assert!(Gate::Clifford { name: "H".into(), sites: vec![1] }
            .validate(2)
            .is_ok());
        assert!(Gate::Clifford { name: "H".into(), sites: vec![3] }
            .validate(2)
            .is_err());
        assert!(Gate::Clifford { name: "CNOT".into(), sites: vec![1, 1] }
            .validate(2)
            .is_err());
        assert!(Gate::PauliRotation {
            codes: vec![PAULI_I],
            sites: vec![1],
            angle: Angle::Fixed(0.1)
        }
        .validate(2)
        .is_err());
        assert!(Gate::AmplitudeDamping { site: 1, gamma: 1.5 }.validate(2).is_err());
    }
}
