//! Merging breadth-first propagation of an observable through a circuit.
//!
//! Gates are applied in reverse (Heisenberg) order. Each gate works on the
//! full sum with a two-map scheme: retained words are updated in place, new
//! branch words collect in an auxiliary buffer and are unioned back with
//! coefficient merging. A truncation sweep follows every gate; its discarded
//! norms feed the error ledger.

use crate::bits::PauliBits;
use crate::circuits::Circuit;
use crate::coeff::{Coeff, PathCoeff, Real};
use crate::gates::{
    apply_clifford, apply_projector_zero, apply_transfer_map, Angle, CliffordTable, Gate,
    NoiseKind, TransferTable,
};
use crate::pauli::{PauliWord, PAULI_I, PAULI_X, PAULI_Y, PAULI_Z};
use crate::sum::{PauliSum, TruncationConfig};
use crate::Error;
use std::sync::Arc;
use std::time::Instant;

/// Per-run statistics of one propagation.
#[derive(Clone, Debug)]
pub struct Report<T> {
    /// Discarded l1 norm per applied gate, in Heisenberg application order.
    pub per_gate_discarded_l1: Vec<T>,
    /// Discarded squared l2 norm per applied gate.
    pub per_gate_discarded_l2sq: Vec<T>,
    /// Cumulative discarded l1, the worst-case expectation error bound.
    pub delta_l1: T,
    /// Cumulative per-gate sqrt of discarded l2 squared, the two-point
    /// correlator bound.
    pub delta_l2: T,
    pub final_terms: usize,
    pub peak_terms: usize,
    pub seconds: f64,
}

impl<T: Real> Report<T> {
    fn new(ngates: usize) -> Self {
        Report {
            per_gate_discarded_l1: Vec::with_capacity(ngates),
            per_gate_discarded_l2sq: Vec::with_capacity(ngates),
            delta_l1: T::zero(),
            delta_l2: T::zero(),
            final_terms: 0,
            peak_terms: 0,
            seconds: 0.0,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "gates applied: {}\n",
            self.per_gate_discarded_l1.len()
        ));
        out.push_str(&format!("final terms: {}\n", self.final_terms));
        out.push_str(&format!("peak terms: {}\n", self.peak_terms));
        out.push_str(&format!(
            "cumulative discarded l1 (delta): {:.6e}\n",
            self.delta_l1.to_f64_lossy()
        ));
        out.push_str(&format!(
            "cumulative discarded l2 bound: {:.6e}\n",
            self.delta_l2.to_f64_lossy()
        ));
        out.push_str(&format!("seconds: {:.6}\n", self.seconds));
        out
    }
}

/// Gate with its angle bound and lookup tables resolved, ready for repeated
/// application.
pub(crate) enum CompiledGate<B: PauliBits> {
    Clifford {
        table: Arc<CliffordTable>,
        sites: Vec<usize>,
    },
    Rotation {
        generator: PauliWord<B>,
        theta: f64,
    },
    Noise {
        kind: NoiseKind,
        sites: Vec<usize>,
    },
    AmpDamp {
        site: usize,
        gamma: f64,
    },
    Projector {
        site: usize,
    },
    Transfer {
        table: Arc<TransferTable>,
        sites: Vec<usize>,
    },
}

pub(crate) fn compile_gates<B: PauliBits>(
    circ: &Circuit,
    thetas: &[f64],
) -> Result<Vec<CompiledGate<B>>, Error> {
    circ.check_thetas(thetas)?;
    let n = circ.nqubits();
    let mut out = Vec::with_capacity(circ.gates().len());
    for gate in circ.gates() {
        out.push(match gate {
            Gate::Clifford { name, sites } => CompiledGate::Clifford {
                table: crate::gates::builtin_clifford(name)?,
                sites: sites.clone(),
            },
            Gate::CliffordTable { table, sites } => CompiledGate::Clifford {
                table: table.clone(),
                sites: sites.clone(),
            },
            Gate::PauliRotation {
                codes,
                sites,
                angle,
            } => {
                let entries: Vec<(usize, u8)> = sites
                    .iter()
                    .zip(codes.iter())
                    .filter(|(_, &c)| c != PAULI_I)
                    .map(|(&s, &c)| (s, c))
                    .collect();
                CompiledGate::Rotation {
                    generator: PauliWord::encode(n, &entries)?,
                    theta: match angle {
                        Angle::Fixed(t) => *t,
                        Angle::Slot(s) => thetas[*s],
                    },
                }
            }
            Gate::PauliNoise { kind, sites } => CompiledGate::Noise {
                kind: *kind,
                sites: sites.clone(),
            },
            Gate::AmplitudeDamping { site, gamma } => CompiledGate::AmpDamp {
                site: *site,
                gamma: *gamma,
            },
            Gate::ProjectorZero { site } => CompiledGate::Projector { site: *site },
            Gate::TransferMap { table, sites } => CompiledGate::Transfer {
                table: table.clone(),
                sites: sites.clone(),
            },
        });
    }
    Ok(out)
}

/// Apply one compiled gate to the whole sum with merging.
fn apply_gate_to_sum<B: PauliBits, T: Real, C: Coeff<T>>(
    working: &mut PauliSum<B, T, C>,
    gate: &CompiledGate<B>,
) -> Result<(), Error> {
    match gate {
        CompiledGate::Rotation { generator, theta } => {
            let cos_t = T::from_f64_lossy(theta.cos());
            let sin_t = T::from_f64_lossy(theta.sin());
            let mut aux: Vec<(PauliWord<B>, C)> = Vec::new();
            for (w, c) in working.map_mut().iter_mut() {
                if w.commutes(generator).expect("matching nqubits") {
                    continue;
                }
                let (word, phase) = generator.product(w).expect("matching nqubits");
                let sigma = match (phase.exponent() + 1) % 4 {
                    0 => T::one(),
                    _ => -T::one(),
                };
                aux.push((word, c.sin_branch(sigma * sin_t)));
                *c = c.cos_branch(cos_t);
            }
            working.map_mut().retain(|_, c| c.value() != T::zero());
            for (w, c) in aux {
                working.add(w, c)?;
            }
        }
        CompiledGate::Noise { kind, sites } => {
            let mut scratch: Vec<(PauliWord<B>, C)> = Vec::new();
            for (w, c) in working.map_mut().iter_mut() {
                let (_, nc) = crate::gates::apply_pauli_noise(w, c, kind, sites);
                if nc.value() == T::zero() {
                    scratch.push((*w, nc));
                } else {
                    *c = nc;
                }
            }
            for (w, _) in scratch {
                working.remove(&w);
            }
        }
        CompiledGate::AmpDamp { site, gamma } => {
            let mut aux: Vec<(PauliWord<B>, C)> = Vec::new();
            let mut dead: Vec<PauliWord<B>> = Vec::new();
            for (w, c) in working.map_mut().iter_mut() {
                match w.code(*site) {
                    PAULI_I => {}
                    PAULI_X | PAULI_Y => {
                        *c = c.scale(T::from_f64_lossy((1.0 - gamma).sqrt()));
                    }
                    _ => {
                        aux.push((w.with_code(*site, PAULI_I), c.scale(T::from_f64_lossy(*gamma))));
                        *c = c.scale(T::from_f64_lossy(1.0 - gamma));
                        if c.value() == T::zero() {
                            dead.push(*w);
                        }
                    }
                }
            }
            for w in dead {
                working.remove(&w);
            }
            for (w, c) in aux {
                working.add(w, c)?;
            }
        }
        CompiledGate::Clifford { table, sites } => {
            let nqubits = working.nqubits();
            let old = std::mem::replace(working, PauliSum::with_capacity(nqubits, 0));
            let mut fresh = PauliSum::with_capacity(nqubits, old.len());
            for (w, c) in old.into_map() {
                let (word, coeff) = apply_clifford(&w, &c, table, sites);
                // Clifford tables are bijections, so no merging can occur
                fresh.set(word, coeff)?;
            }
            *working = fresh;
        }
        CompiledGate::Projector { site } => {
            let nqubits = working.nqubits();
            let old = std::mem::replace(working, PauliSum::with_capacity(nqubits, 0));
            let mut fresh = PauliSum::with_capacity(nqubits, old.len());
            for (w, c) in old.into_map() {
                for (word, coeff) in apply_projector_zero(&w, &c, *site) {
                    fresh.add(word, coeff)?;
                }
            }
            *working = fresh;
        }
        CompiledGate::Transfer { table, sites } => {
            let nqubits = working.nqubits();
            let old = std::mem::replace(working, PauliSum::with_capacity(nqubits, 0));
            let mut fresh = PauliSum::with_capacity(nqubits, old.len());
            for (w, c) in old.into_map() {
                for (word, coeff) in apply_transfer_map(&w, &c, table, sites) {
                    fresh.add(word, coeff)?;
                }
            }
            *working = fresh;
        }
    }
    Ok(())
}

fn propagate_impl<B: PauliBits, T: Real, C: Coeff<T>>(
    circ: &Circuit,
    init: PauliSum<B, T, C>,
    thetas: &[f64],
    cfg: &TruncationConfig<B, T>,
) -> Result<(PauliSum<B, T, C>, Report<T>), Error> {
    if cfg.has_counter_rules() && !C::TRACKED {
        return Err(Error::TrackingRequired);
    }
    if init.nqubits() != circ.nqubits() {
        return Err(Error::NQubitsMismatch(init.nqubits(), circ.nqubits()));
    }
    let start = Instant::now();
    let compiled: Vec<CompiledGate<B>> = compile_gates(circ, thetas)?;
    let mut working = init;
    let mut report = Report::new(compiled.len());
    report.peak_terms = working.len();
    for gate in compiled.iter().rev() {
        apply_gate_to_sum(&mut working, gate)?;
        if C::TRACKED {
            for (w, c) in working.map_mut().iter_mut() {
                *c = c.accrue_pathweight(w.weight());
            }
        }
        report.peak_terms = report.peak_terms.max(working.len());
        let (l1, l2sq) = working.truncate(cfg)?;
        report.delta_l1 += l1;
        report.delta_l2 += l2sq.sqrt();
        report.per_gate_discarded_l1.push(l1);
        report.per_gate_discarded_l2sq.push(l2sq);
    }
    report.final_terms = working.len();
    report.seconds = start.elapsed().as_secs_f64();
    Ok((working, report))
}

/// Evolve an observable sum backward through the circuit.
pub fn propagate<B: PauliBits, T: Real>(
    circ: &Circuit,
    init: PauliSum<B, T>,
    thetas: &[f64],
    cfg: &TruncationConfig<B, T>,
) -> Result<(PauliSum<B, T>, Report<T>), Error> {
    propagate_impl(circ, init, thetas, cfg)
}

/// As [`propagate`] with per-term branch counters, enabling frequency, sine,
/// and path-weight truncation.
pub fn propagate_tracked<B: PauliBits, T: Real>(
    circ: &Circuit,
    init: PauliSum<B, T, PathCoeff<T>>,
    thetas: &[f64],
    cfg: &TruncationConfig<B, T>,
) -> Result<(PauliSum<B, T, PathCoeff<T>>, Report<T>), Error> {
    propagate_impl(circ, init, thetas, cfg)
}

/// Count the leaves of the unmerged branching tree: every branch of every
/// gate multiplies, nothing recombines.
pub fn count_paths<B: PauliBits>(
    circ: &Circuit,
    init: &PauliWord<B>,
    thetas: &[f64],
) -> Result<u128, Error> {
    const GUARD: u128 = 100_000_000;
    if init.nqubits() != circ.nqubits() {
        return Err(Error::NQubitsMismatch(init.nqubits(), circ.nqubits()));
    }
    let compiled: Vec<CompiledGate<B>> = compile_gates(circ, thetas)?;
    // multiplicity per word: identical words from different paths stay
    // distinct in the count but can share one bucket
    let mut counts: std::collections::HashMap<PauliWord<B>, u128> =
        std::collections::HashMap::new();
    counts.insert(*init, 1);
    for gate in compiled.iter().rev() {
        let mut next: std::collections::HashMap<PauliWord<B>, u128> =
            std::collections::HashMap::with_capacity(counts.len());
        let mut total: u128 = 0;
        for (w, mult) in counts {
            match gate {
                CompiledGate::Rotation { generator, .. } => {
                    if w.commutes(generator).expect("matching nqubits") {
                        *next.entry(w).or_insert(0) += mult;
                        total += mult;
                    } else {
                        let (word, _) = generator.product(&w).expect("matching nqubits");
                        *next.entry(w).or_insert(0) += mult;
                        *next.entry(word).or_insert(0) += mult;
                        total += 2 * mult;
                    }
                }
                CompiledGate::Clifford { table, sites } => {
                    let (word, _) = apply_clifford(&w, &1.0f64, table, sites);
                    *next.entry(word).or_insert(0) += mult;
                    total += mult;
                }
                CompiledGate::Noise { .. } => {
                    *next.entry(w).or_insert(0) += mult;
                    total += mult;
                }
                CompiledGate::AmpDamp { site, .. } => {
                    if w.code(*site) == PAULI_Z {
                        *next.entry(w).or_insert(0) += mult;
                        *next.entry(w.with_code(*site, PAULI_I)).or_insert(0) += mult;
                        total += 2 * mult;
                    } else {
                        *next.entry(w).or_insert(0) += mult;
                        total += mult;
                    }
                }
                CompiledGate::Projector { site } => match w.code(*site) {
                    PAULI_X | PAULI_Y => {}
                    _ => {
                        *next.entry(w.with_code(*site, PAULI_I)).or_insert(0) += mult;
                        *next.entry(w.with_code(*site, PAULI_Z)).or_insert(0) += mult;
                        total += 2 * mult;
                    }
                },
                CompiledGate::Transfer { table, sites } => {
                    let idx = crate::gates::extract_substring(&w, sites);
                    for &(out, _) in &table.map[idx] {
                        *next
                            .entry(crate::gates::replace_substring(&w, sites, out as usize))
                            .or_insert(0) += mult;
                        total += mult;
                    }
                }
            }
            if total > GUARD {
                return Err(Error::GuardExceeded(format!(
                    "path count exceeds {GUARD}"
                )));
            }
        }
        counts = next;
    }
    Ok(counts.values().sum())
}
