//! Diagnostics: magic measures, truncation error ledgers, the Monte Carlo
//! average-case error estimator, and small exactly solvable benchmarks.

use crate::bits::PauliBits;
use crate::circuits::Circuit;
use crate::coeff::{Coeff, Real};
use crate::gates::{Angle, Gate};
use crate::overlaps::{overlap_with_product_stabilizer, ProductStabilizerState};
use crate::pauli::{PauliWord, PAULI_I, PAULI_Z};
use crate::propagation::Report;
use crate::sum::PauliSum;
use crate::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generalized Pauli purity, operator stabilizer entropy, and the l1 norm
/// of the l2-normalized sum. Low purity (large entropy) marks sums that are
/// hard to truncate.
pub fn pauli_purity_and_ose<B: PauliBits, T: Real, C: Coeff<T>>(
    s: &PauliSum<B, T, C>,
) -> Result<(T, T, T), Error> {
    let norms = s.norms();
    if !(norms.l2sq > T::zero()) {
        return Err(Error::Invalid("sum has no l2 mass".into()));
    }
    let mut p2 = T::zero();
    let mut l1 = T::zero();
    for (_, c) in s.iter() {
        let csq = c.value() * c.value() / norms.l2sq;
        p2 += csq * csq;
        l1 += csq.sqrt();
    }
    let ose = -p2.ln();
    // the l1 norm always dominates the inverse square root of the purity
    assert!(
        l1 * (T::one() + T::from_f64_lossy(1e-9)) >= T::one() / p2.sqrt(),
        "purity inequality violated"
    );
    Ok((p2, ose, l1))
}

/// Per-gate discarded norms of one propagation, with their cumulative
/// worst-case bounds.
#[derive(Clone, Debug)]
pub struct ErrorLedger {
    pub per_gate_l1: Vec<f64>,
    pub per_gate_l2sq: Vec<f64>,
    /// Sum of per-gate discarded l1: bounds the expectation error.
    pub delta_l1: f64,
    /// Sum of per-gate sqrt(discarded l2 squared): bounds two-point
    /// correlator error.
    pub delta_l2: f64,
}

impl ErrorLedger {
    pub fn from_report<T: Real>(report: &Report<T>) -> Self {
        ErrorLedger {
            per_gate_l1: report
                .per_gate_discarded_l1
                .iter()
                .map(|v| v.to_f64_lossy())
                .collect(),
            per_gate_l2sq: report
                .per_gate_discarded_l2sq
                .iter()
                .map(|v| v.to_f64_lossy())
                .collect(),
            delta_l1: report.delta_l1.to_f64_lossy(),
            delta_l2: report.delta_l2.to_f64_lossy(),
        }
    }

    /// Whether |exact - truncated| stays within the cumulative l1 ledger.
    pub fn bound_check(&self, exact: f64, truncated: f64) -> bool {
        (exact - truncated).abs() <= self.delta_l1 + 1e-12
    }
}

/// Parameter-free path-membership rules for the Monte Carlo estimator:
/// exactly the truncations whose decisions do not depend on coefficients.
#[derive(Copy, Clone, Debug, Default)]
pub struct MembershipRule {
    pub max_weight: Option<u32>,
    pub max_freq: Option<u32>,
    pub max_sins: Option<u32>,
    pub max_pathweight: Option<u32>,
}

impl MembershipRule {
    fn excludes(&self, weight: u32, ncos: u32, nsin: u32, pathweight: u32) -> bool {
        self.max_weight.is_some_and(|m| weight > m)
            || self.max_freq.is_some_and(|m| ncos + nsin > m)
            || self.max_sins.is_some_and(|m| nsin > m)
            || self.max_pathweight.is_some_and(|m| pathweight > m)
    }
}

/// Monte Carlo configuration: sample count, RNG seed, truncation-membership
/// rule, and input state.
#[derive(Clone, Debug)]
pub struct MCConfig {
    pub nsamples: usize,
    pub seed: u64,
    pub rule: MembershipRule,
    pub state: ProductStabilizerState,
}

/// Reverse-order gate sequence restricted to Cliffords and independently
/// parameterized rotations, with rotation generators resolved.
struct PathCircuit<B: PauliBits> {
    steps: Vec<PathStep<B>>,
}

enum PathStep<B: PauliBits> {
    Clifford {
        table: std::sync::Arc<crate::gates::CliffordTable>,
        sites: Vec<usize>,
    },
    Rotation {
        generator: PauliWord<B>,
        slot: usize,
    },
}

fn path_circuit<B: PauliBits>(circ: &Circuit) -> Result<PathCircuit<B>, Error> {
    let n = circ.nqubits();
    let mut steps = Vec::with_capacity(circ.gates().len());
    for gate in circ.gates().iter().rev() {
        steps.push(match gate {
            Gate::Clifford { name, sites } => PathStep::Clifford {
                table: crate::gates::builtin_clifford(name)?,
                sites: sites.clone(),
            },
            Gate::CliffordTable { table, sites } => PathStep::Clifford {
                table: table.clone(),
                sites: sites.clone(),
            },
            Gate::PauliRotation {
                codes,
                sites,
                angle: Angle::Slot(slot),
            } => {
                let entries: Vec<(usize, u8)> = sites
                    .iter()
                    .zip(codes.iter())
                    .filter(|(_, &c)| c != PAULI_I)
                    .map(|(&s, &c)| (s, c))
                    .collect();
                PathStep::Rotation {
                    generator: PauliWord::encode(n, &entries)?,
                    slot: *slot,
                }
            }
            Gate::PauliRotation {
                angle: Angle::Fixed(_),
                ..
            } => {
                return Err(Error::Invalid(
                    "rotations must carry independent parameter slots".into(),
                ))
            }
            _ => {
                return Err(Error::Invalid(
                    "only Cliffords and Pauli rotations are supported here".into(),
                ))
            }
        });
    }
    Ok(PathCircuit { steps })
}

/// Tr[P rho]^2 for a product stabilizer state, always 0 or 1.
fn stabilizer_trace_sq<B: PauliBits>(w: &PauliWord<B>, rho: &ProductStabilizerState) -> f64 {
    for site in 1..=w.nqubits() {
        let code = w.code(site);
        if code != PAULI_I && code != rho.axes[site - 1] {
            return 0.0;
        }
    }
    1.0
}

/// Unbiased estimate of the average-case truncation MSE over uniformly
/// random angles, by sampling Pauli paths backward with fair cos/sin coin
/// flips at every non-commuting rotation. Returns (mean, standard error).
pub fn mc_mse_estimate<B: PauliBits>(
    circ: &Circuit,
    observable: &PauliWord<B>,
    cfg: &MCConfig,
) -> Result<(f64, f64), Error> {
    if cfg.nsamples == 0 {
        return Err(Error::Invalid("nsamples must be at least 1".into()));
    }
    if observable.nqubits() != circ.nqubits() {
        return Err(Error::NQubitsMismatch(observable.nqubits(), circ.nqubits()));
    }
    if cfg.state.nqubits() != circ.nqubits() {
        return Err(Error::NQubitsMismatch(cfg.state.nqubits(), circ.nqubits()));
    }
    let pc: PathCircuit<B> = path_circuit(circ)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..cfg.nsamples {
        let mut w = *observable;
        let mut ncos = 0u32;
        let mut nsin = 0u32;
        let mut pathweight = 0u32;
        let mut kept = true;
        for step in &pc.steps {
            match step {
                PathStep::Clifford { table, sites } => {
                    let (word, _) = crate::gates::apply_clifford(&w, &1.0f64, table, sites);
                    w = word;
                }
                PathStep::Rotation { generator, .. } => {
                    if !w.commutes(generator).expect("matching nqubits") {
                        if rng.gen_bool(0.5) {
                            ncos += 1;
                        } else {
                            nsin += 1;
                            let (word, _) = generator.product(&w).expect("matching nqubits");
                            w = word;
                        }
                    }
                }
            }
            pathweight += w.weight();
            if kept && cfg.rule.excludes(w.weight(), ncos, nsin, pathweight) {
                kept = false;
            }
        }
        let g = if kept {
            0.0
        } else {
            stabilizer_trace_sq(&w, &cfg.state)
        };
        sum += g;
        sumsq += g * g;
    }
    let n = cfg.nsamples as f64;
    let mean = sum / n;
    let var = if cfg.nsamples > 1 {
        ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok((mean, (var / n).sqrt()))
}

/// One unmerged Pauli path of a Clifford+rotation circuit.
struct EnumPath<B: PauliBits> {
    word: PauliWord<B>,
    /// Cosine/sine slot factors: (slot, is_sin, sign).
    factors: Vec<(usize, bool, f64)>,
    kept: bool,
}

fn enumerate_paths<B: PauliBits>(
    pc: &PathCircuit<B>,
    observable: &PauliWord<B>,
    rule: &MembershipRule,
) -> Vec<EnumPath<B>> {
    let mut paths = vec![EnumPath {
        word: *observable,
        factors: Vec::new(),
        kept: true,
    }];
    let mut counters = vec![(0u32, 0u32, 0u32)];
    for step in &pc.steps {
        let mut next = Vec::with_capacity(paths.len() * 2);
        let mut next_counters = Vec::with_capacity(paths.len() * 2);
        for (path, (ncos, nsin, pathweight)) in paths.into_iter().zip(counters) {
            match step {
                PathStep::Clifford { table, sites } => {
                    let (word, coeff) =
                        crate::gates::apply_clifford(&path.word, &1.0f64, table, sites);
                    let mut factors = path.factors;
                    if coeff < 0.0 {
                        factors.push((usize::MAX, false, -1.0));
                    }
                    let pw = pathweight + word.weight();
                    let kept = path.kept && !rule.excludes(word.weight(), ncos, nsin, pw);
                    next.push(EnumPath { word, factors, kept });
                    next_counters.push((ncos, nsin, pw));
                }
                PathStep::Rotation { generator, slot } => {
                    if path.word.commutes(generator).expect("matching nqubits") {
                        let pw = pathweight + path.word.weight();
                        let kept =
                            path.kept && !rule.excludes(path.word.weight(), ncos, nsin, pw);
                        next.push(EnumPath { kept, ..path });
                        next_counters.push((ncos, nsin, pw));
                    } else {
                        let (word, phase) =
                            generator.product(&path.word).expect("matching nqubits");
                        let sigma = if (phase.exponent() + 1) % 4 == 0 { 1.0 } else { -1.0 };
                        let mut cos_factors = path.factors.clone();
                        cos_factors.push((*slot, false, 1.0));
                        let pw_cos = pathweight + path.word.weight();
                        next.push(EnumPath {
                            word: path.word,
                            factors: cos_factors,
                            kept: path.kept
                                && !rule.excludes(path.word.weight(), ncos + 1, nsin, pw_cos),
                        });
                        next_counters.push((ncos + 1, nsin, pw_cos));
                        let mut sin_factors = path.factors;
                        sin_factors.push((*slot, true, sigma));
                        let pw_sin = pathweight + word.weight();
                        next.push(EnumPath {
                            kept: path.kept
                                && !rule.excludes(word.weight(), ncos, nsin + 1, pw_sin),
                            word,
                            factors: sin_factors,
                        });
                        next_counters.push((ncos, nsin + 1, pw_sin));
                    }
                }
            }
        }
        paths = next;
        counters = next_counters;
    }
    paths
}

/// Exact average-case MSE by integrating (exact - truncated)^2 over an
/// equally spaced angle grid. Exact for the trigonometric polynomials these
/// circuits produce once `points_per_dim` exceeds the angle degree.
pub fn theta_grid_mse<B: PauliBits>(
    circ: &Circuit,
    observable: &PauliWord<B>,
    state: &ProductStabilizerState,
    rule: &MembershipRule,
    points_per_dim: usize,
) -> Result<f64, Error> {
    let d = circ.nparams();
    if d > 3 {
        return Err(Error::GuardExceeded(
            "grid oracle limited to 3 free angles".into(),
        ));
    }
    let pc: PathCircuit<B> = path_circuit(circ)?;
    let paths = enumerate_paths(&pc, observable, rule);
    // per dropped path: overall fixed sign and cos/sin slot factors
    struct Dropped {
        sign: f64,
        factors: Vec<(usize, bool)>,
    }
    let mut dropped: Vec<Dropped> = Vec::new();
    for p in &paths {
        if p.kept {
            continue;
        }
        let tr = {
            let single = PauliSum::<B, f64>::single(p.word, 1.0);
            overlap_with_product_stabilizer(&single, state)?
        };
        if tr == 0.0 {
            continue;
        }
        let mut sign = tr;
        let mut factors = Vec::new();
        for &(slot, is_sin, sigma) in &p.factors {
            sign *= sigma;
            if slot != usize::MAX {
                factors.push((slot, is_sin));
            }
        }
        dropped.push(Dropped { sign, factors });
    }
    let points = points_per_dim.max(1);
    let mut thetas = vec![0.0f64; d];
    let mut acc = 0.0;
    let total = points.pow(d as u32);
    for flat in 0..total {
        let mut rem = flat;
        for t in thetas.iter_mut() {
            *t = 2.0 * std::f64::consts::PI * (rem % points) as f64 / points as f64;
            rem /= points;
        }
        let mut err = 0.0;
        for dpath in &dropped {
            let mut c = dpath.sign;
            for &(slot, is_sin) in &dpath.factors {
                c *= if is_sin {
                    thetas[slot].sin()
                } else {
                    thetas[slot].cos()
                };
            }
            err += c;
        }
        acc += err * err;
    }
    Ok(acc / total as f64)
}

/// Results of the two exactly solvable worst-versus-average benchmarks.
#[derive(Clone, Debug)]
pub struct ToyReport {
    /// Weight-truncation example: error on |0^n>.
    pub weight_worst: f64,
    /// Its exact mean |error| over all 6^n single-qubit stabilizer products.
    pub weight_stabilizer_avg: f64,
    /// The closed form 3^{-n}.
    pub weight_expected_avg: f64,
    /// Small-coefficient example: error on |0^n>.
    pub smallcoeff_worst: f64,
    /// Its exact mean squared error over computational basis states.
    pub smallcoeff_meansq: f64,
    /// The closed form 1/(n-1).
    pub smallcoeff_bound: f64,
}

/// Reproduce both toy calculations exactly for n <= 8.
pub fn avg_case_toy_checks(n: usize) -> Result<ToyReport, Error> {
    if !(2..=8).contains(&n) {
        return Err(Error::GuardExceeded("toy checks need 2 <= n <= 8".into()));
    }
    type W = PauliWord<u64>;

    // (a) O = Z^n + Z_1 truncated at max_weight >= 2 leaves O' = Z_1; the
    // discarded operator is the full Z string
    let mut all_z = W::identity(n);
    for site in 1..=n {
        all_z = all_z.with_code(site, PAULI_Z);
    }
    let discarded = PauliSum::<u64, f64>::single(all_z, 1.0);
    let weight_worst =
        overlap_with_product_stabilizer(&discarded, &ProductStabilizerState::all_zero(n))?.abs();
    let mut total = 0.0;
    let states = 6usize.pow(n as u32);
    for flat in 0..states {
        let mut rem = flat;
        let mut axes = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        for _ in 0..n {
            let choice = rem % 6;
            rem /= 6;
            axes.push((choice / 2 + 1) as u8);
            signs.push(if choice % 2 == 0 { 1i8 } else { -1 });
        }
        let rho = ProductStabilizerState::new(axes, signs)?;
        total += overlap_with_product_stabilizer(&discarded, &rho)?.abs();
    }
    let weight_stabilizer_avg = total / states as f64;

    // (b) O = Z_1 + 1/(n-1) sum Z_i truncated to O' = Z_1; the discarded
    // part is the uniform small-coefficient tail
    let mut tail = PauliSum::<u64, f64>::new(n);
    for site in 2..=n {
        tail.add(
            W::identity(n).with_code(site, PAULI_Z),
            1.0 / (n as f64 - 1.0),
        )?;
    }
    let smallcoeff_worst =
        overlap_with_product_stabilizer(&tail, &ProductStabilizerState::all_zero(n))?.abs();
    let mut meansq = 0.0;
    for x in 0..(1usize << n) {
        let bits: Vec<u8> = (0..n).map(|i| ((x >> (n - 1 - i)) & 1) as u8).collect();
        let rho = ProductStabilizerState::computational(&bits);
        let err = overlap_with_product_stabilizer(&tail, &rho)?;
        meansq += err * err;
    }
    meansq /= (1usize << n) as f64;

    Ok(ToyReport {
        weight_worst,
        weight_stabilizer_avg,
        weight_expected_avg: 3.0f64.powi(-(n as i32)),
        smallcoeff_worst,
        smallcoeff_meansq: meansq,
        smallcoeff_bound: 1.0 / (n as f64 - 1.0),
    })
}
