//! Command-line front end: circuit files, truncation flags, and deterministic
//! text/CSV reports over the propagation library.

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use pauli_prop::analysis::{
    mc_mse_estimate, pauli_purity_and_ose, ErrorLedger, MCConfig, MembershipRule,
};
use pauli_prop::circuits::{bricklayer_topology, rectangle_topology, tfi_trotter_circuit, Circuit};
use pauli_prop::gates::{Angle, Gate, NoiseKind, TransferTable};
use pauli_prop::overlaps::{
    overlap_with_pauli_sum, overlap_with_product_stabilizer, ProductStabilizerState,
};
use pauli_prop::propagation::{count_paths, propagate, propagate_tracked, Report};
use pauli_prop::surrogate::{compile_surrogate, SurrogateGraph, SurrogateTruncation};
use pauli_prop::{Coeff, PathCoeff, PauliSum, Sum, TrackedSum, Truncation, Word};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser, Debug)]
#[command(name = "pauli-prop", about = "Heisenberg-picture Pauli propagation")]
pub struct Cli {
    /// Qubit count; required with --builder, optional with --circuit.
    #[arg(long)]
    pub nqubits: Option<usize>,
    /// Circuit file in the line-oriented gate grammar.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Built-in circuit family, e.g. bricklayer, tilted-bricklayer-periodic,
    /// grid-3x3, tilted-grid-3x3-periodic.
    #[arg(long)]
    pub builder: Option<String>,
    /// Layer count for --builder circuits.
    #[arg(long, default_value_t = 1)]
    pub layers: usize,
    /// Comma-separated angles; a single value broadcasts to every slot.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub thetas: Option<Vec<f64>>,
    /// Whitespace-separated angle file, # comments allowed.
    #[arg(long)]
    pub theta_file: Option<PathBuf>,
    /// Observable: a Pauli symbol string like ZIIZ, or @file with a sorted
    /// two-column Pauli-sum dump.
    #[arg(long)]
    pub observable: Option<String>,
    /// State: zero | plus | a 0/1 bitstring | stab:file | sum:file.
    #[arg(long, default_value = "zero")]
    pub state: String,
    #[arg(long, default_value_t = 1e-10)]
    pub min_abs_coeff: f64,
    #[arg(long)]
    pub max_weight: Option<u32>,
    #[arg(long)]
    pub max_freq: Option<u32>,
    #[arg(long)]
    pub max_sins: Option<u32>,
    #[arg(long)]
    pub max_pathweight: Option<u32>,
    /// propagate | tracked | surrogate-compile | surrogate-eval | sweep |
    /// mc-error | analyze.
    #[arg(long, default_value = "propagate")]
    pub mode: String,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 10000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file: CSV for sweep/mc-error, surrogate graph JSON for
    /// surrogate-compile, report copy otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the final propagated sum as a sorted two-column dump.
    #[arg(long)]
    pub dump_sum: Option<PathBuf>,
    /// Compiled surrogate graph to evaluate in surrogate-eval mode.
    #[arg(long)]
    pub surrogate: Option<PathBuf>,
}

/// Parse the line-oriented circuit grammar: `# comment`, `NQ n`, then
/// `<GATE> <site...> [key=value...]` in Schrodinger order.
pub fn parse_circuit_file(text: &str) -> Result<Circuit> {
    let mut circ: Option<Circuit> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let mut tokens = line.split_whitespace();
        let mnemonic = tokens.next().unwrap().to_ascii_uppercase();
        let rest: Vec<&str> = tokens.collect();
        let (sites, kv): (Vec<&str>, Vec<&str>) =
            rest.iter().partition(|t| !t.contains('='));
        let sites: Vec<usize> = sites
            .iter()
            .map(|t| t.parse().with_context(|| format!("line {lineno}: bad site '{t}'")))
            .collect::<Result<_>>()?;
        let mut keys = std::collections::HashMap::new();
        for pair in kv {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| anyhow!("line {lineno}: malformed '{pair}'"))?;
            keys.insert(k.to_ascii_lowercase(), v.to_string());
        }
        let take_f64 = |keys: &std::collections::HashMap<String, String>, k: &str| -> Result<f64> {
            keys.get(k)
                .ok_or_else(|| anyhow!("line {lineno}: missing {k}="))?
                .parse()
                .map_err(|_| anyhow!("line {lineno}: bad {k}= value"))
        };

        if mnemonic == "NQ" {
            if circ.is_some() {
                bail!("line {lineno}: duplicate NQ");
            }
            let n = *sites
                .first()
                .ok_or_else(|| anyhow!("line {lineno}: NQ needs a count"))?;
            if n == 0 {
                bail!("line {lineno}: NQ must be positive");
            }
            circ = Some(Circuit::new(n));
            continue;
        }
        let circ = circ
            .as_mut()
            .ok_or_else(|| anyhow!("line {lineno}: NQ must come first"))?;

        let gate = match mnemonic.as_str() {
            "H" | "X" | "Y" | "Z" | "S" | "CNOT" | "CZ" | "SWAP" => Gate::Clifford {
                name: mnemonic.clone(),
                sites: sites.clone(),
            },
            "T" => {
                let site = *sites
                    .first()
                    .ok_or_else(|| anyhow!("line {lineno}: T needs a site"))?;
                Gate::t_gate(site)
            }
            "DEPOL" => Gate::PauliNoise {
                kind: NoiseKind::Depolarizing1 { p: take_f64(&keys, "p")? },
                sites: sites.clone(),
            },
            "DEPOL2" => Gate::PauliNoise {
                kind: NoiseKind::Depolarizing2 { p: take_f64(&keys, "p")? },
                sites: sites.clone(),
            },
            "DEPH" => Gate::PauliNoise {
                kind: NoiseKind::Dephasing { p: take_f64(&keys, "p")? },
                sites: sites.clone(),
            },
            "PAULIXYZ" => Gate::PauliNoise {
                kind: NoiseKind::PauliXYZ {
                    px: take_f64(&keys, "px")?,
                    py: take_f64(&keys, "py")?,
                    pz: take_f64(&keys, "pz")?,
                },
                sites: sites.clone(),
            },
            "AMPDAMP" => Gate::AmplitudeDamping {
                site: *sites
                    .first()
                    .ok_or_else(|| anyhow!("line {lineno}: AMPDAMP needs a site"))?,
                gamma: take_f64(&keys, "gamma")?,
            },
            "PROJ0" => Gate::ProjectorZero {
                site: *sites
                    .first()
                    .ok_or_else(|| anyhow!("line {lineno}: PROJ0 needs a site"))?,
            },
            "TMAP" => {
                let path = keys
                    .get("file")
                    .ok_or_else(|| anyhow!("line {lineno}: TMAP needs file="))?;
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("line {lineno}: reading {path}"))?;
                let value: serde_json::Value = serde_json::from_str(&text)?;
                Gate::TransferMap {
                    table: Arc::new(TransferTable::from_json(&value)?),
                    sites: sites.clone(),
                }
            }
            m if m.starts_with('R') && m.len() > 1 => {
                let codes: Vec<u8> = m[1..]
                    .chars()
                    .map(|c| match c {
                        'X' => Ok(1u8),
                        'Y' => Ok(2),
                        'Z' => Ok(3),
                        other => Err(anyhow!("line {lineno}: bad rotation axis '{other}'")),
                    })
                    .collect::<Result<_>>()?;
                if codes.len() != sites.len() {
                    bail!("line {lineno}: {m} takes {} sites", codes.len());
                }
                let angle = match keys.get("theta") {
                    Some(v) => Angle::Fixed(
                        v.parse()
                            .map_err(|_| anyhow!("line {lineno}: bad theta= value"))?,
                    ),
                    None => Angle::Slot(0),
                };
                Gate::PauliRotation {
                    codes,
                    sites: sites.clone(),
                    angle,
                }
            }
            other => bail!("line {lineno}: unknown mnemonic '{other}'"),
        };
        circ.push(gate)
            .with_context(|| format!("line {lineno}: invalid gate"))?;
    }
    circ.ok_or_else(|| anyhow!("circuit file has no NQ line"))
}

/// Built-in Trotterized transverse-field Ising families over a chain or
/// grid, optionally tilted and periodic.
pub fn build_circuit(name: &str, nqubits: usize, layers: usize) -> Result<Circuit> {
    let mut spec = name;
    let tilted = if let Some(rest) = spec.strip_prefix("tilted-") {
        spec = rest;
        true
    } else {
        false
    };
    let periodic = if let Some(rest) = spec.strip_suffix("-periodic") {
        spec = rest;
        true
    } else {
        false
    };
    let topo = if spec == "bricklayer" {
        bricklayer_topology(nqubits, periodic)?
    } else if let Some(dims) = spec.strip_prefix("grid-") {
        let (r, c) = dims
            .split_once('x')
            .ok_or_else(|| anyhow!("grid builder needs RxC dimensions"))?;
        let (rows, cols): (usize, usize) = (r.parse()?, c.parse()?);
        if rows * cols != nqubits {
            bail!("grid {rows}x{cols} needs --nqubits {}", rows * cols);
        }
        rectangle_topology(rows, cols, periodic)?
    } else {
        bail!("unknown builder '{name}'");
    };
    Ok(tfi_trotter_circuit(&topo, nqubits, layers, tilted)?)
}

/// Observable spec: bare symbol string or @file two-column dump.
pub fn parse_observable(spec: &str, nqubits: usize) -> Result<Sum> {
    if let Some(path) = spec.strip_prefix('@') {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        return Ok(Sum::from_text(nqubits, &text)?);
    }
    let w = Word::parse(spec)?;
    if w.nqubits() != nqubits {
        bail!("observable has {} sites, circuit has {nqubits}", w.nqubits());
    }
    Ok(Sum::single(w, 1.0))
}

/// Input state resolved from the --state grammar.
pub enum StateChoice {
    Stabilizer(ProductStabilizerState),
    OperatorSum(Sum),
}

/// Stabilizer file: one `+X` / `-Z` style entry per site.
fn parse_stabilizer_file(text: &str, nqubits: usize) -> Result<ProductStabilizerState> {
    let mut axes = Vec::new();
    let mut signs = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (sign, axis) = match line.as_bytes() {
            [b'+', a] => (1i8, *a as char),
            [b'-', a] => (-1i8, *a as char),
            [a] => (1i8, *a as char),
            _ => bail!("bad stabilizer entry '{line}'"),
        };
        signs.push(sign);
        axes.push(match axis.to_ascii_uppercase() {
            'X' => 1u8,
            'Y' => 2,
            'Z' => 3,
            other => bail!("bad stabilizer axis '{other}'"),
        });
    }
    if axes.len() != nqubits {
        bail!("stabilizer file has {} sites, need {nqubits}", axes.len());
    }
    Ok(ProductStabilizerState::new(axes, signs)?)
}

pub fn parse_state(spec: &str, nqubits: usize) -> Result<StateChoice> {
    if spec == "zero" {
        return Ok(StateChoice::Stabilizer(ProductStabilizerState::all_zero(
            nqubits,
        )));
    }
    if spec == "plus" {
        return Ok(StateChoice::Stabilizer(ProductStabilizerState::all_plus(
            nqubits,
        )));
    }
    if let Some(path) = spec.strip_prefix("stab:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        return Ok(StateChoice::Stabilizer(parse_stabilizer_file(
            &text, nqubits,
        )?));
    }
    if let Some(path) = spec.strip_prefix("sum:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        return Ok(StateChoice::OperatorSum(Sum::from_text(nqubits, &text)?));
    }
    if !spec.is_empty() && spec.chars().all(|c| c == '0' || c == '1') {
        if spec.len() != nqubits {
            bail!("bitstring has {} sites, need {nqubits}", spec.len());
        }
        let bits: Vec<u8> = spec.bytes().map(|b| b - b'0').collect();
        return Ok(StateChoice::Stabilizer(ProductStabilizerState::computational(
            &bits,
        )));
    }
    bail!("unrecognized state spec '{spec}'")
}

fn expectation<C: Coeff<f64>>(
    sum: &PauliSum<u64, f64, C>,
    state: &StateChoice,
) -> Result<f64> {
    Ok(match state {
        StateChoice::Stabilizer(rho) => overlap_with_product_stabilizer(sum, rho)?,
        StateChoice::OperatorSum(rho) => {
            let mut plain = Sum::new(sum.nqubits());
            for (w, c) in sum.iter() {
                plain.add(*w, c.value())?;
            }
            overlap_with_pauli_sum(rho, &plain)?
        }
    })
}

struct Resolved {
    circuit: Circuit,
    nqubits: usize,
    thetas: Vec<f64>,
    observable: Sum,
    state: StateChoice,
    truncation: Truncation,
}

fn resolve(cli: &Cli) -> Result<Resolved> {
    resolve_inner(cli, true)
}

/// As [`resolve`] for modes that never bind angles (surrogate compilation,
/// Monte Carlo sampling).
fn resolve_unbound(cli: &Cli) -> Result<Resolved> {
    resolve_inner(cli, false)
}

fn resolve_inner(cli: &Cli, needs_thetas: bool) -> Result<Resolved> {
    let circuit = match (&cli.circuit, &cli.builder) {
        (Some(path), None) => {
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
            parse_circuit_file(&text)?
        }
        (None, Some(name)) => {
            let n = cli
                .nqubits
                .ok_or_else(|| anyhow!("--builder requires --nqubits"))?;
            build_circuit(name, n, cli.layers)?
        }
        (None, None) => bail!("exactly one of --circuit or --builder is required"),
        (Some(_), Some(_)) => bail!("exactly one of --circuit or --builder is required"),
    };
    let nqubits = circuit.nqubits();
    if let Some(n) = cli.nqubits {
        if n != nqubits {
            bail!("--nqubits {n} disagrees with circuit size {nqubits}");
        }
    }

    let mut thetas = match (&cli.thetas, &cli.theta_file) {
        (Some(v), None) => v.clone(),
        (None, Some(path)) => {
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
            text.lines()
                .flat_map(|l| l.split('#').next().unwrap_or("").split_whitespace())
                .map(|t| t.parse::<f64>().with_context(|| format!("bad angle '{t}'")))
                .collect::<Result<_>>()?
        }
        (None, None) => Vec::new(),
        (Some(_), Some(_)) => bail!("use either --thetas or --theta-file, not both"),
    };
    if thetas.len() == 1 && circuit.nparams() > 1 {
        thetas = vec![thetas[0]; circuit.nparams()];
    }
    if needs_thetas && thetas.len() != circuit.nparams() {
        bail!(
            "circuit has {} parameter slots, got {} angles",
            circuit.nparams(),
            thetas.len()
        );
    }

    let observable = match &cli.observable {
        Some(spec) => parse_observable(spec, nqubits)?,
        None => bail!("--observable is required"),
    };
    let state = parse_state(&cli.state, nqubits)?;

    let mut truncation = Truncation::none().with_min_abs_coeff(cli.min_abs_coeff);
    truncation.max_weight = cli.max_weight;
    truncation.max_freq = cli.max_freq;
    truncation.max_sins = cli.max_sins;
    truncation.max_pathweight = cli.max_pathweight;

    Ok(Resolved {
        circuit,
        nqubits,
        thetas,
        observable,
        state,
        truncation,
    })
}

fn render_report(expectation: f64, sum_norms: pauli_prop::Norms<f64>, report: &Report<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "expectation: {expectation:.16e}");
    let _ = writeln!(out, "terms: {}", sum_norms.nterms);
    let _ = writeln!(out, "peak terms: {}", report.peak_terms);
    let _ = writeln!(out, "l1 norm: {:.16e}", sum_norms.l1);
    let _ = writeln!(out, "l2 norm squared: {:.16e}", sum_norms.l2sq);
    let _ = writeln!(out, "delta l1: {:.16e}", report.delta_l1);
    let _ = writeln!(out, "delta l2: {:.16e}", report.delta_l2);
    let _ = writeln!(out, "seconds: {:.6}", report.seconds);
    out
}

fn dump_sum_file(path: &PathBuf, sum: &Sum) -> Result<()> {
    std::fs::write(path, sum.to_text())?;
    Ok(())
}

fn membership_rule(cli: &Cli) -> MembershipRule {
    MembershipRule {
        max_weight: cli.max_weight,
        max_freq: cli.max_freq,
        max_sins: cli.max_sins,
        max_pathweight: cli.max_pathweight,
    }
}

fn single_word_observable(obs: &Sum) -> Result<Word> {
    let mut it = obs.iter();
    match (it.next(), it.next()) {
        (Some((w, _)), None) => Ok(*w),
        _ => bail!("this mode needs a single-word observable"),
    }
}

fn stabilizer_state(state: &StateChoice) -> Result<&ProductStabilizerState> {
    match state {
        StateChoice::Stabilizer(s) => Ok(s),
        StateChoice::OperatorSum(_) => bail!("this mode needs a product stabilizer state"),
    }
}

/// Execute one resolved invocation; returns the report text that the binary
/// prints to stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match cli.mode.as_str() {
        "propagate" => {
            let r = resolve(cli)?;
            let (out, report) = propagate(&r.circuit, r.observable, &r.thetas, &r.truncation)?;
            let value = expectation(&out, &r.state)?;
            if let Some(path) = &cli.dump_sum {
                dump_sum_file(path, &out)?;
            }
            let text = render_report(value, out.norms(), &report);
            if let Some(path) = &cli.out {
                std::fs::write(path, &text)?;
            }
            Ok(text)
        }
        "tracked" => {
            let r = resolve(cli)?;
            let mut init = TrackedSum::new(r.nqubits);
            for (w, c) in r.observable.iter() {
                init.add(*w, PathCoeff::from_value(*c))?;
            }
            let (out, report) = propagate_tracked(&r.circuit, init, &r.thetas, &r.truncation)?;
            let value = expectation(&out, &r.state)?;
            if let Some(path) = &cli.dump_sum {
                dump_sum_file(path, &out.to_plain())?;
            }
            let text = render_report(value, out.norms(), &report);
            if let Some(path) = &cli.out {
                std::fs::write(path, &text)?;
            }
            Ok(text)
        }
        "analyze" => {
            let r = resolve(cli)?;
            let (out, report) = propagate(&r.circuit, r.observable.clone(), &r.thetas, &r.truncation)?;
            let value = expectation(&out, &r.state)?;
            let mut text = render_report(value, out.norms(), &report);
            let (p2, ose, l1) = pauli_purity_and_ose(&out)?;
            let _ = writeln!(text, "pauli purity: {p2:.16e}");
            let _ = writeln!(text, "operator stabilizer entropy: {ose:.16e}");
            let _ = writeln!(text, "normalized l1: {l1:.16e}");
            let _ = writeln!(text, "l1 lower bound 1/sqrt(purity): {:.16e}", 1.0 / p2.sqrt());
            if let Ok(word) = single_word_observable(&r.observable) {
                match count_paths(&r.circuit, &word, &r.thetas) {
                    Ok(paths) => {
                        let _ = writeln!(text, "paths: {paths}");
                    }
                    Err(_) => {
                        let _ = writeln!(text, "paths: > 100000000");
                    }
                }
            }
            let ledger = ErrorLedger::from_report(&report);
            let _ = writeln!(text, "ledger gates: {}", ledger.per_gate_l1.len());
            if let Some(path) = &cli.out {
                std::fs::write(path, &text)?;
            }
            Ok(text)
        }
        "sweep" => {
            let r = resolve(cli)?;
            let mut csv = String::from("threshold,expectation,nterms,delta_l1,seconds\n");
            for exp in 10..=18 {
                let threshold = 2f64.powi(-exp);
                let mut cfg = r.truncation.clone().with_min_abs_coeff(threshold);
                cfg.max_weight = r.truncation.max_weight;
                let (out, report) =
                    propagate(&r.circuit, r.observable.clone(), &r.thetas, &cfg)?;
                let value = expectation(&out, &r.state)?;
                let _ = writeln!(
                    csv,
                    "{threshold:.16e},{value:.16e},{},{:.16e},{:.6}",
                    out.len(),
                    report.delta_l1,
                    report.seconds
                );
            }
            if let Some(path) = &cli.out {
                std::fs::write(path, &csv)?;
            }
            Ok(csv)
        }
        "mc-error" => {
            let r = resolve_unbound(cli)?;
            let word = single_word_observable(&r.observable)?;
            let state = stabilizer_state(&r.state)?.clone();
            let cfg = MCConfig {
                nsamples: cli.samples,
                seed: cli.seed,
                rule: membership_rule(cli),
                state,
            };
            let (mse, stderr) = mc_mse_estimate(&r.circuit, &word, &cfg)?;
            let mut csv = String::from("samples,seed,mse,stderr\n");
            let _ = writeln!(csv, "{},{},{mse:.16e},{stderr:.16e}", cli.samples, cli.seed);
            if let Some(path) = &cli.out {
                std::fs::write(path, &csv)?;
            }
            Ok(csv)
        }
        "surrogate-compile" => {
            let r = resolve_unbound(cli)?;
            if cli.max_pathweight.is_some() {
                bail!("surrogate compilation does not support --max-pathweight");
            }
            let state = stabilizer_state(&r.state)?;
            let trunc = SurrogateTruncation {
                max_weight: cli.max_weight,
                max_freq: cli.max_freq,
                max_sins: cli.max_sins,
            };
            let graph = compile_surrogate(&r.circuit, &r.observable, state, &trunc)?;
            let out = cli
                .out
                .as_ref()
                .ok_or_else(|| anyhow!("surrogate-compile requires --out"))?;
            std::fs::write(out, graph.to_json_string()?)?;
            let mut text = String::new();
            let _ = writeln!(text, "surrogate nodes: {}", graph.nodes.len());
            let _ = writeln!(text, "parameters: {}", graph.nparams);
            let _ = writeln!(text, "written: {}", out.display());
            Ok(text)
        }
        "surrogate-eval" => {
            let path = cli
                .surrogate
                .as_ref()
                .ok_or_else(|| anyhow!("surrogate-eval requires --surrogate"))?;
            let text =
                std::fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
            let graph = SurrogateGraph::from_json_string(&text)?;
            let mut thetas = match (&cli.thetas, &cli.theta_file) {
                (Some(v), None) => v.clone(),
                (None, Some(p)) => std::fs::read_to_string(p)?
                    .split_whitespace()
                    .map(|t| t.parse::<f64>().with_context(|| format!("bad angle '{t}'")))
                    .collect::<Result<_>>()?,
                _ => Vec::new(),
            };
            if thetas.len() == 1 && graph.nparams > 1 {
                thetas = vec![thetas[0]; graph.nparams];
            }
            let value = graph.evaluate(&thetas)?;
            let out = format!("expectation: {value:.16e}\n");
            if let Some(path) = &cli.out {
                std::fs::write(path, &out)?;
            }
            Ok(out)
        }
        other => bail!("unknown mode '{other}'"),
    }
}

/// Parse argv and execute; the process front end.
pub fn run_from_args<I, S>(args: I) -> Result<String>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    run(&cli)
}
