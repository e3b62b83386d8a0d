//! Parameter-free recompilation: propagate once symbolically, then re-evaluate
//! the resulting expectation for any angle assignment at arithmetic cost.
//!
//! The compiler runs the same merging backward pass as the numeric engine,
//! but coefficients are node ids into a hash-consed expression DAG over
//! `cos(theta_k)` and `sin(theta_k)`. Merging two paths creates a SUM node,
//! so shared subpaths are stored once and every evaluation is a single
//! topological sweep.

use crate::bits::PauliBits;
use crate::circuits::Circuit;
use crate::gates::{Angle, Gate};
use crate::overlaps::ProductStabilizerState;
use crate::pauli::{PauliWord, PAULI_I};
use crate::sum::{PauliSum, TruncationConfig};
use crate::Error;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub const SURROGATE_FORMAT_VERSION: u32 = 1;

/// Expression node. Constants store raw f64 bits so hashing and round trips
/// are exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Node {
    Const { bits: u64 },
    Cos { slot: u32 },
    Sin { slot: u32 },
    Prod { a: u32, b: u32 },
    Sum { terms: Vec<u32> },
}

/// Compiled expectation function of the circuit parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurrogateGraph {
    pub version: u32,
    pub nqubits: usize,
    pub nparams: usize,
    /// Children always precede parents.
    pub nodes: Vec<Node>,
    pub root: u32,
}

impl SurrogateGraph {
    /// Evaluate at one angle assignment with a single pass over the nodes.
    pub fn evaluate(&self, thetas: &[f64]) -> Result<f64, Error> {
        if thetas.len() != self.nparams {
            return Err(Error::ParameterCount {
                expected: self.nparams,
                got: thetas.len(),
            });
        }
        let mut vals = vec![0.0f64; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            vals[i] = match node {
                Node::Const { bits } => f64::from_bits(*bits),
                Node::Cos { slot } => thetas[*slot as usize].cos(),
                Node::Sin { slot } => thetas[*slot as usize].sin(),
                Node::Prod { a, b } => vals[*a as usize] * vals[*b as usize],
                Node::Sum { terms } => terms.iter().map(|&t| vals[t as usize]).sum(),
            };
        }
        Ok(vals[self.root as usize])
    }

    pub fn to_json_string(&self) -> Result<String, Error> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_string(text: &str) -> Result<Self, Error> {
        let g: SurrogateGraph = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    /// Structural checks: version, slot range, and topological child order.
    pub fn validate(&self) -> Result<(), Error> {
        if self.version != SURROGATE_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported surrogate format version {}",
                self.version
            )));
        }
        if self.nodes.is_empty() || self.root as usize >= self.nodes.len() {
            return Err(Error::Parse("surrogate root out of range".into()));
        }
        for (i, node) in self.nodes.iter().enumerate() {
            let ok = match node {
                Node::Const { .. } => true,
                Node::Cos { slot } | Node::Sin { slot } => (*slot as usize) < self.nparams,
                Node::Prod { a, b } => (*a as usize) < i && (*b as usize) < i,
                Node::Sum { terms } => terms.iter().all(|&t| (t as usize) < i),
            };
            if !ok {
                return Err(Error::Parse(format!("surrogate node {i} malformed")));
            }
        }
        Ok(())
    }
}

/// Truncations a surrogate can honor: exactly the rules whose decisions do
/// not depend on parameter values.
#[derive(Copy, Clone, Debug, Default, Serialize, Deserialize)]
pub struct SurrogateTruncation {
    pub max_weight: Option<u32>,
    pub max_freq: Option<u32>,
    pub max_sins: Option<u32>,
}

impl SurrogateTruncation {
    fn excludes(&self, weight: u32, ncos: u32, nsin: u32) -> bool {
        self.max_weight.is_some_and(|m| weight > m)
            || self.max_freq.is_some_and(|m| ncos + nsin > m)
            || self.max_sins.is_some_and(|m| nsin > m)
    }

    /// The equivalent numeric-engine config, for cross-checking against a
    /// tracked propagation.
    pub fn to_truncation_config<B: PauliBits>(&self) -> TruncationConfig<B, f64> {
        let mut cfg = TruncationConfig::none();
        cfg.max_weight = self.max_weight;
        cfg.max_freq = self.max_freq;
        cfg.max_sins = self.max_sins;
        cfg
    }
}

struct GraphBuilder {
    nodes: Vec<Node>,
    intern: HashMap<Node, u32>,
    neg_one: Option<u32>,
}

impl GraphBuilder {
    fn new() -> Self {
        GraphBuilder {
            nodes: Vec::new(),
            intern: HashMap::new(),
            neg_one: None,
        }
    }

    fn intern(&mut self, node: Node) -> u32 {
        if let Some(&id) = self.intern.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node.clone());
        self.intern.insert(node, id);
        id
    }

    fn constant(&mut self, v: f64) -> u32 {
        self.intern(Node::Const { bits: v.to_bits() })
    }

    fn prod(&mut self, a: u32, b: u32) -> u32 {
        // commutative, so canonical operand order maximizes sharing
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.intern(Node::Prod { a, b })
    }

    fn negate(&mut self, a: u32) -> u32 {
        let neg = match self.neg_one {
            Some(id) => id,
            None => {
                let id = self.constant(-1.0);
                self.neg_one = Some(id);
                id
            }
        };
        self.prod(neg, a)
    }

    /// n-ary sum, flattening direct SUM children and sorting for a
    /// canonical form. A singleton collapses to its only child.
    fn sum(&mut self, children: Vec<u32>) -> u32 {
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match &self.nodes[c as usize] {
                Node::Sum { terms } => flat.extend(terms.iter().copied()),
                _ => flat.push(c),
            }
        }
        flat.sort_unstable();
        match flat.len() {
            0 => self.constant(0.0),
            1 => flat[0],
            _ => self.intern(Node::Sum { terms: flat }),
        }
    }
}

/// Symbolic coefficient: expression node plus the merged branch counters,
/// combined exactly like the numeric tracked engine (values add, counters
/// take the elementwise minimum).
#[derive(Copy, Clone, Debug)]
struct SymTerm {
    node: u32,
    ncos: u32,
    nsin: u32,
}

/// Rotation factor nodes for one gate, by angle binding.
enum Factors {
    Slot { cos: u32, sin: u32 },
}

fn rotation_factors(builder: &mut GraphBuilder, angle: &Angle) -> Factors {
    match angle {
        Angle::Slot(s) => Factors::Slot {
            cos: builder.intern(Node::Cos { slot: *s as u32 }),
            sin: builder.intern(Node::Sin { slot: *s as u32 }),
        },
        Angle::Fixed(t) => Factors::Slot {
            cos: builder.constant(t.cos()),
            sin: builder.constant(t.sin()),
        },
    }
}

/// Compile the expectation Tr[rho U^dag O U] into a reusable expression DAG.
/// The circuit may contain Cliffords and Pauli rotations only.
pub fn compile_surrogate<B: PauliBits>(
    circ: &Circuit,
    observable: &PauliSum<B, f64>,
    state: &ProductStabilizerState,
    trunc: &SurrogateTruncation,
) -> Result<SurrogateGraph, Error> {
    let n = circ.nqubits();
    if observable.nqubits() != n {
        return Err(Error::NQubitsMismatch(observable.nqubits(), n));
    }
    if state.nqubits() != n {
        return Err(Error::NQubitsMismatch(state.nqubits(), n));
    }
    let mut builder = GraphBuilder::new();
    let mut working: HashMap<PauliWord<B>, SymTerm> = HashMap::new();
    for (w, c) in observable.sorted_terms() {
        let node = builder.constant(c);
        working.insert(
            w,
            SymTerm {
                node,
                ncos: 0,
                nsin: 0,
            },
        );
    }

    // resolve gates up front, rejecting anything that is not a signed Pauli
    // permutation or a rotation
    enum Step<B: PauliBits> {
        Clifford {
            table: std::sync::Arc<crate::gates::CliffordTable>,
            sites: Vec<usize>,
        },
        Rotation {
            generator: PauliWord<B>,
            angle: Angle,
        },
    }
    let mut steps: Vec<Step<B>> = Vec::with_capacity(circ.gates().len());
    for gate in circ.gates() {
        steps.push(match gate {
            Gate::Clifford { name, sites } => Step::Clifford {
                table: crate::gates::builtin_clifford(name)?,
                sites: sites.clone(),
            },
            Gate::CliffordTable { table, sites } => Step::Clifford {
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
                Step::Rotation {
                    generator: PauliWord::encode(n, &entries)?,
                    angle: *angle,
                }
            }
            _ => {
                return Err(Error::InvalidGate(
                    "surrogate compilation supports Cliffords and rotations only".into(),
                ))
            }
        });
    }

    // deterministic iteration: sorted word snapshot per gate
    let sorted_words = |m: &HashMap<PauliWord<B>, SymTerm>| {
        let mut v: Vec<PauliWord<B>> = m.keys().copied().collect();
        v.sort();
        v
    };

    for step in steps.iter().rev() {
        match step {
            Step::Clifford { table, sites } => {
                let mut fresh = HashMap::with_capacity(working.len());
                for w in sorted_words(&working) {
                    let term = working[&w];
                    let (word, sign) = crate::gates::apply_clifford(&w, &1.0f64, table, sites);
                    let node = if sign < 0.0 {
                        builder.negate(term.node)
                    } else {
                        term.node
                    };
                    fresh.insert(word, SymTerm { node, ..term });
                }
                working = fresh;
            }
            Step::Rotation { generator, angle } => {
                let Factors::Slot { cos, sin } = rotation_factors(&mut builder, angle);
                // all cos updates happen before any sine merge, exactly like
                // the numeric two-map pass
                let mut sins: Vec<(PauliWord<B>, SymTerm)> = Vec::new();
                for w in sorted_words(&working) {
                    if w.commutes(generator).expect("matching nqubits") {
                        continue;
                    }
                    let term = working[&w];
                    let (word, phase) = generator.product(&w).expect("matching nqubits");
                    let mut sin_node = builder.prod(term.node, sin);
                    if (phase.exponent() + 1) % 4 != 0 {
                        sin_node = builder.negate(sin_node);
                    }
                    let cos_node = builder.prod(term.node, cos);
                    working.insert(
                        w,
                        SymTerm {
                            node: cos_node,
                            ncos: term.ncos + 1,
                            nsin: term.nsin,
                        },
                    );
                    sins.push((
                        word,
                        SymTerm {
                            node: sin_node,
                            ncos: term.ncos,
                            nsin: term.nsin + 1,
                        },
                    ));
                }
                for (word, branch) in sins {
                    match working.entry(word) {
                        std::collections::hash_map::Entry::Occupied(mut e) => {
                            let prev = *e.get();
                            let merged = builder.sum(vec![prev.node, branch.node]);
                            e.insert(SymTerm {
                                node: merged,
                                ncos: prev.ncos.min(branch.ncos),
                                nsin: prev.nsin.min(branch.nsin),
                            });
                        }
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(branch);
                        }
                    }
                }
            }
        }
        working.retain(|w, t| !trunc.excludes(w.weight(), t.ncos, t.nsin));
    }

    // overlap filter: keep words stabilized by the product state, signed
    let mut survivors: Vec<(PauliWord<B>, SymTerm)> = working.into_iter().collect();
    survivors.sort_by(|a, b| a.0.cmp(&b.0));
    let mut roots = Vec::new();
    'words: for (w, term) in survivors {
        let mut negative = false;
        for site in 1..=n {
            let code = w.code(site);
            if code == PAULI_I {
                continue;
            }
            if code != state.axes[site - 1] {
                continue 'words;
            }
            if state.signs[site - 1] < 0 {
                negative = !negative;
            }
        }
        let node = if negative {
            builder.negate(term.node)
        } else {
            term.node
        };
        roots.push(node);
    }
    let root = builder.sum(roots);

    let graph = SurrogateGraph {
        version: SURROGATE_FORMAT_VERSION,
        nqubits: n,
        nparams: circ.nparams(),
        nodes: builder.nodes,
        root,
    };
    graph.validate()?;
    Ok(graph)
}
