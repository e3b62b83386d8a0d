//! Circuits, topology generators, and benchmark circuit builders.

use crate::gates::{Angle, Gate};
use crate::pauli::{PAULI_X, PAULI_Z};
use crate::Error;

/// 1-indexed site pairs describing two-qubit connectivity.
pub type Topology = Vec<(usize, usize)>;

/// Ordered gate list in Schrodinger order with automatically assigned
/// parameter slots.
#[derive(Clone, Debug)]
pub struct Circuit {
    nqubits: usize,
    gates: Vec<Gate>,
    nparams: usize,
}

impl Circuit {
    pub fn new(nqubits: usize) -> Self {
        assert!(nqubits >= 1);
        Circuit {
            nqubits,
            gates: Vec::new(),
            nparams: 0,
        }
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of free parameter slots.
    pub fn nparams(&self) -> usize {
        self.nparams
    }

    /// Append a gate. A rotation carrying `Angle::Slot` has its slot
    /// reassigned to the next free index, so slots always follow Schrodinger
    /// appearance order.
    pub fn push(&mut self, gate: Gate) -> Result<(), Error> {
        gate.validate(self.nqubits)?;
        let gate = match gate {
            Gate::PauliRotation {
                codes,
                sites,
                angle: Angle::Slot(_),
            } => {
                let g = Gate::PauliRotation {
                    codes,
                    sites,
                    angle: Angle::Slot(self.nparams),
                };
                self.nparams += 1;
                g
            }
            other => other,
        };
        self.gates.push(gate);
        Ok(())
    }

    /// Append a rotation consuming the next parameter slot.
    pub fn push_rotation(&mut self, codes: Vec<u8>, sites: Vec<usize>) -> Result<(), Error> {
        self.push(Gate::PauliRotation {
            codes,
            sites,
            angle: Angle::Slot(0),
        })
    }

    /// Append a rotation with a bound angle.
    pub fn push_fixed_rotation(
        &mut self,
        codes: Vec<u8>,
        sites: Vec<usize>,
        theta: f64,
    ) -> Result<(), Error> {
        self.push(Gate::PauliRotation {
            codes,
            sites,
            angle: Angle::Fixed(theta),
        })
    }

    /// Append a built-in Clifford by name.
    pub fn push_clifford(&mut self, name: &str, sites: Vec<usize>) -> Result<(), Error> {
        self.push(Gate::Clifford {
            name: name.to_string(),
            sites,
        })
    }

    pub fn check_thetas(&self, thetas: &[f64]) -> Result<(), Error> {
        if thetas.len() != self.nparams {
            return Err(Error::ParameterCount {
                expected: self.nparams,
                got: thetas.len(),
            });
        }
        Ok(())
    }
}

/// Brick-wall pairing: odd pairs (1,2),(3,4),... then even pairs
/// (2,3),(4,5),...; the periodic flag adds the wrap pair (n,1) to the even
/// sublayer when n is even.
pub fn bricklayer_topology(n: usize, periodic: bool) -> Result<Topology, Error> {
    if n < 2 {
        return Err(Error::Invalid("bricklayer needs n >= 2".into()));
    }
    let mut pairs = Vec::new();
    let mut i = 1;
    while i + 1 <= n {
        pairs.push((i, i + 1));
        i += 2;
    }
    let mut i = 2;
    while i + 1 <= n {
        pairs.push((i, i + 1));
        i += 2;
    }
    if periodic && n % 2 == 0 && n > 2 {
        pairs.push((n, 1));
    }
    Ok(pairs)
}

/// Nearest-neighbor pairs of a rows x cols grid with row-major numbering;
/// the periodic flag wraps both axes (skipping wraps that would duplicate an
/// open edge).
pub fn rectangle_topology(rows: usize, cols: usize, periodic: bool) -> Result<Topology, Error> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::Invalid("degenerate grid".into()));
    }
    let site = |r: usize, c: usize| (r - 1) * cols + c;
    let mut pairs = Vec::new();
    for r in 1..=rows {
        for c in 1..cols {
            pairs.push((site(r, c), site(r, c + 1)));
        }
        if periodic && cols > 2 {
            pairs.push((site(r, cols), site(r, 1)));
        }
    }
    for r in 1..rows {
        for c in 1..=cols {
            pairs.push((site(r, c), site(r + 1, c)));
        }
    }
    if periodic && rows > 2 {
        for c in 1..=cols {
            pairs.push((site(rows, c), site(1, c)));
        }
    }
    Ok(pairs)
}

/// Trotter step family of the (tilted) transverse-field Ising model: per
/// layer RX on every site, RZ on every site when tilted, then RZZ on every
/// topology pair. One parameter slot per rotation, Schrodinger order.
pub fn tfi_trotter_circuit(
    topology: &Topology,
    n: usize,
    layers: usize,
    tilted: bool,
) -> Result<Circuit, Error> {
    let mut circ = Circuit::new(n);
    for _ in 0..layers {
        for site in 1..=n {
            circ.push_rotation(vec![PAULI_X], vec![site])?;
        }
        if tilted {
            for site in 1..=n {
                circ.push_rotation(vec![PAULI_Z], vec![site])?;
            }
        }
        for &(i, j) in topology {
            circ.push_rotation(vec![PAULI_Z, PAULI_Z], vec![i, j])?;
        }
    }
    Ok(circ)
}

/// Shared per-layer angles of a Trotter step.
#[derive(Copy, Clone, Debug)]
pub struct TrotterAngles {
    pub x: f64,
    /// Present exactly when the circuit is tilted.
    pub z: Option<f64>,
    pub zz: f64,
}

/// Expand one shared angle per layer and gate kind into the full slot
/// vector of [`tfi_trotter_circuit`].
pub fn bind_layer_angles(
    n: usize,
    npairs: usize,
    tilted: bool,
    layers: &[TrotterAngles],
) -> Result<Vec<f64>, Error> {
    let mut thetas = Vec::with_capacity(layers.len() * (n + npairs + if tilted { n } else { 0 }));
    for layer in layers {
        thetas.extend(std::iter::repeat(layer.x).take(n));
        match (tilted, layer.z) {
            (true, Some(z)) => thetas.extend(std::iter::repeat(z).take(n)),
            (false, None) => {}
            _ => {
                return Err(Error::Invalid(
                    "z angle must be present exactly when tilted".into(),
                ))
            }
        }
        thetas.extend(std::iter::repeat(layer.zz).take(npairs));
    }
    Ok(thetas)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bricklayer_cases() {
        assert_eq!(bricklayer_topology(2, false).unwrap(), vec![(1, 2)]);
        assert_eq!(
            bricklayer_topology(4, false).unwrap(),
            vec![(1, 2), (3, 4), (2, 3)]
        );
        assert_eq!(
            bricklayer_topology(4, true).unwrap(),
            vec![(1, 2), (3, 4), (2, 3), (4, 1)]
        );
        assert!(bricklayer_topology(1, false).is_err());
    }

    #[test]
    fn rectangle_cases() {
        assert_eq!(rectangle_topology(2, 2, false).unwrap().len(), 4);
        assert_eq!(rectangle_topology(3, 3, false).unwrap().len(), 12);
        assert_eq!(rectangle_topology(3, 3, true).unwrap().len(), 18);
        let line = rectangle_topology(1, 4, false).unwrap();
        let brick: std::collections::HashSet<(usize, usize)> =
            bricklayer_topology(4, false).unwrap().into_iter().collect();
        assert_eq!(line.into_iter().collect::<std::collections::HashSet<_>>(), brick);
    }

    #[test]
    fn rectangle_edges_in_range() {
        for (rows, cols, periodic) in [(2, 3, false), (3, 4, true), (1, 5, false)] {
            let n = rows * cols;
            for (i, j) in rectangle_topology(rows, cols, periodic).unwrap() {
                assert!(i >= 1 && i <= n && j >= 1 && j <= n && i != j);
            }
        }
    }

    #[test]
    fn trotter_layout_and_slots() {
        let topo = bricklayer_topology(2, false).unwrap();
        let circ = tfi_trotter_circuit(&topo, 2, 1, false).unwrap();
        assert_eq!(circ.gates().len(), 3);
        assert_eq!(circ.nparams(), 3);
        let circ = tfi_trotter_circuit(&topo, 2, 0, false).unwrap();
        assert!(circ.gates().is_empty());
        let topo = rectangle_topology(3, 3, false).unwrap();
        let circ = tfi_trotter_circuit(&topo, 9, 2, true).unwrap();
        assert_eq!(circ.nparams(), 2 * (9 + 9 + 12));
        assert_eq!(circ.nparams(), circ.gates().len());
    }

    #[test]
    fn layer_binding_expands_in_order() {
        let angles = [
            TrotterAngles { x: 0.1, z: None, zz: 0.2 },
            TrotterAngles { x: 0.3, z: None, zz: 0.4 },
        ];
        let thetas = bind_layer_angles(2, 1, false, &angles).unwrap();
        assert_eq!(thetas, vec![0.1, 0.1, 0.2, 0.3, 0.3, 0.4]);
        assert!(bind_layer_angles(2, 1, true, &angles).is_err());
    }
}
