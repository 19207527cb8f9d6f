use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gate::{Control, GateKind, GateOp};
use crate::scalar::Real;
use crate::state::QuantumState;
use crate::transforms::{apply_real_transform, validate_register, SpectralTransform, TransformKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction<T> {
    Gate(GateOp<T>),
    /// Project the qubit onto `|0>` and renormalize.
    Postselect(usize),
    /// Direct orthogonal cosine/sine transform.
    Transform(SpectralTransform),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    n_qubits: usize,
    ops: Vec<Instruction<T>>,
    ancillas: BTreeSet<usize>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
            ancillas: BTreeSet::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Instruction<T>] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ancillas(&self) -> &BTreeSet<usize> {
        &self.ancillas
    }

    pub fn gates(&self) -> impl Iterator<Item = &GateOp<T>> {
        self.ops.iter().filter_map(|op| match op {
            Instruction::Gate(g) => Some(g),
            _ => None,
        })
    }

    /// Marks `qubit` as an ancilla. Ancillas may only be gate targets of
    /// damping rotations, never controls or part of a transform register.
    pub fn add_ancilla(&mut self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        for op in &self.ops {
            self.check_ancilla_use(op, qubit)?;
        }
        self.ancillas.insert(qubit);
        Ok(())
    }

    fn check_ancilla_use(&self, op: &Instruction<T>, ancilla: usize) -> Result<()> {
        let clash = match op {
            Instruction::Gate(g) => g.controls.iter().any(|c| c.qubit == ancilla),
            Instruction::Transform(t) => t.qubits.contains(&ancilla),
            Instruction::Postselect(_) => false,
        };
        if clash {
            return Err(Error::InvalidRegister(format!(
                "ancilla {ancilla} used as part of the main register"
            )));
        }
        Ok(())
    }

    pub fn push(&mut self, op: Instruction<T>) -> Result<()> {
        match &op {
            Instruction::Gate(g) => g.validate(self.n_qubits)?,
            Instruction::Postselect(q) => {
                if *q >= self.n_qubits {
                    return Err(Error::QubitOutOfRange {
                        index: *q,
                        n_qubits: self.n_qubits,
                    });
                }
            }
            Instruction::Transform(t) => validate_register(&t.qubits, self.n_qubits)?,
        }
        for &a in &self.ancillas {
            self.check_ancilla_use(&op, a)?;
        }
        self.ops.push(op);
        Ok(())
    }

    pub fn push_gate(&mut self, gate: GateOp<T>) -> Result<()> {
        self.push(Instruction::Gate(gate))
    }

    pub fn postselect(&mut self, qubit: usize) -> Result<()> {
        self.push(Instruction::Postselect(qubit))
    }

    /// Appends every instruction of `other` (same width) and merges its
    /// ancilla set.
    pub fn append(&mut self, other: &Circuit<T>) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        for op in &other.ops {
            self.push(op.clone())?;
        }
        for &a in &other.ancillas {
            self.add_ancilla(a)?;
        }
        Ok(())
    }

    /// Gate-wise adjoint. Fails on circuits containing postselections.
    pub fn inverse(&self) -> Result<Self> {
        let mut ops = Vec::with_capacity(self.ops.len());
        for op in self.ops.iter().rev() {
            ops.push(match op {
                Instruction::Gate(g) => Instruction::Gate(g.inverse()),
                Instruction::Transform(t) => Instruction::Transform(SpectralTransform {
                    inverse: !t.inverse,
                    ..t.clone()
                }),
                Instruction::Postselect(_) => {
                    return Err(Error::InvalidParameter("postselection has no inverse".into()))
                }
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            ops,
            ancillas: self.ancillas.clone(),
        })
    }

    pub fn counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for op in &self.ops {
            match op {
                Instruction::Gate(g) => {
                    let k = g.controls.len();
                    match g.kind {
                        GateKind::Swap(_) => {
                            c.multi_qubit += 1;
                            c.two_qubit_decomposed += 3 * controlled_cost(k + 1).max(1);
                        }
                        _ if k == 0 => c.single_qubit += 1,
                        _ => {
                            c.multi_qubit += 1;
                            c.two_qubit_decomposed += controlled_cost(k);
                        }
                    }
                }
                Instruction::Postselect(_) => c.postselections += 1,
                Instruction::Transform(_) => c.transforms += 1,
            }
        }
        c
    }

    /// One instruction per line:
    /// `GATE kind target [q:v,…] angle`, `POSTSELECT q`,
    /// `TRANSFORM qct|qst q,q,… forward|inverse`.
    pub fn to_listing(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "QUBITS {}", self.n_qubits);
        if !self.ancillas.is_empty() {
            let list: Vec<String> = self.ancillas.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(out, "ANCILLAS {}", list.join(","));
        }
        for op in &self.ops {
            match op {
                Instruction::Gate(g) => {
                    let (name, target, angle) = match g.kind {
                        GateKind::Phase(t) => ("p", g.target.to_string(), t.as_f64()),
                        GateKind::DampingRotation(t) => ("damp", g.target.to_string(), t.as_f64()),
                        GateKind::RotationY(t) => ("ry", g.target.to_string(), t.as_f64()),
                        GateKind::Hadamard => ("h", g.target.to_string(), 0.0),
                        GateKind::Not => ("x", g.target.to_string(), 0.0),
                        GateKind::Swap(o) => ("swap", format!("{},{}", g.target, o), 0.0),
                    };
                    let ctrls: Vec<String> = g
                        .controls
                        .iter()
                        .map(|c| format!("{}:{}", c.qubit, u8::from(c.value)))
                        .collect();
                    let _ = writeln!(out, "GATE {name} {target} [{}] {angle:e}", ctrls.join(","));
                }
                Instruction::Postselect(q) => {
                    let _ = writeln!(out, "POSTSELECT {q}");
                }
                Instruction::Transform(t) => {
                    let qs: Vec<String> = t.qubits.iter().map(|q| q.to_string()).collect();
                    let dir = if t.inverse { "inverse" } else { "forward" };
                    let _ = writeln!(out, "TRANSFORM {} {} {dir}", t.kind, qs.join(","));
                }
            }
        }
        out
    }

    pub fn from_listing(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::InvalidParameter(format!("listing line {line}: {msg}"));
        let mut circuit: Option<Self> = None;
        let mut ancillas = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let parse_q = |s: &str| s.parse::<usize>().map_err(|_| bad(line_no, "bad qubit index"));
            match parts[0] {
                "QUBITS" if parts.len() == 2 => circuit = Some(Self::new(parse_q(parts[1])?)),
                "ANCILLAS" if parts.len() == 2 => {
                    for q in parts[1].split(',') {
                        ancillas.push(parse_q(q)?);
                    }
                }
                "GATE" if parts.len() == 5 => {
                    let c = circuit.as_mut().ok_or_else(|| bad(line_no, "missing QUBITS header"))?;
                    let angle: f64 = parts[4].parse().map_err(|_| bad(line_no, "bad angle"))?;
                    let angle = T::lit(angle);
                    let mut targets = parts[2].split(',');
                    let target = parse_q(targets.next().unwrap_or(""))?;
                    let kind = match parts[1] {
                        "p" => GateKind::Phase(angle),
                        "damp" => GateKind::DampingRotation(angle),
                        "ry" => GateKind::RotationY(angle),
                        "h" => GateKind::Hadamard,
                        "x" => GateKind::Not,
                        "swap" => GateKind::Swap(parse_q(targets.next().unwrap_or(""))?),
                        _ => return Err(bad(line_no, "unknown gate kind")),
                    };
                    let inner = parts[3]
                        .strip_prefix('[')
                        .and_then(|s| s.strip_suffix(']'))
                        .ok_or_else(|| bad(line_no, "controls must be bracketed"))?;
                    let mut controls = Vec::new();
                    for item in inner.split(',').filter(|s| !s.is_empty()) {
                        let (q, v) = item.split_once(':').ok_or_else(|| bad(line_no, "control must be q:v"))?;
                        let value = match v {
                            "0" => false,
                            "1" => true,
                            _ => return Err(bad(line_no, "control value must be 0 or 1")),
                        };
                        controls.push(Control { qubit: parse_q(q)?, value });
                    }
                    c.push_gate(GateOp { kind, target, controls })?;
                }
                "POSTSELECT" if parts.len() == 2 => {
                    let c = circuit.as_mut().ok_or_else(|| bad(line_no, "missing QUBITS header"))?;
                    c.postselect(parse_q(parts[1])?)?;
                }
                "TRANSFORM" if parts.len() == 4 => {
                    let c = circuit.as_mut().ok_or_else(|| bad(line_no, "missing QUBITS header"))?;
                    let kind = match parts[1] {
                        "qct" => TransformKind::Cosine,
                        "qst" => TransformKind::Sine,
                        _ => return Err(bad(line_no, "unknown transform")),
                    };
                    let qubits = parts[2].split(',').map(parse_q).collect::<Result<Vec<_>>>()?;
                    let inverse = match parts[3] {
                        "forward" => false,
                        "inverse" => true,
                        _ => return Err(bad(line_no, "direction must be forward or inverse")),
                    };
                    c.push(Instruction::Transform(SpectralTransform { kind, qubits, inverse }))?;
                }
                _ => return Err(bad(line_no, "unrecognized instruction")),
            }
        }
        let mut c = circuit.ok_or_else(|| Error::InvalidParameter("listing has no QUBITS header".into()))?;
        for a in ancillas {
            c.add_ancilla(a)?;
        }
        Ok(c)
    }
}

/// Two-qubit cost of a gate with `k` controls: 1 for one control, and the
/// quadratic `2k² - 2k + 1` (5 for a doubly-controlled rotation) beyond.
pub fn controlled_cost(k: usize) -> usize {
    match k {
        0 => 0,
        1 => 1,
        k => 2 * k * k - 2 * k + 1,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub single_qubit: usize,
    /// Gates acting on two or more qubits, counted once each.
    pub multi_qubit: usize,
    /// Multi-controlled gates expanded into two-qubit gates.
    pub two_qubit_decomposed: usize,
    pub postselections: usize,
    pub transforms: usize,
}

impl<T: Real> QuantumState<T> {
    pub fn apply_circuit(&mut self, circuit: &Circuit<T>) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                got: circuit.n_qubits(),
            });
        }
        for op in circuit.ops() {
            match op {
                Instruction::Gate(g) => self.apply_gate(g)?,
                Instruction::Postselect(q) => {
                    self.project_ancilla_zero(*q)?;
                }
                Instruction::Transform(t) => apply_real_transform(self, t.kind, &t.qubits, t.inverse)?,
            }
        }
        Ok(())
    }
}
