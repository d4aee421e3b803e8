//! Qubit-level assembly of the acceptance circuit and the walk operator, with a statevector
//! simulator to check them against the matrix-level operators.
//!
//! Qubit `q` is bit `q` of the statevector index. The layout for state registers of `m` qubits
//! is: qubit 0 the phase-kickback ancilla, qubit 1 the flag ancilla, then `r4, r3, r2, r1`
//! (each little-endian), then the Hermitianization qubit on top. With this order the
//! statevector index equals the matrix-level index on `[herm, r1, r2, r3, r4, flag, acc]`.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use faer::c64;
use serde::Serialize;
use serde_json::json;

use crate::chain::AcceptanceMatrix;
use crate::walk::{oracles, MhWalk, Operator, Registers};
use crate::{Error, Execution, Result};

const PRUNE: f64 = 1e-15;

fn re(v: f64) -> c64 {
    c64::new(v, 0.0)
}

/// Contiguous block of qubits holding one state register, least significant first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QReg {
    pub offset: usize,
    pub width: usize,
}

impl QReg {
    pub fn qubits(self) -> impl Iterator<Item = usize> {
        self.offset..self.offset + self.width
    }

    fn zero_pattern(self) -> Vec<(usize, bool)> {
        self.qubits().map(|q| (q, false)).collect()
    }
}

/// Register layout of the walk: `4m + 3` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    pub m: usize,
}

impl RegisterLayout {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    pub fn total_qubits(self) -> usize {
        4 * self.m + 3
    }

    pub fn acc(self) -> usize {
        0
    }

    pub fn flag(self) -> usize {
        1
    }

    /// State register `k` in `1..=4`.
    pub fn reg(self, k: usize) -> QReg {
        assert!((1..=4).contains(&k));
        QReg { offset: 2 + (4 - k) * self.m, width: self.m }
    }

    pub fn herm(self) -> usize {
        4 * self.m + 2
    }
}

#[derive(Clone, Debug)]
pub enum Gate {
    X(usize),
    H(usize),
    /// `diag(1, e^{iθ})`.
    Phase { qubit: usize, theta: f64 },
    /// Bitwise `target ^= control`.
    Cnot { control: QReg, target: QReg },
    /// Flip `target` when every control qubit has the given value.
    Mcx { controls: Vec<(usize, bool)>, target: usize },
    /// Swap two registers when the control qubit has the given value.
    Cswap { control: (usize, bool), a: QReg, b: QReg },
    Swap { a: QReg, b: QReg },
    /// `unitary` on the qubits `targets` (least significant first) when the controls hold.
    CtrlU { label: String, controls: Vec<(usize, bool)>, targets: Vec<usize>, unitary: Arc<Operator> },
}

fn bit(i: usize, q: usize) -> bool {
    (i >> q) & 1 == 1
}

fn controls_hold(i: usize, controls: &[(usize, bool)]) -> bool {
    controls.iter().all(|&(q, v)| bit(i, q) == v)
}

fn read(i: usize, r: QReg) -> usize {
    (i >> r.offset) & ((1 << r.width) - 1)
}

fn write(i: usize, r: QReg, v: usize) -> usize {
    let mask = ((1 << r.width) - 1) << r.offset;
    (i & !mask) | (v << r.offset)
}

fn swap_regs(i: usize, a: QReg, b: QReg) -> usize {
    let (va, vb) = (read(i, a), read(i, b));
    write(write(i, a, vb), b, va)
}

impl Gate {
    /// Image of basis state `i` as `(index, amplitude)` pairs, pushed onto `out`.
    pub fn act(&self, i: usize, amp: c64, out: &mut Vec<(usize, c64)>) {
        let h = 0.5f64.sqrt();
        match self {
            Gate::X(q) => out.push((i ^ (1 << q), amp)),
            Gate::H(q) => {
                let lo = i & !(1 << q);
                let sign = if bit(i, *q) { -h } else { h };
                out.push((lo, amp * h));
                out.push((lo | (1 << q), amp * sign));
            }
            Gate::Phase { qubit, theta } => {
                out.push((i, if bit(i, *qubit) { amp * c64::from_polar(1.0, *theta) } else { amp }))
            }
            Gate::Cnot { control, target } => out.push((write(i, *target, read(i, *target) ^ read(i, *control)), amp)),
            Gate::Mcx { controls, target } => {
                out.push((if controls_hold(i, controls) { i ^ (1 << target) } else { i }, amp))
            }
            Gate::Cswap { control: (q, v), a, b } => {
                out.push((if bit(i, *q) == *v { swap_regs(i, *a, *b) } else { i }, amp))
            }
            Gate::Swap { a, b } => out.push((swap_regs(i, *a, *b), amp)),
            Gate::CtrlU { controls, targets, unitary, .. } => {
                if !controls_hold(i, controls) {
                    out.push((i, amp));
                    return;
                }
                let mut local = 0;
                let mut base = i;
                for (k, &q) in targets.iter().enumerate() {
                    if bit(i, q) {
                        local |= 1 << k;
                        base &= !(1 << q);
                    }
                }
                for &(l, a) in unitary.column(local) {
                    let mut j = base;
                    for (k, &q) in targets.iter().enumerate() {
                        if (l >> k) & 1 == 1 {
                            j |= 1 << q;
                        }
                    }
                    out.push((j, a * amp));
                }
            }
        }
    }

    pub fn adjoint(&self) -> Gate {
        match self {
            Gate::Phase { qubit, theta } => Gate::Phase { qubit: *qubit, theta: -theta },
            Gate::CtrlU { label, controls, targets, unitary } => Gate::CtrlU {
                label: match label.strip_suffix('†') {
                    Some(base) => base.to_string(),
                    None => format!("{label}†"),
                },
                controls: controls.clone(),
                targets: targets.clone(),
                unitary: Arc::new(unitary.adjoint()),
            },
            g => g.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Gate::X(_) => "x",
            Gate::H(_) => "h",
            Gate::Phase { .. } => "phase",
            Gate::Cnot { .. } => "cnot_block",
            Gate::Mcx { .. } => "mcx",
            Gate::Cswap { .. } => "cswap",
            Gate::Swap { .. } => "swap",
            Gate::CtrlU { .. } => "ctrl_u",
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X(q) | Gate::H(q) | Gate::Phase { qubit: q, .. } => vec![*q],
            Gate::Cnot { control, target } => control.qubits().chain(target.qubits()).collect(),
            Gate::Mcx { controls, target } => controls.iter().map(|c| c.0).chain([*target]).collect(),
            Gate::Cswap { control, a, b } => [control.0].into_iter().chain(a.qubits()).chain(b.qubits()).collect(),
            Gate::Swap { a, b } => a.qubits().chain(b.qubits()).collect(),
            Gate::CtrlU { controls, targets, .. } => controls.iter().map(|c| c.0).chain(targets.iter().copied()).collect(),
        }
    }

    fn params(&self) -> serde_json::Value {
        match self {
            Gate::Phase { theta, .. } => json!({ "theta": theta }),
            Gate::Cnot { control, target } => json!({ "control": control.offset, "target": target.offset, "width": control.width }),
            Gate::Mcx { controls, .. } => json!({ "pattern": controls.iter().map(|c| c.1 as u8).collect::<Vec<_>>() }),
            Gate::Cswap { control, a, .. } => json!({ "control_value": control.1 as u8, "width": a.width }),
            Gate::Swap { a, .. } => json!({ "width": a.width }),
            Gate::CtrlU { label, controls, targets, .. } => json!({
                "label": label,
                "controls": controls.len(),
                "pattern": controls.iter().map(|c| c.1 as u8).collect::<Vec<_>>(),
                "targets": targets.len(),
            }),
            _ => json!({}),
        }
    }
}

#[derive(Serialize)]
struct GateRecord<'a> {
    kind: &'a str,
    qubits: Vec<usize>,
    params: serde_json::Value,
}

/// Gates applied in order, first gate first.
#[derive(Clone, Debug)]
pub struct GateSequence {
    pub qubits: usize,
    pub gates: Vec<Gate>,
}

impl GateSequence {
    pub fn new(qubits: usize) -> Self {
        Self { qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.qubits) {
            return Err(Error::LayoutMismatch(format!("qubit {q} outside a {}-qubit register", self.qubits)));
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn append(&mut self, other: &GateSequence) -> Result<()> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    pub fn adjoint(&self) -> GateSequence {
        GateSequence { qubits: self.qubits, gates: self.gates.iter().rev().map(Gate::adjoint).collect() }
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    /// Dense statevector simulation.
    pub fn apply(&self, psi: &[c64]) -> Result<Vec<c64>> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: psi.len() });
        }
        let mut state = psi.to_vec();
        let mut buf = Vec::new();
        for g in &self.gates {
            let mut next = vec![re(0.0); state.len()];
            for (i, &a) in state.iter().enumerate() {
                if a == re(0.0) {
                    continue;
                }
                buf.clear();
                g.act(i, a, &mut buf);
                for &(j, b) in &buf {
                    next[j] += b;
                }
            }
            state = next;
        }
        Ok(state)
    }

    /// Simulation on a state stored as sorted `(index, amplitude)` pairs.
    pub fn apply_sparse(&self, state: &[(usize, c64)]) -> Vec<(usize, c64)> {
        let mut cur = state.to_vec();
        let mut buf = Vec::new();
        for g in &self.gates {
            buf.clear();
            for &(i, a) in &cur {
                g.act(i, a, &mut buf);
            }
            let mut merged: BTreeMap<usize, c64> = BTreeMap::new();
            for &(j, b) in &buf {
                *merged.entry(j).or_insert(re(0.0)) += b;
            }
            cur = merged.into_iter().filter(|(_, v)| v.norm() > PRUNE).collect();
        }
        cur
    }

    /// The operator of the whole sequence restricted to the given input columns.
    pub fn columns(&self, inputs: &[usize], exec: Execution) -> Vec<Vec<(usize, c64)>> {
        exec.map(inputs, |&j| self.apply_sparse(&[(j, re(1.0))]))
    }

    pub fn to_operator(&self, exec: Execution) -> Operator {
        let all: Vec<usize> = (0..self.dim()).collect();
        let cols = self.columns(&all, exec);
        let mut it = cols.into_iter();
        Operator::from_columns(self.dim(), self.dim(), |_| it.next().expect("one column per input"))
    }

    /// Number of applications of each labelled oracle.
    pub fn oracle_calls(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for g in &self.gates {
            if let Gate::CtrlU { label, .. } = g {
                *out.entry(label.clone()).or_insert(0) += 1;
            }
        }
        out
    }

    /// One JSON object `{kind, qubits, params}` per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for g in &self.gates {
            let rec = GateRecord { kind: g.kind(), qubits: g.qubits(), params: g.params() };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

fn check_dim(n: usize, m: usize) -> Result<()> {
    if n != 1 << m {
        return Err(Error::LayoutMismatch(format!("{n} states do not fill {m}-qubit registers")));
    }
    Ok(())
}

fn oracle_gate(label: &str, unitary: &Arc<Operator>, controls: Vec<(usize, bool)>, regs: &[QReg], extra: &[usize]) -> Gate {
    // local index `[regs[0], regs[1], .., extra]` with the last listed part least significant
    let mut targets: Vec<usize> = extra.to_vec();
    for r in regs.iter().rev() {
        targets.extend(r.qubits());
    }
    Gate::CtrlU { label: label.to_string(), controls, targets, unitary: unitary.clone() }
}

/// Gates of `O_𝒜` on registers `(ra, rb, rc)` with flag qubit `flag`.
fn push_o_cal_a(seq: &mut GateSequence, o_a: &Arc<Operator>, ra: QReg, rb: QReg, rc: QReg, flag: usize) -> Result<()> {
    // flip the flag when ra = rb
    seq.push(Gate::Cnot { control: ra, target: rb })?;
    seq.push(Gate::Mcx { controls: rb.zero_pattern(), target: flag })?;
    seq.push(Gate::Cnot { control: ra, target: rb })?;
    seq.push(Gate::Cswap { control: (flag, true), a: rb, b: rc })?;
    // O_A on (ra, rb) with the flag as coin, when rc = ra
    seq.push(Gate::Cnot { control: ra, target: rc })?;
    seq.push(oracle_gate("O_A", o_a, rc.zero_pattern(), &[ra, rb], &[flag]))?;
    seq.push(Gate::Cnot { control: ra, target: rc })?;
    seq.push(Gate::Cswap { control: (flag, false), a: rb, b: rc })?;
    // flip the flag when ra = rc
    seq.push(Gate::Cnot { control: ra, target: rc })?;
    seq.push(Gate::Mcx { controls: rc.zero_pattern(), target: flag })?;
    seq.push(Gate::Cnot { control: ra, target: rc })?;
    Ok(())
}

/// `O_𝒜` alone on `3m + 1` qubits: flag on qubit 0, then `r3, r2, r1`, so that the index
/// matches the matrix-level `[r1, r2, r3, flag]`.
pub fn assemble_o_cal_a(m: usize, o_a: &Operator) -> Result<GateSequence> {
    if o_a.nrows() != 2 << (2 * m) {
        return Err(Error::LayoutMismatch(format!("O_A of dimension {} on {m}-qubit registers", o_a.nrows())));
    }
    let r = |k: usize| QReg { offset: 1 + (3 - k) * m, width: m };
    let mut seq = GateSequence::new(3 * m + 1);
    push_o_cal_a(&mut seq, &Arc::new(o_a.clone()), r(1), r(2), r(3), 0)?;
    Ok(seq)
}

/// `O` on the walk layout.
pub fn assemble_o(layout: RegisterLayout, o_t: &Arc<Operator>, o_a: &Arc<Operator>) -> Result<GateSequence> {
    let (r1, r3, r4) = (layout.reg(1), layout.reg(3), layout.reg(4));
    let mut seq = GateSequence::new(layout.total_qubits());
    seq.push(oracle_gate("O_T", o_t, vec![], &[r1, r3], &[]))?;
    seq.push(Gate::Cnot { control: r1, target: r4 })?;
    push_o_cal_a(&mut seq, o_a, r1, r3, r4, layout.flag())?;
    Ok(seq)
}

/// `O⋆` on the walk layout.
pub fn assemble_o_star(layout: RegisterLayout, o_t: &Arc<Operator>, o_a: &Arc<Operator>) -> Result<GateSequence> {
    let (r1, r2, r3, r4) = (layout.reg(1), layout.reg(2), layout.reg(3), layout.reg(4));
    let mut seq = GateSequence::new(layout.total_qubits());
    seq.push(Gate::Cnot { control: r1, target: r3 })?;
    push_o_cal_a(&mut seq, o_a, r1, r2, r3, layout.flag())?;
    seq.push(Gate::Swap { a: r2, b: r3 })?;
    seq.push(Gate::Cnot { control: r1, target: r2 })?;
    seq.push(Gate::Cnot { control: r3, target: r2 })?;
    seq.push(oracle_gate("O_T", o_t, vec![], &[r3, r4], &[]))?;
    Ok(seq)
}

/// `|b̄⟩⟨b̄| ⊗ 1 + |b⟩⟨b| ⊗ (2Π - 1)` with `Π` projecting `r3, r4, flag` onto zero, by phase
/// kickback on the acc qubit.
fn push_zero_reflection(seq: &mut GateSequence, layout: RegisterLayout, herm_value: bool) -> Result<()> {
    let acc = layout.acc();
    let herm = (layout.herm(), herm_value);
    let mut zero: Vec<(usize, bool)> = vec![herm];
    zero.extend(layout.reg(3).zero_pattern());
    zero.extend(layout.reg(4).zero_pattern());
    zero.push((layout.flag(), false));
    seq.push(Gate::X(acc))?;
    seq.push(Gate::H(acc))?;
    seq.push(Gate::Mcx { controls: vec![herm], target: acc })?;
    seq.push(Gate::Mcx { controls: zero, target: acc })?;
    seq.push(Gate::H(acc))?;
    seq.push(Gate::X(acc))?;
    Ok(())
}

/// `W = (2⊠⊠† - 1)(X ⊗ S)` on `4m + 3` qubits.
pub fn assemble_w(m: usize, walk: &MhWalk) -> Result<GateSequence> {
    check_dim(walk.n, m)?;
    assemble_w_with(RegisterLayout::new(m), &Arc::new(walk.o_t.clone()), &Arc::new(walk.o_a.clone()))
}

/// [`assemble_w`] from the two oracles alone.
pub fn assemble_w_with(layout: RegisterLayout, o_t: &Arc<Operator>, o_a: &Arc<Operator>) -> Result<GateSequence> {
    let n = 1usize << layout.m;
    if o_t.nrows() != n * n || o_a.nrows() != 2 * n * n {
        return Err(Error::LayoutMismatch(format!("oracles do not act on {}-qubit registers", layout.m)));
    }
    let o = assemble_o(layout, o_t, o_a)?;
    let o_star = assemble_o_star(layout, o_t, o_a)?;

    let mut seq = GateSequence::new(layout.total_qubits());
    seq.push(Gate::X(layout.herm()))?;
    seq.push(Gate::Swap { a: layout.reg(1), b: layout.reg(3) })?;
    seq.push(Gate::Swap { a: layout.reg(2), b: layout.reg(4) })?;
    seq.append(&o_star.adjoint())?;
    push_zero_reflection(&mut seq, layout, false)?;
    seq.append(&o_star)?;
    seq.append(&o.adjoint())?;
    push_zero_reflection(&mut seq, layout, true)?;
    seq.append(&o)?;
    Ok(seq)
}

/// Oracle applications in one step of the walk. They do not depend on the oracles' contents.
pub fn walk_oracle_calls() -> BTreeMap<String, usize> {
    let layout = RegisterLayout::new(1);
    assemble_w_with(layout, &Arc::new(Operator::identity(4)), &Arc::new(Operator::identity(8)))
        .expect("single-qubit layout")
        .oracle_calls()
}

/// The matrix-level operator that [`assemble_w`] realizes on the full register
/// `[herm, r1, r2, r3, r4, flag, acc]`, composed from the matrix-level `O` and `O⋆`.
pub fn matrix_level_w_full(walk: &MhWalk) -> Operator {
    let n = walk.n;
    let space = Registers::new(&[2, n, n, n, n, 2, 2]);
    let steps = oracles::step_space(n);
    let u = Operator::basis_map(&space, |d| {
        d[0] ^= 1;
        d.swap(1, 3);
        d.swap(2, 4);
    });
    let embed = |op: &Operator| Operator::embed(&space, op, &steps, &[1, 2, 3, 4, 5]);
    let reflect = |b: usize| {
        Operator::from_columns(space.size(), space.size(), |j| {
            let d = space.decode(j);
            let in_pi = d[3] == 0 && d[4] == 0 && d[5] == 0;
            // the kickback qubit only acts when it starts in |0⟩
            let sign = if d[0] == b && d[6] == 0 && !in_pi { -1.0 } else { 1.0 };
            vec![(j, re(sign))]
        })
    };
    let o = embed(&walk.o);
    let o_star = embed(&walk.o_star);
    u.then(&o_star.adjoint())
        .then(&reflect(0))
        .then(&o_star)
        .then(&o.adjoint())
        .then(&reflect(1))
        .then(&o)
}

/// Indices of the walk layout with `flag = acc = 0`, in matrix-level order of `W`.
pub fn walk_block_inputs(m: usize) -> Vec<usize> {
    (0..2usize << (4 * m)).map(|k| k << 2).collect()
}

/// `O_A = S H (⊕ e^{iθ(x,y) Z}) H S†` on the coin, `θ = -asin(sqrt(A))`, on `2m + 1` qubits with
/// the coin on qubit 0.
pub fn diagonalize_o_a(m: usize, a: &AcceptanceMatrix) -> Result<GateSequence> {
    check_dim(a.n(), m)?;
    let n = a.n();
    let diag = Operator::from_columns(2 * n * n, 2 * n * n, |j| {
        let th = oracles::acceptance_angle(a.get(j / 2 / n, (j / 2) % n));
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        vec![(j, c64::from_polar(1.0, sign * th))]
    });
    let x = QReg { offset: 1 + m, width: m };
    let y = QReg { offset: 1, width: m };
    let mut seq = GateSequence::new(2 * m + 1);
    seq.push(Gate::Phase { qubit: 0, theta: -std::f64::consts::FRAC_PI_2 })?;
    seq.push(Gate::H(0))?;
    seq.push(oracle_gate("exp(iθZ)", &Arc::new(diag), vec![], &[x, y], &[0]))?;
    seq.push(Gate::H(0))?;
    seq.push(Gate::Phase { qubit: 0, theta: std::f64::consts::FRAC_PI_2 })?;
    Ok(seq)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRow {
    pub construction: &'static str,
    pub state_space: String,
    pub move_register: String,
    pub ancilla: String,
    pub total: String,
    /// Evaluated total for the given `m`, where the formula depends on `m` alone.
    pub qubits: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QubitAudit {
    pub m: usize,
    pub rows: Vec<AuditRow>,
}

impl QubitAudit {
    pub fn walk_qubits(&self) -> usize {
        self.rows[0].qubits.expect("walk row is evaluated")
    }

    pub fn cswap_qubits(&self) -> usize {
        self.rows[1].qubits.expect("cswap row is evaluated")
    }
}

/// Logical qubit counts of the constructions, with two literature rows kept as formulas.
pub fn qubit_audit(m: usize) -> QubitAudit {
    let row = |construction, s: &str, mv: &str, anc: &str, total: &str, qubits| AuditRow {
        construction,
        state_space: s.into(),
        move_register: mv.into(),
        ancilla: anc.into(),
        total: total.into(),
        qubits,
    };
    QubitAudit {
        m,
        rows: vec![
            row("dual kernel qubitized walk", "4m", "0", "3", "4m+3", Some(4 * m + 3)),
            row("controlled-SWAP encoding", "2m", "0", "1", "2m+1", Some(2 * m + 1)),
            row("isometric circuit with unary move register", "m", "N", "N+2", "2N+m+2", None),
            row("continuous-space Langevin walk", "2pd", "0", "3pd+d_u", "5pd+d_u", None),
        ],
    }
}

/// Qubits touched by a sequence, checked against the walk layout.
pub fn audit_sequence(seq: &GateSequence, m: usize) -> Result<usize> {
    let expected = RegisterLayout::new(m).total_qubits();
    if seq.qubits != expected {
        return Err(Error::LayoutMismatch(format!("{} qubits, layout has {expected}", seq.qubits)));
    }
    Ok(seq.qubits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sequence_is_identity() {
        let seq = GateSequence::new(2);
        let psi: Vec<c64> = (0..4).map(|k| c64::new(k as f64, 1.0)).collect();
        assert_eq!(seq.apply(&psi).unwrap(), psi);
    }

    #[test]
    fn x_on_qubit_zero() {
        let mut seq = GateSequence::new(3);
        seq.push(Gate::X(0)).unwrap();
        let mut psi = vec![re(0.0); 8];
        psi[0] = re(1.0);
        assert_eq!(seq.apply(&psi).unwrap()[1], re(1.0));
        assert!(seq.push(Gate::X(3)).is_err());
    }

    #[test]
    fn cnot_block_copies() {
        let (a, b) = (QReg { offset: 0, width: 2 }, QReg { offset: 2, width: 2 });
        let mut seq = GateSequence::new(4);
        seq.push(Gate::Cnot { control: a, target: b }).unwrap();
        for x in 0..4 {
            let out = seq.apply_sparse(&[(x, re(1.0))]);
            assert_eq!(out, vec![(x | (x << 2), re(1.0))]);
        }
    }

    #[test]
    fn phase_and_adjoint() {
        let mut seq = GateSequence::new(1);
        seq.push(Gate::H(0)).unwrap();
        seq.push(Gate::Phase { qubit: 0, theta: 0.3 }).unwrap();
        let mut both = seq.clone();
        both.append(&seq.adjoint()).unwrap();
        let out = both.apply(&[re(1.0), re(0.0)]).unwrap();
        assert!((out[0] - re(1.0)).norm() < 1e-15 && out[1].norm() < 1e-15);
    }

    #[test]
    fn audit_formulas() {
        assert_eq!(qubit_audit(6).walk_qubits(), 27);
        assert_eq!(qubit_audit(6).cswap_qubits(), 13);
        assert_eq!(qubit_audit(1).walk_qubits(), 7);
    }

    #[test]
    fn jsonl_lines() {
        let mut seq = GateSequence::new(2);
        seq.push(Gate::H(1)).unwrap();
        seq.push(Gate::Mcx { controls: vec![(1, false)], target: 0 }).unwrap();
        let mut buf = Vec::new();
        seq.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], r#"{"kind":"h","qubits":[1],"params":{}}"#);
        assert_eq!(lines[1], r#"{"kind":"mcx","qubits":[1,0],"params":{"pattern":[0]}}"#);
    }
}
