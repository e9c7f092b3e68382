use std::ops::Range;

use crate::error::{domain, Result};
use crate::sim::{apply_gate, GateOp, StateVector};

/// Gate template whose angle is read from parameter slot `param`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnsatzGate {
    pub op: GateOp<f64>,
    pub param: usize,
}

/// One unit layer of one block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockInfo {
    pub qubits: Range<usize>,
    /// Hierarchy stage, 0 for the narrowest blocks.
    pub stage: usize,
    /// Unit-layer index within the block.
    pub layer: usize,
    pub gates: Range<usize>,
    pub params: Range<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzProgram {
    pub num_qubits: usize,
    pub gates: Vec<AnsatzGate>,
    pub blocks: Vec<BlockInfo>,
    pub num_parameters: usize,
}

/// Unordered qubit pairs of a block in canonical order `(0,1), (0,2), …, (k−2,k−1)`.
pub fn canonical_pairs(qubits: Range<usize>) -> Vec<(usize, usize)> {
    let q: Vec<usize> = qubits.collect();
    let mut out = Vec::with_capacity(q.len() * q.len().saturating_sub(1) / 2);
    for i in 0..q.len() {
        for j in i + 1..q.len() {
            out.push((q[i], q[j]));
        }
    }
    out
}

impl AnsatzProgram {
    fn empty(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new(), blocks: Vec::new(), num_parameters: 0 }
    }

    fn push(&mut self, op: GateOp<f64>) {
        self.gates.push(AnsatzGate { op, param: self.num_parameters });
        self.num_parameters += 1;
    }

    fn push_rotations(&mut self, qubits: Range<usize>) {
        for q in qubits {
            self.push(GateOp::RX { theta: 0.0, qubit: q });
            self.push(GateOp::RZ { theta: 0.0, qubit: q });
        }
    }

    fn push_unit_layer(&mut self, qubits: Range<usize>, stage: usize, layer: usize) {
        let (g0, p0) = (self.gates.len(), self.num_parameters);
        self.push_rotations(qubits.clone());
        for (a, b) in canonical_pairs(qubits.clone()) {
            self.push(GateOp::XX { theta: 0.0, q1: a, q2: b });
        }
        self.push_rotations(qubits.clone());
        self.blocks.push(BlockInfo { qubits, stage, layer, gates: g0..self.gates.len(), params: p0..self.num_parameters });
    }

    pub fn count_xx(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g.op, GateOp::XX { .. })).count()
    }

    pub fn count_single_qubit(&self) -> usize {
        self.gates.len() - self.count_xx()
    }

    /// Parameter slots per training group: all unit layers sharing
    /// `(stage, layer)`, in circuit order.
    pub fn layer_groups(&self) -> Vec<Vec<usize>> {
        let mut keys: Vec<(usize, usize)> = self.blocks.iter().map(|b| (b.stage, b.layer)).collect();
        keys.sort();
        keys.dedup();
        keys.iter()
            .map(|&(s, l)| {
                self.blocks
                    .iter()
                    .filter(|b| b.stage == s && b.layer == l)
                    .flat_map(|b| b.params.clone())
                    .collect()
            })
            .collect()
    }

    /// Parameter slots of all blocks in `stage` that act inside `qubits`.
    pub fn params_in(&self, stage: usize, qubits: Range<usize>) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| b.stage == stage && b.qubits.start >= qubits.start && b.qubits.end <= qubits.end)
            .flat_map(|b| b.params.clone())
            .collect()
    }

    /// Full parameter vector with stage-0 block `i` set to `per_block[i]` and
    /// every later stage at zero, so the circuit prepares a product state.
    pub fn embed_stage0(&self, per_block: &[&[f64]]) -> Result<Vec<f64>> {
        let starts: Vec<usize> = {
            let mut v: Vec<usize> = self.blocks.iter().filter(|b| b.stage == 0).map(|b| b.qubits.start).collect();
            v.dedup();
            v
        };
        if starts.len() != per_block.len() {
            return domain(format!("{} stage-0 blocks, got {} seeds", starts.len(), per_block.len()));
        }
        let mut out = vec![0.0; self.num_parameters];
        for (start, seed) in starts.iter().zip(per_block) {
            let slots: Vec<usize> = self
                .blocks
                .iter()
                .filter(|b| b.stage == 0 && b.qubits.start == *start)
                .flat_map(|b| b.params.clone())
                .collect();
            if slots.len() != seed.len() {
                return domain(format!("block at qubit {start} has {} parameters, seed has {}", slots.len(), seed.len()));
            }
            for (slot, v) in slots.into_iter().zip(seed.iter()) {
                out[slot] = *v;
            }
        }
        Ok(out)
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_parameters {
            return domain(format!("expected {} parameters, got {}", self.num_parameters, params.len()));
        }
        Ok(())
    }

    /// Gate `i` with its angle bound.
    pub fn bound_gate(&self, i: usize, params: &[f64]) -> GateOp<f64> {
        let g = &self.gates[i];
        g.op.with_theta(params[g.param])
    }

    /// Runs the circuit on `state` in place.
    pub fn apply(&self, params: &[f64], state: &mut StateVector<f64>) -> Result<()> {
        self.check_params(params)?;
        if state.num_qubits() != self.num_qubits {
            return domain(format!("ansatz has {} qubits, state has {}", self.num_qubits, state.num_qubits()));
        }
        for i in 0..self.gates.len() {
            apply_gate(state, &self.bound_gate(i, params))?;
        }
        Ok(())
    }

    /// Circuit output from `|0…0⟩`.
    pub fn prepare(&self, params: &[f64]) -> Result<StateVector<f64>> {
        let mut s = StateVector::zero_state(self.num_qubits);
        self.apply(params, &mut s)?;
        Ok(s)
    }
}

/// `num_unit_layers` unit layers on one block of `k_qubits`.
pub fn build_block_ansatz(k_qubits: usize, num_unit_layers: usize) -> Result<AnsatzProgram> {
    if k_qubits < 2 {
        return domain(format!("block ansatz needs at least 2 qubits, got {k_qubits}"));
    }
    if num_unit_layers == 0 {
        return domain("at least one unit layer required");
    }
    let mut a = AnsatzProgram::empty(k_qubits);
    for l in 0..num_unit_layers {
        a.push_unit_layer(0..k_qubits, 0, l);
    }
    Ok(a)
}

/// Blocks doubling in width each stage, `layers_per_stage` unit layers per block,
/// from one block per transmon up to a single block over all `M·q` qubits.
pub fn build_hierarchical_ansatz(
    m_transmons: usize,
    qubits_per_transmon: usize,
    layers_per_stage: usize,
) -> Result<AnsatzProgram> {
    if m_transmons == 0 || !m_transmons.is_power_of_two() {
        return domain(format!(
            "hierarchical ansatz needs a power-of-two transmon count, got {m_transmons}; pad the chain to the next power of two"
        ));
    }
    if qubits_per_transmon < 2 && m_transmons == 1 {
        return domain("a single transmon block needs at least 2 qubits");
    }
    if qubits_per_transmon == 0 || layers_per_stage == 0 {
        return domain("qubits per transmon and layers per stage must be positive");
    }
    let n = m_transmons * qubits_per_transmon;
    let mut a = AnsatzProgram::empty(n);
    let stages = m_transmons.trailing_zeros() as usize + 1;
    for s in 0..stages {
        let width = qubits_per_transmon << s;
        for start in (0..n).step_by(width) {
            for l in 0..layers_per_stage {
                a.push_unit_layer(start..start + width, s, l);
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_counts() {
        let a = build_block_ansatz(4, 1).unwrap();
        assert_eq!(a.count_xx(), 6);
        assert_eq!(a.count_single_qubit(), 16);
        assert_eq!(a.num_parameters, 22);
        assert_eq!(build_block_ansatz(4, 2).unwrap().count_xx(), 12);
        assert!(build_block_ansatz(1, 1).is_err());
        assert!(build_block_ansatz(4, 0).is_err());
    }

    #[test]
    fn every_slot_used_once() {
        let a = build_hierarchical_ansatz(4, 4, 2).unwrap();
        let mut seen = vec![0; a.num_parameters];
        for g in &a.gates {
            seen[g.param] += 1;
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn hierarchy_degenerates_to_block() {
        assert_eq!(build_hierarchical_ansatz(1, 4, 2).unwrap(), build_block_ansatz(4, 2).unwrap());
        assert!(build_hierarchical_ansatz(3, 4, 2).is_err());
    }

    #[test]
    fn two_transmon_layout() {
        let a = build_hierarchical_ansatz(2, 4, 2).unwrap();
        assert_eq!(a.count_xx(), 2 * 2 * 6 + 2 * 28);
        let stage0: Vec<_> = a.blocks.iter().filter(|b| b.stage == 0).map(|b| b.qubits.clone()).collect();
        assert_eq!(stage0, vec![0..4, 0..4, 4..8, 4..8]);
        assert_eq!(a.params_in(0, 0..4).len(), 44);
        assert_eq!(a.layer_groups().len(), 4);
    }
}
