use serde::Serialize;

use super::ansatz::{build_hierarchical_ansatz, AnsatzProgram};
use crate::error::{domain, Result};
use crate::sim::GateOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceCount {
    pub n_xx: usize,
    /// Depth with XX gates of a block packed into 1-factor rounds.
    pub depth_parallel: usize,
    /// Depth with XX gates of a block executed one at a time.
    pub depth_sequential: usize,
}

fn log2_exact(m: usize) -> Result<usize> {
    if m == 0 || !m.is_power_of_two() {
        return domain(format!("M must be a power of two, got {m}"));
    }
    Ok(m.trailing_zeros() as usize)
}

/// `32M² − 4M·log₂M − 20M`.
pub fn closed_form_n_xx(m: usize) -> Result<usize> {
    let l = log2_exact(m)?;
    Ok(32 * m * m - 4 * m * l - 20 * m)
}

/// `16M + 6·log₂M − 2`.
pub fn closed_form_depth_parallel(m: usize) -> Result<usize> {
    let l = log2_exact(m)?;
    Ok(16 * m + 6 * l - 2)
}

/// `(64M² − 24M + 24·log₂M + 20) / 3`.
pub fn closed_form_depth_sequential(m: usize) -> Result<usize> {
    let l = log2_exact(m)?;
    let num = 64 * m * m + 24 * l + 20 - 24 * m;
    debug_assert_eq!(num % 3, 0);
    Ok(num / 3)
}

pub fn closed_form_resources(m: usize) -> Result<ResourceCount> {
    Ok(ResourceCount {
        n_xx: closed_form_n_xx(m)?,
        depth_parallel: closed_form_depth_parallel(m)?,
        depth_sequential: closed_form_depth_sequential(m)?,
    })
}

/// Round-robin 1-factorization of the complete graph on `n` vertices:
/// `n − 1` perfect matchings for even `n`, `n` near-perfect ones for odd `n`.
pub fn one_factorization(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n < 2 {
        return Vec::new();
    }
    let even = if n % 2 == 0 { n } else { n + 1 };
    let rounds = even - 1;
    let mut out = Vec::with_capacity(rounds);
    for r in 0..rounds {
        let mut round = Vec::with_capacity(even / 2);
        // vertex even−1 is fixed, the others rotate
        let pivot = (r, even - 1);
        for (a, b) in std::iter::once(pivot).chain((1..even / 2).map(|i| ((r + i) % rounds, (r + rounds - i) % rounds))) {
            if a < n && b < n {
                round.push((a.min(b), a.max(b)));
            }
        }
        out.push(round);
    }
    out
}

/// ASAP schedule depth over qubit occupancy.
///
/// In parallel mode every maximal run of XX gates inside one unit layer is
/// reordered by 1-factor round before scheduling (XX gates commute). In
/// sequential mode each XX gate occupies the whole block.
fn schedule_depth(ansatz: &AnsatzProgram, parallel: bool) -> usize {
    let mut busy = vec![0usize; ansatz.num_qubits];
    let place = |qubits: &[usize], busy: &mut Vec<usize>| {
        let t = qubits.iter().map(|&q| busy[q]).max().unwrap_or(0) + 1;
        for &q in qubits {
            busy[q] = t;
        }
    };
    for block in &ansatz.blocks {
        let block_qubits: Vec<usize> = block.qubits.clone().collect();
        let gates = &ansatz.gates[block.gates.clone()];
        let mut i = 0;
        while i < gates.len() {
            match gates[i].op {
                GateOp::XX { .. } => {
                    let mut j = i;
                    let mut pairs = Vec::new();
                    while j < gates.len() {
                        if let GateOp::XX { q1, q2, .. } = gates[j].op {
                            pairs.push((q1.min(q2), q1.max(q2)));
                            j += 1;
                        } else {
                            break;
                        }
                    }
                    if parallel {
                        let base = block.qubits.start;
                        let rounds = one_factorization(block_qubits.len());
                        let round_of = |p: &(usize, usize)| {
                            rounds
                                .iter()
                                .position(|r| r.contains(&(p.0 - base, p.1 - base)))
                                .unwrap_or(usize::MAX)
                        };
                        pairs.sort_by_key(round_of);
                        for (a, b) in pairs {
                            place(&[a, b], &mut busy);
                        }
                    } else {
                        for _ in pairs {
                            place(&block_qubits, &mut busy);
                        }
                    }
                    i = j;
                }
                GateOp::RX { qubit, .. } | GateOp::RZ { qubit, .. } => {
                    place(&[qubit], &mut busy);
                    i += 1;
                }
                GateOp::PauliRotation { string, .. } => {
                    let qs: Vec<usize> = (0..ansatz.num_qubits).filter(|&q| string.axis(q) != 'I').collect();
                    place(&qs, &mut busy);
                    i += 1;
                }
            }
        }
    }
    busy.into_iter().max().unwrap_or(0)
}

/// Counts gates and schedules the given program.
pub fn count_resources(ansatz: &AnsatzProgram) -> ResourceCount {
    ResourceCount {
        n_xx: ansatz.count_xx(),
        depth_parallel: schedule_depth(ansatz, true),
        depth_sequential: schedule_depth(ansatz, false),
    }
}

/// Constructive counts of the standard hierarchy for `M` transmons.
pub fn constructive_resources(m: usize) -> Result<ResourceCount> {
    log2_exact(m)?;
    Ok(count_resources(&build_hierarchical_ansatz(m, 4, 2)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_transmon_values() {
        let c = closed_form_resources(1).unwrap();
        assert_eq!(c, ResourceCount { n_xx: 12, depth_parallel: 14, depth_sequential: 20 });
        assert_eq!(constructive_resources(1).unwrap(), c);
    }

    #[test]
    fn pair_values() {
        assert_eq!(closed_form_n_xx(2).unwrap(), 80);
        assert_eq!(closed_form_depth_parallel(2).unwrap(), 36);
        assert_eq!(closed_form_n_xx(8).unwrap(), 1792);
        assert_eq!(closed_form_n_xx(4).unwrap(), 400);
    }

    #[test]
    fn factorization_is_a_partition() {
        for n in 2..12 {
            let rounds = one_factorization(n);
            assert_eq!(rounds.len(), if n % 2 == 0 { n - 1 } else { n });
            let mut all: Vec<(usize, usize)> = rounds.iter().flatten().copied().collect();
            all.sort();
            let before = all.len();
            all.dedup();
            assert_eq!(before, all.len());
            assert_eq!(all.len(), n * (n - 1) / 2);
            for r in &rounds {
                let mut v: Vec<usize> = r.iter().flat_map(|&(a, b)| [a, b]).collect();
                v.sort();
                v.dedup();
                assert_eq!(v.len(), 2 * r.len());
            }
        }
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert!(closed_form_n_xx(3).is_err());
        assert!(constructive_resources(6).is_err());
    }
}
