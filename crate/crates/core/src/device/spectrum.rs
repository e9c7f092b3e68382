use nalgebra::DMatrix;
use num_complex::Complex;

use super::model::{build_single_hamiltonian, TransmonSpec};
use super::operator::DenseOperator;
use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::sim::StateVector;

/// Lowest eigenpairs of a Hamiltonian, ascending.
#[derive(Clone, Debug)]
pub struct SpectrumResult<T: Real = f64> {
    pub eigenvalues: Vec<T>,
    /// One column per eigenvalue.
    pub eigenvectors: DMatrix<Complex<T>>,
    pub labels: Option<Vec<String>>,
}

impl<T: Real> SpectrumResult<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex<T>> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    /// Eigenvector `i` as a state when the dimension is a power of two.
    pub fn state(&self, i: usize) -> Result<StateVector<T>> {
        StateVector::from_unnormalized(self.eigenvector(i))
    }
}

pub fn exact_spectrum<T: Real>(h: &DenseOperator<T>, k_levels: usize) -> Result<SpectrumResult<T>> {
    if k_levels > h.dim() {
        return domain(format!("requested {k_levels} levels from a {}-dimensional operator", h.dim()));
    }
    let herm = h.hermiticity_error();
    if herm > T::tol(1e-12) {
        return domain(format!("operator is not Hermitian (relative error {herm:e})"));
    }
    let (vals, vecs) = h.eigh();
    Ok(SpectrumResult {
        eigenvalues: vals[..k_levels].to_vec(),
        eigenvectors: vecs.columns(0, k_levels).into_owned(),
        labels: None,
    })
}

/// Uncoupled product state with its label (level digits, transmon 0 first).
#[derive(Clone, Debug)]
pub struct ProductState<T: Real = f64> {
    pub label: String,
    pub levels: Vec<usize>,
    /// Sum of single-transmon energies, GHz.
    pub energy: T,
    pub amplitudes: Vec<Complex<T>>,
}

pub fn level_label(levels: &[usize]) -> String {
    if levels.iter().all(|&l| l < 10) {
        levels.iter().map(|l| l.to_string()).collect()
    } else {
        levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Products of the lowest `levels_each` eigenstates of each isolated
/// transmon, ordered by uncoupled energy (ties by label).
pub fn uncoupled_product_states<T: Real>(
    transmons: &[TransmonSpec],
    d: usize,
    levels_each: usize,
) -> Result<Vec<ProductState<T>>> {
    if transmons.is_empty() {
        return domain("at least one transmon required");
    }
    let singles: Vec<SpectrumResult<T>> = transmons
        .iter()
        .map(|t| exact_spectrum(&build_single_hamiltonian::<T>(t, d)?, levels_each))
        .collect::<Result<_>>()?;
    let m = transmons.len();
    let mut out = Vec::new();
    let total = levels_each.pow(m as u32);
    for mut idx in 0..total {
        let mut levels = vec![0; m];
        for site in (0..m).rev() {
            levels[site] = idx % levels_each;
            idx /= levels_each;
        }
        let mut amps = vec![Complex::new(T::one(), T::zero())];
        let mut energy = T::zero();
        for (site, &l) in levels.iter().enumerate() {
            let v = singles[site].eigenvector(l);
            energy += singles[site].eigenvalues[l];
            amps = amps.iter().flat_map(|a| v.iter().map(move |b| *a * *b)).collect();
        }
        out.push(ProductState { label: level_label(&levels), levels, energy, amplitudes: amps });
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.label.cmp(&b.label)));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateLabel<T: Real = f64> {
    pub label: String,
    /// `|⟨product|eigenvector⟩|`, or the projector overlap for degenerate clusters.
    pub overlap: T,
    pub ambiguous: bool,
    /// All labels tied with the winner (within `1e-6`), or the cluster's labels.
    pub candidates: Vec<String>,
}

/// Relative gap below which eigenvalues are treated as one degenerate cluster.
const DEGENERACY_TOL: f64 = 1e-9;
const AMBIGUITY_TOL: f64 = 1e-6;

/// Labels each coupled eigenvector by the product state of maximal overlap.
///
/// Degenerate clusters are handled as subspaces: each product's weight is
/// its projection onto the whole cluster, the cluster receives its
/// best-matching products in order and every member is flagged ambiguous.
pub fn label_computational_states<T: Real>(
    coupled: &SpectrumResult<T>,
    products: &[ProductState<T>],
) -> Result<Vec<StateLabel<T>>> {
    if products.is_empty() {
        return domain("no product states to label against");
    }
    let dim = coupled.eigenvectors.nrows();
    if products.iter().any(|p| p.amplitudes.len() != dim) {
        return domain("product state dimension does not match the spectrum");
    }
    let n = coupled.len();
    let overlaps: Vec<Vec<Complex<T>>> = (0..n)
        .map(|i| {
            let v = coupled.eigenvectors.column(i);
            products
                .iter()
                .map(|p| p.amplitudes.iter().zip(v.iter()).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * *b))
                .collect()
        })
        .collect();
    let scale = coupled.eigenvalues.iter().fold(T::one(), |m, e| m.max(e.abs()));
    let deg = T::from_f64(DEGENERACY_TOL) * scale;
    let amb = T::from_f64(AMBIGUITY_TOL);

    let mut labels = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && coupled.eigenvalues[j] - coupled.eigenvalues[j - 1] <= deg {
            j += 1;
        }
        if j - i == 1 {
            let mags: Vec<T> = overlaps[i].iter().map(|z| z.norm()).collect();
            let best = (0..mags.len()).fold(0, |b, p| if mags[p] > mags[b] { p } else { b });
            let candidates: Vec<String> = (0..mags.len())
                .filter(|&p| mags[best] - mags[p] <= amb)
                .map(|p| products[p].label.clone())
                .collect();
            labels.push(StateLabel {
                label: products[best].label.clone(),
                overlap: mags[best],
                ambiguous: candidates.len() > 1,
                candidates,
            });
        } else {
            let weights: Vec<T> = (0..products.len())
                .map(|p| (i..j).map(|r| overlaps[r][p].norm_sqr()).sum::<T>().sqrt())
                .collect();
            let mut order: Vec<usize> = (0..products.len()).collect();
            order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
            let picked = &order[..(j - i).min(order.len())];
            let candidates: Vec<String> = picked.iter().map(|&p| products[p].label.clone()).collect();
            for r in 0..(j - i) {
                let p = picked[r.min(picked.len() - 1)];
                labels.push(StateLabel {
                    label: products[p].label.clone(),
                    overlap: weights[p],
                    ambiguous: true,
                    candidates: candidates.clone(),
                });
            }
        }
        i = j;
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_spectrum() {
        let h = DenseOperator::<f64>::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let s = exact_spectrum(&h, 2).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0]);
        assert!(exact_spectrum(&h, 4).is_err());
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = DenseOperator::<f64>::from_real_fn(2, |r, c| if r < c { 1.0 } else { 0.0 });
        assert!(exact_spectrum(&h, 1).is_err());
    }

    #[test]
    fn labels_multi_digit() {
        assert_eq!(level_label(&[1, 2]), "12");
        assert_eq!(level_label(&[10, 2]), "10,2");
    }
}
