use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::constants::E2_OVER_H_GHZ_FF;
use super::operator::{lift_to_site, DenseOperator};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Largest tensor-product dimension the dense builders will allocate.
pub const MAX_DENSE_DIM: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransmonSpec {
    /// `E_J / h` in GHz.
    pub josephson_energy: f64,
    /// `C_sh + C_J` in fF.
    pub total_capacitance: f64,
    /// Normalized external flux `Φ_ext / Φ0`.
    pub flux: f64,
}

impl TransmonSpec {
    pub fn new(josephson_energy: f64, total_capacitance: f64, flux: f64) -> Result<Self> {
        let s = Self { josephson_energy, total_capacitance, flux };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.josephson_energy > 0.0) || !self.josephson_energy.is_finite() {
            return domain(format!("josephson energy must be positive, got {}", self.josephson_energy));
        }
        if !(self.total_capacitance > 0.0) || !self.total_capacitance.is_finite() {
            return domain(format!("total capacitance must be positive, got {}", self.total_capacitance));
        }
        if !self.flux.is_finite() {
            return domain("flux must be finite");
        }
        Ok(())
    }

    pub fn with_flux(&self, flux: f64) -> Self {
        Self { flux, ..*self }
    }

    /// `2·E_J·|cos(2πf)|` in GHz, the coefficient of `cos φ̂`.
    pub fn effective_josephson_ghz(&self) -> f64 {
        2.0 * self.josephson_energy * (2.0 * std::f64::consts::PI * self.flux).cos().abs()
    }

    pub fn charging_energy_ghz(&self) -> Result<f64> {
        charging_energy(self.total_capacitance)
    }
}

/// Extra capacitance between two arbitrary nodes, in fF.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtraCapacitance {
    pub i: usize,
    pub j: usize,
    pub capacitance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub transmons: Vec<TransmonSpec>,
    /// One entry per adjacent pair, fF.
    pub coupling_capacitances: Vec<f64>,
    #[serde(default)]
    pub extra_capacitances: Vec<ExtraCapacitance>,
}

impl ChainSpec {
    pub fn new(transmons: Vec<TransmonSpec>, coupling_capacitances: Vec<f64>) -> Result<Self> {
        let s = Self { transmons, coupling_capacitances, extra_capacitances: Vec::new() };
        s.validate()?;
        Ok(s)
    }

    pub fn single(t: TransmonSpec) -> Self {
        Self { transmons: vec![t], coupling_capacitances: Vec::new(), extra_capacitances: Vec::new() }
    }

    pub fn pair(a: TransmonSpec, b: TransmonSpec, coupling: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![coupling])
    }

    pub fn len(&self) -> usize {
        self.transmons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmons.is_empty()
    }

    pub fn with_fluxes(&self, fluxes: &[f64]) -> Self {
        let mut s = self.clone();
        for (t, &f) in s.transmons.iter_mut().zip(fluxes) {
            t.flux = f;
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.transmons.is_empty() {
            return domain("a chain needs at least one transmon");
        }
        for t in &self.transmons {
            t.validate()?;
        }
        let m = self.transmons.len();
        if self.coupling_capacitances.len() != m - 1 {
            return domain(format!(
                "{} transmons need {} coupling capacitances, got {}",
                m,
                m - 1,
                self.coupling_capacitances.len()
            ));
        }
        if let Some(c) = self.coupling_capacitances.iter().find(|c| !(**c >= 0.0) || !c.is_finite()) {
            return domain(format!("coupling capacitance must be non-negative, got {c}"));
        }
        for e in &self.extra_capacitances {
            if e.i >= m || e.j >= m || e.i == e.j {
                return domain(format!("extra capacitance between invalid nodes ({}, {})", e.i, e.j));
            }
            if !(e.capacitance >= 0.0) || !e.capacitance.is_finite() {
                return domain(format!("extra capacitance must be non-negative, got {}", e.capacitance));
            }
        }
        Ok(())
    }

    /// `(2e²/h)·C⁻¹` in GHz: the coefficient matrix of `N̂_i N̂_j`.
    pub fn charge_coupling_ghz(&self) -> Result<DMatrix<f64>> {
        let c = capacitance_matrix(self)?;
        let inv = c.try_inverse().ok_or_else(|| Error::Model("capacitance matrix is singular".into()))?;
        Ok(inv * (2.0 * E2_OVER_H_GHZ_FF))
    }
}

/// `E_C / h = e² / (2C·h)` in GHz for `C` in fF.
pub fn charging_energy(total_capacitance: f64) -> Result<f64> {
    if !(total_capacitance > 0.0) || !total_capacitance.is_finite() {
        return domain(format!("capacitance must be positive, got {total_capacitance}"));
    }
    Ok(E2_OVER_H_GHZ_FF / (2.0 * total_capacitance))
}

fn check_truncation(d: usize) -> Result<()> {
    if d < 2 || !d.is_power_of_two() {
        return domain(format!("truncation must be 2^k with k >= 1, got {d}"));
    }
    Ok(())
}

/// `diag(n − d/2)` for `n = 0..d`.
pub fn number_operator<T: Real>(d: usize) -> Result<DenseOperator<T>> {
    check_truncation(d)?;
    let half = (d / 2) as f64;
    let diag: Vec<T> = (0..d).map(|n| T::from_f64(n as f64 - half)).collect();
    Ok(DenseOperator::from_real_diagonal(&diag))
}

/// `(|n⟩⟨n+1| + |n+1⟩⟨n|) / 2`.
pub fn cosine_phase_operator<T: Real>(d: usize) -> Result<DenseOperator<T>> {
    check_truncation(d)?;
    let half = T::from_f64(0.5);
    Ok(DenseOperator::from_real_fn(d, |r, c| if r.abs_diff(c) == 1 { half } else { T::zero() }))
}

/// Node capacitance matrix in fF; errors if it is not positive definite.
pub fn capacitance_matrix(spec: &ChainSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let m = spec.len();
    let mut c = DMatrix::<f64>::zeros(m, m);
    for (i, t) in spec.transmons.iter().enumerate() {
        c[(i, i)] = t.total_capacitance;
    }
    let mut couple = |i: usize, j: usize, cap: f64| {
        c[(i, i)] += cap;
        c[(j, j)] += cap;
        c[(i, j)] -= cap;
        c[(j, i)] -= cap;
    };
    for (i, &cap) in spec.coupling_capacitances.iter().enumerate() {
        couple(i, i + 1, cap);
    }
    for e in &spec.extra_capacitances {
        couple(e.i, e.j, e.capacitance);
    }
    let eig = nalgebra::SymmetricEigen::new(c.clone());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::Model(format!("capacitance matrix is not positive definite (eigenvalue {min:e} fF)")));
    }
    Ok(c)
}

/// `H/h = 4E_C·N̂² − 2E_J|cos 2πf|·cos φ̂`.
pub fn build_single_hamiltonian<T: Real>(spec: &TransmonSpec, d: usize) -> Result<DenseOperator<T>> {
    spec.validate()?;
    let ec = charging_energy(spec.total_capacitance)?;
    let n = number_operator::<T>(d)?;
    let cos = cosine_phase_operator::<T>(d)?;
    Ok(n.matmul(&n).scale(T::from_f64(4.0 * ec)).sub(&cos.scale(T::from_f64(spec.effective_josephson_ghz()))))
}

/// Closed-form pair Hamiltonian for transmons sharing `C_Σ`:
/// `4E_C/(1+ξ)·(N̂₁² + N̂₂² + 2ξN̂₁N̂₂) − Σ 2E_J|cos|·cos φ̂`, `ξ = C_c/(C_c + C_Σ)`.
pub fn build_two_hamiltonian<T: Real>(
    spec1: &TransmonSpec,
    spec2: &TransmonSpec,
    coupling_cap: f64,
    d_each: usize,
) -> Result<DenseOperator<T>> {
    spec1.validate()?;
    spec2.validate()?;
    if spec1.total_capacitance != spec2.total_capacitance {
        return domain(format!(
            "closed-form pair Hamiltonian needs equal total capacitances ({} vs {} fF); use build_chain_hamiltonian",
            spec1.total_capacitance, spec2.total_capacitance
        ));
    }
    if !(coupling_cap >= 0.0) {
        return domain(format!("coupling capacitance must be non-negative, got {coupling_cap}"));
    }
    guard_dim(d_each, 2)?;
    let c_sigma = spec1.total_capacitance;
    let xi = coupling_xi(c_sigma, coupling_cap);
    let ec = charging_energy(c_sigma)?;
    let pref = 4.0 * ec / (1.0 + xi);
    let n = number_operator::<T>(d_each)?;
    let cos = cosine_phase_operator::<T>(d_each)?;
    let id = DenseOperator::<T>::identity(d_each);
    let n2 = n.matmul(&n);
    let charge = n2.kron(&id).add(&id.kron(&n2)).add(&n.kron(&n).scale(T::from_f64(2.0 * xi)));
    let jj = cos
        .kron(&id)
        .scale(T::from_f64(spec1.effective_josephson_ghz()))
        .add(&id.kron(&cos).scale(T::from_f64(spec2.effective_josephson_ghz())));
    Ok(charge.scale(T::from_f64(pref)).sub(&jj))
}

/// `ξ = C_c / (C_c + C_Σ)`.
pub fn coupling_xi(c_sigma: f64, coupling_cap: f64) -> f64 {
    coupling_cap / (coupling_cap + c_sigma)
}

fn guard_dim(d_each: usize, m: usize) -> Result<usize> {
    check_truncation(d_each)?;
    match d_each.checked_pow(m as u32) {
        Some(dim) if dim <= MAX_DENSE_DIM => Ok(dim),
        _ => Err(Error::Capacity(format!(
            "dense dimension {d_each}^{m} exceeds the {MAX_DENSE_DIM} guard"
        ))),
    }
}

/// `H/h = (2e²/h)·Σ_ij C⁻¹_ij N̂_i N̂_j − Σ_i 2E_J,i|cos 2πf_i|·cos φ̂_i`,
/// transmon 0 being the most significant tensor factor.
pub fn build_chain_hamiltonian<T: Real>(spec: &ChainSpec, d_each: usize) -> Result<DenseOperator<T>> {
    spec.validate()?;
    let m = spec.len();
    let dim = guard_dim(d_each, m)?;
    let k = spec.charge_coupling_ghz()?;
    let half = (d_each / 2) as f64;
    // The charge part is diagonal in the product charge basis.
    let diag: Vec<T> = (0..dim)
        .map(|idx| {
            let mut n = vec![0.0; m];
            let mut rest = idx;
            for site in (0..m).rev() {
                n[site] = (rest % d_each) as f64 - half;
                rest /= d_each;
            }
            let mut e = 0.0;
            for i in 0..m {
                for j in 0..m {
                    e += k[(i, j)] * n[i] * n[j];
                }
            }
            T::from_f64(e)
        })
        .collect();
    let mut h = DenseOperator::from_real_diagonal(&diag);
    let cos = cosine_phase_operator::<T>(d_each)?;
    for (i, t) in spec.transmons.iter().enumerate() {
        let ej = t.effective_josephson_ghz();
        if ej != 0.0 {
            h = h.sub(&lift_to_site(&cos, i, m).scale(T::from_f64(ej)));
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charging_energy_91ff() {
        let ec = charging_energy(91.0).unwrap();
        assert!((ec - 0.212864).abs() < 1e-5, "{ec}");
        let ratio = charging_energy(9.1).unwrap() / ec;
        assert!((ratio - 10.0).abs() < 1e-12);
        assert!((charging_energy(45.5).unwrap() - 2.0 * ec).abs() < 1e-15);
        assert!(charging_energy(0.0).is_err());
        assert!(charging_energy(-1.0).is_err());
    }

    #[test]
    fn number_operator_entries() {
        let n = number_operator::<f64>(2).unwrap();
        assert_eq!((n.get(0, 0).re, n.get(1, 1).re), (-1.0, 0.0));
        for d in [2, 4, 8, 16, 32] {
            assert_eq!(number_operator::<f64>(d).unwrap().trace().re, -(d as f64) / 2.0);
        }
        assert!(number_operator::<f64>(6).is_err());
        assert!(cosine_phase_operator::<f64>(12).is_err());
    }

    #[test]
    fn cosine_is_half_x_at_d2() {
        let c = cosine_phase_operator::<f64>(2).unwrap();
        assert_eq!(c.get(0, 1).re, 0.5);
        assert_eq!(c.get(1, 0).re, 0.5);
        assert_eq!(c.get(0, 0).re, 0.0);
    }

    #[test]
    fn pair_capacitance_matrix() {
        let t = TransmonSpec::new(20.0, 91.0, 0.0).unwrap();
        let c = capacitance_matrix(&ChainSpec::pair(t, t, 0.5).unwrap()).unwrap();
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[91.5, -0.5, -0.5, 91.5]));
        let c1 = capacitance_matrix(&ChainSpec::single(t)).unwrap();
        assert_eq!(c1[(0, 0)], 91.0);
    }

    #[test]
    fn negative_coupling_rejected() {
        let t = TransmonSpec::new(20.0, 1.0, 0.0).unwrap();
        let mut s = ChainSpec::pair(t, t, 0.0).unwrap();
        s.transmons[0].total_capacitance = 1e-3;
        s.extra_capacitances.push(ExtraCapacitance { i: 0, j: 1, capacitance: 0.0 });
        assert!(capacitance_matrix(&s).is_ok());
        s.coupling_capacitances[0] = -1.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn chain_guard() {
        let t = TransmonSpec::new(20.0, 91.0, 0.0).unwrap();
        let s = ChainSpec::new(vec![t; 6], vec![0.5; 5]).unwrap();
        assert!(matches!(build_chain_hamiltonian::<f64>(&s, 16), Err(Error::Capacity(_))));
    }

    #[test]
    fn unequal_sigma_directs_to_chain() {
        let a = TransmonSpec::new(20.0, 91.0, 0.0).unwrap();
        let b = TransmonSpec::new(20.0, 80.0, 0.0).unwrap();
        let err = build_two_hamiltonian::<f64>(&a, &b, 0.5, 4).unwrap_err();
        assert!(err.to_string().contains("build_chain_hamiltonian"));
    }
}
