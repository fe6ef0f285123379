//! Coherent-state algebra for the bosonic Fock space over the discretized
//! field space: exponential-vector labels, analytic Gram matrices,
//! normalized coherent states, and the gauge-group representation.
//!
//! States are held exclusively as finite combinations of exponential
//! vectors; every inner product reduces to the closed form
//! (<W|, |Z>) = e^{(W, Z)}, so no occupation-number truncation enters
//! (a one-mode truncation exists only as a test oracle).

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::gauge::{gauge_transform, LatticeField};
use crate::paths::SmoothLoop;

/// Label of an exponential vector |Z>.
#[derive(Clone, Debug)]
pub struct ExpVectorLabel {
    field: LatticeField,
}

impl ExpVectorLabel {
    pub fn new(field: LatticeField) -> Self {
        assert!(field.norm_sq().is_finite(), "label must have finite norm");
        ExpVectorLabel { field }
    }

    pub fn vacuum(spec: crate::group::GroupSpec, n: usize) -> Self {
        ExpVectorLabel {
            field: LatticeField::zero(spec, n),
        }
    }

    pub fn field(&self) -> &LatticeField {
        &self.field
    }

    /// (Z, Z), the squared field norm.
    pub fn norm_sq(&self) -> f64 {
        self.field.norm_sq()
    }

    /// Norm of the exponential vector itself: ||(|Z>)|| = e^{(Z,Z)/2}.
    pub fn vector_norm(&self) -> f64 {
        (0.5 * self.norm_sq()).exp()
    }
}

/// (<W|, |Z>) = e^{(W,Z)} with the dt-weighted sesquilinear pairing,
/// antilinear in W.
pub fn exp_overlap(w: &ExpVectorLabel, z: &ExpVectorLabel) -> Result<C64> {
    Ok(w.field.inner_with(&z.field)?.exp())
}

/// Finite formal combination sum_i c_i |Z_i>.
#[derive(Clone, Debug, Default)]
pub struct CoherentCombo {
    terms: Vec<(C64, ExpVectorLabel)>,
}

impl CoherentCombo {
    pub fn new(terms: Vec<(C64, ExpVectorLabel)>) -> Self {
        CoherentCombo { terms }
    }

    pub fn single(coeff: C64, label: ExpVectorLabel) -> Self {
        CoherentCombo {
            terms: vec![(coeff, label)],
        }
    }

    pub fn terms(&self) -> &[(C64, ExpVectorLabel)] {
        &self.terms
    }

    pub fn add(&self, o: &CoherentCombo) -> CoherentCombo {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        CoherentCombo { terms }
    }

    pub fn scale(&self, s: C64) -> CoherentCombo {
        CoherentCombo {
            terms: self
                .terms
                .iter()
                .map(|(c, l)| (s * c, l.clone()))
                .collect(),
        }
    }

    /// Gram matrix e^{(Z_i, Z_j)} of the labels.
    pub fn gram_matrix(&self) -> Result<Vec<Vec<C64>>> {
        let k = self.terms.len();
        let mut g = vec![vec![C64::ZERO; k]; k];
        for i in 0..k {
            for j in 0..k {
                g[i][j] = exp_overlap(&self.terms[i].1, &self.terms[j].1)?;
            }
        }
        Ok(g)
    }
}

/// Sesquilinear extension over the Gram matrix:
/// sum_{ij} conj(a_i) b_j e^{(W_i, Z_j)}.
pub fn combo_inner(c1: &CoherentCombo, c2: &CoherentCombo) -> Result<C64> {
    let mut acc = C64::ZERO;
    for (a, w) in &c1.terms {
        for (b, z) in &c2.terms {
            acc += a.conj() * b * exp_overlap(w, z)?;
        }
    }
    Ok(acc)
}

/// Normalized coherent state at label Z and Planck parameter hbar:
/// e^{-(Z,Z)/(2 hbar)} |Z / sqrt(hbar)>, a unit vector.
pub fn normalized_coherent(z: &ExpVectorLabel, hbar: f64) -> CoherentCombo {
    assert!(hbar > 0.0, "hbar must be positive");
    let coeff = C64::new((-0.5 * z.norm_sq() / hbar).exp(), 0.0);
    let label = ExpVectorLabel::new(z.field.scale(C64::new(1.0 / hbar.sqrt(), 0.0)));
    CoherentCombo::single(coeff, label)
}

/// Gauge-group representation on coherent combos: term-wise
///
///   U(chi): c |Z>  ->  c e^{-1/2 ||chi_dot||^2 - (chi_dot, Z)} |Z^chi>,
///
/// with Z^chi the lattice gauge transform and the prefactor pairing
/// (chi_dot, Z) = dt sum_n <chi_dot(t_n), Z_n> over the analytic
/// logarithmic derivative. The pairing sign is the one that makes U
/// unitary for the ordering-consistent action Z^chi = Ad(chi)(Z + chi_dot);
/// the loop energy uses the lattice-independent analytic quadrature.
pub fn ggv_apply(chi: &SmoothLoop, combo: &CoherentCombo) -> Result<CoherentCombo> {
    let energy = chi.energy();
    let mut terms = Vec::with_capacity(combo.terms.len());
    for (c, label) in &combo.terms {
        let pairing = chi_field_pairing(chi, label.field())?;
        let coeff = c * (C64::new(-0.5 * energy, 0.0) - pairing).exp();
        terms.push((coeff, ExpVectorLabel::new(gauge_transform(label.field(), chi))));
    }
    Ok(CoherentCombo { terms })
}

/// (chi_dot, Z): left-sampled pairing of the (real) logarithmic
/// derivative against the field slices; linear in Z.
pub fn chi_field_pairing(chi: &SmoothLoop, z: &LatticeField) -> Result<C64> {
    let n = z.n();
    let dt = z.dt();
    let mut acc = C64::ZERO;
    for k in 0..n {
        let t = k as f64 / n as f64;
        acc += crate::group::inner(&chi.log_deriv(t).complexify(), &z.slices()[k]);
    }
    Ok(acc * dt)
}

/// Cholesky factorization check for a Hermitian matrix shifted by
/// `floor * max diagonal`: returns true iff the shifted matrix admits a
/// factorization, i.e. the matrix is positive semidefinite up to the
/// floor.
pub fn gram_psd_check(g: &[Vec<C64>], floor: f64) -> bool {
    let k = g.len();
    let scale = (0..k).map(|i| g[i][i].re).fold(0.0f64, f64::max);
    let mut a = g.to_vec();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] += floor * scale;
    }
    let mut l = vec![vec![C64::ZERO; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[i][j];
            for p in 0..j {
                s -= l[i][p] * l[j][p].conj();
            }
            if i == j {
                if s.re <= 0.0 || s.im.abs() > 1e-8 * scale.max(1.0) {
                    return false;
                }
                l[i][i] = C64::new(s.re.sqrt(), 0.0);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}
