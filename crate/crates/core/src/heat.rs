//! Heat kernels on K and K_C by truncated character sums, heat-kernel
//! (Hall-type) coherent states on L2(K), their overlaps, the phase-space
//! measure on K_C, and L2(K) pairings by quadrature or Haar Monte Carlo.
//!
//! The kernel at time t is rho(x,t) = sum_j dim_j e^{-t lambda_j / 2}
//! chi_j(x), normalized so that its integral against normalized Haar
//! measure is 1. For SU(2) the sum runs over n = 2j+1 = 1, 2, 3, ... with
//! dim = n and lambda = (n^2-1)/4; the characters are Chebyshev-U values
//! in half the trace, so one evaluation is a single forward recurrence.

use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::group::{
    character, ComplexAlgebraVector, ComplexGroupElement, GroupElement, GroupSpec, Rep,
};
use crate::stats;

/// Truncated character-sum evaluator for the heat kernels.
///
/// The truncation level is chosen at construction so that the discarded
/// tail is below `eps_tail` for every t >= t_min and every evaluation
/// point whose eigenvalue displacement satisfies |Im z| <= im_z_max.
/// Evaluations outside that certified domain return errors rather than
/// silently degraded values.
#[derive(Clone, Debug)]
pub struct HeatKernelEvaluator {
    spec: GroupSpec,
    t_min: f64,
    im_z_max: f64,
    eps_tail: f64,
    /// Number of summed terms: n = 2j+1 <= n_max for SU(2), |m| <= n_max
    /// for U(1).
    n_max: u32,
}

impl HeatKernelEvaluator {
    pub fn new(spec: GroupSpec, t_min: f64, im_z_max: f64, eps_tail: f64) -> Result<Self> {
        if t_min <= 0.0 || eps_tail <= 0.0 || im_z_max < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "t_min = {t_min}, im_z_max = {im_z_max}, eps_tail = {eps_tail}"
            )));
        }
        let n_max = Self::truncation_level(spec, t_min, im_z_max, eps_tail)?;
        Ok(HeatKernelEvaluator {
            spec,
            t_min,
            im_z_max,
            eps_tail,
            n_max,
        })
    }

    /// Default working domain: times down to 0.05 and eigenvalue
    /// displacements up to |Im z| = 2.
    pub fn with_defaults(spec: GroupSpec) -> Self {
        Self::new(spec, 0.05, 2.0, 1e-12).expect("default parameters are valid")
    }

    /// Real-domain evaluator sound down to t_min (used by bridge samplers,
    /// which only evaluate on K).
    pub fn real_domain(spec: GroupSpec, t_min: f64) -> Result<Self> {
        Self::new(spec, t_min, 0.0, 1e-12)
    }

    /// Smallest n with certified tail: term bounds are
    /// dim_j^2 e^{(n-1) im_z_max} e^{-t_min lambda_j / 2} for SU(2) (using
    /// |chi_j| <= dim_j e^{(2j)|Im z|}) and e^{m im_z_max - t m^2/2} for
    /// U(1); the Gaussian factor dominates once past the peak.
    fn truncation_level(spec: GroupSpec, t_min: f64, im_z_max: f64, eps: f64) -> Result<u32> {
        let bound = |n: u32| -> f64 {
            match spec {
                GroupSpec::Su2 => {
                    let nf = n as f64;
                    2.0 * nf.ln() + (nf - 1.0) * im_z_max - t_min * (nf * nf - 1.0) / 8.0
                }
                GroupSpec::U1 => {
                    let m = n as f64;
                    m * im_z_max - t_min * m * m / 2.0
                }
            }
        };
        let log_eps = (eps / 10.0).ln();
        let mut n = 1u32;
        let cap = 100_000;
        while n < cap {
            if bound(n) < log_eps && bound(n + 1) < bound(n) {
                return Ok(n);
            }
            n += 1;
        }
        Err(Error::InvalidParameter(format!(
            "truncation level exceeds {cap} for t_min = {t_min}, im_z_max = {im_z_max}"
        )))
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn im_z_max(&self) -> f64 {
        self.im_z_max
    }

    pub fn eps_tail(&self) -> f64 {
        self.eps_tail
    }

    pub fn terms(&self) -> u32 {
        self.n_max
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t < self.t_min {
            Err(Error::TruncationUnsound {
                t,
                t_min: self.t_min,
            })
        } else {
            Ok(())
        }
    }

    fn check_domain(&self, sigma: &ComplexGroupElement) -> Result<()> {
        let im_z = sigma.im_z();
        if im_z > self.im_z_max + 1e-12 {
            Err(Error::DomainExceeded {
                im_z,
                im_z_max: self.im_z_max,
            })
        } else {
            Ok(())
        }
    }

    /// Terms needed at time t (never more than the certified n_max).
    fn terms_for(&self, t: f64) -> u32 {
        let log_eps = (self.eps_tail / 10.0).ln();
        let mut n = 1u32;
        while n < self.n_max {
            let ok = match self.spec {
                GroupSpec::Su2 => {
                    let nf = n as f64;
                    2.0 * nf.ln() + (nf - 1.0) * self.im_z_max - t * (nf * nf - 1.0) / 8.0
                        < log_eps
                }
                GroupSpec::U1 => {
                    let m = n as f64;
                    m * self.im_z_max - t * m * m / 2.0 < log_eps
                }
            };
            if ok {
                return n;
            }
            n += 1;
        }
        self.n_max
    }

    /// Below this time the evaluator switches from the character sum to
    /// the Gaussian image sum (the two agree to the certified tail; the
    /// image form needs a handful of terms at small times where the
    /// character sum needs hundreds).
    const IMAGE_T_MAX: f64 = 0.5;

    /// Character sum with weights dim_j e^{-t lambda_j / 2} at half-trace c.
    fn su2_sum(&self, t: f64, c: C64) -> C64 {
        if t <= Self::IMAGE_T_MAX {
            return su2_image_sum(t, c.acos());
        }
        // chi at n = 2j+1 is U_{n-1}(c); forward Chebyshev recurrence.
        let two_c = c + c;
        let mut um1 = C64::ONE; // U_0
        let mut u = two_c; // U_1
        let mut acc = C64::ZERO;
        for n in 1..=self.terms_for(t) {
            let nf = n as f64;
            let w = nf * (-t * (nf * nf - 1.0) / 8.0).exp();
            let chi = if n == 1 { um1 } else { u };
            acc += w * chi;
            if n >= 2 {
                let next = two_c * u - um1;
                um1 = u;
                u = next;
            }
        }
        acc
    }

    /// Same sum on the compact group only (real half-trace), avoiding the
    /// complex arithmetic in the hot bridge loop.
    fn su2_sum_real(&self, t: f64, c: f64) -> f64 {
        if t <= Self::IMAGE_T_MAX {
            return su2_image_sum_real(t, c.clamp(-1.0, 1.0).acos());
        }
        let two_c = 2.0 * c;
        let mut um1 = 1.0f64;
        let mut u = two_c;
        let mut acc = 0.0;
        for n in 1..=self.terms_for(t) {
            let nf = n as f64;
            let w = nf * (-t * (nf * nf - 1.0) / 8.0).exp();
            let chi = if n == 1 { um1 } else { u };
            acc += w * chi;
            if n >= 2 {
                let next = two_c * u - um1;
                um1 = u;
                u = next;
            }
        }
        acc
    }

    fn u1_sum(&self, t: f64, w: C64) -> C64 {
        if t <= Self::IMAGE_T_MAX {
            // zeta with e^{i m zeta} = w^m.
            let zeta = C64::new(w.im.atan2(w.re), -w.norm().ln());
            let mut acc = C64::ZERO;
            for k in -3i32..=3 {
                let u = zeta + 2.0 * std::f64::consts::PI * k as f64;
                acc += (-u * u / (2.0 * t)).exp();
            }
            return acc * (2.0 * std::f64::consts::PI / t).sqrt();
        }
        let mut acc = C64::ONE; // m = 0
        let winv = C64::ONE / w;
        let mut wp = C64::ONE;
        let mut wm = C64::ONE;
        for m in 1..=self.terms_for(t) {
            wp *= w;
            wm *= winv;
            let g = (-t * (m as f64) * (m as f64) / 2.0).exp();
            acc += g * (wp + wm);
        }
        acc
    }

    /// Heat kernel on K. Real to within the certified tail.
    pub fn rho(&self, x: &GroupElement, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(match x {
            GroupElement::U1(w) => self.u1_sum(t, *w).re,
            GroupElement::Su2(m) => self.su2_sum_real(t, 0.5 * m.trace().re),
        })
    }

    /// Analytic continuation of rho to K_C: the same character sum with
    /// the characters continued. Restriction to K equals `rho`.
    pub fn rho_c(&self, sigma: &ComplexGroupElement, t: f64) -> Result<C64> {
        self.check_time(t)?;
        self.check_domain(sigma)?;
        Ok(match sigma {
            ComplexGroupElement::U1(w) => self.u1_sum(t, *w),
            ComplexGroupElement::Su2(m) => self.su2_sum(t, m.trace() * 0.5),
        })
    }

    /// Pointwise upper bound sup_x rho(x, t) over K: by |chi_j| <= dim_j
    /// this is sum dim_j^2 e^{-t lambda_j/2} = rho(e, t), so the bound is
    /// tight. Used as the rejection envelope by bridge samplers.
    pub fn rho_sup_bound(&self, t: f64) -> Result<f64> {
        self.rho(&self.spec.identity(), t)
    }

    /// Pairing (rho^C(.^{-1} sigma1, hbar), rho^C(.^{-1} sigma2, hbar)) in
    /// L2(K), by the closed character sum
    /// sum_j dim_j e^{-hbar lambda_j} chi_j(sigma1^dagger sigma2).
    pub fn coherent_pairing(
        &self,
        hbar: f64,
        s1: &ComplexGroupElement,
        s2: &ComplexGroupElement,
    ) -> Result<C64> {
        self.check_time(hbar)?;
        let prod = s1.dagger().mul(s2);
        self.check_domain(&prod)?;
        Ok(match prod {
            ComplexGroupElement::U1(w) => self.u1_sum(2.0 * hbar, w),
            ComplexGroupElement::Su2(m) => self.su2_sum(2.0 * hbar, m.trace() * 0.5),
        })
    }

    /// Pairing of the unnormalized coherent function at sigma with the
    /// character chi_rep: e^{-hbar lambda/2} conj(chi_{rep-dual}(sigma)).
    pub fn char_pairing(&self, hbar: f64, rep: Rep, sigma: &ComplexGroupElement) -> Result<C64> {
        self.check_time(hbar)?;
        self.check_domain(sigma)?;
        let dual = match rep {
            Rep::U1(m) => Rep::U1(-m),
            Rep::Su2 { twice_j } => Rep::Su2 { twice_j },
        };
        Ok((-hbar * rep.casimir() / 2.0).exp() * character(dual, sigma).conj())
    }
}

/// Gaussian image-sum form of the SU(2) heat kernel, exact by Poisson
/// summation of the character series: with eigenvalues e^{+-iz},
///
///   rho = e^{t/8} sqrt(8 pi) t^{-3/2}
///         sum_k (2z + 4 pi k) e^{-(2z + 4 pi k)^2 / (2t)} / sin(z).
///
/// Valid for complex z as an identity of holomorphic functions; for
/// t <= 0.5 the terms |k| > 2 are below 1e-250.
fn su2_image_sum(t: f64, z: C64) -> C64 {
    let pref = su2_image_prefactor(t);
    let sz = z.sin();
    if sz.norm() < 1e-8 {
        return C64::new(pref * su2_image_degenerate(t, z.re), 0.0);
    }
    let mut s = C64::ZERO;
    for k in -2i32..=2 {
        let u = 2.0 * z + 4.0 * std::f64::consts::PI * k as f64;
        s += u * (-u * u / (2.0 * t)).exp();
    }
    pref * s / sz
}

fn su2_image_sum_real(t: f64, z: f64) -> f64 {
    let pref = su2_image_prefactor(t);
    let sz = z.sin();
    if sz.abs() < 1e-8 {
        return pref * su2_image_degenerate(t, z);
    }
    let mut s = 0.0;
    for k in -2i32..=2 {
        let u = 2.0 * z + 4.0 * std::f64::consts::PI * k as f64;
        s += u * (-u * u / (2.0 * t)).exp();
    }
    pref * s / sz
}

fn su2_image_prefactor(t: f64) -> f64 {
    (t / 8.0).exp() * (8.0 * std::f64::consts::PI).sqrt() / (t * t * t).sqrt()
}

/// Limit of the image sum divided by sin(z) at the degenerate points:
/// 2 e^{-2 z^2 / t} at the identity (z ~ 0), 4 (4 pi^2/t - 1) e^{-2 pi^2/t}
/// at the antipode (z ~ pi).
fn su2_image_degenerate(t: f64, z_re: f64) -> f64 {
    if z_re < 1.0 {
        2.0 * (1.0 + z_re * z_re / 6.0) * (-2.0 * z_re * z_re / t).exp()
    } else {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        4.0 * (4.0 * pi2 / t - 1.0) * (-2.0 * pi2 / t).exp()
    }
}
#[derive(Debug)]
pub struct HallState {
    sigma: ComplexGroupElement,
    hbar: f64,
    norm: OnceLock<f64>,
}

impl Clone for HallState {
    fn clone(&self) -> Self {
        HallState {
            sigma: self.sigma,
            hbar: self.hbar,
            norm: self.norm.clone(),
        }
    }
}

impl HallState {
    pub fn new(sigma: ComplexGroupElement, hbar: f64) -> Self {
        HallState {
            sigma,
            hbar,
            norm: OnceLock::new(),
        }
    }

    pub fn sigma(&self) -> &ComplexGroupElement {
        &self.sigma
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// L2 norm of the unnormalized function, cached after first use.
    pub fn unnorm_norm(&self, ev: &HeatKernelEvaluator) -> Result<f64> {
        if let Some(n) = self.norm.get() {
            return Ok(*n);
        }
        let p = ev.coherent_pairing(self.hbar, &self.sigma, &self.sigma)?;
        let n = p.re.sqrt();
        Ok(*self.norm.get_or_init(|| n))
    }
}

/// Normalized evaluation of a Hall state at k.
pub fn hall_eval(ev: &HeatKernelEvaluator, state: &HallState, k: &GroupElement) -> Result<C64> {
    let arg = k.inverse().complexify().mul(&state.sigma);
    let v = ev.rho_c(&arg, state.hbar)?;
    Ok(v / state.unnorm_norm(ev)?)
}

/// Overlap (s1, s2) in L2(K), antilinear in the first argument, via the
/// closed character sum divided by the two norms. Requires equal hbar.
pub fn hall_overlap(ev: &HeatKernelEvaluator, s1: &HallState, s2: &HallState) -> Result<C64> {
    if s1.hbar != s2.hbar {
        return Err(Error::InvalidParameter(format!(
            "hall_overlap requires equal hbar: {} vs {}",
            s1.hbar, s2.hbar
        )));
    }
    let p = ev.coherent_pairing(s1.hbar, &s1.sigma, &s2.sigma)?;
    Ok(p / (s1.unnorm_norm(ev)? * s2.unnorm_norm(ev)?))
}

/// Sample from the phase-space measure on K_C: sigma = k gamma with k Haar
/// on K and gamma the endpoint of the Ito chain for Brownian motion on K_C
/// driven by the 2n orthonormal directions {X_a, i X_a}, with variance
/// hbar/2 per direction. That variance is the one for which the coherent
/// completeness sum is constant over test functions (checked against the
/// closed U(1) form and by the resolution-of-identity test).
pub fn mu_hbar_sample<R: Rng + ?Sized>(
    spec: GroupSpec,
    rng: &mut R,
    hbar: f64,
    steps: usize,
) -> ComplexGroupElement {
    let k = spec.haar_sample(rng).complexify();
    k.mul(&complex_brownian_endpoint(spec, rng, hbar / 2.0, steps))
}

/// Endpoint of the product-of-exponentials chain for Brownian motion on
/// K_C at the given per-direction variance, driven by the 2n directions
/// {X_a, i X_a}.
pub fn complex_brownian_endpoint<R: Rng + ?Sized>(
    spec: GroupSpec,
    rng: &mut R,
    variance: f64,
    steps: usize,
) -> ComplexGroupElement {
    let sd = (variance / steps as f64).sqrt();
    let n = spec.algebra_dim();
    let mut g = spec.identity_c();
    for _ in 0..steps {
        let mut c = [C64::ZERO; 3];
        for ca in c.iter_mut().take(n) {
            let xi: f64 = rng.sample(StandardNormal);
            let eta: f64 = rng.sample(StandardNormal);
            *ca = C64::new(sd * xi, sd * eta);
        }
        let inc = ComplexAlgebraVector::new(spec, &c[..n]);
        g = g.mul(&inc.exp());
    }
    g
}

/// How an L2(K) pairing is computed.
#[derive(Clone, Copy, Debug)]
pub enum PairingMethod {
    /// Product quadrature: trapezoid in the angle for U(1); uniform grids
    /// in the two periodic Euler angles and Gauss-Legendre in cos(beta)
    /// for SU(2). `level` is the number of nodes per axis.
    Quadrature { level: usize },
    /// Haar Monte Carlo with a reported standard error. If `tol` is set
    /// and the standard error exceeds it, the call reports the failure
    /// instead of returning silently.
    MonteCarlo {
        samples: usize,
        seed: u64,
        tol: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct L2Pairing {
    pub value: C64,
    /// Standard error for Monte-Carlo evaluations, None for quadrature.
    pub se: Option<f64>,
}

/// integral over K of conj(f) g with respect to normalized Haar measure.
pub fn l2k_inner<F, G>(spec: GroupSpec, f: F, g: G, method: PairingMethod) -> Result<L2Pairing>
where
    F: Fn(&GroupElement) -> C64 + Sync,
    G: Fn(&GroupElement) -> C64 + Sync,
{
    match method {
        PairingMethod::Quadrature { level } => {
            let value = match spec {
                GroupSpec::U1 => {
                    let n = level.max(2);
                    let mut acc = C64::ZERO;
                    for k in 0..n {
                        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                        let el = GroupElement::U1(C64::from_polar(1.0, theta));
                        acc += f(&el).conj() * g(&el);
                    }
                    acc / n as f64
                }
                GroupSpec::Su2 => {
                    let mut acc = C64::ZERO;
                    let mut wsum = 0.0;
                    for (el, w) in su2_quadrature_grid(level) {
                        acc += w * f(&el).conj() * g(&el);
                        wsum += w;
                    }
                    acc / wsum
                }
            };
            Ok(L2Pairing { value, se: None })
        }
        PairingMethod::MonteCarlo { samples, seed, tol } => {
            let vals = stats::sharded_samples(seed, samples, 4, |rng, _| {
                let k = spec.haar_sample(rng);
                f(&k).conj() * g(&k)
            });
            let m = stats::mean_se_complex(&vals);
            if let Some(tol) = tol {
                if m.se > tol {
                    return Err(Error::BudgetTooSmall { se: m.se, tol });
                }
            }
            Ok(L2Pairing {
                value: m.mean,
                se: Some(m.se),
            })
        }
    }
}

/// Euler-angle product grid on SU(2) with Haar weights
/// sin(beta) d alpha d beta d gamma / (16 pi^2): uniform in the periodic
/// angles (spectrally accurate there), Gauss-Legendre in cos(beta).
/// The weights are unnormalized; divide by their sum.
pub fn su2_quadrature_grid(level: usize) -> Vec<(GroupElement, f64)> {
    let n = level.max(2);
    let (nodes, weights) = gauss_legendre(n);
    let mut grid = Vec::with_capacity(n * n * n);
    for ia in 0..n {
        let alpha = 2.0 * std::f64::consts::PI * ia as f64 / n as f64;
        for (cb, wb) in nodes.iter().zip(&weights) {
            let beta = cb.acos();
            for ig in 0..n {
                let gamma = 4.0 * std::f64::consts::PI * ig as f64 / n as f64;
                let el = euler_su2(alpha, beta, gamma);
                grid.push((el, *wb));
            }
        }
    }
    grid
}

fn euler_su2(alpha: f64, beta: f64, gamma: f64) -> GroupElement {
    use crate::group::AlgebraVector;
    let a = AlgebraVector::new(GroupSpec::Su2, &[0.0, 0.0, alpha]).exp();
    let b = AlgebraVector::new(GroupSpec::Su2, &[0.0, beta, 0.0]).exp();
    let c = AlgebraVector::new(GroupSpec::Su2, &[0.0, 0.0, gamma]).exp();
    a.mul(&b).mul(&c)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{character_k, AlgebraVector};
    use crate::stats::shard_rng;

    fn su2_ev() -> HeatKernelEvaluator {
        HeatKernelEvaluator::with_defaults(GroupSpec::Su2)
    }

    fn u1_ev() -> HeatKernelEvaluator {
        HeatKernelEvaluator::with_defaults(GroupSpec::U1)
    }

    #[test]
    fn u1_rho_matches_wrapped_gaussian() {
        // Poisson summation: sum_m e^{-t m^2/2} e^{i m theta}
        //                  = sqrt(2 pi / t) sum_k e^{-(theta + 2 pi k)^2 / (2t)}.
        let ev = u1_ev();
        let (t, theta) = (0.5, 1.0);
        let x = GroupElement::U1(C64::from_polar(1.0, theta));
        let got = ev.rho(&x, t).unwrap();
        let mut want = 0.0;
        for k in -8i32..=8 {
            let u = theta + 2.0 * std::f64::consts::PI * k as f64;
            want += (-u * u / (2.0 * t)).exp();
        }
        want *= (2.0 * std::f64::consts::PI / t).sqrt();
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        // Frozen value from the wrapped-Gaussian oracle.
        assert!((got - 1.3040986643492607).abs() < 1e-10, "{got}");
    }

    #[test]
    fn image_sum_matches_character_sum() {
        // Two independent evaluation routes for the same kernel: the
        // Gaussian image sum (used below t = 0.5) against the raw
        // character sum, on and off the compact group.
        let ev = HeatKernelEvaluator::new(GroupSpec::Su2, 0.004, 2.0, 1e-12).unwrap();
        let mut rng = shard_rng(20, 0);
        for &t in &[0.004, 0.02, 0.1, 0.3, 0.5] {
            for _ in 0..10 {
                let x = GroupSpec::Su2.haar_sample(&mut rng);
                let c = 0.5 * x.trace().re;
                let image = su2_image_sum_real(t, c.clamp(-1.0, 1.0).acos());
                let two_c = 2.0 * c;
                let mut um1 = 1.0f64;
                let mut u = two_c;
                let mut chars = 0.0;
                for n in 1..=ev.terms() {
                    let nf = n as f64;
                    chars += nf * (-t * (nf * nf - 1.0) / 8.0).exp()
                        * if n == 1 { um1 } else { u };
                    if n >= 2 {
                        let next = two_c * u - um1;
                        um1 = u;
                        u = next;
                    }
                }
                assert!(
                    (image - chars).abs() < 1e-9 * chars.abs().max(1.0),
                    "t = {t}: image {image} vs characters {chars}"
                );
            }
        }
        // Degenerate points: identity and antipode.
        let e = GroupSpec::Su2.identity();
        let anti = AlgebraVector::new(GroupSpec::Su2, &[0.0, 0.0, 2.0 * std::f64::consts::PI])
            .exp();
        for &t in &[0.05, 0.3] {
            for x in [&e, &anti] {
                let image = ev.rho(x, t).unwrap();
                let mut chars = 0.0;
                let chi = |n: u32| {
                    // chi_n at e is n; at the antipode it is n (-1)^{n-1}.
                    if x.dist(&e) < 1e-12 {
                        n as f64
                    } else {
                        n as f64 * if n % 2 == 0 { -1.0 } else { 1.0 }
                    }
                };
                for n in 1..=ev.terms() {
                    let nf = n as f64;
                    chars += nf * (-t * (nf * nf - 1.0) / 8.0).exp() * chi(n);
                }
                assert!(
                    (image - chars).abs() < 1e-9 * chars.abs().max(1.0),
                    "degenerate at t = {t}: {image} vs {chars}"
                );
            }
        }
    }

    #[test]
    fn rho_normalization_only_trivial_rep_survives() {
        // integral of rho over K is the j = 0 coefficient = 1: quadrature.
        let ev = su2_ev();
        let one = |_: &GroupElement| C64::ONE;
        let r = |k: &GroupElement| C64::new(ev.rho(k, 0.3).unwrap(), 0.0);
        let v = l2k_inner(GroupSpec::Su2, one, r, PairingMethod::Quadrature { level: 24 })
            .unwrap()
            .value;
        assert!((v.re - 1.0).abs() < 1e-9, "{v}");
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn rho_large_time_uniform() {
        // Spectral gap: |rho(x, 50) - 1| <= 4 e^{-50 * (3/4) / 2} ~ 2.9e-8.
        let ev = su2_ev();
        let mut rng = shard_rng(21, 0);
        let bound = 4.0 * (-50.0f64 * 0.375).exp() + 1e-12;
        for _ in 0..20 {
            let x = GroupSpec::Su2.haar_sample(&mut rng);
            let v = ev.rho(&x, 50.0).unwrap();
            assert!((v - 1.0).abs() < bound, "{v} at bound {bound}");
        }
    }

    #[test]
    fn rho_below_floor_errors() {
        let ev = su2_ev();
        let e = ev.rho(&GroupSpec::Su2.identity(), 0.01);
        assert!(matches!(e, Err(Error::TruncationUnsound { .. })));
    }

    #[test]
    fn rho_c_restricts_to_rho() {
        let ev = su2_ev();
        let mut rng = shard_rng(22, 0);
        for _ in 0..25 {
            let k = GroupSpec::Su2.haar_sample(&mut rng);
            let a = ev.rho(&k, 0.4).unwrap();
            let b = ev.rho_c(&k.complexify(), 0.4).unwrap();
            assert!((b.re - a).abs() < 1e-10 && b.im.abs() < 1e-10);
        }
    }

    #[test]
    fn rho_c_conjugation_invariant() {
        let ev = su2_ev();
        let mut rng = shard_rng(23, 0);
        let sigma = ComplexAlgebraVector::new(
            GroupSpec::Su2,
            &[C64::new(0.5, 0.3), C64::new(-0.1, 0.4), C64::new(0.2, -0.2)],
        )
        .exp();
        let base = ev.rho_c(&sigma, 0.7).unwrap();
        for _ in 0..10 {
            let g = GroupSpec::Su2.haar_sample(&mut rng).complexify();
            let conj = g.mul(&sigma).mul(&g.inverse());
            let v = ev.rho_c(&conj, 0.7).unwrap();
            assert!((v - base).norm() < 1e-10 * base.norm().max(1.0));
        }
    }

    #[test]
    fn rho_c_u1_matches_reference_summation() {
        // Independent high-precision summation at twice the truncation.
        let ev = u1_ev();
        let w = C64::from_polar((0.8f64).exp(), 0.6);
        let sigma = ComplexGroupElement::U1(w);
        let got = ev.rho_c(&sigma, 0.8).unwrap();
        let mut want = C64::ZERO;
        for m in -(2 * ev.terms() as i32)..=(2 * ev.terms() as i32) {
            let g = (-0.8 * (m as f64) * (m as f64) / 2.0).exp();
            want += g * w.powi(m);
        }
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn rho_c_domain_guard() {
        let ev = su2_ev();
        // Polar displacement far beyond im_z_max = 2.
        let sigma = ComplexAlgebraVector::new(
            GroupSpec::Su2,
            &[C64::new(0.0, 6.0), C64::ZERO, C64::ZERO],
        )
        .exp();
        assert!(matches!(
            ev.rho_c(&sigma, 0.5),
            Err(Error::DomainExceeded { .. })
        ));
    }

    #[test]
    fn semigroup_by_convolution() {
        // (rho_s * rho_t)(x) = rho_{s+t}(x) with the convolution computed
        // by the L2 machinery.
        let ev = su2_ev();
        let mut rng = shard_rng(24, 0);
        let (s, t) = (0.25, 0.25);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let x = GroupSpec::Su2.haar_sample(&mut rng);
            let f = |k: &GroupElement| {
                C64::new(ev.rho(&x.mul(&k.inverse()), s).unwrap(), 0.0)
            };
            let g = |k: &GroupElement| C64::new(ev.rho(k, t).unwrap(), 0.0);
            let conv = l2k_inner(GroupSpec::Su2, f, g, PairingMethod::Quadrature { level: 32 })
                .unwrap()
                .value;
            let direct = ev.rho(&x, s + t).unwrap();
            worst = worst.max((conv.re - direct).abs());
        }
        assert!(worst < 1e-6, "max semigroup deviation {worst}");
    }

    #[test]
    fn hall_states_are_normalized() {
        let ev = su2_ev();
        let sigma = ComplexAlgebraVector::new(
            GroupSpec::Su2,
            &[C64::new(0.4, 0.5), C64::new(0.1, -0.3), C64::new(-0.2, 0.1)],
        )
        .exp();
        let st = HallState::new(sigma, 0.5);
        let f = |k: &GroupElement| hall_eval(&ev, &st, k).unwrap();
        let n = l2k_inner(GroupSpec::Su2, f, f, PairingMethod::Quadrature { level: 28 })
            .unwrap()
            .value;
        assert!((n.re - 1.0).abs() < 1e-8, "norm^2 = {n}");
        assert!(n.im.abs() < 1e-10);
    }

    #[test]
    fn hall_eval_identity_positive() {
        let ev = su2_ev();
        let st = HallState::new(GroupSpec::Su2.identity_c(), 0.3);
        let v = hall_eval(&ev, &st, &GroupSpec::Su2.identity()).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-12);
    }

    #[test]
    fn hall_eval_left_translation_covariance() {
        let ev = su2_ev();
        let mut rng = shard_rng(25, 0);
        let sigma = ComplexAlgebraVector::new(
            GroupSpec::Su2,
            &[C64::new(0.3, 0.2), C64::new(0.0, 0.4), C64::new(-0.5, 0.0)],
        )
        .exp();
        let k0 = GroupSpec::Su2.haar_sample(&mut rng);
        let kp = GroupSpec::Su2.haar_sample(&mut rng);
        let st = HallState::new(sigma, 0.5);
        let st_l = HallState::new(k0.complexify().mul(&sigma), 0.5);
        let a = hall_eval(&ev, &st_l, &k0.mul(&kp)).unwrap();
        let b = hall_eval(&ev, &st, &kp).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn hall_norm_two_ways() {
        // Closed character sum vs Haar MC for the unnormalized norm^2.
        let ev = su2_ev();
        let sigma = ComplexAlgebraVector::new(
            GroupSpec::Su2,
            &[C64::new(0.2, 0.6), C64::new(-0.4, 0.1), C64::new(0.0, 0.2)],
        )
        .exp();
        let st = HallState::new(sigma, 0.5);
        let closed = ev.coherent_pairing(0.5, &sigma, &sigma).unwrap().re;
        let f = |k: &GroupElement| {
            let arg = k.inverse().complexify().mul(&sigma);
            ev.rho_c(&arg, 0.5).unwrap()
        };
        let mc = l2k_inner(
            GroupSpec::Su2,
            f,
            f,
            PairingMethod::MonteCarlo {
                samples: 100_000,
                seed: 77,
                tol: None,
            },
        )
        .unwrap();
        let se = mc.se.unwrap();
        assert!(
            (mc.value.re - closed).abs() < 3.0 * se,
            "closed {closed} vs mc {} (se {se})",
            mc.value.re
        );
        assert!((st.unnorm_norm(&ev).unwrap().powi(2) - closed).abs() < 1e-12);
    }

    #[test]
    fn hall_overlap_closed_vs_quadrature() {
        let ev = su2_ev();
        let s1 = HallState::new(
            ComplexAlgebraVector::new(
                GroupSpec::Su2,
                &[C64::new(0.5, 0.1), C64::new(0.2, 0.2), C64::new(0.0, -0.3)],
            )
            .exp(),
            0.5,
        );
        let s2 = HallState::new(
            ComplexAlgebraVector::new(
                GroupSpec::Su2,
                &[C64::new(-0.3, 0.2), C64::new(0.4, 0.0), C64::new(0.1, 0.1)],
            )
            .exp(),
            0.5,
        );
        let closed = hall_overlap(&ev, &s1, &s2).unwrap();
        let f = |k: &GroupElement| hall_eval(&ev, &s1, k).unwrap();
        let g = |k: &GroupElement| hall_eval(&ev, &s2, k).unwrap();
        let quad = l2k_inner(GroupSpec::Su2, f, g, PairingMethod::Quadrature { level: 28 })
            .unwrap()
            .value;
        assert!((closed - quad).norm() < 1e-8, "{closed} vs {quad}");
        // Self overlap is exactly 1.
        let one = hall_overlap(&ev, &s1, &s1).unwrap();
        assert!((one - C64::ONE).norm() < 1e-14);
    }

    #[test]
    fn hall_overlap_classical_limit_monotone() {
        let ev = su2_ev();
        let sig = AlgebraVector::new(GroupSpec::Su2, &[0.9, 0.0, 0.2]).exp().complexify();
        let rho = AlgebraVector::new(GroupSpec::Su2, &[0.0, -0.7, 0.4]).exp().complexify();
        let mut prev = f64::INFINITY;
        for hbar in [1.0, 0.5, 0.25, 0.1] {
            let a = HallState::new(sig, hbar);
            let b = HallState::new(rho, hbar);
            let ov = hall_overlap(&ev, &a, &b).unwrap().norm_sqr();
            assert!(ov < prev, "overlap^2 {ov} not decreasing at hbar = {hbar}");
            prev = ov;
        }
    }

    #[test]
    fn hall_overlap_continuous_in_hbar() {
        // No jumps beyond twice the neighboring secant on an hbar grid.
        let ev = su2_ev();
        let sig = AlgebraVector::new(GroupSpec::Su2, &[0.8, 0.1, 0.0]).exp().complexify();
        let rho = AlgebraVector::new(GroupSpec::Su2, &[0.1, -0.5, 0.3]).exp().complexify();
        let grid: Vec<f64> = (0..=18).map(|i| 0.1 + 0.05 * i as f64).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&h| {
                hall_overlap(&ev, &HallState::new(sig, h), &HallState::new(rho, h))
                    .unwrap()
                    .norm_sqr()
            })
            .collect();
        for i in 1..vals.len() - 1 {
            let jump = (vals[i + 1] - vals[i]).abs();
            let neighbor = (vals[i] - vals[i - 1]).abs();
            assert!(
                jump <= 2.0 * neighbor + 1e-6,
                "jump {jump} vs neighbor secant {neighbor} at {}",
                grid[i]
            );
        }
    }

    #[test]
    fn hall_norm_sigma_dependence_measured() {
        // The unnormalized norm is NOT sigma-independent; measure the
        // spread over mu_hbar samples so it is reported, not hidden.
        let ev = su2_ev();
        let mut rng = shard_rng(26, 0);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for _ in 0..10 {
            let sigma = mu_hbar_sample(GroupSpec::Su2, &mut rng, 0.5, 64);
            let n = HallState::new(sigma, 0.5).unnorm_norm(&ev).unwrap();
            lo = lo.min(n);
            hi = hi.max(n);
        }
        // On K the norm is constant; off K it grows. Record that the
        // spread is a real effect (strictly above rounding).
        assert!(hi / lo > 1.0 + 1e-6, "spread {:.3e}", hi / lo - 1.0);
    }

    #[test]
    fn mu_hbar_polar_scaling() {
        // Mean squared polar displacement is proportional to hbar: the
        // log-log slope over {0.01, 0.02, 0.04} is 1 within a few percent.
        let hbars = [0.01, 0.02, 0.04];
        let mut logs = Vec::new();
        for (i, &h) in hbars.iter().enumerate() {
            let vals = stats::sharded_samples(300 + i as u64, 20_000, 4, |rng, _| {
                mu_hbar_sample(GroupSpec::Su2, rng, h, 16).polar_log_norm_sq()
            });
            logs.push(stats::mean_se(&vals).mean.ln());
        }
        let lh: Vec<f64> = hbars.iter().map(|h| h.ln()).collect();
        let slope = stats::ls_slope(&lh, &logs);
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn mu_hbar_chain_step_self_consistency() {
        // E[chi_{1/2}(sigma)] agrees between a coarse and a fine Ito
        // chain for the K_C Brownian factor (the product chain's weak
        // error is well below the Monte-Carlo resolution).
        let rep = Rep::Su2 { twice_j: 1 };
        let coarse = stats::sharded_samples(28, 40_000, 4, |rng, _| {
            character(rep, &mu_hbar_sample(GroupSpec::Su2, rng, 0.5, 16)).re
        });
        let fine = stats::sharded_samples(29, 40_000, 4, |rng, _| {
            character(rep, &mu_hbar_sample(GroupSpec::Su2, rng, 0.5, 64)).re
        });
        let (a, b) = (stats::mean_se(&coarse), stats::mean_se(&fine));
        let d = (a.mean - b.mean).abs();
        let se = (a.se * a.se + b.se * b.se).sqrt();
        assert!(d < 3.0 * se, "step-size drift {d} vs 3 se {}", 3.0 * se);
    }

    #[test]
    fn mu_hbar_left_invariant_law() {
        // Two-sample KS on Re chi_{1/2}(sigma) with and without a fixed
        // left factor.
        let rep = Rep::Su2 { twice_j: 1 };
        let mut a: Vec<f64> = stats::sharded_samples(31, 20_000, 4, |rng, _| {
            character(rep, &mu_hbar_sample(GroupSpec::Su2, rng, 0.5, 32)).re
        });
        let k0 = GroupSpec::Su2.haar_sample(&mut shard_rng(99, 0)).complexify();
        let mut b: Vec<f64> = stats::sharded_samples(32, 20_000, 4, |rng, _| {
            character(rep, &k0.mul(&mu_hbar_sample(GroupSpec::Su2, rng, 0.5, 32))).re
        });
        let d = stats::ks_two_sample(&mut a, &mut b);
        let thr = stats::ks_two_sample_threshold(20_000, 20_000, 1e-3);
        assert!(d < thr, "KS {d} vs {thr}");
    }

    #[test]
    fn l2k_inner_character_orthogonality() {
        let ev = su2_ev();
        let _ = &ev;
        let c12 = |k: &GroupElement| character_k(Rep::Su2 { twice_j: 1 }, k);
        let c1 = |k: &GroupElement| character_k(Rep::Su2 { twice_j: 2 }, k);
        let one = |_: &GroupElement| C64::ONE;
        let q = PairingMethod::Quadrature { level: 16 };
        let v0 = l2k_inner(GroupSpec::Su2, one, one, q).unwrap().value;
        assert!((v0 - C64::ONE).norm() < 1e-12);
        let v1 = l2k_inner(GroupSpec::Su2, c12, c1, q).unwrap().value;
        assert!(v1.norm() < 1e-8, "cross character {v1}");
        let v2 = l2k_inner(GroupSpec::Su2, c1, c1, q).unwrap().value;
        assert!((v2 - C64::ONE).norm() < 1e-8, "chi_1 norm {v2}");
    }

    #[test]
    fn l2k_inner_budget_guard() {
        let f = |k: &GroupElement| character_k(Rep::Su2 { twice_j: 1 }, k);
        let r = l2k_inner(
            GroupSpec::Su2,
            f,
            f,
            PairingMethod::MonteCarlo {
                samples: 100,
                seed: 1,
                tol: Some(1e-9),
            },
        );
        assert!(matches!(r, Err(Error::BudgetTooSmall { .. })));
    }

    #[test]
    fn completeness_constant_over_test_family() {
        // c(f) = E_mu[ |(coherent_sigma, f)|^2 ] / ||f||^2 over the family
        // {chi_0, chi_half, chi_1, mixtures}: constant within 5% relative
        // spread. Uses the globally-normalized coherent functions (the
        // per-sigma norm is measured separately).
        let ev = su2_ev();
        let hbar = 0.5;
        let reps = [
            Rep::Su2 { twice_j: 0 },
            Rep::Su2 { twice_j: 1 },
            Rep::Su2 { twice_j: 2 },
        ];
        // Families: 3 pure characters + 2 normalized mixtures.
        let vals = stats::sharded_samples(55, 100_000, 4, |rng, _| {
            let sigma = mu_hbar_sample(GroupSpec::Su2, rng, hbar, 32);
            let p: Vec<C64> = reps
                .iter()
                .map(|&r| ev.char_pairing(hbar, r, &sigma).unwrap())
                .collect();
            [
                p[0].norm_sqr(),
                p[1].norm_sqr(),
                p[2].norm_sqr(),
                (p[0] + p[2]).norm_sqr() / 2.0,
                (p[1] + p[2]).norm_sqr() / 2.0,
            ]
        });
        let mut c = [0.0f64; 5];
        for v in &vals {
            for i in 0..5 {
                c[i] += v[i];
            }
        }
        for ci in c.iter_mut() {
            *ci /= vals.len() as f64;
        }
        let mean = c.iter().sum::<f64>() / 5.0;
        for (i, ci) in c.iter().enumerate() {
            assert!(
                (ci - mean).abs() / mean < 0.05,
                "family member {i}: c = {ci} vs mean {mean} (all: {c:?})"
            );
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let int: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(6)).sum();
        assert!((int - 2.0 / 7.0).abs() < 1e-13);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }
}
