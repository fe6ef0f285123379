//! Discretized connections and complexified fields on the circle, the
//! gauge-group action, the Gauss-law constraint, and the Wilson loop in
//! sampled-field and lattice-link form.
//!
//! A field has N slices at the left endpoints t_n = n/N of the lattice
//! intervals, matching the left-point convention of the stochastic
//! pairings. Path ordering is left-to-right in increasing t, fixed
//! globally.

use std::io::{BufRead, Write};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::group::{
    adjoint, AlgebraVector, ComplexAlgebraVector, ComplexGroupElement, GroupElement, GroupSpec,
};
use crate::paths::SmoothLoop;

/// N time slices of complexified algebra vectors with spacing 1/N;
/// Z = A + (i/2) E splits into the connection A = Re Z and its conjugate
/// momentum E = 2 Im Z.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    slices: Vec<ComplexAlgebraVector>,
}

/// Where an analytic profile is sampled when discretizing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplePoint {
    /// Left endpoint t_n (the production convention).
    Left,
    /// Interval midpoint t_n + 1/(2N), for refinement-order comparisons.
    Mid,
}

impl LatticeField {
    pub fn new(slices: Vec<ComplexAlgebraVector>) -> Self {
        assert!(!slices.is_empty(), "need at least one slice");
        LatticeField { slices }
    }

    pub fn zero(spec: GroupSpec, n: usize) -> Self {
        LatticeField {
            slices: vec![ComplexAlgebraVector::zero(spec); n],
        }
    }

    /// Discretize an analytic profile on n slices.
    pub fn sample<F>(f: F, n: usize, at: SamplePoint) -> Self
    where
        F: Fn(f64) -> ComplexAlgebraVector,
    {
        let slices = (0..n)
            .map(|k| {
                let t = match at {
                    SamplePoint::Left => k as f64 / n as f64,
                    SamplePoint::Mid => (k as f64 + 0.5) / n as f64,
                };
                f(t)
            })
            .collect();
        LatticeField { slices }
    }

    pub fn n(&self) -> usize {
        self.slices.len()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.slices.len() as f64
    }

    pub fn spec(&self) -> GroupSpec {
        self.slices[0].spec()
    }

    pub fn slices(&self) -> &[ComplexAlgebraVector] {
        &self.slices
    }

    /// Connection part A = Re Z.
    pub fn a_part(&self) -> Vec<AlgebraVector> {
        self.slices.iter().map(|z| z.real_part()).collect()
    }

    /// Momentum part E = 2 Im Z.
    pub fn e_part(&self) -> Vec<AlgebraVector> {
        self.slices.iter().map(|z| z.imag_part().scale(2.0)).collect()
    }

    pub fn is_real(&self) -> bool {
        self.slices
            .iter()
            .all(|z| z.imag_part().norm_sq() < 1e-28)
    }

    pub fn add(&self, o: &LatticeField) -> LatticeField {
        assert_eq!(self.n(), o.n(), "discretization mismatch");
        LatticeField {
            slices: self
                .slices
                .iter()
                .zip(&o.slices)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> LatticeField {
        LatticeField {
            slices: self.slices.iter().map(|z| z.scale(s)).collect(),
        }
    }

    /// L2 pairing (W, Z) = dt sum_n inner(W_n, Z_n), antilinear in self.
    pub fn inner_with(&self, o: &LatticeField) -> Result<C64> {
        if self.n() != o.n() {
            return Err(Error::SizeMismatch {
                left: self.n(),
                right: o.n(),
                context: "field pairing",
            });
        }
        let dt = self.dt();
        Ok(self
            .slices
            .iter()
            .zip(&o.slices)
            .map(|(a, b)| crate::group::inner(a, b))
            .sum::<C64>()
            * dt)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner_with(self).expect("same field").re
    }
}

/// Ordered product over the slices of exp(-dt Z_n), the discrete
/// path-ordered exponential.
fn ordered_product(field: &LatticeField) -> ComplexGroupElement {
    let dt = field.dt();
    let mut g = field.spec().identity_c();
    for z in &field.slices {
        g = g.mul(&z.scale(C64::new(-dt, 0.0)).exp());
    }
    g
}

/// Wilson loop of a real connection: P exp(-integral A). The field must
/// be real (E = 0); the result is unitary.
pub fn wilson(a: &LatticeField) -> GroupElement {
    assert!(a.is_real(), "wilson requires a real connection (E = 0)");
    let dt = a.dt();
    let mut g = a.spec().identity();
    for z in a.slices() {
        g = g.mul(&z.real_part().scale(-dt).exp());
    }
    g
}

/// Complexified Wilson loop: the same ordered product with complex
/// slices; lands in K_C and reduces to `wilson` when E = 0.
pub fn wilson_c(z: &LatticeField) -> ComplexGroupElement {
    ordered_product(z)
}

/// Partial ordered product up to slice m (0 <= m <= N): the discrete
/// incomplete Wilson loop. m = N reproduces the full loop.
pub fn incomplete_wilson(a: &LatticeField, m: usize) -> Result<GroupElement> {
    assert!(a.is_real(), "incomplete_wilson requires a real connection");
    if m > a.n() {
        return Err(Error::IndexRange {
            index: m,
            max: a.n(),
        });
    }
    let dt = a.dt();
    let mut g = a.spec().identity();
    for z in &a.slices()[..m] {
        g = g.mul(&z.real_part().scale(-dt).exp());
    }
    Ok(g)
}

/// Slice-wise gauge action Z^chi_n = Ad(chi(t_n)) (Z_n + chi_dot(t_n))
/// with chi_dot = chi^{-1} d chi / dt the analytic logarithmic
/// derivative. The sign of the inhomogeneous term is slaved to the
/// left-to-right path ordering: with U' = -U A, the transformed
/// connection Ad(chi) A + (d chi/dt) chi^{-1} is the one whose Wilson
/// line is chi(0) U(t) chi(t)^{-1}, so based loops leave the holonomy
/// invariant. (The opposite sign pairs with reverse-ordered products.)
pub fn gauge_transform(z: &LatticeField, chi: &SmoothLoop) -> LatticeField {
    if chi.is_identity() {
        // Bit-exact fixed point for the trivial loop.
        return z.clone();
    }
    let n = z.n();
    let slices = (0..n)
        .map(|k| {
            let t = k as f64 / n as f64;
            let shifted = z.slices()[k].add(&chi.log_deriv(t).complexify());
            adjoint(&chi.at(t), &shifted)
        })
        .collect();
    LatticeField::new(slices)
}

/// N group-valued links; the exact-covariance discretization of the
/// connection.
#[derive(Clone, Debug)]
pub struct LinkConfiguration {
    links: Vec<GroupElement>,
}

impl LinkConfiguration {
    pub fn new(links: Vec<GroupElement>) -> Result<Self> {
        for (i, l) in links.iter().enumerate() {
            if l.unitarity_defect() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "link {i} not unitary (defect {:.3e})",
                    l.unitarity_defect()
                )));
            }
        }
        Ok(LinkConfiguration { links })
    }

    /// Links U_n = exp(-dt A_n) of a real connection.
    pub fn from_field(a: &LatticeField) -> Self {
        assert!(a.is_real(), "links require a real connection");
        let dt = a.dt();
        LinkConfiguration {
            links: a
                .slices()
                .iter()
                .map(|z| z.real_part().scale(-dt).exp())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[GroupElement] {
        &self.links
    }

    /// Full ordered product (the holonomy around the circle).
    pub fn holonomy(&self) -> GroupElement {
        let mut g = self.links[0].spec().identity();
        for l in &self.links {
            g = g.mul(l);
        }
        g
    }
}

/// Exact lattice gauge transformation by site values chi(t_0..t_N) with
/// chi(t_0) = chi(t_N) = e: U'_n = chi(t_{n-1}) U_n chi(t_n)^{-1}. The
/// holonomy is conjugation-invariant exactly (and equal for based sites).
pub fn gauge_transform_links(
    u: &LinkConfiguration,
    sites: &[GroupElement],
) -> Result<LinkConfiguration> {
    if sites.len() != u.n() + 1 {
        return Err(Error::SizeMismatch {
            left: sites.len(),
            right: u.n() + 1,
            context: "site values vs links",
        });
    }
    let e = u.links[0].spec().identity();
    if sites[0].dist(&e) > 1e-12 || sites[u.n()].dist(&e) > 1e-12 {
        return Err(Error::InvalidParameter(
            "site values must be based: chi(0) = chi(1) = e".into(),
        ));
    }
    let links = (0..u.n())
        .map(|n| sites[n].mul(&u.links[n]).mul(&sites[n + 1].inverse()))
        .collect();
    Ok(LinkConfiguration { links })
}

/// Gauss-law constraint J(A, E) = E' - [A, E], the covariant derivative
/// of E in the ordering convention fixed above (D = d/dt - [A, .] is the
/// derivative for which D^chi (Ad(chi) E) = Ad(chi) D E). The derivative
/// is a central difference with periodic wrap, preserving discrete
/// integration by parts; the zero field maps to the zero constraint.
pub fn gauss_law(z: &LatticeField) -> LatticeField {
    let n = z.n();
    let dt = z.dt();
    let a = z.a_part();
    let e = z.e_part();
    let slices = (0..n)
        .map(|k| {
            let up = &e[(k + 1) % n];
            let down = &e[(k + n - 1) % n];
            let deriv = up.sub(down).scale(1.0 / (2.0 * dt));
            deriv.sub(&a[k].bracket(&e[k])).complexify()
        })
        .collect();
    LatticeField::new(slices)
}

const ENSEMBLE_HEADER: &str = "# ymloop field ensemble v1";

/// Write an ensemble of fields in the columnar text format
/// `field slice component re im` (whitespace separated, one row per
/// component), preceded by a two-line header.
pub fn write_field_ensemble<W: Write>(fields: &[LatticeField], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{ENSEMBLE_HEADER}")?;
    writeln!(out, "# field slice component re im")?;
    for (fi, f) in fields.iter().enumerate() {
        for (si, s) in f.slices().iter().enumerate() {
            for (ci, c) in s.coeffs().iter().enumerate() {
                writeln!(out, "{fi} {si} {ci} {} {}", c.re, c.im)?;
            }
        }
    }
    Ok(())
}

/// Read an ensemble written by [`write_field_ensemble`].
pub fn read_field_ensemble<R: BufRead>(spec: GroupSpec, input: R) -> Result<Vec<LatticeField>> {
    let dim = spec.algebra_dim();
    let mut rows: Vec<(usize, usize, usize, f64, f64)> = Vec::new();
    for (ln, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::InvalidParameter(format!("read: {e}")))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let parse = |tok: Option<&str>, what: &str| -> Result<f64> {
            tok.ok_or_else(|| {
                Error::InvalidParameter(format!("line {}: missing {what}", ln + 1))
            })?
            .parse::<f64>()
            .map_err(|e| Error::InvalidParameter(format!("line {}: {what}: {e}", ln + 1)))
        };
        let fi = parse(it.next(), "field index")? as usize;
        let si = parse(it.next(), "slice index")? as usize;
        let ci = parse(it.next(), "component")? as usize;
        let re = parse(it.next(), "re")?;
        let im = parse(it.next(), "im")?;
        if ci >= dim {
            return Err(Error::IndexRange {
                index: ci,
                max: dim - 1,
            });
        }
        rows.push((fi, si, ci, re, im));
    }
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let n_fields = rows.iter().map(|r| r.0).max().unwrap() + 1;
    let n_slices = rows.iter().map(|r| r.1).max().unwrap() + 1;
    let mut data = vec![vec![[C64::ZERO; 3]; n_slices]; n_fields];
    for (fi, si, ci, re, im) in rows {
        data[fi][si][ci] = C64::new(re, im);
    }
    Ok(data
        .into_iter()
        .map(|f| {
            LatticeField::new(
                f.into_iter()
                    .map(|c| ComplexAlgebraVector::new(spec, &c[..dim]))
                    .collect(),
            )
        })
        .collect())
}
