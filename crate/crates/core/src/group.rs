//! Matrix Lie group and Lie algebra kernel for K in {U(1), SU(2)} and the
//! complexifications C* and SL(2,C).
//!
//! Conventions fixed here and used everywhere else:
//!
//! - Orthonormal algebra basis: U(1) uses X_1 = i with <X,Y> = -tr(XY);
//!   SU(2) uses X_a = -(i/2) sigma_a with <X,Y> = -2 tr(XY), so that
//!   <X_a, X_b> = delta_ab and the Casimir eigenvalue on the spin-j
//!   representation is exactly j(j+1).
//! - The sesquilinear pairing is antilinear in the FIRST slot.
//! - Characters are evaluated as Chebyshev polynomials of the second kind
//!   in half the trace, chi_j(g) = U_{2j}(tr g / 2), which is stable
//!   through degenerate eigenvalues (no 0/0 at the identity or at -1).

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

const I: C64 = C64::new(0.0, 1.0);

/// Which compact structure group the kernel is configured for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    U1,
    Su2,
}

impl GroupSpec {
    pub fn matrix_dim(self) -> usize {
        match self {
            GroupSpec::U1 => 1,
            GroupSpec::Su2 => 2,
        }
    }

    /// Dimension n of the real Lie algebra (1 or 3).
    pub fn algebra_dim(self) -> usize {
        match self {
            GroupSpec::U1 => 1,
            GroupSpec::Su2 => 3,
        }
    }

    /// Scale s in <X,Y> = -s tr(XY) making the chosen basis orthonormal.
    pub fn trace_scale(self) -> f64 {
        match self {
            GroupSpec::U1 => 1.0,
            GroupSpec::Su2 => 2.0,
        }
    }

    pub fn identity(self) -> GroupElement {
        match self {
            GroupSpec::U1 => GroupElement::U1(C64::new(1.0, 0.0)),
            GroupSpec::Su2 => GroupElement::Su2(Mat2::identity()),
        }
    }

    pub fn identity_c(self) -> ComplexGroupElement {
        self.identity().complexify()
    }

    /// Haar-distributed sample: uniform angle for U(1), uniform on S^3 for
    /// SU(2).
    pub fn haar_sample<R: Rng + ?Sized>(self, rng: &mut R) -> GroupElement {
        match self {
            GroupSpec::U1 => {
                let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                GroupElement::U1(C64::from_polar(1.0, theta))
            }
            GroupSpec::Su2 => {
                // Normalized 4-vector of standard normals is uniform on S^3.
                let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
                let n = (q.iter().map(|x| x * x).sum::<f64>()).sqrt();
                let (a, b, c, d) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
                // g = a*I + b*(-i sigma_1) + c*(-i sigma_2) + d*(-i sigma_3)
                GroupElement::Su2(Mat2::new(
                    C64::new(a, -d),
                    C64::new(-c, -b),
                    C64::new(c, -b),
                    C64::new(a, d),
                ))
            }
        }
    }
}

/// Dense 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub e: [[C64; 2]; 2],
}

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2 { e: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        Mat2::new(C64::ZERO, C64::ZERO, C64::ZERO, C64::ZERO)
    }

    pub fn identity() -> Self {
        Mat2::new(C64::ONE, C64::ZERO, C64::ZERO, C64::ONE)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let mut r = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] = self.e[i][0] * o.e[0][j] + self.e[i][1] * o.e[1][j];
            }
        }
        r
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] += o.e[i][j];
            }
        }
        r
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] -= o.e[i][j];
            }
        }
        r
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] *= s;
            }
        }
        r
    }

    pub fn trace(&self) -> C64 {
        self.e[0][0] + self.e[1][1]
    }

    pub fn det(&self) -> C64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Mat2 {
        Mat2::new(
            self.e[0][0].conj(),
            self.e[1][0].conj(),
            self.e[0][1].conj(),
            self.e[1][1].conj(),
        )
    }

    pub fn inverse(&self) -> Mat2 {
        let d = self.det();
        Mat2::new(
            self.e[1][1] / d,
            -self.e[0][1] / d,
            -self.e[1][0] / d,
            self.e[0][0] / d,
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += self.e[i][j].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// exp(M) for traceless M via M^2 = -det(M) I:
    /// exp(M) = cos(w) I + sinc(w) M with w^2 = det(M).
    pub fn exp_traceless(&self) -> Mat2 {
        let w = self.det().sqrt();
        let (c, s) = (w.cos(), sinc(w));
        Mat2::identity().scale(c).add(&self.scale(s))
    }
}

/// sin(w)/w, series near 0.
fn sinc(w: C64) -> C64 {
    if w.norm() < 1e-4 {
        let w2 = w * w;
        C64::ONE - w2 / 6.0 + w2 * w2 / 120.0
    } else {
        w.sin() / w
    }
}

/// Chebyshev polynomial of the second kind U_n(c) by forward recurrence.
/// For c = cos z this is sin((n+1)z)/sin(z), i.e. the SU(2) character of the
/// (n+1)-dimensional representation at an element of trace 2c.
pub fn chebyshev_u(n: u32, c: C64) -> C64 {
    let mut um1 = C64::ONE; // U_0
    if n == 0 {
        return um1;
    }
    let two_c = c + c;
    let mut u = two_c; // U_1
    for _ in 1..n {
        let next = two_c * u - um1;
        um1 = u;
        u = next;
    }
    u
}

/// Point of the compact group K.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroupElement {
    U1(C64),
    Su2(Mat2),
}

impl GroupElement {
    pub fn spec(&self) -> GroupSpec {
        match self {
            GroupElement::U1(_) => GroupSpec::U1,
            GroupElement::Su2(_) => GroupSpec::Su2,
        }
    }

    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        match (self, o) {
            (GroupElement::U1(a), GroupElement::U1(b)) => GroupElement::U1(a * b),
            (GroupElement::Su2(a), GroupElement::Su2(b)) => GroupElement::Su2(a.mul(b)),
            _ => panic!("group mismatch"),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            // Unitary: inverse = conjugate (transpose).
            GroupElement::U1(a) => GroupElement::U1(a.conj()),
            GroupElement::Su2(a) => GroupElement::Su2(a.dagger()),
        }
    }

    pub fn trace(&self) -> C64 {
        match self {
            GroupElement::U1(a) => *a,
            GroupElement::Su2(a) => a.trace(),
        }
    }

    pub fn complexify(&self) -> ComplexGroupElement {
        match self {
            GroupElement::U1(a) => ComplexGroupElement::U1(*a),
            GroupElement::Su2(a) => ComplexGroupElement::Su2(*a),
        }
    }

    /// Frobenius distance to another element.
    pub fn dist(&self, o: &GroupElement) -> f64 {
        match (self, o) {
            (GroupElement::U1(a), GroupElement::U1(b)) => (a - b).norm(),
            (GroupElement::Su2(a), GroupElement::Su2(b)) => a.sub(b).frobenius_norm(),
            _ => panic!("group mismatch"),
        }
    }

    /// ||g^dagger g - I||_F, zero for exactly unitary elements.
    pub fn unitarity_defect(&self) -> f64 {
        match self {
            GroupElement::U1(a) => (a.norm_sqr() - 1.0).abs(),
            GroupElement::Su2(a) => a.dagger().mul(a).sub(&Mat2::identity()).frobenius_norm(),
        }
    }

    /// Principal logarithm as an algebra vector. For SU(2) the branch with
    /// rotation angle in [0, 2 pi) is taken; the direction at the antipode
    /// -I is arbitrary (measure zero).
    pub fn log(&self) -> AlgebraVector {
        match self {
            GroupElement::U1(a) => AlgebraVector::new(GroupSpec::U1, &[a.im.atan2(a.re)]),
            GroupElement::Su2(g) => {
                // g = cos(theta/2) I + sin(theta/2) sum_a n_a (-i sigma_a);
                // the skew part (g - g^dagger)/2 has coefficients
                // 2 sin(theta/2) n_a in the X_a basis.
                let skew = g.sub(&g.dagger()).scale(C64::new(0.5, 0.0));
                let s = extract_coeffs(GroupSpec::Su2, &CMatrixView::Su2(skew));
                let sv = [s[0].re, s[1].re, s[2].re];
                let sn = (sv.iter().map(|x| x * x).sum::<f64>()).sqrt();
                let cos_half = 0.5 * g.trace().re;
                let theta = 2.0 * (0.5 * sn).atan2(cos_half);
                if sn < 1e-14 {
                    // Near I (theta ~ 0, log ~ skew coefficients) or near -I
                    // (direction undefined; return theta along X_3).
                    if cos_half > 0.0 {
                        AlgebraVector::new(GroupSpec::Su2, &sv)
                    } else {
                        AlgebraVector::new(GroupSpec::Su2, &[0.0, 0.0, theta])
                    }
                } else {
                    let f = theta / sn;
                    AlgebraVector::new(GroupSpec::Su2, &[f * sv[0], f * sv[1], f * sv[2]])
                }
            }
        }
    }
}

/// Point of the complexification K_C (C* or SL(2,C)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComplexGroupElement {
    U1(C64),
    Su2(Mat2),
}

impl ComplexGroupElement {
    pub fn spec(&self) -> GroupSpec {
        match self {
            ComplexGroupElement::U1(_) => GroupSpec::U1,
            ComplexGroupElement::Su2(_) => GroupSpec::Su2,
        }
    }

    pub fn mul(&self, o: &ComplexGroupElement) -> ComplexGroupElement {
        match (self, o) {
            (ComplexGroupElement::U1(a), ComplexGroupElement::U1(b)) => {
                ComplexGroupElement::U1(a * b)
            }
            (ComplexGroupElement::Su2(a), ComplexGroupElement::Su2(b)) => {
                ComplexGroupElement::Su2(a.mul(b))
            }
            _ => panic!("group mismatch"),
        }
    }

    pub fn inverse(&self) -> ComplexGroupElement {
        match self {
            ComplexGroupElement::U1(a) => ComplexGroupElement::U1(C64::ONE / a),
            ComplexGroupElement::Su2(a) => ComplexGroupElement::Su2(a.inverse()),
        }
    }

    /// Conjugate transpose (sigma^dagger).
    pub fn dagger(&self) -> ComplexGroupElement {
        match self {
            ComplexGroupElement::U1(a) => ComplexGroupElement::U1(a.conj()),
            ComplexGroupElement::Su2(a) => ComplexGroupElement::Su2(a.dagger()),
        }
    }

    pub fn trace(&self) -> C64 {
        match self {
            ComplexGroupElement::U1(a) => *a,
            ComplexGroupElement::Su2(a) => a.trace(),
        }
    }

    pub fn det(&self) -> C64 {
        match self {
            ComplexGroupElement::U1(a) => *a,
            ComplexGroupElement::Su2(a) => a.det(),
        }
    }

    pub fn dist(&self, o: &ComplexGroupElement) -> f64 {
        match (self, o) {
            (ComplexGroupElement::U1(a), ComplexGroupElement::U1(b)) => (a - b).norm(),
            (ComplexGroupElement::Su2(a), ComplexGroupElement::Su2(b)) => {
                a.sub(b).frobenius_norm()
            }
            _ => panic!("group mismatch"),
        }
    }

    /// |Im z| where the eigenvalues are e^{+-iz}: the distance from the
    /// compact group in eigenvalue terms. Zero on K.
    pub fn im_z(&self) -> f64 {
        match self {
            ComplexGroupElement::U1(a) => a.norm().ln().abs(),
            ComplexGroupElement::Su2(m) => {
                // tr = 2 cos z; Im(acos) is the hyperbolic displacement.
                let z = (m.trace() * 0.5).acos();
                z.im.abs()
            }
        }
    }

    /// Squared norm of the polar (non-compact) displacement: write
    /// sigma = k exp(sum_a p_a (i X_a)) with k in K and p real; returns |p|^2.
    pub fn polar_log_norm_sq(&self) -> f64 {
        match self {
            ComplexGroupElement::U1(a) => {
                let r = a.norm().ln();
                r * r
            }
            ComplexGroupElement::Su2(m) => {
                // sigma^dagger sigma = exp(sum_a p_a sigma_a), trace 2 cosh|p|.
                let t = 0.5 * m.dagger().mul(m).trace().re;
                let p = t.max(1.0).acosh();
                p * p
            }
        }
    }
}

/// View over the matrix form of an algebra element, for coefficient
/// extraction shared between the real and complex cases.
enum CMatrixView {
    U1(C64),
    Su2(Mat2),
}

/// c_a = -s tr(X_a M) with the plain (bilinear) trace; inverts the basis
/// expansion M = sum_a c_a X_a for complex coefficients c.
fn extract_coeffs(spec: GroupSpec, m: &CMatrixView) -> [C64; 3] {
    match (spec, m) {
        (GroupSpec::U1, CMatrixView::U1(v)) => [-I * v, C64::ZERO, C64::ZERO],
        (GroupSpec::Su2, CMatrixView::Su2(m)) => {
            // X_1 = [[0,-i/2],[-i/2,0]], X_2 = [[0,-1/2],[1/2,0]],
            // X_3 = [[-i/2,0],[0,i/2]]; c_a = -2 tr(X_a M).
            let c1 = -2.0 * (-I * 0.5 * m.e[1][0] + -I * 0.5 * m.e[0][1]);
            let c2 = -2.0 * (-0.5 * m.e[1][0] + 0.5 * m.e[0][1]);
            let c3 = -2.0 * (-I * 0.5 * m.e[0][0] + I * 0.5 * m.e[1][1]);
            [c1, c2, c3]
        }
        _ => panic!("group mismatch"),
    }
}

/// Real algebra vector: coefficients in the orthonormal basis {X_a}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraVector {
    spec: GroupSpec,
    c: [f64; 3],
}

impl AlgebraVector {
    pub fn new(spec: GroupSpec, coeffs: &[f64]) -> Self {
        assert_eq!(coeffs.len(), spec.algebra_dim(), "coefficient count");
        let mut c = [0.0; 3];
        c[..coeffs.len()].copy_from_slice(coeffs);
        AlgebraVector { spec, c }
    }

    pub fn zero(spec: GroupSpec) -> Self {
        AlgebraVector { spec, c: [0.0; 3] }
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.spec.algebra_dim()]
    }

    pub fn coeff(&self, a: usize) -> f64 {
        self.c[a]
    }

    pub fn add(&self, o: &AlgebraVector) -> AlgebraVector {
        let mut r = *self;
        for a in 0..3 {
            r.c[a] += o.c[a];
        }
        r
    }

    pub fn sub(&self, o: &AlgebraVector) -> AlgebraVector {
        let mut r = *self;
        for a in 0..3 {
            r.c[a] -= o.c[a];
        }
        r
    }

    pub fn scale(&self, s: f64) -> AlgebraVector {
        let mut r = *self;
        for a in 0..3 {
            r.c[a] *= s;
        }
        r
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum()
    }

    /// <X,Y> restricted to the real algebra.
    pub fn dot(&self, o: &AlgebraVector) -> f64 {
        (0..3).map(|a| self.c[a] * o.c[a]).sum()
    }

    /// Lie bracket [X,Y]; for SU(2) the structure constants in this basis
    /// are the Levi-Civita symbol, for U(1) the bracket vanishes.
    pub fn bracket(&self, o: &AlgebraVector) -> AlgebraVector {
        match self.spec {
            GroupSpec::U1 => AlgebraVector::zero(GroupSpec::U1),
            GroupSpec::Su2 => {
                let (x, y) = (&self.c, &o.c);
                AlgebraVector::new(
                    GroupSpec::Su2,
                    &[
                        x[1] * y[2] - x[2] * y[1],
                        x[2] * y[0] - x[0] * y[2],
                        x[0] * y[1] - x[1] * y[0],
                    ],
                )
            }
        }
    }

    pub fn complexify(&self) -> ComplexAlgebraVector {
        ComplexAlgebraVector {
            spec: self.spec,
            c: std::array::from_fn(|a| C64::new(self.c[a], 0.0)),
        }
    }

    fn to_matrix(self) -> CMatrixView {
        self.complexify().to_matrix()
    }

    /// Matrix exponential of the matrix form; lands in K.
    pub fn exp(&self) -> GroupElement {
        match self.to_matrix() {
            CMatrixView::U1(v) => GroupElement::U1(v.exp()),
            CMatrixView::Su2(m) => GroupElement::Su2(m.exp_traceless()),
        }
    }
}

/// Complexified algebra vector: complex coefficients in the same basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexAlgebraVector {
    spec: GroupSpec,
    c: [C64; 3],
}

impl ComplexAlgebraVector {
    pub fn new(spec: GroupSpec, coeffs: &[C64]) -> Self {
        assert_eq!(coeffs.len(), spec.algebra_dim(), "coefficient count");
        let mut c = [C64::ZERO; 3];
        c[..coeffs.len()].copy_from_slice(coeffs);
        ComplexAlgebraVector { spec, c }
    }

    pub fn zero(spec: GroupSpec) -> Self {
        ComplexAlgebraVector {
            spec,
            c: [C64::ZERO; 3],
        }
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.c[..self.spec.algebra_dim()]
    }

    pub fn coeff(&self, a: usize) -> C64 {
        self.c[a]
    }

    pub fn add(&self, o: &ComplexAlgebraVector) -> ComplexAlgebraVector {
        let mut r = *self;
        for a in 0..3 {
            r.c[a] += o.c[a];
        }
        r
    }

    pub fn sub(&self, o: &ComplexAlgebraVector) -> ComplexAlgebraVector {
        let mut r = *self;
        for a in 0..3 {
            r.c[a] -= o.c[a];
        }
        r
    }

    pub fn scale(&self, s: C64) -> ComplexAlgebraVector {
        let mut r = *self;
        for a in 0..3 {
            r.c[a] *= s;
        }
        r
    }

    pub fn real_part(&self) -> AlgebraVector {
        AlgebraVector {
            spec: self.spec,
            c: std::array::from_fn(|a| self.c[a].re),
        }
    }

    pub fn imag_part(&self) -> AlgebraVector {
        AlgebraVector {
            spec: self.spec,
            c: std::array::from_fn(|a| self.c[a].im),
        }
    }

    pub fn conj(&self) -> ComplexAlgebraVector {
        ComplexAlgebraVector {
            spec: self.spec,
            c: std::array::from_fn(|a| self.c[a].conj()),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }

    fn to_matrix(self) -> CMatrixView {
        match self.spec {
            GroupSpec::U1 => CMatrixView::U1(I * self.c[0]),
            GroupSpec::Su2 => {
                let h = C64::new(0.5, 0.0);
                let (c1, c2, c3) = (self.c[0], self.c[1], self.c[2]);
                CMatrixView::Su2(Mat2::new(
                    -I * h * c3,
                    -I * h * c1 - h * c2,
                    -I * h * c1 + h * c2,
                    I * h * c3,
                ))
            }
        }
    }

    /// Matrix exponential; lands in K_C.
    pub fn exp(&self) -> ComplexGroupElement {
        match self.to_matrix() {
            CMatrixView::U1(v) => ComplexGroupElement::U1(v.exp()),
            CMatrixView::Su2(m) => ComplexGroupElement::Su2(m.exp_traceless()),
        }
    }
}

/// Sesquilinear pairing, antilinear in the FIRST argument; restricts to the
/// real invariant inner product on the real algebra.
pub fn inner(x: &ComplexAlgebraVector, y: &ComplexAlgebraVector) -> C64 {
    assert_eq!(x.spec, y.spec, "group mismatch");
    (0..x.spec.algebra_dim())
        .map(|a| x.c[a].conj() * y.c[a])
        .sum()
}

/// Adjoint action coefficients of g X g^{-1}; preserves the real subalgebra
/// for g in K and is orthogonal on coefficients.
pub fn adjoint(g: &GroupElement, x: &ComplexAlgebraVector) -> ComplexAlgebraVector {
    match (g, x.spec) {
        (GroupElement::U1(_), GroupSpec::U1) => *x,
        (GroupElement::Su2(gm), GroupSpec::Su2) => {
            let m = match x.to_matrix() {
                CMatrixView::Su2(m) => m,
                _ => unreachable!(),
            };
            let conjd = gm.mul(&m).mul(&gm.dagger());
            let c = extract_coeffs(GroupSpec::Su2, &CMatrixView::Su2(conjd));
            ComplexAlgebraVector::new(GroupSpec::Su2, &c)
        }
        _ => panic!("group mismatch"),
    }
}

/// Adjoint action on a real algebra vector (stays real for g in K).
pub fn adjoint_real(g: &GroupElement, x: &AlgebraVector) -> AlgebraVector {
    adjoint(g, &x.complexify()).real_part()
}

/// Irreducible representation label: the integer weight for U(1), twice the
/// spin for SU(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rep {
    U1(i32),
    Su2 { twice_j: u32 },
}

impl Rep {
    pub fn spec(&self) -> GroupSpec {
        match self {
            Rep::U1(_) => GroupSpec::U1,
            Rep::Su2 { .. } => GroupSpec::Su2,
        }
    }

    pub fn dim(&self) -> f64 {
        match self {
            Rep::U1(_) => 1.0,
            Rep::Su2 { twice_j } => (twice_j + 1) as f64,
        }
    }

    /// Eigenvalue of -Laplacian on the characters of this representation:
    /// m^2 for U(1), j(j+1) for SU(2) in the normalization fixed by the
    /// orthonormal basis.
    pub fn casimir(&self) -> f64 {
        match self {
            Rep::U1(m) => (*m as f64) * (*m as f64),
            Rep::Su2 { twice_j } => {
                let j = *twice_j as f64 / 2.0;
                j * (j + 1.0)
            }
        }
    }
}

/// Character chi_j analytically continued to K_C: w^m for U(1),
/// U_{2j}(tr sigma / 2) for SU(2). Holomorphic in sigma; the Chebyshev form
/// has no degenerate-eigenvalue singularity.
pub fn character(rep: Rep, sigma: &ComplexGroupElement) -> C64 {
    match (rep, sigma) {
        (Rep::U1(m), ComplexGroupElement::U1(w)) => {
            if m >= 0 {
                w.powi(m)
            } else {
                C64::ONE / w.powi(-m)
            }
        }
        (Rep::Su2 { twice_j }, ComplexGroupElement::Su2(g)) => {
            chebyshev_u(twice_j, g.trace() * 0.5)
        }
        _ => panic!("group mismatch"),
    }
}

/// Character on the compact group.
pub fn character_k(rep: Rep, k: &GroupElement) -> C64 {
    character(rep, &k.complexify())
}
