//! Reference-disc quadrature, pushforward to fiber domains, boundary
//! quadrature with arc-length weights, and fiber-map inversion.
//!
//! The reference domain is the open unit disc; every fiber `X_t` is its
//! image under the family map `f(t, .)`. Area integrals on `X_t` are
//! computed by pushing a fixed polar quadrature forward through `f`,
//! weighting by the real Jacobian `|f_z|^2 - |f_zbar|^2`.

use num_complex::Complex64;

use crate::family::DeformationFamily;
use crate::{Error, Result};

/// Default bound for the base parameter of a deformation family.
pub const DEFAULT_T_MAX: f64 = 0.5;

/// Base coordinate `t` on the parameter disc, with its admissible radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationParameter {
    t: Complex64,
    t_max: f64,
}

impl DeformationParameter {
    /// Parameter with the default bound `|t| <= 0.5`.
    pub fn new(t: Complex64) -> Result<Self> {
        Self::with_t_max(t, DEFAULT_T_MAX)
    }

    pub fn with_t_max(t: Complex64, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0 && t_max < 1.0) || !(t.norm() <= t_max) {
            return Err(Error::ParameterOutOfRange {
                abs_t: t.norm(),
                t_max,
            });
        }
        Ok(Self { t, t_max })
    }

    pub fn zero() -> Self {
        Self {
            t: Complex64::new(0.0, 0.0),
            t_max: DEFAULT_T_MAX,
        }
    }

    pub fn value(&self) -> Complex64 {
        self.t
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Shifted parameter `t + dt`, used by finite-difference stencils.
    pub fn offset(&self, dt: Complex64) -> Result<Self> {
        Self::with_t_max(self.t + dt, self.t_max)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence; exact for polynomials of
/// degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess, standard for Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = d;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Polar quadrature for Lebesgue area measure on the unit disc.
///
/// Gauss-Legendre in radius against the density `2 pi r dr`, crossed with
/// equally spaced angles. Exact on `z^j zbar^k` for `j + k <= 2 n_r - 1`
/// and `|j - k| < n_theta`.
#[derive(Debug, Clone)]
pub struct ReferenceQuadrature {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub n_r: usize,
    pub n_theta: usize,
}

pub fn build_reference_quadrature(n_r: usize, n_theta: usize) -> Result<ReferenceQuadrature> {
    if n_r < 2 || n_theta < 4 {
        return Err(Error::QuadratureTooSmall { n_r, n_theta });
    }
    let (gl_nodes, gl_weights) = gauss_legendre(n_r);
    let mut nodes = Vec::with_capacity(n_r * n_theta);
    let mut weights = Vec::with_capacity(n_r * n_theta);
    for i in 0..n_r {
        // Map [-1, 1] to [0, 1]; radial weight carries the 2 pi r density.
        let r = 0.5 * (gl_nodes[i] + 1.0);
        let w_r = 0.5 * gl_weights[i] * 2.0 * std::f64::consts::PI * r;
        for k in 0..n_theta {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n_theta as f64;
            nodes.push(Complex64::from_polar(r, theta));
            weights.push(w_r / n_theta as f64);
        }
    }
    Ok(ReferenceQuadrature {
        nodes,
        weights,
        n_r,
        n_theta,
    })
}

impl ReferenceQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lebesgue-measure quadrature of a complex-valued integrand.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(*z) * *w;
        }
        acc
    }
}

/// Area quadrature on a fiber `X_t`, obtained by pushing the reference
/// quadrature forward through the family map.
#[derive(Debug, Clone)]
pub struct FiberQuadrature {
    pub t: DeformationParameter,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub jacobians: Vec<f64>,
}

impl FiberQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(*z) * *w;
        }
        acc
    }

    /// Quadrature taken verbatim from explicit nodes and weights.
    ///
    /// Jacobians are set to 1; used by tests that build discs directly.
    pub fn from_parts(t: DeformationParameter, nodes: Vec<Complex64>, weights: Vec<f64>) -> Self {
        let jacobians = vec![1.0; nodes.len()];
        Self {
            t,
            nodes,
            weights,
            jacobians,
        }
    }
}

/// Pushforward of the reference quadrature to the fiber `X_t`.
///
/// Node `f(t, z_q)` carries weight `w_q (|f_z|^2 - |f_zbar|^2)(t, z_q)`.
pub fn pushforward_area(
    family: &DeformationFamily,
    t: &DeformationParameter,
    reference: &ReferenceQuadrature,
) -> Result<FiberQuadrature> {
    let mut nodes = Vec::with_capacity(reference.len());
    let mut weights = Vec::with_capacity(reference.len());
    let mut jacobians = Vec::with_capacity(reference.len());
    for (z, w) in reference.nodes.iter().zip(&reference.weights) {
        let jet = family.jet(t, *z);
        let jac = jet.f_z.norm_sqr() - jet.f_zbar.norm_sqr();
        if jac <= 0.0 {
            return Err(Error::NonInjectiveFiber(format!(
                "jacobian {jac:.3e} at reference node {z}"
            )));
        }
        nodes.push(jet.f);
        weights.push(w * jac);
        jacobians.push(jac);
    }
    Ok(FiberQuadrature {
        t: *t,
        nodes,
        weights,
        jacobians,
    })
}

/// Arc-length quadrature on the fiber boundary `f(t, |z| = 1)`.
#[derive(Debug, Clone)]
pub struct BoundaryQuadrature {
    pub t: DeformationParameter,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub source_angles: Vec<f64>,
}

impl BoundaryQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Distance from the origin to the nearest boundary node.
    pub fn inradius(&self) -> f64 {
        self.nodes
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Trapezoid rule on the boundary circle, weighted by `|d f / d theta|`.
///
/// Spectrally accurate for analytic fiber maps.
pub fn boundary_quadrature(
    family: &DeformationFamily,
    t: &DeformationParameter,
    n_b: usize,
) -> Result<BoundaryQuadrature> {
    if n_b < 4 {
        return Err(Error::BoundaryTooSmall { n_b });
    }
    let mut nodes = Vec::with_capacity(n_b);
    let mut weights = Vec::with_capacity(n_b);
    let mut source_angles = Vec::with_capacity(n_b);
    let i = Complex64::new(0.0, 1.0);
    for k in 0..n_b {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n_b as f64;
        let z = Complex64::from_polar(1.0, theta);
        let jet = family.jet(t, z);
        let jac = jet.f_z.norm_sqr() - jet.f_zbar.norm_sqr();
        if jac <= 0.0 {
            return Err(Error::NonInjectiveFiber(format!(
                "boundary jacobian {jac:.3e} at theta = {theta:.4}"
            )));
        }
        // d/d theta of f(t, e^{i theta}): chain rule through z and zbar.
        let df_dtheta = jet.f_z * i * z - jet.f_zbar * i * z.conj();
        nodes.push(jet.f);
        weights.push(df_dtheta.norm() * 2.0 * std::f64::consts::PI / n_b as f64);
        source_angles.push(theta);
    }
    Ok(BoundaryQuadrature {
        t: *t,
        nodes,
        weights,
        source_angles,
    })
}

/// Guard band for the reference-disc membership test after inversion.
/// Boundary nodes invert to |z| = 1 up to roundoff; they must not be
/// rejected.
const INSIDE_GUARD: f64 = 1e-8;

/// Solves `f(t, z) = w` for `z` in the closed reference disc.
pub fn invert_fiber_map(
    family: &DeformationFamily,
    t: &DeformationParameter,
    w: Complex64,
) -> Result<Complex64> {
    let z = invert_raw(family, t.value(), w)?;
    if z.norm() >= 1.0 + INSIDE_GUARD {
        return Err(Error::PointOutsideFiber { abs_z: z.norm() });
    }
    Ok(z)
}

/// Newton inversion without the disc-membership check.
///
/// The defining-function machinery evaluates `f^{-1}` slightly outside the
/// closed fiber when finite differences straddle the boundary, and stencil
/// offsets may step just past `t_max`, so this takes a raw parameter.
pub(crate) fn invert_raw(
    family: &DeformationFamily,
    t: Complex64,
    w: Complex64,
) -> Result<Complex64> {
    if let Some(z) = family.invert_closed_form(t, w) {
        return Ok(z);
    }
    // Newton on the real 2-dimensional system, seeded at z0 = w.
    let mut z = w;
    let mut best = z;
    let mut best_res = f64::INFINITY;
    for iteration in 0..50 {
        let jet = family.jet_raw(t, z);
        let residual = jet.f - w;
        let res_norm = residual.norm();
        if res_norm < best_res {
            best_res = res_norm;
            best = z;
        }
        if res_norm < 1e-15 {
            return Ok(z);
        }
        let det = jet.f_z.norm_sqr() - jet.f_zbar.norm_sqr();
        if det <= 0.0 {
            return Err(Error::InversionDiverged {
                iterations: iteration,
                residual: res_norm,
            });
        }
        // Solve f_z d + f_zbar conj(d) = -(f - w) for the correction d.
        let delta = (jet.f_z.conj() * (-residual) - jet.f_zbar * (-residual).conj()) / det;
        z += delta;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InversionDiverged {
                iterations: iteration,
                residual: res_norm,
            });
        }
    }
    if best_res < 1e-12 {
        return Ok(best);
    }
    Err(Error::InversionDiverged {
        iterations: 50,
        residual: best_res,
    })
}
