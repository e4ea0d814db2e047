//! Deformation families of the unit disc: holomorphic motions and
//! Hartogs-type radial families, their Wirtinger jets, admissible vector
//! fields `V = d/dt - alpha d/dmu`, defining-function Hessians, and the
//! Levi-form boundary invariant `k2`.

use num_complex::Complex64;

use crate::geometry::{invert_raw, BoundaryQuadrature, DeformationParameter, DEFAULT_T_MAX};
use crate::{Error, Result};

/// One term `c t^p z^q` of a motion holomorphic in both variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrivialTerm {
    pub t_pow: u32,
    pub z_pow: u32,
    pub coeff: Complex64,
}

/// One term `c t^p z^q zbar^r` of a polynomial motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionTerm {
    pub t_pow: u32,
    pub z_pow: u32,
    pub zbar_pow: u32,
    pub coeff: Complex64,
}

/// One term `s t^p tbar^q` of the log-radius expansion of a radial family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialTerm {
    pub t_pow: u32,
    pub tbar_pow: u32,
    pub coeff: Complex64,
}

#[derive(Debug, Clone)]
enum FamilyKind {
    /// `f(t, z) = z + a(t) zbar` with `a(0) = 0`.
    Affine { a: Vec<Complex64> },
    /// `f(t, z) = z + sum c t^p z^q`, holomorphic in both variables.
    Trivial { terms: Vec<TrivialTerm> },
    /// `f(t, z) = z + sum c t^p z^q zbar^r`, holomorphic in `t`.
    Polynomial { terms: Vec<MotionTerm> },
    /// `f(t, z) = r(t) z` with `r(t) = exp(sum s t^p tbar^q)`, `r(0) = 1`.
    Radial { log_terms: Vec<RadialTerm> },
}

/// A smooth family of fiber domains `X_t = f(t, D)` over the parameter disc.
///
/// Motion kinds satisfy `f(0, z) = z` and are holomorphic in `t`; the
/// radial kind is a Hartogs-type family `f(t, z) = r(t) z` with a smooth
/// positive radius depending on `(t, tbar)`. Construction rejects families
/// whose Beltrami coefficient exceeds `1 - 1e-3` or whose Jacobian drops
/// below `1e-3` anywhere on a sample grid over `|t| <= 0.5`, `|z| <= 1`.
#[derive(Debug, Clone)]
pub struct DeformationFamily {
    kind: FamilyKind,
}

/// Margin below 1 demanded of the sampled Beltrami coefficient.
const INJECTIVITY_MARGIN: f64 = 1e-3;

/// Wirtinger jet of the fiber map at a point, including the Beltrami
/// coefficient `J = f_zbar / f_z` and its `t`-derivative.
#[derive(Debug, Clone, Copy)]
pub struct FiberJet {
    pub f: Complex64,
    pub f_z: Complex64,
    pub f_zbar: Complex64,
    pub f_t: Complex64,
    pub f_zt: Complex64,
    pub f_zbart: Complex64,
    pub beltrami: Complex64,
    pub beltrami_t: Complex64,
}

impl DeformationFamily {
    /// Affine motion `f = z + a(t) zbar`; `a` lists coefficients of
    /// `1, t, t^2, ...` and must have zero constant term.
    pub fn affine(a: Vec<Complex64>) -> Result<Self> {
        if let Some(a0) = a.first() {
            if a0.norm() != 0.0 {
                return Err(Error::InvalidFamily(format!(
                    "affine motion needs a(0) = 0, got a(0) = {a0}"
                )));
            }
        }
        let family = Self {
            kind: FamilyKind::Affine { a },
        };
        family.validate_injectivity()?;
        Ok(family)
    }

    /// The identity motion `f(t, z) = z`.
    pub fn identity() -> Self {
        Self {
            kind: FamilyKind::Affine { a: Vec::new() },
        }
    }

    /// Motion holomorphic in both variables, `g = z + sum c t^p z^q` with
    /// all `p >= 1`.
    pub fn trivial(terms: Vec<(u32, u32, Complex64)>) -> Result<Self> {
        let terms: Vec<TrivialTerm> = terms
            .into_iter()
            .map(|(t_pow, z_pow, coeff)| TrivialTerm {
                t_pow,
                z_pow,
                coeff,
            })
            .collect();
        if terms.iter().any(|term| term.t_pow == 0) {
            return Err(Error::InvalidFamily(
                "trivial motion terms must carry t^p with p >= 1 so that g(0, z) = z".into(),
            ));
        }
        let family = Self {
            kind: FamilyKind::Trivial { terms },
        };
        family.validate_injectivity()?;
        Ok(family)
    }

    /// Polynomial motion `f = z + sum c t^p z^q zbar^r` with all `p >= 1`.
    pub fn polynomial(terms: Vec<(u32, u32, u32, Complex64)>) -> Result<Self> {
        let terms: Vec<MotionTerm> = terms
            .into_iter()
            .map(|(t_pow, z_pow, zbar_pow, coeff)| MotionTerm {
                t_pow,
                z_pow,
                zbar_pow,
                coeff,
            })
            .collect();
        if terms.iter().any(|term| term.t_pow == 0) {
            return Err(Error::InvalidFamily(
                "polynomial motion terms must carry t^p with p >= 1 so that f(0, z) = z".into(),
            ));
        }
        let family = Self {
            kind: FamilyKind::Polynomial { terms },
        };
        family.validate_injectivity()?;
        Ok(family)
    }

    /// Radial family `f = r(t) z`, `r = exp(sum s t^p tbar^q)`.
    ///
    /// The exponent must be Hermitian-symmetric (each term `(p, q, s)`
    /// paired with `(q, p, conj s)`) so the radius is real, and must have
    /// no constant term so that `r(0) = 1`.
    pub fn radial(log_terms: Vec<(u32, u32, Complex64)>) -> Result<Self> {
        let log_terms: Vec<RadialTerm> = log_terms
            .into_iter()
            .map(|(t_pow, tbar_pow, coeff)| RadialTerm {
                t_pow,
                tbar_pow,
                coeff,
            })
            .collect();
        if log_terms
            .iter()
            .any(|term| term.t_pow == 0 && term.tbar_pow == 0)
        {
            return Err(Error::InvalidFamily(
                "radial family log-radius must vanish at t = 0".into(),
            ));
        }
        for term in &log_terms {
            let partner: Complex64 = log_terms
                .iter()
                .filter(|other| other.t_pow == term.tbar_pow && other.tbar_pow == term.t_pow)
                .map(|other| other.coeff)
                .sum();
            if (partner - term.coeff.conj()).norm() > 1e-12 {
                return Err(Error::InvalidFamily(format!(
                    "radial log-radius not Hermitian-symmetric at (p, q) = ({}, {})",
                    term.t_pow, term.tbar_pow
                )));
            }
        }
        let family = Self {
            kind: FamilyKind::Radial { log_terms },
        };
        family.validate_injectivity()?;
        Ok(family)
    }

    /// The calibration family `r(t) = exp(-|t|^2)`.
    pub fn radial_gaussian() -> Result<Self> {
        Self::radial(vec![(1, 1, Complex64::new(-1.0, 0.0))])
    }

    /// Truncated scaling motion `g(t, z) = exp(lambda t) z`.
    pub fn scaling_motion(lambda: Complex64, order: u32) -> Result<Self> {
        let mut terms = Vec::new();
        let mut coeff = Complex64::new(1.0, 0.0);
        for p in 1..=order {
            coeff *= lambda / p as f64;
            terms.push((p, 1, coeff));
        }
        Self::trivial(terms)
    }

    /// Truncated Moebius motion `g(t, z) = z / (1 - c t z)`.
    pub fn moebius_motion(c: Complex64, order: u32) -> Result<Self> {
        let mut terms = Vec::new();
        let mut coeff = Complex64::new(1.0, 0.0);
        for k in 1..=order {
            coeff *= c;
            terms.push((k, k + 1, coeff));
        }
        Self::trivial(terms)
    }

    /// True for the holomorphic-motion kinds (everything except radial).
    pub fn is_motion(&self) -> bool {
        !matches!(self.kind, FamilyKind::Radial { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Affine { .. } => "affine",
            FamilyKind::Trivial { .. } => "trivial",
            FamilyKind::Polynomial { .. } => "polynomial",
            FamilyKind::Radial { .. } => "radial",
        }
    }

    pub fn map(&self, t: &DeformationParameter, z: Complex64) -> Complex64 {
        self.jet_raw(t.value(), z).f
    }

    pub fn jet(&self, t: &DeformationParameter, z: Complex64) -> FiberJet {
        self.jet_raw(t.value(), z)
    }

    pub(crate) fn map_raw(&self, t: Complex64, z: Complex64) -> Complex64 {
        self.jet_raw(t, z).f
    }

    pub(crate) fn jet_raw(&self, t: Complex64, z: Complex64) -> FiberJet {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match &self.kind {
            FamilyKind::Affine { a } => {
                let (a_val, a_prime) = eval_poly(a, t);
                let zbar = z.conj();
                FiberJet {
                    f: z + a_val * zbar,
                    f_z: one,
                    f_zbar: a_val,
                    f_t: a_prime * zbar,
                    f_zt: zero,
                    f_zbart: a_prime,
                    beltrami: a_val,
                    beltrami_t: a_prime,
                }
            }
            FamilyKind::Trivial { terms } => {
                let mut f = z;
                let mut f_z = one;
                let mut f_t = zero;
                let mut f_zt = zero;
                for term in terms {
                    let tp = t.powu(term.t_pow);
                    let zq = z.powu(term.z_pow);
                    let c = term.coeff;
                    f += c * tp * zq;
                    if term.z_pow > 0 {
                        f_z += c * term.z_pow as f64 * tp * z.powu(term.z_pow - 1);
                    }
                    let tp1 = t.powu(term.t_pow - 1);
                    f_t += c * term.t_pow as f64 * tp1 * zq;
                    if term.z_pow > 0 {
                        f_zt += c * (term.t_pow * term.z_pow) as f64 * tp1 * z.powu(term.z_pow - 1);
                    }
                }
                FiberJet {
                    f,
                    f_z,
                    f_zbar: zero,
                    f_t,
                    f_zt,
                    f_zbart: zero,
                    beltrami: zero,
                    beltrami_t: zero,
                }
            }
            FamilyKind::Polynomial { terms } => {
                let zbar = z.conj();
                let mut f = z;
                let mut f_z = one;
                let mut f_zbar = zero;
                let mut f_t = zero;
                let mut f_zt = zero;
                let mut f_zbart = zero;
                for term in terms {
                    let c = term.coeff;
                    let tp = t.powu(term.t_pow);
                    let tp1 = t.powu(term.t_pow - 1);
                    let zq = z.powu(term.z_pow);
                    let zr = zbar.powu(term.zbar_pow);
                    f += c * tp * zq * zr;
                    f_t += c * term.t_pow as f64 * tp1 * zq * zr;
                    if term.z_pow > 0 {
                        let zq1 = z.powu(term.z_pow - 1);
                        f_z += c * term.z_pow as f64 * tp * zq1 * zr;
                        f_zt += c * (term.t_pow * term.z_pow) as f64 * tp1 * zq1 * zr;
                    }
                    if term.zbar_pow > 0 {
                        let zr1 = zbar.powu(term.zbar_pow - 1);
                        f_zbar += c * term.zbar_pow as f64 * tp * zq * zr1;
                        f_zbart += c * (term.t_pow * term.zbar_pow) as f64 * tp1 * zq * zr1;
                    }
                }
                let beltrami = f_zbar / f_z;
                let beltrami_t = (f_zbart * f_z - f_zbar * f_zt) / (f_z * f_z);
                FiberJet {
                    f,
                    f_z,
                    f_zbar,
                    f_t,
                    f_zt,
                    f_zbart,
                    beltrami,
                    beltrami_t,
                }
            }
            FamilyKind::Radial { .. } => {
                let rj = self.radius_jet(t);
                FiberJet {
                    f: rj.r * z,
                    f_z: Complex64::new(rj.r, 0.0),
                    f_zbar: zero,
                    f_t: rj.r_t * z,
                    f_zt: rj.r_t,
                    f_zbart: zero,
                    beltrami: zero,
                    beltrami_t: zero,
                }
            }
        }
    }

    /// Radius and its Wirtinger `t`-derivatives for the radial kind.
    pub(crate) fn radius_jet(&self, t: Complex64) -> RadiusJet {
        let FamilyKind::Radial { log_terms } = &self.kind else {
            panic!("radius_jet called on a motion kind");
        };
        let tbar = t.conj();
        let mut u = Complex64::new(0.0, 0.0);
        let mut u_t = Complex64::new(0.0, 0.0);
        let mut u_tbar = Complex64::new(0.0, 0.0);
        let mut u_ttbar = Complex64::new(0.0, 0.0);
        for term in log_terms {
            let s = term.coeff;
            let p = term.t_pow;
            let q = term.tbar_pow;
            u += s * t.powu(p) * tbar.powu(q);
            if p > 0 {
                u_t += s * p as f64 * t.powu(p - 1) * tbar.powu(q);
            }
            if q > 0 {
                u_tbar += s * q as f64 * t.powu(p) * tbar.powu(q - 1);
            }
            if p > 0 && q > 0 {
                u_ttbar += s * (p * q) as f64 * t.powu(p - 1) * tbar.powu(q - 1);
            }
        }
        debug_assert!(u.im.abs() < 1e-10, "log-radius not real: {u}");
        let r = u.re.exp();
        RadiusJet {
            r,
            u_t,
            u_tbar,
            u_ttbar,
            r_t: u_t * r,
        }
    }

    /// Closed-form inverse where one exists: affine (linear solve), radial
    /// (rescale), and trivial motions that are linear in `z`.
    pub(crate) fn invert_closed_form(&self, t: Complex64, w: Complex64) -> Option<Complex64> {
        match &self.kind {
            FamilyKind::Affine { a } => {
                let (a_val, _) = eval_poly(a, t);
                let denom = 1.0 - a_val.norm_sqr();
                Some((w - a_val * w.conj()) / denom)
            }
            FamilyKind::Radial { .. } => {
                let rj = self.radius_jet(t);
                Some(w / rj.r)
            }
            FamilyKind::Trivial { terms } => {
                if terms.iter().all(|term| term.z_pow == 1) {
                    let scale: Complex64 = Complex64::new(1.0, 0.0)
                        + terms
                            .iter()
                            .map(|term| term.coeff * t.powu(term.t_pow))
                            .sum::<Complex64>();
                    Some(w / scale)
                } else {
                    None
                }
            }
            FamilyKind::Polynomial { .. } => None,
        }
    }

    fn validate_injectivity(&self) -> Result<()> {
        let mut worst_beltrami = 0.0f64;
        let mut worst_jacobian = f64::INFINITY;
        let mut t_samples = vec![Complex64::new(0.0, 0.0)];
        for i in 1..=4 {
            let radius = DEFAULT_T_MAX * i as f64 / 4.0;
            for k in 0..8 {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / 8.0;
                t_samples.push(Complex64::from_polar(radius, angle));
            }
        }
        for t in &t_samples {
            for i in 1..=64 {
                let radius = i as f64 / 64.0;
                for k in 0..64 {
                    let angle = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
                    let z = Complex64::from_polar(radius, angle);
                    let jet = self.jet_raw(*t, z);
                    let ratio = jet.f_zbar.norm() / jet.f_z.norm();
                    worst_beltrami = worst_beltrami.max(ratio);
                    worst_jacobian =
                        worst_jacobian.min(jet.f_z.norm_sqr() - jet.f_zbar.norm_sqr());
                }
            }
        }
        if worst_beltrami > 1.0 - INJECTIVITY_MARGIN || worst_jacobian < INJECTIVITY_MARGIN {
            return Err(Error::NonInjectiveFiber(format!(
                "sampled Beltrami sup {worst_beltrami:.4}, Jacobian inf {worst_jacobian:.4}"
            )));
        }
        Ok(())
    }
}

pub(crate) struct RadiusJet {
    pub r: f64,
    pub r_t: Complex64,
    pub u_t: Complex64,
    pub u_tbar: Complex64,
    pub u_ttbar: Complex64,
}

/// Value and derivative of a polynomial `sum a_k t^k`.
fn eval_poly(coeffs: &[Complex64], t: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut derivative = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        derivative = derivative * t + value;
        value = value * t + c;
    }
    (value, derivative)
}

/// Coefficient of the admissible field `V = d/dt - alpha d/dmu` and its
/// `mubar`-Wirtinger derivative at a fiber point `zeta`.
///
/// Motions use `alpha = -f_t(t, f^{-1}(zeta))` with
/// `alpha_zbar = -(f_z)^2 J_t / (|f_z|^2 - |f_zbar|^2)`; radial families
/// use `alpha = -2 (r_t / r) zeta`, which is holomorphic in `zeta`.
pub fn alpha_field(
    family: &DeformationFamily,
    t: &DeformationParameter,
    zeta: Complex64,
) -> Result<(Complex64, Complex64)> {
    alpha_field_raw(family, t.value(), zeta)
}

pub(crate) fn alpha_field_raw(
    family: &DeformationFamily,
    t: Complex64,
    zeta: Complex64,
) -> Result<(Complex64, Complex64)> {
    if !family.is_motion() {
        let rj = family.radius_jet(t);
        let alpha = -2.0 * (rj.r_t / rj.r) * zeta;
        return Ok((alpha, Complex64::new(0.0, 0.0)));
    }
    let z = invert_raw(family, t, zeta)?;
    let jet = family.jet_raw(t, z);
    let alpha = -jet.f_t;
    let denom = jet.f_z.norm_sqr() - jet.f_zbar.norm_sqr();
    let alpha_zetabar = -(jet.f_z * jet.f_z) * jet.beltrami_t / denom;
    Ok((alpha, alpha_zetabar))
}

/// The admissible vector field of a family at fixed `t`.
pub struct AdmissibleField<'a> {
    family: &'a DeformationFamily,
    t: DeformationParameter,
}

impl<'a> AdmissibleField<'a> {
    pub fn new(family: &'a DeformationFamily, t: DeformationParameter) -> Self {
        Self { family, t }
    }

    pub fn alpha(&self, zeta: Complex64) -> Result<Complex64> {
        Ok(alpha_field(self.family, &self.t, zeta)?.0)
    }

    pub fn alpha_mubar(&self, zeta: Complex64) -> Result<Complex64> {
        Ok(alpha_field(self.family, &self.t, zeta)?.1)
    }

    /// Max over boundary nodes of `|rho_t - alpha rho_mu|`; vanishes for an
    /// admissible field.
    pub fn admissibility_residual(&self, boundary: &BoundaryQuadrature) -> Result<f64> {
        let mut worst = 0.0f64;
        for node in &boundary.nodes {
            let hessian = defining_hessian(self.family, &self.t, *node)?;
            let alpha = self.alpha(*node)?;
            let residual = (hessian.rho_t - alpha * hessian.rho_mu).norm();
            worst = worst.max(residual);
        }
        Ok(worst)
    }
}

/// First and mixed-second Wirtinger derivatives of the defining function
/// `rho` of the graph at a point `(t, w)`.
#[derive(Debug, Clone, Copy)]
pub struct WirtingerHessian {
    pub rho: f64,
    pub rho_t: Complex64,
    pub rho_mu: Complex64,
    pub rho_ttbar: Complex64,
    pub rho_tmubar: Complex64,
    pub rho_mutbar: Complex64,
    pub rho_mumubar: Complex64,
}

/// Finite-difference step for the defining-function Hessian.
const RHO_STEP: f64 = 1e-4;

/// Wirtinger Hessian of `rho(t, w) = |f^{-1}(t, w)|^2 - 1` for motion
/// kinds, assembled from Richardson-extrapolated central differences on
/// the four real coordinates; radial families use `rho = |w|^2 - r(t)^2`
/// in closed form.
pub fn defining_hessian(
    family: &DeformationFamily,
    t: &DeformationParameter,
    w: Complex64,
) -> Result<WirtingerHessian> {
    let t0 = t.value();
    if !family.is_motion() {
        let rj = family.radius_jet(t0);
        let r2 = rj.r * rj.r;
        return Ok(WirtingerHessian {
            rho: w.norm_sqr() - r2,
            rho_t: Complex64::new(-2.0 * r2, 0.0) * rj.u_t,
            rho_mu: w.conj(),
            rho_ttbar: Complex64::new(
                -2.0 * r2 * (rj.u_ttbar.re + 2.0 * (rj.u_t * rj.u_tbar).re),
                0.0,
            ),
            rho_tmubar: Complex64::new(0.0, 0.0),
            rho_mutbar: Complex64::new(0.0, 0.0),
            rho_mumubar: Complex64::new(1.0, 0.0),
        });
    }
    let rho = |tc: Complex64, wc: Complex64| -> Result<f64> {
        Ok(invert_raw(family, tc, wc)?.norm_sqr() - 1.0)
    };
    let value = rho(t0, w)?;
    let coarse = real_derivatives(&rho, t0, w, RHO_STEP)?;
    let fine = real_derivatives(&rho, t0, w, RHO_STEP / 2.0)?;
    // One Richardson level: central differences have h^2 leading error.
    let mut gradient = [0.0f64; 4];
    let mut hessian = [[0.0f64; 4]; 4];
    for i in 0..4 {
        gradient[i] = (4.0 * fine.gradient[i] - coarse.gradient[i]) / 3.0;
        for j in 0..4 {
            hessian[i][j] = (4.0 * fine.hessian[i][j] - coarse.hessian[i][j]) / 3.0;
        }
    }
    let rho_t = Complex64::new(0.5 * gradient[0], -0.5 * gradient[1]);
    let rho_mu = Complex64::new(0.5 * gradient[2], -0.5 * gradient[3]);
    let rho_ttbar = Complex64::new(0.25 * (hessian[0][0] + hessian[1][1]), 0.0);
    let rho_mumubar = Complex64::new(0.25 * (hessian[2][2] + hessian[3][3]), 0.0);
    let rho_tmubar = Complex64::new(
        0.25 * (hessian[0][2] + hessian[1][3]),
        0.25 * (hessian[0][3] - hessian[1][2]),
    );
    Ok(WirtingerHessian {
        rho: value,
        rho_t,
        rho_mu,
        rho_ttbar,
        rho_tmubar,
        rho_mutbar: rho_tmubar.conj(),
        rho_mumubar,
    })
}

struct RealDerivatives {
    gradient: [f64; 4],
    hessian: [[f64; 4]; 4],
}

/// Central differences of a real function of `(Re t, Im t, Re w, Im w)`.
fn real_derivatives<F: Fn(Complex64, Complex64) -> Result<f64>>(
    rho: &F,
    t: Complex64,
    w: Complex64,
    h: f64,
) -> Result<RealDerivatives> {
    let at = |offsets: [f64; 4]| -> Result<f64> {
        rho(
            Complex64::new(t.re + offsets[0], t.im + offsets[1]),
            Complex64::new(w.re + offsets[2], w.im + offsets[3]),
        )
    };
    let center = at([0.0; 4])?;
    let mut plus = [0.0f64; 4];
    let mut minus = [0.0f64; 4];
    for k in 0..4 {
        let mut offsets = [0.0; 4];
        offsets[k] = h;
        plus[k] = at(offsets)?;
        offsets[k] = -h;
        minus[k] = at(offsets)?;
    }
    let mut gradient = [0.0f64; 4];
    let mut hessian = [[0.0f64; 4]; 4];
    for k in 0..4 {
        gradient[k] = (plus[k] - minus[k]) / (2.0 * h);
        hessian[k][k] = (plus[k] - 2.0 * center + minus[k]) / (h * h);
    }
    for a in 0..4 {
        for b in (a + 1)..4 {
            let mut offsets = [0.0; 4];
            offsets[a] = h;
            offsets[b] = h;
            let pp = at(offsets)?;
            offsets[b] = -h;
            let pm = at(offsets)?;
            offsets[a] = -h;
            offsets[b] = h;
            let mp = at(offsets)?;
            offsets[b] = -h;
            let mm = at(offsets)?;
            let mixed = (pp - pm - mp + mm) / (4.0 * h * h);
            hessian[a][b] = mixed;
            hessian[b][a] = mixed;
        }
    }
    Ok(RealDerivatives { gradient, hessian })
}

/// Levi-form numerator `<V, V>_{i ddbar rho}` for `V = (1, -alpha)` over
/// the gradient modulus, from a precomputed Hessian.
pub fn k2_from_hessian(hessian: &WirtingerHessian, alpha: Complex64) -> Result<f64> {
    let grad = hessian.rho_mu.norm();
    if grad < 1e-6 {
        return Err(Error::DegenerateBoundary { grad });
    }
    let numerator = hessian.rho_ttbar.re - 2.0 * (hessian.rho_tmubar * alpha.conj()).re
        + hessian.rho_mumubar.re * alpha.norm_sqr();
    Ok(numerator / grad)
}

/// The second boundary invariant `k2` at a boundary point of `X_t`.
///
/// Zero exactly when the graph boundary is Levi-flat, as for holomorphic
/// motions.
pub fn k2_invariant(
    family: &DeformationFamily,
    t: &DeformationParameter,
    boundary_point: Complex64,
) -> Result<f64> {
    let hessian = defining_hessian(family, t, boundary_point)?;
    if hessian.rho.abs() > 1e-6 {
        return Err(Error::InvalidConfig(format!(
            "point {boundary_point} is not on the fiber boundary: rho = {:.3e}",
            hessian.rho
        )));
    }
    let (alpha, _) = alpha_field(family, t, boundary_point)?;
    k2_from_hessian(&hessian, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{boundary_quadrature, DeformationParameter};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn param(re: f64, im: f64) -> DeformationParameter {
        DeformationParameter::new(c(re, im)).unwrap()
    }

    #[test]
    fn affine_jet_matches_hand_derivatives() {
        // a(t) = 0.3 t + 0.1 t^2
        let family = DeformationFamily::affine(vec![c(0.0, 0.0), c(0.3, 0.0), c(0.1, 0.0)]).unwrap();
        let t = param(0.2, 0.1);
        let z = c(0.4, -0.3);
        let jet = family.jet(&t, z);
        let a = c(0.3, 0.0) * t.value() + c(0.1, 0.0) * t.value() * t.value();
        let a_prime = c(0.3, 0.0) + c(0.2, 0.0) * t.value();
        assert!((jet.f_z - c(1.0, 0.0)).norm() < 1e-15);
        assert!((jet.f_zbar - a).norm() < 1e-15);
        assert!((jet.beltrami_t - a_prime).norm() < 1e-15);
        assert!((jet.f - (z + a * z.conj())).norm() < 1e-15);
    }

    #[test]
    fn trivial_scaling_jet() {
        // g = e^{-t} z truncated far beyond machine precision at |t| <= 0.5
        let family = DeformationFamily::scaling_motion(c(-1.0, 0.0), 30).unwrap();
        let t = param(0.2, -0.1);
        let z = c(0.3, 0.5);
        let jet = family.jet(&t, z);
        let scale = (-t.value()).exp();
        assert!((jet.f_z - scale).norm() < 1e-14);
        assert!(jet.f_zbar.norm() == 0.0);
        assert!(jet.beltrami_t.norm() == 0.0);
        assert!((jet.f - scale * z).norm() < 1e-14);
        assert!((jet.f_t + scale * z).norm() < 1e-13);
    }

    #[test]
    fn polynomial_beltrami_t_matches_finite_differences() {
        let family =
            DeformationFamily::polynomial(vec![(1, 2, 1, c(0.12, 0.07)), (2, 1, 2, c(0.05, -0.02))])
                .unwrap();
        let z = c(0.5, 0.2);
        let t0 = c(0.15, 0.1);
        let h = 1e-5;
        let jet = family.jet_raw(t0, z);
        // central difference in complex t along both axes; J is holomorphic in t
        let jx = (family.jet_raw(t0 + c(h, 0.0), z).beltrami
            - family.jet_raw(t0 - c(h, 0.0), z).beltrami)
            / (2.0 * h);
        let jy = (family.jet_raw(t0 + c(0.0, h), z).beltrami
            - family.jet_raw(t0 - c(0.0, h), z).beltrami)
            / (2.0 * h);
        let fd = 0.5 * (jx - c(0.0, 1.0) * jy);
        assert!(
            (jet.beltrami_t - fd).norm() < 1e-6,
            "analytic {} vs fd {}",
            jet.beltrami_t,
            fd
        );
        // and no anti-holomorphic part
        let fd_bar = 0.5 * (jx + c(0.0, 1.0) * jy);
        assert!(fd_bar.norm() < 1e-6);
    }

    #[test]
    fn radial_jet_and_alpha() {
        let family = DeformationFamily::radial_gaussian().unwrap();
        let t = param(0.2, 0.0);
        let zeta = c(0.3, 0.1);
        let (alpha, alpha_bar) = alpha_field(&family, &t, zeta).unwrap();
        // r = e^{-|t|^2}: u_t = -tbar, alpha = 2 tbar zeta
        let expect = 2.0 * t.value().conj() * zeta;
        assert!((alpha - expect).norm() < 1e-14);
        assert!(alpha_bar.norm() == 0.0);
    }

    #[test]
    fn affine_alpha_zetabar_is_constant() {
        let family = DeformationFamily::affine(vec![c(0.0, 0.0), c(0.3, 0.0)]).unwrap();
        let t = param(0.1, 0.05);
        let a = c(0.3, 0.0) * t.value();
        let expect = -c(0.3, 0.0) / (1.0 - a.norm_sqr());
        for zeta in [c(0.0, 0.0), c(0.4, 0.2), c(-0.5, 0.1)] {
            let (_, alpha_bar) = alpha_field(&family, &t, zeta).unwrap();
            assert!(
                (alpha_bar - expect).norm() < 1e-12,
                "alpha_zetabar {alpha_bar} vs {expect}"
            );
        }
    }

    #[test]
    fn trivial_alpha_is_holomorphic() {
        let family = DeformationFamily::moebius_motion(c(0.3, 0.0), 24).unwrap();
        let t = param(0.2, 0.1);
        for zeta in [c(0.1, 0.2), c(-0.3, 0.3)] {
            let (_, alpha_bar) = alpha_field(&family, &t, zeta).unwrap();
            assert!(alpha_bar.norm() < 1e-12);
        }
        // finite-difference dbar residuals of alpha in t and zeta
        let h = 1e-5;
        let zeta = c(0.25, -0.15);
        let al = |tc: Complex64, zc: Complex64| alpha_field_raw(&family, tc, zc).unwrap().0;
        let t0 = t.value();
        let dbar_t = 0.5
            * ((al(t0 + c(h, 0.0), zeta) - al(t0 - c(h, 0.0), zeta)) / (2.0 * h)
                + c(0.0, 1.0) * (al(t0 + c(0.0, h), zeta) - al(t0 - c(0.0, h), zeta)) / (2.0 * h));
        let dbar_z = 0.5
            * ((al(t0, zeta + c(h, 0.0)) - al(t0, zeta - c(h, 0.0))) / (2.0 * h)
                + c(0.0, 1.0) * (al(t0, zeta + c(0.0, h)) - al(t0, zeta - c(0.0, h))) / (2.0 * h));
        assert!(dbar_t.norm() < 1e-6, "dbar_t alpha = {dbar_t}");
        assert!(dbar_z.norm() < 1e-6, "dbar_z alpha = {dbar_z}");
    }

    #[test]
    fn alpha_zetabar_matches_finite_difference() {
        // Eq-consistency of the closed form against a numerical
        // zetabar-derivative at interior probes.
        let family = DeformationFamily::polynomial(vec![(1, 1, 1, c(0.15, 0.1))]).unwrap();
        let t = param(0.2, -0.1);
        let h = 1e-5;
        for zeta in [c(0.2, 0.1), c(-0.3, 0.25)] {
            let (_, closed) = alpha_field(&family, &t, zeta).unwrap();
            let al = |zc: Complex64| alpha_field(&family, &t, zc).unwrap().0;
            let fd = 0.5
                * ((al(zeta + c(h, 0.0)) - al(zeta - c(h, 0.0))) / (2.0 * h)
                    + c(0.0, 1.0) * (al(zeta + c(0.0, h)) - al(zeta - c(0.0, h))) / (2.0 * h));
            assert!(
                (closed - fd).norm() < 1e-5,
                "closed {closed} vs finite difference {fd}"
            );
        }
    }

    #[test]
    fn admissibility_residual_on_boundary() {
        let families = [
            DeformationFamily::affine(vec![c(0.0, 0.0), c(0.3, 0.0)]).unwrap(),
            DeformationFamily::polynomial(vec![(1, 2, 1, c(0.1, 0.05))]).unwrap(),
            DeformationFamily::scaling_motion(c(-1.0, 0.0), 30).unwrap(),
            DeformationFamily::radial_gaussian().unwrap(),
        ];
        for family in &families {
            let t = param(0.15, 0.1);
            let boundary = boundary_quadrature(family, &t, 32).unwrap();
            let field = AdmissibleField::new(family, t);
            let residual = field.admissibility_residual(&boundary).unwrap();
            assert!(
                residual < 1e-8,
                "{}: admissibility residual {residual:.3e}",
                family.kind_name()
            );
        }
    }

    #[test]
    fn radial_hessian_closed_form() {
        let family = DeformationFamily::radial_gaussian().unwrap();
        let t = DeformationParameter::zero();
        let w = c(1.0, 0.0);
        let hessian = defining_hessian(&family, &t, w).unwrap();
        assert!((hessian.rho_ttbar.re - 2.0).abs() < 1e-12);
        assert!(hessian.rho_tmubar.norm() < 1e-12);
        assert!((hessian.rho_mumubar.re - 1.0).abs() < 1e-12);
        assert!(hessian.rho.abs() < 1e-12);
    }

    #[test]
    fn identity_hessian_is_product_like() {
        let family = DeformationFamily::identity();
        let t = param(0.1, 0.2);
        let w = c(0.8, 0.59);
        let hessian = defining_hessian(&family, &t, w).unwrap();
        assert!(hessian.rho_ttbar.norm() < 1e-8);
        assert!((hessian.rho_mumubar.re - 1.0).abs() < 1e-7);
        assert!(hessian.rho_tmubar.norm() < 1e-8);
        assert!((hessian.rho - (w.norm_sqr() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn trivial_scaling_hessian_matches_hand_formula() {
        // g = e^{-t} z: rho = |w|^2 e^{t + tbar} - 1, rho_ttbar = |w|^2 e^{t+tbar}
        let family = DeformationFamily::scaling_motion(c(-1.0, 0.0), 30).unwrap();
        let t = param(0.2, 0.1);
        let w = (-t.value()).exp() * c(0.9, 0.0); // near the boundary circle
        let hessian = defining_hessian(&family, &t, w).unwrap();
        let expect = w.norm_sqr() * (t.value() + t.value().conj()).exp().re;
        assert!(
            (hessian.rho_ttbar.re - expect).abs() < 1e-6,
            "rho_ttbar {} vs {}",
            hessian.rho_ttbar.re,
            expect
        );
    }

    #[test]
    fn k2_vanishes_for_holomorphic_motions() {
        let families = [
            DeformationFamily::affine(vec![c(0.0, 0.0), c(0.3, 0.0)]).unwrap(),
            DeformationFamily::polynomial(vec![(1, 2, 1, c(0.1, 0.05))]).unwrap(),
            DeformationFamily::moebius_motion(c(0.3, 0.0), 24).unwrap(),
        ];
        for family in &families {
            let t = param(0.15, -0.1);
            let boundary = boundary_quadrature(family, &t, 16).unwrap();
            for node in &boundary.nodes {
                let k2 = k2_invariant(family, &t, *node).unwrap();
                assert!(
                    k2.abs() < 1e-6,
                    "{}: k2 = {k2:.3e} at {node}",
                    family.kind_name()
                );
            }
        }
    }

    #[test]
    fn k2_radial_calibration_value() {
        let family = DeformationFamily::radial_gaussian().unwrap();
        let t = DeformationParameter::zero();
        for k in 0..8 {
            let node = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 8.0);
            let k2 = k2_invariant(&family, &t, node).unwrap();
            assert!((k2 - 2.0).abs() < 1e-10);
        }
        // away from t = 0 the value is 2 r(t)
        let t = param(0.3, 0.0);
        let r = (-0.09f64).exp();
        let node = c(r, 0.0);
        let k2 = k2_invariant(&family, &t, node).unwrap();
        assert!((k2 - 2.0 * r).abs() < 1e-10);
    }

    #[test]
    fn k2_identity_motion_is_zero() {
        let family = DeformationFamily::identity();
        let t = param(0.2, 0.1);
        let k2 = k2_invariant(&family, &t, c(0.0, 1.0)).unwrap();
        assert!(k2.abs() < 1e-8);
    }

    #[test]
    fn k2_invariant_under_defining_function_rescale() {
        // Replacing rho by e^psi rho changes the Hessian by product-rule
        // terms that vanish against V on the boundary.
        let family = DeformationFamily::affine(vec![c(0.0, 0.0), c(0.25, 0.1)]).unwrap();
        let t = param(0.2, -0.05);
        let boundary = boundary_quadrature(&family, &t, 8).unwrap();
        // psi = Re(t) + Re(mu) + |mu|^2 / 4: psi_t = 1/2, psi_mu = 1/2 + mubar/4
        for node in &boundary.nodes {
            let hessian = defining_hessian(&family, &t, *node).unwrap();
            let (alpha, _) = alpha_field(&family, &t, *node).unwrap();
            let base = k2_from_hessian(&hessian, alpha).unwrap();

            let psi_t = c(0.5, 0.0);
            let psi_mu = c(0.5, 0.0) + node.conj() / 4.0;
            let psi_ttbar = c(0.0, 0.0);
            let psi_tmubar = c(0.0, 0.0);
            let psi_mumubar = c(0.25, 0.0);
            let e = 1.0; // evaluate with psi = 0 at the point wlog: scale factor drops out
            let rho = hessian.rho;
            let rescaled = WirtingerHessian {
                rho: e * rho,
                rho_t: e * (psi_t * rho + hessian.rho_t),
                rho_mu: e * (psi_mu * rho + hessian.rho_mu),
                rho_ttbar: e
                    * (psi_ttbar * rho
                        + psi_t * hessian.rho_t.conj()
                        + psi_t.conj() * hessian.rho_t
                        + psi_t * psi_t.conj() * rho
                        + hessian.rho_ttbar),
                rho_tmubar: e
                    * (psi_tmubar * rho
                        + psi_t * hessian.rho_mu.conj()
                        + psi_mu.conj() * hessian.rho_t
                        + psi_t * psi_mu.conj() * rho
                        + hessian.rho_tmubar),
                rho_mutbar: e
                    * (psi_tmubar.conj() * rho
                        + psi_mu * hessian.rho_t.conj()
                        + psi_t.conj() * hessian.rho_mu
                        + psi_mu * psi_t.conj() * rho
                        + hessian.rho_mutbar),
                rho_mumubar: e
                    * (psi_mumubar * rho
                        + psi_mu * hessian.rho_mu.conj()
                        + psi_mu.conj() * hessian.rho_mu
                        + psi_mu * psi_mu.conj() * rho
                        + hessian.rho_mumubar),
            };
            let scaled = k2_from_hessian(&rescaled, alpha).unwrap();
            assert!(
                (scaled - base).abs() < 1e-6,
                "k2 changed under rescale: {base} vs {scaled}"
            );
        }
    }

    #[test]
    fn k2_invariant_under_alpha_shift() {
        // alpha -> alpha + rho chi leaves boundary values unchanged since
        // rho vanishes there.
        let family = DeformationFamily::affine(vec![c(0.0, 0.0), c(0.25, 0.1)]).unwrap();
        let t = param(0.2, -0.05);
        let boundary = boundary_quadrature(&family, &t, 8).unwrap();
        for node in &boundary.nodes {
            let hessian = defining_hessian(&family, &t, *node).unwrap();
            let (alpha, _) = alpha_field(&family, &t, *node).unwrap();
            let chi = c(0.7, -0.4) + node;
            let shifted = alpha + hessian.rho * chi;
            let base = k2_from_hessian(&hessian, alpha).unwrap();
            let moved = k2_from_hessian(&hessian, shifted).unwrap();
            assert!((base - moved).abs() < 1e-6);
        }
    }

    #[test]
    fn degenerate_boundary_detected() {
        let hessian = WirtingerHessian {
            rho: 0.0,
            rho_t: c(0.0, 0.0),
            rho_mu: c(1e-9, 0.0),
            rho_ttbar: c(1.0, 0.0),
            rho_tmubar: c(0.0, 0.0),
            rho_mutbar: c(0.0, 0.0),
            rho_mumubar: c(1.0, 0.0),
        };
        assert!(matches!(
            k2_from_hessian(&hessian, c(0.0, 0.0)),
            Err(Error::DegenerateBoundary { .. })
        ));
    }

    #[test]
    fn constructors_reject_invalid_families() {
        // a(0) != 0
        assert!(DeformationFamily::affine(vec![c(0.1, 0.0)]).is_err());
        // t^0 term in a trivial motion
        assert!(DeformationFamily::trivial(vec![(0, 2, c(0.1, 0.0))]).is_err());
        // t^0 term in a polynomial motion
        assert!(DeformationFamily::polynomial(vec![(0, 0, 1, c(0.5, 0.0))]).is_err());
        // non-Hermitian radial exponent
        assert!(DeformationFamily::radial(vec![(1, 0, c(1.0, 0.0))]).is_err());
        // constant term in the log-radius
        assert!(DeformationFamily::radial(vec![(0, 0, c(-0.5, 0.0))]).is_err());
        // Beltrami coefficient too large
        assert!(matches!(
            DeformationFamily::affine(vec![c(0.0, 0.0), c(2.5, 0.0)]),
            Err(Error::NonInjectiveFiber(_))
        ));
        // vanishing f_z inside the disc
        assert!(matches!(
            DeformationFamily::trivial(vec![(1, 2, c(5.0, 0.0))]),
            Err(Error::NonInjectiveFiber(_))
        ));
    }
}
