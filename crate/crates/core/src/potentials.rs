//! Electric potentials V ≥ 0, their y-cosine transforms and phase-space
//! volume functions.

use crate::error::{Error, Result};
use crate::numerics::{composite_gauss_legendre, UniformHermite};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// One-dimensional even profile used by separable potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    /// (1 + t²)^{−decay/2}
    Power { decay: f64 },
    /// e^{−t²/width²}
    Gaussian { width: f64 },
}

impl Profile {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Profile::Power { decay } => (1.0 + t * t).powf(-0.5 * decay),
            Profile::Gaussian { width } => (-(t * t) / (width * width)).exp(),
        }
    }

    /// Half-width of `{t : value(t) > level}`.
    pub fn halfwidth(&self, level: f64) -> f64 {
        if level >= 1.0 {
            return 0.0;
        }
        match *self {
            Profile::Power { decay } => (level.powf(-2.0 / decay) - 1.0).max(0.0).sqrt(),
            Profile::Gaussian { width } => width * (-level.ln()).sqrt(),
        }
    }

    /// (1/2π)∫ value(t) cos(Δt) dt.
    pub fn cosine_transform(&self, delta: f64) -> f64 {
        match *self {
            Profile::Power { decay } => {
                let nu = 0.5 * (decay - 1.0);
                matern(nu, delta.abs()) / (PI.sqrt() * libm::tgamma(0.5 * decay) * 2f64.powf(nu))
            }
            Profile::Gaussian { width } => {
                width / (2.0 * PI.sqrt()) * (-(width * delta).powi(2) / 4.0).exp()
            }
        }
    }

    fn decay(&self) -> f64 {
        match *self {
            Profile::Power { decay } => decay,
            Profile::Gaussian { .. } => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialModel {
    /// C(1 + x² + y²)^{−m/2}
    RadialPower { amplitude: f64, decay: f64 },
    /// A·p_x(x)·p_y(y)
    Separable {
        amplitude: f64,
        x_profile: Profile,
        y_profile: Profile,
    },
    /// A·exp(1 − 1/(1 − r²/R²)) inside the disk of radius R.
    CompactBump { radius: f64, amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    HalfPlane,
    FullPlane,
}

impl PotentialModel {
    pub fn radial_power(amplitude: f64, decay: f64) -> Self {
        PotentialModel::RadialPower { amplitude, decay }
    }

    pub fn separable_power(amplitude: f64, decay: f64) -> Self {
        PotentialModel::Separable {
            amplitude,
            x_profile: Profile::Power { decay },
            y_profile: Profile::Power { decay },
        }
    }

    pub fn compact_bump(radius: f64, amplitude: f64) -> Self {
        PotentialModel::CompactBump { radius, amplitude }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        match *self {
            PotentialModel::RadialPower { amplitude, decay } => {
                if !(amplitude > 0.0) {
                    return bad(format!("amplitude must be positive, got {amplitude}"));
                }
                if !(decay > 2.0) {
                    return bad(format!("decay exponent must exceed 2, got {decay}"));
                }
            }
            PotentialModel::Separable {
                amplitude,
                x_profile,
                y_profile,
            } => {
                if !(amplitude > 0.0) {
                    return bad(format!("amplitude must be positive, got {amplitude}"));
                }
                for p in [x_profile, y_profile] {
                    match p {
                        Profile::Power { decay } if !(decay > 1.0) => {
                            return bad(format!("profile decay must exceed 1, got {decay}"))
                        }
                        Profile::Gaussian { width } if !(width > 0.0) => {
                            return bad(format!("profile width must be positive, got {width}"))
                        }
                        _ => {}
                    }
                }
            }
            PotentialModel::CompactBump { radius, amplitude } => {
                if !(radius > 0.0 && amplitude > 0.0) {
                    return bad(format!(
                        "bump needs positive radius and amplitude, got R={radius}, A={amplitude}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// All built-in models are even in y.
    pub fn y_symmetric(&self) -> bool {
        true
    }

    pub fn is_zero(&self) -> bool {
        self.sup() == 0.0
    }

    pub fn sup(&self) -> f64 {
        match *self {
            PotentialModel::RadialPower { amplitude, .. } => amplitude,
            PotentialModel::Separable { amplitude, .. } => amplitude,
            PotentialModel::CompactBump { amplitude, .. } => amplitude,
        }
    }

    /// Exponent m in V ≤ C⟨x,y⟩^{−m}; `None` for compact support (any m).
    pub fn decay_exponent(&self) -> Option<f64> {
        match *self {
            PotentialModel::RadialPower { decay, .. } => Some(decay),
            PotentialModel::Separable {
                x_profile,
                y_profile,
                ..
            } => {
                let m = x_profile.decay().min(y_profile.decay());
                m.is_finite().then_some(m)
            }
            PotentialModel::CompactBump { .. } => None,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            PotentialModel::RadialPower { amplitude, decay } => {
                amplitude * (1.0 + x * x + y * y).powf(-0.5 * decay)
            }
            PotentialModel::Separable {
                amplitude,
                x_profile,
                y_profile,
            } => amplitude * x_profile.value(x) * y_profile.value(y),
            PotentialModel::CompactBump { radius, amplitude } => {
                let u = (x * x + y * y) / (radius * radius);
                if u >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - u)).exp()
                }
            }
        }
    }

    /// Half-width in x of `{V(·, 0) > level}`.
    pub fn x_extent(&self, level: f64) -> f64 {
        match *self {
            PotentialModel::RadialPower { amplitude, decay } => {
                Profile::Power { decay }.halfwidth(level / amplitude)
            }
            PotentialModel::Separable {
                amplitude,
                x_profile,
                ..
            } => x_profile.halfwidth(level / amplitude),
            PotentialModel::CompactBump { radius, amplitude } => {
                bump_radius(radius, amplitude, level)
            }
        }
    }

    /// Half-width in y of `{V(0, ·) > level}`.
    pub fn y_extent(&self, level: f64) -> f64 {
        match *self {
            PotentialModel::Separable {
                amplitude,
                y_profile,
                ..
            } => y_profile.halfwidth(level / amplitude),
            _ => self.x_extent(level),
        }
    }

    /// F(x, Δ) = (1/2π)∫ V(x,y) cos(Δy) dy by closed form where available.
    pub fn y_transform_at(&self, x: f64, delta: f64) -> f64 {
        match *self {
            PotentialModel::RadialPower { amplitude, decay } => {
                let a = (1.0 + x * x).sqrt();
                let nu = 0.5 * (decay - 1.0);
                amplitude * matern(nu, a * delta.abs())
                    / (PI.sqrt() * libm::tgamma(0.5 * decay) * 2f64.powf(nu) * a.powf(decay - 1.0))
            }
            PotentialModel::Separable {
                amplitude,
                x_profile,
                y_profile,
            } => amplitude * x_profile.value(x) * y_profile.cosine_transform(delta),
            PotentialModel::CompactBump { .. } => y_cosine_transform_quadrature(self, x, delta),
        }
    }

    /// Tables of F(x_i, Δ) for `0 ≤ Δ ≤ delta_max` on the given points.
    pub fn y_transform(&self, x_points: &[f64], delta_max: f64) -> YTransform {
        let delta_max = delta_max.max(1e-3);
        match *self {
            PotentialModel::RadialPower { amplitude, decay } => {
                let nu = 0.5 * (decay - 1.0);
                let a: Vec<f64> = x_points.iter().map(|x| (1.0 + x * x).sqrt()).collect();
                let amax = a.iter().cloned().fold(1.0, f64::max);
                let table = Arc::new(matern_table(nu, (delta_max * amax).min(MATERN_CUTOFF)));
                let norm = PI.sqrt() * libm::tgamma(0.5 * decay) * 2f64.powf(nu);
                let prefactor = a
                    .iter()
                    .map(|ai| amplitude / (norm * ai.powf(decay - 1.0)))
                    .collect();
                YTransform::Scaled {
                    table,
                    scale: a,
                    prefactor,
                }
            }
            PotentialModel::Separable {
                amplitude,
                x_profile,
                y_profile,
            } => {
                let prefactor: Vec<f64> = x_points
                    .iter()
                    .map(|x| amplitude * x_profile.value(*x))
                    .collect();
                match y_profile {
                    Profile::Power { decay } => {
                        let nu = 0.5 * (decay - 1.0);
                        let table = Arc::new(matern_table(nu, delta_max.min(MATERN_CUTOFF)));
                        let norm = PI.sqrt() * libm::tgamma(0.5 * decay) * 2f64.powf(nu);
                        let n = prefactor.len();
                        YTransform::Scaled {
                            table,
                            scale: vec![1.0; n],
                            prefactor: prefactor.iter().map(|p| p / norm).collect(),
                        }
                    }
                    Profile::Gaussian { width } => YTransform::Gaussian { width, prefactor },
                }
            }
            PotentialModel::CompactBump { radius, .. } => {
                let tables = x_points
                    .iter()
                    .map(|&x| {
                        (x.abs() < radius).then(|| bump_delta_table(self, x, radius, delta_max))
                    })
                    .collect();
                YTransform::PerPoint { tables }
            }
        }
    }

    /// Phase-space volume N(λ,V) (half plane) or Ñ(λ,V) (full plane).
    pub fn volume(&self, lambda: f64, domain: Domain) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!(
                "volume needs lambda > 0, got {lambda}"
            )));
        }
        if lambda >= self.sup() {
            return Ok(0.0);
        }
        let half = match *self {
            PotentialModel::RadialPower { amplitude, decay } => {
                ((amplitude / lambda).powf(2.0 / decay) - 1.0) / 4.0
            }
            PotentialModel::CompactBump { radius, amplitude } => {
                bump_radius(radius, amplitude, lambda).powi(2) / 4.0
            }
            PotentialModel::Separable {
                amplitude,
                x_profile,
                y_profile,
            } => separable_half_volume(amplitude, x_profile, y_profile, lambda),
        };
        Ok(match domain {
            Domain::HalfPlane => half,
            // every built-in model is even in x
            Domain::FullPlane => 2.0 * half,
        })
    }

    pub fn volume_method(&self) -> VolumeMethod {
        match self {
            PotentialModel::Separable { .. } => VolumeMethod::Quadrature,
            _ => VolumeMethod::ClosedForm,
        }
    }
}

fn bump_radius(radius: f64, amplitude: f64, level: f64) -> f64 {
    if level >= amplitude {
        return 0.0;
    }
    if level <= 0.0 {
        return radius;
    }
    // A·exp(1 − 1/(1−u)) > level  ⇔  u < 1 − 1/(1 + ln(A/level))
    radius * (1.0 - 1.0 / (1.0 + (amplitude / level).ln())).sqrt()
}

fn separable_half_volume(amplitude: f64, xp: Profile, yp: Profile, lambda: f64) -> f64 {
    let x_max = xp.halfwidth(lambda / amplitude);
    if x_max == 0.0 {
        return 0.0;
    }
    // x = X(1 − t²) absorbs the square-root edge of the y-extent.
    let edges: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
    let rule = composite_gauss_legendre(8, &edges);
    let area = rule.integrate(|t| {
        let x = x_max * (1.0 - t * t);
        2.0 * yp.halfwidth(lambda / (amplitude * xp.value(x))) * 2.0 * x_max * t
    });
    area / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    ClosedForm,
    Quadrature,
}

/// N(λ, V) for the requested domain.
pub fn volume_function(p: &PotentialModel, lambda: f64, domain: Domain) -> Result<f64> {
    p.volume(lambda, domain)
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeReport {
    pub lambdas: Vec<f64>,
    pub n_values: Vec<f64>,
    pub method: VolumeMethod,
    pub domain: Domain,
}

pub fn volume_report(p: &PotentialModel, lambdas: &[f64], domain: Domain) -> Result<VolumeReport> {
    let n_values = lambdas
        .iter()
        .map(|&l| p.volume(l, domain))
        .collect::<Result<Vec<_>>>()?;
    Ok(VolumeReport {
        lambdas: lambdas.to_vec(),
        n_values,
        method: p.volume_method(),
        domain,
    })
}

/// Volume by adaptive quadtree cell counting; returns the value and an error
/// estimate. Independent of the closed forms.
pub fn volume_by_cell_counting(
    p: &PotentialModel,
    lambda: f64,
    domain: Domain,
    rel_tol: f64,
) -> (f64, f64) {
    let x_ext = p.x_extent(lambda);
    let y_ext = p.y_extent(lambda);
    if x_ext == 0.0 || y_ext == 0.0 {
        return (0.0, 0.0);
    }
    let x_lo = match domain {
        Domain::HalfPlane => 0.0,
        Domain::FullPlane => -x_ext * 1.01,
    };
    let (x0, x1, y0, y1) = (x_lo, x_ext * 1.01, 0.0, y_ext * 1.01);
    let mut depth = 6;
    loop {
        let mut area = 0.0;
        let mut mixed = 0.0;
        count_cells(p, lambda, (x0, x1, y0, y1), depth, &mut area, &mut mixed);
        // symmetric in y: the upper half is doubled
        let n = 2.0 * area / (2.0 * PI);
        let err = 2.0 * mixed / 8.0 / (2.0 * PI);
        if err <= rel_tol * n || depth >= 16 {
            return (n, err);
        }
        depth += 1;
    }
}

fn count_cells(
    p: &PotentialModel,
    lambda: f64,
    cell: (f64, f64, f64, f64),
    depth: usize,
    area: &mut f64,
    mixed: &mut f64,
) {
    let (x0, x1, y0, y1) = cell;
    let cell_area = (x1 - x0) * (y1 - y0);
    let mut inside = 0;
    let samples = 3;
    for i in 0..samples {
        for j in 0..samples {
            let x = x0 + (x1 - x0) * i as f64 / (samples - 1) as f64;
            let y = y0 + (y1 - y0) * j as f64 / (samples - 1) as f64;
            if p.eval(x, y) > lambda {
                inside += 1;
            }
        }
    }
    let total = samples * samples;
    if inside == total {
        *area += cell_area;
        return;
    }
    if inside == 0 && depth < 14 {
        // coarse cells away from the set are empty for the star-shaped catalogue
        return;
    }
    if depth == 0 {
        let fine = 8;
        let mut hits = 0;
        for i in 0..fine {
            for j in 0..fine {
                let x = x0 + (x1 - x0) * (i as f64 + 0.5) / fine as f64;
                let y = y0 + (y1 - y0) * (j as f64 + 0.5) / fine as f64;
                if p.eval(x, y) > lambda {
                    hits += 1;
                }
            }
        }
        *area += cell_area * hits as f64 / (fine * fine) as f64;
        *mixed += cell_area;
        return;
    }
    let xm = 0.5 * (x0 + x1);
    let ym = 0.5 * (y0 + y1);
    for c in [
        (x0, xm, y0, ym),
        (xm, x1, y0, ym),
        (x0, xm, ym, y1),
        (xm, x1, ym, y1),
    ] {
        count_cells(p, lambda, c, depth - 1, area, mixed);
    }
}

/// Reference F(x, Δ) by composite Gauss–Legendre on a truncated y-range.
pub fn y_cosine_transform_quadrature(p: &PotentialModel, x: f64, delta: f64) -> f64 {
    let y_max = match *p {
        PotentialModel::CompactBump { radius, .. } => {
            if x.abs() >= radius {
                return 0.0;
            }
            (radius * radius - x * x).sqrt()
        }
        _ => 400.0,
    };
    let width = 0.25_f64.min(1.0 / (delta.abs() + 1e-300));
    let panels = ((y_max / width).ceil() as usize).max(16);
    let edges: Vec<f64> = (0..=panels)
        .map(|i| y_max * i as f64 / panels as f64)
        .collect();
    let rule = composite_gauss_legendre(16, &edges);
    2.0 * rule.integrate(|y| p.eval(x, y) * (delta * y).cos()) / (2.0 * PI)
}

/// Arguments beyond this are treated as zero in the g_ν tables.
pub const MATERN_CUTOFF: f64 = 60.0;
const MATERN_STEP: f64 = 2e-3;

/// g_ν(z) = z^ν K_ν(z), with g_ν(0) = 2^{ν−1}Γ(ν).
pub fn matern(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 2f64.powf(nu - 1.0) * libm::tgamma(nu);
    }
    z.powf(nu) * bessel_k(nu, z)
}

/// d/dz g_ν(z) = −z^ν K_{ν−1}(z).
pub fn matern_slope(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    -z.powf(nu) * bessel_k((nu - 1.0).abs(), z)
}

/// K_ν(z) = ∫₀^∞ e^{−z cosh t} cosh(νt) dt by the trapezoid rule, which
/// converges geometrically for this analytic integrand.
pub fn bessel_k(nu: f64, z: f64) -> f64 {
    let h = 0.05;
    let mut sum = 0.5 * (-z).exp();
    let mut i = 1;
    loop {
        let t = i as f64 * h;
        let term = (-z * t.cosh() + nu * t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp());
        sum += term;
        if z * t.cosh() - nu * t > 745.0 || (term < 1e-18 * sum && z * t.cosh() > 40.0) {
            break;
        }
        i += 1;
    }
    sum * h
}

fn matern_table(nu: f64, z_max: f64) -> UniformHermite {
    let n = ((z_max / MATERN_STEP).ceil() as usize).max(2) + 1;
    let values = (0..n).map(|i| matern(nu, i as f64 * MATERN_STEP)).collect();
    let slopes = (0..n)
        .map(|i| matern_slope(nu, i as f64 * MATERN_STEP))
        .collect();
    UniformHermite::new(0.0, MATERN_STEP, values, slopes)
}

const BUMP_DELTA_STEP: f64 = 5e-3;

fn bump_delta_table(p: &PotentialModel, x: f64, radius: f64, delta_max: f64) -> UniformHermite {
    let y_max = (radius * radius - x * x).sqrt();
    let edges: Vec<f64> = (0..=12).map(|i| y_max * i as f64 / 12.0).collect();
    let rule = composite_gauss_legendre(16, &edges);
    let n = ((delta_max / BUMP_DELTA_STEP).ceil() as usize).max(2) + 1;
    let mut values = vec![0.0; n];
    let mut slopes = vec![0.0; n];
    for (y, w) in rule.nodes.iter().zip(&rule.weights) {
        let f = w * p.eval(x, *y) / PI;
        if f == 0.0 {
            continue;
        }
        // cos(nθ), sin(nθ) by the Chebyshev recurrence
        let theta = BUMP_DELTA_STEP * y;
        let c1 = theta.cos();
        let s1 = theta.sin();
        let (mut c_prev, mut c) = (1.0, c1);
        let (mut s_prev, mut s) = (0.0, s1);
        values[0] += f;
        for idx in 1..n {
            values[idx] += f * c;
            slopes[idx] -= f * y * s;
            let c_next = 2.0 * c1 * c - c_prev;
            let s_next = 2.0 * c1 * s - s_prev;
            c_prev = c;
            c = c_next;
            s_prev = s;
            s = s_next;
        }
    }
    UniformHermite::new(0.0, BUMP_DELTA_STEP, values, slopes)
}

/// Precomputed F(x_i, Δ) on a fixed set of points.
#[derive(Debug, Clone)]
pub enum YTransform {
    /// prefactor_i · g(scale_i |Δ|)
    Scaled {
        table: Arc<UniformHermite>,
        scale: Vec<f64>,
        prefactor: Vec<f64>,
    },
    Gaussian {
        width: f64,
        prefactor: Vec<f64>,
    },
    PerPoint {
        tables: Vec<Option<UniformHermite>>,
    },
}

impl YTransform {
    #[inline]
    pub fn eval(&self, i: usize, delta: f64) -> f64 {
        let d = delta.abs();
        match self {
            YTransform::Scaled {
                table,
                scale,
                prefactor,
            } => {
                let z = scale[i] * d;
                if z > table.end() {
                    0.0
                } else {
                    prefactor[i] * table.eval(z)
                }
            }
            YTransform::Gaussian { width, prefactor } => {
                prefactor[i] * width / (2.0 * PI.sqrt()) * (-(width * d).powi(2) / 4.0).exp()
            }
            YTransform::PerPoint { tables } => match &tables[i] {
                Some(t) if d <= t.end() => t.eval(d),
                _ => 0.0,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub kind: PotentialModel,
    /// Exponent m used for the checks.
    pub decay_exponent: f64,
    pub bound_constant: f64,
    pub decay_bound_holds: bool,
    pub symbol_class_holds: bool,
    pub symbol_class_note: String,
    pub volume_lambdas: Vec<f64>,
    /// λ^{2/m} N(λ) at `volume_lambdas`.
    pub scaled_volumes: Vec<f64>,
    pub volume_band_holds: bool,
    pub continuity_eps: Vec<f64>,
    pub continuity_values: Vec<f64>,
    pub continuity_holds: bool,
    pub admissible: bool,
}

/// Exponent used for compactly supported models, which satisfy the decay
/// bound for every m.
pub const NOMINAL_BUMP_DECAY: f64 = 4.0;

/// Numerical checks of the decay bound and volume conditions.
pub fn admissibility_report(p: &PotentialModel) -> Result<AdmissibilityReport> {
    p.validate()?;
    let m = p.decay_exponent().unwrap_or(NOMINAL_BUMP_DECAY);
    let bound_constant = match *p {
        PotentialModel::RadialPower { amplitude, .. } => amplitude,
        PotentialModel::Separable { amplitude, .. } => amplitude,
        PotentialModel::CompactBump { radius, amplitude } => {
            amplitude * (1.0 + radius * radius).powf(0.5 * m)
        }
    };
    let mut decay_bound_holds = true;
    for ir in 0..60 {
        let r = if ir == 0 {
            0.0
        } else {
            10f64.powf(-2.0 + 5.0 * ir as f64 / 59.0)
        };
        for ia in 0..24 {
            let angle = PI * ia as f64 / 23.0 - 0.5 * PI;
            let (x, y) = (r * angle.cos(), r * angle.sin());
            let bound = bound_constant * (1.0 + x * x + y * y).powf(-0.5 * m);
            if p.eval(x, y) > bound * (1.0 + 1e-12) {
                decay_bound_holds = false;
            }
        }
    }
    let (symbol_class_holds, symbol_class_note) = match p {
        PotentialModel::RadialPower { .. } => (
            true,
            "radial power of ⟨x,y⟩ is a classical symbol of order −m".to_string(),
        ),
        PotentialModel::CompactBump { .. } => (true, "smooth and compactly supported".to_string()),
        PotentialModel::Separable { .. } => (
            false,
            "∂_y of a product profile does not gain decay in x".to_string(),
        ),
    };
    let c = p.sup();
    let volume_lambdas: Vec<f64> = (0..=12)
        .map(|i| c * 10f64.powf(-5.0 + 0.25 * i as f64))
        .collect();
    let scaled_volumes = volume_lambdas
        .iter()
        .map(|&l| Ok(l.powf(2.0 / m) * p.volume(l, Domain::HalfPlane)?))
        .collect::<Result<Vec<f64>>>()?;
    let vmax = scaled_volumes.iter().cloned().fold(0.0, f64::max);
    let vmin = scaled_volumes.iter().cloned().fold(f64::INFINITY, f64::min);
    let volume_band_holds = vmin > 0.0 && vmin >= 0.5 * vmax;
    let continuity_eps = vec![1e-1, 1e-2, 1e-3];
    let continuity_values = continuity_eps
        .iter()
        .map(|&eps| {
            volume_lambdas.iter().try_fold(0.0_f64, |acc, &l| {
                let jump = p.volume(l * (1.0 - eps), Domain::HalfPlane)?
                    - p.volume(l * (1.0 + eps), Domain::HalfPlane)?;
                Ok(acc.max(l.powf(2.0 / m) * jump))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let continuity_holds = continuity_values.windows(2).all(|w| w[1] <= w[0])
        && continuity_values.last().copied().unwrap_or(0.0) <= 1e-2 * vmax.max(f64::MIN_POSITIVE);
    let admissible =
        decay_bound_holds && symbol_class_holds && volume_band_holds && continuity_holds;
    Ok(AdmissibilityReport {
        kind: *p,
        decay_exponent: m,
        bound_constant,
        decay_bound_holds,
        symbol_class_holds,
        symbol_class_note,
        volume_lambdas,
        scaled_volumes,
        volume_band_holds,
        continuity_eps,
        continuity_values,
        continuity_holds,
        admissible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_values() {
        let p = PotentialModel::radial_power(1.0, 4.0);
        assert_eq!(p.eval(0.0, 0.0), 1.0);
        assert!((p.eval(1.0, 2f64.sqrt()) - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn bump_support() {
        let p = PotentialModel::compact_bump(2.0, 1.5);
        assert_eq!(p.eval(1.5, 1.5), 0.0);
        assert_eq!(p.eval(0.0, 0.0), 1.5);
        assert!(p.eval(1.0, 1.0) > 0.0);
    }

    #[test]
    fn radial_volumes() {
        let p = PotentialModel::radial_power(1.0, 4.0);
        assert!((p.volume(0.01, Domain::HalfPlane).unwrap() - 2.25).abs() < 1e-12);
        assert!((p.volume(0.01, Domain::FullPlane).unwrap() - 4.5).abs() < 1e-12);
        assert_eq!(p.volume(1.0, Domain::HalfPlane).unwrap(), 0.0);
        assert_eq!(p.volume(3.0, Domain::FullPlane).unwrap(), 0.0);
        assert!(p.volume(0.0, Domain::HalfPlane).is_err());
    }

    #[test]
    fn radial_scaling_in_amplitude() {
        for lambda in [1e-4, 3e-3, 0.2] {
            let a = PotentialModel::radial_power(2.5, 3.0)
                .volume(lambda, Domain::HalfPlane)
                .unwrap();
            let b = PotentialModel::radial_power(1.0, 3.0)
                .volume(lambda / 2.5, Domain::HalfPlane)
                .unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn cell_counting_matches_closed_forms() {
        for p in [
            PotentialModel::radial_power(1.0, 4.0),
            PotentialModel::compact_bump(3.0, 1.0),
        ] {
            for lambda in [1e-1, 1e-2, 1e-3] {
                let exact = p.volume(lambda, Domain::HalfPlane).unwrap();
                let (q, err) = volume_by_cell_counting(&p, lambda, Domain::HalfPlane, 2e-3);
                assert!(
                    (q / exact - 1.0).abs() < 0.01,
                    "{p:?} λ={lambda}: {q} vs {exact} (err {err})"
                );
            }
        }
        let p = PotentialModel::radial_power(1.0, 4.0);
        let (q, _) = volume_by_cell_counting(&p, 1e-2, Domain::FullPlane, 2e-3);
        assert!((q / 4.5 - 1.0).abs() < 0.01);
    }

    #[test]
    fn separable_volume_matches_cell_counting() {
        let p = PotentialModel::separable_power(1.0, 4.0);
        for lambda in [1e-1, 1e-2, 1e-3] {
            let v = p.volume(lambda, Domain::HalfPlane).unwrap();
            let (q, _) = volume_by_cell_counting(&p, lambda, Domain::HalfPlane, 2e-3);
            assert!((v / q - 1.0).abs() < 0.01, "λ={lambda}: {v} vs {q}");
        }
    }

    #[test]
    fn matern_closed_form_for_three_halves() {
        for z in [0.0, 1e-3, 0.1, 1.0, 5.0, 20.0] {
            let exact = (PI / 2.0).sqrt() * (1.0 + z) * (-z).exp();
            assert!((matern(1.5, z) - exact).abs() < 1e-13, "z={z}");
            let slope = -(PI / 2.0).sqrt() * z * (-z).exp();
            assert!((matern_slope(1.5, z) - slope).abs() < 1e-13, "z={z}");
        }
    }

    #[test]
    fn radial_transform_closed_form_for_m4() {
        let p = PotentialModel::radial_power(1.0, 4.0);
        let xs = [0.0, 0.7, 3.0, 10.0];
        let table = p.y_transform(&xs, 20.0);
        for (i, &x) in xs.iter().enumerate() {
            let a = (1.0 + x * x).sqrt();
            for d in [0.0, 0.013, 0.5, 2.0, 7.3] {
                let exact = (1.0 + a * d) * (-a * d).exp() / (4.0 * a.powi(3));
                assert!((p.y_transform_at(x, d) - exact).abs() <= 1e-13 * exact.max(1e-300));
                assert!(
                    (table.eval(i, d) - exact).abs() <= 1e-8 * exact.max(1e-12),
                    "x={x} d={d}"
                );
            }
        }
    }

    #[test]
    fn transforms_match_quadrature_reference() {
        let models = [
            PotentialModel::radial_power(1.0, 8.0),
            PotentialModel::compact_bump(3.0, 1.0),
            PotentialModel::Separable {
                amplitude: 2.0,
                x_profile: Profile::Power { decay: 3.0 },
                y_profile: Profile::Gaussian { width: 1.5 },
            },
        ];
        let xs = [0.0, 0.4, 1.7, 2.9];
        for p in models {
            let table = p.y_transform(&xs, 12.0);
            for (i, &x) in xs.iter().enumerate() {
                for d in [0.0, 0.3, 1.1, 4.0, 9.5] {
                    let reference = y_cosine_transform_quadrature(&p, x, d);
                    let scale = y_cosine_transform_quadrature(&p, x, 0.0).max(1e-300);
                    let got = table.eval(i, d);
                    assert!(
                        (got - reference).abs() <= 1e-8 * scale,
                        "{p:?} x={x} d={d}: {got} vs {reference}"
                    );
                }
            }
        }
    }

    #[test]
    fn admissibility_of_catalogue() {
        let radial = admissibility_report(&PotentialModel::radial_power(1.0, 4.0)).unwrap();
        assert!(radial.admissible, "{radial:?}");
        let first = radial.scaled_volumes[0];
        assert!((first - 0.25).abs() < 0.01);
        let bump = admissibility_report(&PotentialModel::compact_bump(3.0, 1.0)).unwrap();
        assert!(bump.decay_bound_holds && !bump.volume_band_holds && !bump.admissible);
        let sep = admissibility_report(&PotentialModel::separable_power(1.0, 4.0)).unwrap();
        assert!(
            sep.decay_bound_holds && !sep.volume_band_holds && !sep.admissible,
            "{sep:?}"
        );
    }

    #[test]
    fn separable_volume_grows_logarithmically_at_its_own_scale() {
        // {⟨x⟩⟨y⟩ < λ^{−1/m}} has area ≍ λ^{−1/m}|ln λ|
        let p = PotentialModel::separable_power(1.0, 4.0);
        let ratio = |l: f64| l.powf(0.25) * p.volume(l, Domain::HalfPlane).unwrap() / l.ln().abs();
        let (a, b) = (ratio(1e-4), ratio(1e-8));
        assert!((a / b - 1.0).abs() < 0.3, "{a} {b}");
    }
}
