//! Effective Birman–Schwinger Hamiltonians as finite symmetric matrices.
//!
//! The band-j slice of the sandwiched resolvent is discretized in momentum:
//! Re T_j(ℰ_j + λ) ≈ Φ D Φ*, where the columns of Φ are the functions
//! (2π)^{−1/2} V^{1/2}(x,y) e^{iky} ψ_j(x;k) at quadrature nodes k_q, scaled
//! by the square roots of the weights. Its nonzero spectrum is that of
//! G^{1/2} D G^{1/2} with G = Φ*Φ.

use crate::bands::{tabulate_band, trustworthy_window, InverseBand};
use crate::error::{Error, Result};
use crate::fiber::{
    band_value, grid_eigenpair, limit_mode, BoundaryCondition, FiberGrid, FiberSpec,
};
use crate::numerics::{
    brent_root, composite_gauss_legendre, sym_eigenvalues, sym_sqrt_with_tolerance, CompensatedSum,
    SymMatrix,
};
use crate::potentials::{Domain, PotentialModel};
use rayon::prelude::*;
use serde::Serialize;

/// Gram matrices are accepted as PSD down to this relative eigenvalue.
pub const GRAM_PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this fraction of the largest are dropped.
pub const SPECTRUM_DROP: f64 = 1e-12;
/// Mode samples below this fraction of the peak are outside the support.
const MODE_SUPPORT_CUT: f64 = 1e-8;

/// Resolution of the momentum quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeOptions {
    pub node_budget: usize,
    /// Upper end of the momentum integration.
    pub k_max: f64,
    /// Width of the Gauss–Legendre panels outside the p.v. windows.
    pub panel_width: f64,
    pub panel_order: usize,
    /// Panels in ln σ for the symmetric pairs around each crossing.
    pub window_panels: usize,
    /// Multiplies the excluded half-width |λ|^{2−2/m}.
    pub epsilon_scale: f64,
}

impl SchemeOptions {
    pub const DEFAULT_PANEL_WIDTH: f64 = 0.5;
    pub const DEFAULT_PANEL_ORDER: usize = 8;
    pub const DEFAULT_WINDOW_PANELS: usize = 16;

    pub fn new(node_budget: usize, k_max: f64) -> Self {
        Self {
            node_budget,
            k_max,
            panel_width: Self::DEFAULT_PANEL_WIDTH,
            panel_order: Self::DEFAULT_PANEL_ORDER,
            window_panels: Self::DEFAULT_WINDOW_PANELS,
            epsilon_scale: 1.0,
        }
    }

    /// Panels `factor` times finer in both zones.
    pub fn refined(mut self, factor: f64) -> Self {
        self.panel_width /= factor;
        self.window_panels = ((self.window_panels as f64) * factor).ceil() as usize;
        self
    }

    pub fn with_epsilon_scale(mut self, scale: f64) -> Self {
        self.epsilon_scale = scale;
        self
    }
}

/// Default fraction of the level λ(1−r) down to which V is covered in x.
pub const DEFAULT_COVERAGE: f64 = 0.2;

/// Momentum beyond which the modes sit where V < coverage·|λ|(1−r), padded
/// so that their Gaussian tails stay below (coverage·|λ|)² after the 1/|λ|
/// amplification.
pub fn coverage_momentum(p: &PotentialModel, b: f64, lambda: f64, r: f64, coverage: f64) -> f64 {
    let level = coverage * lambda.abs();
    let x = p.x_extent(level * (1.0 - r));
    b * x + b.sqrt() * (2.0 + (2.0 * (1.0 / level).ln().max(0.0)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    Outer,
    Window,
}

/// Momentum quadrature for the principal-value integral.
#[derive(Debug, Clone, Serialize)]
pub struct PvScheme {
    pub j: usize,
    pub b: f64,
    pub lambda: f64,
    /// Excluded half-width around each crossing of s = λ.
    pub epsilon: f64,
    pub theta: f64,
    /// Nodes, ascending in momentum.
    pub k_nodes: Vec<f64>,
    /// s_q = E_j(k_q) − ℰ_j.
    pub s_nodes: Vec<f64>,
    /// Quadrature weights in momentum.
    pub k_weights: Vec<f64>,
    /// Weights in s: k_weights·|E_j'(k_q)|.
    pub base_weights: Vec<f64>,
    /// 1/(λ − s_q).
    pub pv_denominators: Vec<f64>,
    pub zones: Vec<Zone>,
    /// Momenta where s(k) = λ.
    pub crossings: Vec<f64>,
    pub s_max: f64,
    pub k_min: f64,
    pub k_max: f64,
    /// ε/(λ²|ln|λ||^{1/2}) when a window is excluded, else 0.
    pub window_estimate: f64,
}

impl PvScheme {
    pub fn len(&self) -> usize {
        self.k_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_nodes.is_empty()
    }
}

/// Band table spanning offsets from above 2b down to the trust edge.
pub fn band_for_scheme(spec: &FiberSpec, j: usize) -> Result<InverseBand> {
    spec.validate()?;
    let (_, hi) = trustworthy_window(spec, j)?;
    let step = 0.5 * spec.b.sqrt();
    let mut k_a = 0.0;
    while band_value(spec, j, k_a)?.energy - spec.threshold(j) < 2.2 * spec.b {
        k_a -= step;
    }
    let k_b = hi + step;
    let n = (((k_b - k_a) * 40.0 / spec.b.sqrt()).ceil() as usize).max(64);
    InverseBand::new(tabulate_band(spec, j, k_a, k_b, n)?)
}

/// Finds s(k) = target on a monotone piece `[a, b]`.
fn solve_offset(inv: &InverseBand, target: f64, a: f64, b: f64) -> Result<f64> {
    let guess = brent_root(|k| inv.interpolated_offset(k) - target, a, b, 1e-14)?;
    if guess > inv.k_trust() {
        return Ok(guess);
    }
    let half = 0.05 / inv.spec().b.sqrt();
    inv.refine(
        target,
        guess,
        ((guess - half).max(a), (guess + half).min(b)),
    )
    .map_err(|e| e.at_k(guess))
}

/// Splits `[k_lo, k_hi]` at the interior extrema of the band.
fn monotone_pieces(inv: &InverseBand, k_lo: f64, k_hi: f64) -> Result<Vec<(f64, f64)>> {
    let t = &inv.table;
    let mut cuts = vec![k_lo];
    for i in 0..t.len() - 1 {
        if t.k_nodes[i + 1] > inv.k_trust() {
            break;
        }
        if t.derivatives[i] * t.derivatives[i + 1] < 0.0 {
            let k = brent_root(|k| slope_of(inv, k), t.k_nodes[i], t.k_nodes[i + 1], 1e-12)?;
            if k > k_lo && k < k_hi {
                cuts.push(k);
            }
        }
    }
    cuts.push(k_hi);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(cuts.windows(2).map(|w| (w[0], w[1])).collect())
}

fn slope_of(inv: &InverseBand, k: f64) -> f64 {
    let h = 1e-6;
    (inv.interpolated_offset(k + h) - inv.interpolated_offset(k - h)) / (2.0 * h)
}

fn add_panels(a: f64, b: f64, width: f64, order: usize, nodes: &mut Vec<(f64, f64)>) {
    if b <= a {
        return;
    }
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let edges: Vec<f64> = (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect();
    let rule = composite_gauss_legendre(order, &edges);
    nodes.extend(rule.nodes.iter().copied().zip(rule.weights.iter().copied()));
}

/// Three-zone momentum quadrature for Re T_j(ℰ_j + λ).
pub fn build_pv_scheme(
    inv: &InverseBand,
    j: usize,
    lambda: f64,
    m: f64,
    options: &SchemeOptions,
) -> Result<PvScheme> {
    if j != inv.j() {
        return Err(Error::InvalidInput(format!(
            "band table is for j={}, scheme requested j={j}",
            inv.j()
        )));
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!(
            "scheme needs a finite nonzero lambda, got {lambda}"
        )));
    }
    if !(m > 2.0) {
        return Err(Error::InvalidInput(format!(
            "decay exponent must exceed 2, got {m}"
        )));
    }
    let b = inv.spec().b;
    let s_max = 2.0 * b;
    if lambda >= s_max {
        return Err(Error::OutOfRange {
            quantity: "lambda",
            value: lambda,
            lo: -s_max,
            hi: s_max,
        });
    }
    let theta = 2.0 - 2.0 / m;
    let offsets = inv.table.offsets();
    // lower momentum: last passage of s through s_max
    let k_lo = match (0..offsets.len() - 1)
        .rev()
        .find(|&i| offsets[i] >= s_max && offsets[i + 1] < s_max)
    {
        Some(i) => solve_offset(inv, s_max, inv.table.k_nodes[i], inv.table.k_nodes[i + 1])?,
        None => inv.table.k_nodes[0],
    };
    let pieces = monotone_pieces(inv, k_lo, options.k_max.max(k_lo + 1.0))?;

    let epsilon = lambda.abs().powf(theta) * options.epsilon_scale;
    let mut windows: Vec<(f64, f64)> = Vec::new();
    let mut crossings = Vec::new();
    let mut pair_nodes: Vec<(f64, f64, f64)> = Vec::new(); // (k, s, base weight)
    for &(a, bb) in &pieces {
        let (sa, sb) = (inv.interpolated_offset(a), inv.interpolated_offset(bb));
        if (sa - lambda) * (sb - lambda) > 0.0 {
            continue;
        }
        let kc = solve_offset(inv, lambda, a, bb)?;
        crossings.push(kc);
        let sigma_max = (0.5 * lambda.abs())
            .min(0.9 * (sa - lambda).abs())
            .min(0.9 * (sb - lambda).abs());
        let k1 = solve_offset(inv, lambda + sigma_max, a, bb)?;
        let k2 = solve_offset(inv, lambda - sigma_max, a, bb)?;
        windows.push((k1.min(k2), k1.max(k2)));
        if epsilon < sigma_max {
            let (u0, u1) = (epsilon.ln(), sigma_max.ln());
            let edges: Vec<f64> = (0..=options.window_panels)
                .map(|i| u0 + (u1 - u0) * i as f64 / options.window_panels as f64)
                .collect();
            let rule = composite_gauss_legendre(options.panel_order, &edges);
            for (u, w) in rule.nodes.iter().zip(&rule.weights) {
                let sigma = u.exp();
                for s in [lambda - sigma, lambda + sigma] {
                    let k = solve_offset(inv, s, a, bb)?;
                    pair_nodes.push((k, s, w * sigma));
                }
            }
        }
    }
    let k_max = options
        .k_max
        .max(windows.iter().map(|w| w.1 + 1.0).fold(k_lo + 1.0, f64::max));

    let mut outer: Vec<(f64, f64)> = Vec::new();
    let mut start = k_lo;
    let mut sorted = windows.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    for &(w0, w1) in &sorted {
        add_panels(
            start,
            w0,
            options.panel_width,
            options.panel_order,
            &mut outer,
        );
        start = start.max(w1);
    }
    add_panels(
        start,
        k_max,
        options.panel_width,
        options.panel_order,
        &mut outer,
    );

    let total = outer.len() + pair_nodes.len();
    if total > options.node_budget {
        return Err(Error::NodeBudget {
            budget: options.node_budget,
            required: total,
        });
    }

    let outer_eval: Vec<(f64, f64)> = outer
        .par_iter()
        .map(|&(k, _)| inv.offset_at(k).map_err(|e| e.at_k(k)))
        .collect::<Result<Vec<_>>>()?;
    let pair_slopes: Vec<f64> = pair_nodes
        .par_iter()
        .map(|&(k, _, _)| inv.offset_at(k).map(|v| v.1).map_err(|e| e.at_k(k)))
        .collect::<Result<Vec<_>>>()?;

    let mut nodes: Vec<(f64, f64, f64, f64, Zone)> = Vec::with_capacity(total);
    for (&(k, w), &(s, ds)) in outer.iter().zip(&outer_eval) {
        nodes.push((k, s, w, w * ds.abs(), Zone::Outer));
    }
    for (&(k, s, ws), &ds) in pair_nodes.iter().zip(&pair_slopes) {
        if ds == 0.0 {
            return Err(Error::InversionSingular { s, derivative: ds });
        }
        nodes.push((k, s, ws / ds.abs(), ws, Zone::Window));
    }
    nodes.sort_by(|x, y| x.0.total_cmp(&y.0));

    let window_estimate = if crossings.is_empty() {
        0.0
    } else {
        epsilon / (lambda * lambda * lambda.abs().ln().abs().sqrt())
    };
    Ok(PvScheme {
        j,
        b,
        lambda,
        epsilon: if crossings.is_empty() { 0.0 } else { epsilon },
        theta,
        k_nodes: nodes.iter().map(|n| n.0).collect(),
        s_nodes: nodes.iter().map(|n| n.1).collect(),
        k_weights: nodes.iter().map(|n| n.2).collect(),
        base_weights: nodes.iter().map(|n| n.3).collect(),
        pv_denominators: nodes.iter().map(|n| 1.0 / (lambda - n.1)).collect(),
        zones: nodes.iter().map(|n| n.4).collect(),
        crossings,
        s_max,
        k_min: k_lo,
        k_max,
        window_estimate,
    })
}

/// Gram matrix of the weighted factor functions on one master x-grid.
#[derive(Debug, Clone)]
pub struct GramOperator {
    pub scheme: PvScheme,
    pub gram: SymMatrix,
    pub grid: FiberGrid,
}

/// Single grid on which every mode of the scheme is solved.
pub fn master_grid(spec: &FiberSpec, k_max: f64) -> FiberGrid {
    let length = k_max.max(0.0) / spec.b + spec.pad / spec.b.sqrt();
    let h = spec.grid(0.0, 0).spacing();
    let cells = (length / h).round().max(8.0) as usize;
    let n = match spec.bc {
        BoundaryCondition::Dirichlet => cells - 1,
        BoundaryCondition::Neumann => cells,
    };
    FiberGrid::new(spec.bc, length, n)
}

struct SampledMode {
    values: Vec<f64>,
    lo: usize,
    hi: usize,
}

fn sample_mode(spec: &FiberSpec, grid: &FiberGrid, j: usize, k: f64) -> Result<SampledMode> {
    let (_, v) = grid_eigenpair(spec.b, grid, j, k, None).map_err(|e| e.at_k(k))?;
    let scale = 1.0 / grid.spacing().sqrt();
    let values: Vec<f64> = v.iter().map(|x| x * scale).collect();
    let peak = values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let cut = MODE_SUPPORT_CUT * peak;
    let lo = values.iter().position(|x| x.abs() >= cut).unwrap_or(0);
    let hi = values.iter().rposition(|x| x.abs() >= cut).unwrap_or(0);
    Ok(SampledMode { values, lo, hi })
}

/// g[q][q′] = √(w_q w_q′) ∫ F(x, k_q − k_q′) ψ_j(x;k_q) ψ_j(x;k_q′) dx.
pub fn assemble_gram(
    p: &PotentialModel,
    spec: &FiberSpec,
    scheme: &PvScheme,
) -> Result<GramOperator> {
    spec.validate()?;
    p.validate()?;
    if !p.y_symmetric() {
        return Err(Error::InvalidInput(
            "Gram assembly needs a potential even in y".into(),
        ));
    }
    if (spec.b - scheme.b).abs() > 1e-15 * spec.b {
        return Err(Error::GridMismatch(format!(
            "scheme built for b={}, fiber has b={}",
            scheme.b, spec.b
        )));
    }
    let n = scheme.len();
    let k_hi = scheme.k_nodes.iter().cloned().fold(0.0, f64::max);
    let grid = master_grid(spec, k_hi);
    if p.is_zero() || n == 0 {
        return Ok(GramOperator {
            scheme: scheme.clone(),
            gram: SymMatrix::zeros(n),
            grid,
        });
    }
    let modes: Vec<SampledMode> = scheme
        .k_nodes
        .par_iter()
        .map(|&k| sample_mode(spec, &grid, scheme.j, k))
        .collect::<Result<Vec<_>>>()?;
    if modes.iter().any(|m| m.values.len() != grid.n) {
        return Err(Error::GridMismatch(
            "mode sampled off the master grid".into(),
        ));
    }
    let k_lo = scheme.k_nodes.iter().cloned().fold(f64::INFINITY, f64::min);
    let transform = p.y_transform(&grid.points(), k_hi - k_lo);
    let h = grid.spacing();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|q| {
            let mq = &modes[q];
            (0..=q)
                .map(|r| {
                    let mr = &modes[r];
                    let (lo, hi) = (mq.lo.max(mr.lo), mq.hi.min(mr.hi));
                    if lo > hi {
                        return 0.0;
                    }
                    let delta = scheme.k_nodes[q] - scheme.k_nodes[r];
                    let mut acc = 0.0;
                    for i in lo..=hi {
                        acc += transform.eval(i, delta) * mq.values[i] * mr.values[i];
                    }
                    acc * h * (scheme.k_weights[q] * scheme.k_weights[r]).sqrt()
                })
                .collect()
        })
        .collect();
    let gram = SymMatrix::from_lower(n, |q, r| rows[q][r]);
    Ok(GramOperator {
        scheme: scheme.clone(),
        gram,
        grid,
    })
}

/// Eigenvalues of a finite-rank self-adjoint operator.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// Descending by magnitude.
    pub eigenvalues: Vec<f64>,
    pub trace_norm: f64,
    pub lambda: Option<f64>,
    pub epsilon: f64,
    pub nodes: usize,
    pub grid_points: usize,
    /// Eigenvalues dropped as numerically zero.
    pub dropped: usize,
}

fn spectrum_from(
    values: Vec<f64>,
    lambda: Option<f64>,
    epsilon: f64,
    nodes: usize,
    grid_points: usize,
) -> SpectrumReport {
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let total = values.len();
    let mut kept: Vec<f64> = values
        .into_iter()
        .filter(|v| v.abs() > SPECTRUM_DROP * peak)
        .collect();
    kept.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
    let mut sum = CompensatedSum::new();
    for v in &kept {
        sum.add(v.abs());
    }
    SpectrumReport {
        dropped: total - kept.len(),
        trace_norm: sum.value(),
        eigenvalues: kept,
        lambda,
        epsilon,
        nodes,
        grid_points,
    }
}

/// Spectrum of R·diag(pv_denominators)·R with R = gram^{1/2}.
pub fn re_tj_spectrum(g: &GramOperator) -> Result<SpectrumReport> {
    let n = g.gram.order();
    let s = &g.scheme;
    if n == 0 || g.gram.frobenius_norm() == 0.0 {
        return Ok(spectrum_from(
            Vec::new(),
            Some(s.lambda),
            s.epsilon,
            n,
            g.grid.n,
        ));
    }
    let root = sym_sqrt_with_tolerance(&g.gram, GRAM_PSD_TOL).map_err(|e| e.at_lambda(s.lambda))?;
    let m = root.congruence_diag(&s.pv_denominators);
    let values = sym_eigenvalues(&m).map_err(|e| e.at_lambda(s.lambda))?;
    Ok(spectrum_from(
        values,
        Some(s.lambda),
        s.epsilon,
        n,
        g.grid.n,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountingReport {
    pub threshold: f64,
    pub n_plus: usize,
    pub n_minus: usize,
}

/// Eigenvalues above `s` and below `−s`; `s` should be positive.
pub fn counting(rep: &SpectrumReport, s: f64) -> CountingReport {
    CountingReport {
        threshold: s,
        n_plus: rep.eigenvalues.iter().filter(|&&v| v > s).count(),
        n_minus: rep.eigenvalues.iter().filter(|&&v| v < -s).count(),
    }
}

/// Crossings of s(k) = λ inside the tabulated range and the tail.
pub fn band_crossings(inv: &InverseBand, lambda: f64, k_max: f64) -> Result<Vec<f64>> {
    let k_lo = inv.table.k_nodes[0];
    let mut out = Vec::new();
    for (a, b) in monotone_pieces(inv, k_lo, k_max.max(k_lo + 1.0))? {
        let (sa, sb) = (inv.interpolated_offset(a), inv.interpolated_offset(b));
        if (sa - lambda) * (sb - lambda) <= 0.0 {
            out.push(solve_offset(inv, lambda, a, b)?);
        }
    }
    Ok(out)
}

/// ‖g_k‖² = (1/2π)∫∫ V ψ_j(x;k)² dx dy on the finest fiber grid.
pub fn factor_norm_sq(p: &PotentialModel, spec: &FiberSpec, j: usize, k: f64) -> Result<f64> {
    let grid = spec.grid(k, spec.finest_level());
    let (_, v) = grid_eigenpair(spec.b, &grid, j, k, None).map_err(|e| e.at_k(k))?;
    let mut sum = CompensatedSum::new();
    for (i, vi) in v.iter().enumerate() {
        let f = p.y_transform_at(grid.point(i), 0.0);
        sum.add(f * vi * vi);
    }
    Ok(sum.value())
}

/// Magnitude of the single nonzero eigenvalue of Im T_j(ℰ_j + λ) per
/// crossing, summed: π Σ |ϱ_j'(λ)| ‖g_{ϱ_j(λ)}‖².
pub fn im_tj_trace(
    p: &PotentialModel,
    spec: &FiberSpec,
    inv: &InverseBand,
    j: usize,
    lambda: f64,
) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!(
            "Im T needs lambda > 0, got {lambda}"
        )));
    }
    if j != inv.j() {
        return Err(Error::InvalidInput(format!(
            "band table is for j={}, requested j={j}",
            inv.j()
        )));
    }
    if p.is_zero() {
        return Ok(0.0);
    }
    let k_far = inv.table.k_nodes.last().copied().unwrap_or(0.0) + 10.0 * spec.b.sqrt();
    let mut total = 0.0;
    for k in band_crossings(inv, lambda, k_far)? {
        let (_, ds) = inv.offset_at(k)?;
        if ds == 0.0 {
            return Err(Error::InversionSingular {
                s: lambda,
                derivative: ds,
            });
        }
        total += std::f64::consts::PI * factor_norm_sq(p, spec, j, k)? / ds.abs();
    }
    Ok(total)
}

/// Spectrum of the Nyström matrix of 𝒲_j on a uniform momentum grid over
/// `k_window` with trapezoid weights, using limit modes on the full line.
pub fn toeplitz_vj_spectrum(
    p: &PotentialModel,
    j: usize,
    b: f64,
    k_window: (f64, f64),
    n_nodes: usize,
) -> Result<SpectrumReport> {
    p.validate()?;
    if j == 0 || !(b > 0.0) || !(k_window.0 < k_window.1) || n_nodes < 2 {
        return Err(Error::InvalidInput(format!(
            "Toeplitz spectrum needs j ≥ 1, b > 0, a proper window and ≥ 2 nodes (got j={j}, b={b}, {k_window:?}, {n_nodes})"
        )));
    }
    if p.is_zero() {
        return Ok(spectrum_from(Vec::new(), None, 0.0, n_nodes, 0));
    }
    let (k0, k1) = k_window;
    let hk = (k1 - k0) / (n_nodes - 1) as f64;
    let ks: Vec<f64> = (0..n_nodes).map(|i| k0 + hk * i as f64).collect();
    let wk: Vec<f64> = (0..n_nodes)
        .map(|i| {
            if i == 0 || i == n_nodes - 1 {
                0.5 * hk
            } else {
                hk
            }
        })
        .collect();
    let sb = b.sqrt();
    let reach = (2.0 * j as f64 + 1.0).sqrt() + 9.0;
    let (x0, x1) = (k0 / b - reach / sb, k1 / b + reach / sb);
    let hx = 0.05 / sb;
    let nx = ((x1 - x0) / hx).ceil() as usize + 1;
    let xs: Vec<f64> = (0..nx).map(|i| x0 + hx * i as f64).collect();
    let modes: Vec<Vec<f64>> = ks
        .par_iter()
        .map(|&k| xs.iter().map(|&x| limit_mode(j, k, b, x)).collect())
        .collect();
    // F at the lattice Δ = m·hk is exact: no interpolation in Δ
    let lattice: Vec<Vec<f64>> = (0..n_nodes)
        .into_par_iter()
        .map(|m| {
            xs.iter()
                .map(|&x| p.y_transform_at(x, m as f64 * hk))
                .collect()
        })
        .collect();
    let rows: Vec<Vec<f64>> = (0..n_nodes)
        .into_par_iter()
        .map(|q| {
            (0..=q)
                .map(|r| {
                    let f = &lattice[q - r];
                    let mut acc = 0.0;
                    for i in 0..nx {
                        acc += f[i] * modes[q][i] * modes[r][i];
                    }
                    acc * hx * (wk[q] * wk[r]).sqrt()
                })
                .collect()
        })
        .collect();
    let matrix = SymMatrix::from_lower(n_nodes, |q, r| rows[q][r]);
    let values = sym_eigenvalues(&matrix)?;
    Ok(spectrum_from(values, None, 0.0, n_nodes, nx))
}

/// H₊ = H₀ + V or H₋ = H₀ − V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSide {
    Above,
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bracket {
    pub lower: usize,
    pub upper: usize,
}

impl Bracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper) as f64
    }
}

/// Counting bounds for ±ξ(ℰ_j + λ; H±, H₀), up to the bounded remainder.
#[derive(Debug, Clone, Serialize)]
pub struct SsfBracket {
    pub lambda: f64,
    pub r: f64,
    pub side: ThresholdSide,
    /// Counts of the reported matrix at 1 + r.
    pub counts_hi: CountingReport,
    /// Counts at 1 − r.
    pub counts_lo: CountingReport,
    /// ξ(·; H₊, H₀): positive-side counts of R·diag(1/(λ−s))·R.
    pub plus: Bracket,
    /// −ξ(·; H₋, H₀): negative-side counts.
    pub minus: Bracket,
    pub trace_norm: f64,
    pub epsilon: f64,
    pub nodes: usize,
    pub grid_points: usize,
    pub window_estimate: f64,
    pub crossings: Vec<f64>,
    /// Tail operators of the other bands are not assembled.
    pub cross_band_terms_omitted: bool,
}

impl SsfBracket {
    pub fn bracket(&self, which: Perturbation) -> Bracket {
        match which {
            Perturbation::Plus => self.plus,
            Perturbation::Minus => self.minus,
        }
    }
}

/// Bracket from a spectrum already computed.
pub fn bracket_from_spectrum(scheme: &PvScheme, rep: &SpectrumReport, r: f64) -> SsfBracket {
    let hi = counting(rep, 1.0 + r);
    let lo = counting(rep, 1.0 - r);
    SsfBracket {
        lambda: scheme.lambda,
        r,
        side: if scheme.lambda > 0.0 {
            ThresholdSide::Above
        } else {
            ThresholdSide::Below
        },
        counts_hi: hi,
        counts_lo: lo,
        plus: Bracket {
            lower: hi.n_plus,
            upper: lo.n_plus,
        },
        minus: Bracket {
            lower: hi.n_minus,
            upper: lo.n_minus,
        },
        trace_norm: rep.trace_norm,
        epsilon: scheme.epsilon,
        nodes: scheme.len(),
        grid_points: rep.grid_points,
        window_estimate: scheme.window_estimate,
        crossings: scheme.crossings.clone(),
        cross_band_terms_omitted: true,
    }
}

/// build_pv_scheme → assemble_gram → re_tj_spectrum → counting at 1 ± r.
#[allow(clippy::too_many_arguments)]
pub fn ssf_bracket_with(
    p: &PotentialModel,
    spec: &FiberSpec,
    inv: &InverseBand,
    j: usize,
    lambda: f64,
    r: f64,
    m: f64,
    options: &SchemeOptions,
) -> Result<(SsfBracket, SpectrumReport)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidInput(format!(
            "margin r must lie in (0,1), got {r}"
        )));
    }
    let run = || -> Result<(SsfBracket, SpectrumReport)> {
        let scheme = build_pv_scheme(inv, j, lambda, m, options)?;
        let gram = assemble_gram(p, spec, &scheme)?;
        let rep = re_tj_spectrum(&gram)?;
        Ok((bracket_from_spectrum(&scheme, &rep, r), rep))
    };
    run().map_err(|e| match e {
        Error::AtLambda { .. } => e,
        other => other.at_lambda(lambda),
    })
}

/// Bracket with the default resolution and a momentum cover derived from V.
pub fn ssf_bracket(
    p: &PotentialModel,
    spec: &FiberSpec,
    inv: &InverseBand,
    j: usize,
    lambda: f64,
    r: f64,
    node_budget: usize,
) -> Result<SsfBracket> {
    let m = p
        .decay_exponent()
        .unwrap_or(crate::potentials::NOMINAL_BUMP_DECAY);
    let options = SchemeOptions::new(
        node_budget,
        coverage_momentum(p, spec.b, lambda, r, DEFAULT_COVERAGE),
    );
    Ok(ssf_bracket_with(p, spec, inv, j, lambda, r, m, &options)?.0)
}

/// b·N(|λ|, V) on the half plane: the leading term the bracket is compared to.
pub fn leading_term(p: &PotentialModel, b: f64, lambda: f64) -> Result<f64> {
    Ok(b * p.volume(lambda.abs(), Domain::HalfPlane)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Profile;
    use std::sync::OnceLock;

    fn dirichlet_band() -> &'static InverseBand {
        static BAND: OnceLock<InverseBand> = OnceLock::new();
        BAND.get_or_init(|| band_for_scheme(&FiberSpec::dirichlet(1.0), 1).unwrap())
    }

    fn small_options(k_max: f64) -> SchemeOptions {
        let mut o = SchemeOptions::new(4000, k_max);
        o.window_panels = 4;
        o.panel_width = 1.0;
        o
    }

    #[test]
    fn pairs_are_symmetric_about_lambda() {
        let inv = dirichlet_band();
        let lambda = 1e-3;
        let s = build_pv_scheme(inv, 1, lambda, 4.0, &small_options(8.0)).unwrap();
        assert!((s.epsilon - lambda.powf(1.5)).abs() < 1e-15);
        assert_eq!(s.crossings.len(), 1);
        let window: Vec<(f64, f64)> = s
            .zones
            .iter()
            .enumerate()
            .filter(|(_, z)| **z == Zone::Window)
            .map(|(i, _)| (s.s_nodes[i], s.base_weights[i]))
            .collect();
        assert!(!window.is_empty());
        for &(sq, w) in &window {
            assert!((sq - lambda).abs() >= s.epsilon * (1.0 - 1e-9));
            let mirror = 2.0 * lambda - sq;
            let partner = window
                .iter()
                .find(|(t, _)| (t - mirror).abs() < 1e-12 * lambda);
            let (_, wp) = partner.expect("mirror node");
            assert!((wp - w).abs() <= 1e-14 * w);
        }
        for w in s.k_nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (i, &sq) in s.s_nodes.iter().enumerate() {
            assert!(sq != lambda);
            assert!((s.pv_denominators[i] * (lambda - sq) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn below_threshold_has_no_window() {
        let s = build_pv_scheme(dirichlet_band(), 1, -1e-3, 4.0, &small_options(8.0)).unwrap();
        assert_eq!(s.epsilon, 0.0);
        assert!(s.crossings.is_empty());
        assert!(s.pv_denominators.iter().all(|&d| d < 0.0));
    }

    #[test]
    fn budget_is_enforced() {
        let mut o = small_options(8.0);
        o.node_budget = 10;
        assert!(matches!(
            build_pv_scheme(dirichlet_band(), 1, 1e-3, 4.0, &o),
            Err(Error::NodeBudget { budget: 10, .. })
        ));
    }

    #[test]
    fn zero_potential_gives_zero_gram_and_empty_spectrum() {
        let spec = FiberSpec::dirichlet(1.0);
        let s = build_pv_scheme(dirichlet_band(), 1, 1e-2, 4.0, &small_options(6.0)).unwrap();
        let p = PotentialModel::radial_power(0.0, 4.0);
        // zero amplitude is rejected by validation, so build the zero case by hand
        assert!(assemble_gram(&p, &spec, &s).is_err());
        let p = PotentialModel::compact_bump(1.0, 1.0);
        let far = PvScheme {
            k_nodes: s.k_nodes.iter().map(|k| k + 40.0).collect(),
            ..s.clone()
        };
        let g = assemble_gram(&p, &spec, &far).unwrap();
        assert_eq!(g.gram.frobenius_norm(), 0.0);
        assert!(re_tj_spectrum(&g).unwrap().eigenvalues.is_empty());
    }

    #[test]
    fn diagonal_matches_direct_integral() {
        let spec = FiberSpec::dirichlet(1.0);
        let p = PotentialModel::compact_bump(2.0, 1.0);
        let s = build_pv_scheme(dirichlet_band(), 1, 1e-2, 4.0, &small_options(4.0)).unwrap();
        let g = assemble_gram(&p, &spec, &s).unwrap();
        let grid = g.grid;
        for q in [0, s.len() / 3, s.len() - 1] {
            let (_, v) = grid_eigenpair(1.0, &grid, 1, s.k_nodes[q], None).unwrap();
            // (1/2π)∫∫ V ψ² by direct 2-D quadrature in y
            let ys = composite_gauss_legendre(
                16,
                &(0..=16).map(|i| 2.0 * i as f64 / 16.0).collect::<Vec<_>>(),
            );
            let direct: f64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| {
                    let x = grid.point(i);
                    vi * vi * 2.0 * ys.integrate(|y| p.eval(x, y)) / (2.0 * std::f64::consts::PI)
                })
                .sum();
            let expected = s.k_weights[q] * direct;
            assert!(
                (g.gram.get(q, q) - expected).abs() <= 1e-8 * expected.max(1e-300),
                "q={q}"
            );
            assert!(g.gram.get(q, q) >= 0.0);
        }
    }

    #[test]
    fn separable_entries_factorize() {
        let spec = FiberSpec::dirichlet(1.0);
        let xp = Profile::Power { decay: 3.0 };
        let yp = Profile::Gaussian { width: 1.3 };
        let p = PotentialModel::Separable {
            amplitude: 0.7,
            x_profile: xp,
            y_profile: yp,
        };
        let s = build_pv_scheme(dirichlet_band(), 1, 2e-2, 4.0, &small_options(5.0)).unwrap();
        let g = assemble_gram(&p, &spec, &s).unwrap();
        let grid = g.grid;
        let h = grid.spacing();
        let pick = [0, 5, s.len() / 2, s.len() - 1];
        let modes: Vec<Vec<f64>> = pick
            .iter()
            .map(|&q| grid_eigenpair(1.0, &grid, 1, s.k_nodes[q], None).unwrap().1)
            .collect();
        for (a, &q) in pick.iter().enumerate() {
            for (c, &r) in pick.iter().enumerate() {
                let delta = s.k_nodes[q] - s.k_nodes[r];
                // v̂₂(Δ) for e^{−y²/w²}: (w/(2√π)) e^{−w²Δ²/4}
                let w = 1.3;
                let v2 =
                    w / (2.0 * std::f64::consts::PI.sqrt()) * (-(w * delta).powi(2) / 4.0).exp();
                let overlap: f64 = (0..grid.n)
                    .map(|i| xp.value(grid.point(i)) * modes[a][i] * modes[c][i])
                    .sum();
                let expected = (s.k_weights[q] * s.k_weights[r]).sqrt() * 0.7 * v2 * overlap;
                let got = g.gram.get(q, r);
                let scale = (g.gram.get(q, q) * g.gram.get(r, r)).sqrt();
                assert!(
                    (got - expected).abs() <= 1e-8 * scale,
                    "({q},{r}): {got} vs {expected}"
                );
            }
        }
        let _ = h;
    }

    #[test]
    fn below_threshold_spectrum_is_nonpositive_and_traces_agree() {
        let spec = FiberSpec::dirichlet(1.0);
        let p = PotentialModel::radial_power(1.0, 4.0);
        let s = build_pv_scheme(dirichlet_band(), 1, -1e-2, 4.0, &small_options(10.0)).unwrap();
        let g = assemble_gram(&p, &spec, &s).unwrap();
        let rep = re_tj_spectrum(&g).unwrap();
        assert!(rep.eigenvalues.len() <= s.len());
        let peak = rep.eigenvalues[0].abs();
        assert!(rep.eigenvalues.iter().all(|&v| v <= 1e-10 * peak));
        let c = counting(&rep, 1.0);
        assert_eq!(c.n_plus, 0);
        assert!(c.n_minus > 0);
        let trace: f64 = rep.eigenvalues.iter().sum();
        let oracle: f64 = (0..s.len())
            .map(|q| s.pv_denominators[q] * g.gram.get(q, q))
            .sum();
        assert!((trace - oracle).abs() <= 1e-8 * oracle.abs());
        let norm: f64 = rep.eigenvalues.iter().map(|v| v.abs()).sum();
        assert!((norm - rep.trace_norm).abs() <= 1e-12 * norm);
    }

    #[test]
    fn above_threshold_has_both_signs() {
        let spec = FiberSpec::dirichlet(1.0);
        let p = PotentialModel::radial_power(1.0, 4.0);
        let s = build_pv_scheme(dirichlet_band(), 1, 1e-2, 4.0, &small_options(10.0)).unwrap();
        let rep = re_tj_spectrum(&assemble_gram(&p, &spec, &s).unwrap()).unwrap();
        assert!(rep.eigenvalues.iter().any(|&v| v > 0.0));
        assert!(rep.eigenvalues.iter().any(|&v| v < 0.0));
        let trace: f64 = rep.eigenvalues.iter().sum();
        let g = assemble_gram(&p, &spec, &s).unwrap();
        let oracle: f64 = (0..s.len())
            .map(|q| s.pv_denominators[q] * g.gram.get(q, q))
            .sum();
        let scale: f64 = (0..s.len())
            .map(|q| (s.pv_denominators[q] * g.gram.get(q, q)).abs())
            .sum();
        assert!((trace - oracle).abs() <= 1e-8 * scale);
    }

    #[test]
    fn counting_examples() {
        let rep = spectrum_from(vec![2.0, -3.0, 0.5], None, 0.0, 3, 0);
        assert_eq!(
            counting(&rep, 1.0),
            CountingReport {
                threshold: 1.0,
                n_plus: 1,
                n_minus: 1
            }
        );
        let none = counting(&rep, 5.0);
        assert_eq!((none.n_plus, none.n_minus), (0, 0));
        assert_eq!(rep.eigenvalues, vec![-3.0, 2.0, 0.5]);
    }

    #[test]
    fn im_part_matches_poisson_kernel_limit() {
        let spec = FiberSpec::dirichlet(1.0);
        let inv = dirichlet_band();
        let p = PotentialModel::radial_power(1.0, 4.0);
        let lambda = 1e-2;
        let direct = im_tj_trace(&p, &spec, inv, 1, lambda).unwrap();
        assert!(direct > 0.0);
        // δ ∫ f(s)/((s−λ)²+δ²) ds with s = λ + δ tan u, f(s) = ‖g_ϱ(s)‖²|ϱ'(s)|
        let delta = 1e-6 * lambda;
        let f = |s: f64| {
            let k = inv.invert(s).unwrap();
            let (_, ds) = inv.offset_at(k).unwrap();
            factor_norm_sq(&p, &spec, 1, k).unwrap() / ds.abs()
        };
        let (ua, ub) = (
            (-0.5 * lambda / delta).atan(),
            (0.5 * lambda / delta).atan(),
        );
        let edges: Vec<f64> = (0..=8).map(|i| ua + (ub - ua) * i as f64 / 8.0).collect();
        let rule = composite_gauss_legendre(6, &edges);
        let poisson = rule.integrate(|u| f(lambda + delta * u.tan()));
        assert!(
            (poisson / direct - 1.0).abs() < 1e-4,
            "{poisson} vs {direct}"
        );
    }

    #[test]
    fn toeplitz_matches_lowest_landau_level_oracle() {
        // For j = 1 and radial W the operator is diagonal in angular momentum:
        // μ_l = ∫₀^∞ W(√(2t/b)) t^l e^{−t}/l! dt. The kernel has a |Δ|³ kink
        // at k = k′, so the trapezoid rule converges like h⁴ here.
        let p = PotentialModel::radial_power(1.0, 4.0);
        let rep = toeplitz_vj_spectrum(&p, 1, 1.0, (-12.0, 12.0), 241).unwrap();
        let edges: Vec<f64> = (0..=200).map(|i| i as f64 * 0.5).collect();
        let rule = composite_gauss_legendre(12, &edges);
        for l in 0..6 {
            let mu = rule.integrate(|t| {
                let lg = (1..=l).map(|i| (i as f64).ln()).sum::<f64>();
                (1.0 + 2.0 * t).powi(-2) * (l as f64 * t.ln() - t - lg).exp()
            });
            assert!(
                (rep.eigenvalues[l] - mu).abs() < 2e-6 * rep.eigenvalues[0],
                "l={l}: {} vs {mu}",
                rep.eigenvalues[l]
            );
        }
        let peak = rep.eigenvalues[0];
        assert!(rep.eigenvalues.iter().all(|&v| v >= -1e-10 * peak));
    }

    #[test]
    fn toeplitz_of_distant_bump_is_empty() {
        let p = PotentialModel::compact_bump(1.0, 1.0);
        let rep = toeplitz_vj_spectrum(&p, 1, 1.0, (30.0, 40.0), 20).unwrap();
        assert!(rep.eigenvalues.is_empty());
    }
}
