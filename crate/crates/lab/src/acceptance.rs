//! Acceptance criteria at desk scale.
//!
//! Every criterion is evaluated at its stated tolerance. A criterion that
//! does not hold is reported as failed, never loosened; only the compact
//! support scenario is warning-only.

use esl_core::bands::{
    band_minimum, gap_asymptotic_ratio, mode_defect, tabulate_band, TRUST_FACTOR,
};
use esl_core::effective::{
    band_for_scheme, counting, coverage_momentum, ssf_bracket, toeplitz_vj_spectrum, SsfBracket,
};
use esl_core::fiber::{band_value, BoundaryCondition, FiberSpec};
use esl_core::numerics::{jacobi_eigs, sym_sqrt, tridiag_eigs, SymMatrix, TriDiag};
use esl_core::potentials::{Domain, PotentialModel};
use esl_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Margin r of the bracket thresholds 1 ± r.
pub const MARGIN: f64 = 0.5;
pub const NODE_BUDGET: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub warning_only: bool,
    pub detail: String,
}

impl Criterion {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            id,
            name,
            passed,
            warning_only: false,
            detail,
        }
    }

    pub fn status(&self) -> &'static str {
        match (self.passed, self.warning_only) {
            (true, _) => "PASS",
            (false, true) => "WARN",
            (false, false) => "FAIL",
        }
    }

    /// One line: status, id, name and the measured values.
    pub fn line(&self) -> String {
        format!(
            "{} C{} {}: {}",
            self.status(),
            self.id,
            self.name,
            self.detail
        )
    }
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

fn max_over_min(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

fn radial() -> PotentialModel {
    PotentialModel::radial_power(1.0, 4.0)
}

/// Exact band anchors at k = 0.
pub fn band_anchors() -> Result<Criterion> {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (spec, shift) in [
        (FiberSpec::dirichlet(1.0), 1.0),
        (FiberSpec::neumann(1.0), 3.0),
    ] {
        for j in 1..=3usize {
            let e = band_value(&spec, j, 0.0)?.energy;
            let err = (e - (4.0 * j as f64 - shift)).abs();
            worst = worst.max(err);
            parts.push(format!(
                "{}{j}={e:.10}",
                if shift == 1.0 { "D" } else { "N" }
            ));
        }
    }
    Ok(Criterion::new(
        1,
        "band anchors",
        worst < 1e-8,
        format!("max error {worst:.2e}; {}", parts.join(" ")),
    ))
}

/// Strict decrease on [−6, 6], threshold limit at k = 6, growth at k = −10.
pub fn band_limits() -> Result<Criterion> {
    let spec = FiberSpec::dirichlet(1.0);
    let mut decreasing = true;
    let mut limit_ok = true;
    let mut growth_ok = true;
    let mut parts = Vec::new();
    for j in 1..=2usize {
        let t = tabulate_band(&spec, j, -6.0, 6.0, 64)?;
        decreasing &= t.strictly_decreasing;
        let tail = band_value(&spec, j, 6.0)?.energy - spec.threshold(j);
        limit_ok &= tail < 1e-6;
        let growth = band_value(&spec, j, -10.0)?.energy / 100.0;
        growth_ok &= (growth - 1.0).abs() <= 0.15;
        parts.push(format!(
            "j={j}: decreasing={} ({} of {} pairs below resolution) E(6)-thr={tail:.2e} E(-10)/100={growth:.4}",
            t.strictly_decreasing,
            t.unresolved_pairs,
            t.len() - 1
        ));
    }
    Ok(Criterion::new(
        2,
        "band limits and monotonicity",
        decreasing && limit_ok && growth_ok,
        parts.join("; "),
    ))
}

/// (E₁ − 1)/(k e^{−k²}) plateau on [2.5, 3.5] with the trust gate active.
pub fn gap_plateau() -> Result<Criterion> {
    let spec = FiberSpec::dirichlet(1.0);
    let ks: Vec<f64> = (0..=8).map(|i| 2.5 + 0.125 * i as f64).collect();
    let ratios = ks
        .iter()
        .map(|&k| gap_asymptotic_ratio(&spec, 1, k))
        .collect::<Result<Vec<_>>>()?;
    let spread = max_over_min(&ratios) - 1.0;
    let gated = matches!(
        gap_asymptotic_ratio(&spec, 1, 7.0),
        Err(Error::Untrustworthy { .. })
    );
    Ok(Criterion::new(
        3,
        "gap law plateau",
        spread < 0.35 && gated && ratios.iter().all(|&r| r > 0.0),
        format!(
            "ratios {} spread {:.1}%; gate rejects k=7: {gated}",
            fmt_list(&ratios),
            100.0 * spread
        ),
    ))
}

/// ϱ₁(s)/|ln s|^{1/2} confined to a band with max/min < 2 on [1e−6, 1e−2].
pub fn inverse_band_law() -> Result<Criterion> {
    let inv = band_for_scheme(&FiberSpec::dirichlet(1.0), 1)?;
    let values = (0..=16)
        .map(|i| {
            let s = 10f64.powf(-6.0 + 0.25 * i as f64);
            Ok(inv.invert(s)? / s.ln().abs().sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let q = max_over_min(&values);
    let positive = values.iter().all(|&v| v > 0.0);
    Ok(Criterion::new(
        4,
        "inverse band law",
        positive && q < 2.0,
        format!(
            "range [{:.4}, {:.4}] max/min {q:.3}",
            values.iter().cloned().fold(f64::INFINITY, f64::min),
            values.iter().cloned().fold(0.0, f64::max)
        ),
    ))
}

/// defect·k/gap^{1/2} stays within a factor 3 of its value at k = 2.
pub fn mode_defect_bound() -> Result<Criterion> {
    let spec = FiberSpec::dirichlet(1.0);
    let mut scaled = Vec::new();
    let mut trusted = true;
    for i in 0..=6 {
        let k = 2.0 + 0.25 * i as f64;
        let v = band_value(&spec, 1, k)?;
        let gap = v.energy - 1.0;
        trusted &= gap >= TRUST_FACTOR * v.disc_error;
        scaled.push(mode_defect(&spec, 1, k)? * k / gap.sqrt());
    }
    let c = scaled[0];
    let within = scaled.iter().all(|&v| v / c < 3.0 && v / c > 1.0 / 3.0);
    Ok(Criterion::new(
        5,
        "mode defect bound",
        trusted && within,
        format!(
            "frozen constant {c:.4}; scaled {} all trustworthy: {trusted}",
            fmt_list(&scaled)
        ),
    ))
}

/// Eigensolver, Jacobi and square-root oracles.
pub fn numerics_oracles(seed: u64) -> Result<Criterion> {
    let n = 500;
    let h = 1.0 / (n + 1) as f64;
    let t = TriDiag::new(vec![2.0 / (h * h); n], vec![-1.0 / (h * h); n - 1])?;
    let eigs = tridiag_eigs(&t, n)?;
    let tri_err = eigs
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let exact = 2.0 / (h * h) * (1.0 - ((i + 1) as f64 * std::f64::consts::PI * h).cos());
            ((e - exact) / exact).abs()
        })
        .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = SymMatrix::from_lower(50, |_, _| rng.gen_range(-1.0..1.0));
    let eig = jacobi_eigs(&a)?;
    let mut rec: f64 = 0.0;
    for i in 0..50 {
        for j in 0..50 {
            let v: f64 = (0..50)
                .map(|l| eig.vectors.get(i, l) * eig.values[l] * eig.vectors.get(j, l))
                .sum();
            rec += (v - a.get(i, j)).powi(2);
        }
    }
    let rec = rec.sqrt();

    let m: Vec<Vec<f64>> = (0..50)
        .map(|_| (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let psd = SymMatrix::from_lower(50, |i, j| {
        (0..50).map(|l| m[i][l] * m[j][l]).sum::<f64>() / 50.0
    });
    let root = sym_sqrt(&psd)?;
    let square = root.mul(&root);
    let mut sq_err: f64 = 0.0;
    for i in 0..50 {
        for j in 0..50 {
            sq_err += (square.get(i, j) - psd.get(i, j)).powi(2);
        }
    }
    let sq_err = sq_err.sqrt();
    Ok(Criterion::new(
        6,
        "numerics oracles",
        tri_err < 1e-10 && rec < 1e-10 && sq_err < 1e-10,
        format!("tridiagonal rel {tri_err:.2e}; Jacobi reconstruction {rec:.2e}; sqrt round trip {sq_err:.2e}"),
    ))
}

/// (Neumann?, λ bits)
type BracketKey = (bool, u64);

fn bracket_cache() -> &'static Mutex<HashMap<BracketKey, SsfBracket>> {
    static CACHE: OnceLock<Mutex<HashMap<BracketKey, SsfBracket>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Radial m = 4 bracket for band 1 at b = 1, shared between criteria.
fn radial_bracket(bc: BoundaryCondition, lambda: f64) -> Result<SsfBracket> {
    let key = (bc == BoundaryCondition::Neumann, lambda.to_bits());
    if let Some(b) = bracket_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(b.clone());
    }
    let spec = FiberSpec::new(1.0, bc);
    let inv = band_table(bc)?;
    let b = ssf_bracket(&radial(), &spec, inv, 1, lambda, MARGIN, NODE_BUDGET)?;
    bracket_cache()
        .lock()
        .expect("cache poisoned")
        .insert(key, b.clone());
    Ok(b)
}

fn band_table(bc: BoundaryCondition) -> Result<&'static esl_core::bands::InverseBand> {
    static D: OnceLock<esl_core::bands::InverseBand> = OnceLock::new();
    static N: OnceLock<esl_core::bands::InverseBand> = OnceLock::new();
    let cell = if bc == BoundaryCondition::Dirichlet {
        &D
    } else {
        &N
    };
    if let Some(inv) = cell.get() {
        return Ok(inv);
    }
    let inv = band_for_scheme(&FiberSpec::new(1.0, bc), 1)?;
    Ok(cell.get_or_init(|| inv))
}

/// trace_norm·λ within a factor-3 band (max/min ≤ 3).
pub fn trace_norm_scaling() -> Result<Criterion> {
    let lambdas = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
    let scaled = lambdas
        .iter()
        .map(|&l| Ok(radial_bracket(BoundaryCondition::Dirichlet, l)?.trace_norm * l))
        .collect::<Result<Vec<f64>>>()?;
    let q = max_over_min(&scaled);
    Ok(Criterion::new(
        7,
        "trace-norm scaling",
        q <= 3.0,
        format!(
            "trace_norm*lambda at {lambdas:?}: {} max/min {q:.3}",
            fmt_list(&scaled)
        ),
    ))
}

/// H₊ above threshold: midpoint/(b N) ∈ [0.5, 1.5] with |ratio − 1| nonincreasing.
pub fn main_asymptotics() -> Result<Criterion> {
    let p = radial();
    let mut ratios = Vec::new();
    let mut parts = Vec::new();
    for l in [1e-3, 3e-4, 1e-4] {
        let b = radial_bracket(BoundaryCondition::Dirichlet, l)?;
        let n = p.volume(l, Domain::HalfPlane)?;
        let ratio = b.plus.midpoint() / n;
        parts.push(format!(
            "lambda={l:e}: plus=({},{}) bN={n:.3} ratio={ratio:.4} nodes={}",
            b.plus.lower, b.plus.upper, b.nodes
        ));
        ratios.push(ratio);
    }
    let in_band = ratios.iter().all(|r| (0.5..=1.5).contains(r));
    let monotone = ratios
        .windows(2)
        .all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs());
    Ok(Criterion::new(
        8,
        "main asymptotics",
        in_band && monotone,
        parts.join("; "),
    ))
}

/// (a) H₊ below threshold bounded by its value at 1e−2.
pub fn plus_below_threshold_bounded() -> Result<Criterion> {
    let mut uppers = Vec::new();
    for l in [1e-2, 3e-3, 1e-3, 3e-4, 1e-4] {
        let b = radial_bracket(BoundaryCondition::Dirichlet, -l)?;
        uppers.push((l, b.plus));
    }
    let cap = uppers[0].1.upper;
    let bounded = uppers.iter().all(|(_, b)| b.upper <= cap);
    let parts: Vec<String> = uppers
        .iter()
        .map(|(l, b)| format!("{l:e}:({},{})", b.lower, b.upper))
        .collect();
    Ok(Criterion::new(
        9,
        "H+ below threshold bounded",
        bounded,
        format!("plus brackets {}", parts.join(" ")),
    ))
}

/// (b) H₋ above threshold: midpoint·λ^{1/2} halves from 1e−3 to 1e−4.
pub fn minus_above_threshold_sublinear() -> Result<Criterion> {
    let scaled = [1e-3, 1e-4]
        .iter()
        .map(|&l| {
            Ok(radial_bracket(BoundaryCondition::Dirichlet, l)?
                .minus
                .midpoint()
                * l.sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Criterion::new(
        9,
        "H- above threshold sublinear",
        scaled[1] <= 0.5 * scaled[0],
        format!(
            "midpoint*lambda^(1/2): {:.4} at 1e-3, {:.4} at 1e-4 (ratio {:.3})",
            scaled[0],
            scaled[1],
            scaled[1] / scaled[0]
        ),
    ))
}

/// n₊(λ; 𝒲₁)/Ñ ∈ [0.8, 1.2] with ≤ 2% drift under halving the Nyström step.
pub fn toeplitz_weyl_law() -> Result<Criterion> {
    let p = radial();
    let lambdas = [1e-2, 3e-3, 1e-3];
    let k = coverage_momentum(&p, 1.0, 1e-3, 0.0, 0.1);
    let mut counts = Vec::new();
    for h in [0.25, 0.125] {
        let n = (2.0 * k / h).round() as usize + 1;
        let rep = toeplitz_vj_spectrum(&p, 1, 1.0, (-k, k), n)?;
        counts.push(
            lambdas
                .iter()
                .map(|&l| counting(&rep, l).n_plus)
                .collect::<Vec<_>>(),
        );
    }
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, &l) in lambdas.iter().enumerate() {
        let nt = p.volume(l, Domain::FullPlane)?;
        let (c0, c1) = (counts[0][i] as f64, counts[1][i] as f64);
        let ratio = c1 / nt;
        let drift = (c1 - c0).abs() / c1.max(1.0);
        ok &= (0.8..=1.2).contains(&ratio) && drift <= 0.02;
        parts.push(format!(
            "{l:e}: n+={} Ntilde={nt:.3} ratio={ratio:.3} drift={:.1}%",
            counts[1][i],
            100.0 * drift
        ));
    }
    Ok(Criterion::new(
        10,
        "Toeplitz Weyl law",
        ok,
        format!("K={k:.2}; {}", parts.join("; ")),
    ))
}

/// Neumann minimum and the swapped roles of H₊ and H₋.
pub fn neumann_variant() -> Result<Criterion> {
    let coarse = FiberSpec::neumann(1.0);
    let fine = coarse.with_n_x(2 * coarse.n_x);
    let m0 = band_minimum(&coarse, 1, -2.0, 4.0)?;
    let m1 = band_minimum(&fine, 1, -2.0, 4.0)?;
    let drift = (m0.energy - m1.energy).abs();
    let minimum_ok = m0.count == 1
        && m1.count == 1
        && m0.energy < 1.0
        && m0.k > -2.0
        && m0.k < 4.0
        && drift < 1e-6;

    let lambdas = [1e-2, 1e-3, 1e-4];
    let above = lambdas
        .iter()
        .map(|&l| radial_bracket(BoundaryCondition::Neumann, l))
        .collect::<Result<Vec<_>>>()?;
    let below = lambdas
        .iter()
        .map(|&l| radial_bracket(BoundaryCondition::Neumann, -l))
        .collect::<Result<Vec<_>>>()?;
    // the bounded role moves to H₋ above threshold and H₊ below loses it
    let minus_bounded = above.iter().all(|b| b.minus.upper <= above[0].minus.upper);
    let plus_unbounded = below.iter().any(|b| b.plus.upper > below[0].plus.upper);
    let p = radial();
    let growth = below
        .iter()
        .zip(lambdas)
        .map(|(b, l)| Ok(b.minus.midpoint() / p.volume(l, Domain::HalfPlane)?))
        .collect::<Result<Vec<f64>>>()?;
    let detail = format!(
        "minimum k={:.6} E={:.9} (n_x doubled: {:.9}, drift {drift:.1e}, minima {}); H- above {:?}; H+ below {:?}; H- below midpoint/bN {}",
        m0.k,
        m0.energy,
        m1.energy,
        m0.count,
        above.iter().map(|b| (b.minus.lower, b.minus.upper)).collect::<Vec<_>>(),
        below.iter().map(|b| (b.plus.lower, b.plus.upper)).collect::<Vec<_>>(),
        fmt_list(&growth),
    );
    Ok(Criterion::new(
        11,
        "Neumann variant",
        minimum_ok && minus_bounded && plus_unbounded,
        detail,
    ))
}

/// Compact bump, H₋ below threshold: bracket ≍ |ln λ|^{1/2}.
pub fn compact_support_growth() -> Result<Criterion> {
    let p = PotentialModel::compact_bump(3.0, 1.0);
    let spec = FiberSpec::dirichlet(1.0);
    let inv = band_table(BoundaryCondition::Dirichlet)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for l in [1e-3, 1e-5, 1e-7] {
        let b = ssf_bracket(&p, &spec, inv, 1, -l, MARGIN, NODE_BUDGET)?;
        xs.push(l.ln().abs().sqrt());
        ys.push(b.minus.midpoint());
    }
    let c =
        xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>() / xs.iter().map(|x| x * x).sum::<f64>();
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| ((y - c * x) / (c * x)).abs())
        .fold(0.0, f64::max);
    let mut crit = Criterion::new(
        12,
        "compact support growth",
        c > 0.0 && residual < 0.3,
        format!(
            "midpoints {ys:?} fit c={c:.4} max relative residual {:.1}%",
            100.0 * residual
        ),
    );
    crit.warning_only = true;
    Ok(crit)
}

/// Every criterion in order; errors are reported as failures.
pub fn run_all(seed: u64) -> Vec<Criterion> {
    type Check = (u8, &'static str, Box<dyn Fn() -> Result<Criterion>>);
    let checks: Vec<Check> = vec![
        (1, "band anchors", Box::new(band_anchors)),
        (2, "band limits and monotonicity", Box::new(band_limits)),
        (3, "gap law plateau", Box::new(gap_plateau)),
        (4, "inverse band law", Box::new(inverse_band_law)),
        (5, "mode defect bound", Box::new(mode_defect_bound)),
        (
            6,
            "numerics oracles",
            Box::new(move || numerics_oracles(seed)),
        ),
        (7, "trace-norm scaling", Box::new(trace_norm_scaling)),
        (8, "main asymptotics", Box::new(main_asymptotics)),
        (9, "H+ below threshold bounded", Box::new(plus_below_threshold_bounded)),
        (
            9,
            "H- above threshold sublinear",
            Box::new(minus_above_threshold_sublinear),
        ),
        (10, "Toeplitz Weyl law", Box::new(toeplitz_weyl_law)),
        (11, "Neumann variant", Box::new(neumann_variant)),
        (
            12,
            "compact support growth",
            Box::new(compact_support_growth),
        ),
    ];
    checks
        .into_iter()
        .map(|(id, name, f)| {
            f().unwrap_or_else(|e| Criterion {
                id,
                name,
                passed: false,
                warning_only: id == 12,
                detail: format!("numerical failure: {e}"),
            })
        })
        .collect()
}
