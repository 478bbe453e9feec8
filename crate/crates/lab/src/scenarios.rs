//! Scenario runners: each turns a validated config into tables, checks and
//! metadata.

use crate::acceptance;
use crate::config::{LambdaSweep, Operator, RunConfig, Scenario, DEFAULT_PER_DECADE};
use crate::report::{Check, RunReport, Table};
use esl_core::bands::{band_minimum, mode_defect, sci, tabulate_band, TRUST_FACTOR};
use esl_core::effective::{
    band_for_scheme, counting, coverage_momentum, ssf_bracket, toeplitz_vj_spectrum, Perturbation,
};
use esl_core::fiber::{band_value, BoundaryCondition};
use esl_core::potentials::{admissibility_report, volume_by_cell_counting, Domain};
use esl_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

/// Fraction of λ down to which the Toeplitz momentum window covers V.
pub const TOEPLITZ_COVERAGE: f64 = 0.1;
/// Round trips of ϱ_j checked in the `invert` scenario.
pub const ROUND_TRIPS: usize = 20;
/// Relative tolerance of the cell-counting volume cross-check.
pub const CELL_TOLERANCE: f64 = 2e-3;

pub fn run_scenario(cfg: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    let mut rep = RunReport::new(cfg.clone());
    match cfg.scenario {
        Scenario::Bands => bands(cfg, &mut rep)?,
        Scenario::Invert => invert(cfg, &mut rep)?,
        Scenario::Defect => defect(cfg, &mut rep)?,
        Scenario::Ssf => ssf(cfg, &mut rep)?,
        Scenario::Toeplitz => toeplitz(cfg, &mut rep)?,
        Scenario::Neumann => neumann(cfg, &mut rep)?,
        Scenario::Volume => volume(cfg, &mut rep)?,
        Scenario::Verify => verify(cfg, &mut rep),
    }
    rep.wall_clock = start.elapsed();
    Ok(rep)
}

fn bands(cfg: &RunConfig, rep: &mut RunReport) -> Result<()> {
    let s = &cfg.sweep;
    for &j in &s.j {
        let t = tabulate_band(&cfg.fiber, j, s.k_min, s.k_max, s.k_nodes)?;
        let trusted = (0..t.len()).filter(|&i| t.trustworthy(i)).count();
        let max_err = t.disc_errors.iter().cloned().fold(0.0, f64::max);
        rep.meta(
            &format!("band_{j}"),
            serde_json::json!({
                "trustworthy_nodes": trusted,
                "max_disc_error": max_err,
                "local_minima": t.local_minima().len(),
            }),
        );
        if cfg.fiber.bc == BoundaryCondition::Dirichlet {
            rep.checks.push(Check::new(
                format!("band {j} strictly decreasing"),
                t.strictly_decreasing,
                format!(
                    "{} nodes on [{}, {}], {} pairs below resolution",
                    t.len(),
                    s.k_min,
                    s.k_max,
                    t.unresolved_pairs
                ),
            ));
        }
        rep.tables.push(Table {
            file: format!("bands_j{j}.csv"),
            csv: t.to_csv(),
        });
    }
    Ok(())
}

fn invert(cfg: &RunConfig, rep: &mut RunReport) -> Result<()> {
    let spec = &cfg.fiber;
    let per_decade = match cfg.sweep.lambda {
        LambdaSweep::Decades { per_decade, .. } => per_decade,
        LambdaSweep::List(_) => DEFAULT_PER_DECADE,
    };
    let offsets = LambdaSweep::Decades {
        min: cfg.sweep.s_min,
        max: cfg.sweep.s_max,
        per_decade,
    }
    .values();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for &j in &cfg.sweep.j {
        let inv = band_for_scheme(spec, j)?;
        let mut t = Table::new(
            format!("rho_j{j}.csv"),
            "s,rho,rho_derivative,rho_over_sqrt_log",
        );
        let mut rhos = Vec::with_capacity(offsets.len());
        for &s in &offsets {
            let k = inv.invert(s)?;
            let (_, ds) = inv.offset_at(k).map_err(|e| e.at_k(k))?;
            t.row([sci(s), sci(k), sci(1.0 / ds), sci(k / s.ln().abs().sqrt())]);
            rhos.push(k);
        }
        // offsets run from s_max down, so ϱ must increase
        let monotone = rhos.windows(2).all(|w| w[1] > w[0]);
        rep.checks.push(Check::new(
            format!("rho_{j} decreasing in s"),
            monotone,
            format!("{} offsets", offsets.len()),
        ));

        let k_lo = inv.table.k_nodes[0].max(0.0);
        let k_hi = inv.k_trust() - 0.1;
        let mut worst: f64 = 0.0;
        for _ in 0..ROUND_TRIPS {
            let k = rng.gen_range(k_lo..k_hi);
            let s = band_value(spec, j, k)?.energy - spec.threshold(j);
            let back = inv.invert(s).map_err(|e| e.at_k(k))?;
            worst = worst.max((back - k).abs());
        }
        rep.checks.push(Check::new(
            format!("rho_{j} round trip"),
            worst <= 1e-8,
            format!("{ROUND_TRIPS} momenta in [{k_lo:.3}, {k_hi:.3}], worst error {worst:.2e}"),
        ));
        rep.meta(
            &format!("band_{j}"),
            serde_json::json!({ "k_trust": inv.k_trust(), "round_trip_error": worst }),
        );
        rep.tables.push(t);
    }
    Ok(())
}

fn defect(cfg: &RunConfig, rep: &mut RunReport) -> Result<()> {
    let (spec, s) = (&cfg.fiber, &cfg.sweep);
    let ks: Vec<f64> = (0..s.k_nodes)
        .map(|i| s.k_min + (s.k_max - s.k_min) * i as f64 / (s.k_nodes - 1) as f64)
        .collect();
    for &j in &s.j {
        let rows = ks
            .par_iter()
            .map(|&k| {
                let v = band_value(spec, j, k)?;
                let d = mode_defect(spec, j, k)?;
                Ok((k, v, d))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = Table::new(
            format!("defect_j{j}.csv"),
            "k,gap,disc_error,trustworthy,defect,scaled",
        );
        let mut frozen = None;
        let mut within = true;
        for (k, v, d) in rows {
            let gap = v.energy - spec.threshold(j);
            let trusted = gap.abs() >= TRUST_FACTOR * v.disc_error;
            let scaled = d * k / gap.abs().sqrt();
            if trusted {
                let c = *frozen.get_or_insert(scaled);
                within &= scaled / c < 3.0 && scaled / c > 1.0 / 3.0;
            }
            t.row([
                sci(k),
                sci(gap),
                sci(v.disc_error),
                (trusted as u8).to_string(),
                sci(d),
                sci(scaled),
            ]);
        }
        rep.checks.push(Check::new(
            format!("defect_{j} bounded by gap^(1/2)/k"),
            within && frozen.is_some(),
            match frozen {
                Some(c) => format!("trustworthy rows within a factor 3 of {c:.4}"),
                None => "no trustworthy momenta in range".to_string(),
            },
        ));
        rep.tables.push(t);
    }
    Ok(())
}

fn ssf(cfg: &RunConfig, rep: &mut RunReport) -> Result<()> {
    let (spec, s) = (&cfg.fiber, &cfg.sweep);
    let j = s.j[0];
    let p = cfg.potential.model();
    p.validate()?;
    let inv = band_for_scheme(spec, j)?;
    let lambdas = cfg.signed_lambdas();
    let brackets = lambdas
        .par_iter()
        .map(|&l| ssf_bracket(&p, spec, &inv, j, l, s.r, s.node_budget))
        .collect::<Result<Vec<_>>>()?;
    let which = match s.operator {
        Operator::Plus => Perturbation::Plus,
        Operator::Minus => Perturbation::Minus,
    };
    let mut t = Table::new(
        "ssf_sweep.csv",
        "lambda,eps,nodes,n_minus_hi,n_minus_lo,n_plus_hi,n_plus_lo,trace_norm,volume,ratio",
    );
    let mut ordered = true;
    let mut sign_ok = true;
    let mut meta = Vec::new();
    for b in &brackets {
        let volume = p
            .volume(b.lambda.abs(), Domain::HalfPlane)
            .map_err(|e| e.at_lambda(b.lambda))?;
        let ratio = b.bracket(which).midpoint() / (spec.b * volume);
        t.row([
            sci(b.lambda),
            sci(b.epsilon),
            b.nodes.to_string(),
            b.counts_hi.n_minus.to_string(),
            b.counts_lo.n_minus.to_string(),
            b.counts_hi.n_plus.to_string(),
            b.counts_lo.n_plus.to_string(),
            sci(b.trace_norm),
            sci(volume),
            sci(ratio),
        ]);
        ordered &= b.plus.lower <= b.plus.upper && b.minus.lower <= b.minus.upper;
        if b.lambda < 0.0 {
            sign_ok &= b.counts_lo.n_plus == 0;
        }
        meta.push(serde_json::json!({
            "lambda": b.lambda,
            "crossings": b.crossings,
            "window_estimate": b.window_estimate,
            "grid_points": b.grid_points,
            "cross_band_terms_omitted": b.cross_band_terms_omitted,
        }));
    }
    rep.checks.push(Check::new(
        "bracket lower <= upper",
        ordered,
        format!("{} offsets", brackets.len()),
    ));
    rep.checks.push(Check::new(
        "no positive spectrum below threshold",
        sign_ok,
        "n_plus(1-r) = 0 whenever lambda < 0",
    ));
    rep.meta("sweep", meta);
    rep.meta("admissible", admissibility_report(&p)?.admissible);
    rep.meta("operator", s.operator);
    rep.tables.push(t);
    Ok(())
}

fn toeplitz(cfg: &RunConfig, rep: &mut RunReport) -> Result<()> {
    let (b, s) = (cfg.fiber.b, &cfg.sweep);
    let j = s.j[0];
    let p = cfg.potential.model();
    let lambdas = s.lambda.values();
    let smallest = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let k = coverage_momentum(&p, b, smallest, 0.0, TOEPLITZ_COVERAGE);
    let n = (2.0 * k / s.k_step).round() as usize + 1;
    let spectrum = toeplitz_vj_spectrum(&p, j, b, (-k, k), n)?;
    let mut counts = Table::new("toeplitz_counts.csv", "lambda,n_plus,volume_full,ratio");
    for &l in &lambdas {
        let c = counting(&spectrum, l).n_plus;
        let nt = p.volume(l, Domain::FullPlane).map_err(|e| e.at_lambda(l))?;
        counts.row([sci(l), c.to_string(), sci(nt), sci(c as f64 / nt)]);
    }
    let mut values = Table::new("toeplitz_eigenvalues.csv", "index,eigenvalue");
    for (i, v) in spectrum.eigenvalues.iter().enumerate() {
        values.row([i.to_string(), sci(*v)]);
    }
    let peak = spectrum.eigenvalues.first().map_or(0.0, |v| v.abs());
    let lowest = spectrum.eigenvalues.iter().cloned().fold(0.0, f64::min);
    rep.checks.push(Check::new(
        "Toeplitz operator positive semidefinite",
        lowest >= -1e-10 * peak,
        format!("lowest eigenvalue {lowest:.3e}, largest {peak:.3e}"),
    ));
    rep.meta("k_window", k);
    rep.meta("nodes", n);
    rep.meta("grid_points", spectrum.grid_points);
    rep.meta("dropped", spectrum.dropped);
    rep.tables.push(counts);
    rep.tables.push(values);
    Ok(())
}

fn neumann(cfg: &RunConfig, rep: &mut RunReport) -> Result<()> {
    let (spec, s) = (&cfg.fiber, &cfg.sweep);
    let j = s.j[0];
    let fine = spec.with_n_x(2 * spec.n_x);
    let coarse_min = band_minimum(spec, j, s.k_min, s.k_max)?;
    let fine_min = band_minimum(&fine, j, s.k_min, s.k_max)?;
    let mut t = Table::new("neumann_minimum.csv", "n_x,k,E,disc_error,minima");
    for (n_x, m) in [(spec.n_x, coarse_min), (fine.n_x, fine_min)] {
        t.row([
            n_x.to_string(),
            sci(m.k),
            sci(m.energy),
            sci(m.disc_error),
            m.count.to_string(),
        ]);
    }
    let threshold = spec.threshold(j);
    let drift = (coarse_min.energy - fine_min.energy).abs();
    rep.checks.push(Check::new(
        "unique minimum",
        coarse_min.count == 1 && fine_min.count == 1,
        format!("{} local minima", coarse_min.count),
    ));
    rep.checks.push(Check::new(
        "minimum below threshold",
        coarse_min.energy < threshold,
        format!("E = {:.9} vs threshold {threshold}", coarse_min.energy),
    ));
    rep.checks.push(Check::new(
        "minimum at finite interior momentum",
        coarse_min.k > s.k_min && coarse_min.k < s.k_max,
        format!("k = {:.6}", coarse_min.k),
    ));
    rep.checks.push(Check::new(
        "stable under grid doubling",
        drift < 1e-6,
        format!("|dE| = {drift:.2e}"),
    ));
    rep.meta("theta0", coarse_min.energy / spec.b);
    rep.meta("k_min_energy", coarse_min.k);
    rep.tables.push(t);
    let band = tabulate_band(spec, j, s.k_min, s.k_max, s.k_nodes)?;
    rep.tables.push(Table {
        file: format!("neumann_band_j{j}.csv"),
        csv: band.to_csv(),
    });
    Ok(())
}

fn volume(cfg: &RunConfig, rep: &mut RunReport) -> Result<()> {
    let p = cfg.potential.model();
    p.validate()?;
    let mut lambdas = cfg.sweep.lambda.values();
    lambdas.sort_by(|a, b| a.total_cmp(b));
    let rows = lambdas
        .par_iter()
        .map(|&l| {
            let half = p.volume(l, Domain::HalfPlane).map_err(|e| e.at_lambda(l))?;
            let full = p.volume(l, Domain::FullPlane).map_err(|e| e.at_lambda(l))?;
            let (cells, err) = volume_by_cell_counting(&p, l, Domain::HalfPlane, CELL_TOLERANCE);
            Ok((l, half, full, cells, err))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        "volume.csv",
        "lambda,N_half,N_full,N_half_cells,cells_error",
    );
    let mut agree = true;
    let mut doubled = true;
    for &(l, half, full, cells, err) in &rows {
        t.row([sci(l), sci(half), sci(full), sci(cells), sci(err)]);
        agree &= (half - cells).abs() <= 0.01 * half.max(f64::MIN_POSITIVE);
        doubled &= (full - 2.0 * half).abs() <= 1e-9 * full.max(1.0);
    }
    let nonincreasing =
        rows.windows(2).all(|w| w[1].1 <= w[0].1) && rows.iter().all(|r| r.1 >= 0.0);
    rep.checks.push(Check::new(
        "volume nonincreasing in lambda",
        nonincreasing,
        format!("{} levels", rows.len()),
    ));
    rep.checks.push(Check::new(
        "cell counting agrees within 1%",
        agree,
        format!("cell tolerance {CELL_TOLERANCE}"),
    ));
    rep.checks.push(Check::new(
        "full plane doubles half plane",
        doubled,
        "built-in models are even in x",
    ));
    rep.meta("method", p.volume_method());
    rep.meta("admissibility", admissibility_report(&p)?);
    rep.tables.push(t);
    Ok(())
}

fn verify(cfg: &RunConfig, rep: &mut RunReport) {
    let mut t = Table::new("acceptance.csv", "criterion,name,status");
    for c in acceptance::run_all(cfg.seed) {
        t.row([
            format!("C{}", c.id),
            c.name.to_string(),
            c.status().to_string(),
        ]);
        let check = Check {
            name: format!("C{} {}", c.id, c.name),
            passed: c.passed,
            warning_only: c.warning_only,
            detail: c.detail,
        };
        rep.checks.push(check);
    }
    rep.tables.push(t);
}

/// Errors from a scenario carry the λ or k they failed at; this adds the
/// scenario name for the diagnostic.
pub fn describe(cfg: &RunConfig, e: &Error) -> String {
    format!("scenario `{}` failed: {e}", cfg.scenario)
}
