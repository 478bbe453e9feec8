//! Band tables, the inverse band map ϱ_j and asymptotic band diagnostics.

use crate::error::{Error, Result};
use crate::fiber::{
    band_point, band_value, grid_eigenpair, limit_mode, richardson, BandPoint, BoundaryCondition,
    FiberSpec,
};
use crate::numerics::{brent_root, composite_gauss_legendre, hermite_phi};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

/// Gap-sensitive quantities need |E_j − ℰ_j| at least this multiple of the
/// discretization error.
pub const TRUST_FACTOR: f64 = 1e3;

/// Scientific notation with 17 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct BandTable {
    pub spec: FiberSpec,
    pub j: usize,
    pub k_nodes: Vec<f64>,
    pub energies: Vec<f64>,
    pub derivatives: Vec<f64>,
    pub disc_errors: Vec<f64>,
    /// Every consecutive pair whose difference exceeds the combined
    /// discretization error strictly decreases.
    pub strictly_decreasing: bool,
    /// Consecutive pairs whose difference is below the combined
    /// discretization error and cannot be ordered.
    pub unresolved_pairs: usize,
}

impl BandTable {
    pub fn len(&self) -> usize {
        self.k_nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_nodes.is_empty()
    }

    pub fn threshold(&self) -> f64 {
        self.spec.threshold(self.j)
    }

    /// Signed offsets E_j − ℰ_j at the nodes.
    pub fn offsets(&self) -> Vec<f64> {
        let e = self.threshold();
        self.energies.iter().map(|v| v - e).collect()
    }

    /// Whether node `i` resolves its offset above the discretization noise.
    pub fn trustworthy(&self, i: usize) -> bool {
        (self.energies[i] - self.threshold()).abs() >= TRUST_FACTOR * self.disc_errors[i]
    }

    /// Indices of interior local minima of the energies.
    pub fn local_minima(&self) -> Vec<usize> {
        (1..self.len().saturating_sub(1))
            .filter(|&i| {
                self.energies[i] < self.energies[i - 1] && self.energies[i] <= self.energies[i + 1]
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,E,dE,disc_error\n");
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                sci(self.k_nodes[i]),
                sci(self.energies[i]),
                sci(self.derivatives[i]),
                sci(self.disc_errors[i])
            );
        }
        out
    }
}

/// Chebyshev–Lobatto points on `[a, b]`, ascending.
pub fn chebyshev_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut nodes: Vec<f64> = (0..n)
        .map(|i| mid - half * (std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect();
    nodes[0] = a;
    nodes[n - 1] = b;
    nodes
}

/// Band j on Chebyshev nodes in `[k_min, k_max]`.
pub fn tabulate_band(
    spec: &FiberSpec,
    j: usize,
    k_min: f64,
    k_max: f64,
    n_nodes: usize,
) -> Result<BandTable> {
    spec.validate()?;
    if !(k_min < k_max) || n_nodes < 16 {
        return Err(Error::InvalidInput(format!(
            "tabulation needs k_min < k_max and n_nodes >= 16 (got [{k_min}, {k_max}], {n_nodes})"
        )));
    }
    let k_nodes = chebyshev_nodes(k_min, k_max, n_nodes);
    let points: Vec<BandPoint> = k_nodes
        .par_iter()
        .map(|&k| band_point(spec, j, k))
        .collect::<Result<Vec<_>>>()?;
    let energies: Vec<f64> = points.iter().map(|p| p.energy).collect();
    let disc_errors: Vec<f64> = points.iter().map(|p| p.disc_error).collect();
    let mut strictly_decreasing = true;
    let mut unresolved_pairs = 0;
    for i in 0..n_nodes - 1 {
        let drop = energies[i] - energies[i + 1];
        let noise = disc_errors[i] + disc_errors[i + 1];
        if drop.abs() <= noise {
            unresolved_pairs += 1;
        } else if drop < 0.0 {
            strictly_decreasing = false;
            if spec.bc == BoundaryCondition::Dirichlet {
                return Err(Error::Monotonicity {
                    j,
                    k0: k_nodes[i],
                    k1: k_nodes[i + 1],
                });
            }
        }
    }
    Ok(BandTable {
        spec: *spec,
        j,
        k_nodes,
        energies,
        derivatives: points.iter().map(|p| p.derivative).collect(),
        disc_errors,
        strictly_decreasing,
        unresolved_pairs,
    })
}

/// Gap-law tail s(k) ≈ s_t (k/k_t)^{2j−1} e^{−(k² − k_t²)/b} used beyond the
/// last trustworthy node.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapTail {
    pub k_t: f64,
    pub s_t: f64,
    pub power: f64,
    pub b: f64,
}

impl GapTail {
    pub fn offset(&self, k: f64) -> f64 {
        self.s_t * (k / self.k_t).powf(self.power) * (-(k * k - self.k_t * self.k_t) / self.b).exp()
    }

    pub fn slope(&self, k: f64) -> f64 {
        self.offset(k) * (self.power / k - 2.0 * k / self.b)
    }
}

/// Monotone branch of E_j − ℰ_j beyond its last extremum and its inverse ϱ_j.
#[derive(Debug, Clone, Serialize)]
pub struct InverseBand {
    pub table: BandTable,
    /// Smallest and largest offset on the trustworthy monotone branch.
    pub s_min: f64,
    pub s_max: f64,
    /// Table index where the monotone branch starts.
    pub branch_start: usize,
    /// Last trustworthy table index.
    pub branch_end: usize,
    pub tail: GapTail,
}

impl InverseBand {
    pub fn new(table: BandTable) -> Result<Self> {
        let n = table.len();
        let offsets = table.offsets();
        let branch_end = (0..n)
            .rev()
            .find(|&i| table.trustworthy(i))
            .ok_or_else(|| Error::InvalidInput("no trustworthy node in band table".into()))?;
        let mut branch_start = branch_end;
        while branch_start > 0 {
            let a = offsets[branch_start - 1];
            let b = offsets[branch_start];
            // monotone decreasing towards zero on the branch
            if a.abs() > b.abs() && a.signum() == b.signum() {
                branch_start -= 1;
            } else {
                break;
            }
        }
        if branch_end <= branch_start {
            return Err(Error::InvalidInput(
                "band table has no monotone trustworthy branch".into(),
            ));
        }
        let (s_min, s_max) = {
            let a = offsets[branch_start];
            let b = offsets[branch_end];
            (a.min(b), a.max(b))
        };
        let tail = GapTail {
            k_t: table.k_nodes[branch_end],
            s_t: offsets[branch_end],
            power: 2.0 * table.j as f64 - 1.0,
            b: table.spec.b,
        };
        Ok(Self {
            table,
            s_min,
            s_max,
            branch_start,
            branch_end,
            tail,
        })
    }

    pub fn spec(&self) -> &FiberSpec {
        &self.table.spec
    }

    pub fn j(&self) -> usize {
        self.table.j
    }

    pub fn threshold(&self) -> f64 {
        self.table.threshold()
    }

    /// Largest momentum where direct solves are trusted.
    pub fn k_trust(&self) -> f64 {
        self.tail.k_t
    }

    /// Offset s(k) = E_j(k) − ℰ_j and ds/dk, by direct solve up to the trust
    /// edge and by the gap-law tail beyond it.
    pub fn offset_at(&self, k: f64) -> Result<(f64, f64)> {
        if k > self.tail.k_t {
            return Ok((self.tail.offset(k), self.tail.slope(k)));
        }
        let p = band_point(self.spec(), self.j(), k)?;
        Ok((p.energy - self.threshold(), p.derivative))
    }

    /// Offset from the table's cubic Hermite interpolant (gap-law tail beyond
    /// the trust edge); no solves.
    pub fn interpolated_offset(&self, k: f64) -> f64 {
        if k > self.tail.k_t {
            return self.tail.offset(k);
        }
        let nodes = &self.table.k_nodes;
        let i = nodes
            .partition_point(|&x| x <= k)
            .saturating_sub(1)
            .min(nodes.len() - 2);
        self.interpolant(i, k)
    }

    fn interpolant(&self, i: usize, k: f64) -> f64 {
        let t = &self.table;
        let (k0, k1) = (t.k_nodes[i], t.k_nodes[i + 1]);
        let h = k1 - k0;
        let u = (k - k0) / h;
        let e = t.threshold();
        let (y0, y1) = (t.energies[i] - e, t.energies[i + 1] - e);
        let (d0, d1) = (t.derivatives[i], t.derivatives[i + 1]);
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * h * d0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * h * d1
    }

    /// ϱ_j(s): the momentum on the monotone branch where E_j − ℰ_j = s.
    pub fn invert(&self, s: f64) -> Result<f64> {
        if !(s >= self.s_min && s <= self.s_max) {
            return Err(Error::OutOfRange {
                quantity: "s",
                value: s,
                lo: self.s_min,
                hi: self.s_max,
            });
        }
        let offsets = self.table.offsets();
        let i = (self.branch_start..self.branch_end)
            .find(|&i| (offsets[i] - s) * (offsets[i + 1] - s) <= 0.0)
            .ok_or(Error::OutOfRange {
                quantity: "s",
                value: s,
                lo: self.s_min,
                hi: self.s_max,
            })?;
        let (k0, k1) = (self.table.k_nodes[i], self.table.k_nodes[i + 1]);
        let guess = brent_root(|k| self.interpolant(i, k) - s, k0, k1, 1e-14)?;
        self.refine(s, guess, (k0, k1))
    }

    /// Newton refinement of a root of s(k) = target with direct solves.
    pub fn refine(&self, target: f64, guess: f64, bracket: (f64, f64)) -> Result<f64> {
        let mut k = guess;
        let mut last: Option<BandPoint> = None;
        for _ in 0..8 {
            let p = band_point(self.spec(), self.j(), k)?;
            let residual = p.energy - self.threshold() - target;
            let tol = 1e-10_f64.max(10.0 * p.disc_error);
            if p.derivative == 0.0 {
                return Err(Error::InversionSingular {
                    s: target,
                    derivative: 0.0,
                });
            }
            let step = residual / p.derivative;
            last = Some(p);
            if residual.abs() <= 0.01 * tol && step.abs() < 1e-12 {
                return Ok(k);
            }
            let next = k - step;
            if !(next >= bracket.0 - 1e-9 && next <= bracket.1 + 1e-9) {
                break;
            }
            k = next;
            if step.abs() <= 1e-13 * k.abs().max(1.0) {
                return Ok(k);
            }
        }
        let p = match last {
            Some(p) => p,
            None => band_point(self.spec(), self.j(), k)?,
        };
        let residual = (p.energy - self.threshold() - target).abs();
        if residual <= 1e-10_f64.max(10.0 * p.disc_error) {
            Ok(k)
        } else {
            brent_root(
                |x| {
                    band_value(self.spec(), self.j(), x)
                        .map(|v| v.energy - self.threshold() - target)
                        .unwrap_or(f64::NAN)
                },
                bracket.0,
                bracket.1,
                1e-13,
            )
        }
    }
}

/// ϱ_j(s).
pub fn invert_band(inv: &InverseBand, s: f64) -> Result<f64> {
    inv.invert(s)
}

/// ϱ_j'(s) = 1 / E_j'(ϱ_j(s)).
pub fn rho_derivative(inv: &InverseBand, s: f64) -> Result<f64> {
    let k = inv.invert(s)?;
    let d = band_point(inv.spec(), inv.j(), k)?.derivative;
    if d.abs() < 1e-300 {
        return Err(Error::InversionSingular { s, derivative: d });
    }
    Ok(1.0 / d)
}

fn gate(spec: &FiberSpec, j: usize, k: f64) -> Result<bool> {
    let v = band_value(spec, j, k)?;
    Ok((v.energy - spec.threshold(j)).abs() >= TRUST_FACTOR * v.disc_error)
}

/// Momentum interval `[lo, hi]` (k ≥ 0) where the gap is resolved.
pub fn trustworthy_window(spec: &FiberSpec, j: usize) -> Result<(f64, f64)> {
    let step = 0.25 * spec.b.sqrt();
    let mut k = 0.0;
    while !gate(spec, j, k)? {
        k += step;
        if k > 20.0 * spec.b.sqrt() {
            return Err(Error::InvalidInput("no trustworthy momentum found".into()));
        }
    }
    let lo = if k == 0.0 {
        0.0
    } else {
        bisect_gate(spec, j, k - step, k, false)?
    };
    let mut k_hi = k;
    while gate(spec, j, k_hi + step)? {
        k_hi += step;
    }
    let hi = bisect_gate(spec, j, k_hi, k_hi + step, true)?;
    Ok((lo, hi))
}

/// Bisects the switch of the trust gate; `inside_left` tells which end passes.
fn bisect_gate(
    spec: &FiberSpec,
    j: usize,
    mut a: f64,
    mut b: f64,
    inside_left: bool,
) -> Result<f64> {
    while b - a > 1e-3 {
        let mid = 0.5 * (a + b);
        if gate(spec, j, mid)? == inside_left {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(if inside_left { a } else { b })
}

/// Interior minimum of a band located from the sign change of E_j'.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandMinimum {
    pub k: f64,
    pub energy: f64,
    pub disc_error: f64,
    /// Local minima found by the scan.
    pub count: usize,
}

/// Scans `[k_lo, k_hi]` for local minima and refines the lowest one.
pub fn band_minimum(spec: &FiberSpec, j: usize, k_lo: f64, k_hi: f64) -> Result<BandMinimum> {
    spec.validate()?;
    if !(k_lo < k_hi) {
        return Err(Error::InvalidInput(format!(
            "minimum search needs k_lo < k_hi, got [{k_lo}, {k_hi}]"
        )));
    }
    let step = 0.05 * spec.b.sqrt();
    let n = ((k_hi - k_lo) / step).ceil() as usize;
    let ks: Vec<f64> = (0..=n)
        .map(|i| k_lo + (k_hi - k_lo) * i as f64 / n as f64)
        .collect();
    let slopes: Vec<BandPoint> = ks
        .par_iter()
        .map(|&k| band_point(spec, j, k))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<BandMinimum> = None;
    let mut count = 0;
    for i in 0..n {
        let (d0, d1) = (slopes[i].derivative, slopes[i + 1].derivative);
        // sign change from falling to rising, resolved above the derivative noise
        if d0 < 0.0
            && d1 > 0.0
            && d0.abs().max(d1.abs())
                > 10.0
                    * slopes[i]
                        .derivative_error
                        .max(slopes[i + 1].derivative_error)
        {
            count += 1;
            let k = brent_root(
                |k| {
                    band_point(spec, j, k)
                        .map(|p| p.derivative)
                        .unwrap_or(f64::NAN)
                },
                ks[i],
                ks[i + 1],
                1e-12,
            )?;
            let v = band_value(spec, j, k)?;
            if best.is_none_or(|b| v.energy < b.energy) {
                best = Some(BandMinimum {
                    k,
                    energy: v.energy,
                    disc_error: v.disc_error,
                    count: 0,
                });
            }
        }
    }
    let mut m = best.ok_or_else(|| {
        Error::InvalidInput(format!(
            "no interior minimum of band {j} in [{k_lo}, {k_hi}]"
        ))
    })?;
    m.count = count;
    Ok(m)
}

/// (E_j(k) − ℰ_j) / (k^{2j−1} e^{−k²/b}).
pub fn gap_asymptotic_ratio(spec: &FiberSpec, j: usize, k: f64) -> Result<f64> {
    let v = band_value(spec, j, k)?;
    let gap = v.energy - spec.threshold(j);
    if gap.abs() < TRUST_FACTOR * v.disc_error {
        let (lo, hi) = trustworthy_window(spec, j)?;
        return Err(Error::Untrustworthy { k, lo, hi });
    }
    Ok(gap / (k.powi(2 * j as i32 - 1) * (-k * k / spec.b).exp()))
}

/// ‖ψ_j(·;k) − ψ_{j,∞}(·;k)‖ on the half-line.
///
/// Uses ‖ψ − ψ_∞‖² = 2 − m_− − 2⟨ψ, ψ_∞⟩ with m_− the negative mass of the
/// limit mode; the overlap is Richardson-extrapolated across grids.
pub fn mode_defect(spec: &FiberSpec, j: usize, k: f64) -> Result<f64> {
    spec.validate()?;
    let mut overlaps = Vec::with_capacity(spec.richardson);
    let mut guess = None;
    for level in 0..spec.richardson {
        let grid = spec.grid(k, level);
        let (e, v) = grid_eigenpair(spec.b, &grid, j, k, guess)?;
        guess = Some(e);
        let h = grid.spacing();
        let scale = h.sqrt();
        let a: f64 = v
            .iter()
            .enumerate()
            .map(|(i, vi)| vi * limit_mode(j, k, spec.b, grid.point(i)))
            .sum::<f64>()
            * scale;
        overlaps.push(a.abs());
    }
    let (overlap, _) = richardson(&overlaps);
    let d2 = 2.0 - neg_mass(j, k, spec.b) - 2.0 * overlap;
    Ok(d2.max(0.0).sqrt())
}

/// Operator-norm distance √(1 − ⟨ψ(k), ψ(k′)⟩²) of the rank-one projections.
pub fn projection_distance(spec: &FiberSpec, j: usize, k: f64, k2: f64) -> Result<f64> {
    spec.validate()?;
    if k == k2 {
        return Ok(0.0);
    }
    let length = spec.length(k).max(spec.length(k2));
    let grid = spec.grid_for_length(length, spec.finest_level());
    let (_, v1) = grid_eigenpair(spec.b, &grid, j, k, None)?;
    let (_, v2) = grid_eigenpair(spec.b, &grid, j, k2, None)?;
    let ov: f64 = v1.iter().zip(&v2).map(|(a, b)| a * b).sum();
    // ‖v1 − ⟨v1,v2⟩v2‖ avoids the cancellation in 1 − ov².
    let d: f64 = v1.iter().zip(&v2).map(|(a, b)| (a - ov * b).powi(2)).sum();
    Ok(d.sqrt())
}

/// ∫_{−∞}^0 ψ_{j,∞}(x;k)² dx.
pub fn neg_mass(j: usize, k: f64, b: f64) -> f64 {
    let upper = -k / b.sqrt();
    let lower = upper.min(0.0) - 12.0 - 2.0 * (2.0 * j as f64).sqrt();
    let panels = ((upper - lower) / 0.5).ceil() as usize;
    let edges: Vec<f64> = (0..=panels)
        .map(|i| lower + (upper - lower) * i as f64 / panels as f64)
        .collect();
    composite_gauss_legendre(12, &edges).integrate(|t| hermite_phi(j, t).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::erfc;

    fn table() -> BandTable {
        tabulate_band(&FiberSpec::dirichlet(1.0), 1, -1.0, 5.0, 40).unwrap()
    }

    #[test]
    fn dirichlet_table_decreases_and_stays_above_threshold() {
        let t = tabulate_band(&FiberSpec::dirichlet(1.0), 1, -6.0, 6.0, 32).unwrap();
        assert!(t.energies[0] > t.energies[t.len() - 1]);
        for i in 0..t.len() {
            let floor = if t.trustworthy(i) {
                1.0
            } else {
                1.0 - t.disc_errors[i]
            };
            assert!(
                t.energies[i] > floor,
                "k={} E={}",
                t.k_nodes[i],
                t.energies[i]
            );
        }
        let t2 = tabulate_band(&FiberSpec::dirichlet(1.0), 2, -6.0, 6.0, 32).unwrap();
        assert!(t.energies.iter().zip(&t2.energies).all(|(a, b)| b > a));
        assert!(t.k_nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tabulation_rejects_bad_ranges() {
        let spec = FiberSpec::dirichlet(1.0);
        assert!(tabulate_band(&spec, 1, 1.0, 0.0, 20).is_err());
        assert!(tabulate_band(&spec, 1, 0.0, 1.0, 8).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let t = tabulate_band(&FiberSpec::dirichlet(1.0), 1, 0.0, 2.0, 16).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,E,dE,disc_error"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 4);
        assert_eq!(first[0], "0.0000000000000000e0");
        assert_eq!(csv.lines().count(), 17);
    }

    #[test]
    fn inversion_round_trip_and_anchor() {
        let inv = InverseBand::new(table()).unwrap();
        let s = band_value(&FiberSpec::dirichlet(1.0), 1, 1.0)
            .unwrap()
            .energy
            - 1.0;
        assert!((invert_band(&inv, s).unwrap() - 1.0).abs() < 1e-8);
        assert!(invert_band(&inv, 2.0).unwrap().abs() < 1e-8);
        assert!(invert_band(&inv, 1e-3).unwrap() > invert_band(&inv, 1e-2).unwrap());
        assert!(invert_band(&inv, 50.0).is_err());
    }

    #[test]
    fn rho_derivative_sign_and_chain_rule() {
        let inv = InverseBand::new(table()).unwrap();
        let spec = FiberSpec::dirichlet(1.0);
        for s in [1e-4, 1e-2, 0.5, 2.0] {
            assert!(rho_derivative(&inv, s).unwrap() < 0.0);
        }
        let rp = rho_derivative(&inv, 2.0).unwrap();
        let ep = band_derivative_at(&spec, invert_band(&inv, 2.0).unwrap());
        assert!((rp * ep - 1.0).abs() < 1e-6);
        let h = 1e-5;
        let fd =
            (invert_band(&inv, 0.1 + h).unwrap() - invert_band(&inv, 0.1 - h).unwrap()) / (2.0 * h);
        assert!((fd / rho_derivative(&inv, 0.1).unwrap() - 1.0).abs() < 1e-5);
    }

    fn band_derivative_at(spec: &FiberSpec, k: f64) -> f64 {
        crate::fiber::band_derivative(spec, 1, k).unwrap()
    }

    #[test]
    fn rho_derivative_order_over_a_decade() {
        let inv = InverseBand::new(table()).unwrap();
        let vals: Vec<f64> = [1e-5, 3e-5, 1e-4]
            .iter()
            .map(|&s: &f64| rho_derivative(&inv, s).unwrap().abs() * s * s.ln().abs().sqrt())
            .collect();
        let max = vals.iter().cloned().fold(0.0, f64::max);
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.2 && max < 2.0 && max / min < 1.5, "{vals:?}");
    }

    #[test]
    fn gap_ratio_plateau_and_gating() {
        let spec = FiberSpec::dirichlet(1.0);
        let a = gap_asymptotic_ratio(&spec, 1, 2.5).unwrap();
        let b = gap_asymptotic_ratio(&spec, 1, 3.5).unwrap();
        assert!(a > 0.0 && b > 0.0);
        assert!((a / b - 1.0).abs() < 0.35);
        assert!(matches!(
            gap_asymptotic_ratio(&spec, 1, 7.0),
            Err(Error::Untrustworthy { .. })
        ));
    }

    #[test]
    fn trustworthy_window_scales_with_field() {
        let (_, hi1) = trustworthy_window(&FiberSpec::dirichlet(1.0), 1).unwrap();
        let (_, hi2) = trustworthy_window(&FiberSpec::dirichlet(2.0), 1).unwrap();
        assert!(hi1 > 3.5);
        let r = hi2 / (std::f64::consts::SQRT_2 * hi1);
        assert!((r - 1.0).abs() < 0.15, "windows {hi1} {hi2}");
    }

    #[test]
    fn defect_decays_along_integers() {
        let spec = FiberSpec::dirichlet(1.0);
        let d: Vec<f64> = [1.0, 2.0, 3.0, 4.0]
            .iter()
            .map(|&k| mode_defect(&spec, 1, k).unwrap())
            .collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        let d0 = mode_defect(&spec, 1, 0.0).unwrap();
        assert!(d0 > 0.1);
    }

    #[test]
    fn defect_bound_with_frozen_constant() {
        let spec = FiberSpec::dirichlet(1.0);
        let scaled = |k: f64| {
            let gap = band_value(&spec, 1, k).unwrap().energy - 1.0;
            mode_defect(&spec, 1, k).unwrap() * k / gap.sqrt()
        };
        let c = scaled(2.0);
        for k in [2.5, 3.0, 3.5] {
            let v = scaled(k);
            assert!(
                v <= 50.0 && v / c < 3.0 && v / c > 1.0 / 3.0,
                "k={k}: {v} vs {c}"
            );
        }
    }

    #[test]
    fn defect_matches_direct_grid_norm() {
        let spec = FiberSpec::dirichlet(1.0);
        let mode = crate::fiber::fiber_mode(&spec, 1, 2.0).unwrap();
        let direct: f64 = mode
            .x_grid
            .iter()
            .zip(&mode.values)
            .map(|(x, v)| (v - limit_mode(1, 2.0, 1.0, *x)).powi(2))
            .sum::<f64>()
            * mode.spacing;
        let exact = mode_defect(&spec, 1, 2.0).unwrap();
        // the single-grid norm still carries its O(Δ²) error
        assert!(
            (direct.sqrt() / exact - 1.0).abs() < 1e-2,
            "{} vs {exact}",
            direct.sqrt()
        );
    }

    #[test]
    fn projection_distance_properties() {
        let spec = FiberSpec::dirichlet(1.0);
        assert_eq!(projection_distance(&spec, 1, 1.0, 1.0).unwrap(), 0.0);
        let a = projection_distance(&spec, 1, 1.0, 1.01).unwrap();
        let b = projection_distance(&spec, 1, 1.01, 1.0).unwrap();
        assert!((a - b).abs() < 1e-12);
        for (k, dk) in [(0.0, 1e-3), (0.5, 1e-2), (1.5, 1e-1), (2.0, 1e-3)] {
            let q = projection_distance(&spec, 1, k, k + dk).unwrap() / dk;
            assert!(q > 0.1 && q < 2.0, "k={k} dk={dk}: {q}");
        }
    }

    #[test]
    fn neumann_minimum_is_unique_and_below_threshold() {
        let spec = FiberSpec::neumann(1.0);
        let m = band_minimum(&spec, 1, -2.0, 4.0).unwrap();
        assert_eq!(m.count, 1);
        assert!(m.energy < 1.0 && m.k > 0.0);
        assert!((m.energy - 0.5901).abs() < 1e-3, "{m:?}");
        assert!(band_minimum(&FiberSpec::dirichlet(1.0), 1, -2.0, 3.0).is_err());
    }

    #[test]
    fn neg_mass_values() {
        for b in [0.5, 1.0, 3.0] {
            assert!((neg_mass(1, 0.0, b) - 0.5).abs() < 1e-13);
        }
        let m = neg_mass(1, 2.0, 1.0);
        assert!(
            (m - erfc(2.0) / 2.0).abs() < 1e-14,
            "{m:e} vs {:e}",
            erfc(2.0) / 2.0
        );
        assert!((neg_mass(1, 2.0, 1.0) - 0.0023388674905236).abs() < 1e-12);
        for j in [1usize, 2] {
            for k in [2.0, 3.0, 4.0] {
                let ratio = neg_mass(j, k, 1.0) / (k.powi(2 * j as i32 - 3) * (-k * k).exp());
                assert!(ratio > 0.05 && ratio < 2.0, "j={j} k={k}: {ratio}");
            }
        }
    }
}
