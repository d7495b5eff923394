//! Finitely-atomic positive measures on the nonnegative half-line: moments,
//! integration, pushforward/reweighting transforms, and recovery of a measure
//! from a Stieltjes moment sequence.
//!
//! Recovery goes through the classical quadrature route: estimate the rank of
//! the moment Hankel, build the Jacobi matrix of the three-term recurrence by
//! a partial Cholesky factorization, take its eigenvalues as nodes, solve a
//! Vandermonde system for the masses, then polish the atoms with a few Newton
//! steps on the moment equations. Moments are geometrically prescaled first
//! so the Hankel spectrum is not drowned by the dynamic range of high-order
//! moments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_dense, sym_eigen, SymMatrix};
use crate::moment::{hankel, is_stieltjes, MomentSequence};
use crate::tol::{ToleranceConfig, DEFAULT_EPS_NODE};

/// One weighted point of an atomic measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub node: f64,
    pub mass: f64,
}

/// A finitely-atomic positive measure on the half-line.
///
/// Invariants: nodes are finite, nonnegative, strictly increasing, and
/// pairwise separated beyond the node-matching radius used at construction;
/// masses are finite and strictly positive (zero-mass atoms are dropped).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

/// JSON shape: `{"atoms": [[node, mass], ...]}`, nodes ascending.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureRepr {
    atoms: Vec<(f64, f64)>,
}

impl TryFrom<MeasureRepr> for AtomicMeasure {
    type Error = Error;
    fn try_from(repr: MeasureRepr) -> Result<Self> {
        AtomicMeasure::from_atoms(repr.atoms, DEFAULT_EPS_NODE)
    }
}

impl From<AtomicMeasure> for MeasureRepr {
    fn from(mu: AtomicMeasure) -> MeasureRepr {
        MeasureRepr {
            atoms: mu.atoms.iter().map(|a| (a.node, a.mass)).collect(),
        }
    }
}

impl AtomicMeasure {
    pub fn empty() -> Self {
        AtomicMeasure { atoms: Vec::new() }
    }

    /// Single atom.
    pub fn dirac(node: f64, mass: f64) -> Result<Self> {
        AtomicMeasure::from_atoms(vec![(node, mass)], DEFAULT_EPS_NODE)
    }

    /// Builds a measure from raw `(node, mass)` pairs.
    ///
    /// Zero-mass atoms are dropped; negative masses and negative or
    /// non-finite nodes are rejected; nodes colliding within `eps_node` are
    /// merged (mass-weighted node, summed mass).
    pub fn from_atoms(pairs: Vec<(f64, f64)>, eps_node: f64) -> Result<Self> {
        let mut atoms: Vec<Atom> = Vec::with_capacity(pairs.len());
        for (node, mass) in pairs {
            if !node.is_finite() || !mass.is_finite() {
                return Err(Error::InvalidMeasure("non-finite atom".into()));
            }
            if node < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative node {node}")));
            }
            if mass < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative mass {mass}")));
            }
            if mass == 0.0 {
                continue;
            }
            atoms.push(Atom { node, mass });
        }
        atoms.sort_by(|a, b| a.node.partial_cmp(&b.node).unwrap());
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                Some(last) if atom.node - last.node <= eps_node => {
                    let total = last.mass + atom.mass;
                    last.node = (last.node * last.mass + atom.node * atom.mass) / total;
                    last.mass = total;
                }
                _ => merged.push(atom),
            }
        }
        Ok(AtomicMeasure { atoms: merged })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    pub fn max_node(&self) -> Option<f64> {
        self.atoms.last().map(|a| a.node)
    }

    /// Moments `gamma_n = sum_i mass_i * node_i^n` for `n = 0..=order`,
    /// with the convention `0^0 = 1`.
    pub fn moments(&self, order: usize) -> Result<MomentSequence> {
        let mut values = Vec::with_capacity(order + 1);
        let mut powers: Vec<f64> = vec![1.0; self.atoms.len()];
        for _ in 0..=order {
            let total: f64 = self
                .atoms
                .iter()
                .zip(powers.iter())
                .map(|(a, p)| a.mass * p)
                .sum();
            values.push(total);
            for (a, p) in self.atoms.iter().zip(powers.iter_mut()) {
                *p *= a.node;
            }
        }
        MomentSequence::new(values)
    }

    /// Integrates `f` against the measure.
    ///
    /// A non-finite value of `f` at a node signals that `f` is not integrable
    /// against the measure.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let mut acc = 0.0;
        for atom in &self.atoms {
            let v = f(atom.node);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: atom.node });
            }
            acc += atom.mass * v;
        }
        Ok(acc)
    }

    /// Pushforward under `x -> x^n`; masses preserved, colliding images
    /// merged.
    pub fn pushforward_power(&self, n: u32) -> Self {
        assert!(n >= 1, "power must be positive");
        let pairs = self
            .atoms
            .iter()
            .map(|a| (a.node.powi(n as i32), a.mass))
            .collect();
        AtomicMeasure::from_atoms(pairs, DEFAULT_EPS_NODE)
            .expect("power of a valid measure is valid")
    }

    /// Multiplies each mass by `(1 + x + ... + x^(n-1))^2` at its node.
    /// `n = 1` leaves the measure unchanged.
    pub fn reweight_geometric_square(&self, n: u32) -> Self {
        assert!(n >= 1, "power must be positive");
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let mut geo = 0.0;
                for _ in 0..n {
                    geo = geo * a.node + 1.0;
                }
                Atom {
                    node: a.node,
                    mass: a.mass * geo * geo,
                }
            })
            .collect();
        AtomicMeasure { atoms }
    }

    /// Multiplies each mass by `x^r`; atoms at 0 vanish for r >= 1.
    pub fn reweight_monomial(&self, r: u32) -> Self {
        let pairs = self
            .atoms
            .iter()
            .map(|a| (a.node, a.mass * a.node.powi(r as i32)))
            .collect();
        AtomicMeasure::from_atoms(pairs, DEFAULT_EPS_NODE)
            .expect("monomial reweight of a valid measure is valid")
    }

    /// Rescales to total mass 1.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total_mass();
        if total <= 0.0 {
            return Err(Error::InvalidMeasure(
                "cannot normalize an empty measure".into(),
            ));
        }
        Ok(AtomicMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    node: a.node,
                    mass: a.mass / total,
                })
                .collect(),
        })
    }

    /// Mass of the node within `eps_node` of `x0`, or 0 when no node matches.
    /// Two stored nodes inside the radius make the query ambiguous.
    pub fn atom_at(&self, x0: f64, tol: &ToleranceConfig) -> Result<f64> {
        let matches: Vec<&Atom> = self
            .atoms
            .iter()
            .filter(|a| (a.node - x0).abs() <= tol.eps_node)
            .collect();
        match matches.len() {
            0 => Ok(0.0),
            1 => Ok(matches[0].mass),
            _ => Err(Error::AmbiguousAtom { x0 }),
        }
    }

    /// Removes every node within `eps_node` of `x0`.
    pub fn remove_atom(&self, x0: f64, tol: &ToleranceConfig) -> Self {
        AtomicMeasure {
            atoms: self
                .atoms
                .iter()
                .filter(|a| (a.node - x0).abs() > tol.eps_node)
                .copied()
                .collect(),
        }
    }

    /// Pointwise multiplies masses by `f(node)`; used for density transforms
    /// with strictly positive `f`.
    pub fn reweight(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .map(|a| (a.node, a.mass * f(a.node)))
            .collect();
        AtomicMeasure::from_atoms(pairs, DEFAULT_EPS_NODE)
    }
}

/// Recovers the unique atomic measure matching a Stieltjes moment sequence.
///
/// The sequence must pass `is_stieltjes`; the result has at most
/// `floor((N+1)/2)` atoms and reproduces `gamma_0 .. gamma_{2r-1}` within the
/// residual gate `eps_eq` (relative), else `RankDeficiencyUnstable`.
pub fn recover_measure(seq: &MomentSequence, tol: &ToleranceConfig) -> Result<AtomicMeasure> {
    let verdict = is_stieltjes(seq, tol)?;
    if verdict.is_refuted() {
        let offset = verdict.witness.map(|w| w.offset).unwrap_or(0);
        return Err(Error::NotAMeasure { offset });
    }
    let n_ord = seq.order();
    let g_raw = seq.values();
    let scale_max = seq.max_abs();
    if scale_max == 0.0 || g_raw[0] <= 0.0 {
        // Within the Stieltjes gate this is the (numerically) zero measure.
        return Ok(AtomicMeasure::empty());
    }

    // Geometric prescaling: gamma_n / s^n corresponds to shrinking every node
    // by s, which compresses the dynamic range of the Hankel spectrum.
    let s = geometric_scale(g_raw);
    let g: Vec<f64> = g_raw
        .iter()
        .enumerate()
        .map(|(n, &v)| v / s.powi(n as i32))
        .collect();
    let scaled = MomentSequence::new(g.clone())?;

    // Numerical rank of the largest plain Hankel section, ties toward the
    // smaller rank. Counting uses a threshold near the eigensolver noise
    // floor rather than eps_psd: an atom of mass ~1e-4 sitting close to a
    // neighbor signs the spectrum at ~1e-8 of the top eigenvalue, which the
    // coarser threshold would erase beyond repair. Spurious directions this
    // admits surface as near-zero masses and are dropped below.
    let h = hankel(&scaled, 0, n_ord / 2 + 1)?;
    let eigen = sym_eigen(&h);
    let lambda_max = eigen.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if lambda_max == 0.0 {
        return Ok(AtomicMeasure::empty());
    }
    let estimated = eigen
        .values
        .iter()
        .filter(|&&v| v > RANK_COUNT_EPS * lambda_max)
        .count();

    // An r-point quadrature reproduces the first 2r moments of any input, so
    // a too-small rank can only be detected on the remaining ones: gate the
    // residual over the full range and escalate the rank while it fails.
    let rank_cap = (n_ord + 1) / 2;
    let max_feasible = cholesky_feasible_rank(&g, rank_cap);
    if max_feasible == 0 {
        return Ok(AtomicMeasure::empty());
    }
    let start = estimated.clamp(1, max_feasible);
    let mut best: Option<(AtomicMeasure, f64)> = None;
    for rank in start..=max_feasible {
        let Some(candidate) = recover_at_rank(&g, rank, s, tol) else {
            continue;
        };
        let residual = recovery_residual(&candidate, g_raw, s)?;
        if residual <= tol.eps_eq {
            return Ok(candidate);
        }
        if best.as_ref().is_none_or(|(_, r)| residual < *r) {
            best = Some((candidate, residual));
        }
    }
    Err(Error::RankDeficiencyUnstable {
        residual: best.map(|(_, r)| r).unwrap_or(f64::INFINITY),
    })
}

/// One quadrature attempt at a fixed rank: Jacobi matrix, nodes, Vandermonde
/// masses, spurious-atom drop, Newton polish, and unscaling.
fn recover_at_rank(
    g: &[f64],
    rank: usize,
    s: f64,
    tol: &ToleranceConfig,
) -> Option<AtomicMeasure> {
    let (diag, off) = jacobi_from_moments(g, rank)?;
    let nodes_eigen = sym_eigen(&SymMatrix::tridiagonal(&diag, &off));
    let mut nodes: Vec<f64> = nodes_eigen.values.iter().map(|&x| x.max(0.0)).collect();

    let vander: Vec<Vec<f64>> = (0..rank)
        .map(|n| nodes.iter().map(|x| x.powi(n as i32)).collect())
        .collect();
    let mut masses = solve_dense(&vander, &g[..rank])?;

    let floor = tol.eps_psd * g[0];
    let kept: Vec<(f64, f64)> = nodes
        .iter()
        .zip(masses.iter())
        .filter(|(_, &m)| m >= floor)
        .map(|(&x, &m)| (x, m))
        .collect();
    nodes = kept.iter().map(|p| p.0).collect();
    masses = kept.iter().map(|p| p.1).collect();
    if !nodes.is_empty() {
        newton_polish(&mut nodes, &mut masses, g);
    }

    let atoms: Vec<(f64, f64)> = nodes
        .iter()
        .zip(masses.iter())
        .map(|(&x, &m)| (x * s, m))
        .collect();
    AtomicMeasure::from_atoms(atoms, tol.eps_node).ok()
}

/// Worst relative deviation between the moments of the candidate and the
/// full input sequence.
fn recovery_residual(candidate: &AtomicMeasure, g_raw: &[f64], s: f64) -> Result<f64> {
    let n_ord = g_raw.len() - 1;
    let check = candidate.moments(n_ord)?;
    let mut worst = 0.0f64;
    for n in 0..=n_ord {
        let denom = (g_raw[0] * s.powi(n as i32)).max(g_raw[n].abs());
        if denom > 0.0 {
            worst = worst.max((check.get(n) - g_raw[n]).abs() / denom);
        }
    }
    Ok(worst)
}

/// Largest rank whose leading Hankel section admits a Cholesky
/// factorization; factorization feasibility is nested in the rank.
fn cholesky_feasible_rank(g: &[f64], cap: usize) -> usize {
    let mut feasible = 0;
    for r in 1..=cap {
        if jacobi_from_moments(g, r).is_some() {
            feasible = r;
        } else {
            break;
        }
    }
    feasible
}

/// Per-step scale so that `gamma_n / s^n` stays O(gamma_0).
fn geometric_scale(g: &[f64]) -> f64 {
    let n = g.len() - 1;
    if n == 0 || g[0] <= 0.0 {
        return 1.0;
    }
    let last = g[n];
    if last <= 0.0 {
        return 1.0;
    }
    let s = (last / g[0]).powf(1.0 / n as f64);
    if s.is_finite() && s > 1e-12 {
        s
    } else {
        1.0
    }
}

/// Recurrence coefficients of the orthogonal polynomials of the moment
/// functional, from a partial Cholesky factorization of the Hankel matrix.
/// Returns `None` when a pivot is not strictly positive.
fn jacobi_from_moments(g: &[f64], r: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    debug_assert!(g.len() >= 2 * r);
    // R is upper triangular, rows 0..r over columns 0..=r.
    let cols = r + 1;
    let mut rmat = vec![vec![0.0f64; cols]; r];
    for i in 0..r {
        let mut pivot = g[2 * i];
        for k in 0..i {
            pivot -= rmat[k][i] * rmat[k][i];
        }
        if pivot <= 0.0 || !pivot.is_finite() {
            return None;
        }
        let rii = pivot.sqrt();
        rmat[i][i] = rii;
        for j in (i + 1)..cols {
            let mut v = g[i + j];
            for k in 0..i {
                v -= rmat[k][i] * rmat[k][j];
            }
            rmat[i][j] = v / rii;
        }
    }
    let mut diag = Vec::with_capacity(r);
    let mut off = Vec::with_capacity(r.saturating_sub(1));
    for j in 0..r {
        let lead = rmat[j][j + 1] / rmat[j][j];
        let prev = if j == 0 {
            0.0
        } else {
            rmat[j - 1][j] / rmat[j - 1][j - 1]
        };
        diag.push(lead - prev);
        if j > 0 {
            off.push(rmat[j][j] / rmat[j - 1][j - 1]);
        }
    }
    Some((diag, off))
}

/// Relative eigenvalue threshold for counting the Hankel rank; sits two
/// orders above the Jacobi sweep noise and well below any atom signature the
/// recovery tolerances care about.
const RANK_COUNT_EPS: f64 = 1e-12;

const NEWTON_ITERS: usize = 12;

/// Gauss-Newton refinement of `(nodes, masses)` against the moment
/// equations `sum_i m_i x_i^n = g_n` over every available moment, in
/// relative form: each equation is weighted by its own scale so small atoms
/// are not drowned by the dominant ones, and the normal equations are
/// column-equilibrated so the step survives the wild spread of parameter
/// sensitivities. Steps are accepted only while the residual decreases; the
/// initial quadrature estimate is kept otherwise.
fn newton_polish(nodes: &mut [f64], masses: &mut [f64], g: &[f64]) {
    let r = nodes.len();
    let eqs = g.len();
    let cols = 2 * r;
    if eqs < cols {
        return;
    }
    let weights: Vec<f64> = g
        .iter()
        .map(|&v| 1.0 / v.abs().max(g[0].abs()).max(1e-300))
        .collect();

    let residual = |x: &[f64], m: &[f64]| -> Vec<f64> {
        (0..eqs)
            .map(|n| {
                let mut acc = -g[n];
                for i in 0..r {
                    acc += m[i] * x[i].powi(n as i32);
                }
                acc * weights[n]
            })
            .collect()
    };
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));

    let mut res = residual(nodes, masses);
    for _ in 0..NEWTON_ITERS {
        let worst = max_abs(&res);
        if worst <= 1e-15 {
            break;
        }
        // Jacobian columns: d/d mass_i, then d/d node_i; rows carry the same
        // relative weights as the residual.
        let jac: Vec<Vec<f64>> = (0..eqs)
            .map(|n| {
                let mut row = Vec::with_capacity(cols);
                for i in 0..r {
                    row.push(nodes[i].powi(n as i32) * weights[n]);
                }
                for i in 0..r {
                    let d = if n == 0 {
                        0.0
                    } else {
                        n as f64 * masses[i] * nodes[i].powi(n as i32 - 1)
                    };
                    row.push(d * weights[n]);
                }
                row
            })
            .collect();
        // Normal equations of the overdetermined step.
        let mut normal = vec![vec![0.0f64; cols]; cols];
        let mut rhs = vec![0.0f64; cols];
        for (row, &re) in jac.iter().zip(res.iter()) {
            for a in 0..cols {
                for b in a..cols {
                    normal[a][b] += row[a] * row[b];
                }
                rhs[a] -= row[a] * re;
            }
        }
        for a in 0..cols {
            for b in 0..a {
                normal[a][b] = normal[b][a];
            }
        }
        // Jacobi equilibration keeps the solve meaningful despite the
        // squared condition number of the normal matrix.
        let scale: Vec<f64> = (0..cols)
            .map(|a| normal[a][a].sqrt().max(1e-300))
            .collect();
        for a in 0..cols {
            for b in 0..cols {
                normal[a][b] /= scale[a] * scale[b];
            }
            rhs[a] /= scale[a];
        }
        let Some(raw_step) = solve_dense(&normal, &rhs) else {
            break;
        };
        let step: Vec<f64> = raw_step
            .iter()
            .zip(scale.iter())
            .map(|(&v, &s)| v / s)
            .collect();
        let cand_masses: Vec<f64> = masses
            .iter()
            .enumerate()
            .map(|(i, &m)| m + step[i])
            .collect();
        let cand_nodes: Vec<f64> = nodes
            .iter()
            .enumerate()
            .map(|(i, &x)| (x + step[r + i]).max(0.0))
            .collect();
        if cand_masses.iter().any(|&m| !(m > 0.0)) {
            break;
        }
        let cand_res = residual(&cand_nodes, &cand_masses);
        if max_abs(&cand_res) < worst {
            nodes.copy_from_slice(&cand_nodes);
            masses.copy_from_slice(&cand_masses);
            res = cand_res;
        } else {
            break;
        }
    }
}
