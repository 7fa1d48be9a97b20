//! Truncated-lattice ground truth: expected visit counts of the walk killed on
//! the axes and outside the box `[1, N]²`, solved by geometric multigrid.
//!
//! The row vector `g` of visit counts from a fixed start satisfies
//! `g(z) − Σ_d p_d g(z − d) = δ_{z₀}(z)`, with `g = 0` off the box.

use nalgebra::{DMatrix, DVector};
use quarter_green_core::green::{EstimateMeta, GreenEstimate, Method};
use quarter_green_core::walk::{JumpKernel, LatticePoint};
use quarter_green_core::Complex64;

use crate::error::{AppError, AppResult};

/// Box sides at or below this are solved directly.
const COARSEST: usize = 24;
const PRE_SMOOTH: usize = 2;
const POST_SMOOTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    /// Box side `N`: states `(i, j) ∈ [1, N]²`.
    pub n: usize,
    /// Max-norm residual at which the iteration stops.
    pub solver_tol: f64,
    /// Also solve on `[1, 2N]²` and report `|G_{2N} − G_N|` as the error.
    pub extrapolate: bool,
    /// Safety net on the number of V-cycles.
    pub max_cycles: usize,
}

impl TruncationConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn extrapolated(mut self) -> Self {
        self.extrapolate = true;
        self
    }
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            n: 600,
            solver_tol: 1e-12,
            extrapolate: false,
            max_cycles: 200,
        }
    }
}

/// Offsets of a 9-point stencil, indexed by `3(di + 1) + (dj + 1)`.
type Stencil = [f64; 9];
const CENTER: usize = 4;

#[inline]
fn slot(di: i64, dj: i64) -> usize {
    (3 * (di + 1) + (dj + 1)) as usize
}

enum Stencils {
    Constant(Stencil),
    PerNode(Vec<Stencil>),
}

struct Level {
    n: usize,
    stencils: Stencils,
}

impl Level {
    #[inline]
    fn stencil(&self, idx: usize) -> &Stencil {
        match &self.stencils {
            Stencils::Constant(s) => s,
            Stencils::PerNode(v) => &v[idx],
        }
    }

    /// `A v` at the node `(i, j)` (0-based), off-box values being zero.
    #[inline]
    fn apply_at(&self, v: &[f64], i: usize, j: usize) -> f64 {
        let n = self.n;
        let s = self.stencil(i * n + j);
        let mut acc = 0.0;
        for di in -1i64..=1 {
            let ii = i as i64 + di;
            if ii < 0 || ii >= n as i64 {
                continue;
            }
            for dj in -1i64..=1 {
                let jj = j as i64 + dj;
                if jj < 0 || jj >= n as i64 {
                    continue;
                }
                acc += s[slot(di, dj)] * v[ii as usize * n + jj as usize];
            }
        }
        acc
    }

    fn residual(&self, v: &[f64], b: &[f64], out: &mut [f64]) -> f64 {
        let n = self.n;
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let r = b[i * n + j] - self.apply_at(v, i, j);
                out[i * n + j] = r;
                m = m.max(r.abs());
            }
        }
        m
    }

    #[inline]
    fn relax_at(&self, v: &mut [f64], b: &[f64], i: usize, j: usize) {
        let idx = i * self.n + j;
        let s = self.stencil(idx);
        let off = self.apply_at(v, i, j) - s[CENTER] * v[idx];
        v[idx] = (b[idx] - off) / s[CENTER];
    }

    /// One forward and one backward lexicographic Gauss–Seidel sweep.
    fn smooth(&self, v: &mut [f64], b: &[f64]) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                self.relax_at(v, b, i, j);
            }
        }
        for i in (0..n).rev() {
            for j in (0..n).rev() {
                self.relax_at(v, b, i, j);
            }
        }
    }

    /// Galerkin operator `Pᵀ A P` for bilinear `P`, coarse nodes at even fine
    /// (1-based) indices.
    fn coarsen(&self) -> Level {
        let n = self.n;
        let nc = n / 2;
        let mut out = vec![[0.0; 9]; nc * nc];
        // Coarse parents (1-based) of a fine 1-based index with their weights.
        let parents = |g: i64| -> [(i64, f64); 2] {
            if g % 2 == 0 {
                [(g / 2, 1.0), (0, 0.0)]
            } else {
                [((g - 1) / 2, 0.5), ((g + 1) / 2, 0.5)]
            }
        };
        let in_fine = |f: i64| f >= 1 && f <= n as i64;
        let in_coarse = |c: i64| c >= 1 && c <= nc as i64;
        for ci in 1..=nc as i64 {
            for cj in 1..=nc as i64 {
                let st = &mut out[(ci as usize - 1) * nc + cj as usize - 1];
                for (fi, wi) in [(2 * ci - 1, 0.5), (2 * ci, 1.0), (2 * ci + 1, 0.5)] {
                    if !in_fine(fi) {
                        continue;
                    }
                    for (fj, wj) in [(2 * cj - 1, 0.5), (2 * cj, 1.0), (2 * cj + 1, 0.5)] {
                        if !in_fine(fj) {
                            continue;
                        }
                        let a = self.stencil((fi as usize - 1) * n + fj as usize - 1);
                        for di in -1i64..=1 {
                            let gi = fi + di;
                            if !in_fine(gi) {
                                continue;
                            }
                            for dj in -1i64..=1 {
                                let gj = fj + dj;
                                let coef = a[slot(di, dj)];
                                if !in_fine(gj) || coef == 0.0 {
                                    continue;
                                }
                                let w = wi * wj * coef;
                                for (pi, ui) in parents(gi) {
                                    if ui == 0.0 || !in_coarse(pi) {
                                        continue;
                                    }
                                    for (pj, uj) in parents(gj) {
                                        if uj == 0.0 || !in_coarse(pj) {
                                            continue;
                                        }
                                        st[slot(pi - ci, pj - cj)] += w * ui * uj;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Level {
            n: nc,
            stencils: Stencils::PerNode(out),
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let s = self.stencil(i * n + j);
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        let (ii, jj) = (i as i64 + di, j as i64 + dj);
                        if ii >= 0 && jj >= 0 && ii < n as i64 && jj < n as i64 {
                            m[(i * n + j, ii as usize * n + jj as usize)] = s[slot(di, dj)];
                        }
                    }
                }
            }
        }
        m
    }
}

/// `Pᵀ r` (full weighting up to a factor 4).
fn restrict(fine: &[f64], n: usize, nc: usize) -> Vec<f64> {
    let mut out = vec![0.0; nc * nc];
    for ci in 1..=nc {
        for cj in 1..=nc {
            let mut acc = 0.0;
            for (fi, wi) in [(2 * ci - 1, 0.5), (2 * ci, 1.0), (2 * ci + 1, 0.5)] {
                if fi > n {
                    continue;
                }
                for (fj, wj) in [(2 * cj - 1, 0.5), (2 * cj, 1.0), (2 * cj + 1, 0.5)] {
                    if fj > n {
                        continue;
                    }
                    acc += wi * wj * fine[(fi - 1) * n + fj - 1];
                }
            }
            out[(ci - 1) * nc + cj - 1] = acc;
        }
    }
    out
}

/// `v += P e`.
fn prolong_add(v: &mut [f64], n: usize, e: &[f64], nc: usize) {
    let coarse = |c: usize| -> Option<usize> { (c >= 1 && c <= nc).then(|| c - 1) };
    let weights = |f: usize| -> [(usize, f64); 2] {
        if f.is_multiple_of(2) {
            [(f / 2, 1.0), (0, 0.0)]
        } else {
            [((f - 1) / 2, 0.5), ((f + 1) / 2, 0.5)]
        }
    };
    for fi in 1..=n {
        for fj in 1..=n {
            let mut acc = 0.0;
            for (ci, wi) in weights(fi) {
                let Some(ci) = coarse(ci).filter(|_| wi != 0.0) else { continue };
                for (cj, wj) in weights(fj) {
                    let Some(cj) = coarse(cj).filter(|_| wj != 0.0) else { continue };
                    acc += wi * wj * e[ci * nc + cj];
                }
            }
            v[(fi - 1) * n + fj - 1] += acc;
        }
    }
}

struct Hierarchy {
    levels: Vec<Level>,
    coarse_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Hierarchy {
    fn new(k: &JumpKernel, n: usize) -> Self {
        let mut s = [0.0; 9];
        s[CENTER] = 1.0;
        for (di, dj, p) in k.steps() {
            // g(z) − Σ p_d g(z − d): the neighbour at offset −d carries −p_d.
            s[slot(-di as i64, -dj as i64)] -= p;
        }
        let mut levels = vec![Level {
            n,
            stencils: Stencils::Constant(s),
        }];
        while levels.last().map(|l| l.n > COARSEST).unwrap_or(false) {
            let next = levels.last().unwrap().coarsen();
            levels.push(next);
        }
        let coarse_lu = levels.last().unwrap().dense().lu();
        Self { levels, coarse_lu }
    }

    fn v_cycle(&self, depth: usize, v: &mut [f64], b: &[f64]) {
        let level = &self.levels[depth];
        if depth + 1 == self.levels.len() {
            let rhs = DVector::from_column_slice(b);
            if let Some(x) = self.coarse_lu.solve(&rhs) {
                v.copy_from_slice(x.as_slice());
            } else {
                for _ in 0..50 {
                    level.smooth(v, b);
                }
            }
            return;
        }
        for _ in 0..PRE_SMOOTH {
            level.smooth(v, b);
        }
        let n = level.n;
        let mut r = vec![0.0; n * n];
        level.residual(v, b, &mut r);
        let nc = self.levels[depth + 1].n;
        let rc = restrict(&r, n, nc);
        let mut ec = vec![0.0; nc * nc];
        self.v_cycle(depth + 1, &mut ec, &rc);
        prolong_add(v, n, &ec, nc);
        for _ in 0..POST_SMOOTH {
            level.smooth(v, b);
        }
    }
}

/// Visit counts over the box from one start.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenGrid {
    pub n: usize,
    pub start: LatticePoint,
    /// `G(i, j)` at `(i − 1) N + (j − 1)`.
    pub values: Vec<f64>,
    /// `|G_{2N} − G_N|` when extrapolated.
    pub abs_error: Option<Vec<f64>>,
    /// Max-norm residual after each V-cycle (of the final solve).
    pub residual_history: Vec<f64>,
    /// Box side of the solve that produced `values`.
    pub solved_n: usize,
}

impl GreenGrid {
    /// `G(i, j)`, zero off the box.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            0.0
        } else {
            self.values[(i - 1) * self.n + j - 1]
        }
    }

    pub fn error(&self, i: usize, j: usize) -> f64 {
        match &self.abs_error {
            Some(e) if i >= 1 && j >= 1 && i <= self.n && j <= self.n => e[(i - 1) * self.n + j - 1],
            _ => 0.0,
        }
    }

    pub fn estimate(&self, i: usize, j: usize) -> GreenEstimate {
        GreenEstimate {
            value: self.get(i, j),
            abs_error: self.error(i, j),
            method: Method::OracleTruncation,
            meta: EstimateMeta {
                truncation: Some(self.solved_n),
                ..EstimateMeta::default()
            },
        }
    }
}

/// Solves the truncated system once on `[1, n]²`.
pub fn solve_box(k: &JumpKernel, start: LatticePoint, n: usize, tol: f64, max_cycles: usize) -> AppResult<(Vec<f64>, Vec<f64>)> {
    start.require_interior()?;
    if start.i as usize > n || start.j as usize > n {
        return Err(AppError::Usage(format!("start ({}, {}) lies outside the box [1, {n}]²", start.i, start.j)));
    }
    let h = Hierarchy::new(k, n);
    let mut b = vec![0.0; n * n];
    b[(start.i as usize - 1) * n + start.j as usize - 1] = 1.0;
    let mut v = vec![0.0; n * n];
    let mut r = vec![0.0; n * n];
    let mut history = Vec::new();
    let mut res = h.levels[0].residual(&v, &b, &mut r);
    for _ in 0..max_cycles {
        if res <= tol {
            return Ok((v, history));
        }
        h.v_cycle(0, &mut v, &b);
        res = h.levels[0].residual(&v, &b, &mut r);
        history.push(res);
    }
    if res <= tol {
        Ok((v, history))
    } else {
        Err(AppError::Core(quarter_green_core::Error::NonConvergence {
            error: res,
            evaluations: max_cycles,
        }))
    }
}

/// Expected visit counts over `[1, N]²` from `start`.
pub fn green_truncated(k: &JumpKernel, start: LatticePoint, cfg: &TruncationConfig) -> AppResult<GreenGrid> {
    if cfg.n < 16 {
        return Err(AppError::Usage(format!("box side {} is below 16", cfg.n)));
    }
    let (base, history) = solve_box(k, start, cfg.n, cfg.solver_tol, cfg.max_cycles)?;
    if !cfg.extrapolate {
        return Ok(GreenGrid {
            n: cfg.n,
            start,
            values: base,
            abs_error: None,
            residual_history: history,
            solved_n: cfg.n,
        });
    }
    let n2 = 2 * cfg.n;
    let (big, history) = solve_box(k, start, n2, cfg.solver_tol, cfg.max_cycles)?;
    let n = cfg.n;
    let mut values = vec![0.0; n * n];
    let mut err = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let fine = big[i * n2 + j];
            values[i * n + j] = fine;
            err[i * n + j] = (fine - base[i * n + j]).abs();
        }
    }
    Ok(GreenGrid {
        n,
        start,
        values,
        abs_error: Some(err),
        residual_history: history,
        solved_n: n2,
    })
}

/// Absorption probabilities read off a Green grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionProfile {
    /// `h_i` at index `i − 1`, for `i ∈ [1, N + 1]`.
    pub horizontal: Vec<f64>,
    /// `h̃_j` at index `j − 1`, for `j ∈ [1, N + 1]`.
    pub vertical: Vec<f64>,
    pub corner: f64,
}

impl AbsorptionProfile {
    pub fn h(&self, i: usize) -> f64 {
        self.horizontal.get(i.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    pub fn h_tilde(&self, j: usize) -> f64 {
        self.vertical.get(j.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    /// `Σ h_i + Σ h̃_j + h₀₀`; the rest was lost through the box sides.
    pub fn total_mass(&self) -> f64 {
        self.horizontal.iter().sum::<f64>() + self.vertical.iter().sum::<f64>() + self.corner
    }
}

/// `h_i = p₁,₋₁ G(i−1, 1) + p₀,₋₁ G(i, 1) + p₋₁,₋₁ G(i+1, 1)`, the analogue
/// for `h̃_j`, and `h₀₀ = p₋₁,₋₁ G(1, 1)`.
pub fn absorption_from_grid(k: &JumpKernel, g: &GreenGrid) -> AbsorptionProfile {
    let n = g.n;
    let horizontal = (1..=n + 1)
        .map(|i| k.p(1, -1) * g.get(i - 1, 1) + k.p(0, -1) * g.get(i, 1) + k.p(-1, -1) * g.get(i + 1, 1))
        .collect();
    let vertical = (1..=n + 1)
        .map(|j| k.p(-1, 1) * g.get(1, j - 1) + k.p(-1, 0) * g.get(1, j) + k.p(-1, -1) * g.get(1, j + 1))
        .collect();
    AbsorptionProfile {
        horizontal,
        vertical,
        corner: k.p(-1, -1) * g.get(1, 1),
    }
}

pub fn absorption_truncated(k: &JumpKernel, start: LatticePoint, cfg: &TruncationConfig) -> AppResult<AbsorptionProfile> {
    let g = green_truncated(k, start, cfg)?;
    Ok(absorption_from_grid(k, &g))
}

/// `Q(x, y) G(x, y) − [h(x) + h̃(y) + h₀₀ − x^{i₀} y^{j₀}]` with every
/// generating function truncated to the box.
pub fn functional_equation_residual_from(
    k: &JumpKernel,
    g: &GreenGrid,
    a: &AbsorptionProfile,
    x: Complex64,
    y: Complex64,
) -> Complex64 {
    let n = g.n;
    let xs: Vec<Complex64> = std::iter::successors(Some(Complex64::new(1.0, 0.0)), |p| Some(p * x)).take(n + 2).collect();
    let ys: Vec<Complex64> = std::iter::successors(Some(Complex64::new(1.0, 0.0)), |p| Some(p * y)).take(n + 2).collect();
    let mut gen = Complex64::new(0.0, 0.0);
    for i in 1..=n {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 1..=n {
            row += ys[j - 1] * g.get(i, j);
        }
        gen += xs[i - 1] * row;
    }
    let h: Complex64 = a.horizontal.iter().enumerate().map(|(m, v)| xs[m + 1] * *v).sum();
    let ht: Complex64 = a.vertical.iter().enumerate().map(|(m, v)| ys[m + 1] * *v).sum();
    let (i0, j0) = (g.start.i as usize, g.start.j as usize);
    let lhs = quarter_green_core::curve::q_eval(k, x, y) * gen;
    lhs - (h + ht + a.corner - xs[i0] * ys[j0])
}

pub fn functional_equation_residual(
    k: &JumpKernel,
    start: LatticePoint,
    x: Complex64,
    y: Complex64,
    cfg: &TruncationConfig,
) -> AppResult<Complex64> {
    if x.norm() >= 1.0 || y.norm() >= 1.0 {
        return Err(AppError::Usage("functional equation needs |x| < 1 and |y| < 1".into()));
    }
    let g = green_truncated(k, start, cfg)?;
    let a = absorption_from_grid(k, &g);
    Ok(functional_equation_residual_from(k, &g, &a, x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn galerkin_of_constant_stencil_has_consistent_row_sums() {
        // The fine stencil annihilates constants and P maps constants to
        // constants away from the edges, so interior coarse rows sum to zero.
        let k = JumpKernel::uniform();
        let h = Hierarchy::new(&k, 64);
        let c = &h.levels[1];
        let s = c.stencil(10 * c.n + 10);
        let row: f64 = s.iter().sum();
        assert!(row.abs() < 1e-12, "{row}");
        assert!(s[CENTER] > 0.0);
    }

    #[test]
    fn multigrid_matches_dense_solve() {
        let k = JumpKernel::su3();
        let n = 20;
        let (v, hist) = solve_box(&k, LatticePoint::new(2, 3), n, 1e-13, 100).unwrap();
        let lvl = &Hierarchy::new(&k, n).levels[0];
        let mut b = DVector::zeros(n * n);
        b[(2 - 1) * n + 3 - 1] = 1.0;
        let x = lvl.dense().lu().solve(&b).unwrap();
        for (a, b) in v.iter().zip(x.iter()) {
            assert!((a - b).abs() < 1e-11);
        }
        assert!(!hist.is_empty() || v.iter().any(|x| *x != 0.0));
    }

    #[test]
    fn residual_history_decreases() {
        let (_, hist) = solve_box(&JumpKernel::su3(), LatticePoint::new(1, 1), 200, 1e-12, 100).unwrap();
        assert!(hist.len() > 2);
        assert!(hist.windows(2).all(|w| w[1] < w[0]), "{hist:?}");
    }
}
