use alloc::vec;
use alloc::vec::Vec;

use super::backend::{acceptance_angles, QmsBackend};
use super::{Move, MoveSet};
use crate::circuits::QpeGrid;
use crate::gauge::{plaquette_class, ExactSpectrum, GaugeModel, PlaquetteId};
use crate::math::{cos, sin, sqrt, CMatrix, RMatrix, C64, PI, ZERO};
use crate::statevector::{binary_outcome, sample_index, RngStream};
use crate::{Error, Result};

/// Complex matrix stored as separate real and imaginary parts, so products run on the real
/// matrix kernel.
#[derive(Clone, Debug, PartialEq)]
struct Split {
    re: RMatrix,
    im: RMatrix,
}

impl Split {
    fn zeros(r: usize, c: usize) -> Self {
        Self {
            re: RMatrix::zeros(r, c),
            im: RMatrix::zeros(r, c),
        }
    }

    fn from_complex(m: &CMatrix) -> Self {
        Self {
            re: m.map(|x| x.re),
            im: m.map(|x| x.im),
        }
    }

    fn to_complex(&self) -> CMatrix {
        self.re.zip_map(&self.im, C64::new)
    }

    /// `a * b`, or `a * conj(b)` when `conj_b`.
    fn product(a: &Split, b: &Split, conj_b: bool) -> Split {
        let s = if conj_b { -1.0 } else { 1.0 };
        let mut re = &a.re * &b.re;
        re.gemm(-s, &a.im, &b.im, 1.0);
        let mut im = &a.im * &b.re;
        im.gemm(s, &a.re, &b.im, 1.0);
        Split { re, im }
    }
}

/// Precomputed data for emulating a chain in the physical eigenbasis.
///
/// The state is a `176 x 2^(q+1)` matrix: row `k` is the eigenvector index, column
/// `a * 2^q + e` the acceptance qubit and energy register. Phase estimation acts on each
/// eigenvector as Hadamards, the exact kickback phase and the inverse QFT, which is what the
/// gate-level circuit does with exact controlled evolution.
#[derive(Clone, Debug)]
pub struct SpectralTables {
    grid: QpeGrid,
    model: GaugeModel,
    energies: Vec<f64>,
    vectors: RMatrix,
    moves: [Split; 4],
    /// Per plaquette, projectors onto the `-2, 0, +2` eigenspaces in eigen coordinates.
    plaquettes: [[RMatrix; 3]; 2],
    /// `e^{2 pi i phi_k x}` with `phi_k = (E_k - E_min) / (spacing 2^q)`, indexed `(k, x)`.
    kickback: Split,
    /// Symmetric DFT matrix `e^{2 pi i x y / N} / sqrt(N)`.
    dft: Split,
    hadamard: RMatrix,
}

impl SpectralTables {
    pub fn new(model: &GaugeModel, spectrum: &ExactSpectrum, moves: &MoveSet, grid: QpeGrid) -> Self {
        let n = spectrum.dim();
        let action = model.action();
        let v = spectrum.eigenvectors().clone();
        let vc = crate::math::to_complex(&v);
        let move_matrix = |mv: Move| -> Split {
            let mut orbit_op = CMatrix::zeros(n, n);
            let mut unit = vec![ZERO; n];
            for col in 0..n {
                unit[col] = C64::new(1.0, 0.0);
                let mut psi = action.embed(&unit);
                moves.apply(mv, &mut psi);
                for (row, c) in action.coordinates(&psi).into_iter().enumerate() {
                    orbit_op[(row, col)] = c;
                }
                unit[col] = ZERO;
            }
            Split::from_complex(&(vc.transpose() * orbit_op * &vc))
        };
        let moves = Move::ALL.map(move_matrix);
        let projector = |id: PlaquetteId, class: usize| -> RMatrix {
            let d = action.orbit_means(|x| (plaquette_class(model.lattice(), id, x) == class) as u8 as f64);
            let scaled = RMatrix::from_fn(n, n, |r, c| v[(r, c)] * d[r]);
            v.transpose() * scaled
        };
        let plaquettes = PlaquetteId::ALL.map(|id| [projector(id, 0), projector(id, 1), projector(id, 2)]);
        let size = grid.size();
        let energies = spectrum.eigenvalues().to_vec();
        let kick_angle = |k: usize, x: usize| {
            let phi = (energies[k] - grid.e_min()) / (grid.spacing() * size as f64);
            2.0 * PI * phi * x as f64
        };
        let kickback = Split {
            re: RMatrix::from_fn(n, size, |k, x| cos(kick_angle(k, x))),
            im: RMatrix::from_fn(n, size, |k, x| sin(kick_angle(k, x))),
        };
        let norm = 1.0 / sqrt(size as f64);
        let dft_angle = |x: usize, y: usize| 2.0 * PI * ((x * y) % size) as f64 / size as f64;
        let dft = Split {
            re: RMatrix::from_fn(size, size, |x, y| cos(dft_angle(x, y)) * norm),
            im: RMatrix::from_fn(size, size, |x, y| sin(dft_angle(x, y)) * norm),
        };
        let hadamard = RMatrix::from_fn(size, size, |x, y| {
            if (x & y).count_ones() % 2 == 0 {
                norm
            } else {
                -norm
            }
        });
        Self {
            grid,
            model: model.clone(),
            energies,
            vectors: v,
            moves,
            plaquettes,
            kickback,
            dft,
            hadamard,
        }
    }

    pub fn grid(&self) -> &QpeGrid {
        &self.grid
    }

    pub fn model(&self) -> &GaugeModel {
        &self.model
    }

    /// Physical eigenvalues indexing the state rows.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Move in eigen coordinates.
    pub fn move_matrix(&self, mv: Move) -> CMatrix {
        self.moves[mv.index()].to_complex()
    }

    pub fn plaquette_projector(&self, id: PlaquetteId, class: usize) -> &RMatrix {
        &self.plaquettes[id.index()][class]
    }

    /// Lift eigen coordinates to the 4096-dimensional link basis.
    pub fn lift(&self, coeffs: &[C64]) -> Vec<C64> {
        let orbit: Vec<C64> = (0..self.vectors.nrows())
            .map(|r| (0..coeffs.len()).map(|k| coeffs[k] * self.vectors[(r, k)]).sum())
            .collect();
        self.model.action().embed(&orbit)
    }
}

/// Chain state in the physical eigenbasis.
#[derive(Clone, Debug)]
pub struct SpectralBackend<'a> {
    tables: &'a SpectralTables,
    state: Split,
}

impl<'a> SpectralBackend<'a> {
    pub fn new(tables: &'a SpectralTables) -> Self {
        let state = Split::zeros(tables.energies.len(), 2 * tables.grid.size());
        Self { tables, state }
    }

    fn size(&self) -> usize {
        self.tables.grid.size()
    }

    fn column(&self, a: usize, e: usize) -> usize {
        a * self.size() + e
    }

    /// Amplitude of eigenvector `k` with acceptance qubit `a` and energy register `e`.
    pub fn amplitude(&self, a: usize, e: usize, k: usize) -> C64 {
        let c = self.column(a, e);
        C64::new(self.state.re[(k, c)], self.state.im[(k, c)])
    }

    fn column_norm(&self, c: usize) -> f64 {
        self.state.re.column(c).norm_squared() + self.state.im.column(c).norm_squared()
    }

    fn total_norm(&self) -> f64 {
        self.state.re.norm_squared() + self.state.im.norm_squared()
    }

    fn nonzero_columns(&self) -> Vec<usize> {
        (0..self.state.re.ncols())
            .filter(|&c| self.state.re.column(c).iter().chain(self.state.im.column(c).iter()).any(|x| *x != 0.0))
            .collect()
    }

    /// `state <- m * state`, touching only non-zero columns.
    fn left_multiply(&mut self, m: &Split) {
        let cols = self.nonzero_columns();
        if cols.len() == self.state.re.ncols() {
            self.state = Split::product(m, &self.state, false);
            return;
        }
        let sub = Split {
            re: self.state.re.select_columns(&cols),
            im: self.state.im.select_columns(&cols),
        };
        let out = Split::product(m, &sub, false);
        for (i, &c) in cols.iter().enumerate() {
            self.state.re.set_column(c, &out.re.column(i));
            self.state.im.set_column(c, &out.im.column(i));
        }
    }

    fn left_multiply_real(&mut self, m: &RMatrix) {
        let zero = RMatrix::zeros(m.nrows(), m.ncols());
        self.left_multiply(&Split { re: m.clone(), im: zero });
    }

    /// Right-multiply each acceptance half (`176 x 2^q`) by `m` (or its conjugate).
    fn right_multiply(&mut self, m: &Split, conj: bool) {
        let n = self.size();
        for a in 0..2 {
            let half = Split {
                re: self.state.re.columns(a * n, n).into_owned(),
                im: self.state.im.columns(a * n, n).into_owned(),
            };
            let out = Split::product(&half, m, conj);
            self.state.re.columns_mut(a * n, n).copy_from(&out.re);
            self.state.im.columns_mut(a * n, n).copy_from(&out.im);
        }
    }

    fn hadamards(&mut self) {
        let n = self.size();
        let h = &self.tables.hadamard;
        for a in 0..2 {
            let re = self.state.re.columns(a * n, n) * h;
            let im = self.state.im.columns(a * n, n) * h;
            self.state.re.columns_mut(a * n, n).copy_from(&re);
            self.state.im.columns_mut(a * n, n).copy_from(&im);
        }
    }

    fn kickback(&mut self, conj: bool) {
        let n = self.size();
        let s = if conj { -1.0 } else { 1.0 };
        let kick = &self.tables.kickback;
        for a in 0..2 {
            for e in 0..n {
                let c = self.column(a, e);
                for k in 0..kick.re.nrows() {
                    let (pr, pi) = (kick.re[(k, e)], s * kick.im[(k, e)]);
                    let (xr, xi) = (self.state.re[(k, c)], self.state.im[(k, c)]);
                    self.state.re[(k, c)] = xr * pr - xi * pi;
                    self.state.im[(k, c)] = xr * pi + xi * pr;
                }
            }
        }
    }

    fn normalize(&mut self) {
        let n = sqrt(self.total_norm());
        assert!(n > 0.0, "selected a zero-probability branch");
        self.state.re /= n;
        self.state.im /= n;
    }

    /// Keep the `(a, e)` columns selected by `keep` and renormalize.
    fn collapse(&mut self, keep: impl Fn(usize, usize) -> bool) {
        let n = self.size();
        for c in 0..2 * n {
            if !keep(c / n, c % n) {
                self.state.re.column_mut(c).fill(0.0);
                self.state.im.column_mut(c).fill(0.0);
            }
        }
        self.normalize();
    }

    fn binary(&mut self, pred: impl Fn(usize, usize) -> bool, rng: &mut RngStream) -> bool {
        let n = self.size();
        let p: f64 = (0..2 * n)
            .filter(|&c| pred(c / n, c % n))
            .map(|c| self.column_norm(c))
            .sum();
        let outcome = binary_outcome(p / self.total_norm(), rng.uniform());
        self.collapse(|a, e| pred(a, e) == outcome);
        outcome
    }

    /// Eigen coordinates in the ancilla-zero column.
    pub fn system(&self) -> Vec<C64> {
        (0..self.tables.energies.len()).map(|k| self.amplitude(0, 0, k)).collect()
    }

    /// Replace the whole state by `coeffs` (eigen coordinates) with every ancilla zero.
    pub fn set_system(&mut self, coeffs: &[C64]) -> Result<()> {
        let dim = self.tables.energies.len();
        if coeffs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coeffs.len(),
            });
        }
        self.state.re.fill(0.0);
        self.state.im.fill(0.0);
        for (k, c) in coeffs.iter().enumerate() {
            self.state.re[(k, 0)] = c.re;
            self.state.im[(k, 0)] = c.im;
        }
        Ok(())
    }

    /// `<psi| P |psi>` for a real symmetric `P` acting on the eigen index.
    fn expectation_real(&self, p: &RMatrix) -> f64 {
        self.nonzero_columns()
            .into_iter()
            .map(|c| {
                let (re, im) = (self.state.re.column(c), self.state.im.column(c));
                re.dot(&(p * re)) + im.dot(&(p * im))
            })
            .sum()
    }
}

impl QmsBackend for SpectralBackend<'_> {
    fn grid(&self) -> &QpeGrid {
        &self.tables.grid
    }

    fn prepare(&mut self) -> Result<()> {
        // the uniform superposition has orbit coordinates sqrt(|O| / 4096)
        let action = self.tables.model.action();
        let orbit: Vec<f64> = action
            .orbits()
            .iter()
            .map(|o| sqrt(o.len() as f64 / action.dim() as f64))
            .collect();
        let v = &self.tables.vectors;
        let coeffs: Vec<C64> = (0..v.ncols())
            .map(|k| C64::new((0..orbit.len()).map(|r| v[(r, k)] * orbit[r]).sum(), 0.0))
            .collect();
        self.set_system(&coeffs)
    }

    fn apply_move(&mut self, mv: Move) -> Result<()> {
        let tables = self.tables;
        self.left_multiply(&tables.moves[mv.index()]);
        Ok(())
    }

    fn apply_qpe(&mut self, adjoint: bool) -> Result<()> {
        let tables = self.tables;
        if adjoint {
            self.right_multiply(&tables.dft, false);
            self.kickback(true);
            self.hadamards();
        } else {
            self.hadamards();
            self.kickback(false);
            self.right_multiply(&tables.dft, true);
        }
        Ok(())
    }

    fn apply_acceptance(&mut self, current: usize, beta: f64, adjoint: bool) -> Result<()> {
        let angles = acceptance_angles(&self.tables.grid, beta, current);
        for (e, &(c, s)) in angles.iter().enumerate() {
            let (c0, c1) = (self.column(0, e), self.column(1, e));
            let s = if adjoint { -s } else { s };
            for part in [&mut self.state.re, &mut self.state.im] {
                for k in 0..part.nrows() {
                    let (x0, x1) = (part[(k, c0)], part[(k, c1)]);
                    part[(k, c0)] = x0 * c - x1 * s;
                    part[(k, c1)] = x0 * s + x1 * c;
                }
            }
        }
        Ok(())
    }

    fn measure_accept(&mut self, rng: &mut RngStream) -> Result<bool> {
        Ok(self.binary(|a, _| a == 1, rng))
    }

    fn measure_ancillas_zero(&mut self, rng: &mut RngStream) -> Result<bool> {
        Ok(self.binary(|a, e| a == 0 && e == 0, rng))
    }

    fn measure_energy_window(&mut self, center: usize, m_tol: usize, rng: &mut RngStream) -> Result<bool> {
        Ok(self.binary(|_, e| e.abs_diff(center) <= m_tol, rng))
    }

    fn measure_energy(&mut self, rng: &mut RngStream) -> Result<usize> {
        let probs: Vec<f64> = (0..self.size())
            .map(|e| self.column_norm(self.column(0, e)) + self.column_norm(self.column(1, e)))
            .collect();
        let j = sample_index(&probs, rng.uniform());
        self.collapse(|_, e| e == j);
        Ok(j)
    }

    fn reset_ancillas(&mut self) -> Result<()> {
        let mut cols = self.nonzero_columns().into_iter();
        let c = cols.next().ok_or_else(|| Error::invalid("reset", "empty state"))?;
        if cols.next().is_some() {
            return Err(Error::invalid("reset", "ancillas are not in a basis state"));
        }
        if c != 0 {
            let (re, im) = (self.state.re.column(c).into_owned(), self.state.im.column(c).into_owned());
            self.state.re.set_column(0, &re);
            self.state.im.set_column(0, &im);
            self.state.re.column_mut(c).fill(0.0);
            self.state.im.column_mut(c).fill(0.0);
        }
        Ok(())
    }

    fn measure_plaquette(&mut self, id: PlaquetteId, rng: &mut RngStream) -> Result<i8> {
        let tables = self.tables;
        let projectors = &tables.plaquettes[id.index()];
        let total = self.total_norm();
        let p_minus = self.expectation_real(&projectors[0]).max(0.0) / total;
        let p_plus = self.expectation_real(&projectors[2]).max(0.0) / total;
        // first stage: is the loop product in {e, r^2}
        let p_center = p_minus + p_plus;
        let m1 = sample_index(&[1.0 - p_center, p_center], rng.uniform());
        let (class, outcome) = if m1 == 0 {
            (1, 0)
        } else if sample_index(&[p_plus, p_minus], rng.uniform()) == 0 {
            (2, 2)
        } else {
            (0, -2)
        };
        self.left_multiply_real(&projectors[class]);
        self.normalize();
        Ok(outcome)
    }

    fn gauge_residual(&self) -> f64 {
        let action = self.tables.model.action();
        let dim = self.tables.energies.len();
        let mut lifted = Vec::new();
        for c in self.nonzero_columns() {
            let coeffs: Vec<C64> = (0..dim)
                .map(|k| C64::new(self.state.re[(k, c)], self.state.im[(k, c)]))
                .collect();
            lifted.extend(self.tables.lift(&coeffs));
        }
        if lifted.is_empty() {
            return 0.0;
        }
        action.residual(&lifted)
    }
}
