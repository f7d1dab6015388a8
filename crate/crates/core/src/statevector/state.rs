use alloc::vec;
use alloc::vec::Vec;

use super::{RegisterLayout, RngStream};
use crate::math::{norm_sqr, sqrt, unitarity_deviation, CMatrix, C64, ZERO};
use crate::{Error, Result};

/// Largest arity accepted by the dense kernel (two link registers).
pub const MAX_DENSE_ARITY: usize = 6;
const UNITARY_TOL: f64 = 1e-10;
const UNIMODULAR_TOL: f64 = 1e-12;

/// Dense amplitude vector over a register layout. Basis index bit `q` is the value of qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<C64>,
}

/// Scatter the bits of `local` onto the qubit positions in `qubits`.
#[inline]
fn deposit(local: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | (((local >> i) & 1) << q))
}

/// Gather the bits of `index` at the positions in `qubits`.
#[inline]
pub fn extract(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | (((index >> q) & 1) << i))
}

fn mask_of(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | (1 << q))
}

/// Visit every basis index whose `zero_mask` bits are clear, with `set_mask` OR-ed in.
#[inline]
fn for_each_base(len: usize, zero_mask: usize, set_mask: usize, mut f: impl FnMut(usize)) {
    let fixed = zero_mask | set_mask;
    let mut y = 0usize;
    loop {
        f(y | set_mask);
        y = ((y | fixed).wrapping_add(1)) & !fixed;
        if y == 0 || y >= len {
            break;
        }
    }
}

impl StateVector {
    /// The all-zeros basis state.
    pub fn new(layout: RegisterLayout) -> Self {
        Self::basis(layout, 0)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Self {
        let len = 1usize << layout.num_qubits();
        assert!(index < len, "basis index out of range");
        let mut amps = vec![ZERO; len];
        amps[index] = C64::new(1.0, 0.0);
        Self { layout, amps }
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<C64>) -> Result<Self> {
        let len = 1usize << layout.num_qubits();
        if amps.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: amps.len(),
            });
        }
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn normalize(&mut self) {
        let n = sqrt(self.norm_sqr());
        assert!(n > 0.0, "cannot normalize the zero vector");
        let inv = 1.0 / n;
        self.amps.iter_mut().for_each(|a| *a *= inv);
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        let n = self.num_qubits();
        let mut seen = 0usize;
        for &q in qubits {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, len: n });
            }
            if seen & (1 << q) != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    fn check_disjoint(&self, controls: &[usize], targets: &[usize]) -> Result<()> {
        self.check_qubits(controls)?;
        self.check_qubits(targets)?;
        if let Some(&q) = controls.iter().find(|q| targets.contains(q)) {
            return Err(Error::DuplicateQubit(q));
        }
        Ok(())
    }

    /// Apply the dense unitary `u` to `targets`; `targets[i]` is bit `i` of the local index.
    pub fn apply_unitary(&mut self, targets: &[usize], u: &CMatrix) -> Result<()> {
        self.apply_controlled(&[], targets, u)
    }

    /// Apply `u` on the subspace where every control qubit is 1.
    pub fn apply_controlled(&mut self, controls: &[usize], targets: &[usize], u: &CMatrix) -> Result<()> {
        self.check_disjoint(controls, targets)?;
        if targets.len() > MAX_DENSE_ARITY {
            return Err(Error::ArityTooLarge(targets.len()));
        }
        let dim = 1usize << targets.len();
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: u.nrows(),
            });
        }
        let deviation = unitarity_deviation(u);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        self.dense_kernel(controls, targets, u);
        Ok(())
    }

    fn dense_kernel(&mut self, controls: &[usize], targets: &[usize], u: &CMatrix) {
        let dim = 1usize << targets.len();
        let offsets: Vec<usize> = (0..dim).map(|l| deposit(l, targets)).collect();
        let rows: Vec<C64> = (0..dim * dim).map(|k| u[(k / dim, k % dim)]).collect();
        let mut buf = vec![ZERO; dim];
        let amps = &mut self.amps;
        for_each_base(amps.len(), mask_of(targets), mask_of(controls), |base| {
            for (b, &o) in buf.iter_mut().zip(&offsets) {
                *b = amps[base | o];
            }
            for (r, &o) in offsets.iter().enumerate() {
                let row = &rows[r * dim..(r + 1) * dim];
                amps[base | o] = row.iter().zip(&buf).map(|(x, y)| x * y).sum();
            }
        });
    }

    /// Multiply amplitude `x` by `phases[local(x)]`, where `local` reads `qubits`.
    pub fn apply_diagonal(&mut self, qubits: &[usize], phases: &[C64]) -> Result<()> {
        self.apply_controlled_diagonal(&[], qubits, phases)
    }

    pub fn apply_controlled_diagonal(
        &mut self,
        controls: &[usize],
        qubits: &[usize],
        phases: &[C64],
    ) -> Result<()> {
        self.check_disjoint(controls, qubits)?;
        let dim = 1usize << qubits.len();
        if phases.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: phases.len(),
            });
        }
        let deviation = phases
            .iter()
            .fold(0.0f64, |m, p| m.max((p.norm() - 1.0).abs()));
        if deviation > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular { deviation });
        }
        let cmask = mask_of(controls);
        let contiguous = qubits.iter().enumerate().all(|(i, &q)| q == i);
        for (x, a) in self.amps.iter_mut().enumerate() {
            if x & cmask != cmask {
                continue;
            }
            let local = if contiguous {
                x & (dim - 1)
            } else {
                extract(x, qubits)
            };
            *a *= phases[local];
        }
        Ok(())
    }

    /// Phase function form of [`apply_diagonal`](Self::apply_diagonal).
    pub fn apply_diagonal_fn(&mut self, qubits: &[usize], phase: impl Fn(usize) -> C64) -> Result<()> {
        let phases: Vec<C64> = (0..1usize << qubits.len()).map(phase).collect();
        self.apply_diagonal(qubits, &phases)
    }

    /// Basis permutation `|x> -> |perm[x]>` on `targets`, conditioned on `controls`.
    pub fn apply_permutation(&mut self, controls: &[usize], targets: &[usize], perm: &[usize]) -> Result<()> {
        self.check_disjoint(controls, targets)?;
        let dim = 1usize << targets.len();
        if perm.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: perm.len(),
            });
        }
        let mut hit = vec![false; dim];
        for &p in perm {
            if p >= dim || hit[p] {
                return Err(Error::invalid("perm", "not a permutation"));
            }
            hit[p] = true;
        }
        let offsets: Vec<usize> = (0..dim).map(|l| deposit(l, targets)).collect();
        let mut buf = vec![ZERO; dim];
        let amps = &mut self.amps;
        for_each_base(amps.len(), mask_of(targets), mask_of(controls), |base| {
            for (b, &o) in buf.iter_mut().zip(&offsets) {
                *b = amps[base | o];
            }
            for (src, &dst) in perm.iter().enumerate() {
                amps[base | offsets[dst]] = buf[src];
            }
        });
        Ok(())
    }

    /// Uniformly controlled single-qubit gate: `gates[v]` (row-major 2x2) acts on `target`
    /// where the `select` qubits read `v`.
    pub fn apply_multiplexed(&mut self, select: &[usize], target: usize, gates: &[[C64; 4]]) -> Result<()> {
        self.check_disjoint(select, &[target])?;
        let dim = 1usize << select.len();
        if gates.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: gates.len(),
            });
        }
        for g in gates {
            let m = CMatrix::from_row_slice(2, 2, g);
            let deviation = unitarity_deviation(&m);
            if deviation > UNITARY_TOL {
                return Err(Error::NotUnitary { deviation });
            }
        }
        let bit = 1usize << target;
        let amps = &mut self.amps;
        for_each_base(amps.len(), bit, 0, |x0| {
            let g = &gates[extract(x0, select)];
            let (a, b) = (amps[x0], amps[x0 | bit]);
            amps[x0] = g[0] * a + g[1] * b;
            amps[x0 | bit] = g[2] * a + g[3] * b;
        });
        Ok(())
    }

    /// Born probabilities of each local outcome on `qubits`.
    pub fn probabilities(&self, qubits: &[usize]) -> Vec<f64> {
        let mut p = vec![0.0; 1 << qubits.len()];
        for (x, a) in self.amps.iter().enumerate() {
            p[extract(x, qubits)] += a.norm_sqr();
        }
        p
    }

    /// Projective measurement of `qubits`. One uniform variate is drawn and the smallest
    /// outcome whose cumulative probability exceeds it is selected.
    pub fn measure(&mut self, qubits: &[usize], rng: &mut RngStream) -> Result<usize> {
        self.check_qubits(qubits)?;
        let probs = self.probabilities(qubits);
        let outcome = sample_index(&probs, rng.uniform());
        self.project(qubits, outcome);
        Ok(outcome)
    }

    /// Two-outcome measurement of the projector onto local values satisfying `pred`.
    /// Returns `true` when the state collapses into that subspace.
    pub fn measure_predicate(
        &mut self,
        qubits: &[usize],
        pred: impl Fn(usize) -> bool,
        rng: &mut RngStream,
    ) -> Result<bool> {
        self.check_qubits(qubits)?;
        let p_true: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(x, _)| pred(extract(*x, qubits)))
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            / self.norm_sqr();
        let result = binary_outcome(p_true, rng.uniform());
        for (x, a) in self.amps.iter_mut().enumerate() {
            if pred(extract(x, qubits)) != result {
                *a = ZERO;
            }
        }
        self.normalize();
        Ok(result)
    }

    /// Collapse onto `outcome` without sampling; returns the probability of that branch.
    pub fn project(&mut self, qubits: &[usize], outcome: usize) -> f64 {
        let total = self.norm_sqr();
        let mut kept = 0.0;
        for (x, a) in self.amps.iter_mut().enumerate() {
            if extract(x, qubits) == outcome {
                kept += a.norm_sqr();
            } else {
                *a = ZERO;
            }
        }
        assert!(kept > 0.0, "selected a zero-probability branch");
        self.normalize();
        kept / total
    }

    /// `sum_x O(x) |a_x|^2`.
    pub fn expectation_diagonal(&self, observable: impl Fn(usize) -> f64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(x, a)| observable(x) * a.norm_sqr())
            .sum()
    }
}

/// Index of the first cumulative bin exceeding `u`; never returns a zero-probability bin.
pub fn sample_index(probs: &[f64], u: f64) -> usize {
    let total: f64 = probs.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = Some(i);
        if target < acc {
            return i;
        }
    }
    last.expect("all outcome probabilities are zero")
}

/// Outcome of a two-outcome measurement where `true` has probability `p_true`.
pub fn binary_outcome(p_true: f64, u: f64) -> bool {
    if p_true <= 0.0 {
        false
    } else if p_true >= 1.0 {
        true
    } else {
        u < p_true
    }
}
