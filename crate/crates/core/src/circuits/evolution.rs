use alloc::vec::Vec;

use super::{Circuit, Gate, LinkQubits};
use crate::gauge::{HamiltonianSpec, LatticeSpec, PlaquetteId, SectorDecomposition};
use crate::math::{norm_sqr, sqrt, C64};
use crate::statevector::{RegisterLayout, RngStream, StateVector};
use crate::{Error, Result};

/// Link registers at qubits `3l .. 3l + 3`.
pub fn standard_links(num_links: usize) -> Vec<LinkQubits> {
    (0..num_links).map(|l| [3 * l, 3 * l + 1, 3 * l + 2]).collect()
}

/// Basis change after which the plaquette's central register holds the loop product and every
/// other link register is unchanged. Built from inversions and left multiplications only.
pub fn plaquette_basis_change(lattice: &LatticeSpec, id: PlaquetteId, links: &[LinkQubits]) -> Result<Circuit> {
    let plaq = lattice.plaquette(id);
    let c = plaq.central;
    match plaq.steps.first() {
        Some(s) if s.link == c && s.forward => {}
        _ => return Err(Error::invalid("plaquette", "loop must start along its central link")),
    }
    let mut circuit = Circuit::new();
    for step in &plaq.steps[1..] {
        if step.link == c {
            return Err(Error::invalid("plaquette", "central link appears twice"));
        }
        let (src, dst) = (links[step.link], links[c]);
        if step.forward {
            circuit.push(Gate::Mult { src, dst, inverse: false });
        } else {
            circuit.push(Gate::Inverse { link: src });
            circuit.push(Gate::Mult { src, dst, inverse: false });
            circuit.push(Gate::Inverse { link: src });
        }
    }
    Ok(circuit)
}

/// `e^{-i H_V dt}`: per plaquette, basis change, trace phase on the central register, undo.
/// Only the phase gates carry `controls`; the basis changes cancel when the controls are off.
pub fn potential_step(
    lattice: &LatticeSpec,
    spec: HamiltonianSpec,
    dt: f64,
    links: &[LinkQubits],
    controls: &[usize],
) -> Result<Circuit> {
    let mut circuit = Circuit::new();
    for id in PlaquetteId::ALL {
        let s = plaquette_basis_change(lattice, id, links)?;
        circuit.append(&s);
        circuit.push(Gate::TracePhase {
            link: links[lattice.plaquette(id).central],
            theta: spec.inv_coupling() * dt,
            controls: controls.to_vec(),
        });
        circuit.append(&s.adjoint());
    }
    Ok(circuit)
}

/// `e^{-i H_K dt}` as a Fourier-conjugated irrep phase on every link.
pub fn kinetic_step(spec: HamiltonianSpec, dt: f64, links: &[LinkQubits], controls: &[usize]) -> Circuit {
    let logs = spec.transfer_log_eigenvalues();
    let mut circuit = Circuit::new();
    for &link in links {
        circuit.push(Gate::Fourier { link, adjoint: false });
        circuit.push(Gate::KineticPhase {
            link,
            dt,
            log_eigenvalues: logs,
            controls: controls.to_vec(),
        });
        circuit.push(Gate::Fourier { link, adjoint: true });
    }
    circuit
}

/// Step count of the second-order product formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrotterParams {
    pub steps: usize,
}

impl TrotterParams {
    pub const DEFAULT_STEPS: usize = 10;

    pub fn new(steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::invalid("trotter_steps", "must be at least 1"));
        }
        Ok(Self { steps })
    }
}

impl Default for TrotterParams {
    fn default() -> Self {
        Self {
            steps: Self::DEFAULT_STEPS,
        }
    }
}

/// `(e^{-iH_K t/2N} e^{-iH_V t/N} e^{-iH_K t/2N})^N`, adjacent half kinetic steps merged.
pub fn trotter_evolution(
    lattice: &LatticeSpec,
    spec: HamiltonianSpec,
    t: f64,
    trotter: TrotterParams,
    links: &[LinkQubits],
    controls: &[usize],
) -> Result<Circuit> {
    let n = trotter.steps;
    let dt = t / n as f64;
    let v = potential_step(lattice, spec, dt, links, controls)?;
    let mut circuit = kinetic_step(spec, dt / 2.0, links, controls);
    for k in 0..n {
        circuit.append(&v);
        let tail = if k + 1 == n { dt / 2.0 } else { dt };
        circuit.append(&kinetic_step(spec, tail, links, controls));
    }
    Ok(circuit)
}

fn system_state(amps: Vec<C64>) -> StateVector {
    let layout = RegisterLayout::new()
        .with("links", super::SYSTEM_QUBITS)
        .expect("fresh layout");
    StateVector::from_amplitudes(layout, amps).expect("length matches layout")
}

/// Operator-norm distance `||A - B||` by power iteration on `(A - B)^dag (A - B)`.
/// `apply` and `adjoint` act on the 4096-dimensional link space.
pub fn operator_norm_distance(
    apply: impl Fn(&[C64]) -> Vec<C64>,
    adjoint: impl Fn(&[C64]) -> Vec<C64>,
    dim: usize,
    iterations: usize,
    rng: &mut RngStream,
) -> f64 {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5))
        .collect();
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let n = sqrt(norm_sqr(&v));
        v.iter_mut().for_each(|a| *a /= n);
        let w = apply(&v);
        estimate = sqrt(norm_sqr(&w));
        v = adjoint(&w);
    }
    estimate
}

/// `||U_trotter(t, N) - e^{-iHt}||` using the exact sector propagator.
pub fn trotter_error(
    lattice: &LatticeSpec,
    spec: HamiltonianSpec,
    exact: &SectorDecomposition,
    t: f64,
    trotter: TrotterParams,
    iterations: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    let links = standard_links(lattice.num_links());
    let forward = trotter_evolution(lattice, spec, t, trotter, &links, &[])?;
    let backward = forward.adjoint();
    let run = |c: &Circuit, v: &[C64]| {
        let mut s = system_state(v.to_vec());
        c.apply(&mut s).expect("gates are valid");
        s.into_amplitudes()
    };
    let diff = |c: &Circuit, time: f64, v: &[C64]| -> Vec<C64> {
        let a = run(c, v);
        let b = exact.propagate(time, v);
        a.iter().zip(&b).map(|(x, y)| x - y).collect()
    };
    Ok(operator_norm_distance(
        |v| diff(&forward, t, v),
        |v| diff(&backward, -t, v),
        exact.dim(),
        iterations,
        rng,
    ))
}

/// Apply a circuit acting only on the link registers to a bare 4096-vector.
pub fn apply_to_links(circuit: &Circuit, psi: &[C64], exact: Option<&SectorDecomposition>) -> Result<Vec<C64>> {
    let mut s = system_state(psi.to_vec());
    circuit.apply_with(&mut s, exact)?;
    Ok(s.into_amplitudes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{GaugeModel, LatticeSpec};
    use crate::math::{cis, ONE, ZERO};
    use alloc::vec;
    use crate::d4::GroupElement as G;

    fn setup() -> (LatticeSpec, HamiltonianSpec, Vec<LinkQubits>) {
        (LatticeSpec::periodic_2x1(), HamiltonianSpec::default(), standard_links(4))
    }

    fn zero_links() -> Vec<C64> {
        vec![ZERO; 1 << crate::circuits::SYSTEM_QUBITS]
    }

    fn basis(x: usize) -> Vec<C64> {
        let mut v = zero_links();
        v[x] = ONE;
        v
    }

    fn random_links(seed: u64) -> Vec<C64> {
        let mut rng = RngStream::new(seed, 0);
        let mut v: Vec<C64> = (0..4096)
            .map(|_| C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5))
            .collect();
        let n = sqrt(norm_sqr(&v));
        v.iter_mut().for_each(|a| *a /= n);
        v
    }

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn basis_change_central_register_holds_loop_product() {
        let (lat, _, links) = setup();
        for id in PlaquetteId::ALL {
            let s = plaquette_basis_change(&lat, id, &links).unwrap();
            assert!(s.gates().iter().all(|g| matches!(g, Gate::Inverse { .. } | Gate::Mult { inverse: false, .. })));
            let plaq = lat.plaquette(id);
            for x in 0..4096 {
                let out = apply_to_links(&s, &basis(x), None).unwrap();
                let y = out.iter().position(|a| a.norm() > 0.5).unwrap();
                for l in 0..4 {
                    let want = if l == plaq.central {
                        LatticeSpec::path_product(&plaq.steps, x)
                    } else {
                        LatticeSpec::link_value(x, l)
                    };
                    assert_eq!(LatticeSpec::link_value(y, l), want);
                }
            }
        }
    }

    #[test]
    fn basis_change_examples() {
        let (lat, _, links) = setup();
        let s = plaquette_basis_change(&lat, PlaquetteId::Left, &links).unwrap();
        let read = |x: usize| {
            let out = apply_to_links(&s, &basis(x), None).unwrap();
            LatticeSpec::link_value(out.iter().position(|a| a.norm() > 0.5).unwrap(), 1)
        };
        assert_eq!(read(0), G::E);
        assert_eq!(read(LatticeSpec::index_of(&[G::E, G::R2, G::E, G::E])), G::R2);
        let v = random_links(3);
        let back = apply_to_links(&s.adjoint(), &apply_to_links(&s, &v, None).unwrap(), None).unwrap();
        assert!(max_diff(&back, &v) < 1e-14);
    }

    #[test]
    fn potential_step_matches_diagonal() {
        let (lat, spec, links) = setup();
        let hv = spec.potential_diagonal(&lat);
        let dt = 0.43;
        let c = potential_step(&lat, spec, dt, &links, &[]).unwrap();
        for x in 0..4096 {
            let out = apply_to_links(&c, &basis(x), None).unwrap();
            assert!((out[x] - cis(-hv[x] * dt)).norm() < 1e-10);
        }
        let zero = potential_step(&lat, spec, 0.0, &links, &[]).unwrap();
        let v = random_links(4);
        assert!(max_diff(&apply_to_links(&zero, &v, None).unwrap(), &v) < 1e-14);
    }

    #[test]
    fn steps_match_exact_evolution_of_their_terms() {
        let (lat, spec, links) = setup();
        let model = GaugeModel::new(spec);
        let v = random_links(5);
        // kinetic step alone against the dense single-link exponential applied link by link
        let dt = 0.29;
        let kin = kinetic_step(spec, dt, &links, &[]);
        let got = apply_to_links(&kin, &v, None).unwrap();
        let hk = spec.hk_single_link();
        let eig = nalgebra::SymmetricEigen::new(hk);
        let u1 = nalgebra::DMatrix::<C64>::from_fn(8, 8, |r, c| {
            (0..8)
                .map(|k| cis(-eig.eigenvalues[k] * dt) * eig.eigenvectors[(r, k)] * eig.eigenvectors[(c, k)])
                .sum()
        });
        let mut want = v.clone();
        for l in 0..4 {
            let mut next = zero_links();
            for x in 0..4096 {
                let g = (x >> (3 * l)) & 7;
                let base = x & !(7 << (3 * l));
                for h in 0..8 {
                    next[base | h << (3 * l)] += u1[(h, g)] * want[x];
                }
            }
            want = next;
        }
        assert!(max_diff(&got, &want) < 1e-9);
        // Trotter with N=1 and no kinetic term is the exact potential evolution
        let pot = potential_step(&lat, spec, 0.8, &links, &[]).unwrap();
        let got = apply_to_links(&pot, &v, None).unwrap();
        let hv = model.hamiltonian().potential();
        for x in 0..4096 {
            assert!((got[x] - v[x] * cis(-hv[x] * 0.8)).norm() < 1e-9);
        }
    }

    #[test]
    fn trotter_is_unitary_and_commutes_with_gauge() {
        let (lat, spec, links) = setup();
        let model = GaugeModel::new(spec);
        let c = trotter_evolution(&lat, spec, 0.7, TrotterParams::new(3).unwrap(), &links, &[]).unwrap();
        let v = random_links(6);
        let out = apply_to_links(&c, &v, None).unwrap();
        assert!((norm_sqr(&out) - 1.0).abs() < 1e-9);
        let phys = model.action().project(&v);
        let n = sqrt(norm_sqr(&phys));
        let phys: Vec<C64> = phys.iter().map(|a| a / n).collect();
        let evolved = apply_to_links(&c, &phys, None).unwrap();
        assert!(model.action().residual(&evolved) < 1e-10);
        assert!(TrotterParams::new(0).is_err());
    }

    #[test]
    fn trotter_error_is_second_order() {
        let (lat, spec, _) = setup();
        let model = GaugeModel::new(spec);
        let exact = SectorDecomposition::compute(&model);
        let mut rng = RngStream::new(7, 0);
        let e10 = trotter_error(&lat, spec, &exact, 1.0, TrotterParams::new(10).unwrap(), 40, &mut rng).unwrap();
        let e20 = trotter_error(&lat, spec, &exact, 1.0, TrotterParams::new(20).unwrap(), 40, &mut rng).unwrap();
        let ratio = e10 / e20;
        assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}, errors {e10} {e20}");
        assert!(e10 < 0.1);
    }
}
