//! Shared oracle helpers for the integration suites: dense state-space
//! simulation of small circuits and brute-force group enumeration. These
//! deliberately avoid the production conjugation path so they can certify it.

use nalgebra::{Complex, DMatrix};
use qrlc_core::clifford::CliffordGate;
use qrlc_core::code::StabilizerCode;
use qrlc_core::pauli::PauliOperator;

type C64 = Complex<f64>;
type Matrix = DMatrix<C64>;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Full 2^n x 2^n unitary of one gate, qubit 0 least significant.
pub fn gate_unitary(gate: CliffordGate, n: usize) -> Matrix {
    let dim = 1usize << n;
    let mut m = Matrix::zeros(dim, dim);
    match gate {
        CliffordGate::H { q } => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for col in 0..dim {
                let bit = col >> q & 1;
                let base = col & !(1 << q);
                m[(base, col)] += c(s, 0.0);
                m[(base | 1 << q, col)] += c(if bit == 1 { -s } else { s }, 0.0);
            }
        }
        CliffordGate::SqrtZ { q } => {
            for col in 0..dim {
                m[(col, col)] = if col >> q & 1 == 1 { c(0.0, 1.0) } else { c(1.0, 0.0) };
            }
        }
        CliffordGate::SqrtZInv { q } => {
            for col in 0..dim {
                m[(col, col)] = if col >> q & 1 == 1 { c(0.0, -1.0) } else { c(1.0, 0.0) };
            }
        }
        CliffordGate::Cnot { control, target } => {
            for col in 0..dim {
                let row = if col >> control & 1 == 1 { col ^ (1 << target) } else { col };
                m[(row, col)] = c(1.0, 0.0);
            }
        }
    }
    m
}

/// Product of the gates applied in order (later gates multiply from the left).
pub fn circuit_unitary(gates: &[CliffordGate], n: usize) -> Matrix {
    let dim = 1usize << n;
    let mut u = Matrix::identity(dim, dim);
    for &g in gates {
        u = gate_unitary(g, n) * u;
    }
    u
}

/// Matrix of `X^x Z^z` (the phase-free representative of a Pauli string):
/// |j> -> (-1)^(z . j) |j xor x>.
pub fn pauli_matrix(p: &PauliOperator) -> Matrix {
    let n = p.n_qubits();
    let dim = 1usize << n;
    let mut x_mask = 0usize;
    let mut z_mask = 0usize;
    for q in 0..n {
        if p.x_bit(q) {
            x_mask |= 1 << q;
        }
        if p.z_bit(q) {
            z_mask |= 1 << q;
        }
    }
    let mut m = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let sign = if (col & z_mask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m[(col ^ x_mask, col)] = c(sign, 0.0);
    }
    m
}

/// Read a Pauli string back out of a matrix that is proportional to one;
/// returns `None` (test failure upstream) when the matrix is not a Pauli up
/// to phase.
pub fn extract_pauli_mod_phase(m: &Matrix, n: usize) -> Option<PauliOperator> {
    let dim = 1usize << n;
    let tol = 1e-9;
    // Column 0 reveals the X mask: M|0> = phase |x>.
    let x_mask = (0..dim).find(|&r| m[(r, 0)].norm() > tol)?;
    let phase = m[(x_mask, 0)];
    let mut p = PauliOperator::identity(n);
    for q in 0..n {
        if x_mask >> q & 1 == 1 {
            p = &p * &PauliOperator::x_at(n, q);
        }
        // Column e_q has its entry at row e_q xor x with sign (-1)^(z_q).
        let entry = m[((1 << q) ^ x_mask, 1 << q)];
        let ratio = entry / phase;
        if (ratio.re + 1.0).abs() < tol && ratio.im.abs() < tol {
            p = &p * &PauliOperator::z_at(n, q);
        } else if !((ratio.re - 1.0).abs() < tol && ratio.im.abs() < tol) {
            return None;
        }
    }
    // Confirm the reconstruction is proportional to the input.
    let rebuilt = pauli_matrix(&p);
    for col in 0..dim {
        for row in 0..dim {
            let diff = m[(row, col)] - phase * rebuilt[(row, col)];
            if diff.norm() > 1e-7 {
                return None;
            }
        }
    }
    Some(p)
}

/// All 2^(n-k) elements of the stabilizer group as a set of operators.
pub fn stabilizer_group(code: &StabilizerCode) -> Vec<PauliOperator> {
    let gens = code.stabilizers();
    let mut out = Vec::with_capacity(1 << gens.len());
    for mask in 0u32..1 << gens.len() {
        let mut p = PauliOperator::identity(code.n());
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                p.mul_assign_ref(g);
            }
        }
        out.push(p);
    }
    out
}

/// All 4^k products of the original logical generators.
pub fn logical_group(code: &StabilizerCode) -> Vec<PauliOperator> {
    let gens: Vec<&PauliOperator> =
        code.logical_x().iter().chain(code.logical_z()).collect();
    let mut out = Vec::with_capacity(1 << gens.len());
    for mask in 0u32..1 << gens.len() {
        let mut p = PauliOperator::identity(code.n());
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                p.mul_assign_ref(g);
            }
        }
        out.push(p);
    }
    out
}

pub fn in_group(group: &[PauliOperator], p: &PauliOperator) -> bool {
    group.iter().any(|g| g == p)
}
