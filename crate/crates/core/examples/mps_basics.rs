// Building, gauging, gating and serializing matrix product states.
//
//     cargo run --release --example mps_basics

use magic_mps::circuits::{cnot, hadamard};
use magic_mps::exact::StateVector;
use magic_mps::{Mps, Pauli, PauliString};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Basics {
    pub bell_entropy: f64,
    pub ghz_zz: f64,
    pub random_residual: f64,
    pub roundtrip_fidelity: f64,
}

pub fn run(n: usize) -> magic_mps::Result<Basics> {
    // |00⟩ → H on site 0 → CNOT(0, 1) gives a Bell pair at the left edge
    let zero = Mps::zero_state(n)?;
    let (bell, discarded) = zero.apply_one_qubit_gate(0, &hadamard())?.apply_two_qubit_gate(0, &cnot(), 16, 0.0)?;
    let bell_entropy = bell.entanglement_entropy(1)?;
    println!("bell pair: S(1) = {bell_entropy:.6} (ln 2 = {:.6}), discarded {discarded:e}", std::f64::consts::LN_2);
    println!("bell bonds {:?}, schmidt {:?}", bell.bond_dims(), bell.schmidt_values(1)?);

    let ghz = Mps::ghz(n)?;
    let mut letters = vec![Pauli::I; n];
    letters[0] = Pauli::Z;
    letters[n - 1] = Pauli::Z;
    let ghz_zz = ghz.pauli_expectation(&PauliString::new(letters))?;
    println!("ghz: ⟨Z_0 Z_{}⟩ = {ghz_zz}, bonds {:?}", n - 1, ghz.bond_dims());

    let plus = [C64::new(0.5f64.sqrt(), 0.0), C64::new(0.5f64.sqrt(), 0.0)];
    let product = Mps::product_state(&vec![plus; n])?;
    let x0 = product.pauli_expectation(&PauliString::single(n, 0, Pauli::X))?;
    println!("|+…+⟩: ⟨X_0⟩ = {x0}");

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let random = Mps::random(n, 8, &mut rng)?;
    let random_residual = random.right_orthonormality_residual();
    println!("random χ=8: bonds {:?}, right-orthonormality residual {random_residual:.2e}", random.bond_dims());

    let text = random.to_json()?;
    let back = Mps::from_json(&text)?;
    let roundtrip_fidelity = StateVector::from_mps(&random)?.fidelity(&StateVector::from_mps(&back)?);
    println!("json round trip: {} bytes, fidelity {roundtrip_fidelity}", text.len());

    Ok(Basics { bell_entropy, ghz_zz, random_residual, roundtrip_fidelity })
}

fn main() -> magic_mps::Result<()> {
    run(6)?;
    Ok(())
}
