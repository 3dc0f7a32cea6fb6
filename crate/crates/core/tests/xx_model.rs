mod common;

use approx::assert_abs_diff_eq;
use common::{jordan_wigner_sector_energy, random_amplitudes, rng};
use spinbath_core::dense;
use spinbath_core::spin::{Complex64, Pauli, PauliString, RegisterLayout};
use spinbath_core::xx::*;

fn dense_matvec(m: &nalgebra::DMatrix<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    (m * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec()
}

fn dense_from_terms(h: &SpinHamiltonian) -> nalgebra::DMatrix<Complex64> {
    let n = h.layout().total_qubits();
    let mut m = nalgebra::DMatrix::<Complex64>::zeros(1 << n, 1 << n);
    for (c, string) in h.terms() {
        let ops: Vec<_> = string
            .ops()
            .map(|(q, p)| {
                let s = match p {
                    Pauli::X => dense::sigma_x(),
                    Pauli::Y => dense::sigma_y(),
                    Pauli::Z => dense::sigma_z(),
                };
                (q, s)
            })
            .collect();
        m += dense::embed(n, &ops) * Complex64::new(*c, 0.0);
    }
    m
}

fn sector_dense_minimum(n_bath: usize, h: f64, n: usize) -> f64 {
    // restrict the dense matrix to the sector and diagonalise
    let full = dense::xx_bath(n_bath, 0, n_bath, h);
    let idx: Vec<usize> = (0..1usize << n_bath).filter(|b| b.count_ones() as usize == n).collect();
    let block = nalgebra::DMatrix::from_fn(idx.len(), idx.len(), |r, c| full[(idx[r], idx[c])]);
    dense::eigenvalues(&block)[0]
}

#[test]
fn hopping_and_field_elements() {
    let h = build_xx_bath(3, 0.0).unwrap();
    // ⟨100|H|010⟩ with qubit 0 leftmost in the label
    let col = h.column(0b010);
    let elem: Complex64 = col.iter().filter(|(r, _)| *r == 0b001).map(|(_, a)| *a).sum();
    assert_abs_diff_eq!(elem.re, -1.0, epsilon = 1e-15);
    let hb = build_xx_bath(5, 0.3).unwrap();
    let diag: Complex64 = hb.column(0).iter().filter(|(r, _)| *r == 0).map(|(_, a)| *a).sum();
    assert_abs_diff_eq!(diag.re, -5.0 * 0.3, epsilon = 1e-15);
}

#[test]
fn hamiltonian_preserves_excitation_number() {
    let h = build_xx_bath(7, 0.4).unwrap();
    for b in 0..h.dim() {
        for (r, a) in h.column(b) {
            if a.norm() > 0.0 {
                assert_eq!(r.count_ones(), b.count_ones());
            }
        }
    }
}

#[test]
fn rejects_short_rings() {
    assert!(build_xx_bath(2, 0.0).is_err());
    assert!(build_interaction(RegisterLayout::bath(4).unwrap(), 1.0).is_err());
}

#[test]
fn interaction_elements_per_branch() {
    let layout = RegisterLayout::with_system(4).unwrap();
    let d = 0.7;
    let h = build_interaction(layout, d).unwrap();
    // system qubit 0, first bath spin qubit 1
    let up_col = h.column(0b00000);
    let up: Complex64 = up_col.iter().filter(|(r, _)| *r == 0b00010).map(|(_, a)| *a).sum();
    assert_abs_diff_eq!(up.re, d, epsilon = 1e-15);
    let down_col = h.column(0b00001);
    let down: Complex64 = down_col.iter().filter(|(r, _)| *r == 0b00011).map(|(_, a)| *a).sum();
    assert_abs_diff_eq!(down.re, -d, epsilon = 1e-15);
}

#[test]
fn interaction_commutes_with_system_z() {
    let mut r = rng(21);
    let layout = RegisterLayout::with_system(6).unwrap();
    let h = build_interaction(layout, 1.3).unwrap();
    let z = PauliString::single(0, Pauli::Z);
    let one = Complex64::new(1.0, 0.0);
    for _ in 0..10 {
        let x = random_amplitudes(&mut r, layout.dim());
        let hz = h.apply(&spinbath_core::spin::apply_pauli_raw(&z, one, &x));
        let zh = spinbath_core::spin::apply_pauli_raw(&z, one, &h.apply(&x));
        assert!(common::max_abs_diff(&hz, &zh) < 1e-12);
    }
}

#[test]
fn matvec_matches_dense_construction() {
    let mut r = rng(8);
    for n in 3..=10 {
        let h = build_xx_bath(n, 0.37).unwrap();
        let m = dense::xx_bath(n, 0, n, 0.37);
        let x = random_amplitudes(&mut r, h.dim());
        assert!(
            common::max_abs_diff(&h.apply(&x), &dense_matvec(&m, &x)) < 1e-12,
            "N={n}"
        );
        assert!(common::max_abs_diff(&h.apply(&x), &dense_matvec(&dense_from_terms(&h), &x)) < 1e-12);
    }
    for n in 3..=9 {
        let layout = RegisterLayout::with_system(n).unwrap();
        let full = SpinHamiltonian::weighted_sum(&[
            (1.0, &build_interaction(layout, 0.8).unwrap()),
            (0.6, &build_xx_bath(n, 1.1).unwrap().embed_with_system().unwrap()),
        ])
        .unwrap();
        let m = dense::full_hamiltonian(n, 0.8, 0.6, 1.1);
        let x = random_amplitudes(&mut r, full.dim());
        assert!(
            common::max_abs_diff(&full.apply(&x), &dense_matvec(&m, &x)) < 1e-12,
            "N={n}"
        );
    }
}

#[test]
fn branch_hamiltonians_match_dense() {
    let mut r = rng(9);
    for sign in [1.0, -1.0] {
        let h = build_branch(6, 0.9, sign, 0.5, 0.2).unwrap();
        let m = dense::branch_hamiltonian(6, 0.9, sign, 0.5, 0.2);
        let x = random_amplitudes(&mut r, h.dim());
        assert!(common::max_abs_diff(&h.apply(&x), &dense_matvec(&m, &x)) < 1e-12);
    }
}

#[test]
fn low_sectors_in_closed_form() {
    for n_bath in [3, 5, 8, 13] {
        for h in [0.0, 0.4, 2.0] {
            let g0 = sector_ground(n_bath, h, 0).unwrap();
            assert_abs_diff_eq!(g0.energy, -(n_bath as f64) * h, epsilon = 1e-12);
            assert_abs_diff_eq!(g0.vector.amplitudes()[0].re, 1.0, epsilon = 1e-12);
            let g1 = sector_ground(n_bath, h, 1).unwrap();
            assert_abs_diff_eq!(g1.energy, -2.0 - (n_bath as f64 - 2.0) * h, epsilon = 1e-10);
            let a = 1.0 / (n_bath as f64).sqrt();
            for (b, amp) in g1.vector.amplitudes().iter().enumerate() {
                let expect = if b.count_ones() == 1 { a } else { 0.0 };
                assert_abs_diff_eq!(amp.re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(amp.im, 0.0, epsilon = 1e-12);
            }
        }
    }
}

#[test]
fn second_sector_of_six_sites_matches_dense() {
    let g = sector_ground(6, 0.0, 2).unwrap();
    assert_abs_diff_eq!(g.energy, sector_dense_minimum(6, 0.0, 2), epsilon = 1e-10);
    assert!(!g.degenerate);
}

#[test]
fn every_sector_matches_dense_and_free_fermions() {
    for n_bath in 3..=10 {
        let h = 0.23;
        for n in 0..=n_bath {
            let g = sector_ground(n_bath, h, n).unwrap();
            assert_abs_diff_eq!(g.energy, sector_dense_minimum(n_bath, h, n), epsilon = 1e-9);
            let jw = jordan_wigner_sector_energy(n_bath, n) - (n_bath as f64 - 2.0 * n as f64) * h;
            assert_abs_diff_eq!(g.energy, jw, epsilon = 1e-9);
        }
    }
}

#[test]
fn sector_vectors_are_eigenvectors() {
    for (n_bath, h) in [(8, 0.5), (11, 0.1), (12, 0.9)] {
        let hb = build_xx_bath(n_bath, h).unwrap();
        for n in 0..=n_bath {
            let g = sector_ground(n_bath, h, n).unwrap();
            let v = g.vector.amplitudes();
            let hv = hb.apply(v);
            let residual: f64 = hv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - b * g.energy).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(residual < 1e-8, "N={n_bath} n={n} residual={residual}");
            let leak: f64 = v
                .iter()
                .enumerate()
                .filter(|(b, _)| b.count_ones() as usize != n)
                .map(|(_, a)| a.norm())
                .fold(0.0, f64::max);
            assert!(leak < 1e-12);
        }
    }
}

#[test]
fn global_ground_matches_full_diagonalization() {
    for n_bath in 3..=10 {
        for h in [0.0, 0.3, 0.77, 1.2] {
            let g = global_ground(n_bath, h).unwrap();
            let m = dense::xx_bath(n_bath, 0, n_bath, h);
            assert_abs_diff_eq!(g.energy, dense::ground_energy_real(&m), epsilon = 1e-9);
        }
    }
}

#[test]
fn twelve_site_energies_match_free_fermions() {
    let spectrum = XxSpectrum::new(12).unwrap();
    for n in 0..=12 {
        assert_abs_diff_eq!(
            spectrum.energy(n, 0.0),
            jordan_wigner_sector_energy(12, n),
            epsilon = 1e-9
        );
    }
}

#[test]
fn global_ground_selection() {
    assert_eq!(global_ground(12, 1.5).unwrap().n, 0);
    assert_eq!(global_ground(12, 0.99).unwrap().n, 1);
    assert_eq!(global_ground(12, 0.0).unwrap().n, 6);
    // tie at the top threshold goes to fewer excitations
    assert_eq!(global_ground(12, 1.0).unwrap().n, 0);
}

#[test]
fn boundaries_structure() {
    for n_bath in [4, 6, 8, 10, 12, 14] {
        let b = sector_boundaries(n_bath).unwrap();
        assert_abs_diff_eq!(b[0].h, 1.0, epsilon = 1e-10);
        assert_eq!(b.len() + 1, n_bath / 2 + 1, "N={n_bath}");
        assert!(b.windows(2).all(|w| w[0].h > w[1].h && w[0].n_below == w[1].n_above));
        assert!(b.iter().all(|x| x.n_below == x.n_above + 1));
    }
    assert_abs_diff_eq!(sector_boundaries(5).unwrap()[0].h, 1.0, epsilon = 1e-10);
}

#[test]
fn boundaries_match_grid_scan() {
    // ground sector along h from free-fermion energies, compared to the crossings
    let n_bath = 12;
    let b = sector_boundaries(n_bath).unwrap();
    let energy = |n: usize, h: f64| jordan_wigner_sector_energy(n_bath, n) - (n_bath as f64 - 2.0 * n as f64) * h;
    let mut prev: Option<usize> = None;
    let mut crossings = Vec::new();
    for step in (0..=1500).rev() {
        let h = step as f64 * 1e-3;
        let n = (0..=n_bath)
            .min_by(|&a, &c| energy(a, h).total_cmp(&energy(c, h)).then(a.cmp(&c)))
            .unwrap();
        if let Some(p) = prev {
            if p != n {
                crossings.push((h, p, n));
            }
        }
        prev = Some(n);
    }
    assert_eq!(crossings.len(), b.len());
    for ((h, above, below), x) in crossings.iter().zip(&b) {
        assert!(*h <= x.h + 1e-9 && x.h < h + 1e-3 + 1e-9, "{h} vs {}", x.h);
        assert_eq!((*above, *below), (x.n_above, x.n_below));
    }
    // and agrees with the library's own selection
    let spectrum = XxSpectrum::new(n_bath).unwrap();
    for step in 0..=1500 {
        let h = step as f64 * 1e-3;
        let n = spectrum.ground_sector(h);
        let expect = b.iter().filter(|x| x.h > h + 1e-12).count();
        let expect = if expect == 0 { 0 } else { b[expect - 1].n_below };
        assert_eq!(n, expect, "h={h}");
    }
}

#[test]
fn selected_sector_is_non_increasing_in_h() {
    let spectrum = XxSpectrum::new(10).unwrap();
    let mut last = usize::MAX;
    for step in 0..=300 {
        let n = spectrum.ground_sector(step as f64 * 0.005);
        assert!(n <= last);
        last = n;
    }
}

#[test]
fn representative_fields_land_in_their_sector() {
    let spectrum = XxSpectrum::new(14).unwrap();
    let reps = spectrum.representative_fields(1.5);
    assert_eq!(reps.len(), 8);
    for (n, h) in reps {
        assert_eq!(spectrum.ground_sector(h), n);
        assert_eq!(global_ground(14, h).unwrap().n, n);
    }
}
