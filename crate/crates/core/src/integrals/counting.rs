use crate::basis::Parity;
use crate::mo_solver::{build_two_electron_basis, Sector};

/// Orbital count that yields `n_states` two-electron states in `sector`.
fn orbitals_for(n_states: usize, sector: Sector) -> Option<usize> {
    (1..64).find(|&n| match sector {
        Sector::Singlet => n * (n + 1) / 2 == n_states,
        Sector::Triplet => n * (n - 1) / 2 == n_states,
    })
}

/// Unique two-electron Hamiltonian elements ⟨ψ_ab|H|ψ_cd⟩ left after Hermiticity
/// and, optionally, parity blocking, returned as orbital quadruples (a, b, c, d).
///
/// With parity the orbitals are taken as even/odd combinations split evenly,
/// evens first. Returns an empty list if no orbital count produces `n_states`.
pub fn enumerate_unique_elements(n_states: usize, use_parity: bool, sector: Sector) -> Vec<[usize; 4]> {
    let Some(n) = orbitals_for(n_states, sector) else {
        return Vec::new();
    };
    let parities: Vec<Parity> = (0..n).map(|i| if i < (n + 1) / 2 { Parity::Even } else { Parity::Odd }).collect();
    let states = build_two_electron_basis(n, if use_parity { Some(&parities) } else { None }, sector);
    let mut out = Vec::new();
    for (i, si) in states.iter().enumerate() {
        for sj in &states[i..] {
            if use_parity && si.parity != sj.parity {
                continue;
            }
            out.push([si.orbital_pair.0, si.orbital_pair.1, sj.orbital_pair.0, sj.orbital_pair.1]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_counts() {
        assert_eq!(enumerate_unique_elements(21, false, Sector::Singlet).len(), 231);
        assert_eq!(enumerate_unique_elements(15, false, Sector::Triplet).len(), 120);
        assert_eq!(enumerate_unique_elements(21, true, Sector::Singlet).len(), 123);
        assert_eq!(enumerate_unique_elements(15, true, Sector::Triplet).len(), 66);
        assert_eq!(enumerate_unique_elements(3, false, Sector::Singlet).len(), 6);
        assert!(enumerate_unique_elements(4, false, Sector::Singlet).is_empty());
    }
}
