//! Binormal operators on an atomic measure.
//!
//! A binormal operator is a 2×2 block operator whose entries are commuting
//! normal operators. Realized as multiplication operators on `m` atoms, each
//! atom contributes a 2×2 matrix acting on the pair of coordinates
//! `(k, m + k)`. All matrices here use that block ordering: coordinate `k`
//! is the first component at atom `k`, coordinate `m + k` the second.

use num_complex::Complex;

use crate::builders::pullback;
use crate::conjugation::{csym_residual, Conjugation};
use crate::error::{Error, Result};
use crate::json::{from_pair, pair, AtomJson, BinormalAtomsJson};
use crate::scalar::{csqrt, lit, modulus, phase, to_f64, ComplexMatrix, Cx, Real};
use crate::tolerance::Tolerance;

/// Upper-triangular symbol values `[[u1, v], [0, u2]]` at one atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<T: Real> {
    pub u1: Cx<T>,
    pub v: Cx<T>,
    pub u2: Cx<T>,
    /// Mass of the atom. The operator matrices do not depend on it.
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinormalAtoms<T: Real> {
    pub atoms: Vec<Atom<T>>,
}

/// How an atom is conjugated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomCase {
    /// `u1 = u2`: swap the two components.
    Equal,
    /// `v = 0`: the atom is diagonal, conjugate entrywise.
    Diagonal,
    /// Generic atom, unitary block `[[a, b], [b, −conj a]]`.
    Generic,
}

impl<T: Real> BinormalAtoms<T> {
    pub fn new(atoms: Vec<Atom<T>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParams("at least one atom required".into()));
        }
        for a in &atoms {
            if !(a.weight > T::zero()) {
                return Err(Error::InvalidParams(format!("atom weight must be positive, got {}", a.weight)));
            }
        }
        Ok(Self { atoms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The triangular operator `[[diag u1, diag v], [0, diag u2]]`.
    pub fn triangular(&self) -> ComplexMatrix<T> {
        let zero = vec![Complex::new(T::zero(), T::zero()); self.len()];
        let col = |f: fn(&Atom<T>) -> Cx<T>| self.atoms.iter().map(f).collect::<Vec<_>>();
        binormal_assemble(&col(|a| a.u1), &col(|a| a.v), &zero, &col(|a| a.u2))
            .expect("lists have equal length")
    }

    pub fn to_json(&self) -> BinormalAtomsJson {
        BinormalAtomsJson {
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomJson {
                    u1: pair(a.u1),
                    v: pair(a.v),
                    u2: pair(a.u2),
                    w: to_f64(a.weight),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &BinormalAtomsJson) -> Result<Self> {
        let atoms = j
            .atoms
            .iter()
            .map(|a| {
                Ok(Atom {
                    u1: from_pair(a.u1)?,
                    v: from_pair(a.v)?,
                    u2: from_pair(a.u2)?,
                    weight: lit(a.w),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }
}

/// The block operator `[[diag n11, diag n12], [diag n21, diag n22]]`.
pub fn binormal_assemble<T: Real>(
    n11: &[Cx<T>],
    n12: &[Cx<T>],
    n21: &[Cx<T>],
    n22: &[Cx<T>],
) -> Result<ComplexMatrix<T>> {
    let m = n11.len();
    if n12.len() != m || n21.len() != m || n22.len() != m {
        return Err(Error::LengthMismatch);
    }
    let mut t = ComplexMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        t[(k, k)] = n11[k];
        t[(k, m + k)] = n12[k];
        t[(m + k, k)] = n21[k];
        t[(m + k, m + k)] = n22[k];
    }
    Ok(t)
}

/// Unitary `w` with `w*·[[p, q], [r, s]]·w` upper triangular.
fn schur2<T: Real>(p: Cx<T>, q: Cx<T>, r: Cx<T>, s: Cx<T>) -> [[Cx<T>; 2]; 2] {
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    if r == zero {
        return [[one, zero], [zero, one]];
    }
    let half: T = lit(0.5);
    let tr = p + s;
    let disc = csqrt((p - s) * (p - s) + q * r * lit::<T>(4.0));
    // Root farther from s keeps the eigenvector (λ − s, r) well away from zero.
    let l1 = (tr + disc) * half;
    let l2 = (tr - disc) * half;
    let lambda = if modulus(l1 - s) >= modulus(l2 - s) { l1 } else { l2 };
    let x1 = lambda - s;
    let x2 = r;
    let norm = (modulus(x1).powi(2) + modulus(x2).powi(2)).sqrt();
    let (x1, x2) = (x1 / norm, x2 / norm);
    [[x1, x2.conj()], [x2, -x1.conj()]]
}

/// Brings every atom to upper-triangular form by a 2×2 Schur step.
///
/// Returns the atoms (unit weights) and the block unitary `w` with
/// `w*·t·w = atoms.triangular()`.
pub fn binormal_triangularize<T: Real>(
    n11: &[Cx<T>],
    n12: &[Cx<T>],
    n21: &[Cx<T>],
    n22: &[Cx<T>],
) -> Result<(BinormalAtoms<T>, ComplexMatrix<T>)> {
    let t = binormal_assemble(n11, n12, n21, n22)?;
    let m = n11.len();
    if m == 0 {
        return Err(Error::InvalidParams("at least one atom required".into()));
    }
    let mut w = ComplexMatrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        let b = schur2(n11[k], n12[k], n21[k], n22[k]);
        let idx = [k, m + k];
        for i in 0..2 {
            for j in 0..2 {
                w[(idx[i], idx[j])] = b[i][j];
            }
        }
    }
    let tri = w.adjoint() * &t * &w;
    let atoms = (0..m)
        .map(|k| Atom {
            u1: tri[(k, k)],
            v: tri[(k, m + k)],
            u2: tri[(m + k, m + k)],
            weight: T::one(),
        })
        .collect();
    Ok((BinormalAtoms { atoms }, w))
}

/// Classifies an atom for the conjugation construction.
pub fn atom_case<T: Real>(atom: &Atom<T>, tol: &Tolerance<T>) -> AtomCase {
    let scale = T::one().max(modulus(atom.u1)).max(modulus(atom.u2));
    if modulus(atom.u1 - atom.u2) <= tol.rel * scale {
        AtomCase::Equal
    } else if modulus(atom.v) <= tol.rel * scale {
        AtomCase::Diagonal
    } else {
        AtomCase::Generic
    }
}

/// The coefficients `(a, b)` of the generic-atom unitary `[[a, b], [b, −conj a]]`:
/// `a = γ·|u1 − u2| / r`, `b = |v| / r` with `r = √(|u1 − u2|² + |v|²)` and
/// `γ = (v/|v|)·(|u1 − u2|/(u1 − u2))`.
pub fn generic_coefficients<T: Real>(u1: Cx<T>, v: Cx<T>, u2: Cx<T>) -> (Cx<T>, T) {
    let d = u1 - u2;
    let dm = modulus(d);
    let vm = modulus(v);
    let r = (dm * dm + vm * vm).sqrt();
    let gamma = phase(v) * phase(d).conj();
    (gamma * (dm / r), vm / r)
}

/// The 2×2 symmetric unitary conjugating one atom.
pub(crate) fn atom_block<T: Real>(atom: &Atom<T>, tol: &Tolerance<T>) -> [[Cx<T>; 2]; 2] {
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    match atom_case(atom, tol) {
        AtomCase::Equal => [[zero, one], [one, zero]],
        AtomCase::Diagonal => [[one, zero], [zero, one]],
        AtomCase::Generic => {
            let (a, b) = generic_coefficients(atom.u1, atom.v, atom.u2);
            let b = Complex::new(b, T::zero());
            [[a, b], [b, -a.conj()]]
        }
    }
}

/// Conjugation `C = U∘K` for the triangular operator of `atoms`, built atom
/// by atom.
pub fn binormal_conjugation<T: Real>(atoms: &BinormalAtoms<T>, tol: &Tolerance<T>) -> Result<Conjugation<T>> {
    let m = atoms.len();
    let mut s = ComplexMatrix::zeros(2 * m, 2 * m);
    for (k, atom) in atoms.atoms.iter().enumerate() {
        let block = atom_block(atom, tol);
        let idx = [k, m + k];
        for i in 0..2 {
            for j in 0..2 {
                s[(idx[i], idx[j])] = block[i][j];
            }
        }
    }
    Ok(Conjugation::from_exact(s))
}

/// Conjugation for the assembled operator `t` itself: triangularize, build
/// the atom conjugation, and pull it back along the block unitary.
pub fn binormal_certificate<T: Real>(
    n11: &[Cx<T>],
    n12: &[Cx<T>],
    n21: &[Cx<T>],
    n22: &[Cx<T>],
    tol: &Tolerance<T>,
) -> Result<(ComplexMatrix<T>, Conjugation<T>, T)> {
    let t = binormal_assemble(n11, n12, n21, n22)?;
    let (atoms, w) = binormal_triangularize(n11, n12, n21, n22)?;
    let c = binormal_conjugation(&atoms, tol)?;
    let c = pullback(&w, &c);
    let residual = csym_residual(&t, &c)?;
    Ok((t, c, residual))
}

/// Preset with `B = (1, −1)` and `C = (2, 3)`: the operator
/// `[[B, C], [0, −B]]`, whose square is normal.
pub fn sqrt_of_normal_preset<T: Real>() -> ComplexMatrix<T> {
    let c = |x: f64| Complex::new(lit::<T>(x), T::zero());
    binormal_assemble(&[c(1.0), c(-1.0)], &[c(2.0), c(3.0)], &[c(0.0), c(0.0)], &[c(-1.0), c(1.0)])
        .expect("fixed lengths")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, gaussian_vector};
    fn cx(re: f64, im: f64) -> num_complex::Complex<f64> {
        num_complex::Complex::new(re, im)
    }
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Cx<f64>;

    fn atom(u1: C, v: C, u2: C) -> Atom<f64> {
        Atom { u1, v, u2, weight: 1.0 }
    }

    #[test]
    fn assemble_examples() {
        let t = binormal_assemble(&[cx(0., 0.)], &[cx(3., 0.)], &[cx(0., 0.)], &[cx(0., 0.)]).unwrap();
        assert_eq!(t, ComplexMatrix::from_row_slice(2, 2, &[cx(0., 0.), cx(3., 0.), cx(0., 0.), cx(0., 0.)]));
        let d = [cx(1., 0.), cx(2., 0.)];
        let z = [cx(0., 0.), cx(0., 0.)];
        let t = binormal_assemble(&d, &z, &z, &d).unwrap();
        let expect = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![cx(1., 0.), cx(2., 0.), cx(1., 0.), cx(2., 0.)]));
        assert_eq!(t, expect);
        assert!(matches!(binormal_assemble(&d, &z[..1], &z, &d), Err(Error::LengthMismatch)));
    }

    #[test]
    fn sqrt_of_normal_squares_to_normal() {
        let t = sqrt_of_normal_preset::<f64>();
        let sq = &t * &t;
        assert!(frobenius(&(&sq * sq.adjoint() - sq.adjoint() * &sq)) < 1e-14);
        assert!(frobenius(&(&t * t.adjoint() - t.adjoint() * &t)) > 1.0);
    }

    #[test]
    fn triangularize_examples() {
        let (atoms, w) = binormal_triangularize(&[cx(0., 0.)], &[cx(0., 0.)], &[cx(1., 0.)], &[cx(0., 0.)]).unwrap();
        let a = atoms.atoms[0];
        assert!(a.u1.norm() < 1e-15 && a.u2.norm() < 1e-15);
        assert!((a.v.norm() - 1.0).abs() < 1e-15);
        assert!((w[(0, 1)].norm() - 1.0).abs() < 1e-15 && w[(0, 0)].norm() < 1e-15);

        let (atoms, w) = binormal_triangularize(&[cx(1., 0.)], &[cx(1., 0.)], &[cx(0., 0.)], &[cx(2., 0.)]).unwrap();
        assert_eq!(atoms.atoms[0], atom(cx(1., 0.), cx(1., 0.), cx(2., 0.)));
        assert_eq!(w, ComplexMatrix::identity(2, 2));

        let n = [cx(0., 0.)];
        let (atoms, w) = binormal_triangularize(&n, &[cx(1., 0.)], &[cx(4., 0.)], &n).unwrap();
        let t = binormal_assemble(&n, &[cx(1., 0.)], &[cx(4., 0.)], &n).unwrap();
        assert!(frobenius(&(w.adjoint() * t * &w - atoms.triangular())) < 1e-14);
        let mut eig = [atoms.atoms[0].u1.re, atoms.atoms[0].u2.re];
        eig.sort_by(f64::total_cmp);
        assert!((eig[0] + 2.0).abs() < 1e-14 && (eig[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn conjugation_cases() {
        let tol = Tolerance::default();
        let u = cx(0.3, -1.2);
        let equal = BinormalAtoms::new(vec![atom(u, cx(2., 1.), u)]).unwrap();
        assert_eq!(atom_case(&equal.atoms[0], &tol), AtomCase::Equal);
        let c = binormal_conjugation(&equal, &tol).unwrap();
        assert_eq!(csym_residual(&equal.triangular(), &c).unwrap(), 0.0);

        let diag = BinormalAtoms::new(vec![atom(cx(1., 0.), cx(0., 0.), cx(2., 0.))]).unwrap();
        assert_eq!(atom_case(&diag.atoms[0], &tol), AtomCase::Diagonal);
        let c = binormal_conjugation(&diag, &tol).unwrap();
        assert_eq!(c.matrix(), &ComplexMatrix::identity(2, 2));
    }

    #[test]
    fn generic_atom_hand_check() {
        let (a, b) = generic_coefficients(cx(0., 0.), cx(1., 0.), cx(1., 0.));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a - cx(-r, 0.0)).norm() < 1e-15);
        assert!((b - r).abs() < 1e-15);
        // b·u2 = b·u1 − conj(a)·v
        let (u1, v, u2) = (cx(0., 0.), cx(1., 0.), cx(1., 0.));
        assert!((u2 * b - (u1 * b - a.conj() * v)).norm() < 1e-15);
        let atoms = BinormalAtoms::new(vec![atom(cx(0., 0.), cx(1., 0.), cx(1., 0.))]).unwrap();
        let c = binormal_conjugation(&atoms, &Tolerance::default()).unwrap();
        assert!(csym_residual(&atoms.triangular(), &c).unwrap() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let atoms = BinormalAtoms::new(vec![atom(cx(1., 2.), cx(0., 1.), cx(-1., 0.)), Atom { weight: 0.5, ..atom(cx(0., 0.), cx(1., 0.), cx(0., 0.)) }]).unwrap();
        let j = atoms.to_json();
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.starts_with(r#"{"atoms":[{"u1":[1.0,2.0],"v":[0.0,1.0],"u2":[-1.0,0.0],"w":1.0}"#));
        let back = BinormalAtoms::<f64>::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, atoms);
        assert!(BinormalAtoms::<f64>::new(vec![]).is_err());
        assert!(BinormalAtoms::new(vec![Atom { weight: 0.0, ..atom(cx(0., 0.), cx(0., 0.), cx(0., 0.)) }]).is_err());
    }

    fn random_lists(seed: u64) -> [Vec<C>; 4] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.random_range(1..=16);
        let mut lists: [Vec<C>; 4] = std::array::from_fn(|_| gaussian_vector(&mut rng, m).iter().copied().collect());
        for k in 0..m {
            match rng.random_range(0..4) {
                0 => lists[2][k] = cx(0., 0.),
                1 => {
                    lists[2][k] = cx(0., 0.);
                    lists[3][k] = lists[0][k];
                }
                2 => {
                    lists[1][k] = cx(0., 0.);
                    lists[2][k] = cx(0., 0.);
                }
                _ => {}
            }
        }
        lists
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn assembled_operators_are_certified(seed in any::<u64>()) {
            let [a, b, c, d] = random_lists(seed);
            let (_, conj, residual) = binormal_certificate(&a, &b, &c, &d, &Tolerance::default()).unwrap();
            prop_assert!(residual <= 1e-10, "residual {}", residual);
            prop_assert!(conj.unitarity_residual() <= 1e-12);
            prop_assert!(conj.symmetry_residual() <= 1e-12);
        }

        #[test]
        fn generic_atoms_satisfy_case_ii_identity(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z: Vec<C> = gaussian_vector::<f64, _>(&mut rng, 3).iter().copied().collect();
            let (a, b) = generic_coefficients(z[0], z[1], z[2]);
            let lhs = z[2] * b;
            let rhs = z[0] * b - a.conj() * z[1];
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + z.iter().map(|w| w.norm()).sum::<f64>()));
            prop_assert!((a.norm_sqr() + b * b - 1.0).abs() <= 1e-14);
        }
    }
}
