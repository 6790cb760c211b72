//! Single-qubit Clifford operators as signed-axis tableaus.
//!
//! A local Clifford is determined up to global phase by where it sends X
//! and Z under conjugation. That representation composes and inverts
//! with exact integer arithmetic, which is what the Pauli measurement
//! elimination bookkeeping needs. A canonical word over {H, S} and a
//! concrete 2x2 matrix are derived on demand for printing and for
//! simulation.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A Pauli axis with a sign: +X, -Y, ...
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedAxis {
    pub axis: Axis,
    pub neg: bool,
}

impl SignedAxis {
    pub fn new(axis: Axis, neg: bool) -> Self {
        SignedAxis { axis, neg }
    }

    pub fn flipped(self) -> Self {
        SignedAxis { axis: self.axis, neg: !self.neg }
    }
}

/// Product of two distinct Pauli axes: a*b = (i^k) c with k in {1,3}.
/// Returns (k is 1, c); the caller folds the i powers.
fn axis_product(a: Axis, b: Axis) -> (bool, Axis) {
    match (a, b) {
        (Axis::X, Axis::Y) => (true, Axis::Z),
        (Axis::Y, Axis::Z) => (true, Axis::X),
        (Axis::Z, Axis::X) => (true, Axis::Y),
        (Axis::Y, Axis::X) => (false, Axis::Z),
        (Axis::Z, Axis::Y) => (false, Axis::X),
        (Axis::X, Axis::Z) => (false, Axis::Y),
        _ => panic!("axis product of equal axes is a phase, not an axis"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalClifford {
    x_img: SignedAxis,
    z_img: SignedAxis,
}

impl LocalClifford {
    pub const IDENTITY: LocalClifford = LocalClifford {
        x_img: SignedAxis { axis: Axis::X, neg: false },
        z_img: SignedAxis { axis: Axis::Z, neg: false },
    };
    pub const H: LocalClifford = LocalClifford {
        x_img: SignedAxis { axis: Axis::Z, neg: false },
        z_img: SignedAxis { axis: Axis::X, neg: false },
    };
    /// S = diag(1, i): X -> Y, Z -> Z.
    pub const S: LocalClifford = LocalClifford {
        x_img: SignedAxis { axis: Axis::Y, neg: false },
        z_img: SignedAxis { axis: Axis::Z, neg: false },
    };
    /// S dagger: X -> -Y.
    pub const SDG: LocalClifford = LocalClifford {
        x_img: SignedAxis { axis: Axis::Y, neg: true },
        z_img: SignedAxis { axis: Axis::Z, neg: false },
    };
    pub const X: LocalClifford = LocalClifford {
        x_img: SignedAxis { axis: Axis::X, neg: false },
        z_img: SignedAxis { axis: Axis::Z, neg: true },
    };
    pub const Y: LocalClifford = LocalClifford {
        x_img: SignedAxis { axis: Axis::X, neg: true },
        z_img: SignedAxis { axis: Axis::Z, neg: true },
    };
    pub const Z: LocalClifford = LocalClifford {
        x_img: SignedAxis { axis: Axis::X, neg: true },
        z_img: SignedAxis { axis: Axis::Z, neg: false },
    };
    /// sqrt(iY) = (I + iY)/sqrt(2): X -> Z, Z -> -X.
    pub const SQRT_IY: LocalClifford = LocalClifford {
        x_img: SignedAxis { axis: Axis::Z, neg: false },
        z_img: SignedAxis { axis: Axis::X, neg: true },
    };
    /// sqrt(-iY) = (I - iY)/sqrt(2): X -> -Z, Z -> X.
    pub const SQRT_MIY: LocalClifford = LocalClifford {
        x_img: SignedAxis { axis: Axis::Z, neg: true },
        z_img: SignedAxis { axis: Axis::X, neg: false },
    };

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Image of a signed Pauli under conjugation: U P U^dag.
    pub fn conjugate(&self, p: SignedAxis) -> SignedAxis {
        let base = match p.axis {
            Axis::X => self.x_img,
            Axis::Z => self.z_img,
            Axis::Y => {
                // Y = i X Z, so U Y U^dag = i (U X U^dag)(U Z U^dag)
                let (pos_i, axis) = axis_product(self.x_img.axis, self.z_img.axis);
                // i * (sign) * (+-i) * axis: i * i = -1, i * -i = +1
                let neg = pos_i ^ self.x_img.neg ^ self.z_img.neg;
                SignedAxis::new(axis, neg)
            }
        };
        if p.neg {
            base.flipped()
        } else {
            base
        }
    }

    /// `self` composed after `earlier`: the tableau of (self * earlier).
    pub fn after(&self, earlier: &LocalClifford) -> LocalClifford {
        LocalClifford {
            x_img: self.conjugate(earlier.x_img),
            z_img: self.conjugate(earlier.z_img),
        }
    }

    pub fn inverse(&self) -> LocalClifford {
        let mut x_img = None;
        let mut z_img = None;
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let img = self.conjugate(SignedAxis::new(axis, false));
            match img.axis {
                Axis::X => x_img = Some(SignedAxis::new(axis, img.neg)),
                Axis::Z => z_img = Some(SignedAxis::new(axis, img.neg)),
                Axis::Y => {}
            }
        }
        LocalClifford { x_img: x_img.unwrap(), z_img: z_img.unwrap() }
    }

    /// Builds the operator named by a word over {H, S}, applied left to
    /// right in execution order.
    pub fn from_word(word: &str) -> Option<LocalClifford> {
        let mut op = LocalClifford::IDENTITY;
        for ch in word.chars() {
            let gen = match ch {
                'H' => LocalClifford::H,
                'S' => LocalClifford::S,
                'I' => LocalClifford::IDENTITY,
                _ => return None,
            };
            op = gen.after(&op);
        }
        Some(op)
    }

    /// Shortest word over {H, S} (execution order) realizing this
    /// operator up to phase; ties break lexicographically. Identity is "I".
    pub fn word(&self) -> &'static str {
        &table()[self].0
    }

    /// A concrete unitary for this class, with the first nonzero entry
    /// made real positive.
    pub fn matrix(&self) -> Mat2 {
        table()[self].1
    }
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn canonical_phase(m: &Mat2) -> Mat2 {
    let mut out = *m;
    let first = [m[0][0], m[0][1], m[1][0], m[1][1]]
        .into_iter()
        .find(|c| c.norm() > 1e-9)
        .expect("unitary has a nonzero entry");
    let rot = first.conj() / first.norm();
    for row in &mut out {
        for cell in row.iter_mut() {
            *cell *= rot;
            if cell.norm() < 1e-12 {
                *cell = Complex64::new(0.0, 0.0);
            }
        }
    }
    out
}

type WordTable = HashMap<LocalClifford, (String, Mat2)>;

/// Breadth-first enumeration of the 24 classes from {H, S}.
fn table() -> &'static WordTable {
    static TABLE: OnceLock<WordTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let inv = 1.0 / 2.0f64.sqrt();
        let h: Mat2 = [
            [Complex64::new(inv, 0.0), Complex64::new(inv, 0.0)],
            [Complex64::new(inv, 0.0), Complex64::new(-inv, 0.0)],
        ];
        let s: Mat2 = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
        ];
        let eye: Mat2 = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        let mut map: WordTable = HashMap::new();
        map.insert(LocalClifford::IDENTITY, ("I".to_string(), eye));
        let mut frontier = vec![(LocalClifford::IDENTITY, String::new(), eye)];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (op, word, mat) in frontier {
                for (ch, gen, gen_mat) in
                    [('H', LocalClifford::H, h), ('S', LocalClifford::S, s)]
                {
                    let op2 = gen.after(&op);
                    let word2 = format!("{word}{ch}");
                    let mat2 = canonical_phase(&mat_mul(&gen_mat, &mat));
                    match map.get(&op2) {
                        Some((existing, _))
                            if existing.len() < word2.len()
                                || (existing.len() == word2.len() && *existing <= word2) => {}
                        _ => {
                            map.insert(op2, (word2.clone(), mat2));
                            next.push((op2, word2, mat2));
                        }
                    }
                }
            }
            frontier = next;
        }
        assert_eq!(map.len(), 24, "single-qubit Clifford group has 24 classes");
        map
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conj_by_matrix(m: &Mat2, p: &Mat2) -> Mat2 {
        // U P U^dag
        let dag: Mat2 = [
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ];
        mat_mul(&mat_mul(m, p), &dag)
    }

    fn pauli_matrix(a: Axis) -> Mat2 {
        let z = Complex64::new(0.0, 0.0);
        match a {
            Axis::X => [[z, Complex64::new(1.0, 0.0)], [Complex64::new(1.0, 0.0), z]],
            Axis::Y => [[z, Complex64::new(0.0, -1.0)], [Complex64::new(0.0, 1.0), z]],
            Axis::Z => [
                [Complex64::new(1.0, 0.0), z],
                [z, Complex64::new(-1.0, 0.0)],
            ],
        }
    }

    fn assert_mat_close(a: &Mat2, b: &Mat2) {
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - b[i][j]).norm() < 1e-9, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn generators_have_expected_images() {
        let x = SignedAxis::new(Axis::X, false);
        let y = SignedAxis::new(Axis::Y, false);
        let z = SignedAxis::new(Axis::Z, false);
        assert_eq!(LocalClifford::H.conjugate(x), z);
        assert_eq!(LocalClifford::H.conjugate(z), x);
        assert_eq!(LocalClifford::H.conjugate(y), y.flipped());
        assert_eq!(LocalClifford::S.conjugate(x), y);
        assert_eq!(LocalClifford::S.conjugate(y), x.flipped());
        assert_eq!(LocalClifford::SQRT_IY.conjugate(x), z);
        assert_eq!(LocalClifford::SQRT_IY.conjugate(z), x.flipped());
    }

    #[test]
    fn composition_and_inverse_close_the_group() {
        let s4 = LocalClifford::S
            .after(&LocalClifford::S)
            .after(&LocalClifford::S)
            .after(&LocalClifford::S);
        assert!(s4.is_identity());
        assert_eq!(LocalClifford::S.after(&LocalClifford::S), LocalClifford::Z);
        assert!(LocalClifford::H.after(&LocalClifford::H).is_identity());
        for op in table().keys() {
            assert!(op.after(&op.inverse()).is_identity());
            assert!(op.inverse().after(op).is_identity());
        }
    }

    #[test]
    fn tableau_matches_matrix_conjugation_for_all_classes() {
        for (op, (word, mat)) in table() {
            assert_eq!(&LocalClifford::from_word(word).unwrap(), op, "word {word}");
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                let img = op.conjugate(SignedAxis::new(axis, false));
                let mut want = pauli_matrix(img.axis);
                if img.neg {
                    for row in &mut want {
                        for c in row.iter_mut() {
                            *c = -*c;
                        }
                    }
                }
                assert_mat_close(&conj_by_matrix(mat, &pauli_matrix(axis)), &want);
            }
        }
    }

    #[test]
    fn words_are_canonical() {
        assert_eq!(LocalClifford::IDENTITY.word(), "I");
        assert_eq!(LocalClifford::H.word(), "H");
        assert_eq!(LocalClifford::S.word(), "S");
        // 24 distinct classes, all reachable
        assert_eq!(table().len(), 24);
    }
}
