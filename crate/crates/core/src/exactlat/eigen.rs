//! Exact eigen-data of a hyperbolic positive matrix: the expanding
//! eigenvalue in its quadratic field, the stable/unstable eigenvectors,
//! and the basis change used by the shadowing solver.

use super::matrix::IntMatrix2;
use super::quad::QuadNumber;
use crate::rational::Rat;
use crate::Result;
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone)]
pub struct EigenData {
    /// Discriminant `trace^2 - 4` (kept as-is, not reduced to squarefree).
    pub delta: BigInt,
    /// Expanding eigenvalue `(t + sqrt(t^2 - 4)) / 2 > 1`.
    pub lambda: QuadNumber,
    /// Contracting eigenvalue, the exact inverse of `lambda`.
    pub lambda_inv: QuadNumber,
    /// Unstable eigenvector, normalized to first coordinate 1.
    pub v_u: [QuadNumber; 2],
    /// Stable eigenvector, normalized to first coordinate 1.
    pub v_s: [QuadNumber; 2],
    /// Basis-change matrix `B = [v_u | v_s]` (columns).
    pub basis: [[QuadNumber; 2]; 2],
    /// Exact inverse of `B`: eigenbasis coordinates of a vector.
    pub basis_inv: [[QuadNumber; 2]; 2],
}

impl EigenData {
    /// Requires `det = 1` and `trace > 2`; rejected otherwise.
    pub fn for_matrix(a: &IntMatrix2) -> Result<Self> {
        a.require_hyperbolic_positive()?;
        let t = a.trace();
        let delta = &t * &t - BigInt::from(4);
        let half = Rat::new(BigInt::from(1), BigInt::from(2));
        let lambda = QuadNumber::new(
            Rat::new(t.clone(), BigInt::from(2)),
            half.clone(),
            delta.clone(),
        );
        let lambda_inv = QuadNumber::new(Rat::new(t, BigInt::from(2)), -half, delta.clone());
        debug_assert!(
            (&lambda * &lambda_inv) == QuadNumber::one(delta.clone()),
            "lambda * lambda_inv must be exactly 1"
        );

        // eigenvector (1, (mu - a) / b); b = 0 cannot occur for det 1 and
        // trace > 2 (the matrix would be triangular with trace +-2)
        assert!(
            !a.b.is_zero(),
            "hyperbolic positive matrices have nonzero upper-right entry"
        );
        let slope = |mu: &QuadNumber| -> QuadNumber {
            let a11 = QuadNumber::from_rat(Rat::from_integer(a.a.clone()), delta.clone());
            let b = QuadNumber::from_rat(Rat::from_integer(a.b.clone()), delta.clone());
            &(mu - &a11) / &b
        };
        let one = QuadNumber::one(delta.clone());
        let v_u = [one.clone(), slope(&lambda)];
        let v_s = [one.clone(), slope(&lambda_inv)];

        // B = [[1, 1], [su, ss]], det B = ss - su
        let det_b = &v_s[1] - &v_u[1];
        let basis = [
            [v_u[0].clone(), v_s[0].clone()],
            [v_u[1].clone(), v_s[1].clone()],
        ];
        let basis_inv = [
            [&v_s[1] / &det_b, &(-&v_s[0]) / &det_b],
            [&(-&v_u[1]) / &det_b, &v_u[0] / &det_b],
        ];

        let data = Self {
            delta,
            lambda,
            lambda_inv,
            v_u,
            v_s,
            basis,
            basis_inv,
        };
        debug_assert!(data.check_eigen_identities());
        Ok(data)
    }

    fn check_eigen_identities(&self) -> bool {
        let id = |r: usize, c: usize| -> QuadNumber {
            let mut acc = QuadNumber::zero(self.delta.clone());
            for k in 0..2 {
                acc = &acc + &(&self.basis[r][k] * &self.basis_inv[k][c]);
            }
            acc
        };
        id(0, 0) == QuadNumber::one(self.delta.clone())
            && id(1, 1) == QuadNumber::one(self.delta.clone())
            && id(0, 1).is_zero()
            && id(1, 0).is_zero()
    }

    /// Verify `A v = mu v` exactly for both eigenpairs.
    pub fn verify_against(&self, a: &IntMatrix2) -> bool {
        let mul = |v: &[QuadNumber; 2]| -> [QuadNumber; 2] {
            let lift = |n: &BigInt| QuadNumber::from_rat(Rat::from_integer(n.clone()), self.delta.clone());
            [
                &(&lift(&a.a) * &v[0]) + &(&lift(&a.b) * &v[1]),
                &(&lift(&a.c) * &v[0]) + &(&lift(&a.d) * &v[1]),
            ]
        };
        let au = mul(&self.v_u);
        let as_ = mul(&self.v_s);
        au[0] == &self.lambda * &self.v_u[0]
            && au[1] == &self.lambda * &self.v_u[1]
            && as_[0] == &self.lambda_inv * &self.v_s[0]
            && as_[1] == &self.lambda_inv * &self.v_s[1]
    }

    /// Eigenbasis coordinates `(c_u, c_s)` of a rational vector.
    pub fn decompose(&self, x: &Rat, y: &Rat) -> (QuadNumber, QuadNumber) {
        let qx = QuadNumber::from_rat(x.clone(), self.delta.clone());
        let qy = QuadNumber::from_rat(y.clone(), self.delta.clone());
        self.decompose_quad(&qx, &qy)
    }

    pub fn decompose_quad(&self, x: &QuadNumber, y: &QuadNumber) -> (QuadNumber, QuadNumber) {
        (
            &(&self.basis_inv[0][0] * x) + &(&self.basis_inv[0][1] * y),
            &(&self.basis_inv[1][0] * x) + &(&self.basis_inv[1][1] * y),
        )
    }

    /// Rebuild a vector from eigenbasis coordinates.
    pub fn compose(&self, cu: &QuadNumber, cs: &QuadNumber) -> [QuadNumber; 2] {
        [
            &(&self.v_u[0] * cu) + &(&self.v_s[0] * cs),
            &(&self.v_u[1] * cu) + &(&self.v_s[1] * cs),
        ]
    }

    /// Eigenbasis distortion in the sup norm:
    /// `max(|v_u|_inf, |v_s|_inf) * |B^{-1}|_inf` (operator norm, max
    /// absolute row sum). Both factors computed exactly.
    pub fn kappa(&self) -> QuadNumber {
        let vec_norm = |v: &[QuadNumber; 2]| -> QuadNumber {
            let a0 = v[0].abs();
            let a1 = v[1].abs();
            if a0 >= a1 {
                a0
            } else {
                a1
            }
        };
        let row_sum = |r: &[QuadNumber; 2]| -> QuadNumber { &r[0].abs() + &r[1].abs() };
        let vmax = {
            let nu = vec_norm(&self.v_u);
            let ns = vec_norm(&self.v_s);
            if nu >= ns {
                nu
            } else {
                ns
            }
        };
        let binv = {
            let r0 = row_sum(&self.basis_inv[0]);
            let r1 = row_sum(&self.basis_inv[1]);
            if r0 >= r1 {
                r0
            } else {
                r1
            }
        };
        &vmax * &binv
    }

    /// The published shadowing constant
    /// `C = kappa * (1/(lambda - 1) + 1/(1 - lambda^{-1}))`.
    pub fn shadowing_constant(&self) -> QuadNumber {
        let one = QuadNumber::one(self.delta.clone());
        let unstable = (&self.lambda - &one).inv();
        let stable = (&one - &self.lambda_inv).inv();
        &self.kappa() * &(&unstable + &stable)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn cat_map_eigen_data() {
        let a = IntMatrix2::cat_map();
        let e = EigenData::for_matrix(&a).unwrap();
        // lambda = (3 + sqrt 5)/2
        assert_eq!(e.delta, BigInt::from(5));
        assert_eq!(e.lambda, QuadNumber::new(rat(3, 2), rat(1, 2), BigInt::from(5)));
        assert!(e.verify_against(&a));
        // trace identity
        let sum = &e.lambda + &e.lambda_inv;
        assert_eq!(sum.to_rat().unwrap(), rat(3, 1));
    }

    #[test]
    fn trace_four_example() {
        // [[3,2],[1,1]]: trace 4, det 1, lambda = 2 + sqrt 3 with delta 12
        let a = IntMatrix2::new(3, 2, 1, 1);
        let e = EigenData::for_matrix(&a).unwrap();
        assert_eq!(e.delta, BigInt::from(12));
        // lambda = (4 + sqrt 12)/2 = 2 + sqrt(12)/2
        assert_eq!(e.lambda, QuadNumber::new(rat(2, 1), rat(1, 2), BigInt::from(12)));
        // lambda^2 - 4 lambda + 1 = 0
        let l2 = &e.lambda * &e.lambda;
        let four_l = &QuadNumber::from_int(4, BigInt::from(12)) * &e.lambda;
        let charpoly = &(&l2 - &four_l) + &QuadNumber::one(BigInt::from(12));
        assert!(charpoly.is_zero());
        assert!(e.verify_against(&a));
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(EigenData::for_matrix(&IntMatrix2::identity()).is_err());
        assert!(EigenData::for_matrix(&IntMatrix2::new(1, 1, 1, 0)).is_err());
        assert!(EigenData::for_matrix(&IntMatrix2::new(-2, -1, -1, -1)).is_err());
    }

    #[test]
    fn decompose_compose_roundtrip() {
        let e = EigenData::for_matrix(&IntMatrix2::cat_map()).unwrap();
        let (cu, cs) = e.decompose(&rat(3, 7), &rat(-2, 5));
        let back = e.compose(&cu, &cs);
        assert_eq!(back[0].to_rat().unwrap(), rat(3, 7));
        assert_eq!(back[1].to_rat().unwrap(), rat(-2, 5));
    }

    #[test]
    fn published_constant_for_cat_map() {
        let e = EigenData::for_matrix(&IntMatrix2::cat_map()).unwrap();
        // 1/(lambda-1) + 1/(1-lambda^{-1}) = sqrt 5 for the cat map
        let sum = &(&e.lambda - &QuadNumber::one(e.delta.clone())).inv()
            + &(&QuadNumber::one(e.delta.clone()) - &e.lambda_inv).inv();
        assert_eq!(sum, QuadNumber::sqrt_delta(BigInt::from(5)));
        let c = e.shadowing_constant();
        let cf = c.to_f64();
        assert!((cf - 4.236).abs() < 0.01, "C = {cf}");
    }
}
