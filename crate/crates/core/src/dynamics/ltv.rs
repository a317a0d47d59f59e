use crate::matrix::Matrix;
use crate::scalar::Real;

/// Planar linear time-varying system that rotates and contracts along one
/// moving direction.
///
/// `A(t) = ½ [[-3 + 3cos²t, 2 - 3 cos t sin t], [-2 - 3 cos t sin t, -3 + 3 sin²t]]`
/// with transition matrix `Φ(t, t0) = R(t) diag(1, e^{-3(t-t0)/2}) R(t0)ᵀ`,
/// `R(t) = [[cos t, sin t], [-sin t, cos t]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LtvRotation;

/// The rotation example.
pub fn ltv_rotation_example() -> LtvRotation {
    LtvRotation
}

fn rotation<S: Real>(t: S) -> Matrix<S> {
    let (s, c) = t.sin_cos();
    Matrix::from_vec(2, 2, vec![c, s, -s, c]).expect("finite")
}

impl LtvRotation {
    pub fn a<S: Real>(&self, t: S) -> Matrix<S> {
        let (s, c) = t.sin_cos();
        let half = S::lit(0.5);
        let three = S::lit(3.0);
        let two = S::lit(2.0);
        Matrix::from_vec(
            2,
            2,
            vec![
                half * (-three + three * c * c),
                half * (two - three * c * s),
                half * (-two - three * c * s),
                half * (-three + three * s * s),
            ],
        )
        .expect("finite")
    }

    pub fn field<S: Real>(&self, t: S, x: &[S]) -> Vec<S> {
        self.a(t).mul_vec(x)
    }

    pub fn transition<S: Real>(&self, t: S, t0: S) -> Matrix<S> {
        let d = Matrix::from_diag(&[S::one(), (S::lit(-1.5) * (t - t0)).exp()]);
        &(&rotation(t) * &d) * &rotation(t0).transpose()
    }

    /// Initial condition at `t0` whose solution decays like `e^{-3(t-t0)/2}`.
    pub fn contracting_direction<S: Real>(&self, t0: S) -> Vec<S> {
        let (s, c) = t0.sin_cos();
        vec![s, c]
    }
}
