//! Small named arrays used as reference points.

use num_traits::One;

use crate::array::{Array, Rational};

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn from_layers(n: usize, layers: &[[[u8; 3]; 3]]) -> Array {
    // 0 -> 0, 1 -> 1, 2 -> 1/2
    let mut a = Array::zeros(n, 2);
    for (k, layer) in layers.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                match layer[i][j] {
                    1 => a.set(&[i, j, k], Rational::one()),
                    2 => a.set(&[i, j, k], half()),
                    _ => {}
                }
            }
        }
    }
    a
}

/// The smallest non-Latin vertex of the tristochastic polytope of order 3.
/// Layers `A(., ., k)`:
///
/// ```text
/// 1  0  0    0  ½  ½    0  ½  ½
/// 0  ½  ½    ½  ½  0    ½  0  ½
/// 0  ½  ½    ½  0  ½    ½  ½  0
/// ```
pub fn example_3x3x3() -> Array {
    from_layers(
        3,
        &[
            [[1, 0, 0], [0, 2, 2], [0, 2, 2]],
            [[0, 2, 2], [2, 2, 0], [2, 0, 2]],
            [[0, 2, 2], [2, 0, 2], [2, 2, 0]],
        ],
    )
}

/// Vertex of the hyperplane-stochastic polytope of order 2 outside the 0/1
/// vertices: layers `[[½,0],[0,½]]` and `[[0,½],[½,0]]`.
pub fn sigma_example_2x2x2() -> Array {
    let mut a = Array::zeros(2, 2);
    for (i, j, k) in [(0, 0, 0), (1, 1, 0), (0, 1, 1), (1, 0, 1)] {
        a.set(&[i, j, k], half());
    }
    a
}

/// The order-2 tristochastic array with every entry `1/2`.
pub fn all_half() -> Array {
    crate::array::PolytopeSpec::omega(2, 2).barycenter()
}
