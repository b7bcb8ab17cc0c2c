//! Small vector helpers used by the update rules.

/// Squared Euclidean norm.
pub fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    norm_sq(v).sqrt()
}

/// Squared Euclidean distance between two equal-length vectors.
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `out += c * v`, elementwise.
pub fn axpy(out: &mut [f64], c: f64, v: &[f64]) {
    for (o, x) in out.iter_mut().zip(v) {
        *o += c * x;
    }
}

/// True iff every component is finite.
pub fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist_sq_matches_norm_of_difference() {
        let a = [1.0, -2.0, 3.0];
        let b = [0.5, 0.5, 0.5];
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        assert_eq!(dist_sq(&a, &b), norm_sq(&diff));
    }
}
