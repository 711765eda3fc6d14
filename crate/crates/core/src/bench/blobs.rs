use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::{ExpressionMatrix, LabelVector};
use crate::error::{Error, Result};

/// Every center coordinate is at least this far from zero so unit-variance
/// noise is rarely clipped.
const CENTER_OFFSET: f64 = 3.0;
const ATTEMPTS_PER_CENTER: usize = 1000;

/// Gaussian blobs on the nonnegative orthant.
///
/// Class centers are `CENTER_OFFSET + U[0, 2 * separation]^dim`, redrawn
/// until all pairwise center distances reach `separation` (the box grows if
/// that takes too long). Each cell is its center plus standard normal
/// noise, clipped at zero. Cells are ordered class by class; genes are
/// rows.
pub fn generate_blobs(
    classes: usize,
    per_class: usize,
    dim: usize,
    separation: f64,
    seed: u64,
) -> Result<(ExpressionMatrix, LabelVector)> {
    if classes == 0 || per_class == 0 || dim == 0 {
        return Err(Error::OutOfRange("blob counts must be at least 1".into()));
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::OutOfRange(format!("separation = {separation}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut width = 2.0 * separation;
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(classes);
    let mut failures = 0;
    while centers.len() < classes {
        let c: Vec<f64> = (0..dim)
            .map(|_| {
                CENTER_OFFSET
                    + if width > 0.0 {
                        rng.random_range(0.0..width)
                    } else {
                        0.0
                    }
            })
            .collect();
        let far_enough = centers.iter().all(|o| {
            o.iter()
                .zip(&c)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                >= separation
        });
        if far_enough {
            centers.push(c);
            failures = 0;
        } else {
            failures += 1;
            if failures >= ATTEMPTS_PER_CENTER {
                width *= 1.1;
                failures = 0;
            }
        }
    }

    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let m = classes * per_class;
    let mut values = Array2::zeros((dim, m));
    let mut labels = Vec::with_capacity(m);
    for (l, center) in centers.iter().enumerate() {
        for k in 0..per_class {
            let j = l * per_class + k;
            for (g, &mu) in center.iter().enumerate() {
                values[[g, j]] = (mu + noise.sample(&mut rng)).max(0.0);
            }
            labels.push(format!("blob{l}"));
        }
    }
    if m < 2 {
        return Err(Error::Shape(
            "blobs need at least two cells in total".into(),
        ));
    }
    Ok((
        ExpressionMatrix::from_values(values)?,
        LabelVector::new(labels)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::filter_rare_classes;

    #[test]
    fn shape_and_nonnegativity() {
        let (x, y) = generate_blobs(3, 50, 30, 10.0, 1).unwrap();
        assert_eq!((x.n_genes(), x.n_cells()), (30, 150));
        assert_eq!(y.num_classes(), 3);
        assert!(x.values().iter().all(|v| *v >= 0.0));
        let again = generate_blobs(3, 50, 30, 10.0, 1).unwrap();
        assert_eq!(again.0, x);
    }

    #[test]
    fn single_class_filtering() {
        let (x, y) = generate_blobs(1, 15, 4, 10.0, 2).unwrap();
        assert!(filter_rare_classes(&x, &y, 15).is_ok());
        let (x, y) = generate_blobs(1, 14, 4, 10.0, 2).unwrap();
        assert!(filter_rare_classes(&x, &y, 15).is_err());
    }

    #[test]
    fn zero_separation_centers_coincide() {
        let (x, _) = generate_blobs(2, 200, 5, 0.0, 3).unwrap();
        let mean = |range: std::ops::Range<usize>| -> f64 {
            range
                .clone()
                .map(|j| x.values().column(j).sum())
                .sum::<f64>()
                / range.len() as f64
        };
        assert!((mean(0..200) - mean(200..400)).abs() < 0.5);
    }
}
