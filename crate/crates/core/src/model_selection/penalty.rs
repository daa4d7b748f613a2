use crate::error::{Error, Result};

/// `Σ_k | |C_k|/N − 1/K |`, zero exactly when all clusters have equal size.
pub fn imbalance_sum(sizes: &[usize]) -> f64 {
    let n: usize = sizes.iter().sum();
    let k = sizes.len() as f64;
    sizes
        .iter()
        .map(|&s| (s as f64 / n as f64 - 1.0 / k).abs())
        .sum()
}

/// Size-imbalance penalty `λ · (σ/μ) · Σ_k | |C_k|/N − 1/K |`, where σ is the
/// population standard deviation of the cluster sizes and μ their mean.
pub fn balance_penalty(sizes: &[usize], lambda: f64) -> Result<f64> {
    if sizes.is_empty() {
        return Err(Error::invalid("cluster size list is empty"));
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::invalid(format!("cluster {i} is empty")));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("lambda {lambda} outside [0, 1]")));
    }
    if sizes.iter().all(|&s| s == sizes[0]) {
        return Ok(0.0);
    }
    let k = sizes.len() as f64;
    let mean = sizes.iter().sum::<usize>() as f64 / k;
    let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / k;
    let cv = var.sqrt() / mean;
    Ok(lambda * cv * imbalance_sum(sizes))
}
