use crate::error::{Error, Result};

fn check_len(original: &[u8], decoded: &[u8]) -> Result<()> {
    if original.len() != decoded.len() {
        return Err(Error::DimensionMismatch { expected: original.len(), actual: decoded.len() });
    }
    Ok(())
}

/// Percentage of decoded bits that differ from the original word.
pub fn compute_ber(original: &[u8], decoded: &[u8]) -> Result<f64> {
    check_len(original, decoded)?;
    if original.is_empty() {
        return Ok(0.0);
    }
    let wrong = original.iter().zip(decoded).filter(|(a, b)| a != b).count();
    Ok(wrong as f64 / original.len() as f64 * 100.0)
}

/// Bit errors in each consecutive section of `section_size` bits. The last
/// section may be shorter.
pub fn error_profile(original: &[u8], decoded: &[u8], section_size: usize) -> Result<Vec<usize>> {
    check_len(original, decoded)?;
    if section_size == 0 {
        return Err(Error::InvalidParameter("section size must be positive".into()));
    }
    Ok(original
        .chunks(section_size)
        .zip(decoded.chunks(section_size))
        .map(|(a, b)| a.iter().zip(b).filter(|(x, y)| x != y).count())
        .collect())
}

/// Section-wise mean over several profiles of equal length.
pub fn mean_profile(profiles: &[Vec<usize>]) -> Vec<f64> {
    let Some(len) = profiles.iter().map(Vec::len).max() else {
        return Vec::new();
    };
    let mut sum = vec![0.0; len];
    for p in profiles {
        for (s, &e) in sum.iter_mut().zip(p) {
            *s += e as f64;
        }
    }
    sum.iter().map(|s| s / profiles.len() as f64).collect()
}

/// Spearman rank correlation between section index and value, ties given
/// their average rank. `None` for fewer than two points or a constant series.
pub fn trend(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let ranks = average_ranks(values);
    let idx: Vec<f64> = (0..n).map(|i| i as f64).collect();
    pearson(&idx, &ranks)
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}
