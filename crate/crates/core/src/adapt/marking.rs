use crate::{FemError, Result};

/// Dörfler (bulk) marking on squared indicators `η_K²`.
///
/// Returns the shortest prefix of the elements sorted by decreasing `η_K²`
/// (ties broken by lower index) whose sum reaches `θ Σ_K η_K²`. The total is
/// accumulated in the same order, so `θ = 1` marks exactly the elements with
/// a positive indicator. All-zero input marks nothing.
pub fn dorfler_mark(eta_squared: &[f64], theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(FemError::InvalidArgument(format!("theta must lie in (0, 1], got {theta}")));
    }
    if let Some(bad) = eta_squared.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(FemError::InvalidArgument(format!("indicators must be finite and nonnegative, got {bad}")));
    }
    let mut order: Vec<usize> = (0..eta_squared.len()).collect();
    order.sort_by(|&a, &b| eta_squared[b].total_cmp(&eta_squared[a]).then(a.cmp(&b)));
    let total: f64 = order.iter().map(|&i| eta_squared[i]).sum();
    if total == 0.0 {
        return Ok(Vec::new());
    }
    let target = theta * total;
    let mut acc = 0.0;
    let mut marked = Vec::new();
    for i in order {
        if acc >= target {
            break;
        }
        acc += eta_squared[i];
        marked.push(i);
    }
    Ok(marked)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(dorfler_mark(&[4.0, 3.0, 2.0, 1.0], 0.5).unwrap(), vec![0, 1]);
        assert_eq!(dorfler_mark(&[1.0, 0.0, 2.0, 0.0, 3.0], 1.0).unwrap(), vec![4, 2, 0]);
        assert_eq!(dorfler_mark(&[5.0, 5.0], 0.5).unwrap(), vec![0]);
        assert_eq!(dorfler_mark(&[0.0, 0.0], 0.5).unwrap(), Vec::<usize>::new());
        assert_eq!(dorfler_mark(&[], 0.5).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(dorfler_mark(&[1.0], 0.0).is_err());
        assert!(dorfler_mark(&[1.0], 1.5).is_err());
        assert!(dorfler_mark(&[-1.0], 0.5).is_err());
        assert!(dorfler_mark(&[f64::NAN], 0.5).is_err());
    }
}
