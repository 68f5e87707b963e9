use super::EnvSpec;

/// Mean of every full window of `window` consecutive returns.
pub fn window_means(returns: &[f64], window: usize) -> Vec<f64> {
    if window == 0 || returns.len() < window {
        return Vec::new();
    }
    returns
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect()
}

/// First index of the earliest window of `spec.solve_window` episodes whose
/// mean return reaches the threshold.
pub fn solved(returns: &[f64], spec: &EnvSpec) -> Option<usize> {
    window_means(returns, spec.solve_window)
        .iter()
        .position(|m| *m >= spec.solve_threshold)
}

#[cfg(test)]
mod tests {
    use super::super::spec_for;
    use super::*;

    #[test]
    fn first_qualifying_window() {
        let spec = spec_for("cartpole_v0").unwrap();
        assert_eq!(solved(&vec![200.0; 100], &spec), Some(0));
        assert_eq!(solved(&vec![200.0; 99], &spec), None);
        let mut returns = vec![0.0; 50];
        returns.extend(vec![200.0; 100]);
        // window at 48 holds 2 zeros and 98 × 200: mean 196
        assert_eq!(solved(&returns, &spec), Some(48));
        assert_eq!(window_means(&returns, 100)[47], 194.0);
        let mut returns = vec![10.0; 50];
        returns.extend(vec![200.0; 100]);
        // mean of the window at s is 105 + 1.9·s
        assert_eq!(solved(&returns, &spec), Some(48));
        assert_eq!(solved(&vec![195.0; 100], &spec), Some(0));
        assert_eq!(solved(&vec![194.9; 300], &spec), None);
    }

    #[test]
    fn negative_thresholds() {
        let spec = spec_for("mountain_car_v0").unwrap();
        assert_eq!(solved(&vec![-110.0; 100], &spec), Some(0));
        assert_eq!(solved(&vec![-111.0; 100], &spec), None);
        assert!(window_means(&[1.0, 2.0], 3).is_empty());
    }
}
