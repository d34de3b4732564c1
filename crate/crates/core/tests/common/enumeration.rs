use qin_core::chain::LinkSnapshot;

/// Window success probability summed over every pattern of slot outcomes
/// that contains at least one success.
pub fn window_success(link: &LinkSnapshot, modes: u32, slot_s: f64) -> f64 {
    assert!(modes <= 20, "2^{modes} patterns is too many to enumerate");
    let p: Vec<f64> = (1..=modes).map(|k| link.slot_success(k as f64 * slot_s)).collect();
    (1u32..1 << modes)
        .map(|pattern| {
            p.iter()
                .enumerate()
                .map(|(k, &pk)| if pattern >> k & 1 == 1 { pk } else { 1.0 - pk })
                .product::<f64>()
        })
        .sum()
}
