use std::f64::consts::FRAC_PI_4;

use cavity_collective::experiments::{sweep_collective_scaling, RunConfig};
use cavity_collective::{ModeDims, ModelParams, StateRecipe};

fn sweep(recipe: StateRecipe, dims: ModeDims) -> cavity_collective::experiments::ScalingReport {
    let config = RunConfig {
        params: ModelParams::new(2, 0.05, dims),
        recipe,
        ..RunConfig::default()
    };
    sweep_collective_scaling(&config, &[2, 3, 4, 5]).unwrap()
}

#[test]
fn slope_is_insensitive_to_the_phonon_cutoff() {
    // with b truncated at 2 levels the Pairing phonon sits on the top level,
    // which moves the N-independent intercept but not the slope
    let narrow = sweep(StateRecipe::pairing(FRAC_PI_4), ModeDims { a: 2, b: 2, c: 3 });
    let wide = sweep(StateRecipe::pairing(FRAC_PI_4), ModeDims { a: 2, b: 3, c: 3 });
    assert!((narrow.fit.slope - wide.fit.slope).abs() < 1e-12);
    assert!((narrow.fit.slope + 0.025).abs() < 1e-12);
    assert!((narrow.fit.intercept + 0.025).abs() < 1e-12);
    assert!((wide.fit.intercept - 0.075).abs() < 1e-12);
}

#[test]
fn both_recipes_agree_on_the_measured_sign() {
    for dims in [ModeDims { a: 2, b: 2, c: 3 }, ModeDims { a: 2, b: 3, c: 3 }] {
        let ex = sweep(StateRecipe::exchange(FRAC_PI_4), dims);
        let pa = sweep(StateRecipe::pairing(FRAC_PI_4), dims);
        assert_eq!(ex.measured_sign, 1.0);
        assert_eq!(pa.measured_sign, 1.0);
        assert!(ex.fit.max_residual < 1e-12 && pa.fit.max_residual < 1e-12);
    }
}
