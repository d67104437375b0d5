#[path = "support/properties.rs"]
mod properties;

macro_rules! suite {
    ($name:ident) => {
        #[test]
        fn $name() {
            if let Err(e) = properties::$name() {
                panic!("{e}");
            }
        }
    };
}

suite!(expr_ring_laws);
suite!(partial_is_derivation);
suite!(substitute_is_additive);
suite!(total_derivatives_commute);
suite!(euler_annihilates_divergences);
suite!(homotopy_round_trip);
suite!(evolutionary_commutation);
suite!(characteristic_consistency);
suite!(reduction_laws);
suite!(generic_self_adjointness);
suite!(modified_lagrangian_identities);
suite!(k_extraction_soundness);
suite!(extension_soundness);
suite!(noether_residuals_vanish);
