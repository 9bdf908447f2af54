//! Class groups of quadratic fields through binary quadratic forms.

mod forms;
mod group;

pub use forms::{
    compose_forms, is_fundamental_discriminant, pow_form, reduce_form, reduced_forms_definite,
    reduced_forms_indefinite, rho, rho_cycles, QuadForm,
};
pub use group::{
    class_group, class_group_bounded, class_number_table, prime_discriminant_count, prime_form,
    torsion_count, torsion_with_class_number, trivial_bound_constant, FormClasses,
    QuadraticClassGroup, Sylow, DEFAULT_DISCRIMINANT_BOUND,
};
