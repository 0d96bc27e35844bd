mod common;

#[test]
fn rank_nullity() {
    common::rank_nullity(common::CASES).unwrap();
}

#[test]
fn rref_is_idempotent() {
    common::rref_is_idempotent(common::CASES).unwrap();
}

#[test]
fn hom_duality_dims() {
    common::hom_duality_dims(common::CASES).unwrap();
}

#[test]
fn twist_adjunction_dims() {
    common::twist_adjunction_dims(common::CASES).unwrap();
}

#[test]
fn constructors_preserve_square_zero() {
    common::constructors_preserve_square_zero(common::CASES).unwrap();
}

#[test]
fn twist_and_tilt_preserve_square_zero() {
    common::twist_and_tilt_preserve_square_zero(common::CASES).unwrap();
}

#[test]
fn minimize_is_idempotent() {
    common::minimize_is_idempotent(common::CASES).unwrap();
}
