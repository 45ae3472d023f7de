mod support;

use support::properties::{self as props, CASES};

#[test]
fn operator_linearity() {
    props::operator_linearity(CASES).unwrap();
}

#[test]
fn positivity_preservation() {
    props::positivity(CASES).unwrap();
}

#[test]
fn norm_homogeneity_and_triangle_inequality() {
    props::norm_axioms(CASES).unwrap();
}

#[test]
fn chord_symmetry() {
    props::chord_symmetry(CASES).unwrap();
}

#[test]
fn antipodal_classification_symmetry() {
    props::antipodal_classification(CASES).unwrap();
}
