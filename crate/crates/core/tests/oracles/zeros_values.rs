// generated by tests/oracles/gen_zeros.py
pub const ZEROS: &[(f64, &[(f64, f64)])] = &[
    (1.3, &[(-4.518350255092916, 0.0), (-17.919602091053385, 3.921353437406966)]),
    (1.5, &[(-5.075430029543422, 0.0), (-17.4720154498219, 0.0), (-32.12947649928578, 0.0)]),
    (1.7, &[(-6.322306993391655, 0.0), (-22.57047412900658, 0.0), (-45.9449138723212, 0.0)]),
    (1.9, &[(-8.404229631878922, 0.0), (-32.25254946761449, 0.0), (-70.24701480050953, 0.0)]),
];
