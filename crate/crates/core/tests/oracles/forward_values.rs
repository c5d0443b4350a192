// generated by tests/oracles/gen_forward.py
/// (alpha, lambda_n, t, intensity tag, value); tags: 0 = 2e^t, 1 = 5 sin t, 2 = 1
pub const DUHAMEL: &[(f64, (f64, f64), f64, u8, (f64, f64))] = &[
    (1.5, (-5.075430029543422, 0.0), 0.3, 0, (0.23463355361721097, 0.0)),
    (1.5, (-5.075430029543422, 0.0), 0.3, 1, (0.06576979615233415, 0.0)),
    (1.5, (-5.075430029543422, 0.0), 0.3, 2, (0.102824824207709, 0.0)),
    (1.5, (-5.075430029543422, 0.0), 1.0, 0, (0.9706436289124458, 0.0)),
    (1.5, (-5.075430029543422, 0.0), 1.0, 1, (0.7227577252041516, 0.0)),
    (1.5, (-5.075430029543422, 0.0), 1.0, 2, (0.25617443006782337, 0.0)),
    (1.5, (-99.71783788540219, 21.304247554142517), 0.3, 0, (0.02472026372851705, 0.005346233404197625)),
    (1.5, (-99.71783788540219, 21.304247554142517), 0.3, 1, (0.013843556754849436, 0.0029796556977632845)),
    (1.5, (-99.71783788540219, 21.304247554142517), 0.3, 2, (0.009145283941575377, 0.0019999686665881046)),
    (1.5, (-99.71783788540219, 21.304247554142517), 1.0, 0, (0.051691955849940976, 0.010936419131528832)),
    (1.5, (-99.71783788540219, 21.304247554142517), 1.0, 1, (0.04039465755621952, 0.0086401347280324)),
    (1.5, (-99.71783788540219, 21.304247554142517), 1.0, 2, (0.00961534562805989, 0.0020581630460756034)),
];
/// (beta, nodes, i, j, S_ij) with 1-based interior indices
pub const STIFFNESS: &[(f64, &[f64], usize, usize, f64)] = &[
    (1.5, &[0.0, 0.25, 0.5, 0.75, 1.0], 1, 1, -1.7626379002274513),
    (1.5, &[0.0, 0.25, 0.5, 0.75, 1.0], 1, 2, 1.50450555612735),
    (1.5, &[0.0, 0.25, 0.5, 0.75, 1.0], 2, 1, -0.1768637699169752),
    (1.5, &[0.0, 0.25, 0.5, 0.75, 1.0], 3, 1, 0.2797674084142168),
    (1.5, &[0.0, 0.25, 0.5, 0.75, 1.0], 1, 3, 0.0),
    (1.5, &[0.0, 0.0625, 0.25, 0.5625, 1.0], 1, 1, -2.9369986862797037),
    (1.5, &[0.0, 0.0625, 0.25, 0.5625, 1.0], 1, 2, 1.737253375654826),
    (1.5, &[0.0, 0.0625, 0.25, 0.5625, 1.0], 2, 1, -0.3818840840872783),
    (1.5, &[0.0, 0.0625, 0.25, 0.5625, 1.0], 3, 1, 0.2410293115534509),
    (1.5, &[0.0, 0.0625, 0.25, 0.5625, 1.0], 1, 3, 0.0),
    (1.3, &[0.0, 0.25, 0.5, 0.75, 1.0], 1, 1, -0.7369062231777747),
    (1.3, &[0.0, 0.25, 0.5, 0.75, 1.0], 1, 2, 0.9812458439895632),
    (1.3, &[0.0, 0.25, 0.5, 0.75, 1.0], 2, 1, -0.5132215061474651),
    (1.3, &[0.0, 0.25, 0.5, 0.75, 1.0], 3, 1, 0.15512460503437414),
    (1.3, &[0.0, 0.25, 0.5, 0.75, 1.0], 1, 3, 0.0),
];
