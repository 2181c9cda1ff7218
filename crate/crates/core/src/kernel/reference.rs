//! A previously tabulated closed form of the kernel coefficient functions,
//! kept verbatim as a cross-check fixture.
//!
//! The tabulation is known to carry transcription defects: the a3 and a4
//! numerator rows are character-identical (one of them must be wrong), two
//! constants disagree between branches that should mirror each other, and two
//! monomial separators are ambiguous in the source (transcribed here as `+`).
//! Because of that, discrepancies between this table and the synthesized
//! kernel are reported as a diagnostic number and never asserted small. The
//! synthesized kernel is the authoritative one; it is gated by the
//! reproducing-property checks instead.

use crate::polynomial::Polynomial;

/// Denominators of the coefficient rows.
pub const ALPHAS: [f64; 7] = [
    292_354_444.0,
    1_169_417_776.0,
    10_524_759_984.0,
    42_099_039_936.0,
    70_165_066_560.0,
    210_495_199_680.0,
    1_473_466_397_760.0,
];

/// The sixteen tabulated coefficient functions a_i(s), b_i(s) as polynomials
/// in s, divided by their alpha denominators where applicable.
pub struct ReferenceKernelTable {
    pub a: [Polynomial; 8],
    pub b: [Polynomial; 8],
}

impl ReferenceKernelTable {
    pub fn new() -> Self {
        // numerators carry a leading factor s, i.e. row [c0..c6] means
        // s * (c0 + c1 s + ... + c6 s^6)
        let scaled = |row: [f64; 7], alpha: f64| {
            let mut coeffs = vec![0.0];
            coeffs.extend(row.iter().map(|c| c / alpha));
            Polynomial::new(coeffs)
        };
        let a = [
            Polynomial::constant(1.0),
            scaled(
                [9244.0, -6300.0, -50820.0, -12705.0, 205611.0, -203035.0, 58005.0],
                ALPHAS[0],
            ),
            scaled(
                [-25200.0, 2041264.0, -3024100.0, -756025.0, 2570499.0, -806113.0, 5.0],
                ALPHAS[1],
            ),
            scaled(
                [-1829520.0, -27216900.0, 72804784.0, 54887415.0, 11205561.0, -76873.0, 363.0],
                ALPHAS[2],
            ),
            scaled(
                [-1829520.0, -27216900.0, 72804784.0, 54887415.0, 11205561.0, -76873.0, 363.0],
                ALPHAS[3],
            ),
            scaled(
                [49346640.0, -138124504.0, 74703740.0, 18675935.0, -5054705.0, 462685.0, -9791.0],
                ALPHAS[4],
            ),
            scaled(
                [146169244.0, -145159740.0, -1537460.0, -384365.0, 1388055.0, -504739.0, 29005.0],
                ALPHAS[5],
            ),
            // a7 has no leading s factor
            Polynomial::new(
                [
                    -292354444.0,
                    292345200.0,
                    6300.0,
                    50820.0,
                    12705.0,
                    -205611.0,
                    203035.0,
                    -58005.0,
                ]
                .iter()
                .map(|c| c / ALPHAS[6])
                .collect(),
            ),
        ];
        let b = [
            // b0 = 1 - s^7 / 5040
            Polynomial::new(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0 / 5040.0]),
            scaled(
                [
                    9244.0,
                    -6300.0,
                    -50820.0,
                    -12705.0,
                    205611.0,
                    36542311.0 / 180.0,
                    58005.0,
                ],
                ALPHAS[0],
            ),
            scaled(
                [
                    -25200.0,
                    2041264.0,
                    -3024100.0,
                    -756025.0,
                    -34351126.0 / 15.0,
                    -806443.0,
                    5.0,
                ],
                ALPHAS[1],
            ),
            scaled(
                [-1829520.0, -27216900.0, 72804784.0, 18201196.0, 11205561.0, -76873.0, 363.0],
                ALPHAS[2],
            ),
            scaled(
                [-1829520.0, -27216900.0, 219549660.0, -54887415.0, 11205561.0, -76873.0, 363.0],
                ALPHAS[3],
            ),
            scaled(
                [49346640.0, 154229940.0, 74703740.0, 18675935.0, -5054705.0, 462685.0, 9791.0],
                ALPHAS[4],
            ),
            scaled(
                [-146185200.0, -145159740.0, -1537460.0, -384365.0, 1388055.0, -504739.0, 29005.0],
                ALPHAS[5],
            ),
            scaled(
                [292345200.0, 6300.0, 50820.0, 12705.0, -205611.0, 203035.0, -58005.0],
                ALPHAS[6],
            ),
        ];
        Self { a, b }
    }
}

impl Default for ReferenceKernelTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Evaluate the tabulated kernel at (t, s): the left branch when t <= s, the
/// right branch otherwise, differentiated `t_order` times in t.
pub fn reference_kernel_eval(t: f64, s: f64, t_order: usize) -> f64 {
    let table = ReferenceKernelTable::new();
    let coeffs = if t <= s { &table.a } else { &table.b };
    let mut acc = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        let poly = Polynomial::monomial(i);
        acc += c.eval(s, 0) * poly.eval(t, t_order);
    }
    acc
}
