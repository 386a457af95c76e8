//! Published operating-characteristic scenarios: the row definitions used
//! by the reproduction command and the acceptance suite.
//!
//! Every row records the published total sample sizes, solved regional
//! fractions, and empirical consistency probabilities, so reproduction runs
//! can be checked field by field.

// literal row tuples below mirror the published table layout
#![allow(clippy::type_complexity)]

use crate::design::Endpoint;

/// One-study scenario row (criterion I).
#[derive(Debug, Clone, Copy)]
pub struct OneStudyRow {
    pub power: f64,
    pub endpoint: Endpoint,
    pub n_total: u64,
    pub fraction: f64,
    pub published_cp: f64,
}

/// Two-study scenario row with a common regional fraction (criterion I).
#[derive(Debug, Clone, Copy)]
pub struct TwoStudyEqualRow {
    pub power: f64,
    pub endpoint1: Endpoint,
    pub endpoint2: Endpoint,
    pub n1: u64,
    pub n2: u64,
    pub fraction: f64,
    pub published_cp: f64,
}

/// Two-study scenario row with distinct regional fractions (criterion I).
#[derive(Debug, Clone, Copy)]
pub struct TwoStudyPairRow {
    pub power: f64,
    pub endpoint1: Endpoint,
    pub endpoint2: Endpoint,
    pub n1: u64,
    pub n2: u64,
    pub f1: f64,
    pub f2: f64,
    pub published_cp: f64,
}

fn binary(p_t: f64, p_c: f64) -> Endpoint {
    Endpoint::Binary { p_t, p_c }
}

fn normal(d: f64) -> Endpoint {
    Endpoint::Normal {
        sigma2_t: 16.0,
        sigma2_c: 16.0,
        d,
    }
}

/// Binary one-study rows: alpha 0.025 one-sided, pi 0.5, target 0.8.
pub fn table1() -> Vec<OneStudyRow> {
    let rows: [(f64, f64, f64, u64, f64, f64); 22] = [
        (0.8, 0.10, 0.5, 770, 0.230, 0.803),
        (0.8, 0.10, 0.6, 708, 0.230, 0.797),
        (0.8, 0.10, 0.7, 582, 0.230, 0.808),
        (0.8, 0.10, 0.8, 394, 0.230, 0.804),
        (0.8, 0.15, 0.5, 334, 0.230, 0.800),
        (0.8, 0.15, 0.6, 300, 0.230, 0.809),
        (0.8, 0.15, 0.7, 236, 0.230, 0.800),
        (0.8, 0.15, 0.8, 146, 0.230, 0.784),
        (0.8, 0.20, 0.5, 182, 0.230, 0.808),
        (0.8, 0.20, 0.6, 158, 0.230, 0.804),
        (0.8, 0.20, 0.7, 118, 0.230, 0.788),
        (0.9, 0.10, 0.5, 1030, 0.201, 0.802),
        (0.9, 0.10, 0.6, 946, 0.201, 0.807),
        (0.9, 0.10, 0.7, 778, 0.201, 0.803),
        (0.9, 0.10, 0.8, 526, 0.201, 0.792),
        (0.9, 0.15, 0.5, 446, 0.201, 0.800),
        (0.9, 0.15, 0.6, 400, 0.201, 0.808),
        (0.9, 0.15, 0.7, 316, 0.201, 0.807),
        (0.9, 0.15, 0.8, 194, 0.201, 0.786),
        (0.9, 0.20, 0.5, 242, 0.201, 0.805),
        (0.9, 0.20, 0.6, 212, 0.201, 0.804),
        (0.9, 0.20, 0.7, 158, 0.201, 0.793),
    ];
    rows.into_iter()
        .map(|(power, d, p_c, n, f, cp)| OneStudyRow {
            power,
            endpoint: binary(p_c + d, p_c),
            n_total: n,
            fraction: f,
            published_cp: cp,
        })
        .collect()
}

/// Continuous one-study rows: variance 16 in both arms, alpha 0.025.
pub fn table2() -> Vec<OneStudyRow> {
    let rows: [(f64, f64, u64, f64, f64); 8] = [
        (0.8, 1.0, 504, 0.230, 0.801),
        (0.8, 1.25, 322, 0.230, 0.800),
        (0.8, 1.5, 224, 0.230, 0.802),
        (0.8, 2.0, 126, 0.230, 0.806),
        (0.9, 1.0, 674, 0.201, 0.797),
        (0.9, 1.25, 432, 0.201, 0.800),
        (0.9, 1.5, 300, 0.201, 0.809),
        (0.9, 2.0, 170, 0.201, 0.808),
    ];
    rows.into_iter()
        .map(|(power, d, n, f, cp)| OneStudyRow {
            power,
            endpoint: normal(d),
            n_total: n,
            fraction: f,
            published_cp: cp,
        })
        .collect()
}

/// Binary two-study rows, common fraction.
pub fn table3() -> Vec<TwoStudyEqualRow> {
    let rows: [(f64, f64, f64, f64, u64, u64, f64, f64); 12] = [
        (0.8, 0.10, 0.5, 0.5, 770, 770, 0.128, 0.808),
        (0.8, 0.10, 0.5, 0.8, 770, 394, 0.139, 0.804),
        (0.8, 0.10, 0.8, 0.8, 394, 394, 0.128, 0.801),
        (0.8, 0.15, 0.5, 0.5, 334, 334, 0.128, 0.806),
        (0.8, 0.15, 0.5, 0.8, 334, 146, 0.145, 0.794),
        (0.8, 0.15, 0.8, 0.8, 146, 146, 0.128, 0.803),
        (0.9, 0.10, 0.5, 0.5, 1030, 1030, 0.110, 0.805),
        (0.9, 0.10, 0.5, 0.8, 1030, 526, 0.120, 0.800),
        (0.9, 0.10, 0.8, 0.8, 526, 526, 0.110, 0.803),
        (0.9, 0.15, 0.5, 0.5, 446, 446, 0.110, 0.807),
        (0.9, 0.15, 0.5, 0.8, 446, 194, 0.125, 0.801),
        (0.9, 0.15, 0.8, 0.8, 194, 194, 0.110, 0.804),
    ];
    rows.into_iter()
        .map(|(power, d, pc1, pc2, n1, n2, f, cp)| TwoStudyEqualRow {
            power,
            endpoint1: binary(pc1 + d, pc1),
            endpoint2: binary(pc2 + d, pc2),
            n1,
            n2,
            fraction: f,
            published_cp: cp,
        })
        .collect()
}

/// Continuous two-study rows, common fraction.
pub fn table4() -> Vec<TwoStudyEqualRow> {
    let rows: [(f64, f64, f64, u64, u64, f64, f64); 8] = [
        (0.8, 1.0, 1.0, 504, 504, 0.128, 0.804),
        (0.8, 1.0, 2.0, 504, 126, 0.140, 0.805),
        (0.8, 1.5, 1.5, 224, 224, 0.128, 0.809),
        (0.8, 2.0, 2.0, 126, 126, 0.128, 0.814),
        (0.9, 1.0, 1.0, 674, 674, 0.110, 0.802),
        (0.9, 1.0, 2.0, 674, 170, 0.121, 0.794),
        (0.9, 1.5, 1.5, 300, 300, 0.110, 0.807),
        (0.9, 2.0, 2.0, 170, 170, 0.110, 0.812),
    ];
    rows.into_iter()
        .map(|(power, d1, d2, n1, n2, f, cp)| TwoStudyEqualRow {
            power,
            endpoint1: normal(d1),
            endpoint2: normal(d2),
            n1,
            n2,
            fraction: f,
            published_cp: cp,
        })
        .collect()
}

/// Binary two-study rows with unequal fraction pairs.
pub fn table5() -> Vec<TwoStudyPairRow> {
    let mut rows = Vec::new();
    let blocks: [(f64, f64, f64, u64, [(f64, f64, f64); 2]); 12] = [
        (
            0.8,
            0.10,
            0.5,
            770,
            [(0.100, 0.178, 0.806), (0.080, 0.320, 0.799)],
        ),
        (
            0.8,
            0.10,
            0.8,
            394,
            [(0.100, 0.178, 0.816), (0.080, 0.320, 0.804)],
        ),
        (
            0.8,
            0.15,
            0.5,
            334,
            [(0.100, 0.178, 0.807), (0.080, 0.320, 0.813)],
        ),
        (
            0.8,
            0.15,
            0.8,
            146,
            [(0.100, 0.178, 0.809), (0.080, 0.320, 0.800)],
        ),
        (
            0.8,
            0.20,
            0.5,
            182,
            [(0.100, 0.178, 0.809), (0.080, 0.320, 0.814)],
        ),
        (
            0.8,
            0.20,
            0.7,
            118,
            [(0.100, 0.178, 0.803), (0.080, 0.320, 0.800)],
        ),
        (
            0.9,
            0.10,
            0.5,
            1030,
            [(0.090, 0.141, 0.807), (0.080, 0.176, 0.811)],
        ),
        (
            0.9,
            0.10,
            0.8,
            526,
            [(0.090, 0.141, 0.805), (0.080, 0.176, 0.813)],
        ),
        (
            0.9,
            0.15,
            0.5,
            446,
            [(0.090, 0.141, 0.801), (0.080, 0.176, 0.799)],
        ),
        (
            0.9,
            0.15,
            0.8,
            194,
            [(0.090, 0.141, 0.796), (0.080, 0.176, 0.807)],
        ),
        (
            0.9,
            0.20,
            0.5,
            242,
            [(0.090, 0.141, 0.805), (0.080, 0.176, 0.797)],
        ),
        (
            0.9,
            0.20,
            0.7,
            158,
            [(0.090, 0.141, 0.817), (0.080, 0.176, 0.810)],
        ),
    ];
    for (power, d, p_c, n, pairs) in blocks {
        for (f1, f2, cp) in pairs {
            rows.push(TwoStudyPairRow {
                power,
                endpoint1: binary(p_c + d, p_c),
                endpoint2: binary(p_c + d, p_c),
                n1: n,
                n2: n,
                f1,
                f2,
                published_cp: cp,
            });
        }
    }
    rows
}

/// Continuous two-study rows with unequal fraction pairs.
pub fn table6() -> Vec<TwoStudyPairRow> {
    let mut rows = Vec::new();
    let blocks: [(f64, f64, u64, [(f64, f64, f64); 2]); 6] = [
        (
            0.8,
            1.0,
            504,
            [(0.100, 0.178, 0.808), (0.080, 0.320, 0.803)],
        ),
        (
            0.8,
            1.5,
            224,
            [(0.100, 0.178, 0.807), (0.080, 0.320, 0.798)],
        ),
        (
            0.8,
            2.0,
            126,
            [(0.100, 0.178, 0.810), (0.080, 0.320, 0.825)],
        ),
        (
            0.9,
            1.0,
            674,
            [(0.090, 0.141, 0.796), (0.080, 0.176, 0.800)],
        ),
        (
            0.9,
            1.5,
            300,
            [(0.090, 0.141, 0.807), (0.080, 0.176, 0.808)],
        ),
        (
            0.9,
            2.0,
            170,
            [(0.090, 0.141, 0.810), (0.080, 0.176, 0.802)],
        ),
    ];
    for (power, d, n, pairs) in blocks {
        for (f1, f2, cp) in pairs {
            rows.push(TwoStudyPairRow {
                power,
                endpoint1: normal(d),
                endpoint2: normal(d),
                n1: n,
                n2: n,
                f1,
                f2,
                published_cp: cp,
            });
        }
    }
    rows
}
