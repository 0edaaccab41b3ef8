//! Ready-made complexes used by the test suites and the document generator.

use crate::complex::{validate, ComplexSpec, ConeId, MonoidalComplex, SpecData};
use crate::{Cone, Int};

fn iv(v: &[i32]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn ivs(vs: &[&[i32]]) -> Vec<Vec<Int>> {
    vs.iter().map(|v| iv(v)).collect()
}

/// Canonical id of the fan cone spanned by the given rays; panics when the
/// cone is not in the fan.
pub fn fan_cone(mc: &MonoidalComplex, rays: &[&[i32]]) -> ConeId {
    let d = mc.ambient_rank();
    let cone = Cone::from_generators(d, &ivs(rays), &[]);
    let id = ConeId::of(&cone);
    assert!(mc.fan().get(&id).is_some(), "cone {id} is not in the fan");
    id
}

/// The quadric cone: cone((1,0),(1,2)) with its saturated semigroup.
pub fn cusp_cone() -> MonoidalComplex {
    validate(ComplexSpec {
        ambient_rank: 2,
        characteristic: 0,
        maximal_cones: vec![(ivs(&[&[1, 0], &[1, 2]]), vec![])],
        data: SpecData::LatticeFamily(vec![]),
    })
    .expect("valid fixture")
}

/// The ray R+(1,0) of the cusp cone.
pub fn cusp_ray1(mc: &MonoidalComplex) -> ConeId {
    fan_cone(mc, &[&[1, 0]])
}

/// The ray R+(1,2) of the cusp cone.
pub fn cusp_ray2(mc: &MonoidalComplex) -> ConeId {
    fan_cone(mc, &[&[1, 2]])
}

/// Complete fan in Z^2 with three maximal cones and a single incidence
/// ratio of 1/2 around the facet cycle: not 2-orientable in characteristic
/// zero, 2-orientable in characteristic 3.
pub fn three_fan_half_ratio(characteristic: u64) -> MonoidalComplex {
    let r0: &[i32] = &[1, 0];
    let r1: &[i32] = &[-1, 1];
    let r2: &[i32] = &[-1, -1];
    validate(ComplexSpec {
        ambient_rank: 2,
        characteristic,
        maximal_cones: vec![
            (ivs(&[r0, r1]), vec![]),
            (ivs(&[r1, r2]), vec![]),
            (ivs(&[r2, r0]), vec![]),
        ],
        data: SpecData::LatticeFamily(vec![
            (ivs(&[r0, r1]), vec![], ivs(&[&[1, 0], &[0, 1]])),
            (ivs(&[r1, r2]), vec![], ivs(&[&[1, 0], &[0, 1]])),
            (ivs(&[r2, r0]), vec![], ivs(&[&[2, 0], &[1, 1]])),
            (ivs(&[r0]), vec![], ivs(&[&[2, 0]])),
            (ivs(&[r1]), vec![], ivs(&[&[-1, 1]])),
            (ivs(&[r2]), vec![], ivs(&[&[1, 1]])),
            (vec![], vec![], vec![]),
        ]),
    })
    .expect("valid fixture")
}

/// Two half-plane facets glued along the y-axis with incidence numbers 1
/// and 3 on the shared face.
pub fn two_facets_d13(characteristic: u64) -> MonoidalComplex {
    validate(ComplexSpec {
        ambient_rank: 2,
        characteristic,
        maximal_cones: vec![
            (ivs(&[&[1, 0], &[0, 1]]), vec![]),
            (ivs(&[&[-1, 0], &[0, 1]]), vec![]),
        ],
        data: SpecData::LatticeFamily(vec![
            (ivs(&[&[1, 0], &[0, 1]]), vec![], ivs(&[&[1, 0], &[0, 1]])),
            (ivs(&[&[-1, 0], &[0, 1]]), vec![], ivs(&[&[1, 0], &[0, 3]])),
            (ivs(&[&[0, 1]]), vec![], ivs(&[&[0, 3]])),
        ]),
    })
    .expect("valid fixture")
}

/// The six coordinate 2-planes of Z^4 indexed by the edges of K4, with the
/// ray lattices doubled and one facet lattice doubled to match: orientable,
/// two independent facet-graph cycles, and non-trivial residue constants.
pub fn k4_edges() -> MonoidalComplex {
    let e = |i: usize| -> Vec<i32> {
        let mut v = vec![0; 4];
        v[i] = 1;
        v
    };
    let mut maximal = Vec::new();
    let mut lattices = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let rays = ivs(&[&e(i), &e(j)]);
            maximal.push((rays.clone(), vec![]));
            let basis = if (i, j) == (0, 1) {
                // doubled facet lattice 2Z e1 + 2Z e2
                vec![iv(&[2, 0, 0, 0]), iv(&[0, 2, 0, 0])]
            } else {
                ivs(&[&e(i), &e(j)])
            };
            lattices.push((rays, vec![], basis));
        }
    }
    for i in 0..4 {
        let doubled: Vec<i32> = e(i).iter().map(|x| 2 * x).collect();
        lattices.push((ivs(&[&e(i)]), vec![], ivs(&[&doubled])));
    }
    validate(ComplexSpec {
        ambient_rank: 4,
        characteristic: 0,
        maximal_cones: maximal,
        data: SpecData::LatticeFamily(lattices),
    })
    .expect("valid fixture")
}

/// Irreducible orthant in Z^3 whose three codimension-one faces all have
/// incidence number two, engineered so that the residue gluing onto the
/// LCS locus fails at the z-ray: d_{Q in E1} = 1 against d_{Q in E2} = 2
/// with unequal products.
pub fn glue_failure() -> MonoidalComplex {
    validate(ComplexSpec {
        ambient_rank: 3,
        characteristic: 0,
        maximal_cones: vec![(ivs(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]), vec![])],
        data: SpecData::LatticeFamily(vec![
            (
                ivs(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
                vec![],
                ivs(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
            ),
            // tau1 = cone(e2,e3): Z e2 + 2Z e3
            (
                ivs(&[&[0, 1, 0], &[0, 0, 1]]),
                vec![],
                ivs(&[&[0, 1, 0], &[0, 0, 2]]),
            ),
            // tau2 = cone(e1,e3): 2Z e1 + Z e3
            (
                ivs(&[&[1, 0, 0], &[0, 0, 1]]),
                vec![],
                ivs(&[&[2, 0, 0], &[0, 0, 1]]),
            ),
            // tau3 = cone(e1,e2): 2Z e1 + Z e2
            (
                ivs(&[&[1, 0, 0], &[0, 1, 0]]),
                vec![],
                ivs(&[&[2, 0, 0], &[0, 1, 0]]),
            ),
            (ivs(&[&[1, 0, 0]]), vec![], ivs(&[&[2, 0, 0]])),
            (ivs(&[&[0, 1, 0]]), vec![], ivs(&[&[0, 1, 0]])),
            (ivs(&[&[0, 0, 1]]), vec![], ivs(&[&[0, 0, 2]])),
            (vec![], vec![], vec![]),
        ]),
    })
    .expect("valid fixture")
}

/// Irreducible orthant in Z^2 with the x-ray lattice of index two.
pub fn orthant_with_index2_ray() -> MonoidalComplex {
    validate(ComplexSpec {
        ambient_rank: 2,
        characteristic: 0,
        maximal_cones: vec![(ivs(&[&[1, 0], &[0, 1]]), vec![])],
        data: SpecData::LatticeFamily(vec![(ivs(&[&[1, 0]]), vec![], ivs(&[&[2, 0]]))]),
    })
    .expect("valid fixture")
}
