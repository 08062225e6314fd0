//! Cocompact group actions on simplicial complexes, stored by orbit data.
//!
//! A complex holds finitely many simplex orbits per dimension. Each orbit
//! stores a canonical representative, a list of (vertex orbit, group element)
//! pairs, together with the resolution of each codimension one face to a
//! translate of a face orbit. Vertices carry their group element explicitly,
//! so the action on vertices is free by construction; simplex stabilizers can
//! still be nontrivial for finite groups and are checked where an operation
//! needs freeness.
//!
//! Properness holds automatically here: finite groups have finite stabilizers,
//! and for Z^d a setwise stabilizer of a simplex permutes its vertices, so
//! some power fixes a vertex, forcing the element to be zero.

use crate::error::{Error, Result};
use crate::group::{Elt, GroupSpec};
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

pub type Vert = (usize, Elt);

/// One simplex orbit: the canonical representative plus, for each position,
/// the face obtained by dropping that vertex resolved as (face orbit, g) with
/// g applied to the face orbit representative. None marks a failed resolution,
/// which validate reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexOrbit {
    pub rep: Vec<Vert>,
    pub facets: Vec<Option<(usize, Elt)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: &'static str,
    pub dim: usize,
    pub orbit: usize,
}

pub fn dim_name(dim: usize) -> String {
    match dim {
        0 => "vertex".to_string(),
        1 => "edge".to_string(),
        2 => "triangle".to_string(),
        3 => "tetrahedron".to_string(),
        k => format!("dim-{k} simplex"),
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} orbit {}", self.axiom, dim_name(self.dim), self.orbit)
    }
}

/// Total vertex order and the incidence signs it induces. The order on vertex
/// orbit ids is their numeric order; representatives are stored sorted, so the
/// sign of dropping the vertex at position v is (-1)^v.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrdering {
    /// signs[dim][orbit][position], empty in dimension zero.
    pub signs: Vec<Vec<Vec<i8>>>,
}

/// Where each cell of a barycentric subdivision came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionMap {
    /// new vertex orbit id -> (old dim, old orbit) of the barycenter.
    pub vertex_origin: Vec<(usize, usize)>,
    /// carrier[new dim][new orbit] = (old dim, old orbit, g): the translate
    /// g * (old representative) whose subdivision contains the new cell.
    pub carrier: Vec<Vec<(usize, usize, Elt)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaComplex {
    pub group: GroupSpec,
    pub n_vertex_orbits: usize,
    orbits: Vec<Vec<SimplexOrbit>>,
}

fn translate(group: &GroupSpec, gamma: &Elt, verts: &[Vert]) -> Vec<Vert> {
    let mut out: Vec<Vert> =
        verts.iter().map(|(o, g)| (*o, group.mul(gamma, g))).collect();
    out.sort();
    out
}

/// Sorted lexicographically smallest translate, together with the gamma that
/// produces it from the input. The candidate set ranges over the inverses of
/// the vertex elements, which is itself translation invariant, so equal orbits
/// canonicalize identically.
fn canonicalize(group: &GroupSpec, verts: &[Vert]) -> (Vec<Vert>, Elt) {
    let mut best: Option<(Vec<Vert>, Elt)> = None;
    for (_, g) in verts {
        let gamma = group.inv(g);
        let cand = translate(group, &gamma, verts);
        if best.as_ref().is_none_or(|(b, _)| cand < *b) {
            best = Some((cand, gamma));
        }
    }
    best.unwrap_or((Vec::new(), group.identity()))
}

impl GammaComplex {
    /// Builds from raw simplex lists, deriving face resolutions by matching
    /// canonical forms. Invalid data is stored as given; validate reports it.
    pub fn from_simplex_lists(
        group: GroupSpec,
        n_vertex_orbits: usize,
        simplices: &[(usize, Vec<Vert>)],
    ) -> Self {
        let max_dim = simplices.iter().map(|(d, _)| *d).max().unwrap_or(0);
        let mut orbits: Vec<Vec<SimplexOrbit>> = vec![Vec::new(); max_dim + 1];
        orbits[0] = (0..n_vertex_orbits)
            .map(|i| SimplexOrbit { rep: vec![(i, group.identity())], facets: Vec::new() })
            .collect();
        for (dim, verts) in simplices {
            if *dim == 0 {
                continue;
            }
            let well_formed = verts.len() == dim + 1
                && verts.iter().all(|(o, g)| *o < n_vertex_orbits && group.check_elt(g).is_ok());
            let rep = if well_formed { canonicalize(&group, verts).0 } else { verts.clone() };
            orbits[*dim].push(SimplexOrbit { rep, facets: Vec::new() });
        }
        let mut c = GammaComplex { group, n_vertex_orbits, orbits };
        c.derive_facets();
        c
    }

    /// Assembles from orbits whose face resolutions are already known, as the
    /// quotient construction does. Representatives must be canonical.
    pub(crate) fn from_parts(
        group: GroupSpec,
        n_vertex_orbits: usize,
        orbits: Vec<Vec<SimplexOrbit>>,
    ) -> Self {
        GammaComplex { group, n_vertex_orbits, orbits }
    }

    /// from_simplex_lists plus validation; violations become the error.
    pub fn build(
        group: GroupSpec,
        n_vertex_orbits: usize,
        simplices: &[(usize, Vec<Vert>)],
    ) -> std::result::Result<Self, Vec<Violation>> {
        let c = Self::from_simplex_lists(group, n_vertex_orbits, simplices);
        let v = c.validate();
        if v.is_empty() {
            Ok(c)
        } else {
            Err(v)
        }
    }

    fn derive_facets(&mut self) {
        // registry per dimension: canonical representative -> orbit ids
        let registries: Vec<BTreeMap<Vec<Vert>, Vec<usize>>> = self
            .orbits
            .iter()
            .map(|level| {
                let mut reg: BTreeMap<Vec<Vert>, Vec<usize>> = BTreeMap::new();
                for (i, orb) in level.iter().enumerate() {
                    reg.entry(orb.rep.clone()).or_default().push(i);
                }
                reg
            })
            .collect();
        for dim in 1..self.orbits.len() {
            for idx in 0..self.orbits[dim].len() {
                let rep = self.orbits[dim][idx].rep.clone();
                if rep.len() != dim + 1 || !self.rep_sane(&rep) {
                    continue;
                }
                let mut facets = Vec::with_capacity(rep.len());
                for drop in 0..rep.len() {
                    let mut face: Vec<Vert> = rep.clone();
                    face.remove(drop);
                    let (canon, gamma) = canonicalize(&self.group, &face);
                    let hit = registries[dim - 1].get(&canon).and_then(|ids| {
                        if ids.len() == 1 {
                            Some(ids[0])
                        } else {
                            None
                        }
                    });
                    facets.push(hit.map(|fo| (fo, self.group.inv(&gamma))));
                }
                self.orbits[dim][idx].facets = facets;
            }
        }
    }

    fn rep_sane(&self, rep: &[Vert]) -> bool {
        let distinct: BTreeSet<&Vert> = rep.iter().collect();
        distinct.len() == rep.len()
            && rep
                .iter()
                .all(|(o, g)| *o < self.n_vertex_orbits && self.group.check_elt(g).is_ok())
    }

    pub fn max_dim(&self) -> usize {
        self.orbits.len() - 1
    }

    pub fn n_orbits(&self, dim: usize) -> usize {
        self.orbits.get(dim).map_or(0, |v| v.len())
    }

    pub fn orbits_in(&self, dim: usize) -> &[SimplexOrbit] {
        self.orbits.get(dim).map_or(&[], |v| v.as_slice())
    }

    pub fn orbit(&self, dim: usize, id: usize) -> Result<&SimplexOrbit> {
        self.orbits
            .get(dim)
            .and_then(|v| v.get(id))
            .ok_or(Error::UnknownOrbit { dim, id })
    }

    /// Alternating orbit count, the Euler characteristic of the quotient.
    pub fn euler_orbit_count(&self) -> i64 {
        (0..=self.max_dim())
            .map(|k| {
                let n = self.n_orbits(k) as i64;
                if k % 2 == 0 {
                    n
                } else {
                    -n
                }
            })
            .sum()
    }

    /// Checks the complex axioms; violations are returned as data.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (dim, level) in self.orbits.iter().enumerate() {
            for (i, orb) in level.iter().enumerate() {
                let distinct: BTreeSet<&Vert> = orb.rep.iter().collect();
                if orb.rep.len() != dim + 1 || distinct.len() != orb.rep.len() {
                    out.push(Violation { axiom: "well-formed", dim, orbit: i });
                    continue;
                }
                if !self.rep_sane(&orb.rep) {
                    // a vertex reference that resolves to nothing
                    out.push(Violation { axiom: "face-closure", dim, orbit: i });
                    continue;
                }
                if dim == 0 {
                    continue;
                }
                let mut ok = orb.facets.len() == orb.rep.len();
                if ok {
                    for (drop, fac) in orb.facets.iter().enumerate() {
                        let mut face: Vec<Vert> = orb.rep.clone();
                        face.remove(drop);
                        match fac {
                            Some((fo, g))
                                if self.group.check_elt(g).is_ok()
                                    && *fo < self.n_orbits(dim - 1) =>
                            {
                                let resolved =
                                    translate(&self.group, g, &self.orbits[dim - 1][*fo].rep);
                                if resolved != face {
                                    ok = false;
                                }
                            }
                            _ => ok = false,
                        }
                    }
                }
                if !ok {
                    out.push(Violation { axiom: "face-closure", dim, orbit: i });
                }
            }
        }
        out
    }

    /// True when every simplex has pairwise distinct vertex orbits, so the
    /// orbit order gives a well order on each simplex's vertices.
    pub fn separated(&self) -> bool {
        self.orbits.iter().skip(1).flatten().all(|orb| {
            let orbits: BTreeSet<usize> = orb.rep.iter().map(|(o, _)| *o).collect();
            orbits.len() == orb.rep.len()
        })
    }

    /// Vertex order and incidence signs; the complex must be separated.
    pub fn order_and_sign(&self) -> Result<VertexOrdering> {
        if !self.separated() {
            return Err(Error::NotSeparated);
        }
        let signs = self
            .orbits
            .iter()
            .enumerate()
            .map(|(dim, level)| {
                level
                    .iter()
                    .map(|_| {
                        if dim == 0 {
                            Vec::new()
                        } else {
                            (0..=dim).map(|v| if v % 2 == 0 { 1 } else { -1 }).collect()
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(VertexOrdering { signs })
    }

    /// All (dim, orbit, g) with the representative of the given orbit contained
    /// in g times that orbit's representative. Contains the orbit itself.
    pub fn star(&self, dim: usize, id: usize) -> Result<Vec<(usize, usize, Elt)>> {
        let base = self.orbit(dim, id)?.rep.clone();
        let w0 = &base[0];
        let mut out = BTreeSet::new();
        for (k, level) in self.orbits.iter().enumerate().skip(dim) {
            for (j, orb) in level.iter().enumerate() {
                for (o, g) in &orb.rep {
                    if o != &w0.0 {
                        continue;
                    }
                    let gamma = self.group.mul(&w0.1, &self.group.inv(g));
                    let moved = translate(&self.group, &gamma, &orb.rep);
                    if base.iter().all(|v| moved.binary_search(v).is_ok()) {
                        out.insert((k, j, gamma));
                    }
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// True when no nonidentity element fixes a simplex setwise. Always true
    /// over Z^d; finite groups are checked orbit by orbit.
    pub fn is_free(&self) -> bool {
        self.find_stabilized().is_none()
    }

    fn find_stabilized(&self) -> Option<(usize, usize, Elt)> {
        if !self.group.is_finite() {
            return None;
        }
        for (dim, level) in self.orbits.iter().enumerate() {
            for (i, orb) in level.iter().enumerate() {
                for gamma in self.group.elements() {
                    if self.group.is_identity(&gamma) {
                        continue;
                    }
                    if translate(&self.group, &gamma, &orb.rep) == orb.rep {
                        return Some((dim, i, gamma));
                    }
                }
            }
        }
        None
    }

    pub(crate) fn require_free(&self) -> Result<()> {
        match self.find_stabilized() {
            Some((dim, i, gamma)) => Err(Error::NonFreeAction(format!(
                "{} orbit {} is fixed by {:?}",
                dim_name(dim),
                i,
                gamma
            ))),
            None => Ok(()),
        }
    }

    /// Resolves the subsimplex of (dim, id) spanned by the kept positions,
    /// returning (sub dim, sub orbit, g) with g applied to the sub orbit
    /// representative giving exactly that subset. Walks stored face
    /// resolutions, so it stays deterministic even when distinct orbits share
    /// a representative.
    pub(crate) fn resolve_subset(
        &self,
        dim: usize,
        id: usize,
        keep: &[bool],
    ) -> Result<(usize, usize, Elt)> {
        let orb = self.orbit(dim, id)?;
        assert_eq!(keep.len(), orb.rep.len());
        let dropped: Vec<usize> =
            (0..keep.len()).filter(|&p| !keep[p]).collect();
        if dropped.is_empty() {
            return Ok((dim, id, self.group.identity()));
        }
        let last = *dropped.last().expect("nonempty");
        let (fo, g) = self.orbits[dim][id].facets[last]
            .clone()
            .ok_or_else(|| Error::InvalidInput("unresolved face".into()))?;
        // positions in the facet representative: g^-1 times the kept face
        let mut face: Vec<Vert> = orb.rep.clone();
        face.remove(last);
        let ginv = self.group.inv(&g);
        let moved = translate(&self.group, &ginv, &face);
        let frep = &self.orbits[dim - 1][fo].rep;
        // map each kept vertex into the facet rep's positions
        let mut sub_keep = vec![false; frep.len()];
        for (p, v) in orb.rep.iter().enumerate() {
            if !keep[p] || p == last {
                continue;
            }
            let w = (v.0, self.group.mul(&ginv, &v.1));
            let pos = frep.iter().position(|x| *x == w).ok_or_else(|| {
                Error::InvalidInput("face resolution does not match".into())
            })?;
            sub_keep[pos] = true;
        }
        debug_assert_eq!(&moved, frep);
        let (sd, so, sg) = self.resolve_subset(dim - 1, fo, &sub_keep)?;
        Ok((sd, so, self.group.mul(&g, &sg)))
    }

    /// Barycenters become vertices, flags become simplices. The result is
    /// always separated; its vertex orbits enumerate the input orbits in
    /// dimension major order. Finite groups must act freely, since a fixed
    /// simplex would need a fixed barycenter vertex.
    pub fn barycentric_subdivision(&self) -> Result<(GammaComplex, SubdivisionMap)> {
        self.require_free()?;
        let mut offset = vec![0usize; self.max_dim() + 1];
        for k in 1..=self.max_dim() {
            offset[k] = offset[k - 1] + self.n_orbits(k - 1);
        }
        let new_nv = offset[self.max_dim()] + self.n_orbits(self.max_dim());
        let mut vertex_origin = Vec::with_capacity(new_nv);
        for k in 0..=self.max_dim() {
            for i in 0..self.n_orbits(k) {
                vertex_origin.push((k, i));
            }
        }
        let mut simplices: Vec<(usize, Vec<Vert>)> = Vec::new();
        let mut carrier: Vec<Vec<(usize, usize, Elt)>> = vec![Vec::new(); self.max_dim() + 1];
        // chains of proper nonempty subsets below the full representative
        for top_dim in 0..=self.max_dim() {
            for top in 0..self.n_orbits(top_dim) {
                let m = top_dim + 1;
                let full: Vec<bool> = vec![true; m];
                let mut stack: Vec<Vec<Vec<bool>>> = vec![vec![full.clone()]];
                while let Some(chain) = stack.pop() {
                    let new_dim = chain.len() - 1;
                    let mut verts: Vec<Vert> = Vec::with_capacity(chain.len());
                    for keep in chain.iter().rev() {
                        let (sd, so, g) = self.resolve_subset(top_dim, top, keep)?;
                        verts.push((offset[sd] + so, g));
                    }
                    let (canon, gamma) = canonicalize(&self.group, &verts);
                    if new_dim == 0 {
                        // the barycenter vertex orbit already exists
                        debug_assert_eq!(canon, vec![(offset[top_dim] + top, self.group.identity())]);
                    } else {
                        simplices.push((new_dim, canon));
                        carrier[new_dim].push((top_dim, top, gamma));
                    }
                    // extend the chain by any strictly smaller nonempty subset
                    let smallest = chain.last().expect("chain is nonempty");
                    let live: Vec<usize> =
                        (0..m).filter(|&p| smallest[p]).collect();
                    if live.len() > 1 {
                        for mask in 1..(1u32 << live.len()) - 1 {
                            let mut next = vec![false; m];
                            for (bit, &p) in live.iter().enumerate() {
                                if mask & (1 << bit) != 0 {
                                    next[p] = true;
                                }
                            }
                            let mut ext = chain.clone();
                            ext.push(next);
                            stack.push(ext);
                        }
                    }
                }
            }
        }
        carrier[0] = vertex_origin.iter().map(|&(d, o)| (d, o, self.group.identity())).collect();
        let sub = GammaComplex::from_simplex_lists(self.group.clone(), new_nv, &simplices);
        debug_assert!(sub.validate().is_empty());
        debug_assert!(sub.separated());
        Ok((sub, SubdivisionMap { vertex_origin, carrier }))
    }

    /// Collapses orbits to simplices over the trivial group. Needs a free
    /// action and separatedness; face resolutions carry over with their group
    /// elements erased, which keeps parallel cells distinct.
    pub fn quotient_complex(&self) -> Result<GammaComplex> {
        self.require_free()?;
        if !self.separated() {
            return Err(Error::NotSeparated);
        }
        let triv = GroupSpec::trivial();
        let e = triv.identity();
        let orbits: Vec<Vec<SimplexOrbit>> = self
            .orbits
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|orb| {
                        let mut rep: Vec<Vert> =
                            orb.rep.iter().map(|(o, _)| (*o, e.clone())).collect();
                        rep.sort();
                        let facets = orb
                            .facets
                            .iter()
                            .map(|f| f.as_ref().map(|(fo, _)| (*fo, e.clone())))
                            .collect();
                        SimplexOrbit { rep, facets }
                    })
                    .collect()
            })
            .collect();
        Ok(GammaComplex::from_parts(triv, self.n_vertex_orbits, orbits))
    }
}

/// Small standard complexes, used by tests and handy as starting points.
pub mod fixtures {
    use super::*;

    /// One vertex orbit, one edge orbit over Z: the line with translation,
    /// whose quotient is the circle. Not separated.
    pub fn circle() -> GammaComplex {
        let z = GroupSpec::free_abelian(1);
        let e = |k: i64| (0usize, Elt::Vector(vec![k]));
        GammaComplex::build(z, 1, &[(1, vec![e(0), e(1)])]).expect("valid")
    }

    /// Hexagon with the rotation by three steps as Z/2: three vertex orbits,
    /// three edge orbits. Separated.
    pub fn hexagon_z2() -> GammaComplex {
        let g = GroupSpec::cyclic(2);
        let e = Elt::Finite(0);
        let t = Elt::Finite(1);
        GammaComplex::build(
            g,
            3,
            &[
                (1, vec![(0, e.clone()), (1, e.clone())]),
                (1, vec![(1, e.clone()), (2, e.clone())]),
                (1, vec![(2, e.clone()), (0, t)]),
            ],
        )
        .expect("valid")
    }

    /// Octahedron boundary with the antipodal Z/2 action: three vertex orbits,
    /// six edge orbits, four triangle orbits. Separated and free.
    pub fn octahedron_z2() -> GammaComplex {
        let g = GroupSpec::cyclic(2);
        let e = Elt::Finite(0);
        let t = Elt::Finite(1);
        let v = |o: usize, s: &Elt| (o, s.clone());
        GammaComplex::build(
            g,
            3,
            &[
                (1, vec![v(0, &e), v(1, &e)]),
                (1, vec![v(0, &e), v(1, &t)]),
                (1, vec![v(0, &e), v(2, &e)]),
                (1, vec![v(0, &e), v(2, &t)]),
                (1, vec![v(1, &e), v(2, &e)]),
                (1, vec![v(1, &e), v(2, &t)]),
                (2, vec![v(0, &e), v(1, &e), v(2, &e)]),
                (2, vec![v(0, &e), v(1, &e), v(2, &t)]),
                (2, vec![v(0, &e), v(1, &t), v(2, &e)]),
                (2, vec![v(0, &e), v(1, &t), v(2, &t)]),
            ],
        )
        .expect("valid")
    }

    /// Unit square grid on the torus as a Z^2 complex: one vertex orbit,
    /// three edge orbits, two triangle orbits. Not separated.
    pub fn torus_grid() -> GammaComplex {
        let g = GroupSpec::free_abelian(2);
        let v = |x: i64, y: i64| (0usize, Elt::Vector(vec![x, y]));
        GammaComplex::build(
            g,
            1,
            &[
                (1, vec![v(0, 0), v(1, 0)]),
                (1, vec![v(0, 0), v(0, 1)]),
                (1, vec![v(1, 0), v(0, 1)]),
                (2, vec![v(0, 0), v(1, 0), v(0, 1)]),
                (2, vec![v(1, 0), v(0, 1), v(1, 1)]),
            ],
        )
        .expect("valid")
    }

    /// A triangle with its boundary, trivial group.
    pub fn solid_triangle() -> GammaComplex {
        let g = GroupSpec::trivial();
        let e = Elt::Finite(0);
        let v = |o: usize| (o, e.clone());
        GammaComplex::build(
            g,
            3,
            &[
                (1, vec![v(0), v(1)]),
                (1, vec![v(1), v(2)]),
                (1, vec![v(0), v(2)]),
                (2, vec![v(0), v(1), v(2)]),
            ],
        )
        .expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn circle_is_valid_not_separated() {
        let c = circle();
        assert!(c.validate().is_empty());
        assert!(!c.separated());
        assert!(c.order_and_sign().is_err());
        assert_eq!(c.n_orbits(0), 1);
        assert_eq!(c.n_orbits(1), 1);
    }

    #[test]
    fn broken_face_reported() {
        let z = GroupSpec::free_abelian(1);
        let c = GammaComplex::from_simplex_lists(
            z,
            1,
            &[(1, vec![(0, Elt::Vector(vec![0])), (7, Elt::Vector(vec![1]))])],
        );
        let v = c.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].to_string(), "face-closure: edge orbit 0");
    }

    #[test]
    fn missing_face_orbit_reported() {
        // a triangle whose edges are not all present
        let g = GroupSpec::trivial();
        let e = Elt::Finite(0);
        let v = |o: usize| (o, e.clone());
        let c = GammaComplex::from_simplex_lists(
            g,
            3,
            &[(1, vec![v(0), v(1)]), (2, vec![v(0), v(1), v(2)])],
        );
        let viol = c.validate();
        assert_eq!(viol.len(), 1);
        assert_eq!(viol[0].to_string(), "face-closure: triangle orbit 0");
    }

    #[test]
    fn octahedron_valid_separated_free() {
        let c = octahedron_z2();
        assert!(c.validate().is_empty());
        assert!(c.separated());
        assert!(c.is_free());
        assert_eq!(c.euler_orbit_count(), 3 - 6 + 4);
        let ord = c.order_and_sign().unwrap();
        assert_eq!(ord.signs[2][0], vec![1, -1, 1]);
    }

    #[test]
    fn octahedron_star_of_vertex() {
        let c = octahedron_z2();
        let star = c.star(0, 0).unwrap();
        let by_dim = |d: usize| star.iter().filter(|(k, _, _)| *k == d).count();
        assert_eq!(by_dim(0), 1);
        assert_eq!(by_dim(1), 4);
        assert_eq!(by_dim(2), 4);
        // top simplex star is itself
        let top = c.star(2, 0).unwrap();
        assert_eq!(top, vec![(2, 0, Elt::Finite(0))]);
    }

    #[test]
    fn circle_star_of_vertex() {
        let c = circle();
        let star = c.star(0, 0).unwrap();
        assert_eq!(star.len(), 3);
        let edges: Vec<&Elt> =
            star.iter().filter(|(k, _, _)| *k == 1).map(|(_, _, g)| g).collect();
        assert_eq!(edges.len(), 2);
        // the two edge translates through the basepoint differ by one shift
        let mut shifts: Vec<i64> = edges
            .iter()
            .map(|g| match g {
                Elt::Vector(v) => v[0],
                _ => unreachable!(),
            })
            .collect();
        shifts.sort();
        assert_eq!(shifts[1] - shifts[0], 1);
    }

    #[test]
    fn subdivision_of_circle() {
        let (sub, map) = circle().barycentric_subdivision().unwrap();
        assert!(sub.validate().is_empty());
        assert!(sub.separated());
        assert_eq!(sub.n_orbits(0), 2);
        assert_eq!(sub.n_orbits(1), 2);
        assert_eq!(map.vertex_origin, vec![(0, 0), (1, 0)]);
        assert_eq!(map.carrier[1].len(), 2);
        assert!(map.carrier[1].iter().all(|(d, o, _)| (*d, *o) == (1, 0)));
    }

    #[test]
    fn subdivision_of_triangle_counts() {
        let (sub, _) = solid_triangle().barycentric_subdivision().unwrap();
        assert!(sub.validate().is_empty());
        assert!(sub.separated());
        assert_eq!(sub.n_orbits(0), 7);
        assert_eq!(sub.n_orbits(1), 12);
        assert_eq!(sub.n_orbits(2), 6);
        assert_eq!(sub.euler_orbit_count(), 1);
    }

    #[test]
    fn subdivision_of_point_is_itself() {
        let g = GroupSpec::trivial();
        let c = GammaComplex::build(g, 1, &[]).expect("valid");
        let (sub, _) = c.barycentric_subdivision().unwrap();
        assert_eq!(sub.n_orbits(0), 1);
        assert_eq!(sub.max_dim(), 0);
        assert!(sub.separated());
    }

    #[test]
    fn subdivision_of_torus_counts() {
        let (sub, _) = torus_grid().barycentric_subdivision().unwrap();
        assert!(sub.validate().is_empty());
        assert!(sub.separated());
        assert_eq!(sub.n_orbits(0), 6);
        assert_eq!(sub.n_orbits(1), 18);
        assert_eq!(sub.n_orbits(2), 12);
    }

    #[test]
    fn quotient_of_subdivided_circle() {
        let (sub, _) = circle().barycentric_subdivision().unwrap();
        let q = sub.quotient_complex().unwrap();
        assert_eq!(q.group, GroupSpec::trivial());
        assert_eq!(q.n_orbits(0), 2);
        assert_eq!(q.n_orbits(1), 2);
        assert!(q.validate().is_empty());
        assert_eq!(q.euler_orbit_count(), 0);
    }

    #[test]
    fn quotient_of_hexagon() {
        let q = hexagon_z2().quotient_complex().unwrap();
        assert_eq!(q.n_orbits(0), 3);
        assert_eq!(q.n_orbits(1), 3);
        assert!(q.validate().is_empty());
        assert_eq!(q.euler_orbit_count(), 0);
    }

    #[test]
    fn quotient_rejects_stabilized_simplex() {
        // one edge flipped by the Z/2 generator
        let g = GroupSpec::cyclic(2);
        let c = GammaComplex::build(
            g,
            1,
            &[(1, vec![(0, Elt::Finite(0)), (0, Elt::Finite(1))])],
        )
        .expect("valid");
        assert!(!c.is_free());
        match c.quotient_complex() {
            Err(Error::NonFreeAction(msg)) => assert!(msg.contains("edge orbit 0")),
            other => panic!("expected NonFreeAction, got {other:?}"),
        }
        assert!(c.barycentric_subdivision().is_err());
    }

    #[test]
    fn quotient_of_trivial_group_complex_is_itself() {
        let c = solid_triangle();
        let q = c.quotient_complex().unwrap();
        assert_eq!(q, c);
    }

    #[test]
    fn sign_table_codim_two_identity() {
        // drop nu then mu (mu < nu) matches drop mu then nu-1 with opposite sign
        let c = octahedron_z2();
        let ord = c.order_and_sign().unwrap();
        for (dim, level) in ord.signs.iter().enumerate().skip(2) {
            for signs in level {
                for nu in 0..signs.len() {
                    for mu in 0..nu {
                        let lhs = signs[nu] as i32 * if mu % 2 == 0 { 1 } else { -1 };
                        let rhs = signs[mu] as i32 * if (nu - 1) % 2 == 0 { 1 } else { -1 };
                        assert_eq!(lhs + rhs, 0, "dim {dim} nu {nu} mu {mu}");
                    }
                }
            }
        }
    }

    #[test]
    fn resolve_subset_walks_face_resolutions() {
        let c = octahedron_z2();
        // triangle 3 has representative [(0,e),(1,t),(2,t)]
        let (d, o, g) = c.resolve_subset(2, 3, &[false, true, true]).unwrap();
        assert_eq!(d, 1);
        let resolved = translate(&c.group, &g, &c.orbit(1, o).unwrap().rep);
        assert_eq!(resolved, vec![(1, Elt::Finite(1)), (2, Elt::Finite(1))]);
    }
}
