//! Constructible equivariant sheaves as functors on the face poset.
//!
//! A sheaf assigns to each simplex orbit the dimension of its sections over
//! the open star, and to each codimension one incidence a corestriction
//! matrix from the face's sections to the simplex's. Free actions make orbit
//! data enough; the group never appears in the matrices themselves.

use crate::complex::{GammaComplex, SubdivisionMap};
use crate::error::{Error, Result};
use crate::qmat::QMat;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructibleSheaf {
    /// Orbit counts of the base per dimension, for cheap mismatch detection.
    pub shape: Vec<usize>,
    /// stalks[dim][orbit] = dim of sections over that orbit's open star.
    pub stalks: Vec<Vec<usize>>,
    /// cores[dim][orbit][position]: map from the facet orbit's stalk into this
    /// orbit's stalk, one per dropped vertex position, dimensions >= 1.
    pub cores: Vec<Vec<Vec<QMat>>>,
    /// Restricts all matrices to real entries when set.
    pub real: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cosheaf {
    pub shape: Vec<usize>,
    pub costalks: Vec<Vec<usize>>,
    /// exts[dim][orbit][position]: transposed corestriction, from this orbit's
    /// costalk onto the facet orbit's costalk.
    pub exts: Vec<Vec<Vec<QMat>>>,
    pub real: bool,
}

/// A per-orbit collection of matrices F_sigma -> G_sigma forming a map of
/// sheaves; validity means commuting with both sides' corestrictions.
pub type SheafMorphism = Vec<Vec<QMat>>;

/// A bounded complex of sheaves on one base, with degreewise morphisms.
#[derive(Clone, Debug, PartialEq)]
pub struct SheafComplex {
    /// Degree of the first term.
    pub lo: i64,
    pub sheaves: Vec<ConstructibleSheaf>,
    /// maps[i]: morphism from term i to term i + 1; length one less than terms.
    pub maps: Vec<SheafMorphism>,
}

fn base_shape(c: &GammaComplex) -> Vec<usize> {
    (0..=c.max_dim()).map(|k| c.n_orbits(k)).collect()
}

impl ConstructibleSheaf {
    pub fn stalk(&self, dim: usize, orbit: usize) -> usize {
        self.stalks[dim][orbit]
    }

    pub fn same_base(&self, other: &Self) -> bool {
        self.shape == other.shape
    }

    /// Total stalk dimension over the dim-k orbits.
    pub fn total_stalk(&self, dim: usize) -> usize {
        self.stalks.get(dim).map_or(0, |v| v.iter().sum())
    }
}

pub fn constant_sheaf(c: &GammaComplex, n: usize) -> ConstructibleSheaf {
    let shape = base_shape(c);
    let stalks = shape.iter().map(|&k| vec![n; k]).collect();
    let cores = shape
        .iter()
        .enumerate()
        .map(|(dim, &k)| {
            let per = if dim == 0 { 0 } else { dim + 1 };
            (0..k).map(|_| vec![QMat::identity(n); per]).collect()
        })
        .collect();
    ConstructibleSheaf { shape, stalks, cores, real: true }
}

pub fn zero_sheaf(c: &GammaComplex) -> ConstructibleSheaf {
    constant_sheaf(c, 0)
}

pub fn skyscraper(c: &GammaComplex, vertex_orbit: usize, n: usize) -> Result<ConstructibleSheaf> {
    if vertex_orbit >= c.n_orbits(0) {
        return Err(Error::UnknownOrbit { dim: 0, id: vertex_orbit });
    }
    let mut f = zero_sheaf(c);
    f.stalks[0][vertex_orbit] = n;
    for dim in 1..f.shape.len() {
        for (orbit, mats) in f.cores[dim].iter_mut().enumerate() {
            for (pos, m) in mats.iter_mut().enumerate() {
                let (fo, _) = c.orbits_in(dim)[orbit].facets[pos]
                    .clone()
                    .expect("validated complex");
                let cols = if dim == 1 && fo == vertex_orbit { n } else { 0 };
                *m = QMat::zeros(0, cols);
            }
        }
    }
    Ok(f)
}

pub fn direct_sum(a: &ConstructibleSheaf, b: &ConstructibleSheaf) -> Result<ConstructibleSheaf> {
    if !a.same_base(b) {
        return Err(Error::Shape("direct sum needs sheaves on the same base".into()));
    }
    let stalks: Vec<Vec<usize>> = a
        .stalks
        .iter()
        .zip(&b.stalks)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect())
        .collect();
    let mut cores = Vec::with_capacity(a.cores.len());
    for dim in 0..a.cores.len() {
        let mut level = Vec::with_capacity(a.cores[dim].len());
        for orbit in 0..a.cores[dim].len() {
            let mut mats = Vec::with_capacity(a.cores[dim][orbit].len());
            for pos in 0..a.cores[dim][orbit].len() {
                let ma = &a.cores[dim][orbit][pos];
                let mb = &b.cores[dim][orbit][pos];
                let mut m = QMat::zeros(ma.rows + mb.rows, ma.cols + mb.cols);
                m.set_block(0, 0, ma);
                m.set_block(ma.rows, ma.cols, mb);
                mats.push(m);
            }
            level.push(mats);
        }
        cores.push(level);
    }
    Ok(ConstructibleSheaf { shape: a.shape.clone(), stalks, cores, real: a.real && b.real })
}

pub fn dual_cosheaf(f: &ConstructibleSheaf) -> Cosheaf {
    Cosheaf {
        shape: f.shape.clone(),
        costalks: f.stalks.clone(),
        exts: f
            .cores
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|mats| mats.iter().map(|m| m.transpose()).collect())
                    .collect()
            })
            .collect(),
        real: f.real,
    }
}

impl Cosheaf {
    /// The linear dual again, recovering a sheaf of the same dimensions.
    pub fn dual_sheaf(&self) -> ConstructibleSheaf {
        ConstructibleSheaf {
            shape: self.shape.clone(),
            stalks: self.costalks.clone(),
            cores: self
                .exts
                .iter()
                .map(|level| {
                    level
                        .iter()
                        .map(|mats| mats.iter().map(|m| m.transpose()).collect())
                        .collect()
                })
                .collect(),
            real: self.real,
        }
    }

    pub fn costalk(&self, dim: usize, orbit: usize) -> usize {
        self.costalks[dim][orbit]
    }

    pub fn total_costalk(&self, dim: usize) -> usize {
        self.costalks.get(dim).map_or(0, |v| v.iter().sum())
    }
}

/// Checks shape agreement with the base, matrix dimensions, the real flag,
/// and functoriality: both codimension two composition paths agree.
pub fn validate_sheaf(c: &GammaComplex, f: &ConstructibleSheaf) -> Result<()> {
    if f.shape != base_shape(c) {
        return Err(Error::Shape("sheaf shape does not match the complex".into()));
    }
    for dim in 0..f.shape.len() {
        if f.stalks[dim].len() != f.shape[dim] || f.cores[dim].len() != f.shape[dim] {
            return Err(Error::Shape("stalk table shape mismatch".into()));
        }
        for orbit in 0..f.shape[dim] {
            let mats = &f.cores[dim][orbit];
            if dim == 0 {
                continue;
            }
            if mats.len() != dim + 1 {
                return Err(Error::Shape(format!(
                    "orbit ({dim},{orbit}) has {} corestrictions, expected {}",
                    mats.len(),
                    dim + 1
                )));
            }
            for (pos, m) in mats.iter().enumerate() {
                let (fo, _) = c.orbits_in(dim)[orbit].facets[pos]
                    .clone()
                    .ok_or_else(|| Error::InvalidInput("unresolved face".into()))?;
                if m.rows != f.stalks[dim][orbit] || m.cols != f.stalks[dim - 1][fo] {
                    return Err(Error::Shape(format!(
                        "corestriction into ({dim},{orbit}) position {pos} is {}x{}, expected {}x{}",
                        m.rows,
                        m.cols,
                        f.stalks[dim][orbit],
                        f.stalks[dim - 1][fo]
                    )));
                }
                if f.real && !m.is_real() {
                    return Err(Error::InvalidInput(format!(
                        "real sheaf has a complex corestriction at ({dim},{orbit}) position {pos}"
                    )));
                }
            }
        }
    }
    // functoriality on codimension two chains
    for dim in 2..f.shape.len() {
        for orbit in 0..f.shape[dim] {
            for nu in 0..=dim {
                for mu in 0..nu {
                    let a = composite(c, f, dim, orbit, nu, mu)?;
                    let b = composite(c, f, dim, orbit, mu, nu)?;
                    if a != b {
                        return Err(Error::NotFunctorial(format!(
                            "paths through positions {mu} and {nu} of ({dim},{orbit}) disagree"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Corestriction composite into (dim, orbit): first drop position `first`,
/// then the vertex that sat at position `second` of the original simplex.
fn composite(
    c: &GammaComplex,
    f: &ConstructibleSheaf,
    dim: usize,
    orbit: usize,
    first: usize,
    second: usize,
) -> Result<QMat> {
    let orb = &c.orbits_in(dim)[orbit];
    let (fo, g) = orb.facets[first].clone().ok_or_else(|| {
        Error::InvalidInput("unresolved face".into())
    })?;
    let frep = &c.orbits_in(dim - 1)[fo].rep;
    let ginv = c.group.inv(&g);
    let v = &orb.rep[second];
    let w = (v.0, c.group.mul(&ginv, &v.1));
    let pos = frep
        .iter()
        .position(|x| *x == w)
        .ok_or_else(|| Error::InvalidInput("face resolution does not match".into()))?;
    f.cores[dim][orbit][first].mul(&f.cores[dim - 1][fo][pos])
}

/// Composite corestriction from the subsimplex spanned by the kept positions
/// up into (dim, orbit). Returns the resolved subsimplex and the map from its
/// stalk. Paths are equivalent by functoriality; this walks one of them.
pub fn corestriction_chain(
    c: &GammaComplex,
    f: &ConstructibleSheaf,
    dim: usize,
    orbit: usize,
    keep: &[bool],
) -> Result<(usize, usize, QMat)> {
    if keep.iter().all(|&k| k) {
        return Ok((dim, orbit, QMat::identity(f.stalks[dim][orbit])));
    }
    let last = (0..keep.len())
        .rev()
        .find(|&p| !keep[p])
        .expect("some position is dropped");
    let orb = &c.orbits_in(dim)[orbit];
    let (fo, g) = orb.facets[last]
        .clone()
        .ok_or_else(|| Error::InvalidInput("unresolved face".into()))?;
    let frep = &c.orbits_in(dim - 1)[fo].rep;
    let ginv = c.group.inv(&g);
    let mut sub_keep = vec![false; frep.len()];
    for (p, v) in orb.rep.iter().enumerate() {
        if !keep[p] || p == last {
            continue;
        }
        let w = (v.0, c.group.mul(&ginv, &v.1));
        let pos = frep
            .iter()
            .position(|x| *x == w)
            .ok_or_else(|| Error::InvalidInput("face resolution does not match".into()))?;
        sub_keep[pos] = true;
    }
    let (sd, so, m) = corestriction_chain(c, f, dim - 1, fo, &sub_keep)?;
    let total = f.cores[dim][orbit][last].mul(&m)?;
    Ok((sd, so, total))
}

/// Transports a sheaf to the barycentric subdivision: the stalk at a flag cell
/// is the stalk at the flag's largest original simplex, identities connect
/// flags sharing a top, and dropped tops compose the original corestrictions.
pub fn subdivision_pullback(
    c: &GammaComplex,
    f: &ConstructibleSheaf,
    sub: &GammaComplex,
    map: &SubdivisionMap,
) -> Result<ConstructibleSheaf> {
    if f.shape != base_shape(c) {
        return Err(Error::Shape("sheaf shape does not match the complex".into()));
    }
    let shape = base_shape(sub);
    let mut stalks: Vec<Vec<usize>> = Vec::with_capacity(shape.len());
    let mut cores: Vec<Vec<Vec<QMat>>> = Vec::with_capacity(shape.len());
    for (dim, &count) in shape.iter().enumerate() {
        let mut level_stalks = Vec::with_capacity(count);
        let mut level_cores = Vec::with_capacity(count);
        for j in 0..count {
            let (cd, co, _) = map.carrier[dim][j].clone();
            level_stalks.push(f.stalks[cd][co]);
            if dim == 0 {
                level_cores.push(Vec::new());
                continue;
            }
            let rep = &sub.orbits_in(dim)[j].rep;
            // flag data: vertex orbit id -> original cell, element carried along
            let flags: Vec<(usize, usize)> =
                rep.iter().map(|(vid, _)| map.vertex_origin[*vid]).collect();
            let mut mats = Vec::with_capacity(dim + 1);
            for nu in 0..=dim {
                if nu < dim {
                    // facet keeps the same top cell
                    mats.push(QMat::identity(f.stalks[cd][co]));
                } else {
                    // facet's top is the next flag element down
                    let (pd, po) = flags[dim - 1];
                    let (top_d, top_o) = flags[dim];
                    debug_assert_eq!((top_d, top_o), (cd, co));
                    let h_top = &rep[dim].1;
                    let h_prev = &rep[dim - 1].1;
                    let rel = sub.group.mul(&sub.group.inv(h_top), h_prev);
                    let prep = &c.orbits_in(pd)[po].rep;
                    let trep = &c.orbits_in(top_d)[top_o].rep;
                    let mut keep = vec![false; trep.len()];
                    for w in prep {
                        let moved = (w.0, c.group.mul(&rel, &w.1));
                        let pos = trep.iter().position(|x| *x == moved).ok_or_else(|| {
                            Error::InvalidInput("flag inclusion does not match".into())
                        })?;
                        keep[pos] = true;
                    }
                    let (sd, so, m) = corestriction_chain(c, f, top_d, top_o, &keep)?;
                    if (sd, so) != (pd, po) {
                        return Err(Error::InvalidInput(
                            "flag face resolves inconsistently".into(),
                        ));
                    }
                    mats.push(m);
                }
            }
            level_cores.push(mats);
        }
        stalks.push(level_stalks);
        cores.push(level_cores);
    }
    Ok(ConstructibleSheaf { shape, stalks, cores, real: f.real })
}

/// Transports a morphism along a barycentric subdivision; the matrix at a
/// flag cell is the one at the flag's largest original cell.
pub fn pullback_morphism(map: &SubdivisionMap, phi: &SheafMorphism) -> SheafMorphism {
    map.carrier
        .iter()
        .map(|level| level.iter().map(|(cd, co, _)| phi[*cd][*co].clone()).collect())
        .collect()
}

/// Checks each term, each morphism square against the corestrictions, and
/// that consecutive morphisms compose to zero.
pub fn validate_sheaf_complex(c: &GammaComplex, k: &SheafComplex) -> Result<()> {
    if k.sheaves.is_empty() {
        return Ok(());
    }
    if k.maps.len() + 1 != k.sheaves.len() {
        return Err(Error::Shape("one morphism is needed between consecutive terms".into()));
    }
    for f in &k.sheaves {
        validate_sheaf(c, f)?;
    }
    for (i, phi) in k.maps.iter().enumerate() {
        validate_morphism(c, &k.sheaves[i], &k.sheaves[i + 1], phi)?;
    }
    for i in 0..k.maps.len().saturating_sub(1) {
        for dim in 0..k.sheaves[i].shape.len() {
            for orbit in 0..k.sheaves[i].shape[dim] {
                let comp = k.maps[i + 1][dim][orbit].mul(&k.maps[i][dim][orbit])?;
                if !comp.is_zero() {
                    return Err(Error::InvalidInput(format!(
                        "sheaf differential does not square to zero at ({dim},{orbit})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A morphism must have the right shapes and commute with corestrictions.
pub fn validate_morphism(
    c: &GammaComplex,
    from: &ConstructibleSheaf,
    to: &ConstructibleSheaf,
    phi: &SheafMorphism,
) -> Result<()> {
    if !from.same_base(to) {
        return Err(Error::Shape("morphism endpoints live on different bases".into()));
    }
    if phi.len() != from.shape.len()
        || phi.iter().zip(&from.shape).any(|(l, &n)| l.len() != n)
    {
        return Err(Error::Shape("morphism table shape mismatch".into()));
    }
    for dim in 0..from.shape.len() {
        for orbit in 0..from.shape[dim] {
            let m = &phi[dim][orbit];
            if m.rows != to.stalks[dim][orbit] || m.cols != from.stalks[dim][orbit] {
                return Err(Error::Shape(format!(
                    "morphism at ({dim},{orbit}) is {}x{}, expected {}x{}",
                    m.rows, m.cols, to.stalks[dim][orbit], from.stalks[dim][orbit]
                )));
            }
            if dim == 0 {
                continue;
            }
            for pos in 0..=dim {
                let (fo, _) = c.orbits_in(dim)[orbit].facets[pos]
                    .clone()
                    .ok_or_else(|| Error::InvalidInput("unresolved face".into()))?;
                let lhs = m.mul(&from.cores[dim][orbit][pos])?;
                let rhs = to.cores[dim][orbit][pos].mul(&phi[dim - 1][fo])?;
                if lhs != rhs {
                    return Err(Error::NotAMorphism(format!(
                        "square at ({dim},{orbit}) position {pos} does not commute"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The identity morphism of a sheaf.
pub fn identity_morphism(f: &ConstructibleSheaf) -> SheafMorphism {
    f.stalks
        .iter()
        .map(|level| level.iter().map(|&n| QMat::identity(n)).collect())
        .collect()
}

/// The zero morphism between two sheaves on the same base.
pub fn zero_morphism(from: &ConstructibleSheaf, to: &ConstructibleSheaf) -> SheafMorphism {
    from.stalks
        .iter()
        .zip(&to.stalks)
        .map(|(fl, tl)| {
            fl.iter().zip(tl).map(|(&a, &b)| QMat::zeros(b, a)).collect()
        })
        .collect()
}
