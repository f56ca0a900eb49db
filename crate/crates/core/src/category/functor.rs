use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use super::{same_category, CatError, EdgeId, MorphismClass, ObId, Path, PresentedCategory};

/// Object map plus generator-to-path map between two presented categories.
///
/// Construction only checks that the maps are total and land in the target
/// graph; [`FunctorDef::check`] decides whether they extend to a functor.
#[derive(Clone, Debug)]
pub struct FunctorDef {
    source: Arc<PresentedCategory>,
    target: Arc<PresentedCategory>,
    object_map: Vec<ObId>,
    generator_map: Vec<Path>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorViolation {
    EndpointMismatch {
        generator: String,
        expected: (String, String),
        found: (String, String),
    },
    EquationNotPreserved {
        equation: usize,
        lhs_image: String,
        rhs_image: String,
    },
    /// The target's word problem could not be decided within its bounds.
    Undecided { equation: usize, error: CatError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorReport {
    pub violations: Vec<FunctorViolation>,
}

impl FunctorReport {
    /// Why an empty violation list is enough.
    pub const JUSTIFICATION: &'static str = "identities map to identities and composites to \
        concatenated images by construction of a generator-defined map; respecting every \
        declared equation makes the map well defined on congruence classes";

    pub fn is_functor(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Outcome of a fullness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fullness {
    pub full: bool,
    /// First target morphism without a preimage, when not full.
    pub witness: Option<MorphismClass>,
}

impl FunctorDef {
    pub fn new(
        source: Arc<PresentedCategory>,
        target: Arc<PresentedCategory>,
        object_map: Vec<ObId>,
        generator_map: Vec<Path>,
    ) -> Result<Self, CatError> {
        if object_map.len() != source.graph().object_count() {
            return Err(CatError::InvalidPath(format!(
                "object map has {} entries for {} source objects",
                object_map.len(),
                source.graph().object_count()
            )));
        }
        if generator_map.len() != source.graph().edge_count() {
            return Err(CatError::InvalidPath(format!(
                "arrow map has {} entries for {} source arrows",
                generator_map.len(),
                source.graph().edge_count()
            )));
        }
        for &ob in &object_map {
            if !target.graph().contains_object(ob) {
                return Err(CatError::InvalidPath(format!(
                    "object #{} is not in the target",
                    ob.0
                )));
            }
        }
        for p in &generator_map {
            target.graph().check_path(p)?;
        }
        Ok(FunctorDef {
            source,
            target,
            object_map,
            generator_map,
        })
    }

    pub fn identity(cat: Arc<PresentedCategory>) -> Self {
        let object_map = cat.objects().collect();
        let generator_map = cat
            .graph()
            .edges()
            .map(|e| {
                let d = cat.graph().edge_decl(e);
                Path::from_parts(d.src, d.tgt, vec![e])
            })
            .collect();
        FunctorDef {
            source: cat.clone(),
            target: cat,
            object_map,
            generator_map,
        }
    }

    pub fn source(&self) -> &Arc<PresentedCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PresentedCategory> {
        &self.target
    }

    pub fn object_map(&self) -> &[ObId] {
        &self.object_map
    }

    pub fn generator_map(&self) -> &[Path] {
        &self.generator_map
    }

    pub fn map_object(&self, ob: ObId) -> ObId {
        self.object_map[ob.0]
    }

    pub fn map_generator(&self, e: EdgeId) -> &Path {
        &self.generator_map[e.0]
    }

    /// Image of a source path: the concatenation of generator images.
    pub fn map_path(&self, p: &Path) -> Result<Path, CatError> {
        let mut out = Path::identity(self.map_object(p.start()));
        for &e in p.edges() {
            out = out.then(self.map_generator(e))?;
        }
        Ok(out)
    }

    pub fn map_morphism(&self, m: &MorphismClass) -> Result<MorphismClass, CatError> {
        self.target.normalize(&self.map_path(m.path())?)
    }

    /// `self` followed by `next`, i.e. `next ∘ self`.
    pub fn then(&self, next: &FunctorDef) -> Result<FunctorDef, CatError> {
        if !same_category(&self.target, &next.source) {
            return Err(CatError::NonComposable {
                first: "functor".into(),
                second: "functor with a different source".into(),
            });
        }
        let object_map = self.object_map.iter().map(|&o| next.map_object(o)).collect();
        let generator_map = self
            .generator_map
            .iter()
            .map(|p| next.map_path(p))
            .collect::<Result<Vec<_>, _>>()?;
        FunctorDef::new(
            self.source.clone(),
            next.target.clone(),
            object_map,
            generator_map,
        )
    }

    pub fn check(&self) -> FunctorReport {
        let src = self.source.graph();
        let tgt = self.target.graph();
        let mut violations = Vec::new();
        for e in src.edges() {
            let decl = src.edge_decl(e);
            let img = &self.generator_map[e.0];
            let expected = (self.map_object(decl.src), self.map_object(decl.tgt));
            if (img.start(), img.end()) != expected {
                violations.push(FunctorViolation::EndpointMismatch {
                    generator: decl.name.clone(),
                    expected: (
                        tgt.object_name(expected.0).to_string(),
                        tgt.object_name(expected.1).to_string(),
                    ),
                    found: (
                        tgt.object_name(img.start()).to_string(),
                        tgt.object_name(img.end()).to_string(),
                    ),
                });
            }
        }
        if !violations.is_empty() {
            return FunctorReport { violations };
        }
        for (i, eq) in self.source.equations().iter().enumerate() {
            let images = self
                .map_path(&eq.lhs)
                .and_then(|l| Ok((l, self.map_path(&eq.rhs)?)));
            let verdict = images.and_then(|(l, r)| {
                let same = self.target.congruent(&l, &r)?;
                Ok((l, r, same))
            });
            match verdict {
                Ok((_, _, true)) => {}
                Ok((l, r, false)) => violations.push(FunctorViolation::EquationNotPreserved {
                    equation: i,
                    lhs_image: self.target.path_string(&l),
                    rhs_image: self.target.path_string(&r),
                }),
                Err(error) => violations.push(FunctorViolation::Undecided { equation: i, error }),
            }
        }
        FunctorReport { violations }
    }

    /// Target classes reached by images of source paths, per (start, end) of
    /// the source path. Terminates when the target's hom-sets are finite.
    fn image(&self) -> Result<HashSet<(ObId, ObId, MorphismClass)>, CatError> {
        // The target must be finite for the search to be bounded.
        self.target.all_morphisms()?;
        let src = self.source.graph();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        for c in src.objects() {
            let state = (c, c, self.target.identity(self.map_object(c)));
            if seen.insert(state.clone()) {
                queue.push_back(state);
            }
        }
        while let Some((c, d, m)) = queue.pop_front() {
            for &e in src.outgoing(d) {
                let next = m.path().then(self.map_generator(e))?;
                let state = (c, src.edge_decl(e).tgt, self.target.normalize(&next)?);
                if seen.insert(state.clone()) {
                    queue.push_back(state);
                }
            }
        }
        Ok(seen)
    }

    /// Every target morphism has a preimage (surjective on all morphisms).
    pub fn is_full(&self) -> Result<Fullness, CatError> {
        let image: BTreeSet<MorphismClass> = self.image()?.into_iter().map(|(_, _, m)| m).collect();
        let witness = self
            .target
            .all_morphisms()?
            .into_iter()
            .find(|m| !image.contains(m));
        Ok(Fullness {
            full: witness.is_none(),
            witness,
        })
    }

    /// Textbook fullness: every `hom(c, d) -> hom(F c, F d)` is surjective.
    pub fn is_full_homwise(&self) -> Result<Fullness, CatError> {
        let image = self.image()?;
        for c in self.source.objects() {
            for d in self.source.objects() {
                let hom = self.target.hom_set(self.map_object(c), self.map_object(d))?;
                if let Some(m) = hom.into_iter().find(|m| !image.contains(&(c, d, m.clone()))) {
                    return Ok(Fullness {
                        full: false,
                        witness: Some(m),
                    });
                }
            }
        }
        Ok(Fullness {
            full: true,
            witness: None,
        })
    }

    /// Equal object maps and congruent generator images.
    pub fn same_as(&self, other: &FunctorDef) -> Result<bool, CatError> {
        if self.object_map != other.object_map {
            return Ok(false);
        }
        for (p, q) in self.generator_map.iter().zip(&other.generator_map) {
            if !self.target.congruent(p, q)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// All functors `src -> tgt`, generator images given by canonical paths.
///
/// Order: object maps lexicographically (first source object most
/// significant), then generator images lexicographically in hom-set order.
pub fn enumerate_functors(
    src: &Arc<PresentedCategory>,
    tgt: &Arc<PresentedCategory>,
    cap: usize,
) -> Result<Vec<FunctorDef>, CatError> {
    match enumerate_functors_upto(src, tgt, cap)? {
        (_, true) => Err(CatError::EnumerationCapExceeded { cap }),
        (out, false) => Ok(out),
    }
}

/// The first `limit` functors in enumeration order, and whether more exist.
pub fn enumerate_functors_upto(
    src: &Arc<PresentedCategory>,
    tgt: &Arc<PresentedCategory>,
    limit: usize,
) -> Result<(Vec<FunctorDef>, bool), CatError> {
    let n_src = src.object_count();
    let n_tgt = tgt.object_count();
    let edges: Vec<EdgeId> = src.graph().edges().collect();
    let mut out = Vec::new();
    if n_src > 0 && n_tgt == 0 {
        return Ok((out, false));
    }

    let mut hom_cache = std::collections::HashMap::new();
    let mut object_map = vec![ObId(0); n_src];
    loop {
        let mut choices: Vec<Vec<MorphismClass>> = Vec::with_capacity(edges.len());
        for &e in &edges {
            let decl = src.graph().edge_decl(e);
            let key = (object_map[decl.src.0], object_map[decl.tgt.0]);
            if !hom_cache.contains_key(&key) {
                hom_cache.insert(key, tgt.hom_set(key.0, key.1)?);
            }
            choices.push(hom_cache[&key].clone());
        }
        if choices.iter().all(|c| !c.is_empty()) {
            let mut pick = vec![0usize; edges.len()];
            loop {
                let generator_map = pick
                    .iter()
                    .zip(&choices)
                    .map(|(&i, c)| c[i].path().clone())
                    .collect();
                let f = FunctorDef {
                    source: src.clone(),
                    target: tgt.clone(),
                    object_map: object_map.clone(),
                    generator_map,
                };
                if f.check().is_functor() {
                    if out.len() == limit {
                        return Ok((out, true));
                    }
                    out.push(f);
                }
                if !advance(&mut pick, |i| choices[i].len()) {
                    break;
                }
            }
        }
        let mut obs: Vec<usize> = object_map.iter().map(|o| o.0).collect();
        if !advance(&mut obs, |_| n_tgt) {
            break;
        }
        object_map = obs.into_iter().map(ObId).collect();
    }
    Ok((out, false))
}

/// Odometer step with the last digit least significant. Returns false after
/// the final combination.
pub(crate) fn advance(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Every functor paired with its fullness, in enumeration order.
pub fn classify_fullness(
    src: &Arc<PresentedCategory>,
    tgt: &Arc<PresentedCategory>,
    cap: usize,
) -> Result<Vec<(FunctorDef, Fullness)>, CatError> {
    enumerate_functors(src, tgt, cap)?
        .into_iter()
        .map(|f| {
            let full = f.is_full()?;
            Ok((f, full))
        })
        .collect()
}
