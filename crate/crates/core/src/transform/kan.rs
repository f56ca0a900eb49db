//! Exhaustive check of the universal property of a candidate lift `(F, ε)`.
//!
//! For every functor `H : C1 -> C2` and every natural `η : I2 ∘ H ⇒ I1` there
//! must be exactly one natural `γ : H ⇒ F` with `η_c = ε_c ∘ I2(γ_c)`. Rather
//! than searching γ per η, each H tabulates `ε ∘ I2(γ)` for all natural γ once
//! and every η is looked up in that table.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::{check_transformation, TransformError, Transformation};
use crate::category::{
    advance, enumerate_functors_upto, CatError, FunctorDef, MorphismClass, ObId,
};
use crate::instance::{Elem, InstanceFunctor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KanCaps {
    /// Competitor functors examined.
    pub functor_cap: usize,
    /// Elements per carrier of either instance.
    pub carrier_cap: usize,
    /// Raw candidate tuples per competitor functor, for η and for γ.
    pub eta_cap: u64,
}

impl KanCaps {
    pub const DEFAULT_FUNCTOR_CAP: usize = 10_000;
    pub const DEFAULT_CARRIER_CAP: usize = 6;
    pub const DEFAULT_ETA_CAP: u64 = 1_000_000;
}

impl Default for KanCaps {
    fn default() -> Self {
        KanCaps {
            functor_cap: Self::DEFAULT_FUNCTOR_CAP,
            carrier_cap: Self::DEFAULT_CARRIER_CAP,
            eta_cap: Self::DEFAULT_ETA_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CapHit {
    Functors { cap: usize },
    Carrier { object: String, size: usize, cap: usize },
    Eta { functor: usize, candidates: u128, cap: u64 },
    Gamma { functor: usize, candidates: u128, cap: u64 },
    /// Hom-set or normalization bounds of the target schema.
    Hom(CatError),
}

impl fmt::Display for CapHit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapHit::Functors { cap } => write!(f, "more than {cap} competitor functors"),
            CapHit::Carrier { object, size, cap } => {
                write!(f, "carrier at `{object}` has {size} elements (cap {cap})")
            }
            CapHit::Eta {
                functor,
                candidates,
                cap,
            } => write!(f, "competitor #{}: {candidates} candidate η tuples (cap {cap})", functor + 1),
            CapHit::Gamma {
                functor,
                candidates,
                cap,
            } => write!(f, "competitor #{}: {candidates} candidate γ tuples (cap {cap})", functor + 1),
            CapHit::Hom(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureKind {
    NoFactorization,
    MultipleFactorizations { count: usize },
}

#[derive(Clone, Debug)]
pub struct KanFailure {
    /// Position of `H` in enumeration order.
    pub functor_index: usize,
    pub functor: FunctorDef,
    /// Components of η, `I2(H c) -> I1(c)` per object of the source.
    pub eta: Vec<BTreeMap<Elem, Elem>>,
    pub kind: FailureKind,
}

#[derive(Clone, Debug)]
pub struct UniversalityReport {
    pub verdict: Verdict,
    pub functors_checked: usize,
    /// Natural `(H, η)` pairs examined.
    pub competitors_checked: u64,
    pub failure: Option<KanFailure>,
    pub cap_hits: Vec<CapHit>,
    pub caps: KanCaps,
    pub hom_cap: usize,
    pub path_bound: usize,
    /// Whether `(F, ε)` factors through itself by the identity alone; `None`
    /// when that search hit a cap.
    pub self_factorization: Option<bool>,
}

fn is_cap_error(e: &CatError) -> bool {
    matches!(
        e,
        CatError::HomCapExceeded { .. }
            | CatError::NormalizationDiverged { .. }
            | CatError::EnumerationCapExceeded { .. }
    )
}

fn product(factors: impl IntoIterator<Item = (usize, usize)>) -> u128 {
    factors.into_iter().fold(1u128, |acc, (base, exp)| {
        let p = (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX);
        acc.saturating_mul(p)
    })
}

/// Index tables for one component tuple: `tables[c][x]`.
type Tables = Vec<Vec<usize>>;

enum Outcome {
    Checked(u64),
    Failed(u64, Tables, FailureKind),
    Capped(CapHit),
}

struct Search<'a> {
    t: &'a Transformation,
    i1: &'a InstanceFunctor,
    i2: &'a InstanceFunctor,
    caps: KanCaps,
    /// `ε_c` as an index table `I2(F c) -> I1(c)`.
    eps: Tables,
}

impl<'a> Search<'a> {
    /// Tables of `ε ∘ I2(γ)` for every natural `γ : H ⇒ F`, with multiplicity
    /// and the γ components of the first occurrence.
    #[allow(clippy::type_complexity)]
    fn factorizations(
        &self,
        index: usize,
        h: &FunctorDef,
    ) -> Result<Result<HashMap<Tables, (usize, Vec<MorphismClass>)>, CapHit>, CatError> {
        let f = self.t.functor();
        let c1 = f.source();
        let c2 = f.target();
        let homs = c1
            .objects()
            .map(|c| c2.hom_set(h.map_object(c), f.map_object(c)))
            .collect::<Result<Vec<_>, _>>()?;
        let candidates = product(homs.iter().map(|h| (h.len(), 1)));
        if candidates > self.caps.eta_cap as u128 {
            return Ok(Err(CapHit::Gamma {
                functor: index,
                candidates,
                cap: self.caps.eta_cap,
            }));
        }
        let mut out = HashMap::new();
        if homs.iter().any(Vec::is_empty) {
            return Ok(Ok(out));
        }
        let mut pick = vec![0usize; homs.len()];
        loop {
            let gamma: Vec<&MorphismClass> = pick.iter().zip(&homs).map(|(&i, h)| &h[i]).collect();
            if self.gamma_is_natural(h, &gamma)? {
                let mut tables = Vec::with_capacity(gamma.len());
                for (c, g) in gamma.iter().enumerate() {
                    let step = self
                        .i2
                        .eval_path(g.path())
                        .expect("target instance validated");
                    tables.push(step.table().iter().map(|&y| self.eps[c][y]).collect());
                }
                out.entry(tables)
                    .or_insert_with(|| (0, gamma.iter().map(|g| (*g).clone()).collect()))
                    .0 += 1;
            }
            if !advance(&mut pick, |i| homs[i].len()) {
                break;
            }
        }
        Ok(Ok(out))
    }

    /// `H(e) ; γ_d ≅ γ_c ; F(e)` for every generator `e : c -> d`.
    fn gamma_is_natural(&self, h: &FunctorDef, gamma: &[&MorphismClass]) -> Result<bool, CatError> {
        let f = self.t.functor();
        let c1 = f.source().graph();
        let c2 = f.target();
        for e in c1.edges() {
            let decl = c1.edge_decl(e);
            let left = h.map_generator(e).then(gamma[decl.tgt.0].path())?;
            let right = gamma[decl.src.0].path().then(f.map_generator(e))?;
            if !c2.congruent(&left, &right)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn competitor(&self, index: usize, h: &FunctorDef) -> Result<Outcome, CatError> {
        let c1 = self.t.functor().source();
        let graph = c1.graph();
        let dom: Vec<usize> = c1
            .objects()
            .map(|c| self.i2.carrier(h.map_object(c)).len())
            .collect();
        let cod: Vec<usize> = c1.objects().map(|c| self.i1.carrier(c).len()).collect();
        let candidates = product(cod.iter().copied().zip(dom.iter().copied()));
        if candidates > self.caps.eta_cap as u128 {
            return Ok(Outcome::Capped(CapHit::Eta {
                functor: index,
                candidates,
                cap: self.caps.eta_cap,
            }));
        }
        let factorizations = match self.factorizations(index, h)? {
            Ok(m) => m,
            Err(hit) => return Ok(Outcome::Capped(hit)),
        };

        // Generator tables: (I2 ∘ H)(e) and I1(e).
        let squares: Vec<(ObId, ObId, Vec<usize>, Vec<usize>)> = graph
            .edges()
            .map(|e| {
                let decl = graph.edge_decl(e);
                let via_h = self.i2.eval_path(h.map_generator(e)).expect("validated");
                let via_i1 = self.i1.action(e).expect("validated");
                (decl.src, decl.tgt, via_h.table().to_vec(), via_i1.table().to_vec())
            })
            .collect();

        // One odometer digit per (object, element), object-major.
        let slots: Vec<(usize, usize)> = dom
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| (0..n).map(move |x| (c, x)))
            .collect();
        if slots.iter().any(|&(c, _)| cod[c] == 0) {
            return Ok(Outcome::Checked(0));
        }
        let mut digits = vec![0usize; slots.len()];
        let mut checked = 0u64;
        loop {
            let mut eta: Tables = dom.iter().map(|&n| vec![0; n]).collect();
            for (&(c, x), &v) in slots.iter().zip(&digits) {
                eta[c][x] = v;
            }
            let natural = squares.iter().all(|(c, d, jh, ji)| {
                (0..jh.len()).all(|x| ji[eta[c.0][x]] == eta[d.0][jh[x]])
            });
            if natural {
                checked += 1;
                match factorizations.get(&eta).map(|(n, _)| *n).unwrap_or(0) {
                    1 => {}
                    0 => return Ok(Outcome::Failed(checked, eta, FailureKind::NoFactorization)),
                    count => {
                        return Ok(Outcome::Failed(
                            checked,
                            eta,
                            FailureKind::MultipleFactorizations { count },
                        ))
                    }
                }
            }
            if !advance(&mut digits, |i| cod[slots[i].0]) {
                break;
            }
        }
        Ok(Outcome::Checked(checked))
    }

    fn self_factorization(&self) -> Result<Option<bool>, CatError> {
        let f = self.t.functor();
        let Ok(map) = self.factorizations(usize::MAX, f)? else {
            return Ok(None);
        };
        Ok(Some(match map.get(&self.eps) {
            Some((1, gamma)) => gamma.iter().all(MorphismClass::is_identity),
            _ => false,
        }))
    }

    fn eta_maps(&self, h: &FunctorDef, eta: &Tables) -> Vec<BTreeMap<Elem, Elem>> {
        self.t
            .functor()
            .source()
            .objects()
            .map(|c| {
                let dom = self.i2.carrier(h.map_object(c));
                let cod = self.i1.carrier(c);
                eta[c.0]
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| (dom.get(x).clone(), cod.get(y).clone()))
                    .collect()
            })
            .collect()
    }
}

/// Searches every competitor `(H, η)` for a unique factorization through
/// `(F, ε)`.
///
/// A cap hit skips the affected part of the search and the search goes on; a
/// definite failure found anywhere gives `fails`, otherwise any cap hit gives
/// `inconclusive`. Competitors are visited in enumeration order and the first
/// failure is reported.
pub fn check_kan_lift(
    t: &Transformation,
    caps: KanCaps,
) -> Result<UniversalityReport, TransformError> {
    let pre = check_transformation(t);
    if !pre.is_valid() {
        let reasons: Vec<String> = pre.reasons.iter().map(ToString::to_string).collect();
        return Err(TransformError::InvalidTransformation(reasons.join("; ")));
    }
    let f = t.functor();
    let (c1, c2) = (f.source(), f.target());
    let (i1, i2) = (t.source_instance(), t.target_instance());
    let bounds = c2.bounds();
    let mut report = UniversalityReport {
        verdict: Verdict::Holds,
        functors_checked: 0,
        competitors_checked: 0,
        failure: None,
        cap_hits: Vec::new(),
        caps,
        hom_cap: bounds.hom_cap,
        path_bound: bounds.path_bound,
        self_factorization: None,
    };

    for (inst, cat) in [(i1, c1), (i2, c2)] {
        for c in cat.objects() {
            let size = inst.carrier(c).len();
            if size > caps.carrier_cap {
                report.cap_hits.push(CapHit::Carrier {
                    object: cat.object_name(c).to_string(),
                    size,
                    cap: caps.carrier_cap,
                });
            }
        }
    }
    if !report.cap_hits.is_empty() {
        report.verdict = Verdict::Inconclusive;
        return Ok(report);
    }

    let eps = t
        .epsilon()?
        .components()
        .iter()
        .map(|c| c.table().to_vec())
        .collect();
    let search = Search {
        t,
        i1,
        i2,
        caps,
        eps,
    };
    let capped = |e: CatError| -> Result<CapHit, TransformError> {
        if is_cap_error(&e) {
            Ok(CapHit::Hom(e))
        } else {
            Err(e.into())
        }
    };

    match search.self_factorization() {
        Ok(v) => report.self_factorization = v,
        Err(e) => report.cap_hits.push(capped(e)?),
    }

    let functors = match enumerate_functors_upto(c1, c2, caps.functor_cap) {
        Ok((list, truncated)) => {
            if truncated {
                report.cap_hits.push(CapHit::Functors {
                    cap: caps.functor_cap,
                });
            }
            list
        }
        Err(e) => {
            report.cap_hits.push(capped(e)?);
            Vec::new()
        }
    };

    for (index, h) in functors.iter().enumerate() {
        report.functors_checked += 1;
        match search.competitor(index, h) {
            Ok(Outcome::Checked(n)) => report.competitors_checked += n,
            Ok(Outcome::Capped(hit)) => report.cap_hits.push(hit),
            Ok(Outcome::Failed(n, eta, kind)) => {
                report.competitors_checked += n;
                report.failure = Some(KanFailure {
                    functor_index: index,
                    functor: h.clone(),
                    eta: search.eta_maps(h, &eta),
                    kind,
                });
                break;
            }
            Err(e) => report.cap_hits.push(capped(e)?),
        }
    }

    report.verdict = if report.failure.is_some() {
        Verdict::Fails
    } else if report.cap_hits.is_empty() {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    Ok(report)
}
