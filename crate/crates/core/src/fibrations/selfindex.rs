use std::collections::HashMap;

use super::{FibrationError, Grothendieck, IndexedFamily, Variance};
use crate::fincat::{arrow_category, slice, CatRef, FinCat, FunctorData, Mor, NatTransData, Ob};
use crate::limits::{factor_through, pullback, Cone};

/// The contravariant family `x ↦ C/x`, transporting along chosen pullbacks.
///
/// Pullback along an identity is chosen to be the identity; otherwise the
/// least universal cone is used. With isomorphic but distinct objects around
/// the resulting pseudofunctor is not strict.
#[derive(Clone, Debug)]
pub struct SelfIndexing {
    pub family: IndexedFamily,
    /// Forgetful functors `C/x -> C`.
    pub forget: Vec<FunctorData>,
    cones: HashMap<(Mor, Mor), Cone>,
}

impl SelfIndexing {
    /// The chosen pullback of `m` (into the target of `f`) along `f`.
    pub fn cone(&self, m: Mor, f: Mor) -> Cone {
        self.cones[&(m, f)]
    }
}

fn chosen(c: &FinCat, m: Mor, f: Mor) -> Result<Cone, FibrationError> {
    if c.is_identity(f) {
        return Ok(Cone {
            apex: c.source(m),
            to_x: c.identity(c.source(m)),
            to_y: m,
        });
    }
    pullback(c, m, f).map(|pb| pb.cone()).map_err(|_| {
        FibrationError::MalformedFamily(format!(
            "no pullback of `{}` along `{}`",
            c.morphism_name(m),
            c.morphism_name(f)
        ))
    })
}

fn slice_mor(sl: &FinCat, forget: &FunctorData, a: Ob, b: Ob, u: Mor) -> Mor {
    *sl.hom(a, b)
        .iter()
        .find(|&&v| forget.mor(v) == u)
        .expect("slice morphism")
}

pub fn self_indexing(c: &CatRef) -> Result<SelfIndexing, FibrationError> {
    let (slices, forget): (Vec<CatRef>, Vec<FunctorData>) = c.objects().map(|x| slice(c, x)).unzip();
    let over = |sl: &FinCat, x: Ob| c.mor(sl.object_name(x));
    let mut cones = HashMap::new();
    for f in c.morphisms() {
        for m in c.morphisms().filter(|&m| c.target(m) == c.target(f)) {
            cones.insert((m, f), chosen(c, m, f)?);
        }
    }
    let mut transports = Vec::new();
    for f in c.morphisms() {
        let (a, b) = (c.source(f), c.target(f));
        if c.is_identity(f) {
            transports.push(FunctorData::identity(slices[a.0].clone()));
            continue;
        }
        let (sb, sa) = (&slices[b.0], &slices[a.0]);
        let obs: Vec<Ob> = sb
            .objects()
            .map(|x| sa.ob(c.morphism_name(cones[&(over(sb, x), f)].to_y)))
            .collect();
        let mut mors = Vec::new();
        for u in sb.morphisms() {
            let (x, y) = (sb.source(u), sb.target(u));
            let (kx, ky) = (cones[&(over(sb, x), f)], cones[&(over(sb, y), f)]);
            let probe = Cone {
                apex: kx.apex,
                to_x: c.comp(forget[b.0].mor(u), kx.to_x),
                to_y: kx.to_y,
            };
            let v = factor_through(c, &ky, &probe).ok_or_else(|| {
                FibrationError::MalformedFamily(format!(
                    "chosen pullback along `{}` is not universal",
                    c.morphism_name(f)
                ))
            })?;
            mors.push(slice_mor(sa, &forget[a.0], obs[x.0], obs[y.0], v));
        }
        transports.push(FunctorData::new(sb.clone(), sa.clone(), obs, mors)?);
    }
    let mut coherence = HashMap::new();
    for f in c.morphisms() {
        for g in c.morphisms().filter(|&g| c.source(g) == c.target(f)) {
            if c.is_identity(f) || c.is_identity(g) {
                continue;
            }
            let (a, top) = (c.source(f), c.target(g));
            let gf = c.comp(g, f);
            let (st, sa) = (&slices[top.0], &slices[a.0]);
            let mut comps = Vec::new();
            for z in st.objects() {
                let m = over(st, z);
                let k1 = cones[&(m, g)];
                let k2 = cones[&(k1.to_y, f)];
                let k3 = cones[&(m, gf)];
                let probe = Cone {
                    apex: k2.apex,
                    to_x: c.comp(k1.to_x, k2.to_x),
                    to_y: k2.to_y,
                };
                let v = factor_through(c, &k3, &probe)
                    .ok_or_else(|| FibrationError::MalformedFamily("pullbacks do not paste".into()))?;
                let (from, to) = (sa.ob(c.morphism_name(k2.to_y)), sa.ob(c.morphism_name(k3.to_y)));
                comps.push(slice_mor(sa, &forget[a.0], from, to, v));
            }
            let composite = transports[f.0].after(&transports[g.0])?;
            coherence.insert((g, f), NatTransData::new(composite, transports[gf.0].clone(), comps)?);
        }
    }
    let family = IndexedFamily::new(c.clone(), Variance::Contravariant, slices, transports, coherence)?;
    Ok(SelfIndexing { family, forget, cones })
}

/// The comparison from the cartesian unstraightening of the self-indexing to
/// the arrow category: `(x, m: a -> x) ↦ m`, and a morphism over `f` with
/// fiber part `u` goes to the square `(r' u, f)`, `r'` the chosen projection.
pub fn arrow_comparison(si: &SelfIndexing, g: &Grothendieck) -> Result<(FunctorData, FunctorData), FibrationError> {
    let c = si.family.base();
    let (arr, cod) = arrow_category(c);
    let fam = &si.family;
    let obs: Vec<Ob> = g
        .ob_keys
        .iter()
        .map(|&(x, o)| arr.ob(fam.fiber(x).object_name(o)))
        .collect();
    let mut mors = Vec::new();
    for &(f, y, phi) in &g.mor_keys {
        let (a, b) = (c.source(f), c.target(f));
        let (sa, sb) = (fam.fiber(a), fam.fiber(b));
        let mx = c.mor(sa.object_name(sa.source(phi)));
        let my = c.mor(sb.object_name(y));
        let u = c.comp(si.cone(my, f).to_x, si.forget[a.0].mor(phi));
        let name = format!(
            "{}=>{}[{},{}]",
            c.morphism_name(mx),
            c.morphism_name(my),
            c.morphism_name(u),
            c.morphism_name(f)
        );
        let m = arr
            .morphism(&name)
            .ok_or_else(|| FibrationError::MalformedFamily(format!("no square `{name}`")))?;
        mors.push(m);
    }
    let phi = FunctorData::new(g.total.clone(), arr, obs, mors)?;
    Ok((phi, cod))
}
