//! First-return dynamics on the section of geodesics through the base horosphere,
//! the quotient coding and the decorated coding by affine maps.
//!
//! A section point is a pair `(xi_minus, xi_plus)` of irrational endpoints with
//! `xi_plus` in X^-1 O and `[xi_minus]` of positive degree. Its quotient coding
//! reads `a_n` (`n >= 1`) off the continued fraction of `xi_plus` and `a_-n`
//! (`n >= 0`) off that of `-1/xi_minus`.

use std::fmt;

use serde::Serialize;

use crate::algebra::{FieldSpec, Poly};
use crate::artin::{artin_step, cf_expand, PartialQuotient, Termination};
use crate::error::{Error, Result};
use crate::laurent::{LaurentSeries, Valuation};
use crate::moebius::{
    affine_decompose, homography_from_triple, involution_through, AffineMap, Homography,
    ProjPoint,
};

/// Entry types that carry a validity predicate for sequence windows.
pub trait Admissible {
    fn admissible(&self) -> bool;
}

impl Admissible for PartialQuotient {
    fn admissible(&self) -> bool {
        true
    }
}

impl Admissible for AffineMap {
    fn admissible(&self) -> bool {
        self.in_gamma_prime()
    }
}

impl Admissible for Homography {
    fn admissible(&self) -> bool {
        true
    }
}

impl Admissible for ProjPoint {
    fn admissible(&self) -> bool {
        true
    }
}

/// A finite window `x_start, ..., x_end` of a bilateral sequence.
#[derive(Clone, PartialEq, Eq)]
pub struct Window<T> {
    start: i64,
    items: Vec<T>,
}

pub type QuotientSeq = Window<PartialQuotient>;
pub type BetaSeq = Window<AffineMap>;

impl<T: Admissible> Window<T> {
    pub fn new(start: i64, items: Vec<T>) -> Result<Self> {
        if let Some(i) = items.iter().position(|x| !x.admissible()) {
            return Err(Error::InvalidArgument(format!(
                "entry at index {} is not admissible",
                start + i as i64
            )));
        }
        Ok(Window { start, items })
    }
}

impl<T> Window<T> {
    pub(crate) fn from_parts(start: i64, items: Vec<T>) -> Self {
        Window { start, items }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last index (inclusive); `start - 1` for an empty window.
    pub fn end(&self) -> i64 {
        self.start + self.items.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, n: i64) -> Option<&T> {
        if n < self.start {
            return None;
        }
        self.items.get((n - self.start) as usize)
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> {
        self.items
            .iter()
            .enumerate()
            .map(move |(i, x)| (self.start + i as i64, x))
    }

    /// `sigma^k`: the sequence `n -> x_(n + k)`.
    pub fn shift(&self, k: i64) -> Self
    where
        T: Clone,
    {
        Window {
            start: self.start - k,
            items: self.items.clone(),
        }
    }

    /// Sub-window on `[lo, hi]` intersected with the current range.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self
    where
        T: Clone,
    {
        let lo = lo.max(self.start);
        let hi = hi.min(self.end());
        let items = if lo > hi {
            Vec::new()
        } else {
            self.items[(lo - self.start) as usize..=(hi - self.start) as usize].to_vec()
        };
        Window { start: lo, items }
    }

    /// Whether both windows agree on every index where both are defined.
    pub fn agrees_on_overlap(&self, other: &Self) -> bool
    where
        T: PartialEq,
    {
        let (lo, hi) = (self.start.max(other.start), self.end().min(other.end()));
        (lo..=hi).all(|n| self.get(n) == other.get(n))
    }
}

impl<T: fmt::Debug> fmt::Debug for Window<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

/// Time reversal `kappa`: `n -> x_(-n)^-1`.
pub fn kappa(seq: &BetaSeq) -> BetaSeq {
    Window {
        start: -seq.end(),
        items: seq.items.iter().rev().map(AffineMap::inverse).collect(),
    }
}

#[derive(Serialize)]
struct BetaJson {
    n: i64,
    u: String,
    a: String,
}

pub fn beta_seq_json(seq: &BetaSeq) -> serde_json::Value {
    let rows: Vec<BetaJson> = seq
        .iter()
        .map(|(n, b)| BetaJson {
            n,
            u: b.field().render(b.u),
            a: b.a.to_string(),
        })
        .collect();
    serde_json::to_value(rows).expect("plain data")
}

/// A point `(xi_minus, xi_plus)` of the section.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicSection {
    pub xi_minus: LaurentSeries,
    pub xi_plus: LaurentSeries,
}

impl GeodesicSection {
    pub fn new(xi_minus: LaurentSeries, xi_plus: LaurentSeries) -> Result<Self> {
        match xi_plus.valuation() {
            Valuation::Finite(v) if v >= 1 => {}
            Valuation::Finite(v) => {
                return Err(Error::Domain(format!(
                    "forward endpoint has valuation {v}, not in X^-1 O"
                )))
            }
            Valuation::Infinite => return Err(Error::RationalEndpoint),
            Valuation::AtLeast(_) => return Err(exhausted(&xi_plus)),
        }
        match xi_minus.val() {
            Ok(v) if v <= -1 => {}
            Ok(_) => {
                return Err(Error::Domain(
                    "backward endpoint must have an integer part of positive degree".into(),
                ))
            }
            Err(Error::DivisionByZero) => return Err(Error::RationalEndpoint),
            Err(_) => return Err(exhausted(&xi_minus)),
        }
        if xi_minus.prec() < 0 {
            return Err(exhausted(&xi_minus));
        }
        Ok(GeodesicSection { xi_minus, xi_plus })
    }

    pub fn field(&self) -> &FieldSpec {
        self.xi_plus.field()
    }

    /// The section point of the reversed geodesic: `(1/xi_plus, 1/xi_minus)`.
    pub fn reversed(&self) -> Result<Self> {
        Self::new(self.xi_plus.invert()?, self.xi_minus.invert()?)
    }
}

fn exhausted(f: &LaurentSeries) -> Error {
    Error::PrecisionExhausted {
        needed: 1,
        available: f.prec(),
    }
}

/// One first-return step: `(1/xi_minus - a_1, Psi(xi_plus))`, together with `a_1`.
pub fn psi_tilde(s: &GeodesicSection) -> Result<(GeodesicSection, PartialQuotient)> {
    let (a, xi_plus) = artin_step(&s.xi_plus)?;
    let xi_minus = s.xi_minus.invert()?.add_poly(&-a.poly());
    Ok((GeodesicSection::new(xi_minus, xi_plus)?, a))
}

fn expand_exactly(f: &LaurentSeries, n: usize) -> Result<Vec<PartialQuotient>> {
    let cf = cf_expand(f, n)?;
    if cf.terms.len() == n {
        return Ok(cf.terms);
    }
    match cf.terminated {
        Termination::ExactRational => Err(Error::RationalEndpoint),
        _ => Err(Error::PrecisionExhausted {
            needed: 1,
            available: cf.final_prec,
        }),
    }
}

/// The quotients `a_-n_back, ..., a_n_fwd`.
pub fn theta_prime(s: &GeodesicSection, n_back: usize, n_fwd: usize) -> Result<QuotientSeq> {
    let fwd = expand_exactly(&s.xi_plus, n_fwd)?;
    let back = expand_exactly(&s.xi_minus.invert()?.neg(), n_back + 1)?;
    let mut items: Vec<PartialQuotient> = back.into_iter().rev().collect();
    items.extend(fwd);
    Window::new(-(n_back as i64), items)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitStep {
    pub a: PartialQuotient,
    /// Precision of the forward endpoint after the step.
    pub prec_remaining: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Orbit {
    pub steps: Vec<OrbitStep>,
    pub terminated: Termination,
    pub final_prec: i64,
}

impl Orbit {
    /// CSV with header `step,a,deg,prec_remaining,status`; the last row records
    /// why the run stopped.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,a,deg,prec_remaining,status\n");
        for (i, st) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},emitted\n",
                i + 1,
                st.a,
                st.a.degree(),
                st.prec_remaining
            ));
        }
        out.push_str(&format!(
            "{},,,{},{}\n",
            self.steps.len() + 1,
            self.final_prec,
            self.terminated.as_str()
        ));
        out
    }
}

/// Iterates the first-return map up to `max_steps` times. Unlike `psi_tilde`,
/// a rational forward endpoint is a normal way to stop.
pub fn orbit(xi_minus: &LaurentSeries, xi_plus: &LaurentSeries, max_steps: usize) -> Result<Orbit> {
    let (mut xm, mut xp) = (xi_minus.clone(), xi_plus.clone());
    let mut steps = Vec::new();
    let terminated = loop {
        if xp.is_exact_zero() {
            break Termination::ExactRational;
        }
        if xp.is_zero_to_precision() {
            break Termination::PrecisionExhausted;
        }
        if steps.len() >= max_steps {
            break Termination::RequestedLengthReached;
        }
        let (a, next) = match artin_step(&xp) {
            Ok(r) => r,
            Err(Error::PrecisionExhausted { .. }) => break Termination::PrecisionExhausted,
            Err(e) => return Err(e),
        };
        if !crate::artin::budget_allows(&next) {
            break Termination::PrecisionExhausted;
        }
        xm = xm.invert()?.add_poly(&-a.poly());
        xp = next;
        steps.push(OrbitStep {
            a,
            prec_remaining: xp.prec(),
        });
    };
    Ok(Orbit {
        steps,
        terminated,
        final_prec: xp.prec(),
    })
}

/// Everything the decorated coding computes on a window.
#[derive(Clone, Debug)]
pub struct DecoratedCoding {
    pub quotients: QuotientSeq,
    pub betas: BetaSeq,
    /// `gamma_n` for `n` in `[-n_back - 1, n_fwd]`.
    pub gammas: Window<Homography>,
    /// Horoball centres `xi_n` for `n` in `[-n_back - 1, n_fwd + 1]`.
    pub xis: Window<ProjPoint>,
    /// Decoration centres `eta_n` for `n` in `[-n_back - 1, n_fwd]`.
    pub etas: Window<ProjPoint>,
}

fn consistency(msg: String) -> Error {
    Error::Consistency(msg)
}

fn check_gamma(h: &Homography, what: &str) -> Result<()> {
    if h.is_in_gamma() {
        Ok(())
    } else {
        Err(consistency(format!("{what} = {h} is not in PGL(2, A)")))
    }
}

/// The decorated coding `beta_n = i gamma_(n-1)^-1 gamma_n` on `[-n_back, n_fwd]`.
///
/// The horoball centres are the convergents of both endpoints; the decoration is
/// carried along by the involutions fixing each centre and swapping its
/// neighbours. Every call checks that the normal-form reduction of each
/// `gamma_n` and `beta_n` returns the partial quotients of the section.
pub fn code_decorated(s: &GeodesicSection, n_back: usize, n_fwd: usize) -> Result<DecoratedCoding> {
    let quotients = theta_prime(s, n_back, n_fwd)?;
    let k = s.field().clone();
    let a = |n: i64| quotients.get(n).expect("inside window").poly().clone();
    let inv = Homography::inversion(&k);
    let nb = n_back as i64;
    let nf = n_fwd as i64;

    // xi_n: forward convergents i t_a1 ... i t_an (0), backward
    // -(t_a0 i t_a-1 ... i t_a-(n-1)) (0).
    let lo = -nb - 1;
    let mut xis = vec![ProjPoint::Infinity; (nf + 2 - lo + 1) as usize];
    let ix = |n: i64| (n - lo) as usize;
    let mut fwd_prefix = vec![Homography::identity(&k)];
    for n in 1..=nf {
        let p = fwd_prefix[n as usize - 1]
            .compose(&inv)
            .compose(&Homography::translation(&a(n)));
        fwd_prefix.push(p);
    }
    for n in 0..=nf {
        xis[ix(n + 1)] = fwd_prefix[n as usize].apply(&ProjPoint::zero(&k));
    }
    let neg = Homography::dilation(&k, k.neg(k.one()))?;
    let mut back_prefix = vec![neg.compose(&Homography::translation(&a(0)))];
    for m in 1..=nb {
        let p = back_prefix[m as usize - 1]
            .compose(&inv)
            .compose(&Homography::translation(&a(-m)));
        back_prefix.push(p);
    }
    for m in 1..=nb + 1 {
        xis[ix(-m)] = back_prefix[m as usize - 1].apply(&ProjPoint::zero(&k));
    }
    let xi = |n: i64| &xis[ix(n)];

    // eta_n
    let mut etas = vec![ProjPoint::one(&k); (nf - lo + 1) as usize];
    for n in 0..nf {
        let s_half = involution_through(xi(n + 1), (xi(n), xi(n + 2)))?;
        check_gamma(&s_half, "involution")?;
        etas[ix(n + 1)] = s_half.apply(&etas[ix(n)]);
    }
    for n in (lo + 1..=0).rev() {
        let s_half = involution_through(xi(n), (xi(n + 1), xi(n - 1)))?;
        check_gamma(&s_half, "involution")?;
        etas[ix(n - 1)] = s_half.apply(&etas[ix(n)]);
    }

    let mut gammas = Vec::with_capacity((nf - lo + 1) as usize);
    for n in lo..=nf {
        let g = homography_from_triple(xi(n), &etas[ix(n)], xi(n + 1))?;
        check_gamma(&g, "gamma")?;
        gammas.push(g);
    }
    let gamma = |n: i64| &gammas[ix(n)];
    if *gamma(0) != Homography::identity(&k) {
        return Err(consistency("gamma_0 is not the identity".into()));
    }

    let mut betas = Vec::with_capacity(n_back + n_fwd + 1);
    for n in -nb..=nf {
        let h = inv.compose(&gamma(n - 1).inverse()).compose(gamma(n));
        let b = affine_decompose(&h)
            .map_err(|e| consistency(format!("beta_{n} = {h}: {e}")))?;
        if !b.in_gamma_prime() {
            return Err(consistency(format!("beta_{n} = {b} fixes the base vertex")));
        }
        betas.push(b);
    }
    let betas = Window::new(-nb, betas)?;

    // Normal form: gamma_n = i t_a1 ... i t_an lambda_(r_n) with
    // beta_n = (r_(n-1) r_n, r_(n-1) a_n), and on the backward side
    // gamma_-n = -t_a0 i t_a-1 ... i t_a-(n-1) lambda_(rho_n) i.
    let mut r = k.one();
    for n in 1..=nf {
        let b = betas.get(n).unwrap();
        let an = b.a.scale(k.inv(r)?);
        if an != a(n) {
            return Err(consistency(format!(
                "beta_{n} = {b} reduces to {an}, expected {}",
                a(n)
            )));
        }
        r = k.div(b.u, r)?;
        let nf_form = fwd_prefix[n as usize].compose(&Homography::dilation(&k, r)?);
        if nf_form != *gamma(n) {
            return Err(consistency(format!("gamma_{n} is not in normal form")));
        }
    }
    let mut rho = k.neg(k.one());
    for m in 0..=nb {
        let b = betas.get(-m).unwrap();
        let d = k.mul(rho, b.u);
        let am = (-&b.a).scale(k.inv(d)?);
        if am != a(-m) {
            return Err(consistency(format!(
                "beta_{} = {b} reduces to {am}, expected {}",
                -m,
                a(-m)
            )));
        }
        rho = k.inv(d)?;
        let nf_form = back_prefix[m as usize]
            .compose(&Homography::dilation(&k, rho)?)
            .compose(&inv);
        if nf_form != *gamma(-m - 1) {
            return Err(consistency(format!("gamma_{} is not in normal form", -m - 1)));
        }
    }

    Ok(DecoratedCoding {
        quotients,
        betas,
        gammas: Window {
            start: lo,
            items: gammas,
        },
        xis: Window {
            start: lo,
            items: xis,
        },
        etas: Window {
            start: lo,
            items: etas,
        },
    })
}

/// Rebuilds `gamma_n` from `gamma_0 = id` via `gamma_n = gamma_(n-1) i beta_n`.
/// The window must reach index 0 or 1; the result covers `[start - 1, end]`.
pub fn reconstruct_from_beta(seq: &BetaSeq) -> Result<Window<Homography>> {
    let (lo, hi) = (seq.start(), seq.end());
    if seq.is_empty() || lo > 1 || hi < 0 {
        return Err(Error::InvalidArgument(format!(
            "window [{lo}, {hi}] does not touch index 0 or 1"
        )));
    }
    let k = seq.items[0].field().clone();
    let inv = Homography::inversion(&k);
    let mut fwd = vec![Homography::identity(&k)];
    for n in 1..=hi {
        let g = fwd.last().unwrap().compose(&inv).compose(&seq.get(n).unwrap().to_homography());
        fwd.push(g);
    }
    let mut back = Vec::new();
    let mut g = Homography::identity(&k);
    for n in (lo..=0).rev() {
        g = g
            .compose(&seq.get(n).unwrap().inverse().to_homography())
            .compose(&inv);
        back.push(g.clone());
    }
    back.reverse();
    back.extend(fwd);
    Ok(Window {
        start: lo - 1,
        items: back,
    })
}

/// Convenience for tests and the CLI: the section with rational data
/// `xi_minus = a + f`, `xi_plus = g` at precision `prec`.
pub fn section_from_parts(
    a: &Poly,
    f: &LaurentSeries,
    g: &LaurentSeries,
) -> Result<GeodesicSection> {
    GeodesicSection::new(f.add_poly(a), g.clone())
}
