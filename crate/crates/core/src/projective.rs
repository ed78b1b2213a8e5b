//! Projective points, affine charts and parametrized projective curves.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::SeriesError;
use crate::invariants::{multseq_delta, MultiplicitySequence};
use crate::poly::{univariate, Poly, Rat};
use crate::series::{multseq_from_branch, with_precision_retry, LocalBranch, TruncatedSeries};

pub const XYZ: [&str; 3] = ["x", "y", "z"];
pub const TS: [&str; 2] = ["t", "s"];

/// Homogeneous coordinates, parsed from `[0:1:0]` or `[1:0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectivePoint(Vec<Rat>);

impl ProjectivePoint {
    pub fn new(coords: Vec<Rat>) -> Result<Self, SeriesError> {
        if coords.iter().all(|c| c.is_zero()) {
            return Err(SeriesError::DegenerateImage);
        }
        Ok(ProjectivePoint(coords))
    }

    pub fn parse(text: &str) -> Result<Self, SeriesError> {
        let err = |msg: &str| SeriesError::Parse { pos: 0, msg: msg.to_string() };
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| err("expected `[a:b:...]`"))?;
        let coords = inner
            .split(':')
            .map(|c| Rat::from_str(c.trim()).map_err(|_| err(&format!("bad coordinate `{}`", c.trim()))))
            .collect::<Result<Vec<_>, _>>()?;
        if coords.len() < 2 {
            return Err(err("need at least two coordinates"));
        }
        ProjectivePoint::new(coords).map_err(|_| err("all coordinates are zero"))
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Index of the first nonzero coordinate.
    pub fn pivot(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).expect("nonzero point")
    }

    /// Scaled so the pivot coordinate is 1.
    pub fn normalized(&self) -> ProjectivePoint {
        let k = self.0[self.pivot()].clone();
        ProjectivePoint(self.0.iter().map(|c| c / &k).collect())
    }

    pub fn same_point(&self, other: &ProjectivePoint) -> bool {
        self.normalized() == other.normalized()
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

/// The affine chart `{X_k ≠ 0}` around a point of the plane, with local
/// coordinates the two remaining ratios translated to the origin, in their
/// original order.
#[derive(Debug, Clone)]
pub struct AffineChart {
    point: ProjectivePoint,
    pivot: usize,
    local: [usize; 2],
}

impl AffineChart {
    pub fn at(point: &ProjectivePoint) -> Result<Self, SeriesError> {
        if point.dim() != 3 {
            return Err(SeriesError::Parse { pos: 0, msg: "expected a point of the plane".into() });
        }
        let point = point.normalized();
        let pivot = point.pivot();
        let rest: Vec<usize> = (0..3).filter(|&i| i != pivot).collect();
        Ok(AffineChart { point, pivot, local: [rest[0], rest[1]] })
    }

    /// Names of the local coordinates, e.g. `("x", "z")` in the chart `y = 1`.
    pub fn local_names(&self) -> (&'static str, &'static str) {
        (XYZ[self.local[0]], XYZ[self.local[1]])
    }

    /// A form in `x, y, z` written in the local coordinates (named `x, y`).
    pub fn localize(&self, g: &Poly) -> Poly {
        let vars = ["x", "y"];
        let mut subs = vec![Poly::zero(&vars); 3];
        subs[self.pivot] = Poly::constant(&vars, Rat::one());
        for (slot, &i) in self.local.iter().enumerate() {
            subs[i] = Poly::var(&vars, slot).add(&Poly::constant(&vars, self.point.0[i].clone()));
        }
        g.compose(&subs)
    }
}

/// Three binary forms of one degree defining a map from the projective line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveParametrization {
    forms: [Poly; 3],
}

impl ProjectiveParametrization {
    pub fn new(forms: [Poly; 3]) -> Result<Self, SeriesError> {
        let forms = forms.map(|f| f.with_vars(&TS));
        if forms.iter().all(|f| f.is_zero()) {
            return Err(SeriesError::ZeroPolynomial);
        }
        let degs: Vec<u32> = forms.iter().filter(|f| !f.is_zero()).map(|f| f.total_degree()).collect();
        if forms.iter().any(|f| !f.is_homogeneous()) || degs.iter().any(|&d| d != degs[0]) {
            return Err(SeriesError::NotHomogeneous);
        }
        let p = ProjectiveParametrization { forms };
        if p.common_factor_degree() > 0 {
            return Err(SeriesError::NotPrimitive);
        }
        Ok(p)
    }

    /// Parses `"X, Y, Z"` with each form in `t` and `s`.
    pub fn parse(text: &str) -> Result<Self, SeriesError> {
        let mut parts = Vec::new();
        let (mut depth, mut start) = (0i32, 0usize);
        for (i, ch) in text.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push((start, &text[start..i]));
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push((start, &text[start..]));
        if parts.len() != 3 {
            return Err(SeriesError::Parse { pos: 0, msg: "expected three comma-separated forms".into() });
        }
        let mut forms = Vec::new();
        for (offset, part) in parts {
            forms.push(Poly::parse(part, &TS).map_err(|e| match e {
                SeriesError::Parse { pos, msg } => SeriesError::Parse { pos: pos + offset, msg },
                other => other,
            })?);
        }
        let [x, y, z]: [Poly; 3] = forms.try_into().expect("three forms");
        ProjectiveParametrization::new([x, y, z])
    }

    pub fn forms(&self) -> &[Poly; 3] {
        &self.forms
    }

    pub fn degree(&self) -> u32 {
        self.forms.iter().map(|f| f.total_degree()).max().unwrap_or(0)
    }

    /// Image of a rational parameter value.
    pub fn image(&self, at: &ProjectivePoint) -> Result<ProjectivePoint, SeriesError> {
        let coords: Vec<Rat> = self.forms.iter().map(|f| f.eval(at.coords())).collect();
        ProjectivePoint::new(coords)
    }

    /// Degree of the greatest common divisor of the three forms.
    pub fn common_factor_degree(&self) -> u32 {
        binary_gcd_degree(self.forms.iter())
    }

    /// Number of distinct parameter values with the same image as `at`.
    pub fn fiber_size(&self, at: &ProjectivePoint) -> Result<usize, SeriesError> {
        let c = self.image(at)?;
        let c = c.coords();
        let mut minors = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                let m = self.forms[j].scale(&c[i]).sub(&self.forms[i].scale(&c[j]));
                if !m.is_zero() {
                    minors.push(m);
                }
            }
        }
        let d = self.degree() as usize;
        let g = binary_gcd(minors.iter(), d);
        Ok(distinct_binary_roots(&g))
    }

    /// The germ of the image curve at the image of `at`, in the chart of
    /// [`AffineChart::at`] for that image point, as a branch in a local
    /// parameter centred at `at`.
    pub fn localize(&self, at: &ProjectivePoint, prec: u32) -> Result<(ProjectivePoint, LocalBranch), SeriesError> {
        if at.dim() != 2 {
            return Err(SeriesError::Parse { pos: 0, msg: "expected a parameter value [t:s]".into() });
        }
        let (t0, s0) = (&at.coords()[0], &at.coords()[1]);
        let eps = ["e"];
        let e = Poly::var(&eps, 0);
        let subs = if !s0.is_zero() {
            [e.add(&Poly::constant(&eps, t0 / s0)), Poly::constant(&eps, Rat::one())]
        } else {
            [Poly::constant(&eps, Rat::one()), e]
        };
        let series: Vec<TruncatedSeries> = self
            .forms
            .iter()
            .map(|f| TruncatedSeries::from_poly(&f.compose(&subs), prec))
            .collect();
        let image = ProjectivePoint::new(
            series.iter().map(|s| s.coeff(0)).collect::<Result<Vec<_>, _>>()?,
        )
        .map_err(|_| SeriesError::DegenerateImage)?;
        let pivot = image.pivot();
        let den = &series[pivot];
        let mut coords = Vec::new();
        for (i, s) in series.iter().enumerate() {
            if i != pivot {
                coords.push(s.div(den)?.without_constant());
            }
        }
        let y = coords.pop().expect("two coordinates");
        let x = coords.pop().expect("two coordinates");
        Ok((image.normalized(), LocalBranch::new(x, y)?))
    }
}

impl fmt::Display for ProjectiveParametrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, {}, {}", self.forms[0], self.forms[1], self.forms[2])
    }
}

/// Dense coefficients of `f(t, 1)`.
fn dehomogenize(f: &Poly) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); f.degree_in(0) as usize + 1];
    for (e, c) in f.terms() {
        out[e[0] as usize] += c;
    }
    univariate::trim(&mut out);
    out
}

/// Gcd of binary forms of degree `d`, as a dehomogenized polynomial plus
/// the multiplicity of the root at `[1:0]`.
fn binary_gcd<'a>(forms: impl Iterator<Item = &'a Poly>, d: usize) -> (Vec<Rat>, usize) {
    let mut g: Vec<Rat> = Vec::new();
    let mut at_infinity = d;
    for f in forms {
        if f.is_zero() {
            continue;
        }
        let deh = dehomogenize(f);
        let deg = univariate::degree(&deh).unwrap_or(0);
        at_infinity = at_infinity.min(f.total_degree() as usize - deg);
        g = univariate::gcd(&g, &deh);
    }
    (g, at_infinity)
}

fn binary_gcd_degree<'a>(forms: impl Iterator<Item = &'a Poly>) -> u32 {
    let forms: Vec<&Poly> = forms.collect();
    let d = forms.iter().map(|f| f.total_degree()).max().unwrap_or(0) as usize;
    let (g, inf) = binary_gcd(forms.into_iter(), d);
    (univariate::degree(&g).unwrap_or(0) + inf) as u32
}

fn distinct_binary_roots(g: &(Vec<Rat>, usize)) -> usize {
    univariate::distinct_roots(&g.0) + usize::from(g.1 > 0)
}

/// Local data of one parameter value of a parametrized curve.
#[derive(Debug, Clone)]
pub struct ParameterPointReport {
    pub parameter: ProjectivePoint,
    pub image: ProjectivePoint,
    pub fiber_size: usize,
    pub branch: LocalBranch,
    pub multseq: MultiplicitySequence,
    pub delta: BigUint,
}

/// Localizes at `at` and resolves the branch, doubling precision from
/// `start` as needed.
pub fn analyze_parameter(
    p: &ProjectiveParametrization,
    at: &ProjectivePoint,
    start: u32,
) -> Result<ParameterPointReport, SeriesError> {
    let fiber_size = p.fiber_size(at)?;
    with_precision_retry(start, |n| {
        let (image, branch) = p.localize(at, n)?;
        let multseq = multseq_from_branch(&branch)?;
        let delta = multseq_delta(&multseq);
        Ok(ParameterPointReport { parameter: at.clone(), image, fiber_size, branch, multseq, delta })
    })
}

/// Evidence that the given parameter values account for every singular
/// point of the image curve.
#[derive(Debug, Clone)]
pub struct SingularityCertificate {
    pub points: Vec<ParameterPointReport>,
    /// The map is birational onto its image: some analysed point has a
    /// single preimage and a primitive branch (resolution reached
    /// multiplicity 1), so the map has degree 1.
    pub birational: bool,
    pub degree: u32,
    pub arithmetic_genus: BigUint,
    pub delta_sum: BigUint,
    pub distinct_images: bool,
}

impl SingularityCertificate {
    /// True when the listed points are unibranch, pairwise distinct, and
    /// their delta invariants exhaust the arithmetic genus, so the image
    /// curve has no other singular point.
    pub fn exhaustive(&self) -> bool {
        self.birational
            && self.distinct_images
            && self.points.iter().all(|r| r.fiber_size == 1)
            && self.arithmetic_genus == self.delta_sum
    }
}

pub fn certify_singular_points(
    p: &ProjectiveParametrization,
    params: &[ProjectivePoint],
    start: u32,
) -> Result<SingularityCertificate, SeriesError> {
    let points = params
        .iter()
        .map(|at| analyze_parameter(p, at, start))
        .collect::<Result<Vec<_>, _>>()?;
    let birational = points.iter().any(|r| r.fiber_size == 1);
    let degree = p.degree();
    let d = BigUint::from(degree);
    let arithmetic_genus = if degree >= 1 {
        (&d - 1u32) * (&d - BigUint::from(2u32).min(d.clone())) / 2u32
    } else {
        BigUint::zero()
    };
    let delta_sum = points.iter().map(|r| r.delta.clone()).sum();
    let mut distinct_images = true;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if a.image.same_point(&b.image) {
                distinct_images = false;
            }
        }
    }
    Ok(SingularityCertificate { points, birational, degree, arithmetic_genus, delta_sum, distinct_images })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::series::pullback_order;

    fn pt(s: &str) -> ProjectivePoint {
        ProjectivePoint::parse(s).unwrap()
    }

    #[test]
    fn points_parse_and_normalize() {
        let p = pt("[0:2:0]");
        assert_eq!(p.normalized(), pt("[0:1:0]"));
        assert_eq!(pt("[1/2:1]").coords()[0], Rat::new(1.into(), 2.into()));
        assert!(ProjectivePoint::parse("[0:0:0]").is_err());
        assert!(ProjectivePoint::parse("0:1").is_err());
        assert_eq!(pt("[1:0:2]").to_string(), "[1:0:2]");
    }

    #[test]
    fn chart_localizes_forms() {
        let chart = AffineChart::at(&pt("[0:1:0]")).unwrap();
        assert_eq!(chart.local_names(), ("x", "z"));
        let g = Poly::parse("(y*z - x^2)^2 - x^3*y", &XYZ).unwrap();
        let local = chart.localize(&g);
        assert_eq!(local, Poly::parse("(y - x^2)^2 - x^3", &["x", "y"]).unwrap());
        let chart = AffineChart::at(&pt("[1:0:1]")).unwrap();
        assert_eq!(chart.local_names(), ("y", "z"));
        assert_eq!(chart.localize(&Poly::parse("z - x", &XYZ).unwrap()), Poly::parse("y", &["x", "y"]).unwrap());
    }

    #[test]
    fn parametrization_validation() {
        assert_eq!(ProjectiveParametrization::parse("t^2, t*s, s").unwrap_err(), SeriesError::NotHomogeneous);
        assert_eq!(ProjectiveParametrization::parse("t^2, t*s, t^2+t*s").unwrap_err(), SeriesError::NotPrimitive);
        assert_eq!(ProjectiveParametrization::parse("t^2*s, t*s^2, s^3").unwrap_err(), SeriesError::NotPrimitive);
        let conic = ProjectiveParametrization::parse("t^2, t*s, s^2").unwrap();
        assert_eq!(conic.degree(), 2);
        assert_eq!(conic.fiber_size(&pt("[1:1]")).unwrap(), 1);
    }

    #[test]
    fn cuspidal_cubic() {
        let cubic = ProjectiveParametrization::parse("t^2*s, t^3, s^3").unwrap();
        let r = analyze_parameter(&cubic, &pt("[0:1]"), 12).unwrap();
        assert_eq!(r.image, pt("[0:0:1]"));
        assert_eq!(r.multseq, MultiplicitySequence::new(vec![2]).unwrap());
        let smooth = analyze_parameter(&cubic, &pt("[1:1]"), 12).unwrap();
        assert!(smooth.multseq.is_empty());
        let cert = certify_singular_points(&cubic, &[pt("[0:1]")], 12).unwrap();
        assert!(cert.exhaustive());
        let tangent = Poly::parse("y", &["x", "y"]).unwrap();
        assert_eq!(pullback_order(&r.branch, &tangent), Ok(3));
    }

    #[test]
    fn nodal_cubic_has_two_preimages() {
        // t ↦ [t^2 s - s^3 : t^3 - t s^2 : s^3] sends t = ±1 to [0:0:1].
        let nodal = ProjectiveParametrization::parse("t^2*s - s^3, t^3 - t*s^2, s^3").unwrap();
        assert_eq!(nodal.fiber_size(&pt("[1:1]")).unwrap(), 2);
        let cert = certify_singular_points(&nodal, &[pt("[1:1]")], 12).unwrap();
        assert!(!cert.exhaustive());
        assert_eq!(nodal.image(&pt("[2:1]")).unwrap(), pt("[3:6:1]"));
    }

    #[test]
    fn bicuspidal_fourteen() {
        let f = ProjectiveParametrization::parse(
            "3t^14 + 3s t^13 + 2s^2 t^12, 3s^12 t^2 - 3s^13 t + s^14, 3s^6 t^8",
        )
        .unwrap();
        let cert = certify_singular_points(&f, &[pt("[0:1]"), pt("[1:0]")], 56).unwrap();
        assert_eq!(cert.points[0].image, pt("[0:1:0]"));
        assert_eq!(cert.points[0].multseq.to_string(), "[8,4,4,2,2]");
        assert_eq!(cert.points[1].image, pt("[1:0:0]"));
        assert_eq!(cert.points[1].multseq.to_string(), "[6,6,3,3]");
        assert_eq!(cert.delta_sum, BigUint::from(78u32));
        assert!(cert.exhaustive());
    }

    #[test]
    fn degenerate_image() {
        let p = ProjectiveParametrization::parse("t^2, t*s, s^2").unwrap();
        assert!(p.image(&pt("[0:1]")).is_ok());
        let err = ProjectivePoint::new(vec![rat(0), rat(0), rat(0)]).unwrap_err();
        assert_eq!(err, SeriesError::DegenerateImage);
    }
}
