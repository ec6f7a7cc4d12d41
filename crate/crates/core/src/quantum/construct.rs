//! MUBs, MUMs, general SIC-POVMs and rank-one SICs.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;

use num_complex::Complex64;

use super::gell_mann::gell_mann_basis;
use super::measurement::{MeasurementKind, MeasurementSet, Povm, RELATION_TOLERANCE};
use super::{hermitian_spectrum, hermitize, projector, CMatrix, CVector};
use crate::error::{domain, Error, Result};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Complete set of `d + 1` mutually unbiased bases for `d` prime or `d = 4`.
pub fn mub_set(d: usize) -> Result<MeasurementSet> {
    let bases = match d {
        2 => qubit_bases(),
        4 => ququart_bases(),
        _ if is_prime(d) => prime_bases(d),
        _ => {
            return Err(Error::Unsupported(format!(
                "no complete MUB construction for d = {d} (need a prime or 4)"
            )))
        }
    };
    let povms = bases
        .iter()
        .map(|b| Povm::from_basis(b))
        .collect::<Result<Vec<_>>>()?;
    MeasurementSet::new(MeasurementKind::Mub, povms)
}

fn vector(entries: &[Complex64], scale: f64) -> CVector {
    CVector::from_iterator(entries.len(), entries.iter().map(|z| z * scale))
}

fn computational(d: usize) -> Vec<CVector> {
    (0..d)
        .map(|i| CVector::from_fn(d, |k, _| cx(if k == i { 1.0 } else { 0.0 }, 0.0)))
        .collect()
}

fn qubit_bases() -> Vec<Vec<CVector>> {
    let s = FRAC_1_SQRT_2;
    vec![
        computational(2),
        vec![vector(&[cx(1.0, 0.0), cx(1.0, 0.0)], s), vector(&[cx(1.0, 0.0), cx(-1.0, 0.0)], s)],
        vec![vector(&[cx(1.0, 0.0), cx(0.0, 1.0)], s), vector(&[cx(1.0, 0.0), cx(0.0, -1.0)], s)],
    ]
}

/// Computational basis plus `{ω^{rk²+jk}/√d}_j` for `r = 0..d`; unbiased for
/// odd primes.
fn prime_bases(d: usize) -> Vec<Vec<CVector>> {
    let mut out = vec![computational(d)];
    let norm = 1.0 / (d as f64).sqrt();
    for r in 0..d {
        let basis = (0..d)
            .map(|j| {
                CVector::from_fn(d, |k, _| {
                    let exponent = (r * k * k + j * k) % d;
                    Complex64::from_polar(norm, 2.0 * PI * exponent as f64 / d as f64)
                })
            })
            .collect();
        out.push(basis);
    }
    out
}

fn ququart_bases() -> Vec<Vec<CVector>> {
    let o = cx(1.0, 0.0);
    let m = cx(-1.0, 0.0);
    let i = cx(0.0, 1.0);
    let n = cx(0.0, -1.0);
    let rows: [[[Complex64; 4]; 4]; 4] = [
        [[o, o, o, o], [o, o, m, m], [o, m, m, o], [o, m, o, m]],
        [[o, m, n, n], [o, m, i, i], [o, o, i, n], [o, o, n, i]],
        [[o, n, n, m], [o, n, i, o], [o, i, i, m], [o, i, n, o]],
        [[o, n, m, n], [o, n, o, i], [o, i, m, i], [o, i, o, n]],
    ];
    let mut out = vec![computational(4)];
    for basis in rows {
        out.push(basis.iter().map(|v| vector(v, 0.5)).collect());
    }
    out
}

/// From `n` orthonormal traceless operators, the `n + 1` operators of a
/// regular simplex: they sum to zero, each has `Tr(F²) = n/(n+1)` and
/// distinct pairs have `Tr(FF') = -1/(n+1)`.
fn simplex_frame(ops: &[CMatrix]) -> Vec<CMatrix> {
    let n = ops.len();
    let big_d = (n + 1) as f64;
    let root = big_d.sqrt();
    let total: CMatrix = ops.iter().fold(CMatrix::zeros(ops[0].nrows(), ops[0].ncols()), |acc, f| acc + f);
    let beta = (root + 1.0) / (root * (big_d - 1.0));
    let mut out: Vec<CMatrix> = ops.iter().map(|f| f - total.scale(beta)).collect();
    out.push(total.scale(1.0 / root));
    out
}

fn mum_frames(d: usize) -> Vec<Vec<CMatrix>> {
    gell_mann_basis(d)
        .chunks(d - 1)
        .map(simplex_frame)
        .collect()
}

fn gsic_frame(d: usize) -> Vec<CMatrix> {
    simplex_frame(&gell_mann_basis(d))
}

/// Largest `t` keeping `I/d·scale + t·F` positive for every frame operator.
fn positivity_limit<'a>(frames: impl Iterator<Item = &'a CMatrix>, offset: f64) -> f64 {
    frames
        .filter_map(|f| {
            let low = *hermitian_spectrum(f).last().expect("nonempty");
            (low < 0.0).then(|| offset / -low)
        })
        .fold(f64::INFINITY, f64::min)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(domain(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

fn check_strength(t: f64, t_max: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(domain(format!("strength t must be positive, got {t}")));
    }
    if t > t_max * (1.0 + 1e-12) {
        return Err(domain(format!("t = {t} outside positivity range (0, {t_max}]")));
    }
    Ok(())
}

/// Upper end of the positivity range of [`mum_set`].
pub fn mum_t_max(d: usize) -> Result<f64> {
    check_dim(d)?;
    Ok(positivity_limit(mum_frames(d).iter().flatten(), 1.0 / d as f64))
}

/// `κ(t) = 1/d + t²(d-1)/d`.
pub fn mum_kappa_of_t(d: usize, t: f64) -> f64 {
    let df = d as f64;
    1.0 / df + t * t * (df - 1.0) / df
}

/// Inverse of [`mum_kappa_of_t`], restricted to the positivity range.
pub fn mum_t_for_kappa(d: usize, kappa: f64) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    if !(kappa > 1.0 / df && kappa <= 1.0 + 1e-12) {
        return Err(domain(format!("kappa {kappa} outside (1/d, 1]")));
    }
    let t = ((kappa - 1.0 / df) * df / (df - 1.0)).sqrt();
    let t_max = mum_t_max(d)?;
    if t > t_max * (1.0 + 1e-12) {
        return Err(domain(format!(
            "kappa {kappa} exceeds {} reachable by this construction in d = {d}",
            mum_kappa_of_t(d, t_max)
        )));
    }
    Ok(t.min(t_max))
}

/// Complete set of `d + 1` MUMs `P_b^(n) = I/d + t·F_b^(n)`.
pub fn mum_set(d: usize, t: f64) -> Result<MeasurementSet> {
    check_dim(d)?;
    let frames = mum_frames(d);
    let t_max = positivity_limit(frames.iter().flatten(), 1.0 / d as f64);
    check_strength(t, t_max)?;
    let id = CMatrix::identity(d, d).scale(1.0 / d as f64);
    let povms = frames
        .iter()
        .map(|group| Povm::new(group.iter().map(|f| hermitize(&(&id + f.scale(t)))).collect()))
        .collect::<Result<Vec<_>>>()?;
    MeasurementSet::new(MeasurementKind::Mum { kappa: mum_kappa_of_t(d, t) }, povms)
}

/// Upper end of the positivity range of [`gsic`].
pub fn gsic_t_max(d: usize) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    Ok(positivity_limit(gsic_frame(d).iter(), 1.0 / (df * df)))
}

/// `a(t) = 1/d³ + t²(d²-1)/d²`.
pub fn gsic_a_of_t(d: usize, t: f64) -> f64 {
    let df = d as f64;
    1.0 / (df * df * df) + t * t * (df * df - 1.0) / (df * df)
}

pub fn gsic_t_for_a(d: usize, a: f64) -> Result<f64> {
    check_dim(d)?;
    let df = d as f64;
    if !(a > 1.0 / (df * df * df) && a <= 1.0 / (df * df) + 1e-12) {
        return Err(domain(format!("a = {a} outside (1/d³, 1/d²]")));
    }
    let t = ((a - 1.0 / (df * df * df)) * df * df / (df * df - 1.0)).sqrt();
    let t_max = gsic_t_max(d)?;
    if t > t_max * (1.0 + 1e-12) {
        return Err(domain(format!(
            "a = {a} exceeds {} reachable by this construction in d = {d}",
            gsic_a_of_t(d, t_max)
        )));
    }
    Ok(t.min(t_max))
}

/// General SIC-POVM `S_k = I/d² + t·H_k` with `a = a(t)`.
pub fn gsic(d: usize, t: f64) -> Result<MeasurementSet> {
    check_dim(d)?;
    let df = d as f64;
    let frame = gsic_frame(d);
    let t_max = positivity_limit(frame.iter(), 1.0 / (df * df));
    check_strength(t, t_max)?;
    let id = CMatrix::identity(d, d).scale(1.0 / (df * df));
    let povm = Povm::new(frame.iter().map(|h| hermitize(&(&id + h.scale(t)))).collect())?;
    MeasurementSet::new(MeasurementKind::Gsic { a: gsic_a_of_t(d, t) }, vec![povm])
}

/// Weyl-Heisenberg orbit `X^a Z^b |φ⟩`.
fn weyl_heisenberg_orbit(fiducial: &CVector) -> Vec<CVector> {
    let d = fiducial.len();
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            out.push(CVector::from_fn(d, |k, _| {
                let src = (k + d - a) % d;
                fiducial[src] * Complex64::from_polar(1.0, 2.0 * PI * (b * src % d) as f64 / d as f64)
            }));
        }
    }
    out
}

/// Rank-one SIC from the built-in fiducials (`d ∈ {2, 3}`).
pub fn sic_set(d: usize) -> Result<MeasurementSet> {
    let fiducial = match d {
        2 => {
            let theta = (1.0 / 3f64.sqrt()).acos() / 2.0;
            CVector::from_vec(vec![cx(theta.cos(), 0.0), Complex64::from_polar(theta.sin(), PI / 4.0)])
        }
        3 => vector(&[cx(0.0, 0.0), cx(1.0, 0.0), cx(-1.0, 0.0)], FRAC_1_SQRT_2),
        _ => {
            return Err(Error::Unsupported(format!(
                "no built-in SIC fiducial for d = {d}; supply a fiducial file"
            )))
        }
    };
    sic_set_from_fiducials(d, weyl_heisenberg_orbit(&fiducial))
}

/// Rank-one SIC `S_i = |φ_i⟩⟨φ_i|/d` from `d²` vectors, which are normalised
/// and then checked for equiangularity.
pub fn sic_set_from_fiducials(d: usize, vectors: Vec<CVector>) -> Result<MeasurementSet> {
    check_dim(d)?;
    if vectors.len() != d * d {
        return Err(domain(format!("a SIC needs d² = {} vectors, got {}", d * d, vectors.len())));
    }
    let mut unit = Vec::with_capacity(vectors.len());
    for (i, v) in vectors.into_iter().enumerate() {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: v.len() });
        }
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(domain(format!("vector {i} is zero")));
        }
        unit.push(v.unscale(n));
    }
    let target = 1.0 / (d as f64 + 1.0);
    for i in 0..unit.len() {
        for j in i + 1..unit.len() {
            let overlap = unit[i].dotc(&unit[j]).norm_sqr();
            if (overlap - target).abs() > RELATION_TOLERANCE {
                return Err(Error::Invariant(format!(
                    "vectors {i} and {j} have overlap {overlap}, expected 1/(d+1) = {target}"
                )));
            }
        }
    }
    let povm = Povm::new(unit.iter().map(|v| projector(v).unscale(d as f64)).collect())?;
    MeasurementSet::new(MeasurementKind::Sic, vec![povm])
}

/// Reads `d²` blocks of `d` lines `re im`; `#` starts a comment.
pub fn sic_set_from_file(d: usize, path: &Path) -> Result<MeasurementSet> {
    let text = std::fs::read_to_string(path)?;
    let mut amps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
        };
        match parts.as_slice() {
            [re, im] => amps.push(cx(parse(re)?, parse(im)?)),
            _ => return Err(Error::Parse(format!("line {}: expected `re im`", lineno + 1))),
        }
    }
    if amps.len() != d * d * d {
        return Err(Error::Parse(format!("expected {} amplitudes, found {}", d * d * d, amps.len())));
    }
    let vectors = amps.chunks(d).map(CVector::from_column_slice).collect();
    sic_set_from_fiducials(d, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::trace_product;
    use approx::assert_abs_diff_eq;
    use std::io::Write;

    #[test]
    fn mubs_for_supported_dimensions() {
        for d in [2, 3, 4, 5, 7] {
            let set = mub_set(d).unwrap();
            assert_eq!(set.len(), d + 1);
        }
        assert!(matches!(mub_set(6), Err(Error::Unsupported(_))));
        assert!(matches!(mub_set(8), Err(Error::Unsupported(_))));
    }

    #[test]
    fn qubit_overlaps() {
        let set = mub_set(2).unwrap();
        for m in 0..3 {
            for n in 0..3 {
                if m == n {
                    continue;
                }
                for a in set.povms()[m].elements() {
                    for b in set.povms()[n].elements() {
                        assert_abs_diff_eq!(trace_product(a, b).re, 0.5, epsilon = 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn simplex_frame_geometry() {
        for n in 1..=8 {
            let ops = &gell_mann_basis(3)[..n];
            let frame = simplex_frame(ops);
            let nf = n as f64;
            for (i, a) in frame.iter().enumerate() {
                for (j, b) in frame.iter().enumerate() {
                    let want = if i == j { nf / (nf + 1.0) } else { -1.0 / (nf + 1.0) };
                    assert_abs_diff_eq!(trace_product(a, b).re, want, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn mum_relations_and_range() {
        for d in 2..=6 {
            let t_max = mum_t_max(d).unwrap();
            for frac in [0.05, 0.5, 1.0] {
                let set = mum_set(d, frac * t_max).unwrap();
                assert_eq!(set.len(), d + 1);
            }
            assert!(mum_set(d, 1.01 * t_max).is_err());
            assert!(mum_set(d, 0.0).is_err());
        }
    }

    #[test]
    fn qubit_mum_at_full_strength_is_the_mub_set() {
        assert_abs_diff_eq!(mum_t_max(2).unwrap(), 1.0, epsilon = 1e-12);
        let mum = mum_set(2, 1.0).unwrap();
        let MeasurementKind::Mum { kappa } = mum.kind() else { panic!() };
        assert_abs_diff_eq!(kappa, 1.0, epsilon = 1e-12);
        let mub = mub_set(2).unwrap();
        for p in mum.povms() {
            let matched = mub.povms().iter().any(|q| {
                p.elements()
                    .iter()
                    .all(|e| q.elements().iter().any(|f| (e - f).norm() < 1e-12))
            });
            assert!(matched);
        }
    }

    #[test]
    fn kappa_inversion() {
        let t = mum_t_for_kappa(3, 0.5).unwrap();
        assert_abs_diff_eq!(mum_kappa_of_t(3, t), 0.5, epsilon = 1e-14);
        assert!(mum_t_for_kappa(3, 0.3).is_err());
        assert!(mum_t_for_kappa(3, 1.0).is_err() || mum_t_max(3).unwrap() >= 1.0);
    }

    #[test]
    fn gsic_relations() {
        for d in 2..=6 {
            let t_max = gsic_t_max(d).unwrap();
            for frac in [0.1, 0.7, 1.0] {
                let set = gsic(d, frac * t_max).unwrap();
                let MeasurementKind::Gsic { a } = set.kind() else { panic!() };
                assert_abs_diff_eq!(a, gsic_a_of_t(d, frac * t_max), epsilon = 1e-15);
            }
            assert!(gsic(d, 1.01 * t_max).is_err());
        }
        let tiny = gsic(3, 1e-7).unwrap();
        let MeasurementKind::Gsic { a } = tiny.kind() else { panic!() };
        assert_abs_diff_eq!(a, 1.0 / 27.0, epsilon = 1e-12);
    }

    #[test]
    fn qubit_gsic_at_full_strength_is_a_sic() {
        let t = gsic_t_max(2).unwrap();
        assert_abs_diff_eq!(t, (1.0f64 / 6.0).sqrt(), epsilon = 1e-12);
        let set = gsic(2, t).unwrap();
        let MeasurementKind::Gsic { a } = set.kind() else { panic!() };
        assert_abs_diff_eq!(a, 0.25, epsilon = 1e-12);
        for e in set.povms()[0].elements() {
            let spec = hermitian_spectrum(e);
            assert!(spec[1].abs() < 1e-12);
        }
        let povm = set.povms()[0].clone();
        assert!(MeasurementSet::new(MeasurementKind::Sic, vec![povm]).is_ok());
    }

    #[test]
    fn sics() {
        let s2 = sic_set(2).unwrap();
        let e = s2.povms()[0].elements();
        assert_abs_diff_eq!(trace_product(&e[0], &e[1]).re, 1.0 / 12.0, epsilon = 1e-14);
        assert_eq!(sic_set(3).unwrap().povms()[0].len(), 9);
        assert!(matches!(sic_set(5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sic_file_round_trip() {
        let set = sic_set(3).unwrap();
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# Hesse SIC").unwrap();
        for e in set.povms()[0].elements() {
            let col = e.column(0).into_owned();
            let v = if col.norm() > 1e-9 { col } else { e.column(1).into_owned() };
            for z in v.iter() {
                writeln!(file, "{:.17} {:.17}", z.re, z.im).unwrap();
            }
            writeln!(file).unwrap();
        }
        assert!(sic_set_from_file(3, file.path()).is_ok());
        assert!(sic_set_from_file(2, file.path()).is_err());

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        for _ in 0..27 {
            writeln!(bad, "1 0").unwrap();
        }
        assert!(matches!(sic_set_from_file(3, bad.path()), Err(Error::Invariant(_))));
    }
}
