#include "blindid/ensembles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "blindid/spectral.hpp"

namespace blindid {
namespace {

void check_radius(double R) {
  if (!(R > 0.0) || !std::isfinite(R))
    throw std::invalid_argument("ball radius must be positive and finite");
}

double ball_radius(const EnsembleTag& tag) {
  if (!tag.radius) throw std::invalid_argument("uniform-ball ensemble requires a radius");
  check_radius(*tag.radius);
  return *tag.radius;
}

Ensemble assemble(const ConstraintScenario& sc, EnsembleTag tag, std::uint64_t seed, CMatrix D,
                  CMatrix E) {
  Ensemble ens;
  ens.scenario = sc;
  ens.tag = tag;
  ens.seed = seed;
  ens.a = frequency_rows(D);
  ens.b = frequency_rows(E);
  ens.D = std::move(D);
  ens.E = std::move(E);
  return ens;
}

// a_1 (and a_{n/2+1} for even n) real, a_2..a_{ceil((n+1)/2)} complex (minus
// the Nyquist row), the rest mirrored as a_j = conj(a_{n+2-j}).
CMatrix conjugate_symmetric_rows(int n, int m, double R, Rng& rng) {
  CMatrix rows(m, n);
  const int nyquist = n % 2 == 0 ? n / 2 : -1;
  for (int j = 0; j <= n / 2; ++j) {
    if (j == 0 || j == nyquist) {
      rows.col(j) = sample_uniform_real_ball(m, R, rng).cast<Complex>();
    } else {
      rows.col(j) = sample_uniform_complex_ball(m, R, rng);
      rows.col(n - j) = rows.col(j).conjugate();
    }
  }
  return rows;
}

CMatrix real_part_checked(const CMatrix& B) {
  if (B.imag().cwiseAbs().maxCoeff() > 1e-10)
    throw std::logic_error("conjugate-symmetric rows produced a non-real basis");
  return B.real().cast<Complex>();
}

}  // namespace

std::string_view to_string(EnsembleTag::Kind kind) noexcept {
  switch (kind) {
    case EnsembleTag::Kind::ComplexGeneric: return "complex_generic";
    case EnsembleTag::Kind::ComplexUniformBall: return "complex_ball";
    case EnsembleTag::Kind::RealGeneric: return "real_generic";
    case EnsembleTag::Kind::RealUniformBall: return "real_ball";
  }
  return "unknown";
}

EnsembleTag::Kind parse_ensemble_kind(std::string_view text) {
  if (text == "complex_generic") return EnsembleTag::Kind::ComplexGeneric;
  if (text == "complex_ball") return EnsembleTag::Kind::ComplexUniformBall;
  if (text == "real_generic") return EnsembleTag::Kind::RealGeneric;
  if (text == "real_ball") return EnsembleTag::Kind::RealUniformBall;
  throw std::invalid_argument("unknown ensemble kind '" + std::string(text) + "'");
}

CVector sample_uniform_complex_ball(int m, double R, Rng& rng) {
  if (m < 1) throw std::invalid_argument("ball dimension must be >= 1");
  check_radius(R);
  CVector g = rng.complex_normal_vector(m);
  double norm = g.norm();
  while (norm == 0.0) {
    g = rng.complex_normal_vector(m);
    norm = g.norm();
  }
  const double r = R * std::pow(rng.uniform(), 1.0 / (2.0 * m));
  return g * (r / norm);
}

RVector sample_uniform_real_ball(int m, double R, Rng& rng) {
  if (m < 1) throw std::invalid_argument("ball dimension must be >= 1");
  check_radius(R);
  RVector g = rng.normal_vector(m);
  double norm = g.norm();
  while (norm == 0.0) {
    g = rng.normal_vector(m);
    norm = g.norm();
  }
  const double r = R * std::pow(rng.uniform(), 1.0 / m);
  return g * (r / norm);
}

CVector sample_complex_sphere(int m, double r, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sphere dimension must be >= 1");
  if (r == 0.0) return CVector::Zero(m);
  CVector g = rng.complex_normal_vector(m);
  double norm = g.norm();
  while (norm == 0.0) {
    g = rng.complex_normal_vector(m);
    norm = g.norm();
  }
  return g * (r / norm);
}

CMatrix frequency_rows(const CMatrix& B) { return dft_columns(B).adjoint(); }

CMatrix basis_from_rows(const CMatrix& rows) {
  return dft_columns(rows.adjoint(), Direction::Inverse);
}

Ensemble build_complex_ensemble(const ConstraintScenario& sc, EnsembleTag tag,
                                std::uint64_t seed) {
  sc.validate(Validation::Structural);
  if (tag.field() != Field::Complex)
    throw std::invalid_argument("build_complex_ensemble: tag is not a complex ensemble");
  Rng rng(seed);
  if (tag.kind == EnsembleTag::Kind::ComplexGeneric) {
    CMatrix D(sc.n, sc.m1), E(sc.n, sc.m2);
    for (Index k = 0; k < D.cols(); ++k) D.col(k) = rng.complex_normal_vector(sc.n);
    for (Index k = 0; k < E.cols(); ++k) E.col(k) = rng.complex_normal_vector(sc.n);
    return assemble(sc, tag, seed, std::move(D), std::move(E));
  }
  const double R = ball_radius(tag);
  CMatrix a(sc.m1, sc.n), b(sc.m2, sc.n);
  for (int j = 0; j < sc.n; ++j) a.col(j) = sample_uniform_complex_ball(sc.m1, R, rng);
  for (int j = 0; j < sc.n; ++j) b.col(j) = sample_uniform_complex_ball(sc.m2, R, rng);
  Ensemble ens = assemble(sc, tag, seed, basis_from_rows(a), basis_from_rows(b));
  // Keep the sampled rows bit-exact instead of their F round trip.
  ens.a = std::move(a);
  ens.b = std::move(b);
  return ens;
}

Ensemble build_real_ensemble(const ConstraintScenario& sc, EnsembleTag tag, std::uint64_t seed) {
  sc.validate(Validation::Structural);
  if (tag.field() != Field::Real)
    throw std::invalid_argument("build_real_ensemble: tag is not a real ensemble");
  Rng rng(seed);
  if (tag.kind == EnsembleTag::Kind::RealGeneric) {
    RMatrix D(sc.n, sc.m1), E(sc.n, sc.m2);
    for (Index k = 0; k < D.cols(); ++k) D.col(k) = rng.normal_vector(sc.n);
    for (Index k = 0; k < E.cols(); ++k) E.col(k) = rng.normal_vector(sc.n);
    return assemble(sc, tag, seed, D.cast<Complex>(), E.cast<Complex>());
  }
  const double R = ball_radius(tag);
  CMatrix a = conjugate_symmetric_rows(sc.n, sc.m1, R, rng);
  CMatrix b = conjugate_symmetric_rows(sc.n, sc.m2, R, rng);
  Ensemble ens = assemble(sc, tag, seed, real_part_checked(basis_from_rows(a)),
                          real_part_checked(basis_from_rows(b)));
  ens.a = std::move(a);
  ens.b = std::move(b);
  return ens;
}

Ensemble build_ensemble(const ConstraintScenario& sc, EnsembleTag tag, std::uint64_t seed) {
  return tag.field() == Field::Real ? build_real_ensemble(sc, tag, seed)
                                    : build_complex_ensemble(sc, tag, seed);
}

int numerical_rank(const CMatrix& B, double tol) {
  if (B.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(B);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  return rank;
}

}  // namespace blindid
