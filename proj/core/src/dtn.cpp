#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "relforms/fem2d.hpp"

namespace relforms::fem {
namespace {

RealMatrix interior_block(const RealMatrix& a, const std::vector<Index>& idx) {
  const Index n = static_cast<Index>(idx.size());
  RealMatrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      out(i, j) = a(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

RealVector dirichlet_spectrum(const AssembledSystem& sys) {
  if (sys.interior_index.empty()) return RealVector();
  const RealMatrix a = interior_block(sys.k + sys.c, sys.interior_index);
  const RealMatrix b = interior_block(sys.m_omega, sys.interior_index);
  Eigen::GeneralizedSelfAdjointEigenSolver<RealMatrix> eig(a, b, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, "interior mass matrix is not positive definite");
  }
  return eig.eigenvalues();
}

}  // namespace

std::vector<double> dirichlet_eigs(const AssembledSystem& sys, Index k) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "dirichlet_eigs needs k >= 1");
  if (k > static_cast<Index>(sys.interior_index.size())) {
    throw Error(ErrorKind::InvalidInput, "k exceeds the number of interior vertices");
  }
  const RealVector ev = dirichlet_spectrum(sys);
  return {ev.data(), ev.data() + k};
}

double dirichlet_margin(const AssembledSystem& sys) {
  const RealVector ev = dirichlet_spectrum(sys);
  return ev.size() == 0 ? std::numeric_limits<double>::infinity() : ev.cwiseAbs().minCoeff();
}

LinearRelation dtn_graph(const AssembledSystem& sys, double tol) {
  return from_form(to_form_triple(sys, tol));
}

std::vector<double> steklov_eigs(const AssembledSystem& sys, Index k, const DtnOptions& options) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "steklov_eigs needs k >= 1");
  const double margin = dirichlet_margin(sys);
  if (margin < options.dirichlet_margin) {
    throw Error(ErrorKind::NearDirichletSpectrum,
                "0 is within " + std::to_string(margin) + " of the Dirichlet spectrum");
  }
  const SingleValuedPart part = single_valued_part(dtn_graph(sys, options.tol));
  if (k > part.op.rows()) {
    throw Error(ErrorKind::InvalidInput, "k exceeds the boundary dimension");
  }
  const RealVector ev = hermitian_eig(part.op, std::max(options.tol, 1e-9)).eigenvalues;
  return {ev.data(), ev.data() + k};
}

FormSequence coefficient_sequence(const Mesh& mesh, std::span<const CoefficientField> fields,
                                  const CoefficientField& limit, std::vector<double> s_values,
                                  std::vector<double> indices, double tol) {
  const Index nt = mesh.num_triangles();
  auto check = [nt](const CoefficientField& f) {
    if (static_cast<Index>(f.a.size()) != nt || static_cast<Index>(f.c.size()) != nt) {
      throw Error(ErrorKind::DimensionMismatch, "coefficient field does not match the mesh");
    }
  };
  check(limit);
  for (const auto& f : fields) check(f);

  const AssembledSystem limit_sys = assemble(mesh, limit);
  const FormReducer reducer(limit_sys, tol);
  double min_c = limit.min_c();
  std::vector<FormTriple> members;
  members.reserve(fields.size());
  for (const auto& f : fields) {
    members.push_back(reducer.reduce(assemble(mesh, f)));
    min_c = std::min(min_c, f.min_c());
  }
  const double omega = std::max(0.0, 1.0 - min_c);
  return make_form_sequence(std::move(members), reducer.reduce(limit_sys), omega,
                            std::move(s_values), std::move(indices));
}

SemigroupReport dtn_semigroup_experiment(const Mesh& mesh, std::span<const double> m_list,
                                         double m_limit, std::span<const double> t_values,
                                         const DtnOptions& options,
                                         const ConvergenceOptions& conv) {
  const Index nt = mesh.num_triangles();
  const CoefficientField limit = CoefficientField::identity(nt, m_limit);
  const double margin = dirichlet_margin(assemble(mesh, limit));
  if (margin < options.dirichlet_margin) {
    throw Error(ErrorKind::NearDirichletSpectrum,
                "limit potential puts 0 within " + std::to_string(margin) +
                    " of the Dirichlet spectrum");
  }
  std::vector<CoefficientField> fields;
  for (double m : m_list) fields.push_back(CoefficientField::identity(nt, m));
  const FormSequence seq = coefficient_sequence(mesh, fields, limit, {1.0}, {}, options.tol);
  return semigroup_convergence(seq, t_values, conv);
}

UniquenessRadius uniqueness_radius(const Mesh& mesh, const CoefficientField& base,
                                   std::uint64_t seed, Index samples, double eps_max,
                                   Index iterations) {
  if (samples < 1 || !(eps_max > 0.0) || iterations < 0) {
    throw Error(ErrorKind::InvalidInput, "uniqueness_radius needs samples >= 1, eps_max > 0");
  }
  base.validate(mesh.num_triangles());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::vector<Eigen::Matrix2d>> directions(static_cast<std::size_t>(samples));
  for (auto& dir : directions) {
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
      const double a11 = unit(rng), a12 = unit(rng), a22 = unit(rng);
      Eigen::Matrix2d d;
      d << a11, a12, a12, a22;
      dir.push_back(d);
    }
  }

  const AssembledSystem base_sys = assemble(mesh, base);
  const FormReducer reducer(base_sys);
  UniquenessRadius out;
  auto unique_at = [&](double eps) {
    for (const auto& dir : directions) {
      CoefficientField f = base;
      for (std::size_t t = 0; t < f.a.size(); ++t) f.a[t] += eps * dir[t];
      ++out.trials;
      if (w_space(reducer.reduce(assemble(mesh, f))).dim() != 0) return false;
    }
    return true;
  };

  if (unique_at(eps_max)) {
    out.radius = eps_max;
    return out;
  }
  out.failure_found = true;
  double lo = 0.0, hi = eps_max;
  for (Index it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    (unique_at(mid) ? lo : hi) = mid;
  }
  out.radius = lo;
  return out;
}

}  // namespace relforms::fem
