#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "relforms/fem2d.hpp"

namespace relforms::fem {
namespace {

RealMatrix real_cholesky(const RealMatrix& a, const char* what) {
  Eigen::LLT<RealMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, std::string(what) + " is not positive definite");
  }
  RealMatrix l = llt.matrixL();
  const double scale = a.diagonal().cwiseAbs().maxCoeff();
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() *
                       static_cast<double>(a.rows()) * scale;
  if (l.diagonal().cwiseAbs2().minCoeff() <= floor) {
    throw Error(ErrorKind::NotPositiveDefinite, std::string(what) + " is numerically singular");
  }
  return l;
}

}  // namespace

CoefficientField CoefficientField::identity(Index num_triangles, double c) {
  CoefficientField f;
  f.a.assign(static_cast<std::size_t>(num_triangles), Eigen::Matrix2d::Identity());
  f.c.assign(static_cast<std::size_t>(num_triangles), c);
  return f;
}

CoefficientField CoefficientField::sample(
    const Mesh& mesh, const std::function<Eigen::Matrix2d(const Point&)>& a,
    const std::function<double(const Point&)>& c) {
  CoefficientField f;
  for (const Triangle& t : mesh.triangles) {
    Point bary = Point::Zero();
    for (Index v : t) bary += mesh.vertices[static_cast<std::size_t>(v)];
    bary /= 3.0;
    f.a.push_back(a(bary));
    f.c.push_back(c(bary));
  }
  return f;
}

double CoefficientField::mu_ell() const {
  double mu = std::numeric_limits<double>::infinity();
  for (const auto& m : a) {
    mu = std::min(mu, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m, Eigen::EigenvaluesOnly)
                          .eigenvalues()(0));
  }
  return mu;
}

double CoefficientField::min_c() const {
  return c.empty() ? 0.0 : *std::min_element(c.begin(), c.end());
}

void CoefficientField::validate(Index num_triangles) const {
  if (static_cast<Index>(a.size()) != num_triangles ||
      static_cast<Index>(c.size()) != num_triangles) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient lists must match the triangle count");
  }
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (!a[t].allFinite() || !std::isfinite(c[t])) {
      throw Error(ErrorKind::InvalidInput, "non-finite coefficient", static_cast<long>(t));
    }
    if (a[t](0, 1) != a[t](1, 0)) {
      throw Error(ErrorKind::NotHermitian, "a_kl must be symmetric", static_cast<long>(t));
    }
  }
}

CoefficientField coefficients_from_json(std::string_view text, Index num_triangles) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "coefficient file must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "a_kl" && key != "c") {
      throw Error(ErrorKind::ParseError, "unknown coefficient key '" + key + "'");
    }
  }
  CoefficientField f = CoefficientField::identity(num_triangles);
  if (doc.contains("a_kl")) {
    const json& a = doc["a_kl"];
    if (a.is_string()) {
      if (a.get<std::string>() != "identity") {
        throw Error(ErrorKind::ParseError, "a_kl must be a list or \"identity\"");
      }
    } else if (a.is_array()) {
      if (static_cast<Index>(a.size()) != num_triangles) {
        throw Error(ErrorKind::DimensionMismatch, "a_kl length must match the triangle count");
      }
      for (std::size_t t = 0; t < a.size(); ++t) {
        const json& e = a[t];
        if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() ||
            !e[2].is_number()) {
          throw Error(ErrorKind::ParseError, "a_kl entries are [a11, a12, a22]",
                      static_cast<long>(t));
        }
        f.a[t] << e[0].get<double>(), e[1].get<double>(), e[1].get<double>(), e[2].get<double>();
      }
    } else {
      throw Error(ErrorKind::ParseError, "a_kl must be a list or \"identity\"");
    }
  }
  if (doc.contains("c")) {
    const json& c = doc["c"];
    if (c.is_number()) {
      std::fill(f.c.begin(), f.c.end(), c.get<double>());
    } else if (c.is_array()) {
      if (static_cast<Index>(c.size()) != num_triangles) {
        throw Error(ErrorKind::DimensionMismatch, "c length must match the triangle count");
      }
      for (std::size_t t = 0; t < c.size(); ++t) {
        if (!c[t].is_number()) throw Error(ErrorKind::ParseError, "c entries must be numbers");
        f.c[t] = c[t].get<double>();
      }
    } else {
      throw Error(ErrorKind::ParseError, "c must be a list or a number");
    }
  }
  f.validate(num_triangles);
  return f;
}

AssembledSystem assemble(const Mesh& mesh, const CoefficientField& coeff) {
  coeff.validate(mesh.num_triangles());
  const Index nv = mesh.num_vertices();
  AssembledSystem sys;
  sys.k = RealMatrix::Zero(nv, nv);
  sys.k_id = RealMatrix::Zero(nv, nv);
  sys.c = RealMatrix::Zero(nv, nv);
  sys.m_omega = RealMatrix::Zero(nv, nv);

  Eigen::Matrix3d local_mass;
  local_mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  local_mass /= 12.0;
  Eigen::Matrix<double, 3, 2> ref_grad;
  ref_grad << -1, -1, 1, 0, 0, 1;

  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const Point& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
    Eigen::Matrix2d b;
    b.col(0) = mesh.vertices[static_cast<std::size_t>(tri[1])] - p0;
    b.col(1) = mesh.vertices[static_cast<std::size_t>(tri[2])] - p0;
    const double area = 0.5 * b.determinant();
    const double scale = std::max(b.col(0).squaredNorm(), b.col(1).squaredNorm());
    if (!(area > std::numeric_limits<double>::epsilon() * scale)) {
      throw Error(ErrorKind::DegenerateElement,
                  "triangle " + std::to_string(t) + " is degenerate", t);
    }
    const Eigen::Matrix<double, 3, 2> grad = ref_grad * b.inverse();
    const auto& a = coeff.a[static_cast<std::size_t>(t)];
    const Eigen::Matrix3d k_loc = area * grad * a * grad.transpose();
    const Eigen::Matrix3d k_id_loc = area * grad * grad.transpose();
    const Eigen::Matrix3d m_loc = area * local_mass;
    const double c = coeff.c[static_cast<std::size_t>(t)];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const Index gi = tri[static_cast<std::size_t>(i)];
        const Index gj = tri[static_cast<std::size_t>(j)];
        sys.k(gi, gj) += k_loc(i, j);
        sys.k_id(gi, gj) += k_id_loc(i, j);
        sys.m_omega(gi, gj) += m_loc(i, j);
        sys.c(gi, gj) += c * m_loc(i, j);
      }
    }
  }

  std::vector<char> on_boundary(static_cast<std::size_t>(nv), 0);
  for (const Edge& e : mesh.boundary_edges) {
    on_boundary[static_cast<std::size_t>(e[0])] = 1;
    on_boundary[static_cast<std::size_t>(e[1])] = 1;
  }
  std::vector<Index> local(static_cast<std::size_t>(nv), -1);
  for (Index v = 0; v < nv; ++v) {
    if (on_boundary[static_cast<std::size_t>(v)]) {
      local[static_cast<std::size_t>(v)] = static_cast<Index>(sys.boundary_index.size());
      sys.boundary_index.push_back(v);
    } else {
      sys.interior_index.push_back(v);
    }
  }
  const Index nb = static_cast<Index>(sys.boundary_index.size());
  sys.tr = RealMatrix::Zero(nb, nv);
  for (Index i = 0; i < nb; ++i) sys.tr(i, sys.boundary_index[static_cast<std::size_t>(i)]) = 1.0;

  sys.m_gamma = RealMatrix::Zero(nb, nb);
  for (const Edge& e : mesh.boundary_edges) {
    const double len = (mesh.vertices[static_cast<std::size_t>(e[1])] -
                        mesh.vertices[static_cast<std::size_t>(e[0])])
                           .norm();
    const Index a = local[static_cast<std::size_t>(e[0])];
    const Index b = local[static_cast<std::size_t>(e[1])];
    sys.m_gamma(a, a) += len / 3.0;
    sys.m_gamma(b, b) += len / 3.0;
    sys.m_gamma(a, b) += len / 6.0;
    sys.m_gamma(b, a) += len / 6.0;
  }
  sys.g = sys.k_id + sys.m_omega;
  return sys;
}

FormReducer::FormReducer(const AssembledSystem& sys, double tol) : tol_(tol) {
  l_ = real_cholesky(sys.g, "H1 Gram matrix");
  l_gamma_ = real_cholesky(sys.m_gamma, "boundary mass matrix");
  const RealMatrix l_omega = real_cholesky(sys.m_omega, "domain mass matrix");
  const auto lower = l_.triangularView<Eigen::Lower>();
  // Rows of X L^{-T} are L^{-1} applied to rows of X.
  const RealMatrix tr_linv_t = lower.solve(sys.tr.transpose()).transpose();
  const RealMatrix linv_t = lower.solve(RealMatrix::Identity(l_.rows(), l_.cols())).transpose();
  j_ = (l_gamma_.transpose() * tr_linv_t).cast<Complex>();
  jt_ = (l_omega.transpose() * linv_t).cast<Complex>();
}

FormTriple FormReducer::reduce(const RealMatrix& k_plus_c) const {
  if (k_plus_c.rows() != l_.rows() || k_plus_c.cols() != l_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "form matrix does not match the mesh");
  }
  const auto lower = l_.triangularView<Eigen::Lower>();
  const RealMatrix half = lower.solve(k_plus_c);
  RealMatrix m = lower.solve(half.transpose()).transpose();
  m = 0.5 * (m + m.transpose()).eval();
  return FormTriple(m.cast<Complex>(), j_, jt_, tol_);
}

Vector FormReducer::to_v(const RealVector& nodal) const {
  return (l_.transpose() * nodal).cast<Complex>();
}

Vector FormReducer::to_h(const RealVector& boundary_values) const {
  return (l_gamma_.transpose() * boundary_values).cast<Complex>();
}

FormTriple to_form_triple(const AssembledSystem& sys, double tol) {
  return FormReducer(sys, tol).reduce(sys);
}

FormTriple mean_free_trace_triple(const Mesh& mesh, double tol) {
  const AssembledSystem sys = assemble(mesh, CoefficientField::identity(mesh.num_triangles()));
  const FormReducer reducer(sys, tol);
  const FormTriple base = reducer.reduce(sys);
  Vector e = reducer.to_h(RealVector::Ones(sys.m_gamma.rows()));
  e /= e.norm();
  const Matrix b = Matrix::Identity(e.size(), e.size()) - e * e.adjoint();
  return FormTriple(base.m(), b * base.j(), base.jt(), tol);
}

}  // namespace relforms::fem
