#include "momt/costs.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "momt/error.hpp"

namespace momt::costs {

namespace {

void require_dimension(std::span<const Point* const> points) {
  const std::size_t d = points.front()->size();
  for (const Point* p : points) {
    if (p->size() != d) throw Error(ErrorCode::kDimensionMismatch, "points of different dimension");
  }
}

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

double pairwise_inner(std::span<const Point* const> points) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) total += dot(*points[i], *points[j]);
  }
  return total;
}

double pairwise_squared_distance(std::span<const Point* const> points) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double r = distance(*points[i], *points[j]);
      total += r * r;
    }
  }
  return total;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

std::string_view kind_name(CostKind kind) {
  switch (kind) {
    case CostKind::kTensor: return "tensor";
    case CostKind::kSurplus: return "surplus";
    case CostKind::kAttractive: return "attractive";
    case CostKind::kRepulsive: return "repulsive";
    case CostKind::kGangboSwiech: return "gangboSwiech";
    case CostKind::kMongeQuadratic: return "mongeQuadratic";
    case CostKind::kGromovWasserstein: return "gromovWasserstein";
    case CostKind::kCustom: return "custom";
  }
  return "unknown";
}

CostKind kind_from_name(std::string_view name) {
  for (CostKind k : {CostKind::kTensor, CostKind::kSurplus, CostKind::kAttractive,
                     CostKind::kRepulsive, CostKind::kGangboSwiech, CostKind::kMongeQuadratic,
                     CostKind::kGromovWasserstein, CostKind::kCustom}) {
    if (kind_name(k) == name) return k;
  }
  throw Error(ErrorCode::kSchemaError, "unknown cost kind '" + std::string(name) + "'");
}

void validate_spec(const CostSpec& spec, int axes) {
  switch (spec.kind) {
    case CostKind::kTensor: {
      if (!spec.tensor) throw Error(ErrorCode::kSchemaError, "tensor cost without values");
      if (spec.tensor->grid.axes() != axes) {
        throw Error(ErrorCode::kSchemaError, "tensor cost arity differs from marginal count");
      }
      for (double v : spec.tensor->values) {
        if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteCost, "tensor cost has non-finite entry");
      }
      break;
    }
    case CostKind::kMongeQuadratic:
      if (axes != 3) throw Error(ErrorCode::kSchemaError, "mongeQuadratic cost needs 3 marginals");
      break;
    case CostKind::kGromovWasserstein: {
      if (axes != 2) throw Error(ErrorCode::kSchemaError, "gromovWasserstein cost needs 2 marginals");
      if (spec.xi == 0.0) throw Error(ErrorCode::kZeroXi, "xi must be nonzero");
      const std::size_t n = spec.matrix.size();
      Eigen::MatrixXd a(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        if (spec.matrix[i].size() != n) throw Error(ErrorCode::kSchemaError, "matrix A must be square");
        for (std::size_t j = 0; j < n; ++j) a(i, j) = spec.matrix[i][j];
      }
      if (n == 0 || std::abs(a.determinant()) <= 1e-10) {
        throw Error(ErrorCode::kSingularMatrix, "matrix A is not invertible");
      }
      break;
    }
    case CostKind::kCustom:
      if (!spec.custom) throw Error(ErrorCode::kSchemaError, "custom cost without callable");
      break;
    default:
      break;
  }
}

double evaluate(const CostSpec& spec, std::span<const Point* const> points) {
  if (points.empty()) throw Error(ErrorCode::kDimensionMismatch, "no points given");
  switch (spec.kind) {
    case CostKind::kTensor:
      throw Error(ErrorCode::kInvalidArgument, "tensor costs are evaluated by index");
    case CostKind::kCustom:
      return spec.custom(points);
    case CostKind::kSurplus:
    case CostKind::kGangboSwiech:
      require_dimension(points);
      return pairwise_inner(points);
    case CostKind::kAttractive:
      require_dimension(points);
      return 0.5 * pairwise_squared_distance(points);
    case CostKind::kRepulsive:
      require_dimension(points);
      return -0.5 * pairwise_squared_distance(points);
    case CostKind::kMongeQuadratic: {
      if (points.size() != 3) throw Error(ErrorCode::kDimensionMismatch, "mongeQuadratic takes 3 points");
      require_dimension(points);
      const double xz = distance(*points[0], *points[2]);
      const double yz = distance(*points[1], *points[2]);
      return distance(*points[0], *points[1]) + xz * xz + yz * yz;
    }
    case CostKind::kGromovWasserstein: {
      if (points.size() != 2) throw Error(ErrorCode::kDimensionMismatch, "gromovWasserstein takes 2 points");
      require_dimension(points);
      const Point& x = *points[0];
      const Point& y = *points[1];
      if (spec.matrix.size() != x.size()) throw Error(ErrorCode::kDimensionMismatch, "matrix A size");
      double axy = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) axy += dot(spec.matrix[i], x) * y[i];
      return squared_norm(x) * squared_norm(y) + spec.xi * axy;
    }
  }
  return 0.0;
}

double evaluate(const CostSpec& spec, const std::vector<Point>& points) {
  std::vector<const Point*> ptrs;
  for (const Point& p : points) ptrs.push_back(&p);
  return evaluate(spec, std::span<const Point* const>(ptrs));
}

CostTensor tabulate(const CostSpec& spec, const std::vector<const Space*>& spaces) {
  std::vector<int> arities;
  for (const Space* s : spaces) arities.push_back(s->size());
  if (spec.kind == CostKind::kTensor) {
    if (!spec.tensor || spec.tensor->grid.arities() != arities) {
      throw Error(ErrorCode::kSchemaError, "tensor cost shape differs from the marginals");
    }
    return *spec.tensor;
  }
  CostTensor table{Grid(arities), {}};
  table.values.resize(table.grid.size());
  MultiIndex index(arities.size(), 0);
  std::vector<const Point*> pts(arities.size());
  std::size_t linear = 0;
  do {
    for (std::size_t k = 0; k < arities.size(); ++k) pts[k] = &spaces[k]->points[index[k]];
    const double v = evaluate(spec, std::span<const Point* const>(pts));
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteCost, "cost evaluated to a non-finite value");
    table.values[linear++] = v;
  } while (table.grid.next(index));
  return table;
}

ConjugateValue legendre_conjugate(const ConjugateTable& table, std::span<const double> s) {
  if (table.samples.empty()) throw Error(ErrorCode::kEmptyTable, "conjugate table has no samples");
  ConjugateValue best;
  best.value = -INFINITY;
  for (std::size_t i = 0; i < table.samples.size(); ++i) {
    if (table.samples[i].size() != s.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "conjugate argument dimension");
    }
    const double v = dot(s, table.samples[i]) - table.values[i];
    if (v > best.value + 1e-12) {
      best = {v, static_cast<int>(i), false};
    } else if (v >= best.value - 1e-12) {
      best.tied = true;
      best.value = std::max(best.value, v);
    }
  }
  return best;
}

}  // namespace momt::costs
