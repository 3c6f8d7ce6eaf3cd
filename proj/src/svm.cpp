#include <algorithm>
#include <cmath>
#include <limits>

#include "seizure/classifiers.hpp"
#include "seizure/error.hpp"
#include "seizure/log.hpp"
#include "seizure/math.hpp"

namespace seizure {

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
  switch (kind) {
    case KernelKind::kRbf:
      return std::exp(-gamma * squared_distance(a, b));
    case KernelKind::kPolynomial:
      return std::pow(gamma * dot(a, b) + coef0, degree);
    case KernelKind::kSigmoid:
      return std::tanh(gamma * dot(a, b) + coef0);
  }
  return 0.0;
}

Kernel Kernel::defaults(KernelKind kind, std::size_t dimension) {
  Kernel k;
  k.kind = kind;
  k.gamma = dimension > 0 ? 1.0 / static_cast<double>(dimension) : 1.0;
  k.degree = 3;
  k.coef0 = 0.0;
  return k;
}

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kRbf:
      return "rbf";
    case KernelKind::kPolynomial:
      return "poly";
    case KernelKind::kSigmoid:
      return "sigmoid";
  }
  return "?";
}

KernelKind kernel_from_string(const std::string& name) {
  if (name == "rbf") return KernelKind::kRbf;
  if (name == "poly" || name == "polynomial") return KernelKind::kPolynomial;
  if (name == "sigmoid") return KernelKind::kSigmoid;
  throw InvalidArgument("unknown kernel '" + name + "'");
}

double SvmModel::decision(std::span<const double> x) const {
  if (x.size() != dimension()) throw DimensionError("SVM input dimension mismatch");
  double s = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    s += coefficients[i] * kernel(support_vectors[i], x);
  }
  return s;
}

int svm_classify(const SvmModel& model, std::span<const double> x) {
  return model.decision(x) >= 0.0 ? 1 : 0;
}

namespace {

constexpr double kTau = 1e-12;

// Kernel rows computed on first use and kept.
class KernelCache {
 public:
  KernelCache(const Dataset& data, const Kernel& kernel)
      : data_(data), kernel_(kernel), rows_(data.size()), diag_(data.size()) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      diag_[i] = kernel_(data.vectors[i], data.vectors[i]);
    }
  }

  const std::vector<double>& row(std::size_t i) {
    auto& r = rows_[i];
    if (r.empty()) {
      r.resize(data_.size());
      for (std::size_t j = 0; j < data_.size(); ++j) {
        r[j] = (j < i && !rows_[j].empty()) ? rows_[j][i]
                                            : kernel_(data_.vectors[i], data_.vectors[j]);
      }
    }
    return r;
  }

  double diag(std::size_t i) const { return diag_[i]; }

 private:
  const Dataset& data_;
  const Kernel& kernel_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> diag_;
};

}  // namespace

SvmSolution svm_solve(const Dataset& train, const Kernel& kernel, double c_reg, double tol) {
  train.validate();
  if (!train.has_both_classes()) throw InvalidArgument("SVM training needs both classes");
  if (!(c_reg > 0.0)) throw InvalidArgument("SVM regularization must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("SVM tolerance must be positive");

  const std::size_t n = train.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = train.labels[i] == 1 ? 1.0 : -1.0;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  KernelCache cache(train, kernel);

  const std::size_t max_iter = std::max<std::size_t>(10'000'000, 100 * n);
  SvmSolution sol;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // i: maximal violator in the "up" set.
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0.0 ? alpha[t] < c_reg : alpha[t] > 0.0) {
        if (-y[t] * grad[t] >= gmax) {
          gmax = -y[t] * grad[t];
          i = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    // j: best second-order gain in the "low" set.
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t j = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    if (i >= 0) {
      const auto& ki = cache.row(static_cast<std::size_t>(i));
      const double kii = cache.diag(static_cast<std::size_t>(i));
      for (std::size_t t = 0; t < n; ++t) {
        if (y[t] > 0.0 ? alpha[t] > 0.0 : alpha[t] < c_reg) {
          const double yg = y[t] * grad[t];
          gmax2 = std::max(gmax2, yg);
          const double grad_diff = gmax + yg;
          if (grad_diff > 0.0) {
            double quad = kii + cache.diag(t) - 2.0 * ki[t];
            if (quad <= 0.0) quad = kTau;
            const double obj = -(grad_diff * grad_diff) / quad;
            if (obj <= best_obj) {
              best_obj = obj;
              j = static_cast<std::ptrdiff_t>(t);
            }
          }
        }
      }
    }
    sol.max_violation = gmax + gmax2;
    if (i < 0 || j < 0 || gmax + gmax2 < tol) break;

    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(j);
    const auto& ka = cache.row(a);
    const auto& kb = cache.row(b);
    const double old_a = alpha[a];
    const double old_b = alpha[b];
    const double qaa = cache.diag(a);
    const double qbb = cache.diag(b);
    const double qab = y[a] * y[b] * ka[b];

    if (y[a] != y[b]) {
      double quad = qaa + qbb + 2.0 * qab;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[a] - grad[b]) / quad;
      const double diff = alpha[a] - alpha[b];
      alpha[a] += delta;
      alpha[b] += delta;
      if (diff > 0.0) {
        if (alpha[b] < 0.0) {
          alpha[b] = 0.0;
          alpha[a] = diff;
        }
      } else if (alpha[a] < 0.0) {
        alpha[a] = 0.0;
        alpha[b] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[a] > c_reg) {
          alpha[a] = c_reg;
          alpha[b] = c_reg - diff;
        }
      } else if (alpha[b] > c_reg) {
        alpha[b] = c_reg;
        alpha[a] = c_reg + diff;
      }
    } else {
      double quad = qaa + qbb - 2.0 * qab;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[a] - grad[b]) / quad;
      const double sum = alpha[a] + alpha[b];
      alpha[a] -= delta;
      alpha[b] += delta;
      if (sum > c_reg) {
        if (alpha[a] > c_reg) {
          alpha[a] = c_reg;
          alpha[b] = sum - c_reg;
        }
      } else if (alpha[b] < 0.0) {
        alpha[b] = 0.0;
        alpha[a] = sum;
      }
      if (sum > c_reg) {
        if (alpha[b] > c_reg) {
          alpha[b] = c_reg;
          alpha[a] = sum - c_reg;
        }
      } else if (alpha[a] < 0.0) {
        alpha[a] = 0.0;
        alpha[b] = sum;
      }
    }

    const double da = alpha[a] - old_a;
    const double db = alpha[b] - old_b;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[a] * ka[t] * da + y[b] * kb[t] * db);
    }
  }
  if (iter == max_iter) warn("SMO reached the iteration limit before converging");

  // Offset from free vectors, or the midpoint of the feasible interval.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c_reg) {
      if (y[t] < 0.0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0.0) upper = std::min(upper, yg);
      else lower = std::max(lower, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count)
                                    : (upper + lower) / 2.0;
  sol.alpha = std::move(alpha);
  sol.bias = -rho;
  sol.iterations = iter;
  return sol;
}

SvmModel svm_train(const Dataset& train, const Kernel& kernel, double c_reg, double tol) {
  const auto sol = svm_solve(train, kernel, c_reg, tol);
  SvmModel model;
  model.kernel = kernel;
  model.c_reg = c_reg;
  model.bias = sol.bias;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (sol.alpha[i] > 0.0) {
      model.support_vectors.push_back(train.vectors[i]);
      model.coefficients.push_back(train.labels[i] == 1 ? sol.alpha[i] : -sol.alpha[i]);
    }
  }
  return model;
}

double svm_dual_objective(const Dataset& train, const Kernel& kernel,
                          std::span<const double> alpha) {
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    linear += alpha[i];
    if (alpha[i] == 0.0) continue;
    const double yi = train.labels[i] == 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < train.size(); ++j) {
      if (alpha[j] == 0.0) continue;
      const double yj = train.labels[j] == 1 ? 1.0 : -1.0;
      quad += alpha[i] * alpha[j] * yi * yj * kernel(train.vectors[i], train.vectors[j]);
    }
  }
  return linear - 0.5 * quad;
}

}  // namespace seizure
