#include <cmath>
#include <string>

#include "spectralift/error.hpp"
#include "spectralift/sin.hpp"

namespace spectralift {
namespace {

void check_shapes(const SpectraView& pred, const SpectraView& target) {
  if (pred.count != target.count || pred.bands != target.bands) {
    throw DimensionError("loss: prediction is " + std::to_string(pred.count) + "x" + std::to_string(pred.bands) +
                         ", target is " + std::to_string(target.count) + "x" + std::to_string(target.bands));
  }
  if (pred.count == 0) throw DimensionError("loss: empty batch");
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

struct CosineTerms {
  double dot = 0.0;
  double pred_norm = 0.0;
  double target_norm = 0.0;
};

CosineTerms cosine_terms(std::span<const double> p, std::span<const double> t) {
  CosineTerms c;
  for (std::size_t b = 0; b < p.size(); ++b) {
    c.dot += p[b] * t[b];
    c.pred_norm += p[b] * p[b];
    c.target_norm += t[b] * t[b];
  }
  c.pred_norm = std::sqrt(c.pred_norm);
  c.target_norm = std::sqrt(c.target_norm);
  return c;
}

}  // namespace

std::string_view loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::L1:
      return "l1";
    case LossKind::Mse:
      return "mse";
    case LossKind::Cosine:
      return "cosine";
  }
  return "unknown";
}

LossKind parse_loss(std::string_view name) {
  if (name == "l1") return LossKind::L1;
  if (name == "mse") return LossKind::Mse;
  if (name == "cosine") return LossKind::Cosine;
  throw ParameterError("unknown loss '" + std::string(name) + "'");
}

double loss(LossKind kind, const SpectraView& pred, const SpectraView& target, const LossOptions& opts) {
  check_shapes(pred, target);
  const auto n = static_cast<double>(pred.count);
  const auto bands = static_cast<double>(pred.bands);
  double total = 0.0;
  for (std::size_t p = 0; p < pred.count; ++p) {
    const auto pr = pred.row(p);
    const auto tr = target.row(p);
    switch (kind) {
      case LossKind::L1:
        for (std::size_t b = 0; b < pred.bands; ++b) total += std::abs(pr[b] - tr[b]);
        break;
      case LossKind::Mse:
        for (std::size_t b = 0; b < pred.bands; ++b) {
          const double r = pr[b] - tr[b];
          total += r * r;
        }
        break;
      case LossKind::Cosine: {
        const CosineTerms c = cosine_terms(pr, tr);
        total += 1.0 - c.dot / (c.pred_norm * c.target_norm + opts.cosine_eps);
        break;
      }
    }
  }
  switch (kind) {
    case LossKind::L1:
      return opts.l1_reduction == L1Reduction::SumBands ? total / n : total / (n * bands);
    case LossKind::Mse:
      return total / (n * bands);
    case LossKind::Cosine:
      return total / n;
  }
  return total;
}

std::vector<double> loss_gradient(LossKind kind, const SpectraView& pred, const SpectraView& target,
                                  const LossOptions& opts) {
  check_shapes(pred, target);
  const auto n = static_cast<double>(pred.count);
  const auto bands = static_cast<double>(pred.bands);
  std::vector<double> grad(pred.count * pred.bands, 0.0);
  for (std::size_t p = 0; p < pred.count; ++p) {
    const auto pr = pred.row(p);
    const auto tr = target.row(p);
    double* g = grad.data() + p * pred.bands;
    switch (kind) {
      case LossKind::L1: {
        const double scale = opts.l1_reduction == L1Reduction::SumBands ? 1.0 / n : 1.0 / (n * bands);
        for (std::size_t b = 0; b < pred.bands; ++b) g[b] = scale * sign(pr[b] - tr[b]);
        break;
      }
      case LossKind::Mse: {
        const double scale = 2.0 / (n * bands);
        for (std::size_t b = 0; b < pred.bands; ++b) g[b] = scale * (pr[b] - tr[b]);
        break;
      }
      case LossKind::Cosine: {
        // d/dp [<p,t> / (|p||t| + eps)] = t / D - <p,t> |t| p / (|p| D^2)
        const CosineTerms c = cosine_terms(pr, tr);
        const double denom = c.pred_norm * c.target_norm + opts.cosine_eps;
        const double radial = c.pred_norm > 0.0 ? c.dot * c.target_norm / (c.pred_norm * denom * denom) : 0.0;
        for (std::size_t b = 0; b < pred.bands; ++b) g[b] = -(tr[b] / denom - radial * pr[b]) / n;
        break;
      }
    }
  }
  return grad;
}

}  // namespace spectralift
