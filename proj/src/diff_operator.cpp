#include "geomflow/diff_operator.hpp"

#include <algorithm>
#include <cmath>

#include "geomflow/error.hpp"
#include "geomflow/spectral.hpp"

namespace geomflow {

Primitive Primitive::d() { return {Kind::D, std::nullopt, "D"}; }

Primitive Primitive::multiply(GridFunction field, std::string label) {
  return {Kind::Multiply, std::move(field), std::move(label)};
}

int Chain::derivative_count() const noexcept {
  return static_cast<int>(std::count_if(factors.begin(), factors.end(),
                                        [](const Primitive& p) { return p.kind == Primitive::Kind::D; }));
}

std::vector<std::string> Chain::labels() const {
  std::vector<std::string> out;
  for (const auto& p : factors) out.push_back(p.kind == Primitive::Kind::D ? "D" : "mul:" + p.label);
  return out;
}

DiffOperator DiffOperator::scalar(const PeriodicGrid& g, double c) {
  DiffOperator op(g);
  op.chains_.push_back({c, {}});
  return op;
}

DiffOperator DiffOperator::d(const PeriodicGrid& g, int power) {
  DiffOperator op(g);
  Chain c;
  for (int i = 0; i < power; ++i) c.factors.push_back(Primitive::d());
  op.chains_.push_back(std::move(c));
  return op;
}

DiffOperator DiffOperator::multiply(const GridFunction& field, std::string label) {
  DiffOperator op(field.grid);
  op.chains_.push_back({1.0, {Primitive::multiply(field, std::move(label))}});
  return op;
}

GridFunction DiffOperator::apply(const GridFunction& f) const {
  require_same_grid(grid_, f.grid, "DiffOperator::apply");
  GridFunction total(grid_);
  for (const auto& chain : chains_) {
    GridFunction v = f;
    // Walk right to left, merging runs of D into one spectral derivative.
    auto it = chain.factors.rbegin();
    while (it != chain.factors.rend()) {
      if (it->kind == Primitive::Kind::D) {
        int run = 0;
        while (it != chain.factors.rend() && it->kind == Primitive::Kind::D && run < kMaxDerivativeOrder) {
          ++run;
          ++it;
        }
        v = derivative(v, run);
      } else {
        v *= *it->field;
        ++it;
      }
    }
    total += chain.coeff * v;
  }
  return total;
}

DiffOperator DiffOperator::adjoint() const {
  DiffOperator out(grid_);
  for (const auto& chain : chains_) {
    Chain c;
    c.coeff = chain.coeff * ((chain.derivative_count() % 2) ? -1.0 : 1.0);
    c.factors.assign(chain.factors.rbegin(), chain.factors.rend());
    out.chains_.push_back(std::move(c));
  }
  return out;
}

bool DiffOperator::constant_coefficient() const {
  for (const auto& chain : chains_)
    for (const auto& p : chain.factors)
      if (p.kind == Primitive::Kind::Multiply) {
        const double scale = std::max(1.0, p.field->max_abs());
        if (p.field->max() - p.field->min() > 1e-14 * scale) return false;
      }
  return true;
}

cplx DiffOperator::symbol(std::size_t k) const {
  const std::size_t n = grid_.n();
  const bool nyquist = (n % 2 == 0) && k == n / 2;
  const cplx ik{0.0, grid_.wavenumber(double(k))};
  cplx total{};
  for (const auto& chain : chains_) {
    cplx s = chain.coeff;
    auto it = chain.factors.rbegin();
    while (it != chain.factors.rend()) {
      if (it->kind == Primitive::Kind::D) {
        int run = 0;
        while (it != chain.factors.rend() && it->kind == Primitive::Kind::D && run < kMaxDerivativeOrder) {
          ++run;
          ++it;
        }
        s *= (nyquist && run % 2 == 1) ? cplx{} : std::pow(ik, run);
      } else {
        s *= (*it->field)[0];
        ++it;
      }
    }
    total += s;
  }
  return total;
}

std::optional<DiffOperator> DiffOperator::strip_leading_derivative() const {
  DiffOperator out(grid_);
  for (const auto& chain : chains_) {
    if (chain.factors.empty() || chain.factors.front().kind != Primitive::Kind::D) return std::nullopt;
    Chain c{chain.coeff, {chain.factors.begin() + 1, chain.factors.end()}};
    out.chains_.push_back(std::move(c));
  }
  return out;
}

DiffOperator& DiffOperator::operator+=(const DiffOperator& o) {
  require_same_grid(grid_, o.grid_, "DiffOperator::+");
  chains_.insert(chains_.end(), o.chains_.begin(), o.chains_.end());
  return *this;
}

DiffOperator& DiffOperator::operator-=(const DiffOperator& o) {
  require_same_grid(grid_, o.grid_, "DiffOperator::-");
  for (auto c : o.chains_) {
    c.coeff = -c.coeff;
    chains_.push_back(std::move(c));
  }
  return *this;
}

DiffOperator& DiffOperator::operator*=(double s) {
  for (auto& c : chains_) c.coeff *= s;
  return *this;
}

DiffOperator DiffOperator::compose(const DiffOperator& o) const {
  require_same_grid(grid_, o.grid_, "DiffOperator::compose");
  DiffOperator out(grid_);
  for (const auto& a : chains_)
    for (const auto& b : o.chains_) {
      Chain c{a.coeff * b.coeff, a.factors};
      c.factors.insert(c.factors.end(), b.factors.begin(), b.factors.end());
      out.chains_.push_back(std::move(c));
    }
  return out;
}

bool operator==(const DiffOperator& a, const DiffOperator& b) {
  if (!(a.grid_ == b.grid_) || a.chains_.size() != b.chains_.size()) return false;
  for (std::size_t i = 0; i < a.chains_.size(); ++i) {
    const auto& ca = a.chains_[i];
    const auto& cb = b.chains_[i];
    if (ca.coeff != cb.coeff || ca.factors.size() != cb.factors.size()) return false;
    for (std::size_t j = 0; j < ca.factors.size(); ++j) {
      const auto& pa = ca.factors[j];
      const auto& pb = cb.factors[j];
      if (pa.kind != pb.kind) return false;
      if (pa.kind == Primitive::Kind::Multiply && pa.field->values != pb.field->values) return false;
    }
  }
  return true;
}

DiffOperator operator+(DiffOperator a, const DiffOperator& b) { return a += b; }
DiffOperator operator-(DiffOperator a, const DiffOperator& b) { return a -= b; }
DiffOperator operator*(double s, DiffOperator a) { return a *= s; }
DiffOperator operator*(const DiffOperator& a, const DiffOperator& b) { return a.compose(b); }

BlockOperator::BlockOperator(std::size_t m, const PeriodicGrid& g)
    : m_(m), grid_(g), entries_(m * m, DiffOperator(g)) {}

std::vector<GridFunction> BlockOperator::apply(const std::vector<GridFunction>& f) const {
  if (f.size() != m_) throw Error(ErrorKind::ShapeMismatch, "block operator input size", double(f.size()));
  std::vector<GridFunction> out(m_, GridFunction(grid_));
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < m_; ++j)
      if (!at(i, j).empty()) out[i] += at(i, j).apply(f[j]);
  return out;
}

BlockOperator BlockOperator::adjoint() const {
  BlockOperator out(m_, grid_);
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = 0; j < m_; ++j) out.at(i, j) = at(j, i).adjoint();
  return out;
}

bool operator==(const BlockOperator& a, const BlockOperator& b) {
  return a.m_ == b.m_ && a.entries_ == b.entries_;
}

}  // namespace geomflow
