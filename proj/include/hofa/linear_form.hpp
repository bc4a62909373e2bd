#pragma once

// Linear forms L = (λ_1..λ_ℓ) ∈ F_p^ℓ acting on tuples X = (x_1..x_ℓ) of
// points of F_p^n by L(X) = Σ λ_j x_j, and ordered systems of such forms.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hofa/tables.hpp"

namespace hofa {

class LinearForm {
 public:
  LinearForm() = default;
  LinearForm(unsigned p, std::vector<unsigned> coeffs) : p_(p), c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("LinearForm: needs at least one coefficient");
    for (auto& v : c_) v %= p_;
  }

  unsigned prime() const { return p_; }
  std::size_t arity() const { return c_.size(); }
  std::span<const unsigned> coeffs() const { return c_; }
  unsigned operator[](std::size_t i) const { return c_[i]; }

  /// |L| = Σ |λ_i| with the λ_i lifted to [0, p-1].
  unsigned weight() const {
    unsigned w = 0;
    for (auto v : c_) w += v;
    return w;
  }

  bool is_zero() const { return weight() == 0; }

  /// Index of the first nonzero coefficient (lc(L)).
  std::optional<std::size_t> leading_index() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0) return i;
    return std::nullopt;
  }

  unsigned leading_coefficient() const {
    auto i = leading_index();
    return i ? c_[*i] : 0;
  }

  std::size_t support_size() const {
    std::size_t s = 0;
    for (auto v : c_) s += (v != 0);
    return s;
  }

  LinearForm scaled(unsigned c) const {
    std::vector<unsigned> r(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] = static_cast<unsigned>((u64{c_[i]} * c) % p_);
    return LinearForm(p_, std::move(r));
  }

  /// L(X) for X given as point indices of `space`.
  u32 apply(const PointSpace& space, std::span<const u32> x) const {
    u32 r = 0;
    for (std::size_t j = 0; j < c_.size(); ++j)
      if (c_[j] != 0) r = space.add(r, space.scale(c_[j], x[j]));
    return r;
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(c_[i]);
    }
    return s;
  }

  static LinearForm parse(unsigned p, std::string_view text, std::size_t column_offset = 0) {
    std::vector<unsigned> c;
    std::size_t start = 0;
    while (true) {
      const auto comma = text.find(',', start);
      auto tok = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      while (!tok.empty() && tok.front() == ' ') {
        tok.remove_prefix(1);
        ++start;
      }
      while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
      i64 v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError("expected an integer coefficient, got '" + std::string(tok) + "'", column_offset + start + 1);
      c.push_back(static_cast<unsigned>(detail::reduce(v, p)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return LinearForm(p, std::move(c));
  }

  bool operator==(const LinearForm& o) const { return c_ == o.c_; }
  /// Graded by weight, then lexicographic.
  std::strong_ordering operator<=>(const LinearForm& o) const {
    if (auto c = weight() <=> o.weight(); c != 0) return c;
    return c_ <=> o.c_;
  }

 private:
  unsigned p_ = 0;
  std::vector<unsigned> c_;
};

class FormSystem {
 public:
  FormSystem(unsigned p, std::vector<LinearForm> forms) : p_(p), forms_(std::move(forms)) {
    if (forms_.empty()) throw std::invalid_argument("FormSystem: empty");
    for (const auto& f : forms_)
      if (f.arity() != forms_.front().arity()) throw std::invalid_argument("FormSystem: forms differ in arity");
  }

  unsigned prime() const { return p_; }
  std::size_t size() const { return forms_.size(); }
  std::size_t arity() const { return forms_.front().arity(); }
  const LinearForm& operator[](std::size_t i) const { return forms_[i]; }
  const std::vector<LinearForm>& forms() const { return forms_; }
  auto begin() const { return forms_.begin(); }
  auto end() const { return forms_.end(); }

  /// True when no form is zero and no form is a multiple of another.
  bool pairwise_independent() const {
    for (std::size_t i = 0; i < forms_.size(); ++i) {
      if (forms_[i].is_zero()) return false;
      for (std::size_t j = i + 1; j < forms_.size(); ++j)
        for (unsigned c = 1; c < p_; ++c)
          if (forms_[i].scaled(c) == forms_[j]) return false;
    }
    return true;
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < forms_.size(); ++i) {
      if (i) s += ';';
      s += forms_[i].str();
    }
    return s;
  }

  static FormSystem parse(unsigned p, std::string_view text) {
    std::vector<LinearForm> forms;
    std::size_t start = 0;
    while (true) {
      const auto semi = text.find(';', start);
      const auto tok = text.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start);
      forms.push_back(LinearForm::parse(p, tok, start));
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
    for (const auto& f : forms)
      if (f.arity() != forms.front().arity())
        throw ParseError("forms in a system must have the same number of coefficients", 1);
    return FormSystem(p, std::move(forms));
  }

 private:
  unsigned p_;
  std::vector<LinearForm> forms_;
};

/// Enumerates X ∈ (F_p^n)^ℓ by the index Σ_j idx(x_j) N^{j-1}, N = p^n.
class TupleSpace {
 public:
  TupleSpace(const PointSpace& space, std::size_t arity) : space_(&space), arity_(arity) {
    total_ = detail::checked_pow(space.size(), static_cast<unsigned>(arity));
  }

  const PointSpace& points() const { return *space_; }
  std::size_t arity() const { return arity_; }
  u64 size() const { return total_; }

  void decode(u64 idx, std::vector<u32>& x) const {
    x.resize(arity_);
    for (std::size_t j = 0; j < arity_; ++j) {
      x[j] = static_cast<u32>(idx % space_->size());
      idx /= space_->size();
    }
  }

  /// image[X] = L(X) for every X.
  std::vector<u32> image(const LinearForm& form) const {
    if (form.arity() != arity_) throw std::invalid_argument("form arity does not match tuple space");
    std::vector<u32> out(total_);
    std::vector<u32> x;
    for (u64 i = 0; i < total_; ++i) {
      decode(i, x);
      out[i] = form.apply(*space_, x);
    }
    return out;
  }

 private:
  const PointSpace* space_;
  std::size_t arity_;
  u64 total_;
};

}  // namespace hofa
