#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

#include "rootset/core.hpp"

namespace rootset {

/// Element num / p^k (mod 1) of the quasicyclic group Z_{p^inf}, always stored reduced:
/// k = 0 means the identity (num = 0); otherwise 0 < num < p^k and p does not divide num.
class PruferElement {
 public:
  PruferElement(std::uint64_t p, std::uint64_t num, unsigned k) : p_(p), num_(num), k_(k) { normalize(); }

  /// The element with numerator `num` in the level-`level` cyclic group Z_{p^level}.
  static PruferElement at_level(std::uint64_t p, unsigned level, std::uint64_t num) { return {p, num, level}; }

  std::uint64_t prime() const noexcept { return p_; }
  std::uint64_t numerator() const noexcept { return num_; }
  unsigned denominator_exponent() const noexcept { return k_; }
  std::uint64_t order() const { return math::ipow(p_, k_); }
  bool is_identity() const noexcept { return k_ == 0; }

  /// Numerator in Z_{p^level}; requires level >= denominator_exponent().
  std::uint64_t numerator_at(unsigned level) const {
    if (level < k_) throw Error(Errc::level_too_small, name() + " is not present at level " + std::to_string(level));
    return num_ * math::ipow(p_, level - k_);
  }

  PruferElement operator+(const PruferElement& o) const {
    const unsigned k = std::max(k_, o.k_);
    return at_level(p_, k, (numerator_at(k) + o.numerator_at(k)) % math::ipow(p_, k));
  }

  PruferElement operator-() const {
    if (k_ == 0) return *this;
    return {p_, math::ipow(p_, k_) - num_, k_};
  }

  /// "0" for the identity, otherwise "num/p^k" with the denominator written out.
  std::string name() const {
    if (k_ == 0) return "0";
    return std::to_string(num_) + "/" + std::to_string(order());
  }

  static std::optional<PruferElement> parse(std::uint64_t p, std::string_view s) {
    if (s == "0") return PruferElement(p, 0, 0);
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    std::uint64_t num = 0, den = 0;
    auto r1 = std::from_chars(s.data(), s.data() + slash, num);
    auto r2 = std::from_chars(s.data() + slash + 1, s.data() + s.size(), den);
    if (r1.ec != std::errc() || r1.ptr != s.data() + slash || r2.ec != std::errc() || r2.ptr != s.data() + s.size())
      return std::nullopt;
    unsigned k = 0;
    std::uint64_t d = den;
    while (d > 1 && d % p == 0) {
      d /= p;
      ++k;
    }
    if (d != 1 || k == 0 || num == 0 || num >= den || num % p == 0) return std::nullopt;
    return PruferElement(p, num, k);
  }

  friend bool operator==(const PruferElement& a, const PruferElement& b) {
    return a.p_ == b.p_ && a.num_ == b.num_ && a.k_ == b.k_;
  }

 private:
  void normalize() {
    if (!math::is_prime(p_)) throw Error(Errc::precondition, std::to_string(p_) + " is not prime");
    if (k_ > 0) num_ %= math::ipow(p_, k_);
    if (num_ == 0) {
      k_ = 0;
      return;
    }
    while (k_ > 0 && num_ % p_ == 0) {
      num_ /= p_;
      --k_;
    }
  }

  std::uint64_t p_;
  std::uint64_t num_;
  unsigned k_;
};

}  // namespace rootset
