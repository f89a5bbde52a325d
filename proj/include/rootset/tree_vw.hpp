#pragma once

// The class-2 nilpotent 2-group V gamma W over the binary tree of depth d.
//
// Paths (basis of V) are the 2^d bit strings of length d, ordered numerically with the
// first step as the most significant bit. Nodes (basis of W) are the 2^d - 1 strings of
// length < d, numbered in heap order: the prefix s of length L is node 2^L - 1 + s.
// rho(f, g) is the longest common prefix of distinct paths; gamma(f, g) = rho(f, g) for
// f < g, 0 for f > g, and the root node on the diagonal.

#include <array>
#include <bit>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rootset/core.hpp"

namespace rootset {

class TreeVWSpec {
 public:
  static constexpr unsigned kMaxDepth = 4;

  explicit TreeVWSpec(unsigned depth) : depth_(depth) {
    if (depth < 1 || depth > kMaxDepth)
      throw Error(Errc::out_of_range, "tree depth must be in 1.." + std::to_string(kMaxDepth));
    dim_v_ = 1u << depth;
    dim_w_ = dim_v_ - 1;
    chunks_ = (dim_v_ + 7) / 8;
    basis_gamma_.assign(dim_v_ * dim_v_, 0);
    for (unsigned f = 0; f < dim_v_; ++f)
      for (unsigned g = 0; g < dim_v_; ++g)
        basis_gamma_[f * dim_v_ + g] = f == g ? 1u : f < g ? (1u << meet(f, g)) : 0u;
    gamma_chunk_.assign(dim_v_ * chunks_ * 256, 0);
    for (unsigned f = 0; f < dim_v_; ++f)
      for (unsigned c = 0; c < chunks_; ++c)
        for (unsigned byte = 0; byte < 256; ++byte) {
          std::uint32_t acc = 0;
          for (unsigned b = 0; b < 8; ++b) {
            const unsigned g = c * 8 + b;
            if (((byte >> b) & 1u) && g < dim_v_) acc ^= basis_gamma_[f * dim_v_ + g];
          }
          gamma_chunk_[(f * chunks_ + c) * 256 + byte] = acc;
        }
  }

  unsigned depth() const noexcept { return depth_; }
  unsigned dim_v() const noexcept { return dim_v_; }
  unsigned dim_w() const noexcept { return dim_w_; }

  /// Node index of the longest common prefix of distinct paths f and g.
  unsigned meet(unsigned f, unsigned g) const {
    const unsigned b = static_cast<unsigned>(std::bit_width(f ^ g)) - 1;  // highest differing bit
    const unsigned len = depth_ - 1 - b;
    return ((1u << len) - 1) + (f >> (b + 1));
  }

  /// gamma(f, g) on basis paths, as a W bitmask.
  std::uint32_t basis_gamma(unsigned f, unsigned g) const { return basis_gamma_[f * dim_v_ + g]; }

  /// Bilinear extension of gamma to V x V (V, W as bitmasks).
  std::uint32_t gamma(std::uint32_t u, std::uint32_t v) const {
    std::uint32_t acc = 0;
    while (u) {
      const unsigned f = static_cast<unsigned>(std::countr_zero(u));
      u &= u - 1;
      const std::uint32_t* row = &gamma_chunk_[f * chunks_ * 256];
      for (unsigned c = 0; c < chunks_; ++c) acc ^= row[c * 256 + ((v >> (8 * c)) & 0xffu)];
    }
    return acc;
  }

  /// Alternating form rho(u, v) = gamma(u, v) + gamma(v, u).
  std::uint32_t rho(std::uint32_t u, std::uint32_t v) const { return gamma(u, v) ^ gamma(v, u); }

  /// "p" + path bits with trailing zeros dropped ("p0" for the all-zero path).
  std::string path_label(unsigned f) const {
    std::string bits;
    for (unsigned i = 0; i < depth_; ++i) bits += ((f >> (depth_ - 1 - i)) & 1u) ? '1' : '0';
    while (!bits.empty() && bits.back() == '0') bits.pop_back();
    return "p" + (bits.empty() ? std::string("0") : bits);
  }

  /// "r" + prefix bits ("r" is the root).
  std::string node_label(unsigned node) const {
    unsigned len = 0;
    while (node >= (2u << len) - 1) ++len;
    const unsigned s = node - ((1u << len) - 1);
    std::string out = "r";
    for (unsigned i = 0; i < len; ++i) out += ((s >> (len - 1 - i)) & 1u) ? '1' : '0';
    return out;
  }

 private:
  unsigned depth_;
  unsigned dim_v_ = 0;
  unsigned dim_w_ = 0;
  unsigned chunks_ = 0;
  std::vector<std::uint32_t> basis_gamma_;
  std::vector<std::uint32_t> gamma_chunk_;
};

/// Multiplication oracle for V gamma W: element index v | (w << dim V),
/// (v, a)(u, b) = (v + u, a + b + gamma(v, u)). Names are '+'-joined basis labels, "0"
/// for the identity; they do not depend on the depth, so the depth-d group sits inside
/// the depth-(d+1) group under path f -> f0 with unchanged names.
class TreeVWGroup {
 public:
  explicit TreeVWGroup(unsigned depth) : spec_(depth) {
    for (unsigned f = 0; f < spec_.dim_v(); ++f) labels_.emplace(spec_.path_label(f), std::make_pair(true, f));
    for (unsigned n = 0; n < spec_.dim_w(); ++n) labels_.emplace(spec_.node_label(n), std::make_pair(false, n));
  }

  const TreeVWSpec& spec() const noexcept { return spec_; }

  std::size_t order() const noexcept { return std::size_t{1} << (spec_.dim_v() + spec_.dim_w()); }

  std::uint32_t v_of(ElementId e) const { return e.index & ((1u << spec_.dim_v()) - 1); }
  std::uint32_t w_of(ElementId e) const { return e.index >> spec_.dim_v(); }
  ElementId make(std::uint32_t v, std::uint32_t w) const { return ElementId(v | (w << spec_.dim_v())); }

  ElementId mul(ElementId a, ElementId b) const {
    const auto va = v_of(a), vb = v_of(b);
    return make(va ^ vb, w_of(a) ^ w_of(b) ^ spec_.gamma(va, vb));
  }

  ElementId inverse(ElementId a) const {
    const auto v = v_of(a);
    return make(v, w_of(a) ^ spec_.gamma(v, v));
  }

  std::string name(ElementId a) const {
    std::string out;
    auto add = [&](const std::string& s) {
      if (!out.empty()) out += '+';
      out += s;
    };
    for (std::uint32_t v = v_of(a); v; v &= v - 1) add(spec_.path_label(static_cast<unsigned>(std::countr_zero(v))));
    for (std::uint32_t w = w_of(a); w; w &= w - 1) add(spec_.node_label(static_cast<unsigned>(std::countr_zero(w))));
    return out.empty() ? "0" : out;
  }

  std::optional<ElementId> find(std::string_view s) const {
    if (s == "0") return kIdentity;
    std::uint32_t v = 0, w = 0;
    std::size_t start = 0;
    while (start <= s.size()) {
      auto plus = s.find('+', start);
      if (plus == std::string_view::npos) plus = s.size();
      auto it = labels_.find(std::string(s.substr(start, plus - start)));
      if (it == labels_.end()) return std::nullopt;
      auto& [is_path, idx] = it->second;
      if (is_path)
        v ^= 1u << idx;
      else
        w ^= 1u << idx;
      start = plus + 1;
    }
    return make(v, w);
  }

 private:
  TreeVWSpec spec_;
  std::unordered_map<std::string, std::pair<bool, unsigned>> labels_;
};

}  // namespace rootset
