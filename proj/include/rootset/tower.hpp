#pragma once

// Infinite locally finite groups as ascending chains level(k0) <= level(k0+1) <= ...
// of finite groups. Levels are coordinate oracles rather than Cayley tables, so towers
// reach orders far beyond what a table could hold. Every element carries one canonical
// name that is identical at every level containing it.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_map>

#include "rootset/kernel.hpp"
#include "rootset/prufer.hpp"
#include "rootset/root_sets.hpp"
#include "rootset/tree_vw.hpp"

namespace rootset {

/// One finite level of a tower, usable anywhere a FiniteGroup is expected.
class LevelGroup {
 public:
  virtual ~LevelGroup() = default;
  virtual std::size_t order() const = 0;
  virtual ElementId mul(ElementId a, ElementId b) const = 0;
  virtual ElementId inverse(ElementId a) const = 0;
  virtual std::string name(ElementId a) const = 0;

  virtual std::optional<ElementId> find(std::string_view name) const {
    std::call_once(index_once_, [this] {
      for (std::size_t i = 0; i < order(); ++i)
        index_.emplace(this->name(ElementId(static_cast<std::uint32_t>(i))), static_cast<std::uint32_t>(i));
    });
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return ElementId(it->second);
  }

 private:
  mutable std::once_flag index_once_;
  mutable std::unordered_map<std::string, std::uint32_t> index_;
};

static_assert(FiniteGroup<LevelGroup>);

using LevelPtr = std::shared_ptr<const LevelGroup>;

namespace levels {

/// Adapts any FiniteGroup value (a Cayley table, a tree oracle) into a LevelGroup.
template <FiniteGroup G>
class Adapted final : public LevelGroup {
 public:
  explicit Adapted(G g) : g_(std::move(g)) {}
  std::size_t order() const override { return g_.order(); }
  ElementId mul(ElementId a, ElementId b) const override { return g_.mul(a, b); }
  ElementId inverse(ElementId a) const override { return g_.inverse(a); }
  std::string name(ElementId a) const override { return std::string(g_.name(a)); }
  std::optional<ElementId> find(std::string_view s) const override {
    if constexpr (requires { g_.find(s); })
      return g_.find(s);
    else
      return LevelGroup::find(s);
  }
  const G& group() const { return g_; }

 private:
  G g_;
};

/// Z_{p^k}; element index = numerator.
class Cyclic final : public LevelGroup {
 public:
  Cyclic(std::uint64_t p, unsigned k) : p_(p), k_(k), n_(math::ipow(p, k)) {}
  std::size_t order() const override { return n_; }
  ElementId mul(ElementId a, ElementId b) const override { return ElementId(static_cast<std::uint32_t>((a.index + b.index) % n_)); }
  ElementId inverse(ElementId a) const override { return ElementId(static_cast<std::uint32_t>((n_ - a.index) % n_)); }
  std::string name(ElementId a) const override { return PruferElement::at_level(p_, k_, a.index).name(); }
  std::optional<ElementId> find(std::string_view s) const override {
    auto e = PruferElement::parse(p_, s);
    if (!e || e->denominator_exponent() > k_) return std::nullopt;
    return ElementId(static_cast<std::uint32_t>(e->numerator_at(k_)));
  }

 private:
  std::uint64_t p_;
  unsigned k_;
  std::uint64_t n_;
};

/// Decomposition h = rep * a^j of a finite group H over a central cyclic subgroup <a>,
/// with reps chosen as the minimal index of each coset.
struct CentralTransversal {
  std::vector<ElementId> reps;
  std::vector<std::uint32_t> slot_of;  // H index -> rep slot
  std::vector<std::uint32_t> exp_of;   // H index -> j
};

inline CentralTransversal central_transversal(const FiniteGroupTable& h, ElementId a) {
  const auto pw = powers_of(h, a);
  CentralTransversal t;
  t.slot_of.assign(h.order(), UINT32_MAX);
  t.exp_of.assign(h.order(), 0);
  for (std::size_t i = 0; i < h.order(); ++i) {
    if (t.slot_of[i] != UINT32_MAX) continue;
    const ElementId rep(static_cast<std::uint32_t>(i));
    const auto slot = static_cast<std::uint32_t>(t.reps.size());
    t.reps.push_back(rep);
    for (std::size_t j = 0; j < pw.size(); ++j) {
      const auto e = h.mul(rep, pw[j]).index;
      t.slot_of[e] = slot;
      t.exp_of[e] = static_cast<std::uint32_t>(j);
    }
  }
  return t;
}

/// (H x Z_{p^k}) / <(a, -1/p^n)>: element index = slot * p^k + c, name "hrep|c".
class Amalgam final : public LevelGroup {
 public:
  Amalgam(std::shared_ptr<const FiniteGroupTable> h, std::shared_ptr<const CentralTransversal> t, std::uint64_t p,
          unsigned n, unsigned k)
      : h_(std::move(h)), t_(std::move(t)), p_(p), k_(k), pk_(math::ipow(p, k)), shift_(math::ipow(p, k - n)) {}

  std::size_t order() const override { return t_->reps.size() * pk_; }

  ElementId mul(ElementId a, ElementId b) const override {
    const auto hp = h_->mul(t_->reps[a.index / pk_], t_->reps[b.index / pk_]).index;
    const std::uint64_t c = (a.index % pk_ + b.index % pk_ + t_->exp_of[hp] * shift_) % pk_;
    return make(t_->slot_of[hp], c);
  }

  ElementId inverse(ElementId a) const override {
    const auto hi = h_->inverse(t_->reps[a.index / pk_]).index;
    const std::uint64_t c = (pk_ - a.index % pk_ + t_->exp_of[hi] * shift_) % pk_;
    return make(t_->slot_of[hi], c);
  }

  std::string name(ElementId a) const override {
    return h_->name(t_->reps[a.index / pk_]) + "|" + PruferElement::at_level(p_, k_, a.index % pk_).name();
  }

  std::optional<ElementId> find(std::string_view s) const override {
    const auto bar = s.rfind('|');
    if (bar == std::string_view::npos) return std::nullopt;
    auto h = h_->find(s.substr(0, bar));
    auto c = PruferElement::parse(p_, s.substr(bar + 1));
    if (!h || !c || c->denominator_exponent() > k_) return std::nullopt;
    if (t_->reps[t_->slot_of[h->index]] != *h) return std::nullopt;  // not a transversal representative
    return make(t_->slot_of[h->index], c->numerator_at(k_));
  }

  ElementId c_element(std::uint64_t num) const { return make(0, num % pk_); }

 private:
  ElementId make(std::uint64_t slot, std::uint64_t c) const { return ElementId(static_cast<std::uint32_t>(slot * pk_ + c)); }

  std::shared_ptr<const FiniteGroupTable> h_;
  std::shared_ptr<const CentralTransversal> t_;
  std::uint64_t p_;
  unsigned k_;
  std::uint64_t pk_;
  std::uint64_t shift_;
};

/// Index-2 extension <x, B> with x^2 = y and x^-1 g x = alpha(g): element x^e g has
/// index e*|B| + g, and (x^e g)(x^f h) = x^(e+f) alpha^f(g) h, with x^2 = y.
class InvertingExtension final : public LevelGroup {
 public:
  InvertingExtension(LevelPtr base, std::vector<ElementId> alpha, ElementId y)
      : base_(std::move(base)), alpha_(std::move(alpha)), y_(y), nb_(base_->order()) {
    y_inv_ = base_->inverse(y_);
  }

  std::size_t order() const override { return 2 * nb_; }

  ElementId mul(ElementId a, ElementId b) const override {
    const bool ea = a.index >= nb_, eb = b.index >= nb_;
    ElementId g(static_cast<std::uint32_t>(a.index % nb_));
    const ElementId h(static_cast<std::uint32_t>(b.index % nb_));
    if (eb) g = alpha_[g.index];
    ElementId r = base_->mul(g, h);
    if (ea && eb) r = base_->mul(y_, r);
    return ElementId(static_cast<std::uint32_t>((ea != eb ? nb_ : 0) + r.index));
  }

  ElementId inverse(ElementId a) const override {
    const ElementId g(static_cast<std::uint32_t>(a.index % nb_));
    if (a.index < nb_) return base_->inverse(g);
    return ElementId(static_cast<std::uint32_t>(nb_ + base_->mul(base_->inverse(alpha_[g.index]), y_inv_).index));
  }

  std::string name(ElementId a) const override {
    if (a.index < nb_) return base_->name(a);
    if (a.index == nb_) return "x";
    return "x*" + base_->name(ElementId(static_cast<std::uint32_t>(a.index - nb_)));
  }

  std::optional<ElementId> find(std::string_view s) const override {
    if (s == "x") return ElementId(static_cast<std::uint32_t>(nb_));
    if (s.starts_with("x*")) {
      auto g = base_->find(s.substr(2));
      if (!g || *g == kIdentity) return std::nullopt;
      return ElementId(static_cast<std::uint32_t>(nb_ + g->index));
    }
    return base_->find(s);
  }

  const LevelGroup& base() const { return *base_; }

 private:
  LevelPtr base_;
  std::vector<ElementId> alpha_;
  ElementId y_;
  ElementId y_inv_;
  std::size_t nb_;
};

/// Cosets of a normal subgroup of a parent level, named "[m]" with m the
/// lexicographically least member name (stable across tower levels).
class Cosets final : public LevelGroup {
 public:
  Cosets(LevelPtr parent, const Subset& normal) : parent_(std::move(parent)) {
    decomposition_ = coset_decomposition(*parent_, normal);
    names_.resize(decomposition_.representatives.size());
    for (std::size_t i = 0; i < parent_->order(); ++i) {
      auto nm = parent_->name(ElementId(static_cast<std::uint32_t>(i)));
      auto& slot = names_[decomposition_.coset_of[i]];
      if (slot.empty() || nm < slot) slot = std::move(nm);
    }
    for (auto& n : names_) n = "[" + n + "]";
  }

  std::size_t order() const override { return decomposition_.representatives.size(); }
  ElementId mul(ElementId a, ElementId b) const override {
    return project(parent_->mul(decomposition_.representatives[a.index], decomposition_.representatives[b.index]));
  }
  ElementId inverse(ElementId a) const override { return project(parent_->inverse(decomposition_.representatives[a.index])); }
  std::string name(ElementId a) const override { return names_.at(a.index); }

  std::optional<ElementId> find(std::string_view s) const override {
    if (auto e = LevelGroup::find(s)) return e;
    if (auto p = parent_->find(s)) return project(*p);  // any member names its coset
    return std::nullopt;
  }

  ElementId project(ElementId parent_element) const { return ElementId(decomposition_.coset_of[parent_element.index]); }
  ElementId representative(ElementId a) const { return decomposition_.representatives[a.index]; }
  const LevelGroup& parent() const { return *parent_; }

 private:
  LevelPtr parent_;
  CosetDecomposition decomposition_;
  std::vector<std::string> names_;
};

}  // namespace levels

/// Result of validating one embedding level(k) -> level(k+1).
struct EmbeddingCheck {
  unsigned level = 0;
  bool injective = true;
  bool names_stable = true;
  bool homomorphism_full = true;  // false: law checked on a random sample of pairs
};

/// A tower of finite groups. Levels and embeddings are built on first use and cached;
/// embeddings are validated (injective, homomorphic, name-preserving) when built and a
/// failure is a hard error.
class Tower : public std::enable_shared_from_this<Tower> {
 public:
  virtual ~Tower() = default;

  virtual std::string kind() const = 0;
  virtual unsigned min_level() const = 0;
  virtual unsigned max_level() const { return 24; }
  /// Order of level(k) predicted by the construction; checked against every built level.
  virtual std::size_t closed_form_order(unsigned k) const = 0;
  /// Predicted K(G) membership for an element of level(k), when the theory gives one.
  virtual std::optional<bool> theory_contains(unsigned /*k*/, ElementId /*e*/) const { return std::nullopt; }
  virtual std::optional<std::string> theory_description() const { return std::nullopt; }
  /// Prime of the quasicyclic part, if the tower has one.
  virtual std::optional<std::uint64_t> prime() const { return std::nullopt; }
  /// Element num/p^k of the quasicyclic part at level k.
  virtual std::optional<ElementId> c_element(unsigned /*k*/, std::uint64_t /*num*/) const { return std::nullopt; }
  /// Alternative spellings accepted by resolve(), e.g. "a" for the distinguished involution.
  virtual std::map<std::string, std::string> aliases() const {
    std::map<std::string, std::string> out;
    if (auto p = prime()) {
      const unsigned k = std::max(min_level(), 1u);
      if (auto a = c_element(k, math::ipow(*p, k - 1))) out["a"] = level(k)->name(*a);
    }
    return out;
  }

  LevelPtr level(unsigned k) const {
    check_level(k);
    std::lock_guard lock(mutex_);
    auto it = levels_.find(k);
    if (it != levels_.end()) return it->second;
    auto lv = build_level(k);
    if (lv->order() != closed_form_order(k))
      throw std::logic_error(kind() + " level " + std::to_string(k) + " has order " + std::to_string(lv->order()) +
                             ", expected " + std::to_string(closed_form_order(k)));
    spot_check_associativity(*lv, k);
    levels_.emplace(k, lv);
    return lv;
  }

  /// Images in level(k+1) of the elements of level(k).
  const std::vector<ElementId>& embed(unsigned k) const {
    auto lo = level(k);
    auto hi = level(k + 1);
    std::lock_guard lock(mutex_);
    auto it = embeddings_.find(k);
    if (it != embeddings_.end()) return it->second.first;
    auto map = build_embedding(k, *lo, *hi);
    auto chk = validate_embedding(k, *lo, *hi, map);
    return embeddings_.emplace(k, std::make_pair(std::move(map), chk)).first->second.first;
  }

  EmbeddingCheck embedding_check(unsigned k) const {
    embed(k);
    std::lock_guard lock(mutex_);
    return embeddings_.at(k).second;
  }

  /// Canonical name for `name` (which may be an alias); throws unknown-element.
  std::string resolve(const std::string& name, unsigned up_to) const {
    auto al = aliases();
    const std::string canon = al.count(name) ? al.at(name) : name;
    if (birth_level(canon, up_to)) return canon;
    throw Error(Errc::unknown_element, "'" + name + "' is not an element of " + kind() + " up to level " + std::to_string(up_to));
  }

  /// Smallest level containing the element, searching up to `up_to`.
  std::optional<unsigned> birth_level(const std::string& canonical, unsigned up_to) const {
    for (unsigned k = min_level(); k <= std::min(up_to, max_level()); ++k) {
      auto e = level(k)->find(canonical);
      if (e && level(k)->name(*e) == canonical) return k;
    }
    return std::nullopt;
  }

  /// Names of level(k) outside the image of level(k-1) (everything, at the first level).
  std::vector<std::string> new_elements(unsigned k) const {
    auto lv = level(k);
    std::vector<char> old(lv->order(), 0);
    if (k > min_level())
      for (auto e : embed(k - 1)) old[e.index] = 1;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < lv->order(); ++i)
      if (!old[i]) out.push_back(lv->name(ElementId(static_cast<std::uint32_t>(i))));
    return out;
  }

 protected:
  virtual LevelPtr build_level(unsigned k) const = 0;

  /// Default embedding: carry every element to the element of the same canonical name.
  virtual std::vector<ElementId> build_embedding(unsigned k, const LevelGroup& lo, const LevelGroup& hi) const {
    std::vector<ElementId> map(lo.order());
    for (std::size_t i = 0; i < lo.order(); ++i) {
      const auto nm = lo.name(ElementId(static_cast<std::uint32_t>(i)));
      auto e = hi.find(nm);
      if (!e) throw std::logic_error(kind() + ": element " + nm + " of level " + std::to_string(k) + " vanishes at level " + std::to_string(k + 1));
      map[i] = *e;
    }
    return map;
  }

  void check_level(unsigned k) const {
    if (k < min_level())
      throw Error(Errc::level_too_small, kind() + " starts at level " + std::to_string(min_level()) + ", asked for " + std::to_string(k));
    if (k > max_level())
      throw Error(Errc::out_of_range, kind() + " supports levels up to " + std::to_string(max_level()));
  }

 private:
  static void spot_check_associativity(const LevelGroup& g, unsigned k) {
    std::mt19937_64 rng(0x5eed + k);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(g.order() - 1));
    const std::size_t samples = std::min<std::size_t>(10 * g.order(), 200000);
    for (std::size_t s = 0; s < samples; ++s) {
      const ElementId a(pick(rng)), b(pick(rng)), c(pick(rng));
      if (g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
        throw std::logic_error("level " + std::to_string(k) + " is not associative at (" + g.name(a) + ", " + g.name(b) + ", " +
                               g.name(c) + ")");
    }
  }

  EmbeddingCheck validate_embedding(unsigned k, const LevelGroup& lo, const LevelGroup& hi,
                                    const std::vector<ElementId>& map) const {
    EmbeddingCheck chk{k, true, true, true};
    std::vector<char> hit(hi.order(), 0);
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (hit[map[i].index]) chk.injective = false;
      hit[map[i].index] = 1;
      if (hi.name(map[i]) != lo.name(ElementId(static_cast<std::uint32_t>(i)))) chk.names_stable = false;
    }
    auto hom = check_homomorphism(lo, hi, map);
    chk.homomorphism_full = hom.full;
    if (!chk.injective || !chk.names_stable || hom.witness)
      throw std::logic_error(kind() + ": embedding of level " + std::to_string(k) + " is invalid");
    return chk;
  }

  mutable std::mutex mutex_;
  mutable std::map<unsigned, LevelPtr> levels_;
  mutable std::map<unsigned, std::pair<std::vector<ElementId>, EmbeddingCheck>> embeddings_;
};

using TowerPtr = std::shared_ptr<const Tower>;

// ---------------------------------------------------------------------------
// Tower kinds
// ---------------------------------------------------------------------------

/// Z_{p^inf} as the union of Z_{p^k}, k >= 1.
class PruferTower final : public Tower {
 public:
  explicit PruferTower(std::uint64_t p) : p_(p) {
    if (!math::is_prime(p)) throw Error(Errc::precondition, "p = " + std::to_string(p) + " is not prime");
  }
  std::string kind() const override { return "prufer"; }
  unsigned min_level() const override { return 1; }
  unsigned max_level() const override { return static_cast<unsigned>(std::log2(double(1u << 26)) / std::log2(double(p_))); }
  std::size_t closed_form_order(unsigned k) const override { return math::ipow(p_, k); }
  std::optional<bool> theory_contains(unsigned, ElementId) const override { return true; }
  std::optional<std::string> theory_description() const override { return "K = whole group (quasicyclic)"; }
  std::optional<std::uint64_t> prime() const override { return p_; }
  std::optional<ElementId> c_element(unsigned k, std::uint64_t num) const override {
    return ElementId(static_cast<std::uint32_t>(num % math::ipow(p_, k)));
  }

 protected:
  LevelPtr build_level(unsigned k) const override { return std::make_shared<levels::Cyclic>(p_, k); }
  std::vector<ElementId> build_embedding(unsigned, const LevelGroup& lo, const LevelGroup&) const override {
    std::vector<ElementId> map(lo.order());
    for (std::size_t i = 0; i < lo.order(); ++i) map[i] = ElementId(static_cast<std::uint32_t>(i * p_));
    return map;
  }

 private:
  std::uint64_t p_;
};

/// Central amalgam (H x C)_A with C quasicyclic and A = <a_gen> <= Z(H) of order p^n;
/// level k (k >= max(n, 1)) is (H x Z_{p^k}) / <(a_gen, -1/p^n)>.
class AmalgamTower final : public Tower {
 public:
  AmalgamTower(FiniteGroupTable h, std::uint64_t p, ElementId a_gen, unsigned n)
      : h_(std::make_shared<const FiniteGroupTable>(std::move(h))), p_(p), n_(n), a_gen_(a_gen) {
    if (!math::is_prime(p)) throw Error(Errc::precondition, "p = " + std::to_string(p) + " is not prime");
    if (a_gen.index >= h_->order()) throw Error(Errc::invalid_element, "a_gen outside H");
    for (std::size_t i = 0; i < h_->order(); ++i)
      if (!commutes(*h_, a_gen, ElementId(static_cast<std::uint32_t>(i))))
        throw Error(Errc::precondition, "a_gen " + h_->name(a_gen) + " is not central (fails to commute with " +
                                            h_->name(ElementId(static_cast<std::uint32_t>(i))) + ")");
    const auto ord = order_of(*h_, a_gen);
    if (ord != math::ipow(p, n))
      throw Error(Errc::precondition, "order of a_gen is " + std::to_string(ord) + ", not " + std::to_string(p) + "^" + std::to_string(n));
    transversal_ = std::make_shared<const levels::CentralTransversal>(levels::central_transversal(*h_, a_gen));
  }

  std::string kind() const override { return "t1"; }
  unsigned min_level() const override { return std::max(n_, 1u); }
  unsigned max_level() const override {
    unsigned k = min_level();
    while (closed_form_order(k + 1) <= (std::size_t{1} << 26)) ++k;
    return k;
  }
  std::size_t closed_form_order(unsigned k) const override { return h_->order() * math::ipow(p_, k) / math::ipow(p_, n_); }
  std::optional<bool> theory_contains(unsigned k, ElementId e) const override { return e.index < math::ipow(p_, k); }
  std::optional<std::string> theory_description() const override { return "type T1: K = C (the quasicyclic part)"; }
  std::optional<std::uint64_t> prime() const override { return p_; }
  std::optional<ElementId> c_element(unsigned k, std::uint64_t num) const override {
    return ElementId(static_cast<std::uint32_t>(num % math::ipow(p_, k)));
  }

  const FiniteGroupTable& h() const { return *h_; }
  const levels::CentralTransversal& transversal() const { return *transversal_; }
  unsigned n() const { return n_; }

  /// Image of h in level k: (rep(h), j(h)/p^n).
  ElementId embed_h(unsigned k, ElementId h) const {
    const std::uint64_t pk = math::ipow(p_, k);
    return ElementId(static_cast<std::uint32_t>(transversal_->slot_of[h.index] * pk +
                                                transversal_->exp_of[h.index] * math::ipow(p_, k - n_)));
  }

 protected:
  LevelPtr build_level(unsigned k) const override {
    return std::make_shared<levels::Amalgam>(h_, transversal_, p_, n_, k);
  }
  std::vector<ElementId> build_embedding(unsigned k, const LevelGroup& lo, const LevelGroup&) const override {
    const std::uint64_t pk = math::ipow(p_, k);
    std::vector<ElementId> map(lo.order());
    for (std::size_t i = 0; i < lo.order(); ++i)
      map[i] = ElementId(static_cast<std::uint32_t>((i / pk) * pk * p_ + (i % pk) * p_));
    return map;
  }

 private:
  std::shared_ptr<const FiniteGroupTable> h_;
  std::uint64_t p_;
  unsigned n_;
  ElementId a_gen_;
  std::shared_ptr<const levels::CentralTransversal> transversal_;
};

/// How to build the automorphism alpha of each base level.
struct AlphaRecipe {
  enum class Kind { inversion, identity, invert_c };
  Kind kind = Kind::inversion;
  /// invert_c only: images of generators of H (H names -> tower canonical names);
  /// alpha(h c) = alpha(h) c^-1.
  std::vector<std::pair<std::string, std::string>> h_images;
};

inline const char* to_string(AlphaRecipe::Kind k) {
  switch (k) {
    case AlphaRecipe::Kind::inversion: return "inversion";
    case AlphaRecipe::Kind::identity: return "identity";
    case AlphaRecipe::Kind::invert_c: return "invert_c";
  }
  return "unknown";
}

/// Type T2: G = <x, G1> with G1 a T1 tower for p = 2 (or the bare 2^inf tower),
/// x^2 = y, x^-1 g x = alpha(g). The extension conditions (alpha an automorphism fixing
/// y, alpha^2 = conjugation by y, alpha inverts C, y^m = a) are checked at every level.
class InvertingExtensionTower final : public Tower {
 public:
  InvertingExtensionTower(TowerPtr base, std::string y, unsigned m, AlphaRecipe alpha, std::string kind_tag = "t2",
                          std::optional<unsigned> first_level = std::nullopt)
      : base_(std::move(base)), y_name_(std::move(y)), m_(m), alpha_(std::move(alpha)), kind_(std::move(kind_tag)) {
    if (base_->prime() != std::optional<std::uint64_t>(2))
      throw Error(Errc::precondition, "t2 base must be a 2^inf tower (prufer p=2 or t1 with p=2)");
    if (m_ < 1) throw Error(Errc::precondition, "m must be >= 1");
    const unsigned cap = base_->max_level();
    y_name_ = base_->resolve(y_name_, cap);
    k0_ = std::max({base_->min_level(), *base_->birth_level(y_name_, cap), 2u});
    if (first_level) k0_ = std::max(k0_, *first_level);
  }

  std::string kind() const override { return kind_; }
  unsigned min_level() const override { return k0_; }
  unsigned max_level() const override { return base_->max_level() - 1; }
  std::size_t closed_form_order(unsigned k) const override { return 2 * base_->closed_form_order(k); }
  std::optional<bool> theory_contains(unsigned k, ElementId e) const override {
    return e == kIdentity || e == *c_element(k, std::size_t{1} << (k - 1));
  }
  std::optional<std::string> theory_description() const override { return "type T2: K = <a>, a the involution of C"; }
  std::optional<std::uint64_t> prime() const override { return 2; }
  std::optional<ElementId> c_element(unsigned k, std::uint64_t num) const override { return base_->c_element(k, num); }

  const Tower& base() const { return *base_; }
  const std::string& y_name() const { return y_name_; }
  unsigned m() const { return m_; }
  const AlphaRecipe& alpha() const { return alpha_; }

  /// The automorphism of base level(k) prescribed by the recipe (not yet validated).
  std::vector<ElementId> alpha_map(unsigned k) const {
    auto b = base_->level(k);
    const std::size_t n = b->order();
    std::vector<ElementId> map(n);
    switch (alpha_.kind) {
      case AlphaRecipe::Kind::inversion:
        for (std::size_t i = 0; i < n; ++i) map[i] = b->inverse(ElementId(static_cast<std::uint32_t>(i)));
        break;
      case AlphaRecipe::Kind::identity:
        for (std::size_t i = 0; i < n; ++i) map[i] = ElementId(static_cast<std::uint32_t>(i));
        break;
      case AlphaRecipe::Kind::invert_c: {
        const auto* am = dynamic_cast<const AmalgamTower*>(base_.get());
        if (!am) {
          if (!alpha_.h_images.empty()) throw Error(Errc::precondition, "invert_c images need a t1 base");
          for (std::size_t i = 0; i < n; ++i) map[i] = b->inverse(ElementId(static_cast<std::uint32_t>(i)));
          break;
        }
        std::vector<ElementId> gens, imgs;
        for (const auto& [hn, tn] : alpha_.h_images) {
          gens.push_back(am->h().at(hn));
          auto img = b->find(tn);
          if (!img) throw Error(Errc::level_too_small, "alpha image " + tn + " is not present at level " + std::to_string(k));
          imgs.push_back(*img);
        }
        // Generators not listed are the H-part needed to reach all of H; close them under the
        // given images, then extend over C by inversion.
        auto psi = extend_from_generators(am->h(), *b, gens, imgs);
        const std::uint64_t pk = std::uint64_t{1} << k;
        for (std::size_t i = 0; i < n; ++i) {
          const auto slot = i / pk, c = i % pk;
          const ElementId h_rep = am->transversal().reps[slot];
          map[i] = b->mul(psi(h_rep), *c_element(k, (pk - c) % pk));
        }
        break;
      }
    }
    return map;
  }

 protected:
  LevelPtr build_level(unsigned k) const override {
    auto b = base_->level(k);
    auto fail = [&](const std::string& what) {
      return Error(Errc::extension_conditions_failed, "level " + std::to_string(k) + ": " + what);
    };
    const ElementId y = *b->find(y_name_);
    std::vector<ElementId> alpha;
    try {
      alpha = validate_automorphism(*b, alpha_map(k)).images;
    } catch (const Error& e) {
      throw fail(std::string("alpha is not an automorphism (") + e.what() + ")");
    }
    if (alpha[y.index] != y) throw fail("alpha does not fix y");
    const ElementId yi = b->inverse(y);
    for (std::size_t i = 0; i < b->order(); ++i) {
      const ElementId g(static_cast<std::uint32_t>(i));
      if (alpha[alpha[i].index] != b->mul(b->mul(yi, g), y))
        throw fail("alpha^2 is not conjugation by y (at " + b->name(g) + ")");
    }
    const std::uint64_t pk = std::uint64_t{1} << k;
    for (std::uint64_t c = 0; c < pk; ++c) {
      const ElementId e = *c_element(k, c);
      if (alpha[e.index] != b->inverse(e)) throw fail("alpha does not invert C (at " + b->name(e) + ")");
    }
    if (power(*b, y, m_) != *c_element(k, pk / 2))
      throw fail("y^m != a for m = " + std::to_string(m_));
    return std::make_shared<levels::InvertingExtension>(b, std::move(alpha), y);
  }

 private:
  TowerPtr base_;
  std::string y_name_;
  unsigned m_;
  AlphaRecipe alpha_;
  std::string kind_;
  unsigned k0_ = 2;
};

/// Depth-indexed V gamma W groups, level k = depth k, path f -> f0.
class TreeVWTower final : public Tower {
 public:
  std::string kind() const override { return "tree_vw"; }
  unsigned min_level() const override { return 1; }
  unsigned max_level() const override { return 3; }  // depth 4 has 2^31 elements: oracle only, not enumerable
  std::size_t closed_form_order(unsigned k) const override { return std::size_t{1} << ((1u << k) + (1u << k) - 1); }

 protected:
  LevelPtr build_level(unsigned k) const override { return std::make_shared<levels::Adapted<TreeVWGroup>>(TreeVWGroup(k)); }
};

/// Level-wise quotient by the finite normal subgroup generated by `normal` names.
class QuotientTower final : public Tower {
 public:
  QuotientTower(TowerPtr parent, std::vector<std::string> normal, unsigned check_levels = 3)
      : parent_(std::move(parent)) {
    const unsigned cap = parent_->max_level();
    k0_ = parent_->min_level();
    for (auto& n : normal) {
      n = parent_->resolve(n, cap);
      k0_ = std::max(k0_, *parent_->birth_level(n, cap));
    }
    normal_names_ = std::move(normal);
    std::set<std::string> first;
    for (unsigned k = k0_; k <= std::min(cap, k0_ + check_levels); ++k) {
      auto lv = parent_->level(k);
      auto sub = subgroup_at(*lv);
      try {
        require_normal(*lv, sub);
      } catch (const Error& e) {
        throw Error(Errc::not_normal, "at level " + std::to_string(k) + ": " + e.what());
      }
      std::set<std::string> names;
      for (auto e : sub) names.insert(lv->name(e));
      if (k == k0_)
        first = names;
      else if (names != first)
        throw Error(Errc::not_stable, "generated subgroup changes between levels " + std::to_string(k0_) + " and " + std::to_string(k));
    }
    normal_order_ = first.size();
    for (const auto& nm : first) generated_.push_back(nm);
  }

  std::string kind() const override { return "quotient"; }
  unsigned min_level() const override { return k0_; }
  unsigned max_level() const override { return parent_->max_level(); }
  std::size_t closed_form_order(unsigned k) const override { return parent_->closed_form_order(k) / normal_order_; }

  /// A finite normal subgroup inside K maps K onto K of the quotient.
  std::optional<bool> theory_contains(unsigned k, ElementId e) const override {
    if (!parent_theory_covers_normal()) return std::nullopt;
    auto lv = level(k);
    const auto& cos = dynamic_cast<const levels::Cosets&>(*lv);
    return parent_->theory_contains(k, cos.representative(e));
  }
  std::optional<std::string> theory_description() const override {
    if (!parent_theory_covers_normal()) return std::nullopt;
    return "image of the parent's K (normal subgroup lies inside K)";
  }

  const std::vector<std::string>& normal_subgroup() const { return generated_; }

 protected:
  LevelPtr build_level(unsigned k) const override {
    auto lv = parent_->level(k);
    return std::make_shared<levels::Cosets>(lv, subgroup_at(*lv));
  }
  std::vector<ElementId> build_embedding(unsigned k, const LevelGroup& lo, const LevelGroup& hi) const override {
    const auto& clo = dynamic_cast<const levels::Cosets&>(lo);
    const auto& chi = dynamic_cast<const levels::Cosets&>(hi);
    const auto& pe = parent_->embed(k);
    std::vector<ElementId> map(lo.order());
    for (std::size_t i = 0; i < lo.order(); ++i)
      map[i] = chi.project(pe[clo.representative(ElementId(static_cast<std::uint32_t>(i))).index]);
    return map;
  }

 private:
  Subset subgroup_at(const LevelGroup& lv) const {
    std::vector<ElementId> gens;
    for (const auto& n : normal_names_) gens.push_back(*lv.find(n));
    return closure(lv, gens);
  }

  bool parent_theory_covers_normal() const {
    auto lv = parent_->level(k0_);
    for (const auto& n : generated_) {
      auto t = parent_->theory_contains(k0_, *lv->find(n));
      if (!t || !*t) return false;
    }
    return true;
  }

  TowerPtr parent_;
  std::vector<std::string> normal_names_;
  std::vector<std::string> generated_;
  std::size_t normal_order_ = 1;
  unsigned k0_ = 1;
};

inline TowerPtr prufer_tower(std::uint64_t p) { return std::make_shared<PruferTower>(p); }

inline TowerPtr t1_tower(FiniteGroupTable h, std::uint64_t p, ElementId a_gen, unsigned n) {
  return std::make_shared<AmalgamTower>(std::move(h), p, a_gen, n);
}

inline TowerPtr t2_tower(TowerPtr base, std::string y, unsigned m, AlphaRecipe alpha) {
  return std::make_shared<InvertingExtensionTower>(std::move(base), std::move(y), m, std::move(alpha));
}

/// Q_{2^(k+1)} at level k >= 2: the 2^inf tower extended by x with x^2 = a, x inverting C.
inline TowerPtr quaternion_tower() {
  return std::make_shared<InvertingExtensionTower>(prufer_tower(2), "1/2", 1, AlphaRecipe{}, "quaternion", 2u);
}

inline TowerPtr tree_vw_tower() { return std::make_shared<TreeVWTower>(); }

inline TowerPtr quotient_tower(TowerPtr parent, std::vector<std::string> normal) {
  return std::make_shared<QuotientTower>(std::move(parent), std::move(normal));
}

// ---------------------------------------------------------------------------
// eta across levels
// ---------------------------------------------------------------------------

struct LevelEta {
  unsigned level = 0;
  std::size_t level_order = 0;
  std::size_t size = 0;
  std::optional<std::vector<std::string>> members;  // present when size <= member limit
};

struct EtaReport {
  std::string element;
  unsigned birth_level = 0;
  unsigned max_level = 0;
  unsigned window = 0;
  std::vector<LevelEta> levels;
  bool stabilized = false;
  /// First level of the final run of agreeing levels, and the run length.
  unsigned certificate_level = 0;
  unsigned agreeing_levels = 0;
  std::optional<std::vector<std::string>> stable_set;
  std::size_t coherence_checks = 0;
  /// Sizes strictly increase over the last `window` levels.
  bool growing = false;
};

struct SweepOptions {
  std::size_t member_limit = 64;
};

namespace detail {

/// Computes eta for every named target on levels [from, to], enforcing coherence
/// eta(g, level k) = embed(eta(g, level k+1)) restricted to the image of level k.
inline std::vector<EtaReport> eta_sweep(const Tower& t, const std::vector<std::string>& names,
                                        const std::vector<unsigned>& births, unsigned to, unsigned window,
                                        const SweepOptions& opts) {
  std::vector<EtaReport> reps(names.size());
  std::vector<Bitset> prev(names.size());
  std::vector<char> run_equal(names.size(), 0);
  for (std::size_t i = 0; i < names.size(); ++i) {
    reps[i].element = names[i];
    reps[i].birth_level = births[i];
    reps[i].max_level = to;
    reps[i].window = window;
  }
  unsigned from = to;
  for (auto b : births) from = std::min(from, b);

  for (unsigned k = from; k <= to; ++k) {
    auto lv = t.level(k);
    std::vector<std::size_t> active;
    std::vector<ElementId> ids;
    for (std::size_t i = 0; i < names.size(); ++i)
      if (births[i] <= k) {
        active.push_back(i);
        ids.push_back(*lv->find(names[i]));
      }
    auto sets = eta_bitsets(*lv, ids);

    const std::vector<ElementId>* emb = k > from ? &t.embed(k - 1) : nullptr;
    Bitset image;
    if (emb) {
      image.resize(lv->order());
      for (auto e : *emb) image.set(e.index);
    }
    for (std::size_t a = 0; a < active.size(); ++a) {
      const std::size_t i = active[a];
      auto& cur = sets[a];
      LevelEta le{k, lv->order(), cur.count(), std::nullopt};
      if (le.size <= opts.member_limit) {
        std::vector<std::string> mem;
        for (auto b = cur.find_first(); b != Bitset::npos; b = cur.find_next(b))
          mem.push_back(lv->name(ElementId(static_cast<std::uint32_t>(b))));
        std::sort(mem.begin(), mem.end());
        le.members = std::move(mem);
      }
      if (births[i] < k) {
        Bitset fwd(lv->order());
        const auto& p = prev[i];
        for (auto b = p.find_first(); b != Bitset::npos; b = p.find_next(b)) fwd.set((*emb)[b].index);
        ++reps[i].coherence_checks;
        if ((cur & image) != fwd)
          throw Error(Errc::coherence_violation, "eta(" + names[i] + ") at level " + std::to_string(k - 1) +
                                                     " is not the restriction of level " + std::to_string(k));
        // With coherence in hand, equal sizes mean the level-(k-1) set maps onto this one.
        run_equal[i] = cur.count() == p.count();
      }
      auto& r = reps[i];
      if (births[i] == k || !run_equal[i]) {
        r.certificate_level = k;
        r.agreeing_levels = 1;
      } else {
        ++r.agreeing_levels;
      }
      r.levels.push_back(std::move(le));
      prev[i] = std::move(cur);
    }
  }

  for (auto& r : reps) {
    r.stabilized = r.agreeing_levels >= window;
    if (r.stabilized) {
      std::vector<std::string> mem;
      auto lv = t.level(to);
      const auto& last = prev[static_cast<std::size_t>(&r - reps.data())];
      for (auto b = last.find_first(); b != Bitset::npos; b = last.find_next(b))
        mem.push_back(lv->name(ElementId(static_cast<std::uint32_t>(b))));
      std::sort(mem.begin(), mem.end());
      r.stable_set = std::move(mem);
    }
    if (r.levels.size() >= window && window >= 2) {
      r.growing = true;
      for (std::size_t j = r.levels.size() - window + 1; j < r.levels.size(); ++j)
        if (r.levels[j].size <= r.levels[j - 1].size) r.growing = false;
    }
  }
  return reps;
}

}  // namespace detail

/// Level-wise eta of one element from its birth level through max_level. Declares
/// stabilization when the last `window` (or more) levels carry the same set; never
/// claims that an element is outside K.
inline EtaReport eta_stabilized(const Tower& t, const std::string& element, unsigned max_level = 8, unsigned window = 2,
                                const SweepOptions& opts = {}) {
  if (window < 1) throw Error(Errc::precondition, "window must be >= 1");
  max_level = std::min(max_level, t.max_level());
  const auto canon = t.resolve(element, max_level);
  const unsigned birth = *t.birth_level(canon, max_level);
  return detail::eta_sweep(t, {canon}, {birth}, max_level, window, opts).front();
}

struct TheoryComparison {
  std::string description;
  std::vector<std::string> expected;  // theory's K restricted to the tested elements
  bool agrees = false;
  std::vector<std::string> missing;     // expected but not stabilized
  std::vector<std::string> unexpected;  // stabilized but not expected
};

struct KReport {
  std::string tower_kind;
  unsigned max_level = 0;
  unsigned window = 0;
  unsigned birth_cap = 0;
  std::vector<std::string> estimate;      // stabilized elements, sorted by name
  std::vector<std::string> growing;       // strictly growing over the last window levels
  std::vector<std::string> undetermined;  // neither
  bool estimate_is_subgroup = false;
  std::vector<EtaReport> elements;  // sorted by name
  std::optional<TheoryComparison> theory;

  bool consistent() const { return undetermined.empty() && (!theory || theory->agrees); }
};

/// Runs eta_stabilized for every element born by `birth_cap` and compares the
/// stabilized set with the tower's theoretical K, when it has one.
inline KReport k_estimate(const Tower& t, unsigned max_level = 8, unsigned window = 2, unsigned birth_cap = 4,
                          const SweepOptions& opts = {}) {
  max_level = std::min(max_level, t.max_level());
  // Every enumerated element needs `window` levels of history to be classified.
  const unsigned last_birth = max_level >= t.min_level() + window - 1 ? max_level - (window - 1) : t.min_level();
  birth_cap = std::clamp(birth_cap, t.min_level(), std::max(last_birth, t.min_level()));
  KReport rep;
  rep.tower_kind = t.kind();
  rep.max_level = max_level;
  rep.window = window;
  rep.birth_cap = birth_cap;

  auto cap_level = t.level(birth_cap);
  std::vector<std::string> names;
  std::vector<unsigned> births;
  {
    std::unordered_map<std::string, unsigned> birth;
    for (unsigned k = t.min_level(); k <= birth_cap; ++k)
      for (auto& nm : t.new_elements(k)) birth.emplace(std::move(nm), k);
    for (auto& [nm, b] : birth) {
      names.push_back(nm);
      births.push_back(b);
    }
  }
  // canonical output order: sort by name
  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return names[a] < names[b]; });
  std::vector<std::string> sn;
  std::vector<unsigned> sb;
  for (auto i : order) {
    sn.push_back(names[i]);
    sb.push_back(births[i]);
  }
  rep.elements = detail::eta_sweep(t, sn, sb, max_level, window, opts);

  for (const auto& r : rep.elements) {
    if (r.stabilized)
      rep.estimate.push_back(r.element);
    else if (r.growing)
      rep.growing.push_back(r.element);
    else
      rep.undetermined.push_back(r.element);
  }

  auto top = t.level(max_level);
  std::vector<ElementId> ids;
  for (const auto& nm : rep.estimate) ids.push_back(*top->find(nm));
  const Subset est(top->order(), ids);
  rep.estimate_is_subgroup = closure(*top, est) == est;

  if (auto desc = t.theory_description()) {
    TheoryComparison th;
    th.description = *desc;
    std::set<std::string> est_set(rep.estimate.begin(), rep.estimate.end());
    for (const auto& nm : sn) {
      const bool expect = t.theory_contains(birth_cap, *cap_level->find(nm)).value_or(false);
      if (expect) th.expected.push_back(nm);
      if (expect && !est_set.count(nm)) th.missing.push_back(nm);
      if (!expect && est_set.count(nm)) th.unexpected.push_back(nm);
    }
    th.agrees = th.missing.empty() && th.unexpected.empty();
    rep.theory = std::move(th);
  }
  return rep;
}

}  // namespace rootset
