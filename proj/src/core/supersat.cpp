#include "erlattice/supersat.hpp"

#include "erlattice/errors.hpp"

namespace erl {
namespace {

BigCount middle_binomial(int n) { return binomial(n, n / 2); }

bool related(Mask a, Mask b) { return proper_subset(a, b) || proper_subset(b, a); }

std::size_t degree_into(Mask f, const SetFamily& fam) {
  std::size_t d = 0;
  for (Mask g : fam) d += related(f, g) ? 1 : 0;
  return d;
}

}  // namespace

std::uint64_t comparable_pairs(const SetFamily& fam) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    for (std::size_t j = 0; j < fam.size(); ++j) {
      if (proper_subset(fam[i], fam[j])) ++total;
    }
  }
  return total;
}

std::uint64_t comparable_pairs_by_degrees(const SetFamily& fam) {
  std::uint64_t total = 0;
  for (Mask f : fam) total += degrees(f, fam).up;
  return total;
}

BigCount kleitman_required(int n, std::size_t size) {
  if (n < 0) throw UsageError("ground size must be non-negative");
  const BigCount mid = middle_binomial(n);
  const BigCount s = size;
  if (s <= mid) return 0;
  return BigCount((n + 2) / 2) * (s - mid);
}

Rational weight_of_size(int n, int size, int k) {
  if (k < 2) throw UsageError("weight needs k >= 2, got " + std::to_string(k));
  if (size < 0 || size > n) throw UsageError("set size outside [0, n]");
  const Rational own(BigCount(1), binomial(n, size));
  const int cap_level = (n - k) >= 0 ? (n - k) / 2 : -((k - n + 1) / 2);
  const BigCount cap = binomial(n, cap_level);
  if (cap == 0) return own;
  const Rational capped(BigCount(1), cap);
  return own < capped ? own : capped;
}

Rational weight(const Subset& f, int k) { return weight_of_size(f.ground(), f.size(), k); }

bool weight_within_bounds(int n, int size, int k) {
  const Rational w = weight_of_size(n, size, k);
  const Rational base(BigCount(1), middle_binomial(n));
  const Rational upper = (Rational(1) + Rational(2 * k * k, n)) * base;
  return base <= w && w <= upper;
}

Rational family_weight(const SetFamily& fam, int k) { return family_weight_report(fam, k).total; }

WeightReport family_weight_report(const SetFamily& fam, int k) {
  if (k < 2) throw UsageError("family weight needs k >= 2");
  WeightReport rep;
  const int n = fam.ground();
  rep.bounds_checked = n >= 4 * k * k;
  std::vector<Rational> by_size(static_cast<std::size_t>(n) + 1);
  for (int s = 0; s <= n; ++s) by_size[static_cast<std::size_t>(s)] = weight_of_size(n, s, k);
  for (Mask f : fam) {
    rep.total += by_size[static_cast<std::size_t>(set_size(f))];
    if (rep.bounds_checked && rep.bounds_hold && !weight_within_bounds(n, set_size(f), k)) {
      rep.bounds_hold = false;
      rep.witness = f;
    }
  }
  return rep;
}

Rational lym_sum(const SetFamily& fam) {
  const int n = fam.ground();
  const Mask top = static_cast<Mask>((std::uint64_t{1} << n) - 1);
  if (fam.contains(top)) throw PreconditionError("lym_sum: the family contains the full ground set");
  Rational total = 0;
  for (Mask f : fam) {
    const int s = set_size(f);
    const std::size_t up = degrees(f, fam).up;
    total += Rational(BigCount(1), binomial(n, s)) * (Rational(1) - Rational(static_cast<long long>(up), n - s));
  }
  return total;
}

SupersatReport supersat_check(const SetFamily& fam, int k, const Rational& delta, const Rational& constant) {
  if (delta <= 0 || delta >= Rational(1, 2)) throw UsageError("delta must lie strictly between 0 and 1/2");
  if (constant <= 0) throw UsageError("the constant C must be positive");
  const int n = fam.ground();
  SupersatReport rep;
  rep.delta = delta;
  rep.constant = constant;
  rep.weight = family_weight(fam, k);
  rep.r = (rep.weight - 1) * Rational(middle_binomial(n));
  rep.observed = comparable_pairs(fam);
  rep.required = (Rational(1, 2) - delta) * rep.r * n;
  rep.holds = Rational(BigCount(rep.observed)) >= rep.required;
  rep.hypothesis_plausible = Rational(n) >= constant * k * k / (delta * delta * delta);
  return rep;
}

TransferenceReport transference_check(const SetFamily& f0,
                                      const std::vector<std::pair<Rational, SetFamily>>& others, int k,
                                      std::uint64_t t) {
  if (k < 2) throw UsageError("transference needs k >= 2");
  const int n = f0.ground();
  TransferenceReport rep;
  rep.large_n = n >= 4 * k * k;
  rep.size_lhs = Rational(static_cast<long long>(f0.size()));
  Rational weighted_others = 0;
  for (const auto& [alpha, fam] : others) {
    if (alpha <= 0) throw UsageError("transference coefficients must be positive");
    if (fam.ground() != n) throw UsageError("transference families over different ground sizes");
    rep.size_lhs += alpha * static_cast<long long>(fam.size());
    weighted_others += alpha * family_weight(fam, k);
  }
  rep.size_rhs = (k <= n + 1 ? m_levels(n, k) : power(std::uint64_t{2}, static_cast<std::uint64_t>(n))) + t;
  rep.weight_lhs = family_weight(f0, k) + (Rational(1) + Rational(2 * k * k, n)) * weighted_others;
  rep.weight_rhs = Rational(k - 1) + Rational(BigCount(t), middle_binomial(n));
  rep.hypothesis_fired = rep.size_lhs >= Rational(rep.size_rhs);
  rep.conclusion_holds = !rep.hypothesis_fired || rep.weight_lhs >= rep.weight_rhs;
  return rep;
}

McClassification mc_classification(const SetFamily& a, const SetFamily& b, const SetFamily& x,
                                   const Coloring& c) {
  const int n = a.ground();
  if (b.ground() != n || x.ground() != n) throw UsageError("classification families over different ground sizes");
  for (Mask m : a) {
    if (b.contains(m)) throw UsageError("A and B must be disjoint");
  }
  for (Mask m : x) {
    if (!b.contains(m)) throw UsageError("X must be a subfamily of B");
  }
  if (c.colors.size() != a.size() && c.colors.size() != a.size() + b.size()) {
    throw UsageError("colouring must cover A (optionally followed by B)");
  }
  McClassification out{SetFamily(n), SetFamily(n), SetFamily(n), SetFamily(n)};
  for (Mask bm : b) {
    int seen = -1;
    bool mono = true;
    bool any = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!related(bm, a[i])) continue;
      any = true;
      if (seen < 0) {
        seen = c.colors[i];
      } else if (seen != c.colors[i]) {
        mono = false;
        break;
      }
    }
    if (any && mono) out.b_mc.add(bm);
  }
  SetFamily x_mc(n);
  for (Mask m : x) {
    if (out.b_mc.contains(m)) x_mc.add(m);
  }
  for (Mask am : a) {
    const std::size_t to_x = degree_into(am, x);
    const std::size_t to_mc = degree_into(am, out.b_mc);
    const bool large = to_mc * to_mc >= static_cast<std::size_t>(n);
    if (to_x == 0) out.a3.add(am);
    if (large && degree_into(am, x_mc) == 0) out.a2.add(am);
    if (!large) out.a1.add(am);
  }
  return out;
}

}  // namespace erl
