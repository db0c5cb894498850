#include "facthist/distributions.hpp"

#include <random>
#include <set>

namespace facthist {
namespace {

constexpr int kGridMax = 101;

struct BlockMasses {
  // Keyed by z value.
  std::map<std::uint32_t, Rational> z;
  // Keyed by (z, value).
  std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> x;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> y;
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, Rational> xy;
};

BlockMasses accumulate(const std::vector<Rational>& probs, const RandomVariable& x, const RandomVariable& y,
                       const RandomVariable& z) {
  BlockMasses m;
  for (std::size_t r = 0; r < probs.size(); ++r) {
    m.z[z(r)] += probs[r];
    m.x[{z(r), x(r)}] += probs[r];
    m.y[{z(r), y(r)}] += probs[r];
    m.xy[{z(r), x(r), y(r)}] += probs[r];
  }
  for (const auto& [zv, mass] : m.z) {
    if (sgn(mass) == 0) throw Error(ErrorKind::degenerate_block, "block z=" + std::to_string(zv) + " has zero mass");
  }
  return m;
}

void check_same_space(const FactoredSpace& space, std::initializer_list<const RandomVariable*> vars) {
  for (const auto* v : vars) v->check_on(space);
}

}  // namespace

std::string to_fraction_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  auto is_int = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t k = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (k == s.size()) return false;
    for (; k < s.size(); ++k) {
      if (s[k] < '0' || s[k] > '9') return false;
    }
    return true;
  };
  const std::string num = text.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!is_int(num) || !is_int(den)) throw Error(ErrorKind::parse_error, "not a rational: '" + text + "'");
  mpz_class n(num[0] == '+' ? num.substr(1) : num), d(den[0] == '+' ? den.substr(1) : den);
  if (d == 0) throw Error(ErrorKind::parse_error, "zero denominator in '" + text + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

bool ProductDistribution::is_positive() const {
  for (const auto& v : per_factor) {
    for (const auto& q : v) {
      if (sgn(q) <= 0) return false;
    }
  }
  return true;
}

void ProductDistribution::validate(const FactoredSpace& space, bool require_positive) const {
  if (per_factor.size() != space.factor_count()) {
    throw Error(ErrorKind::bad_distribution, "distribution has " + std::to_string(per_factor.size()) +
                                                 " factor vectors, space has " + std::to_string(space.factor_count()));
  }
  for (std::size_t i = 0; i < per_factor.size(); ++i) {
    const auto& v = per_factor[i];
    if (v.size() != space.cardinality(i)) {
      throw Error(ErrorKind::bad_distribution, "vector for factor " + std::to_string(i) + " has wrong length");
    }
    Rational sum = 0;
    for (const auto& q : v) {
      if (sgn(q) < 0 || (require_positive && sgn(q) == 0)) {
        throw Error(ErrorKind::bad_distribution, "vector for factor " + std::to_string(i) + " has a non-positive entry");
      }
      sum += q;
    }
    if (sum != 1) throw Error(ErrorKind::bad_distribution, "vector for factor " + std::to_string(i) + " does not sum to 1");
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(master));
  words.push_back(static_cast<std::uint32_t>(master >> 32));
  for (auto p : path) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t{out[1]} << 32) | out[0];
}

ProductDistribution uniform_product(const FactoredSpace& space) {
  ProductDistribution p;
  for (const auto& f : space.factors()) {
    const Rational each(1, static_cast<unsigned long>(f.cardinality()));
    p.per_factor.emplace_back(f.cardinality(), each);
  }
  return p;
}

std::vector<Rational> sample_probability_vector(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> draw(1, kGridMax);
  std::vector<long> nums(d);
  long total = 0;
  for (auto& n : nums) {
    n = draw(rng);
    total += n;
  }
  std::vector<Rational> v;
  v.reserve(d);
  for (auto n : nums) {
    Rational q(n, total);
    q.canonicalize();
    v.push_back(q);
  }
  return v;
}

ProductDistribution sample_product(const FactoredSpace& space, std::uint64_t seed) {
  ProductDistribution p;
  for (std::size_t i = 0; i < space.factor_count(); ++i) {
    p.per_factor.push_back(sample_probability_vector(space.cardinality(i), derive_seed(seed, {i})));
  }
  return p;
}

Rational outcome_prob(const FactoredSpace& space, const ProductDistribution& p, const Outcome& o) {
  outcome_rank(space, o);  // validates
  Rational q = 1;
  for (std::size_t i = 0; i < o.values.size(); ++i) q *= p.per_factor.at(i).at(o.values[i]);
  return q;
}

std::vector<Rational> outcome_probabilities(const FactoredSpace& space, const ProductDistribution& p) {
  p.validate(space);
  // Built factor by factor; the last factor varies fastest.
  std::vector<Rational> probs{Rational(1)};
  for (std::size_t i = 0; i < space.factor_count(); ++i) {
    const auto& v = p.per_factor[i];
    std::vector<Rational> next;
    next.reserve(probs.size() * v.size());
    for (const auto& q : probs) {
      for (const auto& w : v) next.push_back(q * w);
    }
    probs = std::move(next);
  }
  return probs;
}

CondTable cond_table(const FactoredSpace& space, const ProductDistribution& p, const RandomVariable& x,
                     const RandomVariable& z) {
  check_same_space(space, {&x, &z});
  const auto probs = outcome_probabilities(space, p);
  std::map<std::uint32_t, Rational> zmass;
  std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> joint;
  for (std::size_t r = 0; r < probs.size(); ++r) {
    zmass[z(r)] += probs[r];
    joint[{z(r), x(r)}] += probs[r];
  }
  CondTable table;
  for (const auto& [zv, mass] : zmass) {
    if (sgn(mass) == 0) throw Error(ErrorKind::degenerate_block, "block z=" + std::to_string(zv) + " has zero mass");
    for (std::uint32_t xv = 0; xv < x.codomain_size(); ++xv) {
      const auto it = joint.find({zv, xv});
      table[{zv, xv}] = it == joint.end() ? Rational(0) : Rational(it->second / mass);
    }
  }
  return table;
}

CiReport is_cond_independent(const FactoredSpace& space, const ProductDistribution& p, const RandomVariable& x,
                             const RandomVariable& y, const RandomVariable& z) {
  check_same_space(space, {&x, &y, &z});
  const auto m = accumulate(outcome_probabilities(space, p), x, y, z);
  CiReport report;
  for (const auto& [zv, mass] : m.z) {
    // Values with zero mass in the block satisfy the identity trivially.
    for (auto xi = m.x.lower_bound({zv, 0}); xi != m.x.end() && xi->first.first == zv; ++xi) {
      for (auto yi = m.y.lower_bound({zv, 0}); yi != m.y.end() && yi->first.first == zv; ++yi) {
        const auto ji = m.xy.find({zv, xi->first.second, yi->first.second});
        const Rational joint = ji == m.xy.end() ? Rational(0) : ji->second;
        // P(x,y,z) P(z) == P(x,z) P(y,z)
        if (joint * mass != xi->second * yi->second) {
          report.holds = false;
          report.first_violation =
              CiViolation{zv, xi->first.second, yi->first.second, Rational(joint / mass),
                          Rational((xi->second / mass) * (yi->second / mass))};
          return report;
        }
      }
    }
  }
  return report;
}

CiReport is_jointly_cond_independent(const FactoredSpace& space, const ProductDistribution& p,
                                     std::span<const RandomVariable> xs, const RandomVariable& z) {
  z.check_on(space);
  for (const auto& x : xs) x.check_on(space);
  const auto probs = outcome_probabilities(space, p);
  const std::size_t n = xs.size();
  std::map<std::uint32_t, Rational> zmass;
  std::vector<std::map<std::pair<std::uint32_t, std::uint32_t>, Rational>> marg(n);
  std::map<std::pair<std::uint32_t, std::vector<std::uint32_t>>, Rational> joint;
  for (std::size_t r = 0; r < probs.size(); ++r) {
    zmass[z(r)] += probs[r];
    std::vector<std::uint32_t> key(n);
    for (std::size_t k = 0; k < n; ++k) {
      key[k] = xs[k](r);
      marg[k][{z(r), key[k]}] += probs[r];
    }
    joint[{z(r), std::move(key)}] += probs[r];
  }
  CiReport report;
  for (const auto& [zv, mass] : zmass) {
    if (sgn(mass) == 0) throw Error(ErrorKind::degenerate_block, "block z=" + std::to_string(zv) + " has zero mass");
    // Positive-mass values of each variable within the block.
    std::vector<std::vector<std::pair<std::uint32_t, Rational>>> support(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (auto it = marg[k].lower_bound({zv, 0}); it != marg[k].end() && it->first.first == zv; ++it) {
        support[k].emplace_back(it->first.second, it->second / mass);
      }
    }
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      std::vector<std::uint32_t> key(n);
      Rational product = 1;
      for (std::size_t k = 0; k < n; ++k) {
        key[k] = support[k][idx[k]].first;
        product *= support[k][idx[k]].second;
      }
      const auto ji = joint.find({zv, key});
      const Rational cond = ji == joint.end() ? Rational(0) : Rational(ji->second / mass);
      if (cond != product) {
        report.holds = false;
        report.first_violation = CiViolation{zv, n > 0 ? key[0] : 0u, n > 1 ? key[1] : 0u, cond, product};
        return report;
      }
      std::size_t k = 0;
      while (k < n && ++idx[k] == support[k].size()) idx[k++] = 0;
      if (k == n) break;
    }
  }
  return report;
}

SoundnessReport verify_soundness(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y,
                                 const RandomVariable& z, std::size_t samples, std::uint64_t seed) {
  if (!structurally_independent(space, x, y, z).independent) {
    throw Error(ErrorKind::precondition_not_structural, x.name() + " and " + y.name() + " are not structurally independent");
  }
  SoundnessReport report;
  report.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto p = sample_product(space, derive_seed(seed, {k}));
    const auto ci = is_cond_independent(space, p, x, y, z);
    if (ci.holds) {
      ++report.holds;
    } else {
      report.violations.emplace_back(k, *ci.first_violation);
    }
  }
  return report;
}

std::optional<Witness> find_witness(const FactoredSpace& space, const RandomVariable& x, const RandomVariable& y,
                                    const RandomVariable& z, std::size_t max_tries, std::uint64_t seed) {
  if (structurally_independent(space, x, y, z).independent) {
    throw Error(ErrorKind::precondition_is_structural, x.name() + " and " + y.name() + " are structurally independent");
  }
  for (std::size_t k = 0; k < max_tries; ++k) {
    auto p = sample_product(space, derive_seed(seed, {k}));
    auto ci = is_cond_independent(space, p, x, y, z);
    if (!ci.holds) return Witness{std::move(p), k + 1, std::move(*ci.first_violation)};
  }
  return std::nullopt;
}

PerturbationPair perturb_factor(const FactoredSpace& space, const ProductDistribution& p, std::size_t i,
                                std::vector<Rational> v) {
  p.validate(space);
  if (i >= space.factor_count()) throw Error(ErrorKind::bad_perturbation, "unknown factor " + std::to_string(i));
  if (v.size() != space.cardinality(i)) throw Error(ErrorKind::bad_perturbation, "vector length does not match domain");
  Rational sum = 0;
  for (auto& q : v) {
    q.canonicalize();
    if (sgn(q) <= 0) throw Error(ErrorKind::bad_perturbation, "perturbation entries must be positive");
    sum += q;
  }
  if (sum != 1) throw Error(ErrorKind::bad_perturbation, "perturbation vector does not sum to 1");
  if (!p.is_positive()) throw Error(ErrorKind::bad_perturbation, "base distribution must be positive");
  PerturbationPair pair{p, p, i};
  pair.perturbed.per_factor[i] = std::move(v);
  return pair;
}

InvarianceReport irrelevance_invariance(const FactoredSpace& space, const PerturbationPair& pair,
                                        const RandomVariable& x, const RandomVariable& z) {
  const auto hist = conditional_history(space, x, z);
  const auto before = cond_table(space, pair.base, x, z);
  const auto after = cond_table(space, pair.perturbed, x, z);
  InvarianceReport report;
  for (const auto& [zv, h] : hist.per_block) {
    if (h.contains(pair.factor)) {
      report.skipped.push_back(zv);
      continue;
    }
    report.checked.push_back(zv);
    for (std::uint32_t xv = 0; xv < x.codomain_size(); ++xv) {
      if (before.at({zv, xv}) != after.at({zv, xv})) {
        report.violations.push_back(zv);
        break;
      }
    }
  }
  return report;
}

ProductDifferenceReport product_difference_identity(const FactoredSpace& space, const PerturbationPair& pair,
                                                    const RandomVariable& x, const RandomVariable& y,
                                                    const RandomVariable& z) {
  if (!structurally_independent(space, x, y, z).independent) {
    throw Error(ErrorKind::precondition_not_structural, x.name() + " and " + y.name() + " are not structurally independent");
  }
  const auto px = cond_table(space, pair.base, x, z);
  const auto qx = cond_table(space, pair.perturbed, x, z);
  const auto py = cond_table(space, pair.base, y, z);
  const auto qy = cond_table(space, pair.perturbed, y, z);
  std::set<std::uint32_t> zs;
  for (const auto& [key, _] : px) zs.insert(key.first);
  ProductDifferenceReport report;
  for (auto zv : zs) {
    for (std::uint32_t a = 0; a < x.codomain_size(); ++a) {
      const Rational dx = px.at({zv, a}) - qx.at({zv, a});
      for (std::uint32_t b = 0; b < y.codomain_size(); ++b) {
        ++report.cells;
        const Rational dy = py.at({zv, b}) - qy.at({zv, b});
        if (sgn(dx * dy) != 0) {
          if (report.nonzero++ == 0) report.first_nonzero = std::make_tuple(zv, a, b);
        }
      }
    }
  }
  return report;
}

}  // namespace facthist
