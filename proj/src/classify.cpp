#include "sicgram/classify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "sicgram/weyl_heisenberg.hpp"

namespace sicgram {

namespace {

std::size_t choose3(std::size_t m) { return m < 3 ? 0 : m * (m - 1) * (m - 2) / 6; }

}  // namespace

BargmannTensor::BargmannTensor(int n, std::vector<double> upper)
    : n_(n), N_(gram_size(n)), upper_(std::move(upper)) {}

std::size_t BargmannTensor::upper_index(std::size_t i, std::size_t j, std::size_t k) const {
  // Triples starting below i, then pairs (j, k) inside the block after i.
  const std::size_t before = choose3(N_) - choose3(N_ - i);
  return before + flat_index(j - i - 1, k - i - 1, N_ - i - 1);
}

BargmannTensor BargmannTensor::of(const GramCandidate& gram, double sic_tol) {
  if (!is_sic_gram(gram, sic_tol)) throw std::invalid_argument("Bargmann invariants require a SIC Gram matrix");
  const auto N = static_cast<Eigen::Index>(gram.size());
  std::vector<double> upper;
  upper.reserve(choose3(static_cast<std::size_t>(N)));
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const Complex pij = gram(i, j);
      for (Eigen::Index k = j + 1; k < N; ++k) {
        upper.push_back(reduce_phase(std::arg(pij * gram(j, k) * gram(k, i))));
      }
    }
  }
  return BargmannTensor(gram.n(), std::move(upper));
}

double BargmannTensor::at(std::size_t i, std::size_t j, std::size_t k) const {
  if (i == j || j == k || i == k) return 0.0;
  bool odd = false;
  if (i > j) std::swap(i, j), odd = !odd;
  if (j > k) std::swap(j, k), odd = !odd;
  if (i > j) std::swap(i, j), odd = !odd;
  const double t = upper_[upper_index(i, j, k)];
  return odd ? reduce_phase(-t) : t;
}

BargmannTensor bargmann(const GramCandidate& gram) { return BargmannTensor::of(gram); }

int GeneratingSet::label_of(double phase, double tol) const {
  if (phases.empty()) return -1;
  phase = reduce_phase(phase);
  auto it = std::lower_bound(phases.begin(), phases.end(), phase);
  int best = -1;
  double best_d = tol;
  auto consider = [&](std::size_t idx) {
    const double d = std::abs(circular_difference(phase, phases[idx]));
    if (d <= best_d) {
      best_d = d;
      best = static_cast<int>(idx);
    }
  };
  const std::size_t pos = static_cast<std::size_t>(it - phases.begin());
  if (pos < phases.size()) consider(pos);
  if (pos > 0) consider(pos - 1);
  consider(0);
  consider(phases.size() - 1);
  return best;
}

GeneratingSet generating_set(const BargmannTensor& tensor, double cluster_tol) {
  const std::size_t N = tensor.size();
  std::vector<std::pair<double, std::uint64_t>> values;
  values.reserve(2 * tensor.upper().size() + 1);
  // Each unordered triple appears as 3 cyclic orderings of t and 3 of -t.
  for (double t : tensor.upper()) {
    values.emplace_back(t, 3);
    values.emplace_back(reduce_phase(-t), 3);
  }
  values.emplace_back(0.0, N * N * N - N * (N - 1) * (N - 2));
  std::sort(values.begin(), values.end());

  struct Cluster {
    double first, last;
    double weighted_sum;  // of unwrapped values
    std::uint64_t weight;
  };
  std::vector<Cluster> clusters;
  for (const auto& [v, w] : values) {
    if (!clusters.empty() && v - clusters.back().last <= cluster_tol) {
      Cluster& c = clusters.back();
      c.last = v;
      c.weighted_sum += v * static_cast<double>(w);
      c.weight += w;
    } else {
      clusters.push_back({v, v, v * static_cast<double>(w), w});
    }
  }
  if (clusters.size() > 1 && clusters.front().first + kTwoPi - clusters.back().last <= cluster_tol) {
    Cluster& tail = clusters.back();
    Cluster& head = clusters.front();
    head.weighted_sum += tail.weighted_sum - kTwoPi * static_cast<double>(tail.weight);
    head.weight += tail.weight;
    head.first = tail.first - kTwoPi;
    clusters.pop_back();
  }

  GeneratingSet set;
  set.cluster_radius = cluster_tol;
  std::vector<std::pair<double, std::uint64_t>> reps;
  for (const Cluster& c : clusters) {
    double rep = reduce_phase(c.weighted_sum / static_cast<double>(c.weight));
    if (kTwoPi - rep <= cluster_tol) rep = 0.0;
    reps.emplace_back(rep, c.weight);
  }
  std::sort(reps.begin(), reps.end());
  for (const auto& [p, w] : reps) {
    set.phases.push_back(p);
    set.multiplicities.push_back(w);
  }
  for (std::size_t i = 0; i < clusters.size() && clusters.size() > 1; ++i) {
    const Cluster& a = clusters[i];
    const Cluster& b = clusters[(i + 1) % clusters.size()];
    double gap = b.first - a.last;
    if (i + 1 == clusters.size()) gap += kTwoPi;
    if (gap <= 2.0 * cluster_tol) set.ambiguous = true;
  }
  return set;
}

GeneratingSet generating_set(const GramCandidate& gram, double cluster_tol) {
  return generating_set(BargmannTensor::of(gram), cluster_tol);
}

bool same_generating_set(const GeneratingSet& a, const GeneratingSet& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(circular_difference(a.phases[i], b.phases[i])) > tol) return false;
  }
  return true;
}

std::string island_hash(const GeneratingSet& set) {
  std::uint64_t h = 14695981039346656037ULL;
  for (double p : set.phases) {
    const auto q = static_cast<std::int64_t>(std::llround(p * 1e5));
    auto bits = static_cast<std::uint64_t>(q);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xfU];
  return out;
}

PhaseVector canonicalize(const PhaseVector& phases, std::size_t anchor) {
  const std::size_t N = gram_size(phases.n());
  if (anchor < 1 || anchor > N) throw std::invalid_argument("anchor index out of range");
  const std::size_t a = anchor - 1;
  std::vector<double> theta(N, 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    if (j > a) theta[j] = phases[flat_index(a, j, N)];
    if (j < a) theta[j] = -phases[flat_index(j, a, N)];
  }
  std::vector<double> out(phases.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t l = j + 1; l < N; ++l, ++k) {
      out[k] = (j == a || l == a) ? 0.0 : reduce_phase(phases[k] + theta[j] - theta[l]);
    }
  }
  return PhaseVector(phases.n(), std::move(out));
}

std::vector<std::uint64_t> canonical_frequencies(const PhaseVector& phases, const GeneratingSet& set) {
  const PhaseVector c = canonicalize(phases, 1);
  std::vector<std::uint64_t> counts(set.size(), 0);
  const double tol = 10.0 * set.cluster_radius;
  for (double v : c.values()) {
    for (double w : {v, -v}) {
      const int label = set.label_of(w, tol);
      if (label >= 0) ++counts[static_cast<std::size_t>(label)];
    }
  }
  return counts;
}

bool same_island(const BargmannTensor& p, const BargmannTensor& q, double tol) {
  if (p.n() != q.n()) return false;
  const auto& a = p.upper();
  const auto& b = q.upper();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(circular_difference(a[i], b[i])) > tol) return false;
  }
  return true;
}

bool same_island(const GramCandidate& p, const GramCandidate& q, double tol) {
  return same_island(BargmannTensor::of(p), BargmannTensor::of(q), tol);
}

const char* to_string(MatchStatus status) {
  switch (status) {
    case MatchStatus::found: return "found";
    case MatchStatus::none: return "none";
    case MatchStatus::indeterminate: return "indeterminate";
  }
  return "unknown";
}

namespace {

// Colour matrix of the canonical form anchored at `anchor`: entry (j, k) is
// the generating-set label of t_{anchor, j, k}.
struct ColorMatrix {
  std::size_t N = 0;
  std::vector<int> c;
  std::vector<int> row_signature;  // id of the sorted row colour multiset
  int at(std::size_t j, std::size_t k) const { return c[j * N + k]; }
};

class SignatureTable {
 public:
  int id(std::vector<int> row) {
    std::sort(row.begin(), row.end());
    auto [it, inserted] = ids_.try_emplace(std::move(row), static_cast<int>(ids_.size()));
    return it->second;
  }

 private:
  std::map<std::vector<int>, int> ids_;
};

ColorMatrix color_matrix(const BargmannTensor& t, std::size_t anchor, const GeneratingSet& set, double tol,
                         SignatureTable& signatures) {
  ColorMatrix m;
  m.N = t.size();
  m.c.assign(m.N * m.N, -2);
  for (std::size_t j = 0; j < m.N; ++j) {
    for (std::size_t k = 0; k < m.N; ++k) {
      if (j != k) m.c[j * m.N + k] = set.label_of(t.at(anchor, j, k), tol);
    }
  }
  m.row_signature.resize(m.N);
  for (std::size_t j = 0; j < m.N; ++j) {
    m.row_signature[j] = signatures.id(std::vector<int>(m.c.begin() + j * m.N, m.c.begin() + (j + 1) * m.N));
  }
  return m;
}

// Backtracking for sigma with sigma(q_anchor) = p_anchor and
// A[sigma j, sigma k] = B[j, k] for all j, k.
class Matcher {
 public:
  Matcher(const ColorMatrix& a, std::size_t p_anchor, const ColorMatrix& b, std::size_t q_anchor,
          std::uint64_t& nodes, std::uint64_t cap)
      : a_(a), b_(b), pa_(p_anchor), qa_(q_anchor), nodes_(nodes), cap_(cap), N_(a.N) {
    // Rarest anchor-row colour first, lowest frequency wins.
    std::map<int, int> freq;
    for (std::size_t j = 0; j < N_; ++j) {
      if (j != qa_) ++freq[b_.at(qa_, j)];
    }
    for (std::size_t j = 0; j < N_; ++j) {
      if (j != qa_) order_.push_back(j);
    }
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t x, std::size_t y) { return freq[b_.at(qa_, x)] < freq[b_.at(qa_, y)]; });
    sigma_.assign(N_, kUnset);
    used_.assign(N_, false);
  }

  /// Calls visit for each complete sigma; stops when visit returns false.
  /// Returns false if the node cap was hit.
  bool run(const std::function<bool(const std::vector<std::uint32_t>&)>& visit) {
    if (a_.row_signature[pa_] != b_.row_signature[qa_]) return true;
    sigma_[qa_] = static_cast<std::uint32_t>(pa_);
    used_[pa_] = true;
    visit_ = &visit;
    stop_ = false;
    capped_ = false;
    extend(0);
    sigma_[qa_] = kUnset;
    used_[pa_] = false;
    return !capped_;
  }

 private:
  static constexpr std::uint32_t kUnset = 0xffffffffU;

  void extend(std::size_t depth) {
    if (stop_) return;
    if (depth == order_.size()) {
      if (!(*visit_)(sigma_)) stop_ = true;
      return;
    }
    const std::size_t j = order_[depth];
    for (std::size_t x = 0; x < N_ && !stop_; ++x) {
      if (used_[x]) continue;
      if (++nodes_ > cap_) {
        capped_ = stop_ = true;
        return;
      }
      if (a_.at(pa_, x) != b_.at(qa_, j) || a_.row_signature[x] != b_.row_signature[j]) continue;
      bool ok = true;
      for (std::size_t d = 0; d < depth && ok; ++d) {
        const std::size_t jp = order_[d];
        const std::size_t xp = sigma_[jp];
        ok = a_.at(x, xp) == b_.at(j, jp) && a_.at(xp, x) == b_.at(jp, j);
      }
      if (!ok) continue;
      sigma_[j] = static_cast<std::uint32_t>(x);
      used_[x] = true;
      extend(depth + 1);
      used_[x] = false;
      sigma_[j] = kUnset;
    }
  }

  const ColorMatrix& a_;
  const ColorMatrix& b_;
  std::size_t pa_, qa_;
  std::uint64_t& nodes_;
  std::uint64_t cap_;
  std::size_t N_;
  std::vector<std::size_t> order_;
  std::vector<std::uint32_t> sigma_;
  std::vector<bool> used_;
  const std::function<bool(const std::vector<std::uint32_t>&)>* visit_ = nullptr;
  bool stop_ = false;
  bool capped_ = false;
};

}  // namespace

PermutationMatch find_permutation(const GramCandidate& p, const GramCandidate& q, const MatchOptions& options) {
  PermutationMatch out;
  if (p.n() != q.n()) return out;
  const BargmannTensor tp = BargmannTensor::of(p);
  const BargmannTensor tq = BargmannTensor::of(q);
  const GeneratingSet gp = generating_set(tp, options.tol);
  const GeneratingSet gq = generating_set(tq, options.tol);
  if (!same_generating_set(gp, gq)) return out;

  const double label_tol = 10.0 * options.tol;
  SignatureTable signatures;
  const ColorMatrix b = color_matrix(tq, 0, gq, label_tol, signatures);
  bool capped = false;
  for (std::size_t s = 0; s < tp.size(); ++s) {
    const ColorMatrix a = color_matrix(tp, s, gq, label_tol, signatures);
    Matcher matcher(a, s, b, 0, out.nodes, options.node_cap);
    std::optional<std::vector<std::uint32_t>> found;
    const bool complete = matcher.run([&](const std::vector<std::uint32_t>& sigma) {
      found = sigma;
      return false;
    });
    if (found) {
      PermutationMap sigma(*found);
      // Colour equality implies equal tensors up to the label tolerance;
      // confirm against the raw phases.
      if (same_island(BargmannTensor::of(permute_gram(p, sigma)), tq, label_tol)) {
        out.status = MatchStatus::found;
        out.sigma = std::move(sigma);
        return out;
      }
    }
    if (!complete) {
      capped = true;
      break;
    }
  }
  out.status = capped ? MatchStatus::indeterminate : MatchStatus::none;
  return out;
}

AutomorphismSearch automorphisms_fixing(const GramCandidate& gram, std::size_t anchor, const MatchOptions& options) {
  if (anchor < 1 || anchor > gram.size()) throw std::invalid_argument("anchor index out of range");
  const BargmannTensor t = BargmannTensor::of(gram);
  const GeneratingSet set = generating_set(t, options.tol);
  SignatureTable signatures;
  const ColorMatrix m = color_matrix(t, anchor - 1, set, 10.0 * options.tol, signatures);
  AutomorphismSearch out;
  Matcher matcher(m, anchor - 1, m, anchor - 1, out.nodes, options.node_cap);
  const bool complete = matcher.run([&](const std::vector<std::uint32_t>& sigma) {
    out.automorphisms.emplace_back(sigma);
    return true;
  });
  out.status = complete ? MatchStatus::found : MatchStatus::indeterminate;
  std::sort(out.automorphisms.begin(), out.automorphisms.end());
  return out;
}

namespace {

struct PermutationHash {
  std::size_t operator()(const PermutationMap& p) const {
    std::uint64_t h = 14695981039346656037ULL;
    for (std::uint32_t v : p.images()) {
      h ^= v;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct SubgroupCheck {
  bool closed = true;
  bool abelian = true;
};

SubgroupCheck check_subgroup(const std::vector<PermutationMap>& elements) {
  SubgroupCheck r;
  const std::set<PermutationMap> members(elements.begin(), elements.end());
  for (const auto& x : elements) {
    for (const auto& y : elements) {
      const PermutationMap xy = x * y;
      if (!members.count(xy)) r.closed = false;
      if (r.abelian && !(xy == y * x)) r.abelian = false;
      if (!r.closed) return r;
    }
  }
  return r;
}

}  // namespace

GroupReport group_closure(const std::vector<PermutationMap>& generators, int n, std::size_t max_order) {
  GroupReport report;
  const std::size_t N = gram_size(n);
  for (const auto& g : generators) {
    if (g.size() != N) throw std::invalid_argument("generators must act on n^2 labels");
  }
  std::unordered_map<PermutationMap, std::size_t, PermutationHash> seen;
  std::vector<PermutationMap> elements{PermutationMap::identity(N)};
  seen.emplace(elements.front(), 0);
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (const auto& g : generators) {
      PermutationMap next = elements[head] * g;
      if (seen.count(next)) continue;
      if (elements.size() >= max_order) {
        throw std::runtime_error("group closure exceeds " + std::to_string(max_order) + " elements");
      }
      seen.emplace(next, elements.size());
      elements.push_back(std::move(next));
    }
  }
  report.order = elements.size();
  std::vector<PermutationMap> h_n, h_2n;
  for (const auto& e : elements) {
    const std::uint64_t ord = e.order();
    ++report.element_orders[ord];
    if (static_cast<std::uint64_t>(n) % ord == 0) h_n.push_back(e);
    if (static_cast<std::uint64_t>(2 * n) % ord == 0) h_2n.push_back(e);
  }
  report.h_n_count = h_n.size();
  report.h_2n_count = h_2n.size();
  for (auto [candidate, exponent] : {std::pair{&h_n, n}, std::pair{&h_2n, 2 * n}}) {
    if (candidate->size() != N) continue;
    const SubgroupCheck check = check_subgroup(*candidate);
    if (!check.closed) continue;
    report.h_order = candidate->size();
    report.h_exponent = exponent;
    report.h_closed = true;
    report.h_abelian = check.abelian;
    break;
  }
  report.elements = std::move(elements);
  return report;
}

const std::vector<ReferenceGram>& reference_grams(int n) {
  static std::mutex mutex;
  static std::map<int, std::vector<ReferenceGram>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  const WhGram wh = wh_gram(reference_fiducial(n));
  std::vector<double> conj(wh.phases.size());
  for (std::size_t k = 0; k < conj.size(); ++k) conj[k] = reduce_phase(-wh.phases[k]);
  std::vector<ReferenceGram> refs;
  refs.push_back({"wh", wh.phases});
  refs.push_back({"wh-conjugate", PhaseVector(n, std::move(conj))});
  return cache.emplace(n, std::move(refs)).first->second;
}

AutomorphismSummary automorphism_summary(const GramCandidate& gram, const MatchOptions& options) {
  AutomorphismSummary summary;
  std::set<PermutationMap> generators;
  for (std::size_t a = 1; a <= gram.size(); ++a) {
    const AutomorphismSearch search = automorphisms_fixing(gram, a, options);
    if (search.status != MatchStatus::found) summary.complete = false;
    for (const auto& sigma : search.automorphisms) {
      if (sigma.is_identity()) continue;
      ++summary.fixed_point_census[sigma.fixed_points()];
      generators.insert(sigma);
    }
  }
  summary.anchored_generators = generators.size();
  const GroupReport group = group_closure({generators.begin(), generators.end()}, gram.n());
  summary.group_order = group.order;
  summary.h_order = group.h_order;
  summary.element_orders = group.element_orders;
  return summary;
}

ClassificationReport classify(const PhaseVector& phases, const ClassifyOptions& options) {
  const GramCandidate gram = gram_from_phases(phases);
  const BargmannTensor tensor = BargmannTensor::of(gram);
  ClassificationReport report;
  report.gen_set = generating_set(tensor, options.match.tol);
  report.island_hash = island_hash(report.gen_set);
  report.frequencies = canonical_frequencies(phases, report.gen_set);
  if (options.match_reference) {
    bool indeterminate = false;
    for (const ReferenceGram& ref : reference_grams(phases.n())) {
      const PermutationMatch m = find_permutation(gram, gram_from_phases(ref.phases), options.match);
      if (m.status == MatchStatus::found) {
        report.matched_reference = true;
        report.reference_label = ref.label;
        report.permutation = m.sigma;
        break;
      }
      indeterminate = indeterminate || m.status == MatchStatus::indeterminate;
    }
    report.match_status = report.matched_reference ? MatchStatus::found
                          : indeterminate          ? MatchStatus::indeterminate
                                                   : MatchStatus::none;
  }
  if (options.automorphisms) report.automorphisms = automorphism_summary(gram, options.match);
  return report;
}

}  // namespace sicgram
